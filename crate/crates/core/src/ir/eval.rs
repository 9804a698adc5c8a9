use super::expr::{mask, BinOp, Expr, UnOp, VarId};
use super::{Frame, TransitionSystem};

/// Evaluates `expr` with variable values supplied by `env`.
pub fn eval_with(expr: &Expr, env: &impl Fn(VarId) -> u64) -> u64 {
    match expr {
        Expr::Const { value, .. } => *value,
        Expr::Var { id, width } => env(*id) & mask(*width),
        Expr::Slice { expr, hi, lo } => (eval_with(expr, env) >> lo) & mask(hi - lo + 1),
        Expr::Concat(parts) => parts.iter().fold(0u64, |acc, p| {
            let w = p.width();
            let shifted = if w >= 64 { 0 } else { acc << w };
            shifted | eval_with(p, env)
        }),
        Expr::Unop { op, expr } => {
            let w = expr.width();
            let v = eval_with(expr, env);
            match op {
                UnOp::Not => !v & mask(w),
                UnOp::Neg => v.wrapping_neg() & mask(w),
                UnOp::RedAnd => (v == mask(w)) as u64,
                UnOp::RedOr => (v != 0) as u64,
                UnOp::RedXor => (v.count_ones() & 1) as u64,
            }
        }
        Expr::Binop { op, lhs, rhs } => {
            let w = lhs.width();
            let a = eval_with(lhs, env);
            let b = eval_with(rhs, env);
            match op {
                BinOp::Add => a.wrapping_add(b) & mask(w),
                BinOp::Sub => a.wrapping_sub(b) & mask(w),
                BinOp::And => a & b,
                BinOp::Or => a | b,
                BinOp::Xor => a ^ b,
                BinOp::Eq => (a == b) as u64,
                BinOp::Ne => (a != b) as u64,
                BinOp::Ult => (a < b) as u64,
                BinOp::Ule => (a <= b) as u64,
                BinOp::Ugt => (a > b) as u64,
                BinOp::Uge => (a >= b) as u64,
            }
        }
        Expr::Ite { cond, then, els } => {
            if eval_with(cond, env) != 0 {
                eval_with(then, env)
            } else {
                eval_with(els, env)
            }
        }
    }
}

/// Evaluates `expr` in `frame`.
///
/// Panics if the frame lacks a variable that `expr` reads.
pub fn eval(expr: &Expr, frame: &Frame) -> u64 {
    eval_with(expr, &|id| {
        frame
            .get(id)
            .unwrap_or_else(|| panic!("frame has no value for variable {}", id.0))
    })
}

/// Computes the successor state: every state variable's next function
/// evaluated on `frame`. Inputs are left unassigned in the result.
pub fn step(ts: &TransitionSystem, frame: &Frame) -> Frame {
    let mut next = Frame::default();
    for s in &ts.states {
        next.set(s.id, eval(&s.next, frame));
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: u64, w: u32) -> Expr {
        Expr::constant(v, w)
    }

    #[test]
    fn constants_and_wraparound() {
        let f = Frame::default();
        assert_eq!(eval(&c(5, 8), &f), 5);
        assert_eq!(eval(&Expr::binop(BinOp::Add, c(255, 8), c(1, 8)), &f), 0);
        assert_eq!(eval(&Expr::binop(BinOp::Sub, c(0, 4), c(1, 4)), &f), 15);
        assert_eq!(eval(&c(0x8000_0000, 32).slice(31, 31), &f), 1);
        assert_eq!(eval(&Expr::unop(UnOp::Neg, c(1, 64)), &f), u64::MAX);
    }

    #[test]
    fn concat_orders_msb_first() {
        let f = Frame::default();
        let e = Expr::concat(vec![c(0b10, 2), c(0b011, 3)]);
        assert_eq!(eval(&e, &f), 0b10011);
    }

    #[test]
    fn reductions() {
        let f = Frame::default();
        assert_eq!(eval(&Expr::unop(UnOp::RedAnd, c(0xF, 4)), &f), 1);
        assert_eq!(eval(&Expr::unop(UnOp::RedAnd, c(0x7, 4)), &f), 0);
        assert_eq!(eval(&Expr::unop(UnOp::RedXor, c(0b1011, 4)), &f), 1);
        assert_eq!(eval(&Expr::unop(UnOp::RedOr, c(0, 4)), &f), 0);
    }
}
