use super::expr::{BinOp, Expr, UnOp};
use super::TransitionSystem;

fn binop_symbol(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::And => "&",
        BinOp::Or => "|",
        BinOp::Xor => "^",
        BinOp::Eq => "==",
        BinOp::Ne => "!=",
        BinOp::Ult => "<",
        BinOp::Ule => "<=",
        BinOp::Ugt => ">",
        BinOp::Uge => ">=",
    }
}

fn binop_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 3,
        BinOp::Xor => 4,
        BinOp::And => 5,
        BinOp::Eq | BinOp::Ne => 6,
        BinOp::Ult | BinOp::Ule | BinOp::Ugt | BinOp::Uge => 7,
        BinOp::Add | BinOp::Sub => 8,
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Ite { .. } => 0,
        Expr::Binop { op, .. } => binop_prec(*op),
        Expr::Unop { .. } => 9,
        _ => 10,
    }
}

fn sized_literal(value: u64, width: u32) -> String {
    if width > 16 {
        format!("{width}'h{value:X}")
    } else {
        format!("{width}'d{value}")
    }
}

fn bits_needed(value: u64) -> u32 {
    (64 - value.leading_zeros()).max(1)
}

/// Prints expressions in SVA-lite source syntax. The output re-elaborates to
/// the same expression for everything the template generator produces.
pub struct ExprPrinter<'a> {
    ts: &'a TransitionSystem,
}

impl<'a> ExprPrinter<'a> {
    pub fn new(ts: &'a TransitionSystem) -> Self {
        ExprPrinter { ts }
    }

    pub fn print(&self, e: &Expr) -> String {
        let mut out = String::new();
        self.write(&mut out, e, false);
        out
    }

    fn operand(&self, out: &mut String, e: &Expr, min: u8, unsized_ok: bool) {
        if prec(e) < min {
            out.push('(');
            self.write(out, e, unsized_ok);
            out.push(')');
        } else {
            self.write(out, e, unsized_ok);
        }
    }

    fn write(&self, out: &mut String, e: &Expr, unsized_ok: bool) {
        match e {
            Expr::Const { value, width } => {
                if unsized_ok && bits_needed(*value) <= *width {
                    out.push_str(&value.to_string());
                } else {
                    out.push_str(&sized_literal(*value, *width));
                }
            }
            Expr::Var { id, .. } => out.push_str(self.ts.name_of(*id)),
            Expr::Slice { expr, hi, lo } => {
                self.operand(out, expr, 10, false);
                if hi == lo {
                    out.push_str(&format!("[{hi}]"));
                } else {
                    out.push_str(&format!("[{hi}:{lo}]"));
                }
            }
            Expr::Concat(parts) => {
                out.push('{');
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    self.write(out, p, false);
                }
                out.push('}');
            }
            Expr::Unop { op, expr } => {
                let sym = match op {
                    UnOp::Not if expr.width() == 1 => "!",
                    UnOp::Not => "~",
                    UnOp::Neg => "-",
                    UnOp::RedAnd => "&",
                    UnOp::RedOr => "|",
                    UnOp::RedXor => "^",
                };
                out.push_str(sym);
                if matches!(**expr, Expr::Unop { .. }) {
                    out.push('(');
                    self.write(out, expr, false);
                    out.push(')');
                } else {
                    self.operand(out, expr, 9, false);
                }
            }
            Expr::Binop { op, lhs, rhs } => {
                let p = binop_prec(*op);
                // an unsized literal picks up the other operand's width
                let lhs_unsized = rhs.as_const().is_none();
                let rhs_unsized = lhs.as_const().is_none();
                self.operand(out, lhs, p, lhs_unsized);
                out.push_str(&format!(" {} ", binop_symbol(*op)));
                self.operand(out, rhs, p + 1, rhs_unsized);
            }
            Expr::Ite { cond, then, els } => {
                self.operand(out, cond, 1, false);
                out.push_str(" ? ");
                let then_unsized = els.as_const().is_none();
                let els_unsized = then.as_const().is_none();
                self.operand(out, then, 1, then_unsized);
                out.push_str(" : ");
                self.write(out, els, els_unsized);
            }
        }
    }
}

/// S-expression form used by the `dump` format.
///
/// Variables print as their names, constants as `W'dV`, and operators as
/// `(op args...)` with op one of `add sub and or xor eq ne ult ule ugt uge
/// not neg redand redor redxor slice concat ite`.
pub fn sexpr(ts: &TransitionSystem, e: &Expr) -> String {
    match e {
        Expr::Const { value, width } => format!("{width}'d{value}"),
        Expr::Var { id, .. } => ts.name_of(*id).to_string(),
        Expr::Slice { expr, hi, lo } => format!("(slice {} {hi} {lo})", sexpr(ts, expr)),
        Expr::Concat(parts) => {
            let inner: Vec<String> = parts.iter().map(|p| sexpr(ts, p)).collect();
            format!("(concat {})", inner.join(" "))
        }
        Expr::Unop { op, expr } => {
            let name = match op {
                UnOp::Not => "not",
                UnOp::Neg => "neg",
                UnOp::RedAnd => "redand",
                UnOp::RedOr => "redor",
                UnOp::RedXor => "redxor",
            };
            format!("({name} {})", sexpr(ts, expr))
        }
        Expr::Binop { op, lhs, rhs } => {
            let name = match op {
                BinOp::Add => "add",
                BinOp::Sub => "sub",
                BinOp::And => "and",
                BinOp::Or => "or",
                BinOp::Xor => "xor",
                BinOp::Eq => "eq",
                BinOp::Ne => "ne",
                BinOp::Ult => "ult",
                BinOp::Ule => "ule",
                BinOp::Ugt => "ugt",
                BinOp::Uge => "uge",
            };
            format!("({name} {} {})", sexpr(ts, lhs), sexpr(ts, rhs))
        }
        Expr::Ite { cond, then, els } => format!(
            "(ite {} {} {})",
            sexpr(ts, cond),
            sexpr(ts, then),
            sexpr(ts, els)
        ),
    }
}
