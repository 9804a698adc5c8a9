use serde::{Deserialize, Serialize};

/// Index of a variable in [`TransitionSystem::vars`](super::TransitionSystem).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnOp {
    Not,
    Neg,
    RedAnd,
    RedOr,
    RedXor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    And,
    Or,
    Xor,
    Eq,
    Ne,
    Ult,
    Ule,
    Ugt,
    Uge,
}

impl BinOp {
    pub fn is_predicate(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Ult | BinOp::Ule | BinOp::Ugt | BinOp::Uge
        )
    }

    pub const ALL: [BinOp; 11] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::And,
        BinOp::Or,
        BinOp::Xor,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Ult,
        BinOp::Ule,
        BinOp::Ugt,
        BinOp::Uge,
    ];
}

impl UnOp {
    pub const ALL: [UnOp; 5] = [UnOp::Not, UnOp::Neg, UnOp::RedAnd, UnOp::RedOr, UnOp::RedXor];
}

/// Word-level bit-vector expression. Arithmetic is unsigned and modular.
///
/// Build through the constructor functions; they check widths and fold the
/// trivial cases (full-width slices, empty extensions) so structurally equal
/// candidates compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Const {
        value: u64,
        width: u32,
    },
    Var {
        id: VarId,
        width: u32,
    },
    Slice {
        expr: Box<Expr>,
        hi: u32,
        lo: u32,
    },
    /// Most significant part first.
    Concat(Vec<Expr>),
    Unop {
        op: UnOp,
        expr: Box<Expr>,
    },
    Binop {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Ite {
        cond: Box<Expr>,
        then: Box<Expr>,
        els: Box<Expr>,
    },
}

pub const MAX_WIDTH: u32 = 64;

pub fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl Expr {
    pub fn width(&self) -> u32 {
        match self {
            Expr::Const { width, .. } | Expr::Var { width, .. } => *width,
            Expr::Slice { hi, lo, .. } => hi - lo + 1,
            Expr::Concat(parts) => parts.iter().map(Expr::width).sum(),
            Expr::Unop { op, expr } => match op {
                UnOp::Not | UnOp::Neg => expr.width(),
                UnOp::RedAnd | UnOp::RedOr | UnOp::RedXor => 1,
            },
            Expr::Binop { op, lhs, .. } => {
                if op.is_predicate() {
                    1
                } else {
                    lhs.width()
                }
            }
            Expr::Ite { then, .. } => then.width(),
        }
    }

    pub fn constant(value: u64, width: u32) -> Expr {
        assert!((1..=MAX_WIDTH).contains(&width), "width {width} out of range");
        assert!(value & !mask(width) == 0, "constant {value} does not fit in {width} bits");
        Expr::Const { value, width }
    }

    pub fn bool(b: bool) -> Expr {
        Expr::constant(b as u64, 1)
    }

    pub fn var(id: VarId, width: u32) -> Expr {
        assert!((1..=MAX_WIDTH).contains(&width));
        Expr::Var { id, width }
    }

    pub fn as_const(&self) -> Option<u64> {
        match self {
            Expr::Const { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn slice(self, hi: u32, lo: u32) -> Expr {
        let w = self.width();
        assert!(lo <= hi && hi < w, "slice [{hi}:{lo}] out of range for width {w}");
        if lo == 0 && hi + 1 == w {
            return self;
        }
        match self {
            Expr::Const { value, .. } => Expr::constant((value >> lo) & mask(hi - lo + 1), hi - lo + 1),
            Expr::Slice { expr, lo: inner_lo, .. } => expr.slice(hi + inner_lo, lo + inner_lo),
            e => Expr::Slice {
                expr: Box::new(e),
                hi,
                lo,
            },
        }
    }

    pub fn bit(self, i: u32) -> Expr {
        self.slice(i, i)
    }

    pub fn concat(parts: Vec<Expr>) -> Expr {
        assert!(!parts.is_empty());
        assert!(parts.iter().map(Expr::width).sum::<u32>() <= MAX_WIDTH);
        if parts.len() == 1 {
            return parts.into_iter().next().unwrap();
        }
        Expr::Concat(parts)
    }

    /// Zero-extends to `width` (no-op when already that wide).
    pub fn zext(self, width: u32) -> Expr {
        let w = self.width();
        assert!(width >= w);
        if width == w {
            return self;
        }
        if let Expr::Const { value, .. } = self {
            return Expr::constant(value, width);
        }
        Expr::concat(vec![Expr::constant(0, width - w), self])
    }

    /// Truncates or zero-extends to exactly `width`.
    pub fn resize(self, width: u32) -> Expr {
        let w = self.width();
        if width <= w {
            self.slice(width - 1, 0)
        } else {
            self.zext(width)
        }
    }

    pub fn unop(op: UnOp, expr: Expr) -> Expr {
        Expr::Unop {
            op,
            expr: Box::new(expr),
        }
    }

    pub fn binop(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        assert_eq!(lhs.width(), rhs.width(), "binop {op:?} operand widths differ");
        Expr::Binop {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn ite(cond: Expr, then: Expr, els: Expr) -> Expr {
        assert_eq!(cond.width(), 1);
        assert_eq!(then.width(), els.width());
        if then == els {
            return then;
        }
        match cond.as_const() {
            Some(1) => then,
            Some(_) => els,
            None => Expr::Ite {
                cond: Box::new(cond),
                then: Box::new(then),
                els: Box::new(els),
            },
        }
    }

    pub fn eq(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binop(BinOp::Eq, lhs, rhs)
    }

    pub fn not(self) -> Expr {
        Expr::unop(UnOp::Not, self)
    }

    /// Nonzero test: identity for 1-bit expressions, or-reduction otherwise.
    pub fn to_bool(self) -> Expr {
        if self.width() == 1 {
            self
        } else {
            Expr::unop(UnOp::RedOr, self)
        }
    }

    pub fn and(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binop(BinOp::And, lhs, rhs)
    }

    pub fn or(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binop(BinOp::Or, lhs, rhs)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Expr::Const { .. } | Expr::Var { .. } => 0,
            Expr::Slice { expr, .. } | Expr::Unop { expr, .. } => expr.size(),
            Expr::Concat(parts) => parts.iter().map(Expr::size).sum(),
            Expr::Binop { lhs, rhs, .. } => lhs.size() + rhs.size(),
            Expr::Ite { cond, then, els } => cond.size() + then.size() + els.size(),
        }
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(VarId)) {
        match self {
            Expr::Const { .. } => {}
            Expr::Var { id, .. } => f(*id),
            Expr::Slice { expr, .. } | Expr::Unop { expr, .. } => expr.for_each_var(f),
            Expr::Concat(parts) => parts.iter().for_each(|p| p.for_each_var(f)),
            Expr::Binop { lhs, rhs, .. } => {
                lhs.for_each_var(f);
                rhs.for_each_var(f);
            }
            Expr::Ite { cond, then, els } => {
                cond.for_each_var(f);
                then.for_each_var(f);
                els.for_each_var(f);
            }
        }
    }

    /// Traces bit `bit` of this expression back to a variable bit, when the
    /// expression is a plain wiring of variables (vars, slices, concats).
    pub fn bit_source(&self, bit: u32) -> Option<(VarId, u32)> {
        match self {
            Expr::Var { id, .. } => Some((*id, bit)),
            Expr::Slice { expr, lo, .. } => expr.bit_source(bit + lo),
            Expr::Concat(parts) => {
                let mut offset = 0;
                for p in parts.iter().rev() {
                    let w = p.width();
                    if bit < offset + w {
                        return p.bit_source(bit - offset);
                    }
                    offset += w;
                }
                None
            }
            _ => None,
        }
    }
}
