use super::lexer::NumLit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PortDir {
    Input,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetKind {
    Reg,
    Wire,
    Logic,
}

impl NetKind {
    pub fn keyword(self) -> &'static str {
        match self {
            NetKind::Reg => "reg",
            NetKind::Wire => "wire",
            NetKind::Logic => "logic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub dir: PortDir,
    /// Explicit `reg`/`wire`/`logic` keyword on the port, if any.
    pub net: Option<NetKind>,
    pub name: String,
    pub width: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub kind: NetKind,
    pub name: String,
    pub width: u32,
    pub init: Option<NumLit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContAssign {
    pub lhs: String,
    pub rhs: ExprAst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    NonBlocking {
        lhs: String,
        rhs: ExprAst,
    },
    If {
        cond: ExprAst,
        then: Vec<Stmt>,
        els: Option<Vec<Stmt>>,
    },
}

/// An `always_ff @(posedge clock)` process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqBlock {
    pub clock: String,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssertKind {
    Assert,
    Assume,
}

impl AssertKind {
    pub fn keyword(self) -> &'static str {
        match self {
            AssertKind::Assert => "assert",
            AssertKind::Assume => "assume",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssertionAst {
    pub name: String,
    pub kind: AssertKind,
    pub body: ExprAst,
    /// Clock named in `@(posedge clk)`; `None` for the bare-expression form.
    pub clock: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleAst {
    pub name: String,
    pub ports: Vec<Port>,
    pub decls: Vec<Decl>,
    pub assigns: Vec<ContAssign>,
    pub seq_blocks: Vec<SeqBlock>,
    pub assertions: Vec<AssertionAst>,
}

impl ModuleAst {
    /// Every declared name with its width, ports first.
    pub fn symbols(&self) -> SymbolTable {
        let mut table = SymbolTable::new();
        for p in &self.ports {
            table.insert(p.name.clone(), p.width);
        }
        for d in &self.decls {
            table.insert(d.name.clone(), d.width);
        }
        table
    }
}

pub type SymbolTable = std::collections::BTreeMap<String, u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    /// `~`
    Not,
    /// `!`
    LogNot,
    /// `-`
    Neg,
    /// `&`
    RedAnd,
    /// `|`
    RedOr,
    /// `^`
    RedXor,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Not => "~",
            UnaryOp::LogNot => "!",
            UnaryOp::Neg => "-",
            UnaryOp::RedAnd => "&",
            UnaryOp::RedOr => "|",
            UnaryOp::RedXor => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    And,
    Or,
    Xor,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    LogAnd,
    LogOr,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::And => "&",
            BinaryOp::Or => "|",
            BinaryOp::Xor => "^",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::LogAnd => "&&",
            BinaryOp::LogOr => "||",
        }
    }

    /// Binding strength; higher binds tighter. All binary operators are left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::LogOr => 1,
            BinaryOp::LogAnd => 2,
            BinaryOp::Or => 3,
            BinaryOp::Xor => 4,
            BinaryOp::And => 5,
            BinaryOp::Eq | BinaryOp::Ne => 6,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 7,
            BinaryOp::Add | BinaryOp::Sub => 8,
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "&" => BinaryOp::And,
            "|" => BinaryOp::Or,
            "^" => BinaryOp::Xor,
            "==" => BinaryOp::Eq,
            "!=" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            ">=" => BinaryOp::Ge,
            "&&" => BinaryOp::LogAnd,
            "||" => BinaryOp::LogOr,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprAst {
    Ident(String),
    Number(NumLit),
    Unary {
        op: UnaryOp,
        arg: Box<ExprAst>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<ExprAst>,
        rhs: Box<ExprAst>,
    },
    Ternary {
        cond: Box<ExprAst>,
        then: Box<ExprAst>,
        els: Box<ExprAst>,
    },
    Index {
        base: Box<ExprAst>,
        index: u32,
    },
    Slice {
        base: Box<ExprAst>,
        hi: u32,
        lo: u32,
    },
    Concat(Vec<ExprAst>),
}

impl ExprAst {
    pub fn ident(name: &str) -> Self {
        ExprAst::Ident(name.to_string())
    }

    pub fn binary(op: BinaryOp, lhs: ExprAst, rhs: ExprAst) -> Self {
        ExprAst::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// Calls `f` on every identifier in the expression, left to right.
    pub fn for_each_ident<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            ExprAst::Ident(name) => f(name),
            ExprAst::Number(_) => {}
            ExprAst::Unary { arg, .. } => arg.for_each_ident(f),
            ExprAst::Binary { lhs, rhs, .. } => {
                lhs.for_each_ident(f);
                rhs.for_each_ident(f);
            }
            ExprAst::Ternary { cond, then, els } => {
                cond.for_each_ident(f);
                then.for_each_ident(f);
                els.for_each_ident(f);
            }
            ExprAst::Index { base, .. } | ExprAst::Slice { base, .. } => base.for_each_ident(f),
            ExprAst::Concat(parts) => parts.iter().for_each(|p| p.for_each_ident(f)),
        }
    }
}
