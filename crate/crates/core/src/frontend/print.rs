//! Pretty-printer whose output re-parses to a structurally identical AST.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::*;

// Ternary < binary operators (1..=8) < unary < postfix/primary.
const PREC_TERNARY: u8 = 0;
const PREC_UNARY: u8 = 9;
const PREC_ATOM: u8 = 10;

fn prec(e: &ExprAst) -> u8 {
    match e {
        ExprAst::Ternary { .. } => PREC_TERNARY,
        ExprAst::Binary { op, .. } => op.precedence(),
        ExprAst::Unary { .. } => PREC_UNARY,
        _ => PREC_ATOM,
    }
}

fn write_operand(f: &mut Formatter<'_>, e: &ExprAst, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl Display for ExprAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Ident(name) => f.write_str(name),
            ExprAst::Number(n) => write!(f, "{n}"),
            ExprAst::Unary { op, arg } => {
                f.write_str(op.symbol())?;
                // `- -x` and `& &x` would lex differently without the parens.
                if matches!(**arg, ExprAst::Unary { .. }) {
                    write!(f, "({arg})")
                } else {
                    write_operand(f, arg, PREC_UNARY)
                }
            }
            ExprAst::Binary { op, lhs, rhs } => {
                write_operand(f, lhs, op.precedence())?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, rhs, op.precedence() + 1)
            }
            ExprAst::Ternary { cond, then, els } => {
                write_operand(f, cond, 1)?;
                f.write_str(" ? ")?;
                write_operand(f, then, 1)?;
                f.write_str(" : ")?;
                write!(f, "{els}")
            }
            ExprAst::Index { base, index } => {
                write_operand(f, base, PREC_ATOM)?;
                write!(f, "[{index}]")
            }
            ExprAst::Slice { base, hi, lo } => {
                write_operand(f, base, PREC_ATOM)?;
                write!(f, "[{hi}:{lo}]")
            }
            ExprAst::Concat(parts) => {
                f.write_char('{')?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_char('}')
            }
        }
    }
}

impl Display for AssertionAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} property (", self.name, self.kind.keyword())?;
        if let Some(clk) = &self.clock {
            write!(f, "@(posedge {clk}) ")?;
        }
        write!(f, "{});", self.body)
    }
}

fn range(width: u32) -> String {
    if width == 1 {
        String::new()
    } else {
        format!("[{}:0] ", width - 1)
    }
}

fn write_stmts(f: &mut Formatter<'_>, stmts: &[Stmt], indent: usize) -> fmt::Result {
    let pad = "  ".repeat(indent);
    writeln!(f, "begin")?;
    for s in stmts {
        match s {
            Stmt::NonBlocking { lhs, rhs } => writeln!(f, "{pad}  {lhs} <= {rhs};")?,
            Stmt::If { cond, then, els } => {
                write!(f, "{pad}  if ({cond}) ")?;
                write_stmts(f, then, indent + 1)?;
                if let Some(els) = els {
                    write!(f, "{pad}  else ")?;
                    write_stmts(f, els, indent + 1)?;
                }
            }
        }
    }
    writeln!(f, "{pad}end")
}

impl Display for ModuleAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "module {}", self.name)?;
        if !self.ports.is_empty() {
            f.write_str(" (\n")?;
            for (i, p) in self.ports.iter().enumerate() {
                let dir = match p.dir {
                    PortDir::Input => "input",
                    PortDir::Output => "output",
                };
                let net = p.net.map(|n| format!("{} ", n.keyword())).unwrap_or_default();
                let sep = if i + 1 == self.ports.len() { "" } else { "," };
                writeln!(f, "  {dir} {net}{}{}{sep}", range(p.width), p.name)?;
            }
            f.write_str(")")?;
        }
        f.write_str(";\n")?;
        for d in &self.decls {
            write!(f, "  {} {}{}", d.kind.keyword(), range(d.width), d.name)?;
            if let Some(init) = d.init {
                write!(f, " = {init}")?;
            }
            f.write_str(";\n")?;
        }
        for a in &self.assigns {
            writeln!(f, "  assign {} = {};", a.lhs, a.rhs)?;
        }
        for b in &self.seq_blocks {
            write!(f, "  always_ff @(posedge {}) ", b.clock)?;
            write_stmts(f, &b.body, 1)?;
        }
        for a in &self.assertions {
            writeln!(f, "  {a}")?;
        }
        f.write_str("endmodule\n")
    }
}
