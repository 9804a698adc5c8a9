//! AST → transition system.
//!
//! Width rules: unsized literals take the width of their context; operands of
//! arithmetic, bitwise and conditional operators are zero-extended to the
//! widest operand (or the assignment target, if wider); assignments truncate
//! or zero-extend to the target width. Comparison operands are sized against
//! each other and yield one bit.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::frontend::{
    AssertKind, AssertionAst, BinaryOp, ExprAst, ModuleAst, PortDir, Stmt, UnaryOp,
};

use super::expr::{BinOp, Expr, UnOp, VarId, MAX_WIDTH};
use super::{Init, Property, StateVar, TransitionSystem, VarInfo, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ElabError {
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("`{0}` is declared more than once")]
    Redeclared(String),
    #[error("combinational cycle through `{0}`")]
    CombinationalCycle(String),
    #[error("`{0}` has more than one driver")]
    MultiplyDriven(String),
    #[error("input `{0}` cannot be assigned")]
    AssignToInput(String),
    #[error("more than one clock: `{0}` and `{1}`")]
    MultipleClocks(String, String),
    #[error("clock `{0}` must be a 1-bit input port")]
    BadClock(String),
    #[error("assertion `{name}` is clocked by `{found}` but the design clock is `{expected}`")]
    ClockMismatch {
        name: String,
        expected: String,
        found: String,
    },
    #[error("clock `{0}` cannot be used as a value")]
    ClockAsValue(String),
    #[error("{0}")]
    Width(String),
    #[error("duplicate property name `{0}`")]
    DuplicateProperty(String),
    #[error("design has no state variables")]
    NoState,
}

type EResult<T> = Result<T, ElabError>;

fn bits_needed(value: u64) -> u32 {
    (64 - value.leading_zeros()).max(1)
}

fn check_width(w: u32, what: &dyn Fn() -> String) -> EResult<u32> {
    if w == 0 || w > MAX_WIDTH {
        Err(ElabError::Width(format!("{} has width {w}; supported widths are 1..=64", what())))
    } else {
        Ok(w)
    }
}

/// Resolves names to expressions and sizes AST expressions.
pub(crate) trait Scope {
    /// Width of a name without elaborating it.
    fn width_of(&mut self, name: &str) -> EResult<u32>;
    /// The expression a name stands for.
    fn resolve(&mut self, name: &str) -> EResult<Expr>;
}

fn natural_width(scope: &mut dyn Scope, e: &ExprAst) -> EResult<u32> {
    let w = match e {
        ExprAst::Ident(name) => scope.width_of(name)?,
        ExprAst::Number(n) => n.width.unwrap_or_else(|| bits_needed(n.value)),
        ExprAst::Unary { op, arg } => match op {
            UnaryOp::Not | UnaryOp::Neg => natural_width(scope, arg)?,
            _ => 1,
        },
        ExprAst::Binary { op, lhs, rhs } => match op {
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::And | BinaryOp::Or | BinaryOp::Xor => {
                natural_width(scope, lhs)?.max(natural_width(scope, rhs)?)
            }
            _ => 1,
        },
        ExprAst::Ternary { then, els, .. } => natural_width(scope, then)?.max(natural_width(scope, els)?),
        ExprAst::Index { .. } => 1,
        ExprAst::Slice { hi, lo, .. } => {
            if lo > hi {
                return Err(ElabError::Width(format!("slice [{hi}:{lo}] is reversed")));
            }
            hi - lo + 1
        }
        ExprAst::Concat(parts) => {
            let mut total = 0;
            for p in parts {
                total += natural_width(scope, p)?;
            }
            total
        }
    };
    check_width(w, &|| format!("expression `{e}`"))
}

fn elab_self(scope: &mut dyn Scope, e: &ExprAst) -> EResult<Expr> {
    let w = natural_width(scope, e)?;
    elab_ctx(scope, e, w)
}

fn elab_bool(scope: &mut dyn Scope, e: &ExprAst) -> EResult<Expr> {
    Ok(elab_self(scope, e)?.to_bool())
}

/// Elaborates `e` to exactly `width` bits (`width` ≥ natural width).
fn elab_ctx(scope: &mut dyn Scope, e: &ExprAst, width: u32) -> EResult<Expr> {
    let r = match e {
        ExprAst::Ident(name) => scope.resolve(name)?.zext(width),
        ExprAst::Number(n) => match n.width {
            None => Expr::constant(n.value, width),
            Some(w) => Expr::constant(n.value, w).zext(width),
        },
        ExprAst::Unary { op, arg } => match op {
            UnaryOp::Not => Expr::unop(UnOp::Not, elab_ctx(scope, arg, width)?),
            UnaryOp::Neg => Expr::unop(UnOp::Neg, elab_ctx(scope, arg, width)?),
            UnaryOp::LogNot => elab_bool(scope, arg)?.not().zext(width),
            UnaryOp::RedAnd => Expr::unop(UnOp::RedAnd, elab_self(scope, arg)?).zext(width),
            UnaryOp::RedOr => Expr::unop(UnOp::RedOr, elab_self(scope, arg)?).zext(width),
            UnaryOp::RedXor => Expr::unop(UnOp::RedXor, elab_self(scope, arg)?).zext(width),
        },
        ExprAst::Binary { op, lhs, rhs } => {
            let arith = match op {
                BinaryOp::Add => Some(BinOp::Add),
                BinaryOp::Sub => Some(BinOp::Sub),
                BinaryOp::And => Some(BinOp::And),
                BinaryOp::Or => Some(BinOp::Or),
                BinaryOp::Xor => Some(BinOp::Xor),
                _ => None,
            };
            if let Some(bop) = arith {
                Expr::binop(bop, elab_ctx(scope, lhs, width)?, elab_ctx(scope, rhs, width)?)
            } else {
                let bit = match op {
                    BinaryOp::LogAnd => Expr::and(elab_bool(scope, lhs)?, elab_bool(scope, rhs)?),
                    BinaryOp::LogOr => Expr::or(elab_bool(scope, lhs)?, elab_bool(scope, rhs)?),
                    _ => {
                        let cmp = match op {
                            BinaryOp::Eq => BinOp::Eq,
                            BinaryOp::Ne => BinOp::Ne,
                            BinaryOp::Lt => BinOp::Ult,
                            BinaryOp::Le => BinOp::Ule,
                            BinaryOp::Gt => BinOp::Ugt,
                            BinaryOp::Ge => BinOp::Uge,
                            _ => unreachable!(),
                        };
                        let ow = natural_width(scope, lhs)?.max(natural_width(scope, rhs)?);
                        Expr::binop(cmp, elab_ctx(scope, lhs, ow)?, elab_ctx(scope, rhs, ow)?)
                    }
                };
                bit.zext(width)
            }
        }
        ExprAst::Ternary { cond, then, els } => {
            let c = elab_bool(scope, cond)?;
            Expr::ite(c, elab_ctx(scope, then, width)?, elab_ctx(scope, els, width)?)
        }
        ExprAst::Index { base, index } => {
            let b = elab_self(scope, base)?;
            if *index >= b.width() {
                return Err(ElabError::Width(format!(
                    "bit {index} out of range for `{base}` of width {}",
                    b.width()
                )));
            }
            b.bit(*index).zext(width)
        }
        ExprAst::Slice { base, hi, lo } => {
            let b = elab_self(scope, base)?;
            if *hi >= b.width() || lo > hi {
                return Err(ElabError::Width(format!(
                    "slice [{hi}:{lo}] out of range for `{base}` of width {}",
                    b.width()
                )));
            }
            b.slice(*hi, *lo).zext(width)
        }
        ExprAst::Concat(parts) => {
            let mut elems = Vec::with_capacity(parts.len());
            for p in parts {
                elems.push(elab_self(scope, p)?);
            }
            Expr::concat(elems).zext(width)
        }
    };
    debug_assert_eq!(r.width(), width);
    Ok(r)
}

/// Elaborates `e` for assignment to a `target_width`-bit destination.
fn elab_assign(scope: &mut dyn Scope, e: &ExprAst, target_width: u32) -> EResult<Expr> {
    let w = natural_width(scope, e)?.max(target_width);
    Ok(elab_ctx(scope, e, w)?.resize(target_width))
}

/// Scope over an already elaborated system (used for assertions added later).
struct SystemScope<'a> {
    ts: &'a TransitionSystem,
}

impl Scope for SystemScope<'_> {
    fn width_of(&mut self, name: &str) -> EResult<u32> {
        self.resolve(name).map(|e| e.width())
    }

    fn resolve(&mut self, name: &str) -> EResult<Expr> {
        if self.ts.clock.as_deref() == Some(name) {
            return Err(ElabError::ClockAsValue(name.to_string()));
        }
        self.ts.resolve(name).ok_or_else(|| ElabError::Undeclared(name.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Driver {
    Seq(usize),
    Assign(usize),
}

struct Builder<'a> {
    ast: &'a ModuleAst,
    widths: BTreeMap<String, u32>,
    decl_init: HashMap<String, u64>,
    is_input: BTreeSet<String>,
    drivers: HashMap<String, Driver>,
    clock: Option<String>,
    /// Folded reset inputs with their deasserted value.
    resets: BTreeMap<String, u64>,
    vars: Vec<VarInfo>,
    ids: HashMap<String, VarId>,
    wire_cache: HashMap<String, Expr>,
    visiting: Vec<String>,
}

impl<'a> Builder<'a> {
    fn declare(&mut self, name: &str, width: u32) -> EResult<()> {
        check_width(width, &|| format!("`{name}`"))?;
        if self.widths.insert(name.to_string(), width).is_some() {
            return Err(ElabError::Redeclared(name.to_string()));
        }
        Ok(())
    }

    fn add_var(&mut self, name: &str, kind: VarKind) -> VarId {
        let id = VarId(self.vars.len() as u32);
        self.vars.push(VarInfo {
            name: name.to_string(),
            width: self.widths[name],
            kind,
        });
        self.ids.insert(name.to_string(), id);
        id
    }
}

impl Scope for Builder<'_> {
    fn width_of(&mut self, name: &str) -> EResult<u32> {
        if self.clock.as_deref() == Some(name) {
            return Err(ElabError::ClockAsValue(name.to_string()));
        }
        self.widths
            .get(name)
            .copied()
            .ok_or_else(|| ElabError::Undeclared(name.to_string()))
    }

    fn resolve(&mut self, name: &str) -> EResult<Expr> {
        let width = self.width_of(name)?;
        if let Some(&v) = self.resets.get(name) {
            return Ok(Expr::constant(v, 1));
        }
        if let Some(&id) = self.ids.get(name) {
            return Ok(Expr::var(id, width));
        }
        match self.drivers.get(name).copied() {
            Some(Driver::Assign(i)) => {
                if let Some(e) = self.wire_cache.get(name) {
                    return Ok(e.clone());
                }
                if self.visiting.iter().any(|n| n == name) {
                    return Err(ElabError::CombinationalCycle(name.to_string()));
                }
                self.visiting.push(name.to_string());
                let rhs = &self.ast.assigns[i].rhs;
                let e = elab_assign(self, rhs, width)?;
                self.visiting.pop();
                self.wire_cache.insert(name.to_string(), e.clone());
                Ok(e)
            }
            // Registers were allocated up front; anything else is an
            // undriven net, modelled as a free constant.
            _ => {
                let id = self.add_var(name, VarKind::State);
                Ok(Expr::var(id, width))
            }
        }
    }
}

fn collect_assigned(stmts: &[Stmt], out: &mut Vec<String>) {
    for s in stmts {
        match s {
            Stmt::NonBlocking { lhs, .. } => {
                if !out.contains(lhs) {
                    out.push(lhs.clone());
                }
            }
            Stmt::If { then, els, .. } => {
                collect_assigned(then, out);
                if let Some(e) = els {
                    collect_assigned(e, out);
                }
            }
        }
    }
}

/// Recognizes `if (!rst) <constant assignments> else ...` and returns the
/// reset name, its deasserted value, the constant assignments and the
/// functional branch.
fn reset_idiom<'s>(
    body: &'s [Stmt],
    is_input: &BTreeSet<String>,
    widths: &BTreeMap<String, u32>,
) -> Option<(String, u64, &'s [Stmt], &'s [Stmt])> {
    let [Stmt::If {
        cond,
        then,
        els: Some(els),
    }] = body
    else {
        return None;
    };
    let (name, deasserted) = match cond {
        ExprAst::Unary {
            op: UnaryOp::LogNot | UnaryOp::Not,
            arg,
        } => match &**arg {
            ExprAst::Ident(n) => (n.clone(), 1),
            _ => return None,
        },
        ExprAst::Ident(n) => (n.clone(), 0),
        _ => return None,
    };
    if !is_input.contains(&name) || widths.get(&name) != Some(&1) {
        return None;
    }
    let all_const = then
        .iter()
        .all(|s| matches!(s, Stmt::NonBlocking { rhs: ExprAst::Number(_), .. }));
    if !all_const || then.is_empty() {
        return None;
    }
    Some((name, deasserted, then, els))
}

fn exec(
    scope: &mut Builder<'_>,
    stmts: &[Stmt],
    env: &mut BTreeMap<String, Expr>,
) -> EResult<()> {
    for s in stmts {
        match s {
            Stmt::NonBlocking { lhs, rhs } => {
                let w = scope.width_of(lhs)?;
                let e = elab_assign(scope, rhs, w)?;
                env.insert(lhs.clone(), e);
            }
            Stmt::If { cond, then, els } => {
                let c = elab_bool(scope, cond)?;
                let mut then_env = env.clone();
                exec(scope, then, &mut then_env)?;
                let mut else_env = env.clone();
                if let Some(els) = els {
                    exec(scope, els, &mut else_env)?;
                }
                for (name, t) in then_env {
                    let e = else_env.remove(&name).expect("same key set");
                    env.insert(name, Expr::ite(c.clone(), t, e));
                }
            }
        }
    }
    Ok(())
}

/// Elaborates a module plus extra assertions into a transition system.
pub fn elaborate(ast: &ModuleAst, extra_assertions: &[AssertionAst]) -> Result<TransitionSystem, ElabError> {
    let mut b = Builder {
        ast,
        widths: BTreeMap::new(),
        decl_init: HashMap::new(),
        is_input: BTreeSet::new(),
        drivers: HashMap::new(),
        clock: None,
        resets: BTreeMap::new(),
        vars: Vec::new(),
        ids: HashMap::new(),
        wire_cache: HashMap::new(),
        visiting: Vec::new(),
    };
    for p in &ast.ports {
        b.declare(&p.name, p.width)?;
        if p.dir == PortDir::Input {
            b.is_input.insert(p.name.clone());
        }
    }
    for d in &ast.decls {
        b.declare(&d.name, d.width)?;
        if let Some(init) = d.init {
            b.decl_init.insert(d.name.clone(), init.value & super::mask(d.width));
        }
    }

    // one clock
    for blk in &ast.seq_blocks {
        match &b.clock {
            None => {
                if !b.is_input.contains(&blk.clock) || b.widths[&blk.clock] != 1 {
                    return Err(if b.widths.contains_key(&blk.clock) {
                        ElabError::BadClock(blk.clock.clone())
                    } else {
                        ElabError::Undeclared(blk.clock.clone())
                    });
                }
                b.clock = Some(blk.clock.clone());
            }
            Some(c) if *c != blk.clock => {
                return Err(ElabError::MultipleClocks(c.clone(), blk.clock.clone()))
            }
            Some(_) => {}
        }
    }

    // drivers
    let set_driver = |b: &mut Builder, name: &str, d: Driver| -> EResult<()> {
        if !b.widths.contains_key(name) {
            return Err(ElabError::Undeclared(name.to_string()));
        }
        if b.is_input.contains(name) {
            return Err(ElabError::AssignToInput(name.to_string()));
        }
        match b.drivers.insert(name.to_string(), d) {
            Some(prev) if prev != d => Err(ElabError::MultiplyDriven(name.to_string())),
            _ => Ok(()),
        }
    };
    for (i, a) in ast.assigns.iter().enumerate() {
        set_driver(&mut b, &a.lhs, Driver::Assign(i))?;
    }
    let mut block_regs = Vec::new();
    for (i, blk) in ast.seq_blocks.iter().enumerate() {
        let mut regs = Vec::new();
        collect_assigned(&blk.body, &mut regs);
        for r in &regs {
            set_driver(&mut b, r, Driver::Seq(i))?;
        }
        block_regs.push(regs);
    }

    // reset idioms: fold into init values, remove the reset input
    let mut reset_inits: HashMap<String, &ExprAst> = HashMap::new();
    let mut functional: Vec<&[Stmt]> = Vec::new();
    for blk in &ast.seq_blocks {
        match reset_idiom(&blk.body, &b.is_input, &b.widths) {
            Some((name, deasserted, consts, rest)) => {
                b.resets.insert(name, deasserted);
                for s in consts {
                    if let Stmt::NonBlocking { lhs, rhs } = s {
                        reset_inits.insert(lhs.clone(), rhs);
                    }
                }
                functional.push(rest);
            }
            None => functional.push(&blk.body),
        }
    }

    // variables: inputs in port order, then registers in declaration order
    let input_names: Vec<String> = ast
        .ports
        .iter()
        .filter(|p| p.dir == PortDir::Input)
        .map(|p| p.name.clone())
        .filter(|n| Some(n) != b.clock.as_ref() && !b.resets.contains_key(n))
        .collect();
    let inputs: Vec<VarId> = input_names.iter().map(|n| b.add_var(n, VarKind::Input)).collect();
    let declared: Vec<String> = ast
        .ports
        .iter()
        .map(|p| p.name.clone())
        .chain(ast.decls.iter().map(|d| d.name.clone()))
        .collect();
    let mut regs = Vec::new();
    for name in &declared {
        if matches!(b.drivers.get(name), Some(Driver::Seq(_))) {
            regs.push(b.add_var(name, VarKind::State));
        }
    }

    // next-state functions
    let mut next_of: BTreeMap<String, Expr> = BTreeMap::new();
    for (i, body) in functional.iter().enumerate() {
        let mut env: BTreeMap<String, Expr> = BTreeMap::new();
        for r in &block_regs[i] {
            let e = b.resolve(r)?;
            env.insert(r.clone(), e);
        }
        exec(&mut b, body, &mut env)?;
        next_of.extend(env);
    }

    let mut states = Vec::new();
    for &id in &regs {
        let name = b.vars[id.index()].name.clone();
        let width = b.vars[id.index()].width;
        let init = match reset_inits.get(&name) {
            Some(k) => {
                let e = elab_assign(&mut b, k, width)?;
                Init::Const(e.as_const().expect("reset value is a literal"))
            }
            None => match b.decl_init.get(&name) {
                Some(&v) => Init::Const(v),
                None => Init::Nondet,
            },
        };
        states.push(StateVar {
            id,
            init,
            next: next_of.remove(&name).expect("every register has a next function"),
        });
    }

    // wires that are never read still have to be acyclic
    for a in &ast.assigns {
        b.resolve(&a.lhs)?;
    }

    // assertions; this may still allocate undriven nets
    let mut assumptions = Vec::new();
    let mut properties = Vec::new();
    let mut names = BTreeSet::new();
    for a in ast.assertions.iter().chain(extra_assertions) {
        if let (Some(design), Some(found)) = (&b.clock, &a.clock) {
            if design != found {
                return Err(ElabError::ClockMismatch {
                    name: a.name.clone(),
                    expected: design.clone(),
                    found: found.clone(),
                });
            }
        }
        let e = elab_bool(&mut b, &a.body)?;
        if !names.insert(a.name.clone()) {
            return Err(ElabError::DuplicateProperty(a.name.clone()));
        }
        let prop = Property::new(a.name.clone(), e);
        match a.kind {
            AssertKind::Assume => assumptions.push(prop),
            AssertKind::Assert => properties.push(prop),
        }
    }

    // undriven nets referenced anywhere hold an arbitrary constant value
    for (idx, v) in b.vars.iter().enumerate() {
        let id = VarId(idx as u32);
        if v.kind == VarKind::State && !regs.contains(&id) {
            let init = b.decl_init.get(&v.name).map_or(Init::Nondet, |&k| Init::Const(k));
            states.push(StateVar {
                id,
                init,
                next: Expr::var(id, v.width),
            });
        }
    }

    if states.is_empty() {
        return Err(ElabError::NoState);
    }

    let mut defs: BTreeMap<String, Expr> = b.wire_cache.into_iter().collect();
    for (name, v) in &b.resets {
        defs.insert(name.clone(), Expr::constant(*v, 1));
    }
    Ok(TransitionSystem {
        name: ast.name.clone(),
        vars: b.vars,
        inputs,
        states,
        assumptions,
        properties,
        defs,
        clock: b.clock,
    })
}

impl TransitionSystem {
    /// Elaborates an assertion body against this system's names.
    pub fn elaborate_assertion(&self, a: &AssertionAst) -> Result<Expr, ElabError> {
        if let (Some(design), Some(found)) = (&self.clock, &a.clock) {
            if design != found {
                return Err(ElabError::ClockMismatch {
                    name: a.name.clone(),
                    expected: design.clone(),
                    found: found.clone(),
                });
            }
        }
        elab_bool(&mut SystemScope { ts: self }, &a.body)
    }

    /// Adds assertions after elaboration: `assume` ones join the assumptions
    /// and `assert` ones the properties.
    pub fn add_assertions(&mut self, assertions: &[AssertionAst]) -> Result<(), ElabError> {
        for a in assertions {
            let e = self.elaborate_assertion(a)?;
            let clash = self
                .properties
                .iter()
                .chain(&self.assumptions)
                .any(|p| p.name == a.name);
            if clash {
                return Err(ElabError::DuplicateProperty(a.name.clone()));
            }
            let prop = Property::new(a.name.clone(), e);
            match a.kind {
                AssertKind::Assume => self.assumptions.push(prop),
                AssertKind::Assert => self.properties.push(prop),
            }
        }
        Ok(())
    }
}
