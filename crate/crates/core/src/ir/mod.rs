//! Word-level transition systems: elaboration from the AST, a reference
//! interpreter, and printers.

mod display;
mod elaborate;
mod eval;
mod expr;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::frontend::SymbolTable;

pub use display::{sexpr, ExprPrinter};
pub use elaborate::{elaborate, ElabError};
pub use eval::{eval, eval_with, step};
pub use expr::{mask, BinOp, Expr, UnOp, VarId, MAX_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Input,
    State,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    pub width: u32,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Const(u64),
    Nondet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVar {
    pub id: VarId,
    pub init: Init,
    pub next: Expr,
}

/// A named width-1 expression: a property or an assumption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Property {
    pub name: String,
    pub expr: Expr,
}

impl Property {
    pub fn new(name: impl Into<String>, expr: Expr) -> Self {
        assert_eq!(expr.width(), 1, "properties are width-1");
        Property {
            name: name.into(),
            expr,
        }
    }
}

/// Synchronous design with one implicit clock.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    pub name: String,
    pub vars: Vec<VarInfo>,
    pub inputs: Vec<VarId>,
    pub states: Vec<StateVar>,
    /// Constraints that hold at every cycle.
    pub assumptions: Vec<Property>,
    pub properties: Vec<Property>,
    /// Names that are not variables but stand for expressions: inlined
    /// `assign` wires and the deasserted value of a folded reset input.
    pub defs: BTreeMap<String, Expr>,
    /// Clock input removed by elaboration, if the design had one.
    pub clock: Option<String>,
}

impl TransitionSystem {
    pub fn var(&self, id: VarId) -> &VarInfo {
        &self.vars[id.index()]
    }

    pub fn name_of(&self, id: VarId) -> &str {
        &self.vars[id.index()].name
    }

    pub fn width_of(&self, id: VarId) -> u32 {
        self.vars[id.index()].width
    }

    pub fn var_expr(&self, id: VarId) -> Expr {
        Expr::var(id, self.width_of(id))
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .map(|i| VarId(i as u32))
    }

    /// Expression a name stands for: a variable or an inlined definition.
    pub fn resolve(&self, name: &str) -> Option<Expr> {
        self.lookup(name)
            .map(|id| self.var_expr(id))
            .or_else(|| self.defs.get(name).cloned())
    }

    /// Every name an assertion over this system may reference.
    pub fn symbols(&self) -> SymbolTable {
        let mut table: SymbolTable = self.vars.iter().map(|v| (v.name.clone(), v.width)).collect();
        for (name, e) in &self.defs {
            table.insert(name.clone(), e.width());
        }
        table
    }

    pub fn state(&self, id: VarId) -> Option<&StateVar> {
        self.states.iter().find(|s| s.id == id)
    }

    pub fn state_ids(&self) -> impl Iterator<Item = VarId> + '_ {
        self.states.iter().map(|s| s.id)
    }

    pub fn state_bits(&self) -> u32 {
        self.states.iter().map(|s| self.width_of(s.id)).sum()
    }

    pub fn input_bits(&self) -> u32 {
        self.inputs.iter().map(|&i| self.width_of(i)).sum()
    }

    pub fn property(&self, name: &str) -> Option<&Property> {
        self.properties.iter().find(|p| p.name == name)
    }

    /// Renders an expression in SVA-lite syntax using this system's names.
    pub fn show(&self, expr: &Expr) -> String {
        ExprPrinter::new(self).print(expr)
    }

    /// Stable debug dump: one line per input, state, assumption and property.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for &i in &self.inputs {
            let v = self.var(i);
            out += &format!("input {}[{}]\n", v.name, v.width);
        }
        for s in &self.states {
            let v = self.var(s.id);
            let init = match s.init {
                Init::Const(k) => k.to_string(),
                Init::Nondet => "nondet".to_string(),
            };
            out += &format!(
                "state {}[{}] init={} next={}\n",
                v.name,
                v.width,
                init,
                sexpr(self, &s.next)
            );
        }
        for a in &self.assumptions {
            out += &format!("assume {} {}\n", a.name, sexpr(self, &a.expr));
        }
        for p in &self.properties {
            out += &format!("property {} {}\n", p.name, sexpr(self, &p.expr));
        }
        out
    }
}

/// Values of variables at one time step.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Frame(BTreeMap<VarId, u64>);

impl Frame {
    pub fn get(&self, id: VarId) -> Option<u64> {
        self.0.get(&id).copied()
    }

    pub fn set(&mut self, id: VarId, value: u64) {
        self.0.insert(id, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, u64)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Values of the state variables only.
    pub fn state_part(&self, ts: &TransitionSystem) -> Frame {
        let mut f = Frame::default();
        for id in ts.state_ids() {
            if let Some(v) = self.get(id) {
                f.set(id, v);
            }
        }
        f
    }
}

impl FromIterator<(VarId, u64)> for Frame {
    fn from_iter<T: IntoIterator<Item = (VarId, u64)>>(iter: T) -> Self {
        Frame(iter.into_iter().collect())
    }
}
