//! Tseitin bit-blasting of word-level expressions.

use std::collections::HashMap;

use super::cnf::{Assignment, ClauseSink, Lit};
use crate::ir::{BinOp, Expr, UnOp, VarId};

/// Maps timed variable bits to CNF literals.
///
/// Literals are allocated on first use, so identical call sequences allocate
/// identical literals.
#[derive(Debug, Clone, Default)]
pub struct BlastContext {
    map: HashMap<(VarId, u32, u32), Lit>,
    true_lit: Option<Lit>,
}

impl BlastContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// A literal forced true by a unit clause.
    pub fn true_lit(&mut self, out: &mut impl ClauseSink) -> Lit {
        if let Some(t) = self.true_lit {
            return t;
        }
        let t = out.new_var();
        out.add_clause(&[t]);
        self.true_lit = Some(t);
        t
    }

    pub fn var_bit(&mut self, out: &mut impl ClauseSink, id: VarId, time: u32, bit: u32) -> Lit {
        *self.map.entry((id, time, bit)).or_insert_with(|| out.new_var())
    }

    /// Literals of every bit of `id` at `time`, LSB first.
    pub fn var_bits(&mut self, out: &mut impl ClauseSink, id: VarId, width: u32, time: u32) -> Vec<Lit> {
        (0..width).map(|b| self.var_bit(out, id, time, b)).collect()
    }

    /// Literal of an already allocated bit.
    pub fn lookup(&self, id: VarId, time: u32, bit: u32) -> Option<Lit> {
        self.map.get(&(id, time, bit)).copied()
    }

    /// Reads the value of `id` at `time` from a model. Returns the value and a
    /// mask of bits the model leaves unconstrained (read as 0).
    pub fn decode_var(&self, model: &Assignment, id: VarId, width: u32, time: u32) -> (u64, u64) {
        let mut value = 0;
        let mut dont_care = 0;
        for b in 0..width {
            match self.lookup(id, time, b).and_then(|l| model.lit_value(l)) {
                Some(true) => value |= 1 << b,
                Some(false) => {}
                None => dont_care |= 1 << b,
            }
        }
        (value, dont_care)
    }

    /// Tseitin-encodes `expr` with its variables read at `time`. Returns one
    /// literal per bit, LSB first.
    pub fn blast(&mut self, expr: &Expr, time: u32, out: &mut impl ClauseSink) -> Vec<Lit> {
        let t = self.true_lit(out);
        let mut g = Gates { out, t };
        self.blast_rec(expr, time, &mut g)
    }

    fn blast_rec<S: ClauseSink>(&mut self, expr: &Expr, time: u32, g: &mut Gates<'_, S>) -> Vec<Lit> {
        match expr {
            Expr::Const { value, width } => (0..*width).map(|b| g.constant(value >> b & 1 == 1)).collect(),
            Expr::Var { id, width } => self.var_bits(g.out, *id, *width, time),
            Expr::Slice { expr, hi, lo } => {
                let bits = self.blast_rec(expr, time, g);
                bits[*lo as usize..=*hi as usize].to_vec()
            }
            Expr::Concat(parts) => {
                let mut bits = Vec::new();
                for p in parts.iter().rev() {
                    bits.extend(self.blast_rec(p, time, g));
                }
                bits
            }
            Expr::Unop { op, expr } => {
                let a = self.blast_rec(expr, time, g);
                match op {
                    UnOp::Not => a.iter().map(|&l| !l).collect(),
                    UnOp::Neg => {
                        let inv: Vec<Lit> = a.iter().map(|&l| !l).collect();
                        let zero = vec![g.constant(false); a.len()];
                        let one = g.constant(true);
                        g.adder(&inv, &zero, one)
                    }
                    UnOp::RedAnd => vec![a.iter().fold(g.constant(true), |acc, &l| g.and(acc, l))],
                    UnOp::RedOr => vec![a.iter().fold(g.constant(false), |acc, &l| g.or(acc, l))],
                    UnOp::RedXor => vec![a.iter().fold(g.constant(false), |acc, &l| g.xor(acc, l))],
                }
            }
            Expr::Binop { op, lhs, rhs } => {
                let a = self.blast_rec(lhs, time, g);
                let b = self.blast_rec(rhs, time, g);
                match op {
                    BinOp::Add => {
                        let c = g.constant(false);
                        g.adder(&a, &b, c)
                    }
                    BinOp::Sub => {
                        let nb: Vec<Lit> = b.iter().map(|&l| !l).collect();
                        let c = g.constant(true);
                        g.adder(&a, &nb, c)
                    }
                    BinOp::And => a.iter().zip(&b).map(|(&x, &y)| g.and(x, y)).collect(),
                    BinOp::Or => a.iter().zip(&b).map(|(&x, &y)| g.or(x, y)).collect(),
                    BinOp::Xor => a.iter().zip(&b).map(|(&x, &y)| g.xor(x, y)).collect(),
                    BinOp::Eq => vec![g.equal(&a, &b)],
                    BinOp::Ne => vec![!g.equal(&a, &b)],
                    BinOp::Ult => vec![g.less(&a, &b)],
                    BinOp::Ugt => vec![g.less(&b, &a)],
                    BinOp::Ule => vec![!g.less(&b, &a)],
                    BinOp::Uge => vec![!g.less(&a, &b)],
                }
            }
            Expr::Ite { cond, then, els } => {
                let c = self.blast_rec(cond, time, g)[0];
                let a = self.blast_rec(then, time, g);
                let b = self.blast_rec(els, time, g);
                a.iter().zip(&b).map(|(&x, &y)| g.mux(c, x, y)).collect()
            }
        }
    }
}

/// Gate constructors with constant folding against the TRUE literal.
struct Gates<'a, S: ClauseSink> {
    out: &'a mut S,
    t: Lit,
}

impl<S: ClauseSink> Gates<'_, S> {
    fn constant(&self, b: bool) -> Lit {
        if b {
            self.t
        } else {
            !self.t
        }
    }

    fn const_value(&self, l: Lit) -> Option<bool> {
        if l == self.t {
            Some(true)
        } else if l == !self.t {
            Some(false)
        } else {
            None
        }
    }

    fn and(&mut self, a: Lit, b: Lit) -> Lit {
        match (self.const_value(a), self.const_value(b)) {
            (Some(false), _) | (_, Some(false)) => return self.constant(false),
            (Some(true), _) => return b,
            (_, Some(true)) => return a,
            _ => {}
        }
        if a == b {
            return a;
        }
        if a == !b {
            return self.constant(false);
        }
        let o = self.out.new_var();
        self.out.add_clause(&[!o, a]);
        self.out.add_clause(&[!o, b]);
        self.out.add_clause(&[o, !a, !b]);
        o
    }

    fn or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and(!a, !b)
    }

    fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        match (self.const_value(a), self.const_value(b)) {
            (Some(x), Some(y)) => return self.constant(x != y),
            (Some(false), _) => return b,
            (Some(true), _) => return !b,
            (_, Some(false)) => return a,
            (_, Some(true)) => return !a,
            _ => {}
        }
        if a == b {
            return self.constant(false);
        }
        if a == !b {
            return self.constant(true);
        }
        let o = self.out.new_var();
        self.out.add_clause(&[!o, a, b]);
        self.out.add_clause(&[!o, !a, !b]);
        self.out.add_clause(&[o, !a, b]);
        self.out.add_clause(&[o, a, !b]);
        o
    }

    /// `c ? a : b`
    fn mux(&mut self, c: Lit, a: Lit, b: Lit) -> Lit {
        match self.const_value(c) {
            Some(true) => return a,
            Some(false) => return b,
            None => {}
        }
        if a == b {
            return a;
        }
        match (self.const_value(a), self.const_value(b)) {
            (Some(true), _) => return self.or(c, b),
            (Some(false), _) => return self.and(!c, b),
            (_, Some(true)) => return self.or(!c, a),
            (_, Some(false)) => return self.and(c, a),
            _ => {}
        }
        let o = self.out.new_var();
        self.out.add_clause(&[!c, !a, o]);
        self.out.add_clause(&[!c, a, !o]);
        self.out.add_clause(&[c, !b, o]);
        self.out.add_clause(&[c, b, !o]);
        o
    }

    /// Ripple-carry sum of `a + b + carry`, truncated to the operand width.
    fn adder(&mut self, a: &[Lit], b: &[Lit], mut carry: Lit) -> Vec<Lit> {
        let mut sum = Vec::with_capacity(a.len());
        for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
            let p = self.xor(x, y);
            sum.push(self.xor(p, carry));
            if i + 1 < a.len() {
                let g1 = self.and(x, y);
                let g2 = self.and(p, carry);
                carry = self.or(g1, g2);
            }
        }
        sum
    }

    fn equal(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let mut acc = self.constant(true);
        for (&x, &y) in a.iter().zip(b) {
            let d = self.xor(x, y);
            acc = self.and(acc, !d);
        }
        acc
    }

    /// Unsigned `a < b`, scanning from the LSB: the highest differing bit decides.
    fn less(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let mut lt = self.constant(false);
        for (&x, &y) in a.iter().zip(b) {
            let d = self.xor(x, y);
            lt = self.mux(d, y, lt);
        }
        lt
    }
}
