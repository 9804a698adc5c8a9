#![allow(dead_code)]

use std::path::PathBuf;

use lemmaforge::cex::Trace;
use lemmaforge::engine::{Lemma, LemmaOrigin, LemmaStatus};
use lemmaforge::frontend::{parse_assertion, parse_assertion_file, parse_module_source};
use lemmaforge::ir::{
    elaborate, eval, mask, step, BinOp, Expr, Frame, Init, Property, StateVar, TransitionSystem, UnOp, VarId, VarInfo,
    VarKind,
};
use lemmaforge::suggest::{gen_template_candidates, simulate_filter, CandidateInvariant, CandidateOrigin};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

/// Elaborates a fixture design plus assertion files.
pub fn load(design: &str, assertion_files: &[&str]) -> TransitionSystem {
    let ast = parse_module_source(&read_fixture(design)).unwrap();
    let mut ts = elaborate(&ast, &[]).unwrap();
    for f in assertion_files {
        let asserts = parse_assertion_file(&read_fixture(f), &ts.symbols()).unwrap();
        ts.add_assertions(&asserts).unwrap();
    }
    ts
}

/// A property from assertion source text.
pub fn prop(ts: &TransitionSystem, src: &str) -> Property {
    let a = parse_assertion(src, &ts.symbols()).unwrap();
    Property::new(a.name.clone(), ts.elaborate_assertion(&a).unwrap())
}

pub fn proven_lemma(ts: &TransitionSystem, name: &str, src: &str, k: u32) -> Lemma {
    let mut l = Lemma::candidate(name, prop(ts, src).expr, LemmaOrigin::User);
    l.status = LemmaStatus::Proven { k };
    l
}

/// Frame i stepped with its own inputs equals frame i+1 on the states, and
/// the property fails only at the last frame.
pub fn replays(ts: &TransitionSystem, trace: &Trace, prop: &Property) -> bool {
    let n = trace.frames.len();
    for i in 0..n - 1 {
        let next = step(ts, &trace.frames[i]);
        if next != trace.frames[i + 1].state_part(ts) {
            return false;
        }
    }
    (0..n).all(|i| (eval(&prop.expr, &trace.frames[i]) == 1) == (i + 1 < n))
}

/// A trace from init also starts in an initial state.
pub fn starts_in_init(ts: &TransitionSystem, trace: &Trace) -> bool {
    ts.states.iter().all(|s| match s.init {
        Init::Const(k) => trace.frames[0].get(s.id) == Some(k),
        Init::Nondet => true,
    })
}

pub struct Gen<'a, R: Rng> {
    pub rng: &'a mut R,
    pub vars: Vec<(VarId, u32)>,
}

impl<R: Rng> Gen<'_, R> {
    fn leaf(&mut self, width: u32) -> Expr {
        if self.vars.is_empty() || self.rng.random_bool(0.25) {
            return Expr::constant(self.rng.random::<u64>() & mask(width), width);
        }
        let (id, w) = self.vars[self.rng.random_range(0..self.vars.len())];
        let v = Expr::var(id, w);
        if w == width {
            v
        } else if w > width {
            let lo = self.rng.random_range(0..=w - width);
            v.slice(lo + width - 1, lo)
        } else {
            v.zext(width)
        }
    }

    /// A random well-formed expression of `width` bits.
    pub fn expr(&mut self, width: u32, depth: u32) -> Expr {
        if depth == 0 {
            return self.leaf(width);
        }
        let d = depth - 1;
        match self.rng.random_range(0..8) {
            0 => self.leaf(width),
            1 => {
                let op = [UnOp::Not, UnOp::Neg][self.rng.random_range(0..2)];
                Expr::unop(op, self.expr(width, d))
            }
            2 | 3 => {
                let op = [BinOp::Add, BinOp::Sub, BinOp::And, BinOp::Or, BinOp::Xor][self.rng.random_range(0..5)];
                Expr::binop(op, self.expr(width, d), self.expr(width, d))
            }
            4 => Expr::ite(self.expr(1, d), self.expr(width, d), self.expr(width, d)),
            5 if width == 1 => {
                let w = self.rng.random_range(1..=8);
                let op = [BinOp::Eq, BinOp::Ne, BinOp::Ult, BinOp::Ule, BinOp::Ugt, BinOp::Uge][self.rng.random_range(0..6)];
                Expr::binop(op, self.expr(w, d), self.expr(w, d))
            }
            6 if width == 1 => {
                let w = self.rng.random_range(1..=8);
                let op = [UnOp::RedAnd, UnOp::RedOr, UnOp::RedXor][self.rng.random_range(0..3)];
                Expr::unop(op, self.expr(w, d))
            }
            7 if width > 1 => {
                let split = self.rng.random_range(1..width);
                Expr::concat(vec![self.expr(width - split, d), self.expr(split, d)])
            }
            _ => {
                let extra = self.rng.random_range(0..=3);
                let inner = self.expr(width + extra, d);
                let lo = self.rng.random_range(0..=extra);
                inner.slice(lo + width - 1, lo)
            }
        }
    }
}

/// Random system with at most `max_state_bits` state bits and
/// `max_input_bits` input bits, with one property and sometimes an
/// assumption.
pub fn random_system(rng: &mut impl Rng, max_state_bits: u32, max_input_bits: u32) -> TransitionSystem {
    let mut vars = Vec::new();
    let mut inputs = Vec::new();
    let mut input_bits = 0;
    while input_bits < max_input_bits && rng.random_bool(0.6) {
        let w = rng.random_range(1..=max_input_bits - input_bits);
        inputs.push(VarId(vars.len() as u32));
        vars.push(VarInfo {
            name: format!("in{}", inputs.len() - 1),
            width: w,
            kind: VarKind::Input,
        });
        input_bits += w;
    }
    let mut state_ids = Vec::new();
    let mut state_bits = 0;
    loop {
        let room = max_state_bits - state_bits;
        if room == 0 {
            break;
        }
        let w = rng.random_range(1..=room.min(6));
        state_ids.push(VarId(vars.len() as u32));
        vars.push(VarInfo {
            name: format!("s{}", state_ids.len() - 1),
            width: w,
            kind: VarKind::State,
        });
        state_bits += w;
        if rng.random_bool(0.4) {
            break;
        }
    }
    let all: Vec<(VarId, u32)> = vars.iter().enumerate().map(|(i, v)| (VarId(i as u32), v.width)).collect();
    let mut g = Gen { rng, vars: all };
    let mut states = Vec::new();
    for &id in &state_ids {
        let w = vars[id.index()].width;
        let init = if g.rng.random_bool(0.8) {
            Init::Const(g.rng.random::<u64>() & mask(w))
        } else {
            Init::Nondet
        };
        let next = g.expr(w, 3);
        states.push(StateVar { id, init, next });
    }
    let mut properties = vec![Property::new("p", g.expr(1, 3))];
    if g.rng.random_bool(0.5) {
        // an invariant-shaped property: a state variable below a bound
        let &id = &state_ids[0];
        let w = vars[id.index()].width;
        let bound = g.rng.random_range(1..=mask(w));
        properties[0] = Property::new("p", Expr::binop(BinOp::Ult, Expr::var(id, w), Expr::constant(bound, w)));
    }
    let assumptions = if g.rng.random_bool(0.2) {
        vec![Property::new("a", g.expr(1, 2))]
    } else {
        Vec::new()
    };
    TransitionSystem {
        name: "random".into(),
        vars,
        inputs,
        states,
        assumptions,
        properties,
        defs: Default::default(),
        clock: None,
    }
}

/// Exhaustive state space for systems whose candidates read state only.
pub struct Space {
    /// Bitmask of candidates true in each state.
    pub truth: Vec<u32>,
    /// Candidate masks of every successor of each state.
    pub succ: Vec<Vec<u32>>,
    pub init: Vec<usize>,
}

pub fn explore(ts: &TransitionSystem, cands: &[CandidateInvariant]) -> Space {
    let layout: Vec<(VarId, u32)> = ts.states.iter().map(|s| (s.id, ts.width_of(s.id))).collect();
    let bits: u32 = layout.iter().map(|l| l.1).sum();
    let in_bits: u32 = ts.inputs.iter().map(|&i| ts.width_of(i)).sum();
    let decode = |code: u64, vars: &[(VarId, u32)], f: &mut Frame| {
        let mut shift = 0;
        for &(id, w) in vars {
            f.set(id, (code >> shift) & mask(w));
            shift += w;
        }
    };
    let inputs: Vec<(VarId, u32)> = ts.inputs.iter().map(|&i| (i, ts.width_of(i))).collect();
    let encode = |f: &Frame| {
        let mut code = 0u64;
        let mut shift = 0;
        for &(id, w) in &layout {
            code |= f.get(id).unwrap() << shift;
            shift += w;
        }
        code as usize
    };
    let truth_of = |f: &Frame| {
        cands
            .iter()
            .enumerate()
            .fold(0u32, |m, (i, c)| m | (u32::from(eval(&c.expr, f) == 1) << i))
    };
    let n = 1usize << bits;
    let mut truth = vec![0; n];
    let mut succ_states: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut init = Vec::new();
    for s in 0..n {
        let mut f = Frame::default();
        decode(s as u64, &layout, &mut f);
        truth[s] = truth_of(&f);
        if ts.states.iter().all(|sv| match sv.init {
            Init::Const(k) => f.get(sv.id) == Some(k),
            Init::Nondet => true,
        }) {
            init.push(s);
        }
        for i in 0..1u64 << in_bits {
            decode(i, &inputs, &mut f);
            let next = step(ts, &f);
            succ_states[s].push(encode(&next));
        }
    }
    let succ = succ_states
        .iter()
        .map(|ts| ts.iter().map(|&t| truth[t]).collect())
        .collect();
    Space { truth, succ, init }
}

/// Largest subset (as a mask) that holds initially and is closed under one
/// step, found by trying every subset.
pub fn brute_force_maximal(space: &Space, n: usize) -> u32 {
    let mut best: Option<u32> = None;
    let mut inductive = Vec::new();
    'subsets: for set in 0u32..1 << n {
        if space.init.iter().any(|&s| space.truth[s] & set != set) {
            continue;
        }
        for (s, &t) in space.truth.iter().enumerate() {
            if t & set == set && space.succ[s].iter().any(|&m| m & set != set) {
                continue 'subsets;
            }
        }
        inductive.push(set);
        if best.is_none_or(|b| set.count_ones() > b.count_ones()) {
            best = Some(set);
        }
    }
    let best = best.unwrap();
    // inductive sets are closed under union, so the largest one is unique
    assert_eq!(inductive.iter().fold(0, |a, b| a | b), best);
    best
}

pub fn state_only_candidates(rng: &mut ChaCha8Rng, ts: &TransitionSystem, n: usize) -> Vec<CandidateInvariant> {
    let vars: Vec<(VarId, u32)> = ts.states.iter().map(|s| (s.id, ts.width_of(s.id))).collect();
    let mut templates = simulate_filter(ts, gen_template_candidates(ts), 2, 20, rng.random());
    let mut out = Vec::new();
    while out.len() < n {
        let expr = if !templates.is_empty() && rng.random_bool(0.5) {
            templates.swap_remove(rng.random_range(0..templates.len())).expr
        } else {
            Gen { rng: &mut *rng, vars: vars.clone() }.expr(1, 2)
        };
        out.push(CandidateInvariant {
            name: format!("c{}", out.len()),
            expr,
            origin: CandidateOrigin::User,
            source_text: None,
        });
    }
    out
}

