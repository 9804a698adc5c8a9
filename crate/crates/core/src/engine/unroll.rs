use crate::cex::{extract_trace, Trace, TraceKind};
use crate::ir::{Expr, Init, TransitionSystem};
use crate::sat::{Assignment, BlastContext, Lit, SolveError, SolveResult, Solver};

/// Incremental time-frame expansion of a transition system into one solver.
///
/// Frame 0 is optionally tied to the initial states. Every frame carries the
/// `constraints` (source assumptions and admitted lemmas).
pub(crate) struct Unroller<'a> {
    ts: &'a TransitionSystem,
    ctx: BlastContext,
    solver: Solver,
    frames: u32,
    with_init: bool,
    simple_path: bool,
    constraints: Vec<Expr>,
}

impl<'a> Unroller<'a> {
    pub fn new(
        ts: &'a TransitionSystem,
        with_init: bool,
        simple_path: bool,
        constraints: Vec<Expr>,
        conflict_budget: Option<u64>,
    ) -> Self {
        let mut solver = Solver::new();
        solver.conflict_budget = conflict_budget;
        Unroller {
            ts,
            ctx: BlastContext::new(),
            solver,
            frames: 0,
            with_init,
            simple_path,
            constraints,
        }
    }

    /// Makes frames `0..=t` exist.
    pub fn extend_to(&mut self, t: u32) {
        while self.frames <= t {
            self.add_frame();
        }
    }

    fn add_frame(&mut self) {
        let t = self.frames;
        let ts = self.ts;
        for id in ts.inputs.iter().copied().chain(ts.state_ids()) {
            self.ctx.var_bits(&mut self.solver, id, ts.width_of(id), t);
        }
        if t == 0 && self.with_init {
            for s in &ts.states {
                if let Init::Const(k) = s.init {
                    for b in 0..ts.width_of(s.id) {
                        let l = self.ctx.var_bit(&mut self.solver, s.id, 0, b);
                        self.solver.add_clause(&[if k >> b & 1 == 1 { l } else { !l }]);
                    }
                }
            }
        }
        if t > 0 {
            for s in &ts.states {
                let next = self.ctx.blast(&s.next, t - 1, &mut self.solver);
                for (b, n) in next.into_iter().enumerate() {
                    let cur = self.ctx.var_bit(&mut self.solver, s.id, t, b as u32);
                    self.solver.add_clause(&[!cur, n]);
                    self.solver.add_clause(&[cur, !n]);
                }
            }
        }
        for c in self.constraints.clone() {
            let l = self.lit(&c, t);
            self.solver.add_clause(&[l]);
        }
        if self.simple_path {
            for earlier in 0..t {
                self.add_distinct(earlier, t);
            }
        }
        self.frames += 1;
    }

    /// States at frames `a` and `b` differ in at least one bit.
    fn add_distinct(&mut self, a: u32, b: u32) {
        let ts = self.ts;
        let mut diff = Vec::new();
        for id in ts.state_ids() {
            for bit in 0..ts.width_of(id) {
                let x = self.ctx.var_bit(&mut self.solver, id, a, bit);
                let y = self.ctx.var_bit(&mut self.solver, id, b, bit);
                let d = self.solver_new_var();
                // d -> x != y
                self.solver.add_clause(&[!d, x, y]);
                self.solver.add_clause(&[!d, !x, !y]);
                diff.push(d);
            }
        }
        self.solver.add_clause(&diff);
    }

    fn solver_new_var(&mut self) -> Lit {
        crate::sat::ClauseSink::new_var(&mut self.solver)
    }

    /// Literal for a width-1 expression at frame `t`.
    pub fn lit(&mut self, e: &Expr, t: u32) -> Lit {
        debug_assert_eq!(e.width(), 1);
        self.ctx.blast(e, t, &mut self.solver)[0]
    }

    pub fn assert_at(&mut self, e: &Expr, t: u32) {
        let l = self.lit(e, t);
        self.solver.add_clause(&[l]);
    }

    pub fn add_clause(&mut self, clause: &[Lit]) {
        self.solver.add_clause(clause);
    }

    pub fn check(&mut self, assumptions: &[Lit]) -> Result<Option<Assignment>, SolveError> {
        match self.solver.solve(assumptions)? {
            SolveResult::Sat(m) => Ok(Some(m)),
            SolveResult::Unsat => Ok(None),
        }
    }

    pub fn trace(&self, model: &Assignment, frames: usize, kind: TraceKind, property: &str) -> Trace {
        extract_trace(&self.ctx, model, self.ts, frames, kind, property)
    }
}
