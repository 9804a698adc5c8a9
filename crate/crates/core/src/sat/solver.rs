//! CDCL SAT solver.
//!
//! - two watched literals with blocker literals
//! - first-UIP conflict analysis with local clause minimization
//! - VSIDS branching over an indexed binary heap
//! - phase saving
//! - Luby restarts and activity-based learnt clause reduction
//! - MiniSat-style assumptions
//!
//! Fully deterministic: no randomness anywhere. Clauses may be added between
//! `solve` calls.

use super::cnf::{Assignment, ClauseSink, CnfFormula, Lit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LBool {
    True,
    False,
    Undef,
}

#[derive(Debug, Clone)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("conflict budget of {conflicts} exhausted")]
    ResourceLimit { conflicts: u64 },
}

#[derive(Debug, Clone, Default)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    activity: f64,
    deleted: bool,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: usize,
    blocker: Lit,
}

/// Max-heap of variables keyed by activity; ties go to the lower index.
#[derive(Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        if self.pos.len() < n {
            self.pos.resize(n, None);
        }
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize].is_some()
    }

    fn better(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[l]) {
                r
            } else {
                l
            };
            if !Self::better(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i] as usize] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = Some(i);
        self.up(i, act);
    }

    fn increased(&mut self, v: u32, act: &[f64]) {
        if let Some(i) = self.pos[v as usize] {
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let mut size = 1u64;
    let mut seq = 0i32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

pub struct Solver {
    num_vars: u32,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    occurs: Vec<bool>,
    seen: Vec<bool>,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    var_inc: f64,
    cla_inc: f64,
    /// An empty clause was derived at level 0.
    inconsistent: bool,
    num_learnts: usize,
    max_learnts: f64,
    pub conflict_budget: Option<u64>,
    pub stats: SolverStats,
}

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RESTART_UNIT: f64 = 100.0;

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            num_vars: 0,
            clauses: Vec::new(),
            watches: vec![Vec::new(), Vec::new()],
            assigns: vec![LBool::Undef],
            level: vec![0],
            reason: vec![None],
            polarity: vec![false],
            activity: vec![0.0],
            occurs: vec![false],
            seen: vec![false],
            heap: VarHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            var_inc: 1.0,
            cla_inc: 1.0,
            inconsistent: false,
            num_learnts: 0,
            max_learnts: 0.0,
            conflict_budget: None,
            stats: SolverStats::default(),
        }
    }

    pub fn from_cnf(cnf: &CnfFormula) -> Self {
        let mut s = Solver::new();
        s.reserve_vars(cnf.num_vars);
        for c in &cnf.clauses {
            s.add_clause(c);
        }
        s
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Makes variables `1..=n` known to the solver.
    pub fn reserve_vars(&mut self, n: u32) {
        if n <= self.num_vars {
            return;
        }
        let len = n as usize + 1;
        self.assigns.resize(len, LBool::Undef);
        self.level.resize(len, 0);
        self.reason.resize(len, None);
        self.polarity.resize(len, false);
        self.activity.resize(len, 0.0);
        self.occurs.resize(len, false);
        self.seen.resize(len, false);
        self.watches.resize(2 * len, Vec::new());
        self.heap.grow(len);
        self.num_vars = n;
    }

    fn value(&self, l: Lit) -> LBool {
        match self.assigns[l.var() as usize] {
            LBool::Undef => LBool::Undef,
            LBool::True if l.is_positive() => LBool::True,
            LBool::False if !l.is_positive() => LBool::True,
            _ => LBool::False,
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var() as usize;
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = if l.is_positive() { LBool::True } else { LBool::False };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, cref: usize) {
        let lits = &self.clauses[cref].lits;
        let (a, b) = (lits[0], lits[1]);
        self.watches[a.code()].push(Watcher { cref, blocker: b });
        self.watches[b.code()].push(Watcher { cref, blocker: a });
    }

    /// Adds a clause. Must be called at decision level 0 (between solves).
    pub fn add_clause(&mut self, clause: &[Lit]) {
        debug_assert_eq!(self.decision_level(), 0);
        let max_var = clause.iter().map(|l| l.var()).max().unwrap_or(0);
        self.reserve_vars(max_var);
        for l in clause {
            let v = l.var();
            if !self.occurs[v as usize] {
                self.occurs[v as usize] = true;
                if self.assigns[v as usize] == LBool::Undef {
                    self.heap.insert(v, &self.activity);
                }
            }
        }
        if self.inconsistent {
            return;
        }
        let mut lits: Vec<Lit> = clause.to_vec();
        lits.sort();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        if lits.iter().any(|&l| self.value(l) == LBool::True) {
            return;
        }
        lits.retain(|&l| self.value(l) != LBool::False);
        match lits.len() {
            0 => self.inconsistent = true,
            1 => {
                self.enqueue(lits[0], None);
                if self.propagate().is_some() {
                    self.inconsistent = true;
                }
            }
            _ => {
                let cref = self.clauses.len();
                self.clauses.push(Clause {
                    lits,
                    learnt: false,
                    activity: 0.0,
                    deleted: false,
                });
                self.attach(cref);
            }
        }
    }

    /// Unit propagation. Returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == LBool::True {
                    ws[j] = Watcher { cref, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != LBool::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.code()].push(Watcher { cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { cref, blocker: first };
                j += 1;
                if self.value(first) == LBool::False {
                    conflict = Some(cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, Some(cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: u32) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP learning. Returns the learnt clause (asserting literal first)
    /// and the backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit::new(1, true)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level();
        loop {
            self.bump_clause(confl);
            let start = if p.is_some() { 1 } else { 0 };
            let lits = self.clauses[confl].lits.clone();
            for &q in &lits[start..] {
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(q.var());
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            self.seen[lit.var() as usize] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var() as usize].expect("implied literal has a reason");
        }
        learnt[0] = !p.unwrap();

        // local minimization: drop literals implied by the rest of the clause
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                if i == 0 {
                    return true;
                }
                match self.reason[l.var() as usize] {
                    None => true,
                    Some(r) => self.clauses[r].lits[1..].iter().any(|&q| {
                        let v = q.var() as usize;
                        !self.seen[v] && self.level[v] > 0
                    }),
                }
            })
            .collect();
        for l in &learnt {
            self.seen[l.var() as usize] = false;
        }
        let mut learnt: Vec<Lit> = learnt
            .into_iter()
            .zip(keep)
            .filter_map(|(l, k)| k.then_some(l))
            .collect();

        let bt = if learnt.len() == 1 {
            0
        } else {
            let (max_i, _) = learnt
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(i, l)| (self.level[l.var() as usize], std::cmp::Reverse(*i)))
                .unwrap();
            learnt.swap(1, max_i);
            self.level[learnt[1].var() as usize]
        };
        (learnt, bt)
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var() as usize;
            self.polarity[v] = l.is_positive();
            self.assigns[v] = LBool::Undef;
            self.reason[v] = None;
            if self.occurs[v] {
                self.heap.insert(l.var(), &self.activity);
            }
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == LBool::Undef {
                self.stats.decisions += 1;
                return Some(Lit::new(v, self.polarity[v as usize]));
            }
        }
        None
    }

    fn is_locked(&self, cref: usize) -> bool {
        let first = self.clauses[cref].lits[0];
        self.value(first) == LBool::True && self.reason[first.var() as usize] == Some(cref)
    }

    fn reduce_db(&mut self) {
        let mut learnts: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lits.len() > 2 && !self.is_locked(i)
            })
            .collect();
        learnts.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .partial_cmp(&self.clauses[b].activity)
                .unwrap()
                .then(a.cmp(&b))
        });
        let remove = learnts.len() / 2;
        for &i in &learnts[..remove] {
            self.clauses[i].deleted = true;
            self.clauses[i].lits = Vec::new();
            self.num_learnts -= 1;
        }
        for w in self.watches.iter_mut() {
            w.clear();
        }
        for i in 0..self.clauses.len() {
            if !self.clauses[i].deleted {
                self.attach(i);
            }
        }
    }

    fn model(&self) -> Assignment {
        let mut a = Assignment::new(self.num_vars);
        for v in 1..=self.num_vars {
            match self.assigns[v as usize] {
                LBool::True => a.set(v, true),
                LBool::False => a.set(v, false),
                LBool::Undef => {}
            }
        }
        a
    }

    /// Decides the clause set under `assumptions`. Variables that occur in no
    /// clause and are not assumed stay unassigned in the model.
    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SolveResult, SolveError> {
        if self.inconsistent {
            return Ok(SolveResult::Unsat);
        }
        let max_var = assumptions.iter().map(|l| l.var()).max().unwrap_or(0);
        self.reserve_vars(max_var);
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.clauses.len() as f64 / 3.0).max(1000.0);
        }
        let start_conflicts = self.stats.conflicts;
        let mut restart_round = 0u64;
        let result = loop {
            let limit = (luby(2.0, restart_round) * RESTART_UNIT) as u64;
            match self.search(assumptions, limit, start_conflicts)? {
                Some(r) => break r,
                None => {
                    restart_round += 1;
                    self.stats.restarts += 1;
                }
            }
        };
        let out = match result {
            true => SolveResult::Sat(self.model()),
            false => SolveResult::Unsat,
        };
        self.cancel_until(0);
        Ok(out)
    }

    /// One restart interval. `Some(true)` = SAT, `Some(false)` = UNSAT,
    /// `None` = restart.
    fn search(&mut self, assumptions: &[Lit], limit: u64, start: u64) -> Result<Option<bool>, SolveError> {
        let mut conflicts_here = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_here += 1;
                if self.decision_level() == 0 {
                    self.inconsistent = true;
                    return Ok(Some(false));
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let cref = self.clauses.len();
                    let asserting = learnt[0];
                    self.clauses.push(Clause {
                        lits: learnt,
                        learnt: true,
                        activity: 0.0,
                        deleted: false,
                    });
                    self.num_learnts += 1;
                    self.attach(cref);
                    self.bump_clause(cref);
                    self.enqueue(asserting, Some(cref));
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLAUSE_DECAY;
                if let Some(budget) = self.conflict_budget {
                    if self.stats.conflicts - start >= budget {
                        self.cancel_until(0);
                        return Err(SolveError::ResourceLimit { conflicts: budget });
                    }
                }
                continue;
            }
            if conflicts_here >= limit {
                self.cancel_until(0);
                if self.num_learnts as f64 >= self.max_learnts {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                return Ok(None);
            }
            // assumptions occupy the first decision levels
            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match self.value(a) {
                    LBool::True => self.trail_lim.push(self.trail.len()),
                    LBool::False => return Ok(Some(false)),
                    LBool::Undef => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let decision = match next {
                Some(a) => a,
                None => match self.pick_branch() {
                    Some(l) => l,
                    None => return Ok(Some(true)),
                },
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(decision, None);
        }
    }
}

impl ClauseSink for Solver {
    fn new_var(&mut self) -> Lit {
        let v = self.num_vars + 1;
        self.reserve_vars(v);
        Lit::new(v, true)
    }

    fn add_clause(&mut self, clause: &[Lit]) {
        Solver::add_clause(self, clause)
    }
}

/// One-shot solve of `cnf` under `assumptions`.
pub fn solve(cnf: &CnfFormula, assumptions: &[Lit], conflict_budget: Option<u64>) -> Result<SolveResult, SolveError> {
    let mut s = Solver::from_cnf(cnf);
    s.reserve_vars(cnf.num_vars);
    s.conflict_budget = conflict_budget;
    s.solve(assumptions)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(v: &[i64]) -> Vec<Lit> {
        v.iter().map(|&x| Lit::from_dimacs(x)).collect()
    }

    fn cnf(num_vars: u32, clauses: &[&[i64]]) -> CnfFormula {
        CnfFormula {
            num_vars,
            clauses: clauses.iter().map(|c| lits(c)).collect(),
        }
    }

    #[test]
    fn empty_formula_is_sat() {
        let r = solve(&CnfFormula::new(), &[], None).unwrap();
        assert!(r.is_sat());
    }

    #[test]
    fn unit_contradiction() {
        let f = cnf(1, &[&[1], &[-1]]);
        assert!(!solve(&f, &[], None).unwrap().is_sat());
    }

    #[test]
    fn explicit_empty_clause() {
        let f = cnf(1, &[&[1], &[]]);
        assert!(!solve(&f, &[], None).unwrap().is_sat());
    }

    #[test]
    fn assumptions_restrict() {
        let f = cnf(2, &[&[1, 2]]);
        let SolveResult::Sat(m) = solve(&f, &lits(&[-1]), None).unwrap() else { panic!() };
        assert_eq!(m.var_value(2), Some(true));
        assert!(!solve(&f, &lits(&[-1, -2]), None).unwrap().is_sat());
    }

    #[test]
    fn untouched_variables_stay_unassigned() {
        let f = cnf(3, &[&[1]]);
        let SolveResult::Sat(m) = solve(&f, &[], None).unwrap() else { panic!() };
        assert_eq!(m.var_value(1), Some(true));
        assert_eq!(m.var_value(3), None);
    }

    #[test]
    fn incremental_clauses_between_solves() {
        let mut s = Solver::new();
        s.add_clause(&lits(&[1, 2]));
        assert!(s.solve(&[]).unwrap().is_sat());
        s.add_clause(&lits(&[-1]));
        s.add_clause(&lits(&[-2, 3]));
        let SolveResult::Sat(m) = s.solve(&[]).unwrap() else { panic!() };
        assert_eq!(m.var_value(3), Some(true));
        s.add_clause(&lits(&[-3]));
        assert!(!s.solve(&[]).unwrap().is_sat());
    }

    fn pigeonhole(pigeons: u32, holes: u32) -> CnfFormula {
        let var = |p: u32, h: u32| (p * holes + h + 1) as i64;
        let mut f = CnfFormula {
            num_vars: pigeons * holes,
            clauses: Vec::new(),
        };
        for p in 0..pigeons {
            f.clauses.push((0..holes).map(|h| Lit::from_dimacs(var(p, h))).collect());
        }
        for h in 0..holes {
            for p in 0..pigeons {
                for q in p + 1..pigeons {
                    f.clauses.push(lits(&[-var(p, h), -var(q, h)]));
                }
            }
        }
        f
    }

    #[test]
    fn pigeonhole_is_unsat() {
        assert!(!solve(&pigeonhole(4, 3), &[], None).unwrap().is_sat());
        assert!(!solve(&pigeonhole(7, 6), &[], None).unwrap().is_sat());
        let SolveResult::Sat(m) = solve(&pigeonhole(3, 3), &[], None).unwrap() else { panic!() };
        assert!(m.satisfies(&pigeonhole(3, 3)));
    }

    #[test]
    fn conflict_budget_is_enforced() {
        let err = solve(&pigeonhole(8, 7), &[], Some(10)).unwrap_err();
        assert_eq!(err, SolveError::ResourceLimit { conflicts: 10 });
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<f64> = (0..8).map(|i| luby(2.0, i)).collect();
        assert_eq!(seq, vec![1.0, 1.0, 2.0, 1.0, 1.0, 2.0, 4.0, 1.0]);
    }
}
