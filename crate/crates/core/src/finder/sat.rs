//! A small deterministic SAT solver.
//!
//! Two search modes share one propagation engine: conflict-driven clause
//! learning with VSIDS and restarts, and plain chronological backtracking
//! (DPLL) used as the unpruned reference search.

use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(v: Var) -> Lit {
        Lit(v.0 << 1)
    }

    pub fn neg(v: Var) -> Lit {
        Lit((v.0 << 1) | 1)
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// Deadline reached before a verdict.
    Unknown,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    True,
    False,
    Unassigned,
}

const NO_REASON: u32 = u32::MAX;

pub struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<u32>>,
    assign: Vec<Value>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    /// For chronological search: whether the decision at each level was flipped.
    flipped: Vec<bool>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    unsat: bool,
    learning: bool,
    pub stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            clauses: Vec::new(),
            watches: Vec::new(),
            assign: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            flipped: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            heap: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            unsat: false,
            learning: true,
            stats: SolverStats::default(),
        }
    }

    /// Chooses between clause learning (default) and chronological backtracking.
    pub fn set_learning(&mut self, on: bool) {
        self.learning = on;
    }

    pub fn num_vars(&self) -> usize {
        self.assign.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.assign.len() as u32);
        self.assign.push(Value::Unassigned);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.insert(v.0, &self.activity);
        v
    }

    fn lit_value(&self, l: Lit) -> Value {
        value_in(&self.assign, l)
    }

    /// Value of `v` in the last satisfying assignment.
    pub fn value(&self, v: Var) -> bool {
        self.assign[v.0 as usize] == Value::True
    }

    pub fn lit_true(&self, l: Lit) -> bool {
        self.lit_value(l) == Value::True
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause at decision level 0. Returns false once the formula is
    /// known to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if self.unsat {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort();
        c.dedup();
        for w in c.windows(2) {
            if w[0] == !w[1] {
                return true;
            }
        }
        if c.iter().any(|&l| self.lit_value(l) == Value::True) {
            return true;
        }
        c.retain(|&l| self.lit_value(l) != Value::False);
        match c.len() {
            0 => {
                self.unsat = true;
                false
            }
            1 => {
                self.enqueue(c[0], NO_REASON);
                if self.propagate().is_some() {
                    self.unsat = true;
                    return false;
                }
                true
            }
            _ => {
                self.attach(c);
                true
            }
        }
    }

    fn attach(&mut self, c: Vec<Lit>) -> u32 {
        let idx = self.clauses.len() as u32;
        self.watches[(!c[0]).index()].push(idx);
        self.watches[(!c[1]).index()].push(idx);
        self.clauses.push(c);
        idx
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var().0 as usize;
        self.assign[v] = if l.is_neg() { Value::False } else { Value::True };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns the index of a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            // Clauses watching !p (indexed by p, since we store under the negation).
            let mut ws = std::mem::take(&mut self.watches[p.index()]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let false_lit = !p;
                let assign = &self.assign;
                let c = &mut self.clauses[ci as usize];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                if value_in(assign, first) == Value::True {
                    i += 1;
                    continue;
                }
                let mut new_watch = None;
                for k in 2..c.len() {
                    if value_in(assign, c[k]) != Value::False {
                        c.swap(1, k);
                        new_watch = Some(c[1]);
                        break;
                    }
                }
                if let Some(nl) = new_watch {
                    self.watches[(!nl).index()].push(ci);
                    ws.swap_remove(i);
                    continue;
                }
                if value_in(assign, first) == Value::False {
                    conflict = Some(ci);
                    break;
                }
                self.enqueue(first, ci);
                i += 1;
            }
            let rest = std::mem::take(&mut self.watches[p.index()]);
            ws.extend(rest);
            self.watches[p.index()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: Var) {
        let i = v.0 as usize;
        self.activity[i] += self.var_inc;
        if self.activity[i] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increase(v.0, &self.activity);
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut counter = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let dl = self.decision_level();
        loop {
            let clause = self.clauses[confl as usize].clone();
            let start = if p.is_some() { 1 } else { 0 };
            for &q in &clause[start..] {
                let v = q.var().0 as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(q.var());
                    if self.level[v] >= dl {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().0 as usize] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[lit.var().0 as usize] = false;
            counter -= 1;
            if counter == 0 {
                break;
            }
            confl = self.reason[lit.var().0 as usize];
            // The propagating literal sits first in its reason clause.
            let c = &mut self.clauses[confl as usize];
            if let Some(pos) = c.iter().position(|&x| x == lit) {
                c.swap(0, pos);
            }
        }
        learnt[0] = !p.expect("conflict analysis visits at least one literal");
        for l in &learnt[1..] {
            self.seen[l.var().0 as usize] = false;
        }
        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().0 as usize] > self.level[learnt[max_i].var().0 as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().0 as usize]
        };
        (learnt, bt)
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().0 as usize;
            self.phase[v] = !l.is_neg();
            self.assign[v] = Value::Unassigned;
            self.reason[v] = NO_REASON;
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.flipped.truncate(lvl as usize);
        self.qhead = self.trail.len();
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        if self.learning {
            while let Some(v) = self.heap.pop(&self.activity) {
                if self.assign[v as usize] == Value::Unassigned {
                    let var = Var(v);
                    return Some(if self.phase[v as usize] { Lit::pos(var) } else { Lit::neg(var) });
                }
            }
            None
        } else {
            self.assign.iter().position(|&a| a == Value::Unassigned).map(|v| Lit::neg(Var(v as u32)))
        }
    }

    fn new_level(&mut self, decision: Lit, flipped: bool) {
        self.trail_lim.push(self.trail.len());
        self.flipped.push(flipped);
        self.enqueue(decision, NO_REASON);
    }

    /// Searches for a satisfying assignment. `deadline` turns an overlong
    /// search into `Unknown`.
    pub fn solve(&mut self, deadline: Option<Instant>) -> SolveResult {
        if self.unsat {
            return SolveResult::Unsat;
        }
        if self.propagate().is_some() {
            self.unsat = true;
            return SolveResult::Unsat;
        }
        let mut restart_count = 0u32;
        let mut conflicts_until_restart = 100 * luby(1);
        let mut steps = 0u64;
        loop {
            steps += 1;
            if steps % 128 == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
                self.cancel_until(0);
                return SolveResult::Unknown;
            }
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.unsat = true;
                    return SolveResult::Unsat;
                }
                if self.learning {
                    let (learnt, bt) = self.analyze(confl);
                    self.cancel_until(bt);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], NO_REASON);
                    } else {
                        let first = learnt[0];
                        let ci = self.attach(learnt);
                        self.enqueue(first, ci);
                    }
                    self.var_inc /= 0.95;
                    conflicts_until_restart = conflicts_until_restart.saturating_sub(1);
                    if conflicts_until_restart == 0 {
                        restart_count += 1;
                        self.stats.restarts += 1;
                        conflicts_until_restart = 100 * luby(restart_count + 1);
                        self.cancel_until(0);
                    }
                } else {
                    // Chronological: flip the deepest decision not yet flipped.
                    let Some(lvl) = self.flipped.iter().rposition(|f| !f) else {
                        self.unsat = true;
                        return SolveResult::Unsat;
                    };
                    let decision = self.trail[self.trail_lim[lvl]];
                    self.cancel_until(lvl as u32);
                    self.new_level(!decision, true);
                }
                continue;
            }
            match self.pick_branch() {
                None => return SolveResult::Sat,
                Some(l) => {
                    self.stats.decisions += 1;
                    self.new_level(l, false);
                }
            }
        }
    }
}

fn value_in(assign: &[Value], l: Lit) -> Value {
    match assign[l.var().0 as usize] {
        Value::Unassigned => Value::Unassigned,
        Value::True if l.is_neg() => Value::False,
        Value::False if l.is_neg() => Value::True,
        v => v,
    }
}

/// The Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(i: u32) -> u64 {
    let mut k = 1;
    while (1u64 << k) - 1 < i as u64 {
        k += 1;
    }
    if (1u64 << k) - 1 == i as u64 {
        1 << (k - 1)
    } else {
        luby(i - (1 << (k - 1)) + 1)
    }
}

/// Max-heap of variables ordered by activity, ties broken by lower index.
#[derive(Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn better(a: u32, b: u32, act: &[f64]) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.pos.len() <= v as usize {
            self.pos.resize(v as usize + 1, None);
        }
        if self.pos[v as usize].is_some() {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = Some(i);
        self.up(i, act);
    }

    fn increase(&mut self, v: u32, act: &[f64]) {
        if let Some(Some(i)) = self.pos.get(v as usize) {
            self.up(*i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.pos[self.heap[0] as usize] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if Self::better(self.heap[i], self.heap[parent], act) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && Self::better(self.heap[l], self.heap[best], act) {
                best = l;
            }
            if r < self.heap.len() && Self::better(self.heap[r], self.heap[best], act) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a] as usize] = Some(a);
        self.pos[self.heap[b] as usize] = Some(b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: usize, clauses: &[Vec<(usize, bool)>]) -> bool {
        (0..1u32 << n).any(|m| clauses.iter().all(|c| c.iter().any(|&(v, pos)| ((m >> v) & 1 == 1) == pos)))
    }

    fn run(n: usize, clauses: &[Vec<(usize, bool)>], learning: bool) -> SolveResult {
        let mut s = Solver::new();
        s.set_learning(learning);
        let vars: Vec<Var> = (0..n).map(|_| s.new_var()).collect();
        for c in clauses {
            let lits: Vec<Lit> = c.iter().map(|&(v, pos)| if pos { Lit::pos(vars[v]) } else { Lit::neg(vars[v]) }).collect();
            s.add_clause(&lits);
        }
        let r = s.solve(None);
        if r == SolveResult::Sat {
            for c in clauses {
                assert!(c.iter().any(|&(v, pos)| s.value(vars[v]) == pos), "model violates a clause");
            }
        }
        r
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (1..=15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        let p = |i: usize, h: usize| i * 2 + h;
        let mut cl: Vec<Vec<(usize, bool)>> = (0..3).map(|i| vec![(p(i, 0), true), (p(i, 1), true)]).collect();
        for h in 0..2 {
            for i in 0..3 {
                for j in i + 1..3 {
                    cl.push(vec![(p(i, h), false), (p(j, h), false)]);
                }
            }
        }
        assert_eq!(run(6, &cl, true), SolveResult::Unsat);
        assert_eq!(run(6, &cl, false), SolveResult::Unsat);
    }

    #[test]
    fn random_3sat_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let n = rng.random_range(3..=10);
            let m = rng.random_range(1..=45);
            let cl: Vec<Vec<(usize, bool)>> = (0..m)
                .map(|_| (0..3).map(|_| (rng.random_range(0..n), rng.random_bool(0.5))).collect())
                .collect();
            let expected = if brute(n, &cl) { SolveResult::Sat } else { SolveResult::Unsat };
            assert_eq!(run(n, &cl, true), expected);
            assert_eq!(run(n, &cl, false), expected);
        }
    }

    #[test]
    fn empty_clause_is_unsat() {
        let mut s = Solver::new();
        assert!(!s.add_clause(&[]));
        assert_eq!(s.solve(None), SolveResult::Unsat);
    }
}
