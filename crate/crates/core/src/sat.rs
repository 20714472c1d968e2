//! A small conflict-driven SAT solver and DIMACS plumbing.
//!
//! Literals follow the DIMACS convention: variable `v` is the positive
//! literal `v` and the negative literal `-v`, variables are 1-based. The
//! solver is a standard CDCL loop: two watched literals, first-UIP conflict
//! analysis, VSIDS-style activities, phase saving, and geometric restarts.
//! All learnt clauses are kept, so the search is complete. No randomness
//! anywhere; runs are reproducible.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("DIMACS parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("literal {0} out of range for {1} variables")]
    LitOutOfRange(i64, usize),
}

/// Solver verdict; `model[v-1]` is the value of DIMACS variable `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatOutcome {
    Sat(Vec<bool>),
    Unsat,
}

impl SatOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatOutcome::Sat(_))
    }
}

const UNASSIGNED: i8 = 0;

fn lit_index(lit: i32) -> usize {
    let v = (lit.unsigned_abs() as usize) - 1;
    2 * v + (lit < 0) as usize
}

fn var_of(lit: i32) -> usize {
    (lit.unsigned_abs() as usize) - 1
}

/// CDCL solver over a fixed variable count.
pub struct Solver {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<i32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    phase: Vec<bool>,
    unsat: bool,
    /// Clauses at indices below this are problem clauses and never deleted.
    first_learnt: usize,
    clause_activity: Vec<f64>,
    clause_inc: f64,
    live_learnts: usize,
}

impl Solver {
    pub fn new(num_vars: usize) -> Solver {
        Solver {
            num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            assign: vec![UNASSIGNED; num_vars],
            level: vec![0; num_vars],
            reason: vec![None; num_vars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; num_vars],
            var_inc: 1.0,
            phase: vec![false; num_vars],
            unsat: false,
            first_learnt: usize::MAX,
            clause_activity: Vec::new(),
            clause_inc: 1.0,
            live_learnts: 0,
        }
    }

    fn value(&self, lit: i32) -> i8 {
        let v = self.assign[var_of(lit)];
        if lit < 0 {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds one clause. Tautologies are dropped, duplicate literals merged.
    /// Returns an error if a literal is out of range.
    pub fn add_clause(&mut self, lits: &[i32]) -> Result<(), SatError> {
        debug_assert_eq!(self.decision_level(), 0);
        let mut clause: Vec<i32> = Vec::with_capacity(lits.len());
        for &lit in lits {
            if lit == 0 || lit.unsigned_abs() as usize > self.num_vars {
                return Err(SatError::LitOutOfRange(lit as i64, self.num_vars));
            }
            if clause.contains(&-lit) {
                return Ok(()); // tautology
            }
            if !clause.contains(&lit) {
                clause.push(lit);
            }
        }
        // Remove literals already false at level 0; a satisfied clause is dropped.
        clause.retain(|&l| {
            !(self.value(l) == -1 && self.level[var_of(l)] == 0 && self.reason_free_root(l))
        });
        if clause.iter().any(|&l| self.value(l) == 1 && self.level[var_of(l)] == 0) {
            return Ok(());
        }
        match clause.len() {
            0 => {
                self.unsat = true;
                Ok(())
            }
            1 => {
                let l = clause[0];
                match self.value(l) {
                    1 => Ok(()),
                    -1 => {
                        self.unsat = true;
                        Ok(())
                    }
                    _ => {
                        self.enqueue(l, None);
                        Ok(())
                    }
                }
            }
            _ => {
                self.attach(clause);
                Ok(())
            }
        }
    }

    // At add time everything assigned sits at level 0.
    fn reason_free_root(&self, _lit: i32) -> bool {
        true
    }

    fn attach(&mut self, clause: Vec<i32>) -> usize {
        let idx = self.clauses.len();
        self.watches[lit_index(clause[0])].push(idx);
        self.watches[lit_index(clause[1])].push(idx);
        self.clauses.push(clause);
        self.clause_activity.push(0.0);
        idx
    }

    fn enqueue(&mut self, lit: i32, reason: Option<usize>) {
        debug_assert_eq!(self.value(lit), UNASSIGNED);
        let v = var_of(lit);
        self.assign[v] = if lit > 0 { 1 } else { -1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.phase[v] = lit > 0;
        self.trail.push(lit);
    }

    /// Unit propagation; returns the index of a conflicting clause.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = -p;
            let mut ws = std::mem::take(&mut self.watches[lit_index(false_lit)]);
            let mut i = 0;
            while i < ws.len() {
                let ci = ws[i];
                if self.clauses[ci].is_empty() {
                    // Deleted learnt clause; drop the stale watch entry.
                    ws.swap_remove(i);
                    continue;
                }
                // Put the false literal in slot 1.
                if self.clauses[ci][0] == false_lit {
                    self.clauses[ci].swap(0, 1);
                }
                let first = self.clauses[ci][0];
                if self.value(first) == 1 {
                    i += 1;
                    continue;
                }
                // Look for a replacement watch.
                let mut moved = false;
                for k in 2..self.clauses[ci].len() {
                    if self.value(self.clauses[ci][k]) != -1 {
                        self.clauses[ci].swap(1, k);
                        let w = self.clauses[ci][1];
                        self.watches[lit_index(w)].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if self.value(first) == -1 {
                    // Conflict: restore the remaining watches.
                    self.watches[lit_index(false_lit)].extend_from_slice(&ws);
                    return Some(ci);
                }
                self.enqueue(first, Some(ci));
                i += 1;
            }
            let watched = std::mem::take(&mut self.watches[lit_index(false_lit)]);
            self.watches[lit_index(false_lit)] = ws;
            self.watches[lit_index(false_lit)].extend(watched);
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
    }

    fn bump_clause(&mut self, ci: usize) {
        self.clause_activity[ci] += self.clause_inc;
        if self.clause_activity[ci] > 1e20 {
            for a in &mut self.clause_activity {
                *a *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    /// Tombstones the less active half of the unlocked learnt clauses.
    /// Watch entries pointing at tombstones are dropped lazily during
    /// propagation.
    fn reduce_learnts(&mut self) {
        let mut locked = vec![false; self.clauses.len()];
        for &l in &self.trail {
            if let Some(ci) = self.reason[var_of(l)] {
                locked[ci] = true;
            }
        }
        let mut candidates: Vec<usize> = (self.first_learnt..self.clauses.len())
            .filter(|&ci| !self.clauses[ci].is_empty() && !locked[ci] && self.clauses[ci].len() > 2)
            .collect();
        candidates.sort_by(|&a, &b| {
            self.clause_activity[a]
                .partial_cmp(&self.clause_activity[b])
                .unwrap()
        });
        for &ci in &candidates[..candidates.len() / 2] {
            self.clauses[ci].clear();
            self.live_learnts -= 1;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, conflict: usize) -> (Vec<i32>, u32) {
        let mut learnt: Vec<i32> = vec![0];
        let mut seen = vec![false; self.num_vars];
        let mut path = 0usize;
        let mut expanding: Option<i32> = None;
        let mut index = self.trail.len();
        let mut clause_idx = conflict;
        loop {
            self.bump_clause(clause_idx);
            // A reason clause holds its asserting literal at slot 0; skip it.
            let start = match expanding {
                None => 0,
                Some(p) => {
                    debug_assert_eq!(self.clauses[clause_idx][0], p);
                    1
                }
            };
            for pos in start..self.clauses[clause_idx].len() {
                let q = self.clauses[clause_idx][pos];
                let v = var_of(q);
                if !seen[v] && self.level[v] > 0 {
                    seen[v] = true;
                    self.bump(v);
                    if self.level[v] == self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            // Walk back to the most recent seen literal.
            loop {
                index -= 1;
                if seen[var_of(self.trail[index])] {
                    break;
                }
            }
            let lit = self.trail[index];
            seen[var_of(lit)] = false;
            path -= 1;
            if path == 0 {
                learnt[0] = -lit;
                break;
            }
            expanding = Some(lit);
            clause_idx = self.reason[var_of(lit)].expect("non-decision has a reason");
        }
        // Drop literals implied by the rest of the clause: a literal whose
        // whole reason is already marked (or root-level) adds nothing.
        let mut kept = vec![learnt[0]];
        for &q in &learnt[1..] {
            let redundant = match self.reason[var_of(q)] {
                None => false,
                Some(ci) => self.clauses[ci][1..]
                    .iter()
                    .all(|&r| seen[var_of(r)] || self.level[var_of(r)] == 0),
            };
            if !redundant {
                kept.push(q);
            }
        }
        let mut learnt = kept;
        let back_level = learnt[1..]
            .iter()
            .map(|&l| self.level[var_of(l)])
            .max()
            .unwrap_or(0);
        // Watch a literal from the backjump level in slot 1 so the clause
        // stays well-watched after backtracking.
        if learnt.len() > 1 {
            let (swap_pos, _) = learnt[1..]
                .iter()
                .enumerate()
                .max_by_key(|(_, &l)| self.level[var_of(l)])
                .unwrap();
            learnt.swap(1, swap_pos + 1);
        }
        (learnt, back_level)
    }

    fn backtrack(&mut self, target: u32) {
        while self.decision_level() > target {
            let lim = self.trail_lim.pop().unwrap();
            while self.trail.len() > lim {
                let lit = self.trail.pop().unwrap();
                let v = var_of(lit);
                self.assign[v] = UNASSIGNED;
                self.reason[v] = None;
            }
        }
        self.qhead = self.trail.len();
    }

    fn decide(&mut self) -> bool {
        let mut best: Option<usize> = None;
        for v in 0..self.num_vars {
            if self.assign[v] == UNASSIGNED
                && best.is_none_or(|b| self.activity[v] > self.activity[b])
            {
                best = Some(v);
            }
        }
        match best {
            None => false,
            Some(v) => {
                self.trail_lim.push(self.trail.len());
                let lit = if self.phase[v] { v as i32 + 1 } else { -(v as i32 + 1) };
                self.enqueue(lit, None);
                true
            }
        }
    }

    pub fn solve(mut self) -> SatOutcome {
        if self.unsat {
            return SatOutcome::Unsat;
        }
        if self.propagate().is_some() {
            return SatOutcome::Unsat;
        }
        self.first_learnt = self.clauses.len();
        let mut restarts = 0u64;
        let mut conflicts_here = 0u64;
        let mut max_learnts = 2000usize.max(self.clauses.len() / 2);
        loop {
            if let Some(conflict) = self.propagate() {
                if self.decision_level() == 0 {
                    return SatOutcome::Unsat;
                }
                conflicts_here += 1;
                let (learnt, back_level) = self.analyze(conflict);
                self.backtrack(back_level);
                let assert_lit = learnt[0];
                if learnt.len() == 1 {
                    self.enqueue(assert_lit, None);
                } else {
                    let ci = self.attach(learnt);
                    self.live_learnts += 1;
                    self.bump_clause(ci);
                    self.enqueue(assert_lit, Some(ci));
                }
                self.var_inc /= 0.95;
                self.clause_inc /= 0.999;
            } else if self.live_learnts > max_learnts {
                self.reduce_learnts();
                max_learnts += max_learnts / 2;
            } else if conflicts_here >= 64 * luby(restarts) {
                restarts += 1;
                conflicts_here = 0;
                self.backtrack(0);
            } else if !self.decide() {
                let model = self.assign.iter().map(|&v| v == 1).collect();
                return SatOutcome::Sat(model);
            }
        }
    }
}

/// The Luby restart sequence 1 1 2 1 1 2 4 ...
fn luby(mut x: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) / 2;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

/// Solves a clause set directly.
pub fn solve(num_vars: usize, clauses: &[Vec<i32>]) -> Result<SatOutcome, SatError> {
    let mut solver = Solver::new(num_vars);
    for clause in clauses {
        solver.add_clause(clause)?;
    }
    Ok(solver.solve())
}

/// Checks a model against a clause set.
pub fn model_satisfies(model: &[bool], clauses: &[Vec<i32>]) -> bool {
    clauses.iter().all(|clause| {
        clause
            .iter()
            .any(|&l| if l > 0 { model[var_of(l)] } else { !model[var_of(l)] })
    })
}

/// Renders a formula in DIMACS CNF, one clause per line, comments first.
pub fn write_dimacs(num_vars: usize, clauses: &[Vec<i32>], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("c ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&format!("p cnf {} {}\n", num_vars, clauses.len()));
    for clause in clauses {
        for lit in clause {
            out.push_str(&lit.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS CNF. Comments and blank lines are skipped; clauses may span
/// lines and must be zero-terminated.
pub fn parse_dimacs(text: &str) -> Result<(usize, Vec<Vec<i32>>), SatError> {
    let mut num_vars: Option<usize> = None;
    let mut declared_clauses = 0usize;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('c') || text.starts_with('%') {
            continue;
        }
        if let Some(rest) = text.strip_prefix('p') {
            if num_vars.is_some() {
                return Err(SatError::Parse {
                    line,
                    msg: "duplicate problem line".into(),
                });
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(SatError::Parse {
                    line,
                    msg: format!("expected `p cnf <vars> <clauses>`, got {text:?}"),
                });
            }
            num_vars = Some(fields[1].parse().map_err(|_| SatError::Parse {
                line,
                msg: format!("bad variable count {:?}", fields[1]),
            })?);
            declared_clauses = fields[2].parse().map_err(|_| SatError::Parse {
                line,
                msg: format!("bad clause count {:?}", fields[2]),
            })?;
            continue;
        }
        let vars = num_vars.ok_or(SatError::Parse {
            line,
            msg: "clause before problem line".into(),
        })?;
        for tok in text.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| SatError::Parse {
                line,
                msg: format!("bad literal {tok:?}"),
            })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > vars {
                    return Err(SatError::LitOutOfRange(lit, vars));
                }
                current.push(lit as i32);
            }
        }
    }
    if !current.is_empty() {
        return Err(SatError::Parse {
            line: 0,
            msg: "unterminated clause at end of input".into(),
        });
    }
    let num_vars = num_vars.ok_or(SatError::Parse {
        line: 0,
        msg: "missing problem line".into(),
    })?;
    if clauses.len() != declared_clauses {
        return Err(SatError::Parse {
            line: 0,
            msg: format!(
                "declared {declared_clauses} clauses but found {}",
                clauses.len()
            ),
        });
    }
    Ok((num_vars, clauses))
}
