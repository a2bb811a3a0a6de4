//! λ-fold difference-cover search over candidate orbits.
//!
//! A family of base blocks develops into a 2-design with index λ exactly when
//! the summed pair coverages `Σ N_B(d) / |Stab(B)|` equal λ at every nonzero
//! `d`. For the two-parallel-line candidates the stabilizer has order `p`, so
//! the search works with raw difference counts and a per-difference target of
//! `λ·p`.
//!
//! The search is a depth-first exact cover with multiplicities. At each node it
//! branches on the open difference with the fewest candidates that still fit
//! (ties go to the smallest difference), and backtracks as soon as some open
//! difference has none. Candidates covering the branch difference are tried in
//! index order; once tried at a node a candidate is banned for the rest of that
//! node's subtree, so every family is reached along exactly one path.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::design::{
    check_simple, check_t_design, check_zero_sum, structure_failures, CoverageReport,
    SimplicityReport, ZeroSumReport,
};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::orbit::{develop, Family, OrbitRep};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub family_size: usize,
    /// Required ordered-difference total at every nonzero `d`; `λ·p`.
    pub target: u32,
    /// `None` means unlimited.
    pub limit: Option<usize>,
    pub budget: Option<Duration>,
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            family_size: 16,
            target: 6,
            limit: Some(1),
            budget: None,
            workers: 1,
        }
    }
}

impl SearchConfig {
    /// Checks the counting identity `m·k(k−1) = target·(v−1)` and the
    /// remaining knobs.
    pub fn validate(&self, geometry: &Geometry, k: u32) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.limit == Some(0) {
            return bad("solution limit must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("need at least one worker".into());
        }
        if self.family_size == 0 {
            return bad("family size must be at least 1".into());
        }
        if self.target == 0 || !self.target.is_multiple_of(geometry.p()) {
            return bad(format!(
                "target {} is not a positive multiple of p = {}",
                self.target,
                geometry.p()
            ));
        }
        let lhs = self.family_size as u64 * k as u64 * (k as u64 - 1);
        let rhs = self.target as u64 * (geometry.size() as u64 - 1);
        if lhs != rhs {
            return bad(format!(
                "counting identity fails: {}·{}·{} = {lhs} but target·(v−1) = {rhs}",
                self.family_size,
                k,
                k - 1
            ));
        }
        Ok(())
    }
}

/// Partial family and the difference counts it still needs.
#[derive(Debug, Clone)]
pub struct SearchState {
    family_size: usize,
    chosen: Vec<usize>,
    residual: Vec<u32>,
    residual_sum: u64,
    /// Bit `s` set iff `residual[s] > 0`.
    open: Vec<u64>,
    nodes: u64,
}

impl SearchState {
    pub fn new(geometry: &Geometry, config: &SearchConfig) -> Self {
        let slots = geometry.size() as usize - 1;
        let mut open = vec![0u64; slots.div_ceil(64)];
        for s in 0..slots {
            open[s / 64] |= 1 << (s % 64);
        }
        Self {
            family_size: config.family_size,
            chosen: Vec::with_capacity(config.family_size),
            residual: vec![config.target; slots],
            residual_sum: config.target as u64 * slots as u64,
            open,
            nodes: 0,
        }
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    /// Remaining need per nonzero `d` (slot `d − 1`).
    pub fn residual(&self) -> &[u32] {
        &self.residual
    }

    pub fn residual_sum(&self) -> u64 {
        self.residual_sum
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn apply(&mut self, index: usize, candidate: &OrbitRep) {
        for &(d, n) in candidate.diff().support() {
            let s = d.0 as usize - 1;
            self.residual[s] -= n;
            if self.residual[s] == 0 {
                self.open[s / 64] &= !(1 << (s % 64));
            }
        }
        self.residual_sum -= candidate.diff().total() as u64;
        self.chosen.push(index);
    }

    pub fn undo(&mut self, candidate: &OrbitRep) {
        for &(d, n) in candidate.diff().support() {
            let s = d.0 as usize - 1;
            self.residual[s] += n;
            self.open[s / 64] |= 1 << (s % 64);
        }
        self.residual_sum += candidate.diff().total() as u64;
        self.chosen.pop();
    }
}

/// Whether `candidate` can be added without overshooting any residual while
/// keeping `remaining picks · k(k−1) = Σ residual`.
pub fn residual_prune(state: &SearchState, candidate: &OrbitRep) -> bool {
    let fits = candidate
        .diff()
        .support()
        .iter()
        .all(|&(d, n)| state.residual[d.0 as usize - 1] >= n);
    if !fits || state.chosen.len() >= state.family_size {
        return false;
    }
    let weight = candidate.diff().total() as u64;
    let remaining = (state.family_size - state.chosen.len() - 1) as u64;
    remaining * weight == state.residual_sum - weight
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Every family was enumerated.
    Exhausted,
    /// The solution limit was reached.
    LimitReached,
    /// The wall-clock budget ran out first; results are partial.
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Candidate indices of each solution, ascending; solutions in
    /// lexicographic order.
    pub solutions: Vec<Vec<usize>>,
    pub families: Vec<Family>,
    pub nodes: u64,
    pub termination: Termination,
    pub elapsed: Duration,
}

impl SearchOutcome {
    pub fn is_complete(&self) -> bool {
        self.termination != Termination::BudgetExhausted
    }
}

struct Shared<'a> {
    geometry: &'a Geometry,
    candidates: &'a [OrbitRep],
    covers: Vec<Vec<usize>>,
    /// Bit `s` set iff `d = s + 1` is the smaller of `d` and `−d`. Every
    /// difference vector is symmetric, so the residuals at `d` and `−d` agree
    /// and branching only needs to look at one of them.
    half: Vec<u64>,
    config: &'a SearchConfig,
    limit: usize,
    deadline: Option<Instant>,
    out_of_time: AtomicBool,
    /// Branches past this index cannot contribute to the output.
    cutoff: AtomicUsize,
}

struct Branch {
    solutions: Vec<Vec<usize>>,
    nodes: u64,
}

struct Worker<'s, 'a> {
    shared: &'s Shared<'a>,
    branch: usize,
    state: SearchState,
    used: Vec<bool>,
    banned: Vec<u32>,
    solutions: Vec<Vec<usize>>,
}

impl Worker<'_, '_> {
    fn should_stop(&mut self) -> bool {
        if self.branch > self.shared.cutoff.load(Ordering::Relaxed)
            || self.shared.out_of_time.load(Ordering::Relaxed)
        {
            return true;
        }
        if self.state.nodes.is_multiple_of(1024) {
            if let Some(deadline) = self.shared.deadline {
                if Instant::now() >= deadline {
                    self.shared.out_of_time.store(true, Ordering::Relaxed);
                    return true;
                }
            }
        }
        false
    }

    fn feasible(&self, c: usize) -> bool {
        !self.used[c]
            && self.banned[c] == 0
            && residual_prune(&self.state, &self.shared.candidates[c])
    }

    /// Open slot with the fewest feasible candidates; `None` when some open
    /// slot has none at all (or nothing is open).
    fn branch_slot(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (w, &word) in self.state.open.iter().enumerate() {
            let mut bits = word & self.shared.half[w];
            while bits != 0 {
                let s = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let mut count = 0;
                for &c in &self.shared.covers[s] {
                    if self.feasible(c) {
                        count += 1;
                        if best.is_some_and(|(_, b)| count >= b) {
                            break;
                        }
                    }
                }
                if count == 0 {
                    return None;
                }
                if best.is_none_or(|(_, b)| count < b) {
                    best = Some((s, count));
                    if count == 1 {
                        return Some(s);
                    }
                }
            }
        }
        best.map(|(s, _)| s)
    }

    /// Returns `true` when the search must unwind.
    fn dfs(&mut self) -> bool {
        self.state.nodes += 1;
        if self.should_stop() {
            return true;
        }
        if self.state.chosen.len() == self.state.family_size {
            if self.state.residual_sum == 0 {
                let mut s = self.state.chosen.clone();
                s.sort_unstable();
                self.solutions.push(s);
                return self.solutions.len() >= self.shared.limit;
            }
            return false;
        }
        let Some(slot) = self.branch_slot() else {
            return false;
        };
        let shared = self.shared;
        let mut tried = Vec::new();
        let mut stop = false;
        for &c in &shared.covers[slot] {
            if self.used[c] || self.banned[c] > 0 {
                continue;
            }
            let cand = &shared.candidates[c];
            if residual_prune(&self.state, cand) {
                self.used[c] = true;
                self.state.apply(c, cand);
                stop = self.dfs();
                self.state.undo(cand);
                self.used[c] = false;
                if stop {
                    break;
                }
            }
            self.banned[c] += 1;
            tried.push(c);
        }
        for c in tried {
            self.banned[c] -= 1;
        }
        stop
    }
}

/// Finds families of `config.family_size` candidates whose difference counts
/// sum to `config.target` everywhere.
///
/// Candidates must be sorted by canonical key. The top-level branches are
/// spread over `config.workers` threads; the result is the same for any
/// worker count unless the budget runs out.
pub fn search(
    geometry: &Geometry,
    candidates: &[OrbitRep],
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    let start = Instant::now();
    let k = candidates
        .first()
        .map_or(2 * geometry.p(), |c| c.block().len() as u32);
    config.validate(geometry, k)?;
    if candidates.iter().any(|c| c.block().len() as u32 != k) {
        return Err(Error::InvalidConfig(
            "candidates differ in block size".into(),
        ));
    }
    if candidates.windows(2).any(|w| w[0].block() >= w[1].block()) {
        return Err(Error::InvalidConfig(
            "candidates must be strictly increasing by canonical key".into(),
        ));
    }
    if let Some(c) = candidates
        .iter()
        .find(|c| c.stabilizer().len() as u32 != geometry.p())
    {
        return Err(Error::InvalidConfig(format!(
            "candidate {} does not have a stabilizer of order p",
            c.block().display(geometry)
        )));
    }

    let slots = geometry.size() as usize - 1;
    let mut covers = vec![Vec::new(); slots];
    for (i, c) in candidates.iter().enumerate() {
        for &(d, _) in c.diff().support() {
            covers[d.0 as usize - 1].push(i);
        }
    }
    let mut half = vec![0u64; slots.div_ceil(64)];
    for d in geometry.nonzero_points() {
        if d <= geometry.neg(d) {
            let s = d.0 as usize - 1;
            half[s / 64] |= 1 << (s % 64);
        }
    }
    let shared = Shared {
        geometry,
        candidates,
        covers,
        half,
        config,
        limit: config.limit.unwrap_or(usize::MAX),
        deadline: config.budget.map(|b| start + b),
        out_of_time: AtomicBool::new(false),
        cutoff: AtomicUsize::new(usize::MAX),
    };

    // Top-level branches: candidates covering the root's branch difference.
    let root = Worker {
        shared: &shared,
        branch: 0,
        state: SearchState::new(geometry, config),
        used: vec![false; candidates.len()],
        banned: vec![0; candidates.len()],
        solutions: Vec::new(),
    };
    let roots = match root.branch_slot() {
        Some(slot) => shared.covers[slot].clone(),
        None => Vec::new(),
    };
    let results: Mutex<Vec<Option<Branch>>> = Mutex::new((0..roots.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);

    let run_branch = |i: usize| -> Branch {
        let mut w = Worker {
            shared: &shared,
            branch: i,
            state: SearchState::new(shared.geometry, shared.config),
            used: vec![false; candidates.len()],
            banned: vec![0; candidates.len()],
            solutions: Vec::new(),
        };
        for &c in &roots[..i] {
            w.banned[c] += 1;
        }
        let c = roots[i];
        if residual_prune(&w.state, &candidates[c]) {
            w.used[c] = true;
            w.state.apply(c, &candidates[c]);
            w.dfs();
        }
        Branch {
            solutions: w.solutions,
            nodes: w.state.nodes + 1,
        }
    };

    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= roots.len()
            || i > shared.cutoff.load(Ordering::Relaxed)
            || shared.out_of_time.load(Ordering::Relaxed)
        {
            break;
        }
        let branch = run_branch(i);
        let mut res = results.lock().expect("result lock poisoned");
        res[i] = Some(branch);
        let mut found = 0;
        for (j, r) in res.iter().enumerate() {
            let Some(r) = r else { break };
            found += r.solutions.len();
            if found >= shared.limit {
                shared.cutoff.fetch_min(j, Ordering::Relaxed);
                break;
            }
        }
    };
    std::thread::scope(|s| {
        for _ in 1..config.workers.min(roots.len().max(1)) {
            s.spawn(work);
        }
        work();
    });

    let results = results.into_inner().expect("result lock poisoned");
    let nodes = 1 + results.iter().flatten().map(|b| b.nodes).sum::<u64>();
    let cutoff = shared.cutoff.load(Ordering::Relaxed);
    let mut solutions = Vec::new();
    let mut prefix_complete = true;
    for (i, r) in results.into_iter().enumerate() {
        if i > cutoff {
            break;
        }
        match r {
            Some(b) => solutions.extend(b.solutions),
            None => {
                prefix_complete = false;
                break;
            }
        }
    }
    let out_of_time = shared.out_of_time.load(Ordering::Relaxed);
    let termination = if solutions.len() >= shared.limit && prefix_complete {
        solutions.truncate(shared.limit);
        Termination::LimitReached
    } else if out_of_time || !prefix_complete {
        Termination::BudgetExhausted
    } else {
        Termination::Exhausted
    };
    solutions.sort();
    let families = solutions
        .iter()
        .map(|s| {
            Family::new(
                *geometry,
                s.iter().map(|&i| candidates[i].clone()).collect(),
            )
        })
        .collect::<Result<_>>()?;
    Ok(SearchOutcome {
        solutions,
        families,
        nodes,
        termination,
        elapsed: start.elapsed(),
    })
}

/// Aggregated checks on the design developed from a family.
#[derive(Debug, Clone)]
pub struct FamilyVerdict {
    pub blocks: usize,
    pub coverage: CoverageReport,
    pub simplicity: SimplicityReport,
    pub zero_sum: ZeroSumReport,
    /// Positions of developed blocks that are not two parallel lines.
    pub structure_failures: Vec<usize>,
}

impl FamilyVerdict {
    pub fn passed(&self) -> bool {
        self.coverage.is_balanced()
            && self.simplicity.is_simple()
            && self.zero_sum.all_zero()
            && self.structure_failures.is_empty()
    }
}

/// Develops `family` and checks it is a simple, zero-sum `2-(v,k,λ)` design
/// made of two-parallel-line blocks.
pub fn verify_family(family: &Family, lambda: u32) -> Result<FamilyVerdict> {
    let design = develop(family);
    Ok(FamilyVerdict {
        blocks: design.len(),
        coverage: check_t_design(&design, 2, lambda)?,
        simplicity: check_simple(&design),
        zero_sum: check_zero_sum(&design)?,
        structure_failures: if family.k() == 2 * family.geometry().p() {
            structure_failures(&design)?
        } else {
            (0..design.len()).collect()
        },
    })
}
