//! Block designs and their verification.
//!
//! A [`Design`] is a list of [`Block`]s over `v` points. Nothing about balance
//! or simplicity is assumed on construction; the `check_*` functions establish
//! those properties and report exactly where they fail.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Point};

/// Longest list of offending t-subsets kept in a [`CoverageReport`].
pub const OFFENDING_CAP: usize = 100;

/// Largest number of t-subsets the brute-force balance check will enumerate.
pub const MAX_ENUMERATED_SUBSETS: u128 = 10_000_000;

/// Target parameters `t-(v, k, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ParameterSet {
    pub v: u32,
    pub k: u32,
    pub lambda: u32,
    pub t: u32,
}

impl ParameterSet {
    pub fn new(v: u32, k: u32, lambda: u32, t: u32) -> Result<Self> {
        if !(1 <= t && t <= k && k <= v) {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= t <= k <= v, got t={t}, k={k}, v={v}"
            )));
        }
        Ok(Self { v, k, lambda, t })
    }

    /// `λ·C(v−i, t−i) / C(k−i, t−i)`, the number of blocks through a fixed
    /// `i`-subset, when it is an integer.
    pub fn lambda_at(&self, i: u32) -> Option<u64> {
        let (num, den) = self.lambda_fraction(i);
        (den != 0 && num % den == 0).then(|| (num / den) as u64)
    }

    /// Replication number `r`, blocks through any one point.
    pub fn replication(&self) -> Option<u64> {
        self.lambda_at(1)
    }

    /// Block count `b`.
    pub fn block_count(&self) -> Option<u64> {
        self.lambda_at(0)
    }

    fn lambda_fraction(&self, i: u32) -> (u128, u128) {
        let (v, k, t) = (self.v as u128, self.k as u128, self.t as u128);
        let i = i as u128;
        (
            self.lambda as u128 * binomial(v - i, t - i),
            binomial(k - i, t - i),
        )
    }
}

pub fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Which divisibility condition failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisibilityFailure {
    /// Size of the fixed subset: 0 is the block count, 1 the replication number.
    pub level: u32,
    pub numerator: u128,
    pub denominator: u128,
    pub t: u32,
}

impl fmt::Display for DivisibilityFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.t, self.level) {
            (2, 0) => write!(
                f,
                "block count: λ·v(v−1) = {} is not divisible by k(k−1) = {}",
                2 * self.numerator,
                2 * self.denominator
            ),
            (2, 1) => write!(
                f,
                "replication: λ·(v−1) = {} is not divisible by k−1 = {}",
                self.numerator, self.denominator
            ),
            (_, i) => write!(
                f,
                "level {i}: λ·C(v−{i}, t−{i}) = {} is not divisible by C(k−{i}, t−{i}) = {}",
                self.numerator, self.denominator
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Divisibility {
    Admissible {
        params: ParameterSet,
        r: u64,
        b: u64,
    },
    Rejected(Vec<DivisibilityFailure>),
}

impl Divisibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Divisibility::Admissible { .. })
    }
}

/// Checks the necessary integrality conditions for a `t-(v,k,λ)` design.
pub fn check_divisibility(v: u32, k: u32, lambda: u32, t: u32) -> Result<Divisibility> {
    if k < 2 || lambda < 1 {
        return Err(Error::InvalidParameters(format!(
            "need k >= 2 and λ >= 1, got k={k}, λ={lambda}"
        )));
    }
    let params = ParameterSet::new(v, k, lambda, t)?;
    let failures: Vec<DivisibilityFailure> = (0..t)
        .rev()
        .filter_map(|level| {
            let (numerator, denominator) = params.lambda_fraction(level);
            (numerator % denominator != 0).then_some(DivisibilityFailure {
                level,
                numerator,
                denominator,
                t,
            })
        })
        .collect();
    if !failures.is_empty() {
        return Ok(Divisibility::Rejected(failures));
    }
    let too_big = || Error::InvalidParameters("derived counts overflow u64".into());
    let r = params.replication().ok_or_else(too_big)?;
    let b = params.block_count().ok_or_else(too_big)?;
    Ok(Divisibility::Admissible { params, r, b })
}

/// A block: strictly increasing point indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block(Vec<Point>);

impl Block {
    /// Sorts the points; a repeated point is an error.
    pub fn new(mut points: Vec<Point>) -> Result<Self> {
        points.sort_unstable();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::RepeatedPoint(w[0].0));
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: Point) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    /// Translate by `g`, re-sorted.
    pub fn translate(&self, geometry: &Geometry, g: Point) -> Block {
        let mut pts: Vec<Point> = self.0.iter().map(|&a| geometry.add(a, g)).collect();
        pts.sort_unstable();
        Block(pts)
    }

    pub fn intersection_size(&self, other: &Block) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    pub fn display(&self, geometry: &Geometry) -> String {
        let parts: Vec<String> = self.0.iter().map(|&a| geometry.format_point(a)).collect();
        format!("{{{}}}", parts.join(" "))
    }
}

/// A collection of blocks with multiset semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    params: ParameterSet,
    geometry: Option<Geometry>,
    blocks: Vec<Block>,
}

impl Design {
    pub fn new(
        params: ParameterSet,
        geometry: Option<Geometry>,
        blocks: Vec<Block>,
    ) -> Result<Self> {
        if let Some(g) = geometry {
            if g.size() != params.v {
                return Err(Error::Validation(format!(
                    "v = {} but the geometry has {} points",
                    params.v,
                    g.size()
                )));
            }
        }
        for (i, block) in blocks.iter().enumerate() {
            if block.len() != params.k as usize {
                return Err(Error::WrongBlockSize {
                    block: i,
                    expected: params.k as usize,
                    got: block.len(),
                });
            }
            if let Some(&last) = block.points().last() {
                if last.0 >= params.v {
                    return Err(Error::GeometryMismatch {
                        index: last.0,
                        size: params.v,
                    });
                }
            }
        }
        Ok(Self {
            params,
            geometry,
            blocks,
        })
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn geometry(&self) -> Option<&Geometry> {
        self.geometry.as_ref()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn v(&self) -> u32 {
        self.params.v
    }

    pub fn k(&self) -> u32 {
        self.params.k
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Same design with a different nominal λ.
    pub fn with_lambda(mut self, lambda: u32) -> Self {
        self.params.lambda = lambda;
        self
    }

    /// Block list sorted ascending; multiplicities kept.
    pub fn sorted_blocks(&self) -> Vec<Block> {
        let mut b = self.blocks.clone();
        b.sort();
        b
    }
}

/// Counts per unordered point pair.
#[derive(Debug, Clone)]
pub struct PairCounts {
    v: u32,
    counts: Vec<u32>,
}

impl PairCounts {
    fn slot(&self, a: u32, b: u32) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let (a, b, v) = (a as usize, b as usize, self.v as usize);
        a * v - a * (a + 1) / 2 + (b - a - 1)
    }

    /// Number of blocks containing both `a` and `b` (`a != b`).
    pub fn get(&self, a: Point, b: Point) -> u32 {
        debug_assert!(a != b);
        self.counts[self.slot(a.0, b.0)]
    }

    pub fn iter(&self) -> impl Iterator<Item = ((Point, Point), u32)> + '_ {
        let v = self.v;
        (0..v)
            .flat_map(move |a| (a + 1..v).map(move |b| (a, b)))
            .zip(self.counts.iter().copied())
            .map(|((a, b), c)| ((Point(a), Point(b)), c))
    }
}

pub fn pair_counts(design: &Design) -> PairCounts {
    let v = design.v() as usize;
    let mut table = PairCounts {
        v: design.v(),
        counts: vec![0; v * v.saturating_sub(1) / 2],
    };
    for block in design.blocks() {
        let pts = block.points();
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                let s = table.slot(a.0, b.0);
                table.counts[s] += 1;
            }
        }
    }
    table
}

/// Outcome of a `t`-subset balance check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub t: u32,
    pub lambda: u32,
    /// coverage count ↦ number of `t`-subsets attaining it
    pub histogram: BTreeMap<u32, u64>,
    /// First [`OFFENDING_CAP`] subsets whose count differs from λ, with their count.
    pub offending: Vec<(Vec<Point>, u32)>,
}

impl CoverageReport {
    pub fn total(&self) -> u64 {
        self.histogram.values().sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.histogram.len() == 1 && self.histogram.contains_key(&self.lambda)
            || (self.histogram.is_empty() && self.lambda == 0)
    }

    fn record(&mut self, subset: impl FnOnce() -> Vec<Point>, count: u32) {
        *self.histogram.entry(count).or_insert(0) += 1;
        if count != self.lambda && self.offending.len() < OFFENDING_CAP {
            self.offending.push((subset(), count));
        }
    }

    fn empty(t: u32, lambda: u32) -> Self {
        Self {
            t,
            lambda,
            histogram: BTreeMap::new(),
            offending: Vec::new(),
        }
    }
}

/// Pair coverage measured against the design's nominal λ.
pub fn pair_coverage(design: &Design) -> CoverageReport {
    pair_coverage_against(design, design.params().lambda)
}

fn pair_coverage_against(design: &Design, lambda: u32) -> CoverageReport {
    let mut report = CoverageReport::empty(2, lambda);
    for ((a, b), c) in pair_counts(design).iter() {
        report.record(|| vec![a, b], c);
    }
    report
}

/// Coverage of every `t`-subset, counted by ranking each block's `t`-subsets
/// in the combinatorial number system.
pub fn t_subset_coverage(design: &Design, t: u32, lambda: u32) -> Result<CoverageReport> {
    if t == 0 || t > design.k() {
        return Err(Error::UnsupportedStrength {
            t: t as usize,
            reason: format!("need 1 <= t <= k = {}", design.k()),
        });
    }
    if t > 3 {
        return Err(Error::UnsupportedStrength {
            t: t as usize,
            reason: "exhaustive enumeration is limited to t <= 3".into(),
        });
    }
    let subsets = binomial(design.v() as u128, t as u128);
    if subsets > MAX_ENUMERATED_SUBSETS {
        return Err(Error::UnsupportedStrength {
            t: t as usize,
            reason: format!("C(v, t) = {subsets} exceeds {MAX_ENUMERATED_SUBSETS}"),
        });
    }
    let rank = |s: &[u32]| -> usize {
        s.iter()
            .enumerate()
            .map(|(i, &c)| binomial(c as u128, i as u128 + 1) as usize)
            .sum()
    };
    let mut counts = vec![0u32; subsets as usize];
    let mut buf = vec![0u32; t as usize];
    for block in design.blocks() {
        let idx: Vec<u32> = block.points().iter().map(|p| p.0).collect();
        for_each_subset(&idx, t as usize, &mut buf, 0, 0, &mut |s| {
            counts[rank(s)] += 1
        });
    }
    let mut report = CoverageReport::empty(t, lambda);
    let all: Vec<u32> = (0..design.v()).collect();
    let mut buf = vec![0u32; t as usize];
    for_each_subset(&all, t as usize, &mut buf, 0, 0, &mut |s| {
        let c = counts[rank(s)];
        report.record(|| s.iter().map(|&i| Point(i)).collect(), c);
    });
    Ok(report)
}

fn for_each_subset(
    items: &[u32],
    t: usize,
    buf: &mut [u32],
    start: usize,
    depth: usize,
    f: &mut impl FnMut(&[u32]),
) {
    if depth == t {
        f(buf);
        return;
    }
    for i in start..items.len() {
        if items.len() - i < t - depth {
            break;
        }
        buf[depth] = items[i];
        for_each_subset(items, t, buf, i + 1, depth + 1, f);
    }
}

/// Is every `t`-subset in exactly `lambda` blocks?
pub fn check_t_design(design: &Design, t: u32, lambda: u32) -> Result<CoverageReport> {
    if t > design.k() {
        return Err(Error::UnsupportedStrength {
            t: t as usize,
            reason: format!("t exceeds block size k = {}", design.k()),
        });
    }
    if t == 2 {
        Ok(pair_coverage_against(design, lambda))
    } else {
        t_subset_coverage(design, t, lambda)
    }
}

/// Blocks per point.
pub fn replication_counts(design: &Design) -> Vec<u32> {
    let mut r = vec![0u32; design.v() as usize];
    for block in design.blocks() {
        for a in block.points() {
            r[a.0 as usize] += 1;
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicityReport {
    /// Blocks occurring more than once, with their multiplicity, sorted.
    pub repeated: Vec<(Block, usize)>,
}

impl SimplicityReport {
    pub fn is_simple(&self) -> bool {
        self.repeated.is_empty()
    }
}

pub fn check_simple(design: &Design) -> SimplicityReport {
    let mut seen: HashMap<&Block, usize> = HashMap::with_capacity(design.len());
    for block in design.blocks() {
        *seen.entry(block).or_insert(0) += 1;
    }
    let mut repeated: Vec<(Block, usize)> = seen
        .into_iter()
        .filter(|&(_, m)| m > 1)
        .map(|(b, m)| (b.clone(), m))
        .collect();
    repeated.sort();
    SimplicityReport { repeated }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroSumReport {
    /// Positions of blocks whose points do not sum to zero.
    pub offending: Vec<usize>,
}

impl ZeroSumReport {
    pub fn all_zero(&self) -> bool {
        self.offending.is_empty()
    }
}

pub fn check_zero_sum(design: &Design) -> Result<ZeroSumReport> {
    let g = design.geometry().ok_or(Error::MissingGeometry)?;
    let offending = design
        .blocks()
        .iter()
        .enumerate()
        .filter(|(_, b)| !g.sum(b.points().iter().copied()).is_zero())
        .map(|(i, _)| i)
        .collect();
    Ok(ZeroSumReport { offending })
}

/// A block written as two distinct parallel lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LineDecomposition {
    pub direction: Point,
    /// Smallest point of each line, ascending.
    pub bases: [Point; 2],
}

/// Splits a `2p`-block into two parallel lines if possible.
pub fn check_two_parallel_line_structure(
    block: &Block,
    geometry: &Geometry,
) -> Result<Option<LineDecomposition>> {
    let p = geometry.p() as usize;
    if block.len() != 2 * p {
        return Err(Error::WrongBlockSize {
            block: 0,
            expected: 2 * p,
            got: block.len(),
        });
    }
    let pts = block.points();
    if let Some(&a) = pts.iter().find(|a| !geometry.contains(**a)) {
        return Err(Error::GeometryMismatch {
            index: a.0,
            size: geometry.size(),
        });
    }
    let first = pts[0];
    for &other in &pts[1..] {
        let line = geometry.line_through_pair(first, other)?;
        if !line.points().iter().all(|&a| block.contains(a)) {
            continue;
        }
        let rest: Vec<Point> = pts.iter().copied().filter(|&a| !line.contains(a)).collect();
        let second = geometry.line_through(rest[0], line.direction())?;
        if second.points() == rest.as_slice() {
            return Ok(Some(LineDecomposition {
                direction: line.direction(),
                bases: [line.base(), second.base()],
            }));
        }
    }
    Ok(None)
}

/// Positions of blocks that are not a union of two parallel lines.
pub fn structure_failures(design: &Design) -> Result<Vec<usize>> {
    let g = design.geometry().ok_or(Error::MissingGeometry)?;
    let mut bad = Vec::new();
    for (i, b) in design.blocks().iter().enumerate() {
        if check_two_parallel_line_structure(b, g)?.is_none() {
            bad.push(i);
        }
    }
    Ok(bad)
}

/// All unions of two distinct parallel lines of AG(2, q).
///
/// The result is a `2-(q², 2q, 2q−1)` design with `(q+1)·C(q,2)` blocks. For
/// `q = 2` every block is the whole plane, so the design is not simple.
pub fn full_two_parallel_union_design(q: u32) -> Result<Design> {
    let g = Geometry::new(q, 2)?;
    let mut blocks = Vec::new();
    for d in g.direction_representatives() {
        let lines = g.parallel_class(d)?;
        for (i, a) in lines.iter().enumerate() {
            for b in &lines[i + 1..] {
                let pts = a.points().iter().chain(b.points()).copied().collect();
                blocks.push(Block::new(pts)?);
            }
        }
    }
    let params = ParameterSet::new(q * q, 2 * q, 2 * q - 1, 2)?;
    Design::new(params, Some(g), blocks)
}

/// Sizes `|B ∩ B'|` over pairs of distinct blocks (repeats collapsed).
pub fn intersection_profile(design: &Design) -> BTreeSet<usize> {
    let distinct: BTreeSet<&Block> = design.blocks().iter().collect();
    let distinct: Vec<&Block> = distinct.into_iter().collect();
    let mut sizes = BTreeSet::new();
    for (i, a) in distinct.iter().enumerate() {
        for b in &distinct[i + 1..] {
            sizes.insert(a.intersection_size(b));
        }
    }
    sizes
}
