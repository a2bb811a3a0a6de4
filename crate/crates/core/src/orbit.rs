//! Translation action of `G = Z_p^n` on blocks.
//!
//! A base block `B` is developed into its orbit `{B + g : g ∈ G}`. The pair
//! `{u, u + d}` lies in exactly `N_B(d) / |Stab(B)|` blocks of that orbit,
//! where `N_B(d)` counts ordered pairs of `B` with difference `d`; this is the
//! bookkeeping the family search runs on.

use std::collections::BTreeSet;

use crate::design::{check_two_parallel_line_structure, Block, Design, ParameterSet};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, Point};

/// `{0, x, 2x, ..., y, y+x, y+2x, ...}`: the line through 0 with direction `x`
/// together with its parallel through `y`.
pub fn make_base_block(geometry: &Geometry, x: Point, y: Point) -> Result<Block> {
    geometry.point(x.0)?;
    geometry.point(y.0)?;
    if x.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let through_zero = geometry.line_through(Point::ZERO, x)?;
    if through_zero.contains(y) {
        return Err(Error::DegenerateBaseBlock);
    }
    let parallel = geometry.line_through(y, x)?;
    Block::new(
        through_zero
            .points()
            .iter()
            .chain(parallel.points())
            .copied()
            .collect(),
    )
}

/// `{g : B + g = B}`, ascending.
pub fn translation_stabilizer(geometry: &Geometry, block: &Block) -> Vec<Point> {
    let Some(&first) = block.points().first() else {
        return geometry.points().collect();
    };
    // g must carry `first` onto some point of the block
    let mut stab: Vec<Point> = block
        .points()
        .iter()
        .map(|&b| geometry.sub(b, first))
        .filter(|&g| {
            block
                .points()
                .iter()
                .all(|&a| block.contains(geometry.add(a, g)))
        })
        .collect();
    stab.sort_unstable();
    stab
}

/// Distinct translates of `block`, ascending.
pub fn orbit(geometry: &Geometry, block: &Block) -> Vec<Block> {
    let set: BTreeSet<Block> = geometry
        .points()
        .map(|g| block.translate(geometry, g))
        .collect();
    set.into_iter().collect()
}

/// Lexicographically least translate of `block`.
///
/// The least translate contains 0, so only the translates `B − a`, `a ∈ B`,
/// need comparing.
pub fn canonical_rep(geometry: &Geometry, block: &Block) -> Block {
    block
        .points()
        .iter()
        .map(|&a| block.translate(geometry, geometry.neg(a)))
        .min()
        .unwrap_or_else(|| block.clone())
}

/// Ordered-difference counts `N_B(d)` over the nonzero group elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceVector {
    /// Slot `i` holds `N_B(d)` for the point with index `i + 1`.
    dense: Vec<u32>,
    support: Vec<(Point, u32)>,
}

impl DifferenceVector {
    pub fn get(&self, d: Point) -> u32 {
        if d.is_zero() {
            0
        } else {
            self.dense[d.0 as usize - 1]
        }
    }

    pub fn dense(&self) -> &[u32] {
        &self.dense
    }

    /// Nonzero entries, ascending by `d`.
    pub fn support(&self) -> &[(Point, u32)] {
        &self.support
    }

    pub fn total(&self) -> u32 {
        self.dense.iter().sum()
    }
}

pub fn difference_vector(geometry: &Geometry, block: &Block) -> DifferenceVector {
    let mut dense = vec![0u32; geometry.size() as usize - 1];
    for &a in block.points() {
        for &b in block.points() {
            if a != b {
                dense[geometry.sub(b, a).0 as usize - 1] += 1;
            }
        }
    }
    let support = dense
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (Point(i as u32 + 1), c))
        .collect();
    DifferenceVector { dense, support }
}

/// A base block in canonical form with its orbit data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRep {
    block: Block,
    direction: Option<Point>,
    stabilizer: Vec<Point>,
    diff: DifferenceVector,
}

impl OrbitRep {
    pub fn new(geometry: &Geometry, block: &Block) -> Result<Self> {
        if let Some(&a) = block.points().iter().find(|a| !geometry.contains(**a)) {
            return Err(Error::GeometryMismatch {
                index: a.0,
                size: geometry.size(),
            });
        }
        let block = canonical_rep(geometry, block);
        let stabilizer = translation_stabilizer(geometry, &block);
        let direction = (stabilizer.len() == geometry.p() as usize)
            .then(|| geometry.canonical_direction(stabilizer[1]));
        let diff = difference_vector(geometry, &block);
        Ok(Self {
            block,
            direction,
            stabilizer,
            diff,
        })
    }

    /// Canonical block; doubles as the orbit key.
    pub fn block(&self) -> &Block {
        &self.block
    }

    /// Canonical generator of the stabilizer when it is a line through 0.
    pub fn direction(&self) -> Option<Point> {
        self.direction
    }

    pub fn stabilizer(&self) -> &[Point] {
        &self.stabilizer
    }

    pub fn orbit_size(&self, geometry: &Geometry) -> u32 {
        geometry.size() / self.stabilizer.len() as u32
    }

    pub fn diff(&self) -> &DifferenceVector {
        &self.diff
    }
}

/// Base blocks of distinct orbits, ordered by canonical key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    geometry: Geometry,
    k: u32,
    reps: Vec<OrbitRep>,
}

impl Family {
    /// Sorts `reps` by key. Blocks must share one size; an empty family takes
    /// `k = 2p`.
    pub fn new(geometry: Geometry, mut reps: Vec<OrbitRep>) -> Result<Self> {
        let k = reps
            .first()
            .map_or(2 * geometry.p(), |r| r.block().len() as u32);
        if let Some((i, r)) = reps
            .iter()
            .enumerate()
            .find(|(_, r)| r.block().len() as u32 != k)
        {
            return Err(Error::WrongBlockSize {
                block: i,
                expected: k as usize,
                got: r.block().len(),
            });
        }
        reps.sort_by(|a, b| a.block().cmp(b.block()));
        if reps.windows(2).any(|w| w[0].block() == w[1].block()) {
            return Err(Error::DuplicateOrbit);
        }
        Ok(Self { geometry, k, reps })
    }

    pub fn from_blocks(geometry: Geometry, blocks: &[Block]) -> Result<Self> {
        let reps = blocks
            .iter()
            .map(|b| OrbitRep::new(&geometry, b))
            .collect::<Result<_>>()?;
        Self::new(geometry, reps)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn reps(&self) -> &[OrbitRep] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Union of the orbits of all representatives.
///
/// The nominal λ of the result is `⌊b·k(k−1) / (v(v−1))⌋`, the value implied
/// by the block count; whether it is attained is for the caller to check.
pub fn develop(family: &Family) -> Design {
    let g = family.geometry();
    let blocks: Vec<Block> = family
        .reps()
        .iter()
        .flat_map(|r| orbit(g, r.block()))
        .collect();
    let (v, k) = (g.size() as u64, family.k() as u64);
    let lambda = (blocks.len() as u64 * k * k.saturating_sub(1)) / (v * (v - 1));
    let params = ParameterSet {
        v: g.size(),
        k: family.k(),
        lambda: lambda as u32,
        t: 2,
    };
    Design::new(params, Some(*g), blocks).expect("developed blocks match family geometry")
}

/// Pair coverage predicted from difference vectors: slot `d − 1` is the
/// number of developed blocks containing any pair `{u, u + d}`.
pub fn difference_coverage(geometry: &Geometry, reps: &[OrbitRep]) -> Vec<u32> {
    let mut cov = vec![0u32; geometry.size() as usize - 1];
    for r in reps {
        let stab = r.stabilizer().len() as u32;
        for &(d, n) in r.diff().support() {
            debug_assert_eq!(n % stab, 0);
            cov[d.0 as usize - 1] += n / stab;
        }
    }
    cov
}

/// One representative per orbit of unions of two parallel lines, sorted by key.
///
/// Only `p = 3` is supported.
pub fn enumerate_candidate_orbits(geometry: &Geometry) -> Result<Vec<OrbitRep>> {
    if geometry.p() != 3 {
        return Err(Error::UnsupportedModulus(geometry.p()));
    }
    let mut keys = BTreeSet::new();
    for d in geometry.direction_representatives() {
        let lines = geometry.parallel_class(d)?;
        for (i, a) in lines.iter().enumerate() {
            for b in &lines[i + 1..] {
                let pts = a.points().iter().chain(b.points()).copied().collect();
                keys.insert(canonical_rep(geometry, &Block::new(pts)?));
            }
        }
    }
    keys.iter()
        .map(|b| {
            debug_assert!(check_two_parallel_line_structure(b, geometry)
                .ok()
                .flatten()
                .is_some());
            OrbitRep::new(geometry, b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{check_simple, pair_counts, pair_coverage};

    fn g() -> Geometry {
        Geometry::z3_4()
    }

    fn pt(c: [u32; 4]) -> Point {
        g().encode(&c).unwrap()
    }

    fn blk(pts: &[[u32; 4]]) -> Block {
        Block::new(pts.iter().map(|&c| pt(c)).collect()).unwrap()
    }

    #[test]
    fn base_block_examples() {
        let g = g();
        let b = make_base_block(&g, pt([0, 0, 0, 1]), pt([0, 1, 0, 0])).unwrap();
        assert_eq!(
            b,
            blk(&[
                [0, 0, 0, 0],
                [0, 0, 0, 1],
                [0, 0, 0, 2],
                [0, 1, 0, 0],
                [0, 1, 0, 1],
                [0, 1, 0, 2]
            ])
        );
        let b = make_base_block(&g, pt([0, 0, 1, 1]), pt([2, 1, 0, 0])).unwrap();
        assert_eq!(
            b,
            blk(&[
                [0, 0, 0, 0],
                [0, 0, 1, 1],
                [0, 0, 2, 2],
                [2, 1, 0, 0],
                [2, 1, 1, 1],
                [2, 1, 2, 2]
            ])
        );
        let b = make_base_block(&g, pt([1, 0, 0, 0]), pt([0, 2, 2, 1])).unwrap();
        assert_eq!(
            b,
            blk(&[
                [0, 0, 0, 0],
                [1, 0, 0, 0],
                [2, 0, 0, 0],
                [0, 2, 2, 1],
                [1, 2, 2, 1],
                [2, 2, 2, 1]
            ])
        );
    }

    #[test]
    fn base_block_domain() {
        let g = g();
        let x = pt([1, 2, 0, 0]);
        assert_eq!(
            make_base_block(&g, Point::ZERO, x),
            Err(Error::ZeroDirection)
        );
        assert_eq!(
            make_base_block(&g, x, Point::ZERO),
            Err(Error::DegenerateBaseBlock)
        );
        assert_eq!(make_base_block(&g, x, x), Err(Error::DegenerateBaseBlock));
        assert_eq!(
            make_base_block(&g, x, g.scale(2, x)),
            Err(Error::DegenerateBaseBlock)
        );
    }

    #[test]
    fn stabilizer_and_orbit_of_first_block() {
        let g = g();
        let b = make_base_block(&g, pt([0, 0, 0, 1]), pt([0, 1, 0, 0])).unwrap();
        assert_eq!(
            translation_stabilizer(&g, &b),
            vec![pt([0, 0, 0, 0]), pt([0, 0, 0, 1]), pt([0, 0, 0, 2])]
        );
        assert_eq!(orbit(&g, &b).len(), 27);
    }

    #[test]
    fn orbit_extremes() {
        let g = g();
        let all = Block::new(g.points().collect()).unwrap();
        assert_eq!(orbit(&g, &all).len(), 1);
        assert_eq!(translation_stabilizer(&g, &all).len(), 81);
        let single = Block::new(vec![Point::ZERO]).unwrap();
        assert_eq!(orbit(&g, &single).len(), 81);
        assert_eq!(translation_stabilizer(&g, &single), vec![Point::ZERO]);
    }

    #[test]
    fn generic_six_set_has_trivial_stabilizer() {
        let g = g();
        let b = blk(&[
            [0, 0, 0, 0],
            [0, 0, 0, 1],
            [0, 0, 1, 0],
            [0, 0, 1, 1],
            [0, 1, 0, 0],
            [1, 0, 0, 0],
        ]);
        assert_eq!(translation_stabilizer(&g, &b), vec![Point::ZERO]);
    }

    #[test]
    fn canonical_rep_constant_on_orbit() {
        let g = g();
        let b = make_base_block(&g, pt([0, 0, 0, 1]), pt([0, 1, 0, 0])).unwrap();
        let c = canonical_rep(&g, &b);
        for t in g.points() {
            assert_eq!(canonical_rep(&g, &b.translate(&g, t)), c);
        }
        assert_eq!(canonical_rep(&g, &c), c);
        assert_eq!(c, b);
    }

    #[test]
    fn canonical_rep_matches_full_scan() {
        let g = g();
        let b = blk(&[[2, 1, 0, 2], [1, 1, 1, 1], [0, 2, 0, 1], [2, 2, 2, 2]]);
        let full = g.points().map(|t| b.translate(&g, t)).min().unwrap();
        assert_eq!(canonical_rep(&g, &b), full);
    }

    // Oracle: count ordered pairs directly on coordinate tuples.
    fn brute_differences(block: &[[u32; 4]]) -> std::collections::BTreeMap<[u32; 4], u32> {
        let mut m = std::collections::BTreeMap::new();
        for a in block {
            for b in block {
                if a != b {
                    let d = [0, 1, 2, 3].map(|i| (b[i] + 3 - a[i]) % 3);
                    *m.entry(d).or_insert(0) += 1;
                }
            }
        }
        m
    }

    #[test]
    fn difference_vector_of_first_block() {
        let g = g();
        let coords = [
            [0, 0, 0, 0],
            [0, 0, 0, 1],
            [0, 0, 0, 2],
            [0, 1, 0, 0],
            [0, 1, 0, 1],
            [0, 1, 0, 2],
        ];
        let oracle = brute_differences(&coords);
        // 6 at ±x, 3 at each of ±y, ±(x+y), ±(2x+y)
        let mut values: Vec<u32> = oracle.values().copied().collect();
        values.sort();
        assert_eq!(values, vec![3, 3, 3, 3, 3, 3, 6, 6]);
        assert_eq!(oracle[&[0, 0, 0, 1]], 6);
        assert_eq!(oracle[&[0, 0, 0, 2]], 6);
        assert_eq!(oracle[&[0, 1, 0, 0]], 3);

        let dv = difference_vector(&g, &blk(&coords));
        assert_eq!(dv.support().len(), oracle.len());
        for (d, n) in &oracle {
            assert_eq!(dv.get(pt(*d)), *n);
        }
        assert_eq!(dv.total(), 30);
    }

    #[test]
    fn family_rejects_duplicates_and_mixed_sizes() {
        let g = g();
        let b = make_base_block(&g, pt([0, 0, 0, 1]), pt([0, 1, 0, 0])).unwrap();
        let shifted = b.translate(&g, pt([1, 1, 1, 1]));
        assert_eq!(
            Family::from_blocks(g, &[b.clone(), shifted]),
            Err(Error::DuplicateOrbit)
        );
        let small = Block::new(vec![Point(0), Point(1)]).unwrap();
        assert!(matches!(
            Family::from_blocks(g, &[b, small]),
            Err(Error::WrongBlockSize { .. })
        ));
    }

    #[test]
    fn develop_single_and_empty() {
        let g = g();
        let b = make_base_block(&g, pt([1, 1, 0, 1]), pt([0, 2, 2, 0])).unwrap();
        let fam = Family::from_blocks(g, &[b]).unwrap();
        let d = develop(&fam);
        assert_eq!(d.len(), 27);
        assert!(check_simple(&d).is_simple());
        let hist = pair_coverage(&d).histogram;
        assert!(hist.keys().all(|c| *c <= 2));
        // 81 unordered pairs per class {d, −d}: one class at 2, three at 1
        assert_eq!(hist.get(&2), Some(&81));
        assert_eq!(hist.get(&1), Some(&(81 * 3)));

        let empty = develop(&Family::new(g, vec![]).unwrap());
        assert!(empty.is_empty());
        assert_eq!(empty.k(), 6);
    }

    #[test]
    fn coverage_law_on_single_orbit() {
        let g = g();
        let b = make_base_block(&g, pt([0, 1, 2, 1]), pt([1, 0, 0, 2])).unwrap();
        let fam = Family::from_blocks(g, &[b]).unwrap();
        let predicted = difference_coverage(&g, fam.reps());
        let counts = pair_counts(&develop(&fam));
        for u in g.points() {
            for d in g.nonzero_points() {
                assert_eq!(counts.get(u, g.add(u, d)), predicted[d.0 as usize - 1]);
            }
        }
    }

    #[test]
    fn candidate_census_small() {
        let g2 = Geometry::new(3, 2).unwrap();
        let c = enumerate_candidate_orbits(&g2).unwrap();
        assert_eq!(c.len(), 4);
        // each is the plane minus one line
        for r in &c {
            assert_eq!(r.orbit_size(&g2), 3);
        }
        assert_eq!(
            enumerate_candidate_orbits(&Geometry::new(5, 2).unwrap()),
            Err(Error::UnsupportedModulus(5))
        );
    }
}
