//! Word metrics on `Z^C`: the standard basis, the split block generators
//! (every nonzero vector with entries in `{0, ±1}` or in `{0, ±J}`) and the
//! mixed block generators (entries in `{0, ±1, ±J}`).
//!
//! The generators commute, so a word is a multiset of generators. For the
//! split set, `a` jump steps move each coordinate by `J α_i` with any
//! `|α_i| <= a`, and `b` unit steps by any integer in `[-b, b]`; hence
//! `|w| = min over a of a + max_i min_{|α| <= a} |w_i - J α|`. In the mixed
//! set coordinates move independently, so
//! `|w| = max_i min_a |a| + |w_i - J a|`. A plain breadth-first search is
//! kept as an independent check for small `C`.
//!
//! With `J = N - 1`, `N = n^n`, a mixed word of length `k` moves every
//! coordinate at most `k` steps around the cycle of `N` points and the bound
//! is attained, so the integer points of `M_n` sit isometrically in the mixed
//! Cayley graph. The split set does not do this: `(3, 1, 0, 0)` has cyclic
//! length 1 for `N = 4` and word length 2.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Distance, DistanceOracle};
use crate::numeric::{Numerics, Rational};
use crate::roundness::{simplex_gap, DoubleSimplex, GapResult};

/// Largest dimension for which generators are listed explicitly.
pub const BFS_DIM_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSet {
    /// `±e_i`.
    Standard { dim: usize },
    /// Nonzero vectors with entries in `{0, ±1}` or in `{0, ±jump}`.
    Block { dim: usize, jump: i64 },
    /// Nonzero vectors with entries in `{0, ±1, ±jump}`.
    Mixed { dim: usize, jump: i64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Each generator is all units or all jumps.
    #[default]
    Split,
    Mixed,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split" => Ok(Family::Split),
            "mixed" => Ok(Family::Mixed),
            _ => Err(Error::InvalidArgument(format!(
                "unknown generator family {s:?}"
            ))),
        }
    }
}

impl GeneratorSet {
    pub fn block(family: Family, dim: usize, jump: i64) -> Result<Self> {
        if dim == 0 || jump < 1 {
            return Err(Error::InvalidArgument(format!(
                "block generators need dim >= 1 and jump >= 1 (got {dim}, {jump})"
            )));
        }
        Ok(match family {
            Family::Split => GeneratorSet::Block { dim, jump },
            Family::Mixed => GeneratorSet::Mixed { dim, jump },
        })
    }

    pub fn dim(&self) -> usize {
        match *self {
            GeneratorSet::Standard { dim }
            | GeneratorSet::Block { dim, .. }
            | GeneratorSet::Mixed { dim, .. } => dim,
        }
    }

    pub fn is_generator(&self, v: &[i64]) -> bool {
        if v.len() != self.dim() || v.iter().all(|&x| x == 0) {
            return false;
        }
        match *self {
            GeneratorSet::Standard { .. } => v.iter().map(|x| x.abs()).sum::<i64>() == 1,
            GeneratorSet::Block { jump, .. } => {
                v.iter().all(|x| x.abs() <= 1) || v.iter().all(|&x| x == 0 || x.abs() == jump)
            }
            GeneratorSet::Mixed { jump, .. } => v.iter().all(|&x| x.abs() <= 1 || x.abs() == jump),
        }
    }

    /// Every generator, for small dimensions.
    pub fn list(&self) -> Result<Vec<Vec<i64>>> {
        let dim = self.dim();
        if dim > BFS_DIM_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "listing generators in dimension {dim} is not supported"
            )));
        }
        let product = |values: Vec<i64>| -> Vec<Vec<i64>> {
            let mut out = vec![vec![]];
            for _ in 0..dim {
                out = out
                    .into_iter()
                    .flat_map(|v| {
                        values.iter().map(move |&s| {
                            let mut w: Vec<i64> = v.clone();
                            w.push(s);
                            w
                        })
                    })
                    .collect();
            }
            out.retain(|v| v.iter().any(|&x| x != 0));
            out
        };
        let mut gens = match *self {
            GeneratorSet::Standard { .. } => (0..dim)
                .flat_map(|i| {
                    [-1, 1].into_iter().map(move |s| {
                        let mut v = vec![0; dim];
                        v[i] = s;
                        v
                    })
                })
                .collect(),
            GeneratorSet::Block { jump, .. } => {
                let mut g = product(vec![-1, 0, 1]);
                if jump != 1 {
                    g.extend(product(vec![-jump, 0, jump]));
                }
                g
            }
            GeneratorSet::Mixed { jump, .. } => {
                let mut values = vec![-jump, -1, 0, 1, jump];
                values.sort();
                values.dedup();
                product(values)
            }
        };
        gens.sort();
        Ok(gens)
    }

    /// Word length of `w`.
    pub fn word_length(&self, w: &[i64]) -> u64 {
        match *self {
            GeneratorSet::Standard { .. } => w.iter().map(|x| x.unsigned_abs()).sum(),
            GeneratorSet::Block { jump, .. } => {
                let top = w.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
                let j = jump as u64;
                let a_max = top / j + 1;
                (0..=a_max)
                    .map(|a| a + w.iter().map(|&x| residual(x, jump, a)).max().unwrap_or(0))
                    .min()
                    .unwrap_or(0)
            }
            GeneratorSet::Mixed { jump, .. } => w
                .iter()
                .map(|&x| {
                    let q = x.div_euclid(jump);
                    [q, q + 1]
                        .into_iter()
                        .map(|a| a.unsigned_abs() + (x - jump * a).unsigned_abs())
                        .min()
                        .unwrap_or(0)
                })
                .max()
                .unwrap_or(0),
        }
    }
}

/// `min over |α| <= a of |x - J α|`.
fn residual(x: i64, jump: i64, a: u64) -> u64 {
    let a = a.min(i64::MAX as u64) as i64;
    let q = x.div_euclid(jump);
    [q, q + 1]
        .into_iter()
        .map(|alpha| alpha.clamp(-a, a))
        .map(|alpha| (x - jump * alpha).unsigned_abs())
        .min()
        .unwrap_or(x.unsigned_abs())
}

fn difference(u: &[i64], v: &[i64]) -> Result<Vec<i64>> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(v.iter().zip(u).map(|(a, b)| a - b).collect())
}

/// Word distance between `u` and `v`, or `CutoffExceeded` when it is larger
/// than `cutoff` (the error carries the exact value as its lower bound).
pub fn word_distance(u: &[i64], v: &[i64], gens: &GeneratorSet, cutoff: u64) -> Result<u64> {
    let w = difference(u, v)?;
    if w.len() != gens.dim() {
        return Err(Error::LengthMismatch {
            expected: gens.dim(),
            found: w.len(),
        });
    }
    let d = gens.word_length(&w);
    if d > cutoff {
        return Err(Error::CutoffExceeded {
            cutoff,
            lower_bound: d,
        });
    }
    Ok(d)
}

/// Bidirectional breadth-first search for the word length of `w`, up to
/// `cutoff`; `None` when it is larger.
pub fn bfs_word_length(gens: &[Vec<i64>], w: &[i64], cutoff: u64) -> Option<u64> {
    if w.iter().all(|&x| x == 0) {
        return Some(0);
    }
    let add = |a: &[i64], b: &[i64]| -> Vec<i64> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
    let mut seen = [HashMap::new(), HashMap::new()];
    let mut frontier = [vec![vec![0i64; w.len()]], vec![w.to_vec()]];
    seen[0].insert(frontier[0][0].clone(), 0u64);
    seen[1].insert(frontier[1][0].clone(), 0u64);
    let mut depth = [0u64, 0u64];
    while depth[0] + depth[1] < cutoff {
        let side = if frontier[0].len() <= frontier[1].len() {
            0
        } else {
            1
        };
        depth[side] += 1;
        let mut next = Vec::new();
        let mut best = None::<u64>;
        for p in &frontier[side] {
            for g in gens {
                let q = add(p, g);
                if seen[side].contains_key(&q) {
                    continue;
                }
                if let Some(&other) = seen[1 - side].get(&q) {
                    let total = depth[side] + other;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
                seen[side].insert(q.clone(), depth[side]);
                next.push(q);
            }
        }
        if best.is_some() {
            return best.filter(|&b| b <= cutoff);
        }
        if next.is_empty() {
            return None;
        }
        frontier[side] = next;
    }
    None
}

/// All points within `radius` of the origin, with their distances.
pub fn bfs_ball(gens: &[Vec<i64>], dim: usize, radius: u64) -> HashMap<Vec<i64>, u64> {
    let mut dist = HashMap::new();
    let origin = vec![0i64; dim];
    dist.insert(origin.clone(), 0);
    let mut frontier = vec![origin];
    for d in 1..=radius {
        let mut next = Vec::new();
        for p in &frontier {
            for g in gens {
                let q: Vec<i64> = p.iter().zip(g).map(|(x, y)| x + y).collect();
                if !dist.contains_key(&q) {
                    dist.insert(q.clone(), d);
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// `Z^C` with a word metric, as a distance oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordMetric {
    pub gens: GeneratorSet,
}

impl DistanceOracle for WordMetric {
    type Point = Vec<i64>;

    fn distance(&self, a: &Vec<i64>, b: &Vec<i64>) -> Distance {
        let w: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        Distance::Exact(Rational::from_integer(BigInt::from(
            self.gens.word_length(&w),
        )))
    }

    fn triangle_guaranteed(&self) -> bool {
        true
    }
}

/// `M_n*` as integer vectors in `{1..N}^C`, `N = C = n^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MStar {
    pub n: u32,
    pub cycle: i64,
    pub dim: usize,
}

impl MStar {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidBlock(n));
        }
        let nn = (n as i64)
            .checked_pow(n)
            .filter(|&v| v <= 1 << 20)
            .ok_or(Error::BlockTooLarge { block: n })?;
        Ok(Self {
            n,
            cycle: nn,
            dim: nn as usize,
        })
    }

    pub fn generators(&self, family: Family) -> GeneratorSet {
        match family {
            Family::Split => GeneratorSet::Block {
                dim: self.dim,
                jump: self.cycle - 1,
            },
            Family::Mixed => GeneratorSet::Mixed {
                dim: self.dim,
                jump: self.cycle - 1,
            },
        }
    }

    /// Sup over coordinates of the cyclic distance on `N` points.
    pub fn distance(&self, u: &[i64], v: &[i64]) -> u64 {
        u.iter()
            .zip(v)
            .map(|(a, b)| {
                let d = (a - b).unsigned_abs();
                d.min(self.cycle as u64 - d)
            })
            .max()
            .unwrap_or(0)
    }

    fn decode(&self, mut index: u64) -> Vec<i64> {
        let mut v = vec![0i64; self.dim];
        for slot in v.iter_mut().rev() {
            *slot = (index % self.cycle as u64) as i64 + 1;
            index /= self.cycle as u64;
        }
        v
    }

    pub fn point_count(&self) -> Option<u64> {
        (self.cycle as u64).checked_pow(self.dim as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled { budget: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// The closed-form word length.
    Formula,
    /// Breadth-first search over the listed generators.
    Bfs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub u: Vec<i64>,
    pub v: Vec<i64>,
    pub cyclic: u64,
    /// `None` when the word distance exceeds the cutoff.
    pub word: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub space: MStar,
    pub family: Family,
    pub generators: GeneratorSet,
    pub mode: CheckMode,
    pub solver: Solver,
    pub cutoff: u64,
    pub pairs_checked: u64,
    pub mismatch_count: u64,
    /// The first mismatches, at most 100.
    pub mismatches: Vec<Mismatch>,
    pub max_distance: u64,
    pub holds: bool,
}

const SAMPLE_CHUNK: u64 = 256;

/// Compares the word distance (cutoff `N/2`) with the cyclic sup distance on
/// pairs of `M_n*`.
pub fn verify_mstar_isometry(
    n: u32,
    family: Family,
    mode: CheckMode,
    solver: Solver,
) -> Result<IsometryReport> {
    let space = MStar::new(n)?;
    let gens = space.generators(family);
    let cutoff = (space.cycle / 2) as u64;
    let listed = match solver {
        Solver::Bfs => Some(gens.list()?),
        Solver::Formula => None,
    };
    let check = |u: &[i64], v: &[i64]| -> (u64, Option<Mismatch>) {
        let cyclic = space.distance(u, v);
        let w: Vec<i64> = v.iter().zip(u).map(|(a, b)| a - b).collect();
        let word = match &listed {
            Some(list) => bfs_word_length(list, &w, cutoff),
            None => Some(gens.word_length(&w)).filter(|&d| d <= cutoff),
        };
        let bad = (word != Some(cyclic)).then(|| Mismatch {
            u: u.to_vec(),
            v: v.to_vec(),
            cyclic,
            word,
        });
        (cyclic, bad)
    };
    type Partial = (u64, u64, Vec<Mismatch>, u64);
    let merge = |mut a: Partial, b: Partial| -> Partial {
        a.0 += b.0;
        a.1 += b.1;
        a.2.extend(b.2);
        a.2.truncate(100);
        a.3 = a.3.max(b.3);
        a
    };
    let (pairs, bad, mismatches, max_distance) = match mode {
        CheckMode::Exhaustive => {
            let points = space
                .point_count()
                .filter(|&p| p <= 1 << 12)
                .ok_or(Error::EnumerationUnavailable)?;
            (0..points)
                .into_par_iter()
                .map(|i| {
                    let u = space.decode(i);
                    let mut acc: Partial = (0, 0, Vec::new(), 0);
                    for j in i + 1..points {
                        let v = space.decode(j);
                        let (d, m) = check(&u, &v);
                        acc.0 += 1;
                        acc.3 = acc.3.max(d);
                        if let Some(m) = m {
                            acc.1 += 1;
                            acc.2.push(m);
                        }
                    }
                    acc
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold((0, 0, Vec::new(), 0), merge)
        }
        CheckMode::Sampled { budget, seed } => {
            let chunks = budget.div_ceil(SAMPLE_CHUNK);
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(c);
                    let mut acc: Partial = (0, 0, Vec::new(), 0);
                    for _ in c * SAMPLE_CHUNK..((c + 1) * SAMPLE_CHUNK).min(budget) {
                        let (u, v) = sample_pair(&space, &mut rng);
                        let (d, m) = check(&u, &v);
                        acc.0 += 1;
                        acc.3 = acc.3.max(d);
                        if let Some(m) = m {
                            acc.1 += 1;
                            acc.2.push(m);
                        }
                    }
                    acc
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold((0, 0, Vec::new(), 0), merge)
        }
    };
    Ok(IsometryReport {
        space,
        family,
        generators: gens,
        mode,
        solver,
        cutoff,
        pairs_checked: pairs,
        mismatch_count: bad,
        mismatches,
        max_distance,
        holds: bad == 0,
    })
}

/// Half the pairs are uniform; the other half perturb `u` coordinatewise by
/// at most a random radius, so that small distances are exercised too.
fn sample_pair(space: &MStar, rng: &mut ChaCha8Rng) -> (Vec<i64>, Vec<i64>) {
    let n = space.cycle;
    let u: Vec<i64> = (0..space.dim).map(|_| rng.gen_range(1..=n)).collect();
    let v = if rng.gen_bool(0.5) {
        (0..space.dim).map(|_| rng.gen_range(1..=n)).collect()
    } else {
        let r = rng.gen_range(0..=n / 2);
        u.iter()
            .map(|&x| (x - 1 + rng.gen_range(-r..=r)).rem_euclid(n) + 1)
            .collect()
    };
    (u, v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CayleyRoundnessReport {
    pub generators: GeneratorSet,
    pub g: Vec<i64>,
    pub h: Vec<i64>,
    /// `X = {0, g+h}`, `Y = {g, h}`.
    pub xs: Vec<Vec<i64>>,
    pub ys: Vec<Vec<i64>>,
    pub edge_lengths: [u64; 2],
    /// `d(x_i, y_j)` row by row.
    pub connecting_lengths: [[u64; 2]; 2],
    /// Least `p` at which the configuration is violated.
    pub critical_p: f64,
    pub witness: GapResult,
}

/// Upper bound on the roundness of a Cayley graph from generators `g`, `h`
/// with `g + h` and `g - h` not generators: the double simplex
/// `X = {0, g+h}`, `Y = {g, h}` has edges of length 2 and connecting lines of
/// length 1, so it is violated exactly when `2 * 2^p > 4`.
pub fn cayley_roundness_upper(
    gens: &GeneratorSet,
    g: &[i64],
    h: &[i64],
    witness_p: f64,
    numerics: &Numerics,
) -> Result<CayleyRoundnessReport> {
    let sum: Vec<i64> = g.iter().zip(h).map(|(a, b)| a + b).collect();
    let diff: Vec<i64> = g.iter().zip(h).map(|(a, b)| a - b).collect();
    if g.len() != gens.dim() || h.len() != gens.dim() {
        return Err(Error::LengthMismatch {
            expected: gens.dim(),
            found: g.len().max(h.len()),
        });
    }
    if !gens.is_generator(g) || !gens.is_generator(h) {
        return Err(Error::ProbePrecondition(
            "g and h must both be generators".into(),
        ));
    }
    if gens.is_generator(&sum) {
        return Err(Error::ProbePrecondition(format!(
            "g + h = {sum:?} is a generator"
        )));
    }
    if gens.is_generator(&diff) {
        return Err(Error::ProbePrecondition(format!(
            "g - h = {diff:?} is a generator"
        )));
    }
    let oracle = WordMetric { gens: *gens };
    let zero = vec![0i64; gens.dim()];
    let ds = DoubleSimplex::new(vec![zero, sum], vec![g.to_vec(), h.to_vec()])?;
    let len = |a: &Vec<i64>, b: &Vec<i64>| {
        let w: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        gens.word_length(&w)
    };
    let edge_lengths = [len(&ds.xs[0], &ds.xs[1]), len(&ds.ys[0], &ds.ys[1])];
    let connecting_lengths = [
        [len(&ds.xs[0], &ds.ys[0]), len(&ds.xs[0], &ds.ys[1])],
        [len(&ds.xs[1], &ds.ys[0]), len(&ds.xs[1], &ds.ys[1])],
    ];
    let violated =
        |p: f64| -> Result<bool> { Ok(simplex_gap(&oracle, &ds, p, numerics)?.violated) };
    // The edge sum grows faster than the connecting sum, so the violated
    // exponents form a ray; bisect for its end point.
    let (mut lo, mut hi) = (0.0f64, 64.0f64);
    if violated(lo)? {
        hi = 0.0;
    } else if !violated(hi)? {
        lo = f64::INFINITY;
        hi = f64::INFINITY;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if violated(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let witness = simplex_gap(&oracle, &ds, witness_p, numerics)?;
    Ok(CayleyRoundnessReport {
        generators: *gens,
        g: g.to_vec(),
        h: h.to_vec(),
        xs: ds.xs.clone(),
        ys: ds.ys.clone(),
        edge_lengths,
        connecting_lengths,
        critical_p: hi,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub family: Family,
    pub dims: (usize, usize),
    pub jumps: (i64, i64),
    pub radius: u64,
    /// Points of the first block within `radius` in either graph.
    pub points_checked: u64,
    pub mismatch_count: u64,
    pub first_mismatch: Option<(Vec<i64>, u64, u64)>,
    pub holds: bool,
}

/// Two blocks side by side: unit generators span both, jump generators stay
/// in their block. Checks that word distances between points of the first
/// block are the same in the two-block graph as in the first block's own
/// graph, for every point within `radius` of the origin.
pub fn verify_block_projection(
    family: Family,
    dims: (usize, usize),
    jumps: (i64, i64),
    radius: u64,
) -> Result<ProjectionReport> {
    let (da, db) = dims;
    let dim = da + db;
    if dim > BFS_DIM_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is too large for search"
        )));
    }
    let own = GeneratorSet::block(family, da, jumps.0)?.list()?;
    let mut joint: HashSet<Vec<i64>> = GeneratorSet::block(Family::Split, dim, 1)?
        .list()?
        .into_iter()
        .collect();
    for (offset, d, j) in [(0, da, jumps.0), (da, db, jumps.1)] {
        for gen in GeneratorSet::block(family, d, j)?.list()? {
            if gen.iter().all(|x| x.abs() <= 1) {
                continue;
            }
            let mut v = vec![0i64; dim];
            v[offset..offset + d].copy_from_slice(&gen);
            joint.insert(v);
        }
    }
    let mut joint: Vec<Vec<i64>> = joint.into_iter().collect();
    joint.sort();
    let small = bfs_ball(&own, da, radius);
    let big = bfs_ball(&joint, dim, radius);
    let mut keys: HashSet<Vec<i64>> = small.keys().cloned().collect();
    keys.extend(
        big.keys()
            .filter(|v| v[da..].iter().all(|&x| x == 0))
            .map(|v| v[..da].to_vec()),
    );
    let mut keys: Vec<Vec<i64>> = keys.into_iter().collect();
    keys.sort();
    let mut mismatch_count = 0;
    let mut first_mismatch = None;
    for k in &keys {
        let mut padded = k.clone();
        padded.resize(dim, 0);
        let a = small.get(k).copied().unwrap_or(u64::MAX);
        let b = big.get(&padded).copied().unwrap_or(u64::MAX);
        if a != b {
            mismatch_count += 1;
            first_mismatch.get_or_insert((k.clone(), a, b));
        }
    }
    Ok(ProjectionReport {
        family,
        dims,
        jumps,
        radius,
        points_checked: keys.len() as u64,
        mismatch_count,
        first_mismatch,
        holds: mismatch_count == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_distance_examples() {
        for family in [Family::Split, Family::Mixed] {
            let gens = GeneratorSet::block(family, 4, 3).unwrap();
            let o = [0i64; 4];
            assert_eq!(word_distance(&o, &o, &gens, 10).unwrap(), 0);
            assert_eq!(word_distance(&o, &[1, -1, 1, 0], &gens, 10).unwrap(), 1);
            assert_eq!(word_distance(&o, &[3, 0, 0, 0], &gens, 10).unwrap(), 1);
            assert!(matches!(
                word_distance(&o, &[9, 0, 0, 0], &gens, 2),
                Err(Error::CutoffExceeded {
                    cutoff: 2,
                    lower_bound: 3
                })
            ));
        }
    }

    #[test]
    fn formula_matches_search() {
        for family in [Family::Split, Family::Mixed] {
            for (dim, jump) in [(2, 3), (3, 2), (3, 5), (2, 1)] {
                let gens = GeneratorSet::block(family, dim, jump).unwrap();
                let list = gens.list().unwrap();
                let ball = bfs_ball(&list, dim, 4);
                for (v, d) in &ball {
                    assert_eq!(gens.word_length(v), *d, "{family:?} {v:?}");
                    if *d <= 3 {
                        assert_eq!(bfs_word_length(&list, v, 4), Some(*d));
                    }
                }
            }
        }
    }

    #[test]
    fn generator_counts() {
        assert_eq!(
            GeneratorSet::block(Family::Split, 4, 3)
                .unwrap()
                .list()
                .unwrap()
                .len(),
            160
        );
        assert_eq!(
            GeneratorSet::block(Family::Mixed, 4, 3)
                .unwrap()
                .list()
                .unwrap()
                .len(),
            624
        );
        assert_eq!(
            GeneratorSet::block(Family::Mixed, 2, 1)
                .unwrap()
                .list()
                .unwrap()
                .len(),
            8
        );
        assert_eq!(GeneratorSet::Standard { dim: 2 }.list().unwrap().len(), 4);
    }

    #[test]
    fn wraparound_pair() {
        let space = MStar::new(2).unwrap();
        let (u, v) = ([1, 1, 1, 1], [4, 1, 1, 1]);
        assert_eq!(space.distance(&u, &v), 1);
        for family in [Family::Split, Family::Mixed] {
            assert_eq!(
                word_distance(&u, &v, &space.generators(family), 2).unwrap(),
                1
            );
        }
    }

    #[test]
    fn split_set_misses_mixed_moves() {
        let space = MStar::new(2).unwrap();
        let (u, v) = ([1, 1, 1, 1], [4, 2, 1, 1]);
        assert_eq!(space.distance(&u, &v), 1);
        let split = space.generators(Family::Split);
        assert_eq!(word_distance(&u, &v, &split, 2).unwrap(), 2);
        let w = [3, 1, 0, 0];
        assert_eq!(bfs_word_length(&split.list().unwrap(), &w, 2), Some(2));
    }

    #[test]
    fn m2_exhaustive_both_solvers() {
        for solver in [Solver::Formula, Solver::Bfs] {
            let r = verify_mstar_isometry(2, Family::Mixed, CheckMode::Exhaustive, solver).unwrap();
            assert_eq!(
                (r.pairs_checked, r.mismatch_count, r.max_distance),
                (32640, 0, 2)
            );
            let r = verify_mstar_isometry(2, Family::Split, CheckMode::Exhaustive, solver).unwrap();
            assert_eq!(r.pairs_checked, 32640);
            assert!(!r.holds);
            assert!(r
                .mismatches
                .iter()
                .all(|m| m.word > Some(m.cyclic) || m.word.is_none()));
        }
    }

    #[test]
    fn square_lattice_is_critical_at_one() {
        let num = Numerics::default();
        let z2 = GeneratorSet::Standard { dim: 2 };
        let r = cayley_roundness_upper(&z2, &[1, 0], &[0, 1], 2.0, &num).unwrap();
        assert!((r.critical_p - 1.0).abs() < 1e-9);
        assert_eq!(
            (r.witness.lhs, r.witness.rhs, r.witness.gap),
            (8.0, 4.0, -4.0)
        );
        assert_eq!(r.edge_lengths, [2, 2]);
        assert_eq!(r.connecting_lengths, [[1, 1], [1, 1]]);
    }

    #[test]
    fn block_probe() {
        let num = Numerics::default();
        let gens = GeneratorSet::block(Family::Split, 4, 3).unwrap();
        assert!(matches!(
            cayley_roundness_upper(&gens, &[1, 0, 0, 0], &[0, 1, 0, 0], 2.0, &num),
            Err(Error::ProbePrecondition(_))
        ));
        let r = cayley_roundness_upper(&gens, &[1, 1, 1, 1], &[1, -1, 1, -1], 2.0, &num).unwrap();
        assert!((r.critical_p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn projection_small() {
        for family in [Family::Split, Family::Mixed] {
            let r = verify_block_projection(family, (2, 2), (3, 5), 2).unwrap();
            assert!(r.holds && r.points_checked > 0);
        }
    }
}
