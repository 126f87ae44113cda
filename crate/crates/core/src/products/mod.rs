//! Products of cycles under the supremum metric, pair classes and simplices.
//!
//! Distances are measured in integer quanta. The classical instance `M_n`
//! has `n^n` coordinates, `n^(2n)` units per cycle and a quantum of `n^(-n)`,
//! so a cycle has real circumference `n^n`.

mod counting;
mod isometry;
mod simplex;

pub use counting::{
    conn_incidences, count_incidences, count_pairs_closed, edge_incidences, enumerate_pairs,
    IncidenceCounts,
};
pub use isometry::{transport_pair, CoordMap, Isometry};
pub use simplex::{build_simplex, is_simplex, DoubleSimplex};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Distance, DistanceOracle};
use crate::numeric::{format_rational, serde_rational, Rational};

/// Points that may be listed through [`DistanceOracle::points`].
pub const ENUMERATION_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleSpace {
    pub units: u64,
    #[serde(with = "serde_rational")]
    pub quantum: Rational,
}

impl CycleSpace {
    pub fn new(units: u64, quantum: Rational) -> Result<Self> {
        if units == 0 || units % 2 != 0 {
            return Err(Error::InvalidCycle(format!(
                "unit count must be positive and even, got {units}"
            )));
        }
        if !quantum.is_positive() {
            return Err(Error::InvalidCycle(format!(
                "quantum must be positive, got {}",
                format_rational(&quantum)
            )));
        }
        Ok(Self { units, quantum })
    }

    pub fn half(&self) -> u64 {
        self.units / 2
    }
}

/// `min(|a-b|, U-|a-b|)` for residues in `0..U`.
pub fn cyclic_distance(units: u64, a: u64, b: u64) -> Result<u64> {
    for r in [a, b] {
        if r >= units {
            return Err(Error::ResidueOutOfRange { residue: r, units });
        }
    }
    Ok(cyclic_unchecked(units, a, b))
}

#[inline]
pub(crate) fn cyclic_unchecked(units: u64, a: u64, b: u64) -> u64 {
    let d = a.abs_diff(b);
    d.min(units - d)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CyclePoint {
    pub residues: Vec<u64>,
}

impl CyclePoint {
    pub fn new(residues: Vec<u64>) -> Self {
        Self { residues }
    }

    pub fn zero(coords: usize) -> Self {
        Self {
            residues: vec![0; coords],
        }
    }
}

impl From<Vec<u64>> for CyclePoint {
    fn from(residues: Vec<u64>) -> Self {
        Self { residues }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductCycleSpace {
    pub coords: usize,
    pub cycle: CycleSpace,
}

impl ProductCycleSpace {
    pub fn new(coords: usize, units: u64, quantum: Rational) -> Result<Self> {
        if coords == 0 {
            return Err(Error::InvalidCycle(
                "at least one coordinate is required".into(),
            ));
        }
        Ok(Self {
            coords,
            cycle: CycleSpace::new(units, quantum)?,
        })
    }

    /// A space measured directly in quanta (quantum 1).
    pub fn with_unit_quantum(coords: usize, units: u64) -> Result<Self> {
        Self::new(coords, units, Rational::one())
    }

    /// `M_n`: `n^n` coordinates, `n^(2n)` units, quantum `n^(-n)`.
    /// Residues are stored in `u64`, which limits `n` to 8.
    pub fn m_n(n: u32) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidBlock(n));
        }
        let nn = checked_pow(n as u64, n).ok_or(Error::BlockTooLarge { block: n })?;
        let units = checked_pow(nn, 2).ok_or(Error::BlockTooLarge { block: n })?;
        let coords = usize::try_from(nn).map_err(|_| Error::BlockTooLarge { block: n })?;
        Self::new(
            coords,
            units,
            Rational::new(BigInt::one(), BigInt::from(nn)),
        )
    }

    pub fn units(&self) -> u64 {
        self.cycle.units
    }

    pub fn half(&self) -> u64 {
        self.cycle.half()
    }

    pub fn check_point(&self, x: &CyclePoint) -> Result<()> {
        if x.residues.len() != self.coords {
            return Err(Error::LengthMismatch {
                expected: self.coords,
                found: x.residues.len(),
            });
        }
        if let Some(&r) = x.residues.iter().find(|&&r| r >= self.units()) {
            return Err(Error::ResidueOutOfRange {
                residue: r,
                units: self.units(),
            });
        }
        Ok(())
    }

    /// Supremum of per-coordinate cyclic distances, in quanta.
    pub fn sup_distance(&self, x: &CyclePoint, y: &CyclePoint) -> Result<u64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.sup_unchecked(&x.residues, &y.residues))
    }

    pub(crate) fn sup_unchecked(&self, x: &[u64], y: &[u64]) -> u64 {
        let u = self.units();
        x.iter()
            .zip(y)
            .map(|(&a, &b)| cyclic_unchecked(u, a, b))
            .max()
            .unwrap_or(0)
    }

    pub fn to_real(&self, quanta: u64) -> Rational {
        &self.cycle.quantum * Rational::from_integer(BigInt::from(quanta))
    }

    /// Number of points, if it fits in a `u64`.
    pub fn point_count(&self) -> Option<u64> {
        checked_pow(self.units(), u32::try_from(self.coords).ok()?)
    }

    /// Mixed-radix index with coordinate 0 most significant, so index order is
    /// lexicographic order of residue vectors.
    pub fn encode(&self, x: &[u64]) -> u64 {
        x.iter().fold(0u64, |acc, &r| acc * self.units() + r)
    }

    pub fn decode(&self, mut index: u64) -> Vec<u64> {
        let u = self.units();
        let mut out = vec![0; self.coords];
        for slot in out.iter_mut().rev() {
            *slot = index % u;
            index /= u;
        }
        out
    }

    /// Membership in a pair class: exactly `s` coordinates differ and each by
    /// exactly `delta` quanta.
    pub fn is_pair(&self, x: &CyclePoint, y: &CyclePoint, class: &PairClass) -> bool {
        if self.check_point(x).is_err() || self.check_point(y).is_err() {
            return false;
        }
        self.is_pair_unchecked(&x.residues, &y.residues, class)
    }

    pub(crate) fn is_pair_unchecked(&self, x: &[u64], y: &[u64], class: &PairClass) -> bool {
        let u = self.units();
        let mut differing = 0usize;
        for (&a, &b) in x.iter().zip(y) {
            if a != b {
                if cyclic_unchecked(u, a, b) != class.delta {
                    return false;
                }
                differing += 1;
                if differing > class.support {
                    return false;
                }
            }
        }
        differing == class.support
    }

    /// Every point `y` with `{x, y}` in the class, in lexicographic order.
    pub fn class_neighbors(&self, x: &[u64], class: &PairClass) -> Vec<Vec<u64>> {
        let u = self.units();
        let steps: Vec<u64> = if 2 * class.delta == u {
            vec![class.delta]
        } else {
            vec![class.delta, u - class.delta]
        };
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(class.support);
        combinations(self.coords, class.support, &mut chosen, &mut |coords| {
            let patterns = steps.len().pow(coords.len() as u32);
            for mut pattern in 0..patterns {
                let mut y = x.to_vec();
                for &c in coords {
                    y[c] = (x[c] + steps[pattern % steps.len()]) % u;
                    pattern /= steps.len();
                }
                out.push(y);
            }
        });
        out.sort();
        out
    }
}

fn combinations(n: usize, k: usize, chosen: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    let start = chosen.last().map_or(0, |&c| c + 1);
    let remaining = k - chosen.len();
    if start + remaining > n {
        return;
    }
    for c in start..=n - remaining {
        chosen.push(c);
        combinations(n, k, chosen, f);
        chosen.pop();
    }
}

pub(crate) fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

impl DistanceOracle for ProductCycleSpace {
    type Point = CyclePoint;

    fn distance(&self, a: &CyclePoint, b: &CyclePoint) -> Distance {
        Distance::Exact(self.to_real(self.sup_unchecked(&a.residues, &b.residues)))
    }

    fn points(&self) -> Option<Vec<CyclePoint>> {
        let count = self.point_count().filter(|&c| c <= ENUMERATION_LIMIT)?;
        Some(
            (0..count)
                .map(|i| CyclePoint::new(self.decode(i)))
                .collect(),
        )
    }

    fn triangle_guaranteed(&self) -> bool {
        true
    }
}

/// Pairs whose differing coordinates all sit at cyclic distance `delta`
/// (quanta) and that differ in exactly `support` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairClass {
    pub delta: u64,
    pub support: usize,
}

impl PairClass {
    pub fn new(space: &ProductCycleSpace, delta: u64, support: usize) -> Result<Self> {
        if delta == 0 || delta > space.half() {
            return Err(Error::InvalidPairClass(format!(
                "delta must lie in 1..={}, got {delta}",
                space.half()
            )));
        }
        if support == 0 || support > space.coords {
            return Err(Error::InvalidPairClass(format!(
                "support must lie in 1..={}, got {support}",
                space.coords
            )));
        }
        Ok(Self { delta, support })
    }
}

/// Simplices of size `r` whose connecting lines lie in `(delta, support*r)`
/// and whose edges lie in `(2*delta, support)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimplexClass {
    pub size: usize,
    pub delta: u64,
    pub support: usize,
}

impl SimplexClass {
    pub fn new(space: &ProductCycleSpace, size: usize, delta: u64, support: usize) -> Result<Self> {
        if size < 2 || size % 2 != 0 {
            return Err(Error::InvalidSimplexSize { size });
        }
        if support == 0 || support % 2 != 0 {
            return Err(Error::OddSupport { support });
        }
        if delta == 0 {
            return Err(Error::InvalidPairClass("delta must be positive".into()));
        }
        if 2 * delta > space.half() {
            return Err(Error::DeltaTooLarge {
                edge: 2 * delta,
                half: space.half(),
            });
        }
        let needed = support * size;
        if needed > space.coords {
            return Err(Error::InsufficientCoordinates {
                needed,
                available: space.coords,
            });
        }
        Ok(Self {
            size,
            delta,
            support,
        })
    }

    pub fn conn_class(&self) -> PairClass {
        PairClass {
            delta: self.delta,
            support: self.support * self.size,
        }
    }

    pub fn edge_class(&self) -> PairClass {
        PairClass {
            delta: 2 * self.delta,
            support: self.support,
        }
    }
}

/// `(n, t, m)` class parameters in `M_n`, converted to quanta.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NtmParams {
    pub n: u32,
    pub t: i32,
    pub m: u32,
    pub space: ProductCycleSpace,
    /// `2^t * n^n` quanta, i.e. a real distance of `2^t`.
    pub delta: u64,
    /// `n^m` coordinates.
    pub support: usize,
    pub warnings: Vec<String>,
}

impl NtmParams {
    pub fn new(n: u32, t: i32, m: u32) -> Result<Self> {
        let space = ProductCycleSpace::m_n(n)?;
        let nn = space.coords as u64;
        let delta_real = crate::numeric::pow2(t as i64);
        let quanta = &delta_real * Rational::from_integer(BigInt::from(nn));
        let delta = quanta
            .is_integer()
            .then(|| quanta.to_integer().to_u64())
            .flatten()
            .ok_or_else(|| {
                Error::InvalidPairClass(format!("2^{t} * {n}^{n} is not a whole number of quanta"))
            })?;
        let support = checked_pow(n as u64, m)
            .and_then(|s| usize::try_from(s).ok())
            .ok_or_else(|| Error::InvalidPairClass(format!("support {n}^{m} overflows")))?;
        let mut warnings = Vec::new();
        if m == 0 || m >= n {
            warnings.push(format!(
                "m = {m} lies outside the classical range 0 < m < {n}"
            ));
        }
        if t.unsigned_abs() >= n {
            warnings.push(format!(
                "t = {t} lies outside the classical range |t| < {n}"
            ));
        }
        Ok(Self {
            n,
            t,
            m,
            space,
            delta,
            support,
            warnings,
        })
    }

    pub fn pair_class(&self) -> Result<PairClass> {
        PairClass::new(&self.space, self.delta, self.support)
    }

    /// Simplex class of size `n` with these `(t, m)`.
    pub fn simplex_class(&self) -> Result<SimplexClass> {
        SimplexClass::new(&self.space, self.n as usize, self.delta, self.support)
    }

    pub fn delta_real(&self) -> Rational {
        self.space.to_real(self.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integer, rational};

    fn space(c: usize, u: u64) -> ProductCycleSpace {
        ProductCycleSpace::with_unit_quantum(c, u).unwrap()
    }

    #[test]
    fn cyclic_distance_examples() {
        assert_eq!(cyclic_distance(16, 5, 5).unwrap(), 0);
        assert_eq!(cyclic_distance(16, 1, 15).unwrap(), 2);
        assert_eq!(cyclic_distance(16, 1, 9).unwrap(), 8);
        assert!(matches!(
            cyclic_distance(16, 16, 0),
            Err(Error::ResidueOutOfRange { .. })
        ));
    }

    #[test]
    fn sup_distance_examples() {
        let s = space(4, 8);
        let x = CyclePoint::new(vec![0, 0, 0, 0]);
        let y = CyclePoint::new(vec![1, 7, 0, 4]);
        assert_eq!(s.sup_distance(&x, &y).unwrap(), 4);
        assert_eq!(s.sup_distance(&x, &x).unwrap(), 0);
        assert!(matches!(
            s.sup_distance(&x, &CyclePoint::new(vec![0, 0])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn pair_membership_examples() {
        let s = space(4, 8);
        let x = CyclePoint::new(vec![2, 0, 1, 1]);
        let y = CyclePoint::new(vec![0, 2, 1, 1]);
        let c22 = PairClass::new(&s, 2, 2).unwrap();
        let c12 = PairClass::new(&s, 1, 2).unwrap();
        assert!(s.is_pair(&x, &y, &c22));
        assert!(!s.is_pair(&x, &y, &c12));
        assert!(!s.is_pair(&x, &x, &c22));
    }

    #[test]
    fn class_invariants() {
        let s = space(4, 8);
        assert!(PairClass::new(&s, 5, 1).is_err());
        assert!(PairClass::new(&s, 1, 5).is_err());
        assert!(PairClass::new(&s, 4, 4).is_ok());
        assert!(matches!(
            SimplexClass::new(&s, 2, 1, 1),
            Err(Error::OddSupport { .. })
        ));
        assert!(matches!(
            SimplexClass::new(&s, 3, 1, 2),
            Err(Error::InvalidSimplexSize { .. })
        ));
        assert!(matches!(
            SimplexClass::new(&s, 2, 3, 2),
            Err(Error::DeltaTooLarge { .. })
        ));
        assert!(matches!(
            SimplexClass::new(&space(3, 8), 2, 1, 2),
            Err(Error::InsufficientCoordinates {
                needed: 4,
                available: 3
            })
        ));
    }

    #[test]
    fn neighbors_match_membership() {
        let s = space(3, 6);
        for delta in 1..=3 {
            for support in 1..=3 {
                let class = PairClass::new(&s, delta, support).unwrap();
                let x = vec![1, 4, 0];
                let nbrs = s.class_neighbors(&x, &class);
                let brute: Vec<Vec<u64>> = (0..216)
                    .map(|i| s.decode(i))
                    .filter(|y| s.is_pair_unchecked(&x, y, &class))
                    .collect();
                assert_eq!(nbrs, brute, "delta {delta} support {support}");
            }
        }
    }

    #[test]
    fn encode_is_lexicographic() {
        let s = space(3, 4);
        let mut prev = s.decode(0);
        for i in 1..64 {
            let cur = s.decode(i);
            assert!(prev < cur);
            assert_eq!(s.encode(&cur), i);
            prev = cur;
        }
    }

    #[test]
    fn ntm_instances_convert_units() {
        let m2 = ProductCycleSpace::m_n(2).unwrap();
        assert_eq!((m2.coords, m2.units()), (4, 16));
        assert_eq!(m2.cycle.quantum, rational(1, 4));
        let m4 = ProductCycleSpace::m_n(4).unwrap();
        assert_eq!((m4.coords, m4.units()), (256, 65536));
        assert_eq!(m4.to_real(m4.half()), integer(128));

        let p = NtmParams::new(4, 0, 1).unwrap();
        assert_eq!((p.delta, p.support), (256, 4));
        assert_eq!(p.delta_real(), integer(1));
        assert!(p.warnings.is_empty());
        let p = NtmParams::new(4, -3, 4).unwrap();
        assert_eq!(p.delta, 32);
        assert_eq!(p.delta_real(), rational(1, 8));
        assert_eq!(p.warnings.len(), 1);
        let p = NtmParams::new(2, 1, 1).unwrap();
        assert_eq!(p.delta_real(), integer(2));
        assert_eq!(p.delta, 8);
        assert!(ProductCycleSpace::m_n(3).is_err());
        assert!(ProductCycleSpace::m_n(10).is_err());
        assert_eq!(ProductCycleSpace::m_n(8).unwrap().units(), 1 << 48);
    }
}
