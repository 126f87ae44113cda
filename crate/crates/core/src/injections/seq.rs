use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{rational_to_f64, serde_rational, Rational};

/// How stored coefficients map to coordinates: `Unit` stores the coordinate
/// itself, `Dyadic { p }` stores `c` for the coordinate `c * 2^(-n/p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Unit,
    Dyadic {
        #[serde(with = "serde_rational")]
        p: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeqEntry {
    pub index: u64,
    #[serde(with = "serde_rational")]
    pub coef: Rational,
}

/// Every index `>= start` carries `coef`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tail {
    pub start: u64,
    #[serde(with = "serde_rational")]
    pub coef: Rational,
}

#[derive(Deserialize)]
struct RawSeq {
    scale: Scale,
    #[serde(default)]
    entries: Vec<SeqEntry>,
    #[serde(default)]
    tail: Option<Tail>,
}

/// A real sequence indexed from 1: finitely many explicit coordinates plus
/// an optional constant tail (in coefficient space).
///
/// The representation is canonical (explicit entries are nonzero, strictly
/// increasing and below the tail, and the tail starts as early as possible),
/// so structural equality is equality of sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSeq")]
pub struct SeqVector {
    pub scale: Scale,
    entries: Vec<SeqEntry>,
    tail: Option<Tail>,
}

impl TryFrom<RawSeq> for SeqVector {
    type Error = Error;

    fn try_from(raw: RawSeq) -> Result<Self> {
        Self::new(
            raw.scale,
            raw.entries.into_iter().map(|e| (e.index, e.coef)).collect(),
            raw.tail.map(|t| (t.start, t.coef)),
        )
    }
}

impl SeqVector {
    pub fn new(
        scale: Scale,
        entries: Vec<(u64, Rational)>,
        tail: Option<(u64, Rational)>,
    ) -> Result<Self> {
        if let Scale::Dyadic { p } = &scale {
            if !p.is_positive() {
                return Err(Error::InvalidExponent {
                    name: "p",
                    value: p.to_string(),
                    range: "(0, inf)",
                });
            }
        }
        let mut prev = 0u64;
        for (i, _) in &entries {
            if *i <= prev {
                return Err(Error::InvalidArgument(
                    "sequence indices must start at 1 and strictly increase".into(),
                ));
            }
            prev = *i;
        }
        let mut tail = match tail {
            Some((start, coef)) if !coef.is_zero() => {
                if start == 0 || start <= prev {
                    return Err(Error::InvalidArgument(
                        "the tail must start after every explicit entry".into(),
                    ));
                }
                Some(Tail { start, coef })
            }
            _ => None,
        };
        let mut entries: Vec<SeqEntry> = entries
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(index, coef)| SeqEntry { index, coef })
            .collect();
        if let Some(t) = tail.as_mut() {
            while let Some(last) = entries.last() {
                if last.index + 1 == t.start && last.coef == t.coef {
                    t.start -= 1;
                    entries.pop();
                } else {
                    break;
                }
            }
        }
        Ok(Self {
            scale,
            entries,
            tail,
        })
    }

    pub fn zero(scale: Scale) -> Self {
        Self {
            scale,
            entries: Vec::new(),
            tail: None,
        }
    }

    /// A finitely supported unit-scale vector.
    pub fn finite(entries: Vec<(u64, Rational)>) -> Result<Self> {
        Self::new(Scale::Unit, entries, None)
    }

    pub fn entries(&self) -> &[SeqEntry] {
        &self.entries
    }

    pub fn tail(&self) -> Option<&Tail> {
        self.tail.as_ref()
    }

    /// Coefficient at index `n >= 1`.
    pub fn coef(&self, n: u64) -> Rational {
        if let Some(t) = &self.tail {
            if n >= t.start {
                return t.coef.clone();
            }
        }
        self.entries
            .binary_search_by_key(&n, |e| e.index)
            .map(|i| self.entries[i].coef.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// Coordinate at index `n`, as a float.
    pub fn value(&self, n: u64) -> f64 {
        rational_to_f64(&self.coef(n)) * weight(&self.scale, n, 1.0)
    }

    /// First index from which both vectors are constant in coefficient space.
    fn horizon(&self, other: &Self) -> u64 {
        let end = |v: &Self| {
            let last = v.entries.last().map_or(1, |e| e.index + 1);
            v.tail.as_ref().map_or(last, |t| t.start.max(last))
        };
        end(self).max(end(other))
    }

    fn same_scale(&self, other: &Self) -> Result<()> {
        if self.scale != other.scale {
            return Err(Error::InvalidArgument(
                "sequences with different scales cannot be compared".into(),
            ));
        }
        Ok(())
    }

    fn indices_below<'a>(&'a self, other: &'a Self, horizon: u64) -> Vec<u64> {
        let mut idx: Vec<u64> = self
            .entries
            .iter()
            .chain(&other.entries)
            .map(|e| e.index)
            .chain(
                [&self.tail, &other.tail]
                    .into_iter()
                    .flatten()
                    .flat_map(|t| t.start..horizon),
            )
            .filter(|&i| i < horizon)
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }
}

/// `2^(-n q / p)` for a dyadic scale with parameter `p`, where `q` is the
/// power the coordinate is raised to; 1 for unit scale.
fn weight(scale: &Scale, n: u64, q: f64) -> f64 {
    match scale {
        Scale::Unit => 1.0,
        Scale::Dyadic { p } => (-(n as f64) * q / rational_to_f64(p)).exp2(),
    }
}

/// `|d| / (1 + |d|)`.
fn saturate(d: &Rational) -> Rational {
    let d = d.abs();
    &d / (Rational::one() + &d)
}

/// The F-norm distance `sum 2^-n |a_n - b_n| / (1 + |a_n - b_n|)`, exactly,
/// for unit-scale vectors.
pub fn ell0_distance_exact(a: &SeqVector, b: &SeqVector) -> Result<Rational> {
    a.same_scale(b)?;
    if a.scale != Scale::Unit {
        return Err(Error::InvalidArgument(
            "exact F-norm needs unit-scale vectors".into(),
        ));
    }
    let horizon = a.horizon(b);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut sum = Rational::zero();
    for n in a.indices_below(b, horizon) {
        sum += saturate(&(a.coef(n) - b.coef(n))) * num_traits::Pow::pow(&half, n);
    }
    // The tail differs by a constant: sum over n >= horizon of 2^-n is 2^(1-horizon).
    let tail = saturate(&(a.coef(horizon) - b.coef(horizon)));
    sum += tail * num_traits::Pow::pow(&half, horizon - 1);
    Ok(sum)
}

/// The F-norm distance as a float, for any common scale.
pub fn ell0_distance(a: &SeqVector, b: &SeqVector) -> Result<f64> {
    a.same_scale(b)?;
    if a.scale == Scale::Unit {
        return Ok(rational_to_f64(&ell0_distance_exact(a, b)?));
    }
    let horizon = a.horizon(b);
    let term = |n: u64| {
        let d = (a.value(n) - b.value(n)).abs();
        (-(n as f64)).exp2() * d / (1.0 + d)
    };
    let head: f64 = a.indices_below(b, horizon).into_iter().map(term).sum();
    // Beyond the horizon the terms fall at least as fast as 2^-n.
    let tail: f64 = (horizon..horizon + 80).map(term).sum();
    Ok(head + tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EllpConvention {
    /// `(sum |d|^p)^(1/p)`, for `p >= 1`.
    Norm,
    /// `sum |d|^p`, the usual metric for `0 < p < 1`.
    PowerSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllpDistance {
    pub value: f64,
    /// `sum |a_n - b_n|^p`.
    pub power_sum: f64,
    pub convention: EllpConvention,
}

/// Distance in `l_p`; infinite when the vectors differ by a non-summable tail.
pub fn ellp_distance(a: &SeqVector, b: &SeqVector, p: &Rational) -> Result<EllpDistance> {
    if !p.is_positive() {
        return Err(Error::InvalidExponent {
            name: "p",
            value: p.to_string(),
            range: "(0, inf)",
        });
    }
    a.same_scale(b)?;
    let pf = rational_to_f64(p);
    let horizon = a.horizon(b);
    let term = |n: u64| {
        let d = rational_to_f64(&(a.coef(n) - b.coef(n)).abs());
        if d == 0.0 {
            0.0
        } else {
            d.powf(pf) * weight(&a.scale, n, pf)
        }
    };
    let head: f64 = a.indices_below(b, horizon).into_iter().map(term).sum();
    let tail_diff = rational_to_f64(&(a.coef(horizon) - b.coef(horizon)).abs());
    let tail = if tail_diff == 0.0 {
        0.0
    } else {
        match &a.scale {
            Scale::Unit => f64::INFINITY,
            Scale::Dyadic { p: q } => {
                let r = pf / rational_to_f64(q);
                tail_diff.powf(pf) * (-(horizon as f64) * r).exp2() / (1.0 - (-r).exp2())
            }
        }
    };
    let power_sum = head + tail;
    let convention = if pf >= 1.0 {
        EllpConvention::Norm
    } else {
        EllpConvention::PowerSum
    };
    let value = match convention {
        EllpConvention::Norm => power_sum.powf(1.0 / pf),
        EllpConvention::PowerSum => power_sum,
    };
    Ok(EllpDistance {
        value,
        power_sum,
        convention,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integer, rational};

    fn unit(entries: &[(u64, i64)]) -> SeqVector {
        SeqVector::finite(entries.iter().map(|&(i, v)| (i, integer(v))).collect()).unwrap()
    }

    #[test]
    fn ell0_examples() {
        let zero = SeqVector::zero(Scale::Unit);
        assert_eq!(ell0_distance_exact(&zero, &zero).unwrap(), integer(0));
        assert_eq!(
            ell0_distance_exact(&unit(&[(1, 1)]), &zero).unwrap(),
            rational(1, 4)
        );
        assert_eq!(
            ell0_distance_exact(&unit(&[(2, 3)]), &unit(&[(2, 1)])).unwrap(),
            rational(1, 6)
        );
    }

    #[test]
    fn ellp_examples() {
        let zero = SeqVector::zero(Scale::Unit);
        let d = ellp_distance(&unit(&[(1, 3), (2, 4)]), &zero, &integer(2)).unwrap();
        assert!((d.value - 5.0).abs() < 1e-15);
        let d = ellp_distance(&unit(&[(1, 1)]), &zero, &rational(1, 2)).unwrap();
        assert_eq!((d.value, d.convention), (1.0, EllpConvention::PowerSum));
        assert!(ellp_distance(&zero, &zero, &integer(0)).is_err());
    }

    #[test]
    fn tails() {
        let a = SeqVector::new(Scale::Unit, vec![], Some((3, integer(2)))).unwrap();
        let b = SeqVector::new(Scale::Unit, vec![], Some((3, integer(1)))).unwrap();
        // Indices 3, 4, ... each contribute 2^-n * 1/2.
        assert_eq!(ell0_distance_exact(&a, &b).unwrap(), rational(1, 8));
        assert!(ellp_distance(&a, &b, &integer(1))
            .unwrap()
            .value
            .is_infinite());

        let q = integer(2);
        let s = Scale::Dyadic { p: q.clone() };
        let x = SeqVector::new(s.clone(), vec![], Some((1, rational(1, 2)))).unwrap();
        let y = SeqVector::zero(s);
        // sum over n >= 1 of 2^-n / 4.
        let d = ellp_distance(&x, &y, &q).unwrap();
        assert!((d.power_sum - 0.25).abs() < 1e-15);
        let brute: f64 = (1..200)
            .map(|n| (x.value(n) - y.value(n)).abs().powi(2))
            .sum();
        assert!((d.power_sum - brute).abs() < 1e-15);
        let f0 = ell0_distance(&x, &y).unwrap();
        let brute0: f64 = (1..200)
            .map(|n| {
                let d = x.value(n);
                (-(n as f64)).exp2() * d / (1.0 + d)
            })
            .sum();
        assert!((f0 - brute0).abs() < 1e-15);
    }

    #[test]
    fn canonical_form() {
        let a = SeqVector::new(
            Scale::Unit,
            vec![(1, integer(5)), (2, integer(7))],
            Some((3, integer(7))),
        )
        .unwrap();
        let b = SeqVector::new(Scale::Unit, vec![(1, integer(5))], Some((2, integer(7)))).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tail().unwrap().start, 2);
        assert!(SeqVector::finite(vec![(2, integer(1)), (2, integer(3))]).is_err());
        assert!(SeqVector::finite(vec![(0, integer(1))]).is_err());
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<SeqVector>(&text).unwrap(), a);
    }
}
