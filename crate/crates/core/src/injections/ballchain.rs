use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{serde_rational, Rational};

/// A nested chain of balls `B_1 ⊃ B_2 ⊃ ...` on the real line with
/// diameters `t_m`, and an allocator naming distinct points inside each ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BallChain {
    /// `B_m = (0, 1/m)`, with points `1/(m (j+2))`.
    Interval,
    /// The tail of `1/k`: `B_m` holds `1/k` for `k > 2m`, diameter at most `1/m`.
    Cauchy,
    /// Finitely many balls given as point lists; a ball holds exactly the
    /// listed points.
    Explicit {
        #[serde(with = "serde_rational::vec")]
        diameters: Vec<Rational>,
        #[serde(with = "serde_rational::matrix")]
        balls: Vec<Vec<Rational>>,
    },
}

impl BallChain {
    pub fn label(&self) -> &'static str {
        match self {
            BallChain::Interval => "interval",
            BallChain::Cauchy => "cauchy",
            BallChain::Explicit { .. } => "explicit",
        }
    }

    /// Checks the declared structure of an explicit chain: non-increasing
    /// diameters, distinct points, spread within the diameter, nesting.
    pub fn validate(&self) -> Result<()> {
        let BallChain::Explicit { diameters, balls } = self else {
            return Ok(());
        };
        if diameters.len() != balls.len() {
            return Err(Error::LengthMismatch {
                expected: diameters.len(),
                found: balls.len(),
            });
        }
        for m in 1..diameters.len() {
            if diameters[m] > diameters[m - 1] {
                return Err(Error::NonMonotoneDiameters { index: m + 1 });
            }
        }
        for (m, ball) in balls.iter().enumerate() {
            let mut sorted = ball.clone();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "ball {} repeats a point",
                    m + 1
                )));
            }
            if let (Some(lo), Some(hi)) = (sorted.first(), sorted.last()) {
                if hi - lo > diameters[m] {
                    return Err(Error::InvalidArgument(format!(
                        "ball {} is wider than its diameter",
                        m + 1
                    )));
                }
            }
            if m > 0 && !ball.iter().all(|x| balls[m - 1].contains(x)) {
                return Err(Error::InvalidArgument(format!(
                    "ball {} is not contained in ball {m}",
                    m + 1
                )));
            }
        }
        Ok(())
    }

    /// `t^h = min { m : t_m <= t }`, for `t > 0`;
    /// `None` when no ball of the chain is that small.
    pub fn level_for(&self, t: &Rational) -> Option<u64> {
        match self {
            // t_m = 1/m <= t  iff  m >= 1/t.
            BallChain::Interval | BallChain::Cauchy => {
                let m = t.recip().ceil().to_integer();
                Some(m.to_u64()?.max(1))
            }
            BallChain::Explicit { diameters, .. } => {
                diameters.iter().position(|d| d <= t).map(|i| i as u64 + 1)
            }
        }
    }

    pub fn diameter(&self, m: u64) -> Result<Rational> {
        match self {
            BallChain::Interval | BallChain::Cauchy => {
                Ok(Rational::new(BigInt::one(), BigInt::from(m)))
            }
            BallChain::Explicit { diameters, .. } => diameters
                .get((m - 1) as usize)
                .cloned()
                .ok_or(Error::Capacity {
                    ball: m as usize,
                    needed: 1,
                }),
        }
    }

    /// Number of points of `B_m`, `None` when infinite.
    pub fn capacity(&self, m: u64) -> Option<u64> {
        match self {
            BallChain::Interval | BallChain::Cauchy => None,
            BallChain::Explicit { balls, .. } => {
                Some(balls.get((m - 1) as usize).map_or(0, |b| b.len() as u64))
            }
        }
    }

    /// The `j`-th point of `B_m` (from 0), if the ball has that many.
    pub fn allocate(&self, m: u64, j: u64) -> Option<Rational> {
        let int = |v: u64| BigInt::from(v);
        match self {
            BallChain::Interval => Some(Rational::new(BigInt::one(), int(m) * int(j + 2))),
            BallChain::Cauchy => Some(Rational::new(BigInt::one(), int(2) * int(m) + int(1 + j))),
            BallChain::Explicit { balls, .. } => {
                balls.get((m - 1) as usize)?.get(j as usize).cloned()
            }
        }
    }
}

/// Whether `x` lies strictly inside the ball with the given index, for the
/// built-in chains.
pub fn inside(chain: &BallChain, m: u64, x: &Rational) -> bool {
    let bound = Rational::new(BigInt::one(), BigInt::from(m));
    match chain {
        BallChain::Interval => x.is_positive() && x < &bound,
        BallChain::Cauchy => {
            let half = &bound / BigInt::from(2);
            x.is_positive() && x < &half && x.numer().is_one()
        }
        BallChain::Explicit { balls, .. } => {
            balls.get((m - 1) as usize).is_some_and(|b| b.contains(x))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integer, rational};

    #[test]
    fn builtin_chains() {
        for chain in [BallChain::Interval, BallChain::Cauchy] {
            assert_eq!(chain.level_for(&rational(1, 3)).unwrap(), 3);
            assert_eq!(chain.level_for(&rational(2, 7)).unwrap(), 4);
            assert_eq!(chain.level_for(&integer(5)).unwrap(), 1);
            for m in 1..6 {
                for j in 0..6 {
                    assert!(inside(&chain, m, &chain.allocate(m, j).unwrap()));
                }
            }
        }
    }

    #[test]
    fn explicit_chain_checks() {
        let good = BallChain::Explicit {
            diameters: vec![integer(2), integer(1)],
            balls: vec![
                vec![integer(0), integer(1), integer(2)],
                vec![integer(1), integer(2)],
            ],
        };
        good.validate().unwrap();
        assert_eq!(good.capacity(2), Some(2));
        let growing = BallChain::Explicit {
            diameters: vec![integer(1), integer(2)],
            balls: vec![vec![integer(0)], vec![integer(0)]],
        };
        assert!(matches!(
            growing.validate(),
            Err(Error::NonMonotoneDiameters { index: 2 })
        ));
        let loose = BallChain::Explicit {
            diameters: vec![integer(1)],
            balls: vec![vec![integer(0), integer(3)]],
        };
        assert!(loose.validate().is_err());
        let json = serde_json::to_string(&good).unwrap();
        assert_eq!(serde_json::from_str::<BallChain>(&json).unwrap(), good);
        assert_eq!(
            serde_json::from_str::<BallChain>(r#"{"kind":"cauchy"}"#).unwrap(),
            BallChain::Cauchy
        );
    }
}
