//! Compression/expansion moduli of an embedding, as step functions.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{serde_rational, Rational};

/// Right-continuous non-decreasing step function on `[0, inf)`.
///
/// The value at `t` is the value attached to the largest breakpoint `<= t`,
/// or `before` when `t` precedes every breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub before: f64,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    #[serde(with = "serde_rational")]
    pub at: Rational,
    pub value: f64,
}

impl StepFunction {
    pub fn new(before: f64, steps: Vec<(Rational, f64)>) -> Result<Self> {
        let f = Self {
            before,
            steps: steps
                .into_iter()
                .map(|(at, value)| Step { at, value })
                .collect(),
        };
        f.check()?;
        Ok(f)
    }

    pub fn constant(value: f64) -> Self {
        Self {
            before: value,
            steps: Vec::new(),
        }
    }

    fn check(&self) -> Result<()> {
        let mut prev = self.before;
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 && s.at <= self.steps[i - 1].at {
                return Err(Error::InvalidArgument(
                    "step breakpoints must be strictly increasing".into(),
                ));
            }
            if s.value < prev || s.value.is_nan() {
                return Err(Error::InvalidArgument(format!(
                    "step function decreases at breakpoint {i}"
                )));
            }
            prev = s.value;
        }
        Ok(())
    }

    pub fn eval(&self, t: &Rational) -> f64 {
        let idx = self.steps.partition_point(|s| s.at <= *t);
        if idx == 0 {
            self.before
        } else {
            self.steps[idx - 1].value
        }
    }

    fn breakpoints(&self) -> impl Iterator<Item = &Rational> {
        self.steps.iter().map(|s| &s.at)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusSample {
    #[serde(with = "serde_rational")]
    pub domain: Rational,
    pub image: f64,
}

/// A pair `rho1 <= rho2` with `rho1(d(x,y)) <= d(f(x), f(y)) <= rho2(d(x,y))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusEnvelope {
    pub rho1: StepFunction,
    pub rho2: StepFunction,
    #[serde(default)]
    pub samples: Vec<ModulusSample>,
}

impl ModulusEnvelope {
    /// Checks monotonicity and `rho1 <= rho2` at every breakpoint of either.
    pub fn from_functions(rho1: StepFunction, rho2: StepFunction) -> Result<Self> {
        rho1.check()?;
        rho2.check()?;
        let zero = Rational::zero();
        let mut ts: Vec<&Rational> = rho1.breakpoints().chain(rho2.breakpoints()).collect();
        ts.push(&zero);
        for t in ts {
            if rho1.eval(t) > rho2.eval(t) {
                return Err(Error::InvalidArgument(format!(
                    "rho1 exceeds rho2 at t = {t}"
                )));
            }
        }
        if rho1.before > rho2.before {
            return Err(Error::InvalidArgument("rho1 exceeds rho2 near 0".into()));
        }
        Ok(Self {
            rho1,
            rho2,
            samples: Vec::new(),
        })
    }

    pub fn rho1(&self, t: &Rational) -> f64 {
        self.rho1.eval(t)
    }

    pub fn rho2(&self, t: &Rational) -> f64 {
        self.rho2.eval(t)
    }

    /// Whether every recorded sample lies inside the envelope.
    pub fn sandwich_holds(&self) -> bool {
        self.samples
            .iter()
            .all(|s| self.rho1(&s.domain) <= s.image && s.image <= self.rho2(&s.domain))
    }
}

/// Tightest monotone envelope of `(d(x,y), d(f(x),f(y)))` samples.
///
/// `rho1(t)` is the least image over samples with domain distance `>= t`
/// and `rho2(t)` the greatest image over samples with domain distance `<= t`,
/// both constant between sampled distances.
pub fn empirical_moduli(samples: &[(Rational, f64)]) -> Result<ModulusEnvelope> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no modulus samples".into()));
    }
    let mut sorted: Vec<(Rational, f64)> = samples.to_vec();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut distinct: Vec<(Rational, f64, f64)> = Vec::new(); // (t, min image, max image)
    for (t, v) in &sorted {
        match distinct.last_mut() {
            Some((last, lo, hi)) if last == t => {
                *lo = lo.min(*v);
                *hi = hi.max(*v);
            }
            _ => distinct.push((t.clone(), *v, *v)),
        }
    }

    let mut rho1_steps = vec![(Rational::zero(), 0.0); distinct.len()];
    let mut suffix = f64::INFINITY;
    for (i, (t, lo, _)) in distinct.iter().enumerate().rev() {
        suffix = suffix.min(*lo);
        rho1_steps[i] = (t.clone(), suffix);
    }
    let global_min = rho1_steps[0].1;

    let mut prefix = f64::NEG_INFINITY;
    let rho2_steps: Vec<(Rational, f64)> = distinct
        .iter()
        .map(|(t, _, hi)| {
            prefix = prefix.max(*hi);
            (t.clone(), prefix)
        })
        .collect();

    Ok(ModulusEnvelope {
        rho1: StepFunction::new(global_min, rho1_steps)?,
        rho2: StepFunction::new(0f64.min(global_min), rho2_steps)?,
        samples: sorted
            .into_iter()
            .map(|(domain, image)| ModulusSample { domain, image })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integer;

    #[test]
    fn two_sample_envelope() {
        let env = empirical_moduli(&[(integer(1), 2.0), (integer(2), 1.0)]).unwrap();
        assert_eq!(env.rho1(&integer(1)), 1.0);
        assert_eq!(env.rho1(&integer(2)), 1.0);
        assert_eq!(env.rho2(&integer(1)), 2.0);
        assert_eq!(env.rho2(&integer(2)), 2.0);
        assert!(env.sandwich_holds());
    }

    #[test]
    fn step_functions_are_right_continuous() {
        let f = StepFunction::new(0.0, vec![(integer(1), 1.0), (integer(3), 5.0)]).unwrap();
        assert_eq!(f.eval(&integer(0)), 0.0);
        assert_eq!(f.eval(&integer(1)), 1.0);
        assert_eq!(f.eval(&integer(2)), 1.0);
        assert_eq!(f.eval(&integer(3)), 5.0);
        assert!(StepFunction::new(0.0, vec![(integer(1), 2.0), (integer(2), 1.0)]).is_err());
    }

    #[test]
    fn functions_must_be_ordered() {
        let lo = StepFunction::new(0.0, vec![(integer(1), 3.0)]).unwrap();
        let hi = StepFunction::new(0.0, vec![(integer(1), 2.0)]).unwrap();
        assert!(ModulusEnvelope::from_functions(lo.clone(), hi.clone()).is_err());
        assert!(ModulusEnvelope::from_functions(hi, lo).is_ok());
    }

    #[test]
    fn empty_samples_rejected() {
        assert!(empirical_moduli(&[]).is_err());
    }
}
