use std::f64::consts::PI;

use crate::numeric::{rational_to_f64, Rational};
use crate::products::{cyclic_unchecked, PairClass, ProductCycleSpace};

/// A map from a product of cycles into a target metric space of declared
/// generalized roundness.
///
/// Targets are represented by their pairwise image distances; only some of
/// them (the Euclidean one) have convenient coordinates.
pub trait EmbeddingMap: Sync {
    fn label(&self) -> String;

    /// Declared generalized roundness of the target (`f64::INFINITY` allowed).
    fn declared_roundness(&self) -> f64;

    /// `d(f(x), f(y))` in the target, for residue vectors of `space`.
    fn image_distance(&self, space: &ProductCycleSpace, x: &[u64], y: &[u64]) -> f64;

    /// The common image distance of every pair in `class`, when the map is
    /// invariant under the coordinate permutations, rotations and reflections
    /// that act transitively on the class.
    fn class_distance(&self, _space: &ProductCycleSpace, _class: &PairClass) -> Option<f64> {
        None
    }

    fn injective(&self) -> bool {
        true
    }
}

fn sup_real(space: &ProductCycleSpace, x: &[u64], y: &[u64]) -> f64 {
    let u = space.units();
    let quanta = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| cyclic_unchecked(u, a, b))
        .max()
        .unwrap_or(0);
    rational_to_f64(&space.to_real(quanta))
}

/// The space itself with its supremum metric in real units. The roundness of
/// the target is not known in general, so the caller declares it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Identity {
    pub declared: f64,
}

impl EmbeddingMap for Identity {
    fn label(&self) -> String {
        "identity".into()
    }

    fn declared_roundness(&self) -> f64 {
        self.declared
    }

    fn image_distance(&self, space: &ProductCycleSpace, x: &[u64], y: &[u64]) -> f64 {
        sup_real(space, x, y)
    }

    fn class_distance(&self, space: &ProductCycleSpace, class: &PairClass) -> Option<f64> {
        Some(rational_to_f64(&space.to_real(class.delta)))
    }
}

/// The supremum metric raised to `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnowflakeMap {
    pub alpha: Rational,
    pub declared: f64,
}

impl EmbeddingMap for SnowflakeMap {
    fn label(&self) -> String {
        format!("snowflake:{}", crate::numeric::format_rational(&self.alpha))
    }

    fn declared_roundness(&self) -> f64 {
        self.declared
    }

    fn image_distance(&self, space: &ProductCycleSpace, x: &[u64], y: &[u64]) -> f64 {
        sup_real(space, x, y).powf(rational_to_f64(&self.alpha))
    }

    fn class_distance(&self, space: &ProductCycleSpace, class: &PairClass) -> Option<f64> {
        let d = rational_to_f64(&space.to_real(class.delta));
        Some(d.powf(rational_to_f64(&self.alpha)))
    }
}

/// Each coordinate placed on a Euclidean circle whose circumference equals
/// the real length of the cycle; the image lives in `R^(2C)`, which has
/// generalized roundness 2.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CircleMap;

impl CircleMap {
    fn radius(space: &ProductCycleSpace) -> f64 {
        space.units() as f64 * rational_to_f64(&space.cycle.quantum) / (2.0 * PI)
    }

    /// Chord length between residues `delta` units apart.
    pub fn chord(space: &ProductCycleSpace, delta: u64) -> f64 {
        let u = space.units();
        let delta = delta.min(u - delta);
        2.0 * Self::radius(space) * (PI * delta as f64 / u as f64).sin()
    }

    /// Image coordinates `(R cos theta_i, R sin theta_i)` for every coordinate.
    pub fn apply(&self, space: &ProductCycleSpace, x: &[u64]) -> Vec<f64> {
        let r = Self::radius(space);
        let u = space.units() as f64;
        x.iter()
            .flat_map(|&k| {
                let theta = 2.0 * PI * k as f64 / u;
                [r * theta.cos(), r * theta.sin()]
            })
            .collect()
    }
}

impl EmbeddingMap for CircleMap {
    fn label(&self) -> String {
        "circle".into()
    }

    fn declared_roundness(&self) -> f64 {
        2.0
    }

    fn image_distance(&self, space: &ProductCycleSpace, x: &[u64], y: &[u64]) -> f64 {
        let u = space.units();
        x.iter()
            .zip(y)
            .map(|(&a, &b)| {
                let c = Self::chord(space, cyclic_unchecked(u, a, b));
                c * c
            })
            .sum::<f64>()
            .sqrt()
    }

    fn class_distance(&self, space: &ProductCycleSpace, class: &PairClass) -> Option<f64> {
        Some((class.support as f64).sqrt() * Self::chord(space, class.delta))
    }
}

/// Everything to one point; a one-point target satisfies every inequality.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstantMap;

impl EmbeddingMap for ConstantMap {
    fn label(&self) -> String {
        "constant".into()
    }

    fn declared_roundness(&self) -> f64 {
        f64::INFINITY
    }

    fn image_distance(&self, _: &ProductCycleSpace, _: &[u64], _: &[u64]) -> f64 {
        0.0
    }

    fn class_distance(&self, _: &ProductCycleSpace, _: &PairClass) -> Option<f64> {
        Some(0.0)
    }

    fn injective(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn circle_distances_match_coordinates() {
        let space = ProductCycleSpace::with_unit_quantum(4, 8).unwrap();
        let x = [0u64, 3, 5, 7];
        let y = [4u64, 3, 6, 1];
        let m = CircleMap;
        let direct = euclid(&m.apply(&space, &x), &m.apply(&space, &y));
        assert!((m.image_distance(&space, &x, &y) - direct).abs() < 1e-12);
        // A quarter turn on a circle of circumference 8.
        let r = 8.0 / (2.0 * PI);
        assert!((CircleMap::chord(&space, 2) - r * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn class_distances_are_constant_on_classes() {
        let space = ProductCycleSpace::with_unit_quantum(3, 8).unwrap();
        let class = PairClass::new(&space, 3, 2).unwrap();
        let alpha = crate::numeric::rational(1, 2);
        let maps: Vec<Box<dyn EmbeddingMap>> = vec![
            Box::new(Identity { declared: 1.0 }),
            Box::new(SnowflakeMap {
                alpha,
                declared: 2.0,
            }),
            Box::new(CircleMap),
            Box::new(ConstantMap),
        ];
        for m in &maps {
            let expect = m.class_distance(&space, &class).unwrap();
            for (x, y) in crate::products::enumerate_pairs(&space, &class, 1 << 12).unwrap() {
                let d = m.image_distance(&space, &x.residues, &y.residues);
                assert!((d - expect).abs() < 1e-12, "{}", m.label());
            }
        }
    }
}
