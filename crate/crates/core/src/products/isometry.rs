use serde::{Deserialize, Serialize};

use super::{CyclePoint, PairClass, ProductCycleSpace};
use crate::error::{Error, Result};

/// `v -> offset + v` or `v -> offset - v` on one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordMap {
    pub offset: u64,
    pub reflect: bool,
}

/// A coordinate permutation followed by a rotation or reflection on each
/// cycle: `image[i] = maps[i](x[perm[i]])`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isometry {
    pub units: u64,
    pub perm: Vec<usize>,
    pub maps: Vec<CoordMap>,
}

impl Isometry {
    pub fn identity(space: &ProductCycleSpace) -> Self {
        Self {
            units: space.units(),
            perm: (0..space.coords).collect(),
            maps: vec![
                CoordMap {
                    offset: 0,
                    reflect: false
                };
                space.coords
            ],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
            && self.maps.iter().all(|m| m.offset == 0 && !m.reflect)
    }

    pub fn apply(&self, x: &CyclePoint) -> CyclePoint {
        let u = self.units;
        CyclePoint::new(
            self.perm
                .iter()
                .zip(&self.maps)
                .map(|(&src, m)| {
                    let v = x.residues[src];
                    if m.reflect {
                        (m.offset + u - v) % u
                    } else {
                        (m.offset + v) % u
                    }
                })
                .collect(),
        )
    }
}

/// An isometry taking `x` to `u` and `y` to `v`.
///
/// Differing coordinates of the first pair are matched, in increasing order,
/// with those of the second pair (likewise for agreeing coordinates); each
/// cycle is then reflected if the two orientations disagree and rotated.
pub fn transport_pair(
    space: &ProductCycleSpace,
    pair_a: (&CyclePoint, &CyclePoint),
    pair_b: (&CyclePoint, &CyclePoint),
    class: &PairClass,
) -> Result<Isometry> {
    let (x, y) = pair_a;
    let (u, v) = pair_b;
    if !space.is_pair(x, y, class) {
        return Err(Error::NotInClass { which: "first" });
    }
    if !space.is_pair(u, v, class) {
        return Err(Error::NotInClass { which: "second" });
    }
    let units = space.units();
    let split = |a: &CyclePoint, b: &CyclePoint| -> (Vec<usize>, Vec<usize>) {
        (0..space.coords).partition(|&i| a.residues[i] != b.residues[i])
    };
    let (diff_a, same_a) = split(x, y);
    let (diff_b, same_b) = split(u, v);

    let mut perm = vec![0usize; space.coords];
    let mut maps = vec![
        CoordMap {
            offset: 0,
            reflect: false
        };
        space.coords
    ];
    let rotate = |to: u64, from: u64| (to + units - from) % units;
    for (&i, &j) in same_b.iter().zip(&same_a) {
        perm[i] = j;
        maps[i].offset = rotate(u.residues[i], x.residues[j]);
    }
    for (&i, &j) in diff_b.iter().zip(&diff_a) {
        perm[i] = j;
        let step_a = rotate(y.residues[j], x.residues[j]);
        let step_b = rotate(v.residues[i], u.residues[i]);
        if step_a == step_b {
            maps[i].offset = rotate(u.residues[i], x.residues[j]);
        } else {
            maps[i] = CoordMap {
                offset: (u.residues[i] + x.residues[j]) % units,
                reflect: true,
            };
        }
    }
    Ok(Isometry { units, perm, maps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u64]) -> CyclePoint {
        CyclePoint::new(v.to_vec())
    }

    #[test]
    fn hand_worked_transport() {
        let space = ProductCycleSpace::with_unit_quantum(2, 8).unwrap();
        let class = PairClass::new(&space, 1, 1).unwrap();
        let (x, y) = (p(&[0, 3]), p(&[1, 3]));
        let (u, v) = (p(&[5, 2]), p(&[4, 2]));
        let iso = transport_pair(&space, (&x, &y), (&u, &v), &class).unwrap();
        assert_eq!(iso.perm, vec![0, 1]);
        assert_eq!(
            iso.maps,
            vec![
                CoordMap {
                    offset: 5,
                    reflect: true
                },
                CoordMap {
                    offset: 7,
                    reflect: false
                }
            ]
        );
        assert_eq!(iso.apply(&x), u);
        assert_eq!(iso.apply(&y), v);
    }

    #[test]
    fn same_pair_gives_identity() {
        let space = ProductCycleSpace::with_unit_quantum(3, 8).unwrap();
        let class = PairClass::new(&space, 2, 2).unwrap();
        let (x, y) = (p(&[0, 3, 5]), p(&[2, 3, 7]));
        let iso = transport_pair(&space, (&x, &y), (&x, &y), &class).unwrap();
        assert!(iso.is_identity());
    }

    #[test]
    fn rejects_non_members() {
        let space = ProductCycleSpace::with_unit_quantum(2, 8).unwrap();
        let class = PairClass::new(&space, 1, 1).unwrap();
        let err = transport_pair(
            &space,
            (&p(&[0, 0]), &p(&[2, 0])),
            (&p(&[0, 0]), &p(&[1, 0])),
            &class,
        );
        assert_eq!(err, Err(Error::NotInClass { which: "first" }));
    }

    #[test]
    fn antipodal_coordinates_need_no_reflection() {
        let space = ProductCycleSpace::with_unit_quantum(2, 8).unwrap();
        let class = PairClass::new(&space, 4, 2).unwrap();
        let (x, y) = (p(&[0, 1]), p(&[4, 5]));
        let (u, v) = (p(&[7, 2]), p(&[3, 6]));
        let iso = transport_pair(&space, (&x, &y), (&u, &v), &class).unwrap();
        assert!(iso.maps.iter().all(|m| !m.reflect));
        assert_eq!((iso.apply(&x), iso.apply(&y)), (u, v));
    }
}
