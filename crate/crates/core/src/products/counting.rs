//! Pair counts in closed form, exhaustive pair enumeration and simplex
//! incidence counting.

use num_bigint::BigUint;
use num_traits::Pow;
use rayon::prelude::*;
use serde::Serialize;

use super::{CyclePoint, PairClass, ProductCycleSpace, SimplexClass};
use crate::error::{Error, Result};
use crate::numeric::serde_display;

/// Number of unordered pairs in a class:
/// `binom(C, s) * U^C * w^s / 2` with `w = 1` for antipodal `delta` and 2
/// otherwise.
pub fn count_pairs_closed(coords: usize, units: u64, class: &PairClass) -> BigUint {
    let w: u32 = if 2 * class.delta == units { 1 } else { 2 };
    let choose = num_integer::binomial(BigUint::from(coords), BigUint::from(class.support));
    let points = BigUint::from(units).pow(coords);
    choose * points * BigUint::from(w).pow(class.support) / 2u32
}

fn enumerable(space: &ProductCycleSpace, budget: u64) -> Result<u64> {
    match space.point_count() {
        Some(p) if p <= budget => Ok(p),
        _ => Err(Error::BudgetExceeded {
            required: BigUint::from(space.units()).pow(space.coords).to_string(),
            budget,
        }),
    }
}

/// Every unordered pair `{x, y}` of the class once, with `x < y`
/// lexicographically, ordered by `x` then `y`. Requires `U^C <= budget`.
pub fn enumerate_pairs<'a>(
    space: &'a ProductCycleSpace,
    class: &PairClass,
    budget: u64,
) -> Result<impl Iterator<Item = (CyclePoint, CyclePoint)> + 'a> {
    let class = PairClass::new(space, class.delta, class.support)?;
    let count = enumerable(space, budget)?;
    Ok((0..count).flat_map(move |i| {
        let x = space.decode(i);
        space
            .class_neighbors(&x, &class)
            .into_iter()
            .filter(move |y| space.encode(y) > i)
            .map(move |y| (CyclePoint::new(x.clone()), CyclePoint::new(y)))
    }))
}

/// Simplex and pair counts for one simplex class.
///
/// `s` counts simplices with `(X, Y)` and `(Y, X)` identified. `k` is the
/// number of simplices having the canonical edge-class pair as an edge and
/// `l` the number having the canonical connecting-class pair as a connecting
/// line; canonical pairs are the lexicographically smallest of their class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncidenceCounts {
    pub size: usize,
    pub edge_class: PairClass,
    pub conn_class: PairClass,
    #[serde(with = "serde_display")]
    pub n_edge: BigUint,
    #[serde(with = "serde_display")]
    pub n_conn: BigUint,
    #[serde(with = "serde_display")]
    pub k: BigUint,
    #[serde(with = "serde_display")]
    pub l: BigUint,
    #[serde(with = "serde_display")]
    pub s: BigUint,
    pub edge_pair: (CyclePoint, CyclePoint),
    pub conn_pair: (CyclePoint, CyclePoint),
}

impl IncidenceCounts {
    /// `S * r * (r-1) = N_edge * K`.
    pub fn edge_identity_holds(&self) -> bool {
        let r = BigUint::from(self.size);
        &self.s * &r * (&r - 1u32) == &self.n_edge * &self.k
    }

    /// `S * r^2 = N_conn * L`.
    pub fn conn_identity_holds(&self) -> bool {
        let r = BigUint::from(self.size);
        &self.s * &r * &r == &self.n_conn * &self.l
    }

    /// `L / K = (r / (r-1)) * N_edge / N_conn`, cross-multiplied.
    pub fn ratio_identity_holds(&self) -> bool {
        let r = BigUint::from(self.size);
        &self.l * (&r - 1u32) * &self.n_conn == r * &self.n_edge * &self.k
    }
}

/// Adjacency helpers over point indices for one simplex class.
struct Incidence<'a> {
    space: &'a ProductCycleSpace,
    edge: PairClass,
    conn: PairClass,
    r: usize,
}

type Node = (u64, Vec<u64>);

impl Incidence<'_> {
    fn nbrs(&self, x: &[u64], class: &PairClass) -> Vec<Node> {
        self.space
            .class_neighbors(x, class)
            .into_iter()
            .map(|y| (self.space.encode(&y), y))
            .collect()
    }

    fn is_edge(&self, a: &Node, b: &Node) -> bool {
        self.space.is_pair_unchecked(&a.1, &b.1, &self.edge)
    }

    fn is_conn(&self, a: &Node, b: &Node) -> bool {
        self.space.is_pair_unchecked(&a.1, &b.1, &self.conn)
    }

    /// Calls `f` on every `k`-subset of `cands` that is a clique in the edge
    /// graph, in increasing index order.
    fn for_each_clique(
        &self,
        cands: &[Node],
        k: usize,
        chosen: &mut Vec<Node>,
        f: &mut impl FnMut(&[Node]),
    ) {
        if k == 0 {
            f(chosen);
            return;
        }
        for (i, c) in cands.iter().enumerate() {
            if cands.len() - i < k {
                break;
            }
            let rest: Vec<Node> = cands[i + 1..]
                .iter()
                .filter(|d| self.is_edge(c, d))
                .cloned()
                .collect();
            chosen.push(c.clone());
            self.for_each_clique(&rest, k - 1, chosen, f);
            chosen.pop();
        }
    }

    fn count_cliques(&self, cands: &[Node], k: usize) -> u128 {
        let mut n = 0u128;
        self.for_each_clique(cands, k, &mut Vec::new(), &mut |_| n += 1);
        n
    }

    /// Points joined by a connecting line to every member of `xs`.
    fn conn_common(&self, xs: &[Node]) -> Vec<Node> {
        self.nbrs(&xs[0].1, &self.conn)
            .into_iter()
            .filter(|y| xs[1..].iter().all(|x| self.is_conn(x, y)))
            .collect()
    }

    /// Number of valid `Y` sides for a fixed `X`, optionally forced to
    /// contain `b`.
    fn count_ys(&self, xs: &[Node], b: Option<&Node>) -> u128 {
        let cands = self.conn_common(xs);
        match b {
            None => self.count_cliques(&cands, self.r),
            Some(b) => {
                let rest: Vec<Node> = cands
                    .into_iter()
                    .filter(|y| y.0 != b.0 && self.is_edge(b, y))
                    .collect();
                self.count_cliques(&rest, self.r - 1)
            }
        }
    }

    /// Ordered `(X, Y)` simplices whose smallest `X` point is `x`.
    fn ordered_from(&self, x: u64) -> u128 {
        let first: Node = (x, self.space.decode(x));
        let cands: Vec<Node> = self
            .nbrs(&first.1, &self.edge)
            .into_iter()
            .filter(|n| n.0 > x)
            .collect();
        let mut total = 0u128;
        let mut chosen = vec![first];
        self.for_each_clique(&cands, self.r - 1, &mut chosen, &mut |xs| {
            total += self.count_ys(xs, None);
        });
        total
    }

    fn edge_incidences(&self, a: &Node, b: &Node) -> u128 {
        let cands: Vec<Node> = self
            .nbrs(&a.1, &self.edge)
            .into_iter()
            .filter(|c| c.0 != b.0 && self.is_edge(b, c))
            .collect();
        let mut total = 0u128;
        let mut chosen = vec![a.clone(), b.clone()];
        self.for_each_clique(&cands, self.r - 2, &mut chosen, &mut |xs| {
            total += self.count_ys(xs, None);
        });
        total
    }

    fn conn_incidences(&self, a: &Node, b: &Node) -> u128 {
        let cands: Vec<Node> = self
            .nbrs(&a.1, &self.edge)
            .into_iter()
            .filter(|c| self.is_conn(b, c))
            .collect();
        let mut total = 0u128;
        let mut chosen = vec![a.clone()];
        self.for_each_clique(&cands, self.r - 1, &mut chosen, &mut |xs| {
            total += self.count_ys(xs, Some(b));
        });
        total
    }

    fn canonical(&self, class: &PairClass) -> (Node, Node) {
        let zero = vec![0u64; self.space.coords];
        let partner = self
            .nbrs(&zero, class)
            .into_iter()
            .min_by_key(|n| n.0)
            .expect("every valid class has members");
        ((0, zero), partner)
    }
}

fn incidence<'a>(space: &'a ProductCycleSpace, class: &SimplexClass) -> Result<Incidence<'a>> {
    let class = SimplexClass::new(space, class.size, class.delta, class.support)?;
    Ok(Incidence {
        space,
        edge: class.edge_class(),
        conn: class.conn_class(),
        r: class.size,
    })
}

fn node(space: &ProductCycleSpace, p: &CyclePoint) -> Node {
    (space.encode(&p.residues), p.residues.clone())
}

/// Number of simplices of the class having `{a, b}` as an edge.
pub fn edge_incidences(
    space: &ProductCycleSpace,
    class: &SimplexClass,
    pair: (&CyclePoint, &CyclePoint),
    budget: u64,
) -> Result<BigUint> {
    let inc = incidence(space, class)?;
    enumerable(space, budget)?;
    if !space.is_pair(pair.0, pair.1, &inc.edge) {
        return Err(Error::NotInClass { which: "edge" });
    }
    Ok(BigUint::from(inc.edge_incidences(
        &node(space, pair.0),
        &node(space, pair.1),
    )))
}

/// Number of simplices of the class having `{a, b}` as a connecting line.
pub fn conn_incidences(
    space: &ProductCycleSpace,
    class: &SimplexClass,
    pair: (&CyclePoint, &CyclePoint),
    budget: u64,
) -> Result<BigUint> {
    let inc = incidence(space, class)?;
    enumerable(space, budget)?;
    if !space.is_pair(pair.0, pair.1, &inc.conn) {
        return Err(Error::NotInClass {
            which: "connecting",
        });
    }
    Ok(BigUint::from(inc.conn_incidences(
        &node(space, pair.0),
        &node(space, pair.1),
    )))
}

/// Counts every simplex of the class by exhaustive enumeration (split by
/// smallest point across workers) and the canonical incidence numbers.
pub fn count_incidences(
    space: &ProductCycleSpace,
    class: &SimplexClass,
    budget: u64,
) -> Result<IncidenceCounts> {
    let inc = incidence(space, class)?;
    let points = enumerable(space, budget)?;
    let ordered: u128 = (0..points)
        .into_par_iter()
        .map(|x| inc.ordered_from(x))
        .sum();
    debug_assert!(ordered % 2 == 0);

    let (ea, eb) = inc.canonical(&inc.edge);
    let (ca, cb) = inc.canonical(&inc.conn);
    let k = inc.edge_incidences(&ea, &eb);
    let l = inc.conn_incidences(&ca, &cb);
    let units = space.units();
    Ok(IncidenceCounts {
        size: inc.r,
        edge_class: inc.edge,
        conn_class: inc.conn,
        n_edge: count_pairs_closed(space.coords, units, &inc.edge),
        n_conn: count_pairs_closed(space.coords, units, &inc.conn),
        k: BigUint::from(k),
        l: BigUint::from(l),
        s: BigUint::from(ordered / 2),
        edge_pair: (CyclePoint::new(ea.1), CyclePoint::new(eb.1)),
        conn_pair: (CyclePoint::new(ca.1), CyclePoint::new(cb.1)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn space(c: usize, u: u64) -> ProductCycleSpace {
        ProductCycleSpace::with_unit_quantum(c, u).unwrap()
    }

    /// Brute-force count over all unordered pairs of points.
    fn brute_pairs(space: &ProductCycleSpace, class: &PairClass) -> u64 {
        let p = space.point_count().unwrap();
        let pts: Vec<Vec<u64>> = (0..p).map(|i| space.decode(i)).collect();
        let mut n = 0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if space.is_pair_unchecked(&pts[i], &pts[j], class) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn closed_form_examples() {
        let c = |d, s| PairClass {
            delta: d,
            support: s,
        };
        assert_eq!(count_pairs_closed(3, 6, &c(1, 1)), BigUint::from(648u32));
        assert_eq!(count_pairs_closed(1, 4, &c(2, 1)), BigUint::from(2u32));
        assert_eq!(count_pairs_closed(2, 6, &c(1, 2)), BigUint::from(72u32));
    }

    #[test]
    fn closed_form_matches_brute_force() {
        for (c, u) in [(3, 6), (1, 4), (2, 6), (2, 4), (3, 4)] {
            let s = space(c, u);
            for delta in 1..=u / 2 {
                for support in 1..=c {
                    let class = PairClass::new(&s, delta, support).unwrap();
                    let closed = count_pairs_closed(c, u, &class);
                    assert_eq!(closed, BigUint::from(brute_pairs(&s, &class)));
                    let listed = enumerate_pairs(&s, &class, 1 << 20).unwrap().count();
                    assert_eq!(closed, BigUint::from(listed));
                }
            }
        }
    }

    #[test]
    fn antipodal_enumeration() {
        let s = space(1, 4);
        let class = PairClass::new(&s, 2, 1).unwrap();
        let pairs: Vec<_> = enumerate_pairs(&s, &class, 100).unwrap().collect();
        assert_eq!(
            pairs,
            vec![
                (CyclePoint::new(vec![0]), CyclePoint::new(vec![2])),
                (CyclePoint::new(vec![1]), CyclePoint::new(vec![3])),
            ]
        );
    }

    #[test]
    fn budget_is_enforced() {
        let s = space(4, 8);
        let class = PairClass::new(&s, 1, 1).unwrap();
        match enumerate_pairs(&s, &class, 100) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, "4096");
                assert_eq!(budget, 100);
            }
            _ => panic!("expected budget error"),
        };
    }

    #[test]
    fn incidence_identities_on_small_space() {
        let s = space(4, 8);
        let class = SimplexClass::new(&s, 2, 1, 2).unwrap();
        let counts = count_incidences(&s, &class, 1 << 20).unwrap();
        assert!(counts.s > BigUint::zero());
        assert!(counts.edge_identity_holds());
        assert!(counts.conn_identity_holds());
        assert!(counts.ratio_identity_holds());
    }

    #[test]
    fn k_and_l_do_not_depend_on_the_pair() {
        let s = space(4, 8);
        let class = SimplexClass::new(&s, 2, 1, 2).unwrap();
        let counts = count_incidences(&s, &class, 1 << 20).unwrap();
        let a = CyclePoint::new(vec![3, 5, 0, 7]);
        let b = CyclePoint::new(vec![3, 7, 0, 5]);
        assert_eq!(
            edge_incidences(&s, &class, (&a, &b), 1 << 20).unwrap(),
            counts.k
        );
        let c = CyclePoint::new(vec![2, 6, 1, 0]);
        let d = CyclePoint::new(vec![1, 5, 0, 7]);
        assert_eq!(
            conn_incidences(&s, &class, (&c, &d), 1 << 20).unwrap(),
            counts.l
        );
        assert!(edge_incidences(&s, &class, (&a, &c), 1 << 20).is_err());
    }
}
