use super::{CyclePoint, ProductCycleSpace, SimplexClass};
use crate::error::Result;

pub type DoubleSimplex = crate::roundness::DoubleSimplex<CyclePoint>;

/// The standard simplex of a class.
///
/// The first `s*r` coordinates split into two halves. On the `x` side the
/// first half is cut into `r` runs of `s/2` coordinates and `x_i` carries
/// `2*delta` on run `i` and 0 elsewhere, while the second half is constant
/// `delta`. The `y` side swaps the two halves. All other coordinates are 0.
pub fn build_simplex(space: &ProductCycleSpace, class: &SimplexClass) -> Result<DoubleSimplex> {
    let class = SimplexClass::new(space, class.size, class.delta, class.support)?;
    let r = class.size;
    let half_run = class.support / 2;
    let group = class.support * r / 2;
    let point = |lead: usize, run: usize| {
        let mut v = vec![0u64; space.coords];
        let (runs_at, flat_at) = if lead == 0 { (0, group) } else { (group, 0) };
        for c in 0..half_run {
            v[runs_at + run * half_run + c] = 2 * class.delta;
        }
        for c in 0..group {
            v[flat_at + c] = class.delta;
        }
        CyclePoint::new(v)
    };
    Ok(DoubleSimplex {
        xs: (0..r).map(|i| point(0, i)).collect(),
        ys: (0..r).map(|i| point(1, i)).collect(),
    })
}

/// Whether every connecting line lies in the connecting class and every edge
/// in the edge class.
pub fn is_simplex(space: &ProductCycleSpace, ds: &DoubleSimplex, class: &SimplexClass) -> bool {
    let r = class.size;
    if ds.xs.len() != r || ds.ys.len() != r {
        return false;
    }
    let conn = class.conn_class();
    let edge = class.edge_class();
    let lines_ok = ds
        .xs
        .iter()
        .all(|x| ds.ys.iter().all(|y| space.is_pair(x, y, &conn)));
    let edges_ok = [&ds.xs, &ds.ys]
        .iter()
        .all(|side| (0..r).all(|i| (i + 1..r).all(|j| space.is_pair(&side[i], &side[j], &edge))));
    lines_ok && edges_ok
}
