use anyhow::Result;
use roundlab_core::products::{
    build_simplex, count_incidences, count_pairs_closed, enumerate_pairs, is_simplex, PairClass,
    SimplexClass,
};
use serde_json::json;

use super::resolve_class;
use crate::args::ProductsCmd;
use crate::report::Outcome;

pub fn run(cmd: &ProductsCmd) -> Result<Outcome> {
    match cmd {
        ProductsCmd::Simplex { class } => {
            let c = resolve_class(class)?;
            let sc = SimplexClass::new(&c.space, c.size, c.delta, c.support)?;
            let ds = build_simplex(&c.space, &sc)?;
            let ok = is_simplex(&c.space, &ds, &sc);
            let results = json!({
                "coords": c.space.coords,
                "units": c.space.units(),
                "class": sc,
                "connecting_class": sc.conn_class(),
                "edge_class": sc.edge_class(),
                "xs": ds.xs,
                "ys": ds.ys,
                "is_simplex": ok,
            });
            Ok(Outcome::new(c.parameters, results, !ok)?
                .with_provenance(json!({ "exhaustive": true })))
        }
        ProductsCmd::Count {
            class,
            enumerate,
            budget,
        } => {
            let c = resolve_class(class)?;
            let pc = PairClass::new(&c.space, c.delta, c.support)?;
            let closed = count_pairs_closed(c.space.coords, c.space.units(), &pc);
            let listed = if *enumerate {
                Some(enumerate_pairs(&c.space, &pc, *budget)?.count() as u64)
            } else {
                None
            };
            let agrees = listed.map(|l| closed == l.into());
            let results = json!({
                "class": pc,
                "closed_form": closed.to_string(),
                "enumerated": listed,
                "agrees": agrees,
            });
            let mut parameters = c.parameters;
            parameters["enumerate"] = json!(enumerate);
            Ok(Outcome::new(parameters, results, agrees == Some(false))?
                .with_provenance(json!({ "exhaustive": enumerate, "budget": budget })))
        }
        ProductsCmd::Incidences { class, budget } => {
            let c = resolve_class(class)?;
            let sc = SimplexClass::new(&c.space, c.size, c.delta, c.support)?;
            let counts = count_incidences(&c.space, &sc, *budget)?;
            let identities = json!({
                "edge": counts.edge_identity_holds(),
                "connecting": counts.conn_identity_holds(),
                "ratio": counts.ratio_identity_holds(),
            });
            let holds = counts.edge_identity_holds()
                && counts.conn_identity_holds()
                && counts.ratio_identity_holds();
            let results = json!({ "counts": counts, "identities": identities, "holds": holds });
            Ok(Outcome::new(c.parameters, results, !holds)?
                .with_provenance(json!({ "exhaustive": true, "budget": budget })))
        }
    }
}
