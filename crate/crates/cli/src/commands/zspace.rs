use anyhow::{Context, Result};
use roundlab_core::zspace::{audit_triangles, ball_census, ZPoint, ZVariant};
use serde_json::json;

use super::{rational_arg, read_text};
use crate::args::{VariantArg, ZspaceCmd};
use crate::report::Outcome;

fn variant(v: VariantArg) -> ZVariant {
    match v {
        VariantArg::Literal => ZVariant::Literal,
        VariantArg::Corrected => ZVariant::Corrected,
    }
}

pub fn run(cmd: &ZspaceCmd) -> Result<Outcome> {
    match cmd {
        ZspaceCmd::Validate {
            variant: v,
            block_bound,
        } => {
            let v = variant(*v);
            let audit = audit_triangles(v, *block_bound)?;
            let violation = audit.violation_count > 0;
            let parameters = json!({ "variant": v, "block_bound": block_bound });
            Ok(Outcome::new(parameters, audit, violation)?
                .with_provenance(json!({ "exhaustive": true })))
        }
        ZspaceCmd::Census {
            center,
            block,
            radius,
            variant: v,
        } => {
            let v = variant(*v);
            let center = match center {
                Some(path) => serde_json::from_str::<ZPoint>(&read_text(path)?)
                    .with_context(|| format!("parsing {}", path.display()))?,
                None => ZPoint::zero(*block)?,
            };
            let r = rational_arg("radius", radius)?;
            let census = ball_census(&center, &r, v)?;
            let parameters =
                json!({ "center_block": center.block, "radius": radius, "variant": v });
            Ok(Outcome::new(parameters, census, false)?
                .with_provenance(json!({ "exhaustive": true })))
        }
    }
}
