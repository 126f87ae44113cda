//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are still run and still print FAIL;
//! they only stop the process from exiting nonzero.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roundlab_core::cayley::{
    cayley_roundness_upper, verify_block_projection, verify_mstar_isometry, CheckMode, Family,
    GeneratorSet, Solver,
};
use roundlab_core::injections::{
    build_ballchain_injection, build_ell0_injection, build_ellp_injection, verify_injection,
    BallChain, LevelRule, Modulus,
};
use roundlab_core::numeric::{integer, rational, Rational};
use roundlab_core::obstruction::{
    euler_factor, verify_theorem1_chain, verify_theorem1_step, CircleMap, Identity, LevelMode,
};
use roundlab_core::products::{
    build_simplex, conn_incidences, count_incidences, count_pairs_closed, edge_incidences,
    enumerate_pairs, is_simplex, CyclePoint, NtmParams, PairClass, ProductCycleSpace, SimplexClass,
};
use roundlab_core::roundness::{
    estimate_roundness, find_violation_exhaustive, EstimateMode, EstimateOptions,
};
use roundlab_core::zspace::{audit_triangles, ViolationKind, ZVariant};
use roundlab_core::{snowflake, EuclideanPoints, FiniteMetricSpace, Numerics};
use serde_json::Value;

/// Bracket width for roundness estimates.
const P_TOL: f64 = 1e-3;
/// Relative tolerance of inequality checks.
const REL_TOL: f64 = 1e-12;
/// Slack on Lipschitz ratios.
const RATIO_TOL: f64 = 1e-12;
/// Critical exponents found by bisection.
const CRITICAL_TOL: f64 = 1e-9;

/// Criteria expected to fail, with the reason.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    10,
    "the split generating set does not make M_n* isometric to its word metric; see the mixed result in the detail",
)];

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1_simplex_builder() -> Verdict {
    let mut checked = 0;
    for r in [2usize, 4] {
        for s in [2usize, 4] {
            for delta in [1u64, 2] {
                for coords in [s * r, s * r + 2] {
                    for units in [8u64, 16] {
                        let space =
                            ProductCycleSpace::with_unit_quantum(coords, units).map_err(err)?;
                        let class = SimplexClass::new(&space, r, delta, s).map_err(err)?;
                        let ds = build_simplex(&space, &class).map_err(err)?;
                        ensure(is_simplex(&space, &ds, &class), || {
                            format!("r={r} delta={delta} s={s} C={coords} U={units}")
                        })?;
                        checked += 1;
                    }
                }
            }
        }
    }
    let named: Vec<(u32, i32, u32)> = [-1, 0, 1]
        .into_iter()
        .flat_map(|t| [1, 2].map(|m| (4, t, m)))
        .chain([(6, 0, 1)])
        .collect();
    for &(n, t, m) in &named {
        let params = NtmParams::new(n, t, m).map_err(err)?;
        let class = params.simplex_class().map_err(err)?;
        let ds = build_simplex(&params.space, &class).map_err(err)?;
        ensure(is_simplex(&params.space, &ds, &class), || {
            format!("n={n} t={t} m={m}")
        })?;
        checked += 1;
    }
    Ok(format!(
        "{checked} classes, {} (n, t, m) instances",
        named.len()
    ))
}

fn c2_counting() -> Verdict {
    let spaces = [(4usize, 8u64), (3, 6), (2, 10), (3, 8), (5, 6), (4, 16)];
    let mut classes = 0;
    for &(coords, units) in &spaces {
        assert!((units as u128).pow(coords as u32) <= 100_000);
        let space = ProductCycleSpace::with_unit_quantum(coords, units).map_err(err)?;
        for delta in 1..=units / 2 {
            for support in 1..=coords {
                let class = PairClass::new(&space, delta, support).map_err(err)?;
                let closed = count_pairs_closed(coords, units, &class).to_string();
                let listed = enumerate_pairs(&space, &class, u64::MAX)
                    .map_err(err)?
                    .count()
                    .to_string();
                ensure(closed == listed, || {
                    format!("C={coords} U={units} delta={delta} s={support}: {closed} vs {listed}")
                })?;
                classes += 1;
            }
        }
    }
    let space = ProductCycleSpace::with_unit_quantum(3, 6).map_err(err)?;
    let class = PairClass::new(&space, 1, 1).map_err(err)?;
    let v = count_pairs_closed(3, 6, &class).to_string();
    ensure(v == "648", || format!("(C=3, U=6, delta=1, s=1) gives {v}"))?;
    Ok(format!(
        "{classes} classes on {} spaces; (3,6,1,1) = 648",
        spaces.len()
    ))
}

fn c3_incidence_identity() -> Verdict {
    let (r, delta, s) = (2usize, 1u64, 2usize);
    let space = ProductCycleSpace::with_unit_quantum(4, 8).map_err(err)?;
    let class = SimplexClass::new(&space, r, delta, s).map_err(err)?;
    let counts = count_incidences(&space, &class, u64::MAX).map_err(err)?;
    ensure(
        counts.edge_identity_holds() && counts.conn_identity_holds(),
        || format!("identities fail: {counts:?}"),
    )?;
    let p = |v: [u64; 4]| CyclePoint::new(v.to_vec());
    // edges: delta 2 on two coordinates; connecting lines: delta 1 on all four
    let edges = [
        (p([0, 0, 0, 0]), p([0, 0, 2, 2])),
        (p([1, 1, 1, 1]), p([3, 3, 1, 1])),
        (p([0, 5, 0, 4]), p([6, 5, 2, 4])),
    ];
    let conns = [
        (p([0, 0, 0, 0]), p([1, 1, 1, 1])),
        (p([0, 0, 0, 0]), p([7, 1, 7, 1])),
        (p([2, 3, 4, 5]), p([3, 2, 5, 4])),
    ];
    let ks: Vec<String> = edges
        .iter()
        .map(|(a, b)| edge_incidences(&space, &class, (a, b), u64::MAX).map(|k| k.to_string()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let ls: Vec<String> = conns
        .iter()
        .map(|(a, b)| conn_incidences(&space, &class, (a, b), u64::MAX).map(|l| l.to_string()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure(ks.iter().all(|k| *k == ks[0]), || {
        format!("K differs: {ks:?}")
    })?;
    ensure(ls.iter().all(|l| *l == ls[0]), || {
        format!("L differs: {ls:?}")
    })?;
    let json = serde_json::to_value(&counts).map_err(err)?;
    ensure(
        json["k"] == ks[0].as_str() && json["l"] == ls[0].as_str(),
        || {
            format!(
                "canonical K, L = {}, {} vs recomputed {}, {}",
                json["k"], json["l"], ks[0], ls[0]
            )
        },
    )?;
    // S r(r-1) = N_edge K and S r^2 = N_conn L, recomputed in integers here
    let big = |v: &Value| v.as_str().unwrap_or_default().parse::<u128>().map_err(err);
    let (sv, ne, nc) = (
        big(&json["s"])?,
        big(&json["n_edge"])?,
        big(&json["n_conn"])?,
    );
    let (k, l) = (
        ks[0].parse::<u128>().map_err(err)?,
        ls[0].parse::<u128>().map_err(err)?,
    );
    let r = r as u128;
    ensure(sv * r * (r - 1) == ne * k && sv * r * r == nc * l, || {
        "identities fail on recomputation".into()
    })?;
    Ok(format!(
        "S={sv} N_edge={ne} N_conn={nc} K={k} L={l} from 3 pairs each"
    ))
}

fn c4_single_step() -> Verdict {
    let space = ProductCycleSpace::with_unit_quantum(4, 8).map_err(err)?;
    let exact = LevelMode::Exact { budget: u64::MAX };
    let mut margins = Vec::new();
    for (delta, s) in [(1u64, 2usize), (2, 2)] {
        let class = SimplexClass::new(&space, 2, delta, s).map_err(err)?;
        let circle =
            verify_theorem1_step(&CircleMap, &space, &class, 2.0, exact, REL_TOL).map_err(err)?;
        let ident = verify_theorem1_step(
            &Identity { declared: 0.1 },
            &space,
            &class,
            0.1,
            exact,
            REL_TOL,
        )
        .map_err(err)?;
        ensure(circle.holds && ident.holds, || {
            format!(
                "delta={delta} s={s}: circle {:?}, identity {:?}",
                circle.check, ident.check
            )
        })?;
        margins.push(format!(
            "({delta},{s}): {:.4}/{:.4}",
            circle.check.margin, ident.check.margin
        ));
    }
    Ok(format!(
        "margins circle@2/identity@0.1 {}",
        margins.join(", ")
    ))
}

fn c5_chain() -> Verdict {
    // M_4: start at distance 2^0 on all 256 coordinates; three steps of r = 4
    // reach support 4, the last one that still splits into an even simplex
    let params = NtmParams::new(4, 0, 4).map_err(err)?;
    let start = params.pair_class().map_err(err)?;
    let mode = LevelMode::MonteCarlo {
        samples: 100_000,
        seed: 20_240_501,
    };
    let report = verify_theorem1_chain(&CircleMap, &params.space, 4, 3, &start, 2.0, mode, REL_TOL)
        .map_err(err)?;
    let worst = report
        .steps
        .iter()
        .chain([&report.chain])
        .map(|s| s.margin)
        .fold(f64::INFINITY, f64::min);
    ensure(report.holds && report.steps.iter().all(|s| s.holds), || {
        format!("{:?}", report.steps)
    })?;
    Ok(format!(
        "C={} U={} {} steps hold within 3 stderr; min margin {worst:.4}",
        params.space.coords,
        params.space.units(),
        report.steps.len()
    ))
}

fn c6_euler() -> Verdict {
    let floor = (-1.0f64).exp();
    let mut prev = f64::INFINITY;
    for n in 1..=1_000_000u64 {
        let f = euler_factor(n);
        let direct = (n as f64 * (-1.0 / (n as f64 + 2.0)).ln_1p()).exp();
        ensure(f > floor, || format!("n={n}: {f} <= 1/e"))?;
        ensure(f < prev, || format!("n={n}: not decreasing"))?;
        ensure((f - direct).abs() <= 1e-12 * direct, || {
            format!("n={n}: {f} vs {direct}")
        })?;
        prev = f;
    }
    Ok(format!("factor at 10^6 = {prev:.12}, 1/e = {floor:.12}"))
}

fn cycle(n: usize) -> FiniteMetricSpace {
    FiniteMetricSpace::from_fn(n, |i, j| {
        let d = i.abs_diff(j);
        integer(d.min(n - d) as i64)
    })
    .unwrap()
}

fn brackets(lower: f64, upper: Option<f64>, target: f64) -> bool {
    upper.is_some_and(|u| lower <= target && target <= u && u - lower <= P_TOL + 1e-15)
}

fn c7_estimator() -> Verdict {
    let num = Numerics::default();
    let opts = EstimateOptions {
        max_size: 3,
        p_tolerance: P_TOL,
        p_cap: 16.0,
        budget: u64::MAX,
        mode: EstimateMode::Exhaustive,
    };
    let c4 = estimate_roundness(&cycle(4), None, &opts, &num).map_err(err)?;
    ensure(brackets(c4.lower, c4.upper, 1.0), || {
        format!("4-cycle: {c4:?}")
    })?;
    for k in 2..=5 {
        let eq = FiniteMetricSpace::from_fn(k, |i, j| integer((i != j) as i64)).map_err(err)?;
        let est = estimate_roundness(&eq, None, &opts, &num).map_err(err)?;
        ensure(est.upper.is_none() && est.lower == 16.0, || {
            format!("equilateral {k}: {est:?}")
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for set in 0..6 {
        let pts: Vec<Vec<Rational>> = (0..6)
            .map(|_| {
                vec![
                    integer(rng.gen_range(-20..=20)),
                    integer(rng.gen_range(-20..=20)),
                ]
            })
            .collect();
        let space = EuclideanPoints::new(pts).map_err(err)?;
        let found = find_violation_exhaustive(&space, 3, 2.0, u64::MAX, &num).map_err(err)?;
        ensure(found.is_none(), || format!("planar set {set}: {found:?}"))?;
    }
    let half = snowflake(cycle(4), rational(1, 2)).map_err(err)?;
    let sf = estimate_roundness(&half, None, &opts, &num).map_err(err)?;
    ensure(brackets(sf.lower, sf.upper, 2.0), || {
        format!("snowflake: {sf:?}")
    })?;
    Ok(format!(
        "C4 [{}, {}], snowflake [{}, {}], equilateral none up to 16, 6 planar sets clean",
        c4.lower,
        c4.upper.unwrap_or(f64::NAN),
        sf.lower,
        sf.upper.unwrap_or(f64::NAN)
    ))
}

fn c8_zeta() -> Verdict {
    let literal = audit_triangles(ZVariant::Literal, 8).map_err(err)?;
    let cross = literal
        .violations
        .iter()
        .find(|v| (v.x.block, v.y.block, v.z.block) == (4, 6, 2))
        .ok_or("no (4, 6, 2) violation")?;
    ensure(
        cross.direct == integer(1_048_576) && cross.detour == integer(69_632),
        || format!("(4,6,2): {} vs {}", cross.direct, cross.detour),
    )?;
    let within = literal
        .violations
        .iter()
        .find(|v| v.kind == ViolationKind::WithinBlock && v.x.block == 8 && v.z.block == 2)
        .ok_or("no within-block violation at M_8 via M_2")?;
    ensure(
        within.direct == integer(8_388_608) && within.detour == integer(2_097_152),
        || format!("M_8 via M_2: {} vs {}", within.direct, within.detour),
    )?;
    let corrected = audit_triangles(ZVariant::Corrected, 12).map_err(err)?;
    ensure(
        corrected.certified && corrected.violation_count == 0,
        || format!("corrected: {} violations", corrected.violation_count),
    )?;
    Ok(format!(
        "literal: {} violations incl. 1048576 > 69632 and 8388608 > 2097152; corrected clean to 12 ({} configurations)",
        literal.violation_count, corrected.checked
    ))
}

/// Distinct points of `(1/q) Z^2` under the l1 metric.
fn random_space(rng: &mut ChaCha8Rng) -> FiniteMetricSpace {
    let n = rng.gen_range(2..=50);
    let q = rng.gen_range(1..=64i64);
    let spread = rng.gen_range(2..=40i64);
    let n = n.min(((2 * spread + 1) * (2 * spread + 1)) as usize);
    let mut pts: Vec<(i64, i64)> = Vec::new();
    while pts.len() < n {
        let p = (
            rng.gen_range(-spread..=spread),
            rng.gen_range(-spread..=spread),
        );
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    FiniteMetricSpace::from_fn(n, |i, j| {
        rational((pts[i].0 - pts[j].0).abs() + (pts[i].1 - pts[j].1).abs(), q)
    })
    .unwrap()
}

fn c9_injections() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut maps = 0;
    for i in 0..25 {
        let space = random_space(&mut rng);
        let mut built = vec![build_ell0_injection(&space, LevelRule::Strict).map_err(err)?];
        for p in [rational(1, 2), integer(1), integer(2)] {
            built.push(build_ellp_injection(&space, &p, LevelRule::Strict).map_err(err)?);
        }
        for chain in [BallChain::Interval, BallChain::Cauchy] {
            built.push(build_ballchain_injection(&space, &chain).map_err(err)?);
        }
        for map in &built {
            let modulus = map.target.default_modulus();
            let report = verify_injection(map, &modulus, RATIO_TOL).map_err(err)?;
            ensure(
                report.injective && report.holds && report.worst_ratio <= 1.0 + RATIO_TOL,
                || format!("space {i}, {}: {report:?}", map.target.label()),
            )?;
            if modulus == Modulus::Identity {
                ensure(report.exact_lipschitz != Some(false), || {
                    format!("space {i}, {}: exact check fails", map.target.label())
                })?;
            }
            worst = worst.max(report.worst_ratio);
            maps += 1;
        }
    }
    Ok(format!("{maps} maps on 25 spaces; worst ratio {worst:.15}"))
}

fn c10_cayley() -> Verdict {
    let num = Numerics::default();
    let mut problems = Vec::new();
    let mut detail = Vec::new();
    let split2 = verify_mstar_isometry(2, Family::Split, CheckMode::Exhaustive, Solver::Formula)
        .map_err(err)?;
    let mixed2 = verify_mstar_isometry(2, Family::Mixed, CheckMode::Exhaustive, Solver::Formula)
        .map_err(err)?;
    let bfs2 =
        verify_mstar_isometry(2, Family::Mixed, CheckMode::Exhaustive, Solver::Bfs).map_err(err)?;
    let sampled = CheckMode::Sampled {
        budget: 10_000,
        seed: 1,
    };
    let split4 = verify_mstar_isometry(4, Family::Split, sampled, Solver::Formula).map_err(err)?;
    let mixed4 = verify_mstar_isometry(4, Family::Mixed, sampled, Solver::Formula).map_err(err)?;
    for (label, rep, pairs) in [("n=2", &split2, 32_640u64), ("n=4", &split4, 10_000)] {
        if rep.pairs_checked != pairs || !rep.holds {
            problems.push(format!(
                "split {label}: {}/{} mismatches",
                rep.mismatch_count, rep.pairs_checked
            ));
        }
    }
    detail.push(format!(
        "mixed n=2 {}/{} ({} by search), n=4 {}/{}",
        mixed2.mismatch_count,
        mixed2.pairs_checked,
        bfs2.mismatch_count,
        mixed4.mismatch_count,
        mixed4.pairs_checked
    ));
    if !(mixed2.holds && bfs2.holds && mixed4.holds && mixed2.pairs_checked == 32_640) {
        problems.push("mixed family fails too".into());
    }

    let z2 = cayley_roundness_upper(
        &GeneratorSet::Standard { dim: 2 },
        &[1, 0],
        &[0, 1],
        2.0,
        &num,
    )
    .map_err(err)?;
    let probe = GeneratorSet::block(Family::Split, 4, 3).map_err(err)?;
    let c4 =
        cayley_roundness_upper(&probe, &[1, 1, 1, 1], &[1, -1, 1, -1], 2.0, &num).map_err(err)?;
    for (label, rep) in [("Z^2", &z2), ("C=4 J=3", &c4)] {
        if (rep.critical_p - 1.0).abs() > CRITICAL_TOL || !rep.witness.violated {
            problems.push(format!("{label}: critical p {}", rep.critical_p));
        }
    }
    detail.push(format!(
        "critical p {:.10} and {:.10}",
        z2.critical_p, c4.critical_p
    ));

    for family in [Family::Split, Family::Mixed] {
        for radius in 1..=3 {
            let rep = verify_block_projection(family, (2, 2), (3, 4), radius).map_err(err)?;
            if !rep.holds {
                problems.push(format!(
                    "projection {family:?} radius {radius}: {:?}",
                    rep.first_mismatch
                ));
            }
        }
    }
    detail.push("projection 2+2 radius <= 3 holds".into());

    if problems.is_empty() {
        Ok(detail.join("; "))
    } else {
        Err(format!("{}; {}", problems.join("; "), detail.join("; ")))
    }
}

fn report_body(bin: &Path, args: &[&str], workers: &str) -> Result<String, String> {
    let out = Command::new(bin)
        .args(args)
        .args(["--workers", workers])
        .output()
        .map_err(err)?;
    let code = out.status.code().unwrap_or(-1);
    if code == 1 {
        return Err(format!(
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let mut v: Value = serde_json::from_slice(&out.stdout).map_err(err)?;
    v.as_object_mut()
        .ok_or("report is not an object")?
        .remove("wall_time_ms");
    Ok(format!("{code}:{v}"))
}

fn c11_determinism() -> Verdict {
    let bin = Path::new(env!("CARGO_BIN_EXE_roundlab"));
    let dir = tempfile::tempdir().map_err(err)?;
    let c6 = dir.path().join("c6.csv");
    std::fs::write(
        &c6,
        "6\n0 1 2 3 2 1\n1 0 1 2 3 2\n2 1 0 1 2 3\n3 2 1 0 1 2\n2 3 2 1 0 1\n1 2 3 2 1 0\n",
    )
    .map_err(err)?;
    let c6 = c6.to_str().ok_or("temp path")?;
    let runs: Vec<Vec<&str>> = vec![
        vec![
            "cayley", "verify", "--n", "4", "--mode", "sampled", "--budget", "10000", "--seed", "1",
        ],
        vec![
            "cayley", "verify", "--n", "4", "--mode", "sampled", "--budget", "10000", "--seed",
            "1", "--family", "mixed",
        ],
        vec![
            "obstruct",
            "chain",
            "--n",
            "4",
            "--t",
            "0",
            "--m",
            "4",
            "--size",
            "4",
            "--levels",
            "3",
            "--p",
            "2",
            "--samples",
            "100000",
            "--seed",
            "20240501",
        ],
        vec![
            "obstruct",
            "uniform",
            "--p",
            "2",
            "--n-ladder",
            "2,4,6",
            "--samples",
            "2000",
            "--seed",
            "5",
        ],
        vec![
            "gr", "check", "--input", c6, "--p", "1.5", "--search", "--budget", "2000", "--seed",
            "3",
        ],
        vec![
            "gr", "estimate", "--input", c6, "--search", "--budget", "500", "--seed", "4",
        ],
        vec![
            "metric", "validate", "--input", c6, "--budget", "10", "--seed", "8",
        ],
    ];
    for args in &runs {
        let first = report_body(bin, args, "1")?;
        for workers in ["8", "1", "8"] {
            let again = report_body(bin, args, workers)?;
            ensure(first == again, || {
                format!("{} differs with --workers {workers}", args[..2].join(" "))
            })?;
        }
    }
    Ok(format!(
        "{} randomized commands, 4 runs each (workers 1, 8, 1, 8), identical bodies",
        runs.len()
    ))
}

fn main() {
    let criteria: Vec<(u32, &str, u64, fn() -> Verdict)> = vec![
        (1, "simplex builder", 10, c1_simplex_builder),
        (2, "closed-form pair counts", 60, c2_counting),
        (3, "double counting identity", 600, c3_incidence_identity),
        (4, "single averaging step", 600, c4_single_step),
        (5, "averaging chain on M_4", 600, c5_chain),
        (6, "euler factor", 5, c6_euler),
        (7, "roundness estimator", 300, c7_estimator),
        (8, "zeta audit", 10, c8_zeta),
        (9, "injections", 60, c9_injections),
        (10, "cayley word metric", 900, c10_cayley),
        (11, "determinism", 600, c11_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let slow = elapsed > Duration::from_secs(limit);
        let (pass, detail) = match (verdict, slow) {
            (Ok(d), false) => (true, d),
            (Ok(d), true) => (false, format!("over the {limit} s budget; {d}")),
            (Err(e), _) => (false, e),
        };
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        let tag = if pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} {id:>2} {name} [{:.2} s]: {detail}",
            elapsed.as_secs_f64()
        );
        match (pass, known) {
            (false, Some((_, why))) => println!("       known failure: {why}"),
            (false, None) => unexpected.push(id),
            (true, Some(_)) => println!("       listed as a known failure but passed"),
            (true, None) => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
