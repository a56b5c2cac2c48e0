//! Acceptance suite: one line per criterion with its verdict, the measured
//! quantity and the runtime against its budget.
//!
//! Runs without the libtest harness so the lines always reach the output;
//! the process exits non-zero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lls_core::curvature::{self, ComparisonOptions, Direction, Outcome};
use lls_core::curves::{self, CausalCurve, Extension, TcBudget};
use lls_core::extension::{self, CrossCheckBudget, ExtensionCandidate, MonotoneVerdict};
use lls_core::models::{self, ModelPoint, ModelSpace, TriangleSides};
use lls_core::space::checks;
use lls_core::spaces::{build_exemplar, sprinkle, ExemplarKind, ExemplarSpec, Region, SprinklingSpec};
use lls_core::tolerance::{self, Tolerances};
use lls_core::{PointId, SpaceDescription};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Comparison tolerances installed for the whole run.
const ABS_TOL: f64 = 1e-9;
const REL_TOL: f64 = 1e-6;
/// Maximizing chains must realize τ of their endpoints to this.
const BRANCH_TOL: f64 = 1e-9;
/// Model self-comparison: largest allowed |τ − τ̄|.
const MODEL_GAP_TOL: f64 = 1e-6;
/// Closed forms against the geodesic-shooting oracle.
const ORACLE_TOL: f64 = 1e-6;
/// Apex of the flat (1, 1, 2.5) triangle.
const APEX_TOL: f64 = 1e-12;
/// Re-measured sides of realized triangles.
const SIDE_TOL: f64 = 1e-9;
/// Largest exemplar scanned for the reverse triangle inequality.
const RTI_MAX_POINTS: usize = 3_000;

type Check = fn() -> Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: Check,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn build(kind: ExemplarKind) -> SpaceDescription {
    build_exemplar(&ExemplarSpec::new(kind)).expect("exemplar builds")
}

fn at(space: &SpaceDescription, c: &[f64]) -> Result<PointId, String> {
    space.locate(c).ok_or_else(|| format!("{c:?} is not a carrier point of {}", space.name()))
}

fn fan_fidelity() -> Result<String, String> {
    let fan = build(ExemplarKind::FanSpace);
    let formula = fan.geometry().ok_or("fan has no geometry")?.formula;
    let t1 = formula.tau(&[-2.0, 0.0, 0.0], &[0.0, 0.0, 3.0]).map_err(|e| e.to_string())?;
    let t2 = formula.tau(&[0.0, 0.0, 1.0], &[0.0, 0.0, 4.0]).map_err(|e| e.to_string())?;
    ensure(t1 == 5.0 && t2 == 3.0, || format!("closed form gives {t1}, {t2}"))?;

    // a taller sample carries both pairs as lattice points
    let tall = build_exemplar(&ExemplarSpec::new(ExemplarKind::FanSpace).with_extent([[-2.0, 4.0], [-2.0, 2.0]]).without_atlas())
        .map_err(|e| e.to_string())?;
    let c1 = tall.tau_f(at(&tall, &[-2.0, 0.0, 0.0])?, at(&tall, &[0.0, 0.0, 3.0])?);
    let c2 = tall.tau_f(at(&tall, &[0.0, 0.0, 1.0])?, at(&tall, &[0.0, 0.0, 4.0])?);
    ensure(c1 == 5.0 && c2 == 3.0, || format!("carrier gives {c1}, {c2}"))?;

    let pre = checks::check_prelength(&fan);
    ensure(pre.passed(), || pre.summary())?;
    let ls = curves::check_length_space(&fan);
    ensure(ls.passed(), || ls.summary())?;
    let loc = checks::check_localisable(&fan);
    ensure(loc.passed(), || loc.summary())?;
    // the atlas claims regularity; maximizers from the null cone of the
    // branch point into the ray have a null piece, which is flagged
    let regular = fan.atlas().is_some_and(|a| a.regular);
    let iv = loc.get("(iv) regularity").ok_or("no regularity item")?;
    ensure(regular && !iv.is_fail(), || format!("regularity: {iv:?}"))?;
    Ok(format!(
        "tau = {t1}, {t2} (closed form and carrier); pre-length, length-space, localisable with regular atlas (iv: {}) on {} points",
        iv.label(),
        fan.len()
    ))
}

fn branching_singularity() -> Result<String, String> {
    let fan = build(ExemplarKind::FanSpace);
    let region = curvature::region_ball(&fan, &[0.0, 0.0, 0.0], 1.0);
    let witnesses = curvature::detect_branching(&fan, &region, 16).map_err(|e| e.to_string())?;
    ensure(!witnesses.is_empty(), || "no branching witness".into())?;
    let mut worst: f64 = 0.0;
    for w in &witnesses {
        for chain in &w.chains {
            let (x, y) = (chain.first().unwrap(), chain.last().unwrap());
            let len = curves::tau_length(&fan, chain).map_err(|e| e.to_string())?.value.to_f64();
            worst = worst.max((len - fan.tau_f(x, y)).abs());
        }
    }
    ensure(worst <= BRANCH_TOL, || format!("a branch misses tau by {worst:e}"))?;
    let opts = ComparisonOptions {
        timelike_only: true,
        ..ComparisonOptions::default()
    };
    let sweep = curvature::singularity_sweep(&fan, &region, &[-1.0, -0.5, 0.0, 0.5, 1.0], &opts).map_err(|e| e.to_string())?;
    ensure(sweep.unbounded_below, || "sweep did not report unbounded below".into())?;
    Ok(format!(
        "{} witnesses (first at {:?}), worst |L - tau| = {worst:e}; unbounded_below",
        witnesses.len(),
        fan.coords(witnesses[0].point).unwrap_or_default()
    ))
}

fn extension_audit() -> Result<String, String> {
    let base = build(ExemplarKind::PuncturedPatch);
    let fan = build(ExemplarKind::FanSpace);
    let cand = ExtensionCandidate::inclusion(&base, &fan).map_err(|e| e.to_string())?;
    let rep = extension::check_extension(&cand).map_err(|e| e.to_string())?;
    ensure(rep.passed(), || rep.clauses.summary())?;
    ensure(rep.clauses.items.len() == 5, || "expected five clauses".into())?;
    let mono = extension::check_tau_monotone(&cand);
    ensure(matches!(mono, MonotoneVerdict::Pass { .. }), || format!("{mono:?}"))?;
    let b = extension::compute_boundary(&cand);
    let origin = at(&fan, &[0.0, 0.0, 0.0])?;
    ensure(b.future.contains(&origin) || b.past.contains(&origin), || "origin not on the boundary".into())?;
    Ok(format!(
        "5/5 clauses, tau monotone, boundary {} future + {} past incl. origin",
        b.future.len(),
        b.past.len()
    ))
}

/// A random causal chain: each next point is drawn from the causal future
/// of the previous one.
fn random_chain(space: &SpaceDescription, rng: &mut ChaCha8Rng, max_len: usize) -> Vec<PointId> {
    let n = space.len();
    let mut chain = vec![PointId(rng.gen_range(0..n))];
    let target = rng.gen_range(2..=max_len);
    while chain.len() < target {
        let last = *chain.last().unwrap();
        let future: Vec<PointId> = space.causal().row_iter(last.0).filter(|&j| j != last.0).map(PointId).collect();
        if future.is_empty() {
            break;
        }
        chain.push(future[rng.gen_range(0..future.len())]);
    }
    chain
}

fn partition_oracle() -> Result<String, String> {
    let grid = build(ExemplarKind::MinkowskiPatch);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut checked = 0;
    let mut longest = 0;
    while checked < 100 {
        let chain = random_chain(&grid, &mut rng, 12);
        if chain.len() < 2 {
            continue;
        }
        let got = curves::tau_length(&grid, &CausalCurve::from_points(chain.clone())).map_err(|e| e.to_string())?.value.to_f64();
        let want = common::brute_force_partition_min(&grid, &chain);
        ensure(got == want, || format!("chain {chain:?}: tau_length {got} vs brute force {want}"))?;
        longest = longest.max(chain.len());
        checked += 1;
    }
    Ok(format!("{checked} chains up to {longest} points, all exact"))
}

fn longest_path_oracle() -> Result<String, String> {
    let spec = ExemplarSpec::new(ExemplarKind::MinkowskiPatch).with_extent([[0.0, 1.0], [0.0, 1.0]]).without_atlas();
    let grid = build_exemplar(&spec).map_err(|e| e.to_string())?;
    ensure(grid.len() == 25, || format!("grid has {} points", grid.len()))?;
    let mut pairs = 0;
    for x in grid.ids() {
        for y in grid.ids() {
            let t = curves::compute_t(&grid, x, y).map_err(|e| e.to_string())?.to_f64();
            let e = common::exhaustive_longest_path(&grid, x, y);
            ensure(t == e, || format!("T({x}, {y}) = {t} vs enumeration {e}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} ordered pairs, all exact"))
}

fn model_self_comparison() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst_oracle: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut triangles = 0;
    for k in [0.0, 1.0, -1.0] {
        let m = ModelSpace::with_curvature(k);
        for _ in 0..20 {
            let p = ModelPoint::new(rng.gen_range(-0.5..0.0), rng.gen_range(-0.5..0.5));
            let dt = rng.gen_range(0.05..0.6);
            let q = ModelPoint::new(p.coords[0] + dt, p.coords[1] + rng.gen_range(-0.9..0.9) * dt);
            let shot = common::shoot(&m, p, q, 400).ok_or("shooting failed")?;
            let closed = models::tau_model(&m, p, q).map_err(|e| e.to_string())?.to_f64();
            worst_oracle = worst_oracle.max((closed - shot.tau).abs());
        }
        ensure(worst_oracle < ORACLE_TOL, || format!("closed form off the oracle by {worst_oracle:e} at K = {k}"))?;

        let spec = ExemplarSpec::new(ExemplarKind::ModelPatch { curvature: k }).with_extent([[-0.625, 0.625], [-0.625, 0.625]]);
        let patch = build_exemplar(&spec).map_err(|e| e.to_string())?;
        let region: Vec<PointId> = patch.ids().collect();
        for dir in [Direction::BoundedBelow, Direction::BoundedAbove] {
            let v = curvature::check_curvature_bound(&patch, &region, k, dir, &ComparisonOptions::default()).map_err(|e| e.to_string())?;
            ensure(matches!(v.outcome, Outcome::Pass), || format!("K = {k} {dir:?}: {:?}", v.outcome))?;
            ensure(v.max_abs_gap < MODEL_GAP_TOL, || format!("K = {k} {dir:?}: gap {:e}", v.max_abs_gap))?;
            worst_gap = worst_gap.max(v.max_abs_gap);
            triangles = v.triangles_compared;
        }
    }
    Ok(format!(
        "oracle gap {worst_oracle:.1e}; {triangles} triangles per direction, max |tau - tau_bar| = {worst_gap:.1e} for K = 0, 1, -1"
    ))
}

fn triangle_realization() -> Result<String, String> {
    let tri = models::realize_triangle(&ModelSpace::minkowski(), TriangleSides::new(1.0, 1.0, 2.5)).map_err(|e| e.to_string())?;
    let [ty, xy] = tri.y.coords;
    ensure((ty - 1.25).abs() <= APEX_TOL && (xy - 0.75).abs() <= APEX_TOL, || format!("apex at {:?}", tri.y.coords))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    for k in [0.0, 1.0, -1.0] {
        let m = ModelSpace::with_curvature(k);
        let mut done = 0;
        let mut attempts = 0;
        while done < 1000 {
            attempts += 1;
            ensure(attempts < 100_000, || format!("too few admissible triples at K = {k}"))?;
            let a = rng.gen_range(0.01..1.0);
            let b = rng.gen_range(0.01..1.0);
            let c = a + b + rng.gen_range(0.0..1.5);
            let sides = TriangleSides::new(a, b, c);
            if !models::check_size_bounds(sides, k).map_err(|e| e.to_string())? {
                continue;
            }
            let tri = models::realize_triangle(&m, sides).map_err(|e| format!("K = {k}, {sides:?}: {e}"))?;
            let tau = |p, q| models::tau_model(&m, p, q).map(|t| t.to_f64()).map_err(|e| e.to_string());
            for (got, want) in [(tau(tri.x, tri.y)?, a), (tau(tri.y, tri.z)?, b), (tau(tri.x, tri.z)?, c)] {
                worst = worst.max((got - want).abs());
            }
            ensure(worst <= SIDE_TOL, || format!("K = {k}, {sides:?}: side off by {worst:e}"))?;
            done += 1;
        }
    }
    Ok(format!("apex ({ty}, {xy}); 3 x 1000 triples, worst side error {worst:.1e}"))
}

fn size_bound_table() -> Result<String, String> {
    let cases = [((1.0, 1.0, 2.0), 0.0, true), ((1.0, 1.0, 2.0), 1.0, true), ((1.0, 1.0, 5.0), -1.0, false)];
    for ((a, b, c), k, want) in cases {
        let got = models::check_size_bounds(TriangleSides::new(a, b, c), k).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("({a}, {b}, {c}) at K = {k}: {got}"))?;
    }
    Ok("(1,1,2)@0 true, (1,1,2)@1 true, (1,1,5)@-1 false".into())
}

fn tc_witnesses() -> Result<String, String> {
    let mut out = Vec::new();
    for kind in [ExemplarKind::PuncturedPatch, ExemplarKind::HalfSpacePatch] {
        let space = build(kind);
        let r = curves::check_tc(&space, &TcBudget::default()).map_err(|e| e.to_string())?;
        let w = r.witness.ok_or_else(|| format!("{}: no witness", space.name()))?;
        ensure(w.length.is_finite(), || "witness has infinite length".into())?;
        let g = curves::is_geodesic(&space, &w.curve).map_err(|e| e.to_string())?;
        ensure(g.is_geodesic, || format!("{}: witness is not geodesic: {:?}", space.name(), g.failing_window))?;
        let ext = curves::extend_geodesic(&space, &w.curve).map_err(|e| e.to_string())?;
        ensure(matches!(ext, Extension::Inextendible { .. }), || format!("{}: replay extends: {ext:?}", space.name()))?;
        out.push(format!("{} L = {} ({})", space.name(), w.length, w.certificate));
    }
    Ok(out.join("; "))
}

fn theorem_consistency() -> Result<String, String> {
    let mut out = Vec::new();
    for (b, a) in extension::exemplar_extension_pairs() {
        let (base, ambient) = (build(b), build(a));
        let cand = ExtensionCandidate::inclusion(&base, &ambient).map_err(|e| e.to_string())?;
        let r = extension::cross_check_inextendibility(&cand, &CrossCheckBudget::default()).map_err(|e| e.to_string())?;
        let pair = format!("{} -> {}", base.name(), ambient.name());
        ensure(!r.inconsistency, || format!("{pair}: INCONSISTENCY"))?;
        ensure(!r.failed_hypotheses.is_empty(), || format!("{pair}: no failed hypothesis"))?;
        out.push(format!("{pair} [{}]", r.failed_hypotheses.join(", ")));
    }
    Ok(out.join("; "))
}

fn shipped_exemplars() -> Vec<SpaceDescription> {
    let mut spaces: Vec<SpaceDescription> = [
        ExemplarKind::MinkowskiPatch,
        ExemplarKind::ModelPatch { curvature: 1.0 },
        ExemplarKind::ModelPatch { curvature: -1.0 },
        ExemplarKind::FanSpace,
        ExemplarKind::PuncturedPatch,
        ExemplarKind::SlitPatch,
        ExemplarKind::HalfSpacePatch,
        ExemplarKind::ToyDag,
        ExemplarKind::TimelikeCylinder,
    ]
    .into_iter()
    .map(build)
    .collect();
    for k in [0.0, 1.0, -1.0] {
        let spec = SprinklingSpec {
            density: 200.0,
            region: Region::Diamond {
                center: [0.0, 0.0],
                half: 1.0,
            },
            model: ModelSpace::with_curvature(k),
            seed: 0,
            with_atlas: false,
        };
        spaces.push(sprinkle(&spec).expect("sprinkling builds"));
    }
    spaces
}

fn reverse_triangle_scan() -> Result<String, String> {
    let spaces = shipped_exemplars();
    let mut scanned = 0;
    for s in spaces.iter().filter(|s| s.len() <= RTI_MAX_POINTS) {
        let rep = checks::check_prelength(s);
        let v = rep.get("reverse triangle inequality").ok_or("no reverse triangle item")?;
        ensure(v.is_pass(), || format!("{}: {v:?}", s.name()))?;
        scanned += 1;
    }
    Ok(format!("{scanned} exemplars scanned (largest {} points)", spaces.iter().map(|s| s.len()).max().unwrap_or(0)))
}

fn main() -> ExitCode {
    tolerance::install(Tolerances {
        abs: ABS_TOL,
        rel: REL_TOL,
    });
    let criteria = [
        Criterion { id: 1, name: "fan-space fidelity", budget: secs(5), run: fan_fidelity },
        Criterion { id: 2, name: "branching singularity", budget: secs(30), run: branching_singularity },
        Criterion { id: 3, name: "extension audit", budget: secs(30), run: extension_audit },
        Criterion { id: 4, name: "partition-infimum oracle", budget: secs(10), run: partition_oracle },
        Criterion { id: 5, name: "longest-path oracle", budget: secs(10), run: longest_path_oracle },
        Criterion { id: 6, name: "model self-comparison", budget: secs(60), run: model_self_comparison },
        Criterion { id: 7, name: "triangle realization", budget: secs(30), run: triangle_realization },
        Criterion { id: 8, name: "size-bound table", budget: secs(1), run: size_bound_table },
        Criterion { id: 9, name: "(TC) refutation witnesses", budget: secs(60), run: tc_witnesses },
        Criterion { id: 10, name: "theorem consistency", budget: secs(120), run: theorem_consistency },
        Criterion { id: 11, name: "reverse triangle exhaustiveness", budget: secs(120), run: reverse_triangle_scan },
    ];
    println!("acceptance: abs_tol = {ABS_TOL:e}, rel_tol = {REL_TOL:e}");
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over the runtime budget")),
            Err(e) => (false, e),
        };
        failures += usize::from(!ok);
        println!(
            "criterion {:>2} {:<32} {}  [{:.2} s / {} s]  {detail}",
            c.id,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
