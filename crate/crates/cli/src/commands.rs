//! Subcommand implementations and the report envelope.

use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;
use serde_json::{json, Value};

use lls_core::curvature::{self, ComparisonOptions, Direction};
use lls_core::curves::{self, CausalCurve, TcBudget};
use lls_core::extension::{self, CrossCheckBudget, ExtensionCandidate, MonotoneVerdict};
use lls_core::io;
use lls_core::models::{self, ModelSpace, Side, TriangleSides};
use lls_core::space::checks;
use lls_core::spaces::{self, ExemplarSpec, Region, SprinklingSpec};
use lls_core::tolerance::{self, Tolerances};
use lls_core::{ExtReal, PointId, SpaceDescription};

use crate::{CandidateArgs, CheckKind, Cli, Command, DirectionArg, RegionArgs};

pub const REPORT_SCHEMA: &str = "lls-report/1";

/// Largest carrier compared in full when no region is given.
const FULL_REGION_LIMIT: usize = 80;

type Res<T> = Result<T, String>;

/// A finished command: its JSON result, whether every check passed, and a
/// one-line summary.
struct Outcome {
    result: Value,
    passed: bool,
    summary: String,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn run(cli: Cli) -> ExitCode {
    let tol = Tolerances {
        abs: cli.abs_tol.unwrap_or(tolerance::ABS_TOL),
        rel: cli.rel_tol.unwrap_or(tolerance::REL_TOL),
    };
    if !(tol.abs > 0.0 && tol.abs.is_finite() && tol.rel > 0.0 && tol.rel.is_finite()) {
        eprintln!("error: tolerances must be positive and finite");
        return ExitCode::from(2);
    }
    tolerance::install(tol);
    let name = command_name(&cli.command);
    let outcome = match &cli.command {
        Command::Build { .. } | Command::Sprinkle { .. } => return write_space(&cli),
        cmd => execute(cmd),
    };
    match outcome {
        Ok(o) => {
            let report = json!({
                "schema": REPORT_SCHEMA,
                "tool": "lls",
                "version": env!("CARGO_PKG_VERSION"),
                "tolerances": tolerance::current(),
                "command": name,
                "passed": o.passed,
                "result": o.result,
            });
            if let Err(e) = emit(&cli, &report) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if !cli.quiet {
                eprintln!("{name}: {}", o.summary.trim_end());
            }
            ExitCode::from(if o.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, value: &Value) -> Res<()> {
    match &cli.out {
        Some(path) => io::write_json(path, value).map_err(err),
        None => {
            println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
            Ok(())
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Tau { .. } => "tau",
        Command::Length { .. } => "length",
        Command::Geodesic { .. } => "geodesic",
        Command::Tc { .. } => "tc",
        Command::Triangle { .. } => "triangle",
        Command::Curvature { .. } => "curvature",
        Command::Sweep { .. } => "sweep",
        Command::Extend { .. } => "extend",
        Command::Boundary { .. } => "boundary",
        Command::Build { .. } => "build",
        Command::Sprinkle { .. } => "sprinkle",
    }
}

fn load(path: &Path) -> Res<SpaceDescription> {
    io::load_space_file(path).map_err(err)
}

fn parse_floats(s: &str) -> Res<Vec<f64>> {
    s.trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']'])
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("not a number: {v:?} in {s:?}")))
        .collect()
}

/// A point argument: an id, or a coordinate tuple such as "(-2,0,0)".
enum Target {
    Id(PointId),
    Coords(Vec<f64>),
}

fn parse_target(s: &str) -> Res<Target> {
    let t = s.trim();
    if t.starts_with('(') || t.starts_with('[') || t.contains(',') {
        parse_floats(t).map(Target::Coords)
    } else {
        t.parse::<usize>().map(|i| Target::Id(PointId(i))).map_err(|_| format!("not a point id or coordinate tuple: {s:?}"))
    }
}

fn resolve(space: &SpaceDescription, t: &Target) -> Res<PointId> {
    match t {
        Target::Id(p) => space.check_id(*p).map(|_| *p).map_err(err),
        Target::Coords(c) => space.locate(c).ok_or_else(|| format!("no carrier point at {c:?}")),
    }
}

fn parse_chain(space: &SpaceDescription, s: &str) -> Res<CausalCurve> {
    let pts = s
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_target(p).and_then(|t| resolve(space, &t)))
        .collect::<Res<Vec<_>>>()?;
    Ok(CausalCurve::from_points(pts))
}

fn coords_json(space: &SpaceDescription, p: PointId) -> Value {
    match space.coords(p) {
        Some(c) => json!({"id": p.0, "coords": c}),
        None => json!({"id": p.0}),
    }
}

fn execute(cmd: &Command) -> Res<Outcome> {
    match cmd {
        Command::Check { kind, file } => check(*kind, &load(file)?),
        Command::Tau { file, from, to } => tau(&load(file)?, from, to),
        Command::Length { file, points, curve } => length(&load(file)?, points.as_deref(), curve.as_deref()),
        Command::Geodesic { file, from, to, points } => geodesic(&load(file)?, from.as_deref(), to.as_deref(), points.as_deref()),
        Command::Tc {
            file,
            max_seeds,
            max_extensions,
            boundary_exits_count,
        } => {
            let budget = TcBudget {
                max_seeds: *max_seeds,
                max_extensions: *max_extensions,
                boundary_exits_count: *boundary_exits_count,
                ..TcBudget::default()
            };
            let r = curves::check_tc(&load(file)?, &budget).map_err(err)?;
            let summary = match &r.witness {
                Some(w) => format!("witness of length {} ({})", w.length, w.certificate),
                None => format!("no witness among {} seeds", r.seeds_explored),
            };
            Ok(Outcome {
                passed: r.holds_within_budget,
                result: to_value(&r),
                summary,
            })
        }
        Command::Triangle { k, sides, samples } => triangle(*k, sides, *samples),
        Command::Curvature { file, k, direction, region } => {
            let space = load(file)?;
            let (pts, opts) = region_of(&space, region)?;
            let dir = match direction {
                DirectionArg::Below => Direction::BoundedBelow,
                DirectionArg::Above => Direction::BoundedAbove,
            };
            let v = curvature::check_curvature_bound(&space, &pts, *k, dir, &opts).map_err(err)?;
            let summary = format!(
                "{:?} at K = {k}: {} ({} triangles, {} pairs)",
                dir,
                if v.is_fail() { "fail" } else { "pass" },
                v.triangles_compared,
                v.pairs_compared
            );
            Ok(Outcome {
                passed: !v.is_fail(),
                result: to_value(&v),
                summary,
            })
        }
        Command::Sweep { file, k_grid, region } => {
            let space = load(file)?;
            let (pts, opts) = region_of(&space, region)?;
            let grid = parse_floats(k_grid)?;
            let r = curvature::singularity_sweep(&space, &pts, &grid, &opts).map_err(err)?;
            let summary = format!(
                "{} branching points; unbounded below: {}; no lower bound in sweep: {}",
                r.branching_witnesses.len(),
                r.unbounded_below,
                r.no_lower_bound_found_in_sweep
            );
            Ok(Outcome {
                passed: true,
                result: to_value(&r),
                summary,
            })
        }
        Command::Extend { cand } => extend(cand),
        Command::Boundary { cand } => {
            let (base, ambient) = (load(&cand.base)?, load(&cand.ambient)?);
            let c = candidate(&base, &ambient, cand)?;
            let b = extension::compute_boundary(&c);
            let summary = format!("{} future, {} past boundary points", b.future.len(), b.past.len());
            Ok(Outcome {
                passed: !b.lemma_violation,
                result: to_value(&b),
                summary,
            })
        }
        Command::Build { .. } | Command::Sprinkle { .. } => unreachable!("handled by write_space"),
    }
}

fn check(kind: CheckKind, space: &SpaceDescription) -> Res<Outcome> {
    let mut reports = Vec::new();
    let all = kind == CheckKind::All;
    if all || kind == CheckKind::Axioms {
        reports.push(checks::check_causal_space(space));
        reports.push(checks::check_prelength(space));
    }
    if all || kind == CheckKind::Ladder {
        reports.push(checks::check_causality_ladder(space));
    }
    if all || kind == CheckKind::Closed {
        reports.push(checks::check_locally_causally_closed(space));
        reports.push(checks::check_causally_path_connected(space));
    }
    if all || kind == CheckKind::Localisable {
        reports.push(checks::check_localisable(space));
    }
    if all || kind == CheckKind::LengthSpace {
        reports.push(curves::check_length_space(space));
    }
    let passed = reports.iter().all(|r| r.passed());
    let summary = reports.iter().map(|r| r.summary()).collect::<String>();
    Ok(Outcome {
        passed,
        result: json!({ "space": space.name(), "points": space.len(), "reports": reports }),
        summary,
    })
}

fn tau(space: &SpaceDescription, from: &str, to: &str) -> Res<Outcome> {
    let (a, b) = (parse_target(from)?, parse_target(to)?);
    let (value, source) = match (resolve(space, &a), resolve(space, &b)) {
        (Ok(p), Ok(q)) => (space.tau(p, q), "carrier"),
        (ra, rb) => {
            // off the sample: evaluate the closed form when there is one
            let g = space
                .geometry()
                .filter(|g| g.obstacles.is_empty())
                .ok_or_else(|| ra.err().or(rb.err()).unwrap_or_default())?;
            let coords = |t: &Target| -> Res<Vec<f64>> {
                match t {
                    Target::Coords(c) => Ok(c.clone()),
                    Target::Id(p) => space.coords(*p).map(<[f64]>::to_vec).ok_or_else(|| format!("point {p} has no coordinates")),
                }
            };
            let (ca, cb) = (coords(&a)?, coords(&b)?);
            if !(g.formula.contains(&ca) && g.formula.contains(&cb)) {
                return Err("point outside the domain of the formula".into());
            }
            (ExtReal::Finite(g.formula.tau(&ca, &cb).map_err(err)?), "formula")
        }
    };
    Ok(Outcome {
        passed: true,
        result: json!({ "from": from, "to": to, "tau": value, "source": source }),
        summary: format!("tau = {value}"),
    })
}

fn length(space: &SpaceDescription, points: Option<&str>, curve: Option<&Path>) -> Res<Outcome> {
    let c = match (points, curve) {
        (Some(p), _) => parse_chain(space, p)?,
        (None, Some(f)) => {
            let text = std::fs::read_to_string(f).map_err(|e| format!("{}: {e}", f.display()))?;
            io::from_json::<CausalCurve>(&text).map_err(err)?
        }
        (None, None) => return Err("pass --points or --curve".into()),
    };
    let class = curves::classify_curve(space, &c).map_err(err)?;
    let r = curves::tau_length(space, &c).map_err(err)?;
    Ok(Outcome {
        passed: true,
        summary: format!("L = {} ({class:?})", r.value),
        result: json!({ "class": class, "length": r }),
    })
}

fn geodesic(space: &SpaceDescription, from: Option<&str>, to: Option<&str>, points: Option<&str>) -> Res<Outcome> {
    let (curve, t) = match (from, to, points) {
        (Some(f), Some(t), _) => {
            let (x, y) = (resolve(space, &parse_target(f)?)?, resolve(space, &parse_target(t)?)?);
            let tt = curves::compute_t(space, x, y).map_err(err)?;
            (curves::find_maximal_curve(space, x, y).map_err(err)?, Some(tt))
        }
        (None, None, Some(p)) => (parse_chain(space, p)?, None),
        _ => return Err("pass --from and --to, or --points".into()),
    };
    let verdict = curves::is_geodesic(space, &curve).map_err(err)?;
    let length = curves::tau_length(space, &curve).map_err(err)?;
    let pts: Vec<Value> = curve.points.iter().map(|&p| coords_json(space, p)).collect();
    Ok(Outcome {
        passed: verdict.is_geodesic,
        summary: format!("geodesic: {}; L = {}", verdict.is_geodesic, length.value),
        result: json!({ "T": t, "curve": curve, "points": pts, "length": length.value, "verdict": verdict }),
    })
}

fn triangle(k: f64, sides: &str, samples: usize) -> Res<Outcome> {
    let s = parse_floats(sides)?;
    let [a, b, c] = s[..] else {
        return Err(format!("expected three side lengths, got {}", s.len()));
    };
    let sides = TriangleSides::new(a, b, c);
    if !models::check_size_bounds(sides, k).map_err(err)? {
        return Err(format!("sides ({a}, {b}, {c}) violate the size bounds for K = {k}"));
    }
    let model = ModelSpace::with_curvature(k);
    let tri = models::realize_triangle(&model, sides).map_err(err)?;
    let sample = |side| tri.side_samples(side, samples.max(2));
    Ok(Outcome {
        passed: true,
        summary: format!("x = {:?}, y = {:?}, z = {:?}", tri.x.coords, tri.y.coords, tri.z.coords),
        result: json!({
            "triangle": tri,
            "side_samples": { "xy": sample(Side::Xy), "yz": sample(Side::Yz), "xz": sample(Side::Xz) },
        }),
    })
}

fn region_of(space: &SpaceDescription, r: &RegionArgs) -> Res<(Vec<PointId>, ComparisonOptions)> {
    let pts = match &r.center {
        Some(c) => curvature::region_ball(space, &parse_floats(c)?, r.radius),
        None if space.len() <= FULL_REGION_LIMIT => space.ids().collect(),
        None => {
            return Err(format!(
                "the space has {} points; choose a region with --center and --radius",
                space.len()
            ))
        }
    };
    if pts.is_empty() {
        return Err("the region contains no points".into());
    }
    let opts = ComparisonOptions {
        timelike_only: r.timelike_only,
        max_triangles: r.max_triangles,
        ..ComparisonOptions::default()
    };
    Ok((pts, opts))
}

fn candidate<'a>(base: &'a SpaceDescription, ambient: &'a SpaceDescription, args: &CandidateArgs) -> Res<ExtensionCandidate<'a>> {
    match &args.map {
        Some(m) => {
            let emb = io::load_map_file(m, base.len()).map_err(err)?;
            ExtensionCandidate::new(base, ambient, emb).map_err(err)
        }
        None => ExtensionCandidate::inclusion(base, ambient).map_err(err),
    }
}

fn extend(args: &CandidateArgs) -> Res<Outcome> {
    let (base, ambient) = (load(&args.base)?, load(&args.ambient)?);
    let c = candidate(&base, &ambient, args)?;
    let ext = extension::check_extension(&c).map_err(err)?;
    let monotone = extension::check_tau_monotone(&c);
    let boundary = extension::compute_boundary(&c);
    let consistency = if ext.passed() {
        Some(extension::cross_check_inextendibility(&c, &CrossCheckBudget::default()).map_err(err)?)
    } else {
        None
    };
    let inconsistency = consistency.as_ref().is_some_and(|r| r.inconsistency);
    let passed = ext.passed() && matches!(monotone, MonotoneVerdict::Pass { .. }) && !boundary.lemma_violation && !inconsistency;
    let mut summary = ext.clauses.summary();
    summary.push_str(&format!(
        "boundary: {} future, {} past; failed hypotheses: {}",
        boundary.future.len(),
        boundary.past.len(),
        consistency.as_ref().map_or("-".into(), |r| r.failed_hypotheses.join(", "))
    ));
    Ok(Outcome {
        passed,
        summary,
        result: json!({
            "extension": ext,
            "tau_monotone": monotone,
            "boundary": boundary,
            "consistency": consistency,
        }),
    })
}

fn write_space(cli: &Cli) -> ExitCode {
    let built = match &cli.command {
        Command::Build {
            kind,
            h,
            extent,
            k,
            no_atlas,
            ambient_complete,
        } => build(kind, *h, extent.as_deref(), *k, *no_atlas, *ambient_complete),
        Command::Sprinkle {
            density,
            seed,
            k,
            region,
            no_atlas,
        } => sprinkle(*density, *seed, *k, region, *no_atlas),
        _ => unreachable!("only build and sprinkle write spaces"),
    };
    let space = match built {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let doc = io::space_to_document(&space);
    if let Err(e) = emit(cli, &to_value(&doc)) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if !cli.quiet {
        eprintln!("{}: {} points", space.name(), space.len());
    }
    ExitCode::SUCCESS
}

fn build(kind: &str, h: Option<f64>, extent: Option<&str>, k: f64, no_atlas: bool, ambient_complete: bool) -> Res<SpaceDescription> {
    let kind = ExemplarSpec::kind_from_name(kind, k).ok_or_else(|| format!("unknown exemplar kind {kind:?}"))?;
    let mut spec = ExemplarSpec::new(kind).with_ambient_complete(ambient_complete);
    if let Some(h) = h {
        spec = spec.with_resolution(h);
    }
    if let Some(e) = extent {
        let v = parse_floats(e)?;
        let [t0, t1, x0, x1] = v[..] else {
            return Err("extent is \"t0,t1,x0,x1\"".into());
        };
        spec = spec.with_extent([[t0, t1], [x0, x1]]);
    }
    if no_atlas {
        spec = spec.without_atlas();
    }
    spaces::build_exemplar(&spec).map_err(err)
}

fn sprinkle(density: f64, seed: u64, k: f64, region: &str, no_atlas: bool) -> Res<SpaceDescription> {
    let (shape, args) = region.split_once(':').ok_or("region is \"box:t0,t1,x0,x1\" or \"diamond:tc,xc,half\"")?;
    let v = parse_floats(args)?;
    let region = match (shape, &v[..]) {
        ("box", &[t0, t1, x0, x1]) => Region::Box {
            bounds: [[t0, t1], [x0, x1]],
        },
        ("diamond", &[tc, xc, half]) => Region::Diamond {
            center: [tc, xc],
            half,
        },
        _ => return Err(format!("bad region {region:?}")),
    };
    let spec = SprinklingSpec {
        density,
        region,
        model: ModelSpace::with_curvature(k),
        seed,
        with_atlas: !no_atlas,
    };
    spaces::sprinkle(&spec).map_err(err)
}
