//! Causal curvature bounds by triangle comparison against the model spaces,
//! branching of maximizers, and curvature-singularity sweeps.
//!
//! Curvature bounded below by `K` means `τ(p, q) ≤ τ̄(p̄, q̄)` for all pairs
//! of points on the sides of admissible triangles and their corresponding
//! points on comparison triangles in `M_K`; bounded above means `≥`.
//! Corresponding points sit at equal τ-fractions of their sides.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitmatrix::BitSet;
use crate::curves::{all_maximal_curves, CausalCurve, CurveError};
use crate::models::{self, check_size_bounds, realize_triangle, ComparisonTriangle, ModelError, ModelPoint, ModelSpace, Side, TriangleSides};
use crate::paths;
use crate::space::{Formula, PointId, SpaceDescription, SpaceError};
use crate::tolerance;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("region rejected at ({}, {}): {reason}", .pair.0, .pair.1)]
    RegionRejected { pair: (PointId, PointId), reason: String },
}

/// The two comparison directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `τ ≤ τ̄` on all compared pairs.
    BoundedBelow,
    /// `τ ≥ τ̄` on all compared pairs.
    BoundedAbove,
}

impl Direction {
    /// Compares within tolerance on `τ` or on `τ²`; the latter absorbs the
    /// square-root amplification of rounding on nearly null pairs.
    pub fn holds(self, tau: f64, tau_bar: f64) -> bool {
        let (lo, hi) = match self {
            Direction::BoundedBelow => (tau, tau_bar),
            Direction::BoundedAbove => (tau_bar, tau),
        };
        tolerance::approx_le(lo, hi) || tolerance::approx_le(lo * lo, hi * hi)
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "below" | "bounded_below" => Some(Direction::BoundedBelow),
            "above" | "bounded_above" => Some(Direction::BoundedAbove),
            _ => None,
        }
    }
}

/// Knobs of the triangle comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonOptions {
    /// Only triangles with `x ≪ y ≪ z`.
    pub timelike_only: bool,
    /// Fractions per side on formula spaces (`0, 1/(n−1), …, 1`).
    pub fractions: usize,
    /// Stop enumerating after this many triangles.
    pub max_triangles: usize,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        Self {
            timelike_only: false,
            fractions: 11,
            max_triangles: 200_000,
        }
    }
}

/// A triangle `x ≪ y ≤ z` or `x ≤ y ≪ z` with maximal sides; a side
/// between equal vertices is the constant chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibleTriangle {
    pub vertices: [PointId; 3],
    /// Sides `xy`, `yz`, `xz` as maximal chains.
    pub sides: [Vec<PointId>; 3],
    pub side_lengths: TriangleSides,
}

/// The points of the space within `radius` of `center` (Euclidean).
pub fn region_ball(space: &SpaceDescription, center: &[f64], radius: f64) -> Vec<PointId> {
    space
        .ids()
        .filter(|&p| {
            space
                .coords(p)
                .is_some_and(|c| c.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() < radius)
        })
        .collect()
}

/// Preferred maximal chains from each region point to every point.
fn region_trees(space: &SpaceDescription, region: &[PointId]) -> Result<Vec<paths::PathTree>, CurvatureError> {
    let (order, pos) = space.step_order()?;
    Ok(region
        .iter()
        .map(|x| paths::preferred_tree(space.steps(), order, pos, x.0, None, |i, j| space.tau_f(PointId(i), PointId(j))))
        .collect())
}

/// All admissible triangles with vertices in the region, in lexicographic
/// order of region positions. Every related pair must be finite and joined
/// by a maximizer, otherwise the region is rejected.
pub fn enumerate_triangles(
    space: &SpaceDescription,
    region: &[PointId],
    opts: &ComparisonOptions,
) -> Result<Vec<AdmissibleTriangle>, CurvatureError> {
    for &p in region {
        space.check_id(p)?;
    }
    for &x in region {
        for &y in region {
            if x != y && space.le(x, y) && !space.tau(x, y).is_finite() {
                return Err(CurvatureError::RegionRejected {
                    pair: (x, y),
                    reason: "infinite time separation".into(),
                });
            }
        }
    }
    let trees = region_trees(space, region)?;
    let m = region.len();
    // side[i][j]: maximal chain between region points i and j, if related
    let mut side: Vec<Vec<Option<Vec<PointId>>>> = vec![vec![None; m]; m];
    for i in 0..m {
        for j in 0..m {
            let (x, y) = (region[i], region[j]);
            if i == j {
                side[i][j] = Some(vec![x]);
            } else if space.le(x, y) {
                let chain = trees[i].chain_to(y.0).filter(|_| tolerance::approx_eq(trees[i].exact[y.0], space.tau_f(x, y)));
                let Some(chain) = chain else {
                    return Err(CurvatureError::RegionRejected {
                        pair: (x, y),
                        reason: "no maximal chain".into(),
                    });
                };
                side[i][j] = Some(chain.into_iter().map(PointId).collect());
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let (x, y, z) = (region[i], region[j], region[k]);
                let admissible = if opts.timelike_only {
                    space.ll(x, y) && space.ll(y, z)
                } else {
                    (space.ll(x, y) && space.le(y, z)) || (space.le(x, y) && space.ll(y, z))
                };
                if !admissible {
                    continue;
                }
                if out.len() == opts.max_triangles {
                    return Ok(out);
                }
                let s = |a: usize, b: usize| side[a][b].clone().expect("related pair has a side");
                out.push(AdmissibleTriangle {
                    vertices: [x, y, z],
                    sides: [s(i, j), s(j, k), s(i, k)],
                    side_lengths: TriangleSides::new(space.tau_f(x, y), space.tau_f(y, z), space.tau_f(x, z)),
                });
            }
        }
    }
    Ok(out)
}

/// A point on a side of a triangle: a carrier point, or coordinates on a
/// formula geodesic.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SidePoint {
    Carrier(PointId),
    Coords(Vec<f64>),
}

/// A compared pair violating the bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureWitness {
    pub triangle: AdmissibleTriangle,
    pub comparison: ComparisonTriangle,
    pub p: SidePoint,
    pub q: SidePoint,
    pub p_side: Side,
    pub q_side: Side,
    pub p_fraction: f64,
    pub q_fraction: f64,
    pub tau: f64,
    pub tau_bar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail { witness: Box<CurvatureWitness> },
    /// No admissible triangle within the size bounds.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureVerdict {
    pub direction: Direction,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub triangles_compared: usize,
    /// Triangles outside the size bounds for `K`.
    pub triangles_skipped: usize,
    pub pairs_compared: usize,
    /// Largest `|τ − τ̄|` over the compared pairs.
    pub max_abs_gap: f64,
}

impl CurvatureVerdict {
    pub fn is_fail(&self) -> bool {
        matches!(self.outcome, Outcome::Fail { .. })
    }
}

/// Points along one side with their τ-fractions.
fn side_points(
    space: &SpaceDescription,
    formula: Option<Formula>,
    chain: &[PointId],
    fractions: usize,
) -> Result<Vec<(SidePoint, f64)>, CurvatureError> {
    let (a, b) = (chain[0], chain[chain.len() - 1]);
    let len = space.tau_f(a, b);
    if let Some(f) = formula {
        let (pa, pb) = (space.coords(a).expect("coordinates"), space.coords(b).expect("coordinates"));
        let n = fractions.max(2);
        return (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                Ok((SidePoint::Coords(f.interpolate(pa, pb, s)?), s))
            })
            .collect();
    }
    let mut acc = 0.0;
    let mut out = vec![(SidePoint::Carrier(a), 0.0)];
    for w in chain.windows(2) {
        acc += space.tau_f(w[0], w[1]);
        out.push((SidePoint::Carrier(w[1]), (acc / len).min(1.0)));
    }
    Ok(out)
}

/// A side point with its fraction and its corresponding comparison point.
struct SideSample {
    point: SidePoint,
    /// Coordinates, kept for formula spaces.
    coords: Option<Vec<f64>>,
    /// Cover point and embedding on a model-space formula.
    model: Option<(ModelPoint, [f64; 3])>,
    fraction: f64,
    bar: ModelPoint,
    bar_embedding: [f64; 3],
}

fn sample_tau(space: &SpaceDescription, formula: Option<Formula>, p: &SideSample, q: &SideSample) -> Result<f64, CurvatureError> {
    Ok(match (&p.point, &q.point, formula) {
        (SidePoint::Carrier(a), SidePoint::Carrier(b), _) => space.tau_f(*a, *b),
        (_, _, Some(Formula::Model(m))) => {
            let ((pp, pe), (qp, qe)) = (p.model.expect("model point"), q.model.expect("model point"));
            models::tau_model_embedded(&m, pp, pe, qp, qe)?.to_f64()
        }
        (_, _, Some(f)) => f.tau(
            p.coords.as_deref().expect("coordinates on formula spaces"),
            q.coords.as_deref().expect("coordinates on formula spaces"),
        )?,
        _ => unreachable!("coordinates only on formula spaces"),
    })
}

/// Compares every admissible triangle in the region with its comparison
/// triangle in `M_K`, on all pairs of points of its timelike sides.
pub fn check_curvature_bound(
    space: &SpaceDescription,
    region: &[PointId],
    k: f64,
    direction: Direction,
    opts: &ComparisonOptions,
) -> Result<CurvatureVerdict, CurvatureError> {
    let model = ModelSpace::with_curvature(k);
    model.validate()?;
    let formula = if space.is_formula_space() { space.formula() } else { None };
    let triangles = enumerate_triangles(space, region, opts)?;
    let mut verdict = CurvatureVerdict {
        direction,
        k,
        outcome: Outcome::Vacuous,
        triangles_compared: 0,
        triangles_skipped: 0,
        pairs_compared: 0,
        max_abs_gap: 0.0,
    };
    for tri in triangles {
        if !check_size_bounds(tri.side_lengths, k)? {
            verdict.triangles_skipped += 1;
            continue;
        }
        let comparison = match realize_triangle(&model, tri.side_lengths) {
            Ok(c) => c,
            // degenerate anti-de Sitter triangles past the conjugate point
            Err(ModelError::Infeasible(_)) if k < 0.0 && tri.side_lengths.is_degenerate() => {
                verdict.triangles_skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        verdict.triangles_compared += 1;
        let sides = [Side::Xy, Side::Yz, Side::Xz];
        let mut timelike: Vec<(Side, Vec<SideSample>)> = Vec::new();
        for (s, chain) in sides.iter().zip(&tri.sides) {
            if comparison.side(*s).2 <= tolerance::current().abs {
                continue;
            }
            let samples = side_points(space, formula, chain, opts.fractions)?
                .into_iter()
                .map(|(point, fraction)| {
                    let coords = match (&point, formula) {
                        (SidePoint::Coords(v), _) => Some(v.clone()),
                        (SidePoint::Carrier(a), Some(_)) => space.coords(*a).map(<[f64]>::to_vec),
                        (SidePoint::Carrier(_), None) => None,
                    };
                    let bar = models::corresponding_point(&comparison, *s, fraction)?;
                    let on_model = match (formula, &coords) {
                        (Some(Formula::Model(m)), Some(c)) => {
                            let mp = ModelPoint::new(c[0], c[1]);
                            Some((mp, m.embed(mp)))
                        }
                        _ => None,
                    };
                    Ok(SideSample {
                        point,
                        coords,
                        model: on_model,
                        fraction,
                        bar,
                        bar_embedding: model.embed(bar),
                    })
                })
                .collect::<Result<_, CurvatureError>>()?;
            timelike.push((*s, samples));
        }
        for (s1, pts1) in &timelike {
            for (s2, pts2) in &timelike {
                for p in pts1 {
                    for q in pts2 {
                        let tau = sample_tau(space, formula, p, q)?;
                        let tau_bar = models::tau_model_embedded(&model, p.bar, p.bar_embedding, q.bar, q.bar_embedding)?.to_f64();
                        verdict.pairs_compared += 1;
                        verdict.max_abs_gap = verdict.max_abs_gap.max((tau - tau_bar).abs());
                        if !direction.holds(tau, tau_bar) {
                            verdict.outcome = Outcome::Fail {
                                witness: Box::new(CurvatureWitness {
                                    triangle: tri.clone(),
                                    comparison,
                                    p: p.point.clone(),
                                    q: q.point.clone(),
                                    p_side: *s1,
                                    q_side: *s2,
                                    p_fraction: p.fraction,
                                    q_fraction: q.fraction,
                                    tau,
                                    tau_bar,
                                }),
                            };
                            return Ok(verdict);
                        }
                    }
                }
            }
        }
    }
    if verdict.triangles_compared > 0 {
        verdict.outcome = Outcome::Pass;
    }
    Ok(verdict)
}

/// Two maximal chains from the same start that agree up to `point` and
/// then separate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchingWitness {
    pub point: PointId,
    pub chains: [CausalCurve; 2],
}

/// Whether two chains from a common start share a prefix ending at some
/// `w` and then continue to points the other chain avoids; returns `w`.
fn separation(a: &[usize], b: &[usize]) -> Option<usize> {
    let common = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    if common == 0 || common >= a.len() || common >= b.len() {
        return None;
    }
    let (na, nb) = (a[common], b[common]);
    (!b.contains(&na) && !a.contains(&nb)).then_some(a[common - 1])
}

/// Branching points of maximizers starting in the region: either two
/// maximal chains from `x` to different endpoints share a nontrivial
/// initial segment and then separate, or two maximizers between the same
/// endpoints separate. At most one witness per branching point.
pub fn detect_branching(
    space: &SpaceDescription,
    region: &[PointId],
    limit: usize,
) -> Result<Vec<BranchingWitness>, CurvatureError> {
    let trees = region_trees(space, region)?;
    let mut seen = BitSet::new(space.len());
    let mut out = Vec::new();
    let curve = |c: &[usize]| CausalCurve::from_points(c.iter().map(|&i| PointId(i)));
    for (i, &x) in region.iter().enumerate() {
        let chains: Vec<(PointId, Vec<usize>)> = region
            .iter()
            .filter(|&&y| y != x && space.le(x, y))
            .filter_map(|&y| trees[i].chain_to(y.0).map(|c| (y, c)))
            .collect();
        for (a, (_, ca)) in chains.iter().enumerate() {
            for (_, cb) in &chains[a + 1..] {
                if let Some(w) = separation(ca, cb) {
                    if w != x.0 && !seen.contains(w) {
                        seen.insert(w);
                        out.push(BranchingWitness {
                            point: PointId(w),
                            chains: [curve(ca), curve(cb)],
                        });
                        if out.len() == limit {
                            return Ok(out);
                        }
                    }
                }
            }
        }
        for (y, _) in &chains {
            let all = all_maximal_curves(space, x, *y, 16)?;
            let idx: Vec<Vec<usize>> = all.iter().map(|c| c.points.iter().map(|p| p.0).collect()).collect();
            'pairs: for a in 0..idx.len() {
                for b in a + 1..idx.len() {
                    if let Some(w) = separation(&idx[a], &idx[b]) {
                        if !seen.contains(w) {
                            seen.insert(w);
                            out.push(BranchingWitness {
                                point: PointId(w),
                                chains: [all[a].clone(), all[b].clone()],
                            });
                            if out.len() == limit {
                                return Ok(out);
                            }
                        }
                        break 'pairs;
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    pub branching_witnesses: Vec<BranchingWitness>,
    /// Certified only by a branching witness.
    pub unbounded_below: bool,
    /// Every `K` of the sweep failed the lower bound (evidence, not proof).
    pub no_lower_bound_found_in_sweep: bool,
    pub sweep_results: Vec<CurvatureVerdict>,
}

/// Both directions for every `K` of the grid, plus branching detection.
pub fn singularity_sweep(
    space: &SpaceDescription,
    region: &[PointId],
    k_grid: &[f64],
    opts: &ComparisonOptions,
) -> Result<SingularityReport, CurvatureError> {
    let mut sweep_results = Vec::new();
    for &k in k_grid {
        for direction in [Direction::BoundedBelow, Direction::BoundedAbove] {
            sweep_results.push(check_curvature_bound(space, region, k, direction, opts)?);
        }
    }
    let branching_witnesses = detect_branching(space, region, 16)?;
    let below: Vec<&CurvatureVerdict> = sweep_results.iter().filter(|v| v.direction == Direction::BoundedBelow).collect();
    Ok(SingularityReport {
        unbounded_below: !branching_witnesses.is_empty(),
        no_lower_bound_found_in_sweep: !below.is_empty() && below.iter().all(|v| v.is_fail()),
        branching_witnesses,
        sweep_results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_exemplar, ExemplarKind, ExemplarSpec};

    fn patch(kind: ExemplarKind, h: f64, e: f64) -> SpaceDescription {
        let spec = ExemplarSpec::new(kind).with_resolution(h).with_extent([[-e, e], [-e, e]]).without_atlas();
        build_exemplar(&spec).unwrap()
    }

    fn all_points(space: &SpaceDescription) -> Vec<PointId> {
        space.ids().collect()
    }

    #[test]
    fn minkowski_compares_equal_to_flat_model_both_ways() {
        let s = patch(ExemplarKind::MinkowskiPatch, 0.5, 1.0);
        let region = all_points(&s);
        for dir in [Direction::BoundedBelow, Direction::BoundedAbove] {
            let v = check_curvature_bound(&s, &region, 0.0, dir, &ComparisonOptions::default()).unwrap();
            assert_eq!(v.outcome, Outcome::Pass, "{dir:?}");
            assert!(v.triangles_compared > 0);
            assert!(v.max_abs_gap < 1e-6, "gap {}", v.max_abs_gap);
        }
    }

    #[test]
    fn de_sitter_patch_matches_its_own_model() {
        let s = patch(ExemplarKind::ModelPatch { curvature: 1.0 }, 0.25, 0.5);
        let region = all_points(&s);
        let opts = ComparisonOptions { max_triangles: 2000, ..Default::default() };
        let v = check_curvature_bound(&s, &region, 1.0, Direction::BoundedBelow, &opts).unwrap();
        assert_eq!(v.outcome, Outcome::Pass);
        assert!(v.max_abs_gap < 1e-6, "gap {}", v.max_abs_gap);
    }

    #[test]
    fn fan_fails_lower_bound_and_branches_at_the_origin() {
        let fan = build_exemplar(&ExemplarSpec::new(ExemplarKind::FanSpace)).unwrap();
        let region = region_ball(&fan, &[0.0, 0.0, 0.0], 2.3);
        let opts = ComparisonOptions { timelike_only: true, ..Default::default() };
        let v = check_curvature_bound(&fan, &region, 0.0, Direction::BoundedBelow, &opts).unwrap();
        let Outcome::Fail { witness } = &v.outcome else { panic!("expected failure, got {:?}", v.outcome) };
        assert!(witness.tau > witness.tau_bar);
        let origin = fan.locate(&[0.0, 0.0, 0.0]).unwrap();
        let b = detect_branching(&fan, &region, 64).unwrap();
        assert!(b.iter().any(|w| w.point == origin), "{:?}", b.iter().map(|w| w.point).collect::<Vec<_>>());
    }

    #[test]
    fn minkowski_has_no_branching_but_the_diamond_does() {
        let s = patch(ExemplarKind::MinkowskiPatch, 0.5, 1.0);
        assert!(detect_branching(&s, &all_points(&s), 8).unwrap().is_empty());
        let toy = build_exemplar(&ExemplarSpec::new(ExemplarKind::ToyDag)).unwrap();
        let b = detect_branching(&toy, &all_points(&toy), 8).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].point, PointId(0));
    }

    #[test]
    fn infinite_separation_rejects_the_region() {
        let cyl = build_exemplar(&ExemplarSpec::new(ExemplarKind::TimelikeCylinder)).unwrap();
        let err = enumerate_triangles(&cyl, &all_points(&cyl), &ComparisonOptions::default()).unwrap_err();
        assert!(matches!(err, CurvatureError::RegionRejected { .. }));
    }

    #[test]
    fn sweep_flags_unbounded_below_only_with_branching() {
        let s = patch(ExemplarKind::MinkowskiPatch, 0.5, 1.0);
        let r = singularity_sweep(&s, &all_points(&s), &[-1.0, 0.0, 1.0], &ComparisonOptions::default()).unwrap();
        assert!(!r.unbounded_below);
        assert!(!r.no_lower_bound_found_in_sweep);
        assert_eq!(r.sweep_results.len(), 6);
    }
}
