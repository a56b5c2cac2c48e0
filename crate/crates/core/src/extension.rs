//! Auditing supplied extensions `ι: X → X̃`: the five extension clauses,
//! monotonicity of the time separation under `ι`, the future and past
//! boundaries of the image, and the consistency cross-check against the
//! inextendibility theorems.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bitmatrix::BitSet;
use crate::curvature::{self, ComparisonOptions, CurvatureError, Direction, Outcome};
use crate::curves::{check_tc, classify_curve, tau_length, CausalCurve, CurveError, TcBudget, TcReport};
use crate::paths;
use crate::space::checks::{check_causality_ladder, check_localisable, effective_resolution, resolution_neighbours};
use crate::space::{AxiomReport, PointId, SpaceDescription, SpaceError, Verdict, Witness};
use crate::spaces::ExemplarKind;
use crate::tolerance;

#[derive(Debug, Error)]
pub enum ExtensionError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error("embedding has {got} entries for {expected} base points")]
    NotTotal { expected: usize, got: usize },
    #[error("embedding is not injective: base points {0} and {1} share an image")]
    NotInjective(PointId, PointId),
    #[error("embedding sends {0} outside the ambient carrier")]
    OutOfRange(PointId),
    #[error("base point {0} has no ambient point at its coordinates")]
    NoImage(PointId),
}

/// A base space, an ambient space and an injective map between carriers.
#[derive(Debug, Clone)]
pub struct ExtensionCandidate<'a> {
    pub base: &'a SpaceDescription,
    pub ambient: &'a SpaceDescription,
    embedding: Vec<PointId>,
    image: BitSet,
}

impl<'a> ExtensionCandidate<'a> {
    pub fn new(base: &'a SpaceDescription, ambient: &'a SpaceDescription, embedding: Vec<PointId>) -> Result<Self, ExtensionError> {
        if embedding.len() != base.len() {
            return Err(ExtensionError::NotTotal {
                expected: base.len(),
                got: embedding.len(),
            });
        }
        let mut owner: Vec<Option<PointId>> = vec![None; ambient.len()];
        for (x, &ix) in base.ids().zip(&embedding) {
            if ix.0 >= ambient.len() {
                return Err(ExtensionError::OutOfRange(x));
            }
            if let Some(prev) = owner[ix.0] {
                return Err(ExtensionError::NotInjective(prev, x));
            }
            owner[ix.0] = Some(x);
        }
        let image = BitSet::from_indices(ambient.len(), embedding.iter().map(|p| p.0));
        Ok(Self {
            base,
            ambient,
            embedding,
            image,
        })
    }

    /// The inclusion matching coordinates; base coordinates are padded with
    /// zeros up to the ambient dimension.
    pub fn inclusion(base: &'a SpaceDescription, ambient: &'a SpaceDescription) -> Result<Self, ExtensionError> {
        let dim = ambient.coords(PointId(0)).map_or(0, <[f64]>::len);
        let embedding = base
            .ids()
            .map(|x| {
                let mut c = base.coords(x).ok_or(ExtensionError::NoImage(x))?.to_vec();
                c.resize(dim.max(c.len()), 0.0);
                ambient.locate(&c).ok_or(ExtensionError::NoImage(x))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(base, ambient, embedding)
    }

    pub fn embedding(&self) -> &[PointId] {
        &self.embedding
    }

    pub fn iota(&self, x: PointId) -> PointId {
        self.embedding[x.0]
    }

    pub fn in_image(&self, p: PointId) -> bool {
        self.image.contains(p.0)
    }

    fn map_curve(&self, c: &CausalCurve) -> CausalCurve {
        CausalCurve::from_points(c.points.iter().map(|&p| self.iota(p)))
    }
}

pub const CLAUSES: [&str; 5] = [
    "(i) connectedness",
    "(ii) metric isometry",
    "(iii) proper open image",
    "(iv) relation preservation",
    "(v) curve correspondence",
];

/// Verdicts of the five clauses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionReport {
    pub clauses: AxiomReport,
    /// Image points whose smallest nontrivial basis neighbourhood leaves
    /// the image, with the complement no closer than the resolution.
    pub frontier_points: Vec<PointId>,
    pub curves_checked: usize,
}

impl ExtensionReport {
    /// Every clause passes (a not-checkable clause does not).
    pub fn passed(&self) -> bool {
        self.clauses.items.iter().all(|i| matches!(i.verdict, Verdict::Pass | Verdict::Flagged { .. }))
    }

    /// First clause that does not pass, with its verdict.
    pub fn first_failing(&self) -> Option<(&str, &Verdict)> {
        self.clauses
            .items
            .iter()
            .find(|i| !matches!(i.verdict, Verdict::Pass | Verdict::Flagged { .. }))
            .map(|i| (i.axiom.as_str(), &i.verdict))
    }
}

/// Settings of the clause (v) curve suite.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSuite {
    pub random_chains: usize,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for CurveSuite {
    fn default() -> Self {
        Self {
            random_chains: 200,
            max_steps: 10,
            seed: 0,
        }
    }
}

/// Audits clauses (i)–(v) with the default curve suite.
pub fn check_extension(cand: &ExtensionCandidate) -> Result<ExtensionReport, ExtensionError> {
    check_extension_with(cand, &CurveSuite::default())
}

pub fn check_extension_with(cand: &ExtensionCandidate, suite: &CurveSuite) -> Result<ExtensionReport, ExtensionError> {
    let mut clauses = AxiomReport::new("extension");
    clauses.push(CLAUSES[0], connectedness(cand.ambient));
    clauses.push(CLAUSES[1], isometry(cand));
    let (open, frontier_points) = openness(cand);
    clauses.push(CLAUSES[2], open);
    clauses.push(CLAUSES[3], relations(cand));
    let (curves, curves_checked) = curve_correspondence(cand, suite)?;
    clauses.push(CLAUSES[4], curves);
    Ok(ExtensionReport {
        clauses,
        frontier_points,
        curves_checked,
    })
}

/// ε-chain connectedness with `ε = 1.5 h`.
fn connectedness(ambient: &SpaceDescription) -> Verdict {
    let n = ambient.len();
    if n == 0 {
        return Verdict::Pass;
    }
    let Some(h) = effective_resolution(ambient) else {
        return Verdict::not_checkable("no resolution");
    };
    let nb = resolution_neighbours(ambient, h);
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &nb[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    match seen.iter().position(|s| !s) {
        None => Verdict::Pass,
        Some(far) => Verdict::fail(Witness::new([0, far], format!("no 1.5h-chain (h = {h}) joins the points"))),
    }
}

fn isometry(cand: &ExtensionCandidate) -> Verdict {
    for x in cand.base.ids() {
        for y in cand.base.ids().skip(x.0 + 1) {
            let (d, dt) = (cand.base.dist(x, y), cand.ambient.dist(cand.iota(x), cand.iota(y)));
            if !tolerance::approx_eq(d, dt) {
                return Verdict::fail(Witness::new([x.0, y.0], "d~(iota x, iota y) != d(x, y)").with_values([d, dt]));
            }
        }
    }
    Verdict::Pass
}

/// Properness, and openness in the ambient basis: every image point has a
/// basis set with more than one point inside the image, or else the
/// complement stays at least one resolution step away from it.
fn openness(cand: &ExtensionCandidate) -> (Verdict, Vec<PointId>) {
    let amb = cand.ambient;
    let Some(outside) = amb.ids().find(|&p| !cand.in_image(p)) else {
        return (Verdict::fail(Witness::new([], "image is the whole ambient carrier")), vec![]);
    };
    let Some(basis) = amb.basis() else {
        return (Verdict::not_checkable("ambient has no neighbourhood basis"), vec![]);
    };
    let h = effective_resolution(amb).unwrap_or(0.0);
    let mut frontier = Vec::new();
    for x in cand.base.ids() {
        let ix = cand.iota(x);
        let inside = basis
            .sets(amb, ix)
            .iter()
            .filter(|u| u.len() > 1)
            .any(|u| u.is_subset_of(&cand.image));
        if inside {
            continue;
        }
        let nearest = amb
            .ids()
            .filter(|&p| !cand.in_image(p))
            .map(|p| (p, amb.dist(ix, p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((outside, f64::INFINITY));
        if nearest.1 < 0.99 * h {
            return (
                Verdict::fail(
                    Witness::new([ix.0, nearest.0 .0], "complement accumulates below the resolution at an image point")
                        .with_values([nearest.1, h]),
                ),
                frontier,
            );
        }
        frontier.push(ix);
    }
    (Verdict::Pass, frontier)
}

fn relations(cand: &ExtensionCandidate) -> Verdict {
    let (b, a) = (cand.base, cand.ambient);
    for x in b.ids() {
        for y in b.ids() {
            let (ix, iy) = (cand.iota(x), cand.iota(y));
            if b.le(x, y) && !a.le(ix, iy) {
                return Verdict::fail(Witness::new([x.0, y.0], "x <= y but not iota x <= iota y"));
            }
            if b.ll(x, y) && !a.ll(ix, iy) {
                return Verdict::fail(Witness::new([x.0, y.0], "x << y but not iota x << iota y"));
            }
        }
    }
    Verdict::Pass
}

/// The deterministic curve suite: a maximal chain for every related pair
/// plus seeded random step walks.
pub fn curve_suite(base: &SpaceDescription, suite: &CurveSuite) -> Result<Vec<CausalCurve>, ExtensionError> {
    let mut out = Vec::new();
    let (order, pos) = base.step_order()?;
    for x in base.ids() {
        let tree = paths::preferred_tree(base.steps(), order, pos, x.0, None, |i, j| base.tau_f(PointId(i), PointId(j)));
        for y in base.ids() {
            if y != x && base.le(x, y) {
                if let Some(c) = tree.chain_to(y.0) {
                    out.push(CausalCurve::from_points(c.into_iter().map(PointId)));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed);
    let n = base.len();
    for _ in 0..suite.random_chains {
        if n == 0 {
            break;
        }
        let mut cur = rng.gen_range(0..n);
        let mut chain = vec![PointId(cur)];
        let steps = rng.gen_range(1..=suite.max_steps.max(1));
        for _ in 0..steps {
            let next: Vec<usize> = base.steps().row_iter(cur).filter(|&j| j != cur).collect();
            let Some(&j) = next.choose(&mut rng) else { break };
            chain.push(PointId(j));
            cur = j;
        }
        if chain.len() > 1 {
            out.push(CausalCurve::from_points(chain));
        }
    }
    Ok(out)
}

fn curve_correspondence(cand: &ExtensionCandidate, suite: &CurveSuite) -> Result<(Verdict, usize), ExtensionError> {
    let curves = curve_suite(cand.base, suite)?;
    for c in &curves {
        let image = cand.map_curve(c);
        let (cb, ca) = (classify_curve(cand.base, c)?, classify_curve(cand.ambient, &image)?);
        let pts = || c.points.iter().map(|p| p.0);
        if cb != ca {
            return Ok((
                Verdict::fail(Witness::new(pts(), format!("classified {cb:?} in the base but {ca:?} in the ambient"))),
                curves.len(),
            ));
        }
        if matches!(cb, crate::curves::CurveClass::Invalid { .. }) {
            continue;
        }
        let (lb, la) = (tau_length(cand.base, c)?.value, tau_length(cand.ambient, &image)?.value);
        if !lb.approx_eq(la) {
            return Ok((
                Verdict::fail(Witness::new(pts(), "tau-length not preserved").with_values([lb.to_f64(), la.to_f64()])),
                curves.len(),
            ));
        }
    }
    Ok((Verdict::Pass, curves.len()))
}

/// Result of comparing `τ̃ ∘ (ι × ι)` with `τ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MonotoneVerdict {
    Pass {
        /// Pairs with `τ̃ > τ` beyond tolerance.
        strict_pairs: usize,
    },
    Fail {
        pair: (PointId, PointId),
        tau: f64,
        tau_ambient: f64,
    },
}

/// `τ̃(ι x, ι y) ≥ τ(x, y)` for all base pairs, within tolerance.
pub fn check_tau_monotone(cand: &ExtensionCandidate) -> MonotoneVerdict {
    let mut strict_pairs = 0;
    for x in cand.base.ids() {
        for y in cand.base.ids() {
            let (t, tt) = (cand.base.tau(x, y), cand.ambient.tau(cand.iota(x), cand.iota(y)));
            if !(tt.approx_eq(t) || tt > t) {
                return MonotoneVerdict::Fail {
                    pair: (x, y),
                    tau: t.to_f64(),
                    tau_ambient: tt.to_f64(),
                };
            }
            if !tt.approx_eq(t) {
                strict_pairs += 1;
            }
        }
    }
    MonotoneVerdict::Pass { strict_pairs }
}

/// A boundary point together with a timelike chain that stays in the image
/// until its final (future boundary) or first (past boundary) point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachingCurve {
    pub point: PointId,
    pub curve: CausalCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    /// Ambient points of `∂⁺`.
    pub future: Vec<PointId>,
    /// Ambient points of `∂⁻`.
    pub past: Vec<PointId>,
    pub reaching_curves: Vec<ReachingCurve>,
    /// `∂⁺ ∪ ∂⁻` is empty, contradicting the boundary lemma.
    pub lemma_violation: bool,
}

/// Up to four further collinear image points continuing `q` away from
/// `p`, then `q`, then `p` (or the reverse for the past boundary).
fn reaching_chain(cand: &ExtensionCandidate, p: PointId, q: PointId, future: bool) -> CausalCurve {
    let amb = cand.ambient;
    let mut back = vec![q];
    if let (Some(cp), Some(cq)) = (amb.coords(p), amb.coords(q)) {
        let delta: Vec<f64> = cq.iter().zip(cp).map(|(a, b)| a - b).collect();
        let mut cur = cq.to_vec();
        for _ in 0..4 {
            cur = cur.iter().zip(&delta).map(|(a, d)| a + d).collect();
            match amb.locate(&cur) {
                Some(r) if cand.in_image(r) => back.push(r),
                _ => break,
            }
        }
    }
    let mut pts: Vec<PointId> = back.into_iter().rev().collect();
    pts.push(p);
    if !future {
        pts.reverse();
    }
    CausalCurve::from_points(pts)
}

/// Ambient points outside the image, within one resolution step of it, and
/// joined to an image point by an elementary timelike step.
pub fn compute_boundary(cand: &ExtensionCandidate) -> BoundaryReport {
    let amb = cand.ambient;
    let h = effective_resolution(amb).unwrap_or(f64::INFINITY);
    let nb = resolution_neighbours(amb, h);
    let (mut future, mut past, mut reaching_curves) = (Vec::new(), Vec::new(), Vec::new());
    for p in amb.ids().filter(|&p| !cand.in_image(p)) {
        let near: Vec<PointId> = nb[p.0].iter().map(|&i| PointId(i)).filter(|&q| cand.in_image(q)).collect();
        if let Some(&q) = near.iter().find(|&&q| amb.is_step(q, p) && amb.ll(q, p)) {
            future.push(p);
            reaching_curves.push(ReachingCurve {
                point: p,
                curve: reaching_chain(cand, p, q, true),
            });
        }
        if let Some(&q) = near.iter().find(|&&q| amb.is_step(p, q) && amb.ll(p, q)) {
            past.push(p);
            reaching_curves.push(ReachingCurve {
                point: p,
                curve: reaching_chain(cand, p, q, false),
            });
        }
    }
    BoundaryReport {
        lemma_violation: future.is_empty() && past.is_empty(),
        future,
        past,
        reaching_curves,
    }
}

/// Budget of the consistency cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckBudget {
    pub tc: TcBudget,
    pub k_grid: Vec<f64>,
    /// Radius of the ambient region around the boundary used for the
    /// curvature sweep.
    pub region_radius: f64,
    pub comparison: ComparisonOptions,
}

impl Default for CrossCheckBudget {
    fn default() -> Self {
        Self {
            tc: TcBudget::default(),
            k_grid: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            region_radius: 1.0,
            comparison: ComparisonOptions {
                timelike_only: true,
                ..Default::default()
            },
        }
    }
}

/// The hypotheses of the inextendibility theorems, evaluated on a
/// candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypotheses {
    pub base_strongly_causal: bool,
    pub base_tc: bool,
    pub ambient_regular: bool,
    /// Smallest `K` of the sweep at which the ambient is bounded above.
    pub ambient_bounded_above_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub hypotheses: Hypotheses,
    /// All hypotheses hold together with an extension: a bug or a
    /// breakdown of the surrogates.
    pub inconsistency: bool,
    pub failed_hypotheses: Vec<String>,
    pub tc_report: Option<TcReport>,
    /// Branching of maximizers in the ambient sweep region.
    pub ambient_unbounded_below: bool,
}

/// Names the failed hypotheses, or raises an inconsistency when none fails.
pub fn assess(hypotheses: Hypotheses) -> (bool, Vec<String>) {
    let mut failed = Vec::new();
    if !hypotheses.base_strongly_causal {
        failed.push("base strongly causal".to_string());
    }
    if !hypotheses.base_tc {
        failed.push("base (TC)".to_string());
    }
    if !hypotheses.ambient_regular {
        failed.push("ambient regular".to_string());
    }
    if hypotheses.ambient_bounded_above_at.is_none() {
        failed.push("ambient curvature bounded above".to_string());
    }
    (failed.is_empty(), failed)
}

/// Evaluates the hypothesis triad of the inextendibility theorems on a
/// candidate that passes the extension audit. Never a proof of
/// inextendibility: it only checks that not all hypotheses hold at once.
pub fn cross_check_inextendibility(cand: &ExtensionCandidate, budget: &CrossCheckBudget) -> Result<ConsistencyReport, ExtensionError> {
    let ladder = check_causality_ladder(cand.base);
    let base_strongly_causal = ladder.get("strong causality").is_some_and(|v| !v.is_fail());
    let tc_report = match check_tc(cand.base, &budget.tc) {
        Ok(r) => Some(r),
        Err(CurveError::NoAtlas | CurveError::NoCoordinates) => None,
        Err(e) => return Err(e.into()),
    };
    let base_tc = tc_report.as_ref().is_some_and(|r| r.holds_within_budget);
    let ambient_regular = cand.ambient.atlas().is_some_and(|a| a.regular)
        && check_localisable(cand.ambient).get("(iv) regularity").is_some_and(|v| !v.is_fail());
    let region = sweep_region(cand, budget.region_radius);
    let mut ambient_bounded_above_at = None;
    for &k in &budget.k_grid {
        let v = curvature::check_curvature_bound(cand.ambient, &region, k, Direction::BoundedAbove, &budget.comparison)?;
        if v.outcome == Outcome::Pass {
            ambient_bounded_above_at = Some(k);
            break;
        }
    }
    let ambient_unbounded_below = !curvature::detect_branching(cand.ambient, &region, 1)?.is_empty();
    let hypotheses = Hypotheses {
        base_strongly_causal,
        base_tc,
        ambient_regular,
        ambient_bounded_above_at,
    };
    let (inconsistency, failed_hypotheses) = assess(hypotheses.clone());
    Ok(ConsistencyReport {
        hypotheses,
        inconsistency,
        failed_hypotheses,
        tc_report,
        ambient_unbounded_below,
    })
}

/// Ambient points within `radius` of the first boundary point (the whole
/// ambient when there is no boundary or no coordinates).
fn sweep_region(cand: &ExtensionCandidate, radius: f64) -> Vec<PointId> {
    let b = compute_boundary(cand);
    let centre = b.future.first().or(b.past.first()).and_then(|&p| cand.ambient.coords(p));
    match centre {
        Some(c) => curvature::region_ball(cand.ambient, &c.to_vec(), radius),
        None => cand.ambient.ids().collect(),
    }
}

/// Base and ambient exemplars of the shipped extension pairs; the map is
/// the inclusion by coordinates. The slit plane is not among them: at grid
/// scale no chain bends around the slit ends, so clause (v) fails there.
pub fn exemplar_extension_pairs() -> Vec<(ExemplarKind, ExemplarKind)> {
    vec![
        (ExemplarKind::HalfSpacePatch, ExemplarKind::MinkowskiPatch),
        (ExemplarKind::PuncturedPatch, ExemplarKind::FanSpace),
        (ExemplarKind::PuncturedPatch, ExemplarKind::MinkowskiPatch),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_exemplar, ExemplarSpec};

    fn build(kind: ExemplarKind) -> SpaceDescription {
        build_exemplar(&ExemplarSpec::new(kind)).unwrap()
    }

    #[test]
    fn half_space_into_minkowski_is_an_extension_with_boundary_at_t_zero() {
        let (base, amb) = (build(ExemplarKind::HalfSpacePatch), build(ExemplarKind::MinkowskiPatch));
        let cand = ExtensionCandidate::inclusion(&base, &amb).unwrap();
        let rep = check_extension(&cand).unwrap();
        assert!(rep.passed(), "{}", rep.clauses.summary());
        assert!(rep.curves_checked > 200);
        assert!(matches!(check_tau_monotone(&cand), MonotoneVerdict::Pass { .. }));
        let (p, q) = (base.locate(&[-2.0, 0.0]).unwrap(), base.locate(&[-1.0, 0.0]).unwrap());
        assert_eq!(base.tau_f(p, q), amb.tau_f(cand.iota(p), cand.iota(q)));
        let b = compute_boundary(&cand);
        let origin = amb.locate(&[0.0, 0.0]).unwrap();
        assert!(b.future.contains(&origin));
        assert!(!b.lemma_violation);
        let reach = b.reaching_curves.iter().find(|r| r.point == origin).unwrap();
        let (last, rest) = reach.curve.points.split_last().unwrap();
        assert_eq!(*last, origin);
        assert!(rest.len() >= 2 && rest.iter().all(|&r| cand.in_image(r)));
        assert_eq!(classify_curve(&amb, &reach.curve).unwrap(), crate::curves::CurveClass::Timelike);
    }

    #[test]
    fn reduced_ambient_separation_breaks_length_preservation() {
        let base = build(ExemplarKind::HalfSpacePatch);
        let mut amb = build(ExemplarKind::MinkowskiPatch);
        let (p, q) = (amb.locate(&[-1.0, 0.0]).unwrap(), amb.locate(&[-0.75, 0.0]).unwrap());
        amb.set_tau(p, q, 0.1);
        let cand = ExtensionCandidate::inclusion(&base, &amb).unwrap();
        let rep = check_extension(&cand).unwrap();
        let (clause, verdict) = rep.first_failing().unwrap();
        assert_eq!(clause, CLAUSES[4]);
        assert!(verdict.is_fail());
        let MonotoneVerdict::Fail { tau, tau_ambient, .. } = check_tau_monotone(&cand) else { panic!() };
        assert!(tau_ambient < tau);
    }

    #[test]
    fn punctured_plane_into_fan_reaches_the_origin() {
        let (base, fan) = (build(ExemplarKind::PuncturedPatch), build(ExemplarKind::FanSpace));
        let cand = ExtensionCandidate::inclusion(&base, &fan).unwrap();
        let rep = check_extension(&cand).unwrap();
        assert!(rep.passed(), "{}", rep.clauses.summary());
        assert!(matches!(check_tau_monotone(&cand), MonotoneVerdict::Pass { .. }));
        let b = compute_boundary(&cand);
        let origin = fan.locate(&[0.0, 0.0, 0.0]).unwrap();
        assert!(b.future.contains(&origin) && b.past.contains(&origin));
        let from = cand.iota(base.locate(&[-1.0, 0.0]).unwrap());
        assert!(b.reaching_curves.iter().any(|r| r.point == origin && r.curve.points.contains(&from)));
    }

    #[test]
    fn slit_hides_separation_that_the_full_plane_restores() {
        let (base, amb) = (build(ExemplarKind::SlitPatch), build(ExemplarKind::MinkowskiPatch));
        let cand = ExtensionCandidate::inclusion(&base, &amb).unwrap();
        let (p, q) = (base.locate(&[-1.0, 0.0]).unwrap(), base.locate(&[1.0, 0.0]).unwrap());
        assert_eq!(base.tau_f(p, q), 0.0);
        assert_eq!(amb.tau_f(cand.iota(p), cand.iota(q)), 2.0);
        let MonotoneVerdict::Pass { strict_pairs } = check_tau_monotone(&cand) else { panic!() };
        assert!(strict_pairs > 0);
    }

    #[test]
    fn structural_errors_and_non_open_images() {
        let (base, amb) = (build(ExemplarKind::HalfSpacePatch), build(ExemplarKind::MinkowskiPatch));
        let mut emb = ExtensionCandidate::inclusion(&base, &amb).unwrap().embedding().to_vec();
        emb[1] = emb[0];
        assert!(matches!(ExtensionCandidate::new(&base, &amb, emb), Err(ExtensionError::NotInjective(..))));
        let whole = ExtensionCandidate::inclusion(&amb, &amb).unwrap();
        assert!(check_extension(&whole).unwrap().clauses.get(CLAUSES[2]).unwrap().is_fail());
        // the plane is not open in the fan: the ray accumulates at the origin
        let fan = build(ExemplarKind::FanSpace);
        let plane = ExtensionCandidate::inclusion(&amb, &fan).unwrap();
        assert!(check_extension(&plane).unwrap().clauses.get(CLAUSES[2]).unwrap().is_fail());
    }

    #[test]
    fn cross_check_names_failed_hypotheses() {
        let (base, fan) = (build(ExemplarKind::PuncturedPatch), build(ExemplarKind::FanSpace));
        let cand = ExtensionCandidate::inclusion(&base, &fan).unwrap();
        let r = cross_check_inextendibility(&cand, &CrossCheckBudget::default()).unwrap();
        assert!(!r.inconsistency);
        assert!(!r.hypotheses.base_tc);
        assert!(r.tc_report.as_ref().unwrap().witness.is_some());
        assert!(r.failed_hypotheses.contains(&"base (TC)".to_string()));
        assert!(r.ambient_unbounded_below);
        let forced = Hypotheses {
            base_strongly_causal: true,
            base_tc: true,
            ambient_regular: true,
            ambient_bounded_above_at: Some(0.0),
        };
        assert_eq!(assess(forced), (true, vec![]));
    }
}
