//! Geodesics (locally maximal chains), their continuous extension and the
//! bounded search for finite-length inextendible timelike geodesics.

use std::collections::HashSet;

use serde::Serialize;

use super::{classify_curve, tau_length, CausalCurve, CurveClass, CurveError};
use crate::ext_real::ExtReal;
use crate::paths;
use crate::space::checks::effective_resolution;
use crate::space::{Chart, PointId, SpaceDescription};
use crate::tolerance;

/// A parameter without a maximal window around it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailingWindow {
    /// Position of `t₀` in the curve.
    pub position: usize,
    /// The tightest window `[c, d]` around `t₀` (positions).
    pub window: (usize, usize),
    /// Centre of the chart the window was compared in, if any holds it.
    pub chart: Option<PointId>,
    pub curve_length: f64,
    pub local_length: f64,
    /// A chain inside the chart strictly longer than the window.
    pub longer_chain: Vec<PointId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicVerdict {
    pub is_geodesic: bool,
    pub failing_window: Option<FailingWindow>,
}

/// Windows `[c, d]` around position `t0`, tightest first. Interior positions
/// need `c < t0 < d`; the end positions may sit on the window's rim.
fn windows_around(len: usize, t0: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..len).flat_map(move |span| {
        (t0.saturating_sub(span)..=t0).filter_map(move |c| {
            let d = c + span;
            let ok = d < len && (c < t0 || t0 == 0) && (t0 < d || t0 == len - 1);
            ok.then_some((c, d))
        })
    })
}

/// Charts that may host a window: the chart of `γ(t₀)`, then those of the
/// other window points.
fn hosting_charts<'a>(
    space: &'a SpaceDescription,
    pts: &'a [PointId],
    t0: usize,
) -> impl Iterator<Item = &'a Chart> + 'a {
    let atlas = space.atlas().expect("atlas checked by caller");
    std::iter::once(pts[t0])
        .chain(pts.iter().copied().filter(move |&p| p != pts[t0]))
        .map(move |p| atlas.chart(p))
        .filter(move |c| c.contains(pts[t0].0) && pts.iter().all(|p| c.contains(p.0)))
}

fn window_length(space: &SpaceDescription, pts: &[PointId]) -> f64 {
    pts.windows(2).map(|w| space.tau_f(w[0], w[1])).sum()
}

/// For every position there is a window around it that lies in a chart
/// and has `L_τ = ω` there. Branching is allowed.
pub fn is_geodesic(space: &SpaceDescription, curve: &CausalCurve) -> Result<GeodesicVerdict, CurveError> {
    if space.atlas().is_none() {
        return Err(CurveError::NoAtlas);
    }
    if let CurveClass::Invalid { positions, .. } = classify_curve(space, curve)? {
        return Err(match positions {
            Some((i, j)) => CurveError::NotCausal(i, j),
            None => CurveError::Constant,
        });
    }
    let len = curve.len();
    for t0 in 0..len {
        let mut first_fail: Option<FailingWindow> = None;
        let mut found = false;
        'windows: for (c, d) in windows_around(len, t0) {
            let pts = &curve.points[c..=d];
            let l = window_length(space, pts);
            for chart in hosting_charts(space, pts, t0 - c) {
                let omega = chart.omega(pts[0].0, pts[pts.len() - 1].0).expect("members");
                if tolerance::approx_ge(l, omega) {
                    found = true;
                    break 'windows;
                }
                if first_fail.is_none() {
                    first_fail = Some(FailingWindow {
                        position: t0,
                        window: (c, d),
                        chart: Some(PointId(chart.center)),
                        curve_length: l,
                        local_length: omega,
                        longer_chain: local_maximizer(space, chart, pts[0], pts[pts.len() - 1]),
                    });
                }
            }
            if first_fail.is_none() {
                first_fail = Some(FailingWindow {
                    position: t0,
                    window: (c, d),
                    chart: None,
                    curve_length: l,
                    local_length: f64::NAN,
                    longer_chain: Vec::new(),
                });
            }
        }
        if !found {
            return Ok(GeodesicVerdict {
                is_geodesic: false,
                failing_window: first_fail,
            });
        }
    }
    Ok(GeodesicVerdict {
        is_geodesic: true,
        failing_window: None,
    })
}

/// The preferred longest chain from `p` to `q` inside a chart.
fn local_maximizer(space: &SpaceDescription, chart: &Chart, p: PointId, q: PointId) -> Vec<PointId> {
    let Ok((order, pos)) = space.step_order() else {
        return Vec::new();
    };
    let set = chart.member_set(space.len());
    let tree = paths::preferred_tree(space.steps(), order, pos, p.0, Some(&set), |i, j| space.tau_ix(i, j));
    tree.chain_to(q.0).unwrap_or_default().into_iter().map(PointId).collect()
}

/// Why a geodesic cannot be continued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inextendible {
    /// The limit lies inside the sampled region but is not a carrier point
    /// reachable by a step.
    NoLimitPoint,
    /// The limit lies outside the sampled region, and the patch is not
    /// declared part of a complete ambient space.
    LeavesSample,
}

impl std::fmt::Display for Inextendible {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Inextendible::NoLimitPoint => "no limit point in carrier",
            Inextendible::LeavesSample => "leaves sample — ambient",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Extension {
    /// The limit point attached; the curve is closed at its future end.
    Extended { curve: CausalCurve },
    Inextendible { reason: Inextendible, limit: Vec<f64> },
    /// The limit leaves the patch, which extends into a complete ambient.
    ExtendsInAmbient { limit: Vec<f64> },
}

/// Attaches the limit point of a curve half-open at its future end.
///
/// The limit is the continuation of the last step: the nearest carrier
/// point on the ray beyond the last point, reached by an admissible step
/// and at most two last-step lengths away (samples may thin out
/// geometrically, as on the fan's ray). When there is none, the limit is
/// reported one last-step length beyond the last point.
pub fn extend_geodesic(space: &SpaceDescription, curve: &CausalCurve) -> Result<Extension, CurveError> {
    if !curve.open_end[1] {
        return Err(CurveError::NotHalfOpen);
    }
    if curve.len() < 2 {
        return Err(CurveError::Constant);
    }
    let (prev, last) = (curve.points[curve.len() - 2], curve.points[curve.len() - 1]);
    let (Some(a), Some(b)) = (space.coords(prev), space.coords(last)) else {
        return Err(CurveError::NoCoordinates);
    };
    let dir: Vec<f64> = b.iter().zip(a).map(|(y, x)| y - x).collect();
    let step2: f64 = dir.iter().map(|v| v * v).sum();
    if step2 == 0.0 {
        return Err(CurveError::Constant);
    }
    let limit: Vec<f64> = b.iter().zip(&dir).map(|(y, v)| y + v).collect();
    let next = space
        .ids()
        .filter(|&r| r != last && space.is_step(last, r))
        .filter_map(|r| {
            let c = space.coords(r)?;
            let off: Vec<f64> = c.iter().zip(b).map(|(x, y)| x - y).collect();
            let s = off.iter().zip(&dir).map(|(o, v)| o * v).sum::<f64>() / step2;
            let resid: f64 = off.iter().zip(&dir).map(|(o, v)| (o - s * v).powi(2)).sum();
            (s > 0.0 && s <= 2.0 + 1e-9 && resid <= 1e-18 * step2.max(1.0)).then_some((s, r))
        })
        .min_by(|x, y| x.0.total_cmp(&y.0));
    if let Some((s, r)) = next {
        let dt = curve.params[curve.len() - 1] - curve.params[curve.len() - 2];
        let mut out = curve.clone();
        out.points.push(r);
        out.params.push(curve.params[curve.len() - 1] + 2.0 * s * dt);
        out.open_end[1] = false;
        return Ok(Extension::Extended { curve: out });
    }
    let inside = space.extent().is_none() || space.in_extent(&limit);
    Ok(if inside {
        Extension::Inextendible {
            reason: Inextendible::NoLimitPoint,
            limit,
        }
    } else if space.ambient_complete() {
        Extension::ExtendsInAmbient { limit }
    } else {
        Extension::Inextendible {
            reason: Inextendible::LeavesSample,
            limit,
        }
    })
}

/// Limits of the (TC) witness search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TcBudget {
    /// Seeds (short timelike steps) explored at most.
    pub max_seeds: usize,
    /// Extension steps per seed at most.
    pub max_extensions: usize,
    /// Seeds are steps no longer than this multiple of the resolution.
    pub seed_radius: f64,
    /// Count curves leaving the sample as inextendible witnesses.
    pub boundary_exits_count: bool,
}

impl Default for TcBudget {
    fn default() -> Self {
        Self {
            max_seeds: 50_000,
            max_extensions: 10_000,
            seed_radius: 2.5,
            boundary_exits_count: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TcWitness {
    /// Half-open at its future end.
    pub curve: CausalCurve,
    pub length: ExtReal,
    pub certificate: Inextendible,
    pub limit: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TcReport {
    pub holds_within_budget: bool,
    pub witness: Option<TcWitness>,
    pub seeds_explored: usize,
    /// The seed budget ran out before every seed was explored.
    pub budget_exhausted: bool,
}

/// Searches for a future-inextendible timelike geodesic of finite length.
///
/// Every short timelike step seeds a straight geodesic, extended until it
/// is inextendible; seeds are visited in lexicographic order, so the first
/// witness found is the smallest.
pub fn check_tc(space: &SpaceDescription, budget: &TcBudget) -> Result<TcReport, CurveError> {
    if space.atlas().is_none() {
        return Err(CurveError::NoAtlas);
    }
    let h = effective_resolution(space).ok_or(CurveError::NoCoordinates)?;
    let reach = budget.seed_radius * h * (1.0 + 1e-9);
    let mut explored: HashSet<(usize, usize)> = HashSet::new();
    let mut seeds = 0;
    for p in space.ids() {
        for q in space.steps().row_iter(p.0).map(PointId) {
            if q == p || !space.ll(p, q) || space.dist(p, q) > reach || explored.contains(&(p.0, q.0)) {
                continue;
            }
            if seeds == budget.max_seeds {
                return Ok(TcReport {
                    holds_within_budget: true,
                    witness: None,
                    seeds_explored: seeds,
                    budget_exhausted: true,
                });
            }
            seeds += 1;
            let mut curve = CausalCurve::from_points([p, q]).half_open();
            explored.insert((p.0, q.0));
            for _ in 0..budget.max_extensions {
                match extend_geodesic(space, &curve)? {
                    Extension::Extended { curve: c } => {
                        let n = c.len();
                        explored.insert((c.points[n - 2].0, c.points[n - 1].0));
                        curve = c.half_open();
                    }
                    Extension::Inextendible { reason, limit } => {
                        let counts = reason == Inextendible::NoLimitPoint || budget.boundary_exits_count;
                        if counts {
                            if let Some(w) = certify(space, &curve, reason, limit)? {
                                return Ok(TcReport {
                                    holds_within_budget: false,
                                    witness: Some(w),
                                    seeds_explored: seeds,
                                    budget_exhausted: false,
                                });
                            }
                        }
                        break;
                    }
                    Extension::ExtendsInAmbient { .. } => break,
                }
            }
        }
    }
    Ok(TcReport {
        holds_within_budget: true,
        witness: None,
        seeds_explored: seeds,
        budget_exhausted: false,
    })
}

/// A witness needs a timelike geodesic of finite length.
fn certify(
    space: &SpaceDescription,
    curve: &CausalCurve,
    reason: Inextendible,
    limit: Vec<f64>,
) -> Result<Option<TcWitness>, CurveError> {
    if classify_curve(space, curve)? != CurveClass::Timelike || !is_geodesic(space, curve)?.is_geodesic {
        return Ok(None);
    }
    let length = tau_length(space, curve)?.value;
    Ok(length.is_finite().then(|| TcWitness {
        curve: curve.clone(),
        length,
        certificate: reason,
        limit,
    }))
}
