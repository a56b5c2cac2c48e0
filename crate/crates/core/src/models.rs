//! Two-dimensional Lorentzian model spaces of constant curvature.
//!
//! Points are stored in conformal cover coordinates `(time, space)`:
//!
//! * `K = 0`: Minkowski `(t, x)`.
//! * `K = 1/r²`: universal cover of de Sitter space, metric
//!   `r²/cos²η (−dη² + dθ²)` with `|η| < π/2`, `θ ∈ ℝ`.
//! * `K = −1/r²`: universal cover of anti-de Sitter space, metric
//!   `r²/cos²σ (−dT² + dσ²)` with `T ∈ ℝ`, `|σ| < π/2`.
//!
//! In all three the causal relation is the flat one in these coordinates.
//! Time separations for `K ≠ 0` go through the embedding into `ℝ³` with
//! signature `(−,+,+)` (de Sitter) or `(−,−,+)` (anti-de Sitter).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ext_real::ExtReal;
use crate::tolerance;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("point {0:?} is outside the coordinate domain of the model")]
    OffSurface([f64; 2]),
    #[error("sides ({a}, {b}, {c}) violate c >= a + b")]
    NotAdmissible { a: f64, b: f64, c: f64 },
    #[error("sides ({a}, {b}, {c}) violate the timelike size bounds for K = {k}")]
    SizeBounds { a: f64, b: f64, c: f64, k: f64 },
    #[error("negative side length")]
    NegativeSide,
    #[error("no comparison triangle found: {0}")]
    Infeasible(String),
    #[error("side has zero length, no corresponding points")]
    NoCorrespondence,
    #[error("fraction {0} outside [0, 1]")]
    BadFraction(f64),
    #[error("pair lies beyond the first conjugate point of the anti-de Sitter cover")]
    BeyondConjugate,
    #[error("curvature and radius disagree: K = {k}, r = {r:?}")]
    BadParameters { k: f64, r: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Minkowski,
    DeSitterCover,
    AntiDeSitterCover,
}

/// The model space `M_K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpace {
    pub curvature: f64,
    pub radius: Option<f64>,
    pub kind: ModelKind,
}

impl ModelSpace {
    pub fn minkowski() -> Self {
        Self {
            curvature: 0.0,
            radius: None,
            kind: ModelKind::Minkowski,
        }
    }

    pub fn de_sitter(r: f64) -> Self {
        Self {
            curvature: 1.0 / (r * r),
            radius: Some(r),
            kind: ModelKind::DeSitterCover,
        }
    }

    pub fn anti_de_sitter(r: f64) -> Self {
        Self {
            curvature: -1.0 / (r * r),
            radius: Some(r),
            kind: ModelKind::AntiDeSitterCover,
        }
    }

    /// The model of curvature `k`; the kind follows the sign of `k`.
    pub fn with_curvature(k: f64) -> Self {
        if k > 0.0 {
            Self::de_sitter(1.0 / k.sqrt())
        } else if k < 0.0 {
            Self::anti_de_sitter(1.0 / (-k).sqrt())
        } else {
            Self::minkowski()
        }
    }

    /// Checks that kind, curvature and radius agree.
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = ModelError::BadParameters {
            k: self.curvature,
            r: self.radius,
        };
        match (self.kind, self.radius) {
            (ModelKind::Minkowski, None) if self.curvature == 0.0 => Ok(()),
            (ModelKind::DeSitterCover, Some(r)) if r > 0.0 && r.is_finite() => {
                if tolerance::approx_eq(self.curvature, 1.0 / (r * r)) {
                    Ok(())
                } else {
                    Err(bad)
                }
            }
            (ModelKind::AntiDeSitterCover, Some(r)) if r > 0.0 && r.is_finite() => {
                if tolerance::approx_eq(self.curvature, -1.0 / (r * r)) {
                    Ok(())
                } else {
                    Err(bad)
                }
            }
            _ => Err(bad),
        }
    }

    fn r(&self) -> f64 {
        self.radius.unwrap_or(f64::INFINITY)
    }

    /// Checks the coordinate domain of `p`.
    pub fn check_point(&self, p: ModelPoint) -> Result<(), ModelError> {
        let [t, x] = p.coords;
        if !t.is_finite() || !x.is_finite() {
            return Err(ModelError::OffSurface(p.coords));
        }
        let ok = match self.kind {
            ModelKind::Minkowski => true,
            ModelKind::DeSitterCover => t.abs() < FRAC_PI_2,
            ModelKind::AntiDeSitterCover => x.abs() < FRAC_PI_2,
        };
        if ok {
            Ok(())
        } else {
            Err(ModelError::OffSurface(p.coords))
        }
    }

    /// Embedding of a cover point into `ℝ³` (identity-like for `K = 0`).
    pub fn embed(&self, p: ModelPoint) -> [f64; 3] {
        let [a, b] = p.coords;
        match self.kind {
            ModelKind::Minkowski => [a, b, 0.0],
            ModelKind::DeSitterCover => {
                let r = self.r();
                let c = a.cos();
                [r * a.tan(), r * b.cos() / c, r * b.sin() / c]
            }
            ModelKind::AntiDeSitterCover => {
                let r = self.r();
                let c = b.cos();
                [r * a.cos() / c, r * a.sin() / c, r * b.tan()]
            }
        }
    }

    /// Inner product of the embedding space.
    pub fn inner(&self, u: [f64; 3], v: [f64; 3]) -> f64 {
        match self.kind {
            ModelKind::Minkowski => -u[0] * v[0] + u[1] * v[1],
            ModelKind::DeSitterCover => -u[0] * v[0] + u[1] * v[1] + u[2] * v[2],
            ModelKind::AntiDeSitterCover => -u[0] * v[0] - u[1] * v[1] + u[2] * v[2],
        }
    }

    /// Future time separation between two cover points.
    pub fn tau(&self, p: ModelPoint, q: ModelPoint) -> Result<ExtReal, ModelError> {
        tau_model(self, p, q)
    }
}

/// A point of a model space in cover coordinates `(time, space)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub coords: [f64; 2],
}

impl ModelPoint {
    pub fn new(time: f64, space: f64) -> Self {
        Self {
            coords: [time, space],
        }
    }

    pub fn origin() -> Self {
        Self::new(0.0, 0.0)
    }
}

/// Causal character of an ordered pair in a model space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCharacter {
    Timelike,
    Null,
    Unrelated,
}

/// Future-directed causal character of `(p, q)`.
pub fn pair_character(p: ModelPoint, q: ModelPoint) -> PairCharacter {
    let dt = q.coords[0] - p.coords[0];
    let dx = (q.coords[1] - p.coords[1]).abs();
    if dt > dx {
        PairCharacter::Timelike
    } else if dt == dx {
        PairCharacter::Null
    } else {
        PairCharacter::Unrelated
    }
}

/// Time separation `τ̄(p, q)` in the model.
///
/// Zero unless `q` lies strictly in the chronological future of `p`. For the
/// anti-de Sitter cover, pairs past the first conjugate point are rejected.
pub fn tau_model(model: &ModelSpace, p: ModelPoint, q: ModelPoint) -> Result<ExtReal, ModelError> {
    tau_model_embedded(model, p, model.embed(p), q, model.embed(q))
}

/// [`tau_model`] with the embeddings `ep = model.embed(p)` and
/// `eq = model.embed(q)` supplied by the caller, for loops that reuse them.
pub fn tau_model_embedded(model: &ModelSpace, p: ModelPoint, ep: [f64; 3], q: ModelPoint, eq: [f64; 3]) -> Result<ExtReal, ModelError> {
    model.check_point(p)?;
    model.check_point(q)?;
    if pair_character(p, q) != PairCharacter::Timelike {
        return Ok(ExtReal::ZERO);
    }
    let dt = q.coords[0] - p.coords[0];
    let dx = (q.coords[1] - p.coords[1]).abs();
    let d = [eq[0] - ep[0], eq[1] - ep[1], eq[2] - ep[2]];
    let chord2 = -model.inner(d, d);
    let v = match model.kind {
        ModelKind::Minkowski => ((dt - dx) * (dt + dx)).sqrt(),
        ModelKind::DeSitterCover => {
            let r = model.r();
            2.0 * r * (chord2.max(0.0).sqrt() / (2.0 * r)).asinh()
        }
        ModelKind::AntiDeSitterCover => {
            if dt >= PI {
                return Err(ModelError::BeyondConjugate);
            }
            let r = model.r();
            let s = chord2.max(0.0).sqrt() / (2.0 * r);
            if s > 1.0 + 1e-12 {
                return Err(ModelError::BeyondConjugate);
            }
            2.0 * r * s.min(1.0).asin()
        }
    };
    // A strictly timelike pair has positive separation; rounding must not
    // break τ > 0 ⇔ p ≪ q.
    Ok(ExtReal::Finite(v.max(f64::MIN_POSITIVE)))
}

/// Point at time separation `s` from `p` along the maximizing timelike
/// geodesic from `p` to `q`, where `len = τ̄(p, q) > 0`.
pub fn geodesic_point(model: &ModelSpace, p: ModelPoint, q: ModelPoint, len: f64, s: f64) -> ModelPoint {
    if s <= 0.0 {
        return p;
    }
    if s >= len {
        return q;
    }
    match model.kind {
        ModelKind::Minkowski => {
            let f = s / len;
            ModelPoint::new(
                p.coords[0] + f * (q.coords[0] - p.coords[0]),
                p.coords[1] + f * (q.coords[1] - p.coords[1]),
            )
        }
        ModelKind::DeSitterCover => {
            let r = model.r();
            let a = model.embed(p);
            let b = model.embed(q);
            let (ch, sh) = ((len / r).cosh(), (len / r).sinh());
            let (cs, ss) = ((s / r).cosh(), (s / r).sinh());
            let x: [f64; 3] = std::array::from_fn(|i| cs * a[i] + ss / sh * (b[i] - ch * a[i]));
            from_de_sitter_embedding(r, x, p.coords[1])
        }
        ModelKind::AntiDeSitterCover => {
            let r = model.r();
            let a = model.embed(p);
            let b = model.embed(q);
            let (cl, sl) = ((len / r).cos(), (len / r).sin());
            let (cs, ss) = ((s / r).cos(), (s / r).sin());
            let x: [f64; 3] = std::array::from_fn(|i| cs * a[i] + ss / sl * (b[i] - cl * a[i]));
            from_anti_de_sitter_embedding(r, x, p.coords[0])
        }
    }
}

/// Cover coordinates of an embedded de Sitter point, choosing the sheet of
/// `θ` nearest `theta_ref`.
pub fn from_de_sitter_embedding(r: f64, x: [f64; 3], theta_ref: f64) -> ModelPoint {
    let eta = (x[0] / r).atan();
    let theta = x[2].atan2(x[1]);
    ModelPoint::new(eta, theta_ref + wrap_pi(theta - theta_ref))
}

/// Cover coordinates of an embedded anti-de Sitter point; the cover time is
/// taken in `[t_ref - π/2, t_ref + 3π/2)`, i.e. at or after `t_ref` up to
/// rounding.
pub fn from_anti_de_sitter_embedding(r: f64, x: [f64; 3], t_ref: f64) -> ModelPoint {
    let sigma = (x[2] / r).atan();
    let t = x[1].atan2(x[0]);
    let mut d = (t - t_ref).rem_euclid(2.0 * PI);
    if d > 1.5 * PI {
        d -= 2.0 * PI;
    }
    ModelPoint::new(t_ref + d, sigma)
}

fn wrap_pi(a: f64) -> f64 {
    let mut d = (a + PI).rem_euclid(2.0 * PI) - PI;
    if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Side lengths `(a, b, c) = (τ(x,y), τ(y,z), τ(x,z))` of a causal triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleSides {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TriangleSides {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    fn check(&self) -> Result<(), ModelError> {
        if self.a < 0.0 || self.b < 0.0 || self.c < 0.0 {
            return Err(ModelError::NegativeSide);
        }
        if !tolerance::approx_ge(self.c, self.a + self.b) {
            return Err(ModelError::NotAdmissible {
                a: self.a,
                b: self.b,
                c: self.c,
            });
        }
        Ok(())
    }

    pub fn is_degenerate(&self) -> bool {
        tolerance::approx_eq(self.c, self.a + self.b)
    }
}

/// Timelike size bounds for `K`: `c < π/√K` when `c = a + b` (with
/// `π/√K = ∞` for `K ≤ 0`), otherwise `c < π/√(−K)` when `K < 0`.
pub fn check_size_bounds(sides: TriangleSides, k: f64) -> Result<bool, ModelError> {
    sides.check()?;
    if sides.is_degenerate() {
        if k > 0.0 {
            return Ok(sides.c < PI / k.sqrt());
        }
        return Ok(true);
    }
    if k < 0.0 {
        return Ok(sides.c < PI / (-k).sqrt());
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Xy,
    Yz,
    Xz,
}

/// A realized comparison triangle in a model space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTriangle {
    pub model: ModelSpace,
    pub sides: TriangleSides,
    pub x: ModelPoint,
    pub y: ModelPoint,
    pub z: ModelPoint,
}

impl ComparisonTriangle {
    /// Past vertex, future vertex and length of a side.
    pub fn side(&self, side: Side) -> (ModelPoint, ModelPoint, f64) {
        match side {
            Side::Xy => (self.x, self.y, self.sides.a),
            Side::Yz => (self.y, self.z, self.sides.b),
            Side::Xz => (self.x, self.z, self.sides.c),
        }
    }

    /// `count` points along a side at equally spaced τ-fractions; a
    /// zero-length side yields its (constant) past vertex.
    pub fn side_samples(&self, side: Side, count: usize) -> Vec<ModelPoint> {
        let (p, q, len) = self.side(side);
        if len <= 0.0 || count < 2 {
            return vec![p; count.max(1)];
        }
        (0..count)
            .map(|i| geodesic_point(&self.model, p, q, len, len * i as f64 / (count - 1) as f64))
            .collect()
    }
}

/// Places a comparison triangle with `x̄` at the origin, `z̄` on the future
/// time axis and `ȳ` at nonnegative spatial coordinate.
pub fn realize_triangle(model: &ModelSpace, sides: TriangleSides) -> Result<ComparisonTriangle, ModelError> {
    model.validate()?;
    if !check_size_bounds(sides, model.curvature)? {
        return Err(ModelError::SizeBounds {
            a: sides.a,
            b: sides.b,
            c: sides.c,
            k: model.curvature,
        });
    }
    let TriangleSides { a, b, c } = sides;
    let x = ModelPoint::origin();
    let z = time_axis_point(model, c)?;
    let y = match model.kind {
        ModelKind::Minkowski => {
            if c == 0.0 {
                x
            } else {
                let t = (c * c + a * a - b * b) / (2.0 * c);
                ModelPoint::new(t, (t * t - a * a).max(0.0).sqrt())
            }
        }
        _ => {
            // only a rounding-level excess is placed on the axis: corresponding
            // points near a nearly null pair amplify any misplacement of ȳ
            let flat = c - (a + b) <= 4.0 * f64::EPSILON * c;
            if sides.is_degenerate() && a == 0.0 {
                x
            } else if a == 0.0 {
                solve_null_apex(model, b, z)?
            } else if flat {
                time_axis_point(model, a)?
            } else {
                solve_apex(model, a, b, z)?
            }
        }
    };
    Ok(ComparisonTriangle {
        model: *model,
        sides,
        x,
        y,
        z,
    })
}

fn time_axis_point(model: &ModelSpace, len: f64) -> Result<ModelPoint, ModelError> {
    Ok(match model.kind {
        ModelKind::Minkowski => ModelPoint::new(len, 0.0),
        ModelKind::DeSitterCover => ModelPoint::new((len / model.r()).sinh().atan(), 0.0),
        ModelKind::AntiDeSitterCover => {
            let t = len / model.r();
            if t >= PI {
                return Err(ModelError::Infeasible(format!(
                    "side {len} reaches the conjugate point at {}",
                    PI * model.r()
                )));
            }
            ModelPoint::new(t, 0.0)
        }
    })
}

/// Point at separation `a` from the origin along the timelike geodesic of
/// rapidity `phi`.
fn apex_candidate(model: &ModelSpace, a: f64, phi: f64) -> ModelPoint {
    let r = model.r();
    match model.kind {
        ModelKind::Minkowski => ModelPoint::new(a * phi.cosh(), a * phi.sinh()),
        ModelKind::DeSitterCover => {
            let (c, s) = ((a / r).cosh(), (a / r).sinh());
            let x = [r * s * phi.cosh(), r * c, r * s * phi.sinh()];
            from_de_sitter_embedding(r, x, 0.0)
        }
        ModelKind::AntiDeSitterCover => {
            let (c, s) = ((a / r).cos(), (a / r).sin());
            let x = [r * c, r * s * phi.cosh(), r * s * phi.sinh()];
            from_anti_de_sitter_embedding(r, x, 0.0)
        }
    }
}

/// `ȳ` on the future null ray of the origin with `τ̄(ȳ, z̄) = b`, for `z̄`
/// on the time axis. In conformal cover coordinates the ray is `t = x` and
/// `τ̄` decreases along it from `c` to `0` at `t = t_z / 2`.
fn solve_null_apex(model: &ModelSpace, b: f64, z: ModelPoint) -> Result<ModelPoint, ModelError> {
    let (mut lo, mut hi) = (0.0, 0.5 * z.coords[0]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let tau = tau_model(model, ModelPoint::new(mid, mid), z)?.to_f64();
        if tau > b {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    Ok(ModelPoint::new(s, s))
}

fn solve_apex(model: &ModelSpace, a: f64, b: f64, z: ModelPoint) -> Result<ModelPoint, ModelError> {
    // f(φ) = τ̄(ȳ(φ), z̄) − b is nonnegative at φ = 0 (c ≥ a + b) and
    // eventually negative (or zero when b = 0); bisect on the sign change.
    let excess = |phi: f64| -> Result<f64, ModelError> {
        let y = apex_candidate(model, a, phi);
        if model.check_point(y).is_err() {
            return Ok(-1.0);
        }
        Ok(tau_model(model, y, z)?.finite().unwrap_or(f64::INFINITY) - b)
    };
    let below = |v: f64| if b > 0.0 { v < 0.0 } else { v <= 0.0 };
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut guard = 0;
    while !below(excess(hi)?) {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(ModelError::Infeasible("no bracket for apex rapidity".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(excess(mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let y = apex_candidate(model, a, lo);
    let got = tau_model(model, y, z)?.to_f64();
    if (got - b).abs() > tolerance::SOLVER_TOL {
        return Err(ModelError::Infeasible(format!("apex solve residual {}", got - b)));
    }
    Ok(y)
}

/// Point on `side` at τ̄-fraction `s` from the side's past vertex.
pub fn corresponding_point(tri: &ComparisonTriangle, side: Side, s: f64) -> Result<ModelPoint, ModelError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(ModelError::BadFraction(s));
    }
    let (p, q, len) = tri.side(side);
    if len <= tolerance::current().abs {
        return Err(ModelError::NoCorrespondence);
    }
    Ok(geodesic_point(&tri.model, p, q, len, s * len))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(model: &ModelSpace, p: [f64; 2], q: [f64; 2]) -> f64 {
        tau_model(model, ModelPoint { coords: p }, ModelPoint { coords: q })
            .unwrap()
            .to_f64()
    }

    #[test]
    fn minkowski_values() {
        let m = ModelSpace::minkowski();
        assert!((t(&m, [0.0, 0.0], [2.0, 1.0]) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(t(&m, [0.0, 0.0], [1.0, 2.0]), 0.0);
        assert_eq!(t(&m, [0.0, 0.0], [1.0, 1.0]), 0.0);
        assert_eq!(pair_character(ModelPoint::origin(), ModelPoint::new(1.0, 1.0)), PairCharacter::Null);
    }

    #[test]
    fn anti_de_sitter_axis_pair() {
        let m = ModelSpace::anti_de_sitter(1.0);
        assert!((t(&m, [0.0, 0.0], [FRAC_PI_2, 0.0]) - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(
            tau_model(&m, ModelPoint::origin(), ModelPoint::new(3.2, 0.0)),
            Err(ModelError::BeyondConjugate)
        );
    }

    #[test]
    fn de_sitter_axis_matches_proper_time() {
        // along θ = 0 the proper time is ∫ r/cos η dη = r·artanh(sin η)
        let r = 2.0;
        let m = ModelSpace::de_sitter(r);
        let eta: f64 = 0.7;
        assert!((t(&m, [0.0, 0.0], [eta, 0.0]) - r * eta.sin().atanh()).abs() < 1e-12);
    }

    #[test]
    fn off_surface_is_rejected() {
        let m = ModelSpace::de_sitter(1.0);
        assert!(matches!(
            tau_model(&m, ModelPoint::new(2.0, 0.0), ModelPoint::origin()),
            Err(ModelError::OffSurface(_))
        ));
    }

    #[test]
    fn size_bound_table() {
        assert_eq!(check_size_bounds(TriangleSides::new(1.0, 1.0, 2.0), 0.0), Ok(true));
        assert_eq!(check_size_bounds(TriangleSides::new(1.0, 1.0, 2.0), 1.0), Ok(true));
        assert_eq!(check_size_bounds(TriangleSides::new(1.0, 1.0, 5.0), -1.0), Ok(false));
        assert_eq!(check_size_bounds(TriangleSides::new(1.0, 1.0, 4.0), 1.0), Ok(true));
        assert_eq!(check_size_bounds(TriangleSides::new(2.0, 2.0, 4.0), 1.0), Ok(false));
        assert!(matches!(
            check_size_bounds(TriangleSides::new(1.0, 1.0, 1.5), 0.0),
            Err(ModelError::NotAdmissible { .. })
        ));
    }

    #[test]
    fn flat_triangle_closed_form() {
        let tri = realize_triangle(&ModelSpace::minkowski(), TriangleSides::new(1.0, 1.0, 2.5)).unwrap();
        assert!((tri.y.coords[0] - 1.25).abs() < 1e-12);
        assert!((tri.y.coords[1] - 0.75).abs() < 1e-12);
        assert_eq!(tri.z.coords, [2.5, 0.0]);
        let degenerate = realize_triangle(&ModelSpace::minkowski(), TriangleSides::new(1.0, 1.0, 2.0)).unwrap();
        assert_eq!(degenerate.y.coords, [1.0, 0.0]);
    }

    #[test]
    fn de_sitter_triangle_reproduces_sides() {
        let m = ModelSpace::de_sitter(1.0);
        let tri = realize_triangle(&m, TriangleSides::new(0.5, 0.5, 1.2)).unwrap();
        assert!((t(&m, tri.x.coords, tri.y.coords) - 0.5).abs() < 1e-9);
        assert!((t(&m, tri.y.coords, tri.z.coords) - 0.5).abs() < 1e-9);
        assert!((t(&m, tri.x.coords, tri.z.coords) - 1.2).abs() < 1e-9);
        assert!(tri.y.coords[1] >= 0.0);
    }

    #[test]
    fn corresponding_points() {
        let tri = realize_triangle(&ModelSpace::minkowski(), TriangleSides::new(1.0, 1.0, 2.5)).unwrap();
        let mid = corresponding_point(&tri, Side::Xz, 0.5).unwrap();
        assert!((mid.coords[0] - 1.25).abs() < 1e-12 && mid.coords[1].abs() < 1e-12);
        assert_eq!(corresponding_point(&tri, Side::Xy, 0.0).unwrap(), tri.x);
        let q = corresponding_point(&tri, Side::Xy, 0.25).unwrap();
        assert!((t(&tri.model, tri.x.coords, q.coords) - 0.25).abs() < 1e-12);

        let null = realize_triangle(&ModelSpace::minkowski(), TriangleSides::new(0.0, 1.0, 1.0)).unwrap();
        assert_eq!(corresponding_point(&null, Side::Xy, 0.5), Err(ModelError::NoCorrespondence));
    }

    #[test]
    fn null_first_side_puts_apex_on_the_light_ray() {
        for model in [ModelSpace::de_sitter(1.0), ModelSpace::anti_de_sitter(1.0), ModelSpace::minkowski()] {
            let tri = realize_triangle(&model, TriangleSides::new(0.0, 0.25, 0.45)).unwrap();
            assert_eq!(pair_character(tri.x, tri.y), PairCharacter::Null, "{model:?}");
            let b = tau_model(&model, tri.y, tri.z).unwrap().to_f64();
            assert!((b - 0.25).abs() < 1e-9, "{model:?}: {b}");
        }
    }
}
