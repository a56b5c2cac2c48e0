//! Coordinate formulas behind rule-generated spaces: relations, time
//! separation and maximizer interpolation at arbitrary coordinates, plus
//! removed point sets (obstacles) and the straight-step admissibility rule.

use serde::{Deserialize, Serialize};

use crate::models::{self, ModelError, ModelKind, ModelPoint, ModelSpace};

/// Causal character of an ordered pair under a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Unrelated,
    /// `p ≤ q` but not `p ≪ q`.
    Causal,
    /// `p ≪ q` (and hence `p ≤ q`).
    Chron,
}

impl Rel {
    pub fn is_causal(self) -> bool {
        self != Rel::Unrelated
    }

    pub fn is_chron(self) -> bool {
        self == Rel::Chron
    }
}

/// A closed-form Lorentzian structure on coordinates.
///
/// * `Minkowski`: coordinates `(t, x)`.
/// * `Fan`: coordinates `(t, x, z)`; the plane `z = 0` is Minkowski space
///   and the ray `{(0, 0, z) : z ≥ 0}` is attached at the origin as a
///   timelike half-line.
/// * `Model`: cover coordinates of a model space `M_K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Formula {
    Minkowski,
    Fan,
    Model(ModelSpace),
}

fn on_ray(p: &[f64]) -> bool {
    p[0] == 0.0 && p[1] == 0.0 && p[2] > 0.0
}

fn is_origin(p: &[f64]) -> bool {
    p.iter().all(|&c| c == 0.0)
}

fn flat_rel(p: &[f64], q: &[f64]) -> Rel {
    let dt = q[0] - p[0];
    let dx = (q[1] - p[1]).abs();
    if dt > dx {
        Rel::Chron
    } else if dt == dx {
        Rel::Causal
    } else {
        Rel::Unrelated
    }
}

fn flat_tau(p: &[f64], q: &[f64]) -> f64 {
    let dt = q[0] - p[0];
    let dx = (q[1] - p[1]).abs();
    if dt > dx {
        ((dt - dx) * (dt + dx)).sqrt().max(f64::MIN_POSITIVE)
    } else {
        0.0
    }
}

fn lerp(p: &[f64], q: &[f64], f: f64) -> Vec<f64> {
    p.iter().zip(q).map(|(a, b)| a + f * (b - a)).collect()
}

impl Formula {
    /// Coordinate dimension.
    pub fn dim(&self) -> usize {
        match self {
            Formula::Fan => 3,
            _ => 2,
        }
    }

    /// Tag used in the JSON schema (`formula:<tag>`, `rule:<tag>`).
    pub fn tag(&self) -> String {
        match self {
            Formula::Minkowski => "minkowski".into(),
            Formula::Fan => "fan".into(),
            Formula::Model(m) => match m.kind {
                ModelKind::Minkowski => "minkowski".into(),
                ModelKind::DeSitterCover => format!("de_sitter:{}", m.radius.unwrap_or(1.0)),
                ModelKind::AntiDeSitterCover => {
                    format!("anti_de_sitter:{}", m.radius.unwrap_or(1.0))
                }
            },
        }
    }

    /// Inverse of [`Formula::tag`].
    pub fn parse(tag: &str) -> Option<Formula> {
        let (head, arg) = match tag.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (tag, None),
        };
        let radius = || arg.and_then(|a| a.parse::<f64>().ok()).filter(|r| *r > 0.0 && r.is_finite());
        match head {
            "minkowski" if arg.is_none() => Some(Formula::Minkowski),
            "fan" if arg.is_none() => Some(Formula::Fan),
            "de_sitter" => radius().map(|r| Formula::Model(ModelSpace::de_sitter(r))),
            "anti_de_sitter" => radius().map(|r| Formula::Model(ModelSpace::anti_de_sitter(r))),
            _ => None,
        }
    }

    /// Whether the coordinates describe a point of the space.
    pub fn contains(&self, p: &[f64]) -> bool {
        if p.len() != self.dim() || p.iter().any(|c| !c.is_finite()) {
            return false;
        }
        match self {
            Formula::Minkowski => true,
            Formula::Fan => p[2] == 0.0 || on_ray(p),
            Formula::Model(m) => m.check_point(ModelPoint::new(p[0], p[1])).is_ok(),
        }
    }

    pub fn relation(&self, p: &[f64], q: &[f64]) -> Rel {
        match self {
            Formula::Minkowski | Formula::Model(_) => flat_rel(p, q),
            Formula::Fan => match (on_ray(p), on_ray(q)) {
                (false, false) => flat_rel(p, q),
                (true, true) => {
                    if p[2] < q[2] {
                        Rel::Chron
                    } else if p[2] == q[2] {
                        Rel::Causal
                    } else {
                        Rel::Unrelated
                    }
                }
                // plane point below the origin: τ ≥ z > 0
                (false, true) => {
                    if flat_rel(p, &[0.0, 0.0]).is_causal() {
                        Rel::Chron
                    } else {
                        Rel::Unrelated
                    }
                }
                (true, false) => Rel::Unrelated,
            },
        }
    }

    /// Time separation; zero unless the pair is chronologically related.
    pub fn tau(&self, p: &[f64], q: &[f64]) -> Result<f64, ModelError> {
        Ok(match self {
            Formula::Minkowski => flat_tau(p, q),
            Formula::Fan => match (on_ray(p), on_ray(q)) {
                (false, false) => flat_tau(p, q),
                (true, true) => (q[2] - p[2]).max(0.0),
                (false, true) => {
                    if flat_rel(p, &[0.0, 0.0]).is_causal() {
                        flat_tau(p, &[0.0, 0.0]) + q[2]
                    } else {
                        0.0
                    }
                }
                (true, false) => 0.0,
            },
            Formula::Model(m) => models::tau_model(
                m,
                ModelPoint::new(p[0], p[1]),
                ModelPoint::new(q[0], q[1]),
            )?
            .to_f64(),
        })
    }

    /// Whether the straight coordinate segment from `p` to `q` is a causal
    /// curve of the space (assuming `p ≤ q`). In the fan, a plane point can
    /// only reach the ray through the origin.
    pub fn segment_ok(&self, p: &[f64], q: &[f64]) -> bool {
        match self {
            Formula::Fan => !(on_ray(q) && !on_ray(p) && !is_origin(p)),
            _ => true,
        }
    }

    /// Point at τ-fraction `s ∈ [0, 1]` along the maximizer from `p` to `q`.
    ///
    /// For pairs with zero separation the coordinate segment is used.
    pub fn interpolate(&self, p: &[f64], q: &[f64], s: f64) -> Result<Vec<f64>, ModelError> {
        let s = s.clamp(0.0, 1.0);
        if s == 0.0 {
            return Ok(p.to_vec());
        }
        if s == 1.0 {
            return Ok(q.to_vec());
        }
        let len = self.tau(p, q)?;
        if len == 0.0 {
            return Ok(lerp(p, q, s));
        }
        Ok(match self {
            Formula::Minkowski => lerp(p, q, s),
            Formula::Fan => {
                if on_ray(q) && !on_ray(p) && !is_origin(p) {
                    // broken line p → 0 → q
                    let origin = [0.0, 0.0, 0.0];
                    let a = flat_tau(p, &origin);
                    let target = s * len;
                    if a > 0.0 && target <= a {
                        lerp(p, &origin, target / a)
                    } else {
                        vec![0.0, 0.0, target - a]
                    }
                } else {
                    lerp(p, q, s)
                }
            }
            Formula::Model(m) => {
                let pt = models::geodesic_point(
                    m,
                    ModelPoint::new(p[0], p[1]),
                    ModelPoint::new(q[0], q[1]),
                    len,
                    s * len,
                );
                pt.coords.to_vec()
            }
        })
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.tag())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let tag = String::deserialize(d)?;
        Formula::parse(&tag).ok_or_else(|| serde::de::Error::custom(format!("unknown formula tag {tag:?}")))
    }
}

/// A closed set removed from a two-dimensional sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstacle {
    Point { at: [f64; 2] },
    Segment { from: [f64; 2], to: [f64; 2] },
}

const GEOM_EPS: f64 = 1e-12;

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> bool {
    cross(a, b, c).abs() <= GEOM_EPS
        && c[0] >= a[0].min(b[0]) - GEOM_EPS
        && c[0] <= a[0].max(b[0]) + GEOM_EPS
        && c[1] >= a[1].min(b[1]) - GEOM_EPS
        && c[1] <= a[1].max(b[1]) + GEOM_EPS
}

fn segments_meet(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > GEOM_EPS && d2 < -GEOM_EPS) || (d1 < -GEOM_EPS && d2 > GEOM_EPS))
        && ((d3 > GEOM_EPS && d4 < -GEOM_EPS) || (d3 < -GEOM_EPS && d4 > GEOM_EPS))
    {
        return true;
    }
    on_segment(c, d, a) || on_segment(c, d, b) || on_segment(a, b, c) || on_segment(a, b, d)
}

impl Obstacle {
    /// Whether the closed segment `p q` meets the obstacle.
    pub fn blocks(&self, p: &[f64], q: &[f64]) -> bool {
        let (a, b) = ([p[0], p[1]], [q[0], q[1]]);
        match *self {
            Obstacle::Point { at } => on_segment(a, b, at),
            Obstacle::Segment { from, to } => segments_meet(a, b, from, to),
        }
    }

    /// Whether a point lies in the removed set.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.blocks(p, p)
    }

    /// Euclidean distance from a point to the removed set.
    pub fn distance(&self, p: &[f64]) -> f64 {
        let c = [p[0], p[1]];
        match *self {
            Obstacle::Point { at } => euclid(&c, &at),
            Obstacle::Segment { from, to } => {
                let d = [to[0] - from[0], to[1] - from[1]];
                let len2 = d[0] * d[0] + d[1] * d[1];
                let s = if len2 > 0.0 {
                    (((c[0] - from[0]) * d[0] + (c[1] - from[1]) * d[1]) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                euclid(&c, &[from[0] + s * d[0], from[1] + s * d[1]])
            }
        }
    }
}

/// Everything needed to regenerate a space from its coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub formula: Formula,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<Obstacle>,
    /// Optional cap on the Euclidean length of a single curve step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_radius: Option<f64>,
}

impl Geometry {
    pub fn new(formula: Formula) -> Self {
        Self {
            formula,
            obstacles: Vec::new(),
            step_radius: None,
        }
    }

    /// A straight step from `p` to `q` is a curve of the space: causal,
    /// admissible for the formula, avoiding every obstacle and within the
    /// step radius.
    pub fn step_allowed(&self, p: &[f64], q: &[f64]) -> bool {
        if !self.formula.relation(p, q).is_causal() || !self.formula.segment_ok(p, q) {
            return false;
        }
        if let Some(r) = self.step_radius {
            if euclid(p, q) > r + GEOM_EPS {
                return false;
            }
        }
        !self.obstacles.iter().any(|o| o.blocks(p, q))
    }
}

pub fn euclid(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}
