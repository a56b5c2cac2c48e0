//! Finite Lorentzian pre-length space candidates and their axiom checks.

pub mod atlas;
pub mod checks;
pub mod geometry;
pub mod report;

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitmatrix::{BitMatrix, BitSet};
use crate::ext_real::ExtReal;
use crate::models::ModelError;
use crate::paths;

pub use atlas::{Chart, LocalisingAtlas, NeighbourhoodBasis};
pub use geometry::{Formula, Geometry, Obstacle, Rel};
pub use report::{AxiomReport, Verdict, Witness};

/// Index of a carrier element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl std::fmt::Display for PointId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("{what} has dimension {got}, expected {expected}")]
    Dimension {
        what: String,
        got: usize,
        expected: usize,
    },
    #[error("time separation at ({0}, {1}) is negative or NaN")]
    BadTau(usize, usize),
    #[error("point {0} is not in the carrier")]
    UnknownPoint(usize),
    #[error("the Euclidean metric needs coordinates for every point")]
    MissingCoordinates,
    #[error("not a DAG: the causal relation has a cycle through ({0}, {1}) (chronology violation)")]
    NotADag(usize, usize),
    #[error("the space has no points")]
    Empty,
    #[error("coordinates {0:?} are not a point of the formula space")]
    OffFormula(Vec<f64>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Invalid(String),
}

/// Drops every step that two shorter steps subdivide without changing the
/// τ-sum: a straight step passes through the sample points on its segment,
/// so its curve's τ-length is the sum over those points. Equality is judged
/// at rounding level, not at the comparison tolerance: near-collinear
/// sprinkled points would otherwise drop steps whose small losses add up
/// along a chain.
fn elementary_steps(steps: &BitMatrix, tau: &[f64], n: usize) -> BitMatrix {
    let steps_t = steps.transpose();
    BitMatrix::from_fn(n, |i, j| {
        if !steps.get(i, j) {
            return false;
        }
        let mut between = BitSet::from_words(steps.row(i));
        between.and_with(steps_t.row(j));
        let subdivided = between
            .iter()
            .any(|k| k != i && k != j && same_sum(tau[i * n + k] + tau[k * n + j], tau[i * n + j]));
        !subdivided
    })
}

fn same_sum(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// The distance `d` on the carrier.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Euclidean distance of the coordinate vectors.
    Euclidean,
    /// Explicit symmetric matrix, row-major.
    Matrix(Vec<f64>),
}

/// A candidate Lorentzian pre-length space `(X, d, ≪, ≤, τ)` on a finite
/// carrier, together with the discrete curve model (admissible steps) and
/// the surrogate topology.
///
/// Data is immutable once shared; the `set_*` methods exist for building
/// and for injecting defects in audits.
#[derive(Debug, Clone)]
pub struct SpaceDescription {
    name: String,
    n: usize,
    coords: Option<Vec<Vec<f64>>>,
    metric: Metric,
    chron: BitMatrix,
    causal: BitMatrix,
    tau: Vec<f64>,
    steps: BitMatrix,
    basis: Option<NeighbourhoodBasis>,
    atlas: Option<LocalisingAtlas>,
    ambient_complete: bool,
    resolution: Option<f64>,
    extent: Option<Vec<[f64; 2]>>,
    lipschitz: Option<f64>,
    geometry: Option<Geometry>,
    order: OnceLock<Result<(Vec<usize>, Vec<usize>), (usize, usize)>>,
    locator: OnceLock<PointLocator>,
}

impl PartialEq for SpaceDescription {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.n == o.n
            && self.coords == o.coords
            && self.metric == o.metric
            && self.chron == o.chron
            && self.causal == o.causal
            && self.tau.len() == o.tau.len()
            && self.tau.iter().zip(&o.tau).all(|(a, b)| a == b)
            && self.steps == o.steps
            && self.basis == o.basis
            && self.atlas == o.atlas
            && self.ambient_complete == o.ambient_complete
            && self.resolution == o.resolution
            && self.extent == o.extent
            && self.lipschitz == o.lipschitz
            && self.geometry == o.geometry
    }
}

impl SpaceDescription {
    /// Builds a space from explicit relation matrices and a dense `τ`
    /// (row-major, `f64::INFINITY` for `+∞`).
    ///
    /// `≤` is made reflexive. Admissible steps default to every causal pair.
    pub fn from_relations(
        name: impl Into<String>,
        coords: Option<Vec<Vec<f64>>>,
        metric: Metric,
        chron: BitMatrix,
        causal: BitMatrix,
        tau: Vec<f64>,
    ) -> Result<Self, SpaceError> {
        let n = causal.size();
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        let dim = |what: &str, got: usize, expected: usize| -> Result<(), SpaceError> {
            if got == expected {
                Ok(())
            } else {
                Err(SpaceError::Dimension {
                    what: what.to_string(),
                    got,
                    expected,
                })
            }
        };
        dim("chron", chron.size(), n)?;
        dim("tau", tau.len(), n * n)?;
        if let Some(c) = &coords {
            dim("coords", c.len(), n)?;
            let d = c[0].len();
            for v in c {
                dim("coordinate vector", v.len(), d)?;
            }
        }
        match &metric {
            Metric::Euclidean if coords.is_none() => return Err(SpaceError::MissingCoordinates),
            Metric::Matrix(m) => dim("metric", m.len(), n * n)?,
            _ => {}
        }
        for i in 0..n {
            for j in 0..n {
                let v = tau[i * n + j];
                if v.is_nan() || v < 0.0 {
                    return Err(SpaceError::BadTau(i, j));
                }
            }
        }
        let causal = causal.with_diagonal();
        let mut steps = causal.clone();
        for i in 0..n {
            steps.unset(i, i);
        }
        Ok(Self {
            name: name.into(),
            n,
            coords,
            metric,
            chron,
            causal,
            tau,
            steps,
            basis: None,
            atlas: None,
            ambient_complete: false,
            resolution: None,
            extent: None,
            lipschitz: None,
            geometry: None,
            order: OnceLock::new(),
            locator: OnceLock::new(),
        })
    }

    /// Materializes a space from coordinates and a geometry.
    ///
    /// Without obstacles, relations and `τ` come from the formula. With
    /// obstacles, `≤` is generated by admissible steps, `τ` is the longest
    /// step chain, and `≪` is `τ > 0`; timelike pairs blocked only by
    /// removed points keep their formula values.
    pub fn from_geometry(
        name: impl Into<String>,
        coords: Vec<Vec<f64>>,
        geometry: Geometry,
    ) -> Result<Self, SpaceError> {
        let n = coords.len();
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        let f = geometry.formula;
        for c in &coords {
            if !f.contains(c) || geometry.obstacles.iter().any(|o| o.contains(c)) {
                return Err(SpaceError::OffFormula(c.clone()));
            }
        }
        let steps = BitMatrix::from_fn(n, |i, j| i != j && geometry.step_allowed(&coords[i], &coords[j]));
        let (chron, causal, tau) = if geometry.obstacles.is_empty() {
            let mut tau = vec![0.0; n * n];
            let mut chron = BitMatrix::new(n);
            let mut causal = BitMatrix::new(n);
            for i in 0..n {
                for j in 0..n {
                    match f.relation(&coords[i], &coords[j]) {
                        Rel::Chron => {
                            chron.set(i, j);
                            causal.set(i, j);
                            tau[i * n + j] = f.tau(&coords[i], &coords[j])?;
                        }
                        Rel::Causal => causal.set(i, j),
                        Rel::Unrelated => {}
                    }
                }
            }
            (chron, causal, tau)
        } else {
            let mut w = vec![0.0; n * n];
            for i in 0..n {
                for j in steps.row_iter(i) {
                    w[i * n + j] = f.tau(&coords[i], &coords[j])?;
                }
            }
            let order = paths::topological_order(&steps).map_err(|(a, b)| SpaceError::NotADag(a, b))?;
            let pos = paths::positions(&order);
            let mut tau = vec![0.0; n * n];
            let mut causal = BitMatrix::new(n);
            let mut chron = BitMatrix::new(n);
            for i in 0..n {
                let vals = paths::longest_values(&steps, &order, &pos, i, None, |a, b| w[a * n + b]);
                for (j, &v) in vals.iter().enumerate() {
                    if v > f64::NEG_INFINITY {
                        causal.set(i, j);
                        if v > 0.0 {
                            chron.set(i, j);
                            tau[i * n + j] = v;
                        }
                    }
                }
            }
            // a removed point blocks no timelike pair: curves bend around it,
            // so `≪` and `τ` keep their formula values (the supremum is just
            // not attained); only null pairs through the point are lost
            for i in 0..n {
                for j in 0..n {
                    if f.relation(&coords[i], &coords[j]) != Rel::Chron {
                        continue;
                    }
                    let mut blockers = geometry.obstacles.iter().filter(|o| o.blocks(&coords[i], &coords[j])).peekable();
                    if blockers.peek().is_some() && blockers.all(|o| matches!(o, Obstacle::Point { .. })) {
                        chron.set(i, j);
                        causal.set(i, j);
                        tau[i * n + j] = f.tau(&coords[i], &coords[j])?;
                    }
                }
            }
            (chron, causal, tau)
        };
        let steps = elementary_steps(&steps, &tau, n);
        let mut s = Self::from_relations(name, Some(coords), Metric::Euclidean, chron, causal, tau)?;
        s.steps = steps;
        s.geometry = Some(geometry);
        Ok(s)
    }

    // ----- builder-style setters -------------------------------------------

    pub fn with_steps(mut self, steps: BitMatrix) -> Result<Self, SpaceError> {
        if steps.size() != self.n {
            return Err(SpaceError::Dimension {
                what: "steps".into(),
                got: steps.size(),
                expected: self.n,
            });
        }
        self.steps = steps;
        self.reset_caches();
        Ok(self)
    }

    pub fn with_basis(mut self, basis: NeighbourhoodBasis) -> Self {
        self.basis = Some(basis);
        self
    }

    pub fn with_atlas(mut self, atlas: LocalisingAtlas) -> Self {
        self.atlas = Some(atlas);
        self
    }

    pub fn with_ambient_complete(mut self, v: bool) -> Self {
        self.ambient_complete = v;
        self
    }

    pub fn with_resolution(mut self, h: f64) -> Self {
        self.resolution = Some(h);
        self
    }

    pub fn with_extent(mut self, extent: Vec<[f64; 2]>) -> Self {
        self.extent = Some(extent);
        self
    }

    pub fn with_lipschitz(mut self, lip: f64) -> Self {
        self.lipschitz = Some(lip);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    // ----- defect injection --------------------------------------------------

    /// Overwrites one `τ` entry (`f64::INFINITY` for `+∞`).
    pub fn set_tau(&mut self, x: PointId, y: PointId, v: f64) {
        self.tau[x.0 * self.n + y.0] = v;
    }

    pub fn set_causal(&mut self, x: PointId, y: PointId, related: bool) {
        if related {
            self.causal.set(x.0, y.0);
        } else {
            self.causal.unset(x.0, y.0);
        }
        self.reset_caches();
    }

    pub fn set_chron(&mut self, x: PointId, y: PointId, related: bool) {
        if related {
            self.chron.set(x.0, y.0);
        } else {
            self.chron.unset(x.0, y.0);
        }
    }

    pub fn set_step(&mut self, x: PointId, y: PointId, allowed: bool) {
        if allowed {
            self.steps.set(x.0, y.0);
        } else {
            self.steps.unset(x.0, y.0);
        }
        self.reset_caches();
    }

    pub fn atlas_mut(&mut self) -> Option<&mut LocalisingAtlas> {
        self.atlas.as_mut()
    }

    pub fn set_ambient_complete(&mut self, v: bool) {
        self.ambient_complete = v;
    }

    fn reset_caches(&mut self) {
        self.order = OnceLock::new();
    }

    // ----- accessors ---------------------------------------------------------

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn ids(&self) -> impl Iterator<Item = PointId> {
        (0..self.n).map(PointId)
    }

    pub fn check_id(&self, x: PointId) -> Result<(), SpaceError> {
        if x.0 < self.n {
            Ok(())
        } else {
            Err(SpaceError::UnknownPoint(x.0))
        }
    }

    pub fn coords(&self, x: PointId) -> Option<&[f64]> {
        self.coords.as_ref().map(|c| c[x.0].as_slice())
    }

    pub fn all_coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn dist(&self, x: PointId, y: PointId) -> f64 {
        self.dist_ix(x.0, y.0)
    }

    pub(crate) fn dist_ix(&self, i: usize, j: usize) -> f64 {
        match &self.metric {
            Metric::Euclidean => {
                let c = self.coords.as_ref().expect("euclidean metric has coordinates");
                geometry::euclid(&c[i], &c[j])
            }
            Metric::Matrix(m) => m[i * self.n + j],
        }
    }

    /// `x ≤ y`.
    pub fn le(&self, x: PointId, y: PointId) -> bool {
        self.causal.get(x.0, y.0)
    }

    /// `x ≪ y`.
    pub fn ll(&self, x: PointId, y: PointId) -> bool {
        self.chron.get(x.0, y.0)
    }

    pub fn tau(&self, x: PointId, y: PointId) -> ExtReal {
        ExtReal::from_f64(self.tau[x.0 * self.n + y.0]).expect("validated nonnegative")
    }

    /// `τ` as a raw float (`+inf` for `+∞`).
    pub fn tau_f(&self, x: PointId, y: PointId) -> f64 {
        self.tau[x.0 * self.n + y.0]
    }

    pub(crate) fn tau_ix(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.n + j]
    }

    pub fn tau_matrix(&self) -> &[f64] {
        &self.tau
    }

    pub fn causal(&self) -> &BitMatrix {
        &self.causal
    }

    pub fn chron(&self) -> &BitMatrix {
        &self.chron
    }

    /// Admissible curve steps: `x → y` may be consecutive points of a
    /// discrete causal curve.
    pub fn steps(&self) -> &BitMatrix {
        &self.steps
    }

    pub fn is_step(&self, x: PointId, y: PointId) -> bool {
        self.steps.get(x.0, y.0)
    }

    pub fn basis(&self) -> Option<&NeighbourhoodBasis> {
        self.basis.as_ref()
    }

    pub fn atlas(&self) -> Option<&LocalisingAtlas> {
        self.atlas.as_ref()
    }

    pub fn ambient_complete(&self) -> bool {
        self.ambient_complete
    }

    pub fn resolution(&self) -> Option<f64> {
        self.resolution
    }

    pub fn extent(&self) -> Option<&[[f64; 2]]> {
        self.extent.as_deref()
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn geometry(&self) -> Option<&Geometry> {
        self.geometry.as_ref()
    }

    pub fn formula(&self) -> Option<Formula> {
        self.geometry.as_ref().map(|g| g.formula)
    }

    /// True when `τ` and maximizers are given by a closed formula on the
    /// whole coordinate domain (no removed sets).
    pub fn is_formula_space(&self) -> bool {
        self.geometry.as_ref().is_some_and(|g| g.obstacles.is_empty())
    }

    // ----- futures and pasts -------------------------------------------------

    /// `I⁺(x)`.
    pub fn chronological_future(&self, x: PointId) -> Vec<PointId> {
        self.chron.row_iter(x.0).map(PointId).collect()
    }

    /// `I⁻(x)`.
    pub fn chronological_past(&self, x: PointId) -> Vec<PointId> {
        (0..self.n).filter(|&i| self.chron.get(i, x.0)).map(PointId).collect()
    }

    /// `J⁺(x)`.
    pub fn causal_future(&self, x: PointId) -> Vec<PointId> {
        self.causal.row_iter(x.0).map(PointId).collect()
    }

    /// `J⁻(x)`.
    pub fn causal_past(&self, x: PointId) -> Vec<PointId> {
        (0..self.n).filter(|&i| self.causal.get(i, x.0)).map(PointId).collect()
    }

    // ----- step DAG ------------------------------------------------------------

    /// Topological order of the step relation and each point's position in
    /// it; fails with an edge on a cycle.
    pub fn step_order(&self) -> Result<(&[usize], &[usize]), SpaceError> {
        match self.order.get_or_init(|| {
            paths::topological_order(&self.steps).map(|o| {
                let p = paths::positions(&o);
                (o, p)
            })
        }) {
            Ok((o, p)) => Ok((o, p)),
            Err((a, b)) => Err(SpaceError::NotADag(*a, *b)),
        }
    }

    /// Weight of a step: its time separation.
    pub(crate) fn step_weight(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.n + j]
    }

    // ----- coordinates ---------------------------------------------------------

    /// The carrier point at the given coordinates, if any.
    pub fn locate(&self, c: &[f64]) -> Option<PointId> {
        let coords = self.coords.as_ref()?;
        self.locator.get_or_init(|| PointLocator::new(coords)).find(coords, c).map(PointId)
    }

    /// Whether coordinates lie in the closed sampled region.
    pub fn in_extent(&self, c: &[f64]) -> bool {
        match &self.extent {
            Some(e) => e.iter().zip(c).all(|(b, v)| *v >= b[0] - 1e-12 && *v <= b[1] + 1e-12),
            None => false,
        }
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                d = d.max(self.dist_ix(i, j));
            }
        }
        d
    }

    /// Points within distance `< r` of `x`.
    pub fn ball(&self, x: PointId, r: f64) -> BitSet {
        BitSet::from_indices(self.n, (0..self.n).filter(|&j| self.dist_ix(x.0, j) < r))
    }
}

/// Hash lookup of carrier points by rounded coordinates.
#[derive(Debug, Clone)]
struct PointLocator {
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

const LOCATE_QUANTUM: f64 = 1e-7;
const LOCATE_TOL: f64 = 1e-9;

fn cell_of(c: &[f64]) -> Vec<i64> {
    c.iter().map(|v| (v / LOCATE_QUANTUM).round() as i64).collect()
}

impl PointLocator {
    fn new(coords: &[Vec<f64>]) -> Self {
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, c) in coords.iter().enumerate() {
            cells.entry(cell_of(c)).or_default().push(i);
        }
        Self { cells }
    }

    fn find(&self, coords: &[Vec<f64>], c: &[f64]) -> Option<usize> {
        let base = cell_of(c);
        let dim = base.len();
        let mut best: Option<usize> = None;
        // probe the 3^dim neighbouring cells to survive rounding at cell edges
        for code in 0..3usize.pow(dim as u32) {
            let mut key = base.clone();
            let mut k = code;
            for v in key.iter_mut() {
                *v += (k % 3) as i64 - 1;
                k /= 3;
            }
            if let Some(list) = self.cells.get(&key) {
                for &i in list {
                    if coords[i].len() == c.len()
                        && coords[i].iter().zip(c).all(|(a, b)| (a - b).abs() <= LOCATE_TOL)
                    {
                        best = Some(best.map_or(i, |b| b.min(i)));
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3(with_closure: bool) -> SpaceDescription {
        let mut chron = BitMatrix::new(3);
        chron.set(0, 1);
        chron.set(1, 2);
        if with_closure {
            chron.set(0, 2);
        }
        let causal = chron.clone();
        let mut tau = vec![0.0; 9];
        tau[1] = 1.0;
        tau[5] = 1.0;
        if with_closure {
            tau[2] = 2.0;
        }
        SpaceDescription::from_relations("chain", None, Metric::Matrix(vec![0.0; 9]), chron, causal, tau).unwrap()
    }

    #[test]
    fn futures_are_matrix_slices() {
        let s = chain3(true);
        assert_eq!(s.chronological_future(PointId(0)), vec![PointId(1), PointId(2)]);
        assert_eq!(s.chronological_past(PointId(2)), vec![PointId(0), PointId(1)]);
        assert_eq!(s.causal_future(PointId(2)), vec![PointId(2)]);
    }

    #[test]
    fn rejects_negative_tau() {
        let m = BitMatrix::new(2);
        let err = SpaceDescription::from_relations("bad", None, Metric::Matrix(vec![0.0; 4]), m.clone(), m, vec![0.0, -1.0, 0.0, 0.0]);
        assert!(matches!(err, Err(SpaceError::BadTau(0, 1))));
    }

    #[test]
    fn locator_finds_points() {
        let coords = vec![vec![0.0, 0.0], vec![0.25, -0.5], vec![1.0 / 3.0, 0.0]];
        let s = SpaceDescription::from_geometry("pts", coords, Geometry::new(Formula::Minkowski)).unwrap();
        assert_eq!(s.locate(&[0.25, -0.5]), Some(PointId(1)));
        assert_eq!(s.locate(&[0.1 + 0.2 + 0.0333333333333333, 0.0]), Some(PointId(2)));
        assert_eq!(s.locate(&[0.5, 0.5]), None);
    }

    #[test]
    fn obstacle_spaces_use_longest_chains() {
        // a short wall across the segment from (-1,0) to (1,0): the detour
        // through (0,0.5) is the longest chain
        let coords = vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.5]];
        let mut g = Geometry::new(Formula::Minkowski);
        g.obstacles.push(Obstacle::Segment {
            from: [0.0, -0.1],
            to: [0.0, 0.1],
        });
        let s = SpaceDescription::from_geometry("wall", coords, g).unwrap();
        assert!(!s.is_step(PointId(0), PointId(1)));
        let expected = 2.0 * 0.75f64.sqrt();
        assert!((s.tau_f(PointId(0), PointId(1)) - expected).abs() < 1e-12);
        assert!(s.ll(PointId(0), PointId(1)));
    }

    #[test]
    fn removed_points_keep_the_closed_form_tau() {
        let coords = vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.5], vec![-1.0, -1.0], vec![1.0, 1.0]];
        let mut g = Geometry::new(Formula::Minkowski);
        g.obstacles.push(Obstacle::Point { at: [0.0, 0.0] });
        let s = SpaceDescription::from_geometry("hole", coords, g).unwrap();
        assert!(!s.is_step(PointId(0), PointId(1)));
        assert_eq!(s.tau_f(PointId(0), PointId(1)), 2.0);
        // the null ray through the hole is lost
        assert!(!s.le(PointId(3), PointId(4)));
    }
}
