//! Exemplar spaces and random sprinklings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::bitmatrix::BitMatrix;
use crate::models::ModelSpace;
use crate::space::checks::resolution_neighbours;
use crate::space::{
    Formula, Geometry, LocalisingAtlas, NeighbourhoodBasis, Obstacle, SpaceDescription, SpaceError,
};
use crate::space::{Chart, Metric};

/// Which exemplar to build.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExemplarKind {
    /// Square lattice in Minkowski space.
    MinkowskiPatch,
    /// Lattice in cover coordinates of `M_K`.
    ModelPatch { curvature: f64 },
    /// Minkowski plane with a timelike half-ray attached at the origin.
    FanSpace,
    /// Minkowski lattice with the origin removed.
    PuncturedPatch,
    /// Minkowski lattice with the spacelike slit `{t = 0, |x| ≤ 1.5}` removed.
    SlitPatch,
    /// Minkowski lattice restricted to `t < 0`.
    HalfSpacePatch,
    /// Four-point diamond with two equally long chains.
    ToyDag,
    /// Lattice on a cylinder with periodic time: every pair is
    /// chronologically related, including each point with itself.
    TimelikeCylinder,
}

/// Parameters of an exemplar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExemplarSpec {
    pub kind: ExemplarKind,
    /// Lattice spacing `h`.
    pub resolution: f64,
    /// Coordinate box `[[t0, t1], [x0, x1]]` of the plane part.
    pub extent: [[f64; 2]; 2],
    /// Seed for randomized kinds (currently unused by lattice kinds).
    pub seed: u64,
    /// Optional cap on the Euclidean length of a curve step.
    pub step_radius: Option<f64>,
    /// Build the localising atlas (metric balls of radius `3h`).
    pub with_atlas: bool,
    pub ambient_complete: bool,
}

impl ExemplarSpec {
    /// Default parameters: `h = 0.25` on `[-2, 2]²` (model patches:
    /// `h = 0.125` on `[-0.75, 0.75]²`).
    pub fn new(kind: ExemplarKind) -> Self {
        let (h, e) = match kind {
            ExemplarKind::ModelPatch { .. } => (0.125, 0.75),
            ExemplarKind::TimelikeCylinder => (0.25, 0.5),
            _ => (0.25, 2.0),
        };
        Self {
            kind,
            resolution: h,
            extent: [[-e, e], [-e, e]],
            seed: 0,
            step_radius: None,
            with_atlas: true,
            ambient_complete: false,
        }
    }

    pub fn with_resolution(mut self, h: f64) -> Self {
        self.resolution = h;
        self
    }

    pub fn with_extent(mut self, extent: [[f64; 2]; 2]) -> Self {
        self.extent = extent;
        self
    }

    pub fn with_step_radius(mut self, r: f64) -> Self {
        self.step_radius = Some(r);
        self
    }

    pub fn without_atlas(mut self) -> Self {
        self.with_atlas = false;
        self
    }

    pub fn with_ambient_complete(mut self, v: bool) -> Self {
        self.ambient_complete = v;
        self
    }

    /// Parses the kind names used on the command line.
    pub fn kind_from_name(name: &str, curvature: f64) -> Option<ExemplarKind> {
        Some(match name {
            "minkowski_patch" => ExemplarKind::MinkowskiPatch,
            "model_patch" => ExemplarKind::ModelPatch { curvature },
            "fan_space" => ExemplarKind::FanSpace,
            "punctured_patch" => ExemplarKind::PuncturedPatch,
            "slit_patch" => ExemplarKind::SlitPatch,
            "half_space_patch" => ExemplarKind::HalfSpacePatch,
            "toy_dag" => ExemplarKind::ToyDag,
            "timelike_cylinder" => ExemplarKind::TimelikeCylinder,
            _ => return None,
        })
    }
}

/// Lattice values `a, a + h, …` up to `b` (inclusive), exact for dyadic `h`.
fn lattice(a: f64, b: f64, h: f64) -> Vec<f64> {
    let k0 = (a / h).ceil() as i64;
    let k1 = (b / h + 1e-9).floor() as i64;
    (k0..=k1).map(|k| k as f64 * h).collect()
}

fn grid(extent: [[f64; 2]; 2], h: f64, keep: impl Fn(f64, f64) -> bool) -> Vec<Vec<f64>> {
    let ts = lattice(extent[0][0], extent[0][1], h);
    let xs = lattice(extent[1][0], extent[1][1], h);
    let mut out = Vec::new();
    for &t in &ts {
        for &x in &xs {
            if keep(t, x) {
                out.push(vec![t, x]);
            }
        }
    }
    out
}

/// Largest `|τ(x,y) − τ(x,y')| / d(y,y')` over neighbours `y'` of `y` at
/// resolution, used as the declared Lipschitz surrogate of a sample.
fn sample_lipschitz(space: &SpaceDescription, h: f64) -> f64 {
    let nb = resolution_neighbours(space, h);
    let n = space.len();
    let mut lip: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            let t = space.tau_ix(x, y);
            if !t.is_finite() {
                continue;
            }
            for &y2 in &nb[y] {
                let t2 = space.tau_ix(x, y2);
                if t2.is_finite() {
                    lip = lip.max((t - t2).abs() / space.dist_ix(y, y2));
                }
            }
        }
    }
    lip
}

/// Adds resolution, extent, Lipschitz surrogate, basis and atlas.
fn finish(
    space: SpaceDescription,
    h: f64,
    extent: Vec<[f64; 2]>,
    spec_atlas: bool,
    ambient_complete: bool,
) -> Result<SpaceDescription, SpaceError> {
    let lip = sample_lipschitz(&space, h);
    let diameter = space.diameter();
    let mut space = space
        .with_resolution(h)
        .with_extent(extent)
        .with_lipschitz(lip)
        .with_ambient_complete(ambient_complete)
        .with_basis(NeighbourhoodBasis::dyadic(h, diameter));
    if spec_atlas {
        let atlas = LocalisingAtlas::metric_balls(&space, 3.0 * h, true)?;
        space = space.with_atlas(atlas);
    }
    Ok(space)
}

/// Builds an exemplar space.
pub fn build_exemplar(spec: &ExemplarSpec) -> Result<SpaceDescription, SpaceError> {
    let h = spec.resolution;
    let ext = spec.extent;
    if !(h > 0.0) || ext.iter().any(|b| !(b[1] >= b[0])) {
        return Err(SpaceError::Invalid("resolution must be positive and the extent nonempty".into()));
    }
    let geometry = |formula: Formula, obstacles: Vec<Obstacle>| Geometry {
        formula,
        obstacles,
        step_radius: spec.step_radius,
    };
    let plane_extent = vec![ext[0], ext[1]];
    match spec.kind {
        ExemplarKind::MinkowskiPatch => {
            let s = SpaceDescription::from_geometry("minkowski_patch", grid(ext, h, |_, _| true), geometry(Formula::Minkowski, vec![]))?;
            finish(s, h, plane_extent, spec.with_atlas, spec.ambient_complete)
        }
        ExemplarKind::ModelPatch { curvature } => {
            let model = ModelSpace::with_curvature(curvature);
            let s = SpaceDescription::from_geometry(
                format!("model_patch(K={curvature})"),
                grid(ext, h, |_, _| true),
                geometry(Formula::Model(model), vec![]),
            )?;
            finish(s, h, plane_extent, spec.with_atlas, spec.ambient_complete)
        }
        ExemplarKind::FanSpace => {
            let mut coords: Vec<Vec<f64>> = grid(ext, h, |_, _| true).into_iter().map(|c| vec![c[0], c[1], 0.0]).collect();
            if !coords.iter().any(|c| c.iter().all(|&v| v == 0.0)) {
                return Err(SpaceError::Invalid("the fan lattice must contain the origin".into()));
            }
            let zmax = ext[0][1].max(h);
            let mut zs: Vec<f64> = (1..=4).map(|k| h / f64::from(1u32 << (5 - k))).collect();
            zs.extend(lattice(h, zmax, h));
            for z in zs {
                coords.push(vec![0.0, 0.0, z]);
            }
            let s = SpaceDescription::from_geometry("fan_space", coords, geometry(Formula::Fan, vec![]))?;
            // the ray sits above the plane; a symmetric z-range keeps the
            // plane away from the rim of the box
            finish(s, h, vec![ext[0], ext[1], [-zmax, zmax]], spec.with_atlas, spec.ambient_complete)
        }
        ExemplarKind::PuncturedPatch => {
            let hole = Obstacle::Point { at: [0.0, 0.0] };
            let s = SpaceDescription::from_geometry(
                "punctured_patch",
                grid(ext, h, |t, x| !(t == 0.0 && x == 0.0)),
                geometry(Formula::Minkowski, vec![hole]),
            )?;
            finish(s, h, plane_extent, spec.with_atlas, spec.ambient_complete)
        }
        ExemplarKind::SlitPatch => {
            let slit = Obstacle::Segment {
                from: [0.0, -1.5],
                to: [0.0, 1.5],
            };
            let s = SpaceDescription::from_geometry(
                "slit_patch",
                grid(ext, h, |t, x| !(t == 0.0 && x.abs() <= 1.5)),
                geometry(Formula::Minkowski, vec![slit]),
            )?;
            finish(s, h, plane_extent, spec.with_atlas, spec.ambient_complete)
        }
        ExemplarKind::HalfSpacePatch => {
            let s = SpaceDescription::from_geometry(
                "half_space_patch",
                grid(ext, h, |t, _| t < 0.0),
                geometry(Formula::Minkowski, vec![]),
            )?;
            let top = ext[0][1].min(0.0);
            finish(s, h, vec![[ext[0][0], top], ext[1]], spec.with_atlas, spec.ambient_complete)
        }
        ExemplarKind::ToyDag => toy_dag(),
        ExemplarKind::TimelikeCylinder => {
            let coords = grid([[0.0, 1.0 - h], ext[1]], h, |_, _| true);
            let n = coords.len();
            let all = BitMatrix::from_fn(n, |_, _| true);
            let s = SpaceDescription::from_relations(
                "timelike_cylinder",
                Some(coords),
                Metric::Euclidean,
                all.clone(),
                all,
                vec![f64::INFINITY; n * n],
            )?;
            let diameter = s.diameter();
            Ok(s.with_resolution(h).with_basis(NeighbourhoodBasis::dyadic(h, diameter)))
        }
    }
}

/// `0 → 1 → 3` and `0 → 2 → 3` with unit steps; `1` and `2` unrelated.
fn toy_dag() -> Result<SpaceDescription, SpaceError> {
    let n = 4;
    let edges = [(0, 1), (1, 3), (0, 2), (2, 3), (0, 3)];
    let mut chron = BitMatrix::new(n);
    let mut tau = vec![0.0; n * n];
    for (a, b) in edges {
        chron.set(a, b);
        tau[a * n + b] = if (a, b) == (0, 3) { 2.0 } else { 1.0 };
    }
    let metric: Vec<f64> = (0..n * n).map(|e| if e / n == e % n { 0.0 } else { 1.0 }).collect();
    let s = SpaceDescription::from_relations("toy_dag", None, Metric::Matrix(metric), chron.clone(), chron, tau)?;
    let all: Vec<usize> = (0..n).collect();
    let basis = NeighbourhoodBasis::Explicit((0..n).map(|x| vec![vec![x], all.clone()]).collect());
    let charts = (0..n)
        .map(|x| Chart::new(x, all.clone(), s.tau_matrix().to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(s.with_basis(basis).with_atlas(LocalisingAtlas::new(charts, false)?))
}

/// Region of a sprinkling, in the coordinates of its model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Region {
    /// `[[t0, t1], [x0, x1]]`.
    Box { bounds: [[f64; 2]; 2] },
    /// `{|t − t_c| + |x − x_c| ≤ half}`.
    Diamond { center: [f64; 2], half: f64 },
}

impl Region {
    fn bounds(&self) -> [[f64; 2]; 2] {
        match *self {
            Region::Box { bounds } => bounds,
            Region::Diamond { center, half } => [[center[0] - half, center[0] + half], [center[1] - half, center[1] + half]],
        }
    }

    fn volume(&self) -> f64 {
        match *self {
            Region::Box { bounds } => (bounds[0][1] - bounds[0][0]) * (bounds[1][1] - bounds[1][0]),
            Region::Diamond { half, .. } => 2.0 * half * half,
        }
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        match *self {
            Region::Box { bounds } => (0..2).all(|k| p[k] >= bounds[k][0] && p[k] <= bounds[k][1]),
            Region::Diamond { center, half } => (p[0] - center[0]).abs() + (p[1] - center[1]).abs() <= half,
        }
    }
}

/// Poisson sprinkling of a model space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SprinklingSpec {
    /// Expected points per unit coordinate area.
    pub density: f64,
    pub region: Region,
    pub model: ModelSpace,
    pub seed: u64,
    pub with_atlas: bool,
}

/// Poisson points in the region with relations and `τ` from the model.
/// Deterministic in the seed; points are sorted by time, then space.
pub fn sprinkle(spec: &SprinklingSpec) -> Result<SpaceDescription, SpaceError> {
    if !(spec.density > 0.0) || !spec.density.is_finite() {
        return Err(SpaceError::Invalid("density must be positive".into()));
    }
    spec.model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mean = spec.density * spec.region.volume();
    let count = Poisson::new(mean)
        .map_err(|e| SpaceError::Invalid(format!("bad Poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    let b = spec.region.bounds();
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(count);
    while pts.len() < count {
        let p = [rng.gen_range(b[0][0]..=b[0][1]), rng.gen_range(b[1][0]..=b[1][1])];
        if spec.region.contains(p) {
            pts.push(p);
        }
    }
    if pts.is_empty() {
        return Err(SpaceError::Empty);
    }
    pts.sort_by(|a, c| a[0].total_cmp(&c[0]).then(a[1].total_cmp(&c[1])));
    let formula = match spec.model.kind {
        crate::models::ModelKind::Minkowski => Formula::Minkowski,
        _ => Formula::Model(spec.model),
    };
    let s = SpaceDescription::from_geometry(
        format!("sprinkle(seed={})", spec.seed),
        pts.iter().map(|p| p.to_vec()).collect(),
        Geometry::new(formula),
    )?;
    let h = 1.0 / spec.density.sqrt();
    finish(s, h, vec![b[0], b[1]], spec.with_atlas, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_is_exact() {
        assert_eq!(lattice(-0.5, 0.5, 0.25), vec![-0.5, -0.25, 0.0, 0.25, 0.5]);
    }

    #[test]
    fn fan_values_on_the_sample() {
        let s = build_exemplar(&ExemplarSpec::new(ExemplarKind::FanSpace).without_atlas()).unwrap();
        let p = s.locate(&[-2.0, 0.0, 0.0]).unwrap();
        let z3 = s.locate(&[0.0, 0.0, 2.0]).unwrap();
        assert_eq!(s.tau_f(p, z3), 4.0);
        let z1 = s.locate(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.tau_f(z1, z3), 1.0);
        assert!(s.locate(&[0.0, 0.0, 0.015625]).is_some());
    }

    #[test]
    fn sprinkling_is_deterministic() {
        let spec = SprinklingSpec {
            density: 50.0,
            region: Region::Diamond {
                center: [0.0, 0.0],
                half: 0.5,
            },
            model: ModelSpace::minkowski(),
            seed: 7,
            with_atlas: false,
        };
        let a = sprinkle(&spec).unwrap();
        let b = sprinkle(&spec).unwrap();
        assert_eq!(a, b);
        assert!(a.len() > 5);
        assert!(a.ids().all(|x| a.coords(x).unwrap()[0].abs() <= 0.5));
    }
}
