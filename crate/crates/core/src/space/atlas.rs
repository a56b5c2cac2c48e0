//! Surrogate topology (neighbourhood bases) and localising atlases.

use crate::bitmatrix::BitSet;
use crate::paths;

use super::{PointId, SpaceDescription, SpaceError};

/// For every point, a family of neighbourhoods ordered from small to large.
#[derive(Debug, Clone, PartialEq)]
pub enum NeighbourhoodBasis {
    /// Open metric balls of the given increasing radii around each point.
    MetricBalls { radii: Vec<f64> },
    /// Explicit member lists: `sets[x]` lists the neighbourhoods of `x`.
    Explicit(Vec<Vec<Vec<usize>>>),
}

impl NeighbourhoodBasis {
    /// Balls of radius `0.99·h·2^k`, `k = 0, 1, …`, until the whole carrier
    /// is covered.
    pub fn dyadic(h: f64, diameter: f64) -> Self {
        let mut radii = Vec::new();
        let mut r = 0.99 * h;
        loop {
            radii.push(r);
            if r > diameter {
                break;
            }
            r *= 2.0;
        }
        NeighbourhoodBasis::MetricBalls { radii }
    }

    /// The neighbourhoods of `x`, smallest first.
    pub fn sets(&self, space: &SpaceDescription, x: PointId) -> Vec<BitSet> {
        match self {
            NeighbourhoodBasis::MetricBalls { radii } => radii.iter().map(|&r| space.ball(x, r)).collect(),
            NeighbourhoodBasis::Explicit(all) => all[x.0]
                .iter()
                .map(|m| BitSet::from_indices(space.len(), m.iter().copied()))
                .collect(),
        }
    }

    /// Radius of each basis set, when the basis consists of balls.
    pub fn radii(&self) -> Option<&[f64]> {
        match self {
            NeighbourhoodBasis::MetricBalls { radii } => Some(radii),
            NeighbourhoodBasis::Explicit(_) => None,
        }
    }
}

/// A localising neighbourhood `Ω` with its local time separation `ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub center: usize,
    /// Sorted member indices.
    pub members: Vec<usize>,
    /// `ω` on members, row-major in member order.
    pub omega: Vec<f64>,
}

impl Chart {
    pub fn new(center: usize, mut members: Vec<usize>, omega: Vec<f64>) -> Result<Self, SpaceError> {
        let m = members.len();
        if omega.len() != m * m {
            return Err(SpaceError::Dimension {
                what: format!("omega of chart {center}"),
                got: omega.len(),
                expected: m * m,
            });
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            // keep ω aligned with a sorted member list
            let mut idx: Vec<usize> = (0..m).collect();
            idx.sort_by_key(|&k| members[k]);
            let sorted: Vec<usize> = idx.iter().map(|&k| members[k]).collect();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(SpaceError::Invalid(format!("chart {center} lists a member twice")));
            }
            let omega = (0..m * m).map(|e| omega[idx[e / m] * m + idx[e % m]]).collect();
            members = sorted;
            return Self::new(center, members, omega);
        }
        if members.binary_search(&center).is_err() {
            return Err(SpaceError::Invalid(format!("chart of point {center} does not contain it")));
        }
        Ok(Self { center, members, omega })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn local(&self, global: usize) -> Option<usize> {
        self.members.binary_search(&global).ok()
    }

    pub fn contains(&self, global: usize) -> bool {
        self.local(global).is_some()
    }

    /// `ω(p, q)` for members `p, q` (global indices).
    pub fn omega(&self, p: usize, q: usize) -> Option<f64> {
        let (a, b) = (self.local(p)?, self.local(q)?);
        Some(self.omega[a * self.members.len() + b])
    }

    pub fn member_set(&self, n: usize) -> BitSet {
        BitSet::from_indices(n, self.members.iter().copied())
    }
}

/// One localising neighbourhood per point, plus the regularity claim.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalisingAtlas {
    charts: Vec<Chart>,
    pub regular: bool,
}

impl LocalisingAtlas {
    /// `charts[x]` must be the chart of point `x`.
    pub fn new(charts: Vec<Chart>, regular: bool) -> Result<Self, SpaceError> {
        for (i, c) in charts.iter().enumerate() {
            if c.center != i {
                return Err(SpaceError::Invalid(format!("chart {i} is centred at {}", c.center)));
            }
        }
        Ok(Self { charts, regular })
    }

    /// Metric balls of the given radius with `ω` the longest step chain
    /// inside the ball. When the space has removed sets, each ball is cut
    /// down to the points whose straight segment to the centre avoids them.
    pub fn metric_balls(space: &SpaceDescription, radius: f64, regular: bool) -> Result<Self, SpaceError> {
        let obstacles = space.geometry().map(|g| g.obstacles.as_slice()).unwrap_or_default();
        let visible = |x: PointId, y: usize| match (space.coords(x), space.coords(PointId(y))) {
            (Some(a), Some(b)) => obstacles.iter().all(|o| !o.blocks(a, b)),
            _ => true,
        };
        let charts = space
            .ids()
            .map(|x| {
                let members: Vec<usize> = space.ball(x, radius).iter().filter(|&y| visible(x, y)).collect();
                let omega = local_longest(space, &members)?;
                Chart::new(x.0, members, omega)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(charts, regular)
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, x: PointId) -> &Chart {
        &self.charts[x.0]
    }

    pub fn chart_mut(&mut self, x: PointId) -> &mut Chart {
        &mut self.charts[x.0]
    }

    pub fn len(&self) -> usize {
        self.charts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }
}

/// Longest step chain between members, staying among members; `0` when no
/// chain exists. Row-major in member order.
pub fn local_longest(space: &SpaceDescription, members: &[usize]) -> Result<Vec<f64>, SpaceError> {
    let (order, pos) = space.step_order()?;
    let n = space.len();
    let set = BitSet::from_indices(n, members.iter().copied());
    let m = members.len();
    let mut omega = vec![0.0; m * m];
    for (a, &p) in members.iter().enumerate() {
        let vals = paths::longest_values(space.steps(), order, pos, p, Some(&set), |i, j| space.step_weight(i, j));
        for (b, &q) in members.iter().enumerate() {
            if vals[q] > 0.0 {
                omega[a * m + b] = vals[q];
            }
        }
    }
    Ok(omega)
}
