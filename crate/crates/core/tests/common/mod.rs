//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the closed forms or search routines under test:
//! model distances come from integrating the geodesic equation, chain
//! lengths from enumerating partitions, and longest paths from enumerating
//! every step path.

#![allow(dead_code)]

use lls_core::models::{ModelKind, ModelPoint, ModelSpace};
use lls_core::{PointId, SpaceDescription};

/// `∂φ` for the conformal factor `e^φ` of the model metric `e^{2φ}(−dt² + dx²)`.
fn grad_phi(model: &ModelSpace, p: [f64; 2]) -> [f64; 2] {
    match model.kind {
        ModelKind::Minkowski => [0.0, 0.0],
        ModelKind::DeSitterCover => [p[0].tan(), 0.0],
        ModelKind::AntiDeSitterCover => [0.0, p[1].tan()],
    }
}

fn conformal_factor(model: &ModelSpace, p: [f64; 2]) -> f64 {
    let r = model.radius.unwrap_or(1.0);
    match model.kind {
        ModelKind::Minkowski => 1.0,
        ModelKind::DeSitterCover => r / p[0].cos(),
        ModelKind::AntiDeSitterCover => r / p[1].cos(),
    }
}

/// Right-hand side of the geodesic equation of a conformally flat metric:
/// `ẍ^a = −2 (∂φ·ẋ) ẋ^a + η(ẋ,ẋ) η^{ab} ∂_b φ`.
fn rhs(model: &ModelSpace, s: [f64; 4]) -> [f64; 4] {
    let (p, v) = ([s[0], s[1]], [s[2], s[3]]);
    let g = grad_phi(model, p);
    let dot = g[0] * v[0] + g[1] * v[1];
    let eta = -v[0] * v[0] + v[1] * v[1];
    [
        v[0],
        v[1],
        -2.0 * dot * v[0] - eta * g[0],
        -2.0 * dot * v[1] + eta * g[1],
    ]
}

/// Integrates the geodesic from `p` with initial velocity `v` over the
/// affine interval `[0, 1]` with classical RK4, returning the state at
/// each of `steps + 1` nodes.
pub fn integrate(model: &ModelSpace, p: [f64; 2], v: [f64; 2], steps: usize) -> Vec<[f64; 4]> {
    let h = 1.0 / steps as f64;
    let mut s = [p[0], p[1], v[0], v[1]];
    let mut out = vec![s];
    let add = |a: [f64; 4], b: [f64; 4], k: f64| std::array::from_fn::<f64, 4, _>(|i| a[i] + k * b[i]);
    for _ in 0..steps {
        let k1 = rhs(model, s);
        let k2 = rhs(model, add(s, k1, h / 2.0));
        let k3 = rhs(model, add(s, k2, h / 2.0));
        let k4 = rhs(model, add(s, k3, h));
        s = std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        out.push(s);
    }
    out
}

/// Result of solving the two-point problem by shooting.
pub struct Shot {
    /// Time separation: the constant speed of the affine geodesic.
    pub tau: f64,
    /// Positions along the geodesic at affine parameters `k / steps`.
    pub path: Vec<[f64; 2]>,
}

/// Solves the boundary-value problem `γ(0) = p`, `γ(1) = q` by Newton
/// iteration on the initial velocity, starting from the flat chord.
pub fn shoot(model: &ModelSpace, p: ModelPoint, q: ModelPoint, steps: usize) -> Option<Shot> {
    let (p, q) = (p.coords, q.coords);
    let end = |v: [f64; 2]| {
        let s = *integrate(model, p, v, steps).last().unwrap();
        [s[0] - q[0], s[1] - q[1]]
    };
    let mut v = [q[0] - p[0], q[1] - p[1]];
    for _ in 0..60 {
        let f = end(v);
        if f[0].abs().max(f[1].abs()) < 1e-13 {
            let states = integrate(model, p, v, steps);
            let omega = conformal_factor(model, p);
            let speed2 = v[0] * v[0] - v[1] * v[1];
            if speed2 <= 0.0 {
                return None;
            }
            return Some(Shot {
                tau: omega * speed2.sqrt(),
                path: states.iter().map(|s| [s[0], s[1]]).collect(),
            });
        }
        let eps = 1e-7;
        let f0 = end([v[0] + eps, v[1]]);
        let f1 = end([v[0], v[1] + eps]);
        let j = [
            [(f0[0] - f[0]) / eps, (f1[0] - f[0]) / eps],
            [(f0[1] - f[1]) / eps, (f1[1] - f[1]) / eps],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            return None;
        }
        v[0] -= (j[1][1] * f[0] - j[0][1] * f[1]) / det;
        v[1] -= (-j[1][0] * f[0] + j[0][0] * f[1]) / det;
    }
    None
}

/// Minimum of the τ-sums over every partition of the chain that keeps both
/// endpoints.
pub fn brute_force_partition_min(space: &SpaceDescription, chain: &[PointId]) -> f64 {
    let n = chain.len();
    if n < 2 {
        return 0.0;
    }
    let inner = n - 2;
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << inner) {
        let mut sum = 0.0;
        let mut prev = chain[0];
        for (k, &p) in chain.iter().enumerate().skip(1) {
            let keep = k == n - 1 || mask & (1 << (k - 1)) != 0;
            if keep {
                sum += space.tau_f(prev, p);
                prev = p;
            }
        }
        best = best.min(sum);
    }
    best
}

/// Largest τ-sum over every path of elementary steps from `x` to `y`, by
/// depth-first enumeration; zero when `y` is unreachable or `x = y`.
pub fn exhaustive_longest_path(space: &SpaceDescription, x: PointId, y: PointId) -> f64 {
    fn dfs(space: &SpaceDescription, at: PointId, y: PointId, acc: f64, best: &mut f64) {
        if at == y {
            *best = best.max(acc);
            return;
        }
        for next in space.steps().row_iter(at.0).map(PointId) {
            if next != at && space.le(next, y) {
                dfs(space, next, y, acc + space.tau_f(at, next), best);
            }
        }
    }
    if x == y {
        return 0.0;
    }
    let mut best = 0.0;
    dfs(space, x, y, 0.0, &mut best);
    best
}
