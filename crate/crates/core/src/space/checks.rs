//! Axiom checkers: causal space, pre-length space, causal ladder, local
//! causal closedness, causal path connectedness and localisability.
//!
//! Every scan runs in lexicographic order of the tuples involved, so a
//! failure reports the smallest violating tuple.

use crate::bitmatrix::{ones, BitMatrix, BitSet};
use crate::tolerance;

use super::geometry::Geometry;
use super::report::{AxiomReport, Verdict, Witness};
use super::{PointId, SpaceDescription};

/// First `(x, y, z)` with `x R y`, `y R z` and not `x R z`.
fn first_intransitive(r: &BitMatrix) -> Option<(usize, usize, usize)> {
    for x in 0..r.size() {
        let rx = r.row(x);
        for y in r.row_iter(x) {
            let diff: Vec<u64> = r.row(y).iter().zip(rx).map(|(a, b)| a & !b).collect();
            let first = ones(&diff).next();
            if let Some(z) = first {
                return Some((x, y, z));
            }
        }
    }
    None
}

/// `≤` is a preorder, `≪` is transitive and `≪ ⊆ ≤`.
pub fn check_causal_space(space: &SpaceDescription) -> AxiomReport {
    let mut rep = AxiomReport::new("causal-space");
    let n = space.len();
    let le = space.causal();
    let ll = space.chron();
    rep.push(
        "reflexive <=",
        match (0..n).find(|&i| !le.get(i, i)) {
            Some(i) => Verdict::fail(Witness::new([i], "x <= x fails")),
            None => Verdict::Pass,
        },
    );
    rep.push(
        "transitive <=",
        match first_intransitive(le) {
            Some((x, y, z)) => Verdict::fail(Witness::new([x, y, z], "x <= y <= z but not x <= z")),
            None => Verdict::Pass,
        },
    );
    rep.push(
        "transitive <<",
        match first_intransitive(ll) {
            Some((x, y, z)) => Verdict::fail(Witness::new([x, y, z], "x << y << z but not x << z")),
            None => Verdict::Pass,
        },
    );
    rep.push(
        "<< within <=",
        match ll.first_missing_in(le) {
            Some((x, y)) => Verdict::fail(Witness::new([x, y], "x << y but not x <= y")),
            None => Verdict::Pass,
        },
    );
    rep
}

/// Neighbours within `1.5·h` (excluding the point itself), by coordinates.
pub(crate) fn resolution_neighbours(space: &SpaceDescription, h: f64) -> Vec<Vec<usize>> {
    let n = space.len();
    (0..n)
        .map(|i| (0..n).filter(|&j| j != i && space.dist_ix(i, j) <= 1.5 * h + 1e-12).collect())
        .collect()
}

/// Grid resolution: declared, else the smallest positive distance.
pub(crate) fn effective_resolution(space: &SpaceDescription) -> Option<f64> {
    if let Some(h) = space.resolution() {
        return Some(h);
    }
    let n = space.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let d = space.dist_ix(i, j);
            if d > 0.0 {
                best = best.min(d);
            }
        }
    }
    best.is_finite().then_some(best)
}

/// `τ` vanishes off `≤`, `τ > 0 ⇔ ≪`, the reverse triangle inequality
/// over all causal triples, and the ε-surrogate of lower semicontinuity.
pub fn check_prelength(space: &SpaceDescription) -> AxiomReport {
    let mut rep = AxiomReport::new("pre-length");
    let n = space.len();
    let le = space.causal();
    let ll = space.chron();
    let tau = |i: usize, j: usize| space.tau_ix(i, j);

    let mut off = None;
    'outer: for i in 0..n {
        for j in 0..n {
            if !le.get(i, j) && tau(i, j) > 0.0 {
                off = Some((i, j));
                break 'outer;
            }
        }
    }
    rep.push(
        "tau zero off <=",
        match off {
            Some((i, j)) => Verdict::fail(Witness::new([i, j], "tau positive without x <= y").with_values([tau(i, j)])),
            None => Verdict::Pass,
        },
    );

    let mut pos = None;
    'outer2: for i in 0..n {
        for j in 0..n {
            if (tau(i, j) > 0.0) != ll.get(i, j) {
                pos = Some((i, j));
                break 'outer2;
            }
        }
    }
    rep.push(
        "tau positive iff <<",
        match pos {
            Some((i, j)) => {
                let msg = if ll.get(i, j) {
                    "x << y but tau(x,y) = 0"
                } else {
                    "tau(x,y) > 0 but not x << y"
                };
                Verdict::fail(Witness::new([i, j], msg).with_values([tau(i, j)]))
            }
            None => Verdict::Pass,
        },
    );

    rep.push("reverse triangle inequality", reverse_triangle(space));
    rep.push("lower semicontinuity", lsc_surrogate(space));
    rep
}

fn reverse_triangle(space: &SpaceDescription) -> Verdict {
    let n = space.len();
    let le = space.causal();
    for x in 0..n {
        for y in le.row_iter(x) {
            let txy = space.tau_ix(x, y);
            for z in le.row_iter(y) {
                let tyz = space.tau_ix(y, z);
                let txz = space.tau_ix(x, z);
                let sum = txy + tyz;
                let ok = if txz == f64::INFINITY {
                    true
                } else {
                    tolerance::approx_le(sum, txz)
                };
                if !ok {
                    return Verdict::fail(
                        Witness::new([x, y, z], "tau(x,z) < tau(x,y) + tau(y,z)").with_values([txz, txy, tyz]),
                    );
                }
            }
        }
    }
    Verdict::Pass
}

/// For each chronological pair, moving either endpoint to a neighbour at
/// resolution must not lower `τ` by more than `2·Lip·h`.
fn lsc_surrogate(space: &SpaceDescription) -> Verdict {
    let Some(lip) = space.lipschitz() else {
        return Verdict::not_checkable("no Lipschitz constant declared");
    };
    if space.all_coords().is_none() {
        return Verdict::not_checkable("no coordinates to form converging sequences");
    }
    let Some(h) = effective_resolution(space) else {
        return Verdict::not_checkable("no resolution");
    };
    let tol = 2.0 * lip * h;
    let nb = resolution_neighbours(space, h);
    let n = space.len();
    for x in 0..n {
        for y in space.chron().row_iter(x) {
            let t = space.tau_ix(x, y);
            if t == f64::INFINITY {
                continue;
            }
            let worst = nb[y]
                .iter()
                .map(|&y2| (x, y2))
                .chain(nb[x].iter().map(|&x2| (x2, y)))
                .map(|(a, b)| (a, b, space.tau_ix(a, b)))
                .find(|&(_, _, v)| v < t - tol);
            if let Some((a, b, v)) = worst {
                return Verdict::flagged(
                    Witness::new([x, y, a, b], "tau drops by more than 2*Lip*h next to (x,y)").with_values([t, v, tol]),
                );
            }
        }
    }
    Verdict::Pass
}

/// Chronology, causality and the strong-causality surrogate. The verdicts
/// are monotone: a failure lower on the ladder fails everything above it.
pub fn check_causality_ladder(space: &SpaceDescription) -> AxiomReport {
    let mut rep = AxiomReport::new("causality-ladder");
    let n = space.len();
    let chron = match (0..n).find(|&i| space.chron().get(i, i)) {
        Some(i) => Verdict::fail(Witness::new([i], "x << x")),
        None => Verdict::Pass,
    };
    let mut causal = Verdict::Pass;
    'outer: for x in 0..n {
        for y in space.causal().row_iter(x) {
            if y != x && space.causal().get(y, x) {
                causal = Verdict::fail(Witness::new([x, y], "x <= y <= x with x != y"));
                break 'outer;
            }
        }
    }
    if causal.is_pass() {
        if let Some(w) = chron.witness() {
            causal = Verdict::fail(Witness::new(w.points.iter().map(|p| p.0), "chronology violated"));
        }
    }
    let strong = if let Some(w) = causal.witness() {
        Verdict::fail(Witness::new(w.points.iter().map(|p| p.0), "causality violated"))
    } else {
        strong_causality(space)
    };
    rep.push("chronology", chron);
    rep.push("causality", causal);
    rep.push("strong causality", strong);
    rep
}

/// Union of the causal diamonds `J(p, q)` over pairs `p ≤ q` in `v`.
fn diamond_hull(space: &SpaceDescription, le_t: &BitMatrix, v: &BitSet) -> BitSet {
    let n = space.len();
    let words = n.div_ceil(64);
    let mut hull = vec![0u64; words];
    for p in v.iter() {
        // past cones of the members of v in the future of p
        let mut pasts = vec![0u64; words];
        let mut targets = BitSet::from_words(space.causal().row(p));
        targets.and_with(v.words());
        for q in targets.iter() {
            for (a, b) in pasts.iter_mut().zip(le_t.row(q)) {
                *a |= b;
            }
        }
        for ((h, a), b) in hull.iter_mut().zip(&pasts).zip(space.causal().row(p)) {
            *h |= a & b;
        }
    }
    BitSet::from_words(&hull)
}

fn strong_causality(space: &SpaceDescription) -> Verdict {
    let Some(basis) = space.basis() else {
        return Verdict::not_checkable("no neighbourhood basis");
    };
    let le_t = space.causal().transpose();
    for x in space.ids() {
        let sets = basis.sets(space, x);
        let hulls: Vec<BitSet> = sets.iter().map(|v| diamond_hull(space, &le_t, v)).collect();
        // below the finest non-singleton set the sample cannot resolve a
        // smaller neighbourhood, so there the singleton {x} stands in for V
        let finest = sets.iter().position(|v| v.len() > 1);
        for (ui, u) in sets.iter().enumerate() {
            let singleton_ok = u.len() == 1 || Some(ui) == finest;
            let found = (0..sets.len()).rev().any(|vi| {
                let v = &sets[vi];
                v.contains(x.0) && v.is_subset_of(u) && (v.len() > 1 || singleton_ok) && hulls[vi].is_subset_of(u)
            });
            if !found {
                let escape = hulls[ui].iter().find(|&z| !u.contains(z)).unwrap_or(x.0);
                return Verdict::fail(
                    Witness::new([x.0, escape], format!("causal diamonds of every sub-neighbourhood leave basis set {ui}"))
                        .with_values([ui as f64]),
                );
            }
        }
    }
    Verdict::Pass
}

/// Sequences `q + kδ`, `k = 1, 2, 3`, of carrier points, for every
/// neighbour displacement `δ` at resolution.
fn lattice_rays(space: &SpaceDescription, nb: &[Vec<usize>], sign: f64) -> Vec<Vec<[usize; 3]>> {
    (0..space.len())
        .map(|q| {
            let cq = space.coords(PointId(q)).expect("coordinates");
            nb[q]
                .iter()
                .filter_map(|&r| {
                    let cr = space.coords(PointId(r)).expect("coordinates");
                    let step = |k: f64| -> Vec<f64> { cq.iter().zip(cr).map(|(a, b)| a + sign * k * (b - a)).collect() };
                    let first = if sign > 0.0 { Some(PointId(r)) } else { space.locate(&step(1.0)) }?;
                    let second = space.locate(&step(2.0))?;
                    let third = space.locate(&step(3.0))?;
                    Some([first.0, second.0, third.0])
                })
                .collect()
        })
        .collect()
}

/// Sample points related to some point within `NUDGE` lattice steps of each
/// carrier point: `fut[p]` collects the causal futures of the nudged copies
/// of `p`, `past[q]` the causal pasts of the nudged copies of `q`. A nudged
/// point is related to a sample point when a single admissible step reaches
/// it or a sample point related to it.
fn nudged_cones(space: &SpaceDescription, g: &Geometry, nb: &[Vec<usize>]) -> (Vec<BitSet>, Vec<BitSet>) {
    const NUDGE: f64 = 1e-3;
    let n = space.len();
    let coords = space.all_coords().expect("coordinates");
    let le_t = space.causal().transpose();
    let cone = |p: usize, future: bool| -> BitSet {
        let mut acc = BitSet::new(n);
        for &r in &nb[p] {
            let a: Vec<f64> = coords[p].iter().zip(&coords[r]).map(|(x, y)| x + NUDGE * (y - x)).collect();
            if !g.formula.contains(&a) {
                continue;
            }
            for s in 0..n {
                let step = if future {
                    g.step_allowed(&a, &coords[s])
                } else {
                    g.step_allowed(&coords[s], &a)
                };
                if step && !acc.contains(s) {
                    let row = if future { space.causal().row(s) } else { le_t.row(s) };
                    acc.or_with(row);
                }
            }
        }
        acc
    };
    ((0..n).map(|p| cone(p, true)).collect(), (0..n).map(|q| cone(q, false)).collect())
}

/// ε-closedness of `≤`: for every point, in the smallest basis set that
/// holds all its resolution neighbours, no unrelated pair is the limit of
/// related pairs. With a generating geometry the approximating pairs are
/// nudged copies of the endpoints; otherwise they are lattice rays whose
/// squared separation extrapolates to zero.
pub fn check_locally_causally_closed(space: &SpaceDescription) -> AxiomReport {
    let mut rep = AxiomReport::new("local-causal-closedness");
    let Some(basis) = space.basis() else {
        rep.push("closed <=", Verdict::not_checkable("no neighbourhood basis"));
        return rep;
    };
    let (Some(_), Some(h)) = (space.all_coords(), effective_resolution(space)) else {
        rep.push("closed <=", Verdict::Pass);
        return rep;
    };
    let nb = resolution_neighbours(space, h);
    let le = space.causal();
    let (cones, rays) = match space.geometry() {
        Some(g) => (Some(nudged_cones(space, g, &nb)), None),
        None => (None, Some((lattice_rays(space, &nb, 1.0), lattice_rays(space, &nb, -1.0)))),
    };
    let tau2 = |a: usize, b: usize| {
        let t = space.tau_ix(a, b);
        t * t
    };
    let vanishes = |f: [f64; 3]| (3.0 * f[0] - 3.0 * f[1] + f[2]).abs() <= 0.5 * h * h;
    let limit_of_related = |p: usize, q: usize| -> bool {
        if let Some((fut, past)) = &cones {
            return fut[p].contains(q) || past[q].contains(p);
        }
        let (fwd, back) = rays.as_ref().expect("lattice rays");
        fwd[q].iter().any(|ray| ray.iter().all(|&r| r != p && le.get(p, r)) && vanishes(ray.map(|r| tau2(p, r))))
            || back[p].iter().any(|ray| ray.iter().all(|&r| r != q && le.get(r, q)) && vanishes(ray.map(|r| tau2(r, q))))
    };
    for x in space.ids() {
        let sets = basis.sets(space, x);
        let u = match basis.radii() {
            Some(_) => sets.iter().find(|u| nb[x.0].iter().all(|&y| u.contains(y))),
            None => sets.last(),
        };
        let Some(u) = u else {
            rep.push("closed <=", Verdict::not_checkable("no basis set holds the resolution neighbours"));
            return rep;
        };
        for p in u.iter() {
            for q in u.iter() {
                if p != q && !le.get(p, q) && limit_of_related(p, q) {
                    rep.push(
                        "closed <=",
                        Verdict::fail(Witness::new([x.0, p, q], "unrelated pair (p,q) is a limit of related pairs near x")),
                    );
                    return rep;
                }
            }
        }
    }
    rep.push("closed <=", Verdict::Pass);
    rep
}

/// Every `x < y` is joined by a chain of admissible steps, and every
/// `x ≪ y` by a chain of chronological steps.
pub fn check_causally_path_connected(space: &SpaceDescription) -> AxiomReport {
    let mut rep = AxiomReport::new("causal-path-connectedness");
    let n = space.len();
    let mut reach = space.steps().clone();
    reach.close_transitively();
    let mut off_diag = space.causal().clone();
    for i in 0..n {
        off_diag.unset(i, i);
    }
    rep.push(
        "causal chains",
        match off_diag.first_missing_in(&reach) {
            Some((x, y)) => Verdict::fail(Witness::new([x, y], "x < y but no causal chain of admissible steps")),
            None => Verdict::Pass,
        },
    );
    let mut treach = space.steps().and(space.chron());
    treach.close_transitively();
    let mut verdict = Verdict::Pass;
    for x in 0..n {
        for y in space.chron().row_iter(x) {
            if !treach.get(x, y) {
                let w = Witness::new([x, y], "x << y but no timelike chain");
                if !reach.get(x, y) {
                    verdict = Verdict::fail(w);
                    break;
                }
                if verdict.is_pass() {
                    verdict = Verdict::flagged(Witness::new([x, y], "x << y is joined only by chains with a null step"));
                }
            }
        }
        if verdict.is_fail() {
            break;
        }
    }
    rep.push("timelike chains", verdict);
    rep
}

/// Per-source dynamic programme inside a chart: longest τ-chain, longest
/// d-chain, and longest chains without / with a null step.
struct LocalDp {
    tau: Vec<f64>,
    dlen: Vec<f64>,
    timelike: Vec<f64>,
    with_null: Vec<f64>,
}

fn local_dp(space: &SpaceDescription, order: &[usize], pos: &[usize], set: &BitSet, src: usize) -> LocalDp {
    let n = space.len();
    let ninf = f64::NEG_INFINITY;
    let mut dp = LocalDp {
        tau: vec![ninf; n],
        dlen: vec![ninf; n],
        timelike: vec![ninf; n],
        with_null: vec![ninf; n],
    };
    dp.tau[src] = 0.0;
    dp.dlen[src] = 0.0;
    dp.timelike[src] = 0.0;
    for &v in &order[pos[src]..] {
        if dp.tau[v] == ninf {
            continue;
        }
        let mut row = BitSet::from_words(space.steps().row(v));
        row.and_with(set.words());
        for w in row.iter() {
            if w == v {
                continue;
            }
            let t = space.step_weight(v, w);
            dp.tau[w] = dp.tau[w].max(dp.tau[v] + t);
            dp.dlen[w] = dp.dlen[w].max(dp.dlen[v] + space.dist_ix(v, w));
            if space.chron().get(v, w) {
                dp.timelike[w] = dp.timelike[w].max(dp.timelike[v] + t);
                dp.with_null[w] = dp.with_null[w].max(dp.with_null[v] + t);
            } else {
                let best = dp.timelike[v].max(dp.with_null[v]);
                dp.with_null[w] = dp.with_null[w].max(best + t);
            }
        }
    }
    dp
}

/// Whether a point is far enough from the rim of the sampled region, from
/// removed sets and from the rim of the chart for its local futures and pasts to be
/// resolved.
fn resolved_interior(space: &SpaceDescription, chart: &BitSet, y: usize, h: f64, nb: &[Vec<usize>]) -> bool {
    let (Some(c), Some(ext)) = (space.coords(PointId(y)), space.extent()) else {
        return true;
    };
    let inside = ext.iter().zip(c).all(|(b, v)| *v - b[0] > 1.01 * h && b[1] - *v > 1.01 * h);
    let clear = space
        .geometry()
        .is_none_or(|g| g.obstacles.iter().all(|o| o.distance(c) > 1.5 * h));
    inside && clear && nb[y].iter().all(|&z| chart.contains(z))
}

/// Localisability (i)–(iv) for every chart of the atlas.
pub fn check_localisable(space: &SpaceDescription) -> AxiomReport {
    let mut rep = AxiomReport::new("localisability");
    let names = [
        "(i) bounded d-length",
        "(ii) omega pre-length",
        "(ii) local futures and pasts",
        "(iii) local maximizers",
        "(iv) regularity",
    ];
    let Some(atlas) = space.atlas() else {
        for name in names {
            rep.push(name, Verdict::not_checkable("no localising atlas"));
        }
        return rep;
    };
    let (order, pos) = match space.step_order() {
        Ok(o) => o,
        Err(e) => {
            for name in names {
                rep.push(name, Verdict::not_checkable(e.to_string()));
            }
            return rep;
        }
    };
    let n = space.len();
    let h = effective_resolution(space);
    let nb = h.map(|h| resolution_neighbours(space, h));
    let le = space.causal();
    let ll = space.chron();

    let mut v_i = Verdict::Pass;
    let mut v_ii = Verdict::Pass;
    let mut v_ii_local = if h.is_some() && space.extent().is_some() {
        Verdict::Pass
    } else {
        Verdict::not_checkable("no resolution or extent to tell interior points")
    };
    let mut v_iii = Verdict::Pass;
    let mut v_iv = if atlas.regular {
        Verdict::Pass
    } else {
        Verdict::not_checkable("regularity not claimed")
    };

    for chart in atlas.charts() {
        let set = chart.member_set(n);
        let m = &chart.members;
        let omega = |p: usize, q: usize| chart.omega(p, q).expect("members");
        let dps: Vec<LocalDp> = m.iter().map(|&p| local_dp(space, order, pos, &set, p)).collect();

        if v_i.is_pass() {
            let worst = dps.iter().flat_map(|d| m.iter().map(|&q| d.dlen[q])).fold(0.0, f64::max);
            if !worst.is_finite() {
                v_i = Verdict::fail(Witness::new([chart.center], "unbounded d-length of causal chains in chart"));
            }
        }

        if v_ii.is_pass() {
            'ii: for &p in m {
                for &q in m {
                    let w = omega(p, q);
                    let bad = if !w.is_finite() || w < 0.0 {
                        Some("omega not finite and nonnegative")
                    } else if !le.get(p, q) && w > 0.0 {
                        Some("omega positive without p <= q")
                    } else if (w > 0.0) != ll.get(p, q) {
                        Some("omega positive does not match p << q")
                    } else {
                        None
                    };
                    if let Some(msg) = bad {
                        v_ii = Verdict::fail(Witness::new([chart.center, p, q], msg).with_values([w]));
                        break 'ii;
                    }
                }
            }
        }
        if v_ii.is_pass() {
            'rt: for &x in m {
                for y in le.row_iter(x).filter(|&y| set.contains(y)) {
                    for z in le.row_iter(y).filter(|&z| set.contains(z)) {
                        let (a, b, c) = (omega(x, y), omega(y, z), omega(x, z));
                        if !tolerance::approx_le(a + b, c) {
                            v_ii = Verdict::fail(
                                Witness::new([chart.center, x, y, z], "omega violates the reverse triangle inequality")
                                    .with_values([c, a, b]),
                            );
                            break 'rt;
                        }
                    }
                }
            }
        }
        if v_ii_local.is_pass() {
            let (h, nb) = (h.unwrap(), nb.as_ref().unwrap());
            for &y in m {
                if !resolved_interior(space, &set, y, h, nb) {
                    continue;
                }
                let fut = ll.row_iter(y).any(|z| set.contains(z));
                let past = m.iter().any(|&z| ll.get(z, y));
                if !fut || !past {
                    v_ii_local = Verdict::fail(Witness::new(
                        [chart.center, y],
                        if fut { "empty local chronological past" } else { "empty local chronological future" },
                    ));
                    break;
                }
            }
        }

        for (a, &p) in m.iter().enumerate() {
            let dp = &dps[a];
            for &q in m {
                if p == q || !le.get(p, q) {
                    continue;
                }
                let w = omega(p, q);
                if v_iii.is_pass() {
                    let best = dp.tau[q];
                    let tau = space.tau_ix(p, q);
                    let msg = if best == f64::NEG_INFINITY {
                        Some("no causal chain inside the chart")
                    } else if !tolerance::approx_eq(best, w) {
                        Some("no chain inside the chart realizes omega")
                    } else if !tolerance::approx_le(w, tau) {
                        Some("omega exceeds tau")
                    } else {
                        None
                    };
                    if let Some(msg) = msg {
                        v_iii = Verdict::fail(Witness::new([chart.center, p, q], msg).with_values([w, best, tau]));
                    }
                }
                if atlas.regular && !v_iv.is_fail() && ll.get(p, q) {
                    let (tl, nl, best) = (dp.timelike[q], dp.with_null[q], dp.tau[q]);
                    if tl == f64::NEG_INFINITY {
                        if best > f64::NEG_INFINITY && v_iv.is_pass() {
                            v_iv = Verdict::flagged(
                                Witness::new([chart.center, p, q], "p << q joined only by chains with a null step")
                                    .with_values([best]),
                            );
                        }
                    } else if !tolerance::approx_eq(tl, best) {
                        v_iv = Verdict::fail(
                            Witness::new([chart.center, p, q], "local maximizer is not timelike").with_values([best, tl]),
                        );
                    } else if nl > f64::NEG_INFINITY && !tolerance::definitely_gt(tl, nl) {
                        v_iv = Verdict::fail(
                            Witness::new([chart.center, p, q], "a chain with a null step is as long as the maximizer")
                                .with_values([tl, nl]),
                        );
                    }
                }
            }
        }
    }
    rep.push(names[0], v_i);
    rep.push(names[1], v_ii);
    rep.push(names[2], v_ii_local);
    rep.push(names[3], v_iii);
    rep.push(names[4], v_iv);
    rep
}
