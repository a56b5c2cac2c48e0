//! Property-based checks of the order-theoretic and metric invariants.

mod common;

use lls_core::curves::{self, CausalCurve};
use lls_core::io;
use lls_core::models::{self, ModelSpace, Side, TriangleSides};
use lls_core::space::checks;
use lls_core::spaces::{build_exemplar, sprinkle, ExemplarKind, ExemplarSpec, Region, SprinklingSpec};
use lls_core::{paths, tolerance, PointId, SpaceDescription};
use proptest::prelude::*;

fn sprinkling(density: f64, seed: u64, k: f64) -> SpaceDescription {
    sprinkle(&SprinklingSpec {
        density,
        region: Region::Diamond {
            center: [0.0, 0.0],
            half: 1.0,
        },
        model: ModelSpace::with_curvature(k),
        seed,
        with_atlas: false,
    })
    .expect("sprinkling builds")
}

fn grid() -> SpaceDescription {
    build_exemplar(&ExemplarSpec::new(ExemplarKind::MinkowskiPatch).without_atlas()).unwrap()
}

/// A causal chain through the grid picked by a list of choice indices.
fn chain_from_choices(space: &SpaceDescription, start: usize, choices: &[usize]) -> Vec<PointId> {
    let mut chain = vec![PointId(start % space.len())];
    for &c in choices {
        let last = *chain.last().unwrap();
        let future: Vec<usize> = space.causal().row_iter(last.0).filter(|&j| j != last.0).collect();
        if future.is_empty() {
            break;
        }
        chain.push(PointId(future[c % future.len()]));
    }
    chain
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tau_length_is_the_partition_infimum(start in 0usize..10_000, choices in prop::collection::vec(0usize..10_000, 1..10)) {
        let g = grid();
        let chain = chain_from_choices(&g, start, &choices);
        prop_assume!(chain.len() >= 2);
        let got = curves::tau_length(&g, &CausalCurve::from_points(chain.clone())).unwrap().value.to_f64();
        prop_assert_eq!(got, common::brute_force_partition_min(&g, &chain));
    }

    #[test]
    fn dropping_an_interior_point_never_shortens_a_chain(start in 0usize..10_000, choices in prop::collection::vec(0usize..10_000, 2..10), drop in 0usize..100) {
        let g = grid();
        let chain = chain_from_choices(&g, start, &choices);
        prop_assume!(chain.len() >= 3);
        let full = curves::tau_length(&g, &CausalCurve::from_points(chain.clone())).unwrap().value.to_f64();
        let mut coarse = chain.clone();
        coarse.remove(1 + drop % (chain.len() - 2));
        let coarser = curves::tau_length(&g, &CausalCurve::from_points(coarse)).unwrap().value.to_f64();
        prop_assert!(full <= coarser + 1e-12, "{full} > {coarser}");
    }

    #[test]
    fn longest_path_matches_enumeration_on_sprinklings(seed in 0u64..1_000, k in prop::sample::select(vec![0.0, 1.0, -1.0])) {
        let s = sprinkling(6.0, seed, k);
        for x in s.ids() {
            for y in s.ids() {
                let t = curves::compute_t(&s, x, y).unwrap().to_f64();
                prop_assert_eq!(t, common::exhaustive_longest_path(&s, x, y), "T({}, {})", x, y);
            }
        }
    }

    #[test]
    fn sprinklings_are_prelength_spaces_with_a_monotone_ladder(seed in 0u64..1_000, k in prop::sample::select(vec![0.0, 1.0, -1.0])) {
        let s = sprinkling(40.0, seed, k);
        let causal = checks::check_causal_space(&s);
        prop_assert!(causal.passed(), "{}", causal.summary());
        let pre = checks::check_prelength(&s);
        prop_assert!(pre.passed(), "{}", pre.summary());
        let ladder = checks::check_causality_ladder(&s);
        let holds = |name: &str| ladder.get(name).is_some_and(|v| v.is_pass());
        if holds("strong causality") {
            prop_assert!(holds("causality"));
        }
        if holds("causality") {
            prop_assert!(holds("chronology"));
        }
    }

    #[test]
    fn space_files_round_trip(seed in 0u64..1_000) {
        let s = sprinkling(20.0, seed, 0.0);
        let text = io::save_space(&s);
        let back = io::load_space(&text).unwrap();
        prop_assert_eq!(back.len(), s.len());
        prop_assert_eq!(back.tau_matrix(), s.tau_matrix());
        prop_assert!(back.causal() == s.causal() && back.chron() == s.chron());
        prop_assert_eq!(io::save_space(&back), text);
    }

    #[test]
    fn corresponding_points_sit_at_their_fraction(a in 0.05..0.8f64, b in 0.05..0.8f64, extra in 0.0..0.8f64, s in 0.0..=1.0f64,
                                                  k in prop::sample::select(vec![0.0, 1.0, -1.0])) {
        let sides = TriangleSides::new(a, b, a + b + extra);
        prop_assume!(models::check_size_bounds(sides, k).unwrap());
        let m = ModelSpace::with_curvature(k);
        let tri = models::realize_triangle(&m, sides).unwrap();
        for side in [Side::Xy, Side::Yz, Side::Xz] {
            let (p, q, len) = tri.side(side);
            let c = models::corresponding_point(&tri, side, s).unwrap();
            let before = models::tau_model(&m, p, c).unwrap().to_f64();
            let after = models::tau_model(&m, c, q).unwrap().to_f64();
            prop_assert!((before - s * len).abs() < 1e-9, "{side:?}: {before} vs {}", s * len);
            prop_assert!((after - (1.0 - s) * len).abs() < 1e-9, "{side:?}: {after} vs {}", (1.0 - s) * len);
        }
    }
}

#[test]
fn corresponding_points_at_the_ends_are_the_vertices() {
    let m = ModelSpace::with_curvature(1.0);
    let tri = models::realize_triangle(&m, TriangleSides::new(0.3, 0.4, 0.9)).unwrap();
    assert_eq!(models::corresponding_point(&tri, Side::Xy, 0.0).unwrap(), tri.x);
    assert_eq!(models::corresponding_point(&tri, Side::Xy, 1.0).unwrap(), tri.y);
    assert_eq!(models::corresponding_point(&tri, Side::Yz, 1.0).unwrap(), tri.z);
    assert!(models::corresponding_point(&tri, Side::Xz, 1.5).is_err());
}

#[test]
fn the_causality_ladder_separates_the_cylinder() {
    let cyl = build_exemplar(&ExemplarSpec::new(ExemplarKind::TimelikeCylinder)).unwrap();
    let ladder = checks::check_causality_ladder(&cyl);
    assert!(ladder.get("chronology").unwrap().is_fail());
    assert!(ladder.get("causality").unwrap().is_fail());
    assert!(ladder.get("strong causality").unwrap().is_fail());
}

#[test]
fn longest_paths_reach_tau_on_curved_sprinklings() {
    for k in [1.0, -1.0] {
        let s = sprinkle(&SprinklingSpec {
            density: 200.0,
            region: Region::Diamond {
                center: [0.0, 0.0],
                half: 1.0,
            },
            model: ModelSpace::with_curvature(k),
            seed: 7,
            with_atlas: false,
        })
        .unwrap();
        let (order, pos) = s.step_order().unwrap();
        for x in s.ids() {
            let tree = paths::preferred_tree(s.steps(), order, pos, x.0, None, |i, j| s.tau_f(PointId(i), PointId(j)));
            for y in s.ids().filter(|&y| s.le(x, y)) {
                let (t, tau) = (tree.exact[y.0], s.tau_f(x, y));
                assert!(tolerance::approx_eq(t, tau), "K = {k}: T({x}, {y}) = {t} < tau = {tau}");
            }
        }
    }
}
