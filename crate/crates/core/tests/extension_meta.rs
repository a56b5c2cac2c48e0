//! Relations between the extension audit, τ-monotonicity, the boundary and
//! the consistency cross-check on the shipped pairs and on injected defects.

use lls_core::extension::{self, ExtensionCandidate, MonotoneVerdict};
use lls_core::spaces::{build_exemplar, ExemplarKind, ExemplarSpec};
use lls_core::SpaceDescription;
use proptest::prelude::*;

fn build(kind: ExemplarKind) -> SpaceDescription {
    build_exemplar(&ExemplarSpec::new(kind)).unwrap()
}

#[test]
fn a_passing_extension_is_tau_monotone_and_has_a_boundary() {
    for (b, a) in extension::exemplar_extension_pairs() {
        let (base, ambient) = (build(b), build(a));
        let cand = ExtensionCandidate::inclusion(&base, &ambient).unwrap();
        let rep = extension::check_extension(&cand).unwrap();
        assert!(rep.passed(), "{} -> {}: {}", base.name(), ambient.name(), rep.clauses.summary());
        assert!(matches!(extension::check_tau_monotone(&cand), MonotoneVerdict::Pass { .. }));
        let boundary = extension::compute_boundary(&cand);
        assert!(!boundary.lemma_violation);
        assert!(!(boundary.future.is_empty() && boundary.past.is_empty()));
        for r in &boundary.reaching_curves {
            let pts = &r.curve.points;
            assert!(pts.len() >= 2);
            assert!(pts.first() == Some(&r.point) || pts.last() == Some(&r.point));
            assert_eq!(pts.iter().filter(|&&p| !cand.in_image(p)).count(), 1);
        }
    }
}

#[test]
fn a_passing_extension_with_all_hypotheses_would_be_an_inconsistency() {
    let h = extension::Hypotheses {
        base_strongly_causal: true,
        base_tc: true,
        ambient_regular: true,
        ambient_bounded_above_at: Some(0.0),
    };
    assert_eq!(extension::assess(h.clone()), (true, vec![]));
    let (flag, failed) = extension::assess(extension::Hypotheses { base_tc: false, ..h });
    assert!(!flag);
    assert_eq!(failed.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Shrinking τ between two image points breaks τ-monotonicity, and the
    /// curve-length clause of the audit must notice it as well.
    #[test]
    fn injected_tau_defects_are_detected(i in 0usize..10_000, j in 0usize..10_000, shrink in 0.05..0.95f64) {
        let base = build(ExemplarKind::HalfSpacePatch);
        let mut ambient = build(ExemplarKind::MinkowskiPatch);
        let cand = ExtensionCandidate::inclusion(&base, &ambient).unwrap();
        let emb = cand.embedding().to_vec();
        let related: Vec<_> = base.ids().flat_map(|x| base.ids().map(move |y| (x, y))).filter(|&(x, y)| base.ll(x, y)).collect();
        let (x, y) = related[(i * 7919 + j) % related.len()];
        let (ax, ay) = (emb[x.0], emb[y.0]);
        let shrunk = ambient.tau_f(ax, ay) * shrink;
        ambient.set_tau(ax, ay, shrunk);
        let cand = ExtensionCandidate::new(&base, &ambient, emb).unwrap();
        let rep = extension::check_extension(&cand).unwrap();
        let monotone = extension::check_tau_monotone(&cand);
        let monotone_failed = matches!(monotone, MonotoneVerdict::Fail { .. });
        prop_assert!(monotone_failed);
        prop_assert!(!rep.passed(), "audit missed a shrunk pair ({}, {})", x, y);
    }
}
