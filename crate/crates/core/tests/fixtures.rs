use endonet::dynamics::{integrate, StopReason};
use endonet::endotactic::is_strongly_endotactic;
use endonet::fixtures::{self, ALL};
use endonet::stochastic::{cycle_escape_probability, generator_drift, recurrence_shell};
use endonet::structure::{corollary_decomposition, deficiency, is_asiphonic, linkage_classes, weakly_reversible};
use endonet::tiers::is_tier_descending_network;
use endonet::{format_network, parse_network};

struct Expected {
    name: &'static str,
    d: usize,
    complexes: usize,
    linkage: usize,
    deficiency: usize,
    weakly_reversible: bool,
    asiphonic: bool,
    se: bool,
    corollary: bool,
}

// complexes and linkage classes counted by hand from the fixture files
const TABLE: &[Expected] = &[
    Expected { name: "transient", d: 2, complexes: 4, linkage: 1, deficiency: 1, weakly_reversible: false, asiphonic: true, se: true, corollary: false },
    Expected { name: "explosive", d: 2, complexes: 5, linkage: 1, deficiency: 2, weakly_reversible: false, asiphonic: true, se: true, corollary: false },
    Expected { name: "not_se", d: 3, complexes: 4, linkage: 2, deficiency: 0, weakly_reversible: true, asiphonic: false, se: false, corollary: false },
    Expected { name: "bab", d: 2, complexes: 3, linkage: 1, deficiency: 0, weakly_reversible: true, asiphonic: false, se: true, corollary: false },
    Expected { name: "open_binary", d: 2, complexes: 5, linkage: 2, deficiency: 1, weakly_reversible: true, asiphonic: true, se: false, corollary: true },
    Expected { name: "birth_death", d: 1, complexes: 2, linkage: 1, deficiency: 0, weakly_reversible: true, asiphonic: true, se: true, corollary: true },
    Expected { name: "two_classes", d: 3, complexes: 3, linkage: 1, deficiency: 0, weakly_reversible: true, asiphonic: false, se: true, corollary: false },
    Expected { name: "augmented", d: 2, complexes: 13, linkage: 5, deficiency: 6, weakly_reversible: false, asiphonic: true, se: true, corollary: false },
    Expected { name: "rated", d: 2, complexes: 5, linkage: 2, deficiency: 1, weakly_reversible: false, asiphonic: false, se: false, corollary: false },
];

#[test]
fn every_fixture_is_covered() {
    assert_eq!(ALL.len(), TABLE.len());
    for f in ALL.iter() {
        assert!(TABLE.iter().any(|e| e.name == f.name), "{}", f.name);
        assert_eq!(fixtures::by_name(f.name).map(|g| g.name), Some(f.name));
    }
}

#[test]
fn structural_invariants_match_hand_counts() {
    for e in TABLE {
        let net = fixtures::by_name(e.name).unwrap().network();
        assert_eq!(net.dim(), e.d, "{}", e.name);
        assert_eq!(net.complexes().len(), e.complexes, "{}", e.name);
        assert_eq!(linkage_classes(&net).len(), e.linkage, "{}", e.name);
        assert_eq!(deficiency(&net), e.deficiency, "{}", e.name);
        assert_eq!(weakly_reversible(&net), e.weakly_reversible, "{}", e.name);
        assert_eq!(is_asiphonic(&net).unwrap(), e.asiphonic, "{}", e.name);
    }
}

#[test]
fn se_verdicts_and_tier_criterion_agree() {
    for e in TABLE {
        let net = fixtures::by_name(e.name).unwrap().network();
        let se = is_strongly_endotactic(&net).unwrap();
        let td = is_tier_descending_network(&net).unwrap();
        assert_eq!(se.is_se, e.se, "{}", e.name);
        assert_eq!(td.is_descending, e.se, "{}", e.name);
        assert_eq!(se.counterexample.is_none(), se.is_se, "{}", e.name);
    }
}

#[test]
fn corollary_decompositions() {
    for e in TABLE {
        let net = fixtures::by_name(e.name).unwrap().network();
        let found = corollary_decomposition(&net, |n| is_strongly_endotactic(n).map(|v| v.is_se).unwrap_or(false));
        assert_eq!(found.is_some(), e.corollary, "{}", e.name);
    }
}

#[test]
fn fixtures_are_canonical_fixed_points() {
    for f in ALL.iter() {
        let doc = f.document();
        let text = format_network(&doc);
        let again = parse_network(&text).unwrap();
        assert_eq!(format_network(&again), text, "{}", f.name);
    }
}

#[test]
fn rated_fixture_carries_its_rates() {
    let doc = fixtures::RATED.document();
    let values: Vec<f64> = doc.rates.values();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    assert_eq!(sorted, vec![0.5, 2.0, 3.5]);
}

#[test]
fn birth_death_drift_is_closed_form() {
    let doc = fixtures::BIRTH_DEATH.document();
    let u = |x: f64| x * x.ln() - x + 1.0;
    for x in 2u64..40 {
        let xf = x as f64;
        let expected = (u(xf + 1.0) - u(xf)) + xf * (u(xf - 1.0) - u(xf));
        let got = generator_drift(&doc.network, &doc.rates, &[x]).unwrap();
        assert!((got - expected).abs() < 1e-10 * expected.abs().max(1.0), "x = {x}");
    }
}

#[test]
fn open_binary_has_a_recurrence_shell() {
    let doc = fixtures::OPEN_BINARY.document();
    let report = recurrence_shell(&doc.network, &doc.rates, 30, 64, 1_000_000).unwrap();
    let r = report.expect("a clean shell exists");
    assert_eq!(r.violators, 0);
}

#[test]
fn transient_cycle_escapes_with_positive_probability() {
    let doc = fixtures::TRANSIENT.document();
    let net = &doc.network;
    let label = |s: &str| (0..net.reactions().len()).find(|&r| net.reaction_label(r) == s).unwrap();
    let cycle = [label("0 -> 2A + B"), label("2A + B -> 4A + 4B"), label("4A + 4B -> A")];
    let bound = cycle_escape_probability(net, &doc.rates, &cycle, &[10, 0], 1e-9).unwrap();
    assert!(bound.certified);
    assert!(bound.value > 0.0 && bound.value < 1.0);
}

#[test]
fn deterministic_trajectories_stay_bounded() {
    // the stochastic explosion of the second network has no deterministic counterpart
    let t = fixtures::TRANSIENT.document();
    let traj = integrate(&t.network, &t.rates, &[1.0, 1.0], 20.0, 1e-8, 1e-10).unwrap();
    assert_eq!(traj.stop_reason, StopReason::Horizon);
    let e = fixtures::EXPLOSIVE.document();
    let traj = integrate::<f64>(&e.network, &e.rates, &[1.0, 0.0], 50.0, 1e-8, 1e-10).unwrap();
    assert_eq!(traj.stop_reason, StopReason::Horizon);
    assert!(traj.last_state().iter().all(|&z| z.is_finite() && z < 100.0));
}
