use projdyn_core::eigen::DEFAULT_PROXIMAL_TOL;
use projdyn_core::limit_set::{limit_set_approx, spectrum, DEFAULT_DEDUP_EPS};
use projdyn_core::semigroup::{check_h0, check_h1, check_h2, enumerate_words, H0Options};
use projdyn_core::torus::{orbit_rational, RationalTorusPoint, DEFAULT_ORBIT_BUDGET};
use projdyn_core::walk::{run_chain, PcPoint, WalkConfig};
use projdyn_core::{act, eigen_dominant, proj_distance, GeneratorSet, ProjectivePoint, Status};

const AB: &str = "dim 2\ngen a\n2 1\n1 1\ngen b\n3 2\n1 1\n";

fn ab() -> GeneratorSet {
    GeneratorSet::parse(AB).unwrap()
}

#[test]
fn text_round_trip() {
    let gens = ab();
    let again = GeneratorSet::parse(&gens.to_text()).unwrap();
    assert_eq!(again.to_text(), gens.to_text());
    assert_eq!(again.dim(), 2);
    assert_eq!(again.len(), 2);
}

#[test]
fn rational_entries_are_exact() {
    let gens = GeneratorSet::parse("dim 2\ngen h\n1/2 0\n0 3/2\n").unwrap();
    let h = gens.matrix(0);
    assert_eq!(h.entry(0, 0).to_string(), "1/2");
    assert_eq!(h.det().to_string(), "3/4");
}

#[test]
fn every_hypothesis_holds_for_the_pair() {
    let gens = ab();
    assert_eq!(check_h0(&gens, H0Options::default()).status, Status::Satisfied);
    assert_eq!(check_h1(&gens, 6).unwrap().status, Status::Satisfied);
    assert_eq!(check_h2(&gens, 6, DEFAULT_PROXIMAL_TOL).unwrap().status, Status::Satisfied);
}

#[test]
fn spectrum_and_limit_set_agree() {
    let gens = ab();
    let s = spectrum(&gens, 6, DEFAULT_PROXIMAL_TOL).unwrap();
    let l = limit_set_approx(&gens, 6, DEFAULT_PROXIMAL_TOL, DEFAULT_DEDUP_EPS).unwrap();
    // Positive matrices: every nonempty word is proximal.
    let words: Vec<_> = enumerate_words(&gens, 6).unwrap().filter(|w| !w.is_empty()).collect();
    assert_eq!(s.entries.len(), words.len());
    for w in words {
        let info = eigen_dominant(&w.product().to_float(), DEFAULT_PROXIMAL_TOL).unwrap();
        assert!(l.nearest_distance(&info.dominant_vector) < DEFAULT_DEDUP_EPS);
    }
}

#[test]
fn dominant_direction_is_fixed() {
    let gens = ab();
    for g in gens.floats() {
        let v = eigen_dominant(&g, DEFAULT_PROXIMAL_TOL).unwrap().dominant_vector;
        assert!(proj_distance(&act(&g, &v).unwrap(), &v) < 1e-14);
    }
}

#[test]
fn chain_is_reproducible() {
    let gens = ab();
    let cfg = WalkConfig::uniform(2, 11, 3000, 2.0);
    let start = PcPoint::new(ProjectivePoint::basis(2, 1), 0.5);
    let a = run_chain(&gens, &cfg, &start, 3).unwrap();
    let b = run_chain(&gens, &cfg, &start, 3).unwrap();
    assert_eq!(a.turns(), b.turns());
    assert_ne!(a.turns(), run_chain(&gens, &cfg, &start, 4).unwrap().turns());
}

#[test]
fn orbit_of_a_fixed_point_is_trivial() {
    let gens = ab();
    let zero = RationalTorusPoint::new(9, &[0, 0]).unwrap();
    let orbit = orbit_rational(&gens, &zero, DEFAULT_ORBIT_BUDGET).unwrap();
    assert_eq!(orbit.report.orbit_size, Some(1));
    // The three nonzero 2-torsion points are permuted cyclically.
    let half = RationalTorusPoint::new(2, &[1, 1]).unwrap();
    let orbit = orbit_rational(&gens, &half, DEFAULT_ORBIT_BUDGET).unwrap();
    assert!(orbit.report.finite);
    assert_eq!(orbit.report.orbit_size, Some(3));
}
