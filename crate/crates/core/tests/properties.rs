use std::sync::OnceLock;

use anosov_zeta_core::group::{format_word, parse_word, CodingAutomaton, DehnReducer, Gen, GroupPresentation, Word};
use anosov_zeta_core::linalg::Mat;
use anosov_zeta_core::orbit::{enumerate_primitive_classes, Cutoff, EnumerationOptions, Fingerprinter, OrbitDatabase};
use anosov_zeta_core::rep::{weight_top, CMat, Representation, UnitaryCharacter};
use anosov_zeta_core::zeta::{count_pi, entropy, euler_zeta, l_euler_zeta, TraceTable};
use anosov_zeta_core::Complex64;
use proptest::prelude::*;

fn presentation() -> &'static GroupPresentation {
    static P: OnceLock<GroupPresentation> = OnceLock::new();
    P.get_or_init(|| GroupPresentation::surface(2).unwrap())
}

fn octagon() -> &'static Representation {
    static R: OnceLock<Representation> = OnceLock::new();
    R.get_or_init(|| Representation::fuchsian_octagon(2).unwrap())
}

/// Genus-2 octagon classes up to length 6.
fn db6() -> &'static OrbitDatabase {
    static DB: OnceLock<OrbitDatabase> = OnceLock::new();
    DB.get_or_init(|| {
        let a = CodingAutomaton::build(presentation(), 4).unwrap();
        enumerate_primitive_classes(&a, octagon(), Cutoff::Length(6), &EnumerationOptions::default()).unwrap()
    })
}

fn h6() -> f64 {
    static H: OnceLock<f64> = OnceLock::new();
    *H.get_or_init(|| entropy(db6()).unwrap().value)
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0u8..8, 0..=max_len).prop_map(|v| Word::new(v).freely_reduced())
}

fn cyclic_word(max_len: usize) -> impl Strategy<Value = Word> {
    word(max_len).prop_map(|w| w.cyclically_reduced()).prop_filter("nonempty", |w| !w.is_empty())
}

/// The group element `ρ(w)` as an honest matrix.
fn value(w: &[Gen]) -> Mat {
    let s = octagon().evaluate(w);
    s.mat.scale(s.log_scale.exp())
}

fn close_mats(a: &Mat, b: &Mat, tol: f64) -> bool {
    a.sub(b).max_abs() <= tol * a.max_abs().max(b.max_abs()).max(1.0)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_format_round_trip(w in word(20)) {
        prop_assert_eq!(parse_word(&format_word(&w)).unwrap(), w);
    }

    #[test]
    fn inverse_is_an_involution(w in word(20)) {
        prop_assert_eq!(w.inverse().inverse(), w.clone());
        prop_assert!(w.concat(&w.inverse()).freely_reduced().is_empty());
    }

    #[test]
    fn dehn_reduction_is_idempotent_and_sound(w in word(24)) {
        let d = DehnReducer::new(presentation());
        let r = d.reduce(&w);
        prop_assert!(r.len() <= w.len());
        prop_assert_eq!(d.reduce(&r), r.clone());
        prop_assert!(close_mats(&value(w.letters()), &value(r.letters()), 1e-9));
    }

    #[test]
    fn dehn_length_is_independent_of_match_order(w in word(24), picks in prop::collection::vec(0usize..16, 32)) {
        let d = DehnReducer::new(presentation());
        let mut it = picks.into_iter().cycle();
        let r = d.reduce_by(&w, |_| it.next().unwrap());
        prop_assert_eq!(r.len(), d.reduce(&w).len());
    }

    #[test]
    fn relator_conjugates_are_trivial(u in word(10)) {
        let d = DehnReducer::new(presentation());
        let r = presentation().relator().clone();
        prop_assert!(d.is_trivial(&u.concat(&r).concat(&u.inverse())));
    }

    #[test]
    fn weight_is_a_class_function(w in cyclic_word(16), k in 0usize..16) {
        let d = DehnReducer::new(presentation());
        prop_assume!(!d.reduce_cyclic(&w).is_empty());
        let rep = octagon();
        let a = weight_top(&rep.spectrum(w.letters()).unwrap()).unwrap();
        let b = weight_top(&rep.spectrum(w.rotate(k % w.len()).letters()).unwrap()).unwrap();
        prop_assert!(close(a, b, 1e-9), "{} vs {}", a, b);
        let c = weight_top(&rep.spectrum(w.inverse().letters()).unwrap()).unwrap();
        prop_assert!(close(a, c, 1e-9));
    }

    #[test]
    fn weight_of_a_power(w in cyclic_word(8), k in 2usize..5) {
        let d = DehnReducer::new(presentation());
        prop_assume!(!d.reduce_cyclic(&w).is_empty());
        let rep = octagon();
        let a = weight_top(&rep.spectrum(w.letters()).unwrap()).unwrap();
        let b = weight_top(&rep.spectrum(w.pow(k).letters()).unwrap()).unwrap();
        prop_assert!(close(k as f64 * a, b, 1e-9), "{} * {} vs {}", k, a, b);
    }

    #[test]
    fn fingerprint_invariants_are_conjugation_invariant(w in cyclic_word(12), k in 0usize..12) {
        let d = DehnReducer::new(presentation());
        prop_assume!(!d.reduce_cyclic(&w).is_empty());
        let f = Fingerprinter::new(octagon(), 0, 1e-6).unwrap();
        let a = f.invariants(w.letters()).unwrap();
        let b = f.invariants(w.rotate(k % w.len()).letters()).unwrap();
        prop_assert!(a.matches(&b), "{:?} vs {:?}", a, b);
    }

    #[test]
    fn abelian_character_is_a_homomorphism(
        theta in prop::collection::vec(-3.2f64..3.2, 4),
        u in word(12),
        v in word(12),
    ) {
        let chi = UnitaryCharacter::abelian(presentation(), theta).unwrap();
        let ab = |w: &Word| w.exponent_sums(2);
        let uv = chi.phase(&ab(&u.concat(&v))).unwrap();
        let prod = chi.phase(&ab(&u)).unwrap() * chi.phase(&ab(&v)).unwrap();
        prop_assert!((uv - prod).norm() < 1e-12);
        prop_assert!((uv.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_character_is_a_homomorphism(
        angles in prop::collection::vec(-3.2f64..3.2, 8),
        u in word(10),
        v in word(10),
    ) {
        // commuting diagonal unitaries satisfy the surface relator
        let mats = angles
            .chunks(2)
            .map(|a| {
                let z = |t: f64| Complex64::from_polar(1.0, t);
                CMat::from_row_major(2, vec![z(a[0]), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), z(a[1])]).unwrap()
            })
            .collect();
        let chi = UnitaryCharacter::explicit(presentation(), mats, 1e-9).unwrap();
        let lhs = chi.matrix(u.concat(&v).letters());
        let rhs = chi.matrix(u.letters()).mul(&chi.matrix(v.letters()));
        prop_assert!(lhs.dist(&rhs) < 1e-12);
    }

    #[test]
    fn counting_function_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let db = db6();
        let (lo, hi) = (a.min(b) * db.complete_weight(), a.max(b) * db.complete_weight());
        prop_assert!(count_pi(db, lo).unwrap() <= count_pi(db, hi).unwrap());
    }

    #[test]
    fn trace_alternating_identity(dx in 0.0f64..3.0, y in -6.0f64..6.0) {
        let t = TraceTable::compute(db6(), Complex64::new(h6() + dx, y), 6).unwrap();
        prop_assert!(t.alternating_residual() <= 1e-10, "{}", t.alternating_residual());
    }

    #[test]
    fn trivial_character_reproduces_zeta(dx in 0.5f64..3.0, y in -5.0f64..5.0) {
        let db = db6();
        let s = Complex64::new(h6() + dx, y);
        let chi = UnitaryCharacter::trivial(2);
        let a = euler_zeta(db, s, None).unwrap();
        let b = l_euler_zeta(db, &chi, s, None).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn entropy_is_covariant_under_weight_scaling(c in 0.25f64..4.0) {
        let h = h6();
        let hc = entropy(&db6().scaled(c)).unwrap().value;
        prop_assert!(close(hc * c, h, 1e-9), "{} * {} vs {}", hc, c, h);
        if c > 1.0 {
            prop_assert!(hc < h);
        }
    }
}
