use chemotaxis::analysis::{
    admissible_pair, bootstrap_sequence, is_admissible, p_interval, r_bounds, theorem_gate, BootstrapRule, Exponent,
    ExponentWindow,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// Exact sign of `r² − (p−1) r + p(p−1)²χ²/4`.
fn quadratic_negative(p: f64, r: f64, chi: f64) -> bool {
    let (p, r, c) = (rat(p), rat(r), rat(chi));
    let one = BigRational::from_integer(BigInt::from(1));
    let four = BigRational::from_integer(BigInt::from(4));
    let pm1 = &p - &one;
    (&r * &r - &pm1 * &r + &p * &pm1 * &pm1 * &c * &c / four).is_negative()
}

/// Keeps `r` away from the roots so that floating rounding cannot flip the sign.
fn clear_of_roots(p: f64, r: f64, chi: f64) -> bool {
    match r_bounds(p, chi) {
        Ok((lo, hi)) => (r - lo).abs() > 1e-9 * hi && (r - hi).abs() > 1e-9 * hi,
        Err(_) => true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn root_window_matches_quadratic(chi in 0.05f64..1.0, pf in 0.0f64..1.0, r in 0.0f64..10.0) {
        let p = 1.0 + 1e-6 + pf * (1.0 / (chi * chi) - 1.0 - 2e-6);
        prop_assume!(p > 1.0 && p * chi * chi < 1.0);
        prop_assume!(clear_of_roots(p, r, chi));
        // a huge μ removes the cap μp, leaving only the root condition
        prop_assert_eq!(is_admissible(p, r, chi, 1e9), quadratic_negative(p, r, chi));
    }

    #[test]
    fn cap_is_respected(chi in 0.05f64..1.0, mu in 0.01f64..2.0, pf in 0.0f64..1.0, rf in 0.0f64..1.0) {
        let p = 1.0 + 1e-6 + pf * (1.0 / (chi * chi) - 1.0 - 2e-6);
        prop_assume!(p * chi * chi < 1.0);
        let w = ExponentWindow::new(p, chi, mu).unwrap();
        let r = rf * 2.0 * w.r_plus;
        prop_assume!(clear_of_roots(p, r, chi) && (r - mu * p).abs() > 1e-9 * p);
        prop_assert_eq!(is_admissible(p, r, chi, mu), quadratic_negative(p, r, chi) && r < mu * p);
    }

    #[test]
    fn admissible_pair_is_admissible(chi in 0.05f64..1.5, mu in 0.01f64..2.0, n in 1usize..6) {
        if let Some((p, r)) = admissible_pair(chi, mu, n) {
            let (lo, hi) = p_interval(chi, mu, n);
            prop_assert!(lo < p && p < hi);
            prop_assert!(is_admissible(p, r, chi, mu));
            prop_assert!(quadratic_negative(p, r, chi));
            prop_assert!(r < mu * p);
            let g = theorem_gate(chi, mu, n);
            prop_assert!(g.chi_ok && g.lemma58);
        }
    }

    #[test]
    fn gates_are_monotone(chi in 0.05f64..1.5, mu in 0.01f64..2.0, n in 1usize..6) {
        let g = theorem_gate(chi, mu, n);
        // the strict threshold implies the weaker one
        prop_assert!(!g.thm1_strict || g.lemma58);
        let bigger_mu = theorem_gate(chi, mu * 1.5, n);
        prop_assert!(!g.lemma58 || bigger_mu.lemma58);
        let smaller_chi = theorem_gate(chi * 0.5, mu, n);
        prop_assert!(!g.chi_ok || smaller_chi.chi_ok);
    }

    #[test]
    fn bootstrap_is_increasing_and_terminates(n in 2usize..6, f in 0.0f64..1.0) {
        let nf = n as f64;
        let p0 = nf / 2.0 + 1e-6 + f * nf;
        let t = bootstrap_sequence(p0, n).unwrap();
        prop_assert!(t.len() <= 50);
        prop_assert_eq!(*t.sequence.last().unwrap(), Exponent::Infinite);
        prop_assert_eq!(*t.rules.last().unwrap(), BootstrapRule::Terminal);
        let finite: Vec<f64> = t.sequence.iter().filter_map(|e| e.finite()).collect();
        for w in finite.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
    }
}

#[test]
fn exceptional_rule_applies_at_the_dimension() {
    let t = bootstrap_sequence(3.0, 3).unwrap();
    assert_eq!(t.rules[0], BootstrapRule::Exceptional);
    assert_eq!(t.sequence[1], Exponent::Finite(2.25));
}

#[test]
fn out_of_domain_inputs_are_rejected() {
    assert!(r_bounds(1.0, 0.5).is_err());
    assert!(r_bounds(2.0, 0.0).is_err());
    assert!(r_bounds(2.0, 1.0).is_err());
    assert!(bootstrap_sequence(1.0, 3).is_err());
    assert_eq!(admissible_pair(2.0, 0.5, 2), None);
    assert_eq!(admissible_pair(0.8, 0.1, 4), None);
}
