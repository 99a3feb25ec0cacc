mod common;

use common::*;
use fermat_dde_core::classifier::{classify_difference, classify_general, classify_k1_symmetric};
use fermat_dde_core::{
    classify, normalize, parse_exp_poly, propose_frequencies, search, AnsatzSpec, ComplexScalar, ExpPoly,
    Poly, TheoremBranch,
};

fn eiz() -> ExpPoly {
    e(r(1.0), ComplexScalar::I)
}

#[test]
fn known_solutions_verify() {
    for eq in five_four_equations().iter().chain(&difference_equations()) {
        let cert = eq.verify(&eiz());
        assert!(cert.verified && cert.residual_max_coeff <= 1e-9, "{eq:?}");
        assert!(eq.residual(&eiz()).is_zero());
    }
    let cos2 = parse_exp_poly("exp(i*z) + exp(-i*z)").unwrap();
    assert!(quartic_delay_equation().residual(&cos2).is_zero());
    let two_term = parse_exp_poly("exp(z) + exp(-3*z)").unwrap();
    assert!(three_halves_equation().residual(&two_term).is_zero());
}

#[test]
fn verification_ignores_representation() {
    let eq = &five_four_equations()[0];
    // e^{iz} written as e^{i(z + 2π)} plus a cancelling pair
    let raw = vec![
        (Poly::one(), Poly::new(vec![ComplexScalar::I * (2.0 * std::f64::consts::PI), ComplexScalar::I])),
        (Poly::z(), Poly::new(vec![ComplexScalar::ZERO, r(3.0)])),
        (-&Poly::z(), Poly::new(vec![ComplexScalar::ZERO, r(3.0)])),
    ];
    assert!(eq.verify(&normalize(raw)).verified);
}

#[test]
fn undelayed_pure_power_form() {
    // l = 0, c = 0: f^n + a f^m
    let eq = equation((3, 2), 0, r(2.0), ComplexScalar::ZERO, (r(1.0), r(1.0)), (r(1.0), r(-1.0)));
    for f in [eiz(), parse_exp_poly("z*exp(z^2) + 3").unwrap()] {
        let expected = &(&f.pow(3) + &f.pow(2).scale(r(2.0))) - &eq.rhs();
        assert!(eq.residual(&f).equals(&expected));
    }
}

#[test]
fn classifier_solutions_are_sound() {
    let mut equations = five_four_equations();
    equations.extend(difference_equations());
    equations.extend([cos_sin_equation(), quartic_equation(), three_halves_equation()]);
    for eq in &equations {
        let report = classify(eq).unwrap();
        assert!(!report.solutions.is_empty(), "{eq:?}");
        for s in &report.solutions {
            assert!(s.verified);
            assert!(eq.residual(&s.candidate).is_zero());
        }
    }
}

#[test]
fn first_branch_enumerates_n_roots() {
    for (n, m) in [(5, 2), (5, 3), (6, 2), (7, 4), (4, 5), (4, 6)] {
        let i = ComplexScalar::I;
        // m a1 = n a2 with a1 = n i, a2 = m i
        let eq = equation((n, m), 0, r(1.0), two_pi(), (r(1.0), i * n as f64), (r(1.0), i * m as f64));
        let report = classify_difference(&eq).unwrap();
        assert_eq!(report.enumerated(), n as usize);
        assert!(report.solutions.iter().any(|s| s.candidate.equals(&eiz())));
    }
}

#[test]
fn polynomial_coefficients() {
    // f = (z + 1) e^{iz}: f^5 + (f(z + 2π))^4 = (z+1)^5 e^{5iz} + (z+1+2π)^4 e^{4iz}
    let i = ComplexScalar::I;
    let f = parse_exp_poly("(z + 1)*exp(i*z)").unwrap();
    let p1 = ExpPoly::from_poly(Poly::new(vec![r(1.0), r(1.0)]).pow(5));
    let p2 = ExpPoly::from_poly(Poly::new(vec![r(1.0 + 2.0 * std::f64::consts::PI), r(1.0)]).pow(4));
    let eq = equation((5, 4), 0, r(1.0), two_pi(), (r(1.0), i * 5.0), (r(1.0), i * 4.0)).with_coefficients(p1, p2);
    assert!(eq.verify(&f).verified);
    let report = classify_general(&eq).unwrap();
    assert_eq!(report.theorem_branch, TheoremBranch::TwoExpFirst);
    assert_eq!(report.solutions.len(), 1);
    assert!(report.solutions[0].candidate.equals(&f));

    let not_power = eq.with_coefficients(parse_exp_poly("z").unwrap(), ExpPoly::one());
    let report = classify_general(&not_power).unwrap();
    assert_eq!(report.theorem_branch, TheoremBranch::NoClassifiedSolution);
    assert!(report.notes.iter().any(|n| n.contains("not an n-th power")));
}

#[test]
fn order_hypothesis_blocks_solver_only() {
    let eq = five_four_equations()[0].with_coefficients(parse_exp_poly("exp(z)").unwrap(), ExpPoly::one());
    assert!(!eq.coefficient_order_below_k());
    assert!(classify_general(&eq).is_err());
    let _ = eq.verify(&eiz());
}

#[test]
fn scaling_by_roots_of_unity() {
    let mut equations = five_four_equations();
    equations.extend(difference_equations());
    for eq in &equations {
        let (n, m) = (eq.n(), eq.m());
        let lcm = (1..=n * m).find(|k| k % n == 0 && k % m == 0).unwrap();
        for j in 0..lcm {
            let lambda = ComplexScalar::from_polar(1.0, std::f64::consts::TAU * j as f64 / lcm as f64);
            // f^n carries p1 and the delay term carries p2 for these data
            let scaled = eq.with_coefficients(
                eq.p1().scale(lambda.powi(n as i32)),
                eq.p2().scale(lambda.powi(m as i32)),
            );
            assert!(scaled.verify(&eiz().scale(lambda)).verified, "{eq:?} λ = {lambda}");
        }
    }
}

#[test]
fn quartic_delay_search_recovers_cosine() {
    let eq = quartic_delay_equation();
    let spec = AnsatzSpec::new(vec![ComplexScalar::I, -ComplexScalar::I]);
    let result = search(&eq, &spec).unwrap();
    let target = parse_exp_poly("exp(i*z) + exp(-i*z)").unwrap();
    assert!(result.found.iter().any(|c| c.candidate.equals(&target)));
    assert!(result.found.iter().all(|c| eq.residual(&c.candidate).is_zero()));
}

#[test]
fn search_agrees_with_classifier() {
    for (eq, freqs) in [
        (cos_sin_equation(), vec![ComplexScalar::I, -ComplexScalar::I]),
        (quartic_equation(), vec![ComplexScalar::I, -ComplexScalar::I]),
        (three_halves_equation(), vec![r(1.0), r(-3.0), r(3.0), r(-1.0)]),
    ] {
        let report = classify_k1_symmetric(&eq).unwrap();
        let result = search(&eq, &AnsatzSpec::new(freqs).with_starts(128)).unwrap();
        for s in &report.solutions {
            assert!(
                result.found.iter().any(|c| c.candidate.equals(&s.candidate)),
                "{:?} missing from search",
                s.candidate
            );
        }
    }
}

#[test]
fn nonexistence_verdicts_agree_with_search() {
    let i = ComplexScalar::I;
    let equal_powers = equation((5, 5), 1, r(1.0), r(1.0), (r(1.0), i * 5.0), (r(1.0), i * 4.0));
    let cubic = symmetric(3, r(1.0), r(1.0), r(1.0), r(1.0));
    for eq in [equal_powers, cubic] {
        let report = classify(&eq).unwrap();
        assert!(report.theorem_branch.is_nonexistence());
        assert!(report.solutions.is_empty());
        let spec = AnsatzSpec::new(propose_frequencies(&eq).unwrap()).with_starts(8);
        let result = search(&eq, &spec).unwrap();
        assert!(result.found.is_empty());
        assert!(result.notes.iter().any(|n| n.contains("non-exhaustive")));
    }
}

#[test]
fn polynomial_coefficient_search() {
    // f = z e^{z}: f^2 + f'^2 = (2z^2 + 2z + 1) e^{2z} with a second forcing term set to 0 e^{-z}
    let eq = equation((2, 2), 1, r(1.0), ComplexScalar::ZERO, (r(1.0), r(2.0)), (r(1.0), r(-1.0)))
        .with_coefficients(parse_exp_poly("2*z^2 + 2*z + 1").unwrap(), ExpPoly::zero());
    let spec = AnsatzSpec::new(vec![r(1.0)]).with_max_poly_degree(1);
    let result = search(&eq, &spec).unwrap();
    let target = parse_exp_poly("z*exp(z)").unwrap();
    assert!(result.found.iter().any(|c| c.candidate.equals(&target)));
}
