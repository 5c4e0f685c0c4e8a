use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use moyallax_core::drgeom::{
    constant_coefficient, extract_intersection_numbers, functional_equal, hamiltonian_density,
    proof_consistency_residual, psi_pullback_factor, quadratic_dr_integral, quadratic_table, step1_series,
    theta_dr_boundary_term, theta_dr_psi_integral, theta_normalized_recursive, theta_power_dr_value,
    zero_sum_multisets, ExtractionSource, Mode, RamificationData, ThetaValue,
};
use moyallax_core::exactalg::{dx, dy};
use moyallax_core::hierarchy::LocalFunctional;
use moyallax_core::moyal::star;
use moyallax_core::{CancelToken, DiffPoly, Error, TruncationContext};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn tr(mu: u32) -> TruncationContext {
    TruncationContext::with_mu_cap(mu)
}

#[test]
fn quadratic_examples() {
    assert_eq!(quadratic_dr_integral(1, 1, 0, 0, 1), rat(1, 24));
    assert_eq!(quadratic_dr_integral(0, 7, -3, 2, 2), BigRational::one());
    // recursion from f₀ = 1 with one step: det²/(8·3)
    assert_eq!(theta_normalized_recursive(1, 1, 0, 0, 1), rat(1, 24));
}

#[test]
fn table_enumerates_every_row() {
    let rows = quadratic_table(3, 2, 2);
    assert_eq!(rows.len(), 4 * 5usize.pow(4));
    assert!(rows
        .iter()
        .all(|r| r.a1.abs() <= 2 && r.b2.abs() <= 2 && r.g <= 3));
    let row = rows
        .iter()
        .find(|r| (r.g, r.a1, r.a2, r.b1, r.b2) == (1, 1, 0, 0, 1))
        .unwrap();
    assert_eq!(row.value, "1/24");
}

#[test]
fn psi_and_boundary_examples() {
    let a = [1, 0, -1];
    let b = [1, 1, -2];
    assert_eq!(theta_dr_psi_integral(1, 1, &a, &b).unwrap(), rat(5, 24));
    assert_eq!(theta_dr_psi_integral(1, 3, &a, &b).unwrap(), rat(1, 12));
    assert_eq!(
        theta_dr_boundary_term(1, &[1, 0, -1], &[0, 1, -1]).unwrap(),
        rat(1, 24)
    );
    assert!(proof_consistency_residual(2, &[2, -1, -1], &[0, 3, -3])
        .unwrap()
        .is_zero());
    assert!(matches!(
        theta_dr_psi_integral(1, 1, &[1, 1, 1], &b),
        Err(Error::Ramification(_))
    ));
}

#[test]
fn theta_power_vanishing_rules() {
    let v = theta_power_dr_value(1, 2, 0, None, &[3, -3]).unwrap();
    assert_eq!(v, ThetaValue::Value(rat(9, 24)));
    assert_eq!(
        theta_power_dr_value(2, 2, 1, None, &[1, -1]).unwrap(),
        ThetaValue::Vanishes
    );
    assert_eq!(
        theta_power_dr_value(1, 3, 0, None, &[1, 0, -1]).unwrap(),
        ThetaValue::Vanishes
    );
    assert!(matches!(
        theta_power_dr_value(2, 3, 2, None, &[1, 0, -1]).unwrap(),
        ThetaValue::NotDetermined(_)
    ));
    let f2 = theta_power_dr_value(2, 3, 2, Some(&[1, 0, -1]), &[0, 1, -1]).unwrap();
    assert_eq!(f2.number(), Some(theta_normalized_recursive(2, 1, 0, 0, 1)));
    assert!(theta_power_dr_value(0, 2, 0, None, &[1, -1]).is_err());
    assert!(theta_power_dr_value(1, 2, 0, None, &[1, 1]).is_err());
    assert_eq!(psi_pullback_factor(2, 3).unwrap(), 5);
}

#[test]
fn ramification_data_checks_balance() {
    assert!(RamificationData::new(1, vec![1, -1], vec![2, -2]).is_ok());
    assert!(RamificationData::new(1, vec![1, -1], vec![2]).is_err());
    let r = RamificationData::new(2, vec![1, 0, -1], vec![0, 1, -1]).unwrap();
    assert_eq!(r.n(), 3);
    assert!(r.check_balanced().is_ok());
}

#[test]
fn step_one_series_is_u_star_u() {
    for mu in [0, 2, 4, 6] {
        let t = tr(mu);
        let u = DiffPoly::u(t);
        assert_eq!(step1_series(mu / 2, t), star(&u, &u), "μ-cap {mu}");
    }
}

#[test]
fn functional_equality_up_to_total_derivatives() {
    let t = tr(2);
    let f = LocalFunctional::new(DiffPoly::jet(1, 0, t).mul(&DiffPoly::jet(0, 1, t)));
    let g = LocalFunctional::new(
        DiffPoly::u(t)
            .mul(&DiffPoly::jet(1, 1, t))
            .scale(&moyallax_core::Scalar::from_int(-1)),
    );
    assert!(functional_equal(&f, &g, 3));
    let h = LocalFunctional::new(DiffPoly::u(t).mul(&DiffPoly::u(t)));
    assert!(!functional_equal(&f, &h, 2));
    let p = DiffPoly::u(t).mul(&DiffPoly::jet(2, 1, t)).mul(&DiffPoly::u(t));
    let exact = LocalFunctional::new(dx(&p).add(&dy(&p)));
    assert!(functional_equal(
        &exact,
        &LocalFunctional::new(DiffPoly::zero(t)),
        2
    ));
}

#[test]
fn zero_sum_multisets_are_sorted_and_balanced() {
    let all = zero_sum_multisets(2, 1);
    // {m, −m} for the 4 nonzero modes up to sign, plus {0, 0}
    assert_eq!(all.len(), 5);
    for ms in &all {
        assert_eq!(
            ms.iter()
                .map(|m| (m.a, m.b))
                .fold((0, 0), |s, x| (s.0 + x.0, s.1 + x.1)),
            (0, 0)
        );
    }
}

#[test]
fn constant_coefficient_of_u_squared() {
    let t = tr(0);
    let uu = DiffPoly::u(t).mul(&DiffPoly::u(t));
    let c = constant_coefficient(&uu, &[Mode::new(1, 2), Mode::new(-1, -2)]);
    assert_eq!(c.get(&(0, 0)).map(|s| s.re().clone()), Some(rat(2, 1)));
}

#[test]
fn extraction_matches_theta_powers_including_edge_cases() {
    let cancel = CancelToken::new();
    let dens = hamiltonian_density(1, tr(4), &cancel).unwrap();
    // n = 2, g = 1: ψ pull-back factor 2 times b₁²/24, independent of a
    for (a, b) in [([0, 0], [3, -3]), ([1, -1], [3, -3]), ([2, -2], [1, -1])] {
        let (v, src) = extract_intersection_numbers(&dens, 1, 1, 0, &a, &b).unwrap();
        assert_eq!(src, ExtractionSource::Determined);
        let theta = theta_power_dr_value(1, 2, 0, Some(&a), &b)
            .unwrap()
            .number()
            .unwrap();
        assert_eq!(
            v,
            theta * BigRational::from_integer(BigInt::from(psi_pullback_factor(1, 2).unwrap()))
        );
    }
    // b = 0 for every point, and a repeated (a, b) pair
    let (v, _) = extract_intersection_numbers(&dens, 1, 1, 0, &[1, -1], &[0, 0]).unwrap();
    assert!(v.is_zero());
    let (v, _) = extract_intersection_numbers(&dens, 1, 2, 2, &[1, 1, -2], &[1, 1, -2]).unwrap();
    assert!(v.is_zero());
    // a b = 0 entry inside a nondegenerate triple
    let (v, _) = extract_intersection_numbers(&dens, 1, 2, 2, &[2, -1, -1], &[0, 1, -1]).unwrap();
    let f2 = theta_normalized_recursive(2, 2, -1, 0, 1);
    assert_eq!(v, f2 * rat(5, 1));
    // genus 0: a single point with three modes integrates to one
    let (v, _) = extract_intersection_numbers(&dens, 1, 0, 0, &[1, 0, -1], &[0, 1, -1]).unwrap();
    assert_eq!(v, BigRational::one());
}

#[test]
fn extraction_flags_predictions_and_rejects_bad_input() {
    let cancel = CancelToken::new();
    let dens = hamiltonian_density(2, tr(2), &cancel).unwrap();
    let (_, src) = extract_intersection_numbers(&dens, 2, 1, 0, &[0, 0], &[1, -1]).unwrap();
    assert_eq!(src, ExtractionSource::Prediction);
    assert_eq!(src.label(), "prediction");
    assert!(extract_intersection_numbers(&dens, 2, 1, 0, &[0, 0], &[1, 1]).is_err());
    assert!(extract_intersection_numbers(&dens, 2, 1, 0, &[0], &[1, -1]).is_err());
    assert!(matches!(
        extract_intersection_numbers(&dens, 2, 2, 2, &[1, 0, -1], &[0, 1, -1]),
        Err(Error::InvalidWindow(_))
    ));
}
