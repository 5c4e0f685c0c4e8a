//! Total derivatives, partial derivatives in the jets and the Euler operator.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::monomial::JetVar;
use super::poly::{Accumulator, DiffPoly};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    fn shift(self, v: JetVar) -> JetVar {
        match self {
            Direction::X => v.dx(),
            Direction::Y => v.dy(),
        }
    }
}

/// Leibniz derivation with `u_{a,b} ↦ u_{a+1,b}` (x) or `u_{a,b+1}` (y).
pub fn total_derivative(f: &DiffPoly, dir: Direction) -> DiffPoly {
    let mut acc = Accumulator::new(*f.trunc());
    for (m, c) in f.terms() {
        for p in m.jets() {
            let (rest, mult) = m.remove_one(p.var).expect("jet present");
            acc.add(rest.insert_one(dir.shift(p.var)), c.scale_int(mult as i64));
        }
    }
    acc.finish(f.is_clipped())
}

pub fn dx(f: &DiffPoly) -> DiffPoly {
    total_derivative(f, Direction::X)
}

pub fn dy(f: &DiffPoly) -> DiffPoly {
    total_derivative(f, Direction::Y)
}

/// `∂_x^a ∂_y^b f`.
pub fn dxy(f: &DiffPoly, a: u32, b: u32) -> DiffPoly {
    let mut g = f.clone();
    for _ in 0..a {
        g = dx(&g);
    }
    for _ in 0..b {
        g = dy(&g);
    }
    g
}

/// `∂f/∂u_{kx,ky}`, treating jets as independent variables.
pub fn partial(f: &DiffPoly, v: JetVar) -> DiffPoly {
    let mut acc = Accumulator::new(*f.trunc());
    for (m, c) in f.terms() {
        if let Some((rest, mult)) = m.remove_one(v) {
            acc.add(rest, c.scale_int(mult as i64));
        }
    }
    acc.finish(f.is_clipped())
}

/// Distinct jet variables occurring in `f`.
pub fn jet_support(f: &DiffPoly) -> BTreeSet<JetVar> {
    f.terms()
        .flat_map(|(m, _)| m.jets().iter().map(|p| p.var))
        .collect()
}

/// `δf/δu = Σ (−∂_x)^{k1} (−∂_y)^{k2} ∂f/∂u_{k1,k2}`.
pub fn variational_derivative(f: &DiffPoly) -> DiffPoly {
    let mut acc = Accumulator::new(*f.trunc());
    for v in jet_support(f) {
        let p = partial(f, v);
        let d = dxy(&p, v.kx, v.ky);
        let sign = if (v.kx + v.ky) % 2 == 0 {
            Scalar::from_int(1)
        } else {
            Scalar::from_int(-1)
        };
        acc.add_poly(&d, &sign);
    }
    acc.finish(f.is_clipped())
}

/// Substitutes `u_{k1,k2} ↦ s·u_{k1,k2}`; entry `j` of the result is the
/// coefficient of `s^j`.
pub fn scale_u(f: &DiffPoly) -> Vec<DiffPoly> {
    let top = f.u_degree() as usize;
    let mut out = vec![DiffPoly::zero(*f.trunc()); top + 1];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = f.filter(|m| m.u_degree() as usize == j);
    }
    if f.is_zero() {
        out.truncate(1);
    }
    out
}

/// `Σ_j s^j f_j` evaluated at a rational/complex `s`.
pub fn eval_s_poly(parts: &[DiffPoly], s: &Scalar) -> Option<DiffPoly> {
    let first = parts.first()?;
    let mut acc = Accumulator::new(*first.trunc());
    let mut pow = Scalar::from_int(1);
    for p in parts {
        if !pow.is_zero() {
            acc.add_poly(p, &pow);
        }
        pow = &pow * s;
    }
    Some(acc.finish(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{DiffMonomial, TruncationContext};

    fn t() -> TruncationContext {
        TruncationContext::with_mu_cap(4)
    }

    fn mono(jets: &[(u32, u32)], eps: i32, c: Scalar) -> DiffPoly {
        let v: Vec<JetVar> = jets.iter().map(|&(a, b)| JetVar::new(a, b)).collect();
        DiffPoly::monomial(DiffMonomial::new(&v, eps, 0), c, t())
    }

    #[test]
    fn dx_of_u_is_ux() {
        assert_eq!(dx(&DiffPoly::u(t())), DiffPoly::jet(1, 0, t()));
    }

    #[test]
    fn dy_shifts_second_index() {
        assert_eq!(dy(&DiffPoly::jet(2, 0, t())), DiffPoly::jet(2, 1, t()));
    }

    #[test]
    fn leibniz_on_square() {
        let u = DiffPoly::u(t());
        let expect = mono(&[(0, 0), (1, 0)], 0, Scalar::from_int(2));
        assert_eq!(dx(&u.mul(&u)), expect);
    }

    #[test]
    fn derivations_kill_constants() {
        let c = DiffPoly::constant(Scalar::frac(3, 7), t()).shift(2, 1);
        assert!(dx(&c).is_zero() && dy(&c).is_zero());
    }

    #[test]
    fn euler_operator_on_cube() {
        let f = mono(&[(0, 0), (0, 0), (0, 0)], 0, Scalar::frac(1, 6));
        let expect = mono(&[(0, 0), (0, 0)], 0, Scalar::frac(1, 2));
        assert_eq!(variational_derivative(&f), expect);
    }

    #[test]
    fn euler_operator_integrates_by_parts() {
        let f = mono(&[(1, 0), (1, 0)], 0, Scalar::frac(1, 2));
        assert_eq!(
            variational_derivative(&f),
            mono(&[(2, 0)], 0, Scalar::from_int(-1))
        );
    }

    #[test]
    fn euler_operator_kills_total_derivatives() {
        let h = mono(&[(0, 0), (2, 1), (0, 3)], -1, Scalar::frac(5, 3)).add(&mono(
            &[(1, 0), (1, 0)],
            2,
            Scalar::i(),
        ));
        assert!(variational_derivative(&dx(&h)).is_zero());
        assert!(variational_derivative(&dy(&h)).is_zero());
    }

    #[test]
    fn scale_u_collects_powers() {
        let u = DiffPoly::u(t());
        let parts = scale_u(&u.mul(&u));
        assert_eq!(parts.len(), 3);
        assert!(parts[0].is_zero() && parts[1].is_zero());
        assert_eq!(parts[2], u.mul(&u));

        let e_ux = DiffPoly::jet(1, 0, t()).shift(1, 0);
        let parts = scale_u(&e_ux);
        assert_eq!(parts[1], e_ux);

        let c = DiffPoly::constant(Scalar::from_int(7), t());
        let parts = scale_u(&c);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0], c);
    }

    #[test]
    fn s_poly_evaluates_back() {
        let u = DiffPoly::u(t());
        let f = u.mul(&u).add(&DiffPoly::jet(1, 0, t())).add(&DiffPoly::one(t()));
        assert_eq!(eval_s_poly(&scale_u(&f), &Scalar::from_int(1)).unwrap(), f);
    }
}
