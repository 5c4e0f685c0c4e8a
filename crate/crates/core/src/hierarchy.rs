//! The noncommutative KdV flows, evolutionary vector fields, the Poisson
//! bracket of local functionals and Hamiltonian-density reconstruction.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::cancel::CancelToken;
use crate::error::{Error, Result};
use crate::exactalg::{
    dx, dxy, jet_support, partial, scale_u, variational_derivative, Accumulator, Bidegree, DiffMonomial,
    DiffPoly, JetVar, TruncationContext,
};
use crate::psdo::{half_power, lax_operator};
use crate::scalar::Scalar;

/// Operator depth used by `flow_rhs`. Depth propagation makes
/// `(L^{d+1/2})_+` exact as soon as `L^{d+1/2}` is known down to order 0;
/// deeper expansions only add coefficients that the positive part discards.
pub const FLOW_DEPTH: i32 = 0;

/// `(2d+1)!! = 1·3·5···(2d+1)`.
pub fn double_factorial_odd(d: u32) -> BigInt {
    (0..=d as u64).fold(BigInt::from(1), |acc, j| acc * BigInt::from(2 * j + 1))
}

/// `∂u/∂t_d` at `FLOW_DEPTH`.
pub fn flow_rhs(d: u32, trunc: TruncationContext) -> Result<DiffPoly> {
    flow_rhs_with(d, trunc, FLOW_DEPTH, &CancelToken::new())
}

/// `∂u/∂t_d = ε^{2d}/(2d+1)!! · [(L^{d+1/2})_+, L]₀ / (2ε⁻²)`.
///
/// The commutator is an order-zero operator whose coefficient equals
/// `2ε⁻² u_t`; the division by `2ε⁻²` turns the Lax equation `L_t = [·, L]`
/// into an equation for `u`. All other orders must vanish identically and
/// the result must be homogeneous of bidegree (1, 0).
///
/// Intermediate coefficients carry negative ε powers, so the operator
/// algebra runs in a wide ε window; only the final flow is cut to `trunc`.
pub fn flow_rhs_with(d: u32, trunc: TruncationContext, depth: i32, cancel: &CancelToken) -> Result<DiffPoly> {
    let work = TruncationContext::with_mu_cap(trunc.max_mu);
    let l = lax_operator(work)?;
    let h = half_power(&l, d, depth, cancel)?;
    if h.depth().is_some_and(|dd| dd > 0) {
        return Err(Error::InsufficientDepth(format!(
            "L^({d}+1/2) known only down to order {:?}",
            h.depth()
        )));
    }
    cancel.check()?;
    let comm = h.positive_part().commutator(&l)?;
    for (e, c) in comm.coeffs() {
        if e != 0 {
            return Err(Error::Consistency(format!(
                "flow {d}: [(L^(d+1/2))_+, L] has nonzero coefficient at order {e}: {c}"
            )));
        }
    }
    let norm = BigRational::new(BigInt::from(1), double_factorial_odd(d) * BigInt::from(2));
    let flow = comm
        .coeff(0)
        .scale(&Scalar::real(norm))
        .rescale_eps(2 * d as i32 + 2)
        .with_trunc(trunc);
    match flow.bidegree() {
        Bidegree::Homogeneous(1, 0) | Bidegree::Zero => Ok(flow),
        other => Err(Error::Consistency(format!(
            "flow {d} is not homogeneous of bidegree (1,0): {other:?}"
        ))),
    }
}

/// Prolongation of `∂u/∂t = P` applied to `f`: `Σ (∂_x^{k1}∂_y^{k2}P) ∂f/∂u_{k1,k2}`.
pub fn evolutionary_derivative(p: &DiffPoly, f: &DiffPoly) -> DiffPoly {
    let trunc = p.trunc().intersect(f.trunc());
    let mut acc = Accumulator::new(trunc);
    for v in jet_support(f) {
        let dp = dxy(p, v.kx, v.ky);
        let df = partial(f, v);
        acc.add_product(&dp, &df, &Scalar::from_int(1), 0, 0);
    }
    acc.finish(p.is_clipped() || f.is_clipped())
}

/// `D_P(Q) − D_Q(P)`; vanishes iff the flows `u_t = P`, `u_s = Q` commute.
pub fn flow_commutator(p: &DiffPoly, q: &DiffPoly) -> DiffPoly {
    evolutionary_derivative(p, q).sub(&evolutionary_derivative(q, p))
}

/// A local functional `∬ density dx dy`, considered modulo total
/// derivatives and constants.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFunctional {
    pub density: DiffPoly,
}

impl LocalFunctional {
    pub fn new(density: DiffPoly) -> Self {
        LocalFunctional { density }
    }

    pub fn variational_derivative(&self) -> DiffPoly {
        variational_derivative(&self.density)
    }

    /// Zero in the quotient by `Im ∂_x ⊕ Im ∂_y ⊕ ℂ`: the variational
    /// derivative vanishes exactly.
    pub fn is_trivial(&self) -> bool {
        self.variational_derivative().is_zero()
    }
}

/// `{F, G}` with density `δF/δu · ∂_x(δG/δu)`.
pub fn poisson_bracket(f: &LocalFunctional, g: &LocalFunctional) -> LocalFunctional {
    let df = f.variational_derivative();
    let dg = g.variational_derivative();
    LocalFunctional::new(df.mul(&dx(&dg)))
}

/// `u_t = ∂_x(δG/δu)`.
pub fn hamiltonian_flow(g: &LocalFunctional) -> DiffPoly {
    dx(&g.variational_derivative())
}

/// Homotopy formula `∫₀¹ u·h(su) ds = Σ_k u·h_k/(k+1)`, checked a posteriori.
pub fn reconstruct_density(h: &DiffPoly) -> Result<LocalFunctional> {
    let trunc = *h.trunc();
    let u = DiffPoly::u(trunc);
    let mut acc = Accumulator::new(trunc);
    for (k, part) in scale_u(h).iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        let w = Scalar::frac(1, k as i64 + 1);
        acc.add_product(&u, part, &w, 0, 0);
    }
    let density = acc.finish(h.is_clipped());
    let back = variational_derivative(&density);
    if back != *h {
        return Err(Error::NotGradient(format!("δ(density) − h = {}", back.sub(h))));
    }
    Ok(LocalFunctional::new(density))
}

/// Jets ordered by `ky` first, so that `∂_x` moves a jet up within its column.
fn column_key(v: JetVar) -> (u32, u32) {
    (v.ky, v.kx)
}

fn column_top(m: &DiffMonomial) -> Option<JetVar> {
    m.jets().iter().map(|p| p.var).max_by_key(|v| column_key(*v))
}

/// The unique `P` with zero constant term and `∂_x P = f`.
///
/// Repeatedly takes the term whose top jet `u_{k+1,l}` (in the column order)
/// is largest; it must appear linearly, and
/// `c·R·u_{k,l}^p·u_{k+1,l} = ∂_x(c·R·u_{k,l}^{p+1}/(p+1)) − c·∂_x(R)·u_{k,l}^{p+1}/(p+1)`
/// leaves only strictly smaller top jets.
pub fn inverse_dx(f: &DiffPoly) -> Result<DiffPoly> {
    let trunc = *f.trunc();
    let mut rem = f.clone();
    let mut out = Accumulator::new(trunc);
    while let Some((m, c)) = rem
        .terms()
        .max_by_key(|(m, _)| column_top(m).map(column_key))
        .map(|(m, c)| (m.clone(), c.clone()))
    {
        let top = column_top(&m)
            .ok_or_else(|| Error::NotExact(format!("constant term {c}·{m} is not a total derivative")))?;
        if top.kx == 0 || m.multiplicity(top) != 1 {
            return Err(Error::NotExact(format!("term {c}·{m} cannot be integrated in x")));
        }
        let lower = JetVar::new(top.kx - 1, top.ky);
        let (without_top, _) = m.remove_one(top).expect("top jet present");
        let p = without_top.multiplicity(lower);
        let anti = without_top.insert_one(lower);
        let piece = DiffPoly::monomial(anti, &c * &Scalar::frac(1, p as i64 + 1), trunc);
        rem = rem.sub(&dx(&piece));
        out.add_poly(&piece, &Scalar::from_int(1));
    }
    Ok(out.finish(f.is_clipped()))
}

/// `P|_{ε=0}`; rejects negative ε exponents.
pub fn dispersionless_limit(p: &DiffPoly) -> Result<DiffPoly> {
    if let Some(e) = p.min_eps().filter(|e| *e < 0) {
        return Err(Error::NegativeEpsilon(format!("lowest exponent ε^{e}")));
    }
    Ok(p.eps_part(0))
}

/// `ḡ_d` reconstructed from the flow: `∂_x(δḡ_d/δu) = ∂u/∂t_d`.
pub fn hamiltonian_of_flow(flow: &DiffPoly) -> Result<LocalFunctional> {
    reconstruct_density(&inverse_dx(flow)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::star;

    fn t(mu: u32) -> TruncationContext {
        TruncationContext::new(mu, 0, Some(12)).unwrap()
    }

    fn mono(jets: &[(u32, u32)], eps: i32, mu: u32, c: Scalar, tr: TruncationContext) -> DiffPoly {
        let v: Vec<JetVar> = jets.iter().map(|&(a, b)| JetVar::new(a, b)).collect();
        DiffPoly::monomial(DiffMonomial::new(&v, eps, mu), c, tr)
    }

    fn first_flow(tr: TruncationContext) -> DiffPoly {
        let u = DiffPoly::u(tr);
        dx(&star(&u, &u))
            .scale(&Scalar::frac(1, 2))
            .add(&mono(&[(3, 0)], 2, 0, Scalar::frac(1, 12), tr))
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial_odd(0), BigInt::from(1));
        assert_eq!(double_factorial_odd(1), BigInt::from(3));
        assert_eq!(double_factorial_odd(3), BigInt::from(105));
    }

    #[test]
    fn zeroth_flow_is_translation() {
        let tr = t(2);
        let p = flow_rhs(0, tr).unwrap();
        assert_eq!(p, DiffPoly::jet(1, 0, tr));
    }

    #[test]
    fn first_flow_matches_closed_form() {
        for mu in [0, 2, 4] {
            let tr = t(mu);
            assert_eq!(flow_rhs(1, tr).unwrap(), first_flow(tr), "mu cap {mu}");
        }
    }

    #[test]
    fn deeper_expansion_changes_nothing() {
        let tr = t(2);
        let c = CancelToken::new();
        for d in 1..=2 {
            let base = flow_rhs(d, tr).unwrap();
            for depth in [-1, -3] {
                assert_eq!(
                    flow_rhs_with(d, tr, depth, &c).unwrap(),
                    base,
                    "d={d} depth={depth}"
                );
            }
        }
    }

    #[test]
    fn depth_must_reach_zero() {
        let r = flow_rhs_with(1, t(2), 1, &CancelToken::new());
        assert!(r.is_err());
    }

    #[test]
    fn evolutionary_basics() {
        let tr = t(2);
        let u = DiffPoly::u(tr);
        let ux = DiffPoly::jet(1, 0, tr);
        assert_eq!(evolutionary_derivative(&ux, &u), ux);
        let sq = u.mul(&u);
        assert_eq!(evolutionary_derivative(&ux, &sq), dx(&sq));
        assert!(evolutionary_derivative(&ux, &DiffPoly::one(tr)).is_zero());
    }

    #[test]
    fn flow_commutator_trivial() {
        let tr = t(2);
        let p = first_flow(tr);
        assert!(flow_commutator(&p, &p).is_zero());
        assert!(flow_commutator(&DiffPoly::jet(1, 0, tr), &p).is_zero());
    }

    #[test]
    fn hamiltonian_flows() {
        let tr = t(2);
        let u = DiffPoly::u(tr);
        let half_sq = LocalFunctional::new(u.mul(&u).scale(&Scalar::frac(1, 2)));
        assert_eq!(hamiltonian_flow(&half_sq), DiffPoly::jet(1, 0, tr));
        let cube = LocalFunctional::new(u.mul(&u).mul(&u).scale(&Scalar::frac(1, 6)));
        assert_eq!(hamiltonian_flow(&cube), u.mul(&DiffPoly::jet(1, 0, tr)));
    }

    #[test]
    fn first_hamiltonian_generates_first_flow() {
        let tr = t(4);
        let u = DiffPoly::u(tr);
        let density = u.mul(&star(&u, &u)).scale(&Scalar::frac(1, 6)).add(&mono(
            &[(0, 0), (2, 0)],
            2,
            0,
            Scalar::frac(1, 24),
            tr,
        ));
        assert_eq!(hamiltonian_flow(&LocalFunctional::new(density)), first_flow(tr));
    }

    #[test]
    fn bracket_of_functional_with_itself_is_trivial() {
        let tr = t(2);
        let u = DiffPoly::u(tr);
        let f = LocalFunctional::new(u.mul(&u).mul(&DiffPoly::jet(1, 1, tr)));
        assert!(poisson_bracket(&f, &f).is_trivial());
        let g = LocalFunctional::new(u.mul(&u).scale(&Scalar::frac(1, 2)));
        assert!(poisson_bracket(&g, &g).density.is_zero() || poisson_bracket(&g, &g).is_trivial());
    }

    #[test]
    fn reconstruction_examples() {
        let tr = t(2);
        let u = DiffPoly::u(tr);
        let d = reconstruct_density(&u).unwrap();
        assert_eq!(d.density, u.mul(&u).scale(&Scalar::frac(1, 2)));
        let d = reconstruct_density(&u.mul(&u).scale(&Scalar::frac(1, 2))).unwrap();
        assert_eq!(d.density, u.mul(&u).mul(&u).scale(&Scalar::frac(1, 6)));
        let h = star(&u, &u)
            .scale(&Scalar::frac(1, 2))
            .add(&mono(&[(2, 0)], 2, 0, Scalar::frac(1, 12), tr));
        let d = reconstruct_density(&h).unwrap();
        assert_eq!(variational_derivative(&d.density), h);
        assert!(matches!(
            reconstruct_density(&DiffPoly::jet(1, 0, tr).mul(&u)),
            Err(Error::NotGradient(_))
        ));
    }

    #[test]
    fn inverse_dx_examples() {
        let tr = t(2);
        let u = DiffPoly::u(tr);
        assert_eq!(inverse_dx(&DiffPoly::jet(1, 0, tr)).unwrap(), u);
        let f = u.mul(&u).mul(&DiffPoly::jet(2, 1, tr)).shift(2, 1);
        assert_eq!(inverse_dx(&dx(&f)).unwrap(), f);
        assert!(inverse_dx(&DiffPoly::one(tr)).is_err());
        assert!(inverse_dx(&DiffPoly::jet(1, 0, tr).mul(&DiffPoly::jet(0, 1, tr))).is_err());
        assert!(inverse_dx(&DiffPoly::jet(1, 0, tr).mul(&DiffPoly::jet(1, 0, tr))).is_err());
        assert!(inverse_dx(&DiffPoly::zero(tr)).unwrap().is_zero());
    }

    #[test]
    fn dispersionless_first_flow() {
        let tr = t(2);
        let p = flow_rhs(1, tr).unwrap();
        let u = DiffPoly::u(tr);
        assert_eq!(dispersionless_limit(&p).unwrap(), u.mul(&DiffPoly::jet(1, 0, tr)));
        let wide = TruncationContext::with_mu_cap(0);
        assert!(dispersionless_limit(&DiffPoly::u(wide).shift(-1, 0)).is_err());
    }
}
