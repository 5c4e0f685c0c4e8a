use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use moyallax_core::drgeom::{
    extract_intersection_numbers, functional_equal, hamiltonian_density, proof_consistency_residual,
    psi_pullback_factor, quadratic_dr_integral, step1_series, theta_normalized_recursive,
    theta_power_dr_value, ThetaValue,
};
use moyallax_core::exactalg::{dx, dy, variational_derivative};
use moyallax_core::hierarchy::{
    dispersionless_limit, flow_commutator, flow_rhs, poisson_bracket, reconstruct_density, FLOW_DEPTH,
};
use moyallax_core::moyal::star;
use moyallax_core::psdo::{half_power, lax_operator, sqrt_lax};
use moyallax_core::random::{random_exact_gradient, random_homogeneous, seeded_rng, PolyShape};
use moyallax_core::{Bidegree, CancelToken, DiffMonomial, DiffPoly, JetVar, Scalar, TruncationContext};

type Check = std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(n: u32) -> BigInt {
    (1..=n as i64).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn mono(jets: &[(u32, u32)], eps: i32, mu: u32, c: Scalar, tr: TruncationContext) -> DiffPoly {
    let jets: Vec<JetVar> = jets.iter().map(|&(a, b)| JetVar::new(a, b)).collect();
    DiffPoly::monomial(DiffMonomial::new(&jets, eps, mu), c, tr)
}

fn c1_flow_one() -> Check {
    let tr = TruncationContext::with_mu_cap(8);
    let flow = flow_rhs(1, tr).map_err(|e| e.to_string())?;
    let u = DiffPoly::u(tr);
    let expected =
        dx(&star(&u, &u))
            .scale(&Scalar::frac(1, 2))
            .add(&mono(&[(3, 0)], 2, 0, Scalar::frac(1, 12), tr));
    ensure(flow == expected, || format!("difference {}", flow.sub(&expected)))?;
    ensure(!flow.is_clipped(), || "flow was clipped".into())
}

fn c2_step1() -> Check {
    let tr = TruncationContext::with_mu_cap(8);
    let u = DiffPoly::u(tr);
    let series = step1_series(4, tr);
    let uu = star(&u, &u);
    ensure(series == uu, || format!("difference {}", series.sub(&uu)))
}

fn c3_quadratic_table() -> Check {
    for g in 0..=6u32 {
        for a1 in -4..=4i64 {
            for a2 in -4..=4i64 {
                for b1 in -4..=4i64 {
                    for b2 in -4..=4i64 {
                        let closed = quadratic_dr_integral(g, a1, a2, b1, b2);
                        let rec = theta_normalized_recursive(g, a1, a2, b1, b2);
                        let scaled = &closed * BigRational::from_integer(factorial(g));
                        ensure(scaled == rec, || {
                            format!(
                                "g={g} a=({a1},{a2}) b=({b1},{b2}): g!·closed {scaled} vs recursion {rec}"
                            )
                        })?;
                        let degenerate = a1 * b2 == a2 * b1;
                        ensure(closed.is_zero() == (degenerate && g > 0), || {
                            format!("g={g} a=({a1},{a2}) b=({b1},{b2}): vanishing mismatch, value {closed}")
                        })?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn c4_proof_consistency() -> Check {
    for g in 1..=5u32 {
        for a1 in -3..=3i64 {
            for a2 in -3..=3i64 {
                for b1 in -3..=3i64 {
                    for b2 in -3..=3i64 {
                        let (a3, b3) = (-a1 - a2, -b1 - b2);
                        if a3.abs() > 3 || b3.abs() > 3 {
                            continue;
                        }
                        let r = proof_consistency_residual(g, &[a1, a2, a3], &[b1, b2, b3])
                            .map_err(|e| e.to_string())?;
                        ensure(r.is_zero(), || {
                            format!("g={g} a=({a1},{a2},{a3}) b=({b1},{b2},{b3}): residual {r}")
                        })?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn c5_square_root() -> Check {
    let tr = TruncationContext::with_mu_cap(4);
    let cancel = CancelToken::new();
    let l = lax_operator(tr).map_err(|e| e.to_string())?;
    let r10 = sqrt_lax(&l, -10, &cancel).map_err(|e| e.to_string())?;
    let sq = r10.compose(&r10).map_err(|e| e.to_string())?;
    ensure(sq.depth().is_some_and(|d| d <= -10), || {
        format!("square known only to {:?}", sq.depth())
    })?;
    let diff = sq.sub(&l).map_err(|e| e.to_string())?;
    for (e, c) in diff.coeffs() {
        ensure(e < -10 || c.is_zero(), || format!("R∘R − L at ∂^{e}: {c}"))?;
    }
    let r11 = sqrt_lax(&l, -11, &cancel).map_err(|e| e.to_string())?;
    let cut = r10.depth().unwrap_or(-11);
    for e in cut..=1 {
        let (a, b) = (r10.coeff(e), r11.coeff(e));
        ensure(a == b, || format!("deepening changed ∂^{e}: {}", a.sub(&b)))?;
    }
    Ok(())
}

fn c6_residuals() -> Check {
    let tr = TruncationContext::with_mu_cap(4);
    let cancel = CancelToken::new();
    let l = lax_operator(tr).map_err(|e| e.to_string())?;
    for d in 1..=3u32 {
        let h = half_power(&l, d, FLOW_DEPTH, &cancel).map_err(|e| e.to_string())?;
        let comm = h.positive_part().commutator(&l).map_err(|e| e.to_string())?;
        for (e, c) in comm.coeffs() {
            ensure(e == 0 || c.is_zero(), || {
                format!("d={d}: order {e} coefficient {c}")
            })?;
        }
        ensure(!comm.coeff(0).is_zero(), || {
            format!("d={d}: order 0 coefficient vanishes")
        })?;
    }
    Ok(())
}

fn c7_dispersionless() -> Check {
    let tr = TruncationContext::with_mu_cap(4);
    for d in 1..=3u32 {
        let flow = flow_rhs(d, tr).map_err(|e| e.to_string())?;
        let limit = dispersionless_limit(&flow).map_err(|e| e.to_string())?;
        let power = mono(
            &vec![(0, 0); d as usize + 1],
            0,
            0,
            Scalar::real(BigRational::new(BigInt::one(), factorial(d + 1))),
            tr,
        );
        let expected = dx(&power);
        ensure(limit == expected, || {
            format!("d={d}: difference {}", limit.sub(&expected))
        })?;
    }
    Ok(())
}

fn c8_degrees() -> Check {
    let tr = TruncationContext::with_mu_cap(4);
    for d in 1..=3u32 {
        let flow = flow_rhs(d, tr).map_err(|e| e.to_string())?;
        for (m, c) in flow.terms() {
            let (kx, ky) = (m.kx_total(), m.ky_total());
            ensure(kx == m.eps as i64 + 1, || {
                format!("d={d}: {m} has deg_x {kx} at ε^{}", m.eps)
            })?;
            ensure(ky == m.mu as i64, || {
                format!("d={d}: {m} has deg_y {}", ky - m.mu as i64)
            })?;
            ensure(c.im().is_zero(), || format!("d={d}: {m} has coefficient {c}"))?;
        }
    }
    Ok(())
}

fn c9_commutation() -> Check {
    let tr = TruncationContext::with_mu_cap(4);
    let p1 = flow_rhs(1, tr).map_err(|e| e.to_string())?;
    for d in 2..=3u32 {
        let pd = flow_rhs(d, tr).map_err(|e| e.to_string())?;
        let c = flow_commutator(&p1, &pd);
        ensure(c.is_zero(), || format!("[P1, P{d}] = {c}"))?;
    }
    Ok(())
}

fn c10_moyal() -> Check {
    let tr = TruncationContext::with_mu_cap(6);
    let shape = PolyShape {
        max_jet_order: 3,
        min_u_degree: 1,
        max_u_degree: 2,
        max_terms: 3,
        coeff_bound: 4,
        complex: true,
    };
    let mut rng = seeded_rng(20_240_601);
    let one = DiffPoly::one(tr);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let bideg = (rng.gen_range(-1..=3), rng.gen_range(-2..=2));
        let f = random_homogeneous(rng, &shape, bideg, tr);
        if !f.is_zero() {
            return (f, bideg);
        }
    };
    for trial in 0..100 {
        let (f, df) = draw(&mut rng);
        let (g, dg) = draw(&mut rng);
        let (h, _) = draw(&mut rng);
        let fg = star(&f, &g);
        let lhs = star(&fg, &h);
        let rhs = star(&f, &star(&g, &h));
        ensure(lhs == rhs, || {
            format!("trial {trial}: associativity defect {}", lhs.sub(&rhs))
        })?;
        ensure(star(&one, &f) == f && star(&f, &one) == f, || {
            format!("trial {trial}: unit law")
        })?;
        for (name, d) in [("∂x", dx as fn(&DiffPoly) -> DiffPoly), ("∂y", dy)] {
            let l = d(&fg);
            let r = star(&d(&f), &g).add(&star(&f, &d(&g)));
            ensure(l == r, || {
                format!("trial {trial}: {name} derivation defect {}", l.sub(&r))
            })?;
        }
        let want = Bidegree::Homogeneous(df.0 + dg.0, df.1 + dg.1);
        let got = fg.bidegree();
        ensure(got == want || got == Bidegree::Zero, || {
            format!("trial {trial}: bidegree {got:?}, expected {want:?}")
        })?;
    }
    Ok(())
}

fn c11_extraction() -> Check {
    let cancel = CancelToken::new();
    let dens0 =
        hamiltonian_density(1, TruncationContext::with_mu_cap(0), &cancel).map_err(|e| e.to_string())?;
    for b in 1..=5i64 {
        let (v, _) =
            extract_intersection_numbers(&dens0, 1, 1, 0, &[0, 0], &[b, -b]).map_err(|e| e.to_string())?;
        ensure(v == rat(b * b, 12), || {
            format!("b={b}: got {v}, want {}", rat(b * b, 12))
        })?;
    }
    let dens =
        hamiltonian_density(1, TruncationContext::with_mu_cap(6), &cancel).map_err(|e| e.to_string())?;
    let triples: [([i64; 3], [i64; 3]); 3] = [
        ([1, 0, -1], [0, 1, -1]),
        ([2, -1, -1], [1, 1, -2]),
        ([1, 2, -3], [-1, 1, 0]),
    ];
    for g in 0..=3u32 {
        for (a, b) in &triples {
            let (v, _) = extract_intersection_numbers(&dens, 1, g, g, a, b).map_err(|e| e.to_string())?;
            let closed = quadratic_dr_integral(g, a[0], a[1], b[0], b[1]);
            let want = closed * BigRational::from_integer(factorial(g) * BigInt::from(2 * g as i64 + 1));
            ensure(v == want, || {
                format!("g={g} a={a:?} b={b:?}: got {v}, want (2g+1)·g!·f_g = {want}")
            })?;
            let theta = theta_power_dr_value(g, 3, g, Some(a), b).map_err(|e| e.to_string())?;
            let psi = psi_pullback_factor(g, 3).map_err(|e| e.to_string())?;
            let cross = match theta {
                ThetaValue::Value(t) => t * BigRational::from_integer(BigInt::from(psi)),
                other => return Err(format!("g={g}: theta power gave {other:?}")),
            };
            ensure(v == cross, || {
                format!("g={g} a={a:?} b={b:?}: got {v}, ψ·Θ^g gives {cross}")
            })?;
        }
    }
    Ok(())
}

fn c12_functionals() -> Check {
    let tr = TruncationContext::with_mu_cap(4);
    let shape = PolyShape::default();
    let mut rng = seeded_rng(5_000_050);
    for trial in 0..50 {
        let (_, grad) = random_exact_gradient(&mut rng, &shape, tr);
        let dens = reconstruct_density(&grad).map_err(|e| format!("trial {trial}: {e}"))?;
        let back = variational_derivative(&dens.density);
        ensure(back == grad, || {
            format!("trial {trial}: δ∘reconstruct defect {}", back.sub(&grad))
        })?;
    }
    let cancel = CancelToken::new();
    let g1 = hamiltonian_density(1, tr, &cancel).map_err(|e| e.to_string())?;
    let g2 = hamiltonian_density(2, tr, &cancel).map_err(|e| e.to_string())?;
    let bracket = poisson_bracket(&g1, &g2);
    let zero = moyallax_core::hierarchy::LocalFunctional::new(DiffPoly::zero(tr));
    ensure(functional_equal(&bracket, &zero, 4), || {
        format!("{{ḡ1, ḡ2}} nonzero; density {}", bracket.density)
    })
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("flow-1 identity at μ-cap 8", c1_flow_one),
        ("step-1 generating identity", c2_step1),
        ("quadratic DR table", c3_quadratic_table),
        ("proof consistency identity", c4_proof_consistency),
        ("square-root oracle", c5_square_root),
        ("order-0 residual d=1,2,3", c6_residuals),
        ("dispersionless limits", c7_dispersionless),
        ("degree properties", c8_degrees),
        ("commutation of flows", c9_commutation),
        ("Moyal algebra properties", c10_moyal),
        ("extraction ground truth", c11_extraction),
        ("functional calculus", c12_functionals),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &n.to_string()) {
            continue;
        }
        let t = Instant::now();
        let res = run();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(()) => println!("PASS criterion {n:>2}: {name} ({secs:.2} s)"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {n:>2}: {name} ({secs:.2} s): {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
