use clap::{Args, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde_json::json;

use moyallax_core::drgeom::{
    extract_intersection_numbers, hamiltonian_density, psi_pullback_factor, quadratic_dr_integral,
    step1_series, theta_power_dr_value,
};
use moyallax_core::exactalg::{dx, dy};
use moyallax_core::hierarchy::{dispersionless_limit, flow_commutator, flow_rhs_with};
use moyallax_core::moyal::star;
use moyallax_core::psdo::{lax_operator, sqrt_lax};
use moyallax_core::random::{random_homogeneous, seeded_rng, PolyShape};
use moyallax_core::{Bidegree, CancelToken, DiffMonomial, DiffPoly, JetVar, Scalar, TruncationContext};

use crate::config::{GlobalOpts, RunConfig, DEFAULT_MU_CAP};
use crate::exit::{Failure, VERIFY};
use crate::render::{Output, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// R∘R = L for the square root of the Lax operator.
    Sqrt,
    /// Star product: associativity, unit, derivations, grading.
    Assoc,
    /// Lax flow 1 against ½∂_x(u*u) + ε²/12 u_xxx.
    Flow1,
    /// Flow 1 commutes with flow d.
    Commute,
    /// ε → 0 limits of flows 1..=d.
    Dispersionless,
    /// Closed series against u*u.
    Step1,
    /// Extracted d = 1 integrals against the closed formulas.
    ExtractD1,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,

    /// Flow index for `commute` (default 2) and `dispersionless` (default 3).
    #[arg(long)]
    pub d: Option<u32>,

    /// Random triples for `assoc`.
    #[arg(long, default_value_t = 100)]
    pub count: u32,
}

/// Outcome of one check; `discrepancy` is `None` on success.
struct Check {
    name: String,
    discrepancy: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, discrepancy: Option<String>) -> Self {
        Check {
            name: name.into(),
            discrepancy,
        }
    }

    fn poly(name: impl Into<String>, diff: &DiffPoly) -> Self {
        let d = (!diff.is_zero()).then(|| diff.to_string());
        Check::new(name, d)
    }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Sqrt => "sqrt",
        Suite::Assoc => "assoc",
        Suite::Flow1 => "flow1",
        Suite::Commute => "commute",
        Suite::Dispersionless => "dispersionless",
        Suite::Step1 => "step1",
        Suite::ExtractD1 => "extract-d1",
    }
}

pub fn run(args: &VerifyArgs, opts: &GlobalOpts, cancel: &CancelToken) -> Result<Output, Failure> {
    let checks = match args.suite {
        Suite::Sqrt => sqrt_suite(opts, cancel)?,
        Suite::Assoc => assoc_suite(opts, args.count),
        Suite::Flow1 => flow1_suite(opts, cancel)?,
        Suite::Commute => commute_suite(opts, args.d.unwrap_or(2), cancel)?,
        Suite::Dispersionless => dispersionless_suite(opts, args.d.unwrap_or(3), cancel)?,
        Suite::Step1 => step1_suite(opts),
        Suite::ExtractD1 => extract_suite(opts, cancel)?,
    };
    let name = suite_name(args.suite);
    let passed = checks.iter().filter(|c| c.discrepancy.is_none()).count();
    let ok = passed == checks.len();
    let verdict = if ok { "PASS" } else { "FAIL" };
    let mut table = Table::new(&["check", "result", "discrepancy"]);
    let mut text = String::new();
    for c in &checks {
        let result = if c.discrepancy.is_none() { "PASS" } else { "FAIL" };
        table.push(vec![
            c.name.clone(),
            result.into(),
            c.discrepancy.clone().unwrap_or_default(),
        ]);
        match &c.discrepancy {
            None => text.push_str(&format!("PASS {}\n", c.name)),
            Some(d) => text.push_str(&format!("FAIL {}: {d}\n", c.name)),
        }
    }
    text.push_str(&format!(
        "verify {name}: {verdict} ({passed}/{} checks)",
        checks.len()
    ));
    let json = json!({
        "suite": name,
        "passed": ok,
        "checks": checks.iter().map(|c| json!({"name": c.name, "passed": c.discrepancy.is_none(), "discrepancy": c.discrepancy})).collect::<Vec<_>>(),
    });
    let out = Output::new(json, table, text);
    Ok(if ok { out } else { out.with_code(VERIFY) })
}

fn mu_cap(opts: &GlobalOpts) -> u32 {
    opts.mu_cap.unwrap_or(DEFAULT_MU_CAP)
}

fn sqrt_suite(opts: &GlobalOpts, cancel: &CancelToken) -> Result<Vec<Check>, Failure> {
    let depth = opts.depth.unwrap_or(-10);
    if depth > 1 {
        return Err(Failure::usage(format!(
            "--depth must be <= 1 for sqrt, got {depth}"
        )));
    }
    let t = TruncationContext::with_mu_cap(mu_cap(opts));
    let l = lax_operator(t)?;
    let r = sqrt_lax(&l, depth, cancel)?;
    let sq = r.compose(&r)?.sub(&l)?;
    let residual = sq
        .coeffs()
        .find(|(e, c)| *e >= depth && !c.is_zero())
        .map(|(e, c)| format!("∂^{e}: {c}"));
    let mut checks = vec![Check::new(format!("R∘R − L = 0 at orders >= {depth}"), residual)];
    let deeper = sqrt_lax(&l, depth - 1, cancel)?;
    let lowest = r.depth().unwrap_or(depth - 1);
    let changed = (lowest..=1)
        .find(|e| r.coeff(*e) != deeper.coeff(*e))
        .map(|e| format!("∂^{e}: {}", deeper.coeff(e).sub(&r.coeff(e))));
    checks.push(Check::new(
        format!("deepening to {} keeps retained coefficients", depth - 1),
        changed,
    ));
    Ok(checks)
}

fn assoc_suite(opts: &GlobalOpts, count: u32) -> Vec<Check> {
    let t = TruncationContext::with_mu_cap(mu_cap(opts));
    let shape = PolyShape {
        max_jet_order: 3,
        min_u_degree: 1,
        max_u_degree: 2,
        max_terms: 3,
        coeff_bound: 4,
        complex: true,
    };
    let mut rng = seeded_rng(opts.seed);
    let mut draw = || loop {
        let bideg = (rng.gen_range(-1..=3), rng.gen_range(-2..=2));
        let f = random_homogeneous(&mut rng, &shape, bideg, t);
        if !f.is_zero() {
            return (f, bideg);
        }
    };
    let one = DiffPoly::one(t);
    let mut fails: [Option<String>; 4] = Default::default();
    for trial in 0..count {
        let (f, df) = draw();
        let (g, dg) = draw();
        let (h, _) = draw();
        let fg = star(&f, &g);
        if fails[0].is_none() {
            let diff = star(&fg, &h).sub(&star(&f, &star(&g, &h)));
            if !diff.is_zero() {
                fails[0] = Some(format!("trial {trial}: {diff}"));
            }
        }
        if fails[1].is_none() {
            let diff = star(&one, &f).sub(&f).add(&star(&f, &one).sub(&f));
            if !diff.is_zero() {
                fails[1] = Some(format!("trial {trial}: {diff}"));
            }
        }
        if fails[2].is_none() {
            for d in [dx as fn(&DiffPoly) -> DiffPoly, dy] {
                let diff = d(&fg).sub(&star(&d(&f), &g).add(&star(&f, &d(&g))));
                if !diff.is_zero() {
                    fails[2] = Some(format!("trial {trial}: {diff}"));
                    break;
                }
            }
        }
        if fails[3].is_none() {
            let want = Bidegree::Homogeneous(df.0 + dg.0, df.1 + dg.1);
            let got = fg.bidegree();
            if got != want && got != Bidegree::Zero {
                fails[3] = Some(format!("trial {trial}: {got:?}, expected {want:?}"));
            }
        }
    }
    let names = ["associativity", "unit", "derivation law", "grading additivity"];
    names
        .iter()
        .zip(fails)
        .map(|(n, f)| Check::new(format!("{n} ({count} triples, seed {})", opts.seed), f))
        .collect()
}

fn first_flow_closed_form(t: TruncationContext) -> DiffPoly {
    let u = DiffPoly::u(t);
    let disp = DiffPoly::monomial(
        DiffMonomial::new(&[JetVar::new(3, 0)], 2, 0),
        Scalar::frac(1, 12),
        t,
    );
    dx(&star(&u, &u)).scale(&Scalar::frac(1, 2)).add(&disp)
}

fn flow1_suite(opts: &GlobalOpts, cancel: &CancelToken) -> Result<Vec<Check>, Failure> {
    let cfg = RunConfig::for_flow(opts, 1)?;
    let flow = flow_rhs_with(1, cfg.trunc(), cfg.psdo_depth, cancel)?;
    let expected = first_flow_closed_form(cfg.trunc());
    Ok(vec![
        Check::poly(
            format!("Lax flow 1 = ½∂_x(u*u) + ε²/12·u_{{3,0}} at μ-cap {}", cfg.mu_cap),
            &flow.sub(&expected),
        ),
        Check::poly(
            "no term left the ε window",
            &first_flow_closed_form(cfg.wide()).filter(|m| !cfg.trunc().keeps_eps(m.eps)),
        ),
    ])
}

fn commute_suite(opts: &GlobalOpts, d: u32, cancel: &CancelToken) -> Result<Vec<Check>, Failure> {
    if d == 0 {
        return Err(Failure::usage("--d must be at least 1"));
    }
    let c1 = RunConfig::for_flow(opts, 1)?;
    let cd = RunConfig::for_flow(opts, d)?;
    let p1 = flow_rhs_with(1, c1.wide(), c1.psdo_depth, cancel)?;
    let pd = flow_rhs_with(d, cd.wide(), cd.psdo_depth, cancel)?;
    Ok(vec![Check::poly(
        format!("[P_1, P_{d}] = 0 at μ-cap {}", c1.mu_cap),
        &flow_commutator(&p1, &pd),
    )])
}

fn dispersionless_suite(opts: &GlobalOpts, dmax: u32, cancel: &CancelToken) -> Result<Vec<Check>, Failure> {
    let mut checks = Vec::new();
    for d in 1..=dmax {
        let cfg = RunConfig::for_flow(opts, d)?;
        let t = cfg.wide();
        let flow = flow_rhs_with(d, t, cfg.psdo_depth, cancel)?;
        let limit = dispersionless_limit(&flow)?;
        let fact = (1..=d as i64 + 1).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k));
        let power = DiffPoly::monomial(
            DiffMonomial::new(&vec![JetVar::U; d as usize + 1], 0, 0),
            Scalar::real(BigRational::new(BigInt::from(1), fact)),
            t,
        );
        checks.push(Check::poly(
            format!("flow {d} at ε = 0 is ∂_x(u^{}/{}!)", d + 1, d + 1),
            &limit.sub(&dx(&power)),
        ));
    }
    Ok(checks)
}

fn step1_suite(opts: &GlobalOpts) -> Vec<Check> {
    let mu = mu_cap(opts);
    let t = TruncationContext::with_mu_cap(mu);
    let u = DiffPoly::u(t);
    let series = step1_series(mu / 2, t);
    vec![Check::poly(
        format!("closed series through g = {} equals u*u", mu / 2),
        &series.sub(&star(&u, &u)),
    )]
}

fn extract_suite(opts: &GlobalOpts, cancel: &CancelToken) -> Result<Vec<Check>, Failure> {
    let mu = mu_cap(opts);
    let dens = hamiltonian_density(1, TruncationContext::with_mu_cap(mu), cancel)?;
    let mut checks = Vec::new();
    for b in 1..=5i64 {
        let (v, _) = extract_intersection_numbers(&dens, 1, 1, 0, &[0, 0], &[b, -b])?;
        let want = BigRational::new(BigInt::from(b * b), BigInt::from(12));
        let diff = (v != want).then(|| format!("{}", v - &want));
        checks.push(Check::new(
            format!("g=1 k=0 b=({b},{}) gives b²/12 = {want}", -b),
            diff,
        ));
    }
    let triples: [([i64; 3], [i64; 3]); 2] = [([1, 0, -1], [0, 1, -1]), ([2, -1, -1], [1, 1, -2])];
    for g in 0..=(mu / 2).min(3) {
        for (a, b) in &triples {
            let (v, _) = extract_intersection_numbers(&dens, 1, g, g, a, b)?;
            let theta = theta_power_dr_value(g, 3, g, Some(a), b)?
                .number()
                .ok_or_else(|| Failure::usage("theta power undetermined"))?;
            let psi = BigRational::from_integer(BigInt::from(psi_pullback_factor(g, 3)?));
            let fact = (1..=g as i64).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k));
            let closed = quadratic_dr_integral(g, a[0], a[1], b[0], b[1])
                * BigRational::from_integer(fact * BigInt::from(2 * g as i64 + 1));
            let want = &psi * &theta;
            let diff = if v != want {
                Some(format!("{}", &v - &want))
            } else if v != closed {
                Some(format!("{}", &v - &closed))
            } else {
                None
            };
            checks.push(Check::new(
                format!("g={g} k={g} a={a:?} b={b:?} gives (2g+1)·g!·f_g = {want}"),
                diff,
            ));
        }
    }
    Ok(checks)
}
