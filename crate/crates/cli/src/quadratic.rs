use clap::Args;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use moyallax_core::drgeom::{quadratic_dr_integral, quadratic_table, theta_normalized_recursive};

use crate::exit::{Failure, VERIFY};
use crate::render::{Output, Table};

#[derive(Args, Debug)]
pub struct QuadraticArgs {
    /// Genus.
    #[arg(long, required_unless_present = "table")]
    pub g: Option<u32>,

    /// a₁ a₂
    #[arg(
        long,
        num_args = 2,
        allow_negative_numbers = true,
        required_unless_present = "table"
    )]
    pub a: Vec<i64>,

    /// b₁ b₂
    #[arg(
        long,
        num_args = 2,
        allow_negative_numbers = true,
        required_unless_present = "table"
    )]
    pub b: Vec<i64>,

    /// GMAX AMAX BMAX: every g <= GMAX, |aᵢ| <= AMAX, |bᵢ| <= BMAX.
    #[arg(long, num_args = 3, value_names = ["GMAX", "AMAX", "BMAX"], conflicts_with_all = ["g", "a", "b"])]
    pub table: Option<Vec<i64>>,

    /// Also run the genus recursion and compare.
    #[arg(long)]
    pub verify: bool,
}

const HEADER: [&str; 6] = ["g", "a1", "a2", "b1", "b2", "value"];

fn factorial(g: u32) -> BigRational {
    BigRational::from_integer((1..=g as i64).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k)))
}

fn agrees(g: u32, a1: i64, a2: i64, b1: i64, b2: i64) -> (BigRational, BigRational, bool) {
    let closed = quadratic_dr_integral(g, a1, a2, b1, b2) * factorial(g);
    let rec = theta_normalized_recursive(g, a1, a2, b1, b2);
    let ok = closed == rec;
    (closed, rec, ok)
}

pub fn run(args: &QuadraticArgs) -> Result<Output, Failure> {
    match &args.table {
        Some(t) => run_table(t[0], t[1], t[2], args.verify),
        None => {
            let g = args.g.ok_or_else(|| Failure::usage("--g is required"))?;
            run_single(g, [args.a[0], args.a[1]], [args.b[0], args.b[1]], args.verify)
        }
    }
}

fn run_single(g: u32, a: [i64; 2], b: [i64; 2], verify: bool) -> Result<Output, Failure> {
    let value = quadratic_dr_integral(g, a[0], a[1], b[0], b[1]);
    let mut json = json!({"g": g, "a": a, "b": b, "value": value.to_string()});
    let mut table = Table::new(&HEADER);
    table.push(vec![
        g.to_string(),
        a[0].to_string(),
        a[1].to_string(),
        b[0].to_string(),
        b[1].to_string(),
        value.to_string(),
    ]);
    let mut text = value.to_string();
    if !verify {
        return Ok(Output::new(json, table, text));
    }
    let (scaled, rec, ok) = agrees(g, a[0], a[1], b[0], b[1]);
    json["verify"] =
        json!({"g_factorial_times_value": scaled.to_string(), "recursion": rec.to_string(), "agree": ok});
    let verdict = if ok { "PASS" } else { "FAIL" };
    text.push_str(&format!(
        "\n{verdict} recursion: g!·value = {scaled}, f_g = {rec}"
    ));
    let out = Output::new(json, table, text);
    Ok(if ok { out } else { out.with_code(VERIFY) })
}

fn run_table(gmax: i64, amax: i64, bmax: i64, verify: bool) -> Result<Output, Failure> {
    if gmax < 0 || amax < 0 || bmax < 0 {
        return Err(Failure::usage("--table bounds must be nonnegative"));
    }
    let gmax = u32::try_from(gmax).map_err(|_| Failure::usage("GMAX too large"))?;
    let rows = quadratic_table(gmax, amax, bmax);
    let mut failures = Vec::new();
    if verify {
        for r in &rows {
            let (scaled, rec, ok) = agrees(r.g, r.a1, r.a2, r.b1, r.b2);
            if !ok {
                failures.push(format!(
                    "g={} a=({},{}) b=({},{}): g!·value {scaled} vs recursion {rec}",
                    r.g, r.a1, r.a2, r.b1, r.b2
                ));
            }
        }
    }
    let mut table = Table::new(&HEADER);
    for r in &rows {
        table.push(vec![
            r.g.to_string(),
            r.a1.to_string(),
            r.a2.to_string(),
            r.b1.to_string(),
            r.b2.to_string(),
            r.value.clone(),
        ]);
    }
    let json = serde_json::to_value(&rows).expect("rows serialize");
    let text = table_text(&table);
    let out = Output::new(json, table, text);
    if failures.is_empty() {
        Ok(out)
    } else {
        for f in &failures {
            eprintln!("FAIL {f}");
        }
        Ok(out.with_code(VERIFY))
    }
}

/// The text form of a table is its CSV.
fn table_text(t: &Table) -> String {
    let mut s = t.header.join(",");
    for r in &t.rows {
        s.push('\n');
        s.push_str(&r.join(","));
    }
    s
}
