use clap::Args;
use serde_json::json;

use moyallax_core::drgeom::{extract_intersection_numbers, hamiltonian_density};
use moyallax_core::{CancelToken, TruncationContext};

use crate::config::{GlobalOpts, DEFAULT_MU_CAP};
use crate::exit::Failure;
use crate::render::{Output, Table};

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Power of ψ₁, i.e. the Hamiltonian ḡ_d.
    #[arg(long)]
    pub d: u32,

    /// Genus.
    #[arg(long)]
    pub g: u32,

    /// Power of Θ.
    #[arg(long)]
    pub k: u32,

    /// DR vector b; must sum to zero.
    #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
    pub b: Vec<i64>,

    /// Θ vector a; defaults to zeros.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub a: Vec<i64>,
}

pub fn run(args: &ExtractArgs, opts: &GlobalOpts, cancel: &CancelToken) -> Result<Output, Failure> {
    let a = if args.a.is_empty() {
        vec![0; args.b.len()]
    } else {
        args.a.clone()
    };
    if a.len() != args.b.len() {
        return Err(Failure::usage(format!(
            "--a has {} entries, --b has {}",
            a.len(),
            args.b.len()
        )));
    }
    if args.b.iter().sum::<i64>() != 0 || a.iter().sum::<i64>() != 0 {
        return Err(Failure::usage("--a and --b must each sum to zero"));
    }
    // μ^{2k} must survive the cap
    let mu_cap = opts.mu_cap.unwrap_or(DEFAULT_MU_CAP).max(2 * args.k);
    let density = hamiltonian_density(args.d, TruncationContext::with_mu_cap(mu_cap), cancel)?;
    let (value, source) = extract_intersection_numbers(&density, args.d, args.g, args.k, &a, &args.b)?;
    let json = json!({
        "d": args.d,
        "g": args.g,
        "k": args.k,
        "a": a,
        "b": args.b,
        "mu_cap": mu_cap,
        "value": value.to_string(),
        "source": source.label(),
    });
    let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
    let mut table = Table::new(&["d", "g", "k", "a", "b", "value", "source"]);
    table.push(vec![
        args.d.to_string(),
        args.g.to_string(),
        args.k.to_string(),
        join(&a),
        join(&args.b),
        value.to_string(),
        source.label().to_string(),
    ]);
    let text = format!("{value}\n# source: {}", source.label());
    Ok(Output::new(json, table, text))
}
