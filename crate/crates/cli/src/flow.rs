use clap::Args;
use serde_json::json;

use moyallax_core::exactalg::json::to_json;
use moyallax_core::hierarchy::flow_rhs_with;
use moyallax_core::CancelToken;

use crate::config::{GlobalOpts, RunConfig};
use crate::exit::Failure;
use crate::render::{Output, Table};

#[derive(Args, Debug)]
pub struct FlowArgs {
    /// Index of the flow, `∂u/∂t_d`.
    #[arg(long)]
    pub d: u32,
}

pub fn run(args: &FlowArgs, opts: &GlobalOpts, cancel: &CancelToken) -> Result<Output, Failure> {
    if args.d == 0 {
        return Err(Failure::usage("--d must be at least 1"));
    }
    let cfg = RunConfig::for_flow(opts, args.d)?;
    let flow = flow_rhs_with(args.d, cfg.trunc(), cfg.psdo_depth, cancel)?;
    let (lo, hi) = cfg.eps_window;
    let json = json!({
        "command": "flow",
        "d": args.d,
        "mu_cap": cfg.mu_cap,
        "eps_window": [lo, hi],
        "depth": cfg.psdo_depth,
        "clipped": flow.is_clipped(),
        "terms": to_json(&flow),
    });
    let mut table = Table::new(&["re", "im", "eps", "mu", "jets"]);
    for (m, c) in flow.terms() {
        let (re, im) = c.to_strings();
        table.push(vec![
            re,
            im,
            m.eps.to_string(),
            m.mu.to_string(),
            m.jets_only().to_string(),
        ]);
    }
    let text = format!(
        "# flow d={} mu_cap={} eps_window=({lo},{hi}) depth={} clipped={}\n{}",
        args.d,
        cfg.mu_cap,
        cfg.psdo_depth,
        flow.is_clipped(),
        flow
    );
    Ok(Output::new(json, table, text))
}
