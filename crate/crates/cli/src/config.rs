use std::path::PathBuf;

use clap::{Args, ValueEnum};
use moyallax_core::TruncationContext;

use crate::exit::Failure;

pub const DEFAULT_MU_CAP: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Flags shared by every subcommand; each can also come from `MOYALLAX_*`.
#[derive(Args, Clone, Debug)]
pub struct GlobalOpts {
    /// Largest retained power of μ.
    #[arg(long, global = true, env = "MOYALLAX_MU_CAP")]
    pub mu_cap: Option<u32>,

    /// Lowest retained power of ε in the final result.
    #[arg(long, global = true, env = "MOYALLAX_EPS_MIN", allow_negative_numbers = true)]
    pub eps_min: Option<i32>,

    /// Highest retained power of ε in the final result.
    #[arg(long, global = true, env = "MOYALLAX_EPS_MAX", allow_negative_numbers = true)]
    pub eps_max: Option<i32>,

    /// Order of ∂ down to which fractional powers of L are expanded.
    #[arg(long, global = true, env = "MOYALLAX_DEPTH", allow_negative_numbers = true)]
    pub depth: Option<i32>,

    #[arg(
        long,
        global = true,
        value_enum,
        env = "MOYALLAX_FORMAT",
        default_value = "text"
    )]
    pub format: OutputFormat,

    /// Seed for randomized suites.
    #[arg(long, global = true, env = "MOYALLAX_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Write the result here (atomically) instead of stdout.
    #[arg(long, short, global = true, env = "MOYALLAX_OUTPUT")]
    pub output: Option<PathBuf>,
}

/// Resolved settings for one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub mu_cap: u32,
    pub eps_window: (i32, i32),
    pub psdo_depth: i32,
    pub format: OutputFormat,
    pub seed: u64,
}

impl RunConfig {
    /// Settings for flow `d`: ε window `(−2d−2, 2d+2+muCap)`, depth 0.
    pub fn for_flow(opts: &GlobalOpts, d: u32) -> Result<Self, Failure> {
        let mu_cap = opts.mu_cap.unwrap_or(DEFAULT_MU_CAP);
        if !mu_cap.is_multiple_of(2) {
            return Err(Failure::usage(format!(
                "--mu-cap must be even for flows, got {mu_cap}"
            )));
        }
        let d = d as i32;
        let lo = opts.eps_min.unwrap_or(-2 * d - 2);
        let hi = opts.eps_max.unwrap_or(2 * d + 2 + mu_cap as i32);
        if lo > hi {
            return Err(Failure::usage(format!("empty ε window ({lo}, {hi})")));
        }
        let psdo_depth = opts.depth.unwrap_or(moyallax_core::hierarchy::FLOW_DEPTH);
        if psdo_depth > 0 {
            return Err(Failure::usage(format!("--depth must be <= 0, got {psdo_depth}")));
        }
        Ok(RunConfig {
            mu_cap,
            eps_window: (lo, hi),
            psdo_depth,
            format: opts.format,
            seed: opts.seed,
        })
    }

    pub fn trunc(&self) -> TruncationContext {
        TruncationContext::new(self.mu_cap, self.eps_window.0, Some(self.eps_window.1))
            .expect("window validated")
    }

    /// Window with only the μ cap applied.
    pub fn wide(&self) -> TruncationContext {
        TruncationContext::with_mu_cap(self.mu_cap)
    }
}
