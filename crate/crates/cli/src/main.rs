mod config;
mod exit;
mod extract;
mod flow;
mod quadratic;
mod render;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use moyallax_core::CancelToken;

use config::GlobalOpts;
use exit::{Failure, USAGE};

/// Moyal-deformed KdV flows, their Lax construction, and the DR intersection
/// numbers they encode. All output is exact.
#[derive(Parser, Debug)]
#[command(name = "moyallax", version)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Right-hand side of the d-th flow from the Lax representation.
    Flow(flow::FlowArgs),
    /// ∫ λ_g DR_g(a₁, a₂, −a₁−a₂) DR_g(b₁, b₂, −b₁−b₂), or a table of them.
    DrQuadratic(quadratic::QuadraticArgs),
    /// Run one invariant suite; exit 3 on failure.
    Verify(verify::VerifyArgs),
    /// Read ∫ λ_g ψ₁^d Θ^k DR_g off the Hamiltonian density ḡ_d.
    Extract(extract::ExtractArgs),
}

fn run(cli: &Cli, cancel: &CancelToken) -> Result<u8, Failure> {
    let out = match &cli.command {
        Command::Flow(a) => flow::run(a, &cli.opts, cancel)?,
        Command::DrQuadratic(a) => quadratic::run(a)?,
        Command::Verify(a) => verify::run(a, &cli.opts, cancel)?,
        Command::Extract(a) => extract::run(a, &cli.opts, cancel)?,
    };
    cancel.check().map_err(Failure::from)?;
    render::emit(&out.render(cli.opts.format), cli.opts.output.as_deref())?;
    Ok(out.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cancel = CancelToken::new();
    let handler_token = cancel.clone();
    // a second interrupt falls through to the default handler
    let _ = ctrlc::set_handler(move || {
        if handler_token.is_cancelled() {
            std::process::exit(exit::INTERRUPTED as i32);
        }
        handler_token.cancel();
    });
    match run(&cli, &cancel) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("moyallax: {f}");
            ExitCode::from(f.code)
        }
    }
}
