use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use siegel_theta::io::{basis_json, cosets_json, decomposition_json, load_form};
use siegel_theta::quadform::fixture_names;
use siegel_theta::theta::{theta_eval, SpecFile};
use siegel_theta::verify::{run_suite, Suite, SuiteOptions};
use siegel_theta::{Error, Result};

/// Siegel theta series: bases, decompositions, evaluation and verification.
#[derive(Parser)]
#[command(name = "siegel-theta", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Basis of the homogeneous polynomials P_α of m×n matrices.
    Basis {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: u32,
    },
    /// Splitting A = A⁺ + A⁻ and the majorant.
    Decompose {
        /// Fixture name, JSON matrix or path to a JSON file.
        #[arg(long)]
        form: String,
    },
    /// Representatives of A⁻¹ℤ^{m×n} / ℤ^{m×n}.
    Cosets {
        #[arg(long)]
        form: String,
        #[arg(long)]
        genus: usize,
    },
    /// Evaluates a theta series described by a JSON spec file.
    Eval {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Runs a verification suite and prints one JSON report per line.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        genus: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Lists the named forms.
    Fixtures {
        #[arg(long)]
        list: bool,
    },
}

const EXIT_CHECK_FAILED: u8 = 2;

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string(v)?);
    Ok(())
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Basis { m, n, alpha } => print_json(&basis_json(m, n, alpha)?)?,
        Command::Decompose { form } => print_json(&decomposition_json(&load_form(&form)?)?)?,
        Command::Cosets { form, genus } => print_json(&cosets_json(&load_form(&form)?, genus)?)?,
        Command::Eval { spec, eps } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| Error::Invalid(format!("{spec}: {e}")))?;
            let file = SpecFile::parse(&text)?;
            let eps = eps.or(file.eps).unwrap_or(1e-10);
            let (spec, z) = file.build()?;
            print_json(&theta_eval(&spec, &z, eps)?.to_json())?;
        }
        Command::Verify { suite, form, genus, seed } => {
            let suite: Suite = suite.parse()?;
            let form = form.as_deref().map(load_form).transpose()?;
            if genus == Some(0) {
                return Err(Error::Invalid("genus must be positive".into()));
            }
            let reports = run_suite(suite, &SuiteOptions { form, genus, seed });
            for r in &reports {
                print_json(r)?;
            }
            if reports.iter().any(|r| !r.passed) {
                let resource = reports.iter().any(|r| r.metadata.get("exit_code").and_then(|v| v.as_i64()) == Some(3));
                return Ok(if resource { 3 } else { EXIT_CHECK_FAILED });
            }
        }
        Command::Fixtures { list: _ } => {
            let items: Vec<_> = fixture_names()
                .into_iter()
                .map(|(name, description)| serde_json::json!({ "name": name, "description": description }))
                .collect();
            print_json(&items)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
