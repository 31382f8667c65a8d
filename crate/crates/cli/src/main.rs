//! `wsf`: command-line front end for the weighted-sum function analyses.
//!
//! Exit codes: 0 on success, 1 on usage or resource errors, 2 when a checked
//! property is violated.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

/// Environment variable consulted when `--threads` is not given.
const THREADS_ENV: &str = "WSF_THREADS";

#[derive(Debug, Parser)]
#[command(name = "wsf", version, about = "Exact analysis of weighted-sum Boolean functions")]
pub struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Worker threads: a positive integer or `auto`.
    #[arg(long, global = true)]
    threads: Option<String>,

    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    /// Simplified function, modulus m.
    F,
    /// Original function, modulus the smallest prime >= m.
    G,
}

impl From<VariantArg> for wsf_core::Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::F => wsf_core::Variant::Simplified,
            VariantArg::G => wsf_core::Variant::Original,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the function on one input.
    Eval {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::F)]
        variant: VariantArg,
        /// Input bits in storage order, e.g. `0110`.
        #[arg(long)]
        x: String,
    },
    /// Print the full truth table.
    Table {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::F)]
        variant: VariantArg,
    },
    /// Weight, sensitivity and average sensitivity.
    Measures {
        /// A single m; overrides --m-min/--m-max.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1)]
        m_min: usize,
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long, value_enum, default_value_t = VariantArg::F)]
        variant: VariantArg,
        /// Also report the subset-count terms of the asymptotic sensitivity estimate.
        #[arg(long)]
        proof_terms: bool,
    },
    /// Walsh spectrum summary, or every coefficient with --coefficients.
    Spectrum {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::F)]
        variant: VariantArg,
        #[arg(long)]
        coefficients: bool,
    },
    /// Maximal Fourier coefficients of f for m = 1..=m_max.
    Table1 {
        #[arg(long, default_value_t = 21)]
        m_max: usize,
        /// Compare against the bundled fixture; exit 2 on any mismatch.
        #[arg(long)]
        compare_fixture: bool,
        /// Use this fixture CSV instead of the bundled one.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Subset-sum counts N(k, b, D) for D = Z_m minus --exclude.
    Count {
        #[arg(long)]
        m: usize,
        /// Residues removed from Z_m, comma separated.
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
    },
    /// Sweep the character-sum bounds over D = Z_m minus up to --max-excluded residues.
    BoundCheck {
        #[arg(long, default_value_t = 20)]
        m_max: usize,
        #[arg(long, default_value_t = 3)]
        max_excluded: usize,
        /// Which form of the bounds decides the exit code.
        #[arg(long, value_enum, default_value_t = commands::BoundForm::Displayed)]
        form: commands::BoundForm,
    },
    /// Seeded equivalence trials for the distinct-coordinate sieve.
    SieveVerify {
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Zero-sum scan above the m/d + d - 2 threshold.
    ZeroSum {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 2)]
        m_min: usize,
        #[arg(long, default_value_t = 16)]
        m_max: usize,
        #[arg(long, value_enum, default_value_t = commands::ScanArg::Exhaustive)]
        mode: commands::ScanArg,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allow 0 in candidate sets.
        #[arg(long)]
        include_zero: bool,
    },
    /// The constants rho and gamma.
    Constants,
}

fn thread_count(arg: Option<&str>, env: Option<&str>) -> anyhow::Result<Option<usize>> {
    match arg.or(env) {
        None | Some("auto") => Ok(None),
        Some(n) => n
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| anyhow::anyhow!("invalid thread count {n:?}")),
    }
}

fn run(cli: &Cli, threads_env: Option<&str>, stdout: &mut dyn Write) -> anyhow::Result<Option<String>> {
    let outcome = match thread_count(cli.global.threads.as_deref(), threads_env)? {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| commands::dispatch(&cli.command, cli.global.format))?
        }
        None => commands::dispatch(&cli.command, cli.global.format)?,
    };
    match &cli.global.output {
        Some(path) => std::fs::write(path, &outcome.text)?,
        None => stdout.write_all(outcome.text.as_bytes())?,
    }
    Ok(outcome.violation)
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn execute<I, T>(args: I, threads_env: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match run(&cli, threads_env, stdout) {
        Ok(None) => 0,
        Ok(Some(msg)) => {
            let _ = writeln!(stderr, "wsf: {msg}");
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "wsf: {e:#}");
            1
        }
    }
}

fn main() -> ExitCode {
    let threads_env = std::env::var(THREADS_ENV).ok();
    let code = execute(
        std::env::args_os(),
        threads_env.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    let _ = std::io::stdout().flush();
    ExitCode::from(code)
}

#[cfg(test)]
mod tests;
