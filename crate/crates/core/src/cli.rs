//! Command-line front end.
//!
//! Exit codes: 0 success or observable, 1 usage, parse or I/O error,
//! 2 violated precondition, 3 negative verdict or ambiguous reconstruction,
//! 4 inconsistent output sequence.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf::Elem;
use crate::linalg::{render_vector, Matrix};
use crate::lor::{build_lor, Lor};
use crate::observability::{analyze_lor, ObservabilityError, Reconstruction, Reconstructor};
use crate::oracle::oracle_system;
use crate::specfile::load_system;
use crate::system::{simulate, Dsff, OutputSequence};
use crate::transform::{conjugate, lor_invariance_check, StateBijection};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "dsff", version, about = "Observability analysis of dynamical systems over finite fields")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Matrices,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide observability and report the output bound.
    Analyze {
        system: PathBuf,
        /// Cross-check against the brute-force oracle.
        #[arg(long)]
        with_oracle: bool,
        /// Append the realization matrices.
        #[arg(long, value_enum)]
        emit: Option<Emit>,
    },
    /// Print the linear output realization.
    Lor { system: PathBuf },
    /// Recover the initial state from an output sequence.
    Reconstruct {
        system: PathBuf,
        /// Samples separated by `;`, components within a sample by `,`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Brute-force observability verdict with per-state indices.
    Oracle { system: PathBuf },
    /// Print the output sequence from an initial state.
    Simulate {
        system: PathBuf,
        #[arg(long)]
        x0: String,
        #[arg(long)]
        steps: usize,
    },
    /// Check realization invariance under random state relabelings.
    ConjugateCheck {
        system: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CmdOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl CmdOutput {
    fn ok(stdout: String, code: i32) -> Self {
        CmdOutput { stdout, stderr: String::new(), code }
    }

    fn fail(message: impl std::fmt::Display, code: i32) -> Self {
        CmdOutput { stdout: String::new(), stderr: format!("error: {message}\n"), code }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CmdOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match CliConfig::try_parse_from(args) {
        Ok(config) => execute(&config.command),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                CmdOutput { stdout: String::new(), stderr: text, code: EXIT_ERROR }
            } else {
                CmdOutput::ok(text, EXIT_OK)
            }
        }
    }
}

pub fn execute(command: &Command) -> CmdOutput {
    let result = match command {
        Command::Analyze { system, with_oracle, emit } => {
            load(system).and_then(|sys| cmd_analyze(&sys, *with_oracle, emit.is_some()))
        }
        Command::Lor { system } => load(system).map(|sys| CmdOutput::ok(render_lor(&build_lor(&sys)), EXIT_OK)),
        Command::Reconstruct { system, z } => load(system).and_then(|sys| cmd_reconstruct(&sys, z)),
        Command::Oracle { system } => load(system).map(|sys| cmd_oracle(&sys)),
        Command::Simulate { system, x0, steps } => load(system).and_then(|sys| cmd_simulate(&sys, x0, *steps)),
        Command::ConjugateCheck { system, seed, trials } => {
            load(system).and_then(|sys| cmd_conjugate_check(&sys, *seed, *trials))
        }
    };
    result.unwrap_or_else(|e| e)
}

fn load(path: &PathBuf) -> Result<Dsff, CmdOutput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdOutput::fail(format_args!("cannot read {}: {e}", path.display()), EXIT_ERROR))?;
    load_system(&text).map_err(|e| CmdOutput::fail(format_args!("{}: {e}", path.display()), EXIT_ERROR))
}

fn observability_failure(e: ObservabilityError) -> CmdOutput {
    let code = match e {
        ObservabilityError::SequenceTooShort { .. } | ObservabilityError::DimensionMismatch { .. } => EXIT_PRECONDITION,
        ObservabilityError::InternalInvariantViolation(_) | ObservabilityError::Linalg(_) => EXIT_ERROR,
    };
    CmdOutput::fail(e, code)
}

fn push_block(out: &mut String, title: &str, m: &Matrix) {
    let _ = writeln!(out, "{title}:");
    for row in m.row_iter() {
        let _ = writeln!(out, "{}", render_vector(row, " "));
    }
}

fn render_lor(lor: &Lor) -> String {
    format!("N:{}\n{}", lor.dim(), render_realization(lor))
}

/// Chains, `K`, `Γ` and the basis value tables in state-index order.
fn render_realization(lor: &Lor) -> String {
    let w = lor.subspace();
    let mut out = String::new();
    let gens: Vec<String> = w.generators_used().iter().map(|i| format!("g{}", i + 1)).collect();
    let lens: Vec<String> = w.chain_lengths().iter().map(usize::to_string).collect();
    let _ = writeln!(out, "generators:{}", gens.join(","));
    let _ = writeln!(out, "chain_lengths:{}", lens.join(","));
    push_block(&mut out, "K", lor.kmat());
    push_block(&mut out, "Gamma", lor.gamma());
    let _ = writeln!(out, "basis:");
    for (k, psi) in w.basis().iter().enumerate() {
        let _ = writeln!(out, "psi{}:{}", k + 1, render_vector(psi.values(), " "));
    }
    out
}

fn cmd_analyze(sys: &Dsff, with_oracle: bool, emit_matrices: bool) -> Result<CmdOutput, CmdOutput> {
    let lor = build_lor(sys);
    let report = analyze_lor(sys, &lor).map_err(observability_failure)?;
    let mut out = report.render(sys.indexing());
    out.push('\n');
    if with_oracle {
        let verdict = oracle_system(sys);
        let _ = writeln!(out, "oracle_observable:{}", verdict.observable);
        match verdict.system_index {
            Some(k) => {
                let _ = writeln!(out, "oracle_index:{k}");
            }
            None => out.push_str("oracle_index:none\n"),
        }
        if verdict.observable != report.system_observable {
            return Err(CmdOutput {
                stdout: out,
                stderr: "error: oracle disagrees with the realization verdict\n".into(),
                code: EXIT_ERROR,
            });
        }
    }
    if emit_matrices {
        out.push_str(&render_realization(&lor));
    }
    let code = if report.system_observable { EXIT_OK } else { EXIT_NEGATIVE };
    Ok(CmdOutput::ok(out, code))
}

fn parse_codes(sys: &Dsff, text: &str, what: &str) -> Result<Vec<Elem>, CmdOutput> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let v: u32 = tok
                .parse()
                .map_err(|_| CmdOutput::fail(format_args!("{what}: `{tok}` is not an element code"), EXIT_ERROR))?;
            sys.field().element(v).map_err(|e| CmdOutput::fail(format_args!("{what}: {e}"), EXIT_PRECONDITION))
        })
        .collect()
}

/// `"1,0;0,1"` -> two samples of width two. An empty string is the empty sequence.
pub fn parse_sequence(sys: &Dsff, text: &str) -> Result<OutputSequence, CmdOutput> {
    let text = text.trim();
    let samples = if text.is_empty() {
        Vec::new()
    } else {
        text.split(';').map(|s| parse_codes(sys, s, "--z")).collect::<Result<Vec<_>, _>>()?
    };
    if let Some(bad) = samples.iter().find(|s| s.len() != sys.m()) {
        return Err(observability_failure(ObservabilityError::DimensionMismatch {
            expected: sys.m(),
            found: bad.len(),
        }));
    }
    Ok(OutputSequence::new(sys.m(), samples).expect("sample widths checked"))
}

fn cmd_reconstruct(sys: &Dsff, z: &str) -> Result<CmdOutput, CmdOutput> {
    let z = parse_sequence(sys, z)?;
    let lor = build_lor(sys);
    let rec = Reconstructor::new(sys, &lor).map_err(observability_failure)?;
    let result = rec.reconstruct(&z).map_err(observability_failure)?;
    let idx = sys.indexing();
    Ok(match result.classification {
        Reconstruction::Unique(x) => CmdOutput::ok(format!("unique:{}\n", idx.render_state(x)), EXIT_OK),
        Reconstruction::Ambiguous(xs) => {
            let states: Vec<String> = xs.iter().map(|&x| idx.render_state(x)).collect();
            CmdOutput::ok(format!("ambiguous:{{{}}}\n", states.join(",")), EXIT_NEGATIVE)
        }
        Reconstruction::InconsistentSequence => CmdOutput::ok("inconsistent\n".into(), EXIT_INCONSISTENT),
    })
}

fn cmd_oracle(sys: &Dsff) -> CmdOutput {
    let v = oracle_system(sys);
    let idx = sys.indexing();
    let mut out = format!("observable:{}\n", v.observable);
    let _ = writeln!(out, "system_index:{}", v.system_index.map_or("none".into(), |k| k.to_string()));
    for class in &v.indistinguishable {
        let states: Vec<String> = class.iter().map(|&x| idx.render_state(x)).collect();
        let _ = writeln!(out, "indistinguishable:{{{}}}", states.join(","));
    }
    out.push_str("state_index:\n");
    for (x, k) in v.per_state_index.iter().enumerate() {
        let _ = writeln!(out, "{}:{}", idx.render_state(x), k.map_or("none".into(), |k| k.to_string()));
    }
    CmdOutput::ok(out, if v.observable { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_simulate(sys: &Dsff, x0: &str, steps: usize) -> Result<CmdOutput, CmdOutput> {
    let x = parse_codes(sys, x0, "--x0")?;
    let s = sys.indexing().encode(&x).map_err(|_| {
        CmdOutput::fail(format_args!("--x0 has {} coordinates, expected {}", x.len(), sys.n()), EXIT_PRECONDITION)
    })?;
    let z = simulate(sys, s, steps).expect("encoded state is valid");
    Ok(CmdOutput::ok(format!("{}\n", z.render()), EXIT_OK))
}

fn cmd_conjugate_check(sys: &Dsff, seed: u64, trials: usize) -> Result<CmdOutput, CmdOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let mut passed = 0;
    for t in 1..=trials {
        let h = StateBijection::random(sys.num_states(), rng.gen());
        let conj = conjugate(sys, &h).map_err(|e| CmdOutput::fail(e, EXIT_ERROR))?;
        let ok = lor_invariance_check(sys, &conj, &h).map_err(|e| CmdOutput::fail(e, EXIT_ERROR))?;
        passed += usize::from(ok);
        let _ = writeln!(out, "trial {t}:{}", if ok { "pass" } else { "fail" });
    }
    let _ = writeln!(out, "passed:{passed}/{trials}");
    Ok(CmdOutput::ok(out, if passed == trials { EXIT_OK } else { EXIT_NEGATIVE }))
}
