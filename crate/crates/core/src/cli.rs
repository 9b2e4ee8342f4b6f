//! Command-line front end. Every subcommand writes to `--out` or stdout;
//! domain failures print `{"error": name, "detail": str}` on stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::classical::{
    classical_attenuate, classical_moments, ensemble_beamsplit, BeamSplitterParams, ClassicalEnsemble,
    TwoModeEnsemble,
};
use crate::error::Error;
use crate::filters::{CharFuncGrid, FilterSpec};
use crate::fock::{make_coherent, make_fock, make_thermal, DensityMatrix, StateFile};
use crate::grid::Lattice;
use crate::nonclassical::{correlation_report, figure3_data_with, write_figure3_csv, Figure3Setup, Verdict};
use crate::optics::{apply_beamsplitter, attenuate, attenuate_via_beamsplitter};
use crate::quasiprob::{fmt15, quasiprob_transform};
use crate::theorems::{
    classify_filter_attenuator, classify_filter_bs_seeded, disk_grid, VerifyReport, DEFAULT_TOL,
};

#[derive(Debug, Parser)]
#[command(name = "phasespace", version, about = "Phase-space quasiprobabilities and linear-optics channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a single-mode state and write it as JSON.
    State(StateArgs),
    /// Sample a filtered characteristic function on a lattice (CSV).
    Charfunc(CharfuncArgs),
    /// Quasiprobability of a state on a lattice (CSV).
    Quasiprob(QuasiprobArgs),
    /// Send two single-mode states through a beam splitter.
    Beamsplit(BeamsplitArgs),
    /// Attenuate a single-mode state.
    Attenuate(AttenuateArgs),
    /// Normally ordered correlations and nonclassicality verdicts (JSON).
    Report(ReportArgs),
    /// Wigner function at the origin of an attenuated photon versus efficiency (CSV).
    Figure3(Figure3Args),
    /// Check a filter for beam-splitter covariance (theorem 1) or classical attenuation (theorem 2).
    Verify(VerifyArgs),
    /// Classical ensemble operations.
    Classical(ClassicalArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StateKind {
    Vacuum,
    Fock,
    Coherent,
    Thermal,
}

#[derive(Debug, Args)]
struct StateArgs {
    #[arg(long, value_enum)]
    kind: StateKind,
    /// Photon number for `fock`.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Amplitude for `coherent` as `re,im`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    alpha: String,
    /// Mean photon number for `thermal`.
    #[arg(long, default_value_t = 0.5)]
    nbar: f64,
    #[arg(long, default_value_t = 20)]
    cutoff: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// s-parameterized filter: 1 = P, 0 = Wigner, -1 = Q.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "filter")]
    s: Option<f64>,
    /// Filter as JSON (`{"s": f}` or `{"coeffs": [...]}`), inline or a file path.
    #[arg(long)]
    filter: Option<String>,
}

#[derive(Debug, Args)]
struct CharfuncArgs {
    #[arg(long)]
    state: PathBuf,
    #[command(flatten)]
    filter: FilterArgs,
    /// Lattice `extent:points`.
    #[arg(long, default_value = "4:129")]
    grid: Lattice,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct QuasiprobArgs {
    #[arg(long)]
    state: PathBuf,
    #[command(flatten)]
    filter: FilterArgs,
    /// Output lattice in alpha, `extent:points`.
    #[arg(long, default_value = "4:129")]
    grid: Lattice,
    /// Sampling lattice in beta, `extent:points`.
    #[arg(long, default_value = "6:128")]
    beta_grid: Lattice,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SplitterArgs {
    /// Transmittance `re,im`.
    #[arg(long, default_value = "0.7071067811865476,0", allow_hyphen_values = true)]
    t: String,
    /// Reflectance `re,im`.
    #[arg(long, default_value = "0.7071067811865476,0", allow_hyphen_values = true)]
    r: String,
    /// Global phase of the splitter.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi_u: f64,
}

#[derive(Debug, Args)]
struct BeamsplitArgs {
    /// First input mode.
    #[arg(long)]
    state1: PathBuf,
    /// Second input mode; vacuum when omitted.
    #[arg(long)]
    state2: Option<PathBuf>,
    #[command(flatten)]
    splitter: SplitterArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AttenuationRoute {
    Kraus,
    Splitter,
}

#[derive(Debug, Args)]
struct AttenuateArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    eta: f64,
    #[arg(long, value_enum, default_value = "kraus")]
    route: AttenuationRoute,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    state: PathBuf,
    /// Largest moment order in the table.
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct Figure3Args {
    #[arg(long, default_value_t = 101)]
    eta_steps: usize,
    #[arg(long, default_value_t = 20)]
    cutoff: usize,
    /// Output lattice in alpha; must contain the origin.
    #[arg(long, default_value = "4:129")]
    grid: Lattice,
    #[arg(long, default_value = "6:128")]
    beta_grid: Lattice,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    theorem: u8,
    #[command(flatten)]
    filter: FilterArgs,
    /// Random splitters and probe pairs for theorem 1.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Probe disk radius for theorem 2.
    #[arg(long, default_value_t = 3.0)]
    radius: f64,
    /// Lattice points per axis for theorem 2.
    #[arg(long, default_value_t = 61)]
    points: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClassicalOp {
    /// Product of two ensembles through a splitter.
    Beamsplit,
    /// Scale every amplitude by `t`.
    Attenuate,
    /// One normally ordered moment.
    Moments,
    /// First- and second-order correlations.
    Report,
}

#[derive(Debug, Args)]
struct ClassicalArgs {
    #[arg(long, value_enum)]
    op: ClassicalOp,
    /// Ensemble JSON `{"samples": [{"re", "im", "w"}]}`.
    #[arg(long)]
    ensemble: PathBuf,
    /// Second input mode for `beamsplit`; a point at the origin when omitted.
    #[arg(long)]
    ensemble2: Option<PathBuf>,
    #[command(flatten)]
    splitter: SplitterArgs,
    /// Amplitude factor for `attenuate`, `re,im`.
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    factor: String,
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Domain(Error),
    Io(String),
    Parse(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn envelope(&self) -> String {
        let (name, detail) = match self {
            Failure::Domain(e) => (e.name(), e.to_string()),
            Failure::Io(d) => ("Io", d.clone()),
            Failure::Parse(d) => ("Parse", d.clone()),
        };
        serde_json::json!({ "error": name, "detail": detail }).to_string()
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let (bytes, out) = match execute(cli.command) {
        Ok(pair) => pair,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.envelope());
            return 1;
        }
    };
    let written = match out {
        Some(path) => fs::write(&path, &bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(&bytes).and_then(|_| stdout.flush()).map_err(|e| Failure::Io(e.to_string())),
    };
    match written {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.envelope());
            1
        }
    }
}

fn execute(command: Command) -> CliResult<(Vec<u8>, Option<PathBuf>)> {
    match command {
        Command::State(a) => {
            let rho = match a.kind {
                StateKind::Vacuum => DensityMatrix::vacuum(a.cutoff),
                StateKind::Fock => make_fock(a.n, a.cutoff)?,
                StateKind::Coherent => make_coherent(parse_complex(&a.alpha)?, a.cutoff)?,
                StateKind::Thermal => make_thermal(a.nbar, a.cutoff)?,
            };
            Ok((state_json(&rho)?, a.output.out))
        }
        Command::Charfunc(a) => {
            let rho = read_state(&a.state)?;
            let filter = a.filter.resolve()?;
            let cf = CharFuncGrid::sample(&rho, &filter, a.grid)?;
            Ok((charfunc_csv(&cf)?, a.output.out))
        }
        Command::Quasiprob(a) => {
            let rho = read_state(&a.state)?;
            let filter = a.filter.resolve()?;
            let cf = CharFuncGrid::sample(&rho, &filter, a.beta_grid)?;
            let grid = quasiprob_transform(&cf, &a.grid)?;
            let mut buf = Vec::new();
            grid.write_csv(&mut buf)?;
            Ok((buf, a.output.out))
        }
        Command::Beamsplit(a) => {
            let rho1 = read_state(&a.state1)?;
            let rho2 = match &a.state2 {
                Some(p) => read_state(p)?,
                None => DensityMatrix::vacuum(rho1.cutoff()),
            };
            let bs = a.splitter.resolve()?;
            let out = apply_beamsplitter(&rho1.tensor(&rho2)?, &bs)?;
            Ok((state_json(&out)?, a.output.out))
        }
        Command::Attenuate(a) => {
            let rho = read_state(&a.state)?;
            let out = match a.route {
                AttenuationRoute::Kraus => attenuate(&rho, a.eta)?,
                AttenuationRoute::Splitter => attenuate_via_beamsplitter(&rho, a.eta)?,
            };
            Ok((state_json(&out)?, a.output.out))
        }
        Command::Report(a) => {
            let rho = read_state(&a.state)?;
            Ok((to_json(&correlation_report(&rho, a.order)?)?, a.output.out))
        }
        Command::Figure3(a) => {
            let setup = Figure3Setup { cutoff: a.cutoff, betas: a.beta_grid, alphas: a.grid };
            let rows = figure3_data_with(a.eta_steps, &setup)?;
            let mut buf = Vec::new();
            write_figure3_csv(&rows, &mut buf)?;
            Ok((buf, a.output.out))
        }
        Command::Verify(a) => {
            let filter = a.filter.resolve()?;
            let report = if a.theorem == 1 {
                if a.trials == 0 {
                    return Err(Error::InvalidArgument("trials must be >= 1".into()).into());
                }
                VerifyReport::theorem1(&filter, &classify_filter_bs_seeded(&filter, a.trials, a.tol, a.seed))
            } else {
                let grid = disk_grid(a.radius, a.points);
                let c = classify_filter_attenuator(&filter, &grid, a.tol)
                    .ok_or_else(|| Error::InvalidArgument(format!("empty probe grid {}:{}", a.radius, a.points)))?;
                VerifyReport::theorem2(&filter, &c)
            };
            Ok((to_json(&report)?, a.output.out))
        }
        Command::Classical(a) => {
            let ens: ClassicalEnsemble = read_json(&a.ensemble)?;
            let bytes = match a.op {
                ClassicalOp::Beamsplit => {
                    let other = match &a.ensemble2 {
                        Some(p) => read_json(p)?,
                        None => ClassicalEnsemble::point(Complex64::new(0.0, 0.0)),
                    };
                    let bs = a.splitter.resolve()?;
                    let out: TwoModeEnsemble = ensemble_beamsplit(&ens.product(&other), &bs)?;
                    to_json(&out)?
                }
                ClassicalOp::Attenuate => to_json(&classical_attenuate(&ens, parse_complex(&a.factor)?)?)?,
                ClassicalOp::Moments => {
                    let v = classical_moments(&ens, a.m, a.n);
                    to_json(&MomentOut { m: a.m, n: a.n, re: v.re, im: v.im })?
                }
                ClassicalOp::Report => {
                    let g1 = classical_moments(&ens, 1, 1).re;
                    let g2 = classical_moments(&ens, 2, 2).re;
                    to_json(&ClassicalReport { g1, g2, verdict: Verdict::of(g2, g1 * g1) })?
                }
            };
            Ok((bytes, a.output.out))
        }
    }
}

#[derive(Serialize)]
struct MomentOut {
    m: u32,
    n: u32,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct ClassicalReport {
    g1: f64,
    g2: f64,
    verdict: Verdict,
}

impl FilterArgs {
    fn resolve(&self) -> CliResult<FilterSpec> {
        match (&self.s, &self.filter) {
            (Some(s), _) => Ok(FilterSpec::SParam(*s)),
            (None, Some(text)) => {
                let json = if text.trim_start().starts_with('{') {
                    text.clone()
                } else {
                    read_text(Path::new(text))?
                };
                serde_json::from_str(&json).map_err(|e| Failure::Parse(format!("filter: {e}")))
            }
            (None, None) => Ok(FilterSpec::WIGNER),
        }
    }
}

impl SplitterArgs {
    fn resolve(&self) -> CliResult<BeamSplitterParams> {
        let bs = BeamSplitterParams::new(parse_complex(&self.t)?, parse_complex(&self.r)?)?;
        Ok(bs.with_global_phase(self.phi_u))
    }
}

/// `re` or `re,im`.
fn parse_complex(s: &str) -> CliResult<Complex64> {
    let parse = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|e| Failure::Domain(Error::InvalidArgument(format!("complex value '{s}': {e}"))))
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(s)?, 0.0)),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn read_state(path: &Path) -> CliResult<DensityMatrix> {
    let file: StateFile = read_json(path)?;
    Ok(DensityMatrix::try_from(file)?)
}

fn to_json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::Parse(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn state_json(rho: &DensityMatrix) -> CliResult<Vec<u8>> {
    to_json(&StateFile::from(rho))
}

fn charfunc_csv(cf: &CharFuncGrid) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(["re_beta", "im_beta", "re", "im"]).map_err(err)?;
    for (b, v) in cf.lattice.complex_points().iter().zip(&cf.values) {
        w.write_record([fmt15(b.re), fmt15(b.im), fmt15(v.re), fmt15(v.im)]).map_err(err)?;
    }
    w.into_inner().map_err(|e| Failure::Io(e.to_string()))
}
