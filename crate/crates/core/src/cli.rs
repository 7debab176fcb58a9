//! Command-line surface. Exit codes: 0 on success or a confirmed theorem,
//! 2 when the signals contradict the theorem, 1 on usage or numeric errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::carleson::{carleson_constant, TheoremId};
use crate::error::{Error, Result};
use crate::fmt17;
use crate::harness::{run_compactness_proxy, run_harness, HarnessConfig, HarnessReport};
use crate::measure::MeasureSpec;
use crate::operator::{
    apply_i, equivalence_check, equivalence_points, pairing_lhs, pairing_limit, pairing_rhs, ApplyOptions,
    HankelEntrySpec, PairingWeight,
};
use crate::series::{
    bergman_a1_norm, bloch_norm, bloch_seminorm, dyadic_block_seminorm, growth_bound_check, AnalyticFn,
    CoefficientSeries, DiskGrid, Family, TestFamilyMember, DEFAULT_TRUNCATION,
};
use crate::special::GammaRatioTable;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_CONTRADICTION: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "genhilbert", version, about = "Generalized Hilbert operators on spaces of analytic functions")]
pub struct Cli {
    /// Write the result to FILE instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Report `runtime_ms` as 0 so identical runs give identical bytes.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Measure JSON file.
    #[arg(long, conflicts_with = "measure_json")]
    pub measure: Option<PathBuf>,
    /// Inline measure JSON.
    #[arg(long)]
    pub measure_json: Option<String>,
}

impl MeasureArgs {
    fn load(&self) -> Result<MeasureSpec> {
        let text = match (&self.measure, &self.measure_json) {
            (Some(path), None) => std::fs::read_to_string(path)?,
            (None, Some(text)) => text.clone(),
            _ => return Err(Error::Domain("pass the measure with --measure FILE or --measure-json TEXT".into())),
        };
        let mu = MeasureSpec::from_json(&text)?;
        mu.validate()?;
        Ok(mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    One,
    PowerBeta,
    LogE,
    LogSq,
    BergmanPeak,
}

/// Input function: a series file or a test-family member.
#[derive(Debug, Args)]
pub struct InputArgs {
    /// Coefficient series as a JSON array of `[re, im]` pairs.
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Family parameter `a` in (0,1).
    #[arg(long, default_value_t = 0.5)]
    pub parameter: f64,
    /// Exponent of the `power-beta` family; defaults to `--beta`.
    #[arg(long)]
    pub family_beta: Option<f64>,
    /// Truncation order of family members.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    pub truncation: usize,
}

enum Input {
    Series(CoefficientSeries),
    Member(TestFamilyMember),
}

impl Input {
    fn series(&self) -> &CoefficientSeries {
        match self {
            Input::Series(s) => s,
            Input::Member(m) => &m.series,
        }
    }

    fn exact(&self) -> &dyn AnalyticFn {
        match self {
            Input::Series(s) => s,
            Input::Member(m) => m,
        }
    }
}

impl InputArgs {
    fn load(&self, beta: Option<f64>) -> Result<Input> {
        if let Some(path) = &self.input {
            return Ok(Input::Series(CoefficientSeries::from_json_pairs(&std::fs::read_to_string(path)?)?));
        }
        let family = match self.family.ok_or_else(|| Error::Domain("pass --input FILE or --family".into()))? {
            FamilyArg::One => Family::ConstantOne,
            FamilyArg::PowerBeta => {
                let beta = self
                    .family_beta
                    .or(beta)
                    .ok_or_else(|| Error::Domain("power-beta needs --family-beta or --beta".into()))?;
                Family::PowerBeta { beta }
            }
            FamilyArg::LogE => Family::LogE,
            FamilyArg::LogSq => Family::LogSq,
            FamilyArg::BergmanPeak => Family::BergmanPeak,
        };
        Ok(Input::Member(TestFamilyMember::new(family, self.parameter, self.truncation, 1.0)?))
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Radii `1 - 2^{-i}` for `i ≤ i_max`.
    #[arg(long, default_value_t = 10)]
    pub i_max: usize,
    #[arg(long, default_value_t = 1)]
    pub substeps: usize,
    #[arg(long, default_value_t = 256)]
    pub angles: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    Reproducing,
    Duality,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Matrix entries `μ_{n,k,α}` for `n ≤ N`, `k ≤ K`.
    Entries {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// `H f` from coefficients compared with `I f` on rings inside `|z| ≤ radius`.
    Apply {
        #[command(flatten)]
        measure: MeasureArgs,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        /// Output order `N_out`; defaults to the truncation.
        #[arg(long)]
        n_out: Option<usize>,
        #[arg(long, default_value_t = 0.9)]
        radius: f64,
        #[arg(long, default_value_t = 8)]
        angles: usize,
    },
    /// `I f(z)` at one point.
    Integral {
        #[command(flatten)]
        measure: MeasureArgs,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        z_re: f64,
        #[arg(long, default_value_t = 0.0)]
        z_im: f64,
    },
    /// Both sides of the area pairing at radius `r`, or its `r → 1` limit.
    Pairing {
        #[command(flatten)]
        measure: MeasureArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Second argument `g` as a JSON array of `[re, im]` pairs.
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0.8)]
        r: f64,
        #[arg(long, value_enum, default_value_t = WeightArg::Reproducing)]
        weight: WeightArg,
        /// Extrapolate the left side to `r → 1`.
        #[arg(long)]
        limit: bool,
    },
    /// Grid norms of an input function.
    Norms {
        #[command(flatten)]
        input: InputArgs,
        /// Bloch exponent.
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        /// Also compute the Bergman `A^1` norm.
        #[arg(long)]
        bergman: bool,
    },
    /// Carleson classification of a measure.
    Classify {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 0.0)]
        log_exponent: f64,
        /// Print the probe table instead of the report.
        #[arg(long)]
        csv: bool,
    },
    /// Run a theorem harness.
    Verify {
        /// One of T2.1, T2.2, T2.3, T3.1, T3.2, T3.3, T3.4, Qp.
        theorem_id: String,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long)]
        gamma: Option<f64>,
        /// Run the compactness proxy instead of the boundedness harness.
        #[arg(long)]
        compactness: bool,
        /// Skip the grid norm estimates.
        #[arg(long)]
        no_norms: bool,
    },
    /// `c_n(α) = Γ(n+α)/(Γ(α) n!)` for `n ≤ N`.
    GammaTable {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: usize,
    },
}

/// Rendered output and exit code.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn c_fields(z: Complex64) -> String {
    format!("{},{}", fmt17(z.re), fmt17(z.im))
}

#[derive(Serialize)]
struct PointValue {
    z: Complex64,
    value: Complex64,
}

#[derive(Serialize)]
struct PairingOutput {
    r: f64,
    lhs: Complex64,
    rhs: Complex64,
    gap: f64,
}

#[derive(Serialize)]
struct NormsOutput {
    alpha: f64,
    bloch_seminorm: f64,
    bloch_norm: f64,
    growth_bound: f64,
    dyadic_block_seminorm: Option<f64>,
    bergman_a1_norm: Option<f64>,
}

fn verify_outcome(report: &HarnessReport, format: Format) -> Result<Outcome> {
    let text = match format {
        Format::Json => json(report)?,
        Format::Csv => report.sweep_csv(),
    };
    Ok(Outcome { text, code: if report.consistent { EXIT_OK } else { EXIT_CONTRADICTION } })
}

/// Executes a parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let ok = |text: String| Ok(Outcome { text, code: EXIT_OK });
    match &cli.command {
        Command::Entries { measure, alpha, n, k } => {
            let spec = HankelEntrySpec::new(&measure.load()?, *alpha, *n, *k)?;
            let mut rows = Vec::with_capacity((n + 1) * (k + 1));
            for i in 0..=*n {
                for j in 0..=*k {
                    rows.push((i, j, spec.entry(i, j)?));
                }
            }
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut out = String::from("n,k,value\n");
                    for (i, j, v) in rows {
                        out.push_str(&format!("{i},{j},{}\n", fmt17(v)));
                    }
                    ok(out)
                }
                Format::Json => ok(json(&rows)?),
            }
        }
        Command::Apply { measure, input, alpha, beta, n_out, radius, angles } => {
            let mu = measure.load()?;
            let f = input.load(Some(*beta))?;
            let n_out = n_out.unwrap_or(input.truncation);
            let mut spec = HankelEntrySpec::new(&mu, *alpha, n_out, f.series().order() + 1)?;
            let opts = ApplyOptions { n_out, ..Default::default() };
            let points = equivalence_points(*radius, *angles);
            let report = equivalence_check(&mut spec, *beta, f.series(), f.exact(), &points, &opts)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut out = String::from("z_re,z_im,H_value_re,H_value_im,I_value_re,I_value_im,gap\n");
                    for p in &report.points {
                        out.push_str(&format!(
                            "{},{},{},{}\n",
                            c_fields(p.z),
                            c_fields(p.h_value),
                            c_fields(p.i_value),
                            fmt17(p.gap)
                        ));
                    }
                    ok(out)
                }
                Format::Json => ok(json(&report)?),
            }
        }
        Command::Integral { measure, input, alpha, beta, z_re, z_im } => {
            let mu = measure.load()?;
            let f = input.load(Some(*beta))?;
            let z = Complex64::new(*z_re, *z_im);
            let value = apply_i(&mu, *alpha, *beta, f.exact(), z)?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => ok(json(&PointValue { z, value })?),
                Format::Csv => ok(format!("z_re,z_im,I_value_re,I_value_im\n{},{}\n", c_fields(z), c_fields(value))),
            }
        }
        Command::Pairing { measure, input, g, alpha, beta, r, weight, limit } => {
            let mu = measure.load()?;
            let f = input.load(Some(*beta))?;
            let g = CoefficientSeries::from_json_pairs(&std::fs::read_to_string(g)?)?;
            let weight = match weight {
                WeightArg::Reproducing => PairingWeight::Reproducing,
                WeightArg::Duality => PairingWeight::Duality,
            };
            if *limit {
                let lim = pairing_limit(&mu, *alpha, *beta, f.exact(), &g, weight)?;
                return ok(json(&lim)?);
            }
            let lhs = pairing_lhs(&mu, *alpha, *beta, f.exact(), &g, *r, weight)?;
            let rhs = pairing_rhs(&mu, *beta, f.exact(), &g, *r)?;
            let row = PairingOutput { r: *r, lhs, rhs, gap: (lhs - rhs).norm() };
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => ok(json(&row)?),
                Format::Csv => ok(format!(
                    "r,lhs_re,lhs_im,rhs_re,rhs_im,gap\n{},{},{},{}\n",
                    fmt17(row.r),
                    c_fields(lhs),
                    c_fields(rhs),
                    fmt17(row.gap)
                )),
            }
        }
        Command::Norms { input, alpha, beta, grid, bergman } => {
            let f = input.load(*beta)?;
            let grid = DiskGrid::new(grid.i_max, grid.substeps, grid.angles)?;
            let s = f.series();
            let out = NormsOutput {
                alpha: *alpha,
                bloch_seminorm: bloch_seminorm(s, *alpha, &grid)?,
                bloch_norm: bloch_norm(s, *alpha, &grid)?,
                growth_bound: growth_bound_check(s, *alpha, &grid)?,
                dyadic_block_seminorm: dyadic_block_seminorm(s, *alpha).ok(),
                bergman_a1_norm: if *bergman { Some(bergman_a1_norm(s, &grid)?) } else { None },
            };
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => ok(json(&out)?),
                Format::Csv => {
                    let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
                    ok(format!(
                        "alpha,bloch_seminorm,bloch_norm,growth_bound,dyadic_block_seminorm,bergman_a1_norm\n{},{},{},{},{},{}\n",
                        fmt17(out.alpha),
                        fmt17(out.bloch_seminorm),
                        fmt17(out.bloch_norm),
                        fmt17(out.growth_bound),
                        opt(out.dyadic_block_seminorm),
                        opt(out.bergman_a1_norm)
                    ))
                }
            }
        }
        Command::Classify { measure, s, log_exponent, csv } => {
            let report = carleson_constant(&measure.load()?, *s, *log_exponent)?;
            if *csv || cli.format == Some(Format::Csv) {
                ok(report.probes_csv())
            } else {
                ok(json(&report)?)
            }
        }
        Command::Verify { theorem_id, measure, alpha, beta, gamma, compactness, no_norms } => {
            let id: TheoremId = theorem_id.parse()?;
            let mu = measure.load()?;
            let config = HarnessConfig { norm_estimates: !no_norms, ..Default::default() };
            let mut report = if *compactness {
                run_compactness_proxy(id, &mu, *alpha, *beta, &config)?
            } else {
                run_harness(id, &mu, *alpha, *beta, *gamma, &config)?
            };
            if cli.no_timing {
                report.runtime_ms = 0;
            }
            verify_outcome(&report, cli.format.unwrap_or(Format::Json))
        }
        Command::GammaTable { alpha, n } => {
            let table = GammaRatioTable::new(*alpha, *n)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => ok(table.to_csv()),
                Format::Json => ok(json(&table.as_slice())?),
            }
        }
    }
}

/// Parses `args`, runs the command and writes its output; returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let outcome = execute(&cli).and_then(|o| {
        match &cli.out {
            Some(path) => std::fs::write(path, &o.text)?,
            None => print!("{}", o.text),
        }
        Ok(o.code)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
