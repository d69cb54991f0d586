//! `frobkern` command line.
//!
//! [`dispatch`] parses an argument vector, runs one query and writes the
//! result to `out`. Diagnostics go to `err`. The returned value is the
//! process exit status:
//!
//! | status | meaning |
//! |---|---|
//! | 0 | success |
//! | 1 | internal error, engine disagreement, reference mismatch |
//! | 2 | usage error or invalid parameters |
//! | 3 | oracle refused (tuple estimate above threshold, rerun with `--force`) |

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use frobkern::bench::{self, BenchReport, Engine, TableSpec};
use frobkern::characters::{self, CharacterPoly};
use frobkern::counting::{Counter, SharedMemo};
use frobkern::oracle::Oracle;
use frobkern::reduced_ring::{self, ReducedBasis};
use frobkern::{CountParams, Error};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

pub const CONFIG_ENV: &str = "FROBKERN_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
    #[default]
    Plain,
}

/// Effective settings after merging the config file with the command line.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CliConfig {
    pub output_format: OutputFormat,
    pub oracle_force: bool,
    pub memo_shared: bool,
    pub config_file: Option<PathBuf>,
}

/// On-disk config. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    output_format: Option<OutputFormat>,
    oracle_force: Option<bool>,
    memo_shared: Option<bool>,
}

impl CliConfig {
    fn load(cli: &Cli, env_path: Option<PathBuf>) -> Result<Self, Failure> {
        let config_file = cli.config.clone().or(env_path);
        let file = match &config_file {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        Ok(Self {
            output_format: cli.output.or(file.output_format).unwrap_or_default(),
            oracle_force: cli.force || file.oracle_force.unwrap_or(false),
            memo_shared: cli.shared_memo || file.memo_shared.unwrap_or(false),
            config_file,
        })
    }

    fn counter(&self) -> Counter {
        if self.memo_shared {
            Counter::with_shared(SharedMemo::new())
        } else {
            Counter::new()
        }
    }

    fn oracle(&self) -> Oracle {
        Oracle { force: self.oracle_force }
    }
}

fn read_config(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
}

#[derive(Debug, Parser)]
#[command(name = "frobkern", version, about = "Cohomology multiplicities for Frobenius kernels of SL2")]
struct Cli {
    /// Output format [default: plain]
    #[arg(long, global = true, value_enum)]
    output: Option<OutputFormat>,

    /// Let the brute-force oracle run past its tuple threshold.
    #[arg(long, global = true)]
    force: bool,

    /// Share one memo table across the engine instances of this run.
    #[arg(long, global = true)]
    shared_memo: bool,

    /// JSON config file (overrides $FROBKERN_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multiplicity N_r(p, m, n).
    Count {
        p: u64,
        r: u32,
        m: u64,
        n: u64,
        /// Use the p = 2 equation (requires p = 2).
        #[arg(long)]
        p2: bool,
        /// Also run the brute-force oracle and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Quantum multiplicity N'_r(p, n).
    Quantum { p: u64, r: u32, n: u64 },
    /// Solutions of cohomological degree d.
    Graded { p: u64, r: u32, m: u64, n: u64, d: u64 },
    /// B_r character of mω, truncated at n ≤ NMAX.
    CharB {
        p: u64,
        r: u32,
        m: u64,
        #[arg(long)]
        nmax: u64,
    },
    /// G_r character of mω, truncated at n ≤ NMAX.
    CharG {
        p: u64,
        r: u32,
        m: u64,
        #[arg(long)]
        nmax: u64,
    },
    /// Poincaré series of the reduced cohomology ring up to degree DMAX.
    PoincareU {
        p: u64,
        r: u32,
        #[arg(long)]
        dmax: u64,
    },
    /// Free-module basis of the reduced ring.
    Basis { p: u64, r: u32 },
    /// Hilbert series coefficients up to degree DMAX.
    Hilbert {
        p: u64,
        r: u32,
        #[arg(long)]
        dmax: u64,
    },
    /// Regenerate a table of N_r(p, m, n).
    Bench {
        #[command(subcommand)]
        target: BenchTarget,
    },
    /// Compare the printed odd-case substitution against the oracle.
    Audit {
        #[arg(long, value_delimiter = ',', default_value = "3,5")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        r_max: u32,
        #[arg(long, default_value_t = 11)]
        max_odd: u64,
    },
}

#[derive(Debug, Subcommand)]
enum BenchTarget {
    /// p = 3, r = 2..5, n = 0, 2, ..., 10.
    Table1 {
        #[arg(long, value_delimiter = ',', value_parser = parse_engine, default_value = "fast")]
        engines: Vec<Engine>,
    },
    /// p = 5, r = 2..5, n = 0, 2, ..., 10.
    Table2 {
        #[arg(long, value_delimiter = ',', value_parser = parse_engine, default_value = "fast")]
        engines: Vec<Engine>,
    },
    /// Table described by a JSON spec file.
    Custom { spec: PathBuf },
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    match s {
        "fast" => Ok(Engine::Fast),
        "oracle" => Ok(Engine::Oracle),
        _ => Err(format!("unknown engine `{s}` (expected fast or oracle)")),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
    Mismatch(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn status(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(Error::OracleRefused { .. }) => EXIT_REFUSED,
            Failure::Core(
                Error::NotPrime(_)
                | Error::ZeroKernelIndex
                | Error::WrongCharacteristic { .. }
                | Error::TooLarge(_)
                | Error::InvalidTable(_)
                | Error::Parse(_),
            ) => EXIT_USAGE,
            Failure::Core(_) | Failure::Mismatch(_) | Failure::Io(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Mismatch(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
            Failure::Io(e) => format!("i/o error: {e}"),
        }
    }
}

/// Runs one command. `argv[0]` is the program name.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let env_path = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let result = CliConfig::load(&cli, env_path).and_then(|cfg| run(&cli.command, &cfg, out));
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.status()
        }
    }
}

fn run(command: &Command, cfg: &CliConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let fmt = cfg.output_format;
    match *command {
        Command::Count { p, r, m, n, p2, oracle } => {
            let params = CountParams::new(p, r, m, n)?;
            let mut counter = cfg.counter();
            let value = if p2 { counter.n_classical_p2(&params)? } else { counter.multiplicity(&params)? };
            if oracle {
                let brute = cfg.oracle().brute_count(&params)?;
                if brute != value {
                    return Err(Failure::Mismatch(format!(
                        "engines disagree at p={p} r={r} m={m} n={n}: fast {value}, oracle {brute}"
                    )));
                }
            }
            let res = ScalarOutput::new("count", p, r, Some(m), n, None, value.to_string());
            out.write_all(res.render(fmt).as_bytes())?;
        }
        Command::Quantum { p, r, n } => {
            let value = cfg.counter().n_quantum(p, r, n)?;
            let res = ScalarOutput::new("quantum", p, r, None, n, None, value.to_string());
            out.write_all(res.render(fmt).as_bytes())?;
        }
        Command::Graded { p, r, m, n, d } => {
            let params = CountParams::new(p, r, m, n)?;
            let value = cfg.counter().graded_count(&params, d)?;
            let res = ScalarOutput::new("graded", p, r, Some(m), n, Some(d), value.to_string());
            out.write_all(res.render(fmt).as_bytes())?;
        }
        Command::CharB { p, r, m, nmax } => {
            let ch = characters::char_br(p, r, m, nmax)?;
            out.write_all(render_character(&ch, fmt).as_bytes())?;
        }
        Command::CharG { p, r, m, nmax } => {
            let ch = characters::char_gr(p, r, m, nmax)?;
            out.write_all(render_character(&ch, fmt).as_bytes())?;
        }
        Command::PoincareU { p, r, dmax } => {
            let coeffs = characters::poincare_ur(p, r, dmax)?;
            let res = SeriesOutput::new("poincare-u", p, r, coeffs.iter().map(|c| c.to_string()));
            out.write_all(res.render(fmt).as_bytes())?;
        }
        Command::Hilbert { p, r, dmax } => {
            let coeffs = reduced_ring::hilbert_coeffs(p, r, dmax)?;
            let res = SeriesOutput::new("hilbert", p, r, coeffs.iter().map(|c| c.to_string()));
            out.write_all(res.render(fmt).as_bytes())?;
        }
        Command::Basis { p, r } => {
            let basis = reduced_ring::basis(p, r)?;
            out.write_all(render_basis(&basis, fmt).as_bytes())?;
        }
        Command::Bench { ref target } => {
            let spec = match target {
                BenchTarget::Table1 { engines } => TableSpec::table1().with_engines(engines),
                BenchTarget::Table2 { engines } => TableSpec::table2().with_engines(engines),
                BenchTarget::Custom { spec } => {
                    let text = std::fs::read_to_string(spec).map_err(|e| {
                        Failure::Usage(format!("cannot read spec {}: {e}", spec.display()))
                    })?;
                    TableSpec::from_json(&text)?
                }
            };
            let spec = TableSpec { force_oracle: spec.force_oracle || cfg.oracle_force, ..spec };
            let report = bench::run_table(&spec)?;
            out.write_all(render_report(&report, fmt).as_bytes())?;
            check_report(&report)?;
        }
        Command::Audit { ref primes, r_max, max_odd } => {
            let audit = bench::odd_branch_audit(primes, r_max, max_odd)?;
            let text = match fmt {
                OutputFormat::Json => json_line(&audit),
                OutputFormat::Csv => {
                    let mut s = String::from("p,r,m,n,printed,normative,oracle\n");
                    for row in &audit.rows {
                        let (p, r, m, n) = (row.params.p(), row.params.r(), row.params.m(), row.params.n());
                        let _ = writeln!(s, "{p},{r},{m},{n},{},{},{}", row.printed, row.normative, row.oracle);
                    }
                    s
                }
                OutputFormat::Markdown => audit.to_markdown(),
                OutputFormat::Plain => format!("{}\n", audit.summary()),
            };
            out.write_all(text.as_bytes())?;
            if audit.normative_agreements() != audit.rows.len() {
                return Err(Failure::Mismatch("normative count disagrees with the oracle".into()));
            }
        }
    }
    Ok(())
}

fn check_report(report: &BenchReport) -> Result<(), Failure> {
    if !report.passed() {
        let d = &report.divergences[0];
        return Err(Failure::Mismatch(format!(
            "{} divergence(s); first at r={} n={}: fast {}, oracle {}",
            report.divergences.len(),
            d.r,
            d.n,
            d.fast,
            d.oracle
        )));
    }
    if let Some(bad) = report.reference_mismatches() {
        if let Some((r, n, expected, got)) = bad.first() {
            return Err(Failure::Mismatch(format!(
                "{} reference mismatch(es); first at r={r} n={n}: expected {expected}, got {got}",
                bad.len()
            )));
        }
    }
    Ok(())
}

fn json_line<T: Serialize>(value: &T) -> String {
    format!("{}\n", serde_json::to_string(value).expect("serializable output"))
}

fn markdown_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = format!("| {} |\n", header.join(" | "));
    let _ = writeln!(s, "|{}", "---|".repeat(header.len()));
    for row in rows {
        let _ = writeln!(s, "| {} |", row.join(" | "));
    }
    s
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = format!("{}\n", header.join(","));
    for row in rows {
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

/// Result of a single-number query. `value` is an exact decimal string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarOutput {
    pub query: String,
    pub p: u64,
    pub r: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    pub value: String,
}

impl ScalarOutput {
    fn new(query: &str, p: u64, r: u32, m: Option<u64>, n: u64, d: Option<u64>, value: String) -> Self {
        Self { query: query.into(), p, r, m, n, d, value }
    }

    fn columns(&self) -> (Vec<&'static str>, Vec<String>) {
        let mut header = vec!["p", "r"];
        let mut row = vec![self.p.to_string(), self.r.to_string()];
        if let Some(m) = self.m {
            header.push("m");
            row.push(m.to_string());
        }
        header.push("n");
        row.push(self.n.to_string());
        if let Some(d) = self.d {
            header.push("d");
            row.push(d.to_string());
        }
        header.push("value");
        row.push(self.value.clone());
        (header, row)
    }

    fn render(&self, fmt: OutputFormat) -> String {
        match fmt {
            OutputFormat::Plain => format!("{}\n", self.value),
            OutputFormat::Json => json_line(self),
            OutputFormat::Csv => {
                let (h, row) = self.columns();
                csv_table(&h, &[row])
            }
            OutputFormat::Markdown => {
                let (h, row) = self.columns();
                markdown_table(&h, &[row])
            }
        }
    }
}

/// Coefficients of a power series, index = degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesOutput {
    pub query: String,
    pub p: u64,
    pub r: u32,
    pub coeffs: Vec<String>,
}

impl SeriesOutput {
    fn new(query: &str, p: u64, r: u32, coeffs: impl Iterator<Item = String>) -> Self {
        Self { query: query.into(), p, r, coeffs: coeffs.collect() }
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.coeffs.iter().enumerate().map(|(d, c)| vec![d.to_string(), c.clone()]).collect()
    }

    fn render(&self, fmt: OutputFormat) -> String {
        match fmt {
            OutputFormat::Plain => format!("{}\n", self.coeffs.join(" ")),
            OutputFormat::Json => json_line(self),
            OutputFormat::Csv => csv_table(&["degree", "coeff"], &self.rows()),
            OutputFormat::Markdown => markdown_table(&["degree", "coeff"], &self.rows()),
        }
    }
}

fn render_character(ch: &CharacterPoly, fmt: OutputFormat) -> String {
    let rows: Vec<Vec<String>> = ch.iter().map(|(w, c)| vec![w.to_string(), c.to_string()]).collect();
    match fmt {
        OutputFormat::Plain => format!("{ch}\n"),
        OutputFormat::Json => format!("{}\n", ch.to_json()),
        OutputFormat::Csv => csv_table(&["weight", "coeff"], &rows),
        OutputFormat::Markdown => markdown_table(&["weight", "coeff"], &rows),
    }
}

fn monomial(exps: &[u64]) -> String {
    let factors: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
        .collect();
    if factors.is_empty() {
        "1".into()
    } else {
        factors.join("*")
    }
}

fn render_basis(basis: &ReducedBasis, fmt: OutputFormat) -> String {
    let width = basis.elements.first().map_or(0, Vec::len);
    let mut header: Vec<String> = (1..=width).map(|i| format!("s{i}")).collect();
    header.push("degree".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = basis
        .elements
        .iter()
        .map(|e| {
            let mut row: Vec<String> = e.iter().map(u64::to_string).collect();
            row.push(basis.degree(e).to_string());
            row
        })
        .collect();
    match fmt {
        OutputFormat::Plain => basis.elements.iter().map(|e| monomial(e) + "\n").collect(),
        OutputFormat::Json => format!("{}\n", basis.to_json()),
        OutputFormat::Csv => csv_table(&header, &rows),
        OutputFormat::Markdown => markdown_table(&header, &rows),
    }
}

fn render_report(report: &BenchReport, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Plain | OutputFormat::Markdown => report.to_markdown(),
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => format!("{}\n", report.to_json()),
    }
}
