//! Table reproduction and fast-engine vs oracle comparison.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::time::Instant;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::counting::Counter;
use crate::oracle::{estimate_tuples, Oracle, FORCE_THRESHOLD};
use crate::{decimal, is_prime, CountParams, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Memoized digit recursion.
    Fast,
    /// Brute-force enumeration.
    Oracle,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Fast => "fast",
            Engine::Oracle => "oracle",
        }
    }
}

/// Reference values `N_r(3, 0, n)` for `r = 2..=5`, `n = 0, 2, ..., 10`.
pub const REFERENCE_P3: [[u64; 6]; 4] = [
    [1, 3, 5, 7, 9, 11],
    [1, 13, 37, 73, 121, 181],
    [1, 111, 545, 1519, 3249, 5951],
    [1, 2065, 17857, 70705, 195601, 439201],
];

/// Reference values `N_r(5, 0, n)` for `r = 2..=5`, `n = 0, 2, ..., 10`.
pub const REFERENCE_P5: [[u64; 6]; 4] = [
    [1, 3, 5, 7, 9, 11],
    [1, 21, 61, 121, 201, 301],
    [1, 503, 2505, 7007, 15009, 27511],
    [1, 42521, 377561, 1505121, 4175201, 9387801],
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSpec {
    pub p: u64,
    pub r_range: RangeInclusive<u32>,
    pub n_values: Vec<u64>,
    #[serde(default)]
    pub m: u64,
    pub engines: Vec<Engine>,
    /// Let the oracle run past its tuple threshold.
    #[serde(default)]
    pub force_oracle: bool,
}

impl TableSpec {
    fn reference_layout(p: u64) -> Self {
        Self {
            p,
            r_range: 2..=5,
            n_values: (0..=10).step_by(2).collect(),
            m: 0,
            engines: vec![Engine::Fast],
            force_oracle: false,
        }
    }

    /// `p = 3`, `r = 2..=5`, `n = 0, 2, ..., 10`, `m = 0`.
    pub fn table1() -> Self {
        Self::reference_layout(3)
    }

    /// As [`TableSpec::table1`] with `p = 5`.
    pub fn table2() -> Self {
        Self::reference_layout(5)
    }

    pub fn with_engines(mut self, engines: &[Engine]) -> Self {
        self.engines = engines.to_vec();
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::NotPrime(self.p));
        }
        if self.r_range.is_empty() || *self.r_range.start() == 0 {
            return Err(Error::InvalidTable(format!(
                "r range {:?} must be nonempty and start at 1 or more",
                self.r_range
            )));
        }
        if self.n_values.is_empty() {
            return Err(Error::InvalidTable("no n values".into()));
        }
        if self.engines.is_empty() {
            return Err(Error::InvalidTable("no engines".into()));
        }
        Ok(())
    }

    /// Built-in reference values for this layout, if any.
    pub fn reference(&self) -> Option<&'static [[u64; 6]; 4]> {
        let layout = Self::reference_layout(self.p);
        if self.r_range != layout.r_range || self.n_values != layout.n_values || self.m != 0 {
            return None;
        }
        match self.p {
            3 => Some(&REFERENCE_P3),
            5 => Some(&REFERENCE_P5),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub r: u32,
    pub n: u64,
    #[serde(with = "decimal")]
    pub value: BigUint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub engine: Engine,
    pub r: u32,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub r: u32,
    pub n: u64,
    #[serde(with = "decimal")]
    pub fast: BigUint,
    #[serde(with = "decimal")]
    pub oracle: BigUint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub spec: TableSpec,
    /// One value per `(r, n)`, row-major.
    pub cells: Vec<Cell>,
    pub timings: Vec<Timing>,
    pub divergences: Vec<Divergence>,
    pub environment: String,
    pub note: String,
}

impl BenchReport {
    pub fn passed(&self) -> bool {
        self.divergences.is_empty()
    }

    pub fn cell(&self, r: u32, n: u64) -> Option<&BigUint> {
        self.cells.iter().find(|c| c.r == r && c.n == n).map(|c| &c.value)
    }

    pub fn timing(&self, engine: Engine, r: u32) -> Option<f64> {
        self.timings
            .iter()
            .find(|t| t.engine == engine && t.r == r)
            .map(|t| t.seconds)
    }

    pub fn total_seconds(&self, engine: Engine) -> f64 {
        self.timings
            .iter()
            .filter(|t| t.engine == engine)
            .map(|t| t.seconds)
            .sum()
    }

    /// Cells differing from the built-in reference values, as
    /// `(r, n, expected, got)`.
    pub fn reference_mismatches(&self) -> Option<Vec<(u32, u64, u64, BigUint)>> {
        let table = self.spec.reference()?;
        let mut bad = Vec::new();
        for (row, r) in table.iter().zip(self.spec.r_range.clone()) {
            for (&expected, &n) in row.iter().zip(&self.spec.n_values) {
                let got = self.cell(r, n).cloned().unwrap_or_default();
                if got != BigUint::from(expected) {
                    bad.push((r, n, expected, got));
                }
            }
        }
        Some(bad)
    }

    pub fn status(&self) -> &'static str {
        if self.passed() {
            "PASSED"
        } else {
            "FAILED"
        }
    }

    /// One row per `r`, one column per `n`, then a seconds column per engine.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "p = {}, m = {} ({}; {})\n",
            self.spec.p,
            self.spec.m,
            self.status(),
            self.note
        );
        s.push_str("| r \\ n |");
        for n in &self.spec.n_values {
            let _ = write!(s, " {n} |");
        }
        for e in &self.spec.engines {
            let _ = write!(s, " {} (s) |", e.name());
        }
        s.push('\n');
        s.push_str("|---|");
        for _ in 0..self.spec.n_values.len() + self.spec.engines.len() {
            s.push_str("---|");
        }
        s.push('\n');
        for r in self.spec.r_range.clone() {
            let _ = write!(s, "| {r} |");
            for &n in &self.spec.n_values {
                let v = self.cell(r, n).map(|v| v.to_string()).unwrap_or_default();
                let _ = write!(s, " {v} |");
            }
            for &e in &self.spec.engines {
                let t = self.timing(e, r).map(|t| format!("{t:.3}")).unwrap_or_default();
                let _ = write!(s, " {t} |");
            }
            s.push('\n');
        }
        for d in &self.divergences {
            let _ = writeln!(
                s,
                "\nDIVERGENCE r={} n={}: fast={} oracle={}",
                d.r, d.n, d.fast, d.oracle
            );
        }
        let _ = write!(s, "\n_{}_\n", self.environment);
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("r");
        for n in &self.spec.n_values {
            let _ = write!(s, ",n={n}");
        }
        for e in &self.spec.engines {
            let _ = write!(s, ",{}_seconds", e.name());
        }
        s.push('\n');
        for r in self.spec.r_range.clone() {
            let _ = write!(s, "{r}");
            for &n in &self.spec.n_values {
                let v = self.cell(r, n).map(|v| v.to_string()).unwrap_or_default();
                let _ = write!(s, ",{v}");
            }
            for &e in &self.spec.engines {
                let t = self.timing(e, r).map(|t| format!("{t:.6}")).unwrap_or_default();
                let _ = write!(s, ",{t}");
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn environment() -> String {
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    format!(
        "{}-{}, {} hardware threads, single-threaded timing",
        std::env::consts::OS,
        std::env::consts::ARCH,
        threads
    )
}

/// Computes every cell with every requested engine, timing whole rows.
///
/// Oracle rows whose expected size crosses the oracle threshold are refused
/// before any work starts unless `force_oracle` is set.
pub fn run_table(spec: &TableSpec) -> Result<BenchReport> {
    spec.validate()?;
    let oracle = Oracle {
        force: spec.force_oracle,
    };
    let use_fast = spec.engines.contains(&Engine::Fast);
    let use_oracle = spec.engines.contains(&Engine::Oracle);

    if use_oracle && !oracle.force {
        for r in spec.r_range.clone() {
            for &n in &spec.n_values {
                let est = estimate_tuples(&CountParams::new(spec.p, r, spec.m, n)?);
                if est > FORCE_THRESHOLD as f64 {
                    return Err(Error::OracleRefused {
                        estimated: est as u64,
                        threshold: FORCE_THRESHOLD,
                    });
                }
            }
        }
    }

    let mut cells = Vec::new();
    let mut timings = Vec::new();
    let mut divergences = Vec::new();
    for r in spec.r_range.clone() {
        let params: Vec<CountParams> = spec
            .n_values
            .iter()
            .map(|&n| CountParams::new(spec.p, r, spec.m, n))
            .collect::<Result<_>>()?;

        let fast = if use_fast {
            let start = Instant::now();
            let row = params
                .iter()
                .map(|pr| Counter::new().multiplicity(pr))
                .collect::<Result<Vec<_>>>()?;
            timings.push(Timing {
                engine: Engine::Fast,
                r,
                seconds: start.elapsed().as_secs_f64(),
            });
            Some(row)
        } else {
            None
        };

        let brute = if use_oracle {
            let start = Instant::now();
            let row = params
                .iter()
                .map(|pr| oracle.brute_count(pr))
                .collect::<Result<Vec<_>>>()?;
            timings.push(Timing {
                engine: Engine::Oracle,
                r,
                seconds: start.elapsed().as_secs_f64(),
            });
            Some(row)
        } else {
            None
        };

        for (i, &n) in spec.n_values.iter().enumerate() {
            if let (Some(f), Some(o)) = (&fast, &brute) {
                if f[i] != o[i] {
                    divergences.push(Divergence {
                        r,
                        n,
                        fast: f[i].clone(),
                        oracle: o[i].clone(),
                    });
                }
            }
            let value = fast
                .as_ref()
                .or(brute.as_ref())
                .map(|row| row[i].clone())
                .expect("at least one engine ran");
            cells.push(Cell { r, n, value });
        }
    }
    Ok(BenchReport {
        spec: spec.clone(),
        cells,
        timings,
        divergences,
        environment: environment(),
        note: "timings cover the whole n-sweep of each row at fixed m".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRow {
    pub params: CountParams,
    #[serde(with = "decimal")]
    pub printed: BigUint,
    #[serde(with = "decimal")]
    pub normative: BigUint,
    #[serde(with = "decimal")]
    pub oracle: BigUint,
}

/// Comparison of the printed odd-weight substitution with the doubled
/// equation (normative) and the oracle, over odd `m, n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddBranchAudit {
    pub rows: Vec<AuditRow>,
}

impl OddBranchAudit {
    pub fn printed_agreements(&self) -> usize {
        self.rows.iter().filter(|r| r.printed == r.oracle).count()
    }

    pub fn normative_agreements(&self) -> usize {
        self.rows.iter().filter(|r| r.normative == r.oracle).count()
    }

    pub fn summary(&self) -> String {
        let total = self.rows.len();
        let printed = self.printed_agreements();
        let verdict = if printed == total {
            "the printed substitution agrees everywhere".to_string()
        } else {
            format!(
                "the printed substitution diverges on {} of {total} cases; the doubled equation is normative",
                total - printed
            )
        };
        format!(
            "odd-branch audit: {total} cases, printed substitution matches the oracle {printed} times, \
             doubled equation matches {} times; {verdict}",
            self.normative_agreements()
        )
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("{}\n\n| p | r | m | n | printed | doubled | oracle |\n|---|---|---|---|---|---|---|\n", self.summary());
        for row in &self.rows {
            let pr = &row.params;
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} |",
                pr.p(),
                pr.r(),
                pr.m(),
                pr.n(),
                row.printed,
                row.normative,
                row.oracle
            );
        }
        s
    }
}

pub fn odd_branch_audit(primes: &[u64], r_max: u32, max_odd: u64) -> Result<OddBranchAudit> {
    let oracle = Oracle::default();
    let mut rows = Vec::new();
    let mut counter = Counter::new();
    for &p in primes {
        for r in 1..=r_max {
            for m in (1..=max_odd).step_by(2) {
                for n in (1..=max_odd).step_by(2) {
                    let params = CountParams::new(p, r, m, n)?;
                    rows.push(AuditRow {
                        params,
                        printed: counter.printed_odd_branch(&params)?,
                        normative: counter.n_classical(&params)?,
                        oracle: oracle.brute_count(&params)?,
                    });
                }
            }
        }
    }
    Ok(OddBranchAudit { rows })
}
