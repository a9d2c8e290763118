//! Suite runner, report I/O and aggregation, remark probes and the
//! quadrature identity check.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::time::Instant;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{evaluate, InequalityCase, MarginReport};
use crate::error::{Error, Result};
use crate::means::{self, OperatorPair};
use crate::sampler::{self, trial_seed, Sampler, DEFAULT_SANDWICH, DEFAULT_SPECTRUM};
use crate::scalar::{RemarkId, REMARK_TOL};
use crate::spd::{norm2, ORDER_TOL};

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_DIMS: [usize; 6] = [1, 2, 3, 4, 6, 8];
pub const DEFAULT_SEED: u64 = 42;

/// Settings shared by every case of a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub trials: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub order_tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            dims: DEFAULT_DIMS.to_vec(),
            seed: DEFAULT_SEED,
            order_tol: ORDER_TOL,
        }
    }
}

impl SuiteConfig {
    /// Dimension and seed of trial `i`.
    pub fn trial(&self, i: usize) -> (usize, u64) {
        (
            self.dims[i % self.dims.len()],
            trial_seed(self.seed, i as u64),
        )
    }

    fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidInput(
                "dims must be a non-empty list of positive sizes".into(),
            ));
        }
        Ok(())
    }
}

/// Per-case summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub case_id: String,
    pub trials: usize,
    pub failures: usize,
    /// Smallest `margin / scale` seen.
    pub worst_margin: f64,
    /// Trial seed of the worst margin; replay with `--trials 1 --seed`.
    pub worst_seed: u64,
    /// Dimension of the worst trial.
    pub worst_n: usize,
    pub elapsed_ms: u64,
}

/// One sampled and evaluated trial.
pub fn run_trial(
    case: &InequalityCase,
    n: usize,
    seed: u64,
    order_tol: f64,
) -> Result<MarginReport> {
    let trial = sampler::sample_case(case, n, seed)?;
    let mut report = evaluate(case, &trial.pair, &trial.params, order_tol)?;
    report.seed = seed;
    Ok(report)
}

/// Runs every trial of one case, in parallel when the `parallel` feature
/// is on. Reports come back in trial order.
pub fn run_case(
    case: &InequalityCase,
    cfg: &SuiteConfig,
) -> Result<(SuiteResult, Vec<MarginReport>)> {
    cfg.validate()?;
    let start = Instant::now();
    let one = |i: usize| {
        let (n, seed) = cfg.trial(i);
        run_trial(case, n, seed, cfg.order_tol)
    };
    #[cfg(feature = "parallel")]
    let reports: Vec<MarginReport> = (0..cfg.trials)
        .into_par_iter()
        .map(one)
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let reports: Vec<MarginReport> = (0..cfg.trials).map(one).collect::<Result<_>>()?;
    let mut result = summarize_case(&case.id, &reports);
    result.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok((result, reports))
}

/// Runs each case in turn, streaming reports as JSON lines to `sink`.
pub fn run_suite(
    cases: &[InequalityCase],
    cfg: &SuiteConfig,
    mut sink: Option<&mut dyn Write>,
) -> Result<Vec<SuiteResult>> {
    let mut out = Vec::with_capacity(cases.len());
    for case in cases {
        let (result, reports) = run_case(case, cfg)?;
        if let Some(w) = sink.as_deref_mut() {
            write_jsonl(&reports, w)?;
        }
        out.push(result);
    }
    Ok(out)
}

fn summarize_case(case_id: &str, reports: &[MarginReport]) -> SuiteResult {
    let mut s = SuiteResult {
        case_id: case_id.to_string(),
        trials: 0,
        failures: 0,
        worst_margin: f64::INFINITY,
        worst_seed: 0,
        worst_n: 0,
        elapsed_ms: 0,
    };
    for r in reports {
        absorb(&mut s, r);
    }
    s
}

fn absorb(s: &mut SuiteResult, r: &MarginReport) {
    s.trials += 1;
    s.failures += usize::from(!r.holds);
    let m = r.normalized();
    // Ties go to the smaller seed so the result is order-independent.
    let worse = m < s.worst_margin || (m == s.worst_margin && r.seed < s.worst_seed);
    if worse || m.is_nan() {
        s.worst_margin = m;
        s.worst_seed = r.seed;
        s.worst_n = r.n;
    }
}

/// Per-case aggregation of any collection of reports, sorted by case id.
pub fn summarize(reports: &[MarginReport]) -> Vec<SuiteResult> {
    let mut by_case: BTreeMap<&str, SuiteResult> = BTreeMap::new();
    for r in reports {
        let entry = by_case
            .entry(r.case_id.as_str())
            .or_insert_with(|| summarize_case(&r.case_id, &[]));
        absorb(entry, r);
    }
    by_case.into_values().collect()
}

/// Whole-run summary written next to the report lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: Vec<SuiteResult>,
    pub trials: usize,
    pub failures: usize,
    pub passed: bool,
}

impl Summary {
    pub fn new(cases: Vec<SuiteResult>) -> Self {
        let trials = cases.iter().map(|c| c.trials).sum();
        let failures = cases.iter().map(|c| c.failures).sum();
        Self {
            cases,
            trials,
            failures,
            passed: failures == 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    /// Fixed-width table for terminals.
    pub fn table(&self) -> String {
        let mut s = format!(
            "{:<16} {:>7} {:>8} {:>13} {:>20} {:>4}\n",
            "case", "trials", "failures", "worst_margin", "worst_seed", "n"
        );
        for c in &self.cases {
            s.push_str(&format!(
                "{:<16} {:>7} {:>8} {:>13.3e} {:>20} {:>4}\n",
                c.case_id, c.trials, c.failures, c.worst_margin, c.worst_seed, c.worst_n
            ));
        }
        s.push_str(&format!(
            "total: {} trials, {} failures\n",
            self.trials, self.failures
        ));
        s
    }
}

pub fn write_jsonl(reports: &[MarginReport], w: &mut dyn Write) -> Result<()> {
    for r in reports {
        let line = serde_json::to_string(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Reads JSON-lines reports. Blank lines are skipped; a malformed line is
/// a parse error carrying its 1-based line number.
pub fn read_jsonl(r: impl BufRead) -> Result<Vec<MarginReport>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rep = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(rep);
    }
    Ok(out)
}

/// A recomputed spot value against its pinned value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub remark: String,
    pub label: String,
    pub computed: f64,
    pub expected: f64,
    pub pass: bool,
}

pub fn probe_remark(id: RemarkId) -> Result<Vec<ProbeOutcome>> {
    id.pinned()
        .iter()
        .map(|pv| {
            let computed = pv.compute()?;
            Ok(ProbeOutcome {
                remark: id.name().to_string(),
                label: pv.label.to_string(),
                computed,
                expected: pv.expected,
                pass: (computed - pv.expected).abs() <= REMARK_TOL,
            })
        })
        .collect()
}

/// Settings for the quadrature identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralConfig {
    pub trials: usize,
    pub p_grid: Vec<f64>,
    pub nodes: usize,
    pub tol: f64,
    pub seed: u64,
    pub dims: Vec<usize>,
}

impl Default for IntegralConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            p_grid: vec![-1.0, -0.5, -0.1, 0.1, 0.5, 1.0],
            nodes: means::DEFAULT_NODES,
            tol: 1e-8,
            seed: DEFAULT_SEED,
            dims: DEFAULT_DIMS.to_vec(),
        }
    }
}

/// Residual of the quadrature form of `T_p` against the closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralRow {
    pub seed: u64,
    pub n: usize,
    pub p: f64,
    pub nodes: usize,
    pub residual: f64,
    pub scale: f64,
    pub pass: bool,
}

/// `‖Σ wᵢ S_{p tᵢ} − T_p‖₂` with `scale = max(1, ‖T_p‖₂)`.
pub fn integral_residual(pair: &OperatorPair, p: f64, nodes: usize) -> Result<(f64, f64)> {
    let quad = means::quadrature_tsallis(pair, p, nodes)?;
    let exact = means::tsallis_entropy(pair, p)?;
    let residual = norm2(&(&quad - &exact))?;
    Ok((residual, norm2(&exact)?.max(1.0)))
}

pub fn run_integral(cfg: &IntegralConfig) -> Result<Vec<IntegralRow>> {
    if let Some(&p) = cfg.p_grid.iter().find(|p| !(p.abs() <= 1.0 && **p != 0.0)) {
        return Err(Error::InvalidWeight {
            value: p,
            range: "[-1, 1] \\ {0}",
        });
    }
    if cfg.dims.is_empty() || cfg.dims.contains(&0) {
        return Err(Error::InvalidInput(
            "dims must be a non-empty list of positive sizes".into(),
        ));
    }
    let mut rows = Vec::with_capacity(cfg.trials * cfg.p_grid.len());
    for i in 0..cfg.trials {
        let n = cfg.dims[i % cfg.dims.len()];
        let seed = trial_seed(cfg.seed, i as u64);
        let pair = Sampler::new(seed).sandwich_pair(n, DEFAULT_SPECTRUM, DEFAULT_SANDWICH)?;
        for &p in &cfg.p_grid {
            let (residual, scale) = integral_residual(&pair, p, cfg.nodes)?;
            rows.push(IntegralRow {
                seed,
                n,
                p,
                nodes: cfg.nodes,
                residual,
                scale,
                pass: residual <= cfg.tol * scale,
            });
        }
    }
    Ok(rows)
}
