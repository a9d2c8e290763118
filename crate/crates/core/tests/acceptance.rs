//! Acceptance criteria A1–A8, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use opineq::catalog::catalog_with_duals;
use opineq::harness::{self, IntegralConfig, SuiteConfig, Summary};
use opineq::means::{self, OperatorPair};
use opineq::sampler::{Sampler, DEFAULT_SANDWICH, DEFAULT_SPECTRUM};
use opineq::scalar::{
    default_grid, log_space, pair_grid, sign_table, verify_scalar_chain, ChainId, RemarkId,
    SignRegion,
};
use opineq::spd::norm2;
use opineq::Matrix;

const DIMS: [usize; 6] = [1, 2, 3, 4, 6, 8];

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn remark(id: &'static str, r: RemarkId) -> Line {
    let outcomes = harness::probe_remark(r).expect("remark probe");
    let detail = outcomes
        .iter()
        .map(|o| format!("{}: {:.7} vs {}", o.label, o.computed, o.expected))
        .collect::<Vec<_>>()
        .join("; ");
    Line {
        id,
        pass: outcomes.iter().all(|o| o.pass),
        detail,
    }
}

fn a4() -> Line {
    let cases = catalog_with_duals();
    let cfg = SuiteConfig::default();
    let summary = Summary::new(harness::run_suite(&cases, &cfg, None).expect("suite run"));
    let worst = summary
        .cases
        .iter()
        .min_by(|a, b| a.worst_margin.total_cmp(&b.worst_margin))
        .expect("non-empty catalog");
    let failing: Vec<&str> = summary
        .cases
        .iter()
        .filter(|c| c.failures > 0)
        .map(|c| c.case_id.as_str())
        .collect();
    Line {
        id: "A4",
        pass: summary.passed,
        detail: format!(
            "{} cases, {} trials, {} failures {:?}; worst normalized margin {:.3e} ({})",
            summary.cases.len(),
            summary.trials,
            summary.failures,
            failing,
            worst.worst_margin,
            worst.case_id
        ),
    }
}

type Op = (
    &'static str,
    fn(&OperatorPair, f64) -> Matrix,
    fn(f64, f64, f64) -> f64,
    [f64; 2],
);

/// Eigenwise scalar formulas for each operation, with its weight range.
fn operations() -> Vec<Op> {
    vec![
        (
            "arith",
            |pr, p| means::arithmetic_mean(pr, p).unwrap().into_matrix(),
            |a, b, p| (1.0 - p) * a + p * b,
            [0.0, 1.0],
        ),
        (
            "harm",
            |pr, p| means::harmonic_mean(pr, p).unwrap().into_matrix(),
            |a, b, p| 1.0 / ((1.0 - p) / a + p / b),
            [0.0, 1.0],
        ),
        (
            "geom",
            |pr, p| means::geometric_mean(pr, p).unwrap().into_matrix(),
            |a, b, p| a.powf(1.0 - p) * b.powf(p),
            [0.0, 1.0],
        ),
        (
            "natural",
            |pr, p| means::natural_power_mean(pr, p).unwrap().into_matrix(),
            |a, b, p| a.powf(1.0 - p) * b.powf(p),
            [-2.0, 2.0],
        ),
        (
            "rel_entropy",
            |pr, _| means::relative_operator_entropy(pr).unwrap(),
            |a, b, _| a * (b / a).ln(),
            [0.0, 0.0],
        ),
        (
            "gen_entropy",
            |pr, p| means::generalized_entropy(pr, p).unwrap(),
            |a, b, p| a.powf(1.0 - p) * b.powf(p) * (b / a).ln(),
            [-1.0, 1.0],
        ),
        (
            "tsallis",
            |pr, p| means::tsallis_entropy(pr, p).unwrap(),
            |a, b, p| (a.powf(1.0 - p) * b.powf(p) - a) / p,
            [-1.0, 1.0],
        ),
        (
            "log_squared",
            |pr, _| means::log_squared(pr).unwrap(),
            |a, b, _| a * (b / a).ln().powi(2),
            [0.0, 0.0],
        ),
    ]
}

fn a5() -> Line {
    let mut worst: (f64, &str) = (0.0, "");
    for (name, op, oracle, [lo, hi]) in operations() {
        for i in 0..500u64 {
            let n = DIMS[i as usize % DIMS.len()];
            let mut s = Sampler::new(0xA5 ^ i);
            let cp = s.commuting_pair(n, DEFAULT_SPECTRUM, [0.5, 2.0]).unwrap();
            let mut p = s.uniform(lo, hi);
            if name == "tsallis" && p.abs() < 1e-3 {
                p = 0.5;
            }
            let r = op(&cp.pair, p);
            let q = &cp.basis;
            let d = q.transpose().matmul(&r).unwrap().matmul(q).unwrap();
            for a in 0..n {
                for b in 0..n {
                    let want = if a == b {
                        oracle(cp.a_eigs[a], cp.b_eigs[a], p)
                    } else {
                        0.0
                    };
                    let err = (d[(a, b)] - want).abs();
                    if err > worst.0 {
                        worst = (err, name);
                    }
                }
            }
        }
    }
    Line {
        id: "A5",
        pass: worst.0 <= 1e-12,
        detail: format!(
            "8 operations x 500 commuting pairs; max eigenwise error {:.2e} ({})",
            worst.0, worst.1
        ),
    }
}

fn a6() -> Line {
    let rows = harness::run_integral(&IntegralConfig::default()).expect("integral run");
    let worst = rows
        .iter()
        .map(|r| r.residual / r.scale)
        .fold(0.0, f64::max);
    Line {
        id: "A6",
        pass: rows.iter().all(|r| r.pass),
        detail: format!(
            "{} (pair, p) checks with 32 nodes; max residual/scale {:.2e}",
            rows.len(),
            worst
        ),
    }
}

fn a7() -> Line {
    let ps = [1e-2, 1e-3, 1e-4];
    let mut worst_ratio: f64 = 1.0;
    let mut monotone = true;
    for i in 0..100u64 {
        let n = DIMS[i as usize % DIMS.len()];
        let pair = Sampler::new(0xA7 ^ i)
            .sandwich_pair(n, DEFAULT_SPECTRUM, DEFAULT_SANDWICH)
            .unwrap();
        let s = means::relative_operator_entropy(&pair).unwrap();
        let gaps: Vec<f64> = ps
            .iter()
            .map(|&p| norm2(&(&means::tsallis_entropy(&pair, p).unwrap() - &s)).unwrap())
            .collect();
        monotone &= gaps[0] > gaps[1] && gaps[1] > gaps[2];
        let (r3, r4) = (gaps[1] / ps[1], gaps[2] / ps[2]);
        worst_ratio = worst_ratio.max(r3.max(r4) / r3.min(r4));
    }
    Line {
        id: "A7",
        pass: monotone && worst_ratio <= 1.1,
        detail: format!(
            "100 pairs; gaps decreasing: {monotone}; worst ratio spread {worst_ratio:.6}"
        ),
    }
}

fn a8() -> Line {
    let xs = log_space(1e-3, 1e3, 30);
    let grids: Vec<(ChainId, Vec<_>)> = vec![
        (ChainId::LogBounds, default_grid(-1.0, 1.0, 200, false)),
        (
            ChainId::LogBoundsReversed,
            default_grid(-1.0, 1.0, 200, true),
        ),
        (ChainId::PowerBounds, default_grid(0.0, 1.0, 200, false)),
        (ChainId::Correction, default_grid(-1.0, 1.0, 200, false)),
        (ChainId::AlphaBeta, default_grid(-1.0, 1.0, 200, false)),
        (ChainId::WeightedMeans, default_grid(0.0, 1.0, 200, true)),
        (ChainId::TsallisMonotone, pair_grid(-1.0, 1.0, 41, &xs)),
        (ChainId::ArithLogMean, default_grid(0.0, 1.0, 200, true)),
        (ChainId::LogHarmonic, default_grid(0.0, 1.0, 200, true)),
    ];
    let mut pass = true;
    let mut fewest = usize::MAX;
    let mut worst: (f64, String) = (f64::INFINITY, String::new());
    for (chain, grid) in &grids {
        let r = verify_scalar_chain(*chain, grid).expect("chain grid admissible");
        fewest = fewest.min(r.checked);
        pass &= r.checked >= 10_000 && r.worst >= -1e-12;
        if r.worst < worst.0 {
            worst = (r.worst, format!("{chain:?}"));
        }
    }
    let mut sign_fail = Vec::new();
    for region in SignRegion::ALL {
        let t = sign_table(region, 101).expect("sign table");
        fewest = fewest.min(t.samples);
        if t.samples < 10_000 || t.class != region.claimed() {
            sign_fail.push(format!("{region:?}"));
        }
    }
    pass &= sign_fail.is_empty();
    Line {
        id: "A8",
        pass,
        detail: format!(
            "9 chains, 15 sign regions, >= {fewest} points each; worst chain gap {:.2e} ({}); sign failures {:?}",
            worst.0, worst.1, sign_fail
        ),
    }
}

fn main() -> ExitCode {
    type Check = (&'static str, Box<dyn Fn() -> Line>);
    let checks: Vec<Check> = vec![
        ("A1", Box::new(|| remark("A1", RemarkId::R23i))),
        ("A2", Box::new(|| remark("A2", RemarkId::R23ii))),
        ("A3", Box::new(|| remark("A3", RemarkId::R25))),
        ("A4", Box::new(a4)),
        ("A5", Box::new(a5)),
        ("A6", Box::new(a6)),
        ("A7", Box::new(a7)),
        ("A8", Box::new(a8)),
    ];
    let mut all = true;
    for (_, check) in &checks {
        let start = Instant::now();
        let line = check();
        all &= line.pass;
        println!(
            "{} {} [{} ms] {}",
            line.id,
            if line.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_millis(),
            line.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
