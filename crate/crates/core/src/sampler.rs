//! Seeded generation of SPD matrices and pairs.
//!
//! Every draw comes from a `ChaCha8Rng` seeded with a `u64`, so a seed plus
//! a dimension reproduces the same matrices on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::catalog::{InequalityCase, ParamRange, Region, STRICT_GAP};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::means::OperatorPair;
use crate::scalar::Params;
use crate::spd::{self, SpdMatrix};

/// Default spectrum of the base operator `A`.
pub const DEFAULT_SPECTRUM: [f64; 2] = [0.2, 5.0];

/// Sandwich interval used where a hypothesis leaves `u` or `v` free.
pub const DEFAULT_SANDWICH: [f64; 2] = [0.05, 20.0];

/// Sandwich bounds are clipped to this range to keep pairs well conditioned.
const SANDWICH_CLIP: [f64; 2] = [1e-2, 1e2];

/// Probability of pinning a hypothesis edge (`u = 1`, say) exactly.
const EDGE_PROBABILITY: f64 = 0.1;

/// Probability of drawing `q = p` in ordered two-parameter cases.
const TIE_PROBABILITY: f64 = 0.05;

const MAX_ATTEMPTS: usize = 20;

/// JSON-serializable sampler configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub n: usize,
    /// Eigenvalue range `[lo, hi]` of `A`.
    #[serde(default = "default_spectrum")]
    pub spectrum: [f64; 2],
    /// Target `[u, v]` for the spectrum of `A^{-1/2} B A^{-1/2}`.
    #[serde(default)]
    pub sandwich: Option<[f64; 2]>,
}

fn default_spectrum() -> [f64; 2] {
    DEFAULT_SPECTRUM
}

impl SamplerConfig {
    pub fn new(seed: u64, n: usize) -> Self {
        Self {
            seed,
            n,
            spectrum: DEFAULT_SPECTRUM,
            sandwich: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        let check = |name: &str, [lo, hi]: [f64; 2]| {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name} must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
                )));
            }
            Ok(())
        };
        check("spectrum", self.spectrum)?;
        if let Some(s) = self.sandwich {
            check("sandwich", s)?;
        }
        Ok(())
    }
}

/// Seeded source of random matrices.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if lo >= hi {
            return lo;
        }
        self.rng.random_range(lo..=hi)
    }

    fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if lo >= hi {
            return lo;
        }
        self.uniform(lo.ln(), hi.ln()).exp().clamp(lo, hi)
    }

    fn chance(&mut self, prob: f64) -> bool {
        self.rng.random_bool(prob)
    }

    /// Haar-distributed orthogonal matrix: modified Gram–Schmidt on a
    /// Gaussian matrix with the sign of each `R_ii` made positive.
    pub fn orthogonal(&mut self, n: usize) -> Matrix {
        loop {
            let mut cols: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| self.rng.sample::<f64, _>(StandardNormal))
                        .collect()
                })
                .collect();
            let mut ok = true;
            for j in 0..n {
                let (done, rest) = cols.split_at_mut(j);
                for ci in done.iter() {
                    let d: f64 = ci.iter().zip(&rest[0]).map(|(x, y)| x * y).sum();
                    rest[0].iter_mut().zip(ci).for_each(|(y, x)| *y -= d * x);
                }
                let norm = cols[j].iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-8 {
                    ok = false;
                    break;
                }
                cols[j].iter_mut().for_each(|x| *x /= norm);
            }
            if ok {
                return Matrix::from_fn(n, |i, j| cols[j][i]);
            }
        }
    }

    /// `Q diag(λ) Qᵀ` for a random orthogonal `Q`.
    pub fn with_eigenvalues(&mut self, values: &[f64]) -> Result<SpdMatrix> {
        let q = self.orthogonal(values.len());
        spd::SpdMatrix::new(rotate(&q, values)?)
    }

    /// Eigenvalues uniform in `[lo, hi]`.
    pub fn random_spd(&mut self, n: usize, [lo, hi]: [f64; 2]) -> Result<SpdMatrix> {
        let values: Vec<f64> = (0..n).map(|_| self.uniform(lo, hi)).collect();
        self.with_eigenvalues(&values)
    }

    /// Pair whose contraction has spectrum in `[u, v]`, with `u` and `v`
    /// themselves eigenvalues when `n ≥ 2`.
    pub fn sandwich_pair(
        &mut self,
        n: usize,
        spectrum: [f64; 2],
        [u, v]: [f64; 2],
    ) -> Result<OperatorPair> {
        let a = self.random_spd(n, spectrum)?;
        let mut c_eigs: Vec<f64> = (0..n).map(|_| self.log_uniform(u, v)).collect();
        if n >= 2 {
            c_eigs[0] = u;
            c_eigs[n - 1] = v;
        }
        let c = self.with_eigenvalues(&c_eigs)?;
        let sqrt_a = spd::mat_sqrt(&a)?;
        let b = spd::congruence(sqrt_a.matrix(), c.matrix())?;
        OperatorPair::new(a, SpdMatrix::new(b)?)
    }

    /// Simultaneously diagonalizable pair `A = Q diag(λ) Qᵀ`,
    /// `B = Q diag(μ) Qᵀ` with `μ_i / λ_i ∈ [u, v]`.
    pub fn commuting_pair(
        &mut self,
        n: usize,
        spectrum: [f64; 2],
        [u, v]: [f64; 2],
    ) -> Result<CommutingPair> {
        let basis = self.orthogonal(n);
        let a_eigs: Vec<f64> = (0..n)
            .map(|_| self.uniform(spectrum[0], spectrum[1]))
            .collect();
        let b_eigs: Vec<f64> = a_eigs.iter().map(|&l| l * self.log_uniform(u, v)).collect();
        let a = SpdMatrix::new(rotate(&basis, &a_eigs)?)?;
        let b = SpdMatrix::new(rotate(&basis, &b_eigs)?)?;
        Ok(CommutingPair {
            pair: OperatorPair::new(a, b)?,
            basis,
            a_eigs,
            b_eigs,
        })
    }

    fn param(&mut self, r: &ParamRange) -> f64 {
        loop {
            let x = self.uniform(r.lo, r.hi);
            if r.contains(x) {
                return x;
            }
        }
    }

    fn region_params(&mut self, region: &Region) -> Params {
        let mut k = Params::default();
        if let Some(r) = &region.p {
            k.p = self.param(r);
        }
        if let Some(r) = &region.q {
            k.q = self.param(r);
        }
        if region.ordered {
            if self.chance(TIE_PROBABILITY) {
                k.q = k.p;
            } else if k.p > k.q {
                std::mem::swap(&mut k.p, &mut k.q);
            }
        }
        if let Some(r) = &region.c {
            k.c = self.param(r);
        }
        k
    }

    /// Draws parameters and a pair admitted by one region of the case's
    /// hypothesis.
    pub fn sample_case(
        &mut self,
        case: &InequalityCase,
        n: usize,
        spectrum: [f64; 2],
    ) -> Result<Trial> {
        let regions = &case.hypothesis.regions;
        for _ in 0..MAX_ATTEMPTS {
            let region = &regions[self.rng.random_range(0..regions.len())];
            let params = self.region_params(region);
            let Some(bounds) = self.sandwich_target(region, &params, n) else {
                continue;
            };
            let pair = match self.sandwich_pair(n, spectrum, bounds) {
                Ok(p) => p,
                Err(Error::InvalidInput(_) | Error::NumericalBreakdown(_)) => continue,
                Err(e) => return Err(e),
            };
            if case.hypothesis.admits(pair.u(), pair.v(), &params) {
                return Ok(Trial { params, pair });
            }
        }
        Err(Error::HypothesisError(format!(
            "{}: no admissible sample after {MAX_ATTEMPTS} attempts",
            case.id
        )))
    }

    fn sandwich_target(&mut self, region: &Region, k: &Params, n: usize) -> Option<[f64; 2]> {
        let bound = |b: &Option<crate::catalog::Num>| b.as_ref().map(|b| b.eval(k));
        let [clip_lo, clip_hi] = SANDWICH_CLIP;
        let v_max = bound(&region.v_max).map(|x| x.min(clip_hi));
        let mut u_min = bound(&region.u_min).map(|x| x.max(clip_lo));
        if region.strict {
            u_min = u_min.map(|x| x + 10.0 * STRICT_GAP);
        }
        let lo = u_min.unwrap_or(match v_max {
            Some(vm) => (vm / 20.0).clamp(clip_lo, DEFAULT_SANDWICH[0]),
            None => DEFAULT_SANDWICH[0],
        });
        let hi = v_max.unwrap_or((lo * 20.0).clamp(DEFAULT_SANDWICH[1], clip_hi));
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return None;
        }
        let u_cap = bound(&region.u_max).map_or(hi, |x| x.min(hi));
        let v_floor = bound(&region.v_min).map_or(lo, |x| x.max(lo));
        let edge = !region.strict && self.chance(EDGE_PROBABILITY);
        let pin_u = edge && u_min.is_some() && (v_max.is_none() || self.chance(0.5));
        let pin_v = edge && !pin_u && v_max.is_some();
        let u = if pin_u {
            lo
        } else {
            self.log_uniform(lo, u_cap.max(lo))
        };
        let v = if pin_v {
            hi
        } else {
            self.log_uniform(v_floor.max(u), hi)
        };
        if n == 1 {
            // A single eigenvalue has to honour both ends at once.
            let x = if pin_v { v } else { u.max(v_floor) };
            return (x <= hi && x <= u_cap.max(lo)).then_some([x, x]);
        }
        (u <= v).then_some([u, v])
    }
}

/// `Q diag(values) Qᵀ`, symmetrized.
fn rotate(q: &Matrix, values: &[f64]) -> Result<Matrix> {
    let d = Matrix::from_diag(values);
    Ok(q.matmul(&d)?.matmul(&q.transpose())?.symmetrize())
}

/// A sampled pair with the parameters it was drawn for.
#[derive(Debug, Clone)]
pub struct Trial {
    pub params: Params,
    pub pair: OperatorPair,
}

/// A commuting pair with its shared eigenbasis.
#[derive(Debug, Clone)]
pub struct CommutingPair {
    pub pair: OperatorPair,
    /// Columns are the common eigenvectors.
    pub basis: Matrix,
    pub a_eigs: Vec<f64>,
    pub b_eigs: Vec<f64>,
}

/// Random SPD matrix of `cfg.n` with eigenvalues in `cfg.spectrum`.
pub fn random_spd(cfg: &SamplerConfig) -> Result<SpdMatrix> {
    cfg.validate()?;
    Sampler::new(cfg.seed).random_spd(cfg.n, cfg.spectrum)
}

/// Pair whose contraction spectrum lies in `cfg.sandwich`.
pub fn sandwich_pair(cfg: &SamplerConfig) -> Result<OperatorPair> {
    cfg.validate()?;
    Sampler::new(cfg.seed).sandwich_pair(
        cfg.n,
        cfg.spectrum,
        cfg.sandwich.unwrap_or(DEFAULT_SANDWICH),
    )
}

pub fn commuting_pair(cfg: &SamplerConfig) -> Result<CommutingPair> {
    cfg.validate()?;
    Sampler::new(cfg.seed).commuting_pair(cfg.n, cfg.spectrum, cfg.sandwich.unwrap_or([0.5, 2.0]))
}

/// Seed of trial `index` in a run seeded with `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

/// Samples one admissible trial of `case` for the given seed.
pub fn sample_case(case: &InequalityCase, n: usize, seed: u64) -> Result<Trial> {
    Sampler::new(seed).sample_case(case, n, DEFAULT_SPECTRUM)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_with_duals, Num};

    #[test]
    fn one_by_one_in_range() {
        let cfg = SamplerConfig {
            seed: 1,
            n: 1,
            spectrum: [2.0, 2.0],
            sandwich: None,
        };
        let a = random_spd(&cfg).unwrap();
        assert!((a.matrix()[(0, 0)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn spectrum_within_bounds() {
        for seed in 0..20 {
            let cfg = SamplerConfig {
                seed,
                n: 6,
                spectrum: [0.5, 3.0],
                sandwich: None,
            };
            let a = random_spd(&cfg).unwrap();
            let s = a.spectrum();
            assert!(s.min() >= 0.5 - 1e-12 && s.max() <= 3.0 + 1e-12);
        }
    }

    #[test]
    fn same_seed_same_matrix() {
        let cfg = SamplerConfig::new(42, 5);
        assert_eq!(random_spd(&cfg).unwrap(), random_spd(&cfg).unwrap());
        let other = SamplerConfig::new(43, 5);
        assert_ne!(random_spd(&cfg).unwrap(), random_spd(&other).unwrap());
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let q = Sampler::new(7).orthogonal(8);
        let qtq = q.transpose().matmul(&q).unwrap();
        assert!((&qtq - &Matrix::identity(8)).max_abs() < 1e-13);
    }

    #[test]
    fn sandwich_bounds_respected() {
        let cfg = SamplerConfig {
            seed: 3,
            n: 4,
            spectrum: [0.2, 5.0],
            sandwich: Some([1.0, 2.0]),
        };
        let pair = sandwich_pair(&cfg).unwrap();
        assert!((pair.u() - 1.0).abs() < 1e-10, "{}", pair.u());
        assert!((pair.v() - 2.0).abs() < 1e-10, "{}", pair.v());
    }

    #[test]
    fn commuting_pair_shares_basis() {
        let cfg = SamplerConfig::new(9, 4);
        let cp = commuting_pair(&cfg).unwrap();
        let a = cp.pair.a().matrix();
        let b = cp.pair.b().matrix();
        let comm = &a.matmul(b).unwrap() - &b.matmul(a).unwrap();
        assert!(comm.max_abs() < 1e-12);
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = SamplerConfig {
            seed: 5,
            n: 3,
            spectrum: [0.1, 10.0],
            sandwich: Some([1.0, 4.0]),
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(SamplerConfig::from_json(&text).unwrap(), cfg);
        let minimal = SamplerConfig::from_json(r#"{"seed": 1, "n": 2}"#).unwrap();
        assert_eq!(minimal.spectrum, DEFAULT_SPECTRUM);
        assert!(SamplerConfig::from_json(r#"{"seed": 1, "n": 0}"#).is_err());
        assert!(SamplerConfig::from_json(r#"{"seed": 1, "n": 2, "spectrum": [2, 1]}"#).is_err());
    }

    #[test]
    fn every_case_samples_admissibly() {
        for case in catalog_with_duals() {
            for n in [1, 2, 5] {
                for seed in 0..30 {
                    let trial = sample_case(&case, n, seed)
                        .unwrap_or_else(|e| panic!("{} n={n} seed={seed}: {e}", case.id));
                    assert!(case
                        .hypothesis
                        .admits(trial.pair.u(), trial.pair.v(), &trial.params));
                }
            }
        }
    }

    #[test]
    fn edges_are_pinned_sometimes() {
        let case = catalog_with_duals()
            .into_iter()
            .find(|c| c.id == "T1.lo")
            .unwrap();
        assert_eq!(case.hypothesis.regions[0].u_min, Some(Num::Const(1.0)));
        let pinned = (0..200)
            .filter(|&s| (sample_case(&case, 3, s).unwrap().pair.u() - 1.0).abs() < 1e-10)
            .count();
        assert!(pinned > 5, "{pinned}");
    }
}
