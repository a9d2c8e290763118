//! Spectral engine for real symmetric matrices.
//!
//! Every operator expression in this crate is reduced to the functional
//! calculus `f(M) = Q·diag(f(λ))·Qᵀ` on top of a cyclic Jacobi
//! eigendecomposition, and every inequality check is reduced to
//! [`loewner_leq`], the smallest eigenvalue of a difference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Default relative tolerance for Loewner comparisons.
pub const ORDER_TOL: f64 = 1e-8;

/// SPD admission threshold: `λ_min > STRICTNESS_TOL · λ_max`.
pub const STRICTNESS_TOL: f64 = 1e-12;

/// Relative asymmetry tolerated (and averaged away) at construction.
pub const SYMMETRY_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order and the orthogonal matrix whose columns
/// are the matching eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `Q·diag(f(λᵢ))·Qᵀ`, symmetrized.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Matrix> {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        if let Some((i, _)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::DomainError(format!(
                "f({}) is not finite",
                self.eigenvalues[i]
            )));
        }
        Ok(self.rebuild(&values))
    }

    /// `Q·diag(values)·Qᵀ` for caller-supplied eigenvalues.
    pub fn rebuild(&self, values: &[f64]) -> Matrix {
        let n = self.dim();
        let q = &self.eigenvectors;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let s: f64 = (0..n).map(|k| q[(i, k)] * values[k] * q[(j, k)]).sum();
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    /// Largest absolute eigenvalue, i.e. the spectral norm.
    pub fn norm2(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Deterministic: the sweep order is fixed and no randomization is used.
pub fn spectral_decompose(m: &Matrix) -> Result<SpectralDecomposition> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("non-finite entries".into()));
    }
    let scale = m.max_abs();
    if m.asymmetry() > SYMMETRY_TOL * scale {
        return Err(Error::InvalidInput(format!(
            "asymmetry {:e} exceeds {:e}",
            m.asymmetry(),
            SYMMETRY_TOL * scale
        )));
    }
    let n = m.dim();
    let mut a = m.symmetrize();
    let mut v = Matrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = a[(i, j)] * a[(i, j)];
                total += x;
                if i != j {
                    off += x;
                }
            }
        }
        if off == 0.0 || off.sqrt() <= 1e-17 * total.sqrt() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let eigenvectors = Matrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Spectral norm of a symmetric matrix.
pub fn norm2(m: &Matrix) -> Result<f64> {
    Ok(spectral_decompose(m)?.norm2())
}

/// Real symmetric positive-definite matrix with its cached spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    matrix: Matrix,
    spectrum: SpectralDecomposition,
}

impl SpdMatrix {
    /// Validates `m`: finite, symmetric up to [`SYMMETRY_TOL`] (then
    /// averaged), and `λ_min > STRICTNESS_TOL · λ_max`.
    pub fn new(m: Matrix) -> Result<Self> {
        let spectrum = spectral_decompose(&m)?;
        Self::check_strict(&spectrum).map_err(Error::InvalidInput)?;
        Ok(Self {
            matrix: m.symmetrize(),
            spectrum,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn from_diag(d: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diag(d))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Matrix::identity(n)).expect("identity is SPD")
    }

    /// Builds `Q·diag(values)·Qᵀ` from a known orthogonal basis, skipping the
    /// eigensolver. `values` need not be sorted.
    pub(crate) fn from_spectrum(basis: &SpectralDecomposition, values: &[f64]) -> Result<Self> {
        let matrix = basis.rebuild(values);
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
        let q = &basis.eigenvectors;
        let spectrum = SpectralDecomposition {
            eigenvalues: order.iter().map(|&i| values[i]).collect(),
            eigenvectors: Matrix::from_fn(n, |r, c| q[(r, order[c])]),
        };
        Self::check_strict(&spectrum).map_err(Error::NumericalBreakdown)?;
        Ok(Self { matrix, spectrum })
    }

    fn check_strict(s: &SpectralDecomposition) -> std::result::Result<(), String> {
        let (lo, hi) = (s.min(), s.max());
        if !(lo.is_finite() && hi.is_finite()) || hi <= 0.0 || lo <= STRICTNESS_TOL * hi {
            return Err(format!("not strictly positive: spectrum [{lo:e}, {hi:e}]"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

impl AsRef<Matrix> for SpdMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.matrix
    }
}

/// `f(A)` through the cached eigendecomposition of `A`.
pub fn apply_scalar_function(a: &SpdMatrix, f: impl Fn(f64) -> f64) -> Result<Matrix> {
    a.spectrum.map(f)
}

fn spd_map(a: &SpdMatrix, f: impl Fn(f64) -> f64) -> Result<SpdMatrix> {
    let values: Vec<f64> = a.spectrum.eigenvalues.iter().map(|&l| f(l)).collect();
    SpdMatrix::from_spectrum(&a.spectrum, &values)
}

/// `A^p` for any real `p`.
pub fn mat_power(a: &SpdMatrix, p: f64) -> Result<SpdMatrix> {
    if p == 0.0 {
        return Ok(SpdMatrix::identity(a.dim()));
    }
    if p == 1.0 {
        return Ok(a.clone());
    }
    spd_map(a, |l| l.powf(p))
}

pub fn mat_log(a: &SpdMatrix) -> Result<Matrix> {
    apply_scalar_function(a, f64::ln)
}

pub fn mat_inv(a: &SpdMatrix) -> Result<SpdMatrix> {
    spd_map(a, |l| 1.0 / l)
}

pub fn mat_sqrt(a: &SpdMatrix) -> Result<SpdMatrix> {
    spd_map(a, f64::sqrt)
}

pub fn mat_inv_sqrt(a: &SpdMatrix) -> Result<SpdMatrix> {
    spd_map(a, |l| 1.0 / l.sqrt())
}

/// `C·X·C`, symmetrized.
pub fn congruence(c: &Matrix, x: &Matrix) -> Result<Matrix> {
    c.check_dim(x)?;
    Ok(c.matmul(x)?.matmul(c)?.symmetrize())
}

/// Outcome of a Loewner comparison `X ≤ Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoewnerVerdict {
    /// `λ_min(Y − X)`.
    pub margin: f64,
    /// `max(1, ‖X‖₂, ‖Y‖₂)`.
    pub scale: f64,
    pub holds: bool,
}

impl LoewnerVerdict {
    pub fn normalized(&self) -> f64 {
        self.margin / self.scale
    }
}

/// Checks `X ≤ Y` in the Loewner order: holds iff
/// `λ_min(Y − X) ≥ −order_tol · max(1, ‖X‖₂, ‖Y‖₂)`.
pub fn loewner_leq(x: &Matrix, y: &Matrix, order_tol: f64) -> Result<LoewnerVerdict> {
    x.check_dim(y)?;
    let diff = (y - x).symmetrize();
    let margin = spectral_decompose(&diff)?.min();
    let scale = 1f64
        .max(spectral_decompose(&x.symmetrize())?.norm2())
        .max(spectral_decompose(&y.symmetrize())?.norm2());
    Ok(LoewnerVerdict {
        margin,
        scale,
        holds: margin >= -order_tol * scale,
    })
}
