//! Weighted operator means and relative operator entropies of a pair of
//! strictly positive matrices.
//!
//! Everything except the arithmetic and harmonic means is computed through
//! the Kubo–Ando transfer `A^{1/2} f(C) A^{1/2}` with the contraction
//! `C = A^{-1/2} B A^{-1/2}`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::quadrature::GaussLegendre;
use crate::scalar;
use crate::spd::{self, congruence, SpdMatrix};

/// Default node count for [`quadrature_tsallis`].
pub const DEFAULT_NODES: usize = 32;

/// A validated pair `(A, B)` with the factors every mean needs, computed
/// once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPair {
    a: SpdMatrix,
    b: SpdMatrix,
    sqrt_a: SpdMatrix,
    inv_sqrt_a: SpdMatrix,
    contraction: SpdMatrix,
}

impl OperatorPair {
    pub fn new(a: SpdMatrix, b: SpdMatrix) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch(a.dim(), b.dim()));
        }
        let sqrt_a = spd::mat_sqrt(&a)?;
        let inv_sqrt_a = spd::mat_inv_sqrt(&a)?;
        let c = congruence(inv_sqrt_a.matrix(), b.matrix())?;
        let contraction = SpdMatrix::new(c)
            .map_err(|e| Error::NumericalBreakdown(format!("contraction lost positivity: {e}")))?;
        Ok(Self {
            a,
            b,
            sqrt_a,
            inv_sqrt_a,
            contraction,
        })
    }

    pub fn from_matrices(a: Matrix, b: Matrix) -> Result<Self> {
        Self::new(SpdMatrix::new(a)?, SpdMatrix::new(b)?)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &SpdMatrix {
        &self.a
    }

    pub fn b(&self) -> &SpdMatrix {
        &self.b
    }

    pub fn sqrt_a(&self) -> &SpdMatrix {
        &self.sqrt_a
    }

    pub fn inv_sqrt_a(&self) -> &SpdMatrix {
        &self.inv_sqrt_a
    }

    /// `C = A^{-1/2} B A^{-1/2}`.
    pub fn contraction(&self) -> &SpdMatrix {
        &self.contraction
    }

    /// Largest `u` with `uA ≤ B`: `λ_min(C)`.
    pub fn u(&self) -> f64 {
        self.contraction.spectrum().min()
    }

    /// Smallest `v` with `B ≤ vA`: `λ_max(C)`.
    pub fn v(&self) -> f64 {
        self.contraction.spectrum().max()
    }

    /// `(A, (A+B)/2)`.
    pub fn midpoint(&self) -> Result<OperatorPair> {
        let m = (self.a.matrix() + self.b.matrix()).scale(0.5);
        OperatorPair::new(self.a.clone(), SpdMatrix::new(m)?)
    }

    /// `(A, B − A)`; requires `B − A` strictly positive.
    pub fn difference(&self) -> Result<OperatorPair> {
        let d = self.b.matrix() - self.a.matrix();
        let d = SpdMatrix::new(d).map_err(|e| {
            Error::NumericalBreakdown(format!("B - A is not strictly positive: {e}"))
        })?;
        OperatorPair::new(self.a.clone(), d)
    }

    /// `(cA, cB)`.
    pub fn scaled(&self, c: f64) -> Result<OperatorPair> {
        OperatorPair::from_matrices(self.a.matrix().scale(c), self.b.matrix().scale(c))
    }
}

fn check_weight(p: f64, lo: f64, hi: f64, range: &'static str) -> Result<()> {
    if p.is_finite() && p >= lo && p <= hi {
        Ok(())
    } else {
        Err(Error::InvalidWeight { value: p, range })
    }
}

/// `A ∇_p B = (1−p)A + pB`, `p ∈ [0, 1]`.
pub fn arithmetic_mean(pair: &OperatorPair, p: f64) -> Result<SpdMatrix> {
    check_weight(p, 0.0, 1.0, "[0, 1]")?;
    SpdMatrix::new(&pair.a.matrix().scale(1.0 - p) + &pair.b.matrix().scale(p))
}

/// `A !_p B = ((1−p)A⁻¹ + pB⁻¹)⁻¹`, `p ∈ [0, 1]`.
pub fn harmonic_mean(pair: &OperatorPair, p: f64) -> Result<SpdMatrix> {
    check_weight(p, 0.0, 1.0, "[0, 1]")?;
    let ai = spd::mat_inv(&pair.a)?;
    let bi = spd::mat_inv(&pair.b)?;
    let s = SpdMatrix::new(&ai.matrix().scale(1.0 - p) + &bi.matrix().scale(p))?;
    spd::mat_inv(&s)
}

/// `A #_p B`, the weighted geometric mean for `p ∈ [0, 1]`.
pub fn geometric_mean(pair: &OperatorPair, p: f64) -> Result<SpdMatrix> {
    check_weight(p, 0.0, 1.0, "[0, 1]")?;
    natural_power_mean(pair, p)
}

/// `A ♮_p B = A^{1/2} C^p A^{1/2}` for any real `p`.
pub fn natural_power_mean(pair: &OperatorPair, p: f64) -> Result<SpdMatrix> {
    if !p.is_finite() {
        return Err(Error::InvalidWeight {
            value: p,
            range: "finite reals",
        });
    }
    let cp = spd::mat_power(&pair.contraction, p)?;
    SpdMatrix::new(congruence(pair.sqrt_a.matrix(), cp.matrix())?)
        .map_err(|e| Error::NumericalBreakdown(e.to_string()))
}

/// `S(A|B) = A^{1/2} log(C) A^{1/2}`.
pub fn relative_operator_entropy(pair: &OperatorPair) -> Result<Matrix> {
    mean_from_representing_function(f64::ln, pair)
}

/// `S_p(A|B) = A^{1/2} C^p log(C) A^{1/2}`; `S_0 = S`.
pub fn generalized_entropy(pair: &OperatorPair, p: f64) -> Result<Matrix> {
    mean_from_representing_function(|t| scalar::gen_entropy(p, t), pair)
}

/// `T_p(A|B) = (A ♮_p B − A)/p` for `p ∈ [−1, 1]`, with `T_0 = S(A|B)`.
///
/// Evaluated eigenwise as `A^{1/2} ((C^p − I)/p) A^{1/2}` using
/// `expm1(p·log t)/p`, which stays accurate for tiny `|p|`.
pub fn tsallis_entropy(pair: &OperatorPair, p: f64) -> Result<Matrix> {
    check_weight(p, -1.0, 1.0, "[-1, 1]")?;
    tsallis_unchecked(pair, p)
}

/// [`tsallis_entropy`] without the parameter range check, for the
/// shifted parameters (`p − 1`) that appear inside bounds.
pub fn tsallis_unchecked(pair: &OperatorPair, p: f64) -> Result<Matrix> {
    if p == 0.0 {
        return relative_operator_entropy(pair);
    }
    mean_from_representing_function(|t| scalar::tsallis(p, t), pair)
}

/// `(T_a − T_b)/(a − b)`, continuous across `a = b`.
pub fn tsallis_divided_difference(pair: &OperatorPair, a: f64, b: f64) -> Result<Matrix> {
    mean_from_representing_function(|t| scalar::tsallis_divdiff(a, b, t), pair)
}

/// `A^{1/2} (log C)² A^{1/2}`.
pub fn log_squared(pair: &OperatorPair) -> Result<Matrix> {
    mean_from_representing_function(|t| t.ln().powi(2), pair)
}

/// Kubo–Ando transfer: `A^{1/2} f(C) A^{1/2}`.
pub fn mean_from_representing_function(
    f: impl Fn(f64) -> f64,
    pair: &OperatorPair,
) -> Result<Matrix> {
    let fc = pair.contraction.spectrum().map(f)?;
    congruence(pair.sqrt_a.matrix(), &fc)
}

/// Gauss–Legendre approximation of `∫₀¹ S_{pt}(A|B) dt`, which equals
/// `T_p(A|B)`.
pub fn quadrature_tsallis(pair: &OperatorPair, p: f64, nodes: usize) -> Result<Matrix> {
    check_weight(p, -1.0, 1.0, "[-1, 1]")?;
    if nodes < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 nodes, got {nodes}"
        )));
    }
    let rule = GaussLegendre::new(nodes);
    let mut acc = Matrix::zeros(pair.dim());
    for (t, w) in rule.mapped(0.0, 1.0) {
        acc = &acc + &generalized_entropy(pair, p * t)?.scale(w);
    }
    Ok(acc.symmetrize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn diag_pair(a: &[f64], b: &[f64]) -> OperatorPair {
        OperatorPair::new(
            SpdMatrix::from_diag(a).unwrap(),
            SpdMatrix::from_diag(b).unwrap(),
        )
        .unwrap()
    }

    fn dense_pair() -> OperatorPair {
        let a = Matrix::from_rows(&[
            vec![2.0, 0.3, -0.1],
            vec![0.3, 1.5, 0.2],
            vec![-0.1, 0.2, 1.0],
        ])
        .unwrap();
        let b = Matrix::from_rows(&[
            vec![1.2, -0.4, 0.0],
            vec![-0.4, 2.5, 0.6],
            vec![0.0, 0.6, 3.0],
        ])
        .unwrap();
        OperatorPair::from_matrices(a, b).unwrap()
    }

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn sandwich_bounds() {
        let pair = diag_pair(&[1.0, 2.0], &[3.0, 1.0]);
        assert!((pair.u() - 0.5).abs() < 1e-15);
        assert!((pair.v() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn arithmetic_examples() {
        let pair = dense_pair();
        assert!(close(
            arithmetic_mean(&pair, 0.0).unwrap().matrix(),
            pair.a().matrix(),
            0.0
        ));
        assert!(close(
            arithmetic_mean(&pair, 1.0).unwrap().matrix(),
            pair.b().matrix(),
            0.0
        ));
        let s = diag_pair(&[1.0], &[3.0]);
        assert_eq!(arithmetic_mean(&s, 0.5).unwrap().matrix()[(0, 0)], 2.0);
        assert!(matches!(
            arithmetic_mean(&s, 1.5),
            Err(Error::InvalidWeight { .. })
        ));
    }

    #[test]
    fn harmonic_examples() {
        let pair = dense_pair();
        assert!(close(
            harmonic_mean(&pair, 0.0).unwrap().matrix(),
            pair.a().matrix(),
            1e-13
        ));
        assert!(close(
            harmonic_mean(&pair, 1.0).unwrap().matrix(),
            pair.b().matrix(),
            1e-13
        ));
        let s = diag_pair(&[1.0], &[3.0]);
        assert!((harmonic_mean(&s, 0.5).unwrap().matrix()[(0, 0)] - 1.5).abs() < 1e-15);
        assert!(harmonic_mean(&s, -0.1).is_err());
    }

    #[test]
    fn natural_power_examples() {
        let pair = dense_pair();
        assert!(close(
            natural_power_mean(&pair, 0.0).unwrap().matrix(),
            pair.a().matrix(),
            1e-13
        ));
        assert!(close(
            natural_power_mean(&pair, 1.0).unwrap().matrix(),
            pair.b().matrix(),
            1e-13
        ));
        let s = diag_pair(&[1.0], &[4.0]);
        assert!((natural_power_mean(&s, 0.5).unwrap().matrix()[(0, 0)] - 2.0).abs() < 1e-15);
        let s = diag_pair(&[1.0], &[3.0]);
        assert!((natural_power_mean(&s, 2.0).unwrap().matrix()[(0, 0)] - 9.0).abs() < 1e-14);
        assert!(geometric_mean(&s, 2.0).is_err());
    }

    #[test]
    fn entropy_examples() {
        let pair = dense_pair();
        let same = OperatorPair::new(pair.a().clone(), pair.a().clone()).unwrap();
        assert!(relative_operator_entropy(&same).unwrap().max_abs() < 1e-14);
        assert!(generalized_entropy(&same, 0.7).unwrap().max_abs() < 1e-14);
        assert!(tsallis_entropy(&same, -0.4).unwrap().max_abs() < 1e-14);

        let s = diag_pair(&[1.0, 1.0], &[E, E * E]);
        let r = relative_operator_entropy(&s).unwrap();
        assert!(close(&r, &Matrix::from_diag(&[1.0, 2.0]), 1e-15));

        let s = diag_pair(&[1.0], &[E]);
        assert!((generalized_entropy(&s, 1.0).unwrap()[(0, 0)] - E).abs() < 1e-15);

        assert!(close(
            &generalized_entropy(&pair, 0.0).unwrap(),
            &relative_operator_entropy(&pair).unwrap(),
            0.0
        ));
    }

    #[test]
    fn tsallis_endpoints() {
        let pair = dense_pair();
        let (a, b) = (pair.a().matrix(), pair.b().matrix());
        assert!(close(
            &tsallis_entropy(&pair, 1.0).unwrap(),
            &(b - a),
            1e-12
        ));
        let binv = spd::mat_inv(pair.b()).unwrap();
        let aba = a.matmul(binv.matrix()).unwrap().matmul(a).unwrap();
        assert!(close(
            &tsallis_entropy(&pair, -1.0).unwrap(),
            &(a - &aba),
            1e-12
        ));
        assert!(close(
            &tsallis_entropy(&pair, 0.0).unwrap(),
            &relative_operator_entropy(&pair).unwrap(),
            0.0
        ));
        assert!(matches!(
            tsallis_entropy(&pair, 1.01),
            Err(Error::InvalidWeight { .. })
        ));
    }

    #[test]
    fn tsallis_equals_power_mean_difference() {
        let pair = dense_pair();
        for p in [-0.8, -0.2, 0.35, 0.9] {
            let nat = natural_power_mean(&pair, p).unwrap();
            let direct = (nat.matrix() - pair.a().matrix()).scale(1.0 / p);
            assert!(
                close(&tsallis_entropy(&pair, p).unwrap(), &direct, 1e-12),
                "p={p}"
            );
        }
    }

    #[test]
    fn representing_function_cross_checks() {
        let pair = dense_pair();
        let b = mean_from_representing_function(|t| t, &pair).unwrap();
        assert!(close(&b, pair.b().matrix(), 1e-12));
        let p = 0.6;
        let t = mean_from_representing_function(|t| (t.powf(p) - 1.0) / p, &pair).unwrap();
        assert!(close(&t, &tsallis_entropy(&pair, p).unwrap(), 1e-10));
        let g = mean_from_representing_function(|t| t.powf(p / 2.0) * t.ln(), &pair).unwrap();
        assert!(close(
            &g,
            &generalized_entropy(&pair, p / 2.0).unwrap(),
            1e-10
        ));
        let bad = mean_from_representing_function(|t| (t - 100.0).sqrt(), &pair);
        assert!(matches!(bad, Err(Error::DomainError(_))));
    }

    #[test]
    fn quadrature_identity() {
        let s = diag_pair(&[1.0], &[3.0]);
        let q = quadrature_tsallis(&s, 1.0, 32).unwrap();
        assert!((q[(0, 0)] - 2.0).abs() < 1e-14);

        let pair = dense_pair();
        let same = OperatorPair::new(pair.a().clone(), pair.a().clone()).unwrap();
        assert!(quadrature_tsallis(&same, 0.5, 4).unwrap().max_abs() < 1e-14);

        let q = quadrature_tsallis(&pair, 0.6, 32).unwrap();
        let t = tsallis_entropy(&pair, 0.6).unwrap();
        assert!(spd::norm2(&(&q - &t)).unwrap() <= 1e-10);
        assert!(quadrature_tsallis(&pair, 0.6, 1).is_err());
    }

    #[test]
    fn difference_pair_requires_strict_order() {
        let pair = diag_pair(&[1.0, 1.0], &[2.0, 3.0]);
        let d = pair.difference().unwrap();
        assert!(close(d.b().matrix(), &Matrix::from_diag(&[1.0, 2.0]), 0.0));
        let pair = diag_pair(&[1.0, 1.0], &[1.0, 3.0]);
        assert!(matches!(
            pair.difference(),
            Err(Error::NumericalBreakdown(_))
        ));
    }

    #[test]
    fn midpoint_contraction() {
        let pair = dense_pair();
        let m = pair.midpoint().unwrap();
        let expected = pair
            .contraction()
            .spectrum()
            .eigenvalues
            .iter()
            .map(|t| 0.5 * (t + 1.0))
            .collect::<Vec<_>>();
        for (x, y) in m.contraction().spectrum().eigenvalues.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-13);
        }
    }
}
