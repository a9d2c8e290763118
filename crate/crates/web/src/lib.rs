//! Browser bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers and returns a JSON string, so the same
//! functions run natively under `cargo test`. Failures come back as
//! `{"error": "..."}`.

use opineq::catalog::{self, evaluate};
use opineq::means::{self, OperatorPair};
use opineq::scalar::{self, FnId, Params};
use opineq::spd::{spectral_decompose, ORDER_TOL};
use opineq::{Matrix, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn pair2(a: [f64; 3], b: [f64; 3]) -> Result<OperatorPair> {
    let m = |[x, y, z]: [f64; 3]| Matrix::from_rows(&[vec![x, y], vec![y, z]]);
    OperatorPair::from_matrices(m(a)?, m(b)?)
}

/// Scalar bound curves on `[x_lo, x_hi]` for a given `p`: the two
/// two-sided bounds on `(x^p − 1)/p` and the midpoint bounds.
#[wasm_bindgen]
pub fn bound_curves(p: f64, x_lo: f64, x_hi: f64, samples: usize) -> String {
    respond((|| {
        let params = Params::p(p);
        let xs = scalar::lin_space(x_lo, x_hi, samples.max(2));
        let curve = |id: FnId| -> Result<Vec<f64>> {
            xs.iter().map(|&x| scalar::eval(id, params, x)).collect()
        };
        Ok(json!({
            "p": p,
            "x": xs,
            "tsallis": curve(FnId::Tsallis)?,
            "log_lower": curve(FnId::ThmLower)?,
            "log_upper": curve(FnId::ThmUpper)?,
            "mid_lower": curve(FnId::HhLower)?,
            "mid_upper": curve(FnId::HhUpper)?,
        }))
    })())
}

/// Margins of every one-parameter catalog case whose hypothesis admits the
/// 2x2 pair `A = [[a11, a12], [a12, a22]]`, `B` likewise, at weight `p`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn explore_pair(a11: f64, a12: f64, a22: f64, b11: f64, b12: f64, b22: f64, p: f64) -> String {
    respond((|| {
        let pair = pair2([a11, a12, a22], [b11, b12, b22])?;
        let params = Params::p(p);
        let mut rows = Vec::new();
        for case in catalog::catalog_with_duals() {
            let h = &case.hypothesis;
            if h.uses_q() || h.uses_c() || !h.admits(pair.u(), pair.v(), &params) {
                continue;
            }
            let r = evaluate(&case, &pair, &params, ORDER_TOL)?;
            rows.push(json!({
                "id": case.id,
                "statement": case.statement,
                "margin": r.margin,
                "normalized": r.normalized(),
                "holds": r.holds,
            }));
        }
        Ok(json!({ "u": pair.u(), "v": pair.v(), "cases": rows }))
    })())
}

/// Eigenvalues of `T_p(A|B)` for `p` on a grid of `[p_lo, p_hi]`, with
/// those of `S(A|B)` for reference.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn tsallis_sweep(
    a11: f64,
    a12: f64,
    a22: f64,
    b11: f64,
    b12: f64,
    b22: f64,
    p_lo: f64,
    p_hi: f64,
    steps: usize,
) -> String {
    respond((|| {
        let pair = pair2([a11, a12, a22], [b11, b12, b22])?;
        let ps = scalar::lin_space(p_lo, p_hi, steps.max(2));
        let mut eigs = Vec::with_capacity(ps.len());
        for &p in &ps {
            eigs.push(spectral_decompose(&means::tsallis_unchecked(&pair, p)?)?.eigenvalues);
        }
        let s = spectral_decompose(&means::relative_operator_entropy(&pair)?)?.eigenvalues;
        Ok(json!({ "p": ps, "eigenvalues": eigs, "entropy": s }))
    })())
}
