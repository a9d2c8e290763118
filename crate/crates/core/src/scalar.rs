//! Scalar twins of every mean, entropy and auxiliary function, used as an
//! independent oracle for 1x1 and commuting pairs and for the pinned reference
//! spot values.
//!
//! All `(x^p − 1)/p` style quantities go through [`tsallis`], which uses
//! `expm1(p·ln x)/p` and returns `ln x` at `p = 0`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// `(x^p − 1)/p`, with the `p → 0` limit `ln x`.
pub fn tsallis(p: f64, x: f64) -> f64 {
    let l = x.ln();
    if p == 0.0 {
        return l;
    }
    let z = p * l;
    if z.abs() < 1e-300 {
        return l;
    }
    z.exp_m1() / p
}

/// `∂/∂p (x^p − 1)/p = (x^p (p ln x − 1) + 1)/p²`.
pub fn tsallis_dp(p: f64, x: f64) -> f64 {
    let l = x.ln();
    let z = p * l;
    if z.abs() < 1e-3 {
        // l²·Σ z^k (k+1)/(k+2)! , truncated where z^5 < 1e-15.
        let z2 = z * z;
        return l * l * (0.5 + z / 3.0 + z2 / 8.0 + z2 * z / 30.0 + z2 * z2 / 144.0);
    }
    (z.exp() * (z - 1.0) + 1.0) / (p * p)
}

/// Divided difference `(t_a(x) − t_b(x)) / (a − b)` of [`tsallis`] in its
/// parameter; the derivative when `a == b`.
pub fn tsallis_divdiff(a: f64, b: f64, x: f64) -> f64 {
    let d = a - b;
    if d == 0.0 {
        return tsallis_dp(a, x);
    }
    if d.abs() >= 1e-3 {
        return (tsallis(a, x) - tsallis(b, x)) / d;
    }
    // Mean of the derivative over [b, a]; exact to rounding for |d| < 1e-3.
    GaussLegendre::new(8).integrate(b, a, |w| tsallis_dp(w, x)) / d
}

/// `x^p ln x`.
pub fn gen_entropy(p: f64, x: f64) -> f64 {
    x.powf(p) * x.ln()
}

pub fn arith(p: f64, x: f64) -> f64 {
    (1.0 - p) + p * x
}

pub fn harm(p: f64, x: f64) -> f64 {
    1.0 / ((1.0 - p) + p / x)
}

fn mid(t: f64) -> f64 {
    0.5 * (t + 1.0)
}

/// Parameters shared by the scalar functions. Unused ones are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Params {
    pub p: f64,
    pub q: f64,
    pub c: f64,
}

impl Params {
    pub fn p(p: f64) -> Self {
        Self {
            p,
            ..Self::default()
        }
    }

    pub fn pq(p: f64, q: f64) -> Self {
        Self { p, q, c: 0.0 }
    }

    pub fn pc(p: f64, c: f64) -> Self {
        Self { p, q: 0.0, c }
    }
}

macro_rules! fn_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Identifier of a scalar function.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum FnId { $($variant),* }

        impl FnId {
            pub const ALL: &'static [FnId] = &[$(FnId::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(FnId::$variant => $name),* }
            }
        }

        impl FromStr for FnId {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(FnId::$variant),)*
                    _ => Err(Error::InvalidInput(format!("unknown scalar function `{s}`"))),
                }
            }
        }
    };
}

fn_ids! {
    Tsallis => "tsallis",
    GenEntropy => "gen_entropy",
    Arith => "arith",
    Harm => "harm",
    Power => "power",
    LogSq => "log_sq",
    LogMean => "log_mean",
    ThmLower => "thm22_lower",
    ThmUpper => "thm22_upper",
    HhLower => "hh_lower",
    HhUpper => "hh_upper",
    L => "l_p",
    K => "k_p",
    C => "c_p",
    H => "h_p",
    G => "g_p",
    Alpha => "alpha_p",
    Beta => "beta_p",
    BetaCorrected => "beta_p_corrected",
    Gamma => "gamma_p",
    Delta => "delta_p",
    Eq5Closed => "eq5_closed",
    Eq5Integrand => "eq5_integrand",
    Eq6Closed => "eq6_closed",
    Eq6Integrand => "eq6_integrand",
    Lemma31G => "lemma31_g",
    Lemma33G => "lemma33_g",
    Lemma35G => "lemma35_g",
    Lemma35L => "lemma35_l",
    Prop32F => "prop32_f",
    Prop34F => "prop34_f",
    Prop36F => "prop36_f",
    Prop41H => "prop41_h",
    Thm42Double => "thm42_double_integral",
    Prop43F1 => "prop43_f1",
    Prop43F2 => "prop43_f2",
    Lemma44Gap => "lemma44_gap",
    Thm46F => "thm46_f",
}

impl fmt::Display for FnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A scalar function together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarFn {
    pub id: FnId,
    pub params: Params,
}

impl ScalarFn {
    pub fn new(id: FnId, params: Params) -> Self {
        Self { id, params }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        eval(self.id, self.params, x)
    }
}

fn domain(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::DomainError(what()))
    }
}

/// Evaluates `id` at `x` with parameters `params`.
///
/// For [`FnId::Lemma35L`] the argument `x` is the constant `c`.
pub fn eval(id: FnId, params: Params, x: f64) -> Result<f64> {
    let Params { p, q, c } = params;
    use FnId::*;
    domain(
        x.is_finite() && p.is_finite() && q.is_finite() && c.is_finite(),
        || format!("{id}: non-finite input"),
    )?;
    match id {
        Lemma35L => domain(x != 0.0, || "lemma35_l: c must be nonzero".into())?,
        L | K | C | H | G | Alpha | Beta | BetaCorrected | Gamma | Delta | Eq5Closed
        | Eq5Integrand | Eq6Closed | Eq6Integrand => {
            domain(x >= 1.0, || format!("{id}: requires t >= 1, got {x}"))?
        }
        Prop43F1 | Prop43F2 => {
            domain(x > 0.0 && x <= 1.0, || {
                format!("{id}: requires 0 < x <= 1, got {x}")
            })?;
            domain(p > 0.0 && p <= 1.0, || {
                format!("{id}: requires 0 < p <= 1, got {p}")
            })?
        }
        Arith | Harm => {
            domain(x > 0.0, || format!("{id}: requires x > 0"))?;
            domain((0.0..=1.0).contains(&p), || {
                format!("{id}: requires p in [0,1], got {p}")
            })?
        }
        _ => domain(x > 0.0, || format!("{id}: requires x > 0, got {x}"))?,
    }
    match id {
        Beta | Gamma | Delta | Prop32F | Prop34F | Prop36F | Prop41H | Thm46F => {
            domain(p != 0.0, || format!("{id}: requires p != 0"))?
        }
        Eq5Closed => domain(p != 1.0, || format!("{id}: requires p != 1"))?,
        Thm42Double => domain(p != 0.0 && p != 1.0 && q != 0.0 && q != 1.0, || {
            format!("{id}: requires p, q not in {{0, 1}}")
        })?,
        _ => {}
    }

    let t = x;
    let lg = x.ln();
    let v = match id {
        Tsallis => tsallis(p, x),
        GenEntropy => gen_entropy(p, x),
        Arith => arith(p, x),
        Harm => harm(p, x),
        Power => x.powf(p),
        LogSq => lg * lg,
        LogMean => {
            if x == 1.0 {
                1.0
            } else {
                (x - 1.0) / lg
            }
        }
        ThmLower => x.powf(p / 2.0) * lg,
        ThmUpper => 0.5 * (x.powf(p) + 1.0) * lg,
        HhLower => mid(x).powf(p - 1.0) * (x - 1.0),
        HhUpper => 0.5 * (x.powf(p - 1.0) + 1.0) * (x - 1.0),
        L => l_p(p, t),
        K => k_p(p, t),
        C => c_p(p, t),
        H => k_p(p, t) - l_p(p, t),
        G => mid(t).powf(p - 2.0) - 0.5 * t.powf(p - 2.0),
        Alpha => alpha_p(p, t),
        Beta => beta_p(p, t),
        BetaCorrected => beta_p_corrected(p, t),
        Gamma => alpha_p(p, t) - mid(t).powf(p - 1.0) * (t - 1.0),
        Delta => 0.5 * (t.powf(p - 1.0) + 1.0) * (t - 1.0) - beta_p(p, t),
        // 2/(p−1)·(t−1)·m^{p−1} − 4/(p(p−1))·(m^p − 1), m = (t+1)/2
        Eq5Closed => {
            let m = mid(t);
            2.0 * (t - 1.0) * m.powf(p - 1.0) / (p - 1.0) - 4.0 * tsallis(p, m) / (p - 1.0)
        }
        Eq5Integrand => (t - 1.0) * mid(t).powf(p - 2.0),
        Eq6Closed => 0.5 * (tsallis(p, t) - tsallis(p - 1.0, t) + 0.5 * (t * t - 1.0) - (t - 1.0)),
        Eq6Integrand => (t - 1.0) * 0.5 * (t.powf(p - 2.0) + 1.0),
        Lemma31G => 1.0 - x + x * lg - x * lg * lg,
        Lemma33G => 1.0 - x + x * lg - 0.5 * x * lg * lg,
        Lemma35G => 1.0 - x + x * lg - c * x * lg * lg,
        Lemma35L => {
            let c = x;
            1.0 + (1.0 - 4.0 * c) * ((1.0 - 2.0 * c) / c).exp()
        }
        Prop32F => tsallis(p, t) - gen_entropy(p, t),
        Prop34F => tsallis(p, t) - 0.5 * gen_entropy(p, t),
        Prop36F => tsallis(p, t) - c * gen_entropy(p, t),
        Prop41H => tsallis(p, x) - (x - 1.0),
        // ∫_x^1 ∫_t^1 (y^{p−2} − y^{q−2}) dy dt in closed form.
        Thm42Double => weighted_gap(p, x) - weighted_gap(q, x),
        Prop43F1 => x.powf(p) / ((1.0 - p) + p / x),
        Prop43F2 => ((1.0 - p) + p / x - x.powf(-p)) / p,
        Lemma44Gap => arith(p, x) - eval(LogMean, params, x)?,
        Thm46F => (x.powf(p) - x / ((1.0 - p) * x + p)) / p + p * lg * lg,
    };
    domain(v.is_finite(), || {
        format!("{id}({x}) with {params:?} is not finite")
    })?;
    Ok(v)
}

/// `((1−p) + p·x − x^p) / (p(1−p))`.
fn weighted_gap(p: f64, x: f64) -> f64 {
    ((1.0 - p) + p * x - x.powf(p)) / (p * (1.0 - p))
}

/// `½ (t_p(t) − t_{p−1}(t))`.
pub fn l_p(p: f64, t: f64) -> f64 {
    0.5 * (tsallis(p, t) - tsallis(p - 1.0, t))
}

/// `4 (t_p(m) − t_{p−1}(m))` with `m = (t+1)/2`.
pub fn k_p(p: f64, t: f64) -> f64 {
    let m = mid(t);
    4.0 * (tsallis(p, m) - tsallis(p - 1.0, m))
}

/// `(t_p(t) − t_1(t)) / (p − 1)`, continuous at `p = 1`.
pub fn c_p(p: f64, t: f64) -> f64 {
    tsallis_divdiff(p, 1.0, t)
}

pub fn alpha_p(p: f64, t: f64) -> f64 {
    (t.powf(p - 1.0) - 1.0) / (p - 3.0) + (p - 1.0) / (2.0 * (3.0 - p)) * (t * t - 1.0) + (t - 1.0)
}

/// Upper function behind the pinned `δ` values. Its middle term carries
/// no `(t − 1)` factor, so it is not an upper bound for `t_p` in general.
pub fn beta_p(p: f64, t: f64) -> f64 {
    let m = mid(t);
    (t - 1.0) + 2.0 * m.powf(p - 1.0) - 4.0 * tsallis(p, m)
}

/// Upper bound that actually follows from `k_p ≤ c_p`:
/// `(t−1) + 2(t−1)m^{p−1} − 4 t_p(m)`.
pub fn beta_p_corrected(p: f64, t: f64) -> f64 {
    let m = mid(t);
    (t - 1.0) + 2.0 * (t - 1.0) * m.powf(p - 1.0) - 4.0 * tsallis(p, m)
}

/// A sampled evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GridPoint {
    pub p: f64,
    pub q: f64,
    pub c: f64,
    pub x: f64,
}

impl GridPoint {
    pub fn px(p: f64, x: f64) -> Self {
        Self {
            p,
            x,
            ..Self::default()
        }
    }

    pub fn params(&self) -> Params {
        Params {
            p: self.p,
            q: self.q,
            c: self.c,
        }
    }
}

/// `f − g` at each point.
pub fn probe_difference(f: FnId, g: FnId, points: &[GridPoint]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|pt| Ok(eval(f, pt.params(), pt.x)? - eval(g, pt.params(), pt.x)?))
        .collect()
}

/// One row of probe output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub fn_id: String,
    pub p: f64,
    pub q: f64,
    pub c: f64,
    pub x: f64,
    pub value: f64,
}

/// Writes probe rows as CSV with columns `fn_id,p,q,c,x,value`.
pub fn write_probe_csv<W: Write>(rows: &[ProbeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

/// A reference spot value.
#[derive(Debug, Clone, PartialEq)]
pub struct PinnedValue {
    pub label: &'static str,
    pub f: FnId,
    /// Subtracted from `f` when present.
    pub g: Option<FnId>,
    pub point: GridPoint,
    pub expected: f64,
}

impl PinnedValue {
    pub fn compute(&self) -> Result<f64> {
        let v = eval(self.f, self.point.params(), self.point.x)?;
        Ok(match self.g {
            Some(g) => v - eval(g, self.point.params(), self.point.x)?,
            None => v,
        })
    }
}

/// Absolute tolerance for the pinned values, which carry six significant
/// digits.
pub const REMARK_TOL: f64 = 1e-5;

/// Groups of pinned reference values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RemarkId {
    /// No ordering between `x^{p/2} ln x` and `((x+1)/2)^{p−1}(x−1)`.
    R23i,
    /// No ordering between `((x^p+1)/2) ln x` and `((x^{p−1}+1)/2)(x−1)`.
    R23ii,
    /// Sign changes of `γ_p` and `δ_p`.
    R25,
}

impl RemarkId {
    pub const ALL: [RemarkId; 3] = [RemarkId::R23i, RemarkId::R23ii, RemarkId::R25];

    pub fn name(self) -> &'static str {
        match self {
            RemarkId::R23i => "2.3i",
            RemarkId::R23ii => "2.3ii",
            RemarkId::R25 => "2.5",
        }
    }

    pub fn pinned(self) -> Vec<PinnedValue> {
        let at = GridPoint::px;
        match self {
            RemarkId::R23i => vec![
                PinnedValue {
                    label: "p=1/4, x=3",
                    f: FnId::ThmLower,
                    g: Some(FnId::HhLower),
                    point: at(0.25, 3.0),
                    expected: 0.071123,
                },
                PinnedValue {
                    label: "p=3/4, x=3",
                    f: FnId::ThmLower,
                    g: Some(FnId::HhLower),
                    point: at(0.75, 3.0),
                    expected: -0.023104,
                },
            ],
            RemarkId::R23ii => vec![
                PinnedValue {
                    label: "p=1/4, x=3",
                    f: FnId::HhUpper,
                    g: Some(FnId::ThmUpper),
                    point: at(0.25, 3.0),
                    expected: 0.166458,
                },
                PinnedValue {
                    label: "p=3/4, x=3",
                    f: FnId::HhUpper,
                    g: Some(FnId::ThmUpper),
                    point: at(0.75, 3.0),
                    expected: -0.0416177,
                },
            ],
            RemarkId::R25 => vec![
                PinnedValue {
                    label: "gamma_{1/2}(3/2)",
                    f: FnId::Gamma,
                    g: None,
                    point: at(0.5, 1.5),
                    expected: 0.00118777,
                },
                PinnedValue {
                    label: "gamma_{1/2}(5/2)",
                    f: FnId::Gamma,
                    g: None,
                    point: at(0.5, 2.5),
                    expected: -0.0118756,
                },
                PinnedValue {
                    label: "delta_{1/2}(3/2)",
                    f: FnId::Delta,
                    g: None,
                    point: at(0.5, 1.5),
                    expected: -0.890458,
                },
                PinnedValue {
                    label: "delta_{1/2}(5/2)",
                    f: FnId::Delta,
                    g: None,
                    point: at(0.5, 2.5),
                    expected: 0.795489,
                },
            ],
        }
    }
}

impl FromStr for RemarkId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RemarkId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown remark `{s}` (2.3i, 2.3ii, 2.5)")))
    }
}

/// Scalar inequality chains `m₀ ≤ m₁ ≤ …` and their hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChainId {
    /// `x^{p/2} ln x ≤ t_p(x) ≤ ((x^p+1)/2) ln x` for `x ≥ 1`.
    LogBounds,
    /// The same chain reversed for `0 < x ≤ 1`.
    LogBoundsReversed,
    /// `((x+1)/2)^{p−1}(x−1) ≤ t_p(x) ≤ ((x^{p−1}+1)/2)(x−1)`, `x ≥ 1`, `0 < p ≤ 1`.
    PowerBounds,
    /// `l_p ≤ k_p ≤ c_p ≤ l_p + (t−1)²/4` for `t ≥ 1`.
    Correction,
    /// `α_p ≤ t_p ≤ β_p` (with the `(t−1)` factor restored in `β_p`).
    AlphaBeta,
    /// `{(1−p) + p/t}^{-1} ≤ t^p ≤ (1−p) + pt` for `t > 0`, `p ∈ [0,1]`.
    WeightedMeans,
    /// `t_p(x) ≤ t_q(x)` for `p ≤ q`.
    TsallisMonotone,
    /// `(1−p) + pt ≥ (t−1)/ln t` on the two regions of the lemma.
    ArithLogMean,
    /// `ln x ≥ (x−1)/((1−p)x+p) ≥ 0` (`x ≥ 1`, `p ≤ ½`) and its mirror.
    LogHarmonic,
}

impl ChainId {
    pub const ALL: [ChainId; 9] = [
        ChainId::LogBounds,
        ChainId::LogBoundsReversed,
        ChainId::PowerBounds,
        ChainId::Correction,
        ChainId::AlphaBeta,
        ChainId::WeightedMeans,
        ChainId::TsallisMonotone,
        ChainId::ArithLogMean,
        ChainId::LogHarmonic,
    ];

    fn nonzero_unit(p: f64) -> bool {
        (-1.0..=1.0).contains(&p) && p != 0.0
    }

    /// Whether a grid point satisfies the chain's hypotheses.
    pub fn admits(self, pt: &GridPoint) -> bool {
        let GridPoint { p, q, x, .. } = *pt;
        if !(x > 0.0 && x.is_finite()) {
            return false;
        }
        match self {
            ChainId::LogBounds | ChainId::Correction | ChainId::AlphaBeta => {
                x >= 1.0 && Self::nonzero_unit(p)
            }
            ChainId::LogBoundsReversed => x <= 1.0 && Self::nonzero_unit(p),
            ChainId::PowerBounds => x >= 1.0 && p > 0.0 && p <= 1.0,
            ChainId::WeightedMeans => (0.0..=1.0).contains(&p),
            ChainId::TsallisMonotone => Self::nonzero_unit(p) && Self::nonzero_unit(q) && p <= q,
            ChainId::ArithLogMean => {
                (x <= 1.0 && (0.0..=0.5).contains(&p)) || (x >= 1.0 && (0.5..=1.0).contains(&p))
            }
            ChainId::LogHarmonic => {
                (x >= 1.0 && (0.0..=0.5).contains(&p)) || (x <= 1.0 && (0.5..=1.0).contains(&p))
            }
        }
    }

    /// Chain members in claimed nondecreasing order.
    pub fn members(self, pt: &GridPoint) -> Vec<f64> {
        let GridPoint { p, q, x, .. } = *pt;
        let lg = x.ln();
        match self {
            ChainId::LogBounds => vec![
                x.powf(p / 2.0) * lg,
                tsallis(p, x),
                0.5 * (x.powf(p) + 1.0) * lg,
            ],
            ChainId::LogBoundsReversed => vec![
                0.5 * (x.powf(p) + 1.0) * lg,
                tsallis(p, x),
                x.powf(p / 2.0) * lg,
            ],
            ChainId::PowerBounds => vec![
                mid(x).powf(p - 1.0) * (x - 1.0),
                tsallis(p, x),
                0.5 * (x.powf(p - 1.0) + 1.0) * (x - 1.0),
            ],
            ChainId::Correction => {
                let l = l_p(p, x);
                vec![l, k_p(p, x), c_p(p, x), l + 0.25 * (x - 1.0).powi(2)]
            }
            ChainId::AlphaBeta => vec![alpha_p(p, x), tsallis(p, x), beta_p_corrected(p, x)],
            ChainId::WeightedMeans => vec![harm(p, x), x.powf(p), arith(p, x)],
            ChainId::TsallisMonotone => vec![tsallis(p, x), tsallis(q, x)],
            ChainId::ArithLogMean => {
                let lm = if x == 1.0 { 1.0 } else { (x - 1.0) / lg };
                vec![lm, arith(p, x)]
            }
            ChainId::LogHarmonic => {
                let r = (x - 1.0) / ((1.0 - p) * x + p);
                if x >= 1.0 && p <= 0.5 {
                    vec![0.0, r, lg]
                } else {
                    vec![lg, r, 0.0]
                }
            }
        }
    }
}

/// Outcome of a chain check over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    /// Smallest `(upper − lower) / max(1, |upper|, |lower|)` over adjacent
    /// members and admissible points.
    pub worst: f64,
    pub worst_point: GridPoint,
    pub checked: usize,
    pub rejected: usize,
}

/// Checks `chain` on every admissible grid point. Points outside the
/// hypotheses are skipped and counted; a grid with no admissible point
/// is a `HypothesisError`.
pub fn verify_scalar_chain(chain: ChainId, grid: &[GridPoint]) -> Result<ChainReport> {
    let mut report = ChainReport {
        worst: f64::INFINITY,
        worst_point: GridPoint::default(),
        checked: 0,
        rejected: 0,
    };
    for pt in grid {
        if !chain.admits(pt) {
            report.rejected += 1;
            continue;
        }
        report.checked += 1;
        let m = chain.members(pt);
        for w in m.windows(2) {
            let gap = (w[1] - w[0]) / w[0].abs().max(w[1].abs()).max(1.0);
            if gap.is_nan() || gap < report.worst {
                report.worst = gap;
                report.worst_point = *pt;
            }
        }
    }
    if report.checked == 0 {
        return Err(Error::HypothesisError(format!(
            "{chain:?}: none of {} grid points satisfy the hypotheses",
            grid.len()
        )));
    }
    Ok(report)
}

/// Default probe grid: `x` log-spaced on `[1+1e-3, 1e3]` (mirrored below 1
/// when `below_one`), `p` on a 101-point grid of `[p_lo, p_hi]` with
/// `|p| < 1e-3` dropped.
pub fn default_grid(p_lo: f64, p_hi: f64, nx: usize, below_one: bool) -> Vec<GridPoint> {
    let xs = log_space(1.0 + 1e-3, 1e3, nx);
    let ps = lin_space(p_lo, p_hi, 101);
    let mut out = Vec::with_capacity(xs.len() * ps.len() * 2);
    for &p in ps.iter().filter(|p| p.abs() >= 1e-3) {
        for &x in &xs {
            out.push(GridPoint::px(p, x));
            if below_one {
                out.push(GridPoint::px(p, 1.0 / x));
            }
        }
    }
    out
}

/// Grid over `(p, q, x)` with `p ≤ q` both on a grid of `[lo, hi]`.
pub fn pair_grid(lo: f64, hi: f64, np: usize, xs: &[f64]) -> Vec<GridPoint> {
    let ps: Vec<f64> = lin_space(lo, hi, np)
        .into_iter()
        .filter(|p| p.abs() >= 1e-3)
        .collect();
    let mut out = Vec::new();
    for (i, &p) in ps.iter().enumerate() {
        for &q in &ps[i..] {
            for &x in xs {
                out.push(GridPoint { p, q, c: 0.0, x });
            }
        }
    }
    out
}

pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    lin_space(a, b, n).into_iter().map(f64::exp).collect()
}

/// Observed sign of a function over a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignClass {
    NonNegative,
    NonPositive,
    /// Witnesses of both signs above noise.
    Mixed,
}

/// Labeled regions from the sign lemmas, each with the function it
/// concerns and the claimed sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignRegion {
    /// `lemma31_g ≤ 0` for `x ≥ 1`.
    Lemma31Above,
    /// `lemma31_g ≤ 0` for `1/e ≤ x ≤ 1`.
    Lemma31Below,
    /// `lemma33_g ≥ 0` for `0 < x ≤ 1`.
    Lemma33Below,
    /// `lemma33_g ≤ 0` for `x ≥ 1`.
    Lemma33Above,
    /// `0 < x ≤ 1`, `0 < c ≤ ½`: `g ≥ 0`.
    Lemma35A,
    /// `1 ≤ x ≤ e^{(1−2c)/c}`, `0 < c ≤ ½`: `g ≥ 0`.
    Lemma35B,
    /// `x > 0`, `c ≤ 0`: `g ≥ 0`.
    Lemma35C,
    /// `e^{(1−2c)/c} ≤ x ≤ 1`, `c ≥ ½`: `g ≤ 0`.
    Lemma35D,
    /// `x ≥ 1`, `c ≥ ½`: `g ≤ 0`.
    Lemma35E,
    /// `l(c) ≥ 0` for `c ≤ ½`, `c ≠ 0`.
    Lemma35LBelow,
    /// `l(c) ≤ 0` for `c ≥ ½`.
    Lemma35LAbove,
    /// `h_p(t) = k_p − l_p ≥ 0` for `t ≥ 1`.
    HpNonNegative,
    /// `g_p(t) ≥ 0` for `t ≥ 1`.
    GpNonNegative,
    /// `f₂(p, x) ≥ 0` for `0 < p ≤ 1`, `0 < x ≤ 1`.
    Prop43F2NonNegative,
    /// `−(ps+1)ln(s+1) − s ≤ 0` for `s ≥ 0`, `0 < p ≤ 1`.
    Prop43Derivative,
}

impl SignRegion {
    pub const ALL: [SignRegion; 15] = [
        SignRegion::Lemma31Above,
        SignRegion::Lemma31Below,
        SignRegion::Lemma33Below,
        SignRegion::Lemma33Above,
        SignRegion::Lemma35A,
        SignRegion::Lemma35B,
        SignRegion::Lemma35C,
        SignRegion::Lemma35D,
        SignRegion::Lemma35E,
        SignRegion::Lemma35LBelow,
        SignRegion::Lemma35LAbove,
        SignRegion::HpNonNegative,
        SignRegion::GpNonNegative,
        SignRegion::Prop43F2NonNegative,
        SignRegion::Prop43Derivative,
    ];

    /// The function whose sign is claimed.
    pub fn function(self) -> FnId {
        use SignRegion::*;
        match self {
            Lemma31Above | Lemma31Below => FnId::Lemma31G,
            Lemma33Below | Lemma33Above => FnId::Lemma33G,
            Lemma35A | Lemma35B | Lemma35C | Lemma35D | Lemma35E => FnId::Lemma35G,
            Lemma35LBelow | Lemma35LAbove => FnId::Lemma35L,
            HpNonNegative => FnId::H,
            GpNonNegative => FnId::G,
            Prop43F2NonNegative => FnId::Prop43F2,
            // evaluated in closed form by `value`, no FnId twin
            Prop43Derivative => FnId::Prop43F1,
        }
    }

    pub fn claimed(self) -> SignClass {
        use SignRegion::*;
        match self {
            Lemma33Below | Lemma35A | Lemma35B | Lemma35C | Lemma35LBelow | HpNonNegative
            | GpNonNegative | Prop43F2NonNegative => SignClass::NonNegative,
            _ => SignClass::NonPositive,
        }
    }

    /// Dense sample of the region with roughly `resolution²` points (or
    /// `resolution` for one-dimensional regions).
    pub fn sample(self, resolution: usize) -> Vec<GridPoint> {
        use SignRegion::*;
        let r = resolution.max(2);
        let e_inv = (-1f64).exp();
        let one_d = |xs: Vec<f64>| xs.into_iter().map(|x| GridPoint::px(0.0, x)).collect();
        let two_d = |cs: Vec<f64>, xs: &dyn Fn(f64) -> Vec<f64>| {
            let mut out = Vec::new();
            for c in cs {
                for x in xs(c) {
                    out.push(GridPoint {
                        p: 0.0,
                        q: 0.0,
                        c,
                        x,
                    });
                }
            }
            out
        };
        let n1 = r * r;
        match self {
            Lemma31Above | Lemma33Above => one_d(log_space(1.0, 1e6, n1)),
            Lemma31Below => one_d(lin_space(e_inv, 1.0, n1)),
            Lemma33Below => one_d(log_space(1e-12, 1.0, n1)),
            Lemma35A => two_d(lin_space(1e-3, 0.5, r), &|_| log_space(1e-12, 1.0, r)),
            Lemma35B => two_d(lin_space(0.05, 0.5, r), &|c| {
                let k = (1.0 - 2.0 * c) / c;
                lin_space(0.0, k, r).into_iter().map(f64::exp).collect()
            }),
            Lemma35C => two_d(lin_space(-4.0, 0.0, r), &|_| log_space(1e-9, 1e6, r)),
            Lemma35D => two_d(lin_space(0.5, 4.0, r), &|c| {
                let k = (1.0 - 2.0 * c) / c;
                lin_space(k, 0.0, r).into_iter().map(f64::exp).collect()
            }),
            Lemma35E => two_d(lin_space(0.5, 4.0, r), &|_| log_space(1.0, 1e6, r)),
            Lemma35LBelow => {
                let mut cs = lin_space(-4.0, -1e-3, n1 / 2);
                cs.extend(lin_space(0.02, 0.5, n1 - n1 / 2));
                cs.into_iter()
                    .map(|c| GridPoint {
                        c,
                        x: c,
                        ..GridPoint::default()
                    })
                    .collect()
            }
            Lemma35LAbove => lin_space(0.5, 4.0, n1)
                .into_iter()
                .map(|c| GridPoint {
                    c,
                    x: c,
                    ..GridPoint::default()
                })
                .collect(),
            HpNonNegative | GpNonNegative => {
                let mut out = Vec::new();
                for p in lin_space(-1.0, 1.0, r)
                    .into_iter()
                    .filter(|p| p.abs() >= 1e-3)
                {
                    for x in log_space(1.0, 1e3, r) {
                        out.push(GridPoint::px(p, x));
                    }
                }
                out
            }
            Prop43F2NonNegative | Prop43Derivative => {
                let mut out = Vec::new();
                for p in lin_space(1e-3, 1.0, r) {
                    for x in log_space(1e-6, 1.0, r) {
                        out.push(GridPoint::px(p, x));
                    }
                }
                out
            }
        }
    }

    /// Function value at a sample point.
    pub fn value(self, pt: &GridPoint) -> Result<f64> {
        if self == SignRegion::Prop43Derivative {
            let s = 1.0 / pt.x - 1.0;
            return Ok(-(pt.p * s + 1.0) * s.ln_1p() - s);
        }
        eval(self.function(), pt.params(), pt.x)
    }

    /// Rounding noise allowed at a sample point.
    fn noise(self, pt: &GridPoint) -> f64 {
        let x = if self == SignRegion::Prop43Derivative {
            1.0 / pt.x
        } else {
            pt.x.abs()
        };
        let lg = x.ln();
        1e-12 * (x * (1.0 + lg * lg)).max(1.0)
    }
}

/// Result of [`sign_table`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignTable {
    pub region: SignRegion,
    pub class: SignClass,
    pub samples: usize,
    pub min: f64,
    pub max: f64,
}

/// Classifies the sign of the region's function on a dense sample.
///
/// `Mixed` needs witnesses of both signs with `|value| > 1e-10`; values
/// within rounding noise of zero count for either sign.
pub fn sign_table(region: SignRegion, resolution: usize) -> Result<SignTable> {
    let pts = region.sample(resolution);
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut neg, mut pos) = (false, false);
    let (mut below_noise, mut above_noise) = (false, false);
    for pt in &pts {
        let v = region.value(pt)?;
        min = min.min(v);
        max = max.max(v);
        let noise = region.noise(pt);
        neg |= v < -1e-10;
        pos |= v > 1e-10;
        below_noise |= v < -noise;
        above_noise |= v > noise;
    }
    let class = if neg && pos {
        SignClass::Mixed
    } else if !below_noise {
        SignClass::NonNegative
    } else if !above_noise {
        SignClass::NonPositive
    } else {
        SignClass::Mixed
    };
    Ok(SignTable {
        region,
        class,
        samples: pts.len(),
        min,
        max,
    })
}
