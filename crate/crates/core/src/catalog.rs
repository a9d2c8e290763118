//! Declarative registry of operator inequalities.
//!
//! Each [`InequalityCase`] states `lhs ≤ rhs` in the Loewner order between
//! two expression trees over the pair `(A, B)`, guarded by a hypothesis on
//! the sandwich bounds `u, v` of the contraction and the parameters
//! `p, q, c`. Multi-term chains are split into adjacent pairs, and
//! multi-region statements into one case per region.

use std::cell::OnceCell;
use std::fmt;
use std::ops;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::means::{self, OperatorPair};
use crate::scalar::Params;
use crate::spd::{self, loewner_leq};

/// Slack applied when testing hypotheses against computed `u, v`.
pub const HYPOTHESIS_SLACK: f64 = 1e-10;

/// Gap above `u = 1` required by cases that build the pair `(A, B − A)`.
pub const STRICT_GAP: f64 = 1e-6;

/// Real-valued expression in the case parameters `p, q, c`.
#[derive(Debug, Clone, PartialEq)]
pub enum Num {
    Const(f64),
    P,
    Q,
    C,
    Add(Box<Num>, Box<Num>),
    Sub(Box<Num>, Box<Num>),
    Mul(Box<Num>, Box<Num>),
    Div(Box<Num>, Box<Num>),
    Exp(Box<Num>),
}

impl Num {
    pub fn eval(&self, k: &Params) -> f64 {
        match self {
            Num::Const(x) => *x,
            Num::P => k.p,
            Num::Q => k.q,
            Num::C => k.c,
            Num::Add(a, b) => a.eval(k) + b.eval(k),
            Num::Sub(a, b) => a.eval(k) - b.eval(k),
            Num::Mul(a, b) => a.eval(k) * b.eval(k),
            Num::Div(a, b) => a.eval(k) / b.eval(k),
            Num::Exp(a) => a.eval(k).exp(),
        }
    }

    pub fn exp(self) -> Num {
        Num::Exp(Box::new(self))
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num::Const(x)
    }
}

macro_rules! num_op {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl<T: Into<Num>> ops::$trait<T> for Num {
            type Output = Num;
            fn $method(self, rhs: T) -> Num {
                Num::$variant(Box::new(self), Box::new(rhs.into()))
            }
        }
    };
}
num_op!(Add, add, Add);
num_op!(Sub, sub, Sub);
num_op!(Mul, mul, Mul);
num_op!(Div, div, Div);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Const(x) => write!(f, "{x}"),
            Num::P => f.write_str("p"),
            Num::Q => f.write_str("q"),
            Num::C => f.write_str("c"),
            Num::Add(a, b) => write!(f, "({a} + {b})"),
            Num::Sub(a, b) => write!(f, "({a} - {b})"),
            Num::Mul(a, b) => write!(f, "{a}*{b}"),
            Num::Div(a, b) => write!(f, "{a}/{b}"),
            Num::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

fn k(x: f64) -> Num {
    Num::Const(x)
}

/// Which pair an entropy or mean is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairSel {
    /// `(A, B)`.
    Base,
    /// `(A, (A+B)/2)`.
    Midpoint,
    /// `(A, B − A)`; only defined when `B − A` is strictly positive.
    Difference,
}

/// Operator expression over a pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    A,
    B,
    /// `A ∇_w B`.
    Arith(Num),
    /// `A !_w B`.
    Harm(Num),
    /// `A ♮_w B` (`#_w` for `w ∈ [0,1]`).
    Natural(PairSel, Num),
    /// `S(A|B)`.
    RelEntropy(PairSel),
    /// `S_w(A|B)`.
    GenEntropy(PairSel, Num),
    /// `T_w(A|B)` for any real `w`, `T_0 = S`.
    Tsallis(PairSel, Num),
    /// `(T_a − T_b)/(a − b)`, continuous across `a = b`.
    TsallisSlope(PairSel, Num, Num),
    /// `A^{1/2} (log C)² A^{1/2}`.
    LogSquared,
    /// `A B⁻¹ A` by direct products.
    ABinvA,
    /// `B A⁻¹ B` by direct products.
    BAinvB,
    /// `(B A⁻¹ − I)·X`, symmetrized.
    RatioMinusIdentityTimes(Box<Expr>),
    Scale(Num, Box<Expr>),
    Sum(Vec<Expr>),
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match self {
            Expr::Sum(mut v) => {
                v.push(rhs);
                Expr::Sum(v)
            }
            e => Expr::Sum(vec![e, rhs]),
        }
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Scale(k(-1.0), Box::new(self))
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl<T: Into<Num>> ops::Mul<T> for Expr {
    type Output = Expr;
    fn mul(self, s: T) -> Expr {
        Expr::Scale(s.into(), Box::new(self))
    }
}

impl<T: Into<Num>> ops::Div<T> for Expr {
    type Output = Expr;
    fn div(self, s: T) -> Expr {
        Expr::Scale(k(1.0) / s, Box::new(self))
    }
}

struct EvalCtx<'a> {
    base: &'a OperatorPair,
    params: Params,
    midpoint: OnceCell<OperatorPair>,
    difference: OnceCell<OperatorPair>,
}

impl EvalCtx<'_> {
    fn pair(&self, sel: PairSel) -> Result<&OperatorPair> {
        match sel {
            PairSel::Base => Ok(self.base),
            PairSel::Midpoint => {
                if self.midpoint.get().is_none() {
                    let _ = self.midpoint.set(self.base.midpoint()?);
                }
                Ok(self.midpoint.get().expect("set above"))
            }
            PairSel::Difference => {
                if self.difference.get().is_none() {
                    let _ = self.difference.set(self.base.difference()?);
                }
                Ok(self.difference.get().expect("set above"))
            }
        }
    }

    fn eval(&self, e: &Expr) -> Result<Matrix> {
        let w = |n: &Num| n.eval(&self.params);
        let base = self.base;
        Ok(match e {
            Expr::A => base.a().matrix().clone(),
            Expr::B => base.b().matrix().clone(),
            Expr::Arith(n) => means::arithmetic_mean(base, w(n))?.into_matrix(),
            Expr::Harm(n) => means::harmonic_mean(base, w(n))?.into_matrix(),
            Expr::Natural(sel, n) => {
                means::natural_power_mean(self.pair(*sel)?, w(n))?.into_matrix()
            }
            Expr::RelEntropy(sel) => means::relative_operator_entropy(self.pair(*sel)?)?,
            Expr::GenEntropy(sel, n) => means::generalized_entropy(self.pair(*sel)?, w(n))?,
            Expr::Tsallis(sel, n) => means::tsallis_unchecked(self.pair(*sel)?, w(n))?,
            Expr::TsallisSlope(sel, a, b) => {
                means::tsallis_divided_difference(self.pair(*sel)?, w(a), w(b))?
            }
            Expr::LogSquared => means::log_squared(base)?,
            Expr::ABinvA => {
                let a = base.a().matrix();
                let binv = spd::mat_inv(base.b())?;
                a.matmul(binv.matrix())?.matmul(a)?.symmetrize()
            }
            Expr::BAinvB => {
                let b = base.b().matrix();
                let ainv = spd::mat_inv(base.a())?;
                b.matmul(ainv.matrix())?.matmul(b)?.symmetrize()
            }
            Expr::RatioMinusIdentityTimes(x) => {
                let ainv = spd::mat_inv(base.a())?;
                let r = &base.b().matrix().matmul(ainv.matrix())? - &Matrix::identity(base.dim());
                r.matmul(&self.eval(x)?)?.symmetrize()
            }
            Expr::Scale(n, x) => self.eval(x)?.scale(w(n)),
            Expr::Sum(terms) => {
                let mut acc = Matrix::zeros(base.dim());
                for t in terms {
                    acc = &acc + &self.eval(t)?;
                }
                acc
            }
        })
    }
}

/// Evaluates an expression on a pair.
pub fn eval_expr(expr: &Expr, pair: &OperatorPair, params: &Params) -> Result<Matrix> {
    let ctx = EvalCtx {
        base: pair,
        params: *params,
        midpoint: OnceCell::new(),
        difference: OnceCell::new(),
    };
    ctx.eval(expr)
}

/// Admissible values of one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
    /// Excludes 0 from the interior.
    pub nonzero: bool,
}

impl ParamRange {
    pub const fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
            nonzero: false,
        }
    }

    /// `(lo, hi]`.
    pub const fn left_open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: true,
            hi_open: false,
            nonzero: false,
        }
    }

    /// `[lo, hi)`.
    pub const fn right_open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: false,
            hi_open: true,
            nonzero: false,
        }
    }

    pub const fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
            nonzero: false,
        }
    }

    /// `[−1, 1] \ {0}`.
    pub const fn unit_nonzero() -> Self {
        Self {
            lo: -1.0,
            hi: 1.0,
            lo_open: false,
            hi_open: false,
            nonzero: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let lo_ok = if self.lo_open {
            x > self.lo
        } else {
            x >= self.lo
        };
        let hi_ok = if self.hi_open {
            x < self.hi
        } else {
            x <= self.hi
        };
        x.is_finite() && lo_ok && hi_ok && !(self.nonzero && x == 0.0)
    }
}

impl fmt::Display for ParamRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )?;
        if self.nonzero {
            f.write_str(" \\ {0}")?;
        }
        Ok(())
    }
}

/// One conjunctive region of a hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub label: &'static str,
    pub p: Option<ParamRange>,
    pub q: Option<ParamRange>,
    pub c: Option<ParamRange>,
    /// Requires `p ≤ q`.
    pub ordered: bool,
    pub u_min: Option<Num>,
    pub u_max: Option<Num>,
    pub v_min: Option<Num>,
    pub v_max: Option<Num>,
    /// `u` must exceed `u_min` by [`STRICT_GAP`] so that `B − A > 0`.
    pub strict: bool,
}

impl Region {
    fn new(label: &'static str) -> Self {
        Self {
            label,
            p: None,
            q: None,
            c: None,
            ordered: false,
            u_min: None,
            u_max: None,
            v_min: None,
            v_max: None,
            strict: false,
        }
    }

    fn p(mut self, r: ParamRange) -> Self {
        self.p = Some(r);
        self
    }

    /// `p ≤ q`, both in `r`.
    fn pq(mut self, r: ParamRange) -> Self {
        self.p = Some(r);
        self.q = Some(r);
        self.ordered = true;
        self
    }

    fn c(mut self, r: ParamRange) -> Self {
        self.c = Some(r);
        self
    }

    fn u_at_least(mut self, n: impl Into<Num>) -> Self {
        self.u_min = Some(n.into());
        self
    }

    fn u_at_most(mut self, n: impl Into<Num>) -> Self {
        self.u_max = Some(n.into());
        self
    }

    fn v_at_least(mut self, n: impl Into<Num>) -> Self {
        self.v_min = Some(n.into());
        self
    }

    fn v_at_most(mut self, n: impl Into<Num>) -> Self {
        self.v_max = Some(n.into());
        self
    }

    fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    /// Checks the region against computed sandwich bounds and parameters.
    pub fn admits(&self, u: f64, v: f64, k: &Params) -> bool {
        let param_ok = |r: &Option<ParamRange>, x: f64| r.as_ref().is_none_or(|r| r.contains(x));
        if !(param_ok(&self.p, k.p) && param_ok(&self.q, k.q) && param_ok(&self.c, k.c)) {
            return false;
        }
        if self.ordered && k.p > k.q {
            return false;
        }
        let s = HYPOTHESIS_SLACK;
        let gap = if self.strict { STRICT_GAP } else { 0.0 };
        let ge =
            |x: f64, b: &Option<Num>, gap: f64| b.as_ref().is_none_or(|b| x >= b.eval(k) + gap - s);
        let le = |x: f64, b: &Option<Num>| b.as_ref().is_none_or(|b| x <= b.eval(k) + s);
        u > 0.0
            && u <= v
            && ge(u, &self.u_min, gap)
            && le(u, &self.u_max)
            && ge(v, &self.v_min, 0.0)
            && le(v, &self.v_max)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(b) = &self.u_min {
            parts.push(format!(
                "u >= {b}{}",
                if self.strict { " (strict)" } else { "" }
            ));
        }
        if let Some(b) = &self.u_max {
            parts.push(format!("u <= {b}"));
        }
        if let Some(b) = &self.v_min {
            parts.push(format!("v >= {b}"));
        }
        if let Some(b) = &self.v_max {
            parts.push(format!("v <= {b}"));
        }
        if let Some(r) = &self.p {
            parts.push(format!("p in {r}"));
        }
        if let Some(r) = &self.q {
            parts.push(format!("q in {r}"));
        }
        if self.ordered {
            parts.push("p <= q".into());
        }
        if let Some(r) = &self.c {
            parts.push(format!("c in {r}"));
        }
        write!(f, "{}", parts.join(", "))
    }
}

/// Disjunction of regions.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub regions: Vec<Region>,
}

impl Hypothesis {
    fn one(r: Region) -> Self {
        Self { regions: vec![r] }
    }

    pub fn admits(&self, u: f64, v: f64, k: &Params) -> bool {
        self.regions.iter().any(|r| r.admits(u, v, k))
    }

    pub fn uses_p(&self) -> bool {
        self.regions.iter().any(|r| r.p.is_some())
    }

    pub fn uses_q(&self) -> bool {
        self.regions.iter().any(|r| r.q.is_some())
    }

    pub fn uses_c(&self) -> bool {
        self.regions.iter().any(|r| r.c.is_some())
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.regions.iter().map(|r| format!("({r})")).collect();
        f.write_str(&parts.join(" or "))
    }
}

/// Orientation of a case relative to its registered statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expected {
    Holds,
    ReversedUnderDualHypothesis,
}

const DUAL_SUFFIX: &str = "/rev";

/// One Loewner inequality `lhs ≤ rhs` under a hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCase {
    pub id: String,
    /// Statement group the case was split from, e.g. `T2`.
    pub group: &'static str,
    /// Human-readable form of `lhs ≤ rhs`.
    pub statement: String,
    pub hypothesis: Hypothesis,
    pub lhs: Expr,
    pub rhs: Expr,
    pub expected: Expected,
    /// Hypothesis under which the reverse inequality holds, if stated.
    pub dual_hypothesis: Option<Hypothesis>,
}

impl InequalityCase {
    fn new(
        id: &str,
        group: &'static str,
        statement: &str,
        hyp: Hypothesis,
        lhs: Expr,
        rhs: Expr,
    ) -> Self {
        Self {
            id: id.to_string(),
            group,
            statement: statement.to_string(),
            hypothesis: hyp,
            lhs,
            rhs,
            expected: Expected::Holds,
            dual_hypothesis: None,
        }
    }

    fn with_dual(mut self, h: Hypothesis) -> Self {
        self.dual_hypothesis = Some(h);
        self
    }

    pub fn has_dual(&self) -> bool {
        self.dual_hypothesis.is_some()
    }

    /// Whether the case id or group matches a filter: exact id, group name,
    /// `*`, or a trailing-`*` prefix glob.
    pub fn matches(&self, filter: &str) -> bool {
        if filter == "*" || filter == "all" {
            return true;
        }
        if let Some(prefix) = filter.strip_suffix('*') {
            return self.id.starts_with(prefix);
        }
        self.id == filter || self.group == filter
    }
}

/// The reverse inequality under the dual hypothesis.
pub fn dual(case: &InequalityCase) -> Result<InequalityCase> {
    let dual_h = case
        .dual_hypothesis
        .clone()
        .ok_or_else(|| Error::NoDual(case.id.clone()))?;
    let (id, expected) = match case.id.strip_suffix(DUAL_SUFFIX) {
        Some(base) => (base.to_string(), Expected::Holds),
        None => (
            format!("{}{DUAL_SUFFIX}", case.id),
            Expected::ReversedUnderDualHypothesis,
        ),
    };
    let statement = match case.statement.split_once(" <= ") {
        Some((l, r)) => format!("{r} <= {l}"),
        None => case.statement.clone(),
    };
    Ok(InequalityCase {
        id,
        group: case.group,
        statement,
        hypothesis: dual_h,
        lhs: case.rhs.clone(),
        rhs: case.lhs.clone(),
        expected,
        dual_hypothesis: Some(case.hypothesis.clone()),
    })
}

/// Every case in the catalog.
pub fn catalog() -> Vec<InequalityCase> {
    use Expr::*;
    use PairSel::*;
    let p = || Num::P;
    let q = || Num::Q;
    let c = || Num::C;
    let t = |w: Num| Tsallis(Base, w);
    let s = || RelEntropy(Base);
    let sp = |w: Num| GenEntropy(Base, w);
    let nat = |w: Num| Natural(Base, w);
    let unit_nz = ParamRange::unit_nonzero();
    let pos = ParamRange::left_open(0.0, 1.0);
    let neg = ParamRange::right_open(-1.0, 0.0);
    let u_ge_1 = |label| Region::new(label).u_at_least(1.0);
    let v_le_1 = |label| Region::new(label).v_at_most(1.0);

    let mut cases = Vec::new();

    // Harmonic ≤ geometric ≤ arithmetic.
    let h1 = Hypothesis::one(Region::new("p in [0,1]").p(ParamRange::closed(0.0, 1.0)));
    cases.push(InequalityCase::new(
        "H1.hg",
        "H1",
        "A !_p B <= A #_p B",
        h1.clone(),
        Harm(p()),
        nat(p()),
    ));
    cases.push(InequalityCase::new(
        "H1.ga",
        "H1",
        "A #_p B <= A nabla_p B",
        h1,
        nat(p()),
        Arith(p()),
    ));

    // A − AB⁻¹A ≤ T_p ≤ B − A.
    let h2 = Hypothesis::one(Region::new("p != 0").p(unit_nz));
    cases.push(InequalityCase::new(
        "H2.lo",
        "H2",
        "A - A B^-1 A <= T_p",
        h2.clone(),
        A - ABinvA,
        t(p()),
    ));
    cases.push(InequalityCase::new(
        "H2.hi",
        "H2",
        "T_p <= B - A",
        h2,
        t(p()),
        B - A,
    ));

    // Monotonicity of T_p in p.
    cases.push(InequalityCase::new(
        "T0",
        "T0",
        "T_p <= T_q",
        Hypothesis::one(Region::new("p <= q").pq(unit_nz)),
        t(p()),
        t(q()),
    ));

    // Hermite–Hadamard bounds under A ≤ B.
    let ta = Hypothesis::one(u_ge_1("u >= 1").p(unit_nz));
    cases.push(InequalityCase::new(
        "TA.lo",
        "TA",
        "A^1/2 ((C+I)/2)^(p-1) (C-I) A^1/2 <= T_p",
        ta.clone(),
        RatioMinusIdentityTimes(Box::new(Natural(Midpoint, p() - 1.0))),
        t(p()),
    ));
    cases.push(InequalityCase::new(
        "TA.hi",
        "TA",
        "T_p <= (A #_p B - A natural_(p-1) B + B - A)/2",
        ta,
        t(p()),
        (nat(p()) - nat(p() - 1.0) + B - A) * 0.5,
    ));

    // S_{p/2} ≤ T_p ≤ (S + S_p)/2 under u ≥ 1, reversed under v ≤ 1.
    let t1 = Hypothesis::one(u_ge_1("u >= 1").p(unit_nz));
    let t1d = Hypothesis::one(v_le_1("v <= 1").p(unit_nz));
    cases.push(
        InequalityCase::new(
            "T1.lo",
            "T1",
            "S_(p/2) <= T_p",
            t1.clone(),
            sp(p() / 2.0),
            t(p()),
        )
        .with_dual(t1d.clone()),
    );
    cases.push(
        InequalityCase::new(
            "T1.hi",
            "T1",
            "T_p <= (S + S_p)/2",
            t1,
            t(p()),
            (s() + sp(p())) * 0.5,
        )
        .with_dual(t1d),
    );

    // S ≤ S_{p/2} ≤ T_p ≤ (S + S_p)/2 ≤ S_p for 0 < p ≤ 1, u ≥ 1.
    let t1r = Hypothesis::one(u_ge_1("u >= 1, 0 < p <= 1").p(pos));
    let t1rd = Hypothesis::one(v_le_1("v <= 1, -1 <= p < 0").p(neg));
    let chain = [
        ("S", s()),
        ("S_(p/2)", sp(p() / 2.0)),
        ("T_p", t(p())),
        ("(S + S_p)/2", (s() + sp(p())) * 0.5),
        ("S_p", sp(p())),
    ];
    for (i, w) in chain.windows(2).enumerate() {
        cases.push(
            InequalityCase::new(
                &format!("T1R.{}", i + 1),
                "T1R",
                &format!("{} <= {}", w[0].0, w[1].0),
                t1r.clone(),
                w[0].1.clone(),
                w[1].1.clone(),
            )
            .with_dual(t1rd.clone()),
        );
    }

    // Four-term chain with the ♮₂ correction, u ≥ 1.
    let t2 = Hypothesis::one(u_ge_1("u >= 1 (strict)").p(unit_nz).strict());
    let half_gap = (t(p()) - t(p() - 1.0)) * 0.5;
    let mid_gap = (Tsallis(Midpoint, p()) - Tsallis(Midpoint, p() - 1.0)) * 4.0;
    let slope = TsallisSlope(Base, p(), k(1.0));
    let corrected = half_gap.clone() + Natural(Difference, k(2.0)) * 0.25;
    let chain = [
        ("(T_p - T_(p-1))/2", half_gap),
        ("4 {T_p(A|M) - T_(p-1)(A|M)}", mid_gap),
        ("(T_p - T_1)/(p - 1)", slope),
        ("(T_p - T_(p-1))/2 + A natural_2 (B-A) / 4", corrected),
    ];
    for (i, w) in chain.windows(2).enumerate() {
        cases.push(InequalityCase::new(
            &format!("T2.{}", i + 1),
            "T2",
            &format!("{} <= {}", w[0].0, w[1].0),
            t2.clone(),
            w[0].1.clone(),
            w[1].1.clone(),
        ));
    }

    // Operator form of the α_p / β_p bounds.
    let t3 = Hypothesis::one(u_ge_1("u >= 1").p(unit_nz));
    let three_minus_p = k(3.0) - p();
    let lower = |a_coef: f64| {
        B - A * a_coef
            - BAinvB * ((k(1.0) - p()) / (three_minus_p.clone() * 2.0))
            - nat(p() - 1.0) * (k(1.0) / three_minus_p.clone())
    };
    cases.push(InequalityCase::new(
        "T3.lo",
        "T3",
        "B - 3/2 A - (1-p)/(2(3-p)) B A^-1 B - 1/(3-p) A natural_(p-1) B <= T_p",
        t3.clone(),
        lower(1.5),
        t(p()),
    ));
    cases.push(InequalityCase::new(
        "T3.lo_alpha",
        "T3",
        "B - 1/2 A - (1-p)/(2(3-p)) B A^-1 B - 1/(3-p) A natural_(p-1) B <= T_p",
        t3.clone(),
        lower(0.5),
        t(p()),
    ));
    cases.push(InequalityCase::new(
        "T3.hi",
        "T3",
        "T_p <= B - A + 2 (B A^-1 - I) A natural_(p-1) M - 4 T_p(A|M)",
        t3,
        t(p()),
        B - A + RatioMinusIdentityTimes(Box::new(Natural(Midpoint, p() - 1.0))) * 2.0
            - Tsallis(Midpoint, p()) * 4.0,
    ));

    // p → 0 limit of the four-term chain.
    let c1 = Hypothesis::one(u_ge_1("u >= 1 (strict)").strict());
    let half_gap = (s() - t(k(-1.0))) * 0.5;
    let chain = [
        ("(S - T_-1)/2", half_gap.clone()),
        (
            "4 {S(A|M) - T_-1(A|M)}",
            (RelEntropy(Midpoint) - Tsallis(Midpoint, k(-1.0))) * 4.0,
        ),
        ("T_1 - S", t(k(1.0)) - s()),
        (
            "(S - T_-1)/2 + A natural_2 (B-A) / 4",
            half_gap + Natural(Difference, k(2.0)) * 0.25,
        ),
    ];
    for (i, w) in chain.windows(2).enumerate() {
        cases.push(InequalityCase::new(
            &format!("C1.{}", i + 1),
            "C1",
            &format!("{} <= {}", w[0].0, w[1].0),
            c1.clone(),
            w[0].1.clone(),
            w[1].1.clone(),
        ));
    }

    // T_p − S_p is nonincreasing in p.
    let f32_p = t(p()) - sp(p());
    let f32_q = t(q()) - sp(q());
    let m1_regions = [
        ("M1.i", u_ge_1("u >= 1, 0 < p <= q <= 1").pq(pos)),
        ("M1.ii", v_le_1("v <= 1, -1 <= p <= q < 0").pq(neg)),
        (
            "M1.iii",
            Region::new("exp(-1/q) <= u, v <= 1, 0 < p <= q <= 1")
                .u_at_least((k(-1.0) / q()).exp())
                .v_at_most(1.0)
                .pq(pos),
        ),
        (
            "M1.iv",
            Region::new("1 <= u, v <= exp(-1/p), -1 <= p <= q < 0")
                .u_at_least(1.0)
                .v_at_most((k(-1.0) / p()).exp())
                .pq(neg),
        ),
    ];
    for (id, r) in m1_regions {
        cases.push(InequalityCase::new(
            id,
            "M1",
            "T_q - S_q <= T_p - S_p",
            Hypothesis::one(r),
            f32_q.clone(),
            f32_p.clone(),
        ));
    }

    // T_p − S_p/2 monotone in p, direction by region.
    let f34 = |w: Num| t(w.clone()) - sp(w) * 0.5;
    let m2 = [
        ("M2.i", u_ge_1("u >= 1, -1 <= p <= q < 0").pq(neg), true),
        ("M2.ii", v_le_1("v <= 1, 0 < p <= q <= 1").pq(pos), true),
        ("M2.iii", u_ge_1("u >= 1, 0 < p <= q <= 1").pq(pos), false),
        ("M2.iv", v_le_1("v <= 1, -1 <= p <= q < 0").pq(neg), false),
    ];
    for (id, r, increasing) in m2 {
        let (lhs, rhs, st) = if increasing {
            (f34(p()), f34(q()), "T_p - S_p/2 <= T_q - S_q/2")
        } else {
            (f34(q()), f34(p()), "T_q - S_q/2 <= T_p - S_p/2")
        };
        cases.push(InequalityCase::new(
            id,
            "M2",
            st,
            Hypothesis::one(r),
            lhs,
            rhs,
        ));
    }

    // T_p − c S_p monotone in p, direction by region and sign of c.
    let f36 = |w: Num| t(w.clone()) - sp(w) * Num::C;
    let small_c = ParamRange::left_open(0.0, 0.5);
    let large_c = ParamRange::closed(0.5, 2.0);
    let kq = (k(1.0) - c() * 2.0) / (c() * q());
    let kp = (k(1.0) - c() * 2.0) / (c() * p());
    let m3 = [
        (
            "M3.a1",
            u_ge_1("u >= 1, -1 <= p <= q < 0").pq(neg).c(small_c),
            true,
        ),
        (
            "M3.a2",
            v_le_1("v <= 1, 0 < p <= q <= 1").pq(pos).c(small_c),
            true,
        ),
        (
            "M3.b1",
            Region::new("1 <= u, v <= exp((1-2c)/(cq)), 0 < p <= q <= 1")
                .u_at_least(1.0)
                .v_at_most(kq.clone().exp())
                .pq(pos)
                .c(small_c),
            true,
        ),
        (
            "M3.b2",
            Region::new("exp((1-2c)/(cp)) <= u, v <= 1, -1 <= p <= q < 0")
                .u_at_least(kp.clone().exp())
                .v_at_most(1.0)
                .pq(neg)
                .c(small_c),
            true,
        ),
        (
            "M3.d1",
            Region::new("exp((1-2c)/(cq)) <= u, v <= 1, 0 < p <= q <= 1")
                .u_at_least(kq.exp())
                .v_at_most(1.0)
                .pq(pos)
                .c(large_c),
            false,
        ),
        (
            "M3.d2",
            Region::new("1 <= u, v <= exp((1-2c)/(cp)), -1 <= p <= q < 0")
                .u_at_least(1.0)
                .v_at_most(kp.exp())
                .pq(neg)
                .c(large_c),
            false,
        ),
        (
            "M3.e1",
            u_ge_1("u >= 1, 0 < p <= q <= 1").pq(pos).c(large_c),
            false,
        ),
        (
            "M3.e2",
            v_le_1("v <= 1, -1 <= p <= q < 0").pq(neg).c(large_c),
            false,
        ),
        (
            "M3.C",
            Region::new("c < 0, p <= q, p, q != 0")
                .pq(unit_nz)
                .c(ParamRange::right_open(-2.0, 0.0)),
            true,
        ),
    ];
    for (id, r, increasing) in m3 {
        let (lhs, rhs, st) = if increasing {
            (f36(p()), f36(q()), "T_p - c S_p <= T_q - c S_q")
        } else {
            (f36(q()), f36(p()), "T_q - c S_q <= T_p - c S_p")
        };
        cases.push(InequalityCase::new(
            id,
            "M3",
            st,
            Hypothesis::one(r),
            lhs,
            rhs,
        ));
    }

    // (A ∇_p B − A #_p B)/p is nonincreasing in p.
    let gap = |w: Num| Arith(w.clone()) - nat(w);
    cases.push(InequalityCase::new(
        "W1",
        "W1",
        "(A nabla_q B - A #_q B)/q <= (A nabla_p B - A #_p B)/p",
        Hypothesis::one(Region::new("0 < p <= q <= 1").pq(pos)),
        gap(q()) / q(),
        gap(p()) / p(),
    ));

    // The same gap over p(1−p), nonincreasing in p when v ≤ 1.
    let w2 = |w: Num| gap(w.clone()) / (w.clone() * (k(1.0) - w));
    cases.push(
        InequalityCase::new(
            "W2",
            "W2",
            "(A nabla_q B - A #_q B)/(q(1-q)) <= (A nabla_p B - A #_p B)/(p(1-p))",
            Hypothesis::one(v_le_1("v <= 1, 0 < p <= q < 1").pq(ParamRange::open(0.0, 1.0))),
            w2(q()),
            w2(p()),
        )
        .with_dual(Hypothesis::one(
            u_ge_1("u >= 1, 0 < p <= q < 1").pq(ParamRange::open(0.0, 1.0)),
        )),
    );

    // (A #_p B − A !_p B)/p is nonincreasing in p when v ≤ 1.
    let gh = |w: Num| (nat(w.clone()) - Harm(w.clone())) / w;
    cases.push(InequalityCase::new(
        "W3",
        "W3",
        "(A #_q B - A !_q B)/q <= (A #_p B - A !_p B)/p",
        Hypothesis::one(v_le_1("v <= 1, 0 < p <= q <= 1").pq(pos)),
        gh(q()),
        gh(p()),
    ));

    // Same gap plus the log² correction is nondecreasing on two regions.
    let w4 = |w: Num| gh(w.clone()) + LogSquared * w;
    cases.push(InequalityCase::new(
        "W4",
        "W4",
        "(A #_p B - A !_p B)/p + p L <= (A #_q B - A !_q B)/q + q L, L = A^1/2 (log C)^2 A^1/2",
        Hypothesis {
            regions: vec![
                u_ge_1("(i) u >= 1, 0 < p <= q <= 1/2").pq(ParamRange::left_open(0.0, 0.5)),
                v_le_1("(ii) v <= 1, 1/2 <= p <= q <= 1").pq(ParamRange::closed(0.5, 1.0)),
            ],
        },
        w4(p()),
        w4(q()),
    ));

    cases
}

/// Every case plus the dual of every case that has one.
pub fn catalog_with_duals() -> Vec<InequalityCase> {
    let base = catalog();
    let mut out = base.clone();
    out.extend(base.iter().filter_map(|c| dual(c).ok()));
    out
}

/// Cases whose id or group matches `filter` (see [`InequalityCase::matches`]),
/// duals included.
pub fn select(filter: &str) -> Result<Vec<InequalityCase>> {
    let found: Vec<_> = catalog_with_duals()
        .into_iter()
        .filter(|c| c.matches(filter))
        .collect();
    if found.is_empty() {
        return Err(Error::UnknownCase(filter.to_string()));
    }
    Ok(found)
}

/// Looser variants of the last two `T_p − S_p` regions that bound the
/// wrong end of the spectrum (`e^{−1/q} ≤ v ≤ 1` and `1 ≤ u ≤ e^{−1/p}`).
/// They are not sufficient and stay out of [`catalog`].
pub fn loose_m1_regions() -> Vec<InequalityCase> {
    let t = |w: Num| Expr::Tsallis(PairSel::Base, w.clone()) - Expr::GenEntropy(PairSel::Base, w);
    let pos = ParamRange::left_open(0.0, 1.0);
    let neg = ParamRange::right_open(-1.0, 0.0);
    vec![
        InequalityCase::new(
            "M1.iii.loose",
            "M1",
            "T_q - S_q <= T_p - S_p",
            Hypothesis::one(
                Region::new("exp(-1/q) <= v <= 1, 0 < p <= q <= 1")
                    .v_at_least((k(-1.0) / Num::Q).exp())
                    .v_at_most(1.0)
                    .pq(pos),
            ),
            t(Num::Q),
            t(Num::P),
        ),
        InequalityCase::new(
            "M1.iv.loose",
            "M1",
            "T_q - S_q <= T_p - S_p",
            Hypothesis::one(
                Region::new("1 <= u <= exp(-1/p), -1 <= p <= q < 0")
                    .u_at_least(1.0)
                    .u_at_most((k(-1.0) / Num::P).exp())
                    .pq(neg),
            ),
            t(Num::Q),
            t(Num::P),
        ),
    ]
}

/// The p(1−p)-normalized gap oriented as increasing in `p` under `v ≤ 1`.
/// The double-integral identity for the gap gives the opposite order, so
/// this stays out of [`catalog`].
pub fn flipped_w2() -> InequalityCase {
    let w2 = |w: Num| {
        (Expr::Arith(w.clone()) - Expr::Natural(PairSel::Base, w.clone()))
            / (w.clone() * (k(1.0) - w))
    };
    InequalityCase::new(
        "W2.flipped",
        "W2",
        "(A nabla_p B - A #_p B)/(p(1-p)) <= (A nabla_q B - A #_q B)/(q(1-q))",
        Hypothesis::one(
            Region::new("v <= 1, 0 < p <= q < 1")
                .v_at_most(1.0)
                .pq(ParamRange::open(0.0, 1.0)),
        ),
        w2(Num::P),
        w2(Num::Q),
    )
}

/// Per-trial verification record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub case_id: String,
    pub seed: u64,
    pub n: usize,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub c: Option<f64>,
    pub u: f64,
    pub v: f64,
    pub margin: f64,
    pub scale: f64,
    pub holds: bool,
}

impl MarginReport {
    pub fn normalized(&self) -> f64 {
        self.margin / self.scale
    }
}

/// Evaluates `case` on `pair` and returns the Loewner margin of
/// `rhs − lhs`. The `seed` field is left at 0 for the caller to fill.
pub fn evaluate(
    case: &InequalityCase,
    pair: &OperatorPair,
    params: &Params,
    order_tol: f64,
) -> Result<MarginReport> {
    let (u, v) = (pair.u(), pair.v());
    if !case.hypothesis.admits(u, v, params) {
        return Err(Error::HypothesisError(format!(
            "{}: u={u}, v={v}, {params:?} outside {}",
            case.id, case.hypothesis
        )));
    }
    let lhs = eval_expr(&case.lhs, pair, params)?;
    let rhs = eval_expr(&case.rhs, pair, params)?;
    let verdict = loewner_leq(&lhs, &rhs, order_tol)?;
    let h = &case.hypothesis;
    Ok(MarginReport {
        case_id: case.id.clone(),
        seed: 0,
        n: pair.dim(),
        p: h.uses_p().then_some(params.p),
        q: h.uses_q().then_some(params.q),
        c: h.uses_c().then_some(params.c),
        u,
        v,
        margin: verdict.margin,
        scale: verdict.scale,
        holds: verdict.holds,
    })
}
