//! Entire functions as streams of homogeneous Taylor components.
//!
//! Everything here works degree by degree: growth order from the decay of
//! `max_{|η|=1} |f_m(η)|`, `B_λ` norms from `‖f_m‖_a`, and the Fischer
//! decomposition `f = P q + r` via the blocks
//! `G_M = Σ_j Σ_{s_0..s_j} T P_{s_j} T ⋯ P_{s_0} T f_{M + k(j+2) − Σs}`.

use std::ops::RangeInclusive;
use std::sync::Arc;

use num::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apolar::{ln_norm, norm};
use crate::coeff::{Coeff, GaussRat, C64};
use crate::error::{Error, Result};
use crate::fischer::{check_gap, split_leading, FischerOperator};
use crate::json::{AnyPoly, PolyJson};
use crate::poly::Poly;
use crate::sphere::SphereSampler;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Components of a polynomial; zero beyond its degree.
    Polynomial,
    /// `exp` of the stored polynomial, generated by formal exponentiation.
    ExpOf,
    /// Explicit per-degree table or generator; nothing known beyond `max_degree`.
    Table,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorStream<F: Coeff> {
    dim: usize,
    components: Vec<Poly<F>>,
    provenance: Provenance,
    zero: Poly<F>,
}

impl<F: Coeff> TaylorStream<F> {
    fn build(dim: usize, components: Vec<Poly<F>>, provenance: Provenance) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for (m, c) in components.iter().enumerate() {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: c.dim() });
            }
            if !c.is_zero() && !c.is_homogeneous_of(m) {
                return Err(Error::NotHomogeneous { expected: Some(m) });
            }
        }
        Ok(TaylorStream { dim, components, provenance, zero: Poly::zero(dim) })
    }

    /// Components `f_0, …, f_{max_degree}`; `max_degree` defaults to `deg f`.
    pub fn from_poly(f: &Poly<F>, max_degree: Option<usize>) -> Self {
        let cap = max_degree.unwrap_or_else(|| f.degree().finite().unwrap_or(0));
        let components = (0..=cap).map(|m| f.homogeneous_component(m)).collect();
        TaylorStream { dim: f.dim(), components, provenance: Provenance::Polynomial, zero: Poly::zero(f.dim()) }
    }

    pub fn from_components(dim: usize, components: Vec<Poly<F>>) -> Result<Self> {
        Self::build(dim, components, Provenance::Table)
    }

    pub fn from_fn(dim: usize, max_degree: usize, f: impl Fn(usize) -> Poly<F>) -> Result<Self> {
        Self::build(dim, (0..=max_degree).map(f).collect(), Provenance::Table)
    }

    /// `exp(h)` up to `max_degree` from `m g_m = Σ_{j≥1} j h_j g_{m−j}`.
    /// The exact backend needs `h(0) = 0` so that `g_0 = 1` is rational.
    pub fn exp_of(inner: &Poly<F>, max_degree: usize) -> Result<Self> {
        let dim = inner.dim();
        let h0 = inner.homogeneous_component(0).coeff(&crate::multiindex::MultiIndex::zero(dim));
        let g0 = if h0.is_zero() {
            F::one()
        } else if F::EXACT {
            return Err(Error::NotExact("exp(h) with h(0) != 0 has an irrational constant term".into()));
        } else {
            F::from_c64(h0.to_c64().exp())?
        };
        let parts = inner.homogeneous_components();
        let mut g: Vec<Poly<F>> = vec![Poly::constant(dim, g0)];
        for m in 1..=max_degree {
            let mut acc = Poly::zero(dim);
            for (&j, hj) in parts.range(1..=m) {
                acc = &acc + &(hj * &g[m - j]).scale(&F::from_i64(j as i64));
            }
            g.push(acc.scale(&(F::one() / F::from_i64(m as i64))));
        }
        Ok(TaylorStream { dim, components: g, provenance: Provenance::ExpOf, zero: Poly::zero(dim) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.components.len().saturating_sub(1)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Components beyond `max_degree` are known to vanish.
    pub fn is_finite(&self) -> bool {
        self.provenance == Provenance::Polynomial
    }

    /// `f_m`; zero beyond `max_degree` for finite streams.
    ///
    /// # Panics
    /// If `m > max_degree` on a stream that is not finite.
    pub fn component(&self, m: usize) -> &Poly<F> {
        match self.components.get(m) {
            Some(c) => c,
            None if self.is_finite() => &self.zero,
            None => panic!("component {m} requested beyond stream cap {}", self.max_degree()),
        }
    }

    pub fn components(&self) -> &[Poly<F>] {
        &self.components
    }

    /// `Σ_{m ≤ max_degree} f_m`
    pub fn truncated(&self) -> Poly<F> {
        self.components.iter().fold(Poly::zero(self.dim), |acc, c| &acc + c)
    }

    pub fn to_float(&self) -> TaylorStream<C64> {
        TaylorStream {
            dim: self.dim,
            components: self.components.iter().map(Poly::to_float).collect(),
            provenance: self.provenance.clone(),
            zero: Poly::zero(self.dim),
        }
    }
}

/// Stream definition file.
///
/// ```json
/// {"kind": "poly", "dim": 1, "terms": [{"exp": [3], "re": "1"}]}
/// {"kind": "exp_poly", "inner": {"dim": 1, "terms": [{"exp": [1], "re": "1"}]}}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StreamJson {
    Poly(PolyJson),
    ExpPoly { inner: PolyJson },
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyStream {
    Exact(TaylorStream<GaussRat>),
    Float(TaylorStream<C64>),
}

impl AnyStream {
    pub fn to_float(&self) -> TaylorStream<C64> {
        match self {
            AnyStream::Exact(s) => s.to_float(),
            AnyStream::Float(s) => s.clone(),
        }
    }
}

/// Parses a stream file and materializes components up to `max_degree`.
/// `exp_poly` with a nonzero constant term falls back to floating point.
pub fn parse_stream(text: &str, max_degree: usize) -> Result<AnyStream> {
    let raw: StreamJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match raw {
        StreamJson::Poly(p) => Ok(match p.to_poly()? {
            AnyPoly::Exact(p) => AnyStream::Exact(TaylorStream::from_poly(&p, Some(max_degree))),
            AnyPoly::Float(p) => AnyStream::Float(TaylorStream::from_poly(&p, Some(max_degree))),
        }),
        StreamJson::ExpPoly { inner } => match inner.to_poly()? {
            AnyPoly::Exact(h) => match TaylorStream::exp_of(&h, max_degree) {
                Ok(s) => Ok(AnyStream::Exact(s)),
                Err(Error::NotExact(_)) => Ok(AnyStream::Float(TaylorStream::exp_of(&h.to_float(), max_degree)?)),
                Err(e) => Err(e),
            },
            AnyPoly::Float(h) => Ok(AnyStream::Float(TaylorStream::exp_of(&h, max_degree)?)),
        },
    }
}

pub const MIN_ORDER_DEGREES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub order: f64,
    /// No usable nonzero components in the tail window.
    pub polynomial: bool,
    /// `max m ln m / ln(1/max|f_m|)` over the tail window.
    pub limsup_ratio: Option<f64>,
    pub tail_window: (usize, usize),
    pub fit_residual: Option<f64>,
    /// `(m, ln max_{|η|=1} |f_m(η)|)` for every nonzero component used.
    pub ln_sup: Vec<(usize, f64)>,
}

/// Growth order from `max_{|η|=1}|f_m| ≈ A^m m^{−m/ρ}`: over the upper half
/// of `degrees`, `−ln max|f_m| / m` is regressed on `ln m` and `ρ = 1/slope`.
pub fn order_estimate<F: Coeff>(f: &TaylorStream<F>, degrees: RangeInclusive<usize>, sampler: &SphereSampler) -> Result<OrderEstimate> {
    let (lo, hi) = (*degrees.start(), *degrees.end());
    if hi < lo || hi - lo + 1 < MIN_ORDER_DEGREES {
        return Err(Error::WindowTooSmall { got: if hi < lo { 0 } else { hi - lo + 1 }, min: MIN_ORDER_DEGREES });
    }
    if hi > f.max_degree() && !f.is_finite() {
        return Err(Error::InvalidArgument(format!("degree {hi} is beyond the stream cap {}", f.max_degree())));
    }
    let tail_start = (lo + (hi - lo).div_ceil(2)).max(2);
    let ln_sup: Vec<(usize, f64)> = (tail_start..=hi)
        .into_par_iter()
        .filter_map(|m| {
            let c = f.component(m);
            (!c.is_zero()).then(|| (m, sampler.ln_max_modulus(c)))
        })
        .collect();

    let no_growth = OrderEstimate {
        order: 0.0,
        polynomial: true,
        limsup_ratio: None,
        tail_window: (tail_start, hi),
        fit_residual: None,
        ln_sup: ln_sup.clone(),
    };
    if f.is_finite() || ln_sup.len() < 3 {
        return Ok(no_growth);
    }
    let x: Vec<f64> = ln_sup.iter().map(|&(m, _)| (m as f64).ln()).collect();
    let y: Vec<f64> = ln_sup.iter().map(|&(m, s)| -s / m as f64).collect();
    let (_, slope, residual) = crate::spectral::linear_fit(&x, &y);
    let limsup_ratio = ln_sup
        .iter()
        .filter(|&&(_, s)| s < 0.0)
        .map(|&(m, s)| m as f64 * (m as f64).ln() / -s)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    let order = if slope > 0.0 { 1.0 / slope } else { f64::INFINITY };
    Ok(OrderEstimate {
        order,
        polynomial: false,
        limsup_ratio,
        tail_window: (tail_start, hi),
        fit_residual: Some(residual),
        ln_sup,
    })
}

/// A positive non-increasing sequence `λ_m → 0`, clamped to `λ ∧ 1`.
#[derive(Clone)]
pub struct LambdaSeq {
    label: String,
    generator: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for LambdaSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LambdaSeq").field("label", &self.label).finish()
    }
}

impl LambdaSeq {
    /// Validates positivity and monotonicity on `probe`, and strict decrease
    /// over its last quarter (a sequence that stalls cannot tend to zero).
    pub fn new(label: impl Into<String>, generator: impl Fn(usize) -> f64 + Send + Sync + 'static, probe: RangeInclusive<usize>) -> Result<Self> {
        let seq = LambdaSeq { label: label.into(), generator: Arc::new(generator) };
        let values: Vec<f64> = probe.clone().map(|m| seq.value(m)).collect();
        if values.len() < 4 {
            return Err(Error::WindowTooSmall { got: values.len(), min: 4 });
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidArgument(format!("lambda_{} = {} is not a positive number", probe.start() + i, values[i])));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument(format!("lambda increases at m = {}", probe.start() + i + 1)));
        }
        let tail = &values[values.len() * 3 / 4..];
        if tail.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument(format!("{} does not decrease toward 0 on the probe range", seq.label)));
        }
        Ok(seq)
    }

    /// `λ_m = m^{−p}` (`λ_0 = 1`).
    pub fn power(p: f64) -> Result<Self> {
        Self::new(format!("m^-{p}"), move |m| (m as f64).powf(-p), 0..=1000)
    }

    /// `λ_m = 1/ln(m+2)`.
    pub fn inverse_log() -> Result<Self> {
        Self::new("1/ln(m+2)", |m| 1.0 / ((m + 2) as f64).ln(), 0..=1000)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, m: usize) -> f64 {
        let v = (self.generator)(m);
        if v.is_nan() { v } else { v.min(1.0) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipTrend {
    ConsistentWithMembership,
    NotConvergingToZero,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BLambdaReport {
    pub norm: f64,
    pub ln_norm: f64,
    pub argmax: usize,
    pub trend: MembershipTrend,
    /// `ln(‖f_m‖_a / (m^{m/2} λ_m^m))`, `−∞` for zero components.
    pub ln_ratios: Vec<f64>,
}

/// Truncated `sup_{m ≤ M_cap} ‖f_m‖_a / (m^{m/2} λ_m^m)` with `0^0 = 1`.
/// The trend is "consistent" when the nonzero ratios in the last quarter of
/// degrees strictly decrease.
pub fn blambda_norm<F: Coeff>(f: &TaylorStream<F>, lambda: &LambdaSeq, m_cap: usize) -> Result<BLambdaReport> {
    if m_cap < 1 {
        return Err(Error::DegreeTooLow { got: m_cap, min: 1 });
    }
    if m_cap > f.max_degree() && !f.is_finite() {
        return Err(Error::InvalidArgument(format!("M_cap {m_cap} is beyond the stream cap {}", f.max_degree())));
    }
    let ln_ratios: Vec<f64> = (0..=m_cap)
        .map(|m| {
            let c = f.component(m);
            if c.is_zero() {
                return f64::NEG_INFINITY;
            }
            let mf = m as f64;
            let scale = if m == 0 { 0.0 } else { 0.5 * mf * mf.ln() + mf * lambda.value(m).ln() };
            ln_norm(c) - scale
        })
        .collect();
    let (argmax, &ln_sup) = ln_ratios
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, cur| if *cur.1 > *best.1 { cur } else { best });
    let tail: Vec<f64> = ln_ratios[(m_cap + 1) * 3 / 4..].iter().copied().filter(|v| v.is_finite()).collect();
    let decreasing = tail.windows(2).all(|w| w[1] < w[0] - 1e-12 * w[0].abs().max(1.0));
    Ok(BLambdaReport {
        norm: ln_sup.exp(),
        ln_norm: ln_sup,
        argmax,
        trend: if decreasing { MembershipTrend::ConsistentWithMembership } else { MembershipTrend::NotConvergingToZero },
        ln_ratios,
    })
}

/// `ρ (k − τ) < 2 (k − β)`, compared exactly on the binary values of `τ`, `ρ`.
pub fn check_main_condition(k: usize, tau: f64, beta: usize, rho: f64) -> Result<bool> {
    if beta >= k {
        return Err(Error::InvalidArgument(format!("beta = {beta} must be below k = {k}")));
    }
    if !(0.0..=k as f64).contains(&tau) {
        return Err(Error::InvalidArgument(format!("tau = {tau} must lie in [0, {k}]")));
    }
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::InvalidArgument(format!("rho = {rho} must be a finite non-negative number")));
    }
    let exact = |x: f64| BigRational::from_float(x).expect("finite");
    let int = |n: usize| BigRational::from_integer(n.into());
    Ok(exact(rho) * (int(k) - exact(tau)) < int(2) * (int(k) - int(beta)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaVerdict {
    TendingToZero,
    NotTending,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaCheck {
    pub verdict: LambdaVerdict,
    /// Slope of `ln s_m` against `ln m` over the tail.
    pub log_slope: f64,
    /// `(m, s_m)` with `s_m = m^{(k−τ)/2} λ_m^{k−β}` over the upper half of the probe.
    pub tail: Vec<(usize, f64)>,
}

/// Slope magnitude below which the tail is treated as flat.
const LAMBDA_SLOPE_TOL: f64 = 0.05;

/// Probes `m^{(k−τ)/2} λ_m^{k−β} → 0`: a clearly negative log-log slope with a
/// monotone decreasing tail means tending to zero, a clearly positive slope
/// with a monotone increasing tail means not.
pub fn check_lambda_condition(lambda: &LambdaSeq, k: usize, tau: f64, beta: usize, probe: RangeInclusive<usize>) -> Result<LambdaCheck> {
    let (lo, hi) = (*probe.start(), *probe.end());
    if hi < lo || hi - lo + 1 < MIN_ORDER_DEGREES {
        return Err(Error::WindowTooSmall { got: if hi < lo { 0 } else { hi - lo + 1 }, min: MIN_ORDER_DEGREES });
    }
    if beta >= k {
        return Err(Error::InvalidArgument(format!("beta = {beta} must be below k = {k}")));
    }
    let start = (lo + (hi - lo).div_ceil(2)).max(1);
    let ln_s: Vec<(usize, f64)> = (start..=hi)
        .map(|m| (m, 0.5 * (k as f64 - tau) * (m as f64).ln() + (k - beta) as f64 * lambda.value(m).ln()))
        .collect();
    let x: Vec<f64> = ln_s.iter().map(|&(m, _)| (m as f64).ln()).collect();
    let y: Vec<f64> = ln_s.iter().map(|p| p.1).collect();
    let (_, slope, _) = crate::spectral::linear_fit(&x, &y);
    let decreasing = y.windows(2).all(|w| w[1] < w[0]);
    let increasing = y.windows(2).all(|w| w[1] > w[0]);
    let verdict = if slope < -LAMBDA_SLOPE_TOL && decreasing {
        LambdaVerdict::TendingToZero
    } else if slope > LAMBDA_SLOPE_TOL && increasing {
        LambdaVerdict::NotTending
    } else {
        LambdaVerdict::Inconclusive
    };
    Ok(LambdaCheck { verdict, log_slope: slope, tail: ln_s.into_iter().map(|(m, l)| (m, l.exp())).collect() })
}

pub const DEFAULT_ENTIRE_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeDiagnostics {
    pub degree: usize,
    /// Last summed block index `j` (`−1` is the `T f_{M+k}` term).
    pub j_stop: Option<i64>,
    /// Apolar norm of every summed block, in order of `j`.
    pub block_norms: Vec<f64>,
    pub last_block_norm: f64,
    pub stopped_by_tol: bool,
    /// Some summed block needed components beyond `M_cap`, or the series was
    /// cut off by the cap.
    pub truncated: bool,
}

#[derive(Clone, Debug)]
pub struct EntireDecomposition<F: Coeff> {
    pub q: TaylorStream<F>,
    pub r: TaylorStream<F>,
    pub per_degree: Vec<DegreeDiagnostics>,
    /// `r_M` depends on a truncated `G_{M'}`.
    pub r_truncated: Vec<bool>,
    pub k: usize,
    pub m_cap: usize,
}

impl<F: Coeff> EntireDecomposition<F> {
    /// `‖P_k*(D) r_M‖_a` per computed degree.
    pub fn annihilator_residuals(&self, pk: &Poly<F>) -> Result<Vec<f64>> {
        let star = pk.star();
        self.r.components().iter().map(|rm| Ok(norm(&Poly::apply_diff_op(&star, rm)?))).collect()
    }
}

/// Truncated decomposition of an entire `f` against `P = P_k − P_β − ⋯ − P_0`
/// up to degree `M_cap − k` of `q` and `r`.
///
/// Block `j` of `G_M` is `Σ_s T(P_s · block_{j−1}(M + k − s))`, with block
/// `−1` equal to `T f_{M+k}`. Missing inputs (degree above `M_cap`) count as
/// zero and mark the block truncated unless the stream is a polynomial that
/// ends by `M_cap`. In the float backend the sum over `j` stops once a complete
/// block is at most `tol` times the running norm; the exact backend sums every
/// available block.
pub fn decompose_entire<F: Coeff>(p: &Poly<F>, f: &TaylorStream<F>, m_cap: usize, tol: f64, beta: Option<usize>) -> Result<EntireDecomposition<F>> {
    if p.dim() != f.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: f.dim() });
    }
    if m_cap > f.max_degree() && !f.is_finite() {
        return Err(Error::InvalidArgument(format!("M_cap {m_cap} is beyond the stream cap {}", f.max_degree())));
    }
    if let Some(beta) = beta {
        check_gap(p, beta)?;
    }
    let (k, pk, lower) = split_leading(p)?;
    if m_cap < k {
        return Err(Error::DegreeTooLow { got: m_cap, min: k });
    }
    let op = FischerOperator::new(&pk)?;
    let dim = p.dim();
    let top = m_cap - k;
    let s_min = lower.keys().next().copied();
    let s_max = lower.keys().next_back().copied();
    let inputs_known_beyond_cap = f.is_finite() && f.max_degree() <= m_cap;

    // levels[j+1][M] = block j of G_M
    let mut levels: Vec<Vec<Poly<F>>> = vec![(0..=top).into_par_iter().map(|m| op.apply(f.component(m + k))).collect::<Result<_>>()?];
    if let (Some(_), Some(beta)) = (s_min, s_max) {
        // Block j exists for some M iff k(j+2) − (j+1)β ≤ M_cap.
        let mut j: usize = 0;
        while k * (j + 2) <= m_cap + (j + 1) * beta {
            let prev = levels.last().expect("nonempty");
            let next: Vec<Poly<F>> = (0..=top)
                .into_par_iter()
                .map(|m| {
                    let mut acc = Poly::zero(dim);
                    for (&s, ps) in &lower {
                        let src = m + k - s;
                        if src <= top && !prev[src].is_zero() {
                            acc = &acc + &op.apply(&(ps * &prev[src]))?;
                        }
                    }
                    Ok(acc)
                })
                .collect::<Result<_>>()?;
            levels.push(next);
            j += 1;
        }
    }

    let complete = |m: usize, level: usize| -> bool {
        // level = j + 1; needed inputs reach M + k(j+2) − (j+1) s_min.
        let needed = m + k * (level + 1) - level * s_min.unwrap_or(0);
        inputs_known_beyond_cap || needed <= m_cap
    };
    let exists = |m: usize, level: usize| -> bool {
        level == 0 || m + k * (level + 1) <= m_cap + level * s_max.unwrap_or(0)
    };

    let mut q_components = Vec::with_capacity(top + 1);
    let mut per_degree = Vec::with_capacity(top + 1);
    for m in 0..=top {
        let mut g = Poly::zero(dim);
        let mut norms = Vec::new();
        let mut stopped_by_tol = false;
        let mut truncated = false;
        let mut j_stop = None;
        for (level, blocks) in levels.iter().enumerate() {
            if !exists(m, level) {
                break;
            }
            let block = &blocks[m];
            let bn = norm(block);
            g = &g + block;
            norms.push(bn);
            j_stop = Some(level as i64 - 1);
            let full = complete(m, level);
            truncated |= !full;
            let running = norm(&g);
            if !F::EXACT && full && running > 0.0 && bn <= tol * running {
                stopped_by_tol = true;
                break;
            }
        }
        // More blocks would follow if inputs beyond the cap were available.
        if !stopped_by_tol && !inputs_known_beyond_cap && s_max.is_some() {
            truncated = true;
        }
        per_degree.push(DegreeDiagnostics {
            degree: m,
            j_stop,
            last_block_norm: norms.last().copied().unwrap_or(0.0),
            block_norms: norms,
            stopped_by_tol,
            truncated,
        });
        q_components.push(g);
    }

    // r_M = f_M − P_k q_{M−k} + Σ_s P_s q_{M−s}
    let mut r_components = Vec::with_capacity(top + 1);
    let mut r_truncated = Vec::with_capacity(top + 1);
    for m in 0..=top {
        let mut pq = if m >= k { &pk * &q_components[m - k] } else { Poly::zero(dim) };
        for (&s, ps) in &lower {
            if m >= s {
                pq = &pq - &(ps * &q_components[m - s]);
            }
        }
        r_components.push(f.component(m) - &pq);
        r_truncated.push((m.saturating_sub(k)..=m).any(|i| per_degree[i].truncated));
    }

    Ok(EntireDecomposition {
        q: TaylorStream::build(dim, q_components, Provenance::Table)?,
        r: TaylorStream::build(dim, r_components, Provenance::Table)?,
        per_degree,
        r_truncated,
        k,
        m_cap,
    })
}

/// `‖f_M − (P q + r)_M‖_a` per computed degree.
pub fn reconstruction_errors<F: Coeff>(p: &Poly<F>, f: &TaylorStream<F>, dec: &EntireDecomposition<F>) -> Result<Vec<f64>> {
    let (k, pk, lower) = split_leading(p)?;
    let q = dec.q.components();
    (0..dec.r.components().len())
        .map(|m| {
            let mut pq = if m >= k { &pk * &q[m - k] } else { Poly::zero(p.dim()) };
            for (&s, ps) in &lower {
                if m >= s {
                    pq = &pq - &(ps * &q[m - s]);
                }
            }
            let err = &(f.component(m) - &pq) - &dec.r.components()[m];
            Ok(norm(&err))
        })
        .collect()
}

/// `ln m!` without overflow, for reference values in tests and reports.
pub fn ln_factorial(m: usize) -> f64 {
    crate::coeff::ln_bigint(&crate::multiindex::factorial(m))
}
