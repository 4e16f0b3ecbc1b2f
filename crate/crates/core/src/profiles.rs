//! Piecewise-constant dilatation profiles `β` and Orlicz functions `φ`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_tail, QuadratureConfig, TailOutcome};

pub const DEFAULT_K_MAX: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Spikes of height `2^k` on `((k+1)/(k+2) - 2^{-4k-1}, (k+1)/(k+2))`, `k ≥ 0`.
    Example1,
    /// Spikes of height `2^{k-1}` on `(1/k - 2^{-4k-1}, 1/k)`, `k ≥ 1`.
    Example4,
    Custom,
}

/// A stretch of `(0, 1]` where `β` differs from 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spike {
    pub lo: f64,
    pub hi: f64,
    /// Exact length `hi - lo` (the rounded endpoints may collapse).
    pub width: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    One,
    T,
    T2,
}

impl Weight {
    pub fn exponent(self) -> i32 {
        match self {
            Weight::One => 0,
            Weight::T => 1,
            Weight::T2 => 2,
        }
    }

    /// `∫_a^b t^m dt`.
    fn integral(self, a: f64, b: f64) -> f64 {
        match self {
            Weight::One => b - a,
            Weight::T => 0.5 * (b - a) * (b + a),
            Weight::T2 => (b - a) * (a * a + a * b + b * b) / 3.0,
        }
    }

    /// `∫_{hi-w}^{hi} t^m dt` written to avoid cancellation for tiny `w`.
    fn integral_below(self, hi: f64, w: f64) -> f64 {
        match self {
            Weight::One => w,
            Weight::T => w * hi - 0.5 * w * w,
            Weight::T2 => w * hi * hi - w * w * hi + w * w * w / 3.0,
        }
    }
}

/// Step profile `β : (0, 1] → [1, ∞)`.
///
/// For the two built-in schemes the spikes are open intervals and the flat
/// parts closed. Custom profiles take the value `values[i]` on
/// `[breaks[i-1], breaks[i])` (with `breaks[-1] = 0`, and the last piece
/// closed at 1).
#[derive(Debug, Clone, PartialEq)]
pub struct StepProfile {
    scheme: Scheme,
    k_max: u32,
    spikes: Vec<Spike>,
}

/// `n/d` as an unevaluated double-double pair.
fn ratio_dd(n: f64, d: f64) -> (f64, f64) {
    let q = n / d;
    let r = (-q).mul_add(d, n);
    (q, r / d)
}

/// `(hi + hi_lo) - w` rounded once.
fn sub_dd(hi: f64, hi_lo: f64, w: f64) -> f64 {
    let s = hi - w;
    let bb = s - hi;
    let e = (hi - (s - bb)) + (-w - bb);
    s + (e + hi_lo)
}

impl StepProfile {
    pub fn example1() -> Self {
        Self::with_k_max(Scheme::Example1, DEFAULT_K_MAX).unwrap()
    }

    pub fn example4() -> Self {
        Self::with_k_max(Scheme::Example4, DEFAULT_K_MAX).unwrap()
    }

    /// Built-in scheme truncated after index `k_max`.
    pub fn with_k_max(scheme: Scheme, k_max: u32) -> Result<Self> {
        let mut spikes = Vec::new();
        match scheme {
            Scheme::Example1 => {
                for k in 0..=k_max {
                    let value = 2f64.powi(k as i32);
                    let w = 2f64.powi(-4 * k as i32 - 1);
                    let (hi, hi_lo) = ratio_dd(k as f64 + 1.0, k as f64 + 2.0);
                    if value > 1.0 {
                        spikes.push(Spike {
                            lo: sub_dd(hi, hi_lo, w),
                            hi,
                            width: w,
                            value,
                        });
                    }
                }
            }
            Scheme::Example4 => {
                for k in 1..=k_max.max(1) {
                    let value = 2f64.powi(k as i32 - 1);
                    let w = 2f64.powi(-4 * k as i32 - 1);
                    let (hi, hi_lo) = ratio_dd(1.0, k as f64);
                    if value > 1.0 {
                        spikes.push(Spike {
                            lo: sub_dd(hi, hi_lo, w),
                            hi,
                            width: w,
                            value,
                        });
                    }
                }
            }
            Scheme::Custom => {
                return Err(Error::input("use StepProfile::custom for explicit profiles"));
            }
        }
        spikes.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        Ok(StepProfile {
            scheme,
            k_max,
            spikes,
        })
    }

    /// Profile equal to `values[i]` on `[breaks[i-1], breaks[i])`; needs
    /// `values.len() == breaks.len() + 1`, increasing breaks in `(0, 1)` and
    /// values `≥ 1`.
    pub fn custom(breaks: &[f64], values: &[f64]) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::input("custom profile needs one more value than breakpoints"));
        }
        if breaks.iter().any(|b| !(*b > 0.0 && *b < 1.0))
            || breaks.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::input("custom breakpoints must increase inside (0, 1)"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 1.0)) {
            return Err(Error::input("profile values must be finite and >= 1"));
        }
        let mut edges = vec![0.0];
        edges.extend_from_slice(breaks);
        edges.push(1.0);
        let spikes = edges
            .windows(2)
            .zip(values)
            .filter(|(_, v)| **v != 1.0)
            .map(|(w, v)| Spike {
                lo: w[0],
                hi: w[1],
                width: w[1] - w[0],
                value: *v,
            })
            .collect();
        Ok(StepProfile {
            scheme: Scheme::Custom,
            k_max: 0,
            spikes,
        })
    }

    /// `β ≡ 1`.
    pub fn constant_one() -> Self {
        StepProfile {
            scheme: Scheme::Custom,
            k_max: 0,
            spikes: Vec::new(),
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn spikes(&self) -> &[Spike] {
        &self.spikes
    }

    fn inside(&self, s: &Spike, t: f64) -> bool {
        match self.scheme {
            Scheme::Custom => t >= s.lo && (t < s.hi || (s.hi == 1.0 && t == 1.0)),
            _ => t > s.lo && t < s.hi,
        }
    }

    /// `β(t)` for `t ∈ (0, 1]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain(format!("profile argument {t} outside (0, 1]")));
        }
        Ok(self.value_at(t))
    }

    /// `β(t)` without the domain check; 1 outside every spike.
    pub(crate) fn value_at(&self, t: f64) -> f64 {
        let i = self.spikes.partition_point(|s| s.hi < t);
        for s in &self.spikes[i..] {
            if s.lo > t {
                break;
            }
            if self.inside(s, t) {
                return s.value;
            }
        }
        1.0
    }

    /// Sorted jump locations of `β` inside `[a, b]`.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .spikes
            .iter()
            .flat_map(|s| [s.lo, s.hi])
            .filter(|x| *x >= a && *x <= b)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// `∫_a^b β(t)^power · w(t) dt` summed in closed form over the pieces.
    pub fn integrate_power(&self, power: u32, weight: Weight, a: f64, b: f64) -> Result<f64> {
        if !(a >= 0.0 && a < b && b <= 1.0) {
            return Err(Error::domain(format!(
                "need 0 <= a < b <= 1 for profile integrals, got [{a}, {b}]"
            )));
        }
        let mut parts: Vec<f64> = Vec::new();
        for s in &self.spikes {
            let (lo, hi) = (s.lo.max(a), s.hi.min(b));
            if hi < lo || (hi == lo && !(s.lo >= a && s.hi <= b)) {
                continue;
            }
            let mass = if s.lo >= a && s.hi <= b {
                weight.integral_below(s.hi, s.width)
            } else {
                weight.integral(lo, hi)
            };
            parts.push((s.value.powi(power as i32) - 1.0) * mass);
        }
        // small terms first
        parts.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
        let extra: f64 = parts.iter().sum();
        Ok(weight.integral(a, b) + extra)
    }

    /// `∫_{a}^{b} β(t)/t dt` for `0 < a <= b <= 1`.
    pub fn log_integral(&self, a: f64, b: f64) -> f64 {
        let mut total = (b / a).ln();
        for s in &self.spikes {
            if s.hi <= a || s.lo >= b {
                continue;
            }
            let piece = if s.lo >= a && s.hi <= b {
                // ln(hi / (hi - w)) without cancellation
                -(-s.width / s.hi).ln_1p()
            } else {
                (s.hi.min(b) / s.lo.max(a)).ln()
            };
            total += (s.value - 1.0) * piece;
        }
        total
    }
}

/// Free-function form of [`StepProfile::eval`].
pub fn beta_eval(p: &StepProfile, t: f64) -> Result<f64> {
    p.eval(t)
}

/// Free-function form of [`StepProfile::integrate_power`].
pub fn integrate_beta_power(
    p: &StepProfile,
    power: u32,
    weight: Weight,
    a: f64,
    b: f64,
) -> Result<f64> {
    p.integrate_power(power, weight, a, b)
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Non-decreasing `φ : (0, ∞) → [0, ∞)`.
#[derive(Clone)]
pub struct OrliczFunction {
    label: String,
    f: Evaluator,
}

impl fmt::Debug for OrliczFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrliczFunction").field("label", &self.label).finish()
    }
}

impl OrliczFunction {
    pub fn custom(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        OrliczFunction {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    /// `t^p`.
    pub fn power(p: f64) -> Self {
        Self::custom(format!("t^{p}"), move |t| t.powf(p))
    }

    /// `t^p · ln(e + t)`.
    pub fn power_log(p: f64) -> Self {
        Self::custom(format!("t^{p} log(e+t)"), move |t| {
            t.powf(p) * (std::f64::consts::E + t).ln()
        })
    }

    /// `e^t`.
    pub fn exponential() -> Self {
        Self::custom("e^t", f64::exp)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    /// Checks `φ ≥ 0` and monotonicity on `points` log-spaced nodes of `[lo, hi]`.
    pub fn is_admissible_on(&self, lo: f64, hi: f64, points: usize) -> bool {
        let vals: Vec<f64> = log_grid(lo, hi, points.max(2)).map(|t| self.eval(t)).collect();
        vals.iter().all(|v| *v >= 0.0 && !v.is_nan()) && vals.windows(2).all(|w| w[1] >= w[0])
    }
}

pub(crate) fn log_grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    let m = points.max(2) - 1;
    (0..=m).map(move |i| {
        if i == m {
            hi
        } else {
            (l0 + (l1 - l0) * i as f64 / m as f64).exp()
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CalderonVerdict {
    Satisfied { value: f64 },
    Violated { reason: String },
    Inconclusive { reason: String },
}

/// Convergence of `∫_1^∞ (t/φ(t))^{1/(n-2)} dt`.
pub fn calderon_check(phi: &OrliczFunction, n: usize, cfg: &QuadratureConfig) -> Result<CalderonVerdict> {
    if n < 3 {
        return Err(Error::domain("the Calderon condition needs n >= 3"));
    }
    let e = 1.0 / (n as f64 - 2.0);
    let zero_at = std::cell::Cell::new(None);
    let integrand = |t: f64| {
        let v = phi.eval(t);
        if v > 0.0 {
            (t / v).powf(e)
        } else {
            zero_at.set(Some(t));
            f64::NAN
        }
    };
    match integrate_tail(integrand, 1.0, cfg) {
        Ok(TailOutcome::Converged(r)) => Ok(CalderonVerdict::Satisfied { value: r.value }),
        Ok(TailOutcome::Divergent { partial, blocks }) => Ok(CalderonVerdict::Violated {
            reason: format!("tail blocks do not decay (partial sum {partial:.6} over {blocks} blocks)"),
        }),
        Ok(TailOutcome::Inconclusive { reason, .. }) => Ok(CalderonVerdict::Inconclusive { reason }),
        Err(err) => match zero_at.get() {
            Some(t) => Ok(CalderonVerdict::Violated {
                reason: format!("phi vanishes at t = {t:e}"),
            }),
            None => Err(err),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DoublingVerdict {
    Holds { c_est: f64, at: f64 },
    Fails { t_star: f64, reason: String },
}

/// `max φ(2t)/φ(t)` over `grid` log-spaced points of `[T, 2^20 T]`.
pub fn doubling_check(phi: &OrliczFunction, t0: f64, grid: usize) -> Result<DoublingVerdict> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::domain("doubling check needs T > 0"));
    }
    let mut best = (f64::NEG_INFINITY, t0);
    for t in log_grid(t0, t0 * 2f64.powi(20), grid.max(2)) {
        let (a, b) = (phi.eval(t), phi.eval(2.0 * t));
        if !(a > 0.0) {
            return Ok(DoublingVerdict::Fails {
                t_star: t,
                reason: "phi(t) = 0".into(),
            });
        }
        let ratio = b / a;
        if !ratio.is_finite() {
            return Ok(DoublingVerdict::Fails {
                t_star: t,
                reason: "ratio phi(2t)/phi(t) is not finite".into(),
            });
        }
        if ratio > best.0 {
            best = (ratio, t);
        }
    }
    Ok(DoublingVerdict::Holds {
        c_est: best.0,
        at: best.1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevReport {
    pub p: f64,
    /// Smallest `φ(t)/t^p` over the last three decades of the grid.
    pub liminf_ratio: f64,
    /// Log-log slope of `φ(t)/t^p` over the last three decades.
    pub ratio_slope: f64,
    /// `W^{1,φ} ⊂ W^{1,p}`.
    pub w1p_inclusion: bool,
    pub calderon: CalderonVerdict,
    /// `W^{1,φ} ⊂ W^{1,n-1}` when the Calderon condition holds.
    pub w1n1_inclusion: Option<bool>,
    /// `1 - n/p` when `W^{1,p}` inclusion holds and `p > n`.
    pub morrey_alpha: Option<f64>,
}

/// Grid for the `t → ∞` behaviour of `φ(t)/t^p`.
const SOBOLEV_T_MAX: f64 = 1e12;
const SOBOLEV_PER_DECADE: usize = 10;

pub fn sobolev_inclusion_report(
    phi: &OrliczFunction,
    n: usize,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<SobolevReport> {
    if !(p > 1.0) {
        return Err(Error::domain("Sobolev exponent must exceed 1"));
    }
    let lo = SOBOLEV_T_MAX / 1e3;
    let pts: Vec<(f64, f64)> = log_grid(lo, SOBOLEV_T_MAX, 3 * SOBOLEV_PER_DECADE + 1)
        .map(|t| (t, phi.eval(t) / t.powf(p)))
        .collect();
    let liminf_ratio = pts.iter().map(|(_, r)| *r).fold(f64::INFINITY, f64::min);
    let ratio_slope = if liminf_ratio > 0.0 && liminf_ratio.is_finite() {
        let (x0, y0) = (pts[0].0.ln(), pts[0].1.ln());
        let (x1, y1) = (pts[pts.len() - 1].0.ln(), pts[pts.len() - 1].1.ln());
        (y1 - y0) / (x1 - x0)
    } else {
        f64::NEG_INFINITY
    };
    let w1p_inclusion = liminf_ratio > 0.0 && ratio_slope > -0.01;
    let calderon = if n >= 3 {
        calderon_check(phi, n, cfg)?
    } else {
        CalderonVerdict::Inconclusive {
            reason: "the Calderon condition needs n >= 3".into(),
        }
    };
    let w1n1_inclusion = match calderon {
        CalderonVerdict::Satisfied { .. } => Some(true),
        _ => None,
    };
    let morrey_alpha = (w1p_inclusion && p > n as f64).then(|| 1.0 - n as f64 / p);
    Ok(SobolevReport {
        p,
        liminf_ratio,
        ratio_slope,
        w1p_inclusion,
        calderon,
        w1n1_inclusion,
        morrey_alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_1d_breaks;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn example1_values() {
        let b = StepProfile::example1();
        assert_eq!(b.eval(0.5).unwrap(), 1.0);
        assert_eq!(b.eval(2.0 / 3.0 - 2f64.powi(-6)).unwrap(), 2.0);
        assert_eq!(b.eval(2.0 / 3.0).unwrap(), 1.0);
        assert_eq!(b.eval(0.75 - 1e-12).unwrap(), 4.0);
        assert_eq!(b.eval(1.0).unwrap(), 1.0);
        assert!(b.eval(0.0).is_err());
        assert!(b.eval(1.5).is_err());
    }

    #[test]
    fn example4_values() {
        let b = StepProfile::example4();
        assert_eq!(b.eval(1.0 - 2f64.powi(-6)).unwrap(), 1.0);
        assert_eq!(b.eval(0.5 - 2f64.powi(-10)).unwrap(), 2.0);
        assert_eq!(b.eval(0.5).unwrap(), 1.0);
        // identically 1 near t = 1
        for i in 0..100 {
            let t = 0.5 + 0.5 * i as f64 / 100.0;
            assert_eq!(b.eval(t).unwrap(), 1.0);
        }
    }

    #[test]
    fn spike_edges_are_exact() {
        let b = StepProfile::example1();
        let s = b.spikes()[0];
        assert_eq!(s.hi, 2.0 / 3.0);
        assert_eq!(s.width, 2f64.powi(-5));
        assert_eq!(s.lo, 2.0 / 3.0 - 2f64.powi(-5));
    }

    #[test]
    fn example1_integrals() {
        let b = StepProfile::example1();
        let total = b.integrate_power(1, Weight::One, 0.0, 1.0).unwrap();
        assert!((total - (1.0 + 4.0 / 105.0)).abs() < 1e-15);
        let cube = b.integrate_power(3, Weight::One, 0.5, 1.0).unwrap();
        // truncation after k_max = 40 removes about 2^-42
        assert!((cube - 29.0 / 30.0).abs() < 1e-12);
        assert!(cube <= 1.5);
        for i in 1..100 {
            let a = i as f64 / 100.0;
            let v = b.integrate_power(1, Weight::One, a, 1.0).unwrap();
            assert!(v <= 2.0 * (1.0 - a), "a = {a}");
        }
    }

    #[test]
    fn custom_profile() {
        let p = StepProfile::custom(&[0.25, 0.5], &[2.0, 1.0, 3.0]).unwrap();
        assert_eq!(p.eval(0.25).unwrap(), 1.0);
        assert_eq!(p.eval(0.1).unwrap(), 2.0);
        assert_eq!(p.eval(1.0).unwrap(), 3.0);
        let v = p.integrate_power(2, Weight::T, 0.0, 1.0).unwrap();
        let exact = 4.0 * 0.03125 + (0.125 - 0.03125) + 9.0 * (0.5 - 0.125);
        assert!((v - exact).abs() < 1e-15);
        assert!(StepProfile::custom(&[0.5], &[0.5, 1.0]).is_err());
        assert!(StepProfile::custom(&[0.5, 0.4], &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn log_integral_matches_quadrature() {
        let b = StepProfile::example1();
        let cfg = QuadratureConfig::default();
        for (a, hi) in [(0.5, 1.0), (0.3, 0.7), (0.61, 0.9)] {
            let q = integrate_1d_breaks(|t| b.value_at(t) / t, a, hi, &b.breakpoints(a, hi), &cfg)
                .unwrap()
                .value;
            // double-rounded spike edges limit the quadrature side to ~1e-12
            assert!((b.log_integral(a, hi) - q).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_agrees_with_quadrature_on_random_intervals() {
        // Spikes narrower than an ulp are invisible to quadrature. Their mass
        // decays like 2^{-3k} for power 1, so power 1 is compared everywhere and
        // higher powers only away from the accumulation point.
        let cfg = QuadratureConfig::default();
        let mut rng = crate::geometry::rng_from_seed(11);
        let cases = [
            (StepProfile::example1(), 0.01, 1.0, 1),
            (StepProfile::example4(), 0.01, 1.0, 1),
            (StepProfile::example1(), 0.01, 0.9, 3),
            (StepProfile::example4(), 0.1, 1.0, 3),
        ];
        for (p, lo, hi, max_power) in cases {
            for i in 0..50 {
                let mut a: f64 = rng.gen_range(lo..hi);
                let mut b: f64 = rng.gen_range(lo..hi);
                if a > b {
                    std::mem::swap(&mut a, &mut b);
                }
                let weight = [Weight::One, Weight::T, Weight::T2][i % 3];
                let power = 1 + (i as u32 / 3) % max_power;
                let exact = p.integrate_power(power, weight, a, b).unwrap();
                let m = weight.exponent();
                let q = integrate_1d_breaks(
                    |t| p.value_at(t).powi(power as i32) * t.powi(m),
                    a,
                    b,
                    &p.breakpoints(a, b),
                    &cfg,
                )
                .unwrap()
                .value;
                assert!((exact - q).abs() < 1e-10, "[{a}, {b}] {exact} vs {q}");
            }
        }
    }

    #[test]
    fn calderon_examples() {
        let cfg = QuadratureConfig::default();
        let v = calderon_check(&OrliczFunction::power(3.0), 3, &cfg).unwrap();
        match v {
            CalderonVerdict::Satisfied { value } => assert!((value - 1.0).abs() < 1e-8),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            calderon_check(&OrliczFunction::power(2.0), 3, &cfg).unwrap(),
            CalderonVerdict::Violated { .. }
        ));
        assert!(matches!(
            calderon_check(&OrliczFunction::power(3.0), 4, &cfg).unwrap(),
            CalderonVerdict::Violated { .. }
        ));
        let zero = OrliczFunction::custom("0", |_| 0.0);
        assert!(matches!(
            calderon_check(&zero, 3, &cfg).unwrap(),
            CalderonVerdict::Violated { .. }
        ));
        assert!(calderon_check(&OrliczFunction::power(3.0), 2, &cfg).is_err());
    }

    #[test]
    fn doubling_examples() {
        for p in [1.0, 2.5, 3.0] {
            match doubling_check(&OrliczFunction::power(p), 1.0, 200).unwrap() {
                DoublingVerdict::Holds { c_est, .. } => {
                    assert!((c_est - 2f64.powf(p)).abs() < 1e-9 * c_est)
                }
                other => panic!("{other:?}"),
            }
        }
        match doubling_check(&OrliczFunction::power_log(3.0), 1.0, 200).unwrap() {
            DoublingVerdict::Holds { c_est, .. } => assert!(c_est > 8.0 && c_est < 8.0 * 1.25),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            doubling_check(&OrliczFunction::exponential(), 1.0, 200).unwrap(),
            DoublingVerdict::Fails { .. }
        ));
    }

    #[test]
    fn sobolev_examples() {
        let cfg = QuadratureConfig::default();
        let r = sobolev_inclusion_report(&OrliczFunction::power(4.0), 3, 4.0, &cfg).unwrap();
        assert!(r.w1p_inclusion);
        assert!((r.morrey_alpha.unwrap() - 0.25).abs() < 1e-15);
        let r = sobolev_inclusion_report(&OrliczFunction::power(3.0), 3, 4.0, &cfg).unwrap();
        assert!(!r.w1p_inclusion && r.morrey_alpha.is_none());
        assert_eq!(r.w1n1_inclusion, Some(true));
        let r = sobolev_inclusion_report(&OrliczFunction::power(2.0), 3, 4.0, &cfg).unwrap();
        assert!(matches!(r.calderon, CalderonVerdict::Violated { .. }));
        assert_eq!(r.w1n1_inclusion, None);
    }

    #[test]
    fn orlicz_admissibility() {
        assert!(OrliczFunction::power_log(3.0).is_admissible_on(1e-3, 1e6, 100));
        assert!(!OrliczFunction::custom("dip", |t| (t - 2.0).abs()).is_admissible_on(1.0, 4.0, 50));
    }

    proptest! {
        #[test]
        fn profile_at_least_one(t in 1e-6f64..=1.0) {
            prop_assert!(StepProfile::example1().eval(t).unwrap() >= 1.0);
            prop_assert!(StepProfile::example4().eval(t).unwrap() >= 1.0);
        }

        #[test]
        fn tail_mass_bound(eps in 1e-6f64..1.0) {
            let b = StepProfile::example1();
            let v = b.integrate_power(1, Weight::One, 1.0 - eps, 1.0).unwrap();
            prop_assert!(v <= 2.0 * eps);
        }
    }
}
