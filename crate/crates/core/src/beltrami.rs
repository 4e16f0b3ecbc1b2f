//! Planar maps and their Beltrami coefficients.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, ZERO};
use crate::error::{Error, Result};
use crate::geometry::{rng_from_seed, uniform_in_unit_ball, Point, SampleRng};
use crate::quadrature::{
    classify_blocks, integrate_1d_fallible, BlockTrend, QuadratureConfig,
};

/// `|f_z|` below which the dilatation is not computed.
pub const DEGENERATE_FZ: f64 = 1e-12;
/// Number of dyadic shells used by [`integral_growth_check`].
pub const GROWTH_SHELLS: usize = 40;

/// Wirtinger derivatives `f_z = (f_x - i f_y)/2`, `f_z̄ = (f_x + i f_y)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wirtinger {
    pub f_z: Complex,
    pub f_zbar: Complex,
}

pub trait PlanarMap: Send + Sync {
    fn label(&self) -> String;

    fn eval(&self, z: Complex) -> Result<Complex>;

    fn analytic_wirtinger(&self, _z: Complex) -> Option<Result<Wirtinger>> {
        None
    }
}

/// `1e-6 · max(1, |z|)`.
pub fn wirtinger_step(z: Complex) -> f64 {
    1e-6 * z.abs().max(1.0)
}

/// Derivatives from the analytic pair when the map has one, otherwise by
/// [`numeric_wirtinger`] with step `h` (default [`wirtinger_step`]).
pub fn wirtinger<F: PlanarMap + ?Sized>(f: &F, z: Complex, h: Option<f64>) -> Result<Wirtinger> {
    match f.analytic_wirtinger(z) {
        Some(w) => w,
        None => numeric_wirtinger(f, z, h.unwrap_or_else(|| wirtinger_step(z))),
    }
}

/// Central differences on the 4-point stencil `z ± h`, `z ± ih`. The step is
/// halved (up to four times) when the stencil leaves the domain.
pub fn numeric_wirtinger<F: PlanarMap + ?Sized>(f: &F, z: Complex, h: f64) -> Result<Wirtinger> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!("step must be positive, got {h}")));
    }
    let mut h = h;
    let mut last = None;
    for _ in 0..5 {
        let stencil = (|| -> Result<(Complex, Complex)> {
            let hx = Complex::new(h, 0.0);
            let hy = Complex::new(0.0, h);
            let fx = (f.eval(z + hx)? - f.eval(z - hx)?) / (2.0 * h);
            let fy = (f.eval(z + hy)? - f.eval(z - hy)?) / (2.0 * h);
            Ok((fx, fy))
        })();
        match stencil {
            Ok((fx, fy)) => {
                let ify = Complex::new(-fy.im, fy.re);
                return Ok(Wirtinger {
                    f_z: (fx - ify) * 0.5,
                    f_zbar: (fx + ify) * 0.5,
                });
            }
            Err(e @ Error::Domain(_)) => {
                last = Some(e);
                h *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// `K_μ = (1 + |μ|)/(1 - |μ|)`; infinite for `|μ| >= 1`.
pub fn k_mu(mu_abs: f64) -> f64 {
    if mu_abs >= 1.0 {
        f64::INFINITY
    } else {
        (1.0 + mu_abs) / (1.0 - mu_abs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexDilatation {
    /// `μ = f_z̄ / f_z`.
    pub mu: Complex,
    /// `ν = μ f_z / conj(f_z) = f_z̄ / conj(f_z)`.
    pub nu: Complex,
    pub k_bound: f64,
    pub derivatives: Wirtinger,
}

pub fn complex_dilatation<F: PlanarMap + ?Sized>(
    f: &F,
    z: Complex,
    h: Option<f64>,
) -> Result<ComplexDilatation> {
    let w = wirtinger(f, z, h)?;
    if !(w.f_z.abs() >= DEGENERATE_FZ) {
        return Err(Error::Degenerate(format!(
            "|f_z| = {:e} at {z:?}",
            w.f_z.abs()
        )));
    }
    let mu = w.f_zbar / w.f_z;
    Ok(ComplexDilatation {
        mu,
        nu: w.f_zbar / w.f_z.conj(),
        k_bound: k_mu(mu.abs()),
        derivatives: w,
    })
}

/// `f(z) = a z + b z̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPlanar {
    pub a: Complex,
    pub b: Complex,
}

impl PlanarMap for LinearPlanar {
    fn label(&self) -> String {
        format!("({:?}) z + ({:?}) conj z", self.a, self.b)
    }
    fn eval(&self, z: Complex) -> Result<Complex> {
        Ok(self.a * z + self.b * z.conj())
    }
    fn analytic_wirtinger(&self, _z: Complex) -> Option<Result<Wirtinger>> {
        Some(Ok(Wirtinger {
            f_z: self.a,
            f_zbar: self.b,
        }))
    }
}

fn check_disk(z: Complex, r0: f64) -> Result<()> {
    if z.abs() > r0 * (1.0 + 1e-12) || !z.is_finite() {
        return Err(Error::domain(format!("|z| = {} outside the disk of radius {r0}", z.abs())));
    }
    Ok(())
}

/// `f(z) = -z log|z|²` on `|z| <= r0` (default `e^{-2}`): continuous `μ`,
/// discontinuous `f_z`, `f_z̄` at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogStretch {
    pub r0: f64,
}

impl Default for LogStretch {
    fn default() -> Self {
        LogStretch { r0: (-2.0f64).exp() }
    }
}

impl PlanarMap for LogStretch {
    fn label(&self) -> String {
        "-z log|z|^2".into()
    }
    fn eval(&self, z: Complex) -> Result<Complex> {
        check_disk(z, self.r0)?;
        if z.norm_sq() == 0.0 {
            return Ok(ZERO);
        }
        Ok(-(z * z.norm_sq().ln()))
    }
    fn analytic_wirtinger(&self, z: Complex) -> Option<Result<Wirtinger>> {
        Some(check_disk(z, self.r0).and_then(|_| {
            if z.norm_sq() == 0.0 {
                return Err(Error::Degenerate("derivatives undefined at 0".into()));
            }
            Ok(Wirtinger {
                f_z: Complex::real(-1.0 - z.norm_sq().ln()),
                f_zbar: -(z / z.conj()),
            })
        }))
    }
}

/// `μ = z / (z̄ (1 + log|z|²))` of [`LogStretch`].
pub fn log_stretch_mu(z: Complex) -> Complex {
    z / (z.conj() * (1.0 + z.norm_sq().ln()))
}

/// `f0(z) = z / log|z|²` on `|z| <= r0` (default `e^{-1}`): `C¹`, with
/// `f0^{-1}` not differentiable at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogShrink {
    pub r0: f64,
}

impl Default for LogShrink {
    fn default() -> Self {
        LogShrink { r0: (-1.0f64).exp() }
    }
}

impl PlanarMap for LogShrink {
    fn label(&self) -> String {
        "z / log|z|^2".into()
    }
    fn eval(&self, z: Complex) -> Result<Complex> {
        check_disk(z, self.r0)?;
        if z.norm_sq() == 0.0 {
            return Ok(ZERO);
        }
        Ok(z / z.norm_sq().ln())
    }
    fn analytic_wirtinger(&self, z: Complex) -> Option<Result<Wirtinger>> {
        Some(check_disk(z, self.r0).map(|_| {
            if z.norm_sq() == 0.0 {
                return Wirtinger {
                    f_z: ZERO,
                    f_zbar: ZERO,
                };
            }
            let l = z.norm_sq().ln();
            Wirtinger {
                f_z: Complex::real((1.0 - 1.0 / l) / l),
                f_zbar: -(z / z.conj()) / (l * l),
            }
        }))
    }
}

/// `g(w) = w^{α+1}/(α+1) + k w̄^{β+1}/(β+1)` on the closed unit disk, with
/// principal powers; `μ_g = k w̄^β / w^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderBeltrami {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
}

impl HolderBeltrami {
    /// Needs `0 < α <= β < 1` and `0 < k < 1`.
    pub fn new(alpha: f64, beta: f64, k: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= beta && beta < 1.0) {
            return Err(Error::domain(format!(
                "need 0 < alpha <= beta < 1, got alpha = {alpha}, beta = {beta}"
            )));
        }
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::domain(format!("need 0 < k < 1, got {k}")));
        }
        Ok(HolderBeltrami { alpha, beta, k })
    }

    /// `γ = β - α`.
    pub fn gamma(&self) -> f64 {
        self.beta - self.alpha
    }
}

impl PlanarMap for HolderBeltrami {
    fn label(&self) -> String {
        format!(
            "w^{a1}/{a1} + {k} conj(w)^{b1}/{b1}",
            a1 = self.alpha + 1.0,
            b1 = self.beta + 1.0,
            k = self.k
        )
    }
    fn eval(&self, w: Complex) -> Result<Complex> {
        check_disk(w, 1.0)?;
        let (a1, b1) = (self.alpha + 1.0, self.beta + 1.0);
        Ok(w.powf(a1) / a1 + w.conj().powf(b1) * (self.k / b1))
    }
    fn analytic_wirtinger(&self, w: Complex) -> Option<Result<Wirtinger>> {
        Some(check_disk(w, 1.0).map(|_| Wirtinger {
            f_z: w.powf(self.alpha),
            f_zbar: w.conj().powf(self.beta) * self.k,
        }))
    }
}

/// Closure-backed planar map without analytic derivatives.
#[derive(Clone)]
pub struct FnPlanar {
    pub label: String,
    pub f: Arc<dyn Fn(Complex) -> Result<Complex> + Send + Sync>,
}

impl FnPlanar {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(Complex) -> Result<Complex> + Send + Sync + 'static,
    ) -> Self {
        FnPlanar {
            label: label.into(),
            f: Arc::new(f),
        }
    }
}

impl PlanarMap for FnPlanar {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn eval(&self, z: Complex) -> Result<Complex> {
        (self.f)(z)
    }
}

fn disk_sample(center: Complex, radius: f64, rng: &mut SampleRng) -> Complex {
    let p: Point = uniform_in_unit_ball(2, rng);
    center + Complex::new(p[0], p[1]) * radius
}

fn check_sampling(radius: f64, pairs: usize) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!("radius must be positive, got {radius}")));
    }
    if pairs < 100 {
        return Err(Error::domain(format!("need at least 100 pairs, got {pairs}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuHolderEstimate {
    /// `max |μ(z1) - μ(z2)| / |z1 - z2|^α` over the sampled pairs.
    pub constant: f64,
    pub used: usize,
    pub skipped: usize,
}

/// Sampled Hölder constant of `μ_f` on the disk `B(center, radius)`.
pub fn holder_modulus_of_mu<F: PlanarMap + ?Sized>(
    f: &F,
    center: Complex,
    radius: f64,
    alpha: f64,
    pairs: usize,
    seed: u64,
    h: Option<f64>,
) -> Result<MuHolderEstimate> {
    check_sampling(radius, pairs)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let mut rng = rng_from_seed(seed);
    let (mut constant, mut used, mut skipped) = (0.0f64, 0, 0);
    for _ in 0..pairs {
        let z1 = disk_sample(center, radius, &mut rng);
        let z2 = disk_sample(center, radius, &mut rng);
        let d = (z1 - z2).abs();
        let mus = complex_dilatation(f, z1, h).and_then(|a| Ok((a, complex_dilatation(f, z2, h)?)));
        match mus {
            Ok((a, b)) if d > 0.0 => {
                constant = constant.max((a.mu - b.mu).abs() / d.powf(alpha));
                used += 1;
            }
            _ => skipped += 1,
        }
    }
    if used == 0 {
        return Err(Error::Degenerate("no usable sample pairs".into()));
    }
    Ok(MuHolderEstimate {
        constant,
        used,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiLipschitzEstimate {
    /// Smallest sampled `|f(z1) - f(z2)| / |z1 - z2|`.
    pub l_est: f64,
    /// Largest sampled ratio.
    pub big_l_est: f64,
    pub used: usize,
    pub skipped: usize,
}

pub fn bilipschitz_estimate<F: PlanarMap + ?Sized>(
    f: &F,
    center: Complex,
    radius: f64,
    pairs: usize,
    seed: u64,
) -> Result<BiLipschitzEstimate> {
    check_sampling(radius, pairs)?;
    let mut rng = rng_from_seed(seed);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let (mut used, mut skipped) = (0, 0);
    for _ in 0..pairs {
        let z1 = disk_sample(center, radius, &mut rng);
        let z2 = disk_sample(center, radius, &mut rng);
        let d = (z1 - z2).abs();
        match (f.eval(z1), f.eval(z2)) {
            (Ok(w1), Ok(w2)) if d > 0.0 => {
                let q = (w1 - w2).abs() / d;
                lo = lo.min(q);
                hi = hi.max(q);
                used += 1;
            }
            _ => skipped += 1,
        }
    }
    if used == 0 {
        return Err(Error::Degenerate("no usable sample pairs".into()));
    }
    Ok(BiLipschitzEstimate {
        l_est: lo,
        big_l_est: hi,
        used,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GrowthVerdict {
    Finite { value: f64 },
    Divergent { partial: f64, shells: usize },
    Inconclusive { partial: f64, reason: String },
}

/// `∫_{B(z0, r0)} |χ(z) - χ0| / |z - z0|² dA` by dyadic shells
/// `r0 2^{-k-1} < |z - z0| < r0 2^{-k}`, `k < GROWTH_SHELLS`.
///
/// In polar coordinates each shell is `∫∫ |χ - χ0| dθ d(log r)`. Contracting
/// shell sums are extrapolated geometrically; sums that fail to decay mean
/// divergence.
pub fn integral_growth_check<X: Fn(Complex) -> Result<Complex>>(
    chi: X,
    z0: Complex,
    chi0: Complex,
    r0: f64,
    cfg: &QuadratureConfig,
) -> Result<GrowthVerdict> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::domain(format!("r0 must be positive, got {r0}")));
    }
    let mut shells = Vec::with_capacity(GROWTH_SHELLS);
    let mut hi = r0.ln();
    for _ in 0..GROWTH_SHELLS {
        let lo = hi - std::f64::consts::LN_2;
        let s = integrate_1d_fallible(
            |s| {
                let r = s.exp();
                let ring = integrate_1d_fallible(
                    |th| Ok((chi(z0 + Complex::from_polar(r, th))? - chi0).abs()),
                    0.0,
                    2.0 * PI,
                    &[],
                    cfg,
                )?;
                Ok(ring.value)
            },
            lo,
            hi,
            &[],
            cfg,
        )?;
        shells.push(s.value);
        hi = lo;
    }
    let partial: f64 = shells.iter().sum();
    Ok(match classify_blocks(&shells) {
        BlockTrend::Contracting(q) => GrowthVerdict::Finite {
            value: partial + shells.last().unwrap() * q / (1.0 - q),
        },
        BlockTrend::NonDecaying => GrowthVerdict::Divergent {
            partial,
            shells: shells.len(),
        },
        BlockTrend::Irregular => GrowthVerdict::Inconclusive {
            partial,
            reason: "shell sums neither contract nor persist".into(),
        },
    })
}
