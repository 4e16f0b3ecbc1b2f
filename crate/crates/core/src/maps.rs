//! Concrete mappings `B^n → R^n` and Jacobians.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{inversion, inversion_jacobian, Point, SPHERE_TOL};
use crate::linalg::Mat;
use crate::profiles::StepProfile;

/// Points closer than this to a declared singular radius have no Jacobian.
pub const GUARD_BAND: f64 = 1e-9;

/// Default central-difference step `1e-5 · max(1, |x|)`.
pub fn default_step(x: &Point) -> f64 {
    1e-5 * x.norm().max(1.0)
}

pub trait Mapping: Send + Sync {
    fn dim(&self) -> usize;

    fn label(&self) -> String;

    fn eval(&self, x: &Point) -> Result<Point>;

    fn has_analytic_jacobian(&self) -> bool {
        false
    }

    /// Exact derivative; `None` when the map has no closed form.
    fn analytic_jacobian(&self, _x: &Point) -> Option<Result<Mat>> {
        None
    }

    /// Radii `|x| = r` across which the derivative may jump.
    fn singular_radii(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Central differences `(f_i(x + h e_j) - f_i(x - h e_j)) / 2h`.
///
/// If a stencil point is rejected by the map, `h` is halved up to four times.
pub fn numeric_jacobian<M: Mapping + ?Sized>(f: &M, x: &Point, h: f64) -> Result<Mat> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain("finite-difference step must be positive"));
    }
    let n = x.dim();
    let mut h = h;
    let mut last_err = None;
    for _ in 0..5 {
        match stencil(f, x, h, n) {
            Ok(m) => return Ok(m),
            Err(e @ Error::Domain(_)) => {
                last_err = Some(e);
                h *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

fn stencil<M: Mapping + ?Sized>(f: &M, x: &Point, h: f64, n: usize) -> Result<Mat> {
    let mut m = Mat::zeros(n);
    for j in 0..n {
        let fp = f.eval(&x.with_coord(j, x[j] + h))?;
        let fm = f.eval(&x.with_coord(j, x[j] - h))?;
        for i in 0..n {
            m[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    if !m.is_finite() {
        return Err(Error::input("map returned non-finite values on the stencil"));
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JacobianStrategy {
    Analytic,
    /// Central differences; `None` selects [`default_step`].
    CentralDifference { step: Option<f64> },
}

/// A map together with the way its derivative is obtained.
#[derive(Clone)]
pub struct DifferentiableMap {
    map: Arc<dyn Mapping>,
    strategy: JacobianStrategy,
}

impl fmt::Debug for DifferentiableMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DifferentiableMap")
            .field("label", &self.map.label())
            .field("strategy", &self.strategy)
            .finish()
    }
}

impl DifferentiableMap {
    /// Uses the analytic Jacobian when the map provides one.
    pub fn new(map: impl Mapping + 'static) -> Self {
        let strategy = if map.has_analytic_jacobian() {
            JacobianStrategy::Analytic
        } else {
            JacobianStrategy::CentralDifference { step: None }
        };
        DifferentiableMap {
            map: Arc::new(map),
            strategy,
        }
    }

    pub fn with_strategy(mut self, strategy: JacobianStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    /// Same map, finite-difference Jacobian with the default step.
    pub fn numeric(self) -> Self {
        self.with_strategy(JacobianStrategy::CentralDifference { step: None })
    }

    pub fn strategy(&self) -> JacobianStrategy {
        self.strategy
    }

    pub fn jacobian(&self, x: &Point) -> Result<Mat> {
        match self.strategy {
            JacobianStrategy::Analytic => match self.map.analytic_jacobian(x) {
                Some(j) => j,
                None => self.difference_jacobian(x, None),
            },
            JacobianStrategy::CentralDifference { step } => self.difference_jacobian(x, step),
        }
    }

    /// Central differences with the step clipped to a quarter of the distance
    /// to the nearest singular radius.
    fn difference_jacobian(&self, x: &Point, step: Option<f64>) -> Result<Mat> {
        let mut h = step.unwrap_or_else(|| default_step(x));
        let rho = x.norm();
        let d = self
            .map
            .singular_radii()
            .iter()
            .map(|r| (rho - r).abs())
            .fold(f64::INFINITY, f64::min);
        if d < GUARD_BAND {
            return Err(Error::Degenerate(format!(
                "|x| = {rho} lies within {GUARD_BAND:e} of a singular radius"
            )));
        }
        h = h.min(0.25 * d);
        numeric_jacobian(self.map.as_ref(), x, h)
    }
}

impl Mapping for DifferentiableMap {
    fn dim(&self) -> usize {
        self.map.dim()
    }
    fn label(&self) -> String {
        self.map.label()
    }
    fn eval(&self, x: &Point) -> Result<Point> {
        self.map.eval(x)
    }
    fn has_analytic_jacobian(&self) -> bool {
        self.strategy == JacobianStrategy::Analytic && self.map.has_analytic_jacobian()
    }
    fn analytic_jacobian(&self, x: &Point) -> Option<Result<Mat>> {
        self.has_analytic_jacobian().then(|| self.map.analytic_jacobian(x)).flatten()
    }
    fn singular_radii(&self) -> Vec<f64> {
        self.map.singular_radii()
    }
}

fn check_dim(x: &Point, n: usize) -> Result<()> {
    if x.dim() == n {
        Ok(())
    } else {
        Err(Error::input(format!("expected a point of R^{n}, got R^{}", x.dim())))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Identity {
    pub dim: usize,
}

impl Mapping for Identity {
    fn dim(&self) -> usize {
        self.dim
    }
    fn label(&self) -> String {
        "identity".into()
    }
    fn eval(&self, x: &Point) -> Result<Point> {
        check_dim(x, self.dim)?;
        Ok(*x)
    }
    fn has_analytic_jacobian(&self) -> bool {
        true
    }
    fn analytic_jacobian(&self, _x: &Point) -> Option<Result<Mat>> {
        Some(Ok(Mat::identity(self.dim)))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LinearMap {
    pub matrix: Mat,
}

impl Mapping for LinearMap {
    fn dim(&self) -> usize {
        self.matrix.dim()
    }
    fn label(&self) -> String {
        format!("linear {:?}", self.matrix)
    }
    fn eval(&self, x: &Point) -> Result<Point> {
        check_dim(x, self.dim())?;
        Ok(self.matrix.apply(x))
    }
    fn has_analytic_jacobian(&self) -> bool {
        true
    }
    fn analytic_jacobian(&self, _x: &Point) -> Option<Result<Mat>> {
        Some(Ok(self.matrix))
    }
}

/// `g(ρ) [I + (b - 1) x̂ x̂ᵀ]`, the derivative of `x ↦ g(|x|) x` when
/// `ρ g'(ρ) = (b - 1) g(ρ)`.
fn radial_jacobian(x: &Point, g: f64, b: f64) -> Mat {
    let n = x.dim();
    let u = x.scale(1.0 / x.norm());
    let mut m = Mat::scalar(n, g);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] += g * (b - 1.0) * u[i] * u[j];
        }
    }
    m
}

/// `f(x) = (x/|x|) exp(∫_1^{|x|} β(t)/t dt)`, `f(0) = 0`, on the closed unit ball.
#[derive(Debug, Clone)]
pub struct RadialStretchMap {
    profile: StepProfile,
    dim: usize,
    /// `suffix[j]`: `Σ_{i ≥ j} (v_i - 1) ln(hi_i / lo_i)` over the spikes.
    suffix: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDilatations {
    pub delta_tau: f64,
    pub delta_r: f64,
    pub op_norm: f64,
    pub k_i: f64,
    pub k_o: f64,
    /// `|x|` is within [`GUARD_BAND`] of a jump of `β`; the values are those
    /// of the piece containing `|x|`.
    pub at_breakpoint: bool,
}

impl RadialStretchMap {
    pub fn new(profile: StepProfile, dim: usize) -> Result<Self> {
        if !(2..=4).contains(&dim) {
            return Err(Error::domain(format!("radial maps need 2 <= n <= 4, got {dim}")));
        }
        let spikes = profile.spikes();
        let mut suffix = vec![0.0; spikes.len() + 1];
        for (j, s) in spikes.iter().enumerate().rev() {
            suffix[j] = suffix[j + 1] + (s.value - 1.0) * -(-s.width / s.hi).ln_1p();
        }
        Ok(RadialStretchMap {
            profile,
            dim,
            suffix,
        })
    }

    pub fn profile(&self) -> &StepProfile {
        &self.profile
    }

    /// `∫_ρ^1 (β(t) - 1)/t dt`.
    fn excess(&self, rho: f64) -> f64 {
        let spikes = self.profile.spikes();
        let j = spikes.partition_point(|s| s.hi <= rho);
        match spikes.get(j) {
            Some(s) if s.lo < rho => (s.value - 1.0) * (s.hi / rho).ln() + self.suffix[j + 1],
            _ => self.suffix[j],
        }
    }

    /// `|f(x)|/|x| = exp(-∫_ρ^1 (β - 1)/t dt)`.
    pub fn stretch(&self, rho: f64) -> f64 {
        (-self.excess(rho)).exp()
    }

    fn check(&self, x: &Point) -> Result<f64> {
        check_dim(x, self.dim)?;
        let rho = x.norm();
        if rho > 1.0 + SPHERE_TOL {
            return Err(Error::domain(format!("radial map defined on the closed unit ball, |x| = {rho}")));
        }
        Ok(rho)
    }

    pub fn near_breakpoint(&self, rho: f64) -> bool {
        self.profile
            .spikes()
            .iter()
            .any(|s| (rho - s.lo).abs() < GUARD_BAND || (rho - s.hi).abs() < GUARD_BAND)
    }

    pub fn dilatations(&self, x: &Point) -> Result<RadialDilatations> {
        let rho = self.check(x)?;
        if rho == 0.0 {
            return Err(Error::Degenerate("radial dilatations need x != 0".into()));
        }
        let g = self.stretch(rho);
        let b = self.profile.value_at(rho.min(1.0));
        Ok(RadialDilatations {
            delta_tau: g,
            delta_r: g * b,
            op_norm: g * b.max(1.0),
            k_i: b,
            k_o: b.powi(self.dim as i32 - 1),
            at_breakpoint: self.near_breakpoint(rho),
        })
    }
}

impl Mapping for RadialStretchMap {
    fn dim(&self) -> usize {
        self.dim
    }
    fn label(&self) -> String {
        format!("radial stretch ({:?}, n = {})", self.profile.scheme(), self.dim)
    }
    fn eval(&self, x: &Point) -> Result<Point> {
        let rho = self.check(x)?;
        if rho == 0.0 {
            return Ok(Point::zero(self.dim));
        }
        Ok(x.scale(self.stretch(rho.min(1.0))))
    }
    fn has_analytic_jacobian(&self) -> bool {
        true
    }
    fn analytic_jacobian(&self, x: &Point) -> Option<Result<Mat>> {
        Some(self.check(x).and_then(|rho| {
            if rho == 0.0 {
                return Err(Error::Degenerate("radial map derivative at 0".into()));
            }
            let r = rho.min(1.0);
            Ok(radial_jacobian(x, self.stretch(r), self.profile.value_at(r)))
        }))
    }
    fn singular_radii(&self) -> Vec<f64> {
        self.profile.breakpoints(0.0, 1.0)
    }
}

pub fn radial_map_eval(m: &RadialStretchMap, x: &Point) -> Result<Point> {
    m.eval(x)
}

pub fn radial_dilatations(m: &RadialStretchMap, x: &Point) -> Result<RadialDilatations> {
    m.dilatations(x)
}

/// `f(x) = x |x|^{1/K - 1}`; the planar case is `z |z|^{1/K - 1}`.
#[derive(Debug, Clone, Copy)]
pub struct PowerMap {
    pub k: f64,
    pub dim: usize,
}

impl PowerMap {
    pub fn planar(k: f64) -> Result<Self> {
        Self::new(k, 2)
    }

    pub fn new(k: f64, dim: usize) -> Result<Self> {
        if !(k >= 1.0 && k.is_finite()) {
            return Err(Error::domain(format!("power map needs K >= 1, got {k}")));
        }
        if !(2..=4).contains(&dim) {
            return Err(Error::domain("power map needs 2 <= n <= 4"));
        }
        Ok(PowerMap { k, dim })
    }
}

impl Mapping for PowerMap {
    fn dim(&self) -> usize {
        self.dim
    }
    fn label(&self) -> String {
        format!("power map K = {}", self.k)
    }
    fn eval(&self, x: &Point) -> Result<Point> {
        check_dim(x, self.dim)?;
        let rho = x.norm();
        if rho == 0.0 {
            return Ok(*x);
        }
        Ok(x.scale(rho.powf(1.0 / self.k - 1.0)))
    }
    fn has_analytic_jacobian(&self) -> bool {
        true
    }
    fn analytic_jacobian(&self, x: &Point) -> Option<Result<Mat>> {
        if let Err(e) = check_dim(x, self.dim) {
            return Some(Err(e));
        }
        let rho = x.norm();
        if rho == 0.0 {
            return Some(Err(Error::Degenerate("power map derivative at 0".into())));
        }
        let a = 1.0 / self.k;
        Some(Ok(radial_jacobian(x, rho.powf(a - 1.0), a)))
    }
}

pub fn power_map(k: f64) -> Result<DifferentiableMap> {
    Ok(DifferentiableMap::new(PowerMap::planar(k)?))
}

/// `F = f` on the open ball and `ψ ∘ f ∘ ψ` on `|x| ≥ 1`, `ψ(x) = x/|x|²`.
#[derive(Debug, Clone)]
pub struct InversionExtension {
    inner: DifferentiableMap,
}

impl InversionExtension {
    pub fn new(inner: DifferentiableMap) -> Self {
        InversionExtension { inner }
    }
}

impl Mapping for InversionExtension {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn label(&self) -> String {
        format!("inversion extension of {}", self.inner.label())
    }
    fn eval(&self, x: &Point) -> Result<Point> {
        if x.norm() < 1.0 {
            return self.inner.eval(x);
        }
        let fy = self.inner.eval(&inversion(x)?)?;
        inversion(&fy).map_err(|_| Error::domain("f(ψ(x)) = 0 has no inversion"))
    }
    fn has_analytic_jacobian(&self) -> bool {
        self.inner.has_analytic_jacobian()
    }
    fn analytic_jacobian(&self, x: &Point) -> Option<Result<Mat>> {
        if !self.has_analytic_jacobian() {
            return None;
        }
        Some((|| {
            if x.norm() < 1.0 {
                return self.inner.jacobian(x);
            }
            let y = inversion(x)?;
            let fy = self.inner.eval(&y)?;
            Ok(inversion_jacobian(&fy)? * self.inner.jacobian(&y)? * inversion_jacobian(x)?)
        })())
    }
    fn singular_radii(&self) -> Vec<f64> {
        let mut r = self.inner.singular_radii();
        let reflected: Vec<f64> = r.iter().filter(|v| **v > 0.0).map(|v| 1.0 / v).collect();
        r.extend(reflected);
        r.push(1.0);
        r
    }
}

pub fn inversion_extension(f: &DifferentiableMap) -> DifferentiableMap {
    let strategy = f.strategy();
    DifferentiableMap::new(InversionExtension::new(f.clone())).with_strategy(strategy)
}

/// Map given by a closure, without analytic derivative.
pub struct FnMap<F> {
    pub dim: usize,
    pub label: String,
    pub f: F,
}

impl<F: Fn(&Point) -> Result<Point> + Send + Sync> Mapping for FnMap<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn label(&self) -> String {
        self.label.clone()
    }
    fn eval(&self, x: &Point) -> Result<Point> {
        (self.f)(x)
    }
}
