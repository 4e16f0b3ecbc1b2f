//! Adaptive Gauss–Kronrod integration on intervals, dyadic tails, spheres and
//! ball-shaped regions.
//!
//! Every routine is deterministic: subdivision order depends only on the
//! inputs and final sums are taken in order of the left endpoint.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cap_area, sphere_area, BallRegion, Point, RegionKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub const ZERO: QuadratureResult = QuadratureResult {
        value: 0.0,
        error_estimate: 0.0,
        evaluations: 0,
    };

    fn accumulate(&mut self, other: &QuadratureResult) {
        self.value += other.value;
        self.error_estimate += other.error_estimate;
        self.evaluations += other.evaluations;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the number of subintervals of one adaptive run.
    pub max_subdivisions: usize,
    /// Upper end of the dyadic block sweep used for `∫_a^∞`.
    pub tail_cutoff: f64,
    /// Uniform longitude nodes for non-zonal integrands on `S^2`.
    pub sphere_longitudes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            tail_cutoff: 1e12,
            sphere_longitudes: 128,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(tol: f64) -> Self {
        QuadratureConfig {
            abs_tol: tol,
            rel_tol: tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::domain("abs_tol and rel_tol must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        if !(self.tail_cutoff > 1.0) || !self.tail_cutoff.is_finite() {
            return Err(Error::domain("tail_cutoff must be finite and > 1"));
        }
        if self.sphere_longitudes < 1 {
            return Err(Error::domain("sphere_longitudes must be at least 1"));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule (abscissae on [0,1)).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn non_finite(x: f64) -> Error {
    Error::input(format!("integrand returned a non-finite value at {x:e}"))
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(non_finite(center));
    }
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(non_finite(x1));
        }
        if !f2.is_finite() {
            return Err(non_finite(x2));
        }
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment { a, b, value, err })
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// The integrand is never evaluated at `a` or `b`, so integrable endpoint
/// singularities are allowed.
pub fn integrate_1d<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    integrate_1d_breaks(f, a, b, &[], cfg)
}

/// As [`integrate_1d`], with the initial partition aligned to `breaks`
/// (points outside `(a, b)` are ignored). Use this for known jumps or kinks.
pub fn integrate_1d_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a > b {
        return Err(Error::domain(format!("need a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadratureResult::ZERO);
    }

    let mut nodes: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes.insert(0, a);
    nodes.push(b);

    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    let mut evaluations = 0;
    let (mut total, mut total_err) = (0.0, 0.0);
    for w in nodes.windows(2) {
        let s = gk21(&f, w[0], w[1])?;
        evaluations += 21;
        total += s.value;
        total_err += s.err;
        heap.push(s);
    }

    while total_err > cfg.target(total) && heap.len() + frozen.len() < cfg.max_subdivisions {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) <= 1024.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()) {
            frozen.push(worst);
            continue;
        }
        let left = gk21(&f, worst.a, mid)?;
        let right = gk21(&f, mid, worst.b)?;
        evaluations += 42;
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }

    let mut segs: Vec<Segment> = heap.into_vec();
    segs.extend(frozen);
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = segs.iter().map(|s| s.value).sum();
    let error_estimate: f64 = segs.iter().map(|s| s.err).sum();
    if error_estimate > cfg.target(value) {
        return Err(Error::NoConvergence {
            estimate: value,
            error_estimate,
            evaluations,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate,
        evaluations,
    })
}

/// [`integrate_1d_breaks`] for integrands that can fail; the first error
/// raised by `f` is returned instead of a quadrature result.
pub(crate) fn integrate_1d_fallible<F: Fn(f64) -> Result<f64>>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let out = integrate_1d_breaks(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        breaks,
        cfg,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    out
}

/// Ratio below which consecutive block sums count as contracting.
pub const CONTRACTION_RATIO: f64 = 0.9;
/// Number of consecutive ratios that decide a trend.
pub const TREND_RUN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockTrend {
    /// The last ratios are all below [`CONTRACTION_RATIO`]; carries the last ratio.
    Contracting(f64),
    /// The last ratios are all at least [`CONTRACTION_RATIO`].
    NonDecaying,
    /// Sign changes or a mixed run of ratios.
    Irregular,
}

/// Classifies a sequence of non-negative block sums by the trend of its last
/// [`TREND_RUN`] ratios.
pub fn classify_blocks(blocks: &[f64]) -> BlockTrend {
    if blocks.len() < TREND_RUN + 1 {
        return BlockTrend::Irregular;
    }
    let tail = &blocks[blocks.len() - TREND_RUN - 1..];
    if tail.iter().any(|b| *b < 0.0 || !b.is_finite()) {
        return BlockTrend::Irregular;
    }
    if tail.iter().skip(1).all(|b| *b == 0.0) {
        return BlockTrend::Contracting(0.0);
    }
    let mut ratios = Vec::with_capacity(TREND_RUN);
    for w in tail.windows(2) {
        if w[0] == 0.0 {
            return BlockTrend::Irregular;
        }
        ratios.push(w[1] / w[0]);
    }
    if ratios.iter().all(|r| *r < CONTRACTION_RATIO) {
        BlockTrend::Contracting(*ratios.last().unwrap())
    } else if ratios.iter().all(|r| *r >= CONTRACTION_RATIO) {
        BlockTrend::NonDecaying
    } else {
        BlockTrend::Irregular
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TailOutcome {
    Converged(QuadratureResult),
    Divergent { partial: f64, blocks: usize },
    Inconclusive { partial: f64, reason: String },
}

impl TailOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            TailOutcome::Converged(r) => Some(r.value),
            _ => None,
        }
    }
}

/// `∫_a^∞ f` by dyadic blocks `[2^k a, 2^{k+1} a]` up to `cfg.tail_cutoff`.
///
/// The verdict is read from the trend of the last block sums before the
/// cutoff; a contracting run is extrapolated as a geometric series.
pub fn integrate_tail<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    cfg: &QuadratureConfig,
) -> Result<TailOutcome> {
    cfg.validate()?;
    if !(a >= 1.0) || !a.is_finite() {
        return Err(Error::domain(format!("tail integral needs finite a >= 1, got {a}")));
    }
    let mut blocks = Vec::new();
    let mut acc = QuadratureResult::ZERO;
    let mut lo = a;
    while lo < cfg.tail_cutoff {
        let hi = (2.0 * lo).min(cfg.tail_cutoff);
        if hi < 2.0 * lo {
            break;
        }
        let r = integrate_1d(&f, lo, hi, cfg)?;
        acc.accumulate(&r);
        blocks.push(r.value);
        lo = hi;
    }
    match classify_blocks(&blocks) {
        BlockTrend::Contracting(q) => {
            let last = *blocks.last().unwrap();
            let rest = last * q / (1.0 - q);
            acc.value += rest;
            acc.error_estimate += rest.abs() * 1e-2;
            Ok(TailOutcome::Converged(acc))
        }
        BlockTrend::NonDecaying => Ok(TailOutcome::Divergent {
            partial: acc.value,
            blocks: blocks.len(),
        }),
        BlockTrend::Irregular => Ok(TailOutcome::Inconclusive {
            partial: acc.value,
            reason: "block sums neither contract nor persist".into(),
        }),
    }
}

/// A real-valued field on `R^n` with optional structural hints used to align
/// quadrature with discontinuities.
pub trait ScalarField {
    fn eval(&self, x: &Point) -> f64;

    /// True when the value depends on `|x|` only.
    fn is_radial(&self) -> bool {
        false
    }

    /// Radii `ρ` such that the field may jump across `|x| = ρ`.
    fn jump_radii(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<F: Fn(&Point) -> f64> ScalarField for F {
    fn eval(&self, x: &Point) -> f64 {
        self(x)
    }
}

/// Field `x ↦ f(|x|)` with declared jump radii.
pub struct RadialField<F> {
    pub profile: F,
    pub jumps: Vec<f64>,
}

impl<F: Fn(f64) -> f64> RadialField<F> {
    pub fn new(profile: F, jumps: Vec<f64>) -> Self {
        RadialField { profile, jumps }
    }
}

impl<F: Fn(f64) -> f64> ScalarField for RadialField<F> {
    fn eval(&self, x: &Point) -> f64 {
        (self.profile)(x.norm())
    }
    fn is_radial(&self) -> bool {
        true
    }
    fn jump_radii(&self) -> Vec<f64> {
        self.jumps.clone()
    }
}

/// Orthonormal frame `(axis, e1, e2)` (the last vector only for `n = 3`).
fn frame(axis: &Point) -> [Point; 2] {
    let n = axis.dim();
    if n == 2 {
        return [Point::xy(-axis[1], axis[0]), Point::zero(2)];
    }
    let k = (0..3)
        .min_by(|&i, &j| axis[i].abs().total_cmp(&axis[j].abs()))
        .unwrap();
    let e = Point::basis(3, k);
    let e1 = (e - axis.scale(e.dot(axis))).normalized().unwrap();
    let e2 = Point::xyz(
        axis[1] * e1[2] - axis[2] * e1[1],
        axis[2] * e1[0] - axis[0] * e1[2],
        axis[0] * e1[1] - axis[1] * e1[0],
    );
    [e1, e2]
}

/// Integral over the part `{u_lo < u < u_hi}` of the sphere `S(center, radius)`,
/// where `u` is the cosine of the angle to `axis` (a unit vector).
#[allow(clippy::too_many_arguments)]
fn sphere_band<G: ScalarField + ?Sized>(
    g: &G,
    center: &Point,
    radius: f64,
    axis: &Point,
    (u_lo, u_hi): (f64, f64),
    u_breaks: &[f64],
    longitudes: usize,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let n = center.dim();
    let (u_lo, u_hi) = (u_lo.max(-1.0), u_hi.min(1.0));
    if u_lo >= u_hi {
        return Ok(QuadratureResult::ZERO);
    }
    let [e1, e2] = frame(axis);
    match n {
        2 => {
            let (t_lo, t_hi) = (u_hi.acos(), u_lo.acos());
            let breaks: Vec<f64> = u_breaks.iter().map(|u| u.clamp(-1.0, 1.0).acos()).collect();
            let h = |t: f64| {
                let (c, s) = (t.cos(), t.sin());
                let p = *center + (*axis * c + e1 * s) * radius;
                let m = *center + (*axis * c - e1 * s) * radius;
                g.eval(&p) + g.eval(&m)
            };
            let mut r = integrate_1d_breaks(h, t_lo, t_hi, &breaks, cfg)?;
            r.value *= radius;
            r.error_estimate *= radius;
            r.evaluations *= 2;
            Ok(r)
        }
        3 => {
            let m = longitudes.max(1);
            let dphi = 2.0 * PI / m as f64;
            let trig: Vec<(f64, f64)> = (0..m)
                .map(|k| {
                    let phi = k as f64 * dphi;
                    (phi.cos(), phi.sin())
                })
                .collect();
            let h = |u: f64| {
                let w = (1.0 - u * u).max(0.0).sqrt();
                let base = *center + *axis * (radius * u);
                trig.iter()
                    .map(|(c, s)| g.eval(&(base + (e1 * *c + e2 * *s) * (radius * w))))
                    .sum::<f64>()
                    * dphi
            };
            let mut r = integrate_1d_breaks(h, u_lo, u_hi, u_breaks, cfg)?;
            r.value *= radius * radius;
            r.error_estimate *= radius * radius;
            r.evaluations *= m;
            Ok(r)
        }
        _ => Err(Error::domain(format!(
            "sphere quadrature supports n = 2, 3 (got {n})"
        ))),
    }
}

fn check_sphere_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::domain(format!("sphere quadrature supports n = 2, 3 (got {n})")))
    }
}

/// `∫_{S^{n-1}} g dH^{n-1}` (unnormalised surface measure), `n ∈ {2, 3}`.
pub fn integrate_sphere<G: ScalarField + ?Sized>(
    g: &G,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    check_sphere_dim(n)?;
    integrate_sphere_about(g, &Point::north(n), &[], cfg)
}

/// Like [`integrate_sphere`], with latitudes measured from `axis` and the
/// latitude integral split at the cosines `u_breaks`.
pub fn integrate_sphere_about<G: ScalarField + ?Sized>(
    g: &G,
    axis: &Point,
    u_breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    let n = axis.dim();
    check_sphere_dim(n)?;
    let axis = axis
        .normalized()
        .ok_or_else(|| Error::domain("sphere axis must be non-zero"))?;
    let m = if g.is_radial() { 1 } else { cfg.sphere_longitudes };
    sphere_band(g, &Point::zero(n), 1.0, &axis, (-1.0, 1.0), u_breaks, m, cfg)
}

/// Latitude cosine (about the direction of `center`) at which the sphere
/// `S(center, s)` crosses `|x| = rho`.
fn crossing_cosine(center_norm: f64, s: f64, rho: f64) -> f64 {
    (rho * rho - center_norm * center_norm - s * s) / (2.0 * s * center_norm)
}

#[derive(Clone, Copy, PartialEq)]
enum Clip {
    None,
    Inside,
    Outside,
}

fn axis_for(center: &Point) -> Point {
    center
        .normalized()
        .unwrap_or_else(|| Point::north(center.dim()))
}

/// `∫_{S(center, radius)} g dH^{n-1}`, with latitude splits placed where the
/// sphere crosses the jump radii of `g`.
pub fn integrate_sphere_surface<G: ScalarField + ?Sized>(
    g: &G,
    center: &Point,
    radius: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    check_sphere_dim(center.dim())?;
    if !(radius > 0.0) {
        return Err(Error::domain("sphere radius must be positive"));
    }
    shell(g, center, radius, Clip::None, cfg)
}

fn shell<G: ScalarField + ?Sized>(
    g: &G,
    center: &Point,
    s: f64,
    clip: Clip,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let c = center.norm();
    let axis = axis_for(center);
    // a radial field is zonal about the direction of the center
    let longitudes = if g.is_radial() { 1 } else { cfg.sphere_longitudes };
    let mut range = (-1.0, 1.0);
    if clip != Clip::None {
        if c == 0.0 {
            let keep = match clip {
                Clip::Inside => s < 1.0,
                _ => s > 1.0,
            };
            if !keep {
                return Ok(QuadratureResult::ZERO);
            }
        } else {
            let u = crossing_cosine(c, s, 1.0);
            match clip {
                Clip::Inside => range.1 = u,
                _ => range.0 = u,
            }
        }
    }
    let breaks: Vec<f64> = if c > 0.0 {
        g.jump_radii()
            .into_iter()
            .map(|rho| crossing_cosine(c, s, rho))
            .filter(|u| *u > range.0 && *u < range.1)
            .collect()
    } else {
        Vec::new()
    };
    sphere_band(g, center, s, &axis, range, &breaks, longitudes, cfg)
}

/// `∫_region g dm`.
///
/// Radial fields are integrated as `∫ g(ρ) A(ρ) dρ`, where `A(ρ)` is the
/// area of `{|x| = ρ} ∩ region` in closed form. Other fields are integrated
/// over spheres about the region center.
pub fn integrate_ball<G: ScalarField + ?Sized>(
    g: &G,
    region: &BallRegion,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    let n = region.dim();
    let clip = match region.kind {
        RegionKind::Ball | RegionKind::Annulus => Clip::None,
        RegionKind::BallCapMinus | RegionKind::BallIntersectUnitBall => Clip::Inside,
        RegionKind::BallCapPlus => Clip::Outside,
    };
    let c = region.center.norm();
    let (r_in, r_out) = (region.r_inner, region.r_outer);
    if clip == Clip::Inside && c - r_out >= 1.0 {
        return Ok(QuadratureResult::ZERO);
    }
    if g.is_radial() {
        return radial_ball(g, n, c, r_in, r_out, clip, cfg);
    }
    check_sphere_dim(n)?;

    let mut kinks = vec![(1.0 - c).abs(), 1.0 + c];
    for rho in g.jump_radii() {
        kinks.push((rho - c).abs());
        kinks.push(rho + c);
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_err = Cell::new(0.0f64);
    let inner_evals = Cell::new(0usize);
    let f = |s: f64| match shell(g, &region.center, s, clip, cfg) {
        Ok(r) => {
            inner_err.set(inner_err.get().max(r.error_estimate));
            inner_evals.set(inner_evals.get() + r.evaluations);
            r.value
        }
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let outer = integrate_1d_breaks(f, r_in, r_out, &kinks, cfg);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut r = outer?;
    r.error_estimate += inner_err.get() * (r_out - r_in);
    r.evaluations = inner_evals.get();
    Ok(r)
}

fn radial_ball<G: ScalarField + ?Sized>(
    g: &G,
    n: usize,
    c: f64,
    r_in: f64,
    r_out: f64,
    clip: Clip,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let full = sphere_area(n - 1);
    // measure of {t ∈ S^{n-1} : t·ĉ > u}
    let cap = |u: f64| -> f64 {
        if u <= -1.0 {
            full
        } else if u >= 1.0 {
            0.0
        } else {
            cap_area(u.acos(), n).unwrap_or(f64::NAN)
        }
    };
    let area = |rho: f64| -> f64 {
        let frac = if c == 0.0 {
            if rho > r_in && rho < r_out {
                full
            } else {
                0.0
            }
        } else {
            let outer = cap((rho * rho + c * c - r_out * r_out) / (2.0 * rho * c));
            let inner = if r_in > 0.0 {
                cap((rho * rho + c * c - r_in * r_in) / (2.0 * rho * c))
            } else {
                0.0
            };
            outer - inner
        };
        frac * rho.powi(n as i32 - 1)
    };
    let mut lo = (c - r_out).max(0.0);
    let mut hi = c + r_out;
    match clip {
        Clip::Inside => hi = hi.min(1.0),
        Clip::Outside => lo = lo.max(1.0),
        Clip::None => {}
    }
    if lo >= hi {
        return Ok(QuadratureResult::ZERO);
    }
    let mut breaks = g.jump_radii();
    breaks.extend([(c - r_in).abs(), c + r_in, (c - r_out).abs(), c + r_out]);
    let probe = Point::basis(n, 0);
    integrate_1d_breaks(
        |rho| {
            let a = area(rho);
            if a == 0.0 {
                0.0
            } else {
                g.eval(&probe.scale(rho)) * a
            }
        },
        lo,
        hi,
        &breaks,
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn one_dimensional_examples() {
        let r = integrate_1d(|t| t, 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-14);
        assert!(r.evaluations >= 1 && r.error_estimate >= 0.0);
        let r = integrate_1d(f64::sin, 0.0, PI, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        let r = integrate_1d(|t: f64| t.powf(-0.5), 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn nan_is_an_input_error() {
        let e = integrate_1d(|_| f64::NAN, 0.0, 1.0, &cfg()).unwrap_err();
        assert!(matches!(e, Error::Input(_)));
    }

    #[test]
    fn budget_exhaustion_carries_estimate() {
        let tight = QuadratureConfig {
            max_subdivisions: 3,
            ..QuadratureConfig::with_tolerance(1e-14)
        };
        let e = integrate_1d(|t: f64| t.ln().abs().sqrt(), 0.0, 1.0, &tight).unwrap_err();
        match e {
            Error::NoConvergence { estimate, .. } => assert!((estimate - 0.886).abs() < 0.05),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn breakpoints_align_with_jumps() {
        let step = |t: f64| if t < 1.0 / 3.0 { 1.0 } else { 5.0 };
        let r = integrate_1d_breaks(step, 0.0, 1.0, &[1.0 / 3.0], &cfg()).unwrap();
        assert!((r.value - (1.0 / 3.0 + 10.0 / 3.0)).abs() < 1e-14);
        assert_eq!(r.evaluations, 42);
    }

    #[test]
    fn tails() {
        let r = integrate_tail(|t| t.powi(-2), 1.0, &cfg()).unwrap();
        assert!((r.value().unwrap() - 1.0).abs() < 1e-9, "{r:?}");
        let r = integrate_tail(|t| 1.0 / t, 1.0, &cfg()).unwrap();
        assert!(matches!(r, TailOutcome::Divergent { .. }));
        let r = integrate_tail(|t: f64| t / t.powi(3), 1.0, &cfg()).unwrap();
        assert!((r.value().unwrap() - 1.0).abs() < 1e-9);
        let r = integrate_tail(|t: f64| (t.ln().sin() + 0.0) / t, 1.0, &cfg()).unwrap();
        assert!(matches!(r, TailOutcome::Inconclusive { .. }), "{r:?}");
    }

    #[test]
    fn block_classification() {
        assert_eq!(classify_blocks(&[1.0, 0.5, 0.25, 0.125]), BlockTrend::Contracting(0.5));
        assert_eq!(classify_blocks(&[1.0, 1.0, 1.0, 1.0]), BlockTrend::NonDecaying);
        assert_eq!(classify_blocks(&[1.0, 0.5, 1.0, 0.5]), BlockTrend::Irregular);
        assert_eq!(classify_blocks(&[1.0, 0.5]), BlockTrend::Irregular);
    }

    #[test]
    fn sphere_examples() {
        let r = integrate_sphere(&|_: &Point| 1.0, 3, &cfg()).unwrap();
        assert!((r.value - 4.0 * PI).abs() < 1e-12);
        let r = integrate_sphere(&|t: &Point| t[2] * t[2], 3, &cfg()).unwrap();
        assert!((r.value - 4.0 * PI / 3.0).abs() < 1e-12);
        let cap = |t: &Point| if t[2] > (PI / 2.0).cos() { 1.0 } else { 0.0 };
        let r = integrate_sphere(&cap, 3, &cfg()).unwrap();
        assert!((r.value - 2.0 * PI).abs() < 1e-9, "{r:?}");
        let r = integrate_sphere(&|_: &Point| 1.0, 2, &cfg()).unwrap();
        assert!((r.value - 2.0 * PI).abs() < 1e-12);
        assert!(integrate_sphere(&|_: &Point| 1.0, 4, &cfg()).is_err());
    }

    #[test]
    fn non_zonal_sphere_integrand() {
        // ∫ x^2 y^2 dH over S^2 = 4π/15
        let r = integrate_sphere(&|t: &Point| (t[0] * t[1]).powi(2), 3, &cfg()).unwrap();
        assert!((r.value - 4.0 * PI / 15.0).abs() < 1e-12);
        let tilted = Point::xyz(1.0, 2.0, -2.0);
        let r = integrate_sphere_about(&|t: &Point| t[2] * t[2], &tilted, &[], &cfg()).unwrap();
        assert!((r.value - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ball_examples() {
        let o = Point::zero(3);
        let one = |_: &Point| 1.0;
        let r = integrate_ball(&one, &BallRegion::ball(o, 1.0).unwrap(), &cfg()).unwrap();
        assert!((r.value - 4.0 * PI / 3.0).abs() < 1e-11);
        let r = integrate_ball(&one, &BallRegion::annulus(o, 0.5, 1.0).unwrap(), &cfg()).unwrap();
        assert!((r.value - 4.0 * PI / 3.0 * 7.0 / 8.0).abs() < 1e-11);
        let inv = |x: &Point| 1.0 / x.norm_sq();
        let r = integrate_ball(&inv, &BallRegion::ball(o, 1.0).unwrap(), &cfg()).unwrap();
        assert!((r.value - 4.0 * PI).abs() < 1e-9);
        let radial = RadialField::new(|r: f64| r.powi(-2), vec![]);
        let r = integrate_ball(&radial, &BallRegion::ball(o, 1.0).unwrap(), &cfg()).unwrap();
        assert!((r.value - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn clipped_regions() {
        let one = |_: &Point| 1.0;
        let radial_one = RadialField::new(|_| 1.0, vec![]);
        let far = BallRegion::intersect_unit_ball(Point::xyz(5.0, 0.0, 0.0), 1.0).unwrap();
        let r = integrate_ball(&one, &far, &cfg()).unwrap();
        assert_eq!(r, QuadratureResult::ZERO);
        // lens B(e3, eps) ∩ B^3: volume π eps^3 (2/3 - eps/4) ... checked both ways
        let eps = 0.3;
        let lens = BallRegion::cap_minus(Point::north(3), eps).unwrap();
        let exact = PI * eps.powi(3) * (2.0 / 3.0 - eps / 4.0);
        let a = integrate_ball(&one, &lens, &cfg()).unwrap().value;
        let b = integrate_ball(&radial_one, &lens, &cfg()).unwrap().value;
        assert!((a - exact).abs() < 1e-11, "{a} vs {exact}");
        assert!((b - exact).abs() < 1e-11, "{b} vs {exact}");
        let plus = BallRegion::cap_plus(Point::north(3), eps).unwrap();
        let c = integrate_ball(&one, &plus, &cfg()).unwrap().value;
        let d = integrate_ball(&radial_one, &plus, &cfg()).unwrap().value;
        let ball = 4.0 * PI / 3.0 * eps.powi(3);
        assert!((c - (ball - exact)).abs() < 1e-11);
        assert!((d - (ball - exact)).abs() < 1e-11);
        // planar lens through the radial path
        let lens2 = BallRegion::cap_minus(Point::xy(0.0, 1.0), 0.5).unwrap();
        let e = integrate_ball(&one, &lens2, &cfg()).unwrap().value;
        let f = integrate_ball(&radial_one, &lens2, &cfg()).unwrap().value;
        assert!((e - f).abs() < 1e-10);
    }

    #[test]
    fn radial_and_shell_paths_agree_with_jumps() {
        let step = RadialField::new(|r: f64| if r < 0.8 { 1.0 } else { 3.0 }, vec![0.8]);
        let plain = |x: &Point| if x.norm() < 0.8 { 1.0 } else { 3.0 };
        struct Declared<F>(F);
        impl<F: Fn(&Point) -> f64> ScalarField for Declared<F> {
            fn eval(&self, x: &Point) -> f64 {
                (self.0)(x)
            }
            fn jump_radii(&self) -> Vec<f64> {
                vec![0.8]
            }
        }
        let region = BallRegion::intersect_unit_ball(Point::xyz(0.0, 0.6, 0.6), 0.4).unwrap();
        let a = integrate_ball(&step, &region, &cfg()).unwrap().value;
        let b = integrate_ball(&Declared(plain), &region, &cfg()).unwrap().value;
        assert!((a - b).abs() < 1e-9 * a.abs(), "{a} vs {b}");
    }

    #[test]
    fn deterministic() {
        let f = |t: f64| (3.0 * t).sin() * t.sqrt();
        let a = integrate_1d(f, 0.0, 4.0, &cfg()).unwrap();
        let b = integrate_1d(f, 0.0, 4.0, &cfg()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig { abs_tol: 0.0, ..cfg() }.validate().is_err());
        assert!(QuadratureConfig { max_subdivisions: 0, ..cfg() }.validate().is_err());
        assert!(QuadratureConfig { tail_cutoff: 1.0, ..cfg() }.validate().is_err());
        assert!(integrate_1d(|t| t, 1.0, 0.0, &cfg()).is_err());
    }

    proptest! {
        #[test]
        fn linearity(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, b in 0.5f64..4.0) {
            let f = |t: f64| t.cos() * t;
            let g = |t: f64| (t * t + 1.0).ln();
            let c = cfg();
            let i_f = integrate_1d(f, 0.0, b, &c).unwrap();
            let i_g = integrate_1d(g, 0.0, b, &c).unwrap();
            let i_h = integrate_1d(|t| alpha * f(t) + beta * g(t), 0.0, b, &c).unwrap();
            let tol = alpha.abs() * i_f.error_estimate + beta.abs() * i_g.error_estimate
                + i_h.error_estimate + 1e-13;
            prop_assert!((i_h.value - alpha * i_f.value - beta * i_g.value).abs() <= tol);
        }

        #[test]
        fn additivity(split in 0.05f64..0.95) {
            let f = |t: f64| t.powf(-0.3) * (5.0 * t).exp();
            let c = cfg();
            let whole = integrate_1d(f, 0.0, 1.0, &c).unwrap();
            let left = integrate_1d(f, 0.0, split, &c).unwrap();
            let right = integrate_1d(f, split, 1.0, &c).unwrap();
            let tol = whole.error_estimate + left.error_estimate + right.error_estimate;
            prop_assert!((whole.value - left.value - right.value).abs() <= tol.max(1e-12));
        }
    }
}
