//! Integral conditions on a majorant `Q` of the inner dilatation: ball means,
//! spherical means, the limsup condition, reflection and annulus bounds, and
//! Hölder exponents (closed form and sampled).

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    ball_volume, random_unit_vector, rng_from_seed, uniform_in_unit_ball, BallRegion, ConstantsN,
    Point,
};
use crate::maps::Mapping;
use crate::profiles::StepProfile;
use crate::quadrature::{
    integrate_1d_fallible, integrate_ball, integrate_sphere_surface, QuadratureConfig,
    ScalarField,
};

/// Largest value used for `q^{-1/(n-1)}` where the mean vanishes.
pub const INVERSE_CAP: f64 = 1e12;
/// Limsup values above this (with a rising trend) are read as divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 50.0;
/// Parameter to which the last-decade trend is extrapolated.
pub const EXTRAPOLATION_FLOOR: f64 = 1e-300;

/// Non-negative function `Q` on the closed unit ball.
#[derive(Clone)]
pub enum QField {
    Constant(f64),
    /// `Q(x) = β(|x|)`.
    Radial(StepProfile),
    Custom {
        label: String,
        f: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for QField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QField::Constant(c) => write!(f, "Constant({c})"),
            QField::Radial(p) => write!(f, "Radial({:?}, k_max = {})", p.scheme(), p.k_max()),
            QField::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

impl QField {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::input(format!("Q must be finite and non-negative, got {c}")));
        }
        Ok(QField::Constant(c))
    }

    pub fn radial(profile: StepProfile) -> Self {
        if profile.spikes().is_empty() {
            QField::Constant(1.0)
        } else {
            QField::Radial(profile)
        }
    }

    pub fn custom(
        label: impl Into<String>,
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        QField::Custom {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> String {
        match self {
            QField::Constant(c) => format!("Q = {c}"),
            QField::Radial(p) => format!("Q = beta(|x|), {:?}", p.scheme()),
            QField::Custom { label, .. } => label.clone(),
        }
    }

    /// `Q(x)` for `|x| <= 1`.
    pub fn base(&self, x: &Point) -> f64 {
        match self {
            QField::Constant(c) => *c,
            QField::Radial(p) => p.value_at(x.norm()),
            QField::Custom { f, .. } => f(x),
        }
    }

    /// `Q` extended by zero outside the closed unit ball.
    pub fn zero_extended(&self, x: &Point) -> f64 {
        if x.norm() <= 1.0 {
            self.base(x)
        } else {
            0.0
        }
    }

    /// `Q*(x)`: `Q(x)` inside the ball, `Q(x/|x|²)` outside.
    pub fn reflected(&self, x: &Point) -> f64 {
        let r2 = x.norm_sq();
        if r2 <= 1.0 {
            self.base(x)
        } else {
            self.base(&x.scale(1.0 / r2))
        }
    }

    pub fn zero_extended_view(&self) -> ZeroExtended<'_> {
        ZeroExtended(self)
    }

    pub fn reflected_view(&self) -> Reflected<'_> {
        Reflected(self)
    }

    fn is_radial(&self) -> bool {
        !matches!(self, QField::Custom { .. })
    }

    fn profile_jumps(&self) -> Vec<f64> {
        match self {
            QField::Radial(p) => p.breakpoints(0.0, 1.0),
            _ => Vec::new(),
        }
    }
}

/// [`QField::zero_extended`] as a [`ScalarField`].
#[derive(Debug, Clone, Copy)]
pub struct ZeroExtended<'a>(&'a QField);

impl ScalarField for ZeroExtended<'_> {
    fn eval(&self, x: &Point) -> f64 {
        self.0.zero_extended(x)
    }
    fn is_radial(&self) -> bool {
        self.0.is_radial()
    }
    fn jump_radii(&self) -> Vec<f64> {
        let mut j = self.0.profile_jumps();
        j.push(1.0);
        j
    }
}

/// [`QField::reflected`] as a [`ScalarField`].
#[derive(Debug, Clone, Copy)]
pub struct Reflected<'a>(&'a QField);

impl ScalarField for Reflected<'_> {
    fn eval(&self, x: &Point) -> f64 {
        self.0.reflected(x)
    }
    fn is_radial(&self) -> bool {
        self.0.is_radial()
    }
    fn jump_radii(&self) -> Vec<f64> {
        let j = self.0.profile_jumps();
        let mut out: Vec<f64> = j.iter().map(|r| 1.0 / r).collect();
        out.extend(j);
        out.push(1.0);
        out
    }
}

/// Log-spaced grid of scales `min = x_0 < ... < x_m = max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsGrid {
    pub min: f64,
    pub max: f64,
    pub per_decade: usize,
}

impl EpsGrid {
    pub const DEFAULT_FLOOR: f64 = 1e-5;
    pub const DEFAULT_PER_DECADE: usize = 40;

    /// Default sweep `[1e-5, max]`, 40 points per decade.
    pub fn below(max: f64) -> Self {
        EpsGrid {
            min: Self::DEFAULT_FLOOR,
            max,
            per_decade: Self::DEFAULT_PER_DECADE,
        }
    }

    /// Ascending grid points, both ends included.
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.min < self.max && self.max.is_finite()) {
            return Err(Error::domain(format!(
                "grid needs 0 < min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.per_decade == 0 {
            return Err(Error::domain("grid needs at least one point per decade"));
        }
        let decades = (self.max / self.min).log10();
        let m = ((decades * self.per_decade as f64).ceil() as usize).max(1);
        let (l0, l1) = (self.min.ln(), self.max.ln());
        Ok((0..=m)
            .map(|i| match i {
                0 => self.min,
                i if i == m => self.max,
                i => (l0 + (l1 - l0) * i as f64 / m as f64).exp(),
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub value: f64,
}

fn require_dim(x: &Point) -> Result<usize> {
    let n = x.dim();
    if n < 2 {
        return Err(Error::domain("need dimension at least 2"));
    }
    Ok(n)
}

/// `(1/(Ω_n ε^n)) ∫_{B^n ∩ B(ζ, ε)} Q dm`.
pub fn ball_mean(q: &QField, zeta: &Point, eps: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let n = require_dim(zeta)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain(format!("ball radius must be positive, got {eps}")));
    }
    let region = BallRegion::intersect_unit_ball(*zeta, eps)?;
    let r = integrate_ball(&q.zero_extended_view(), &region, cfg)?;
    Ok(r.value / (ball_volume(n) * eps.powi(n as i32)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupMean {
    pub sup: f64,
    pub argmax: f64,
    pub table: Vec<SweepRow>,
}

/// Maximum of [`ball_mean`] over the grid.
pub fn sup_ball_mean(
    q: &QField,
    zeta: &Point,
    grid: &EpsGrid,
    cfg: &QuadratureConfig,
) -> Result<SupMean> {
    if !(grid.max > 0.0 && grid.max < 1.0) {
        return Err(Error::domain(format!("eps0 must lie in (0, 1), got {}", grid.max)));
    }
    let mut table = Vec::new();
    let (mut sup, mut argmax) = (f64::NEG_INFINITY, f64::NAN);
    for eps in grid.points()? {
        let value = ball_mean(q, zeta, eps, cfg)?;
        if value > sup {
            sup = value;
            argmax = eps;
        }
        table.push(SweepRow { eps, value });
    }
    Ok(SupMean { sup, argmax, table })
}

/// Mean of `Q` (or `Q*` when `reflected`) over the sphere `|x - x0| = r`.
pub fn spherical_mean(
    q: &QField,
    x0: &Point,
    r: f64,
    reflected: bool,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let n = require_dim(x0)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("sphere radius must be positive, got {r}")));
    }
    let c = x0.norm();
    match q {
        QField::Constant(v) if reflected || c + r <= 1.0 => return Ok(*v),
        QField::Radial(p) if c == 0.0 => {
            return Ok(if r <= 1.0 {
                p.value_at(r)
            } else if reflected {
                p.value_at(1.0 / r)
            } else {
                0.0
            });
        }
        _ => {}
    }
    sphere_mean_numeric(q, x0, r, reflected, n, cfg)
}

fn sphere_mean_numeric(
    q: &QField,
    x0: &Point,
    r: f64,
    reflected: bool,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let total = if reflected {
        integrate_sphere_surface(&q.reflected_view(), x0, r, cfg)?
    } else {
        integrate_sphere_surface(&q.zero_extended_view(), x0, r, cfg)?
    };
    Ok(total.value / (ConstantsN::new(n).omega * r.powi(n as i32 - 1)))
}

fn inverse_root(v: f64, p: f64) -> f64 {
    if v <= 0.0 {
        INVERSE_CAP
    } else {
        v.powf(-p).min(INVERSE_CAP)
    }
}

/// `∫_a^b q*_{x0}(r)^{-1/(n-1)} dr / r` for `0 < a < b`.
pub fn inverse_mean_log_integral(
    q: &QField,
    x0: &Point,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let n = require_dim(x0)?;
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::domain(format!("need 0 < a < b, got [{a}, {b}]")));
    }
    let p = 1.0 / (n as f64 - 1.0);
    let len = (b / a).ln();
    match q {
        QField::Constant(v) => return Ok(inverse_root(*v, p) * len),
        QField::Radial(prof) if x0.norm() == 0.0 && b <= 1.0 => {
            // q*_0 = β, so only the spikes differ from the flat value 1
            let mut parts: Vec<f64> = Vec::new();
            for s in prof.spikes() {
                if s.hi <= a || s.lo >= b {
                    continue;
                }
                let piece = if s.lo >= a && s.hi <= b {
                    -(-s.width / s.hi).ln_1p()
                } else {
                    (s.hi.min(b) / s.lo.max(a)).ln()
                };
                parts.push((inverse_root(s.value, p) - 1.0) * piece);
            }
            parts.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
            return Ok(len + parts.iter().sum::<f64>());
        }
        _ => {}
    }
    let r = integrate_1d_fallible(
        |s| Ok(inverse_root(spherical_mean(q, x0, s.exp(), true, cfg)?, p)),
        a.ln(),
        b.ln(),
        &[],
        cfg,
    )?;
    Ok(r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimsupVerdict {
    Bounded,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimsupReport {
    /// Largest value of the inner integral over the grid.
    pub bound_estimate: f64,
    pub verdict: LimsupVerdict,
    /// Increase of the inner integral per decade of `t` over the last decade.
    pub last_decade_slope: f64,
    /// Value extrapolated linearly in `log t` down to [`EXTRAPOLATION_FLOOR`].
    pub extrapolated: f64,
    /// `(t, ∫_t^{ε0} (α - q*^{-1/(n-1)}) dr/r)`, with `t` descending.
    pub table: Vec<SweepRow>,
}

/// Evaluates `∫_t^{ε0} (α - q*_{x0}(r)^{-1/(n-1)}) dr / r` as `t` runs down
/// the grid `[t_floor, ε0]` and decides whether it stays bounded.
pub fn limsup_condition(
    q: &QField,
    x0: &Point,
    alpha: f64,
    grid: &EpsGrid,
    cfg: &QuadratureConfig,
) -> Result<LimsupReport> {
    let eps0 = grid.max;
    if !(eps0 > 0.0 && eps0 < 0.5) {
        return Err(Error::domain(format!("eps0 must lie in (0, 1/2), got {eps0}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let mut pts = grid.points()?;
    pts.reverse();
    let mut value = 0.0;
    let mut table = vec![SweepRow { eps: eps0, value }];
    for w in pts.windows(2) {
        let (hi, lo) = (w[0], w[1]);
        value += alpha * (hi / lo).ln() - inverse_mean_log_integral(q, x0, lo, hi, cfg)?;
        table.push(SweepRow { eps: lo, value });
    }
    let bound_estimate = table.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);

    let last = *table.last().unwrap();
    let anchor = table
        .iter()
        .rev()
        .find(|r| r.eps >= 10.0 * last.eps * (1.0 - 1e-12))
        .copied()
        .unwrap_or(table[0]);
    let decades = (anchor.eps / last.eps).log10();
    let last_decade_slope = if decades > 0.0 {
        (last.value - anchor.value) / decades
    } else {
        0.0
    };
    let extrapolated =
        last.value + last_decade_slope.max(0.0) * (last.eps / EXTRAPOLATION_FLOOR).log10();
    let verdict = if last_decade_slope > 1e-9 && extrapolated > DIVERGENCE_THRESHOLD {
        LimsupVerdict::Unbounded
    } else {
        LimsupVerdict::Bounded
    };
    Ok(LimsupReport {
        bound_estimate,
        verdict,
        last_decade_slope,
        extrapolated,
        table,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionBound {
    /// `∫_{B(ζ0, r)} Q* dm`.
    pub lhs: f64,
    /// `(4^n + 1) ∫_{B(ζ0, r) ∩ B^n} Q dm`.
    pub rhs: f64,
    pub factor: f64,
    pub pass: bool,
}

/// Compares the integral of `Q*` over a boundary ball with `(4^n+1)` times
/// the integral of `Q` over its inner part.
pub fn reflection_factor_bound(
    q: &QField,
    zeta0: &Point,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<ReflectionBound> {
    let n = require_dim(zeta0)?;
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::domain(format!("radius must lie in (0, 1/2), got {r}")));
    }
    let view = q.reflected_view();
    let inner = integrate_ball(&view, &BallRegion::cap_minus(*zeta0, r)?, cfg)?.value;
    let outer = integrate_ball(&view, &BallRegion::cap_plus(*zeta0, r)?, cfg)?.value;
    let factor = 4f64.powi(n as i32) + 1.0;
    let lhs = inner + outer;
    let rhs = factor * inner;
    Ok(ReflectionBound {
        lhs,
        rhs,
        factor,
        pass: lhs <= rhs * (1.0 + 1e-6),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusBound {
    /// `∫_{ε < |x-x0| < ε0} Q*(x) / |x - x0|^n dm`.
    pub integral: f64,
    /// `integral / log(1/ε)`.
    pub ratio: f64,
}

pub fn annulus_log_bound(
    q: &QField,
    x0: &Point,
    eps: f64,
    eps0: f64,
    cfg: &QuadratureConfig,
) -> Result<AnnulusBound> {
    let n = require_dim(x0)?;
    if !(eps > 0.0 && eps < eps0 && eps0 < 1.0) {
        return Err(Error::domain(format!(
            "need 0 < eps < eps0 < 1, got eps = {eps}, eps0 = {eps0}"
        )));
    }
    // polar coordinates about x0: dm = dH ds, and the sphere of radius s
    // carries ω s^{n-1} q*(s)
    let mean_log = integrate_1d_fallible(
        |u| spherical_mean(q, x0, u.exp(), true, cfg),
        eps.ln(),
        eps0.ln(),
        &[],
        cfg,
    )?;
    let integral = ConstantsN::new(n).omega * mean_log.value;
    Ok(AnnulusBound {
        integral,
        ratio: integral / (1.0 / eps).ln(),
    })
}

/// `α = (ω_{n-1} log 2 / (Ω_n (4^n + 1) 2^{n+1} C))^{1/(n-1)}`.
pub fn holder_exponent_theorem1(c: f64, n: usize) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("mean bound must be positive, got {c}")));
    }
    if n < 3 {
        return Err(Error::domain(format!("needs n >= 3, got {n}")));
    }
    let k = ConstantsN::new(n);
    let denom = k.big_omega * (4f64.powi(n as i32) + 1.0) * 2f64.powi(n as i32 + 1) * c;
    Ok((k.omega * std::f64::consts::LN_2 / denom).powf(1.0 / (n as f64 - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderCertificate {
    pub alpha: f64,
    pub constant: f64,
    pub eps0: f64,
    pub delta0: f64,
    pub center: Point,
}

impl HolderCertificate {
    /// Exponent from [`holder_exponent_theorem1`] with `δ0 = min(1/2, ε0²)`.
    /// The constant is supplied by the caller (typically an
    /// [`empirical_holder`] estimate).
    pub fn theorem1(
        mean_bound_c: f64,
        n: usize,
        eps0: f64,
        center: Point,
        constant: f64,
    ) -> Result<Self> {
        if !(eps0 > 0.0 && eps0 < 1.0) {
            return Err(Error::domain(format!("eps0 must lie in (0, 1), got {eps0}")));
        }
        Ok(HolderCertificate {
            alpha: holder_exponent_theorem1(mean_bound_c, n)?,
            constant,
            eps0,
            delta0: (eps0 * eps0).min(0.5),
            center,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolderMode {
    /// Pairs `(x, center)`.
    #[default]
    Pointwise,
    /// Pairs `(x, y)` with both points in the ball.
    AllPairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    /// `max |f(x) - f(y)| / |x - y|^α` over the sample.
    pub constant_estimate: f64,
    /// Least-squares slope of `log |f(x) - f(y)|` against `log |x - y|`.
    pub fitted_exponent: f64,
    pub used: usize,
    pub skipped: usize,
}

/// Samples separations log-uniformly in `[1e-6 · radius, radius]`; points
/// where `f` fails to evaluate are skipped.
pub fn empirical_holder<M: Mapping + ?Sized>(
    f: &M,
    center: &Point,
    alpha: f64,
    radius: f64,
    pairs: usize,
    seed: u64,
    mode: HolderMode,
) -> Result<HolderEstimate> {
    if pairs < 100 {
        return Err(Error::domain(format!("need at least 100 pairs, got {pairs}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!("radius must be positive, got {radius}")));
    }
    let n = center.dim();
    let f_center = f.eval(center)?;
    let mut rng = rng_from_seed(seed);
    let mut constant: f64 = 0.0;
    let mut logs: Vec<(f64, f64)> = Vec::with_capacity(pairs);
    let mut skipped = 0;
    for _ in 0..pairs {
        let dir = random_unit_vector(n, &mut rng);
        let rho = radius * 10f64.powf(-6.0 * rng.gen::<f64>());
        let (y, fy) = match mode {
            HolderMode::Pointwise => (*center, Ok(f_center)),
            HolderMode::AllPairs => {
                let y = *center + uniform_in_unit_ball(n, &mut rng).scale(radius);
                (y, f.eval(&y))
            }
        };
        let x = y + dir.scale(rho);
        if x.dist(center) > radius {
            skipped += 1;
            continue;
        }
        let (Ok(fx), Ok(fy)) = (f.eval(&x), fy) else {
            skipped += 1;
            continue;
        };
        let d = x.dist(&y);
        let df = fx.dist(&fy);
        if !(d > 0.0) || !df.is_finite() {
            skipped += 1;
            continue;
        }
        constant = constant.max(df / d.powf(alpha));
        if df > 0.0 {
            logs.push((d.ln(), df.ln()));
        }
    }
    if logs.len() < 2 {
        return Err(Error::Degenerate("too few usable pairs for a fit".into()));
    }
    Ok(HolderEstimate {
        constant_estimate: constant,
        fitted_exponent: least_squares_slope(&logs),
        used: pairs - skipped,
        skipped,
    })
}

pub(crate) fn least_squares_slope(xy: &[(f64, f64)]) -> f64 {
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
