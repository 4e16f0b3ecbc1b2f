//! Points, balls and the inversion in the unit sphere.
//!
//! Everything here works in dimension 2 through [`MAX_DIM`]; the sampling
//! routines take a caller-owned generator so results are reproducible from a
//! seed.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;

/// Tolerance used to decide that a point lies on the unit sphere.
pub const SPHERE_TOL: f64 = 1e-12;

/// Deterministic generator used by every sampling routine in the crate.
pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point (or vector) of `R^n`, `2 <= n <= MAX_DIM`, stored inline.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    dim: usize,
    c: [f64; MAX_DIM],
}

impl Point {
    /// Panics if `coords.len()` is not in `2..=MAX_DIM`.
    pub fn new(coords: &[f64]) -> Self {
        assert!(
            (2..=MAX_DIM).contains(&coords.len()),
            "point dimension {} not supported",
            coords.len()
        );
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Point {
            dim: coords.len(),
            c,
        }
    }

    /// Like [`Point::new`] but rejects unsupported dimensions and non-finite
    /// components.
    pub fn try_new(coords: &[f64]) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&coords.len()) {
            return Err(Error::domain(format!(
                "dimension {} outside 2..={MAX_DIM}",
                coords.len()
            )));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("point has a non-finite component"));
        }
        Ok(Point::new(coords))
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point::new(&[x, y])
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point::new(&[x, y, z])
    }

    pub fn zero(dim: usize) -> Self {
        assert!((2..=MAX_DIM).contains(&dim));
        Point {
            dim,
            c: [0.0; MAX_DIM],
        }
    }

    /// The `i`-th standard basis vector (zero based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut p = Point::zero(dim);
        p.c[i] = 1.0;
        p
    }

    /// `e_n`, the "north pole" used as default axis.
    pub fn north(dim: usize) -> Self {
        Point::basis(dim, dim - 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        // hypot-style scaling is unnecessary at the magnitudes used here
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    pub fn scale(&self, s: f64) -> Point {
        let mut p = *self;
        for v in &mut p.c[..p.dim] {
            *v *= s;
        }
        p
    }

    /// Unit vector in the direction of `self`, or `None` for the origin.
    pub fn normalized(&self) -> Option<Point> {
        let r = self.norm();
        (r > 0.0).then(|| self.scale(1.0 / r))
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|v| v.is_finite())
    }

    pub fn on_unit_sphere(&self) -> bool {
        (self.norm() - 1.0).abs() < SPHERE_TOL
    }

    pub fn with_coord(&self, i: usize, v: f64) -> Point {
        let mut p = *self;
        p.c[i] = v;
        p
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(mut self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..self.dim {
            self.c[i] += rhs.c[i];
        }
        self
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(mut self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..self.dim {
            self.c[i] -= rhs.c[i];
        }
        self
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        self.scale(s)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Point::try_new(&v).map_err(serde::de::Error::custom)
    }
}

/// Surface area `ω_{n-1}` of `S^{n-1}` and volume `Ω_n` of `B^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsN {
    pub n: usize,
    pub omega: f64,
    pub big_omega: f64,
}

impl ConstantsN {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        let omega = sphere_area(n - 1);
        ConstantsN {
            n,
            omega,
            big_omega: omega / n as f64,
        }
    }
}

/// Area of the unit sphere `S^k ⊂ R^{k+1}` (`ω_0 = 2`, `ω_1 = 2π`).
pub fn sphere_area(k: usize) -> f64 {
    use std::f64::consts::PI;
    // ω_{k+1} = 2π ω_{k-1} / k
    let (mut lo, mut hi) = (2.0, 2.0 * PI);
    match k {
        0 => lo,
        1 => hi,
        _ => {
            let mut j = 1;
            while j < k {
                let next = 2.0 * PI * lo / j as f64;
                lo = hi;
                hi = next;
                j += 1;
            }
            hi
        }
    }
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume(n: usize) -> f64 {
    ConstantsN::new(n).big_omega
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// `B(center, r_outer)`.
    Ball,
    /// `{r_inner < |x - center| < r_outer}`.
    Annulus,
    /// `B(center, r_outer)` outside the closed unit ball; center on the sphere.
    BallCapPlus,
    /// `B(center, r_outer) ∩ B^n`; center on the sphere.
    BallCapMinus,
    /// `B(center, r_outer) ∩ B^n` for an arbitrary center.
    BallIntersectUnitBall,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallRegion {
    pub kind: RegionKind,
    pub center: Point,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl BallRegion {
    pub fn ball(center: Point, r: f64) -> Result<Self> {
        Self::build(RegionKind::Ball, center, 0.0, r)
    }

    pub fn annulus(center: Point, r_inner: f64, r_outer: f64) -> Result<Self> {
        Self::build(RegionKind::Annulus, center, r_inner, r_outer)
    }

    pub fn cap_plus(center: Point, eps: f64) -> Result<Self> {
        Self::build(RegionKind::BallCapPlus, center, 0.0, eps)
    }

    pub fn cap_minus(center: Point, eps: f64) -> Result<Self> {
        Self::build(RegionKind::BallCapMinus, center, 0.0, eps)
    }

    pub fn intersect_unit_ball(center: Point, r: f64) -> Result<Self> {
        Self::build(RegionKind::BallIntersectUnitBall, center, 0.0, r)
    }

    fn build(kind: RegionKind, center: Point, r_inner: f64, r_outer: f64) -> Result<Self> {
        if !center.is_finite() || !r_inner.is_finite() || !r_outer.is_finite() {
            return Err(Error::input("region parameters must be finite"));
        }
        if r_outer <= 0.0 || r_inner < 0.0 {
            return Err(Error::domain("region radii must satisfy r_inner >= 0, r_outer > 0"));
        }
        if kind == RegionKind::Annulus && r_inner >= r_outer {
            return Err(Error::domain("annulus needs r_inner < r_outer"));
        }
        if matches!(kind, RegionKind::BallCapPlus | RegionKind::BallCapMinus)
            && !center.on_unit_sphere()
        {
            return Err(Error::domain("cap regions need a center on the unit sphere"));
        }
        Ok(BallRegion {
            kind,
            center,
            r_inner,
            r_outer,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, x: &Point) -> bool {
        let s = x.dist(&self.center);
        match self.kind {
            RegionKind::Ball => s < self.r_outer,
            RegionKind::Annulus => s > self.r_inner && s < self.r_outer,
            RegionKind::BallCapPlus => s < self.r_outer && x.norm() > 1.0,
            RegionKind::BallCapMinus | RegionKind::BallIntersectUnitBall => {
                s < self.r_outer && x.norm() < 1.0
            }
        }
    }

    /// Uniform sample by rejection from the bounding ball `B(center, r_outer)`.
    /// Returns `None` if `max_tries` proposals were all rejected.
    pub fn sample(&self, rng: &mut SampleRng, max_tries: usize) -> Option<Point> {
        for _ in 0..max_tries {
            let x = self.center + uniform_in_unit_ball(self.dim(), rng).scale(self.r_outer);
            if self.contains(&x) {
                return Some(x);
            }
        }
        None
    }
}

/// Uniform point of the open unit ball via rejection from the cube.
pub fn uniform_in_unit_ball(dim: usize, rng: &mut SampleRng) -> Point {
    loop {
        let mut c = [0.0; MAX_DIM];
        for v in &mut c[..dim] {
            *v = rng.gen_range(-1.0..1.0);
        }
        let p = Point::new(&c[..dim]);
        let r2 = p.norm_sq();
        if r2 < 1.0 && r2 > 0.0 {
            return p;
        }
    }
}

pub fn random_unit_vector(dim: usize, rng: &mut SampleRng) -> Point {
    let p = uniform_in_unit_ball(dim, rng);
    p.scale(1.0 / p.norm())
}

/// `ψ(x) = x/|x|²`.
pub fn inversion(x: &Point) -> Result<Point> {
    let r2 = x.norm_sq();
    if r2 == 0.0 {
        return Err(Error::domain("inversion is undefined at the origin"));
    }
    Ok(x.scale(1.0 / r2))
}

/// Jacobian of the inversion at `x`: `(I - 2 x̂ x̂ᵀ)/|x|²`.
pub fn inversion_jacobian(x: &Point) -> Result<crate::linalg::Mat> {
    let r2 = x.norm_sq();
    if r2 == 0.0 {
        return Err(Error::domain("inversion is undefined at the origin"));
    }
    let n = x.dim();
    let mut m = crate::linalg::Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            m[(i, j)] = (delta - 2.0 * x[i] * x[j] / r2) / r2;
        }
    }
    Ok(m)
}

/// A point of the one-point compactification of `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtPoint {
    Finite(Point),
    Infinity,
}

impl From<Point> for ExtPoint {
    fn from(p: Point) -> Self {
        ExtPoint::Finite(p)
    }
}

pub fn chordal_distance(x: &ExtPoint, y: &ExtPoint) -> f64 {
    match (x, y) {
        (ExtPoint::Infinity, ExtPoint::Infinity) => 0.0,
        (ExtPoint::Finite(p), ExtPoint::Infinity) | (ExtPoint::Infinity, ExtPoint::Finite(p)) => {
            1.0 / (1.0 + p.norm_sq()).sqrt()
        }
        (ExtPoint::Finite(p), ExtPoint::Finite(q)) => {
            p.dist(q) / ((1.0 + p.norm_sq()).sqrt() * (1.0 + q.norm_sq()).sqrt())
        }
    }
}

/// Surface measure of the polar cap `{t ∈ S^{n-1} : ⟨t, e⟩ ≥ cos φ}`.
///
/// The cap is swept by `(n-2)`-spheres of radius `sin θ`, so the density in
/// the polar angle is `ω_{n-2} sin^{n-2} θ`.
pub fn cap_area(phi: f64, n: usize) -> Result<f64> {
    use std::f64::consts::PI;
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::domain(format!("cap angle {phi} outside [0, π]")));
    }
    if n < 2 {
        return Err(Error::domain("cap_area needs n >= 2"));
    }
    let w = sphere_area(n - 2);
    Ok(w * sin_power_integral(phi, n - 2))
}

/// `∫_0^φ sin^k θ dθ` via the reduction formula.
pub fn sin_power_integral(phi: f64, k: usize) -> f64 {
    match k {
        0 => phi,
        // 1 - cos φ written to avoid cancellation for small φ
        1 => 2.0 * (0.5 * phi).sin().powi(2),
        _ => {
            let kf = k as f64;
            -phi.sin().powi(k as i32 - 1) * phi.cos() / kf
                + (kf - 1.0) / kf * sin_power_integral(phi, k - 2)
        }
    }
}

/// `H²(B(ζ, ε) ∩ S²)` for `ζ ∈ S²`: a cap of chord radius `ε` has area `πε²`.
pub fn cap_ball_intersection_area(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::domain(format!("chord radius {eps} outside (0, 2)")));
    }
    Ok(std::f64::consts::PI * eps * eps)
}

/// Polar angle of the cap `B(ζ, ε) ∩ S^{n-1}`: `ε = 2 sin(γ/2)`.
pub fn chord_to_angle(eps: f64) -> f64 {
    2.0 * (0.5 * eps).min(1.0).asin()
}

/// Outcome of a sampled geometric inclusion test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledVerdict {
    pub passed: bool,
    pub samples: usize,
    /// First sample violating the property, if any.
    pub counterexample: Option<Vec<f64>>,
    /// Extreme value of the monitored quantity over the samples.
    pub extreme: f64,
}

/// Checks `ψ(B₊(ζ₀, ε)) ⊂ B₋(ζ₀, ε)` on random points of `B₊`.
///
/// `extreme` is the largest observed `|ψ(x) - ζ₀| / |x - ζ₀|`, which the
/// inclusion argument bounds by `1/|x| < 1`.
pub fn inclusion_plus_minus(
    zeta0: &Point,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<SampledVerdict> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain("inclusion test needs 0 < eps < 1"));
    }
    let plus = BallRegion::cap_plus(*zeta0, eps)?;
    let mut rng = rng_from_seed(seed);
    let mut verdict = SampledVerdict {
        passed: true,
        samples: 0,
        counterexample: None,
        extreme: 0.0,
    };
    for _ in 0..samples {
        let Some(x) = plus.sample(&mut rng, 10_000) else {
            break;
        };
        let y = inversion(&x)?;
        let t = x.dist(zeta0);
        let ratio = y.dist(zeta0) / t;
        verdict.extreme = verdict.extreme.max(ratio);
        verdict.samples += 1;
        let inside = y.dist(zeta0) < eps && y.norm() < 1.0;
        if !inside && verdict.passed {
            verdict.passed = false;
            verdict.counterexample = Some(x.coords().to_vec());
        }
    }
    Ok(verdict)
}

/// Checks `|y| ≥ 1/2` on random points of `B(ζ₀, r) ∩ B^n`, `0 < r < 1/2`.
/// `extreme` is the smallest observed `|y|`.
pub fn lower_norm_bound(zeta0: &Point, r: f64, samples: usize, seed: u64) -> Result<SampledVerdict> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::domain("lower norm bound needs 0 < r < 1/2"));
    }
    let region = BallRegion::cap_minus(*zeta0, r)?;
    let mut rng = rng_from_seed(seed);
    let mut verdict = SampledVerdict {
        passed: true,
        samples: 0,
        counterexample: None,
        extreme: f64::INFINITY,
    };
    for _ in 0..samples {
        let Some(y) = region.sample(&mut rng, 10_000) else {
            break;
        };
        let m = y.norm();
        verdict.extreme = verdict.extreme.min(m);
        verdict.samples += 1;
        if m < 0.5 && verdict.passed {
            verdict.passed = false;
            verdict.counterexample = Some(y.coords().to_vec());
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_constants() {
        let c2 = ConstantsN::new(2);
        let c3 = ConstantsN::new(3);
        assert!((c2.omega - 2.0 * PI).abs() < 1e-15);
        assert!((c2.big_omega - PI).abs() < 1e-15);
        assert!((c3.omega - 4.0 * PI).abs() < 1e-14);
        assert!((c3.big_omega - 4.0 * PI / 3.0).abs() < 1e-14);
        let c4 = ConstantsN::new(4);
        assert!((c4.omega - 2.0 * PI * PI).abs() < 1e-13);
        assert!((c4.big_omega - PI * PI / 2.0).abs() < 1e-13);
        for n in 2..=6 {
            let c = ConstantsN::new(n);
            assert!((c.omega - n as f64 * c.big_omega).abs() < 1e-13);
        }
    }

    #[test]
    fn inversion_examples() {
        let y = inversion(&Point::xyz(2.0, 0.0, 0.0)).unwrap();
        assert_eq!(y, Point::xyz(0.5, 0.0, 0.0));
        let e = Point::xyz(0.6, 0.0, 0.8);
        assert!(inversion(&e).unwrap().dist(&e) < 1e-15);
        let x = Point::xyz(0.3, -0.4, 0.5);
        let back = inversion(&inversion(&x).unwrap()).unwrap();
        assert!(back.dist(&x) < 1e-15);
        assert!(matches!(inversion(&Point::zero(3)), Err(Error::Domain(_))));
    }

    #[test]
    fn chordal_examples() {
        let o = ExtPoint::Finite(Point::zero(3));
        assert_eq!(chordal_distance(&o, &ExtPoint::Infinity), 1.0);
        let e1 = ExtPoint::Finite(Point::basis(3, 0));
        assert!((chordal_distance(&o, &e1) - 0.5f64.sqrt()).abs() < 1e-15);
        let a = ExtPoint::Finite(Point::xy(1.0, 0.0));
        let b = ExtPoint::Finite(Point::xy(0.0, 1.0));
        assert!((chordal_distance(&a, &b) - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn chordal_triangle_inequality_sampled() {
        let mut rng = rng_from_seed(7);
        for _ in 0..2000 {
            let pick = |rng: &mut SampleRng| {
                if rng.gen_bool(0.05) {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite(uniform_in_unit_ball(3, rng).scale(rng.gen_range(0.0..10.0)))
                }
            };
            let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let lhs = chordal_distance(&x, &z);
            let rhs = chordal_distance(&x, &y) + chordal_distance(&y, &z);
            assert!(lhs <= rhs + 1e-12);
            assert!((chordal_distance(&x, &y) - chordal_distance(&y, &x)).abs() < 1e-15);
        }
    }

    #[test]
    fn cap_areas() {
        assert!((cap_area(PI, 3).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!((cap_area(PI / 2.0, 3).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!((cap_area(PI, 2).unwrap() - 2.0 * PI).abs() < 1e-13);
        let phi = 0.7;
        assert!((cap_area(phi, 3).unwrap() - 2.0 * PI * (1.0 - phi.cos())).abs() < 1e-13);
        for n in 2..=4 {
            let c = ConstantsN::new(n);
            assert!((cap_area(PI, n).unwrap() - c.omega).abs() < 1e-12);
        }
        assert!(cap_area(-0.1, 3).is_err());
        assert!(cap_area(3.2, 3).is_err());
    }

    #[test]
    fn chord_cap_identity() {
        for eps in [0.1, 0.5, 1.0, 1.9] {
            let gamma = chord_to_angle(eps);
            let a = cap_area(gamma, 3).unwrap();
            assert!((a - cap_ball_intersection_area(eps).unwrap()).abs() < 1e-12 * a.max(1.0));
        }
        assert!((cap_ball_intersection_area(1.0).unwrap() - PI).abs() < 1e-15);
        assert!((cap_ball_intersection_area(0.1).unwrap() - 0.01 * PI).abs() < 1e-15);
        assert!(cap_ball_intersection_area(2.0).is_err());
    }

    #[test]
    fn inclusion_holds() {
        let v = inclusion_plus_minus(&Point::basis(3, 0), 0.3, 10_000, 1).unwrap();
        assert!(v.passed && v.samples == 10_000 && v.extreme < 1.0);
        let v = inclusion_plus_minus(&Point::basis(3, 2), 0.9, 10_000, 2).unwrap();
        assert!(v.passed && v.samples == 10_000);
    }

    #[test]
    fn inclusion_on_radial_ray() {
        let z = Point::basis(3, 0);
        let t = 0.2;
        let x = z.scale(1.0 + t);
        let d = inversion(&x).unwrap().dist(&z);
        assert!((d - t / (1.0 + t)).abs() < 1e-15);
        assert!(d < t);
    }

    #[test]
    fn lower_norm() {
        let z = Point::basis(3, 2);
        let v = lower_norm_bound(&z, 0.49, 10_000, 3).unwrap();
        assert!(v.passed && v.extreme >= 0.5);
        let v = lower_norm_bound(&z, 0.1, 10_000, 4).unwrap();
        assert!(v.passed && v.extreme >= 0.9);
        let v = lower_norm_bound(&z, 1e-9, 100, 5).unwrap();
        assert!(v.passed);
        assert!(lower_norm_bound(&z, 0.5, 10, 0).is_err());
    }

    #[test]
    fn region_validation() {
        assert!(BallRegion::cap_plus(Point::xyz(0.5, 0.0, 0.0), 0.1).is_err());
        assert!(BallRegion::annulus(Point::zero(3), 0.5, 0.5).is_err());
        assert!(BallRegion::ball(Point::zero(2), 0.0).is_err());
    }
}
