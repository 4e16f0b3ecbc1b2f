//! Minimal complex arithmetic on pairs of reals.
//!
//! Branches: `arg` lies in `(-π, π]`, and `ln`/`powf` use that principal branch.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

pub const I: Complex = Complex { re: 0.0, im: 1.0 };
pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

impl Complex {
    pub const fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    pub fn real(re: f64) -> Self {
        Complex { re, im: 0.0 }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Complex::new(r * theta.cos(), r * theta.sin())
    }

    pub fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }

    pub fn norm_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Principal argument in `(-π, π]`.
    pub fn arg(self) -> f64 {
        let a = self.im.atan2(self.re);
        if a == -PI {
            PI
        } else {
            a
        }
    }

    pub fn scale(self, s: f64) -> Self {
        Complex::new(self.re * s, self.im * s)
    }

    pub fn exp(self) -> Self {
        Complex::from_polar(self.re.exp(), self.im)
    }

    pub fn ln(self) -> Self {
        Complex::new(self.abs().ln(), self.arg())
    }

    /// Principal power `exp(p · ln z)`; `0^p = 0` for `p > 0`.
    pub fn powf(self, p: f64) -> Self {
        if self.re == 0.0 && self.im == 0.0 {
            return if p > 0.0 { ZERO } else { Complex::new(f64::NAN, f64::NAN) };
        }
        Complex::from_polar(self.abs().powf(p), p * self.arg())
    }

    pub fn recip(self) -> Self {
        let d = self.norm_sq();
        Complex::new(self.re / d, -self.im / d)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl Mul<f64> for Complex {
    type Output = Complex;
    fn mul(self, s: f64) -> Complex {
        self.scale(s)
    }
}

impl Div for Complex {
    type Output = Complex;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Complex) -> Complex {
        self * o.recip()
    }
}

impl Div<f64> for Complex {
    type Output = Complex;
    fn div(self, s: f64) -> Complex {
        Complex::new(self.re / s, self.im / s)
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

impl From<f64> for Complex {
    fn from(re: f64) -> Self {
        Complex::real(re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_branch() {
        assert_eq!(Complex::new(-1.0, 0.0).arg(), PI);
        assert_eq!(Complex::new(-1.0, -0.0).arg(), PI);
        let r = Complex::new(-4.0, 0.0).powf(0.5);
        assert!((r - Complex::new(0.0, 2.0)).abs() < 1e-15);
    }

    #[test]
    fn field_ops() {
        let a = Complex::new(1.5, -2.0);
        let b = Complex::new(-0.25, 0.75);
        assert!(((a * b) / b - a).abs() < 1e-15);
        assert!((a.ln().exp() - a).abs() < 1e-15);
        assert!((I * I + ONE).abs() == 0.0);
    }
}
