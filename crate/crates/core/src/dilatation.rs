//! Inner and outer dilatation of a derivative matrix.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{inversion, random_unit_vector, rng_from_seed, Point};
use crate::linalg::Mat;
use crate::maps::{inversion_extension, DifferentiableMap, Mapping};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Preserving,
    Reversing,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionSample {
    pub point: Point,
    pub jacobian_det: f64,
    /// Smallest singular value `l(f'(x))`.
    pub smallest_distortion: f64,
    pub op_norm: f64,
    pub k_i: f64,
    pub k_o: f64,
    pub orientation: Orientation,
}

/// Distortion data of `m` at `x`.
///
/// `K_I = |J|/l^n` and `K_O = ‖M‖^n/|J|` are formed as products of singular
/// value ratios. The zero matrix has `K_I = K_O = 1`; any other singular
/// matrix has `K_I = K_O = ∞`.
pub fn distortion_from_jacobian(m: &Mat, x: &Point) -> Result<DistortionSample> {
    if !m.is_finite() {
        return Err(Error::input("Jacobian has non-finite entries"));
    }
    let n = m.dim();
    let sv = m.singular_values();
    let (op_norm, l) = (sv[0], sv[n - 1]);
    let det = m.det();
    let (k_i, k_o) = if m.is_zero() {
        (1.0, 1.0)
    } else if l == 0.0 || det == 0.0 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        let k_i: f64 = sv[..n - 1].iter().map(|s| s / l).product();
        let k_o: f64 = sv[1..].iter().map(|s| op_norm / s).product();
        (k_i, k_o)
    };
    let orientation = if det > 0.0 {
        Orientation::Preserving
    } else if det < 0.0 {
        Orientation::Reversing
    } else {
        Orientation::Degenerate
    };
    Ok(DistortionSample {
        point: *x,
        jacobian_det: det,
        smallest_distortion: l,
        op_norm,
        k_i,
        k_o,
        orientation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldEntry {
    Valid(DistortionSample),
    Invalid { point: Point, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionField {
    pub entries: Vec<FieldEntry>,
    pub valid: usize,
    pub invalid: usize,
    /// Samples with `K_I = ∞`, excluded from `max_k_i`.
    pub infinite: usize,
    /// Samples with negative Jacobian.
    pub reversing: usize,
    pub max_k_i: f64,
}

impl DistortionField {
    pub fn samples(&self) -> impl Iterator<Item = &DistortionSample> {
        self.entries.iter().filter_map(|e| match e {
            FieldEntry::Valid(s) => Some(s),
            FieldEntry::Invalid { .. } => None,
        })
    }
}

/// Per-point distortion; Jacobian failures mark the sample invalid.
pub fn k_i_field(f: &DifferentiableMap, points: &[Point]) -> DistortionField {
    let entries: Vec<FieldEntry> = points
        .iter()
        .map(|x| match f.jacobian(x).and_then(|m| distortion_from_jacobian(&m, x)) {
            Ok(s) => FieldEntry::Valid(s),
            Err(e) => FieldEntry::Invalid {
                point: *x,
                reason: e.to_string(),
            },
        })
        .collect();
    let mut field = DistortionField {
        valid: 0,
        invalid: 0,
        infinite: 0,
        reversing: 0,
        max_k_i: 1.0,
        entries: Vec::new(),
    };
    for e in &entries {
        match e {
            FieldEntry::Valid(s) => {
                field.valid += 1;
                if s.k_i.is_infinite() {
                    field.infinite += 1;
                } else {
                    field.max_k_i = field.max_k_i.max(s.k_i);
                }
                if s.orientation == Orientation::Reversing {
                    field.reversing += 1;
                }
            }
            FieldEntry::Invalid { .. } => field.invalid += 1,
        }
    }
    field.entries = entries;
    field
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub max_rel_deviation: f64,
    pub used: usize,
    pub skipped: usize,
}

/// `max |K_I(x, F) - K_I(ψ(x), f)| / K_I(ψ(x), f)` over random `1 < |x| < 2`,
/// where `F` is the inversion extension of `f`. Both sides use the Jacobian
/// strategy of `f`, so with a finite-difference `f` the chain rule is never
/// invoked.
pub fn conformal_invariance_check(
    f: &DifferentiableMap,
    samples: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    let big = inversion_extension(f);
    let big = match f.strategy() {
        crate::maps::JacobianStrategy::Analytic => big,
        _ => big.numeric(),
    };
    let mut rng = rng_from_seed(seed);
    let n = f.dim();
    let (mut worst, mut used, mut skipped) = (0.0f64, 0, 0);
    let mut attempts = 0;
    while used < samples {
        attempts += 1;
        if attempts > 20 * samples.max(1) {
            break;
        }
        let r: f64 = rng.gen_range(1.0..2.0);
        if r == 1.0 {
            continue;
        }
        let x = random_unit_vector(n, &mut rng).scale(r);
        let y = inversion(&x)?;
        let outer = big.jacobian(&x).and_then(|m| distortion_from_jacobian(&m, &x));
        let inner = f.jacobian(&y).and_then(|m| distortion_from_jacobian(&m, &y));
        match (outer, inner) {
            (Ok(a), Ok(b)) if a.k_i.is_finite() && b.k_i.is_finite() => {
                worst = worst.max((a.k_i - b.k_i).abs() / b.k_i);
                used += 1;
            }
            _ => skipped += 1,
        }
    }
    Ok(InvarianceReport {
        max_rel_deviation: worst,
        used,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{power_map, Identity, RadialStretchMap};
    use crate::profiles::StepProfile;
    use proptest::prelude::*;

    #[test]
    fn diagonal_example() {
        let s = distortion_from_jacobian(&Mat::diag(&[2.0, 1.0, 1.0]), &Point::zero(3)).unwrap();
        assert_eq!(
            (s.jacobian_det, s.smallest_distortion, s.op_norm, s.k_i, s.k_o),
            (2.0, 1.0, 2.0, 2.0, 4.0)
        );
        assert_eq!(s.orientation, Orientation::Preserving);
    }

    #[test]
    fn conformal_and_degenerate_cases() {
        let s = distortion_from_jacobian(&Mat::scalar(3, 0.7), &Point::zero(3)).unwrap();
        assert!((s.k_i - 1.0).abs() < 1e-15 && (s.k_o - 1.0).abs() < 1e-15);
        let s = distortion_from_jacobian(&Mat::zeros(3), &Point::zero(3)).unwrap();
        assert_eq!((s.k_i, s.k_o), (1.0, 1.0));
        let s = distortion_from_jacobian(&Mat::diag(&[1.0, 0.0, 2.0]), &Point::zero(3)).unwrap();
        assert!(s.k_i.is_infinite() && s.k_o.is_infinite());
        let s = distortion_from_jacobian(&Mat::diag(&[1.0, -1.0]), &Point::zero(2)).unwrap();
        assert_eq!(s.orientation, Orientation::Reversing);
        let mut bad = Mat::identity(2);
        bad[(0, 1)] = f64::NAN;
        assert!(distortion_from_jacobian(&bad, &Point::zero(2)).is_err());
    }

    #[test]
    fn fields() {
        let id = DifferentiableMap::new(Identity { dim: 3 });
        let pts: Vec<Point> = (1..20).map(|i| Point::xyz(0.01 * i as f64, 0.1, -0.2)).collect();
        let f = k_i_field(&id, &pts);
        assert_eq!(f.valid, pts.len());
        assert!(f.samples().all(|s| s.k_i == 1.0));

        let ex1 = DifferentiableMap::new(
            RadialStretchMap::new(StepProfile::example1(), 3).unwrap(),
        )
        .numeric();
        let profile = StepProfile::example1();
        let pts: Vec<Point> = (1..200)
            .map(|i| Point::xyz(0.0, 0.6, 0.8).scale(i as f64 / 200.0))
            .collect();
        let f = k_i_field(&ex1, &pts);
        for s in f.samples() {
            let b = profile.eval(s.point.norm()).unwrap();
            assert!((s.k_i - b).abs() < 1e-4 * b);
        }

        let p3 = power_map(3.0).unwrap().numeric();
        let pts: Vec<Point> = (1..=50).map(|i| Point::xy(0.02 * i as f64, 0.1)).collect();
        let f = k_i_field(&p3, &pts);
        assert_eq!(f.valid, 50);
        assert!(f.samples().all(|s| (s.k_i - 3.0).abs() < 1e-4));

        let origin = k_i_field(&power_map(3.0).unwrap(), &[Point::zero(2)]);
        assert_eq!(origin.invalid, 1);
    }

    #[test]
    fn invariance() {
        let id = DifferentiableMap::new(Identity { dim: 3 });
        let r = conformal_invariance_check(&id, 50, 1).unwrap();
        assert!(r.max_rel_deviation < 1e-12);
        let ex1 = DifferentiableMap::new(
            RadialStretchMap::new(StepProfile::example1(), 3).unwrap(),
        )
        .numeric();
        let r = conformal_invariance_check(&ex1, 100, 2).unwrap();
        assert_eq!(r.used, 100);
        assert!(r.max_rel_deviation < 1e-3, "{r:?}");
        let p2 = power_map(2.0).unwrap().numeric();
        let r = conformal_invariance_check(&p2, 100, 3).unwrap();
        assert!(r.max_rel_deviation < 1e-3, "{r:?}");
    }

    fn mat3() -> impl Strategy<Value = Mat> {
        proptest::collection::vec(-2.0f64..2.0, 9)
            .prop_map(|v| Mat::from_rows(&[v[0..3].to_vec(), v[3..6].to_vec(), v[6..9].to_vec()]))
    }

    proptest! {
        #[test]
        fn k_i_at_least_one(m in mat3()) {
            let s = distortion_from_jacobian(&m, &Point::zero(3)).unwrap();
            prop_assert!(s.k_i >= 1.0 && s.k_o >= 1.0);
            prop_assert!(s.smallest_distortion <= s.op_norm);
            let j = s.jacobian_det.abs();
            prop_assert!(j <= s.op_norm.powi(3) * (1.0 + 1e-12));
            prop_assert!(s.smallest_distortion.powi(3) <= j * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn scaling_invariance(m in mat3(), c in 0.01f64..100.0) {
            let a = distortion_from_jacobian(&m, &Point::zero(3)).unwrap();
            let b = distortion_from_jacobian(&m.scale(c), &Point::zero(3)).unwrap();
            if a.k_i.is_finite() && a.k_i < 1e6 {
                prop_assert!((a.k_i - b.k_i).abs() <= 1e-9 * a.k_i);
                prop_assert!((a.k_o - b.k_o).abs() <= 1e-9 * a.k_o);
            }
        }

        #[test]
        fn planar_inner_equals_outer(v in proptest::collection::vec(-2.0f64..2.0, 4)) {
            let m = Mat::from_rows(&[v[0..2].to_vec(), v[2..4].to_vec()]);
            let s = distortion_from_jacobian(&m, &Point::zero(2)).unwrap();
            prop_assert_eq!(s.k_i.to_bits(), s.k_o.to_bits());
        }

        #[test]
        fn det_matches_singular_values(m in mat3()) {
            let s = distortion_from_jacobian(&m, &Point::zero(3)).unwrap();
            let prod: f64 = m.singular_values().iter().product();
            prop_assert!((prod - s.jacobian_det.abs()).abs() <= 1e-10 * prod.max(1e-12));
        }
    }
}
