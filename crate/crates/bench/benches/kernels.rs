use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qclab::beltrami::{complex_dilatation, LogStretch};
use qclab::conditions::{limsup_condition, sup_ball_mean, EpsGrid, QField};
use qclab::harmonic::{i_alpha, poisson_extend, poisson_gradient, BoundaryData};
use qclab::maps::RadialStretchMap;
use qclab::quadrature::{integrate_1d, integrate_sphere, QuadratureConfig};
use qclab::{Complex, DifferentiableMap, Point, StepProfile};

fn quadrature(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    c.bench_function("integrate_1d_sqrt_singularity", |b| {
        b.iter(|| integrate_1d(|t: f64| t.powf(-0.5), 0.0, 1.0, &cfg).unwrap())
    });
    let field = |t: &Point| (t[0] + 0.5 * t[1]).exp() + t[2] * t[2];
    c.bench_function("integrate_sphere_non_zonal", |b| {
        b.iter(|| integrate_sphere(&field, 3, &cfg).unwrap())
    });
}

fn conditions(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let q = QField::radial(StepProfile::example1());
    let grid = EpsGrid {
        min: 0.02,
        max: 0.3,
        per_decade: 10,
    };
    c.bench_function("sup_ball_mean_example1", |b| {
        b.iter(|| sup_ball_mean(&q, &Point::north(3), &grid, &cfg).unwrap())
    });
    let q4 = QField::radial(StepProfile::example4());
    c.bench_function("limsup_example4", |b| {
        b.iter(|| limsup_condition(&q4, &Point::zero(3), 1.0, &EpsGrid::below(0.25), &cfg).unwrap())
    });
}

fn distortion(c: &mut Criterion) {
    let f = DifferentiableMap::new(RadialStretchMap::new(StepProfile::example1(), 3).unwrap());
    let g = f.clone().numeric();
    let x = Point::xyz(0.2, 0.3, 0.4);
    c.bench_function("jacobian_analytic", |b| b.iter(|| f.jacobian(black_box(&x)).unwrap()));
    c.bench_function("jacobian_numeric", |b| b.iter(|| g.jacobian(black_box(&x)).unwrap()));
    let ex1 = LogStretch::default();
    c.bench_function("complex_dilatation", |b| {
        b.iter(|| complex_dilatation(&ex1, black_box(Complex::new(0.05, 0.03)), None).unwrap())
    });
}

fn harmonic(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let one = BoundaryData::new("1", 3, |_| 1.0).unwrap();
    let x = Point::xyz(0.3, -0.2, 0.5);
    c.bench_function("poisson_extend_general", |b| {
        b.iter(|| poisson_extend(&one, black_box(&x), &cfg).unwrap())
    });
    let chord = BoundaryData::chord_power(Point::north(3), 0.5).unwrap();
    let near = Point::north(3).scale(0.99);
    c.bench_function("poisson_gradient_zonal_near_boundary", |b| {
        b.iter(|| poisson_gradient(&chord, black_box(&near), &cfg).unwrap())
    });
    c.bench_function("i_alpha_r0999", |b| b.iter(|| i_alpha(0.999, 0.5, 3, &cfg).unwrap()));
}

criterion_group!(benches, quadrature, conditions, distortion, harmonic);
criterion_main!(benches);
