//! Registry of named verification checks and the suite configuration.
//!
//! Every check is deterministic given the configuration and seed. Quadrature
//! failures and degenerate samples turn a report inconclusive; configuration
//! errors are returned to the caller.

use std::f64::consts::PI;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::beltrami::{
    complex_dilatation, integral_growth_check, log_stretch_mu, FnPlanar, GrowthVerdict,
    HolderBeltrami, LogStretch, PlanarMap,
};
use crate::complex::{Complex, ZERO};
use crate::conditions::{
    empirical_holder, holder_exponent_theorem1, limsup_condition, reflection_factor_bound,
    sup_ball_mean, EpsGrid, HolderMode, LimsupVerdict, QField,
};
use crate::conditions::least_squares_slope;
use crate::dilatation::{conformal_invariance_check, k_i_field};
use crate::error::{Error, Result};
use crate::geometry::{
    chord_to_angle, inclusion_plus_minus, lower_norm_bound, random_unit_vector, rng_from_seed,
    uniform_in_unit_ball, Point,
};
use crate::harmonic::{
    i_alpha, log_growth_slope, poisson_extend, privalov_check, zonal_integral_breaks,
    BoundaryData,
};
use crate::maps::{default_step, power_map, DifferentiableMap, RadialStretchMap};
use crate::profiles::{calderon_check, CalderonVerdict, OrliczFunction, Scheme, StepProfile, Weight};
use crate::quadrature::{integrate_sphere, QuadratureConfig};
use crate::report::{
    CheckReport, Expected, Measured, Provenance, Relation, Status, Summary, Table, TOOL_VERSION,
};

/// Quadrature tolerances below this cannot be honoured by nested adaptive
/// rules in double precision; quadrature-limited checks then report
/// inconclusive instead of running.
pub const QUADRATURE_FLOOR: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Checks run by [`run_all`]; `None` runs the whole registry.
    pub checks: Option<Vec<String>>,
    /// Run the checks of a suite on separate threads.
    pub parallel: bool,
    pub quadrature: QuadratureConfig,
    pub profile: ProfileSettings,
    pub ball_mean: EpsGrid,
    pub limsup: LimsupSettings,
    pub samples: SampleSettings,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            checks: None,
            parallel: true,
            quadrature: QuadratureConfig::default(),
            profile: ProfileSettings::default(),
            ball_mean: EpsGrid {
                min: 0.02,
                max: 0.3,
                per_decade: 10,
            },
            limsup: LimsupSettings::default(),
            samples: SampleSettings::default(),
        }
    }
}

/// Truncation of the built-in step profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSettings {
    pub k_max: u32,
}

impl Default for ProfileSettings {
    fn default() -> Self {
        ProfileSettings {
            k_max: crate::profiles::DEFAULT_K_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimsupSettings {
    pub eps0: f64,
    pub per_decade: usize,
}

impl Default for LimsupSettings {
    fn default() -> Self {
        let g = EpsGrid::below(0.25);
        LimsupSettings {
            eps0: g.max,
            per_decade: g.per_decade,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleSettings {
    pub inclusion: usize,
    pub invariance: usize,
    pub radii: usize,
    pub holder_pairs: usize,
    pub beltrami: usize,
}

impl Default for SampleSettings {
    fn default() -> Self {
        SampleSettings {
            inclusion: 10_000,
            invariance: 100,
            radii: 200,
            holder_pairs: 400,
            beltrami: 1000,
        }
    }
}

impl SuiteConfig {
    fn example1(&self) -> Result<StepProfile> {
        StepProfile::with_k_max(Scheme::Example1, self.profile.k_max)
    }

    fn example4(&self) -> Result<StepProfile> {
        StepProfile::with_k_max(Scheme::Example4, self.profile.k_max)
    }

    fn tolerance(&self) -> f64 {
        self.quadrature.abs_tol.min(self.quadrature.rel_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckInfo {
    pub id: &'static str,
    pub title: &'static str,
    /// Accuracy depends on adaptive quadrature.
    pub quadrature_limited: bool,
}

/// Accumulates measurements and their expected bounds.
struct Ctx {
    measured: Vec<Measured>,
    expected: Vec<Expected>,
    diagnostics: Vec<String>,
    tables: Vec<Table>,
}

impl Ctx {
    fn new() -> Self {
        Ctx {
            measured: Vec::new(),
            expected: Vec::new(),
            diagnostics: Vec::new(),
            tables: Vec::new(),
        }
    }

    fn compare(
        &mut self,
        name: impl Into<String>,
        measured: f64,
        relation: Relation,
        expected: f64,
        tolerance: f64,
        provenance: Provenance,
    ) {
        let name = name.into();
        self.measured.push(Measured {
            name: name.clone(),
            value: measured,
        });
        self.expected.push(Expected {
            name,
            value: expected,
            provenance,
            relation,
            tolerance,
        });
    }

    /// A yes/no outcome, recorded as 1 or 0 against an expected 1.
    fn flag(&mut self, name: impl Into<String>, ok: bool, provenance: Provenance) {
        self.compare(
            name,
            if ok { 1.0 } else { 0.0 },
            Relation::Within,
            1.0,
            0.0,
            provenance,
        );
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.diagnostics.push(msg.into());
    }
}

type CheckFn = fn(&SuiteConfig, &mut Ctx) -> Result<()>;

struct Entry {
    info: CheckInfo,
    run: CheckFn,
}

const fn entry(id: &'static str, title: &'static str, quadrature_limited: bool, run: CheckFn) -> Entry {
    Entry {
        info: CheckInfo {
            id,
            title,
            quadrature_limited,
        },
        run,
    }
}

static REGISTRY: &[Entry] = &[
    entry("example1_integral_bound", "∫_a^1 β <= 2(1-a) for the Example-1 profile", false, example1_integral_bound),
    entry("example1_ball_mean", "Example-1 ball means stay below 3/2 (n = 3)", true, example1_ball_mean),
    entry("example2_planar_mean", "Example-1 profile ball means stay below 6/π (n = 2)", true, example2_planar_mean),
    entry("cap_identity", "H²(B(ζ, ε) ∩ S²) = π ε²", true, cap_identity),
    entry("beta_cube_integrability", "∫_{1/2}^1 β³ <= 3/2", false, beta_cube_integrability),
    entry("calderon_classification", "Calderon verdicts for power functions", true, calderon_classification),
    entry("holder_exponent_formula", "closed-form Hölder exponent at C = 3/2, n = 3", false, holder_exponent_formula),
    entry("ki_field_identity", "K_I of the Example-1 radial map equals β(|x|)", false, ki_field_identity),
    entry("conformal_invariance", "K_I is unchanged by the inversion extension", false, conformal_invariance),
    entry("geometric_inclusions", "reflection inclusions and the reflection-factor bound", true, geometric_inclusions),
    entry("limsup_verdicts", "limsup condition verdicts", true, limsup_verdicts),
    entry("empirical_holder", "sampled Hölder exponents at the origin", false, empirical_holder_check),
    entry("poisson_normalization", "P[1] = 1 inside the ball", true, poisson_normalization),
    entry("poisson_reproduction", "P[t_3] = x_3 and the mean-value property", true, poisson_reproduction),
    entry("i_alpha_law", "growth law of I_α(r) as r -> 1", true, i_alpha_law),
    entry("privalov_gradient", "(1-r)^{1/2}|∇h| stays bounded for |e_3 - t|^{1/2}", true, privalov_gradient),
    entry("planar_log_growth", "logarithmic gradient growth for Lipschitz planar data", true, planar_log_growth),
    entry("beltrami_identities", "Beltrami coefficients and the integral growth condition", true, beltrami_identities),
];

/// Registered checks in suite order.
pub fn list() -> Vec<CheckInfo> {
    REGISTRY.iter().map(|e| e.info).collect()
}

fn lookup(id: &str) -> Result<&'static Entry> {
    REGISTRY
        .iter()
        .find(|e| e.info.id == id)
        .ok_or_else(|| Error::UnknownCheck(id.to_string()))
}

fn validate(cfg: &SuiteConfig) -> Result<()> {
    cfg.quadrature.validate()?;
    cfg.ball_mean.points()?;
    if !(cfg.profile.k_max >= 1) {
        return Err(Error::input("profile.k_max must be at least 1"));
    }
    Ok(())
}

pub fn run_check(id: &str, cfg: &SuiteConfig) -> Result<CheckReport> {
    let e = lookup(id)?;
    validate(cfg)?;
    Ok(execute(e, cfg))
}

fn execute(e: &Entry, cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut ctx = Ctx::new();
    let outcome = if e.info.quadrature_limited && cfg.tolerance() < QUADRATURE_FLOOR {
        Err(format!(
            "requested quadrature tolerance {:e} is below the attainable floor {QUADRATURE_FLOOR:e}",
            cfg.tolerance()
        ))
    } else {
        (e.run)(cfg, &mut ctx).map_err(|err| err.to_string())
    };
    let status = match outcome {
        Err(msg) => {
            ctx.note(msg);
            Status::Inconclusive
        }
        Ok(()) => {
            let ok = ctx
                .expected
                .iter()
                .zip(&ctx.measured)
                .all(|(x, m)| x.relation.holds(m.value, x.value, x.tolerance));
            if ok {
                Status::Pass
            } else {
                Status::Fail
            }
        }
    };
    CheckReport {
        check_id: e.info.id.to_string(),
        status,
        measured: ctx.measured,
        expected: ctx.expected,
        runtime_ms: start.elapsed().as_millis() as u64,
        seed: cfg.seed,
        tool_version: TOOL_VERSION.to_string(),
        diagnostics: ctx.diagnostics,
        tables: ctx.tables,
    }
}

/// Runs the configured check list (or the whole registry). Unknown ids are
/// rejected before anything runs.
pub fn run_all(cfg: &SuiteConfig) -> Result<(Summary, Vec<CheckReport>)> {
    validate(cfg)?;
    let entries: Vec<&Entry> = match &cfg.checks {
        Some(ids) => ids.iter().map(|id| lookup(id)).collect::<Result<_>>()?,
        None => REGISTRY.iter().collect(),
    };
    let reports: Vec<CheckReport> = if cfg.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = entries
                .iter()
                .map(|e| s.spawn(move || execute(e, cfg)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("check thread panicked"))
                .collect()
        })
    } else {
        entries.iter().map(|e| execute(e, cfg)).collect()
    };
    Ok((Summary::from_reports(&reports, cfg.seed), reports))
}

fn example1_integral_bound(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let b = cfg.example1()?;
    let mut worst = f64::NEG_INFINITY;
    let mut table = Table::new("integral_bound", &["a", "integral", "bound"]);
    for i in 1..=200 {
        let a = i as f64 / 201.0;
        let v = b.integrate_power(1, Weight::One, a, 1.0)?;
        worst = worst.max(v - 2.0 * (1.0 - a));
        table.push(vec![a, v, 2.0 * (1.0 - a)]);
    }
    ctx.tables.push(table);
    ctx.compare("max_excess", worst, Relation::AtMost, 0.0, 0.0, Provenance::Reported);
    Ok(())
}

fn boundary_points_3d() -> Vec<Point> {
    let raw = [
        Point::north(3),
        Point::xyz(0.0, 0.0, -1.0),
        Point::basis(3, 0),
        Point::xyz(1.0, 1.0, 1.0),
        Point::xyz(-0.3, 0.8, -0.5),
    ];
    raw.iter().map(|p| p.normalized().expect("non-zero")).collect()
}

fn ball_mean_sweep(
    cfg: &SuiteConfig,
    ctx: &mut Ctx,
    points: &[Point],
    bound: f64,
    table_name: &str,
) -> Result<()> {
    let q = QField::radial(cfg.example1()?);
    let mut table = Table::new(table_name, &["point", "eps", "mean"]);
    for (i, z) in points.iter().enumerate() {
        let s = sup_ball_mean(&q, z, &cfg.ball_mean, &cfg.quadrature)?;
        for row in &s.table {
            table.push(vec![i as f64, row.eps, row.value]);
        }
        ctx.compare(format!("sup_mean_{i}"), s.sup, Relation::AtMost, bound, 1e-3, Provenance::Reported);
    }
    ctx.tables.push(table);
    Ok(())
}

fn example1_ball_mean(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    ball_mean_sweep(cfg, ctx, &boundary_points_3d(), 1.5, "ball_means")
}

fn example2_planar_mean(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let points: Vec<Point> = [0.0f64, 1.3, 2.5, 3.9, 5.4]
        .iter()
        .map(|t| Point::xy(t.cos(), t.sin()))
        .collect();
    ball_mean_sweep(cfg, ctx, &points, 6.0 / PI, "planar_ball_means")
}

fn cap_identity(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    for eps in [0.1, 0.5, 1.0] {
        let phi = chord_to_angle(eps);
        let area = zonal_integral_breaks(
            |th| if th <= phi { 1.0 } else { 0.0 },
            3,
            false,
            &[phi],
            &cfg.quadrature,
        )?;
        let exact = PI * eps * eps;
        ctx.compare(
            format!("rel_error_eps_{eps}"),
            (area - exact).abs() / exact,
            Relation::AtMost,
            0.0,
            1e-4,
            Provenance::Reported,
        );
    }
    Ok(())
}

fn beta_cube_integrability(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let v = cfg.example1()?.integrate_power(3, Weight::One, 0.5, 1.0)?;
    ctx.compare("integral", v, Relation::AtMost, 1.5, 0.0, Provenance::Reported);
    Ok(())
}

fn calderon_classification(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let cases = [(3.0, 3, true), (2.0, 3, false), (3.0, 4, false)];
    for (p, n, satisfied) in cases {
        let v = calderon_check(&OrliczFunction::power(p), n, &cfg.quadrature)?;
        let ok = match v {
            CalderonVerdict::Satisfied { .. } => satisfied,
            CalderonVerdict::Violated { .. } => !satisfied,
            CalderonVerdict::Inconclusive { reason } => {
                return Err(Error::Degenerate(format!("t^{p} at n = {n}: {reason}")))
            }
        };
        let want = if satisfied { "satisfied" } else { "violated" };
        ctx.flag(format!("t{p}_n{n}_{want}"), ok, Provenance::Reported);
    }
    Ok(())
}

fn holder_exponent_formula(_: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let a = holder_exponent_theorem1(1.5, 3)?;
    ctx.compare("alpha", a, Relation::Within, 0.036_510, 1e-5, Provenance::Derived);
    Ok(())
}

/// Radii well away from every spike edge relative to the difference step;
/// spike interiors wide enough to resolve are included.
fn clean_radii(profile: &StepProfile, count: usize) -> Vec<f64> {
    let guard = 3.0 * default_step(&Point::zero(3));
    let clear = |r: f64| {
        profile
            .spikes()
            .iter()
            .all(|s| (r - s.lo).abs() > guard && (r - s.hi).abs() > guard)
    };
    let mut radii: Vec<f64> = profile
        .spikes()
        .iter()
        .map(|s| 0.5 * (s.lo + s.hi))
        .filter(|&r| clear(r))
        .collect();
    let mut i = 0;
    while radii.len() < count {
        let r = 0.02 + 0.96 * (i as f64 + 0.5) / count as f64;
        if clear(r) {
            radii.push(r);
        }
        i += 1;
    }
    radii.truncate(count);
    radii
}

fn ki_field_identity(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let profile = cfg.example1()?;
    let f = DifferentiableMap::new(RadialStretchMap::new(profile.clone(), 3)?).numeric();
    let mut rng = rng_from_seed(cfg.seed);
    let radii = clean_radii(&profile, cfg.samples.radii);
    let points: Vec<Point> = radii
        .iter()
        .map(|&r| random_unit_vector(3, &mut rng).scale(r))
        .collect();
    let field = k_i_field(&f, &points);
    if field.invalid > 0 {
        ctx.note(format!("{} Jacobian evaluations failed", field.invalid));
    }
    let mut worst: f64 = 0.0;
    let mut table = Table::new("k_i", &["rho", "k_i", "beta"]);
    for s in field.samples() {
        let rho = s.point.norm();
        let beta = profile.eval(rho)?;
        worst = worst.max((s.k_i - beta).abs() / beta);
        table.push(vec![rho, s.k_i, beta]);
    }
    ctx.tables.push(table);
    ctx.compare("valid_samples", field.valid as f64, Relation::AtLeast, radii.len() as f64, 0.0, Provenance::Analytic);
    ctx.compare("max_rel_deviation", worst, Relation::AtMost, 0.0, 1e-3, Provenance::Reported);
    Ok(())
}

fn conformal_invariance(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let n = cfg.samples.invariance;
    let ex1 = DifferentiableMap::new(RadialStretchMap::new(cfg.example1()?, 3)?).numeric();
    let r = conformal_invariance_check(&ex1, n, cfg.seed)?;
    ctx.compare("example1_max_rel_deviation", r.max_rel_deviation, Relation::AtMost, 0.0, 1e-3, Provenance::Reported);
    let p2 = power_map(2.0)?.numeric();
    let r = conformal_invariance_check(&p2, n, cfg.seed.wrapping_add(1))?;
    ctx.compare("power2_max_rel_deviation", r.max_rel_deviation, Relation::AtMost, 0.0, 1e-3, Provenance::Reported);
    Ok(())
}

fn geometric_inclusions(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let zeta = Point::north(3);
    let m = cfg.samples.inclusion;
    let inc = inclusion_plus_minus(&zeta, 0.3, m, cfg.seed)?;
    ctx.compare("inclusion_samples", inc.samples as f64, Relation::AtLeast, m as f64, 0.0, Provenance::Analytic);
    ctx.flag("inclusion_holds", inc.passed, Provenance::Reported);
    let low = lower_norm_bound(&zeta, 0.4, m, cfg.seed.wrapping_add(1))?;
    ctx.compare("lower_bound_samples", low.samples as f64, Relation::AtLeast, m as f64, 0.0, Provenance::Analytic);
    ctx.compare("min_norm", low.extreme, Relation::AtLeast, 0.5, 0.0, Provenance::Reported);
    let fields = [
        ("one", QField::constant(1.0)?),
        ("example1", QField::radial(cfg.example1()?)),
    ];
    for (label, q) in &fields {
        for r in [0.1, 0.2, 0.4] {
            let b = reflection_factor_bound(q, &zeta, r, &cfg.quadrature)?;
            ctx.compare(
                format!("reflection_ratio_{label}_r{r}"),
                b.lhs / b.rhs,
                Relation::AtMost,
                1.0,
                1e-6,
                Provenance::Reported,
            );
        }
    }
    Ok(())
}

fn limsup_verdicts(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let grid = EpsGrid {
        max: cfg.limsup.eps0,
        per_decade: cfg.limsup.per_decade,
        ..EpsGrid::below(cfg.limsup.eps0)
    };
    let origin = Point::zero(3);
    let one = limsup_condition(&QField::constant(1.0)?, &origin, 1.0, &grid, &cfg.quadrature)?;
    ctx.compare("q1_bound", one.bound_estimate, Relation::Within, 0.0, 0.0, Provenance::Analytic);
    let four = limsup_condition(&QField::constant(4.0)?, &origin, 1.0, &grid, &cfg.quadrature)?;
    ctx.flag("q4_unbounded", four.verdict == LimsupVerdict::Unbounded, Provenance::Analytic);
    let ex4 = limsup_condition(&QField::radial(cfg.example4()?), &origin, 1.0, &grid, &cfg.quadrature)?;
    ctx.flag("example4_bounded", ex4.verdict == LimsupVerdict::Bounded, Provenance::Reported);
    let mut table = Table::new("limsup", &["field", "t", "value"]);
    for (i, rep) in [&one, &four, &ex4].into_iter().enumerate() {
        for row in &rep.table {
            table.push(vec![i as f64, row.eps, row.value]);
        }
    }
    ctx.tables.push(table);
    Ok(())
}

fn empirical_holder_check(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let pairs = cfg.samples.holder_pairs;
    for k in [1.0, 2.0, 4.0] {
        let f = power_map(k)?;
        let h = empirical_holder(&f, &Point::zero(2), 1.0 / k, 0.5, pairs, cfg.seed, HolderMode::Pointwise)?;
        ctx.compare(format!("power{k}_exponent"), h.fitted_exponent, Relation::Within, 1.0 / k, 0.02, Provenance::Reported);
    }
    let f = DifferentiableMap::new(RadialStretchMap::new(cfg.example4()?, 3)?);
    let h = empirical_holder(&f, &Point::zero(3), 1.0, 0.9, pairs, cfg.seed, HolderMode::Pointwise)?;
    ctx.compare("example4_lipschitz_constant", h.constant_estimate, Relation::Finite, f64::INFINITY, 0.0, Provenance::Reported);
    Ok(())
}

fn poisson_points(seed: u64) -> Vec<Point> {
    let mut rng = rng_from_seed(seed);
    let mut pts = vec![Point::zero(3), Point::north(3).scale(0.99), Point::xyz(0.7, 0.0, -0.7).normalized().expect("non-zero").scale(0.99)];
    while pts.len() < 20 {
        pts.push(uniform_in_unit_ball(3, &mut rng));
    }
    pts
}

fn poisson_normalization(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let one = BoundaryData::new("1", 3, |_| 1.0)?;
    let mut worst: f64 = 0.0;
    for x in poisson_points(cfg.seed) {
        worst = worst.max((poisson_extend(&one, &x, &cfg.quadrature)? - 1.0).abs());
    }
    ctx.compare("max_abs_error", worst, Relation::AtMost, 0.0, 1e-8, Provenance::Analytic);
    Ok(())
}

fn poisson_reproduction(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let t3 = BoundaryData::coordinate(2, 3)?;
    let mut worst: f64 = 0.0;
    for x in poisson_points(cfg.seed) {
        worst = worst.max((poisson_extend(&t3, &x, &cfg.quadrature)? - x[2]).abs());
    }
    ctx.compare("coordinate_max_abs_error", worst, Relation::AtMost, 0.0, 1e-6, Provenance::Analytic);

    let data = |t: &Point| (t[0] + 0.5 * t[1]).exp() + t[2] * t[2];
    let g = BoundaryData::new("exp(t1 + t2/2) + t3^2", 3, data)?;
    let at_center = poisson_extend(&g, &Point::zero(3), &cfg.quadrature)?;
    let average = integrate_sphere(&data, 3, &cfg.quadrature)?.value / (4.0 * PI);
    ctx.compare("mean_value_error", (at_center - average).abs(), Relation::AtMost, 0.0, 1e-8, Provenance::Analytic);
    Ok(())
}

fn i_alpha_law(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let radii: Vec<f64> = (0..=20).map(|i| 1.0 - 0.1 * 10f64.powf(-2.0 * i as f64 / 20.0)).collect();
    let mut table = Table::new("i_alpha", &["alpha", "r", "value"]);
    for alpha in [0.25, 0.5, 0.75] {
        let mut pts = Vec::with_capacity(radii.len());
        for &r in &radii {
            let v = i_alpha(r, alpha, 3, &cfg.quadrature)?;
            table.push(vec![alpha, r, v]);
            pts.push(((1.0 - r).ln(), v.ln()));
        }
        let slope = least_squares_slope(&pts);
        ctx.compare(format!("slope_alpha_{alpha}"), slope, Relation::Within, alpha - 1.0, 0.05, Provenance::Reported);
        let at0 = i_alpha(0.0, alpha, 3, &cfg.quadrature)?;
        let exact = 2f64.powf(alpha + 1.0) / (alpha + 2.0);
        ctx.compare(format!("center_value_alpha_{alpha}"), at0, Relation::Within, exact, 1e-6, Provenance::Analytic);
    }
    ctx.tables.push(table);
    Ok(())
}

fn privalov_gradient(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let g = BoundaryData::chord_power(Point::north(3), 0.5)?;
    let grid: Vec<f64> = (0..=20).map(|i| 1.0 - 0.5 * 10f64.powf(-2.0 * i as f64 / 20.0)).collect();
    let rep = privalov_check(&g, &grid, &cfg.quadrature)?;
    let mut table = Table::new("privalov", &["r", "grad_norm", "scaled"]);
    for w in &rep.rows {
        table.push(vec![w.r, w.grad_norm, w.scaled]);
    }
    ctx.tables.push(table);
    ctx.compare("sup_scaled", rep.sup_scaled, Relation::Finite, f64::INFINITY, 0.0, Provenance::Reported);
    ctx.compare("last_decade_ratio", rep.last_decade_ratio, Relation::AtMost, 3.0, 0.0, Provenance::Reported);
    ctx.note(format!("fitted gradient slope {:.4}", rep.slope));
    Ok(())
}

fn planar_log_growth(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let g = BoundaryData::planar_log_example();
    let grid: Vec<f64> = (3..=10).map(|j| 1.0 - 2f64.powi(-j)).collect();
    let rep = privalov_check(&g, &grid, &cfg.quadrature)?;
    let mut table = Table::new("planar_growth", &["r", "grad_norm"]);
    for w in &rep.rows {
        table.push(vec![w.r, w.grad_norm]);
    }
    ctx.tables.push(table);
    ctx.compare("log_slope", log_growth_slope(&rep.rows), Relation::Within, 1.0, 0.1, Provenance::Reported);
    Ok(())
}

fn beltrami_identities(cfg: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let ex1 = LogStretch::default();
    let numeric_ex1 = FnPlanar::new("ex1", move |z| ex1.eval(z));
    let mut worst: f64 = 0.0;
    for z in [
        Complex::new(0.1, 0.0),
        Complex::new(0.05, 0.05),
        Complex::new(-0.02, 0.07),
        Complex::new(0.001, -0.003),
        Complex::new(-0.1, -0.05),
    ] {
        let d = complex_dilatation(&numeric_ex1, z, None)?;
        worst = worst.max((d.mu - log_stretch_mu(z)).abs());
    }
    ctx.compare("example1_mu_max_error", worst, Relation::AtMost, 0.0, 1e-6, Provenance::Reported);

    let g = HolderBeltrami::new(0.3, 0.6, 0.5)?;
    let numeric_g = FnPlanar::new("ex3", move |w| g.eval(w));
    let mut rng = rng_from_seed(cfg.seed);
    let mut max_mu: f64 = 0.0;
    let mut skipped = 0;
    for _ in 0..cfg.samples.beltrami {
        // keep the difference stencil inside the disk and off the branch cut
        let w = uniform_in_unit_ball(2, &mut rng).scale(0.999);
        let w = Complex::new(w[0], w[1]);
        if w.re < 0.0 && w.im.abs() < 1e-5 {
            skipped += 1;
            continue;
        }
        let d = complex_dilatation(&numeric_g, w, None)?;
        max_mu = max_mu.max(d.mu.abs());
    }
    if skipped > 0 {
        ctx.note(format!("{skipped} samples on the branch cut skipped"));
    }
    ctx.compare("example3_max_abs_mu", max_mu, Relation::AtMost, g.k, 1e-6, Provenance::Reported);

    let cfgq = &cfg.quadrature;
    let v = integral_growth_check(
        |z| Ok(complex_dilatation(&ex1, z, None)?.mu),
        ZERO,
        ZERO,
        ex1.r0,
        cfgq,
    )?;
    ctx.flag("example1_growth_divergent", matches!(v, GrowthVerdict::Divergent { .. }), Provenance::Reported);

    let z0 = Complex::new(0.1, 0.2);
    let chi0 = Complex::new(0.2, 0.0);
    let v = integral_growth_check(|z| Ok(chi0 + (z - z0).powf(0.5) * 0.3), z0, chi0, 0.5, cfgq)?;
    ctx.flag("holder_point_growth_finite", matches!(v, GrowthVerdict::Finite { .. }), Provenance::Analytic);
    Ok(())
}
