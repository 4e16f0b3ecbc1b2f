//! Numerical laboratory for quasiconformal and finite-distortion mappings:
//! quadrature on balls and spheres, step-profile dilatations, radial stretch
//! maps, distortion functionals, integral conditions, Poisson extension and
//! planar Beltrami coefficients.

pub mod beltrami;
pub mod checks;
pub mod complex;
pub mod conditions;
pub mod dilatation;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod linalg;
pub mod maps;
pub mod profiles;
pub mod quadrature;
pub mod report;

pub use beltrami::{ComplexDilatation, GrowthVerdict, PlanarMap, Wirtinger};
pub use checks::{list, run_all, run_check, CheckInfo, SuiteConfig};
pub use complex::Complex;
pub use conditions::{EpsGrid, LimsupVerdict, QField};
pub use error::{Error, Result};
pub use geometry::{BallRegion, ConstantsN, Point, RegionKind};
pub use harmonic::{BoundaryData, HolderModulus};
pub use linalg::Mat;
pub use maps::{DifferentiableMap, Mapping, RadialStretchMap};
pub use profiles::{OrliczFunction, StepProfile};
pub use quadrature::{QuadratureConfig, QuadratureResult, ScalarField, TailOutcome};
pub use report::{CheckReport, Provenance, Status, Summary, Table};
