//! Exact solutions of the 1+1D time-dependent Schroedinger equation built
//! from intertwining (Darboux) operators and form-preserving point
//! transformations, with an independent Crank-Nicolson propagator for
//! cross-checks. Units: hbar = 1, 2m = 1.

pub mod calculus;
pub mod catalog;
pub mod darboux;
pub mod eigen;
pub mod error;
pub mod expr;
pub mod field;
pub mod grid;
pub mod pointmap;
pub mod propagator;
pub mod reality;
pub mod specfun;
pub mod spline;
pub mod timefn;

pub use error::{Error, Result};
pub use catalog::{
    default_entry, entry_free_particle, entry_sextic_static, entry_sextic_timedep,
    entry_synthetic, families, omega_periodic, CatalogEntry, FamilyInfo,
};
pub use darboux::{build_darboux, check_reality, square_integrability_diagnostic, DarbouxBuild, DarbouxOperator, SeedSolution};
pub use expr::{parse, Expr, Var};
pub use field::{ComplexField, RealField, SpaceFunction, SpaceTimeField, WaveField};
pub use grid::{SpatialGrid, TimeAxis};
pub use num_complex::Complex64 as C64;
pub use pointmap::PointTransform;
pub use propagator::{compare, residual, CompareReport, PropagationRun};
pub use reality::{
    extract_f, factorize, fit_quadratic_phase, phase_compatibility_residual, static_potentials,
    theorem_transform, verify_commutation, CommutationReport, Factorization, QuadraticPhase,
    StaticGenerator,
};
pub use spline::Spline;
pub use timefn::{CumulativeIntegral, TimeFunction};
