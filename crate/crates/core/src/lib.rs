//! Planar three-point-vortex dynamics and its reduction to the shape sphere.
//!
//! The library is generic over the scalar type (see [`real::Real`]); the
//! aliases at the crate root fix it to `f64`, and [`single`] to `f32`.
//!
//! ```
//! use trivortex::{make_pauli, shape_map, Config, Strengths};
//!
//! let s = Strengths::new(1.0, 1.0, 1.0).unwrap();
//! let cfg = Config::from_xy([1.0, 0.0, -0.5, 0.75f64.sqrt(), -0.5, -0.75f64.sqrt()]).unwrap();
//! let a = make_pauli(&s, None).unwrap().to_pauli_coords(&shape_map(&cfg));
//! assert!((a.a[3] - 1.5).abs() < 1e-12);
//! ```

pub mod error;
pub mod full;
pub mod linalg;
pub mod ode;
pub mod output;
pub mod portrait;
pub mod real;
pub mod reduced;
pub mod shape_algebra;
pub mod transforms;
pub mod verification;
pub mod vortex;

pub use error::{Error, Result};
pub use full::{
    canonical_bracket, integrate_full, virial_rate, vortex_rhs, IntegratorOptions, Observable,
    PhaseFunction, Termination,
};
pub use portrait::{chart_to_pauli, extract_contours, pauli_to_chart, render_svg, sample_portrait, ChartKind};
pub use real::Real;
pub use reduced::{
    compare_flows, find_relative_equilibria, integrate_reduced, integrate_reduced_with,
    reduced_hamiltonian, reduced_rhs, ReducedOptions,
};
pub use shape_algebra::{
    bracket_v, build_a_matrix, casimirs, make_pauli, special_pauli_symbols, structure_constants,
    verify_pauli,
};
pub use transforms::{
    check_symplectic, full_chain, mixed_to_pauli, t1_forward, t1_inverse, t2_forward, t2_inverse,
    t3_forward, t3_inverse, MapId,
};
pub use vortex::{conserved_quantities, hamiltonian, heron_residual, shape_map};

pub type Strengths = vortex::VortexStrengths<f64>;
pub type Config = vortex::VortexConfig<f64>;
pub type Point = vortex::ExtendedPoint<f64>;
pub type Covector = shape_algebra::Covector<f64>;
pub type Basis = shape_algebra::PauliBasis<f64>;
pub type Coords = shape_algebra::PauliCoords<f64>;
pub type FullTrajectory = full::Trajectory<f64>;
pub type State = reduced::ReducedState<f64>;
pub type ReducedTrajectory = reduced::ReducedTrajectory<f64>;
pub type Grid = portrait::PortraitGrid<f64>;
pub type ChartPoint = portrait::ChartPoint<f64>;
pub type JBHState = transforms::JBHState<f64>;
pub type ActionAngleState = transforms::ActionAngleState<f64>;
pub type MixedState = transforms::MixedState<f64>;

/// `f32` counterparts of the root aliases.
pub mod single {
    pub type Strengths = crate::vortex::VortexStrengths<f32>;
    pub type Config = crate::vortex::VortexConfig<f32>;
    pub type Basis = crate::shape_algebra::PauliBasis<f32>;
    pub type Coords = crate::shape_algebra::PauliCoords<f32>;
    pub type State = crate::reduced::ReducedState<f32>;
    pub type Grid = crate::portrait::PortraitGrid<f32>;
}
