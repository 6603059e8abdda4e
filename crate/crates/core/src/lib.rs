//! Evaluation of the explicit contour-integral solution of the
//! moving-interface linear KdV model
//!
//! ```text
//! q_t + q_xxx = (c − 6a) q_x   (x < 0),
//! q_t + q_xxx =  c       q_x   (x > 0),
//! q(x, 0) = a·1{x < 0},
//! ```
//!
//! together with the closed forms it reduces to and brute-force PDE oracles
//! used to check it.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the type
//! aliases at the crate root fix the scalar to `f64`. The PDE oracles in
//! [`oracles`] work in `f64` only.
//!
//! ```
//! use kdv_utm::{evaluate, Params, Request};
//!
//! let params = Params::new(0.25, 1.0).unwrap();
//! let q = evaluate(&Request::new(-1.0, 1.0, params)).unwrap();
//! assert!((q.value - 0.178_524_275).abs() < 1e-8);
//! ```

mod error;
pub mod closed_forms;
pub mod contour;
pub mod oracles;
pub mod params;
pub mod quadrature;
pub mod roots;
pub mod scalar;
pub mod utm;

pub use closed_forms::{airy_ai, airy_ai_tail_integral, lkdv_step, stationary, StationaryCoeffs};
pub use contour::{ContourPath, ContourSpec, Part, Segment, Term};
pub use error::{Error, Result};
pub use params::{frame_map, to_canonical, Canonical, Frame, ModelParams};
pub use quadrature::{QuadOptions, QuadResult};
pub use roots::{BranchPointSet, RootBranch, RootBranches};
pub use scalar::{Cplx, Real};
pub use utm::{
    evaluate, evaluate_profile, EvalOptions, EvalRequest, Evaluation, Evaluator, ProfileGrid, SolutionSample,
};

pub type Params = ModelParams<f64>;
pub type Complex64 = Cplx<f64>;
pub type Branches = RootBranches<f64>;
pub type Contour = ContourPath<f64>;
pub type Request = EvalRequest<f64>;
pub type Options = EvalOptions<f64>;
pub type Sample = SolutionSample<f64>;
