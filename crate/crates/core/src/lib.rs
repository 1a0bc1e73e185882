//! Fractional pseudo-Newton root finding.
//!
//! The iteration `x_{i+1} = Rnd(x_i − P_{ε,β}(x_i) f(x_i), m)` uses as
//! preconditioner the diagonal matrix of Riemann–Liouville derivatives of the
//! constant 1, which are nonzero for non-integer order. It needs no partial
//! derivatives of `f`, reaches complex roots from real starting points, and
//! different orders α lead to different roots from the same start.
//!
//! ```
//! use fracpn::{solve, systems, CVector, SolverConfig, Status};
//!
//! let f = systems::make_sine_integral_tail(50);
//! let cfg = SolverConfig::new(-0.83718).with_epsilon(1e-3).with_tol(1e-6);
//! let r = solve(&f, &CVector::from_real(&[1.85]), &cfg).unwrap();
//! assert_eq!(r.status, Status::Converged);
//! assert!((r.root[0].re - 23.60399266).abs() < 1e-4);
//! ```

// `!(x > 0.0)` is used deliberately so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fractional;
pub mod receiver;
pub mod solver;
pub mod special;
pub mod sweep;
pub mod system;
pub mod systems;
pub mod vector;

pub use error::{Error, Result};
pub use fractional::{beta_select, frac_deriv_const, p_matrix, Monomial, PMatrix};
pub use num_complex::Complex64;
pub use solver::{phi_step, rnd, solve, solve_traced, IterationTrace, SolveResult, SolverConfig, Status, TraceEntry};
pub use special::{complex_pow, gamma_real, norm2};
pub use sweep::{alpha_sweep, dedup_roots, estimate_order, RootRecord, SweepConfig, SweepReport};
pub use system::NonlinearSystem;
pub use vector::CVector;
