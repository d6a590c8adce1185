//! Numerical kernels shared by the physics modules.

mod interp;
mod quadrature;
mod roots;

pub use interp::{InterpError, InterpolationTable};
pub use quadrature::{
    integrate_adaptive, try_integrate_adaptive, Integral, QuadratureError, QuadratureSpec,
    QuadratureSpecError,
};
pub use roots::{solve_quadratic_positive, RootError};
