//! Symbolic and numerical engine for the standard Podles quantum sphere.
//!
//! The crate is generic over the real scalar type via [`scalars::Real`];
//! the aliases below fix the two concrete lanes used in practice.

pub mod error;
pub mod hochschild;
pub mod hopf;
pub mod ncalg;
pub mod scalars;
pub mod spectral;
pub mod verify;
pub mod zeta;

pub use error::CoreError;
pub use ncalg::{AlgebraElement, AlgebraId, Gen, Monomial};
pub use scalars::{Cplx, MpReal, Real, ScalarContext};

/// High-precision scalar lane (MPFR), the default for verification work.
pub type DefaultReal = MpReal;
/// Fast double-precision lane for estimates and probes.
pub type FastReal = f64;

pub type DefaultCplx = Cplx<DefaultReal>;
pub type DefaultContext = ScalarContext<DefaultReal>;
pub type DefaultElement = AlgebraElement<DefaultReal>;

pub type FastCplx = Cplx<FastReal>;
pub type FastContext = ScalarContext<FastReal>;
pub type FastElement = AlgebraElement<FastReal>;
