//! Maximum likelihood estimation for causal and noncausal autoregressive
//! processes driven by α-stable noise.
//!
//! The crate is organised bottom-up:
//!
//! * [`stable`] – α-stable characteristic function, density, CDF, quantile,
//!   sampling, score and Fisher information.
//! * [`ar`] – factored AR polynomial algebra, residual filtering, Laurent
//!   coefficients and two-sided simulation.
//! * [`likelihood`] – conditional log-likelihood and the unconstrained
//!   objective used by the optimiser.
//! * [`optimizer`] – Nelder–Mead, random starts, the multi-start fit and the
//!   AIC order scan.
//! * [`inference`] – m-out-of-n bootstrap, Fisher-information intervals and
//!   the limit functional simulator.
//! * [`diagnostics`] – ACF/PACF, residual dependence bounds and qq data.
//!
//! The polynomial, filtering, simplex and correlation code is generic over
//! [`Real`]; the density machinery and everything built on it is `f64`.

pub mod ar;
pub mod diagnostics;
pub mod error;
pub mod inference;
pub mod likelihood;
pub mod optimizer;
pub mod poly;
pub mod quad;
pub mod rng;
pub mod stable;

use std::fmt::Debug;

pub use error::{Error, Result};

/// Floating point scalar used by the generic numerical kernels.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + std::iter::Sum
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Factored AR parameters in double precision.
pub type ArParams = ar::FactoredArParams<f64>;
/// Product AR polynomial in double precision.
pub type Polynomial = ar::ArPolynomial<f64>;
/// Laurent coefficients in double precision.
pub type Laurent = ar::LaurentCoeffs<f64>;
/// Noise coefficients c_j(u) in double precision.
pub type Cj = ar::CjCoeffs<f64>;
/// Single precision factored AR parameters.
pub type ArParamsF32 = ar::FactoredArParams<f32>;
/// Nelder–Mead options in double precision.
pub type NmOptions = optimizer::NelderMeadOptions<f64>;

pub use ar::RootCheck;
pub use inference::{BootstrapCi, BootstrapConfig, BootstrapResult, WSimConfig};
pub use likelihood::ParamVector;
pub use optimizer::{FitOptions, FitResult, Profile};
pub use stable::{DensityTable, StableParams};
