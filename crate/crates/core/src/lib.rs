//! Energy model for a battery-powered camera that either runs a video
//! analytics task locally or offloads the compressed stream over an OFDM
//! uplink to a fog node.
//!
//! The analytic core (`numerics`, `pa`, `link`, `chain`) is generic over the
//! scalar type through [`Real`]; concrete `f64`/`f32` aliases live at the
//! crate root. The Monte-Carlo oracle, configuration loading and the sweep
//! drivers work in `f64`.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod config;
pub mod error;
pub mod link;
pub mod mc_oracle;
pub mod numerics;
pub mod pa;
pub mod sweep;
pub mod units;

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub use error::{Error, Result};

/// Floating-point scalar accepted by the analytic models.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion used for error payloads and reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

pub type RootSolveReport = numerics::RootSolveReport<f64>;
pub type RootSolveReportF32 = numerics::RootSolveReport<f32>;

pub type PaOperatingPoint = pa::PaOperatingPoint<f64>;
pub type PaOperatingPointF32 = pa::PaOperatingPoint<f32>;

pub type LinkGeometry = link::LinkGeometry<f64>;
pub type LinkGeometryF32 = link::LinkGeometry<f32>;
pub type ChannelState = link::ChannelState<f64>;
pub type ChannelStateF32 = link::ChannelState<f32>;

pub type RadioParams = chain::RadioParams<f64>;
pub type RadioParamsF32 = chain::RadioParams<f32>;
pub type DeploymentParams = chain::DeploymentParams<f64>;
pub type DeploymentParamsF32 = chain::DeploymentParams<f32>;
pub type PowerBreakdown = chain::PowerBreakdown<f64>;
pub type PowerBreakdownF32 = chain::PowerBreakdown<f32>;

pub use mc_oracle::{McConfig, McEstimate};
