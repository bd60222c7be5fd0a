//! Geodesic flow, X-ray transform and Pestov identity tools for gas giant
//! metrics `g = dx² + x⁻² h(x, y)` on a collar `[0, x_ceiling] × torus`.

pub mod error;
pub mod fit;
pub mod flow;
pub mod jacobi;
pub mod metric;
pub mod ode;
pub mod pestov;
pub mod rng;
pub mod suites;
pub mod quad;
pub mod transform;

pub use error::{Error, Result};
pub use flow::{GeodesicPath, IntegratorOptions, PhaseState, RayStatus};
pub use metric::{ChartPoint, MetricModel, ModelKind};
