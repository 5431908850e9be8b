pub mod asymptotics;
pub mod coeffs;
pub mod error;
pub mod estimate;
pub mod fdspec;
pub mod golden;
pub mod greens;
pub mod liouville;
pub mod ode;
pub mod quad;
pub mod recurrence;
pub mod roots;
pub mod shooting;

pub use coeffs::{CoefficientSet, ProblemParams};
pub use error::{Error, Result};
pub use estimate::{EigenEstimate, Method, RightEnd, Window};
pub use liouville::LiouvilleMap;
