//! Acquisition functions, bounded line search, stochastic coordinate ascent
//! and the CDBO policy-search loop.

pub mod acquisition;
pub mod bo;
pub mod cdbo;
pub mod coordinate;
pub mod line;

pub use acquisition::{acquisition, AcquisitionKind, AcquisitionSpec, AcquisitionSurface};
pub use bo::{BoSettings, SearchIncumbent};
pub use cdbo::{cdbo_run, default_sigma0, sample_around, CdboConfig};
pub use coordinate::{random_axis_order, stochastic_coordinate_ascent, AxisBounds, AxisSurface, Sweep};
pub use line::{line_maximize, maximize_on_interval, LineResult, SearchBudget};
