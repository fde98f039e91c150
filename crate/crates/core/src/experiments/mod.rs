//! Phantoms, sensor layouts, simulated data, error metrics and the conditioning study.

mod conditioning;
mod data;
mod layout;
mod metrics;
mod phantom;

pub use conditioning::{condition_number, condition_study, write_condition_csv};
pub use data::{resample_time, simulate_data, simulate_for_reconstruction, NoiseModel};
pub use layout::{available_sensors, layout_summary, map_sensors, ring_order, sensor_layout};
pub use metrics::{bilinear_resample, cross_section, relative_error};
pub use phantom::{make_phantom, Phantom, Shape};
