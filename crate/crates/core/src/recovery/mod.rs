//! Channels, Petz recovery, and qubit pairwise-transformation feasibility.

mod au;
mod channel;
mod petz;

pub use au::{
    au_feasible, entangled_example, AuReport, EntangledExample, AU_FAR_PROBE, AU_TOL, DEFAULT_AU_GRID, MIN_AU_GRID,
};
pub use channel::{partial_trace_channel, Channel, CHOI_FLOOR, CPTP_TOL};
pub use petz::petz_map;
