//! Library side of the `odl` binary: config parsing, built-in replication
//! presets, and the suite runner. Kept as a lib so integration tests can
//! drive suites without shelling out.

pub mod config;
pub mod presets;
pub mod runner;
