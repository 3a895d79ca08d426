pub mod cli;
pub mod levels;
pub mod opalg;
pub mod qalg;
pub mod radial;
pub mod report;
pub mod surd;
