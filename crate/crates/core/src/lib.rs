pub mod features;
pub mod mtmetrics;
pub mod qats_io;
pub mod qemodel;
pub mod resources;
pub mod stats;
pub mod textproc;
