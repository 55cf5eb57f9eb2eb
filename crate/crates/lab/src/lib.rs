pub mod cli;
pub mod experiments;
pub mod io;
