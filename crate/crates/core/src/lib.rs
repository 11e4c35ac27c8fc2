pub mod chart;
pub mod cli;
pub mod error;
pub mod euler;
pub mod flows;
pub mod forms;
pub mod jets;
pub mod lax;
pub mod normal_form;
pub mod padic;
pub mod poly;
pub mod ring;
pub mod runner;

pub use error::{Error, Result};
