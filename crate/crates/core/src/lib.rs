pub mod error;
pub mod gf2;
pub mod oracle;
pub mod parallel;
pub mod runner;
pub mod schemes;
pub mod seed;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
