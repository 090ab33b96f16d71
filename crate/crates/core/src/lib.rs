pub mod arith;
pub mod cli;
pub mod cubic;
pub mod descent;
pub mod dossier;
pub mod eisenstein;
pub mod embed;
pub mod error;
pub mod factor;
pub mod forms;
pub mod lift;
pub mod local;
pub mod pairing;
pub mod padic;
pub mod points;
pub mod tower;

pub use error::{Error, Result};
