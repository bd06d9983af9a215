pub mod cli;
pub mod convergence;
pub mod error;
pub mod function_space;
pub mod linalg;
pub mod multi_align;
pub mod numdiff;
pub mod objectives;
pub mod registry;
pub mod sampling;
pub mod toy_games;
pub mod trajectory;
pub mod verify;

pub use error::{Error, Result};
