pub mod error;
pub mod experiments;
pub mod fit;
pub mod pite;
pub mod qsim;
pub mod quantics;
pub mod rng;
pub mod tci;
pub mod tt;

pub use error::{Error, Result};
pub use tt::{Core, TensorTrain, TruncationSpec, C64};
