pub mod detection;
pub mod error;
pub mod fock_oracle;
pub mod interferometer;
pub mod metrology;
pub mod states;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64;
