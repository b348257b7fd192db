pub mod channels;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod infotheory;
pub mod optimize;
pub mod oracle;
pub mod qmatrix;
pub mod supermaps;

pub use error::{Error, Result};
