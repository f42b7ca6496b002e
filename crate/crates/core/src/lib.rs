pub mod certify;
pub mod chevalley;
pub mod elements;
pub mod error;
pub mod exec;
pub mod groupring;
pub mod linalg;
pub mod pipeline;
pub mod replicate;
pub mod rootsys;
pub mod sos;

pub use error::{Error, Result};
pub use exec::Exec;
