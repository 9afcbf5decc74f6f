pub mod error;
pub mod approx;
pub mod arith;
pub mod construct;
pub mod entropy;
pub mod graph;
pub mod io;
pub mod removal;
pub mod sumfree;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
