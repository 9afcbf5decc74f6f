pub mod experiments;
pub mod report;

/// Either a library failure or a problem with how the tool was invoked;
/// both exit with code 2, as opposed to code 1 for failed assertions.
#[derive(thiserror::Error, Debug)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] trl_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
