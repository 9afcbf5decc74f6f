use thiserror::Error;

/// Everything that can go wrong across the workbench.
///
/// Most variants correspond to a violated precondition of a specific
/// operation; the message carries the offending values so callers can
/// report them without re-deriving context.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pattern has {vertices} vertices, maximum supported is {max}")]
    PatternTooLarge { vertices: usize, max: usize },

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loops are not supported (vertex {vertex})")]
    SelfLoop { vertex: usize },

    #[error("{what} would have {value} {unit}, guard is {max}")]
    SizeGuard {
        what: &'static str,
        value: u64,
        unit: &'static str,
        max: u64,
    },

    #[error("copy {copy} has an empty side in its edge bipartition")]
    EmptyPart { copy: usize },

    #[error("edge bipartition is inconsistent: {reason}")]
    BadBipartition { reason: String },

    #[error("base graph does not have the unique-copy property for the pattern")]
    NotUniqueCopy,

    #[error("pattern is not its own core; blow up the core instead")]
    PatternNotCore,

    #[error("pattern must be connected with more than one edge")]
    PatternNotUsable,

    #[error("invalid difference set: {reason}")]
    InvalidSet { reason: String },

    #[error("target enumeration capped at {max} vertices, got {m}")]
    TargetBoundTooLarge { m: usize, max: usize },

    #[error("{what} instance too large: {value} > {max}")]
    InstanceTooLarge {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("vertex map incompatible with graphs: {reason}")]
    MapMismatch { reason: String },

    #[error("invalid distribution: {reason}")]
    BadDistribution { reason: String },

    #[error("subset is empty")]
    EmptySubset,

    #[error("not a valid bisection instance: {reason}")]
    BadBisection { reason: String },

    #[error("eta = {eta} out of admissible range {range}")]
    EtaOutOfRange { eta: f64, range: &'static str },

    #[error("no part of the partition is nearly bisected at this eta")]
    NoNearlyBisectedPart,

    #[error("{what} = {value} outside domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("sample would retain zero vertices (n = {n}, t = {t})")]
    SampleSizeZero { n: usize, t: usize },

    #[error("unsupported prime {p}: {reason}")]
    UnsupportedPrime { p: u64, reason: &'static str },

    #[error("operands live in different spaces ({left} vs {right})")]
    SpaceMismatch { left: String, right: String },

    #[error("density value {value} at index {index} outside [0, 1]")]
    BadDensity { index: usize, value: f64 },

    #[error("invalid subspace: {reason}")]
    BadSubspace { reason: String },

    #[error("invalid linear map: {reason}")]
    BadLinearMap { reason: String },

    #[error("expansion targets admit a triangle; audit requires triangle-free targets")]
    TargetNotTriangleFree,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
