use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("incomparable lengths: {0} vs {1}")]
    IncomparableLengths(usize, usize),

    #[error("enumeration too large: depth {0} exceeds 4")]
    EnumerationTooLarge(usize),

    #[error("invalid coupling spec: {0}")]
    InvalidSpec(String),

    #[error("class 𝓔 check defined for Ising-type only")]
    NotIsingType,

    #[error("dual not implemented for non-product potentials")]
    DualNotImplemented,

    #[error("volume too large for exact enumeration: n = {0} (allowed 1..=24)")]
    VolumeOutOfRange(usize),

    #[error("domination requires increasing f")]
    NotIncreasing,

    #[error("depth cap exceeded; increase cap or lower K (needed {needed}, cap {cap})")]
    DepthCapExceeded { needed: usize, cap: usize },

    #[error("symmetry check requires a mirrored potential")]
    NotMirrored,

    #[error("potential is not class 𝓔 certified")]
    NotClassE,

    #[error("kernel undefined off X̃: configuration tail must alternate for gamma <= 2")]
    KernelUndefined,

    #[error("independence not established: {0}")]
    IndependenceNotEstablished(String),

    #[error("bound derived for gamma>2 regime (got gamma = {0})")]
    BoundRegime(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
