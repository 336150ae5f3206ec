//! Error types for the toolkit, one enum per subsystem.

use thiserror::Error;

/// Lens design failures.
#[derive(Debug, Error)]
pub enum LensError {
    /// The requested waist magnification cannot be reached at this object
    /// distance: the focal-length discriminant went negative.
    #[error("requested magnification unreachable at this object distance (discriminant {discriminant:.3})")]
    NegativeDiscriminant { discriminant: f64 },
    #[error("invalid lens spec: {0}")]
    InvalidSpec(String),
}

/// Echo synthesis failures.
#[derive(Debug, Error)]
pub enum EchoError {
    /// A scatterer sits on (or behind) the array plane, where the spherical
    /// spreading term is singular.
    #[error("scatterer at z = {z} mm lies on or behind the array plane")]
    ScattererAtArrayPlane { z: f64 },
    /// SNR is undefined on an all-zero volume.
    #[error("cannot add noise: echo volume has zero signal power")]
    ZeroSignal,
    #[error("invalid {what}: {why}")]
    InvalidInput { what: &'static str, why: String },
}

/// Reconstruction failures.
#[derive(Debug, Error)]
pub enum ReconError {
    /// Echo, spectral plan, and reconstruction grid dimensions disagree.
    #[error("plan mismatch: {0}")]
    PlanMismatch(String),
    /// dB mapping is undefined on an all-zero image.
    #[error("image is identically zero; dB display mapping undefined")]
    AllZeroImage,
}

/// Deconvolution failures.
#[derive(Debug, Error)]
pub enum DeconvError {
    #[error("PSF bank is empty")]
    EmptyBank,
    #[error("regularization epsilon must be positive (got {0})")]
    EpsilonNonPositive(f64),
    /// FWHM is undefined without a unique interior maximum.
    #[error("profile has no usable peak")]
    NoPeak,
    #[error("image x-extent {image} is shorter than the PSF ({psf} taps)")]
    ImageShorterThanPsf { image: usize, psf: usize },
    #[error(transparent)]
    Echo(#[from] EchoError),
    #[error(transparent)]
    Recon(#[from] ReconError),
}

/// Binary container failures.
#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("bad magic: expected \"FBEC\", found {found:?}")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported container version {found} (supported: {supported})")]
    VersionUnsupported { found: u16, supported: u16 },
    #[error("unknown record tag {found:?}")]
    UnknownRecordTag { found: [u8; 4] },
    #[error("record tag {found:?} does not match the requested {expected:?}")]
    WrongRecordType { expected: [u8; 4], found: [u8; 4] },
    #[error("payload truncated: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: u64, found: u64 },
    #[error("dimension triple {dims:?} overflows the payload size")]
    DimensionOverflow { dims: [u32; 3] },
    #[error("payload length {found} does not match dimensions ({expected} values)")]
    PayloadMismatch { expected: u64, found: u64 },
    #[error("header metadata inconsistent with dimensions: {0}")]
    MetadataInconsistent(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Scene configuration failures.
#[derive(Debug, Error)]
pub enum SceneConfigError {
    // The parse error carries the offending line/column from the TOML parser.
    #[error("scene config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported scene config version {found} (supported: {supported})")]
    VersionUnsupported { found: u32, supported: u32 },
    #[error("invalid scene config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
