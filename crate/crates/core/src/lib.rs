//! Fan-beam millimeter-wave line-scan imaging toolkit.
//!
//! The toolkit covers the full chain of a line-array imager whose spherical
//! element beams are reshaped into fan beams by a cylindrical lens:
//!
//! * [`quasioptics`] — Gaussian-beam propagation and hyperbolic lens design;
//! * [`forward`] — Born-approximation echo synthesis with fan-beam gating;
//! * [`recon`] — quasi-1D holographic range-migration reconstruction,
//!   column-parallel, with a brute-force backprojection oracle;
//! * [`deconv`] — PSF capture from simulated rod targets and Wiener
//!   deconvolution of the transmit/receive-offset blur;
//! * [`planning`] — sampling-criteria validation and FLOP/latency budgets;
//! * [`io`] — the `FBEC` binary container, scene configuration, PGM export;
//! * [`cli`] — the `fanbeam` command-line surface.
//!
//! All numerics are generic over the scalar type through [`scalar::Scalar`]
//! (`f32` or `f64`); the aliases below pin the common double-precision forms.
//! Lengths are millimeters, frequencies GHz, wavenumbers 1/mm.

pub mod cli;
pub mod deconv;
pub mod error;
pub mod forward;
pub mod io;
pub mod planning;
pub mod quasioptics;
pub mod recon;
pub mod scalar;

pub use scalar::Scalar;

/// Double-precision aliases for the main domain types.
pub type BeamParams64 = quasioptics::BeamParams<f64>;
pub type LensSpec64 = quasioptics::LensSpec<f64>;
pub type LensDesign64 = quasioptics::LensDesign<f64>;
pub type Scene64 = forward::Scene<f64>;
pub type ArrayGeometry64 = forward::ArrayGeometry<f64>;
pub type FrequencySweep64 = forward::FrequencySweep<f64>;
pub type FanBeam64 = forward::FanBeam<f64>;
pub type EchoVolume64 = forward::EchoVolume<f64>;
pub type SpectralPlan64 = recon::SpectralPlan<f64>;
pub type ReconGrid64 = recon::ReconGrid<f64>;
pub type ImageVolume64 = recon::ImageVolume<f64>;
pub type PsfBank64 = deconv::PsfBank<f64>;
pub type SamplingPlan64 = planning::SamplingPlan<f64>;
pub type CostReport64 = planning::CostReport<f64>;

/// Single-precision aliases, matching the 32-bit container payload exactly.
pub type EchoVolume32 = forward::EchoVolume<f32>;
pub type ImageVolume32 = recon::ImageVolume<f32>;
pub type PsfBank32 = deconv::PsfBank<f32>;
