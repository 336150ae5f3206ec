//! Synthetic echo generation for point-scatterer scenes.
//!
//! Under the Born approximation each scatterer contributes an independent
//! spherical-wave return; the fan beam gates contributions in the scan (x)
//! direction so that each array column only sees targets near its own axis.
//! Transmit and receive elements may be co-located or separated by a small
//! horizontal interval; the bistatic two-way path is computed exactly.

use ndarray::{Array2, Array3};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::EchoError;
use crate::quasioptics::BeamParams;
use crate::scalar::{real, Scalar, C_MM_PER_S};

/// Two-way gate floor below which a scatterer is skipped for a column.
/// `exp(-2 dx^2 / w^2) < 1e-4` corresponds to |dx| beyond about 2.1 w.
pub const GATE_FLOOR: f64 = 1e-4;

/// A point scatterer: position in mm, complex reflectivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scatterer<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub reflectivity: Complex<T>,
}

impl<T: Scalar> Scatterer<T> {
    pub fn unit(x: T, y: T, z: T) -> Self {
        Self {
            x,
            y,
            z,
            reflectivity: Complex::new(T::one(), T::zero()),
        }
    }
}

/// A set of point scatterers in front of the array plane (z > 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene<T> {
    pub scatterers: Vec<Scatterer<T>>,
}

impl<T> Default for Scene<T> {
    fn default() -> Self {
        Self {
            scatterers: Vec::new(),
        }
    }
}

impl<T: Scalar> Scene<T> {
    pub fn new(scatterers: Vec<Scatterer<T>>) -> Self {
        Self { scatterers }
    }

    pub fn is_empty(&self) -> bool {
        self.scatterers.is_empty()
    }

    /// Smallest target depth, if the scene is non-empty.
    pub fn min_z(&self) -> Option<T> {
        self.scatterers
            .iter()
            .map(|s| s.z)
            .fold(None, |acc, z| match acc {
                None => Some(z),
                Some(a) => Some(if z < a { z } else { a }),
            })
    }

    pub fn extend(&mut self, other: &Scene<T>) {
        self.scatterers.extend_from_slice(&other.scatterers);
    }

    /// Append a metal-rod simulant: a dense line of scatterers parallel to
    /// the array at fixed (x = 0, z), spaced by `pitch` over `y_span`.
    pub fn add_rod(&mut self, z: T, y_span: T, pitch: T, reflectivity: Complex<T>) {
        assert!(pitch > T::zero(), "rod pitch must be positive");
        let count = ((y_span / pitch).to_f64() + 1e-9).floor() as usize + 1;
        let start = -pitch * real::<T>((count - 1) as f64) / real::<T>(2.0);
        for i in 0..count {
            self.scatterers.push(Scatterer {
                x: T::zero(),
                y: start + pitch * real::<T>(i as f64),
                z,
                reflectivity,
            });
        }
    }
}

/// Build a unit-reflectivity rod scene at depth `z`. The sample pitch should
/// be at most a quarter of the shortest wavelength so the rod behaves as a
/// continuous line target.
pub fn rod_to_scene<T: Scalar>(z: T, y_span: T, pitch: T) -> Scene<T> {
    let mut scene = Scene::default();
    scene.add_rod(z, y_span, pitch, Complex::new(T::one(), T::zero()));
    scene
}

/// Sampling geometry of the line array and the belt motion.
///
/// Element positions run along y with uniform pitch; the belt advances the
/// target in x, sampled every `x_step`. The array plane is z = 0. Transmit
/// and receive rows may be separated horizontally: the transmitter sits at
/// `x - tx_rx_offset/2` and the receiver at `x + tx_rx_offset/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry<T> {
    pub y_start: T,
    pub y_pitch: T,
    pub n_y: usize,
    pub x_start: T,
    pub x_step: T,
    pub n_x: usize,
    pub tx_rx_offset: T,
}

impl<T: Scalar> ArrayGeometry<T> {
    /// Array of `length` mm centered on y = 0 with the given pitch, scanning
    /// `n_x` columns centered on x = 0.
    pub fn centered(length: T, y_pitch: T, n_x: usize, x_step: T) -> Self {
        let n_y = ((length / y_pitch).to_f64() + 1e-9).floor() as usize + 1;
        let y_start = -y_pitch * real::<T>((n_y - 1) as f64) / real::<T>(2.0);
        let x_start = -x_step * real::<T>((n_x - 1) as f64) / real::<T>(2.0);
        Self {
            y_start,
            y_pitch,
            n_y,
            x_start,
            x_step,
            n_x,
            tx_rx_offset: T::zero(),
        }
    }

    pub fn with_tx_rx_offset(mut self, offset: T) -> Self {
        self.tx_rx_offset = offset;
        self
    }

    pub fn element_y_positions(&self) -> Vec<T> {
        (0..self.n_y)
            .map(|i| self.y_start + self.y_pitch * real::<T>(i as f64))
            .collect()
    }

    pub fn x_positions(&self) -> Vec<T> {
        (0..self.n_x)
            .map(|i| self.x_start + self.x_step * real::<T>(i as f64))
            .collect()
    }

    pub fn validate(&self) -> Result<(), EchoError> {
        if self.n_y == 0 || self.n_x == 0 {
            return Err(EchoError::InvalidInput {
                what: "geometry",
                why: "element and column counts must be at least 1".into(),
            });
        }
        if !(self.y_pitch > T::zero()) || !(self.x_step > T::zero()) {
            return Err(EchoError::InvalidInput {
                what: "geometry",
                why: "pitch and x step must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Stepped-frequency sweep, all frequencies in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencySweep<T> {
    pub f_start_ghz: T,
    pub f_stop_ghz: T,
    pub f_step_ghz: T,
}

impl<T: Scalar> FrequencySweep<T> {
    pub fn new(f_start_ghz: T, f_stop_ghz: T, f_step_ghz: T) -> Self {
        Self {
            f_start_ghz,
            f_stop_ghz,
            f_step_ghz,
        }
    }

    pub fn validate(&self) -> Result<(), EchoError> {
        if !(self.f_start_ghz > T::zero())
            || !(self.f_stop_ghz > self.f_start_ghz)
            || !(self.f_step_ghz > T::zero())
        {
            return Err(EchoError::InvalidInput {
                what: "sweep",
                why: "need f_stop > f_start > 0 and f_step > 0".into(),
            });
        }
        Ok(())
    }

    /// Number of tones: the sweep covers [f_start, f_stop] inclusive as far
    /// as the step allows.
    pub fn count(&self) -> usize {
        let span = (self.f_stop_ghz - self.f_start_ghz) / self.f_step_ghz;
        (span.to_f64() + 1e-9).floor() as usize + 1
    }

    pub fn frequencies_ghz(&self) -> Vec<T> {
        (0..self.count())
            .map(|i| self.f_start_ghz + self.f_step_ghz * real::<T>(i as f64))
            .collect()
    }

    /// Wavenumbers k = 2 pi f / c in 1/mm, one per tone.
    pub fn wavenumbers(&self) -> Vec<T> {
        self.frequencies_ghz()
            .iter()
            .map(|&f| wavenumber_per_mm(f))
            .collect()
    }

    /// Wavenumber step between adjacent tones (1/mm).
    pub fn wavenumber_step(&self) -> T {
        wavenumber_per_mm(self.f_step_ghz)
    }

    /// Center wavenumber of the band (1/mm).
    pub fn center_wavenumber(&self) -> T {
        let f_last = self.f_start_ghz + self.f_step_ghz * real::<T>((self.count() - 1) as f64);
        wavenumber_per_mm((self.f_start_ghz + f_last) / real::<T>(2.0))
    }

    /// Shortest wavelength in the band (mm).
    pub fn min_wavelength_mm(&self) -> T {
        let f_last = self.f_start_ghz + self.f_step_ghz * real::<T>((self.count() - 1) as f64);
        real::<T>(C_MM_PER_S / 1e9) / f_last
    }
}

/// k = 2 pi f / c for f in GHz, result in 1/mm.
pub fn wavenumber_per_mm<T: Scalar>(f_ghz: T) -> T {
    real::<T>(2.0) * T::PI() * f_ghz * real::<T>(1e9 / C_MM_PER_S)
}

/// The fan beam produced by the cylindrical lens, described by its image-side
/// waist, wavelength, and the depth of the focal plane in array coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanBeam<T> {
    /// Beam waist radius at the focal plane (mm).
    pub waist: T,
    /// Design wavelength (mm).
    pub wavelength: T,
    /// Depth of the focal plane in front of the array (mm).
    pub focal_distance: T,
}

impl<T: Scalar> FanBeam<T> {
    pub fn new(waist: T, wavelength: T, focal_distance: T) -> Self {
        Self {
            waist,
            wavelength,
            focal_distance,
        }
    }

    /// Fan beam of a completed lens design: image waist at the predicted
    /// focal plane.
    pub fn from_lens_design(design: &crate::quasioptics::LensDesign<T>) -> Self {
        Self {
            waist: design.spec.image_waist,
            wavelength: design.spec.wavelength,
            focal_distance: design.predicted_focal_plane,
        }
    }

    /// Local beam radius at depth `z`.
    pub fn radius_at(&self, z: T) -> T {
        BeamParams::new(self.waist, self.wavelength, self.focal_distance).radius_at(z)
    }
}

/// One-way field amplitude of the fan beam at lateral offset `dx` from its
/// axis, at depth `z`: `exp(-dx^2 / w(z)^2)`, 1 on axis.
pub fn beam_weight<T: Scalar>(dx: T, z: T, beam: &FanBeam<T>) -> T {
    let w = beam.radius_at(z);
    (-dx * dx / (w * w)).exp()
}

/// Complex scattered-field samples on the (x position, element, frequency)
/// grid, with the geometry that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoVolume<T> {
    /// Samples indexed [x index, element index, frequency index].
    pub data: Array3<Complex<T>>,
    pub geometry: ArrayGeometry<T>,
    pub sweep: FrequencySweep<T>,
    pub beam: FanBeam<T>,
    /// Seed of the noise draw applied to this volume; 0 when noiseless.
    pub noise_seed: u64,
    /// Suggested reconstruction reference depth, carried in the container
    /// header; 0 when unset.
    pub z0_hint: T,
}

impl<T: Scalar> EchoVolume<T> {
    /// Mean per-sample signal power.
    pub fn mean_power(&self) -> T {
        let n = self.data.len();
        let total: T = self.data.iter().map(|c| c.norm_sqr()).sum();
        total / real::<T>(n as f64)
    }

    /// Stable hash of the acquisition metadata (dimensions, geometry, sweep,
    /// beam, noise seed). Ties derived images back to their source echo.
    pub fn metadata_hash(&self) -> u64 {
        let (n_x, n_y, n_f) = self.data.dim();
        let mut h = Fnv1a::new();
        for d in [n_x as u64, n_y as u64, n_f as u64] {
            h.write_u64(d);
        }
        for v in [
            self.geometry.y_start.to_f64(),
            self.geometry.y_pitch.to_f64(),
            self.geometry.x_start.to_f64(),
            self.geometry.x_step.to_f64(),
            self.geometry.tx_rx_offset.to_f64(),
            self.sweep.f_start_ghz.to_f64(),
            self.sweep.f_stop_ghz.to_f64(),
            self.sweep.f_step_ghz.to_f64(),
            self.beam.waist.to_f64(),
            self.beam.wavelength.to_f64(),
            self.beam.focal_distance.to_f64(),
        ] {
            h.write_u64(v.to_bits());
        }
        h.write_u64(self.noise_seed);
        h.finish()
    }
}

/// 64-bit FNV-1a, kept local so the hash is stable across toolchains.
pub(crate) struct Fnv1a(u64);

impl Fnv1a {
    pub fn new() -> Self {
        Self(0xcbf29ce484222325)
    }

    pub fn write_u64(&mut self, v: u64) {
        for byte in v.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

/// Synthesize the echo volume for a scene.
///
/// For each column x, transmitter at `x - offset/2` and receiver at
/// `x + offset/2`, the return from a scatterer with reflectivity `f` is
///
/// `g_t g_r * f * exp(-j k (r_t + r_r)) / (r_t r_r)`
///
/// where `g_t`, `g_r` gate each one-way path by the fan beam around its own
/// element and `r_t`, `r_r` are the exact element-to-scatterer distances.
/// With zero offset this reduces to `f exp(-j 2 k r) / r^2` times the
/// two-way gate. Scatterers whose two-way gate falls below [`GATE_FLOOR`]
/// are skipped. Columns are simulated in parallel; the result does not
/// depend on the worker count.
pub fn simulate_echo<T: Scalar>(
    scene: &Scene<T>,
    geometry: &ArrayGeometry<T>,
    sweep: &FrequencySweep<T>,
    beam: &FanBeam<T>,
) -> Result<EchoVolume<T>, EchoError> {
    geometry.validate()?;
    sweep.validate()?;
    for s in &scene.scatterers {
        if s.z <= T::zero() {
            return Err(EchoError::ScattererAtArrayPlane { z: s.z.to_f64() });
        }
    }

    let n_y = geometry.n_y;
    let n_f = sweep.count();
    let ys = geometry.element_y_positions();
    let xs = geometry.x_positions();
    let k0 = sweep.wavenumbers()[0];
    let dk = sweep.wavenumber_step();
    let half_offset = geometry.tx_rx_offset / real::<T>(2.0);
    let gate_floor = real::<T>(GATE_FLOOR);

    let columns: Vec<Array2<Complex<T>>> = xs
        .par_iter()
        .map(|&x_col| {
            let mut col = Array2::<Complex<T>>::zeros((n_y, n_f));
            let x_tx = x_col - half_offset;
            let x_rx = x_col + half_offset;
            for s in &scene.scatterers {
                let gate = beam_weight(s.x - x_tx, s.z, beam) * beam_weight(s.x - x_rx, s.z, beam);
                if gate < gate_floor {
                    continue;
                }
                let dx_tx = s.x - x_tx;
                let dx_rx = s.x - x_rx;
                for (iy, &y0) in ys.iter().enumerate() {
                    let dy = s.y - y0;
                    let r_t = (dx_tx * dx_tx + dy * dy + s.z * s.z).sqrt();
                    let r_r = (dx_rx * dx_rx + dy * dy + s.z * s.z).sqrt();
                    let round_trip = r_t + r_r;
                    let amp = s.reflectivity * (gate / (r_t * r_r));
                    // March over tones with a unit rotator instead of a
                    // sin/cos pair per sample.
                    let mut phasor = Complex::from_polar(T::one(), -k0 * round_trip);
                    let rotator = Complex::from_polar(T::one(), -dk * round_trip);
                    for i in 0..n_f {
                        col[[iy, i]] = col[[iy, i]] + amp * phasor;
                        phasor = phasor * rotator;
                    }
                }
            }
            col
        })
        .collect();

    let mut data = Array3::<Complex<T>>::zeros((geometry.n_x, n_y, n_f));
    for (ix, col) in columns.into_iter().enumerate() {
        data.index_axis_mut(ndarray::Axis(0), ix).assign(&col);
    }

    Ok(EchoVolume {
        data,
        geometry: *geometry,
        sweep: *sweep,
        beam: *beam,
        noise_seed: 0,
        z0_hint: T::zero(),
    })
}

/// Add circularly-symmetric complex Gaussian noise at the requested SNR.
///
/// `snr_db = +inf` is the no-noise sentinel and returns the volume
/// unchanged. The draw is deterministic for a given seed, independent of
/// platform.
pub fn add_noise<T: Scalar>(
    echo: &EchoVolume<T>,
    snr_db: f64,
    seed: u64,
) -> Result<EchoVolume<T>, EchoError> {
    if snr_db.is_infinite() && snr_db > 0.0 {
        return Ok(echo.clone());
    }
    let signal_power = echo.mean_power().to_f64();
    if signal_power <= 0.0 {
        return Err(EchoError::ZeroSignal);
    }
    let noise_power = signal_power / 10f64.powf(snr_db / 10.0);
    let sigma = (noise_power / 2.0).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut out = echo.clone();
    for v in out.data.iter_mut() {
        let re: f64 = normal.sample(&mut rng);
        let im: f64 = normal.sample(&mut rng);
        *v = *v + Complex::new(real::<T>(re * sigma), real::<T>(im * sigma));
    }
    out.noise_seed = seed;
    Ok(out)
}
