//! Quasi-1D holographic range-migration reconstruction.
//!
//! Because the fan beam restricts each scan column to its own slice of the
//! target, the 3-D inversion factors into independent per-column 2-D
//! problems over (element, frequency). Each column runs the wavenumber-domain
//! chain: conjugate, transform along the array, reference-depth phase shift,
//! Stolt resampling onto a uniform spatial-frequency grid via the dispersion
//! relation `kz = sqrt(4 k^2 - ky^2)`, inverse transforms to (y, z), and an
//! amplitude/phase post-factor. Columns are reconstructed in parallel with
//! results independent of the worker count.
//!
//! A brute-force backprojection oracle (direct matched-filter summation with
//! no transforms or interpolation) is provided for correctness checks on
//! small grids.
//!
//! Transforms are unitarily scaled throughout so Parseval checks are exact
//! and magnitudes are grid-size stable.

use std::sync::Arc;

use ndarray::{Array2, Array3, ArrayView2, Axis};
use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::ReconError;
use crate::forward::EchoVolume;
use crate::scalar::{real, Scalar};

/// Interpolation kernel used by the Stolt resampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoltInterp {
    /// Two-point linear interpolation (default).
    Linear,
    /// 8-tap Hann-windowed sinc.
    Sinc8,
}

impl std::str::FromStr for StoltInterp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Self::Linear),
            "sinc" => Ok(Self::Sinc8),
            other => Err(format!("unknown stolt mode {other:?} (linear|sinc)")),
        }
    }
}

/// Reconstruction knobs beyond the geometry itself.
#[derive(Debug, Clone, Copy)]
pub struct ReconOptions {
    pub interp: StoltInterp,
    /// Apply the Stolt change-of-variables weight |dk/dkz| = kz / (4 k).
    pub jacobian: bool,
    /// Hann window over element and frequency axes before the transforms.
    pub window: bool,
}

impl Default for ReconOptions {
    fn default() -> Self {
        Self {
            interp: StoltInterp::Linear,
            jacobian: true,
            window: false,
        }
    }
}

/// Frequency-domain bookkeeping for one column geometry: wavenumber grids,
/// the uniform Stolt target grid, and shared FFT plans. Immutable, cheap to
/// share across workers.
pub struct SpectralPlan<T> {
    pub n_y: usize,
    pub n_f: usize,
    pub n_z: usize,
    /// Measured wavenumbers k, one per tone (1/mm).
    pub k: Vec<T>,
    /// Array-direction spatial wavenumbers in FFT bin order (1/mm).
    pub ky: Vec<T>,
    /// Uniform kz target grid spanning [2 k_min, 2 k_max] (1/mm).
    pub kz: Vec<T>,
    /// Center wavenumber of the sweep (1/mm).
    pub k0: T,
    /// Center wavelength (mm).
    pub lambda0: T,
    pub options: ReconOptions,
    fft_y: Arc<dyn Fft<T>>,
    ifft_y: Arc<dyn Fft<T>>,
    fft_z: Arc<dyn Fft<T>>,
}

impl<T: Scalar> SpectralPlan<T> {
    /// Build the plan for a sampling geometry and sweep.
    pub fn new(
        geometry: &crate::forward::ArrayGeometry<T>,
        sweep: &crate::forward::FrequencySweep<T>,
        options: ReconOptions,
    ) -> Result<Self, ReconError> {
        let n_y = geometry.n_y;
        let n_f = sweep.count();
        if n_y == 0 {
            return Err(ReconError::PlanMismatch("array has no elements".into()));
        }
        if n_f < 2 {
            return Err(ReconError::PlanMismatch(
                "sweep needs at least two tones for range imaging".into(),
            ));
        }
        let k = sweep.wavenumbers();
        let k_min = k[0];
        let k_max = k[n_f - 1];

        // FFT-ordered ky bins: 2 pi m / (N dy) with m wrapped to signed.
        let dky = real::<T>(2.0) * T::PI() / (geometry.y_pitch * real::<T>(n_y as f64));
        let ky = (0..n_y)
            .map(|m| {
                let signed = if m <= n_y / 2 {
                    m as f64
                } else {
                    m as f64 - n_y as f64
                };
                dky * real::<T>(signed)
            })
            .collect();

        // Uniform kz targets over the fully-populated band, sized to the next
        // power of two above the tone count for transform efficiency.
        let n_z = n_f.next_power_of_two();
        let two = real::<T>(2.0);
        let kz_start = two * k_min;
        let kz_step = two * (k_max - k_min) / real::<T>((n_z - 1) as f64);
        let kz = (0..n_z)
            .map(|j| kz_start + kz_step * real::<T>(j as f64))
            .collect();

        let mut planner = FftPlanner::new();
        Ok(Self {
            n_y,
            n_f,
            n_z,
            k,
            ky,
            kz,
            k0: sweep.center_wavenumber(),
            lambda0: two * T::PI() / sweep.center_wavenumber(),
            options,
            fft_y: planner.plan_fft(n_y, FftDirection::Forward),
            ifft_y: planner.plan_fft(n_y, FftDirection::Inverse),
            // The spectrum-to-space transform along kz; with the conjugated
            // input the focused depth lands at z' = z - z0 >= 0 with this
            // direction.
            fft_z: planner.plan_fft(n_z, FftDirection::Forward),
        })
    }

    pub fn for_echo(echo: &EchoVolume<T>, options: ReconOptions) -> Result<Self, ReconError> {
        Self::new(&echo.geometry, &echo.sweep, options)
    }

    /// Depth sample spacing of the natural image grid: `2 pi / (N_z dkz)`.
    pub fn z_step(&self) -> T {
        let dkz = self.kz[1] - self.kz[0];
        real::<T>(2.0) * T::PI() / (real::<T>(self.n_z as f64) * dkz)
    }

    fn k_min(&self) -> T {
        self.k[0]
    }

    fn k_max(&self) -> T {
        self.k[self.n_f - 1]
    }

    fn k_step(&self) -> T {
        self.k[1] - self.k[0]
    }
}

impl<T> std::fmt::Debug for SpectralPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan")
            .field("n_y", &self.n_y)
            .field("n_f", &self.n_f)
            .field("n_z", &self.n_z)
            .finish()
    }
}

/// Voxel grid of the reconstructed image: y centers match the array elements,
/// z centers are uniform starting at the reference depth z0 (the front
/// surface of the target region).
#[derive(Debug, Clone, PartialEq)]
pub struct ReconGrid<T> {
    pub y_centers: Vec<T>,
    pub z_centers: Vec<T>,
    pub z0: T,
}

impl<T: Scalar> ReconGrid<T> {
    /// The natural grid of a plan: element positions in y, FFT depth bins
    /// `z0 + n dz` in z.
    pub fn from_plan(
        plan: &SpectralPlan<T>,
        geometry: &crate::forward::ArrayGeometry<T>,
        z0: T,
    ) -> Self {
        let dz = plan.z_step();
        Self {
            y_centers: geometry.element_y_positions(),
            z_centers: (0..plan.n_z)
                .map(|n| z0 + dz * real::<T>(n as f64))
                .collect(),
            z0,
        }
    }

    pub fn n_y(&self) -> usize {
        self.y_centers.len()
    }

    pub fn n_z(&self) -> usize {
        self.z_centers.len()
    }

    fn check_plan(&self, plan: &SpectralPlan<T>) -> Result<(), ReconError> {
        if self.n_y() != plan.n_y || self.n_z() != plan.n_z {
            return Err(ReconError::PlanMismatch(format!(
                "grid is {} x {} voxels but plan expects {} x {}",
                self.n_y(),
                self.n_z(),
                plan.n_y,
                plan.n_z
            )));
        }
        let dz = plan.z_step();
        let tol = dz * real::<T>(1e-6);
        if (self.z_centers[0] - self.z0).abs() > tol {
            return Err(ReconError::PlanMismatch(
                "grid z centers must start at z0".into(),
            ));
        }
        if self.n_z() > 1 && (self.z_centers[1] - self.z_centers[0] - dz).abs() > tol {
            return Err(ReconError::PlanMismatch(format!(
                "grid z spacing {} does not match the plan's {}",
                (self.z_centers[1] - self.z_centers[0]).to_f64(),
                dz.to_f64()
            )));
        }
        Ok(())
    }
}

/// Default reference depth: 100 mm in front of the nearest target when the
/// scene is known, else the array plane.
pub fn default_z0<T: Scalar>(scene_min_z: Option<T>) -> T {
    match scene_min_z {
        Some(z) => (z - real::<T>(100.0)).max(T::zero()),
        None => T::zero(),
    }
}

/// Complex reflectivity estimate on an (x, y, z) voxel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageVolume<T> {
    /// Voxels indexed [x index, y index, z index].
    pub data: Array3<Complex<T>>,
    pub grid: ReconGrid<T>,
    /// Hash of the source echo's metadata, for provenance tracking.
    pub provenance: u64,
}

fn unitary_inplace<T: Scalar>(
    fft: &Arc<dyn Fft<T>>,
    buf: &mut [Complex<T>],
    scratch: &mut [Complex<T>],
) {
    fft.process_with_scratch(buf, &mut scratch[..fft.get_inplace_scratch_len()]);
    let scale = T::one() / real::<T>(fft.len() as f64).sqrt();
    for v in buf.iter_mut() {
        *v = Complex::new(v.re * scale, v.im * scale);
    }
}

fn hann<T: Scalar>(n: usize) -> Vec<T> {
    if n == 1 {
        return vec![T::one()];
    }
    let half = real::<T>(0.5);
    (0..n)
        .map(|i| {
            half - half
                * (real::<T>(2.0) * T::PI() * real::<T>(i as f64) / real::<T>((n - 1) as f64))
                    .cos()
        })
        .collect()
}

/// Resample a (ky, k) spectrum onto the plan's uniform (ky, kz) grid along
/// the dispersion curve `kz = sqrt(4 k^2 - ky^2)`.
///
/// Each target (ky, kz) pulls from the measured wavenumber
/// `k* = sqrt(kz^2 + ky^2) / 2`; targets mapping outside the measured band
/// are zero, and rows that are entirely evanescent (|ky| > 2 k_max) come out
/// all zero. When enabled, the change-of-variables weight `kz / (4 k*)` is
/// applied.
pub fn stolt_resample<T: Scalar>(
    spectrum: &Array2<Complex<T>>,
    plan: &SpectralPlan<T>,
) -> Array2<Complex<T>> {
    assert_eq!(
        spectrum.dim(),
        (plan.n_y, plan.n_f),
        "spectrum dimensions must match the plan"
    );
    let mut out = Array2::<Complex<T>>::zeros((plan.n_y, plan.n_z));
    let k_min = plan.k_min();
    let k_max = plan.k_max();
    let dk = plan.k_step();
    let four = real::<T>(4.0);
    let half = real::<T>(0.5);

    for (m, &ky) in plan.ky.iter().enumerate() {
        let row = spectrum.row(m);
        let mut out_row = out.row_mut(m);
        for (j, &kz) in plan.kz.iter().enumerate() {
            let k_star = (kz * kz + ky * ky).sqrt() * half;
            if k_star < k_min || k_star > k_max {
                continue;
            }
            let t = (k_star - k_min) / dk;
            let value = match plan.options.interp {
                StoltInterp::Linear => {
                    let i0 = (t.to_f64().floor() as usize).min(plan.n_f - 1);
                    let frac = t - real::<T>(i0 as f64);
                    if i0 + 1 < plan.n_f {
                        row[i0] * (T::one() - frac) + row[i0 + 1] * frac
                    } else {
                        row[i0]
                    }
                }
                StoltInterp::Sinc8 => windowed_sinc_sample(&row, t),
            };
            let weight = if plan.options.jacobian {
                kz / (four * k_star)
            } else {
                T::one()
            };
            out_row[j] = value * weight;
        }
    }
    out
}

/// 8-tap Hann-windowed sinc interpolation at fractional index `t` of a
/// uniformly sampled row, weights normalized to unit sum.
fn windowed_sinc_sample<T: Scalar>(row: &ndarray::ArrayView1<Complex<T>>, t: T) -> Complex<T> {
    const HALF_TAPS: i64 = 4;
    let n = row.len() as i64;
    let t_f = t.to_f64();
    let center = t_f.ceil() as i64;
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut weight_sum = T::zero();
    for i in (center - HALF_TAPS)..(center + HALF_TAPS) {
        if i < 0 || i >= n {
            continue;
        }
        let u = t_f - i as f64;
        if u.abs() >= HALF_TAPS as f64 {
            continue;
        }
        let sinc = if u.abs() < 1e-12 {
            1.0
        } else {
            (std::f64::consts::PI * u).sin() / (std::f64::consts::PI * u)
        };
        let window = 0.5 + 0.5 * (std::f64::consts::PI * u / HALF_TAPS as f64).cos();
        let w = real::<T>(sinc * window);
        acc = acc + row[i as usize] * w;
        weight_sum = weight_sum + w;
    }
    if weight_sum.abs() > real::<T>(1e-12) {
        acc / weight_sum
    } else {
        Complex::new(T::zero(), T::zero())
    }
}

/// Reconstruct one column: complex image f(y, z) from the column's
/// (element, frequency) samples.
///
/// Steps, in order: conjugate (optionally Hann-windowed), transform over the
/// element axis, multiply by `exp(-j kz z0)`, Stolt-resample to uniform kz,
/// inverse transform over ky, transform over kz to depth, multiply by
/// `(2 z / (j lambda0)) exp(-j k0 (z - z0))`, conjugate. Evanescent spectral
/// components contribute zero.
pub fn reconstruct_column<T: Scalar>(
    column: ArrayView2<Complex<T>>,
    plan: &SpectralPlan<T>,
    grid: &ReconGrid<T>,
) -> Result<Array2<Complex<T>>, ReconError> {
    if column.dim() != (plan.n_y, plan.n_f) {
        return Err(ReconError::PlanMismatch(format!(
            "column is {:?} but plan expects ({}, {})",
            column.dim(),
            plan.n_y,
            plan.n_f
        )));
    }
    grid.check_plan(plan)?;

    let n_y = plan.n_y;
    let n_f = plan.n_f;
    let n_z = plan.n_z;
    let four = real::<T>(4.0);

    let scratch_len = plan
        .fft_y
        .get_inplace_scratch_len()
        .max(plan.ifft_y.get_inplace_scratch_len())
        .max(plan.fft_z.get_inplace_scratch_len());
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); scratch_len];

    // Conjugated input, optionally windowed.
    let mut spectrum = Array2::<Complex<T>>::zeros((n_y, n_f));
    if plan.options.window {
        let wy = hann::<T>(n_y);
        let wk = hann::<T>(n_f);
        for iy in 0..n_y {
            for i in 0..n_f {
                spectrum[[iy, i]] = column[[iy, i]].conj() * (wy[iy] * wk[i]);
            }
        }
    } else {
        for iy in 0..n_y {
            for i in 0..n_f {
                spectrum[[iy, i]] = column[[iy, i]].conj();
            }
        }
    }

    // Transform along the array for every tone.
    let mut lane = vec![Complex::new(T::zero(), T::zero()); n_y];
    for i in 0..n_f {
        for iy in 0..n_y {
            lane[iy] = spectrum[[iy, i]];
        }
        unitary_inplace(&plan.fft_y, &mut lane, &mut scratch);
        for iy in 0..n_y {
            spectrum[[iy, i]] = lane[iy];
        }
    }

    // Reference-depth phase shift; evanescent entries are zeroed outright.
    for (m, &ky) in plan.ky.iter().enumerate() {
        for (i, &k) in plan.k.iter().enumerate() {
            let kz_sq = four * k * k - ky * ky;
            if kz_sq <= T::zero() {
                spectrum[[m, i]] = Complex::new(T::zero(), T::zero());
            } else {
                let kz = kz_sq.sqrt();
                let shift = Complex::from_polar(T::one(), -kz * grid.z0);
                spectrum[[m, i]] = spectrum[[m, i]] * shift;
            }
        }
    }

    let mut image = stolt_resample(&spectrum, plan);

    // Back to element space.
    let mut lane_z = vec![Complex::new(T::zero(), T::zero()); n_y];
    for j in 0..n_z {
        for m in 0..n_y {
            lane_z[m] = image[[m, j]];
        }
        unitary_inplace(&plan.ifft_y, &mut lane_z, &mut scratch);
        for m in 0..n_y {
            image[[m, j]] = lane_z[m];
        }
    }

    // Spectrum to depth along each element row.
    let mut row = vec![Complex::new(T::zero(), T::zero()); n_z];
    for iy in 0..n_y {
        for j in 0..n_z {
            row[j] = image[[iy, j]];
        }
        unitary_inplace(&plan.fft_z, &mut row, &mut scratch);
        for j in 0..n_z {
            image[[iy, j]] = row[j];
        }
    }

    // Amplitude/phase post-factor, then the closing conjugation.
    // 2 z / (j lambda) = -j 2 z / lambda.
    let two = real::<T>(2.0);
    for j in 0..n_z {
        let z = grid.z_centers[j];
        let amp = Complex::new(T::zero(), -two * z / plan.lambda0);
        let phase = Complex::from_polar(T::one(), -plan.k0 * (z - grid.z0));
        let factor = amp * phase;
        for iy in 0..n_y {
            image[[iy, j]] = (image[[iy, j]] * factor).conj();
        }
    }

    Ok(image)
}

/// Reconstruct the whole volume, one independent column per x position.
///
/// Columns run in parallel; the output is bitwise independent of the worker
/// count and execution order.
pub fn reconstruct_volume<T: Scalar>(
    echo: &EchoVolume<T>,
    plan: &SpectralPlan<T>,
    grid: &ReconGrid<T>,
) -> Result<ImageVolume<T>, ReconError> {
    let (n_x, n_y, n_f) = echo.data.dim();
    if (n_y, n_f) != (plan.n_y, plan.n_f) {
        return Err(ReconError::PlanMismatch(format!(
            "echo columns are {} x {} but plan expects {} x {}",
            n_y, n_f, plan.n_y, plan.n_f
        )));
    }
    grid.check_plan(plan)?;

    let columns: Result<Vec<Array2<Complex<T>>>, ReconError> = (0..n_x)
        .into_par_iter()
        .map(|ix| reconstruct_column(echo.data.index_axis(Axis(0), ix), plan, grid))
        .collect();
    let columns = columns?;

    let mut data = Array3::<Complex<T>>::zeros((n_x, n_y, plan.n_z));
    for (ix, col) in columns.into_iter().enumerate() {
        data.index_axis_mut(Axis(0), ix).assign(&col);
    }
    Ok(ImageVolume {
        data,
        grid: grid.clone(),
        provenance: echo.metadata_hash(),
    })
}

/// Brute-force matched-filter backprojection: for every voxel, sum the echo
/// against the conjugated two-way propagator, `sum s(y0, k) exp(+j 2 k r)`
/// with `r = sqrt((y - y0)^2 + z^2)`. No transforms, no interpolation.
/// O(N_y^2 N_f N_z) per column; intended for small oracle grids.
pub fn backproject_oracle<T: Scalar>(echo: &EchoVolume<T>, grid: &ReconGrid<T>) -> ImageVolume<T> {
    let (n_x, _, n_f) = echo.data.dim();
    let ys = echo.geometry.element_y_positions();
    let ks = echo.sweep.wavenumbers();
    let dk = echo.sweep.wavenumber_step();
    let two = real::<T>(2.0);

    let columns: Vec<Array2<Complex<T>>> = (0..n_x)
        .into_par_iter()
        .map(|ix| {
            let col = echo.data.index_axis(Axis(0), ix);
            let mut img = Array2::<Complex<T>>::zeros((grid.n_y(), grid.n_z()));
            for (vy, &y) in grid.y_centers.iter().enumerate() {
                for (vz, &z) in grid.z_centers.iter().enumerate() {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (iy, &y0) in ys.iter().enumerate() {
                        let dy = y - y0;
                        let r = (dy * dy + z * z).sqrt();
                        let mut phasor = Complex::from_polar(T::one(), two * ks[0] * r);
                        let rot = Complex::from_polar(T::one(), two * dk * r);
                        for i in 0..n_f {
                            acc = acc + col[[iy, i]] * phasor;
                            phasor = phasor * rot;
                        }
                    }
                    img[[vy, vz]] = acc;
                }
            }
            img
        })
        .collect();

    let mut data = Array3::<Complex<T>>::zeros((n_x, grid.n_y(), grid.n_z()));
    for (ix, col) in columns.into_iter().enumerate() {
        data.index_axis_mut(Axis(0), ix).assign(&col);
    }
    ImageVolume {
        data,
        grid: grid.clone(),
        provenance: echo.metadata_hash(),
    }
}

/// Map voxel magnitudes to display units in [0, 1]: dB relative to the peak,
/// clipped to the dynamic range, affinely rescaled. A voxel `range_db` below
/// the peak maps to 0, the peak to 1.
pub fn magnitude_db<T: Scalar>(
    image: &ImageVolume<T>,
    dynamic_range_db: T,
) -> Result<Array3<T>, ReconError> {
    let peak = image
        .data
        .iter()
        .map(|c| c.norm())
        .fold(T::zero(), |a, b| a.max(b));
    if !(peak > T::zero()) {
        return Err(ReconError::AllZeroImage);
    }
    let twenty = real::<T>(20.0);
    let out = image.data.map(|c| {
        let mag = c.norm();
        let db = if mag > T::zero() {
            twenty * (mag / peak).log10()
        } else {
            -dynamic_range_db
        };
        let clipped = db.max(-dynamic_range_db).min(T::zero());
        T::one() + clipped / dynamic_range_db
    });
    Ok(out)
}

/// Index of the strongest voxel.
pub fn argmax_magnitude<T: Scalar>(data: &Array3<Complex<T>>) -> (usize, usize, usize) {
    let mut best = (0, 0, 0);
    let mut best_val = T::neg_infinity();
    for ((ix, iy, iz), v) in data.indexed_iter() {
        let m = v.norm();
        if m > best_val {
            best_val = m;
            best = (ix, iy, iz);
        }
    }
    best
}

/// Normalized (cosine) correlation of voxel magnitudes over a rectangular
/// window centered on `center`, clamped to the image bounds.
pub fn peak_region_correlation<T: Scalar>(
    a: ArrayView2<Complex<T>>,
    b: ArrayView2<Complex<T>>,
    center: (usize, usize),
    half_window: (usize, usize),
) -> T {
    assert_eq!(a.dim(), b.dim());
    let (ny, nz) = a.dim();
    let y_lo = center.0.saturating_sub(half_window.0);
    let y_hi = (center.0 + half_window.0 + 1).min(ny);
    let z_lo = center.1.saturating_sub(half_window.1);
    let z_hi = (center.1 + half_window.1 + 1).min(nz);

    let mut dot = T::zero();
    let mut na = T::zero();
    let mut nb = T::zero();
    for iy in y_lo..y_hi {
        for iz in z_lo..z_hi {
            let ma = a[[iy, iz]].norm();
            let mb = b[[iy, iz]].norm();
            dot = dot + ma * mb;
            na = na + ma * ma;
            nb = nb + mb * mb;
        }
    }
    if na > T::zero() && nb > T::zero() {
        dot / (na.sqrt() * nb.sqrt())
    } else {
        T::zero()
    }
}
