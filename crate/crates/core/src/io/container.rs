//! The `FBEC` binary container: echo volumes, image volumes, and PSF banks.
//!
//! Fixed little-endian layout, chosen over a self-describing format so
//! round-trips are bit-exact and acceptance tests can compare files directly:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "FBEC"
//!      4     2  format version (u16)
//!      6     4  record tag: "ECHO" | "IMGV" | "PSFB"
//!     10    12  dimension triple (3 x u32)
//!     22   128  metadata block: 16 x 64-bit little-endian fields
//!    150     -  payload: interleaved 32-bit real pairs (re, im),
//!               x-major, then y, then frequency (or z for images)
//! ```
//!
//! Metadata fields, in order: x_start, x_step, y_start, y_pitch, f_start_ghz,
//! f_stop_ghz, f_step_ghz, tx_rx_offset, z0, noise_seed (u64), beam_waist,
//! beam_wavelength, beam_focal, z_start, z_step, provenance_hash (u64). All
//! are IEEE f64 except the two u64 slots. Fields without meaning for a
//! record type are written as zero.
//!
//! `PSFB` payload rows are `1 + max_profile_len` pairs: the first pair of
//! each row carries (depth, tap count) so banks with unequal profile lengths
//! and arbitrary depths survive the trip; rows are zero-padded to the
//! longest profile.

use std::fs;
use std::io::Read;
use std::path::Path;

use ndarray::Array3;
use num_complex::Complex;

use crate::deconv::{PsfBank, PsfEntry};
use crate::error::ContainerError;
use crate::forward::{ArrayGeometry, EchoVolume, FanBeam, FrequencySweep};
use crate::recon::{ImageVolume, ReconGrid};
use crate::scalar::{real, Scalar};

pub const MAGIC: [u8; 4] = *b"FBEC";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 4 + 2 + 4 + 12 + 16 * 8;

/// Sanity cap on payload size: 2^32 complex values (32 GiB).
const MAX_VALUES: u64 = 1 << 32;

/// Record type carried by a container.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordTag {
    Echo,
    Image,
    PsfBank,
}

impl RecordTag {
    pub fn bytes(self) -> [u8; 4] {
        match self {
            RecordTag::Echo => *b"ECHO",
            RecordTag::Image => *b"IMGV",
            RecordTag::PsfBank => *b"PSFB",
        }
    }

    pub fn from_bytes(b: [u8; 4]) -> Result<Self, ContainerError> {
        match &b {
            b"ECHO" => Ok(RecordTag::Echo),
            b"IMGV" => Ok(RecordTag::Image),
            b"PSFB" => Ok(RecordTag::PsfBank),
            _ => Err(ContainerError::UnknownRecordTag { found: b }),
        }
    }
}

/// Decoded container header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainerHeader {
    pub tag: RecordTag,
    pub dims: [u32; 3],
    pub x_start: f64,
    pub x_step: f64,
    pub y_start: f64,
    pub y_pitch: f64,
    pub f_start_ghz: f64,
    pub f_stop_ghz: f64,
    pub f_step_ghz: f64,
    pub tx_rx_offset: f64,
    pub z0: f64,
    pub noise_seed: u64,
    pub beam_waist: f64,
    pub beam_wavelength: f64,
    pub beam_focal: f64,
    pub z_start: f64,
    pub z_step: f64,
    pub provenance_hash: u64,
}

impl ContainerHeader {
    fn zeroed(tag: RecordTag, dims: [u32; 3]) -> Self {
        Self {
            tag,
            dims,
            x_start: 0.0,
            x_step: 0.0,
            y_start: 0.0,
            y_pitch: 0.0,
            f_start_ghz: 0.0,
            f_stop_ghz: 0.0,
            f_step_ghz: 0.0,
            tx_rx_offset: 0.0,
            z0: 0.0,
            noise_seed: 0,
            beam_waist: 0.0,
            beam_wavelength: 0.0,
            beam_focal: 0.0,
            z_start: 0.0,
            z_step: 0.0,
            provenance_hash: 0,
        }
    }

    pub fn value_count(&self) -> Result<u64, ContainerError> {
        let n = self
            .dims
            .iter()
            .map(|&d| d as u64)
            .try_fold(1u64, |acc, d| acc.checked_mul(d));
        match n {
            Some(n) if n <= MAX_VALUES => Ok(n),
            _ => Err(ContainerError::DimensionOverflow { dims: self.dims }),
        }
    }

    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.tag.bytes());
        for d in self.dims {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for f in [
            self.x_start,
            self.x_step,
            self.y_start,
            self.y_pitch,
            self.f_start_ghz,
            self.f_stop_ghz,
            self.f_step_ghz,
            self.tx_rx_offset,
            self.z0,
        ] {
            out.extend_from_slice(&f.to_le_bytes());
        }
        out.extend_from_slice(&self.noise_seed.to_le_bytes());
        for f in [
            self.beam_waist,
            self.beam_wavelength,
            self.beam_focal,
            self.z_start,
            self.z_step,
        ] {
            out.extend_from_slice(&f.to_le_bytes());
        }
        out.extend_from_slice(&self.provenance_hash.to_le_bytes());
        debug_assert_eq!(out.len(), HEADER_LEN);
        out
    }

    fn decode(buf: &[u8]) -> Result<Self, ContainerError> {
        if buf.len() < HEADER_LEN {
            return Err(ContainerError::TruncatedPayload {
                expected: HEADER_LEN as u64,
                found: buf.len() as u64,
            });
        }
        let magic: [u8; 4] = buf[0..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(ContainerError::BadMagic { found: magic });
        }
        let version = u16::from_le_bytes(buf[4..6].try_into().unwrap());
        if version != VERSION {
            return Err(ContainerError::VersionUnsupported {
                found: version,
                supported: VERSION,
            });
        }
        let tag = RecordTag::from_bytes(buf[6..10].try_into().unwrap())?;
        let mut dims = [0u32; 3];
        for (i, d) in dims.iter_mut().enumerate() {
            *d = u32::from_le_bytes(buf[10 + 4 * i..14 + 4 * i].try_into().unwrap());
        }
        let f64_at =
            |slot: usize| f64::from_le_bytes(buf[22 + 8 * slot..30 + 8 * slot].try_into().unwrap());
        let u64_at =
            |slot: usize| u64::from_le_bytes(buf[22 + 8 * slot..30 + 8 * slot].try_into().unwrap());
        Ok(Self {
            tag,
            dims,
            x_start: f64_at(0),
            x_step: f64_at(1),
            y_start: f64_at(2),
            y_pitch: f64_at(3),
            f_start_ghz: f64_at(4),
            f_stop_ghz: f64_at(5),
            f_step_ghz: f64_at(6),
            tx_rx_offset: f64_at(7),
            z0: f64_at(8),
            noise_seed: u64_at(9),
            beam_waist: f64_at(10),
            beam_wavelength: f64_at(11),
            beam_focal: f64_at(12),
            z_start: f64_at(13),
            z_step: f64_at(14),
            provenance_hash: u64_at(15),
        })
    }
}

fn encode_payload<T: Scalar>(values: impl Iterator<Item = Complex<T>>, out: &mut Vec<u8>) {
    for v in values {
        out.extend_from_slice(&(v.re.to_f64() as f32).to_le_bytes());
        out.extend_from_slice(&(v.im.to_f64() as f32).to_le_bytes());
    }
}

fn decode_payload<T: Scalar>(buf: &[u8], count: u64) -> Result<Vec<Complex<T>>, ContainerError> {
    let expected = count
        .checked_mul(8)
        .ok_or(ContainerError::DimensionOverflow { dims: [0; 3] })?;
    if (buf.len() as u64) < expected {
        return Err(ContainerError::TruncatedPayload {
            expected,
            found: buf.len() as u64,
        });
    }
    if (buf.len() as u64) > expected {
        return Err(ContainerError::PayloadMismatch {
            expected: count,
            found: buf.len() as u64 / 8,
        });
    }
    let mut values = Vec::with_capacity(count as usize);
    for chunk in buf.chunks_exact(8) {
        let re = f32::from_le_bytes(chunk[0..4].try_into().unwrap());
        let im = f32::from_le_bytes(chunk[4..8].try_into().unwrap());
        values.push(Complex::new(real::<T>(re as f64), real::<T>(im as f64)));
    }
    Ok(values)
}

fn read_file(path: &Path) -> Result<(ContainerHeader, Vec<u8>), ContainerError> {
    let mut file = fs::File::open(path)?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)?;
    let header = ContainerHeader::decode(&bytes)?;
    Ok((header, bytes[HEADER_LEN..].to_vec()))
}

/// Read just the header of a container.
pub fn read_header(path: &Path) -> Result<ContainerHeader, ContainerError> {
    let mut file = fs::File::open(path)?;
    let mut buf = [0u8; HEADER_LEN];
    let mut filled = 0;
    while filled < HEADER_LEN {
        let n = file.read(&mut buf[filled..])?;
        if n == 0 {
            break;
        }
        filled += n;
    }
    ContainerHeader::decode(&buf[..filled])
}

/// Write an echo volume as an `ECHO` record.
pub fn write_echo<T: Scalar>(path: &Path, echo: &EchoVolume<T>) -> Result<(), ContainerError> {
    let (n_x, n_y, n_f) = echo.data.dim();
    let mut header =
        ContainerHeader::zeroed(RecordTag::Echo, [n_x as u32, n_y as u32, n_f as u32]);
    header.x_start = echo.geometry.x_start.to_f64();
    header.x_step = echo.geometry.x_step.to_f64();
    header.y_start = echo.geometry.y_start.to_f64();
    header.y_pitch = echo.geometry.y_pitch.to_f64();
    header.f_start_ghz = echo.sweep.f_start_ghz.to_f64();
    header.f_stop_ghz = echo.sweep.f_stop_ghz.to_f64();
    header.f_step_ghz = echo.sweep.f_step_ghz.to_f64();
    header.tx_rx_offset = echo.geometry.tx_rx_offset.to_f64();
    header.z0 = echo.z0_hint.to_f64();
    header.noise_seed = echo.noise_seed;
    header.beam_waist = echo.beam.waist.to_f64();
    header.beam_wavelength = echo.beam.wavelength.to_f64();
    header.beam_focal = echo.beam.focal_distance.to_f64();
    header.provenance_hash = echo.metadata_hash();

    let mut bytes = header.encode();
    bytes.reserve(echo.data.len() * 8);
    encode_payload(echo.data.iter().cloned(), &mut bytes);
    fs::write(path, bytes)?;
    Ok(())
}

/// Read an `ECHO` record back into an echo volume.
pub fn read_echo<T: Scalar>(path: &Path) -> Result<EchoVolume<T>, ContainerError> {
    let (header, payload) = read_file(path)?;
    if header.tag != RecordTag::Echo {
        return Err(ContainerError::WrongRecordType {
            expected: RecordTag::Echo.bytes(),
            found: header.tag.bytes(),
        });
    }
    let count = header.value_count()?;
    let values = decode_payload::<T>(&payload, count)?;
    let [n_x, n_y, n_f] = header.dims.map(|d| d as usize);

    let geometry = ArrayGeometry {
        y_start: real::<T>(header.y_start),
        y_pitch: real::<T>(header.y_pitch),
        n_y,
        x_start: real::<T>(header.x_start),
        x_step: real::<T>(header.x_step),
        n_x,
        tx_rx_offset: real::<T>(header.tx_rx_offset),
    };
    let sweep = FrequencySweep {
        f_start_ghz: real::<T>(header.f_start_ghz),
        f_stop_ghz: real::<T>(header.f_stop_ghz),
        f_step_ghz: real::<T>(header.f_step_ghz),
    };
    let beam = FanBeam {
        waist: real::<T>(header.beam_waist),
        wavelength: real::<T>(header.beam_wavelength),
        focal_distance: real::<T>(header.beam_focal),
    };
    if sweep.count() != n_f {
        return Err(ContainerError::MetadataInconsistent(format!(
            "sweep metadata implies {} tones but the dimension triple says {}",
            sweep.count(),
            n_f
        )));
    }
    let data = Array3::from_shape_vec((n_x, n_y, n_f), values)
        .map_err(|_| ContainerError::DimensionOverflow { dims: header.dims })?;
    Ok(EchoVolume {
        data,
        geometry,
        sweep,
        beam,
        noise_seed: header.noise_seed,
        z0_hint: real::<T>(header.z0),
    })
}

/// An image volume plus the scan-axis coordinates it was sampled on.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredImage<T> {
    pub image: ImageVolume<T>,
    pub x_start: f64,
    pub x_step: f64,
}

/// Write an image volume as an `IMGV` record.
pub fn write_image<T: Scalar>(
    path: &Path,
    image: &ImageVolume<T>,
    x_start: f64,
    x_step: f64,
) -> Result<(), ContainerError> {
    let (n_x, n_y, n_z) = image.data.dim();
    let mut header =
        ContainerHeader::zeroed(RecordTag::Image, [n_x as u32, n_y as u32, n_z as u32]);
    header.x_start = x_start;
    header.x_step = x_step;
    if n_y > 0 {
        header.y_start = image.grid.y_centers[0].to_f64();
        if n_y > 1 {
            header.y_pitch = (image.grid.y_centers[1] - image.grid.y_centers[0]).to_f64();
        }
    }
    header.z0 = image.grid.z0.to_f64();
    if n_z > 0 {
        header.z_start = image.grid.z_centers[0].to_f64();
        if n_z > 1 {
            header.z_step = (image.grid.z_centers[1] - image.grid.z_centers[0]).to_f64();
        }
    }
    header.provenance_hash = image.provenance;

    let mut bytes = header.encode();
    bytes.reserve(image.data.len() * 8);
    encode_payload(image.data.iter().cloned(), &mut bytes);
    fs::write(path, bytes)?;
    Ok(())
}

/// Read an `IMGV` record.
pub fn read_image<T: Scalar>(path: &Path) -> Result<StoredImage<T>, ContainerError> {
    let (header, payload) = read_file(path)?;
    if header.tag != RecordTag::Image {
        return Err(ContainerError::WrongRecordType {
            expected: RecordTag::Image.bytes(),
            found: header.tag.bytes(),
        });
    }
    let count = header.value_count()?;
    let values = decode_payload::<T>(&payload, count)?;
    let [n_x, n_y, n_z] = header.dims.map(|d| d as usize);

    let grid = ReconGrid {
        y_centers: (0..n_y)
            .map(|i| real::<T>(header.y_start + header.y_pitch * i as f64))
            .collect(),
        z_centers: (0..n_z)
            .map(|i| real::<T>(header.z_start + header.z_step * i as f64))
            .collect(),
        z0: real::<T>(header.z0),
    };
    let data = Array3::from_shape_vec((n_x, n_y, n_z), values)
        .map_err(|_| ContainerError::DimensionOverflow { dims: header.dims })?;
    Ok(StoredImage {
        image: ImageVolume {
            data,
            grid,
            provenance: header.provenance_hash,
        },
        x_start: header.x_start,
        x_step: header.x_step,
    })
}

/// Write a PSF bank as a `PSFB` record.
pub fn write_psf_bank<T: Scalar>(path: &Path, bank: &PsfBank<T>) -> Result<(), ContainerError> {
    let n_entries = bank.entries.len();
    let row_len = 1 + bank.max_profile_len();
    let mut header =
        ContainerHeader::zeroed(RecordTag::PsfBank, [n_entries as u32, row_len as u32, 1]);
    header.x_step = bank.x_pitch.to_f64();
    header.provenance_hash = bank.geometry_hash;

    let mut bytes = header.encode();
    for entry in &bank.entries {
        // Row prefix pair: (depth, tap count).
        let depth = Complex::new(entry.depth, real::<T>(entry.len() as f64));
        encode_payload(std::iter::once(depth), &mut bytes);
        encode_payload(entry.profile.iter().cloned(), &mut bytes);
        let pad = row_len - 1 - entry.len();
        encode_payload(
            std::iter::repeat_n(Complex::new(T::zero(), T::zero()), pad),
            &mut bytes,
        );
    }
    fs::write(path, bytes)?;
    Ok(())
}

/// Read a `PSFB` record.
pub fn read_psf_bank<T: Scalar>(path: &Path) -> Result<PsfBank<T>, ContainerError> {
    let (header, payload) = read_file(path)?;
    if header.tag != RecordTag::PsfBank {
        return Err(ContainerError::WrongRecordType {
            expected: RecordTag::PsfBank.bytes(),
            found: header.tag.bytes(),
        });
    }
    let count = header.value_count()?;
    let values = decode_payload::<T>(&payload, count)?;
    let [n_entries, row_len, _] = header.dims.map(|d| d as usize);

    let mut entries = Vec::with_capacity(n_entries);
    for e in 0..n_entries {
        let row = &values[e * row_len..(e + 1) * row_len];
        let depth = row[0].re;
        let taps = row[0].im.to_f64() as usize;
        if taps + 1 > row_len {
            return Err(ContainerError::PayloadMismatch {
                expected: row_len as u64,
                found: (taps + 1) as u64,
            });
        }
        entries.push(PsfEntry {
            depth,
            profile: row[1..1 + taps].to_vec(),
        });
    }
    Ok(PsfBank {
        entries,
        x_pitch: real::<T>(header.x_step),
        geometry_hash: header.provenance_hash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{simulate_echo, Scatterer, Scene};
    use ndarray::Array3;
    use tempfile::tempdir;

    fn sample_echo() -> EchoVolume<f32> {
        let geometry = ArrayGeometry::centered(7.0 * 5.2, 5.2, 2, 5.2);
        let sweep = FrequencySweep::new(24.0f32, 30.0, 1.5);
        let beam = FanBeam::new(8.51f32, 11.1, 1200.0);
        let scene = Scene::new(vec![Scatterer::unit(0.0, 0.0, 1200.0)]);
        simulate_echo(&scene, &geometry, &sweep, &beam).unwrap()
    }

    #[test]
    fn echo_round_trip_is_bitwise() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("echo.fbec");
        let echo = sample_echo();
        write_echo(&path, &echo).unwrap();
        let back: EchoVolume<f32> = read_echo(&path).unwrap();
        assert_eq!(echo.data, back.data);
        assert_eq!(echo.geometry, back.geometry);
        assert_eq!(echo.sweep, back.sweep);
        assert_eq!(echo.beam, back.beam);
        assert_eq!(echo.noise_seed, back.noise_seed);

        // Write-read-write stability at the byte level.
        let path2 = dir.path().join("echo2.fbec");
        write_echo(&path2, &back).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    #[test]
    fn file_size_is_header_plus_payload() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("zero.fbec");
        let mut echo = sample_echo();
        echo.data = Array3::zeros((2, 2, 2));
        echo.geometry.n_x = 2;
        echo.geometry.n_y = 2;
        write_echo(&path, &echo).unwrap();
        let len = fs::metadata(&path).unwrap().len();
        assert_eq!(len, HEADER_LEN as u64 + 64);
    }

    #[test]
    fn corrupted_magic_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.fbec");
        write_echo(&path, &sample_echo()).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[0] = b'X';
        fs::write(&path, bytes).unwrap();
        assert!(matches!(
            read_echo::<f32>(&path),
            Err(ContainerError::BadMagic { .. })
        ));
    }

    #[test]
    fn unsupported_version_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("v9.fbec");
        write_echo(&path, &sample_echo()).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[4] = 9;
        fs::write(&path, bytes).unwrap();
        assert!(matches!(
            read_echo::<f32>(&path),
            Err(ContainerError::VersionUnsupported { found: 9, .. })
        ));
    }

    #[test]
    fn unknown_tag_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("tag.fbec");
        write_echo(&path, &sample_echo()).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[6..10].copy_from_slice(b"WHAT");
        fs::write(&path, bytes).unwrap();
        assert!(matches!(
            read_echo::<f32>(&path),
            Err(ContainerError::UnknownRecordTag { .. })
        ));
    }

    #[test]
    fn wrong_record_type_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("echo.fbec");
        write_echo(&path, &sample_echo()).unwrap();
        assert!(matches!(
            read_image::<f32>(&path),
            Err(ContainerError::WrongRecordType { .. })
        ));
    }

    #[test]
    fn truncated_payload_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("trunc.fbec");
        write_echo(&path, &sample_echo()).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
        assert!(matches!(
            read_echo::<f32>(&path),
            Err(ContainerError::TruncatedPayload { .. })
        ));
    }

    #[test]
    fn trailing_garbage_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("extra.fbec");
        write_echo(&path, &sample_echo()).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes.extend_from_slice(&[0u8; 8]);
        fs::write(&path, bytes).unwrap();
        assert!(matches!(
            read_echo::<f32>(&path),
            Err(ContainerError::PayloadMismatch { .. })
        ));
    }

    #[test]
    fn dimension_overflow_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("huge.fbec");
        write_echo(&path, &sample_echo()).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[10..22].fill(0xFF);
        fs::write(&path, bytes).unwrap();
        assert!(matches!(
            read_echo::<f32>(&path),
            Err(ContainerError::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn inconsistent_sweep_metadata_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad_sweep.fbec");
        write_echo(&path, &sample_echo()).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        // f_step_ghz lives in metadata slot 6 (offset 22 + 48).
        bytes[70..78].copy_from_slice(&0.064f64.to_le_bytes());
        fs::write(&path, bytes).unwrap();
        assert!(matches!(
            read_echo::<f32>(&path),
            Err(ContainerError::MetadataInconsistent(_))
        ));
    }

    #[test]
    fn psf_bank_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bank.fbec");
        let bank = PsfBank::<f32> {
            entries: vec![
                PsfEntry {
                    depth: 1150.0,
                    profile: vec![
                        Complex::new(0.1, 0.0),
                        Complex::new(1.0, 0.0),
                        Complex::new(0.1, -0.05),
                    ],
                },
                PsfEntry {
                    depth: 1250.0,
                    profile: vec![
                        Complex::new(0.05, 0.01),
                        Complex::new(0.4, 0.0),
                        Complex::new(1.0, 0.0),
                        Complex::new(0.4, 0.0),
                        Complex::new(0.05, -0.01),
                    ],
                },
            ],
            x_pitch: 5.2,
            geometry_hash: 0xDEADBEEF,
        };
        write_psf_bank(&path, &bank).unwrap();
        let back: PsfBank<f32> = read_psf_bank(&path).unwrap();
        assert_eq!(bank, back);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn random_volume_round_trips(
                n_x in 1usize..5,
                n_y in 1usize..9,
                n_f in 2usize..9,
                seed in any::<u32>(),
            ) {
                let dir = tempdir().unwrap();
                let path = dir.path().join("prop.fbec");
                let mut state = seed as u64 | 1;
                let mut next = || {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (state as f32 / u64::MAX as f32) - 0.5
                };
                let data = Array3::from_shape_fn((n_x, n_y, n_f), |_| {
                    Complex::new(next(), next())
                });
                let echo = EchoVolume {
                    data,
                    geometry: ArrayGeometry {
                        y_start: -10.4,
                        y_pitch: 5.2,
                        n_y,
                        x_start: 0.0,
                        x_step: 5.2,
                        n_x,
                        tx_rx_offset: 0.0,
                    },
                    sweep: FrequencySweep::new(24.0f32, 30.0, 6.0 / (n_f as f32 - 0.5)),
                    beam: FanBeam::new(8.51, 11.1, 1200.0),
                    noise_seed: seed as u64,
                    z0_hint: 1100.0,
                };
                write_echo(&path, &echo).unwrap();
                let back: EchoVolume<f32> = read_echo(&path).unwrap();
                prop_assert_eq!(echo.data, back.data);
                prop_assert_eq!(echo.noise_seed, back.noise_seed);
            }
        }
    }
}
