//! Binary grid formats shared by the CLI and downstream tooling.
//!
//! One container for the three artifact kinds (cell noise, kernels, fields):
//! a fixed header with the grid geometry and config hash, a kind-specific
//! metadata block, then the values as little-endian `f64` in row-major order.

use crate::error::{Error, Result};
use crate::grid::{GridData, GridSpec};
use crate::kernel::{KernelGrid, TailEnvelope};
use crate::levy::CellNoise;
use crate::num::Scalar;
use std::io::{Read, Write};

pub const MAGIC: &[u8; 8] = b"LVFGRID1";
pub const FORMAT_VERSION: u32 = 1;

const KIND_NOISE: u32 = 1;
const KIND_KERNEL: u32 = 2;
const KIND_FIELD: u32 = 3;

/// FNV-1a 64-bit hash, used as the config fingerprint in artifact headers.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}
fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}
fn write_f64<W: Write>(w: &mut W, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}
fn write_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    write_u32(w, s.len() as u32)?;
    w.write_all(s.as_bytes())?;
    Ok(())
}
fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}
fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
fn read_str<R: Read>(r: &mut R) -> Result<String> {
    let len = read_u32(r)? as usize;
    if len > 1 << 20 {
        return Err(Error::config("unreasonable string length in grid file"));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::config("invalid utf-8 in grid file"))
}

fn write_header<W: Write, T: Scalar>(
    w: &mut W,
    kind: u32,
    spec: &GridSpec<T>,
    config_hash: u64,
) -> Result<()> {
    w.write_all(MAGIC)?;
    write_u32(w, FORMAT_VERSION)?;
    write_u32(w, kind)?;
    write_u32(w, spec.d() as u32)?;
    write_u32(w, 0)?;
    for a in 0..spec.d() {
        write_u64(w, spec.dims[a] as u64)?;
        write_f64(w, spec.spacing[a].as_f64())?;
        write_f64(w, spec.origin[a].as_f64())?;
    }
    write_u64(w, config_hash)?;
    Ok(())
}

fn read_header<R: Read>(r: &mut R, expect_kind: u32) -> Result<(GridSpec<f64>, u64)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::config("not a levyfield grid file (bad magic)"));
    }
    let version = read_u32(r)?;
    if version != FORMAT_VERSION {
        return Err(Error::config(format!("unsupported grid format version {version}")));
    }
    let kind = read_u32(r)?;
    if kind != expect_kind {
        return Err(Error::config(format!(
            "grid file holds kind {kind}, expected {expect_kind}"
        )));
    }
    let d = read_u32(r)? as usize;
    let _reserved = read_u32(r)?;
    if d == 0 || d > 16 {
        return Err(Error::config("unreasonable dimension in grid file"));
    }
    let mut dims = Vec::with_capacity(d);
    let mut spacing = Vec::with_capacity(d);
    let mut origin = Vec::with_capacity(d);
    for _ in 0..d {
        dims.push(read_u64(r)? as usize);
        spacing.push(read_f64(r)?);
        origin.push(read_f64(r)?);
    }
    let hash = read_u64(r)?;
    Ok((GridSpec::new(dims, spacing, origin)?, hash))
}

fn write_values<W: Write, T: Scalar>(w: &mut W, values: &[T]) -> Result<()> {
    for &v in values {
        write_f64(w, v.as_f64())?;
    }
    Ok(())
}

fn read_values<R: Read>(r: &mut R, len: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(read_f64(r)?);
    }
    Ok(out)
}

pub fn write_noise<W: Write, T: Scalar>(
    w: &mut W,
    noise: &CellNoise<T>,
    config_hash: u64,
) -> Result<()> {
    write_header(w, KIND_NOISE, &noise.spec, config_hash)?;
    write_u64(w, noise.seed)?;
    write_u64(w, noise.stream)?;
    write_f64(w, noise.delta.as_f64())?;
    write_values(w, &noise.values)
}

pub fn read_noise<R: Read>(r: &mut R) -> Result<(CellNoise<f64>, u64)> {
    let (spec, hash) = read_header(r, KIND_NOISE)?;
    let seed = read_u64(r)?;
    let stream = read_u64(r)?;
    let delta = read_f64(r)?;
    let values = read_values(r, spec.len())?;
    Ok((CellNoise { spec, values, seed, stream, delta }, hash))
}

pub fn write_kernel<W: Write, T: Scalar>(
    w: &mut W,
    kernel: &KernelGrid<T>,
    config_hash: u64,
) -> Result<()> {
    write_header(w, KIND_KERNEL, &kernel.spec, config_hash)?;
    match kernel.envelope {
        None => {
            w.write_all(&[0u8])?;
            write_f64(w, 0.0)?;
            write_f64(w, 0.0)?;
        }
        Some(TailEnvelope::Exponential { coeff, rate }) => {
            w.write_all(&[1u8])?;
            write_f64(w, coeff.as_f64())?;
            write_f64(w, rate.as_f64())?;
        }
        Some(TailEnvelope::Power { coeff, exponent }) => {
            w.write_all(&[2u8])?;
            write_f64(w, coeff.as_f64())?;
            write_f64(w, exponent.as_f64())?;
        }
    }
    write_u32(w, kernel.alpha.map_or(0, |a| a + 1))?;
    write_str(w, &kernel.provenance)?;
    write_f64(w, kernel.truncation_estimate.map_or(f64::NAN, |t| t.as_f64()))?;
    write_values(w, &kernel.values)
}

pub fn read_kernel<R: Read>(r: &mut R) -> Result<(KernelGrid<f64>, u64)> {
    let (spec, hash) = read_header(r, KIND_KERNEL)?;
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let c = read_f64(r)?;
    let p2 = read_f64(r)?;
    let envelope = match tag[0] {
        0 => None,
        1 => Some(TailEnvelope::Exponential { coeff: c, rate: p2 }),
        2 => Some(TailEnvelope::Power { coeff: c, exponent: p2 }),
        t => return Err(Error::config(format!("unknown envelope tag {t}"))),
    };
    let alpha_raw = read_u32(r)?;
    let provenance = read_str(r)?;
    let trunc = read_f64(r)?;
    let values = read_values(r, spec.len())?;
    Ok((
        KernelGrid {
            spec,
            values,
            envelope,
            provenance,
            alpha: if alpha_raw == 0 { None } else { Some(alpha_raw - 1) },
            truncation_estimate: if trunc.is_nan() { None } else { Some(trunc) },
        },
        hash,
    ))
}

pub fn write_field<W: Write, T: Scalar>(
    w: &mut W,
    field: &crate::field::FieldRealization<T>,
    config_hash: u64,
) -> Result<()> {
    write_header(w, KIND_FIELD, &field.data.spec, config_hash)?;
    write_u64(w, field.seed)?;
    write_u64(w, field.stream)?;
    write_str(w, &field.kernel_provenance)?;
    write_values(w, &field.data.values)
}

pub fn read_field<R: Read>(r: &mut R) -> Result<(crate::field::FieldRealization<f64>, u64)> {
    let (spec, hash) = read_header(r, KIND_FIELD)?;
    let seed = read_u64(r)?;
    let stream = read_u64(r)?;
    let provenance = read_str(r)?;
    let values = read_values(r, spec.len())?;
    Ok((
        crate::field::FieldRealization {
            data: GridData::new(spec, values)?,
            kernel_provenance: provenance,
            seed,
            stream,
        },
        hash,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{simulate_cells, LevyMeasureSpec, LevyTriplet};

    #[test]
    fn noise_round_trip_is_bit_exact() {
        let t = LevyTriplet::<f64>::new(
            0.5,
            0.1,
            LevyMeasureSpec::atoms(vec![(1.5, 0.7)]).unwrap(),
        )
        .unwrap();
        let spec = GridSpec::new(vec![8, 16], vec![0.25, 0.5], vec![0.0, -1.0]).unwrap();
        let n = simulate_cells(&t, &spec, 0.25, 99, 3).unwrap();
        let mut buf = Vec::new();
        write_noise(&mut buf, &n, 0xDEAD_BEEF).unwrap();
        let (back, hash) = read_noise(&mut buf.as_slice()).unwrap();
        assert_eq!(hash, 0xDEAD_BEEF);
        assert_eq!(back.seed, 99);
        assert_eq!(back.stream, 3);
        assert_eq!(back.spec, n.spec);
        assert_eq!(
            back.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            n.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn kernel_round_trip_keeps_metadata() {
        let spec = GridSpec::centered(1, 64, 0.5).unwrap();
        let k = KernelGrid::from_values(
            spec,
            (0..64).map(|i| (i as f64 * 0.1).sin()).collect(),
            Some(TailEnvelope::Power { coeff: 2.0, exponent: 3.5 }),
            "test kernel",
        )
        .unwrap();
        let mut buf = Vec::new();
        write_kernel(&mut buf, &k, 7).unwrap();
        let (back, hash) = read_kernel(&mut buf.as_slice()).unwrap();
        assert_eq!(hash, 7);
        assert_eq!(back.provenance, "test kernel");
        assert_eq!(back.envelope, Some(TailEnvelope::Power { coeff: 2.0, exponent: 3.5 }));
        assert_eq!(back.alpha, None);
        assert_eq!(back.values, k.values);
    }

    #[test]
    fn kind_mismatch_is_a_config_error() {
        let spec = GridSpec::centered(1, 4, 0.5).unwrap();
        let k = KernelGrid::from_values(spec, vec![0.0; 4], None, "k").unwrap();
        let mut buf = Vec::new();
        write_kernel(&mut buf, &k, 0).unwrap();
        assert!(matches!(read_noise(&mut buf.as_slice()), Err(Error::Config(_))));
    }

    #[test]
    fn fnv_hash_is_stable() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
    }
}
