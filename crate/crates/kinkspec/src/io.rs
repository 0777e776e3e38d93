//! Import and export: CSV tables, JSON snapshots and little-endian binary caches.
//!
//! Every binary cache opens with a 16-byte magic header followed by `u64`
//! dimensions and `f64` payload, all little-endian. Decoders validate the
//! header and require the payload length to match the declared shape exactly.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, TruncatedFockState, WickKernel};
use crate::grid::Grid;
use crate::params::ModelParams;
use crate::spectral::{generalized_eigenfunction, scattering_phase};
use crate::transform::SpectralCoefficients;
use crate::wavepacket::WavePacket;
use crate::C64;

pub const SPEC_MAGIC: &[u8; 16] = b"KINKSPEC-SPECv1\0";
pub const KER_MAGIC: &[u8; 16] = b"KINKSPEC-KERv1\0\0";
pub const FOK_MAGIC: &[u8; 16] = b"KINKSPEC-FOKv1\0\0";

/// Largest Fock dimension a snapshot may declare.
pub const MAX_SNAPSHOT_DIM: usize = 1 << 20;

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn header(buf: &'a [u8], magic: &[u8; 16]) -> Result<Self> {
        if buf.len() < 16 || &buf[..16] != magic {
            return Err(fmt_err("bad magic header"));
        }
        Ok(Self { buf, pos: 16 })
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| fmt_err("truncated input"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    /// Checks that exactly `count` values of `width` bytes remain.
    fn expect_payload(&self, count: u64, width: usize) -> Result<usize> {
        let n = usize::try_from(count).map_err(|_| fmt_err("dimension overflow"))?;
        let bytes = n.checked_mul(width).ok_or_else(|| fmt_err("dimension overflow"))?;
        if bytes != self.remaining() {
            return Err(fmt_err(format!("payload is {} bytes, header declares {bytes}", self.remaining())));
        }
        Ok(n)
    }
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

// ---------------------------------------------------------------- spectral data

/// One sample `(k, δ_k, x, E_k(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRow {
    pub k: f64,
    pub delta: f64,
    pub x: f64,
    pub re: f64,
    pub im: f64,
}

/// Rows ordered by `k`, then `x`.
pub fn spectral_table(ks: &[f64], grid: &Grid, p: &ModelParams) -> Result<Vec<SpectralRow>> {
    let mut ks = ks.to_vec();
    ks.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(ks.len() * grid.nodes.len());
    for k in ks {
        let st = generalized_eigenfunction(k, grid, p)?;
        let delta = scattering_phase(k, p);
        rows.extend(grid.nodes.iter().zip(&st.samples).map(|(&x, e)| SpectralRow { k, delta, x, re: e.re, im: e.im }));
    }
    Ok(rows)
}

pub fn write_csv<T: Serialize>(w: impl Write, rows: &[T]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(r: impl Read) -> Result<Vec<T>> {
    csv::Reader::from_reader(r).deserialize().map(|row| row.map_err(csv_err)).collect()
}

pub fn encode_spectral(rows: &[SpectralRow]) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + rows.len() * 40);
    out.extend_from_slice(SPEC_MAGIC);
    put_u64(&mut out, rows.len() as u64);
    for r in rows {
        for v in [r.k, r.delta, r.x, r.re, r.im] {
            put_f64(&mut out, v);
        }
    }
    out
}

pub fn decode_spectral(buf: &[u8]) -> Result<Vec<SpectralRow>> {
    let mut c = Cursor::header(buf, SPEC_MAGIC)?;
    let declared = c.u64()?;
    let n = c.expect_payload(declared, 40)?;
    (0..n)
        .map(|_| Ok(SpectralRow { k: c.f64()?, delta: c.f64()?, x: c.f64()?, re: c.f64()?, im: c.f64()? }))
        .collect()
}

// ---------------------------------------------------------------- transform coefficients

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub k: f64,
    pub re: f64,
    pub im: f64,
}

/// Continuum coefficients as rows in ascending `k`.
pub fn coefficient_rows(s: &SpectralCoefficients) -> Vec<CoefficientRow> {
    let mut rows: Vec<CoefficientRow> =
        s.k.nodes.iter().zip(&s.u_tilde).map(|(&k, u)| CoefficientRow { k, re: u.re, im: u.im }).collect();
    rows.sort_by(|a, b| a.k.total_cmp(&b.k));
    rows
}

/// Parses `(k, Re Ũ, Im Ũ)` rows; `k` must be finite and strictly increasing.
pub fn read_coefficients(r: impl Read) -> Result<(Vec<f64>, Vec<C64>)> {
    let rows: Vec<CoefficientRow> = read_csv(r)?;
    let mut ks = Vec::with_capacity(rows.len());
    let mut us = Vec::with_capacity(rows.len());
    for row in rows {
        if !(row.k.is_finite() && row.re.is_finite() && row.im.is_finite()) {
            return Err(fmt_err(format!("non-finite coefficient row at k = {}", row.k)));
        }
        if ks.last().is_some_and(|&last| row.k <= last) {
            return Err(fmt_err(format!("momenta not strictly increasing at k = {}", row.k)));
        }
        ks.push(row.k);
        us.push(C64::new(row.re, row.im));
    }
    Ok((ks, us))
}

// ---------------------------------------------------------------- kernel matrices

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub i: usize,
    pub j: usize,
    pub re: f64,
    pub im: f64,
}

pub fn matrix_entries(m: &DMatrix<C64>) -> Vec<MatrixEntry> {
    let (r, c) = m.shape();
    (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).map(|(i, j)| MatrixEntry { i, j, re: m[(i, j)].re, im: m[(i, j)].im }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRow {
    pub n: usize,
    pub value: f64,
}

pub fn eigenvalue_rows(values: &[f64]) -> Vec<EigenvalueRow> {
    values.iter().enumerate().map(|(n, &value)| EigenvalueRow { n, value }).collect()
}

fn encode_dense(magic: &[u8; 16], dims: &[u64], data: impl Iterator<Item = C64>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(magic);
    for &d in dims {
        put_u64(&mut out, d);
    }
    for v in data {
        put_f64(&mut out, v.re);
        put_f64(&mut out, v.im);
    }
    out
}

/// Row-major dense complex matrix.
pub fn encode_matrix(m: &DMatrix<C64>) -> Vec<u8> {
    let (r, c) = m.shape();
    encode_dense(KER_MAGIC, &[r as u64, c as u64], (0..r).flat_map(|i| (0..c).map(move |j| m[(i, j)])))
}

pub fn decode_matrix(buf: &[u8]) -> Result<DMatrix<C64>> {
    let mut c = Cursor::header(buf, KER_MAGIC)?;
    let (r, cols) = (c.u64()?, c.u64()?);
    let count = r.checked_mul(cols).ok_or_else(|| fmt_err("dimension overflow"))?;
    c.expect_payload(count, 16)?;
    let (r, cols) = (r as usize, cols as usize);
    let mut data = Vec::with_capacity(r * cols);
    for _ in 0..r * cols {
        data.push(C64::new(c.f64()?, c.f64()?));
    }
    Ok(DMatrix::from_row_slice(r, cols, &data))
}

// ---------------------------------------------------------------- Fock data

pub fn encode_wick_kernel(k: &WickKernel) -> Vec<u8> {
    encode_dense(FOK_MAGIC, &[k.m_out as u64, k.n_in as u64, k.n_modes as u64], k.data.iter().copied())
}

pub fn decode_wick_kernel(buf: &[u8]) -> Result<WickKernel> {
    let mut c = Cursor::header(buf, FOK_MAGIC)?;
    let (m_out, n_in, n_modes) = (c.u64()?, c.u64()?, c.u64()?);
    let order = m_out.checked_add(n_in).and_then(|o| u32::try_from(o).ok()).ok_or_else(|| fmt_err("order overflow"))?;
    if n_modes == 0 {
        return Err(fmt_err("kernel with no modes"));
    }
    let count = n_modes.checked_pow(order).ok_or_else(|| fmt_err("dimension overflow"))?;
    let n = c.expect_payload(count, 16)?;
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        data.push(C64::new(c.f64()?, c.f64()?));
    }
    Ok(WickKernel { m_out: m_out as usize, n_in: n_in as usize, n_modes: n_modes as usize, data })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub occupation: Vec<u8>,
    pub re: f64,
    pub im: f64,
}

/// Sparse JSON form of a truncated Fock state; zero amplitudes are omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockSnapshot {
    pub n_modes: usize,
    pub n_max: usize,
    pub amplitudes: Vec<Amplitude>,
}

impl FockSnapshot {
    pub fn from_state(s: &TruncatedFockState) -> Self {
        let amplitudes = s
            .basis
            .states
            .iter()
            .zip(&s.amps)
            .filter(|(_, a)| **a != C64::new(0.0, 0.0))
            .map(|(occ, a)| Amplitude { occupation: occ.clone(), re: a.re, im: a.im })
            .collect();
        Self { n_modes: s.basis.n_modes, n_max: s.basis.n_max, amplitudes }
    }

    pub fn to_state(&self) -> Result<TruncatedFockState> {
        let dim = basis_dim(self.n_modes, self.n_max).filter(|&d| d <= MAX_SNAPSHOT_DIM);
        if self.n_modes == 0 || dim.is_none() {
            return Err(fmt_err(format!("snapshot basis ({} modes, cap {}) out of range", self.n_modes, self.n_max)));
        }
        let basis = Arc::new(FockBasis::new(self.n_modes, self.n_max)?);
        let mut seen = BTreeMap::new();
        let mut state = TruncatedFockState::zero(basis.clone());
        for a in &self.amplitudes {
            let i = basis
                .index_of(&a.occupation)
                .ok_or_else(|| fmt_err(format!("occupation {:?} not in the basis", a.occupation)))?;
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(fmt_err("non-finite amplitude"));
            }
            if seen.insert(i, ()).is_some() {
                return Err(fmt_err(format!("duplicate occupation {:?}", a.occupation)));
            }
            state.amps[i] = C64::new(a.re, a.im);
        }
        Ok(state)
    }
}

/// `C(n_modes + n_max, n_max)`, or `None` on overflow.
fn basis_dim(n_modes: usize, n_max: usize) -> Option<usize> {
    let mut acc: u128 = 1;
    for i in 1..=n_max as u128 {
        acc = acc.checked_mul(n_modes as u128 + i)? / i;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    usize::try_from(acc).ok()
}

pub fn decode_snapshot(text: &str) -> Result<TruncatedFockState> {
    let snap: FockSnapshot = serde_json::from_str(text).map_err(|e| fmt_err(e.to_string()))?;
    snap.to_state()
}

// ---------------------------------------------------------------- wave packets

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketRow {
    pub t: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub re: f64,
    pub im: f64,
    pub abs2: f64,
}

/// Samples in time-major order.
pub fn packet_series(wp: &WavePacket, ts: &[f64], qs: &[f64]) -> Vec<PacketRow> {
    ts.iter()
        .flat_map(|&t| {
            qs.iter().map(move |&q| {
                let v = wp.eval(t, q);
                PacketRow { t, q, re: v.re, im: v.im, abs2: v.norm_sqr() }
            })
        })
        .collect()
}
