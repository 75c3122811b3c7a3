//! Complex vectors, measurement operators and phase utilities.
//!
//! A measurement operator `A ∈ Cᵐˣⁿ` maps a signal to `m` complex
//! measurements. The convolutional model takes `A` to be the first `n`
//! columns of the circulant matrix `C_a` of a kernel `a ∈ Cᵐ`, so that
//! `Az = a ⊛ ι(z)` with `ι` zero-padding `z` into the first `n` of `m`
//! coordinates. Products with `A` and `A*` cost `O(m log m)` via the DFT.
//!
//! DFT convention: forward transform unnormalized, inverse carries `1/m`.
//! Inner products are conjugate-linear in the first argument, `⟨x, z⟩ = x*z`.

use std::fmt;
use std::io::{Read, Write};
use std::ops::Deref;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Magic bytes of the binary vector interchange format.
pub const BINARY_MAGIC: [u8; 4] = *b"CPRV";

/// A non-empty vector of finite complex scalars.
#[derive(Clone, PartialEq)]
pub struct ComplexVector(Vec<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("complex vector must be non-empty".into()));
        }
        if let Some(k) = entries.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "complex vector entry {k} is not finite"
            )));
        }
        Ok(ComplexVector(entries))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// All-zero vector of length `len` (`len > 0`).
    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "complex vector must be non-empty");
        ComplexVector(vec![C64::new(0.0, 0.0); len])
    }

    /// Standard basis vector `e_{index+1}`.
    pub fn basis(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = C64::new(1.0, 0.0);
        v
    }

    /// Wraps entries produced by finite arithmetic on finite inputs.
    pub(crate) fn from_vec_unchecked(entries: Vec<C64>) -> Self {
        debug_assert!(!entries.is_empty());
        ComplexVector(entries)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn scaled(&self, s: C64) -> Self {
        ComplexVector(self.0.iter().map(|&c| c * s).collect())
    }

    /// Little-endian `CPRV` encoding: magic, `u32` length, then `(re, im)` f64 pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&BINARY_MAGIC)?;
        let len = u32::try_from(self.0.len()).map_err(|_| {
            std::io::Error::new(std::io::ErrorKind::InvalidInput, "vector too long")
        })?;
        w.write_all(&len.to_le_bytes())?;
        for c in &self.0 {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let bad = |e: std::io::Error| Error::InvalidInput(format!("binary vector: {e}"));
        let mut header = [0u8; 8];
        r.read_exact(&mut header).map_err(bad)?;
        if header[..4] != BINARY_MAGIC {
            return Err(Error::InvalidInput("binary vector: bad magic".into()));
        }
        let len = u32::from_le_bytes([header[4], header[5], header[6], header[7]]) as usize;
        let mut entries = Vec::with_capacity(len);
        let mut buf = [0u8; 16];
        for _ in 0..len {
            r.read_exact(&mut buf).map_err(bad)?;
            let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
            entries.push(C64::new(re, im));
        }
        Self::new(entries)
    }
}

impl Deref for ComplexVector {
    type Target = [C64];
    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl AsRef<[C64]> for ComplexVector {
    fn as_ref(&self) -> &[C64] {
        &self.0
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl Serialize for ComplexVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for c in &self.0 {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ComplexVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct PairsVisitor;

        impl<'de> Visitor<'de> for PairsVisitor {
            type Value = Vec<C64>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of [re, im] pairs")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Vec<C64>, A::Error> {
                let mut out = Vec::with_capacity(seq.size_hint().unwrap_or(0));
                while let Some([re, im]) = seq.next_element::<[f64; 2]>()? {
                    out.push(C64::new(re, im));
                }
                Ok(out)
            }
        }

        let entries = deserializer.deserialize_seq(PairsVisitor)?;
        ComplexVector::new(entries).map_err(de::Error::custom)
    }
}

/// Nonnegative magnitude measurements `y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Observations(Vec<f64>);

impl Observations {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "observation {k} = {} is not a finite nonnegative number",
                values[k]
            )));
        }
        Ok(Observations(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Deref for Observations {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl<'de> Deserialize<'de> for Observations {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(deserializer)?;
        Observations::new(values).map_err(de::Error::custom)
    }
}

/// A linear map `A: Cⁿ → Cᵐ` together with its adjoint.
///
/// Implementations are immutable and shareable across threads; every call
/// works in caller-local buffers.
pub trait MeasurementOperator: Send + Sync {
    /// Number of measurements `m`.
    fn num_measurements(&self) -> usize;

    /// Signal dimension `n`.
    fn signal_dim(&self) -> usize;

    /// `out ← A z`. `z` has length `n`, `out` length `m`.
    fn forward_into(&self, z: &[C64], out: &mut [C64]) -> Result<()>;

    /// `out ← A* w`. `w` has length `m`, `out` length `n`.
    fn adjoint_into(&self, w: &[C64], out: &mut [C64]) -> Result<()>;

    fn forward(&self, z: &[C64]) -> Result<ComplexVector> {
        let mut out = vec![C64::new(0.0, 0.0); self.num_measurements()];
        self.forward_into(z, &mut out)?;
        ComplexVector::new(out)
    }

    fn adjoint(&self, w: &[C64]) -> Result<ComplexVector> {
        let mut out = vec![C64::new(0.0, 0.0); self.signal_dim()];
        self.adjoint_into(w, &mut out)?;
        ComplexVector::new(out)
    }

    /// `y = |A x|` entrywise.
    fn measure(&self, x: &[C64]) -> Result<Observations> {
        let ax = self.forward(x)?;
        Observations::new(ax.iter().map(|c| c.norm()).collect())
    }
}

fn check_len(got: usize, expected: usize, context: &'static str) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::dim(expected, got, context))
    }
}

/// `A` = first `n` columns of the circulant matrix of a kernel `a ∈ Cᵐ`,
/// applied through the cached length-`m` kernel spectrum.
#[derive(Clone)]
pub struct ConvolutionalMeasurement {
    kernel: ComplexVector,
    signal_dim: usize,
    spectrum: Vec<C64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl ConvolutionalMeasurement {
    pub fn new(kernel: ComplexVector, signal_dim: usize) -> Result<Self> {
        let m = kernel.len();
        if signal_dim == 0 || signal_dim > m {
            return Err(Error::dim(m, signal_dim, "signal dimension must satisfy 1 <= n <= m"));
        }
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(m);
        let ifft = planner.plan_fft_inverse(m);
        let mut spectrum = kernel.as_slice().to_vec();
        fft.process(&mut spectrum);
        Ok(ConvolutionalMeasurement {
            kernel,
            signal_dim,
            spectrum,
            fft,
            ifft,
        })
    }

    pub fn kernel(&self) -> &ComplexVector {
        &self.kernel
    }

    /// Length-`m` unnormalized DFT of the kernel.
    pub fn kernel_spectrum(&self) -> &[C64] {
        &self.spectrum
    }

    /// Multiplies `buf` in the frequency domain by `spectrum` (or its conjugate).
    fn filter(&self, buf: &mut [C64], conjugate: bool) {
        let scale = 1.0 / buf.len() as f64;
        self.fft.process(buf);
        if conjugate {
            for (b, s) in buf.iter_mut().zip(&self.spectrum) {
                *b *= s.conj() * scale;
            }
        } else {
            for (b, s) in buf.iter_mut().zip(&self.spectrum) {
                *b *= s * scale;
            }
        }
        self.ifft.process(buf);
    }
}

impl fmt::Debug for ConvolutionalMeasurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvolutionalMeasurement")
            .field("m", &self.kernel.len())
            .field("n", &self.signal_dim)
            .finish()
    }
}

impl MeasurementOperator for ConvolutionalMeasurement {
    fn num_measurements(&self) -> usize {
        self.kernel.len()
    }

    fn signal_dim(&self) -> usize {
        self.signal_dim
    }

    fn forward_into(&self, z: &[C64], out: &mut [C64]) -> Result<()> {
        check_len(z.len(), self.signal_dim, "forward input")?;
        check_len(out.len(), self.kernel.len(), "forward output")?;
        let n = self.signal_dim;
        out[..n].copy_from_slice(z);
        out[n..].fill(C64::new(0.0, 0.0));
        self.filter(out, false);
        Ok(())
    }

    fn adjoint_into(&self, w: &[C64], out: &mut [C64]) -> Result<()> {
        check_len(w.len(), self.kernel.len(), "adjoint input")?;
        check_len(out.len(), self.signal_dim, "adjoint output")?;
        let mut buf = w.to_vec();
        self.filter(&mut buf, true);
        out.copy_from_slice(&buf[..self.signal_dim]);
        Ok(())
    }
}

/// Explicit `m × n` complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMeasurement {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMeasurement {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("dense matrix must be at least 1x1".into()));
        }
        check_len(data.len(), rows * cols, "dense matrix entries")?;
        if data.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("dense matrix has non-finite entries".into()));
        }
        Ok(DenseMeasurement { rows, cols, data })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = C64::new(1.0, 0.0);
        }
        Self::new(n, n, data)
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[C64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }
}

impl MeasurementOperator for DenseMeasurement {
    fn num_measurements(&self) -> usize {
        self.rows
    }

    fn signal_dim(&self) -> usize {
        self.cols
    }

    fn forward_into(&self, z: &[C64], out: &mut [C64]) -> Result<()> {
        check_len(z.len(), self.cols, "forward input")?;
        check_len(out.len(), self.rows, "forward output")?;
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = row.iter().zip(z).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }

    fn adjoint_into(&self, w: &[C64], out: &mut [C64]) -> Result<()> {
        check_len(w.len(), self.rows, "adjoint input")?;
        check_len(out.len(), self.cols, "adjoint output")?;
        out.fill(C64::new(0.0, 0.0));
        for (wi, row) in w.iter().zip(self.data.chunks_exact(self.cols)) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * wi;
            }
        }
        Ok(())
    }
}

/// The explicit `m × n` matrix whose column `ℓ` is the circulant shift of `a`
/// by `ℓ` samples, i.e. entry `(i, ℓ) = a[(i − ℓ) mod m]`.
pub fn build_circulant_dense(a: &[C64], n: usize) -> Result<DenseMeasurement> {
    let m = a.len();
    if n == 0 || n > m {
        return Err(Error::dim(m, n, "circulant columns must satisfy 1 <= n <= m"));
    }
    let mut data = Vec::with_capacity(m * n);
    for i in 0..m {
        for l in 0..n {
            data.push(a[(i + m - l) % m]);
        }
    }
    DenseMeasurement::new(m, n, data)
}

/// `‖C_x‖`: operator norm of the `m × m` circulant matrix of zero-padded `x`,
/// equal to the largest DFT-bin magnitude of the padding.
pub fn circulant_operator_norm(x: &[C64], m: usize) -> Result<f64> {
    if x.is_empty() || x.len() > m {
        return Err(Error::dim(m, x.len(), "operator norm needs 1 <= n <= m"));
    }
    let mut buf = vec![C64::new(0.0, 0.0); m];
    buf[..x.len()].copy_from_slice(x);
    FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buf);
    Ok(buf.iter().map(|c| c.norm()).fold(0.0, f64::max))
}

/// `exp(iφ(u))`: `u/|u|` for `u ≠ 0` and `1` at the origin.
#[inline]
pub fn phase_unit(u: C64) -> C64 {
    let r = u.norm();
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        u / r
    }
}

/// `⟨x, z⟩ = Σ conj(x_k) z_k`.
pub fn inner(x: &[C64], z: &[C64]) -> C64 {
    x.iter().zip(z).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    norm_sqr(v).sqrt()
}

/// The global phase `e^{iθ} = x*z / |x*z|` aligning `x` with `z` (1 if orthogonal).
pub fn optimal_phase(z: &[C64], x: &[C64]) -> Result<C64> {
    check_len(z.len(), x.len(), "optimal_phase operands")?;
    Ok(phase_unit(inner(x, z)))
}

/// `dist(z, X) = min_φ ‖z − x e^{iφ}‖ = sqrt(‖z‖² + ‖x‖² − 2|⟨x, z⟩|)`.
///
/// Evaluated as the residual at the optimal phase, which avoids the
/// cancellation of the closed form when `z` is close to the orbit of `x`.
pub fn dist_mod_phase(z: &[C64], x: &[C64]) -> Result<f64> {
    let theta = optimal_phase(z, x)?;
    Ok(z.iter()
        .zip(x)
        .map(|(a, b)| (a - b * theta).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_gaussian_vec, stream};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn delta_kernel(m: usize) -> ComplexVector {
        ComplexVector::basis(m, 0)
    }

    #[test]
    fn complex_vector_rejects_empty_and_nan() {
        assert!(ComplexVector::new(vec![]).is_err());
        assert!(ComplexVector::new(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexVector::new(vec![c(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn delta_kernel_forward_is_embedding() {
        let op = ConvolutionalMeasurement::new(delta_kernel(4), 2).unwrap();
        let z = [c(1.5, -2.0), c(0.25, 3.0)];
        let out = op.forward(&z).unwrap();
        let expect = [z[0], z[1], c(0.0, 0.0), c(0.0, 0.0)];
        for (a, b) in out.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn delta_kernel_adjoint_is_truncation() {
        let op = ConvolutionalMeasurement::new(delta_kernel(4), 2).unwrap();
        let w = [c(1.0, 1.0), c(2.0, 0.0), c(3.0, -1.0), c(4.0, 0.5)];
        let out = op.adjoint(&w).unwrap();
        assert!((out[0] - w[0]).norm() < 1e-15);
        assert!((out[1] - w[1]).norm() < 1e-15);
    }

    #[test]
    fn zero_maps_to_zero() {
        let mut rng = stream(1);
        let a = ComplexVector::new(complex_gaussian_vec(&mut rng, 8)).unwrap();
        let op = ConvolutionalMeasurement::new(a, 3).unwrap();
        assert!(op.forward(&[c(0.0, 0.0); 3]).unwrap().norm() == 0.0);
        assert!(op.adjoint(&[c(0.0, 0.0); 8]).unwrap().norm() == 0.0);
        assert!(op.measure(&[c(0.0, 0.0); 3]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn measure_delta_kernel() {
        let op = ConvolutionalMeasurement::new(delta_kernel(4), 2).unwrap();
        let y = op.measure(&[c(0.0, 3.0), c(4.0, 0.0)]).unwrap();
        let expect = [3.0, 4.0, 0.0, 0.0];
        for (a, b) in y.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let op = ConvolutionalMeasurement::new(delta_kernel(4), 2).unwrap();
        assert!(matches!(op.forward(&[c(1.0, 0.0); 3]), Err(Error::InvalidDimension { .. })));
        assert!(matches!(op.adjoint(&[c(1.0, 0.0); 3]), Err(Error::InvalidDimension { .. })));
        assert!(matches!(
            ConvolutionalMeasurement::new(delta_kernel(4), 5),
            Err(Error::InvalidDimension { .. })
        ));
        let dense = DenseMeasurement::identity(3).unwrap();
        assert!(matches!(dense.forward(&[c(1.0, 0.0); 2]), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn circulant_dense_small_cases() {
        let a = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let d = build_circulant_dense(&a, 1).unwrap();
        assert_eq!((d.num_measurements(), d.signal_dim()), (3, 1));
        for i in 0..3 {
            assert_eq!(d.entry(i, 0), a[i]);
        }
        let d = build_circulant_dense(&delta_kernel(4), 2).unwrap();
        for i in 0..4 {
            for l in 0..2 {
                let want = if i == l { 1.0 } else { 0.0 };
                assert_eq!(d.entry(i, l), c(want, 0.0));
            }
        }
        assert!(build_circulant_dense(&a, 4).is_err());
    }

    #[test]
    fn kernel_spectrum_matches_naive_dft() {
        let mut rng = stream(5);
        let a = complex_gaussian_vec(&mut rng, 12);
        let op = ConvolutionalMeasurement::new(ComplexVector::new(a.clone()).unwrap(), 5).unwrap();
        let m = a.len();
        for (k, s) in op.kernel_spectrum().iter().enumerate() {
            let naive: C64 = a
                .iter()
                .enumerate()
                .map(|(j, aj)| {
                    let ang = -2.0 * std::f64::consts::PI * (j * k) as f64 / m as f64;
                    aj * C64::from_polar(1.0, ang)
                })
                .sum();
            assert!((s - naive).norm() <= 1e-12 * naive.norm().max(1.0));
        }
    }

    #[test]
    fn operator_norm_paper_values() {
        let e1 = ComplexVector::basis(100, 0);
        assert_eq!(circulant_operator_norm(&e1, 100).unwrap(), 1.0);
        assert_eq!(circulant_operator_norm(&e1, 250).unwrap(), 1.0);
        let ones = vec![c(0.1, 0.0); 100];
        let v = circulant_operator_norm(&ones, 100).unwrap();
        assert!((v - 10.0).abs() < 1e-8, "{v}");
        let v = circulant_operator_norm(&ones, 300).unwrap();
        assert!((v - 10.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn phase_unit_examples() {
        assert_eq!(phase_unit(c(-2.0, 0.0)), c(-1.0, 0.0));
        assert_eq!(phase_unit(c(0.0, 0.0)), c(1.0, 0.0));
        let p = phase_unit(c(3.0, 4.0));
        assert!((p - c(0.6, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn dist_examples() {
        let mut rng = stream(3);
        let x = complex_gaussian_vec(&mut rng, 6);
        assert_eq!(dist_mod_phase(&x, &x).unwrap(), 0.0);
        for phi in [0.3, 1.7, -2.9, std::f64::consts::PI] {
            let rot: Vec<C64> = x.iter().map(|v| v * C64::from_polar(1.0, phi)).collect();
            assert!(dist_mod_phase(&rot, &x).unwrap() < 1e-12);
        }
        let nx = norm(&x);
        let unit: Vec<C64> = x.iter().map(|v| v / nx).collect();
        let twice: Vec<C64> = unit.iter().map(|v| v * 2.0).collect();
        assert!((dist_mod_phase(&twice, &unit).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn optimal_phase_examples() {
        let mut rng = stream(4);
        let x = complex_gaussian_vec(&mut rng, 5);
        let ix: Vec<C64> = x.iter().map(|v| v * C64::i()).collect();
        assert!((optimal_phase(&ix, &x).unwrap() - C64::i()).norm() < 1e-15);
        assert!((optimal_phase(&x, &x).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let orth = [c(1.0, 0.0), c(0.0, 0.0)];
        let other = [c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(optimal_phase(&orth, &other).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn binary_round_trip_and_header() {
        let v = ComplexVector::new(vec![c(1.0, -2.0), c(0.5, 0.25)]).unwrap();
        let mut bytes = Vec::new();
        v.write_binary(&mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"CPRV");
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        assert_eq!(bytes.len(), 8 + 2 * 16);
        assert_eq!(&bytes[8..16], &1.0f64.to_le_bytes());
        assert_eq!(ComplexVector::read_binary(&bytes[..]).unwrap(), v);
        assert!(ComplexVector::read_binary(&b"XXXX\0\0\0\0"[..]).is_err());
        assert!(ComplexVector::read_binary(&bytes[..20]).is_err());
    }

    #[test]
    fn json_format_is_pairs() {
        let v = ComplexVector::new(vec![c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[[1.0,-2.0],[0.5,0.0]]");
        let back: ComplexVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<ComplexVector>("[]").is_err());
        assert!(serde_json::from_str::<ComplexVector>("[[1.0]]").is_err());
    }

    #[test]
    fn observations_reject_negative() {
        assert!(Observations::new(vec![1.0, -0.1]).is_err());
        assert!(Observations::new(vec![f64::NAN]).is_err());
        assert!(serde_json::from_str::<Observations>("[1.0, -2.0]").is_err());
    }
}
