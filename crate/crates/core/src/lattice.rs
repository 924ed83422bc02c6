//! Discrete multi-parameter torus: storage, unitary Fourier transforms,
//! inner products and norms for complex fields.
//!
//! A grid is a tensor product over parameters; parameter `k` contributes
//! `dim_k` axes with `points_k` samples each. The torus carries total
//! measure 1, so a lattice cell has volume `prod_k points_k^{-dim_k}` and
//! averages over dyadic boxes match the usual `|Q|^{-1} int_Q` convention.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One parameter of the torus: `dim` axes with `points` samples per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisParam {
    pub dim: usize,
    pub points: usize,
}

/// Shape of a multi-parameter grid.
///
/// Each `points` count must be a power of two and at least 4; the dyadic
/// module relies on both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    params: Vec<AxisParam>,
}

impl GridSpec {
    pub fn new(params: Vec<AxisParam>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::InvalidGrid("no parameters".into()));
        }
        let mut total: usize = 1;
        for (k, p) in params.iter().enumerate() {
            if p.dim == 0 {
                return Err(Error::InvalidGrid(format!("parameter {k} has dimension 0")));
            }
            if p.points < 4 || !p.points.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "parameter {k} has {} points per axis; need a power of two >= 4",
                    p.points
                )));
            }
            for _ in 0..p.dim {
                total = total
                    .checked_mul(p.points)
                    .ok_or_else(|| Error::InvalidGrid("total point count overflows".into()))?;
            }
        }
        Ok(GridSpec { params })
    }

    /// Convenience constructor: `dims[k]` axes with `points[k]` samples for
    /// parameter `k`.
    pub fn from_dims_points(dims: &[usize], points: &[usize]) -> Result<Self> {
        if dims.len() != points.len() {
            return Err(Error::InvalidGrid("dims/points length mismatch".into()));
        }
        GridSpec::new(
            dims.iter()
                .zip(points)
                .map(|(&dim, &points)| AxisParam { dim, points })
                .collect(),
        )
    }

    pub fn params(&self) -> &[AxisParam] {
        &self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// Flattened axis lengths, parameter by parameter, row-major.
    pub fn shape(&self) -> Vec<usize> {
        let mut shape = Vec::new();
        for p in &self.params {
            shape.extend(std::iter::repeat_n(p.points, p.dim));
        }
        shape
    }

    pub fn num_axes(&self) -> usize {
        self.params.iter().map(|p| p.dim).sum()
    }

    /// Range of flattened axis indices belonging to parameter `k`.
    pub fn param_axes(&self, k: usize) -> std::ops::Range<usize> {
        let start: usize = self.params[..k].iter().map(|p| p.dim).sum();
        start..start + self.params[k].dim
    }

    pub fn total_points(&self) -> usize {
        self.shape().iter().product()
    }

    /// Volume of one lattice cell; the torus has total measure 1.
    pub fn cell_volume(&self) -> f64 {
        let mut v = 1.0;
        for p in &self.params {
            for _ in 0..p.dim {
                v /= p.points as f64;
            }
        }
        v
    }

    /// Dyadic depth of parameter `k`: `points_k = 2^depth`.
    pub fn depth(&self, k: usize) -> usize {
        self.params[k].points.trailing_zeros() as usize
    }

    /// Row-major strides matching `shape()`.
    pub fn strides(&self) -> Vec<usize> {
        let shape = self.shape();
        let mut strides = vec![1usize; shape.len()];
        for a in (0..shape.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }
        strides
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        let strides = self.strides();
        multi.iter().zip(&strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let strides = self.strides();
        strides
            .iter()
            .map(|&s| {
                let i = flat / s;
                flat %= s;
                i
            })
            .collect()
    }

    /// Signed frequency of storage index `i` on an axis with `n` points.
    ///
    /// Frequencies live in `[-n/2, n/2)`; the unmatched index `n/2` is the
    /// genuine negative frequency `-n/2`.
    pub fn signed_freq(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Storage index of signed frequency `f` on an axis with `n` points.
    pub fn freq_index(f: i64, n: usize) -> Option<usize> {
        let half = (n / 2) as i64;
        if f >= -half && f < half {
            Some(f.rem_euclid(n as i64) as usize)
        } else {
            None
        }
    }
}

/// Complex field sampled on the lattice of a [`GridSpec`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    spec: GridSpec,
    samples: Vec<Complex64>,
}

/// Fourier coefficients of a [`Field`], indexed by signed frequencies per
/// axis (storage order matches the FFT layout of the sample grid).
#[derive(Debug, Clone, PartialEq)]
pub struct FreqField {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Field {
    pub fn zeros(spec: &GridSpec) -> Field {
        Field {
            spec: spec.clone(),
            samples: vec![Complex64::new(0.0, 0.0); spec.total_points()],
        }
    }

    pub fn constant(spec: &GridSpec, value: Complex64) -> Field {
        Field {
            spec: spec.clone(),
            samples: vec![value; spec.total_points()],
        }
    }

    pub fn from_samples(spec: &GridSpec, samples: Vec<Complex64>) -> Result<Field> {
        if samples.len() != spec.total_points() {
            return Err(Error::InvalidGrid(format!(
                "sample count {} does not match grid with {} points",
                samples.len(),
                spec.total_points()
            )));
        }
        if let Some(bad) = samples.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Field {
            spec: spec.clone(),
            samples,
        })
    }

    /// Seeded standard-complex-Gaussian field.
    pub fn random(spec: &GridSpec, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..spec.total_points())
            .map(|_| {
                Complex64::new(
                    rng.sample(rand_distr::StandardNormal),
                    rng.sample(rand_distr::StandardNormal),
                )
            })
            .collect();
        Field {
            spec: spec.clone(),
            samples,
        }
    }

    /// Seeded random field normalized to `l2_norm() == 1`.
    pub fn random_unit(spec: &GridSpec, seed: u64) -> Field {
        let f = Field::random(spec, seed);
        let n = f.l2_norm();
        f.scale(Complex64::new(1.0 / n, 0.0))
    }

    /// The character `exp(2 pi i n.x)` for signed frequencies `n` per axis.
    pub fn mode(spec: &GridSpec, freqs: &[i64]) -> Field {
        let shape = spec.shape();
        assert_eq!(freqs.len(), shape.len());
        let mut f = Field::zeros(spec);
        for flat in 0..f.samples.len() {
            let multi = spec.multi_index(flat);
            let mut phase = 0.0;
            for (a, &i) in multi.iter().enumerate() {
                phase += freqs[a] as f64 * i as f64 / shape[a] as f64;
            }
            f.samples[flat] = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase);
        }
        f
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product; multiplication by a symbol function.
    pub fn mul_pointwise(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field {
            spec: self.spec.clone(),
            samples: self.samples.iter().map(|z| z * c).collect(),
        }
    }

    pub fn conj(&self) -> Field {
        Field {
            spec: self.spec.clone(),
            samples: self.samples.iter().map(|z| z.conj()).collect(),
        }
    }

    fn zip_with(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Field> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(Field {
            spec: self.spec.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `<f,g> = sum f conj(g) * cell_volume`.
    pub fn inner_product(&self, other: &Field) -> Result<Complex64> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        let s: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| a * b.conj())
            .sum();
        Ok(s * self.spec.cell_volume())
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        (s * self.spec.cell_volume()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Mean over the whole torus.
    pub fn mean(&self) -> Complex64 {
        let s: Complex64 = self.samples.iter().sum();
        s / self.samples.len() as f64
    }

    /// Subtract the average over parameter `k`'s variables, pointwise in the
    /// remaining variables.
    pub fn remove_param_mean(&self, k: usize) -> Field {
        let shape = self.spec.shape();
        let strides = self.spec.strides();
        let axes = self.spec.param_axes(k);
        let block: usize = axes.clone().map(|a| shape[a]).product();
        let mut out = self.clone();
        // enumerate positions with all param-k axes at zero
        let total = self.samples.len();
        let mut offsets = Vec::with_capacity(block);
        {
            let axes_v: Vec<usize> = axes.clone().collect();
            let mut idx = vec![0usize; axes_v.len()];
            loop {
                let off: usize = idx.iter().zip(&axes_v).map(|(&i, &a)| i * strides[a]).sum();
                offsets.push(off);
                let mut a = axes_v.len();
                loop {
                    if a == 0 {
                        break;
                    }
                    a -= 1;
                    idx[a] += 1;
                    if idx[a] < shape[axes_v[a]] {
                        break;
                    }
                    idx[a] = 0;
                    if a == 0 {
                        a = usize::MAX;
                        break;
                    }
                }
                if a == usize::MAX {
                    break;
                }
            }
        }
        let mut base_flat = 0usize;
        let axes_v: Vec<usize> = axes.collect();
        while base_flat < total {
            let multi = self.spec.multi_index(base_flat);
            if axes_v.iter().all(|&a| multi[a] == 0) {
                let mean: Complex64 =
                    offsets.iter().map(|&o| self.samples[base_flat + o]).sum::<Complex64>()
                        / block as f64;
                for &o in &offsets {
                    out.samples[base_flat + o] -= mean;
                }
            }
            base_flat += 1;
        }
        out
    }
}

impl FreqField {
    pub fn zeros(spec: &GridSpec) -> FreqField {
        FreqField {
            spec: spec.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); spec.total_points()],
        }
    }

    pub fn from_coeffs(spec: &GridSpec, coeffs: Vec<Complex64>) -> Result<FreqField> {
        if coeffs.len() != spec.total_points() {
            return Err(Error::InvalidGrid("coefficient count mismatch".into()));
        }
        Ok(FreqField {
            spec: spec.clone(),
            coeffs,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at the given signed frequencies per axis.
    pub fn at(&self, freqs: &[i64]) -> Complex64 {
        let shape = self.spec.shape();
        let multi: Vec<usize> = freqs
            .iter()
            .zip(&shape)
            .map(|(&f, &n)| GridSpec::freq_index(f, n).expect("frequency out of range"))
            .collect();
        self.coeffs[self.spec.flat_index(&multi)]
    }

    /// Signed frequencies per axis of a flat storage index.
    pub fn freqs_of_flat(&self, flat: usize) -> Vec<i64> {
        let shape = self.spec.shape();
        self.spec
            .multi_index(flat)
            .iter()
            .zip(&shape)
            .map(|(&i, &n)| GridSpec::signed_freq(i, n))
            .collect()
    }

    /// Norm matching Parseval against [`Field::l2_norm`] for the unitary
    /// transform pair.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|z| z.norm_sqr()).sum();
        (s * self.spec.cell_volume()).sqrt()
    }
}

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

// Plans are cached per (length, direction); rustfft plans are Send + Sync.
fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

fn transform_axis(data: &mut [Complex64], shape: &[usize], axis: usize, inverse: bool) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let fft = plan(n, inverse);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for o in 0..outer {
        let base = o * n * stride;
        for i in 0..stride {
            for k in 0..n {
                line[k] = data[base + i + k * stride];
            }
            fft.process(&mut line);
            for k in 0..n {
                data[base + i + k * stride] = line[k];
            }
        }
    }
}

/// Unitary discrete Fourier transform per axis; Parseval holds exactly up
/// to rounding.
pub fn forward_transform(f: &Field) -> Result<FreqField> {
    if !f.is_finite() {
        let bad = f
            .samples
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
            .unwrap_or(0);
        return Err(Error::NonFinite(bad));
    }
    let shape = f.spec.shape();
    let mut data = f.samples.clone();
    for axis in 0..shape.len() {
        transform_axis(&mut data, &shape, axis, false);
    }
    let scale = 1.0 / (f.spec.total_points() as f64).sqrt();
    for z in &mut data {
        *z *= scale;
    }
    Ok(FreqField {
        spec: f.spec.clone(),
        coeffs: data,
    })
}

/// Exact inverse of [`forward_transform`].
pub fn inverse_transform(ff: &FreqField) -> Result<Field> {
    let shape = ff.spec.shape();
    let mut data = ff.coeffs.clone();
    for axis in 0..shape.len() {
        transform_axis(&mut data, &shape, axis, true);
    }
    let scale = 1.0 / (ff.spec.total_points() as f64).sqrt();
    for z in &mut data {
        *z *= scale;
    }
    Ok(Field {
        spec: ff.spec.clone(),
        samples: data,
    })
}

/// Visit every lattice point in row-major order with its multi-index.
pub fn visit_lattice(spec: &GridSpec, mut f: impl FnMut(usize, &[usize])) {
    let shape = spec.shape();
    let total = spec.total_points();
    let mut multi = vec![0usize; shape.len()];
    for flat in 0..total {
        f(flat, &multi);
        for a in (0..shape.len()).rev() {
            multi[a] += 1;
            if multi[a] < shape[a] {
                break;
            }
            multi[a] = 0;
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FieldHeader {
    version: u32,
    params: Vec<AxisParam>,
    layout: String,
    dtype: String,
}

const FIELD_MAGIC: &[u8; 8] = b"CLABFLD1";

/// Binary container: magic, length-prefixed JSON header, interleaved
/// little-endian re/im doubles.
pub fn write_field<W: Write>(f: &Field, mut w: W) -> Result<()> {
    let header = FieldHeader {
        version: 1,
        params: f.spec.params.clone(),
        layout: "row-major".into(),
        dtype: "complex128".into(),
    };
    let header_bytes = serde_json::to_vec(&header)?;
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&(header_bytes.len() as u32).to_le_bytes())?;
    w.write_all(&header_bytes)?;
    for z in &f.samples {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(Error::Parse("bad field magic".into()));
    }
    let mut len_bytes = [0u8; 4];
    r.read_exact(&mut len_bytes)?;
    let header_len = u32::from_le_bytes(len_bytes) as usize;
    let mut header_bytes = vec![0u8; header_len];
    r.read_exact(&mut header_bytes)?;
    let header: FieldHeader = serde_json::from_slice(&header_bytes)?;
    if header.layout != "row-major" || header.dtype != "complex128" {
        return Err(Error::Parse(format!(
            "unsupported layout/dtype {}/{}",
            header.layout, header.dtype
        )));
    }
    let spec = GridSpec::new(header.params)?;
    let total = spec.total_points();
    let mut samples = Vec::with_capacity(total);
    let mut buf = [0u8; 16];
    for _ in 0..total {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
        samples.push(Complex64::new(re, im));
    }
    Field::from_samples(&spec, samples)
}

pub fn write_field_to_path(f: &Field, path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field(f, std::io::BufWriter::new(file))
}

pub fn read_field_from_path(path: &std::path::Path) -> Result<Field> {
    let file = std::fs::File::open(path)?;
    read_field(std::io::BufReader::new(file))
}

#[derive(Serialize, Deserialize)]
struct FieldDebugJson {
    version: u32,
    params: Vec<AxisParam>,
    layout: String,
    dtype: String,
    samples: Vec<[f64; 2]>,
}

/// JSON debug format for small grids.
pub fn field_to_debug_json(f: &Field) -> Result<String> {
    let doc = FieldDebugJson {
        version: 1,
        params: f.spec.params.clone(),
        layout: "row-major".into(),
        dtype: "complex128".into(),
        samples: f.samples.iter().map(|z| [z.re, z.im]).collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn field_from_debug_json(s: &str) -> Result<Field> {
    let doc: FieldDebugJson = serde_json::from_str(s)?;
    let spec = GridSpec::new(doc.params)?;
    Field::from_samples(
        &spec,
        doc.samples.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize) -> GridSpec {
        GridSpec::from_dims_points(&[1], &[n]).unwrap()
    }

    /// Direct O(N^2) summation DFT, the oracle for the FFT path.
    fn dft_oracle(f: &Field) -> Vec<Complex64> {
        let spec = f.spec();
        let shape = spec.shape();
        let total = spec.total_points();
        let scale = 1.0 / (total as f64).sqrt();
        let mut out = vec![Complex64::new(0.0, 0.0); total];
        for (j, slot) in out.iter_mut().enumerate() {
            let jm = spec.multi_index(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, &v) in f.samples().iter().enumerate() {
                let xm = spec.multi_index(x);
                let mut phase = 0.0;
                for a in 0..shape.len() {
                    phase -= jm[a] as f64 * xm[a] as f64 / shape[a] as f64;
                }
                acc += v * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase);
            }
            *slot = acc * scale;
        }
        out
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::from_dims_points(&[1], &[3]).is_err());
        assert!(GridSpec::from_dims_points(&[1], &[2]).is_err());
        assert!(GridSpec::from_dims_points(&[0], &[8]).is_err());
        assert!(GridSpec::from_dims_points(&[], &[]).is_err());
        let g = GridSpec::from_dims_points(&[2, 1], &[8, 16]).unwrap();
        assert_eq!(g.total_points(), 8 * 8 * 16);
        assert_eq!(g.shape(), vec![8, 8, 16]);
        assert_eq!(g.param_axes(1), 2..3);
        assert!((g.cell_volume() - 1.0 / 1024.0).abs() < 1e-15);
    }

    #[test]
    fn signed_freq_convention() {
        assert_eq!(GridSpec::signed_freq(0, 8), 0);
        assert_eq!(GridSpec::signed_freq(3, 8), 3);
        assert_eq!(GridSpec::signed_freq(4, 8), -4);
        assert_eq!(GridSpec::signed_freq(7, 8), -1);
        assert_eq!(GridSpec::freq_index(-4, 8), Some(4));
        assert_eq!(GridSpec::freq_index(4, 8), None);
    }

    #[test]
    fn delta_transform_is_flat() {
        let spec = circle(8);
        let mut f = Field::zeros(&spec);
        f.samples_mut()[0] = Complex64::new(1.0, 0.0);
        let ff = forward_transform(&f).unwrap();
        let want = 1.0 / 8f64.sqrt();
        for &c in ff.coeffs() {
            assert!((c - Complex64::new(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn constant_transform_is_delta() {
        let spec = circle(8);
        let f = Field::constant(&spec, Complex64::new(1.0, 0.0));
        let ff = forward_transform(&f).unwrap();
        for flat in 0..8 {
            let want = if flat == 0 { 8f64.sqrt() } else { 0.0 };
            assert!((ff.coeffs()[flat] - Complex64::new(want, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn forward_matches_direct_summation_oracle() {
        let spec = circle(8);
        let f = Field::random(&spec, 7);
        let ff = forward_transform(&f).unwrap();
        let oracle = dft_oracle(&f);
        for (a, b) in ff.coeffs().iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((f.l2_norm() - ff.l2_norm()).abs() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn multi_param_oracle_and_parseval() {
        let spec = GridSpec::from_dims_points(&[2, 1], &[4, 8]).unwrap();
        let f = Field::random(&spec, 123);
        let ff = forward_transform(&f).unwrap();
        let oracle = dft_oracle(&f);
        for (a, b) in ff.coeffs().iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-11);
        }
        assert!((f.l2_norm() - ff.l2_norm()).abs() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn single_frequency_inverse() {
        let spec = circle(8);
        let mut ff = FreqField::zeros(&spec);
        let idx = GridSpec::freq_index(1, 8).unwrap();
        ff.coeffs_mut()[idx] = Complex64::new(1.0, 0.0);
        let f = inverse_transform(&ff).unwrap();
        let scale = 1.0 / 8f64.sqrt();
        for (x, &v) in f.samples().iter().enumerate() {
            let want =
                Complex64::from_polar(scale, 2.0 * std::f64::consts::PI * x as f64 / 8.0);
            assert!((v - want).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_field_round_trip() {
        let spec = circle(8);
        let f = Field::zeros(&spec);
        let back = inverse_transform(&forward_transform(&f).unwrap()).unwrap();
        assert!(back.l2_norm() == 0.0);
    }

    #[test]
    fn round_trip_hundred_seeds() {
        let specs = [
            GridSpec::from_dims_points(&[1], &[16]).unwrap(),
            GridSpec::from_dims_points(&[1, 1], &[8, 8]).unwrap(),
            GridSpec::from_dims_points(&[2], &[8]).unwrap(),
        ];
        for seed in 0..100u64 {
            let spec = &specs[(seed % 3) as usize];
            let f = Field::random(spec, seed);
            let back = inverse_transform(&forward_transform(&f).unwrap()).unwrap();
            let err = f.sub(&back).unwrap().l2_norm();
            assert!(err <= 1e-12 * f.l2_norm(), "seed {seed}: err {err}");
        }
    }

    #[test]
    fn inner_product_properties() {
        let spec = GridSpec::from_dims_points(&[1, 1], &[8, 8]).unwrap();
        let f = Field::random(&spec, 1);
        let g = Field::random(&spec, 2);
        let ff = f.inner_product(&f).unwrap();
        assert!(ff.im.abs() < 1e-14 && ff.re >= 0.0);
        let fg = f.inner_product(&g).unwrap();
        let gf = g.inner_product(&f).unwrap();
        assert!((fg - gf.conj()).norm() < 1e-13);
        // distinct Fourier modes are orthogonal
        let m1 = Field::mode(&spec, &[1, 2]);
        let m2 = Field::mode(&spec, &[1, 3]);
        assert!(m1.inner_product(&m2).unwrap().norm() < 1e-14);
        assert!((m1.inner_product(&m1).unwrap().re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn spec_mismatch_rejected() {
        let a = Field::zeros(&circle(8));
        let b = Field::zeros(&circle(16));
        assert!(a.inner_product(&b).is_err());
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        let spec = circle(8);
        let mut samples = vec![Complex64::new(0.0, 0.0); 8];
        samples[3] = Complex64::new(f64::NAN, 0.0);
        assert!(Field::from_samples(&spec, samples).is_err());
    }

    #[test]
    fn remove_param_mean_zeroes_averages() {
        let spec = GridSpec::from_dims_points(&[1, 1], &[8, 8]).unwrap();
        let f = Field::random(&spec, 5);
        let g = f.remove_param_mean(0);
        // mean over axis 0 for every fixed second coordinate is zero
        for j in 0..8 {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..8 {
                s += g.samples()[spec.flat_index(&[i, j])];
            }
            assert!(s.norm() < 1e-12);
        }
    }

    #[test]
    fn binary_serialization_round_trip() {
        let spec = GridSpec::from_dims_points(&[2, 1], &[4, 8]).unwrap();
        let f = Field::random(&spec, 42);
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        let back = read_field(buf.as_slice()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn json_serialization_round_trip() {
        let spec = circle(4);
        let f = Field::random(&spec, 9);
        let s = field_to_debug_json(&f).unwrap();
        let back = field_from_debug_json(&s).unwrap();
        assert_eq!(f, back);
    }
}
