//! Haar analysis on the discrete torus: the multi-parameter Haar transform,
//! BMO norms built on it, and dyadic shifts and paraproducts.
//!
//! Within one parameter the Haar system is cube-based: a dyadic cube at
//! level `l` carries the `2^d - 1` cancellative signatures (tensor factors
//! of cancellative Haar and normalized-indicator functions, at least one
//! cancellative), plus a single non-cancellative average signature at the
//! coarsest level. Coefficients are stored in the classical pyramid
//! layout: the detail block for signature `eps` at level `l` sits at
//! per-axis offsets `eps_j 2^l + corner_j`, and position 0 holds the
//! average.

pub mod bmo;
pub mod shift;

pub use bmo::{
    little_bmo_norm, little_product_bmo_norm, product_bmo_norm, LittleProductBmoReport,
    PartitionSpec, ProductBmoReport, RectComponent, RectDesc,
};
pub use shift::{
    make_shift, paraproduct, seeded_signs, shift_commutator, CoeffSource, DyadicShift, ParaSlot,
    ParaVariable, ParaproductSpec, ShiftSpec,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::{Field, GridSpec};
use crate::{Error, Result};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// One parameter's part of a Haar index: the top-level average or a dyadic
/// cube with a nonzero signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamComponent {
    Average,
    Cube {
        level: usize,
        corner: Vec<usize>,
        signature: Vec<bool>,
    },
}

impl ParamComponent {
    /// Measure of the underlying cube (1 for the average component).
    pub fn measure(&self, dim: usize) -> f64 {
        match self {
            ParamComponent::Average => 1.0,
            ParamComponent::Cube { level, .. } => 0.5f64.powi((*level * dim) as i32),
        }
    }
}

/// Multi-parameter Haar coefficients of a field, same storage size as the
/// field itself.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarTensor {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl HaarTensor {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn zeros(spec: &GridSpec) -> HaarTensor {
        HaarTensor {
            spec: spec.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); spec.total_points()],
        }
    }

    /// Decode the per-parameter components of a flat coefficient index.
    pub fn components_of_flat(spec: &GridSpec, flat: usize) -> Vec<ParamComponent> {
        let multi = spec.multi_index(flat);
        (0..spec.num_params())
            .map(|k| {
                let coords: Vec<usize> = spec.param_axes(k).map(|a| multi[a]).collect();
                decode_param_component(&coords)
            })
            .collect()
    }

    /// Flat coefficient index of per-parameter components.
    pub fn flat_of_components(spec: &GridSpec, comps: &[ParamComponent]) -> usize {
        assert_eq!(comps.len(), spec.num_params());
        let mut multi = vec![0usize; spec.num_axes()];
        for (k, comp) in comps.iter().enumerate() {
            let axes: Vec<usize> = spec.param_axes(k).collect();
            match comp {
                ParamComponent::Average => {}
                ParamComponent::Cube {
                    level,
                    corner,
                    signature,
                } => {
                    for ((a, &c), &s) in axes.iter().zip(corner).zip(signature) {
                        multi[*a] = c + if s { 1 << level } else { 0 };
                    }
                }
            }
        }
        spec.flat_index(&multi)
    }

    pub fn get(&self, comps: &[ParamComponent]) -> Complex64 {
        self.coeffs[Self::flat_of_components(&self.spec, comps)]
    }
}

fn decode_param_component(coords: &[usize]) -> ParamComponent {
    let m = coords.iter().copied().max().unwrap();
    if m == 0 {
        return ParamComponent::Average;
    }
    let level = usize::BITS as usize - 1 - m.leading_zeros() as usize;
    let signature: Vec<bool> = coords.iter().map(|&p| p >> level == 1).collect();
    let corner: Vec<usize> = coords
        .iter()
        .zip(&signature)
        .map(|(&p, &s)| p - if s { 1 << level } else { 0 })
        .collect();
    ParamComponent::Cube {
        level,
        corner,
        signature,
    }
}

/// Pairwise orthonormal butterfly along `axis`, restricted to the active
/// sub-block of parameter `k` at the given level.
fn butterfly(
    data: &mut [Complex64],
    spec: &GridSpec,
    k: usize,
    axis: usize,
    level: usize,
    inverse: bool,
) {
    let shape = spec.shape();
    let strides = spec.strides();
    let active = 1usize << (level + 1);
    let half = 1usize << level;
    let sibling_axes: Vec<usize> = spec.param_axes(k).filter(|&a| a != axis).collect();
    let other_axes: Vec<usize> = (0..shape.len())
        .filter(|&a| a != axis && !sibling_axes.contains(&a))
        .collect();
    // enumerate line bases: sibling axes < active, other axes full range
    let mut line_axes: Vec<(usize, usize)> = Vec::new(); // (axis, limit)
    for &a in &sibling_axes {
        line_axes.push((a, active));
    }
    for &a in &other_axes {
        line_axes.push((a, shape[a]));
    }
    let mut idx = vec![0usize; line_axes.len()];
    let mut scratch = vec![Complex64::new(0.0, 0.0); active];
    loop {
        let base: usize = idx
            .iter()
            .zip(&line_axes)
            .map(|(&i, &(a, _))| i * strides[a])
            .sum();
        let s = strides[axis];
        if inverse {
            for i in 0..half {
                let lo = data[base + i * s];
                let hi = data[base + (half + i) * s];
                scratch[2 * i] = (lo + hi) * SQRT_HALF;
                scratch[2 * i + 1] = (lo - hi) * SQRT_HALF;
            }
        } else {
            for i in 0..half {
                let x0 = data[base + 2 * i * s];
                let x1 = data[base + (2 * i + 1) * s];
                scratch[i] = (x0 + x1) * SQRT_HALF;
                scratch[half + i] = (x0 - x1) * SQRT_HALF;
            }
        }
        for (q, &v) in scratch.iter().enumerate() {
            data[base + q * s] = v;
        }
        // advance the line counter
        let mut a = line_axes.len();
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < line_axes[a].1 {
                break;
            }
            idx[a] = 0;
            if a == 0 {
                return;
            }
        }
    }
}

/// Orthonormal multi-parameter Haar transform; coefficients are inner
/// products against the L2-normalized Haar system of the measure-1 torus.
pub fn haar_analysis(f: &Field) -> HaarTensor {
    let spec = f.spec().clone();
    let mut data = f.samples().to_vec();
    for k in 0..spec.num_params() {
        let depth = spec.depth(k);
        let axes: Vec<usize> = spec.param_axes(k).collect();
        for level in (0..depth).rev() {
            for &axis in &axes {
                butterfly(&mut data, &spec, k, axis, level, false);
            }
        }
    }
    let scale = spec.cell_volume().sqrt();
    for z in &mut data {
        *z *= scale;
    }
    HaarTensor { spec, coeffs: data }
}

/// Exact inverse of [`haar_analysis`].
pub fn haar_synthesis(h: &HaarTensor) -> Field {
    let spec = h.spec.clone();
    let mut data = h.coeffs.clone();
    let scale = 1.0 / spec.cell_volume().sqrt();
    for z in &mut data {
        *z *= scale;
    }
    for k in 0..spec.num_params() {
        let depth = spec.depth(k);
        let axes: Vec<usize> = spec.param_axes(k).collect();
        for level in 0..depth {
            for &axis in &axes {
                butterfly(&mut data, &spec, k, axis, level, true);
            }
        }
    }
    Field::from_samples(&spec, data).expect("haar synthesis produced non-finite values")
}

/// Sample the L2-normalized Haar basis function with the given components;
/// the oracle counterpart of the fast transform.
pub fn haar_field(spec: &GridSpec, comps: &[ParamComponent]) -> Result<Field> {
    if comps.len() != spec.num_params() {
        return Err(Error::InvalidArgument(
            "need one component per parameter".into(),
        ));
    }
    let shape = spec.shape();
    let mut f = Field::constant(spec, Complex64::new(1.0, 0.0));
    let mut factor = vec![1.0f64; spec.total_points()];
    for (k, comp) in comps.iter().enumerate() {
        let axes: Vec<usize> = spec.param_axes(k).collect();
        if let ParamComponent::Cube {
            level,
            corner,
            signature,
        } = comp
        {
            if signature.iter().all(|&s| !s) {
                return Err(Error::InvalidArgument(
                    "cube signature must be nonzero".into(),
                ));
            }
            let n = shape[axes[0]];
            if *level >= spec.depth(k) {
                return Err(Error::InvalidArgument("cube level beyond depth".into()));
            }
            let width = n >> level;
            crate::lattice::visit_lattice(spec, |flat, multi| {
                let mut v = 1.0f64;
                for ((&a, &c), &s) in axes.iter().zip(corner).zip(signature) {
                    let x = multi[a];
                    let lo = c * width;
                    if x < lo || x >= lo + width {
                        v = 0.0;
                        break;
                    }
                    let scale = (1u64 << level) as f64; // |I|^{-1} per axis
                    if s {
                        v *= scale.sqrt() * if x < lo + width / 2 { 1.0 } else { -1.0 };
                    } else {
                        v *= scale.sqrt();
                    }
                }
                factor[flat] *= v;
            });
        }
    }
    for (z, &v) in f.samples_mut().iter_mut().zip(&factor) {
        *z *= v;
    }
    Ok(f)
}
