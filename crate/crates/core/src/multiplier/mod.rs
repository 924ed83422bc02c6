//! Convolution-type operators given by frequency symbols: Hilbert and Riesz
//! transforms, analytic projections, cone projections, mollified cone
//! operators and tensor products across parameters.
//!
//! All constructors here produce contractions (`|symbol| <= 1`). Symbols are
//! stored over the full frequency lattice; operators acting on one parameter
//! are constant in the others.

pub mod grammar;

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::{self, Field, GridSpec};
use crate::{Error, Result};

/// Base shape of a cone aperture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeBase {
    Ball,
    Cube,
}

/// A cone of directions in the frequency space of one parameter.
///
/// Ball base: all frequencies whose direction lies within geodesic distance
/// `aperture` of `direction`. Cube base: data `(direction, Q)` with `Q` an
/// axis-aligned cube in the orthogonal complement of half-width
/// `tan(aperture)` per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub param: usize,
    pub direction: Vec<f64>,
    pub aperture: f64,
    pub base: ConeBase,
    pub tau: f64,
    pub order: usize,
}

impl ConeSpec {
    pub fn new(
        param: usize,
        direction: Vec<f64>,
        aperture: f64,
        base: ConeBase,
        tau: f64,
        order: usize,
    ) -> Result<ConeSpec> {
        let norm: f64 = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "cone direction is not unit (norm {norm})"
            )));
        }
        if !(aperture > 0.0 && aperture < FRAC_PI_2) {
            return Err(Error::InvalidArgument(
                "cone aperture must lie in (0, pi/2)".into(),
            ));
        }
        if tau <= 0.0 {
            return Err(Error::InvalidArgument("tau must be positive".into()));
        }
        Ok(ConeSpec {
            param,
            direction,
            aperture,
            base,
            tau,
            order,
        })
    }

    /// Ball-base cone with the direction normalized from any nonzero vector
    /// and the mollification order defaulting to the parameter dimension.
    pub fn ball(param: usize, direction: &[f64], aperture: f64, tau: f64) -> Result<ConeSpec> {
        let norm: f64 = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero cone direction".into()));
        }
        let dir: Vec<f64> = direction.iter().map(|x| x / norm).collect();
        let order = dir.len().max(1);
        ConeSpec::new(param, dir, aperture, ConeBase::Ball, tau, order)
    }

    pub fn opposite(&self) -> ConeSpec {
        let mut c = self.clone();
        c.direction = c.direction.iter().map(|x| -x).collect();
        c
    }

    /// Indicator of the (closed) cone at a raw frequency block.
    pub fn contains(&self, block: &[f64]) -> bool {
        let norm: f64 = block.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return false;
        }
        match self.base {
            ConeBase::Ball => {
                let t: f64 =
                    block.iter().zip(&self.direction).map(|(x, d)| x * d).sum::<f64>() / norm;
                t.clamp(-1.0, 1.0).acos() <= self.aperture
            }
            ConeBase::Cube => self.cube_gauge(block).is_some_and(|u| u <= 1.0),
        }
    }

    /// For cube cones: `max_i |<block, e_i>| / (<block, dir> tan r)` over an
    /// orthonormal basis of the direction's complement, `None` when the
    /// axial component is not positive.
    fn cube_gauge(&self, block: &[f64]) -> Option<f64> {
        let axial: f64 = block.iter().zip(&self.direction).map(|(x, d)| x * d).sum();
        if axial <= 0.0 {
            return None;
        }
        let basis = orthogonal_basis(&self.direction);
        let half = self.aperture.tan();
        let mut u: f64 = 0.0;
        for e in &basis {
            let c: f64 = block.iter().zip(e).map(|(x, b)| x * b).sum();
            u = u.max(c.abs() / (axial * half));
        }
        Some(u)
    }

    /// Smooth symbol value at a raw frequency block, sandwiched between the
    /// indicators of the cone and its `(1+tau)`-dilate.
    pub fn smooth_value(&self, block: &[f64]) -> f64 {
        let norm: f64 = block.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        match self.base {
            ConeBase::Ball => {
                let t: f64 =
                    block.iter().zip(&self.direction).map(|(x, d)| x * d).sum::<f64>() / norm;
                self.radial_profile(t.clamp(-1.0, 1.0).acos())
            }
            ConeBase::Cube => match self.cube_gauge(block) {
                None => 0.0,
                Some(u) => {
                    if u <= 1.0 {
                        1.0
                    } else if u >= 1.0 + self.tau {
                        0.0
                    } else {
                        smoothstep(self.order, (1.0 + self.tau - u) / self.tau)
                    }
                }
            },
        }
    }

    /// Transition profile of the ball-base mollified cone as a function of
    /// geodesic distance to the direction.
    pub fn radial_profile(&self, angle: f64) -> f64 {
        let r = self.aperture;
        if angle <= r {
            1.0
        } else if angle >= (1.0 + self.tau) * r {
            0.0
        } else {
            smoothstep(self.order, ((1.0 + self.tau) * r - angle) / (self.tau * r))
        }
    }
}

/// Orthonormal basis of the orthogonal complement of a unit vector, via a
/// Householder reflector mapping the first coordinate axis onto it.
pub(crate) fn orthogonal_basis(dir: &[f64]) -> Vec<Vec<f64>> {
    let d = dir.len();
    if d == 1 {
        return Vec::new();
    }
    let sign = if dir[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = dir.to_vec();
    v[0] += sign;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    (1..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            let coef = 2.0 * v[i] / vv;
            for (x, vx) in e.iter_mut().zip(&v) {
                *x -= coef * vx;
            }
            e
        })
        .collect()
}

/// The unique polynomial of degree `2m+1` with `m` vanishing derivatives at
/// both endpoints, clamped outside `[0,1]`.
pub fn smoothstep(m: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let mut acc = 0.0;
    for j in 0..=m {
        let c = binomial(m + j, j) * binomial(2 * m + 1, m - j);
        acc += c * (-x).powi(j as i32);
    }
    acc * x.powi(m as i32 + 1)
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Descriptor for a journe-type cone multiplier; the synthesis lives in the
/// zonal module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JourneDesc {
    pub params: Vec<usize>,
    pub directions: Vec<Vec<f64>>,
    pub degree: usize,
    pub profile_a: f64,
    pub profile_b: f64,
    pub profile_order: usize,
    /// Measured truncation bound of the degree-capped synthesis.
    pub delta: f64,
}

/// Construction descriptor; serializable as JSON and echoed by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierKind {
    Identity,
    Hilbert { k: usize },
    Riesz { k: usize, j: usize },
    Cone { cone: ConeSpec },
    SmoothCone { cone: ConeSpec },
    Tensor { children: Vec<MultiplierKind> },
    JourneCone { journe: JourneDesc },
    Adjoint { inner: Box<MultiplierKind> },
    Custom { label: String },
}

/// A convolution-type operator: a complex symbol over the frequency lattice.
#[derive(Debug, Clone)]
pub struct Multiplier {
    spec: GridSpec,
    symbol: Vec<Complex64>,
    meta: MultiplierKind,
    touched: BTreeSet<usize>,
}

impl Multiplier {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    pub fn meta(&self) -> &MultiplierKind {
        &self.meta
    }

    /// Parameters the operator acts on (empty for the identity).
    pub fn touched_params(&self) -> &BTreeSet<usize> {
        &self.touched
    }

    pub fn max_abs_symbol(&self) -> f64 {
        self.symbol.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn from_parts(
        spec: GridSpec,
        symbol: Vec<Complex64>,
        meta: MultiplierKind,
        touched: BTreeSet<usize>,
    ) -> Multiplier {
        Multiplier {
            spec,
            symbol,
            meta,
            touched,
        }
    }

    /// Build from an arbitrary function of the signed frequency vector.
    pub fn from_symbol_fn(
        spec: &GridSpec,
        touched: impl IntoIterator<Item = usize>,
        label: impl Into<String>,
        f: impl Fn(&[i64]) -> Complex64,
    ) -> Multiplier {
        let shape = spec.shape();
        let mut symbol = vec![Complex64::new(0.0, 0.0); spec.total_points()];
        let mut freqs = vec![0i64; shape.len()];
        lattice::visit_lattice(spec, |flat, multi| {
            for (a, &i) in multi.iter().enumerate() {
                freqs[a] = GridSpec::signed_freq(i, shape[a]);
            }
            symbol[flat] = f(&freqs);
        });
        Multiplier {
            spec: spec.clone(),
            symbol,
            meta: MultiplierKind::Custom { label: label.into() },
            touched: touched.into_iter().collect(),
        }
    }

    /// Seeded random symbol with `|symbol| <= 1` everywhere.
    pub fn random_contraction(spec: &GridSpec, seed: u64) -> Multiplier {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let symbol = (0..spec.total_points())
            .map(|_| {
                let mag: f64 = rng.gen();
                let phase: f64 = rng.gen_range(0.0..2.0 * PI);
                Complex64::from_polar(mag, phase)
            })
            .collect();
        let touched: BTreeSet<usize> = (0..spec.num_params()).collect();
        Multiplier {
            spec: spec.clone(),
            symbol,
            meta: MultiplierKind::Custom {
                label: format!("random_contraction(seed={seed})"),
            },
            touched,
        }
    }

    pub fn identity(spec: &GridSpec) -> Multiplier {
        Multiplier {
            spec: spec.clone(),
            symbol: vec![Complex64::new(1.0, 0.0); spec.total_points()],
            meta: MultiplierKind::Identity,
            touched: BTreeSet::new(),
        }
    }

    pub fn adjoint(&self) -> Multiplier {
        Multiplier {
            spec: self.spec.clone(),
            symbol: self.symbol.iter().map(|z| z.conj()).collect(),
            meta: MultiplierKind::Adjoint {
                inner: Box::new(self.meta.clone()),
            },
            touched: self.touched.clone(),
        }
    }

    /// `inverse_transform(symbol * forward_transform(f))`.
    pub fn apply(&self, f: &Field) -> Result<Field> {
        if f.spec() != &self.spec {
            return Err(Error::SpecMismatch);
        }
        let mut ff = lattice::forward_transform(f)?;
        for (c, s) in ff.coeffs_mut().iter_mut().zip(&self.symbol) {
            *c *= s;
        }
        lattice::inverse_transform(&ff)
    }
}

/// Per-parameter symbol builder: the closure sees parameter `k`'s signed
/// frequency block as floats.
fn symbol_over_param(
    spec: &GridSpec,
    k: usize,
    meta: MultiplierKind,
    f: impl Fn(&[f64]) -> Complex64,
) -> Multiplier {
    let shape = spec.shape();
    let axes: Vec<usize> = spec.param_axes(k).collect();
    let mut symbol = vec![Complex64::new(0.0, 0.0); spec.total_points()];
    let mut block = vec![0.0f64; axes.len()];
    lattice::visit_lattice(spec, |flat, multi| {
        for (b, &a) in block.iter_mut().zip(&axes) {
            *b = GridSpec::signed_freq(multi[a], shape[a]) as f64;
        }
        symbol[flat] = f(&block);
    });
    Multiplier {
        spec: spec.clone(),
        symbol,
        meta,
        touched: std::iter::once(k).collect(),
    }
}

/// Hilbert transform in a one-dimensional parameter: `-i sgn(xi)` with
/// `sgn(0) = 0`, so constants in that variable are annihilated.
pub fn make_hilbert(spec: &GridSpec, k: usize) -> Result<Multiplier> {
    if k >= spec.num_params() {
        return Err(Error::InvalidArgument(format!("no parameter {k}")));
    }
    if spec.params()[k].dim != 1 {
        return Err(Error::InvalidArgument(format!(
            "hilbert transform needs a one-dimensional parameter; parameter {k} has dimension {}",
            spec.params()[k].dim
        )));
    }
    Ok(symbol_over_param(
        spec,
        k,
        MultiplierKind::Hilbert { k },
        |block| {
            let s = block[0].signum() * f64::from(block[0] != 0.0);
            Complex64::new(0.0, -s)
        },
    ))
}

/// Riesz transform in direction `j` (1-based) of parameter `k`; `j = 0` is
/// the identity. The symbol vanishes at frequency zero of the parameter.
pub fn make_riesz(spec: &GridSpec, k: usize, j: usize) -> Result<Multiplier> {
    if k >= spec.num_params() {
        return Err(Error::InvalidArgument(format!("no parameter {k}")));
    }
    let d = spec.params()[k].dim;
    if j == 0 {
        return Ok(Multiplier::identity(spec));
    }
    if j > d {
        return Err(Error::InvalidArgument(format!(
            "riesz direction {j} exceeds parameter dimension {d}"
        )));
    }
    Ok(symbol_over_param(
        spec,
        k,
        MultiplierKind::Riesz { k, j },
        move |block| {
            let norm: f64 = block.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -block[j - 1] / norm)
            }
        },
    ))
}

/// Fourier projection onto a cone: symbol is the 0/1 indicator, zero at the
/// origin of the parameter's frequency block.
pub fn make_cone_projection(spec: &GridSpec, cone: &ConeSpec) -> Result<Multiplier> {
    validate_cone_param(spec, cone)?;
    let c = cone.clone();
    Ok(symbol_over_param(
        spec,
        cone.param,
        MultiplierKind::Cone { cone: cone.clone() },
        move |block| Complex64::new(f64::from(c.contains(block)), 0.0),
    ))
}

/// Mollified cone operator: radially-extended symbol sandwiched between the
/// indicators of the cone and its `(1+tau)`-dilate.
pub fn make_smooth_cone(spec: &GridSpec, cone: &ConeSpec) -> Result<Multiplier> {
    validate_cone_param(spec, cone)?;
    if cone.base == ConeBase::Ball && (1.0 + cone.tau) * cone.aperture >= FRAC_PI_2 {
        return Err(Error::InvalidArgument(format!(
            "(1+tau) * aperture = {} must stay below pi/2 so opposing cones remain disjoint",
            (1.0 + cone.tau) * cone.aperture
        )));
    }
    let c = cone.clone();
    Ok(symbol_over_param(
        spec,
        cone.param,
        MultiplierKind::SmoothCone { cone: cone.clone() },
        move |block| Complex64::new(c.smooth_value(block), 0.0),
    ))
}

fn validate_cone_param(spec: &GridSpec, cone: &ConeSpec) -> Result<()> {
    if cone.param >= spec.num_params() {
        return Err(Error::InvalidArgument(format!("no parameter {}", cone.param)));
    }
    if spec.params()[cone.param].dim != cone.direction.len() {
        return Err(Error::InvalidArgument(format!(
            "cone direction has {} coordinates; parameter {} has dimension {}",
            cone.direction.len(),
            cone.param,
            spec.params()[cone.param].dim
        )));
    }
    Ok(())
}

/// Tensor product of multipliers acting on disjoint parameter subsets;
/// identity on untouched parameters.
pub fn tensor(ms: &[Multiplier]) -> Result<Multiplier> {
    if ms.is_empty() {
        return Err(Error::InvalidArgument("empty tensor".into()));
    }
    let spec = ms[0].spec.clone();
    let mut touched = BTreeSet::new();
    for m in ms {
        if m.spec != spec {
            return Err(Error::SpecMismatch);
        }
        if !m.touched.is_disjoint(&touched) {
            return Err(Error::InvalidArgument(
                "tensor factors act on overlapping parameter subsets".into(),
            ));
        }
        touched.extend(m.touched.iter().copied());
    }
    let mut symbol = vec![Complex64::new(1.0, 0.0); spec.total_points()];
    for m in ms {
        for (s, f) in symbol.iter_mut().zip(&m.symbol) {
            *s *= f;
        }
    }
    Ok(Multiplier {
        spec,
        symbol,
        meta: MultiplierKind::Tensor {
            children: ms.iter().map(|m| m.meta.clone()).collect(),
        },
        touched,
    })
}

/// Projection onto strictly positive frequencies of a one-dimensional
/// parameter (the analytic projection; frequency zero is excluded).
pub fn make_positive_projection(spec: &GridSpec, k: usize) -> Result<Multiplier> {
    half_line_projection(spec, k, true)
}

/// Projection onto strictly negative frequencies of a one-dimensional
/// parameter.
pub fn make_negative_projection(spec: &GridSpec, k: usize) -> Result<Multiplier> {
    half_line_projection(spec, k, false)
}

fn half_line_projection(spec: &GridSpec, k: usize, positive: bool) -> Result<Multiplier> {
    if spec.params()[k].dim != 1 {
        return Err(Error::InvalidArgument(
            "half-line projections need a one-dimensional parameter".into(),
        ));
    }
    let label = if positive { format!("P{k}+") } else { format!("P{k}-") };
    Ok(symbol_over_param(
        spec,
        k,
        MultiplierKind::Custom { label },
        move |block| {
            let inside = if positive { block[0] > 0.0 } else { block[0] < 0.0 };
            Complex64::new(f64::from(inside), 0.0)
        },
    ))
}

/// Projection onto frequency zero of parameter `k` (the mean in that
/// variable).
pub fn make_mean_projection(spec: &GridSpec, k: usize) -> Result<Multiplier> {
    if k >= spec.num_params() {
        return Err(Error::InvalidArgument(format!("no parameter {k}")));
    }
    Ok(symbol_over_param(
        spec,
        k,
        MultiplierKind::Custom { label: format!("E0[{k}]") },
        |block| Complex64::new(f64::from(block.iter().all(|&x| x == 0.0)), 0.0),
    ))
}

/// Projection onto frequencies `n_k > threshold` of a one-dimensional
/// parameter; the translated cuts of the Toeplitz study.
pub fn make_halfline_cut(spec: &GridSpec, k: usize, threshold: i64) -> Result<Multiplier> {
    if spec.params()[k].dim != 1 {
        return Err(Error::InvalidArgument(
            "half-line cuts need a one-dimensional parameter".into(),
        ));
    }
    Ok(symbol_over_param(
        spec,
        k,
        MultiplierKind::Custom {
            label: format!("cut[{k}] n>{threshold}"),
        },
        move |block| Complex64::new(f64::from(block[0] > threshold as f64), 0.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{forward_transform, inverse_transform, Field, FreqField};

    fn circle(n: usize) -> GridSpec {
        GridSpec::from_dims_points(&[1], &[n]).unwrap()
    }

    #[test]
    fn hilbert_on_positive_mode() {
        let spec = circle(8);
        let h = make_hilbert(&spec, 0).unwrap();
        let f = Field::mode(&spec, &[1]);
        let out = h.apply(&f).unwrap();
        let want = f.scale(Complex64::new(0.0, -1.0));
        assert!(out.sub(&want).unwrap().l2_norm() < 1e-13);
    }

    #[test]
    fn hilbert_annihilates_constants() {
        let spec = circle(8);
        let h = make_hilbert(&spec, 0).unwrap();
        let f = Field::constant(&spec, Complex64::new(1.0, 0.0));
        assert!(h.apply(&f).unwrap().l2_norm() < 1e-14);
    }

    #[test]
    fn hilbert_of_cosine_is_sine() {
        let spec = circle(16);
        let h = make_hilbert(&spec, 0).unwrap();
        let cos = Field::from_samples(
            &spec,
            (0..16)
                .map(|x| Complex64::new((2.0 * PI * x as f64 / 16.0).cos(), 0.0))
                .collect(),
        )
        .unwrap();
        let sin = Field::from_samples(
            &spec,
            (0..16)
                .map(|x| Complex64::new((2.0 * PI * x as f64 / 16.0).sin(), 0.0))
                .collect(),
        )
        .unwrap();
        let out = h.apply(&cos).unwrap();
        assert!(out.sub(&sin).unwrap().l2_norm() < 1e-12);
    }

    #[test]
    fn hilbert_needs_dim_one() {
        let spec = GridSpec::from_dims_points(&[2], &[8]).unwrap();
        assert!(make_hilbert(&spec, 0).is_err());
    }

    #[test]
    fn hilbert_squared_is_minus_identity_off_means() {
        let spec = circle(8);
        let h = make_hilbert(&spec, 0).unwrap();
        // dense comparison against -(Id - E0)
        for col in 0..8 {
            let mut delta = Field::zeros(&spec);
            delta.samples_mut()[col] = Complex64::new(1.0, 0.0);
            let hh = h.apply(&h.apply(&delta).unwrap()).unwrap();
            let e0 = delta.remove_param_mean(0);
            let want = e0.scale(Complex64::new(-1.0, 0.0));
            assert!(hh.sub(&want).unwrap().l2_norm() < 1e-13);
        }
    }

    #[test]
    fn riesz_symbol_values() {
        let spec = GridSpec::from_dims_points(&[2], &[8]).unwrap();
        let r1 = make_riesz(&spec, 0, 1).unwrap();
        let ff = {
            let mut ff = FreqField::zeros(&spec);
            ff.coeffs_mut()[spec.flat_index(&[1, 0])] = Complex64::new(1.0, 0.0);
            ff
        };
        let f = inverse_transform(&ff).unwrap();
        let out = forward_transform(&r1.apply(&f).unwrap()).unwrap();
        // frequency (1,0): symbol -i * 1 / 1
        assert!((out.at(&[1, 0]) - Complex64::new(0.0, -1.0)).norm() < 1e-13);
        // constants map to zero
        let c = Field::constant(&spec, Complex64::new(2.0, 1.0));
        assert!(r1.apply(&c).unwrap().l2_norm() < 1e-13);
        // j out of range
        assert!(make_riesz(&spec, 0, 3).is_err());
        // j = 0 is the identity
        let id = make_riesz(&spec, 0, 0).unwrap();
        let g = Field::random(&spec, 3);
        assert!(id.apply(&g).unwrap().sub(&g).unwrap().l2_norm() < 1e-12);
    }

    #[test]
    fn riesz_squares_sum_to_minus_identity_dense() {
        let spec = GridSpec::from_dims_points(&[2], &[8]).unwrap();
        let r: Vec<Multiplier> = (1..=2).map(|j| make_riesz(&spec, 0, j).unwrap()).collect();
        for col in 0..spec.total_points() {
            let mut delta = Field::zeros(&spec);
            delta.samples_mut()[col] = Complex64::new(1.0, 0.0);
            let mut acc = Field::zeros(&spec);
            for rj in &r {
                acc = acc.add(&rj.apply(&rj.apply(&delta).unwrap()).unwrap()).unwrap();
            }
            let want = delta.remove_param_mean(0).scale(Complex64::new(-1.0, 0.0));
            assert!(acc.sub(&want).unwrap().l2_norm() < 1e-12);
        }
    }

    #[test]
    fn cone_projection_axis_and_opposite() {
        let spec = GridSpec::from_dims_points(&[2], &[16]).unwrap();
        let cone = ConeSpec::ball(0, &[1.0, 0.0], 0.5, 0.2).unwrap();
        let p = make_cone_projection(&spec, &cone).unwrap();
        let along = spec.flat_index(&[3, 0]); // frequency (3, 0) along the axis
        assert!((p.symbol()[along] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let against = spec.flat_index(&[16 - 3, 0]); // frequency (-3, 0)
        assert!(p.symbol()[against].norm() < 1e-15);
        let origin = spec.flat_index(&[0, 0]);
        assert!(p.symbol()[origin].norm() < 1e-15);
    }

    #[test]
    fn cone_lattice_fraction_matches_area_oracle() {
        // Monte-Carlo area oracle for the plane cone of half-angle pi/4.
        let spec = GridSpec::from_dims_points(&[2], &[32]).unwrap();
        let cone = ConeSpec::ball(0, &[1.0, 0.0], PI / 4.0, 0.2).unwrap();
        let p = make_cone_projection(&spec, &cone).unwrap();
        let lattice_fraction = p.symbol().iter().filter(|z| z.norm() > 0.5).count() as f64
            / spec.total_points() as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut hits = 0usize;
        let samples = 200_000;
        for _ in 0..samples {
            let x: f64 = rng.gen_range(-16.0..16.0);
            let y: f64 = rng.gen_range(-16.0..16.0);
            if cone.contains(&[x, y]) {
                hits += 1;
            }
        }
        let mc_fraction = hits as f64 / samples as f64;
        assert!(
            (lattice_fraction - mc_fraction).abs() < 0.05,
            "lattice {lattice_fraction} vs mc {mc_fraction}"
        );
    }

    #[test]
    fn smooth_cone_sandwich_on_lattice() {
        let spec = GridSpec::from_dims_points(&[2], &[64]).unwrap();
        for base in [ConeBase::Ball, ConeBase::Cube] {
            let cone = ConeSpec::new(0, vec![0.6, 0.8], 0.5, base, 0.3, 2).unwrap();
            let proj = make_cone_projection(&spec, &cone).unwrap();
            let smooth = make_smooth_cone(&spec, &cone).unwrap();
            let dilated = {
                let mut c = cone.clone();
                c.aperture = match base {
                    ConeBase::Ball => (1.0 + cone.tau) * cone.aperture,
                    // dilating the cube aperture multiplies tan r by 1+tau
                    ConeBase::Cube => ((1.0 + cone.tau) * cone.aperture.tan()).atan(),
                };
                make_cone_projection(&spec, &c).unwrap()
            };
            for i in 0..spec.total_points() {
                let lo = proj.symbol()[i].re;
                let mid = smooth.symbol()[i].re;
                let hi = dilated.symbol()[i].re;
                assert!(lo - 1e-12 <= mid && mid <= hi + 1e-12, "sandwich fails at {i}");
            }
        }
    }

    #[test]
    fn smooth_cone_profile_endpoints_and_midpoint() {
        let cone = ConeSpec::ball(0, &[1.0, 0.0], 0.5, 0.4).unwrap();
        assert_eq!(cone.radial_profile(0.0), 1.0);
        assert_eq!(cone.radial_profile(0.5), 1.0);
        assert_eq!(cone.radial_profile(0.7), 0.0);
        assert_eq!(cone.radial_profile(1.0), 0.0);
        // midpoint of the transition is exactly 1/2 by smoothstep symmetry
        let mid = 0.5 * (0.5 + 0.7);
        assert!((cone.radial_profile(mid) - 0.5).abs() < 1e-12);
        for m in 0..=4 {
            assert!((smoothstep(m, 0.5) - 0.5).abs() < 1e-12);
            assert_eq!(smoothstep(m, 0.0), 0.0);
            assert_eq!(smoothstep(m, 1.0), 1.0);
        }
    }

    #[test]
    fn smooth_cone_rejects_wide_aperture() {
        let spec = GridSpec::from_dims_points(&[2], &[8]).unwrap();
        let cone = ConeSpec::ball(0, &[1.0, 0.0], 1.4, 0.3).unwrap();
        assert!(make_smooth_cone(&spec, &cone).is_err());
    }

    #[test]
    fn smooth_cone_annihilates_opposing_support() {
        let spec = GridSpec::from_dims_points(&[2], &[32]).unwrap();
        let cone = ConeSpec::ball(0, &[1.0, 0.0], 0.6, 0.2).unwrap();
        let smooth = make_smooth_cone(&spec, &cone).unwrap();
        let opp = cone.opposite();
        // random coefficients supported in the opposing cone
        let mut ff = FreqField::zeros(&spec);
        let shape = spec.shape();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut placed = 0;
        for flat in 0..spec.total_points() {
            let multi = spec.multi_index(flat);
            let block: Vec<f64> = multi
                .iter()
                .zip(&shape)
                .map(|(&i, &n)| GridSpec::signed_freq(i, n) as f64)
                .collect();
            if opp.contains(&block) {
                ff.coeffs_mut()[flat] =
                    Complex64::new(rng.sample(rand_distr::StandardNormal), 0.0);
                placed += 1;
            }
        }
        assert!(placed > 0);
        let f = inverse_transform(&ff).unwrap();
        assert!(smooth.apply(&f).unwrap().l2_norm() < 1e-13 * f.l2_norm());
    }

    #[test]
    fn tensor_separable_action() {
        let spec = GridSpec::from_dims_points(&[1, 1, 1], &[8, 8, 8]).unwrap();
        let line = circle(8);
        let f1 = Field::random(&line, 1);
        let g2 = Field::random(&line, 2);
        let h3 = Field::random(&line, 3);
        let prod = |a: &Field, b: &Field, c: &Field| -> Field {
            let mut out = Field::zeros(&spec);
            lattice::visit_lattice(&spec, |flat, multi| {
                out.samples_mut()[flat] =
                    a.samples()[multi[0]] * b.samples()[multi[1]] * c.samples()[multi[2]];
            });
            out
        };
        let f = prod(&f1, &g2, &h3);
        let t = tensor(&[
            make_hilbert(&spec, 0).unwrap(),
            make_hilbert(&spec, 2).unwrap(),
        ])
        .unwrap();
        let out = t.apply(&f).unwrap();
        let h = make_hilbert(&line, 0).unwrap();
        let want = prod(&h.apply(&f1).unwrap(), &g2, &h.apply(&h3).unwrap());
        assert!(out.sub(&want).unwrap().l2_norm() < 1e-12);
    }

    #[test]
    fn tensor_of_identities_and_overlap_rejection() {
        let spec = GridSpec::from_dims_points(&[1, 1], &[8, 8]).unwrap();
        let id = tensor(&[Multiplier::identity(&spec), Multiplier::identity(&spec)]).unwrap();
        let f = Field::random(&spec, 5);
        assert!(id.apply(&f).unwrap().sub(&f).unwrap().l2_norm() < 1e-12);
        let h0 = make_hilbert(&spec, 0).unwrap();
        assert!(tensor(&[h0.clone(), h0]).is_err());
    }

    #[test]
    fn tensor_riesz_symbol_is_product() {
        let spec = GridSpec::from_dims_points(&[2, 2], &[8, 8]).unwrap();
        let t = tensor(&[
            make_riesz(&spec, 0, 1).unwrap(),
            make_riesz(&spec, 1, 1).unwrap(),
        ])
        .unwrap();
        // frequency (xi, eta) = ((1,2), (2,1))
        let multi = [1usize, 2, 2, 1];
        let flat = spec.flat_index(&multi);
        let n1 = (1.0f64 + 4.0).sqrt();
        let n2 = (4.0f64 + 1.0).sqrt();
        let want = Complex64::new(0.0, -1.0 / n1) * Complex64::new(0.0, -2.0 / n2);
        assert!((t.symbol()[flat] - want).norm() < 1e-13);
    }

    #[test]
    fn adjoint_pairing() {
        let spec = GridSpec::from_dims_points(&[1, 1], &[8, 8]).unwrap();
        let m = Multiplier::random_contraction(&spec, 17);
        let f = Field::random(&spec, 1);
        let g = Field::random(&spec, 2);
        let lhs = m.apply(&f).unwrap().inner_product(&g).unwrap();
        let rhs = f.inner_product(&m.adjoint().apply(&g).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn disjoint_multipliers_commute() {
        let spec = GridSpec::from_dims_points(&[1, 1], &[8, 8]).unwrap();
        let a = make_hilbert(&spec, 0).unwrap();
        let b = make_hilbert(&spec, 1).unwrap();
        let f = Field::random(&spec, 4);
        let ab = a.apply(&b.apply(&f).unwrap()).unwrap();
        let ba = b.apply(&a.apply(&f).unwrap()).unwrap();
        assert!(ab.sub(&ba).unwrap().l2_norm() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn constructor_symbols_are_contractions() {
        let spec = GridSpec::from_dims_points(&[2], &[8]).unwrap();
        let cone = ConeSpec::ball(0, &[1.0, 0.0], 0.5, 0.2).unwrap();
        let candidates = vec![
            make_riesz(&spec, 0, 1).unwrap(),
            make_cone_projection(&spec, &cone).unwrap(),
            make_smooth_cone(&spec, &cone).unwrap(),
            Multiplier::identity(&spec),
        ];
        for m in candidates {
            assert!(m.max_abs_symbol() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn descriptor_json_round_trip() {
        let cone = ConeSpec::ball(1, &[0.0, 1.0], 0.6, 0.2).unwrap();
        let kind = MultiplierKind::Tensor {
            children: vec![
                MultiplierKind::Riesz { k: 0, j: 2 },
                MultiplierKind::SmoothCone { cone },
            ],
        };
        let s = serde_json::to_string(&kind).unwrap();
        let back: MultiplierKind = serde_json::from_str(&s).unwrap();
        assert_eq!(kind, back);
    }
}
