//! Iterated commutators of multiplier/shift operators with symbol
//! multiplication, L2 operator-norm estimation, opposing-support test
//! functions, and the bilinear form dual to iterated commutators.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicShift;
use crate::lattice::{self, Field, FreqField, GridSpec};
use crate::multiplier::{ConeBase, ConeSpec, Multiplier, MultiplierKind};
use crate::{Error, Result};

type Evaluator = Arc<dyn Fn(&Field) -> Field + Send + Sync>;

/// Construction tree of an operator, echoed in CLI reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OpDescriptor {
    Multiplier { kind: MultiplierKind },
    Shift { complexity: (usize, usize, usize, usize) },
    SymbolMultiplication { label: String },
    Compose { children: Vec<OpDescriptor> },
    Sum { children: Vec<OpDescriptor> },
    Difference { left: Box<OpDescriptor>, right: Box<OpDescriptor> },
    Scaled { re: f64, im: f64, inner: Box<OpDescriptor> },
    Commutator { outer: Box<OpDescriptor>, inner: Box<OpDescriptor> },
    Custom { label: String },
}

/// A linear operator on fields: a pure evaluator, its adjoint, and a
/// descriptor. Operators are closures over multiplier/shift primitives;
/// matrices are only materialized inside the dense norm oracle.
#[derive(Clone)]
pub struct LinearOperator {
    spec: GridSpec,
    forward: Evaluator,
    adjoint: Evaluator,
    descriptor: OpDescriptor,
    params: BTreeSet<usize>,
}

impl std::fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearOperator")
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

impl LinearOperator {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn descriptor(&self) -> &OpDescriptor {
        &self.descriptor
    }

    /// Parameters the operator acts on (empty when unknown or none).
    pub fn touched_params(&self) -> &BTreeSet<usize> {
        &self.params
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        if f.spec() != &self.spec {
            return Err(Error::SpecMismatch);
        }
        Ok((self.forward)(f))
    }

    pub fn apply_adjoint(&self, f: &Field) -> Result<Field> {
        if f.spec() != &self.spec {
            return Err(Error::SpecMismatch);
        }
        Ok((self.adjoint)(f))
    }

    pub fn adjoint(&self) -> LinearOperator {
        LinearOperator {
            spec: self.spec.clone(),
            forward: self.adjoint.clone(),
            adjoint: self.forward.clone(),
            descriptor: OpDescriptor::Custom {
                label: "adjoint".into(),
            },
            params: self.params.clone(),
        }
    }

    pub fn from_fn(
        spec: &GridSpec,
        params: impl IntoIterator<Item = usize>,
        label: impl Into<String>,
        forward: impl Fn(&Field) -> Field + Send + Sync + 'static,
        adjoint: impl Fn(&Field) -> Field + Send + Sync + 'static,
    ) -> LinearOperator {
        LinearOperator {
            spec: spec.clone(),
            forward: Arc::new(forward),
            adjoint: Arc::new(adjoint),
            descriptor: OpDescriptor::Custom { label: label.into() },
            params: params.into_iter().collect(),
        }
    }

    pub fn identity(spec: &GridSpec) -> LinearOperator {
        LinearOperator {
            spec: spec.clone(),
            forward: Arc::new(|f: &Field| f.clone()),
            adjoint: Arc::new(|f: &Field| f.clone()),
            descriptor: OpDescriptor::Custom { label: "identity".into() },
            params: BTreeSet::new(),
        }
    }

    pub fn zero(spec: &GridSpec) -> LinearOperator {
        let s1 = spec.clone();
        let s2 = spec.clone();
        LinearOperator {
            spec: spec.clone(),
            forward: Arc::new(move |_| Field::zeros(&s1)),
            adjoint: Arc::new(move |_| Field::zeros(&s2)),
            descriptor: OpDescriptor::Custom { label: "zero".into() },
            params: BTreeSet::new(),
        }
    }

    pub fn from_multiplier(m: &Multiplier) -> LinearOperator {
        let fwd = m.clone();
        let adj = m.adjoint();
        LinearOperator {
            spec: m.spec().clone(),
            forward: Arc::new(move |f: &Field| fwd.apply(f).expect("spec fixed")),
            adjoint: Arc::new(move |f: &Field| adj.apply(f).expect("spec fixed")),
            descriptor: OpDescriptor::Multiplier { kind: m.meta().clone() },
            params: m.touched_params().clone(),
        }
    }

    pub fn from_shift(s: &DyadicShift) -> LinearOperator {
        let fwd = s.clone();
        let adj = s.clone();
        let params: BTreeSet<usize> = [0, 1].into_iter().collect();
        LinearOperator {
            spec: s.grid().clone(),
            forward: Arc::new(move |f: &Field| fwd.apply(f).expect("spec fixed")),
            adjoint: Arc::new(move |f: &Field| adj.apply_adjoint(f).expect("spec fixed")),
            descriptor: OpDescriptor::Shift {
                complexity: s.complexity(),
            },
            params,
        }
    }

    /// Multiplication by a symbol field; the adjoint multiplies by its
    /// conjugate.
    pub fn multiply_by(b: &Field, label: impl Into<String>) -> LinearOperator {
        let bc = b.clone();
        let bconj = b.conj();
        let params: BTreeSet<usize> = (0..b.spec().num_params()).collect();
        LinearOperator {
            spec: b.spec().clone(),
            forward: Arc::new(move |f: &Field| bc.mul_pointwise(f).expect("spec fixed")),
            adjoint: Arc::new(move |f: &Field| bconj.mul_pointwise(f).expect("spec fixed")),
            descriptor: OpDescriptor::SymbolMultiplication { label: label.into() },
            params,
        }
    }

    /// Composition `ops[0] . ops[1] . ... ` (applied right to left).
    pub fn compose(ops: &[LinearOperator]) -> Result<LinearOperator> {
        if ops.is_empty() {
            return Err(Error::InvalidArgument("empty composition".into()));
        }
        let spec = ops[0].spec.clone();
        if ops.iter().any(|o| o.spec != spec) {
            return Err(Error::SpecMismatch);
        }
        let fwd: Vec<Evaluator> = ops.iter().map(|o| o.forward.clone()).collect();
        let adj: Vec<Evaluator> = ops.iter().map(|o| o.adjoint.clone()).collect();
        let params = ops
            .iter()
            .flat_map(|o| o.params.iter().copied())
            .collect();
        Ok(LinearOperator {
            spec,
            forward: Arc::new(move |f: &Field| {
                let mut cur = f.clone();
                for ev in fwd.iter().rev() {
                    cur = ev(&cur);
                }
                cur
            }),
            adjoint: Arc::new(move |f: &Field| {
                let mut cur = f.clone();
                for ev in adj.iter() {
                    cur = ev(&cur);
                }
                cur
            }),
            descriptor: OpDescriptor::Compose {
                children: ops.iter().map(|o| o.descriptor.clone()).collect(),
            },
            params,
        })
    }

    pub fn sub(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
        if a.spec != b.spec {
            return Err(Error::SpecMismatch);
        }
        let (af, bf) = (a.forward.clone(), b.forward.clone());
        let (aa, ba) = (a.adjoint.clone(), b.adjoint.clone());
        let params = a.params.union(&b.params).copied().collect();
        Ok(LinearOperator {
            spec: a.spec.clone(),
            forward: Arc::new(move |f: &Field| af(f).sub(&bf(f)).expect("spec fixed")),
            adjoint: Arc::new(move |f: &Field| aa(f).sub(&ba(f)).expect("spec fixed")),
            descriptor: OpDescriptor::Difference {
                left: Box::new(a.descriptor.clone()),
                right: Box::new(b.descriptor.clone()),
            },
            params,
        })
    }

    pub fn add(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
        if a.spec != b.spec {
            return Err(Error::SpecMismatch);
        }
        let (af, bf) = (a.forward.clone(), b.forward.clone());
        let (aa, ba) = (a.adjoint.clone(), b.adjoint.clone());
        let params = a.params.union(&b.params).copied().collect();
        Ok(LinearOperator {
            spec: a.spec.clone(),
            forward: Arc::new(move |f: &Field| af(f).add(&bf(f)).expect("spec fixed")),
            adjoint: Arc::new(move |f: &Field| aa(f).add(&ba(f)).expect("spec fixed")),
            descriptor: OpDescriptor::Sum {
                children: vec![a.descriptor.clone(), b.descriptor.clone()],
            },
            params,
        })
    }

    pub fn scale(op: &LinearOperator, c: Complex64) -> LinearOperator {
        let fwd = op.forward.clone();
        let adj = op.adjoint.clone();
        let cc = c.conj();
        LinearOperator {
            spec: op.spec.clone(),
            forward: Arc::new(move |f: &Field| fwd(f).scale(c)),
            adjoint: Arc::new(move |f: &Field| adj(f).scale(cc)),
            descriptor: OpDescriptor::Scaled {
                re: c.re,
                im: c.im,
                inner: Box::new(op.descriptor.clone()),
            },
            params: op.params.clone(),
        }
    }
}

/// Operator bracket `[a, x] = a x - x a` with the derived adjoint
/// `[a, x]* = x* a* - a* x*`.
pub fn bracket(a: &LinearOperator, x: &LinearOperator) -> Result<LinearOperator> {
    if a.spec != x.spec {
        return Err(Error::SpecMismatch);
    }
    let (af, xf) = (a.forward.clone(), x.forward.clone());
    let (aa, xa) = (a.adjoint.clone(), x.adjoint.clone());
    let params = a.params.union(&x.params).copied().collect();
    Ok(LinearOperator {
        spec: a.spec.clone(),
        forward: Arc::new(move |f: &Field| af(&xf(f)).sub(&xf(&af(f))).expect("spec fixed")),
        adjoint: Arc::new(move |f: &Field| xa(&aa(f)).sub(&aa(&xa(f))).expect("spec fixed")),
        descriptor: OpDescriptor::Commutator {
            outer: Box::new(a.descriptor.clone()),
            inner: Box::new(x.descriptor.clone()),
        },
        params,
    })
}

/// `[T, b] : f -> T(b f) - b T(f)`.
pub fn commutator(t: &LinearOperator, b: &Field) -> Result<LinearOperator> {
    if b.spec() != &t.spec {
        return Err(Error::SpecMismatch);
    }
    if !b.is_finite() {
        return Err(Error::NonFinite(0));
    }
    bracket(t, &LinearOperator::multiply_by(b, "b"))
}

/// Right-nested iterated commutator `[T_1, [T_2, ..., [T_l, b] ...]]`.
///
/// Operators acting on overlapping parameter groups are legal but unusual
/// for the two-sided estimates; a warning is logged.
pub fn iterated_commutator(ts: &[LinearOperator], b: &Field) -> Result<LinearOperator> {
    if ts.is_empty() {
        return Err(Error::InvalidArgument("empty operator list".into()));
    }
    for (i, a) in ts.iter().enumerate() {
        for x in ts.iter().skip(i + 1) {
            if !a.params.is_disjoint(&x.params) {
                log::warn!(
                    "iterated commutator operators act on overlapping parameter groups: {:?} vs {:?}",
                    a.params,
                    x.params
                );
            }
        }
    }
    let mut x = LinearOperator::multiply_by(b, "b");
    for t in ts.iter().rev() {
        x = bracket(t, &x)?;
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Power,
    Dense,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NormOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            tol: 1e-6,
            max_iter: 500,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub method: NormMethod,
    pub iterations: usize,
    pub residual: f64,
    pub seed: u64,
    pub converged: bool,
}

/// Largest singular value via power iteration on `A* A`. The Rayleigh
/// quotient increases monotonically, so a truncated run is always a lower
/// estimate. Linearity is probed on a seeded pair before iterating.
pub fn operator_norm(
    a: &LinearOperator,
    method: NormMethod,
    opts: NormOptions,
) -> Result<NormEstimate> {
    {
        let f = Field::random_unit(&a.spec, opts.seed.wrapping_add(0x11));
        let g = Field::random_unit(&a.spec, opts.seed.wrapping_add(0x22));
        let alpha = Complex64::new(0.7, -0.4);
        let lhs = (a.forward)(&f.add(&g.scale(alpha))?);
        let rhs = (a.forward)(&f).add(&(a.forward)(&g).scale(alpha))?;
        let err = lhs.sub(&rhs)?.l2_norm();
        let scale = rhs.l2_norm().max(1.0);
        if err > 1e-8 * scale {
            return Err(Error::InvalidArgument(format!(
                "operator failed the linearity probe (residual {err:.3e})"
            )));
        }
    }
    match method {
        NormMethod::Power => {
            let apply = |f: &Field| (a.forward)(f);
            let apply_adj = |f: &Field| (a.adjoint)(f);
            let (value, iterations, residual, converged) = power_iterate(
                &a.spec,
                &apply,
                &apply_adj,
                opts.tol,
                opts.max_iter,
                opts.seed,
            );
            Ok(NormEstimate {
                value,
                method,
                iterations,
                residual,
                seed: opts.seed,
                converged,
            })
        }
        NormMethod::Dense => {
            let n = a.spec.total_points();
            if n > 4096 {
                return Err(Error::InvalidArgument(format!(
                    "dense method allowed only up to 4096 points, grid has {n}"
                )));
            }
            // materialize columns
            let mut matrix = vec![Complex64::new(0.0, 0.0); n * n];
            for j in 0..n {
                let mut delta = Field::zeros(&a.spec);
                delta.samples_mut()[j] = Complex64::new(1.0, 0.0);
                let col = (a.forward)(&delta);
                for i in 0..n {
                    matrix[j * n + i] = col.samples()[i];
                }
            }
            let matvec = |v: &[Complex64], out: &mut [Complex64]| {
                out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                for (j, &vj) in v.iter().enumerate() {
                    if vj != Complex64::new(0.0, 0.0) {
                        let col = &matrix[j * n..(j + 1) * n];
                        for (o, &m) in out.iter_mut().zip(col) {
                            *o += m * vj;
                        }
                    }
                }
            };
            let matvec_adj = |v: &[Complex64], out: &mut [Complex64]| {
                for (j, o) in out.iter_mut().enumerate() {
                    let col = &matrix[j * n..(j + 1) * n];
                    *o = col.iter().zip(v).map(|(&m, &x)| m.conj() * x).sum();
                }
            };
            // a few seeded restarts; keep the largest Rayleigh limit
            let mut best = NormEstimate {
                value: 0.0,
                method,
                iterations: 0,
                residual: 0.0,
                seed: opts.seed,
                converged: true,
            };
            for restart in 0..3 {
                let seed = opts.seed.wrapping_add(restart);
                let (value, iterations, residual, converged) = power_iterate_vec(
                    n,
                    &matvec,
                    &matvec_adj,
                    1e-10,
                    opts.max_iter.max(2000) * 5,
                    seed,
                );
                if value > best.value {
                    best.value = value;
                    best.iterations = iterations;
                    best.residual = residual;
                    best.seed = seed;
                    best.converged = converged;
                }
            }
            Ok(best)
        }
    }
}

fn power_iterate(
    spec: &GridSpec,
    apply: &dyn Fn(&Field) -> Field,
    apply_adj: &dyn Fn(&Field) -> Field,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> (f64, usize, f64, bool) {
    let mut v = Field::random(spec, seed);
    let nv = v.l2_norm();
    if nv == 0.0 {
        return (0.0, 0, 0.0, true);
    }
    v = v.scale(Complex64::new(1.0 / nv, 0.0));
    let mut sigma = 0.0f64;
    for it in 1..=max_iter {
        let w = apply(&v);
        let new_sigma = w.l2_norm();
        if new_sigma < 1e-300 {
            return (0.0, it, 0.0, true);
        }
        let u = apply_adj(&w);
        let nu = u.l2_norm();
        let residual = u
            .sub(&v.scale(Complex64::new(new_sigma * new_sigma, 0.0)))
            .map(|d| d.l2_norm() / (new_sigma * new_sigma))
            .unwrap_or(f64::INFINITY);
        let done = (new_sigma - sigma).abs() <= tol * new_sigma.max(1e-300);
        sigma = new_sigma;
        if done {
            return (sigma, it, residual, true);
        }
        if nu == 0.0 {
            return (sigma, it, residual, true);
        }
        v = u.scale(Complex64::new(1.0 / nu, 0.0));
    }
    (sigma, max_iter, f64::NAN, false)
}

fn power_iterate_vec(
    n: usize,
    matvec: &dyn Fn(&[Complex64], &mut [Complex64]),
    matvec_adj: &dyn Fn(&[Complex64], &mut [Complex64]),
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> (f64, usize, f64, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| {
            Complex64::new(
                rng.sample(rand_distr::StandardNormal),
                rng.sample(rand_distr::StandardNormal),
            )
        })
        .collect();
    let norm = |x: &[Complex64]| x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nv = norm(&v);
    for z in &mut v {
        *z /= nv;
    }
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    let mut sigma = 0.0f64;
    for it in 1..=max_iter {
        matvec(&v, &mut w);
        let new_sigma = norm(&w);
        if new_sigma < 1e-300 {
            return (0.0, it, 0.0, true);
        }
        matvec_adj(&w, &mut u);
        let mut res = 0.0f64;
        for (ui, vi) in u.iter().zip(&v) {
            res += (ui - vi * (new_sigma * new_sigma)).norm_sqr();
        }
        let residual = res.sqrt() / (new_sigma * new_sigma);
        let done = (new_sigma - sigma).abs() <= tol * new_sigma.max(1e-300);
        sigma = new_sigma;
        if done {
            return (sigma, it, residual, true);
        }
        let nu = norm(&u);
        if nu == 0.0 {
            return (sigma, it, residual, true);
        }
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi = ui / nu;
        }
    }
    (sigma, max_iter, f64::NAN, false)
}

/// Tensor-product test function with per-parameter Fourier support in the
/// opposing cones `D(-xi_k, r_k)`; parameters without a cone hold the
/// constant. The smooth cone operators of the given cones annihilate it.
pub fn opposing_test_function(
    spec: &GridSpec,
    cones: &[ConeSpec],
    seed: u64,
) -> Result<Field> {
    if cones.is_empty() {
        return Err(Error::InvalidArgument("need at least one cone".into()));
    }
    let mut by_param: Vec<Option<&ConeSpec>> = vec![None; spec.num_params()];
    for cone in cones {
        if cone.param >= spec.num_params() {
            return Err(Error::InvalidArgument(format!("no parameter {}", cone.param)));
        }
        if cone.base == ConeBase::Ball && (1.0 + cone.tau) * cone.aperture >= std::f64::consts::FRAC_PI_2
        {
            return Err(Error::InvalidArgument(
                "(1+tau) * aperture must stay below pi/2".into(),
            ));
        }
        if by_param[cone.param].is_some() {
            return Err(Error::InvalidArgument(format!(
                "two cones on parameter {}",
                cone.param
            )));
        }
        by_param[cone.param] = Some(cone);
    }
    let shape = spec.shape();
    // per parameter: map of block-coordinates -> coefficient
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_param_coeffs: Vec<std::collections::HashMap<Vec<usize>, Complex64>> = Vec::new();
    for (k, chosen) in by_param.iter().enumerate() {
        let axes: Vec<usize> = spec.param_axes(k).collect();
        let mut map = std::collections::HashMap::new();
        match *chosen {
            None => {
                map.insert(vec![0usize; axes.len()], Complex64::new(1.0, 0.0));
            }
            Some(cone) => {
                let opp = cone.opposite();
                // enumerate this parameter's frequency blocks
                let mut idx = vec![0usize; axes.len()];
                loop {
                    let block: Vec<f64> = idx
                        .iter()
                        .zip(&axes)
                        .map(|(&i, &a)| GridSpec::signed_freq(i, shape[a]) as f64)
                        .collect();
                    if opp.contains(&block) {
                        map.insert(
                            idx.clone(),
                            Complex64::new(
                                rng.sample(rand_distr::StandardNormal),
                                rng.sample(rand_distr::StandardNormal),
                            ),
                        );
                    }
                    let mut a = axes.len();
                    loop {
                        if a == 0 {
                            break;
                        }
                        a -= 1;
                        idx[a] += 1;
                        if idx[a] < shape[axes[a]] {
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
                if map.is_empty() {
                    let hint = minimum_points_hint(cone);
                    return Err(Error::EmptySupport(format!(
                        "no lattice frequencies in the opposing cone of parameter {k}; \
                         try at least {hint} points per axis",
                    )));
                }
            }
        }
        per_param_coeffs.push(map);
    }
    let mut ff = FreqField::zeros(spec);
    lattice::visit_lattice(spec, |flat, multi| {
        let mut value = Complex64::new(1.0, 0.0);
        for (k, map) in per_param_coeffs.iter().enumerate() {
            let coords: Vec<usize> = spec.param_axes(k).map(|a| multi[a]).collect();
            match map.get(&coords) {
                Some(&c) => value *= c,
                None => {
                    value = Complex64::new(0.0, 0.0);
                }
            }
        }
        if value != Complex64::new(0.0, 0.0) {
            ff.coeffs_mut()[flat] = value;
        }
    });
    let f = lattice::inverse_transform(&ff)?;
    let n = f.l2_norm();
    if n == 0.0 {
        return Err(Error::EmptySupport("empty opposing support".into()));
    }
    Ok(f.scale(Complex64::new(1.0 / n, 0.0)))
}

/// Smallest power-of-two axis size whose lattice meets the opposing cone.
fn minimum_points_hint(cone: &ConeSpec) -> usize {
    let opp = cone.opposite();
    let mut n = 4usize;
    while n <= 4096 {
        let half = (n / 2) as i64;
        let dim = cone.direction.len();
        let mut idx = vec![-half; dim];
        loop {
            let block: Vec<f64> = idx.iter().map(|&i| i as f64).collect();
            if opp.contains(&block) {
                return n;
            }
            let mut a = dim;
            loop {
                if a == 0 {
                    break;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < half {
                    break;
                }
                idx[a] = -half;
                if a == 0 {
                    a = usize::MAX;
                    break;
                }
            }
            if a == usize::MAX {
                break;
            }
        }
        n *= 2;
    }
    4096
}

/// The field `Pi(f, g)` with `<[T_1, [..., [T_l, b]...]] f, g> = <b, Pi(f, g)>`
/// for every symbol `b`, generated mechanically from the bracket tree:
/// `Pi_{[T, X]}(f, g) = Pi_X(f, T* g) - Pi_X(T f, g)` with base case
/// `conj(f) g`.
pub fn pi_form(f: &Field, g: &Field, ts: &[LinearOperator]) -> Result<Field> {
    if f.spec() != g.spec() {
        return Err(Error::SpecMismatch);
    }
    for t in ts {
        if t.spec() != f.spec() {
            return Err(Error::SpecMismatch);
        }
    }
    match ts.split_first() {
        None => f.conj().mul_pointwise(g),
        Some((t, rest)) => {
            let left = pi_form(f, &t.apply_adjoint(g)?, rest)?;
            let right = pi_form(&t.apply(f)?, g, rest)?;
            left.sub(&right)
        }
    }
}

/// The operator `P1perp P2perp M_b P1 P2` whose translated cuts in a third
/// variable approach its norm from below.
pub fn toeplitz_core(spec: &GridSpec, b: &Field) -> Result<LinearOperator> {
    let p1 = crate::multiplier::make_positive_projection(spec, 0)?;
    let p2 = crate::multiplier::make_positive_projection(spec, 1)?;
    let m1 = crate::multiplier::make_negative_projection(spec, 0)?;
    let m2 = crate::multiplier::make_negative_projection(spec, 1)?;
    let pos = crate::multiplier::tensor(&[p1, p2])?;
    let neg = crate::multiplier::tensor(&[m1, m2])?;
    LinearOperator::compose(&[
        LinearOperator::from_multiplier(&neg),
        LinearOperator::multiply_by(b, "b"),
        LinearOperator::from_multiplier(&pos),
    ])
}

/// `Q B Q` with `Q` the projection onto frequencies `n_k > -shift` of
/// parameter `k`: the discrete form of conjugating the one-sided cut by
/// frequency translations. `shift = 0` is the plain one-sided cut.
pub fn toeplitz_translated_cut(
    core: &LinearOperator,
    k: usize,
    shift: i64,
) -> Result<LinearOperator> {
    let q = crate::multiplier::make_halfline_cut(core.spec(), k, -shift)?;
    let q = LinearOperator::from_multiplier(&q);
    LinearOperator::compose(&[q.clone(), core.clone(), q])
}
