//! Zonal harmonics on spheres, expansion of odd cone profiles, and
//! synthesis of product-type cone multipliers from them.
//!
//! The degree-`n` zonal harmonic with pole `xi` evaluated at `eta` depends
//! only on `t = <xi, eta>`; normalized to 1 at the pole it satisfies the
//! three-term recurrence `(n+d-2) P_{n+1} = (2n+d-2) t P_n - n P_{n-1}`,
//! which is Chebyshev for `d = 2` and Legendre for `d = 3`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::{self, Field, GridSpec};
use crate::multiplier::{orthogonal_basis, smoothstep, JourneDesc, Multiplier, MultiplierKind};
use crate::{Error, Result};

/// Degree-`n` zonal harmonic on the `(d-1)`-sphere at cosine `t`,
/// normalized so the value at the pole (`t = 1`) is exactly 1.
pub fn zonal_eval(n: usize, d: usize, t: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument("zonal harmonics need d >= 2".into()));
    }
    if t.abs() > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!("t = {t} outside [-1, 1]")));
    }
    let t = t.clamp(-1.0, 1.0);
    // evaluate at |t| and restore by parity so that parity is exact
    let v = zonal_raw(n, d, t.abs());
    Ok(if t < 0.0 && n % 2 == 1 { -v } else { v })
}

/// All degrees `0..=n_max` at once; same normalization and parity handling
/// as [`zonal_eval`].
pub fn zonal_eval_all(n_max: usize, d: usize, t: f64) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::InvalidArgument("zonal harmonics need d >= 2".into()));
    }
    if t.abs() > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!("t = {t} outside [-1, 1]")));
    }
    let t = t.clamp(-1.0, 1.0);
    let ta = t.abs();
    let mut out = vec![0.0; n_max + 1];
    let mut pm1 = 1.0;
    let mut p = ta;
    out[0] = 1.0;
    if n_max >= 1 {
        out[1] = if t < 0.0 { -p } else { p };
    }
    for n in 1..n_max {
        let next = ((2 * n + d - 2) as f64 * ta * p - n as f64 * pm1) / (n + d - 2) as f64;
        pm1 = p;
        p = next;
        out[n + 1] = if t < 0.0 && (n + 1) % 2 == 1 { -p } else { p };
    }
    Ok(out)
}

fn zonal_raw(n: usize, d: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut pm1 = 1.0;
    let mut p = t;
    for k in 1..n {
        let next = ((2 * k + d - 2) as f64 * t * p - k as f64 * pm1) / (k + d - 2) as f64;
        pm1 = p;
        p = next;
    }
    p
}

/// Odd plateau profile: `phi == 1` on `[a, 1]`, `phi == 0` on `[0, b]`,
/// smoothstep of the given order in between, extended oddly to `[-1, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiProfile {
    pub a: f64,
    pub b: f64,
    pub order: usize,
}

impl PhiProfile {
    pub fn new(a: f64, b: f64, order: usize) -> Result<PhiProfile> {
        if !(0.0 < b && b < a && a < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "profile needs 0 < b < a < 1, got a={a}, b={b}"
            )));
        }
        Ok(PhiProfile { a, b, order })
    }

    /// Default plateau `(a, b) = (3/4, 1/4)` with smoothing order 4.
    pub fn default_plateau() -> PhiProfile {
        PhiProfile {
            a: 0.75,
            b: 0.25,
            order: 4,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s = t.abs();
        let v = if s <= self.b {
            0.0
        } else if s >= self.a {
            1.0
        } else {
            smoothstep(self.order, (s - self.b) / (self.a - self.b))
        };
        if t < 0.0 {
            -v
        } else {
            v
        }
    }

    /// Geodesic radius of the plateau where `phi(cos theta) == 1`.
    pub fn plateau_radius(&self) -> f64 {
        self.a.acos()
    }

    /// Interior knots of `t -> phi(t)` on `[-1, 1]`.
    fn knots(&self) -> Vec<f64> {
        vec![-self.a, -self.b, self.b, self.a]
    }
}

/// Zonal expansion coefficients of an odd profile against the weight
/// `(1 - t^2)^{(d-3)/2}`.
///
/// Even-degree coefficients vanish by parity; after a residual check they
/// are stored as exact zeros so that parity of the synthesized multipliers
/// is exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZonalCoefficients {
    pub dim: usize,
    pub degree: usize,
    pub values: Vec<f64>,
    /// Largest even-degree coefficient magnitude seen before zeroing.
    pub max_even_residual: f64,
    /// Quadrature self-check: max coefficient change under node doubling.
    pub quadrature_residual: f64,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..m {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 1..m {
            let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integrate `f(cos theta) g_n(cos theta) sin^{d-2} theta` over `[0, pi]`
/// for all `n <= n_max`, splitting at the profile knots so each piece is
/// analytic. Returns one value per degree.
fn zonal_moments(
    f: &dyn Fn(f64) -> f64,
    knots_t: &[f64],
    d: usize,
    n_max: usize,
    nodes_per_piece: usize,
) -> Vec<f64> {
    let mut cuts: Vec<f64> = vec![0.0, std::f64::consts::PI];
    for &t in knots_t {
        cuts.push(t.clamp(-1.0, 1.0).acos());
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let (gl_nodes, gl_weights) = gauss_legendre(nodes_per_piece);
    let mut acc = vec![0.0; n_max + 1];
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, wq) in gl_nodes.iter().zip(&gl_weights) {
            let theta = mid + half * x;
            let t = theta.cos();
            let weight = wq * half * theta.sin().powi(d as i32 - 2) * f(t);
            let zs = zonal_eval_all(n_max, d, t).expect("t in range");
            for (a, z) in acc.iter_mut().zip(&zs) {
                *a += weight * z;
            }
        }
    }
    acc
}

/// Expand an arbitrary piecewise-analytic function against the zonal system
/// in dimension `d`, coefficients for degrees `0..=n_max`. `knots` are the
/// interior non-smooth points of `f` in the `t` variable.
pub fn expand_against_zonal(
    f: &dyn Fn(f64) -> f64,
    knots: &[f64],
    d: usize,
    n_max: usize,
) -> Result<(Vec<f64>, f64)> {
    if d < 2 {
        return Err(Error::InvalidArgument("need d >= 2".into()));
    }
    let nodes = (2 * n_max + 64).max(96);
    // numerators and squared norms, both with a doubled-node self check
    let num_lo = zonal_moments(f, knots, d, n_max, nodes);
    let num_hi = zonal_moments(f, knots, d, n_max, 2 * nodes);
    let sq = |m: usize| -> Vec<f64> {
        let (gl_nodes, gl_weights) = gauss_legendre(m);
        let mut acc = vec![0.0; n_max + 1];
        let half = 0.5 * std::f64::consts::PI;
        for (x, wq) in gl_nodes.iter().zip(&gl_weights) {
            let theta = half + half * x;
            let t = theta.cos();
            let w = wq * half * theta.sin().powi(d as i32 - 2);
            let zs = zonal_eval_all(n_max, d, t).expect("t in range");
            for (a, z) in acc.iter_mut().zip(&zs) {
                *a += w * z * z;
            }
        }
        acc
    };
    let sq_lo = sq(nodes);
    let sq_hi = sq(2 * nodes);
    let coeff = |num: &[f64], den: &[f64]| -> Vec<f64> {
        num.iter().zip(den).map(|(n, d)| n / d).collect()
    };
    let c_lo = coeff(&num_lo, &sq_lo);
    let c_hi = coeff(&num_hi, &sq_hi);
    let residual = c_lo
        .iter()
        .zip(&c_hi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if residual > 1e-10 {
        return Err(Error::QuadratureResidual {
            residual,
            tol: 1e-10,
        });
    }
    Ok((c_hi, residual))
}

/// Zonal coefficients of a plateau profile in dimension `d`, degrees up to
/// `n_max`.
pub fn phi_coefficients(profile: &PhiProfile, d: usize, n_max: usize) -> Result<ZonalCoefficients> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("need degree cap >= 1".into()));
    }
    let p = *profile;
    let (mut values, quadrature_residual) =
        expand_against_zonal(&move |t| p.eval(t), &profile.knots(), d, n_max)?;
    let mut max_even_residual = 0.0f64;
    for (n, v) in values.iter_mut().enumerate() {
        if n % 2 == 0 {
            max_even_residual = max_even_residual.max(v.abs());
            *v = 0.0;
        }
    }
    if max_even_residual > 1e-10 {
        return Err(Error::QuadratureResidual {
            residual: max_even_residual,
            tol: 1e-10,
        });
    }
    Ok(ZonalCoefficients {
        dim: d,
        degree: n_max,
        values,
        max_even_residual,
        quadrature_residual,
    })
}

impl ZonalCoefficients {
    /// Partial sum `sum_{n <= upto} phi_n Z_n(t)`.
    pub fn partial_sum(&self, upto: usize, t: f64) -> Result<f64> {
        let upto = upto.min(self.degree);
        let zs = zonal_eval_all(upto, self.dim, t)?;
        Ok(self.values[..=upto].iter().zip(&zs).map(|(c, z)| c * z).sum())
    }

    /// Measured truncation bound `delta(N)`: sup over a dense `t`-sample of
    /// the reconstruction error of the degree-`upto` partial sum.
    pub fn reconstruction_delta(&self, profile: &PhiProfile, upto: usize) -> f64 {
        self.delta_on(profile, upto, |_| true)
    }

    /// Same sup but skipping `t` within `margin` of the transition
    /// intervals.
    pub fn reconstruction_delta_away_from_transitions(
        &self,
        profile: &PhiProfile,
        upto: usize,
        margin: f64,
    ) -> f64 {
        let (a, b) = (profile.a, profile.b);
        self.delta_on(profile, upto, |t| {
            let s = t.abs();
            s < b - margin || s > a + margin
        })
    }

    fn delta_on(&self, profile: &PhiProfile, upto: usize, keep: impl Fn(f64) -> bool) -> f64 {
        let samples = 4001;
        let mut sup = 0.0f64;
        for i in 0..samples {
            let t = -1.0 + 2.0 * i as f64 / (samples - 1) as f64;
            if !keep(t) {
                continue;
            }
            let err = (self.partial_sum(upto, t).unwrap() - profile.eval(t)).abs();
            sup = sup.max(err);
        }
        sup
    }
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

fn check_unit(v: &[f64], what: &str) -> Result<()> {
    let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!("{what} is not unit (norm {n})")));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Deterministic per-chunk seed derivation (splitmix64 mixing).
fn derive_seed(seed: u64, chunk: u64) -> u64 {
    let mut z = seed ^ chunk.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A point at geodesic distance `theta` from `pole`, tangent direction `u`
/// (unit coefficients against the orthogonal basis of the pole).
fn point_at_distance(pole: &[f64], theta: f64, u: &[f64]) -> Vec<f64> {
    let basis = orthogonal_basis(pole);
    let (c, s) = (theta.cos(), theta.sin());
    let mut out: Vec<f64> = pole.iter().map(|x| c * x).collect();
    for (coef, e) in u.iter().zip(&basis) {
        for (o, b) in out.iter_mut().zip(e) {
            *o += s * coef * b;
        }
    }
    out
}

/// Monte-Carlo conditional expectation
/// `E_a( Z^{(n)}_{eta1}(a) | d(xi1, a) = d(xi2, eta2) )`.
///
/// Sampling is uniform on the sub-sphere at the prescribed geodesic
/// distance; the expected value is the zonal product
/// `Z^{(n)}_{xi1}(eta1) Z^{(n)}_{xi2}(eta2)`. Degenerate sub-spheres
/// (distance 0 or pi, or `d = 2`) are enumerated exactly and report zero
/// standard error. Chunked seeding makes the result independent of any
/// parallel chunking of the sample budget.
#[allow(clippy::too_many_arguments)]
pub fn mc_conditional_expectation(
    n: usize,
    d: usize,
    xi1: &[f64],
    xi2: &[f64],
    eta1: &[f64],
    eta2: &[f64],
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if d < 2 {
        return Err(Error::InvalidArgument("need d >= 2".into()));
    }
    for (v, name) in [(xi1, "xi1"), (xi2, "xi2"), (eta1, "eta1"), (eta2, "eta2")] {
        if v.len() != d {
            return Err(Error::InvalidArgument(format!("{name} has wrong dimension")));
        }
        check_unit(v, name)?;
    }
    let rho = dot(xi2, eta2).clamp(-1.0, 1.0).acos();
    // one-point conditioning
    if rho.sin().abs() < 1e-14 {
        let a: Vec<f64> = xi1.iter().map(|x| rho.cos() * x).collect();
        let value = zonal_eval(n, d, dot(eta1, &a).clamp(-1.0, 1.0))?;
        return Ok(McEstimate {
            value,
            std_error: 0.0,
            samples: 1,
        });
    }
    // the circle case: the sub-sphere is a two-point set
    if d == 2 {
        let perp = [-xi1[1], xi1[0]];
        let mut acc = 0.0;
        for sgn in [1.0, -1.0] {
            let a = [
                rho.cos() * xi1[0] + sgn * rho.sin() * perp[0],
                rho.cos() * xi1[1] + sgn * rho.sin() * perp[1],
            ];
            acc += zonal_eval(n, d, dot(eta1, &a).clamp(-1.0, 1.0))?;
        }
        return Ok(McEstimate {
            value: acc / 2.0,
            std_error: 0.0,
            samples: 2,
        });
    }
    if samples < 10_000 {
        return Err(Error::InvalidArgument(
            "sample count must be at least 10^4".into(),
        ));
    }
    let chunk_size: u64 = 1 << 14;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut done = 0u64;
    let mut chunk = 0u64;
    while done < samples {
        let m = chunk_size.min(samples - done);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, chunk));
        for _ in 0..m {
            // uniform direction on the (d-2)-sphere in the tangent space
            let mut u = vec![0.0f64; d - 1];
            loop {
                let mut norm_sq = 0.0;
                for x in &mut u {
                    *x = rng.sample(rand_distr::StandardNormal);
                    norm_sq += *x * *x;
                }
                if norm_sq > 1e-24 {
                    let norm = norm_sq.sqrt();
                    for x in &mut u {
                        *x /= norm;
                    }
                    break;
                }
            }
            let a = point_at_distance(xi1, rho, &u);
            let z = zonal_eval(n, d, dot(eta1, &a).clamp(-1.0, 1.0))?;
            sum += z;
            sum_sq += z * z;
        }
        done += m;
        chunk += 1;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    let std_error = (var / (samples.saturating_sub(1)) as f64).sqrt();
    Ok(McEstimate {
        value: mean,
        std_error,
        samples,
    })
}

/// Specification of a product-type cone multiplier synthesized from zonal
/// harmonics across a set of parameters.
#[derive(Debug, Clone)]
pub struct JourneConeSpec {
    params: Vec<usize>,
    directions: Vec<Vec<f64>>,
    profile: PhiProfile,
    degree: usize,
    embed_dim: usize,
    coeffs: ZonalCoefficients,
    delta: f64,
}

impl JourneConeSpec {
    /// Directions of unequal dimensions are handled by zero-padding into the
    /// largest sphere; inner products are unchanged, so the evaluation only
    /// needs the embedding dimension.
    pub fn new(
        params: Vec<usize>,
        directions: Vec<Vec<f64>>,
        profile: PhiProfile,
        degree: usize,
    ) -> Result<JourneConeSpec> {
        if params.is_empty() || params.len() != directions.len() {
            return Err(Error::InvalidArgument(
                "need one direction per parameter".into(),
            ));
        }
        let mut sorted = params.clone();
        sorted.dedup();
        if sorted.len() != params.len() {
            return Err(Error::InvalidArgument("duplicate parameter index".into()));
        }
        for (dir, &_k) in directions.iter().zip(&params) {
            let n: f64 = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (n - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "direction is not unit (norm {n})"
                )));
            }
        }
        let embed_dim = directions.iter().map(Vec::len).max().unwrap().max(2);
        let coeffs = phi_coefficients(&profile, embed_dim, degree)?;
        let delta = coeffs.reconstruction_delta(&profile, degree);
        Ok(JourneConeSpec {
            params,
            directions,
            profile,
            degree,
            embed_dim,
            coeffs,
            delta,
        })
    }

    pub fn params(&self) -> &[usize] {
        &self.params
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn profile(&self) -> &PhiProfile {
        &self.profile
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn embed_dim(&self) -> usize {
        self.embed_dim
    }

    pub fn coefficients(&self) -> &ZonalCoefficients {
        &self.coeffs
    }

    /// Measured truncation bound of the degree-capped synthesis.
    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Evaluate the degree-capped cone function at unit vectors, one per
/// parameter: `sum_{n <= N} phi_n prod_k Z^{(n)}(t_k)` with
/// `t_k = <xi_k, eta_k>`.
pub fn journe_cone_eval(spec: &JourneConeSpec, etas: &[&[f64]]) -> Result<f64> {
    if etas.len() != spec.params.len() {
        return Err(Error::InvalidArgument("need one eta per parameter".into()));
    }
    for (eta, dir) in etas.iter().zip(&spec.directions) {
        if eta.len() != dir.len() {
            return Err(Error::InvalidArgument("eta has wrong dimension".into()));
        }
        check_unit(eta, "eta")?;
    }
    let ts: Vec<f64> = etas
        .iter()
        .zip(&spec.directions)
        .map(|(eta, dir)| dot(eta, dir).clamp(-1.0, 1.0))
        .collect();
    Ok(journe_eval_at_cosines(spec, &ts))
}

fn journe_eval_at_cosines(spec: &JourneConeSpec, ts: &[f64]) -> f64 {
    let tables: Vec<Vec<f64>> = ts
        .iter()
        .map(|&t| zonal_eval_all(spec.degree, spec.embed_dim, t).expect("cosine in range"))
        .collect();
    let mut acc = 0.0;
    for n in (1..=spec.degree).step_by(2) {
        let c = spec.coeffs.values[n];
        if c == 0.0 {
            continue;
        }
        let mut prod = c;
        for table in &tables {
            prod *= table[n];
        }
        acc += prod;
    }
    acc
}

/// Certificate that the synthesized symbol sits within the measured
/// truncation bound of `+1` on the plateau and `-1` on each single-flip
/// plateau.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlateauCertificate {
    pub degree: usize,
    pub delta: f64,
    /// Geodesic radius of the certified l1 ball.
    pub radius: f64,
    pub plateau_points: usize,
    pub plateau_max_dev: f64,
    /// Worst deviation from -1 over all single-parameter flips.
    pub flipped_max_dev: f64,
    pub symbol_sup: f64,
}

impl PlateauCertificate {
    pub fn holds(&self) -> bool {
        self.plateau_max_dev <= self.delta
            && self.flipped_max_dev <= self.delta
            && self.symbol_sup <= 1.0 + self.delta
    }
}

/// Sample a point of the product of spheres inside the l1 ball
/// `sum_k theta_k < radius` around the given poles (flip negates one pole).
fn sample_plateau_point(
    spec: &JourneConeSpec,
    radius: f64,
    flip: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let t = spec.params.len();
    // rejection sampling of the angle vector in the l1 ball
    let thetas: Vec<f64> = loop {
        let draw: Vec<f64> = (0..t)
            .map(|k| {
                if spec.directions[k].len() == 1 {
                    0.0
                } else {
                    rng.gen_range(0.0..radius)
                }
            })
            .collect();
        if draw.iter().sum::<f64>() < radius {
            break draw;
        }
    };
    spec.directions
        .iter()
        .enumerate()
        .map(|(k, dir)| {
            let pole: Vec<f64> = if flip == Some(k) {
                dir.iter().map(|x| -x).collect()
            } else {
                dir.clone()
            };
            if pole.len() == 1 {
                return pole;
            }
            let mut u = vec![0.0f64; pole.len() - 1];
            loop {
                let mut norm_sq = 0.0;
                for x in &mut u {
                    *x = rng.sample(rand_distr::StandardNormal);
                    norm_sq += *x * *x;
                }
                if norm_sq > 1e-24 {
                    let norm = norm_sq.sqrt();
                    for x in &mut u {
                        *x /= norm;
                    }
                    break;
                }
            }
            point_at_distance(&pole, thetas[k], &u)
        })
        .collect()
}

/// Build the lattice multiplier of a degree-capped cone function: sampled at
/// `xi / |xi|` per parameter block, zero when any block vanishes. Also
/// emits the plateau certificate measured on off-lattice sample points.
pub fn journe_multiplier(
    grid: &GridSpec,
    spec: &JourneConeSpec,
) -> Result<(Multiplier, PlateauCertificate)> {
    for (&k, dir) in spec.params.iter().zip(&spec.directions) {
        if k >= grid.num_params() {
            return Err(Error::InvalidArgument(format!("no parameter {k}")));
        }
        if grid.params()[k].dim != dir.len() {
            return Err(Error::InvalidArgument(format!(
                "direction for parameter {k} has {} coordinates; expected {}",
                dir.len(),
                grid.params()[k].dim
            )));
        }
    }
    let shape = grid.shape();
    let axes_per_param: Vec<Vec<usize>> = spec
        .params
        .iter()
        .map(|&k| grid.param_axes(k).collect())
        .collect();
    let mut symbol = vec![Complex64::new(0.0, 0.0); grid.total_points()];
    let mut ts = vec![0.0f64; spec.params.len()];
    let mut sup = 0.0f64;
    lattice::visit_lattice(grid, |flat, multi| {
        let mut zero_block = false;
        for (slot, axes) in ts.iter_mut().zip(&axes_per_param) {
            let block: Vec<f64> = axes
                .iter()
                .map(|&a| GridSpec::signed_freq(multi[a], shape[a]) as f64)
                .collect();
            let norm: f64 = block.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                zero_block = true;
                break;
            }
            let k_pos = axes_per_param.iter().position(|a| a == axes).unwrap();
            *slot = block
                .iter()
                .zip(&spec.directions[k_pos])
                .map(|(x, d)| x / norm * d)
                .sum::<f64>()
                .clamp(-1.0, 1.0);
        }
        if !zero_block {
            let v = journe_eval_at_cosines(spec, &ts);
            sup = sup.max(v.abs());
            symbol[flat] = Complex64::new(v, 0.0);
        }
    });
    let radius = spec.profile.plateau_radius();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0773E);
    let points = 1000;
    let mut plateau_max_dev = 0.0f64;
    let mut flipped_max_dev = 0.0f64;
    for _ in 0..points {
        let etas = sample_plateau_point(spec, radius, None, &mut rng);
        let refs: Vec<&[f64]> = etas.iter().map(Vec::as_slice).collect();
        let v = journe_cone_eval(spec, &refs)?;
        plateau_max_dev = plateau_max_dev.max((v - 1.0).abs());
    }
    for k in 0..spec.params.len() {
        for _ in 0..points / spec.params.len().max(1) {
            let etas = sample_plateau_point(spec, radius, Some(k), &mut rng);
            let refs: Vec<&[f64]> = etas.iter().map(Vec::as_slice).collect();
            let v = journe_cone_eval(spec, &refs)?;
            flipped_max_dev = flipped_max_dev.max((v + 1.0).abs());
        }
    }
    let cert = PlateauCertificate {
        degree: spec.degree,
        delta: spec.delta,
        radius,
        plateau_points: points,
        plateau_max_dev,
        flipped_max_dev,
        symbol_sup: sup,
    };
    let desc = JourneDesc {
        params: spec.params.clone(),
        directions: spec.directions.clone(),
        degree: spec.degree,
        profile_a: spec.profile.a,
        profile_b: spec.profile.b,
        profile_order: spec.profile.order,
        delta: spec.delta,
    };
    let multiplier = Multiplier::from_parts(
        grid.clone(),
        symbol,
        MultiplierKind::JourneCone { journe: desc },
        spec.params.iter().copied().collect(),
    );
    Ok((multiplier, cert))
}

/// Project a field onto the multiplier and report nothing; convenience used
/// by tests that only need the action.
pub fn apply_journe(grid: &GridSpec, spec: &JourneConeSpec, f: &Field) -> Result<Field> {
    let (m, _) = journe_multiplier(grid, spec)?;
    m.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zonal_low_degrees() {
        for d in 2..=8 {
            for &t in &[-1.0, -0.3, 0.0, 0.5, 1.0] {
                assert_eq!(zonal_eval(0, d, t).unwrap(), 1.0);
                assert!((zonal_eval(1, d, t).unwrap() - t).abs() < 1e-15);
            }
        }
        // Legendre P2(0) = -1/2
        assert!((zonal_eval(2, 3, 0.0).unwrap() + 0.5).abs() < 1e-15);
        // d = 2 is Chebyshev
        for n in 0..10 {
            for i in 0..20 {
                let t = -1.0 + 2.0 * i as f64 / 19.0;
                let want = (n as f64 * t.acos()).cos();
                assert!((zonal_eval(n, 2, t).unwrap() - want).abs() < 1e-12);
            }
        }
        // closed form (3t^2 - 1)/2 for d = 3, n = 2
        for i in 0..20 {
            let t = -1.0 + 2.0 * i as f64 / 19.0;
            let want = 0.5 * (3.0 * t * t - 1.0);
            assert!((zonal_eval(2, 3, t).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn zonal_pole_normalization_exact() {
        for d in 2..=8 {
            for n in 0..=64 {
                assert_eq!(zonal_eval(n, d, 1.0).unwrap(), 1.0, "n={n}, d={d}");
            }
        }
    }

    #[test]
    fn zonal_parity() {
        for d in 2..=5 {
            for n in 0..=12 {
                for i in 0..50 {
                    let t = -1.0 + 2.0 * i as f64 / 49.0;
                    let a = zonal_eval(n, d, -t).unwrap();
                    let b = zonal_eval(n, d, t).unwrap() * if n % 2 == 0 { 1.0 } else { -1.0 };
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zonal_domain_check() {
        assert!(zonal_eval(3, 3, 1.5).is_err());
        assert!(zonal_eval(3, 1, 0.5).is_err());
        // tiny excursions past the endpoints are clamped
        assert!(zonal_eval(3, 3, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-13);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn pure_zonal_expands_to_unit_coefficient() {
        // f(t) = t is the degree-1 zonal harmonic in every dimension
        for d in [2usize, 3, 5] {
            let (c, _res) = expand_against_zonal(&|t| t, &[], d, 8).unwrap();
            assert!((c[1] - 1.0).abs() < 1e-10, "d={d}: {c:?}");
            for (n, v) in c.iter().enumerate() {
                if n != 1 {
                    assert!(v.abs() < 1e-10, "d={d}, n={n}: {v}");
                }
            }
        }
    }

    #[test]
    fn profile_shape_and_validation() {
        let p = PhiProfile::default_plateau();
        assert_eq!(p.eval(1.0), 1.0);
        assert_eq!(p.eval(0.0), 0.0);
        assert_eq!(p.eval(-1.0), -1.0);
        assert_eq!(p.eval(0.1), 0.0);
        assert_eq!(p.eval(0.9), 1.0);
        for i in 0..100 {
            let t = -1.0 + 2.0 * i as f64 / 99.0;
            assert!(p.eval(t).abs() <= 1.0);
            assert_eq!(p.eval(-t), -p.eval(t));
        }
        assert!(PhiProfile::new(0.2, 0.5, 2).is_err());
        assert!(PhiProfile::new(1.1, 0.5, 2).is_err());
    }

    #[test]
    fn phi_coefficients_even_vanish_and_reconstruct() {
        let p = PhiProfile::default_plateau();
        let c = phi_coefficients(&p, 2, 41).unwrap();
        assert!(c.max_even_residual <= 1e-10);
        for n in (0..=41).step_by(2) {
            assert_eq!(c.values[n], 0.0);
        }
        // reconstruction improves with the cap away from the transitions
        let d11 = c.reconstruction_delta_away_from_transitions(&p, 11, 0.05);
        let d21 = c.reconstruction_delta_away_from_transitions(&p, 21, 0.05);
        let d41 = c.reconstruction_delta_away_from_transitions(&p, 41, 0.05);
        assert!(d41 < d21 && d21 < d11, "{d11} {d21} {d41}");
    }

    #[test]
    fn mc_degenerate_cases() {
        let xi1 = [1.0, 0.0, 0.0];
        let xi2 = [0.0, 1.0, 0.0];
        let eta1 = [0.0, 0.0, 1.0];
        // n = 0 is identically 1 with zero variance
        let e = mc_conditional_expectation(0, 3, &xi1, &xi2, &eta1, &[0.0, 0.8, 0.6], 20_000, 1)
            .unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.std_error, 0.0);
        // distance zero: one-point conditioning, exact zonal value
        let e = mc_conditional_expectation(3, 3, &xi1, &xi2, &eta1, &xi2, 20_000, 1).unwrap();
        assert_eq!(e.std_error, 0.0);
        let want = zonal_eval(3, 3, dot(&eta1, &xi1)).unwrap();
        assert!((e.value - want).abs() < 1e-15);
    }

    #[test]
    fn mc_matches_zonal_product_d3() {
        let xi1 = [0.6, 0.8, 0.0];
        let xi2 = [0.0, 0.6, 0.8];
        let eta1 = [0.0, 0.0, 1.0];
        let eta2 = [1.0, 0.0, 0.0];
        let n = 3;
        let e =
            mc_conditional_expectation(n, 3, &xi1, &xi2, &eta1, &eta2, 400_000, 42).unwrap();
        let want = zonal_eval(n, 3, dot(&xi1, &eta1)).unwrap()
            * zonal_eval(n, 3, dot(&xi2, &eta2)).unwrap();
        assert!(
            (e.value - want).abs() <= 3.0 * e.std_error + 1e-10,
            "estimate {} vs {} (se {})",
            e.value,
            want,
            e.std_error
        );
    }

    #[test]
    fn mc_circle_case_is_exact_product() {
        let rot = |phi: f64| [phi.cos(), phi.sin()];
        let (xi1, xi2, eta1, eta2) = (rot(0.3), rot(1.1), rot(2.0), rot(0.9));
        for n in 1..6 {
            let e = mc_conditional_expectation(n, 2, &xi1, &xi2, &eta1, &eta2, 20_000, 7).unwrap();
            let want = zonal_eval(n, 2, dot(&xi1, &eta1)).unwrap()
                * zonal_eval(n, 2, dot(&xi2, &eta2)).unwrap();
            assert_eq!(e.std_error, 0.0);
            assert!((e.value - want).abs() < 1e-12);
        }
    }

    #[test]
    fn cone_eval_plateau_and_flip() {
        let profile = PhiProfile::default_plateau();
        let spec = JourneConeSpec::new(
            vec![0, 1],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            profile,
            41,
        )
        .unwrap();
        let delta = spec.delta();
        // all etas at the poles: value approximates phi(1) = 1
        let v = journe_cone_eval(&spec, &[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert!((v - 1.0).abs() <= delta);
        // flipping one eta negates exactly
        let w = journe_cone_eval(&spec, &[&[-1.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert_eq!(w, -v);
        // non-unit eta rejected
        assert!(journe_cone_eval(&spec, &[&[2.0, 0.0], &[0.0, 1.0]]).is_err());
    }

    #[test]
    fn journe_multiplier_bounded_odd_and_certified() {
        let grid = GridSpec::from_dims_points(&[2, 2], &[8, 8]).unwrap();
        let spec = JourneConeSpec::new(
            vec![0, 1],
            vec![vec![1.0, 0.0], vec![1.0, 0.0]],
            PhiProfile::default_plateau(),
            21,
        )
        .unwrap();
        let (m, cert) = journe_multiplier(&grid, &spec).unwrap();
        assert!(cert.holds(), "{cert:?}");
        assert!(m.max_abs_symbol() <= 1.0 + cert.delta);
        // odd in each parameter's frequency block (away from the -N/2 row)
        let shape = grid.shape();
        for flat in 0..grid.total_points() {
            let multi = grid.multi_index(flat);
            let freqs: Vec<i64> = multi
                .iter()
                .zip(&shape)
                .map(|(&i, &n)| GridSpec::signed_freq(i, n))
                .collect();
            if freqs.contains(&-4) {
                continue;
            }
            // negate the first parameter block
            let mut neg = multi.clone();
            for a in grid.param_axes(0) {
                let f = GridSpec::signed_freq(multi[a], shape[a]);
                neg[a] = GridSpec::freq_index(-f, shape[a]).unwrap();
            }
            let here = m.symbol()[flat];
            let there = m.symbol()[grid.flat_index(&neg)];
            assert_eq!(here, -there, "parity at {multi:?}");
        }
        // zero on zero blocks
        assert_eq!(m.symbol()[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn journe_one_dimensional_parameters_reduce_to_signs() {
        // all parameters one-dimensional: the symbol is (prod sgn) * sum phi_n
        let grid = GridSpec::from_dims_points(&[1, 1], &[8, 8]).unwrap();
        let spec = JourneConeSpec::new(
            vec![0, 1],
            vec![vec![1.0], vec![1.0]],
            PhiProfile::default_plateau(),
            21,
        )
        .unwrap();
        let (m, cert) = journe_multiplier(&grid, &spec).unwrap();
        let plateau: f64 = (1..=21)
            .step_by(2)
            .map(|n| spec.coefficients().values[n])
            .sum();
        assert!((plateau - 1.0).abs() <= cert.delta);
        for flat in 0..grid.total_points() {
            let f = m.symbol()[flat];
            let freqs: Vec<i64> = grid
                .multi_index(flat)
                .iter()
                .zip(&grid.shape())
                .map(|(&i, &n)| GridSpec::signed_freq(i, n))
                .collect();
            if freqs.contains(&0) {
                assert_eq!(f, Complex64::new(0.0, 0.0));
            } else {
                let sgn = freqs.iter().map(|&x| x.signum() as f64).product::<f64>();
                assert!((f.re - sgn * plateau).abs() < 1e-12);
            }
        }
    }
}
