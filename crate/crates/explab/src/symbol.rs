//! Seeded symbol generators for the norm studies.

use commlab_core::dyadic::{haar_synthesis, HaarTensor, ParamComponent};
use commlab_core::lattice::{self, Field, GridSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    /// Seeded cancellative Haar coefficients with prescribed per-level decay;
    /// produces finite BMO norms of order one.
    RandomHaar { decay: f64 },
    /// `b(x) = beta(x_param)`: exercises the degenerate commutator cases.
    Separable { param: usize, constant: bool },
    /// Oscillation concentrated on one frozen slice of `param`, realizing
    /// near-equality in the mixed-norm supremum over frozen variables.
    FrozenVariable { param: usize },
    /// Load from a binary field file.
    File { path: String },
}

/// Generate a symbol field; a fixed `(kind, seed)` pair is bit-reproducible.
pub fn gen_symbol(spec: &GridSpec, kind: &SymbolKind, seed: u64) -> commlab_core::Result<Field> {
    match kind {
        SymbolKind::RandomHaar { decay } => Ok(random_haar(spec, *decay, seed)),
        SymbolKind::Separable { param, constant } => {
            if *param >= spec.num_params() {
                return Err(commlab_core::Error::InvalidArgument(format!(
                    "no parameter {param}"
                )));
            }
            let sub = GridSpec::new(vec![spec.params()[*param]])?;
            let beta = if *constant {
                Field::constant(&sub, Complex64::new(1.0, 0.0))
            } else {
                Field::random(&sub, seed)
            };
            let axes: Vec<usize> = spec.param_axes(*param).collect();
            let sub_strides = sub.strides();
            let mut b = Field::zeros(spec);
            lattice::visit_lattice(spec, |flat, multi| {
                let sub_flat: usize = axes
                    .iter()
                    .zip(&sub_strides)
                    .map(|(&a, &s)| multi[a] * s)
                    .sum();
                b.samples_mut()[flat] = beta.samples()[sub_flat];
            });
            Ok(b)
        }
        SymbolKind::FrozenVariable { param } => {
            if *param >= spec.num_params() {
                return Err(commlab_core::Error::InvalidArgument(format!(
                    "no parameter {param}"
                )));
            }
            if spec.num_params() < 2 {
                return Err(commlab_core::Error::InvalidArgument(
                    "frozen-variable symbols need at least two parameters".into(),
                ));
            }
            // random-haar in the other parameters, times the indicator of
            // the zero slice of `param`
            let others: Vec<usize> = (0..spec.num_params()).filter(|k| k != param).collect();
            let sub = GridSpec::new(others.iter().map(|&k| spec.params()[k]).collect())?;
            let g = random_haar(&sub, 0.5, seed);
            let sub_strides = sub.strides();
            let other_axes: Vec<usize> = others.iter().flat_map(|&k| spec.param_axes(k)).collect();
            let frozen_axes: Vec<usize> = spec.param_axes(*param).collect();
            let mut b = Field::zeros(spec);
            lattice::visit_lattice(spec, |flat, multi| {
                if frozen_axes.iter().all(|&a| multi[a] == 0) {
                    let sub_flat: usize = other_axes
                        .iter()
                        .zip(&sub_strides)
                        .map(|(&a, &s)| multi[a] * s)
                        .sum();
                    b.samples_mut()[flat] = g.samples()[sub_flat];
                }
            });
            Ok(b)
        }
        SymbolKind::File { path } => {
            let f = lattice::read_field_from_path(std::path::Path::new(path))?;
            if f.spec() != spec {
                return Err(commlab_core::Error::SpecMismatch);
            }
            Ok(f)
        }
    }
}

fn random_haar(spec: &GridSpec, decay: f64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = HaarTensor::zeros(spec);
    for flat in 0..spec.total_points() {
        let comps = HaarTensor::components_of_flat(spec, flat);
        if comps.iter().any(|c| matches!(c, ParamComponent::Average)) {
            continue;
        }
        let mut scale = 1.0f64;
        for (k, comp) in comps.iter().enumerate() {
            if let ParamComponent::Cube { level, .. } = comp {
                let dim = spec.params()[k].dim;
                let measure = 0.5f64.powi((*level * dim) as i32);
                scale *= measure.sqrt() * decay.powi(*level as i32);
            }
        }
        let g = Complex64::new(
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
        );
        h.coeffs_mut()[flat] = g * scale;
    }
    haar_synthesis(&h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use commlab_core::dyadic::{little_bmo_norm, product_bmo_norm};

    #[test]
    fn random_haar_is_bit_reproducible() {
        let spec = GridSpec::from_dims_points(&[1, 1], &[16, 16]).unwrap();
        let kind = SymbolKind::RandomHaar { decay: 0.5 };
        let a = gen_symbol(&spec, &kind, 42).unwrap();
        let b = gen_symbol(&spec, &kind, 42).unwrap();
        assert_eq!(a, b);
        let c = gen_symbol(&spec, &kind, 43).unwrap();
        assert!(a.sub(&c).unwrap().l2_norm() > 0.0);
    }

    #[test]
    fn random_haar_has_nondegenerate_norms() {
        let spec = GridSpec::from_dims_points(&[1, 1], &[16, 16]).unwrap();
        let b = gen_symbol(&spec, &SymbolKind::RandomHaar { decay: 0.5 }, 7).unwrap();
        let p = product_bmo_norm(&b, &[0, 1], 4).unwrap().value;
        assert!(p > 1e-2 && p.is_finite());
        let l = little_bmo_norm(&b).unwrap();
        assert!(l > 1e-2 && l.is_finite());
    }

    #[test]
    fn separable_constant_has_zero_norms() {
        let spec = GridSpec::from_dims_points(&[1, 1, 1], &[8, 8, 8]).unwrap();
        let b = gen_symbol(
            &spec,
            &SymbolKind::Separable {
                param: 1,
                constant: true,
            },
            1,
        )
        .unwrap();
        assert!(product_bmo_norm(&b, &[0, 1, 2], 4).unwrap().value < 1e-13);
        assert!(little_bmo_norm(&b).unwrap() < 1e-13);
    }

    #[test]
    fn separable_depends_only_on_its_variable() {
        let spec = GridSpec::from_dims_points(&[1, 1], &[8, 8]).unwrap();
        let b = gen_symbol(
            &spec,
            &SymbolKind::Separable {
                param: 1,
                constant: false,
            },
            5,
        )
        .unwrap();
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(
                    b.samples()[spec.flat_index(&[x, y])],
                    b.samples()[spec.flat_index(&[0, y])]
                );
            }
        }
    }

    #[test]
    fn frozen_variable_is_supported_on_one_slice() {
        let spec = GridSpec::from_dims_points(&[1, 1, 1], &[8, 8, 8]).unwrap();
        let b = gen_symbol(&spec, &SymbolKind::FrozenVariable { param: 2 }, 9).unwrap();
        let mut off_slice = 0.0f64;
        commlab_core::lattice::visit_lattice(&spec, |flat, multi| {
            if multi[2] != 0 {
                off_slice += b.samples()[flat].norm();
            }
        });
        assert_eq!(off_slice, 0.0);
        assert!(b.l2_norm() > 0.0);
    }
}
