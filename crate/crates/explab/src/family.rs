//! Operator families for two-sided studies: one bracket per partition
//! block, enumerated over direction tuples where applicable.

use commlab_core::commutator::LinearOperator;
use commlab_core::dyadic::PartitionSpec;
use commlab_core::lattice::GridSpec;
use commlab_core::multiplier::{grammar, make_hilbert, make_riesz, tensor, Multiplier};
use commlab_core::zonal::{journe_multiplier, JourneConeSpec, PhiProfile};

use crate::config::ExperimentConfig;

/// A family member is one operator per partition block, outermost bracket
/// first.
pub type FamilyMember = Vec<LinearOperator>;

/// Build the operator family selected by the config.
///
/// - `hilbert`: the single member of tensor products of Hilbert transforms
///   per block (all parameters one-dimensional).
/// - `riesz`: all direction tuples `1..=d_k` per parameter, one tensor
///   product of Riesz transforms per block; the study takes the supremum
///   over members.
/// - `journe`: degree-capped cone multipliers per block with default
///   directions.
/// - explicit `family_ops` strings: each entry is a `|`-separated chain,
///   outermost first, with one operator per block.
pub fn build_family(
    grid: &GridSpec,
    partition: &PartitionSpec,
    config: &ExperimentConfig,
) -> anyhow::Result<Vec<FamilyMember>> {
    if !config.family_ops.is_empty() {
        let mut out = Vec::new();
        for chain in &config.family_ops {
            let ops = grammar::parse_operator_chain(grid, chain)?;
            if ops.len() != partition.blocks().len() {
                anyhow::bail!(
                    "operator chain `{chain}` has {} operators; partition {} has {} blocks",
                    ops.len(),
                    partition.display(),
                    partition.blocks().len()
                );
            }
            out.push(ops.iter().map(LinearOperator::from_multiplier).collect());
        }
        return Ok(out);
    }
    match config.family.as_str() {
        "hilbert" => {
            let member = partition
                .blocks()
                .iter()
                .map(|block| -> anyhow::Result<LinearOperator> {
                    let ms = block
                        .iter()
                        .map(|&k| Ok(make_hilbert(grid, k)?))
                        .collect::<anyhow::Result<Vec<Multiplier>>>()?;
                    Ok(LinearOperator::from_multiplier(&tensor(&ms)?))
                })
                .collect::<anyhow::Result<FamilyMember>>()?;
            Ok(vec![member])
        }
        "riesz" => {
            // direction tuples over all parameters, split per block
            let dims: Vec<usize> = (0..grid.num_params())
                .map(|k| grid.params()[k].dim)
                .collect();
            let mut tuples: Vec<Vec<usize>> = vec![vec![]];
            for &d in &dims {
                let mut next = Vec::new();
                for t in &tuples {
                    for j in 1..=d {
                        let mut t2 = t.clone();
                        t2.push(j);
                        next.push(t2);
                    }
                }
                tuples = next;
            }
            let mut out = Vec::new();
            for tuple in tuples {
                let member = partition
                    .blocks()
                    .iter()
                    .map(|block| -> anyhow::Result<LinearOperator> {
                        let ms = block
                            .iter()
                            .map(|&k| Ok(make_riesz(grid, k, tuple[k])?))
                            .collect::<anyhow::Result<Vec<Multiplier>>>()?;
                        Ok(LinearOperator::from_multiplier(&tensor(&ms)?))
                    })
                    .collect::<anyhow::Result<FamilyMember>>()?;
                out.push(member);
            }
            Ok(out)
        }
        "journe" => {
            let profile = PhiProfile::new(config.journe_a, config.journe_b, config.journe_order)?;
            let member = partition
                .blocks()
                .iter()
                .map(|block| -> anyhow::Result<LinearOperator> {
                    let directions: Vec<Vec<f64>> = block
                        .iter()
                        .map(|&k| {
                            let mut e = vec![0.0; grid.params()[k].dim];
                            e[0] = 1.0;
                            e
                        })
                        .collect();
                    let jspec = JourneConeSpec::new(
                        block.clone(),
                        directions,
                        profile,
                        config.journe_degree,
                    )?;
                    let (m, _cert) = journe_multiplier(grid, &jspec)?;
                    Ok(LinearOperator::from_multiplier(&m))
                })
                .collect::<anyhow::Result<FamilyMember>>()?;
            Ok(vec![member])
        }
        other => anyhow::bail!("unknown family `{other}`"),
    }
}
