//! Product BMO, little bmo and little product BMO norms.
//!
//! The product BMO norm is a Carleson-type supremum over open sets of the
//! Haar energy of rectangles inside the set. The open-set supremum is
//! approximated by a candidate family: all single dyadic rectangles plus
//! greedy unions of up to a budgeted number of rectangles, ranked by
//! energy-to-measure ratio. Single rectangles alone are known to
//! underestimate the supremum, which is why the budget is explicit and the
//! reported value is monotone in it.
//!
//! The rectangle family pairs every grouped parameter with either a dyadic
//! cube (cancellative signatures) or the whole torus factor (the top-level
//! average signature); only the global average is excluded. With this
//! family the norm vanishes exactly when the symbol is constant, and
//! freezing all but one variable recovers the one-parameter Carleson norm.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::{haar_analysis, HaarTensor, ParamComponent};
use crate::lattice::{Field, GridSpec};
use crate::{Error, Result};

/// One parameter's part of a candidate rectangle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RectComponent {
    /// Whole torus factor: the non-cancellative average signature.
    Whole,
    Cube { level: usize, corner: Vec<usize> },
}

/// A candidate rectangle, one component per grouped parameter (ascending
/// parameter order).
pub type RectDesc = Vec<RectComponent>;

/// Result of a product BMO evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductBmoReport {
    pub value: f64,
    pub budget: usize,
    /// Grouped parameters, ascending.
    pub grouping: Vec<usize>,
    /// The rectangles of the achieving candidate set.
    pub achieving: Vec<RectDesc>,
    /// Coordinates of the frozen complement axes (ascending axis order),
    /// when the grouping is a proper subset of the parameters.
    pub frozen: Option<Vec<usize>>,
}

/// Partition of the parameter indices selecting a little product BMO space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSpec {
    blocks: Vec<Vec<usize>>,
}

impl PartitionSpec {
    pub fn new(blocks: Vec<Vec<usize>>, num_params: usize) -> Result<PartitionSpec> {
        let mut seen = vec![false; num_params];
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("empty partition".into()));
        }
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidArgument("empty partition block".into()));
            }
            for &k in block {
                if k >= num_params {
                    return Err(Error::InvalidArgument(format!(
                        "parameter {k} out of range"
                    )));
                }
                if seen[k] {
                    return Err(Error::InvalidArgument(format!(
                        "parameter {k} appears twice"
                    )));
                }
                seen[k] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidArgument(
                "partition does not cover all parameters".into(),
            ));
        }
        Ok(PartitionSpec { blocks })
    }

    /// Parse `"(13)(2)"` or `"(1,3)(2)"`; indices are 1-based in the string.
    pub fn parse(s: &str, num_params: usize) -> Result<PartitionSpec> {
        let mut blocks = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in partition `{s}`")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced partition `{s}`")))?;
            let inner = &open[..close];
            let block: Vec<usize> = if inner.contains(',') {
                inner
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad index `{p}`")))
                    })
                    .collect::<Result<_>>()?
            } else {
                inner
                    .chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as usize)
                            .ok_or_else(|| Error::Parse(format!("bad index `{c}`")))
                    })
                    .collect::<Result<_>>()?
            };
            let block: Vec<usize> = block
                .into_iter()
                .map(|k| {
                    if k == 0 {
                        Err(Error::Parse("partition indices are 1-based".into()))
                    } else {
                        Ok(k - 1)
                    }
                })
                .collect::<Result<_>>()?;
            blocks.push(block);
            rest = open[close + 1..].trim();
        }
        PartitionSpec::new(blocks, num_params)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// `(1)(2)...(t)`: every parameter its own block.
    pub fn singletons(num_params: usize) -> PartitionSpec {
        PartitionSpec {
            blocks: (0..num_params).map(|k| vec![k]).collect(),
        }
    }

    /// `(12...t)`: a single block.
    pub fn single_block(num_params: usize) -> PartitionSpec {
        PartitionSpec {
            blocks: vec![(0..num_params).collect()],
        }
    }

    pub fn display(&self) -> String {
        self.blocks
            .iter()
            .map(|b| {
                let inner = b
                    .iter()
                    .map(|k| (k + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                format!("({inner})")
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LittleProductBmoReport {
    pub value: f64,
    pub budget: usize,
    /// The achieving choice vector: one parameter per block.
    pub choice: Vec<usize>,
    pub inner: ProductBmoReport,
}

struct Restriction {
    spec_g: GridSpec,
    comp_axes: Vec<usize>,
    g_offsets: Vec<usize>,
}

fn build_restriction(spec: &GridSpec, grouping: &[usize]) -> Restriction {
    let grouped_axes: Vec<usize> = grouping.iter().flat_map(|&k| spec.param_axes(k)).collect();
    let comp_axes: Vec<usize> = (0..spec.num_axes())
        .filter(|a| !grouped_axes.contains(a))
        .collect();
    let spec_g = GridSpec::new(grouping.iter().map(|&k| spec.params()[k]).collect())
        .expect("restriction of a valid grid is valid");
    let strides = spec.strides();
    let mut g_offsets = vec![0usize; spec_g.total_points()];
    crate::lattice::visit_lattice(&spec_g, |flat, multi| {
        g_offsets[flat] = multi
            .iter()
            .zip(&grouped_axes)
            .map(|(&i, &a)| i * strides[a])
            .sum();
    });
    Restriction {
        spec_g,
        comp_axes,
        g_offsets,
    }
}

impl Restriction {
    /// Base offsets and frozen coordinates for every complement assignment.
    fn frozen_bases(&self, spec: &GridSpec) -> Vec<(Vec<usize>, usize)> {
        let shape = spec.shape();
        let strides = spec.strides();
        let mut out = Vec::new();
        let mut idx = vec![0usize; self.comp_axes.len()];
        loop {
            let base: usize = idx
                .iter()
                .zip(&self.comp_axes)
                .map(|(&i, &a)| i * strides[a])
                .sum();
            out.push((idx.clone(), base));
            let mut a = self.comp_axes.len();
            loop {
                if a == 0 {
                    return out;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < shape[self.comp_axes[a]] {
                    break;
                }
                idx[a] = 0;
                if a == 0 {
                    return out;
                }
            }
        }
    }
}

/// Per-parameter component table for the rectangle family.
struct CompTable {
    /// Per component: cell range (lo, width) per axis, or `None` for Whole.
    ranges: Vec<Option<Vec<(usize, usize)>>>,
    measures: Vec<f64>,
    /// Component id of the level-0 cube.
    cube0: usize,
    /// Children ids: for each cube component, the ids of its two halves per
    /// axis split (empty for finest level and Whole).
    parent: Vec<Option<usize>>,
    levels: Vec<Option<(usize, Vec<usize>)>>,
}

fn comp_table(spec_g: &GridSpec, k: usize) -> CompTable {
    let dim = spec_g.params()[k].dim;
    let n = spec_g.params()[k].points;
    let depth = spec_g.depth(k);
    let mut ranges: Vec<Option<Vec<(usize, usize)>>> = vec![None]; // id 0: Whole
    let mut measures = vec![1.0f64];
    let mut levels: Vec<Option<(usize, Vec<usize>)>> = vec![None];
    let mut id_of: std::collections::HashMap<(usize, Vec<usize>), usize> =
        std::collections::HashMap::new();
    for level in 0..=depth.saturating_sub(1) {
        let cubes_per_axis = 1usize << level;
        let width = n >> level;
        let mut corner = vec![0usize; dim];
        loop {
            let range: Vec<(usize, usize)> = corner.iter().map(|&c| (c * width, width)).collect();
            let id = ranges.len();
            id_of.insert((level, corner.clone()), id);
            ranges.push(Some(range));
            measures.push(0.5f64.powi((level * dim) as i32));
            levels.push(Some((level, corner.clone())));
            let mut a = dim;
            loop {
                if a == 0 {
                    break;
                }
                a -= 1;
                corner[a] += 1;
                if corner[a] < cubes_per_axis {
                    break;
                }
                corner[a] = 0;
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
    let parent: Vec<Option<usize>> = levels
        .iter()
        .map(|lv| match lv {
            None => None,
            Some((0, _)) => None,
            Some((level, corner)) => {
                let up: Vec<usize> = corner.iter().map(|&c| c / 2).collect();
                Some(id_of[&(level - 1, up)])
            }
        })
        .collect();
    let cube0 = 1; // the single level-0 cube comes right after Whole
    CompTable {
        ranges,
        measures,
        cube0,
        parent,
        levels,
    }
}

struct RectFamily {
    /// Component count per grouped parameter.
    comp_counts: Vec<usize>,
    tables: Vec<CompTable>,
    /// Own Haar energy per rectangle id (row-major over component ids).
    energy: Vec<f64>,
    /// Closure sums: energy of all rectangles set-contained in this one.
    closure: Vec<f64>,
    measures: Vec<f64>,
}

impl RectFamily {
    fn rect_id(&self, comp_ids: &[usize]) -> usize {
        let mut id = 0;
        for (c, n) in comp_ids.iter().zip(&self.comp_counts) {
            id = id * n + c;
        }
        id
    }

    fn comp_ids(&self, mut rect_id: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.comp_counts.len()];
        for i in (0..self.comp_counts.len()).rev() {
            out[i] = rect_id % self.comp_counts[i];
            rect_id /= self.comp_counts[i];
        }
        out
    }

    fn desc(&self, rect_id: usize) -> RectDesc {
        self.comp_ids(rect_id)
            .iter()
            .zip(&self.tables)
            .map(|(&c, table)| match &table.levels[c] {
                None => RectComponent::Whole,
                Some((level, corner)) => RectComponent::Cube {
                    level: *level,
                    corner: corner.clone(),
                },
            })
            .collect()
    }
}

fn build_family(spec_g: &GridSpec, haar: &HaarTensor) -> RectFamily {
    let t = spec_g.num_params();
    let tables: Vec<CompTable> = (0..t).map(|k| comp_table(spec_g, k)).collect();
    let comp_counts: Vec<usize> = tables.iter().map(|tb| tb.ranges.len()).collect();
    let n_rect: usize = comp_counts.iter().product();
    let mut family = RectFamily {
        comp_counts,
        tables,
        energy: vec![0.0; n_rect],
        closure: vec![0.0; n_rect],
        measures: vec![0.0; n_rect],
    };
    // own energies: aggregate signatures per cube
    for (flat, &c) in haar.coeffs().iter().enumerate() {
        let comps = HaarTensor::components_of_flat(spec_g, flat);
        let ids: Vec<usize> = comps
            .iter()
            .enumerate()
            .map(|(k, comp)| match comp {
                ParamComponent::Average => 0usize,
                ParamComponent::Cube { level, corner, .. } => {
                    // id layout matches comp_table enumeration order
                    let dim = spec_g.params()[k].dim;
                    let mut offset = 1usize;
                    for l in 0..*level {
                        offset += 1usize << (l * dim);
                    }
                    let per_axis = 1usize << level;
                    let mut row = 0usize;
                    for &c in corner {
                        row = row * per_axis + c;
                    }
                    offset + row
                }
            })
            .collect();
        let rid = family.rect_id(&ids);
        family.energy[rid] += c.norm_sqr();
    }
    // the global average is not part of the family
    let all_whole = family.rect_id(&vec![0usize; spec_g.num_params()]);
    family.energy[all_whole] = 0.0;
    // measures
    for rid in 0..n_rect {
        let ids = family.comp_ids(rid);
        family.measures[rid] = ids
            .iter()
            .zip(&family.tables)
            .map(|(&c, tb)| tb.measures[c])
            .product();
    }
    // closure sums: per-parameter subtree accumulation, then identify the
    // Whole factor with the level-0 cube (they cover the same set)
    family.closure.copy_from_slice(&family.energy);
    for axis in 0..t {
        let stride: usize = family.comp_counts[axis + 1..].iter().product();
        let outer: usize = family.comp_counts[..axis].iter().product();
        let n_comp = family.comp_counts[axis];
        let table_parent = family.tables[axis].parent.clone();
        let cube0 = family.tables[axis].cube0;
        for o in 0..outer {
            for s in 0..stride {
                let at = |c: usize| o * n_comp * stride + c * stride + s;
                // children are enumerated after their parents; sweep backwards
                for c in (0..n_comp).rev() {
                    if let Some(p) = table_parent[c] {
                        family.closure[at(p)] += family.closure[at(c)];
                    }
                }
                let merged = family.closure[at(cube0)] + family.closure[at(0)];
                family.closure[at(cube0)] = merged;
                family.closure[at(0)] = merged;
            }
        }
    }
    family
}

fn cell_mask(spec_g: &GridSpec, family: &RectFamily, rect_id: usize) -> Vec<u64> {
    let total = spec_g.total_points();
    let mut mask = vec![0u64; total.div_ceil(64)];
    let ids = family.comp_ids(rect_id);
    // per-axis ranges over the flattened axes of the restricted grid
    let shape = spec_g.shape();
    let strides = spec_g.strides();
    let mut axis_ranges: Vec<(usize, usize)> = Vec::with_capacity(shape.len());
    for (k, &cid) in ids.iter().enumerate() {
        match &family.tables[k].ranges[cid] {
            None => {
                for a in spec_g.param_axes(k) {
                    axis_ranges.push((0, shape[a]));
                }
            }
            Some(ranges) => {
                for r in ranges {
                    axis_ranges.push(*r);
                }
            }
        }
    }
    let mut idx: Vec<usize> = axis_ranges.iter().map(|&(lo, _)| lo).collect();
    loop {
        let flat: usize = idx.iter().zip(&strides).map(|(&i, &s)| i * s).sum();
        mask[flat / 64] |= 1u64 << (flat % 64);
        let mut a = axis_ranges.len();
        loop {
            if a == 0 {
                return mask;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < axis_ranges[a].0 + axis_ranges[a].1 {
                break;
            }
            idx[a] = axis_ranges[a].0;
            if a == 0 {
                return mask;
            }
        }
    }
}

fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x & !y == 0)
}

/// Carleson value over the candidate family on one restricted field.
fn cf_norm(spec_g: &GridSpec, field: &Field, budget: usize) -> (f64, Vec<RectDesc>) {
    let haar = haar_analysis(field);
    let family = build_family(spec_g, &haar);
    let n_rect = family.energy.len();
    let all_whole = family.rect_id(&vec![0usize; spec_g.num_params()]);
    let mut best_value2 = 0.0f64;
    let mut best: Vec<usize> = Vec::new();
    // single rectangles via closure sums
    for rid in 0..n_rect {
        if rid == all_whole {
            continue;
        }
        let v2 = family.closure[rid] / family.measures[rid];
        if v2 > best_value2 {
            best_value2 = v2;
            best = vec![rid];
        }
    }
    // greedy unions by energy-to-measure ratio
    if budget >= 2 {
        let mut order: Vec<usize> = (0..n_rect)
            .filter(|&r| r != all_whole && family.energy[r] > 0.0)
            .collect();
        order.sort_by(|&a, &b| {
            let ra = family.energy[a] / family.measures[a];
            let rb = family.energy[b] / family.measures[b];
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        order.truncate(budget);
        if order.len() >= 2 {
            let masks: Vec<Vec<u64>> = (0..n_rect)
                .map(|r| cell_mask(spec_g, &family, r))
                .collect();
            let cellvol = spec_g.cell_volume();
            let mut union_mask = masks[order[0]].clone();
            for g in 1..order.len() {
                for (u, m) in union_mask.iter_mut().zip(&masks[order[g]]) {
                    *u |= m;
                }
                let cells: u32 = union_mask.iter().map(|w| w.count_ones()).sum();
                let measure = cells as f64 * cellvol;
                let mut energy = 0.0;
                for (rid, mask) in masks.iter().enumerate() {
                    if rid != all_whole
                        && family.energy[rid] > 0.0
                        && is_subset(mask, &union_mask)
                    {
                        energy += family.energy[rid];
                    }
                }
                let v2 = energy / measure;
                if v2 > best_value2 {
                    best_value2 = v2;
                    best = order[..=g].to_vec();
                }
            }
        }
    }
    let descs = best.iter().map(|&r| family.desc(r)).collect();
    (best_value2.sqrt(), descs)
}

/// Product BMO norm of `b` in the grouped parameters.
///
/// When the grouping is a proper subset of the parameters the value is the
/// supremum over all frozen assignments of the remaining variables. The
/// achieving candidate set and frozen slice are reported.
pub fn product_bmo_norm(b: &Field, grouping: &[usize], budget: usize) -> Result<ProductBmoReport> {
    let spec = b.spec();
    if grouping.is_empty() {
        return Err(Error::InvalidArgument("empty grouping".into()));
    }
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let mut grouping: Vec<usize> = grouping.to_vec();
    grouping.sort_unstable();
    grouping.dedup();
    for &k in &grouping {
        if k >= spec.num_params() {
            return Err(Error::InvalidArgument(format!("no parameter {k}")));
        }
    }
    let restriction = build_restriction(spec, &grouping);
    let full = restriction.comp_axes.is_empty();
    let mut best_value = -1.0f64;
    let mut best_rects = Vec::new();
    let mut best_frozen: Option<Vec<usize>> = None;
    for (frozen, base) in restriction.frozen_bases(spec) {
        let samples: Vec<Complex64> = restriction
            .g_offsets
            .iter()
            .map(|&off| b.samples()[base + off])
            .collect();
        let field = Field::from_samples(&restriction.spec_g, samples)?;
        let (value, rects) = cf_norm(&restriction.spec_g, &field, budget);
        if value > best_value {
            best_value = value;
            best_rects = rects;
            best_frozen = if full { None } else { Some(frozen) };
        }
    }
    Ok(ProductBmoReport {
        value: best_value.max(0.0),
        budget,
        grouping,
        achieving: best_rects,
        frozen: best_frozen,
    })
}

/// Little bmo norm: exhaustive supremum over dyadic rectangles of the mean
/// deviation from the rectangle average.
pub fn little_bmo_norm(b: &Field) -> Result<f64> {
    let spec = b.spec();
    let strides = spec.strides();
    // per-parameter cube lists: (cell range per axis)
    let mut per_param: Vec<Vec<Vec<(usize, usize)>>> = Vec::new();
    for k in 0..spec.num_params() {
        let dim = spec.params()[k].dim;
        let n = spec.params()[k].points;
        let depth = spec.depth(k);
        let mut list = Vec::new();
        for level in 0..=depth {
            let per_axis = 1usize << level;
            let width = n >> level;
            let mut corner = vec![0usize; dim];
            loop {
                list.push(corner.iter().map(|&c| (c * width, width)).collect());
                let mut a = dim;
                loop {
                    if a == 0 {
                        break;
                    }
                    a -= 1;
                    corner[a] += 1;
                    if corner[a] < per_axis {
                        break;
                    }
                    corner[a] = 0;
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
        per_param.push(list);
    }
    let axis_of_param: Vec<Vec<usize>> = (0..spec.num_params())
        .map(|k| spec.param_axes(k).collect())
        .collect();
    let mut sup = 0.0f64;
    let mut rect_choice = vec![0usize; spec.num_params()];
    let mut cells: Vec<usize> = Vec::new();
    loop {
        // gather the cells of this rectangle
        cells.clear();
        let mut axis_ranges: Vec<(usize, usize)> = Vec::with_capacity(spec.num_axes());
        for (k, &choice) in rect_choice.iter().enumerate() {
            axis_ranges.extend_from_slice(&per_param[k][choice]);
            debug_assert_eq!(per_param[k][choice].len(), axis_of_param[k].len());
        }
        let mut idx: Vec<usize> = axis_ranges.iter().map(|&(lo, _)| lo).collect();
        'cells: loop {
            let flat: usize = idx.iter().zip(&strides).map(|(&i, &s)| i * s).sum();
            cells.push(flat);
            let mut a = axis_ranges.len();
            loop {
                if a == 0 {
                    break 'cells;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < axis_ranges[a].0 + axis_ranges[a].1 {
                    break;
                }
                idx[a] = axis_ranges[a].0;
                if a == 0 {
                    break 'cells;
                }
            }
        }
        let m = cells.len() as f64;
        let avg: Complex64 = cells.iter().map(|&f| b.samples()[f]).sum::<Complex64>() / m;
        let osc: f64 = cells.iter().map(|&f| (b.samples()[f] - avg).norm()).sum::<f64>() / m;
        if osc > sup {
            sup = osc;
        }
        // next rectangle
        let mut k = spec.num_params();
        loop {
            if k == 0 {
                return Ok(sup);
            }
            k -= 1;
            rect_choice[k] += 1;
            if rect_choice[k] < per_param[k].len() {
                break;
            }
            rect_choice[k] = 0;
            if k == 0 {
                return Ok(sup);
            }
        }
    }
}

/// Little product BMO norm for a partition: max over choice vectors (one
/// parameter per block) of the product BMO norm in the chosen variables,
/// uniformly over the frozen remaining variables.
pub fn little_product_bmo_norm(
    b: &Field,
    partition: &PartitionSpec,
    budget: usize,
) -> Result<LittleProductBmoReport> {
    let spec = b.spec();
    PartitionSpec::new(partition.blocks().to_vec(), spec.num_params())?;
    let blocks = partition.blocks();
    let mut choice_idx = vec![0usize; blocks.len()];
    let mut best: Option<LittleProductBmoReport> = None;
    loop {
        let choice: Vec<usize> = choice_idx
            .iter()
            .zip(blocks)
            .map(|(&i, block)| block[i])
            .collect();
        let inner = product_bmo_norm(b, &choice, budget)?;
        let better = best.as_ref().is_none_or(|b| inner.value > b.value);
        if better {
            best = Some(LittleProductBmoReport {
                value: inner.value,
                budget,
                choice: choice.clone(),
                inner,
            });
        }
        let mut s = blocks.len();
        loop {
            if s == 0 {
                return Ok(best.expect("at least one choice vector"));
            }
            s -= 1;
            choice_idx[s] += 1;
            if choice_idx[s] < blocks[s].len() {
                break;
            }
            choice_idx[s] = 0;
            if s == 0 {
                return Ok(best.expect("at least one choice vector"));
            }
        }
    }
}
