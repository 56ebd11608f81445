//! Greedy cuboidal partitioning.
//!
//! An image is split by the straight horizontal or vertical line that
//! removes the most SSE, then the leaf offering the largest next gain is
//! split, and so on until the requested number of cuts exists. The result
//! is a binary tree whose cut positions can be replayed on another image.

mod gain;
mod json;

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::integral::{IntegralSums, Region};
use crate::scalar::Scalar;

use gain::ExactGain;

pub use json::{tree_from_json, tree_to_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    /// A line across the region; `offset` counts rows from the top edge.
    Horizontal,
    /// A line down the region; `offset` counts columns from the left edge.
    Vertical,
}

/// Which child of the parent cut a node splits: left/top or right/bottom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Axis {
    fn extent(self, region: &Region) -> usize {
        match self {
            Axis::Horizontal => region.height(),
            Axis::Vertical => region.width(),
        }
    }

    fn split(self, region: &Region, offset: usize) -> Option<(Region, Region)> {
        match self {
            Axis::Horizontal => region.split_horizontal(offset),
            Axis::Vertical => region.split_vertical(offset),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cut<T> {
    pub axis: Axis,
    /// Position inside the parent region, in `[1, parent_extent − 1]`.
    pub offset: usize,
    /// Parent height for horizontal cuts, width for vertical cuts.
    pub parent_extent: usize,
    /// SSE reduction measured on the source image.
    pub gain: T,
    /// 1-based creation index.
    pub order: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutNode<T> {
    pub cut: Cut<T>,
    /// Index of the parent node in [`CupidTree::nodes`]; `None` for the root.
    pub parent: Option<usize>,
    pub side: Side,
}

/// Best single cut of a region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutChoice<T> {
    pub axis: Axis,
    pub offset: usize,
    pub gain: T,
}

/// Binary partition tree with nodes stored in creation order.
#[derive(Clone, Debug, PartialEq)]
pub struct CupidTree<T> {
    source_width: usize,
    source_height: usize,
    nodes: Vec<CutNode<T>>,
}

/// Per-cut gains of a tree replayed on some image, plus that image's SSE.
#[derive(Clone, Debug, PartialEq)]
pub struct GainSeq<T> {
    pub total_sse: T,
    pub gains: Vec<T>,
}

/// Region assignment produced by replaying a tree.
#[derive(Clone, Copy, Debug)]
struct Replayed {
    region: Option<Region>,
    children: (Option<Region>, Option<Region>),
}

fn scan_best(sums: &IntegralSums, region: &Region) -> Option<(Axis, usize, ExactGain)> {
    let total = sums.stats_unchecked(region);
    let mut best: Option<(Axis, usize, ExactGain)> = None;
    let mut consider = |axis, offset, first| {
        let gain = ExactGain::between(&first, &(total - first));
        if best.as_ref().is_none_or(|(_, _, g)| gain > *g) {
            best = Some((axis, offset, gain));
        }
    };
    for offset in 1..region.height() {
        let top = Region {
            y1: region.y0 + offset,
            ..*region
        };
        consider(Axis::Horizontal, offset, sums.stats_unchecked(&top));
    }
    for offset in 1..region.width() {
        let left = Region {
            x1: region.x0 + offset,
            ..*region
        };
        consider(Axis::Vertical, offset, sums.stats_unchecked(&left));
    }
    best
}

/// Cut of `region` with maximal gain; `None` for a single pixel.
///
/// Horizontal positions are scanned top to bottom, then vertical ones left
/// to right, and only a strictly larger gain replaces the current best.
pub fn best_cut<T: Scalar>(sums: &IntegralSums, region: &Region) -> Result<Option<CutChoice<T>>> {
    sums.stats(region)?;
    Ok(
        scan_best(sums, region).map(|(axis, offset, gain)| CutChoice {
            axis,
            offset,
            gain: gain.value(),
        }),
    )
}

struct Leaf {
    gain: ExactGain,
    axis: Axis,
    offset: usize,
    region: Region,
    created: usize,
    parent: Option<usize>,
    side: Side,
}

impl Leaf {
    fn key(&self) -> (ExactGain, Reverse<usize>) {
        (self.gain, Reverse(self.created))
    }
}

impl PartialEq for Leaf {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Leaf {}

impl Ord for Leaf {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Leaf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> CupidTree<T> {
    /// Greedy tree of exactly `n_cuts` cuts on `img`.
    pub fn build(img: &RgbImage, n_cuts: usize) -> Result<Self> {
        Self::build_from_sums(&IntegralSums::new(img), n_cuts)
    }

    pub fn build_from_sums(sums: &IntegralSums, n_cuts: usize) -> Result<Self> {
        if n_cuts == 0 {
            return Err(Error::InvalidParameter(
                "cut count must be at least 1".into(),
            ));
        }
        let pixels = sums.width() * sums.height();
        if pixels < n_cuts + 1 {
            return Err(Error::ImageTooSmall {
                pixels,
                needed: n_cuts + 1,
            });
        }

        let mut heap = BinaryHeap::new();
        let mut created = 0;
        let mut push = |heap: &mut BinaryHeap<Leaf>, region: Region, parent, side| {
            if let Some((axis, offset, gain)) = scan_best(sums, &region) {
                heap.push(Leaf {
                    gain,
                    axis,
                    offset,
                    region,
                    created,
                    parent,
                    side,
                });
            }
            created += 1;
        };
        push(&mut heap, sums.full_region(), None, Side::Left);

        let mut nodes = Vec::with_capacity(n_cuts);
        while nodes.len() < n_cuts {
            let leaf = heap
                .pop()
                .expect("pixel count guarantees a splittable leaf");
            let parent_extent = leaf.axis.extent(&leaf.region);
            let (first, second) = leaf
                .axis
                .split(&leaf.region, leaf.offset)
                .expect("scanned offsets are interior");
            let index = nodes.len();
            nodes.push(CutNode {
                cut: Cut {
                    axis: leaf.axis,
                    offset: leaf.offset,
                    parent_extent,
                    gain: leaf.gain.value(),
                    order: index + 1,
                },
                parent: leaf.parent,
                side: leaf.side,
            });
            push(&mut heap, first, Some(index), Side::Left);
            push(&mut heap, second, Some(index), Side::Right);
        }

        Ok(Self {
            source_width: sums.width(),
            source_height: sums.height(),
            nodes,
        })
    }

    /// Assembles a tree from parts, checking every structural invariant.
    pub fn from_nodes(
        source_width: usize,
        source_height: usize,
        nodes: Vec<CutNode<T>>,
    ) -> Result<Self> {
        let tree = Self {
            source_width,
            source_height,
            nodes,
        };
        tree.validate()?;
        Ok(tree)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::SchemaViolation(msg));
        if self.source_width == 0 || self.source_height == 0 {
            return bad("source dimensions must be positive".into());
        }
        if self.nodes.is_empty() {
            return bad("tree has no cuts".into());
        }
        let mut taken = vec![(false, false); self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            let cut = &node.cut;
            if cut.order != i + 1 {
                return bad(format!(
                    "cut {i} has order {}, expected {}",
                    cut.order,
                    i + 1
                ));
            }
            if !(cut.gain.is_finite() && cut.gain >= T::zero()) {
                return bad(format!("cut {} has invalid gain {}", cut.order, cut.gain));
            }
            if cut.parent_extent < 2 || cut.offset < 1 || cut.offset >= cut.parent_extent {
                return bad(format!(
                    "cut {} offset {} outside [1, {}]",
                    cut.order,
                    cut.offset,
                    cut.parent_extent.saturating_sub(1)
                ));
            }
            match node.parent {
                None if i != 0 => return bad(format!("cut {} is a second root", cut.order)),
                Some(_) if i == 0 => return bad("first cut must be the root".into()),
                Some(p) if p >= i => return bad(format!("cut {} precedes its parent", cut.order)),
                Some(p) => {
                    let slot = match node.side {
                        Side::Left => &mut taken[p].0,
                        Side::Right => &mut taken[p].1,
                    };
                    if std::mem::replace(slot, true) {
                        return bad(format!("cut {} reuses an occupied child slot", cut.order));
                    }
                }
                None => {}
            }
        }
        // replaying on the source must reproduce every recorded extent
        let regions = self.replay(self.source_width, self.source_height, |_, _, cut| {
            Some(cut.offset)
        });
        for (node, r) in self.nodes.iter().zip(&regions) {
            match r.region {
                Some(region) if node.cut.axis.extent(&region) == node.cut.parent_extent => {}
                _ => {
                    return bad(format!(
                        "cut {} parent_extent {} does not match its region in the source",
                        node.cut.order, node.cut.parent_extent
                    ))
                }
            }
        }
        Ok(())
    }

    pub fn source_width(&self) -> usize {
        self.source_width
    }

    pub fn source_height(&self) -> usize {
        self.source_height
    }

    pub fn nodes(&self) -> &[CutNode<T>] {
        &self.nodes
    }

    pub fn n_cuts(&self) -> usize {
        self.nodes.len()
    }

    /// Gains recorded while building, in creation order.
    pub fn gains(&self) -> Vec<T> {
        self.nodes.iter().map(|n| n.cut.gain).collect()
    }

    /// Keeps only the first `n` cuts; the prefix of a greedy tree is itself a valid tree.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            source_width: self.source_width,
            source_height: self.source_height,
            nodes: self.nodes[..n.min(self.nodes.len())].to_vec(),
        }
    }

    /// Walks the nodes in creation order, assigning each a region of a
    /// `width`×`height` frame. `place` maps a cut into its region and
    /// returns `None` when the cut cannot be placed.
    fn replay(
        &self,
        width: usize,
        height: usize,
        mut place: impl FnMut(usize, &Region, &Cut<T>) -> Option<usize>,
    ) -> Vec<Replayed> {
        let mut out: Vec<Replayed> = Vec::with_capacity(self.nodes.len());
        for (i, node) in self.nodes.iter().enumerate() {
            let region = match node.parent {
                None => Some(Region::full(width, height)),
                Some(p) => match node.side {
                    Side::Left => out[p].children.0,
                    Side::Right => out[p].children.1,
                },
            };
            let children = match region {
                None => (None, None),
                Some(r) => match place(i, &r, &node.cut).and_then(|o| node.cut.axis.split(&r, o)) {
                    Some((a, b)) => (Some(a), Some(b)),
                    None => (Some(r), None),
                },
            };
            out.push(Replayed { region, children });
        }
        out
    }

    /// Maps a source offset into a target extent by rounding the cut's
    /// relative position half-up, clamped to an interior position.
    pub fn map_offset(offset: usize, parent_extent: usize, target_extent: usize) -> Option<usize> {
        if target_extent < 2 {
            return None;
        }
        let num = 2 * offset as u128 * target_extent as u128 + parent_extent as u128;
        let mapped = (num / (2 * parent_extent as u128)) as usize;
        Some(mapped.clamp(1, target_extent - 1))
    }

    fn replay_on(&self, width: usize, height: usize) -> Vec<Replayed> {
        self.replay(width, height, |_, region, cut| {
            Self::map_offset(cut.offset, cut.parent_extent, cut.axis.extent(region))
        })
    }

    /// Replays the cuts on another image and measures each cut's gain there.
    ///
    /// A cut that has no legal position in its mapped region (extent 1 on its
    /// axis, or an empty region) contributes zero gain and hands the whole
    /// region to its left child.
    pub fn apply(&self, target: &IntegralSums) -> GainSeq<T> {
        let replayed = self.replay_on(target.width(), target.height());
        let gains = replayed
            .iter()
            .map(|r| match r.children {
                (Some(a), Some(b)) => {
                    ExactGain::between(&target.stats_unchecked(&a), &target.stats_unchecked(&b))
                        .value()
                }
                _ => T::zero(),
            })
            .collect();
        GainSeq {
            total_sse: target.total_sse(),
            gains,
        }
    }

    /// Nonempty leaf regions after replaying the tree on a `width`×`height` frame.
    pub fn leaf_regions(&self, width: usize, height: usize) -> Vec<Region> {
        let replayed = self.replay_on(width, height);
        let mut internal = vec![(false, false); self.nodes.len()];
        for node in &self.nodes {
            if let Some(p) = node.parent {
                match node.side {
                    Side::Left => internal[p].0 = true,
                    Side::Right => internal[p].1 = true,
                }
            }
        }
        let mut leaves = Vec::with_capacity(self.nodes.len() + 1);
        for (r, (left_split, right_split)) in replayed.iter().zip(internal) {
            if !left_split {
                leaves.extend(r.children.0);
            }
            if !right_split {
                leaves.extend(r.children.1);
            }
        }
        leaves
    }
}

/// Free-function form of [`CupidTree::build`].
pub fn build_tree<T: Scalar>(img: &RgbImage, n_cuts: usize) -> Result<CupidTree<T>> {
    CupidTree::build(img, n_cuts)
}

/// Free-function form of [`CupidTree::apply`].
pub fn apply_tree<T: Scalar>(tree: &CupidTree<T>, target: &IntegralSums) -> GainSeq<T> {
    tree.apply(target)
}
