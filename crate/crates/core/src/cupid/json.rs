use serde::{Deserialize, Serialize};

use super::{Axis, CupidTree, Cut, CutNode, Side};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeDoc {
    source: SourceDoc,
    cuts: Vec<CutDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceDoc {
    w: i64,
    h: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CutDoc {
    order: i64,
    axis: String,
    offset: i64,
    parent_extent: i64,
    gain: f64,
    /// `order` of the parent cut, or −1 for the root.
    parent: i64,
    side: String,
}

/// Serializes a tree; cuts appear in creation order.
pub fn tree_to_json<T: Scalar>(tree: &CupidTree<T>) -> String {
    let doc = TreeDoc {
        source: SourceDoc {
            w: tree.source_width as i64,
            h: tree.source_height as i64,
        },
        cuts: tree
            .nodes
            .iter()
            .map(|n| CutDoc {
                order: n.cut.order as i64,
                axis: match n.cut.axis {
                    Axis::Horizontal => "H",
                    Axis::Vertical => "V",
                }
                .into(),
                offset: n.cut.offset as i64,
                parent_extent: n.cut.parent_extent as i64,
                gain: n.cut.gain.to_f64_lossy(),
                parent: n.parent.map_or(-1, |p| tree.nodes[p].cut.order as i64),
                side: match n.side {
                    Side::Left => "L",
                    Side::Right => "R",
                }
                .into(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("tree documents always serialize")
}

fn non_negative(v: i64, what: &str) -> Result<usize> {
    usize::try_from(v)
        .map_err(|_| Error::SchemaViolation(format!("{what} must be non-negative, got {v}")))
}

/// Parses and validates a tree document.
pub fn tree_from_json<T: Scalar>(text: &str) -> Result<CupidTree<T>> {
    let doc: TreeDoc =
        serde_json::from_str(text).map_err(|e| Error::SchemaViolation(e.to_string()))?;
    let n = doc.cuts.len();

    let mut seen = vec![false; n];
    for c in &doc.cuts {
        let ok = c.order >= 1
            && (c.order as u64) <= n as u64
            && !std::mem::replace(&mut seen[c.order as usize - 1], true);
        if !ok {
            return Err(Error::SchemaViolation(format!(
                "order values must be a permutation of 1..{n}; found {}",
                c.order
            )));
        }
    }
    let mut cuts = doc.cuts;
    cuts.sort_by_key(|c| c.order);

    let nodes = cuts
        .into_iter()
        .map(|c| {
            let axis = match c.axis.as_str() {
                "H" => Axis::Horizontal,
                "V" => Axis::Vertical,
                other => return Err(Error::SchemaViolation(format!("unknown axis {other:?}"))),
            };
            let side = match c.side.as_str() {
                "L" => Side::Left,
                "R" => Side::Right,
                other => return Err(Error::SchemaViolation(format!("unknown side {other:?}"))),
            };
            let parent = match c.parent {
                -1 => None,
                p if p >= 1 && (p as u64) <= n as u64 => Some(p as usize - 1),
                p => {
                    return Err(Error::SchemaViolation(format!(
                        "cut {} has unknown parent {p}",
                        c.order
                    )))
                }
            };
            Ok(CutNode {
                cut: Cut {
                    axis,
                    offset: non_negative(c.offset, "offset")?,
                    parent_extent: non_negative(c.parent_extent, "parent_extent")?,
                    gain: T::from_f64(c.gain).ok_or_else(|| {
                        Error::SchemaViolation(format!("gain {} not representable", c.gain))
                    })?,
                    order: c.order as usize,
                },
                parent,
                side,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    CupidTree::from_nodes(
        non_negative(doc.source.w, "source.w")?,
        non_negative(doc.source.h, "source.h")?,
        nodes,
    )
}
