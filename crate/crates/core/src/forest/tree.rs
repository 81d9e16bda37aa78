//! Weighted binary decision trees split on Gini impurity.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::FeatureMatrix;
use crate::error::{Error, Result};

/// Gains closer than this are treated as equal, so ties resolve by feature
/// index and threshold instead of by rounding noise.
pub(crate) const GAIN_EPS: f64 = 1e-12;

/// Gini impurity of a node holding the given positive and negative masses.
pub fn gini(pos: f64, neg: f64) -> Result<f64> {
    if pos < 0.0 || neg < 0.0 || pos + neg <= 0.0 || (pos + neg).is_nan() {
        return Err(Error::InvalidArgument(format!(
            "class masses must be non-negative and not both zero, got ({pos}, {neg})"
        )));
    }
    Ok(impurity(pos, neg))
}

#[inline]
fn impurity(pos: f64, neg: f64) -> f64 {
    let w = pos + neg;
    let p = pos / w;
    let n = neg / w;
    1.0 - p * p - n * n
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Decrease in weighted Gini impurity, normalised by the node weight.
    pub gain: f64,
}

/// Midpoint between two adjacent distinct values, kept strictly below `hi`.
#[inline]
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = (lo + hi) / 2.0;
    if mid < hi {
        mid
    } else {
        lo
    }
}

/// Exhaustive search for the best split of a node.
///
/// `rows[i]` carries weight `weights[i]`. For every candidate feature the
/// distinct values are sorted and each midpoint between neighbours is tried;
/// rows with value `<= threshold` go left. Returns `None` when no split has
/// positive gain. Equal gains prefer the lower feature index, then the lower
/// threshold.
pub fn best_split(
    matrix: &FeatureMatrix,
    labels: &[bool],
    rows: &[usize],
    weights: &[f64],
    features: &[usize],
) -> Option<Split> {
    let mut node: Vec<(usize, f64)> = rows.iter().copied().zip(weights.iter().copied()).collect();
    let mut sorted_features = features.to_vec();
    sorted_features.sort_unstable();
    best_split_in(matrix, labels, &mut node, &sorted_features, &mut Vec::new())
}

fn best_split_in(
    matrix: &FeatureMatrix,
    labels: &[bool],
    node: &mut [(usize, f64)],
    features: &[usize],
    scratch: &mut Vec<(f64, f64, bool)>,
) -> Option<Split> {
    let (pos, neg) = masses(labels, node);
    let total = pos + neg;
    if total <= 0.0 || total.is_nan() {
        return None;
    }
    let parent = impurity(pos, neg);
    let mut best: Option<Split> = None;

    for &feature in features {
        scratch.clear();
        scratch.extend(
            node.iter()
                .map(|&(r, w)| (matrix.get(r, feature), w, labels[r])),
        );
        scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let (mut lpos, mut lneg) = (0.0, 0.0);
        for i in 0..scratch.len() - 1 {
            let (v, w, y) = scratch[i];
            if y {
                lpos += w;
            } else {
                lneg += w;
            }
            let next = scratch[i + 1].0;
            if next <= v {
                continue;
            }
            let lw = lpos + lneg;
            let (rpos, rneg) = (pos - lpos, neg - lneg);
            let rw = rpos + rneg;
            if !(lw > 0.0 && rw > 0.0) {
                continue;
            }
            let gain =
                parent - (lw / total) * impurity(lpos, lneg) - (rw / total) * impurity(rpos, rneg);
            let better = match best {
                None => gain > GAIN_EPS,
                Some(b) => gain > b.gain + GAIN_EPS,
            };
            if better {
                best = Some(Split {
                    feature,
                    threshold: midpoint(v, next),
                    gain,
                });
            }
        }
    }
    best
}

fn masses(labels: &[bool], node: &[(usize, f64)]) -> (f64, f64) {
    node.iter().fold(
        (0.0, 0.0),
        |(p, n), &(r, w)| {
            if labels[r] {
                (p + w, n)
            } else {
                (p, n + w)
            }
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        /// Weighted fraction of positive training rows that reached the leaf.
        positive_fraction: f64,
    },
}

/// A tree stored as a node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn from_nodes(nodes: Vec<Node>) -> Result<DecisionTree> {
        if nodes.is_empty() {
            return Err(Error::MalformedArtifact("tree without nodes".into()));
        }
        for (i, node) in nodes.iter().enumerate() {
            match *node {
                Node::Leaf { positive_fraction } => {
                    if !(0.0..=1.0).contains(&positive_fraction) {
                        return Err(Error::MalformedArtifact(format!(
                            "leaf fraction {positive_fraction} outside [0, 1]"
                        )));
                    }
                }
                Node::Split {
                    left,
                    right,
                    threshold,
                    ..
                } => {
                    let ok = |c: u32| (c as usize) > i && (c as usize) < nodes.len();
                    if !ok(left) || !ok(right) || !threshold.is_finite() {
                        return Err(Error::MalformedArtifact(format!("bad split node {i}")));
                    }
                }
            }
        }
        Ok(DecisionTree { nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, id: u32) -> &Node {
        &self.nodes[id as usize]
    }

    /// Positive fraction of the leaf `row` lands in.
    #[inline]
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut id = 0usize;
        loop {
            match self.nodes[id] {
                Node::Leaf { positive_fraction } => return positive_fraction,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    id = if row[feature as usize] <= threshold {
                        left as usize
                    } else {
                        right as usize
                    };
                }
            }
        }
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(t: &DecisionTree, id: u32) -> usize {
            match *t.node(id) {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, left).max(walk(t, right)),
            }
        }
        walk(self, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn max_feature_index(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature as usize),
                Node::Leaf { .. } => None,
            })
            .max()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub mtry: usize,
    pub min_node_weight: f64,
}

/// Grow one tree on a weighted sample.
///
/// At every node that is impure, shallower than `max_depth` and at least
/// `min_node_weight` heavy, `mtry` distinct features are drawn from `rng`
/// and the best split among them is applied. Children are grown left first,
/// so the sequence of draws depends only on the tree's shape.
pub fn build_tree<R: Rng + ?Sized>(
    matrix: &FeatureMatrix,
    labels: &[bool],
    rows: &[usize],
    weights: &[f64],
    params: &TreeParams,
    rng: &mut R,
) -> DecisionTree {
    assert_eq!(rows.len(), weights.len(), "one weight per sampled row");
    let mut node: Vec<(usize, f64)> = rows
        .iter()
        .copied()
        .zip(weights.iter().copied())
        .filter(|&(_, w)| w > 0.0)
        .collect();
    let mut builder = Builder {
        matrix,
        labels,
        params,
        nodes: Vec::new(),
        scratch: Vec::new(),
    };
    builder.grow(&mut node, 0, rng);
    DecisionTree {
        nodes: builder.nodes,
    }
}

struct Builder<'a> {
    matrix: &'a FeatureMatrix,
    labels: &'a [bool],
    params: &'a TreeParams,
    nodes: Vec<Node>,
    scratch: Vec<(f64, f64, bool)>,
}

impl Builder<'_> {
    fn leaf(&mut self, pos: f64, neg: f64) -> u32 {
        let total = pos + neg;
        let positive_fraction = if total > 0.0 { pos / total } else { 0.0 };
        self.nodes.push(Node::Leaf { positive_fraction });
        (self.nodes.len() - 1) as u32
    }

    fn grow<R: Rng + ?Sized>(
        &mut self,
        node: &mut [(usize, f64)],
        depth: usize,
        rng: &mut R,
    ) -> u32 {
        let (pos, neg) = masses(self.labels, node);
        let pure = pos == 0.0 || neg == 0.0;
        let depth_reached = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || pos + neg < self.params.min_node_weight {
            return self.leaf(pos, neg);
        }

        let n_features = self.matrix.n_cols();
        let mut features = index::sample(rng, n_features, self.params.mtry).into_vec();
        features.sort_unstable();
        let Some(split) =
            best_split_in(self.matrix, self.labels, node, &features, &mut self.scratch)
        else {
            return self.leaf(pos, neg);
        };

        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            positive_fraction: 0.0,
        });
        let mut boundary = 0;
        for i in 0..node.len() {
            if self.matrix.get(node[i].0, split.feature) <= split.threshold {
                node.swap(i, boundary);
                boundary += 1;
            }
        }
        let (left_rows, right_rows) = node.split_at_mut(boundary);
        let left = self.grow(left_rows, depth + 1, rng);
        let right = self.grow(right_rows, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature: split.feature as u32,
            threshold: split.threshold,
            left,
            right,
        };
        id as u32
    }
}
