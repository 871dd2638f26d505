//! Depth-bounded weighted least-squares regression trees.
//!
//! Splits are exact: every boundary between distinct sorted feature values is
//! a candidate, and both children must hold at least `min_node` rows. Rows
//! are presorted once per feature per fit; growing a tree stably partitions
//! those orders node by node, so one tree costs O(n · p · depth).

use serde::{Deserialize, Serialize};

use crate::data::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Column-major copy of the training matrix with per-feature sorted row order.
pub(crate) struct Columns {
    cols: Vec<Vec<f64>>,
    sorted: Vec<Vec<u32>>,
    n: usize,
}

impl Columns {
    pub fn new(x: &Matrix) -> Self {
        let n = x.nrows();
        let cols: Vec<Vec<f64>> = (0..x.ncols()).map(|j| x.column(j)).collect();
        let sorted = cols
            .iter()
            .map(|c| {
                let mut idx: Vec<u32> = (0..n as u32).collect();
                idx.sort_by(|&a, &b| c[a as usize].total_cmp(&c[b as usize]).then(a.cmp(&b)));
                idx
            })
            .collect();
        Columns { cols, sorted, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: usize,
    pub min_node: usize,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    n_left: usize,
}

struct Builder<'a> {
    data: &'a Columns,
    target: &'a [f64],
    weight: &'a [f64],
    params: TreeParams,
    order: Vec<Vec<u32>>,
    scratch: Vec<u32>,
    goes_left: Vec<bool>,
    nodes: Vec<Node>,
    fitted: Vec<f64>,
}

/// Grows one tree on `target` with observation weights `weight`.
/// `leaf_value` maps the rows of a terminal node to its output. Returns the
/// tree together with each training row's leaf value.
pub(crate) fn grow<F>(
    data: &Columns,
    target: &[f64],
    weight: &[f64],
    params: TreeParams,
    leaf_value: F,
) -> (RegressionTree, Vec<f64>)
where
    F: Fn(&[u32]) -> f64,
{
    let mut b = Builder {
        data,
        target,
        weight,
        params,
        order: data.sorted.clone(),
        scratch: Vec::with_capacity(data.n),
        goes_left: vec![false; data.n],
        nodes: Vec::new(),
        fitted: vec![0.0; data.n],
    };
    b.build(0, data.n, 0, &leaf_value);
    (RegressionTree { nodes: b.nodes }, b.fitted)
}

impl Builder<'_> {
    fn build<F: Fn(&[u32]) -> f64>(&mut self, lo: usize, hi: usize, depth: usize, leaf_value: &F) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0 });

        let split = if depth < self.params.max_depth && hi - lo >= 2 * self.params.min_node.max(1) {
            self.best_split(lo, hi)
        } else {
            None
        };

        match split {
            None => {
                let rows = &self.order[0][lo..hi];
                let value = leaf_value(rows);
                for &r in rows {
                    self.fitted[r as usize] = value;
                }
                self.nodes[id] = Node::Leaf { value };
            }
            Some(s) => {
                self.partition(lo, hi, s.feature, s.threshold);
                let mid = lo + s.n_left;
                let left = self.build(lo, mid, depth + 1, leaf_value);
                let right = self.build(mid, hi, depth + 1, leaf_value);
                self.nodes[id] = Node::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left,
                    right,
                };
            }
        }
        id
    }

    fn best_split(&self, lo: usize, hi: usize) -> Option<SplitChoice> {
        let min_node = self.params.min_node.max(1);
        let count = hi - lo;
        let (mut s_tot, mut w_tot) = (0.0, 0.0);
        for &r in &self.order[0][lo..hi] {
            let r = r as usize;
            s_tot += self.weight[r] * self.target[r];
            w_tot += self.weight[r];
        }
        if w_tot <= 0.0 {
            return None;
        }
        let parent = s_tot * s_tot / w_tot;
        let min_gain = 1e-12 * (1.0 + parent.abs());

        let mut best: Option<(f64, SplitChoice)> = None;
        for (f, col) in self.data.cols.iter().enumerate() {
            let rows = &self.order[f][lo..hi];
            let (mut s_left, mut w_left) = (0.0, 0.0);
            for k in 0..count - 1 {
                let r = rows[k] as usize;
                s_left += self.weight[r] * self.target[r];
                w_left += self.weight[r];
                let n_left = k + 1;
                if n_left < min_node {
                    continue;
                }
                if count - n_left < min_node {
                    break;
                }
                let (a, b) = (col[r], col[rows[k + 1] as usize]);
                if a >= b {
                    continue;
                }
                let w_right = w_tot - w_left;
                if w_left <= 0.0 || w_right <= 0.0 {
                    continue;
                }
                let s_right = s_tot - s_left;
                let gain = s_left * s_left / w_left + s_right * s_right / w_right - parent;
                if gain > min_gain && best.as_ref().is_none_or(|(g, _)| gain > *g) {
                    let mut threshold = a + (b - a) / 2.0;
                    if threshold >= b {
                        threshold = a;
                    }
                    best = Some((
                        gain,
                        SplitChoice {
                            feature: f,
                            threshold,
                            n_left,
                        },
                    ));
                }
            }
        }
        best.map(|(_, s)| s)
    }

    fn partition(&mut self, lo: usize, hi: usize, feature: usize, threshold: f64) {
        let col = &self.data.cols[feature];
        for &r in &self.order[feature][lo..hi] {
            self.goes_left[r as usize] = col[r as usize] <= threshold;
        }
        for f in 0..self.order.len() {
            let seg = &mut self.order[f][lo..hi];
            self.scratch.clear();
            let mut w = 0;
            for k in 0..seg.len() {
                let r = seg[k];
                if self.goes_left[r as usize] {
                    seg[w] = r;
                    w += 1;
                } else {
                    self.scratch.push(r);
                }
            }
            seg[w..].copy_from_slice(&self.scratch);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_leaf<'a>(target: &'a [f64]) -> impl Fn(&[u32]) -> f64 + 'a {
        move |rows| rows.iter().map(|&r| target[r as usize]).sum::<f64>() / rows.len() as f64
    }

    #[test]
    fn memorizes_distinct_points() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let y = [5.0, -1.0, 2.0, 7.0];
        let cols = Columns::new(&x);
        let params = TreeParams { max_depth: 3, min_node: 1 };
        let (tree, fitted) = grow(&cols, &y, &[1.0; 4], params, mean_leaf(&y));
        assert_eq!(fitted, y);
        for i in 0..4 {
            assert_eq!(tree.predict(x.row(i)), y[i]);
        }
        assert_eq!(tree.n_leaves(), 4);
    }

    #[test]
    fn depth_and_min_node_respected() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i * 7 % 13) as f64]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let y: Vec<f64> = (0..40).map(|i| ((i * 31) % 17) as f64).collect();
        let cols = Columns::new(&x);
        let params = TreeParams { max_depth: 3, min_node: 5 };
        let (tree, fitted) = grow(&cols, &y, &vec![1.0; 40], params, mean_leaf(&y));
        assert!(tree.depth() <= 3);
        let mut sizes = std::collections::HashMap::new();
        for i in 0..40 {
            assert_eq!(tree.predict(x.row(i)), fitted[i]);
            *sizes.entry(fitted[i].to_bits()).or_insert(0) += 1;
        }
        assert!(sizes.values().all(|&s| s >= 5));
    }

    #[test]
    fn ties_go_to_lowest_feature() {
        // both columns separate the targets identically
        let x = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let y = [0.0, 1.0];
        let (tree, _) = grow(
            &Columns::new(&x),
            &y,
            &[1.0, 1.0],
            TreeParams { max_depth: 1, min_node: 1 },
            mean_leaf(&y),
        );
        assert!(matches!(tree.nodes[0], Node::Split { feature: 0, .. }));
    }

    #[test]
    fn constant_target_is_single_leaf() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let y = [2.0; 3];
        let (tree, _) = grow(
            &Columns::new(&x),
            &y,
            &[1.0; 3],
            TreeParams { max_depth: 4, min_node: 1 },
            mean_leaf(&y),
        );
        assert_eq!(tree.n_leaves(), 1);
    }
}
