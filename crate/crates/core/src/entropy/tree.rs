use rand::Rng;
use serde::{Deserialize, Serialize};

use super::class::{FiniteClass, RowSet};
use super::potential::entropy_potential;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeNode {
    pub x: usize,
    pub s0: f64,
    pub s1: f64,
}

/// Complete binary tree of depth `D`, internal nodes stored in heap order
/// (children of `i` are `2i+1` for edge 0 and `2i+2` for edge 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledTree {
    depth: usize,
    nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct NodeJson {
    x: usize,
    s0: f64,
    s1: f64,
    #[serde(default)]
    children: Vec<NodeJson>,
}

impl ScaledTree {
    pub fn new(depth: usize, nodes: Vec<TreeNode>) -> Result<Self> {
        if depth >= 24 || nodes.len() != (1usize << depth) - 1 {
            return Err(Error::Domain(format!("a depth-{depth} tree needs 2^{depth} - 1 nodes, got {}", nodes.len())));
        }
        Ok(Self { depth, nodes })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Version space reached at every node, in heap order.
    fn version_spaces(&self, class: &FiniteClass) -> Result<Vec<RowSet>> {
        let mut vs = vec![RowSet::EMPTY; self.nodes.len()];
        if let Some(first) = vs.first_mut() {
            *first = class.all();
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.x >= class.m() {
                return Err(Error::Domain(format!("node {i} queries point {} of {}", node.x, class.m())));
            }
            for (b, s) in [node.s0, node.s1].into_iter().enumerate() {
                let child = class.restrict(vs[i], node.x, s);
                if child.is_empty() {
                    return Err(Error::Precondition(format!("edge {b} of node {i} has an empty version space")));
                }
                if let Some(slot) = vs.get_mut(2 * i + 1 + b) {
                    *slot = child;
                }
            }
        }
        Ok(vs)
    }

    /// Errors unless every branch prefix is consistent with some row.
    pub fn check_realizable(&self, class: &FiniteClass) -> Result<()> {
        self.version_spaces(class).map(|_| ())
    }

    /// A random realizable tree: each node queries a random point where its
    /// version space disagrees, with two distinct values present there; nodes
    /// whose version space agrees everywhere get a zero-gap edge pair.
    pub fn random<R: Rng>(rng: &mut R, class: &FiniteClass, depth: usize) -> Result<Self> {
        let count = (1usize << depth) - 1;
        let mut vs = vec![class.all(); count];
        let mut nodes = Vec::with_capacity(count);
        for i in 0..count {
            let u = vs[i];
            let split: Vec<usize> = (0..class.m()).filter(|&x| class.labels_at(u, x).len() > 1).collect();
            let node = if split.is_empty() {
                let x = rng.gen_range(0..class.m());
                let s = class.value(u.iter().next().expect("nonempty"), x);
                TreeNode { x, s0: s, s1: s }
            } else {
                let x = split[rng.gen_range(0..split.len())];
                let labels = class.labels_at(u, x);
                let a = rng.gen_range(0..labels.len());
                let mut b = rng.gen_range(0..labels.len() - 1);
                if b >= a {
                    b += 1;
                }
                TreeNode { x, s0: labels[a], s1: labels[b] }
            };
            for (b, s) in [node.s0, node.s1].into_iter().enumerate() {
                if let Some(slot) = vs.get_mut(2 * i + 1 + b) {
                    *slot = class.restrict(u, node.x, s);
                }
            }
            nodes.push(node);
        }
        Self::new(depth, nodes)
    }

    /// Nested `{x, s0, s1, children}` objects; `null` for the empty tree.
    pub fn to_json(&self) -> serde_json::Value {
        fn build(t: &ScaledTree, i: usize) -> Option<NodeJson> {
            let n = t.nodes.get(i)?;
            let children: Vec<NodeJson> = [2 * i + 1, 2 * i + 2].iter().filter_map(|&c| build(t, c)).collect();
            Some(NodeJson { x: n.x, s0: n.s0, s1: n.s1, children })
        }
        serde_json::to_value(build(self, 0)).expect("tree serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let root: Option<NodeJson> = serde_json::from_value(v.clone())?;
        let Some(root) = root else {
            return Self::new(0, vec![]);
        };
        let mut depth = 0;
        let mut level = vec![&root];
        let mut nodes = Vec::new();
        while !level.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            let leaves = level.iter().filter(|n| n.children.is_empty()).count();
            if leaves != 0 && leaves != level.len() {
                return Err(Error::Format(format!("tree is not complete at depth {depth}")));
            }
            for n in &level {
                if !n.children.is_empty() && n.children.len() != 2 {
                    return Err(Error::Format("internal nodes need exactly two children".into()));
                }
                nodes.push(TreeNode { x: n.x, s0: n.s0, s1: n.s1 });
                next.extend(n.children.iter());
            }
            level = next;
        }
        Self::new(depth, nodes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    /// Edge taken at each level.
    pub branch: Vec<u8>,
    pub gap_sum: f64,
    /// `Phi` of the version space before each step and after the last.
    pub potential_trace: Vec<f64>,
}

/// Slack allowed on the one-step potential drop.
pub const DROP_TOL: f64 = 1e-9;

/// Walks root to leaf, taking a child whose potential is at least
/// `gamma / (4c)` below its parent's (child 0 when both qualify).
pub fn greedy_branch_descent(class: &FiniteClass, tree: &ScaledTree) -> Result<Descent> {
    tree.check_realizable(class)?;
    let c = class.loss().c();
    let mut u = class.all();
    let mut phi = entropy_potential(class, u)?;
    let mut out = Descent { branch: Vec::new(), gap_sum: 0.0, potential_trace: vec![phi] };
    let mut i = 0;
    while let Some(node) = tree.nodes.get(i) {
        let gamma = class.loss().evaluate(node.s0, node.s1)?;
        let target = phi - gamma / (4.0 * c) + DROP_TOL;
        let u0 = class.restrict(u, node.x, node.s0);
        let u1 = class.restrict(u, node.x, node.s1);
        let phi0 = entropy_potential(class, u0)?;
        let (b, next, next_phi) = if phi0 <= target {
            (0u8, u0, phi0)
        } else {
            let phi1 = entropy_potential(class, u1)?;
            if phi1 > target {
                return Err(Error::Construction(format!(
                    "no child of node {i} drops the potential by {}: {phi} -> ({phi0}, {phi1})",
                    gamma / (4.0 * c)
                )));
            }
            (1u8, u1, phi1)
        };
        out.branch.push(b);
        out.gap_sum += gamma;
        out.potential_trace.push(next_phi);
        u = next;
        phi = next_phi;
        i = 2 * i + 1 + b as usize;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::class::cube_class;

    fn cube_tree() -> ScaledTree {
        let n = |x| TreeNode { x, s0: 0.0, s1: 1.0 };
        ScaledTree::new(2, vec![n(0), n(1), n(1)]).unwrap()
    }

    #[test]
    fn cube_descent() {
        let c = cube_class();
        let d = greedy_branch_descent(&c, &cube_tree()).unwrap();
        assert_eq!(d.gap_sum, 2.0);
        assert_eq!(d.branch, vec![0, 0]);
        assert_eq!(d.potential_trace, vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn empty_tree() {
        let c = cube_class();
        let d = greedy_branch_descent(&c, &ScaledTree::new(0, vec![]).unwrap()).unwrap();
        assert_eq!(d.gap_sum, 0.0);
        assert!(d.branch.is_empty());
    }

    #[test]
    fn unrealizable_tree() {
        let n = TreeNode { x: 0, s0: 0.0, s1: 1.0 };
        let t = ScaledTree::new(2, vec![n, n, n]).unwrap();
        assert!(matches!(greedy_branch_descent(&cube_class(), &t), Err(Error::Precondition(_))));
    }

    #[test]
    fn json_roundtrip() {
        let t = cube_tree();
        let v = t.to_json();
        assert_eq!(v["children"][1]["x"], 1);
        assert_eq!(ScaledTree::from_json(&v).unwrap(), t);
        let empty = ScaledTree::new(0, vec![]).unwrap();
        assert_eq!(ScaledTree::from_json(&empty.to_json()).unwrap(), empty);
    }
}
