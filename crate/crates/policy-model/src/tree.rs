//! Gate trees with a single k-of-n evaluator: AND is k = n, OR is k = 1.

use serde::{Deserialize, Serialize};

use crate::error::PolicyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    And,
    Or,
    Kofn,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode<L> {
    Leaf {
        leaf: L,
    },
    Gate {
        gate: GateKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
        children: Vec<TreeNode<L>>,
    },
}

impl<L> TreeNode<L> {
    pub fn leaf(leaf: L) -> Self {
        TreeNode::Leaf { leaf }
    }

    pub fn and(children: Vec<TreeNode<L>>) -> Self {
        TreeNode::Gate { gate: GateKind::And, k: None, children }
    }

    pub fn or(children: Vec<TreeNode<L>>) -> Self {
        TreeNode::Gate { gate: GateKind::Or, k: None, children }
    }

    pub fn kofn(k: usize, children: Vec<TreeNode<L>>) -> Self {
        TreeNode::Gate { gate: GateKind::Kofn, k: Some(k), children }
    }

    /// How many children must hold for this gate to hold.
    pub fn required(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Gate { gate, k, children } => match gate {
                GateKind::And => children.len(),
                GateKind::Or => 1,
                GateKind::Kofn => k.unwrap_or(0),
            },
        }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        if let TreeNode::Gate { gate, k, children } = self {
            if children.is_empty() {
                return Err(PolicyError::EmptyGate);
            }
            if *gate == GateKind::Kofn {
                let k = k.unwrap_or(0);
                if k == 0 || k > children.len() {
                    return Err(PolicyError::BadThreshold { k, n: children.len() });
                }
            }
            for c in children {
                c.validate()?;
            }
        }
        Ok(())
    }

    /// Unified k-of-n evaluation. With `short_circuit` the walk stops as soon
    /// as the gate outcome is forced; the decider must be side-effect free for
    /// the two modes to agree.
    pub fn evaluate<F: FnMut(&L) -> bool>(&self, decider: &mut F, short_circuit: bool) -> bool {
        match self {
            TreeNode::Leaf { leaf } => decider(leaf),
            TreeNode::Gate { children, .. } => {
                let need = self.required();
                let n = children.len();
                let mut hits = 0;
                for (idx, child) in children.iter().enumerate() {
                    if child.evaluate(decider, short_circuit) {
                        hits += 1;
                    }
                    if short_circuit {
                        if hits >= need {
                            return true;
                        }
                        let remaining = n - idx - 1;
                        if hits + remaining < need {
                            return false;
                        }
                    }
                }
                hits >= need
            }
        }
    }

    pub fn map_leaves<M, F: FnMut(&L) -> M>(&self, f: &mut F) -> TreeNode<M> {
        match self {
            TreeNode::Leaf { leaf } => TreeNode::Leaf { leaf: f(leaf) },
            TreeNode::Gate { gate, k, children } => TreeNode::Gate {
                gate: *gate,
                k: *k,
                children: children.iter().map(|c| c.map_leaves(f)).collect(),
            },
        }
    }

    pub fn try_map_leaves<M, E, F: FnMut(&L) -> Result<M, E>>(
        &self,
        f: &mut F,
    ) -> Result<TreeNode<M>, E> {
        Ok(match self {
            TreeNode::Leaf { leaf } => TreeNode::Leaf { leaf: f(leaf)? },
            TreeNode::Gate { gate, k, children } => TreeNode::Gate {
                gate: *gate,
                k: *k,
                children: children
                    .iter()
                    .map(|c| c.try_map_leaves(f))
                    .collect::<Result<_, E>>()?,
            },
        })
    }

    pub fn leaves(&self) -> Vec<&L> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a L>) {
        match self {
            TreeNode::Leaf { leaf } => out.push(leaf),
            TreeNode::Gate { children, .. } => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Gate { children, .. } => children.iter().map(|c| c.leaf_count()).sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bit(n: u8) -> TreeNode<u8> {
        TreeNode::leaf(n)
    }

    #[test]
    fn gates_are_threshold_specializations() {
        let decide = |truth: u8| move |l: &u8| (truth >> l) & 1 == 1;
        for truth in 0u8..8 {
            let children = vec![bit(0), bit(1), bit(2)];
            let and = TreeNode::and(children.clone());
            let or = TreeNode::or(children.clone());
            let k3 = TreeNode::kofn(3, children.clone());
            let k1 = TreeNode::kofn(1, children);
            for sc in [false, true] {
                assert_eq!(and.evaluate(&mut decide(truth), sc), k3.evaluate(&mut decide(truth), sc));
                assert_eq!(or.evaluate(&mut decide(truth), sc), k1.evaluate(&mut decide(truth), sc));
                assert_eq!(and.evaluate(&mut decide(truth), sc), truth == 7);
                assert_eq!(or.evaluate(&mut decide(truth), sc), truth != 0);
            }
        }
    }

    #[test]
    fn kofn_counts_exactly() {
        let t = TreeNode::kofn(2, vec![bit(0), bit(1), bit(2)]);
        for truth in 0u8..8 {
            let expected = truth.count_ones() >= 2;
            assert_eq!(t.evaluate(&mut |l| (truth >> l) & 1 == 1, true), expected);
            assert_eq!(t.evaluate(&mut |l| (truth >> l) & 1 == 1, false), expected);
        }
    }

    #[test]
    fn validate_rejects_malformed_gates() {
        assert_eq!(TreeNode::<u8>::and(vec![]).validate(), Err(PolicyError::EmptyGate));
        assert_eq!(
            TreeNode::kofn(4, vec![bit(0), bit(1)]).validate(),
            Err(PolicyError::BadThreshold { k: 4, n: 2 })
        );
        assert_eq!(
            TreeNode::kofn(0, vec![bit(0)]).validate(),
            Err(PolicyError::BadThreshold { k: 0, n: 1 })
        );
        assert!(TreeNode::kofn(2, vec![bit(0), bit(1)]).validate().is_ok());
    }

    #[test]
    fn short_circuit_skips_unneeded_leaves() {
        let t = TreeNode::or(vec![bit(0), bit(1)]);
        let mut seen = Vec::new();
        t.evaluate(
            &mut |l| {
                seen.push(*l);
                true
            },
            true,
        );
        assert_eq!(seen, vec![0]);
    }

    #[test]
    fn serialization_shape() {
        let t = TreeNode::kofn(2, vec![TreeNode::leaf("a".to_string()), TreeNode::and(vec![TreeNode::leaf("b".to_string())])]);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(
            json,
            r#"{"gate":"kofn","k":2,"children":[{"leaf":"a"},{"gate":"and","children":[{"leaf":"b"}]}]}"#
        );
        let back: TreeNode<String> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}
