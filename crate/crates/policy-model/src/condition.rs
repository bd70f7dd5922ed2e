//! Condition expressions as written in policies, and their compilation to
//! pattern-leaf trees with boolean absorption of constant subterms.

use serde::{Deserialize, Serialize};

use crate::error::PolicyError;
use crate::numeric::{Compiled, NumericComparison};
use crate::tree::TreeNode;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionExpr {
    And(Vec<ConditionExpr>),
    Or(Vec<ConditionExpr>),
    Kofn(usize, Vec<ConditionExpr>),
    /// String predicate `name=value`; its leaf element is the literal
    /// "name=value" string.
    StrEq { name: String, value: String },
    Num(NumericComparison),
}

impl ConditionExpr {
    /// Compile to a tree over attribute element strings. Constant subtrees
    /// from degenerate numeric comparisons are absorbed: a true child lowers a
    /// threshold, a false child shrinks the candidate pool.
    pub fn compile(&self) -> Result<Compiled, PolicyError> {
        match self {
            ConditionExpr::StrEq { name, value } => {
                if name.is_empty() {
                    return Err(PolicyError::EmptyAttributeName);
                }
                Ok(Compiled::Tree(TreeNode::leaf(format!("{name}={value}"))))
            }
            ConditionExpr::Num(c) => c.compile(),
            ConditionExpr::And(cs) => compile_gate(cs, cs.len(), true),
            ConditionExpr::Or(cs) => compile_gate(cs, 1, false),
            ConditionExpr::Kofn(k, cs) => {
                if *k == 0 || *k > cs.len() {
                    return Err(PolicyError::BadThreshold { k: *k, n: cs.len() });
                }
                compile_gate(cs, *k, false)
            }
        }
    }
}

fn compile_gate(children: &[ConditionExpr], k: usize, is_and: bool) -> Result<Compiled, PolicyError> {
    if children.is_empty() {
        return Err(PolicyError::EmptyGate);
    }
    let mut need = k;
    let mut kept = Vec::new();
    for child in children {
        match child.compile()? {
            Compiled::Always(true) => need = need.saturating_sub(1),
            Compiled::Always(false) => {}
            Compiled::Tree(t) => kept.push(t),
        }
    }
    if need == 0 {
        return Ok(Compiled::Always(true));
    }
    if kept.len() < need {
        return Ok(Compiled::Always(false));
    }
    Ok(Compiled::Tree(if kept.len() == 1 {
        kept.pop().unwrap()
    } else if need == kept.len() {
        TreeNode::and(kept)
    } else if need == 1 {
        TreeNode::or(kept)
    } else if is_and {
        // unreachable: an AND over n kept children always needs all of them
        TreeNode::and(kept)
    } else {
        TreeNode::kofn(need, kept)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::CmpOp;

    fn num(op: CmpOp, v: u64) -> ConditionExpr {
        ConditionExpr::Num(NumericComparison::new("x", op, v, 3))
    }

    fn streq(name: &str, value: &str) -> ConditionExpr {
        ConditionExpr::StrEq { name: name.into(), value: value.into() }
    }

    #[test]
    fn string_predicate_compiles_to_single_leaf() {
        let c = streq("Location", "Cardiology-ward").compile().unwrap();
        assert_eq!(c, Compiled::Tree(TreeNode::leaf("Location=Cardiology-ward".to_string())));
    }

    #[test]
    fn constants_absorb_through_and() {
        // AND(true, p) = p; AND(false, p) = false.
        let t = ConditionExpr::And(vec![num(CmpOp::Ge, 0), streq("a", "b")]).compile().unwrap();
        assert_eq!(t, Compiled::Tree(TreeNode::leaf("a=b".to_string())));
        let f = ConditionExpr::And(vec![num(CmpOp::Lt, 0), streq("a", "b")]).compile().unwrap();
        assert_eq!(f, Compiled::Always(false));
    }

    #[test]
    fn constants_absorb_through_or() {
        let t = ConditionExpr::Or(vec![num(CmpOp::Ge, 0), streq("a", "b")]).compile().unwrap();
        assert_eq!(t, Compiled::Always(true));
        let f = ConditionExpr::Or(vec![num(CmpOp::Lt, 0), streq("a", "b")]).compile().unwrap();
        assert_eq!(f, Compiled::Tree(TreeNode::leaf("a=b".to_string())));
    }

    #[test]
    fn kofn_threshold_shifts_under_constants() {
        // 2-of-(true, p, q) = 1-of-(p, q); 2-of-(false, p, q) = AND(p, q).
        let c = ConditionExpr::Kofn(2, vec![num(CmpOp::Ge, 0), streq("a", "1"), streq("b", "2")])
            .compile()
            .unwrap();
        assert_eq!(
            c,
            Compiled::Tree(TreeNode::or(vec![
                TreeNode::leaf("a=1".to_string()),
                TreeNode::leaf("b=2".to_string()),
            ]))
        );
        let c = ConditionExpr::Kofn(2, vec![num(CmpOp::Lt, 0), streq("a", "1"), streq("b", "2")])
            .compile()
            .unwrap();
        assert_eq!(
            c,
            Compiled::Tree(TreeNode::and(vec![
                TreeNode::leaf("a=1".to_string()),
                TreeNode::leaf("b=2".to_string()),
            ]))
        );
    }

    #[test]
    fn malformed_gates_error() {
        assert_eq!(ConditionExpr::And(vec![]).compile(), Err(PolicyError::EmptyGate));
        assert_eq!(
            ConditionExpr::Kofn(3, vec![streq("a", "1")]).compile(),
            Err(PolicyError::BadThreshold { k: 3, n: 1 })
        );
    }
}
