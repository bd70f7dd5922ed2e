//! Bag-of-bits numeric comparisons.
//!
//! An s-bit attribute value w is published as s single-bit wildcard patterns
//! ("AT:0****", "AT:*1***", ...). A comparison compiles to an AND/OR tree over
//! such patterns via the prefix construction, so range predicates reduce to
//! set membership on at most s(s+1)/2 leaves.

use serde::{Deserialize, Serialize};

use crate::error::PolicyError;
use crate::tree::TreeNode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl CmpOp {
    pub fn holds(self, w: u64, v: u64) -> bool {
        match self {
            CmpOp::Lt => w < v,
            CmpOp::Gt => w > v,
            CmpOp::Le => w <= v,
            CmpOp::Ge => w >= v,
            CmpOp::Eq => w == v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericComparison {
    pub name: String,
    pub op: CmpOp,
    pub value: u64,
    pub bits: u32,
}

/// Result of compilation: degenerate comparisons collapse to constants, which
/// callers absorb through gates before anything gets encrypted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Compiled {
    Always(bool),
    Tree(TreeNode<String>),
}

fn check_width(bits: u32) -> Result<(), PolicyError> {
    if bits == 0 || bits > 64 {
        return Err(PolicyError::BadBitWidth(bits));
    }
    Ok(())
}

fn check_range(value: u64, bits: u32) -> Result<(), PolicyError> {
    check_width(bits)?;
    if bits < 64 && value >> bits != 0 {
        return Err(PolicyError::ValueOutOfRange { value, bits });
    }
    Ok(())
}

/// Bit i of v, MSB-first within an s-bit window.
fn bit_at(value: u64, bits: u32, i: u32) -> u64 {
    (value >> (bits - 1 - i)) & 1
}

/// Single-bit pattern leaf, e.g. `AT:*1***` for bit 1 set in a 5-bit window.
fn bit_leaf(name: &str, bits: u32, pos: u32, bit: u64) -> String {
    let mut pat = String::with_capacity(bits as usize);
    for i in 0..bits {
        pat.push(if i == pos { if bit == 1 { '1' } else { '0' } } else { '*' });
    }
    format!("{name}:{pat}")
}

fn collapse(mut children: Vec<TreeNode<String>>, and: bool) -> TreeNode<String> {
    if children.len() == 1 {
        children.pop().unwrap()
    } else if and {
        TreeNode::and(children)
    } else {
        TreeNode::or(children)
    }
}

/// One OR-branch per position i where v's bit differs from `want`: the branch
/// pins bits 0..i to v and bit i to `want`. With want = 1 this accepts w > v,
/// with want = 0 it accepts w < v.
fn prefix_tree(name: &str, value: u64, bits: u32, want: u64) -> Compiled {
    let mut branches = Vec::new();
    for i in 0..bits {
        if bit_at(value, bits, i) != want {
            let mut leaves: Vec<TreeNode<String>> = (0..i)
                .map(|j| TreeNode::leaf(bit_leaf(name, bits, j, bit_at(value, bits, j))))
                .collect();
            leaves.push(TreeNode::leaf(bit_leaf(name, bits, i, want)));
            branches.push(collapse(leaves, true));
        }
    }
    if branches.is_empty() {
        Compiled::Always(false)
    } else {
        Compiled::Tree(collapse(branches, false))
    }
}

impl NumericComparison {
    pub fn new(name: impl Into<String>, op: CmpOp, value: u64, bits: u32) -> Self {
        NumericComparison { name: name.into(), op, value, bits }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        if self.name.is_empty() {
            return Err(PolicyError::EmptyAttributeName);
        }
        check_range(self.value, self.bits)
    }

    pub fn compile(&self) -> Result<Compiled, PolicyError> {
        self.validate()?;
        let max = if self.bits == 64 { u64::MAX } else { (1 << self.bits) - 1 };
        Ok(match self.op {
            CmpOp::Gt => prefix_tree(&self.name, self.value, self.bits, 1),
            CmpOp::Lt => prefix_tree(&self.name, self.value, self.bits, 0),
            // Saturating rewrites: >= 0 and <= max hold for every s-bit value.
            CmpOp::Ge => {
                if self.value == 0 {
                    Compiled::Always(true)
                } else {
                    prefix_tree(&self.name, self.value - 1, self.bits, 1)
                }
            }
            CmpOp::Le => {
                if self.value == max {
                    Compiled::Always(true)
                } else {
                    prefix_tree(&self.name, self.value + 1, self.bits, 0)
                }
            }
            CmpOp::Eq => Compiled::Tree(collapse(
                (0..self.bits)
                    .map(|i| {
                        TreeNode::leaf(bit_leaf(&self.name, self.bits, i, bit_at(self.value, self.bits, i)))
                    })
                    .collect(),
                true,
            )),
        })
    }
}

/// The `bits` single-bit patterns describing `value`, one per position.
pub fn encode_numeric_attribute(
    name: &str,
    value: u64,
    bits: u32,
) -> Result<Vec<String>, PolicyError> {
    if name.is_empty() {
        return Err(PolicyError::EmptyAttributeName);
    }
    check_range(value, bits)?;
    Ok((0..bits).map(|i| bit_leaf(name, bits, i, bit_at(value, bits, i))).collect())
}
