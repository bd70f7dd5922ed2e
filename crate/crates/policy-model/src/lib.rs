//! Cleartext policy structures shared by every engine: gate trees with a
//! unified k-of-n evaluator, bag-of-bits numeric comparisons, the policy DSL,
//! attribute sets, constraint specifications and the cleartext reference
//! oracle.

mod attrs;
mod condition;
mod constraint;
mod dsl;
mod error;
mod numeric;
pub mod oracle;
mod sat;
pub mod scenario;
mod tree;

pub use attrs::AttributeSet;
pub use condition::ConditionExpr;
pub use constraint::{ConstraintSpec, CwBranch, CwSpec, HbdsodSpec, SodGroup};
pub use dsl::{parse_condition, parse_policy};
pub use error::PolicyError;
pub use numeric::{encode_numeric_attribute, CmpOp, Compiled, NumericComparison};
pub use sat::{PolicyStatement, SatTuple};
pub use tree::{GateKind, TreeNode};
