//! Canonical element strings with domain-separation prefixes.
//!
//! Elements are exact case-sensitive UTF-8. Each carries the role it plays
//! (subject, action, role, ...) so that e.g. a role named "read" can never
//! collide with an action "read". Attribute elements use the conventions
//! "name=value" for strings and "name:pattern" for bag-of-bits patterns.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Subject,
    Action,
    Target,
    Role,
    ObjectType,
    Instance,
    /// Contextual attribute ("name=value" or "name:pattern").
    Attribute,
    /// Domain-hierarchy level, 1-based.
    Domain(u32),
}

impl ElementKind {
    fn prefix(&self) -> String {
        match self {
            ElementKind::Subject => "subject".into(),
            ElementKind::Action => "action".into(),
            ElementKind::Target => "target".into(),
            ElementKind::Role => "role".into(),
            ElementKind::ObjectType => "objtype".into(),
            ElementKind::Instance => "instance".into(),
            ElementKind::Attribute => "attr".into(),
            ElementKind::Domain(level) => format!("domain{level}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Element {
    pub kind: ElementKind,
    pub text: String,
}

impl Element {
    pub fn new(kind: ElementKind, text: impl Into<String>) -> Self {
        Element { kind, text: text.into() }
    }

    /// The exact byte string fed to the PRF.
    pub fn canonical(&self) -> Vec<u8> {
        format!("{}|{}", self.kind.prefix(), self.text).into_bytes()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.kind.prefix(), self.text)
    }
}
