use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::PolicyError;
use crate::numeric::encode_numeric_attribute;

/// Contextual attributes attached to a request: string-valued and numeric
/// (bag-of-bits) attributes, at most one value per name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSet {
    strings: BTreeMap<String, String>,
    numerics: BTreeMap<String, (u64, u32)>,
}

impl AttributeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_string(&mut self, name: &str, value: &str) -> Result<(), PolicyError> {
        if name.is_empty() {
            return Err(PolicyError::EmptyAttributeName);
        }
        if self.strings.contains_key(name) || self.numerics.contains_key(name) {
            return Err(PolicyError::DuplicateAttribute(name.to_string()));
        }
        self.strings.insert(name.to_string(), value.to_string());
        Ok(())
    }

    pub fn add_numeric(&mut self, name: &str, value: u64, bits: u32) -> Result<(), PolicyError> {
        // encode eagerly so range errors surface at insertion time
        let _ = encode_numeric_attribute(name, value, bits)?;
        if self.strings.contains_key(name) || self.numerics.contains_key(name) {
            return Err(PolicyError::DuplicateAttribute(name.to_string()));
        }
        self.numerics.insert(name.to_string(), (value, bits));
        Ok(())
    }

    pub fn strings(&self) -> impl Iterator<Item = (&str, &str)> {
        self.strings.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn numerics(&self) -> impl Iterator<Item = (&str, u64, u32)> + '_ {
        self.numerics.iter().map(|(k, &(v, s))| (k.as_str(), v, s))
    }

    /// All attribute element strings: "name=value" plus every bit pattern of
    /// every numeric attribute.
    pub fn elements(&self) -> Vec<String> {
        let mut out: Vec<String> =
            self.strings.iter().map(|(k, v)| format!("{k}={v}")).collect();
        for (name, &(value, bits)) in &self.numerics {
            out.extend(encode_numeric_attribute(name, value, bits).expect("validated on insert"));
        }
        out
    }

    /// Leaf decider for compiled condition trees: exact membership of the
    /// leaf's element string.
    pub fn matches_leaf(&self, leaf: &str) -> bool {
        self.element_set().contains(leaf)
    }

    pub fn element_set(&self) -> BTreeSet<String> {
        self.elements().into_iter().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty() && self.numerics.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_are_rejected_across_kinds() {
        let mut a = AttributeSet::new();
        a.add_string("Location", "ward").unwrap();
        assert_eq!(
            a.add_string("Location", "office"),
            Err(PolicyError::DuplicateAttribute("Location".into()))
        );
        assert_eq!(
            a.add_numeric("Location", 3, 4),
            Err(PolicyError::DuplicateAttribute("Location".into()))
        );
        a.add_numeric("AT", 10, 5).unwrap();
        assert_eq!(a.add_numeric("AT", 11, 5), Err(PolicyError::DuplicateAttribute("AT".into())));
    }

    #[test]
    fn elements_cover_strings_and_bit_patterns() {
        let mut a = AttributeSet::new();
        a.add_string("Location", "Cardiology-ward").unwrap();
        a.add_numeric("AT", 10, 5).unwrap();
        let els = a.element_set();
        assert_eq!(els.len(), 6);
        assert!(els.contains("Location=Cardiology-ward"));
        assert!(els.contains("AT:0****"));
        assert!(els.contains("AT:****0"));
        assert!(a.matches_leaf("AT:*1***"));
        assert!(!a.matches_leaf("AT:*0***"));
    }
}
