//! Text form of policies:
//!
//! ```text
//! if and(Location=Cardiology-ward, AT>9#5, AT<17#5) then can <Cardiologist, read, health-record>
//! can <Nurse, read, roster>
//! ```
//!
//! Conditions nest `and(...)`, `or(...)` and `kofn(k, ...)` around string
//! predicates `name=value` and numeric predicates `name op value#bits`.

use crate::condition::ConditionExpr;
use crate::error::PolicyError;
use crate::numeric::{CmpOp, NumericComparison};
use crate::sat::{PolicyStatement, SatTuple};

pub fn parse_policy(input: &str) -> Result<PolicyStatement, PolicyError> {
    let mut p = Parser::new(input);
    let stmt = p.policy()?;
    p.skip_ws();
    p.expect_eof()?;
    Ok(stmt)
}

pub fn parse_condition(input: &str) -> Result<ConditionExpr, PolicyError> {
    let mut p = Parser::new(input);
    let cond = p.condition()?;
    p.skip_ws();
    p.expect_eof()?;
    Ok(cond)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'-')
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src: src.as_bytes(), pos: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> PolicyError {
        PolicyError::parse(self.pos, msg)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> Result<(), PolicyError> {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", b as char)))
        }
    }

    fn expect_eof(&self) -> Result<(), PolicyError> {
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.err("trailing input"))
        }
    }

    /// A word: letters, digits and `_ . -`.
    fn word(&mut self) -> Result<String, PolicyError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b) if is_word_byte(b)) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a name"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii run").to_string())
    }

    fn integer(&mut self) -> Result<u64, PolicyError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("digits")
            .parse()
            .map_err(|_| PolicyError::parse(start, "integer overflow"))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), PolicyError> {
        self.skip_ws();
        let end = self.pos + kw.len();
        if self.src.get(self.pos..end) == Some(kw.as_bytes())
            && !matches!(self.src.get(end), Some(&b) if is_word_byte(b))
        {
            self.pos = end;
            Ok(())
        } else {
            Err(self.err(format!("expected '{kw}'")))
        }
    }

    fn try_keyword(&mut self, kw: &str) -> bool {
        let save = self.pos;
        if self.keyword(kw).is_ok() {
            true
        } else {
            self.pos = save;
            false
        }
    }

    fn policy(&mut self) -> Result<PolicyStatement, PolicyError> {
        let condition = if self.try_keyword("if") {
            let cond = self.condition()?;
            self.keyword("then")?;
            Some(cond)
        } else {
            None
        };
        self.keyword("can")?;
        self.eat(b'<')?;
        let subject = self.word()?;
        self.eat(b',')?;
        let action = self.word()?;
        self.eat(b',')?;
        let target = self.word()?;
        self.eat(b'>')?;
        let tuple = SatTuple { subject, action, target };
        tuple.validate()?;
        Ok(PolicyStatement { condition, tuple })
    }

    fn condition(&mut self) -> Result<ConditionExpr, PolicyError> {
        let save = self.pos;
        let head = self.word()?;
        self.skip_ws();
        if self.peek() == Some(b'(') && matches!(head.as_str(), "and" | "or" | "kofn") {
            self.pos += 1;
            if head == "kofn" {
                let k = self.integer()?;
                self.eat(b',')?;
                let children = self.condition_list()?;
                if k == 0 || k as usize > children.len() {
                    return Err(PolicyError::BadThreshold { k: k as usize, n: children.len() });
                }
                return Ok(ConditionExpr::Kofn(k as usize, children));
            }
            let children = self.condition_list()?;
            return Ok(if head == "and" {
                ConditionExpr::And(children)
            } else {
                ConditionExpr::Or(children)
            });
        }
        self.pos = save;
        self.predicate()
    }

    fn condition_list(&mut self) -> Result<Vec<ConditionExpr>, PolicyError> {
        let mut out = vec![self.condition()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    out.push(self.condition()?);
                }
                Some(b')') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.err("expected ',' or ')'")),
            }
        }
    }

    fn predicate(&mut self) -> Result<ConditionExpr, PolicyError> {
        let name = self.word()?;
        self.skip_ws();
        let op = match (self.peek(), self.src.get(self.pos + 1)) {
            (Some(b'<'), Some(b'=')) => {
                self.pos += 2;
                Some(CmpOp::Le)
            }
            (Some(b'>'), Some(b'=')) => {
                self.pos += 2;
                Some(CmpOp::Ge)
            }
            (Some(b'<'), _) => {
                self.pos += 1;
                Some(CmpOp::Lt)
            }
            (Some(b'>'), _) => {
                self.pos += 1;
                Some(CmpOp::Gt)
            }
            (Some(b'='), _) => {
                self.pos += 1;
                None
            }
            _ => return Err(self.err("expected a comparison operator")),
        };
        match op {
            None => {
                // name=value is a string predicate unless a #bits suffix makes
                // it a numeric equality
                let value = self.word()?;
                if self.peek() == Some(b'#') {
                    self.pos += 1;
                    let bits = self.bits()?;
                    let v = value
                        .parse()
                        .map_err(|_| self.err("numeric predicate needs an integer value"))?;
                    let cmp = NumericComparison::new(name, CmpOp::Eq, v, bits);
                    cmp.validate()?;
                    Ok(ConditionExpr::Num(cmp))
                } else {
                    Ok(ConditionExpr::StrEq { name, value })
                }
            }
            Some(op) => {
                let value = self.integer()?;
                self.eat(b'#').map_err(|_| self.err("ordered comparison needs a #bits width"))?;
                let bits = self.bits()?;
                let cmp = NumericComparison::new(name, op, value, bits);
                cmp.validate()?;
                Ok(ConditionExpr::Num(cmp))
            }
        }
    }

    fn bits(&mut self) -> Result<u32, PolicyError> {
        let at = self.pos;
        let bits = self.integer()?;
        u32::try_from(bits)
            .ok()
            .filter(|&b| (1..=64).contains(&b))
            .ok_or(PolicyError::parse(at, "bit width out of range".to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_ward_policy() {
        let p = parse_policy(
            "if and(Location=Cardiology-ward, AT>9#5, AT<17#5) then can <Cardiologist, read, health-record>",
        )
        .unwrap();
        assert_eq!(p.tuple, SatTuple::new("Cardiologist", "read", "health-record"));
        assert_eq!(
            p.condition,
            Some(ConditionExpr::And(vec![
                ConditionExpr::StrEq { name: "Location".into(), value: "Cardiology-ward".into() },
                ConditionExpr::Num(NumericComparison::new("AT", CmpOp::Gt, 9, 5)),
                ConditionExpr::Num(NumericComparison::new("AT", CmpOp::Lt, 17, 5)),
            ]))
        );
    }

    #[test]
    fn parses_unconditional_and_nested_forms() {
        let p = parse_policy("can <Nurse, read, duty-roster>").unwrap();
        assert_eq!(p.condition, None);
        assert_eq!(p.tuple.target, "duty-roster");

        let c = parse_condition("or(kofn(2, a=1, b=2, c=3), and(x>=4#3, y<=2#3))").unwrap();
        match c {
            ConditionExpr::Or(children) => {
                assert!(matches!(&children[0], ConditionExpr::Kofn(2, cs) if cs.len() == 3));
                assert!(matches!(&children[1], ConditionExpr::And(cs) if cs.len() == 2));
            }
            other => panic!("unexpected parse: {other:?}"),
        }
    }

    #[test]
    fn numeric_equality_uses_the_hash_suffix() {
        assert_eq!(
            parse_condition("AT=10#5").unwrap(),
            ConditionExpr::Num(NumericComparison::new("AT", CmpOp::Eq, 10, 5))
        );
        assert_eq!(
            parse_condition("AT=10").unwrap(),
            ConditionExpr::StrEq { name: "AT".into(), value: "10".into() }
        );
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_policy("if then can <a, b, c>").is_err());
        assert!(parse_policy("can <a, b>").is_err());
        assert!(parse_policy("can <a, b, c> trailing").is_err());
        assert!(parse_condition("AT>9").is_err());
        assert!(parse_condition("AT>32#5").is_err());
        assert!(parse_condition("and()").is_err());
        assert!(parse_condition("kofn(5, a=1)").is_err());
        assert!(parse_condition("kofn(0, a=1)").is_err());
        assert!(parse_condition("x>9#0").is_err());
        assert!(parse_condition("").is_err());
    }

    #[test]
    fn a_predicate_named_and_is_not_a_gate() {
        assert_eq!(
            parse_condition("and=yes").unwrap(),
            ConditionExpr::StrEq { name: "and".into(), value: "yes".into() }
        );
    }
}
