//! Exhaustive compiler correctness: for every op, every width s ≤ 6 and every
//! pair (v, w) of s-bit values, the compiled tree is satisfied by the encoded
//! attribute exactly when the arithmetic comparison holds.

use policy_model::{encode_numeric_attribute, CmpOp, Compiled, NumericComparison};
use std::collections::BTreeSet;

#[test]
fn compiled_tree_satisfaction_equals_arithmetic_truth() {
    let ops = [CmpOp::Lt, CmpOp::Gt, CmpOp::Le, CmpOp::Ge, CmpOp::Eq];
    let mut checked = 0u64;
    for s in 1..=6u32 {
        let max = 1u64 << s;
        for v in 0..max {
            for op in ops {
                let compiled = NumericComparison::new("n", op, v, s).compile().unwrap();
                for w in 0..max {
                    let elements: BTreeSet<String> =
                        encode_numeric_attribute("n", w, s).unwrap().into_iter().collect();
                    let got = match &compiled {
                        Compiled::Always(b) => *b,
                        Compiled::Tree(t) => {
                            let strict = t.evaluate(&mut |l: &String| elements.contains(l), false);
                            let lazy = t.evaluate(&mut |l: &String| elements.contains(l), true);
                            assert_eq!(strict, lazy, "short-circuit divergence at op={op:?} v={v} w={w} s={s}");
                            strict
                        }
                    };
                    assert_eq!(got, op.holds(w, v), "op={op:?} v={v} w={w} s={s}");
                    checked += 1;
                }
            }
        }
    }
    // 5 ops * sum over s of 4^s
    assert_eq!(checked, 5 * (4 + 16 + 64 + 256 + 1024 + 4096));
}

#[test]
fn gt_nine_satisfied_exactly_above_nine() {
    let Compiled::Tree(t) = NumericComparison::new("AT", CmpOp::Gt, 9, 5).compile().unwrap() else {
        panic!("expected a tree")
    };
    let sat: Vec<u64> = (0..32)
        .filter(|&w| {
            let els: BTreeSet<String> =
                encode_numeric_attribute("AT", w, 5).unwrap().into_iter().collect();
            t.evaluate(&mut |l: &String| els.contains(l), false)
        })
        .collect();
    assert_eq!(sat, (10..32).collect::<Vec<_>>());
}

#[test]
fn lt_seventeen_satisfied_exactly_below_seventeen() {
    let Compiled::Tree(t) = NumericComparison::new("AT", CmpOp::Lt, 17, 5).compile().unwrap() else {
        panic!("expected a tree")
    };
    let sat: Vec<u64> = (0..32)
        .filter(|&w| {
            let els: BTreeSet<String> =
                encode_numeric_attribute("AT", w, 5).unwrap().into_iter().collect();
            t.evaluate(&mut |l: &String| els.contains(l), false)
        })
        .collect();
    assert_eq!(sat, (0..17).collect::<Vec<_>>());
}
