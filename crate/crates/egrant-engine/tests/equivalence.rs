//! Encrypted constraint decisions must equal the cleartext oracle on
//! randomized scenario scripts; the 300-script sweep runs in the acceptance
//! suite.

use egrant_engine::*;
use policy_model::oracle::CleartextWorld;
use policy_model::scenario::egrant_script;
use policy_model::AttributeSet;
use sde_core::{init_with_profile, keygen, make_rng, GroupProfile, KeyStore};

#[test]
fn randomized_scripts_agree_with_the_oracle() {
    let mut rng = make_rng(Some(99));
    let (params, msk) = init_with_profile(GroupProfile::Test, &mut rng).unwrap();
    let mut keystore = KeyStore::new();
    let (admin, sk) = keygen(&msk, &params, "admin", &mut rng).unwrap();
    keystore.insert(sk);
    let mut user_keys = std::collections::BTreeMap::new();
    for u in ["u0", "u1", "u2"] {
        let (ck, sk) = keygen(&msk, &params, u, &mut rng).unwrap();
        keystore.insert(sk);
        user_keys.insert(u.to_string(), ck);
    }

    let mut divergences = 0;
    for script_idx in 0..10 {
        let script = egrant_script(&mut rng, 3, 14);
        let config = EgrantConfig { deny_exact_repeat: script_idx % 2 == 0 };

        let mut oracle = CleartextWorld::new();
        oracle.deny_exact_repeat = config.deny_exact_repeat;
        oracle.constraints = script.constraints.clone();
        let mut store = ConstraintStore::new();
        for spec in &script.constraints {
            let cc = constraint_client(spec, &admin, &params, &mut rng).unwrap();
            constraint_deploy(&cc, "admin", &keystore, &params, &mut store).unwrap();
        }

        let mut history = AccessHistory::default();
        for (step_idx, (user, creq)) in script.steps.iter().enumerate() {
            let expected = oracle.egrant_decide(user, creq);
            // Context strings are already element strings; wrap them through
            // a raw AttributeSet equivalent by issuing them as string attrs.
            let req = {
                let mut elements_ctx = AttributeSet::new();
                for c in &creq.context {
                    let (name, value) = c.split_once('=').unwrap();
                    elements_ctx.add_string(name, value).unwrap();
                }
                request_generate(
                    &creq.role,
                    &creq.action,
                    &creq.object_type,
                    &creq.instance,
                    &creq.domains,
                    &elements_ctx,
                    &user_keys[user],
                    &params,
                    &mut rng,
                )
                .unwrap()
            };
            let got =
                constraint_eval_session_up(&req, &store, &mut history, &keystore, &params, config)
                    .unwrap();
            if got != expected {
                divergences += 1;
                eprintln!("divergence at script {script_idx} step {step_idx}: got {got} expected {expected}");
            }
        }
    }
    assert_eq!(divergences, 0);
}
