//! Encrypted decisions must equal the cleartext oracle on randomized worlds.
//! A wider 500-world sweep runs in the workspace acceptance suite; this is
//! the per-crate smoke version.

use espoon_engine::*;
use policy_model::oracle::CleartextWorld;
use policy_model::scenario::espoon_script;
use sde_core::{init_with_profile, keygen, make_rng, GroupProfile, KeyStore};

#[test]
fn randomized_worlds_agree_with_the_oracle() {
    let mut rng = make_rng(Some(2024));
    let (params, msk) = init_with_profile(GroupProfile::Test, &mut rng).unwrap();
    let mut keystore = KeyStore::new();
    let (admin, admin_sk) = keygen(&msk, &params, "admin", &mut rng).unwrap();
    let (requester, req_sk) = keygen(&msk, &params, "requester", &mut rng).unwrap();
    let (pip, pip_sk) = keygen(&msk, &params, "pip", &mut rng).unwrap();
    keystore.insert(admin_sk);
    keystore.insert(req_sk);
    keystore.insert(pip_sk);

    let mut divergences = 0;
    for world_idx in 0..25 {
        let script = espoon_script(&mut rng, 6, 8);
        let mut oracle = CleartextWorld::new();
        let mut store = PolicyStore::new();
        for p in &script.policies {
            oracle.policies.push(p.clone());
            match policy_client_deploy(p, &admin, &params, &mut rng) {
                Ok(cp) => {
                    policy_server_deploy(&cp, "admin", &keystore, &params, &mut store).unwrap();
                }
                // The oracle denies through such a policy anyway.
                Err(EspoonError::UnsatisfiableCondition) => {}
                Err(e) => panic!("deploy failed: {e}"),
            }
        }
        for (tuple, attrs) in &script.requests {
            let expected = oracle
                .espoon_decide(&tuple.subject, &tuple.action, &tuple.target, attrs)
                .unwrap();
            let req = sat_request(tuple, &requester, &params, &mut rng).unwrap();
            let al = attributes_request(attrs, &pip, &params, &mut rng).unwrap();
            let got = evaluate_request(&req, &al, &store, &keystore, &params).unwrap();
            if got != expected {
                divergences += 1;
                eprintln!("divergence in world {world_idx}: {tuple:?} {attrs:?} expected {expected}");
            }
        }
    }
    assert_eq!(divergences, 0);
}
