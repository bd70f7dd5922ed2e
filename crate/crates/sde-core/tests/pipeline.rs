//! End-to-end pipeline properties in the 512-bit test group.

use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;
use sde_core::{
    client_enc, client_td, init, init_with_profile, keygen, make_rng, match_element, server_reenc,
    server_td, Element, ElementKind, GroupProfile, KeyStore,
};

fn setup() -> (
    sde_core::PublicParams,
    sde_core::MasterSecretKey,
    rand_chacha::ChaCha20Rng,
) {
    let mut rng = make_rng(Some(42));
    let (params, msk) = init_with_profile(GroupProfile::Test, &mut rng).unwrap();
    (params, msk, rng)
}

#[test]
fn test_and_prod_groups_validate() {
    let mut rng = make_rng(Some(1));
    for profile in [GroupProfile::Test, GroupProfile::Prod] {
        let (params, msk) = init_with_profile(profile, &mut rng).unwrap();
        assert!(params.validate());
        assert_eq!(params.h, params.g.modpow(&msk.x, &params.p));
    }
}

#[test]
fn init_is_deterministic_under_a_seed() {
    let a = init(64, &mut make_rng(Some(7))).unwrap();
    let b = init(64, &mut make_rng(Some(7))).unwrap();
    assert_eq!(a, b);
    let c = init(64, &mut make_rng(Some(8))).unwrap();
    assert_ne!(a.1.x, c.1.x);
}

#[test]
fn init_rejects_tiny_security_parameter() {
    assert!(init(4, &mut make_rng(Some(1))).is_err());
}

#[test]
fn key_split_identity_holds() {
    let (params, msk, mut rng) = setup();
    for user in ["alice", "bob", "pip"] {
        let (ck, sk) = keygen(&msk, &params, user, &mut rng).unwrap();
        assert_eq!((&ck.x1 + &sk.x2) % &params.q, msk.x);
        assert_eq!(ck.user_id, user);
    }
}

#[test]
fn keygen_rejects_empty_user() {
    let (params, msk, mut rng) = setup();
    assert!(keygen(&msk, &params, "", &mut rng).is_err());
}

#[test]
fn repeated_keygen_draws_fresh_shares() {
    let (params, msk, mut rng) = setup();
    let mut distinct = 0;
    let (first, _) = keygen(&msk, &params, "alice", &mut rng).unwrap();
    for _ in 0..1000 {
        let (ck, _) = keygen(&msk, &params, "alice", &mut rng).unwrap();
        if ck.x1 != first.x1 {
            distinct += 1;
        }
    }
    // Collisions happen with probability ~1/q; at 160-bit q we expect none.
    assert_eq!(distinct, 1000);
}

#[test]
fn cross_user_match_correctness() {
    let (params, msk, mut rng) = setup();
    let (admin_c, admin_s) = keygen(&msk, &params, "admin", &mut rng).unwrap();
    let (req_c, req_s) = keygen(&msk, &params, "requester", &mut rng).unwrap();

    let e = Element::new(ElementKind::Role, "Cardiologist");
    let cipher = server_reenc(&client_enc(&e, &admin_c, &params, &mut rng).unwrap(), &admin_s, &params);
    let trap = server_td(&client_td(&e, &req_c, &params, &mut rng).unwrap(), &req_s, &params);
    assert!(match_element(&cipher, &trap, &params));

    let other = Element::new(ElementKind::Role, "Doctor");
    let other_trap =
        server_td(&client_td(&other, &req_c, &params, &mut rng).unwrap(), &req_s, &params);
    assert!(!match_element(&cipher, &other_trap, &params));
}

#[test]
fn kind_separation_prevents_cross_category_matches() {
    let (params, msk, mut rng) = setup();
    let (ck, sk) = keygen(&msk, &params, "u", &mut rng).unwrap();
    let role = Element::new(ElementKind::Role, "read");
    let action = Element::new(ElementKind::Action, "read");
    let cipher = server_reenc(&client_enc(&role, &ck, &params, &mut rng).unwrap(), &sk, &params);
    let trap = server_td(&client_td(&action, &ck, &params, &mut rng).unwrap(), &sk, &params);
    assert!(!match_element(&cipher, &trap, &params));
}

#[test]
fn ciphertexts_are_randomized_but_server_trapdoors_are_stable() {
    let (params, msk, mut rng) = setup();
    let (ck, sk) = keygen(&msk, &params, "u", &mut rng).unwrap();
    let (ck2, sk2) = keygen(&msk, &params, "v", &mut rng).unwrap();
    let e = Element::new(ElementKind::Subject, "nurse");

    let c1 = client_enc(&e, &ck, &params, &mut rng).unwrap();
    let c2 = client_enc(&e, &ck, &params, &mut rng).unwrap();
    assert_ne!(c1.c1_hat, c2.c1_hat);

    let t1 = client_td(&e, &ck, &params, &mut rng).unwrap();
    let t2 = client_td(&e, &ck, &params, &mut rng).unwrap();
    assert_ne!(t1.t1, t2.t1);

    // Server-side trapdoors collapse to the same group element across calls
    // and across users.
    let s1 = server_td(&t1, &sk, &params);
    let s2 = server_td(&t2, &sk, &params);
    let s3 = server_td(&client_td(&e, &ck2, &params, &mut rng).unwrap(), &sk2, &params);
    assert_eq!(s1, s2);
    assert_eq!(s1, s3);
}

#[test]
fn server_reenc_is_deterministic_and_passes_digest_through() {
    let (params, msk, mut rng) = setup();
    let (ck, sk) = keygen(&msk, &params, "u", &mut rng).unwrap();
    let e = Element::new(ElementKind::Target, "health-record");
    let c = client_enc(&e, &ck, &params, &mut rng).unwrap();
    let s1 = server_reenc(&c, &sk, &params);
    let s2 = server_reenc(&c, &sk, &params);
    assert_eq!(s1, s2);
    assert_eq!(s1.c2, c.c3_hat);
}

#[test]
fn all_emitted_group_elements_live_in_the_subgroup() {
    let (params, msk, mut rng) = setup();
    let (ck, sk) = keygen(&msk, &params, "u", &mut rng).unwrap();
    let e = Element::new(ElementKind::Instance, "record-77");
    let c = client_enc(&e, &ck, &params, &mut rng).unwrap();
    let s = server_reenc(&c, &sk, &params);
    let td = client_td(&e, &ck, &params, &mut rng).unwrap();
    let st = server_td(&td, &sk, &params);
    for z in [&c.c1_hat, &c.c2_hat, &s.c1, &td.t1, &td.t2, &st.t] {
        assert_eq!(z.modpow(&params.q, &params.p), BigUint::one());
    }
}

#[test]
fn revocation_removes_exactly_one_entry() {
    let (params, msk, mut rng) = setup();
    let mut store = KeyStore::new();
    for user in ["a", "b"] {
        let (_, sk) = keygen(&msk, &params, user, &mut rng).unwrap();
        store.insert(sk);
    }
    assert!(store.revoke("a"));
    assert!(!store.revoke("a"));
    assert!(!store.revoke("never-issued"));
    assert!(store.get("b").is_ok());
    assert!(store.get("a").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Correctness across random elements and two random users, plus
    /// soundness against a random distinct element.
    #[test]
    fn pipeline_correctness_and_soundness(word in "[a-zA-Z0-9]{1,12}", other in "[a-zA-Z0-9]{1,12}") {
        prop_assume!(word != other);
        let (params, msk, mut rng) = setup();
        let (ac, as_) = keygen(&msk, &params, "i", &mut rng).unwrap();
        let (rc, rs) = keygen(&msk, &params, "j", &mut rng).unwrap();
        let e = Element::new(ElementKind::Subject, word.clone());
        let cipher = server_reenc(&client_enc(&e, &ac, &params, &mut rng).unwrap(), &as_, &params);
        let trap = server_td(&client_td(&e, &rc, &params, &mut rng).unwrap(), &rs, &params);
        prop_assert!(match_element(&cipher, &trap, &params));

        let o = Element::new(ElementKind::Subject, other);
        let wrong = server_td(&client_td(&o, &rc, &params, &mut rng).unwrap(), &rs, &params);
        prop_assert!(!match_element(&cipher, &wrong, &params));
    }

    /// Serialization round-trip is loss-free for every pipeline artifact.
    #[test]
    fn serialization_round_trip(word in "[a-z]{1,8}") {
        let (params, msk, mut rng) = setup();
        let (ck, sk) = keygen(&msk, &params, "u", &mut rng).unwrap();
        let e = Element::new(ElementKind::Action, word);
        let c = client_enc(&e, &ck, &params, &mut rng).unwrap();
        let s = server_reenc(&c, &sk, &params);
        let td = client_td(&e, &ck, &params, &mut rng).unwrap();

        let json = serde_json::to_string(&(&params, &c, &s, &td)).unwrap();
        let (p2, c2, s2, td2): (
            sde_core::PublicParams,
            sde_core::ClientEncryptedElement,
            sde_core::ServerEncryptedElement,
            sde_core::ClientTrapdoor,
        ) = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(p2, params);
        prop_assert_eq!(c2, c);
        prop_assert_eq!(s2, s);
        prop_assert_eq!(td2, td);
    }
}
