//! Encrypted RBAC scenarios in the 512-bit test group.

use erbac_engine::*;
use espoon_engine::attributes_request;
use policy_model::{parse_condition, AttributeSet};
use sde_core::{
    init_with_profile, keygen, make_rng, reset_counters, snapshot_counters, ClientKeySet,
    GroupProfile, KeyStore, PublicParams,
};

struct World {
    params: PublicParams,
    keystore: KeyStore,
    admin: ClientKeySet,
    requester: ClientKeySet,
    pip: ClientKeySet,
    rng: rand_chacha::ChaCha20Rng,
    state: RbacState,
}

fn world(seed: u64) -> World {
    let mut rng = make_rng(Some(seed));
    let (params, msk) = init_with_profile(GroupProfile::Test, &mut rng).unwrap();
    let mut keystore = KeyStore::new();
    let mut user = |id: &str, rng: &mut rand_chacha::ChaCha20Rng| {
        let (ck, sk) = keygen(&msk, &params, id, rng).unwrap();
        keystore.insert(sk);
        ck
    };
    let admin = user("admin", &mut rng);
    let requester = user("alice", &mut rng);
    let pip = user("pip", &mut rng);
    World { params, keystore, admin, requester, pip, rng, state: RbacState::default() }
}

fn assign_roles(w: &mut World, user: &str, roles: &[&str], activation: Option<&str>) {
    let roles: Vec<String> = roles.iter().map(|r| r.to_string()).collect();
    let cond = activation.map(|c| parse_condition(c).unwrap());
    let ca = role_assignment_client(&roles, cond.as_ref(), &w.admin, &w.params, &mut w.rng).unwrap();
    role_assignment_deploy(&ca, user, "admin", &w.keystore, &w.params, &mut w.state).unwrap();
}

fn assign_perms(w: &mut World, role: &str, perms: &[(&str, &str)], grant: Option<&str>) {
    let perms: Vec<(String, String)> =
        perms.iter().map(|(a, t)| (a.to_string(), t.to_string())).collect();
    let cond = grant.map(|c| parse_condition(c).unwrap());
    let cp =
        permission_assignment_client(role, &perms, cond.as_ref(), &w.admin, &w.params, &mut w.rng)
            .unwrap();
    permission_assignment_deploy(&cp, "admin", &w.keystore, &w.params, &mut w.state).unwrap();
}

fn deploy_hierarchy(w: &mut World, roles: &[&str], edges: &[(usize, usize)]) {
    let g = CleartextHierarchy {
        roles: roles.iter().map(|r| r.to_string()).collect(),
        edges: edges.to_vec(),
    };
    let ch = hierarchy_client(&g, &w.admin, &w.params, &mut w.rng).unwrap();
    hierarchy_deploy(&ch, "admin", &w.keystore, &w.params, &mut w.state).unwrap();
}

fn activate(w: &mut World, role: &str, attrs: &AttributeSet) -> bool {
    let req = role_request(role, &w.requester, &w.params, &mut w.rng).unwrap();
    let al = attributes_request(attrs, &w.pip, &w.params, &mut w.rng).unwrap();
    activate_role(&req, &al, &mut w.state, &w.keystore, &w.params).unwrap()
}

fn access(w: &mut World, role: &str, action: &str, target: &str, attrs: &AttributeSet) -> bool {
    let req =
        access_request_make(role, action, target, &w.requester, &w.params, &mut w.rng).unwrap();
    let al = attributes_request(attrs, &w.pip, &w.params, &mut w.rng).unwrap();
    access_request(&req, &al, &w.state, &w.keystore, &w.params).unwrap()
}

fn ward_attrs(at: u64) -> AttributeSet {
    let mut a = AttributeSet::new();
    a.add_string("Location", "Cardiology-ward").unwrap();
    a.add_numeric("AT", at, 5).unwrap();
    a
}

/// The hospital diamond: Cardiologist extends Cardiologist-Assistant and
/// Doctor, both of which extend Intern.
fn hospital(w: &mut World) {
    assign_roles(w, "alice", &["Cardiologist", "Doctor"], None);
    assign_perms(w, "Intern", &[("read", "vitals-chart")], None);
    assign_perms(w, "Nurse", &[("read", "duty-roster")], None);
    deploy_hierarchy(
        w,
        &["Cardiologist", "Cardiologist-Assistant", "Doctor", "Intern"],
        &[(0, 1), (0, 2), (1, 3), (2, 3)],
    );
}

#[test]
fn activation_and_session_gate() {
    let mut w = world(1);
    hospital(&mut w);
    let none = AttributeSet::new();
    assert!(!access(&mut w, "Cardiologist", "read", "vitals-chart", &none));
    assert!(activate(&mut w, "Cardiologist", &none));
    assert_eq!(w.state.session["alice"].len(), 1);
    assert!(!activate(&mut w, "Nurse", &none));
    assert_eq!(w.state.session["alice"].len(), 1);
    assert!(access(&mut w, "Cardiologist", "read", "vitals-chart", &none));
    // Sibling-role permission stays unreachable through the walk.
    assert!(!access(&mut w, "Cardiologist", "read", "duty-roster", &none));
    // Active role without the permission anywhere on its chain.
    assert!(activate(&mut w, "Doctor", &none));
    assert!(!access(&mut w, "Doctor", "read", "duty-roster", &none));
}

#[test]
fn deactivation_closes_the_gate() {
    let mut w = world(2);
    hospital(&mut w);
    let none = AttributeSet::new();
    assert!(activate(&mut w, "Cardiologist", &none));
    let req = role_request("Cardiologist", &w.requester, &w.params, &mut w.rng).unwrap();
    assert!(deactivate_role(&req, &mut w.state, &w.keystore, &w.params).unwrap());
    assert!(!deactivate_role(&req, &mut w.state, &w.keystore, &w.params).unwrap());
    assert!(!access(&mut w, "Cardiologist", "read", "vitals-chart", &none));
}

#[test]
fn activation_condition_gates_on_context() {
    let mut w = world(3);
    assign_roles(
        &mut w,
        "alice",
        &["Cardiologist"],
        Some("and(Location=Cardiology-ward, AT>9#5, AT<17#5)"),
    );
    assert!(!activate(&mut w, "Cardiologist", &ward_attrs(8)));
    assert!(w.state.session.get("alice").is_none());
    assert!(activate(&mut w, "Cardiologist", &ward_attrs(10)));
}

#[test]
fn grant_condition_checked_at_access_not_activation() {
    let mut w = world(4);
    assign_roles(&mut w, "alice", &["Doctor"], None);
    assign_perms(&mut w, "Doctor", &[("read", "chart")], Some("AT>9#5"));
    let mut at8 = AttributeSet::new();
    at8.add_numeric("AT", 8, 5).unwrap();
    assert!(activate(&mut w, "Doctor", &at8));
    assert!(!access(&mut w, "Doctor", "read", "chart", &at8));
    assert!(access(&mut w, "Doctor", "read", "chart", &ward_attrs(10)));
}

#[test]
fn cyclic_hierarchy_is_rejected() {
    let mut w = world(5);
    let g = CleartextHierarchy {
        roles: vec!["a".into(), "b".into(), "c".into()],
        edges: vec![(0, 1), (1, 2), (2, 0)],
    };
    assert!(matches!(
        hierarchy_client(&g, &w.admin, &w.params, &mut w.rng),
        Err(ErbacError::InvalidHierarchy)
    ));
    let bad = CleartextHierarchy { roles: vec!["a".into()], edges: vec![(0, 7)] };
    assert!(matches!(
        hierarchy_client(&bad, &w.admin, &w.params, &mut w.rng),
        Err(ErbacError::BadEdge(7))
    ));
    // Single node, no edges: fine.
    let single = CleartextHierarchy { roles: vec!["a".into()], edges: vec![] };
    assert!(hierarchy_client(&single, &w.admin, &w.params, &mut w.rng).is_ok());
}

#[test]
fn unknown_identities_error() {
    let mut w = world(6);
    let ca = role_assignment_client(&["r".into()], None, &w.admin, &w.params, &mut w.rng).unwrap();
    assert!(role_assignment_deploy(&ca, "alice", "ghost", &w.keystore, &w.params, &mut w.state)
        .is_err());
    let mut req = role_request("r", &w.requester, &w.params, &mut w.rng).unwrap();
    req.requester_id = "ghost".into();
    let al = attributes_request(&AttributeSet::new(), &w.pip, &w.params, &mut w.rng).unwrap();
    assert!(activate_role(&req, &al, &mut w.state, &w.keystore, &w.params).is_err());
}

#[test]
fn deployment_cost_is_linear_in_list_sizes() {
    let mut w = world(7);

    let roles: Vec<String> = (0..5).map(|i| format!("r{i}")).collect();
    reset_counters();
    let ca = role_assignment_client(&roles, None, &w.admin, &w.params, &mut w.rng).unwrap();
    assert_eq!(ca.roles.len(), 5);
    assert_eq!(snapshot_counters().client_enc, 5);
    reset_counters();
    role_assignment_deploy(&ca, "alice", "admin", &w.keystore, &w.params, &mut w.state).unwrap();
    assert_eq!(snapshot_counters().server_reenc, 5);

    let perms: Vec<(String, String)> =
        (0..10).map(|i| (format!("a{i}"), format!("t{i}"))).collect();
    reset_counters();
    let cp = permission_assignment_client("r0", &perms, None, &w.admin, &w.params, &mut w.rng)
        .unwrap();
    // 1 role + 2 per permission.
    assert_eq!(snapshot_counters().client_enc, 21);
    reset_counters();
    permission_assignment_deploy(&cp, "admin", &w.keystore, &w.params, &mut w.state).unwrap();
    assert_eq!(snapshot_counters().server_reenc, 21);

    // Chain hierarchy of 25 nodes: one enc + one trapdoor per node.
    let chain: Vec<String> = (0..25).map(|i| format!("c{i}")).collect();
    let edges: Vec<(usize, usize)> = (0..24).map(|i| (i, i + 1)).collect();
    let g = CleartextHierarchy { roles: chain, edges };
    reset_counters();
    let ch = hierarchy_client(&g, &w.admin, &w.params, &mut w.rng).unwrap();
    let c = snapshot_counters();
    assert_eq!((c.client_enc, c.client_td), (25, 25));
    reset_counters();
    hierarchy_deploy(&ch, "admin", &w.keystore, &w.params, &mut w.state).unwrap();
    let c = snapshot_counters();
    assert_eq!((c.server_reenc, c.server_td), (25, 25));
}

#[test]
fn search_cost_bounds() {
    let mut w = world(8);
    hospital(&mut w);
    let none = AttributeSet::new();

    // Role activation: at most |L_r| matches after one server trapdoor.
    reset_counters();
    assert!(activate(&mut w, "Cardiologist", &none));
    let c = snapshot_counters();
    assert_eq!(c.server_td, 1);
    assert!(c.matches <= 2, "matches = {}", c.matches);

    // Access: session scan + permission lists + hierarchy nodes.
    reset_counters();
    assert!(access(&mut w, "Cardiologist", "read", "vitals-chart", &none));
    let c = snapshot_counters();
    // 3 request trapdoors, nothing recomputed per store entry.
    assert_eq!(c.server_td, 3);
    let n_perm_elements: u64 =
        w.state.permissions.iter().map(|p| 1 + 2 * p.permissions.len() as u64).sum();
    let bound = w.state.session["alice"].len() as u64
        + n_perm_elements * 2
        + w.state.hierarchy.as_ref().unwrap().nodes.len() as u64;
    assert!(c.matches <= bound, "matches = {} bound = {bound}", c.matches);
}

#[test]
fn serialized_state_leaks_no_vocabulary() {
    let mut w = world(9);
    hospital(&mut w);
    let json = serde_json::to_string(&w.state).unwrap();
    // Requester identities are cleartext by design; role/permission
    // vocabulary must not be.
    for word in ["Cardiologist", "Doctor", "Intern", "Nurse", "read", "vitals-chart"] {
        assert!(!json.contains(word), "state leaks {word:?}");
    }
    let back: RbacState = serde_json::from_str(&json).unwrap();
    assert_eq!(back, w.state);
}
