#![no_main]

use libfuzzer_sys::fuzz_target;
use policy_model::ConstraintSpec;
use store_service::tkma::{ClientKeyFile, ServerKeyFile, TkmaState};
use store_service::StoreRoot;

// Every persisted document decoder must reject garbage without panicking,
// and anything that decodes must re-encode and decode to the same value.
fuzz_target!(|data: &[u8]| {
    if let Ok(v) = serde_json::from_slice::<StoreRoot>(data) {
        let bytes = serde_json::to_vec(&v).unwrap();
        assert_eq!(serde_json::from_slice::<StoreRoot>(&bytes).unwrap(), v);
    }
    if let Ok(v) = serde_json::from_slice::<TkmaState>(data) {
        let bytes = serde_json::to_vec(&v).unwrap();
        assert_eq!(serde_json::from_slice::<TkmaState>(&bytes).unwrap(), v);
    }
    let _ = serde_json::from_slice::<ClientKeyFile>(data);
    let _ = serde_json::from_slice::<ServerKeyFile>(data);
    let _ = serde_json::from_slice::<ConstraintSpec>(data);
});
