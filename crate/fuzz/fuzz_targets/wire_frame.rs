#![no_main]

use libfuzzer_sys::fuzz_target;
use store_service::service::{Request, Response};
use store_service::wire;

// Frame splitting and payload decoding on raw bytes off the wire.
fuzz_target!(|data: &[u8]| {
    match wire::decode_frame(data) {
        Ok(Some((body, consumed))) => {
            assert!(consumed <= data.len());
            let _ = serde_json::from_slice::<Request>(body);
            let _ = serde_json::from_slice::<Response>(body);
        }
        Ok(None) | Err(_) => {}
    }
    let _ = wire::read_frame::<_, Request>(&mut &data[..]);
});
