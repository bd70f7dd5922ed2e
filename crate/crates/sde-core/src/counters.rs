//! Thread-local operation counters, used by complexity-bound tests.

use serde::{Deserialize, Serialize};
use std::cell::Cell;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters {
    pub client_enc: u64,
    pub server_reenc: u64,
    pub client_td: u64,
    pub server_td: u64,
    pub matches: u64,
}

thread_local! {
    static COUNTERS: Cell<OpCounters> = Cell::new(OpCounters::default());
}

pub fn reset_counters() {
    COUNTERS.with(|c| c.set(OpCounters::default()));
}

pub fn snapshot_counters() -> OpCounters {
    COUNTERS.with(|c| c.get())
}

pub(crate) fn bump(f: impl Fn(&mut OpCounters)) {
    COUNTERS.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}
