//! Flop accounting.
//!
//! Every kernel reports the multiply-add pairs it performs through [`add`].
//! Each increment lands in two places: a process-wide atomic tally
//! ([`global`]) and a per-thread tally that [`measure`] reads to attribute
//! cost to a single run. Runs executing on different threads therefore get
//! exact, independent totals while the global count stays exact as well.

use std::cell::Cell;
use std::sync::atomic::{AtomicU64, Ordering};

/// Non-negative tally of multiply-add pairs.
#[derive(Debug, Default)]
pub struct FlopCounter {
    count: AtomicU64,
}

impl FlopCounter {
    pub const fn new() -> Self {
        Self {
            count: AtomicU64::new(0),
        }
    }

    pub fn add(&self, n: u64) {
        self.count.fetch_add(n, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    /// Resets the tally. Only call this between runs.
    pub fn reset(&self) {
        self.count.store(0, Ordering::Relaxed);
    }
}

static GLOBAL: FlopCounter = FlopCounter::new();

thread_local! {
    static LOCAL: Cell<u64> = const { Cell::new(0) };
}

/// The process-wide counter.
pub fn global() -> &'static FlopCounter {
    &GLOBAL
}

/// Records `n` multiply-add pairs.
#[inline]
pub fn add(n: u64) {
    LOCAL.with(|c| c.set(c.get() + n));
    GLOBAL.add(n);
}

/// Flops recorded on the current thread since it started.
pub fn thread_total() -> u64 {
    LOCAL.with(|c| c.get())
}

/// Runs `f` and returns its result together with the flops it performed on
/// this thread.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = thread_total();
    let out = f();
    (out, thread_total() - start)
}
