//! Memory-probe instrumentation.
//!
//! Every query path reports the memory reads it performs to a thread-local
//! counter. The unit is one read of a directory entry, of one packed field,
//! or of one 512-bit cache line of raw bits (a popcount scan confined to one
//! basic block counts once). Counts are meaningful only when one query runs
//! at a time on the measuring thread.

use std::cell::Cell;

thread_local! {
    static PROBES: Cell<u64> = const { Cell::new(0) };
}

#[inline(always)]
pub(crate) fn hit(n: u64) {
    PROBES.with(|p| p.set(p.get() + n));
}

/// Resets the counter of the current thread.
pub fn reset() {
    PROBES.with(|p| p.set(0));
}

/// Current value of the counter of the current thread.
pub fn count() -> u64 {
    PROBES.with(|p| p.get())
}

/// Runs `f` and returns its result with the number of probes it performed.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let before = count();
    let out = f();
    (out, count() - before)
}
