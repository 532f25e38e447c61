//! Deterministic fork/join over grid points.
//!
//! Work is split into contiguous chunks, one per thread, and each result is
//! written into its input's slot, so the output order never depends on the
//! thread count or scheduling.  `CONEHEAT_THREADS` caps the worker count
//! (default: available parallelism).

use crate::config::Failure;

/// Worker count from `CONEHEAT_THREADS`, defaulting to the machine's
/// available parallelism.
pub fn thread_count() -> Result<usize, Failure> {
    match std::env::var("CONEHEAT_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(Failure::config("CONEHEAT_THREADS is not valid unicode"))
        }
        Ok(raw) => raw
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                Failure::Config(format!("CONEHEAT_THREADS must be a positive integer, got `{raw}`"))
            }),
    }
}

/// Apply `f` to every item, in parallel, preserving input order exactly.
pub fn par_map<T, U, F>(items: &[T], threads: usize, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let mut slots: Vec<Option<U>> = (0..items.len()).map(|_| None).collect();
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        for (inputs, outputs) in items.chunks(chunk).zip(slots.chunks_mut(chunk)) {
            let f = &f;
            scope.spawn(move || {
                for (input, slot) in inputs.iter().zip(outputs) {
                    *slot = Some(f(input));
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.expect("every slot is filled by its chunk's worker"))
        .collect()
}
