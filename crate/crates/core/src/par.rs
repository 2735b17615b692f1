//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over rayon's pool;
//! without it, or when a caller asks for one thread, everything runs in
//! order on the calling thread. Results are always returned in input order.

/// Map `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], threads: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if threads != Some(1) {
        use rayon::prelude::*;
        return in_pool(threads, || items.par_iter().map(&f).collect());
    }
    let _ = threads;
    items.iter().map(f).collect()
}

/// `true` iff `f` holds for every item.
pub fn all<T, F>(items: &[T], threads: Option<usize>, f: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if threads != Some(1) {
        use rayon::prelude::*;
        return in_pool(threads, || items.par_iter().all(&f));
    }
    let _ = threads;
    items.iter().all(f)
}

/// Whether parallel execution is compiled in.
pub const fn enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(feature = "parallel")]
fn in_pool<R: Send>(threads: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) if n > 1 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        },
        _ => op(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = map(&xs, Some(1), |x| x * x);
        let par = map(&xs, Some(4), |x| x * x);
        let default = map(&xs, None, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq, default);
        assert!(all(&xs, Some(3), |&x| x < 1000));
        assert!(!all(&xs, None, |&x| x < 999));
    }
}
