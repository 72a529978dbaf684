//! Splitting an index range across scoped worker threads.

/// Contiguous sub-ranges of `lo..=hi`, in order.
pub(crate) fn split(lo: u64, hi: u64, workers: usize) -> Vec<(u64, u64)> {
    if hi < lo {
        return Vec::new();
    }
    let parts = workers.max(1) as u64;
    let len = hi - lo + 1;
    let step = len.div_ceil(parts).max(1);
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start + step - 1);
        out.push((start, end));
        if end == u64::MAX {
            break;
        }
        start = end + 1;
    }
    out
}

/// Runs `f` on each sub-range and returns the results in range order, so
/// merged reports do not depend on the worker count.
pub(crate) fn map_ranges<T, F>(lo: u64, hi: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    let ranges = split(lo, hi, workers);
    if ranges.len() <= 1 {
        return ranges.into_iter().map(|(a, b)| f(a, b)).collect();
    }
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = ranges.iter().map(|&(a, b)| s.spawn(move || f(a, b))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_covers_range() {
        for workers in 1..6 {
            let r = split(1, 17, workers);
            assert_eq!(r.first().unwrap().0, 1);
            assert_eq!(r.last().unwrap().1, 17);
            assert!(r.windows(2).all(|w| w[0].1 + 1 == w[1].0));
        }
        assert!(split(5, 4, 3).is_empty());
    }
}
