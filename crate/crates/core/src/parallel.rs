use std::num::NonZeroUsize;
use std::thread;

/// Number of worker threads a kernel may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Workers(NonZeroUsize);

impl Workers {
    pub const ONE: Workers = Workers(NonZeroUsize::MIN);

    /// Zero is treated as one.
    pub fn new(count: usize) -> Self {
        Workers(NonZeroUsize::new(count).unwrap_or(NonZeroUsize::MIN))
    }

    pub fn available() -> Self {
        Workers(thread::available_parallelism().unwrap_or(NonZeroUsize::MIN))
    }

    pub fn get(self) -> usize {
        self.0.get()
    }
}

impl Default for Workers {
    fn default() -> Self {
        Self::available()
    }
}

/// Splits `items` into contiguous chunks, one per worker, and sums the
/// per-chunk results. The calling thread processes the first chunk.
pub(crate) fn sum_over_chunks<T, F>(items: &[T], workers: Workers, f: F) -> u64
where
    T: Sync,
    F: Fn(usize, &[T]) -> u64 + Sync,
{
    if items.is_empty() {
        return 0;
    }
    let n = workers.get().min(items.len());
    if n == 1 {
        return f(0, items);
    }
    let chunk = items.len().div_ceil(n);
    thread::scope(|s| {
        let mut chunks = items.chunks(chunk).enumerate();
        let (_, first) = chunks.next().expect("non-empty");
        let handles: Vec<_> = chunks.map(|(i, c)| {
            let f = &f;
            s.spawn(move || f(i * chunk, c))
        }).collect();
        let mut total = f(0, first);
        for h in handles {
            total += h.join().expect("worker panicked");
        }
        total
    })
}

/// Like [`sum_over_chunks`] over `0..len` with a mutable output slice split
/// into matching pieces of `stride` elements per item.
pub(crate) fn for_each_range_mut<O, F>(len: usize, out: &mut [O], stride: usize, workers: Workers, f: F)
where
    O: Send,
    F: Fn(std::ops::Range<usize>, &mut [O]) + Sync,
{
    debug_assert_eq!(out.len(), len * stride);
    if len == 0 {
        return;
    }
    let n = workers.get().min(len);
    let chunk = len.div_ceil(n);
    if n == 1 {
        f(0..len, out);
        return;
    }
    thread::scope(|s| {
        for (i, piece) in out.chunks_mut(chunk * stride).enumerate() {
            let f = &f;
            let start = i * chunk;
            let end = (start + chunk).min(len);
            s.spawn(move || f(start..end, piece));
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunking_covers_everything_once() {
        let items: Vec<u64> = (1..=1000).collect();
        for w in [1, 2, 3, 8, 64, 5000] {
            let total = sum_over_chunks(&items, Workers::new(w), |start, c| {
                assert_eq!(items[start], c[0]);
                c.iter().sum()
            });
            assert_eq!(total, 500_500);
            let mut out = vec![0u8; 1000 * 2];
            for_each_range_mut(1000, &mut out, 2, Workers::new(w), |r, o| {
                assert_eq!(o.len(), r.len() * 2);
                for (k, i) in r.enumerate() {
                    o[2 * k] = (i % 251) as u8;
                    o[2 * k + 1] = 1;
                }
            });
            assert!(out.chunks(2).enumerate().all(|(i, p)| p == [(i % 251) as u8, 1]));
        }
        assert_eq!(Workers::new(0).get(), 1);
    }
}
