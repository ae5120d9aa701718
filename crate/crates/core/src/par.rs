//! Segment fan-out. With the `parallel` feature the segments run on the
//! current rayon pool; otherwise in order on the calling thread. Callers
//! only combine results with commutative, associative merges (bitmap union,
//! ordered concatenation), so the output never depends on scheduling.

use alloc::vec::Vec;

use crate::Result;

/// Folds `count` segments into one accumulator per worker, then merges.
pub(crate) fn fold_reduce<A, I, F, M>(count: u64, init: I, fold: F, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64) -> Result<()> + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count)
            .into_par_iter()
            .try_fold(&init, |mut acc, seg| {
                fold(&mut acc, seg)?;
                Ok(acc)
            })
            .try_reduce(&init, |a, b| Ok(merge(a, b)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = &merge;
        let mut acc = init();
        for seg in 0..count {
            fold(&mut acc, seg)?;
        }
        Ok(acc)
    }
}

/// Maps every segment to a vector and concatenates the pieces in segment order.
pub(crate) fn map_concat<T, F>(count: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<Vec<T>> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let parts: Vec<Vec<T>> = (0..count)
            .into_par_iter()
            .map(&f)
            .collect::<Result<Vec<_>>>()?;
        Ok(parts.into_iter().flatten().collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut out = Vec::new();
        for seg in 0..count {
            out.extend(f(seg)?);
        }
        Ok(out)
    }
}
