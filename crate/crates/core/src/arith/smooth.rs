use super::functions::isqrt;
use super::range::{primes_up_to, sieve_segment, Fields, SegmentBuf, DEFAULT_SEGMENT_LEN};
use crate::{par, Error, Result};

/// Largest `x` accepted by [`smooth_count`] and [`rough_count`].
pub const COUNT_MAX: u64 = 10_000_000_000;

const NO_FIELDS: Fields = Fields {
    phi: false,
    sigma: false,
    spf: false,
};

fn check_cap(x: u64) -> Result<()> {
    if x > COUNT_MAX {
        return Err(Error::Capacity {
            what: "smooth/rough count",
            required: x as u128,
            limit: COUNT_MAX as u128,
        });
    }
    Ok(())
}

/// Counts `n` in `1..=x` whose part over primes `<= bound` satisfies `keep`.
/// `keep(n, part)` sees `n` and the product of its prime powers over primes
/// `<= min(bound, √x)`.
fn count_by_small_part<K>(x: u64, bound: u64, keep: K) -> Result<u64>
where
    K: Fn(u64, u64) -> bool + Sync + Send,
{
    let root = isqrt(x);
    let primes = primes_up_to(root.min(bound));
    let seg = DEFAULT_SEGMENT_LEN as u64;
    let count = x.div_ceil(seg);
    let (total, _) = par::fold_reduce(
        count,
        || (0u64, SegmentBuf::default()),
        |(acc, buf), s| {
            let lo = 1 + s * seg;
            let len = (x + 1 - lo).min(seg) as usize;
            sieve_segment(lo, 1, len, &primes, NO_FIELDS, buf)?;
            *acc += buf
                .sieved_part()
                .iter()
                .enumerate()
                .filter(|&(i, &part)| keep(lo + i as u64, part))
                .count() as u64;
            Ok(())
        },
        |(a, buf), (b, _)| (a + b, buf),
    )?;
    Ok(total)
}

/// `Ψ(x, y)`: the number of `n <= x` with largest prime factor `<= y`
/// (`n = 1` always counts). Exact, by sieving; `x <= COUNT_MAX`.
pub fn smooth_count(x: u64, y: u64) -> Result<u64> {
    check_cap(x)?;
    if x == 0 || y == 0 {
        return Ok(0);
    }
    if y >= x {
        return Ok(x);
    }
    // After removing primes <= min(y, √x) the cofactor is 1 or has only prime
    // factors above that bound; it is y-smooth exactly when it is <= y.
    count_by_small_part(x, y, move |n, part| n / part <= y)
}

/// `#C(x; y)`: the number of `n <= x` with no prime factor `<= y`
/// (`n = 1` counts). Exact; `x <= COUNT_MAX`.
pub fn rough_count(x: u64, y: u64) -> Result<u64> {
    check_cap(x)?;
    if x == 0 {
        return Ok(0);
    }
    // With no prime <= min(y, √x) dividing it, n > 1 is y-rough iff n > y.
    count_by_small_part(x, y, move |n, part| part == 1 && (n == 1 || n > y))
}
