use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::arith::{
    build_spf_table, euler_phi, factorize, is_prime, primes_up_to, sieve_segment, smooth_count,
    Fields, SegmentBuf, SpfTable, COUNT_MAX,
};
use crate::image::{certify, Certificate, MapKind, ScanConfig};
use crate::{par, Error, Result};

pub use crate::arith::rough_count;

/// Largest `X` accepted by the per-integer lemma diagnostics.
pub const DIAGNOSTIC_MAX: u64 = 10_000_000;

/// A nonnegative rational in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Fraction {
    pub num: u128,
    pub den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };

    pub fn new(num: u128, den: u128) -> Fraction {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Fraction {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self > 1`.
    pub fn exceeds_one(self) -> bool {
        self.num > self.den
    }
}

/// `log_1 t = max{ln t, 1}`, `log_k t = log_1(log_{k−1} t)`.
pub fn iterated_log(k: u32, t: f64) -> f64 {
    let mut v = t;
    for _ in 0..k.max(1) {
        v = libm::log(v).max(1.0);
    }
    v
}

fn check_n(n: u64, what: &'static str) -> Result<()> {
    if n < 3 {
        return Err(Error::Domain { what, value: n });
    }
    Ok(())
}

fn check_y(y: f64) -> Result<()> {
    if !y.is_finite() || y < 2.0 {
        return Err(Error::Domain {
            what: "y must be a finite real >= 2",
            value: y as u64,
        });
    }
    Ok(())
}

/// The primes `p > y` dividing `v`.
fn large_prime_divisors(v: u64, y: f64, table: Option<&SpfTable>) -> Result<Vec<u64>> {
    let f = factorize(v, table)?;
    Ok(f.factors()
        .iter()
        .map(|&(p, _)| p)
        .filter(|&p| p as f64 > y)
        .collect())
}

fn reciprocal_sum(primes: &[u64]) -> Fraction {
    let den: u128 = primes.iter().map(|&p| p as u128).product();
    let num: u128 = primes.iter().map(|&p| den / p as u128).sum();
    Fraction::new(num, den)
}

fn h_from_phi(n: u64, phi: u64, y: f64, table: Option<&SpfTable>) -> Result<Fraction> {
    let v = n.checked_mul(2).ok_or(Error::Overflow {
        what: "2n − φ(n)",
        value: n,
    })? - phi;
    Ok(reciprocal_sum(&large_prime_divisors(v, y, table)?))
}

/// `h_y(n) = Σ 1/p` over primes `p > y` dividing `2n − φ(n)`, exactly.
pub fn h_y(n: u64, y: f64) -> Result<Fraction> {
    check_n(n, "h_y argument")?;
    check_y(y)?;
    h_from_phi(n, euler_phi(n), y, None)
}

fn gcd64(a: u64, b: u64) -> u64 {
    gcd(a as u128, b as u128) as u64
}

/// `gcd(n, φ(n)) = 1`.
pub fn in_a(n: u64) -> Result<bool> {
    check_n(n, "in_a argument")?;
    Ok(gcd64(n, euler_phi(n)) == 1)
}

/// `n ∈ A` and `h_y(n) > 1`.
pub fn in_a_xy(n: u64, y: f64) -> Result<bool> {
    check_y(y)?;
    Ok(in_a(n)? && h_y(n, y)?.exceeds_one())
}

/// Threshold `c1·log_2(n)/log_3(n)` for the divisibility test of `in_b`.
pub fn b_threshold(n: u64, c1: f64) -> f64 {
    c1 * iterated_log(2, n as f64) / iterated_log(3, n as f64)
}

fn check_c1(c1: f64) -> Result<()> {
    if !c1.is_finite() || c1 <= 0.0 {
        return Err(Error::Domain {
            what: "c1 must be a positive finite real",
            value: 0,
        });
    }
    Ok(())
}

fn b_from_phi(n: u64, phi: u64, c1: f64) -> bool {
    let t = b_threshold(n, c1);
    if t < 2.0 {
        return false;
    }
    primes_up_to(t as u64).into_iter().any(|p| phi % p != 0)
}

/// Some prime `p <= c1·log_2(n)/log_3(n)` does not divide `φ(n)`.
pub fn in_b(n: u64, c1: f64) -> Result<bool> {
    check_n(n, "in_b argument")?;
    check_c1(c1)?;
    Ok(b_from_phi(n, euler_phi(n), c1))
}

/// Exact proportion of `n <= X` with `12 | σ(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Density {
    pub count: u64,
    pub total: u64,
    pub value: f64,
}

pub fn sigma_mod12_density(x: u64, cfg: &ScanConfig) -> Result<Density> {
    if x == 0 {
        return Err(Error::Domain {
            what: "density limit",
            value: 0,
        });
    }
    if x > COUNT_MAX {
        return Err(Error::Capacity {
            what: "sigma density limit",
            required: x as u128,
            limit: COUNT_MAX as u128,
        });
    }
    let primes = primes_up_to(crate::arith::isqrt(x));
    let seg = cfg.segment_len.max(1) as u64;
    let fields = Fields {
        phi: false,
        sigma: true,
        spf: false,
    };
    let count = par::fold_reduce(
        x.div_ceil(seg),
        || (0u64, SegmentBuf::default()),
        |(count, buf), s| {
            let lo = 1 + s * seg;
            let len = (x - s * seg).min(seg) as usize;
            sieve_segment(lo, 1, len, &primes, fields, buf)?;
            *count += buf.sigma.iter().filter(|&&v| v % 12 == 0).count() as u64;
            Ok(())
        },
        |(a, buf), (b, _)| (a + b, buf),
    )?
    .0;
    Ok(Density {
        count,
        total: x,
        value: count as f64 / x as f64,
    })
}

/// Three-valued outcome for properties a bounded search may not settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Tristate {
    True,
    False,
    Undecided,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PrimeClass {
    pub p: u64,
    pub is_mersenne: bool,
    /// Undecided when certifying `2p` exceeds the scan capacity.
    pub two_p_noncototient: Tristate,
    /// Whether `2^n·p − 1` is composite for all `n`; never searched.
    pub riesel: Tristate,
}

pub fn classify_prime(p: u64, cfg: &ScanConfig) -> Result<PrimeClass> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::Domain {
            what: "classification needs an odd prime",
            value: p,
        });
    }
    let two_p = p.checked_mul(2).ok_or(Error::Overflow {
        what: "2p",
        value: p,
    })?;
    let two_p_noncototient = match certify(MapKind::Cototient, two_p, cfg) {
        Ok(Certificate::Exceptional) => Tristate::True,
        Ok(Certificate::Attained { .. }) => Tristate::False,
        Ok(Certificate::Undecidable) => Tristate::Undecided,
        Err(e) if e.is_capacity() => Tristate::Undecided,
        Err(e) => return Err(e),
    };
    Ok(PrimeClass {
        p,
        is_mersenne: (p + 1).is_power_of_two(),
        two_p_noncototient,
        riesel: Tristate::Unknown,
    })
}

/// Finite-range values of the quantities behind one lemma.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LemmaReport {
    pub lemma: u8,
    #[cfg_attr(feature = "serde", serde(rename = "X"))]
    pub x: u64,
    pub y: Option<f64>,
    pub c1: Option<f64>,
    /// Size of the lemma's set within `1..=X`.
    pub count: u64,
    /// `Σ 1/n` over that set.
    pub reciprocal_sum: f64,
    pub counts: BTreeMap<String, u64>,
}

/// Parameters of the lemma diagnostics. `y` applies to lemmas 1, 2 and 4;
/// `c1` to lemma 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaParams {
    pub y: f64,
    pub c1: f64,
}

impl Default for LemmaParams {
    fn default() -> Self {
        LemmaParams { y: 3.0, c1: 1.0 }
    }
}

/// Diagnostics over `n <= X`:
/// 1. `Ψ(X, y)`, and the `n` with `P(n) <= X/n` with their reciprocal sum;
/// 2. `A(X)` and `A(X, y)` with the reciprocal sum over `A(X, y)`;
/// 3. `B(X)` for the given `c1`;
/// 4. `C(X; y)`, the integers free of primes `<= y`.
pub fn lemma_report(lemma: u8, x: u64, params: LemmaParams) -> Result<LemmaReport> {
    if x == 0 {
        return Err(Error::Domain {
            what: "diagnostic limit",
            value: 0,
        });
    }
    if !(1..=4).contains(&lemma) {
        return Err(Error::Domain {
            what: "lemma id",
            value: lemma as u64,
        });
    }
    if lemma == 3 {
        check_c1(params.c1)?;
    } else {
        check_y(params.y)?;
    }
    if x > DIAGNOSTIC_MAX {
        return Err(Error::Capacity {
            what: "lemma diagnostic limit",
            required: x as u128,
            limit: DIAGNOSTIC_MAX as u128,
        });
    }
    let y_int = params.y as u64;
    let mut counts = BTreeMap::new();
    let mut count = 0u64;
    let mut sum = 0.0f64;
    match lemma {
        1 => {
            counts.insert("psi".to_string(), smooth_count(x, y_int)?);
            let table = build_spf_table(x.max(2))?;
            for n in 1..=x {
                let f = factorize(n, Some(&table))?;
                if f.largest_prime() <= x / n {
                    count += 1;
                    sum += 1.0 / n as f64;
                }
            }
        }
        2 => {
            let table = build_spf_table((2 * x).max(2))?;
            let mut in_a_count = 0u64;
            for n in 3..=x {
                let phi = factorize(n, Some(&table))?.phi();
                if gcd64(n, phi) != 1 {
                    continue;
                }
                in_a_count += 1;
                if h_from_phi(n, phi, params.y, Some(&table))?.exceeds_one() {
                    count += 1;
                    sum += 1.0 / n as f64;
                }
            }
            counts.insert("A".to_string(), in_a_count);
        }
        3 => {
            let table = build_spf_table(x.max(2))?;
            for n in 3..=x {
                let phi = factorize(n, Some(&table))?.phi();
                if b_from_phi(n, phi, params.c1) {
                    count += 1;
                    sum += 1.0 / n as f64;
                }
            }
        }
        _ => {
            let small = primes_up_to(y_int);
            for n in 1..=x {
                if small.iter().all(|&p| n % p != 0) {
                    count += 1;
                    sum += 1.0 / n as f64;
                }
            }
            counts.insert("rough_count".to_string(), rough_count(x, y_int)?);
        }
    }
    Ok(LemmaReport {
        lemma,
        x,
        y: (lemma != 3).then_some(params.y),
        c1: (lemma == 3).then_some(params.c1),
        count,
        reciprocal_sum: sum,
        counts,
    })
}
