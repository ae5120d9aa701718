use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::lemmas::iterated_log;
use super::sets::{set_count, set_membership, StructuredSet};
use crate::arith::primes_up_to;
use crate::image::{build_image, ImageMap, MapKind, Mode, ScanConfig};
use crate::{Error, Result};

/// Finite-scale check of one density theorem.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TrendReport {
    pub theorem: u8,
    #[cfg_attr(feature = "serde", serde(rename = "X"))]
    pub x: u64,
    /// The count compared against `bound_value`.
    pub count: u64,
    pub counts: BTreeMap<String, u64>,
    pub bound_value: f64,
    pub density: f64,
    /// `count >= bound_value`.
    pub pass: bool,
    pub checks: BTreeMap<String, bool>,
    pub diagnostics: BTreeMap<String, f64>,
    pub lists: BTreeMap<String, Vec<u64>>,
    /// Smallest `X0` with the bound holding at every `X'` in `X0..=X`.
    pub crossover: Option<u64>,
}

impl TrendReport {
    fn new(theorem: u8, x: u64) -> Self {
        TrendReport {
            theorem,
            x,
            count: 0,
            counts: BTreeMap::new(),
            bound_value: 0.0,
            density: 0.0,
            pass: false,
            checks: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
            lists: BTreeMap::new(),
            crossover: None,
        }
    }

    fn put(&mut self, key: &str, value: u64) {
        self.counts.insert(key.to_string(), value);
    }
}

/// Kind and mode of the image each theorem report reads.
pub fn report_image_spec(theorem: u8) -> Result<(MapKind, Mode)> {
    match theorem {
        1 => Ok((MapKind::Cototient, Mode::EvenOnly)),
        2 => Ok((MapKind::Aliquot, Mode::EvenOnly)),
        3 => Ok((MapKind::Robbins, Mode::Exact)),
        t => Err(Error::Domain {
            what: "theorem id",
            value: t as u64,
        }),
    }
}

/// Builds the image the report needs and evaluates it.
pub fn theorem_report(theorem: u8, x: u64, cfg: &ScanConfig) -> Result<TrendReport> {
    let (kind, mode) = report_image_spec(theorem)?;
    let image = build_image(kind, x, mode, cfg)?;
    report_from_image(theorem, &image)
}

/// Evaluates a report on an existing image. Theorems 1 and 2 accept exact or
/// even-only images of their map; theorem 3 needs an exact Robbins image.
pub fn report_from_image(theorem: u8, image: &ImageMap) -> Result<TrendReport> {
    let (kind, mode) = report_image_spec(theorem)?;
    let usable = image.kind() == kind
        && (image.mode() == mode || (mode == Mode::EvenOnly && image.mode() == Mode::Exact));
    if !usable {
        return Err(Error::UnsupportedMode {
            kind: image.kind(),
            mode: image.mode().name(),
        });
    }
    Ok(match theorem {
        1 => cototient_report(image),
        2 => aliquot_report(image),
        _ => robbins_report(image)?,
    })
}

/// Odd primes `p <= X/2` with `2p` a certified noncototient.
fn cototient_report(image: &ImageMap) -> TrendReport {
    let x = image.limit();
    let mut r = TrendReport::new(1, x);
    let odd_primes: Vec<u64> = primes_up_to(x / 2).into_iter().skip(1).collect();
    let hits: Vec<u64> = odd_primes
        .iter()
        .copied()
        .filter(|&p| image.is_exception(2 * p))
        .collect();
    let exceptions = image.exceptions().exceptions;
    let even = exceptions.iter().filter(|&&m| m % 2 == 0).count() as u64;

    r.count = exceptions.len() as u64;
    r.put("odd_primes", odd_primes.len() as u64);
    r.put("two_p_noncototient", hits.len() as u64);
    r.put("noncototients", r.count);
    r.put("even_noncototients", even);
    r.put("undecided", image.undecided().len() as u64);
    r.bound_value = x as f64 / (2.0 * iterated_log(1, x as f64));
    r.density = if odd_primes.is_empty() {
        0.0
    } else {
        hits.len() as f64 / odd_primes.len() as f64
    };
    r.pass = r.count as f64 >= r.bound_value;
    r.checks.insert(
        "counts_consistent".to_string(),
        hits.len() as u64 <= even && even <= r.count,
    );
    r.diagnostics
        .insert("two_p_fraction".to_string(), r.density);
    r.diagnostics.insert(
        "reciprocal_sum_two_p".to_string(),
        hits.iter().map(|&p| 1.0 / (2 * p) as f64).sum(),
    );
    r.diagnostics.insert(
        "reciprocal_sum".to_string(),
        exceptions.iter().map(|&m| 1.0 / m as f64).sum(),
    );
    r.lists.insert("two_p_primes".to_string(), hits);
    r
}

/// Multiples of 12 that are certified nonaliquots.
fn aliquot_report(image: &ImageMap) -> TrendReport {
    let x = image.limit();
    let mut r = TrendReport::new(2, x);
    let k = x / 12;
    let k_in = (1..=k).filter(|&j| image.is_exception(12 * j)).count() as u64;
    let even = image.bits().unset().filter(|m| m % 2 == 0).count() as u64;

    r.count = k_in;
    r.put("K", k);
    r.put("K_cap_Na", k_in);
    r.put("K_minus_Na", k - k_in);
    r.put("even_nonaliquots", even);
    r.bound_value = x as f64 / 48.0;
    r.density = k_in as f64 / x as f64;
    r.pass = 48 * k_in as u128 >= x as u128;
    r.checks
        .insert("counts_consistent".to_string(), k_in <= k && k_in <= even);
    // attained multiples of 12 come from multiples of 12 up to 3X/4
    r.checks.insert(
        "K_minus_Na_within_X_over_16".to_string(),
        16 * (k - k_in) as u128 <= x as u128,
    );
    r.diagnostics
        .insert("intermediate_ceiling".to_string(), x as f64 / 16.0);
    r.diagnostics
        .insert("K_density".to_string(), k as f64 / x as f64);
    r
}

/// Robbins numbers, with powers of two left out of the count.
fn robbins_report(image: &ImageMap) -> Result<TrendReport> {
    let x = image.limit();
    let mut r = TrendReport::new(3, x);
    let m_count = set_count(StructuredSet::M, x)?.count;
    let mut m_in = 0u64;
    let mut m_attained = Vec::new();
    // prefix counts give the crossover: the last X' <= X where the bound fails
    let mut exceptions = 0u64;
    let mut last_fail = None;
    for m in 1..=x {
        let exc = image.is_exception(m);
        exceptions += u64::from(exc);
        if set_membership(StructuredSet::M, m)?.member {
            if exc {
                m_in += 1;
            } else {
                m_attained.push(m);
            }
        }
        if 3 * exceptions < m {
            last_fail = Some(m);
        }
    }

    r.count = exceptions;
    r.put("M", m_count);
    r.put("M_cap_Nr", m_in);
    r.put("Nr", exceptions);
    r.put("undecided", image.undecided().len() as u64);
    r.bound_value = x as f64 / 3.0;
    r.density = exceptions as f64 / x as f64;
    r.pass = 3 * exceptions as u128 >= x as u128;
    r.crossover = match last_fail {
        None => Some(1),
        Some(f) if f < x => Some(f + 1),
        Some(_) => None,
    };
    r.checks.insert(
        "counts_consistent".to_string(),
        m_in <= m_count && m_in <= exceptions,
    );
    r.diagnostics
        .insert("M_density".to_string(), m_count as f64 / x as f64);
    r.diagnostics.insert(
        "M_cap_Nr_share".to_string(),
        if m_count == 0 {
            0.0
        } else {
            m_in as f64 / m_count as f64
        },
    );
    r.lists.insert("M_attained".to_string(), m_attained);
    Ok(r)
}
