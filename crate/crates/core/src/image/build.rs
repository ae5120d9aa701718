use alloc::vec::Vec;
use core::fmt;

use super::bound::{exhaustive_ceiling, search_bound};
use super::{Bitmap, MapKind};
use crate::arith::{
    build_spf_table, is_prime, isqrt, primes_up_to, sieve_segment, Fields, SegmentBuf,
    DEFAULT_SEGMENT_LEN,
};
use crate::{par, Error, Result};

/// How an image is constructed, and therefore what its unset bits prove.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "mode", rename_all = "kebab-case"))]
pub enum Mode {
    /// Every preimage bound is scanned: unset bits are exceptions.
    Exact,
    /// Only the even-preimage scans (cototient, aliquot). Even targets are
    /// certified; odd targets without a witness are undecided.
    EvenOnly,
    /// Preimages up to `ceiling` are scanned; an unset target is certified
    /// only when `ceiling` dominates its search bound.
    Heuristic { ceiling: u64 },
}

impl Mode {
    /// Code used in the binary image cache.
    pub fn code(self) -> u8 {
        match self {
            Mode::Exact => 0,
            Mode::EvenOnly => 1,
            Mode::Heuristic { .. } => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::EvenOnly => "even-only",
            Mode::Heuristic { .. } => "heuristic",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Heuristic { ceiling } => write!(f, "heuristic({ceiling})"),
            m => f.write_str(m.name()),
        }
    }
}

/// Ceilings on scan extents. Builds that would exceed them fail with
/// [`Error::Capacity`] naming the scan limit they need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Capacity {
    /// Largest odd-preimage scan (`X²` for exact cototient/aliquot images,
    /// the ceiling for heuristic images and preimage searches).
    pub max_odd_scan: u64,
    /// Largest Robbins `w` scan (`X²` for exact Robbins images).
    pub max_w_scan: u64,
    /// Largest even-preimage scan (`2X`).
    pub max_even_scan: u64,
}

impl Capacity {
    /// Exact cototient/aliquot images up to X = 3·10^4.
    pub const DEFAULT_ODD_SCAN: u64 = 900_000_000;
    /// Exact Robbins images up to X = 10^4.
    pub const DEFAULT_W_SCAN: u64 = 100_000_000;
    /// Even-only images up to X = 2·10^9 (a 250 MB bitmap).
    pub const DEFAULT_EVEN_SCAN: u64 = 4_000_000_000;

    /// Every ceiling set to `limit`.
    pub fn uniform(limit: u64) -> Self {
        Capacity {
            max_odd_scan: limit,
            max_w_scan: limit,
            max_even_scan: limit,
        }
    }
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity {
            max_odd_scan: Self::DEFAULT_ODD_SCAN,
            max_w_scan: Self::DEFAULT_W_SCAN,
            max_even_scan: Self::DEFAULT_EVEN_SCAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanConfig {
    /// Values per sieve segment; any positive value yields identical images.
    pub segment_len: usize,
    pub capacity: Capacity,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            segment_len: DEFAULT_SEGMENT_LEN,
            capacity: Capacity::default(),
        }
    }
}

impl ScanConfig {
    pub(crate) fn check(&self, what: &'static str, required: u128, limit: u64) -> Result<()> {
        if required > limit as u128 {
            return Err(Error::Capacity {
                what,
                required,
                limit: limit as u128,
            });
        }
        Ok(())
    }
}

/// Attainment bitmap of one map over `1..=limit`.
///
/// A set bit means "attained or undecided"; an unset bit is a certified
/// exception under the image's mode. Undecided values are listed in
/// ascending order and always have their bit set, so exception counts are
/// lower bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageMap {
    kind: MapKind,
    limit: u64,
    mode: Mode,
    bits: Bitmap,
    undecided: Vec<u64>,
}

/// Certified exceptions and the undecided values of an image.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Exceptions {
    pub exceptions: Vec<u64>,
    pub undecided: Vec<u64>,
}

impl ImageMap {
    /// Reassembles an image from stored parts, checking its invariants.
    pub fn from_parts(
        kind: MapKind,
        limit: u64,
        mode: Mode,
        bits: Bitmap,
        undecided: Vec<u64>,
    ) -> core::result::Result<ImageMap, &'static str> {
        if bits.len() != limit {
            return Err("bitmap length differs from limit");
        }
        if kind == MapKind::Robbins && mode == Mode::EvenOnly {
            return Err("even-only mode is not defined for robbins");
        }
        if !undecided.windows(2).all(|w| w[0] < w[1]) {
            return Err("undecided list is not strictly ascending");
        }
        if !undecided.iter().all(|&v| bits.get(v)) {
            return Err("undecided value with unset bit");
        }
        Ok(ImageMap {
            kind,
            limit,
            mode,
            bits,
            undecided,
        })
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn bits(&self) -> &Bitmap {
        &self.bits
    }

    pub fn undecided(&self) -> &[u64] {
        &self.undecided
    }

    pub fn is_undecided(&self, m: u64) -> bool {
        self.undecided.binary_search(&m).is_ok()
    }

    /// Certified exceptional under this image's mode.
    pub fn is_exception(&self, m: u64) -> bool {
        (1..=self.limit).contains(&m) && !self.bits.get(m)
    }

    /// Attained by a found preimage (set and not undecided).
    pub fn is_attained(&self, m: u64) -> bool {
        self.bits.get(m) && !self.is_undecided(m)
    }

    pub fn exception_count(&self) -> u64 {
        self.limit - self.bits.count_ones()
    }

    pub fn exceptions(&self) -> Exceptions {
        Exceptions {
            exceptions: self.bits.unset().collect(),
            undecided: self.undecided.clone(),
        }
    }

    /// The same image over `1..=limit` for a smaller limit.
    pub fn restrict(&self, limit: u64) -> ImageMap {
        assert!(
            limit >= 1 && limit <= self.limit,
            "restriction must shrink the image"
        );
        ImageMap {
            kind: self.kind,
            limit,
            mode: self.mode,
            bits: self.bits.truncated(limit),
            undecided: self
                .undecided
                .iter()
                .copied()
                .take_while(|&v| v <= limit)
                .collect(),
        }
    }
}

/// Sieves `start, start + step, ..., <= end` in parallel segments and lets
/// `mark` record targets into a per-worker bitmap; the bitmaps are unioned.
fn scan<F>(
    limit: u64,
    start: u64,
    end: u64,
    step: u64,
    fields: Fields,
    cfg: &ScanConfig,
    mark: F,
) -> Result<Bitmap>
where
    F: Fn(u64, &SegmentBuf, &mut Bitmap) + Sync + Send,
{
    if end < start {
        return Ok(Bitmap::new(limit));
    }
    let primes = primes_up_to(isqrt(end));
    let values = (end - start) / step + 1;
    let seg = cfg.segment_len.max(1) as u64;
    let (bits, _) = par::fold_reduce(
        values.div_ceil(seg),
        || (Bitmap::new(limit), SegmentBuf::default()),
        |(bits, buf), s| {
            let first = s * seg;
            let len = (values - first).min(seg) as usize;
            let lo = start + first * step;
            sieve_segment(lo, step, len, &primes, fields, buf)?;
            mark(lo, buf, bits);
            Ok(())
        },
        |(mut a, buf), (b, _)| {
            a.union_with(&b);
            (a, buf)
        },
    )?;
    Ok(bits)
}

const PHI: Fields = Fields {
    phi: true,
    sigma: false,
    spf: false,
};
const SIGMA: Fields = Fields {
    phi: false,
    sigma: true,
    spf: false,
};

/// Marks `f(n)` for every `n` in `[lo_n, hi_n]` (step 1) whose parity filter
/// passes, where `f` is the cototient or aliquot map.
fn scan_additive(
    kind: MapKind,
    limit: u64,
    lo_n: u64,
    hi_n: u64,
    step: u64,
    even_only: bool,
    cfg: &ScanConfig,
) -> Result<Bitmap> {
    let fields = if kind == MapKind::Cototient {
        PHI
    } else {
        SIGMA
    };
    scan(
        limit,
        lo_n,
        hi_n,
        step,
        fields,
        cfg,
        move |lo, buf, bits| {
            let len = buf.sieved_part().len();
            for i in 0..len {
                let n = lo + step * i as u64;
                if even_only && n % 2 == 1 {
                    continue;
                }
                let v = match kind {
                    MapKind::Cototient => n - buf.phi[i],
                    _ => buf.sigma[i] - n,
                };
                if v >= 1 && v <= limit {
                    bits.set(v);
                }
            }
        },
    )
}

/// σ(r²) − r² for odd `r` in `3..=limit`, marked when `<= limit`.
fn scan_odd_squares(limit: u64) -> Result<Bitmap> {
    let mut bits = Bitmap::new(limit);
    if limit < 3 {
        return Ok(bits);
    }
    let table = build_spf_table(limit)?;
    let mut r = 3;
    while r <= limit {
        // σ(r²) = ∏ (p^{2e+1} − 1)/(p − 1) over p^e ‖ r
        let mut sigma: u128 = 1;
        for (p, e) in table.factor_pairs(r) {
            let p = p as u128;
            let mut term: u128 = 1;
            for _ in 0..2 * e {
                term = term * p + 1;
            }
            sigma *= term;
        }
        let v = sigma - r as u128 * r as u128;
        if v <= limit as u128 {
            bits.set(v as u64);
        }
        r += 2;
    }
    Ok(bits)
}

fn robbins_w_scan(limit: u64, cfg: &ScanConfig) -> Result<Bitmap> {
    let w_max = limit * limit;
    scan(limit, 3, w_max, 2, PHI, cfg, move |lo, buf, bits| {
        for (i, &phi) in buf.phi.iter().enumerate() {
            let w = lo + 2 * i as u64;
            let k = w - phi;
            if !(3..=limit).contains(&k) {
                continue;
            }
            let mut alpha = 0;
            while let Some(m) = k.checked_shl(alpha).filter(|&m| m <= limit) {
                if !bits.get(m) {
                    if let Some(p) = (w as u128).checked_shl(alpha + 1) {
                        if p < u64::MAX as u128 && is_prime(p as u64 + 1) {
                            bits.set(m);
                        }
                    }
                }
                alpha += 1;
            }
        }
    })
}

fn robbins_prime_scan(limit: u64, ceiling: u64, cfg: &ScanConfig) -> Result<Bitmap> {
    // n = p − 1 over [2, ceiling − 1]; f_r(p) = n/2 − φ(n)
    scan(
        limit,
        2,
        ceiling.saturating_sub(1),
        1,
        PHI,
        cfg,
        move |lo, buf, bits| {
            for (i, &phi) in buf.phi.iter().enumerate() {
                let n = lo + i as u64;
                if n % 2 == 1 || !is_prime(n + 1) {
                    continue;
                }
                let m = n / 2 - phi;
                if m >= 1 && m <= limit {
                    bits.set(m);
                }
            }
        },
    )
}

/// Builds the attainment image of `kind` over `1..=limit`.
///
/// Exact mode scans every certified preimage region:
/// - cototient: even `n <= 2X`, odd `n <= X²`;
/// - aliquot: even `n <= 2X`, odd squares `r² (r <= X)`, odd `n <= X²`;
/// - robbins: odd `w <= X²`, marking `2^α·(w − φ(w))` whenever
///   `2^{α+1}·w + 1` is prime. Powers of two are undecided.
///
/// Even-only mode keeps just the even scans (and odd squares for aliquot).
pub fn build_image(kind: MapKind, limit: u64, mode: Mode, cfg: &ScanConfig) -> Result<ImageMap> {
    if limit == 0 {
        return Err(Error::Domain {
            what: "image limit",
            value: 0,
        });
    }
    let cap = &cfg.capacity;
    let square = limit as u128 * limit as u128;
    let twice = 2 * limit as u128;
    let (mut bits, undecided) = match (kind, mode) {
        (MapKind::Robbins, Mode::EvenOnly) => {
            return Err(Error::UnsupportedMode {
                kind,
                mode: mode.name(),
            })
        }
        (MapKind::Robbins, Mode::Exact) => {
            cfg.check("robbins w scan", square, cap.max_w_scan)?;
            let bits = robbins_w_scan(limit, cfg)?;
            let powers: Vec<u64> = (0..64)
                .map(|a| 1u64 << a)
                .take_while(|&m| m <= limit)
                .collect();
            (bits, powers)
        }
        (_, Mode::Exact | Mode::EvenOnly) => {
            cfg.check("even preimage scan", twice, cap.max_even_scan)?;
            if mode == Mode::Exact {
                cfg.check("odd preimage scan", square, cap.max_odd_scan)?;
            }
            let mut bits = scan_additive(kind, limit, 1, 2 * limit, 1, true, cfg)?;
            if kind == MapKind::Aliquot {
                bits.union_with(&scan_odd_squares(limit)?);
            }
            if mode == Mode::Exact {
                let odd = scan_additive(kind, limit, 3, limit * limit, 2, false, cfg)?;
                bits.union_with(&odd);
                (bits, Vec::new())
            } else {
                let open: Vec<u64> = (3..=limit).step_by(2).filter(|&m| !bits.get(m)).collect();
                (bits, open)
            }
        }
        (_, Mode::Heuristic { ceiling }) => {
            cfg.check("heuristic preimage scan", ceiling as u128, cap.max_odd_scan)?;
            let bits = match kind {
                MapKind::Robbins => robbins_prime_scan(limit, ceiling, cfg)?,
                _ => scan_additive(kind, limit, 1, ceiling, 1, false, cfg)?,
            };
            let mut open = Vec::new();
            for m in bits.unset() {
                let b = search_bound(kind, m)?;
                let need = exhaustive_ceiling(kind, m, &b);
                if !need.is_some_and(|n| n <= ceiling as u128) {
                    open.push(m);
                }
            }
            if kind == MapKind::Robbins {
                // powers of two are never certified, even when a witness is found
                open.extend((0..64).map(|a| 1u64 << a).take_while(|&m| m <= limit));
                open.sort_unstable();
                open.dedup();
            }
            (bits, open)
        }
    };
    for &m in &undecided {
        bits.set(m);
    }
    Ok(ImageMap {
        kind,
        limit,
        mode,
        bits,
        undecided,
    })
}

/// Certified exceptions (unset bits) and undecided values of an image.
pub fn enumerate_exceptions(
    kind: MapKind,
    limit: u64,
    mode: Mode,
    cfg: &ScanConfig,
) -> Result<Exceptions> {
    Ok(build_image(kind, limit, mode, cfg)?.exceptions())
}
