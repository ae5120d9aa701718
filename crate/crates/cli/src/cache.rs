//! Binary image cache.
//!
//! Little-endian layout:
//!
//! | bytes          | field                                  |
//! |----------------|----------------------------------------|
//! | 4              | magic `NAIM`                           |
//! | 4              | format version                         |
//! | 1              | kind code (0 cototient, 1 aliquot, 2 robbins) |
//! | 1              | mode code (0 exact, 1 even-only, 2 heuristic) |
//! | 8              | limit `X`                              |
//! | 8              | undecided count `u`                    |
//! | ceil(X/8)      | bitmap, bit `j` of byte `i` is `8i+j+1` |
//! | 8·u            | undecided values, ascending            |
//! | 8 (heuristic)  | scan ceiling                           |

use std::fs;
use std::hash::Hasher;
use std::path::{Path, PathBuf};

use exception_sieve_core::{Bitmap, ImageMap, MapKind, Mode};
use fnv::FnvHasher;

use crate::error::{CliError, Result};

pub const CACHE_MAGIC: [u8; 4] = *b"NAIM";
pub const CACHE_VERSION: u32 = 1;
const HEADER_LEN: usize = 26;

/// 64-bit FNV-1a digest.
pub fn checksum(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

pub fn encode_image(map: &ImageMap) -> Vec<u8> {
    let bitmap = map.bits().to_bytes();
    let mut out = Vec::with_capacity(HEADER_LEN + bitmap.len() + 8 * map.undecided().len() + 8);
    out.extend_from_slice(&CACHE_MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    out.push(map.kind().code());
    out.push(map.mode().code());
    out.extend_from_slice(&map.limit().to_le_bytes());
    out.extend_from_slice(&(map.undecided().len() as u64).to_le_bytes());
    out.extend_from_slice(&bitmap);
    for &v in map.undecided() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    if let Mode::Heuristic { ceiling } = map.mode() {
        out.extend_from_slice(&ceiling.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(format!(
                "truncated: needs {} more bytes at offset {}, file has {}",
                n,
                self.pos,
                self.bytes.len()
            )),
        }
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Parses a cache image; errors describe the first inconsistency found.
pub fn decode_image(bytes: &[u8]) -> std::result::Result<ImageMap, String> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4)?;
    if magic != CACHE_MAGIC {
        return Err(format!("bad magic {magic:02x?}, expected \"NAIM\""));
    }
    let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(format!(
            "format version {version} does not match supported version {CACHE_VERSION}"
        ));
    }
    let kind_code = r.take(1)?[0];
    let kind =
        MapKind::from_code(kind_code).ok_or_else(|| format!("unknown kind code {kind_code}"))?;
    let mode_code = r.take(1)?[0];
    let limit = r.u64()?;
    let count = r.u64()?;
    if limit == 0 {
        return Err("limit is zero".into());
    }
    let map_len = usize::try_from(limit.div_ceil(8)).map_err(|_| "limit too large".to_string())?;
    let bitmap = Bitmap::from_bytes(limit, r.take(map_len)?)
        .ok_or_else(|| "bitmap has bits beyond the limit".to_string())?;
    let count = usize::try_from(count)
        .ok()
        .filter(|&c| c <= (bytes.len() - r.pos) / 8)
        .ok_or_else(|| format!("truncated: undecided count {count} exceeds file size"))?;
    let mut undecided = Vec::with_capacity(count);
    for _ in 0..count {
        let v = r.u64()?;
        if v == 0 || v > limit {
            return Err(format!("undecided value {v} outside 1..={limit}"));
        }
        undecided.push(v);
    }
    let mode = match mode_code {
        0 => Mode::Exact,
        1 => Mode::EvenOnly,
        2 => Mode::Heuristic { ceiling: r.u64()? },
        c => return Err(format!("unknown mode code {c}")),
    };
    if r.pos != bytes.len() {
        return Err(format!("{} trailing bytes", bytes.len() - r.pos));
    }
    ImageMap::from_parts(kind, limit, mode, bitmap, undecided).map_err(str::to_string)
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes `map` to `path` (through a temporary file) and returns its checksum.
pub fn write_cache(map: &ImageMap, path: &Path) -> Result<u64> {
    let bytes = encode_image(map);
    let tmp = tmp_path(path);
    fs::write(&tmp, &bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))?;
    Ok(checksum(&bytes))
}

/// Reads a cache file, returning the image and the file's checksum.
pub fn read_cache(path: &Path) -> Result<(ImageMap, u64)> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let map = decode_image(&bytes).map_err(|reason| CliError::CorruptCache {
        path: path.to_path_buf(),
        reason,
    })?;
    Ok((map, checksum(&bytes)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use exception_sieve_core::{build_image, ScanConfig};

    fn image(kind: MapKind, x: u64, mode: Mode) -> ImageMap {
        build_image(kind, x, mode, &ScanConfig::default()).unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = encode_image(&image(MapKind::Cototient, 10, Mode::Exact));
        assert_eq!(&bytes[..4], b"NAIM");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(bytes[8], 0);
        assert_eq!(bytes[9], 0);
        assert_eq!(&bytes[10..18], &10u64.to_le_bytes());
        assert_eq!(&bytes[18..26], &0u64.to_le_bytes());
        // values 1..=9 attained, 10 not
        assert_eq!(&bytes[26..], &[0xff, 0x01]);
    }

    #[test]
    fn round_trips() {
        let modes = [
            Mode::Exact,
            Mode::EvenOnly,
            Mode::Heuristic { ceiling: 500 },
        ];
        for kind in MapKind::ALL {
            for mode in modes {
                for x in [1, 10, 1000] {
                    let Ok(map) = build_image(kind, x, mode, &ScanConfig::default()) else {
                        assert_eq!((kind, mode), (MapKind::Robbins, Mode::EvenOnly));
                        continue;
                    };
                    assert_eq!(decode_image(&encode_image(&map)).unwrap(), map);
                }
            }
        }
    }

    #[test]
    fn rejects_damage() {
        let good = encode_image(&image(MapKind::Robbins, 100, Mode::Exact));
        for cut in [0, 3, 9, 25, 30, good.len() - 1] {
            assert!(
                decode_image(&good[..cut])
                    .unwrap_err()
                    .contains("truncated"),
                "{cut}"
            );
        }
        let mut v = good.clone();
        v[4] = 2;
        let err = decode_image(&v).unwrap_err();
        assert!(
            err.contains("version 2") && err.contains("version 1"),
            "{err}"
        );
        let mut v = good.clone();
        v[0] = b'X';
        assert!(decode_image(&v).unwrap_err().contains("magic"));
        let mut v = good.clone();
        v.push(0);
        assert!(decode_image(&v).unwrap_err().contains("trailing"));
        let mut v = good.clone();
        v[8] = 7;
        assert!(decode_image(&v).is_err());
        // clearing the bit of an undecided value breaks an invariant
        let mut v = good;
        v[26] &= !1;
        assert!(decode_image(&v).is_err());
    }

    #[test]
    fn checksum_is_fnv1a() {
        assert_eq!(checksum(b""), 0xcbf29ce484222325);
        assert_eq!(checksum(b"a"), 0xaf63dc4c8601ec8c);
    }
}
