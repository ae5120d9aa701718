use alloc::vec;
use alloc::vec::Vec;

/// A bit per value in `1..=len`. Bit `v − 1` of the little-endian word
/// stream stands for value `v`; bits past `len` are always zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitmap {
    len: u64,
    words: Vec<u64>,
}

impl Bitmap {
    pub fn new(len: u64) -> Self {
        Bitmap {
            len,
            words: vec![0; len.div_ceil(64) as usize],
        }
    }

    /// Values covered, `1..=len`.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn set(&mut self, v: u64) {
        debug_assert!(v >= 1 && v <= self.len);
        let i = v - 1;
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    /// Whether `v` is marked; values outside `1..=len` read as unmarked.
    #[inline]
    pub fn get(&self, v: u64) -> bool {
        if v == 0 || v > self.len {
            return false;
        }
        let i = v - 1;
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &Bitmap) {
        assert_eq!(self.len, other.len, "bitmap lengths differ");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Unmarked values, ascending.
    pub fn unset(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.len).filter(move |&v| !self.get(v))
    }

    /// Marked values, ascending.
    pub fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.len).filter(move |&v| self.get(v))
    }

    /// The bitmap cut down to `1..=len`.
    pub fn truncated(&self, len: u64) -> Bitmap {
        assert!(len <= self.len);
        let mut words = self.words[..len.div_ceil(64) as usize].to_vec();
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        Bitmap { len, words }
    }

    /// `ceil(len/8)` bytes; bit `j` of byte `i` is value `8i + j + 1`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        out.truncate(self.len.div_ceil(8) as usize);
        out
    }

    /// Inverse of [`Bitmap::to_bytes`]. `None` if the byte count is wrong or
    /// a bit past `len` is set.
    pub fn from_bytes(len: u64, bytes: &[u8]) -> Option<Bitmap> {
        if bytes.len() as u64 != len.div_ceil(8) {
            return None;
        }
        let mut words = vec![0u64; len.div_ceil(64) as usize];
        for (i, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            words[i] = u64::from_le_bytes(buf);
        }
        let map = Bitmap { len, words };
        (map.truncated(len) == map).then_some(map)
    }
}
