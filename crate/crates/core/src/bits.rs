//! Fixed-length bit vectors over element indices.
//!
//! Bit `i` stands for element index `i`; the vector as a whole reads as a
//! little-endian integer, which fixes the enumeration order used by the
//! search module (ascending integer value) and the hex form used in reports.

/// A bit vector of fixed length `len`, packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64 && (len == 64 || mask < (1u64 << len)));
        let mut b = Bits::new(len);
        if !b.words.is_empty() {
            b.words[0] = mask;
        }
        b
    }

    pub fn from_indices<I: IntoIterator<Item = u32>>(len: usize, indices: I) -> Self {
        let mut b = Bits::new(len);
        for i in indices {
            b.set(i as usize);
        }
        b
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn clear_all(&mut self) {
        self.words.fill(0);
    }

    pub fn set_all(&mut self) {
        self.words.fill(u64::MAX);
        self.trim();
    }

    pub fn union_with(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn is_subset_of(&self, other: &Bits) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(w, o)| w & !o == 0)
    }

    pub fn copy_from(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        self.words.copy_from_slice(&other.words);
    }

    /// Iterate set bit positions in ascending order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    /// OR `other` rotated by `shift` into `self`: bit `(i + shift) mod len`
    /// of `self` is set wherever bit `i` of `other` is. This is the cyclic
    /// fast path for sumsets: rotating B by `a` maps each b to a+b.
    pub fn or_rotated(&mut self, other: &Bits, shift: usize) {
        debug_assert_eq!(self.len, other.len);
        let n = self.len;
        if n == 0 {
            return;
        }
        let shift = shift % n;
        // x rotated left by s within n bits = ((x << s) | (x >> (n - s))) mod 2^n
        self.or_shifted_left(other, shift);
        if shift != 0 {
            self.or_shifted_right(other, n - shift);
        }
        self.trim();
    }

    /// OR (other << s), truncated to len bits, into self.
    fn or_shifted_left(&mut self, other: &Bits, s: usize) {
        let word_shift = s / 64;
        let bit_shift = s % 64;
        let n_words = self.words.len();
        if bit_shift == 0 {
            for i in word_shift..n_words {
                self.words[i] |= other.words[i - word_shift];
            }
        } else {
            for i in word_shift..n_words {
                let lo = other.words[i - word_shift] << bit_shift;
                let hi = if i > word_shift {
                    other.words[i - word_shift - 1] >> (64 - bit_shift)
                } else {
                    0
                };
                self.words[i] |= lo | hi;
            }
        }
    }

    /// OR (other >> s) into self.
    fn or_shifted_right(&mut self, other: &Bits, s: usize) {
        let word_shift = s / 64;
        let bit_shift = s % 64;
        let n_words = self.words.len();
        if bit_shift == 0 {
            for i in 0..n_words.saturating_sub(word_shift) {
                self.words[i] |= other.words[i + word_shift];
            }
        } else {
            for i in 0..n_words.saturating_sub(word_shift) {
                let lo = other.words[i + word_shift] >> bit_shift;
                let hi = if i + word_shift + 1 < n_words {
                    other.words[i + word_shift + 1] << (64 - bit_shift)
                } else {
                    0
                };
                self.words[i] |= lo | hi;
            }
        }
    }

    /// Zero any bits at positions >= len in the last word.
    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Lowercase hex form of the vector read as a little-endian integer,
    /// `0x0` for the empty set.
    pub fn to_hex(&self) -> String {
        let mut s = String::from("0x");
        let mut started = false;
        for w in self.words.iter().rev() {
            if started {
                s.push_str(&format!("{w:016x}"));
            } else if *w != 0 {
                s.push_str(&format!("{w:x}"));
                started = true;
            }
        }
        if !started {
            s.push('0');
        }
        s
    }

    pub fn from_hex(hex: &str, len: usize) -> Option<Self> {
        let digits = hex.strip_prefix("0x").unwrap_or(hex);
        if digits.is_empty() {
            return None;
        }
        let mut b = Bits::new(len);
        for (pos, ch) in digits.chars().rev().enumerate() {
            let v = ch.to_digit(16)? as u64;
            for k in 0..4 {
                if v >> k & 1 == 1 {
                    let bit = pos * 4 + k;
                    if bit >= len {
                        return None;
                    }
                    b.set(bit);
                }
            }
        }
        Some(b)
    }

    /// First word, for groups of order <= 64.
    pub fn low_word(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }
}

impl std::fmt::Debug for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Bits[{}]{{", self.len)?;
        for (k, i) in self.iter_ones().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
