//! Block-wise brute-force hash `H` that lets a word be rebuilt from any of its
//! `(w - k)`-subsequences.
//!
//! Words are cut into blocks of `w' = ⌈log₂ n⌉` bits. Every possible block is
//! assigned a color so that two blocks sharing a common `(w' - k)`-subsequence
//! never share a color; the hash is the list of block colors.

use std::sync::Arc;

use crate::bitseq::{for_each_supersequence, BitSeq};
use crate::error::{Error, Result};
use crate::syncvec::ceil_log2;

/// Largest block length whose full coloring table is built.
pub const MAX_WORD_LEN: usize = 24;

/// Color table over all `w'`-bit words, indexed by the word read as a
/// big-endian integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusabilityColoring {
    word_len: usize,
    k: usize,
    colors: Vec<u32>,
    color_count: usize,
    color_width: usize,
}

impl ConfusabilityColoring {
    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn color_count(&self) -> usize {
        self.color_count
    }

    /// Bits per block color, `⌈log₂ color_count⌉`.
    pub fn color_width(&self) -> usize {
        self.color_width
    }

    /// Color of a `w'`-bit word given as a big-endian integer.
    pub fn color_of(&self, word: u32) -> u32 {
        self.colors[word as usize]
    }
}

/// Calls `visit` on every `len`-bit word other than `u` that shares a
/// `(len - k)`-bit subsequence with `u`. Words may be visited more than once.
fn for_each_confusable(u: u32, len: usize, k: usize, mut visit: impl FnMut(u32)) {
    let k = k.min(len);
    let mut level = vec![u];
    for step in 0..k {
        let cur = len - step;
        let mut next = Vec::with_capacity(level.len() * cur);
        for &v in &level {
            for i in 0..cur {
                let tail = cur - i - 1;
                next.push(((v >> (tail + 1)) << tail) | (v & ((1u32 << tail) - 1)));
            }
        }
        next.sort_unstable();
        next.dedup();
        level = next;
    }
    for v in level {
        insert_rec(v, len - k, k, &mut |w| {
            if w != u {
                visit(w);
            }
        });
    }
}

fn insert_rec(v: u32, len: usize, remaining: usize, visit: &mut impl FnMut(u32)) {
    if remaining == 0 {
        visit(v);
        return;
    }
    for i in 0..=len {
        let tail = len - i;
        let high = (v >> tail) << (tail + 1);
        let low = v & ((1u32 << tail) - 1);
        for b in 0..2u32 {
            insert_rec(high | (b << tail) | low, len + 1, remaining - 1, visit);
        }
    }
}

/// Greedy first-fit coloring of all `word_len`-bit words in ascending order.
pub fn build_coloring(word_len: usize, k: usize) -> Result<ConfusabilityColoring> {
    if word_len == 0 {
        return Err(Error::invalid("block length must be positive"));
    }
    if word_len > MAX_WORD_LEN {
        return Err(Error::CapacityExceeded(format!(
            "block length {word_len} exceeds the supported maximum of {MAX_WORD_LEN}"
        )));
    }
    let size = 1usize << word_len;
    let mut colors = vec![0u32; size];
    let mut color_count = 1usize;
    if k > 0 {
        let mut used: Vec<u32> = Vec::new();
        for u in 0..size as u32 {
            // Colors are tracked by stamping `used[color] = u + 1`.
            for_each_confusable(u, word_len, k, |v| {
                if v < u {
                    let c = colors[v as usize] as usize;
                    if c >= used.len() {
                        used.resize(c + 1, 0);
                    }
                    used[c] = u + 1;
                }
            });
            let c = (0..).find(|&c| used.get(c).is_none_or(|&s| s != u + 1)).unwrap();
            colors[u as usize] = c as u32;
            color_count = color_count.max(c + 1);
        }
    }
    Ok(ConfusabilityColoring {
        word_len,
        k,
        colors,
        color_count,
        color_width: ceil_log2(color_count as u64) as usize,
    })
}

/// The hash `H` for one `(n, k)`, sharing a prebuilt coloring.
#[derive(Debug, Clone)]
pub struct SmallBlockHash {
    coloring: Arc<ConfusabilityColoring>,
}

impl SmallBlockHash {
    /// Builds the coloring for blocks of `⌈log₂ n⌉` bits.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let word_len = ceil_log2(n as u64) as usize;
        Ok(Self::from_coloring(Arc::new(build_coloring(word_len, k)?)))
    }

    pub fn from_coloring(coloring: Arc<ConfusabilityColoring>) -> Self {
        Self { coloring }
    }

    pub fn coloring(&self) -> &ConfusabilityColoring {
        &self.coloring
    }

    fn word_len(&self) -> usize {
        self.coloring.word_len
    }

    pub fn block_count(&self, w: usize) -> usize {
        w.div_ceil(self.word_len())
    }

    /// Hash length for a `w`-bit input: `⌈w / w'⌉ · color_width`.
    pub fn hash_len(&self, w: usize) -> usize {
        self.block_count(w) * self.coloring.color_width
    }

    pub fn hash(&self, c: &BitSeq) -> Result<BitSeq> {
        if c.is_empty() {
            return Err(Error::invalid("cannot hash an empty word"));
        }
        let wl = self.word_len();
        let width = self.coloring.color_width;
        let mut out = BitSeq::new();
        for chunk in c.as_slice().chunks(wl) {
            let mut word = 0u32;
            for i in 0..wl {
                word = (word << 1) | chunk.get(i).copied().unwrap_or(false) as u32;
            }
            out.extend_from(&BitSeq::from_uint(self.coloring.color_of(word) as u64, width)?);
        }
        Ok(out)
    }

    /// Rebuilds a `w`-bit word from a subsequence `d` missing at most `k` bits
    /// and the word's hash.
    pub fn decode(&self, d: &BitSeq, hash: &BitSeq, w: usize) -> Result<BitSeq> {
        let k_eff = w
            .checked_sub(d.len())
            .filter(|&m| m <= self.coloring.k)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "received {} bits for a {w}-bit word with k={}",
                    d.len(),
                    self.coloring.k
                ))
            })?;
        if hash.len() != self.hash_len(w) {
            return Err(Error::invalid(format!(
                "hash has {} bits, expected {}",
                hash.len(),
                self.hash_len(w)
            )));
        }
        if k_eff == 0 {
            return Ok(d.clone());
        }
        let wl = self.word_len();
        if k_eff > wl {
            return Err(Error::invalid("more deletions than bits per block"));
        }
        let blocks = self.block_count(w);
        let width = self.coloring.color_width;
        let mut padded = d.as_slice().to_vec();
        padded.resize(blocks * wl - k_eff, false);

        let mut out = Vec::with_capacity(blocks * wl);
        for i in 0..blocks {
            let want = hash.slice(i * width..(i + 1) * width).to_u64()? as u32;
            let slice = BitSeq::from_bits(padded[i * wl..(i + 1) * wl - k_eff].to_vec());
            let mut found: Option<u32> = None;
            let mut ambiguous = false;
            for_each_supersequence(&slice, k_eff, |cand| {
                let word = cand.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
                if self.coloring.color_of(word) == want {
                    match found {
                        None => found = Some(word),
                        Some(prev) if prev != word => ambiguous = true,
                        _ => {}
                    }
                }
            });
            if ambiguous {
                return Err(Error::decode(format!("block {} matches several words", i + 1)));
            }
            let word = found.ok_or_else(|| Error::decode(format!("no word matches the hash of block {}", i + 1)))?;
            out.extend((0..wl).rev().map(|j| (word >> j) & 1 == 1));
        }
        if out[w..].iter().any(|&b| b) {
            return Err(Error::decode("nonzero padding in the last block"));
        }
        out.truncate(w);
        Ok(BitSeq::from_bits(out))
    }
}

/// `H(c)` with blocks of `⌈log₂ n⌉` bits.
pub fn hash_h(c: &BitSeq, n: usize, k: usize) -> Result<BitSeq> {
    SmallBlockHash::new(n, k)?.hash(c)
}

/// Inverse of [`hash_h`] given a subsequence of the hashed word.
pub fn decode_h(d: &BitSeq, hash: &BitSeq, w: usize, n: usize, k: usize) -> Result<BitSeq> {
    SmallBlockHash::new(n, k)?.decode(d, hash, w)
}
