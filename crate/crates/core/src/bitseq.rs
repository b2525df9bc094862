//! Bit sequences and the combinatorics of deletions and insertions on them.
//!
//! Positions exposed through [`BitSeq::at`] and [`delete_positions`] are
//! 1-indexed; slices and iterators use ordinary 0-indexed Rust ranges.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Default upper bound on the number of distinct members a materialized
/// deletion ball may hold.
pub const DEFAULT_BALL_CAP: usize = 20_000_000;

/// An immutable-by-convention sequence of bits.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSeq {
    bits: Vec<bool>,
}

impl BitSeq {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn ones(len: usize) -> Self {
        Self { bits: vec![true; len] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Builds a sequence from 0/1 integers; anything nonzero counts as 1.
    pub fn from_u8s(bits: &[u8]) -> Self {
        Self {
            bits: bits.iter().map(|&b| b != 0).collect(),
        }
    }

    /// Fixed-width big-endian representation of `value`.
    pub fn from_uint(value: u64, width: usize) -> Result<Self> {
        if width < 64 && value >> width != 0 {
            return Err(Error::invalid(format!("{value} does not fit in {width} bits")));
        }
        let bits = (0..width)
            .rev()
            .map(|i| i < 64 && (value >> i) & 1 == 1)
            .collect();
        Ok(Self { bits })
    }

    /// Fixed-width big-endian representation of an arbitrary-precision value.
    pub fn from_biguint(value: &BigUint, width: usize) -> Result<Self> {
        if value.bits() > width as u64 {
            return Err(Error::invalid(format!(
                "value of {} bits does not fit in {width} bits",
                value.bits()
            )));
        }
        let bits = (0..width as u64).rev().map(|i| value.bit(i)).collect();
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit at 1-indexed position `p`, or `None` when out of range.
    pub fn at(&self, p: usize) -> Option<bool> {
        if p == 0 {
            None
        } else {
            self.bits.get(p - 1).copied()
        }
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Sub-sequence over a 0-indexed range.
    pub fn slice(&self, range: Range<usize>) -> BitSeq {
        BitSeq::from_bits(self.bits[range].to_vec())
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a BitSeq>) -> BitSeq {
        let mut bits = Vec::new();
        for p in parts {
            bits.extend_from_slice(&p.bits);
        }
        BitSeq { bits }
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitSeq) {
        self.bits.extend_from_slice(&other.bits);
    }

    /// Big-endian value of the whole sequence; fails beyond 64 bits.
    pub fn to_u64(&self) -> Result<u64> {
        bits_to_u64(&self.bits)
    }

    pub fn to_biguint(&self) -> BigUint {
        let mut v = BigUint::zero();
        for &b in &self.bits {
            v <<= 1u32;
            if b {
                v += 1u32;
            }
        }
        v
    }
}

pub(crate) fn bits_to_u64(bits: &[bool]) -> Result<u64> {
    if bits.len() > 64 {
        return Err(Error::invalid("more than 64 bits"));
    }
    Ok(bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSeq({self})")
    }
}

impl FromStr for BitSeq {
    type Err = Error;

    /// Parses contiguous '0'/'1' characters; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                c => return Err(Error::invalid(format!("unexpected character {c:?} in bit string"))),
            }
        }
        Ok(BitSeq { bits })
    }
}

impl From<Vec<bool>> for BitSeq {
    fn from(bits: Vec<bool>) -> Self {
        BitSeq { bits }
    }
}

/// Removes the bits at the given strictly increasing 1-indexed positions.
pub fn delete_positions(s: &BitSeq, positions: &[usize]) -> Result<BitSeq> {
    let mut prev = 0usize;
    for &p in positions {
        if p == 0 || p > s.len() {
            return Err(Error::invalid(format!("position {p} out of range 1..={}", s.len())));
        }
        if p <= prev {
            return Err(Error::invalid("positions must be strictly increasing"));
        }
        prev = p;
    }
    let mut out = Vec::with_capacity(s.len() - positions.len());
    let mut next = positions.iter().peekable();
    for (i, &b) in s.bits.iter().enumerate() {
        if next.peek() == Some(&&(i + 1)) {
            next.next();
        } else {
            out.push(b);
        }
    }
    Ok(BitSeq::from_bits(out))
}

/// Greedy left-to-right embedding test.
pub fn is_subsequence(sub: &BitSeq, s: &BitSeq) -> bool {
    is_subsequence_bits(sub.as_slice(), s.as_slice())
}

pub(crate) fn is_subsequence_bits(sub: &[bool], s: &[bool]) -> bool {
    let mut it = s.iter();
    sub.iter().all(|b| it.any(|x| x == b))
}

/// Maximal runs as `(bit, length)` pairs.
pub fn runs(s: &BitSeq) -> Vec<(bool, usize)> {
    let mut out: Vec<(bool, usize)> = Vec::new();
    for &b in &s.bits {
        match out.last_mut() {
            Some((bit, len)) if *bit == b => *len += 1,
            _ => out.push((b, 1)),
        }
    }
    out
}

/// All distinct subsequences of length `|s| - k`.
pub fn subsequences_k(s: &BitSeq, k: usize) -> Result<BTreeSet<BitSeq>> {
    if k > s.len() {
        return Err(Error::invalid(format!("cannot delete {k} bits from {} bits", s.len())));
    }
    let mut level: BTreeSet<BitSeq> = BTreeSet::from([s.clone()]);
    for _ in 0..k {
        let mut next = BTreeSet::new();
        for t in &level {
            // Deleting any bit of a run gives the same result, so one per run.
            let mut i = 0;
            while i < t.len() {
                let mut bits = t.bits.clone();
                bits.remove(i);
                next.insert(BitSeq::from_bits(bits));
                let b = t.bits[i];
                while i < t.len() && t.bits[i] == b {
                    i += 1;
                }
            }
        }
        level = next;
    }
    Ok(level)
}

/// Calls `visit` once for every distinct length-`|s| + k` supersequence of `s`.
///
/// Each supersequence is generated from its leftmost embedding of `s`: the
/// gap before `s_p` may only hold copies of the complement of `s_p`, while the
/// tail after the last bit is unconstrained. Gaps are filled left to right
/// with ascending counts, and tails in ascending numeric order, which fixes the
/// visiting order.
pub fn for_each_supersequence(s: &BitSeq, k: usize, mut visit: impl FnMut(&[bool])) {
    let mut buf = Vec::with_capacity(s.len() + k);
    supersequence_rec(s.as_slice(), 0, k, &mut buf, &mut visit);
}

fn supersequence_rec(s: &[bool], pos: usize, remaining: usize, buf: &mut Vec<bool>, visit: &mut impl FnMut(&[bool])) {
    if pos == s.len() {
        let base = buf.len();
        for tail in 0..(1u64 << remaining) {
            buf.truncate(base);
            for i in (0..remaining).rev() {
                buf.push((tail >> i) & 1 == 1);
            }
            visit(buf);
        }
        buf.truncate(base);
        return;
    }
    let base = buf.len();
    let filler = !s[pos];
    for g in 0..=remaining {
        buf.truncate(base);
        buf.extend(std::iter::repeat_n(filler, g));
        buf.push(s[pos]);
        supersequence_rec(s, pos + 1, remaining - g, buf, visit);
    }
    buf.truncate(base);
}

/// All length-`|s| + k` sequences containing `s` as a subsequence.
pub fn supersequences_k(s: &BitSeq, k: usize) -> BTreeSet<BitSeq> {
    let mut out = BTreeSet::new();
    for_each_supersequence(s, k, |t| {
        out.insert(BitSeq::from_bits(t.to_vec()));
    });
    out
}

/// Upper bound `C(n,k)^2 * 2^k` on the size of a deletion ball.
pub fn ball_size_bound(n: usize, k: usize) -> f64 {
    let mut c = 1f64;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c * c * 2f64.powi(k as i32)
}

/// Visits every member of `B_k(s)`; members reachable in several ways are
/// visited several times.
pub fn visit_deletion_ball(s: &BitSeq, k: usize, mut visit: impl FnMut(&[bool])) -> Result<()> {
    for d in subsequences_k(s, k)? {
        for_each_supersequence(&d, k, &mut visit);
    }
    Ok(())
}

/// The deletion ball `B_k(s)`: every length-`|s|` sequence sharing a length
/// `|s| - k` subsequence with `s`.
pub fn deletion_ball(s: &BitSeq, k: usize) -> Result<BTreeSet<BitSeq>> {
    deletion_ball_capped(s, k, DEFAULT_BALL_CAP)
}

/// Like [`deletion_ball`] but fails once more than `cap` distinct members
/// have been collected.
pub fn deletion_ball_capped(s: &BitSeq, k: usize, cap: usize) -> Result<BTreeSet<BitSeq>> {
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut overflow = false;
    visit_deletion_ball(s, k, |t| {
        if overflow || seen.contains(t) {
            return;
        }
        if seen.len() == cap {
            overflow = true;
            return;
        }
        seen.insert(t.to_vec());
    })?;
    if overflow {
        return Err(Error::CapacityExceeded(format!(
            "deletion ball of a {}-bit sequence with k={k} exceeds {cap} members",
            s.len()
        )));
    }
    Ok(seen.into_iter().map(BitSeq::from_bits).collect())
}
