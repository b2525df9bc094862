//! Higher-order VT parity checks over synchronization vectors.
//!
//! A sequence `v` of length `n` is summarized by `6k + 1` moments
//! `v · m^(ℓ) mod 3k·n^(ℓ+1)`, where `m^(ℓ)_i = Σ_{j ≤ i} j^ℓ`. The moments are
//! packed into one integer by a mixed-radix map, and that integer is reduced
//! modulo the smallest `p` that separates a sequence's synchronization vector
//! from every other synchronization vector in its deletion ball.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::bitseq::{ball_size_bound, for_each_supersequence, visit_deletion_ball, BitSeq};
use crate::error::{Error, Result};
use crate::syncvec::{sync_bits, SyncParams};

/// Largest number of raw deletion-ball visits `find_modulus` will attempt.
pub const MODULUS_SEARCH_CAP: f64 = 5e9;

/// Entry `i` (0-indexed) is `Σ_{j=1}^{i+1} j^ℓ`.
pub fn moment_prefix(exponent: u32, n: usize) -> Vec<BigUint> {
    let mut acc = BigUint::zero();
    (1..=n)
        .map(|j| {
            acc += BigUint::from(j).pow(exponent);
            acc.clone()
        })
        .collect()
}

/// The `6k + 1` reduced moments of a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MomentHash {
    pub n: usize,
    pub k: usize,
    pub components: Vec<BigUint>,
}

/// `M(f(·)) mod p` together with `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ResidueHash {
    #[serde(serialize_with = "ser_big")]
    pub residue: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub modulus: BigUint,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Prefix-power tables, moduli and mixed-radix weights for one `(n, k)`.
#[derive(Debug, Clone)]
pub struct MomentTables {
    n: usize,
    k: usize,
    prefix: Vec<Vec<BigUint>>,
    moduli: Vec<BigUint>,
    radices: Vec<BigUint>,
    bound: BigUint,
}

impl MomentTables {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::invalid("moment tables need n >= 1 and k >= 1"));
        }
        let dims = 6 * k + 1;
        let prefix = (0..dims as u32).map(|l| moment_prefix(l, n)).collect();
        let three_k = BigUint::from(3 * k);
        let n_big = BigUint::from(n);
        let moduli: Vec<BigUint> = (0..dims as u32).map(|l| &three_k * n_big.pow(l + 1)).collect();
        let mut radices = Vec::with_capacity(dims);
        let mut weight = BigUint::one();
        for m in &moduli {
            radices.push(weight.clone());
            weight *= m;
        }
        Ok(Self {
            n,
            k,
            prefix,
            moduli,
            radices,
            bound: weight,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `3k·n^(e+1)` for each component `e`.
    pub fn moduli(&self) -> &[BigUint] {
        &self.moduli
    }

    /// Exclusive upper bound of packed values: `(3k)^(6k+1)·n^((3k+1)(6k+1))`.
    pub fn packed_bound(&self) -> &BigUint {
        &self.bound
    }

    pub fn hash(&self, v: &BitSeq) -> Result<MomentHash> {
        if v.len() != self.n {
            return Err(Error::invalid(format!("expected {} bits, got {}", self.n, v.len())));
        }
        Ok(self.hash_bits(v.as_slice()))
    }

    fn hash_bits(&self, v: &[bool]) -> MomentHash {
        let components = self
            .prefix
            .iter()
            .zip(&self.moduli)
            .map(|(table, modulus)| {
                let mut dot = BigUint::zero();
                for (i, &b) in v.iter().enumerate() {
                    if b {
                        dot += &table[i];
                    }
                }
                dot % modulus
            })
            .collect();
        MomentHash {
            n: self.n,
            k: self.k,
            components,
        }
    }

    pub fn pack(&self, f: &MomentHash) -> Result<BigUint> {
        if f.n != self.n || f.k != self.k || f.components.len() != self.moduli.len() {
            return Err(Error::invalid("moment hash does not match the tables' (n, k)"));
        }
        let mut acc = BigUint::zero();
        for ((v, m), w) in f.components.iter().zip(&self.moduli).zip(&self.radices) {
            if v >= m {
                return Err(Error::invalid("moment component out of range"));
            }
            acc += v * w;
        }
        Ok(acc)
    }

    pub fn unpack(&self, x: &BigUint) -> Result<MomentHash> {
        if x >= &self.bound {
            return Err(Error::invalid("packed value out of range"));
        }
        let mut rest = x.clone();
        let components = self
            .moduli
            .iter()
            .map(|m| {
                let digit = &rest % m;
                rest /= m;
                digit
            })
            .collect();
        Ok(MomentHash {
            n: self.n,
            k: self.k,
            components,
        })
    }

    /// `M(f(v))` for a raw bit slice of length `n`.
    pub(crate) fn packed_bits(&self, v: &[bool]) -> BigUint {
        let f = self.hash_bits(v);
        f.components
            .iter()
            .zip(&self.radices)
            .fold(BigUint::zero(), |acc, (c, w)| acc + c * w)
    }
}

/// `f(v)` for a length-`n` sequence.
pub fn f_hash(v: &BitSeq, k: usize) -> Result<MomentHash> {
    MomentTables::new(v.len(), k)?.hash(v)
}

/// Mixed-radix packing `Σ_e v_e Π_{i<e} 3k·n^(i+1)`.
pub fn m_pack(f: &MomentHash) -> Result<BigUint> {
    MomentTables::new(f.n, f.k)?.pack(f)
}

pub fn m_unpack(x: &BigUint, n: usize, k: usize) -> Result<MomentHash> {
    MomentTables::new(n, k)?.unpack(x)
}

/// Finds the smallest `p >= 2` that divides none of the nonzero differences
/// `M(f(sync(c'))) - M(f(sync(c)))` over `c' ∈ B_k(c)`, and returns
/// `M(f(sync(c))) mod p` with it. `p` must stay below `2^max_width`.
pub fn find_modulus(c: &BitSeq, tables: &MomentTables, params: &SyncParams, max_width: usize) -> Result<ResidueHash> {
    let n = tables.n();
    if c.len() != n {
        return Err(Error::invalid(format!("expected {n} bits, got {}", c.len())));
    }
    let k = params.k;
    if ball_size_bound(n, k) > MODULUS_SEARCH_CAP {
        return Err(Error::CapacityExceeded(format!(
            "deletion ball of a {n}-bit sequence with k={k} is too large to enumerate"
        )));
    }
    let own_sync = sync_bits(c.as_slice(), k, params.run_len);
    let mut syncs: HashSet<Vec<bool>> = HashSet::new();
    visit_deletion_ball(c, k, |t| {
        let s = sync_bits(t, k, params.run_len);
        if s != own_sync {
            syncs.insert(s);
        }
    })?;

    let own = tables.packed_bits(&own_sync);
    let mut deltas: Vec<BigUint> = syncs
        .iter()
        .map(|s| {
            let m = tables.packed_bits(s);
            if m >= own {
                m - &own
            } else {
                &own - m
            }
        })
        .filter(|d| !d.is_zero())
        .collect();
    deltas.sort();
    deltas.dedup();

    let limit: u128 = if max_width >= 127 { u128::MAX } else { 1u128 << max_width };
    let mut p: u64 = 2;
    loop {
        if (p as u128) >= limit || p == u64::MAX {
            return Err(Error::CapacityExceeded(format!(
                "no separating modulus below 2^{max_width}"
            )));
        }
        if deltas.iter().all(|d| !(d % p).is_zero()) {
            break;
        }
        p += 1;
    }
    let modulus = BigUint::from(p);
    Ok(ResidueHash {
        residue: &own % &modulus,
        modulus,
    })
}

/// Recovers `sync(c)` from a subsequence `d` of `c` and the residue hash of `c`.
///
/// Candidates are the supersequences of `d` of length `n`, visited in the
/// order of [`for_each_supersequence`]; the first whose synchronization vector
/// matches the residue is returned. Fewer than `k` deletions are accepted.
pub fn recover_sync_vector(
    d: &BitSeq,
    target: &ResidueHash,
    tables: &MomentTables,
    params: &SyncParams,
) -> Result<BitSeq> {
    let n = tables.n();
    if d.len() > n || n - d.len() > params.k {
        return Err(Error::invalid(format!(
            "received {} bits, expected between {} and {n}",
            d.len(),
            n.saturating_sub(params.k)
        )));
    }
    if target.modulus < BigUint::from(2u32) {
        return Err(Error::decode("modulus must be at least 2"));
    }
    let missing = n - d.len();
    let mut verdicts: HashMap<Vec<bool>, bool> = HashMap::new();
    let mut found: Option<Vec<bool>> = None;
    for_each_supersequence(d, missing, |cand| {
        if found.is_some() {
            return;
        }
        let s = sync_bits(cand, params.k, params.run_len);
        let hit = *verdicts
            .entry(s.clone())
            .or_insert_with(|| tables.packed_bits(&s) % &target.modulus == target.residue);
        if hit {
            found = Some(s);
        }
    });
    found
        .map(BitSeq::from_bits)
        .ok_or_else(|| Error::decode("no candidate matches the synchronization residue"))
}

/// Modulus value as `u64`, when it fits.
pub fn modulus_u64(r: &ResidueHash) -> Option<u64> {
    r.modulus.to_u64()
}
