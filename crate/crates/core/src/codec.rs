//! The encoder `E` and decoder `D`.
//!
//! `E(c) = T(c) ‖ r ‖ p ‖ Hash_k(T(c)) ‖ Rep_{k+1}(H(R′))`, where `p` is the
//! separating modulus of `T(c)`, `r` the residue of its packed moment hash,
//! and `R′ = r ‖ p ‖ Hash_k(T(c))`. The decoder recovers the fields from the
//! back: the repetition code gives `H(R′)`, which gives `R′`, whose residue
//! pins down the synchronization vector of `T(c)`, which with `Hash_k` gives
//! `T(c)` and hence `c`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use serde::Serialize;

use crate::bitseq::{is_subsequence, BitSeq};
use crate::dense_hash::{field_degree, BlockBound, DenseHash};
use crate::error::{Error, Phase, Result};
use crate::moment::{find_modulus, recover_sync_vector, MomentTables, ResidueHash};
use crate::rs::GaloisField;
use crate::small_hash::{build_coloring, SmallBlockHash};
use crate::syncvec::{ceil_log2, SyncParams};
use crate::transform::DenseTransform;

/// Largest supported message length.
pub const MAX_MESSAGE_LEN: usize = 1 << 20;

/// Bit widths and offsets of every codeword field for one `(n, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeLayout {
    pub n: usize,
    pub k: usize,
    pub block_bound: BlockBound,
    /// Length of `T(c)`.
    pub n_t: usize,
    /// `B` for sequences of length `n`.
    pub run_window: usize,
    /// `R` for sequences of length `n`.
    pub quiet_window: usize,
    /// `L` for sequences of length `n`.
    pub max_gap: usize,
    /// Bits per small-hash block, `⌈log₂ n_T⌉`.
    pub block_len: usize,
    pub color_count: usize,
    pub color_width: usize,
    pub field_degree: u32,
    /// Longest block covered by one Reed–Solomon symbol.
    pub max_block: usize,
    pub symbol_width: usize,
    /// Width of the residue field and of the modulus field.
    pub w_p: usize,
    pub w_hashk: usize,
    /// `2·w_p + w_hashk`.
    pub n1: usize,
    /// Width of `H(R′)`.
    pub w_hr: usize,
    /// `(k + 1)·w_hr`.
    pub n2: usize,
    /// Codeword length `n_T + n1 + n2`.
    pub total: usize,
    pub redundancy: usize,
}

impl CodeLayout {
    pub fn new(n: usize, k: usize, bound: BlockBound) -> Result<Self> {
        Ok(Parts::build(n, k, bound)?.layout)
    }

    /// Sum of the declared field widths beyond the message, `n_T - n + n1 + n2`.
    pub fn field_width_sum(&self) -> usize {
        (self.n_t - self.n) + 2 * self.w_p + self.w_hashk + self.n2
    }

    /// 0-indexed start of the residue field.
    pub fn residue_offset(&self) -> usize {
        self.n_t
    }

    pub fn modulus_offset(&self) -> usize {
        self.n_t + self.w_p
    }

    pub fn hashk_offset(&self) -> usize {
        self.n_t + 2 * self.w_p
    }

    pub fn repetition_offset(&self) -> usize {
        self.n_t + self.n1
    }
}

/// `make_layout` with the default block bound.
pub fn make_layout(n: usize, k: usize) -> Result<CodeLayout> {
    CodeLayout::new(n, k, BlockBound::default())
}

/// Residue/modulus field width from the divisor bound of the largest packed
/// moment value `X` and the deletion-ball size `2·n_T^{2k}`:
/// `⌈log₂(2·n_T^{2k}) + 1.6·ln X / ln ln X⌉ + 1`.
pub fn residue_width(n_t: usize, k: usize) -> usize {
    let (nt, kf) = (n_t as f64, k as f64);
    let ln_x = (6.0 * kf + 1.0) * (3.0 * kf).ln() + (3.0 * kf + 1.0) * (6.0 * kf + 1.0) * nt.ln();
    let ball = 1.0 + 2.0 * kf * nt.log2();
    (ball + 1.6 * ln_x / ln_x.ln()).ceil() as usize + 1
}

struct Parts {
    layout: CodeLayout,
    small: SmallBlockHash,
    dense: DenseHash,
    transform: DenseTransform,
}

impl Parts {
    fn build(n: usize, k: usize, bound: BlockBound) -> Result<Self> {
        if k == 0 || n <= k {
            return Err(Error::invalid(format!("need n > k >= 1, got n={n}, k={k}")));
        }
        if n > MAX_MESSAGE_LEN {
            return Err(Error::invalid(format!("n={n} exceeds the supported maximum {MAX_MESSAGE_LEN}")));
        }
        let transform = DenseTransform::new(n, k)?;
        let n_t = transform.layout().t_out_len;
        let block_len = ceil_log2(n_t as u64) as usize;
        let coloring = Arc::new(build_coloring(block_len, k)?);
        let small = SmallBlockHash::from_coloring(coloring.clone());
        let field = Arc::new(GaloisField::new(field_degree(n_t, k))?);
        let dense = DenseHash::new(n_t, k, bound, small.clone(), field.clone())?;
        let w_p = residue_width(n_t, k);
        let w_hashk = dense.hash_len();
        let n1 = 2 * w_p + w_hashk;
        let w_hr = small.hash_len(n1);
        let n2 = (k + 1) * w_hr;
        let total = n_t + n1 + n2;
        let params = transform.params();
        let layout = CodeLayout {
            n,
            k,
            block_bound: bound,
            n_t,
            run_window: params.run_window,
            quiet_window: params.quiet_window,
            max_gap: params.max_gap,
            block_len,
            color_count: coloring.color_count(),
            color_width: coloring.color_width(),
            field_degree: field.degree(),
            max_block: dense.max_block(),
            symbol_width: dense.symbol_width(),
            w_p,
            w_hashk,
            n1,
            w_hr,
            n2,
            total,
            redundancy: total - n,
        };
        Ok(Self {
            layout,
            small,
            dense,
            transform,
        })
    }
}

/// Each bit repeated `k + 1` times in place.
pub fn rep_encode(bits: &BitSeq, k: usize) -> BitSeq {
    BitSeq::from_bits(bits.iter().flat_map(|b| std::iter::repeat_n(b, k + 1)).collect())
}

/// Bit `j` of the original is received bit `j·(k + 1)`, which stays inside
/// the `j`-th repetition block under at most `k` deletions.
pub fn rep_decode(received: &BitSeq, original_len: usize, k: usize) -> Result<BitSeq> {
    if original_len == 0 {
        return Ok(BitSeq::new());
    }
    let need = (original_len - 1) * (k + 1) + 1;
    if received.len() < need {
        return Err(Error::decode(format!(
            "repetition field has {} bits, need at least {need}",
            received.len()
        )));
    }
    Ok(BitSeq::from_bits(
        (0..original_len).map(|j| received.as_slice()[j * (k + 1)]).collect(),
    ))
}

/// An encoded message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub payload: BitSeq,
    pub layout: Arc<CodeLayout>,
}

/// Fields of a complete codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodewordFields {
    pub dense: BitSeq,
    pub residue: BitSeq,
    pub modulus: BitSeq,
    pub hash_k: BitSeq,
    pub repetition: BitSeq,
}

impl Codeword {
    pub fn fields(&self) -> CodewordFields {
        let l = &self.layout;
        let p = &self.payload;
        CodewordFields {
            dense: p.slice(0..l.n_t),
            residue: p.slice(l.residue_offset()..l.modulus_offset()),
            modulus: p.slice(l.modulus_offset()..l.hashk_offset()),
            hash_k: p.slice(l.hashk_offset()..l.repetition_offset()),
            repetition: p.slice(l.repetition_offset()..l.total),
        }
    }
}

/// Encoder and decoder for one `(n, k)`.
#[derive(Debug)]
pub struct Codec {
    layout: Arc<CodeLayout>,
    small: SmallBlockHash,
    dense: DenseHash,
    transform: DenseTransform,
    moments: MomentTables,
    dense_params: SyncParams,
    moduli: Mutex<HashMap<BitSeq, ResidueHash>>,
}

impl Codec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        Self::with_bound(n, k, BlockBound::default())
    }

    pub fn with_bound(n: usize, k: usize, bound: BlockBound) -> Result<Self> {
        let parts = Parts::build(n, k, bound)?;
        let n_t = parts.layout.n_t;
        Ok(Self {
            moments: MomentTables::new(n_t, k)?,
            dense_params: SyncParams::new(n_t, k)?,
            layout: Arc::new(parts.layout),
            small: parts.small,
            dense: parts.dense,
            transform: parts.transform,
            moduli: Mutex::new(HashMap::new()),
        })
    }

    pub fn layout(&self) -> &CodeLayout {
        &self.layout
    }

    pub fn transform(&self) -> &DenseTransform {
        &self.transform
    }

    pub fn dense_hash(&self) -> &DenseHash {
        &self.dense
    }

    pub fn moment_tables(&self) -> &MomentTables {
        &self.moments
    }

    pub fn small_hash(&self) -> &SmallBlockHash {
        &self.small
    }

    /// Separating modulus and residue of a dense sequence, memoized.
    pub fn residue_hash(&self, t: &BitSeq) -> Result<ResidueHash> {
        if let Some(hit) = self.moduli.lock().expect("cache lock").get(t) {
            return Ok(hit.clone());
        }
        let r = find_modulus(t, &self.moments, &self.dense_params, self.layout.w_p)?;
        self.moduli.lock().expect("cache lock").insert(t.clone(), r.clone());
        Ok(r)
    }

    pub fn encode(&self, c: &BitSeq) -> Result<Codeword> {
        let l = &self.layout;
        if c.len() != l.n {
            return Err(Error::invalid(format!("expected {} message bits, got {}", l.n, c.len())));
        }
        let t = self.transform.t_encode(c)?;
        let rh = self.residue_hash(&t)?;
        let mut r1 = BitSeq::from_biguint(&rh.residue, l.w_p)?;
        r1.extend_from(&BitSeq::from_biguint(&rh.modulus, l.w_p)?);
        r1.extend_from(&self.dense.hash(&t)?);
        debug_assert_eq!(r1.len(), l.n1);
        let r2 = rep_encode(&self.small.hash(&r1)?, l.k);
        let payload = BitSeq::concat([&t, &r1, &r2]);
        debug_assert_eq!(payload.len(), l.total);
        Ok(Codeword {
            payload,
            layout: self.layout.clone(),
        })
    }

    /// Recovers the message from a codeword with at most `k` deletions.
    pub fn decode(&self, d: &BitSeq) -> Result<BitSeq> {
        let l = &self.layout;
        let missing = l
            .total
            .checked_sub(d.len())
            .filter(|&m| m <= l.k)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "received {} bits, expected between {} and {}",
                    d.len(),
                    l.total - l.k,
                    l.total
                ))
            })?;
        let rep_start = l.repetition_offset();
        let hr = rep_decode(&d.slice(rep_start..l.total - missing), l.w_hr, l.k).map_err(|e| e.in_phase(Phase::Repetition))?;

        let r1 = self
            .small
            .decode(&d.slice(l.n_t..l.n_t + l.n1 - missing), &hr, l.n1)
            .map_err(|e| e.in_phase(Phase::Redundancy))?;
        let residue = r1.slice(0..l.w_p).to_biguint();
        let modulus = r1.slice(l.w_p..2 * l.w_p).to_biguint();
        let hk = r1.slice(2 * l.w_p..l.n1);
        if modulus < BigUint::from(2u32) {
            return Err(Error::decode("modulus field below 2").in_phase(Phase::Redundancy));
        }
        if residue >= modulus {
            return Err(Error::decode("residue not below modulus").in_phase(Phase::Redundancy));
        }

        let prefix = d.slice(0..l.n_t - missing);
        let target = ResidueHash { residue, modulus };
        let sync = recover_sync_vector(&prefix, &target, &self.moments, &self.dense_params)
            .map_err(|e| e.in_phase(Phase::SyncVector))?;
        let t = self
            .dense
            .decode(&prefix, &sync, &hk)
            .map_err(|e| e.in_phase(Phase::DenseDecode))?;
        self.transform.t_decode(&t).map_err(|e| e.in_phase(Phase::Transform))
    }

    /// [`Codec::decode`] followed by re-encoding and a subsequence check.
    pub fn decode_verified(&self, d: &BitSeq) -> Result<BitSeq> {
        let c = self.decode(d)?;
        let again = self.encode(&c)?;
        if !is_subsequence(d, &again.payload) {
            return Err(Error::decode("re-encoded codeword does not contain the received word"));
        }
        Ok(c)
    }
}
