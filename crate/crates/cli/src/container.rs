//! Binary container and 0/1 text formats.
//!
//! A container is the magic `KDEL1`, then `k` (u16), `n` (u32), `N` (u32)
//! and the payload bit count (u32), all big-endian, followed by the payload
//! packed MSB-first and zero-padded to a whole byte.

use kdel::BitSeq;

pub const MAGIC: &[u8; 5] = b"KDEL1";
const HEADER_LEN: usize = MAGIC.len() + 2 + 4 + 4 + 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub k: u16,
    pub n: u32,
    pub total: u32,
    pub payload: BitSeq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Message,
    Codeword,
    Received,
}

impl Container {
    pub fn role(&self) -> Option<Role> {
        let bits = self.payload.len() as u64;
        let (k, n, total) = (self.k as u64, self.n as u64, self.total as u64);
        if bits == total {
            Some(Role::Codeword)
        } else if bits < total && bits + k >= total {
            Some(Role::Received)
        } else if bits == n {
            Some(Role::Message)
        } else {
            None
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len().div_ceil(8));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.k.to_be_bytes());
        out.extend_from_slice(&self.n.to_be_bytes());
        out.extend_from_slice(&self.total.to_be_bytes());
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        for chunk in self.payload.as_slice().chunks(8) {
            let byte = chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)));
            out.push(byte);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, String> {
        if bytes.len() < HEADER_LEN || &bytes[..MAGIC.len()] != MAGIC {
            return Err("not a KDEL1 container or truncated header".into());
        }
        let be16 = |at: usize| u16::from_be_bytes([bytes[at], bytes[at + 1]]);
        let be32 = |at: usize| u32::from_be_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
        let k = be16(5);
        let n = be32(7);
        let total = be32(11);
        let bits = be32(15) as usize;
        let body = &bytes[HEADER_LEN..];
        if body.len() != bits.div_ceil(8) {
            return Err(format!(
                "container declares {bits} payload bits but carries {} bytes",
                body.len()
            ));
        }
        let payload: Vec<bool> = (0..bits).map(|i| (body[i / 8] >> (7 - i % 8)) & 1 == 1).collect();
        if !bits.is_multiple_of(8) && body[bits / 8] & (0xff >> (bits % 8)) != 0 {
            return Err("nonzero padding bits".into());
        }
        Ok(Self {
            k,
            n,
            total,
            payload: BitSeq::from_bits(payload),
        })
    }
}

/// Contiguous `0`/`1` characters; whitespace is ignored.
pub fn parse_text(bytes: &[u8]) -> Result<BitSeq, String> {
    bytes
        .iter()
        .filter(|b| !b.is_ascii_whitespace())
        .map(|&b| match b {
            b'0' => Ok(false),
            b'1' => Ok(true),
            other => Err(format!("unexpected byte {other:#04x} in 0/1 text")),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(BitSeq::from_bits)
}

pub fn to_text(bits: &BitSeq) -> String {
    format!("{bits}\n")
}

/// A parsed input file: either a container or bare bits.
pub enum Input {
    Container(Container),
    Bits(BitSeq),
}

impl Input {
    pub fn parse(bytes: &[u8]) -> Result<Self, String> {
        if bytes.starts_with(MAGIC) {
            Container::from_bytes(bytes).map(Input::Container)
        } else {
            parse_text(bytes).map(Input::Bits)
        }
    }
}
