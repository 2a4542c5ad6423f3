//! Systematic `(n, k)` MDS erasure code over GF(2^16).
//!
//! The generator is `[I_k ; P]` with `P = V_bot · V_top^{-1}`, where `V` is the
//! `n x k` Vandermonde matrix on the points `0, 1, …, n-1`. Any `k` rows of
//! `V` are independent, so any `k` coded packets determine the source. With a
//! single parity packet the parity row is all ones, i.e. the parity is the XOR
//! of the sources.
//!
//! Payloads are read as little-endian 16-bit symbols, so codes with two or
//! more parity packets need even payload lengths. Callers pad.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::gf::{self, Gf16};

/// Largest supported codeword length.
pub const MAX_N: usize = (1 << 16) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MdsError {
    #[error("invalid code parameters (n = {n}, k = {k}); need 1 <= k <= n <= {MAX_N}")]
    InvalidParams { n: usize, k: usize },
    #[error("expected {expected} source payloads, got {got}")]
    SourceCount { expected: usize, got: usize },
    #[error("payload {index} has length {len}, expected {expected}")]
    LengthMismatch {
        index: usize,
        len: usize,
        expected: usize,
    },
    #[error("payload length {0} is odd; multi-parity codes work on 16-bit symbols")]
    OddLength(usize),
    #[error("need at least {need} packets, got {got}")]
    TooFewPackets { need: usize, got: usize },
    #[error("packet index {0} given twice")]
    DuplicateIndex(usize),
    #[error("packet index {index} outside [0, {n})")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("decoding matrix is singular")]
    Singular,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub index: usize,
    pub payload: Vec<u8>,
}

/// An immutable systematic code instance.
#[derive(Debug, Clone)]
pub struct MdsCodec {
    n: usize,
    k: usize,
    /// `(n - k) x k` parity coefficients.
    parity: Vec<Vec<Gf16>>,
}

impl MdsCodec {
    pub fn new(n: usize, k: usize) -> Result<Self, MdsError> {
        if k == 0 || k > n || n > MAX_N {
            return Err(MdsError::InvalidParams { n, k });
        }
        let parity = match n - k {
            0 => Vec::new(),
            1 => vec![vec![Gf16::ONE; k]],
            _ => vandermonde_parity(n, k)?,
        };
        Ok(MdsCodec { n, k, parity })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Coefficient of source `j` in coded packet `i`.
    pub fn coefficient(&self, i: usize, j: usize) -> Gf16 {
        if i < self.k {
            if i == j {
                Gf16::ONE
            } else {
                Gf16::ZERO
            }
        } else {
            self.parity[i - self.k][j]
        }
    }

    fn needs_symbols(&self) -> bool {
        self.n - self.k >= 2
    }

    fn check_len(&self, len: usize) -> Result<(), MdsError> {
        if self.needs_symbols() && len % 2 != 0 {
            return Err(MdsError::OddLength(len));
        }
        Ok(())
    }

    /// Encodes `k` equal-length payloads into `n` packets; the first `k` are
    /// the sources verbatim.
    pub fn encode<T: AsRef<[u8]>>(&self, source: &[T]) -> Result<Vec<Packet>, MdsError> {
        if source.len() != self.k {
            return Err(MdsError::SourceCount {
                expected: self.k,
                got: source.len(),
            });
        }
        let len = source[0].as_ref().len();
        for (index, s) in source.iter().enumerate() {
            if s.as_ref().len() != len {
                return Err(MdsError::LengthMismatch {
                    index,
                    len: s.as_ref().len(),
                    expected: len,
                });
            }
        }
        self.check_len(len)?;

        let mut out: Vec<Packet> = source
            .iter()
            .enumerate()
            .map(|(index, s)| Packet {
                index,
                payload: s.as_ref().to_vec(),
            })
            .collect();
        for (p, row) in self.parity.iter().enumerate() {
            let mut payload = vec![0u8; len];
            for (s, &c) in source.iter().zip(row) {
                gf::mul_add_into(&mut payload, s.as_ref(), c);
            }
            out.push(Packet {
                index: self.k + p,
                payload,
            });
        }
        Ok(out)
    }

    /// Recovers the `k` source payloads from any `k` or more distinct packets.
    pub fn decode(&self, packets: &[Packet]) -> Result<Vec<Vec<u8>>, MdsError> {
        let mut by_index: BTreeMap<usize, &[u8]> = BTreeMap::new();
        for p in packets {
            if p.index >= self.n {
                return Err(MdsError::IndexOutOfRange {
                    index: p.index,
                    n: self.n,
                });
            }
            if by_index.insert(p.index, &p.payload).is_some() {
                return Err(MdsError::DuplicateIndex(p.index));
            }
        }
        if by_index.len() < self.k {
            return Err(MdsError::TooFewPackets {
                need: self.k,
                got: by_index.len(),
            });
        }
        let len = by_index.values().next().map_or(0, |p| p.len());
        for (&index, p) in &by_index {
            if p.len() != len {
                return Err(MdsError::LengthMismatch {
                    index,
                    len: p.len(),
                    expected: len,
                });
            }
        }
        self.check_len(len)?;

        let mut source: Vec<Option<Vec<u8>>> = (0..self.k)
            .map(|j| by_index.get(&j).map(|p| p.to_vec()))
            .collect();
        let missing: Vec<usize> = (0..self.k).filter(|&j| source[j].is_none()).collect();
        if missing.is_empty() {
            return Ok(source.into_iter().flatten().collect());
        }

        let parity_rows: Vec<usize> = by_index
            .keys()
            .copied()
            .filter(|&i| i >= self.k)
            .take(missing.len())
            .collect();

        // For each chosen parity packet, strip the known sources; what is
        // left is a combination of the missing ones only.
        let mut rhs: Vec<Vec<u8>> = Vec::with_capacity(parity_rows.len());
        let mut system: Vec<Vec<Gf16>> = Vec::with_capacity(parity_rows.len());
        for &i in &parity_rows {
            let mut acc = by_index[&i].to_vec();
            for (j, s) in source.iter().enumerate() {
                if let Some(s) = s {
                    gf::mul_add_into(&mut acc, s, self.coefficient(i, j));
                }
            }
            rhs.push(acc);
            system.push(missing.iter().map(|&j| self.coefficient(i, j)).collect());
        }
        let inv = gf::invert(system).ok_or(MdsError::Singular)?;
        for (m, &j) in missing.iter().enumerate() {
            let mut out = vec![0u8; len];
            for (r, row) in rhs.iter().enumerate() {
                gf::mul_add_into(&mut out, row, inv[m][r]);
            }
            source[j] = Some(out);
        }
        Ok(source.into_iter().flatten().collect())
    }
}

fn vandermonde_parity(n: usize, k: usize) -> Result<Vec<Vec<Gf16>>, MdsError> {
    let point = |i: usize| Gf16(i as u16);
    let top: Vec<Vec<Gf16>> = (0..k)
        .map(|i| (0..k).map(|j| point(i).pow(j)).collect())
        .collect();
    let top_inv = gf::invert(top).ok_or(MdsError::Singular)?;
    Ok((k..n)
        .map(|i| {
            let v: Vec<Gf16> = (0..k).map(|j| point(i).pow(j)).collect();
            (0..k)
                .map(|c| {
                    v.iter()
                        .zip(&top_inv)
                        .fold(Gf16::ZERO, |acc, (&a, row)| acc + a * row[c])
                })
                .collect()
        })
        .collect())
}
