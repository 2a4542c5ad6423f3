//! End-to-end model of a `(K, M, N)` caching system driven by a PDA.
//!
//! Placement caches packet `j` of every file at user `k` whenever
//! `p[j][k]` is a star. In uncoded mode each file is split into `F` packets.
//! In coded mode the array carries `Z'` blanks per column, each file is split
//! into `F - Z'` packets and expanded to `F` packets by an `(F, F - Z')` MDS
//! code; row `j` of the array then refers to coded packet `j`.
//!
//! Delivery is the same in both modes: slot `s` broadcasts the XOR of packet
//! `(d_k, j)` over every `p[j][k] = s`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mds::{MdsCodec, MdsError, Packet};
use crate::pda::{Entry, Pda, PdaError, PdaParams, Pos};
use crate::Rational;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Pda(#[from] PdaError),
    #[error(transparent)]
    Mds(#[from] MdsError),
    #[error("library needs at least one file")]
    NoFiles,
    #[error("files must be non-empty")]
    EmptyFile,
    #[error("file {index} has length {len}, expected {expected}")]
    UnequalFiles {
        index: usize,
        len: usize,
        expected: usize,
    },
    #[error("request has {got} entries but the array has {users} users")]
    RequestLength { got: usize, users: usize },
    #[error("user {user} requests file {file}, library has {files}")]
    UnknownFile {
        user: usize,
        file: usize,
        files: usize,
    },
    #[error("worst-case request needs N >= K distinct files (N = {files}, K = {users})")]
    NotEnoughFiles { files: usize, users: usize },
    #[error("user {user} is missing side packet ({file}, {row}) for slot {slot}")]
    MissingSidePacket {
        user: usize,
        file: usize,
        row: usize,
        slot: usize,
    },
    #[error("user {user} collected {have} packets, needs {need}")]
    InsufficientPackets {
        user: usize,
        have: usize,
        need: usize,
    },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// `N` equal-length files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Library {
    files: Vec<Vec<u8>>,
}

impl Library {
    pub fn new(files: Vec<Vec<u8>>) -> Result<Self, SimError> {
        let expected = files.first().ok_or(SimError::NoFiles)?.len();
        if expected == 0 {
            return Err(SimError::EmptyFile);
        }
        if let Some((index, f)) = files.iter().enumerate().find(|(_, f)| f.len() != expected) {
            return Err(SimError::UnequalFiles {
                index,
                len: f.len(),
                expected,
            });
        }
        Ok(Library { files })
    }

    /// Pseudorandom contents, reproducible from `seed`.
    pub fn random(n_files: usize, file_len: usize, seed: u64) -> Result<Self, SimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let files = (0..n_files)
            .map(|_| {
                let mut f = vec![0u8; file_len];
                rng.fill_bytes(&mut f);
                f
            })
            .collect();
        Library::new(files)
    }

    /// Every regular file in `dir`, sorted by name.
    pub fn from_dir(dir: &Path) -> Result<Self, SimError> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        paths.sort();
        let files = paths
            .iter()
            .map(std::fs::read)
            .collect::<Result<Vec<_>, _>>()?;
        Library::new(files)
    }

    pub fn n_files(&self) -> usize {
        self.files.len()
    }

    pub fn file_len(&self) -> usize {
        self.files[0].len()
    }

    pub fn file(&self, index: usize) -> &[u8] {
        &self.files[index]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Uncoded,
    Coded,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Uncoded => "uncoded",
            Mode::Coded => "coded",
        })
    }
}

/// File index requested by each user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Request(Vec<usize>);

impl Request {
    pub fn new(demands: Vec<usize>, n_files: usize) -> Result<Self, SimError> {
        if let Some((user, &file)) = demands.iter().enumerate().find(|(_, &f)| f >= n_files) {
            return Err(SimError::UnknownFile {
                user,
                file,
                files: n_files,
            });
        }
        Ok(Request(demands))
    }

    /// `d = (0, 1, …, K-1)`, a worst-case demand; needs `N >= K`.
    pub fn identity(users: usize, n_files: usize) -> Result<Self, SimError> {
        if n_files < users {
            return Err(SimError::NotEnoughFiles {
                files: n_files,
                users,
            });
        }
        Ok(Request((0..users).collect()))
    }

    pub fn demands(&self) -> &[usize] {
        &self.0
    }

    pub fn is_distinct(&self) -> bool {
        let mut seen = self.0.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

/// Packets cached by one user, keyed by `(file, row)`.
pub type UserCache = BTreeMap<(usize, usize), Vec<u8>>;

/// Server and user state after placement.
#[derive(Debug, Clone)]
pub struct PlacementState {
    mode: Mode,
    pda: Pda,
    params: PdaParams,
    z_prime: usize,
    file_len: usize,
    packet_len: usize,
    codec: Option<MdsCodec>,
    /// `server[n][j]`: packet `j` (coded packet in coded mode) of file `n`.
    server: Vec<Vec<Vec<u8>>>,
    caches: Vec<UserCache>,
}

impl PlacementState {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn pda(&self) -> &Pda {
        &self.pda
    }

    /// `(K, F, Z, S)` with `Z` counting the stars left after reduction.
    pub fn params(&self) -> &PdaParams {
        &self.params
    }

    pub fn z_prime(&self) -> usize {
        self.z_prime
    }

    /// Packets each file is split into before coding: `F` or `F - Z'`.
    pub fn source_packets(&self) -> usize {
        self.params.f - self.z_prime
    }

    pub fn packet_len(&self) -> usize {
        self.packet_len
    }

    pub fn file_len(&self) -> usize {
        self.file_len
    }

    /// File length after padding to a whole number of source packets.
    pub fn padded_file_len(&self) -> usize {
        self.packet_len * self.source_packets()
    }

    pub fn cache(&self, user: usize) -> &UserCache {
        &self.caches[user]
    }

    pub fn cached_bytes(&self, user: usize) -> usize {
        self.caches[user].values().map(Vec::len).sum()
    }

    /// `Z/F` uncoded, `(Z - Z')/(F - Z')` coded.
    pub fn memory_ratio(&self) -> Rational {
        Rational::new(self.params.z as u128, self.source_packets() as u128)
    }

    /// `S/F` uncoded, `S/(F - Z')` coded.
    pub fn rate(&self) -> Rational {
        Rational::new(self.params.s as u128, self.source_packets() as u128)
    }
}

/// Splits every file into packets and fills the user caches.
pub fn place(pda: &Pda, library: &Library, mode: Mode) -> Result<PlacementState, SimError> {
    let (params, z_prime) = match mode {
        Mode::Uncoded => (pda.validate()?, 0),
        Mode::Coded => {
            let r = pda.validate_reduced()?;
            (r.params, r.z_prime)
        }
    };
    let f = params.f;
    let source_packets = f - z_prime;
    let codec = match mode {
        Mode::Uncoded => None,
        Mode::Coded => Some(MdsCodec::new(f, source_packets)?),
    };

    let file_len = library.file_len();
    let mut packet_len = file_len.div_ceil(source_packets);
    if z_prime >= 2 && packet_len % 2 == 1 {
        packet_len += 1;
    }

    let server: Vec<Vec<Vec<u8>>> = (0..library.n_files())
        .map(|n| {
            let mut padded = library.file(n).to_vec();
            padded.resize(packet_len * source_packets, 0);
            let pieces: Vec<&[u8]> = padded.chunks_exact(packet_len).collect();
            match &codec {
                None => Ok(pieces.iter().map(|p| p.to_vec()).collect()),
                Some(c) => Ok(c.encode(&pieces)?.into_iter().map(|p| p.payload).collect()),
            }
        })
        .collect::<Result<_, SimError>>()?;

    let caches = (0..pda.cols())
        .map(|k| {
            let mut cache = UserCache::new();
            for j in (0..f).filter(|&j| pda.get(j, k).is_star()) {
                for (n, packets) in server.iter().enumerate() {
                    cache.insert((n, j), packets[j].clone());
                }
            }
            cache
        })
        .collect();

    Ok(PlacementState {
        mode,
        pda: pda.clone(),
        params,
        z_prime,
        file_len,
        packet_len,
        codec,
        server,
        caches,
    })
}

/// One broadcast: the XOR of packet `(d_k, j)` over its contributors `(j, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signal {
    pub slot: usize,
    pub payload: Vec<u8>,
    /// `(row, user)` pairs in row-major order.
    pub contributors: Vec<Pos>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryTranscript {
    pub signals: Vec<Signal>,
}

impl DeliveryTranscript {
    /// Number of users served by each slot, in slot order.
    pub fn gains(&self) -> Vec<usize> {
        self.signals.iter().map(|s| s.contributors.len()).collect()
    }

    pub fn bytes_sent(&self) -> usize {
        self.signals.iter().map(|s| s.payload.len()).sum()
    }
}

fn check_request(state: &PlacementState, d: &Request) -> Result<(), SimError> {
    let users = state.pda.cols();
    if d.demands().len() != users {
        return Err(SimError::RequestLength {
            got: d.demands().len(),
            users,
        });
    }
    let files = state.server.len();
    if let Some((user, &file)) = d.demands().iter().enumerate().find(|(_, &f)| f >= files) {
        return Err(SimError::UnknownFile { user, file, files });
    }
    Ok(())
}

/// Builds the `S` broadcast signals for demand `d`, in slot order.
pub fn deliver(state: &PlacementState, d: &Request) -> Result<DeliveryTranscript, SimError> {
    check_request(state, d)?;
    let mut contributors: Vec<Vec<Pos>> = vec![Vec::new(); state.params.s];
    for ((j, k), e) in state.pda.cells() {
        if let Entry::Int(s) = e {
            contributors[s as usize].push((j, k));
        }
    }
    let signals = contributors
        .into_iter()
        .enumerate()
        .map(|(slot, contributors)| {
            let mut payload = vec![0u8; state.packet_len];
            for &(j, k) in &contributors {
                xor_into(&mut payload, &state.server[d.demands()[k]][j]);
            }
            Signal {
                slot,
                payload,
                contributors,
            }
        })
        .collect();
    Ok(DeliveryTranscript { signals })
}

fn xor_into(dst: &mut [u8], src: &[u8]) {
    dst.iter_mut().zip(src).for_each(|(a, b)| *a ^= b);
}

/// Reconstructs the file requested by `user` from its cache and the
/// transcript.
pub fn decode_user(
    state: &PlacementState,
    transcript: &DeliveryTranscript,
    d: &Request,
    user: usize,
) -> Result<Vec<u8>, SimError> {
    check_request(state, d)?;
    let demands = d.demands();
    let want = demands[user];
    let cache = &state.caches[user];

    let mut packets: BTreeMap<usize, Vec<u8>> = cache
        .range((want, 0)..(want + 1, 0))
        .map(|(&(_, j), p)| (j, p.clone()))
        .collect();

    for signal in &transcript.signals {
        let Some(&(row, _)) = signal.contributors.iter().find(|&&(_, k)| k == user) else {
            continue;
        };
        let mut payload = signal.payload.clone();
        for &(j, k) in &signal.contributors {
            if k == user {
                continue;
            }
            let side = cache
                .get(&(demands[k], j))
                .ok_or(SimError::MissingSidePacket {
                    user,
                    file: demands[k],
                    row: j,
                    slot: signal.slot,
                })?;
            xor_into(&mut payload, side);
        }
        packets.insert(row, payload);
    }

    let need = state.source_packets();
    let mut file = match &state.codec {
        None => {
            if packets.len() < state.params.f {
                return Err(SimError::InsufficientPackets {
                    user,
                    have: packets.len(),
                    need: state.params.f,
                });
            }
            packets.into_values().flatten().collect::<Vec<u8>>()
        }
        Some(codec) => {
            if packets.len() < need {
                return Err(SimError::InsufficientPackets {
                    user,
                    have: packets.len(),
                    need,
                });
            }
            let coded: Vec<Packet> = packets
                .into_iter()
                .map(|(index, payload)| Packet { index, payload })
                .collect();
            codec.decode(&coded)?.concat()
        }
    };
    file.truncate(state.file_len);
    Ok(file)
}

/// Outcome of one placement + delivery + decoding run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub ok: bool,
    pub mode: Mode,
    pub users: usize,
    pub files: usize,
    pub rows: usize,
    pub slots: usize,
    pub stars_per_user: usize,
    pub z_prime: usize,
    pub subpacketization: usize,
    #[serde(with = "crate::ratio_str")]
    pub memory_ratio: Rational,
    #[serde(with = "crate::ratio_str")]
    pub rate: Rational,
    pub file_len: usize,
    pub padded_file_len: usize,
    pub packet_len: usize,
    pub bytes_sent: usize,
    pub distinct_request: bool,
    pub failed_users: Vec<usize>,
}

pub fn run_and_verify(
    pda: &Pda,
    library: &Library,
    d: &Request,
    mode: Mode,
) -> Result<Report, SimError> {
    let state = place(pda, library, mode)?;
    let transcript = deliver(&state, d)?;
    let mut failed_users = Vec::new();
    for user in 0..pda.cols() {
        let got = decode_user(&state, &transcript, d, user)?;
        if got != library.file(d.demands()[user]) {
            failed_users.push(user);
        }
    }
    Ok(Report {
        ok: failed_users.is_empty(),
        mode,
        users: pda.cols(),
        files: library.n_files(),
        rows: state.params.f,
        slots: state.params.s,
        stars_per_user: state.params.z,
        z_prime: state.z_prime,
        subpacketization: state.source_packets(),
        memory_ratio: state.memory_ratio(),
        rate: state.rate(),
        file_len: state.file_len,
        padded_file_len: state.padded_file_len(),
        packet_len: state.packet_len,
        bytes_sent: transcript.bytes_sent(),
        distinct_request: d.is_distinct(),
        failed_users,
    })
}
