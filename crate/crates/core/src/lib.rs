//! Coded caching schemes built from placement delivery arrays (PDAs).
//!
//! * [`pda`]: the array type, its text format, validation, useful/useless
//!   star classification and the blanking reduction.
//! * [`constructions`]: the two subset-indexed PDA families and the
//!   `t`-subset baseline.
//! * [`mds`]: systematic erasure code over GF(2^16) used for coded placement.
//! * [`scheme`]: placement, XOR delivery and per-user decoding with
//!   bit-exact verification.
//! * [`analysis`]: closed-form scheme parameters, brute-force cross-checks
//!   and the rate/memory sweep.

pub mod analysis;
pub mod cli;
pub mod constructions;
pub mod gf;
pub mod mds;
pub mod pda;
pub mod scheme;
pub mod subsets;

pub use constructions::{construct, mn_pda, ConstructionParams, Rule};
pub use mds::MdsCodec;
pub use pda::{Entry, Pda, PdaError, PdaParams, StarClassification};
pub use scheme::{run_and_verify, Library, Mode, Request};

/// Exact non-negative rational used for rates and memory ratios.
pub type Rational = num_rational::Ratio<u128>;

/// Formats as `num/den` (or just `num` when the denominator is 1).
pub fn format_ratio(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `num/den` or a bare integer.
pub fn parse_ratio(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: u128 = n.trim().parse().ok()?;
            let d: u128 = d.trim().parse().ok()?;
            (d != 0).then(|| Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod ratio_str {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        crate::parse_ratio(&s).ok_or_else(|| de::Error::custom(format!("bad rational {s:?}")))
    }
}
