//! Closed-form parameters of the original and reduced schemes over
//! `(H, r, b, λ)`, brute-force cross-checks against constructed arrays, and
//! the rate-versus-memory sweep.
//!
//! With `c = r + b - 2λ` and `X = C(r, λ) C(H-r, b-λ)` integer entries per
//! column:
//!
//! | scheme   | F                                       | M/N         | R                                          |
//! |----------|-----------------------------------------|-------------|--------------------------------------------|
//! | original | `C(H,b)`                                | `1 - X/F`   | `C(H,c) min(C(H-c,λ), C(c,r-λ)) / F`       |
//! | new I    | `C(H,b) - Σ_{i<λ} C(r,i) C(H-r,b-i)`    | `1 - X/F`   | `C(H,c) C(H-c,λ) / F`                      |
//! | new II   | `C(H,b) - Σ_{i>λ} C(r,i) C(H-r,b-i)`    | `1 - X/F`   | `C(H,c) C(c,r-λ) / F`                      |

use std::fmt;
use std::io;

use serde::{Deserialize, Serialize};

use crate::constructions::{check_basic, construct, predicted_params, ConstructionParams, ParamError, Rule};
use crate::pda::PdaParams;
use crate::subsets::binomial;
use crate::{format_ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "original")]
    Original,
    #[serde(rename = "new_I")]
    NewI,
    #[serde(rename = "new_II")]
    NewII,
    /// Whichever of new I and new II has the smaller rate at the same point.
    #[serde(rename = "new")]
    New,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Original => "original",
            Scheme::NewI => "new_I",
            Scheme::NewII => "new_II",
            Scheme::New => "new",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeRecord {
    pub scheme: Scheme,
    pub h: u32,
    pub r: u32,
    pub b: u32,
    pub lambda: u32,
    pub k: u128,
    pub memory_ratio: Rational,
    pub rate: Rational,
    pub subpacketization: u128,
    /// The point fails `r + b - λ < H`, so the original scheme has no entry
    /// there to compare against.
    pub gap: bool,
    /// On the lower (Pareto) envelope of its scheme's curve.
    pub envelope: bool,
}

impl fmt::Display for SchemeRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "scheme={} H={} r={} b={} lambda={} K={} F={} M/N={} R={}",
            self.scheme,
            self.h,
            self.r,
            self.b,
            self.lambda,
            self.k,
            self.subpacketization,
            format_ratio(&self.memory_ratio),
            format_ratio(&self.rate)
        )
    }
}

fn c(n: u32, k: u32) -> u128 {
    binomial(n as i64, k as i64)
}

/// Integer entries per column, `C(r, λ) C(H-r, b-λ)`.
fn integers_per_column(h: u32, r: u32, b: u32, lambda: u32) -> u128 {
    binomial(r as i64, lambda as i64) * binomial(h as i64 - r as i64, b as i64 - lambda as i64)
}

/// Closed-form useless stars per column of the rule I or rule II array:
/// the rows meeting the column in fewer (rule I) or more (rule II) than `λ`
/// elements.
pub fn useless_per_column(h: u32, r: u32, b: u32, lambda: u32, rule: Rule) -> u128 {
    let term = |i: u32| c(r, i) * binomial(h as i64 - r as i64, b as i64 - i as i64);
    match rule {
        Rule::I => (0..lambda).map(term).sum(),
        Rule::II => (lambda + 1..=r).map(term).sum(),
    }
}

fn record(
    scheme: Scheme,
    (h, r, b, lambda): (u32, u32, u32, u32),
    f: u128,
    slots: u128,
) -> SchemeRecord {
    let x = integers_per_column(h, r, b, lambda);
    SchemeRecord {
        scheme,
        h,
        r,
        b,
        lambda,
        k: c(h, r),
        memory_ratio: Rational::new(f - x, f),
        rate: Rational::new(slots, f),
        subpacketization: f,
        gap: r + b - lambda >= h,
        envelope: false,
    }
}

/// Requires `r + b - λ < H` on top of the basic conditions.
pub fn original_params(h: u32, r: u32, b: u32, lambda: u32) -> Result<SchemeRecord, ParamError> {
    check_basic(h, r, b, lambda)?;
    if r + b - lambda >= h {
        return Err(ParamError::OriginalScheme {
            value: r + b - lambda,
            h,
        });
    }
    let u = r + b - 2 * lambda;
    let slots = c(h, u) * c(h - u, lambda).min(c(u, r - lambda));
    Ok(record(Scheme::Original, (h, r, b, lambda), c(h, b), slots))
}

/// Rule I array with its useless stars removed; requires `r + b <= H`.
pub fn new_params_i(h: u32, r: u32, b: u32, lambda: u32) -> Result<SchemeRecord, ParamError> {
    check_basic(h, r, b, lambda)?;
    if r + b > h {
        return Err(ParamError::RuleOneReduction { sum: r + b, h });
    }
    let u = r + b - 2 * lambda;
    let f = c(h, b) - useless_per_column(h, r, b, lambda, Rule::I);
    let slots = c(h, u) * c(h - u, lambda);
    Ok(record(Scheme::NewI, (h, r, b, lambda), f, slots))
}

/// Rule II array with its useless stars removed; requires `r + b <= H + λ`.
pub fn new_params_ii(h: u32, r: u32, b: u32, lambda: u32) -> Result<SchemeRecord, ParamError> {
    check_basic(h, r, b, lambda)?;
    if r + b > h + lambda {
        return Err(ParamError::Construction {
            sum: r + b,
            bound: h + lambda,
        });
    }
    let u = r + b - 2 * lambda;
    let f = c(h, b) - useless_per_column(h, r, b, lambda, Rule::II);
    let slots = c(h, u) * c(u, r - lambda);
    Ok(record(Scheme::NewII, (h, r, b, lambda), f, slots))
}

/// The reduced-scheme formula matching `params.rule`.
pub fn new_params(params: &ConstructionParams) -> Result<SchemeRecord, ParamError> {
    let ConstructionParams {
        h, r, b, lambda, ..
    } = *params;
    match params.rule {
        Rule::I => new_params_i(h, r, b, lambda),
        Rule::II => new_params_ii(h, r, b, lambda),
    }
}

/// Values measured on an actual array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measured {
    pub params: PdaParams,
    pub per_column_useless: Vec<usize>,
    pub z_prime: Option<usize>,
    pub subpacketization: u128,
    pub memory_ratio: Rational,
    pub rate: Rational,
}

#[derive(Debug, Clone)]
pub struct CrosscheckReport {
    pub params: ConstructionParams,
    pub predicted: PdaParams,
    pub expected_z_prime: u128,
    /// `None` when `params` lies outside the formula's own conditions.
    pub formula: Option<SchemeRecord>,
    pub measured: Measured,
    pub mismatches: Vec<String>,
}

impl CrosscheckReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Builds the array, measures `(K, F, Z, S)`, the per-column useless-star
/// counts and the reduced scheme, and compares each against its closed form.
pub fn crosscheck(params: &ConstructionParams) -> Result<CrosscheckReport, ParamError> {
    let predicted = predicted_params(params)?;
    let pda = construct(params)?;
    let mut mismatches = Vec::new();

    let observed = match pda.validate() {
        Ok(v) => v,
        Err(e) => {
            mismatches.push(format!("constructed array is not a PDA: {e}"));
            PdaParams {
                k: pda.cols(),
                f: pda.rows(),
                z: 0,
                s: pda.slot_count(),
                gain_profile: Vec::new(),
            }
        }
    };
    if observed != predicted {
        mismatches.push(format!(
            "array (K,F,Z,S) = ({},{},{},{}) but predicted ({},{},{},{}) or gain profiles differ",
            observed.k, observed.f, observed.z, observed.s, predicted.k, predicted.f, predicted.z, predicted.s
        ));
    }

    let expected_z_prime =
        useless_per_column(params.h, params.r, params.b, params.lambda, params.rule);
    let classes = pda.classify_stars();
    for (col, &n) in classes.per_column_useless.iter().enumerate() {
        if n as u128 != expected_z_prime {
            mismatches.push(format!(
                "column {col} has {n} useless stars, expected {expected_z_prime}"
            ));
        }
    }

    let (z_prime, reduced_params) = match pda.reduce().and_then(|(r, _)| r.validate_reduced()) {
        Ok(rp) => (Some(rp.z_prime), rp.params),
        Err(e) => {
            mismatches.push(format!("reduction failed: {e}"));
            (None, observed.clone())
        }
    };
    if reduced_params.gain_profile != observed.gain_profile {
        mismatches.push("reduction changed the gain profile".to_string());
    }
    let f_new = (reduced_params.f - z_prime.unwrap_or(0)) as u128;
    let measured = Measured {
        params: observed,
        per_column_useless: classes.per_column_useless,
        z_prime,
        subpacketization: f_new,
        memory_ratio: Rational::new(reduced_params.z as u128, f_new),
        rate: Rational::new(reduced_params.s as u128, f_new),
    };

    let formula = new_params(params).ok();
    if let Some(f) = &formula {
        if f.subpacketization != measured.subpacketization {
            mismatches.push(format!(
                "F' = {} from the array, {} from the formula",
                measured.subpacketization, f.subpacketization
            ));
        }
        if f.memory_ratio != measured.memory_ratio {
            mismatches.push(format!(
                "M/N = {} from the array, {} from the formula",
                format_ratio(&measured.memory_ratio),
                format_ratio(&f.memory_ratio)
            ));
        }
        if f.rate != measured.rate {
            mismatches.push(format!(
                "R = {} from the array, {} from the formula",
                format_ratio(&measured.rate),
                format_ratio(&f.rate)
            ));
        }
    }

    Ok(CrosscheckReport {
        params: *params,
        predicted,
        expected_z_prime,
        formula,
        measured,
        mismatches,
    })
}

/// All admissible `(H, r, b, λ, rule)` with `H` up to `max_h`.
pub fn admissible(max_h: u32) -> Vec<ConstructionParams> {
    let mut out = Vec::new();
    for h in 2..=max_h {
        for r in 1..h {
            for b in 1..h {
                for lambda in 1..r.min(b) {
                    for rule in [Rule::I, Rule::II] {
                        if let Ok(p) = ConstructionParams::new(h, r, b, lambda, rule) {
                            out.push(p);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Every scheme record over `(b, λ)` for fixed `H` and `r`, sorted by memory
/// ratio. A point enters a scheme's curve only if that scheme's conditions
/// hold; the `new` curve takes the smaller-rate reduced scheme per point.
pub fn sweep(h: u32, r: u32) -> Vec<SchemeRecord> {
    let mut out = Vec::new();
    for b in 1..h {
        for lambda in 1..r.min(b) {
            if let Ok(o) = original_params(h, r, b, lambda) {
                out.push(o);
            }
            let one = new_params_i(h, r, b, lambda).ok();
            let two = new_params_ii(h, r, b, lambda).ok();
            let best = match (&one, &two) {
                (Some(x), Some(y)) => Some(if y.rate < x.rate { y } else { x }),
                (x, y) => x.as_ref().or(y.as_ref()),
            };
            if let Some(best) = best {
                out.push(SchemeRecord {
                    scheme: Scheme::New,
                    ..best.clone()
                });
            }
            out.extend(one);
            out.extend(two);
        }
    }
    mark_envelopes(&mut out);
    out.sort_by(|x, y| {
        (x.memory_ratio, x.scheme, x.b, x.lambda).cmp(&(y.memory_ratio, y.scheme, y.b, y.lambda))
    });
    out
}

/// A record is on its curve's envelope if no other record of the same scheme
/// has both memory ratio and rate at most its own, with one strictly smaller.
fn mark_envelopes(records: &mut [SchemeRecord]) {
    let flags: Vec<bool> = records
        .iter()
        .map(|p| {
            !records.iter().any(|q| {
                q.scheme == p.scheme
                    && q.memory_ratio <= p.memory_ratio
                    && q.rate <= p.rate
                    && (q.memory_ratio < p.memory_ratio || q.rate < p.rate)
            })
        })
        .collect();
    for (rec, on) in records.iter_mut().zip(flags) {
        rec.envelope = on;
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    scheme: Scheme,
    #[serde(rename = "H")]
    h: u32,
    r: u32,
    b: u32,
    lambda: u32,
    #[serde(rename = "K")]
    k: u128,
    memory_ratio_num: u128,
    memory_ratio_den: u128,
    rate_num: u128,
    rate_den: u128,
    subpacketization: u128,
    gap: bool,
    envelope: bool,
}

pub fn write_csv<W: io::Write>(records: &[SchemeRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for rec in records {
        w.serialize(CsvRow {
            scheme: rec.scheme,
            h: rec.h,
            r: rec.r,
            b: rec.b,
            lambda: rec.lambda,
            k: rec.k,
            memory_ratio_num: *rec.memory_ratio.numer(),
            memory_ratio_den: *rec.memory_ratio.denom(),
            rate_num: *rec.rate.numer(),
            rate_den: *rec.rate.denom(),
            subpacketization: rec.subpacketization,
            gap: rec.gap,
            envelope: rec.envelope,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> csv::Result<Vec<SchemeRecord>> {
    csv::Reader::from_reader(input)
        .deserialize::<CsvRow>()
        .map(|row| {
            let row = row?;
            Ok(SchemeRecord {
                scheme: row.scheme,
                h: row.h,
                r: row.r,
                b: row.b,
                lambda: row.lambda,
                k: row.k,
                memory_ratio: Rational::new(row.memory_ratio_num, row.memory_ratio_den),
                rate: Rational::new(row.rate_num, row.rate_den),
                subpacketization: row.subpacketization,
                gap: row.gap,
                envelope: row.envelope,
            })
        })
        .collect()
}

fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Rate-versus-memory chart: the envelope of each curve as a polyline, plus
/// a dot per record.
pub fn render_svg(records: &[SchemeRecord]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const PAD: f64 = 50.0;
    let max_rate = records.iter().map(|r| to_f64(&r.rate)).fold(1.0, f64::max);
    let x = |m: f64| PAD + m * (W - 2.0 * PAD);
    let y = |r: f64| H - PAD - r / max_rate * (H - 2.0 * PAD);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    svg += &format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <line x1=\"{PAD}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n\
         <line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{0}\" stroke=\"black\"/>\n\
         <text x=\"{2}\" y=\"{3}\" text-anchor=\"middle\">memory ratio M/N</text>\n\
         <text x=\"14\" y=\"{4}\" transform=\"rotate(-90 14 {4})\" text-anchor=\"middle\">rate R (max {max_rate:.3})</text>\n",
        H - PAD,
        W - PAD,
        W / 2.0,
        H - 12.0,
        H / 2.0,
    );
    let styles = [
        (Scheme::Original, "#d62728", ""),
        (Scheme::New, "#1f77b4", ""),
        (Scheme::NewI, "#2ca02c", " stroke-dasharray=\"4 3\""),
        (Scheme::NewII, "#9467bd", " stroke-dasharray=\"1 3\""),
    ];
    for (i, (scheme, color, dash)) in styles.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.scheme == *scheme && r.envelope)
            .map(|r| (to_f64(&r.memory_ratio), to_f64(&r.rate)))
            .collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if !pts.is_empty() {
            let path: Vec<String> = pts
                .iter()
                .map(|&(m, r)| format!("{:.2},{:.2}", x(m), y(r)))
                .collect();
            svg += &format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>\n",
                path.join(" ")
            );
        }
        for r in records.iter().filter(|r| r.scheme == *scheme) {
            svg += &format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>\n",
                x(to_f64(&r.memory_ratio)),
                y(to_f64(&r.rate))
            );
        }
        svg += &format!(
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{scheme}</text>\n",
            W - PAD - 60.0,
            PAD + 16.0 * i as f64
        );
    }
    svg += "</svg>\n";
    svg
}
