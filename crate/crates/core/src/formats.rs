//! On-disk formats shared by the command-line tool and its fixtures.
//!
//! JSON documents carry `format_version` and are rejected when it differs
//! from [`FORMAT_VERSION`]. Field elements are φ-digit strings (see
//! [`FieldTower::format_elem`]) and towers use the `q^m/p0,...,pm` form of
//! [`parse_tower`].
//!
//! Packet and message files are raw digit streams: every element is `m`
//! bytes, one base-field digit per byte, most significant coordinate first.
//! A packet block is `n` elements, a message block is `k` elements, and a
//! file is any number of whole blocks.

use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gabidulin::GabidulinCode;
use crate::gf::{parse_tower, Elem, FieldTower};
use crate::linalg::{FMatrix, Layer};
use crate::netsim::Topology;
use crate::secrecy::{CosetScheme, LayeredScheme, Scheme};
use crate::verify::{
    AdditivityReport, ConverseReport, EnumCaps, LeakageReport, SecrecyReport, TradeoffReport,
    ZeroErrorReport,
};

pub const FORMAT_VERSION: u32 = 1;

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::FormatVersion(v));
    }
    Ok(())
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn parse_points(tower: &FieldTower, points: &[String]) -> Result<Vec<Elem>> {
    points.iter().map(|p| tower.parse_elem(p)).collect()
}

fn format_points(tower: &FieldTower, points: &[Elem]) -> Vec<String> {
    points.iter().map(|&p| tower.format_elem(p)).collect()
}

/// Gabidulin code: tower, length, dimension and evaluation points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDescriptor {
    pub format_version: u32,
    pub tower: String,
    pub n: usize,
    pub k: usize,
    pub points: Vec<String>,
}

impl CodeDescriptor {
    pub fn from_code(code: &GabidulinCode) -> Self {
        CodeDescriptor {
            format_version: FORMAT_VERSION,
            tower: code.tower().to_string(),
            n: code.n(),
            k: code.k(),
            points: format_points(code.tower(), code.points()),
        }
    }

    pub fn build(&self) -> Result<GabidulinCode> {
        check_version(self.format_version)?;
        let tower = parse_tower(&self.tower)?;
        let points = parse_points(&tower, &self.points)?;
        GabidulinCode::build(&tower, self.n, self.k, &points)
    }
}

pub fn parse_code_descriptor(text: &str) -> Result<GabidulinCode> {
    from_json::<CodeDescriptor>(text)?.build()
}

/// Secrecy scheme, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeBody {
    Layered {
        tower: String,
        n: usize,
        k: usize,
        mu: usize,
        t: usize,
        rho: usize,
        points: Vec<String>,
    },
    /// Parity check rows as φ-digit strings.
    Coset {
        tower: String,
        n: usize,
        k: usize,
        parity_check: Vec<Vec<String>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeDescriptor {
    pub format_version: u32,
    #[serde(flatten)]
    pub body: SchemeBody,
}

impl SchemeDescriptor {
    pub fn from_scheme(scheme: &Scheme) -> Self {
        let body = match scheme {
            Scheme::Layered(l) => {
                let tower = crate::secrecy::StochasticEncoder::tower(l);
                SchemeBody::Layered {
                    tower: tower.to_string(),
                    n: l.n(),
                    k: l.k(),
                    mu: l.mu(),
                    t: l.t_budget(),
                    rho: l.rho_budget(),
                    points: format_points(tower, l.points()),
                }
            }
            Scheme::Coset(c) => {
                let h = c.parity_check();
                SchemeBody::Coset {
                    tower: h.tower().to_string(),
                    n: c.n(),
                    k: c.k(),
                    parity_check: h
                        .to_rows()
                        .iter()
                        .map(|r| format_points(h.tower(), r))
                        .collect(),
                }
            }
        };
        SchemeDescriptor {
            format_version: FORMAT_VERSION,
            body,
        }
    }

    pub fn build(&self) -> Result<Scheme> {
        check_version(self.format_version)?;
        match &self.body {
            SchemeBody::Layered {
                tower,
                n,
                k,
                mu,
                t,
                rho,
                points,
            } => {
                let tower = parse_tower(tower)?;
                let points = parse_points(&tower, points)?;
                let l = LayeredScheme::with_points(&tower, *n, *k, *mu, *t, *rho, &points)?;
                Ok(Scheme::Layered(l))
            }
            SchemeBody::Coset {
                tower,
                n,
                k,
                parity_check,
            } => {
                let tower = parse_tower(tower)?;
                if parity_check.len() != *k || parity_check.iter().any(|r| r.len() != *n) {
                    return Err(Error::dim(format!("parity check must be {k}x{n}")));
                }
                let rows: Vec<Vec<Elem>> = parity_check
                    .iter()
                    .map(|r| parse_points(&tower, r))
                    .collect::<Result<_>>()?;
                let h = FMatrix::from_rows(tower, Layer::Ext, &rows)?;
                Ok(Scheme::Coset(CosetScheme::new(h)?))
            }
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

pub fn parse_scheme_descriptor(text: &str) -> Result<Scheme> {
    from_json::<SchemeDescriptor>(text)?.build()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct TopologyFile {
    format_version: u32,
    #[serde(flatten)]
    topology: Topology,
}

pub fn parse_topology(text: &str) -> Result<Topology> {
    let file: TopologyFile = from_json(text)?;
    check_version(file.format_version)?;
    file.topology.validate()?;
    Ok(file.topology)
}

pub fn topology_to_json(topology: &Topology) -> String {
    to_json(&TopologyFile {
        format_version: FORMAT_VERSION,
        topology: topology.clone(),
    })
}

/// Adversary budgets and trial schedule for a simulation campaign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub format_version: u32,
    /// Wiretapped edges per trial.
    pub mu: usize,
    /// Corrupted edges per trial.
    pub t: usize,
    pub trials: u64,
    /// Trial `i` runs with seed `seed + i`.
    pub seed: u64,
}

impl CampaignConfig {
    pub fn new(mu: usize, t: usize, trials: u64, seed: u64) -> Self {
        CampaignConfig {
            format_version: FORMAT_VERSION,
            mu,
            t,
            trials,
            seed,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

pub fn parse_campaign_config(text: &str) -> Result<CampaignConfig> {
    let config: CampaignConfig = from_json(text)?;
    check_version(config.format_version)?;
    Ok(config)
}

/// Serializes blocks of field elements as one byte per digit, most
/// significant coordinate first.
pub fn encode_packets(tower: &FieldTower, blocks: &[Vec<Elem>]) -> Vec<u8> {
    let m = tower.m();
    let mut out = Vec::with_capacity(blocks.iter().map(|b| b.len() * m).sum());
    for &e in blocks.iter().flatten() {
        out.extend((0..m).rev().map(|i| tower.digit(e, i) as u8));
    }
    out
}

/// Inverse of [`encode_packets`] for blocks of `block_len` elements.
pub fn decode_packets(tower: &FieldTower, block_len: usize, bytes: &[u8]) -> Result<Vec<Vec<Elem>>> {
    let m = tower.m();
    let block_bytes = block_len * m;
    if block_bytes == 0 {
        return Err(Error::dim("empty block length"));
    }
    if bytes.len() % block_bytes != 0 {
        return Err(Error::dim(format!(
            "{} bytes is not a whole number of {block_bytes}-byte blocks",
            bytes.len()
        )));
    }
    let mut digits = vec![0u32; m];
    bytes
        .chunks(block_bytes)
        .map(|block| {
            block
                .chunks(m)
                .map(|elem| {
                    for (i, &b) in elem.iter().enumerate() {
                        digits[m - 1 - i] = b as u32;
                    }
                    tower.from_digits(&digits)
                })
                .collect()
        })
        .collect()
}

/// Matrix file: [`FMatrix::to_text`] over the given layer.
pub fn parse_matrix(tower: &Arc<FieldTower>, layer: Layer, text: &str) -> Result<FMatrix> {
    FMatrix::parse_text(tower.clone(), layer, text)
}

pub fn ratio_json(r: &Ratio<i64>) -> Value {
    json!({ "numerator": r.numer(), "denominator": r.denom() })
}

fn vector_text(tower: &FieldTower, v: &[Elem]) -> String {
    format_points(tower, v).join(" ")
}

pub fn leakage_json(r: &LeakageReport) -> Value {
    json!({
        "observation": r.observation.to_text(),
        "independent": r.leakage.independent,
        "exact": r.leakage.exact.as_ref().map(ratio_json),
        "value": r.leakage.value,
        "message_states": r.message_states,
        "randomness_states": r.randomness_states,
        "observation_states": r.observation_states,
        "rank_bound": r.rank_bounds.map(|b| b.upper),
    })
}

pub fn secrecy_json(r: &SecrecyReport) -> Value {
    json!({
        "mu": r.mu,
        "representatives": r.representatives,
        "witness": r.witness.as_ref().map(leakage_json),
    })
}

pub fn additivity_json(r: &AdditivityReport) -> Value {
    json!({
        "mu": r.mu,
        "representatives": r.representatives,
        "witness": r.witness.as_ref().map(FMatrix::to_text),
    })
}

pub fn zero_error_json(r: &ZeroErrorReport) -> Value {
    let witness = r.witness.as_ref().map(|w| {
        let tower = w.a.tower();
        json!({
            "s1": vector_text(tower, &w.s1),
            "s2": vector_text(tower, &w.s2),
            "a": w.a.to_text(),
            "y": vector_text(tower, &w.y),
            "x1": vector_text(tower, &w.x1),
            "z1": vector_text(tower, &w.z1),
            "x2": vector_text(tower, &w.x2),
            "z2": vector_text(tower, &w.z2),
        })
    });
    json!({
        "t": r.t,
        "rho": r.rho,
        "pass": r.pass,
        "transfer_matrices": r.transfer_matrices,
        "witness": witness,
    })
}

pub fn tradeoff_json(r: &TradeoffReport) -> Value {
    json!({
        "t": r.t,
        "rho": r.rho,
        "entries": r.entries.iter().map(|e| zero_error_json(&e.report)).collect::<Vec<_>>(),
    })
}

pub fn converse_json(r: &ConverseReport) -> Value {
    json!({
        "scope": ConverseReport::SCOPE,
        "q": r.q,
        "n": r.n,
        "m": r.m,
        "mu": r.mu,
        "k": r.k,
        "encoders": r.entries.len(),
        "leaking": r.entries.iter().filter(|e| e.leaks).count(),
        "every_choice_leaks": r.every_choice_leaks,
        "secure_choice": r.secure_choice().map(FMatrix::to_text),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckVerdict {
    Pass,
    Fail,
    CapExceeded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub verdict: CheckVerdict,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub format_version: u32,
    pub scheme: SchemeDescriptor,
    pub caps: EnumCaps,
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn new(scheme: &Scheme, caps: EnumCaps) -> Self {
        VerificationReport {
            format_version: FORMAT_VERSION,
            scheme: SchemeDescriptor::from_scheme(scheme),
            caps,
            checks: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == CheckVerdict::Pass)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}
