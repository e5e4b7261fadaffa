//! Monte-Carlo campaigns: realize a network, encode, attack, decode at every
//! receiver and measure the exact leakage of the wiretapped edges.
//!
//! Trial `i` is a pure function of `(scheme, topology, config.seed + i)`, so
//! campaigns run in parallel and still produce identical output.

use std::fmt;
use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::CampaignConfig;
use crate::gf::{phi_contract, phi_expand, Elem};
use crate::linalg::{FMatrix, Layer};
use crate::netsim::{receiver_reduce, AdversaryAction, NetworkInstance, Topology};
use crate::secrecy::{Scheme, StochasticEncoder};
use crate::verify::{rank_bounds, mutual_information, EnumCaps};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub rho_observed: usize,
    /// `skipped` when the realized network is more rank deficient than the
    /// scheme tolerates.
    pub decode: Verdict,
    pub leakage: Verdict,
    /// `rank H + rank C_I − rank [H; C_I]` in packets, when the scheme has a
    /// coset parity check.
    pub leakage_bound: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignResult {
    pub config: CampaignConfig,
    pub records: Vec<TrialRecord>,
}

impl CampaignResult {
    /// `(pass, fail, skipped)` decode counts.
    pub fn decode_counts(&self) -> (usize, usize, usize) {
        counts(self.records.iter().map(|r| r.decode))
    }

    pub fn leakage_counts(&self) -> (usize, usize, usize) {
        counts(self.records.iter().map(|r| r.leakage))
    }

    pub fn any_failure(&self) -> bool {
        self.records
            .iter()
            .any(|r| r.decode == Verdict::Fail || r.leakage == Verdict::Fail)
    }

    /// Columns `trial,seed,rho_observed,decode,leakage,leakage_bound,detail`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::parse(e.to_string());
        w.write_record([
            "trial",
            "seed",
            "rho_observed",
            "decode",
            "leakage",
            "leakage_bound",
            "detail",
        ])
        .map_err(io)?;
        for r in &self.records {
            w.write_record([
                r.trial.to_string(),
                r.seed.to_string(),
                r.rho_observed.to_string(),
                r.decode.to_string(),
                r.leakage.to_string(),
                r.leakage_bound.map(|b| b.to_string()).unwrap_or_default(),
                r.detail.clone(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::parse(e.to_string()))
    }
}

fn counts(it: impl Iterator<Item = Verdict>) -> (usize, usize, usize) {
    it.fold((0, 0, 0), |(p, f, s), v| match v {
        Verdict::Pass => (p + 1, f, s),
        Verdict::Fail => (p, f + 1, s),
        Verdict::Skipped => (p, f, s + 1),
    })
}

/// Runs `config.trials` independent trials. Each trial draws the local
/// coding coefficients, a uniform message, the encoder randomness, `μ`
/// distinct wiretapped edges and `t` distinct edges carrying uniform
/// nonzero error packets.
pub fn run_campaign(
    scheme: &Scheme,
    topology: &Topology,
    config: &CampaignConfig,
    caps: &EnumCaps,
) -> Result<CampaignResult> {
    topology.validate()?;
    let edges = topology.edges.len();
    if config.mu > edges || config.t > edges {
        return Err(Error::BudgetExceeded(format!(
            "μ = {} and t = {} on a network with {edges} edges",
            config.mu, config.t
        )));
    }
    let records = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(scheme, topology, config, caps, trial))
        .collect::<Result<Vec<_>>>()?;
    Ok(CampaignResult {
        config: config.clone(),
        records,
    })
}

fn run_trial(
    scheme: &Scheme,
    topology: &Topology,
    config: &CampaignConfig,
    caps: &EnumCaps,
    trial: u64,
) -> Result<TrialRecord> {
    let seed = config.seed.wrapping_add(trial);
    let tower = scheme.tower();
    let n = scheme.block_len();
    let m = tower.m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let net = NetworkInstance::realize(topology, tower, n, rng.gen())?;
    let e = net.edge_count();
    let s: Vec<Elem> = (0..scheme.message_len())
        .map(|_| Elem::from_index(rng.gen_range(0..tower.order())))
        .collect();
    let x = scheme.encode(&s, rng.gen())?;
    let wiretap: Vec<usize> = {
        let mut w = sample(&mut rng, e, config.mu).into_vec();
        w.sort_unstable();
        w
    };
    let mut injection = FMatrix::zeros(tower.clone(), Layer::Base, e, m);
    for edge in sample(&mut rng, e, config.t) {
        let row: Elem = Elem::from_index(rng.gen_range(1..tower.order()));
        for (c, d) in tower.digits(row).into_iter().enumerate() {
            injection.set(edge, c, Elem::from_index(d));
        }
    }
    let action = AdversaryAction::new(wiretap, injection, config.mu, config.t)?;

    let rho_observed = net.rank_deficiency()?;
    let (_, rho_budget) = scheme.budgets();
    let packets = phi_expand(tower, &x);
    let mut detail = Vec::new();
    let decode = if rho_observed > rho_budget {
        Verdict::Skipped
    } else {
        let mut verdict = Verdict::Pass;
        for r in 0..net.receivers().len() {
            let y = net.transmit(&packets, &action, r)?;
            let (a, y) = receiver_reduce(&net.receiver_coding(r)?, &y)?;
            match scheme.decode(&a, &phi_contract(&y)?) {
                Ok(got) if got == s => {}
                Ok(_) => {
                    verdict = Verdict::Fail;
                    detail.push(format!("receiver {r}: wrong message"));
                }
                Err(err) => {
                    verdict = Verdict::Fail;
                    detail.push(format!("receiver {r}: {err}"));
                }
            }
        }
        verdict
    };

    let c_i = net.wiretap_coding(&action.wiretap)?;
    let report = mutual_information(scheme, &c_i, caps)?;
    let leakage_bound = scheme
        .coset_parity_check()
        .map(|h| rank_bounds(&h, &c_i).map(|b| b.upper))
        .transpose()?;
    let leakage = if report.leakage.is_zero() && leakage_bound.unwrap_or(0) == 0 {
        Verdict::Pass
    } else {
        detail.push(format!("leakage {} packets", report.leakage.value));
        Verdict::Fail
    };
    Ok(TrialRecord {
        trial,
        seed,
        rho_observed,
        decode,
        leakage,
        leakage_bound,
        detail: detail.join("; "),
    })
}
