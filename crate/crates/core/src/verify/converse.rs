use crate::error::{Error, Result};
use crate::gf::{Elem, FieldTower};
use crate::linalg::{FMatrix, Layer};
use crate::secrecy::{build_layered, CosetScheme};

use super::{check_universal_secrecy, pow_u128, EnumCaps, LeakageReport};

#[derive(Clone, Debug, PartialEq)]
pub struct ConverseEntry {
    pub parity_check: FMatrix,
    pub leaks: bool,
    pub witness: Option<LeakageReport>,
}

/// Finite search over every linear coset encoder with the given shape.
/// This corroborates the packet-length converse for this encoder family
/// only; it is not a proof over all stochastic encoders.
#[derive(Clone, Debug, PartialEq)]
pub struct ConverseReport {
    pub q: u32,
    pub n: usize,
    pub m: usize,
    pub mu: usize,
    pub k: usize,
    pub entries: Vec<ConverseEntry>,
    /// No parity check in the family is universally secure.
    pub every_choice_leaks: bool,
}

impl ConverseReport {
    pub const SCOPE: &'static str = "finite-search corroboration over linear coset encoders";

    pub fn secure_choice(&self) -> Option<&FMatrix> {
        self.entries.iter().find(|e| !e.leaks).map(|e| &e.parity_check)
    }
}

/// Tries every full-rank `H ∈ GF(q^m)^(k×n)` as a coset encoder and checks
/// universal secrecy under `μ` observations.
pub fn converse_search_packet_length(
    q: u32,
    n: usize,
    m: usize,
    mu: usize,
    k: usize,
    caps: &EnumCaps,
) -> Result<ConverseReport> {
    let tower = FieldTower::with_default_modulus(q, m)?;
    if k > n {
        return Err(Error::InvalidParameters(format!("k = {k} exceeds n = {n}")));
    }
    let order = tower.order() as u64;
    let choices = pow_u128(order, k * n);
    caps.check_joint(choices)?;
    let mut entries = Vec::new();
    if k > 0 {
        for idx in 0..choices as u64 {
            let mut rest = idx;
            let data: Vec<Elem> = (0..k * n)
                .map(|_| {
                    let e = Elem::from_index((rest % order) as u32);
                    rest /= order;
                    e
                })
                .collect();
            let h = FMatrix::new(tower.clone(), Layer::Ext, k, n, data)?;
            if h.rank() < k {
                continue;
            }
            let scheme = CosetScheme::new(h.clone())?;
            let report = check_universal_secrecy(&scheme, mu, caps)?;
            entries.push(ConverseEntry {
                parity_check: h,
                leaks: !report.pass,
                witness: report.witness,
            });
        }
    }
    let every_choice_leaks = !entries.is_empty() && entries.iter().all(|e| e.leaks);
    Ok(ConverseReport {
        q,
        n,
        m,
        mu,
        k,
        entries,
        every_choice_leaks,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RateGateEntry {
    pub n: usize,
    pub k: usize,
    pub mu: usize,
    pub t: usize,
    pub rho: usize,
    pub accepted: bool,
    /// `k ≤ n − 2t − ρ − μ`.
    pub predicted: bool,
}

/// Attempts to build a layered scheme for every `n ≤ max_n`, `1 ≤ k ≤ n`,
/// `μ, ρ ≤ n`, `2t ≤ n + 2` over GF(q^n), recording acceptance next to the
/// rate inequality.
pub fn rate_gate_sweep(q: u32, max_n: usize) -> Result<Vec<RateGateEntry>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let tower = FieldTower::with_default_modulus(q, n)?;
        for k in 1..=n {
            for mu in 0..=n {
                for t in 0..=n / 2 + 1 {
                    for rho in 0..=n {
                        let accepted = build_layered(&tower, n, k, mu, t, rho).is_ok();
                        out.push(RateGateEntry {
                            n,
                            k,
                            mu,
                            t,
                            rho,
                            accepted,
                            predicted: k + mu + 2 * t + rho <= n,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}
