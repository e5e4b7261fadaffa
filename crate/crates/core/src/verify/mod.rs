//! Exhaustive oracles for secrecy and zero-error decodability at small
//! parameters.
//!
//! Everything here enumerates: message × randomness for leakage, row spaces
//! of wiretap matrices for universal secrecy, and transfer matrices × inputs
//! × low-rank errors for fan-out disjointness. Every enumeration is bounded
//! by [`EnumCaps`] and fails with [`Error::CapExceeded`] rather than running
//! away.

mod converse;
mod leakage;
mod zero_error;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldTower};
use crate::linalg::{FMatrix, Layer};

pub use converse::{
    converse_search_packet_length, rate_gate_sweep, ConverseEntry, ConverseReport, RateGateEntry,
};
pub use leakage::{
    check_rank_additivity, check_universal_secrecy, rank_bounds, mutual_information,
    rank_additivity_witness, AdditivityReport, Leakage, LeakageReport, RankBounds,
    SecrecyReport,
};
pub use zero_error::{
    check_tradeoff, check_zero_error, TradeoffEntry, TradeoffReport, ZeroErrorReport,
    ZeroErrorWitness,
};

/// Environment variable overriding [`EnumCaps::joint_states`].
pub const CAP_ENV: &str = "RANKCRYPT_ENUM_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumCaps {
    /// Message × randomness pairs enumerated per leakage table, and row
    /// spaces enumerated per sweep.
    pub joint_states: u128,
    /// Transfer matrices × encoder outputs × errors for fan-out checks.
    pub fanout_work: u128,
}

impl Default for EnumCaps {
    fn default() -> Self {
        EnumCaps {
            joint_states: 1 << 22,
            fanout_work: 1 << 34,
        }
    }
}

impl EnumCaps {
    /// Defaults, with `joint_states` taken from `RANKCRYPT_ENUM_CAP` when set.
    pub fn from_env() -> Result<Self> {
        let mut caps = Self::default();
        if let Ok(v) = std::env::var(CAP_ENV) {
            caps.joint_states = v
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("{CAP_ENV}={v} is not an integer")))?;
        }
        Ok(caps)
    }

    pub(crate) fn check_joint(&self, requested: u128) -> Result<()> {
        if requested > self.joint_states {
            return Err(Error::CapExceeded {
                requested,
                cap: self.joint_states,
            });
        }
        Ok(())
    }
}

/// Number of `d`-dimensional subspaces of GF(q)^n.
pub fn subspace_count(q: u32, n: usize, d: usize) -> u128 {
    if d > n {
        return 0;
    }
    let q = q as u128;
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..d as u32 {
        num = num.saturating_mul(q.pow(n as u32 - i) - 1);
        den = den.saturating_mul(q.pow(i + 1) - 1);
    }
    num / den
}

/// One reduced-echelon basis per subspace of GF(q)^n of dimension at most
/// `max_dim`, ordered by dimension, then pivot columns, then free entries.
/// The zero space is the `0 × n` matrix.
pub fn subspace_representatives(
    tower: &Arc<FieldTower>,
    n: usize,
    max_dim: usize,
    caps: &EnumCaps,
) -> Result<Vec<FMatrix>> {
    let max_dim = max_dim.min(n);
    let total: u128 = (0..=max_dim).map(|d| subspace_count(tower.q(), n, d)).sum();
    caps.check_joint(total)?;
    let mut out = Vec::with_capacity(total as usize);
    for d in 0..=max_dim {
        let mut pivots = Vec::with_capacity(d);
        pivot_sets(n, d, 0, &mut pivots, &mut |p| {
            push_echelon_forms(tower, n, p, &mut out);
        });
    }
    Ok(out)
}

fn pivot_sets(n: usize, d: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == d {
        f(cur);
        return;
    }
    for c in start..n {
        cur.push(c);
        pivot_sets(n, d, c + 1, cur, f);
        cur.pop();
    }
}

fn push_echelon_forms(tower: &Arc<FieldTower>, n: usize, pivots: &[usize], out: &mut Vec<FMatrix>) {
    let d = pivots.len();
    // free positions: right of the row's pivot, not in a pivot column
    let free: Vec<(usize, usize)> = (0..d)
        .flat_map(|r| {
            ((pivots[r] + 1)..n)
                .filter(|c| !pivots.contains(c))
                .map(move |c| (r, c))
        })
        .collect();
    let q = tower.q() as u64;
    let combos = q.pow(free.len() as u32);
    for idx in 0..combos {
        let mut m = FMatrix::zeros(tower.clone(), Layer::Base, d, n);
        for (r, &p) in pivots.iter().enumerate() {
            m.set(r, p, Elem::ONE);
        }
        let mut rest = idx;
        for &(r, c) in free.iter().rev() {
            m.set(r, c, Elem::from_index((rest % q) as u32));
            rest /= q;
        }
        out.push(m);
    }
}

/// Message index to vector, first symbol most significant.
pub(crate) fn index_vector(tower: &FieldTower, len: usize, idx: u64) -> Vec<Elem> {
    let mut v = vec![Elem::ZERO; len];
    crate::gabidulin::message_at(tower, len, idx, &mut v);
    v
}

pub(crate) fn pow_u128(base: u64, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}
