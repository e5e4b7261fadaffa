use std::collections::HashMap;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gabidulin::LinearCode;
use crate::gf::{phi_expand, Elem};
use crate::linalg::{FMatrix, Layer};
use crate::secrecy::StochasticEncoder;

use super::{index_vector, pow_u128, subspace_representatives, EnumCaps};

/// `I(S;W)` in units of one packet (`log` base `q^m`).
#[derive(Clone, Debug, PartialEq)]
pub struct Leakage {
    /// Whether the joint count table factorizes, i.e. `I = 0` exactly.
    pub independent: bool,
    /// Exact value when every cell's likelihood ratio is a power of `q`.
    pub exact: Option<Ratio<i64>>,
    /// Floating-point value, within [`Leakage::ROUNDING_BOUND`] of the truth.
    pub value: f64,
}

impl Leakage {
    pub const ROUNDING_BOUND: f64 = 1e-12;

    pub fn is_zero(&self) -> bool {
        self.independent
    }
}

/// `rank H + rank B − rank [H; B]`: an upper bound on `I(S;W)` when `X` is
/// uniform on each coset and a lower bound when `S` is uniform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankBounds {
    pub lower: usize,
    pub upper: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeakageReport {
    /// The wiretap matrix `B` over GF(q).
    pub observation: FMatrix,
    pub leakage: Leakage,
    pub message_states: u64,
    pub randomness_states: u64,
    /// Distinct observations `W = BX` that occur.
    pub observation_states: usize,
    /// Present when the encoder is a coset encoder.
    pub rank_bounds: Option<RankBounds>,
}

pub fn rank_bounds(h: &FMatrix, b: &FMatrix) -> Result<RankBounds> {
    let b_ext = match b.layer() {
        Layer::Base => b.embed(),
        Layer::Ext => b.clone(),
    };
    let h_ext = match h.layer() {
        Layer::Base => h.embed(),
        Layer::Ext => h.clone(),
    };
    let stacked = h_ext.vstack(&b_ext)?.rank();
    let v = h_ext.rank() + b_ext.rank() - stacked;
    Ok(RankBounds { lower: v, upper: v })
}

fn power_of(q: u64, mut v: u64) -> Option<i64> {
    let mut e = 0;
    while v > 1 {
        if v % q != 0 {
            return None;
        }
        v /= q;
        e += 1;
    }
    (v == 1).then_some(e)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact `I(S;W)` for uniform `S` and uniform randomness, from the joint
/// count table over every (message, randomness) pair.
pub fn mutual_information<E: StochasticEncoder + ?Sized>(
    encoder: &E,
    b: &FMatrix,
    caps: &EnumCaps,
) -> Result<LeakageReport> {
    let tower = encoder.tower();
    if b.tower() != tower {
        return Err(Error::TowerMismatch);
    }
    if b.layer() != Layer::Base {
        return Err(Error::LayerMismatch {
            expected: Layer::Base,
            got: b.layer(),
        });
    }
    let n = encoder.block_len();
    if b.cols() != n {
        return Err(Error::dim(format!(
            "wiretap matrix with {} columns for block length {n}",
            b.cols()
        )));
    }
    let order = tower.order() as u64;
    let (k, rl) = (encoder.message_len(), encoder.randomness_len());
    let s_states = pow_u128(order, k);
    let r_states = pow_u128(order, rl);
    caps.check_joint(s_states.saturating_mul(r_states))?;
    let (s_states, r_states) = (s_states as u64, r_states as u64);

    let per_message: Vec<HashMap<Vec<Elem>, u64>> = (0..s_states)
        .into_par_iter()
        .map(|si| {
            let s = index_vector(tower, k, si);
            let mut counts = HashMap::new();
            for ri in 0..r_states {
                let r = index_vector(tower, rl, ri);
                let x = encoder.encode_with(&s, &r)?;
                *counts.entry(b.apply(&x)?).or_insert(0) += 1;
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;

    let mut table: HashMap<&[Elem], Vec<u64>> = HashMap::new();
    for (si, counts) in per_message.iter().enumerate() {
        for (w, &c) in counts {
            table.entry(w.as_slice()).or_insert_with(|| vec![0; s_states as usize])[si] = c;
        }
    }

    let total = s_states * r_states;
    let q = tower.q() as u64;
    let ln_order = (order as f64).ln();
    let mut independent = true;
    let mut exact_sum: Option<i128> = Some(0);
    let mut value = 0.0f64;
    for counts in table.values() {
        let marginal: u64 = counts.iter().sum();
        for &c in counts {
            // N(s,w)·T = N(s)·N(w) with N(s) = R reduces to c·S = N(w)
            if c * s_states != marginal {
                independent = false;
            }
            if c == 0 {
                continue;
            }
            let (num, den) = (c * s_states, marginal);
            let g = gcd(num, den);
            let (num, den) = (num / g, den / g);
            value += (c as f64 / total as f64) * ((num as f64).ln() - (den as f64).ln()) / ln_order;
            let exponent = if den == 1 {
                power_of(q, num)
            } else if num == 1 {
                power_of(q, den).map(|e| -e)
            } else {
                None
            };
            exact_sum = match (exact_sum, exponent) {
                (Some(acc), Some(e)) => Some(acc + c as i128 * e as i128),
                _ => None,
            };
        }
    }
    let m = tower.m() as i128;
    let exact = exact_sum.and_then(|sum| {
        let den = total as i128 * m;
        Some(Ratio::new(i64::try_from(sum).ok()?, i64::try_from(den).ok()?))
    });
    if independent {
        value = 0.0;
    }
    let rank_bounds = match encoder.coset_parity_check() {
        Some(h) => Some(rank_bounds(&h, b)?),
        None => None,
    };
    Ok(LeakageReport {
        observation: b.clone(),
        leakage: Leakage {
            independent,
            exact: if independent {
                Some(Ratio::from_integer(0))
            } else {
                exact
            },
            value,
        },
        message_states: s_states,
        randomness_states: r_states,
        observation_states: table.len(),
        rank_bounds,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecrecyReport {
    pub mu: usize,
    /// Row spaces examined before the verdict.
    pub representatives: usize,
    pub pass: bool,
    /// First leaking observation in enumeration order.
    pub witness: Option<LeakageReport>,
}

/// Perfect secrecy against every GF(q) wiretap matrix with at most `μ`
/// rows, checked on one representative per row space.
pub fn check_universal_secrecy<E: StochasticEncoder + ?Sized>(
    encoder: &E,
    mu: usize,
    caps: &EnumCaps,
) -> Result<SecrecyReport> {
    let reps = subspace_representatives(encoder.tower(), encoder.block_len(), mu, caps)?;
    let found = reps
        .par_iter()
        .map(|b| mutual_information(encoder, b, caps))
        .find_map_first(|r| match r {
            Ok(rep) if rep.leakage.is_zero() => None,
            other => Some(other),
        })
        .transpose()?;
    Ok(SecrecyReport {
        mu,
        representatives: reps.len(),
        pass: found.is_none(),
        witness: found,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditivityReport {
    pub mu: usize,
    pub representatives: usize,
    pub pass: bool,
    /// First `B` with `rank [H; B] < rank H + rank B`.
    pub witness: Option<FMatrix>,
}

/// Checks `rank [H; B] = rank H + rank B` for every GF(q) matrix `B` with at
/// most `μ` rows, one representative per row space.
pub fn check_rank_additivity(h: &FMatrix, mu: usize, caps: &EnumCaps) -> Result<AdditivityReport> {
    if h.layer() != Layer::Ext {
        return Err(Error::LayerMismatch {
            expected: Layer::Ext,
            got: h.layer(),
        });
    }
    let reps = subspace_representatives(h.tower(), h.cols(), mu, caps)?;
    let rank_h = h.rank();
    let witness = reps
        .par_iter()
        .find_first(|b| {
            let stacked = h.vstack(&b.embed()).expect("shapes agree").rank();
            stacked != rank_h + b.rows()
        })
        .cloned();
    Ok(AdditivityReport {
        mu,
        representatives: reps.len(),
        pass: witness.is_none(),
        witness,
    })
}

/// For a parity check `H` (k × n) whose code has a nonzero codeword `x`
/// with `rank φ(x) ≤ k`, a full-rank `B` with `n − k` rows and `Bx = 0`,
/// which breaks rank additivity. `None` when the code is MRD.
pub fn rank_additivity_witness(h: &FMatrix) -> Result<Option<FMatrix>> {
    let code = LinearCode::from_parity_check(h.clone())?;
    let (k, n) = h.shape();
    let Some(x) = code
        .codewords()
        .skip(1)
        .find(|x| code.tower().span_dim(x) <= k)
    else {
        return Ok(None);
    };
    let kernel = phi_expand(code.tower(), &x).left_null_space().into_basis();
    Ok(Some(kernel.row_range(0, n - k)?))
}
