use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{phi_contract, phi_expand, Elem, FieldTower};
use crate::linalg::{FMatrix, Layer};

use super::{message_at, GabidulinCode, LinearCode, ORACLE_ENUM_CAP};

/// Brute-force decoder for `y = Ax + z`: searches every codeword `x` for one
/// with `rank(y − Ax) ≤ t` and succeeds only when it is unique.
///
/// `a` is a GF(q) matrix with `n` columns and rank at least `n − ρ`.
pub fn decode_oracle(
    code: &LinearCode,
    a: &FMatrix,
    y: &[Elem],
    t: usize,
    rho: usize,
) -> Result<Vec<Elem>> {
    OracleDecoder::new(code, a, t, rho)?.decode(y)
}

/// [`decode_oracle`] with the images `A·x` of all codewords precomputed, for
/// decoding many received words through one transfer matrix.
#[derive(Clone, Debug)]
pub struct OracleDecoder<'a> {
    code: &'a LinearCode,
    t: usize,
    /// `A·x` for every codeword, messages in lexicographic order.
    images: Vec<Vec<Elem>>,
}

/// Outcome of oracle decoding for one received word, as tabulated by
/// [`OracleDecoder::ball_table`].
pub const BALL_EMPTY: u32 = u32::MAX;
pub const BALL_AMBIGUOUS: u32 = u32::MAX - 1;

/// Index of a vector over GF(q^m) in mixed radix `Σ v_i·Q^i`.
pub fn vector_index(tower: &FieldTower, v: &[Elem]) -> u64 {
    let order = tower.order() as u64;
    v.iter().rev().fold(0u64, |acc, e| acc * order + e.index() as u64)
}

impl<'a> OracleDecoder<'a> {
    pub fn new(code: &'a LinearCode, a: &FMatrix, t: usize, rho: usize) -> Result<Self> {
        let tower = code.tower();
        if a.tower() != tower {
            return Err(Error::TowerMismatch);
        }
        if a.layer() != Layer::Base {
            return Err(Error::LayerMismatch {
                expected: Layer::Base,
                got: a.layer(),
            });
        }
        let n = code.n();
        if a.cols() != n {
            return Err(Error::dim(format!(
                "transfer matrix with {} columns for length {n}",
                a.cols()
            )));
        }
        let required = n.saturating_sub(rho);
        let rank = a.rank();
        if rank < required {
            return Err(Error::RankDeficient { rank, required });
        }
        let size = code.codebook_size();
        if size > ORACLE_ENUM_CAP {
            return Err(Error::CapExceeded {
                requested: size as u128,
                cap: ORACLE_ENUM_CAP as u128,
            });
        }
        let images = code
            .codewords()
            .map(|x| a.apply(&x))
            .collect::<Result<_>>()?;
        Ok(OracleDecoder { code, t, images })
    }

    /// Index (lexicographic message order) of the unique codeword within
    /// rank distance `t` of `y` after the transfer.
    pub fn decode_index(&self, y: &[Elem]) -> Result<usize> {
        let tower = self.code.tower();
        let rows = self.images.first().map_or(0, Vec::len);
        if y.len() != rows {
            return Err(Error::dim(format!(
                "{} received packets for {rows} transfer rows",
                y.len()
            )));
        }
        if let Some(&bad) = y.iter().find(|&&e| !tower.contains(e)) {
            return Err(Error::ElementOutOfRange {
                index: bad.index(),
                order: tower.order(),
            });
        }
        let mut residual = vec![Elem::ZERO; rows];
        let mut found = None;
        for (idx, img) in self.images.iter().enumerate() {
            for ((r, &yi), &g) in residual.iter_mut().zip(y).zip(img) {
                *r = tower.sub(yi, g);
            }
            if tower.span_dim(&residual) <= self.t {
                if found.is_some() {
                    return Err(Error::Ambiguous);
                }
                found = Some(idx);
            }
        }
        found.ok_or(Error::NoCandidate)
    }

    pub fn decode(&self, y: &[Elem]) -> Result<Vec<Elem>> {
        let idx = self.decode_index(y)?;
        let mut u = vec![Elem::ZERO; self.code.k()];
        message_at(self.code.tower(), self.code.k(), idx as u64, &mut u);
        Ok(u)
    }

    /// Decoder output for every received word at once, indexed by
    /// [`vector_index`]: the codeword index, [`BALL_EMPTY`] or
    /// [`BALL_AMBIGUOUS`]. `errors` must list every vector of rank at most
    /// `t` (see [`crate::linalg::low_rank_vectors`]).
    pub fn ball_table(&self, errors: &[Vec<Elem>]) -> Result<Vec<u32>> {
        let tower = self.code.tower();
        let rows = self.images.first().map_or(0, Vec::len);
        let size = (tower.order() as u128).pow(rows as u32);
        if size > TABLE_CAP as u128 {
            return Err(Error::CapExceeded {
                requested: size,
                cap: TABLE_CAP as u128,
            });
        }
        let mut table = vec![BALL_EMPTY; size as usize];
        let mut y = vec![Elem::ZERO; rows];
        for (idx, img) in self.images.iter().enumerate() {
            for z in errors {
                for ((slot, &g), &e) in y.iter_mut().zip(img).zip(z) {
                    *slot = tower.add(g, e);
                }
                let cell = &mut table[vector_index(tower, &y) as usize];
                *cell = match *cell {
                    BALL_EMPTY => idx as u32,
                    c if c == idx as u32 => c,
                    _ => BALL_AMBIGUOUS,
                };
            }
        }
        Ok(table)
    }
}

/// Largest lookup table built by [`OracleDecoder::ball_table`].
pub const TABLE_CAP: u64 = 1 << 24;

/// Linearized polynomial `Σ c_p x^(q^p)`, stored by q-degree.
type LinPoly = Vec<Elem>;

fn lin_eval(tower: &FieldTower, poly: &[Elem], x: Elem) -> Elem {
    let mut acc = Elem::ZERO;
    let mut xp = x;
    for &c in poly {
        acc = tower.add(acc, tower.mul(c, xp));
        xp = tower.frobenius(xp, 1);
    }
    acc
}

/// `poly − c · (x^(q^shift) ∘ b)`.
fn lin_sub_scaled_shift(
    tower: &FieldTower,
    poly: &[Elem],
    c: Elem,
    b: &[Elem],
    shift: usize,
) -> LinPoly {
    let len = poly.len().max(b.len() + shift);
    let mut out = poly.to_vec();
    out.resize(len, Elem::ZERO);
    for (p, &bp) in b.iter().enumerate() {
        let term = tower.mul(c, tower.frobenius(bp, shift as i64));
        out[p + shift] = tower.sub(out[p + shift], term);
    }
    while out.len() > 1 && out.last().is_some_and(|e| e.is_zero()) {
        out.pop();
    }
    out
}

/// Shortest linearized recurrence `Σ_p λ_p s_(r−p)^(q^p) = 0`, `λ_0 = 1`.
fn berlekamp_massey(tower: &FieldTower, s: &[Elem]) -> (LinPoly, usize) {
    let mut lambda: LinPoly = vec![Elem::ONE];
    let mut prev: LinPoly = vec![Elem::ONE];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut prev_disc = Elem::ONE;
    for r in 0..s.len() {
        let mut disc = Elem::ZERO;
        for (p, &lp) in lambda.iter().enumerate().take(r + 1) {
            disc = tower.add(disc, tower.mul(lp, tower.frobenius(s[r - p], p as i64)));
        }
        if disc.is_zero() {
            shift += 1;
            continue;
        }
        let scale = tower
            .div(disc, tower.frobenius(prev_disc, shift as i64))
            .expect("previous discrepancy is nonzero");
        let next = lin_sub_scaled_shift(tower, &lambda, scale, &prev, shift);
        if 2 * len > r {
            lambda = next;
            shift += 1;
        } else {
            prev = std::mem::replace(&mut lambda, next);
            len = r + 1 - len;
            prev_disc = disc;
            shift = 1;
        }
    }
    (lambda, len)
}

/// GF(q)-basis of the roots of a linearized polynomial in GF(q^m).
fn root_space(tower: &Arc<FieldTower>, poly: &[Elem]) -> Vec<Elem> {
    let m = tower.m();
    let mut data = Vec::with_capacity(m * m);
    for i in 0..m {
        let beta = Elem::from_index(tower.q().pow(i as u32));
        let image = lin_eval(tower, poly, beta);
        data.extend((0..m).map(|j| Elem::from_index(tower.digit(image, j))));
    }
    let map = FMatrix::new(tower.clone(), Layer::Base, m, m, data).expect("digits are in range");
    let kernel = map.left_null_space();
    kernel
        .basis()
        .to_rows()
        .iter()
        .map(|c| {
            let digits: Vec<u32> = c.iter().map(|e| e.index()).collect();
            tower.from_digits(&digits).expect("digits are in range")
        })
        .collect()
}

fn failure(msg: &str) -> Error {
    Error::DecodingFailure(msg.into())
}

/// Error vector of rank at most `t` explaining the syndromes of `y`.
fn locate_error(code: &GabidulinCode, y: &[Elem], t: usize) -> Result<Vec<Elem>> {
    let tower = code.tower();
    let h = code.dual_points();
    let n = code.n();
    let syndromes: Vec<Elem> = (0..n - code.k())
        .map(|i| {
            h.iter().zip(y).fold(Elem::ZERO, |acc, (&hj, &yj)| {
                tower.add(acc, tower.mul(tower.frobenius(hj, i as i64), yj))
            })
        })
        .collect();
    if syndromes.iter().all(|s| s.is_zero()) {
        return Ok(vec![Elem::ZERO; n]);
    }

    let (lambda, len) = berlekamp_massey(tower, &syndromes);
    if len > t || lambda.len() != len + 1 {
        return Err(failure("error span exceeds the correction radius"));
    }
    let roots = root_space(tower, &lambda);
    if roots.len() != len {
        return Err(failure("error locator does not split"));
    }

    // s_i^(q^-i) = Σ_l a_l^(q^-i) d_l
    let rows = syndromes.len();
    let mut data = Vec::with_capacity(rows * len);
    for i in 0..rows as i64 {
        data.extend(roots.iter().map(|&a| tower.frobenius(a, -i)));
    }
    let moore = FMatrix::new(tower.clone(), Layer::Ext, rows, len, data)?;
    let rhs: Vec<Elem> = syndromes
        .iter()
        .enumerate()
        .map(|(i, &s)| tower.frobenius(s, -(i as i64)))
        .collect();
    let d = match moore.solve(&rhs) {
        Ok(sol) if sol.is_unique() => sol.particular,
        _ => return Err(failure("error values are inconsistent")),
    };

    // d_l = Σ_j B_lj h_j with B over GF(q); solved through φ(h)ᵀ
    let m = tower.m();
    let mut hdata = Vec::with_capacity(m * n);
    for i in 0..m {
        hdata.extend(h.iter().map(|&hj| Elem::from_index(tower.digit(hj, i))));
    }
    let phi_h_t = FMatrix::new(tower.clone(), Layer::Base, m, n, hdata)?;
    let mut error = vec![Elem::ZERO; n];
    for (&a, &dl) in roots.iter().zip(&d) {
        let target: Vec<Elem> = (0..m)
            .map(|i| Elem::from_index(tower.digit(dl, i)))
            .collect();
        let b = match phi_h_t.solve(&target) {
            Ok(sol) if sol.is_unique() => sol.particular,
            _ => return Err(failure("error pattern is not GF(q)-rational")),
        };
        for (e, bj) in error.iter_mut().zip(&b) {
            *e = tower.add(*e, tower.scale(bj.index(), a));
        }
    }
    if tower.span_dim(&error) > t {
        return Err(failure("recovered error exceeds the correction radius"));
    }
    Ok(error)
}

/// Decodes `y = x + e` with `rank(e) ≤ t` for a Gabidulin code via
/// linearized Berlekamp–Massey, returning the message.
pub fn decode_syndrome(code: &GabidulinCode, y: &[Elem], t: usize) -> Result<Vec<Elem>> {
    let n = code.n();
    if y.len() != n {
        return Err(Error::dim(format!(
            "received vector of length {} for length {n}",
            y.len()
        )));
    }
    if 2 * t > n - code.k() {
        return Err(Error::InvalidParameters(format!(
            "t = {t} exceeds the unique decoding radius of a [{n}, {}] code",
            code.k()
        )));
    }
    let tower = code.tower();
    if let Some(&bad) = y.iter().find(|&&e| !tower.contains(e)) {
        return Err(Error::ElementOutOfRange {
            index: bad.index(),
            order: tower.order(),
        });
    }
    let error = locate_error(code, y, t)?;
    let x: Vec<Elem> = y.iter().zip(&error).map(|(&a, &e)| tower.sub(a, e)).collect();
    if !code.contains(&x)? {
        return Err(failure("corrected word is not a codeword"));
    }
    code.message_of(&x)
}

/// Two transmissions that an adversary can make indistinguishable:
/// `a·x1 + z1 = a·x2 + z2 = y` with `rank(z_i) ≤ t` and `rank(a) ≥ n − ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguityWitness {
    pub a: FMatrix,
    pub y: Vec<Elem>,
    pub u1: Vec<Elem>,
    pub x1: Vec<Elem>,
    pub z1: Vec<Elem>,
    pub u2: Vec<Elem>,
    pub x2: Vec<Elem>,
    pub z2: Vec<Elem>,
}

/// Builds a confusing pair for a code with `d ≤ 2t + ρ`: the zero codeword
/// against a minimum-weight codeword, with `a` killing `min(ρ, d)`
/// directions of their difference and the rest split between two errors.
pub fn ambiguity_witness(code: &LinearCode, t: usize, rho: usize) -> Result<AmbiguityWitness> {
    let tower = code.tower();
    let n = code.n();
    let k = code.k();
    let size = code.codebook_size();
    if size > super::DISTANCE_ENUM_CAP {
        return Err(Error::CapExceeded {
            requested: size as u128,
            cap: super::DISTANCE_ENUM_CAP as u128,
        });
    }
    let mut u = vec![Elem::ZERO; k];
    let mut best: Option<(usize, Vec<Elem>)> = None;
    for idx in 1..size {
        message_at(tower, k, idx, &mut u);
        let w = tower.span_dim(&code.encode(&u)?);
        if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
            best = Some((w, u.clone()));
        }
    }
    let Some((d, u2)) = best else {
        return Err(Error::InvalidParameters("code has no nonzero codeword".into()));
    };
    if d > 2 * t + rho {
        return Err(Error::InvalidParameters(format!(
            "d = {d} exceeds 2t + ρ = {}",
            2 * t + rho
        )));
    }
    let x2 = code.encode(&u2)?;
    let delta = phi_expand(tower, &x2);

    // right null space of a = span of min(ρ, d) columns of φ(x2)
    let r = rho.min(d);
    let cols = delta.transpose().row_space().into_basis().row_range(0, r)?;
    let complement = cols.right_null_space().into_basis();
    let a = complement.vstack(&FMatrix::zeros(tower.clone(), Layer::Base, r, n))?;

    // e = a·x2 = e1 − e2 with rank(e1), rank(e2) ≤ t
    let e = a.apply(&x2)?;
    let phi_e = phi_expand(tower, &e);
    let (reduced, pivots) = phi_e.rref();
    let split = t.min(pivots.len());
    let m = tower.m();
    let mut e1 = FMatrix::zeros(tower.clone(), Layer::Base, n, m);
    for i in 0..n {
        let mut row = vec![0u32; m];
        for (b, &pc) in pivots.iter().enumerate().take(split) {
            let c = phi_e.get(i, pc).index();
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = tower.base_add(*slot, tower.base_mul(c, reduced.get(b, j).index()));
            }
        }
        for (j, v) in row.into_iter().enumerate() {
            e1.set(i, j, Elem::from_index(v));
        }
    }
    let z1 = phi_contract(&e1)?;
    let z2: Vec<Elem> = z1.iter().zip(&e).map(|(&p, &q)| tower.sub(p, q)).collect();
    Ok(AmbiguityWitness {
        a,
        y: z1.clone(),
        u1: vec![Elem::ZERO; k],
        x1: vec![Elem::ZERO; n],
        z1,
        u2,
        x2,
        z2,
    })
}
