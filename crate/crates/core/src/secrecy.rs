//! Stochastic encoders that hide the message from wiretappers.
//!
//! [`CosetScheme`] treats the message as a syndrome `s = Hx` and sends a
//! uniform member of the coset. [`LayeredScheme`] stacks zero padding, the
//! message and fresh randomness, `x = T·[0; s; v]`, where `Tᵀ` is the full
//! Gabidulin evaluation grid; the trailing rows then form an MRD code that
//! corrects rank errors and erasures, and its last `μ` rows keep the message
//! secret from any `μ` observations.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gabidulin::{decode_oracle, decode_syndrome, GabidulinCode, LinearCode};
use crate::gf::{Elem, FieldTower};
use crate::linalg::{FMatrix, Layer};

/// A map from messages to transmitted words driven by explicit randomness.
///
/// `encode_with(s, r)` must be defined for every `r` in
/// GF(q^m)^randomness_len; drawing `r` uniformly gives the encoder's output
/// distribution, which the verification oracles enumerate exactly.
pub trait StochasticEncoder: Sync {
    fn tower(&self) -> &Arc<FieldTower>;
    fn block_len(&self) -> usize;
    fn message_len(&self) -> usize;
    fn randomness_len(&self) -> usize;
    fn encode_with(&self, s: &[Elem], r: &[Elem]) -> Result<Vec<Elem>>;

    /// Encodes with randomness drawn from a ChaCha8 stream seeded by `seed`.
    fn encode(&self, s: &[Elem], seed: u64) -> Result<Vec<Elem>> {
        let r = draw_uniform(self.tower(), self.randomness_len(), seed);
        self.encode_with(s, &r)
    }

    /// Parity check `H` such that, for uniform messages, the output is a
    /// uniform element of a coset of `ker H` determined by the message.
    fn coset_parity_check(&self) -> Option<FMatrix> {
        None
    }
}

pub(crate) fn draw_uniform(tower: &FieldTower, len: usize, seed: u64) -> Vec<Elem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| Elem::from_index(rng.gen_range(0..tower.order())))
        .collect()
}

fn check_message(tower: &FieldTower, s: &[Elem], k: usize, what: &str) -> Result<()> {
    if s.len() != k {
        return Err(Error::dim(format!("{what} of length {}, expected {k}", s.len())));
    }
    if let Some(&bad) = s.iter().find(|&&e| !tower.contains(e)) {
        return Err(Error::ElementOutOfRange {
            index: bad.index(),
            order: tower.order(),
        });
    }
    Ok(())
}

/// Deterministic encoding `x = Gᵀu`.
impl StochasticEncoder for LinearCode {
    fn tower(&self) -> &Arc<FieldTower> {
        LinearCode::tower(self)
    }

    fn block_len(&self) -> usize {
        self.n()
    }

    fn message_len(&self) -> usize {
        self.k()
    }

    fn randomness_len(&self) -> usize {
        0
    }

    fn encode_with(&self, s: &[Elem], _r: &[Elem]) -> Result<Vec<Elem>> {
        check_message(LinearCode::tower(self), s, self.k(), "message")?;
        LinearCode::encode(self, s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetScheme {
    tower: Arc<FieldTower>,
    h: FMatrix,
    /// `n × k` right inverse of `H`.
    lift: FMatrix,
    /// Basis of `ker H`, one codeword per row.
    kernel: FMatrix,
}

impl CosetScheme {
    /// Scheme with a `k × n` full-row-rank parity check over GF(q^m).
    pub fn new(h: FMatrix) -> Result<Self> {
        if h.layer() != Layer::Ext {
            return Err(Error::LayerMismatch {
                expected: Layer::Ext,
                got: h.layer(),
            });
        }
        let (k, n) = h.shape();
        if n == 0 || k > n {
            return Err(Error::InvalidParameters(format!(
                "parity check of shape {k}x{n}"
            )));
        }
        if h.rank() != k {
            return Err(Error::InvalidParameters(
                "parity check is not full rank".into(),
            ));
        }
        let tower = h.tower().clone();
        let mut columns = Vec::with_capacity(k);
        for i in 0..k {
            let mut e = vec![Elem::ZERO; k];
            e[i] = Elem::ONE;
            columns.push(h.solve(&e)?.particular);
        }
        let lift = FMatrix::from_rows(tower.clone(), Layer::Ext, &columns)?.transpose();
        let kernel = h.right_null_space().into_basis();
        Ok(CosetScheme {
            tower,
            h,
            lift,
            kernel,
        })
    }

    pub fn parity_check(&self) -> &FMatrix {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    pub fn k(&self) -> usize {
        self.h.rows()
    }

    /// The coset of `s`: `{x : Hx = s}`, enumerated by randomness index.
    pub fn coset(&self, s: &[Elem]) -> Result<Vec<Vec<Elem>>> {
        let r_len = self.randomness_len();
        let size = (self.tower.order() as u64).saturating_pow(r_len as u32);
        let mut r = vec![Elem::ZERO; r_len];
        (0..size)
            .map(|idx| {
                crate::gabidulin::message_at(&self.tower, r_len, idx, &mut r);
                self.encode_with(s, &r)
            })
            .collect()
    }

    /// `s = Hx`.
    pub fn decode(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        check_message(&self.tower, x, self.n(), "packet vector")?;
        self.h.apply(x)
    }
}

impl StochasticEncoder for CosetScheme {
    fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    fn block_len(&self) -> usize {
        self.n()
    }

    fn message_len(&self) -> usize {
        self.k()
    }

    fn randomness_len(&self) -> usize {
        self.kernel.rows()
    }

    fn encode_with(&self, s: &[Elem], r: &[Elem]) -> Result<Vec<Elem>> {
        check_message(&self.tower, s, self.k(), "message")?;
        check_message(&self.tower, r, self.randomness_len(), "randomness")?;
        let mut x = self.lift.apply(s)?;
        let offset = self.kernel.transpose().apply(r)?;
        for (a, b) in x.iter_mut().zip(offset) {
            *a = self.tower.add(*a, b);
        }
        Ok(x)
    }

    fn coset_parity_check(&self) -> Option<FMatrix> {
        Some(self.h.clone())
    }
}

/// Secrecy plus error control: `x = T·[0; s; v]` with `p = n − k − μ`
/// zero rows first, then the `k` message rows, then `μ` random rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredScheme {
    tower: Arc<FieldTower>,
    n: usize,
    k: usize,
    mu: usize,
    t: usize,
    rho: usize,
    points: Vec<Elem>,
    /// `Tᵀ`, rows `g_j^(q^i)` for `i = 0..n`.
    t_transpose: FMatrix,
    t_inverse: FMatrix,
    /// Gabidulin code spanned by the last `k + μ` rows of `Tᵀ`.
    code: GabidulinCode,
}

/// Layered scheme over the default evaluation points `1, α, …, α^(n−1)`.
pub fn build_layered(
    tower: &Arc<FieldTower>,
    n: usize,
    k: usize,
    mu: usize,
    t: usize,
    rho: usize,
) -> Result<LayeredScheme> {
    let points = GabidulinCode::default_points(tower, n);
    LayeredScheme::with_points(tower, n, k, mu, t, rho, &points)
}

impl LayeredScheme {
    pub fn with_points(
        tower: &Arc<FieldTower>,
        n: usize,
        k: usize,
        mu: usize,
        t: usize,
        rho: usize,
        points: &[Elem],
    ) -> Result<Self> {
        if tower.m() < n {
            return Err(Error::PacketTooShort { m: tower.m(), n });
        }
        if k + mu + 2 * t + rho > n {
            return Err(Error::InvalidParameters(format!(
                "k + μ + 2t + ρ = {} exceeds n = {n}",
                k + mu + 2 * t + rho
            )));
        }
        if k + mu == 0 {
            return Err(Error::InvalidParameters(
                "k + μ must be at least 1".into(),
            ));
        }
        let full = GabidulinCode::build(tower, n, n, points)?;
        let t_transpose = full.generator().clone();
        let t_inverse = t_transpose.transpose().invert()?;
        let pad = n - k - mu;
        let shifted: Vec<Elem> = points
            .iter()
            .map(|&g| tower.frobenius(g, pad as i64))
            .collect();
        let code = GabidulinCode::build(tower, n, k + mu, &shifted)?;
        debug_assert_eq!(code.generator(), &t_transpose.row_range(pad, n)?);
        Ok(LayeredScheme {
            tower: tower.clone(),
            n,
            k,
            mu,
            t,
            rho,
            points: points.to_vec(),
            t_transpose,
            t_inverse,
            code,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn t_budget(&self) -> usize {
        self.t
    }

    pub fn rho_budget(&self) -> usize {
        self.rho
    }

    pub fn points(&self) -> &[Elem] {
        &self.points
    }

    pub fn padding(&self) -> usize {
        self.n - self.k - self.mu
    }

    /// The invertible `n × n` matrix `T`.
    pub fn t_matrix(&self) -> FMatrix {
        self.t_transpose.transpose()
    }

    pub fn t_inverse(&self) -> &FMatrix {
        &self.t_inverse
    }

    /// Generator of the `[n, k + μ]` error-control code.
    pub fn code(&self) -> &GabidulinCode {
        &self.code
    }

    /// Last `μ` rows of `Tᵀ`: generator of the `[n, μ]` secrecy code.
    pub fn secrecy_generator(&self) -> Result<FMatrix> {
        self.t_transpose.row_range(self.n - self.mu, self.n)
    }

    /// Rows of `T⁻¹` at the message positions, so that `s = H·x`.
    pub fn message_parity_check(&self) -> Result<FMatrix> {
        let p = self.padding();
        self.t_inverse.row_range(p, p + self.k)
    }

    /// Minimum rank distance of the error-control code, `n − k − μ + 1`.
    pub fn designed_distance(&self) -> usize {
        self.n - self.k - self.mu + 1
    }

    /// Brute-force MRD certificate for every trailing row block of `Tᵀ`
    /// small enough to enumerate.
    pub fn certify_trailing_blocks(&self) -> Result<bool> {
        for dim in 1..=self.n {
            let g = self.t_transpose.row_range(self.n - dim, self.n)?;
            let code = LinearCode::from_generator(g)?;
            if code.codebook_size() > crate::gabidulin::DISTANCE_ENUM_CAP {
                break;
            }
            if !code.is_mrd()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Recovers `s` from `y = Ax + z` with `rank A ≥ n − ρ` and
    /// `rank z ≤ t`, `A` over GF(q) with `n` columns.
    ///
    /// A full-column-rank `A` is reduced to `n` independent rows and inverted
    /// before syndrome decoding; otherwise the brute-force oracle runs.
    pub fn decode(&self, a: &FMatrix, y: &[Elem]) -> Result<Vec<Elem>> {
        if a.tower() != &self.tower {
            return Err(Error::TowerMismatch);
        }
        if a.layer() != Layer::Base {
            return Err(Error::LayerMismatch {
                expected: Layer::Base,
                got: a.layer(),
            });
        }
        if a.cols() != self.n || a.rows() != y.len() {
            return Err(Error::dim(format!(
                "transfer matrix {}x{} with {} packets for n = {}",
                a.rows(),
                a.cols(),
                y.len(),
                self.n
            )));
        }
        check_message(&self.tower, y, a.rows(), "received packets")?;
        let rank = a.rank();
        let required = self.n.saturating_sub(self.rho);
        if rank < required {
            return Err(Error::RankDeficient { rank, required });
        }
        let u = if rank == self.n {
            let (_, pivots) = a.transpose().rref();
            let square = a.select_rows(&pivots)?;
            let ys: Vec<Elem> = pivots.iter().map(|&i| y[i]).collect();
            let x = square.invert()?.apply(&ys)?;
            decode_syndrome(&self.code, &x, self.t)?
        } else {
            decode_oracle(&self.code, a, y, self.t, self.rho)?
        };
        Ok(u[..self.k].to_vec())
    }
}

impl StochasticEncoder for LayeredScheme {
    fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    fn block_len(&self) -> usize {
        self.n
    }

    fn message_len(&self) -> usize {
        self.k
    }

    fn randomness_len(&self) -> usize {
        self.mu
    }

    fn encode_with(&self, s: &[Elem], r: &[Elem]) -> Result<Vec<Elem>> {
        check_message(&self.tower, s, self.k, "message")?;
        check_message(&self.tower, r, self.mu, "randomness")?;
        let u: Vec<Elem> = s.iter().chain(r).copied().collect();
        self.code.encode(&u)
    }

    /// First `n − μ` rows of `T⁻¹`: they read off the padding and the
    /// message, and `x` is uniform on the coset they fix.
    fn coset_parity_check(&self) -> Option<FMatrix> {
        self.t_inverse.row_range(0, self.n - self.mu).ok()
    }
}

/// Either encoder family, as selected by a scheme descriptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scheme {
    Coset(CosetScheme),
    Layered(LayeredScheme),
}

impl Scheme {
    fn inner(&self) -> &dyn StochasticEncoder {
        match self {
            Scheme::Coset(c) => c,
            Scheme::Layered(l) => l,
        }
    }

    /// Decodes received packets. A coset scheme has no error control and
    /// requires an invertible `a`.
    pub fn decode(&self, a: &FMatrix, y: &[Elem]) -> Result<Vec<Elem>> {
        match self {
            Scheme::Layered(l) => l.decode(a, y),
            Scheme::Coset(c) => {
                let n = c.n();
                if a.cols() != n || a.rows() != y.len() {
                    return Err(Error::dim(format!(
                        "transfer matrix {}x{} with {} packets for n = {n}",
                        a.rows(),
                        a.cols(),
                        y.len()
                    )));
                }
                let rank = a.rank();
                if rank < n {
                    return Err(Error::RankDeficient { rank, required: n });
                }
                let (_, pivots) = a.transpose().rref();
                let ys: Vec<Elem> = pivots.iter().map(|&i| y[i]).collect();
                let x = a.select_rows(&pivots)?.invert()?.apply(&ys)?;
                c.decode(&x)
            }
        }
    }

    /// Error and erasure budgets `(t, ρ)` the scheme is built for.
    pub fn budgets(&self) -> (usize, usize) {
        match self {
            Scheme::Coset(_) => (0, 0),
            Scheme::Layered(l) => (l.t, l.rho),
        }
    }

    /// Number of wiretapped packets the scheme is meant to withstand.
    pub fn secrecy_budget(&self) -> usize {
        match self {
            Scheme::Coset(c) => c.n() - c.k(),
            Scheme::Layered(l) => l.mu,
        }
    }
}

impl StochasticEncoder for Scheme {
    fn tower(&self) -> &Arc<FieldTower> {
        self.inner().tower()
    }

    fn block_len(&self) -> usize {
        self.inner().block_len()
    }

    fn message_len(&self) -> usize {
        self.inner().message_len()
    }

    fn randomness_len(&self) -> usize {
        self.inner().randomness_len()
    }

    fn encode_with(&self, s: &[Elem], r: &[Elem]) -> Result<Vec<Elem>> {
        self.inner().encode_with(s, r)
    }

    fn coset_parity_check(&self) -> Option<FMatrix> {
        self.inner().coset_parity_check()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn gf8() -> Arc<FieldTower> {
        FieldTower::new(2, 3, &[1, 1, 0, 1]).unwrap()
    }

    fn example_scheme() -> CosetScheme {
        let t = gf8();
        let a = t.alpha();
        let h = FMatrix::row_vector(t.clone(), &[Elem::ONE, a, t.mul(a, a)]).unwrap();
        CosetScheme::new(h).unwrap()
    }

    #[test]
    fn coset_of_zero_is_the_parity_code() {
        let scheme = example_scheme();
        let coset = scheme.coset(&[Elem::ZERO]).unwrap();
        assert_eq!(coset.len(), 64);
        let code = LinearCode::from_parity_check(scheme.parity_check().clone()).unwrap();
        let mut words: Vec<_> = code.codewords().collect();
        let mut members = coset.clone();
        words.sort();
        members.sort();
        assert_eq!(words, members);
    }

    #[test]
    fn coset_round_trip_and_worked_form() {
        let scheme = example_scheme();
        let t = scheme.tower().clone();
        let a = t.alpha();
        for s in t.elements() {
            for seed in 0..20 {
                let x = scheme.encode(&[s], seed).unwrap();
                assert_eq!(scheme.decode(&x).unwrap(), vec![s]);
                // x1 = S + αx2 + α²x3
                let rest = t.add(t.mul(a, x[1]), t.mul(t.mul(a, a), x[2]));
                assert_eq!(x[0], t.add(s, rest));
            }
        }
        assert_eq!(scheme.decode(&[Elem::ZERO; 3]).unwrap(), vec![Elem::ZERO]);
    }

    #[test]
    fn coset_sampling_is_roughly_uniform() {
        let scheme = example_scheme();
        let s = [Elem::from_index(5)];
        let mut counts: HashMap<Vec<Elem>, u32> = HashMap::new();
        for seed in 0..6400 {
            *counts.entry(scheme.encode(&s, seed).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 64);
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - 100.0).powi(2) / 100.0)
            .sum();
        // 63 degrees of freedom; 0.999 quantile is about 103
        assert!(chi2 < 110.0, "chi2 = {chi2}");
    }

    #[test]
    fn encoding_is_deterministic_per_seed() {
        let scheme = example_scheme();
        let s = [Elem::from_index(3)];
        assert_eq!(scheme.encode(&s, 9).unwrap(), scheme.encode(&s, 9).unwrap());
    }

    #[test]
    fn layered_degenerate_scheme_is_a_bijection() {
        let t = FieldTower::with_default_modulus(2, 3).unwrap();
        let scheme = build_layered(&t, 3, 3, 0, 0, 0).unwrap();
        let tm = scheme.t_matrix();
        let s = vec![Elem::from_index(1), Elem::from_index(6), Elem::from_index(3)];
        assert_eq!(scheme.encode(&s, 0).unwrap(), tm.apply(&s).unwrap());
    }

    #[test]
    fn layered_message_is_a_syndrome() {
        let t = FieldTower::with_default_modulus(2, 4).unwrap();
        for (k, mu, tt) in [(1, 1, 1), (2, 2, 0), (1, 3, 0), (2, 1, 0)] {
            let scheme = build_layered(&t, 4, k, mu, tt, 0).unwrap();
            let h = scheme.message_parity_check().unwrap();
            if scheme.padding() == 0 {
                assert_eq!(h, scheme.t_inverse().row_range(0, k).unwrap());
            }
            for seed in 0..30u64 {
                let s = draw_uniform(&t, k, seed + 1000);
                let x = scheme.encode(&s, seed).unwrap();
                assert_eq!(h.apply(&x).unwrap(), s);
            }
        }
    }

    #[test]
    fn layered_output_lies_in_the_trailing_code() {
        let t = FieldTower::with_default_modulus(2, 4).unwrap();
        let scheme = build_layered(&t, 4, 1, 1, 1, 0).unwrap();
        let g = scheme.t_matrix().transpose().row_range(2, 4).unwrap();
        let code = LinearCode::from_generator(g).unwrap();
        for seed in 0..50 {
            let s = draw_uniform(&t, 1, seed);
            assert!(code.contains(&scheme.encode(&s, seed).unwrap()).unwrap());
        }
        assert_eq!(scheme.designed_distance(), 3);
    }

    #[test]
    fn every_trailing_block_is_mrd() {
        let t = FieldTower::with_default_modulus(2, 4).unwrap();
        let scheme = build_layered(&t, 4, 1, 1, 1, 0).unwrap();
        assert!(scheme.certify_trailing_blocks().unwrap());
        let secrecy = LinearCode::from_generator(scheme.secrecy_generator().unwrap()).unwrap();
        assert!(secrecy.is_mrd().unwrap());
    }

    #[test]
    fn rate_condition_and_packet_length_are_enforced() {
        let t = FieldTower::with_default_modulus(2, 4).unwrap();
        assert!(matches!(
            build_layered(&t, 4, 1, 1, 1, 1),
            Err(Error::InvalidParameters(_))
        ));
        assert!(build_layered(&t, 4, 1, 1, 1, 0).is_ok());
        assert!(build_layered(&t, 4, 0, 2, 1, 0).is_ok());
        assert_eq!(
            build_layered(&t, 5, 1, 1, 0, 0),
            Err(Error::PacketTooShort { m: 4, n: 5 })
        );
    }

    #[test]
    fn layered_decode_identity_channel() {
        let t = FieldTower::with_default_modulus(2, 3).unwrap();
        let scheme = build_layered(&t, 3, 1, 2, 0, 0).unwrap();
        let id = FMatrix::identity(t.clone(), Layer::Base, 3);
        for s in t.elements() {
            for seed in 0..5 {
                let x = scheme.encode(&[s], seed).unwrap();
                assert_eq!(scheme.decode(&id, &x).unwrap(), vec![s]);
            }
        }
    }

    #[test]
    fn layered_decode_with_redundant_and_deficient_transfer() {
        let t = FieldTower::with_default_modulus(2, 4).unwrap();
        let scheme = build_layered(&t, 4, 1, 1, 0, 1).unwrap();
        let tall = FMatrix::from_base_rows(
            t.clone(),
            &[[1, 1, 0, 0], [1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 1, 1]],
        )
        .unwrap();
        let deficient = FMatrix::from_base_rows(
            t.clone(),
            &[[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 1, 1, 0]],
        )
        .unwrap();
        for seed in 0..40 {
            let s = draw_uniform(&t, 1, seed + 77);
            let x = scheme.encode(&s, seed).unwrap();
            for a in [&tall, &deficient] {
                let y = a.apply(&x).unwrap();
                assert_eq!(scheme.decode(a, &y).unwrap(), s);
            }
        }
        let zero = FMatrix::zeros(t.clone(), Layer::Base, 4, 4);
        assert!(matches!(
            scheme.decode(&zero, &[Elem::ZERO; 4]),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn scheme_enum_delegates() {
        let coset = Scheme::Coset(example_scheme());
        assert_eq!(coset.message_len(), 1);
        assert_eq!(coset.randomness_len(), 2);
        assert_eq!(coset.secrecy_budget(), 2);
        let t = gf8();
        let id = FMatrix::identity(t.clone(), Layer::Base, 3);
        let s = [Elem::from_index(4)];
        let x = coset.encode(&s, 3).unwrap();
        assert_eq!(coset.decode(&id, &x).unwrap(), s.to_vec());
        let layered = Scheme::Layered(build_layered(&t, 3, 1, 2, 0, 0).unwrap());
        assert_eq!(layered.block_len(), 3);
        assert_eq!(layered.coset_parity_check().unwrap().rows(), 1);
    }
}
