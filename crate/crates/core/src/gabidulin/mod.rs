//! Linear rank-metric codes over GF(q^m), with Gabidulin codes as the MRD
//! family used throughout the crate.
//!
//! Codewords are column vectors: an `[n, k]` code with generator `G` (k×n)
//! and parity check `H` ((n−k)×n) is `{Gᵀu} = {x : Hx = 0}`.

mod decode;
mod product;

use std::ops::Deref;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldTower};
use crate::linalg::{FMatrix, Layer};

pub use decode::{
    ambiguity_witness, decode_oracle, decode_syndrome, vector_index, AmbiguityWitness,
    OracleDecoder, BALL_AMBIGUOUS, BALL_EMPTY, TABLE_CAP,
};
pub use product::{cartesian_product, ProductCode};

/// Largest codebook `q^(mk)` enumerated by [`LinearCode::min_rank_distance_bruteforce`].
pub const DISTANCE_ENUM_CAP: u64 = 1 << 20;
/// Largest codebook enumerated by [`decode_oracle`].
pub const ORACLE_ENUM_CAP: u64 = 1 << 16;

/// `log_q` of the rank-metric Singleton bound on the size of a code in
/// GF(q)^(n×m) with minimum rank distance `d`.
pub fn singleton_bound_exponent(n: usize, m: usize, d: usize) -> Option<usize> {
    let lo = n.min(m);
    if d == 0 || d > lo {
        return None;
    }
    Some(n.max(m) * (lo - d + 1))
}

/// Largest minimum rank distance allowed for an `[n, k]` linear code over
/// GF(q^m): `⌊min(1, m/n)(n−k)⌋ + 1`.
pub fn singleton_linear_bound(n: usize, m: usize, k: usize) -> usize {
    if m >= n {
        n - k + 1
    } else {
        m * (n - k) / n + 1
    }
}

pub(crate) fn codebook_size(tower: &FieldTower, k: usize) -> u64 {
    (tower.order() as u64).saturating_pow(k as u32)
}

/// Message vector with index `idx` in lexicographic order (first symbol most
/// significant).
pub(crate) fn message_at(tower: &FieldTower, k: usize, mut idx: u64, out: &mut [Elem]) {
    let order = tower.order() as u64;
    for slot in out[..k].iter_mut().rev() {
        *slot = Elem::from_index((idx % order) as u32);
        idx /= order;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    tower: Arc<FieldTower>,
    n: usize,
    k: usize,
    generator: FMatrix,
    parity_check: FMatrix,
    /// Gᵀ, cached for encoding.
    gt: FMatrix,
}

impl LinearCode {
    fn check_ext(m: &FMatrix) -> Result<()> {
        if m.layer() != Layer::Ext {
            return Err(Error::LayerMismatch {
                expected: Layer::Ext,
                got: m.layer(),
            });
        }
        Ok(())
    }

    /// Code spanned by the rows of a full-rank generator matrix; the parity
    /// check is the reduced echelon basis of its right null space.
    pub fn from_generator(generator: FMatrix) -> Result<Self> {
        Self::check_ext(&generator)?;
        let (k, n) = generator.shape();
        if k == 0 || k > n {
            return Err(Error::InvalidParameters(format!(
                "generator must have 1..={n} rows, got {k}"
            )));
        }
        if generator.rank() != k {
            return Err(Error::InvalidParameters("generator is not full rank".into()));
        }
        let parity_check = generator.right_null_space().into_basis();
        Ok(Self::assemble(generator, parity_check))
    }

    /// Code `{x : Hx = 0}` for a full-rank parity check `H`.
    pub fn from_parity_check(parity_check: FMatrix) -> Result<Self> {
        Self::check_ext(&parity_check)?;
        let (r, n) = parity_check.shape();
        if r >= n {
            return Err(Error::InvalidParameters(format!(
                "parity check must have fewer than {n} rows, got {r}"
            )));
        }
        if parity_check.rank() != r {
            return Err(Error::InvalidParameters(
                "parity check is not full rank".into(),
            ));
        }
        let generator = parity_check.right_null_space().into_basis();
        Ok(Self::assemble(generator, parity_check))
    }

    fn assemble(generator: FMatrix, parity_check: FMatrix) -> Self {
        let (k, n) = generator.shape();
        LinearCode {
            tower: generator.tower().clone(),
            n,
            k,
            gt: generator.transpose(),
            generator,
            parity_check,
        }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &FMatrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &FMatrix {
        &self.parity_check
    }

    /// `x = Gᵀu`.
    pub fn encode(&self, u: &[Elem]) -> Result<Vec<Elem>> {
        if u.len() != self.k {
            return Err(Error::dim(format!(
                "message of length {} for dimension {}",
                u.len(),
                self.k
            )));
        }
        self.gt.apply(u)
    }

    pub fn syndrome(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        self.parity_check.apply(x)
    }

    pub fn contains(&self, x: &[Elem]) -> Result<bool> {
        Ok(self.syndrome(x)?.iter().all(|e| e.is_zero()))
    }

    /// The unique `u` with `Gᵀu = x`.
    pub fn message_of(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        let sol = self.gt.solve(x)?;
        debug_assert!(sol.is_unique());
        Ok(sol.particular)
    }

    pub fn codebook_size(&self) -> u64 {
        codebook_size(&self.tower, self.k)
    }

    /// All codewords, messages in lexicographic order.
    pub fn codewords(&self) -> impl Iterator<Item = Vec<Elem>> + '_ {
        let mut u = vec![Elem::ZERO; self.k];
        (0..self.codebook_size()).map(move |idx| {
            message_at(&self.tower, self.k, idx, &mut u);
            self.gt.apply(&u).expect("dimension checked")
        })
    }

    /// Minimum rank weight over all nonzero codewords, which for a linear
    /// code equals the minimum rank distance.
    pub fn min_rank_distance_bruteforce(&self) -> Result<usize> {
        let size = self.codebook_size();
        if size > DISTANCE_ENUM_CAP {
            return Err(Error::CapExceeded {
                requested: size as u128,
                cap: DISTANCE_ENUM_CAP as u128,
            });
        }
        let d = (1..size)
            .into_par_iter()
            .map_init(
                || vec![Elem::ZERO; self.k],
                |u, idx| {
                    message_at(&self.tower, self.k, idx, u);
                    let x = self.gt.apply(u).expect("dimension checked");
                    self.tower.span_dim(&x)
                },
            )
            .min()
            .unwrap_or(self.n + 1);
        Ok(d)
    }

    /// Whether the brute-force distance meets the linear Singleton bound
    /// (`n − k + 1` when `m ≥ n`).
    pub fn is_mrd(&self) -> Result<bool> {
        let d = self.min_rank_distance_bruteforce()?;
        Ok(d == singleton_linear_bound(self.n, self.tower.m(), self.k))
    }
}

/// Gabidulin code: generator rows are the Frobenius powers `g_j^(q^i)` of
/// `n` evaluation points that are linearly independent over GF(q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GabidulinCode {
    code: LinearCode,
    points: Vec<Elem>,
    /// Points `h` of the structured parity check with rows `h_j^(q^i)`,
    /// `i < n − k`, used by the syndrome decoder.
    dual_points: Vec<Elem>,
}

impl Deref for GabidulinCode {
    type Target = LinearCode;

    fn deref(&self) -> &LinearCode {
        &self.code
    }
}

/// `rows × n` matrix with entries `points_j^(q^(first + i))`.
pub(crate) fn moore_matrix(
    tower: &Arc<FieldTower>,
    points: &[Elem],
    first: i64,
    rows: usize,
) -> FMatrix {
    let n = points.len();
    let mut data = Vec::with_capacity(rows * n);
    for i in 0..rows as i64 {
        data.extend(points.iter().map(|&g| tower.frobenius(g, first + i)));
    }
    FMatrix::new(tower.clone(), Layer::Ext, rows, n, data).expect("entries come from the tower")
}

impl GabidulinCode {
    pub fn build(tower: &Arc<FieldTower>, n: usize, k: usize, points: &[Elem]) -> Result<Self> {
        if tower.m() < n {
            return Err(Error::PacketTooShort { m: tower.m(), n });
        }
        if k == 0 || k > n {
            return Err(Error::InvalidParameters(format!(
                "dimension k = {k} must lie in 1..={n}"
            )));
        }
        if points.len() != n {
            return Err(Error::dim(format!(
                "{} evaluation points for length {n}",
                points.len()
            )));
        }
        if let Some(&bad) = points.iter().find(|&&g| !tower.contains(g)) {
            return Err(Error::ElementOutOfRange {
                index: bad.index(),
                order: tower.order(),
            });
        }
        if tower.span_dim(points) != n {
            return Err(Error::DependentPoints);
        }
        let generator = moore_matrix(tower, points, 0, k);
        let code = LinearCode::from_generator(generator)?;
        let dual_points = Self::compute_dual_points(tower, points, k)?;
        Ok(GabidulinCode {
            code,
            points: points.to_vec(),
            dual_points,
        })
    }

    /// Points `1, α, …, α^(n−1)`.
    pub fn default_points(tower: &FieldTower, n: usize) -> Vec<Elem> {
        let a = tower.alpha();
        (0..n as u64).map(|i| tower.pow(a, i)).collect()
    }

    pub fn build_default(tower: &Arc<FieldTower>, n: usize, k: usize) -> Result<Self> {
        Self::build(tower, n, k, &Self::default_points(tower, n))
    }

    fn compute_dual_points(tower: &Arc<FieldTower>, points: &[Elem], k: usize) -> Result<Vec<Elem>> {
        let n = points.len();
        let r = n - k;
        if r == 0 {
            return Ok(Vec::new());
        }
        // h' spans the kernel of the (n−1)×n Moore matrix; h = h'^(q^-(r−1))
        let moore = moore_matrix(tower, points, 0, n - 1);
        let kernel = moore.right_null_space();
        if kernel.dim() != 1 {
            return Err(Error::DependentPoints);
        }
        let h: Vec<Elem> = kernel
            .basis()
            .row(0)
            .iter()
            .map(|&e| tower.frobenius(e, -(r as i64 - 1)))
            .collect();
        let structured = moore_matrix(tower, &h, 0, r);
        let check = structured.mul(&moore_matrix(tower, points, 0, k).transpose())?;
        if !check.is_zero() {
            return Err(Error::DecodingFailure(
                "structured parity check does not annihilate the code".into(),
            ));
        }
        Ok(h)
    }

    pub fn points(&self) -> &[Elem] {
        &self.points
    }

    pub fn dual_points(&self) -> &[Elem] {
        &self.dual_points
    }

    pub fn linear(&self) -> &LinearCode {
        &self.code
    }

    /// Designed distance `n − k + 1`.
    pub fn designed_distance(&self) -> usize {
        self.n() - self.k() + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32, m: usize) -> Arc<FieldTower> {
        FieldTower::with_default_modulus(q, m).unwrap()
    }

    #[test]
    fn generator_follows_frobenius_powers() {
        let t = gf(2, 3);
        let code = GabidulinCode::build_default(&t, 3, 2).unwrap();
        let g = code.generator();
        for (j, &p) in code.points().iter().enumerate() {
            assert_eq!(g.get(0, j), p);
            assert_eq!(g.get(1, j), t.mul(p, p));
        }
        let hg = code.parity_check().mul(&g.transpose()).unwrap();
        assert!(hg.is_zero());
        assert_eq!(code.parity_check().rank(), 1);
    }

    #[test]
    fn gf8_brute_force_distances() {
        let t = gf(2, 3);
        let c32 = GabidulinCode::build_default(&t, 3, 2).unwrap();
        assert_eq!(c32.codebook_size(), 64);
        assert_eq!(c32.min_rank_distance_bruteforce().unwrap(), 2);
        let c31 = GabidulinCode::build_default(&t, 3, 1).unwrap();
        assert_eq!(c31.min_rank_distance_bruteforce().unwrap(), 3);
        let c33 = GabidulinCode::build_default(&t, 3, 3).unwrap();
        assert_eq!(c33.min_rank_distance_bruteforce().unwrap(), 1);
        assert!(c33.is_mrd().unwrap());
    }

    #[test]
    fn gf16_four_two_has_distance_three() {
        let t = gf(2, 4);
        let code = GabidulinCode::build_default(&t, 4, 2).unwrap();
        assert_eq!(code.min_rank_distance_bruteforce().unwrap(), 3);
    }

    #[test]
    fn one_dimensional_code_generator_is_the_worked_parity_check() {
        let t = FieldTower::new(2, 3, &[1, 1, 0, 1]).unwrap();
        let a = t.alpha();
        let code = GabidulinCode::build(&t, 3, 1, &[Elem::ONE, a, t.mul(a, a)]).unwrap();
        let expected = FMatrix::row_vector(t.clone(), &[Elem::ONE, a, t.mul(a, a)]).unwrap();
        assert_eq!(code.generator(), &expected);
        // used as a parity check it defines a [3,2] MRD code
        let dual = LinearCode::from_parity_check(expected).unwrap();
        assert_eq!(dual.k(), 2);
        assert!(dual.is_mrd().unwrap());
    }

    #[test]
    fn dependent_points_are_rejected() {
        let t = gf(2, 3);
        let a = t.alpha();
        assert_eq!(
            GabidulinCode::build(&t, 3, 2, &[Elem::ONE, Elem::ONE, a]),
            Err(Error::DependentPoints)
        );
        assert_eq!(
            GabidulinCode::build_default(&t, 4, 2),
            Err(Error::PacketTooShort { m: 3, n: 4 })
        );
        assert!(GabidulinCode::build_default(&t, 3, 0).is_err());
    }

    #[test]
    fn encoding_is_injective_and_in_the_kernel() {
        let t = gf(2, 3);
        let code = GabidulinCode::build_default(&t, 3, 2).unwrap();
        assert_eq!(code.encode(&[Elem::ZERO; 2]).unwrap(), vec![Elem::ZERO; 3]);
        let words: Vec<Vec<Elem>> = code.codewords().collect();
        let distinct: std::collections::HashSet<_> = words.iter().cloned().collect();
        assert_eq!(distinct.len(), 64);
        for w in &words {
            assert!(code.contains(w).unwrap());
            assert_eq!(code.encode(&code.message_of(w).unwrap()).unwrap(), *w);
        }
        assert!(code.encode(&[Elem::ONE]).is_err());
    }

    #[test]
    fn subfield_code_is_not_mrd() {
        // (u1, u1, u2): binary entries, distance 1 < n − k + 1
        let t = gf(2, 3);
        let g = FMatrix::from_base_rows(t, &[[1, 1, 0], [0, 0, 1]]).unwrap().embed();
        let code = LinearCode::from_generator(g).unwrap();
        assert_eq!(code.min_rank_distance_bruteforce().unwrap(), 1);
        assert!(!code.is_mrd().unwrap());
    }

    #[test]
    fn singleton_bound_holds_with_equality_for_gabidulin() {
        for (m, n) in [(3, 3), (4, 4), (4, 3), (5, 3)] {
            let t = gf(2, m);
            for k in 1..=n {
                let code = GabidulinCode::build_default(&t, n, k).unwrap();
                let d = code.min_rank_distance_bruteforce().unwrap();
                assert_eq!(d, n - k + 1);
                let log_size = m * k;
                assert_eq!(singleton_bound_exponent(n, m, d), Some(log_size));
            }
        }
        // a non-MRD code sits strictly below the bound
        let t = gf(2, 3);
        let g = FMatrix::from_base_rows(t, &[[1, 1, 0], [0, 0, 1]]).unwrap().embed();
        let code = LinearCode::from_generator(g).unwrap();
        let d = code.min_rank_distance_bruteforce().unwrap();
        assert!(3 * code.k() < singleton_bound_exponent(3, 3, d).unwrap());
    }

    #[test]
    fn short_packets_lower_the_bound() {
        assert_eq!(singleton_linear_bound(4, 2, 2), 2);
        assert_eq!(singleton_linear_bound(4, 4, 2), 3);
        assert_eq!(singleton_bound_exponent(4, 2, 3), None);
    }

    #[test]
    fn cap_is_enforced() {
        let t = gf(2, 8);
        let code = GabidulinCode::build_default(&t, 4, 3).unwrap();
        assert!(matches!(
            code.min_rank_distance_bruteforce(),
            Err(Error::CapExceeded { .. })
        ));
    }
}
