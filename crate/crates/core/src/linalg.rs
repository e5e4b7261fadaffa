//! Dense matrices over either layer of a [`FieldTower`], with Gaussian
//! elimination based rank, row space, null space, inversion and solving.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{phi_expand, Elem, FieldTower};

/// Which field of the tower a matrix's entries live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Layer {
    /// GF(q)
    Base,
    /// GF(q^m)
    Ext,
}

#[derive(Clone, Copy)]
struct Arith<'a> {
    tower: &'a FieldTower,
    layer: Layer,
}

impl Arith<'_> {
    fn add(&self, a: Elem, b: Elem) -> Elem {
        match self.layer {
            Layer::Ext => self.tower.add(a, b),
            Layer::Base => Elem::from_index(self.tower.base_add(a.index(), b.index())),
        }
    }

    fn sub(&self, a: Elem, b: Elem) -> Elem {
        match self.layer {
            Layer::Ext => self.tower.sub(a, b),
            Layer::Base => Elem::from_index(self.tower.base_sub(a.index(), b.index())),
        }
    }

    fn neg(&self, a: Elem) -> Elem {
        match self.layer {
            Layer::Ext => self.tower.neg(a),
            Layer::Base => Elem::from_index(self.tower.base_neg(a.index())),
        }
    }

    fn mul(&self, a: Elem, b: Elem) -> Elem {
        match self.layer {
            Layer::Ext => self.tower.mul(a, b),
            Layer::Base => Elem::from_index(self.tower.base_mul(a.index(), b.index())),
        }
    }

    fn inv(&self, a: Elem) -> Result<Elem> {
        match self.layer {
            Layer::Ext => self.tower.inv(a),
            Layer::Base => self.tower.base_inv(a.index()).map(Elem::from_index),
        }
    }

    fn in_range(&self, a: Elem) -> bool {
        match self.layer {
            Layer::Ext => self.tower.contains(a),
            Layer::Base => a.index() < self.tower.q(),
        }
    }
}

#[derive(Clone)]
pub struct FMatrix {
    tower: Arc<FieldTower>,
    layer: Layer,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl PartialEq for FMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.layer == other.layer
            && self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
            && (Arc::ptr_eq(&self.tower, &other.tower) || self.tower == other.tower)
    }
}

impl Eq for FMatrix {}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FMatrix<{:?}, {}x{}> [", self.layer, self.rows, self.cols)?;
        f.write_str(&self.to_text())?;
        f.write_str("]")
    }
}

/// Result of [`FMatrix::solve`]: every solution is `particular` plus a
/// combination of the kernel basis rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub particular: Vec<Elem>,
    pub kernel: Subspace,
}

impl SolutionSet {
    pub fn is_unique(&self) -> bool {
        self.kernel.dim() == 0
    }
}

impl FMatrix {
    pub(crate) fn from_raw(
        tower: Arc<FieldTower>,
        layer: Layer,
        rows: usize,
        cols: usize,
        data: Vec<Elem>,
    ) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        FMatrix {
            tower,
            layer,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(tower: Arc<FieldTower>, layer: Layer, rows: usize, cols: usize) -> Self {
        Self::from_raw(tower, layer, rows, cols, vec![Elem::ZERO; rows * cols])
    }

    pub fn identity(tower: Arc<FieldTower>, layer: Layer, n: usize) -> Self {
        let mut m = Self::zeros(tower, layer, n, n);
        for i in 0..n {
            m.data[i * n + i] = Elem::ONE;
        }
        m
    }

    /// Checked constructor from row-major entries.
    pub fn new(
        tower: Arc<FieldTower>,
        layer: Layer,
        rows: usize,
        cols: usize,
        data: Vec<Elem>,
    ) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let m = Self::from_raw(tower, layer, rows, cols, data);
        if let Some(&bad) = m.data.iter().find(|&&e| !m.arith().in_range(e)) {
            return Err(match layer {
                Layer::Base => Error::DigitOutOfRange {
                    digit: bad.index(),
                    q: m.tower.q(),
                },
                Layer::Ext => Error::ElementOutOfRange {
                    index: bad.index(),
                    order: m.tower.order(),
                },
            });
        }
        Ok(m)
    }

    pub fn from_rows(tower: Arc<FieldTower>, layer: Layer, rows: &[Vec<Elem>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dim("ragged rows"));
        }
        let data = rows.iter().flatten().copied().collect();
        Self::new(tower, layer, rows.len(), cols, data)
    }

    /// GF(q) matrix from integer digit rows.
    pub fn from_base_rows<R: AsRef<[u32]>>(tower: Arc<FieldTower>, rows: &[R]) -> Result<Self> {
        let rows: Vec<Vec<Elem>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&d| Elem::from_index(d)).collect())
            .collect();
        Self::from_rows(tower, Layer::Base, &rows)
    }

    /// A single row over GF(q^m).
    pub fn row_vector(tower: Arc<FieldTower>, v: &[Elem]) -> Result<Self> {
        Self::new(tower, Layer::Ext, 1, v.len(), v.to_vec())
    }

    fn arith(&self) -> Arith<'_> {
        Arith {
            tower: &self.tower,
            layer: self.layer,
        }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Elem {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        assert!(r < self.rows && c < self.cols);
        debug_assert!(self.arith().in_range(v));
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    fn check_compatible(&self, other: &FMatrix) -> Result<()> {
        if !(Arc::ptr_eq(&self.tower, &other.tower) || self.tower == other.tower) {
            return Err(Error::TowerMismatch);
        }
        if self.layer != other.layer {
            return Err(Error::LayerMismatch {
                expected: self.layer,
                got: other.layer,
            });
        }
        Ok(())
    }

    /// Promotes a GF(q) matrix to GF(q^m) via the subfield embedding.
    pub fn embed(&self) -> FMatrix {
        let mut out = self.clone();
        out.layer = Layer::Ext;
        out
    }

    /// Views a GF(q^m) matrix as a GF(q) matrix, failing unless every entry
    /// lies in the subfield.
    pub fn restrict_to_base(&self) -> Result<FMatrix> {
        if self.layer == Layer::Base {
            return Ok(self.clone());
        }
        if let Some(bad) = self.data.iter().find(|e| e.index() >= self.tower.q()) {
            return Err(Error::DigitOutOfRange {
                digit: bad.index(),
                q: self.tower.q(),
            });
        }
        let mut out = self.clone();
        out.layer = Layer::Base;
        Ok(out)
    }

    pub fn transpose(&self) -> FMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.data[r * self.cols + c]);
            }
        }
        Self::from_raw(self.tower.clone(), self.layer, self.cols, self.rows, data)
    }

    pub fn mul(&self, other: &FMatrix) -> Result<FMatrix> {
        self.check_compatible(other)?;
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.arith();
        let mut data = vec![Elem::ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    data[idx] = f.add(data[idx], f.mul(a, other.data[k * other.cols + j]));
                }
            }
        }
        Ok(Self::from_raw(
            self.tower.clone(),
            self.layer,
            self.rows,
            other.cols,
            data,
        ))
    }

    fn zip_with(&self, other: &FMatrix, op: impl Fn(Elem, Elem) -> Elem) -> Result<FMatrix> {
        self.check_compatible(other)?;
        if self.shape() != other.shape() {
            return Err(Error::dim(format!(
                "shape {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Self::from_raw(
            self.tower.clone(),
            self.layer,
            self.rows,
            self.cols,
            data,
        ))
    }

    pub fn add(&self, other: &FMatrix) -> Result<FMatrix> {
        let f = self.arith();
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &FMatrix) -> Result<FMatrix> {
        let f = self.arith();
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn neg(&self) -> FMatrix {
        let f = self.arith();
        let data = self.data.iter().map(|&a| f.neg(a)).collect();
        Self::from_raw(self.tower.clone(), self.layer, self.rows, self.cols, data)
    }

    /// Multiplies every entry by a scalar of the matrix's own layer.
    pub fn scale(&self, c: Elem) -> FMatrix {
        let f = self.arith();
        let data = self.data.iter().map(|&a| f.mul(c, a)).collect();
        Self::from_raw(self.tower.clone(), self.layer, self.rows, self.cols, data)
    }

    /// Applies the matrix to a column vector over GF(q^m). Entries of a GF(q)
    /// matrix act as subfield scalars, which is the GF(q)-linear action of
    /// `A` on the rows of `φ(x)`.
    pub fn apply(&self, v: &[Elem]) -> Result<Vec<Elem>> {
        if v.len() != self.cols {
            return Err(Error::dim(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let t = &*self.tower;
        let mut out = vec![Elem::ZERO; self.rows];
        for (r, slot) in out.iter_mut().enumerate() {
            let row = self.row(r);
            let mut acc = Elem::ZERO;
            for (&a, &x) in row.iter().zip(v) {
                if a.is_zero() || x.is_zero() {
                    continue;
                }
                let term = match self.layer {
                    Layer::Base => t.scale(a.index(), x),
                    Layer::Ext => t.mul(a, x),
                };
                acc = t.add(acc, term);
            }
            *slot = acc;
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &FMatrix) -> Result<FMatrix> {
        self.check_compatible(other)?;
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::dim(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self::from_raw(
            self.tower.clone(),
            self.layer,
            self.rows + other.rows,
            cols,
            data,
        ))
    }

    pub fn hstack(&self, other: &FMatrix) -> Result<FMatrix> {
        self.transpose()
            .vstack(&other.transpose())
            .map(|m| m.transpose())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Result<FMatrix> {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            if r >= self.rows {
                return Err(Error::dim(format!("row {r} of {}", self.rows)));
            }
            data.extend_from_slice(self.row(r));
        }
        Ok(Self::from_raw(
            self.tower.clone(),
            self.layer,
            idx.len(),
            self.cols,
            data,
        ))
    }

    pub fn row_range(&self, start: usize, end: usize) -> Result<FMatrix> {
        let idx: Vec<usize> = (start..end).collect();
        self.select_rows(&idx)
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (FMatrix, Vec<usize>) {
        let f = self.arith();
        let mut a = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    a.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(a[r * cols + c]).expect("pivot is nonzero");
            for j in c..cols {
                a[r * cols + j] = f.mul(inv, a[r * cols + j]);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = a[i * cols + c];
                if factor.is_zero() {
                    continue;
                }
                for j in c..cols {
                    let sub = f.mul(factor, a[r * cols + j]);
                    a[i * cols + j] = f.sub(a[i * cols + j], sub);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (
            Self::from_raw(self.tower.clone(), self.layer, rows, cols, a),
            pivots,
        )
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn row_space(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let basis = r.row_range(0, pivots.len()).expect("pivot rows exist");
        Subspace {
            basis: basis.with_cols(self.cols),
            pivots,
        }
    }

    fn with_cols(mut self, cols: usize) -> Self {
        if self.rows == 0 {
            self.cols = cols;
        }
        self
    }

    /// `{v : M v = 0}` as a subspace of the column space dimension.
    pub fn right_null_space(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let f = self.arith();
        let cols = self.cols;
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        let mut data = Vec::with_capacity(free.len() * cols);
        for &fc in &free {
            let mut v = vec![Elem::ZERO; cols];
            v[fc] = Elem::ONE;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(i, fc));
            }
            data.extend(v);
        }
        Self::from_raw(self.tower.clone(), self.layer, free.len(), cols, data).row_space()
    }

    /// `{w : w M = 0}`.
    pub fn left_null_space(&self) -> Subspace {
        self.transpose().right_null_space()
    }

    pub fn invert(&self) -> Result<FMatrix> {
        if self.rows != self.cols {
            return Err(Error::dim(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let aug = self.hstack(&FMatrix::identity(self.tower.clone(), self.layer, n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            data.extend_from_slice(&r.row(i)[n..]);
        }
        Ok(Self::from_raw(self.tower.clone(), self.layer, n, n, data))
    }

    /// All solutions of `M v = b`, with `b` over the matrix's layer.
    pub fn solve(&self, b: &[Elem]) -> Result<SolutionSet> {
        if b.len() != self.rows {
            return Err(Error::dim(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let f = self.arith();
        if let Some(&bad) = b.iter().find(|&&e| !f.in_range(e)) {
            return Err(Error::ElementOutOfRange {
                index: bad.index(),
                order: self.tower.order(),
            });
        }
        let col = Self::from_raw(self.tower.clone(), self.layer, self.rows, 1, b.to_vec());
        let aug = self.hstack(&col)?;
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(Error::Inconsistent);
        }
        let mut particular = vec![Elem::ZERO; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            particular[pc] = r.get(i, self.cols);
        }
        Ok(SolutionSet {
            particular,
            kernel: self.right_null_space(),
        })
    }

    /// Text form: one row per line, entries separated by spaces; GF(q)
    /// entries as integers and GF(q^m) entries as φ-digit strings.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let line: Vec<String> = self
                .row(r)
                .iter()
                .map(|&e| match self.layer {
                    Layer::Base => e.index().to_string(),
                    Layer::Ext => self.tower.format_elem(e),
                })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses [`FMatrix::to_text`] output. Blank lines and `#` comments are
    /// ignored.
    pub fn parse_text(tower: Arc<FieldTower>, layer: Layer, text: &str) -> Result<FMatrix> {
        const MAX_ENTRIES: usize = 1 << 20;
        let mut rows: Vec<Vec<Elem>> = Vec::new();
        let mut total = 0usize;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| match layer {
                    Layer::Base => tok
                        .parse::<u32>()
                        .map_err(|e| Error::parse(format!("bad entry {tok:?}: {e}")))
                        .and_then(|d| {
                            if d < tower.q() {
                                Ok(Elem::from_index(d))
                            } else {
                                Err(Error::DigitOutOfRange { digit: d, q: tower.q() })
                            }
                        }),
                    Layer::Ext => tower.parse_elem(tok),
                })
                .collect::<Result<Vec<_>>>()?;
            total += row.len();
            if total > MAX_ENTRIES {
                return Err(Error::parse("matrix too large"));
            }
            rows.push(row);
        }
        Self::from_rows(tower, layer, &rows)
    }
}

/// A subspace given by a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: FMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &FMatrix {
        &self.basis
    }

    pub fn into_basis(self) -> FMatrix {
        self.basis
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        Ok(self.basis.vstack(&other.basis)?.row_space())
    }

    /// `dim U + dim V − dim(U + V)`.
    pub fn intersect_dim(&self, other: &Subspace) -> Result<usize> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::dim("subspaces of different ambient spaces"));
        }
        Ok(self.dim() + other.dim() - self.sum(other)?.dim())
    }

    pub fn contains(&self, v: &[Elem]) -> Result<bool> {
        let row = FMatrix::new(
            self.basis.tower().clone(),
            self.basis.layer(),
            1,
            v.len(),
            v.to_vec(),
        )?;
        Ok(self.basis.vstack(&row)?.rank() == self.dim())
    }
}

/// Rank distance `rank(Y − X)` between two matrices of the same layer.
pub fn rank_distance(x: &FMatrix, y: &FMatrix) -> Result<usize> {
    Ok(y.sub(x)?.rank())
}

/// Rank of `φ(v)` over GF(q).
pub fn rank_weight(tower: &FieldTower, v: &[Elem]) -> usize {
    tower.span_dim(v)
}

/// Rank distance between two vectors over GF(q^m).
pub fn rank_distance_vec(tower: &FieldTower, x: &[Elem], y: &[Elem]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::dim("vectors of different length"));
    }
    let diff: Vec<Elem> = x.iter().zip(y).map(|(&a, &b)| tower.sub(b, a)).collect();
    Ok(tower.span_dim(&diff))
}

/// Expanded GF(q) rank of a matrix over GF(q^m), i.e. `rank φ(M)` with each
/// column expanded into `m` columns.
pub fn expanded_rank(m: &FMatrix) -> usize {
    match m.layer() {
        Layer::Base => m.rank(),
        Layer::Ext => {
            let tower = m.tower();
            let mut out = phi_expand(tower, &m.column(0));
            for c in 1..m.cols() {
                out = out.hstack(&phi_expand(tower, &m.column(c))).expect("same rows");
            }
            out.rank()
        }
    }
}

/// Every vector in GF(q^m)^len of rank weight at most `t`, in
/// [`crate::gabidulin::vector_index`] order.
pub fn low_rank_vectors(tower: &FieldTower, len: usize, t: usize) -> Result<Vec<Vec<Elem>>> {
    let order = tower.order() as u128;
    let total = order.pow(len as u32);
    if total > crate::gabidulin::TABLE_CAP as u128 {
        return Err(Error::CapExceeded {
            requested: total,
            cap: crate::gabidulin::TABLE_CAP as u128,
        });
    }
    let mut out = Vec::new();
    let mut v = vec![Elem::ZERO; len];
    for idx in 0..total as u64 {
        let mut rest = idx;
        for slot in v.iter_mut() {
            *slot = Elem::from_index((rest % order as u64) as u32);
            rest /= order as u64;
        }
        if tower.span_dim(&v) <= t {
            out.push(v.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf2() -> Arc<FieldTower> {
        FieldTower::new(2, 1, &[0, 1]).unwrap()
    }

    fn gf8() -> Arc<FieldTower> {
        FieldTower::new(2, 3, &[1, 1, 0, 1]).unwrap()
    }

    fn random(t: &Arc<FieldTower>, layer: Layer, r: usize, c: usize, rng: &mut ChaCha8Rng) -> FMatrix {
        let bound = match layer {
            Layer::Base => t.q(),
            Layer::Ext => t.order(),
        };
        let data = (0..r * c).map(|_| Elem::from_index(rng.gen_range(0..bound))).collect();
        FMatrix::new(t.clone(), layer, r, c, data).unwrap()
    }

    #[test]
    fn rank_examples() {
        let t = gf8();
        assert_eq!(FMatrix::zeros(t.clone(), Layer::Base, 3, 4).rank(), 0);
        assert_eq!(FMatrix::identity(t.clone(), Layer::Ext, 5).rank(), 5);
        let b = FMatrix::from_base_rows(t, &[[1, 0, 1], [0, 1, 1]]).unwrap();
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn rank_weight_examples() {
        let t = gf8();
        let a = t.alpha();
        assert_eq!(rank_weight(&t, &[Elem::ZERO; 3]), 0);
        assert_eq!(rank_weight(&t, &[Elem::ONE, a, t.mul(a, a)]), 3);
        assert_eq!(rank_weight(&t, &[Elem::ONE, Elem::ONE, Elem::ZERO]), 1);
    }

    #[test]
    fn intersections() {
        let t = gf2();
        let x = FMatrix::from_base_rows(t.clone(), &[[1, 0]]).unwrap().row_space();
        let y = FMatrix::from_base_rows(t, &[[0, 1]]).unwrap().row_space();
        assert_eq!(x.intersect_dim(&y).unwrap(), 0);
        assert_eq!(x.intersect_dim(&x).unwrap(), 1);
    }

    #[test]
    fn invert_and_singular() {
        let t = gf8();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut inverted = 0;
        while inverted < 20 {
            let m = random(&t, Layer::Ext, 4, 4, &mut rng);
            match m.invert() {
                Ok(inv) => {
                    assert_eq!(m.mul(&inv).unwrap(), FMatrix::identity(t.clone(), Layer::Ext, 4));
                    inverted += 1;
                }
                Err(e) => {
                    assert_eq!(e, Error::Singular);
                    assert!(m.rank() < 4);
                }
            }
        }
        let singular = FMatrix::from_base_rows(t, &[[1, 1], [1, 1]]).unwrap();
        assert_eq!(singular.invert(), Err(Error::Singular));
    }

    #[test]
    fn solve_distinguishes_inconsistent_from_unique() {
        let t = gf2();
        let m = FMatrix::from_base_rows(t.clone(), &[[1, 1], [1, 1]]).unwrap();
        assert_eq!(m.solve(&[Elem::ONE, Elem::ZERO]), Err(Error::Inconsistent));
        let sol = m.solve(&[Elem::ONE, Elem::ONE]).unwrap();
        assert_eq!(sol.kernel.dim(), 1);
        let id = FMatrix::identity(t, Layer::Base, 2);
        let sol = id.solve(&[Elem::ONE, Elem::ZERO]).unwrap();
        assert!(sol.is_unique());
        assert_eq!(sol.particular, vec![Elem::ONE, Elem::ZERO]);
    }

    #[test]
    fn layer_and_tower_checks() {
        let t = gf8();
        let base = FMatrix::identity(t.clone(), Layer::Base, 2);
        let ext = FMatrix::identity(t.clone(), Layer::Ext, 2);
        assert!(matches!(base.mul(&ext), Err(Error::LayerMismatch { .. })));
        assert_eq!(base.embed().mul(&ext).unwrap(), ext);
        let other = FMatrix::identity(FieldTower::with_default_modulus(2, 4).unwrap(), Layer::Base, 2);
        assert_eq!(base.add(&other), Err(Error::TowerMismatch));
        let a = FMatrix::row_vector(t.clone(), &[t.alpha()]).unwrap();
        assert!(a.restrict_to_base().is_err());
        assert!(matches!(
            FMatrix::from_base_rows(t, &[[2u32]]),
            Err(Error::DigitOutOfRange { .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let t = gf8();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for layer in [Layer::Base, Layer::Ext] {
            let m = random(&t, layer, 3, 4, &mut rng);
            let back = FMatrix::parse_text(t.clone(), layer, &m.to_text()).unwrap();
            assert_eq!(back, m);
        }
        assert!(FMatrix::parse_text(t.clone(), Layer::Base, "1 0\n1").is_err());
        assert!(FMatrix::parse_text(t.clone(), Layer::Base, "1 2").is_err());
        assert!(FMatrix::parse_text(t, Layer::Ext, "01").is_err());
    }

    fn matrices() -> impl Strategy<Value = (usize, u64)> {
        (0usize..3, any::<u64>())
    }

    fn towers() -> [Arc<FieldTower>; 3] {
        [gf2(), gf8(), FieldTower::with_default_modulus(3, 2).unwrap()]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn rank_inequalities((which, seed) in matrices(), r in 1usize..5, k in 1usize..5, c in 1usize..5, ext in any::<bool>()) {
            let t = &towers()[which];
            let layer = if ext { Layer::Ext } else { Layer::Base };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random(t, layer, r, k, &mut rng);
            let b = random(t, layer, k, c, &mut rng);
            let a2 = random(t, layer, r, k, &mut rng);
            let ab = a.mul(&b).unwrap().rank();
            prop_assert!(ab <= a.rank().min(b.rank()));
            prop_assert!(ab + k >= a.rank() + b.rank());
            prop_assert!(a.add(&a2).unwrap().rank() <= a.rank() + a2.rank());
        }

        #[test]
        fn rank_nullity((which, seed) in matrices(), r in 0usize..6, c in 1usize..6, ext in any::<bool>()) {
            let t = &towers()[which];
            let layer = if ext { Layer::Ext } else { Layer::Base };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random(t, layer, r, c, &mut rng);
            let kernel = m.right_null_space();
            prop_assert_eq!(m.rank() + kernel.dim(), c);
            for v in kernel.basis().to_rows() {
                prop_assert!(m.apply(&v).unwrap().iter().all(|e| e.is_zero()));
            }
        }

        #[test]
        fn subfield_rank_is_preserved((which, seed) in matrices(), r in 1usize..6, c in 1usize..6) {
            let t = &towers()[which];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random(t, Layer::Base, r, c, &mut rng);
            prop_assert_eq!(m.rank(), m.embed().rank());
        }

        #[test]
        fn rank_distance_is_a_metric((which, seed) in matrices(), r in 1usize..5, c in 1usize..5) {
            let t = &towers()[which];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random(t, Layer::Base, r, c, &mut rng);
            let y = random(t, Layer::Base, r, c, &mut rng);
            let z = random(t, Layer::Base, r, c, &mut rng);
            prop_assert_eq!(rank_distance(&x, &x).unwrap(), 0);
            prop_assert_eq!(rank_distance(&x, &y).unwrap(), rank_distance(&y, &x).unwrap());
            prop_assert!(rank_distance(&x, &z).unwrap() <= rank_distance(&x, &y).unwrap() + rank_distance(&y, &z).unwrap());
            if x != y {
                prop_assert!(rank_distance(&x, &y).unwrap() > 0);
            }
        }

        #[test]
        fn solve_returns_the_full_solution_set((which, seed) in matrices(), r in 1usize..4, c in 1usize..4) {
            let t = &towers()[which];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random(t, Layer::Ext, r, c, &mut rng);
            let x: Vec<Elem> = (0..c).map(|_| Elem::from_index(rng.gen_range(0..t.order()))).collect();
            let b = m.apply(&x).unwrap();
            let sol = m.solve(&b).unwrap();
            prop_assert_eq!(m.apply(&sol.particular).unwrap(), b);
            let diff: Vec<Elem> = x.iter().zip(&sol.particular).map(|(&a, &p)| t.sub(a, p)).collect();
            prop_assert!(sol.kernel.contains(&diff).unwrap());
        }
    }

    #[test]
    fn rank_distance_triangle_inequality_exhaustive_sample() {
        // 1000 random triples of 3x3 GF(2) matrices
        let t = gf2();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x = random(&t, Layer::Base, 3, 3, &mut rng);
            let y = random(&t, Layer::Base, 3, 3, &mut rng);
            let z = random(&t, Layer::Base, 3, 3, &mut rng);
            assert!(rank_distance(&x, &z).unwrap() <= rank_distance(&x, &y).unwrap() + rank_distance(&y, &z).unwrap());
        }
    }
}
