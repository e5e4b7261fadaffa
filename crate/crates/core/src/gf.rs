//! Finite field tower: a prime field GF(q) and a degree-m extension GF(q^m)
//! in polynomial basis.
//!
//! Extension elements are stored as their index `Σ d_i q^i`, where `d_i` is the
//! coefficient of `α^i` and `α` is the class of `x` modulo the defining
//! polynomial. A base-field digit `d` therefore has the same index as its
//! image under the subfield embedding, which is what lets GF(q) matrices be
//! promoted to the extension layer without touching their entries.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{FMatrix, Layer};

/// Largest supported field order `q^m`.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// An element of some GF(q^m); only meaningful together with its tower.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    /// Wraps a raw index without range checking; see [`FieldTower::elem`].
    pub const fn from_index(index: u32) -> Self {
        Elem(index)
    }

    pub const fn index(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

pub struct FieldTower {
    q: u32,
    m: usize,
    modulus: Vec<u32>,
    order: u32,
    /// `place[i] = q^i` for `i` in `0..=m`.
    place: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    base_inv: Vec<u32>,
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldTower {}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldTower({self})")
    }
}

impl fmt::Display for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}/", self.q, self.m)?;
        for (i, c) in self.modulus.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_order(q: u32, m: usize) -> Result<u32> {
    let mut order: u64 = 1;
    for _ in 0..m {
        order *= q as u64;
        if order > MAX_FIELD_ORDER {
            return Err(Error::FieldTooLarge { q, m });
        }
    }
    Ok(order as u32)
}

fn index_digits(mut index: u32, q: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(index % q);
        index /= q;
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `b` (ascending coefficients).
fn poly_rem(a: &[u32], b: &[u32], q: u32) -> Vec<u32> {
    let db = b.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let q64 = q as u64;
    while r.len() > db {
        let lead = r.pop().unwrap() % q64;
        if lead != 0 {
            let shift = r.len() - db;
            for (i, &bc) in b[..db].iter().enumerate() {
                let sub = lead * bc as u64 % q64;
                r[shift + i] = (r[shift + i] + q64 - sub) % q64;
            }
        }
    }
    r.into_iter().map(|c| (c % q64) as u32).collect()
}

fn is_irreducible(modulus: &[u32], q: u32) -> bool {
    let m = modulus.len() - 1;
    for deg in 1..=m / 2 {
        let count = (q as u64).pow(deg as u32);
        for low in 0..count {
            let mut divisor = index_digits(low as u32, q, deg);
            divisor.push(1);
            if poly_rem(modulus, &divisor, q).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible polynomial of degree `m` over GF(q), ordering
/// candidates by the index of their lower coefficients.
pub fn default_modulus(q: u32, m: usize) -> Result<Vec<u32>> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if m == 0 {
        return Err(Error::ZeroDegree);
    }
    let order = checked_order(q, m)?;
    for low in 0..order {
        let mut candidate = index_digits(low, q, m);
        candidate.push(1);
        if is_irreducible(&candidate, q) {
            return Ok(candidate);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldTower {
    /// Builds GF(q^m) over GF(q) from a monic modulus given by ascending
    /// coefficients (`m + 1` of them).
    pub fn new(q: u32, m: usize, modulus: &[u32]) -> Result<Arc<Self>> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if m == 0 {
            return Err(Error::ZeroDegree);
        }
        let order = checked_order(q, m)?;
        if modulus.len() != m + 1 || modulus[m] != 1 {
            return Err(Error::BadModulus {
                expected: m,
                got: modulus.len(),
            });
        }
        if let Some(&digit) = modulus.iter().find(|&&c| c >= q) {
            return Err(Error::DigitOutOfRange { digit, q });
        }
        if !is_irreducible(modulus, q) {
            return Err(Error::ReducibleModulus(q));
        }
        let place = (0..=m as u32).map(|i| q.pow(i)).collect();
        let base_inv = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..q).find(|&b| (a as u64 * b as u64) % q as u64 == 1).unwrap()
                }
            })
            .collect();
        let mut tower = FieldTower {
            q,
            m,
            modulus: modulus.to_vec(),
            order,
            place,
            exp: Vec::new(),
            log: Vec::new(),
            base_inv,
        };
        tower.build_tables();
        Ok(Arc::new(tower))
    }

    pub fn with_default_modulus(q: u32, m: usize) -> Result<Arc<Self>> {
        let modulus = default_modulus(q, m)?;
        Self::new(q, m, &modulus)
    }

    /// Schoolbook multiplication modulo the defining polynomial, used only to
    /// seed the log/exp tables.
    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        if self.q == 2 {
            let m = self.m;
            let poly: u32 = self
                .modulus
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &c)| acc | (c << i));
            let mut acc: u64 = 0;
            for i in 0..m {
                if (b >> i) & 1 == 1 {
                    acc ^= (a as u64) << i;
                }
            }
            for bit in (m..2 * m).rev() {
                if (acc >> bit) & 1 == 1 {
                    acc ^= (poly as u64) << (bit - m);
                }
            }
            return acc as u32;
        }
        let q = self.q as u64;
        let ad = index_digits(a, self.q, self.m);
        let bd = index_digits(b, self.q, self.m);
        let mut prod = vec![0u64; 2 * self.m - 1];
        for (i, &x) in ad.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in bd.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % q;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        let rem = if prod.len() > self.m {
            poly_rem(&prod, &self.modulus, self.q)
        } else {
            prod
        };
        rem.iter()
            .enumerate()
            .map(|(i, &d)| d * self.place[i])
            .sum()
    }

    fn pow_slow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&mut self) {
        let group = (self.order - 1) as u64;
        let factors = prime_factors(group);
        let generator = (1..self.order)
            .find(|&g| factors.iter().all(|&p| self.pow_slow(g, group / p) != 1))
            .expect("the multiplicative group of a finite field is cyclic");
        let mut exp = Vec::with_capacity(group as usize);
        let mut log = vec![0u32; self.order as usize];
        let mut cur = 1u32;
        for i in 0..group as u32 {
            exp.push(cur);
            log[cur as usize] = i;
            cur = self.mul_slow(cur, generator);
        }
        self.exp = exp;
        self.log = log;
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of elements of GF(q^m).
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Range-checked element constructor.
    pub fn elem(&self, index: u32) -> Result<Elem> {
        if index < self.order {
            Ok(Elem(index))
        } else {
            Err(Error::ElementOutOfRange {
                index,
                order: self.order,
            })
        }
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(Elem)
    }

    /// The class of `x` modulo the defining polynomial.
    pub fn alpha(&self) -> Elem {
        if self.m >= 2 {
            Elem(self.q)
        } else {
            Elem((self.q - self.modulus[0]) % self.q)
        }
    }

    /// Image of a base-field digit under the subfield embedding.
    pub fn embed(&self, digit: u32) -> Elem {
        debug_assert!(digit < self.q);
        Elem(digit)
    }

    /// The `m` polynomial-basis coordinates of `a`, lowest power first.
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        index_digits(a.0, self.q, self.m)
    }

    pub fn digit(&self, a: Elem, i: usize) -> u32 {
        (a.0 / self.place[i]) % self.q
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<Elem> {
        if digits.len() != self.m {
            return Err(Error::dim(format!(
                "expected {} digits, got {}",
                self.m,
                digits.len()
            )));
        }
        let mut index = 0u32;
        for (i, &d) in digits.iter().enumerate() {
            if d >= self.q {
                return Err(Error::DigitOutOfRange { digit: d, q: self.q });
            }
            index += d * self.place[i];
        }
        Ok(Elem(index))
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.q == 2 {
            return Elem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        for i in 0..self.m {
            let d = (x % self.q + y % self.q) % self.q;
            out += d * self.place[i];
            x /= self.q;
            y /= self.q;
        }
        Elem(out)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.q == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0;
        for i in 0..self.m {
            let d = (self.q - x % self.q) % self.q;
            out += d * self.place[i];
            x /= self.q;
        }
        Elem(out)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let group = self.order - 1;
        let e = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % group as u64;
        Elem(self.exp[e as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let group = self.order - 1;
        let e = (group - self.log[a.0 as usize]) % group;
        Ok(Elem(self.exp[e as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        let group = (self.order - 1) as u64;
        let l = self.log[a.0 as usize] as u64 * (e % group) % group;
        Elem(self.exp[l as usize])
    }

    /// `a^(q^i)`; negative `i` gives the inverse automorphism.
    pub fn frobenius(&self, a: Elem, i: i64) -> Elem {
        let i = i.rem_euclid(self.m as i64) as u32;
        self.pow(a, (self.q as u64).pow(i))
    }

    /// Multiplies `a` by the base-field scalar `c`.
    pub fn scale(&self, c: u32, a: Elem) -> Elem {
        if self.q == 2 {
            return if c & 1 == 1 { a } else { Elem::ZERO };
        }
        match c % self.q {
            0 => Elem::ZERO,
            1 => a,
            c => {
                let mut x = a.0;
                let mut out = 0;
                for i in 0..self.m {
                    let d = ((x % self.q) as u64 * c as u64 % self.q as u64) as u32;
                    out += d * self.place[i];
                    x /= self.q;
                }
                Elem(out)
            }
        }
    }

    pub fn base_add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    pub fn base_neg(&self, a: u32) -> u32 {
        (self.q - a % self.q) % self.q
    }

    pub fn base_sub(&self, a: u32, b: u32) -> u32 {
        self.base_add(a, self.base_neg(b))
    }

    pub fn base_mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn base_inv(&self, a: u32) -> Result<u32> {
        if a % self.q == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.base_inv[(a % self.q) as usize])
    }

    /// Dimension over GF(q) of the span of `elems`, i.e. the rank of their
    /// stacked coordinate rows.
    pub fn span_dim(&self, elems: &[Elem]) -> usize {
        if self.q == 2 {
            // xor basis keyed by leading bit
            let mut basis = [0u32; 32];
            let mut rank = 0;
            for e in elems {
                let mut v = e.0;
                while v != 0 {
                    let top = 31 - v.leading_zeros() as usize;
                    if basis[top] == 0 {
                        basis[top] = v;
                        rank += 1;
                        break;
                    }
                    v ^= basis[top];
                }
            }
            return rank;
        }
        let mut rows: Vec<Vec<u32>> = elems.iter().map(|&e| self.digits(e)).collect();
        let mut rank = 0;
        for col in 0..self.m {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let inv = self.base_inv[rows[rank][col] as usize];
            for c in 0..self.m {
                rows[rank][c] = self.base_mul(rows[rank][c], inv);
            }
            for r in 0..rows.len() {
                if r != rank && rows[r][col] != 0 {
                    let f = rows[r][col];
                    for c in 0..self.m {
                        let sub = self.base_mul(f, rows[rank][c]);
                        rows[r][c] = self.base_sub(rows[r][c], sub);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// φ-digit string of an element: its coordinates lowest power first,
    /// concatenated for q ≤ 10 and dot-separated otherwise.
    pub fn format_elem(&self, a: Elem) -> String {
        let digits = self.digits(a);
        if self.q <= 10 {
            digits.iter().map(|d| char::from(b'0' + *d as u8)).collect()
        } else {
            digits
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        let s = s.trim();
        let digits: Vec<u32> = if s.contains('.') {
            s.split('.')
                .map(|d| d.parse::<u32>().map_err(|e| Error::parse(format!("{s:?}: {e}"))))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::parse(format!("bad digit {c:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        self.from_digits(&digits)
    }
}

/// Parses `q^m/p0,p1,...,pm` (ascending modulus coefficients) or the short
/// form `q^m`, which selects [`default_modulus`].
pub fn parse_tower(s: &str) -> Result<Arc<FieldTower>> {
    let s = s.trim();
    let (size, modulus) = match s.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    };
    let (q, m) = size
        .split_once('^')
        .ok_or_else(|| Error::parse(format!("expected q^m in {s:?}")))?;
    let q: u32 = q
        .trim()
        .parse()
        .map_err(|e| Error::parse(format!("bad q in {s:?}: {e}")))?;
    let m: usize = m
        .trim()
        .parse()
        .map_err(|e| Error::parse(format!("bad m in {s:?}: {e}")))?;
    if m > 64 {
        return Err(Error::FieldTooLarge { q, m });
    }
    match modulus {
        None => FieldTower::with_default_modulus(q, m),
        Some(list) => {
            let coeffs: Vec<u32> = list
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<u32>()
                        .map_err(|e| Error::parse(format!("bad coefficient {c:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            FieldTower::new(q, m, &coeffs)
        }
    }
}

/// Expands a vector over GF(q^m) into the ℓ×m GF(q) matrix of its
/// coordinates (one row per entry, basis 1, α, …, α^(m−1)).
pub fn phi_expand(tower: &Arc<FieldTower>, v: &[Elem]) -> FMatrix {
    let m = tower.m();
    let mut data = Vec::with_capacity(v.len() * m);
    for &a in v {
        data.extend(tower.digits(a).into_iter().map(Elem::from_index));
    }
    FMatrix::from_raw(tower.clone(), Layer::Base, v.len(), m, data)
}

/// Inverse of [`phi_expand`].
pub fn phi_contract(mat: &FMatrix) -> Result<Vec<Elem>> {
    let tower = mat.tower();
    if mat.layer() != Layer::Base {
        return Err(Error::LayerMismatch {
            expected: Layer::Base,
            got: mat.layer(),
        });
    }
    if mat.cols() != tower.m() {
        return Err(Error::dim(format!(
            "phi_contract needs {} columns, got {}",
            tower.m(),
            mat.cols()
        )));
    }
    (0..mat.rows())
        .map(|r| {
            let digits: Vec<u32> = mat.row(r).iter().map(|e| e.index()).collect();
            tower.from_digits(&digits)
        })
        .collect()
}
