//! Prime-field arithmetic and dense linear algebra over GF(p).
//!
//! Elements are stored fully reduced, so equality is plain integer equality.
//! Matrices are row-major and act on row vectors from the right, matching the
//! coding-theory convention `codeword = v G`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of GF(p), always reduced into `[0, p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a value the caller has already reduced mod p.
    #[inline]
    pub(crate) const fn from_reduced(v: u32) -> FieldElement {
        FieldElement(v)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The prime field GF(p) for an odd prime `p`, together with a chosen
/// primitive element `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u32,
    gamma: FieldElement,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    /// Largest modulus accepted; keeps every product inside `u64`.
    pub const MAX_MODULUS: u64 = 1 << 31;

    /// Builds GF(p). Without an explicit `gamma` the smallest primitive root
    /// is used.
    pub fn new(p: u64, gamma: Option<u64>) -> Result<PrimeField> {
        if !(3..Self::MAX_MODULUS).contains(&p) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p32 = p as u32;
        let probe = PrimeField { p: p32, gamma: FieldElement::ONE };
        match gamma {
            Some(g) => {
                let g_el = FieldElement((g % p) as u32);
                if probe.multiplicative_order(g_el) != Some(p32 - 1) {
                    return Err(Error::NotPrimitive { gamma: g, p: p32 });
                }
                Ok(PrimeField { p: p32, gamma: g_el })
            }
            None => {
                let g = (2..p32)
                    .map(FieldElement)
                    .find(|&g| probe.multiplicative_order(g) == Some(p32 - 1))
                    .expect("every prime field has a primitive root");
                Ok(PrimeField { p: p32, gamma: g })
            }
        }
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn gamma(&self) -> FieldElement {
        self.gamma
    }

    /// Reduces an arbitrary signed integer into the field.
    #[inline]
    pub fn element(&self, value: i64) -> FieldElement {
        FieldElement(value.rem_euclid(self.p as i64) as u32)
    }

    /// All field elements in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.p).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 as u64 + b.0 as u64;
        FieldElement((s % self.p as u64) as u32)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 as u64 + self.p as u64 - b.0 as u64;
        FieldElement((s % self.p as u64) as u32)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            a
        } else {
            FieldElement(self.p - a.0)
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32)
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero(self.p));
        }
        Ok(self.pow(a, self.p as u64 - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Order of `a` in the multiplicative group, `None` for zero.
    pub fn multiplicative_order(&self, a: FieldElement) -> Option<u32> {
        if a.is_zero() {
            return None;
        }
        let mut x = a;
        let mut k = 1;
        while x != FieldElement::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }

    /// Dot product of two equal-length vectors.
    pub fn dot(&self, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
        debug_assert_eq!(a.len(), b.len());
        let p = self.p as u64;
        let s = a
            .iter()
            .zip(b)
            .fold(0u64, |acc, (x, y)| (acc + x.0 as u64 * y.0 as u64) % p);
        FieldElement(s as u32)
    }

    pub(crate) fn check_same(&self, other: &PrimeField) -> Result<()> {
        if self.p != other.p {
            return Err(Error::FieldMismatch(self.p, other.p));
        }
        Ok(())
    }
}

/// Dense row-major matrix over GF(p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixGF {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

/// Output of [`MatrixGF::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowEchelon {
    pub matrix: MatrixGF,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl MatrixGF {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> MatrixGF {
        MatrixGF { field, rows, cols, entries: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(field: PrimeField, size: usize) -> MatrixGF {
        let mut m = MatrixGF::zeros(field, size, size);
        for i in 0..size {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    /// An empty row list yields a `0 x cols` matrix.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, cols: usize, rows: &[R]) -> Result<MatrixGF> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            entries.extend(row.iter().map(|&v| field.element(v)));
        }
        Ok(MatrixGF { field, rows: rows.len(), cols, entries })
    }

    pub fn from_element_rows(field: PrimeField, cols: usize, rows: &[Vec<FieldElement>]) -> Result<MatrixGF> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            entries.extend(row.iter().map(|v| field.element(v.value() as i64)));
        }
        Ok(MatrixGF { field, rows: rows.len(), cols, entries })
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Rows as plain integers, handy for tests and serialization.
    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|v| v.value()).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> MatrixGF {
        let mut t = MatrixGF::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &MatrixGF) -> Result<MatrixGF> {
        self.field.check_same(&other.field)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let f = self.field;
        let mut out = MatrixGF::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v M`.
    pub fn left_mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: v.len() });
        }
        let f = self.field;
        let mut out = vec![FieldElement::ZERO; self.cols];
        for (r, &coef) in v.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            for (c, slot) in out.iter_mut().enumerate() {
                *slot = f.add(*slot, f.mul(coef, self.get(r, c)));
            }
        }
        Ok(out)
    }

    /// Matrix times column vector: `M v`.
    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows).map(|r| self.field.dot(self.row(r), v)).collect())
    }

    /// Sub-matrix picking the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> MatrixGF {
        let mut out = MatrixGF::zeros(self.field, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> MatrixGF {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &MatrixGF) -> Result<MatrixGF> {
        self.field.check_same(&other.field)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        let mut out = MatrixGF::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form by Gauss-Jordan elimination.
    pub fn rref(&self) -> RowEchelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(found) = (pivot_row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(found, pivot_row);
            let inv = f.inv(m.get(pivot_row, col)).expect("pivot is nonzero");
            for c in col..m.cols {
                let v = f.mul(m.get(pivot_row, c), inv);
                m.set(pivot_row, c, v);
            }
            for r in 0..m.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(pivot_row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        RowEchelon { matrix: m, rank: pivots.len(), pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<FieldElement>> {
        let f = self.field;
        let ech = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![FieldElement::ZERO; self.cols];
                v[free] = FieldElement::ONE;
                for (i, &p) in ech.pivots.iter().enumerate() {
                    v[p] = f.neg(ech.matrix.get(i, free));
                }
                v
            })
            .collect()
    }

    pub fn is_nonsingular(&self) -> Result<bool> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(self.rank() == self.rows)
    }
}

impl fmt::Display for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Tests whether `v` lies in the row space described by an RREF.
pub(crate) fn in_row_space(ech: &RowEchelon, v: &[FieldElement]) -> bool {
    let f = ech.matrix.field();
    let mut w = v.to_vec();
    for (i, &p) in ech.pivots.iter().enumerate() {
        let factor = w[p];
        if factor.is_zero() {
            continue;
        }
        for (c, slot) in w.iter_mut().enumerate() {
            *slot = f.sub(*slot, f.mul(factor, ech.matrix.get(i, c)));
        }
    }
    w.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p, None).unwrap()
    }

    fn rows(m: &MatrixGF) -> Vec<Vec<u32>> {
        m.to_rows()
    }

    #[test]
    fn field_construction() {
        let f3 = gf(3);
        assert_eq!(f3.modulus(), 3);
        assert_eq!(f3.gamma().value(), 2);
        let f5 = PrimeField::new(5, Some(3)).unwrap();
        assert_eq!(f5.gamma().value(), 3);
        assert_eq!(gf(5).gamma().value(), 2);
        assert_eq!(PrimeField::new(4, None), Err(Error::NotPrime(4)));
        assert_eq!(PrimeField::new(2, None), Err(Error::NotPrime(2)));
        assert_eq!(PrimeField::new(5, Some(4)), Err(Error::NotPrimitive { gamma: 4, p: 5 }));
    }

    #[test]
    fn inverses() {
        let f5 = gf(5);
        assert_eq!(f5.inv(f5.element(3)).unwrap().value(), 2);
        for p in [3, 5, 7, 11] {
            let f = gf(p);
            assert_eq!(f.inv(FieldElement::ONE).unwrap(), FieldElement::ONE);
            assert_eq!(f.inv(FieldElement::ZERO), Err(Error::DivisionByZero(p as u32)));
        }
    }

    #[test]
    fn gamma_order_exhaustive() {
        for p in [3u64, 5, 7, 11, 13] {
            let f = gf(p);
            let g = f.gamma();
            assert_eq!(f.pow(g, p - 1), FieldElement::ONE);
            for k in 1..p - 1 {
                assert_ne!(f.pow(g, k), FieldElement::ONE, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn rref_examples() {
        let f3 = gf(3);
        let z = MatrixGF::zeros(f3, 2, 3);
        let e = z.rref();
        assert!(e.matrix.is_zero());
        assert_eq!(e.rank, 0);
        assert!(e.pivots.is_empty());

        let m = MatrixGF::from_rows(f3, 4, &[[1, 0, 1, 1], [0, 1, 1, 2]]).unwrap();
        let e = m.rref();
        assert_eq!(e.matrix, m);
        assert_eq!(e.rank, 2);
        assert_eq!(e.pivots, vec![0, 1]);

        let f5 = gf(5);
        let m = MatrixGF::from_rows(f5, 2, &[[2, 4], [1, 2]]).unwrap();
        let e = m.rref();
        assert_eq!(rows(&e.matrix), vec![vec![1, 2], vec![0, 0]]);
        assert_eq!(e.rank, 1);
        assert_eq!(e.pivots, vec![0]);
    }

    #[test]
    fn null_space_examples() {
        let f3 = gf(3);
        assert!(MatrixGF::identity(f3, 3).null_space().is_empty());
        let row = MatrixGF::from_rows(f3, 2, &[[1, 1]]).unwrap();
        let ns = row.null_space();
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0].iter().map(|v| v.value()).collect::<Vec<_>>(), vec![2, 1]);
        assert!(row.mul_vec(&ns[0]).unwrap().iter().all(|v| v.is_zero()));
        assert_eq!(MatrixGF::zeros(f3, 1, 2).null_space().len(), 2);
    }

    #[test]
    fn nonsingular_examples() {
        let f3 = gf(3);
        let a = MatrixGF::from_rows(f3, 2, &[[1, 1], [1, 2]]).unwrap();
        assert!(a.is_nonsingular().unwrap());
        let b = MatrixGF::from_rows(f3, 2, &[[1, 1], [2, 2]]).unwrap();
        assert!(!b.is_nonsingular().unwrap());
        let c = MatrixGF::from_rows(f3, 1, &[[1]]).unwrap();
        assert!(c.is_nonsingular().unwrap());
        let d = MatrixGF::zeros(f3, 1, 2);
        assert_eq!(d.is_nonsingular(), Err(Error::NotSquare { rows: 1, cols: 2 }));
    }

    fn det_oracle(f: &PrimeField, m: &[Vec<i64>]) -> i64 {
        // Laplace expansion, independent of elimination.
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        let mut acc = 0i64;
        for c in 0..n {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
                .collect();
            let sign = if c % 2 == 0 { 1 } else { -1 };
            acc = (acc + sign * m[0][c] * det_oracle(f, &minor)).rem_euclid(f.modulus() as i64);
        }
        acc
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), a in 1u64..1000) {
            let f = gf(p);
            let x = f.element(a as i64);
            prop_assume!(!x.is_zero());
            let y = f.inv(x).unwrap();
            prop_assert_eq!(f.mul(x, y), FieldElement::ONE);
            prop_assert_eq!(f.inv(y).unwrap(), x);
        }

        #[test]
        fn rref_properties(
            p in prop::sample::select(vec![3u64, 5, 7]),
            r in 1usize..5,
            c in 1usize..6,
            seed in prop::collection::vec(0i64..100, 30),
        ) {
            let f = gf(p);
            let data: Vec<Vec<i64>> = (0..r).map(|i| (0..c).map(|j| seed[i * c + j]).collect()).collect();
            let m = MatrixGF::from_rows(f, c, &data).unwrap();
            let e = m.rref();
            prop_assert_eq!(&e.matrix.rref().matrix, &e.matrix);
            let ns = m.null_space();
            prop_assert_eq!(ns.len() + e.rank, c);
            for v in &ns {
                prop_assert!(m.mul_vec(v).unwrap().iter().all(|x| x.is_zero()));
            }
            // row space preserved: every original row reduces to zero against the RREF
            for i in 0..r {
                prop_assert!(in_row_space(&e, m.row(i)));
            }
        }

        #[test]
        fn nonsingular_matches_determinant(
            p in prop::sample::select(vec![3u64, 5, 7]),
            n in 1usize..5,
            seed in prop::collection::vec(0i64..50, 16),
        ) {
            let f = gf(p);
            let data: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| seed[i * n + j] % p as i64).collect()).collect();
            let m = MatrixGF::from_rows(f, n, &data).unwrap();
            prop_assert_eq!(m.is_nonsingular().unwrap(), det_oracle(&f, &data) != 0);
        }
    }
}
