//! Classical MDS codes over GF(p) built from Singleton arrays.
//!
//! The Singleton array over GF(q) is the triangular array whose row `i`
//! (1-indexed) has `q + 1 - i` entries:
//!
//! ```text
//! row 1:  1  1      1      ...  1
//! row 2:  1  a_1    a_2    ...  a_{q-2}
//! row 3:  1  a_2    a_3    ...
//! ...
//! row q:  1
//! ```
//!
//! with `a_i = 1 / (1 - gamma^i)`. Every square submatrix lying inside the
//! triangle is nonsingular, so any rectangular block `A` taken from its top-left
//! corner yields an MDS generator matrix `[1 | A]`.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::gf::{FieldElement, MatrixGF, PrimeField};

/// Default ceiling on enumerated items (codewords, operators, ...).
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// The Singleton array of a prime field with a fixed primitive element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingletonArray {
    field: PrimeField,
    entries: Vec<FieldElement>,
}

impl SingletonArray {
    pub fn new(field: PrimeField) -> SingletonArray {
        let q = field.modulus() as u64;
        let g = field.gamma();
        let entries = (1..=q.saturating_sub(2))
            .map(|i| {
                let denom = field.sub(FieldElement::ONE, field.pow(g, i));
                field.inv(denom).expect("gamma^i != 1 below the group order")
            })
            .collect();
        SingletonArray { field, entries }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// `a_i` for `1 <= i <= q - 2`.
    pub fn a(&self, i: usize) -> FieldElement {
        self.entries[i - 1]
    }

    /// All of `a_1 .. a_{q-2}`.
    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    /// Number of entries in row `i` (1-indexed).
    pub fn row_len(&self, i: usize) -> usize {
        (self.field.modulus() as usize + 1).saturating_sub(i)
    }

    /// Entry at row `i`, column `j` (both 1-indexed).
    pub fn entry(&self, i: usize, j: usize) -> FieldElement {
        assert!(i >= 1 && j >= 1 && j <= self.row_len(i), "({i},{j}) outside the Singleton array");
        if i == 1 || j == 1 {
            FieldElement::ONE
        } else {
            self.a(i + j - 3)
        }
    }

    /// Row `i` (1-indexed) of the triangular array.
    pub fn row(&self, i: usize) -> Vec<FieldElement> {
        (1..=self.row_len(i)).map(|j| self.entry(i, j)).collect()
    }

    /// Top-left `rows x cols` rectangular block.
    pub fn block(&self, rows: usize, cols: usize) -> Result<MatrixGF> {
        let q = self.field.modulus() as usize;
        if rows + cols > q + 1 {
            return Err(Error::OutOfRange(format!(
                "a {rows}x{cols} block does not fit the Singleton array of GF({q})"
            )));
        }
        let mut m = MatrixGF::zeros(self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.entry(i + 1, j + 1));
            }
        }
        Ok(m)
    }
}

pub fn singleton_array(field: PrimeField) -> SingletonArray {
    SingletonArray::new(field)
}

/// A `k x n` generator matrix in standard form `[1_k | A]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    matrix: MatrixGF,
}

impl GeneratorMatrix {
    /// Wraps a matrix after checking the identity block.
    pub fn from_matrix(matrix: MatrixGF) -> Result<GeneratorMatrix> {
        let k = matrix.rows();
        if k > matrix.cols() {
            return Err(Error::NotStandardForm);
        }
        for r in 0..k {
            for c in 0..k {
                let want = if r == c { FieldElement::ONE } else { FieldElement::ZERO };
                if matrix.get(r, c) != want {
                    return Err(Error::NotStandardForm);
                }
            }
        }
        Ok(GeneratorMatrix { matrix })
    }

    /// Builds `[1_k | A]` from the redundancy block.
    pub fn from_redundancy(a: &MatrixGF) -> Result<GeneratorMatrix> {
        let m = MatrixGF::identity(a.field(), a.rows()).hstack(a)?;
        GeneratorMatrix::from_matrix(m)
    }

    /// The trivial `0 x n` generator (only the zero codeword).
    pub fn empty(field: PrimeField, n: usize) -> GeneratorMatrix {
        GeneratorMatrix { matrix: MatrixGF::zeros(field, 0, n) }
    }

    pub fn field(&self) -> PrimeField {
        self.matrix.field()
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &MatrixGF {
        &self.matrix
    }

    /// The redundancy block `A`.
    pub fn redundancy(&self) -> MatrixGF {
        let cols: Vec<usize> = (self.k()..self.n()).collect();
        self.matrix.select_columns(&cols)
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.matrix.to_rows()
    }

    /// Plain-text form: a `q k n` header line then `k` rows.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.field().modulus(), self.k(), self.n());
        s.push_str(&self.matrix.to_string());
        s
    }

    /// Parses [`GeneratorMatrix::to_text`] output. The field's primitive element
    /// is taken from `gamma` (smallest primitive root when `None`).
    pub fn from_text(text: &str, gamma: Option<u64>) -> Result<GeneratorMatrix> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("missing 'q k n' header".into()))?;
        let nums = parse_ints(header)?;
        if nums.len() != 3 {
            return Err(Error::Parse(format!("header must be 'q k n', got '{header}'")));
        }
        let (q, k, n) = (nums[0], nums[1] as usize, nums[2] as usize);
        let field = PrimeField::new(q as u64, gamma)?;
        let rows: Vec<Vec<i64>> = lines.map(parse_ints).collect::<Result<_>>()?;
        if rows.len() != k {
            return Err(Error::Parse(format!("expected {k} rows, found {}", rows.len())));
        }
        if k == 0 {
            return Ok(GeneratorMatrix::empty(field, n));
        }
        GeneratorMatrix::from_matrix(MatrixGF::from_rows(field, n, &rows)?)
    }
}

fn parse_ints(line: &str) -> Result<Vec<i64>> {
    line.split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|e| Error::Parse(format!("'{t}': {e}"))))
        .collect()
}

/// MDS generator `[1_k | A]` with `A` the top-left `k x (n-k)` Singleton block.
pub fn mds_generator(field: PrimeField, k: usize, n: usize) -> Result<GeneratorMatrix> {
    let q = field.modulus() as usize;
    if k < 1 || k > q.div_ceil(2) || n < k || n > q + 1 {
        return Err(Error::OutOfRange(format!(
            "MDS generator needs 1 <= k <= {} and k <= n <= {} over GF({q}); got k={k}, n={n}",
            q.div_ceil(2),
            q + 1
        )));
    }
    let a = SingletonArray::new(field).block(k, n - k)?;
    GeneratorMatrix::from_redundancy(&a)
}

/// Parity check `H = [-A^T | 1_{n-k}]`.
pub fn parity_check(g: &GeneratorMatrix) -> MatrixGF {
    let f = g.field();
    let (k, n) = (g.k(), g.n());
    let mut h = MatrixGF::zeros(f, n - k, n);
    for i in 0..n - k {
        for j in 0..k {
            h.set(i, j, f.neg(g.matrix().get(j, k + i)));
        }
        h.set(i, k + i, FieldElement::ONE);
    }
    h
}

/// True when every square submatrix of the redundancy block is nonsingular.
pub fn is_mds(g: &GeneratorMatrix) -> bool {
    let a = g.redundancy();
    let max = a.rows().min(a.cols());
    (1..=max).all(|s| {
        (0..a.rows()).combinations(s).all(|rows| {
            (0..a.cols())
                .combinations(s)
                .all(|cols| a.select(&rows, &cols).is_nonsingular().unwrap_or(false))
        })
    })
}

/// `q^k`, or `None` when it does not fit in `u128`.
pub(crate) fn checked_power(q: u32, k: usize) -> Option<u128> {
    (0..k).try_fold(1u128, |acc, _| acc.checked_mul(q as u128))
}

pub(crate) fn check_budget(required: Option<u128>, budget: u64) -> Result<u128> {
    match required {
        Some(r) if r <= budget as u128 => Ok(r),
        Some(r) => Err(Error::BudgetExceeded { required: r, budget }),
        None => Err(Error::BudgetExceeded { required: u128::MAX, budget }),
    }
}

/// Iterates all of GF(q)^len in lexicographic order (first coordinate outermost).
pub(crate) fn lex_vectors(field: PrimeField, len: usize) -> impl Iterator<Item = Vec<FieldElement>> {
    let q = field.modulus();
    let total = checked_power(q, len).expect("caller checked the budget") as u64;
    (0..total).map(move |mut idx| {
        let mut v = vec![FieldElement::ZERO; len];
        for slot in v.iter_mut().rev() {
            *slot = field.element((idx % q as u64) as i64);
            idx /= q as u64;
        }
        v
    })
}

/// All `q^k` codewords `v G` in lexicographic order of `v`.
pub fn enumerate_codewords(g: &GeneratorMatrix, budget: u64) -> Result<Vec<Vec<FieldElement>>> {
    check_budget(checked_power(g.field().modulus(), g.k()), budget)?;
    lex_vectors(g.field(), g.k())
        .map(|v| g.matrix().left_mul_vec(&v))
        .collect()
}

/// Generator and parity check of a linear code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCode {
    generator: GeneratorMatrix,
    parity_check: MatrixGF,
}

impl ClassicalCode {
    pub fn new(generator: GeneratorMatrix) -> ClassicalCode {
        let parity_check = parity_check(&generator);
        ClassicalCode { generator, parity_check }
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &MatrixGF {
        &self.parity_check
    }

    pub fn n(&self) -> usize {
        self.generator.n()
    }

    pub fn k(&self) -> usize {
        self.generator.k()
    }

    /// The Singleton-bound distance `n - k + 1` an MDS code attains.
    pub fn singleton_distance(&self) -> usize {
        self.n() - self.k() + 1
    }

    /// Minimum Hamming weight over nonzero codewords, which by linearity is
    /// the minimum pairwise distance. `None` for the zero code.
    pub fn min_hamming_distance(&self, budget: u64) -> Result<Option<usize>> {
        let words = enumerate_codewords(&self.generator, budget)?;
        Ok(words
            .iter()
            .map(|w| w.iter().filter(|x| !x.is_zero()).count())
            .filter(|&wt| wt > 0)
            .min())
    }
}

/// Removes the last `r` rows and the identity columns `k-r+1 .. k`,
/// leaving `[1_{k-r} | A_{(k-r) x (n-k)}]`.
pub fn shorten_generator(g: &GeneratorMatrix, r: usize) -> Result<GeneratorMatrix> {
    let k = g.k();
    if r < 1 || r + 1 > k {
        return Err(Error::OutOfRange(format!("shortening needs 1 <= r <= k-1 = {}; got r={r}", k.saturating_sub(1))));
    }
    let rows: Vec<usize> = (0..k - r).collect();
    let cols = shortened_columns(k, g.n(), r);
    GeneratorMatrix::from_matrix(g.matrix().select(&rows, &cols))
}

/// Columns kept by an `r`-step shortening of a `k x n` standard-form matrix.
pub(crate) fn shortened_columns(k: usize, n: usize, r: usize) -> Vec<usize> {
    (0..k - r).chain(k..n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64, gamma: Option<u64>) -> PrimeField {
        PrimeField::new(p, gamma).unwrap()
    }

    fn vals(v: &[FieldElement]) -> Vec<u32> {
        v.iter().map(|x| x.value()).collect()
    }

    #[test]
    fn singleton_array_values() {
        let s3 = singleton_array(field(3, None));
        assert_eq!(vals(s3.entries()), vec![2]);
        assert_eq!(vals(&s3.row(3)), vec![1]);

        let s5 = singleton_array(field(5, Some(3)));
        assert_eq!(vals(s5.entries()), vec![2, 3, 4]);
        assert_eq!(vals(&s5.row(4)), vec![1, 4]);

        let s5b = singleton_array(field(5, Some(2)));
        assert_eq!(vals(s5b.entries()), vec![4, 3, 2]);
    }

    #[test]
    fn singleton_triangle_square_submatrices_nonsingular() {
        // Every square submatrix whose cells all lie in the triangle.
        for p in [3u64, 5, 7] {
            let s = singleton_array(field(p, None));
            let q = p as usize;
            for size in 1..=q.div_ceil(2) {
                for rows in (1..=q).combinations(size) {
                    let max_row = *rows.last().unwrap();
                    let width = q + 1 - max_row;
                    for cols in (1..=width).combinations(size) {
                        let mut m = MatrixGF::zeros(s.field(), size, size);
                        for (i, &r) in rows.iter().enumerate() {
                            for (j, &c) in cols.iter().enumerate() {
                                m.set(i, j, s.entry(r, c));
                            }
                        }
                        assert!(m.is_nonsingular().unwrap(), "q={q} rows={rows:?} cols={cols:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn mds_generator_examples() {
        let g = mds_generator(field(3, None), 2, 4).unwrap();
        assert_eq!(g.to_rows(), vec![vec![1, 0, 1, 1], vec![0, 1, 1, 2]]);
        let g = mds_generator(field(5, Some(3)), 3, 6).unwrap();
        assert_eq!(
            g.to_rows(),
            vec![vec![1, 0, 0, 1, 1, 1], vec![0, 1, 0, 1, 2, 3], vec![0, 0, 1, 1, 3, 4]]
        );
        let g = mds_generator(field(5, None), 1, 2).unwrap();
        assert_eq!(g.to_rows(), vec![vec![1, 1]]);
    }

    #[test]
    fn mds_generator_range_errors() {
        let f = field(5, None);
        assert!(matches!(mds_generator(f, 4, 6), Err(Error::OutOfRange(_))));
        assert!(matches!(mds_generator(f, 3, 7), Err(Error::OutOfRange(_))));
        assert!(matches!(mds_generator(f, 0, 3), Err(Error::OutOfRange(_))));
        assert!(matches!(mds_generator(f, 3, 2), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn parity_check_examples() {
        let f3 = field(3, None);
        let g = mds_generator(f3, 2, 4).unwrap();
        let h = parity_check(&g);
        assert_eq!(h.to_rows(), vec![vec![2, 2, 1, 0], vec![2, 1, 0, 1]]);
        assert!(g.matrix().mul(&h.transpose()).unwrap().is_zero());

        let id = GeneratorMatrix::from_matrix(MatrixGF::identity(f3, 2)).unwrap();
        assert_eq!(parity_check(&id).rows(), 0);

        let g = mds_generator(field(5, Some(3)), 3, 6).unwrap();
        let h = parity_check(&g);
        assert_eq!((h.rows(), h.cols()), (3, 6));
        assert!(g.matrix().mul(&h.transpose()).unwrap().is_zero());
    }

    #[test]
    fn standard_form_is_enforced() {
        let f3 = field(3, None);
        let m = MatrixGF::from_rows(f3, 3, &[[1, 1, 0], [0, 1, 1]]).unwrap();
        assert_eq!(GeneratorMatrix::from_matrix(m), Err(Error::NotStandardForm));
    }

    #[test]
    fn is_mds_examples() {
        let f3 = field(3, None);
        assert!(is_mds(&mds_generator(f3, 2, 4).unwrap()));
        let bad = GeneratorMatrix::from_matrix(MatrixGF::from_rows(f3, 4, &[[1, 0, 1, 1], [0, 1, 1, 1]]).unwrap()).unwrap();
        assert!(!is_mds(&bad));
        assert!(is_mds(&mds_generator(field(5, Some(3)), 3, 6).unwrap()));
    }

    #[test]
    fn mds_generators_are_mds_for_all_admissible_parameters() {
        for p in [3u64, 5, 7, 11] {
            let f = field(p, None);
            let q = p as usize;
            for k in 1..=q.div_ceil(2) {
                for n in k..=q + 1 {
                    let g = mds_generator(f, k, n).unwrap();
                    assert!(is_mds(&g), "q={q} k={k} n={n}");
                    let h = parity_check(&g);
                    assert!(g.matrix().mul(&h.transpose()).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn codeword_enumeration() {
        let f3 = field(3, None);
        let rep = GeneratorMatrix::from_matrix(MatrixGF::from_rows(f3, 3, &[[1, 1, 1]]).unwrap()).unwrap();
        let words: Vec<Vec<u32>> = enumerate_codewords(&rep, DEFAULT_BUDGET).unwrap().iter().map(|w| vals(w)).collect();
        assert_eq!(words, vec![vec![0, 0, 0], vec![1, 1, 1], vec![2, 2, 2]]);

        let empty = GeneratorMatrix::empty(f3, 3);
        let words = enumerate_codewords(&empty, DEFAULT_BUDGET).unwrap();
        assert_eq!(words.len(), 1);
        assert_eq!(vals(&words[0]), vec![0, 0, 0]);

        let g = mds_generator(f3, 2, 4).unwrap();
        let words = enumerate_codewords(&g, DEFAULT_BUDGET).unwrap();
        assert_eq!(words.len(), 9);
        let mut idx = 0;
        for i in 0..3u32 {
            for j in 0..3u32 {
                assert_eq!(vals(&words[idx]), vec![i, j, (i + j) % 3, (i + 2 * j) % 3]);
                idx += 1;
            }
        }
        assert!(matches!(enumerate_codewords(&g, 8), Err(Error::BudgetExceeded { required: 9, budget: 8 })));
    }

    #[test]
    fn hamming_distances() {
        let f3 = field(3, None);
        let c = ClassicalCode::new(mds_generator(f3, 2, 4).unwrap());
        assert_eq!(c.min_hamming_distance(DEFAULT_BUDGET).unwrap(), Some(3));
        let c = ClassicalCode::new(mds_generator(field(5, Some(3)), 3, 6).unwrap());
        assert_eq!(c.min_hamming_distance(DEFAULT_BUDGET).unwrap(), Some(4));
        let rep = GeneratorMatrix::from_matrix(MatrixGF::from_rows(f3, 3, &[[1, 1, 1]]).unwrap()).unwrap();
        assert_eq!(ClassicalCode::new(rep).min_hamming_distance(DEFAULT_BUDGET).unwrap(), Some(3));
    }

    #[test]
    fn mds_codes_saturate_singleton_bound() {
        for p in [3u64, 5, 7] {
            let f = field(p, None);
            let q = p as usize;
            for k in 1..=q.div_ceil(2) {
                for n in k..=q + 1 {
                    let c = ClassicalCode::new(mds_generator(f, k, n).unwrap());
                    assert_eq!(c.min_hamming_distance(DEFAULT_BUDGET).unwrap(), Some(c.singleton_distance()));
                }
            }
        }
    }

    #[test]
    fn shortening_examples() {
        let g = mds_generator(field(3, None), 2, 4).unwrap();
        assert_eq!(shorten_generator(&g, 1).unwrap().to_rows(), vec![vec![1, 1, 1]]);
        let g = mds_generator(field(5, Some(3)), 3, 6).unwrap();
        let g1 = shorten_generator(&g, 1).unwrap();
        assert_eq!(g1.to_rows(), vec![vec![1, 0, 1, 1, 1], vec![0, 1, 1, 2, 3]]);
        assert!(is_mds(&g1));
        let g2 = shorten_generator(&g, 2).unwrap();
        assert_eq!(g2.to_rows(), vec![vec![1, 1, 1, 1]]);
        assert_eq!(shorten_generator(&g1, 1).unwrap(), g2);
        assert!(matches!(shorten_generator(&g, 3), Err(Error::OutOfRange(_))));
        assert!(matches!(shorten_generator(&g, 0), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn text_format_roundtrip() {
        let g = mds_generator(field(5, Some(3)), 3, 6).unwrap();
        let text = g.to_text();
        assert!(text.starts_with("5 3 6\n1 0 0 1 1 1\n"));
        let back = GeneratorMatrix::from_text(&text, Some(3)).unwrap();
        assert_eq!(back, g);
        assert!(GeneratorMatrix::from_text("5 2 4\n1 0 1 1\n", None).is_err());
    }
}
