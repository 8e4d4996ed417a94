//! Exact integers in Z[omega] for omega a primitive q-th root of unity, q prime.
//!
//! For prime q the only linear relation among `1, omega, ..., omega^{q-1}`
//! is that they sum to zero, so subtracting the minimum coefficient from
//! every entry gives a unique representative.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CyclotomicInt {
    coeffs: Vec<i64>,
}

impl CyclotomicInt {
    pub fn zero(q: u32) -> CyclotomicInt {
        CyclotomicInt { coeffs: vec![0; q as usize] }
    }

    pub fn from_int(q: u32, value: i64) -> CyclotomicInt {
        let mut c = CyclotomicInt::zero(q);
        c.coeffs[0] = value;
        c.canonicalize();
        c
    }

    /// `omega^power`.
    pub fn root(q: u32, power: u64) -> CyclotomicInt {
        let mut c = CyclotomicInt::zero(q);
        c.coeffs[(power % q as u64) as usize] = 1;
        c
    }

    /// Builds `sum_j coeffs[j] omega^j` and canonicalizes.
    pub fn from_coeffs(coeffs: Vec<i64>) -> CyclotomicInt {
        let mut c = CyclotomicInt { coeffs };
        c.canonicalize();
        c
    }

    pub fn order(&self) -> u32 {
        self.coeffs.len() as u32
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    fn canonicalize(&mut self) {
        if let Some(&m) = self.coeffs.iter().min() {
            for c in &mut self.coeffs {
                *c -= m;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Returns the integer value if this element is rational.
    pub fn as_integer(&self) -> Option<i64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    /// Complex conjugate: `omega^j -> omega^{-j}`.
    pub fn conj(&self) -> CyclotomicInt {
        let q = self.coeffs.len();
        let mut out = vec![0; q];
        for (j, &c) in self.coeffs.iter().enumerate() {
            out[(q - j) % q] = c;
        }
        CyclotomicInt { coeffs: out }
    }

    /// Numerical value, for display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let q = self.coeffs.len() as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (j, &c)| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / q;
            (re + c as f64 * t.cos(), im + c as f64 * t.sin())
        })
    }
}

/// Accumulates a sum of roots of unity without intermediate canonicalization.
#[derive(Clone, Debug)]
pub(crate) struct RootSum {
    counts: Vec<i64>,
}

impl RootSum {
    pub(crate) fn new(q: u32) -> RootSum {
        RootSum { counts: vec![0; q as usize] }
    }

    #[inline]
    pub(crate) fn push(&mut self, power: u32) {
        self.counts[power as usize] += 1;
    }

    pub(crate) fn is_zero(&self) -> bool {
        let first = self.counts[0];
        self.counts.iter().all(|&c| c == first)
    }

    pub(crate) fn finish(self) -> CyclotomicInt {
        CyclotomicInt::from_coeffs(self.counts)
    }
}

impl Add for &CyclotomicInt {
    type Output = CyclotomicInt;

    fn add(self, rhs: &CyclotomicInt) -> CyclotomicInt {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "mismatched cyclotomic orders");
        CyclotomicInt::from_coeffs(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect())
    }
}

impl Mul for &CyclotomicInt {
    type Output = CyclotomicInt;

    fn mul(self, rhs: &CyclotomicInt) -> CyclotomicInt {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "mismatched cyclotomic orders");
        let q = self.coeffs.len();
        let mut out = vec![0i64; q];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[(i + j) % q] += a * b;
            }
        }
        CyclotomicInt::from_coeffs(out)
    }
}

impl fmt::Display for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| match (j, c) {
                (0, c) => c.to_string(),
                (j, 1) => format!("w^{j}"),
                (j, c) => format!("{c}*w^{j}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}
