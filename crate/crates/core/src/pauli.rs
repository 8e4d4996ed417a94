//! Generalized qudit Pauli strings in exponent-vector form.
//!
//! A string is `omega^phase * (X^{x_1} Z^{z_1}) ⊗ ... ⊗ (X^{x_n} Z^{z_n})` with
//! `X|j> = |j+1>`, `Z|j> = omega^j |j>` and therefore `Z X = omega X Z`.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::codes::check_budget;
use crate::error::{Error, Result};
use crate::gf::{FieldElement, PrimeField};
use crate::states::CodeState;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    field: PrimeField,
    x: Vec<FieldElement>,
    z: Vec<FieldElement>,
    phase: FieldElement,
}

impl PauliString {
    pub fn new(field: PrimeField, x: Vec<FieldElement>, z: Vec<FieldElement>, phase: FieldElement) -> Result<PauliString> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: z.len() });
        }
        let reduce = |v: Vec<FieldElement>| v.into_iter().map(|e| field.element(e.value() as i64)).collect();
        Ok(PauliString { field, x: reduce(x), z: reduce(z), phase: field.element(phase.value() as i64) })
    }

    pub fn identity(field: PrimeField, n: usize) -> PauliString {
        PauliString { field, x: vec![FieldElement::ZERO; n], z: vec![FieldElement::ZERO; n], phase: FieldElement::ZERO }
    }

    /// Pure-X string `X^{e_1} ⊗ ... ⊗ X^{e_n}`.
    pub fn x_type(field: PrimeField, exponents: &[FieldElement]) -> PauliString {
        PauliString { field, x: exponents.to_vec(), z: vec![FieldElement::ZERO; exponents.len()], phase: FieldElement::ZERO }
    }

    /// Pure-Z string `Z^{e_1} ⊗ ... ⊗ Z^{e_n}`.
    pub fn z_type(field: PrimeField, exponents: &[FieldElement]) -> PauliString {
        PauliString { field, x: vec![FieldElement::ZERO; exponents.len()], z: exponents.to_vec(), phase: FieldElement::ZERO }
    }

    /// Convenience constructor from integer exponents.
    pub fn from_exponents(field: PrimeField, x: &[i64], z: &[i64]) -> Result<PauliString> {
        let conv = |v: &[i64]| v.iter().map(|&e| field.element(e)).collect::<Vec<_>>();
        PauliString::new(field, conv(x), conv(z), FieldElement::ZERO)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_exponents(&self) -> &[FieldElement] {
        &self.x
    }

    pub fn z_exponents(&self) -> &[FieldElement] {
        &self.z
    }

    pub fn phase(&self) -> FieldElement {
        self.phase
    }

    pub fn with_phase(mut self, phase: FieldElement) -> PauliString {
        self.phase = phase;
        self
    }

    /// Concatenated `(x | z)` exponent vector.
    pub fn symplectic_vector(&self) -> Vec<FieldElement> {
        self.x.iter().chain(&self.z).copied().collect()
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).filter(|(a, b)| !a.is_zero() || !b.is_zero()).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    fn check_compatible(&self, other: &PauliString) -> Result<()> {
        self.field.check_same(&other.field)?;
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        Ok(())
    }

    /// Operator product `self * other`, tracking the phase from moving each
    /// `Z` of `self` past the `X` of `other`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_compatible(other)?;
        let f = self.field;
        let reorder = f.dot(&self.z, &other.x);
        let phase = f.add(f.add(self.phase, other.phase), reorder);
        let x = self.x.iter().zip(&other.x).map(|(&a, &b)| f.add(a, b)).collect();
        let z = self.z.iter().zip(&other.z).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(PauliString { field: f, x, z, phase })
    }

    pub fn pow(&self, m: u64) -> PauliString {
        let mut acc = PauliString::identity(self.field, self.n());
        for _ in 0..m % self.field.modulus() as u64 {
            acc = acc.multiply(self).expect("same shape");
        }
        acc
    }

    /// `P ⊙ Q = P_Z · Q_X - P_X · Q_Z`, so that `P Q = omega^{P ⊙ Q} Q P`.
    pub fn symplectic(&self, other: &PauliString) -> Result<FieldElement> {
        self.check_compatible(other)?;
        let f = self.field;
        Ok(f.sub(f.dot(&self.z, &other.x), f.dot(&self.x, &other.z)))
    }

    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        Ok(self.symplectic(other)?.is_zero())
    }

    /// Applies the operator to a sparse state. Each basis string `b` maps to
    /// `b + x` with its phase raised by `z · b + phase`.
    pub fn apply(&self, state: &CodeState) -> Result<CodeState> {
        self.field.check_same(&state.field())?;
        if self.n() != state.n() {
            return Err(Error::DimensionMismatch { expected: state.n(), found: self.n() });
        }
        let terms = state.terms().map(|(key, ph)| self.act_on_key(state, key, ph));
        Ok(CodeState::from_terms_unchecked(state.field(), state.n(), terms))
    }

    /// Image of a single basis term, `(key, phase) -> (key', phase')`.
    #[inline]
    pub(crate) fn act_on_key(&self, layout: &CodeState, key: u64, phase: FieldElement) -> (u64, FieldElement) {
        let q = self.field.modulus() as u64;
        let mut rest = key;
        let mut out = 0u64;
        let mut ph = phase.value() as u64 + self.phase.value() as u64;
        let n = self.n();
        for site in (0..n).rev() {
            let digit = rest % q;
            rest /= q;
            ph += self.z[site].value() as u64 * digit;
            let shifted = (digit + self.x[site].value() as u64) % q;
            out += shifted * layout.place_value(site);
        }
        (out, FieldElement::from_reduced((ph % q) as u32))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.phase.is_zero() {
            write!(f, "w^{}*", self.phase)?;
        }
        let tokens = self.x.iter().zip(&self.z).map(|(a, b)| match (a.value(), b.value()) {
            (0, 0) => "I".to_string(),
            (a, 0) => format!("X{a}"),
            (0, b) => format!("Z{b}"),
            (a, b) => format!("X{a}Z{b}"),
        });
        write!(f, "{}", tokens.format("⊗"))
    }
}

impl PauliString {
    /// Parses the canonical text form (`I`, `X2`, `Z1`, `X1Z3` joined by `⊗`
    /// or `.`, optional `w^k*` phase prefix). A bare `X` or `Z` means power 1.
    pub fn parse(field: PrimeField, text: &str) -> Result<PauliString> {
        let text = text.trim();
        let (phase, body) = match text.strip_prefix("w^") {
            Some(rest) => {
                let (num, body) = rest.split_once('*').ok_or_else(|| Error::Parse(format!("bad phase prefix in '{text}'")))?;
                let ph: i64 = num.parse().map_err(|_| Error::Parse(format!("bad phase '{num}'")))?;
                (field.element(ph), body)
            }
            None => (FieldElement::ZERO, text),
        };
        let mut x = Vec::new();
        let mut z = Vec::new();
        for token in body.split(['⊗', '.']) {
            let (a, b) = parse_site(token.trim())?;
            x.push(field.element(a));
            z.push(field.element(b));
        }
        PauliString::new(field, x, z, phase)
    }
}

fn parse_site(token: &str) -> Result<(i64, i64)> {
    if token == "I" || token == "1" {
        return Ok((0, 0));
    }
    let bad = || Error::Parse(format!("bad site token '{token}'"));
    let mut a = 0;
    let mut b = 0;
    let mut rest = token;
    if let Some(r) = rest.strip_prefix('X') {
        let end = r.find('Z').unwrap_or(r.len());
        a = if end == 0 { 1 } else { r[..end].parse().map_err(|_| bad())? };
        rest = &r[end..];
    }
    if let Some(r) = rest.strip_prefix('Z') {
        b = if r.is_empty() { 1 } else { r.parse().map_err(|_| bad())? };
        rest = "";
    }
    if !rest.is_empty() || token.is_empty() {
        return Err(bad());
    }
    Ok((a, b))
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `q:<operator>`; the field prefix is required because the
    /// operator text alone does not fix q.
    fn from_str(s: &str) -> Result<PauliString> {
        let (q, body) = s.split_once(':').ok_or_else(|| Error::Parse("expected 'q:<operator>'".into()))?;
        let q: u64 = q.trim().parse().map_err(|_| Error::Parse(format!("bad modulus '{q}'")))?;
        PauliString::parse(PrimeField::new(q, None)?, body)
    }
}

/// Deterministic sweep over phase-free Pauli strings of weight `1..=max_weight`:
/// increasing weight, then site combination in lexicographic order, then
/// per-site exponent pairs `(a, b) != (0, 0)` in lexicographic order.
#[derive(Clone, Debug)]
pub struct ErrorSweep {
    field: PrimeField,
    n: usize,
    max_weight: usize,
}

impl ErrorSweep {
    pub fn new(field: PrimeField, n: usize, max_weight: usize, budget: u64) -> Result<ErrorSweep> {
        let sweep = ErrorSweep { field, n, max_weight: max_weight.min(n) };
        check_budget(sweep.total(), budget)?;
        Ok(sweep)
    }

    /// Count of operators of weight exactly `w`: `C(n, w) (q^2 - 1)^w`.
    pub fn count_weight(field: PrimeField, n: usize, w: usize) -> Option<u128> {
        let q = field.modulus() as u128;
        let local = q * q - 1;
        let mut binom: u128 = 1;
        for i in 0..w {
            binom = binom.checked_mul((n - i) as u128)? / (i as u128 + 1);
        }
        (0..w).try_fold(binom, |acc, _| acc.checked_mul(local))
    }

    pub fn total(&self) -> Option<u128> {
        (1..=self.max_weight).try_fold(0u128, |acc, w| acc.checked_add(Self::count_weight(self.field, self.n, w)?))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    /// Site combinations of size `w`, in order.
    pub fn supports(&self, w: usize) -> Vec<Vec<usize>> {
        (0..self.n).combinations(w).collect()
    }

    /// Number of exponent patterns on a support of size `w`.
    pub fn patterns(&self, w: usize) -> u64 {
        let q = self.field.modulus() as u64;
        (q * q - 1).pow(w as u32)
    }

    /// The `index`-th exponent pattern on `support`.
    pub fn operator(&self, support: &[usize], mut index: u64) -> PauliString {
        let q = self.field.modulus() as u64;
        let local = q * q - 1;
        let mut p = PauliString::identity(self.field, self.n);
        for &site in support.iter().rev() {
            let t = index % local + 1;
            index /= local;
            p.x[site] = self.field.element((t / q) as i64);
            p.z[site] = self.field.element((t % q) as i64);
        }
        p
    }

    /// All operators of weight exactly `w`, in sweep order.
    pub fn weight_iter(&self, w: usize) -> impl Iterator<Item = PauliString> + '_ {
        let pats = self.patterns(w);
        self.supports(w).into_iter().flat_map(move |s| (0..pats).map(move |i| self.operator(&s, i)))
    }

    pub fn iter(&self) -> impl Iterator<Item = PauliString> + '_ {
        (1..=self.max_weight).flat_map(move |w| self.weight_iter(w))
    }
}

/// Every phase-free Pauli string of weight `1..=max_weight`, after checking
/// that the count fits the budget.
pub fn enumerate_errors(field: PrimeField, n: usize, max_weight: usize, budget: u64) -> Result<Vec<PauliString>> {
    let sweep = ErrorSweep::new(field, n, max_weight, budget)?;
    Ok(sweep.iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::DEFAULT_BUDGET;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p, None).unwrap()
    }

    fn ps(p: u64, x: &[i64], z: &[i64]) -> PauliString {
        PauliString::from_exponents(f(p), x, z).unwrap()
    }

    /// Monomial matrix of a string on `(C^q)^n`, built site by site from
    /// `X|j> = |j+1>` and `Z|j> = omega^j |j>`: column `b` maps to `(row, phase)`.
    fn monomial(p: &PauliString) -> Vec<(usize, u32)> {
        let q = p.field().modulus() as usize;
        let n = p.n();
        let dim = q.pow(n as u32);
        (0..dim)
            .map(|col| {
                let mut digits: Vec<usize> = (0..n).map(|i| (col / q.pow((n - 1 - i) as u32)) % q).collect();
                let mut phase = p.phase().value() as usize;
                for i in 0..n {
                    // X^a Z^b: Z acts first
                    for _ in 0..p.z_exponents()[i].value() {
                        phase += digits[i];
                    }
                    for _ in 0..p.x_exponents()[i].value() {
                        digits[i] = (digits[i] + 1) % q;
                    }
                }
                let row = digits.iter().fold(0, |acc, &d| acc * q + d);
                (row, (phase % q) as u32)
            })
            .collect()
    }

    fn compose(a: &[(usize, u32)], b: &[(usize, u32)], q: u32) -> Vec<(usize, u32)> {
        b.iter().map(|&(r, pb)| (a[r].0, (a[r].1 + pb) % q)).collect()
    }

    #[test]
    fn multiply_examples() {
        let z = ps(3, &[0], &[1]);
        let x = ps(3, &[1], &[0]);
        let zx = z.multiply(&x).unwrap();
        assert_eq!((zx.x_exponents()[0].value(), zx.z_exponents()[0].value(), zx.phase().value()), (1, 1, 1));
        assert_eq!(x.multiply(&z).unwrap().phase(), FieldElement::ZERO);
        let a = ps(5, &[1, 0], &[0, 2]);
        let b = ps(5, &[3, 1], &[4, 0]);
        assert_eq!(a.multiply(&b).unwrap().to_string(), "w^2*X4Z4⊗X1Z2");
        assert_eq!(b.multiply(&a).unwrap().to_string(), "w^4*X4Z4⊗X1Z2");
    }

    #[test]
    fn power_to_q_is_identity_and_inverse_matches_oracle() {
        for p in [3u64, 5] {
            let q = p as u32;
            let fq = f(p);
            for a in 0..p as i64 {
                for b in 0..p as i64 {
                    let s = ps(p, &[a], &[b]);
                    let prod = s.multiply(&s.pow(p - 1)).unwrap();
                    assert!(prod.is_identity());
                    assert_eq!(prod.phase(), FieldElement::ZERO);
                    assert_eq!(compose(&monomial(&s), &monomial(&s.pow(p - 1)), q), monomial(&PauliString::identity(fq, 1)));
                }
            }
        }
    }

    #[test]
    fn symplectic_examples() {
        let z = ps(3, &[0], &[1]);
        let x = ps(3, &[1], &[0]);
        assert_eq!(z.symplectic(&x).unwrap().value(), 1);
        assert_eq!(x.symplectic(&z).unwrap().value(), 2);
        let xz = ps(5, &[1, 1], &[0, 0]);
        let zz = ps(5, &[0, 0], &[1, 4]);
        assert!(xz.commutes_with(&zz).unwrap());
        assert!(xz.symplectic(&ps(3, &[1, 1], &[0, 0])).is_err());
        assert!(xz.symplectic(&ps(5, &[1], &[0])).is_err());
    }

    #[test]
    fn weight_and_text() {
        let p = ps(5, &[1, 0, 0, 2], &[0, 0, 3, 4]);
        assert_eq!(p.weight(), 3);
        assert_eq!(p.to_string(), "X1⊗I⊗Z3⊗X2Z4");
        assert_eq!(PauliString::parse(f(5), "X1⊗I⊗Z3⊗X2Z4").unwrap(), p);
        assert_eq!(PauliString::parse(f(5), "X.I.Z3.X2Z4").unwrap(), ps(5, &[1, 0, 0, 2], &[0, 0, 3, 4]));
        let with_phase = p.clone().with_phase(f(5).element(2));
        assert_eq!("5:w^2*X1⊗I⊗Z3⊗X2Z4".parse::<PauliString>().unwrap(), with_phase);
        assert!(PauliString::parse(f(5), "Y1").is_err());
        assert!(PauliString::parse(f(5), "X1⊗").is_err());
        assert!(PauliString::identity(f(3), 4).is_identity());
    }

    #[test]
    fn apply_examples() {
        let fq = f(3);
        let s = CodeState::basis(fq, &[0, 1, 2]).unwrap();
        let out = ps(3, &[1, 1, 1], &[0, 0, 0]).apply(&s).unwrap();
        assert_eq!(out.to_terms(), vec![(vec![1, 2, 0], 0)]);
        let out = ps(3, &[0, 0, 0], &[1, 1, 1]).apply(&s).unwrap();
        assert_eq!(out.to_terms(), vec![(vec![0, 1, 2], 0)]);
        let out = ps(3, &[0, 0, 0], &[0, 1, 0]).apply(&s).unwrap();
        assert_eq!(out.to_terms(), vec![(vec![0, 1, 2], 1)]);
        assert!(ps(3, &[0, 0], &[0, 0]).apply(&s).is_err());
    }

    #[test]
    fn error_counts() {
        assert_eq!(ErrorSweep::count_weight(f(3), 1, 1), Some(8));
        assert_eq!(enumerate_errors(f(3), 3, 1, DEFAULT_BUDGET).unwrap().len(), 24);
        assert_eq!(ErrorSweep::count_weight(f(5), 5, 2), Some(10 * 24 * 24));
        assert_eq!(ErrorSweep::new(f(5), 5, 2, 100_000).unwrap().total(), Some(5 * 24 + 5760));
        assert!(matches!(ErrorSweep::new(f(5), 5, 2, 100), Err(Error::BudgetExceeded { .. })));
        let all = enumerate_errors(f(3), 2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(all.len(), 16 + 64);
        assert_eq!(all.iter().collect::<std::collections::HashSet<_>>().len(), all.len());
        assert!(all.windows(2).all(|w| w[0].weight() <= w[1].weight()));
        assert!(all.iter().all(|p| p.weight() >= 1 && p.phase().is_zero()));
    }

    fn arb(q: u64, n: usize) -> impl Strategy<Value = PauliString> {
        (prop::collection::vec(0..q as i64, n), prop::collection::vec(0..q as i64, n), 0..q as i64)
            .prop_map(move |(x, z, ph)| ps(q, &x, &z).with_phase(f(q).element(ph)))
    }

    proptest! {
        #[test]
        fn multiply_matches_oracle(a in arb(3, 2), b in arb(3, 2)) {
            prop_assert_eq!(monomial(&a.multiply(&b).unwrap()), compose(&monomial(&a), &monomial(&b), 3));
        }

        #[test]
        fn commutation_phase(a in arb(5, 3), b in arb(5, 3)) {
            let ab = a.multiply(&b).unwrap();
            let ba = b.multiply(&a).unwrap();
            let s = a.symplectic(&b).unwrap();
            prop_assert_eq!(ab.clone().with_phase(FieldElement::ZERO), ba.clone().with_phase(FieldElement::ZERO));
            prop_assert_eq!(ab.phase(), f(5).add(ba.phase(), s));
            prop_assert_eq!(b.symplectic(&a).unwrap(), f(5).neg(s));
        }

        #[test]
        fn apply_is_a_homomorphism(a in arb(3, 3), b in arb(3, 3), d in prop::collection::vec(0u32..3, 3)) {
            let s = CodeState::basis(f(3), &d).unwrap();
            let lhs = a.multiply(&b).unwrap().apply(&s).unwrap();
            let rhs = a.apply(&b.apply(&s).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn weight_is_subadditive(a in arb(5, 4), b in arb(5, 4)) {
            prop_assert!(a.multiply(&b).unwrap().weight() <= a.weight() + b.weight());
        }

        #[test]
        fn count_closed_form(n in 1usize..6, w in 0usize..4) {
            prop_assume!(w <= n);
            let sweep = ErrorSweep::new(f(3), n, w, u64::MAX).unwrap();
            prop_assert_eq!(sweep.weight_iter(w.max(1)).count() as u128, ErrorSweep::count_weight(f(3), n, w.max(1)).unwrap());
        }
    }
}
