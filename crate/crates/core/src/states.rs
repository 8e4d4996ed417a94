//! Sparse, unnormalized code states with uniform amplitudes and root-of-unity
//! phases, plus exact entanglement checks on them.
//!
//! A state is `sum_b omega^{phase(b)} |b>` over a support of basis strings
//! `b in GF(q)^n`. Basis strings are packed into a `u64` in base q with
//! site 0 as the most significant digit, so key order is lexicographic order.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{check_budget, checked_power, enumerate_codewords, GeneratorMatrix};
use crate::cyclotomic::{CyclotomicInt, RootSum};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, PrimeField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeState {
    field: PrimeField,
    n: usize,
    place: Vec<u64>,
    terms: BTreeMap<u64, FieldElement>,
}

fn place_values(field: PrimeField, n: usize) -> Result<Vec<u64>> {
    let q = field.modulus();
    match checked_power(q, n) {
        Some(total) if total <= u64::MAX as u128 => {}
        _ => return Err(Error::OutOfRange(format!("GF({q})^{n} basis strings do not fit in 64 bits"))),
    }
    let mut place = vec![1u64; n];
    for i in (0..n.saturating_sub(1)).rev() {
        place[i] = place[i + 1] * q as u64;
    }
    Ok(place)
}

impl CodeState {
    /// The empty (zero) state on `n` sites.
    pub fn empty(field: PrimeField, n: usize) -> Result<CodeState> {
        Ok(CodeState { field, n, place: place_values(field, n)?, terms: BTreeMap::new() })
    }

    /// Builds a state from explicit basis strings and phases. Strings must be
    /// distinct and of length `n`.
    pub fn from_terms<I>(field: PrimeField, n: usize, terms: I) -> Result<CodeState>
    where
        I: IntoIterator<Item = (Vec<FieldElement>, FieldElement)>,
    {
        let mut s = CodeState::empty(field, n)?;
        for (string, phase) in terms {
            if string.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: string.len() });
            }
            let key = s.encode(&string);
            if s.terms.insert(key, field.element(phase.value() as i64)).is_some() {
                return Err(Error::Parse(format!("duplicate basis string {:?}", s.digits(key))));
            }
        }
        Ok(s)
    }

    /// Builds a state from already-encoded, already-distinct keys.
    pub(crate) fn from_terms_unchecked<I>(field: PrimeField, n: usize, terms: I) -> CodeState
    where
        I: IntoIterator<Item = (u64, FieldElement)>,
    {
        let place = place_values(field, n).expect("layout already validated");
        CodeState { field, n, place, terms: terms.into_iter().collect() }
    }

    /// The product basis state `|digits>`.
    pub fn basis(field: PrimeField, digits: &[u32]) -> Result<CodeState> {
        let string = digits.iter().map(|&d| field.element(d as i64)).collect();
        CodeState::from_terms(field, digits.len(), [(string, FieldElement::ZERO)])
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub(crate) fn place_value(&self, site: usize) -> u64 {
        self.place[site]
    }

    /// Terms in lexicographic order of basis strings.
    pub fn terms(&self) -> impl Iterator<Item = (u64, FieldElement)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn phase_of(&self, key: u64) -> Option<FieldElement> {
        self.terms.get(&key).copied()
    }

    pub fn encode(&self, string: &[FieldElement]) -> u64 {
        string.iter().zip(&self.place).map(|(d, p)| d.value() as u64 * p).sum()
    }

    pub fn digits(&self, key: u64) -> Vec<u32> {
        let q = self.field.modulus() as u64;
        self.place.iter().map(|p| ((key / p) % q) as u32).collect()
    }

    /// Basis strings and phases as plain integers, in lexicographic order.
    pub fn to_terms(&self) -> Vec<(Vec<u32>, u32)> {
        self.terms().map(|(k, ph)| (self.digits(k), ph.value())).collect()
    }

    fn check_compatible(&self, other: &CodeState) -> Result<()> {
        self.field.check_same(&other.field)?;
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    /// If `other = omega^c * self` as vectors, returns `c`.
    pub fn phase_relative_to(&self, other: &CodeState) -> Option<FieldElement> {
        if self.check_compatible(other).is_err() || self.terms.len() != other.terms.len() {
            return None;
        }
        let f = self.field;
        let mut offset = None;
        for ((ka, pa), (kb, pb)) in self.terms().zip(other.terms()) {
            if ka != kb {
                return None;
            }
            let d = f.sub(pb, pa);
            match offset {
                None => offset = Some(d),
                Some(o) if o != d => return None,
                _ => {}
            }
        }
        offset.or(Some(FieldElement::ZERO))
    }

    pub fn to_record(&self) -> StateRecord {
        StateRecord {
            q: self.field.modulus(),
            n: self.n,
            terms: self.to_terms().into_iter().map(|(string, phase)| TermRecord { string, phase }).collect(),
        }
    }

    pub fn from_record(field: PrimeField, record: &StateRecord) -> Result<CodeState> {
        if record.q != field.modulus() {
            return Err(Error::FieldMismatch(field.modulus(), record.q));
        }
        CodeState::from_terms(
            field,
            record.n,
            record.terms.iter().map(|t| {
                (t.string.iter().map(|&d| field.element(d as i64)).collect(), field.element(t.phase as i64))
            }),
        )
    }
}

/// JSON form of a state: `{"q", "n", "terms": [{"string": [...], "phase": k}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRecord {
    pub q: u32,
    pub n: usize,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub string: Vec<u32>,
    pub phase: u32,
}

/// Equal-weight superposition of all codewords of `g`, every phase zero.
pub fn state_from_generator(g: &GeneratorMatrix, budget: u64) -> Result<CodeState> {
    let words = enumerate_codewords(g, budget)?;
    CodeState::from_terms(g.field(), g.n(), words.into_iter().map(|w| (w, FieldElement::ZERO)))
}

/// `<a|b>` without normalization: sum over shared strings of
/// `omega^{phase_b - phase_a}`.
pub fn inner_product(a: &CodeState, b: &CodeState) -> Result<CyclotomicInt> {
    a.check_compatible(b)?;
    let f = a.field;
    let mut acc = RootSum::new(f.modulus());
    let (small, large, flip) = if a.terms.len() <= b.terms.len() { (a, b, false) } else { (b, a, true) };
    for (key, ps) in small.terms() {
        if let Some(pl) = large.phase_of(key) {
            let (pa, pb) = if flip { (pl, ps) } else { (ps, pl) };
            acc.push(f.sub(pb, pa).value());
        }
    }
    Ok(acc.finish())
}

fn validate_subset(n: usize, subset: &[usize]) -> Result<Vec<usize>> {
    let sorted: Vec<usize> = subset.iter().copied().sorted().dedup().collect();
    if sorted.len() != subset.len() || sorted.last().is_some_and(|&m| m >= n) {
        return Err(Error::OutOfRange(format!("subset {subset:?} is not a set of sites of an {n}-site state")));
    }
    Ok(sorted)
}

/// Whether the reduced state on `subset` is proportional to the identity.
///
/// The reduced Gram matrix has entry `(r, r')` equal to the sum, over
/// complement strings `c` for which both `rc` and `r'c` are in the support,
/// of `omega^{phase(r'c) - phase(rc)}`. The test is exact: every diagonal
/// entry must be the same positive integer and every off-diagonal sum must
/// vanish in Z[omega].
pub fn marginal_is_maximally_mixed(s: &CodeState, subset: &[usize], budget: u64) -> Result<bool> {
    let subset = validate_subset(s.n, subset)?;
    if subset.is_empty() {
        return Ok(true);
    }
    let q = s.field.modulus() as u64;
    let dim = check_budget(checked_power(q as u32, subset.len()), budget)?;
    if dim > s.support_size() as u128 {
        return Ok(false);
    }
    let complement: Vec<usize> = (0..s.n).filter(|i| !subset.contains(i)).collect();

    let split = |key: u64| -> (u64, u64) {
        let mut r = 0u64;
        let mut c = 0u64;
        for &i in &subset {
            r = r * q + (key / s.place[i]) % q;
        }
        for &i in &complement {
            c = c * q + (key / s.place[i]) % q;
        }
        (r, c)
    };

    let mut counts = vec![0u64; dim as usize];
    let mut rows: Vec<(u64, u64, u32)> = Vec::with_capacity(s.support_size());
    for (key, ph) in s.terms() {
        let (r, c) = split(key);
        counts[r as usize] += 1;
        rows.push((c, r, ph.value()));
    }
    let first = counts[0];
    if first == 0 || counts.iter().any(|&c| c != first) {
        return Ok(false);
    }

    rows.sort_unstable();
    let f = s.field;
    let mut off_diagonal: HashMap<(u64, u64), RootSum> = HashMap::new();
    for group in rows.chunk_by(|a, b| a.0 == b.0) {
        if group.len() < 2 {
            continue;
        }
        for (i, a) in group.iter().enumerate() {
            for b in &group[i + 1..] {
                let d = f.sub(FieldElement::from_reduced(b.2), FieldElement::from_reduced(a.2));
                off_diagonal.entry((a.1, b.1)).or_insert_with(|| RootSum::new(q as u32)).push(d.value());
            }
        }
    }
    Ok(off_diagonal.values().all(RootSum::is_zero))
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Which subsets of a given size a uniformity check examines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetPolicy {
    Exhaustive,
    /// At most `per_size` distinct random subsets per size; exhaustive when
    /// there are no more subsets than that.
    Sampled { per_size: usize, seed: u64 },
}

fn subsets_of_size(n: usize, k: usize, policy: SubsetPolicy) -> Vec<Vec<usize>> {
    let all = || (0..n).combinations(k).collect::<Vec<_>>();
    match policy {
        SubsetPolicy::Exhaustive => all(),
        SubsetPolicy::Sampled { per_size, seed } => {
            let total = binomial(n, k);
            if total <= per_size as u128 {
                return all();
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut seen = std::collections::BTreeSet::new();
            while seen.len() < per_size {
                let mut s = sample(&mut rng, n, k).into_vec();
                s.sort_unstable();
                seen.insert(s);
            }
            seen.into_iter().collect()
        }
    }
}

/// Whether every subset of size `k` chosen by `policy` has a maximally mixed marginal.
pub fn is_k_uniform(s: &CodeState, k: usize, policy: SubsetPolicy, budget: u64) -> Result<bool> {
    let subsets = subsets_of_size(s.n, k, policy);
    let results: Vec<Result<bool>> =
        subsets.par_iter().map(|sub| marginal_is_maximally_mixed(s, sub, budget)).collect();
    results.into_iter().try_fold(true, |acc, r| Ok(acc && r?))
}

/// Largest `k <= floor(n/2)` such that every `k`-site marginal is maximally
/// mixed. Sizes are checked in increasing order, stopping at the first failure.
pub fn uniformity_with(s: &CodeState, policy: SubsetPolicy, budget: u64) -> Result<usize> {
    for k in 1..=s.n / 2 {
        if !is_k_uniform(s, k, policy, budget)? {
            return Ok(k - 1);
        }
    }
    Ok(s.n / 2)
}

/// Exhaustive [`uniformity_with`] under the default budget.
pub fn uniformity(s: &CodeState) -> Result<usize> {
    uniformity_with(s, SubsetPolicy::Exhaustive, crate::codes::DEFAULT_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{mds_generator, DEFAULT_BUDGET};
    use crate::gf::MatrixGF;
    use crate::pauli::PauliString;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p, None).unwrap()
    }

    fn ghz3() -> CodeState {
        let f3 = f(3);
        let g = GeneratorMatrix::from_matrix(MatrixGF::from_rows(f3, 3, &[[1, 1, 1]]).unwrap()).unwrap();
        state_from_generator(&g, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn states_from_generators() {
        let s = ghz3();
        assert_eq!(s.to_terms(), vec![(vec![0, 0, 0], 0), (vec![1, 1, 1], 0), (vec![2, 2, 2], 0)]);
        let ame = state_from_generator(&mds_generator(f(3), 2, 4).unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(ame.support_size(), 9);
        for (d, _) in ame.to_terms() {
            assert_eq!(d[2], (d[0] + d[1]) % 3);
            assert_eq!(d[3], (d[0] + 2 * d[1]) % 3);
        }
        let empty = state_from_generator(&GeneratorMatrix::empty(f(3), 3), DEFAULT_BUDGET).unwrap();
        assert_eq!(empty.to_terms(), vec![(vec![0, 0, 0], 0)]);
    }

    #[test]
    fn inner_products() {
        let s = ghz3();
        assert_eq!(inner_product(&s, &s).unwrap(), CyclotomicInt::from_int(3, 3));
        let m = PauliString::from_exponents(f(3), &[0, 1, 2], &[0, 0, 0]).unwrap();
        let s1 = m.apply(&s).unwrap();
        assert!(inner_product(&s, &s1).unwrap().is_zero());
    }

    #[test]
    fn marginals() {
        let ame = state_from_generator(&mds_generator(f(3), 2, 4).unwrap(), DEFAULT_BUDGET).unwrap();
        assert!(marginal_is_maximally_mixed(&ame, &[0, 1], DEFAULT_BUDGET).unwrap());
        let s = ghz3();
        assert!(!marginal_is_maximally_mixed(&s, &[0, 1], DEFAULT_BUDGET).unwrap());
        assert!(marginal_is_maximally_mixed(&s, &[], DEFAULT_BUDGET).unwrap());
        assert!(marginal_is_maximally_mixed(&s, &[2], DEFAULT_BUDGET).unwrap());
        assert!(marginal_is_maximally_mixed(&s, &[0, 0], DEFAULT_BUDGET).is_err());
        assert!(marginal_is_maximally_mixed(&s, &[3], DEFAULT_BUDGET).is_err());
        assert!(matches!(
            marginal_is_maximally_mixed(&ame, &[0, 1], 8),
            Err(Error::BudgetExceeded { required: 9, budget: 8 })
        ));
    }

    #[test]
    fn uniformity_examples() {
        let ame65 = state_from_generator(&mds_generator(PrimeField::new(5, Some(3)).unwrap(), 3, 6).unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(uniformity(&ame65).unwrap(), 3);
        assert_eq!(uniformity(&ghz3()).unwrap(), 1);
        assert_eq!(uniformity(&CodeState::basis(f(3), &[0, 0, 0]).unwrap()).unwrap(), 0);
    }

    #[test]
    fn phase_cancellation_counts_as_mixed() {
        // |00> + |01> + |02> + w(...) style: the Bell-type pair sum_i |i, i>
        // twisted by Z on site 0 stays maximally mixed on one site.
        let f3 = f(3);
        let bell = state_from_generator(&mds_generator(f3, 1, 2).unwrap(), DEFAULT_BUDGET).unwrap();
        let z = PauliString::from_exponents(f3, &[0, 0], &[1, 0]).unwrap();
        let twisted = z.apply(&bell).unwrap();
        assert_eq!(uniformity(&twisted).unwrap(), 1);
        assert!(inner_product(&bell, &twisted).unwrap().is_zero());
    }

    #[test]
    fn mds_states_have_uniformity_k() {
        for p in [3u64, 5] {
            let q = p as usize;
            for k in 1..=q.div_ceil(2) {
                for n in (2 * k)..=q + 1 {
                    let s = state_from_generator(&mds_generator(f(p), k, n).unwrap(), DEFAULT_BUDGET).unwrap();
                    assert_eq!(uniformity(&s).unwrap(), k, "q={q} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn record_roundtrip() {
        let s = ghz3();
        let rec = s.to_record();
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(json, r#"{"q":3,"n":3,"terms":[{"string":[0,0,0],"phase":0},{"string":[1,1,1],"phase":0},{"string":[2,2,2],"phase":0}]}"#);
        let back: StateRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(CodeState::from_record(f(3), &back).unwrap(), s);
    }

    #[test]
    fn sampled_subsets_are_distinct_and_deterministic() {
        let policy = SubsetPolicy::Sampled { per_size: 50, seed: 7 };
        let a = subsets_of_size(12, 4, policy);
        let b = subsets_of_size(12, 4, policy);
        assert_eq!(a.len(), 50);
        assert_eq!(a, b);
        assert_eq!(subsets_of_size(6, 2, policy).len(), 15);
    }

    fn pauli_strategy(q: u64, n: usize) -> impl Strategy<Value = PauliString> {
        (prop::collection::vec(0i64..q as i64, n), prop::collection::vec(0i64..q as i64, n), 0i64..q as i64)
            .prop_map(move |(x, z, ph)| {
                let fq = f(q);
                PauliString::from_exponents(fq, &x, &z).unwrap().with_phase(fq.element(ph))
            })
    }

    proptest! {
        #[test]
        fn uniformity_is_local_unitary_invariant(p in pauli_strategy(3, 4)) {
            let ame = state_from_generator(&mds_generator(f(3), 2, 4).unwrap(), DEFAULT_BUDGET).unwrap();
            prop_assert_eq!(uniformity(&p.apply(&ame).unwrap()).unwrap(), 2);
            let ghz = ghz3();
            let p3 = PauliString::new(f(3), p.x_exponents()[..3].to_vec(), p.z_exponents()[..3].to_vec(), p.phase()).unwrap();
            prop_assert_eq!(uniformity(&p3.apply(&ghz).unwrap()).unwrap(), 1);
        }

        #[test]
        fn inner_product_is_conjugate_symmetric(p in pauli_strategy(5, 3), r in pauli_strategy(5, 3)) {
            let g = mds_generator(f(5), 1, 3).unwrap();
            let base = state_from_generator(&g, DEFAULT_BUDGET).unwrap();
            let a = p.apply(&base).unwrap();
            let b = r.apply(&base).unwrap();
            prop_assert_eq!(inner_product(&a, &b).unwrap(), inner_product(&b, &a).unwrap().conj());
        }
    }
}
