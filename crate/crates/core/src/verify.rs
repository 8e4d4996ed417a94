//! Brute-force and algebraic verification of a [`QuantumCode`].
//!
//! Every check produces a [`CheckEntry`]; failures carry a [`Witness`] that
//! [`replay`] can re-evaluate independently. Error sweeps run over phase-free
//! Pauli strings in a fixed order (weight, then site combination, then
//! per-site exponent pairs), are split across threads by site combination, and
//! always report the failure with the lowest enumeration index.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::codes::DEFAULT_BUDGET;
use crate::construct::{Construction, QuantumCode};
use crate::cyclotomic::CyclotomicInt;
use crate::error::{Error, Result};
use crate::gf::{in_row_space, FieldElement, MatrixGF, PrimeField, RowEchelon};
use crate::pauli::{ErrorSweep, PauliString};
use crate::states::{inner_product, uniformity_with, SubsetPolicy};

/// How [`code_distance`] searches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    /// Both methods for `n <= 6`, symplectic only above.
    #[default]
    Auto,
    /// First weight at which the codeword overlap conditions fail.
    Overlap,
    /// Minimum weight of a string commuting with every stabilizer but outside
    /// the stabilizer group.
    Symplectic,
    Both,
}

impl DistanceMethod {
    fn methods(self, n: usize) -> Vec<DistanceMethod> {
        match self {
            DistanceMethod::Auto if n <= 6 => vec![DistanceMethod::Overlap, DistanceMethod::Symplectic],
            DistanceMethod::Auto => vec![DistanceMethod::Symplectic],
            DistanceMethod::Both => vec![DistanceMethod::Overlap, DistanceMethod::Symplectic],
            m => vec![m],
        }
    }

    fn name(self) -> &'static str {
        match self {
            DistanceMethod::Auto => "auto",
            DistanceMethod::Overlap => "overlap",
            DistanceMethod::Symplectic => "symplectic",
            DistanceMethod::Both => "both",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyOptions {
    /// Ceiling on the number of error operators examined by each sweep.
    pub budget: u64,
    /// Skips the error sweeps (Knill-Laflamme and distance).
    pub skip_distance: bool,
    pub distance_method: DistanceMethod,
    /// Measures the uniformity of every codeword.
    pub uniformity: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { budget: DEFAULT_BUDGET, skip_distance: false, distance_method: DistanceMethod::Auto, uniformity: true }
    }
}

/// A replayable counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `S |psi_m> != |psi_m>`.
    NotFixed { stabilizer: usize, codeword: usize },
    Anticommuting { first: usize, second: usize, symplectic: u32 },
    /// The stabilizer's exponent vector is in the span of the earlier ones.
    Dependent { stabilizer: usize },
    WrongCount { found: usize, expected: usize },
    /// `<psi_m| W |psi_m'>` is nonzero for `m != m'`, or differs from
    /// `<psi_0| W |psi_0>` (given as `expected`) for `m == m'`.
    KnillLaflamme { operator: String, m: usize, m_prime: usize, value: CyclotomicInt, expected: Option<CyclotomicInt> },
    /// The logical (`X1`, `Z2`, ...) does not commute with a stabilizer.
    LogicalNotCommuting { logical: String, stabilizer: usize, symplectic: u32 },
    SingularPairing { matrix: Vec<Vec<u32>> },
    /// The logical does not act on the codeword as a shift (X) or a phase (Z).
    LogicalAction { logical: String, codeword: usize },
    NotOrthogonal { first: usize, second: usize, value: CyclotomicInt },
    UnequalSupport { first: usize, second: usize },
    LowUniformity { codeword: usize, measured: usize, expected: usize },
    SingletonBound { n: usize, k: usize, d: usize },
    /// Measured distance differs from the claim. With `operator`, a string of
    /// weight below the claim that is detected by the method.
    DistanceMismatch { method: DistanceMethod, measured: usize, claimed: usize, operator: Option<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub operators_examined: u64,
    /// Wall time; not serialized so reports stay byte-identical across runs.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckEntry {
    fn new(name: &str) -> CheckEntry {
        CheckEntry {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            passed: true,
            witness: None,
            operators_examined: 0,
            elapsed: Duration::ZERO,
        }
    }

    fn param(mut self, key: &str, value: Value) -> CheckEntry {
        self.parameters.insert(key.to_string(), value);
        self
    }

    fn fail(mut self, witness: Witness) -> CheckEntry {
        self.passed = false;
        self.witness = Some(witness);
        self
    }

    fn timed(mut self, start: Instant) -> CheckEntry {
        self.elapsed = start.elapsed();
        self
    }
}

/// Measured `f(W) = <psi_m| W |psi_m>` over a sweep: nonzero values keyed by
/// operator text, plus how many operators gave zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlTable {
    pub nonzero: BTreeMap<String, CyclotomicInt>,
    pub zero_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceSummary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symplectic: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub code: String,
    pub q: u32,
    pub n: usize,
    pub k_logical: usize,
    pub distance_claimed: usize,
    pub options: VerifyOptions,
    pub checks: Vec<CheckEntry>,
    pub kl_diagonal: KlTable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<DistanceSummary>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn elapsed(&self) -> Duration {
        self.checks.iter().map(|c| c.elapsed).sum()
    }
}

/// Running total of swept operators against a ceiling.
#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    used: u128,
}

impl Budget {
    pub fn new(limit: u64) -> Budget {
        Budget { limit, used: 0 }
    }

    pub fn used(&self) -> u128 {
        self.used
    }

    fn charge(&mut self, count: Option<u128>) -> Result<()> {
        let required = count.and_then(|c| c.checked_add(self.used)).unwrap_or(u128::MAX);
        if required > self.limit as u128 {
            return Err(Error::BudgetExceeded { required, budget: self.limit });
        }
        self.used = required;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// stabilizers, orthonormality, logical algebra

fn exponent_matrix(field: PrimeField, n: usize, ops: &[PauliString]) -> MatrixGF {
    let rows: Vec<Vec<FieldElement>> = ops.iter().map(|p| p.symplectic_vector()).collect();
    MatrixGF::from_element_rows(field, 2 * n, &rows).expect("all strings have n sites")
}

/// Every stabilizer fixes every codeword exactly, the stabilizers pairwise
/// commute, and their exponent vectors are linearly independent.
pub fn check_stabilizes(code: &QuantumCode) -> CheckEntry {
    let start = Instant::now();
    let stabs = &code.stabilizers;
    let entry = CheckEntry::new("stabilizes")
        .param("generators", json!(stabs.len()))
        .param("codewords", json!(code.codewords.len()));
    let mut examined = 0u64;
    let fixing = stabs.iter().enumerate().find_map(|(i, s)| {
        code.codewords.iter().enumerate().find_map(|(m, psi)| {
            examined += 1;
            match s.apply(psi) {
                Ok(out) if &out == psi => None,
                _ => Some(Witness::NotFixed { stabilizer: i, codeword: m }),
            }
        })
    });
    let mut entry = match fixing {
        Some(w) => entry.fail(w),
        None => entry,
    };
    entry.operators_examined = examined;
    if !entry.passed {
        return entry.timed(start);
    }
    for (i, j) in (0..stabs.len()).tuple_combinations() {
        let s = stabs[i].symplectic(&stabs[j]).map(|v| v.value()).unwrap_or(u32::MAX);
        if s != 0 {
            return entry.fail(Witness::Anticommuting { first: i, second: j, symplectic: s }).timed(start);
        }
    }
    if let Some(i) = first_dependent(code.field, code.n, stabs) {
        return entry.fail(Witness::Dependent { stabilizer: i }).timed(start);
    }
    entry.timed(start)
}

fn first_dependent(field: PrimeField, n: usize, ops: &[PauliString]) -> Option<usize> {
    let full = exponent_matrix(field, n, ops);
    if full.rank() == ops.len() {
        return None;
    }
    (1..=ops.len()).find(|&i| exponent_matrix(field, n, &ops[..i]).rank() < i).map(|i| i - 1)
}

/// `n - k~` independent generators are needed to cut the space down to `q^{k~}`.
pub fn check_stabilizer_count(code: &QuantumCode) -> CheckEntry {
    let expected = code.n - code.k_logical;
    let entry = CheckEntry::new("stabilizer_count").param("expected", json!(expected));
    if code.stabilizers.len() == expected {
        entry
    } else {
        entry.fail(Witness::WrongCount { found: code.stabilizers.len(), expected })
    }
}

/// All `q^{k~}` codewords have equal support size and are pairwise orthogonal.
pub fn check_orthonormal(code: &QuantumCode) -> CheckEntry {
    let start = Instant::now();
    let words = &code.codewords;
    let mut entry = CheckEntry::new("orthonormal").param("codewords", json!(words.len()));
    let expected = crate::codes::checked_power(code.q(), code.k_logical);
    if expected != Some(words.len() as u128) {
        return entry.fail(Witness::WrongCount { found: words.len(), expected: expected.unwrap_or(0) as usize });
    }
    for (i, j) in (0..words.len()).tuple_combinations() {
        entry.operators_examined += 1;
        if words[i].support_size() != words[j].support_size() {
            return entry.fail(Witness::UnequalSupport { first: i, second: j }).timed(start);
        }
        match inner_product(&words[i], &words[j]) {
            Ok(v) if v.is_zero() => {}
            Ok(v) => return entry.fail(Witness::NotOrthogonal { first: i, second: j, value: v }).timed(start),
            Err(_) => return entry.fail(Witness::UnequalSupport { first: i, second: j }).timed(start),
        }
    }
    entry.timed(start)
}

fn logical_name(kind: char, i: usize) -> String {
    format!("{kind}{}", i + 1)
}

fn logical_by_name<'a>(code: &'a QuantumCode, name: &str) -> Option<&'a PauliString> {
    let (kind, idx) = name.split_at(1);
    let i: usize = idx.parse().ok()?;
    match kind {
        "X" => code.logical_x.get(i.checked_sub(1)?),
        "Z" => code.logical_z.get(i.checked_sub(1)?),
        _ => None,
    }
}

/// Pairing matrix `P[i][j] = X_i ⊙ Z_j`.
pub fn logical_pairing(code: &QuantumCode) -> Result<MatrixGF> {
    let k = code.k_logical;
    let mut p = MatrixGF::zeros(code.field, k, k);
    for (i, x) in code.logical_x.iter().enumerate() {
        for (j, z) in code.logical_z.iter().enumerate() {
            p.set(i, j, x.symplectic(z)?);
        }
    }
    Ok(p)
}

/// Logicals commute with every stabilizer, the X/Z pairing matrix is
/// nonsingular, each `X_i` shifts logical digit `m_i` by one (up to a global
/// phase), and each `Z_j` multiplies `|psi_m>` by the phase predicted from
/// its commutation with the `X_i`. Whether the pairing is diagonal is
/// recorded as a parameter.
pub fn check_logical_algebra(code: &QuantumCode) -> CheckEntry {
    let start = Instant::now();
    let f = code.field;
    let k = code.k_logical;
    let mut entry = CheckEntry::new("logical_algebra").param("logicals", json!(k));
    if code.logical_x.len() != k || code.logical_z.len() != k {
        return entry.fail(Witness::WrongCount { found: code.logical_x.len().min(code.logical_z.len()), expected: k });
    }
    let named = code
        .logical_x
        .iter()
        .enumerate()
        .map(|(i, l)| (logical_name('X', i), l))
        .chain(code.logical_z.iter().enumerate().map(|(i, l)| (logical_name('Z', i), l)));
    for (name, l) in named {
        for (s_idx, s) in code.stabilizers.iter().enumerate() {
            entry.operators_examined += 1;
            let v = l.symplectic(s).map(|v| v.value()).unwrap_or(u32::MAX);
            if v != 0 {
                return entry.fail(Witness::LogicalNotCommuting { logical: name, stabilizer: s_idx, symplectic: v }).timed(start);
            }
        }
    }
    if k == 0 {
        return entry.timed(start);
    }

    let pairing = match logical_pairing(code) {
        Ok(p) => p,
        Err(_) => return entry.fail(Witness::SingularPairing { matrix: Vec::new() }).timed(start),
    };
    let diagonal = (0..k).all(|i| (0..k).all(|j| (i == j) != pairing.get(i, j).is_zero()));
    entry = entry.param("pairing", json!(pairing.to_rows())).param("pairing_diagonal", json!(diagonal));
    if !pairing.is_nonsingular().unwrap_or(false) {
        return entry.fail(Witness::SingularPairing { matrix: pairing.to_rows() }).timed(start);
    }

    let q = code.q();
    for (i, x) in code.logical_x.iter().enumerate() {
        for (m, psi) in code.codewords.iter().enumerate() {
            entry.operators_examined += 1;
            let mut target = code.logical_string(m);
            target[i] = (target[i] + 1) % q;
            let expected = &code.codewords[code.codeword_index(&target)];
            let ok = x.apply(psi).ok().and_then(|out| expected.phase_relative_to(&out)).is_some();
            if !ok {
                return entry.fail(Witness::LogicalAction { logical: logical_name('X', i), codeword: m }).timed(start);
            }
        }
    }
    for (j, z) in code.logical_z.iter().enumerate() {
        let theta = |psi: &crate::states::CodeState| z.apply(psi).ok().and_then(|out| psi.phase_relative_to(&out));
        let Some(theta0) = theta(&code.codewords[0]) else {
            return entry.fail(Witness::LogicalAction { logical: logical_name('Z', j), codeword: 0 }).timed(start);
        };
        let shifts: Vec<FieldElement> = code.logical_x.iter().map(|x| z.symplectic(x).expect("same shape")).collect();
        for (m, psi) in code.codewords.iter().enumerate() {
            entry.operators_examined += 1;
            let digits: Vec<FieldElement> = code.logical_string(m).into_iter().map(|d| f.element(d as i64)).collect();
            let predicted = f.add(theta0, f.dot(&digits, &shifts));
            if theta(psi) != Some(predicted) {
                return entry.fail(Witness::LogicalAction { logical: logical_name('Z', j), codeword: m }).timed(start);
            }
        }
    }
    entry.timed(start)
}

fn expected_uniformity(code: &QuantumCode) -> usize {
    let p = &code.provenance;
    match p.construction {
        Construction::Ame => p.seed_k,
        Construction::Shorten { r, .. } => p.seed_k.saturating_sub(r),
        Construction::ModShorten => code.n / 2,
    }
}

/// Every codeword is `u`-uniform for the `u` its construction guarantees.
pub fn check_uniformity(code: &QuantumCode, policy: SubsetPolicy, budget: u64) -> Result<CheckEntry> {
    let start = Instant::now();
    let expected = expected_uniformity(code);
    let measured: Vec<usize> =
        code.codewords.par_iter().map(|psi| uniformity_with(psi, policy, budget)).collect::<Result<_>>()?;
    let entry = CheckEntry::new("codeword_uniformity")
        .param("expected", json!(expected))
        .param("measured_min", json!(measured.iter().min()));
    let entry = match measured.iter().position(|&u| u < expected) {
        Some(m) => entry.fail(Witness::LowUniformity { codeword: m, measured: measured[m], expected }),
        None => entry,
    };
    Ok(entry.timed(start))
}

pub fn check_singleton(code: &QuantumCode) -> CheckEntry {
    let entry = CheckEntry::new("quantum_singleton");
    if code.satisfies_quantum_singleton(code.distance_claimed) {
        entry
    } else {
        entry.fail(Witness::SingletonBound { n: code.n, k: code.k_logical, d: code.distance_claimed })
    }
}

// ---------------------------------------------------------------------------
// overlap sweeps

/// Result of evaluating the overlap conditions on one operator.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Outcome {
    Pass(CyclotomicInt),
    Fail { m: usize, m_prime: usize, value: CyclotomicInt, expected: Option<CyclotomicInt> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Off-diagonal overlaps vanish and the diagonal is independent of `m`.
    KnillLaflamme,
    /// The single codeword has zero overlap with its image (pure distance).
    Pure,
}

/// All codeword terms plus a lookup from basis string to `(m, phase)`.
struct Codebook<'a> {
    code: &'a QuantumCode,
    q: u64,
    words: usize,
    place: Vec<u64>,
    terms: Vec<(u32, u64, u32)>,
    index: HashMap<u64, Vec<(u32, u32)>>,
}

struct Matches {
    pairs: Vec<u32>,
    base: Vec<u32>,
    /// Digits of the pre-image on the support sites, `support.len()` per match.
    digits: Vec<u32>,
    touched: Vec<u32>,
}

#[derive(Default)]
struct SupportResult {
    failure: Option<(u64, Outcome)>,
    nonzero: Vec<(u64, CyclotomicInt)>,
    zeros: u64,
}

struct WeightResult {
    failure: Option<(PauliString, Outcome)>,
    nonzero: Vec<(PauliString, CyclotomicInt)>,
    zeros: u64,
    examined: u64,
}

impl<'a> Codebook<'a> {
    fn new(code: &'a QuantumCode) -> Codebook<'a> {
        let q = code.q() as u64;
        let place: Vec<u64> = (0..code.n).map(|i| q.pow((code.n - 1 - i) as u32)).collect();
        let mut terms = Vec::new();
        let mut index: HashMap<u64, Vec<(u32, u32)>> = HashMap::new();
        for (m, psi) in code.codewords.iter().enumerate() {
            for (key, ph) in psi.terms() {
                terms.push((m as u32, key, ph.value()));
                index.entry(key).or_default().push((m as u32, ph.value()));
            }
        }
        Codebook { code, q, words: code.codewords.len(), place, terms, index }
    }

    fn matches(&self, support: &[usize], x: &[u32]) -> Matches {
        let q = self.q;
        let w = support.len();
        let mut out = Matches { pairs: Vec::new(), base: Vec::new(), digits: Vec::new(), touched: Vec::new() };
        let mut digits = vec![0u32; w];
        for &(m_src, key, ph_src) in &self.terms {
            let mut image = key;
            for (s, &site) in support.iter().enumerate() {
                let d = (key / self.place[site]) % q;
                digits[s] = d as u32;
                let shifted = (d + x[s] as u64) % q;
                image = image - d * self.place[site] + shifted * self.place[site];
            }
            if let Some(hits) = self.index.get(&image) {
                for &(m_dst, ph_dst) in hits {
                    out.pairs.push(m_dst * self.words as u32 + m_src);
                    out.base.push(((ph_src as u64 + q - ph_dst as u64) % q) as u32);
                    out.digits.extend_from_slice(&digits);
                }
            }
        }
        out.touched = out.pairs.iter().copied().sorted_unstable().dedup().collect();
        out
    }

    fn evaluate(&self, matches: &Matches, z: &[u32], counts: &mut [i64], mode: Mode) -> Outcome {
        let q = self.q as usize;
        let w = z.len();
        for &p in &matches.touched {
            counts[p as usize * q..(p as usize + 1) * q].fill(0);
        }
        for (idx, (&pair, &base)) in matches.pairs.iter().zip(&matches.base).enumerate() {
            let digits = &matches.digits[idx * w..(idx + 1) * w];
            let phase = digits.iter().zip(z).fold(base as usize, |acc, (&d, &e)| acc + (d * e) as usize) % q;
            counts[pair as usize * q + phase] += 1;
        }
        let cell = |p: usize| &counts[p * q..(p + 1) * q];
        let vanishes = |c: &[i64]| c.iter().all(|&v| v == c[0]);
        let k = self.words;
        for &p in &matches.touched {
            let (m, m_prime) = (p as usize / k, p as usize % k);
            if m != m_prime && !vanishes(cell(p as usize)) {
                return Outcome::Fail { m, m_prime, value: CyclotomicInt::from_coeffs(cell(p as usize).to_vec()), expected: None };
            }
        }
        let diag = |m: usize| {
            let p = m * k + m;
            if matches.touched.binary_search(&(p as u32)).is_ok() {
                CyclotomicInt::from_coeffs(cell(p).to_vec())
            } else {
                CyclotomicInt::zero(q as u32)
            }
        };
        let f0 = diag(0);
        match mode {
            Mode::Pure if !f0.is_zero() => Outcome::Fail { m: 0, m_prime: 0, value: f0, expected: None },
            _ => {
                for m in 1..k {
                    let v = diag(m);
                    if v != f0 {
                        return Outcome::Fail { m, m_prime: m, value: v, expected: Some(f0) };
                    }
                }
                Outcome::Pass(f0)
            }
        }
    }

    /// Every operator supported exactly on `support`, grouped by X part so
    /// that the term matching is shared by all Z parts.
    fn sweep_support(&self, support: &[usize], mode: Mode) -> SupportResult {
        let q = self.q as u32;
        let w = support.len();
        let local = (q * q - 1) as u64;
        let mut result = SupportResult::default();
        let mut counts = vec![0i64; self.words * self.words * q as usize];
        let mut x = vec![0u32; w];
        let mut z = vec![0u32; w];
        loop {
            let m = self.matches(support, &x);
            // z ranges over assignments with (x_s, z_s) != (0, 0) on every site
            let lower: Vec<u32> = x.iter().map(|&a| u32::from(a == 0)).collect();
            z.copy_from_slice(&lower);
            let variants: u64 = lower.iter().map(|&l| (q - l) as u64).product();
            if m.pairs.is_empty() {
                result.zeros += variants;
            } else {
                loop {
                    let idx = x.iter().zip(&z).fold(0u64, |acc, (&a, &b)| acc * local + (a * q + b - 1) as u64);
                    match self.evaluate(&m, &z, &mut counts, mode) {
                        Outcome::Pass(v) if v.is_zero() => result.zeros += 1,
                        Outcome::Pass(v) => result.nonzero.push((idx, v)),
                        fail => {
                            if result.failure.as_ref().is_none_or(|(best, _)| idx < *best) {
                                result.failure = Some((idx, fail));
                            }
                        }
                    }
                    if !odometer(&mut z, &lower, q) {
                        break;
                    }
                }
            }
            if !odometer(&mut x, &vec![0; w], q) {
                break;
            }
        }
        result.nonzero.sort_unstable_by_key(|(i, _)| *i);
        result
    }

    fn sweep_weight(&self, w: usize, mode: Mode) -> WeightResult {
        let sweep = ErrorSweep::new(self.code.field, self.code.n, w, u64::MAX).expect("unbounded budget");
        let supports = sweep.supports(w);
        let per_support = sweep.patterns(w);
        let results: Vec<SupportResult> = supports.par_iter().map(|s| self.sweep_support(s, mode)).collect();
        let mut out = WeightResult { failure: None, nonzero: Vec::new(), zeros: 0, examined: 0 };
        for (support, r) in supports.iter().zip(results) {
            if let Some((idx, outcome)) = r.failure {
                out.examined += idx + 1;
                out.nonzero.extend(r.nonzero.into_iter().filter(|(i, _)| *i < idx).map(|(i, v)| (sweep.operator(support, i), v)));
                out.failure = Some((sweep.operator(support, idx), outcome));
                return out;
            }
            out.examined += per_support;
            out.zeros += r.zeros;
            out.nonzero.extend(r.nonzero.into_iter().map(|(i, v)| (sweep.operator(support, i), v)));
        }
        out
    }

    /// Overlap conditions for a single operator, using the same engine as the sweep.
    fn evaluate_operator(&self, op: &PauliString, mode: Mode) -> Outcome {
        let support: Vec<usize> = (0..op.n()).filter(|&i| !op.x_exponents()[i].is_zero() || !op.z_exponents()[i].is_zero()).collect();
        let x: Vec<u32> = support.iter().map(|&i| op.x_exponents()[i].value()).collect();
        let z: Vec<u32> = support.iter().map(|&i| op.z_exponents()[i].value()).collect();
        let m = self.matches(&support, &x);
        let mut counts = vec![0i64; self.words * self.words * self.q as usize];
        self.evaluate(&m, &z, &mut counts, mode)
    }
}

/// Advances `digits` as a base-`q` counter whose digit `s` starts at `lower[s]`.
/// Returns false after the last assignment.
fn odometer(digits: &mut [u32], lower: &[u32], q: u32) -> bool {
    for s in (0..digits.len()).rev() {
        if digits[s] + 1 < q {
            digits[s] += 1;
            return true;
        }
        digits[s] = lower[s];
    }
    false
}

fn kl_witness(op: &PauliString, outcome: Outcome) -> Witness {
    match outcome {
        Outcome::Fail { m, m_prime, value, expected } => {
            Witness::KnillLaflamme { operator: op.to_string(), m, m_prime, value, expected }
        }
        Outcome::Pass(_) => unreachable!("witnesses come from failures"),
    }
}

/// Knill-Laflamme conditions for every phase-free string of weight `1..d`.
pub fn check_knill_laflamme(code: &QuantumCode, d: usize, budget: &mut Budget) -> Result<(CheckEntry, KlTable)> {
    let start = Instant::now();
    let max_w = d.saturating_sub(1).min(code.n);
    let total = (1..=max_w).try_fold(0u128, |acc, w| acc.checked_add(ErrorSweep::count_weight(code.field, code.n, w)?));
    budget.charge(total)?;
    let book = Codebook::new(code);
    let mut entry = CheckEntry::new("knill_laflamme").param("d", json!(d));
    let mut table = KlTable::default();
    for w in 1..=max_w {
        let r = book.sweep_weight(w, Mode::KnillLaflamme);
        entry.operators_examined += r.examined;
        table.zero_count += r.zeros;
        table.nonzero.extend(r.nonzero.into_iter().map(|(p, v)| (p.to_string(), v)));
        if let Some((op, outcome)) = r.failure {
            return Ok((entry.fail(kl_witness(&op, outcome)).timed(start), table));
        }
    }
    Ok((entry.timed(start), table))
}

// ---------------------------------------------------------------------------
// distance

/// Commutes with every stabilizer and (for `k~ > 0`) lies outside their span.
struct Normalizer {
    field: PrimeField,
    stabs: Vec<(Vec<u32>, Vec<u32>)>,
    echelon: RowEchelon,
    pure: bool,
}

impl Normalizer {
    fn new(code: &QuantumCode) -> Normalizer {
        let stabs = code
            .stabilizers
            .iter()
            .map(|s| {
                (s.x_exponents().iter().map(|e| e.value()).collect(), s.z_exponents().iter().map(|e| e.value()).collect())
            })
            .collect();
        Normalizer {
            field: code.field,
            stabs,
            echelon: exponent_matrix(code.field, code.n, &code.stabilizers).rref(),
            pure: code.k_logical == 0,
        }
    }

    fn detects(&self, support: &[usize], x: &[u32], z: &[u32]) -> bool {
        let q = self.field.modulus();
        let commutes = self.stabs.iter().all(|(sx, sz)| {
            let mut acc = 0u32;
            for (s, &site) in support.iter().enumerate() {
                acc = (acc + sz[site] * x[s] + (q - sx[site]) * z[s]) % q;
            }
            acc == 0
        });
        if !commutes {
            return false;
        }
        if self.pure {
            return true;
        }
        let n = self.stabs.first().map_or(0, |(sx, _)| sx.len());
        let mut v = vec![FieldElement::ZERO; 2 * n];
        for (s, &site) in support.iter().enumerate() {
            v[site] = self.field.element(x[s] as i64);
            v[n + site] = self.field.element(z[s] as i64);
        }
        !in_row_space(&self.echelon, &v)
    }

    fn detects_operator(&self, op: &PauliString) -> bool {
        let support: Vec<usize> = (0..op.n()).collect();
        let x: Vec<u32> = op.x_exponents().iter().map(|e| e.value()).collect();
        let z: Vec<u32> = op.z_exponents().iter().map(|e| e.value()).collect();
        self.detects(&support, &x, &z)
    }

    fn first_in_support(&self, sweep: &ErrorSweep, support: &[usize]) -> Option<u64> {
        let q = self.field.modulus();
        let w = support.len();
        let mut x = vec![0u32; w];
        let mut z = vec![0u32; w];
        (0..sweep.patterns(w)).find(|&idx| {
            let mut rest = idx;
            for s in (0..w).rev() {
                let t = (rest % (q as u64 * q as u64 - 1)) as u32 + 1;
                rest /= q as u64 * q as u64 - 1;
                x[s] = t / q;
                z[s] = t % q;
            }
            self.detects(support, &x, &z)
        })
    }
}

/// Distance found by one method, with the lowest-index operator of that weight
/// detected by the method.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceReport {
    pub method: DistanceMethod,
    pub distance: usize,
    pub witness: PauliString,
    pub examined: u64,
}

fn phase_free(p: &PauliString) -> PauliString {
    p.clone().with_phase(FieldElement::ZERO)
}

/// Known low-weight candidates that bound the sweep from above: the logicals,
/// or the stabilizer generators when there is a single codeword.
fn candidates(code: &QuantumCode) -> Vec<PauliString> {
    let mut c: Vec<PauliString> = if code.k_logical == 0 {
        code.stabilizers.iter().map(phase_free).collect()
    } else {
        code.logical_x.iter().chain(&code.logical_z).map(phase_free).collect()
    };
    c.retain(|p| !p.is_identity());
    c.sort_by_key(|p| p.weight());
    c
}

/// Sweeps weights upward until some operator is detected. A detected known
/// operator (a logical, or a stabilizer for `k~ = 0`) caps the sweep at its
/// weight, so only strictly lighter operators are enumerated.
pub fn code_distance(code: &QuantumCode, method: DistanceMethod, budget: &mut Budget) -> Result<DistanceReport> {
    let method = match method {
        DistanceMethod::Auto | DistanceMethod::Both => {
            if code.n <= 6 {
                DistanceMethod::Overlap
            } else {
                DistanceMethod::Symplectic
            }
        }
        m => m,
    };
    let mode = if code.k_logical == 0 { Mode::Pure } else { Mode::KnillLaflamme };
    let book = (method == DistanceMethod::Overlap).then(|| Codebook::new(code));
    let normalizer = (method == DistanceMethod::Symplectic).then(|| Normalizer::new(code));
    let detects = |op: &PauliString| match (&book, &normalizer) {
        (Some(b), _) => matches!(b.evaluate_operator(op, mode), Outcome::Fail { .. }),
        (_, Some(nz)) => nz.detects_operator(op),
        _ => unreachable!(),
    };
    let bound = candidates(code).into_iter().find(|p| detects(p));
    let max_w = bound.as_ref().map_or(code.n, |p| p.weight() - 1);
    let mut examined = 0u64;
    for w in 1..=max_w {
        budget.charge(ErrorSweep::count_weight(code.field, code.n, w))?;
        let sweep = ErrorSweep::new(code.field, code.n, w, u64::MAX)?;
        let found = match (&book, &normalizer) {
            (Some(b), _) => {
                let r = b.sweep_weight(w, mode);
                examined += r.examined;
                r.failure.map(|(op, _)| op)
            }
            (_, Some(nz)) => {
                let supports = sweep.supports(w);
                let hits: Vec<Option<u64>> = supports.par_iter().map(|s| nz.first_in_support(&sweep, s)).collect();
                let per = sweep.patterns(w);
                let mut found = None;
                for (s, hit) in supports.iter().zip(hits) {
                    match hit {
                        Some(i) => {
                            examined += i + 1;
                            found = Some(sweep.operator(s, i));
                            break;
                        }
                        None => examined += per,
                    }
                }
                found
            }
            _ => unreachable!(),
        };
        if let Some(op) = found {
            return Ok(DistanceReport { method, distance: w, witness: op, examined });
        }
    }
    match bound {
        Some(op) => Ok(DistanceReport { method, distance: op.weight(), witness: op, examined }),
        None => Err(Error::OutOfRange(format!("no operator of weight <= {} is detected by the {} method", code.n, method.name()))),
    }
}

fn distance_entry(code: &QuantumCode, reports: &[DistanceReport]) -> CheckEntry {
    let mut entry = CheckEntry::new("distance").param("claimed", json!(code.distance_claimed));
    for r in reports {
        entry = entry.param(r.method.name(), json!(r.distance));
        entry.operators_examined += r.examined;
    }
    if let Some(bad) = reports.iter().find(|r| r.distance != code.distance_claimed) {
        let operator = (bad.distance < code.distance_claimed).then(|| bad.witness.to_string());
        return entry.fail(Witness::DistanceMismatch {
            method: bad.method,
            measured: bad.distance,
            claimed: code.distance_claimed,
            operator,
        });
    }
    entry
}

/// Runs every applicable check. Errors only when the budget is exceeded or
/// the input is malformed; check failures are report entries. Each error
/// sweep gets its own `options.budget` ceiling.
pub fn verify_code(code: &QuantumCode, options: &VerifyOptions) -> Result<VerificationReport> {
    let mut checks = vec![
        check_singleton(code),
        check_stabilizer_count(code),
        check_stabilizes(code),
        check_orthonormal(code),
        check_logical_algebra(code),
    ];
    if options.uniformity {
        checks.push(check_uniformity(code, SubsetPolicy::Exhaustive, options.budget)?);
    }
    let mut kl_diagonal = KlTable::default();
    let mut distance = None;
    if !options.skip_distance {
        let (entry, table) = check_knill_laflamme(code, code.distance_claimed, &mut Budget::new(options.budget))?;
        checks.push(entry);
        kl_diagonal = table;
        let start = Instant::now();
        let reports = options
            .distance_method
            .methods(code.n)
            .into_iter()
            .map(|m| code_distance(code, m, &mut Budget::new(options.budget)))
            .collect::<Result<Vec<_>>>()?;
        let find = |m| reports.iter().find(|r| r.method == m).map(|r| r.distance);
        distance = Some(DistanceSummary { overlap: find(DistanceMethod::Overlap), symplectic: find(DistanceMethod::Symplectic) });
        checks.push(distance_entry(code, &reports).timed(start));
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport {
        code: code.label(),
        q: code.q(),
        n: code.n,
        k_logical: code.k_logical,
        distance_claimed: code.distance_claimed,
        options: options.clone(),
        checks,
        kl_diagonal,
        distance,
        passed,
    })
}

/// `<psi_m| W |psi_m'>` computed directly by applying `W` and taking the inner product.
pub fn matrix_element(code: &QuantumCode, op: &PauliString, m: usize, m_prime: usize) -> Result<CyclotomicInt> {
    let image = op.apply(&code.codewords[m_prime])?;
    inner_product(&code.codewords[m], &image)
}

/// Re-evaluates a witness against `code` through an independent path.
/// Returns whether the failure it describes is reproduced.
pub fn replay(code: &QuantumCode, witness: &Witness, budget: u64) -> Result<bool> {
    let get = |v: &[PauliString], i: usize| v.get(i).cloned().ok_or_else(|| Error::OutOfRange(format!("index {i}")));
    Ok(match witness {
        Witness::NotFixed { stabilizer, codeword } => {
            let s = get(&code.stabilizers, *stabilizer)?;
            let psi = code.codewords.get(*codeword).ok_or_else(|| Error::OutOfRange(format!("codeword {codeword}")))?;
            &s.apply(psi)? != psi
        }
        Witness::Anticommuting { first, second, .. } => {
            !get(&code.stabilizers, *first)?.commutes_with(&get(&code.stabilizers, *second)?)?
        }
        Witness::Dependent { stabilizer } => {
            let upto = &code.stabilizers[..=*stabilizer];
            exponent_matrix(code.field, code.n, upto).rank() < upto.len()
        }
        Witness::WrongCount { .. } => {
            code.stabilizers.len() != code.n - code.k_logical
                || code.logical_x.len() != code.k_logical
                || code.logical_z.len() != code.k_logical
                || crate::codes::checked_power(code.q(), code.k_logical) != Some(code.codewords.len() as u128)
        }
        Witness::KnillLaflamme { operator, m, m_prime, .. } => {
            let op = PauliString::parse(code.field, operator)?;
            let value = matrix_element(code, &op, *m, *m_prime)?;
            if m != m_prime || code.k_logical == 0 {
                !value.is_zero()
            } else {
                value != matrix_element(code, &op, 0, 0)?
            }
        }
        Witness::LogicalNotCommuting { logical, stabilizer, .. } => {
            let l = logical_by_name(code, logical).ok_or_else(|| Error::Parse(format!("no logical {logical}")))?;
            !l.commutes_with(&get(&code.stabilizers, *stabilizer)?)?
        }
        Witness::SingularPairing { .. } => !logical_pairing(code)?.is_nonsingular()?,
        Witness::LogicalAction { .. } | Witness::LowUniformity { .. } => {
            let entry = match witness {
                Witness::LogicalAction { .. } => check_logical_algebra(code),
                _ => check_uniformity(code, SubsetPolicy::Exhaustive, budget)?,
            };
            entry.witness.as_ref() == Some(witness)
        }
        Witness::NotOrthogonal { first, second, .. } => !inner_product(&code.codewords[*first], &code.codewords[*second])?.is_zero(),
        Witness::UnequalSupport { first, second } => {
            code.codewords[*first].support_size() != code.codewords[*second].support_size()
        }
        Witness::SingletonBound { .. } => !code.satisfies_quantum_singleton(code.distance_claimed),
        Witness::DistanceMismatch { method, measured, claimed, operator } => match operator {
            Some(text) => {
                let op = PauliString::parse(code.field, text)?;
                let detected = match method {
                    DistanceMethod::Symplectic => Normalizer::new(code).detects_operator(&op),
                    _ => {
                        let mode = if code.k_logical == 0 { Mode::Pure } else { Mode::KnillLaflamme };
                        matches!(Codebook::new(code).evaluate_operator(&op, mode), Outcome::Fail { .. })
                    }
                };
                detected && op.weight() < *claimed
            }
            None => code_distance(code, *method, &mut Budget::new(budget))?.distance == *measured,
        },
    })
}
