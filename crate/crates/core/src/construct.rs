//! Quantum code constructions from MDS generator matrices.
//!
//! * [`kuniform_code`]: the `[[n, 0, k+1]]_q` code of the minimal-support
//!   `k`-uniform state built from `G`.
//! * [`shorten`]: `r` rows and identity columns are removed from `G`, the
//!   removed rows become logical `X` operators and the matching parity-check
//!   rows become logical `Z` operators, giving `[[n-r, r, k-r+1]]_q`.
//! * [`modified_shorten`]: keeps all `n = q + 1` parties of an AME state and
//!   spans a `q`-dimensional code with powers of a single operator
//!   `M~ = M_X M_Z`, giving `[[n, 1, floor(n/2)]]_q`.

use serde::{Deserialize, Serialize};

use crate::codes::{
    is_mds, lex_vectors, mds_generator, parity_check, shorten_generator, shortened_columns, singleton_array,
    GeneratorMatrix,
};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, MatrixGF, PrimeField};
use crate::pauli::PauliString;
use crate::states::{state_from_generator, CodeState};

/// Which pipeline produced a code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Construction {
    Ame,
    Shorten {
        r: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncate_x: Option<usize>,
    },
    ModShorten,
}

/// Seed data a code was derived from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: Construction,
    pub q: u32,
    pub gamma: u32,
    pub seed_n: usize,
    pub seed_k: usize,
    pub seed_generator: Vec<Vec<u32>>,
}

/// A stabilizer code together with an explicit codeword basis.
///
/// Codewords are indexed by logical strings `m = (m_1, ..., m_k)` in
/// lexicographic order with `m_1` outermost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumCode {
    pub field: PrimeField,
    pub n: usize,
    pub k_logical: usize,
    pub distance_claimed: usize,
    pub codewords: Vec<CodeState>,
    pub logical_x: Vec<PauliString>,
    pub logical_z: Vec<PauliString>,
    pub stabilizers: Vec<PauliString>,
    pub provenance: Provenance,
}

impl QuantumCode {
    pub fn q(&self) -> u32 {
        self.field.modulus()
    }

    /// Number of correctable errors, `floor((d - 1) / 2)`.
    pub fn correctable_errors(&self) -> usize {
        self.distance_claimed.saturating_sub(1) / 2
    }

    /// `d <= (n - k) / 2 + 1`.
    pub fn satisfies_quantum_singleton(&self, d: usize) -> bool {
        2 * d <= self.n - self.k_logical + 2
    }

    /// `[[n,k,d]]_q` label.
    pub fn label(&self) -> String {
        format!("[[{},{},{}]]_{}", self.n, self.k_logical, self.distance_claimed, self.q())
    }

    /// Logical string of the codeword at `index`.
    pub fn logical_string(&self, index: usize) -> Vec<u32> {
        let q = self.q() as usize;
        let mut m = vec![0u32; self.k_logical];
        let mut rest = index;
        for slot in m.iter_mut().rev() {
            *slot = (rest % q) as u32;
            rest /= q;
        }
        m
    }

    /// Index of the codeword with logical string `m`.
    pub fn codeword_index(&self, m: &[u32]) -> usize {
        let q = self.q() as usize;
        m.iter().fold(0, |acc, &d| acc * q + (d as usize % q))
    }
}

fn provenance(g: &GeneratorMatrix, construction: Construction) -> Provenance {
    Provenance {
        construction,
        q: g.field().modulus(),
        gamma: g.field().gamma().value(),
        seed_n: g.n(),
        seed_k: g.k(),
        seed_generator: g.to_rows(),
    }
}

/// X stabilizers from the rows of `G`, Z stabilizers from the rows of `H`.
fn css_generators(g: &GeneratorMatrix) -> Vec<PauliString> {
    let f = g.field();
    let h = parity_check(g);
    (0..g.k())
        .map(|i| PauliString::x_type(f, g.matrix().row(i)))
        .chain((0..h.rows()).map(|i| PauliString::z_type(f, h.row(i))))
        .collect()
}

/// The `[[n, 0, k+1]]_q` code whose single codeword is the `k`-uniform state of `G`.
pub fn kuniform_code(g: &GeneratorMatrix, budget: u64) -> Result<QuantumCode> {
    if !is_mds(g) {
        return Err(Error::NotMds);
    }
    Ok(QuantumCode {
        field: g.field(),
        n: g.n(),
        k_logical: 0,
        distance_claimed: g.k() + 1,
        codewords: vec![state_from_generator(g, budget)?],
        logical_x: Vec::new(),
        logical_z: Vec::new(),
        stabilizers: css_generators(g),
        provenance: provenance(g, Construction::Ame),
    })
}

/// Logical X operators `M_1 .. M_r`: the removed rows of `G` restricted to
/// the kept columns (identity on the first `k - r` sites).
fn removed_rows_as_x(g: &GeneratorMatrix, r: usize) -> Vec<PauliString> {
    let (k, n) = (g.k(), g.n());
    let cols = shortened_columns(k, n, r);
    (k - r..k)
        .map(|row| {
            let exps: Vec<FieldElement> = cols.iter().map(|&c| g.matrix().get(row, c)).collect();
            PauliString::x_type(g.field(), &exps)
        })
        .collect()
}

/// Stabilizer generators of the span of `prod M_i^{m_i} |psi_0>`, where
/// `|psi_0>` is the state of `shortened`. The X part is the rows of the
/// shortened generator; the Z part is every `v H~` with `m_{X,i} . (v H~) = 0`
/// for all `i`, solved as a null space.
fn shortened_stabilizers(shortened: &GeneratorMatrix, logical_x: &[PauliString]) -> Vec<PauliString> {
    let f = shortened.field();
    let h = parity_check(shortened);
    let mut constraints = MatrixGF::zeros(f, logical_x.len(), h.rows());
    for (i, m) in logical_x.iter().enumerate() {
        for l in 0..h.rows() {
            constraints.set(i, l, f.dot(m.x_exponents(), h.row(l)));
        }
    }
    let x_part = (0..shortened.k()).map(|i| PauliString::x_type(f, shortened.matrix().row(i)));
    let z_part = constraints.null_space().into_iter().map(|v| {
        let exps = h.left_mul_vec(&v).expect("null space vectors have h.rows() entries");
        PauliString::z_type(f, &exps)
    });
    x_part.chain(z_part).collect()
}

/// Stabilizer generators of the `r`-step shortened code: `k - r` X-type and
/// `n - k - r` Z-type, `n - 2r` in total.
pub fn code_stabilizers(g: &GeneratorMatrix, r: usize) -> Result<Vec<PauliString>> {
    if !is_mds(g) {
        return Err(Error::NotMds);
    }
    let shortened = shorten_generator(g, r)?;
    Ok(shortened_stabilizers(&shortened, &removed_rows_as_x(g, r)))
}

/// Options for [`shorten_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ShortenOptions {
    /// Keep only the first `c` X operators of the single logical `M`
    /// (one-step shortening only).
    pub truncate_x: Option<usize>,
}

/// `r`-step shortening of an MDS generator: `[[n-r, r, k-r+1]]_q`.
pub fn shorten(g: &GeneratorMatrix, r: usize, budget: u64) -> Result<QuantumCode> {
    shorten_with(g, r, ShortenOptions::default(), budget)
}

pub fn shorten_with(g: &GeneratorMatrix, r: usize, options: ShortenOptions, budget: u64) -> Result<QuantumCode> {
    if !is_mds(g) {
        return Err(Error::NotMds);
    }
    let f = g.field();
    let (k, n) = (g.k(), g.n());
    let shortened = shorten_generator(g, r)?;
    let mut logical_x = removed_rows_as_x(g, r);
    if let Some(c) = options.truncate_x {
        if r != 1 || c < 1 || c > n - k {
            return Err(Error::OutOfRange(format!("truncate_x={c} needs r=1 and 1 <= c <= n-k={}", n - k)));
        }
        let mut x = logical_x[0].x_exponents().to_vec();
        for e in x.iter_mut().skip(k - 1 + c) {
            *e = FieldElement::ZERO;
        }
        logical_x[0] = PauliString::x_type(f, &x);
    }

    let h_short = parity_check(&shortened);
    let logical_z: Vec<PauliString> = if options.truncate_x.is_none() {
        // rows n-k-r+1 .. n-k of H with the removed columns dropped, which are
        // the last r rows of the shortened parity check
        (h_short.rows() - r..h_short.rows()).map(|l| PauliString::z_type(f, h_short.row(l))).collect()
    } else {
        let m = &logical_x[0];
        let row = (0..h_short.rows())
            .rev()
            .find(|&l| !f.dot(m.x_exponents(), h_short.row(l)).is_zero())
            .expect("a nonzero X string pairs with some parity-check row");
        vec![PauliString::z_type(f, h_short.row(row))]
    };

    let stabilizers = shortened_stabilizers(&shortened, &logical_x);
    let base = state_from_generator(&shortened, budget)?;
    let codewords = span_codewords(&base, &logical_x, budget)?;

    Ok(QuantumCode {
        field: f,
        n: n - r,
        k_logical: r,
        distance_claimed: k - r + 1,
        codewords,
        logical_x,
        logical_z,
        stabilizers,
        provenance: provenance(g, Construction::Shorten { r, truncate_x: options.truncate_x }),
    })
}

/// `prod_i L_i^{m_i} |base>` for every logical string `m` in lexicographic order.
fn span_codewords(base: &CodeState, logicals: &[PauliString], budget: u64) -> Result<Vec<CodeState>> {
    let f = base.field();
    let total = crate::codes::checked_power(f.modulus(), logicals.len())
        .zip(Some(base.support_size() as u128))
        .and_then(|(a, b)| a.checked_mul(b));
    crate::codes::check_budget(total, budget)?;
    lex_vectors(f, logicals.len())
        .map(|m| {
            let op = logicals
                .iter()
                .zip(&m)
                .try_fold(PauliString::identity(f, base.n()), |acc, (l, &e)| acc.multiply(&l.pow(e.value() as u64)))?;
            op.apply(base)
        })
        .collect()
}

/// The two factors of `M~ = M_X M_Z` for `n = q + 1`: `M_X` carries the X
/// exponents from row `floor((q+1)/2) + 1` of the Singleton array on sites
/// `floor(n/2) .. n-2`, `M_Z` is a single Z on the last site.
pub fn mtilde_parts(field: PrimeField) -> (PauliString, PauliString) {
    let q = field.modulus() as usize;
    let n = q + 1;
    let row = singleton_array(field).row(q.div_ceil(2) + 1);
    let mut x = vec![FieldElement::ZERO; n];
    x[n / 2..n - 1].copy_from_slice(&row);
    let mut z = vec![FieldElement::ZERO; n];
    z[n - 1] = FieldElement::ONE;
    (PauliString::x_type(field, &x), PauliString::z_type(field, &z))
}

/// `M~ = 1^{floor(n/2)} ⊗ X ⊗ X^{a_{ceil(q/2)}} ⊗ ... ⊗ X^{a_{q-2}} ⊗ Z` on `n = q + 1` sites.
pub fn mtilde(field: PrimeField) -> PauliString {
    let (mx, mz) = mtilde_parts(field);
    mx.multiply(&mz).expect("same shape")
}

/// Modified shortening of the AME state on `n = q + 1` parties.
///
/// Stabilizers are a basis of the subgroup of the seed stabilizer group that
/// commutes with `M~`, found by solving one linear condition on the seed
/// generator exponents. The logical Z is the first seed generator that does
/// not commute with `M~`.
pub fn modified_shorten(field: PrimeField, budget: u64) -> Result<QuantumCode> {
    let q = field.modulus() as usize;
    let n = q + 1;
    let g = mds_generator(field, n / 2, n)?;
    let mt = mtilde(field);
    let seed = css_generators(&g);

    let mut functional = MatrixGF::zeros(field, 1, seed.len());
    for (j, s) in seed.iter().enumerate() {
        functional.set(0, j, s.symplectic(&mt)?);
    }
    let stabilizers = functional
        .null_space()
        .into_iter()
        .map(|v| combine(field, &seed, &v))
        .collect::<Result<Vec<_>>>()?;
    let logical_z = seed
        .iter()
        .zip(0..)
        .find(|(_, j)| !functional.get(0, *j).is_zero())
        .map(|(s, _)| s.clone())
        .expect("M~ anticommutes with some seed generator");

    let phi0 = state_from_generator(&g, budget)?;
    let codewords = span_codewords(&phi0, std::slice::from_ref(&mt), budget)?;

    Ok(QuantumCode {
        field,
        n,
        k_logical: 1,
        distance_claimed: n / 2,
        codewords,
        logical_x: vec![mt],
        logical_z: vec![logical_z],
        stabilizers,
        provenance: provenance(&g, Construction::ModShorten),
    })
}

/// Phase-free `X^{sum v_j x_j} Z^{sum v_j z_j}` for generators `gens`.
fn combine(field: PrimeField, gens: &[PauliString], coeffs: &[FieldElement]) -> Result<PauliString> {
    let n = gens[0].n();
    let mut x = vec![FieldElement::ZERO; n];
    let mut z = vec![FieldElement::ZERO; n];
    for (gen, &c) in gens.iter().zip(coeffs) {
        for i in 0..n {
            x[i] = field.add(x[i], field.mul(c, gen.x_exponents()[i]));
            z[i] = field.add(z[i], field.mul(c, gen.z_exponents()[i]));
        }
    }
    PauliString::new(field, x, z, FieldElement::ZERO)
}
