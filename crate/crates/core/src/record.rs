//! JSON code records: parameters, provenance, operators in text form,
//! codewords, and optionally the verification transcript.

use serde::{Deserialize, Serialize};

use crate::construct::{Provenance, QuantumCode};
use crate::error::{Error, Result};
use crate::gf::PrimeField;
use crate::pauli::PauliString;
use crate::states::{CodeState, StateRecord};
use crate::verify::VerificationReport;

pub const FORMAT: &str = "qecc-forge/code/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub q: u32,
    pub gamma: u32,
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeRecord {
    pub format: String,
    pub label: String,
    pub parameters: Parameters,
    pub provenance: Provenance,
    pub stabilizers: Vec<String>,
    pub logical_x: Vec<String>,
    pub logical_z: Vec<String>,
    pub codewords: Vec<StateRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
}

fn texts(ops: &[PauliString]) -> Vec<String> {
    ops.iter().map(|p| p.to_string()).collect()
}

impl CodeRecord {
    pub fn new(code: &QuantumCode, verification: Option<VerificationReport>) -> CodeRecord {
        CodeRecord {
            format: FORMAT.to_string(),
            label: code.label(),
            parameters: Parameters {
                q: code.q(),
                gamma: code.field.gamma().value(),
                n: code.n,
                k: code.k_logical,
                d: code.distance_claimed,
            },
            provenance: code.provenance.clone(),
            stabilizers: texts(&code.stabilizers),
            logical_x: texts(&code.logical_x),
            logical_z: texts(&code.logical_z),
            codewords: code.codewords.iter().map(CodeState::to_record).collect(),
            verification,
        }
    }

    /// Rebuilds the code. Operator and state shapes are checked here; the
    /// algebra is left to the verifier.
    pub fn to_code(&self) -> Result<QuantumCode> {
        if self.format != FORMAT {
            return Err(Error::Parse(format!("unknown record format '{}'", self.format)));
        }
        let p = &self.parameters;
        let field = PrimeField::new(p.q as u64, Some(p.gamma as u64))?;
        let parse = |ops: &[String]| -> Result<Vec<PauliString>> {
            ops.iter()
                .map(|t| {
                    let op = PauliString::parse(field, t)?;
                    if op.n() != p.n {
                        return Err(Error::DimensionMismatch { expected: p.n, found: op.n() });
                    }
                    Ok(op)
                })
                .collect()
        };
        let codewords = self
            .codewords
            .iter()
            .map(|r| {
                if r.n != p.n {
                    return Err(Error::DimensionMismatch { expected: p.n, found: r.n });
                }
                CodeState::from_record(field, r)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QuantumCode {
            field,
            n: p.n,
            k_logical: p.k,
            distance_claimed: p.d,
            codewords,
            logical_x: parse(&self.logical_x)?,
            logical_z: parse(&self.logical_z)?,
            stabilizers: parse(&self.stabilizers)?,
            provenance: self.provenance.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<CodeRecord> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{mds_generator, DEFAULT_BUDGET};
    use crate::construct::{modified_shorten, shorten};
    use crate::verify::{verify_code, VerifyOptions};

    #[test]
    fn roundtrip_preserves_code_and_report() {
        let f = PrimeField::new(3, None).unwrap();
        let code = shorten(&mds_generator(f, 2, 4).unwrap(), 1, DEFAULT_BUDGET).unwrap();
        let report = verify_code(&code, &VerifyOptions::default()).unwrap();
        let rec = CodeRecord::new(&code, Some(report));
        let json = rec.to_json();
        let back = CodeRecord::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert_eq!(back.to_code().unwrap(), code);
        assert_eq!(rec.label, "[[3,1,2]]_3");
        assert!(json.contains("\"name\": \"shorten\""));
    }

    #[test]
    fn roundtrip_keeps_gamma() {
        let f = PrimeField::new(5, Some(3)).unwrap();
        let code = modified_shorten(f, DEFAULT_BUDGET).unwrap();
        let back = CodeRecord::from_json(&CodeRecord::new(&code, None).to_json()).unwrap().to_code().unwrap();
        assert_eq!(back.field.gamma().value(), 3);
        assert_eq!(back, code);
    }

    #[test]
    fn malformed_records_are_rejected() {
        let f = PrimeField::new(3, None).unwrap();
        let code = shorten(&mds_generator(f, 2, 4).unwrap(), 1, DEFAULT_BUDGET).unwrap();
        let mut rec = CodeRecord::new(&code, None);
        rec.stabilizers[0] = "X1⊗I".into();
        assert!(matches!(rec.to_code(), Err(Error::DimensionMismatch { .. })));
        let mut rec = CodeRecord::new(&code, None);
        rec.format = "other".into();
        assert!(rec.to_code().is_err());
        assert!(CodeRecord::from_json("{").is_err());
    }
}
