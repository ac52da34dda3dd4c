//! JSON state files: `{"dims": [2,2,2], "kind": "pure"|"mixed", "data": [[re, im], ...]}`.
//! Mixed-state data is the row-major density matrix.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::linalg::{ComplexMatrix, C64};
use crate::states::{DensityMatrix, PureState, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub kind: StateKind,
    pub data: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(state: &QuantumState) -> Self {
        let (kind, data): (_, Vec<C64>) = match state {
            QuantumState::Pure(p) => (StateKind::Pure, p.amplitudes().to_vec()),
            QuantumState::Mixed(m) => (StateKind::Mixed, m.matrix().data().to_vec()),
        };
        Self { dims: state.dims().to_vec(), kind, data: data.iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn into_state(self) -> Result<QuantumState, HarnessError> {
        let entries: Vec<C64> = self.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        let invalid = |e: &dyn std::fmt::Display| HarnessError::InvalidState(e.to_string());
        match self.kind {
            StateKind::Pure => Ok(QuantumState::Pure(PureState::new(self.dims, entries).map_err(|e| invalid(&e))?)),
            StateKind::Mixed => {
                let dim: usize = self.dims.iter().product();
                let matrix = ComplexMatrix::new(dim, dim, entries).map_err(|e| invalid(&e))?;
                Ok(QuantumState::Mixed(DensityMatrix::new(self.dims, matrix).map_err(|e| invalid(&e))?))
            }
        }
    }
}

pub fn parse_state(text: &str) -> Result<QuantumState, HarnessError> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
    file.into_state()
}

pub fn read_state(path: &Path) -> Result<QuantumState, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    parse_state(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_generalized_schmidt, ginibre_mixed, SchmidtParams};

    #[test]
    fn round_trip_both_kinds() {
        let pure = QuantumState::Pure(build_generalized_schmidt(&SchmidtParams::worked_example()).unwrap());
        let mixed = QuantumState::Mixed(ginibre_mixed(4, 2, 9).unwrap());
        let text = serde_json::to_string(&StateFile::from_state(&pure)).unwrap();
        assert_eq!(parse_state(&text).unwrap(), pure);
        // density matrices are re-hermitized on ingestion, so compare numerically
        let text = serde_json::to_string(&StateFile::from_state(&mixed)).unwrap();
        let (QuantumState::Mixed(a), QuantumState::Mixed(b)) = (parse_state(&text).unwrap(), mixed) else {
            panic!("kind changed")
        };
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_state("{\n  \"dims\": [2],\n  \"kind\": \"pure\",\n  \"data\": [[1, 0], [0, 0]\n}").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, HarnessError::Parse(_)));
        assert!(msg.contains("line 5"), "{msg}");
    }

    #[test]
    fn field_errors_name_the_field() {
        let msg = parse_state(r#"{"dims": [2], "kind": "pure"}"#).unwrap_err().to_string();
        assert!(msg.contains("missing field `data`"), "{msg}");
        let msg = parse_state(r#"{"dims": [2], "kind": "qutrit", "data": []}"#).unwrap_err().to_string();
        assert!(msg.contains("unknown variant"), "{msg}");
    }

    #[test]
    fn norm_deficit_is_reported() {
        let err = parse_state(r#"{"dims": [2], "kind": "pure", "data": [[0.6, 0], [0.6, 0]]}"#).unwrap_err();
        assert!(matches!(err, HarnessError::InvalidState(_)));
        assert!(err.to_string().contains("deficit 2.800e-1"), "{err}");
    }

    #[test]
    fn mixed_states_are_validated() {
        let err = parse_state(r#"{"dims": [2], "kind": "mixed", "data": [[1,0],[0,0],[0,0],[1,0]]}"#).unwrap_err();
        assert!(matches!(err, HarnessError::InvalidState(_)));
    }
}
