//! Certificates for the algebra defined by a family. The structural
//! conclusions are not recomputed; they are attached, with citations, when
//! the premises that are computed here (closure, a quadratic Gröbner basis
//! with squarefree leads) hold.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Execution;
use crate::family::{LeveledFamily, Mode};
use crate::presentation::{Basis, DEFAULT_STEP_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Koszul,
    NormalDomain,
    CohenMacaulay,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::Koszul => "koszul",
            Conclusion::NormalDomain => "normal_domain",
            Conclusion::CohenMacaulay => "cohen_macaulay",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub mode: Mode,
    pub variables: usize,
    pub generators: usize,
    pub closed: bool,
    pub basis_size: Option<usize>,
    pub quadratic: Option<bool>,
    pub squarefree_leads: Option<bool>,
    pub confluent: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub conclusions: Vec<Conclusion>,
    pub citations: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn has_conclusions(&self) -> bool {
        !self.conclusions.is_empty()
    }
}

const CITE_BASIS: &str =
    "a family closed under comparability yields a squarefree quadratic Gröbner basis of the presentation ideal";
const CITE_KOSZUL: &str = "Fröberg: an algebra defined by a quadratic Gröbner basis is Koszul";
const CITE_NORMAL: &str =
    "Sturmfels: a toric ring whose toric ideal has a squarefree initial ideal is normal";
const CITE_CM: &str = "Hochster: normal affine semigroup rings are Cohen-Macaulay";
const NOTE_FIBER: &str = "fiber mode: the conclusions apply to the semigroup ring generated by u_ij * x_(n+i)^(m-d_i), which covers the special fiber ring";

pub fn certify(fam: &LeveledFamily) -> Result<Certificate> {
    certify_with(fam, Execution::default())
}

pub fn certify_with(fam: &LeveledFamily, exec: Execution) -> Result<Certificate> {
    let closed = fam.is_closed();
    let mut cert = Certificate {
        mode: fam.mode(),
        variables: fam.variables(),
        generators: fam.len(),
        closed,
        basis_size: None,
        quadratic: None,
        squarefree_leads: None,
        confluent: None,
        conclusions: Vec::new(),
        citations: Vec::new(),
        notes: Vec::new(),
    };
    if !closed {
        return Ok(cert);
    }
    let basis = Basis::build(fam)?;
    let confluent = basis.confluence_check(exec, DEFAULT_STEP_CAP)?.passed;
    cert.basis_size = Some(basis.len());
    cert.quadratic = Some(basis.is_quadratic());
    cert.squarefree_leads = Some(basis.has_squarefree_leads());
    cert.confluent = Some(confluent);
    if basis.is_quadratic() && basis.has_squarefree_leads() && confluent {
        cert.conclusions = vec![
            Conclusion::Koszul,
            Conclusion::NormalDomain,
            Conclusion::CohenMacaulay,
        ];
        cert.citations = [CITE_BASIS, CITE_KOSZUL, CITE_NORMAL, CITE_CM]
            .iter()
            .map(|s| s.to_string())
            .collect();
        if fam.mode() == Mode::Fiber {
            cert.notes.push(NOTE_FIBER.to_string());
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn example_is_certified() {
        let cert = certify(&fixtures::example_family()).unwrap();
        assert!(cert.closed);
        assert_eq!(cert.quadratic, Some(true));
        assert_eq!(cert.squarefree_leads, Some(true));
        assert_eq!(cert.conclusions.len(), 3);
        assert_eq!(cert.citations.len(), 4);
        assert!(cert.notes.is_empty());
    }

    #[test]
    fn open_family_gets_no_conclusions() {
        let (fam, _) = fixtures::example_spec_without(1, "x2*x3").build().unwrap();
        let cert = certify(&fam).unwrap();
        assert!(!cert.closed);
        assert!(cert.conclusions.is_empty());
        assert!(cert.basis_size.is_none());
        let json = serde_json::to_value(&cert).unwrap();
        assert!(json.get("conclusions").is_none());
    }

    #[test]
    fn fiber_certificate_carries_note() {
        let cert = certify(&fixtures::fiber_counterexample()).unwrap();
        assert!(cert.has_conclusions());
        assert_eq!(cert.notes.len(), 1);
    }

    #[test]
    fn json_round_trip() {
        let cert = certify(&fixtures::maximal_ideal_powers(3, 3)).unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
    }
}
