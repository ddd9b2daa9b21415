//! JSON documents for transfer systems, saturated covers and realization
//! certificates.
//!
//! Transfer systems: `{"m":1,"n":1,"relations":[[[0,0],[1,1]],...]}` with
//! reflexive pairs omitted on write, re-added on read, and pairs sorted.
//! Covers: `{"m":..,"n":..,"horizontal":[[i,j],..],"vertical":[[i,j],..]}`
//! listing the source point of each member edge.

use serde::{Deserialize, Serialize};

use crate::cover::SaturatedCover;
use crate::error::{Error, Result};
use crate::grid::{GridEdge, GridPoint, GridShape};
use crate::modular::{GroupSpec, IndexSet, RealizationCertificate};
use crate::transfer::{Relation, TransferSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub m: usize,
    pub n: usize,
    pub relations: Vec<(GridPoint, GridPoint)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDoc {
    pub m: usize,
    pub n: usize,
    pub horizontal: Vec<GridPoint>,
    pub vertical: Vec<GridPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub p: u64,
    pub q: u64,
    pub n: usize,
    pub target: SystemDoc,
    pub index_set: Vec<u64>,
    pub witness: u64,
    pub verified: bool,
}

/// Either kind of input accepted by `verify`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Document {
    System(SystemDoc),
    Cover(CoverDoc),
}

impl SystemDoc {
    pub fn from_system(t: &TransferSystem) -> Self {
        Self::from_relation(t.relation())
    }

    pub fn from_relation(r: &Relation<GridShape>) -> Self {
        let shape = r.shape();
        let mut relations: Vec<(GridPoint, GridPoint)> = r.strict_pairs().collect();
        relations.sort();
        Self { m: shape.m, n: shape.n, relations }
    }

    pub fn shape(&self) -> GridShape {
        GridShape::new(self.m, self.n)
    }

    /// The relation with reflexive pairs added; not checked against the axioms.
    pub fn to_relation(&self) -> Result<Relation<GridShape>> {
        let mut r = Relation::reflexive(self.shape());
        for &(a, b) in &self.relations {
            r.insert(a, b)?;
        }
        Ok(r)
    }

    pub fn to_system(&self) -> Result<TransferSystem> {
        TransferSystem::try_from_relation(self.to_relation()?)
    }
}

impl CoverDoc {
    pub fn from_cover(s: &SaturatedCover) -> Self {
        let shape = s.shape();
        Self {
            m: shape.m,
            n: shape.n,
            horizontal: s.horizontal_edges().iter().map(|e| e.source).collect(),
            vertical: s.vertical_edges().iter().map(|e| e.source).collect(),
        }
    }

    pub fn shape(&self) -> GridShape {
        GridShape::new(self.m, self.n)
    }

    /// Member edges, each checked to lie in the grid.
    pub fn edges(&self) -> Result<Vec<GridEdge>> {
        let shape = self.shape();
        let mut out = Vec::with_capacity(self.horizontal.len() + self.vertical.len());
        for &s in &self.horizontal {
            let e = GridEdge::horizontal(s);
            shape.check(e.target)?;
            out.push(e);
        }
        for &s in &self.vertical {
            let e = GridEdge::vertical(s);
            shape.check(e.target)?;
            out.push(e);
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn to_cover(&self) -> Result<SaturatedCover> {
        SaturatedCover::from_edges(self.shape(), &self.edges()?)
    }
}

impl CertificateDoc {
    pub fn from_certificate(c: &RealizationCertificate) -> Self {
        Self {
            p: c.spec.p,
            q: c.spec.q,
            n: c.spec.n,
            target: SystemDoc::from_system(&c.target),
            index_set: c.index_set.members().to_vec(),
            witness: c.witness_multiple,
            verified: true,
        }
    }

    /// Rebuilds the certificate and re-runs its verification.
    pub fn to_certificate(&self) -> Result<RealizationCertificate> {
        let spec = GroupSpec::new(self.p, self.q, self.n)?;
        let cert = RealizationCertificate {
            spec,
            target: self.target.to_system()?,
            index_set: IndexSet::new(spec.modulus(), self.index_set.iter().copied())?,
            witness_multiple: self.witness,
        };
        cert.verify()?;
        Ok(cert)
    }
}

pub fn parse_document(text: &str) -> Result<Document> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn system_to_json(t: &TransferSystem) -> String {
    serde_json::to_string(&SystemDoc::from_system(t)).expect("serializable")
}

pub fn cover_to_json(s: &SaturatedCover) -> String {
    serde_json::to_string(&CoverDoc::from_cover(s)).expect("serializable")
}

pub fn certificate_to_json(c: &RealizationCertificate) -> String {
    serde_json::to_string(&CertificateDoc::from_certificate(c)).expect("serializable")
}
