//! The `cpoly/1` JSON file format.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::cpolyhedron::{CPolyhedron, PolyhedronError, Triangulation, TriangulationError};
use crate::lorentz::LVec4;

pub const FORMAT_TAG: &str = "cpoly/1";

/// Deviation of `⟨v,v⟩` from 1 that is repaired without comment.
pub const SILENT_RENORMALIZATION: f64 = 1e-8;
/// Deviation beyond which a disk vector is rejected.
pub const MAX_RENORMALIZATION: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("vertex {id}: disk vector is not unit de Sitter (⟨v,v⟩ = {norm_sq})")]
    Normalization { id: i64, norm_sq: f64 },
    #[error("invalid triangulation: {0}")]
    Triangulation(#[from] TriangulationError),
    #[error(transparent)]
    Polyhedron(PolyhedronError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: i64,
    pub disk: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyhedronFile {
    pub format: String,
    pub vertices: Vec<VertexRecord>,
    pub faces: Vec<[i64; 3]>,
    #[serde(default = "empty_object")]
    pub metadata: Value,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

#[derive(Clone, Debug)]
pub struct LoadedPolyhedron {
    pub polyhedron: CPolyhedron,
    /// File ids, indexed by internal vertex number.
    pub ids: Vec<i64>,
    pub metadata: Value,
    pub warnings: Vec<String>,
}

impl PolyhedronFile {
    pub fn from_polyhedron(p: &CPolyhedron, metadata: Value) -> Self {
        Self {
            format: FORMAT_TAG.to_string(),
            vertices: p
                .vectors()
                .into_iter()
                .enumerate()
                .map(|(i, v)| VertexRecord { id: i as i64, disk: v.to_array() })
                .collect(),
            faces: p
                .triangulation()
                .faces()
                .iter()
                .map(|f| f.map(|i| i as i64))
                .collect(),
            metadata,
        }
    }

    pub fn into_polyhedron(self) -> Result<LoadedPolyhedron, FormatError> {
        if self.format != FORMAT_TAG {
            return Err(FormatError::Schema(format!("unsupported format {:?}", self.format)));
        }
        // Internal numbering follows sorted ids.
        let mut ids: Vec<i64> = self.vertices.iter().map(|v| v.id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(FormatError::Schema(format!("duplicate vertex id {}", w[0])));
        }
        let index: BTreeMap<i64, usize> = ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();

        let mut warnings = Vec::new();
        let mut vectors = vec![LVec4::default(); ids.len()];
        for rec in &self.vertices {
            let v = LVec4::from_array(rec.disk);
            if !v.is_finite() {
                return Err(FormatError::Schema(format!("vertex {}: non-finite disk entry", rec.id)));
            }
            let q = v.norm_sq();
            let dev = (q - 1.0).abs();
            if !(dev <= MAX_RENORMALIZATION) {
                return Err(FormatError::Normalization { id: rec.id, norm_sq: q });
            }
            let fixed = if dev <= 1e-12 { v } else { v / q.sqrt() };
            if dev > SILENT_RENORMALIZATION {
                warnings.push(format!("vertex {}: renormalized disk (⟨v,v⟩ = {q})", rec.id));
            }
            vectors[index[&rec.id]] = fixed;
        }

        let mut faces = Vec::with_capacity(self.faces.len());
        for f in &self.faces {
            let mut g = [0usize; 3];
            for (slot, id) in g.iter_mut().zip(f) {
                *slot = *index
                    .get(id)
                    .ok_or_else(|| FormatError::Schema(format!("face refers to unknown vertex {id}")))?;
            }
            faces.push(g);
        }
        let tri = Triangulation::new(ids.len(), faces)?;
        let polyhedron = CPolyhedron::new(tri, vectors).map_err(|e| match e {
            PolyhedronError::Triangulation(t) => FormatError::Triangulation(t),
            other => FormatError::Polyhedron(other),
        })?;
        Ok(LoadedPolyhedron { polyhedron, ids, metadata: self.metadata, warnings })
    }
}

pub fn from_str(text: &str) -> Result<LoadedPolyhedron, FormatError> {
    let value: Value = serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?;
    let file: PolyhedronFile =
        serde_json::from_value(value).map_err(|e| FormatError::Schema(e.to_string()))?;
    file.into_polyhedron()
}

/// Pretty-printed JSON with a trailing newline. Floats are written in the
/// shortest form that parses back to the same bits.
pub fn to_string(p: &CPolyhedron, metadata: Value) -> String {
    let mut s = serde_json::to_string_pretty(&PolyhedronFile::from_polyhedron(p, metadata))
        .expect("plain data serializes");
    s.push('\n');
    s
}

pub fn load(path: impl AsRef<Path>) -> Result<LoadedPolyhedron, FormatError> {
    from_str(&std::fs::read_to_string(path)?)
}

pub fn save(p: &CPolyhedron, metadata: Value, path: impl AsRef<Path>) -> Result<(), FormatError> {
    std::fs::write(path, to_string(p, metadata))?;
    Ok(())
}
