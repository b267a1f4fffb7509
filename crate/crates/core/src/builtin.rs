//! Bundled reference layouts.
//!
//! Each layout is a versioned JSON file with atom roles, coordinates in µm,
//! and the edge list it is expected to produce. Edges are re-derived from
//! the coordinates at load time and must match that list.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::geometry::Layout;
use crate::graph::{Atom, AtomGraph, GraphError, RoleFile, WireFile};
use crate::qubo::QuboInstance;

pub const LAYOUT_DATASET: &str = "rydberg-qubo-layouts";
pub const LAYOUT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuiltinError {
    #[error("unknown built-in layout {0:?}")]
    Unknown(String),
    #[error("layout {name}: {msg}")]
    Corrupt { name: String, msg: String },
    #[error("layout {name}: {source}")]
    Graph {
        name: String,
        #[source]
        source: GraphError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BuiltinName {
    G1,
    G2,
    G3,
    G4,
    G5Prime,
    G6Prime,
    G7,
    Link,
    Not,
}

impl BuiltinName {
    pub const ALL: [BuiltinName; 9] = [
        BuiltinName::G1,
        BuiltinName::G2,
        BuiltinName::G3,
        BuiltinName::G4,
        BuiltinName::G5Prime,
        BuiltinName::G6Prime,
        BuiltinName::G7,
        BuiltinName::Link,
        BuiltinName::Not,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BuiltinName::G1 => "G1",
            BuiltinName::G2 => "G2",
            BuiltinName::G3 => "G3",
            BuiltinName::G4 => "G4",
            BuiltinName::G5Prime => "G5p",
            BuiltinName::G6Prime => "G6p",
            BuiltinName::G7 => "G7",
            BuiltinName::Link => "GLNK",
            BuiltinName::Not => "GNOT",
        }
    }

    /// Layouts that use AF-ordering atoms instead of direct terminal edges.
    pub fn has_af_chain(self) -> bool {
        matches!(self, BuiltinName::G5Prime | BuiltinName::G6Prime)
    }

    fn data(self) -> &'static str {
        match self {
            BuiltinName::G1 => include_str!("../data/layouts/G1.json"),
            BuiltinName::G2 => include_str!("../data/layouts/G2.json"),
            BuiltinName::G3 => include_str!("../data/layouts/G3.json"),
            BuiltinName::G4 => include_str!("../data/layouts/G4.json"),
            BuiltinName::G5Prime => include_str!("../data/layouts/G5p.json"),
            BuiltinName::G6Prime => include_str!("../data/layouts/G6p.json"),
            BuiltinName::G7 => include_str!("../data/layouts/G7.json"),
            BuiltinName::Link => include_str!("../data/layouts/GLNK.json"),
            BuiltinName::Not => include_str!("../data/layouts/GNOT.json"),
        }
    }
}

impl fmt::Display for BuiltinName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BuiltinName {
    type Err = BuiltinError;

    /// Accepts `G5p`, `G'5`, `G5'`, `G′5`, `G₅`, `G_LNK`, `LINK`, ... in any case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut key = String::new();
        let mut prime = false;
        for c in s.trim().chars() {
            match c {
                '\'' | '′' => prime = true,
                '_' | '-' | ' ' => {}
                '₀'..='₉' => key.push(char::from(b'0' + (c as u32 - '₀' as u32) as u8)),
                _ => key.extend(c.to_uppercase()),
            }
        }
        if let Some(stem) = key.strip_suffix('P') {
            if stem.len() == 2 {
                key = stem.to_string();
                prime = true;
            }
        }
        let name = match (key.as_str(), prime) {
            ("G1", false) => BuiltinName::G1,
            ("G2", false) => BuiltinName::G2,
            ("G3", false) => BuiltinName::G3,
            ("G4", false) => BuiltinName::G4,
            ("G5", true) => BuiltinName::G5Prime,
            ("G6", true) => BuiltinName::G6Prime,
            ("G7", false) => BuiltinName::G7,
            ("GLNK" | "LNK" | "LINK" | "GLINK", false) => BuiltinName::Link,
            ("GNOT" | "NOT", false) => BuiltinName::Not,
            _ => return Err(BuiltinError::Unknown(s.to_string())),
        };
        Ok(name)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutFile {
    dataset: String,
    version: u32,
    name: String,
    function: String,
    source: QuboInstance,
    blockade_radius_um: f64,
    atoms: Vec<LayoutAtom>,
    wires: Vec<WireFile>,
    expected_edges: Vec<[String; 2]>,
    #[serde(default)]
    #[allow(dead_code)]
    notes: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutAtom {
    label: String,
    role: RoleFile,
    x: f64,
    y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinLayout {
    pub name: BuiltinName,
    /// Human-readable form of the encoded function.
    pub function: String,
    pub graph: AtomGraph,
    pub layout: Layout,
    /// Radius the edges were derived at, in µm.
    pub radius: f64,
}

/// Loads a bundled layout, derives its unit-disk edges from the coordinates,
/// and checks them against the stored edge list.
pub fn load_builtin_layout(name: BuiltinName) -> Result<BuiltinLayout, BuiltinError> {
    let corrupt = |msg: String| BuiltinError::Corrupt {
        name: name.to_string(),
        msg,
    };
    let graph_err = |source: GraphError| BuiltinError::Graph {
        name: name.to_string(),
        source,
    };
    let file: LayoutFile = serde_json::from_str(name.data()).map_err(|e| corrupt(e.to_string()))?;
    if file.dataset != LAYOUT_DATASET || file.version != LAYOUT_VERSION {
        return Err(corrupt(format!(
            "unsupported dataset {} v{}",
            file.dataset, file.version
        )));
    }
    if file.name != name.as_str() {
        return Err(corrupt(format!("file is named {}", file.name)));
    }
    let mut atoms = Vec::with_capacity(file.atoms.len());
    let mut positions = Vec::with_capacity(file.atoms.len());
    for a in file.atoms {
        atoms.push(Atom {
            role: a.role.into_role().map_err(graph_err)?,
            label: a.label,
        });
        positions.push((a.x, a.y));
    }
    let layout = Layout::new(positions);
    let edges = layout.unit_disk_edges(file.blockade_radius_um);

    let index = |label: &str| {
        atoms
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| corrupt(format!("expected edge names unknown atom {label}")))
    };
    let mut expected = Vec::with_capacity(file.expected_edges.len());
    for [a, b] in &file.expected_edges {
        let (a, b) = (index(a)?, index(b)?);
        expected.push((a.min(b), a.max(b)));
    }
    expected.sort_unstable();
    if expected != edges {
        return Err(corrupt(format!(
            "coordinates give edges {edges:?}, file lists {expected:?}"
        )));
    }

    let wires = file
        .wires
        .into_iter()
        .map(WireFile::into_descriptor)
        .collect::<Result<Vec<_>, _>>()
        .map_err(graph_err)?;
    let graph = AtomGraph::from_parts(file.source.n(), atoms, edges, wires, Some(file.source))
        .map_err(graph_err)?;
    Ok(BuiltinLayout {
        name,
        function: file.function,
        graph,
        layout,
        radius: file.blockade_radius_um,
    })
}
