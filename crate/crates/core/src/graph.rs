//! Atom graphs: vertices are atoms with gadget roles, edges are blockaded
//! pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubo::QuboInstance;

/// Dense atom index, `0..graph.num_atoms()`. Also the bit position of the
/// atom in every bitstring this crate produces.
pub type AtomId = usize;

pub const GRAPH_FORMAT: &str = "rydberg-atom-graph/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) references a missing atom")]
    MissingAtom(AtomId, AtomId),
    #[error("self-loop on atom {0}")]
    SelfLoop(AtomId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(AtomId, AtomId),
    #[error("atom {atom} refers to variable x{var} but the graph has {num_vars} variables")]
    UnknownVariable {
        atom: AtomId,
        var: usize,
        num_vars: usize,
    },
    #[error("atom {atom} refers to undeclared wire {wire}")]
    UnknownWire { atom: AtomId, wire: usize },
    #[error("variable x{0} has no data copy")]
    NoDataCopy(usize),
    #[error("inconsistent graph data: {0}")]
    Inconsistent(String),
    #[error("malformed atom-graph JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// What an atom does inside its gadget. Variables are 0-based; copy, offset,
/// and chain indices are 1-based labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomRole {
    DataCopy {
        var: usize,
        copy: usize,
    },
    Offset {
        var: usize,
        offset: usize,
    },
    Wire {
        wire: usize,
        position: usize,
    },
    /// Member of an antiferromagnetic-ordering chain. Measurements are only
    /// meaningful when consecutive chain members disagree.
    AfConstraint {
        chain: usize,
        position: usize,
    },
}

impl AtomRole {
    pub fn variable(&self) -> Option<usize> {
        match *self {
            AtomRole::DataCopy { var, .. } | AtomRole::Offset { var, .. } => Some(var),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireDescriptor {
    pub id: usize,
    /// 0-based variables `(i, j)`; chain position 1 sits next to `i`.
    pub endpoints: (usize, usize),
    pub parity: Parity,
    pub length: usize,
}

impl WireDescriptor {
    /// `M` in the `2M` / `2M + 1` length convention.
    pub fn half_length(&self) -> usize {
        self.length / 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub role: AtomRole,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomGraph {
    num_vars: usize,
    atoms: Vec<Atom>,
    edges: BTreeSet<(AtomId, AtomId)>,
    adjacency: Vec<Vec<AtomId>>,
    wires: Vec<WireDescriptor>,
    var_copies: Vec<Vec<AtomId>>,
    source: Option<QuboInstance>,
}

impl AtomGraph {
    /// Assembles a graph, checking referential integrity only.
    ///
    /// Gadget-level structure (wire chains, offset attachment, copy
    /// independence) is reported separately by
    /// [`structural_violations`](Self::structural_violations) so that
    /// deliberately broken graphs can still be loaded and certified.
    pub fn from_parts(
        num_vars: usize,
        atoms: Vec<Atom>,
        edges: impl IntoIterator<Item = (AtomId, AtomId)>,
        wires: Vec<WireDescriptor>,
        source: Option<QuboInstance>,
    ) -> Result<Self, GraphError> {
        let n = atoms.len();
        let mut edge_set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::MissingAtom(a, b));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if !edge_set.insert((a.min(b), a.max(b))) {
                return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
            }
        }
        let wire_ids: BTreeSet<usize> = wires.iter().map(|w| w.id).collect();
        if wire_ids.len() != wires.len() {
            return Err(GraphError::Inconsistent("duplicate wire id".into()));
        }
        for w in &wires {
            if w.endpoints.0 >= num_vars || w.endpoints.1 >= num_vars {
                return Err(GraphError::Inconsistent(format!(
                    "wire {} connects an unknown variable",
                    w.id
                )));
            }
        }
        let mut var_copies = vec![Vec::new(); num_vars];
        for (id, atom) in atoms.iter().enumerate() {
            if let Some(var) = atom.role.variable() {
                if var >= num_vars {
                    return Err(GraphError::UnknownVariable {
                        atom: id,
                        var: var + 1,
                        num_vars,
                    });
                }
            }
            match atom.role {
                AtomRole::DataCopy { var, .. } => var_copies[var].push(id),
                AtomRole::Wire { wire, .. } if !wire_ids.contains(&wire) => {
                    return Err(GraphError::UnknownWire { atom: id, wire });
                }
                _ => {}
            }
        }
        if let Some(var) = var_copies.iter().position(Vec::is_empty) {
            return Err(GraphError::NoDataCopy(var + 1));
        }
        if let Some(q) = &source {
            if q.n() != num_vars {
                return Err(GraphError::Inconsistent(format!(
                    "source instance has {} variables, graph has {num_vars}",
                    q.n()
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edge_set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(AtomGraph {
            num_vars,
            atoms,
            edges: edge_set,
            adjacency,
            wires,
            var_copies,
            source,
        })
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, id: AtomId) -> &Atom {
        &self.atoms[id]
    }

    pub fn role(&self, id: AtomId) -> AtomRole {
        self.atoms[id].role
    }

    pub fn label(&self, id: AtomId) -> &str {
        &self.atoms[id].label
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().map(|a| a.label.as_str())
    }

    /// Edges as `(a, b)` with `a < b`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (AtomId, AtomId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: AtomId, b: AtomId) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, id: AtomId) -> &[AtomId] {
        &self.adjacency[id]
    }

    pub fn wires(&self) -> &[WireDescriptor] {
        &self.wires
    }

    /// Data-copy atoms of 0-based variable `var`.
    pub fn var_copies(&self, var: usize) -> &[AtomId] {
        &self.var_copies[var]
    }

    pub fn source(&self) -> Option<&QuboInstance> {
        self.source.as_ref()
    }

    pub fn with_source(mut self, q: QuboInstance) -> Result<Self, GraphError> {
        if q.n() != self.num_vars {
            return Err(GraphError::Inconsistent(format!(
                "source instance has {} variables, graph has {}",
                q.n(),
                self.num_vars
            )));
        }
        self.source = Some(q);
        Ok(self)
    }

    /// Atoms of wire `id`, ordered by chain position.
    pub fn wire_atoms(&self, id: usize) -> Vec<AtomId> {
        self.chain_members(|role| match role {
            AtomRole::Wire { wire, position } if wire == id => Some(position),
            _ => None,
        })
    }

    pub fn offsets(&self, var: usize) -> Vec<AtomId> {
        self.chain_members(|role| match role {
            AtomRole::Offset { var: v, offset } if v == var => Some(offset),
            _ => None,
        })
    }

    /// Antiferromagnetic-ordering chains, each ordered by position.
    pub fn af_chains(&self) -> Vec<Vec<AtomId>> {
        let ids: BTreeSet<usize> = self
            .atoms
            .iter()
            .filter_map(|a| match a.role {
                AtomRole::AfConstraint { chain, .. } => Some(chain),
                _ => None,
            })
            .collect();
        ids.into_iter()
            .map(|id| {
                self.chain_members(|role| match role {
                    AtomRole::AfConstraint { chain, position } if chain == id => Some(position),
                    _ => None,
                })
            })
            .collect()
    }

    fn chain_members(&self, key: impl Fn(AtomRole) -> Option<usize>) -> Vec<AtomId> {
        let mut members: Vec<(usize, AtomId)> = self
            .atoms
            .iter()
            .enumerate()
            .filter_map(|(id, a)| key(a.role).map(|p| (p, id)))
            .collect();
        members.sort_unstable();
        members.into_iter().map(|(_, id)| id).collect()
    }

    /// Copy of this graph with one edge removed. Used for fault injection;
    /// the result may violate gadget structure.
    pub fn without_edge(&self, a: AtomId, b: AtomId) -> Option<AtomGraph> {
        let key = (a.min(b), a.max(b));
        if !self.edges.contains(&key) {
            return None;
        }
        let edges = self.edges.iter().copied().filter(|&e| e != key);
        Some(
            AtomGraph::from_parts(
                self.num_vars,
                self.atoms.clone(),
                edges,
                self.wires.clone(),
                self.source.clone(),
            )
            .expect("removing an edge keeps referential integrity"),
        )
    }

    /// Gadget-level invariants that do not hold, as readable messages.
    ///
    /// Checked: offsets hang off exactly one data copy of their own variable;
    /// wire and AF chains are contiguous from position 1 and consecutive
    /// members are adjacent; wire length matches parity; wire terminals touch
    /// every copy of their endpoint variable (or, in AF-compiled graphs, an
    /// AF-chain atom); copies of one variable are mutually non-adjacent.
    pub fn structural_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (id, atom) in self.atoms.iter().enumerate() {
            if let AtomRole::Offset { var, .. } = atom.role {
                let nb = self.neighbors(id);
                let ok = nb.len() == 1
                    && matches!(self.role(nb[0]), AtomRole::DataCopy { var: v, .. } if v == var);
                if !ok {
                    out.push(format!(
                        "offset {} must have exactly one edge, to a copy of x{}",
                        atom.label,
                        var + 1
                    ));
                }
            }
        }
        for copies in &self.var_copies {
            for (k, &a) in copies.iter().enumerate() {
                for &b in &copies[k + 1..] {
                    if self.has_edge(a, b) {
                        out.push(format!(
                            "data copies {} and {} are adjacent",
                            self.label(a),
                            self.label(b)
                        ));
                    }
                }
            }
        }
        let has_af = self
            .atoms
            .iter()
            .any(|a| matches!(a.role, AtomRole::AfConstraint { .. }));
        for w in &self.wires {
            let chain = self.wire_atoms(w.id);
            self.check_chain(
                &format!("wire {}", w.id),
                &chain,
                |r| match r {
                    AtomRole::Wire { position, .. } => position,
                    _ => unreachable!(),
                },
                &mut out,
            );
            if chain.len() != w.length {
                out.push(format!(
                    "wire {} declares length {} but has {} atoms",
                    w.id,
                    w.length,
                    chain.len()
                ));
            }
            let parity_ok = match w.parity {
                Parity::Even => w.length >= 2 && w.length % 2 == 0,
                Parity::Odd => w.length % 2 == 1,
            };
            if !parity_ok {
                out.push(format!(
                    "wire {} has length {} inconsistent with {:?} parity",
                    w.id, w.length, w.parity
                ));
            }
            if let (Some(&first), Some(&last)) = (chain.first(), chain.last()) {
                for (terminal, var) in [(first, w.endpoints.0), (last, w.endpoints.1)] {
                    let touches_all = self.var_copies[var]
                        .iter()
                        .all(|&c| self.has_edge(terminal, c));
                    let via_af = has_af
                        && self
                            .neighbors(terminal)
                            .iter()
                            .any(|&nb| matches!(self.role(nb), AtomRole::AfConstraint { .. }));
                    if !touches_all && !via_af {
                        out.push(format!(
                            "terminal {} of wire {} must touch every copy of x{}",
                            self.label(terminal),
                            w.id,
                            var + 1
                        ));
                    }
                }
            }
        }
        for (k, chain) in self.af_chains().iter().enumerate() {
            self.check_chain(
                &format!("AF chain {k}"),
                chain,
                |r| match r {
                    AtomRole::AfConstraint { position, .. } => position,
                    _ => unreachable!(),
                },
                &mut out,
            );
        }
        out
    }

    fn check_chain(
        &self,
        name: &str,
        chain: &[AtomId],
        position: impl Fn(AtomRole) -> usize,
        out: &mut Vec<String>,
    ) {
        for (k, &id) in chain.iter().enumerate() {
            if position(self.role(id)) != k + 1 {
                out.push(format!("{name}: chain positions are not contiguous from 1"));
                return;
            }
        }
        for pair in chain.windows(2) {
            if !self.has_edge(pair[0], pair[1]) {
                out.push(format!(
                    "{name}: consecutive atoms {} and {} are not adjacent",
                    self.label(pair[0]),
                    self.label(pair[1])
                ));
            }
        }
    }

    /// Atom-ordered bitstring of `bits`, e.g. `"1101"`.
    pub fn bitstring(bits: &[u8]) -> String {
        bits.iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphFile::from(self))
            .expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        AtomGraph::try_from(file)
    }
}

impl fmt::Display for AtomGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} atoms, {} edges, {} wires over {} variables",
            self.num_atoms(),
            self.num_edges(),
            self.wires.len(),
            self.num_vars
        )
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub(crate) enum RoleFile {
    DataCopy { var: usize, index: usize },
    Offset { var: usize, index: usize },
    Wire { wire: usize, position: usize },
    AfConstraint { chain: usize, position: usize },
}

impl RoleFile {
    /// 1-based file variables to 0-based roles.
    pub(crate) fn into_role(self) -> Result<AtomRole, GraphError> {
        let var = |v: usize| -> Result<usize, GraphError> {
            if v == 0 {
                Err(GraphError::Json("variables are 1-based".into()))
            } else {
                Ok(v - 1)
            }
        };
        Ok(match self {
            RoleFile::DataCopy { var: v, index } => AtomRole::DataCopy {
                var: var(v)?,
                copy: index,
            },
            RoleFile::Offset { var: v, index } => AtomRole::Offset {
                var: var(v)?,
                offset: index,
            },
            RoleFile::Wire { wire, position } => AtomRole::Wire { wire, position },
            RoleFile::AfConstraint { chain, position } => {
                AtomRole::AfConstraint { chain, position }
            }
        })
    }
}

#[derive(Serialize, Deserialize)]
struct AtomFile {
    id: AtomId,
    label: String,
    role: RoleFile,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct WireFile {
    id: usize,
    endpoints: [usize; 2],
    parity: Parity,
    length: usize,
}

impl WireFile {
    pub(crate) fn into_descriptor(self) -> Result<WireDescriptor, GraphError> {
        let [i, j] = self.endpoints;
        if i == 0 || j == 0 {
            return Err(GraphError::Json("wire endpoints are 1-based".into()));
        }
        Ok(WireDescriptor {
            id: self.id,
            endpoints: (i - 1, j - 1),
            parity: self.parity,
            length: self.length,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    format: String,
    num_vars: usize,
    atoms: Vec<AtomFile>,
    edges: Vec<[AtomId; 2]>,
    wires: Vec<WireFile>,
    var_copies: BTreeMap<String, Vec<AtomId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<QuboInstance>,
}

impl From<&AtomGraph> for GraphFile {
    fn from(g: &AtomGraph) -> Self {
        GraphFile {
            format: GRAPH_FORMAT.to_string(),
            num_vars: g.num_vars,
            atoms: g
                .atoms
                .iter()
                .enumerate()
                .map(|(id, a)| AtomFile {
                    id,
                    label: a.label.clone(),
                    role: match a.role {
                        AtomRole::DataCopy { var, copy } => RoleFile::DataCopy {
                            var: var + 1,
                            index: copy,
                        },
                        AtomRole::Offset { var, offset } => RoleFile::Offset {
                            var: var + 1,
                            index: offset,
                        },
                        AtomRole::Wire { wire, position } => RoleFile::Wire { wire, position },
                        AtomRole::AfConstraint { chain, position } => {
                            RoleFile::AfConstraint { chain, position }
                        }
                    },
                })
                .collect(),
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            wires: g
                .wires
                .iter()
                .map(|w| WireFile {
                    id: w.id,
                    endpoints: [w.endpoints.0 + 1, w.endpoints.1 + 1],
                    parity: w.parity,
                    length: w.length,
                })
                .collect(),
            var_copies: g
                .var_copies
                .iter()
                .enumerate()
                .map(|(v, ids)| ((v + 1).to_string(), ids.clone()))
                .collect(),
            source: g.source.clone(),
        }
    }
}

impl TryFrom<GraphFile> for AtomGraph {
    type Error = GraphError;

    fn try_from(file: GraphFile) -> Result<Self, GraphError> {
        if file.format != GRAPH_FORMAT {
            return Err(GraphError::Json(format!(
                "unsupported format {:?}, expected {GRAPH_FORMAT:?}",
                file.format
            )));
        }
        let mut atoms = Vec::with_capacity(file.atoms.len());
        for (k, a) in file.atoms.into_iter().enumerate() {
            if a.id != k {
                return Err(GraphError::Json(format!(
                    "atom ids must be dense and ordered; found {} at position {k}",
                    a.id
                )));
            }
            let role = a.role.into_role()?;
            atoms.push(Atom {
                role,
                label: a.label,
            });
        }
        let wires = file
            .wires
            .into_iter()
            .map(WireFile::into_descriptor)
            .collect::<Result<Vec<_>, GraphError>>()?;
        let graph = AtomGraph::from_parts(
            file.num_vars,
            atoms,
            file.edges.into_iter().map(|[a, b]| (a, b)),
            wires,
            file.source,
        )?;
        let declared: BTreeMap<String, Vec<AtomId>> = file.var_copies;
        let derived: BTreeMap<String, Vec<AtomId>> = graph
            .var_copies
            .iter()
            .enumerate()
            .map(|(v, ids)| ((v + 1).to_string(), ids.clone()))
            .collect();
        if declared != derived {
            return Err(GraphError::Inconsistent(
                "var_copies does not match the data-copy roles".into(),
            ));
        }
        Ok(graph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(role: AtomRole, label: &str) -> Atom {
        Atom {
            role,
            label: label.into(),
        }
    }

    fn star() -> AtomGraph {
        AtomGraph::from_parts(
            1,
            vec![
                atom(AtomRole::DataCopy { var: 0, copy: 1 }, "x1"),
                atom(AtomRole::Offset { var: 0, offset: 1 }, "a1^(1)"),
                atom(AtomRole::Offset { var: 0, offset: 2 }, "a1^(2)"),
            ],
            [(0, 1), (2, 0)],
            vec![],
            None,
        )
        .unwrap()
    }

    #[test]
    fn integrity_errors() {
        let atoms = || {
            vec![
                atom(AtomRole::DataCopy { var: 0, copy: 1 }, "x1"),
                atom(AtomRole::Offset { var: 0, offset: 1 }, "a1"),
            ]
        };
        let build =
            |edges: Vec<(usize, usize)>| AtomGraph::from_parts(1, atoms(), edges, vec![], None);
        assert_eq!(build(vec![(0, 2)]), Err(GraphError::MissingAtom(0, 2)));
        assert_eq!(build(vec![(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            build(vec![(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            AtomGraph::from_parts(2, atoms(), [], vec![], None),
            Err(GraphError::NoDataCopy(2))
        );
        let wire_atom = vec![
            atom(AtomRole::DataCopy { var: 0, copy: 1 }, "x1"),
            atom(
                AtomRole::Wire {
                    wire: 4,
                    position: 1,
                },
                "W4",
            ),
        ];
        assert_eq!(
            AtomGraph::from_parts(1, wire_atom, [], vec![], None),
            Err(GraphError::UnknownWire { atom: 1, wire: 4 })
        );
    }

    #[test]
    fn structure_of_a_star_is_clean() {
        let g = star();
        assert!(g.structural_violations().is_empty());
        assert_eq!(g.offsets(0), vec![1, 2]);
        assert_eq!(g.neighbors(0), &[1, 2]);
        let broken = g.without_edge(0, 2).unwrap();
        assert_eq!(broken.structural_violations().len(), 1);
        assert!(g.without_edge(1, 2).is_none());
    }

    #[test]
    fn json_roundtrip() {
        let g = star();
        let back = AtomGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn json_rejects_mismatched_var_copies() {
        let text = star()
            .to_json()
            .replace("\"1\": [\n      0\n    ]", "\"1\": [1]");
        assert!(matches!(
            AtomGraph::from_json(&text),
            Err(GraphError::Inconsistent(_))
        ));
    }
}
