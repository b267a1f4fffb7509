//! QUBO → atom-graph compiler built from four gadgets.
//!
//! * data qubit: `k` mutually independent copies of a variable, worth `-k`
//!   per unit of detuning when the variable is 1;
//! * data-and-offset: one copy with `k` pendant offset atoms, worth `k - 1`;
//! * even wire (`2M` atoms): adds `+1` exactly when both endpoints are 1;
//! * odd wire (`2M + 1` atoms): adds `x_i + x_j - x_i x_j`.
//!
//! A negative quadratic coefficient therefore also shifts both endpoint
//! linear coefficients by `+|Q_ij|`, which the compiler cancels up front by
//! targeting `T_i = Q_ii - Σ_{j: Q_ij < 0} |Q_ij|` in the qubit gadget.

use thiserror::Error;

use crate::graph::{Atom, AtomGraph, AtomId, AtomRole, GraphError, Parity, WireDescriptor};
use crate::qubo::{Assignment, QuboInstance};

/// Compiled graphs larger than this are refused rather than allocated.
pub const MAX_COMPILED_ATOMS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("data qubit needs at least one copy")]
    NoCopies,
    #[error("offsets need at least one atom")]
    NoOffsets,
    #[error("x{var} has {copies} data copies; offsets attach to single-copy variables only")]
    OffsetOnMultiCopy { var: usize, copies: usize },
    #[error("x{0} has no data copies yet")]
    MissingVariable(usize),
    #[error("even wire needs M >= 1")]
    EvenWireTooShort,
    #[error("invalid wire length policy: {0}")]
    BadPolicy(String),
    #[error("integer overflow while {0}")]
    Overflow(&'static str),
    #[error("compiled graph would need {0} atoms (limit {MAX_COMPILED_ATOMS})")]
    TooManyAtoms(u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("expected {expected} atom bits, got {got}")]
    Length { expected: usize, got: usize },
    #[error("data copies of x{} disagree", var + 1)]
    Inconsistent { var: usize },
}

/// Number of atoms per emitted wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WireLengthPolicy {
    /// Even wires: `2M`, `M ≥ 1`.
    pub even: usize,
    /// Odd wires: `2M + 1`, `M ≥ 0`.
    pub odd: usize,
}

impl Default for WireLengthPolicy {
    fn default() -> Self {
        WireLengthPolicy { even: 2, odd: 1 }
    }
}

impl WireLengthPolicy {
    pub fn new(even: usize, odd: usize) -> Result<Self, CompileError> {
        if even < 2 || even % 2 != 0 {
            return Err(CompileError::BadPolicy(format!(
                "even wire length must be even and >= 2, got {even}"
            )));
        }
        if odd % 2 != 1 {
            return Err(CompileError::BadPolicy(format!(
                "odd wire length must be odd, got {odd}"
            )));
        }
        Ok(WireLengthPolicy { even, odd })
    }
}

/// Target linear coefficient `T_i` the qubit gadget of 0-based variable `i`
/// must realize once odd wires have added their `+|Q_ij| x_i` terms.
pub fn effective_linear(q: &QuboInstance, i: usize) -> Result<i64, CompileError> {
    assert!(i < q.n(), "variable index out of range");
    let mut t = q.linear(i);
    for ((a, b), w) in q.quadratic_terms() {
        if (a == i || b == i) && w < 0 {
            t = t
                .checked_add(w)
                .ok_or(CompileError::Overflow("computing effective linear terms"))?;
        }
    }
    Ok(t)
}

/// Incremental atom-graph construction from gadget fragments.
///
/// Fragments are disjoint: every call appends fresh atoms and returns their
/// ids. Wires attach to the copies that exist when the wire is built, so
/// emit every variable's qubit gadget first.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    num_vars: usize,
    atoms: Vec<Atom>,
    edges: Vec<(AtomId, AtomId)>,
    wires: Vec<WireDescriptor>,
    copies: Vec<Vec<AtomId>>,
}

impl GraphBuilder {
    pub fn new(num_vars: usize) -> Self {
        GraphBuilder {
            num_vars,
            atoms: Vec::new(),
            edges: Vec::new(),
            wires: Vec::new(),
            copies: vec![Vec::new(); num_vars],
        }
    }

    fn push(&mut self, role: AtomRole, label: String) -> AtomId {
        self.atoms.push(Atom { role, label });
        self.atoms.len() - 1
    }

    /// `count` mutually non-adjacent copies of `var`.
    pub fn data_qubit(&mut self, var: usize, count: usize) -> Result<Vec<AtomId>, CompileError> {
        if count == 0 {
            return Err(CompileError::NoCopies);
        }
        let ids: Vec<AtomId> = (1..=count)
            .map(|c| {
                let label = if count == 1 {
                    format!("x{}", var + 1)
                } else {
                    format!("x{}^({c})", var + 1)
                };
                self.push(AtomRole::DataCopy { var, copy: c }, label)
            })
            .collect();
        self.copies[var].extend(&ids);
        Ok(ids)
    }

    /// `k` pendant offsets on the single copy of `var`; net effect `(k-1)·x`.
    pub fn offsets(&mut self, var: usize, k: usize) -> Result<Vec<AtomId>, CompileError> {
        if k == 0 {
            return Err(CompileError::NoOffsets);
        }
        let center = match self.copies[var].as_slice() {
            [] => return Err(CompileError::MissingVariable(var + 1)),
            [c] => *c,
            many => {
                return Err(CompileError::OffsetOnMultiCopy {
                    var: var + 1,
                    copies: many.len(),
                })
            }
        };
        let ids: Vec<AtomId> = (1..=k)
            .map(|o| {
                let label = if k == 1 {
                    format!("a{}", var + 1)
                } else {
                    format!("a{}^({o})", var + 1)
                };
                let id = self.push(AtomRole::Offset { var, offset: o }, label);
                self.edges.push((center, id));
                id
            })
            .collect();
        Ok(ids)
    }

    /// `2M`-atom chain between `i` and `j`; realizes `+x_i x_j`.
    pub fn even_wire(&mut self, i: usize, j: usize, m: usize) -> Result<Vec<AtomId>, CompileError> {
        if m == 0 {
            return Err(CompileError::EvenWireTooShort);
        }
        self.wire(i, j, Parity::Even, 2 * m)
    }

    /// `(2M+1)`-atom chain between `i` and `j`; realizes
    /// `x_i + x_j - x_i x_j`.
    pub fn odd_wire(&mut self, i: usize, j: usize, m: usize) -> Result<Vec<AtomId>, CompileError> {
        self.wire(i, j, Parity::Odd, 2 * m + 1)
    }

    fn wire(
        &mut self,
        i: usize,
        j: usize,
        parity: Parity,
        length: usize,
    ) -> Result<Vec<AtomId>, CompileError> {
        for v in [i, j] {
            if self.copies[v].is_empty() {
                return Err(CompileError::MissingVariable(v + 1));
            }
        }
        let id = self.wires.len() + 1;
        let ids: Vec<AtomId> = (1..=length)
            .map(|p| {
                let label = if length == 1 {
                    format!("W{id}")
                } else {
                    format!("W{id}^({p})")
                };
                self.push(
                    AtomRole::Wire {
                        wire: id,
                        position: p,
                    },
                    label,
                )
            })
            .collect();
        for pair in ids.windows(2) {
            self.edges.push((pair[0], pair[1]));
        }
        let (first, last) = (ids[0], ids[length - 1]);
        for &c in &self.copies[i] {
            self.edges.push((c, first));
        }
        for &c in &self.copies[j] {
            self.edges.push((c, last));
        }
        self.wires.push(WireDescriptor {
            id,
            endpoints: (i, j),
            parity,
            length,
        });
        Ok(ids)
    }

    pub fn finish(self, source: Option<QuboInstance>) -> Result<AtomGraph, CompileError> {
        Ok(AtomGraph::from_parts(
            self.num_vars,
            self.atoms,
            self.edges,
            self.wires,
            source,
        )?)
    }
}

/// Atom count `compile` would produce, with overflow checking.
pub fn compiled_atom_count(
    q: &QuboInstance,
    policy: &WireLengthPolicy,
) -> Result<u64, CompileError> {
    let overflow = || CompileError::Overflow("counting atoms");
    let mut total: u64 = 0;
    for i in 0..q.n() {
        let t = effective_linear(q, i)?;
        let atoms = if t < 0 {
            t.unsigned_abs()
        } else {
            (t as u64).checked_add(2).ok_or_else(overflow)?
        };
        total = total.checked_add(atoms).ok_or_else(overflow)?;
    }
    for (_, w) in q.quadratic_terms() {
        let len = if w > 0 { policy.even } else { policy.odd } as u64;
        let atoms = w.unsigned_abs().checked_mul(len).ok_or_else(overflow)?;
        total = total.checked_add(atoms).ok_or_else(overflow)?;
    }
    Ok(total)
}

/// Builds the atom graph whose maximum independent sets decode to the
/// minimizers of `q`.
///
/// Atom order: per variable (in index order) its data copies then its
/// offsets, followed by wires in quadratic-term order.
pub fn compile(q: &QuboInstance, policy: &WireLengthPolicy) -> Result<AtomGraph, CompileError> {
    let policy = WireLengthPolicy::new(policy.even, policy.odd)?;
    let total = compiled_atom_count(q, &policy)?;
    if total > MAX_COMPILED_ATOMS {
        return Err(CompileError::TooManyAtoms(total));
    }
    let mut b = GraphBuilder::new(q.n());
    for i in 0..q.n() {
        let t = effective_linear(q, i)?;
        if t < 0 {
            b.data_qubit(i, t.unsigned_abs() as usize)?;
        } else {
            b.data_qubit(i, 1)?;
            b.offsets(i, t as usize + 1)?;
        }
    }
    for ((i, j), w) in q.quadratic_terms() {
        for _ in 0..w.unsigned_abs() {
            if w > 0 {
                b.even_wire(i, j, policy.even / 2)?;
            } else {
                b.odd_wire(i, j, policy.odd / 2)?;
            }
        }
    }
    b.finish(Some(q.clone()))
}

/// Reads each variable off its data copies. Wire, offset and AF atoms do
/// not contribute.
pub fn decode(graph: &AtomGraph, bits: &[u8]) -> Result<Assignment, DecodeError> {
    if bits.len() != graph.num_atoms() {
        return Err(DecodeError::Length {
            expected: graph.num_atoms(),
            got: bits.len(),
        });
    }
    let mut out = Vec::with_capacity(graph.num_vars());
    for var in 0..graph.num_vars() {
        let copies = graph.var_copies(var);
        let first = bits[copies[0]];
        if copies.iter().any(|&c| bits[c] != first) {
            return Err(DecodeError::Inconsistent { var });
        }
        out.push(first);
    }
    Ok(Assignment::new(out))
}

/// Offsets whose bit equals their data atom's bit. In a ground state of an
/// offset gadget every offset reads the opposite of its data qubit.
pub fn offset_anomalies(graph: &AtomGraph, bits: &[u8]) -> Vec<AtomId> {
    (0..graph.num_atoms())
        .filter(|&id| match graph.role(id) {
            AtomRole::Offset { var, .. } => bits[id] == bits[graph.var_copies(var)[0]],
            _ => false,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: usize, lin: &[(usize, i64)], quad: &[((usize, usize), i64)]) -> QuboInstance {
        QuboInstance::new(n, lin.iter().copied(), quad.iter().copied()).unwrap()
    }

    fn f3() -> QuboInstance {
        q(2, &[(0, -2), (1, 1)], &[((0, 1), 1)])
    }

    fn f4() -> QuboInstance {
        q(2, &[(0, -2), (1, 1)], &[((0, 1), -1)])
    }

    fn f7() -> QuboInstance {
        q(
            3,
            &[(0, -2), (1, 1), (2, 2)],
            &[((0, 1), 1), ((0, 2), 1), ((1, 2), -2)],
        )
    }

    fn role_census(g: &AtomGraph) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for a in g.atoms() {
            match a.role {
                AtomRole::DataCopy { .. } => c.0 += 1,
                AtomRole::Offset { .. } => c.1 += 1,
                AtomRole::Wire { .. } => c.2 += 1,
                AtomRole::AfConstraint { .. } => {}
            }
        }
        c
    }

    #[test]
    fn effective_linear_examples() {
        assert_eq!(effective_linear(&f4(), 0).unwrap(), -3);
        assert_eq!(effective_linear(&f4(), 1).unwrap(), 0);
        let f6 = q(2, &[(0, -2), (1, 1)], &[((0, 1), -2)]);
        assert_eq!(effective_linear(&f6, 0).unwrap(), -4);
        assert_eq!(effective_linear(&f6, 1).unwrap(), -1);
        assert_eq!(effective_linear(&f3(), 0).unwrap(), -2);
        assert_eq!(effective_linear(&f3(), 1).unwrap(), 1);
    }

    #[test]
    fn data_qubit_fragments() {
        let mut b = GraphBuilder::new(1);
        assert_eq!(b.data_qubit(0, 0), Err(CompileError::NoCopies));
        assert_eq!(b.data_qubit(0, 2).unwrap(), vec![0, 1]);
        let g = b.finish(None).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert_eq!(g.label(1), "x1^(2)");

        let mut b = GraphBuilder::new(1);
        b.data_qubit(0, 4).unwrap();
        let g = b.finish(None).unwrap();
        assert_eq!((g.num_atoms(), g.num_edges()), (4, 0));

        let mut b = GraphBuilder::new(1);
        b.data_qubit(0, 1).unwrap();
        assert_eq!(b.finish(None).unwrap().label(0), "x1");
    }

    #[test]
    fn offset_fragments() {
        let mut b = GraphBuilder::new(2);
        assert_eq!(b.offsets(1, 2), Err(CompileError::MissingVariable(2)));
        b.data_qubit(1, 1).unwrap();
        assert_eq!(b.offsets(1, 0), Err(CompileError::NoOffsets));
        let leaves = b.offsets(1, 2).unwrap();
        b.data_qubit(0, 2).unwrap();
        assert_eq!(
            b.offsets(0, 1),
            Err(CompileError::OffsetOnMultiCopy { var: 1, copies: 2 })
        );
        let g = b.finish(None).unwrap();
        for leaf in leaves {
            assert_eq!(g.neighbors(leaf), &[0]);
        }
    }

    #[test]
    fn wire_fragments() {
        let mut b = GraphBuilder::new(2);
        b.data_qubit(0, 2).unwrap();
        assert_eq!(b.even_wire(0, 1, 1), Err(CompileError::MissingVariable(2)));
        b.data_qubit(1, 1).unwrap();
        assert_eq!(b.even_wire(0, 1, 0), Err(CompileError::EvenWireTooShort));
        let even = b.even_wire(0, 1, 2).unwrap();
        let odd = b.odd_wire(0, 1, 0).unwrap();
        let g = b.finish(None).unwrap();
        assert!(g.structural_violations().is_empty());
        assert_eq!(even.len(), 4);
        assert_eq!(odd.len(), 1);
        assert!(g.has_edge(0, even[0]) && g.has_edge(1, even[0]));
        assert!(g.has_edge(2, even[3]));
        assert!(g.has_edge(0, odd[0]) && g.has_edge(1, odd[0]) && g.has_edge(2, odd[0]));
        assert_eq!(g.wires()[1].parity, Parity::Odd);
        assert_eq!(g.wire_atoms(1), even);
    }

    #[test]
    fn compile_f3_matches_the_hand_built_graph() {
        let g = compile(&f3(), &WireLengthPolicy::default()).unwrap();
        assert_eq!(g.num_atoms(), 7);
        assert_eq!(role_census(&g), (3, 2, 2));
        let labels: Vec<_> = g.labels().collect();
        assert_eq!(
            labels,
            ["x1^(1)", "x1^(2)", "x2", "a2^(1)", "a2^(2)", "W1^(1)", "W1^(2)"]
        );
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, [(0, 5), (1, 5), (2, 3), (2, 4), (2, 6), (5, 6)]);
        assert!(g.structural_violations().is_empty());
    }

    #[test]
    fn compile_f4_matches_the_hand_built_graph() {
        let g = compile(&f4(), &WireLengthPolicy::default()).unwrap();
        assert_eq!(g.num_atoms(), 6);
        let labels: Vec<_> = g.labels().collect();
        assert_eq!(labels, ["x1^(1)", "x1^(2)", "x1^(3)", "x2", "a2", "W1"]);
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, [(0, 5), (1, 5), (2, 5), (3, 4), (3, 5)]);
    }

    #[test]
    fn compile_single_variable() {
        let g = compile(&q(1, &[(0, -1)], &[]), &WireLengthPolicy::default()).unwrap();
        assert_eq!((g.num_atoms(), g.num_edges()), (1, 0));
    }

    #[test]
    fn compile_f7_with_long_even_wires_has_fifteen_atoms() {
        let g = compile(&f7(), &WireLengthPolicy::new(4, 1).unwrap()).unwrap();
        assert_eq!(g.num_atoms(), 15);
        let labels: Vec<_> = g.labels().take(5).collect();
        assert_eq!(labels, ["x1^(1)", "x1^(2)", "x2", "x3", "a3"]);
        assert_eq!(
            compile(&f7(), &WireLengthPolicy::default())
                .unwrap()
                .num_atoms(),
            11
        );
    }

    #[test]
    fn zero_instance_gets_one_offset_per_variable() {
        let g = compile(&q(3, &[], &[]), &WireLengthPolicy::default()).unwrap();
        assert_eq!(role_census(&g), (3, 3, 0));
    }

    #[test]
    fn policy_validation() {
        assert!(WireLengthPolicy::new(3, 1).is_err());
        assert!(WireLengthPolicy::new(0, 1).is_err());
        assert!(WireLengthPolicy::new(2, 2).is_err());
        assert!(WireLengthPolicy::new(6, 5).is_ok());
    }

    #[test]
    fn oversized_instances_are_refused() {
        let big = q(1, &[(0, -(1 << 40))], &[]);
        assert!(matches!(
            compile(&big, &WireLengthPolicy::default()),
            Err(CompileError::TooManyAtoms(_))
        ));
        let extreme = q(2, &[(0, i64::MIN)], &[((0, 1), -1)]);
        assert!(matches!(
            compile(&extreme, &WireLengthPolicy::default()),
            Err(CompileError::Overflow(_))
        ));
    }

    #[test]
    fn decode_examples() {
        let g3 = compile(&f3(), &WireLengthPolicy::default()).unwrap();
        assert_eq!(
            decode(&g3, &[1, 1, 0, 1, 1, 0, 1]).unwrap(),
            Assignment::from([1, 0])
        );
        assert!(offset_anomalies(&g3, &[1, 1, 0, 1, 1, 0, 1]).is_empty());
        assert_eq!(offset_anomalies(&g3, &[1, 1, 0, 0, 1, 0, 1]), vec![3]);
        let g4 = compile(&f4(), &WireLengthPolicy::default()).unwrap();
        assert_eq!(
            decode(&g4, &[1, 1, 1, 1, 0, 0]).unwrap(),
            Assignment::from([1, 1])
        );
        assert_eq!(
            decode(&g4, &[1, 0, 1, 1, 0, 0]),
            Err(DecodeError::Inconsistent { var: 0 })
        );
        assert_eq!(
            decode(&g4, &[1, 1]),
            Err(DecodeError::Length {
                expected: 6,
                got: 2
            })
        );
        let mut b = GraphBuilder::new(1);
        b.data_qubit(0, 2).unwrap();
        let g1 = b.finish(None).unwrap();
        assert_eq!(decode(&g1, &[0, 0]).unwrap(), Assignment::from([0]));
    }
}
