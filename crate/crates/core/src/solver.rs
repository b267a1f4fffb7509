//! Exact ground states of the diagonal (`Ω = 0`) Rydberg Hamiltonian
//! `H = -Δ Σ n_i + U Σ_{(i,j) ∈ E} n_i n_j`.
//!
//! In the blockade limit the ground states are exactly the maximum
//! independent sets. Energies are reported in units of `Δ`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::compile::{decode, DecodeError, GraphBuilder};
use crate::graph::{AtomGraph, Parity};
use crate::qubo::{Assignment, QuboError, QuboInstance, DEFAULT_BRUTE_FORCE_CAP};

/// Hard ceiling of the bitset representation.
pub const MAX_SEARCH_ATOMS: usize = 128;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("{atoms} atoms exceeds the exact-search cap of {cap}")]
    CapExceeded { atoms: usize, cap: usize },
    #[error("invalid energy model: {0}")]
    BadModel(String),
    #[error("non-positive weight on vertex {0}")]
    BadWeight(usize),
    #[error("invalid weighted graph: {0}")]
    BadGraph(String),
    #[error("wire table undefined for {parity:?} wire with M = {m}")]
    BadWire { parity: Parity, m: usize },
    #[error("graph encodes {graph} variables but the instance has {qubo}")]
    VariableMismatch { graph: usize, qubo: usize },
    #[error(transparent)]
    Qubo(#[from] QuboError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PenaltyMode {
    /// Only independent sets are admissible.
    HardBlockade,
    /// Every configuration is admissible; each excited edge costs `U`.
    SoftPenalty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyModel {
    pub delta: f64,
    pub u: f64,
    pub mode: PenaltyMode,
}

impl EnergyModel {
    pub fn hard_blockade() -> Self {
        EnergyModel {
            delta: 1.0,
            u: f64::INFINITY,
            mode: PenaltyMode::HardBlockade,
        }
    }

    /// Requires the MIS condition `0 < Δ < U`.
    pub fn soft_penalty(delta: f64, u: f64) -> Result<Self, SolverError> {
        if !(delta > 0.0 && u > delta && u.is_finite()) {
            return Err(SolverError::BadModel(format!(
                "need 0 < delta < u, got delta = {delta}, u = {u}"
            )));
        }
        Ok(EnergyModel {
            delta,
            u,
            mode: PenaltyMode::SoftPenalty,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest graph handed to the branch-and-bound search.
    pub exact_cap: usize,
    /// Largest graph handed to the `2^n` reference enumeration.
    pub reference_cap: usize,
    /// Largest QUBO handed to the brute-force oracle.
    pub qubo_cap: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            exact_cap: 64,
            reference_cap: 25,
            qubo_cap: DEFAULT_BRUTE_FORCE_CAP,
        }
    }
}

/// All minimum-energy configurations, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStates {
    /// Ground energy divided by `Δ`. An integer in hard-blockade mode.
    pub energy: f64,
    pub configs: Vec<Vec<u8>>,
}

type Mask = u128;

fn bit(k: usize) -> Mask {
    1 << k
}

fn members(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let k = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(k)
        }
    })
}

fn adjacency_masks(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<Mask> {
    let mut adj = vec![0; n];
    for (a, b) in edges {
        adj[a] |= bit(b);
        adj[b] |= bit(a);
    }
    adj
}

fn to_bits(mask: Mask, n: usize) -> Vec<u8> {
    (0..n).map(|k| ((mask >> k) & 1) as u8).collect()
}

fn sorted_configs(masks: impl IntoIterator<Item = Mask>, n: usize) -> Vec<Vec<u8>> {
    let set: BTreeSet<Vec<u8>> = masks.into_iter().map(|m| to_bits(m, n)).collect();
    set.into_iter().collect()
}

/// Branch-and-bound enumeration of every maximum independent set inside
/// `cand`.
struct MisSearch<'a> {
    adj: &'a [Mask],
    best: u32,
    found: Vec<Mask>,
}

impl MisSearch<'_> {
    /// Greedy clique partition of `cand`; its size bounds any independent
    /// set inside `cand`.
    fn clique_cover(&self, cand: Mask) -> u32 {
        let mut rest = cand;
        let mut cliques = 0;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= !bit(v);
            let mut common = rest & self.adj[v];
            while common != 0 {
                let u = common.trailing_zeros() as usize;
                rest &= !bit(u);
                common &= self.adj[u] & !bit(u);
            }
            cliques += 1;
        }
        cliques
    }

    fn run(&mut self, chosen: Mask, cand: Mask, size: u32) {
        if cand == 0 {
            if size > self.best {
                self.best = size;
                self.found.clear();
            }
            if size == self.best {
                self.found.push(chosen);
            }
            return;
        }
        if size + self.clique_cover(cand) < self.best {
            return;
        }
        // Every maximum set contains some vertex of N[v] ∩ cand. Branch on
        // which one comes first; the branches are disjoint.
        let v = members(cand)
            .min_by_key(|&k| (self.adj[k] & cand).count_ones())
            .expect("cand is nonempty");
        let mut excluded: Mask = 0;
        for w in std::iter::once(v).chain(members(self.adj[v] & cand)) {
            let next = cand & !self.adj[w] & !bit(w) & !excluded;
            self.run(chosen | bit(w), next, size + 1);
            excluded |= bit(w);
        }
    }
}

fn maximum_independent_sets(adj: &[Mask], cand: Mask) -> (u32, Vec<Mask>) {
    let mut s = MisSearch {
        adj,
        best: 0,
        found: Vec::new(),
    };
    s.run(0, cand, 0);
    (s.best, s.found)
}

/// Depth-first search over include/exclude decisions for the soft model,
/// pruned with a per-vertex lower bound on the remaining energy.
struct SoftSearch<'a> {
    adj: &'a [Mask],
    order: Vec<usize>,
    delta: f64,
    u: f64,
    best: f64,
    found: Vec<Mask>,
}

impl SoftSearch<'_> {
    fn tol(&self) -> f64 {
        1e-9 * self.best.abs().max(self.delta)
    }

    fn run(&mut self, depth: usize, chosen: Mask, energy: f64) {
        if depth == self.order.len() {
            if energy < self.best - self.tol() {
                self.best = energy;
                self.found.clear();
            }
            if (energy - self.best).abs() <= self.tol() {
                self.found.push(chosen);
            }
            return;
        }
        let bound: f64 = self.order[depth..]
            .iter()
            .map(|&v| {
                let hits = (self.adj[v] & chosen).count_ones() as f64;
                (-self.delta + self.u * hits).min(0.0)
            })
            .sum();
        if energy + bound > self.best + self.tol() {
            return;
        }
        let v = self.order[depth];
        let hits = (self.adj[v] & chosen).count_ones() as f64;
        self.run(
            depth + 1,
            chosen | bit(v),
            energy - self.delta + self.u * hits,
        );
        self.run(depth + 1, chosen, energy);
    }
}

fn check_cap(atoms: usize, cap: usize) -> Result<(), SolverError> {
    let cap = cap.min(MAX_SEARCH_ATOMS);
    if atoms > cap {
        Err(SolverError::CapExceeded { atoms, cap })
    } else {
        Ok(())
    }
}

/// Every ground configuration of `graph` under `model`.
pub fn enumerate_ground_configs(
    graph: &AtomGraph,
    model: &EnergyModel,
    limits: &SearchLimits,
) -> Result<GroundStates, SolverError> {
    let n = graph.num_atoms();
    check_cap(n, limits.exact_cap)?;
    let adj = adjacency_masks(n, graph.edges());
    let all = if n == 0 { 0 } else { Mask::MAX >> (128 - n) };
    match model.mode {
        PenaltyMode::HardBlockade => {
            let (size, sets) = maximum_independent_sets(&adj, all);
            Ok(GroundStates {
                energy: -(size as f64),
                configs: sorted_configs(sets, n),
            })
        }
        PenaltyMode::SoftPenalty => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&v| (std::cmp::Reverse(adj[v].count_ones()), v));
            let mut s = SoftSearch {
                adj: &adj,
                order,
                delta: model.delta,
                u: model.u,
                best: f64::INFINITY,
                found: Vec::new(),
            };
            // The empty configuration is always admissible.
            s.best = 0.0;
            s.run(0, 0, 0.0);
            if s.found.is_empty() {
                s.found.push(0);
            }
            Ok(GroundStates {
                energy: s.best / model.delta,
                configs: sorted_configs(s.found, n),
            })
        }
    }
}

/// `2^n` enumeration of the same energy function; the oracle for
/// [`enumerate_ground_configs`].
pub fn enumerate_ground_configs_reference(
    graph: &AtomGraph,
    model: &EnergyModel,
    limits: &SearchLimits,
) -> Result<GroundStates, SolverError> {
    let n = graph.num_atoms();
    check_cap(n, limits.reference_cap.min(30))?;
    let edges: Vec<(usize, usize)> = graph.edges().collect();
    let mut best = f64::INFINITY;
    let mut found = Vec::new();
    for mask in 0..(1u64 << n) {
        let excited = mask.count_ones() as f64;
        let violated = edges
            .iter()
            .filter(|&&(a, b)| (mask >> a) & 1 == 1 && (mask >> b) & 1 == 1)
            .count();
        let energy = match model.mode {
            PenaltyMode::HardBlockade if violated > 0 => continue,
            PenaltyMode::HardBlockade => -excited,
            PenaltyMode::SoftPenalty => -model.delta * excited + model.u * violated as f64,
        };
        let tol = if best.is_finite() {
            1e-9 * best.abs().max(1.0)
        } else {
            0.0
        };
        if energy < best - tol {
            best = energy;
            found.clear();
        }
        if (energy - best).abs() <= tol {
            found.push(mask as Mask);
        }
    }
    let energy = match model.mode {
        PenaltyMode::HardBlockade => best,
        PenaltyMode::SoftPenalty => best / model.delta,
    };
    Ok(GroundStates {
        energy,
        configs: sorted_configs(found, n),
    })
}

/// Ground energy (in `Δ`) of a wire chain with clamped endpoint qubits, and
/// the wire configurations attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WireTableRow {
    pub energy: i64,
    /// Wire-atom bits, chain position 1 first.
    pub configs: Vec<Vec<u8>>,
}

/// Reproduces the even/odd wire energy tables by exact enumeration.
///
/// Even wires have `2M` atoms (`M ≥ 1`), odd wires `2M + 1` (`M ≥ 0`). The
/// energy counts wire excitations only; the clamped endpoints are fixed.
pub fn wire_table(
    parity: Parity,
    m: usize,
    endpoints: (u8, u8),
) -> Result<WireTableRow, SolverError> {
    let len = match parity {
        Parity::Even if m >= 1 => 2 * m,
        Parity::Odd => 2 * m + 1,
        _ => return Err(SolverError::BadWire { parity, m }),
    };
    check_cap(len, MAX_SEARCH_ATOMS)?;
    let adj = adjacency_masks(len, (1..len).map(|k| (k - 1, k)));
    let mut cand: Mask = Mask::MAX >> (128 - len);
    if endpoints.0 == 1 {
        cand &= !bit(0);
    }
    if endpoints.1 == 1 {
        cand &= !bit(len - 1);
    }
    let (size, sets) = maximum_independent_sets(&adj, cand);
    Ok(WireTableRow {
        energy: -(size as i64),
        configs: sorted_configs(sets, len),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// A ground configuration whose data copies disagree.
    Inconsistent { config: String, var: usize },
    /// Decoded from a ground state but not a QUBO minimizer.
    Extra { assignment: Assignment },
    /// A QUBO minimizer no ground state decodes to.
    Missing { assignment: Assignment },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub pass: bool,
    /// Ground energy of the graph, in `Δ`.
    pub ground_energy: f64,
    pub ground_config_count: usize,
    pub decoded: BTreeSet<Assignment>,
    pub oracle_value: i64,
    pub oracle: BTreeSet<Assignment>,
    pub counterexamples: Vec<Counterexample>,
}

impl CertificateReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Checks that the ground states of `graph` decode to exactly the
/// minimizers of `q`.
pub fn certify_equivalence(
    q: &QuboInstance,
    graph: &AtomGraph,
    limits: &SearchLimits,
) -> Result<CertificateReport, SolverError> {
    if graph.num_vars() != q.n() {
        return Err(SolverError::VariableMismatch {
            graph: graph.num_vars(),
            qubo: q.n(),
        });
    }
    let minima = q.brute_force_minima(limits.qubo_cap)?;
    let ground = enumerate_ground_configs(graph, &EnergyModel::hard_blockade(), limits)?;
    let mut decoded = BTreeSet::new();
    let mut counterexamples = Vec::new();
    for config in &ground.configs {
        match decode(graph, config) {
            Ok(a) => {
                decoded.insert(a);
            }
            Err(DecodeError::Inconsistent { var }) => {
                counterexamples.push(Counterexample::Inconsistent {
                    config: AtomGraph::bitstring(config),
                    var: var + 1,
                })
            }
            Err(DecodeError::Length { .. }) => unreachable!("configs span the graph"),
        }
    }
    counterexamples.extend(
        decoded
            .difference(&minima.argmin)
            .map(|a| Counterexample::Extra {
                assignment: a.clone(),
            }),
    );
    counterexamples.extend(
        minima
            .argmin
            .difference(&decoded)
            .map(|a| Counterexample::Missing {
                assignment: a.clone(),
            }),
    );
    Ok(CertificateReport {
        pass: counterexamples.is_empty(),
        ground_energy: ground.energy,
        ground_config_count: ground.configs.len(),
        decoded,
        oracle_value: minima.value,
        oracle: minima.argmin,
        counterexamples,
    })
}

/// Vertex-weighted graph with positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    weights: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

impl WeightedGraph {
    pub fn new(weights: Vec<u64>, edges: Vec<(usize, usize)>) -> Result<Self, SolverError> {
        if let Some(v) = weights.iter().position(|&w| w == 0) {
            return Err(SolverError::BadWeight(v));
        }
        let n = weights.len();
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a >= n || b >= n || a == b || !seen.insert((a.min(b), a.max(b))) {
                return Err(SolverError::BadGraph(format!("bad edge ({a}, {b})")));
            }
        }
        Ok(WeightedGraph { weights, edges })
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Replaces each vertex of weight `w` by `w` independent copies that share
/// the original neighborhood. Vertex `v` becomes variable `v` of the result.
pub fn mwis_expand(weighted: &WeightedGraph) -> Result<AtomGraph, SolverError> {
    let mut b = GraphBuilder::new(weighted.weights.len());
    let copies: Vec<Vec<usize>> = weighted
        .weights
        .iter()
        .enumerate()
        .map(|(v, &w)| b.data_qubit(v, w as usize).expect("weights are positive"))
        .collect();
    let mut edges = Vec::new();
    for &(u, v) in &weighted.edges {
        for &a in &copies[u] {
            for &c in &copies[v] {
                edges.push((a, c));
            }
        }
    }
    let plain = b.finish(None).expect("copies only");
    AtomGraph::from_parts(
        plain.num_vars(),
        plain.atoms().to_vec(),
        edges,
        vec![],
        None,
    )
    .map_err(|e| SolverError::BadGraph(e.to_string()))
}

/// Maximum-weight independent sets of `weighted`, via expansion, exact MIS
/// search, and copy-unanimity decoding.
pub fn mwis_solutions(
    weighted: &WeightedGraph,
    limits: &SearchLimits,
) -> Result<BTreeSet<Assignment>, SolverError> {
    let expanded = mwis_expand(weighted)?;
    let ground = enumerate_ground_configs(&expanded, &EnergyModel::hard_blockade(), limits)?;
    Ok(ground
        .configs
        .iter()
        .map(|c| decode(&expanded, c).expect("copies share neighborhoods"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{compile, WireLengthPolicy};

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> AtomGraph {
        let mut b = GraphBuilder::new(n);
        for v in 0..n {
            b.data_qubit(v, 1).unwrap();
        }
        let g = b.finish(None).unwrap();
        AtomGraph::from_parts(n, g.atoms().to_vec(), edges.iter().copied(), vec![], None).unwrap()
    }

    #[test]
    fn isolated_pair_has_one_ground_state() {
        let mut b = GraphBuilder::new(1);
        b.data_qubit(0, 2).unwrap();
        let g1 = b.finish(None).unwrap();
        let gs =
            enumerate_ground_configs(&g1, &EnergyModel::hard_blockade(), &SearchLimits::default())
                .unwrap();
        assert_eq!(gs.energy, -2.0);
        assert_eq!(gs.configs, vec![vec![1, 1]]);
    }

    #[test]
    fn single_atom() {
        let gs = enumerate_ground_configs(
            &graph(1, &[]),
            &EnergyModel::hard_blockade(),
            &SearchLimits::default(),
        )
        .unwrap();
        assert_eq!((gs.energy, gs.configs), (-1.0, vec![vec![1]]));
    }

    #[test]
    fn four_cycle_has_two_maximum_sets() {
        // x1 - W1 - x2 - W2 - x1
        let g = graph(4, &[(0, 2), (2, 1), (1, 3), (3, 0)]);
        let gs =
            enumerate_ground_configs(&g, &EnergyModel::hard_blockade(), &SearchLimits::default())
                .unwrap();
        assert_eq!(gs.energy, -2.0);
        assert_eq!(gs.configs, vec![bits("0011"), bits("1100")]);
    }

    #[test]
    fn cap_is_enforced() {
        let g = graph(70, &[]);
        let err =
            enumerate_ground_configs(&g, &EnergyModel::hard_blockade(), &SearchLimits::default());
        assert_eq!(err, Err(SolverError::CapExceeded { atoms: 70, cap: 64 }));
        let limits = SearchLimits {
            exact_cap: 100,
            ..Default::default()
        };
        let gs = enumerate_ground_configs(&g, &EnergyModel::hard_blockade(), &limits).unwrap();
        assert_eq!(gs.energy, -70.0);
    }

    #[test]
    fn soft_model_requires_mis_condition() {
        assert!(EnergyModel::soft_penalty(1.0, 0.5).is_err());
        assert!(EnergyModel::soft_penalty(0.0, 2.0).is_err());
        assert!(EnergyModel::soft_penalty(1.0, 2.0).is_ok());
    }

    #[test]
    fn weak_penalty_admits_violations() {
        // Triangle with U barely above Δ: exciting all three costs 3U - 3Δ
        // which is above -Δ, so the ground states stay single excitations.
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let m = EnergyModel::soft_penalty(1.0, 1.2).unwrap();
        let gs = enumerate_ground_configs(&g, &m, &SearchLimits::default()).unwrap();
        assert_eq!(gs.configs.len(), 3);
        // Path of three with U = 1.5Δ: 111 costs -3 + 3 = 0, 101 costs -2.
        let g = graph(3, &[(0, 1), (1, 2)]);
        let m = EnergyModel::soft_penalty(2.0, 3.0).unwrap();
        let gs = enumerate_ground_configs(&g, &m, &SearchLimits::default()).unwrap();
        assert_eq!(gs.energy, -2.0);
        assert_eq!(gs.configs, vec![bits("101")]);
    }

    #[test]
    fn wire_table_examples() {
        assert_eq!(wire_table(Parity::Even, 1, (1, 1)).unwrap().energy, 0);
        let row = wire_table(Parity::Odd, 0, (0, 0)).unwrap();
        assert_eq!((row.energy, row.configs), (-1, vec![vec![1]]));
        let row = wire_table(Parity::Even, 3, (0, 0)).unwrap();
        assert_eq!(row.energy, -3);
        assert!(row.configs.len() >= 2);
        assert!(wire_table(Parity::Even, 0, (0, 0)).is_err());
    }

    #[test]
    fn wire_table_even_m2_and_odd_m1() {
        let even: Vec<i64> = [(1, 1), (1, 0), (0, 1), (0, 0)]
            .iter()
            .map(|&e| wire_table(Parity::Even, 2, e).unwrap().energy)
            .collect();
        assert_eq!(even, [-1, -2, -2, -2]);
        let odd: Vec<i64> = [(1, 1), (1, 0), (0, 1), (0, 0)]
            .iter()
            .map(|&e| wire_table(Parity::Odd, 1, e).unwrap().energy)
            .collect();
        assert_eq!(odd, [-1, -1, -1, -2]);
    }

    #[test]
    fn certify_detects_a_deleted_edge() {
        // f_NOT = -x1 - x2 + 2 x1 x2 compiles to a six-cycle.
        let q = QuboInstance::new(2, [(0, -1), (1, -1)], [((0, 1), 2)]).unwrap();
        let g = compile(&q, &WireLengthPolicy::default()).unwrap();
        let limits = SearchLimits::default();
        assert!(certify_equivalence(&q, &g, &limits).unwrap().pass);
        let w1 = g.wire_atoms(1);
        let broken = g.without_edge(w1[0], w1[1]).unwrap();
        let report = certify_equivalence(&q, &broken, &limits).unwrap();
        assert!(!report.pass);
        assert_eq!(
            report.counterexamples,
            vec![Counterexample::Extra {
                assignment: Assignment::from([0, 0])
            }]
        );
    }

    #[test]
    fn certify_reports_inconsistent_ground_states() {
        // Two copies of x1, one of them pinned by an extra wire atom.
        let mut b = GraphBuilder::new(1);
        b.data_qubit(0, 2).unwrap();
        let g = b.finish(None).unwrap();
        let q = QuboInstance::new(1, [(0, -2)], []).unwrap();
        let mut atoms = g.atoms().to_vec();
        atoms.push(crate::graph::Atom {
            role: crate::graph::AtomRole::Offset { var: 0, offset: 1 },
            label: "a1".into(),
        });
        atoms.push(crate::graph::Atom {
            role: crate::graph::AtomRole::Offset { var: 0, offset: 2 },
            label: "a2".into(),
        });
        let g = AtomGraph::from_parts(1, atoms, [(0, 2), (0, 3)], vec![], None).unwrap();
        let report = certify_equivalence(&q, &g, &SearchLimits::default()).unwrap();
        assert!(!report.pass);
        assert!(matches!(
            report.counterexamples[0],
            Counterexample::Inconsistent { var: 1, .. }
        ));
    }

    #[test]
    fn mwis_expansion_of_the_weighted_path() {
        let wg = WeightedGraph::new(vec![1, 2, 1], vec![(0, 1), (1, 2)]).unwrap();
        let g = mwis_expand(&wg).unwrap();
        assert_eq!((g.num_atoms(), g.num_edges()), (4, 4));
        let sols = mwis_solutions(&wg, &SearchLimits::default()).unwrap();
        assert_eq!(
            sols,
            BTreeSet::from([Assignment::from([1, 0, 1]), Assignment::from([0, 1, 0])])
        );
    }

    #[test]
    fn mwis_unit_weights_is_identity() {
        let wg = WeightedGraph::new(vec![1, 1, 1], vec![(0, 1)]).unwrap();
        let g = mwis_expand(&wg).unwrap();
        assert_eq!(
            (g.num_atoms(), g.edges().collect::<Vec<_>>()),
            (3, vec![(0, 1)])
        );
    }

    #[test]
    fn mwis_rejects_zero_weight() {
        assert_eq!(
            WeightedGraph::new(vec![1, 0], vec![]),
            Err(SolverError::BadWeight(1))
        );
        assert!(WeightedGraph::new(vec![1, 1], vec![(0, 0)]).is_err());
    }
}
