//! Atom coordinates and the blockade-radius arithmetic that turns them into
//! graph edges.
//!
//! Units: lengths in µm, frequencies and energies in (2π)·MHz, `C₆` in
//! (2π)·MHz·µm⁶.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AtomGraph, AtomId};

/// `C₆` of the 71S Rydberg state, 1023 (2π)·GHz·µm⁶.
pub const C6_RB71S: f64 = 1023.0e3;
pub const RABI_FREQUENCY: f64 = 0.96;
pub const DETUNING_INITIAL: f64 = -4.0;
pub const DETUNING_FINAL: f64 = 5.0;
/// Rounded blockade radius used to derive edges of the bundled layouts.
pub const LAYOUT_BLOCKADE_RADIUS: f64 = 7.7;
pub const DEFAULT_MIN_SPACING: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("both the Rabi frequency and the detuning are zero")]
    NoScale,
    #[error("C6 must be positive, got {0}")]
    BadC6(f64),
    #[error("pair distance must be positive, got {0}")]
    ZeroDistance(f64),
    #[error("layout has {layout} atoms but the graph has {graph}")]
    MissingAtoms { layout: usize, graph: usize },
    #[error("no valid 2D layout found after {attempts} attempts")]
    NonEmbeddable {
        attempts: usize,
        best: Box<ValidationReport>,
    },
    #[error("malformed layout file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub c6: f64,
    pub omega: f64,
    pub delta: f64,
}

impl PhysicalParams {
    pub fn new(c6: f64, omega: f64, delta: f64) -> Result<Self, GeometryError> {
        if !(c6 > 0.0) {
            return Err(GeometryError::BadC6(c6));
        }
        Ok(PhysicalParams { c6, omega, delta })
    }

    /// End-of-sweep parameters: `Ω = 0`, `Δ = Δ_f`.
    pub fn final_point() -> Self {
        PhysicalParams {
            c6: C6_RB71S,
            omega: 0.0,
            delta: DETUNING_FINAL,
        }
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams::final_point()
    }
}

/// `d_R = (C₆ / √(Ω² + Δ²))^{1/6}`.
pub fn blockade_radius(p: &PhysicalParams) -> Result<f64, GeometryError> {
    if !(p.c6 > 0.0) {
        return Err(GeometryError::BadC6(p.c6));
    }
    let scale = p.omega.hypot(p.delta);
    if scale == 0.0 {
        return Err(GeometryError::NoScale);
    }
    Ok((p.c6 / scale).powf(1.0 / 6.0))
}

/// van der Waals interaction `C₆ / r⁶`.
pub fn pair_interaction(p: &PhysicalParams, r: f64) -> Result<f64, GeometryError> {
    if !(r > 0.0) {
        return Err(GeometryError::ZeroDistance(r));
    }
    Ok(p.c6 / r.powi(6))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    positions: Vec<(f64, f64)>,
}

impl Layout {
    pub fn new(positions: Vec<(f64, f64)>) -> Self {
        Layout { positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, id: AtomId) -> (f64, f64) {
        self.positions[id]
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn set_position(&mut self, id: AtomId, p: (f64, f64)) {
        self.positions[id] = p;
    }

    pub fn distance(&self, a: AtomId, b: AtomId) -> f64 {
        let (p, q) = (self.positions[a], self.positions[b]);
        (p.0 - q.0).hypot(p.1 - q.1)
    }

    pub fn centroid(&self) -> (f64, f64) {
        let n = self.positions.len().max(1) as f64;
        let (sx, sy) = self
            .positions
            .iter()
            .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
        (sx / n, sy / n)
    }

    /// Copy with atom `id` moved `shift` µm away from the centroid, or along
    /// `+x` when it sits on the centroid.
    pub fn shifted_radially(&self, id: AtomId, shift: f64) -> Layout {
        let (cx, cy) = self.centroid();
        let (x, y) = self.positions[id];
        let r = (x - cx).hypot(y - cy);
        let (ux, uy) = if r < 1e-12 {
            (1.0, 0.0)
        } else {
            ((x - cx) / r, (y - cy) / r)
        };
        let mut out = self.clone();
        out.positions[id] = (x + shift * ux, y + shift * uy);
        out
    }

    /// Unit-disk edges: pairs at distance `≤ radius`.
    pub fn unit_disk_edges(&self, radius: f64) -> Vec<(AtomId, AtomId)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.distance(a, b) <= radius {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// `id,x,y` rows with an optional leading `# ...` comment and header.
    pub fn to_csv(&self, labels: Option<&[&str]>) -> String {
        let mut out = String::new();
        if let Some(labels) = labels {
            out.push_str(&format!("# atoms: {}\n", labels.join(",")));
        }
        out.push_str("id,x,y\n");
        for (id, (x, y)) in self.positions.iter().enumerate() {
            out.push_str(&format!("{id},{x},{y}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, GeometryError> {
        #[derive(Deserialize)]
        struct Row {
            id: usize,
            x: f64,
            y: f64,
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows: Vec<Row> = reader
            .deserialize()
            .collect::<Result<_, _>>()
            .map_err(|e| GeometryError::Parse(e.to_string()))?;
        rows.sort_by_key(|r| r.id);
        if rows.iter().enumerate().any(|(k, r)| r.id != k) {
            return Err(GeometryError::Parse(
                "atom ids must be 0..n without gaps".into(),
            ));
        }
        Ok(Layout::new(rows.into_iter().map(|r| (r.x, r.y)).collect()))
    }

    pub fn to_json(&self) -> String {
        let atoms: Vec<_> = self
            .positions
            .iter()
            .enumerate()
            .map(|(id, &(x, y))| serde_json::json!({"id": id, "x": x, "y": y}))
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({ "atoms": atoms }))
            .expect("layout serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        #[derive(Deserialize)]
        struct Row {
            id: usize,
            x: f64,
            y: f64,
        }
        #[derive(Deserialize)]
        struct File {
            atoms: Vec<Row>,
        }
        let mut file: File =
            serde_json::from_str(text).map_err(|e| GeometryError::Parse(e.to_string()))?;
        file.atoms.sort_by_key(|r| r.id);
        if file.atoms.iter().enumerate().any(|(k, r)| r.id != k) {
            return Err(GeometryError::Parse(
                "atom ids must be 0..n without gaps".into(),
            ));
        }
        Ok(Layout::new(
            file.atoms.into_iter().map(|r| (r.x, r.y)).collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub a: AtomId,
    pub b: AtomId,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub radius: f64,
    pub margin: f64,
    /// Edges longer than the radius, worst first.
    pub long_edges: Vec<PairReport>,
    /// Non-edges within `radius·(1 + margin)`, worst first.
    pub short_non_edges: Vec<PairReport>,
    /// Pairs closer than the minimum spacing.
    pub crowded: Vec<PairReport>,
    pub max_edge_distance: Option<f64>,
    pub min_non_edge_distance: Option<f64>,
    /// `radius - max_edge_distance`; negative when an edge is too long.
    pub edge_slack: Option<f64>,
    /// `min_non_edge_distance - radius·(1 + margin)`.
    pub non_edge_slack: Option<f64>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Checks that `layout` realizes exactly the edges of `graph` as a unit-disk
/// graph of the given radius. Edges must satisfy `d ≤ radius`; non-edges
/// must satisfy `d > radius·(1 + margin)`.
pub fn validate_unit_disk(
    graph: &AtomGraph,
    layout: &Layout,
    radius: f64,
    margin: f64,
) -> Result<ValidationReport, GeometryError> {
    validate_with_spacing(graph, layout, radius, margin, DEFAULT_MIN_SPACING)
}

/// [`validate_unit_disk`] with the radius taken from physical parameters.
pub fn validate_unit_disk_physical(
    graph: &AtomGraph,
    layout: &Layout,
    p: &PhysicalParams,
    margin: f64,
) -> Result<ValidationReport, GeometryError> {
    validate_unit_disk(graph, layout, blockade_radius(p)?, margin)
}

pub fn validate_with_spacing(
    graph: &AtomGraph,
    layout: &Layout,
    radius: f64,
    margin: f64,
    min_spacing: f64,
) -> Result<ValidationReport, GeometryError> {
    if layout.len() != graph.num_atoms() {
        return Err(GeometryError::MissingAtoms {
            layout: layout.len(),
            graph: graph.num_atoms(),
        });
    }
    let outer = radius * (1.0 + margin);
    let n = layout.len();
    let mut long_edges = Vec::new();
    let mut short_non_edges = Vec::new();
    let mut crowded = Vec::new();
    let mut max_edge: Option<f64> = None;
    let mut min_non_edge: Option<f64> = None;
    for a in 0..n {
        for b in a + 1..n {
            let d = layout.distance(a, b);
            let pair = PairReport { a, b, distance: d };
            if d < min_spacing {
                crowded.push(pair.clone());
            }
            if graph.has_edge(a, b) {
                max_edge = Some(max_edge.map_or(d, |m| m.max(d)));
                if d > radius {
                    long_edges.push(pair);
                }
            } else {
                min_non_edge = Some(min_non_edge.map_or(d, |m| m.min(d)));
                if d <= outer {
                    short_non_edges.push(pair);
                }
            }
        }
    }
    long_edges.sort_by(|x, y| y.distance.total_cmp(&x.distance));
    short_non_edges.sort_by(|x, y| x.distance.total_cmp(&y.distance));
    crowded.sort_by(|x, y| x.distance.total_cmp(&y.distance));
    Ok(ValidationReport {
        valid: long_edges.is_empty() && short_non_edges.is_empty() && crowded.is_empty(),
        radius,
        margin,
        long_edges,
        short_non_edges,
        crowded,
        max_edge_distance: max_edge,
        min_non_edge_distance: min_non_edge,
        edge_slack: max_edge.map(|d| radius - d),
        non_edge_slack: min_non_edge.map(|d| d - outer),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoLayoutOptions {
    pub restarts: usize,
    pub iterations: usize,
    /// Margin passed to the final validation.
    pub margin: f64,
}

impl Default for AutoLayoutOptions {
    fn default() -> Self {
        AutoLayoutOptions {
            restarts: 24,
            iterations: 3000,
            margin: 0.0,
        }
    }
}

/// Force-directed placement: edges relax toward `0.95·d_R`, non-edges are
/// pushed beyond `1.2·d_R`, and every pair is kept apart by the minimum
/// spacing. Returns the first layout that validates.
pub fn auto_layout(
    graph: &AtomGraph,
    p: &PhysicalParams,
    seed: u64,
    options: &AutoLayoutOptions,
) -> Result<Layout, GeometryError> {
    let radius = blockade_radius(p)?;
    let n = graph.num_atoms();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<ValidationReport> = None;
    let attempts = options.restarts.max(1);
    for _ in 0..attempts {
        let side = radius * (n as f64).sqrt().max(1.0);
        let mut pos: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0.0..side), rng.gen_range(0.0..side)))
            .collect();
        relax(graph, &mut pos, radius, options.iterations);
        let layout = Layout::new(pos);
        let report = validate_unit_disk(graph, &layout, radius, options.margin)?;
        if report.valid {
            return Ok(layout);
        }
        let violations =
            |r: &ValidationReport| r.long_edges.len() + r.short_non_edges.len() + r.crowded.len();
        if best
            .as_ref()
            .map_or(true, |b| violations(&report) < violations(b))
        {
            best = Some(report);
        }
    }
    Err(GeometryError::NonEmbeddable {
        attempts,
        best: Box::new(best.expect("at least one attempt")),
    })
}

fn relax(graph: &AtomGraph, pos: &mut [(f64, f64)], radius: f64, iterations: usize) {
    let n = pos.len();
    let edge_target = 0.95 * radius;
    let repel_target = 1.2 * radius;
    let mut step = 0.2;
    for _ in 0..iterations {
        let mut force = vec![(0.0, 0.0); n];
        for a in 0..n {
            for b in a + 1..n {
                let dx = pos[b].0 - pos[a].0;
                let dy = pos[b].1 - pos[a].1;
                let d = dx.hypot(dy).max(1e-6);
                let (ux, uy) = (dx / d, dy / d);
                let mut f = 0.0;
                if graph.has_edge(a, b) {
                    f += d - edge_target;
                } else if d < repel_target {
                    f += d - repel_target;
                }
                if d < DEFAULT_MIN_SPACING * 1.1 {
                    f += d - DEFAULT_MIN_SPACING * 1.1;
                }
                // positive f pulls a toward b
                force[a].0 += f * ux;
                force[a].1 += f * uy;
                force[b].0 -= f * ux;
                force[b].1 -= f * uy;
            }
        }
        for (p, f) in pos.iter_mut().zip(&force) {
            p.0 += step * f.0;
            p.1 += step * f.1;
        }
        step = (step * 0.999).max(0.02);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::GraphBuilder;

    fn plain_graph(n: usize, edges: &[(usize, usize)]) -> AtomGraph {
        let mut b = GraphBuilder::new(n);
        for v in 0..n {
            b.data_qubit(v, 1).unwrap();
        }
        let g = b.finish(None).unwrap();
        AtomGraph::from_parts(n, g.atoms().to_vec(), edges.iter().copied(), vec![], None).unwrap()
    }

    #[test]
    fn blockade_radius_examples() {
        let r = blockade_radius(&PhysicalParams::final_point()).unwrap();
        assert!((r - 7.7).abs() < 0.05, "{r}");
        let unit = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        assert_eq!(blockade_radius(&unit).unwrap(), 1.0);
        // (1023000 / hypot(0.96, 5.0))^(1/6)
        let driven = PhysicalParams::new(C6_RB71S, 0.96, 5.0).unwrap();
        assert!((blockade_radius(&driven).unwrap() - 7.65316).abs() < 1e-4);
        let dead = PhysicalParams::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(blockade_radius(&dead), Err(GeometryError::NoScale));
        assert!(PhysicalParams::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn blockade_radius_decreases_with_drive() {
        let mut last = f64::INFINITY;
        for k in 1..20 {
            let p = PhysicalParams::new(C6_RB71S, 0.1 * k as f64, 0.5 * k as f64).unwrap();
            let r = blockade_radius(&p).unwrap();
            assert!(r < last);
            last = r;
        }
    }

    #[test]
    fn pair_interaction_examples() {
        let p = PhysicalParams::final_point();
        let r = blockade_radius(&p).unwrap();
        let u = pair_interaction(&p, r).unwrap();
        assert!((u - p.omega.hypot(p.delta)).abs() < 1e-9);
        // 1023000 / 7.6^6
        assert!((pair_interaction(&p, 7.6).unwrap() - 5.308772).abs() < 1e-5);
        let ratio = pair_interaction(&p, 5.0).unwrap() / pair_interaction(&p, 10.0).unwrap();
        assert!((ratio - 64.0).abs() < 1e-9);
        assert!(pair_interaction(&p, 0.0).is_err());
    }

    #[test]
    fn radial_shift() {
        let layout = Layout::new(vec![(0.0, 0.0), (4.0, 0.0), (2.0, 3.0), (2.0, -3.0)]);
        // centroid (2, 0)
        assert_eq!(layout.shifted_radially(0, 2.5).position(0), (-2.5, 0.0));
        assert_eq!(layout.shifted_radially(2, 1.0).position(2), (2.0, 4.0));
        let centered = Layout::new(vec![(1.0, 1.0)]);
        assert_eq!(centered.shifted_radially(0, 2.0).position(0), (3.0, 1.0));
    }

    #[test]
    fn far_apart_edge_is_invalid() {
        let g = plain_graph(2, &[(0, 1)]);
        let layout = Layout::new(vec![(0.0, 0.0), (15.4, 0.0)]);
        let report = validate_unit_disk(&g, &layout, 7.7, 0.0).unwrap();
        assert!(!report.valid);
        assert_eq!(report.long_edges.len(), 1);
        assert!(report.edge_slack.unwrap() < 0.0);
    }

    #[test]
    fn margin_applies_to_non_edges_only() {
        let g = plain_graph(3, &[(0, 1)]);
        let layout = Layout::new(vec![(0.0, 0.0), (7.6, 0.0), (0.0, 8.0)]);
        assert!(validate_unit_disk(&g, &layout, 7.7, 0.0).unwrap().valid);
        let report = validate_unit_disk(&g, &layout, 7.7, 0.1).unwrap();
        assert!(!report.valid);
        assert_eq!(report.short_non_edges.len(), 1);
        assert!(report.long_edges.is_empty());
    }

    #[test]
    fn crowded_atoms_are_reported() {
        let g = plain_graph(2, &[(0, 1)]);
        let layout = Layout::new(vec![(0.0, 0.0), (1.0, 0.0)]);
        let report = validate_unit_disk(&g, &layout, 7.7, 0.0).unwrap();
        assert!(!report.valid);
        assert_eq!(report.crowded.len(), 1);
    }

    #[test]
    fn missing_atoms() {
        let g = plain_graph(2, &[]);
        assert_eq!(
            validate_unit_disk(&g, &Layout::new(vec![(0.0, 0.0)]), 7.7, 0.0),
            Err(GeometryError::MissingAtoms {
                layout: 1,
                graph: 2
            })
        );
    }

    #[test]
    fn csv_and_json_roundtrip() {
        let layout = Layout::new(vec![(0.0, 7.6), (-3.25, 1e-3)]);
        assert_eq!(
            Layout::from_csv(&layout.to_csv(Some(&["a", "b"]))).unwrap(),
            layout
        );
        assert_eq!(Layout::from_json(&layout.to_json()).unwrap(), layout);
        assert!(Layout::from_csv("id,x,y\n1,0,0\n").is_err());
    }

    #[test]
    fn auto_layout_path_and_star() {
        let p = PhysicalParams::final_point();
        for edges in [vec![(0, 1), (1, 2)], vec![(0, 1), (0, 2), (0, 3)]] {
            let g = plain_graph(edges.len() + 1, &edges);
            let layout = auto_layout(&g, &p, 7, &AutoLayoutOptions::default()).unwrap();
            let r = blockade_radius(&p).unwrap();
            assert!(validate_unit_disk(&g, &layout, r, 0.0).unwrap().valid);
        }
    }

    #[test]
    fn auto_layout_is_deterministic() {
        let p = PhysicalParams::final_point();
        let g = plain_graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let opts = AutoLayoutOptions::default();
        assert_eq!(
            auto_layout(&g, &p, 11, &opts).unwrap(),
            auto_layout(&g, &p, 11, &opts).unwrap()
        );
    }

    #[test]
    fn seven_leaf_star_is_not_embeddable() {
        // A unit disk holds at most five mutually non-adjacent neighbors.
        let edges: Vec<_> = (1..8).map(|k| (0, k)).collect();
        let g = plain_graph(8, &edges);
        let opts = AutoLayoutOptions {
            restarts: 4,
            iterations: 1500,
            margin: 0.0,
        };
        match auto_layout(&g, &PhysicalParams::final_point(), 3, &opts) {
            Err(GeometryError::NonEmbeddable { attempts, best }) => {
                assert_eq!(attempts, 4);
                assert!(!best.valid);
            }
            other => panic!("expected NonEmbeddable, got {other:?}"),
        }
    }

    #[test]
    fn dense_graph_report_is_well_formed() {
        let mut edges = Vec::new();
        for a in 0..5 {
            for b in a + 1..5 {
                edges.push((a, b));
            }
        }
        let g = plain_graph(5, &edges);
        let p = PhysicalParams::final_point();
        match auto_layout(&g, &p, 5, &AutoLayoutOptions::default()) {
            Ok(layout) => {
                let r = blockade_radius(&p).unwrap();
                assert!(validate_unit_disk(&g, &layout, r, 0.0).unwrap().valid);
            }
            Err(GeometryError::NonEmbeddable { best, .. }) => assert!(!best.valid),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
