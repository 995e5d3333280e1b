//! Colored graphs, graph states, and the k-round graph state measurement
//! problem with transcript verification.
//!
//! A problem instance is a graph whose vertices are colored by rounds. In
//! round `i` the device receives an X-or-Y basis for every color-`i` vertex
//! and must output signs for them. A transcript is accepted when the claimed
//! outcomes have non-zero probability, which for stabilizer states reduces
//! to sequentially forcing every outcome and watching for contradictions.

use crate::pauli::{PauliString, Sign};
use crate::tableau::{graph_state_tableau, MeasureError, StabilizerTableau};
use rand::Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// Measurement basis offered by the problem: X or Y.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum MeasBasis {
    X,
    Y,
}

impl MeasBasis {
    pub fn observable(self, n: usize, v: usize) -> PauliString {
        match self {
            MeasBasis::X => PauliString::x(n, v),
            MeasBasis::Y => PauliString::y(n, v),
        }
    }

    pub fn letter(self) -> char {
        match self {
            MeasBasis::X => 'X',
            MeasBasis::Y => 'Y',
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0},{1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("duplicate edge ({0},{1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("vertex {vertex} colored {color}, but the instance has {rounds} rounds")]
    ColorOutOfRange {
        vertex: usize,
        color: usize,
        rounds: usize,
    },
}

/// A graph with a round coloring and a verified degree bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// round index per vertex, 0-based
    coloring: Vec<usize>,
    max_degree: usize,
    /// grid dimensions when the graph came from a grid family
    grid: Option<(usize, usize)>,
}

impl ColoredGraph {
    pub fn new(
        n: usize,
        mut edges: Vec<(usize, usize)>,
        coloring: Vec<usize>,
    ) -> Result<Self, GraphError> {
        assert_eq!(coloring.len(), n, "coloring must be total");
        for e in edges.iter_mut() {
            if e.0 == e.1 {
                return Err(GraphError::SelfLoop(e.0, e.1));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
            if e.1 >= n {
                return Err(GraphError::VertexOutOfRange(e.1));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut deg = vec![0usize; n];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        let max_degree = deg.into_iter().max().unwrap_or(0);
        Ok(ColoredGraph {
            n,
            edges,
            coloring,
            max_degree,
            grid: None,
        })
    }

    /// A w-column, h-row grid with nearest-neighbor edges. Vertex (c, r) has
    /// index `c*h + r`. All columns except the last are round 1; the last
    /// column is round 2.
    pub fn grid(w: usize, h: usize) -> Self {
        let n = w * h;
        let idx = |c: usize, r: usize| c * h + r;
        let mut edges = Vec::new();
        for c in 0..w {
            for r in 0..h {
                if r + 1 < h {
                    edges.push((idx(c, r), idx(c, r + 1)));
                }
                if c + 1 < w {
                    edges.push((idx(c, r), idx(c + 1, r)));
                }
            }
        }
        let coloring = (0..n).map(|v| usize::from(v / h == w - 1)).collect();
        let mut g = ColoredGraph::new(n, edges, coloring).unwrap();
        g.grid = Some((w, h));
        g
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn coloring(&self) -> &[usize] {
        &self.coloring
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn grid_dims(&self) -> Option<(usize, usize)> {
        self.grid
    }

    /// Vertices of round `i` in ascending order.
    pub fn round_vertices(&self, round: usize) -> Vec<usize> {
        (0..self.n).filter(|&v| self.coloring[v] == round).collect()
    }
}

/// A colored graph plus its round count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphProblemInstance {
    pub graph: ColoredGraph,
    pub rounds: usize,
}

impl GraphProblemInstance {
    pub fn new(graph: ColoredGraph, rounds: usize) -> Result<Self, GraphError> {
        for (v, &c) in graph.coloring.iter().enumerate() {
            if c >= rounds {
                return Err(GraphError::ColorOutOfRange {
                    vertex: v,
                    color: c,
                    rounds,
                });
            }
        }
        Ok(GraphProblemInstance { graph, rounds })
    }
}

/// Per-round measurement bases and claimed outcomes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    /// One map per round: vertex -> (basis, outcome).
    pub rounds: Vec<BTreeMap<usize, (MeasBasis, Sign)>>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TranscriptError {
    #[error("transcript has {got} rounds, instance expects {want}")]
    RoundCountMismatch { got: usize, want: usize },
    #[error("round {round} covers the wrong vertex set")]
    DomainMismatch { round: usize },
    #[error("measurement bookkeeping failed: {0}")]
    Measure(#[from] MeasureError),
}

/// Build the graph state `∏_{(i,j)∈E} CZ(i,j) |+>^{⊗n}`: stabilizers
/// `X_v ∏_{u~v} Z_u`.
pub fn build_graph_state(g: &ColoredGraph) -> StabilizerTableau {
    graph_state_tableau(g.n, &g.edges)
}

/// Accept iff the transcript's outcomes could occur with non-zero
/// probability: force each round's outcomes in ascending vertex order and
/// watch for contradictions. Malformed transcripts are an error, distinct
/// from rejection.
pub fn verify_transcript(
    inst: &GraphProblemInstance,
    t: &Transcript,
) -> Result<bool, TranscriptError> {
    verify_transcript_ordered(inst, t, |vs| vs.to_vec())
}

/// Same as [`verify_transcript`] but with a caller-chosen forcing order
/// inside each round; accept/reject does not depend on it (the measured
/// observables within a round commute).
pub fn verify_transcript_ordered(
    inst: &GraphProblemInstance,
    t: &Transcript,
    order: impl Fn(&[usize]) -> Vec<usize>,
) -> Result<bool, TranscriptError> {
    if t.rounds.len() != inst.rounds {
        return Err(TranscriptError::RoundCountMismatch {
            got: t.rounds.len(),
            want: inst.rounds,
        });
    }
    let n = inst.graph.num_vertices();
    for (round, record) in t.rounds.iter().enumerate() {
        let expected = inst.graph.round_vertices(round);
        if record.keys().copied().collect::<Vec<_>>() != expected {
            return Err(TranscriptError::DomainMismatch { round });
        }
    }
    let mut tab = build_graph_state(&inst.graph);
    // forcing needs no randomness; the rng is never consulted
    let mut rng = rand::rngs::mock::StepRng::new(0, 0);
    for record in &t.rounds {
        let vertices: Vec<usize> = record.keys().copied().collect();
        for v in order(&vertices) {
            let (basis, sign) = record[&v];
            let obs = basis.observable(n, v);
            match tab.measure_pauli(&obs, Some(sign), &mut rng) {
                Ok(_) => {}
                Err(MeasureError::Contradiction { .. }) => return Ok(false),
                Err(e) => return Err(TranscriptError::Measure(e)),
            }
        }
    }
    Ok(true)
}

/// Run the honest quantum device: measure each round's vertices in the given
/// bases with natural randomness and record the outcomes.
pub fn honest_transcript(
    inst: &GraphProblemInstance,
    bases: &[BTreeMap<usize, MeasBasis>],
    rng: &mut impl Rng,
) -> Transcript {
    assert_eq!(bases.len(), inst.rounds);
    let n = inst.graph.num_vertices();
    let mut tab = build_graph_state(&inst.graph);
    let mut rounds = Vec::with_capacity(inst.rounds);
    for round_bases in bases {
        let mut record = BTreeMap::new();
        for (&v, &basis) in round_bases {
            let obs = basis.observable(n, v);
            let (sign, _) = tab.measure(&obs, rng).expect("valid observable");
            record.insert(v, (basis, sign));
        }
        rounds.push(record);
    }
    Transcript { rounds }
}

/// Uniformly random bases for every round of an instance.
pub fn random_bases(
    inst: &GraphProblemInstance,
    rng: &mut impl Rng,
) -> Vec<BTreeMap<usize, MeasBasis>> {
    (0..inst.rounds)
        .map(|round| {
            inst.graph
                .round_vertices(round)
                .into_iter()
                .map(|v| {
                    let b = if rng.gen::<bool>() {
                        MeasBasis::X
                    } else {
                        MeasBasis::Y
                    };
                    (v, b)
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// text formats (version 1): bit-exact round-trip required
// ---------------------------------------------------------------------------

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("graph construction: {0}")]
    Graph(#[from] GraphError),
}

/// Serialize an instance: header `k W H` (W, H are grid dimensions, `0 0`
/// for non-grid graphs), one `v <idx> <color>` line per vertex, then
/// `e <u> <v>` lines in canonical order.
pub fn write_instance(inst: &GraphProblemInstance) -> String {
    let g = &inst.graph;
    let (w, h) = g.grid_dims().unwrap_or((0, 0));
    let mut out = format!("{} {} {}\n", inst.rounds, w, h);
    for v in 0..g.num_vertices() {
        out.push_str(&format!("v {} {}\n", v, g.coloring[v] + 1));
    }
    for &(a, b) in g.edges() {
        out.push_str(&format!("e {a} {b}\n"));
    }
    out
}

pub fn read_instance(text: &str) -> Result<GraphProblemInstance, FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| FormatError::Parse(0, "empty input".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(FormatError::Parse(1, "header must be `k W H`".into()));
    }
    let parse = |s: &str, ln: usize| {
        s.parse::<usize>()
            .map_err(|e| FormatError::Parse(ln, e.to_string()))
    };
    let k = parse(parts[0], 1)?;
    let (w, h) = (parse(parts[1], 1)?, parse(parts[2], 1)?);
    let mut colors: Vec<(usize, usize)> = Vec::new();
    let mut edges = Vec::new();
    for (i, line) in lines {
        let ln = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["v", v, c] => {
                let c = parse(c, ln)?;
                if c == 0 {
                    return Err(FormatError::Parse(ln, "colors are 1-based".into()));
                }
                colors.push((parse(v, ln)?, c - 1));
            }
            ["e", a, b] => edges.push((parse(a, ln)?, parse(b, ln)?)),
            [] => {}
            _ => return Err(FormatError::Parse(ln, format!("bad line: {line}"))),
        }
    }
    let n = colors.len();
    let mut coloring = vec![0usize; n];
    for (v, c) in colors {
        if v >= n {
            return Err(FormatError::Parse(0, format!("vertex {v} out of range")));
        }
        coloring[v] = c;
    }
    let mut g = ColoredGraph::new(n, edges, coloring)?;
    if w > 0 && h > 0 {
        g.grid = Some((w, h));
    }
    let inst = GraphProblemInstance::new(g, k)?;
    Ok(inst)
}

/// Serialize a transcript: per round, `b`/`o` lines in vertex order.
pub fn write_transcript(t: &Transcript) -> String {
    let mut out = format!("rounds {}\n", t.rounds.len());
    for (i, record) in t.rounds.iter().enumerate() {
        out.push_str(&format!("round {}\n", i + 1));
        for (&v, &(basis, _)) in record {
            out.push_str(&format!("b {} {}\n", v, basis.letter()));
        }
        for (&v, &(_, sign)) in record {
            out.push_str(&format!("o {} {}\n", v, sign));
        }
    }
    out
}

pub fn read_transcript(text: &str) -> Result<Transcript, FormatError> {
    let mut rounds: Vec<BTreeMap<usize, (MeasBasis, Sign)>> = Vec::new();
    let mut bases: BTreeMap<usize, MeasBasis> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["rounds", _] => {}
            ["round", _] => {
                bases.clear();
                rounds.push(BTreeMap::new());
            }
            ["b", v, b] => {
                let v = v
                    .parse::<usize>()
                    .map_err(|e| FormatError::Parse(ln, e.to_string()))?;
                let basis = match *b {
                    "X" => MeasBasis::X,
                    "Y" => MeasBasis::Y,
                    _ => return Err(FormatError::Parse(ln, format!("bad basis {b}"))),
                };
                bases.insert(v, basis);
            }
            ["o", v, s] => {
                let v = v
                    .parse::<usize>()
                    .map_err(|e| FormatError::Parse(ln, e.to_string()))?;
                let sign = match *s {
                    "+1" => Sign::Plus,
                    "-1" => Sign::Minus,
                    _ => return Err(FormatError::Parse(ln, format!("bad outcome {s}"))),
                };
                let basis = *bases.get(&v).ok_or_else(|| {
                    FormatError::Parse(ln, format!("outcome before basis for {v}"))
                })?;
                rounds
                    .last_mut()
                    .ok_or_else(|| FormatError::Parse(ln, "outcome before any round".into()))?
                    .insert(v, (basis, sign));
            }
            [] => {}
            _ => return Err(FormatError::Parse(ln, format!("bad line: {line}"))),
        }
    }
    Ok(Transcript { rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_vertex_instance() -> GraphProblemInstance {
        let g = ColoredGraph::new(1, vec![], vec![0]).unwrap();
        GraphProblemInstance::new(g, 1).unwrap()
    }

    #[test]
    fn single_vertex_graph_state_is_plus() {
        let g = ColoredGraph::new(1, vec![], vec![0]).unwrap();
        let t = build_graph_state(&g);
        assert_eq!(
            t.deterministic_sign(&PauliString::x(1, 0)),
            Some(Sign::Plus)
        );
    }

    #[test]
    fn reject_minus_x_on_plus_state() {
        // state is |+>: basis X with outcome -1 has probability zero
        let inst = single_vertex_instance();
        let mut record = BTreeMap::new();
        record.insert(0, (MeasBasis::X, Sign::Minus));
        let t = Transcript {
            rounds: vec![record],
        };
        assert_eq!(verify_transcript(&inst, &t), Ok(false));
    }

    #[test]
    fn malformed_transcript_is_an_error_not_reject() {
        let inst = single_vertex_instance();
        let t = Transcript { rounds: vec![] };
        assert!(matches!(
            verify_transcript(&inst, &t),
            Err(TranscriptError::RoundCountMismatch { .. })
        ));
        let t = Transcript {
            rounds: vec![BTreeMap::new()],
        };
        assert!(matches!(
            verify_transcript(&inst, &t),
            Err(TranscriptError::DomainMismatch { round: 0 })
        ));
    }

    #[test]
    fn honest_transcripts_are_accepted_and_order_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = ColoredGraph::grid(3, 2);
        let inst = GraphProblemInstance::new(g, 2).unwrap();
        for _ in 0..50 {
            let bases = random_bases(&inst, &mut rng);
            let t = honest_transcript(&inst, &bases, &mut rng);
            assert_eq!(verify_transcript(&inst, &t), Ok(true));
            let reversed = verify_transcript_ordered(&inst, &t, |vs| {
                let mut v = vs.to_vec();
                v.reverse();
                v
            });
            assert_eq!(reversed, Ok(true));
        }
    }

    #[test]
    fn flipping_a_deterministic_outcome_rejects() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = ColoredGraph::grid(2, 2);
        let inst = GraphProblemInstance::new(g, 2).unwrap();
        let mut found_deterministic_flip = false;
        'outer: for _ in 0..100 {
            let bases = random_bases(&inst, &mut rng);
            let t = honest_transcript(&inst, &bases, &mut rng);
            for round in 0..t.rounds.len() {
                for (&v, &(b, s)) in &t.rounds[round] {
                    let mut t2 = t.clone();
                    t2.rounds[round].insert(v, (b, s.flip()));
                    if verify_transcript(&inst, &t2) == Ok(false) {
                        found_deterministic_flip = true;
                        break 'outer;
                    }
                }
            }
        }
        assert!(found_deterministic_flip);
    }

    #[test]
    fn grid_family_properties() {
        let g = ColoredGraph::grid(4, 2);
        assert_eq!(g.num_vertices(), 8);
        assert!(g.max_degree() <= 4);
        assert_eq!(g.round_vertices(1), vec![6, 7]);
        let dense = build_graph_state(&g);
        // spot-check one stabilizer: X on (0,0) with Z on its two neighbors
        let mut p = PauliString::x(8, 0);
        p.z_mask_mut().set(1, true);
        p.z_mask_mut().set(2, true);
        assert_eq!(dense.deterministic_sign(&p), Some(Sign::Plus));
    }

    #[test]
    fn instance_roundtrip_bit_exact() {
        let g = ColoredGraph::grid(3, 2);
        let inst = GraphProblemInstance::new(g, 2).unwrap();
        let text = write_instance(&inst);
        let back = read_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn transcript_roundtrip_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = ColoredGraph::grid(3, 2);
        let inst = GraphProblemInstance::new(g, 2).unwrap();
        let bases = random_bases(&inst, &mut rng);
        let t = honest_transcript(&inst, &bases, &mut rng);
        let text = write_transcript(&t);
        let back = read_transcript(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(write_transcript(&back), text);
    }
}
