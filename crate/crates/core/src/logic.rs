//! Finite quantum logics presented by Greechie diagrams.
//!
//! A logic is a list of atoms and a list of blocks (maximal contexts). Each
//! block with `k` atoms stands for the Boolean algebra `2^k`; distinct blocks
//! share at most one atom. Events are sums of atoms inside one block, and a
//! state is an exact rational assignment that sums to one on every block.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, is_probability, rat, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("block {block} references unknown atom `{atom}`")]
    UnknownAtom { block: usize, atom: String },
    #[error("atom `{0}` is declared more than once")]
    DuplicateAtom(String),
    #[error("atom `{atom}` appears twice in block {block}")]
    RepeatedAtomInBlock { block: usize, atom: String },
    #[error("atom `{0}` does not belong to any block")]
    UncoveredAtom(String),
    #[error("block {block} has {size} atom(s); every block needs at least 2")]
    BlockTooSmall { block: usize, size: usize },
    #[error("blocks {first} and {second} are identical")]
    DuplicateBlock { first: usize, second: usize },
    #[error("Greechie condition violated: blocks {first} and {second} share {shared} atoms ({atoms})")]
    Greechie {
        first: usize,
        second: usize,
        shared: usize,
        atoms: String,
    },
    #[error("unknown atom `{0}`")]
    NoSuchAtom(String),
    #[error("atoms {0} do not lie in a common block")]
    InvalidEvent(String),
    #[error("expected {expected} atom values, got {found}")]
    AssignmentLength { expected: usize, found: usize },
    #[error("this operation needs the pentagon logic")]
    WrongLogic,
    #[error("invalid state: {0}")]
    InvalidState(StateViolations),
}

#[derive(Debug, Serialize, Deserialize)]
struct LogicFile {
    atoms: Vec<String>,
    blocks: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreechieLogic {
    atoms: Vec<String>,
    blocks: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl GreechieLogic {
    /// Builds and validates a logic from atom names and blocks of atom names.
    pub fn new<S: AsRef<str>>(atoms: &[S], blocks: &[Vec<S>]) -> Result<Self, LogicError> {
        let atoms: Vec<String> = atoms.iter().map(|a| a.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(atoms.len());
        for (i, a) in atoms.iter().enumerate() {
            if index.insert(a.clone(), i).is_some() {
                return Err(LogicError::DuplicateAtom(a.clone()));
            }
        }

        let mut resolved = Vec::with_capacity(blocks.len());
        for (b, block) in blocks.iter().enumerate() {
            let mut ids = Vec::with_capacity(block.len());
            for name in block {
                let name = name.as_ref();
                let &id = index.get(name).ok_or_else(|| LogicError::UnknownAtom {
                    block: b,
                    atom: name.to_string(),
                })?;
                if ids.contains(&id) {
                    return Err(LogicError::RepeatedAtomInBlock {
                        block: b,
                        atom: name.to_string(),
                    });
                }
                ids.push(id);
            }
            if ids.len() < 2 {
                return Err(LogicError::BlockTooSmall {
                    block: b,
                    size: ids.len(),
                });
            }
            resolved.push(ids);
        }

        for (i, a) in atoms.iter().enumerate() {
            if !resolved.iter().any(|b| b.contains(&i)) {
                return Err(LogicError::UncoveredAtom(a.clone()));
            }
        }

        for first in 0..resolved.len() {
            let a: BTreeSet<usize> = resolved[first].iter().copied().collect();
            for second in first + 1..resolved.len() {
                let b: BTreeSet<usize> = resolved[second].iter().copied().collect();
                if a == b {
                    return Err(LogicError::DuplicateBlock { first, second });
                }
                let shared: Vec<&str> = a.intersection(&b).map(|&i| atoms[i].as_str()).collect();
                if shared.len() > 1 {
                    return Err(LogicError::Greechie {
                        first,
                        second,
                        shared: shared.len(),
                        atoms: shared.join(", "),
                    });
                }
            }
        }

        Ok(Self {
            atoms,
            blocks: resolved,
            index,
        })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_index(&self, name: &str) -> Result<usize, LogicError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| LogicError::NoSuchAtom(name.to_string()))
    }

    pub fn atom_name(&self, id: usize) -> &str {
        &self.atoms[id]
    }

    /// Two distinct atoms are orthogonal when some block contains both.
    pub fn orthogonal(&self, a: usize, b: usize) -> bool {
        a != b && self.blocks.iter().any(|blk| blk.contains(&a) && blk.contains(&b))
    }

    /// An event made of the named atoms; they must share a block.
    pub fn event<S: AsRef<str>>(&self, names: &[S]) -> Result<Event, LogicError> {
        let ids = names
            .iter()
            .map(|n| self.atom_index(n.as_ref()))
            .collect::<Result<BTreeSet<_>, _>>()?;
        self.event_from_ids(ids)
    }

    pub fn event_from_ids(&self, ids: BTreeSet<usize>) -> Result<Event, LogicError> {
        if let Some(&bad) = ids.iter().find(|&&i| i >= self.atoms.len()) {
            return Err(LogicError::NoSuchAtom(format!("#{bad}")));
        }
        if ids.len() > 1 && !self.blocks.iter().any(|b| ids.iter().all(|i| b.contains(i))) {
            let names: Vec<&str> = ids.iter().map(|&i| self.atoms[i].as_str()).collect();
            return Err(LogicError::InvalidEvent(format!("{{{}}}", names.join(", "))));
        }
        Ok(Event { atoms: ids })
    }

    /// The event formed by a whole block, i.e. the unit event in that context.
    pub fn block_event(&self, block: usize) -> Event {
        Event {
            atoms: self.blocks[block].iter().copied().collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, LogicError> {
        let file: LogicFile = serde_json::from_str(text).map_err(|e| LogicError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::new(&file.atoms, &file.blocks)
    }

    pub fn to_json(&self) -> String {
        let file = LogicFile {
            atoms: self.atoms.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().map(|&i| self.atoms[i].clone()).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("logic serializes")
    }

    /// Same atoms and the same blocks as sets, ignoring block order.
    pub fn same_structure(&self, other: &GreechieLogic) -> bool {
        let canon = |l: &GreechieLogic| -> BTreeSet<BTreeSet<String>> {
            l.blocks
                .iter()
                .map(|b| b.iter().map(|&i| l.atoms[i].clone()).collect())
                .collect()
        };
        self.atoms.iter().collect::<BTreeSet<_>>() == other.atoms.iter().collect::<BTreeSet<_>>()
            && canon(self) == canon(other)
    }
}

/// Parses a logic file (one JSON document with `atoms` and `blocks`).
pub fn parse_logic(text: &str) -> Result<GreechieLogic, LogicError> {
    GreechieLogic::from_json(text)
}

/// The five-block logic whose blocks are `{e_k, f_k, e_(k+1)}` with indices mod 5.
pub fn pentagon_logic() -> GreechieLogic {
    let atoms: Vec<String> = (1..=5)
        .map(|k| format!("e{k}"))
        .chain((1..=5).map(|k| format!("f{k}")))
        .collect();
    let blocks: Vec<Vec<String>> = (1..=5)
        .map(|k| {
            vec![
                format!("e{k}"),
                format!("f{k}"),
                format!("e{}", k % 5 + 1),
            ]
        })
        .collect();
    GreechieLogic::new(&atoms, &blocks).expect("pentagon logic is valid")
}

/// Logic file text for the built-in pentagon logic.
pub fn pentagon_logic_json() -> String {
    pentagon_logic().to_json()
}

/// A set of atoms lying in one common block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    atoms: BTreeSet<usize>,
}

impl Event {
    pub fn zero() -> Self {
        Self {
            atoms: BTreeSet::new(),
        }
    }

    pub fn atoms(&self) -> &BTreeSet<usize> {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockViolation {
    pub block: usize,
    pub atoms: Vec<String>,
    pub sum: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeViolation {
    pub atom: String,
    pub value: Rational,
}

/// Everything wrong with a candidate state.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StateViolations {
    pub blocks: Vec<BlockViolation>,
    pub out_of_range: Vec<RangeViolation>,
}

impl StateViolations {
    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty() && self.out_of_range.is_empty()
    }
}

impl fmt::Display for StateViolations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for v in &self.blocks {
            parts.push(format!(
                "block {} {{{}}} sums to {} (expected 1)",
                v.block,
                v.atoms.join(", "),
                format_rational(&v.sum)
            ));
        }
        for v in &self.out_of_range {
            parts.push(format!(
                "atom {} has value {} outside [0, 1]",
                v.atom,
                format_rational(&v.value)
            ));
        }
        f.write_str(&parts.join("; "))
    }
}

/// Checks that `assignment` (indexed like `logic.atoms()`) is a state.
pub fn validate_state(
    logic: &GreechieLogic,
    assignment: &[Rational],
) -> Result<(), LogicError> {
    if assignment.len() != logic.atom_count() {
        return Err(LogicError::AssignmentLength {
            expected: logic.atom_count(),
            found: assignment.len(),
        });
    }
    let mut report = StateViolations::default();
    for (block, ids) in logic.blocks.iter().enumerate() {
        let sum = ids
            .iter()
            .fold(Rational::zero(), |acc, &i| acc + &assignment[i]);
        if !sum.is_one() {
            report.blocks.push(BlockViolation {
                block,
                atoms: ids.iter().map(|&i| logic.atoms[i].clone()).collect(),
                sum,
            });
        }
    }
    for (i, value) in assignment.iter().enumerate() {
        if !is_probability(value) {
            report.out_of_range.push(RangeViolation {
                atom: logic.atoms[i].clone(),
                value: value.clone(),
            });
        }
    }
    if report.is_empty() {
        Ok(())
    } else {
        Err(LogicError::InvalidState(report))
    }
}

/// An exact state: one probability per atom, summing to one on every block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicState {
    values: Vec<Rational>,
}

impl LogicState {
    pub fn new(logic: &GreechieLogic, values: Vec<Rational>) -> Result<Self, LogicError> {
        validate_state(logic, &values)?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn atom(&self, id: usize) -> &Rational {
        &self.values[id]
    }

    /// Probability of an event: the sum of its atoms' values.
    pub fn probability(&self, event: &Event) -> Rational {
        event_probability(self, event)
    }

    /// `atom=value` pairs in atom order.
    pub fn describe(&self, logic: &GreechieLogic) -> String {
        logic
            .atoms()
            .iter()
            .zip(&self.values)
            .map(|(a, v)| format!("{a}={}", format_rational(v)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn event_probability(state: &LogicState, event: &Event) -> Rational {
    event
        .atoms
        .iter()
        .fold(Rational::zero(), |acc, &i| acc + &state.values[i])
}

/// Wright's pentagon state: `1/2` on every `e_k`, `0` on every `f_k`.
pub fn pentagon_state(logic: &GreechieLogic) -> Result<LogicState, LogicError> {
    if !logic.same_structure(&pentagon_logic()) {
        return Err(LogicError::WrongLogic);
    }
    let values = logic
        .atoms()
        .iter()
        .map(|a| {
            if a.starts_with('e') {
                rat(1, 2)
            } else {
                Rational::zero()
            }
        })
        .collect();
    LogicState::new(logic, values)
}

/// Exclusivity graph: vertices are atoms (or chosen events), edges join orthogonal pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityGraph {
    adjacency: Vec<Vec<bool>>,
}

impl OrthogonalityGraph {
    pub fn from_edges(vertices: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![vec![false; vertices]; vertices];
        for &(a, b) in edges {
            assert!(a != b, "orthogonality graphs are loop-free");
            adjacency[a][b] = true;
            adjacency[b][a] = true;
        }
        Self { adjacency }
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|k| (k, (k + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Self::from_edges(n, &edges)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_edges(n, &[])
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a][b]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].iter().filter(|&&x| x).count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertex_count();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.adjacency[a][b])
            .collect()
    }

    /// Induced subgraph on `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let adjacency = vertices
            .iter()
            .map(|&a| vertices.iter().map(|&b| self.adjacency[a][b]).collect())
            .collect();
        Self { adjacency }
    }

    /// Whether the graph is the cycle `0 - 1 - ... - (n-1) - 0` in vertex order.
    pub fn is_cycle_in_order(&self) -> bool {
        *self == Self::cycle(self.vertex_count())
    }
}

pub fn orthogonality_graph(logic: &GreechieLogic) -> OrthogonalityGraph {
    let mut edges = Vec::new();
    for block in logic.blocks() {
        for (i, &a) in block.iter().enumerate() {
            for &b in &block[i + 1..] {
                edges.push((a, b));
            }
        }
    }
    OrthogonalityGraph::from_edges(logic.atom_count(), &edges)
}
