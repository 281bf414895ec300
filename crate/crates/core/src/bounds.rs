//! Bounds on weighted sums of event probabilities at three levels.
//!
//! * classical: deterministic assignments, i.e. independent sets of the
//!   exclusivity graph (Wright's bound 2 on the 5-cycle);
//! * logic: the exact optimum over the state polytope of a Greechie logic
//!   (5/2 on the pentagon logic, attained only by the pentagon state);
//! * quantum: for a fixed projector realization the best state gives the
//!   largest eigenvalue of `sum_k w_k P_k` (the umbrella realization gives
//!   `sqrt 5`), and a seeded random search over 5-cycle realizations never
//!   gets above that, let alone to 5/2.
//!
//! For the five pentagon events the KCBS functional is `K = 5 - 4 sum mu(e_k)`,
//! where `x_k = 2 e_k - 1` are the associated `+1/-1` observables.

use nalgebra::DVector;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::eigen::largest_eigenvalue;
use crate::hilbert::{HilbertError, Projector};
use crate::logic::{orthogonality_graph, GreechieLogic, LogicError, LogicState, OrthogonalityGraph};
use crate::lp::{lp_maximize, optimal_face, Constraint, LinearProgram, LpError, LpOutcome, Relation};
use crate::random::{gaussian_vector, stream_rng};
use crate::rational::{int, Rational};

/// Absolute tolerance for floating-point comparisons.
pub const FLOAT_TOLERANCE: f64 = 1e-9;
/// Edges of the exclusivity graph require `|P_i P_j| <= 1e-9`.
pub const REALIZATION_TOLERANCE: f64 = 1e-9;
pub const MAX_DRAW_RETRIES: usize = 64;
pub const MAX_CLASSICAL_EVENTS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("{events} events but {weights} weights")]
    WeightCount { events: usize, weights: usize },
    #[error("event family is empty")]
    EmptyFamily,
    #[error("the logic has no states")]
    InfeasibleLogic,
    #[error("projectors {first} and {second} should be orthogonal but |P Q| = {norm:e}")]
    OrthogonalityPattern { first: usize, second: usize, norm: f64 },
    #[error("projectors have mismatched dimensions")]
    MixedDimensions,
    #[error("dimension {0} is outside the supported range 3..=6")]
    InvalidDimension(usize),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("could not draw a nondegenerate vector after {MAX_DRAW_RETRIES} retries (seed {seed}, trial {trial})")]
    DegenerateDraw { seed: u64, trial: u64 },
}

/// Events (atoms of a logic) with rational weights.
#[derive(Debug, Clone)]
pub struct WeightedEventFamily<'a> {
    logic: &'a GreechieLogic,
    events: Vec<usize>,
    weights: Vec<Rational>,
}

impl<'a> WeightedEventFamily<'a> {
    pub fn new<S: AsRef<str>>(
        logic: &'a GreechieLogic,
        events: &[S],
        weights: Vec<Rational>,
    ) -> Result<Self, BoundsError> {
        if events.is_empty() {
            return Err(BoundsError::EmptyFamily);
        }
        if events.len() != weights.len() {
            return Err(BoundsError::WeightCount {
                events: events.len(),
                weights: weights.len(),
            });
        }
        let events = events
            .iter()
            .map(|e| logic.atom_index(e.as_ref()))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            logic,
            events,
            weights,
        })
    }

    pub fn unit<S: AsRef<str>>(logic: &'a GreechieLogic, events: &[S]) -> Result<Self, BoundsError> {
        Self::new(logic, events, vec![Rational::one(); events.len()])
    }

    /// `e1..e5` with unit weights on the pentagon logic.
    pub fn pentagon(logic: &'a GreechieLogic) -> Result<Self, BoundsError> {
        Self::unit(logic, &pentagon_event_names())
    }

    pub fn logic(&self) -> &GreechieLogic {
        self.logic
    }

    pub fn events(&self) -> &[usize] {
        &self.events
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Exclusivity graph among the family's events, in family order.
    pub fn graph(&self) -> OrthogonalityGraph {
        orthogonality_graph(self.logic).induced(&self.events)
    }

    /// Objective over atom probabilities; repeated events accumulate weight.
    fn atom_objective(&self) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.logic.atom_count()];
        for (&e, w) in self.events.iter().zip(&self.weights) {
            c[e] += w;
        }
        c
    }

    /// The state polytope with this family's objective.
    pub fn program(&self) -> Result<LinearProgram, BoundsError> {
        let n = self.logic.atom_count();
        let constraints = self
            .logic
            .blocks()
            .iter()
            .map(|block| {
                let mut row = vec![Rational::zero(); n];
                for &a in block {
                    row[a] = Rational::one();
                }
                Constraint::new(row, Relation::Eq, Rational::one())
            })
            .collect();
        Ok(LinearProgram::new(
            self.logic.atoms().to_vec(),
            self.atom_objective(),
            constraints,
        )?)
    }

    /// `sum_k w_k mu(e_k)` for a state.
    pub fn evaluate(&self, state: &LogicState) -> Rational {
        self.events
            .iter()
            .zip(&self.weights)
            .fold(Rational::zero(), |acc, (&e, w)| acc + w * state.atom(e))
    }
}

pub fn pentagon_event_names() -> [&'static str; 5] {
    ["e1", "e2", "e3", "e4", "e5"]
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicMax {
    pub value: Rational,
    pub maximizers: Vec<LogicState>,
}

impl LogicMax {
    pub fn is_unique(&self) -> bool {
        self.maximizers.len() == 1
    }
}

/// Exact maximum of the family's weighted sum over all states, with every maximizing vertex.
pub fn logic_max(family: &WeightedEventFamily<'_>) -> Result<LogicMax, BoundsError> {
    let lp = family.program()?;
    let value = match lp_maximize(&lp) {
        LpOutcome::Optimal { value, .. } => value,
        LpOutcome::Infeasible => return Err(BoundsError::InfeasibleLogic),
        LpOutcome::Unbounded => unreachable!("state polytopes are bounded by their block sums"),
    };
    let maximizers = optimal_face(&lp)?
        .into_iter()
        .map(|v| LogicState::new(family.logic, v))
        .collect::<Result<_, _>>()?;
    Ok(LogicMax { value, maximizers })
}

/// Best weighted independent set: the classical (noncontextual) maximum.
///
/// Deterministic assignments give probability one to a set of pairwise
/// non-exclusive events; mixtures never beat the best of them.
pub fn classical_max(graph: &OrthogonalityGraph, weights: &[Rational]) -> Rational {
    let n = graph.vertex_count();
    assert_eq!(n, weights.len(), "one weight per vertex");
    assert!(n <= MAX_CLASSICAL_EVENTS, "classical_max enumerates 2^n subsets");
    let neighbours: Vec<u32> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| graph.adjacent(a, b))
                .fold(0u32, |m, b| m | (1 << b))
        })
        .collect();
    let mut best = Rational::zero();
    for mask in 0u32..(1u32 << n) {
        let independent = (0..n).all(|v| mask & (1 << v) == 0 || mask & neighbours[v] == 0);
        if !independent {
            continue;
        }
        let total = (0..n)
            .filter(|&v| mask & (1 << v) != 0)
            .fold(Rational::zero(), |acc, v| acc + &weights[v]);
        if total > best {
            best = total;
        }
    }
    best
}

/// Largest eigenvalue of `sum_k w_k P_k`, after checking the exclusivity pattern.
///
/// Only edges are checked: adjacent events must be realized by orthogonal projectors.
pub fn quantum_value(
    projectors: &[Projector],
    weights: &[f64],
    graph: &OrthogonalityGraph,
) -> Result<f64, BoundsError> {
    if projectors.is_empty() {
        return Err(BoundsError::EmptyFamily);
    }
    if projectors.len() != weights.len() || projectors.len() != graph.vertex_count() {
        return Err(BoundsError::WeightCount {
            events: projectors.len(),
            weights: weights.len(),
        });
    }
    let dim = projectors[0].dim();
    if projectors.iter().any(|p| p.dim() != dim) {
        return Err(BoundsError::MixedDimensions);
    }
    for (first, second) in graph.edges() {
        let norm = projectors[first].overlap(&projectors[second])?;
        if norm > REALIZATION_TOLERANCE {
            return Err(BoundsError::OrthogonalityPattern {
                first,
                second,
                norm,
            });
        }
    }
    let sum = projectors
        .iter()
        .zip(weights)
        .fold(nalgebra::DMatrix::zeros(dim, dim), |acc, (p, &w)| {
            acc + p.matrix() * Complex64::new(w, 0.0)
        });
    Ok(largest_eigenvalue(&sum).map_err(HilbertError::from)?)
}

/// `cos^2 theta = cos(pi/5) / (1 + cos(pi/5))`.
pub fn umbrella_cos_sq() -> f64 {
    let c = (std::f64::consts::PI / 5.0).cos();
    c / (1.0 + c)
}

/// `v_k = (cos t, sin t cos(4 pi k / 5), sin t sin(4 pi k / 5))` for `k = 0..5`;
/// consecutive vectors (cyclically) are orthogonal.
pub fn umbrella_vectors() -> [DVector<Complex64>; 5] {
    let cos_t = umbrella_cos_sq().sqrt();
    let sin_t = (1.0 - umbrella_cos_sq()).sqrt();
    std::array::from_fn(|k| {
        let phi = 4.0 * std::f64::consts::PI * k as f64 / 5.0;
        DVector::from_vec(vec![
            Complex64::new(cos_t, 0.0),
            Complex64::new(sin_t * phi.cos(), 0.0),
            Complex64::new(sin_t * phi.sin(), 0.0),
        ])
    })
}

pub fn umbrella_projectors() -> Result<Vec<Projector>, BoundsError> {
    umbrella_vectors()
        .iter()
        .map(|v| Projector::onto(v).map_err(BoundsError::from))
        .collect()
}

/// Quantum value of the umbrella realization with unit weights.
pub fn umbrella_value() -> Result<f64, BoundsError> {
    quantum_value(&umbrella_projectors()?, &[1.0; 5], &OrthogonalityGraph::cycle(5))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub best: f64,
    pub best_trial: u64,
}

fn draw_orthogonal<R: rand::Rng + ?Sized>(
    dim: usize,
    against: &[DVector<Complex64>],
    rng: &mut R,
) -> Option<DVector<Complex64>> {
    for _ in 0..MAX_DRAW_RETRIES {
        let mut v = gaussian_vector(dim, rng);
        for b in against {
            let overlap = b.dotc(&v);
            v -= b * overlap;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            return Some(v / Complex64::new(norm, 0.0));
        }
    }
    None
}

/// One random rank-one realization of the 5-cycle: each vector is drawn orthogonal to its
/// predecessor and the last one also orthogonal to the first.
pub fn random_pentagon_vectors(
    dim: usize,
    seed: u64,
    trial: u64,
) -> Result<[DVector<Complex64>; 5], BoundsError> {
    let mut rng = stream_rng(seed, trial);
    let fail = || BoundsError::DegenerateDraw { seed, trial };
    let mut vs: Vec<DVector<Complex64>> = Vec::with_capacity(5);
    vs.push(draw_orthogonal(dim, &[], &mut rng).ok_or_else(fail)?);
    for _ in 1..4 {
        let prev = vs.last().expect("nonempty").clone();
        vs.push(draw_orthogonal(dim, &[prev], &mut rng).ok_or_else(fail)?);
    }
    // Orthonormal basis of span{v4, v1}.
    let v4 = vs[3].clone();
    let mut span = vec![v4.clone()];
    let mut w = vs[0].clone() - &v4 * v4.dotc(&vs[0]);
    let norm = w.norm();
    if norm > 1e-8 {
        w /= Complex64::new(norm, 0.0);
        span.push(w);
    }
    vs.push(draw_orthogonal(dim, &span, &mut rng).ok_or_else(fail)?);
    Ok(vs.try_into().expect("five vectors"))
}

/// Best unit-weight 5-cycle quantum value over `trials` seeded random realizations.
pub fn search_pentagon_projectors(dim: usize, trials: u64, seed: u64) -> Result<SearchOutcome, BoundsError> {
    if !(3..=6).contains(&dim) {
        return Err(BoundsError::InvalidDimension(dim));
    }
    if trials == 0 {
        return Err(BoundsError::NoTrials);
    }
    let graph = OrthogonalityGraph::cycle(5);
    let values: Vec<(f64, u64)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let vectors = random_pentagon_vectors(dim, seed, trial)?;
            let projectors = vectors
                .iter()
                .map(Projector::onto)
                .collect::<Result<Vec<_>, _>>()?;
            Ok((quantum_value(&projectors, &[1.0; 5], &graph)?, trial))
        })
        .collect::<Result<_, BoundsError>>()?;
    // Highest value wins; ties go to the earliest trial.
    let (best, best_trial) = values
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one trial");
    Ok(SearchOutcome {
        dim,
        trials,
        seed,
        best,
        best_trial,
    })
}

/// `K = 5 - 4 sum_k mu(e_k)`, exactly.
pub fn kcbs_value(probabilities: &[Rational; 5]) -> Rational {
    let sum = probabilities.iter().fold(Rational::zero(), |acc, p| acc + p);
    kcbs_from_sum(&sum)
}

pub fn kcbs_from_sum(sum: &Rational) -> Rational {
    int(5) - int(4) * sum
}

pub fn kcbs_value_f64(probabilities: &[f64; 5]) -> f64 {
    kcbs_from_sum_f64(probabilities.iter().sum())
}

pub fn kcbs_from_sum_f64(sum: f64) -> f64 {
    5.0 - 4.0 * sum
}

/// Classical, logic-level and (optionally) quantum bounds for one family.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub classical_max: Rational,
    pub logic_max: Rational,
    pub logic_maximizers: Vec<LogicState>,
    pub quantum_value: Option<f64>,
}

impl BoundReport {
    /// Checks `classical <= logic` and `quantum <= logic + 1e-9`.
    pub fn check(&self) -> Result<(), String> {
        if self.classical_max > self.logic_max {
            return Err(format!(
                "classical maximum {} exceeds logic maximum {}",
                self.classical_max, self.logic_max
            ));
        }
        if let Some(q) = self.quantum_value {
            let logic = crate::rational::to_f64(&self.logic_max);
            if q > logic + FLOAT_TOLERANCE {
                return Err(format!("quantum value {q} exceeds logic maximum {logic}"));
            }
        }
        Ok(())
    }
}

pub fn bound_report(
    family: &WeightedEventFamily<'_>,
    quantum: Option<f64>,
) -> Result<BoundReport, BoundsError> {
    let logic = logic_max(family)?;
    Ok(BoundReport {
        classical_max: classical_max(&family.graph(), family.weights()),
        logic_max: logic.value,
        logic_maximizers: logic.maximizers,
        quantum_value: quantum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{pentagon_logic, pentagon_state};
    use crate::rational::rat;

    #[test]
    fn pentagon_logic_max_is_five_halves_with_unique_maximizer() {
        let logic = pentagon_logic();
        let family = WeightedEventFamily::pentagon(&logic).unwrap();
        let result = logic_max(&family).unwrap();
        assert_eq!(result.value, rat(5, 2));
        assert_eq!(result.maximizers, vec![pentagon_state(&logic).unwrap()]);
    }

    #[test]
    fn single_block_weight_on_one_atom() {
        let logic = GreechieLogic::new(&["a", "b", "c"], &[vec!["a", "b", "c"]]).unwrap();
        let family = WeightedEventFamily::new(&logic, &["a"], vec![int(1)]).unwrap();
        assert_eq!(logic_max(&family).unwrap().value, int(1));
    }

    #[test]
    fn pentagon_with_two_adjacent_weights() {
        let logic = pentagon_logic();
        let w = [1, 1, 0, 0, 0].map(int).to_vec();
        let family = WeightedEventFamily::new(&logic, &pentagon_event_names(), w).unwrap();
        assert_eq!(logic_max(&family).unwrap().value, int(1));
    }

    #[test]
    fn logic_without_states_is_infeasible() {
        // Odd cycle of 2-atom blocks forces a = b = c = 1/2.
        let triangle = GreechieLogic::new(
            &["a", "b", "c"],
            &[vec!["a", "b"], vec!["b", "c"], vec!["c", "a"]],
        )
        .unwrap();
        let family = WeightedEventFamily::unit(&triangle, &["a"]).unwrap();
        assert_eq!(logic_max(&family).unwrap().value, rat(1, 2));

        // Adding {a, e, f} with e = 1 - b and f = 1 - c makes that block sum to 3/2.
        let logic = GreechieLogic::new(
            &["a", "b", "c", "e", "f"],
            &[
                vec!["a", "b"],
                vec!["b", "c"],
                vec!["c", "a"],
                vec!["a", "e", "f"],
                vec!["e", "b"],
                vec!["f", "c"],
            ],
        )
        .unwrap();
        let family = WeightedEventFamily::unit(&logic, &["a"]).unwrap();
        assert_eq!(logic_max(&family).unwrap_err(), BoundsError::InfeasibleLogic);
    }

    #[test]
    fn classical_examples() {
        let ones = vec![int(1); 5];
        assert_eq!(classical_max(&OrthogonalityGraph::cycle(5), &ones), int(2));
        assert_eq!(classical_max(&OrthogonalityGraph::empty(5), &ones), int(5));
        assert_eq!(classical_max(&OrthogonalityGraph::complete(5), &ones), int(1));
    }

    #[test]
    fn pentagon_family_graph_is_c5() {
        let logic = pentagon_logic();
        let family = WeightedEventFamily::pentagon(&logic).unwrap();
        assert!(family.graph().is_cycle_in_order());
        assert_eq!(classical_max(&family.graph(), family.weights()), int(2));
    }

    #[test]
    fn umbrella_reaches_sqrt_five() {
        let value = umbrella_value().unwrap();
        assert!((value - 5f64.sqrt()).abs() < 1e-9, "{value}");
        // psi = (1,0,0) collects 5 cos^2 theta.
        let psi_value: f64 = umbrella_vectors().iter().map(|v| v[0].norm_sqr()).sum();
        assert!((psi_value - 5.0 * umbrella_cos_sq()).abs() < 1e-12);
        assert!((psi_value - 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn quantum_value_trivial_cases() {
        let id = Projector::identity(3);
        assert!((quantum_value(&[id], &[1.0], &OrthogonalityGraph::empty(1)).unwrap() - 1.0).abs() < 1e-12);
        let pair = [Projector::basis(2, 0), Projector::basis(2, 1)];
        let v = quantum_value(&pair, &[1.0, 1.0], &OrthogonalityGraph::complete(2)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantum_value_rejects_wrong_pattern() {
        let same = [Projector::basis(2, 0), Projector::basis(2, 0)];
        assert!(matches!(
            quantum_value(&same, &[1.0, 1.0], &OrthogonalityGraph::complete(2)),
            Err(BoundsError::OrthogonalityPattern { first: 0, second: 1, .. })
        ));
        let mixed = [Projector::basis(2, 0), Projector::basis(3, 1)];
        assert!(matches!(
            quantum_value(&mixed, &[1.0, 1.0], &OrthogonalityGraph::empty(2)),
            Err(BoundsError::MixedDimensions)
        ));
    }

    #[test]
    fn search_is_deterministic_and_bounded() {
        let a = search_pentagon_projectors(3, 1, 7).unwrap();
        let b = search_pentagon_projectors(3, 1, 7).unwrap();
        assert_eq!(a, b);
        for dim in 3..=6 {
            let s = search_pentagon_projectors(dim, 50, 3).unwrap();
            assert!(s.best <= 5f64.sqrt() + 1e-9);
            assert!(s.best < 2.5);
            assert!(s.best >= 1.0);
        }
        assert_eq!(
            search_pentagon_projectors(2, 10, 0).unwrap_err(),
            BoundsError::InvalidDimension(2)
        );
        assert_eq!(search_pentagon_projectors(3, 0, 0).unwrap_err(), BoundsError::NoTrials);
    }

    #[test]
    fn kcbs_examples() {
        assert_eq!(kcbs_value(&[rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)]), int(-5));
        assert_eq!(kcbs_from_sum(&int(2)), int(-3));
        let q = kcbs_from_sum_f64(5f64.sqrt());
        assert!((q - (5.0 - 4.0 * 5f64.sqrt())).abs() < 1e-12);
        assert!((q + 3.9442719).abs() < 1e-6);
        assert!((kcbs_value_f64(&[0.5; 5]) + 5.0).abs() < 1e-15);
    }

    #[test]
    fn report_orders_the_tiers() {
        let logic = pentagon_logic();
        let family = WeightedEventFamily::pentagon(&logic).unwrap();
        let report = bound_report(&family, Some(umbrella_value().unwrap())).unwrap();
        report.check().unwrap();
        assert_eq!(report.classical_max, int(2));
        let bad = BoundReport {
            quantum_value: Some(2.6),
            ..report
        };
        assert!(bad.check().is_err());
    }
}
