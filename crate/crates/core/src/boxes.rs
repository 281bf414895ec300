//! Two-party, two-setting, two-outcome boxes.
//!
//! Alice measures `a_1` or `a_2`, Bob `b_1` or `b_2`, every outcome is `+1`
//! or `-1`, and `p_mn(r, s)` is the joint probability of `a_m = r`, `b_n = s`.
//! Probabilities are exact rationals throughout; only [`quantum_chsh`] works
//! in floating point.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::Value;
use thiserror::Error;

use crate::rational::{format_rational, int, parse_rational, rat, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoxError {
    #[error("table p_{setting} sums to {sum}, not 1")]
    NotNormalized { setting: String, sum: String },
    #[error("table p_{setting} has negative entry {value} at ({outcome})")]
    Negative {
        setting: String,
        outcome: String,
        value: String,
    },
    #[error("malformed box file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    fn symbol(self) -> char {
        match self {
            Outcome::Plus => '+',
            Outcome::Minus => '-',
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        })
    }
}

/// `table[r][s]` with `r`, `s` indexed by [`Outcome::index`].
pub type JointTable = [[Rational; 2]; 2];

/// A bipartite box: four normalized joint distributions `p[m][n]` (settings are 0-based).
///
/// Construction only checks normalization; [`no_signaling_check`] tests the marginals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipartiteBox {
    p: [[JointTable; 2]; 2],
}

fn setting_label(m: usize, n: usize) -> String {
    format!("{}{}", m + 1, n + 1)
}

impl BipartiteBox {
    pub fn new(p: [[JointTable; 2]; 2]) -> Result<Self, BoxError> {
        for m in 0..2 {
            for n in 0..2 {
                let mut sum = Rational::zero();
                for r in Outcome::BOTH {
                    for s in Outcome::BOTH {
                        let v = &p[m][n][r.index()][s.index()];
                        if v.is_negative() {
                            return Err(BoxError::Negative {
                                setting: setting_label(m, n),
                                outcome: format!("{}{}", r.symbol(), s.symbol()),
                                value: format_rational(v),
                            });
                        }
                        sum += v;
                    }
                }
                if !sum.is_one() {
                    return Err(BoxError::NotNormalized {
                        setting: setting_label(m, n),
                        sum: format_rational(&sum),
                    });
                }
            }
        }
        Ok(Self { p })
    }

    /// Builds a box from `f(m, n, r, s)`.
    pub fn from_fn(f: impl Fn(usize, usize, Outcome, Outcome) -> Rational) -> Result<Self, BoxError> {
        let p = std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                std::array::from_fn(|ri| {
                    std::array::from_fn(|si| f(m, n, Outcome::BOTH[ri], Outcome::BOTH[si]))
                })
            })
        });
        Self::new(p)
    }

    /// `p_mn(r, s)` with 0-based settings.
    pub fn prob(&self, m: usize, n: usize, r: Outcome, s: Outcome) -> &Rational {
        &self.p[m][n][r.index()][s.index()]
    }

    pub fn uniform() -> Self {
        Self::from_fn(|_, _, _, _| rat(1, 4)).expect("uniform box is normalized")
    }

    /// Product box of a deterministic local strategy: `p_mn(r, s) = [a_m = r][b_n = s]`.
    pub fn deterministic(strategy: LocalStrategy) -> Self {
        Self::from_fn(|m, n, r, s| {
            if strategy.alice[m] == r && strategy.bob[n] == s {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .expect("deterministic box is normalized")
    }

    /// The convex combination `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &BipartiteBox, weight: &Rational) -> Result<Self, BoxError> {
        let rest = Rational::one() - weight;
        Self::from_fn(|m, n, r, s| weight * self.prob(m, n, r, s) + &rest * other.prob(m, n, r, s))
    }

    /// Exchanges Alice's two settings.
    pub fn swap_alice_settings(&self) -> Self {
        Self::from_fn(|m, n, r, s| self.prob(1 - m, n, r, s).clone()).expect("relabelling keeps normalization")
    }

    pub fn swap_bob_settings(&self) -> Self {
        Self::from_fn(|m, n, r, s| self.prob(m, 1 - n, r, s).clone()).expect("relabelling keeps normalization")
    }

    /// Exchanges `+1` and `-1` for Alice's observable `a_{setting+1}`.
    pub fn flip_alice_outcome(&self, setting: usize) -> Self {
        Self::from_fn(|m, n, r, s| {
            let r = if m == setting { r.flipped() } else { r };
            self.prob(m, n, r, s).clone()
        })
        .expect("relabelling keeps normalization")
    }

    pub fn flip_bob_outcome(&self, setting: usize) -> Self {
        Self::from_fn(|m, n, r, s| {
            let s = if n == setting { s.flipped() } else { s };
            self.prob(m, n, r, s).clone()
        })
        .expect("relabelling keeps normalization")
    }

    /// Correlators `c[m][n] = sum_{r,s} r s p_mn(r, s)`.
    pub fn correlators(&self) -> [[Rational; 2]; 2] {
        std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                let mut c = Rational::zero();
                for r in Outcome::BOTH {
                    for s in Outcome::BOTH {
                        c += int(r.sign() * s.sign()) * self.prob(m, n, r, s);
                    }
                }
                c
            })
        })
    }

    pub fn from_json(text: &str) -> Result<Self, BoxError> {
        let doc: Value = serde_json::from_str(text).map_err(|e| {
            BoxError::Format(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        let tables = doc
            .get("p")
            .and_then(Value::as_object)
            .ok_or_else(|| BoxError::Format("missing object `p`".into()))?;
        let mut p: [[JointTable; 2]; 2] = Default::default();
        for m in 0..2 {
            for n in 0..2 {
                let key = setting_label(m, n);
                let table = tables
                    .get(&key)
                    .and_then(Value::as_object)
                    .ok_or_else(|| BoxError::Format(format!("missing table `{key}`")))?;
                for r in Outcome::BOTH {
                    for s in Outcome::BOTH {
                        let cell = format!("{}{}", r.symbol(), s.symbol());
                        let value = table
                            .get(&cell)
                            .ok_or_else(|| BoxError::Format(format!("table `{key}` lacks `{cell}`")))?;
                        p[m][n][r.index()][s.index()] = parse_cell(value)
                            .ok_or_else(|| BoxError::Format(format!("table `{key}` cell `{cell}` is not a rational")))?;
                    }
                }
                if table.len() != 4 {
                    return Err(BoxError::Format(format!("table `{key}` must have exactly 4 cells")));
                }
            }
        }
        if tables.len() != 4 {
            return Err(BoxError::Format("`p` must have exactly the tables 11, 12, 21, 22".into()));
        }
        Self::new(p)
    }

    pub fn to_json(&self) -> String {
        let mut tables = BTreeMap::new();
        for m in 0..2 {
            for n in 0..2 {
                let mut cells = BTreeMap::new();
                for r in Outcome::BOTH {
                    for s in Outcome::BOTH {
                        cells.insert(
                            format!("{}{}", r.symbol(), s.symbol()),
                            format_rational(self.prob(m, n, r, s)),
                        );
                    }
                }
                tables.insert(setting_label(m, n), cells);
            }
        }
        serde_json::json!({ "p": tables }).to_string()
    }
}

fn parse_cell(value: &Value) -> Option<Rational> {
    match value {
        Value::String(s) => parse_rational(s).ok(),
        Value::Number(n) => n.as_i64().map(int),
        _ => None,
    }
}

pub fn parse_box(text: &str) -> Result<BipartiteBox, BoxError> {
    BipartiteBox::from_json(text)
}

/// Fixed outcomes for `a_1, a_2` and `b_1, b_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalStrategy {
    pub alice: [Outcome; 2],
    pub bob: [Outcome; 2],
}

/// All 16 deterministic local strategies.
pub fn local_strategies() -> Vec<LocalStrategy> {
    let mut out = Vec::with_capacity(16);
    for a1 in Outcome::BOTH {
        for a2 in Outcome::BOTH {
            for b1 in Outcome::BOTH {
                for b2 in Outcome::BOTH {
                    out.push(LocalStrategy {
                        alice: [a1, a2],
                        bob: [b1, b2],
                    });
                }
            }
        }
    }
    out
}

/// One failed marginal identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignalingViolation {
    /// Alice's marginal for `a_{setting}` = `outcome` depends on Bob's setting.
    Alice {
        setting: usize,
        outcome: Outcome,
        with_b1: Rational,
        with_b2: Rational,
    },
    /// Bob's marginal for `b_{setting}` = `outcome` depends on Alice's setting.
    Bob {
        setting: usize,
        outcome: Outcome,
        with_a1: Rational,
        with_a2: Rational,
    },
}

impl fmt::Display for SignalingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalingViolation::Alice {
                setting,
                outcome,
                with_b1,
                with_b2,
            } => write!(
                f,
                "P(a{setting}={outcome}) is {} with b1 but {} with b2",
                format_rational(with_b1),
                format_rational(with_b2)
            ),
            SignalingViolation::Bob {
                setting,
                outcome,
                with_a1,
                with_a2,
            } => write!(
                f,
                "P(b{setting}={outcome}) is {} with a1 but {} with a2",
                format_rational(with_a1),
                format_rational(with_a2)
            ),
        }
    }
}

/// Every violated marginal identity; empty means the box is no-signaling.
///
/// Settings in the report are 1-based, as in `a1`, `b2`.
pub fn no_signaling_check(bx: &BipartiteBox) -> Vec<SignalingViolation> {
    let mut violations = Vec::new();
    for m in 0..2 {
        for r in Outcome::BOTH {
            let marginal = |n| bx.prob(m, n, r, Outcome::Plus) + bx.prob(m, n, r, Outcome::Minus);
            let (with_b1, with_b2) = (marginal(0), marginal(1));
            if with_b1 != with_b2 {
                violations.push(SignalingViolation::Alice {
                    setting: m + 1,
                    outcome: r,
                    with_b1,
                    with_b2,
                });
            }
        }
    }
    for n in 0..2 {
        for s in Outcome::BOTH {
            let marginal = |m| bx.prob(m, n, Outcome::Plus, s) + bx.prob(m, n, Outcome::Minus, s);
            let (with_a1, with_a2) = (marginal(0), marginal(1));
            if with_a1 != with_a2 {
                violations.push(SignalingViolation::Bob {
                    setting: n + 1,
                    outcome: s,
                    with_a1,
                    with_a2,
                });
            }
        }
    }
    violations
}

pub fn is_no_signaling(bx: &BipartiteBox) -> bool {
    no_signaling_check(bx).is_empty()
}

/// `|c11 + c12 + c21 - c22|`.
pub fn chsh(bx: &BipartiteBox) -> Rational {
    chsh_with_minus_at(bx, 1, 1)
}

/// The CHSH combination with the minus sign on `c[m][n]` (0-based).
pub fn chsh_with_minus_at(bx: &BipartiteBox, m: usize, n: usize) -> Rational {
    let c = bx.correlators();
    let mut total = Rational::zero();
    for (i, row) in c.iter().enumerate() {
        for (j, value) in row.iter().enumerate() {
            if (i, j) == (m, n) {
                total -= value;
            } else {
                total += value;
            }
        }
    }
    total.abs()
}

/// Maximum of the CHSH combination over the four placements of the minus sign.
pub fn chsh_symmetrized(bx: &BipartiteBox) -> Rational {
    [(0, 0), (0, 1), (1, 0), (1, 1)]
        .into_iter()
        .map(|(m, n)| chsh_with_minus_at(bx, m, n))
        .max()
        .expect("four placements")
}

/// Best CHSH value of a deterministic local strategy.
pub fn classical_chsh_max() -> Rational {
    local_strategies()
        .into_iter()
        .map(|s| chsh(&BipartiteBox::deterministic(s)))
        .max()
        .expect("sixteen strategies")
}

/// CHSH value of the singlet with measurement angles `alpha` (Alice) and `beta` (Bob),
/// using `c_mn = -cos(alpha_m - beta_n)`.
pub fn quantum_chsh(alpha: [f64; 2], beta: [f64; 2]) -> f64 {
    let c = |m: usize, n: usize| -(alpha[m] - beta[n]).cos();
    (c(0, 0) + c(0, 1) + c(1, 0) - c(1, 1)).abs()
}

/// Angles `alpha = (0, pi/2)`, `beta = (pi/4, -pi/4)` at which the singlet reaches `2 sqrt 2`
/// for the combination `c11 + c12 + c21 - c22`: every correlator is `-1/sqrt 2` except `c22 = +1/sqrt 2`.
pub fn tsirelson_angles() -> ([f64; 2], [f64; 2]) {
    use std::f64::consts::PI;
    ([0.0, PI / 2.0], [PI / 4.0, -PI / 4.0])
}

/// The PR box written out in the reference table: anti-correlated except for `a_2, b_2`.
pub fn pr_box() -> BipartiteBox {
    BipartiteBox::from_fn(|m, n, r, s| {
        let correlated = m == 1 && n == 1;
        if (r == s) == correlated {
            rat(1, 2)
        } else {
            Rational::zero()
        }
    })
    .expect("PR box is normalized")
}

/// `pr_box()` and its images under exchanging `a1`/`a2`, `b1`/`b2`, or `+1`/`-1`
/// on any observable, closed and deduplicated in breadth-first order.
pub fn pr_boxes() -> Vec<BipartiteBox> {
    let generators: [fn(&BipartiteBox) -> BipartiteBox; 6] = [
        BipartiteBox::swap_alice_settings,
        BipartiteBox::swap_bob_settings,
        |b| b.flip_alice_outcome(0),
        |b| b.flip_alice_outcome(1),
        |b| b.flip_bob_outcome(0),
        |b| b.flip_bob_outcome(1),
    ];
    let start = pr_box();
    let mut seen = HashSet::from([start.clone()]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(b) = queue.pop_front() {
        for g in &generators {
            let image = g(&b);
            if seen.insert(image.clone()) {
                order.push(image.clone());
                queue.push_back(image);
            }
        }
    }
    order
}

/// `(setting, outcome)` for Alice and for Bob, settings 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxEvent {
    pub alice: (usize, Outcome),
    pub bob: (usize, Outcome),
}

impl fmt::Display for BoxEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a{}={}, b{}={}",
            self.alice.0 + 1,
            self.alice.1,
            self.bob.0 + 1,
            self.bob.1
        )
    }
}

/// The five events `e_1..e_5` of the pentagon scenario inside a box.
pub fn pentagon_box_events() -> [BoxEvent; 5] {
    use Outcome::{Minus, Plus};
    [
        BoxEvent { alice: (0, Plus), bob: (0, Minus) },
        BoxEvent { alice: (0, Minus), bob: (1, Plus) },
        BoxEvent { alice: (1, Minus), bob: (1, Minus) },
        BoxEvent { alice: (1, Plus), bob: (0, Minus) },
        BoxEvent { alice: (0, Minus), bob: (0, Plus) },
    ]
}

/// Why two box events are exclusive: they give one observable different values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusivityWitness {
    pub first: usize,
    pub second: usize,
    /// e.g. `a1` or `b2`.
    pub observable: String,
}

/// A shared observable on which the two events disagree, if any.
pub fn exclusivity(a: &BoxEvent, b: &BoxEvent) -> Option<String> {
    if a.alice.0 == b.alice.0 && a.alice.1 != b.alice.1 {
        Some(format!("a{}", a.alice.0 + 1))
    } else if a.bob.0 == b.bob.0 && a.bob.1 != b.bob.1 {
        Some(format!("b{}", a.bob.0 + 1))
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PentagonEmbedding {
    pub probabilities: [Rational; 5],
    pub sum: Rational,
    /// One witness per cyclically adjacent pair `(e_k, e_{k+1})`.
    pub certificate: Vec<ExclusivityWitness>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("events e{first} and e{second} are not exclusive")]
pub struct CertificateError {
    pub first: usize,
    pub second: usize,
}

/// Reads `mu(e_k)` off the box cells and certifies the 5-cycle of exclusivities.
pub fn box_to_pentagon(bx: &BipartiteBox) -> Result<PentagonEmbedding, CertificateError> {
    let events = pentagon_box_events();
    let probabilities: [Rational; 5] = std::array::from_fn(|k| {
        let e = events[k];
        bx.prob(e.alice.0, e.bob.0, e.alice.1, e.bob.1).clone()
    });
    let sum = probabilities.iter().fold(Rational::zero(), |acc, p| acc + p);
    let mut certificate = Vec::with_capacity(5);
    for k in 0..5 {
        let next = (k + 1) % 5;
        let observable = exclusivity(&events[k], &events[next]).ok_or(CertificateError {
            first: k + 1,
            second: next + 1,
        })?;
        certificate.push(ExclusivityWitness {
            first: k + 1,
            second: next + 1,
            observable,
        });
    }
    Ok(PentagonEmbedding {
        probabilities,
        sum,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_pr_box_cells() {
        let b = pr_box();
        use Outcome::{Minus, Plus};
        // (a1, b1): a1=-1, b1=+1 and a1=+1, b1=-1 carry 1/2
        assert_eq!(b.prob(0, 0, Minus, Plus), &rat(1, 2));
        assert_eq!(b.prob(0, 0, Plus, Minus), &rat(1, 2));
        assert_eq!(b.prob(0, 0, Plus, Plus), &int(0));
        // (a2, b2): a2=+1, b2=+1 and a2=-1, b2=-1 carry 1/2
        assert_eq!(b.prob(1, 1, Plus, Plus), &rat(1, 2));
        assert_eq!(b.prob(1, 1, Minus, Minus), &rat(1, 2));
        assert_eq!(b.prob(1, 1, Plus, Minus), &int(0));
        assert_eq!(b.prob(1, 0, Plus, Minus), &rat(1, 2));
        assert_eq!(b.prob(0, 1, Minus, Plus), &rat(1, 2));
    }

    #[test]
    fn no_signaling_examples() {
        assert!(is_no_signaling(&pr_box()));
        assert!(is_no_signaling(&BipartiteBox::uniform()));
        let signaling = BipartiteBox::from_fn(|m, n, r, s| {
            if (m, n) == (0, 0) {
                if r == Outcome::Plus && s == Outcome::Plus {
                    int(1)
                } else {
                    int(0)
                }
            } else {
                rat(1, 4)
            }
        })
        .unwrap();
        let violations = no_signaling_check(&signaling);
        assert!(!violations.is_empty());
        assert!(violations.contains(&SignalingViolation::Alice {
            setting: 1,
            outcome: Outcome::Plus,
            with_b1: int(1),
            with_b2: rat(1, 2),
        }));
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let err = BipartiteBox::from_fn(|_, _, _, _| rat(1, 3)).unwrap_err();
        assert!(matches!(err, BoxError::NotNormalized { .. }));
        let err = BipartiteBox::from_fn(|_, _, r, s| {
            if r == s { rat(3, 4) } else { rat(-1, 4) }
        })
        .unwrap_err();
        assert!(matches!(err, BoxError::Negative { .. }));
    }

    #[test]
    fn chsh_examples() {
        assert_eq!(chsh(&pr_box()), int(4));
        assert_eq!(chsh(&BipartiteBox::uniform()), int(0));
        let all_plus = LocalStrategy {
            alice: [Outcome::Plus; 2],
            bob: [Outcome::Plus; 2],
        };
        let det = BipartiteBox::deterministic(all_plus);
        assert_eq!(det.correlators(), [[int(1), int(1)], [int(1), int(1)]]);
        assert_eq!(chsh(&det), int(2));
    }

    #[test]
    fn every_deterministic_strategy_scores_two() {
        // a1 (b1 + b2) + a2 (b1 - b2): one bracket is 0, the other is +-2.
        let values: HashSet<Rational> = local_strategies()
            .into_iter()
            .map(|s| chsh(&BipartiteBox::deterministic(s)))
            .collect();
        assert_eq!(values, HashSet::from([int(2)]));
        assert_eq!(classical_chsh_max(), int(2));
    }

    #[test]
    fn singlet_values() {
        let (alpha, beta) = tsirelson_angles();
        assert!((quantum_chsh(alpha, beta) - 2.0 * 2f64.sqrt()).abs() < 1e-9);
        // With the minus on c22 the angles (3pi/4, pi/4) for Bob cancel out.
        let pi = std::f64::consts::PI;
        assert!(quantum_chsh([0.0, pi / 2.0], [3.0 * pi / 4.0, pi / 4.0]) < 1e-12);
        assert!((quantum_chsh([0.3, 0.3], [0.3, 0.3]) - 2.0).abs() < 1e-12);
        let steps = 24;
        let step = std::f64::consts::TAU / steps as f64;
        let mut best: f64 = 0.0;
        for i in 0..steps {
            for j in 0..steps {
                for k in 0..steps {
                    let v = quantum_chsh([0.0, i as f64 * step], [j as f64 * step, k as f64 * step]);
                    best = best.max(v);
                }
            }
        }
        assert!(best <= 2.0 * 2f64.sqrt() + 1e-9);
    }

    #[test]
    fn eight_pr_boxes() {
        let family = pr_boxes();
        assert_eq!(family.len(), 8);
        for b in &family {
            assert!(is_no_signaling(b));
            assert_eq!(chsh_symmetrized(b), int(4));
        }
        assert_eq!(family[0], pr_box());
    }

    #[test]
    fn pentagon_embedding() {
        let emb = box_to_pentagon(&pr_box()).unwrap();
        assert_eq!(emb.probabilities, std::array::from_fn(|_| rat(1, 2)));
        assert_eq!(emb.sum, rat(5, 2));
        assert_eq!(emb.certificate.len(), 5);
        let observables: Vec<&str> = emb.certificate.iter().map(|w| w.observable.as_str()).collect();
        assert_eq!(observables, ["a1", "b2", "a2", "b1", "a1"]);

        let uniform = box_to_pentagon(&BipartiteBox::uniform()).unwrap();
        assert_eq!(uniform.sum, rat(5, 4));
    }

    #[test]
    fn deterministic_boxes_stay_within_wright_bound() {
        let best = local_strategies()
            .into_iter()
            .map(|s| box_to_pentagon(&BipartiteBox::deterministic(s)).unwrap().sum)
            .max()
            .unwrap();
        assert_eq!(best, int(2));
    }

    #[test]
    fn json_round_trip_and_errors() {
        let text = pr_box().to_json();
        assert_eq!(parse_box(&text).unwrap(), pr_box());
        let table1 = r#"{"p": {
            "11": {"++": "0", "+-": "1/2", "-+": "1/2", "--": "0"},
            "12": {"++": "0", "+-": "1/2", "-+": "1/2", "--": "0"},
            "21": {"++": "0", "+-": "1/2", "-+": "1/2", "--": "0"},
            "22": {"++": "1/2", "+-": "0", "-+": "0", "--": "1/2"}}}"#;
        assert_eq!(parse_box(table1).unwrap(), pr_box());
        assert!(matches!(parse_box(r#"{"p": {}}"#), Err(BoxError::Format(_))));
        assert!(matches!(parse_box("{"), Err(BoxError::Format(_))));
        let bad = table1.replace(r#""22": {"++": "1/2""#, r#""22": {"++": "1/3""#);
        assert!(matches!(parse_box(&bad), Err(BoxError::NotNormalized { .. })));
    }

    fn any_box() -> impl Strategy<Value = BipartiteBox> {
        // Mixtures of deterministic boxes and PR boxes are no-signaling.
        (prop::collection::vec(1u32..20, 24)).prop_map(|w| {
            let total: u32 = w.iter().sum();
            let mut parts: Vec<BipartiteBox> = local_strategies().into_iter().map(BipartiteBox::deterministic).collect();
            parts.extend(pr_boxes());
            BipartiteBox::from_fn(|m, n, r, s| {
                parts.iter().zip(&w).fold(Rational::zero(), |acc, (b, &wi)| {
                    acc + rat(wi as i64, total as i64) * b.prob(m, n, r, s)
                })
            })
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn ceiling_and_affinity(a in any_box(), b in any_box(), num in 0i64..=10) {
            prop_assert!(is_no_signaling(&a));
            prop_assert!(chsh_symmetrized(&a) <= int(4));
            let t = rat(num, 10);
            let mixed = a.mix(&b, &t).unwrap();
            let (ca, cb, cm) = (a.correlators(), b.correlators(), mixed.correlators());
            for m in 0..2 {
                for n in 0..2 {
                    prop_assert_eq!(&cm[m][n], &(&t * &ca[m][n] + (int(1) - &t) * &cb[m][n]));
                }
            }
            prop_assert_eq!(box_to_pentagon(&a).unwrap().certificate.len(), 5);
        }
    }
}
