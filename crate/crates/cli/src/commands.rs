use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use qprob::bounds::{
    bound_report, kcbs_from_sum, kcbs_from_sum_f64, search_pentagon_projectors, umbrella_value,
    WeightedEventFamily, FLOAT_TOLERANCE,
};
use qprob::boxes::{
    box_to_pentagon, chsh, chsh_symmetrized, classical_chsh_max, local_strategies,
    no_signaling_check, parse_box, pr_boxes, quantum_chsh, tsirelson_angles, BipartiteBox,
};
use qprob::hilbert::{
    check_t_properties, check_u_properties, i2_witness, interference_instance, interference_scan,
    PropertyReport,
};
use qprob::logic::{parse_logic, pentagon_logic, pentagon_state, GreechieLogic};
use qprob::rational::{format_rational, int, parse_rational, rat};
use qprob::Rational;

use crate::report::{format_float, RunReport};

/// Acceptance-grade tolerance for floating-point identities checked at runtime.
pub const RUNTIME_TOLERANCE: f64 = 1e-9;
/// Instances of the interference corpus that also get the U/T property checks.
pub const PROPERTY_INSTANCES: usize = 200;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or malformed input. Exit code 2.
    Input(anyhow::Error),
    /// A checked invariant failed at runtime. Exit code 3.
    Invariant(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "input error: {e:#}"),
            Failure::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

fn invariant(condition: bool, message: impl FnOnce() -> String) -> Result<(), Failure> {
    if condition {
        Ok(())
    } else {
        Err(Failure::Invariant(message()))
    }
}

/// Canonical inputs for the digest: the echoed arguments, then any input file's bytes.
pub struct Inputs {
    pub command: String,
    bytes: Vec<u8>,
}

impl Inputs {
    pub fn new(args: &[String]) -> Self {
        let mut bytes = Vec::new();
        for a in args {
            bytes.extend_from_slice(a.as_bytes());
            bytes.push(b'\n');
        }
        let command = std::iter::once("qprob")
            .chain(args.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(" ");
        Inputs { command, bytes }
    }

    fn read(&mut self, path: &str) -> Result<String, Failure> {
        let text = fs::read_to_string(Path::new(path))
            .with_context(|| format!("cannot read {path}"))
            .map_err(input)?;
        self.bytes.extend_from_slice(text.as_bytes());
        Ok(text)
    }

    fn report(&self, seed: Option<u64>) -> RunReport {
        RunReport::new(self.command.clone(), &self.bytes, seed)
    }
}

fn split_list(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn join_rationals(values: &[Rational]) -> String {
    values.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

pub fn cmd_bounds(
    mut inputs: Inputs,
    target: &str,
    weights: Option<&str>,
    events: Option<&str>,
) -> Result<RunReport, Failure> {
    let logic: GreechieLogic = if target == "pentagon" {
        pentagon_logic()
    } else {
        let text = inputs.read(target)?;
        parse_logic(&text)
            .with_context(|| format!("invalid logic file {target}"))
            .map_err(input)?
    };
    let is_pentagon = logic.same_structure(&pentagon_logic());
    let names: Vec<String> = match events {
        Some(list) => split_list(list),
        None if is_pentagon => (1..=5).map(|k| format!("e{k}")).collect(),
        None => logic.atoms().to_vec(),
    };
    let weights: Vec<Rational> = match weights {
        Some(list) => split_list(list)
            .iter()
            .map(|w| parse_rational(w).with_context(|| format!("invalid weight {w:?}")))
            .collect::<Result<_, _>>()
            .map_err(input)?,
        None => vec![int(1); names.len()],
    };
    let family = WeightedEventFamily::new(&logic, &names, weights).map_err(input)?;
    let bounds = bound_report(&family, None).map_err(input)?;
    bounds.check().map_err(Failure::Invariant)?;

    let mut report = inputs.report(None);
    report.text("logic", if target == "pentagon" { "pentagon (built-in)".to_string() } else { target.to_string() });
    report.count("atoms", logic.atom_count());
    report.count("blocks", logic.blocks().len());
    report.text("events", names.join(" "));
    report.text("weights", join_rationals(family.weights()));
    report.exact("classical max", &bounds.classical_max);
    report.exact("logic max", &bounds.logic_max);
    report.count("maximizers", bounds.logic_maximizers.len());
    for (i, state) in bounds.logic_maximizers.iter().enumerate() {
        report.text(format!("maximizer {}", i + 1), state.describe(&logic));
    }
    report.flag("unique maximizer", bounds.logic_maximizers.len() == 1);

    let unit_pentagon = is_pentagon
        && (1..=5).all(|k| names.iter().any(|n| *n == format!("e{k}")))
        && names.len() == 5
        && family.weights().iter().all(|w| *w == int(1));
    if is_pentagon {
        let wright = pentagon_state(&logic).map_err(input)?;
        let is_wright = bounds.logic_maximizers.len() == 1 && bounds.logic_maximizers[0] == wright;
        report.flag("maximizer is pentagon state", is_wright);
        if unit_pentagon {
            invariant(bounds.logic_max == rat(5, 2) && is_wright, || {
                format!(
                    "pentagon logic max {} with {} maximizers, expected 5/2 at the pentagon state",
                    format_rational(&bounds.logic_max),
                    bounds.logic_maximizers.len()
                )
            })?;
            invariant(bounds.classical_max == int(2), || {
                format!("classical max {} on C5, expected 2", format_rational(&bounds.classical_max))
            })?;
            report.exact("kcbs at logic max", &kcbs_from_sum(&bounds.logic_max));
            report.exact("kcbs classical", &kcbs_from_sum(&bounds.classical_max));
            report.float("kcbs quantum", kcbs_from_sum_f64(5f64.sqrt()));
        }
    }
    Ok(report)
}

pub fn cmd_quantum(inputs: Inputs, dim: usize, trials: u64, seed: u64) -> Result<RunReport, Failure> {
    let outcome = search_pentagon_projectors(dim, trials, seed).map_err(input)?;
    let umbrella = umbrella_value().map_err(|e| Failure::Invariant(e.to_string()))?;
    let sqrt5 = 5f64.sqrt();
    invariant((umbrella - sqrt5).abs() <= RUNTIME_TOLERANCE, || {
        format!("umbrella value {umbrella} differs from sqrt(5)")
    })?;
    invariant(outcome.best <= sqrt5 + FLOAT_TOLERANCE, || {
        format!("search value {} exceeds sqrt(5)", outcome.best)
    })?;
    let below = outcome.best < 2.5 && umbrella < 2.5;
    invariant(below, || format!("quantum value {} reaches 5/2", outcome.best))?;

    let mut report = inputs.report(Some(seed));
    report.count("dimension", dim);
    report.count("trials", trials);
    report.float("best value", outcome.best);
    report.count("best trial", outcome.best_trial);
    report.float("gap to sqrt(5)", sqrt5 - outcome.best);
    report.float("kcbs at best", kcbs_from_sum_f64(outcome.best));
    report.float("umbrella value", umbrella);
    report.float("sqrt(5)", sqrt5);
    report.text("logic ceiling", "5/2");
    report.flag("below 5/2", below);
    Ok(report)
}

fn property_lines(report: &mut RunReport, prefix: &str, properties: &PropertyReport) {
    for c in &properties.checks {
        report.text(
            format!("{prefix} {}", c.name),
            format!("max residual {} over {} cases", format_float(c.max_residual), c.cases),
        );
    }
    report.float(format!("{prefix} max residual"), properties.max_residual());
}

pub fn cmd_interference(
    inputs: Inputs,
    dim: Option<usize>,
    samples: usize,
    seed: u64,
) -> Result<RunReport, Failure> {
    let dims: Vec<usize> = match dim {
        Some(d) if (3..=16).contains(&d) => vec![d],
        Some(d) => return Err(input(anyhow!("dimension {d} is outside the supported range 3..=16"))),
        None => vec![3, 4, 5, 6],
    };
    if samples == 0 {
        return Err(input(anyhow!("at least one sample is required")));
    }
    let hilbert = |e: qprob::hilbert::HilbertError| Failure::Invariant(e.to_string());
    let summary = interference_scan(&dims, samples, seed).map_err(hilbert)?;

    let mut u_report = PropertyReport::default();
    let mut t_report = PropertyReport::default();
    for i in 0..samples.min(PROPERTY_INSTANCES) {
        let d = dims[i % dims.len()];
        let inst = interference_instance(d, seed, i as u64).map_err(hilbert)?;
        let samples = [inst.observable.clone(), inst.target.as_hermitian().clone()];
        let states = [inst.rho.clone()];
        for e in inst.triple.events().iter().chain([&inst.target]) {
            u_report.merge(&check_u_properties(e, &samples, &states).map_err(hilbert)?);
            t_report.merge(&check_t_properties(e, &samples, &states).map_err(hilbert)?);
        }
    }
    let witness = i2_witness().map_err(hilbert)?;

    let checks = [
        ("max |I3|", summary.max_abs_i3),
        ("T-additivity residual", summary.max_t_additivity),
        ("T form gap", summary.max_t_form_gap),
        ("conditional state gap", summary.max_conditional_state_gap),
        ("U property residual", u_report.max_residual()),
        ("T property residual", t_report.max_residual()),
    ];
    for (name, value) in checks {
        invariant(value <= RUNTIME_TOLERANCE, || format!("{name} = {value:e} exceeds 1e-9"))?;
    }
    invariant(witness.value.abs() >= 0.1, || format!("I2 witness {} is below 0.1", witness.value))?;

    let mut report = inputs.report(Some(seed));
    report.text("dimensions", dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" "));
    report.count("instances", summary.instances);
    report.float("max |I3|", summary.max_abs_i3);
    report.float("max T-additivity residual", summary.max_t_additivity);
    report.float("max T form gap", summary.max_t_form_gap);
    report.float("max conditional state gap", summary.max_conditional_state_gap);
    report.count("property instances", samples.min(PROPERTY_INSTANCES));
    property_lines(&mut report, "U", &u_report);
    property_lines(&mut report, "T", &t_report);
    report.text("I2 witness psi", "(1, 1, 0)/sqrt(2)");
    report.text("I2 witness phi", "(1, 1, 1)/sqrt(3)");
    report.text("I2 witness events", "e1 = |0><0|, e2 = |1><1|");
    report.float("I2 witness value", witness.value);
    report.flag("|I2| >= 0.1", witness.value.abs() >= 0.1);
    Ok(report)
}

fn builtin_box(name: &str) -> Option<BipartiteBox> {
    if name == "uniform" {
        return Some(BipartiteBox::uniform());
    }
    let k: usize = name.strip_prefix("pr")?.parse().ok()?;
    pr_boxes().get(k.checked_sub(1)?).cloned()
}

pub fn cmd_box(mut inputs: Inputs, target: &str, pentagon: bool) -> Result<RunReport, Failure> {
    let (bx, builtin) = match builtin_box(target) {
        Some(b) => (b, true),
        None => {
            if !Path::new(target).exists() {
                return Err(input(anyhow!(
                    "{target} is neither a file nor a built-in box (pr1..pr8, uniform)"
                )));
            }
            let text = inputs.read(target)?;
            let b = parse_box(&text)
                .with_context(|| format!("invalid box file {target}"))
                .map_err(input)?;
            (b, false)
        }
    };
    let violations = no_signaling_check(&bx);
    let value = chsh(&bx);
    let best = chsh_symmetrized(&bx);
    invariant(best <= int(4), || format!("CHSH {} exceeds the algebraic maximum 4", format_rational(&best)))?;
    if builtin && target.starts_with("pr") {
        invariant(violations.is_empty() && best == int(4), || {
            format!("{target} should be no-signaling with CHSH 4")
        })?;
    }

    let mut report = inputs.report(None);
    report.text("box", if builtin { format!("{target} (built-in)") } else { target.to_string() });
    if violations.is_empty() {
        report.text("no-signaling", "ok");
    } else {
        report.text("no-signaling", format!("violated ({} identities)", violations.len()));
        for (i, v) in violations.iter().enumerate() {
            report.text(format!("violation {}", i + 1), v.to_string());
        }
    }
    let c = bx.correlators();
    for (m, row) in c.iter().enumerate() {
        for (n, value) in row.iter().enumerate() {
            report.exact(format!("c{}{}", m + 1, n + 1), value);
        }
    }
    report.exact("chsh |c11 + c12 + c21 - c22|", &value);
    report.exact("chsh best sign placement", &best);

    if pentagon {
        let embedding = box_to_pentagon(&bx).map_err(|e| Failure::Invariant(e.to_string()))?;
        if violations.is_empty() {
            invariant(embedding.sum <= rat(5, 2), || {
                format!("no-signaling box gives sum {} above 5/2", format_rational(&embedding.sum))
            })?;
        }
        let events = qprob::boxes::pentagon_box_events();
        for (k, p) in embedding.probabilities.iter().enumerate() {
            report.text(format!("mu(e{}) [{}]", k + 1, events[k]), format_rational(p));
        }
        report.exact("sum mu(e_k)", &embedding.sum);
        report.exact("kcbs", &kcbs_from_sum(&embedding.sum));
        for w in &embedding.certificate {
            report.text(
                format!("exclusive e{} e{}", w.first, w.second),
                format!("opposite values of {}", w.observable),
            );
        }
        report.flag("equals logic max 5/2", embedding.sum == rat(5, 2));
    }
    Ok(report)
}

pub fn cmd_chsh_bounds(inputs: Inputs) -> Result<RunReport, Failure> {
    let classical = classical_chsh_max();
    let (alpha, beta) = tsirelson_angles();
    let quantum = quantum_chsh(alpha, beta);
    let tsirelson = 2.0 * 2f64.sqrt();
    let boxes = pr_boxes();

    invariant(classical == int(2), || format!("classical CHSH {}", format_rational(&classical)))?;
    invariant((quantum - tsirelson).abs() <= RUNTIME_TOLERANCE, || {
        format!("singlet CHSH {quantum} differs from 2 sqrt(2)")
    })?;
    invariant(boxes.len() == 8, || format!("{} PR boxes instead of 8", boxes.len()))?;

    let mut report = inputs.report(None);
    report.count("deterministic strategies", local_strategies().len());
    report.exact("classical max", &classical);
    report.text("singlet alice angles", format!("{} {}", format_float(alpha[0]), format_float(alpha[1])));
    report.text("singlet bob angles", format!("{} {}", format_float(beta[0]), format_float(beta[1])));
    report.float("quantum (singlet)", quantum);
    report.float("2 sqrt(2)", tsirelson);
    let mut verified = 0;
    for (i, bx) in boxes.iter().enumerate() {
        let ns = no_signaling_check(bx).is_empty();
        let value = chsh_symmetrized(bx);
        invariant(ns && value == int(4), || format!("pr{} fails: no-signaling {ns}, CHSH {value}", i + 1))?;
        verified += 1;
        report.text(
            format!("pr{}", i + 1),
            format!("no-signaling ok, chsh {}", format_rational(&value)),
        );
    }
    report.text("algebraic max", "4");
    report.count("pr boxes verified", verified);
    Ok(report)
}
