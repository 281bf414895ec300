//! Acceptance checks. Prints one `[PASS]`/`[FAIL]` line per criterion and exits nonzero on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qprob::bounds::{
    classical_max, kcbs_from_sum, kcbs_from_sum_f64, kcbs_value, logic_max, search_pentagon_projectors,
    umbrella_value, WeightedEventFamily,
};
use qprob::boxes::{
    box_to_pentagon, chsh_symmetrized, classical_chsh_max, is_no_signaling, pr_box, pr_boxes,
    quantum_chsh, tsirelson_angles,
};
use qprob::hilbert::{
    check_t_properties, check_u_properties, i2_witness, interference_instance, interference_scan,
    PropertyReport,
};
use qprob::logic::{orthogonality_graph, pentagon_logic, pentagon_state, OrthogonalityGraph};
use qprob::rational::{int, rat};

const MASTER_SEED: u64 = 1;
const SEARCH_SEED: u64 = 7;
const SEARCH_TRIALS: u64 = 2000;
const CORPUS_SIZE: usize = 1000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn qprob(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qprob"))
        .args(args)
        .output()
        .expect("qprob runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 report"))
}

fn field<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    let prefix = format!("{key}: ");
    report.lines().find_map(|l| l.strip_prefix(prefix.as_str()))
}

fn float_field(report: &str, key: &str) -> f64 {
    field(report, key).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn criterion_1() -> Outcome {
    let logic = pentagon_logic();
    let (result, elapsed) = timed(|| {
        let family = WeightedEventFamily::pentagon(&logic).unwrap();
        logic_max(&family).unwrap()
    });
    let wright = pentagon_state(&logic).unwrap();
    let (code, report) = qprob(&["bounds", "pentagon"]);
    let pass = result.value == rat(5, 2)
        && result.maximizers == vec![wright]
        && code == 0
        && field(&report, "logic max") == Some("5/2")
        && field(&report, "maximizers") == Some("1")
        && field(&report, "maximizer is pentagon state") == Some("true")
        && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "logic max {} with {} maximizer(s), pentagon state unique; {:.3} s",
            result.value,
            result.maximizers.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let (value, elapsed) = timed(|| classical_max(&OrthogonalityGraph::cycle(5), &[int(1), int(1), int(1), int(1), int(1)]));
    let logic = pentagon_logic();
    let e: Vec<usize> = (1..=5).map(|k| logic.atom_index(&format!("e{k}")).unwrap()).collect();
    let graph = orthogonality_graph(&logic).induced(&e);
    let (_, report) = qprob(&["bounds", "pentagon"]);
    let pass = value == int(2)
        && graph.is_cycle_in_order()
        && field(&report, "classical max") == Some("2")
        && elapsed < Duration::from_secs(1);
    outcome(pass, format!("classical max on C5 = {value}; {:.3} s", elapsed.as_secs_f64()))
}

fn criterion_3() -> Outcome {
    let sqrt5 = 5f64.sqrt();
    let ((umbrella, search), elapsed) = timed(|| {
        (
            umbrella_value().unwrap(),
            search_pentagon_projectors(3, SEARCH_TRIALS, SEARCH_SEED).unwrap(),
        )
    });
    let (code, report) = qprob(&["quantum", "--dim", "3", "--trials", "2000", "--seed", "7"]);
    let cli_best = float_field(&report, "best value");
    let pass = (umbrella - sqrt5).abs() <= 1e-9
        && search.best >= sqrt5 - 1e-2
        && search.best <= sqrt5 + 1e-9
        && search.best < 2.5
        && code == 0
        && (cli_best - search.best).abs() <= 1e-10
        && field(&report, "below 5/2") == Some("true")
        && elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "umbrella {umbrella:.12}, search best {:.12} (trial {}), sqrt5 {sqrt5:.12}; {:.3} s",
            search.best,
            search.best_trial,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_4_and_5() -> (Outcome, Outcome) {
    let (summary, elapsed) = timed(|| interference_scan(&[3, 4, 5, 6], CORPUS_SIZE, MASTER_SEED).unwrap());
    let (code, report) = qprob(&["interference", "--samples", "1000", "--seed", "1"]);
    let cli_i3 = float_field(&report, "max |I3|");
    let cli_t = float_field(&report, "max T-additivity residual");
    let four = outcome(
        summary.max_abs_i3 <= 1e-9 && cli_i3 <= 1e-9 && code == 0 && elapsed < Duration::from_secs(60),
        format!(
            "max |I3| = {:.3e} over {} instances in dims 3-6; {:.3} s",
            summary.max_abs_i3,
            summary.instances,
            elapsed.as_secs_f64()
        ),
    );
    let five = outcome(
        summary.max_t_additivity <= 1e-9 && cli_t <= 1e-9,
        format!("max |T_(e+f) x - T_e x - T_f x| = {:.3e}", summary.max_t_additivity),
    );
    (four, five)
}

/// Coarse grid over real pure states in dimension 3.
fn grid_i2() -> f64 {
    let unit = |t: f64, p: f64| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
    let steps = 6;
    let angle = |k: usize| k as f64 * std::f64::consts::PI / steps as f64;
    let mut best: f64 = 0.0;
    for a in 0..=steps {
        for b in 0..2 * steps {
            let psi = unit(angle(a), angle(b));
            for c in 0..=steps {
                for d in 0..2 * steps {
                    let phi = unit(angle(c), angle(d));
                    let x = phi[0] * psi[0];
                    let y = phi[1] * psi[1];
                    best = best.max(((x + y).powi(2) - x * x - y * y).abs());
                }
            }
        }
    }
    best
}

fn criterion_6() -> Outcome {
    let witness = i2_witness().unwrap();
    let grid = grid_i2();
    let (_, report) = qprob(&["interference", "--samples", "10", "--seed", "1"]);
    let pass = witness.value.abs() >= 0.1
        && grid >= 0.1
        && field(&report, "|I2| >= 0.1") == Some("true");
    outcome(pass, format!("fixture I2 = {:.12}, grid oracle max |I2| = {grid:.6}", witness.value))
}

fn criterion_7() -> Outcome {
    let ((classical, quantum, boxes), elapsed) = timed(|| {
        let (a, b) = tsirelson_angles();
        (classical_chsh_max(), quantum_chsh(a, b), pr_boxes())
    });
    let all_pr = boxes.len() == 8 && boxes.iter().all(|b| is_no_signaling(b) && chsh_symmetrized(b) == int(4));
    let (code, report) = qprob(&["chsh-bounds"]);
    let pass = classical == int(2)
        && (quantum - 2.0 * 2f64.sqrt()).abs() <= 1e-9
        && all_pr
        && code == 0
        && field(&report, "pr boxes verified") == Some("8")
        && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "classical {classical}, singlet {quantum:.12}, {} PR boxes no-signaling with CHSH 4; {:.3} s",
            boxes.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_8() -> Outcome {
    let embedding = box_to_pentagon(&pr_box()).unwrap();
    let logic = pentagon_logic();
    let bound = logic_max(&WeightedEventFamily::pentagon(&logic).unwrap()).unwrap().value;
    let (code, report) = qprob(&["box", "pr1", "--pentagon"]);
    let pass = embedding.sum == rat(5, 2)
        && embedding.sum == bound
        && embedding.certificate.len() == 5
        && code == 0
        && field(&report, "sum mu(e_k)") == Some("5/2");
    outcome(pass, format!("PR box gives sum {} = logic max {bound}", embedding.sum))
}

fn criterion_9() -> Outcome {
    let logic = pentagon_logic();
    let wright = pentagon_state(&logic).unwrap();
    let e: [_; 5] = std::array::from_fn(|k| wright.atom(logic.atom_index(&format!("e{}", k + 1)).unwrap()).clone());
    let pentagon = kcbs_value(&e);
    let classical = kcbs_from_sum(&int(2));
    let quantum = kcbs_from_sum_f64(umbrella_value().unwrap());
    let pass = pentagon == int(-5) && classical == int(-3) && (quantum - (5.0 - 4.0 * 5f64.sqrt())).abs() <= 1e-6;
    outcome(pass, format!("K = {pentagon} (pentagon), {classical} (classical), {quantum:.9} (quantum)"))
}

fn criterion_10() -> Outcome {
    let mut u = PropertyReport::default();
    let mut t = PropertyReport::default();
    for i in 0..250u64 {
        let inst = interference_instance(3 + (i % 4) as usize, MASTER_SEED, i).unwrap();
        let samples = [inst.observable.clone(), inst.target.as_hermitian().clone()];
        let states = [inst.rho.clone()];
        for e in inst.triple.events().iter().chain([&inst.target]) {
            u.merge(&check_u_properties(e, &samples, &states).unwrap());
            t.merge(&check_t_properties(e, &samples, &states).unwrap());
        }
    }
    let (code, report) = qprob(&["interference", "--samples", "1000", "--seed", "1"]);
    let cli_u = float_field(&report, "U max residual");
    let cli_t = float_field(&report, "T max residual");
    let logic = pentagon_logic();
    let structural = orthogonality_graph(&logic).edges().len() == 15
        && pr_boxes().iter().all(|b| is_no_signaling(&b.mix(&pr_box(), &rat(1, 3)).unwrap()));
    let pass = u.max_residual() <= 1e-9
        && t.max_residual() <= 1e-9
        && cli_u <= 1e-9
        && cli_t <= 1e-9
        && code == 0
        && structural;
    outcome(
        pass,
        format!(
            "U max residual {:.3e} ({} properties), T max residual {:.3e} ({} properties); proptest suites run under cargo test",
            u.max_residual(),
            u.checks.len(),
            t.max_residual(),
            t.checks.len()
        ),
    )
}

fn main() -> ExitCode {
    let (four, five) = criterion_4_and_5();
    let results = [
        ("pentagon logic-level bound 5/2, unique maximizer", criterion_1()),
        ("classical bound 2 on C5", criterion_2()),
        ("quantum pentagon ceiling sqrt5 < 5/2", criterion_3()),
        ("Sorkin I3 = 0 on randomized corpus", four),
        ("T-additivity on randomized corpus", five),
        ("second-order interference witness", criterion_6()),
        ("CHSH tiers 2, 2 sqrt2, 4", criterion_7()),
        ("PR box embedding gives 5/2", criterion_8()),
        ("KCBS values -5, -3, 5 - 4 sqrt5", criterion_9()),
        ("property suites and U/T reports", criterion_10()),
    ];
    let mut failures = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, o.detail);
        if !o.pass {
            failures += 1;
        }
    }
    println!("acceptance: {} passed, {failures} failed", results.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
