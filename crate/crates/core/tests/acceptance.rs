//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mosoo_core::indicators::{
    additive_epsilon, conflict_dimension, hypervolume_2d, sample_reference_front, unary_epsilon, EpsilonTracker,
    ReferenceFront,
};
use mosoo_core::optimizer::{mosoo_run, soo_run, HMaxPolicy, Mosoo, OptimizerConfig, RunTrace};
use mosoo_core::pareto::{dominates, nd_filter, ObjectiveVector};
use mosoo_core::problems::{classic_biobjective, holder_family, quadratic, worked_example, ObjectiveFn};
use mosoo_core::theory::{BoundModel, HolderForm, MultiplierSource};
use mosoo_core::{HyperBox, Problem, SplitPolicy};

type Outcome = Result<String, String>;

const LOSS_TOL: f64 = 1e-12;
const INDICATOR_SLACK: f64 = 2e-2;
const CONSISTENCY_EPS: f64 = 0.05;
const BUDGET: usize = 10_000;
const FRONT_SAMPLES: usize = 100_000;

fn ov(v: Vec<f64>) -> ObjectiveVector {
    ObjectiveVector::new(v).expect("finite vector")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---------------------------------------------------------------- 1

fn golden_trace() -> Outcome {
    let start = Instant::now();
    let p = worked_example();
    let root_value = p.evaluate(&[0.0, 0.0]).map_err(err)?;
    ensure(
        (root_value[0] - 0.4981).abs() < 1e-12 && (root_value[1] - 0.4981).abs() < 1e-12,
        || format!("f(0,0) = {:?}", root_value.values()),
    )?;
    let cfg = OptimizerConfig {
        k: 3,
        budget: 13,
        hmax: HMaxPolicy::Unbounded,
        split: SplitPolicy::Sequential,
        seed: 0,
    };
    let mut run = Mosoo::new(&p, cfg).map_err(err)?;

    ensure(run.step().map_err(err)?, || "iteration 1 did not run".into())?;
    let r1 = run.trace().iterations[0].clone();
    ensure(r1.depth == 0 && r1.expanded == vec![run.tree().root()], || format!("iteration 1: {r1:?}"))?;
    ensure(run.tree().leaf_count() == 3, || format!("leaves after 1: {}", run.tree().leaf_count()))?;
    let reps: Vec<Vec<f64>> = run.tree().leaves_at(1).iter().map(|&id| run.tree().node(id).rep.clone()).collect();
    let expected = [[-2.0 / 3.0, 0.0], [0.0, 0.0], [2.0 / 3.0, 0.0]];
    let close = reps.len() == 3
        && reps
            .iter()
            .zip(&expected)
            .all(|(r, e)| r.iter().zip(e).all(|(a, b)| (a - b).abs() <= 1e-15));
    ensure(close, || format!("depth-1 reps {reps:?}"))?;
    ensure(run.evaluations() == 3, || format!("evaluations after 1: {}", run.evaluations()))?;

    run.step().map_err(err)?;
    let r2 = run.trace().iterations[1].clone();
    ensure(r2.selected.len() == 1, || format!("Q_2 = {:?}", r2.selected))?;
    let q2 = run.tree().node(r2.selected[0]);
    ensure(q2.rep == vec![0.0, 0.0] && q2.depth == 1, || format!("Q_2 node {:?}", q2.rep))?;
    ensure(run.tree().leaf_count() == 5, || format!("leaves after 2: {}", run.tree().leaf_count()))?;

    run.step().map_err(err)?;
    let r3 = run.trace().iterations[2].clone();
    ensure(r3.depth == 2 && r3.expanded.len() == 1, || format!("iteration 3: {r3:?}"))?;
    ensure(run.tree().leaf_count() == 7, || format!("leaves after 3: {}", run.tree().leaf_count()))?;

    run.step().map_err(err)?;
    let r4 = run.trace().iterations[3].clone();
    let p4 = run.tree().leaves_at(3).len();
    ensure(r4.depth == 3 && r4.leaves == 3 && r4.expanded.len() == 3, || format!("iteration 4: {r4:?}"))?;
    ensure(p4 == 0, || format!("{p4} depth-3 leaves left after iteration 4"))?;
    ensure(run.tree().leaf_count() == 13, || format!("leaves after 4: {}", run.tree().leaf_count()))?;
    ensure(!run.step().map_err(err)?, || "budget 13 should stop after iteration 4".into())?;
    ensure(run.evaluations() == 13, || format!("evaluations {}", run.evaluations()))?;

    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("Q_2 = {{(0,0)}}, |Q_4| = 3, 13 leaves, {elapsed:.1?}"))
}

// ---------------------------------------------------------------- 2

fn lemma_problem(rng: &mut ChaCha8Rng) -> Problem {
    match rng.gen_range(0..5) {
        0 => worked_example(),
        1 => classic_biobjective("schaffer").unwrap(),
        2 => classic_biobjective("fonseca").unwrap(),
        3 => quadratic(),
        _ => {
            let n = rng.gen_range(1..=2);
            let alpha = [rng.gen_range(1.0..3.0), rng.gen_range(1.0..3.0)];
            let a1 = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let a2 = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            holder_family(n, alpha, a1, a2).unwrap()
        }
    }
}

/// Sampled front merged with the known extrema `f(x*_j)`.
fn augmented_front(p: &Problem, samples: usize, seed: u64) -> Result<(ReferenceFront, Vec<ObjectiveVector>), String> {
    let extrema = p.extrema().ok_or("no metadata")?.map_err(err)?;
    let front = sample_reference_front(p, samples, seed)
        .and_then(|f| f.augmented_with(&extrema))
        .map_err(err)?;
    Ok((front, extrema))
}

/// Per-iteration unary epsilon of the archive, maintained incrementally.
fn epsilon_curve(trace: &RunTrace, front: &ReferenceFront) -> Result<Vec<f64>, String> {
    let mut tracker = EpsilonTracker::new(front);
    tracker.offer(&trace.evaluations[0].value).map_err(err)?;
    let mut curve = Vec::with_capacity(trace.iterations.len());
    trace
        .replay(|_, _, fresh| {
            for e in fresh {
                tracker.offer(&e.value)?;
            }
            curve.push(tracker.value());
            Ok(())
        })
        .map_err(err)?;
    Ok(curve)
}

fn loss_curve(trace: &RunTrace, ideal: &ObjectiveVector) -> Result<Vec<Vec<f64>>, String> {
    let mut best = trace.evaluations[0].value.values().to_vec();
    let mut seen = 1;
    let mut out = Vec::with_capacity(trace.iterations.len());
    for r in &trace.iterations {
        for e in &trace.evaluations[seen..r.evaluations] {
            for (b, v) in best.iter_mut().zip(e.value.values()) {
                *b = b.min(*v);
            }
        }
        seen = r.evaluations;
        out.push(best.iter().zip(ideal.values()).map(|(b, y)| b - y).collect());
    }
    Ok(out)
}

fn epsilon_bounds_loss() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut checked = 0usize;
    for run in 0..20 {
        let p = lemma_problem(&mut rng);
        let cfg = OptimizerConfig {
            k: [2, 3, 4, 5][rng.gen_range(0..4)],
            budget: rng.gen_range(200..3000),
            hmax: HMaxPolicy::power(rng.gen_range(0.2..0.8)).unwrap(),
            split: if rng.gen_bool(0.5) { SplitPolicy::Random } else { SplitPolicy::Sequential },
            seed: rng.gen(),
        };
        let out = mosoo_run(&p, cfg).map_err(err)?;
        let (front, _) = augmented_front(&p, 10_000, run)?;
        let ideal = &p.metadata().unwrap().ideal;
        let eps = epsilon_curve(&out.trace, &front)?;
        let loss = loss_curve(&out.trace, ideal)?;
        for (t, (e, r)) in eps.iter().zip(&loss).enumerate() {
            let worst = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            ensure(*e >= worst - LOSS_TOL, || {
                format!("run {run} ({}) iteration {}: epsilon {e} < max loss {worst}", p.id(), t + 1)
            })?;
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} iterations over 20 runs, {elapsed:.1?}"))
}

// ---------------------------------------------------------------- 3, 4

const CONFIGS: [(f64, f64); 4] = [(0.0, 1.0), (0.21, 0.81), (0.47, 0.61), (0.57, 0.57)];

struct Instance {
    label: String,
    trace: RunTrace,
    hmax: HMaxPolicy,
    loss: Vec<Vec<f64>>,
    eps: Vec<f64>,
    psi: f64,
    n: usize,
}

fn holder_instances() -> Result<Vec<Instance>, String> {
    let mut out = Vec::new();
    for n in [1usize, 2] {
        for (i, &(a1, a2)) in CONFIGS.iter().enumerate() {
            let p = holder_family(n, [1.0, 1.0], vec![a1; n], vec![a2; n]).map_err(err)?;
            let hmax = HMaxPolicy::power(0.5).unwrap();
            let cfg = OptimizerConfig {
                k: 3,
                budget: BUDGET,
                hmax,
                split: SplitPolicy::Sequential,
                seed: 0,
            };
            let run = mosoo_run(&p, cfg).map_err(err)?;
            let extrema = p.extrema().unwrap().map_err(err)?;
            let sampled = sample_reference_front(&p, FRONT_SAMPLES, 1000 + i as u64).map_err(err)?;
            let psi = conflict_dimension(&extrema, &sampled).map_err(err)?.max(0.0);
            let front = sampled.augmented_with(&extrema).map_err(err)?;
            out.push(Instance {
                label: format!("n={n} ({a1},{a2})"),
                loss: loss_curve(&run.trace, &p.metadata().unwrap().ideal)?,
                eps: epsilon_curve(&run.trace, &front)?,
                trace: run.trace,
                hmax,
                psi,
                n,
            });
        }
    }
    Ok(out)
}

fn bound_model(form: HolderForm, inst: &Instance) -> BoundModel {
    BoundModel::holder(form, [1.0, 1.0], [1.0, 1.0], 3, inst.n, 2.0, inst.psi).expect("valid model")
}

/// Checks one envelope at one iteration; `Err` carries measured and bound
/// values.
type Check<'a> = dyn Fn(&Instance, &BoundModel, usize, f64, usize, usize) -> Result<(), String> + 'a;

/// First iteration where `check` fails for the given form, if any.
fn first_violation(inst: &Instance, form: HolderForm, check: &Check) -> Option<String> {
    let model = bound_model(form, inst);
    let source = MultiplierSource::recorded(&inst.trace);
    inst.trace.iterations.iter().enumerate().find_map(|(i, r)| {
        let mult = source.multiplier(r.t).ok()?;
        check(inst, &model, r.t, mult, inst.hmax.value(r.t), i)
            .err()
            .map(|why| format!("{} at t={} ({why})", inst.label, r.t))
    })
}

fn envelope(instances: &[Instance], check: &Check) -> Outcome {
    let mut holding = Vec::new();
    let mut report = Vec::new();
    for form in [HolderForm::Verbatim, HolderForm::CellDiameter] {
        let failures: Vec<String> = instances
            .iter()
            .filter_map(|inst| first_violation(inst, form, check))
            .collect();
        if failures.is_empty() {
            holding.push(format!("{form:?}"));
        } else {
            report.push(format!("{form:?} fails on {}: {}", failures.len(), failures.join(", ")));
        }
    }
    let iterations: usize = instances.iter().map(|i| i.trace.iterations.len()).sum();
    if holding.is_empty() {
        Err(report.join("; "))
    } else {
        Ok(format!(
            "holds for {} over {iterations} iterations{}",
            holding.join(", "),
            if report.is_empty() { String::new() } else { format!(" ({})", report.join("; ")) }
        ))
    }
}

fn loss_bound_envelope(instances: &[Instance]) -> Outcome {
    envelope(instances, &|inst, model, t, mult, cap, i| {
        let bound = model.loss_bound(t, mult, cap);
        match inst.loss[i].iter().zip(&bound).position(|(r, b)| r > b) {
            None => Ok(()),
            Some(j) => {
                let r = inst.loss[i][j];
                let floor = if r <= 2.0 * f64::EPSILON { ", loss at binary64 resolution" } else { "" };
                Err(format!("r_{} = {:.3e} > {:.3e}{floor}", j + 1, r, bound[j]))
            }
        }
    })
}

fn indicator_bound_envelope(instances: &[Instance]) -> Outcome {
    envelope(instances, &|inst, model, t, mult, cap, i| {
        let bound = model.indicator_bound(t, mult, cap) + INDICATOR_SLACK;
        if inst.eps[i] <= bound {
            Ok(())
        } else {
            Err(format!("epsilon {:.3e} > {:.3e}", inst.eps[i], bound))
        }
    })
}

// ---------------------------------------------------------------- 5

fn consistency() -> Outcome {
    let p = worked_example();
    let front = sample_reference_front(&p, FRONT_SAMPLES, 5).map_err(err)?;
    let cfg = |budget| OptimizerConfig {
        budget,
        hmax: HMaxPolicy::power(0.5).unwrap(),
        ..Default::default()
    };
    let small = mosoo_run(&p, cfg(BUDGET)).map_err(err)?;
    let large = mosoo_run(&p, cfg(2 * BUDGET)).map_err(err)?;
    let e_small = unary_epsilon(small.archive.members(), &front).map_err(err)?;
    let e_large = unary_epsilon(large.archive.members(), &front).map_err(err)?;
    ensure(e_small <= CONSISTENCY_EPS, || format!("epsilon {e_small} at v={BUDGET}"))?;
    ensure(e_large <= e_small, || format!("epsilon rose from {e_small} to {e_large}"))?;
    let curve = epsilon_curve(&large.trace, &front)?;
    ensure(curve.windows(2).all(|w| w[1] <= w[0]), || "per-iteration epsilon increased".into())?;
    Ok(format!("epsilon {e_small:.4} at v={BUDGET}, {e_large:.4} at v={}", 2 * BUDGET))
}

// ---------------------------------------------------------------- 6

fn random_set(rng: &mut ChaCha8Rng, size: usize, m: usize) -> Vec<ObjectiveVector> {
    let grid = rng.gen_bool(0.5);
    (0..size)
        .map(|_| {
            ov((0..m)
                .map(|_| {
                    if grid {
                        rng.gen_range(0..8) as f64 * 0.125
                    } else {
                        rng.gen_range(0.0..1.0)
                    }
                })
                .collect())
        })
        .collect()
}

fn brute_nd(ys: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    ys.iter()
        .enumerate()
        .filter(|&(i, y)| {
            !ys.iter().any(|z| dominates(z, y).unwrap()) && !ys[..i].iter().any(|z| z == y)
        })
        .map(|(_, y)| y.clone())
        .collect()
}

fn brute_epsilon(a: &[ObjectiveVector], b: &[ObjectiveVector]) -> f64 {
    b.iter()
        .map(|y| {
            a.iter()
                .map(|x| (0..x.dim()).map(|j| x[j] - y[j]).fold(f64::NEG_INFINITY, f64::max))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..200 {
        let m = rng.gen_range(1..=4);
        let size = rng.gen_range(1..=1000);
        let ys = random_set(&mut rng, size, m);
        let fast = nd_filter(&ys).map_err(err)?.into_members();
        ensure(fast == brute_nd(&ys), || format!("nd_filter mismatch on set {i} (m={m}, size={size})"))?;
    }
    for i in 0..200 {
        let m = rng.gen_range(1..=4);
        let (sa, sb) = (rng.gen_range(1..=200), rng.gen_range(1..=200));
        let a = random_set(&mut rng, sa, m);
        let b = random_set(&mut rng, sb, m);
        let fast = additive_epsilon(&a, &b).map_err(err)?;
        let slow = brute_epsilon(&a, &b);
        ensure(fast == slow, || format!("epsilon mismatch on pair {i}: {fast} vs {slow}"))?;
    }
    let samples = 1_000_000usize;
    let mut worst_z: f64 = 0.0;
    for i in 0..50 {
        let size = rng.gen_range(1..=50);
        let front = nd_filter(&random_set(&mut rng, size, 2)).map_err(err)?.into_members();
        let reference = ov(vec![1.1, 1.1]);
        let exact = hypervolume_2d(&front, &reference).map_err(err)?;
        let mut stairs: Vec<(f64, f64)> = front.iter().map(|y| (y[0], y[1])).collect();
        stairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let hits = (0..samples)
            .filter(|_| {
                let (u, v) = (rng.gen_range(0.0..1.1), rng.gen_range(0.0..1.1));
                let k = stairs.partition_point(|s| s.0 <= u);
                k > 0 && stairs[k - 1].1 <= v
            })
            .count();
        let area = 1.1 * 1.1;
        let frac = hits as f64 / samples as f64;
        let estimate = area * frac;
        let se = area * (frac * (1.0 - frac) / samples as f64).sqrt();
        let z = if se > 0.0 { (estimate - exact).abs() / se } else { (estimate - exact).abs() / 1e-300 };
        ensure(z <= 3.0, || format!("hypervolume front {i}: exact {exact}, MC {estimate}, {z:.2} SE"))?;
        worst_z = worst_z.max(z);
    }
    Ok(format!("200 ND sets, 200 epsilon pairs exact; HV worst deviation {worst_z:.2} SE"))
}

// ---------------------------------------------------------------- 7

fn accounting_holds(trace: &RunTrace, k: usize, budget: usize) -> Result<(), String> {
    let mut expansions = 0;
    for r in &trace.iterations {
        expansions += r.expanded.len();
        ensure(r.evaluations == 1 + (k - 1) * expansions, || {
            format!("t={} evaluations {} expansions {expansions}", r.t, r.evaluations)
        })?;
    }
    ensure(trace.evaluations.len() == 1 + (k - 1) * trace.expansions(), || "final count".into())?;
    ensure(trace.evaluations.len() <= budget, || "budget exceeded".into())
}

fn evaluation_accounting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut traces = 0;
    for _ in 0..30 {
        let k = [3, 5, 7, 9][rng.gen_range(0..4)];
        let budget = rng.gen_range(1..4000);
        let split = if rng.gen_bool(0.5) { SplitPolicy::Random } else { SplitPolicy::Sequential };
        let cfg = OptimizerConfig {
            k,
            budget,
            hmax: HMaxPolicy::power(rng.gen_range(0.1..0.9)).unwrap(),
            split,
            seed: rng.gen(),
        };
        let p = lemma_problem(&mut rng);
        let trace = if p.m() == 1 && rng.gen_bool(0.5) {
            soo_run(&p, cfg).map_err(err)?.trace
        } else {
            mosoo_run(&p, cfg).map_err(err)?.trace
        };
        accounting_holds(&trace, k, budget)?;
        traces += 1;
    }
    Ok(format!("{traces} traces with K in {{3,5,7,9}}"))
}

// ---------------------------------------------------------------- 8

fn random_scalar(rng: &mut ChaCha8Rng, id: usize) -> Problem {
    let n = rng.gen_range(1..=3);
    let waves: Vec<(Vec<f64>, f64, f64)> = (0..4)
        .map(|_| {
            let freq = (0..n).map(|_| rng.gen_range(1.0..15.0)).collect();
            (freq, rng.gen_range(0.0..6.3), rng.gen_range(0.1..1.0))
        })
        .collect();
    let centre: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let f: ObjectiveFn = std::sync::Arc::new(move |x: &[f64]| {
        let bowl: f64 = x.iter().zip(&centre).map(|(a, c)| (a - c).powi(2)).sum();
        let ripple: f64 = waves
            .iter()
            .map(|(freq, phase, amp)| {
                amp * (x.iter().zip(freq).map(|(a, w)| a * w).sum::<f64>() + phase).sin()
            })
            .sum();
        vec![bowl + 0.1 * ripple]
    });
    let bounds = HyperBox::new(vec![0.0; n], vec![1.0; n]).unwrap();
    Problem::new(format!("scalar-{id}"), bounds, 1, f).unwrap()
}

fn reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut total = 0;
    for i in 0..10 {
        let p = random_scalar(&mut rng, i);
        let cfg = OptimizerConfig {
            k: 3,
            budget: rng.gen_range(500..3000),
            hmax: HMaxPolicy::Constant { depth: rng.gen_range(5..40) },
            split: SplitPolicy::Sequential,
            seed: 0,
        };
        let a = soo_run(&p, cfg.clone()).map_err(err)?.trace;
        let b = mosoo_run(&p, cfg).map_err(err)?.trace;
        let seq = |t: &RunTrace| -> Vec<_> {
            t.iterations.iter().map(|r| (r.sweep, r.depth, r.expanded.clone())).collect()
        };
        let (sa, sb) = (seq(&a), seq(&b));
        ensure(sa == sb, || {
            let at = sa.iter().zip(&sb).position(|(x, y)| x != y).unwrap_or(sa.len().min(sb.len()));
            format!("problem {i}: sequences diverge at visit {at}")
        })?;
        total += a.expansions();
    }
    Ok(format!("10 problems, {total} identical expansions"))
}

// ----------------------------------------------------------------

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, outcome: Outcome| {
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {detail}");
            }
        }
    };
    report(1, "golden trace", golden_trace());
    report(2, "epsilon bounds loss", epsilon_bounds_loss());
    let start = Instant::now();
    match holder_instances() {
        Ok(instances) => {
            let t1 = loss_bound_envelope(&instances);
            let t2 = indicator_bound_envelope(&instances);
            let elapsed = start.elapsed();
            let timed = |o: Outcome| -> Outcome {
                if elapsed > Duration::from_secs(300) {
                    Err(format!("took {elapsed:?}"))
                } else {
                    o.map(|s| format!("{s}, {elapsed:.1?}"))
                }
            };
            report(3, "loss envelope", timed(t1));
            report(4, "indicator envelope", timed(t2));
        }
        Err(e) => {
            report(3, "loss envelope", Err(e.clone()));
            report(4, "indicator envelope", Err(e));
        }
    }
    report(5, "consistency", consistency());
    report(6, "oracle equivalence", oracle_equivalence());
    report(7, "evaluation accounting", evaluation_accounting());
    report(8, "single-objective reduction", reduction());
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
