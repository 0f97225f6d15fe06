//! Acceptance suite. Runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line per criterion; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qxx::benchgen::{self, Benchmark, DEFAULT_GATE_DENSITY, SUITE_DEPTHS, SUITE_PER_DEPTH};
use qxx::optimizer::{
    self, CircuitOutcome, FnObjective, ImportanceWeights, Objective, ParamName, ParamSpace, SuiteObjective,
    TimeoutPolicy, TrialRecord, WrsConfig,
};
use qxx::placement::{gdepth, PartialMapping};
use qxx::results::{self, LayoutRow};
use qxx::surrogate::{self, Activation, GraphFeatures, Hyper, Mlp, MlpConfig, Surrogate, SurrogateObjective};
use qxx::{place, ratio, route, verify, Circuit, Device, QxxParams, DEFAULT_SWAP_WEIGHT};

const SUITE_SEED: u64 = 2024;

type Outcome = Result<String, String>;

/// Name, check, and wall-time limit.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn suite() -> Vec<Benchmark> {
    benchgen::generate_suite(&Device::aspen16(), &SUITE_DEPTHS, SUITE_PER_DEPTH, DEFAULT_GATE_DENSITY, SUITE_SEED)
        .expect("suite generation")
}

fn random_device(rng: &mut ChaCha8Rng, n: usize) -> Device {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for _ in 0..rng.gen_range(0..=n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            edges.push((a, b));
        }
    }
    Device::new(n, &edges).expect("spanning tree keeps the device connected")
}

/// Between 1 and `max_gates` random gates on `q` qubits.
fn random_circuit(rng: &mut ChaCha8Rng, q: usize, max_gates: usize) -> Circuit {
    let gates = rng.gen_range(1..=max_gates);
    let pairs: Vec<(usize, usize)> = (0..gates)
        .map(|_| {
            let a = rng.gen_range(0..q);
            let mut b = rng.gen_range(0..q - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        })
        .collect();
    Circuit::from_pairs(q, &pairs).unwrap()
}

fn random_injection(rng: &mut ChaCha8Rng, q: usize, n: usize) -> Vec<usize> {
    let mut regs: Vec<usize> = (0..n).collect();
    for i in 0..q {
        let j = rng.gen_range(i..n);
        regs.swap(i, j);
    }
    regs.truncate(q);
    regs
}

fn all_injections(q: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(q: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for r in 0..n {
            if !cur.contains(&r) {
                cur.push(r);
                rec(q, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(q, n, &mut Vec::new(), &mut out);
    out
}

fn gdepth_of(c: &Circuit, regs: &[usize], d: &Device, p: &QxxParams) -> f64 {
    gdepth(c, &PartialMapping::from_registers(regs, d.num_registers()).unwrap(), d, p).unwrap()
}

/// Effective distances of the mapped gates, with offsets starting at zero,
/// and whether any of them was clamped at zero.
fn effective_distances(c: &Circuit, regs: &[usize], d: &Device, p: &QxxParams) -> (Vec<f64>, bool) {
    let mut off = vec![0.0; c.num_qubits()];
    let mut out = Vec::new();
    let mut clamped = false;
    for g in c.gates() {
        let h = d.hops(regs[g.control], regs[g.target]);
        let raw = if h <= 1 { 0.0 } else { f64::from(h) * p.edge_cost };
        let free = raw - off[g.control] - off[g.target];
        clamped |= raw > 0.0 && free < 0.0;
        let eff = free.max(0.0);
        out.push(eff);
        let (lo, hi) = (g.control.min(g.target), g.control.max(g.target));
        let mf = f64::from(p.movement_factor);
        off[lo] += eff / mf;
        off[hi] += eff * (mf - 1.0) / mf;
    }
    (out, clamped)
}

fn random_params(rng: &mut ChaCha8Rng, max_depth: u32, max_children: u32) -> QxxParams {
    QxxParams::new(
        max_depth,
        max_children,
        rng.gen_range(0.0..30.0),
        rng.gen_range(0.0..=1.0),
        rng.gen_range(1..=10),
        rng.gen_range(1..=10) as f64 / 10.0,
    )
}

fn known_optimal_round_trip() -> Outcome {
    let device = Device::aspen16();
    let suite = suite();
    ensure!(suite.len() == 90, "suite has {} circuits", suite.len());
    for b in &suite {
        ensure!(b.circuit.num_qubits() == 16, "{} has {} qubits", b.name, b.circuit.num_qubits());
        let mapping = b.optimal_mapping.as_ref().ok_or(format!("{} has no optimal mapping", b.name))?;
        for seed in [0, 1, 0xdead_beef] {
            let routed = route(&b.circuit, &device, mapping, seed).map_err(|e| e.to_string())?;
            ensure!(routed.swap_count() == 0, "{} seed {seed}: {} swaps", b.name, routed.swap_count());
            let r = ratio(&b.circuit, &routed.circuit, DEFAULT_SWAP_WEIGHT).map_err(|e| e.to_string())?;
            ensure!(r == 1.0, "{} seed {seed}: ratio {r}", b.name);
        }
        ensure!(
            b.circuit.depth(DEFAULT_SWAP_WEIGHT) == b.optimal_depth,
            "{} depth {} != {}",
            b.name,
            b.circuit.depth(DEFAULT_SWAP_WEIGHT),
            b.optimal_depth
        );
    }
    Ok("90 circuits, 3 router seeds each, zero swaps, ratio 1.0".into())
}

fn small_instance_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mappings = 0;
    for case in 0..50 {
        let n = rng.gen_range(2..=5);
        let q = rng.gen_range(2..=n);
        let device = random_device(&mut rng, n);
        let circuit = random_circuit(&mut rng, q, 12);
        let max_depth = rng.gen_range(q as u32..=q as u32 + 2);
        let p = random_params(&mut rng, max_depth, n as u32);
        let all = all_injections(q, n);
        mappings += all.len();
        let best = all.iter().map(|m| gdepth_of(&circuit, m, &device, &p)).fold(f64::INFINITY, f64::min);
        let found = place(&circuit, &device, &p, None).map_err(|e| e.to_string())?;
        ensure!(found.cost == best, "case {case} (Q={q}, N={n}, {p}): search {} vs brute force {best}", found.cost);
        let recomputed = gdepth_of(&circuit, &found.registers(), &device, &p);
        ensure!(recomputed == found.cost, "case {case}: reported {} but mapping costs {recomputed}", found.cost);
    }
    Ok(format!("50 instances, {mappings} mappings enumerated"))
}

fn gdepth_degenerate_cases() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for case in 0..500 {
        let n = rng.gen_range(2..=10);
        let q = rng.gen_range(2..=n);
        let device = random_device(&mut rng, n);
        let circuit = random_circuit(&mut rng, q, 30);
        let regs = random_injection(&mut rng, q, n);
        let mut p = random_params(&mut rng, 1, 1);
        p.b = 0.0;
        let (eff, _) = effective_distances(&circuit, &regs, &device, &p);
        let expected: f64 = eff.iter().sum();
        let got = gdepth_of(&circuit, &regs, &device, &p);
        worst = worst.max((got - expected).abs());
        ensure!((got - expected).abs() <= 1e-12, "case {case}: gdepth {got} vs sum {expected}");
    }
    for case in 0..500 {
        let n = rng.gen_range(2..=12);
        let device = random_device(&mut rng, n);
        let edges: Vec<(usize, usize)> = device.edges().collect();
        let pairs: Vec<(usize, usize)> =
            (0..rng.gen_range(1..=40)).map(|_| edges[rng.gen_range(0..edges.len())]).collect();
        let circuit = Circuit::from_pairs(n, &pairs).unwrap();
        let identity: Vec<usize> = (0..n).collect();
        let p = random_params(&mut rng, 1, 1);
        let got = gdepth_of(&circuit, &identity, &device, &p);
        ensure!(got == 0.0, "case {case}: all-adjacent mapping costs {got}");
    }
    Ok(format!("B=0 max error {worst:.1e} over 500 cases; 500 all-adjacent cases exactly 0"))
}

fn edge_cost_scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pairs = [(0.1, 2.0), (0.1, 5.0), (0.2, 3.0), (0.25, 4.0), (0.5, 2.0), (0.1, 10.0)];
    let (mut tested, mut attempts, mut worst) = (0, 0, 0.0f64);
    while tested < 1000 {
        attempts += 1;
        ensure!(attempts < 100_000, "only {tested} clamp-free instances found");
        let n = rng.gen_range(3..=10);
        let q = rng.gen_range(2..=n);
        let device = random_device(&mut rng, n);
        let circuit = random_circuit(&mut rng, q, 20);
        let regs = random_injection(&mut rng, q, n);
        let (e, k) = pairs[rng.gen_range(0..pairs.len())];
        let mut p = random_params(&mut rng, 1, 1);
        p.edge_cost = e;
        let mut scaled = p;
        scaled.edge_cost = k * e;
        if effective_distances(&circuit, &regs, &device, &p).1 || effective_distances(&circuit, &regs, &device, &scaled).1 {
            continue;
        }
        let base = gdepth_of(&circuit, &regs, &device, &p);
        let big = gdepth_of(&circuit, &regs, &device, &scaled);
        let err = (big - k * base).abs();
        worst = worst.max(err);
        ensure!(err <= 1e-12, "e={e} k={k}: {big} vs {}", k * base);
        tested += 1;
    }
    Ok(format!("{tested} clamp-free instances, max error {worst:.1e}"))
}

/// Counts scheduled layouts without running them.
struct Counting {
    circuits: usize,
    layouts: AtomicUsize,
}

impl Objective for Counting {
    fn evaluate(&self, trial_index: usize, params: &QxxParams) -> TrialRecord {
        self.layouts.fetch_add(self.circuits, Ordering::Relaxed);
        let outcomes = vec![CircuitOutcome::Done { ratio: 1.0 }; self.circuits];
        TrialRecord::from_outcomes(trial_index, *params, outcomes, Duration::ZERO, TimeoutPolicy::Exclude)
    }
}

fn grid_cardinality() -> Outcome {
    let space = ParamSpace::table3();
    let all = optimizer::exhaustive(&space, &Counting { circuits: 90, layouts: AtomicUsize::new(0) }, 1);
    ensure!(all.len() == 4455, "{} configurations in total", all.len());
    let mut per_depth: BTreeMap<u32, usize> = BTreeMap::new();
    for r in &all {
        *per_depth.entry(r.params.max_depth).or_default() += 1;
    }
    ensure!(per_depth.values().all(|&c| c == 1485) && per_depth.len() == 3, "per MaxDepth: {per_depth:?}");
    for &md in space.values(ParamName::MaxDepth) {
        let slice = space.clone().with_values(ParamName::MaxDepth, vec![md]).unwrap();
        let counter = Counting { circuits: suite().len(), layouts: AtomicUsize::new(0) };
        let records = optimizer::exhaustive(&slice, &counter, 1);
        let layouts = counter.layouts.load(Ordering::Relaxed);
        ensure!(records.len() == 1485 && layouts == 133_650, "MaxDepth {md}: {} configs, {layouts} layouts", records.len());
    }

    let device = Device::aspen16();
    let corner_suite = benchgen::generate_suite(&device, &[5, 25, 45], 1, DEFAULT_GATE_DENSITY, SUITE_SEED).unwrap();
    let corner = QxxParams::new(9, 9, 10.0, 0.5, 6, 0.6);
    let mut counts = Vec::new();
    for ms in [50, 500, 5000] {
        let mut obj = SuiteObjective::new(&corner_suite, &device, SUITE_SEED).map_err(|e| e.to_string())?;
        obj.deadline = Some(Duration::from_millis(ms));
        counts.push((ms, obj.evaluate(0, &corner).timeout_count));
    }
    ensure!(counts.windows(2).all(|w| w[1].1 <= w[0].1), "timeouts grow with the deadline: {counts:?}");
    let shown: Vec<String> = counts.iter().map(|(ms, c)| format!("{ms}ms:{c}/3")).collect();
    Ok(format!("4455 = 3 x 1485 configs, 133650 layouts per MaxDepth; (9,9) timeouts {}", shown.join(" ")))
}

fn importance_normalization() -> Outcome {
    let weights = [9.35, 8.00, 7.76, 15.06, 3.52, 10.59];
    let expected = ["0.62", "0.53", "0.52", "1.00", "0.23", "0.70"];
    let p = ImportanceWeights::from_weights(weights).probabilities;
    let got: Vec<String> = p.iter().map(|v| format!("{v:.2}")).collect();
    ensure!(got == expected, "probabilities {got:?}");
    Ok(got.join(" ").to_string())
}

/// One-sided sign test: P(X >= wins) for X ~ Binomial(wins + losses, 1/2).
fn sign_test(wins: u64, losses: u64) -> f64 {
    let n = wins + losses;
    let mut choose = 1.0f64;
    let mut tail = 0.0;
    for k in 0..=n {
        if k >= wins {
            tail += choose;
        }
        choose = choose * (n - k) as f64 / (k + 1) as f64;
    }
    tail / 2f64.powi(n as i32)
}

fn wrs_beats_random_search() -> Outcome {
    let space = ParamSpace::table3();
    let (mut wins, mut losses, mut sum_wrs, mut sum_rs) = (0u64, 0u64, 0.0, 0.0);
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let target: [f64; 6] = std::array::from_fn(|_| rng.gen());
        let dims = space.dims().clone();
        let objective = FnObjective(move |p: &QxxParams| {
            let v = p.to_array();
            (0..6)
                .map(|k| {
                    let (lo, hi) = (dims[k][0], *dims[k].last().unwrap());
                    ((v[k] - lo) / (hi - lo) - target[k]).powi(2)
                })
                .sum::<f64>()
        });
        let w = optimizer::wrs(&space, &objective, &WrsConfig::new(50, 200, seed), 1).best_objective();
        let r = optimizer::random_search(&space, &objective, 200, seed, 1).best_objective();
        sum_wrs += w;
        sum_rs += r;
        if w < r {
            wins += 1;
        } else if r < w {
            losses += 1;
        }
    }
    let p = sign_test(wins, losses);
    let detail = format!(
        "mean best WRS {:.4} vs RS {:.4}; {wins} wins / {losses} losses; sign test p = {p:.3}",
        sum_wrs / 20.0,
        sum_rs / 20.0
    );
    ensure!(sum_wrs <= sum_rs && p < 0.05, "{detail}");
    Ok(detail)
}

fn router_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut swaps = 0;
    for case in 0..1000 {
        let n = rng.gen_range(2..=16);
        let q = rng.gen_range(2..=n);
        let device = random_device(&mut rng, n);
        let circuit = random_circuit(&mut rng, q, 60);
        let mapping = random_injection(&mut rng, q, n);
        let routed = route(&circuit, &device, &mapping, rng.gen()).map_err(|e| e.to_string())?;
        verify(&routed, &circuit, &device).map_err(|v| format!("case {case}: {v:?}"))?;
        swaps += routed.swap_count();
    }
    for case in 0..200 {
        let n = rng.gen_range(2..=12);
        let q = rng.gen_range(2..=n);
        let chain = Device::linear(n);
        let circuit = random_circuit(&mut rng, q, 30);
        let mapping = random_injection(&mut rng, q, n);
        let routed = route(&circuit, &chain, &mapping, rng.gen()).map_err(|e| e.to_string())?;
        let mut reg = mapping.clone();
        let mut at: Vec<Option<usize>> = vec![None; n];
        for (qb, &r) in reg.iter().enumerate() {
            at[r] = Some(qb);
        }
        let mut gates = routed.circuit.gates().iter();
        for (gi, orig) in circuit.gates().iter().enumerate() {
            let hops = chain.hops(reg[orig.control], reg[orig.target]) as usize;
            let mut inserted = 0;
            for g in gates.by_ref() {
                if !g.is_swap() {
                    break;
                }
                inserted += 1;
                let (a, b) = (g.control, g.target);
                at.swap(a, b);
                for r in [a, b] {
                    if let Some(qb) = at[r] {
                        reg[qb] = r;
                    }
                }
            }
            ensure!(inserted == hops - 1, "case {case} gate {gi}: {inserted} swaps for {hops} hops");
        }
    }
    Ok(format!("1000 fuzzed cases verified ({swaps} swaps); 200 chain cases insert hop-1 swaps per gate"))
}

fn mlp_gradient_check() -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x: Vec<Vec<f64>> = (0..16).map(|_| (0..12).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
    let y: Vec<f64> = x.iter().map(|r| r[0] - 2.0 * r[3] + r[7] * r[8]).collect();
    let mut worst = 0.0f64;
    for act in [Activation::Relu, Activation::Tanh] {
        let mut net = Mlp::init(12, 9, act, 10);
        let p0: Vec<f64> = net.parameters().iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        net.set_parameters(&p0);
        let (_, grad) = net.loss_and_gradient(&x, &y);
        let h = 1e-6;
        for i in 0..p0.len() {
            let mut p = p0.clone();
            p[i] += h;
            net.set_parameters(&p);
            let up = net.loss_and_gradient(&x, &y).0;
            p[i] -= 2.0 * h;
            net.set_parameters(&p);
            let down = net.loss_and_gradient(&x, &y).0;
            let fd = (up - down) / (2.0 * h);
            let rel = (fd - grad[i]).abs() / fd.abs().max(grad[i].abs()).max(1e-6);
            worst = worst.max(rel);
            ensure!(rel < 1e-4, "{act} parameter {i}: finite difference {fd} vs analytic {}", grad[i]);
        }
    }
    Ok(worst)
}

fn surrogate_quality() -> Outcome {
    let grad_err = mlp_gradient_check()?;

    let device = Device::aspen16();
    let full = suite();
    let sweep_suite: Vec<Benchmark> = [0, 30, 60, 89].iter().map(|&i| full[i].clone()).collect();
    let slice = ParamSpace::table3().with_values(ParamName::MaxDepth, vec![1.0]).unwrap();
    let mut real = SuiteObjective::new(&sweep_suite, &device, 7).map_err(|e| e.to_string())?;
    real.deadline = Some(Duration::from_secs(5));
    let records = optimizer::exhaustive(&slice, &real, 1);
    let feats: Vec<GraphFeatures> = sweep_suite.iter().map(|b| GraphFeatures::of(&b.circuit)).collect();
    let mut rows: Vec<LayoutRow> = Vec::new();
    for r in &records {
        rows.extend(results::layout_rows(r, &sweep_suite, &feats).map_err(|e| e.to_string())?);
    }
    let (x, y) = surrogate::dataset(&rows);
    ensure!(x.len() >= 5000, "only {} training rows", x.len());

    let grid: Vec<Hyper> = [10, 20]
        .iter()
        .map(|&hidden| Hyper::Mlp(MlpConfig { hidden, epochs: 20, ..MlpConfig::default() }))
        .collect();
    let cv = surrogate::cross_validate(&x, &y, &grid, 10, 5, 11).map_err(|e| e.to_string())?;
    ensure!(
        cv.fold_mse.len() == 10 && cv.mean_mse < cv.target_variance,
        "10-fold CV MSE {:.4} vs target variance {:.4}",
        cv.mean_mse,
        cv.target_variance
    );
    let model = Surrogate::train(&x, &y, &cv.best).map_err(|e| e.to_string())?;

    let wrs_suite: Vec<Benchmark> = (0..9).map(|d| full[d * SUITE_PER_DEPTH].clone()).collect();
    let space = ParamSpace::table3();
    let config = WrsConfig::new(20, 40, 13);

    let started = Instant::now();
    let learned = optimizer::wrs(&space, &SurrogateObjective::new(&model, &wrs_suite), &config, 1);
    let surrogate_time = started.elapsed();

    let mut measured = SuiteObjective::new(&wrs_suite, &device, 13).map_err(|e| e.to_string())?;
    measured.deadline = Some(Duration::from_millis(50));
    let started = Instant::now();
    let real_run = optimizer::wrs(&space, &measured, &config, 1);
    let real_time = started.elapsed();

    let timeouts: usize = learned.history.iter().map(|r| r.timeout_count).sum();
    ensure!(learned.history.len() == 40, "surrogate WRS ran {} of 40 trials", learned.history.len());
    ensure!(timeouts == 0, "surrogate WRS had {timeouts} timeouts");
    let share = surrogate_time.as_secs_f64() / real_time.as_secs_f64();
    ensure!(share < 0.01, "surrogate WRS took {surrogate_time:?}, real WRS {real_time:?} ({:.2}%)", 100.0 * share);
    let real_timeouts: usize = real_run.history.iter().map(|r| r.timeout_count).sum();
    Ok(format!(
        "grad rel err {grad_err:.1e}; {} rows, CV MSE {:.4} vs variance {:.4}; WRS-40 surrogate {:.1?} vs real {:.1?} ({:.3}%, real timeouts {real_timeouts})",
        x.len(),
        cv.mean_mse,
        cv.target_variance,
        surrogate_time,
        real_time,
        100.0 * share
    ))
}

fn own_baseline() -> Outcome {
    let device = Device::aspen16();
    let suite = suite();
    let mut obj = SuiteObjective::new(&suite, &device, SUITE_SEED).map_err(|e| e.to_string())?;
    obj.deadline = Some(Duration::from_secs(5));
    let default = QxxParams::new(1, 1, 0.0, 0.5, 2, 1.0);
    let base = obj.evaluate(0, &default);
    let base_ratio = base.mean_ratio.ok_or("default configuration produced no ratio")?;

    let slice = ParamSpace::table3().with_values(ParamName::MaxDepth, vec![1.0]).unwrap();
    let search = optimizer::wrs(&slice, &obj, &WrsConfig::new(50, 150, SUITE_SEED), 1);
    let best = search.best_record().ok_or("search produced no valid trial")?;
    let best_ratio = best.mean_ratio.unwrap();
    ensure!(
        base_ratio.is_finite() && base_ratio >= 1.0 && best_ratio >= 1.0 && best_ratio <= base_ratio,
        "baseline {base_ratio}, searched {best_ratio}"
    );
    Ok(format!(
        "own router baseline on the 90-circuit suite: default ({default}) mean ratio {base_ratio:.3}; WRS-150 at MaxDepth 1 best {best_ratio:.3} at ({}) trial {}",
        best.params, best.trial_index
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("known-optimal round trip", known_optimal_round_trip, Some(Duration::from_secs(10))),
        ("small-instance optimality", small_instance_optimality, Some(Duration::from_secs(30))),
        ("gdepth degenerate cases", gdepth_degenerate_cases, None),
        ("edge-cost scaling", edge_cost_scaling, None),
        ("grid cardinality and deadlines", grid_cardinality, None),
        ("importance normalization", importance_normalization, None),
        ("WRS vs random search", wrs_beats_random_search, Some(Duration::from_secs(60))),
        ("router soundness", router_soundness, None),
        ("surrogate quality", surrogate_quality, None),
        ("own baseline numbers", own_baseline, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let mut outcome = run();
        let elapsed = started.elapsed();
        if let (Ok(detail), Some(limit)) = (&outcome, limit) {
            if elapsed > *limit {
                outcome = Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{elapsed:.2?}]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{elapsed:.2?}]: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
