use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;

use qxx::benchgen::{self, Benchmark};
use qxx::metrics::{self, GroupBy, RANK_MAX_DEPTHS};
use qxx::optimizer::{self, Objective, ParamName, SuiteObjective, TrialRecord, WrsConfig};
use qxx::placement::PlacementError;
use qxx::results::{self, LayoutRow, TrialRow};
use qxx::surrogate::{self, Activation, GraphFeatures, Hyper, KnnParams, MlpConfig, Surrogate, SurrogateObjective};
use qxx::{place, ratio, route};

use crate::{
    load, CliResult, Failure, GenerateArgs, LayoutArgs, PredictArgs, ReportArgs, SuiteArgs, SweepArgs, TrainArgs,
    WrsArgs,
};

/// Grids larger than this are refused by `sweep`.
const MAX_SWEEP_POINTS: usize = 1_000_000;

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display())).map_err(Failure::usage)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_csv<T: Serialize>(path: &Option<PathBuf>, rows: &[T]) -> CliResult {
    let out = open_output(path)?;
    results::write_rows(out, rows).map_err(Failure::usage)
}

fn read_layout_rows(path: &Path) -> Result<Vec<LayoutRow>, Failure> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display())).map_err(Failure::input)?;
    results::read_rows(file).with_context(|| format!("layout table {}", path.display())).map_err(Failure::input)
}

pub fn layout(a: LayoutArgs) -> CliResult {
    let params = a.params.resolve()?;
    let device = load::device(&a.device)?;
    let circuit = load::circuit(&a.circuit)?;
    if a.swap_weight == 0 {
        return Err(Failure::usage(anyhow!("--swap-weight must be at least 1")));
    }
    if circuit.is_empty() {
        return Err(Failure::input(anyhow!("circuit has no gates")));
    }
    let placement = match place(&circuit, &device, &params, a.deadline) {
        Ok(p) => p,
        Err(PlacementError::TimedOut(t)) => return Err(Failure::timeout(format!("placement timed out after {t:?}"))),
        Err(e @ PlacementError::TooManyQubits { .. }) => return Err(Failure::input(e)),
        Err(e) => return Err(Failure::usage(e)),
    };
    let routed = route(&circuit, &device, &placement.registers(), a.seed).map_err(Failure::input)?;
    let r = ratio(&circuit, &routed.circuit, a.swap_weight).map_err(Failure::input)?;

    let mut json = routed.circuit.to_json();
    json["initial_mapping"] = serde_json::json!(routed.initial_mapping);
    let mut out = open_output(&a.out)?;
    writeln!(out, "{json}").map_err(Failure::usage)?;
    eprintln!(
        "ratio={r:.4} depth_in={} depth_out={} swaps={} gdepth={:.6} expansions={}",
        circuit.depth(a.swap_weight),
        routed.circuit.depth(a.swap_weight),
        routed.swap_count(),
        placement.cost,
        placement.expansions
    );
    Ok(())
}

pub fn generate(a: GenerateArgs) -> CliResult {
    let device = load::device(&a.device)?;
    let depths = load::integers(&a.depths).map_err(Failure::usage)?;
    let suite = benchgen::generate_suite(&device, &depths, a.per_depth, a.density, a.seed).map_err(Failure::usage)?;
    benchgen::write_suite(&a.out, &suite).map_err(Failure::usage)?;
    eprintln!("wrote {} circuits to {}", suite.len(), a.out.display());
    Ok(())
}

fn suite_objective<'a>(
    args: &SuiteArgs,
    suite: &'a [Benchmark],
    device: &'a qxx::Device,
    seed: u64,
) -> Result<SuiteObjective<'a>, Failure> {
    if args.swap_weight == 0 {
        return Err(Failure::usage(anyhow!("--swap-weight must be at least 1")));
    }
    let mut obj = SuiteObjective::new(suite, device, seed).map_err(Failure::input)?;
    obj.deadline = Some(args.deadline);
    obj.swap_weight = args.swap_weight;
    obj.policy = args.timeout_policy;
    Ok(obj)
}

fn write_layout_rows(path: &Option<PathBuf>, records: &[TrialRecord], suite: &[Benchmark]) -> CliResult {
    if path.is_none() {
        return Ok(());
    }
    let feats: Vec<GraphFeatures> = suite.iter().map(|b| GraphFeatures::of(&b.circuit)).collect();
    let mut rows = Vec::with_capacity(records.len() * suite.len());
    for r in records {
        rows.extend(results::layout_rows(r, suite, &feats).map_err(Failure::usage)?);
    }
    write_csv(path, &rows)
}

/// Fails with the timeout exit code when more than half of the layouts
/// timed out.
fn check_timeouts(records: &[TrialRecord]) -> CliResult {
    let attempts: usize = records.iter().map(|r| r.per_circuit.len()).sum();
    let timeouts: usize = records.iter().map(|r| r.timeout_count).sum();
    eprintln!("layouts={attempts} timeouts={timeouts}");
    if attempts > 0 && 2 * timeouts > attempts {
        return Err(Failure::timeout(format!("{timeouts} of {attempts} layouts timed out")));
    }
    Ok(())
}

fn describe_best(records: &[TrialRecord]) {
    match optimizer::best_index(records) {
        Some(i) => {
            let r = &records[i];
            eprintln!(
                "best trial {}: params {} mean_ratio {:.4}",
                r.trial_index,
                r.params,
                r.mean_ratio.unwrap_or(f64::NAN)
            );
        }
        None => eprintln!("no trial produced a mean ratio"),
    }
}

pub fn sweep(a: SweepArgs) -> CliResult {
    let device = load::device(&a.suite.device)?;
    let suite = load::suite(&a.suite, &device, a.seed)?;
    let space = load::space(&a.space)?;
    if space.cardinality() > MAX_SWEEP_POINTS {
        return Err(Failure::usage(anyhow!(
            "grid has {} points; restrict it or use `wrs` instead",
            space.cardinality()
        )));
    }
    let obj = suite_objective(&a.suite, &suite, &device, a.seed)?;
    eprintln!("sweeping {} configurations over {} circuits", space.cardinality(), suite.len());
    let records = optimizer::exhaustive(&space, &obj, a.workers);
    let rows: Vec<TrialRow> = records.iter().map(|r| TrialRow::from_record(r, a.timing)).collect();
    write_csv(&a.out, &rows)?;
    write_layout_rows(&a.rows, &records, &suite)?;
    describe_best(&records);
    check_timeouts(&records)
}

pub fn wrs(a: WrsArgs) -> CliResult {
    if a.n0 >= a.trials {
        return Err(Failure::usage(anyhow!("--n0 must be smaller than --trials")));
    }
    let device = load::device(&a.suite.device)?;
    let suite = load::suite(&a.suite, &device, a.seed)?;
    let space = load::space(&a.space)?;
    let model = match &a.model {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display())).map_err(Failure::input)?;
            Some(Surrogate::from_json(&text).with_context(|| format!("model file {}", p.display())).map_err(Failure::input)?)
        }
        None => None,
    };
    let real;
    let learned;
    let obj: &dyn Objective = match &model {
        Some(m) => {
            learned = SurrogateObjective::new(m, &suite);
            &learned
        }
        None => {
            real = suite_objective(&a.suite, &suite, &device, a.seed)?;
            &real
        }
    };
    let mut config = WrsConfig::new(a.n0, a.trials, a.seed);
    config.batch_size = a.batch_size;
    let outcome = optimizer::wrs(&space, obj, &config, a.workers);

    let rows: Vec<TrialRow> = outcome.history.iter().map(|r| TrialRow::from_record(r, a.timing)).collect();
    write_csv(&a.out, &rows)?;
    write_layout_rows(&a.rows, &outcome.history, &suite)?;
    if let Some(w) = &outcome.weights {
        for (k, name) in ParamName::ALL.iter().enumerate() {
            eprintln!("{:<16} weight {:6.2}  p(change) {:.2}", name.as_str(), w.weights[k], w.probabilities[k]);
        }
    }
    describe_best(&outcome.history);
    check_timeouts(&outcome.history)
}

fn hyper_grid(a: &TrainArgs) -> Result<Vec<Hyper>, Failure> {
    let mut grid = Vec::new();
    match a.family.to_ascii_lowercase().as_str() {
        "mlp" => {
            let hidden = load::integers(&a.hidden).map_err(Failure::usage)?;
            let acts: Vec<Activation> = a
                .activation
                .split(',')
                .map(|s| s.trim().parse::<Activation>())
                .collect::<Result<_, _>>()
                .map_err(Failure::usage)?;
            for &h in &hidden {
                for &act in &acts {
                    grid.push(Hyper::Mlp(MlpConfig {
                        hidden: h,
                        activation: act,
                        epochs: a.epochs,
                        learning_rate: a.lr,
                        batch_size: a.batch_size,
                        seed: a.seed,
                        ..MlpConfig::default()
                    }));
                }
            }
        }
        "knn" => {
            let ks = load::integers(&a.k).map_err(Failure::usage)?;
            let ps = load::integers(&a.p).map_err(Failure::usage)?;
            for &k in &ks {
                for &p in &ps {
                    grid.push(Hyper::Knn(KnnParams { k, p: p as u32 }));
                }
            }
        }
        other => return Err(Failure::usage(anyhow!("unknown model family {other:?} (expected mlp or knn)"))),
    }
    if grid.is_empty() {
        return Err(Failure::usage(anyhow!("hyperparameter grid is empty")));
    }
    Ok(grid)
}

pub fn train(a: TrainArgs) -> CliResult {
    let grid = hyper_grid(&a)?;
    let rows = read_layout_rows(&a.data)?;
    let (x, y) = surrogate::dataset(&rows);
    if x.len() < a.inner_folds.max(2) {
        return Err(Failure::input(anyhow!("{} usable rows in {}", x.len(), a.data.display())));
    }
    let best = if grid.len() > 1 {
        let (i, scores) = surrogate::grid_search(&x, &y, &grid, a.inner_folds, a.seed).map_err(Failure::usage)?;
        eprintln!("grid search: best of {} candidates, mse {:.5}", grid.len(), scores[i]);
        grid[i].clone()
    } else {
        grid[0].clone()
    };
    let mut model = Surrogate::train(&x, &y, &best).map_err(Failure::usage)?;
    if a.cv {
        let report = surrogate::cross_validate(&x, &y, &grid, a.outer_folds, a.inner_folds, a.seed)
            .map_err(Failure::usage)?;
        eprintln!(
            "cv mse {:.5} +- {:.5} over {} folds (target variance {:.5})",
            report.mean_mse,
            report.sd_mse,
            report.fold_mse.len(),
            report.target_variance
        );
        model.cv = Some(report);
    }
    fs::write(&a.out, model.to_json())
        .with_context(|| format!("writing {}", a.out.display()))
        .map_err(Failure::usage)?;
    eprintln!("trained on {} rows: {:?}", x.len(), best);
    Ok(())
}

pub fn predict(a: PredictArgs) -> CliResult {
    let params = a.params.resolve()?;
    let text = fs::read_to_string(&a.model)
        .with_context(|| format!("reading {}", a.model.display()))
        .map_err(Failure::input)?;
    let model = Surrogate::from_json(&text).map_err(Failure::input)?;
    let circuit = load::circuit(&a.circuit)?;
    let features = surrogate::feature_vector(&GraphFeatures::of(&circuit), &params);
    let value = model.predict(&features).map_err(Failure::input)?;
    println!("{}", serde_json::json!({ "ratio": value, "params": params.to_string() }));
    Ok(())
}

#[derive(Serialize)]
struct ImportanceRow {
    depth: usize,
    param: String,
    value: f64,
    count_md1: Option<usize>,
    count_md5: Option<usize>,
    count_md9: Option<usize>,
    rank: Option<usize>,
}

fn importance_rows(rows: &[LayoutRow]) -> Vec<ImportanceRow> {
    let depths: BTreeSet<usize> = rows.iter().map(|r| r.optimal_depth).collect();
    let mut out = Vec::new();
    for &depth in &depths {
        for param in ParamName::ALL {
            let mut values: Vec<f64> = rows.iter().map(|r| param.value(&r.params())).collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            for value in values {
                let counts: Vec<Option<usize>> = RANK_MAX_DEPTHS
                    .iter()
                    .map(|&md| metrics::count(rows, param, value, depth, md).ok().map(|c| c.count))
                    .collect();
                let rank = counts.iter().copied().sum::<Option<usize>>();
                out.push(ImportanceRow {
                    depth,
                    param: param.to_string(),
                    value,
                    count_md1: counts[0],
                    count_md5: counts[1],
                    count_md9: counts[2],
                    rank,
                });
            }
        }
    }
    out
}

pub fn report(a: ReportArgs) -> CliResult {
    let rows = read_layout_rows(&a.rows)?;
    if a.importance {
        return write_csv(&a.out, &importance_rows(&rows));
    }
    let group_by = if a.group_by.eq_ignore_ascii_case("config") {
        GroupBy::Config
    } else {
        GroupBy::Param(a.group_by.parse::<ParamName>().map_err(Failure::usage)?)
    };
    write_csv(&a.out, &metrics::report(&rows, group_by))
}
