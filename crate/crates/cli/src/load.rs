//! Input loading and small list parsers shared by the subcommands.

use std::fs;
use std::path::Path;

use anyhow::Context;

use qxx::benchgen::{self, Benchmark};
use qxx::optimizer::{ParamName, ParamSpace};
use qxx::{Circuit, Device};

use crate::{Failure, SpaceArgs, SuiteArgs};

/// A device file if `spec` names an existing path, else a built-in.
pub fn device(spec: &str) -> Result<Device, Failure> {
    let path = Path::new(spec);
    if path.exists() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {spec}")).map_err(Failure::input)?;
        return Device::parse(&text).with_context(|| format!("device file {spec}")).map_err(Failure::input);
    }
    Device::builtin(spec).map_err(Failure::usage)
}

pub fn circuit(path: &Path) -> Result<Circuit, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::input)?;
    Circuit::parse(&text).with_context(|| format!("circuit file {}", path.display())).map_err(Failure::input)
}

pub fn suite(args: &SuiteArgs, device: &Device, seed: u64) -> Result<Vec<Benchmark>, Failure> {
    match &args.suite {
        Some(dir) => {
            let s = benchgen::load_suite(dir).map_err(Failure::input)?;
            if s.is_empty() {
                return Err(Failure::input(anyhow::anyhow!("no circuit files in {}", dir.display())));
            }
            Ok(s)
        }
        None => benchgen::generate_suite(
            device,
            &benchgen::SUITE_DEPTHS,
            benchgen::SUITE_PER_DEPTH,
            benchgen::DEFAULT_GATE_DENSITY,
            seed,
        )
        .map_err(Failure::usage),
    }
}

pub fn space(args: &SpaceArgs) -> Result<ParamSpace, Failure> {
    let mut space = ParamSpace::preset(&args.space).map_err(Failure::usage)?;
    if let Some(list) = &args.max_depth {
        let values = numbers(list).map_err(Failure::usage)?;
        space = space.with_values(ParamName::MaxDepth, values).map_err(Failure::usage)?;
    }
    Ok(space)
}

/// Comma list of numbers, or an inclusive range `a..b` with optional `:step`.
pub fn numbers(text: &str) -> anyhow::Result<Vec<f64>> {
    let text = text.trim();
    if let Some((range, step)) = text.split_once("..").map(|(a, rest)| {
        let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
        ((a, b), step)
    }) {
        let a: f64 = range.0.trim().parse().with_context(|| format!("range start in {text:?}"))?;
        let b: f64 = range.1.trim().parse().with_context(|| format!("range end in {text:?}"))?;
        let step: f64 = step.trim().parse().with_context(|| format!("range step in {text:?}"))?;
        anyhow::ensure!(step > 0.0 && b >= a, "empty range {text:?}");
        return Ok(qxx::optimizer::grid(a, b, step));
    }
    text.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("number {s:?} in {text:?}")))
        .collect()
}

pub fn integers(text: &str) -> anyhow::Result<Vec<usize>> {
    numbers(text)?
        .into_iter()
        .map(|v| {
            anyhow::ensure!(v >= 0.0 && v.fract() == 0.0, "{v} is not a non-negative integer");
            Ok(v as usize)
        })
        .collect()
}
