use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde_json::{json, Value};
use tasep_core::experiments::{
    estimate_mk_gap, ks_statistic, reference_cdf, run_excess_experiment,
    run_stabilization_experiment, simulate_brownian_functional, BrownianKind, BrownianOutput,
    ExactTables, ExperimentConfig, Mode, Moments, Outputs, ReferenceLaw, SimulationGrid, MIN_PATHS,
    MIN_STEPS,
};
use tasep_core::walk::{
    conditional_hit_expectation, conditional_hit_probability, enumerate_hitting_oracle,
    escape_probability, excursions_from_string, hitting_gf, hitting_tail, ExcursionSampler,
};
use tasep_core::{
    excess, is_sorted_nonincreasing, landmarks, project, stabilize_three, stabilize_two,
    track_phases, BiString, Convention, Error, HittingTables, InitialCondition, Projection,
    Stepper, TriString, WalkParams,
};

use crate::args::{
    BrownianArgs, BrownianKindArg, Command, ConventionArg, DensityArgs, Dynamics, EnumerateArgs,
    EvolveArgs, InputArgs, LandmarksArgs, McArgs, ModeArg, RwCommand, SampleArgs, StabilizeArgs,
    WalkArgs,
};
use crate::output::Failure;
use crate::{Artifact, Context};

pub fn dispatch(command: &Command, ctx: &mut Context) -> Result<Artifact, Failure> {
    match command {
        Command::Evolve(a) => evolve(a),
        Command::Stabilize(a) => stabilize(a),
        Command::Landmarks(a) => landmarks_cmd(a),
        Command::Sample(a) => sample(a, ctx),
        Command::Enumerate(a) => enumerate(a),
        Command::McT2(a) => monte_carlo(a, ctx, Experiment::Stabilization),
        Command::McExcess(a) => monte_carlo(a, ctx, Experiment::Excess),
        Command::MkGap(a) => monte_carlo(a, ctx, Experiment::MkGap),
        Command::Rw(c) => random_walk(c, ctx),
        Command::BrownianRef(a) => brownian(a, ctx),
    }
}

/// Parsed inputs and whether a single string was given on the command line.
fn read_inputs(input: &InputArgs) -> Result<(Vec<TriString>, bool), Failure> {
    match (&input.input_string, &input.input) {
        (Some(s), None) => Ok((vec![s.parse()?], true)),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            let strings = tasep_core::sampling::read_strings(&text)?;
            if strings.is_empty() {
                return Err(Error::Empty.into());
            }
            Ok((strings, false))
        }
        _ => Err(Failure::usage(
            "give exactly one of --input-string and --input",
        )),
    }
}

fn to_two(t: &TriString) -> Result<BiString, Failure> {
    if let Some(position) = t.symbols().iter().position(|&s| s == 1) {
        return Err(Error::InvalidSymbol {
            symbol: '1',
            position,
        }
        .into());
    }
    Ok(BiString::new(t.symbols().to_vec())?)
}

/// A single result as the payload, several under `results`.
fn collect(results: Vec<Value>, single: bool) -> Artifact {
    if single {
        Artifact::Json(results.into_iter().next().expect("one result"))
    } else {
        Artifact::Json(json!({ "results": results }))
    }
}

fn symbols_to_string(cells: &[u8]) -> String {
    cells.iter().map(|&s| char::from(b'0' + s)).collect()
}

fn evolve(a: &EvolveArgs) -> Result<Artifact, Failure> {
    let (inputs, single) = read_inputs(&a.input)?;
    let mut results = Vec::new();
    for t in inputs {
        if a.dynamics.resolve() == Dynamics::Two {
            to_two(&t)?;
        }
        let mut stepper = Stepper::new(t.symbols());
        let mut trajectory = vec![t.to_string()];
        let mut steps = 0;
        while a.steps != Some(steps) && stepper.step() > 0 {
            steps += 1;
            trajectory.push(symbols_to_string(stepper.cells()));
        }
        results.push(json!({
            "input": t.to_string(),
            "steps": steps,
            "trajectory": trajectory,
            "sorted": is_sorted_nonincreasing(stepper.cells()),
        }));
    }
    Ok(collect(results, single))
}

fn stabilize(a: &StabilizeArgs) -> Result<Artifact, Failure> {
    let (inputs, single) = read_inputs(&a.input)?;
    let mut results = Vec::new();
    for t in inputs {
        let v = match a.dynamics.resolve() {
            Dynamics::Two => {
                let out = stabilize_two(&to_two(&t)?, a.trajectory);
                let mut v = json!({ "input": t.to_string(), "T": out.steps, "final": out.final_config.to_string() });
                if let Some(traj) = out.trajectory {
                    v["trajectory"] =
                        json!(traj.iter().map(ToString::to_string).collect::<Vec<_>>());
                }
                v
            }
            Dynamics::Three => {
                let out = stabilize_three(&t, a.trajectory);
                let two = stabilize_two(&project(&t, Projection::First), false).steps;
                let mut v = json!({
                    "input": t.to_string(),
                    "T": out.steps,
                    "final": out.final_config.to_string(),
                    "T_projection": two,
                    "excess": out.steps - two,
                });
                if let Some(traj) = out.trajectory {
                    v["trajectory"] =
                        json!(traj.iter().map(ToString::to_string).collect::<Vec<_>>());
                }
                v
            }
        };
        results.push(v);
    }
    Ok(collect(results, single))
}

fn landmarks_cmd(a: &LandmarksArgs) -> Result<Artifact, Failure> {
    let (inputs, single) = read_inputs(&a.input)?;
    let mut results = Vec::new();
    let mut records = String::new();
    for t in inputs {
        let set = landmarks(&t)?;
        let trace = if a.phases {
            Some(track_phases(&t)?)
        } else {
            None
        };
        if a.records {
            let _ = writeln!(records, "input={t}");
            records.push_str(&set.to_records());
            if let Some(trace) = &trace {
                records.push_str(&trace.to_records());
            }
            continue;
        }
        let mut v = json!({
            "input": t.to_string(),
            "n": set.n,
            "L": set.l,
            "R": set.r,
            "U": set.u,
            "M": set.m(),
            "M_list": set.m_list,
            "K": set.k,
            "K_fallback": set.k_fallback,
            "K_level": set.k_level,
        });
        if let Some(u) = set.u {
            v["zero_excess_predicted"] = json!(u < set.k);
            v["excess"] = json!(excess(&t));
        }
        if let Some(trace) = trace {
            v["phases_complete"] = json!(trace.is_complete());
            v["phases"] = serde_json::to_value(&trace).expect("trace serializes");
        }
        results.push(v);
    }
    if a.records {
        return Ok(Artifact::Text(records));
    }
    Ok(collect(results, single))
}

fn initial_condition(d: &DensityArgs) -> Result<InitialCondition, Failure> {
    match (d.p, d.lambda, d.convention) {
        (Some(p), None, None) => Ok(InitialCondition::fixed(d.n, p)?),
        (None, Some(lambda), Some(c)) => {
            let convention = match c {
                ConventionArg::Plus => Convention::Plus,
                ConventionArg::Minus => Convention::Minus,
            };
            Ok(InitialCondition::critical(d.n, lambda, convention)?)
        }
        (None, Some(_), None) => Err(Failure::usage(
            "--lambda needs an explicit --convention (plus or minus)",
        )),
        _ => Err(Failure::usage(
            "give either --p, or --lambda with --convention",
        )),
    }
}

fn sample(a: &SampleArgs, ctx: &mut Context) -> Result<Artifact, Failure> {
    let ic = initial_condition(&a.density)?;
    let seed = ctx.seed(a.seed);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# tasep samples, schema_version={}",
        tasep_core::SCHEMA_VERSION
    );
    let _ = writeln!(out, "# invocation: {}", ctx.replay_argv().join(" "));
    let _ = writeln!(
        out,
        "# seed_policy: chacha8 keyed by (master_seed, backbone tag), stream = sample index"
    );
    let _ = writeln!(
        out,
        "# master_seed={seed} seed_generated={}",
        a.seed.is_none()
    );
    let _ = writeln!(
        out,
        "# n={} p={} scaling={:?} lambda={}",
        ic.n, ic.p, ic.scaling, ic.lambda
    );
    if a.three {
        let _ = writeln!(out, "# columns: string U");
    }
    for i in 0..a.count {
        if a.three {
            let (t, u) = tasep_core::sample_three_with_scp(ic.n, ic.p, seed, i)?;
            let _ = writeln!(out, "{t} {u}");
        } else {
            let b = tasep_core::sample_two(ic.n, ic.p, seed, i)?;
            let _ = writeln!(out, "{b}");
        }
    }
    Ok(Artifact::Text(out))
}

fn law_map(law: &[f64]) -> BTreeMap<String, f64> {
    law.iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(k, &v)| (k.to_string(), v))
        .collect()
}

fn exact_map(law: &[Ratio<i128>]) -> BTreeMap<String, String> {
    law.iter()
        .enumerate()
        .filter(|(_, v)| **v != Ratio::from_integer(0))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn enumerate(a: &EnumerateArgs) -> Result<Artifact, Failure> {
    let rational: Option<Ratio<i128>> = if a.p.contains('/') {
        Some(
            a.p.parse()
                .map_err(|_| Failure::usage(format!("--p: cannot parse `{}`", a.p)))?,
        )
    } else {
        None
    };
    let p: f64 = match rational {
        Some(r) => *r.numer() as f64 / *r.denom() as f64,
        None => {
            a.p.parse()
                .map_err(|_| Failure::usage(format!("--p: cannot parse `{}`", a.p)))?
        }
    };
    let tables = ExactTables::enumerate(a.n)?;
    let law = tables.evaluate(p)?;
    let mut v = json!({
        "n": a.n,
        "p": p,
        "excess": law_map(&law.excess),
        "three": law_map(&law.three),
        "two": law_map(&law.two),
    });
    if let Some(r) = rational {
        let exact = tables.evaluate_exact(r)?;
        v["exact"] = json!({
            "p": r.to_string(),
            "excess": exact_map(&exact.excess),
            "three": exact_map(&exact.three),
            "two": exact_map(&exact.two),
        });
    }
    Ok(Artifact::Json(v))
}

enum Experiment {
    Stabilization,
    Excess,
    MkGap,
}

fn monte_carlo(a: &McArgs, ctx: &mut Context, which: Experiment) -> Result<Artifact, Failure> {
    let initial = initial_condition(&a.density)?;
    let seed = ctx.seed(a.seed);
    let mode = match (a.mode, &which) {
        (Some(ModeArg::Simulate), _) => Mode::Simulate,
        (Some(ModeArg::Predicate), _) => Mode::Predicate,
        (Some(ModeArg::Both), _) => Mode::Both,
        (None, Experiment::Excess) => Mode::Predicate,
        (None, _) => Mode::Simulate,
    };
    let mut config = ExperimentConfig::new(initial, a.samples, seed, mode);
    config.outputs = Outputs {
        samples: a.keep_samples,
        ecdf: a.ecdf.is_some(),
        histogram_bins: a.histogram.as_ref().map(|_| a.bins),
    };
    if a.reference_paths.is_some() || a.reference_steps.is_some() {
        config.reference_grid = Some(SimulationGrid {
            paths: a.reference_paths.unwrap_or(MIN_PATHS),
            steps: a.reference_steps.unwrap_or(MIN_STEPS),
            seed,
        });
    }
    let result = match which {
        Experiment::Stabilization => run_stabilization_experiment(&config)?,
        Experiment::Excess => run_excess_experiment(&config)?,
        Experiment::MkGap => estimate_mk_gap(&config)?,
    };
    if let (Some(path), Some(csv)) = (&a.ecdf, result.ecdf_csv()) {
        ctx.side_file(path.clone(), csv);
    }
    if let (Some(path), Some(csv)) = (&a.histogram, result.histogram_csv()) {
        ctx.side_file(path.clone(), csv);
    }
    Ok(Artifact::Json(
        serde_json::to_value(&result).expect("result serializes"),
    ))
}

fn walk_params(w: &WalkArgs) -> Result<WalkParams, Failure> {
    match (w.p, w.n, w.lambda) {
        (Some(p), None, None) => Ok(WalkParams::new(p)?),
        (None, Some(n), Some(lambda)) => Ok(WalkParams::critical(n, lambda)?),
        _ => Err(Failure::usage("give either --p, or --n with --lambda")),
    }
}

fn walk_json(w: &WalkParams) -> Value {
    json!({ "p": w.p(), "q": w.q(), "critical": w.critical_pair().map(|(n, l)| json!({"n": n, "lambda": l})) })
}

fn random_walk(c: &RwCommand, ctx: &mut Context) -> Result<Artifact, Failure> {
    let v = match c {
        RwCommand::Pmf { walk, max_len, csv } => {
            let w = walk_params(walk)?;
            let tables = HittingTables::new(&w, *max_len);
            if let Some(path) = csv {
                ctx.side_file(path.clone(), tables.to_csv());
            }
            let rows: Vec<Value> = (1..=*max_len)
                .step_by(2)
                .map(|j| json!({ "length": j, "pmf": tables.pmf_at(j), "tail": tables.tail1(j) }))
                .collect();
            json!({ "walk": walk_json(&w), "max_len": max_len, "rows": rows })
        }
        RwCommand::Oracle { walk, max_len } => {
            let w = walk_params(walk)?;
            let table: BTreeMap<String, f64> = enumerate_hitting_oracle(&w, *max_len)?
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
            json!({ "walk": walk_json(&w), "max_len": max_len, "pmf": table })
        }
        RwCommand::Tail { walk, m } => {
            let w = walk_params(walk)?;
            json!({ "walk": walk_json(&w), "m": m, "tail": hitting_tail(&w, *m) })
        }
        RwCommand::Gf { walk, s } => {
            let w = walk_params(walk)?;
            json!({ "walk": walk_json(&w), "s": s, "g": hitting_gf(&w, *s)? })
        }
        RwCommand::Escape { walk } => {
            let w = walk_params(walk)?;
            json!({ "walk": walk_json(&w), "escape_probability": escape_probability(&w) })
        }
        RwCommand::Conditional { walk, m } => {
            let w = walk_params(walk)?;
            let probability = conditional_hit_probability(&w, *m)?;
            let expectation = conditional_hit_expectation(&w, *m)?;
            json!({
                "walk": walk_json(&w),
                "m": m,
                "probability": probability,
                "expectation": expectation,
                "expectation_over_sqrt_m": expectation / (*m as f64).sqrt(),
            })
        }
        RwCommand::Chain {
            walk,
            horizon,
            seed,
            count,
            input_string,
            csv,
        } => {
            let records = if let Some(s) = input_string {
                let t: TriString = s.parse()?;
                let b = project(&t, Projection::First);
                vec![excursions_from_string(&b)?]
            } else {
                let w = walk_params(walk)?;
                let horizon = horizon.ok_or_else(|| Failure::usage("--horizon is required"))?;
                let seed = ctx.seed(*seed);
                let sampler = ExcursionSampler::new(&w, horizon)?;
                (0..*count).map(|i| sampler.sample(seed, i)).collect()
            };
            if let Some(path) = csv {
                let mut out = String::from("chain,k,tau,indicator,length\n");
                for (c, r) in records.iter().enumerate() {
                    for k in 0..=r.stop {
                        let _ = writeln!(
                            out,
                            "{c},{k},{},{},{}",
                            r.tau[k], r.indicators[k], r.lengths[k]
                        );
                    }
                }
                ctx.side_file(path.clone(), out);
            }
            let totals: Vec<f64> = records.iter().map(|r| r.total as f64).collect();
            let m = Moments::of(&totals);
            json!({
                "records": records,
                "mean_total": m.mean_estimate(),
            })
        }
    };
    Ok(Artifact::Json(v))
}

fn brownian(a: &BrownianArgs, ctx: &mut Context) -> Result<Artifact, Failure> {
    let seed = ctx.seed(a.seed);
    let grid = SimulationGrid {
        paths: a.paths,
        steps: a.steps,
        seed,
    };
    let kind = match a.kind {
        BrownianKindArg::MaxMinusHalf => BrownianKind::MaxMinusHalf,
        BrownianKindArg::ArgmaxExpectation => BrownianKind::ArgmaxExpectation,
    };
    let v = match simulate_brownian_functional(a.lambda, kind, &grid)? {
        BrownianOutput::Samples(samples) => {
            let m = Moments::of(&samples);
            let mut v = json!({
                "lambda": a.lambda,
                "kind": kind,
                "grid": grid,
                "mean": m.mean_estimate(),
                "variance": m.variance,
            });
            if a.lambda == 0.0 {
                let ks = ks_statistic(&samples, |x| {
                    reference_cdf(&ReferenceLaw::Chi3Half, x).expect("closed form")
                })?;
                v["ks_vs_chi3_half"] = json!(ks);
            }
            if let Some(path) = &a.ecdf {
                let rows = tasep_core::experiments::ecdf_counts(&samples)?;
                let comments = vec![format!("lambda={}", a.lambda), format!("seed={seed}")];
                ctx.side_file(
                    path.clone(),
                    tasep_core::experiments::counts_csv(&comments, &rows),
                );
            }
            v
        }
        BrownianOutput::Estimate(e) => json!({
            "lambda": a.lambda,
            "kind": kind,
            "grid": grid,
            "estimate": e,
        }),
    };
    Ok(Artifact::Json(v))
}
