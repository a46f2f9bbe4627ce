//! Subcommand implementations.

use crate::args::{
    Cli, CountArgs, CountTarget, DiagnoseArgs, DiagnoseTarget, Format, GenerateArgs, ReplayArgs, SampleArgs,
    SampleTarget,
};
use crate::error::CliError;
use crate::instance::{load_graph, load_poly, Base, Instance, Kind};
use crate::run::{no_timing, open_output, write_document, Run};
use anyhow::{Context, Result};
use clap::Parser;
use sectorwalk_core::counting::{count_k_matchings, estimate_mixed_derivative, sample_monomer_dimers, symbolic_mixed_derivative, MixedDerivativeProblem};
use sectorwalk_core::diagnostics::{
    correlation_matrices, entropy_bound_check, enumerate_density_with_limit, flc_hessian_check,
    homogenization_spectrum_check, newton_polytope_max_edge, support_log_estimate, walk_diagnosis, ENUMERATION_LIMIT,
    MAX_POLYTOPE_POINTS,
};
use num::ToPrimitive;
use sectorwalk_core::fkt::{log_pm_partition_function, pm_partition_function, pm_partition_function_exact};
use sectorwalk_core::graph::{generate as generate_family, Family};
use sectorwalk_core::walk::{sample_chains, Walker};
use sectorwalk_core::{CountConfig, Error, WalkConfig};
use serde_json::{json, Value};
use std::io::Write;
use std::time::Instant;

/// Largest family handed to the support-size bracket.
const MAX_BRACKET_FAMILY: usize = 100_000;

fn joined(set: &[usize]) -> String {
    set.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn sample(args: SampleArgs, argv: Vec<String>) -> Result<()> {
    let mut run = Run::new("sample", argv);
    let started = Instant::now();
    let instance = match args.target {
        SampleTarget::Matchings => Instance::monomer_dimer(&mut run, &args.input)?,
        SampleTarget::KMatchings => Instance::k_matching(&mut run, &args.input)?,
        SampleTarget::Ndpp => Instance::ndpp(&mut run, &args.input)?,
        SampleTarget::Partition => Instance::partition(&mut run, &args.input)?,
    };
    let w = &args.walk;
    if w.thin == 0 {
        return Err(CliError::usage("--thin must be at least 1").into());
    }
    let gap = w.gap.unwrap_or_else(|| instance.default_gap());
    let burnin = w.burnin.unwrap_or(w.steps);
    let start = instance.start_state()?;
    let cfg = WalkConfig { gap, steps: w.steps, seed: w.seed, chains: w.chains };
    let meta = json!({
        "target": args.target,
        "density": instance.density.describe(),
        "n": instance.n(),
        "k": instance.k(),
        "gap": gap,
        "steps": w.steps,
        "burnin": burnin,
        "thin": w.thin,
        "chains": w.chains,
        "seed": w.seed,
        "start": start,
        "version": env!("CARGO_PKG_VERSION"),
    });

    let out = args.output.out.as_deref();
    let mut sink = open_output(out)?;
    if args.output.format == Format::Jsonl {
        writeln!(sink, "{}", json!({ "meta": meta }))?;
    }
    let mut records = 0usize;
    match &instance.kind {
        Kind::MonomerDimer(_) => {
            if burnin != w.steps || w.thin > 1 {
                return Err(CliError::usage("matchings emits one matching per chain; --burnin and --thin do not apply").into());
            }
            let Some(Base::Graph { graph, .. }) = &instance.base else {
                unreachable!("monomer-dimer instances carry their graph")
            };
            let matchings = sample_monomer_dimers(graph, &cfg)?;
            if args.output.format == Format::Csv {
                writeln!(sink, "chain,t,set,edges")?;
            }
            for (chain, m) in matchings.iter().enumerate() {
                let monomers = m.monomers(graph);
                let pairs = m.pairs(graph);
                match args.output.format {
                    Format::Jsonl => writeln!(
                        sink,
                        "{}",
                        json!({ "chain": chain, "t": w.steps, "set": monomers, "edges": pairs })
                    )?,
                    Format::Csv => {
                        let edges: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                        writeln!(sink, "{chain},{},{},{}", w.steps, joined(&monomers), edges.join(" "))?
                    }
                }
                records += 1;
            }
        }
        _ => {
            let walker = Walker::new(instance.density.clone(), gap)?;
            let samples = sample_chains(&walker, &start, &cfg, burnin, w.thin)?;
            if args.output.format == Format::Csv {
                writeln!(sink, "chain,t,set")?;
            }
            for s in &samples {
                match args.output.format {
                    Format::Jsonl => writeln!(sink, "{}", json!({ "chain": s.chain, "t": s.t, "set": s.set }))?,
                    Format::Csv => writeln!(sink, "{},{},{}", s.chain, s.t, joined(&s.set))?,
                }
            }
            records = samples.len();
        }
    }
    sink.flush()?;
    drop(sink);
    let parameters = json!({ "arguments": args, "resolved": meta, "records": records });
    run.finish(out, parameters, Some(w.seed), json!({ "elapsed_secs": started.elapsed().as_secs_f64() }))
}

fn require(value: Option<f64>, flag: &str) -> Result<f64> {
    value.ok_or_else(|| CliError::usage(format!("{flag} is required for sampled estimates")).into())
}

pub fn count(args: CountArgs, argv: Vec<String>) -> Result<()> {
    let mut run = Run::new("count", argv);
    let started = Instant::now();
    let out = args.out.as_deref();
    let mut result = match args.target {
        CountTarget::Pm => {
            let g = load_graph(&mut run, &args.input)?;
            match pm_partition_function_exact(&g) {
                Ok(z) => {
                    let z = z.to_f64().unwrap_or(f64::NAN);
                    json!({ "estimate": z, "log_estimate": z.ln(), "exact": true, "method": "pfaffian-rational" })
                }
                Err(Error::TooLarge(_)) => json!({
                    "estimate": pm_partition_function(&g)?,
                    "log_estimate": log_pm_partition_function(&g)?,
                    "exact": true,
                    "method": "pfaffian",
                }),
                Err(e) => return Err(e.into()),
            }
        }
        CountTarget::KMatchings => {
            let g = load_graph(&mut run, &args.input)?;
            let m = args.input.size.ok_or_else(|| CliError::usage("--size is required"))?;
            let cfg = CountConfig {
                eps: require(args.eps, "--eps")?,
                delta: require(args.delta, "--delta")?,
                gap: args.gap.unwrap_or(2),
                steps: args.steps,
                seed: args.seed,
                samples_per_level: args.samples_per_level,
            };
            if 2 * m > g.n() {
                json!({ "estimate": 0.0, "exact": true, "reason": format!("no {m}-matching on {} vertices", g.n()) })
            } else {
                match count_k_matchings(&g, m, &cfg) {
                    Ok(est) => serde_json::to_value(est)?,
                    Err(Error::Infeasible(reason)) => json!({ "estimate": 0.0, "exact": true, "reason": reason }),
                    Err(e) => return Err(e.into()),
                }
            }
        }
        CountTarget::MixedDerivative => {
            let f = load_poly(&mut run, &args.input)?;
            let path = args.problem.as_ref().ok_or_else(|| CliError::usage("--problem is required"))?;
            let problem: MixedDerivativeProblem =
                serde_json::from_str(&run.read(path)?).with_context(|| format!("parsing {}", path.display()))?;
            let cfg = CountConfig {
                eps: require(args.eps, "--eps")?,
                delta: require(args.delta, "--delta")?,
                gap: args.gap.unwrap_or(2 * (problem.counts.len() + 1)),
                steps: args.steps,
                seed: args.seed,
                samples_per_level: args.samples_per_level,
            };
            let est = estimate_mixed_derivative(&f, &problem, &cfg)?;
            let mut v = serde_json::to_value(est)?;
            v["symbolic"] = json!(symbolic_mixed_derivative(&f, &problem)?);
            v
        }
    };
    let elapsed = result.as_object_mut().and_then(|o| o.remove("elapsed_secs"));
    write_document(out, &result)?;
    let timing = json!({ "elapsed_secs": started.elapsed().as_secs_f64(), "estimator_secs": elapsed });
    run.finish(out, json!({ "arguments": args }), Some(args.seed), timing)
}

fn or_error<T: serde::Serialize>(r: sectorwalk_core::Result<T>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).unwrap_or(Value::Null),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn diagnose(args: DiagnoseArgs, argv: Vec<String>) -> Result<()> {
    let mut run = Run::new("diagnose", argv);
    let started = Instant::now();
    let instance = match args.target {
        DiagnoseTarget::Matchings => Instance::monomer_dimer(&mut run, &args.input)?,
        DiagnoseTarget::KMatchings => Instance::k_matching(&mut run, &args.input)?,
        DiagnoseTarget::Ndpp => Instance::ndpp(&mut run, &args.input)?,
        DiagnoseTarget::Partition => Instance::partition(&mut run, &args.input)?,
        DiagnoseTarget::Poly => Instance::poly(&mut run, &args.input)?,
    };
    let size = instance.enumeration_size();
    if size > ENUMERATION_LIMIT && !args.force {
        return Err(CliError::guard(format!(
            "C({}, {}) = {size:e} candidate sets exceeds {ENUMERATION_LIMIT:e}; pass --force to enumerate anyway",
            instance.n(),
            instance.k()
        ))
        .into());
    }
    let limit = if args.force { f64::INFINITY } else { ENUMERATION_LIMIT };
    let dist = enumerate_density_with_limit(instance.density.as_ref(), limit)?;
    let cm = correlation_matrices(&dist);
    let flc: Vec<Value> = args.alpha.iter().map(|&a| or_error(flc_hessian_check(&dist, a))).collect();
    let gap = args.gap.unwrap_or_else(|| instance.default_gap());
    let bound_alpha = args.bound_alpha.unwrap_or_else(|| instance.bound_alpha());
    let family = dist.sets().to_vec();
    let bracket = if family.len() <= MAX_BRACKET_FAMILY {
        or_error(support_log_estimate(dist.ground_size(), &family, bound_alpha))
    } else {
        json!({ "skipped": format!("support has {} sets", family.len()) })
    };
    let polytope = if family.len() <= MAX_POLYTOPE_POINTS {
        or_error(newton_polytope_max_edge(dist.ground_size(), &family))
    } else {
        json!({ "skipped": format!("support has {} sets", family.len()) })
    };
    let mut report = json!({
        "target": args.target,
        "density": instance.density.describe(),
        "n": instance.n(),
        "k": instance.k(),
        "support_size": dist.len(),
        "partition_function": dist.partition_function(),
        "log_partition_function": dist.log_partition(),
        "entropy": dist.entropy(),
        "log_support_size": (dist.len() as f64).ln(),
        "marginals": dist.marginals(),
        "correlation": {
            "cor_row_sum": cm.cor_row_sum(),
            "inf_row_sum": cm.inf_row_sum(),
            "cor_spectrum": cm.cor_spectrum(),
            "inf_spectrum": cm.inf_spectrum(),
            "max_imaginary_part": cm.max_imaginary_part(),
            "interior": cm.interior(),
        },
        "flc": flc,
        "walk": or_error(walk_diagnosis(&instance.density, gap, instance.is_monomer_encoding())),
        "entropy_bound": entropy_bound_check(&dist, bound_alpha),
        "support_bracket": bracket,
        "log_support_in_bracket": Value::Null,
        "polytope": polytope,
    });
    if let Some(lower) = report["support_bracket"]["lower"].as_f64() {
        let upper = report["support_bracket"]["upper"].as_f64().unwrap_or(f64::INFINITY);
        let x = (dist.len() as f64).ln();
        report["log_support_in_bracket"] = json!(lower - 1e-9 <= x && x <= upper + 1e-9);
    }
    if instance.is_monomer_encoding() {
        report["homogenization"] = or_error(homogenization_spectrum_check(&dist));
    }
    write_document(args.out.as_deref(), &report)?;
    run.finish(
        args.out.as_deref(),
        json!({ "arguments": args, "gap": gap, "bound_alpha": bound_alpha }),
        None,
        json!({ "elapsed_secs": started.elapsed().as_secs_f64() }),
    )
}

pub fn generate(args: GenerateArgs, argv: Vec<String>) -> Result<()> {
    let run = Run::new("generate", argv);
    let family = Family::from_name(&args.family, &args.params)?;
    let mut g = generate_family(&family)?;
    if let Some(w) = args.edge_weight {
        g = g.with_edge_weights(|_, _| w)?;
    }
    if let Some(l) = args.vertex_weight {
        let n = g.n();
        g = g.with_lambda(vec![l; n])?;
    }
    let out = args.out.as_deref();
    let mut sink = open_output(out)?;
    writeln!(sink, "{}", g.to_json())?;
    sink.flush()?;
    drop(sink);
    run.finish(out, json!({ "arguments": args }), None, no_timing())
}

/// Replaces the value of `--out` in `argv`, or appends one.
fn with_out(mut argv: Vec<String>, out: &str) -> Vec<String> {
    if let Some(i) = argv.iter().position(|a| a == "--out") {
        argv.drain(i..(i + 2).min(argv.len()));
    }
    argv.retain(|a| !a.starts_with("--out="));
    argv.push("--out".into());
    argv.push(out.into());
    argv
}

pub fn replay(args: ReplayArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.manifest).with_context(|| format!("reading {}", args.manifest.display()))?;
    let manifest: Value = serde_json::from_str(&text)?;
    let mut argv: Vec<String> = serde_json::from_value(manifest["argv"].clone())
        .map_err(|_| CliError::usage("manifest has no argv array"))?;
    if argv.first().is_some_and(|a| a == "replay") {
        return Err(CliError::usage("manifest records a replay").into());
    }
    if let Some(out) = &args.out {
        argv = with_out(argv, &out.to_string_lossy());
    }
    let cli = Cli::try_parse_from(std::iter::once("sectorwalk".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| CliError::usage(format!("manifest argv does not parse: {e}")))?;
    crate::dispatch(cli, argv)
}
