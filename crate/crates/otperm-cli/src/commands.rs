//! The three subcommands: single test, grid export, simulation driver.

use crate::{config, input, CliError, GridArgs, SimArgs, TestArgs};
use otperm::grids::{build_grid, GridOrthant, GridSpec, LowDiscSource};
use otperm::lowdisc::GeneratingVector;
use otperm::pipeline::{
    combine_test, decide, transport_pvalue_test, transport_statistic_test, Decision, TestResult,
};
use otperm::seeding::{mix, DOMAIN_TIES};
use otperm::sim::{builtin_scenarios, find_scenario, run_scenario, ExecMode, StatisticKind};
use otperm::stats::{permute_ensemble, CombiningFunction};
use std::fmt::Write as _;
use std::path::PathBuf;

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_source(source: Option<&str>) -> Result<LowDiscSource, CliError> {
    match source {
        None | Some("builtin") => Ok(LowDiscSource::Builtin),
        Some("halton") => Ok(LowDiscSource::Halton),
        Some(other) => {
            Err(CliError::usage(format!("unknown source `{other}` (expected builtin or halton)")))
        }
    }
}

/// Resolve the low-discrepancy source, turning `--h 1,610` into an explicit
/// generating vector for `n` points.
fn resolve_source(
    h: Option<&str>,
    source: Option<&str>,
    n: usize,
) -> Result<LowDiscSource, CliError> {
    match h {
        None => parse_source(source),
        Some(list) => {
            if source.is_some() {
                return Err(CliError::usage("--h and --source are mutually exclusive"));
            }
            let comps: Result<Vec<u64>, _> = list.split(',').map(|t| t.trim().parse()).collect();
            let comps = comps.map_err(|_| {
                CliError::usage(format!("--h must be a comma-separated integer list, got `{list}`"))
            })?;
            Ok(LowDiscSource::Glp(GeneratingVector::new(n as u64, comps)?))
        }
    }
}

// ── test ─────────────────────────────────────────────────────────────────

enum Plan {
    Transport { spec: GridSpec, absolute: bool },
    PartialPValues { spec: GridSpec },
    Combine(CombiningFunction),
}

fn product_spec(
    args: &TestArgs,
    d: usize,
    orthant: GridOrthant,
    method: &str,
) -> Result<GridSpec, CliError> {
    let n_r =
        args.n_r.ok_or_else(|| CliError::usage(format!("method {method} needs --nR (rings)")))?;
    let n_s = args.n_s.ok_or_else(|| {
        CliError::usage(format!("method {method} needs --nS (directions per ring)"))
    })?;
    let n_0 = args.n_0.unwrap_or(0);
    let source = resolve_source(args.h.as_deref(), args.source.as_deref(), n_s)?;
    let spec = GridSpec::product(d, n_r, n_s, n_0, orthant, source)?;
    if let Some(b) = args.b {
        if b != spec.b {
            return Err(CliError::usage(format!(
                "--B {b} conflicts with the grid: n_R * n_S + n_0 - 1 = {}",
                spec.b
            )));
        }
    }
    Ok(spec)
}

fn nonproduct_spec(
    args: &TestArgs,
    d: usize,
    orthant: GridOrthant,
    method: &str,
) -> Result<GridSpec, CliError> {
    let b = args
        .b
        .ok_or_else(|| CliError::usage(format!("method {method} needs --B (permutations)")))?;
    let source = resolve_source(args.h.as_deref(), args.source.as_deref(), b + 1)?;
    Ok(GridSpec::nonproduct(d, b, orthant, source)?)
}

fn plan_for(args: &TestArgs, method: &str, d: usize) -> Result<Plan, CliError> {
    use GridOrthant::{Full, Positive};
    let plan = match method {
        "t-P" => Plan::Transport { spec: product_spec(args, d, Full, method)?, absolute: false },
        "t-N" => Plan::Transport { spec: nonproduct_spec(args, d, Full, method)?, absolute: false },
        "t-P+" => {
            Plan::Transport { spec: product_spec(args, d, Positive, method)?, absolute: true }
        }
        "t-N+" => {
            Plan::Transport { spec: nonproduct_spec(args, d, Positive, method)?, absolute: true }
        }
        "p-P+" => Plan::PartialPValues { spec: product_spec(args, d, Positive, method)? },
        "p-N+" => Plan::PartialPValues { spec: nonproduct_spec(args, d, Positive, method)? },
        "combine-tippett" => Plan::Combine(CombiningFunction::Tippett),
        "combine-fisher" => Plan::Combine(CombiningFunction::Fisher),
        "combine-liptak" => Plan::Combine(CombiningFunction::Liptak),
        other => {
            return Err(CliError::usage(format!(
                "unknown method `{other}` (expected t-P, t-N, t-P+, t-N+, p-P+, p-N+, \
                 or combine-{{tippett,fisher,liptak}})"
            )))
        }
    };
    Ok(plan)
}

fn render_test(result: &TestResult, alpha: f64, format: &str) -> Result<String, CliError> {
    let decision = match decide(result, alpha)? {
        Decision::Reject => "reject",
        Decision::Retain => "retain",
    };
    let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
    let mut text = String::new();
    match format {
        "json" => {
            let doc = result.to_json(alpha)?;
            text = serde_json::to_string_pretty(&doc).expect("serializable report");
            text.push('\n');
        }
        "human" => {
            writeln!(text, "method:        {}", result.method().label()).unwrap();
            writeln!(text, "permutations:  B = {}", result.b()).unwrap();
            writeln!(text, "p_e:           {}", result.p_e()).unwrap();
            if let Some(p_a) = result.p_a() {
                writeln!(text, "p_a:           {p_a}").unwrap();
            }
            if let Some(dir) = result.direction() {
                writeln!(text, "direction:     [{}]", join(dir)).unwrap();
            }
            if let Some(contrib) = result.contributions() {
                writeln!(text, "contributions: [{}]", join(contrib)).unwrap();
            }
            if let Some(nc) = result.nonconformity() {
                writeln!(text, "nonconformity: {nc}").unwrap();
            }
            if result.at_center() {
                writeln!(text, "note:          observed statistic mapped to the origin").unwrap();
            }
            writeln!(text, "decision:      {decision} at alpha = {alpha}").unwrap();
        }
        "csv" => {
            let blank_if = |o: Option<f64>| o.map(|v| v.to_string()).unwrap_or_default();
            text.push_str(
                "method,B,p_e,p_a,nonconformity,direction,contributions,decision,alpha\n",
            );
            writeln!(
                text,
                "{},{},{},{},{},{},{},{decision},{alpha}",
                result.method().label(),
                result.b(),
                result.p_e(),
                blank_if(result.p_a()),
                blank_if(result.nonconformity()),
                result.direction().map(join).unwrap_or_default(),
                result.contributions().map(join).unwrap_or_default(),
            )
            .unwrap();
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown format `{other}` (expected json, csv, or human)"
            )))
        }
    }
    Ok(text)
}

pub fn cmd_test(mut args: TestArgs) -> Result<(), CliError> {
    config::merge_test(&mut args)?;
    let input = args.input.clone().ok_or_else(|| CliError::usage("missing --input"))?;
    let stat_id = args.stat.clone().ok_or_else(|| CliError::usage("missing --stat"))?;
    let method = args.method.clone().ok_or_else(|| CliError::usage("missing --method"))?;
    let alpha = args.alpha.unwrap_or(0.05);
    let seed = args.seed.unwrap_or(0);
    let format = args.format.clone().unwrap_or_else(|| "json".to_string());
    if !["json", "csv", "human"].contains(&format.as_str()) {
        return Err(CliError::usage(format!(
            "unknown format `{format}` (expected json, csv, or human)"
        )));
    }

    let kind = match stat_id.as_str() {
        "pairwise-t" => StatisticKind::PairwiseVsFirst,
        "helmert-t" => StatisticKind::Helmert,
        "mean-logvar" => StatisticKind::MeanLogVar,
        other => {
            return Err(CliError::usage(format!(
                "unknown statistic `{other}` (expected pairwise-t, helmert-t, or mean-logvar)"
            )))
        }
    };

    let (sample, _labels) = input::read_grouped_csv(&input)?;
    let k = sample.k();
    let stat = kind.instantiate(k);
    let d = kind.dim(k);
    let plan = plan_for(&args, &method, d)?;
    let tie_seed = mix(&[seed, DOMAIN_TIES]);

    let result = match plan {
        Plan::Combine(f) => {
            let b = args.b.unwrap_or(999);
            let ens = permute_ensemble(&sample, stat.as_ref(), b, seed)?;
            combine_test(&ens, f)
        }
        Plan::Transport { spec, absolute } => {
            let grid = build_grid(&spec)?;
            let ens = permute_ensemble(&sample, stat.as_ref(), spec.b, seed)?;
            let ens = if absolute { ens.absolutized() } else { ens };
            transport_statistic_test(&ens, &grid, tie_seed)?
        }
        Plan::PartialPValues { spec } => {
            let grid = build_grid(&spec)?;
            let ens = permute_ensemble(&sample, stat.as_ref(), spec.b, seed)?;
            transport_pvalue_test(&ens, &grid, tie_seed)?
        }
    };

    let text = render_test(&result, alpha, &format)?;
    write_output(args.out.as_ref(), &text)
}

// ── grid ─────────────────────────────────────────────────────────────────

pub fn cmd_grid(mut args: GridArgs) -> Result<(), CliError> {
    config::merge_grid(&mut args)?;
    let kind = args
        .kind
        .clone()
        .ok_or_else(|| CliError::usage("missing --kind (product or nonproduct)"))?;
    let d = args.d.ok_or_else(|| CliError::usage("missing --d"))?;
    let orthant = match args.orthant.as_deref() {
        None | Some("full") => GridOrthant::Full,
        Some("positive") => GridOrthant::Positive,
        Some(other) => {
            return Err(CliError::usage(format!(
                "unknown orthant `{other}` (expected full or positive)"
            )))
        }
    };
    let spec = match kind.as_str() {
        "product" => {
            let n_r = args.n_r.ok_or_else(|| CliError::usage("product grids need --nR"))?;
            let n_s = args.n_s.ok_or_else(|| CliError::usage("product grids need --nS"))?;
            let n_0 = args.n_0.unwrap_or(0);
            let source = resolve_source(args.h.as_deref(), args.source.as_deref(), n_s)?;
            GridSpec::product(d, n_r, n_s, n_0, orthant, source)?
        }
        "nonproduct" => {
            let b = args.b.ok_or_else(|| CliError::usage("non-product grids need --B"))?;
            let source = resolve_source(args.h.as_deref(), args.source.as_deref(), b + 1)?;
            GridSpec::nonproduct(d, b, orthant, source)?
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown kind `{other}` (expected product or nonproduct)"
            )))
        }
    };

    let grid = build_grid(&spec)?;
    // Plain `Display` prints the shortest string that parses back to the
    // same f64, so the round trip is exact.
    let mut text = String::new();
    for i in 0..grid.len() {
        let row: Vec<String> = grid.points().row(i).iter().map(f64::to_string).collect();
        writeln!(text, "{}", row.join(",")).unwrap();
    }
    write_output(args.out.as_ref(), &text)
}

// ── simulate ─────────────────────────────────────────────────────────────

/// Quote a CSV field if needed; scenario names such as `T4-(0,2,-1,3)-chi2`
/// contain commas.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn cmd_simulate(mut args: SimArgs) -> Result<(), CliError> {
    config::merge_simulate(&mut args)?;
    let name = args
        .scenario
        .clone()
        .ok_or_else(|| CliError::usage("missing --scenario (a name or `all`)"))?;
    let mut scenarios = if name == "all" {
        builtin_scenarios()
    } else {
        match find_scenario(&name) {
            Some(s) => vec![s],
            None => {
                let list: Vec<String> = builtin_scenarios().into_iter().map(|s| s.name).collect();
                return Err(CliError::usage(format!(
                    "unknown scenario `{name}`; available:\n  all\n  {}",
                    list.join("\n  ")
                )));
            }
        }
    };
    for s in &mut scenarios {
        if let Some(reps) = args.reps {
            s.replications = reps;
        }
        if let Some(seed) = args.seed {
            s.seed = seed;
        }
    }

    let d_max = scenarios.iter().map(|s| s.statistic.dim(s.k())).max().unwrap_or(0);
    let mut text = String::from("scenario,method,rate,se");
    for j in 1..=d_max {
        write!(text, ",mean_contrib_{j}").unwrap();
    }
    text.push_str(",mean_angle\n");

    for s in &scenarios {
        let report = run_scenario(s, ExecMode::Parallel)?;
        for m in &report.methods {
            write!(
                text,
                "{},{},{},{}",
                csv_field(&report.scenario),
                csv_field(&m.method),
                m.rate,
                m.se
            )
            .unwrap();
            let contrib = m.mean_contributions.as_deref().unwrap_or(&[]);
            for j in 0..d_max {
                match contrib.get(j) {
                    Some(c) => write!(text, ",{c}").unwrap(),
                    None => text.push(','),
                }
            }
            match m.mean_angle {
                Some(a) => writeln!(text, ",{a}").unwrap(),
                None => text.push_str(",\n"),
            }
        }
    }
    write_output(args.out.as_ref(), &text)
}
