//! Implementations of the subcommands.

use std::io::Write;
use std::path::Path;

use robdcor::inference::permutation_independence_test;
use robdcor::io::{read_csv, CsvOptions, Dataset};
use robdcor::robustness::{
    base_quantile_sample, breakdown_curve, breakdown_prediction_dvar, comparability_factor,
    dcor_outlier_limit, dstd_efficiency, dvar_sensitivity_curve, gaussian_consistency_factor,
    if_curve, DistributionSpec, FactorKind, IfTarget, Marginal,
};
use robdcor::scan::{dc_scatter, scan, write_dc_scatter};
use robdcor::simlab::{run_experiment, ExperimentConfig};
use robdcor::{DataMatrix, MethodSpec, TransformKind, TransformSpec};
use serde_json::json;

use crate::args::{
    BreakdownArgs, BreakdownStatistic, ExperimentArgs, FactorChoice, FactorsArgs, IfCurveArgs,
    InputArgs, MethodArgs, ScCurveArgs, ScanArgs, TestArgs,
};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Write to `out`, or to stdout when absent.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Lib(robdcor::Error::Io(format!("{}: {e}", path.display())))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Lib(e.into()))
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Lib(robdcor::Error::Numerical(e.to_string())))
}

/// `lo:hi:count` → evenly spaced points.
pub fn parse_grid(text: &str, log: bool) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || usage(format!("grid must be lo:hi:count, got '{text}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    if log {
        if lo <= 0.0 || hi <= 0.0 {
            return Err(usage("a logarithmic grid needs positive end points"));
        }
        return Ok(robdcor::robustness::linspace(lo.log10(), hi.log10(), count)
            .into_iter()
            .map(|e| 10f64.powf(e))
            .collect());
    }
    Ok(robdcor::robustness::linspace(lo, hi, count))
}

/// `normal`, `t:<nu>`, `uniform`, `bvn:<rho>` or `independent`.
pub fn parse_dist(text: &str) -> Result<DistributionSpec> {
    let (name, param) = match text.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (text, None),
    };
    let number = |what: &str| -> Result<f64> {
        param
            .ok_or_else(|| usage(format!("{name} needs a parameter, e.g. {name}:{what}")))?
            .parse()
            .map_err(|_| usage(format!("bad parameter in '{text}'")))
    };
    let dist = match name {
        "normal" if param.is_none() => DistributionSpec::standard_normal(),
        "uniform" if param.is_none() => {
            DistributionSpec::Univariate(Marginal::Uniform { lo: 0.0, hi: 1.0 })
        }
        "independent" if param.is_none() => {
            DistributionSpec::Product(Marginal::standard_normal(), Marginal::standard_normal())
        }
        "t" => DistributionSpec::Univariate(Marginal::StudentT { nu: number("3")? }),
        "bvn" => DistributionSpec::BivariateNormal {
            rho: number("0.5")?,
        },
        _ => return Err(usage(format!("unknown distribution '{text}'"))),
    };
    Ok(dist)
}

fn method_spec(name: &str, alpha: f64, c: f64) -> Result<MethodSpec> {
    let kind: TransformKind = name
        .parse()
        .map_err(|_| usage(format!("unknown method '{name}'")))?;
    let transform = match kind {
        TransformKind::Biloop => TransformSpec::biloop(c)?,
        other => TransformSpec::new(other),
    };
    Ok(MethodSpec::new(transform, alpha)?)
}

fn method_from(args: &MethodArgs) -> Result<MethodSpec> {
    method_spec(&args.method, args.alpha, args.c)
}

fn csv_options(input: &InputArgs, response: Option<String>) -> Result<CsvOptions> {
    if !input.delimiter.is_ascii() {
        return Err(usage("delimiter must be an ASCII character"));
    }
    Ok(CsvOptions {
        delimiter: input.delimiter as u8,
        header: !input.no_header,
        response_column: response,
    })
}

pub fn test(args: &TestArgs, seed: u64) -> Result<()> {
    let method = method_from(&args.method)?;
    let opts = csv_options(&args.input, None)?;
    let x = read_csv(&args.x, &opts)?.data;
    let y = read_csv(&args.y, &opts)?.data;
    let res = permutation_independence_test(&x, &y, &method, args.b, args.level, seed)?;
    emit(args.out.as_deref(), &to_json(&res)?)
}

fn find_column(dataset: &Dataset, key: &str) -> Result<usize> {
    Ok(dataset.column_index(key)?)
}

pub fn scan_cmd(args: &ScanArgs, seed: u64) -> Result<()> {
    let opts = csv_options(&args.input, Some(args.response.clone()))?;
    let dataset = read_csv(&args.data, &opts)?;
    let response = dataset.response.clone().expect("response designated");
    let methods = args
        .methods
        .iter()
        .map(|m| method_spec(m, args.alpha, args.c))
        .collect::<Result<Vec<_>>>()?;
    if let (Some(col), Some(path)) = (&args.scatter, &args.scatter_out) {
        let j = find_column(&dataset, col)?;
        let method = method_spec(&args.scatter_method, args.alpha, args.c)?;
        let s = dc_scatter(&dataset, j, &response, &method)?;
        let json = write_dc_scatter(&s, path)?;
        eprintln!("wrote {} and {}", path.display(), json.display());
    }
    let res = scan(&dataset, &response, &methods, args.b, seed)?;
    let mut buf = Vec::new();
    res.write_csv(&mut buf)?;
    emit(args.out.as_deref(), &String::from_utf8_lossy(&buf))
}

pub fn ifcurve(args: &IfCurveArgs, seed: u64) -> Result<()> {
    let target: IfTarget = args.target.parse()?;
    let dist = parse_dist(&args.dist)?;
    let grid: Vec<(f64, f64)> = parse_grid(&args.grid, false)?
        .into_iter()
        .map(|s| (s, args.direction * s))
        .collect();
    let res = if_curve(
        target,
        &grid,
        &dist,
        args.alpha,
        args.mc,
        seed,
        args.comparable,
    )?;
    let mut text = String::from("s,t,value,stderr\n");
    for (((s, t), v), e) in res.grid.iter().zip(&res.values).zip(&res.mc_stderr) {
        text.push_str(&format!("{s},{t},{v},{e}\n"));
    }
    emit(args.out.as_deref(), &text)
}

pub fn sccurve(args: &ScCurveArgs) -> Result<()> {
    let grid = parse_grid(&args.grid, false)?;
    let base = base_quantile_sample(args.n);
    let curve = dvar_sensitivity_curve(&base, &grid, args.alpha)?;
    let mut text = String::from("s,value\n");
    for p in curve {
        text.push_str(&format!("{},{}\n", p.s, p.value));
    }
    emit(args.out.as_deref(), &text)
}

pub fn breakdown(args: &BreakdownArgs, seed: u64) -> Result<()> {
    let grid = parse_grid(&args.grid, args.log)?;
    let alpha = args.method.alpha;
    let text = match args.statistic {
        BreakdownStatistic::Dvar => {
            let base = base_quantile_sample(args.n);
            let mut text = String::from("s,value,prediction,ratio\n");
            for p in breakdown_curve(&base, &grid, alpha)? {
                let pred = breakdown_prediction_dvar(args.n, p.s, alpha);
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    p.s,
                    p.value,
                    pred,
                    p.value / pred
                ));
            }
            text
        }
        BreakdownStatistic::Dcor => {
            let method = method_from(&args.method)?;
            let dist =
                DistributionSpec::Product(Marginal::standard_normal(), Marginal::standard_normal());
            let (x, y): (DataMatrix, DataMatrix) = dist.sample_pairs(args.n, seed)?;
            let mut text = String::from("s,value\n");
            for p in dcor_outlier_limit(&x, &y, &grid, &method)? {
                text.push_str(&format!("{},{}\n", p.s, p.value));
            }
            text
        }
    };
    emit(args.out.as_deref(), &text)
}

pub fn experiment(args: &ExperimentArgs, seed: Option<u64>) -> Result<u64> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    let res = run_experiment(&cfg)?;
    let mut buf = Vec::new();
    res.write_csv(&mut buf)?;
    emit(args.out.as_deref(), &String::from_utf8_lossy(&buf))?;
    eprintln!("elapsed: {:.1} s", res.elapsed_secs);
    Ok(cfg.master_seed)
}

pub fn factors(args: &FactorsArgs, seed: u64) -> Result<()> {
    let alpha = args.method.alpha;
    let (name, value, stderr) = match args.kind {
        FactorChoice::Consistency => ("consistency", gaussian_consistency_factor(), 0.0),
        FactorChoice::Efficiency => {
            let e = dstd_efficiency(alpha, args.mc, seed)?;
            ("efficiency", e.value, e.stderr)
        }
        kind => {
            let dist = parse_dist(&args.dist)?;
            let (name, fk) = match kind {
                FactorChoice::CAlpha => ("c_alpha", FactorKind::CAlpha { alpha }),
                FactorChoice::VAlpha => ("v_alpha", FactorKind::VAlpha { alpha }),
                FactorChoice::RAlpha => ("r_alpha", FactorKind::RAlpha { alpha }),
                _ => (
                    "c_psi",
                    FactorKind::CPsi {
                        transform: method_from(&args.method)?.transform,
                    },
                ),
            };
            let e = comparability_factor(fk, &dist, args.mc, seed)?;
            (name, e.value, e.stderr)
        }
    };
    let out = json!({
        "kind": name,
        "alpha": alpha,
        "method": args.method.method,
        "dist": args.dist,
        "mc_size": args.mc,
        "seed": seed,
        "value": value,
        "stderr": stderr,
    });
    emit(args.out.as_deref(), &to_json(&out)?)
}
