use std::io::Write;
use std::path::Path;

use noisyreg::boolfn::{wht, write_truth_table};
use noisyreg::gauss_mist::{check_quasi_mist_with, mist_slack_with, paper_exact_params, to_zero_one, QuadratureConfig};
use noisyreg::noise::{noisy_influences, stability};
use noisyreg::quasirandom::mask_to_vars;
use noisyreg::regularity::{decompose, decompose_homogeneous};
use noisyreg::{BooleanFunction, Error, RangeTag, RegularityParams};
use serde::Serialize;

use crate::{Command, PipelineArgs};

const TOP_COEFFICIENTS: usize = 16;

/// A failed command: exit code, message and an optional partial report.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    pub partial: Option<String>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded(_) => 2,
            Error::Io(_) | Error::Parse { .. } => 1,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
            partial: None,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: 3,
            message: e.to_string(),
            partial: None,
        }
    }
}

fn render<T: Serialize>(value: &T, pretty: bool) -> Result<String, Failure> {
    let mut s = if pretty {
        serde_json::to_string_pretty(value)?
    } else {
        serde_json::to_string(value)?
    };
    s.push('\n');
    Ok(s)
}

/// Writes `contents` next to `path` and renames it into place, so a failed
/// write never leaves a partial file.
fn write_atomically(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.persist(path).map_err(|e| Failure::from(e.error))?;
    Ok(())
}

pub fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Analyze { input, delta } => render(&analyze(&input.function.load()?, delta)?, input.pretty),
        Command::Decompose {
            input,
            eps,
            delta,
            gamma,
            hom,
            var_cap,
            dot,
        } => {
            let f = input.function.load()?;
            let p = RegularityParams::new(eps, delta, gamma)?;
            let outcome = if hom {
                decompose_homogeneous(&f, &p, var_cap.unwrap_or(f.n()))
            } else {
                decompose(&f, &p)
            };
            let result = match outcome {
                Ok(r) => r,
                Err(Error::BudgetExceeded(partial)) => {
                    let report = render(&BudgetExceeded::new(partial.report(hom)), input.pretty)?;
                    return Err(Failure {
                        partial: Some(report),
                        ..Error::BudgetExceeded(partial).into()
                    });
                }
                Err(e) => return Err(e.into()),
            };
            let out = render(&result.report(hom), input.pretty)?;
            if let Some(path) = dot {
                write_atomically(&path, result.tree.to_dot(delta).as_bytes())?;
            }
            Ok(out)
        }
        Command::Mist {
            input,
            rho,
            pipeline,
            quad_tol,
        } => {
            let cfg = QuadratureConfig { tol: quad_tol };
            if quad_tol.is_nan() || quad_tol <= 0.0 {
                return Err(Error::ParamOutOfRange {
                    name: "quad_tol",
                    value: quad_tol,
                    expected: "quad_tol > 0",
                }
                .into());
            }
            let g = as_zero_one(input.function.load()?)?;
            let report = match pipeline_params(&pipeline)? {
                Some((p, q_eps, q_delta)) => check_quasi_mist_with(&g, rho, &p, q_eps, q_delta, &cfg)?,
                None => mist_slack_with(&g, rho, &cfg)?,
            };
            render(&report, input.pretty)
        }
        Command::Generate { function, out } => {
            let f = function.load()?;
            let mut buf = Vec::new();
            write_truth_table(&f, &mut buf)?;
            match out {
                Some(path) => {
                    write_atomically(&path, &buf)?;
                    Ok(String::new())
                }
                None => Ok(String::from_utf8(buf).expect("truth tables are ASCII")),
            }
        }
        Command::Params { eps, pretty } => render(&paper_exact_params(eps)?, pretty),
    }
}

fn as_zero_one(f: BooleanFunction) -> noisyreg::Result<BooleanFunction> {
    match f.range() {
        RangeTag::PmOne => to_zero_one(&f),
        _ => Ok(f),
    }
}

fn pipeline_params(args: &PipelineArgs) -> noisyreg::Result<Option<(RegularityParams, f64, f64)>> {
    match (args.eps, args.delta, args.gamma, args.q_eps, args.q_delta) {
        (Some(eps), Some(delta), Some(gamma), Some(q_eps), Some(q_delta)) => {
            Ok(Some((RegularityParams::new(eps, delta, gamma)?, q_eps, q_delta)))
        }
        _ => Ok(None),
    }
}

#[derive(Debug, Serialize)]
struct BudgetExceeded {
    status: &'static str,
    partial: noisyreg::regularity::DecompositionReport,
}

impl BudgetExceeded {
    fn new(partial: noisyreg::regularity::DecompositionReport) -> Self {
        Self {
            status: "budget_exceeded",
            partial,
        }
    }
}

#[derive(Debug, Serialize)]
struct Coefficient {
    /// One-based variables of `S`.
    set: Vec<usize>,
    value: f64,
}

#[derive(Debug, Serialize)]
struct StabilityPoint {
    rho: f64,
    value: f64,
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    n: usize,
    range: RangeTag,
    mean: f64,
    norm2: f64,
    delta: f64,
    /// Largest nonzero coefficients, ties broken by mask.
    top_coefficients: Vec<Coefficient>,
    /// Entry `i` is the influence of variable `i + 1`.
    influences: Vec<f64>,
    stability: Vec<StabilityPoint>,
}

fn analyze(f: &BooleanFunction, delta: f64) -> noisyreg::Result<AnalyzeReport> {
    let g = wht(f);
    let influences = noisy_influences(&g, delta)?;
    let stability = (1..=9)
        .map(|k| {
            let rho = k as f64 / 10.0;
            Ok(StabilityPoint {
                rho,
                value: stability(&g, rho)?,
            })
        })
        .collect::<noisyreg::Result<_>>()?;
    Ok(AnalyzeReport {
        n: f.n(),
        range: f.range(),
        mean: g.mean(),
        norm2: f.norm2(),
        delta,
        top_coefficients: g
            .top_by_magnitude(TOP_COEFFICIENTS)
            .into_iter()
            .filter(|&(_, value)| value != 0.0)
            .map(|(mask, value)| Coefficient {
                set: mask_to_vars(mask),
                value,
            })
            .collect(),
        influences,
        stability,
    })
}
