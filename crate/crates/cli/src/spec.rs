//! `--fn` specifications. Variable indices are one-based on the command line.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use noisyreg::boolfn::read_truth_table;
use noisyreg::BooleanFunction;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A builtin family member or a truth-table file.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Majority {
        n: usize,
    },
    /// Zero-based variables; `n` defaults to the largest index.
    Parity {
        vars: Vec<usize>,
        n: usize,
    },
    Dictator {
        var: usize,
        n: usize,
    },
    Tribes {
        width: usize,
        count: usize,
    },
    Random {
        n: usize,
        seed: u64,
    },
    Constant {
        n: usize,
        value: f64,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError(String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SpecError {}

fn fail<T>(msg: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError(msg.into()))
}

fn number<T: FromStr>(what: &str, s: &str) -> Result<T, SpecError> {
    s.trim().parse().map_err(|_| SpecError(format!("invalid {what} `{s}`")))
}

/// Parses `a,b,...` with an optional `/n` suffix.
fn indices_with_arity(args: &str) -> Result<(Vec<usize>, Option<usize>), SpecError> {
    let (list, n) = match args.split_once('/') {
        Some((list, n)) => (list, Some(number::<usize>("variable count", n)?)),
        None => (args, None),
    };
    let mut vars = Vec::new();
    for item in list.split(',') {
        let i: usize = number("variable index", item)?;
        if i == 0 {
            return fail("variable indices are one-based");
        }
        vars.push(i - 1);
    }
    Ok((vars, n))
}

fn arity_for(vars: &[usize], n: Option<usize>) -> Result<usize, SpecError> {
    let needed = vars.iter().max().map_or(0, |&v| v + 1);
    match n {
        Some(n) if n < needed => fail(format!("variable x{needed} does not exist for n = {n}")),
        Some(n) => Ok(n),
        None => Ok(needed),
    }
}

fn two<'a>(kind: &str, args: &'a str) -> Result<(&'a str, &'a str), SpecError> {
    args.split_once(',')
        .ok_or_else(|| SpecError(format!("{kind} expects two comma-separated arguments")))
}

impl FromStr for FunctionSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| SpecError(format!("function spec `{s}` has no `kind:` prefix")))?;
        let spec = match kind {
            "maj" => {
                let n: usize = number("variable count", args)?;
                if n.is_multiple_of(2) {
                    return fail(format!("majority needs an odd variable count, got {n}"));
                }
                FunctionSpec::Majority { n }
            }
            "parity" => {
                let (vars, n) = indices_with_arity(args)?;
                let n = arity_for(&vars, n)?;
                FunctionSpec::Parity { vars, n }
            }
            "dictator" => {
                let (vars, n) = indices_with_arity(args)?;
                if vars.len() != 1 {
                    return fail("dictator takes exactly one variable");
                }
                let n = arity_for(&vars, n)?;
                FunctionSpec::Dictator { var: vars[0], n }
            }
            "tribes" => {
                let (w, s) = two(kind, args)?;
                FunctionSpec::Tribes {
                    width: number("tribe width", w)?,
                    count: number("tribe count", s)?,
                }
            }
            "random" => {
                let (n, seed) = two(kind, args)?;
                FunctionSpec::Random {
                    n: number("variable count", n)?,
                    seed: number("seed", seed)?,
                }
            }
            "constant" => {
                let (n, c) = two(kind, args)?;
                FunctionSpec::Constant {
                    n: number("variable count", n)?,
                    value: number("constant", c)?,
                }
            }
            "file" if !args.is_empty() => FunctionSpec::File { path: args.into() },
            "file" => return fail("file spec needs a path"),
            other => return fail(format!("unknown function kind `{other}`")),
        };
        Ok(spec)
    }
}

impl FunctionSpec {
    pub fn load(&self) -> noisyreg::Result<BooleanFunction> {
        match self {
            FunctionSpec::Majority { n } => BooleanFunction::majority(*n),
            FunctionSpec::Parity { vars, n } => BooleanFunction::parity(*n, vars),
            FunctionSpec::Dictator { var, n } => BooleanFunction::dictator(*n, *var),
            FunctionSpec::Tribes { width, count } => BooleanFunction::tribes(*width, *count),
            FunctionSpec::Random { n, seed } => {
                BooleanFunction::random_pm_one(*n, &mut ChaCha8Rng::seed_from_u64(*seed))
            }
            FunctionSpec::Constant { n, value } => BooleanFunction::constant(*n, *value),
            FunctionSpec::File { path } => read_truth_table(BufReader::new(File::open(path)?)),
        }
    }
}
