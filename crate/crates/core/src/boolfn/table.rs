//! Plain-text truth tables: a header line `n=<k>` followed by `2^k` lines,
//! line `j` holding the value at index `j`.

use std::io::{BufRead, Write};

use super::{check_arity, BooleanFunction};
use crate::error::{Error, Result};

/// Reads a table; the range tag is inferred from the values.
pub fn read_truth_table<R: BufRead>(reader: R) -> Result<BooleanFunction> {
    let mut lines = reader.lines().enumerate();
    let n = loop {
        let Some((idx, line)) = lines.next() else {
            return Err(Error::Parse {
                line: 1,
                message: "missing `n=<k>` header".into(),
            });
        };
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let k = line
            .strip_prefix("n=")
            .and_then(|k| k.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected `n=<k>`, found `{line}`"),
            })?;
        check_arity(k)?;
        break k;
    };

    let len = 1usize << n;
    let mut values = Vec::with_capacity(len);
    for (idx, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if values.len() == len {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("more than {len} values"),
            });
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("not a number: `{line}`"),
        })?;
        values.push(v);
    }
    if values.len() != len {
        return Err(Error::TableLength {
            expected: len,
            got: values.len(),
        });
    }
    BooleanFunction::infer(n, values)
}

/// Writes `f` with 17 significant digits per value.
pub fn write_truth_table<W: Write>(f: &BooleanFunction, mut w: W) -> std::io::Result<()> {
    writeln!(w, "n={}", f.n())?;
    for v in f.values() {
        writeln!(w, "{v:.16e}")?;
    }
    w.flush()
}
