//! MacKay's alist format.
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! col degrees (n values)
//! row degrees (m values)
//! n lines of 1-based check indices, zero-padded to max_col_degree
//! m lines of 1-based variable indices, zero-padded to max_row_degree
//! ```

use std::fmt::Write as _;

use super::ParityCheckCode;
use crate::error::{Error, Result};

pub fn write_alist(code: &ParityCheckCode) -> String {
    let vars = code.variable_checks();
    let max_col = vars.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = code.max_check_degree();
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", code.len(), code.num_checks());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(vars.iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(code.checks().iter().map(Vec::len)));
    for list in &vars {
        let _ = writeln!(out, "{}", join(padded(list, max_col)));
    }
    for list in code.checks() {
        let _ = writeln!(out, "{}", join(padded(list, max_row)));
    }
    out
}

fn padded(list: &[usize], width: usize) -> impl Iterator<Item = usize> + '_ {
    list.iter().map(|&i| i + 1).chain(std::iter::repeat(0).take(width - list.len()))
}

fn join(values: impl Iterator<Item = usize>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Reads an alist file. Zero padding is optional; the column and row lists
/// must agree.
pub fn read_alist(text: &str) -> Result<ParityCheckCode> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (line, l) = lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("unexpected end of file reading {what}"),
        })?;
        let nums = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse { line, msg: format!("{what}: {e}") })?;
        Ok((line, nums))
    };
    let (line, header) = next_numbers("header")?;
    let [n, m] = header[..] else {
        return Err(Error::Parse { line, msg: "expected `n m`".into() });
    };
    let (line, maxes) = next_numbers("max degrees")?;
    if maxes.len() != 2 {
        return Err(Error::Parse { line, msg: "expected two max degrees".into() });
    }
    let (line, col_deg) = next_numbers("column degrees")?;
    if col_deg.len() != n {
        return Err(Error::Parse { line, msg: format!("expected {n} column degrees") });
    }
    let (line, row_deg) = next_numbers("row degrees")?;
    if row_deg.len() != m {
        return Err(Error::Parse { line, msg: format!("expected {m} row degrees") });
    }
    let mut col_lists = Vec::with_capacity(n);
    for (v, &deg) in col_deg.iter().enumerate() {
        let (line, list) = next_numbers("column list")?;
        let list: Vec<usize> = list.into_iter().filter(|&i| i != 0).collect();
        if list.len() != deg || list.iter().any(|&c| c > m) {
            return Err(Error::Parse { line, msg: format!("bad check list for variable {}", v + 1) });
        }
        col_lists.push(list);
    }
    let mut checks = Vec::with_capacity(m);
    for (c, &deg) in row_deg.iter().enumerate() {
        let (line, list) = next_numbers("row list")?;
        let list: Vec<usize> = list.into_iter().filter(|&i| i != 0).map(|i| i - 1).collect();
        if list.len() != deg || list.iter().any(|&v| v >= n) {
            return Err(Error::Parse { line, msg: format!("bad variable list for check {}", c + 1) });
        }
        checks.push(list);
    }
    for (v, list) in col_lists.iter().enumerate() {
        for &c in list {
            if !checks[c - 1].contains(&v) {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("variable {} lists check {c} but the check does not list it", v + 1),
                });
            }
        }
    }
    ParityCheckCode::new(n, checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::gen_regular_code;

    #[test]
    fn small_exact_text() {
        let code = ParityCheckCode::new(4, vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        let text = write_alist(&code);
        assert_eq!(text, "4 2\n2 3\n1 1 2 1\n3 2\n1 0\n1 0\n1 2\n2 0\n1 2 3\n3 4 0\n");
        assert_eq!(read_alist(&text).unwrap(), code);
    }

    #[test]
    fn regular_code_round_trip() {
        let code = gen_regular_code(60, 3, 5, 9).unwrap();
        assert_eq!(read_alist(&write_alist(&code)).unwrap(), code);
    }

    #[test]
    fn unpadded_input_accepted() {
        let text = "4 2\n1 3\n1 1 2 1\n3 2\n1\n1\n1 2\n2\n1 2 3\n3 4\n";
        assert_eq!(read_alist(text).unwrap().checks()[1], vec![2, 3]);
    }

    #[test]
    fn inconsistent_lists_rejected() {
        let text = "4 2\n1 3\n1 1 2 1\n3 2\n1\n1\n1 2\n1\n1 2 3\n3 4 0\n";
        assert!(read_alist(text).is_err());
        assert!(read_alist("4 2\n1 3\n").is_err());
    }
}
