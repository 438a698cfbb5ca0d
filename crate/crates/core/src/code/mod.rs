//! Binary parity-check codes.

mod alist;
mod gf2;
mod regular;

use std::collections::BTreeSet;

pub use alist::{read_alist, write_alist};
pub use gf2::{null_space_basis, random_codeword_fixed_weight, DEFAULT_CODEWORD_TRIALS};
pub use regular::{gen_regular_code, DEFAULT_SWAP_BUDGET};

use crate::error::{check_len, Error, Result};

/// Largest check degree for which local codeword polytope rows are generated.
pub const DEFAULT_DEGREE_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckCode {
    n: usize,
    checks: Vec<Vec<usize>>,
}

impl ParityCheckCode {
    /// Builds a code from zero-based check index sets. Each set is sorted.
    pub fn new(n: usize, checks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("code length must be positive".into()));
        }
        let mut sorted = Vec::with_capacity(checks.len());
        for (i, mut check) in checks.into_iter().enumerate() {
            check.sort_unstable();
            if check.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("check {i} repeats a variable")));
            }
            if let Some(&v) = check.last() {
                if v >= n {
                    return Err(Error::InvalidArgument(format!(
                        "check {i} references variable {v} of a length-{n} code"
                    )));
                }
            }
            sorted.push(check);
        }
        Ok(ParityCheckCode { n, checks: sorted })
    }

    /// Single parity check over all `n` positions.
    pub fn single_parity_check(n: usize) -> Result<Self> {
        ParityCheckCode::new(n, vec![(0..n).collect()])
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }

    pub fn max_check_degree(&self) -> usize {
        self.checks.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Checks each variable participates in.
    pub fn variable_checks(&self) -> Vec<Vec<usize>> {
        let mut vars = vec![Vec::new(); self.n];
        for (c, check) in self.checks.iter().enumerate() {
            for &v in check {
                vars[v].push(c);
            }
        }
        vars
    }

    pub fn dense(&self) -> Vec<Vec<u8>> {
        self.checks
            .iter()
            .map(|check| {
                let mut row = vec![0u8; self.n];
                for &v in check {
                    row[v] = 1;
                }
                row
            })
            .collect()
    }

    /// True if two checks share two or more variables.
    pub fn has_four_cycle(&self) -> bool {
        let mut seen = BTreeSet::new();
        for check in &self.checks {
            for (a, &u) in check.iter().enumerate() {
                for &v in &check[a + 1..] {
                    if !seen.insert((u, v)) {
                        return true;
                    }
                }
            }
        }
        false
    }

    pub fn is_codeword(&self, c: &[u8]) -> Result<bool> {
        check_len(self.n, c.len())?;
        Ok(self
            .checks
            .iter()
            .all(|check| check.iter().fold(0u8, |acc, &v| acc ^ (c[v] & 1)) == 0))
    }

    /// Local codeword polytope rows for every check, plus the box rows
    /// `0 <= f_i <= 1`, over bit variables.
    pub fn lcp_constraints(&self, degree_cap: usize) -> Result<Vec<LinearConstraint>> {
        let mut rows = Vec::new();
        for check in &self.checks {
            for (odd, even) in odd_subsets(check, degree_cap)? {
                let mut coefficients: Vec<(usize, f64)> = odd.iter().map(|&v| (v, 1.0)).collect();
                coefficients.extend(even.iter().map(|&v| (v, -1.0)));
                coefficients.sort_by_key(|&(v, _)| v);
                rows.push(LinearConstraint {
                    coefficients,
                    sense: Sense::Le,
                    bound: odd.len() as f64 - 1.0,
                });
            }
        }
        for v in 0..self.n {
            rows.push(LinearConstraint { coefficients: vec![(v, -1.0)], sense: Sense::Le, bound: 0.0 });
            rows.push(LinearConstraint { coefficients: vec![(v, 1.0)], sense: Sense::Le, bound: 1.0 });
        }
        Ok(rows)
    }
}

/// All `(S, I \ S)` splits of a check with `|S|` odd.
pub fn odd_subsets(check: &[usize], degree_cap: usize) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let d = check.len();
    if d > degree_cap {
        return Err(Error::DegreeCap { degree: d, cap: degree_cap });
    }
    let mut out = Vec::with_capacity(1 << d.saturating_sub(1));
    for mask in 0u32..(1u32 << d) {
        if mask.count_ones() % 2 == 1 {
            let (mut odd, mut even) = (Vec::new(), Vec::new());
            for (k, &v) in check.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    odd.push(v);
                } else {
                    even.push(v);
                }
            }
            out.push((odd, even));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coefficients: Vec<(usize, f64)>,
    pub sense: Sense,
    pub bound: f64,
}

impl LinearConstraint {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().map(|&(i, a)| a * x[i]).sum()
    }

    /// Amount by which `x` violates the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.eval(x);
        match self.sense {
            Sense::Le => (lhs - self.bound).max(0.0),
            Sense::Eq => (lhs - self.bound).abs(),
        }
    }
}
