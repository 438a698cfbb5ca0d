//! Joint iterative message-passing baseline: a BCJR channel detector and a
//! flooding sum-product LDPC decoder exchanging extrinsic bit LLRs.
//!
//! LLRs are `ln P(x = 0) / P(x = 1)` throughout.

use crate::code::ParityCheckCode;
use crate::error::{check_len, Error, Result};
use crate::trellis::Trellis;

/// Magnitude cap for LLRs entering the check-node update.
const LLR_CAP: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterSchedule {
    pub outer_iters: usize,
    pub inner_bp_iters: usize,
    pub stop_on_valid: bool,
}

impl Default for IterSchedule {
    fn default() -> Self {
        IterSchedule { outer_iters: 50, inner_bp_iters: 3, stop_on_valid: true }
    }
}

impl IterSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.outer_iters == 0 || self.inner_bp_iters == 0 {
            return Err(Error::InvalidArgument("iteration counts must be at least 1".into()));
        }
        Ok(())
    }
}

fn max_star(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// A-posteriori bit LLRs of the channel trellis given per-bit prior LLRs.
pub fn app_llrs(trellis: &Trellis, y: &[f64], sigma: f64, priors: &[f64]) -> Result<Vec<f64>> {
    let n = trellis.len();
    check_len(n, y.len())?;
    check_len(n, priors.len())?;
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    if priors.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument("prior LLRs must be finite".into()));
    }
    let s = trellis.num_states();
    let edges = trellis.edges();
    let inv = 1.0 / (2.0 * sigma * sigma);
    let gamma: Vec<f64> = edges
        .iter()
        .map(|e| {
            let d = y[e.time] - e.output;
            let half = 0.5 * priors[e.time];
            -d * d * inv + if e.input == 0 { half } else { -half }
        })
        .collect();
    let offset: Vec<f64> = (0..edges.len()).map(|e| trellis.edge_log_weight(e)).collect();

    let mut alpha = vec![vec![f64::NEG_INFINITY; s]; n + 1];
    alpha[0] = vec![0.0; s];
    for t in 0..n {
        let mut next = vec![f64::NEG_INFINITY; s];
        for e in trellis.edges_at(t) {
            let edge = &edges[e];
            next[edge.to] = max_star(next[edge.to], alpha[t][edge.from] + gamma[e] + offset[e]);
        }
        let m = next.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        next.iter_mut().for_each(|v| *v -= m);
        alpha[t + 1] = next;
    }
    let mut beta = vec![vec![f64::NEG_INFINITY; s]; n + 1];
    beta[n] = vec![0.0; s];
    for t in (0..n).rev() {
        let mut prev = vec![f64::NEG_INFINITY; s];
        for e in trellis.edges_at(t) {
            let edge = &edges[e];
            prev[edge.from] = max_star(prev[edge.from], gamma[e] + offset[e] + beta[t + 1][edge.to]);
        }
        let m = prev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prev.iter_mut().for_each(|v| *v -= m);
        beta[t] = prev;
    }
    Ok((0..n)
        .map(|t| {
            let (mut zero, mut one) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for e in trellis.edges_at(t) {
                let edge = &edges[e];
                let m = alpha[t][edge.from] + gamma[e] + offset[e] + beta[t + 1][edge.to];
                if edge.input == 0 {
                    zero = max_star(zero, m);
                } else {
                    one = max_star(one, m);
                }
            }
            zero - one
        })
        .collect())
}

/// Extrinsic channel LLRs: a-posteriori LLRs minus the priors.
pub fn forward_backward(trellis: &Trellis, y: &[f64], sigma: f64, priors: &[f64]) -> Result<Vec<f64>> {
    let app = app_llrs(trellis, y, sigma, priors)?;
    Ok(app.iter().zip(priors).map(|(a, p)| a - p).collect())
}

/// Exact pairwise check-node combination.
pub fn boxplus(a: f64, b: f64) -> f64 {
    let a = a.clamp(-LLR_CAP, LLR_CAP);
    let b = b.clamp(-LLR_CAP, LLR_CAP);
    a.signum() * b.signum() * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p()
        - (-(a - b).abs()).exp().ln_1p()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaResult {
    pub extrinsic: Vec<f64>,
    pub hard: Vec<u8>,
    pub valid: bool,
    pub iterations: usize,
}

/// Flooding sum-product decoding, stopping early on a valid codeword.
pub fn spa_ldpc(code: &ParityCheckCode, llrs: &[f64], iters: usize) -> Result<SpaResult> {
    check_len(code.len(), llrs.len())?;
    if iters == 0 {
        return Err(Error::InvalidArgument("need at least one iteration".into()));
    }
    let checks = code.checks();
    let mut v2c: Vec<Vec<f64>> = checks.iter().map(|c| c.iter().map(|&v| llrs[v]).collect()).collect();
    let mut c2v: Vec<Vec<f64>> = checks.iter().map(|c| vec![0.0; c.len()]).collect();
    let mut total = llrs.to_vec();
    let mut hard = vec![0u8; code.len()];
    let mut valid = false;
    let mut done = 0;
    for _ in 0..iters {
        done += 1;
        for (ci, check) in checks.iter().enumerate() {
            let msgs = &v2c[ci];
            let d = check.len();
            // prefix/suffix combination leaves each edge out exactly once
            let mut prefix = vec![LLR_CAP; d + 1];
            for k in 0..d {
                prefix[k + 1] = boxplus(prefix[k], msgs[k]);
            }
            let mut suffix = LLR_CAP;
            for k in (0..d).rev() {
                c2v[ci][k] = boxplus(prefix[k], suffix);
                suffix = boxplus(suffix, msgs[k]);
            }
        }
        total.copy_from_slice(llrs);
        for (ci, check) in checks.iter().enumerate() {
            for (k, &v) in check.iter().enumerate() {
                total[v] += c2v[ci][k];
            }
        }
        for (ci, check) in checks.iter().enumerate() {
            for (k, &v) in check.iter().enumerate() {
                v2c[ci][k] = total[v] - c2v[ci][k];
            }
        }
        for (h, &l) in hard.iter_mut().zip(&total) {
            *h = (l < 0.0) as u8;
        }
        valid = code.is_codeword(&hard)?;
        if valid {
            break;
        }
    }
    let extrinsic = total.iter().zip(llrs).map(|(t, l)| t - l).collect();
    Ok(SpaResult { extrinsic, hard, valid, iterations: done })
}

#[derive(Debug, Clone, PartialEq)]
pub struct JimpdOutcome {
    pub bits: Vec<u8>,
    pub valid: bool,
    pub outer_iterations: usize,
}

pub fn jimpd_decode(
    trellis: &Trellis,
    code: &ParityCheckCode,
    y: &[f64],
    sigma: f64,
    schedule: &IterSchedule,
) -> Result<JimpdOutcome> {
    schedule.validate()?;
    check_len(trellis.len(), code.len())?;
    let mut code_ext = vec![0.0; code.len()];
    let mut last = None;
    for outer in 1..=schedule.outer_iters {
        let ch_ext = forward_backward(trellis, y, sigma, &code_ext)?;
        let spa = spa_ldpc(code, &ch_ext, schedule.inner_bp_iters)?;
        code_ext = spa.extrinsic.iter().map(|v| v.clamp(-LLR_CAP, LLR_CAP)).collect();
        let out = JimpdOutcome { bits: spa.hard, valid: spa.valid, outer_iterations: outer };
        if out.valid && schedule.stop_on_valid {
            return Ok(out);
        }
        last = Some(out);
    }
    Ok(last.expect("at least one outer iteration"))
}
