use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ParityCheckCode;
use crate::error::{Error, Result};

/// Socket swaps tried before giving up on removing double edges and 4-cycles.
pub const DEFAULT_SWAP_BUDGET: usize = 200_000;

/// Random `(dv, dc)`-regular code with no double edges and no 4-cycles.
///
/// Variable sockets are dealt to checks by a seeded shuffle, then offending
/// sockets are swapped with random partners, keeping a swap whenever it
/// does not increase the number of conflicts.
pub fn gen_regular_code(n: usize, dv: usize, dc: usize, seed: u64) -> Result<ParityCheckCode> {
    gen_regular_code_with_budget(n, dv, dc, seed, DEFAULT_SWAP_BUDGET)
}

pub fn gen_regular_code_with_budget(
    n: usize,
    dv: usize,
    dc: usize,
    seed: u64,
    budget: usize,
) -> Result<ParityCheckCode> {
    if n == 0 || dv == 0 || dc == 0 {
        return Err(Error::InvalidArgument("n, dv and dc must be positive".into()));
    }
    if (n * dv) % dc != 0 {
        return Err(Error::InvalidArgument(format!("n*dv = {} is not divisible by dc = {dc}", n * dv)));
    }
    if dc > n {
        return Err(Error::InvalidArgument(format!("check degree {dc} exceeds length {n}")));
    }
    let m = n * dv / dc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sockets: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(dv)).collect();
    sockets.shuffle(&mut rng);

    let mut cost = conflict_cost(&sockets, m, dc);
    let mut tries = 0;
    while cost > 0 {
        if tries >= budget {
            return Err(Error::RejectionBudget { seed });
        }
        tries += 1;
        let bad = conflicting_sockets(&sockets, m, dc);
        let p = *bad.choose(&mut rng).expect("positive cost has a conflicting socket");
        let q = rng.gen_range(0..sockets.len());
        if p / dc == q / dc {
            continue;
        }
        sockets.swap(p, q);
        let new_cost = conflict_cost(&sockets, m, dc);
        if new_cost <= cost {
            cost = new_cost;
        } else {
            sockets.swap(p, q);
        }
    }
    let checks = sockets.chunks(dc).map(|c| c.to_vec()).collect();
    ParityCheckCode::new(n, checks)
}

// double edges plus, for each pair of checks, C(shared, 2)
fn conflict_cost(sockets: &[usize], m: usize, dc: usize) -> usize {
    let mut cost = 0;
    let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
    let mut var_checks: HashMap<usize, Vec<usize>> = HashMap::new();
    for c in 0..m {
        let row = &sockets[c * dc..(c + 1) * dc];
        for (i, &v) in row.iter().enumerate() {
            if row[..i].contains(&v) {
                cost += 1;
            } else {
                var_checks.entry(v).or_default().push(c);
            }
        }
    }
    for checks in var_checks.values() {
        for (i, &a) in checks.iter().enumerate() {
            for &b in &checks[i + 1..] {
                *shared.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
    }
    cost + shared.values().map(|&s| s * (s.saturating_sub(1)) / 2).sum::<usize>()
}

fn conflicting_sockets(sockets: &[usize], m: usize, dc: usize) -> Vec<usize> {
    let mut var_checks: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut bad = Vec::new();
    for c in 0..m {
        let row = &sockets[c * dc..(c + 1) * dc];
        for (i, &v) in row.iter().enumerate() {
            if row[..i].contains(&v) {
                bad.push(c * dc + i);
            }
            var_checks.entry(v).or_default().push(c);
        }
    }
    for c in 0..m {
        let row = &sockets[c * dc..(c + 1) * dc];
        for (i, &v) in row.iter().enumerate() {
            // v is bad if another variable of this row shares a second check with it
            let others = &var_checks[&v];
            let conflict = row.iter().enumerate().any(|(j, &u)| {
                j != i
                    && u != v
                    && var_checks[&u].iter().any(|&cu| cu != c && others.contains(&cu))
            });
            if conflict {
                bad.push(c * dc + i);
            }
        }
    }
    bad.sort_unstable();
    bad.dedup();
    bad
}
