use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ParityCheckCode;
use crate::error::{Error, Result};

pub const DEFAULT_CODEWORD_TRIALS: u64 = 1_000_000;

#[derive(Clone)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn zeros(n: usize) -> Self {
        BitRow(vec![0; n.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn xor_with(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }
    fn weight(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Basis of the code (null space of H over GF(2)), eliminating columns in
/// `column_order`.
pub fn null_space_basis(code: &ParityCheckCode, column_order: &[usize]) -> Vec<Vec<u8>> {
    let n = code.len();
    let mut rows: Vec<BitRow> = code
        .checks()
        .iter()
        .map(|check| {
            let mut r = BitRow::zeros(n);
            check.iter().for_each(|&v| r.set(v));
            r
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, column)
    let mut next_row = 0;
    for &col in column_order {
        if next_row == rows.len() {
            break;
        }
        let Some(found) = (next_row..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next_row, found);
        let pivot = rows[next_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next_row && row.get(col) {
                row.xor_with(&pivot);
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
    }
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; n];
        pivots.iter().for_each(|&(_, c)| v[c] = true);
        v
    };
    column_order
        .iter()
        .filter(|&&c| !is_pivot[c])
        .map(|&free| {
            let mut word = vec![0u8; n];
            word[free] = 1;
            for &(r, c) in &pivots {
                if rows[r].get(free) {
                    word[c] = 1;
                }
            }
            word
        })
        .collect()
}

/// Seeded codeword of exactly `weight`, drawn as random combinations of a
/// randomly ordered basis until one has the requested weight.
pub fn random_codeword_fixed_weight(
    code: &ParityCheckCode,
    weight: usize,
    seed: u64,
    max_trials: u64,
) -> Result<Vec<u8>> {
    let n = code.len();
    if weight == 0 {
        return Ok(vec![0; n]);
    }
    if weight > n {
        return Err(Error::NoCodeword { weight, trials: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let basis: Vec<BitRow> = null_space_basis(code, &order)
        .into_iter()
        .map(|w| {
            let mut r = BitRow::zeros(n);
            w.iter().enumerate().filter(|(_, &b)| b == 1).for_each(|(i, _)| r.set(i));
            r
        })
        .collect();
    if basis.is_empty() {
        return Err(Error::NoCodeword { weight, trials: 0 });
    }
    for _ in 0..max_trials {
        let mut word = BitRow::zeros(n);
        for b in &basis {
            if rng.gen::<bool>() {
                word.xor_with(b);
            }
        }
        if word.weight() == weight {
            return Ok((0..n).map(|i| word.get(i) as u8).collect());
        }
    }
    Err(Error::NoCodeword { weight, trials: max_trials })
}
