//! Systematic encoding for arbitrary parity-check matrices.
//!
//! Checks that own a private (degree-1) column are peeled off first; the remaining core
//! is brought to reduced row-echelon form. Raptor-like and accumulator structures peel
//! completely, so the dense step only sees whatever irregular core is left.

use super::matrix::ParityCheckMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Encoder {
    n: usize,
    info_cols: Vec<u32>,
    /// Pivot column and the information columns it is the XOR of.
    core: Vec<(u32, Vec<u32>)>,
    /// Peeled checks in peel order: the check's row and the column it determines.
    peeled: Vec<(Vec<u32>, u32)>,
}

impl Encoder {
    pub fn new(h: &ParityCheckMatrix) -> Result<Self> {
        let n = h.n_vars();
        let m = h.n_checks();
        let cols = h.columns();
        let mut deg: Vec<usize> = cols.iter().map(Vec::len).collect();
        let mut row_alive = vec![true; m];
        let mut determined = vec![false; n];
        let mut stack: Vec<u32> = (0..n as u32).filter(|&c| deg[c as usize] == 1).collect();
        let mut peeled = Vec::new();
        while let Some(c) = stack.pop() {
            if deg[c as usize] != 1 || determined[c as usize] {
                continue;
            }
            let r = cols[c as usize]
                .iter()
                .copied()
                .find(|&r| row_alive[r as usize])
                .expect("degree-1 column has a live check");
            row_alive[r as usize] = false;
            determined[c as usize] = true;
            let row = h.row(r as usize);
            for &o in row {
                deg[o as usize] -= 1;
                if deg[o as usize] == 1 && !determined[o as usize] {
                    stack.push(o);
                }
            }
            let others: Vec<u32> = row.iter().copied().filter(|&o| o != c).collect();
            peeled.push((others, c));
        }

        // Dense elimination over the checks that could not be peeled.
        let core_rows: Vec<usize> = (0..m).filter(|&r| row_alive[r]).collect();
        let mut core_cols: Vec<u32> = Vec::new();
        let mut col_index = vec![usize::MAX; n];
        for &r in &core_rows {
            for &c in h.row(r) {
                if col_index[c as usize] == usize::MAX && !determined[c as usize] {
                    col_index[c as usize] = core_cols.len();
                    core_cols.push(c);
                }
            }
        }
        let words = core_cols.len().div_ceil(64);
        let mut mat: Vec<Vec<u64>> = core_rows
            .iter()
            .map(|&r| {
                let mut bits = vec![0u64; words];
                for &c in h.row(r) {
                    let i = col_index[c as usize];
                    if i != usize::MAX {
                        bits[i / 64] ^= 1 << (i % 64);
                    }
                }
                bits
            })
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut next_row = 0;
        for col in 0..core_cols.len() {
            let (w, b) = (col / 64, 1u64 << (col % 64));
            let Some(found) = (next_row..mat.len()).find(|&r| mat[r][w] & b != 0) else {
                continue;
            };
            mat.swap(next_row, found);
            let pivot_row = mat[next_row].clone();
            for (r, row) in mat.iter_mut().enumerate() {
                if r != next_row && row[w] & b != 0 {
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x ^= y;
                    }
                }
            }
            pivots.push((next_row, col));
            next_row += 1;
        }
        let mut is_pivot = vec![false; core_cols.len()];
        for &(_, col) in &pivots {
            is_pivot[col] = true;
            determined[core_cols[col] as usize] = true;
        }
        let core = pivots
            .iter()
            .map(|&(r, col)| {
                let deps = (0..core_cols.len())
                    .filter(|&j| j != col && !is_pivot[j] && mat[r][j / 64] & (1 << (j % 64)) != 0)
                    .map(|j| core_cols[j])
                    .collect();
                (core_cols[col], deps)
            })
            .collect();
        let info_cols: Vec<u32> = (0..n as u32).filter(|&c| !determined[c as usize]).collect();
        Ok(Self { n, info_cols, core, peeled })
    }

    /// Number of information bits.
    pub fn k(&self) -> usize {
        self.info_cols.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Columns carrying the payload, ascending.
    pub fn info_columns(&self) -> &[u32] {
        &self.info_cols
    }

    pub fn encode(&self, payload: &[u8]) -> Result<Vec<u8>> {
        if payload.len() != self.k() {
            return Err(Error::LengthMismatch { expected: self.k(), actual: payload.len() });
        }
        let mut word = vec![0u8; self.n];
        for (&c, &b) in self.info_cols.iter().zip(payload) {
            word[c as usize] = b & 1;
        }
        for (pivot, deps) in &self.core {
            word[*pivot as usize] = deps.iter().fold(0, |acc, &c| acc ^ word[c as usize]);
        }
        for (others, c) in self.peeled.iter().rev() {
            word[*c as usize] = others.iter().fold(0, |acc, &o| acc ^ word[o as usize]);
        }
        Ok(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_code() {
        let h = ParityCheckMatrix::new(7, vec![vec![0, 1, 2, 4], vec![1, 2, 3, 5], vec![0, 2, 3, 6]]).unwrap();
        let enc = Encoder::new(&h).unwrap();
        assert_eq!(enc.k(), 4);
        for m in 0..16u8 {
            let payload: Vec<u8> = (0..4).map(|i| (m >> i) & 1).collect();
            let w = enc.encode(&payload).unwrap();
            assert!(h.syndrome(&w).unwrap().iter().all(|&s| s == 0));
        }
    }

    #[test]
    fn dense_core_with_redundant_row() {
        // No degree-1 columns; the third row is the sum of the first two.
        let h = ParityCheckMatrix::new(
            6,
            vec![vec![0, 1, 2, 3], vec![2, 3, 4, 5], vec![0, 1, 4, 5], vec![0, 2, 4], vec![1, 3, 5]],
        )
        .unwrap();
        let enc = Encoder::new(&h).unwrap();
        assert_eq!(enc.k(), 2);
        for m in 0..4u8 {
            let w = enc.encode(&[m & 1, m >> 1]).unwrap();
            assert!(h.syndrome(&w).unwrap().iter().all(|&s| s == 0));
        }
    }
}
