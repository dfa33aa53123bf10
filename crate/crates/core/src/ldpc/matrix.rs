//! Sparse binary parity-check matrices and the alist text format.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Rows stored as sorted, duplicate-free lists of column indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n_vars: usize,
    rows: Vec<Vec<u32>>,
}

impl ParityCheckMatrix {
    pub fn new(n_vars: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parse(format!("row {i} lists a column twice")));
            }
            if let Some(&c) = row.last() {
                if c as usize >= n_vars {
                    return Err(Error::Parse(format!("row {i} references column {c} of {n_vars}")));
                }
            }
        }
        Ok(Self { n_vars, rows })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    pub fn n_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Column-wise view: for each variable, the checks it participates in (ascending).
    pub fn columns(&self) -> Vec<Vec<u32>> {
        let mut cols = vec![Vec::new(); self.n_vars];
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                cols[c as usize].push(r as u32);
            }
        }
        cols
    }

    pub fn column_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vars];
        for row in &self.rows {
            for &c in row {
                deg[c as usize] += 1;
            }
        }
        deg
    }

    /// Syndrome of `word` (one byte per bit, only the low bit is read).
    pub fn syndrome(&self, word: &[u8]) -> Result<Vec<u8>> {
        if word.len() != self.n_vars {
            return Err(Error::LengthMismatch { expected: self.n_vars, actual: word.len() });
        }
        Ok(self.rows.iter().map(|row| row.iter().fold(0u8, |acc, &c| acc ^ (word[c as usize] & 1))).collect())
    }

    /// MacKay's alist layout with zero-padded index lists (1-based indices).
    pub fn to_alist(&self) -> String {
        let cols = self.columns();
        let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n_vars, self.rows.len());
        let _ = writeln!(s, "{max_col} {max_row}");
        let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "{}", join(&mut cols.iter().map(Vec::len)));
        let _ = writeln!(s, "{}", join(&mut self.rows.iter().map(Vec::len)));
        for (list, width) in cols.iter().map(|c| (c, max_col)).chain(self.rows.iter().map(|r| (r, max_row))) {
            let mut padded: Vec<usize> = list.iter().map(|&x| x as usize + 1).collect();
            padded.resize(width, 0);
            let _ = writeln!(s, "{}", join(&mut padded.into_iter()));
        }
        s
    }

    /// Parses an alist file. Index lists may be zero-padded or not; the column and row
    /// lists must describe the same matrix.
    pub fn from_alist(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut next_nums = |what: &str| -> Result<Vec<usize>> {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("alist ends before {what}")))?;
            line.split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad number {t:?} in {what}"))))
                .collect()
        };
        let dims = next_nums("dimensions")?;
        let [n, m] = dims[..] else {
            return Err(Error::Parse("first line must be 'N M'".into()));
        };
        let maxes = next_nums("maximum weights")?;
        if maxes.len() != 2 {
            return Err(Error::Parse("second line must hold two maximum weights".into()));
        }
        let col_w = next_nums("column weights")?;
        let row_w = next_nums("row weights")?;
        if col_w.len() != n || row_w.len() != m {
            return Err(Error::Parse("weight lists do not match the dimensions".into()));
        }
        let mut read_lists = |count: usize, weights: &[usize], bound: usize, what: &str| -> Result<Vec<Vec<u32>>> {
            (0..count)
                .map(|i| {
                    let idx: Vec<usize> = next_nums(what)?.into_iter().filter(|&x| x != 0).collect();
                    if idx.len() != weights[i] {
                        return Err(Error::Parse(format!("{what} {i}: expected {} entries", weights[i])));
                    }
                    if idx.iter().any(|&x| x > bound) {
                        return Err(Error::Parse(format!("{what} {i}: index out of range")));
                    }
                    Ok(idx.into_iter().map(|x| (x - 1) as u32).collect())
                })
                .collect()
        };
        let col_lists = read_lists(n, &col_w, m, "column")?;
        let row_lists = read_lists(m, &row_w, n, "row")?;
        let h = Self::new(n, row_lists)?;
        let mut cols = h.columns();
        for (c, mut listed) in col_lists.into_iter().enumerate() {
            listed.sort_unstable();
            cols[c].sort_unstable();
            if listed != cols[c] {
                return Err(Error::Parse(format!("column {c} disagrees with the row lists")));
            }
        }
        Ok(h)
    }
}
