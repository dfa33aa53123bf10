//! Flooding sum-product decoding on the subgraph selected by the code rate.

use serde::{Deserialize, Serialize};

use super::code::CodeSpec;
use super::matrix::ParityCheckMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 150;
/// Messages and channel LLRs are clipped to this magnitude.
pub const LLR_CLIP: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    /// Every check of the subgraph is satisfied and no bit is left undecided.
    pub converged: bool,
    pub iterations_used: usize,
}

/// Tanner graph in compressed form: edges grouped by check, plus a variable-to-edge index.
#[derive(Debug, Clone)]
pub struct Subgraph {
    n_vars: usize,
    row_ptr: Vec<u32>,
    edge_var: Vec<u32>,
    var_ptr: Vec<u32>,
    var_edges: Vec<u32>,
}

impl Subgraph {
    pub fn new(h: &ParityCheckMatrix) -> Self {
        let n = h.n_vars();
        let mut row_ptr = Vec::with_capacity(h.n_checks() + 1);
        let mut edge_var = Vec::with_capacity(h.n_edges());
        row_ptr.push(0);
        for row in h.rows() {
            edge_var.extend_from_slice(row);
            row_ptr.push(edge_var.len() as u32);
        }
        let mut var_ptr = vec![0u32; n + 1];
        for &v in &edge_var {
            var_ptr[v as usize + 1] += 1;
        }
        for i in 0..n {
            var_ptr[i + 1] += var_ptr[i];
        }
        let mut fill = var_ptr.clone();
        let mut var_edges = vec![0u32; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v as usize] as usize] = e as u32;
            fill[v as usize] += 1;
        }
        Self { n_vars: n, row_ptr, edge_var, var_ptr, var_edges }
    }

    pub fn for_rate(spec: &CodeSpec, rate: f64) -> Result<Self> {
        Ok(Self::new(&spec.matrix_at(rate)?))
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    fn syndrome_ok(&self, bits: &[u8]) -> bool {
        self.row_ptr.windows(2).all(|w| {
            self.edge_var[w[0] as usize..w[1] as usize].iter().fold(0u8, |acc, &v| acc ^ bits[v as usize]) == 0
        })
    }

    /// Decodes channel LLRs (positive favors 0). Stops as soon as the hard decision
    /// satisfies every check.
    pub fn decode(&self, llrs: &[f64], max_iter: usize) -> Result<DecodeResult> {
        if llrs.len() != self.n_vars {
            return Err(Error::LengthMismatch { expected: self.n_vars, actual: llrs.len() });
        }
        let channel: Vec<f64> = llrs.iter().map(|l| l.clamp(-LLR_CLIP, LLR_CLIP)).collect();
        let mut total = channel.clone();
        let mut c2v = vec![0.0f64; self.edge_var.len()];
        let mut bits: Vec<u8> = total.iter().map(|&l| u8::from(l < 0.0)).collect();
        let decided = |total: &[f64]| total.iter().all(|&l| l != 0.0);
        if decided(&total) && self.syndrome_ok(&bits) {
            return Ok(DecodeResult { bits, converged: true, iterations_used: 0 });
        }
        let max_deg = self.row_ptr.windows(2).map(|w| (w[1] - w[0]) as usize).max().unwrap_or(0);
        let mut t = vec![0.0f64; max_deg];
        let mut suffix = vec![0.0f64; max_deg + 1];
        for iter in 1..=max_iter {
            for w in self.row_ptr.windows(2) {
                let (s, e) = (w[0] as usize, w[1] as usize);
                let d = e - s;
                for i in 0..d {
                    let v = self.edge_var[s + i] as usize;
                    let msg = (total[v] - c2v[s + i]).clamp(-LLR_CLIP, LLR_CLIP);
                    t[i] = (0.5 * msg).tanh();
                }
                suffix[d] = 1.0;
                for i in (0..d).rev() {
                    suffix[i] = suffix[i + 1] * t[i];
                }
                let mut prefix = 1.0;
                for i in 0..d {
                    let p = (prefix * suffix[i + 1]).clamp(-1.0, 1.0);
                    c2v[s + i] = (2.0 * p.atanh()).clamp(-LLR_CLIP, LLR_CLIP);
                    prefix *= t[i];
                }
            }
            for v in 0..self.n_vars {
                let (s, e) = (self.var_ptr[v] as usize, self.var_ptr[v + 1] as usize);
                total[v] = channel[v] + self.var_edges[s..e].iter().map(|&ed| c2v[ed as usize]).sum::<f64>();
                bits[v] = u8::from(total[v] < 0.0);
            }
            if decided(&total) && self.syndrome_ok(&bits) {
                return Ok(DecodeResult { bits, converged: true, iterations_used: iter });
            }
        }
        Ok(DecodeResult { bits, converged: false, iterations_used: max_iter })
    }
}

/// One-shot decode at `rate`; builds the subgraph on every call.
pub fn decode(spec: &CodeSpec, rate: f64, llrs: &[f64], max_iter: usize) -> Result<DecodeResult> {
    Subgraph::for_rate(spec, rate)?.decode(llrs, max_iter)
}
