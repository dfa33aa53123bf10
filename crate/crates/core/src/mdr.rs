//! Eight-dimensional multidimensional reconciliation (reverse direction).
//!
//! Bob normalizes a block `y` of his data, maps 8 code bits onto the sphere point `u`
//! and publishes `alpha = u * conj(y)`. Alice applies `alpha` to her own normalized block
//! and obtains a noisy copy of `u`, from which she computes LLRs for the decoder.
//!
//! Blocks are expected in per-dimension unit-variance units, so their norms are close to
//! `sqrt(8)` on average. Norms are passed alongside the normalized vectors because the
//! LLR depends on them.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::octonion::{cd_multiply, Octonion};

pub const DIM: usize = 8;
const INV_SQRT8: f64 = 0.353_553_390_593_273_8;

pub type Block = [f64; DIM];

/// `u_i = (-1)^{bit_i} / sqrt(8)`.
pub fn map_bits_to_sphere(bits: &[u8; DIM]) -> Block {
    bits.map(|b| if b & 1 == 0 { INV_SQRT8 } else { -INV_SQRT8 })
}

/// Hard decision; a zero coordinate decodes to bit 0.
pub fn sphere_to_bits(v: &Block) -> [u8; DIM] {
    v.map(|x| u8::from(x < 0.0))
}

/// Splits a block into its unit-norm direction and its norm.
pub fn normalize(block: &Block) -> (Block, f64) {
    let norm = block.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return (*block, 0.0);
    }
    (block.map(|x| x / norm), norm)
}

/// The public message `alpha = u * conj(y)`, which maps `y` onto `u`.
pub fn rotation_coefficients(y_norm: &Block, u: &Block) -> Result<Octonion> {
    let n2: f64 = y_norm.iter().map(|x| x * x).sum();
    if (n2.sqrt() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("block norm {} is not 1", n2.sqrt())));
    }
    Ok(cd_multiply(&Octonion(*u), &Octonion(*y_norm).conj()))
}

/// `alpha * x`.
pub fn apply_rotation(alpha: &Octonion, x_norm: &Block) -> Block {
    cd_multiply(alpha, &Octonion(*x_norm)).0
}

/// Per-bit LLRs (positive favors bit 0) for the virtual channel `|x| v = rho |y| u + w`.
///
/// Conditioned on Bob's block, Alice's normalized data is Gaussian around `rho y` with
/// per-dimension variance `1 - rho^2 = 1 / (1 + snr)`; the rotation is orthogonal, so
/// the same holds after applying `alpha`.
pub fn channel_llrs(v: &Block, norm_x: f64, norm_y: f64, snr: f64) -> Block {
    let rho = (snr / (1.0 + snr)).sqrt();
    let k = 2.0 * rho * (1.0 + snr) * norm_x * norm_y * INV_SQRT8;
    v.map(|vi| k * vi)
}

/// One reconciliation frame: both parties' blocks plus the spherical codewords and the
/// public rotation messages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdrFrame {
    pub x_blocks: Vec<Block>,
    pub y_blocks: Vec<Block>,
    pub u_blocks: Vec<Block>,
    pub alpha_blocks: Vec<Octonion>,
}

impl MdrFrame {
    /// Bob's side: one rotation message per block. `bits` holds 8 bits per block.
    pub fn encode(x_blocks: Vec<Block>, y_blocks: Vec<Block>, bits: &[u8]) -> Result<Self> {
        if x_blocks.len() != y_blocks.len() {
            return Err(Error::LengthMismatch { expected: y_blocks.len(), actual: x_blocks.len() });
        }
        if bits.len() != DIM * y_blocks.len() {
            return Err(Error::LengthMismatch { expected: DIM * y_blocks.len(), actual: bits.len() });
        }
        let mut u_blocks = Vec::with_capacity(y_blocks.len());
        let mut alpha_blocks = Vec::with_capacity(y_blocks.len());
        for (y, chunk) in y_blocks.iter().zip(bits.chunks_exact(DIM)) {
            let b: [u8; DIM] = chunk.try_into().expect("chunk of 8");
            let u = map_bits_to_sphere(&b);
            let (yn, norm) = normalize(y);
            if norm == 0.0 {
                return Err(Error::InvalidParameter("zero block cannot be rotated".into()));
            }
            alpha_blocks.push(rotation_coefficients(&yn, &u)?);
            u_blocks.push(u);
        }
        Ok(Self { x_blocks, y_blocks, u_blocks, alpha_blocks })
    }

    /// Alice's side: LLRs for all `8 * blocks` bits.
    pub fn llrs(&self, snr: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(DIM * self.x_blocks.len());
        for ((x, y), alpha) in self.x_blocks.iter().zip(&self.y_blocks).zip(&self.alpha_blocks) {
            let (xn, nx) = normalize(x);
            let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let v = apply_rotation(alpha, &xn);
            out.extend_from_slice(&channel_llrs(&v, nx, ny, snr));
        }
        out
    }

    /// Flat little-endian layout: block count (u64), then per block the 8 reals of
    /// `x`, `y`, `u` and `alpha`.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(&(self.x_blocks.len() as u64).to_le_bytes())?;
        for i in 0..self.x_blocks.len() {
            for block in [&self.x_blocks[i], &self.y_blocks[i], &self.u_blocks[i], &self.alpha_blocks[i].0] {
                for v in block {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        let mut read_block = |r: &mut dyn Read| -> Result<Block> {
            let mut out = [0.0; DIM];
            for v in &mut out {
                r.read_exact(&mut b8)?;
                *v = f64::from_le_bytes(b8);
            }
            Ok(out)
        };
        let mut f = MdrFrame { x_blocks: vec![], y_blocks: vec![], u_blocks: vec![], alpha_blocks: vec![] };
        for _ in 0..n {
            f.x_blocks.push(read_block(r)?);
            f.y_blocks.push(read_block(r)?);
            f.u_blocks.push(read_block(r)?);
            f.alpha_blocks.push(Octonion(read_block(r)?));
        }
        Ok(f)
    }
}

/// Groups a real stream into 8-blocks, zero-padding the last one.
pub fn to_blocks(stream: &[f64]) -> Vec<Block> {
    stream
        .chunks(DIM)
        .map(|c| {
            let mut b = [0.0; DIM];
            b[..c.len()].copy_from_slice(c);
            b
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn unit(rng: &mut ChaCha8Rng) -> Block {
        normalize(&std::array::from_fn(|_| rng.sample(StandardNormal))).0
    }

    #[test]
    fn sphere_mapping() {
        assert_eq!(map_bits_to_sphere(&[0; 8]), [INV_SQRT8; 8]);
        assert_eq!(map_bits_to_sphere(&[1; 8]), [-INV_SQRT8; 8]);
        let bits = [1, 0, 0, 1, 1, 1, 0, 1];
        assert_eq!(sphere_to_bits(&map_bits_to_sphere(&bits)), bits);
        assert_eq!(sphere_to_bits(&[0.0; 8]), [0; 8]);
    }

    #[test]
    fn trivial_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = unit(&mut rng);
        let a = rotation_coefficients(&y, &y).unwrap();
        assert!((a - Octonion::ONE).norm() < 1e-12);
        let a = rotation_coefficients(&y, &y.map(|v| -v)).unwrap();
        assert!((a + Octonion::ONE).norm() < 1e-12);
        assert_eq!(apply_rotation(&Octonion::ONE, &y), y);
        assert!(rotation_coefficients(&[1.0; 8], &y).is_err());
    }

    #[test]
    fn noiseless_frame_recovers_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let blocks: Vec<Block> = (0..100).map(|_| std::array::from_fn(|_| rng.sample(StandardNormal))).collect();
        let bits: Vec<u8> = (0..800).map(|_| rng.random_range(0..2)).collect();
        let frame = MdrFrame::encode(blocks.clone(), blocks, &bits).unwrap();
        let hard: Vec<u8> = frame.llrs(1.0).iter().map(|&l| u8::from(l < 0.0)).collect();
        assert_eq!(hard, bits);
    }

    #[test]
    fn llr_limits() {
        let v = [INV_SQRT8; 8];
        let weak = channel_llrs(&v, 2.8, 2.8, 1e-12);
        assert!(weak.iter().all(|l| l.abs() < 1e-4));
        let strong = channel_llrs(&v.map(|x| -x), 2.8, 2.8, 1e6);
        assert!(strong.iter().all(|&l| l < -1e3));
    }

    #[test]
    fn frame_round_trips_through_bytes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let blocks: Vec<Block> = (0..3).map(|_| std::array::from_fn(|_| rng.sample(StandardNormal))).collect();
        let frame = MdrFrame::encode(blocks.clone(), blocks, &[0u8; 24]).unwrap();
        let mut buf = Vec::new();
        frame.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 3 * 4 * 8 * 8);
        assert_eq!(MdrFrame::read_from(&mut buf.as_slice()).unwrap(), frame);
    }

    #[test]
    fn padding() {
        let b = to_blocks(&[1.0; 10]);
        assert_eq!(b.len(), 2);
        assert_eq!(b[1], [1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }
}
