//! Octonions built by Cayley-Dickson doubling of the reals.
//!
//! Multiplication follows `(a, b)(c, d) = (ac - d*b, da + bc*)` at every level, so the
//! complex and quaternion products used internally are the usual ones and `e_i e_i = -1`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub const ONE: Octonion = Octonion([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 8];
        c[i] = 1.0;
        Octonion(c)
    }

    pub fn conj(&self) -> Self {
        let mut c = self.0;
        for x in &mut c[1..] {
            *x = -*x;
        }
        Octonion(c)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: f64) -> Self {
        Octonion(self.0.map(|x| x * k))
    }
}

fn conj_into(x: &[f64], out: &mut [f64]) {
    out[0] = x[0];
    for i in 1..x.len() {
        out[i] = -x[i];
    }
}

fn cd_mul(p: &[f64], q: &[f64], out: &mut [f64]) {
    let n = p.len();
    if n == 1 {
        out[0] = p[0] * q[0];
        return;
    }
    let h = n / 2;
    let (a, b) = p.split_at(h);
    let (c, d) = q.split_at(h);
    let mut t1 = [0.0; 4];
    let mut t2 = [0.0; 4];
    let mut bar = [0.0; 4];

    cd_mul(a, c, &mut t1[..h]);
    conj_into(d, &mut bar[..h]);
    cd_mul(&bar[..h], b, &mut t2[..h]);
    for i in 0..h {
        out[i] = t1[i] - t2[i];
    }

    cd_mul(d, a, &mut t1[..h]);
    conj_into(c, &mut bar[..h]);
    cd_mul(b, &bar[..h], &mut t2[..h]);
    for i in 0..h {
        out[h + i] = t1[i] + t2[i];
    }
}

/// Octonion product `p q`.
pub fn cd_multiply(p: &Octonion, q: &Octonion) -> Octonion {
    let mut out = [0.0; 8];
    cd_mul(&p.0, &q.0, &mut out);
    Octonion(out)
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        cd_multiply(&self, &rhs)
    }
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, rhs: Octonion) -> Octonion {
        Octonion(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, rhs: Octonion) -> Octonion {
        Octonion(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        Octonion(self.0.map(|x| -x))
    }
}
