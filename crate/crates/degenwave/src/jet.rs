//! Truncated Taylor (jet) arithmetic used to evaluate analytic derivative
//! chains of the catalog symbol profiles. A `Jet` stores the coefficients of
//! `h(r + t) = sum_k c[k] t^k` up to order `JET_LEN - 1`, so the k-th
//! derivative is `k! * c[k]` exactly (to roundoff).

use crate::error::{Error, Result};

/// Supports multi-indices up to (4,4), so total derivative order up to 8.
pub const JET_LEN: usize = 9;

#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub c: [f64; JET_LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Jet {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Jet { c }
    }

    /// The identity jet at base point `v`: represents `r = v + t`.
    pub fn variable(v: f64) -> Jet {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            c[k] = self.c[k] + o.c[k];
        }
        Jet { c }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = *self;
        out.c[0] += s;
        out
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for i in 0..JET_LEN {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..JET_LEN - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }

    /// Natural log of a jet with strictly positive constant term.
    pub fn ln(&self) -> Result<Jet> {
        let u0 = self.c[0];
        if !(u0 > 0.0) {
            return Err(Error::Domain(format!("log of non-positive jet base {u0}")));
        }
        let mut v = [0.0; JET_LEN];
        v[0] = u0.ln();
        for k in 1..JET_LEN {
            // k*v_k*u_0 = k*u_k - sum_{j=1}^{k-1} j*v_j*u_{k-j}
            let mut acc = k as f64 * self.c[k];
            for j in 1..k {
                acc -= j as f64 * v[j] * self.c[k - j];
            }
            v[k] = acc / (k as f64 * u0);
        }
        Ok(Jet { c: v })
    }

    pub fn exp(&self) -> Jet {
        let mut w = [0.0; JET_LEN];
        w[0] = self.c[0].exp();
        for k in 1..JET_LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * w[k - j];
            }
            w[k] = acc / k as f64;
        }
        Jet { c: w }
    }

    /// Real power of a jet with positive base, via exp(e * ln).
    pub fn powf(&self, e: f64) -> Result<Jet> {
        let mut l = self.ln()?;
        for c in l.c.iter_mut() {
            *c *= e;
        }
        Ok(l.exp())
    }

    /// k-th derivative of the represented function at the base point.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        fact * self.c[k]
    }
}
