//! (max,+) semiring primitives: matrices over resource indices and resource
//! availability vectors. `-inf` is the semiring zero (no path / never used).

use serde::{Deserialize, Serialize};
use std::fmt;

pub const NEG_INF: f64 = f64::NEG_INFINITY;

/// Square matrix over the (max,+) semiring, row-major, indexed by resource.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxPlusMatrix {
    n: usize,
    data: Vec<f64>,
}

impl MaxPlusMatrix {
    pub fn zeroed(n: usize) -> Self {
        MaxPlusMatrix { n, data: vec![NEG_INF; n * n] }
    }

    /// Semiring identity: 0 on the diagonal, -inf elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeroed(n);
        for i in 0..n {
            m.set(i, i, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.data[row * self.n + col] = v;
    }

    /// `self ⊗ rhs`: composition where `rhs` acts first.
    pub fn compose(&self, rhs: &MaxPlusMatrix) -> MaxPlusMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions must agree");
        let mut out = MaxPlusMatrix::zeroed(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.get(i, k);
                if a == NEG_INF {
                    continue;
                }
                for jj in 0..self.n {
                    let b = rhs.get(k, jj);
                    if b == NEG_INF {
                        continue;
                    }
                    let cur = out.get(i, jj);
                    if a + b > cur {
                        out.set(i, jj, a + b);
                    }
                }
            }
        }
        out
    }

    /// `self ⊗ x`.
    pub fn apply(&self, x: &ResourceVector) -> ResourceVector {
        assert_eq!(self.n, x.0.len());
        let mut out = vec![NEG_INF; self.n];
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.get(i, k);
                if a == NEG_INF || x.0[k] == NEG_INF {
                    continue;
                }
                out[i] = out[i].max(a + x.0[k]);
            }
        }
        ResourceVector(out)
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(NEG_INF, f64::max)
    }
}

impl fmt::Display for MaxPlusMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if v == NEG_INF {
                    write!(f, "{:>9}", "-inf")?;
                } else {
                    write!(f, "{v:>9.3}")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Per-resource availability timestamps; the max-plus state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceVector(pub Vec<f64>);

impl ResourceVector {
    pub fn zero(n: usize) -> Self {
        ResourceVector(vec![0.0; n])
    }

    pub fn max_entry(&self) -> f64 {
        self.0.iter().copied().fold(NEG_INF, f64::max)
    }

    /// Componentwise `self <= other` (used for dominance pruning).
    pub fn dominated_by(&self, other: &ResourceVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| b <= a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let id = MaxPlusMatrix::identity(3);
        let mut m = MaxPlusMatrix::zeroed(3);
        m.set(0, 0, 1.5);
        m.set(1, 0, 2.0);
        m.set(2, 2, 0.0);
        assert_eq!(id.compose(&m), m);
        assert_eq!(m.compose(&id), m);
    }

    #[test]
    fn apply_matches_compose() {
        let mut a = MaxPlusMatrix::identity(2);
        a.set(0, 0, 1.0);
        a.set(0, 1, 3.0);
        let mut b = MaxPlusMatrix::identity(2);
        b.set(1, 0, 2.0);
        let x = ResourceVector::zero(2);
        let via_vec = a.apply(&b.apply(&x));
        let via_mat = a.compose(&b).apply(&x);
        assert_eq!(via_vec, via_mat);
    }

    #[test]
    fn neg_inf_annihilates() {
        let m = MaxPlusMatrix::zeroed(2);
        let x = ResourceVector::zero(2);
        let y = m.apply(&x);
        assert!(y.0.iter().all(|v| *v == NEG_INF));
    }
}
