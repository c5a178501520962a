//! Dense square matrices over a finite ring, acting on coordinate columns.

use std::fmt;

use serde::Serialize;

use crate::quadmod::Vector;
use crate::ring::{prime_factors, Elem, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mat {
    dim: usize,
    /// Row-major.
    data: Vec<Elem>,
}

impl Mat {
    pub fn zero(dim: usize) -> Mat {
        Mat { dim, data: vec![Elem(0); dim * dim] }
    }

    pub fn identity(ring: &Ring, dim: usize) -> Mat {
        let mut m = Mat::zero(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ring.one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Mat {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "square matrix expected");
        Mat { dim, data: rows.concat() }
    }

    /// Matrix whose `c`-th column is `cols[c]`.
    pub fn from_columns(cols: &[Vector]) -> Mat {
        let dim = cols.len();
        let mut m = Mat::zero(dim);
        for (c, v) in cols.iter().enumerate() {
            assert_eq!(v.dim(), dim);
            for r in 0..dim {
                m.data[r * dim + c] = v.0[r];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: Elem) {
        self.data[r * self.dim + c] = x;
    }

    pub fn column(&self, c: usize) -> Vector {
        Vector((0..self.dim).map(|r| self.get(r, c)).collect())
    }

    pub fn set_column(&mut self, c: usize, v: &Vector) {
        for r in 0..self.dim {
            self.data[r * self.dim + c] = v.0[r];
        }
    }

    pub fn is_identity(&self, ring: &Ring) -> bool {
        (0..self.dim).all(|r| {
            (0..self.dim).all(|c| self.get(r, c) == if r == c { ring.one() } else { ring.zero() })
        })
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zero(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                t.data[c * self.dim + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, ring: &Ring, other: &Mat) -> Mat {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Mat::zero(d);
        if let Some(n) = ring.modulus() {
            for r in 0..d {
                for c in 0..d {
                    let mut acc: u64 = 0;
                    for k in 0..d {
                        acc += self.data[r * d + k].0 as u64 * other.data[k * d + c].0 as u64;
                        if acc >= 1 << 62 {
                            acc %= n;
                        }
                    }
                    out.data[r * d + c] = Elem((acc % n) as u32);
                }
            }
            return out;
        }
        for r in 0..d {
            for c in 0..d {
                let mut acc = ring.zero();
                for k in 0..d {
                    acc = ring.add(acc, ring.mul(self.data[r * d + k], other.data[k * d + c]));
                }
                out.data[r * d + c] = acc;
            }
        }
        out
    }

    pub fn add(&self, ring: &Ring, other: &Mat) -> Mat {
        Mat {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| ring.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, ring: &Ring, other: &Mat) -> Mat {
        Mat {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| ring.sub(a, b)).collect(),
        }
    }

    pub fn neg(&self, ring: &Ring) -> Mat {
        Mat { dim: self.dim, data: self.data.iter().map(|&a| ring.neg(a)).collect() }
    }

    pub fn scale(&self, ring: &Ring, a: Elem) -> Mat {
        Mat { dim: self.dim, data: self.data.iter().map(|&x| ring.mul(x, a)).collect() }
    }

    /// Entrywise image under a ring map.
    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> Mat {
        Mat { dim: self.dim, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn apply(&self, ring: &Ring, v: &Vector) -> Vector {
        let d = self.dim;
        Vector(
            (0..d)
                .map(|r| {
                    let mut acc = ring.zero();
                    for k in 0..d {
                        let a = self.data[r * d + k];
                        if a.0 != 0 {
                            acc = ring.add(acc, ring.mul(a, v.0[k]));
                        }
                    }
                    acc
                })
                .collect(),
        )
    }

    /// Invertibility over a product of `Z/n` components: a matrix over `Z/n`
    /// is invertible iff it is invertible modulo every prime dividing `n`,
    /// which Gaussian elimination over `F_p` decides.
    pub fn is_invertible(&self, ring: &Ring) -> bool {
        let residues: Vec<Vec<u64>> = self.data.iter().map(|&x| ring.residues(x)).collect();
        for (comp, &m) in ring.moduli().iter().enumerate() {
            for (p, _) in prime_factors(m) {
                let rows: Vec<Vec<u64>> = (0..self.dim)
                    .map(|r| (0..self.dim).map(|c| residues[r * self.dim + c][comp] % p).collect())
                    .collect();
                if rank_mod_p(rows, p) < self.dim {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self, ring: &Ring) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.dim)
                .map(|r| serde_json::Value::Array((0..self.dim).map(|c| ring.to_json(self.get(r, c))).collect()))
                .collect(),
        )
    }

    pub fn display<'a>(&'a self, ring: &'a Ring) -> MatDisplay<'a> {
        MatDisplay { m: self, ring }
    }
}

pub struct MatDisplay<'a> {
    m: &'a Mat,
    ring: &'a Ring,
}

impl fmt::Display for MatDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.m.dim {
            let row: Vec<String> = (0..self.m.dim).map(|c| self.ring.fmt_elem(self.m.get(r, c))).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Rank over `F_p`.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = crate::ring::mod_inverse(rows[rank][c], p).expect("nonzero mod p");
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c] * inv % p;
                for k in c..ncols {
                    rows[r][k] = (rows[r][k] + p * p - f * rows[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}
