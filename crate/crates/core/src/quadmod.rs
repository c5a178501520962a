//! The quadratic module `M = H^ℓ ⊥ M₀` over a finite ring.
//!
//! Basis order is fixed once: `e_{-ℓ}, …, e_{-1}, e_1, …, e_ℓ, f_1, …, f_r`.
//! The form on `M₀` is kept as an upper-triangular coefficient matrix, not a
//! Gram matrix, since over `Z/2` and `Z/4` the quadratic form carries more
//! information than its polar bilinear form.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{Elem, Ring};

/// Default cap for exhaustive vector enumeration.
pub const DEFAULT_ENUM_BOUND: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Vector(pub Vec<Elem>);

impl Vector {
    pub fn zero(dim: usize) -> Vector {
        Vector(vec![Elem(0); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.0 == 0)
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = Elem;
    fn index(&self, i: usize) -> &Elem {
        &self.0[i]
    }
}

/// Index of a basis vector: `E(i)` for `e_i` with `1 <= |i| <= ℓ`, `F(k)` for
/// `f_k` with `1 <= k <= r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisIndex {
    E(i32),
    F(usize),
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisIndex::E(i) => write!(f, "e{i}"),
            BasisIndex::F(k) => write!(f, "f{k}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadSpace {
    ring: Ring,
    ell: usize,
    r: usize,
    /// r×r, row-major, zero below the diagonal.
    q0: Vec<Elem>,
    /// Gram matrix of the polar form, dim×dim.
    gram: Vec<Elem>,
}

impl PartialEq for QuadSpace {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.ell == other.ell && self.r == other.r && self.q0 == other.q0
    }
}
impl Eq for QuadSpace {}

impl fmt::Display for QuadSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, ell={}, r={}", self.ring, self.ell, self.r)?;
        if self.r > 0 {
            let q: Vec<String> = self.q0_upper().iter().map(|&x| self.ring.fmt_elem(x)).collect();
            write!(f, ", q0=[{}]", q.join(","))?;
        }
        Ok(())
    }
}

impl QuadSpace {
    /// `q0_upper` lists the upper-triangular entries of the `M₀` form row by
    /// row: `q00, q01, …, q0(r-1), q11, …`.
    pub fn new(ring: Ring, ell: usize, r: usize, q0_upper: &[Elem]) -> Result<QuadSpace> {
        if ell < 1 {
            return Err(Error::InvalidSpace("ell must be >= 1".into()));
        }
        if q0_upper.len() != r * (r + 1) / 2 {
            return Err(Error::InvalidSpace(format!(
                "q0 needs {} upper-triangular entries for r={r}, got {}",
                r * (r + 1) / 2,
                q0_upper.len()
            )));
        }
        let mut q0 = vec![Elem(0); r * r];
        let mut it = q0_upper.iter();
        for k in 0..r {
            for l in k..r {
                q0[k * r + l] = *it.next().unwrap();
            }
        }
        let dim = 2 * ell + r;
        let mut gram = vec![Elem(0); dim * dim];
        for i in 0..ell {
            // e_{-(i+1)} sits at ell-1-i, e_{i+1} at ell+i
            let (a, b) = (ell - 1 - i, ell + i);
            gram[a * dim + b] = ring.one();
            gram[b * dim + a] = ring.one();
        }
        for k in 0..r {
            for l in 0..r {
                let v = ring.add(q0[k * r + l], q0[l * r + k]);
                gram[(2 * ell + k) * dim + 2 * ell + l] = v;
            }
        }
        Ok(QuadSpace { ring, ell, r, q0, gram })
    }

    /// Space with integer-valued `q0` entries.
    pub fn with_ints(ring: Ring, ell: usize, r: usize, q0_upper: &[i64]) -> Result<QuadSpace> {
        let q: Vec<Elem> = q0_upper.iter().map(|&v| ring.from_i64(v)).collect();
        QuadSpace::new(ring, ell, r, &q)
    }

    /// Split space `H^ℓ` over `Z/n`.
    pub fn split(n: u64, ell: usize) -> Result<QuadSpace> {
        QuadSpace::new(Ring::zn(n)?, ell, 0, &[])
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        2 * self.ell + self.r
    }

    pub fn q0_upper(&self) -> Vec<Elem> {
        let mut out = Vec::new();
        for k in 0..self.r {
            for l in k..self.r {
                out.push(self.q0[k * self.r + l]);
            }
        }
        out
    }

    pub fn gram(&self) -> &[Elem] {
        &self.gram
    }

    /// Hyperbolic indices `-ℓ..=-1, 1..=ℓ` in basis order.
    pub fn hyp_indices(&self) -> Vec<i32> {
        let l = self.ell as i32;
        (-l..=l).filter(|&i| i != 0).collect()
    }

    /// Coordinate position of `e_i`.
    #[inline]
    pub fn pos(&self, i: i32) -> usize {
        debug_assert!(i != 0 && i.unsigned_abs() as usize <= self.ell);
        if i < 0 {
            (self.ell as i32 + i) as usize
        } else {
            self.ell + i as usize - 1
        }
    }

    pub fn check_index(&self, i: i32) -> Result<()> {
        if i == 0 || i.unsigned_abs() as usize > self.ell {
            return Err(Error::BasisIndex(format!("e{i} with ell={}", self.ell)));
        }
        Ok(())
    }

    pub fn basis(&self, idx: BasisIndex) -> Result<Vector> {
        let p = match idx {
            BasisIndex::E(i) => {
                self.check_index(i)?;
                self.pos(i)
            }
            BasisIndex::F(k) if k >= 1 && k <= self.r => 2 * self.ell + k - 1,
            BasisIndex::F(_) => return Err(Error::BasisIndex(format!("{idx} with r={}", self.r))),
        };
        let mut v = Vector::zero(self.dim());
        v.0[p] = self.ring.one();
        Ok(v)
    }

    /// `e_i`; panics on a bad index.
    pub fn e(&self, i: i32) -> Vector {
        self.basis(BasisIndex::E(i)).expect("hyperbolic index in range")
    }

    pub fn zero(&self) -> Vector {
        Vector::zero(self.dim())
    }

    pub fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: v.dim() });
        }
        Ok(())
    }

    /// Vector from integer coordinates in basis order.
    pub fn vector(&self, coords: &[i64]) -> Result<Vector> {
        if coords.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: coords.len() });
        }
        Ok(Vector(coords.iter().map(|&c| self.ring.from_i64(c)).collect()))
    }

    /// Embeds `m₀ ∈ M₀` (length `r`) into `M`.
    pub fn embed_m0(&self, m0: &[Elem]) -> Vector {
        let mut v = self.zero();
        v.0[2 * self.ell..].copy_from_slice(m0);
        v
    }

    /// The `M₀` component of `v`.
    pub fn m0_part<'a>(&self, v: &'a Vector) -> &'a [Elem] {
        &v.0[2 * self.ell..]
    }

    pub fn coord(&self, v: &Vector, i: i32) -> Elem {
        v.0[self.pos(i)]
    }

    pub fn add(&self, v: &Vector, w: &Vector) -> Vector {
        Vector(v.0.iter().zip(&w.0).map(|(&a, &b)| self.ring.add(a, b)).collect())
    }

    pub fn sub(&self, v: &Vector, w: &Vector) -> Vector {
        Vector(v.0.iter().zip(&w.0).map(|(&a, &b)| self.ring.sub(a, b)).collect())
    }

    pub fn neg(&self, v: &Vector) -> Vector {
        Vector(v.0.iter().map(|&a| self.ring.neg(a)).collect())
    }

    /// `v·a`.
    pub fn scale(&self, v: &Vector, a: Elem) -> Vector {
        Vector(v.0.iter().map(|&x| self.ring.mul(x, a)).collect())
    }

    /// `v + w·a`.
    pub fn axpy(&self, v: &Vector, w: &Vector, a: Elem) -> Vector {
        Vector(v.0.iter().zip(&w.0).map(|(&x, &y)| self.ring.add(x, self.ring.mul(y, a))).collect())
    }

    /// `q(v) = Σ v_{-i} v_i + Σ_{k<=l} q0[k][l] v_{f_k} v_{f_l}`.
    pub fn q_form(&self, v: &Vector) -> Elem {
        let r = &self.ring;
        let mut acc = r.zero();
        for i in 0..self.ell {
            acc = r.add(acc, r.mul(v.0[self.ell - 1 - i], v.0[self.ell + i]));
        }
        self.q0_form_acc(&v.0[2 * self.ell..], acc)
    }

    /// `q` restricted to `M₀`, on a length-`r` coordinate list.
    pub fn q0_form(&self, m0: &[Elem]) -> Elem {
        self.q0_form_acc(m0, self.ring.zero())
    }

    fn q0_form_acc(&self, m0: &[Elem], mut acc: Elem) -> Elem {
        let r = &self.ring;
        for k in 0..self.r {
            for l in k..self.r {
                let c = self.q0[k * self.r + l];
                if c.0 != 0 {
                    acc = r.add(acc, r.mul(c, r.mul(m0[k], m0[l])));
                }
            }
        }
        acc
    }

    /// Polar form `⟨v, w⟩ = q(v + w) − q(v) − q(w)`, evaluated through the
    /// Gram matrix.
    pub fn bilinear(&self, v: &Vector, w: &Vector) -> Result<Elem> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        Ok(self.bil(v, w))
    }

    /// Unchecked [`QuadSpace::bilinear`].
    #[inline]
    pub fn bil(&self, v: &Vector, w: &Vector) -> Elem {
        self.bil_slices(&v.0, &w.0)
    }

    pub(crate) fn bil_slices(&self, v: &[Elem], w: &[Elem]) -> Elem {
        let r = &self.ring;
        let mut acc = r.zero();
        for i in 0..self.ell {
            let (a, b) = (self.ell - 1 - i, self.ell + i);
            acc = r.add(acc, r.add(r.mul(v[a], w[b]), r.mul(v[b], w[a])));
        }
        let d = self.dim();
        let base = 2 * self.ell;
        for k in 0..self.r {
            if v[base + k].0 == 0 {
                continue;
            }
            for l in 0..self.r {
                let g = self.gram[(base + k) * d + base + l];
                if g.0 != 0 {
                    acc = r.add(acc, r.mul(r.mul(v[base + k], g), w[base + l]));
                }
            }
        }
        acc
    }

    /// Polar form on `M₀` coordinates.
    pub fn bil_m0(&self, m: &[Elem], m2: &[Elem]) -> Elem {
        self.bil(&self.embed_m0(m), &self.embed_m0(m2))
    }

    pub fn vector_count(&self) -> u128 {
        (self.ring.size() as u128).pow(self.dim() as u32)
    }

    /// Every vector exactly once, in mixed-radix order with the last
    /// coordinate varying fastest.
    pub fn enumerate_vectors(&self) -> Result<VectorIter> {
        self.enumerate_vectors_bounded(DEFAULT_ENUM_BOUND)
    }

    pub fn enumerate_vectors_bounded(&self, bound: u128) -> Result<VectorIter> {
        let count = self.vector_count();
        if count > bound {
            return Err(Error::EnumerationBound { count, bound });
        }
        Ok(VectorIter { base: self.ring.size() as u32, next: Some(self.zero()) })
    }

    /// Elements of `M₀`, same ordering convention.
    pub fn enumerate_m0(&self) -> VectorIter {
        VectorIter { base: self.ring.size() as u32, next: Some(Vector::zero(self.r)) }
    }

    /// Does `v` belong to some hyperbolic pair? Decided by exhaustive search
    /// for an isotropic `w` with `⟨v, w⟩ = 1`.
    pub fn is_hyperbolic_member(&self, v: &Vector) -> Result<bool> {
        self.check_dim(v)?;
        let iter = self.enumerate_vectors()?;
        if self.q_form(v).0 != 0 {
            return Ok(false);
        }
        let one = self.ring.one();
        for w in iter {
            if self.bil(v, &w) == one && self.q_form(&w).0 == 0 {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// All hyperbolic-pair members, by the same exhaustive criterion but
    /// sharing one isotropic-vector list.
    pub fn hyperbolic_members(&self) -> Result<Vec<Vector>> {
        let isotropic: Vec<Vector> = self.enumerate_vectors()?.filter(|v| self.q_form(v).0 == 0).collect();
        let one = self.ring.one();
        Ok(isotropic
            .iter()
            .filter(|v| isotropic.iter().any(|w| self.bil(v, w) == one))
            .cloned()
            .collect())
    }

    pub fn vector_json(&self, v: &Vector) -> serde_json::Value {
        serde_json::Value::Array(v.0.iter().map(|&x| self.ring.to_json(x)).collect())
    }

    pub fn fmt_vector(&self, v: &Vector) -> String {
        let parts: Vec<String> = v.0.iter().map(|&x| self.ring.fmt_elem(x)).collect();
        format!("[{}]", parts.join(","))
    }
}

/// Lexicographic walk over all coordinate tuples.
#[derive(Clone, Debug)]
pub struct VectorIter {
    base: u32,
    next: Option<Vector>,
}

impl Iterator for VectorIter {
    type Item = Vector;

    fn next(&mut self) -> Option<Vector> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut carry = true;
        for c in succ.0.iter_mut().rev() {
            c.0 += 1;
            if c.0 == self.base {
                c.0 = 0;
            } else {
                carry = false;
                break;
            }
        }
        if !carry {
            self.next = Some(succ);
        }
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vector(s: &QuadSpace, rng: &mut ChaCha8Rng) -> Vector {
        let n = s.ring().size() as u32;
        Vector((0..s.dim()).map(|_| Elem(rng.gen_range(0..n))).collect())
    }

    #[test]
    fn basis_positions() {
        let s = QuadSpace::split(5, 3).unwrap();
        assert_eq!(s.e(1), s.vector(&[0, 0, 0, 1, 0, 0]).unwrap());
        assert_eq!(s.e(-3), s.vector(&[1, 0, 0, 0, 0, 0]).unwrap());
        assert_eq!(s.e(-1), s.vector(&[0, 0, 1, 0, 0, 0]).unwrap());
        let s1 = QuadSpace::with_ints(Ring::zn(5).unwrap(), 3, 1, &[2]).unwrap();
        assert_eq!(s1.basis(BasisIndex::F(1)).unwrap().0[6], Elem(1));
        assert!(s1.basis(BasisIndex::F(2)).is_err());
        assert!(s1.basis(BasisIndex::E(4)).is_err());
        assert!(s1.basis(BasisIndex::E(0)).is_err());
    }

    #[test]
    fn q_form_examples() {
        let s = QuadSpace::with_ints(Ring::zn(5).unwrap(), 3, 1, &[2]).unwrap();
        assert_eq!(s.q_form(&s.e(1)), Elem(0));
        assert_eq!(s.q_form(&s.add(&s.e(-1), &s.e(1))), Elem(1));
        let f2 = s.scale(&s.basis(BasisIndex::F(1)).unwrap(), Elem(2));
        assert_eq!(s.q_form(&f2), Elem(3));
    }

    #[test]
    fn bilinear_examples() {
        let s = QuadSpace::split(9, 3).unwrap();
        assert_eq!(s.bilinear(&s.e(-1), &s.e(1)).unwrap(), Elem(1));
        assert_eq!(s.bilinear(&s.e(1), &s.e(2)).unwrap(), Elem(0));
        assert!(s.bilinear(&s.e(1), &Vector::zero(3)).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let two = s.ring().from_i64(2);
        for _ in 0..20 {
            let v = random_vector(&s, &mut rng);
            assert_eq!(s.bil(&v, &v), s.ring().mul(two, s.q_form(&v)));
        }
    }

    fn check_polarisation(s: &QuadSpace, vs: &[Vector], ws: &[Vector]) {
        let r = s.ring();
        for v in vs {
            for w in ws {
                let expect = r.sub(r.sub(s.q_form(&s.add(v, w)), s.q_form(v)), s.q_form(w));
                assert_eq!(s.bil(v, w), expect, "{s}: {v:?} {w:?}");
            }
            for a in r.elements() {
                assert_eq!(s.q_form(&s.scale(v, a)), r.mul(s.q_form(v), r.mul(a, a)));
            }
        }
    }

    #[test]
    fn polarisation_exhaustive_small() {
        for s in [
            QuadSpace::split(2, 3).unwrap(),
            QuadSpace::split(3, 3).unwrap(),
            QuadSpace::with_ints(Ring::zn(3).unwrap(), 2, 2, &[1, 1, 2]).unwrap(),
            QuadSpace::with_ints(Ring::zn(4).unwrap(), 1, 2, &[1, 3, 2]).unwrap(),
        ] {
            assert!(s.vector_count() <= 729);
            let all: Vec<Vector> = s.enumerate_vectors().unwrap().collect();
            check_polarisation(&s, &all, &all);
        }
    }

    #[test]
    fn polarisation_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in [
            QuadSpace::with_ints(Ring::zn(4).unwrap(), 3, 1, &[1]).unwrap(),
            QuadSpace::with_ints(Ring::zn(9).unwrap(), 3, 2, &[1, 4, 7]).unwrap(),
            QuadSpace::with_ints(Ring::parse("Z/2 x Z/3").unwrap(), 3, 1, &[1]).unwrap(),
        ] {
            let vs: Vec<Vector> = (0..100).map(|_| random_vector(&s, &mut rng)).collect();
            let ws: Vec<Vector> = (0..100).map(|_| random_vector(&s, &mut rng)).collect();
            check_polarisation(&s, &vs, &ws);
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(QuadSpace::split(2, 1).unwrap().enumerate_vectors().unwrap().count(), 4);
        let s = QuadSpace::with_ints(Ring::zn(3).unwrap(), 1, 1, &[1]).unwrap();
        let all: Vec<Vector> = s.enumerate_vectors().unwrap().collect();
        assert_eq!(all.len(), 27);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, all);
        assert_eq!(QuadSpace::split(2, 3).unwrap().enumerate_vectors().unwrap().count(), 64);
        let big = QuadSpace::split(9, 5).unwrap();
        assert!(matches!(big.enumerate_vectors(), Err(Error::EnumerationBound { .. })));
    }

    #[test]
    fn hyperbolic_members_f2() {
        let s = QuadSpace::split(2, 3).unwrap();
        assert!(s.is_hyperbolic_member(&s.e(1)).unwrap());
        assert!(!s.is_hyperbolic_member(&s.zero()).unwrap());
        let brute = s
            .enumerate_vectors()
            .unwrap()
            .filter(|v| s.is_hyperbolic_member(v).unwrap())
            .count();
        assert_eq!(brute, 35);
        assert_eq!(s.hyperbolic_members().unwrap().len(), 35);
    }
}
