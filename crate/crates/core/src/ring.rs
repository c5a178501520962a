//! Finite commutative rings `Z/n` and finite products of them.
//!
//! Elements are stored as a single mixed-radix code ([`Elem`]) so that
//! vectors and matrices stay compact; a [`Ring`] handle interprets the codes.
//! Codes are always canonical, so structural equality is ring equality.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ring the crate will build.
pub const MAX_RING_SIZE: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingSpec {
    Modular(u64),
    Product(Vec<RingSpec>),
}

impl RingSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            RingSpec::Modular(n) if *n < 2 => Err(Error::InvalidRing(format!("Z/{n}: need n >= 2"))),
            RingSpec::Modular(_) => Ok(()),
            RingSpec::Product(parts) if parts.is_empty() => {
                Err(Error::InvalidRing("empty product".into()))
            }
            RingSpec::Product(parts) => parts.iter().try_for_each(RingSpec::validate),
        }
    }

    /// Component moduli of the flattened product.
    pub fn moduli(&self) -> Vec<u64> {
        match self {
            RingSpec::Modular(n) => vec![*n],
            RingSpec::Product(parts) => parts.iter().flat_map(RingSpec::moduli).collect(),
        }
    }

    pub fn size(&self) -> u128 {
        self.moduli().iter().map(|&m| m as u128).product()
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Modular(n) => write!(f, "Z/{n}"),
            RingSpec::Product(parts) => {
                for (k, p) in parts.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" x ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    /// `Z/<n>` factors joined by ` x `.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::RingParse(s.to_string());
        let mut parts = Vec::new();
        for factor in s.trim().split(" x ") {
            let n = factor
                .trim()
                .strip_prefix("Z/")
                .ok_or_else(bad)?
                .parse::<u64>()
                .map_err(|_| bad())?;
            parts.push(RingSpec::Modular(n));
        }
        let spec = if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            RingSpec::Product(parts)
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Canonical element code, meaningful only together with its [`Ring`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elem(pub u32);

#[derive(Debug)]
struct RingInner {
    spec: RingSpec,
    moduli: Vec<u64>,
    strides: Vec<u64>,
    size: u64,
    one: Elem,
}

/// Shared handle to a finite commutative ring.
#[derive(Clone, Debug)]
pub struct Ring(Arc<RingInner>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Ring {}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.spec.fmt(f)
    }
}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Ring> {
        spec.validate()?;
        let size = spec.size();
        if size > MAX_RING_SIZE as u128 {
            return Err(Error::InvalidRing(format!("{spec} has {size} elements")));
        }
        let moduli = spec.moduli();
        let mut strides = Vec::with_capacity(moduli.len());
        let mut acc = 1u64;
        for &m in &moduli {
            strides.push(acc);
            acc *= m;
        }
        let one = Elem(strides.iter().sum::<u64>() as u32);
        Ok(Ring(Arc::new(RingInner { spec, moduli, strides, size: acc, one })))
    }

    pub fn zn(n: u64) -> Result<Ring> {
        Ring::new(RingSpec::Modular(n))
    }

    pub fn parse(s: &str) -> Result<Ring> {
        Ring::new(s.parse()?)
    }

    pub fn spec(&self) -> &RingSpec {
        &self.0.spec
    }

    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub fn moduli(&self) -> &[u64] {
        &self.0.moduli
    }

    /// `Some(n)` when the ring is a single `Z/n`.
    pub fn modulus(&self) -> Option<u64> {
        match self.0.moduli.as_slice() {
            [n] => Some(*n),
            _ => None,
        }
    }

    pub fn zero(&self) -> Elem {
        Elem(0)
    }

    pub fn one(&self) -> Elem {
        self.0.one
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.0.size as u32).map(Elem)
    }

    pub fn residues(&self, x: Elem) -> Vec<u64> {
        let c = x.0 as u64;
        self.0
            .moduli
            .iter()
            .zip(&self.0.strides)
            .map(|(&m, &s)| (c / s) % m)
            .collect()
    }

    pub fn from_residues(&self, rs: &[u64]) -> Elem {
        let code: u64 = rs
            .iter()
            .zip(&self.0.moduli)
            .zip(&self.0.strides)
            .map(|((&r, &m), &s)| (r % m) * s)
            .sum();
        Elem(code as u32)
    }

    /// Image of an integer (the same integer in every component).
    pub fn from_i64(&self, v: i64) -> Elem {
        if let Some(n) = self.modulus() {
            return Elem(v.rem_euclid(n as i64) as u32);
        }
        let rs: Vec<u64> = self.0.moduli.iter().map(|&m| v.rem_euclid(m as i64) as u64).collect();
        self.from_residues(&rs)
    }

    #[inline]
    fn zip_with(&self, x: Elem, y: Elem, f: impl Fn(u64, u64, u64) -> u64) -> Elem {
        let (a, b) = (x.0 as u64, y.0 as u64);
        let mut code = 0;
        for (&m, &s) in self.0.moduli.iter().zip(&self.0.strides) {
            code += f((a / s) % m, (b / s) % m, m) * s;
        }
        Elem(code as u32)
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        if let [n] = self.0.moduli[..] {
            let s = x.0 as u64 + y.0 as u64;
            return Elem(if s >= n { s - n } else { s } as u32);
        }
        self.zip_with(x, y, |a, b, m| (a + b) % m)
    }

    #[inline]
    pub fn neg(&self, x: Elem) -> Elem {
        if let [n] = self.0.moduli[..] {
            return Elem(if x.0 == 0 { 0 } else { (n - x.0 as u64) as u32 });
        }
        self.zip_with(x, x, |a, _, m| (m - a) % m)
    }

    #[inline]
    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        if let [n] = self.0.moduli[..] {
            return Elem(((x.0 as u64 * y.0 as u64) % n) as u32);
        }
        self.zip_with(x, y, |a, b, m| (a * b) % m)
    }

    pub fn pow(&self, x: Elem, e: u32) -> Elem {
        (0..e).fold(self.one(), |acc, _| self.mul(acc, x))
    }

    pub fn is_zero(&self, x: Elem) -> bool {
        x.0 == 0
    }

    /// Multiplicative inverse, found componentwise with the extended gcd.
    pub fn inv(&self, x: Elem) -> Option<Elem> {
        let mut out = Vec::with_capacity(self.0.moduli.len());
        for (r, &m) in self.residues(x).into_iter().zip(&self.0.moduli) {
            out.push(mod_inverse(r, m)?);
        }
        Some(self.from_residues(&out))
    }

    pub fn is_unit(&self, x: Elem) -> bool {
        self.inv(x).is_some()
    }

    pub fn units(&self) -> Vec<Elem> {
        self.elements().filter(|&x| self.is_unit(x)).collect()
    }

    /// Generators of the additive group: one per component.
    pub fn additive_generators(&self) -> Vec<Elem> {
        self.0.strides.iter().map(|&s| Elem(s as u32)).collect()
    }

    /// Prime-power modulus check; only defined for a single `Z/n`.
    pub fn is_local(&self) -> Result<bool> {
        let n = self.modulus().ok_or_else(|| Error::NotModular(self.to_string()))?;
        Ok(prime_factors(n).len() == 1)
    }

    pub fn fmt_elem(&self, x: Elem) -> String {
        let rs = self.residues(x);
        if rs.len() == 1 {
            rs[0].to_string()
        } else {
            let inner: Vec<String> = rs.iter().map(u64::to_string).collect();
            format!("({})", inner.join(","))
        }
    }

    /// Residues as signed integers, for JSON output.
    pub fn to_json(&self, x: Elem) -> serde_json::Value {
        let rs = self.residues(x);
        if rs.len() == 1 {
            rs[0].into()
        } else {
            rs.into()
        }
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// `(p, v)` pairs of the prime factorisation, in increasing order of `p`.
pub fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut v = 0;
            while n.is_multiple_of(p) {
                n /= p;
                v += 1;
            }
            out.push((p, v));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// An element bundled with its ring, for checked arithmetic across rings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElem {
    pub ring: Ring,
    pub value: Elem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

impl RingElem {
    pub fn new(ring: &Ring, value: i64) -> RingElem {
        RingElem { ring: ring.clone(), value: ring.from_i64(value) }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ring.fmt_elem(self.value))
    }
}

/// Checked binary arithmetic; `Neg` ignores `y` apart from the ring check.
pub fn arith(op: ArithOp, x: &RingElem, y: &RingElem) -> Result<RingElem> {
    if x.ring != y.ring {
        return Err(Error::RingMismatch(x.ring.to_string(), y.ring.to_string()));
    }
    let r = &x.ring;
    let value = match op {
        ArithOp::Add => r.add(x.value, y.value),
        ArithOp::Sub => r.sub(x.value, y.value),
        ArithOp::Mul => r.mul(x.value, y.value),
        ArithOp::Neg => r.neg(x.value),
    };
    Ok(RingElem { ring: r.clone(), value })
}

/// Surjection `Z/n -> Z/p^v` onto the localisation at a prime.
#[derive(Clone, Debug)]
pub struct RingMap {
    pub source: Ring,
    pub target: Ring,
}

impl RingMap {
    pub fn apply(&self, x: Elem) -> Elem {
        let t = self.target.modulus().expect("localisation target is Z/p^v");
        Elem((x.0 as u64 % t) as u32)
    }
}

/// Localisation of `Z/n` at the prime `p`: `Z/p^v` with `v` the `p`-adic
/// valuation of `n`, together with the reduction map.
pub fn localize_at_prime(n: u64, p: u64) -> Result<(Ring, RingMap)> {
    if prime_factors(p) != vec![(p, 1)] {
        return Err(Error::InvalidRing(format!("{p} is not prime")));
    }
    if n < 2 || !n.is_multiple_of(p) {
        return Err(Error::NotADivisor(p, n));
    }
    let mut pv = 1;
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
        pv *= p;
    }
    let source = Ring::zn(n)?;
    let target = Ring::zn(pv)?;
    Ok((target.clone(), RingMap { source, target }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("Z/12".parse::<RingSpec>().unwrap(), RingSpec::Modular(12));
        let p: RingSpec = "Z/2 x Z/3".parse().unwrap();
        assert_eq!(p, RingSpec::Product(vec![RingSpec::Modular(2), RingSpec::Modular(3)]));
        assert_eq!(p.to_string(), "Z/2 x Z/3");
        assert!("Z/1".parse::<RingSpec>().is_err());
        assert!("Z12".parse::<RingSpec>().is_err());
        assert!("Z/2 x".parse::<RingSpec>().is_err());
    }

    #[test]
    fn arith_examples() {
        let z6 = Ring::zn(6).unwrap();
        let r = arith(ArithOp::Add, &RingElem::new(&z6, 4), &RingElem::new(&z6, 5)).unwrap();
        assert_eq!(r.value, Elem(3));
        for x in z6.elements() {
            assert_eq!(z6.mul(z6.one(), x), x);
        }
        let p = Ring::parse("Z/2 x Z/3").unwrap();
        let x = p.from_residues(&[1, 2]);
        assert_eq!(p.residues(p.mul(x, x)), vec![1, 1]);
        let z7 = Ring::zn(7).unwrap();
        let e = arith(ArithOp::Add, &RingElem::new(&z6, 1), &RingElem::new(&z7, 1));
        assert!(matches!(e, Err(Error::RingMismatch(..))));
    }

    #[test]
    fn units_match_gcd_oracle() {
        for n in [4u64, 5, 6, 8, 9, 12, 27] {
            let r = Ring::zn(n).unwrap();
            let brute: Vec<Elem> = r
                .elements()
                .filter(|&x| r.elements().any(|y| r.mul(x, y) == r.one()))
                .collect();
            assert_eq!(r.units(), brute);
            let by_gcd: Vec<Elem> = (0..n).filter(|&a| gcd(a, n) == 1).map(|a| Elem(a as u32)).collect();
            assert_eq!(r.units(), by_gcd);
        }
        let z4 = Ring::zn(4).unwrap();
        assert_eq!(z4.units(), vec![Elem(1), Elem(3)]);
        assert_eq!(Ring::zn(5).unwrap().units().len(), 4);
        assert_eq!(Ring::zn(6).unwrap().units(), vec![Elem(1), Elem(5)]);
    }

    #[test]
    fn localisation_examples() {
        let (t, m) = localize_at_prime(12, 2).unwrap();
        assert_eq!(t.modulus(), Some(4));
        // CRT oracle: Z/12 = Z/4 x Z/3, the 2-part is the residue mod 4.
        for a in 0..12u32 {
            assert_eq!(m.apply(Elem(a)), Elem(a % 4));
        }
        let (t, _) = localize_at_prime(12, 3).unwrap();
        assert_eq!(t.modulus(), Some(3));
        let (t, m) = localize_at_prime(4, 2).unwrap();
        assert_eq!(t.modulus(), Some(4));
        assert!((0..4).all(|a| m.apply(Elem(a)) == Elem(a)));
        assert!(matches!(localize_at_prime(12, 5), Err(Error::NotADivisor(5, 12))));
    }

    #[test]
    fn localisation_inverts_complement_of_prime() {
        for (n, p) in [(12u64, 2u64), (12, 3), (36, 2), (36, 3)] {
            let (t, m) = localize_at_prime(n, p).unwrap();
            for s in 0..n {
                if s % p != 0 {
                    assert!(t.is_unit(m.apply(Elem(s as u32))), "{s} in Z/{n} at {p}");
                }
            }
        }
    }

    #[test]
    fn is_local_examples() {
        assert!(Ring::zn(4).unwrap().is_local().unwrap());
        assert!(!Ring::zn(6).unwrap().is_local().unwrap());
        assert!(Ring::zn(7).unwrap().is_local().unwrap());
        assert!(Ring::parse("Z/2 x Z/2").unwrap().is_local().is_err());
    }

    #[test]
    fn ring_axioms_exhaustive() {
        for spec in ["Z/2", "Z/4", "Z/6", "Z/8", "Z/9", "Z/2 x Z/3", "Z/2 x Z/2 x Z/4", "Z/4 x Z/4"] {
            let r = Ring::parse(spec).unwrap();
            assert!(r.size() <= 64);
            let els: Vec<Elem> = r.elements().collect();
            for &a in &els {
                assert_eq!(r.add(a, r.zero()), a);
                assert_eq!(r.add(a, r.neg(a)), r.zero());
                for &b in &els {
                    assert_eq!(r.add(a, b), r.add(b, a));
                    assert_eq!(r.mul(a, b), r.mul(b, a));
                    for &c in &els {
                        assert_eq!(r.add(r.add(a, b), c), r.add(a, r.add(b, c)));
                        assert_eq!(r.mul(r.mul(a, b), c), r.mul(a, r.mul(b, c)));
                        assert_eq!(r.mul(a, r.add(b, c)), r.add(r.mul(a, b), r.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn from_i64_wraps() {
        let r = Ring::zn(9).unwrap();
        assert_eq!(r.from_i64(-1), Elem(8));
        let p = Ring::parse("Z/2 x Z/3").unwrap();
        assert_eq!(p.residues(p.from_i64(-1)), vec![1, 2]);
        assert_eq!(p.one(), p.from_i64(1));
    }
}
