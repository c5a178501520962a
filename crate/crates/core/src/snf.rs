//! Integer Smith normal form: abelianization of finite presentations and
//! linear systems modulo `N`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

type Row = Vec<(usize, i128)>;

fn ck(x: Option<i128>) -> Result<i128> {
    x.ok_or(Error::IntegerOverflow("integer matrix reduction"))
}

/// `U·A·V = diag(d_1, …, d_k, 0, …)` with `d_i | d_{i+1}`, `d_i > 0`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub diag: Vec<i128>,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
}

/// Smith normal form of an `m × n` matrix; `U` and `V` are tracked when
/// `transforms` is set (otherwise left empty).
pub fn smith(mut a: Vec<Vec<i128>>, ncols: usize, transforms: bool) -> Result<Snf> {
    let m = a.len();
    let n = ncols;
    let ident = |k: usize| -> Vec<Vec<i128>> {
        (0..k).map(|i| (0..k).map(|j| i128::from(i == j)).collect()).collect()
    };
    let mut u = if transforms { ident(m) } else { Vec::new() };
    let mut v = if transforms { ident(n) } else { Vec::new() };
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize, i128)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && best.is_none_or(|(_, _, b)| x.abs() < b) {
                        best = Some((i, j, x.abs()));
                    }
                }
            }
            let Some((pi, pj, _)) = best else {
                return Ok(Snf { diag, u, v });
            };
            a.swap(t, pi);
            if transforms {
                u.swap(t, pi);
            }
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            if transforms {
                for row in v.iter_mut() {
                    row.swap(t, pj);
                }
            }
            let p = a[t][t];
            let mut clean = true;
            for i in (t + 1)..m {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..n {
                        a[i][j] = ck(a[i][j].checked_sub(ck(q.checked_mul(a[t][j]))?))?;
                    }
                    if transforms {
                        for j in 0..m {
                            u[i][j] = ck(u[i][j].checked_sub(ck(q.checked_mul(u[t][j]))?))?;
                        }
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in (t + 1)..n {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] = ck(row[j].checked_sub(ck(q.checked_mul(row[t]))?))?;
                    }
                    if transforms {
                        for row in v.iter_mut() {
                            row[j] = ck(row[j].checked_sub(ck(q.checked_mul(row[t]))?))?;
                        }
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t
            let bad = ((t + 1)..m).find(|&i| ((t + 1)..n).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in t..n {
                        a[t][j] = ck(a[t][j].checked_add(a[i][j]))?;
                    }
                    if transforms {
                        for j in 0..m {
                            u[t][j] = ck(u[t][j].checked_add(u[i][j]))?;
                        }
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            if transforms {
                for x in u[t].iter_mut() {
                    *x = -*x;
                }
            }
        }
        diag.push(a[t][t]);
    }
    Ok(Snf { diag, u, v })
}

/// Abelian invariants of a finitely presented group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Abelianization {
    pub ngens: usize,
    pub rank: usize,
    /// Elementary divisors different from 1.
    pub torsion: Vec<u128>,
}

impl Abelianization {
    pub fn free_rank(&self) -> usize {
        self.ngens - self.rank
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == self.ngens && self.torsion.is_empty()
    }

    /// Cyclic factor orders, `0` for each free factor.
    pub fn invariants(&self) -> Vec<u128> {
        let mut v = self.torsion.clone();
        v.extend(std::iter::repeat_n(0, self.free_rank()));
        v
    }
}

/// `x + c·y` for sparse rows sorted by column.
fn add_multiple(x: &Row, c: i128, y: &Row) -> Result<Row> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let (col, val) = match (x.get(i), y.get(j)) {
            (Some(&(cx, vx)), Some(&(cy, vy))) if cx == cy => {
                i += 1;
                j += 1;
                (cx, ck(vx.checked_add(ck(c.checked_mul(vy))?))?)
            }
            (Some(&(cx, vx)), Some(&(cy, _))) if cx < cy => {
                i += 1;
                (cx, vx)
            }
            (Some(&(cx, vx)), None) => {
                i += 1;
                (cx, vx)
            }
            (_, Some(&(cy, vy))) => {
                j += 1;
                (cy, ck(c.checked_mul(vy))?)
            }
            (None, None) => unreachable!(),
        };
        if val != 0 {
            out.push((col, val));
        }
    }
    Ok(out)
}

/// Exponent-sum matrix of the relators, reduced to Smith form. Entries
/// equal to ±1 are pivoted away first (each eliminates one generator); the
/// remaining block goes through a dense reduction.
pub fn abelianization(ngens: usize, relators: &[Vec<u32>]) -> Result<Abelianization> {
    let mut rows: Vec<Row> = Vec::new();
    for r in relators {
        let mut sums: BTreeMap<usize, i128> = BTreeMap::new();
        for &x in r {
            *sums.entry(x as usize / 2).or_default() += if x % 2 == 0 { 1 } else { -1 };
        }
        let row: Row = sums.into_iter().filter(|&(_, v)| v != 0).collect();
        if !row.is_empty() {
            rows.push(row);
        }
    }
    let mut pivots = 0usize;
    loop {
        // shortest row holding a unit entry
        let pick = rows
            .iter()
            .enumerate()
            .filter_map(|(k, r)| r.iter().find(|e| e.1.abs() == 1).map(|&(c, v)| (r.len(), k, c, v)))
            .min();
        let Some((_, k, col, v)) = pick else { break };
        let piv = rows.swap_remove(k);
        pivots += 1;
        let mut next = Vec::with_capacity(rows.len());
        for r in rows {
            let row = match r.binary_search_by_key(&col, |e| e.0) {
                // v = ±1, so -x/v = -x·v
                Ok(pos) => add_multiple(&r, ck(r[pos].1.checked_mul(-v))?, &piv)?,
                Err(_) => r,
            };
            if !row.is_empty() {
                next.push(row);
            }
        }
        rows = next;
    }
    if rows.is_empty() {
        return Ok(Abelianization { ngens, rank: pivots, torsion: Vec::new() });
    }
    let mut cols: Vec<usize> = rows.iter().flat_map(|r| r.iter().map(|e| e.0)).collect();
    cols.sort_unstable();
    cols.dedup();
    let dense: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![0i128; cols.len()];
            for &(c, x) in r {
                v[cols.binary_search(&c).expect("column present")] = x;
            }
            v
        })
        .collect();
    let snf = smith(dense, cols.len(), false)?;
    let torsion = snf.diag.iter().filter(|&&d| d != 1).map(|&d| d as u128).collect();
    Ok(Abelianization { ngens, rank: pivots + snf.diag.len(), torsion })
}

/// Solutions of `A·x ≡ b (mod N)`: a particular solution plus generators
/// of the solution module of the homogeneous system with their orders.
#[derive(Clone, Debug)]
pub struct ModSolution {
    pub modulus: u64,
    pub particular: Vec<u64>,
    /// `(generator, additive order)`; the solution set is
    /// `particular + Σ k_i·gen_i` with `0 ≤ k_i < order_i`.
    pub generators: Vec<(Vec<u64>, u64)>,
}

impl ModSolution {
    pub fn count(&self) -> u128 {
        self.generators.iter().map(|&(_, o)| o as u128).product()
    }

    /// Every solution, in mixed-radix order of the coefficients.
    pub fn enumerate(&self, bound: u128) -> Result<Vec<Vec<u64>>> {
        let count = self.count();
        if count > bound {
            return Err(Error::EnumerationBound { count, bound });
        }
        let n = self.modulus;
        let mut out = Vec::with_capacity(count as usize);
        let mut coeff = vec![0u64; self.generators.len()];
        loop {
            let mut x = self.particular.clone();
            for ((g, _), &k) in self.generators.iter().zip(&coeff) {
                if k != 0 {
                    for (xi, &gi) in x.iter_mut().zip(g) {
                        *xi = (*xi + k * gi) % n;
                    }
                }
            }
            out.push(x);
            let mut pos = coeff.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                coeff[pos] += 1;
                if coeff[pos] < self.generators[pos].1 {
                    break;
                }
                coeff[pos] = 0;
            }
        }
    }
}

fn rem(x: i128, n: u64) -> u64 {
    x.rem_euclid(n as i128) as u64
}

/// Solves `A·x ≡ b (mod N)` for `A` with `ncols` columns; `None` if there
/// is no solution.
pub fn solve_mod(a: &[Vec<i64>], ncols: usize, b: &[i64], modulus: u64) -> Result<Option<ModSolution>> {
    let m = a.len();
    let dense: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
    let snf = smith(dense, ncols, true)?;
    let n = modulus as i128;
    // c = U b
    let c: Vec<i128> = (0..m)
        .map(|i| (0..m).fold(0i128, |acc, j| (acc + snf.u[i][j].rem_euclid(n) * i128::from(b[j]).rem_euclid(n)) % n))
        .collect();
    let k = snf.diag.len();
    if c.iter().skip(k).any(|&x| x % n != 0) {
        return Ok(None);
    }
    let mut y0 = vec![0u64; ncols];
    let mut gens_y: Vec<(usize, u64, u64)> = Vec::new(); // (coordinate, step, order)
    for i in 0..k {
        let d = snf.diag[i].rem_euclid(n);
        let g = crate::ring::ext_gcd(d, n).0.abs();
        let g = if g == 0 { n } else { g };
        if c[i] % g != 0 {
            return Ok(None);
        }
        // d y ≡ c (mod N): y0 = (c/g)·(d/g)^{-1} mod N/g
        let ng = n / g;
        let y = if ng == 1 {
            0
        } else {
            let inv = crate::ring::mod_inverse(((d / g).rem_euclid(ng)) as u64, ng as u64).expect("coprime after gcd");
            ((c[i] / g).rem_euclid(ng) * inv as i128) % ng
        };
        y0[i] = y as u64;
        if g > 1 {
            gens_y.push((i, ng as u64, g as u64));
        }
    }
    for i in k..ncols {
        gens_y.push((i, 1, modulus));
    }
    let vcol = |i: usize, scale: u64| -> Vec<u64> {
        (0..ncols).map(|r| rem(snf.v[r][i].rem_euclid(n) * scale as i128, modulus)).collect()
    };
    let mut particular = vec![0u64; ncols];
    for (i, &y) in y0.iter().enumerate() {
        if y != 0 {
            for (p, x) in particular.iter_mut().zip(vcol(i, y)) {
                *p = (*p + x) % modulus;
            }
        }
    }
    let generators = gens_y.into_iter().map(|(i, step, order)| (vcol(i, step), order)).collect();
    Ok(Some(ModSolution { modulus, particular, generators }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelianization_examples() {
        let a = abelianization(1, &[vec![0, 0, 0]]).unwrap();
        assert_eq!(a.invariants(), vec![3]);
        // Z/2 x Z/2
        let a = abelianization(2, &[vec![0, 0], vec![2, 2], vec![0, 2, 1, 3]]).unwrap();
        assert_eq!(a.invariants(), vec![2, 2]);
        // S3 abelianizes to Z/2
        let a = abelianization(2, &[vec![0, 0], vec![2, 2], vec![0, 2, 0, 2, 0, 2]]).unwrap();
        assert_eq!(a.invariants(), vec![2]);
        let a = abelianization(2, &[vec![0, 2, 1, 3]]).unwrap();
        assert_eq!(a.invariants(), vec![0, 0]);
        let a = abelianization(2, &[vec![0, 2], vec![0, 2, 2]]).unwrap();
        assert!(a.is_trivial());
    }

    #[test]
    fn smith_diagonal() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith(a.clone(), 3, true).unwrap();
        assert_eq!(s.diag, vec![2, 6, 12]);
        // U A V is diagonal
        let mul = |x: &Vec<Vec<i128>>, y: &Vec<Vec<i128>>| -> Vec<Vec<i128>> {
            (0..x.len()).map(|i| (0..y[0].len()).map(|j| (0..y.len()).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
        };
        let d = mul(&mul(&s.u, &a), &s.v);
        for (i, row) in d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(x, if i == j { s.diag[i] } else { 0 });
            }
        }
    }

    #[test]
    fn mod_solve_matches_brute_force() {
        let systems: Vec<(Vec<Vec<i64>>, Vec<i64>, u64)> = vec![
            (vec![vec![2, 0], vec![0, 3]], vec![0, 0], 6),
            (vec![vec![2, 4]], vec![2], 12),
            (vec![vec![3, 1, 2], vec![0, 4, 4]], vec![1, 0], 8),
            (vec![vec![2]], vec![1], 4),
        ];
        for (a, b, n) in systems {
            let cols = a[0].len();
            let mut brute = Vec::new();
            let total = n.pow(cols as u32);
            for code in 0..total {
                let x: Vec<u64> = (0..cols).map(|k| code / n.pow((cols - 1 - k) as u32) % n).collect();
                let ok = a.iter().zip(&b).all(|(row, &bi)| {
                    let s: i64 = row.iter().zip(&x).map(|(&r, &xi)| r * xi as i64).sum();
                    (s - bi).rem_euclid(n as i64) == 0
                });
                if ok {
                    brute.push(x);
                }
            }
            let got = match solve_mod(&a, cols, &b, n).unwrap() {
                Some(sol) => {
                    let mut v = sol.enumerate(1 << 20).unwrap();
                    v.sort();
                    v.dedup();
                    v
                }
                None => Vec::new(),
            };
            assert_eq!(got, brute, "system {a:?} = {b:?} mod {n}");
        }
    }
}
