//! The odd form algebra `(R, Δ)` of a quadratic space over `Z/n`:
//! `R` is the algebra of adjoint pairs of endomorphisms, `Δ ⊆ R × R` the
//! quadruples with `xy + z + w = 0` and `q(ym) + ⟨m, wm⟩ = 0`.

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::quadmod::QuadSpace;
use crate::report::SuiteReport;
use crate::ring::{localize_at_prime, mod_inverse, Elem};
use crate::snf::solve_mod;

/// Largest `|R|` or candidate count for `Δ` that is enumerated.
pub const MAX_ELEMENTS: u128 = 50_000_000;
/// Largest module rank accepted.
pub const MAX_RANK: usize = 4;

/// Products checked for closure of `R` when all pairs are too many.
pub const CLOSURE_PAIRS: usize = 1 << 22;
const CLOSURE_CHUNK: usize = 1 << 12;

/// Largest `Δ` held in memory for the localization comparison.
pub const MAX_MATERIALIZED_DELTA: u64 = 1 << 21;

/// Square matrix over `Z/n`, row-major residues.
pub type Endo = Vec<u64>;

/// `(x^op, y)` with `⟨x m, m'⟩ = ⟨m, y m'⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AdjointPair {
    pub x: Endo,
    pub y: Endo,
}

/// `(x^op, y; z^op, w)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DeltaElem {
    pub first: AdjointPair,
    pub second: AdjointPair,
}

/// Where the quadratic condition of `Δ` is imposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DeltaMode {
    /// Every vector of the module.
    Full,
    /// Basis vectors only.
    GeneratorsOnly,
}

/// Matrix arithmetic modulo `n` for `d × d` matrices.
#[derive(Clone, Copy, Debug)]
pub struct MatOps {
    pub n: u64,
    pub d: usize,
}

impl MatOps {
    pub fn mul(&self, a: &[u64], b: &[u64]) -> Endo {
        let d = self.d;
        let mut out = vec![0u64; d * d];
        for i in 0..d {
            for k in 0..d {
                let x = a[i * d + k];
                if x == 0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] = (out[i * d + j] + x * b[k * d + j]) % self.n;
                }
            }
        }
        out
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Endo {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.n).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Endo {
        a.iter().map(|x| (self.n - x) % self.n).collect()
    }

    pub fn identity(&self) -> Endo {
        let d = self.d;
        (0..d * d).map(|k| u64::from(k / d == k % d)).collect()
    }

    pub fn apply(&self, a: &[u64], v: &[u64]) -> Vec<u64> {
        let d = self.d;
        (0..d).map(|i| (0..d).fold(0, |acc, k| (acc + a[i * d + k] * v[k]) % self.n)).collect()
    }

    pub fn scale(&self, a: &[u64], c: u64) -> Endo {
        a.iter().map(|x| x * c % self.n).collect()
    }
}

/// Space data needed by the enumerations, as residues modulo `n`.
#[derive(Clone, Debug)]
pub struct FormData {
    pub ops: MatOps,
    /// Gram matrix of `⟨,⟩`.
    pub gram: Endo,
    space: QuadSpace,
}

impl FormData {
    pub fn new(space: &QuadSpace) -> Result<FormData> {
        let n = space.ring().modulus().ok_or_else(|| Error::NotModular(space.ring().spec().to_string()))?;
        let d = space.dim();
        if d > MAX_RANK {
            return Err(Error::Precondition(format!("module rank {d} exceeds {MAX_RANK}")));
        }
        let gram = space.gram().iter().map(|e| e.0 as u64).collect();
        Ok(FormData { ops: MatOps { n, d }, gram, space: space.clone() })
    }

    pub fn n(&self) -> u64 {
        self.ops.n
    }

    pub fn d(&self) -> usize {
        self.ops.d
    }

    fn q(&self, v: &[u64]) -> u64 {
        let vec = crate::quadmod::Vector(v.iter().map(|&x| Elem(x as u32)).collect());
        self.space.q_form(&vec).0 as u64
    }

    fn bil(&self, v: &[u64], w: &[u64]) -> u64 {
        let d = self.d();
        let mut acc = 0u64;
        for i in 0..d {
            for j in 0..d {
                acc = (acc + v[i] * self.gram[i * d + j] % self.n() * w[j]) % self.n();
            }
        }
        acc
    }

    /// Every vector of the module.
    pub fn vectors(&self) -> Vec<Vec<u64>> {
        let (n, d) = (self.n(), self.d());
        let count = n.pow(d as u32);
        (0..count)
            .map(|mut c| {
                (0..d)
                    .map(|_| {
                        let x = c % n;
                        c /= n;
                        x
                    })
                    .collect()
            })
            .collect()
    }

    pub fn basis(&self) -> Vec<Vec<u64>> {
        let d = self.d();
        (0..d).map(|i| (0..d).map(|j| u64::from(i == j)).collect()).collect()
    }

    /// Rows of `x^T B - B y = 0` over unknowns `(x, y)` row-major.
    fn adjoint_rows(&self) -> Vec<Vec<i64>> {
        let d = self.d();
        let mut rows = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let mut row = vec![0i64; 2 * d * d];
                for k in 0..d {
                    // (x^T B)_{ab} = Σ_k x_{ka} B_{kb}
                    row[k * d + a] += self.gram[k * d + b] as i64;
                    // (B y)_{ab} = Σ_k B_{ak} y_{kb}
                    row[d * d + k * d + b] -= self.gram[a * d + k] as i64;
                }
                rows.push(row);
            }
        }
        rows
    }

    pub fn is_adjoint(&self, x: &[u64], y: &[u64]) -> bool {
        let o = self.ops;
        let xt = transpose(x, o.d);
        o.mul(&xt, &self.gram) == o.mul(&self.gram, y)
    }

    pub fn quadratic_ok(&self, y: &[u64], w: &[u64], ms: &[Vec<u64>]) -> bool {
        ms.iter().all(|m| (self.q(&self.ops.apply(y, m)) + self.bil(m, &self.ops.apply(w, m))).is_multiple_of(self.n()))
    }
}

fn transpose(a: &[u64], d: usize) -> Endo {
    (0..d * d).map(|k| a[(k % d) * d + k / d]).collect()
}

fn split_pair(v: &[u64], d: usize) -> AdjointPair {
    AdjointPair { x: v[..d * d].to_vec(), y: v[d * d..].to_vec() }
}

/// `R` as the solution set of the adjointness equations.
pub fn compute_r(form: &FormData) -> Result<Vec<AdjointPair>> {
    let d = form.d();
    let rows = form.adjoint_rows();
    let sol = solve_mod(&rows, 2 * d * d, &vec![0; rows.len()], form.n())?
        .ok_or_else(|| Error::Precondition("homogeneous system without solutions".into()))?;
    let mut out: Vec<AdjointPair> = sol.enumerate(MAX_ELEMENTS)?.iter().map(|v| split_pair(v, d)).collect();
    out.sort();
    Ok(out)
}

/// `Δ` over a precomputed `R`, sorted.
pub fn compute_delta(form: &FormData, r: &[AdjointPair], mode: DeltaMode, exec: Exec) -> Result<Vec<DeltaElem>> {
    let both = compute_delta_both(form, r, exec)?;
    Ok(match mode {
        DeltaMode::Full => both.full,
        DeltaMode::GeneratorsOnly => both.generators_only,
    })
}

/// `Δ` in both modes from a single pass over the candidates.
pub struct DeltaSets {
    pub full: Vec<DeltaElem>,
    pub generators_only: Vec<DeltaElem>,
    pub candidates: u128,
}

/// Sizes of `Δ` in both modes, with one element of the difference if any.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaCounts {
    pub full: u64,
    pub generators_only: u64,
    pub candidates: u128,
    pub witness: Option<DeltaElem>,
}

struct Fiber {
    /// `(w, passes the full condition)` for each `w` passing on the basis.
    kept: Vec<(Endo, bool)>,
    full: u64,
    generators_only: u64,
    witness: Option<Endo>,
}

/// For each `(x, y) ∈ R`, the `w` with `(-xy - w, w) ∈ R` that satisfy the
/// quadratic condition on the basis, and whether they satisfy it on every
/// vector. The solutions form `w₀ + K` with `K` solved once; the values
/// `⟨m, k m⟩` for `k ∈ K` are tabulated, so each candidate costs one
/// table row.
fn delta_fibers(form: &FormData, r: &[AdjointPair], keep: bool, exec: Exec) -> Result<(Vec<Fiber>, u128)> {
    let (d, n) = (form.d(), form.n());
    let o = form.ops;
    let dd = d * d;
    // B w + w^T B = C over unknowns w
    let mut rows = Vec::with_capacity(dd);
    for a in 0..d {
        for b in 0..d {
            let mut row = vec![0i64; dd];
            for k in 0..d {
                row[k * d + b] += form.gram[a * d + k] as i64;
                row[k * d + a] += form.gram[k * d + b] as i64;
            }
            rows.push(row);
        }
    }
    let kernel = solve_mod(&rows, dd, &vec![0; dd], n)?.expect("homogeneous");
    let total = kernel.count().saturating_mul(r.len() as u128);
    if total > MAX_ELEMENTS * 20 {
        return Err(Error::EnumerationBound { count: total, bound: MAX_ELEMENTS * 20 });
    }
    let ks = kernel.enumerate(MAX_ELEMENTS)?;
    let vs = form.vectors();
    let basis_idx: Vec<usize> = (0..d).map(|i| n.pow(i as u32) as usize).collect();
    let nv = vs.len();
    let g_table: Vec<u64> = ks.iter().flat_map(|k| vs.iter().map(|m| form.bil(m, &o.apply(k, m)))).collect();
    let fibers = exec.map(r, |p| -> Result<Fiber> {
        let xy = o.mul(&p.x, &p.y);
        // C = -(xy)^T B
        let c = o.neg(&o.mul(&transpose(&xy, d), &form.gram));
        let b: Vec<i64> = c.iter().map(|&x| x as i64).collect();
        let mut fib = Fiber { kept: Vec::new(), full: 0, generators_only: 0, witness: None };
        let Some(sol) = solve_mod(&rows, dd, &b, n)? else { return Ok(fib) };
        let w0 = sol.particular;
        let h: Vec<u64> = vs.iter().map(|m| (form.q(&o.apply(&p.y, m)) + form.bil(m, &o.apply(&w0, m))) % n).collect();
        for (ki, k) in ks.iter().enumerate() {
            let g = &g_table[ki * nv..(ki + 1) * nv];
            if !basis_idx.iter().all(|&m| (h[m] + g[m]).is_multiple_of(n)) {
                continue;
            }
            fib.generators_only += 1;
            let full = (0..nv).all(|m| (h[m] + g[m]).is_multiple_of(n));
            if full {
                fib.full += 1;
            }
            if keep || (!full && fib.witness.is_none()) {
                let w = o.add(&w0, k);
                if !full && fib.witness.is_none() {
                    fib.witness = Some(w.clone());
                }
                if keep {
                    fib.kept.push((w, full));
                }
            }
        }
        Ok(fib)
    });
    Ok((fibers.into_iter().collect::<Result<Vec<_>>>()?, total))
}

fn delta_elem(form: &FormData, p: &AdjointPair, w: Endo) -> DeltaElem {
    let o = form.ops;
    let z = o.neg(&o.add(&o.mul(&p.x, &p.y), &w));
    DeltaElem { first: p.clone(), second: AdjointPair { x: z, y: w } }
}

pub fn compute_delta_both(form: &FormData, r: &[AdjointPair], exec: Exec) -> Result<DeltaSets> {
    let (fibers, candidates) = delta_fibers(form, r, true, exec)?;
    let mut sets = DeltaSets { full: Vec::new(), generators_only: Vec::new(), candidates };
    for (p, fib) in r.iter().zip(fibers) {
        for (w, full) in fib.kept {
            let e = delta_elem(form, p, w);
            if full {
                sets.full.push(e.clone());
            }
            sets.generators_only.push(e);
        }
    }
    sets.full.sort();
    sets.generators_only.sort();
    Ok(sets)
}

/// Like [`compute_delta_both`] without keeping the elements.
pub fn count_delta(form: &FormData, r: &[AdjointPair], exec: Exec) -> Result<DeltaCounts> {
    let (fibers, candidates) = delta_fibers(form, r, false, exec)?;
    let mut out = DeltaCounts { full: 0, generators_only: 0, candidates, witness: None };
    for (p, fib) in r.iter().zip(fibers) {
        out.full += fib.full;
        out.generators_only += fib.generators_only;
        if out.witness.is_none() {
            out.witness = fib.witness.map(|w| delta_elem(form, p, w));
        }
    }
    Ok(out)
}

/// `R` contains the identity and every `(g⁻¹, g)` for orthogonal `g`, and
/// is closed under `(x, y)(x', y') = (x' x, y y')`.
pub fn verify_r_structure(space: &QuadSpace, form: &FormData, r: &[AdjointPair], orthogonal: bool, exec: Exec) -> Result<SuiteReport> {
    let o = form.ops;
    let mut rep = SuiteReport::new(
        "r-structure",
        json!({"ring": space.ring().spec().to_string(), "ell": space.ell(), "r": space.r()}),
    );
    let set: HashSet<&AdjointPair> = r.iter().collect();
    let id = AdjointPair { x: o.identity(), y: o.identity() };
    rep.instances_checked += 1;
    if !set.contains(&id) {
        rep.fail(json!({"check": "identity"}));
    }
    for a in 0..form.n() {
        rep.instances_checked += 1;
        let s = AdjointPair { x: o.scale(&id.x, a), y: o.scale(&id.y, a) };
        if !set.contains(&s) {
            rep.fail(json!({"check": "scalar", "a": a}));
        }
    }
    // closure: all products when small, else a seeded sample of pairs
    let total = (r.len() as u128).pow(2);
    let bad: usize = if total <= CLOSURE_PAIRS as u128 {
        exec.map(r, |p| r.iter().filter(|q| !set.contains(&closure_product(o, q, p))).count()).iter().sum()
    } else {
        exec.map_range(CLOSURE_PAIRS / CLOSURE_CHUNK, |chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(chunk as u64);
            (0..CLOSURE_CHUNK)
                .filter(|_| {
                    let (q, p) = (&r[rng.gen_range(0..r.len())], &r[rng.gen_range(0..r.len())]);
                    !set.contains(&closure_product(o, q, p))
                })
                .count()
        })
        .iter()
        .sum()
    };
    let checked = total.min(CLOSURE_PAIRS as u128) as u64;
    rep.instances_checked += checked;
    if bad > 0 {
        rep.fail(json!({"check": "closure", "failures": bad}));
    }
    rep.set("closure_pairs_checked", checked);
    rep.set("closure_exhaustive", total <= CLOSURE_PAIRS as u128);
    if orthogonal {
        let group = space.enumerate_orthogonal_bruteforce()?;
        rep.set("orthogonal_group_order", group.len());
        let inv = |m: &[u64]| -> Option<Endo> { group_inverse(&group, form, m) };
        for g in &group {
            let y: Endo = g.mat().data().iter().map(|e| e.0 as u64).collect();
            rep.instances_checked += 1;
            let ok = inv(&y).is_some_and(|x| set.contains(&AdjointPair { x, y: y.clone() }));
            if !ok {
                rep.fail(json!({"check": "orthogonal", "g": y}));
            }
        }
    }
    Ok(rep)
}

fn closure_product(o: MatOps, q: &AdjointPair, p: &AdjointPair) -> AdjointPair {
    AdjointPair { x: o.mul(&q.x, &p.x), y: o.mul(&p.y, &q.y) }
}

fn group_inverse(group: &[crate::orthogroup::OrthoMap], form: &FormData, m: &[u64]) -> Option<Endo> {
    let id = form.ops.identity();
    group.iter().map(|g| g.mat().data().iter().map(|e| e.0 as u64).collect::<Endo>()).find(|h| form.ops.mul(m, h) == id)
}

fn reduce(v: &[u64], m: u64) -> Endo {
    v.iter().map(|x| x % m).collect()
}

/// Compares `(R, Δ)` over `Z/n` pushed to the localization `Z/p^v` with
/// `(R, Δ)` computed there directly: `R` by image, `Δ` by
/// `{(r/s, r'/s²)}` over the units `s`.
pub fn localization_commutes(n: u64, p: u64, ell: usize, r: usize, q0_upper: &[i64], exec: Exec) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rep = SuiteReport::new("localization-commutes", json!({"n": n, "p": p, "ell": ell, "r": r, "q0": q0_upper}));
    let (target, _) = localize_at_prime(n, p)?;
    let m = target.modulus().expect("localization of Z/n is modular");
    rep.set("localized_ring", format!("Z/{m}"));
    let src_space = QuadSpace::with_ints(crate::ring::Ring::zn(n)?, ell, r, q0_upper)?;
    let dst_space = QuadSpace::with_ints(target.clone(), ell, r, q0_upper)?;
    let (src, dst) = (FormData::new(&src_space)?, FormData::new(&dst_space)?);

    let r_src = compute_r(&src)?;
    let r_dst = compute_r(&dst)?;
    let image: HashSet<AdjointPair> =
        r_src.iter().map(|p| AdjointPair { x: reduce(&p.x, m), y: reduce(&p.y, m) }).collect();
    let direct: HashSet<AdjointPair> = r_dst.iter().cloned().collect();
    rep.set("r_source", r_src.len());
    rep.set("r_image", image.len());
    rep.set("r_direct", direct.len());
    rep.instances_checked += 1;
    if image != direct {
        rep.fail(json!({"comparison": "R", "image_minus_direct": image.difference(&direct).count(),
                        "direct_minus_image": direct.difference(&image).count()}));
    }

    let sizes = (count_delta(&src, &r_src, exec)?.full, count_delta(&dst, &r_dst, exec)?.full);
    if sizes.0.max(sizes.1) > MAX_MATERIALIZED_DELTA {
        rep.set("delta_source", sizes.0);
        rep.set("delta_direct", sizes.1);
        rep.note(format!("Delta comparison skipped: more than {MAX_MATERIALIZED_DELTA} elements to materialize"));
        rep.time("total", start);
        return Ok(rep);
    }
    let d_src = compute_delta(&src, &r_src, DeltaMode::Full, exec)?;
    let d_dst = compute_delta(&dst, &r_dst, DeltaMode::Full, exec)?;
    let units: Vec<u64> = (1..m).filter(|&s| mod_inverse(s, m).is_some()).collect();
    let dops = dst.ops;
    let mut image: HashSet<DeltaElem> = HashSet::new();
    for e in &d_src {
        let first = AdjointPair { x: reduce(&e.first.x, m), y: reduce(&e.first.y, m) };
        let second = AdjointPair { x: reduce(&e.second.x, m), y: reduce(&e.second.y, m) };
        for &s in &units {
            let si = mod_inverse(s, m).expect("unit");
            let si2 = si * si % m;
            image.insert(DeltaElem {
                first: AdjointPair { x: dops.scale(&first.x, si), y: dops.scale(&first.y, si) },
                second: AdjointPair { x: dops.scale(&second.x, si2), y: dops.scale(&second.y, si2) },
            });
        }
    }
    let direct: HashSet<DeltaElem> = d_dst.iter().cloned().collect();
    rep.set("delta_source", d_src.len());
    rep.set("delta_image", image.len());
    rep.set("delta_direct", direct.len());
    rep.instances_checked += 1;
    if image != direct {
        rep.fail(json!({"comparison": "Delta", "image_minus_direct": image.difference(&direct).count(),
                        "direct_minus_image": direct.difference(&image).count()}));
    }
    rep.time("total", start);
    Ok(rep)
}

/// Full and generators-only `Δ` over one space. `Δ ⊆ Δ_gen` holds by
/// construction; whether it is strict is reported with a witness.
pub fn delta_generators_experiment(space: &QuadSpace, exec: Exec) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rep = SuiteReport::new(
        "delta-generators",
        json!({"ring": space.ring().spec().to_string(), "ell": space.ell(), "r": space.r(),
               "q0": space.q0_upper().iter().map(|e| e.0).collect::<Vec<_>>()}),
    );
    let form = FormData::new(space)?;
    let r = compute_r(&form)?;
    let counts = count_delta(&form, &r, exec)?;
    rep.instances_checked += counts.candidates.min(u64::MAX as u128) as u64;
    rep.set("r_size", r.len());
    rep.set("candidates", counts.candidates.to_string());
    rep.set("delta_full", counts.full);
    rep.set("delta_generators_only", counts.generators_only);
    rep.set("outcome", if counts.full == counts.generators_only { "equal" } else { "strict" });
    rep.set("strict_excess", counts.generators_only - counts.full);
    if let Some(e) = &counts.witness {
        rep.set("witness", serde_json::to_value(e).unwrap_or_default());
        let bad = form.vectors().into_iter().find(|m| !form.quadratic_ok(&e.first.y, &e.second.y, std::slice::from_ref(m)));
        rep.set("witness_vector", serde_json::to_value(bad).unwrap_or_default());
    }
    rep.time("total", start);
    Ok(rep)
}

/// Every element of `Δ` satisfies `xy + z + w = 0` and both adjointness
/// conditions.
pub fn verify_delta_identities(form: &FormData, delta: &[DeltaElem]) -> SuiteReport {
    let o = form.ops;
    let mut rep = SuiteReport::new("delta-identities", json!({"n": form.n(), "dim": form.d()}));
    for e in delta {
        let sum = o.add(&o.add(&o.mul(&e.first.x, &e.first.y), &e.second.x), &e.second.y);
        rep.instances_checked += 1;
        if sum.iter().any(|&x| x != 0) || !form.is_adjoint(&e.first.x, &e.first.y) || !form.is_adjoint(&e.second.x, &e.second.y) {
            rep.fail(json!({"element": e}));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

    fn hyp(n: u64) -> QuadSpace {
        QuadSpace::split(n, 1).unwrap()
    }

    #[test]
    fn r_brute_force_z2() {
        let s = hyp(2);
        let form = FormData::new(&s).unwrap();
        let r = compute_r(&form).unwrap();
        // oracle: every pair of 2×2 matrices over F_2
        let mut brute = Vec::new();
        for code in 0..256u64 {
            let v: Vec<u64> = (0..8).map(|k| (code >> k) & 1).collect();
            if form.is_adjoint(&v[..4], &v[4..]) {
                brute.push(split_pair(&v, 2));
            }
        }
        brute.sort();
        assert_eq!(r, brute);
        let rep = verify_r_structure(&s, &form, &r, true, Exec::Sequential).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
    }

    #[test]
    fn delta_contains_zero_and_satisfies_identities() {
        let s = hyp(4);
        let form = FormData::new(&s).unwrap();
        let r = compute_r(&form).unwrap();
        let d = compute_delta(&form, &r, DeltaMode::Full, Exec::Sequential).unwrap();
        let zero = AdjointPair { x: vec![0; 4], y: vec![0; 4] };
        assert!(d.contains(&DeltaElem { first: zero.clone(), second: zero }));
        assert!(verify_delta_identities(&form, &d).passed);
        let rep = delta_generators_experiment(&s, Exec::Sequential).unwrap();
        assert_eq!(rep.results["delta_full"], d.len());
    }

    #[test]
    fn delta_brute_force_z2() {
        let s = hyp(2);
        let form = FormData::new(&s).unwrap();
        let r = compute_r(&form).unwrap();
        let d = compute_delta(&form, &r, DeltaMode::Full, Exec::Sequential).unwrap();
        let all = form.vectors();
        let o = form.ops;
        let mut brute = Vec::new();
        for p in &r {
            for q in &r {
                let sum = o.add(&o.add(&o.mul(&p.x, &p.y), &q.x), &q.y);
                if sum.iter().all(|&x| x == 0) && form.quadratic_ok(&p.y, &q.y, &all) {
                    brute.push(DeltaElem { first: p.clone(), second: q.clone() });
                }
            }
        }
        brute.sort();
        assert_eq!(d, brute);
    }

    #[test]
    fn already_local_is_identity() {
        let rep = localization_commutes(4, 2, 1, 0, &[], Exec::Sequential).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
        assert_eq!(rep.results["r_source"], rep.results["r_direct"]);
    }

    #[test]
    fn localization_z12() {
        for p in [2, 3] {
            let rep = localization_commutes(12, p, 1, 0, &[], Exec::Parallel).unwrap();
            assert!(rep.passed, "p = {p}: {:?}", rep.failures);
        }
    }

    #[test]
    fn rank_bound() {
        let s = QuadSpace::split(2, 3).unwrap();
        assert!(FormData::new(&s).is_err());
        let p = QuadSpace::new(Ring::parse("Z/2 x Z/3").unwrap(), 1, 0, &[]).unwrap();
        assert!(matches!(FormData::new(&p), Err(Error::NotModular(_))));
    }
}
