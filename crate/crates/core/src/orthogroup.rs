//! Orthogonal maps, ESD-transvections and the elementary orthogonal group.
//!
//! `T(u, v): m ↦ m + u⟨v,m⟩ − v⟨u,m⟩ − u·q(v)·⟨u,m⟩` for `q(u) = ⟨u,v⟩ = 0`.
//! Elementary transvections are `t_ij(a) = T(e_i, e_{-j} a)` and
//! `t_j(m) = T(e_{-j}, −m)` for `m ∈ M₀`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::quadmod::{QuadSpace, Vector};
use crate::ring::Elem;

/// Default cap on the number of elements an orbit or group closure may hold.
pub const DEFAULT_CLOSURE_BOUND: usize = 2_000_000;

/// Matrix certified to preserve `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrthoMap(Mat);

impl OrthoMap {
    pub fn identity(space: &QuadSpace) -> OrthoMap {
        OrthoMap(Mat::identity(space.ring(), space.dim()))
    }

    /// Checks orthogonality and invertibility first.
    pub fn new(space: &QuadSpace, m: Mat) -> Result<OrthoMap> {
        if !space.is_orthogonal(&m) {
            return Err(Error::Precondition("matrix is not orthogonal".into()));
        }
        Ok(OrthoMap(m))
    }

    pub fn mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    pub fn compose(&self, space: &QuadSpace, other: &OrthoMap) -> OrthoMap {
        OrthoMap(self.0.mul(space.ring(), &other.0))
    }

    pub fn apply(&self, space: &QuadSpace, v: &Vector) -> Vector {
        self.0.apply(space.ring(), v)
    }

    pub fn is_identity(&self, space: &QuadSpace) -> bool {
        self.0.is_identity(space.ring())
    }
}

/// Parameters of an elementary transvection: `Long(i, j, a)` is `t_ij(a)`,
/// `Short(j, m)` is `t_j(m)` with `m` given by its `M₀` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GenLabel {
    Long { i: i32, j: i32, a: Elem },
    Short { j: i32, m: Vec<Elem> },
}

impl GenLabel {
    pub fn long(i: i32, j: i32, a: Elem) -> GenLabel {
        GenLabel::Long { i, j, a }
    }

    pub fn short(j: i32, m: Vec<Elem>) -> GenLabel {
        GenLabel::Short { j, m }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            GenLabel::Long { a, .. } => a.0 == 0,
            GenLabel::Short { m, .. } => m.iter().all(|x| x.0 == 0),
        }
    }

    pub fn validate(&self, space: &QuadSpace) -> Result<()> {
        match self {
            GenLabel::Long { i, j, .. } => {
                space.check_index(*i)?;
                space.check_index(*j)?;
                if *i == *j || *i == -*j {
                    return Err(Error::Precondition(format!("long root needs i != ±j, got ({i},{j})")));
                }
            }
            GenLabel::Short { j, m } => {
                space.check_index(*j)?;
                if m.len() != space.r() {
                    return Err(Error::Dimension { expected: space.r(), got: m.len() });
                }
            }
        }
        Ok(())
    }

    /// Same root, parameter negated: the inverse transvection.
    pub fn negated(&self, space: &QuadSpace) -> GenLabel {
        let r = space.ring();
        match self {
            GenLabel::Long { i, j, a } => GenLabel::Long { i: *i, j: *j, a: r.neg(*a) },
            GenLabel::Short { j, m } => GenLabel::Short { j: *j, m: m.iter().map(|&x| r.neg(x)).collect() },
        }
    }

    /// The pair `(u, v)` with `t = T(u, v)`.
    pub fn esd_pair(&self, space: &QuadSpace) -> (Vector, Vector) {
        match self {
            GenLabel::Long { i, j, a } => (space.e(*i), space.scale(&space.e(-*j), *a)),
            GenLabel::Short { j, m } => (space.e(-*j), space.neg(&space.embed_m0(m))),
        }
    }

    pub fn to_json(&self, space: &QuadSpace) -> serde_json::Value {
        let r = space.ring();
        match self {
            GenLabel::Long { i, j, a } => serde_json::json!(["long", i, j, r.to_json(*a)]),
            GenLabel::Short { j, m } => {
                let coords: Vec<serde_json::Value> = m.iter().map(|&x| r.to_json(x)).collect();
                serde_json::json!(["short", j, coords])
            }
        }
    }
}

impl fmt::Display for GenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenLabel::Long { i, j, a } => write!(f, "x({i},{j};{})", a.0),
            GenLabel::Short { j, m } => {
                let ms: Vec<String> = m.iter().map(|x| x.0.to_string()).collect();
                write!(f, "x({j};[{}])", ms.join(","))
            }
        }
    }
}

/// A generator with exponent ±1. Shared by orbit witnesses and Steinberg words.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Gen {
    pub label: GenLabel,
    pub exp: i8,
}

impl Gen {
    pub fn new(label: GenLabel) -> Gen {
        Gen { label, exp: 1 }
    }

    pub fn inverse(&self) -> Gen {
        Gen { label: self.label.clone(), exp: -self.exp }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp < 0 {
            write!(f, "{}^-1", self.label)
        } else {
            write!(f, "{}", self.label)
        }
    }
}

impl QuadSpace {
    /// Orthogonality from basis data: `q(g b) = q(b)` for each basis vector,
    /// `⟨g b, g b'⟩ = ⟨b, b'⟩` for each basis pair, plus invertibility.
    /// Expanding `q` on linear combinations shows this gives `q(gm) = q(m)`
    /// for every `m`.
    pub fn is_orthogonal(&self, g: &Mat) -> bool {
        let d = self.dim();
        if g.dim() != d {
            return false;
        }
        let cols: Vec<Vector> = (0..d).map(|c| g.column(c)).collect();
        for (c, col) in cols.iter().enumerate() {
            let mut b = self.zero();
            b.0[c] = self.ring().one();
            if self.q_form(col) != self.q_form(&b) {
                return false;
            }
            for c2 in (c + 1)..d {
                if self.bil(col, &cols[c2]) != self.gram()[c * d + c2] {
                    return false;
                }
            }
        }
        g.is_invertible(self.ring())
    }

    /// `q(gm) = q(m)` checked on every vector, for small spaces.
    pub fn preserves_q_exhaustive(&self, g: &Mat) -> Result<bool> {
        for v in self.enumerate_vectors()? {
            if self.q_form(&g.apply(self.ring(), &v)) != self.q_form(&v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `T(u, v)·m` without building a matrix; the caller guarantees the
    /// preconditions.
    pub fn esd_apply(&self, u: &Vector, v: &Vector, qv: Elem, m: &Vector) -> Vector {
        let r = self.ring();
        let vm = self.bil(v, m);
        let um = self.bil(u, m);
        let cu = r.sub(vm, r.mul(qv, um));
        let mut out = self.axpy(m, u, cu);
        if um.0 != 0 {
            out = self.axpy(&out, v, r.neg(um));
        }
        out
    }

    /// The ESD-transvection `T(u, v)`.
    pub fn esd(&self, u: &Vector, v: &Vector) -> Result<OrthoMap> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        if self.q_form(u).0 != 0 {
            return Err(Error::Precondition(format!("q(u) != 0 for u = {}", self.fmt_vector(u))));
        }
        if self.bil(u, v).0 != 0 {
            return Err(Error::Precondition(format!(
                "<u, v> != 0 for u = {}, v = {}",
                self.fmt_vector(u),
                self.fmt_vector(v)
            )));
        }
        Ok(self.esd_unchecked(u, v))
    }

    pub(crate) fn esd_unchecked(&self, u: &Vector, v: &Vector) -> OrthoMap {
        let qv = self.q_form(v);
        let d = self.dim();
        let cols: Vec<Vector> = (0..d)
            .map(|c| {
                let mut b = self.zero();
                b.0[c] = self.ring().one();
                self.esd_apply(u, v, qv, &b)
            })
            .collect();
        OrthoMap(Mat::from_columns(&cols))
    }

    pub fn t_long(&self, i: i32, j: i32, a: Elem) -> Result<OrthoMap> {
        let label = GenLabel::long(i, j, a);
        label.validate(self)?;
        Ok(self.transvection(&label))
    }

    pub fn t_short(&self, j: i32, m0: &[Elem]) -> Result<OrthoMap> {
        let label = GenLabel::short(j, m0.to_vec());
        label.validate(self)?;
        Ok(self.transvection(&label))
    }

    /// Matrix of an elementary transvection (label assumed valid).
    pub fn transvection(&self, label: &GenLabel) -> OrthoMap {
        let (u, v) = label.esd_pair(self);
        self.esd_unchecked(&u, &v)
    }

    /// Applies `t^exp` to `m` using the sparse coordinate formulas:
    /// `t_ij(a)` adds `a·m_j` to coordinate `i` and subtracts `a·m_{-i}` from
    /// coordinate `-j`; `t_j(m₀)` is expanded from the ESD formula.
    pub fn apply_gen(&self, g: &Gen, m: &mut [Elem]) {
        let r = self.ring();
        match &g.label {
            GenLabel::Long { i, j, a } => {
                let a = if g.exp < 0 { r.neg(*a) } else { *a };
                let (pi, pj, pmi, pmj) = (self.pos(*i), self.pos(*j), self.pos(-*i), self.pos(-*j));
                let (mj, mmi) = (m[pj], m[pmi]);
                m[pi] = r.add(m[pi], r.mul(a, mj));
                m[pmj] = r.sub(m[pmj], r.mul(a, mmi));
            }
            GenLabel::Short { j, m: m0 } => {
                // T(e_{-j}, -m0)(x) = x - e_{-j}(<m0, x> + q(m0) x_j) + m0 x_j
                let m0: Vec<Elem> = if g.exp < 0 { m0.iter().map(|&x| r.neg(x)).collect() } else { m0.clone() };
                let base = 2 * self.ell();
                let xj = m[self.pos(*j)];
                let bil = self.bil_m0(&m0, &m[base..]);
                let corr = r.add(bil, r.mul(self.q0_form(&m0), xj));
                let pmj = self.pos(-*j);
                m[pmj] = r.sub(m[pmj], corr);
                if xj.0 != 0 {
                    for (k, &c) in m0.iter().enumerate() {
                        m[base + k] = r.add(m[base + k], r.mul(c, xj));
                    }
                }
            }
        }
    }

    /// `g·X` for a generator `g`: the generator applied to every column.
    pub fn left_mul_gen(&self, g: &Gen, x: &mut Mat) {
        let d = self.dim();
        let mut col = vec![Elem(0); d];
        for c in 0..d {
            for (r, slot) in col.iter_mut().enumerate() {
                *slot = x.get(r, c);
            }
            self.apply_gen(g, &mut col);
            for (r, &v) in col.iter().enumerate() {
                x.set(r, c, v);
            }
        }
    }

    /// Product `g_1 g_2 ⋯ g_k` of generator matrices.
    pub fn eval_gens<'a>(&self, gens: impl DoubleEndedIterator<Item = &'a Gen>) -> OrthoMap {
        let mut x = Mat::identity(self.ring(), self.dim());
        for g in gens.rev() {
            self.left_mul_gen(g, &mut x);
        }
        OrthoMap(x)
    }

    /// `g_1 ⋯ g_k · v`.
    pub fn apply_gens<'a>(&self, gens: impl DoubleEndedIterator<Item = &'a Gen>, v: &Vector) -> Vector {
        let mut out = v.clone();
        for g in gens.rev() {
            self.apply_gen(g, &mut out.0);
        }
        out
    }

    /// `(g_1 ⋯ g_k)^{-1} · v`, applying inverse generators left to right.
    pub fn apply_gens_inverse<'a>(&self, gens: impl Iterator<Item = &'a Gen>, v: &Vector) -> Vector {
        let mut out = v.clone();
        for g in gens {
            self.apply_gen(&g.inverse(), &mut out.0);
        }
        out
    }

    /// Labels whose transvections multiply to `T(e_i, m)`:
    /// `t_{-i}(-m₀) ∏_{j≠±i} t_{i,-j}(m_j)`. The `e_i`-coordinate of `m`
    /// is discarded since `T(u, ua) = 1`.
    pub fn decompose_esd(&self, i: i32, m: &Vector) -> Result<Vec<GenLabel>> {
        self.check_index(i)?;
        self.check_dim(m)?;
        if self.coord(m, -i).0 != 0 {
            return Err(Error::Precondition(format!("<e_{i}, m> != 0")));
        }
        let r = self.ring();
        let mut out = Vec::new();
        let m0 = self.m0_part(m);
        if m0.iter().any(|x| x.0 != 0) {
            out.push(GenLabel::short(-i, m0.iter().map(|&x| r.neg(x)).collect()));
        }
        for j in self.hyp_indices() {
            if j == i || j == -i {
                continue;
            }
            let mj = self.coord(m, j);
            if mj.0 != 0 {
                out.push(GenLabel::long(i, -j, mj));
            }
        }
        Ok(out)
    }

    /// R2-canonical orientation of a long root: of `(i, j)` and `(-j, -i)`,
    /// the one that is smaller in the order `1 < 2 < … < ℓ < -1 < … < -ℓ`.
    pub fn canonical_root(&self, i: i32, j: i32) -> bool {
        let key = |k: i32| if k > 0 { k } else { self.ell() as i32 - k };
        (key(i), key(j)) <= (key(-j), key(-i))
    }

    /// Long roots `(i, j)` in canonical orientation, sorted by basis order.
    pub fn canonical_roots(&self) -> Vec<(i32, i32)> {
        let idx = self.hyp_indices();
        let mut out = Vec::new();
        for &i in &idx {
            for &j in &idx {
                if i != j && i != -j && self.canonical_root(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Generating set for orbit and group closure: canonical long roots with
    /// additive generators of the ring and short roots with `M₀` basis
    /// vectors scaled by them, each with both exponents.
    pub fn elementary_generators(&self) -> Vec<Gen> {
        let r = self.ring();
        let adds = r.additive_generators();
        let mut out = Vec::new();
        for (i, j) in self.canonical_roots() {
            for &a in &adds {
                for exp in [1, -1] {
                    out.push(Gen { label: GenLabel::long(i, j, a), exp });
                }
            }
        }
        for j in self.hyp_indices() {
            for k in 0..self.r() {
                for &a in &adds {
                    let mut m = vec![r.zero(); self.r()];
                    m[k] = a;
                    for exp in [1, -1] {
                        out.push(Gen { label: GenLabel::short(j, m.clone()), exp });
                    }
                }
            }
        }
        out
    }

    /// Breadth-first orbit of `start` under the elementary generators.
    pub fn orbit(&self, start: &Vector) -> Result<OrbitTable> {
        self.orbit_with(start, &self.elementary_generators(), DEFAULT_CLOSURE_BOUND)
    }

    /// Same orbit, generators visited in a seeded random order, giving
    /// different witnesses.
    pub fn orbit_shuffled(&self, start: &Vector, seed: u64) -> Result<OrbitTable> {
        let mut gens = self.elementary_generators();
        gens.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        self.orbit_with(start, &gens, DEFAULT_CLOSURE_BOUND)
    }

    pub fn orbit_with(&self, start: &Vector, gens: &[Gen], bound: usize) -> Result<OrbitTable> {
        self.check_dim(start)?;
        let mut index: HashMap<Vector, usize> = HashMap::new();
        let mut vectors = vec![start.clone()];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None];
        index.insert(start.clone(), 0);
        let mut head = 0;
        while head < vectors.len() {
            let x = vectors[head].clone();
            for (gi, g) in gens.iter().enumerate() {
                let mut y = x.clone();
                self.apply_gen(g, &mut y.0);
                if !index.contains_key(&y) {
                    if vectors.len() >= bound {
                        return Err(Error::EnumerationBound { count: vectors.len() as u128 + 1, bound: bound as u128 });
                    }
                    index.insert(y.clone(), vectors.len());
                    vectors.push(y);
                    parent.push(Some((head, gi)));
                }
            }
            head += 1;
        }
        let mut witnesses: Vec<Vec<Gen>> = Vec::with_capacity(vectors.len());
        for k in 0..vectors.len() {
            // BFS order: parents come first
            let w = match parent[k] {
                None => Vec::new(),
                Some((p, gi)) => {
                    let mut w = Vec::with_capacity(witnesses[p].len() + 1);
                    w.push(gens[gi].clone());
                    w.extend(witnesses[p].iter().cloned());
                    w
                }
            };
            witnesses.push(w);
        }
        let table = OrbitTable { start: start.clone(), index, vectors, witnesses };
        table.spot_check(self)?;
        Ok(table)
    }

    /// Orbit of the pair `(a, b)` under the elementary generators.
    pub fn pair_orbit(&self, a: &Vector, b: &Vector, bound: usize) -> Result<HashSet<(Vector, Vector)>> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        let gens = self.elementary_generators();
        let start = (a.clone(), b.clone());
        let mut seen = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some((x, y)) = queue.pop_front() {
            for g in &gens {
                let (mut x2, mut y2) = (x.clone(), y.clone());
                self.apply_gen(g, &mut x2.0);
                self.apply_gen(g, &mut y2.0);
                let key = (x2, y2);
                if !seen.contains(&key) {
                    if seen.len() >= bound {
                        return Err(Error::EnumerationBound { count: seen.len() as u128 + 1, bound: bound as u128 });
                    }
                    seen.insert(key.clone());
                    queue.push_back(key);
                }
            }
        }
        Ok(seen)
    }

    /// A uniformly random elementary generator label with a random parameter.
    pub fn random_label<R: rand::Rng>(&self, rng: &mut R) -> GenLabel {
        let idx = self.hyp_indices();
        let n = self.ring().size() as u32;
        if self.r() > 0 && rng.gen_ratio(1, 3) {
            let j = idx[rng.gen_range(0..idx.len())];
            return GenLabel::short(j, (0..self.r()).map(|_| Elem(rng.gen_range(0..n))).collect());
        }
        loop {
            let i = idx[rng.gen_range(0..idx.len())];
            let j = idx[rng.gen_range(0..idx.len())];
            if i != j && i != -j {
                return GenLabel::long(i, j, Elem(rng.gen_range(0..n)));
            }
        }
    }

    /// A product of `1..=max_len` random generators.
    pub fn random_gens<R: rand::Rng>(&self, rng: &mut R, max_len: usize) -> Vec<Gen> {
        let len = rng.gen_range(1..=max_len.max(1));
        (0..len).map(|_| Gen { label: self.random_label(rng), exp: if rng.gen_bool(0.5) { 1 } else { -1 } }).collect()
    }

    pub fn random_vector<R: rand::Rng>(&self, rng: &mut R) -> Vector {
        let n = self.ring().size() as u32;
        Vector((0..self.dim()).map(|_| Elem(rng.gen_range(0..n))).collect())
    }

    /// Random `v` with `⟨u, v⟩ = 0`, by rejection.
    pub fn random_orthogonal<R: rand::Rng>(&self, rng: &mut R, u: &Vector) -> Vector {
        for _ in 0..10_000 {
            let v = self.random_vector(rng);
            if self.bil(u, &v).0 == 0 {
                return v;
            }
        }
        self.zero()
    }

    /// Random `u` with `q(u) = 0`, by rejection.
    pub fn random_isotropic<R: rand::Rng>(&self, rng: &mut R) -> Vector {
        for _ in 0..10_000 {
            let u = self.random_vector(rng);
            if self.q_form(&u).0 == 0 {
                return u;
            }
        }
        self.zero()
    }

    /// Closure of the elementary generators under multiplication.
    pub fn enumerate_group(&self) -> Result<Vec<OrthoMap>> {
        self.enumerate_group_bounded(DEFAULT_CLOSURE_BOUND)
    }

    pub fn enumerate_group_bounded(&self, bound: usize) -> Result<Vec<OrthoMap>> {
        let gens: Vec<Gen> = self.elementary_generators().into_iter().filter(|g| g.exp == 1).collect();
        let id = Mat::identity(self.ring(), self.dim());
        let mut seen: HashSet<Mat> = HashSet::new();
        seen.insert(id.clone());
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let mut y = x.clone();
                self.left_mul_gen(g, &mut y);
                if !seen.contains(&y) {
                    if out.len() >= bound {
                        return Err(Error::EnumerationBound { count: out.len() as u128 + 1, bound: bound as u128 });
                    }
                    seen.insert(y.clone());
                    out.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(out.into_iter().map(OrthoMap).collect())
    }

    /// Every matrix preserving `q`, found by brute force; tiny spaces only.
    pub fn enumerate_orthogonal_bruteforce(&self) -> Result<Vec<OrthoMap>> {
        let d = self.dim();
        let n = self.ring().size() as u128;
        let count = n.pow((d * d) as u32);
        if count > 1_000_000 {
            return Err(Error::EnumerationBound { count, bound: 1_000_000 });
        }
        let cols: Vec<Vector> = self.enumerate_vectors()?.collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; d];
        'outer: loop {
            let m = Mat::from_columns(&choice.iter().map(|&k| cols[k].clone()).collect::<Vec<_>>());
            if self.is_orthogonal(&m) {
                out.push(OrthoMap(m));
            }
            for slot in choice.iter_mut().rev() {
                *slot += 1;
                if *slot < cols.len() {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
        Ok(out)
    }
}

/// Orbit of a start vector with a generator word for each member.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    start: Vector,
    index: HashMap<Vector, usize>,
    vectors: Vec<Vector>,
    /// `witnesses[k]` = `[g_1, …, g_m]` with `g_1 ⋯ g_m · start = vectors[k]`.
    witnesses: Vec<Vec<Gen>>,
}

impl OrbitTable {
    pub fn start(&self) -> &Vector {
        &self.start
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.index.contains_key(v)
    }

    pub fn witness(&self, v: &Vector) -> Option<&[Gen]> {
        self.index.get(v).map(|&k| self.witnesses[k].as_slice())
    }

    /// Members in BFS order.
    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    /// Members sorted by coordinates.
    pub fn sorted_vectors(&self) -> Vec<Vector> {
        let mut v = self.vectors.clone();
        v.sort();
        v
    }

    fn spot_check(&self, space: &QuadSpace) -> Result<()> {
        let n = self.vectors.len();
        let picks = [0, n / 3, n / 2, n.saturating_sub(1)];
        for &k in &picks {
            let got = space.apply_gens(self.witnesses[k].iter(), &self.start);
            if got != self.vectors[k] {
                return Err(Error::Precondition(format!("orbit witness {k} does not reach its vector")));
            }
        }
        Ok(())
    }

    /// `{"vector": [...], "witness": [...]}` entries, sorted by vector.
    pub fn to_json(&self, space: &QuadSpace) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .sorted_vectors()
            .iter()
            .map(|v| {
                let w: Vec<serde_json::Value> = self
                    .witness(v)
                    .unwrap()
                    .iter()
                    .map(|g| {
                        let label = if g.exp < 0 { g.label.negated(space) } else { g.label.clone() };
                        label.to_json(space)
                    })
                    .collect();
                serde_json::json!({"vector": space.vector_json(v), "witness": w})
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Which `u` the exhaustive ESD identity sweep ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EsdSweepDomain {
    /// Every isotropic vector.
    AllIsotropic,
    /// `u = e_i·a` only.
    BasisSupported,
}

/// Per-identity instance and failure counters.
#[derive(Default)]
struct EsdTally {
    counts: [u64; 6],
    failures: Vec<serde_json::Value>,
}

const LEMMA1_NAMES: [&str; 6] = ["additivity", "scaling", "conjugation", "symmetry", "trivial", "orthogonal"];

impl EsdTally {
    fn check(&mut self, k: usize, ok: bool, detail: impl FnOnce() -> serde_json::Value) {
        self.counts[k] += 1;
        if !ok {
            let mut d = detail();
            d["identity"] = serde_json::Value::from(LEMMA1_NAMES[k]);
            self.failures.push(d);
        }
    }

    fn merge(&mut self, other: EsdTally) {
        for k in 0..6 {
            self.counts[k] += other.counts[k];
        }
        self.failures.extend(other.failures);
    }
}

impl QuadSpace {
    /// The five ESD identities for one `(u, v)` plus orthogonality.
    /// `v2s` are partners for additivity, `gs` conjugating words.
    fn lemma1_at(&self, u: &Vector, v: &Vector, v2s: &[Vector], gs: &[Vec<Gen>], tally: &mut EsdTally) {
        let r = self.ring();
        let t = self.esd_unchecked(u, v);
        let ctx = || serde_json::json!({"u": self.vector_json(u), "v": self.vector_json(v)});
        for v2 in v2s {
            let lhs = t.compose(self, &self.esd_unchecked(u, v2));
            let rhs = self.esd_unchecked(u, &self.add(v, v2));
            tally.check(0, lhs == rhs, || {
                let mut d = ctx();
                d["v2"] = self.vector_json(v2);
                d
            });
        }
        for a in r.elements() {
            let lhs = self.esd_unchecked(&self.scale(u, a), v);
            let rhs = self.esd_unchecked(u, &self.scale(v, a));
            tally.check(1, lhs == rhs, || {
                let mut d = ctx();
                d["a"] = r.to_json(a);
                d
            });
        }
        for g in gs {
            let gm = self.eval_gens(g.iter());
            let ginv: Vec<Gen> = g.iter().rev().map(Gen::inverse).collect();
            let lhs = gm.compose(self, &t).compose(self, &self.eval_gens(ginv.iter()));
            let rhs = self.esd_unchecked(&gm.apply(self, u), &gm.apply(self, v));
            tally.check(2, lhs == rhs, || {
                let mut d = ctx();
                d["g"] = serde_json::Value::Array(g.iter().map(|x| x.label.to_json(self)).collect());
                d
            });
        }
        if self.q_form(v).0 == 0 {
            let rhs = self.esd_unchecked(v, &self.neg(u));
            tally.check(3, t == rhs, ctx);
        }
        tally.check(5, self.is_orthogonal(t.mat()), ctx);
    }

    fn lemma1_trivial(&self, u: &Vector, tally: &mut EsdTally) {
        for a in self.ring().elements() {
            let ok = self.esd_unchecked(u, &self.scale(u, a)).is_identity(self);
            tally.check(4, ok, || serde_json::json!({"u": self.vector_json(u), "a": self.ring().to_json(a)}));
        }
    }
}

/// Exhaustive ESD identity sweep. Additivity partners run over all of `u^⊥`
/// when `|u^⊥|² ≤ pair_cap`, otherwise over a seeded sample of that size;
/// conjugation uses `conj_per_pair` random products of at most four
/// generators.
pub fn verify_lemma1_exhaustive(
    space: &QuadSpace,
    domain: EsdSweepDomain,
    pair_cap: usize,
    conj_per_pair: usize,
    seed: u64,
    exec: crate::exec::Exec,
) -> Result<crate::report::SuiteReport> {
    let start = std::time::Instant::now();
    let r = space.ring();
    let all: Vec<Vector> = space.enumerate_vectors()?.collect();
    let us: Vec<Vector> = match domain {
        EsdSweepDomain::AllIsotropic => all.iter().filter(|v| space.q_form(v).0 == 0).cloned().collect(),
        EsdSweepDomain::BasisSupported => {
            let mut v: Vec<Vector> =
                space.hyp_indices().iter().flat_map(|&i| r.elements().map(move |a| (i, a))).map(|(i, a)| space.scale(&space.e(i), a)).collect();
            v.sort();
            v.dedup();
            v
        }
    };
    let tallies = exec.map_range(us.len(), |k| {
        let u = &us[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let perp: Vec<Vector> = all.iter().filter(|v| space.bil(u, v).0 == 0).cloned().collect();
        let mut tally = EsdTally::default();
        space.lemma1_trivial(u, &mut tally);
        let exhaustive_pairs = perp.len() * perp.len() <= pair_cap;
        let per_v = if exhaustive_pairs { perp.len() } else { (pair_cap / perp.len().max(1)).max(1) };
        for v in &perp {
            let v2s: Vec<Vector> = if exhaustive_pairs {
                perp.clone()
            } else {
                (0..per_v).map(|_| perp[rand::Rng::gen_range(&mut rng, 0..perp.len())].clone()).collect()
            };
            let gs: Vec<Vec<Gen>> = (0..conj_per_pair).map(|_| space.random_gens(&mut rng, 4)).collect();
            space.lemma1_at(u, v, &v2s, &gs, &mut tally);
        }
        (tally, exhaustive_pairs)
    });
    let mut total = EsdTally::default();
    let mut all_pairs = true;
    for (t, ex) in tallies {
        total.merge(t);
        all_pairs &= ex;
    }
    let mut rep = crate::report::SuiteReport::new(
        "verify-lemma1",
        serde_json::json!({
            "ring": r.spec().to_string(), "ell": space.ell(), "r": space.r(), "mode": "exhaustive",
            "domain": domain, "pair_cap": pair_cap, "conj_per_pair": conj_per_pair, "seed": seed,
        }),
    );
    rep.set("u_count", us.len());
    rep.set("additivity_pairs_exhaustive", all_pairs);
    finish_lemma1(&mut rep, total);
    rep.time("total", start);
    Ok(rep)
}

/// ESD identities on seeded random instances.
pub fn verify_lemma1_sampled(
    space: &QuadSpace,
    samples: u64,
    seed: u64,
    exec: crate::exec::Exec,
) -> crate::report::SuiteReport {
    let start = std::time::Instant::now();
    let tallies = exec.map_range(samples as usize, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let u = space.random_isotropic(&mut rng);
        let v = space.random_orthogonal(&mut rng, &u);
        let v2 = space.random_orthogonal(&mut rng, &u);
        let g = space.random_gens(&mut rng, 4);
        let mut tally = EsdTally::default();
        space.lemma1_at(&u, &v, &[v2], &[g], &mut tally);
        space.lemma1_trivial(&u, &mut tally);
        // an isotropic partner for the symmetry identity
        for _ in 0..200 {
            let w = space.random_orthogonal(&mut rng, &u);
            if space.q_form(&w).0 == 0 {
                let lhs = space.esd_unchecked(&u, &w);
                let rhs = space.esd_unchecked(&w, &space.neg(&u));
                tally.check(3, lhs == rhs, || serde_json::json!({"u": space.vector_json(&u), "v": space.vector_json(&w)}));
                break;
            }
        }
        tally
    });
    let mut total = EsdTally::default();
    for t in tallies {
        total.merge(t);
    }
    let mut rep = crate::report::SuiteReport::new(
        "verify-lemma1",
        serde_json::json!({
            "ring": space.ring().spec().to_string(), "ell": space.ell(), "r": space.r(),
            "mode": "sampled", "samples": samples, "seed": seed,
        }),
    );
    finish_lemma1(&mut rep, total);
    rep.time("total", start);
    rep
}

fn finish_lemma1(rep: &mut crate::report::SuiteReport, total: EsdTally) {
    let mut per = serde_json::Map::new();
    for (k, name) in LEMMA1_NAMES.iter().enumerate() {
        per.insert(name.to_string(), serde_json::Value::from(total.counts[k]));
    }
    rep.instances_checked = total.counts.iter().sum();
    rep.set("instances", serde_json::Value::Object(per));
    for f in total.failures {
        rep.fail(f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

    fn f2() -> QuadSpace {
        QuadSpace::split(2, 3).unwrap()
    }

    #[test]
    fn orthogonality_examples() {
        for s in [f2(), QuadSpace::split(4, 3).unwrap(), QuadSpace::with_ints(Ring::zn(3).unwrap(), 3, 1, &[1]).unwrap()] {
            let d = s.dim();
            assert!(s.is_orthogonal(&Mat::identity(s.ring(), d)));
            // swap the pairs (e_{-1}, e_1) and (e_{-2}, e_2)
            let mut cols: Vec<Vector> = (0..d).map(|c| Mat::identity(s.ring(), d).column(c)).collect();
            cols.swap(s.pos(1), s.pos(2));
            cols.swap(s.pos(-1), s.pos(-2));
            assert!(s.is_orthogonal(&Mat::from_columns(&cols)));
            // e_1 -> e_1 + e_{-1} breaks isotropy
            let mut m = Mat::identity(s.ring(), d);
            m.set(s.pos(-1), s.pos(1), s.ring().one());
            assert!(!s.is_orthogonal(&m));
        }
    }

    #[test]
    fn esd_examples() {
        let s = QuadSpace::split(5, 3).unwrap();
        assert!(s.esd(&s.e(2), &s.zero()).unwrap().is_identity(&s));
        let t = s.esd(&s.e(1), &s.e(2)).unwrap();
        assert_eq!(t.apply(&s, &s.e(-2)), s.add(&s.e(-2), &s.e(1)));
        assert_eq!(t.apply(&s, &s.e(-1)), s.sub(&s.e(-1), &s.e(2)));
        for i in [-3, 1, 2, 3] {
            assert_eq!(t.apply(&s, &s.e(i)), s.e(i));
        }
        for a in s.ring().elements() {
            assert!(s.esd(&s.e(1), &s.scale(&s.e(1), a)).unwrap().is_identity(&s));
        }
        let bad = s.esd(&s.add(&s.e(1), &s.e(-1)), &s.zero());
        assert!(matches!(bad, Err(Error::Precondition(m)) if m.contains("q(u)")));
        let bad = s.esd(&s.e(1), &s.e(-1));
        assert!(matches!(bad, Err(Error::Precondition(m)) if m.contains("<u, v>")));
    }

    #[test]
    fn elementary_transvections() {
        let s = QuadSpace::split(4, 3).unwrap();
        assert!(s.t_long(1, 2, Elem(0)).unwrap().is_identity(&s));
        assert!(s.t_long(1, -1, Elem(1)).is_err());
        assert!(s.t_long(2, 2, Elem(1)).is_err());
        for a in s.ring().elements() {
            let t = s.t_long(1, 2, a).unwrap();
            assert_eq!(t, s.esd(&s.e(1), &s.scale(&s.e(-2), a)).unwrap());
            let na = s.ring().neg(a);
            assert_eq!(t, s.esd(&s.e(-2), &s.scale(&s.e(1), na)).unwrap());
        }
        let s = QuadSpace::with_ints(Ring::zn(3).unwrap(), 3, 1, &[1]).unwrap();
        let f1 = s.embed_m0(&[Elem(1)]);
        assert_eq!(s.t_short(1, &[Elem(1)]).unwrap(), s.esd(&s.e(-1), &s.neg(&f1)).unwrap());
    }

    #[test]
    fn sparse_action_matches_matrix() {
        let spaces = [
            QuadSpace::with_ints(Ring::zn(4).unwrap(), 3, 1, &[1]).unwrap(),
            QuadSpace::with_ints(Ring::zn(5).unwrap(), 2, 2, &[1, 2, 3]).unwrap(),
        ];
        for s in spaces {
            let vs: Vec<Vector> = s.enumerate_vectors().unwrap().step_by(97).collect();
            let mut labels: Vec<GenLabel> = Vec::new();
            for (i, j) in s.canonical_roots() {
                labels.push(GenLabel::long(i, j, s.ring().from_i64(3)));
                labels.push(GenLabel::long(-j, -i, s.ring().from_i64(2)));
            }
            for j in s.hyp_indices() {
                let m: Vec<Elem> = (0..s.r()).map(|k| s.ring().from_i64(k as i64 + 1)).collect();
                labels.push(GenLabel::short(j, m));
            }
            for l in labels {
                for exp in [1i8, -1] {
                    let g = Gen { label: l.clone(), exp };
                    let lab = if exp < 0 { l.negated(&s) } else { l.clone() };
                    let t = s.transvection(&lab);
                    for v in &vs {
                        let mut w = v.clone();
                        s.apply_gen(&g, &mut w.0);
                        assert_eq!(w, t.apply(&s, v), "{g}");
                    }
                }
                // t(a) t(-a) = 1
                let prod = s.eval_gens([Gen::new(l.clone()), Gen::new(l.negated(&s))].iter());
                assert!(prod.is_identity(&s));
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let s = QuadSpace::split(3, 3).unwrap();
        assert!(s.decompose_esd(1, &s.zero()).unwrap().is_empty());
        let b = Elem(2);
        assert_eq!(s.decompose_esd(1, &s.scale(&s.e(2), b)).unwrap(), vec![GenLabel::long(1, -2, b)]);
        assert!(s.decompose_esd(1, &s.e(-1)).is_err());
    }

    #[test]
    fn decompose_exhaustive_f2() {
        let s = f2();
        let mut cases = 0;
        for i in s.hyp_indices() {
            for m in s.enumerate_vectors().unwrap() {
                if s.coord(&m, -i).0 != 0 {
                    continue;
                }
                cases += 1;
                let labels = s.decompose_esd(i, &m).unwrap();
                let gens: Vec<Gen> = labels.into_iter().map(Gen::new).collect();
                assert_eq!(s.eval_gens(gens.iter()), s.esd(&s.e(i), &m).unwrap());
            }
        }
        assert_eq!(cases, 6 * 32);
    }

    #[test]
    fn orbit_f2_is_nonzero_isotropic() {
        let s = f2();
        let orbit = s.orbit(&s.e(1)).unwrap();
        assert_eq!(orbit.len(), 35);
        let mut iso: Vec<Vector> =
            s.enumerate_vectors().unwrap().filter(|v| !v.is_zero() && s.q_form(v).0 == 0).collect();
        iso.sort();
        assert_eq!(orbit.sorted_vectors(), iso);
        for v in orbit.vectors() {
            assert_eq!(&s.apply_gens(orbit.witness(v).unwrap().iter(), &s.e(1)), v);
        }
        let w = orbit.witness(&s.e(2)).unwrap();
        assert_eq!(s.eval_gens(w.iter()).apply(&s, &s.e(1)), s.e(2));
        assert_eq!(s.orbit(&s.zero()).unwrap().len(), 1);
    }

    #[test]
    fn orbit_contains_e2_over_several_rings() {
        for s in [QuadSpace::split(4, 3).unwrap(), QuadSpace::split(6, 3).unwrap(), QuadSpace::with_ints(Ring::parse("Z/2 x Z/3").unwrap(), 3, 1, &[1]).unwrap()] {
            let orbit = s.orbit(&s.e(1)).unwrap();
            let w = orbit.witness(&s.e(2)).expect("e2 in orbit");
            assert_eq!(s.eval_gens(w.iter()).apply(&s, &s.e(1)), s.e(2));
            assert_eq!(s.apply_gens_inverse(w.iter(), &s.e(2)), s.e(1));
        }
    }

    #[test]
    fn group_closure() {
        let s = QuadSpace::split(2, 1).unwrap();
        let g = s.enumerate_group().unwrap();
        assert_eq!(g.len(), 1);
        let s = QuadSpace::split(2, 2).unwrap();
        let g = s.enumerate_group().unwrap();
        assert!(g.iter().any(|x| x.is_identity(&s)));
        // Omega^+(4,2) = S3 x S3
        assert_eq!(g.len(), 36);
        for x in &g {
            assert!(s.is_orthogonal(x.mat()));
        }
    }

    #[test]
    fn orthogonality_cross_check_exhaustive() {
        let s = QuadSpace::split(2, 2).unwrap();
        for g in s.enumerate_group().unwrap() {
            assert!(s.preserves_q_exhaustive(g.mat()).unwrap());
        }
        let s = QuadSpace::split(2, 1).unwrap();
        let all = s.enumerate_orthogonal_bruteforce().unwrap();
        // O^+(2,2): identity and the swap e_{-1} <-> e_1
        assert_eq!(all.len(), 2);
        for g in &all {
            assert!(s.preserves_q_exhaustive(g.mat()).unwrap());
        }
    }

    #[test]
    fn lemma1_small() {
        let s = f2();
        let rep = verify_lemma1_exhaustive(&s, EsdSweepDomain::AllIsotropic, 1 << 20, 1, 5, crate::exec::Exec::Sequential).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
        assert_eq!(rep.results["u_count"], 36);
        let s = QuadSpace::with_ints(Ring::zn(4).unwrap(), 3, 1, &[1]).unwrap();
        let rep = verify_lemma1_sampled(&s, 300, 1, crate::exec::Exec::Sequential);
        assert!(rep.passed, "{:?}", rep.failures);
    }

    #[test]
    fn pair_orbit_f2() {
        let s = f2();
        let orbit = s.pair_orbit(&s.e(1), &s.e(2), 1 << 20).unwrap();
        // 35 isotropic points, 18 isotropic partners outside the line
        assert_eq!(orbit.len(), 35 * 18);
        for (u, v) in &orbit {
            assert_eq!(s.q_form(u).0, 0);
            assert_eq!(s.q_form(v).0, 0);
            assert_eq!(s.bil(u, v).0, 0);
        }
    }

    #[test]
    fn canonical_orientation() {
        let s = f2();
        assert!(s.canonical_root(1, 2));
        assert!(!s.canonical_root(-2, -1));
        assert_eq!(s.canonical_roots().len(), 12);
    }
}
