//! Steinberg words over `x_ij(a)` and `x_j(m)`, the nine relation schemas,
//! evaluation into the orthogonal group and conjugation by generators.

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::exec::Exec;
use crate::orthogroup::{Gen, GenLabel, OrthoMap};
use crate::quadmod::QuadSpace;
use crate::report::{Sampling, SuiteReport};
use crate::ring::Elem;
use crate::tc::{free_reduce, Presentation};

pub type SGen = Gen;

/// A free-group word in the Steinberg generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn gen(label: GenLabel) -> Word {
        Word(vec![Gen::new(label)])
    }

    pub fn gen_inv(label: GenLabel) -> Word {
        Word(vec![Gen { label, exp: -1 }])
    }

    pub fn long(i: i32, j: i32, a: Elem) -> Word {
        Word::gen(GenLabel::long(i, j, a))
    }

    pub fn short(j: i32, m: Vec<Elem>) -> Word {
        Word::gen(GenLabel::short(j, m))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn gens(&self) -> &[Gen] {
        &self.0
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn inv(&self) -> Word {
        Word(self.0.iter().rev().map(Gen::inverse).collect())
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inv()).mul(&b.inv())
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Word>) -> Word {
        let mut v = Vec::new();
        for p in parts {
            v.extend(p.0.iter().cloned());
        }
        Word(v)
    }

    pub fn to_json(&self, space: &QuadSpace) -> serde_json::Value {
        serde_json::Value::Array(
            self.0.iter().map(|g| serde_json::json!({"gen": g.label.to_json(space), "exp": g.exp})).collect(),
        )
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl QuadSpace {
    /// `x_ij(a)` rewritten to the canonical orientation of its root.
    pub fn orient(&self, label: &GenLabel) -> GenLabel {
        match label {
            GenLabel::Long { i, j, a } if !self.canonical_root(*i, *j) => GenLabel::long(-*j, -*i, self.ring().neg(*a)),
            other => other.clone(),
        }
    }

    /// Canonical orientation of long roots, exponents folded into
    /// parameters, adjacent generators on the same root merged, trivial
    /// generators dropped. Every output exponent is `+1`.
    pub fn normalize(&self, w: &Word) -> Word {
        let mut out: Vec<GenLabel> = Vec::with_capacity(w.len());
        for g in &w.0 {
            let label = if g.exp < 0 { g.label.negated(self) } else { g.label.clone() };
            let label = self.orient(&label);
            if label.is_trivial() {
                continue;
            }
            match out.last_mut() {
                Some(top) if same_root(top, &label) => {
                    let merged = self.add_params(top, &label);
                    if merged.is_trivial() {
                        out.pop();
                    } else {
                        *top = merged;
                    }
                }
                _ => out.push(label),
            }
        }
        Word(out.into_iter().map(Gen::new).collect())
    }

    fn add_params(&self, x: &GenLabel, y: &GenLabel) -> GenLabel {
        let r = self.ring();
        match (x, y) {
            (GenLabel::Long { i, j, a }, GenLabel::Long { a: b, .. }) => GenLabel::long(*i, *j, r.add(*a, *b)),
            (GenLabel::Short { j, m }, GenLabel::Short { m: m2, .. }) => {
                GenLabel::short(*j, m.iter().zip(m2).map(|(&u, &v)| r.add(u, v)).collect())
            }
            _ => unreachable!("same_root checked"),
        }
    }

    /// Evaluation `x_ij(a) ↦ t_ij(a)`, `x_j(m) ↦ t_j(m)`.
    pub fn phi(&self, w: &Word) -> OrthoMap {
        self.eval_gens(w.0.iter())
    }

    /// Evaluation at level `s`: parameters are read as `a^(s)` and sent to
    /// `t(a·s)`.
    pub fn phi_at_level(&self, w: &Word, s: Elem) -> OrthoMap {
        let scaled: Vec<Gen> = w.0.iter().map(|g| Gen { label: self.scale_label(&g.label, s), exp: g.exp }).collect();
        self.eval_gens(scaled.iter())
    }

    pub fn scale_label(&self, label: &GenLabel, s: Elem) -> GenLabel {
        let r = self.ring();
        match label {
            GenLabel::Long { i, j, a } => GenLabel::long(*i, *j, r.mul(*a, s)),
            GenLabel::Short { j, m } => GenLabel::short(*j, m.iter().map(|&x| r.mul(x, s)).collect()),
        }
    }

    /// Conjugate `g·w·g⁻¹`, rewritten generator by generator with the
    /// action formulas; pairs of opposite roots fall back to the formal
    /// conjugate.
    pub fn act_elementary(&self, g: &GenLabel, w: &Word) -> Word {
        let lvl = Level::ONE;
        let mut out = Vec::new();
        for h in &w.0 {
            let piece = match self.conj_case(g, &h.label) {
                ConjCase::Fixed => Word::gen(h.label.clone()),
                ConjCase::Opposite => Word(vec![Gen::new(g.clone()), Gen::new(h.label.clone()), Gen::new(g.clone()).inverse()]),
                c => self.conj_word(&c, lvl),
            };
            let piece = if h.exp < 0 { piece.inv() } else { piece };
            out.extend(piece.0);
        }
        Word(out)
    }

    /// Rewritten conjugate for one of the four nontrivial formula shapes.
    /// `g` has a plain parameter and `h` one at level `lvl`, so only
    /// `q(m^(s))` picks up the level.
    pub fn conj_word(&self, c: &ConjCase, lvl: Level) -> Word {
        let r = self.ring();
        let scale = |m: &[Elem], a: Elem| -> Vec<Elem> { m.iter().map(|&x| r.mul(x, a)).collect() };
        match c {
            ConjCase::LongLong { i, j, k, a, b } => Word::long(*i, *k, r.mul(*a, *b)).mul(&Word::long(*j, *k, *b)),
            ConjCase::LongShort { i, j, a, m } => Word::concat([
                &Word::long(-*i, *j, r.mul(lvl.q(self, m), *a)),
                &Word::short(*j, scale(m, r.neg(*a))),
                &Word::short(*i, m.clone()),
            ]),
            ConjCase::ShortShort { i, j, m, mp } => {
                Word::long(-*i, *j, r.neg(self.bil_m0(m, mp))).mul(&Word::short(*j, mp.clone()))
            }
            ConjCase::ShortLong { i, j, m, a } => Word::concat([
                &Word::long(-*i, *j, r.neg(r.mul(self.q0_form(m), *a))),
                &Word::short(*j, scale(m, *a)),
                &Word::long(*i, *j, *a),
            ]),
            ConjCase::Fixed | ConjCase::Opposite => unreachable!("no rewriting formula"),
        }
    }

    /// Which action formula describes `g·h·g⁻¹`, with both labels turned to
    /// the orientation the formula expects.
    pub fn conj_case(&self, g: &GenLabel, h: &GenLabel) -> ConjCase {
        let r = self.ring();
        match (g, h) {
            (GenLabel::Long { i, j, a }, GenLabel::Long { i: k, j: l, a: b }) => {
                let (i, j, k, l) = (*i, *j, *k, *l);
                if (k, l) == (i, j) || (k, l) == (-j, -i) {
                    return ConjCase::Fixed;
                }
                if (k, l) == (j, i) || (k, l) == (-i, -j) {
                    return ConjCase::Opposite;
                }
                let gs = [(i, j, *a), (-j, -i, r.neg(*a))];
                let hs = [(k, l, *b), (-l, -k, r.neg(*b))];
                for &(gi, gj, ga) in &gs {
                    for &(hk, hl, hb) in &hs {
                        if hk == gj && hl == -gi {
                            return ConjCase::Fixed;
                        }
                        if hk == gj && hl != gi {
                            return ConjCase::LongLong { i: gi, j: gj, k: hl, a: ga, b: hb };
                        }
                    }
                }
                if i != l && l != -j && j != k && k != -i {
                    ConjCase::Fixed
                } else {
                    ConjCase::Opposite
                }
            }
            (GenLabel::Long { i, j, a }, GenLabel::Short { j: k, m }) => {
                if *k == *i {
                    ConjCase::LongShort { i: *i, j: *j, a: *a, m: m.clone() }
                } else if *k == -*j {
                    ConjCase::LongShort { i: -*j, j: -*i, a: r.neg(*a), m: m.clone() }
                } else {
                    ConjCase::Fixed
                }
            }
            (GenLabel::Short { j: i, m }, GenLabel::Short { j, m: mp }) => {
                if *j == *i {
                    ConjCase::Fixed
                } else if *j == -*i {
                    ConjCase::Opposite
                } else {
                    ConjCase::ShortShort { i: *i, j: *j, m: m.clone(), mp: mp.clone() }
                }
            }
            (GenLabel::Short { j: i, m }, GenLabel::Long { i: hj, j: hk, a }) => {
                if *hj == *i {
                    ConjCase::ShortLong { i: *i, j: *hk, m: m.clone(), a: *a }
                } else if *hk == -*i {
                    ConjCase::ShortLong { i: *i, j: -*hj, m: m.clone(), a: r.neg(*a) }
                } else {
                    ConjCase::Fixed
                }
            }
        }
    }
}

fn same_root(x: &GenLabel, y: &GenLabel) -> bool {
    match (x, y) {
        (GenLabel::Long { i, j, .. }, GenLabel::Long { i: k, j: l, .. }) => i == k && j == l,
        (GenLabel::Short { j, .. }, GenLabel::Short { j: k, .. }) => j == k,
        _ => false,
    }
}

/// Shape of a conjugation `g·h·g⁻¹` of two generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConjCase {
    /// `h` is unchanged.
    Fixed,
    /// Opposite roots: no formula.
    Opposite,
    /// `g = x_ij(a)`, `h = x_jk(b)`.
    LongLong { i: i32, j: i32, k: i32, a: Elem, b: Elem },
    /// `g = x_ij(a)`, `h = x_i(m)`.
    LongShort { i: i32, j: i32, a: Elem, m: Vec<Elem> },
    /// `g = x_i(m)`, `h = x_j(m')`, `i ≠ ±j`.
    ShortShort { i: i32, j: i32, m: Vec<Elem>, mp: Vec<Elem> },
    /// `g = x_i(m)`, `h = x_ij(a)`.
    ShortLong { i: i32, j: i32, m: Vec<Elem>, a: Elem },
}

/// Multiplication in the homotope at level `s`: `a^(s) b^(s) = (abs)^(s)`,
/// `⟨m^(s), m'^(s)⟩ = (⟨m,m'⟩ s)^(s)`, `q(m^(s)) = (q(m) s)^(s)`,
/// `m^(s) a^(s) = (mas)^(s)`. Level one is the ring itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Level(Option<Elem>);

impl Level {
    pub const ONE: Level = Level(None);

    pub fn s(self, space: &QuadSpace) -> Elem {
        self.0.unwrap_or_else(|| space.ring().one())
    }

    pub fn of(s: Elem) -> Level {
        Level(Some(s))
    }

    pub fn mul(self, space: &QuadSpace, a: Elem, b: Elem) -> Elem {
        let r = space.ring();
        r.mul(r.mul(a, b), self.s(space))
    }

    pub fn bil(self, space: &QuadSpace, m: &[Elem], mp: &[Elem]) -> Elem {
        space.ring().mul(space.bil_m0(m, mp), self.s(space))
    }

    pub fn q(self, space: &QuadSpace, m: &[Elem]) -> Elem {
        space.ring().mul(space.q0_form(m), self.s(space))
    }

    pub fn smul(self, space: &QuadSpace, m: &[Elem], a: Elem) -> Vec<Elem> {
        let r = space.ring();
        let c = r.mul(a, self.s(space));
        m.iter().map(|&x| r.mul(x, c)).collect()
    }
}

/// The nine defining relation schemas, in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Schema {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ParamKind {
    Scalar,
    Module,
}

impl Schema {
    pub const ALL: [Schema; 9] =
        [Schema::R1, Schema::R2, Schema::R3, Schema::R4, Schema::R5, Schema::R6, Schema::R7, Schema::R8, Schema::R9];

    pub fn name(self) -> &'static str {
        ["R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9"][self as usize]
    }

    pub fn parse(s: &str) -> Option<Schema> {
        Schema::ALL.iter().copied().find(|x| x.name().eq_ignore_ascii_case(s.trim()))
    }

    fn params(self) -> &'static [ParamKind] {
        use ParamKind::*;
        match self {
            Schema::R1 | Schema::R4 | Schema::R5 | Schema::R6 => &[Scalar, Scalar],
            Schema::R2 => &[Scalar],
            Schema::R3 | Schema::R7 => &[Module, Module],
            Schema::R8 | Schema::R9 => &[Module, Scalar],
        }
    }

    /// Index tuples satisfying the side conditions.
    fn tuples(self, space: &QuadSpace) -> Vec<Vec<i32>> {
        let idx = space.hyp_indices();
        let ne = |x: i32, y: i32| x != y && x != -y;
        let mut out = Vec::new();
        match self {
            Schema::R3 => {
                for &i in &idx {
                    out.push(vec![i]);
                }
            }
            Schema::R1 | Schema::R2 | Schema::R5 | Schema::R7 | Schema::R9 => {
                for &i in &idx {
                    for &j in &idx {
                        if ne(i, j) {
                            out.push(vec![i, j]);
                        }
                    }
                }
            }
            Schema::R6 => {
                for &i in &idx {
                    for &j in &idx {
                        for &k in &idx {
                            if ne(i, j) && ne(j, k) && ne(i, k) {
                                out.push(vec![i, j, k]);
                            }
                        }
                    }
                }
            }
            Schema::R8 => {
                for &i in &idx {
                    for &j in &idx {
                        for &k in &idx {
                            if ne(j, k) && j != i && i != -k {
                                out.push(vec![i, j, k]);
                            }
                        }
                    }
                }
            }
            Schema::R4 => {
                for &i in &idx {
                    for &j in &idx {
                        for &k in &idx {
                            for &l in &idx {
                                // j ≠ k ≠ −i ≠ −l ≠ j
                                if ne(i, j) && ne(k, l) && j != k && k != -i && i != l && l != -j {
                                    out.push(vec![i, j, k, l]);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// All instances of one schema, addressable by index.
pub struct RelationFamily<'a> {
    space: &'a QuadSpace,
    schema: Schema,
    level: Level,
    tuples: Vec<Vec<i32>>,
    sizes: Vec<u128>,
}

impl<'a> RelationFamily<'a> {
    pub fn new(space: &'a QuadSpace, schema: Schema, level: Level) -> RelationFamily<'a> {
        let n = space.ring().size() as u128;
        let sizes = schema
            .params()
            .iter()
            .map(|k| match k {
                ParamKind::Scalar => n,
                ParamKind::Module => n.pow(space.r() as u32),
            })
            .collect();
        RelationFamily { space, schema, level, tuples: schema.tuples(space), sizes }
    }

    pub fn schema(&self) -> Schema {
        self.schema
    }

    pub fn count(&self) -> u128 {
        self.tuples.len() as u128 * self.sizes.iter().product::<u128>()
    }

    fn decode(&self, k: u128) -> (&[i32], Vec<u128>) {
        let t = (k % self.tuples.len() as u128) as usize;
        let mut rest = k / self.tuples.len() as u128;
        let mut ps = Vec::with_capacity(self.sizes.len());
        for &s in &self.sizes {
            ps.push(rest % s);
            rest /= s;
        }
        (&self.tuples[t], ps)
    }

    fn module_param(&self, mut code: u128) -> Vec<Elem> {
        let n = self.space.ring().size() as u128;
        let mut m = vec![Elem(0); self.space.r()];
        for slot in m.iter_mut().rev() {
            *slot = Elem((code % n) as u32);
            code /= n;
        }
        m
    }

    /// Relator `LHS · RHS⁻¹` of instance `k`.
    pub fn instance(&self, k: u128) -> Word {
        let (t, ps) = self.decode(k);
        let sp = self.space;
        let r = sp.ring();
        let lvl = self.level;
        let sc = |x: u128| Elem(x as u32);
        let mo = |x: u128| self.module_param(x);
        match self.schema {
            Schema::R1 => {
                let (i, j, a, b) = (t[0], t[1], sc(ps[0]), sc(ps[1]));
                Word::long(i, j, r.add(a, b)).mul(&Word::long(i, j, a).mul(&Word::long(i, j, b)).inv())
            }
            Schema::R2 => {
                let (i, j, a) = (t[0], t[1], sc(ps[0]));
                Word::long(i, j, a).mul(&Word::long(-j, -i, r.neg(a)).inv())
            }
            Schema::R3 => {
                let (i, m, mp) = (t[0], mo(ps[0]), mo(ps[1]));
                let sum: Vec<Elem> = m.iter().zip(&mp).map(|(&x, &y)| r.add(x, y)).collect();
                Word::short(i, sum).mul(&Word::short(i, m).mul(&Word::short(i, mp)).inv())
            }
            Schema::R4 => {
                let (i, j, k, l, a, b) = (t[0], t[1], t[2], t[3], sc(ps[0]), sc(ps[1]));
                Word::commutator(&Word::long(i, j, a), &Word::long(k, l, b))
            }
            Schema::R5 => {
                let (i, j, a, b) = (t[0], t[1], sc(ps[0]), sc(ps[1]));
                Word::commutator(&Word::long(i, j, a), &Word::long(j, -i, b))
            }
            Schema::R6 => {
                let (i, j, k, a, b) = (t[0], t[1], t[2], sc(ps[0]), sc(ps[1]));
                Word::commutator(&Word::long(i, j, a), &Word::long(j, k, b))
                    .mul(&Word::long(i, k, lvl.mul(sp, a, b)).inv())
            }
            Schema::R7 => {
                let (i, j, m, mp) = (t[0], t[1], mo(ps[0]), mo(ps[1]));
                let rhs = Word::long(-i, j, r.neg(lvl.bil(sp, &m, &mp)));
                Word::commutator(&Word::short(i, m), &Word::short(j, mp)).mul(&rhs.inv())
            }
            Schema::R8 => {
                let (i, j, k, m, a) = (t[0], t[1], t[2], mo(ps[0]), sc(ps[1]));
                Word::commutator(&Word::short(i, m), &Word::long(j, k, a))
            }
            Schema::R9 => {
                let (i, j, m, a) = (t[0], t[1], mo(ps[0]), sc(ps[1]));
                let rhs = Word::long(-i, j, r.neg(lvl.mul(sp, lvl.q(sp, &m), a))).mul(&Word::short(j, lvl.smul(sp, &m, a)));
                Word::commutator(&Word::short(i, m), &Word::long(i, j, a)).mul(&rhs.inv())
            }
        }
    }

    /// Parameters of instance `k` for failure reports.
    pub fn describe(&self, k: u128) -> serde_json::Value {
        let (t, ps) = self.decode(k);
        let params: Vec<serde_json::Value> = ps
            .iter()
            .zip(self.schema.params())
            .map(|(&p, kind)| match kind {
                ParamKind::Scalar => self.space.ring().to_json(Elem(p as u32)),
                ParamKind::Module => {
                    serde_json::Value::Array(self.module_param(p).iter().map(|&x| self.space.ring().to_json(x)).collect())
                }
            })
            .collect();
        serde_json::json!({"schema": self.schema.name(), "indices": t, "params": params})
    }

    /// Every instance, in index order.
    pub fn all(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.count()).map(move |k| self.instance(k))
    }
}

/// Checks that every selected relator instance evaluates to the identity,
/// at level `s` (`Level::ONE` for the plain group).
pub fn verify_relations(
    space: &QuadSpace,
    schemas: &[Schema],
    level: Level,
    sampling: Sampling,
    exec: Exec,
) -> SuiteReport {
    let start = Instant::now();
    let mut rep = SuiteReport::new(
        "verify-relations",
        serde_json::json!({
            "ring": space.ring().spec().to_string(), "ell": space.ell(), "r": space.r(),
            "level": space.ring().to_json(level.s(space)),
            "sampling": sampling,
        }),
    );
    let s = level.s(space);
    let mut per_schema = serde_json::Map::new();
    for &schema in schemas {
        let fam = RelationFamily::new(space, schema, level);
        let count = fam.count();
        let picks = sampling.select(count, schema as u64);
        let bad: Vec<u128> = exec.filter_map(&picks, |&k| {
            let w = fam.instance(k);
            (!space.phi_at_level(&w, s).is_identity(space)).then_some(k)
        });
        rep.instances_checked += picks.len() as u64;
        for &k in &bad {
            rep.fail(fam.describe(k));
        }
        per_schema.insert(
            schema.name().into(),
            serde_json::json!({
                "instances": count.to_string(),
                "checked": picks.len(),
                "exhaustive": sampling.is_exhaustive_for(count),
                "failures": bad.len(),
            }),
        );
    }
    rep.set("schemas", serde_json::Value::Object(per_schema));
    rep.time("total", start);
    rep
}

/// Generators of the Steinberg presentation used for coset enumeration:
/// canonically oriented long roots and short roots with nonzero parameter.
#[derive(Clone, Debug)]
pub struct StAlphabet {
    labels: Vec<GenLabel>,
    index: HashMap<GenLabel, u32>,
}

impl StAlphabet {
    pub fn new(space: &QuadSpace) -> StAlphabet {
        let r = space.ring();
        let mut labels = Vec::new();
        for (i, j) in space.canonical_roots() {
            for a in r.elements().skip(1) {
                labels.push(GenLabel::long(i, j, a));
            }
        }
        for j in space.hyp_indices() {
            for m in space.enumerate_m0().skip(1) {
                labels.push(GenLabel::short(j, m.0));
            }
        }
        let index = labels.iter().enumerate().map(|(k, l)| (l.clone(), k as u32)).collect();
        StAlphabet { labels, index }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[GenLabel] {
        &self.labels
    }

    pub fn index_of(&self, space: &QuadSpace, label: &GenLabel) -> Option<u32> {
        self.index.get(&space.orient(label)).copied()
    }

    /// Letters `2k` / `2k+1` for generator `k` and its inverse, freely
    /// reduced. Trivial generators vanish.
    pub fn letters(&self, space: &QuadSpace, w: &Word) -> Vec<u32> {
        let mut out = Vec::with_capacity(w.len());
        for g in &w.0 {
            let label = space.orient(&g.label);
            if label.is_trivial() {
                continue;
            }
            let k = self.index[&label];
            out.push(2 * k + u32::from(g.exp < 0));
        }
        free_reduce(&out)
    }

    pub fn letters_to_word(&self, letters: &[u32]) -> Word {
        Word(
            letters
                .iter()
                .map(|&x| Gen { label: self.labels[(x / 2) as usize].clone(), exp: if x % 2 == 0 { 1 } else { -1 } })
                .collect(),
        )
    }
}

/// Finite presentation of the Steinberg group from every relation instance.
pub fn st_presentation(space: &QuadSpace) -> (Presentation, StAlphabet) {
    let alpha = StAlphabet::new(space);
    let mut rels: Vec<Vec<u32>> = Vec::new();
    for schema in Schema::ALL {
        let fam = RelationFamily::new(space, schema, Level::ONE);
        for w in fam.all() {
            rels.push(alpha.letters(space, &w));
        }
    }
    (Presentation::new(alpha.len(), rels), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z4r1() -> QuadSpace {
        QuadSpace::with_ints(Ring::zn(4).unwrap(), 3, 1, &[1]).unwrap()
    }

    pub(crate) fn random_label(space: &QuadSpace, rng: &mut ChaCha8Rng) -> GenLabel {
        let idx = space.hyp_indices();
        let n = space.ring().size() as u32;
        if space.r() > 0 && rng.gen_bool(0.3) {
            let j = idx[rng.gen_range(0..idx.len())];
            GenLabel::short(j, (0..space.r()).map(|_| Elem(rng.gen_range(0..n))).collect())
        } else {
            loop {
                let i = idx[rng.gen_range(0..idx.len())];
                let j = idx[rng.gen_range(0..idx.len())];
                if i != j && i != -j {
                    return GenLabel::long(i, j, Elem(rng.gen_range(0..n)));
                }
            }
        }
    }

    pub(crate) fn random_word(space: &QuadSpace, rng: &mut ChaCha8Rng, max_len: usize) -> Word {
        let len = rng.gen_range(0..=max_len);
        Word(
            (0..len)
                .map(|_| Gen { label: random_label(space, rng), exp: if rng.gen_bool(0.5) { 1 } else { -1 } })
                .collect(),
        )
    }

    #[test]
    fn word_plumbing() {
        let s = QuadSpace::split(5, 3).unwrap();
        let w = Word::long(1, 2, Elem(3)).mul(&Word::long(-1, 3, Elem(1)));
        assert!(s.normalize(&w.mul(&w.inv())).is_empty());
        assert_eq!(Word::empty().mul(&w), w);
        assert_eq!(w.inv().inv(), w);
    }

    #[test]
    fn normalize_examples() {
        let s = QuadSpace::split(5, 3).unwrap();
        let (a, b) = (Elem(2), Elem(4));
        assert_eq!(s.normalize(&Word::long(1, 2, a).mul(&Word::long(1, 2, b))), Word::long(1, 2, Elem(1)));
        assert!(s.normalize(&Word::long(1, 2, a).mul(&Word::long(1, 2, Elem(3)))).is_empty());
        assert_eq!(s.normalize(&Word::long(-2, -1, a)), Word::long(1, 2, Elem(3)));
        assert_eq!(s.normalize(&Word::gen_inv(GenLabel::long(1, 2, a))), Word::long(1, 2, Elem(3)));
    }

    #[test]
    fn phi_examples() {
        let s = z4r1();
        assert!(s.phi(&Word::empty()).is_identity(&s));
        assert_eq!(s.phi(&Word::long(1, 2, Elem(3))), s.t_long(1, 2, Elem(3)).unwrap());
        let w = Word::gen_inv(GenLabel::short(2, vec![Elem(1)]));
        assert_eq!(s.phi(&w), s.t_short(2, &[Elem(3)]).unwrap());
    }

    #[test]
    fn normalize_preserves_phi_and_is_idempotent() {
        let s = z4r1();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let w = random_word(&s, &mut rng, 30);
            let n = s.normalize(&w);
            assert_eq!(s.phi(&n), s.phi(&w));
            assert_eq!(s.normalize(&n), n);
        }
    }

    #[test]
    fn schema_examples() {
        let s = QuadSpace::split(2, 3).unwrap();
        // every (i, j, a, b) with i != ±j
        assert_eq!(RelationFamily::new(&s, Schema::R5, Level::ONE).count(), 24 * 4);
        let z4 = z4r1();
        let r7 = RelationFamily::new(&z4, Schema::R7, Level::ONE);
        assert_eq!(r7.count(), 24 * 16);
        assert_eq!(Schema::parse("r6"), Some(Schema::R6));
    }

    #[test]
    fn relations_hold_under_phi_small() {
        for s in [QuadSpace::split(2, 3).unwrap(), z4r1()] {
            let rep = verify_relations(&s, &Schema::ALL, Level::ONE, Sampling::exhaustive(), Exec::Sequential);
            assert!(rep.passed, "{:?}", rep.failures);
        }
    }

    #[test]
    fn relations_hold_at_levels() {
        let s = z4r1();
        for lvl in s.ring().elements() {
            let rep = verify_relations(&s, &Schema::ALL, Level::of(lvl), Sampling::exhaustive(), Exec::Sequential);
            assert!(rep.passed, "level {lvl:?}: {:?}", rep.failures);
        }
    }

    #[test]
    fn act_examples() {
        let s = QuadSpace::split(5, 3).unwrap();
        let (a, b) = (Elem(2), Elem(3));
        let got = s.act_elementary(&GenLabel::long(1, 2, a), &Word::long(2, 3, b));
        assert_eq!(got, Word::long(1, 3, Elem(1)).mul(&Word::long(2, 3, b)));
        let got = s.act_elementary(&GenLabel::long(1, 2, a), &Word::long(2, -1, b));
        assert_eq!(got, Word::long(2, -1, b));
    }

    #[test]
    fn act_matches_conjugation() {
        for s in [z4r1(), QuadSpace::with_ints(Ring::zn(5).unwrap(), 3, 2, &[1, 1, 2]).unwrap()] {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..1000 {
                let g = random_label(&s, &mut rng);
                let w = random_word(&s, &mut rng, 6);
                let lhs = s.phi(&s.act_elementary(&g, &w));
                let tg = s.transvection(&g);
                let rhs = tg.compose(&s, &s.phi(&w)).compose(&s, &s.transvection(&g.negated(&s)));
                assert_eq!(lhs, rhs, "g = {g}, w = {w}");
            }
        }
    }

    #[test]
    fn alphabet_translation() {
        let s = QuadSpace::split(2, 3).unwrap();
        let alpha = StAlphabet::new(&s);
        assert_eq!(alpha.len(), 12);
        let w = Word::long(-2, -1, Elem(1));
        let l = alpha.letters(&s, &w);
        assert_eq!(l.len(), 1);
        assert_eq!(alpha.labels()[(l[0] / 2) as usize], GenLabel::long(1, 2, Elem(1)));
        assert!(alpha.letters(&s, &w.mul(&w.inv())).is_empty());
    }
}
