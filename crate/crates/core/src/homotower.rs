//! Homotope algebras `K^(s)`, staged Steinberg words, transition maps
//! between stages, and the action of localized generators on a tower of
//! stages indexed by powers of a fixed `f`.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::mat::Mat;
use crate::orthogroup::{Gen, GenLabel, OrthoMap};
use crate::quadmod::{QuadSpace, Vector};
use crate::report::{Sampling, SuiteReport};
use crate::ring::{mod_inverse, prime_factors, Elem, Ring};
use crate::steinberg::{verify_relations, ConjCase, Level, Schema, Word};

/// `a^(s)`: an element of the `s`-homotope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HomotopeScalar {
    pub base: Elem,
    pub level: Elem,
}

/// `m^(s)`: an element of the `s`-homotope module.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HomotopeVector {
    pub base: Vector,
    pub level: Elem,
}

fn same_level(x: Elem, y: Elem) -> Result<()> {
    if x == y {
        Ok(())
    } else {
        Err(Error::Level(format!("levels {} and {} differ", x.0, y.0)))
    }
}

/// Arithmetic of `K^(s)` and `M^(s)`.
pub struct Homotope<'a> {
    pub space: &'a QuadSpace,
}

impl<'a> Homotope<'a> {
    pub fn new(space: &'a QuadSpace) -> Homotope<'a> {
        Homotope { space }
    }

    fn ring(&self) -> &Ring {
        self.space.ring()
    }

    pub fn scalar(&self, a: Elem, s: Elem) -> HomotopeScalar {
        HomotopeScalar { base: a, level: s }
    }

    pub fn add(&self, x: HomotopeScalar, y: HomotopeScalar) -> Result<HomotopeScalar> {
        same_level(x.level, y.level)?;
        Ok(self.scalar(self.ring().add(x.base, y.base), x.level))
    }

    pub fn neg(&self, x: HomotopeScalar) -> HomotopeScalar {
        self.scalar(self.ring().neg(x.base), x.level)
    }

    /// `a^(s) b^(s) = (abs)^(s)`.
    pub fn mul(&self, x: HomotopeScalar, y: HomotopeScalar) -> Result<HomotopeScalar> {
        same_level(x.level, y.level)?;
        let r = self.ring();
        Ok(self.scalar(r.mul(r.mul(x.base, y.base), x.level), x.level))
    }

    /// `a^(s) · b = (ab)^(s)` for `b ∈ K`.
    pub fn scale(&self, x: HomotopeScalar, b: Elem) -> HomotopeScalar {
        self.scalar(self.ring().mul(x.base, b), x.level)
    }

    pub fn vector(&self, m: Vector, s: Elem) -> HomotopeVector {
        HomotopeVector { base: m, level: s }
    }

    pub fn vadd(&self, x: &HomotopeVector, y: &HomotopeVector) -> Result<HomotopeVector> {
        same_level(x.level, y.level)?;
        Ok(self.vector(self.space.add(&x.base, &y.base), x.level))
    }

    /// `m^(s) a^(s) = (mas)^(s)`.
    pub fn vmul(&self, x: &HomotopeVector, a: HomotopeScalar) -> Result<HomotopeVector> {
        same_level(x.level, a.level)?;
        let c = self.ring().mul(a.base, x.level);
        Ok(self.vector(self.space.scale(&x.base, c), x.level))
    }

    /// `q(m^(s)) = (q(m) s)^(s)`.
    pub fn q(&self, x: &HomotopeVector) -> HomotopeScalar {
        self.scalar(self.ring().mul(self.space.q_form(&x.base), x.level), x.level)
    }

    /// `⟨m^(s), m'^(s)⟩ = (⟨m, m'⟩ s)^(s)`.
    pub fn bil(&self, x: &HomotopeVector, y: &HomotopeVector) -> Result<HomotopeScalar> {
        same_level(x.level, y.level)?;
        Ok(self.scalar(self.ring().mul(self.space.bil(&x.base, &y.base), x.level), x.level))
    }

    /// `K^(s s') → K^(s)`, `a^(s s') ↦ (a s')^(s)`.
    pub fn transition(&self, x: HomotopeScalar, s: Elem, sp: Elem) -> Result<HomotopeScalar> {
        same_level(x.level, self.ring().mul(s, sp))?;
        Ok(self.scalar(self.ring().mul(x.base, sp), s))
    }

    pub fn transition_vector(&self, x: &HomotopeVector, s: Elem, sp: Elem) -> Result<HomotopeVector> {
        same_level(x.level, self.ring().mul(s, sp))?;
        Ok(self.vector(self.space.scale(&x.base, sp), s))
    }
}

/// A Steinberg word whose parameters are read at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StagedWord {
    pub word: Word,
    pub level: Elem,
}

impl StagedWord {
    pub fn new(word: Word, level: Elem) -> StagedWord {
        StagedWord { word, level }
    }
}

/// `St^(s s') → St^(s)`: every parameter is multiplied by `s'`.
pub fn transition_word(space: &QuadSpace, w: &StagedWord, s: Elem, sp: Elem) -> Result<StagedWord> {
    same_level(w.level, space.ring().mul(s, sp))?;
    Ok(StagedWord::new(scale_word(space, &w.word, sp), s))
}

fn scale_word(space: &QuadSpace, w: &Word, c: Elem) -> Word {
    Word(w.0.iter().map(|g| Gen { label: space.scale_label(&g.label, c), exp: g.exp }).collect())
}

/// `x_ij(a^(s)) ↦ t_ij(a s)`, `x_j(m^(s)) ↦ t_j(m s)`.
pub fn ev_stage(space: &QuadSpace, w: &StagedWord) -> OrthoMap {
    space.phi_at_level(&w.word, w.level)
}

/// `x_ij(a / fⁿ)` or `x_i(m / fⁿ)`: `label` carries the numerator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalizedGen {
    pub label: GenLabel,
    pub n: u32,
}

/// Stages `K^(fᵏ s)` for a fixed `f`.
#[derive(Clone, Debug)]
pub struct Tower {
    pub space: QuadSpace,
    pub f: Elem,
}

impl Tower {
    pub fn new(space: QuadSpace, f: Elem) -> Tower {
        Tower { space, f }
    }

    fn fpow(&self, k: u32) -> Elem {
        self.space.ring().pow(self.f, k)
    }

    /// Input level `f^{2n} s'` for a generator with denominator `fⁿ`.
    pub fn input_level(&self, n: u32, sp: Elem) -> Elem {
        self.space.ring().mul(self.fpow(2 * n), sp)
    }

    /// `^g w` for `w` at level `f^{2n} s'`, as a word at level `s'`.
    /// Opposite roots have no formula and give `Error::Uncovered`.
    pub fn act_localized(&self, g: &LocalizedGen, w: &StagedWord, sp: Elem) -> Result<StagedWord> {
        let s = &self.space;
        let r = s.ring();
        g.label.validate(s)?;
        let want = self.input_level(g.n, sp);
        if w.level != want {
            return Err(Error::Level(format!(
                "word at level {} but the generator needs f^{}·s' = {}",
                r.fmt_elem(w.level),
                2 * g.n,
                r.fmt_elem(want)
            )));
        }
        let (f1, f2, f3) = (self.fpow(g.n), self.fpow(2 * g.n), self.fpow(3 * g.n));
        let sc = |m: &[Elem], c: Elem| -> Vec<Elem> { m.iter().map(|&x| r.mul(x, c)).collect() };
        let mut out = Vec::new();
        for h in &w.word.0 {
            let piece = match s.conj_case(&g.label, &h.label) {
                ConjCase::Fixed => Word::gen(s.scale_label(&h.label, f2)),
                ConjCase::Opposite => {
                    return Err(Error::Uncovered(format!("{} acting on {}", g.label, h.label)));
                }
                ConjCase::LongLong { i, j, k, a, b } => {
                    Word::long(i, k, r.mul(r.mul(a, b), f1)).mul(&Word::long(j, k, r.mul(b, f2)))
                }
                ConjCase::LongShort { i, j, a, m } => {
                    let qm = r.mul(r.mul(s.q0_form(&m), a), r.mul(f3, sp));
                    Word::concat([
                        &Word::long(-i, j, qm),
                        &Word::short(j, sc(&m, r.neg(r.mul(a, f1)))),
                        &Word::short(i, sc(&m, f2)),
                    ])
                }
                ConjCase::ShortShort { i, j, m, mp } => {
                    Word::long(-i, j, r.neg(r.mul(s.bil_m0(&m, &mp), f1))).mul(&Word::short(j, sc(&mp, f2)))
                }
                ConjCase::ShortLong { i, j, m, a } => Word::concat([
                    &Word::long(-i, j, r.neg(r.mul(s.q0_form(&m), a))),
                    &Word::short(j, sc(&m, r.mul(a, f1))),
                    &Word::long(i, j, r.mul(a, f2)),
                ]),
            };
            out.extend(if h.exp < 0 { piece.inv() } else { piece }.0);
        }
        Ok(StagedWord::new(Word(out), sp))
    }

    /// `fⁿ·t(g)` for long `g`, `f^{2n}·t(g)` for short `g`: the transvection
    /// of `g` with its denominator cleared.
    pub fn cleared(&self, g: &LocalizedGen) -> Mat {
        let s = &self.space;
        let r = s.ring();
        let (u, v) = g.label.esd_pair(s);
        let (c0, c1, c2) = match g.label {
            GenLabel::Long { .. } => (self.fpow(g.n), r.one(), r.zero()),
            GenLabel::Short { .. } => (self.fpow(2 * g.n), self.fpow(g.n), r.one()),
        };
        let qv = r.mul(s.q_form(&v), c2);
        let cols: Vec<Vector> = (0..s.dim())
            .map(|c| {
                let mut x = s.zero();
                x.0[c] = r.one();
                let (vx, ux) = (s.bil(&v, &x), s.bil(&u, &x));
                let mut y = s.scale(&x, c0);
                y = s.axpy(&y, &u, r.mul(c1, vx));
                y = s.axpy(&y, &v, r.neg(r.mul(c1, ux)));
                s.axpy(&y, &u, r.neg(r.mul(qv, ux)))
            })
            .collect();
        Mat::from_columns(&cols)
    }

    /// `K_f = K[1/f]` for `K = Z/n`: the largest factor of `n` prime to
    /// `f`, or `None` when that ring is zero.
    pub fn localized_modulus(&self) -> Option<u64> {
        let n = self.space.ring().modulus()?;
        let f = self.f.0 as u64;
        let mut out = 1u64;
        for (p, e) in prime_factors(n) {
            if !f.is_multiple_of(p) {
                out *= p.pow(e);
            }
        }
        (out >= 2).then_some(out)
    }

    /// The space over `K_f` with the form reduced.
    pub fn localized_space(&self) -> Result<Option<QuadSpace>> {
        let Some(m) = self.localized_modulus() else { return Ok(None) };
        let ring = Ring::zn(m)?;
        let q0: Vec<Elem> = self.space.q0_upper().iter().map(|x| Elem((x.0 as u64 % m) as u32)).collect();
        Ok(Some(QuadSpace::new(ring, self.space.ell(), self.space.r(), &q0)?))
    }
}

fn reduce_label(label: &GenLabel, m: u64, c: u64) -> GenLabel {
    let red = |x: Elem| Elem(((x.0 as u64 % m) * c % m) as u32);
    match label {
        GenLabel::Long { i, j, a } => GenLabel::long(*i, *j, red(*a)),
        GenLabel::Short { j, m: v } => GenLabel::short(*j, v.iter().map(|&x| red(x)).collect()),
    }
}

/// Outcome of one localized-action sample.
#[derive(Clone, Debug, Default, Serialize)]
struct ActionOutcome {
    cleared: bool,
    direct: Option<bool>,
    product: bool,
    extranatural_word: bool,
    extranatural_matrix: bool,
    redraws: u32,
}

/// Seeded checks of the localized action on a tower:
/// * `D·ev(w) = ev(^g w)·D` with `D` the cleared transvection of `g`;
/// * the same with `t(g)` itself over `K_f` when that ring is nonzero;
/// * acting by `g₁` after `g₂` agrees with `D₁D₂` at the matrix level;
/// * transition then act equals act then transition, as words.
pub fn verify_action_conjugation(tower: &Tower, samples: u64, seed: u64, exec: Exec) -> Result<SuiteReport> {
    let start = Instant::now();
    let s = &tower.space;
    let r = s.ring();
    let mut rep = SuiteReport::new(
        "action-conjugation",
        json!({"ring": r.spec().to_string(), "ell": s.ell(), "r": s.r(), "f": r.to_json(tower.f),
               "samples": samples, "seed": seed}),
    );
    let local = tower.localized_space()?;
    match (&local, tower.localized_modulus()) {
        (Some(_), Some(m)) => rep.set("localized_ring", format!("Z/{m}")),
        _ => rep.note("K[1/f] is the zero ring: only the cleared-denominator identity is checked"),
    }
    let sampling = Sampling::sampled(samples, seed);
    let size = r.size() as u32;
    let outcomes = exec.map_range(samples as usize, |k| -> Result<ActionOutcome> {
        let mut rng = sampling.rng(k as u64 + 1);
        let mut out = ActionOutcome::default();
        loop {
            let n = rng.gen_range(0..=2u32);
            let n2 = rng.gen_range(0..=1u32);
            let sp = Elem(rng.gen_range(0..size));
            let t = Elem(rng.gen_range(0..size));
            let g = LocalizedGen { label: s.random_label(&mut rng), n };
            let g2 = LocalizedGen { label: s.random_label(&mut rng), n: n2 };
            let base = Word(s.random_gens(&mut rng, 3));
            let lvl = tower.input_level(n, sp);
            let w = StagedWord::new(base.clone(), lvl);
            let acted = match tower.act_localized(&g, &w, sp) {
                Ok(a) => a,
                Err(Error::Uncovered(_)) => {
                    out.redraws += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            // cleared denominators
            let d = tower.cleared(&g);
            let x = ev_stage(s, &w).into_mat();
            let y = ev_stage(s, &acted).into_mat();
            out.cleared = d.mul(r, &x) == y.mul(r, &d);

            // over K[1/f]
            if let (Some(ls), Some(m)) = (&local, tower.localized_modulus()) {
                let finv = mod_inverse(tower.f.0 as u64 % m, m).expect("f is a unit in K[1/f]");
                let lab = reduce_label(&g.label, m, finv.pow(g.n) % m);
                let tg = ls.transvection(&lab).into_mat();
                let red = |a: &Mat| a.map(|e| Elem((e.0 as u64 % m) as u32));
                let lr = ls.ring();
                out.direct = Some(tg.mul(lr, &red(&x)) == red(&y).mul(lr, &tg));
            }

            // two acting generators: levels f^{2n}·(f^{2n2}·s')
            let inner = tower.input_level(n2, sp);
            let w2 = StagedWord::new(base.clone(), tower.input_level(n, inner));
            out.product = match tower.act_localized(&g, &w2, inner).and_then(|a| tower.act_localized(&g2, &a, sp)) {
                Ok(a2) => {
                    let d2 = tower.cleared(&g2).mul(r, &d);
                    let x2 = ev_stage(s, &w2).into_mat();
                    d2.mul(r, &x2) == ev_stage(s, &a2).into_mat().mul(r, &d2)
                }
                Err(Error::Uncovered(_)) => true,
                Err(e) => return Err(e),
            };

            // extranaturality along the transition by t
            let deep = StagedWord::new(base, r.mul(lvl, t));
            let spt = r.mul(sp, t);
            let a1 = tower.act_localized(&g, &deep, spt).and_then(|a| transition_word(s, &a, sp, t))?;
            let a2 = transition_word(s, &deep, lvl, t).and_then(|w| tower.act_localized(&g, &w, sp))?;
            out.extranatural_word = s.normalize(&a1.word) == s.normalize(&a2.word);
            out.extranatural_matrix = ev_stage(s, &a1) == ev_stage(s, &a2);
            return Ok(out);
        }
    });
    let mut counts = [0u64; 5];
    let mut redraws = 0u64;
    for (k, o) in outcomes.into_iter().enumerate() {
        let o = match o {
            Ok(o) => o,
            Err(e) => {
                rep.error(&format!("sample {k}"), &e);
                continue;
            }
        };
        rep.instances_checked += 1;
        redraws += o.redraws as u64;
        let checks = [
            ("cleared", o.cleared),
            ("direct", o.direct.unwrap_or(true)),
            ("product", o.product),
            ("extranatural_word", o.extranatural_word),
            ("extranatural_matrix", o.extranatural_matrix),
        ];
        for (c, (name, ok)) in checks.into_iter().enumerate() {
            if !ok {
                counts[c] += 1;
                rep.fail(json!({"check": name, "sample": k}));
            }
        }
    }
    rep.set(
        "failures_by_check",
        json!({"cleared": counts[0], "direct": counts[1], "product": counts[2],
               "extranatural_word": counts[3], "extranatural_matrix": counts[4]}),
    );
    rep.set("opposite_root_redraws", redraws);
    rep.time("total", start);
    Ok(rep)
}

/// Commutative algebra axioms of `K^(s)` for every level `s`, plus the
/// module axioms against `K`.
pub fn verify_homotope_axioms(ring: &Ring) -> Result<SuiteReport> {
    let space = QuadSpace::new(ring.clone(), 1, 0, &[])?;
    let h = Homotope::new(&space);
    let mut rep = SuiteReport::new("homotope-axioms", json!({"ring": ring.spec().to_string()}));
    let els: Vec<Elem> = ring.elements().collect();
    for &s in &els {
        for &a in &els {
            for &b in &els {
                let (x, y) = (h.scalar(a, s), h.scalar(b, s));
                for &c in &els {
                    let z = h.scalar(c, s);
                    let assoc = h.mul(h.mul(x, y)?, z)? == h.mul(x, h.mul(y, z)?)?;
                    let dist = h.mul(x, h.add(y, z)?)? == h.add(h.mul(x, y)?, h.mul(x, z)?)?;
                    let lin = h.scale(h.mul(x, y)?, c) == h.mul(h.scale(x, c), y)?;
                    rep.instances_checked += 1;
                    if !(assoc && dist && lin) {
                        rep.fail(json!({"s": s.0, "a": a.0, "b": b.0, "c": c.0}));
                    }
                }
                rep.instances_checked += 1;
                if h.mul(x, y)? != h.mul(y, x)? {
                    rep.fail(json!({"s": s.0, "a": a.0, "b": b.0, "law": "commutativity"}));
                }
            }
        }
    }
    let mismatch = h.add(h.scalar(els[0], els[0]), h.scalar(els[0], els[1]));
    if !matches!(mismatch, Err(Error::Level(_))) {
        rep.fail(json!({"law": "level mismatch accepted"}));
    }
    Ok(rep)
}

/// Transition maps compose (`s'` then `s''` is `s' s''`) and are ring
/// homomorphisms, for all levels and elements.
pub fn verify_transition_functoriality(ring: &Ring) -> Result<SuiteReport> {
    let space = QuadSpace::new(ring.clone(), 1, 0, &[])?;
    let h = Homotope::new(&space);
    let mut rep = SuiteReport::new("transition-functoriality", json!({"ring": ring.spec().to_string()}));
    let els: Vec<Elem> = ring.elements().collect();
    for &s in &els {
        for &sp in &els {
            let ssp = ring.mul(s, sp);
            for &spp in &els {
                let top = ring.mul(ssp, spp);
                for &a in &els {
                    let x = h.scalar(a, top);
                    let two = h.transition(h.transition(x, ssp, spp)?, s, sp)?;
                    let one = h.transition(x, s, ring.mul(sp, spp))?;
                    rep.instances_checked += 1;
                    if two != one {
                        rep.fail(json!({"s": s.0, "s'": sp.0, "s''": spp.0, "a": a.0}));
                    }
                }
            }
            for &a in &els {
                for &b in &els {
                    let (x, y) = (h.scalar(a, ssp), h.scalar(b, ssp));
                    let hom_mul = h.transition(h.mul(x, y)?, s, sp)? == h.mul(h.transition(x, s, sp)?, h.transition(y, s, sp)?)?;
                    let hom_add = h.transition(h.add(x, y)?, s, sp)? == h.add(h.transition(x, s, sp)?, h.transition(y, s, sp)?)?;
                    rep.instances_checked += 1;
                    if !(hom_mul && hom_add) {
                        rep.fail(json!({"s": s.0, "s'": sp.0, "a": a.0, "b": b.0, "law": "homomorphism"}));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Every generator label of the space.
pub fn all_labels(space: &QuadSpace) -> Vec<GenLabel> {
    let mut out = Vec::new();
    for i in space.hyp_indices() {
        for j in space.hyp_indices() {
            if i != j && i != -j {
                out.extend(space.ring().elements().map(|a| GenLabel::long(i, j, a)));
            }
        }
    }
    for j in space.hyp_indices() {
        out.extend(space.enumerate_m0().map(|m| GenLabel::short(j, m.0)));
    }
    out
}

/// `ev_s ∘ transition = ev_{s s'}` on every generator, for `s, s'` in
/// `levels`.
pub fn verify_ev_transition(space: &QuadSpace, levels: &[Elem], exec: Exec) -> SuiteReport {
    let r = space.ring();
    let mut rep = SuiteReport::new(
        "ev-transition",
        json!({"ring": r.spec().to_string(), "ell": space.ell(), "r": space.r(),
               "levels": levels.iter().map(|&x| r.to_json(x)).collect::<Vec<_>>()}),
    );
    let labels = all_labels(space);
    for &s in levels {
        for &sp in levels {
            let ssp = r.mul(s, sp);
            let bad = exec.filter_map(&labels, |l| {
                let w = StagedWord::new(Word::gen(l.clone()), ssp);
                let ok = transition_word(space, &w, s, sp).map(|t| ev_stage(space, &t) == ev_stage(space, &w)).unwrap_or(false);
                (!ok).then(|| l.to_json(space))
            });
            rep.instances_checked += labels.len() as u64;
            for b in bad {
                rep.fail(json!({"s": r.to_json(s), "s'": r.to_json(sp), "generator": b}));
            }
        }
    }
    rep
}

/// The nine relation schemas with homotope parameters at each level,
/// evaluated by `ev_stage`.
pub fn verify_homotope_relations(space: &QuadSpace, levels: &[Elem], sampling: Sampling, exec: Exec) -> SuiteReport {
    let r = space.ring();
    let mut rep = SuiteReport::new(
        "homotope-relations",
        json!({"ring": r.spec().to_string(), "ell": space.ell(), "r": space.r(), "sampling": sampling,
               "levels": levels.iter().map(|&x| r.to_json(x)).collect::<Vec<_>>()}),
    );
    for &s in levels {
        let mut sub = verify_relations(space, &Schema::ALL, Level::of(s), sampling, exec);
        sub.suite = format!("level-{}", r.fmt_elem(s));
        rep.absorb(sub);
    }
    rep
}

/// Finite-stage shadow of generation by maximal-ideal towers over `Z/n`:
/// for the `f`-tower (`f = 1` for the plain ring), the maximal ideals
/// `(p)` with `p ∤ f` index the towers. Whenever a linear map `D` on
/// `M = (Z/n)^d` vanishes on `s_p M` for a choice of `s_p ∉ (p)` from
/// every tower, it vanishes on `fʲ M` for some `j`; the smallest such `j`
/// over all cases is reported. All `D` and all choices are enumerated.
pub fn verify_costalk_generation(n: u64, f: u64, d: usize, max_depth: u32) -> Result<SuiteReport> {
    let ring = Ring::zn(n)?;
    let mut rep = SuiteReport::new("costalk-generation", json!({"n": n, "f": f, "dim": d, "max_depth": max_depth}));
    let primes: Vec<u64> = prime_factors(n).into_iter().map(|(p, _)| p).filter(|p| !f.is_multiple_of(*p)).collect();
    rep.set("towers", primes.clone());
    let choices: Vec<Vec<u64>> = primes.iter().map(|&p| (0..n).filter(|s| s % p != 0).collect()).collect();
    let nmat = (n as u128).pow((d * d) as u32);
    if nmat > 1 << 24 {
        return Err(Error::Precondition(format!("{nmat} matrices is too many to enumerate")));
    }
    // D vanishes on cM iff c·D = 0
    let kills = |m: &[u64], c: u64| m.iter().all(|&x| (x * c).is_multiple_of(n));
    let mut combo = vec![0usize; choices.len()];
    let mut worst = 0u32;
    loop {
        let ss: Vec<u64> = combo.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
        let mut depth = 0u32;
        let mut m = vec![0u64; d * d];
        for code in 0..nmat {
            let mut c = code;
            for x in m.iter_mut() {
                *x = (c % n as u128) as u64;
                c /= n as u128;
            }
            if !ss.iter().all(|&s| kills(&m, s)) {
                continue;
            }
            rep.instances_checked += 1;
            match (0..=max_depth).find(|&j| kills(&m, ring.pow(Elem(f as u32 % n as u32), j).0 as u64)) {
                Some(j) => depth = depth.max(j),
                None => rep.fail(json!({"choice": ss, "map": m.clone()})),
            }
        }
        worst = worst.max(depth);
        // next choice tuple
        let mut k = 0;
        while k < combo.len() {
            combo[k] += 1;
            if combo[k] < choices[k].len() {
                break;
            }
            combo[k] = 0;
            k += 1;
        }
        if k == combo.len() {
            break;
        }
    }
    rep.set("depth", worst);
    Ok(rep)
}
