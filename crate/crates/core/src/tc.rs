//! Todd–Coxeter coset enumeration over the trivial subgroup.
//!
//! Letters: `2k` is generator `k`, `2k+1` its inverse. A complete table is
//! the regular permutation representation of the group, so a word is the
//! identity iff it fixes the base coset 0.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{Error, Result};

const UNDEF: u32 = u32::MAX;

/// Default limit on allocated coset rows.
pub const DEFAULT_MAX_COSETS: usize = 2_000_000;

#[inline]
pub fn inv_letter(x: u32) -> u32 {
    x ^ 1
}

/// Cancels adjacent `x x⁻¹` pairs.
pub fn free_reduce(w: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&inv_letter(x)) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Free and cyclic reduction.
pub fn cyclic_reduce(w: &[u32]) -> Vec<u32> {
    let w = free_reduce(w);
    let (mut lo, mut hi) = (0, w.len());
    while hi - lo >= 2 && w[lo] == inv_letter(w[hi - 1]) {
        lo += 1;
        hi -= 1;
    }
    w[lo..hi].to_vec()
}

pub fn invert_word(w: &[u32]) -> Vec<u32> {
    w.iter().rev().map(|&x| inv_letter(x)).collect()
}

/// Smallest rotation of the word or of its inverse.
fn canonical_relator(w: &[u32]) -> Vec<u32> {
    let inv = invert_word(w);
    let mut best: Option<Vec<u32>> = None;
    for base in [w, inv.as_slice()] {
        for k in 0..base.len() {
            let rot: Vec<u32> = base[k..].iter().chain(&base[..k]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// Finite presentation: generator count and relator words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    ngens: usize,
    relators: Vec<Vec<u32>>,
}

impl Presentation {
    /// Relators are cyclically reduced, deduplicated up to rotation and
    /// inversion, and sorted by length; empty ones are dropped.
    pub fn new(ngens: usize, relators: Vec<Vec<u32>>) -> Presentation {
        let mut seen = HashSet::new();
        let mut rels = Vec::new();
        for r in relators {
            assert!(r.iter().all(|&x| (x as usize) < 2 * ngens), "letter out of range");
            let c = cyclic_reduce(&r);
            if c.is_empty() {
                continue;
            }
            let key = canonical_relator(&c);
            if seen.insert(key.clone()) {
                rels.push(key);
            }
        }
        rels.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Presentation { ngens, relators: rels }
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relators(&self) -> &[Vec<u32>] {
        &self.relators
    }

    /// Keeps only the given relators (indices into [`Self::relators`]).
    pub fn with_relators(&self, keep: impl IntoIterator<Item = usize>) -> Presentation {
        Presentation::new(self.ngens, keep.into_iter().map(|k| self.relators[k].clone()).collect())
    }

    /// Text form: `generators N`, then one relator per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("generators {}\n", self.ngens);
        for r in &self.relators {
            let toks: Vec<String> =
                r.iter().map(|&x| format!("{}{}", if x % 2 == 0 { 'g' } else { 'G' }, x / 2)).collect();
            let _ = writeln!(s, "{}", toks.join(" "));
        }
        s
    }

    /// Parses the text form. `#` starts a comment; the `generators` line is
    /// optional (default: one more than the largest index used).
    pub fn parse(text: &str) -> Result<Presentation> {
        let mut declared: Option<usize> = None;
        let mut rels = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("generators") {
                let n = rest.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad generator count", ln + 1)))?;
                declared = Some(n);
                continue;
            }
            if line == "1" {
                continue;
            }
            rels.push(parse_word(line).map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))?);
        }
        let used = rels.iter().flatten().map(|&x| x as usize / 2 + 1).max().unwrap_or(0);
        let ngens = declared.unwrap_or(used);
        if used > ngens {
            return Err(Error::Parse(format!("generator index {} exceeds declared count {ngens}", used - 1)));
        }
        Ok(Presentation::new(ngens, rels))
    }
}

/// Parses `g0 G1 g2` (whitespace optional) into letters.
pub fn parse_word(s: &str) -> std::result::Result<Vec<u32>, String> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_whitespace() || c == '*' || c == '.' {
            continue;
        }
        let inverse = match c {
            'g' => false,
            'G' => true,
            _ => return Err(format!("unexpected character {c:?}")),
        };
        let mut digits = String::new();
        while let Some(d) = chars.peek().copied().filter(char::is_ascii_digit) {
            digits.push(d);
            chars.next();
        }
        let k: u32 = digits.parse().map_err(|_| format!("missing index after {c}"))?;
        if k >= u32::MAX / 2 {
            return Err(format!("generator index {k} too large"));
        }
        out.push(2 * k + u32::from(inverse));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize)]
pub enum Strategy {
    /// Relator scanning with definitions (HLT) and lookahead when full.
    #[default]
    Hlt,
    /// Definitions in row order, consequences from deduction processing.
    Felsch,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Strategy> {
        match s.to_ascii_lowercase().as_str() {
            "hlt" => Ok(Strategy::Hlt),
            "felsch" => Ok(Strategy::Felsch),
            _ => Err(Error::Parse(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct TcOptions {
    pub max_cosets: usize,
    pub strategy: Strategy,
}

impl Default for TcOptions {
    fn default() -> TcOptions {
        TcOptions { max_cosets: DEFAULT_MAX_COSETS, strategy: Strategy::Hlt }
    }
}

/// Enumeration counters.
#[derive(Clone, Copy, Debug, Default, serde::Serialize)]
pub struct TcStats {
    pub defined: u64,
    pub high_water: usize,
    pub coincidences: u64,
    pub lookaheads: u32,
    pub compactions: u32,
}

/// Complete coset table over the trivial subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    ncols: usize,
    rows: usize,
    data: Vec<u32>,
}

impl CosetTable {
    pub fn ngens(&self) -> usize {
        self.ncols / 2
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    #[inline]
    pub fn get(&self, coset: u32, letter: u32) -> u32 {
        self.data[coset as usize * self.ncols + letter as usize]
    }

    pub fn trace(&self, start: u32, w: &[u32]) -> u32 {
        w.iter().fold(start, |c, &x| self.get(c, x))
    }

    /// Row-major little-endian `u32` entries.
    pub fn write_binary(&self, mut out: impl Write) -> io::Result<()> {
        let mut buf = Vec::with_capacity(self.data.len() * 4);
        for &x in &self.data {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        out.write_all(&buf)
    }

    pub fn read_binary(bytes: &[u8], ngens: usize) -> Result<CosetTable> {
        let ncols = 2 * ngens;
        if ncols == 0 || !bytes.len().is_multiple_of(4 * ncols) {
            return Err(Error::Parse("binary table length does not match generator count".into()));
        }
        let data: Vec<u32> = bytes.chunks_exact(4).map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        let rows = data.len() / ncols;
        if data.iter().any(|&x| x as usize >= rows) {
            return Err(Error::IncompleteTable);
        }
        Ok(CosetTable { ncols, rows, data })
    }

    pub fn is_complete(&self) -> bool {
        self.data.iter().all(|&x| x != UNDEF)
    }

    /// Every relator traces a closed loop at every coset.
    pub fn compatible_with(&self, p: &Presentation) -> bool {
        p.relators().iter().all(|r| (0..self.rows as u32).all(|c| self.trace(c, r) == c))
    }

    /// Number of (coset, relator) pairs that fail to close.
    pub fn compatibility_failures(&self, relators: &[Vec<u32>]) -> u64 {
        let mut bad = 0;
        for r in relators {
            for c in 0..self.rows as u32 {
                if self.trace(c, r) != c {
                    bad += 1;
                }
            }
        }
        bad
    }
}

/// `true` iff `w` is the identity of the enumerated group.
pub fn word_is_identity(t: &CosetTable, w: &[u32]) -> Result<bool> {
    if !t.is_complete() {
        return Err(Error::IncompleteTable);
    }
    if w.iter().any(|&x| x as usize >= t.ncols) {
        return Err(Error::Parse("letter outside the table alphabet".into()));
    }
    Ok(t.trace(0, w) == 0)
}

pub fn group_order(t: &CosetTable) -> usize {
    t.len()
}

struct Enumerator<'a> {
    ncols: usize,
    max: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    queue: Vec<u32>,
    deductions: Vec<(u32, u32)>,
    track_deductions: bool,
    relators: &'a [Vec<u32>],
    /// Cyclic conjugates of relators and their inverses, by first letter.
    by_letter: Vec<Vec<Vec<u32>>>,
    stats: TcStats,
}

impl<'a> Enumerator<'a> {
    fn new(p: &'a Presentation, opts: TcOptions) -> Enumerator<'a> {
        let ncols = 2 * p.ngens();
        let mut e = Enumerator {
            ncols,
            max: opts.max_cosets.max(1),
            table: Vec::new(),
            parent: Vec::new(),
            live: 0,
            queue: Vec::new(),
            deductions: Vec::new(),
            track_deductions: opts.strategy == Strategy::Felsch,
            relators: p.relators(),
            by_letter: Vec::new(),
            stats: TcStats::default(),
        };
        e.new_row();
        if e.track_deductions {
            let mut by: Vec<HashSet<Vec<u32>>> = vec![HashSet::new(); ncols];
            for r in p.relators() {
                for w in [r.clone(), invert_word(r)] {
                    for k in 0..w.len() {
                        let rot: Vec<u32> = w[k..].iter().chain(&w[..k]).copied().collect();
                        by[rot[0] as usize].insert(rot);
                    }
                }
            }
            e.by_letter = by
                .into_iter()
                .map(|s| {
                    let mut v: Vec<Vec<u32>> = s.into_iter().collect();
                    v.sort();
                    v
                })
                .collect();
        }
        e
    }

    fn rows(&self) -> usize {
        self.parent.len()
    }

    fn new_row(&mut self) -> u32 {
        let c = self.parent.len() as u32;
        self.parent.push(c);
        self.table.extend(std::iter::repeat_n(UNDEF, self.ncols));
        self.live += 1;
        self.stats.defined += 1;
        self.stats.high_water = self.stats.high_water.max(self.live);
        c
    }

    #[inline]
    fn get(&self, c: u32, x: u32) -> u32 {
        self.table[c as usize * self.ncols + x as usize]
    }

    #[inline]
    fn set(&mut self, c: u32, x: u32, d: u32) {
        self.table[c as usize * self.ncols + x as usize] = d;
    }

    #[inline]
    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, x: u32) -> u32 {
        let d = self.new_row();
        self.set(c, x, d);
        self.set(d, inv_letter(x), c);
        if self.track_deductions {
            self.deductions.push((c, x));
        }
        d
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut k = c;
        while self.parent[k as usize] != r {
            let next = self.parent[k as usize];
            self.parent[k as usize] = r;
            k = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi as usize] = lo;
        self.live -= 1;
        self.stats.coincidences += 1;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut qi = 0;
        while qi < self.queue.len() {
            let c = self.queue[qi];
            qi += 1;
            for x in 0..self.ncols as u32 {
                let d = self.get(c, x);
                if d == UNDEF {
                    continue;
                }
                let xi = inv_letter(x);
                if self.get(d, xi) == c {
                    self.set(d, xi, UNDEF);
                }
                let e = self.rep(c);
                let f = self.rep(d);
                let ex = self.get(e, x);
                if ex != UNDEF {
                    self.merge(f, ex);
                } else {
                    let fxi = self.get(f, xi);
                    if fxi != UNDEF {
                        self.merge(e, fxi);
                    } else {
                        self.set(e, x, f);
                        self.set(f, xi, e);
                        if self.track_deductions {
                            self.deductions.push((e, x));
                        }
                    }
                }
            }
        }
    }

    /// Scans `w` at `c`; fills a single gap as a deduction, processes a
    /// mismatch as a coincidence, and when `fill` is set defines new cosets
    /// across larger gaps.
    fn scan(&mut self, c: u32, w: &[u32], fill: bool) {
        let n = w.len();
        let (mut f, mut i) = (c, 0usize);
        let (mut b, mut j) = (c, n);
        loop {
            while i < j {
                let nx = self.get(f, w[i]);
                if nx == UNDEF {
                    break;
                }
                f = nx;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return;
            }
            while j > i {
                let nx = self.get(b, inv_letter(w[j - 1]));
                if nx == UNDEF {
                    break;
                }
                b = nx;
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return;
            }
            if j == i + 1 {
                self.set(f, w[i], b);
                self.set(b, inv_letter(w[i]), f);
                if self.track_deductions {
                    self.deductions.push((f, w[i]));
                }
                return;
            }
            if !fill {
                return;
            }
            self.define(f, w[i]);
        }
    }

    fn lookahead(&mut self) {
        self.stats.lookaheads += 1;
        let rels = self.relators;
        for c in 0..self.rows() as u32 {
            for r in rels {
                if !self.is_live(c) {
                    break;
                }
                self.scan(c, r, false);
            }
        }
    }

    /// Renumbers live cosets `0..live` in order; returns the old-to-new map.
    fn compact(&mut self) -> Vec<u32> {
        self.stats.compactions += 1;
        let rows = self.rows();
        let mut map = vec![UNDEF; rows];
        let mut next = 0u32;
        for c in 0..rows as u32 {
            if self.is_live(c) {
                map[c as usize] = next;
                next += 1;
            }
        }
        let mut data = Vec::with_capacity(next as usize * self.ncols);
        for c in 0..rows as u32 {
            if map[c as usize] == UNDEF {
                continue;
            }
            for x in 0..self.ncols as u32 {
                let d = self.get(c, x);
                data.push(if d == UNDEF { UNDEF } else { map[self.rep(d) as usize] });
            }
        }
        self.table = data;
        self.parent = (0..next).collect();
        self.live = next as usize;
        for (c, _) in self.deductions.iter_mut() {
            *c = map[*c as usize];
        }
        self.deductions.retain(|&(c, _)| c != UNDEF);
        map
    }

    /// Makes room for `need` new rows, or reports overflow.
    fn ensure_room(&mut self, need: usize, cursor: &mut u32) -> Result<()> {
        if self.rows() + need <= self.max {
            return Ok(());
        }
        self.lookahead();
        let map = self.compact();
        *cursor = map[..(*cursor as usize).min(map.len())].iter().filter(|&&m| m != UNDEF).count() as u32;
        if self.rows() + need <= self.max {
            Ok(())
        } else {
            Err(Error::Overflow { limit: self.max, high_water: self.stats.high_water })
        }
    }

    fn run_hlt(&mut self) -> Result<()> {
        let maxlen = self.relators.iter().map(Vec::len).max().unwrap_or(0);
        let need = maxlen + self.ncols;
        let rels = self.relators;
        let mut c = 0u32;
        while (c as usize) < self.rows() {
            if self.is_live(c) {
                self.ensure_room(need, &mut c)?;
                if (c as usize) >= self.rows() {
                    break;
                }
                if !self.is_live(c) {
                    c += 1;
                    continue;
                }
                for r in rels {
                    self.ensure_room(maxlen, &mut c)?;
                    if !self.is_live(c) {
                        break;
                    }
                    self.scan(c, r, true);
                }
                if self.is_live(c) {
                    for x in 0..self.ncols as u32 {
                        if self.get(c, x) == UNDEF {
                            self.define(c, x);
                        }
                    }
                }
            }
            c += 1;
        }
        Ok(())
    }

    fn process_deductions(&mut self) {
        while let Some((c, x)) = self.deductions.pop() {
            let c = self.rep(c);
            let d = self.get(c, x);
            if d == UNDEF {
                continue;
            }
            let d = self.rep(d);
            for k in 0..self.by_letter[x as usize].len() {
                if !self.is_live(c) {
                    break;
                }
                let w = std::mem::take(&mut self.by_letter[x as usize][k]);
                self.scan(c, &w, false);
                self.by_letter[x as usize][k] = w;
            }
            let xi = inv_letter(x) as usize;
            for k in 0..self.by_letter[xi].len() {
                if !self.is_live(d) {
                    break;
                }
                let w = std::mem::take(&mut self.by_letter[xi][k]);
                self.scan(d, &w, false);
                self.by_letter[xi][k] = w;
            }
        }
    }

    fn run_felsch(&mut self) -> Result<()> {
        let mut c = 0u32;
        let mut x = 0u32;
        loop {
            while (c as usize) < self.rows() && (!self.is_live(c) || self.get(c, x) != UNDEF) {
                x += 1;
                if x as usize == self.ncols || !self.is_live(c) {
                    x = 0;
                    c += 1;
                }
            }
            if c as usize >= self.rows() {
                return Ok(());
            }
            if self.rows() >= self.max {
                let map = self.compact();
                c = map[..c as usize].iter().filter(|&&m| m != UNDEF).count() as u32;
                x = 0;
                if self.rows() >= self.max {
                    return Err(Error::Overflow { limit: self.max, high_water: self.stats.high_water });
                }
                continue;
            }
            self.define(c, x);
            self.process_deductions();
        }
    }

    fn finish(mut self) -> Result<(CosetTable, TcStats)> {
        self.compact();
        let t = CosetTable { ncols: self.ncols, rows: self.rows(), data: self.table };
        if !t.is_complete() {
            return Err(Error::IncompleteTable);
        }
        Ok((t, self.stats))
    }
}

/// Enumerates cosets of the trivial subgroup.
pub fn todd_coxeter(p: &Presentation, opts: TcOptions) -> Result<(CosetTable, TcStats)> {
    if p.ngens() == 0 {
        return Ok((CosetTable { ncols: 0, rows: 1, data: Vec::new() }, TcStats::default()));
    }
    let mut e = Enumerator::new(p, opts);
    match opts.strategy {
        Strategy::Hlt => e.run_hlt()?,
        Strategy::Felsch => e.run_felsch()?,
    }
    e.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tc(text: &str) -> CosetTable {
        todd_coxeter(&Presentation::parse(text).unwrap(), TcOptions::default()).unwrap().0
    }

    #[test]
    fn small_groups() {
        for strategy in [Strategy::Hlt, Strategy::Felsch] {
            let opts = TcOptions { strategy, ..TcOptions::default() };
            let cases = [
                ("g0 g0 g0", 3),
                ("g0 g0\ng1 g1\ng0 g1 g0 g1 g0 g1", 6),
                // A5 = <a, b | a^2, b^3, (ab)^5>
                ("g0g0\ng1g1g1\ng0g1g0g1g0g1g0g1g0g1", 60),
                // quaternion group
                ("g0g0g0g0\ng0g0G1G1\nG1g0g1g0", 8),
                // trivial group with a redundant generator
                ("generators 2\ng0\ng1 g0", 1),
            ];
            for (text, order) in cases {
                let p = Presentation::parse(text).unwrap();
                let (t, _) = todd_coxeter(&p, opts).unwrap();
                assert_eq!(group_order(&t), order, "{text} with {strategy:?}");
                assert!(t.compatible_with(&p));
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        // Z x Z/2 is infinite
        let p = Presentation::parse("g1 g1\ng0 g1 G0 G1").unwrap();
        let err = todd_coxeter(&p, TcOptions { max_cosets: 500, strategy: Strategy::Hlt }).unwrap_err();
        assert!(matches!(err, Error::Overflow { limit: 500, .. }));
        let err = todd_coxeter(&p, TcOptions { max_cosets: 500, strategy: Strategy::Felsch }).unwrap_err();
        assert!(matches!(err, Error::Overflow { limit: 500, .. }));
    }

    #[test]
    fn identity_oracle() {
        let t = tc("g0 g0\ng1 g1\ng0 g1 g0 g1 g0 g1");
        assert!(word_is_identity(&t, &[]).unwrap());
        assert!(word_is_identity(&t, &[0, 0]).unwrap());
        assert!(!word_is_identity(&t, &[0]).unwrap());
        assert!(word_is_identity(&t, &[0, 2, 0, 2, 0, 2]).unwrap());
        assert!(!word_is_identity(&t, &[0, 2]).unwrap());
    }

    #[test]
    fn parse_and_text_round_trip() {
        let p = Presentation::parse("# dihedral\ngenerators 2\ng0 g0\ng1G1g1 g1\n\ng0 g1 g0 g1").unwrap();
        assert_eq!(p.ngens(), 2);
        assert_eq!(Presentation::parse(&p.to_text()).unwrap(), p);
        assert!(Presentation::parse("g0 x1").is_err());
        assert!(Presentation::parse("generators 1\ng3").is_err());
    }

    #[test]
    fn reductions() {
        assert_eq!(free_reduce(&[0, 2, 3, 1, 4]), vec![4]);
        assert_eq!(cyclic_reduce(&[1, 2, 4, 0]), vec![2, 4]);
        let p = Presentation::new(2, vec![vec![0, 2], vec![2, 0], vec![3, 1], vec![0, 1]]);
        assert_eq!(p.relators().len(), 1);
    }

    #[test]
    fn deterministic_and_binary_round_trip() {
        let p = Presentation::parse("g0g0\ng1g1g1\ng0g1g0g1g0g1g0g1g0g1").unwrap();
        let (a, _) = todd_coxeter(&p, TcOptions::default()).unwrap();
        let (b, _) = todd_coxeter(&p, TcOptions::default()).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        a.write_binary(&mut x).unwrap();
        b.write_binary(&mut y).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.len(), 60 * 4 * 4);
        assert_eq!(CosetTable::read_binary(&x, 2).unwrap(), a);
    }
}
