use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use storth::orthogroup::{Gen, OrthoMap};
use storth::pipeline::InstanceConfig;
use storth::quadmod::QuadSpace;
use storth::ring::{Elem, Ring};
use storth::snf::smith;
use storth::steinberg::{st_presentation, StAlphabet, Word};
use storth::tc::{free_reduce, invert_word, todd_coxeter, word_is_identity, CosetTable, Presentation, TcOptions};

fn rings() -> Vec<Ring> {
    ["Z/2", "Z/3", "Z/4", "Z/9", "Z/12", "Z/2 x Z/3", "Z/4 x Z/2"].iter().map(|s| Ring::parse(s).unwrap()).collect()
}

fn st_f2() -> &'static (QuadSpace, CosetTable, StAlphabet) {
    static CELL: OnceLock<(QuadSpace, CosetTable, StAlphabet)> = OnceLock::new();
    CELL.get_or_init(|| {
        let s = QuadSpace::split(2, 3).unwrap();
        let (p, a) = st_presentation(&s);
        let (t, _) = todd_coxeter(&p, TcOptions::default()).unwrap();
        (s, t, a)
    })
}

fn random_word(space: &QuadSpace, seed: u64, len: usize) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens: Vec<Gen> = space.random_gens(&mut rng, len);
    Word(gens)
}

fn compose(space: &QuadSpace, a: &OrthoMap, b: &OrthoMap) -> OrthoMap {
    a.compose(space, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_ops_match_residue_arithmetic(k in 0usize..7, x in 0u64..1000, y in 0u64..1000, z in 0u64..1000) {
        let r = &rings()[k];
        let (a, b, c) = (r.from_i64(x as i64), r.from_i64(y as i64), r.from_i64(z as i64));
        let res = |e: Elem| r.residues(e);
        let expect = |f: &dyn Fn(u64) -> u64| -> Vec<u64> { r.moduli().iter().map(|&m| f(m)).collect() };
        prop_assert_eq!(res(r.add(a, b)), expect(&|m| (x + y) % m));
        prop_assert_eq!(res(r.mul(a, b)), expect(&|m| (x * y) % m));
        prop_assert_eq!(res(r.sub(a, b)), expect(&|m| (x % m + m - y % m) % m));
        prop_assert_eq!(r.mul(a, r.add(b, c)), r.add(r.mul(a, b), r.mul(a, c)));
        prop_assert_eq!(r.add(a, r.neg(a)), r.zero());
        if let Some(i) = r.inv(a) {
            prop_assert_eq!(r.mul(a, i), r.one());
        } else {
            prop_assert!(!r.is_unit(a));
        }
    }

    #[test]
    fn normalize_is_idempotent_and_preserves_phi(n in prop::sample::select(vec![2u64, 3, 4]), seed in any::<u64>(), len in 0usize..12) {
        let s = QuadSpace::split(n, 3).unwrap();
        let w = random_word(&s, seed, len);
        let once = s.normalize(&w);
        prop_assert_eq!(s.normalize(&once), once.clone());
        prop_assert_eq!(s.phi(&once), s.phi(&w));
    }

    #[test]
    fn phi_is_a_homomorphism(n in prop::sample::select(vec![2u64, 3, 4, 6]), seed in any::<u64>()) {
        let s = QuadSpace::split(n, 3).unwrap();
        let a = random_word(&s, seed, 6);
        let b = random_word(&s, seed.wrapping_add(1), 6);
        prop_assert_eq!(s.phi(&a.mul(&b)), compose(&s, &s.phi(&a), &s.phi(&b)));
        prop_assert!(compose(&s, &s.phi(&a), &s.phi(&a.inv())).is_identity(&s));
    }

    #[test]
    fn esd_is_orthogonal(n in prop::sample::select(vec![2u64, 3, 4, 9]), seed in any::<u64>()) {
        let s = QuadSpace::with_ints(Ring::zn(n).unwrap(), 3, 1, &[1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = s.random_isotropic(&mut rng);
        let v = s.random_orthogonal(&mut rng, &u);
        let t = s.esd(&u, &v).unwrap();
        prop_assert!(s.is_orthogonal(t.mat()));
        prop_assert!(compose(&s, &t, &s.esd(&u, &s.neg(&v)).unwrap()).is_identity(&s));
    }

    #[test]
    fn presentation_text_round_trip(ngens in 1usize..6, rels in prop::collection::vec(prop::collection::vec(0u32..12, 1..10), 0..6)) {
        let rels: Vec<Vec<u32>> = rels.into_iter().map(|r| r.into_iter().map(|x| x % (2 * ngens as u32)).collect()).collect();
        let p = Presentation::new(ngens, rels);
        prop_assert_eq!(Presentation::parse(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn free_reduction(w in prop::collection::vec(0u32..6, 0..30)) {
        let r = free_reduce(&w);
        prop_assert_eq!(free_reduce(&r), r.clone());
        prop_assert!(r.windows(2).all(|p| p[0] ^ 1 != p[1]));
        prop_assert_eq!(invert_word(&invert_word(&w)), w.clone());
        let mut ww = w.clone();
        ww.extend(invert_word(&w));
        prop_assert!(free_reduce(&ww).is_empty());
    }

    #[test]
    fn smith_2x2_matches_gcd_and_det(a in -50i128..50, b in -50i128..50, c in -50i128..50, d in -50i128..50) {
        let snf = smith(vec![vec![a, b], vec![c, d]], 2, false).unwrap();
        let g = [a, b, c, d].iter().fold(0i128, |g, &x| num_gcd(g, x.abs()));
        let det = (a * d - b * c).abs();
        let diag: Vec<i128> = snf.diag.iter().map(|x| x.abs()).collect();
        if det != 0 {
            prop_assert_eq!(diag.len(), 2);
            prop_assert_eq!(diag[0], g);
            prop_assert_eq!(diag[0] * diag[1], det);
        } else if g != 0 {
            prop_assert_eq!(diag.iter().filter(|&&x| x != 0).copied().collect::<Vec<_>>(), vec![g]);
        }
    }

    #[test]
    fn config_inline_matches_file(n in 2u64..30, ell in 1usize..5, seed in any::<u64>()) {
        let a = InstanceConfig::parse(&format!("ring = Z/{n}\nell = {ell}\nseed = {seed}\nlevels = 1, 2\n")).unwrap();
        let b = InstanceConfig::parse_inline(&format!("ring=Z/{n},ell={ell},seed={seed},levels=1,2")).unwrap();
        prop_assert_eq!(a, b);
    }
}

fn num_gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a } else { num_gcd(b, a % b) }
}

#[test]
fn word_oracle_agrees_with_phi() {
    let (s, table, alphabet) = st_f2();
    let mut identities = 0;
    for k in 0..10_000u64 {
        let w = random_word(s, k, 1 + (k % 9) as usize);
        let w = if k % 4 == 0 { w.mul(&w.inv()) } else { w };
        let by_table = word_is_identity(table, &alphabet.letters(s, &w)).unwrap();
        identities += usize::from(by_table);
        // kernel of phi is trivial over F_2 with ell = 3
        assert_eq!(by_table, s.phi(&w).is_identity(s), "word {w}");
    }
    assert!(identities >= 2500);
}

#[test]
fn coset_table_binary_round_trip() {
    let (_, table, alphabet) = st_f2();
    let mut buf = Vec::new();
    table.write_binary(&mut buf).unwrap();
    assert_eq!(buf.len(), table.len() * 2 * alphabet.len() * 4);
    assert_eq!(&CosetTable::read_binary(&buf, alphabet.len()).unwrap(), table);
}
