//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use storth::esdlift::{all_lift_pairs, verify_esd_properties, verify_lift_matches_esd};
use storth::exec::Exec;
use storth::homotower::{
    verify_action_conjugation, verify_ev_transition, verify_homotope_relations, verify_transition_functoriality, Tower,
};
use storth::oddform::{delta_generators_experiment, localization_commutes};
use storth::orthogroup::{verify_lemma1_exhaustive, verify_lemma1_sampled, EsdSweepDomain};
use storth::pipeline::{run, InstanceConfig};
use storth::quadmod::{QuadSpace, Vector};
use storth::report::{Sampling, SuiteReport};
use storth::ring::{Elem, Ring};
use storth::starpres::{verify_abelianizations, verify_g_of_f, verify_star_relators_in_st, StarImages, StarIndex, StarSchema, StarRelators};
use storth::steinberg::{st_presentation, verify_relations, Level, Schema, StAlphabet};
use storth::tc::{todd_coxeter, CosetTable, TcOptions};

const LIMIT_LEMMA1: Duration = Duration::from_secs(60);
const LIMIT_RELATIONS: Duration = Duration::from_secs(120);
const LIMIT_ORBIT: Duration = Duration::from_secs(1);
const LIMIT_ESD: Duration = Duration::from_secs(60);
const LIMIT_TC: Duration = Duration::from_secs(600);
const LIMIT_STAR: Duration = Duration::from_secs(900);
const LIMIT_HOMOTOPE: Duration = Duration::from_secs(300);
const LIMIT_ODDFORM: Duration = Duration::from_secs(300);
const MAX_COSETS: usize = 2_000_000;
const LEMMA1_SAMPLES: u64 = 10_000;
const ACTION_SAMPLES: u64 = 1_000;
const STAR_ABEL_RELATORS: u64 = 10_000;
const SEED: u64 = 20_240_601;

fn verdict(n: u32, name: &str, ok: bool, elapsed: Duration, limit: Option<Duration>, detail: &str) {
    let in_time = limit.is_none_or(|l| elapsed < l);
    let limit = limit.map(|l| format!(" < {}s", l.as_secs())).unwrap_or_default();
    println!(
        "criterion {n:>2} {name}: {} ({detail}; {:.2}s{limit})",
        if ok && in_time { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {n} failed: {detail}");
    assert!(in_time, "criterion {n} over time: {elapsed:?}");
}

fn summary(reps: &[&SuiteReport]) -> (bool, String) {
    let ok = reps.iter().all(|r| r.passed && r.failure_count == 0);
    let checked: u64 = reps.iter().map(|r| r.instances_checked).sum();
    let failed: u64 = reps.iter().map(|r| r.failure_count).sum();
    let bad: Vec<String> = reps.iter().filter(|r| !r.passed).map(|r| format!("{}: {:?}", r.suite, r.failures.first())).collect();
    (ok, format!("{checked} instances, {failed} failures{}", if bad.is_empty() { String::new() } else { format!(" {bad:?}") }))
}

fn f2() -> QuadSpace {
    QuadSpace::split(2, 3).unwrap()
}

struct StTable {
    table: CosetTable,
    alphabet: StAlphabet,
    elapsed: Duration,
}

fn st_table() -> &'static StTable {
    static CELL: OnceLock<StTable> = OnceLock::new();
    CELL.get_or_init(|| {
        let t0 = Instant::now();
        let (pres, alphabet) = st_presentation(&f2());
        let (table, _) = todd_coxeter(&pres, TcOptions { max_cosets: MAX_COSETS, ..TcOptions::default() })
            .expect("St enumeration within the coset limit");
        StTable { table, alphabet, elapsed: t0.elapsed() }
    })
}

fn criterion_01_lemma1() {
    let t0 = Instant::now();
    let exhaustive = verify_lemma1_exhaustive(&f2(), EsdSweepDomain::AllIsotropic, 1 << 20, 1, SEED, Exec::Parallel).unwrap();
    assert_eq!(exhaustive.results["additivity_pairs_exhaustive"], true);
    let sampled: Vec<SuiteReport> = [(3u64, 0usize, vec![]), (4, 1, vec![1i64]), (9, 0, vec![])]
        .into_iter()
        .map(|(n, r, q0)| {
            let s = QuadSpace::with_ints(Ring::zn(n).unwrap(), 3, r, &q0).unwrap();
            verify_lemma1_sampled(&s, LEMMA1_SAMPLES, SEED, Exec::Parallel)
        })
        .collect();
    let mut reps = vec![&exhaustive];
    reps.extend(sampled.iter());
    let (ok, detail) = summary(&reps);
    verdict(1, "ESD identities", ok, t0.elapsed(), Some(LIMIT_LEMMA1), &detail);
}

fn criterion_02_phi_relations() {
    let t0 = Instant::now();
    let reps: Vec<SuiteReport> = [2u64, 3]
        .into_iter()
        .map(|n| verify_relations(&QuadSpace::split(n, 3).unwrap(), &Schema::ALL, Level::ONE, Sampling::exhaustive(), Exec::Parallel))
        .collect();
    for r in &reps {
        for schema in Schema::ALL {
            assert_eq!(r.results["schemas"][schema.name()]["exhaustive"], true);
        }
    }
    let (ok, detail) = summary(&reps.iter().collect::<Vec<_>>());
    verdict(2, "Steinberg relations under phi", ok, t0.elapsed(), Some(LIMIT_RELATIONS), &detail);
}

/// Nonzero vectors of `F_2^6` with `Σ v_{-i} v_i = 0`, coordinates ordered
/// `e_{-3}, e_{-2}, e_{-1}, e_1, e_2, e_3`.
fn isotropic_f2_oracle() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for bits in 1u32..64 {
        let v: Vec<u32> = (0..6).map(|k| (bits >> k) & 1).collect();
        let q = (0..3).map(|i| v[2 - i] * v[3 + i]).sum::<u32>() % 2;
        if q == 0 {
            out.push(v);
        }
    }
    out.sort();
    out
}

fn criterion_03_orbit() {
    let t0 = Instant::now();
    let s = f2();
    let orbit: Vec<Vec<u32>> = s.orbit(&s.e(1)).unwrap().sorted_vectors().into_iter().map(|v| v.0.iter().map(|e| e.0).collect()).collect();
    let mut orbit = orbit;
    orbit.sort();
    let oracle = isotropic_f2_oracle();
    let ok = orbit.len() == 35 && orbit == oracle;
    verdict(3, "orbit of e1 over F_2", ok, t0.elapsed(), Some(LIMIT_ORBIT), &format!("orbit {}, oracle {}", orbit.len(), oracle.len()));
}

fn criterion_04_local_transitivity() {
    let t0 = Instant::now();
    let s = QuadSpace::split(4, 3).unwrap();
    let orbit = s.orbit(&s.e(1)).unwrap().sorted_vectors();
    let mut members: Vec<Vector> = s.enumerate_vectors().unwrap().filter(|v| s.is_hyperbolic_member(v).unwrap()).collect();
    members.sort();
    let only_orbit = orbit.iter().filter(|v| members.binary_search(v).is_err()).count();
    let only_members = members.iter().filter(|v| orbit.binary_search(v).is_err()).count();
    verdict(
        4,
        "orbit of e1 over Z/4 vs hyperbolic members",
        only_orbit == 0 && only_members == 0,
        t0.elapsed(),
        None,
        &format!("orbit {}, members {}, only in orbit {only_orbit}, only in members {only_members}", orbit.len(), members.len()),
    );
}

fn criterion_05_esd_lift() {
    let t0 = Instant::now();
    let s = f2();
    let table = s.orbit(&s.e(1)).unwrap();
    let pairs = all_lift_pairs(&s, &table).unwrap();
    assert_eq!(pairs.len(), 1120);
    let lift = verify_lift_matches_esd(&s, &table, &pairs, Exec::Parallel);
    let props = verify_esd_properties(&s, &table, Sampling { cap: 0, samples: 2000, seed: SEED }, None, Exec::Parallel).unwrap();
    let (ok, detail) = summary(&[&lift, &props]);
    verdict(5, "lifted transvections", ok, t0.elapsed(), Some(LIMIT_ESD), &format!("{} pairs, {detail}", pairs.len()));
}

fn criterion_06_todd_coxeter() {
    let st = st_table();
    let eo = f2().enumerate_group().unwrap().len();
    let order = st.table.len();
    let ok = order > 0 && order.is_multiple_of(eo);
    verdict(
        6,
        "coset enumeration of St",
        ok,
        st.elapsed,
        Some(LIMIT_TC),
        &format!("|St| = {order}, |EO| = {eo}, |ker phi| = {}", order / eo.max(1)),
    );
}

fn criterion_07_star_presentation() {
    let st = st_table();
    let t0 = Instant::now();
    let s = f2();
    let table = s.orbit(&s.e(1)).unwrap();
    let index = StarIndex::new(&s, &table).unwrap();
    let total: u128 = StarSchema::ALL.iter().map(|&sc| StarRelators::new(&s, &index, sc).unwrap().count()).sum();
    let images = StarImages::new(&s, &index, &table, Some(&st.alphabet), Exec::Parallel).unwrap();
    let relators = verify_star_relators_in_st(&s, &index, &images, Some(&st.table), Sampling::exhaustive(), Exec::Parallel).unwrap();
    assert_eq!(relators.instances_checked as u128, total);
    let gf = verify_g_of_f(&s, &index, &table).unwrap();
    let abel = verify_abelianizations(&s, &index, STAR_ABEL_RELATORS, SEED).unwrap();
    let (ok, detail) = summary(&[&relators, &gf, &abel]);
    let ok = ok && abel.results["st_star_trivial"] == true && relators.results["word_level"] == true;
    verdict(7, "star presentation", ok, t0.elapsed() + st.elapsed, Some(LIMIT_STAR), &format!("{total} relators, {detail}"));
}

fn criterion_08_homotope_tower() {
    let t0 = Instant::now();
    let mut reps = Vec::new();
    for n in [4u64, 2] {
        let s = QuadSpace::split(n, 3).unwrap();
        let levels: Vec<Elem> = s.ring().elements().collect();
        reps.push(verify_homotope_relations(&s, &levels, Sampling::exhaustive(), Exec::Parallel));
    }
    let z8 = QuadSpace::split(8, 3).unwrap();
    reps.push(verify_transition_functoriality(z8.ring()).unwrap());
    reps.push(verify_ev_transition(&z8, &[Elem(1), Elem(2), Elem(4)], Exec::Parallel));
    for (n, f) in [(27u64, 3u32), (12, 2)] {
        let tower = Tower::new(QuadSpace::split(n, 3).unwrap(), Elem(f));
        reps.push(verify_action_conjugation(&tower, ACTION_SAMPLES, SEED, Exec::Parallel).unwrap());
    }
    let (ok, detail) = summary(&reps.iter().collect::<Vec<_>>());
    verdict(8, "homotope tower", ok, t0.elapsed(), Some(LIMIT_HOMOTOPE), &detail);
}

fn criterion_09_odd_form_algebra() {
    let t0 = Instant::now();
    let loc2 = localization_commutes(12, 2, 1, 0, &[], Exec::Parallel).unwrap();
    let loc3 = localization_commutes(12, 3, 1, 0, &[], Exec::Parallel).unwrap();
    let s = QuadSpace::with_ints(Ring::zn(4).unwrap(), 1, 1, &[1]).unwrap();
    let exp = delta_generators_experiment(&s, Exec::Parallel).unwrap();
    let outcome = exp.results["outcome"].as_str().unwrap_or("missing").to_string();
    let (ok, detail) = summary(&[&loc2, &loc3, &exp]);
    verdict(
        9,
        "odd form algebra",
        ok && (outcome == "equal" || outcome == "strict"),
        t0.elapsed(),
        Some(LIMIT_ODDFORM),
        &format!("{detail}, generators-only outcome over Z/4: {outcome} ({} vs {})", exp.results["delta_full"], exp.results["delta_generators_only"]),
    );
}

fn bytes(r: &SuiteReport) -> String {
    serde_json::to_string(&r.deterministic_json()).unwrap()
}

fn criterion_10_determinism() {
    let t0 = Instant::now();
    let z4 = QuadSpace::with_ints(Ring::zn(4).unwrap(), 3, 1, &[1]).unwrap();
    let f3 = QuadSpace::split(3, 3).unwrap();
    let mut same = Vec::new();
    same.push(bytes(&verify_lemma1_sampled(&z4, 500, SEED, Exec::Parallel)) == bytes(&verify_lemma1_sampled(&z4, 500, SEED, Exec::Sequential)));
    let rel = |exec| bytes(&verify_relations(&f3, &Schema::ALL, Level::ONE, Sampling::sampled(200, SEED), exec));
    same.push(rel(Exec::Parallel) == rel(Exec::Parallel));
    same.push(rel(Exec::Parallel) == rel(Exec::Sequential));
    let cfg = InstanceConfig::parse(&format!(
        "ring = Z/2\nell = 3\nsuites = orbit, lemma1, relations, tc, esd, star, homotope\nlevels = 0, 1\nsamples = 300\ncap = 1000\nstar_abel_relators = 500\nseed = {SEED}\n"
    ))
    .unwrap();
    let a = run(&cfg, Exec::Parallel).unwrap();
    let b = run(&cfg, Exec::Parallel).unwrap();
    let ja = serde_json::to_string(&a.deterministic_json()).unwrap();
    same.push(a.passed && ja == serde_json::to_string(&b.deterministic_json()).unwrap());
    let table = st_table();
    let mut x = Vec::new();
    let mut y = Vec::new();
    table.table.write_binary(&mut x).unwrap();
    let (pres, _) = st_presentation(&f2());
    todd_coxeter(&pres, TcOptions { max_cosets: MAX_COSETS, ..TcOptions::default() }).unwrap().0.write_binary(&mut y).unwrap();
    same.push(x == y);
    let ok = same.iter().all(|&s| s);
    verdict(10, "determinism", ok, t0.elapsed(), None, &format!("{} of {} repeated runs byte-identical", same.iter().filter(|&&s| s).count(), same.len()));
}

fn main() {
    let criteria: [fn(); 10] = [
        criterion_01_lemma1,
        criterion_02_phi_relations,
        criterion_03_orbit,
        criterion_04_local_transitivity,
        criterion_05_esd_lift,
        criterion_06_todd_coxeter,
        criterion_07_star_presentation,
        criterion_08_homotope_tower,
        criterion_09_odd_form_algebra,
        criterion_10_determinism,
    ];
    let failed = criteria.iter().filter(|c| std::panic::catch_unwind(c).is_err()).count();
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
