//! Acceptance gate: one test per criterion, each writing a PASS/FAIL line to
//! stderr (unbuffered, so the line shows up even when the test passes).

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use fleas::algebra::{count_normal_forms, free_check, verify_relations, word_matrix, Sign};
use fleas::lattice::{primitivity_index, quadruple_of};
use fleas::obstruction::{audit_orbit, square_absence_check, AUDIT_RESIDUE_BUDGET};
use fleas::orbit::{brute_orbit, is_square, search_quadruple};
use fleas::{
    cross_validate, fixtures, normalize, reduce, search, ComponentLabel, Error, Generator, Omega,
    Point, PointTriple, SearchOptions, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: u32, name: &str, passed: bool, detail: String) {
    let line = format!(
        "acceptance criterion {n:>2} [{name}]: {} ({detail})\n",
        if passed { "PASS" } else { "FAIL" }
    );
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(passed, "criterion {n} failed: {detail}");
}

fn random_word(rng: &mut impl Rng, max_len: usize) -> Word {
    let gens: Vec<Generator> = Generator::all().collect();
    let len = rng.gen_range(0..=max_len);
    Word((0..len).map(|_| gens[rng.gen_range(0..gens.len())]).collect())
}

#[test]
fn criterion_01_relations() {
    let t = Instant::now();
    let report = verify_relations();
    let elapsed = t.elapsed();
    let failures: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    verdict(
        1,
        "relations",
        failures.is_empty() && elapsed < Duration::from_secs(1),
        format!("{} identities, failures {failures:?}, {elapsed:.2?}", report.checks.len()),
    );
}

#[test]
fn criterion_02_freeness() {
    let t = Instant::now();
    let f = free_check(7).unwrap();
    let elapsed = t.elapsed();
    verdict(
        2,
        "freeness",
        f.words_per_sign == 3280 && f.is_free() && elapsed < Duration::from_secs(10),
        format!(
            "{} words per sign, {} / {} distinct, {elapsed:.2?}",
            f.words_per_sign, f.distinct_positive, f.distinct_negative
        ),
    );
}

#[test]
fn criterion_03_counting() {
    let counts: Vec<usize> = (0..=6).map(|n| count_normal_forms(n).unwrap()).collect();
    let expected: Vec<usize> = (0..=6u32).map(|n| 3usize.pow(n + 1) - 2).collect();
    verdict(3, "counting", counts == expected, format!("got {counts:?}, expected {expected:?}"));
}

#[test]
fn criterion_04_normalization() {
    let w: Word = "V W' U' U' W W W V V".parse().unwrap();
    let nf = normalize(&w);
    let example_ok = nf.body.to_string() == "W U V U U W W"
        && nf.tail == Omega::Cyc2
        && nf.matrix().unwrap() == word_matrix(&w).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    for _ in 0..10_000 {
        let w = random_word(&mut rng, 12);
        let nf = normalize(&w);
        let single_sign = nf.body.iter().map(|g| g.sign).collect::<BTreeSet<Sign>>().len() <= 1;
        if !single_sign || nf.matrix().unwrap() != word_matrix(&w).unwrap() {
            bad += 1;
        }
    }
    verdict(
        4,
        "normalization",
        example_ok && bad == 0,
        format!("worked example {}, body `{}` tail {}, {bad} of 10000 random words differ", example_ok, nf.body, nf.tail),
    );
}

#[test]
fn criterion_05_geometry_oracle() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = Vec::new();
    for (name, tri) in [("G", fixtures::g()), ("H", fixtures::h())] {
        for _ in 0..10_000 {
            let w = random_word(&mut rng, 10);
            if !cross_validate(&tri, &w).unwrap() {
                bad.push(format!("{name}: {w}"));
            }
        }
    }
    let elapsed = t.elapsed();
    verdict(
        5,
        "geometry oracle",
        bad.is_empty() && elapsed < Duration::from_secs(60),
        format!("2 x 10000 words, {} mismatches {:?}, {elapsed:.2?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()),
    );
}

#[test]
fn criterion_06_fixture_g() {
    let t = Instant::now();
    let r = search(&fixtures::g(), 4000, &SearchOptions::default()).unwrap();
    let sporadic: Vec<u64> = r.missed_non_square_areas().into_iter().filter(|&a| a <= 2000).collect();
    let squares_missed = square_absence_check(&r);
    let odd_missed = r.missed_half_integers.len();

    let k = r.component_reach(ComponentLabel::K).unwrap();
    let k_only: Vec<u64> = (0..=2000).filter(|&a| !is_square(a) && !k.contains(2 * a)).collect();
    let eq8 = vec![2, 5, 14, 19, 29, 32, 34, 80, 94, 99, 149, 179, 269, 331, 425, 439, 629, 659, 896, 1139];
    let k2 = r.component_reach(ComponentLabel::K2).unwrap();
    let k3 = r.component_reach(ComponentLabel::K3).unwrap();
    let spot = k2.contains(662) && k3.contains(662) && !k.contains(662);
    let elapsed = t.elapsed();

    verdict(
        6,
        "fixture G",
        sporadic == [5, 29, 80, 99, 179] && squares_missed && odd_missed == 0 && k_only == eq8 && spot,
        format!(
            "sporadic {sporadic:?}, squares missed {squares_missed}, odd missed {odd_missed}, \
             K alone misses {} values (match {}), 331 spot check {spot}, {elapsed:.2?}",
            k_only.len(),
            k_only == eq8
        ),
    );
}

#[test]
fn criterion_07_fixture_h_integers() {
    let r = search(&fixtures::h(), 1000, &SearchOptions::default()).unwrap();
    let missed: Vec<u64> = r.missed_integers.iter().map(|m| m.area).filter(|&a| a <= 500).collect();
    let expected = vec![0, 2, 8, 30, 32, 40, 158, 168, 190, 238, 312];
    verdict(7, "fixture H integers", missed == expected, format!("missed areas {missed:?}"));
}

#[test]
fn criterion_08_fixture_h_half_integers() {
    let t = Instant::now();
    let full = search(&fixtures::h(), 24_000, &SearchOptions::default()).unwrap();
    let elapsed = t.elapsed();
    let odd = &full.missed_half_integers;
    let count_ok = odd.len() == 39 && odd.last() == Some(&11365);

    // Interrupted and resumed run must give the same payload.
    let dir = tempfile::tempdir().unwrap();
    let paused = SearchOptions {
        checkpoint_dir: Some(dir.path().to_path_buf()),
        pause_after: Some(6000),
        ..Default::default()
    };
    let suspended = matches!(search(&fixtures::h(), 24_000, &paused), Err(Error::Suspended { .. }));
    let resumed_opts = SearchOptions { pause_after: None, resume: true, ..paused };
    let resumed = search(&fixtures::h(), 24_000, &resumed_opts).unwrap();
    let identical = resumed.payload_json() == full.payload_json();

    verdict(
        8,
        "fixture H half-integers",
        count_ok && suspended && identical && elapsed < Duration::from_secs(3600),
        format!(
            "{} odd s missed, max {:?}, resume suspended {suspended} identical {identical}, {elapsed:.2?}",
            odd.len(),
            odd.last()
        ),
    );
}

#[test]
fn criterion_09_decomposition_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    let mut failures = Vec::new();
    while checked < 24 {
        let mut p = || Point::new(rng.gen_range(0..=6), rng.gen_range(0..=6));
        let t = PointTriple::new(p(), p(), p());
        if t.is_collinear().unwrap_or(true) || !primitivity_index(&t).unwrap().is_primitive() {
            continue;
        }
        let q = reduce(quadruple_of(&t).unwrap()).unwrap().reduced;
        let brute = brute_orbit(q, 6).unwrap();
        let bound = *brute.iter().max().unwrap();
        let r = search_quadruple(q, bound, &SearchOptions::default()).unwrap();
        let outside: Vec<u64> = brute.iter().copied().filter(|&s| !r.combined.contains(s)).collect();
        if !outside.is_empty() {
            failures.push(format!("{t}: {:?}", &outside[..outside.len().min(5)]));
        }
        checked += 1;
    }
    verdict(
        9,
        "decomposition oracle",
        failures.is_empty(),
        format!("{checked} reduced primitive triangles at depth 6, failures {failures:?}"),
    );
}

#[test]
fn criterion_10_determinism() {
    let one = search(&fixtures::g(), 4000, &SearchOptions::default()).unwrap();
    let many = search(&fixtures::g(), 4000, &SearchOptions { workers: 4, ..Default::default() }).unwrap();
    let again = search(&fixtures::g(), 4000, &SearchOptions::default()).unwrap();
    let same = one.payload_json() == many.payload_json() && one.payload_json() == again.payload_json();
    verdict(10, "determinism", same, format!("1 vs 4 workers payload identical: {same}"));
}

#[test]
fn criterion_11_obstruction_audit() {
    let q = quadruple_of(&fixtures::g()).unwrap();
    let r = audit_orbit(q, 2000, &SearchOptions { workers: 4, ..Default::default() }, AUDIT_RESIDUE_BUDGET)
        .unwrap();
    let uncovered: u64 = r.sides.iter().map(|s| s.uncovered).sum();
    for v in &r.violations {
        let finding = format!(
            "finding: residue violation component {} state {} side {} case {:?}: {} is a square mod {}\n",
            v.component, v.state, v.side, v.case, v.residue, v.modulus
        );
        std::io::stderr().write_all(finding.as_bytes()).unwrap();
    }
    for (u, v) in &r.valuation.nonconforming {
        let count = r.valuation.pairs[&format!("{u},{v}")];
        let finding = format!("finding: valuation pair ({u},{v}) outside the listed pattern, {count} occurrences\n");
        std::io::stderr().write_all(finding.as_bytes()).unwrap();
    }
    verdict(
        11,
        "obstruction audit",
        r.passed(),
        format!(
            "{} states, {} residue violations, {uncovered} uncovered checks, {} valuation pairs of which {} nonconforming",
            r.states,
            r.total_violations,
            r.valuation.pairs.len(),
            r.valuation.nonconforming.len()
        ),
    );
}
