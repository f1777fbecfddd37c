//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Oracles used here are written independently of the library.

use std::panic;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use zeldist::cosets::{build_w, check_modulus_identity, enumerate_s, WCase};
use zeldist::distinction::{brute_force_classify, classify_gl, classify_h, Mode, DEFAULT_ORACLE_BOUND};
use zeldist::dsl::{parse, parse_bytes};
use zeldist::fuzz::{corpus, random_line_table, random_source, trial_rng, GeneratorConfig};
use zeldist::galois::{bc_exists, is_conjugate_orthogonal, main_theorem_check, to_wd};
use zeldist::generic::is_generic;
use zeldist::jacquet::jacquet;
use zeldist::{CuspidalLine, LineId, LineTable, Multisegment, Rational, Segment, Sign};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{} ({:.2?})", out.detail, elapsed);
    if let Some(limit) = limit {
        if elapsed > limit {
            out.ok = false;
            out.detail = format!("{}; over the {:?} limit", out.detail, limit);
        }
    }
    out
}

const CORPUS_SEED: u64 = 0x5eed_0001;

fn main_corpus() -> Vec<Multisegment> {
    corpus(
        CORPUS_SEED,
        1000,
        &GeneratorConfig {
            max_r: 6,
            max_l: 4,
            even_degree: false,
        },
    )
}

fn oracle(pi: &Multisegment, mode: Mode) -> bool {
    brute_force_classify(pi, |s, t| mode.singleton_holds(s, t), DEFAULT_ORACLE_BOUND)
        .expect("corpus instances are within the oracle bound")
}

fn criterion_1() -> Outcome {
    let pis = main_corpus();
    let mut disagreements = 0;
    let mut h_checked = 0;
    for pi in &pis {
        if classify_gl(pi).unwrap().verdict != oracle(pi, Mode::Gl) {
            disagreements += 1;
        }
        if pi.total_degree() % 2 == 0 {
            h_checked += 1;
            if classify_h(pi).unwrap().verdict != oracle(pi, Mode::H) {
                disagreements += 1;
            }
        }
    }
    outcome(
        disagreements == 0,
        format!("{} instances, {h_checked} in even degree, {disagreements} disagreements", pis.len()),
    )
}

fn criterion_2() -> Outcome {
    let pis = main_corpus();
    let mut h_true = 0;
    let mut violations = 0;
    for pi in pis.iter().filter(|p| p.total_degree() % 2 == 0) {
        if classify_h(pi).unwrap().verdict {
            h_true += 1;
            if !classify_gl(pi).unwrap().verdict {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0 && h_true > 0,
        format!("{h_true} H-distinguished instances, {violations} violations"),
    )
}

fn criterion_3() -> Outcome {
    let pis = corpus(
        0x5eed_0003,
        1000,
        &GeneratorConfig {
            max_r: 6,
            max_l: 4,
            even_degree: true,
        },
    );
    let mut a_true = 0;
    let mut violations = 0;
    for pi in &pis {
        assert_eq!(pi.total_degree() % 2, 0);
        let check = main_theorem_check(pi).unwrap();
        a_true += check.a as usize;
        if !check.consistent || (check.a && !classify_h(pi).unwrap().verdict) {
            violations += 1;
        }
    }
    outcome(
        violations == 0 && a_true > 0,
        format!("{} instances, {a_true} satisfy (A), {violations} violations", pis.len()),
    )
}

fn criterion_4() -> Outcome {
    let mut instances = 0;
    let mut failures = Vec::new();
    for m in [1u32, 3, 5, 7, 9] {
        for degree in (1..=m).filter(|d| m % d == 0 && d % 2 == 1) {
            let l = m / degree;
            let table = Arc::new(
                LineTable::new(vec![CuspidalLine::self_dual("rho", degree, Sign::Plus)]).unwrap(),
            );
            let rho = table.lookup("rho").unwrap();
            let delta = Segment::new(rho, l, Rational::zero()).unwrap();
            if delta.sign(&table) != Some(Sign::Plus) || delta.ambient_degree(&table) != m {
                failures.push(format!("m={m} deg={degree}: not an orthogonal segment of degree m"));
                continue;
            }
            let pi = Multisegment::new(table, vec![delta.clone(), delta]).unwrap();
            instances += 1;
            let check = main_theorem_check(&pi).unwrap();
            let witness_pairs = classify_h(&pi).unwrap().witness.map(|w| w.pairs.len());
            if !(check.b && !check.a && check.consistent) || witness_pairs != Some(1) {
                failures.push(format!("m={m} deg={degree}: {check:?}"));
            }
        }
    }
    outcome(
        failures.is_empty() && instances >= 10,
        if failures.is_empty() {
            format!("{instances} instances, all B and not A")
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_5() -> Outcome {
    let pis = main_corpus();
    let mut even = 0;
    let mut disagreements = 0;
    for pi in &pis {
        let gl = classify_gl(pi).unwrap().verdict;
        let wd = to_wd(pi);
        let bridge = if pi.total_degree() % 2 == 0 {
            even += 1;
            bc_exists(&wd).unwrap()
        } else {
            is_conjugate_orthogonal(&wd)
        };
        if gl != bridge {
            disagreements += 1;
        }
    }
    outcome(
        disagreements == 0,
        format!(
            "{} instances ({even} through the base-change test, the rest through conjugate-orthogonality), {disagreements} disagreements",
            pis.len()
        ),
    )
}

fn compositions(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Fixed-point-free involutions of `0..n`, as lists of pairs.
fn matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(free: &mut Vec<usize>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(acc.clone());
            return;
        }
        let a = free.remove(0);
        for k in 0..free.len() {
            let b = free.remove(k);
            acc.push((a, b));
            go(free, acc, out);
            acc.pop();
            free.insert(k, b);
        }
        free.insert(0, a);
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

/// The index set as the block-count matrices of all perfect matchings.
fn s_oracle(lambda: &[u32], matchings: &[Vec<(usize, usize)>]) -> Vec<Vec<u32>> {
    let r = lambda.len();
    let block: Vec<usize> = lambda
        .iter()
        .enumerate()
        .flat_map(|(i, &p)| std::iter::repeat(i).take(p as usize))
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    for m in matchings {
        let mut s = vec![0u32; r * r];
        for &(a, b) in m {
            s[block[a] * r + block[b]] += 1;
            s[block[b] * r + block[a]] += 1;
        }
        seen.insert(s);
    }
    seen.into_iter().collect()
}

fn double_factorial(n: u64) -> u64 {
    (1..=n).rev().step_by(2).product()
}

fn criterion_6() -> Outcome {
    let mut matrices = 0usize;
    let mut problems = Vec::new();
    for n in (2..=10u32).step_by(2) {
        let all_matchings = matchings(n as usize);
        if all_matchings.len() as u64 != double_factorial(n as u64 - 1) {
            problems.push(format!("matching oracle miscounts n={n}"));
        }
        for lambda in compositions(n) {
            let list = match enumerate_s(&lambda) {
                Ok(list) => list,
                Err(e) => {
                    problems.push(format!("{lambda:?}: {e}"));
                    continue;
                }
            };
            let got: Vec<Vec<u32>> = list.iter().map(|s| s.entries().to_vec()).collect();
            if got != s_oracle(&lambda, &all_matchings) {
                problems.push(format!("{lambda:?}: enumeration differs from matching oracle"));
            }
            if lambda.iter().all(|&p| p == 1) && got.len() as u64 != double_factorial(n as u64 - 1) {
                problems.push(format!("{lambda:?}: expected (n-1)!! matrices"));
            }
            for s in &list {
                matrices += 1;
                let datum = match build_w(s) {
                    Ok(d) => d,
                    Err(e) => {
                        problems.push(format!("{lambda:?} {:?}: {e}", s.rows()));
                        continue;
                    }
                };
                let mut sorted = datum.w.clone();
                sorted.sort_unstable();
                if sorted != (1..=n).collect::<Vec<_>>() {
                    problems.push(format!("{:?}: w is not a permutation", s.rows()));
                }
                let r = s.r();
                let t_sum: u32 = (0..r).map(|i| s.get(i, i) / 2).sum();
                let off: u32 = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).map(|(i, j)| s.get(i, j)).sum();
                let expected = [t_sum, off, t_sum, off].map(|x| x as usize);
                if datum.cases.len() != n as usize || datum.case_counts() != expected {
                    problems.push(format!("{:?}: case coverage {:?}", s.rows(), datum.case_counts()));
                }
                let first_half = datum.cases[..n as usize / 2]
                    .iter()
                    .all(|c| matches!(c, WCase::W1 | WCase::W2));
                if !first_half {
                    problems.push(format!("{:?}: second-half case in first half", s.rows()));
                }
                if datum.d.iter().sum::<u32>() != n / 2 {
                    problems.push(format!("{:?}: sum of d is not n/2", s.rows()));
                }
            }
        }
    }
    let small = [(vec![1, 1, 1, 1], 3), (vec![2, 2], 2)];
    for (lambda, count) in small {
        let got = enumerate_s(&lambda).map(|l| l.len()).unwrap_or(0);
        if got != count {
            problems.push(format!("|S({lambda:?})| = {got}, expected {count}"));
        }
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!("{matrices} matrices over all compositions of even n <= 10")
        } else {
            problems.into_iter().take(5).collect::<Vec<_>>().join("; ")
        },
    )
}

fn criterion_7() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in (2..=10u32).step_by(2) {
        for lambda in compositions(n) {
            for s in enumerate_s(&lambda).unwrap() {
                checked += 1;
                let m = check_modulus_identity(&s);
                let roots = m
                    .fixed
                    .iter()
                    .all(|f| f.square_root.map(|h| 2 * h) == Some(f.restricted));
                if !m.ok || !roots {
                    failures.push(format!("{:?}", s.rows()));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} matrices, {} failures {:?}", failures.len(), failures.iter().take(3).collect::<Vec<_>>()),
    )
}

fn half(k: i64) -> Rational {
    Rational::new(k, 2)
}

/// Support as exponents, from the top down.
fn support_desc(length: u32, e: &Rational) -> Vec<Rational> {
    (0..length as i64)
        .map(|j| e + half(length as i64 - 1) - Rational::from_integer(j))
        .collect()
}

/// Splits off the top `k` cuspidal exponents; each piece is recentred at the
/// mean of its support.
fn split_two(length: u32, e: &Rational, k: u32) -> ((u32, Rational), (u32, Rational)) {
    let supp = support_desc(length, e);
    let mean = |xs: &[Rational]| xs.iter().fold(Rational::zero(), |a, x| a + x) / Rational::from_integer(xs.len() as i64);
    let (top, bottom) = supp.split_at(k as usize);
    ((k, mean(top)), (length - k, mean(bottom)))
}

fn iterated_split(length: u32, e: &Rational, ks: &[u32]) -> Vec<(u32, Rational)> {
    match ks {
        [] => Vec::new(),
        [_] => vec![(length, *e)],
        [k, rest @ ..] => {
            let (first, remainder) = split_two(length, e, *k);
            let mut out = vec![first];
            out.extend(iterated_split(remainder.0, &remainder.1, rest));
            out
        }
    }
}

fn criterion_8() -> Outcome {
    let mut rng = trial_rng(0x5eed_0008, 0);
    let mut problems = Vec::new();
    let mut zero_checks = 0;
    for _ in 0..500 {
        let degree = rng.gen_range(1..=3u32);
        let table = LineTable::new(vec![CuspidalLine::self_dual("a", degree, Sign::Plus)]).unwrap();
        let a = table.lookup("a").unwrap();
        let length = rng.gen_range(1..=6u32);
        let e = half(rng.gen_range(-6..=6));
        let seg = Segment::new(a, length, e).unwrap();
        let mut ks = Vec::new();
        let mut left = length;
        while left > 0 {
            let k = rng.gen_range(1..=left);
            ks.push(k);
            left -= k;
        }
        let lambda: Vec<u32> = ks.iter().map(|k| k * degree).collect();
        let module = jacquet(&seg, &table, &lambda).unwrap();
        if module.is_zero() {
            problems.push(format!("{length} {e} {ks:?}: unexpected zero"));
            continue;
        }
        let factors = module.factors();
        let supp: Vec<Rational> = factors.iter().flat_map(|f| support_desc(f.length(), f.exponent())).collect();
        if supp != support_desc(length, &e) || factors.iter().any(|f| f.line() != a) {
            problems.push(format!("{length} {e} {ks:?}: support"));
        }
        let degrees: Vec<u32> = factors.iter().map(|f| f.ambient_degree(&table)).collect();
        if degrees != lambda {
            problems.push(format!("{length} {e} {ks:?}: degrees"));
        }
        let slope = factors
            .iter()
            .fold(Rational::zero(), |acc, f| acc + Rational::from_integer(f.length() as i64) * f.exponent());
        if slope != Rational::from_integer(length as i64) * e {
            problems.push(format!("{length} {e} {ks:?}: slope"));
        }
        let got: Vec<(u32, Rational)> = factors.iter().map(|f| (f.length(), *f.exponent())).collect();
        if got != iterated_split(length, &e, &ks) {
            problems.push(format!("{length} {e} {ks:?}: closed form differs from iterated splitting"));
        }
        if degree > 1 {
            let n = length * degree;
            let bad = vec![1, n - 1];
            zero_checks += 1;
            if !jacquet(&seg, &table, &bad).unwrap().is_zero() {
                problems.push(format!("{length} {e} {bad:?}: expected zero"));
            }
        }
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!("500 pairs, plus {zero_checks} incompatible compositions vanishing")
        } else {
            problems.into_iter().take(5).collect::<Vec<_>>().join("; ")
        },
    )
}

fn random_multisegment<R: Rng>(rng: &mut R) -> Multisegment {
    let table = Arc::new(random_line_table(rng));
    let ids: Vec<LineId> = table.ids().collect();
    let r = rng.gen_range(0..=6);
    let segs = (0..r)
        .map(|_| {
            let line = *ids.choose(rng).unwrap();
            Segment::new(line, rng.gen_range(1..=5), half(rng.gen_range(-4..=4))).unwrap()
        })
        .collect();
    Multisegment::new(table, segs).unwrap()
}

/// Exhaustive search over ordered pairs and all admissible `d`.
fn linked_exhaustive(pi: &Multisegment) -> bool {
    let segs = pi.segments();
    let table = pi.table();
    for (i, si) in segs.iter().enumerate() {
        for (j, sj) in segs.iter().enumerate() {
            if i == j || si.line() != sj.line() || table.degree(si.line()) != table.degree(sj.line()) {
                continue;
            }
            let (li, lj) = (si.length() as i64, sj.length() as i64);
            for d in 1..=li {
                if d < li - lj + 1 {
                    continue;
                }
                if *si.exponent() == sj.exponent() + Rational::from_integer(d) + half(lj - li) {
                    return true;
                }
            }
        }
    }
    false
}

fn criterion_9() -> Outcome {
    let mut rng = trial_rng(0x5eed_0009, 0);
    let mut problems = Vec::new();
    let mut non_generic = 0;
    for trial in 0..1000 {
        let pi = random_multisegment(&mut rng);
        let v = is_generic(&pi).generic;
        non_generic += !v as usize;
        if v == linked_exhaustive(&pi) {
            problems.push(format!("trial {trial}: fast verdict differs from exhaustive search"));
        }
        let mut shuffled = pi.segments().to_vec();
        shuffled.shuffle(&mut rng);
        if is_generic(&pi.with_segments(shuffled)).generic != v {
            problems.push(format!("trial {trial}: permutation"));
        }
        let shift = half(rng.gen_range(-5..=5));
        let twisted = pi.segments().iter().map(|s| s.twist(&shift).unwrap()).collect();
        if is_generic(&pi.with_segments(twisted)).generic != v {
            problems.push(format!("trial {trial}: twist"));
        }
        if is_generic(&pi.sigma()).generic != v {
            problems.push(format!("trial {trial}: sigma"));
        }
    }
    outcome(
        problems.is_empty() && non_generic > 0,
        if problems.is_empty() {
            format!("1000 instances, {non_generic} not generic")
        } else {
            problems.into_iter().take(5).collect::<Vec<_>>().join("; ")
        },
    )
}

fn criterion_10() -> Outcome {
    let mut rng = trial_rng(0x5eed_0010, 0);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let src = random_source(&mut rng);
        let text = src.to_string();
        match parse(&text) {
            Ok(back) if back.without_positions() == src => {}
            _ => mismatches += 1,
        }
    }

    let seeds: Vec<String> = (0..20).map(|_| random_source(&mut rng).to_string()).collect();
    let prev_hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut panics = 0;
    let mut accepted = 0;
    for k in 0..10_000 {
        let bytes: Vec<u8> = if k % 2 == 0 {
            let mut b = vec![0u8; rng.gen_range(0..200)];
            rng.fill_bytes(&mut b);
            b
        } else {
            let mut b = seeds[k % seeds.len()].clone().into_bytes();
            for _ in 0..rng.gen_range(1..4) {
                if b.is_empty() {
                    break;
                }
                let at = rng.gen_range(0..b.len());
                b[at] = rng.gen();
            }
            b
        };
        let result = panic::catch_unwind(|| {
            parse_bytes(&bytes).map(|f| f.resolve::<Rational>().is_ok())
        });
        match result {
            Err(_) => panics += 1,
            Ok(Ok(_)) => accepted += 1,
            Ok(Err(_)) => {}
        }
    }
    panic::set_hook(prev_hook);
    outcome(
        mismatches == 0 && panics == 0,
        format!("1000 files, {mismatches} round-trip mismatches; 10000 byte strings, {panics} panics, {accepted} parsed"),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("oracle equivalence", Some(Duration::from_secs(30)), criterion_1),
        ("H-distinction implies GL-distinction", None, criterion_2),
        ("condition (A) implies H-distinction", None, criterion_3),
        ("doubled odd orthogonal segments", None, criterion_4),
        ("GL-distinction equals base change", None, criterion_5),
        ("coset combinatorics", Some(Duration::from_secs(10)), criterion_6),
        ("modulus identity", None, criterion_7),
        ("Jacquet conservation", None, criterion_8),
        ("genericity invariances", None, criterion_9),
        ("parser round-trip and crash-freedom", None, criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, limit, f)) in criteria.into_iter().enumerate() {
        let label = format!("criterion {:>2}: {name}", k + 1);
        if !filter.is_empty() && !filter.iter().any(|p| label.contains(p.as_str())) {
            continue;
        }
        let out = timed(limit, f);
        println!("{} {label}: {}", if out.ok { "PASS" } else { "FAIL" }, out.detail);
        failed += !out.ok as usize;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
