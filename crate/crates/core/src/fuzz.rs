//! Seeded random instances and the cross-check harness.
//!
//! Each trial draws its own line table and a generic multisegment from a
//! ChaCha stream keyed by `(seed, trial)`, so trials are independent and can
//! run in parallel while the merged report stays byte-identical.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distinction::{
    brute_force_classify, check_conj_selfdual_necessary, classify_gl, classify_h, Mode,
    DEFAULT_ORACLE_BOUND,
};
use crate::dsl::{Binding, ExponentLit, LineDecl, Pos, SegmentLit, SigmaDecl, SourceFile};
use crate::galois::{
    bc_exists, condition_a, decompose_condition_a_witness, is_conjugate_orthogonal, to_wd,
};
use crate::generic::is_generic;
use crate::line::{CuspidalLine, LineTable, Sign};
use crate::multisegment::Multisegment;
use crate::scalar::Exponent;
use crate::segment::Segment;
use crate::Rational;

/// Exponents drawn by the generator, in halves.
const EXPONENT_HALVES: [i64; 5] = [-2, -1, 0, 1, 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GeneratorConfig {
    pub max_r: usize,
    pub max_l: u32,
    pub even_degree: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_r: 6,
            max_l: 4,
            even_degree: false,
        }
    }
}

/// Deterministic per-trial RNG.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(trial.wrapping_add(0x5851_f42d_4c95_7f2d))))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 1-3 self-dual lines with random sign and 0-2 partnered pairs, degrees 1-3.
pub fn random_line_table<R: Rng>(rng: &mut R) -> LineTable {
    let mut lines = Vec::new();
    for k in 0..rng.gen_range(1..=3) {
        let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        lines.push(CuspidalLine::self_dual(format!("a{k}"), rng.gen_range(1..=3), sign));
    }
    for k in 0..rng.gen_range(0..=2) {
        let degree = rng.gen_range(1..=3);
        lines.push(CuspidalLine::paired(format!("b{k}"), degree, format!("c{k}")));
        lines.push(CuspidalLine::paired(format!("c{k}"), degree, format!("b{k}")));
    }
    LineTable::new(lines).expect("generated tables are valid")
}

fn random_segments<R: Rng>(rng: &mut R, table: &LineTable, config: &GeneratorConfig) -> Vec<Segment<Rational>> {
    let ids: Vec<_> = table.ids().collect();
    let r = rng.gen_range(0..=config.max_r);
    let mut segs = Vec::with_capacity(r);
    while segs.len() < r {
        let line = *ids.choose(rng).expect("tables are nonempty");
        let length = rng.gen_range(1..=config.max_l);
        let halves = *EXPONENT_HALVES.choose(rng).expect("nonempty");
        let seg = Segment::new(line, length, Rational::new(halves, 2)).expect("half-integer");
        // mirrored draws make sigma-stable instances common
        let mirror = segs.len() + 2 <= r && rng.gen_bool(0.5);
        if mirror {
            segs.push(seg.sigma(table));
        }
        segs.push(seg);
    }
    segs.shuffle(rng);
    segs
}

/// A random generic multisegment; non-generic draws are redrawn.
pub fn random_generic<R: Rng>(rng: &mut R, config: &GeneratorConfig) -> Multisegment<Rational> {
    let table = Arc::new(random_line_table(rng));
    loop {
        let segs = random_segments(rng, &table, config);
        let pi = Multisegment::new(Arc::clone(&table), segs).expect("lines from table");
        if config.even_degree && pi.total_degree() % 2 != 0 {
            continue;
        }
        if is_generic(&pi).generic {
            return pi;
        }
    }
}

/// A seeded corpus of `count` generic instances.
pub fn corpus(seed: u64, count: usize, config: &GeneratorConfig) -> Vec<Multisegment<Rational>> {
    (0..count as u64)
        .into_par_iter()
        .map(|trial| random_generic(&mut trial_rng(seed, trial), config))
        .collect()
}

/// Renders a multisegment (and its line table) in the input syntax.
pub fn to_source<S: Exponent>(name: &str, pi: &Multisegment<S>) -> SourceFile {
    let table = pi.table();
    let lines = table
        .lines()
        .iter()
        .map(|l| LineDecl {
            name: l.name.clone(),
            degree: l.degree,
            sigma: match l.self_sign {
                Some(sign) => SigmaDecl::SelfDual(sign),
                None => SigmaDecl::Partner(l.sigma_partner.clone()),
            },
            pos: Pos::default(),
        })
        .collect();
    let segments: Vec<_> = pi
        .segments()
        .iter()
        .map(|s| {
            let halves = s.exponent().to_halves().expect("segments carry half-integers");
            SegmentLit {
                length: s.length(),
                line: table.name(s.line()).to_string(),
                exponent: (halves != 0).then(|| {
                    if halves % 2 == 0 {
                        ExponentLit { numer: halves / 2, halved: false }
                    } else {
                        ExponentLit { numer: halves, halved: true }
                    }
                }),
                pos: Pos::default(),
            }
        })
        .collect();
    let bindings = if segments.is_empty() {
        Vec::new()
    } else {
        vec![Binding {
            name: name.to_string(),
            segments,
            pos: Pos::default(),
        }]
    };
    SourceFile { lines, bindings }
}

fn random_name<R: Rng>(rng: &mut R) -> String {
    const FIRST: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    const REST: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789_";
    loop {
        let mut s = String::new();
        s.push(*FIRST.choose(rng).unwrap() as char);
        for _ in 0..rng.gen_range(0..6) {
            s.push(*REST.choose(rng).unwrap() as char);
        }
        if !["line", "degree", "sigma", "self", "orthogonal", "symplectic", "pi", "St"].contains(&s.as_str()) {
            return s;
        }
    }
}

/// A syntactically valid file with arbitrary (possibly unresolvable) content.
pub fn random_source<R: Rng>(rng: &mut R) -> SourceFile {
    let lines = (0..rng.gen_range(0..5))
        .map(|_| LineDecl {
            name: random_name(rng),
            degree: rng.gen_range(1..=50),
            sigma: match rng.gen_range(0..3) {
                0 => SigmaDecl::SelfDual(Sign::Plus),
                1 => SigmaDecl::SelfDual(Sign::Minus),
                _ => SigmaDecl::Partner(random_name(rng)),
            },
            pos: Pos::default(),
        })
        .collect();
    let bindings = (0..rng.gen_range(0..4))
        .map(|_| Binding {
            name: random_name(rng),
            segments: (0..rng.gen_range(1..5))
                .map(|_| SegmentLit {
                    length: rng.gen_range(1..=20),
                    line: random_name(rng),
                    exponent: rng.gen_bool(0.7).then(|| ExponentLit {
                        numer: rng.gen_range(-40..=40),
                        halved: rng.gen_bool(0.5),
                    }),
                    pos: Pos::default(),
                })
                .collect(),
            pos: Pos::default(),
        })
        .collect();
    SourceFile { lines, bindings }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub trials: u64,
    pub seed: u64,
    pub max_r: usize,
    pub max_l: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FuzzCounts {
    pub instances: u64,
    pub even_degree: u64,
    pub gl_distinguished: u64,
    pub h_distinguished: u64,
    pub condition_a: u64,
    pub b_without_a: u64,
    pub base_change: u64,
    pub oracle_skipped: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub trial: u64,
    pub check: String,
    pub instance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub config: FuzzConfig,
    pub counts: FuzzCounts,
    pub violations: Vec<Violation>,
}

impl FuzzReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

struct TrialOutcome {
    counts: FuzzCounts,
    violations: Vec<Violation>,
}

fn run_trial(config: &FuzzConfig, trial: u64) -> TrialOutcome {
    let gen = GeneratorConfig {
        max_r: config.max_r,
        max_l: config.max_l,
        even_degree: false,
    };
    let pi = random_generic(&mut trial_rng(config.seed, trial), &gen);
    let mut counts = FuzzCounts {
        instances: 1,
        ..FuzzCounts::default()
    };
    let mut failed: Vec<&str> = Vec::new();

    let oracle = |mode: Mode| {
        brute_force_classify(&pi, |s, t| mode.singleton_holds(s, t), DEFAULT_ORACLE_BOUND).ok()
    };

    let gl = classify_gl(&pi).expect("generated instances are generic");
    counts.gl_distinguished += gl.verdict as u64;
    if let Some(w) = &gl.witness {
        if !w.validate(&pi, Mode::Gl) {
            failed.push("gl witness");
        }
    }
    match oracle(Mode::Gl) {
        Some(v) if v != gl.verdict => failed.push("gl oracle"),
        Some(_) => {}
        None => counts.oracle_skipped += 1,
    }

    let wd = to_wd(&pi);
    if pi.total_degree() % 2 == 0 {
        counts.even_degree += 1;
        let h = classify_h(&pi).expect("generic, even degree");
        counts.h_distinguished += h.verdict as u64;
        if let Some(w) = &h.witness {
            if !w.validate(&pi, Mode::H) {
                failed.push("h witness");
            }
        }
        if let Some(v) = oracle(Mode::H) {
            if v != h.verdict {
                failed.push("h oracle");
            }
        }
        if h.verdict && !gl.verdict {
            failed.push("h implies gl");
        }
        if h.verdict && !check_conj_selfdual_necessary(&pi) {
            failed.push("h implies conjugate self-dual");
        }
        let a = condition_a(&pi).expect("generic, even degree");
        counts.condition_a += a as u64;
        counts.b_without_a += (h.verdict && !a) as u64;
        if a && !h.verdict {
            failed.push("condition A implies h");
        }
        if a && decompose_condition_a_witness(&pi).is_err() {
            failed.push("condition A grouping");
        }
        let bc = bc_exists(&wd).expect("even dimension");
        counts.base_change += bc as u64;
        if bc != gl.verdict {
            failed.push("gl equals base change");
        }
    } else if is_conjugate_orthogonal(&wd) != gl.verdict {
        failed.push("gl equals conjugate-orthogonal");
    }

    let instance = if failed.is_empty() {
        String::new()
    } else {
        to_source("p", &pi).to_string()
    };
    TrialOutcome {
        counts,
        violations: failed
            .into_iter()
            .map(|check| Violation {
                trial,
                check: check.to_string(),
                instance: instance.clone(),
            })
            .collect(),
    }
}

/// Runs every cross-check on `config.trials` random generic instances.
pub fn run_fuzz(config: FuzzConfig) -> FuzzReport {
    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(&config, trial))
        .collect();
    let mut counts = FuzzCounts::default();
    let mut violations = Vec::new();
    for outcome in outcomes {
        let c = outcome.counts;
        counts.instances += c.instances;
        counts.even_degree += c.even_degree;
        counts.gl_distinguished += c.gl_distinguished;
        counts.h_distinguished += c.h_distinguished;
        counts.condition_a += c.condition_a;
        counts.b_without_a += c.b_without_a;
        counts.base_change += c.base_change;
        counts.oracle_skipped += c.oracle_skipped;
        violations.extend(outcome.violations);
    }
    FuzzReport {
        config,
        counts,
        violations,
    }
}
