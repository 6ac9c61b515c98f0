//! Seeded system corpora shared by the integration tests.
#![allow(dead_code)]

use dsff::funcspace::{FuncTable, StateIndexing, StateMap};
use dsff::gf::{Elem, Field, FieldSpec};
use dsff::specfile::load_system;
use dsff::system::Dsff;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x5eed_f1e1;

pub struct Case {
    pub name: String,
    pub sys: Dsff,
}

pub fn field(q: u32) -> Field {
    match q {
        4 => Field::new(&FieldSpec::extension(2, 2, vec![1, 1, 1])).unwrap(),
        p => Field::new(&FieldSpec::prime(p)).unwrap(),
    }
}

fn field_line(q: u32) -> &'static str {
    match q {
        2 => "field p=2 m=1",
        3 => "field p=3 m=1",
        4 => "field p=2 m=2 modulus=1,1,1",
        _ => unreachable!(),
    }
}

/// Every system on `F_2^2` with one output: all 256 transition maps times all
/// 16 output functions.
pub fn exhaustive_binary_pairs() -> Vec<Case> {
    let f = Field::gf2();
    let idx = StateIndexing::new(&f, 2).unwrap();
    let mut out = Vec::with_capacity(256 * 16);
    for t in 0..256usize {
        let next: Vec<usize> = (0..4).map(|s| (t >> (2 * s)) & 3).collect();
        for g in 0..16u32 {
            let map = StateMap::new(&idx, next.clone()).unwrap();
            let table = FuncTable::from_fn(&idx, |s| f.element((g >> s) & 1).unwrap());
            out.push(Case { name: format!("binary t={t} g={g}"), sys: Dsff::new(map, vec![table]).unwrap() });
        }
    }
    out
}

/// Random sparse polynomial: up to three monomials of degree at most two.
fn random_poly(rng: &mut ChaCha8Rng, q: u32, n: usize) -> String {
    let terms = rng.gen_range(1..=3);
    (0..terms)
        .map(|_| {
            let mut factors = vec![rng.gen_range(0..q).to_string()];
            for _ in 0..rng.gen_range(0..=2) {
                let v = format!("x{}", rng.gen_range(1..=n));
                factors.push(if rng.gen_bool(0.2) { format!("{v}^2") } else { v });
            }
            factors.join(" * ")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn random_expression_system(rng: &mut ChaCha8Rng, q: u32, n: usize, m: usize) -> Dsff {
    let mut text = format!("{}\nvars n={n}\ntransition:\n", field_line(q));
    for i in 1..=n {
        // Mixing in a shifted coordinate keeps some systems from collapsing.
        let shift = if rng.gen_bool(0.5) { format!("x{} + ", i % n + 1) } else { String::new() };
        text.push_str(&format!("x{i}' = {shift}{}\n", random_poly(rng, q, n)));
    }
    text.push_str("output:\n");
    for j in 1..=m {
        text.push_str(&format!("z{j} = x{} + {}\n", rng.gen_range(1..=n), random_poly(rng, q, n)));
    }
    load_system(&text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

fn random_table_system(rng: &mut ChaCha8Rng, q: u32, n: usize, m: usize) -> Dsff {
    let f = field(q);
    let idx = StateIndexing::new(&f, n).unwrap();
    let size = idx.size();
    // Restricting the image keeps chain lengths varied.
    let image_size = rng.gen_range(1..=size);
    let mut image: Vec<usize> = (0..size).collect();
    image.shuffle(rng);
    image.truncate(image_size);
    let map = StateMap::from_fn(&idx, |_| *image.choose(rng).unwrap()).unwrap();
    let outputs = (0..m).map(|_| FuncTable::from_fn(&idx, |_| f.element(rng.gen_range(0..q)).unwrap())).collect();
    Dsff::new(map, outputs).unwrap()
}

/// 500 systems with `q ∈ {2,3,4}`, `n ≤ 4`, `m ≤ 2`, half from random
/// expressions and half from random tables.
pub fn random_corpus(count: usize) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..count)
        .map(|k| {
            let q = [2, 3, 4][rng.gen_range(0..3)];
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=2);
            let (kind, sys) = if k % 2 == 0 {
                ("expr", random_expression_system(&mut rng, q, n, m))
            } else {
                ("table", random_table_system(&mut rng, q, n, m))
            };
            Case { name: format!("random #{k} {kind} q={q} n={n} m={m}"), sys }
        })
        .collect()
}

/// Random `F_q`-linear system `x' = A x`, `z = C x`.
pub fn random_linear(rng: &mut ChaCha8Rng, q: u32, n: usize, m: usize) -> Dsff {
    let f = field(q);
    let idx = StateIndexing::new(&f, n).unwrap();
    let mut entry = || f.element(rng.gen_range(0..q)).unwrap();
    let a: Vec<Vec<Elem>> = (0..n).map(|_| (0..n).map(|_| entry()).collect()).collect();
    let c: Vec<Vec<Elem>> = (0..m).map(|_| (0..n).map(|_| entry()).collect()).collect();
    Dsff::from_fns(
        &idx,
        m,
        |x| a.iter().map(|row| f.dot(row, x)).collect(),
        |x| c.iter().map(|row| f.dot(row, x)).collect(),
    )
    .unwrap()
}

/// Golden CLI cases: (system, golden label, subcommand, flags). The system
/// path goes right after the subcommand.
pub const GOLDEN: &[(&str, &str, &str, &[&str])] = &[
    ("lfsr", "analyze", "analyze", &[]),
    ("lfsr", "analyze-full", "analyze", &["--with-oracle", "--emit", "matrices"]),
    ("lfsr", "lor", "lor", &[]),
    ("lfsr", "oracle", "oracle", &[]),
    ("lfsr", "simulate", "simulate", &["--x0", "1,1", "--steps", "8"]),
    ("lfsr", "conjugate-check", "conjugate-check", &["--seed", "7", "--trials", "5"]),
    ("lfsr", "reconstruct", "reconstruct", &["--z", "1;0"]),
    ("lfsr", "reconstruct-inconsistent", "reconstruct", &["--z", "1;0;0"]),
    ("lfsr", "reconstruct-short", "reconstruct", &["--z", "1"]),
    ("identity", "analyze", "analyze", &[]),
    ("identity", "analyze-full", "analyze", &["--with-oracle", "--emit", "matrices"]),
    ("identity", "lor", "lor", &[]),
    ("identity", "oracle", "oracle", &[]),
    ("identity", "simulate", "simulate", &["--x0", "1,1", "--steps", "8"]),
    ("identity", "conjugate-check", "conjugate-check", &["--seed", "7", "--trials", "5"]),
    ("identity", "reconstruct", "reconstruct", &["--z", "0;0"]),
    ("product", "analyze", "analyze", &[]),
    ("product", "analyze-full", "analyze", &["--with-oracle", "--emit", "matrices"]),
    ("product", "lor", "lor", &[]),
    ("product", "oracle", "oracle", &[]),
    ("product", "simulate", "simulate", &["--x0", "1,1", "--steps", "8"]),
    ("product", "conjugate-check", "conjugate-check", &["--seed", "7", "--trials", "5"]),
    ("product", "reconstruct", "reconstruct", &["--z", "0;0"]),
    ("product", "reconstruct-unique", "reconstruct", &["--z", "1;1"]),
    ("product", "reconstruct-inconsistent", "reconstruct", &["--z", "0;1"]),
];

pub fn system_path(name: &str) -> String {
    format!("{}/examples/{name}.dsff", env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_path(name: &str, label: &str) -> String {
    format!("{}/tests/golden/{name}-{label}.txt", env!("CARGO_MANIFEST_DIR"))
}

/// Golden transcript: stdout, then stderr, then `exit:<code>`.
pub fn transcript(stdout: &str, stderr: &str, code: i32) -> String {
    format!("{stdout}{stderr}exit:{code}\n")
}
