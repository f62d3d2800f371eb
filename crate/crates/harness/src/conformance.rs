//! Correct-rounding conformance of the integer-only kernels.
//!
//! posit32 results are checked against exact arithmetic rounded by the
//! reference oracle; float32 results against the host FPU (round to nearest
//! even) on cases whose hardware result is normal, plus directed edge cases
//! against the value-rounding oracle.

use positlab_core::oracle;
use positlab_core::posit::{self, PositBits};
use positlab_core::softfloat::{self, FloatBits};
use rand::Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::inputs::point_rng;
use crate::Row;

/// Random cases per work item.
const CHUNK: u64 = 1 << 14;
/// Round-trip patterns checked per random operand pair.
const ROUND_TRIP_FACTOR: u64 = 10;
/// Failing cases kept per suite for diagnostics.
const MAX_EXAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    PositAdd,
    PositSub,
    PositMul,
    PositRoundTrip,
    Sf32Add,
    Sf32Sub,
    Sf32Mul,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::PositAdd, Suite::PositSub, Suite::PositMul, Suite::PositRoundTrip, Suite::Sf32Add, Suite::Sf32Sub, Suite::Sf32Mul];

    pub fn format(self) -> &'static str {
        match self {
            Suite::PositAdd | Suite::PositSub | Suite::PositMul | Suite::PositRoundTrip => "posit32",
            _ => "float32",
        }
    }

    pub fn op(self) -> &'static str {
        match self {
            Suite::PositAdd | Suite::Sf32Add => "add",
            Suite::PositSub | Suite::Sf32Sub => "sub",
            Suite::PositMul | Suite::Sf32Mul => "mul",
            Suite::PositRoundTrip => "roundtrip",
        }
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).unwrap() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    pub suite: Suite,
    pub random: u64,
    pub directed: u64,
    pub failures: u64,
    pub examples: Vec<String>,
}

impl Tally {
    fn new(suite: Suite) -> Tally {
        Tally { suite, random: 0, directed: 0, failures: 0, examples: Vec::new() }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.random += o.random;
        self.directed += o.directed;
        self.failures += o.failures;
        self.examples.extend(o.examples);
        self.examples.truncate(MAX_EXAMPLES);
        self
    }

    fn fail(&mut self, msg: impl FnOnce() -> String) {
        self.failures += 1;
        if self.examples.len() < MAX_EXAMPLES {
            self.examples.push(msg());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformanceReport {
    pub tallies: Vec<Tally>,
}

impl ConformanceReport {
    pub fn failures(&self) -> u64 {
        self.tallies.iter().map(|t| t.failures).sum()
    }

    pub fn tally(&self, suite: Suite) -> &Tally {
        self.tallies.iter().find(|t| t.suite == suite).expect("every suite runs")
    }

    pub fn rows(&self, cfg: &RunConfig) -> Vec<Row> {
        let mut rows = Vec::new();
        for t in &self.tallies {
            for (metric, v) in [("random", t.random), ("directed", t.directed), ("failures", t.failures)] {
                rows.push(Row::new(cfg.command, t.suite.format(), None, cfg.seed, format!("{}.{metric}", t.suite.op()), v));
            }
        }
        rows
    }
}

type PositFn = fn(PositBits, PositBits) -> PositBits;

fn posit_op(suite: Suite) -> (PositFn, PositFn) {
    match suite {
        Suite::PositAdd => (posit::posit_add, oracle::posit_add_ref),
        Suite::PositSub => (posit::posit_sub, oracle::posit_sub_ref),
        Suite::PositMul => (posit::posit_mul, oracle::posit_mul_ref),
        _ => unreachable!("not a posit binary suite"),
    }
}

fn check_posit(suite: Suite, t: &mut Tally, a: PositBits, b: PositBits) {
    let (kernel, reference) = posit_op(suite);
    let (got, want) = (kernel(a, b), reference(a, b));
    if got != want {
        t.fail(|| format!("{} {a} {b}: got {got} want {want}", suite.op()));
    }
}

/// Random posit operand pairs, mixing uniform patterns, wide regimes,
/// near-equal magnitudes and near-cancelling pairs.
fn random_posit_pair(rng: &mut impl Rng) -> (PositBits, PositBits) {
    let a: u32 = rng.random();
    let b = match rng.random_range(0..4) {
        0 => rng.random(),
        1 => {
            let wide: u32 = rng.random::<u32>() >> rng.random_range(0..31);
            if rng.random() {
                wide.wrapping_neg()
            } else {
                wide
            }
        }
        2 => a ^ (rng.random::<u32>() >> rng.random_range(8..32)),
        _ => a.wrapping_neg().wrapping_add(rng.random_range(0..512u32).wrapping_sub(256)),
    };
    if rng.random_range(0..4) == 0 {
        let wide: u32 = rng.random::<u32>() >> rng.random_range(0..31);
        (PositBits(wide), PositBits(b))
    } else {
        (PositBits(a), PositBits(b))
    }
}

/// Specials, both ends of every regime run length with assorted fractions,
/// and the neighbours of minPos, maxPos and one, in both signs.
pub fn directed_posits() -> Vec<PositBits> {
    let mut v = vec![0, 0x8000_0000, 1, 2, 3, 0x7FFF_FFFF, 0x7FFF_FFFE, 0x7FFF_FFFD, 0x4000_0000, 0x3FFF_FFFF, 0x4000_0001];
    for r in 1..=30u32 {
        let free = 30 - r;
        let mask = if free == 0 { 0 } else { (1u32 << free) - 1 };
        let up = ((1u32 << r) - 1) << (31 - r);
        let down = 1u32 << free;
        for head in [up, down] {
            for tail in [0, mask, mask & 0x5555_5555, mask & 1, mask.saturating_sub(1), mask >> 1] {
                v.push(head | tail);
            }
        }
    }
    let negs: Vec<u32> = v.iter().map(|p| p.wrapping_neg()).collect();
    v.extend(negs);
    v.sort_unstable();
    v.dedup();
    v.into_iter().map(PositBits).collect()
}

fn posit_suite(suite: Suite, cfg: &RunConfig) -> Tally {
    let chunks = cfg.samples.div_ceil(CHUNK);
    let random = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::new(suite);
            let mut rng = point_rng(cfg.seed, (suite.index() << 32) | c);
            let count = CHUNK.min(cfg.samples - c * CHUNK);
            for _ in 0..count {
                let (a, b) = random_posit_pair(&mut rng);
                check_posit(suite, &mut t, a, b);
            }
            t.random = count;
            t
        })
        .reduce(|| Tally::new(suite), Tally::merge);
    let set = directed_posits();
    let directed = set
        .par_iter()
        .map(|&a| {
            let mut t = Tally::new(suite);
            let near = [a.negate(), PositBits(a.negate().0.wrapping_add(1)), PositBits(a.negate().0.wrapping_sub(1))];
            for &b in set.iter().chain(&near) {
                check_posit(suite, &mut t, a, b);
                t.directed += 1;
            }
            t
        })
        .reduce(|| Tally::new(suite), Tally::merge);
    random.merge(directed)
}

fn round_trip_suite(cfg: &RunConfig) -> Tally {
    let suite = Suite::PositRoundTrip;
    let check = |t: &mut Tally, p: PositBits| {
        let back = posit::posit_encode(posit::posit_decode(p));
        if back != p {
            t.fail(|| format!("roundtrip {p}: got {back}"));
        }
    };
    let mut tally = if cfg.exhaustive {
        let mut t = (0..1u64 << 16)
            .into_par_iter()
            .map(|hi| {
                let mut t = Tally::new(suite);
                for lo in 0..1u64 << 16 {
                    check(&mut t, PositBits(((hi << 16) | lo) as u32));
                }
                t
            })
            .reduce(|| Tally::new(suite), Tally::merge);
        t.random = 1 << 32;
        t
    } else {
        let total = cfg.samples * ROUND_TRIP_FACTOR;
        (0..total.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut t = Tally::new(suite);
                let mut rng = point_rng(cfg.seed, (suite.index() << 32) | c);
                let count = CHUNK.min(total - c * CHUNK);
                for _ in 0..count {
                    check(&mut t, PositBits(rng.random()));
                }
                t.random = count;
                t
            })
            .reduce(|| Tally::new(suite), Tally::merge)
    };
    for p in directed_posits() {
        check(&mut tally, p);
        tally.directed += 1;
    }
    tally
}

type FloatFn = fn(FloatBits, FloatBits) -> FloatBits;

fn sf32_ops(suite: Suite) -> (FloatFn, fn(f32, f32) -> f32) {
    match suite {
        Suite::Sf32Add => (softfloat::sf32_add, |x, y| x + y),
        Suite::Sf32Sub => (softfloat::sf32_sub, |x, y| x - y),
        Suite::Sf32Mul => (softfloat::sf32_mul, |x, y| x * y),
        _ => unreachable!("not a float suite"),
    }
}

fn random_normal(rng: &mut impl Rng) -> u32 {
    (rng.random::<u32>() & 0x807F_FFFF) | (rng.random_range(1..=254u32) << 23)
}

/// Random normal operands: independent, close exponents, or near-equal
/// magnitudes of either sign.
fn random_float_pair(rng: &mut impl Rng) -> (FloatBits, FloatBits) {
    let a = random_normal(rng);
    let b = match rng.random_range(0..3) {
        0 => random_normal(rng),
        1 => {
            let e = ((a >> 23) & 0xFF) as i32 + rng.random_range(-30..=30);
            (random_normal(rng) & 0x807F_FFFF) | ((e.clamp(1, 254) as u32) << 23)
        }
        _ => (a ^ (rng.random::<u32>() >> rng.random_range(9..32))) ^ (rng.random::<u32>() & 0x8000_0000),
    };
    (FloatBits(a), FloatBits(b))
}

fn float_suite(suite: Suite, cfg: &RunConfig) -> Tally {
    let (kernel, hw) = sf32_ops(suite);
    let chunks = cfg.samples.div_ceil(CHUNK);
    let random = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::new(suite);
            let mut rng = point_rng(cfg.seed, (suite.index() << 32) | c);
            let count = CHUNK.min(cfg.samples - c * CHUNK);
            while t.random < count {
                let (a, b) = random_float_pair(&mut rng);
                let want = hw(a.to_f32(), b.to_f32());
                if !want.is_normal() {
                    continue;
                }
                t.random += 1;
                let got = kernel(a, b);
                if got.0 != want.to_bits() {
                    t.fail(|| format!("{} {a} {b}: got {got} want {:08x}", suite.op(), want.to_bits()));
                }
            }
            t
        })
        .reduce(|| Tally::new(suite), Tally::merge);
    let mut directed = Tally::new(suite);
    let set = directed_floats();
    for &a in &set {
        for &b in &set {
            let exact = match suite {
                Suite::Sf32Add => a.to_real().add(&b.to_real(), 600),
                Suite::Sf32Sub => a.to_real().sub(&b.to_real(), 600),
                _ => a.to_real().mul(&b.to_real(), 64),
            };
            let (got, want) = (kernel(a, b), oracle::round_to_f32(&exact));
            if got != want {
                directed.fail(|| format!("{} {a} {b}: got {got} want {want}", suite.op()));
            }
            directed.directed += 1;
        }
    }
    random.merge(directed)
}

/// Zero, the extremes of the normal range and their neighbours, one and its
/// neighbours, and a ladder of powers of two and all-ones mantissas.
pub fn directed_floats() -> Vec<FloatBits> {
    let mut v = vec![0, 0x0080_0000, 0x0080_0001, 0x00FF_FFFF, 0x0100_0000, 0x3F80_0000, 0x3F80_0001, 0x3F7F_FFFF, 0x7F7F_FFFF, 0x7F7F_FFFE, 0x7F00_0000];
    for e in (1..=254u32).step_by(11) {
        v.push(e << 23);
        v.push((e << 23) | 0x7F_FFFF);
        v.push((e << 23) | 0x40_0001);
    }
    let negs: Vec<u32> = v.iter().filter(|&&b| b != 0).map(|b| b | 0x8000_0000).collect();
    v.extend(negs);
    v.sort_unstable();
    v.dedup();
    v.into_iter().map(FloatBits).collect()
}

/// Runs every suite.
pub fn run(cfg: &RunConfig) -> ConformanceReport {
    let tallies = Suite::ALL
        .iter()
        .map(|&s| match s {
            Suite::PositAdd | Suite::PositSub | Suite::PositMul => posit_suite(s, cfg),
            Suite::PositRoundTrip => round_trip_suite(cfg),
            _ => float_suite(s, cfg),
        })
        .collect();
    ConformanceReport { tallies }
}
