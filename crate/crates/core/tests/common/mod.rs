//! Reference computations written directly from the definitions, sharing no
//! code with the library beyond reading the problem data.
#![allow(dead_code)]

use fuzzfrac::solver::node_interpolant;
use fuzzfrac::{AddressMap, FuzzyDataSet, FuzzyNumber, RifsSpec, SampledFuzzyFunction};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ORACLE_DEPTH: usize = 30;

/// Lower and upper endpoint arrays on the data's λ-grid.
#[derive(Debug, Clone)]
pub struct Profile {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Profile {
    pub fn dist(&self, u: &FuzzyNumber) -> f64 {
        self.lo
            .iter()
            .zip(u.lower())
            .chain(self.hi.iter().zip(u.upper()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn mix(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(a, b)| (1.0 - t) * a + t * b)
        .collect()
}

/// `f(x)` by unrolling `f(x) = α_i f(l_i⁻¹(x)) + q_i(x)` `depth` times, starting
/// from the chordal interpolant of the data. The error is at most
/// `(max α)^depth` times the distance of that start from `f`.
pub fn oracle_value(spec: &RifsSpec, x: f64, depth: usize) -> Profile {
    let xs = spec.data().xs();
    let us = spec.data().ordinates();
    let n = xs.len() - 1;
    let i = (1..=n).find(|&i| x <= xs[i]).unwrap_or(n);
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    let chord_lo = mix(us[i - 1].lower(), us[i].lower(), t);
    let chord_hi = mix(us[i - 1].upper(), us[i].upper(), t);
    if depth == 0 {
        return Profile {
            lo: chord_lo,
            hi: chord_hi,
        };
    }
    let (s, e) = spec.address().entries()[i - 1];
    let alpha = spec.alphas()[i - 1];
    let pre = xs[s] + t * (xs[e] - xs[s]);
    let inner = oracle_value(spec, pre, depth - 1);
    let addr_lo = mix(us[s].lower(), us[e].lower(), t);
    let addr_hi = mix(us[s].upper(), us[e].upper(), t);
    let lo = (0..chord_lo.len())
        .map(|k| alpha * inner.lo[k] + chord_lo[k] - alpha * addr_lo[k])
        .collect();
    let hi = (0..chord_hi.len())
        .map(|k| alpha * inner.hi[k] + chord_hi[k] - alpha * addr_hi[k])
        .collect();
    Profile { lo, hi }
}

/// Transition probabilities from the definition: from state `s`, every map
/// `t` whose address interval contains `I_s` is equally likely.
pub fn oracle_matrix(address: &[(usize, usize)]) -> Vec<Vec<f64>> {
    let n = address.len();
    (1..=n)
        .map(|s| {
            let hits: Vec<bool> = address.iter().map(|&(a, b)| a < s && s <= b).collect();
            let count = hits.iter().filter(|&&h| h).count() as f64;
            hits.iter()
                .map(|&h| if h { 1.0 / count } else { 0.0 })
                .collect()
        })
        .collect()
}

pub fn tri(c: f64, l: f64, r: f64) -> FuzzyNumber {
    FuzzyNumber::triangular(c, l, r, 64).unwrap()
}

/// Example 2 with every ordinate translated by up to 1, interior nodes moved by
/// up to 0.05 and every `α_i` scaled by a factor in `[0, 1)`. Translation keeps
/// the level lengths and shrinking `α_i` keeps the scaling conditions, so every
/// member is admissible.
pub fn random_admissible(seed: u64) -> RifsSpec {
    let base = fuzzfrac::example2();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = base.data().xs().to_vec();
    for x in &mut xs[1..4] {
        *x += rng.gen_range(-0.05..0.05);
    }
    let us = base
        .data()
        .ordinates()
        .iter()
        .map(|u| u.translate(rng.gen_range(-1.0..1.0)))
        .collect::<Vec<_>>();
    let alphas = base
        .alphas()
        .iter()
        .map(|a| a * rng.gen_range(0.0..1.0))
        .collect();
    let data = FuzzyDataSet::new(xs.into_iter().zip(us).collect()).unwrap();
    RifsSpec::new(
        data,
        AddressMap::new(base.address().entries().to_vec()),
        alphas,
    )
    .unwrap()
}

/// Fuzzy numbers on a `g`-level uniform grid, built from a center, a core
/// half-width and nonnegative increments.
pub fn arb_fuzzy(g: usize) -> impl Strategy<Value = FuzzyNumber> {
    (
        -50.0..50.0f64,
        0.0..5.0f64,
        prop::collection::vec(0.0..2.0f64, g),
        prop::collection::vec(0.0..2.0f64, g),
    )
        .prop_map(move |(c, w, dl, dh)| {
            let levels: Vec<f64> = (0..=g).map(|k| k as f64 / g as f64).collect();
            let mut lo = vec![c - w; g + 1];
            let mut hi = vec![c + w; g + 1];
            for k in (0..g).rev() {
                lo[k] = lo[k + 1] - dl[k];
                hi[k] = hi[k + 1] + dh[k];
            }
            FuzzyNumber::from_profile(levels, lo, hi).unwrap()
        })
}

/// A member of C*: the node interpolant with every value away from the two
/// endpoints shifted and widened at random.
pub fn random_member(
    spec: &RifsSpec,
    density: usize,
    rng: &mut ChaCha8Rng,
) -> SampledFuzzyFunction {
    let base = node_interpolant(spec, density).unwrap();
    let last = base.grid().len() - 1;
    let levels = spec.data().levels().clone();
    let values = base
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            if k == 0 || k == last {
                return v.clone();
            }
            let bump = tri(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..1.0),
            );
            v + &bump.resample(levels.clone())
        })
        .collect();
    SampledFuzzyFunction::new(base.grid().to_vec(), values).unwrap()
}
