//! Fuzzy numbers stored as discretized level-set profiles.
//!
//! A [`FuzzyNumber`] keeps the left and right endpoints of its λ-cuts on a
//! strictly increasing λ-grid that always contains 0 and 1. Between grid
//! points the endpoints are interpolated linearly, so any profile that is
//! piecewise linear in λ with breakpoints on the grid is represented exactly.
//! Triangular and trapezoidal numbers are linear in λ and therefore exact on
//! every grid.
//!
//! Operations on numbers with different grids first resample both onto the
//! union of the two grids.

use std::borrow::Cow;
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default number of λ subdivisions (the grid has `DEFAULT_LAMBDA_GRID + 1` points).
pub const DEFAULT_LAMBDA_GRID: usize = 64;

/// Slack for monotonicity and nesting checks on computed profiles.
pub const PROFILE_TOL: f64 = 1e-12;

/// Levels closer than this are merged when building a union grid.
const LEVEL_MERGE_TOL: f64 = 1e-12;

/// A closed interval, the carrier of a single λ-cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Uniform λ-grid with `grid_size + 1` points.
pub fn uniform_levels(grid_size: usize) -> Arc<[f64]> {
    let g = grid_size.max(1);
    (0..=g)
        .map(|k| if k == g { 1.0 } else { k as f64 / g as f64 })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyNumber {
    levels: Arc<[f64]>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl FuzzyNumber {
    /// Builds a number from explicit endpoint lists, checking every invariant
    /// (with [`PROFILE_TOL`] slack on monotonicity and nesting).
    pub fn from_profile(levels: impl Into<Arc<[f64]>>, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let levels = levels.into();
        check_levels(&levels)?;
        if lo.len() != levels.len() || hi.len() != levels.len() {
            return Err(Error::InvalidProfile(format!(
                "{} levels but {} left and {} right endpoints",
                levels.len(),
                lo.len(),
                hi.len()
            )));
        }
        if lo.iter().chain(hi.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("fuzzy profile"));
        }
        if let Some(k) = first_violation(&levels, &lo, &hi) {
            return Err(Error::InvalidProfile(format!(
                "monotonicity or nesting violated at level {}",
                levels[k]
            )));
        }
        Ok(FuzzyNumber { levels, lo, hi })
    }

    /// Builds a number from `(λ, lo, hi)` breakpoints. The breakpoints become
    /// the λ-grid; they must start at λ = 0 and end at λ = 1.
    pub fn from_breakpoints(points: &[(f64, f64, f64)]) -> Result<Self> {
        let levels: Vec<f64> = points.iter().map(|p| p.0).collect();
        let lo = points.iter().map(|p| p.1).collect();
        let hi = points.iter().map(|p| p.2).collect();
        Self::from_profile(levels, lo, hi)
    }

    /// Triangular number `(center, left_spread, right_spread)` on a uniform grid.
    pub fn triangular(center: f64, left: f64, right: f64, grid_size: usize) -> Result<Self> {
        Self::trapezoidal(center, center, left, right, grid_size)
    }

    /// Trapezoidal number with core `[core_lo, core_hi]` and the given spreads.
    pub fn trapezoidal(
        core_lo: f64,
        core_hi: f64,
        left: f64,
        right: f64,
        grid_size: usize,
    ) -> Result<Self> {
        for s in [left, right] {
            if s < 0.0 || s.is_nan() {
                return Err(Error::NegativeSpread(s));
            }
        }
        if core_hi < core_lo {
            return Err(Error::InvalidProfile(format!(
                "core [{core_lo}, {core_hi}] is empty"
            )));
        }
        if grid_size == 0 {
            return Err(Error::InvalidProfile("grid size must be at least 1".into()));
        }
        let levels = uniform_levels(grid_size);
        let lo = levels.iter().map(|l| core_lo - left * (1.0 - l)).collect();
        let hi = levels.iter().map(|l| core_hi + right * (1.0 - l)).collect();
        Self::from_profile(levels, lo, hi)
    }

    pub fn crisp(value: f64, grid_size: usize) -> Result<Self> {
        Self::triangular(value, 0.0, 0.0, grid_size)
    }

    /// The fuzzy zero on the given λ-grid.
    pub fn zero(levels: Arc<[f64]>) -> Self {
        let n = levels.len();
        FuzzyNumber {
            levels,
            lo: vec![0.0; n],
            hi: vec![0.0; n],
        }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub(crate) fn levels_arc(&self) -> &Arc<[f64]> {
        &self.levels
    }

    pub fn lower(&self) -> &[f64] {
        &self.lo
    }

    pub fn upper(&self) -> &[f64] {
        &self.hi
    }

    /// The λ-cut `[u⁻(λ), u⁺(λ)]`, interpolated between grid levels.
    pub fn level(&self, lambda: f64) -> Result<Interval> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        Ok(self.level_unchecked(lambda))
    }

    fn level_unchecked(&self, lambda: f64) -> Interval {
        let (k, t) = locate(&self.levels, lambda);
        if t == 0.0 {
            return Interval {
                lo: self.lo[k],
                hi: self.hi[k],
            };
        }
        Interval {
            lo: lerp(self.lo[k], self.lo[k + 1], t),
            hi: lerp(self.hi[k], self.hi[k + 1], t),
        }
    }

    pub fn len_level(&self, lambda: f64) -> Result<f64> {
        self.level(lambda).map(|iv| iv.len())
    }

    /// The support `[u⁻(0), u⁺(0)]`.
    pub fn support(&self) -> Interval {
        Interval {
            lo: self.lo[0],
            hi: self.hi[0],
        }
    }

    /// The core `[u⁻(1), u⁺(1)]`.
    pub fn core(&self) -> Interval {
        let k = self.levels.len() - 1;
        Interval {
            lo: self.lo[k],
            hi: self.hi[k],
        }
    }

    /// `α·u` for `α ≥ 0`.
    pub fn scale(&self, alpha: f64) -> Result<Self> {
        if alpha < 0.0 || alpha.is_nan() {
            return Err(Error::NegativeScalar(alpha));
        }
        Ok(self.scaled(alpha))
    }

    pub(crate) fn scaled(&self, alpha: f64) -> Self {
        FuzzyNumber {
            levels: self.levels.clone(),
            lo: self.lo.iter().map(|v| alpha * v).collect(),
            hi: self.hi.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Adds the crisp number `delta` (shifts every cut).
    pub fn translate(&self, delta: f64) -> Self {
        FuzzyNumber {
            levels: self.levels.clone(),
            lo: self.lo.iter().map(|v| v + delta).collect(),
            hi: self.hi.iter().map(|v| v + delta).collect(),
        }
    }

    /// The Hukuhara difference `w` with `self = other ⊕ w`, when it exists.
    pub fn hukuhara_diff(&self, other: &FuzzyNumber) -> Result<Self> {
        let (u, v) = aligned(self, other);
        let lo: Vec<f64> = u.lo.iter().zip(&v.lo).map(|(a, b)| a - b).collect();
        let hi: Vec<f64> = u.hi.iter().zip(&v.hi).map(|(a, b)| a - b).collect();
        if let Some(k) = first_violation(&u.levels, &lo, &hi) {
            return Err(Error::HukuharaNotExist {
                lambda: u.levels[k],
            });
        }
        Ok(FuzzyNumber {
            levels: u.levels.clone(),
            lo,
            hi,
        })
    }

    /// Supremum over λ of the larger endpoint gap, evaluated on the common grid.
    ///
    /// Exact for profiles that are piecewise linear on the grid, since the
    /// endpoint differences are then piecewise linear too and peak at a grid level.
    pub fn d_inf(&self, other: &FuzzyNumber) -> f64 {
        let (u, v) = aligned(self, other);
        u.lo.iter()
            .zip(&v.lo)
            .zip(u.hi.iter().zip(&v.hi))
            .map(|((a, b), (c, d))| (a - b).abs().max((c - d).abs()))
            .fold(0.0, f64::max)
    }

    /// `d_∞(u, 0)`: the largest absolute endpoint value.
    pub fn norm(&self) -> f64 {
        self.lo
            .iter()
            .chain(self.hi.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Re-expresses the profile on another λ-grid by linear interpolation.
    pub fn resample(&self, levels: Arc<[f64]>) -> Self {
        if same_levels(&self.levels, &levels) {
            return self.clone();
        }
        let (lo, hi) = levels
            .iter()
            .map(|&l| {
                let iv = self.level_unchecked(l);
                (iv.lo, iv.hi)
            })
            .unzip();
        FuzzyNumber { levels, lo, hi }
    }

    /// Checks the profile invariants, allowing [`PROFILE_TOL`] slack.
    pub fn is_valid(&self) -> bool {
        first_violation(&self.levels, &self.lo, &self.hi).is_none()
    }
}

impl fmt::Display for FuzzyNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.support();
        let c = self.core();
        write!(f, "support {s}, core {c}")
    }
}

impl Add for &FuzzyNumber {
    type Output = FuzzyNumber;

    fn add(self, rhs: &FuzzyNumber) -> FuzzyNumber {
        let (u, v) = aligned(self, rhs);
        FuzzyNumber {
            levels: u.levels.clone(),
            lo: u.lo.iter().zip(&v.lo).map(|(a, b)| a + b).collect(),
            hi: u.hi.iter().zip(&v.hi).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for FuzzyNumber {
    type Output = FuzzyNumber;

    fn add(self, rhs: FuzzyNumber) -> FuzzyNumber {
        &self + &rhs
    }
}

/// `(1 - t)·a ⊕ t·b` for `t ∈ [0, 1]`, computed levelwise.
pub fn convex_combination(a: &FuzzyNumber, b: &FuzzyNumber, t: f64) -> FuzzyNumber {
    if t == 0.0 {
        return a.clone();
    }
    if t == 1.0 {
        return b.clone();
    }
    let (a, b) = aligned(a, b);
    FuzzyNumber {
        levels: a.levels.clone(),
        lo: a
            .lo
            .iter()
            .zip(&b.lo)
            .map(|(x, y)| lerp(*x, *y, t))
            .collect(),
        hi: a
            .hi
            .iter()
            .zip(&b.hi)
            .map(|(x, y)| lerp(*x, *y, t))
            .collect(),
    }
}

/// Union of several λ-grids, merging levels closer than 1e-12.
pub fn union_levels<'a>(grids: impl IntoIterator<Item = &'a [f64]>) -> Arc<[f64]> {
    let mut all: Vec<f64> = grids.into_iter().flatten().copied().collect();
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for l in all {
        match out.last() {
            Some(&last) if l - last <= LEVEL_MERGE_TOL => {
                // keep the exact endpoint 1
                if l == 1.0 {
                    *out.last_mut().unwrap() = 1.0;
                }
            }
            _ => out.push(l),
        }
    }
    out.into()
}

pub(crate) fn aligned<'a>(
    u: &'a FuzzyNumber,
    v: &'a FuzzyNumber,
) -> (Cow<'a, FuzzyNumber>, Cow<'a, FuzzyNumber>) {
    if same_levels(&u.levels, &v.levels) {
        return (Cow::Borrowed(u), Cow::Borrowed(v));
    }
    let grid = union_levels([&u.levels[..], &v.levels[..]]);
    (
        Cow::Owned(u.resample(grid.clone())),
        Cow::Owned(v.resample(grid)),
    )
}

fn same_levels(a: &Arc<[f64]>, b: &Arc<[f64]>) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

#[inline]
pub(crate) fn lerp(a: f64, b: f64, t: f64) -> f64 {
    (1.0 - t) * a + t * b
}

/// Index `k` and weight `t` with `λ = (1 - t)·levels[k] + t·levels[k + 1]`.
fn locate(levels: &[f64], lambda: f64) -> (usize, f64) {
    let last = levels.len() - 1;
    let k = levels.partition_point(|&l| l <= lambda);
    if k == 0 {
        return (0, 0.0);
    }
    let k = k - 1;
    if k >= last || levels[k] == lambda {
        return (k.min(last), 0.0);
    }
    (k, (lambda - levels[k]) / (levels[k + 1] - levels[k]))
}

fn check_levels(levels: &[f64]) -> Result<()> {
    if levels.len() < 2 {
        return Err(Error::InvalidProfile(
            "λ-grid needs at least 2 levels".into(),
        ));
    }
    if levels[0] != 0.0 || levels[levels.len() - 1] != 1.0 {
        return Err(Error::InvalidProfile(
            "λ-grid must start at 0 and end at 1".into(),
        ));
    }
    if levels.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidProfile(
            "λ-grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// First grid index where nesting (`lo ≤ hi`) or monotonicity (lo up, hi down)
/// fails beyond [`PROFILE_TOL`].
fn first_violation(levels: &[f64], lo: &[f64], hi: &[f64]) -> Option<usize> {
    (0..levels.len()).find(|&k| {
        let nested = lo[k] <= hi[k] + PROFILE_TOL;
        let monotone =
            k == 0 || (lo[k] >= lo[k - 1] - PROFILE_TOL && hi[k] <= hi[k - 1] + PROFILE_TOL);
        !(nested && monotone)
    })
}
