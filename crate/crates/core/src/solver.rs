//! Fixed-point computation of the fuzzy-valued recurrent fractal interpolation
//! function.
//!
//! The function is represented by its values on a node-aligned grid
//! ([`SampledFuzzyFunction`]); off-grid values are levelwise linear
//! interpolations of the two neighbouring samples. Convex combinations of
//! valid profiles are valid, so evaluation never leaves the space of fuzzy
//! numbers, and the sampled operator stays an `α`-contraction.
//!
//! When the nodes are equally spaced, every preimage `l_i⁻¹(x)` of a grid point
//! is itself a grid point and the sampled fixed point coincides with the exact
//! function on the grid. Otherwise the interpolation adds a discretization
//! error that shrinks as the grid is refined.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fuzzy::{convex_combination, FuzzyNumber};
use crate::rifs::{FuzzyDataSet, RifsSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Grid points per subinterval `I_i`.
    pub grid_density: usize,
    /// Target bound on `D(φ_k, f)` from the a-posteriori estimate.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            grid_density: 64,
            tol: 1e-8,
            max_iter: 10_000,
        }
    }
}

/// A fuzzy-valued function sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFuzzyFunction {
    grid: Vec<f64>,
    values: Vec<FuzzyNumber>,
}

impl SampledFuzzyFunction {
    pub fn new(grid: Vec<f64>, values: Vec<FuzzyNumber>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::InvalidProfile(format!(
                "grid of {} points with {} values",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = (1..grid.len()).find(|&k| !(grid[k] > grid[k - 1])) {
            return Err(Error::NotIncreasing {
                index: k,
                value: grid[k],
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_valid()) {
            return Err(Error::InvalidProfile(format!("value at grid point {k}")));
        }
        Ok(SampledFuzzyFunction { grid, values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> Result<FuzzyNumber>) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect::<Result<_>>()?;
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[FuzzyNumber] {
        &self.values
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    /// Stored value at grid points, levelwise linear interpolation in between.
    pub fn evaluate(&self, x: f64) -> Result<FuzzyNumber> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&x) {
            return Err(Error::XOutOfDomain { x, lo, hi });
        }
        Ok(self.at(locate(&self.grid, x)))
    }

    fn at(&self, loc: Locator) -> FuzzyNumber {
        if loc.t == 0.0 {
            self.values[loc.k].clone()
        } else {
            convex_combination(&self.values[loc.k], &self.values[loc.k + 1], loc.t)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Locator {
    k: usize,
    t: f64,
}

fn locate(grid: &[f64], x: f64) -> Locator {
    let last = grid.len() - 1;
    let k = grid.partition_point(|&g| g <= x);
    if k == 0 {
        return Locator { k: 0, t: 0.0 };
    }
    let k = k - 1;
    if k >= last || grid[k] == x {
        return Locator {
            k: k.min(last),
            t: 0.0,
        };
    }
    Locator {
        k,
        t: (x - grid[k]) / (grid[k + 1] - grid[k]),
    }
}

/// Grid with `density` equal steps in every `I_i`; node `x_i` sits at index `i·density`.
pub fn node_grid(data: &FuzzyDataSet, density: usize) -> Vec<f64> {
    let xs = data.xs();
    let mut grid = Vec::with_capacity(density * data.intervals() + 1);
    for w in xs.windows(2) {
        for k in 0..density {
            let t = k as f64 / density as f64;
            grid.push((1.0 - t) * w[0] + t * w[1]);
        }
    }
    grid.push(xs[xs.len() - 1]);
    grid
}

/// Levelwise piecewise-linear interpolant of the data, sampled on the node grid.
pub fn node_interpolant(spec: &RifsSpec, density: usize) -> Result<SampledFuzzyFunction> {
    if density == 0 {
        return Err(Error::BadGridDensity);
    }
    SampledFuzzyFunction::from_fn(node_grid(spec.data(), density), |x| {
        spec.node_interpolant(x)
    })
}

/// `D(φ, ψ) = sup_x d_∞(φ(x), ψ(x))`, over the shared grid or over the union
/// of both grids when they differ.
pub fn metric_d(phi: &SampledFuzzyFunction, psi: &SampledFuzzyFunction) -> f64 {
    if phi.grid == psi.grid {
        return phi
            .values
            .iter()
            .zip(&psi.values)
            .map(|(a, b)| a.d_inf(b))
            .fold(0.0, f64::max);
    }
    let mut xs: Vec<f64> = phi.grid.iter().chain(&psi.grid).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.iter()
        .filter_map(|&x| Some(phi.evaluate(x).ok()?.d_inf(&psi.evaluate(x).ok()?)))
        .fold(0.0, f64::max)
}

/// The operator `(Tφ)(x) = α_i·φ(l_i⁻¹(x)) ⊕ q_i(x)` tied to one grid, with
/// `q_i` and the preimage locations precomputed.
struct Operator {
    alpha: Vec<f64>,
    preimage: Vec<Locator>,
    q: Vec<FuzzyNumber>,
}

impl Operator {
    fn new(spec: &RifsSpec, grid: &[f64]) -> Result<Self> {
        let n = grid.len();
        let mut alpha = Vec::with_capacity(n);
        let mut preimage = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        for &x in grid {
            let i = spec.data().interval_of(x);
            alpha.push(spec.alphas()[i - 1]);
            preimage.push(locate(grid, spec.map_l_inv(i, x)?));
            q.push(spec.q_map(i, x)?);
        }
        Ok(Operator { alpha, preimage, q })
    }

    fn apply(&self, phi: &SampledFuzzyFunction) -> SampledFuzzyFunction {
        let values = (0..phi.grid.len())
            .into_par_iter()
            .with_min_len(32)
            .map(|k| {
                let pre = phi.at(self.preimage[k]);
                &pre.scaled(self.alpha[k]) + &self.q[k]
            })
            .collect();
        SampledFuzzyFunction {
            grid: phi.grid.clone(),
            values,
        }
    }
}

/// One application of the fixed-point operator on `φ`'s grid.
pub fn apply_t(spec: &RifsSpec, phi: &SampledFuzzyFunction) -> Result<SampledFuzzyFunction> {
    check_covers(spec, phi)?;
    Ok(Operator::new(spec, &phi.grid)?.apply(phi))
}

fn check_covers(spec: &RifsSpec, phi: &SampledFuzzyFunction) -> Result<()> {
    let (lo, hi) = spec.data().domain();
    if phi.domain() != (lo, hi) {
        return Err(Error::XOutOfDomain {
            x: phi.domain().0,
            lo,
            hi,
        });
    }
    Ok(())
}

/// `max_x d_∞(φ(x), α_i·φ(l_i⁻¹(x)) ⊕ q_i(x))` over `φ`'s grid, i.e. `D(φ, Tφ)`.
pub fn residual(spec: &RifsSpec, phi: &SampledFuzzyFunction) -> Result<f64> {
    Ok(metric_d(phi, &apply_t(spec, phi)?))
}

/// The functional-equation residual at arbitrary points of `[x_0, x_n]`.
pub fn residual_at(spec: &RifsSpec, phi: &SampledFuzzyFunction, xs: &[f64]) -> Result<f64> {
    check_covers(spec, phi)?;
    xs.par_iter()
        .map(|&x| {
            let i = spec.data().interval_of(x);
            let image = &phi
                .evaluate(spec.map_l_inv(i, x)?)?
                .scaled(spec.alphas()[i - 1])
                + &spec.q_map(i, x)?;
            Ok(phi.evaluate(x)?.d_inf(&image))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iterations: usize,
    /// `D(φ_{k+1}, φ_k)` for every step.
    pub successive_d: Vec<f64>,
    /// `D(f, Tf)` for the returned iterate.
    pub final_residual: f64,
    /// Contraction factor `α = max α_i`.
    pub alpha: f64,
    /// `α/(1-α)·D(φ_k, φ_{k-1})`, a bound on the distance to the sampled fixed point.
    pub a_posteriori_error: f64,
}

/// Iterates the operator from the node interpolant until the a-posteriori
/// bound drops below `opts.tol`.
pub fn solve(
    spec: &RifsSpec,
    opts: &SolveOptions,
) -> Result<(SampledFuzzyFunction, IterationReport)> {
    if opts.grid_density == 0 {
        return Err(Error::BadGridDensity);
    }
    if !(opts.tol > 0.0) {
        return Err(Error::BadTolerance(opts.tol));
    }
    spec.ensure_admissible()?;

    let mut current = node_interpolant(spec, opts.grid_density)?;
    let op = Operator::new(spec, &current.grid)?;
    let alpha = spec.alpha_max();
    let gain = alpha / (1.0 - alpha);
    let mut successive_d = Vec::new();

    for _ in 0..opts.max_iter {
        let next = op.apply(&current);
        let step = metric_d(&next, &current);
        successive_d.push(step);
        current = next;
        if gain * step <= opts.tol {
            let final_residual = metric_d(&op.apply(&current), &current);
            let report = IterationReport {
                iterations: successive_d.len(),
                successive_d,
                final_residual,
                alpha,
                a_posteriori_error: gain * step,
            };
            return Ok((current, report));
        }
    }
    Err(Error::MaxIterExceeded {
        iterations: opts.max_iter,
        last_step: successive_d.last().copied().unwrap_or(f64::NAN),
    })
}

/// Random-iteration sampler of the attractor.
///
/// From state `s` the next map index `t` is drawn with probability `p_st`; the
/// current point lies in `I_s ⊆ Ĩ_σ(t)`, so `w_t` applies to it. Points are
/// emitted after the burn-in.
pub struct ChaosGame<'a> {
    spec: &'a RifsSpec,
    rng: ChaCha8Rng,
    state: usize,
    x: f64,
    u: FuzzyNumber,
    burn_in: usize,
    remaining: usize,
}

pub fn chaos_game(
    spec: &RifsSpec,
    steps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<ChaosGame<'_>> {
    if steps <= burn_in {
        return Err(Error::BadStepCount);
    }
    let unreachable = spec.matrix().unreachable();
    if !unreachable.is_empty() {
        return Err(Error::NotIrreducible { unreachable });
    }
    spec.validate_scaling().into_result()?;
    Ok(ChaosGame {
        spec,
        rng: ChaCha8Rng::seed_from_u64(seed),
        state: 1,
        x: spec.data().x(0),
        u: spec.data().u(0).clone(),
        burn_in,
        remaining: steps - burn_in,
    })
}

impl ChaosGame<'_> {
    fn step(&mut self) -> Result<()> {
        let row = self.spec.matrix().row(self.state);
        let r: f64 = self.rng.gen();
        let mut acc = 0.0;
        let mut next = row.iter().rposition(|&p| p > 0.0).unwrap_or(0) + 1;
        for (k, &p) in row.iter().enumerate() {
            acc += p;
            if p > 0.0 && r < acc {
                next = k + 1;
                break;
            }
        }
        let (x, u) = self.spec.w_map(next, self.x, &self.u)?;
        self.state = next;
        self.x = x;
        self.u = u;
        Ok(())
    }
}

impl Iterator for ChaosGame<'_> {
    type Item = Result<(f64, FuzzyNumber)>;

    fn next(&mut self) -> Option<Self::Item> {
        while self.burn_in > 0 {
            self.burn_in -= 1;
            if let Err(e) = self.step() {
                self.remaining = 0;
                return Some(Err(e));
            }
        }
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        Some(self.step().map(|_| (self.x, self.u.clone())))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

/// Lower and upper λ-level curves of a sampled function.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTable {
    pub xs: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// `lower[j][k]` is `f(xs[k])⁻(lambdas[j])`.
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
}

impl LevelTable {
    /// First `(λ index pair, x index)` where a higher-λ band is not inside a
    /// lower-λ band (or a band is inverted), with slack `tol`.
    pub fn nesting_violation(&self, tol: f64) -> Option<((usize, usize), usize)> {
        let mut order: Vec<usize> = (0..self.lambdas.len()).collect();
        order.sort_by(|&a, &b| self.lambdas[a].total_cmp(&self.lambdas[b]));
        for k in 0..self.xs.len() {
            for &j in &order {
                if self.lower[j][k] > self.upper[j][k] + tol {
                    return Some(((j, j), k));
                }
            }
            for w in order.windows(2) {
                let (a, b) = (w[0], w[1]);
                if self.lower[b][k] < self.lower[a][k] - tol
                    || self.upper[b][k] > self.upper[a][k] + tol
                {
                    return Some(((a, b), k));
                }
            }
        }
        None
    }
}

pub fn export_level_sets(phi: &SampledFuzzyFunction, lambdas: &[f64]) -> Result<LevelTable> {
    let mut lower = Vec::with_capacity(lambdas.len());
    let mut upper = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let cuts = phi
            .values
            .iter()
            .map(|v| v.level(l))
            .collect::<Result<Vec<_>>>()?;
        lower.push(cuts.iter().map(|c| c.lo).collect());
        upper.push(cuts.iter().map(|c| c.hi).collect());
    }
    Ok(LevelTable {
        xs: phi.grid.clone(),
        lambdas: lambdas.to_vec(),
        lower,
        upper,
    })
}
