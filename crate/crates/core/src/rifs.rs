//! Recurrent iterated function system built from a fuzzy data set.
//!
//! Intervals are numbered `1..=n` throughout, with `I_i = [x_{i-1}, x_i]`.
//! Each interval `i` is paired with an address interval `[x_{s_i}, x_{e_i}]`
//! spanning at least two subintervals. From the data, the address map and the
//! vertical scaling factors `α_i` this module builds the affine maps `l_i`, the
//! fuzzy maps `q_i` and `F_i`, the row-stochastic transition matrix and the
//! contraction certificate for the maps `w_i = (l_i, F_i)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{convex_combination, lerp, union_levels, FuzzyNumber, PROFILE_TOL};

/// Interpolation data `{(x_i, u_i)}`, `i = 0..=n`, with all ordinates on one λ-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyDataSet {
    xs: Vec<f64>,
    us: Vec<FuzzyNumber>,
}

impl FuzzyDataSet {
    pub fn new(points: Vec<(f64, FuzzyNumber)>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::TooFewPoints(points.len()));
        }
        let (xs, us): (Vec<f64>, Vec<FuzzyNumber>) = points.into_iter().unzip();
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("abscissae"));
        }
        if let Some(k) = (1..xs.len()).find(|&k| xs[k] <= xs[k - 1]) {
            return Err(Error::NotIncreasing {
                index: k,
                value: xs[k],
            });
        }
        let grid = union_levels(us.iter().map(|u| u.levels()));
        let us = us.into_iter().map(|u| u.resample(grid.clone())).collect();
        Ok(FuzzyDataSet { xs, us })
    }

    /// Number of subintervals `n`.
    pub fn intervals(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ordinates(&self) -> &[FuzzyNumber] {
        &self.us
    }

    pub fn x(&self, k: usize) -> f64 {
        self.xs[k]
    }

    pub fn u(&self, k: usize) -> &FuzzyNumber {
        &self.us[k]
    }

    pub fn levels(&self) -> &Arc<[f64]> {
        self.us[0].levels_arc()
    }

    /// `[x_0, x_n]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Index `i` of the interval used for `x`: `x ∈ (x_{i-1}, x_i]`, with `x_0` in `I_1`.
    pub fn interval_of(&self, x: f64) -> usize {
        let k = self.xs.partition_point(|&node| node < x);
        k.clamp(1, self.intervals())
    }

    /// Same data with new abscissae.
    pub fn with_xs(&self, xs: Vec<f64>) -> Result<Self> {
        if xs.len() != self.xs.len() {
            return Err(Error::PerturbationLength {
                expected: self.xs.len(),
                got: xs.len(),
            });
        }
        Self::new(xs.into_iter().zip(self.us.iter().cloned()).collect())
    }

    /// Same abscissae with new ordinates.
    pub fn with_ordinates(&self, us: Vec<FuzzyNumber>) -> Result<Self> {
        if us.len() != self.us.len() {
            return Err(Error::PerturbationLength {
                expected: self.us.len(),
                got: us.len(),
            });
        }
        Self::new(self.xs.iter().copied().zip(us).collect())
    }
}

/// Address intervals `[x_{s_i}, x_{e_i}]` as node-index pairs, one per interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddressMap {
    entries: Vec<(usize, usize)>,
}

impl AddressMap {
    pub fn new(entries: Vec<(usize, usize)>) -> Self {
        AddressMap { entries }
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    /// `(s_i, e_i)` for interval `i` (1-based).
    pub fn get(&self, i: usize) -> (usize, usize) {
        self.entries[i - 1]
    }

    /// Checks `0 ≤ s_i < e_i ≤ n` and `e_i - s_i ≥ 2` for every interval.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.entries.len() != n {
            return Err(Error::InvalidAddress {
                interval: self.entries.len(),
                reason: format!("expected {n} address intervals, got {}", self.entries.len()),
            });
        }
        for (idx, &(s, e)) in self.entries.iter().enumerate() {
            let interval = idx + 1;
            if e > n || s >= e {
                return Err(Error::InvalidAddress {
                    interval,
                    reason: format!("need 0 <= s_i < e_i <= {n}, got s = {s}, e = {e}"),
                });
            }
            if e - s < 2 {
                return Err(Error::InvalidAddress {
                    interval,
                    reason: format!(
                        "e_i - s_i >= 2 is required (address must span at least two subintervals), got s = {s}, e = {e}"
                    ),
                });
            }
        }
        Ok(())
    }

    /// Whether `I_j ⊆ [x_{s_i}, x_{e_i}]`.
    pub fn covers(&self, i: usize, j: usize) -> bool {
        let (s, e) = self.get(i);
        s < j && j <= e
    }
}

/// Row-stochastic matrix `p_st = 1/a_s` when `I_s ⊆ Ĩ_σ(t)`, with the
/// connection sets `Λ(i) = {j : I_j ⊆ Ĩ_σ(i)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    p: Vec<f64>,
}

impl TransitionMatrix {
    pub fn from_address(address: &AddressMap) -> Result<Self> {
        let n = address.entries().len();
        let mut p = vec![0.0; n * n];
        for s in 1..=n {
            let targets: Vec<usize> = (1..=n).filter(|&t| address.covers(t, s)).collect();
            if targets.is_empty() {
                return Err(Error::DanglingInterval(s));
            }
            let weight = 1.0 / targets.len() as f64;
            for t in targets {
                p[(s - 1) * n + (t - 1)] = weight;
            }
        }
        Ok(TransitionMatrix { n, p })
    }

    /// Wraps explicit rows; used for matrices not derived from an address map.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let p = rows.iter().flat_map(|r| r.iter().copied()).collect();
        TransitionMatrix { n, p }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry `p_st` with 1-based indices.
    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.p[(s - 1) * self.n + (t - 1)]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.p[(s - 1) * self.n..s * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.p.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Intervals that are not mutually reachable with interval 1 in the
    /// directed graph `s → t` for `p_st > 0`. Empty iff the matrix is irreducible.
    pub fn unreachable(&self) -> Vec<usize> {
        let forward = self.reach(false);
        let backward = self.reach(true);
        (0..self.n)
            .filter(|&k| !(forward[k] && backward[k]))
            .map(|k| k + 1)
            .collect()
    }

    pub fn is_irreducible(&self) -> bool {
        self.n > 0 && self.unreachable().is_empty()
    }

    fn reach(&self, reverse: bool) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for b in 0..self.n {
                let w = if reverse {
                    self.p[b * self.n + a]
                } else {
                    self.p[a * self.n + b]
                };
                if w > 0.0 && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.p.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn check_irreducible(m: &TransitionMatrix) -> bool {
    m.is_irreducible()
}

/// The three sufficient conditions for the Hukuhara differences in `q_i` to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalingCondition {
    /// Length domination of the λ-cuts.
    A1,
    /// Left endpoint differences nondecreasing in λ.
    A2,
    /// Right endpoint differences nonincreasing in λ.
    A3,
}

impl fmt::Display for ScalingCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScalingCondition::A1 => "(a1)",
            ScalingCondition::A2 => "(a2)",
            ScalingCondition::A3 => "(a3)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCheck {
    pub interval: usize,
    pub condition: ScalingCondition,
    /// First offending λ, `None` when the condition holds.
    pub offending_lambda: Option<f64>,
}

impl ScalingCheck {
    pub fn passed(&self) -> bool {
        self.offending_lambda.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub checks: Vec<ScalingCheck>,
}

impl ScalingReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(ScalingCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ScalingCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn into_result(self) -> Result<()> {
        match self.failures().next() {
            None => Ok(()),
            Some(c) => Err(Error::ScalingConditionsViolated {
                interval: c.interval,
                condition: c.condition,
                lambda: c.offending_lambda.unwrap_or(f64::NAN),
            }),
        }
    }
}

/// `θ` bound and per-map contraction coefficients of `w_i` in the metric `d_θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionCertificate {
    /// `(1 - max c_l) / max(L_q · c_l)`; infinite when every `L_q` vanishes.
    pub theta_max: f64,
    pub theta: f64,
    pub coefficients: Vec<f64>,
    pub max_coefficient: f64,
}

/// `d_θ((x, u), (y, v)) = |x - y| + θ·d_∞(u, v)`.
pub fn d_theta(theta: f64, a: (f64, &FuzzyNumber), b: (f64, &FuzzyNumber)) -> f64 {
    (a.0 - b.0).abs() + theta * a.1.d_inf(b.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RifsSpec {
    data: FuzzyDataSet,
    address: AddressMap,
    alphas: Vec<f64>,
    contraction: Vec<f64>,
    lipschitz: Vec<f64>,
    matrix: TransitionMatrix,
}

impl RifsSpec {
    /// Validates the structure and derives `c_l`, `L_q` and the transition
    /// matrix. Scaling conditions and irreducibility are reported separately
    /// (see [`RifsSpec::validate_scaling`] and [`RifsSpec::ensure_admissible`]).
    pub fn new(data: FuzzyDataSet, address: AddressMap, alphas: Vec<f64>) -> Result<Self> {
        let n = data.intervals();
        address.validate(n)?;
        if alphas.len() != n {
            return Err(Error::AlphaCount {
                expected: n,
                got: alphas.len(),
            });
        }
        for (k, &a) in alphas.iter().enumerate() {
            if !(0.0..1.0).contains(&a) {
                return Err(Error::AlphaOutOfRange {
                    interval: k + 1,
                    value: a,
                });
            }
        }
        let matrix = TransitionMatrix::from_address(&address)?;
        let contraction = (1..=n)
            .map(|i| {
                let (s, e) = address.get(i);
                (data.x(i) - data.x(i - 1)) / (data.x(e) - data.x(s))
            })
            .collect();
        let mut spec = RifsSpec {
            data,
            address,
            alphas,
            contraction,
            lipschitz: Vec::new(),
            matrix,
        };
        spec.lipschitz = (1..=n).map(|i| spec.lipschitz_formula(i)).collect();
        Ok(spec)
    }

    pub fn data(&self) -> &FuzzyDataSet {
        &self.data
    }

    pub fn address(&self) -> &AddressMap {
        &self.address
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn intervals(&self) -> usize {
        self.data.intervals()
    }

    /// `α = max α_i`.
    pub fn alpha_max(&self) -> f64 {
        self.alphas.iter().copied().fold(0.0, f64::max)
    }

    /// Contraction factor `c_l_i` of the affine map `l_i`.
    pub fn contraction_factor(&self, i: usize) -> f64 {
        self.contraction[i - 1]
    }

    pub fn contraction_factors(&self) -> &[f64] {
        &self.contraction
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    /// `Λ(i) = {j : I_j ⊆ Ĩ_σ(i)}`, 1-based.
    pub fn connections(&self, i: usize) -> Vec<usize> {
        let (s, e) = self.address.get(i);
        (s + 1..=e).collect()
    }

    /// Address interval `[x_{s_i}, x_{e_i}]`.
    pub fn address_interval(&self, i: usize) -> (f64, f64) {
        let (s, e) = self.address.get(i);
        (self.data.x(s), self.data.x(e))
    }

    pub fn with_alphas(&self, alphas: Vec<f64>) -> Result<Self> {
        RifsSpec::new(self.data.clone(), self.address.clone(), alphas)
    }

    pub fn with_data(&self, data: FuzzyDataSet) -> Result<Self> {
        RifsSpec::new(data, self.address.clone(), self.alphas.clone())
    }

    fn check_interval(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.intervals() {
            return Err(Error::IntervalOutOfRange(i));
        }
        Ok(())
    }

    fn check_in(x: f64, lo: f64, hi: f64) -> Result<()> {
        let slack = 1e-12 * (hi - lo);
        if x < lo - slack || x > hi + slack || x.is_nan() {
            return Err(Error::XOutOfDomain { x, lo, hi });
        }
        Ok(())
    }

    /// `l_i(x)`, the affine map of `[x_{s_i}, x_{e_i}]` onto `I_i`.
    pub fn map_l(&self, i: usize, x: f64) -> Result<f64> {
        self.check_interval(i)?;
        let (a, b) = self.address_interval(i);
        Self::check_in(x, a, b)?;
        let t = ((x - a) / (b - a)).clamp(0.0, 1.0);
        Ok(lerp(self.data.x(i - 1), self.data.x(i), t))
    }

    /// `l_i⁻¹(x)` for `x ∈ I_i`.
    pub fn map_l_inv(&self, i: usize, x: f64) -> Result<f64> {
        self.check_interval(i)?;
        let (lo, hi) = (self.data.x(i - 1), self.data.x(i));
        Self::check_in(x, lo, hi)?;
        let t = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
        let (a, b) = self.address_interval(i);
        Ok(lerp(a, b, t))
    }

    /// Checks the scaling conditions at every grid λ for every interval.
    pub fn validate_scaling(&self) -> ScalingReport {
        let mut checks = Vec::with_capacity(3 * self.intervals());
        let levels = self.data.levels();
        for i in 1..=self.intervals() {
            let alpha = self.alphas[i - 1];
            let (s, e) = self.address.get(i);
            let pairs = [
                (self.data.u(i - 1), self.data.u(s)),
                (self.data.u(i), self.data.u(e)),
            ];

            let mut a1 = None;
            let mut a2 = None;
            let mut a3 = None;
            for (k, &lambda) in levels.iter().enumerate() {
                for (u, v) in pairs {
                    let len_u = u.upper()[k] - u.lower()[k];
                    let len_v = alpha * (v.upper()[k] - v.lower()[k]);
                    if a1.is_none() && len_u < len_v - PROFILE_TOL {
                        a1 = Some(lambda);
                    }
                    if k > 0 {
                        let lo_now = u.lower()[k] - alpha * v.lower()[k];
                        let lo_prev = u.lower()[k - 1] - alpha * v.lower()[k - 1];
                        if a2.is_none() && lo_now < lo_prev - PROFILE_TOL {
                            a2 = Some(lambda);
                        }
                        let hi_now = u.upper()[k] - alpha * v.upper()[k];
                        let hi_prev = u.upper()[k - 1] - alpha * v.upper()[k - 1];
                        if a3.is_none() && hi_now > hi_prev + PROFILE_TOL {
                            a3 = Some(lambda);
                        }
                    }
                }
            }
            for (condition, offending_lambda) in [
                (ScalingCondition::A1, a1),
                (ScalingCondition::A2, a2),
                (ScalingCondition::A3, a3),
            ] {
                checks.push(ScalingCheck {
                    interval: i,
                    condition,
                    offending_lambda,
                });
            }
        }
        ScalingReport { checks }
    }

    /// `q_i(x)` for `x ∈ I_i`: the linear interpolant of `u_{i-1}, u_i` minus
    /// (Hukuhara) `α_i` times the linear interpolant of `u_{s_i}, u_{e_i}` at `l_i⁻¹(x)`.
    pub fn q_map(&self, i: usize, x: f64) -> Result<FuzzyNumber> {
        let pre = self.map_l_inv(i, x)?;
        let (lo, hi) = (self.data.x(i - 1), self.data.x(i));
        let t = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
        let (s, e) = self.address.get(i);
        let (a, b) = self.address_interval(i);
        let t_pre = ((pre - a) / (b - a)).clamp(0.0, 1.0);

        let chord = convex_combination(self.data.u(i - 1), self.data.u(i), t);
        let address_chord = convex_combination(self.data.u(s), self.data.u(e), t_pre);
        chord.hukuhara_diff(&address_chord.scaled(self.alphas[i - 1]))
    }

    /// `F_i(x, u) = α_i·u ⊕ q_i(l_i(x))` for `x` in the address interval.
    pub fn f_map(&self, i: usize, x: f64, u: &FuzzyNumber) -> Result<FuzzyNumber> {
        let lx = self.map_l(i, x)?;
        let q = self.q_map(i, lx)?;
        Ok(&u.scaled(self.alphas[i - 1]) + &q)
    }

    /// `w_i(x, u) = (l_i(x), F_i(x, u))`.
    pub fn w_map(&self, i: usize, x: f64, u: &FuzzyNumber) -> Result<(f64, FuzzyNumber)> {
        Ok((self.map_l(i, x)?, self.f_map(i, x, u)?))
    }

    /// Lipschitz constant `L_q_i`.
    pub fn lipschitz_q(&self, i: usize) -> f64 {
        self.lipschitz[i - 1]
    }

    pub fn lipschitz_constants(&self) -> &[f64] {
        &self.lipschitz
    }

    /// `L_q = max L_q_i`.
    pub fn lipschitz_max(&self) -> f64 {
        self.lipschitz.iter().copied().fold(0.0, f64::max)
    }

    fn lipschitz_formula(&self, i: usize) -> f64 {
        let alpha = self.alphas[i - 1];
        let (s, e) = self.address.get(i);
        let (prev, cur) = (self.data.u(i - 1), self.data.u(i));
        let (us, ue) = (self.data.u(s), self.data.u(e));
        let top = prev.levels().len() - 1;
        // endpoint at λ = 0 (index 0) or λ = 1 (index top)
        let right = |k: usize| {
            (
                cur.upper()[k] - alpha * ue.upper()[k],
                prev.upper()[k] - alpha * us.upper()[k],
            )
        };
        let left = |k: usize| {
            (
                cur.lower()[k] - alpha * ue.lower()[k],
                prev.lower()[k] - alpha * us.lower()[k],
            )
        };
        let terms = [
            right(top).0 - right(0).1,
            right(0).0 - right(top).1,
            left(top).0 - left(0).1,
            left(0).0 - left(top).1,
        ];
        let width = self.data.x(i) - self.data.x(i - 1);
        terms.iter().fold(0.0, |m: f64, t| m.max(t.abs())) / width
    }

    /// Contraction certificate with the default `θ = θ_max / 2`.
    pub fn contraction_certificate(&self) -> Result<ContractionCertificate> {
        self.contraction_certificate_with(None)
    }

    /// Contraction certificate for a chosen `θ` (default `θ_max / 2`; `1` when
    /// every `L_q_i` is zero and `θ_max` is unbounded).
    pub fn contraction_certificate_with(
        &self,
        theta: Option<f64>,
    ) -> Result<ContractionCertificate> {
        let c_max = self.contraction.iter().copied().fold(0.0, f64::max);
        let denom = self
            .lipschitz
            .iter()
            .zip(&self.contraction)
            .map(|(l, c)| l * c)
            .fold(0.0, f64::max);
        let theta_max = if denom > 0.0 {
            (1.0 - c_max) / denom
        } else {
            f64::INFINITY
        };
        let theta = theta.unwrap_or(if theta_max.is_finite() {
            theta_max / 2.0
        } else {
            1.0
        });
        let coefficients: Vec<f64> = (0..self.intervals())
            .map(|k| {
                let c = self.contraction[k];
                (c + theta * self.lipschitz[k] * c).max(self.alphas[k])
            })
            .collect();
        if let Some((k, &c)) = coefficients.iter().enumerate().find(|(_, &c)| c >= 1.0) {
            return Err(Error::NotContractive {
                interval: k + 1,
                coefficient: c,
            });
        }
        let max_coefficient = coefficients.iter().copied().fold(0.0, f64::max);
        Ok(ContractionCertificate {
            theta_max,
            theta,
            coefficients,
            max_coefficient,
        })
    }

    /// Everything the fixed-point construction relies on: scaling conditions,
    /// an irreducible transition matrix and a contraction certificate.
    pub fn ensure_admissible(&self) -> Result<ContractionCertificate> {
        self.validate_scaling().into_result()?;
        let unreachable = self.matrix.unreachable();
        if !unreachable.is_empty() {
            return Err(Error::NotIrreducible { unreachable });
        }
        self.contraction_certificate()
    }

    /// Piecewise-linear (levelwise) interpolant of the data at `x`.
    pub fn node_interpolant(&self, x: f64) -> Result<FuzzyNumber> {
        let (lo, hi) = self.data.domain();
        Self::check_in(x, lo, hi)?;
        let i = self.data.interval_of(x);
        let (a, b) = (self.data.x(i - 1), self.data.x(i));
        let t = ((x - a) / (b - a)).clamp(0.0, 1.0);
        Ok(convex_combination(self.data.u(i - 1), self.data.u(i), t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example2;

    fn tri(c: f64, l: f64, r: f64) -> FuzzyNumber {
        FuzzyNumber::triangular(c, l, r, 16).unwrap()
    }

    fn crisp_flat_spec(n: usize) -> RifsSpec {
        let pts = (0..=n).map(|k| (k as f64, tri(1.0, 0.0, 0.0))).collect();
        let data = FuzzyDataSet::new(pts).unwrap();
        RifsSpec::new(data, AddressMap::new(vec![(0, n); n]), vec![0.0; n]).unwrap()
    }

    fn flat_spec(n: usize, alpha: f64) -> RifsSpec {
        let pts = (0..=n).map(|k| (k as f64, tri(1.0, 0.5, 0.5))).collect();
        let data = FuzzyDataSet::new(pts).unwrap();
        RifsSpec::new(data, AddressMap::new(vec![(0, n); n]), vec![alpha; n]).unwrap()
    }

    #[test]
    fn dataset_validation() {
        let u = tri(1.0, 1.0, 1.0);
        assert_eq!(
            FuzzyDataSet::new(vec![(0.0, u.clone()), (1.0, u.clone())]),
            Err(Error::TooFewPoints(2))
        );
        assert_eq!(
            FuzzyDataSet::new(vec![(0.0, u.clone()), (1.0, u.clone()), (1.0, u)]),
            Err(Error::NotIncreasing {
                index: 2,
                value: 1.0
            })
        );
    }

    #[test]
    fn address_validation() {
        let err = AddressMap::new(vec![(0, 1), (0, 2)])
            .validate(2)
            .unwrap_err();
        assert!(err.to_string().contains("e_i - s_i >= 2"), "{err}");
        assert!(AddressMap::new(vec![(0, 3), (0, 2)]).validate(2).is_err());
        assert!(AddressMap::new(vec![(0, 2)]).validate(2).is_err());
        assert!(AddressMap::new(vec![(0, 2), (0, 2)]).validate(2).is_ok());
    }

    #[test]
    fn alphas_must_be_below_one() {
        let spec = example2();
        assert_eq!(
            spec.with_alphas(vec![0.3, 1.0, 0.65, 0.5]),
            Err(Error::AlphaOutOfRange {
                interval: 2,
                value: 1.0
            })
        );
        assert!(spec.with_alphas(vec![0.3, 0.33]).is_err());
    }

    #[test]
    fn affine_maps() {
        let spec = example2();
        assert_eq!(spec.map_l(2, 0.25).unwrap(), 0.25);
        assert!((spec.map_l(2, 0.625).unwrap() - 0.375).abs() < 1e-15);
        for i in 1..=4 {
            let (s, e) = spec.address().get(i);
            let xs = spec.data().xs();
            assert_eq!(spec.map_l(i, xs[s]).unwrap(), xs[i - 1]);
            assert_eq!(spec.map_l(i, xs[e]).unwrap(), xs[i]);
            assert_eq!(spec.map_l_inv(i, xs[i]).unwrap(), xs[e]);
            assert_eq!(spec.map_l_inv(i, xs[i - 1]).unwrap(), xs[s]);
        }
        assert_eq!(spec.map_l_inv(1, 0.125).unwrap(), 0.25);
        assert!(matches!(
            spec.map_l(4, 0.1),
            Err(Error::XOutOfDomain { .. })
        ));
        assert!(matches!(
            spec.map_l_inv(1, 0.3),
            Err(Error::XOutOfDomain { .. })
        ));
        assert_eq!(spec.map_l(5, 0.5), Err(Error::IntervalOutOfRange(5)));
    }

    #[test]
    fn affine_map_is_monotone_on_address_grid() {
        let spec = example2();
        for i in 1..=4 {
            let (a, b) = spec.address_interval(i);
            let (c, d) = (spec.data().x(i - 1), spec.data().x(i));
            let slope = spec.contraction_factor(i);
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=200 {
                let x = a + (b - a) * k as f64 / 200.0;
                let y = spec.map_l(i, x).unwrap();
                assert!((y - (slope * (x - a) + c)).abs() < 1e-14);
                assert!(y >= prev && (c..=d).contains(&y));
                prev = y;
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let spec = example2();
        for i in 1..=4 {
            let (c, d) = (spec.data().x(i - 1), spec.data().x(i));
            for k in 0..=50 {
                let x = c + (d - c) * k as f64 / 50.0;
                let back = spec.map_l(i, spec.map_l_inv(i, x).unwrap()).unwrap();
                assert!((back - x).abs() <= 1e-14 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn scaling_conditions() {
        let spec = example2();
        assert!(spec.validate_scaling().all_passed());
        assert!(spec
            .with_alphas(vec![0.0; 4])
            .unwrap()
            .validate_scaling()
            .all_passed());

        let bad = spec.with_alphas(vec![0.3, 0.33, 0.65, 0.9]).unwrap();
        let report = bad.validate_scaling();
        let a1: Vec<_> = report
            .failures()
            .filter(|c| c.condition == ScalingCondition::A1)
            .collect();
        assert_eq!(a1.len(), 1);
        assert_eq!(a1[0].interval, 4);
        assert_eq!(a1[0].offending_lambda, Some(0.0));
    }

    #[test]
    fn q_map_values() {
        let spec = example2();
        let g = spec.data().levels().len() - 1;
        let expect = |c, l, r| FuzzyNumber::triangular(c, l, r, g).unwrap();
        assert!(spec.q_map(1, 0.0).unwrap().d_inf(&expect(1.4, 1.4, 1.4)) < 1e-12);
        assert!(spec.q_map(1, 0.25).unwrap().d_inf(&expect(1.5, 0.1, 0.1)) < 1e-12);

        let zero = spec.with_alphas(vec![0.0; 4]).unwrap();
        for &x in &[0.3, 0.4, 0.5] {
            let lin = zero.node_interpolant(x).unwrap();
            assert!(zero.q_map(2, x).unwrap().d_inf(&lin) < 1e-12);
        }
    }

    #[test]
    fn endpoint_conditions() {
        let spec = example2();
        let d = spec.data();
        for i in 1..=4 {
            let (s, e) = spec.address().get(i);
            assert!(spec.f_map(i, d.x(s), d.u(s)).unwrap().d_inf(d.u(i - 1)) <= 1e-10);
            assert!(spec.f_map(i, d.x(e), d.u(e)).unwrap().d_inf(d.u(i)) <= 1e-10);
        }
    }

    #[test]
    fn f_map_ignores_ordinate_when_alpha_is_zero() {
        let spec = example2().with_alphas(vec![0.0; 4]).unwrap();
        let junk = tri(100.0, 3.0, 7.0);
        let x = 0.8;
        let lx = spec.map_l(2, x).unwrap();
        assert_eq!(spec.f_map(2, x, &junk).unwrap(), spec.q_map(2, lx).unwrap());
    }

    #[test]
    fn lipschitz_constants() {
        let spec = example2();
        for (got, want) in spec
            .lipschitz_constants()
            .iter()
            .zip([6.0, 16.04, 18.6, 8.0])
        {
            assert!((got - want).abs() <= 1e-9, "{got} vs {want}");
        }
        let flat = crisp_flat_spec(3);
        assert!(flat.lipschitz_constants().iter().all(|&l| l == 0.0));
        // the endpoint formula sees the spread of non-crisp constant data
        assert!(flat_spec(3, 0.0)
            .lipschitz_constants()
            .iter()
            .all(|&l| (l - 0.5).abs() < 1e-15));
    }

    #[test]
    fn transition_matrix() {
        let spec = example2();
        let want = [
            [0.5, 0.0, 0.5, 0.0],
            [0.25, 0.25, 0.25, 0.25],
            [0.0, 0.5, 0.0, 0.5],
            [0.0, 1.0, 0.0, 0.0],
        ];
        assert_eq!(spec.matrix().rows(), want.map(|r| r.to_vec()).to_vec());
        assert_eq!(spec.connections(1), vec![1, 2]);
        assert_eq!(spec.connections(2), vec![2, 3, 4]);
        assert_eq!(spec.connections(3), vec![1, 2]);
        assert_eq!(spec.connections(4), vec![2, 3]);
        for s in 1..=4 {
            let sum: f64 = spec.matrix().row(s).iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            for t in 1..=4 {
                assert_eq!(spec.matrix().get(s, t) > 0.0, spec.address().covers(t, s));
            }
        }

        let full = flat_spec(5, 0.1);
        assert!(full
            .matrix()
            .rows()
            .iter()
            .flatten()
            .all(|&p| (p - 0.2).abs() < 1e-15));
    }

    #[test]
    fn dangling_interval() {
        let u = tri(1.0, 1.0, 1.0);
        let data = FuzzyDataSet::new((0..=4).map(|k| (k as f64, u.clone())).collect()).unwrap();
        let err = RifsSpec::new(data, AddressMap::new(vec![(0, 2); 4]), vec![0.1; 4]).unwrap_err();
        assert_eq!(err, Error::DanglingInterval(3));
    }

    #[test]
    fn irreducibility() {
        assert!(check_irreducible(example2().matrix()));
        let identity = TransitionMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        assert!(!check_irreducible(&identity));
        assert_eq!(identity.unreachable(), vec![2, 3]);
        let swap = TransitionMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(check_irreducible(&swap));
    }

    #[test]
    fn reducible_address_map() {
        let u = tri(1.0, 1.0, 1.0);
        let data = FuzzyDataSet::new((0..=4).map(|k| (k as f64, u.clone())).collect()).unwrap();
        let spec = RifsSpec::new(
            data,
            AddressMap::new(vec![(0, 2), (0, 2), (2, 4), (2, 4)]),
            vec![0.1; 4],
        )
        .unwrap();
        assert_eq!(spec.matrix().unreachable(), vec![3, 4]);
        assert_eq!(
            spec.ensure_admissible().unwrap_err(),
            Error::NotIrreducible {
                unreachable: vec![3, 4]
            }
        );
    }

    #[test]
    fn certificate() {
        let spec = example2();
        let cert = spec.contraction_certificate().unwrap();
        assert!((cert.theta_max - 0.5 / 9.3).abs() < 1e-12);
        assert!((cert.theta - cert.theta_max / 2.0).abs() < 1e-15);
        assert!(cert.coefficients.iter().all(|&c| c < 1.0));

        let flat = crisp_flat_spec(3);
        let cert = flat.contraction_certificate_with(Some(123.0)).unwrap();
        assert_eq!(cert.coefficients, flat.contraction_factors().to_vec());
        assert!(cert.theta_max.is_infinite());
    }
}
