//! Lattice points of the dilated cut cube `(M+α)·P_{σ,r}` and their
//! discrepancy against the volume.
//!
//! The point set of interest is `{m/(M+α) : ‖m‖_∞ ≤ M}` with `N = (2M+1)^d`
//! points; at `α = ½` it sits strictly inside the cube and the lattice and
//! point-set discrepancies coincide exactly.

use crate::error::{Error, Result};
use crate::geometry::{cut_volume, Direction};

/// Largest dilation integer accepted; keeps `(M+α)·√d·|m|` far below 2^53.
pub const MAX_M: u32 = 1 << 20;

/// Upper bound on materialised point sets and projection profiles.
pub const MAX_MATERIALISED: u64 = 100_000_000;

/// Relative width of the band around integer thresholds inside which a slice
/// count is settled by the exact predicate instead of `floor`.
const GUARD_BAND: f64 = 1e-10;

/// `(d, M, α)`: dimension, dilation integer and dilation offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    d: usize,
    m: u32,
    alpha: f64,
}

impl LatticeSpec {
    pub fn new(d: usize, m: u32, alpha: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidSpec(format!("dimension must be >= 2, got {d}")));
        }
        if !(1..=MAX_M).contains(&m) {
            return Err(Error::InvalidSpec(format!("M must lie in 1..={MAX_M}, got {m}")));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidSpec(format!(
                "alpha must lie in [0, 1), got {alpha}"
            )));
        }
        (2 * m as u64 + 1)
            .checked_pow(d as u32)
            .ok_or_else(|| Error::InvalidSpec(format!("(2M+1)^d overflows for d={d}, M={m}")))?;
        Ok(Self { d, m, alpha })
    }

    /// The canonical construction `α = ½`.
    pub fn half(d: usize, m: u32) -> Result<Self> {
        Self::new(d, m, 0.5)
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Dilation factor `M + α`.
    #[inline]
    pub fn dilation(&self) -> f64 {
        self.m as f64 + self.alpha
    }

    /// `N = (2M+1)^d`.
    pub fn n_points(&self) -> u64 {
        (2 * self.m as u64 + 1).pow(self.d as u32)
    }

    /// `2M + 1`, the number of lattice values per axis.
    #[inline]
    pub fn side(&self) -> u64 {
        2 * self.m as u64 + 1
    }

    fn check_direction(&self, sigma: &Direction<f64>) -> Result<()> {
        if sigma.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: sigma.dim(),
            });
        }
        Ok(())
    }
}

/// A count, its expectation, and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountResult {
    pub count: u64,
    pub expected: f64,
    pub discrepancy: f64,
}

impl CountResult {
    fn new(count: u64, expected: f64) -> Self {
        Self {
            count,
            expected,
            discrepancy: count as f64 - expected,
        }
    }
}

/// `m·σ` summed in index order; the one predicate every counting path agrees on.
#[inline]
pub(crate) fn lattice_dot(m: &[i64], sigma: &[f64]) -> f64 {
    m.iter()
        .zip(sigma)
        .fold(0.0, |acc, (&mi, &si)| acc + mi as f64 * si)
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidRadius(r));
    }
    Ok(())
}

/// Counts `{m : ‖m‖_∞ ≤ M, m·σ ≤ R}` for a fixed σ and many thresholds `R`.
///
/// The coordinate with the largest `|σ_j|` is eliminated: each slice of the
/// remaining coordinates contributes the number of admissible values of
/// `m_j`, an interval found by one division. Near-integer quotients are
/// settled with the exact predicate so results match direct enumeration.
#[derive(Debug, Clone)]
pub struct SliceCounter {
    m: i64,
    /// `|σ|`; sign flips of σ and m cancel term by term, so counts are unchanged.
    abs_sigma: Vec<f64>,
    pivot: usize,
    bases: Vec<f64>,
}

impl SliceCounter {
    pub fn new(spec: &LatticeSpec, sigma: &Direction<f64>) -> Result<Self> {
        spec.check_direction(sigma)?;
        let slices = spec.side().pow(spec.d as u32 - 1);
        if slices > MAX_MATERIALISED {
            return Err(Error::Resource(format!(
                "{slices} slices exceed the {MAX_MATERIALISED} limit"
            )));
        }
        let abs_sigma: Vec<f64> = sigma.components().iter().map(|x| x.abs()).collect();
        let pivot = abs_sigma
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("d >= 2");
        let m = spec.m as i64;
        let mut counter = Self {
            m,
            abs_sigma,
            pivot,
            bases: Vec::with_capacity(slices as usize),
        };
        let mut point = vec![0i64; spec.d];
        for idx in 0..slices {
            counter.decode(idx, &mut point);
            point[pivot] = 0;
            let base = lattice_dot(&point, &counter.abs_sigma);
            counter.bases.push(base);
        }
        Ok(counter)
    }

    fn decode(&self, mut idx: u64, point: &mut [i64]) {
        let side = (2 * self.m + 1) as u64;
        for (j, p) in point.iter_mut().enumerate() {
            if j == self.pivot {
                continue;
            }
            *p = (idx % side) as i64 - self.m;
            idx /= side;
        }
    }

    /// Number of lattice points with `m·σ ≤ threshold`.
    pub fn count(&self, threshold: f64) -> u64 {
        let s = self.abs_sigma[self.pivot];
        let m = self.m;
        let mut total = 0u64;
        let mut point: Vec<i64> = Vec::new();
        for (idx, &base) in self.bases.iter().enumerate() {
            let q = (threshold - base) / s;
            let top = if q >= (m + 1) as f64 {
                m
            } else if q < -(m + 1) as f64 {
                -m - 1
            } else {
                let k = q.floor();
                let frac = q - k;
                let band = GUARD_BAND * (1.0 + q.abs());
                let k = k as i64;
                if frac > band && 1.0 - frac > band {
                    k.clamp(-m - 1, m)
                } else {
                    if point.is_empty() {
                        point = vec![0; self.abs_sigma.len()];
                    }
                    self.decode(idx as u64, &mut point);
                    self.settle(&mut point, k.clamp(-m - 1, m), threshold)
                }
            };
            total += (top + m + 1) as u64;
        }
        total
    }

    /// Largest admissible pivot value near `k` under the exact predicate, or `-M-1`.
    fn settle(&self, point: &mut [i64], mut k: i64, threshold: f64) -> i64 {
        let m = self.m;
        let mut admits = |k: i64| {
            point[self.pivot] = k;
            lattice_dot(point, &self.abs_sigma) <= threshold
        };
        while k < m && admits(k + 1) {
            k += 1;
        }
        while k >= -m && !admits(k) {
            k -= 1;
        }
        k
    }
}

/// `card{m ∈ Z^d : ‖m‖_∞ ≤ M, m·σ ≤ (M+α)·r}`. Points on the hyperplane count as inside.
pub fn count_cut(spec: &LatticeSpec, sigma: &Direction<f64>, r: f64) -> Result<u64> {
    check_radius(r)?;
    Ok(SliceCounter::new(spec, sigma)?.count(spec.dilation() * r))
}

/// `D_{σ,r}(M) = count − (M+α)^d |P_{σ,r}|`.
pub fn lattice_discrepancy(spec: &LatticeSpec, sigma: &Direction<f64>, r: f64) -> Result<CountResult> {
    let count = count_cut(spec, sigma, r)?;
    let expected = spec.dilation().powi(spec.d as i32) * cut_volume(sigma, r)?;
    Ok(CountResult::new(count, expected))
}

/// Discrepancy of the point set `{m/(M+α)}`: `count − N 2^{-d} |P_{σ,r}|`.
pub fn point_discrepancy(spec: &LatticeSpec, sigma: &Direction<f64>, r: f64) -> Result<CountResult> {
    let count = count_cut(spec, sigma, r)?;
    let weight = spec.n_points() as f64 / 2f64.powi(spec.d as i32);
    Ok(CountResult::new(count, weight * cut_volume(sigma, r)?))
}

/// The sorted multiset `{m·σ : ‖m‖_∞ ≤ M}`.
///
/// `count_cut` for any `r` is the number of entries `≤ (M+α)r`.
pub fn projection_profile(spec: &LatticeSpec, sigma: &Direction<f64>) -> Result<Vec<f64>> {
    spec.check_direction(sigma)?;
    guard_size(spec)?;
    let mut values: Vec<f64> = lattice_points(spec)
        .map(|m| lattice_dot(&m, sigma.components()))
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Count from a projection profile; equals [`count_cut`].
pub fn count_from_profile(profile: &[f64], spec: &LatticeSpec, r: f64) -> u64 {
    let threshold = spec.dilation() * r;
    profile.partition_point(|&v| v <= threshold) as u64
}

/// The `N` points `m/(M+α)`, in lexicographic order of `m`.
pub fn point_set(spec: &LatticeSpec) -> Result<Vec<Vec<f64>>> {
    guard_size(spec)?;
    let rho = spec.dilation();
    Ok(lattice_points(spec)
        .map(|m| m.iter().map(|&x| x as f64 / rho).collect())
        .collect())
}

fn guard_size(spec: &LatticeSpec) -> Result<()> {
    if spec.n_points() > MAX_MATERIALISED {
        return Err(Error::Resource(format!(
            "(2M+1)^d = {} points exceed the {MAX_MATERIALISED} limit; use slice-wise counting",
            spec.n_points()
        )));
    }
    Ok(())
}

/// All `m` with `‖m‖_∞ ≤ M`, last coordinate fastest.
pub fn lattice_points(spec: &LatticeSpec) -> impl Iterator<Item = Vec<i64>> {
    let (d, m, side) = (spec.d, spec.m as i64, spec.side());
    (0..spec.n_points()).map(move |mut idx| {
        let mut p = vec![0i64; d];
        for j in (0..d).rev() {
            p[j] = (idx % side) as i64 - m;
            idx /= side;
        }
        p
    })
}
