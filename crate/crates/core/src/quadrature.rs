//! Integration of `|D_{σ,r}(M)|` over the sphere, the supremum scan over `r`
//! and log–log fits across `M`.
//!
//! Surface measure is unnormalised: weights sum to [`sphere_area`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{canonical_direction, cut_volume, sphere_area, Direction};
use crate::lattice::{LatticeSpec, SliceCounter};

/// Label recorded with every output that integrates over the sphere.
pub const MEASURE_CONVENTION: &str = "unnormalized-surface-measure";

pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Midpoint angles on the circle (`d = 2` only).
    AngularTrapezoid,
    /// Normalised Gaussian directions from a counter-based generator.
    MonteCarlo,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::AngularTrapezoid => "angular-trapezoid",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "angular-trapezoid" => Ok(Method::AngularTrapezoid),
            "monte-carlo" => Ok(Method::MonteCarlo),
            other => Err(Error::InvalidQuadrature(format!(
                "unknown method {other:?}; expected angular-trapezoid or monte-carlo"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadratureSpec {
    pub method: Method,
    /// Angle count (trapezoid) or sample count (Monte Carlo).
    pub nodes: usize,
    pub seed: u64,
    pub use_symmetry: bool,
}

impl QuadratureSpec {
    pub fn trapezoid(nodes: usize) -> Self {
        Self {
            method: Method::AngularTrapezoid,
            nodes,
            seed: 1,
            use_symmetry: true,
        }
    }

    pub fn monte_carlo(nodes: usize, seed: u64) -> Self {
        Self {
            method: Method::MonteCarlo,
            nodes,
            seed,
            use_symmetry: true,
        }
    }

    pub fn with_symmetry(mut self, on: bool) -> Self {
        self.use_symmetry = on;
        self
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.nodes < MIN_NODES {
            return Err(Error::InvalidQuadrature(format!(
                "need at least {MIN_NODES} nodes, got {}",
                self.nodes
            )));
        }
        if self.method == Method::AngularTrapezoid && d != 2 {
            return Err(Error::InvalidQuadrature(format!(
                "angular-trapezoid requires d = 2, got d = {d}"
            )));
        }
        Ok(())
    }
}

/// Weighted directions for `qspec`.
pub fn direction_nodes(d: usize, qspec: &QuadratureSpec) -> Result<Vec<(Direction<f64>, f64)>> {
    qspec.validate(d)?;
    Ok(match qspec.method {
        Method::AngularTrapezoid => trapezoid_nodes(qspec.nodes, qspec.use_symmetry),
        Method::MonteCarlo => {
            let w = sphere_area::<f64>(d) / qspec.nodes as f64;
            (0..qspec.nodes as u64)
                .map(|i| {
                    let s = random_direction(d, qspec.seed, i);
                    let s = if qspec.use_symmetry {
                        canonical_direction(&s).0
                    } else {
                        s
                    };
                    (s, w)
                })
                .collect()
        }
    })
}

/// `K` midpoint angles on `[0, π/4]` (weight 8·(π/4)/K each) or on the full circle.
fn trapezoid_nodes(k: usize, use_symmetry: bool) -> Vec<(Direction<f64>, f64)> {
    let kf = k as f64;
    let (arc, weight) = if use_symmetry {
        (
            std::f64::consts::FRAC_PI_4,
            8.0 * std::f64::consts::FRAC_PI_4 / kf,
        )
    } else {
        (std::f64::consts::TAU, std::f64::consts::TAU / kf)
    };
    (0..k)
        .map(|i| (Direction::from_angle((i as f64 + 0.5) * arc / kf), weight))
        .collect()
}

/// Direction number `index` of the stream keyed by `seed`; independent of
/// evaluation order.
pub fn random_direction(d: usize, seed: u64, index: u64) -> Direction<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Ok(s) = Direction::normalized(v) {
            return s;
        }
    }
}

fn check_r(d: usize, r: f64) -> Result<()> {
    if !(0.0..=(d as f64).sqrt()).contains(&r) {
        return Err(Error::InvalidRadius(r));
    }
    Ok(())
}

/// `|D_{σ,r}|` for every node (rows) and every radius (columns).
fn abs_discrepancy_table(
    spec: &LatticeSpec,
    nodes: &[(Direction<f64>, f64)],
    radii: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let rho = spec.dilation();
    let scale = rho.powi(spec.d() as i32);
    nodes
        .par_iter()
        .map(|(sigma, _)| {
            let counter = SliceCounter::new(spec, sigma)?;
            radii
                .iter()
                .map(|&r| {
                    let count = counter.count(rho * r) as f64;
                    Ok((count - scale * cut_volume(sigma, r)?).abs())
                })
                .collect()
        })
        .collect()
}

/// Weighted sums per radius, reduced in node order.
fn weighted_sums(nodes: &[(Direction<f64>, f64)], table: &[Vec<f64>], n_r: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_r];
    for ((_, w), row) in nodes.iter().zip(table) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += w * v;
        }
    }
    out
}

/// `(integral, error estimate)` at every radius.
///
/// Trapezoid error is the refinement difference `|I_K − I_{K/2}|`; Monte
/// Carlo error is the sample standard error.
fn integrate_many(spec: &LatticeSpec, radii: &[f64], qspec: &QuadratureSpec) -> Result<Vec<(f64, f64)>> {
    let d = spec.d();
    for &r in radii {
        check_r(d, r)?;
    }
    let nodes = direction_nodes(d, qspec)?;
    let table = abs_discrepancy_table(spec, &nodes, radii)?;
    let fine = weighted_sums(&nodes, &table, radii.len());
    match qspec.method {
        Method::AngularTrapezoid => {
            let coarse_nodes = trapezoid_nodes(qspec.nodes / 2, qspec.use_symmetry);
            let coarse_table = abs_discrepancy_table(spec, &coarse_nodes, radii)?;
            let coarse = weighted_sums(&coarse_nodes, &coarse_table, radii.len());
            Ok(fine
                .into_iter()
                .zip(coarse)
                .map(|(f, c)| (f, (f - c).abs()))
                .collect())
        }
        Method::MonteCarlo => {
            let n = nodes.len() as f64;
            let area = sphere_area::<f64>(d);
            Ok((0..radii.len())
                .map(|j| {
                    let mean = fine[j] / area;
                    let var = table.iter().map(|row| (row[j] - mean).powi(2)).sum::<f64>() / (n - 1.0);
                    (fine[j], area * (var / n).sqrt())
                })
                .collect())
        }
    }
}

/// `∫_Σ |D_{σ,r}(M)| dσ` and its error estimate.
pub fn integrate_abs_discrepancy(spec: &LatticeSpec, r: f64, qspec: &QuadratureSpec) -> Result<(f64, f64)> {
    Ok(integrate_many(spec, &[r], qspec)?[0])
}

/// Spherical integrals of `|D|` over a radius grid, with the grid supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyProfile {
    pub spec: LatticeSpec,
    pub qspec: QuadratureSpec,
    pub r_grid: Vec<f64>,
    /// `(integral, error estimate)` per grid radius.
    pub values: Vec<(f64, f64)>,
    /// Grid supremum: a lower bound for the true supremum over `r`.
    pub sup_value: f64,
    pub sup_r: f64,
    /// Error estimate at the supremum's grid point.
    pub sup_error: f64,
}

impl DiscrepancyProfile {
    /// Assembles a profile from per-radius values, recomputing the supremum.
    pub fn from_values(
        spec: LatticeSpec,
        qspec: QuadratureSpec,
        r_grid: Vec<f64>,
        values: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if r_grid.is_empty() || r_grid.len() != values.len() {
            return Err(Error::Contract(format!(
                "profile needs matching nonempty grid and values ({} vs {})",
                r_grid.len(),
                values.len()
            )));
        }
        let (idx, _) =
            values.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |(bi, bv), (i, &(v, _))| {
                    if v > bv {
                        (i, v)
                    } else {
                        (bi, bv)
                    }
                },
            );
        Ok(Self {
            sup_value: values[idx].0,
            sup_r: r_grid[idx],
            sup_error: values[idx].1,
            spec,
            qspec,
            r_grid,
            values,
        })
    }

    /// Spacing of the uniform radius grid.
    pub fn resolution(&self) -> f64 {
        if self.r_grid.len() < 2 {
            return 0.0;
        }
        self.r_grid[1] - self.r_grid[0]
    }
}

/// Uniform grid of `count` radii on `[0, √d]`, both endpoints included.
pub fn radius_grid(d: usize, count: usize) -> Vec<f64> {
    let top = (d as f64).sqrt();
    let last = count - 1;
    (0..count)
        .map(|i| {
            if i == last {
                top
            } else {
                top * i as f64 / last as f64
            }
        })
        .collect()
}

pub const MIN_R_COUNT: usize = 8;

/// Evaluates the spherical integral on a uniform `r` grid and reports the grid supremum.
pub fn sup_scan(spec: &LatticeSpec, r_count: usize, qspec: &QuadratureSpec) -> Result<DiscrepancyProfile> {
    if r_count < MIN_R_COUNT {
        return Err(Error::Contract(format!(
            "r_count must be >= {MIN_R_COUNT}, got {r_count}"
        )));
    }
    let r_grid = radius_grid(spec.d(), r_count);
    let values = integrate_many(spec, &r_grid, qspec)?;
    DiscrepancyProfile::from_values(*spec, *qspec, r_grid, values)
}

/// One row of a scaling fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRow {
    pub d: usize,
    pub alpha: f64,
    pub m: u32,
    pub n: u64,
    pub sup_value: f64,
    pub sup_r: f64,
    pub sup_error: f64,
    /// `S(M) / (log(2M+1))^d`.
    pub ratio_logpow: f64,
    /// `S(M) / M^{d-1}`.
    pub ratio_poly: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub rows: Vec<FitRow>,
    /// Least-squares slope of `log S(M)` against `log M`.
    pub slope: f64,
    /// Regression standard error of the slope.
    pub slope_stderr: f64,
    /// Slope uncertainty from the quadrature error at each supremum.
    pub slope_quad_error: f64,
}

impl FitReport {
    /// `max/min` of the `S(M)/(log(2M+1))^d` sequence.
    pub fn logpow_spread(&self) -> f64 {
        spread(self.rows.iter().map(|r| r.ratio_logpow))
    }

    pub fn poly_spread(&self) -> f64 {
        spread(self.rows.iter().map(|r| r.ratio_poly))
    }
}

fn spread(it: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    hi / lo
}

/// Fit inputs: `(d, α, M, sup_value, sup_r, sup_error)` per lattice size.
pub type SupSample = (usize, f64, u32, f64, f64, f64);

/// Log–log slope and ratio sequences of grid suprema across `M`.
pub fn scaling_fit(profiles: &[DiscrepancyProfile]) -> Result<FitReport> {
    let samples: Vec<SupSample> = profiles
        .iter()
        .map(|p| {
            (
                p.spec.d(),
                p.spec.alpha(),
                p.spec.m(),
                p.sup_value,
                p.sup_r,
                p.sup_error,
            )
        })
        .collect();
    fit_samples(&samples)
}

/// [`scaling_fit`] on already-extracted suprema (e.g. read back from CSV).
pub fn fit_samples(samples: &[SupSample]) -> Result<FitReport> {
    if samples.len() < 3 {
        return Err(Error::Contract(format!(
            "scaling fit needs at least 3 profiles, got {}",
            samples.len()
        )));
    }
    let (d, alpha) = (samples[0].0, samples[0].1);
    if samples.iter().any(|s| s.0 != d || s.1 != alpha) {
        return Err(Error::Contract(
            "scaling fit needs identical (d, alpha) across profiles".into(),
        ));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by_key(|s| s.2);
    if sorted.windows(2).any(|w| w[0].2 == w[1].2) {
        return Err(Error::Contract("scaling fit needs distinct M values".into()));
    }
    if sorted.iter().any(|s| !(s.3 > 0.0)) {
        return Err(Error::Contract("scaling fit needs positive suprema".into()));
    }
    let rows: Vec<FitRow> = sorted
        .iter()
        .map(|&(d, alpha, m, sup_value, sup_r, sup_error)| {
            let mf = m as f64;
            FitRow {
                d,
                alpha,
                m,
                n: (2 * m as u64 + 1).pow(d as u32),
                sup_value,
                sup_r,
                sup_error,
                ratio_logpow: sup_value / (2.0 * mf + 1.0).ln().powi(d as i32),
                ratio_poly: sup_value / mf.powi(d as i32 - 1),
            }
        })
        .collect();

    let xs: Vec<f64> = rows.iter().map(|r| (r.m as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.sup_value.ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum::<f64>()
        / sxx;
    let intercept = ybar - slope * xbar;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_stderr = if xs.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    // d(slope)/d(y_i) = (x_i - x̄)/Sxx and δy_i = δS_i / S_i
    let slope_quad_error = xs
        .iter()
        .zip(&rows)
        .map(|(x, r)| ((x - xbar) / sxx * r.sup_error / r.sup_value).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(FitReport {
        rows,
        slope,
        slope_stderr,
        slope_quad_error,
    })
}
