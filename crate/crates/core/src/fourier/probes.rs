use rayon::prelude::*;

use super::transform::PreparedCell;
use crate::error::{Error, Result};
use crate::geometry::ConvexCell;
use crate::quadrature::{direction_nodes, QuadratureSpec};
use crate::scalar::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    pub rho: f64,
    /// `∫_Σ |χ̂_P(ρσ)| dσ`.
    pub value: f64,
    /// `value · ρ^d / (log ρ)^{d−1}`.
    pub ratio: f64,
}

/// Spherical averages of `|χ̂_P(ρσ)|` for every `ρ` in `rho_list`.
///
/// With `qspec.use_symmetry` the nodes cover one fundamental domain of the
/// cube group and the cell must be invariant under that group.
pub fn decay_probe(
    rho_list: &[f64],
    qspec: &QuadratureSpec,
    cell: &ConvexCell<f64>,
) -> Result<Vec<DecayRow>> {
    let d = cell.dim();
    if let Some(&bad) = rho_list.iter().find(|&&r| !(r >= 2.0) || !r.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "decay probe needs every rho >= 2, got {bad}"
        )));
    }
    if qspec.use_symmetry && !cube_symmetric(cell) {
        return Err(Error::InvalidQuadrature(
            "symmetry reduction needs a cell invariant under the cube group; disable symmetry".into(),
        ));
    }
    let prepared = PreparedCell::new(cell)?;
    let nodes = direction_nodes(d, qspec)?;
    rho_list
        .iter()
        .map(|&rho| {
            let terms: Vec<f64> = nodes
                .par_iter()
                .map(|(s, w)| {
                    let xi: Vec<f64> = s.components().iter().map(|&x| rho * x).collect();
                    w * prepared.transform(&xi).norm()
                })
                .collect();
            let mut acc = CompensatedSum::new();
            for t in terms {
                acc.add(t);
            }
            let value = acc.value();
            let ratio = value * rho.powi(d as i32) / rho.ln().powi(d as i32 - 1);
            Ok(DecayRow { rho, value, ratio })
        })
        .collect()
}

/// Whether the vertex set is fixed by every coordinate transposition and sign flip.
fn cube_symmetric(cell: &ConvexCell<f64>) -> bool {
    let d = cell.dim();
    let verts = cell.vertices();
    let has = |p: &[f64]| {
        verts
            .iter()
            .any(|v| v.iter().zip(p).all(|(a, b)| (a - b).abs() < 1e-9))
    };
    verts.iter().all(|v| {
        let mut flip = v.clone();
        flip[0] = -flip[0];
        if !has(&flip) {
            return false;
        }
        (0..d - 1).all(|j| {
            let mut sw = v.clone();
            sw.swap(j, j + 1);
            has(&sw)
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumRow {
    pub m: u32,
    /// `Σ |m|^{-d}` over nonnegative integer vectors with `0 < |m| ≤ M^{d−1}`.
    pub sum: f64,
    /// `sum / log M`.
    pub ratio: f64,
}

/// Largest `M^{d−1}` accepted per dimension.
fn logsum_limit(d: usize) -> Result<u64> {
    match d {
        2 => Ok(10_000),
        3 => Ok(100),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

pub fn logsum_probe(d: usize, m_list: &[u32]) -> Result<Vec<LogSumRow>> {
    let limit = logsum_limit(d)?;
    m_list
        .iter()
        .map(|&m| {
            if m < 2 {
                return Err(Error::InvalidSpec(format!("log-sum probe needs M >= 2, got {m}")));
            }
            let radius = (m as u64)
                .checked_pow(d as u32 - 1)
                .filter(|&r| r <= limit)
                .ok_or_else(|| {
                    Error::Resource(format!(
                        "log-sum probe needs M^(d-1) <= {limit} for d = {d}, got M = {m}"
                    ))
                })?;
            let sum = lattice_power_sum(d, radius);
            Ok(LogSumRow {
                m,
                sum,
                ratio: sum / (m as f64).ln(),
            })
        })
        .collect()
}

/// `Σ |m|^{-d}` over `m ∈ Z_{≥0}^d`, `0 < |m|² ≤ R²`, with exact integer norms.
fn lattice_power_sum(d: usize, radius: u64) -> f64 {
    let r2 = radius * radius;
    let mut acc = CompensatedSum::new();
    let mut m = vec![0u64; d];
    loop {
        let n2: u64 = m.iter().map(|&x| x * x).sum();
        if n2 > 0 && n2 <= r2 {
            acc.add((n2 as f64).powf(-(d as f64) / 2.0));
        }
        // odometer that resets a digit once its square alone leaves the ball
        let mut j = 0;
        loop {
            if j == d {
                return acc.value();
            }
            m[j] += 1;
            let n2: u64 = m.iter().map(|&x| x * x).sum();
            if n2 <= r2 {
                break;
            }
            m[j] = 0;
            j += 1;
        }
    }
}
