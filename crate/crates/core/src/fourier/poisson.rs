use rayon::prelude::*;

use super::kernel::{hat_phi, phase, sinc_pi, SpectralKernel};
use super::transform::PreparedCell;
use crate::error::{Error, Result};
use crate::geometry::{clip_cube, Direction, ZERO_COMPONENT};
use crate::lattice::{count_cut, LatticeSpec};
use crate::scalar::{gauss_legendre_unit, CompensatedSum};

/// Largest `M` accepted by the direct smoothed sum.
pub const MAX_SMOOTHED_M: u32 = 8;

/// Largest number of frequencies summed by the general spectral side.
pub const MAX_FREQUENCIES: f64 = 2e9;

/// Upper limit on the truncation radius picked by [`truncation_for_tail`].
pub const MAX_TRUNCATION: u64 = 1 << 26;

/// Both sides of the Poisson identity at one dilation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedCount {
    pub dilation: f64,
    /// `Σ_m (Φ_M ∗ χ_{ρP})(m)`, evaluated directly in space.
    pub lhs_sum: f64,
    /// `ρ^d Σ_{‖m‖∞≤K} Φ̂_M(m) χ̂_P(ρm)`.
    pub rhs_sum: f64,
    pub truncation_radius: u64,
    /// Bound on the discarded frequencies `‖m‖∞ > K`.
    pub tail_bound: f64,
}

impl SmoothedCount {
    pub fn residual(&self) -> f64 {
        (self.lhs_sum - self.rhs_sum).abs()
    }
}

fn check_fourier_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

fn check_args(spec: &LatticeSpec, sigma: &Direction<f64>, r: f64, dilation: f64) -> Result<()> {
    check_fourier_dim(spec.d())?;
    if sigma.dim() != spec.d() {
        return Err(Error::DimensionMismatch {
            expected: spec.d(),
            got: sigma.dim(),
        });
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidRadius(r));
    }
    if !(dilation > 0.0) || !dilation.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "dilation must be positive, got {dilation}"
        )));
    }
    Ok(())
}

/// `Σ_{m ∈ Z^d} (Φ_M ∗ χ_{ρP_{σ,r}})(m)` with `ρ = dilation`.
///
/// The kernel lives on the box `m ± 1/(2L)`; points whose box sits inside or
/// outside `ρP` contribute 1 or 0, and the rest are integrated exactly.
pub fn smoothed_lattice_sum(
    spec: &LatticeSpec,
    sigma: &Direction<f64>,
    r: f64,
    dilation: f64,
) -> Result<f64> {
    check_args(spec, sigma, r, dilation)?;
    if spec.m() > MAX_SMOOTHED_M {
        return Err(Error::Resource(format!(
            "smoothed lattice sum supports M <= {MAX_SMOOTHED_M}, got {}",
            spec.m()
        )));
    }
    let d = spec.d();
    let kernel = SpectralKernel::<f64>::new(d, spec.m());
    let h = kernel.half_width();
    let rho = dilation;
    let s = sigma.components();
    let l1 = sigma.l1();
    let cut = rho * r;
    let reach = (rho + h).floor() as i64;

    let rows: Vec<f64> = (-reach..=reach)
        .into_par_iter()
        .map(|m0| {
            let mut acc = CompensatedSum::new();
            let mut m = vec![-reach; d];
            m[0] = m0;
            let mut lo = vec![0.0; d];
            let mut hi = vec![0.0; d];
            let mut coef = vec![0.0; d];
            loop {
                let dot: f64 = m.iter().zip(s).map(|(&a, &b)| a as f64 * b).sum();
                let far = m.iter().any(|&x| (x.abs() as f64) - h >= rho) || dot - h * l1 >= cut;
                if !far {
                    let inside = m.iter().all(|&x| (x.abs() as f64) + h <= rho) && dot + h * l1 <= cut;
                    if inside {
                        acc.add(1.0);
                    } else {
                        // standardised coordinates u = (t − m)/h ∈ [-1, 1]
                        for j in 0..d {
                            let c = m[j] as f64;
                            lo[j] = ((-rho - c) / h).max(-1.0);
                            hi[j] = ((rho - c) / h).min(1.0);
                            coef[j] = if s[j].abs() < ZERO_COMPONENT { 0.0 } else { s[j] };
                        }
                        acc.add(tent_mass(&lo, &hi, &coef, (cut - dot) / h));
                    }
                }
                let mut j = 1;
                while j < d {
                    m[j] += 1;
                    if m[j] <= reach {
                        break;
                    }
                    m[j] = -reach;
                    j += 1;
                }
                if j == d {
                    break;
                }
            }
            acc.value()
        })
        .collect();
    let mut total = CompensatedSum::new();
    for v in rows {
        total.add(v);
    }
    Ok(total.value())
}

/// `∫_{[0,x]}`-style mass of the unit tent `1 − |u|` below `x`.
fn tent_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x <= 0.0 {
        0.5 * (1.0 + x) * (1.0 + x)
    } else if x < 1.0 {
        1.0 - 0.5 * (1.0 - x) * (1.0 - x)
    } else {
        1.0
    }
}

fn tent_between(a: f64, b: f64) -> f64 {
    if b <= a {
        0.0
    } else {
        tent_cdf(b) - tent_cdf(a)
    }
}

/// `∫ Π(1 − |u_j|) [coef·u ≤ c] du` over the box `[lo, hi] ⊂ [-1, 1]^k`.
///
/// The inner integral is a piecewise polynomial in the outer coordinate with
/// breakpoints where the threshold crosses a sum of inner knots, so
/// Gauss–Legendre on each piece is exact.
pub(crate) fn tent_mass(lo: &[f64], hi: &[f64], coef: &[f64], c: f64) -> f64 {
    let k = lo.len();
    if k == 0 {
        return if c >= 0.0 { 1.0 } else { 0.0 };
    }
    if lo.iter().zip(hi).any(|(a, b)| b <= a) {
        return 0.0;
    }
    let (mut smin, mut smax) = (0.0, 0.0);
    for j in 0..k {
        let (x, y) = (coef[j] * lo[j], coef[j] * hi[j]);
        smin += x.min(y);
        smax += x.max(y);
    }
    if c >= smax {
        return (0..k).map(|j| tent_between(lo[j], hi[j])).product();
    }
    if c < smin {
        return 0.0;
    }
    let (a0, b0, s0) = (lo[0], hi[0], coef[0]);
    if s0 == 0.0 {
        return tent_between(a0, b0) * tent_mass(&lo[1..], &hi[1..], &coef[1..], c);
    }
    if k == 1 {
        let x = c / s0;
        return if s0 > 0.0 {
            tent_between(a0, b0.min(x))
        } else {
            tent_between(a0.max(x), b0)
        };
    }
    let mut sums = vec![0.0];
    for j in 1..k {
        let mut knots = vec![lo[j], hi[j]];
        if lo[j] < 0.0 && hi[j] > 0.0 {
            knots.push(0.0);
        }
        sums = sums
            .iter()
            .flat_map(|&acc| knots.iter().map(move |&t| acc + coef[j] * t))
            .collect();
    }
    let mut breaks = vec![a0, b0];
    if a0 < 0.0 && b0 > 0.0 {
        breaks.push(0.0);
    }
    for ks in sums {
        let x = (c - ks) / s0;
        if x > a0 && x < b0 {
            breaks.push(x);
        }
    }
    breaks.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    breaks.dedup();
    let rule = gauss_legendre_unit(k + 1);
    let mut acc = CompensatedSum::new();
    for w in breaks.windows(2) {
        let width = w[1] - w[0];
        if width <= 0.0 {
            continue;
        }
        for &(x, wt) in &rule {
            let u = w[0] + width * x;
            acc.add(width * wt * (1.0 - u.abs()) * tent_mass(&lo[1..], &hi[1..], &coef[1..], c - s0 * u));
        }
    }
    acc.value()
}

/// Box `[lo, hi]` equal to `P_{σ,r}` when σ is a coordinate axis up to sign.
fn axis_box(sigma: &Direction<f64>, r: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let s = sigma.components();
    let nonzero: Vec<usize> = (0..s.len()).filter(|&j| s[j].abs() >= ZERO_COMPONENT).collect();
    if nonzero.len() != 1 {
        return None;
    }
    let j = nonzero[0];
    let mut lo = vec![-1.0; s.len()];
    let mut hi = vec![1.0; s.len()];
    let t = r / s[j];
    if s[j] > 0.0 {
        hi[j] = t.min(1.0);
    } else {
        lo[j] = t.max(-1.0);
    }
    Some((lo, hi))
}

/// `Σ_{k ≥ 0} φ̂(k/L)` partial sums, `G[k] = Σ_{|j| ≤ k} φ̂(j/L)`.
fn shell_sums(l: f64, k: u64) -> Vec<f64> {
    let mut g = Vec::with_capacity(k as usize + 1);
    let mut acc = CompensatedSum::new();
    acc.add(1.0);
    g.push(1.0);
    for j in 1..=k {
        acc.add(2.0 * hat_phi(j as f64 / l));
        g.push(acc.value());
    }
    g
}

/// Bound on `ρ^d Σ_{‖m‖∞ > K} Φ̂_M(m) |χ̂_P(ρm)|`.
///
/// Uses `|χ̂_P(ξ)| ≤ |∂P| / (2π|ξ|)` and `|m| ≥ ‖m‖∞`; summing by parts over
/// the shells `‖m‖∞ = n` leaves `(G_∞^d − G_K^d)/(K+1)` where `G_n` is the
/// one-dimensional partial sum of `φ̂(k/L)`. The part of `G_∞` beyond an
/// explicit sum is controlled by `φ̂(y) ≤ 4/(πy)²`.
pub fn tail_bound(d: usize, m: u32, dilation: f64, surface: f64, k: u64) -> f64 {
    let l = SpectralKernel::<f64>::new(d, m).scale();
    let extra = 100_000u64.max(k);
    let g = shell_sums(l, k + extra);
    let gk = g[k as usize];
    let far = k + extra;
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let g_inf = g[far as usize] + 8.0 * l * l / (pi2 * far as f64);
    let h = g_inf.powi(d as i32) - gk.powi(d as i32);
    dilation.powi(d as i32 - 1) * surface / (2.0 * std::f64::consts::PI) * h.max(0.0) / (k as f64 + 1.0)
}

/// Smallest power-of-two-refined `K` whose [`tail_bound`] is below `target`.
pub fn truncation_for_tail(d: usize, m: u32, dilation: f64, surface: f64, target: f64) -> Result<u64> {
    if !(target > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "tail target must be positive, got {target}"
        )));
    }
    let mut hi = 1u64;
    while tail_bound(d, m, dilation, surface, hi) >= target {
        hi *= 2;
        if hi > MAX_TRUNCATION {
            return Err(Error::Resource(format!(
                "no truncation radius up to {MAX_TRUNCATION} reaches tail bound {target:e}"
            )));
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1.max(hi / 64) {
        let mid = lo + (hi - lo) / 2;
        if tail_bound(d, m, dilation, surface, mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Surface measure of `P_{σ,r}`.
pub fn cell_surface(sigma: &Direction<f64>, r: f64) -> Result<f64> {
    check_fourier_dim(sigma.dim())?;
    Ok(clip_cube(sigma, r)?.surface_area())
}

/// The spectral side `ρ^d Σ_{‖m‖∞≤K} Φ̂_M(m) χ̂_P(ρm)` next to the direct sum.
pub fn poisson_rhs(
    spec: &LatticeSpec,
    sigma: &Direction<f64>,
    r: f64,
    dilation: f64,
    truncation_radius: u64,
) -> Result<SmoothedCount> {
    check_args(spec, sigma, r, dilation)?;
    let d = spec.d();
    let k = truncation_radius;
    let cell = clip_cube(sigma, r)?;
    let kernel = SpectralKernel::<f64>::new(d, spec.m());
    let l = kernel.scale();
    let rho = dilation;
    let weights: Vec<f64> = (0..=k).map(|j| hat_phi(j as f64 / l)).collect();

    let rhs = match axis_box(sigma, r) {
        Some((lo, hi)) => {
            // χ̂ of a box factorises, so the truncated sum is a product of 1-D sums
            let mut prod = num_complex::Complex::new(1.0, 0.0);
            for j in 0..d {
                let (len, mid) = (hi[j] - lo[j], 0.5 * (hi[j] + lo[j]));
                let mut re = CompensatedSum::new();
                re.add(len);
                for (n, &w) in weights.iter().enumerate().skip(1) {
                    if w == 0.0 {
                        continue;
                    }
                    let x = rho * n as f64;
                    // k and −k pair up into 2·Re
                    let z = phase(x * mid) * (len * sinc_pi(x * len));
                    re.add(2.0 * w * z.re);
                }
                prod *= re.value();
            }
            rho.powi(d as i32) * prod.re
        }
        None => {
            let count = (2.0 * k as f64 + 1.0).powi(d as i32);
            if count > MAX_FREQUENCIES {
                return Err(Error::Resource(format!(
                    "truncation radius {k} needs {count:e} frequencies (limit {MAX_FREQUENCIES:e})"
                )));
            }
            let prepared = PreparedCell::new(&cell)?;
            rho.powi(d as i32) * general_sum(&prepared, &weights, rho, d)
        }
    };
    let lhs = smoothed_lattice_sum(spec, sigma, r, dilation)?;
    Ok(SmoothedCount {
        dilation,
        lhs_sum: lhs,
        rhs_sum: rhs,
        truncation_radius: k,
        tail_bound: tail_bound(d, spec.m(), rho, cell.surface_area(), k),
    })
}

/// `Σ_{‖m‖∞≤K} Φ̂(m) χ̂(ρm)` using `χ̂(−ξ) = conj χ̂(ξ)`: the zero term plus
/// twice the real part over the half-lattice whose first nonzero entry is positive.
fn general_sum(cell: &PreparedCell<f64>, weights: &[f64], rho: f64, d: usize) -> f64 {
    let k = weights.len() as i64 - 1;
    let w = |x: i64| weights[x.unsigned_abs() as usize];
    let rows: Vec<f64> = (0..=k)
        .into_par_iter()
        .map(|m0| {
            let w0 = w(m0);
            if w0 == 0.0 {
                return 0.0;
            }
            let mut acc = CompensatedSum::new();
            let mut m = vec![-k; d];
            m[0] = m0;
            let mut xi = vec![0.0; d];
            loop {
                let positive = m.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0);
                if positive {
                    let weight: f64 = m[1..].iter().fold(w0, |a, &x| a * w(x));
                    if weight != 0.0 {
                        for j in 0..d {
                            xi[j] = rho * m[j] as f64;
                        }
                        acc.add(2.0 * weight * cell.transform(&xi).re);
                    }
                }
                let mut j = 1;
                while j < d {
                    m[j] += 1;
                    if m[j] <= k {
                        break;
                    }
                    m[j] = -k;
                    j += 1;
                }
                if j == d {
                    break;
                }
            }
            acc.value()
        })
        .collect();
    let mut total = CompensatedSum::new();
    total.add(cell.volume());
    for v in rows {
        total.add(v);
    }
    total.value()
}

/// Smoothed sums at `ρ ∓ M^{−d+1}` around the lattice count at `ρ = M + α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub lower: f64,
    pub count: u64,
    pub upper: f64,
}

impl Sandwich {
    /// Whether `lower ≤ count ≤ upper` holds up to `slack`.
    pub fn holds(&self, slack: f64) -> bool {
        let c = self.count as f64;
        self.lower <= c + slack && c <= self.upper + slack
    }
}

pub fn sandwich(spec: &LatticeSpec, sigma: &Direction<f64>, r: f64) -> Result<Sandwich> {
    let rho = spec.dilation();
    let eps = 1.0 / SpectralKernel::<f64>::new(spec.d(), spec.m()).scale();
    Ok(Sandwich {
        lower: smoothed_lattice_sum(spec, sigma, r, rho - eps)?,
        count: count_cut(spec, sigma, r)?,
        upper: smoothed_lattice_sum(spec, sigma, r, rho + eps)?,
    })
}
