use super::{Direction, ZERO_COMPONENT};
use crate::error::{Error, Result};
use crate::scalar::{gauss_legendre_unit, CompensatedSum, Real};

/// Largest number of nonzero direction components handled by the
/// inclusion–exclusion formula (2^k subset terms).
pub const MAX_VOLUME_DIM: usize = 20;

/// Estimated absolute error above which the inclusion–exclusion value is
/// replaced by the sliced evaluation.
const CONDITION_LIMIT: f64 = 1e-13;

/// `|[-1,1]^d ∩ {t·σ ≤ r}|` for `r ≥ 0`.
pub fn cut_volume<S: Real>(sigma: &Direction<S>, r: S) -> Result<S> {
    if !(r >= S::zero()) || !r.is_finite() {
        return Err(Error::InvalidRadius(r.to_f64_lossy()));
    }
    halfspace_volume(sigma, r)
}

/// `|[-1,1]^d ∩ {t·σ ≤ offset}|` for any real offset.
///
/// Coordinate sign flips leave the volume unchanged, so σ is reduced to
/// `|σ|`. With `t = 2u − 1` the region becomes `{u ∈ [0,1]^k : a·u ≤ b}`,
/// `b = (offset + Σa)/2`, evaluated by [`unit_cube_cdf`].
pub fn halfspace_volume<S: Real>(sigma: &Direction<S>, offset: S) -> Result<S> {
    if offset.is_nan() {
        return Err(Error::InvalidRadius(f64::NAN));
    }
    let d = sigma.dim();
    let total = S::lit(2.0).powi(d as i32);
    let zero = S::tol(ZERO_COMPONENT);
    let mut a: Vec<S> = sigma
        .components()
        .iter()
        .map(|x| x.abs())
        .filter(|x| *x >= zero)
        .collect();
    if a.len() > MAX_VOLUME_DIM {
        return Err(Error::Resource(format!(
            "cut_volume supports at most {MAX_VOLUME_DIM} nonzero components, got {}",
            a.len()
        )));
    }
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite components"));
    let l1: S = a.iter().copied().sum();
    // within rounding of the support value only a sliver of measure O(eps^k) remains
    let slack = l1 * S::epsilon() * S::lit(8.0);
    if offset >= l1 - slack {
        return Ok(total);
    }
    if offset <= -l1 + slack {
        return Ok(S::zero());
    }
    let b = (offset + l1) / S::lit(2.0);
    let frac = unit_cube_cdf(&a, b);
    Ok((total * frac).max(S::zero()).min(total))
}

/// `|{u ∈ [0,1]^k : a·u ≤ b}|` for strictly positive `a` sorted ascending.
pub fn unit_cube_cdf<S: Real>(a: &[S], b: S) -> S {
    let k = a.len();
    if k == 0 {
        return if b >= S::zero() { S::one() } else { S::zero() };
    }
    let total: S = a.iter().copied().sum();
    if b <= S::zero() {
        return S::zero();
    }
    if b >= total {
        return S::one();
    }
    // u -> 1 - u maps the region onto the complement; evaluate the smaller side.
    let half = total / S::lit(2.0);
    if b > half {
        return S::one() - lower_cdf(a, total - b);
    }
    lower_cdf(a, b)
}

fn lower_cdf<S: Real>(a: &[S], b: S) -> S {
    let k = a.len();
    if k == 1 {
        return (b / a[0]).max(S::zero()).min(S::one());
    }
    let (value, err) = inclusion_exclusion(a, b);
    if err <= S::tol(CONDITION_LIMIT) {
        return value.max(S::zero()).min(S::one());
    }
    sliced_cdf(a, b)
}

/// Inclusion–exclusion sum with an a-priori rounding error estimate.
fn inclusion_exclusion<S: Real>(a: &[S], b: S) -> (S, S) {
    let k = a.len();
    let mut acc = CompensatedSum::new();
    let mut magnitude = S::zero();
    for mask in 0u32..(1u32 << k) {
        let mut shift = S::zero();
        for (i, &ai) in a.iter().enumerate() {
            if mask >> i & 1 == 1 {
                shift += ai;
            }
        }
        let x = b - shift;
        if x <= S::zero() {
            continue;
        }
        let term = x.powi(k as i32);
        magnitude += term;
        if mask.count_ones() % 2 == 0 {
            acc.add(term);
        } else {
            acc.add(-term);
        }
    }
    let mut denom = S::one();
    for (i, &ai) in a.iter().enumerate() {
        denom = denom * ai * S::from_usize_lossy(i + 1);
    }
    let value = acc.value() / denom;
    let err = S::epsilon() * magnitude / denom * S::from_usize_lossy(4 * (k + 2));
    (value, err)
}

/// Integrates out the smallest component exactly: between consecutive
/// breakpoints the remaining `(k−1)`-dimensional volume is a polynomial of
/// degree `k−1` in the slice coordinate, so Gauss–Legendre is exact.
fn sliced_cdf<S: Real>(a: &[S], b: S) -> S {
    let (a0, rest) = (a[0], &a[1..]);
    let mut breaks = vec![S::zero(), S::one()];
    for mask in 0u32..(1u32 << rest.len()) {
        let mut shift = S::zero();
        for (i, &ai) in rest.iter().enumerate() {
            if mask >> i & 1 == 1 {
                shift += ai;
            }
        }
        let s = (b - shift) / a0;
        if s > S::zero() && s < S::one() {
            breaks.push(s);
        }
    }
    breaks.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    breaks.dedup();
    let rule = gauss_legendre_unit(rest.len() / 2 + 2);
    let mut acc = CompensatedSum::new();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = hi - lo;
        if h <= S::zero() {
            continue;
        }
        for &(x, wt) in &rule {
            let s = lo + h * S::lit(x);
            acc.add(h * S::lit(wt) * unit_cube_cdf(rest, b - a0 * s));
        }
    }
    acc.value().max(S::zero()).min(S::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn dir(v: &[f64]) -> Direction<f64> {
        Direction::normalized(v.to_vec()).unwrap()
    }

    #[test]
    fn exact_examples() {
        let x = Direction::<f64>::new(vec![1.0, 0.0]).unwrap();
        assert!((cut_volume(&x, 0.5).unwrap() - 3.0).abs() < 1e-12);
        let diag = Direction::<f64>::new(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((cut_volume(&diag, 0.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((cut_volume(&diag, FRAC_1_SQRT_2).unwrap() - 3.5).abs() < 1e-12);
        assert_eq!(cut_volume(&diag, SQRT_2).unwrap(), 4.0);
        let d3 = dir(&[0.3, -0.5, 0.8]);
        assert_eq!(cut_volume(&d3, 3f64.sqrt()).unwrap(), 8.0);
    }

    #[test]
    fn rejects_negative_radius() {
        let x = Direction::<f64>::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(cut_volume(&x, -0.1), Err(Error::InvalidRadius(_))));
        assert!(cut_volume(&x, f64::NAN).is_err());
    }

    #[test]
    fn equal_components_need_no_perturbation() {
        // three equal components: corner simplex of side 3·(1-b') in u-space
        let s = dir(&[1.0, 1.0, 1.0]);
        let a = 1.0 / 3f64.sqrt();
        // r chosen so that b = (r + 3a)/2 = a/2: tetrahedron u1+u2+u3 <= 1/2
        let r = -2.0 * a;
        let v = halfspace_volume(&s, r).unwrap();
        let expected = 8.0 * (0.5f64).powi(3) / 6.0;
        assert!((v - expected).abs() < 1e-14, "{v} {expected}");
    }

    #[test]
    fn tiny_component_is_continuous() {
        // components 1e-7 and 1e-9 exercise the sliced fallback
        for eps in [1e-4, 1e-7, 1e-9, 1e-11] {
            let s = dir(&[1.0, eps, eps * 0.5]);
            let v = cut_volume(&s, 0.3).unwrap();
            assert!((v - 8.0 * 0.65).abs() < 1e-8, "eps={eps} v={v}");
        }
    }

    #[test]
    fn f32_matches_f64() {
        let s64 = dir(&[0.3, 0.4, -0.5]);
        let s32 = Direction::<f32>::normalized(vec![0.3, 0.4, -0.5]).unwrap();
        for r in [0.0, 0.2, 0.5, 0.9, 1.1] {
            let a = cut_volume(&s64, r).unwrap();
            let b = cut_volume(&s32, r as f32).unwrap() as f64;
            assert!((a - b).abs() < 1e-4, "r={r} {a} {b}");
        }
    }
}
