//! The cube `[-1, 1]^d` cut by a half-space `{t : t·σ ≤ r}`.
//!
//! [`cut_volume`] evaluates the measure of the cut region in closed form for
//! any dimension; [`clip_cube`] builds its face complex for `d ∈ {2, 3}`
//! with every face tagged by where it lies (in the cutting hyperplane or in
//! a facet of the cube).

mod cell;
mod volume;

pub use cell::{clip_cube, ConvexCell, Face, FaceTag};
pub use volume::{cut_volume, halfspace_volume, unit_cube_cdf};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Components below this magnitude are treated as exact zeros.
pub const ZERO_COMPONENT: f64 = 1e-12;

/// Unit-norm tolerance for [`Direction`].
pub const UNIT_TOL: f64 = 1e-12;

/// A unit vector on the sphere `Σ_{d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction<S> {
    components: Vec<S>,
}

impl<S: Real> Direction<S> {
    /// Wraps `components`, which must already have unit norm.
    pub fn new(components: Vec<S>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::DimensionTooSmall(components.len()));
        }
        let norm = norm(&components);
        if !norm.is_finite() || (norm - S::one()).abs() > S::tol(UNIT_TOL) {
            return Err(Error::NotUnit {
                norm: norm.to_f64_lossy(),
            });
        }
        Ok(Self { components })
    }

    /// Scales `v` to unit length.
    pub fn normalized(v: Vec<S>) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::DimensionTooSmall(v.len()));
        }
        let n = norm(&v);
        if !(n.is_finite() && n > S::zero()) {
            return Err(Error::NotUnit {
                norm: n.to_f64_lossy(),
            });
        }
        Ok(Self {
            components: v.into_iter().map(|x| x / n).collect(),
        })
    }

    /// Unit vector along axis `j`.
    pub fn axis(d: usize, j: usize) -> Result<Self> {
        if j >= d {
            return Err(Error::DimensionMismatch { expected: d, got: j });
        }
        let mut v = vec![S::zero(); d];
        v[j] = S::one();
        Self::new(v)
    }

    /// Planar direction `(cos θ, sin θ)`.
    pub fn from_angle(theta: S) -> Self {
        Self {
            components: vec![theta.cos(), theta.sin()],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    #[inline]
    pub fn components(&self) -> &[S] {
        &self.components
    }

    pub fn dot(&self, t: &[S]) -> S {
        self.components
            .iter()
            .zip(t)
            .fold(S::zero(), |acc, (&a, &b)| acc + a * b)
    }

    /// `‖σ‖₁`, the support value of the cube in direction σ.
    pub fn l1(&self) -> S {
        self.components.iter().map(|x| x.abs()).sum()
    }

    pub fn into_inner(self) -> Vec<S> {
        self.components
    }
}

impl<S: Real> std::ops::Neg for &Direction<S> {
    type Output = Direction<S>;
    fn neg(self) -> Direction<S> {
        Direction {
            components: self.components.iter().map(|&x| -x).collect(),
        }
    }
}

pub(crate) fn norm<S: Real>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |acc, &x| acc + x * x).sqrt()
}

/// Representative of σ's orbit under the cube's symmetry group
/// (coordinate permutations and sign flips), together with the orbit size.
///
/// The representative has nonnegative components sorted descending.
pub fn canonical_direction<S: Real>(sigma: &Direction<S>) -> (Direction<S>, u64) {
    let zero = S::tol(ZERO_COMPONENT);
    let mut abs: Vec<S> = sigma
        .components
        .iter()
        .map(|x| if x.abs() < zero { S::zero() } else { x.abs() })
        .collect();
    abs.sort_by(|a, b| b.partial_cmp(a).expect("finite components"));

    let d = abs.len() as u64;
    let nonzero = abs.iter().filter(|x| **x > S::zero()).count() as u32;
    // d! / prod(run lengths!) distinct permutations
    let mut perms = factorial(d);
    let mut i = 0;
    while i < abs.len() {
        let mut j = i + 1;
        while j < abs.len() && abs[j] == abs[i] {
            j += 1;
        }
        perms /= factorial((j - i) as u64);
        i = j;
    }
    (Direction { components: abs }, (1u64 << nonzero) * perms)
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Surface measure of the unit sphere `Σ_{d-1} ⊂ R^d`, i.e. `2π^{d/2}/Γ(d/2)`.
pub fn sphere_area<S: Real>(d: usize) -> S {
    assert!(d >= 2, "sphere_area needs d >= 2");
    let two_pi = S::lit(2.0) * S::PI();
    let (mut area, mut k) = if d.is_multiple_of(2) {
        (two_pi, 2)
    } else {
        (S::lit(2.0) * two_pi, 3)
    };
    while k < d {
        area = area * two_pi / S::from_usize_lossy(k);
        k += 2;
    }
    area
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn direction_rejects_non_unit() {
        assert!(matches!(
            Direction::<f64>::new(vec![1.0, 1.0]),
            Err(Error::NotUnit { .. })
        ));
        assert!(Direction::<f64>::new(vec![1.0f64]).is_err());
        assert!(Direction::<f64>::normalized(vec![0.0, 0.0]).is_err());
        let d = Direction::<f64>::normalized(vec![3.0, 4.0]).unwrap();
        assert_eq!(d.components(), &[0.6, 0.8]);
    }

    #[test]
    fn canonical_examples() {
        let (c, m) = canonical_direction(&Direction::<f64>::new(vec![0.0, -1.0]).unwrap());
        assert_eq!(c.components(), &[1.0, 0.0]);
        assert_eq!(m, 4);

        let (c, m) =
            canonical_direction(&Direction::<f64>::new(vec![-FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap());
        assert_eq!(c.components(), &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        // (±a, ±a) has exactly four distinct images
        assert_eq!(m, 4);

        let (c, m) = canonical_direction(&Direction::<f64>::new(vec![0.6, -0.8, 0.0]).unwrap());
        assert_eq!(c.components(), &[0.8, 0.6, 0.0]);
        assert_eq!(m, 24);
    }

    /// Brute-force orbit enumeration over all 2^d · d! signed permutations.
    fn orbit_size(v: &[f64]) -> u64 {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 1 {
                return vec![vec![0]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let d = v.len();
        let mut images: Vec<Vec<u64>> = Vec::new();
        for p in perms(d) {
            for signs in 0..(1u32 << d) {
                let img: Vec<u64> = (0..d)
                    .map(|i| {
                        let x = v[p[i]];
                        let x = if signs >> i & 1 == 1 { -x } else { x };
                        // normalise -0.0
                        (x + 0.0).to_bits()
                    })
                    .collect();
                if !images.contains(&img) {
                    images.push(img);
                }
            }
        }
        images.len() as u64
    }

    #[test]
    fn multiplicity_matches_group_enumeration() {
        let cases: [&[f64]; 6] = [
            &[0.6, -0.8, 0.0],
            &[1.0, 0.0, 0.0],
            &[0.48, 0.6, 0.64],
            &[0.6, 0.0, -0.8],
            &[0.5, 0.5, 0.5, 0.5],
            &[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2],
        ];
        for v in cases {
            let s = Direction::normalized(v.to_vec()).unwrap();
            let (_, m) = canonical_direction(&s);
            assert_eq!(m, orbit_size(s.components()), "{v:?}");
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area::<f64>(2) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_area::<f64>(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area::<f64>(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area::<f64>(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!((sphere_area::<f32>(3) - 4.0 * std::f32::consts::PI).abs() < 1e-5);
    }
}
