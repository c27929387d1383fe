use num_complex::Complex;

use crate::scalar::Real;

/// `sin(πx)`, exact zero at integers, with the argument reduced mod 2 first.
pub fn sin_pi<S: Real>(x: S) -> S {
    let two = S::lit(2.0);
    let mut r = x - two * (x / two).round(); // r ∈ [-1, 1]
    let mut sign = S::one();
    if r < S::zero() {
        r = -r;
        sign = -sign;
    }
    if r > S::lit(0.5) {
        r = S::one() - r;
    }
    sign * (S::PI() * r).sin()
}

/// `cos(πx)`, exact zero at half-integers.
pub fn cos_pi<S: Real>(x: S) -> S {
    sin_pi(x + S::lit(0.5))
}

/// `e^{-2πi x}` with `x` reduced modulo 1.
#[inline]
pub fn phase<S: Real>(x: S) -> Complex<S> {
    let f = x - x.round();
    let two_f = f + f;
    Complex::new(cos_pi(two_f), -sin_pi(two_f))
}

/// `sin(πx)/(πx)`, equal to 1 at 0.
#[inline]
pub fn sinc_pi<S: Real>(x: S) -> S {
    if x.abs() < S::lit(1e-8) {
        let px = S::PI() * x;
        return S::one() - px * px / S::lit(6.0);
    }
    sin_pi(x) / (S::PI() * x)
}

/// The tent `φ(x) = (2 − 4|x|)_+`, supported on `[-½, ½]` with unit integral.
pub fn phi<S: Real>(x: S) -> S {
    (S::lit(2.0) - S::lit(4.0) * x.abs()).max(S::zero())
}

/// `φ̂(y) = (2 sin(πy/2)/(πy))²`; `φ̂(0) = 1` and `φ̂(2k) = 0` for `k ≠ 0`.
pub fn hat_phi<S: Real>(y: S) -> S {
    let s = sinc_pi(y / S::lit(2.0));
    s * s
}

/// Upper envelope `min(1, 4/(π y)²)` of [`hat_phi`].
pub fn hat_phi_envelope<S: Real>(y: S) -> S {
    let py = S::PI() * y;
    if py.abs() <= S::lit(2.0) {
        S::one()
    } else {
        S::lit(4.0) / (py * py)
    }
}

/// The product kernel `Φ_M(t) = L^d Π φ(L t_j)` with `L = M^{d−1}`, and its transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralKernel<S> {
    d: usize,
    m: u32,
    scale: S,
}

impl<S: Real> SpectralKernel<S> {
    pub fn new(d: usize, m: u32) -> Self {
        assert!(d >= 1 && m >= 1, "kernel needs d >= 1 and M >= 1");
        let scale = S::from_u32(m).expect("M representable").powi(d as i32 - 1);
        Self { d, m, scale }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Frequency scale `L = M^{d−1}`.
    pub fn scale(&self) -> S {
        self.scale
    }

    /// Half-width `1/(2L)` of the kernel's support along each axis.
    pub fn half_width(&self) -> S {
        S::one() / (S::lit(2.0) * self.scale)
    }

    /// `Φ_M(t)`.
    pub fn density(&self, t: &[S]) -> S {
        t.iter()
            .fold(S::one(), |acc, &x| acc * self.scale * phi(self.scale * x))
    }

    /// `Φ̂_M(ξ) = Π φ̂(ξ_j / L)`.
    pub fn hat_at(&self, xi: &[S]) -> S {
        xi.iter().fold(S::one(), |acc, &x| acc * hat_phi(x / self.scale))
    }

    /// `Φ̂_M(m)` at an integer frequency.
    pub fn hat(&self, m: &[i64]) -> S {
        m.iter().fold(S::one(), |acc, &k| {
            acc * hat_phi(S::from_i64(k).expect("frequency representable") / self.scale)
        })
    }
}
