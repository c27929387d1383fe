use num_complex::Complex;

use super::kernel::{phase, sinc_pi};
use crate::error::{Error, Result};
use crate::geometry::ConvexCell;
use crate::scalar::{gauss_legendre_unit, Real};

/// Below this value of `|ξ_F|·diam(F)` a face (or the whole cell) is
/// integrated by cubature instead of the divergence recursion.
pub const FLAT_PHASE_LIMIT: f64 = 0.5;

/// Gauss–Legendre order per collapsed-simplex direction.
const CUBATURE_ORDER: usize = 10;

/// `∫_P e^{-2πiξ·t} dt` for a clipped cell in `R^2` or `R^3`.
pub fn hat_chi_cell<S: Real>(cell: &ConvexCell<S>, xi: &[S]) -> Result<Complex<S>> {
    Ok(PreparedCell::new(cell)?.transform(xi))
}

/// A cell with the per-face data the transform needs precomputed, for
/// repeated evaluation at many frequencies.
#[derive(Debug, Clone)]
pub struct PreparedCell<S> {
    dim: usize,
    volume: S,
    diameter: S,
    faces: Vec<PreparedFace<S>>,
    cubature: Vec<([S; 3], S)>,
}

#[derive(Debug, Clone)]
struct PreparedFace<S> {
    normal: [S; 3],
    diameter: S,
    /// `(p, q, in-face outward normal)`; a single segment when `d = 2`.
    edges: Vec<([S; 3], [S; 3], [S; 3])>,
    cubature: Vec<([S; 3], S)>,
}

impl<S: Real> PreparedCell<S> {
    pub fn new(cell: &ConvexCell<S>) -> Result<Self> {
        let d = cell.dim();
        if d != 2 && d != 3 {
            return Err(Error::UnsupportedDimension(d));
        }
        let volume = cell.volume();
        let diameter = cell.diameter();
        if !(volume > S::tol(1e-12) * diameter.powi(d as i32).max(S::one())) {
            return Err(Error::Contract(format!(
                "transform of a degenerate cell (volume {})",
                volume.to_f64_lossy()
            )));
        }
        let pt = |i: usize| lift(cell.vertex(i));
        let centre = lift(&cell.centroid_of_vertices());
        let mut faces = Vec::with_capacity(cell.faces().len());
        let mut cubature = Vec::new();
        for f in cell.faces() {
            let normal = lift(&f.normal);
            let idx = &f.vertices;
            if d == 2 {
                let (p, q) = (pt(idx[0]), pt(idx[1]));
                triangle_rule(centre, p, q, |x, w| cubature.push((x, w)));
                faces.push(PreparedFace {
                    normal,
                    diameter: dist3(p, q),
                    edges: vec![(p, q, [S::zero(); 3])],
                    cubature: Vec::new(),
                });
                continue;
            }
            let mut edges = Vec::with_capacity(idx.len());
            let mut face_diam = S::zero();
            for k in 0..idx.len() {
                let (p, q) = (pt(idx[k]), pt(idx[(k + 1) % idx.len()]));
                let u = sub3(q, p);
                let len = norm3(u);
                let c = cross3(u, normal);
                edges.push((p, q, [c[0] / len, c[1] / len, c[2] / len]));
                for &j in idx {
                    face_diam = face_diam.max(dist3(p, pt(j)));
                }
            }
            let mut face_rule = Vec::new();
            let v0 = pt(idx[0]);
            for k in 1..idx.len() - 1 {
                let (a, b) = (pt(idx[k]), pt(idx[k + 1]));
                triangle_rule(v0, a, b, |x, w| face_rule.push((x, w)));
                tetra_rule(centre, v0, a, b, |x, w| cubature.push((x, w)));
            }
            faces.push(PreparedFace {
                normal,
                diameter: face_diam,
                edges,
                cubature: face_rule,
            });
        }
        Ok(Self {
            dim: d,
            volume,
            diameter,
            faces,
            cubature,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn volume(&self) -> S {
        self.volume
    }

    /// Upper bound `Σ|F|` used for `|χ̂(ξ)| ≤ Σ|F| / (2π|ξ|)`.
    pub fn surface_area(&self) -> S {
        self.faces
            .iter()
            .map(|f| {
                if self.dim == 2 {
                    f.diameter
                } else {
                    f.cubature.iter().map(|&(_, w)| w).sum()
                }
            })
            .sum()
    }

    /// `∫_P e^{-2πiξ·t} dt`.
    pub fn transform(&self, xi: &[S]) -> Complex<S> {
        assert_eq!(xi.len(), self.dim, "frequency dimension");
        let x = lift(xi);
        let n2 = dot3(x, x);
        if n2 == S::zero() {
            return Complex::new(self.volume, S::zero());
        }
        if n2.sqrt() * self.diameter < S::lit(FLAT_PHASE_LIMIT) {
            return cubature(&self.cubature, x);
        }
        let mut acc = Complex::new(S::zero(), S::zero());
        for f in &self.faces {
            let w = dot3(x, f.normal);
            if w == S::zero() {
                continue;
            }
            let mu = if self.dim == 2 {
                let (p, q, _) = f.edges[0];
                segment(p, q, x)
            } else {
                self.face_transform(f, x)
            };
            acc += mu * w;
        }
        i_over_2pi(n2) * acc
    }

    /// `∫_F e^{-2πiξ·t} dA` for a planar face in `R^3`.
    fn face_transform(&self, f: &PreparedFace<S>, x: [S; 3]) -> Complex<S> {
        let along = dot3(x, f.normal);
        let t = [
            x[0] - along * f.normal[0],
            x[1] - along * f.normal[1],
            x[2] - along * f.normal[2],
        ];
        let n2 = dot3(t, t);
        if n2.sqrt() * f.diameter < S::lit(FLAT_PHASE_LIMIT) {
            return cubature(&f.cubature, x);
        }
        let mut acc = Complex::new(S::zero(), S::zero());
        for &(p, q, ne) in &f.edges {
            let w = dot3(x, ne);
            if w != S::zero() {
                acc += segment(p, q, x) * w;
            }
        }
        i_over_2pi(n2) * acc
    }
}

fn i_over_2pi<S: Real>(n2: S) -> Complex<S> {
    Complex::new(S::zero(), S::one() / (S::lit(2.0) * S::PI() * n2))
}

/// `∫_{[p,q]} e^{-2πiξ·t} ds = |q−p| e^{-2πiξ·(p+q)/2} sinc(πξ·(q−p))`.
fn segment<S: Real>(p: [S; 3], q: [S; 3], x: [S; 3]) -> Complex<S> {
    let half = S::lit(0.5);
    let mid = [(p[0] + q[0]) * half, (p[1] + q[1]) * half, (p[2] + q[2]) * half];
    let u = sub3(q, p);
    phase(dot3(x, mid)) * (norm3(u) * sinc_pi(dot3(x, u)))
}

fn cubature<S: Real>(rule: &[([S; 3], S)], x: [S; 3]) -> Complex<S> {
    let mut re = S::zero();
    let mut im = S::zero();
    for &(t, w) in rule {
        let z = phase(dot3(x, t));
        re += w * z.re;
        im += w * z.im;
    }
    Complex::new(re, im)
}

/// Collapsed Gauss–Legendre rule on the triangle `(a, b, c)`.
fn triangle_rule<S: Real>(a: [S; 3], b: [S; 3], c: [S; 3], mut push: impl FnMut([S; 3], S)) {
    let area = norm3(cross3(sub3(b, a), sub3(c, a))) / S::lit(2.0);
    let rule = gauss_legendre_unit(CUBATURE_ORDER);
    for &(u, wu) in &rule {
        for &(v, wv) in &rule {
            let (u, v) = (S::lit(u), S::lit(v));
            let mut p = [S::zero(); 3];
            for j in 0..3 {
                p[j] = a[j] + u * (b[j] - a[j]) + u * v * (c[j] - b[j]);
            }
            push(p, S::lit(2.0) * area * u * S::lit(wu * wv));
        }
    }
}

/// Collapsed Gauss–Legendre rule on the tetrahedron `(a, b, c, e)`.
fn tetra_rule<S: Real>(a: [S; 3], b: [S; 3], c: [S; 3], e: [S; 3], mut push: impl FnMut([S; 3], S)) {
    let vol = dot3(sub3(b, a), cross3(sub3(c, a), sub3(e, a))).abs() / S::lit(6.0);
    let rule = gauss_legendre_unit(CUBATURE_ORDER);
    for &(u, wu) in &rule {
        for &(v, wv) in &rule {
            for &(w, ww) in &rule {
                let (u, v, w) = (S::lit(u), S::lit(v), S::lit(w));
                let mut p = [S::zero(); 3];
                for j in 0..3 {
                    p[j] = a[j] + u * (b[j] - a[j]) + u * v * (c[j] - b[j]) + u * v * w * (e[j] - c[j]);
                }
                push(p, S::lit(6.0) * vol * u * u * v * S::lit(wu * wv * ww));
            }
        }
    }
}

fn lift<S: Real>(v: &[S]) -> [S; 3] {
    let mut out = [S::zero(); 3];
    out[..v.len()].copy_from_slice(v);
    out
}

fn sub3<S: Real>(a: [S; 3], b: [S; 3]) -> [S; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3<S: Real>(a: [S; 3], b: [S; 3]) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3<S: Real>(a: [S; 3]) -> S {
    dot3(a, a).sqrt()
}

fn dist3<S: Real>(a: [S; 3], b: [S; 3]) -> S {
    norm3(sub3(a, b))
}

fn cross3<S: Real>(a: [S; 3], b: [S; 3]) -> [S; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{clip_cube, Direction};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn cell(v: &[f64], r: f64) -> ConvexCell<f64> {
        clip_cube(&Direction::normalized(v.to_vec()).unwrap(), r).unwrap()
    }

    /// Composite 16-point Gauss–Legendre on `[a, b]` for an integrand that is
    /// analytic there, with panels short enough to resolve `cycles` turns.
    fn composite(f: &dyn Fn(f64) -> (f64, f64), a: f64, b: f64, cycles: f64) -> (f64, f64) {
        let rule = gauss_legendre_unit(16);
        let panels = 2 + (3.0 * cycles).ceil() as usize;
        let h = (b - a) / panels as f64;
        let mut acc = (0.0, 0.0);
        for i in 0..panels {
            let lo = a + h * i as f64;
            for &(x, w) in &rule {
                let v = f(lo + h * x);
                acc.0 += h * w * v.0;
                acc.1 += h * w * v.1;
            }
        }
        acc
    }

    /// `∫ e^{-2πiβy} dy` over `[lo, hi]` in closed form, as `(re, im)`.
    fn line(beta: f64, lo: f64, hi: f64) -> (f64, f64) {
        if hi <= lo {
            return (0.0, 0.0);
        }
        let w = hi - lo;
        let x = PI * beta * w;
        let sinc = if x.abs() < 1e-6 {
            1.0 - x * x / 6.0
        } else {
            x.sin() / x
        };
        let k = 2.0 * PI * beta * 0.5 * (hi + lo);
        (w * sinc * k.cos(), -w * sinc * k.sin())
    }

    /// `e^{-ik} (c + i s)`.
    fn rot(k: f64, (c, s): (f64, f64)) -> (f64, f64) {
        (k.cos() * c + k.sin() * s, k.cos() * s - k.sin() * c)
    }

    /// Indicator transform of `{|t_j| ≤ 1, σ·t ≤ r}` in the plane: Gauss–Legendre
    /// in `x`, closed form in `y`, split at the kinks of the `y`-range.
    fn oracle_2d(s: &[f64], r: f64, xi: &[f64]) -> (f64, f64) {
        let yr = |x: f64| -> (f64, f64) {
            let (mut lo, mut hi) = (-1.0f64, 1.0f64);
            if s[1].abs() < 1e-15 {
                if s[0] * x > r {
                    hi = lo;
                }
            } else if s[1] > 0.0 {
                hi = hi.min((r - s[0] * x) / s[1]);
            } else {
                lo = lo.max((r - s[0] * x) / s[1]);
            }
            (lo, hi)
        };
        let f = |x: f64| {
            let (lo, hi) = yr(x);
            rot(2.0 * PI * xi[0] * x, line(xi[1], lo, hi))
        };
        let mut breaks = vec![-1.0, 1.0];
        if s[0].abs() > 1e-15 {
            for y in [-1.0, 1.0] {
                let x = (r - s[1] * y) / s[0];
                if x > -1.0 && x < 1.0 {
                    breaks.push(x);
                }
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut acc = (0.0, 0.0);
        for w in breaks.windows(2) {
            // the phase turns at most |ξ_x|·width + 2|ξ_y| cycles over a piece
            let cycles = xi[0].abs() * (w[1] - w[0]) + 2.0 * xi[1].abs();
            let v = composite(&f, w[0], w[1], cycles);
            acc.0 += v.0;
            acc.1 += v.1;
        }
        acc
    }

    /// Same in `R^3`, with the inner two coordinates done by [`oracle_2d`]
    /// on the slice.
    fn oracle_3d(s: &[f64], r: f64, xi: &[f64]) -> (f64, f64) {
        let inner = [s[1], s[2]];
        let f = |x: f64| {
            let rr = r - s[0] * x;
            let n = (inner[0] * inner[0] + inner[1] * inner[1]).sqrt();
            let w = if n < 1e-15 {
                if rr >= 0.0 {
                    let a = line(xi[1], -1.0, 1.0);
                    let b = line(xi[2], -1.0, 1.0);
                    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
                } else {
                    (0.0, 0.0)
                }
            } else {
                oracle_2d(&[inner[0] / n, inner[1] / n], rr / n, &xi[1..])
            };
            rot(2.0 * PI * xi[0] * x, w)
        };
        let mut breaks = vec![-1.0, 1.0];
        if s[0].abs() > 1e-15 {
            for y in [-1.0, 1.0] {
                for z in [-1.0, 1.0] {
                    let x = (r - s[1] * y - s[2] * z) / s[0];
                    if x > -1.0 && x < 1.0 {
                        breaks.push(x);
                    }
                }
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut acc = (0.0, 0.0);
        for w in breaks.windows(2) {
            let cycles = xi[0].abs() * (w[1] - w[0]) + 2.0 * (xi[1].abs() + xi[2].abs());
            let v = composite(&f, w[0], w[1], cycles);
            acc.0 += v.0;
            acc.1 += v.1;
        }
        acc
    }

    fn close(z: Complex<f64>, o: (f64, f64), tol: f64) -> bool {
        (z.re - o.0).abs() <= tol && (z.im - o.1).abs() <= tol
    }

    #[test]
    fn square_examples() {
        let sq = ConvexCell::<f64>::cube(2).unwrap();
        let z = hat_chi_cell(&sq, &[0.0, 0.0]).unwrap();
        assert!((z.re - 4.0).abs() < 1e-12 && z.im.abs() < 1e-12);
        let z = hat_chi_cell(&sq, &[1.0, 0.0]).unwrap();
        assert!(z.norm() < 1e-14, "{z}");
        // separable: 4 sinc(2ξ1) sinc(2ξ2)
        let z = hat_chi_cell(&sq, &[0.3, 1.7]).unwrap();
        let expect =
            4.0 * (2.0 * PI * 0.3).sin() / (2.0 * PI * 0.3) * (2.0 * PI * 1.7).sin() / (2.0 * PI * 1.7);
        assert!((z.re - expect).abs() < 1e-14 && z.im.abs() < 1e-14);
    }

    #[test]
    fn diagonal_cell_matches_oracle() {
        let s = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        let c = cell(&s, FRAC_1_SQRT_2);
        let xi = [0.3, 0.7];
        let z = hat_chi_cell(&c, &xi).unwrap();
        assert!(close(z, oracle_2d(&s, FRAC_1_SQRT_2, &xi), 1e-10), "{z}");
    }

    #[test]
    fn small_frequencies_are_continuous() {
        let s = [0.6, -0.8];
        let c = PreparedCell::new(&cell(&s, 0.3)).unwrap();
        let diam = 2.0 * 2f64.sqrt();
        // either side of the flat-phase switch, and far below it
        for scale in [1e-12, 1e-6, 0.999, 1.001] {
            let xi = [
                0.8 * FLAT_PHASE_LIMIT / diam * scale,
                0.6 * FLAT_PHASE_LIMIT / diam * scale,
            ];
            let z = c.transform(&xi);
            assert!(close(z, oracle_2d(&s, 0.3, &xi), 1e-11), "scale={scale} {z}");
        }
    }

    #[test]
    fn cube_3d_examples() {
        let cube = ConvexCell::<f64>::cube(3).unwrap();
        let z = hat_chi_cell(&cube, &[0.0, 0.0, 0.0]).unwrap();
        assert!((z.re - 8.0).abs() < 1e-12);
        let xi = [0.3, 0.45, 1.1];
        let z = hat_chi_cell(&cube, &xi).unwrap();
        let expect: f64 = xi.iter().map(|&x| (2.0 * PI * x).sin() / (PI * x)).product();
        assert!(
            (z.re - expect).abs() < 1e-13 && z.im.abs() < 1e-13,
            "{z} {expect}"
        );
    }

    #[test]
    fn corner_cut_3d_matches_oracle() {
        let s = [0.48, 0.6, 0.64];
        let c = cell(&s, 0.9);
        for xi in [[0.2, -0.4, 0.9], [1.3, 0.1, -2.2], [0.01, 0.02, 0.0]] {
            let z = hat_chi_cell(&c, &xi).unwrap();
            assert!(close(z, oracle_3d(&s, 0.9, &xi), 1e-9), "{xi:?} {z}");
        }
    }

    #[test]
    fn f32_transform_tracks_f64() {
        let s = [0.6, -0.8];
        let c64 = cell(&s, 0.3);
        let c32 = clip_cube(&Direction::<f32>::normalized(vec![0.6, -0.8]).unwrap(), 0.3).unwrap();
        let a = hat_chi_cell(&c64, &[0.7, 1.9]).unwrap();
        let b = hat_chi_cell(&c32, &[0.7, 1.9]).unwrap();
        assert!((a.re - b.re as f64).abs() < 1e-4 && (a.im - b.im as f64).abs() < 1e-4);
    }

    #[test]
    fn rejects_unsupported_cells() {
        assert!(matches!(
            ConvexCell::<f64>::cube(4).map(|c| hat_chi_cell(&c, &[0.0; 4])),
            Err(Error::UnsupportedDimension(4))
        ));
    }

    fn dir2() -> impl Strategy<Value = Vec<f64>> {
        (0.0..std::f64::consts::TAU).prop_map(|t: f64| vec![t.cos(), t.sin()])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn agrees_with_quadrature_2d(s in dir2(), rf in 0.0..1.0f64, x in -6.0..6.0f64, y in -6.0..6.0f64) {
            let r = rf * (s[0].abs() + s[1].abs());
            let c = cell(&s, r);
            let z = hat_chi_cell(&c, &[x, y]).unwrap();
            let o = oracle_2d(&s, r, &[x, y]);
            prop_assert!(close(z, o, 1e-8), "{z} vs {o:?}");
        }

        #[test]
        fn zero_frequency_is_volume(s in dir2(), rf in 0.0..1.0f64) {
            let r = rf * (s[0].abs() + s[1].abs());
            let c = cell(&s, r);
            let z = hat_chi_cell(&c, &[0.0, 0.0]).unwrap();
            prop_assert!((z.re - c.volume()).abs() < 1e-10 && z.im == 0.0);
        }

        #[test]
        fn conjugate_symmetry(s in dir2(), rf in 0.0..1.0f64, x in -20.0..20.0f64, y in -20.0..20.0f64) {
            let r = rf * (s[0].abs() + s[1].abs());
            let c = PreparedCell::new(&cell(&s, r)).unwrap();
            let a = c.transform(&[x, y]);
            let b = c.transform(&[-x, -y]);
            prop_assert!((a.re - b.re).abs() < 1e-13 && (a.im + b.im).abs() < 1e-13);
        }

        #[test]
        fn bounded_by_surface_decay(s in dir2(), rf in 0.0..1.0f64, x in -40.0..40.0f64, y in -40.0..40.0f64) {
            let r = rf * (s[0].abs() + s[1].abs());
            let c = PreparedCell::new(&cell(&s, r)).unwrap();
            let n = (x * x + y * y).sqrt();
            let z = c.transform(&[x, y]);
            prop_assert!(z.norm() <= c.volume() + 1e-12);
            prop_assert!(z.norm() <= c.surface_area() / (2.0 * PI * n) + 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn agrees_with_quadrature_3d(
            a in -1.0..1.0f64, b in -1.0..1.0f64, c3 in -1.0..1.0f64,
            rf in 0.05..0.95f64,
            x in -4.0..4.0f64, y in -4.0..4.0f64, z in -4.0..4.0f64,
        ) {
            prop_assume!(a * a + b * b + c3 * c3 > 0.05);
            let n = (a * a + b * b + c3 * c3).sqrt();
            let s = [a / n, b / n, c3 / n];
            let r = rf * s.iter().map(|v| v.abs()).sum::<f64>();
            let cl = cell(&s, r);
            let v = hat_chi_cell(&cl, &[x, y, z]).unwrap();
            let o = oracle_3d(&s, r, &[x, y, z]);
            prop_assert!(close(v, o, 1e-8), "{v} vs {o:?}");
        }
    }
}
