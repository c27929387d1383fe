use super::{norm, Direction};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Vertices closer than this are merged; faces smaller than this are dropped.
pub const MERGE_TOL: f64 = 1e-12;

/// Where a face of a clipped cell lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceTag {
    /// In the cutting hyperplane `t·σ = r`.
    Cut,
    /// In the cube facet `t_axis = ±1`.
    Cube { axis: usize, positive: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face<S> {
    /// Vertex cycle, counter-clockwise seen from outside (`d = 3`), or the
    /// ordered endpoint pair of a boundary edge (`d = 2`).
    pub vertices: Vec<usize>,
    /// Outward unit normal.
    pub normal: Vec<S>,
    pub tag: FaceTag,
}

/// Face complex of a convex polytope in `R^2` or `R^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCell<S> {
    dim: usize,
    vertices: Vec<Vec<S>>,
    faces: Vec<Face<S>>,
}

impl<S: Real> ConvexCell<S> {
    /// The full cube `[-1, 1]^d`.
    pub fn cube(d: usize) -> Result<Self> {
        let up = Direction::axis(d, 0)?;
        // clipping by a half-space that only touches a facet leaves the cube intact
        clip_cube(&up, S::one())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec<S>] {
        &self.vertices
    }

    #[inline]
    pub fn faces(&self) -> &[Face<S>] {
        &self.faces
    }

    pub fn vertex(&self, i: usize) -> &[S] {
        &self.vertices[i]
    }

    /// Measure of face `i` (edge length for `d = 2`, polygon area for `d = 3`).
    pub fn face_area(&self, i: usize) -> S {
        let f = &self.faces[i];
        match self.dim {
            2 => dist(self.vertex(f.vertices[0]), self.vertex(f.vertices[1])),
            _ => polygon_area(&self.vertices, &f.vertices, &f.normal),
        }
    }

    pub fn face_centroid(&self, i: usize) -> Vec<S> {
        let f = &self.faces[i];
        let n = S::from_usize_lossy(f.vertices.len());
        let mut c = vec![S::zero(); self.dim];
        for &v in &f.vertices {
            for (cj, &x) in c.iter_mut().zip(&self.vertices[v]) {
                *cj += x / n;
            }
        }
        c
    }

    /// Volume from the face complex: `(1/d) Σ_F (p_F·ν_F) |F|`.
    pub fn volume(&self) -> S {
        let d = S::from_usize_lossy(self.dim);
        (0..self.faces.len())
            .map(|i| {
                let f = &self.faces[i];
                dot(self.vertex(f.vertices[0]), &f.normal) * self.face_area(i)
            })
            .sum::<S>()
            / d
    }

    /// Total boundary measure.
    pub fn surface_area(&self) -> S {
        (0..self.faces.len()).map(|i| self.face_area(i)).sum()
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> S {
        let mut best = S::zero();
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                best = best.max(dist(p, q));
            }
        }
        best
    }

    pub fn centroid_of_vertices(&self) -> Vec<S> {
        let n = S::from_usize_lossy(self.vertices.len());
        let mut c = vec![S::zero(); self.dim];
        for v in &self.vertices {
            for (cj, &x) in c.iter_mut().zip(v) {
                *cj += x / n;
            }
        }
        c
    }

    /// Whether `t` satisfies every face inequality up to `tol`.
    pub fn contains(&self, t: &[S], tol: S) -> bool {
        self.faces.iter().all(|f| {
            let p = self.vertex(f.vertices[0]);
            let s: S = t
                .iter()
                .zip(p)
                .zip(&f.normal)
                .map(|((&a, &b), &n)| (a - b) * n)
                .sum();
            s <= tol
        })
    }

    pub fn faces_tagged(&self, tag: FaceTag) -> impl Iterator<Item = usize> + '_ {
        self.faces
            .iter()
            .enumerate()
            .filter(move |(_, f)| f.tag == tag)
            .map(|(i, _)| i)
    }
}

/// Face complex of `P_{σ,r} = [-1,1]^d ∩ {t·σ ≤ r}` for `d ∈ {2, 3}`.
///
/// Each cube facet is clipped by the half-space; the cut face is assembled
/// from the points the clipping leaves on the hyperplane.
pub fn clip_cube<S: Real>(sigma: &Direction<S>, r: S) -> Result<ConvexCell<S>> {
    if !(r >= S::zero()) || !r.is_finite() {
        return Err(Error::InvalidRadius(r.to_f64_lossy()));
    }
    match sigma.dim() {
        2 => Ok(clip_square(sigma, r)),
        3 => Ok(clip_box(sigma, r)),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

fn clip_square<S: Real>(sigma: &Direction<S>, r: S) -> ConvexCell<S> {
    let one = S::one();
    let sq = [
        (
            [-one, -one],
            FaceTag::Cube {
                axis: 1,
                positive: false,
            },
        ),
        (
            [one, -one],
            FaceTag::Cube {
                axis: 0,
                positive: true,
            },
        ),
        (
            [one, one],
            FaceTag::Cube {
                axis: 1,
                positive: true,
            },
        ),
        (
            [-one, one],
            FaceTag::Cube {
                axis: 0,
                positive: false,
            },
        ),
    ];
    let s = sigma.components();
    let side = |p: &[S; 2]| p[0] * s[0] + p[1] * s[1] - r;

    // Sutherland–Hodgman, carrying the tag of each vertex's outgoing edge
    let mut out: Vec<([S; 2], FaceTag)> = Vec::with_capacity(5);
    for i in 0..4 {
        let (p, tag) = sq[i];
        let q = sq[(i + 1) % 4].0;
        let (fp, fq) = (side(&p), side(&q));
        let (pin, qin) = (fp <= S::zero(), fq <= S::zero());
        if pin {
            out.push((p, tag));
        }
        if pin != qin {
            let lam = fp / (fp - fq);
            let x = [p[0] + lam * (q[0] - p[0]), p[1] + lam * (q[1] - p[1])];
            out.push((x, if pin { FaceTag::Cut } else { tag }));
        }
    }

    // drop zero-length edges, keeping the later edge's tag
    let tol = S::tol(MERGE_TOL);
    let mut verts: Vec<([S; 2], FaceTag)> = Vec::with_capacity(out.len());
    for (p, tag) in out {
        match verts.last_mut() {
            Some(last) if dist(&last.0, &p) < tol => last.1 = tag,
            _ => verts.push((p, tag)),
        }
    }
    while verts.len() > 1 && dist(&verts[0].0, &verts[verts.len() - 1].0) < tol {
        let (_, tag) = verts.pop().expect("nonempty");
        // the popped vertex's outgoing edge starts at the merged first vertex
        verts[0].1 = tag;
    }

    let n = verts.len();
    let vertices: Vec<Vec<S>> = verts.iter().map(|(p, _)| p.to_vec()).collect();
    let faces = (0..n)
        .map(|i| {
            let tag = verts[i].1;
            Face {
                vertices: vec![i, (i + 1) % n],
                normal: tag_normal(tag, sigma),
                tag,
            }
        })
        .collect();
    ConvexCell {
        dim: 2,
        vertices,
        faces,
    }
}

fn clip_box<S: Real>(sigma: &Direction<S>, r: S) -> ConvexCell<S> {
    let one = S::one();
    let tol = S::tol(MERGE_TOL);
    let side = |p: &[S]| sigma.dot(p) - r;

    let mut vertices: Vec<Vec<S>> = Vec::new();
    let mut faces = Vec::new();
    let mut on_plane: Vec<Vec<S>> = Vec::new();
    let mut any_outside = false;

    for axis in 0..3 {
        for positive in [false, true] {
            let (p, q) = ((axis + 1) % 3, (axis + 2) % 3);
            let sgn = if positive { one } else { -one };
            let mut poly: Vec<Vec<S>> = [(-one, -one), (one, -one), (one, one), (-one, one)]
                .iter()
                .map(|&(a, b)| {
                    let mut v = vec![S::zero(); 3];
                    v[axis] = sgn;
                    v[p] = a;
                    v[q] = b;
                    v
                })
                .collect();
            if !positive {
                poly.reverse();
            }
            any_outside |= poly.iter().any(|v| side(v) > tol);

            let mut clipped: Vec<Vec<S>> = Vec::with_capacity(5);
            for i in 0..poly.len() {
                let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
                let (fa, fb) = (side(a), side(b));
                let (ain, bin) = (fa <= S::zero(), fb <= S::zero());
                if ain {
                    clipped.push(a.clone());
                    if fa.abs() <= tol {
                        on_plane.push(a.clone());
                    }
                }
                if ain != bin {
                    let lam = fa / (fa - fb);
                    let mut x: Vec<S> = a.iter().zip(b).map(|(&u, &w)| u + lam * (w - u)).collect();
                    x[axis] = sgn;
                    on_plane.push(x.clone());
                    clipped.push(x);
                }
            }
            dedup_cycle(&mut clipped, tol);
            if clipped.len() < 3 {
                continue;
            }
            let mut normal = vec![S::zero(); 3];
            normal[axis] = sgn;
            let idx: Vec<usize> = clipped
                .iter()
                .map(|v| insert_vertex(&mut vertices, v, tol))
                .collect();
            if polygon_area(&vertices, &idx, &normal) < tol {
                continue;
            }
            faces.push(Face {
                vertices: idx,
                normal,
                tag: FaceTag::Cube { axis, positive },
            });
        }
    }

    if any_outside {
        let mut pts: Vec<Vec<S>> = Vec::new();
        for v in on_plane {
            if !pts.iter().any(|w| dist(w, &v) < tol) {
                pts.push(v);
            }
        }
        if pts.len() >= 3 {
            let normal = sigma.components().to_vec();
            order_ccw(&mut pts, &normal);
            let idx: Vec<usize> = pts.iter().map(|v| insert_vertex(&mut vertices, v, tol)).collect();
            if polygon_area(&vertices, &idx, &normal) >= tol {
                faces.push(Face {
                    vertices: idx,
                    normal,
                    tag: FaceTag::Cut,
                });
            }
        }
    }

    ConvexCell {
        dim: 3,
        vertices,
        faces,
    }
}

fn tag_normal<S: Real>(tag: FaceTag, sigma: &Direction<S>) -> Vec<S> {
    match tag {
        FaceTag::Cut => sigma.components().to_vec(),
        FaceTag::Cube { axis, positive } => {
            let mut n = vec![S::zero(); sigma.dim()];
            n[axis] = if positive { S::one() } else { -S::one() };
            n
        }
    }
}

fn insert_vertex<S: Real>(vertices: &mut Vec<Vec<S>>, v: &[S], tol: S) -> usize {
    if let Some(i) = vertices.iter().position(|w| dist(w, v) < tol) {
        return i;
    }
    vertices.push(v.to_vec());
    vertices.len() - 1
}

fn dedup_cycle<S: Real>(poly: &mut Vec<Vec<S>>, tol: S) {
    poly.dedup_by(|a, b| dist(a, b) < tol);
    while poly.len() > 1 && dist(&poly[0], &poly[poly.len() - 1]) < tol {
        poly.pop();
    }
}

/// Sorts coplanar points counter-clockwise around `normal`.
fn order_ccw<S: Real>(pts: &mut [Vec<S>], normal: &[S]) {
    let n = S::from_usize_lossy(pts.len());
    let c: Vec<S> = (0..3).map(|j| pts.iter().map(|p| p[j]).sum::<S>() / n).collect();
    // in-plane basis (e1, e2) with e1 × e2 = normal
    let helper = if normal[0].abs() < S::lit(0.9) {
        [S::one(), S::zero(), S::zero()]
    } else {
        [S::zero(), S::one(), S::zero()]
    };
    let e1 = {
        let v = cross(&helper, normal);
        let l = norm(&v);
        [v[0] / l, v[1] / l, v[2] / l]
    };
    let e2 = cross(normal, &e1);
    let angle = |p: &Vec<S>| {
        let w = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
        dot(&w, &e2).atan2(dot(&w, &e1))
    };
    pts.sort_by(|a, b| angle(a).partial_cmp(&angle(b)).expect("finite angles"));
}

pub(crate) fn polygon_area<S: Real>(vertices: &[Vec<S>], idx: &[usize], normal: &[S]) -> S {
    let mut acc = [S::zero(); 3];
    for i in 0..idx.len() {
        let c = cross(&vertices[idx[i]], &vertices[idx[(i + 1) % idx.len()]]);
        for j in 0..3 {
            acc[j] += c[j];
        }
    }
    dot(&acc, normal) / S::lit(2.0)
}

pub(crate) fn cross<S: Real>(a: &[S], b: &[S]) -> [S; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn dot<S: Real>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub(crate) fn dist<S: Real>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}
