use cubedisc::fourier::{poisson_rhs, smoothed_lattice_sum, PreparedCell};
use cubedisc::geometry::{clip_cube, cut_volume, halfspace_volume};
use cubedisc::lattice::{count_cut, count_from_profile, point_set, projection_profile, LatticeSpec};
use cubedisc::quadrature::{integrate_abs_discrepancy, scaling_fit, sup_scan, QuadratureSpec};
use cubedisc::{Cell32, Cell64, Direction32, Direction64};

#[test]
fn profile_counts_agree_with_slices_and_points() {
    let spec = LatticeSpec::new(3, 4, 0.5).unwrap();
    let sigma = Direction64::normalized(vec![0.3, -0.5, 0.81]).unwrap();
    let profile = projection_profile(&spec, &sigma).unwrap();
    let points = point_set(&spec).unwrap();
    for k in 0..=20 {
        let r = k as f64 * 3f64.sqrt() / 20.0;
        let c = count_cut(&spec, &sigma, r).unwrap();
        assert_eq!(c, count_from_profile(&profile, &spec, r));
        // the normalised cut: points t with t·σ ≤ r, up to rounding of the division
        let direct = points.iter().filter(|t| sigma.dot(t) <= r).count() as i64;
        assert!((direct - c as i64).abs() <= 1, "r={r}: {direct} vs {c}");
    }
}

#[test]
fn complementary_cuts_tile_the_cube() {
    let sigma = Direction64::normalized(vec![0.2, 0.7, -0.4]).unwrap();
    for k in -10..=10 {
        let b = k as f64 * 0.13;
        let below = halfspace_volume(&sigma, b).unwrap();
        let flipped = Direction64::new(sigma.components().iter().map(|x| -x).collect()).unwrap();
        let above = halfspace_volume(&flipped, -b).unwrap();
        assert!((below + above - 8.0).abs() < 1e-12, "b={b}");
    }
}

#[test]
fn transform_at_zero_and_cell_volume_agree_with_cut_volume() {
    for (v, r) in [(vec![0.6, 0.8], 0.3), (vec![0.1, -0.3, 0.95], 0.7)] {
        let sigma = Direction64::normalized(v).unwrap();
        let cell: Cell64 = clip_cube(&sigma, r).unwrap();
        let vol = cut_volume(&sigma, r).unwrap();
        assert!((cell.volume() - vol).abs() < 1e-12);
        let zero = vec![0.0; sigma.dim()];
        let prepared = PreparedCell::new(&cell).unwrap();
        assert!((prepared.transform(&zero).re - vol).abs() < 1e-12);
    }
}

#[test]
fn single_precision_cell_tracks_double() {
    let s32 = Direction32::from_angle(0.4f32);
    let s64 = Direction64::from_angle(0.4f64);
    let c32: Cell32 = clip_cube(&s32, 0.25).unwrap();
    let c64: Cell64 = clip_cube(&s64, 0.25).unwrap();
    assert!((c32.volume() as f64 - c64.volume()).abs() < 1e-5);
    assert!((c32.surface_area() as f64 - c64.surface_area()).abs() < 1e-5);
}

#[test]
fn smoothed_count_obeys_poisson_summation() {
    let spec = LatticeSpec::half(2, 3).unwrap();
    let sigma = Direction64::from_angle(1.1);
    let out = poisson_rhs(&spec, &sigma, 0.6, spec.dilation(), 600).unwrap();
    let direct = smoothed_lattice_sum(&spec, &sigma, 0.6, spec.dilation()).unwrap();
    assert_eq!(out.lhs_sum, direct);
    assert!(out.residual().abs() <= out.tail_bound.max(1e-6));
}

#[test]
fn scan_supremum_matches_pointwise_integral() {
    let spec = LatticeSpec::half(2, 3).unwrap();
    let q = QuadratureSpec::trapezoid(256);
    let p = sup_scan(&spec, 16, &q).unwrap();
    let (v, _) = integrate_abs_discrepancy(&spec, p.sup_r, &q).unwrap();
    assert_eq!(v, p.sup_value);
    assert!(p.values.iter().all(|&(x, _)| x <= p.sup_value));

    let profiles: Vec<_> = [2, 3, 4]
        .iter()
        .map(|&m| sup_scan(&LatticeSpec::half(2, m).unwrap(), 16, &q).unwrap())
        .collect();
    let fit = scaling_fit(&profiles).unwrap();
    assert_eq!(fit.rows.len(), 3);
    assert!(fit.slope.is_finite());
}
