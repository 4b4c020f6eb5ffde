use cone_spectral::harness::{sweep_half_wave, sweep_schrodinger, PointPair, SweepGrid, SweepOptions};
use cone_spectral::SweepGrid64;

fn small_grid() -> SweepGrid64 {
    SweepGrid {
        sigma_list: vec![0.5, 1.5, 2.0],
        t_list: vec![-1.0, -0.2, 0.2, 1.0],
        k_list: vec![0, 2],
        point_pairs: vec![
            PointPair::turns(1.0, 0.0, 1.0, 0.5),
            PointPair::turns(0.5, 0.0, 2.0, 0.1),
            PointPair::turns(2.0, 0.0, 3.0, 0.25),
        ],
        tol: 1e-9,
        refinement: 0,
    }
}

fn no_refine() -> SweepOptions {
    SweepOptions { refine: false, ..Default::default() }
}

#[test]
fn schrodinger_sup_is_scale_invariant() {
    let base = sweep_schrodinger(&small_grid(), &no_refine()).unwrap();
    for &a in &[0.5, 3.0] {
        let mut g = small_grid();
        g.t_list.iter_mut().for_each(|t| *t *= a * a);
        for p in &mut g.point_pairs {
            p.r1 *= a;
            p.r2 *= a;
        }
        let scaled = sweep_schrodinger(&g, &no_refine()).unwrap();
        assert!((scaled.empirical_constant - base.empirical_constant).abs() <= 1e-8 * base.empirical_constant);
        for (x, y) in base.per_sigma.iter().zip(&scaled.per_sigma) {
            assert!((x.sup - y.sup).abs() <= 1e-8 * x.sup);
        }
    }
}

#[test]
fn repeated_sweeps_are_bitwise_identical() {
    let csv = || {
        let r = sweep_schrodinger(&small_grid(), &no_refine()).unwrap();
        let mut out = Vec::new();
        r.write_csv(&mut out).unwrap();
        out
    };
    assert_eq!(csv(), csv());
}

#[test]
fn constant_does_not_grow_as_tolerance_tightens() {
    let mut loose = small_grid();
    loose.tol = 1e-6;
    let a = sweep_schrodinger(&loose, &no_refine()).unwrap().empirical_constant;
    let b = sweep_schrodinger(&small_grid(), &no_refine()).unwrap().empirical_constant;
    assert!(b <= 2.0 * a, "{} vs {}", b, a);
}

#[test]
fn half_wave_ratios_are_finite_or_recorded() {
    let r = sweep_half_wave(&small_grid(), &no_refine()).unwrap();
    for (i, row) in r.rows.iter().enumerate() {
        assert!(row.ratio.is_finite() || r.failures.iter().any(|f| f.row == i));
    }
    assert!(r.empirical_constant.is_finite());
    assert_eq!(r.per_sigma[0].per_k.len(), 2);
}
