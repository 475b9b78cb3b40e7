//! Independent oracles and property checks for the library.

mod common;

use common::{params, random_params, rng, semi_analytic_phase};
use nalgebra::Matrix2;
use nhadm::berry::{
    connection_closed_form, curvature_closed_form, curvature_dagger, curvature_plaquette, curvature_projector_trace,
    curvature_projector_trace_band, curvature_split_expanded, local_scale, plaquette_from_corners,
};
use nhadm::eigensystem::{eigensystem_at, eigensystem_following, Band};
use nhadm::integration::{
    berry_phase_analytic_general, berry_phase_grid, berry_phase_numeric, resolve_general_branch, QuadratureConfig,
};
use nhadm::linalg::principal_sqrt;
use nhadm::model::{bands_at, build_field, cartesian_split, energy_polar, phase_from_eta, ModelParams, Momentum};
use nhadm::spectral::{band_grid_scan, gap_closing_solutions, ExceptionalKind};
use nhadm::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn numeric_phase_matches_one_dimensional_oracle() {
    let cases = [
        (1.0, 0.3, 0.2, 0.1),
        (0.3, 0.5, 0.6, 0.4),
        (0.9, 0.0, 0.3, 0.2),
        (0.5, 0.0, 0.6, 0.3),
        (-0.4, 0.8, 0.1, 0.2),
        (-0.4, 0.8, 0.5, 0.2),
        (0.7, -0.2, -0.3, 0.45),
    ];
    let cfg = QuadratureConfig::default();
    for (m, d, kx, ky) in cases {
        let oracle = semi_analytic_phase(m, d, kx, ky);
        let num = berry_phase_numeric(&params(m, d, kx, ky), &cfg).unwrap();
        assert!((num.gamma - oracle).norm() < 1e-6, "{m} {d} {kx} {ky}: {} vs {oracle}", num.gamma);
    }
}

#[test]
fn oracle_reproduces_known_values() {
    assert!((semi_analytic_phase(1.0, 0.0, 0.0, 0.0) - 0.5).norm() < 1e-14);
    assert!((semi_analytic_phase(1.0, 0.3, 0.2, 0.1) - 0.5).norm() < 1e-10);
    assert!((semi_analytic_phase(-0.4, 0.8, 0.1, 0.2) + 0.5).norm() < 1e-10);
}

/// With no exceptional points the principal-branch phase is `±½`; when they
/// exist the cut cancels it to zero.
#[test]
fn principal_branch_phase_is_quantised() {
    let mut r = rng(11);
    let cfg = QuadratureConfig::default();
    for _ in 0..12 {
        let p = random_params(&mut r);
        let kperp = (p.kappa_x * p.kappa_x + p.kappa_y * p.kappa_y).sqrt();
        let g = berry_phase_numeric(&p, &cfg).unwrap().gamma;
        let ep_free = kperp < p.m.abs() || (kperp - p.m.abs()).abs() < 1e-12 && p.delta == 0.0;
        let expected = if ep_free { 0.5 * p.m.signum() } else { 0.0 };
        assert!((g - expected).norm() < 1e-6, "{p:?}: {g}");
    }
}

#[test]
fn eigenvalues_match_dense_solver() {
    let mut r = rng(3);
    for _ in 0..500 {
        let p = random_params(&mut r);
        let k = Momentum::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let h = build_field(&p, &k).hamiltonian().0;
        let m = Matrix2::new(h[0][0], h[0][1], h[1][0], h[1][1]);
        let mut ev: Vec<Complex64> = m.schur().eigenvalues().unwrap().iter().cloned().collect();
        ev.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
        let b = bands_at(&p, &k);
        let scale = b.modulus.max(1.0);
        if b.modulus < 1e-4 {
            continue;
        }
        let mut ours = [b.e_plus, b.e_minus];
        ours.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
        for (a, o) in ev.iter().zip(ours) {
            assert!((a - o).norm() < 1e-10 * scale, "{a} vs {o}");
        }
    }
}

#[test]
fn eigenvectors_satisfy_dense_products() {
    let mut r = rng(5);
    for _ in 0..200 {
        let p = random_params(&mut r);
        let k = Momentum::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let s = eigensystem_at(&p, &k);
        if s.degenerate {
            continue;
        }
        let h = build_field(&p, &k).hamiltonian().0;
        let hm = Matrix2::new(h[0][0], h[0][1], h[1][0], h[1][1]);
        for band in [Band::Plus, Band::Minus] {
            let e = s.energy(band);
            let psi = s.right(band).0;
            let v = nalgebra::Vector2::new(psi[0], psi[1]);
            let res = hm * v - v * e;
            assert!(res.norm() < 1e-10, "right residual {}", res.norm());
            let phi = s.left(band).0;
            let w = nalgebra::Vector2::new(phi[0], phi[1]);
            let res = hm.adjoint() * w - w * e.conj();
            assert!(res.norm() < 1e-9 * w.norm().max(1.0), "left residual {}", res.norm());
        }
    }
}

#[test]
fn hermitian_connection_is_monopole() {
    let p = ModelParams::hermitian(0.7);
    let k = Momentum::new(0.3, -0.4);
    let a = connection_closed_form(&p, &k).unwrap();
    let e = (0.25_f64 + 0.49).sqrt();
    let den = 2.0 * e * (e + 0.7);
    assert!((a.a_x - c(0.4 / den, 0.0)).norm() < 1e-14);
    assert!((a.a_y - c(0.3 / den, 0.0)).norm() < 1e-14);
}

/// The circulation of the connection around a shrinking square approaches
/// the curvature times the area.
#[test]
fn connection_curl_is_curvature() {
    let mut r = rng(8);
    let mut done = 0;
    while done < 50 {
        let p = random_params(&mut r);
        let k = Momentum::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        if bands_at(&p, &k).modulus < 0.1 {
            continue;
        }
        let h = 1e-5 * local_scale(&p, &k).min(1.0);
        let at = |dx: f64, dy: f64| connection_closed_form(&p, &Momentum::new(k.kx + dx, k.ky + dy)).unwrap();
        let curl = (at(h, 0.0).a_y - at(-h, 0.0).a_y - at(0.0, h).a_x + at(0.0, -h).a_x) / (2.0 * h);
        let omega = curvature_closed_form(&p, &k).unwrap().omega;
        assert!((curl - omega).norm() < 1e-5 * omega.norm().max(1e-3), "{curl} vs {omega}");
        done += 1;
    }
}

#[test]
fn band_curvatures_are_opposite() {
    let p = params(0.4, 0.3, 0.2, -0.5);
    let k = Momentum::new(0.6, 0.1);
    let lo = curvature_projector_trace_band(&p, &k, 1e-4, Band::Minus).unwrap().omega;
    let hi = curvature_projector_trace_band(&p, &k, 1e-4, Band::Plus).unwrap().omega;
    assert!((lo + hi).norm() < 1e-9 * lo.norm());
}

#[test]
fn dagger_is_conjugate() {
    let mut r = rng(13);
    for _ in 0..200 {
        let p = random_params(&mut r);
        let k = Momentum::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        if bands_at(&p, &k).modulus < 1e-3 {
            continue;
        }
        let o = curvature_closed_form(&p, &k).unwrap().omega;
        let d = curvature_dagger(&p, &k).unwrap();
        assert!((d - o.conj()).norm() <= 1e-12 * o.norm());
    }
}

#[test]
fn expanded_split_matches_complex_form() {
    let mut r = rng(17);
    for _ in 0..200 {
        let p = random_params(&mut r);
        let k = Momentum::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        if bands_at(&p, &k).modulus < 1e-2 {
            continue;
        }
        let cs = curvature_closed_form(&p, &k).unwrap();
        let (er, ei) = curvature_split_expanded(&p, &k).unwrap();
        let s = cs.omega.norm();
        assert!((er - cs.omega_r).abs() < 1e-9 * s && (ei - cs.omega_i).abs() < 1e-9 * s, "{er} {ei} {cs:?}");
    }
}

/// On `k·κ = 0` the curvature is `M/(2(k² − κ² + M²)^{3/2})`; the mass term
/// in the root is essential.
#[test]
fn curvature_on_inversion_line() {
    let p = params(0.6, 0.25, 0.3, 0.4);
    let k = Momentum::new(0.8, -0.6);
    let mm = c(0.6, 0.25);
    let q = c(1.0 - 0.25, 0.0) + mm * mm;
    let e = principal_sqrt(q);
    let expected = mm / (2.0 * e * e * e);
    let o = curvature_closed_form(&p, &k).unwrap().omega;
    assert!((o - expected).norm() < 1e-14);
}

/// The curvature does not vanish on the circle `k² = κ² − m²` at `m = δ`.
#[test]
fn curvature_nonzero_on_equal_mass_circle() {
    let (m, kap) = (0.3_f64, 0.8_f64);
    let p = params(m, m, kap, 0.0);
    let rad = (kap * kap - m * m).sqrt();
    for t in [0.1_f64, 0.9, 2.0, 4.0] {
        let k = Momentum::new(rad * t.cos(), rad * t.sin());
        let cs = curvature_closed_form(&p, &k).unwrap();
        assert!(cs.omega_r.abs() > 1e-3 || cs.omega_i.abs() > 1e-3, "{cs:?}");
    }
}

#[test]
fn plaquette_is_gauge_invariant() {
    let mut r = rng(21);
    for _ in 0..50 {
        let p = random_params(&mut r);
        let k = Momentum::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        if bands_at(&p, &k).modulus < 0.1 {
            continue;
        }
        let step = 1e-3 * local_scale(&p, &k).min(1.0);
        let reference = bands_at(&p, &k).e_plus;
        let h = 0.5 * step;
        let corner = |dx: f64, dy: f64| eigensystem_following(&p, &Momentum::new(k.kx + dx, k.ky + dy), reference);
        let base = [corner(-h, -h), corner(h, -h), corner(h, h), corner(-h, h)];
        let mut moved = base;
        for s in moved.iter_mut() {
            let z = Complex64::from_polar(r.gen_range(0.2..5.0), r.gen_range(-3.0..3.0));
            *s = s.regauge(Band::Minus, z);
        }
        let a = plaquette_from_corners(&base, Band::Minus, step).unwrap().omega;
        let b = plaquette_from_corners(&moved, Band::Minus, step).unwrap().omega;
        // compare the loop phases `Ω·step²`
        assert!((a - b).norm() * step * step < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn hermitian_routes_reduce_to_monopole() {
    for m in [1.0, -0.5] {
        let p = ModelParams::hermitian(m);
        let k = Momentum::new(0.3, 0.2);
        let kk = (0.13_f64 + m * m).sqrt();
        let exact = m / (2.0 * kk.powi(3));
        let cf = curvature_closed_form(&p, &k).unwrap();
        assert!((cf.omega.re - exact).abs() < 1e-10 && cf.omega.im == 0.0);
        let t = curvature_projector_trace(&p, &k, 1e-4).unwrap().omega;
        let q = curvature_plaquette(&p, &k, 1e-3).unwrap().omega;
        assert!((t.re - exact).abs() < 1e-7 && t.im.abs() < 1e-10);
        // ln W is O(step²), so rounding in W is amplified by 1/step².
        assert!((q.re - exact).abs() < 1e-6 && q.im.abs() < 1e-9);
    }
}

#[test]
fn polar_form_matches_arctangent_where_real_part_dominates() {
    let mut r = rng(2);
    for _ in 0..500 {
        let p = random_params(&mut r);
        let k = Momentum::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let b = bands_at(&p, &k);
        let Ok(pf) = energy_polar(&b) else { continue };
        let f = build_field(&p, &k);
        let formula = phase_from_eta(pf.eta);
        let expected = if f.norm_sq.re >= 0.0 { formula } else { std::f64::consts::FRAC_PI_2 - formula };
        assert!((pf.phase - expected).abs() < 1e-9, "{} vs {expected}", pf.phase);
        let (er, ei) = cartesian_split(f.norm_sq.re, 0.5 * f.norm_sq.im);
        assert!((er - b.e_r).abs() < 1e-9 * b.modulus.max(1.0));
        assert!((ei - b.e_i).abs() < 1e-9 * b.modulus.max(1.0));
    }
}

/// The closure point `√2(κ² − m², κ² − m²)` given for `mδ = 0` is generally
/// not a zero of `h·h`; the exceptional points are elsewhere.
#[test]
fn listed_mass_free_closure_point_is_not_exceptional() {
    for (m, d, kap) in [(0.3, 0.0, 0.5), (0.0, 0.4, 0.5), (0.2, 0.0, 0.7)] {
        let p = params(m, d, kap, kap);
        let kk = kap * kap + kap * kap - m * m;
        let q = Momentum::new(2f64.sqrt() * kk, 2f64.sqrt() * kk);
        assert!(bands_at(&p, &q).modulus > 0.1, "{m} {d} {kap}");
        let set = gap_closing_solutions(&ModelParams { bz_half_width: 2.0, ..p });
        assert!(!set.points.is_empty());
        // |E| = √|h·h| and |h·h| cannot drop below about one ulp of k², so
        // the best representable point sits near 1e-8.
        for k in &set.points {
            assert!(bands_at(&p, k).modulus < 2e-8);
        }
    }
}

/// For `κx = κy` the points `(0, ±mδ/κ)` and `(±mδ/κ, 0)` lie on the line
/// `k·κ = −mδ` only with the minus sign, and are on the circle only for
/// special parameters.
#[test]
fn diagonal_kappa_axis_points() {
    let (m, d, kap) = (0.5, 0.4, 0.6);
    let p = params(m, d, kap, kap);
    let on_line = Momentum::new(0.0, -m * d / kap);
    let f = build_field(&p, &on_line);
    assert!(f.norm_sq.im.abs() < 1e-15);
    assert!(f.norm_sq.re.abs() > 0.1);
    let set = gap_closing_solutions(&p);
    assert_eq!(set.kind, ExceptionalKind::CircleLineIntersections);
    for k in &set.points {
        assert!((k.kx * kap + k.ky * kap + m * d).abs() < 1e-12);
        assert!(bands_at(&p, k).modulus < 1e-8);
    }
}

#[test]
fn nested_grid_minimum_is_monotone() {
    let mut r = rng(31);
    for _ in 0..10 {
        let p = random_params(&mut r);
        let mut last = f64::INFINITY;
        let mut n = 9;
        while n <= 257 {
            let g = band_grid_scan(&p, n, n).unwrap();
            assert!(g.min_abs_e <= last);
            last = g.min_abs_e;
            n = 2 * n - 1;
        }
    }
}

#[test]
fn imaginary_part_inverts_across_line() {
    let p = params(0.0, 0.0, 0.2, 0.2);
    let n = 101;
    let g = band_grid_scan(&p, n, n).unwrap();
    let mut flips = 0;
    for j in 0..n {
        for i in 0..n - 1 {
            let (a, b) = (g.e_plus_im[g.index(i, j)], g.e_plus_im[g.index(i + 1, j)]);
            let (x0, x1, y) = (g.kxs[i], g.kxs[i + 1], g.kys[j]);
            if a * b < 0.0 {
                flips += 1;
                assert!((x0 + y) * (x1 + y) <= 0.0, "flip off the line at {x0} {y}");
            }
        }
    }
    assert!(flips > 10);
}

#[test]
fn grid_rule_converges_without_exceptional_points() {
    let p = ModelParams::with_bz(1.0, 0.2, 0.1, 0.2, 3.0).unwrap();
    let cfg = QuadratureConfig { grid_n: 512, ..QuadratureConfig::default() };
    let g = berry_phase_grid(&p, &cfg).unwrap();
    let mut tight = cfg.clone();
    tight.grid_n = 1024;
    let h = berry_phase_grid(&p, &tight).unwrap();
    assert!((g.gamma - h.gamma).norm() < 2.0 * g.est_error.max(1e-12));
}

#[test]
fn branch_resolution_prefers_matching_candidate() {
    let p = params(0.0, -1.0, 0.4, 1e-9);
    let g = berry_phase_analytic_general(&p).unwrap().gamma;
    let b = resolve_general_branch(&p, g - 2.0, 1e-6).unwrap();
    assert_eq!(b.shift, -2);
    assert!(!b.ambiguous);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bands_are_opposite_roots(m in -2.0..2.0f64, d in -2.0..2.0f64, kx in -2.0..2.0f64,
                                ky in -2.0..2.0f64, qx in -2.0..2.0f64, qy in -2.0..2.0f64) {
        let p = params(m, d, kx, ky);
        let k = Momentum::new(qx, qy);
        let b = bands_at(&p, &k);
        prop_assert_eq!(b.e_plus + b.e_minus, c(0.0, 0.0));
        prop_assert!(b.e_plus.re >= 0.0);
        let f = build_field(&p, &k);
        prop_assert!((b.e_plus * b.e_plus - f.norm_sq).norm() < 1e-12 * f.norm_sq.norm().max(1.0));
        prop_assert!(b.phase >= 0.0 && b.phase <= std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn biorthonormal_away_from_exceptional_points(m in -2.0..2.0f64, d in -2.0..2.0f64, kx in -2.0..2.0f64,
                                                   ky in -2.0..2.0f64, qx in -2.0..2.0f64, qy in -2.0..2.0f64) {
        let p = params(m, d, kx, ky);
        let s = eigensystem_at(&p, &Momentum::new(qx, qy));
        prop_assume!(s.energies.modulus > 1e-3);
        let g = s.gram();
        prop_assert!((g.0[0][0] - 1.0).norm() < 1e-8 && (g.0[1][1] - 1.0).norm() < 1e-8);
        prop_assert!(g.0[0][1].norm() < 1e-8 && g.0[1][0].norm() < 1e-8);
    }

    #[test]
    fn general_phase_is_scale_invariant(m in -2.0..2.0f64, d in -2.0..2.0f64, kx in -2.0..2.0f64,
                                        ky in -2.0..2.0f64, s in 0.1..10.0f64) {
        let a = berry_phase_analytic_general(&params(m, d, kx, ky));
        let b = berry_phase_analytic_general(&params(s * m, s * d, s * kx, s * ky));
        if let (Ok(a), Ok(b)) = (a, b) {
            let diff = a.gamma - b.gamma;
            prop_assert!((diff.re - diff.re.round()).abs() < 1e-8 && diff.im.abs() < 1e-8, "{:?}", diff);
        }
    }

    #[test]
    fn susceptance_sign_follows_imaginary_phase(gr in -2.0..2.0f64, gi in -2.0..2.0f64, w in 0.01..100.0f64) {
        let b = nhadm::integration::BerryPhase::new(c(gr, gi), nhadm::integration::Method::AnalyticGeneral, 0.0);
        let a = nhadm::response::admittance(&b, w).unwrap();
        prop_assert_eq!(a.susceptance_b.signum(), gi.signum());
        prop_assert_eq!(a.sigma_h, gr);
    }
}
