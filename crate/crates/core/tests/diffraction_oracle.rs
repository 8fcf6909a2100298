//! Closed-form vs brute-force propagation on the production geometry.
//!
//! The analytic route models complementary half-plane masks splitting at
//! the origin (the narrow-slit limit), so the numeric oracle is driven
//! with the same gap -> 0 masks; the slit-gap parameter stays at the
//! production value for the validity flag. Amplitude error is measured as
//! an L-infinity norm relative to the peak amplitude.

use wva_core::diffraction::{
    arm_phase_difference, propagate_closed_form, propagate_numeric, slit_fields_with_gap, Arm,
    OpticalGeometry,
};
use wva_core::grid::GridSpec;

fn paper_geometry() -> OpticalGeometry<f64> {
    OpticalGeometry::new(632.992e-9, 0.325e-3, 0.425e-3, 1.0).unwrap()
}

fn oracle_comparison(
    out_grid: &GridSpec<f64>,
    input_nodes: usize,
) -> (f64, f64) {
    let g = paper_geometry();
    assert!(g.narrow_slit_valid());

    let half = 4.0 * g.sigma_xy;
    let in_grid = GridSpec::new(input_nodes, input_nodes, 2.0 * half / input_nodes as f64).unwrap();
    let (up_in, lo_in) = slit_fields_with_gap(&g, &in_grid, 0.0).unwrap();

    let up_num = propagate_numeric(&up_in, &g, out_grid).unwrap();
    let lo_num = propagate_numeric(&lo_in, &g, out_grid).unwrap();
    let up_cf = propagate_closed_form(&g, Arm::Upper, out_grid).unwrap();
    let lo_cf = propagate_closed_form(&g, Arm::Lower, out_grid).unwrap();

    let peak = up_cf
        .values
        .as_slice()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);

    let mut amp_linf: f64 = 0.0;
    let mut phase_err: f64 = 0.0;
    for r in 0..out_grid.rows {
        for c in 0..out_grid.cols {
            let n = up_num.values.get(r, c);
            let a = up_cf.values.get(r, c);
            amp_linf = amp_linf.max((n.norm() - a.norm()).abs() / peak);

            // phase difference between arms, guarded against negligible
            // amplitudes where arg() is numerically meaningless
            if a.norm() > 1e-4 * peak {
                let dp_num = (up_num.values.get(r, c) * lo_num.values.get(r, c).conj()).arg();
                let dp_cf = (a * lo_cf.values.get(r, c).conj()).arg();
                phase_err = phase_err.max((dp_num - dp_cf).abs());
            }
        }
    }
    (amp_linf, phase_err)
}

#[test]
fn closed_form_matches_numeric_oracle_on_ccd_window() {
    // 512^2 detector window at the CCD pitch
    let out = GridSpec::new(512, 512, 1.85e-6).unwrap();
    let (amp, phase) = oracle_comparison(&out, 512);
    println!("oracle equivalence: amplitude L-inf {amp:.2e}, phase diff {phase:.2e} rad");
    assert!(amp < 1e-3, "amplitude L-inf {amp}");
    assert!(phase < 1e-2, "phase-difference error {phase}");
}

#[test]
fn closed_form_matches_numeric_oracle_out_to_three_sigma() {
    // coarser pitch reaching |coordinate| <= 3 sigma', where the erfi
    // wings dominate the amplitude
    let g = paper_geometry();
    let sp = g.sigma_prime();
    let n = 192;
    let out = GridSpec::new(n, n, 2.0 * 3.0 * sp / n as f64).unwrap();
    let (amp, phase) = oracle_comparison(&out, 512);
    assert!(amp < 1e-3, "amplitude L-inf {amp}");
    assert!(phase < 1e-2, "phase-difference error {phase}");
}

#[test]
fn numeric_route_handles_true_gap() {
    // with the real 0.425 mm gap the arms lose the on-axis light; the
    // total detected power drops relative to the gap-free split
    let g = paper_geometry();
    let in_grid = GridSpec::new(384, 384, 8.0 * g.sigma_xy / 384.0).unwrap();
    let out = GridSpec::new(128, 16, 1.85e-6 * 4.0).unwrap();

    let (up0, _) = slit_fields_with_gap(&g, &in_grid, 0.0).unwrap();
    let (up1, _) = slit_fields_with_gap(&g, &in_grid, g.d1).unwrap();
    let f0 = propagate_numeric(&up0, &g, &out).unwrap();
    let f1 = propagate_numeric(&up1, &g, &out).unwrap();
    let p0: f64 = f0.values.as_slice().iter().map(|c| c.norm_sqr()).sum();
    let p1: f64 = f1.values.as_slice().iter().map(|c| c.norm_sqr()).sum();
    assert!(p1 < p0, "gap must remove power: {p1} vs {p0}");
    // on-axis amplitude ratio is erfc(w)/erfc(0) with w = d1/(2 sigma)
    let w = g.d1 / (2.0 * g.sigma_xy);
    let expected = wva_core::special::erf(w);
    let r0 = f0.values.get(out.rows / 2, out.cols / 2).norm();
    let r1 = f1.values.get(out.rows / 2, out.cols / 2).norm();
    assert!(
        ((1.0 - r1 / r0) - expected).abs() < 1e-3,
        "on-axis suppression {} vs erf(w) = {}",
        1.0 - r1 / r0,
        expected
    );
}

#[test]
fn phase_difference_helper_matches_fields() {
    let g = paper_geometry();
    let sp = g.sigma_prime();
    let out = GridSpec::new(96, 4, sp / 12.0).unwrap();
    let up = propagate_closed_form(&g, Arm::Upper, &out).unwrap();
    let lo = propagate_closed_form(&g, Arm::Lower, &out).unwrap();
    for r in 0..out.rows {
        let z = out.y(r) / sp;
        let measured = (up.values.get(r, 1) * lo.values.get(r, 1).conj()).arg();
        assert!((measured - arm_phase_difference(z)).abs() < 1e-9);
    }
}
