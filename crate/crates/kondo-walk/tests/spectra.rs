use std::f64::consts::PI;

use kondo_walk::bound_analytic;
use kondo_walk::evolve1w::{self, Frame};
use kondo_walk::{c64, ModelParams};

const PHI: f64 = PI / 10.0;

fn sorted(mut v: Vec<c64>) -> Vec<c64> {
    v.sort_by(|a, b| evolve1w::phase(*a).total_cmp(&evolve1w::phase(*b)));
    v
}

#[test]
fn frames_share_eigenvalues_and_map_eigenvectors() {
    let p = ModelParams::xx(PHI, 1.0, 51);
    let sym = evolve1w::build_u1w(&p, Frame::Symmetric).unwrap();
    let shf = evolve1w::build_u1w(&p, Frame::Shifted).unwrap();
    let s1 = evolve1w::spectrum(&sym, &p).unwrap();
    let s2 = evolve1w::spectrum(&shf, &p).unwrap();
    let (a, b) = (sorted(s1.eigenvalues.clone()), sorted(s2.eigenvalues.clone()));
    let gap = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(gap < 1e-9, "eigenvalue mismatch {gap:e}");

    for (z, v) in s2.eigenvalues.iter().zip(&s2.eigenvectors) {
        let w = evolve1w::to_symmetric_frame(&p, v).unwrap();
        let uw = sym.apply(&w.amplitudes);
        let r: f64 = uw.iter().zip(&w.amplitudes).map(|(x, y)| (x - z * y).norm_sqr()).sum::<f64>().sqrt();
        assert!(r < 1e-8, "mapped residual {r:e} at z = {z}");
    }
}

#[test]
fn bound_states_have_partial_spin_alignment() {
    for p in [ModelParams::xx(PHI, 1.0, 101), ModelParams::su2(PHI, 5.0, 101), ModelParams::su2(PHI, 20.0, 101)] {
        let u = evolve1w::build_u1w(&p, Frame::Symmetric).unwrap();
        let spec = evolve1w::spectrum(&u, &p).unwrap();
        assert!(spec.bound_count() > 0);
        for k in spec.bound_indices() {
            let j = evolve1w::j10_squared(&spec.eigenvectors[k]);
            assert!(j > 0.0 && j < 2.0, "<J10^2> = {j} for z = {}", spec.eigenvalues[k]);
        }
    }
}

#[test]
fn analytic_bound_state_matches_numerical_eigenvector() {
    // the tails must fall to round-off before the seam of the ring
    let lx = 201;
    for j in [1.0, 3.0] {
        let p = ModelParams::xx(PHI, j, lx);
        let u = evolve1w::build_u1w(&p, Frame::Shifted).unwrap();
        let spec = evolve1w::spectrum(&u, &p).unwrap();
        assert_eq!(spec.bound_count(), 4);
        for which in 1..=4 {
            let sol = bound_analytic::assemble_bound_state(PHI, j, which, lx).unwrap();
            assert!(sol.residual < 1e-8);
            let k = spec
                .bound_indices()
                .into_iter()
                .min_by(|&a, &b| {
                    (spec.eigenvalues[a] - sol.eigenvalue).norm().total_cmp(&(spec.eigenvalues[b] - sol.eigenvalue).norm())
                })
                .unwrap();
            assert!((spec.eigenvalues[k] - sol.eigenvalue).norm() < 1e-9);
            let overlap: c64 = spec.eigenvectors[k]
                .amplitudes
                .iter()
                .zip(&sol.wavefunction.amplitudes)
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert!(overlap.norm() > 1.0 - 1e-6, "J = {j}, which = {which}: |<num|ana>| = {}", overlap.norm());
        }
    }
}

#[test]
fn numerical_localization_lengths_follow_the_closed_form() {
    for j in [1.0, 2.0, 3.0] {
        let p = ModelParams::xx(PHI, j, 201);
        let sol = bound_analytic::assemble_bound_state(PHI, j, 1, 201).unwrap();
        let fit = evolve1w::localization_fit(&sol.wavefunction, &p).unwrap();
        let rel = (fit - sol.localization_length).abs() / sol.localization_length;
        assert!(rel < 0.02, "J = {j}: fit {fit} vs {}", sol.localization_length);
    }
}
