//! Walker–walker entanglement after tracing out the impurity spin.
//!
//! The reduced state ρ₁₂ = Σₛ vec(Ψₛ) vec(Ψₛ)† is kept as the two factors
//! Ψ↑, Ψ↓ restricted to the occupied single-walker supports. The partial
//! transpose over walker 1 is
//! ρ^Γ[(i,j),(i′,j′)] = Σₛ Ψₛ[i′,j] conj(Ψₛ[i,j′]).
//!
//! [`negativity`] first compresses each walker onto the joint range of the
//! factors. With orthonormal U, V spanning those ranges, Ψₛ = U Φₛ V† and
//! ρ^Γ = W K W† for the isometry W = conj(U ⊗ V), where K is the same
//! partial transpose built from Φₛ. The nonzero spectrum is therefore exact
//! while the eigenproblem shrinks from d₁d₂ to r₁r₂.

use faer::Mat;

use crate::c64;
use crate::error::{Error, Result};
use crate::hilbert::StateVector2W;
use crate::linalg::{self, ZERO};

/// Default limit on the dimension handed to the dense eigensolver.
pub const DEFAULT_DIM_CAP: usize = 10_000;

/// Eigenvalues smaller than this in magnitude are treated as zero.
pub const EIG_ZERO: f64 = 1e-13;

/// Relative singular-value cutoff for the range compression.
const RANGE_TOL: f64 = 1e-14;

/// Impurity-traced two-walker density matrix in factored form.
#[derive(Clone, Debug)]
pub struct ReducedDensity {
    /// Ψ↑ and Ψ↓, each d₁×d₂.
    pub factors: [Mat<c64>; 2],
    /// Walker-1 composite indices (2·site + σ) kept, in increasing order.
    pub support1: Vec<usize>,
    /// Walker-2 composite indices kept.
    pub support2: Vec<usize>,
}

impl ReducedDensity {
    pub fn dims(&self) -> (usize, usize) {
        (self.support1.len(), self.support2.len())
    }

    pub fn trace(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| {
                let mut t = 0.0;
                for j in 0..f.ncols() {
                    for i in 0..f.nrows() {
                        t += f[(i, j)].norm_sqr();
                    }
                }
                t
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NegativityResult {
    pub negativity: f64,
    pub min_eigenvalue: f64,
    /// d₁·d₂ on the occupied support.
    pub spectrum_dim: usize,
    /// Dimension actually diagonalized.
    pub solved_dim: usize,
}

/// Trace out S₀, keeping composite indices whose probability exceeds `support_eps`.
pub fn reduce_impurity(state: &StateVector2W, support_eps: f64) -> ReducedDensity {
    let lx = state.lx;
    let n = 2 * lx;
    let mut p1 = vec![0.0; n];
    let mut p2 = vec![0.0; n];
    for (k, cell) in state.amplitudes.chunks_exact(8).enumerate() {
        let (s1, s2) = (k / lx, k % lx);
        for (c, a) in cell.iter().enumerate() {
            let w = a.norm_sqr();
            p1[2 * s1 + (c & 1)] += w;
            p2[2 * s2 + ((c >> 1) & 1)] += w;
        }
    }
    let support1: Vec<usize> = (0..n).filter(|&i| p1[i] > support_eps).collect();
    let support2: Vec<usize> = (0..n).filter(|&i| p2[i] > support_eps).collect();
    let factors = [0, 1].map(|s0| {
        Mat::from_fn(support1.len(), support2.len(), |a, b| {
            let (i, j) = (support1[a], support2[b]);
            let (s1, sigma1, s2, sigma2) = (i / 2, i % 2, j / 2, j % 2);
            state.amplitudes[8 * (s1 * lx + s2) + 4 * s0 + 2 * sigma2 + sigma1]
        })
    });
    ReducedDensity { factors, support1, support2 }
}

fn partial_transpose(factors: &[Mat<c64>; 2]) -> Mat<c64> {
    let (d1, d2) = (factors[0].nrows(), factors[0].ncols());
    let n = d1 * d2;
    let mut m = Mat::<c64>::zeros(n, n);
    for f in factors {
        for i in 0..d1 {
            for jp in 0..d2 {
                let c = f[(i, jp)].conj();
                if c == ZERO {
                    continue;
                }
                for ip in 0..d1 {
                    for j in 0..d2 {
                        m[(i * d2 + j, ip * d2 + jp)] += f[(ip, j)] * c;
                    }
                }
            }
        }
    }
    m
}

fn check_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap { Err(Error::DimensionCap { dim, cap }) } else { Ok(()) }
}

/// Full spectrum of ρ^Γ on the occupied support, ascending.
pub fn partial_transpose_spectrum(rd: &ReducedDensity, cap: usize) -> Result<Vec<f64>> {
    let (d1, d2) = rd.dims();
    check_cap(d1 * d2, cap)?;
    if d1 * d2 == 0 {
        return Ok(Vec::new());
    }
    linalg::eigvalsh(&partial_transpose(&rd.factors))
}

/// Orthonormal basis of the column space of `a`.
fn range_basis(a: &Mat<c64>) -> Result<Mat<c64>> {
    let svd = a.thin_svd().map_err(|e| Error::Eigensolver(format!("svd: {e:?}")))?;
    let s = svd.S().column_vector();
    let top = if s.nrows() > 0 { s[0].re } else { 0.0 };
    let r = (0..s.nrows()).take_while(|&k| s[k].re > RANGE_TOL * top && s[k].re > 0.0).count();
    Ok(svd.U().subcols(0, r).to_owned())
}

/// Factors Φₛ = U† Ψₛ V on the joint ranges of the factors.
pub fn compress(rd: &ReducedDensity) -> Result<[Mat<c64>; 2]> {
    let (d1, d2) = rd.dims();
    let [a, b] = &rd.factors;
    let side = Mat::from_fn(d1, 2 * d2, |i, j| if j < d2 { a[(i, j)] } else { b[(i, j - d2)] });
    let stack = Mat::from_fn(d2, 2 * d1, |j, i| if i < d1 { a[(i, j)].conj() } else { b[(i - d1, j)].conj() });
    let u = range_basis(&side)?;
    let v = range_basis(&stack)?;
    Ok([a, b].map(|f| u.adjoint() * f * &v))
}

fn summarize(spec: &[f64], spectrum_dim: usize, solved_dim: usize) -> NegativityResult {
    let negativity = spec.iter().filter(|&&l| l < -EIG_ZERO).fold(0.0, |acc, l| acc - l);
    let min_eigenvalue = spec.iter().cloned().fold(0.0, f64::min);
    NegativityResult { negativity, min_eigenvalue, spectrum_dim, solved_dim }
}

/// Negativity from the uncompressed partial transpose (reference path).
pub fn negativity_dense(state: &StateVector2W, support_eps: f64, cap: usize) -> Result<NegativityResult> {
    let rd = reduce_impurity(state, support_eps);
    let (d1, d2) = rd.dims();
    let spec = partial_transpose_spectrum(&rd, cap)?;
    Ok(summarize(&spec, d1 * d2, d1 * d2))
}

/// Negativity Σ_{λ<0} |λ| of ρ₁₂^Γ, diagonalized on the compressed ranges.
pub fn negativity_with_cap(state: &StateVector2W, support_eps: f64, cap: usize) -> Result<NegativityResult> {
    let rd = reduce_impurity(state, support_eps);
    let (d1, d2) = rd.dims();
    if d1 * d2 == 0 {
        return Ok(summarize(&[], 0, 0));
    }
    let phi = compress(&rd)?;
    let n = phi[0].nrows() * phi[0].ncols();
    check_cap(n, cap)?;
    let spec = if n == 0 { Vec::new() } else { linalg::eigvalsh(&partial_transpose(&phi))? };
    Ok(summarize(&spec, d1 * d2, n))
}

pub fn negativity(state: &StateVector2W, support_eps: f64) -> Result<NegativityResult> {
    negativity_with_cap(state, support_eps, DEFAULT_DIM_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve2w::{initial_delta_delta, Evolver2W};
    use crate::hilbert::{Chirality, ModelParams, ParticleStatistics, Spin};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn bell(lx: usize) -> StateVector2W {
        let mut s = StateVector2W::zeros(lx);
        let h = c64::new(FRAC_1_SQRT_2, 0.0);
        s.add(1, Chirality::L, -2, Chirality::L, Spin::Up, h).unwrap();
        s.add(1, Chirality::R, -2, Chirality::R, Spin::Up, h).unwrap();
        s
    }

    #[test]
    fn product_state() {
        let mut s = StateVector2W::zeros(7);
        s.add(1, Chirality::L, 2, Chirality::L, Spin::Up, c64::new(1.0, 0.0)).unwrap();
        let rd = reduce_impurity(&s, 0.0);
        assert_eq!(rd.dims(), (1, 1));
        assert!((rd.trace() - 1.0).abs() < 1e-15);
        let spec = partial_transpose_spectrum(&rd, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(spec.len(), 1);
        assert!((spec[0] - 1.0).abs() < 1e-15);
        assert_eq!(negativity(&s, 0.0).unwrap().negativity, 0.0);
    }

    #[test]
    fn bell_state() {
        let s = bell(7);
        let rd = reduce_impurity(&s, 0.0);
        assert_eq!(rd.dims(), (2, 2));
        let spec = partial_transpose_spectrum(&rd, DEFAULT_DIM_CAP).unwrap();
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in spec.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        let n = negativity(&s, 0.0).unwrap();
        assert!((n.negativity - 0.5).abs() < 1e-14);
        assert!((n.min_eigenvalue + 0.5).abs() < 1e-14);
    }

    #[test]
    fn distinguishable_delta_support() {
        let p = ModelParams::xx(PI / 10.0, 3.0, 61);
        let s = initial_delta_delta(&p, ParticleStatistics::Distinguishable, 21).unwrap();
        let rd = reduce_impurity(&s, 0.0);
        assert_eq!(rd.dims(), (2, 1));
        assert!((rd.trace() - 1.0).abs() < 1e-15);
        assert!(negativity(&s, 0.0).unwrap().negativity < 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let s = bell(7);
        assert!(matches!(negativity_dense(&s, 0.0, 3), Err(Error::DimensionCap { dim: 4, cap: 3 })));
    }

    #[test]
    fn compressed_and_dense_paths_agree() {
        let lx = 11;
        for (p, stats) in [
            (ModelParams::xx(PI / 10.0, 3.0, lx), ParticleStatistics::Fermion),
            (ModelParams::xx(PI / 10.0, 1.0, lx), ParticleStatistics::Distinguishable),
            (ModelParams::su2(PI / 7.0, 2.0, lx), ParticleStatistics::Boson),
        ] {
            let ev = Evolver2W::new(&p).unwrap();
            ev.run(initial_delta_delta(&p, stats, 3).unwrap(), 12, |_, st| {
                let fast = negativity(st, 0.0).unwrap();
                let dense = negativity_dense(st, 0.0, DEFAULT_DIM_CAP).unwrap();
                let full = negativity_dense(st, -1.0, DEFAULT_DIM_CAP).unwrap();
                assert!((fast.negativity - dense.negativity).abs() < 1e-12);
                assert!((full.negativity - dense.negativity).abs() < 1e-12);
                // trace norm identity
                let rd = reduce_impurity(st, 0.0);
                let spec = partial_transpose_spectrum(&rd, DEFAULT_DIM_CAP).unwrap();
                let tn: f64 = spec.iter().map(|l| l.abs()).sum();
                assert!(((tn - 1.0) / 2.0 - dense.negativity).abs() < 1e-9);
                assert!((spec.iter().sum::<f64>() - rd.trace()).abs() < 1e-9);
            });
        }
    }

    #[test]
    fn global_phase_invariance() {
        let p = ModelParams::xx(PI / 10.0, 3.0, 15);
        let ev = Evolver2W::new(&p).unwrap();
        let s = ev.evolve(initial_delta_delta(&p, ParticleStatistics::Fermion, 4).unwrap(), 8);
        let mut t = s.clone();
        let ph = c64::from_polar(1.0, 0.7);
        t.amplitudes.iter_mut().for_each(|a| *a *= ph);
        let (a, b) = (negativity(&s, 0.0).unwrap(), negativity(&t, 0.0).unwrap());
        assert!(a.negativity > 1e-3);
        assert!((a.negativity - b.negativity).abs() < 1e-12);
    }
}
