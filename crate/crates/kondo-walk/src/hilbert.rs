//! Index conventions and state containers.
//!
//! One walker: flat index `4·site + 2·S₀ + σ`, basis order (L↑, R↑, L↓, R↓).
//! Two walkers: flat index `8·(site₁·lx + site₂) + 4·S₀ + 2·σ₂ + σ₁`, basis
//! order (LL↑, RL↑, LR↑, RR↑, LL↓, RL↓, LR↓, RR↓) with σ₁ written first.
//! `site = x + (lx−1)/2`, so the impurity sits on the middle site.

use crate::error::{Error, Result};
use crate::operators;
use crate::c64;

/// Tolerance used by every "is this normalized" check.
pub const NORM_TOL: f64 = 1e-12;

/// Walker chirality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chirality {
    L = 0,
    R = 1,
}

/// Impurity spin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up = 0,
    Down = 1,
}

impl Chirality {
    pub const ALL: [Chirality; 2] = [Chirality::L, Chirality::R];

    pub fn from_index(i: usize) -> Chirality {
        if i == 0 { Chirality::L } else { Chirality::R }
    }

    /// Lattice displacement produced by the shift operator.
    pub fn step(self) -> i64 {
        match self {
            Chirality::L => -1,
            Chirality::R => 1,
        }
    }
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn from_index(i: usize) -> Spin {
        if i == 0 { Spin::Up } else { Spin::Down }
    }

    /// Eigenvalue of the Pauli z matrix (+1 for up).
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

/// Particle statistics of a two-walker initial state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParticleStatistics {
    Fermion,
    Boson,
    Distinguishable,
}

/// Physical and numerical parameters shared by every module.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// Coin angle in radians.
    pub phi: f64,
    /// Kinetic velocity scale entering the impurity scattering matrices.
    pub epsilon: f64,
    /// Delta-potential strength; only used to cross-check `phi`.
    pub m: Option<f64>,
    pub j_x: f64,
    pub j_y: f64,
    pub j_z: f64,
    /// Odd number of lattice sites.
    pub lx: usize,
    /// Margin in cos²λ separating bound from bulk eigenvalues.
    pub band_margin: f64,
    /// Probability threshold for support projection (0 keeps every nonzero).
    pub support_eps: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            phi: std::f64::consts::PI / 10.0,
            epsilon: 1.0,
            m: None,
            j_x: 0.0,
            j_y: 0.0,
            j_z: 0.0,
            lx: 201,
            band_margin: 1e-9,
            support_eps: 0.0,
        }
    }
}

impl ModelParams {
    /// XX coupling `J_x = J_y = j`, `J_z = 0`.
    pub fn xx(phi: f64, j: f64, lx: usize) -> Self {
        ModelParams { phi, j_x: j, j_y: j, j_z: 0.0, lx, ..Default::default() }
    }

    /// Isotropic coupling `J_x = J_y = J_z = j`.
    pub fn su2(phi: f64, j: f64, lx: usize) -> Self {
        ModelParams { phi, j_x: j, j_y: j, j_z: j, lx, ..Default::default() }
    }

    /// Coin angle derived from Dirac parameters; `m` is retained for validation.
    pub fn from_dirac(epsilon: f64, m: f64, lx: usize) -> Self {
        ModelParams {
            phi: operators::phi_from_dirac(epsilon, m),
            epsilon,
            m: Some(m),
            lx,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lx < 3 || self.lx.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "lx must be odd and >= 3, got {}",
                self.lx
            )));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        for (name, v) in [("phi", self.phi), ("j_x", self.j_x), ("j_y", self.j_y), ("j_z", self.j_z)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
        }
        if !(self.band_margin >= 0.0) || !(self.support_eps >= 0.0) {
            return Err(Error::InvalidParameter(
                "band_margin and support_eps must be nonnegative".into(),
            ));
        }
        if let Some(m) = self.m {
            let derived = operators::phi_from_dirac(self.epsilon, m);
            // compare on the circle so that ±π agree
            let d = (self.phi - derived).sin().abs().max(1.0 - (self.phi - derived).cos());
            if d > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "phi = {} inconsistent with (epsilon, m) which give {}",
                    self.phi, derived
                )));
            }
        }
        Ok(())
    }

    /// Largest lattice coordinate, `(lx−1)/2`.
    pub fn half(&self) -> i64 {
        half(self.lx)
    }
}

pub fn half(lx: usize) -> i64 {
    ((lx - 1) / 2) as i64
}

/// Site number of position `x`.
pub fn site_of(lx: usize, x: i64) -> Result<usize> {
    let h = half(lx);
    if x < -h || x > h {
        return Err(Error::OutOfRange { x, lx });
    }
    Ok((x + h) as usize)
}

pub fn position_of(lx: usize, site: usize) -> i64 {
    site as i64 - half(lx)
}

/// Site reached from `site` by moving `d` sites with periodic wraparound.
#[inline]
pub fn wrap(lx: usize, site: usize, d: i64) -> usize {
    (site as i64 + d).rem_euclid(lx as i64) as usize
}

#[inline]
pub fn internal_1w(sigma: Chirality, s0: Spin) -> usize {
    2 * s0 as usize + sigma as usize
}

#[inline]
pub fn internal_2w(sigma1: Chirality, sigma2: Chirality, s0: Spin) -> usize {
    4 * s0 as usize + 2 * sigma2 as usize + sigma1 as usize
}

pub fn index_1w(lx: usize, x: i64, sigma: Chirality, s0: Spin) -> Result<usize> {
    Ok(4 * site_of(lx, x)? + internal_1w(sigma, s0))
}

/// Inverse of [`index_1w`].
pub fn decompose_1w(lx: usize, i: usize) -> (i64, Chirality, Spin) {
    let c = i % 4;
    (position_of(lx, i / 4), Chirality::from_index(c & 1), Spin::from_index(c >> 1))
}

pub fn index_2w(
    lx: usize,
    x1: i64,
    sigma1: Chirality,
    x2: i64,
    sigma2: Chirality,
    s0: Spin,
) -> Result<usize> {
    let s1 = site_of(lx, x1)?;
    let s2 = site_of(lx, x2)?;
    Ok(8 * (s1 * lx + s2) + internal_2w(sigma1, sigma2, s0))
}

/// Inverse of [`index_2w`]: `(x₁, σ₁, x₂, σ₂, S₀)`.
pub fn decompose_2w(lx: usize, i: usize) -> (i64, Chirality, i64, Chirality, Spin) {
    let c = i % 8;
    let cell = i / 8;
    (
        position_of(lx, cell / lx),
        Chirality::from_index(c & 1),
        position_of(lx, cell % lx),
        Chirality::from_index((c >> 1) & 1),
        Spin::from_index(c >> 2),
    )
}

/// Euclidean norm of an amplitude array.
pub fn norm(amps: &[c64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// One-walker wavefunction Ψ(x, σ; S₀).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector1W {
    pub lx: usize,
    pub amplitudes: Vec<c64>,
}

impl StateVector1W {
    pub fn zeros(lx: usize) -> Self {
        StateVector1W { lx, amplitudes: vec![c64::new(0.0, 0.0); 4 * lx] }
    }

    pub fn from_amplitudes(lx: usize, amplitudes: Vec<c64>) -> Result<Self> {
        if amplitudes.len() != 4 * lx {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes, got {}",
                4 * lx,
                amplitudes.len()
            )));
        }
        Ok(StateVector1W { lx, amplitudes })
    }

    /// Unit amplitude on a single basis state.
    pub fn basis(lx: usize, x: i64, sigma: Chirality, s0: Spin) -> Result<Self> {
        let mut s = Self::zeros(lx);
        s.amplitudes[index_1w(lx, x, sigma, s0)?] = c64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn get(&self, x: i64, sigma: Chirality, s0: Spin) -> c64 {
        index_1w(self.lx, x, sigma, s0)
            .map(|i| self.amplitudes[i])
            .unwrap_or_default()
    }

    /// The four internal amplitudes at position `x`.
    pub fn internal(&self, x: i64) -> Result<[c64; 4]> {
        let s = site_of(self.lx, x)?;
        let a = &self.amplitudes[4 * s..4 * s + 4];
        Ok([a[0], a[1], a[2], a[3]])
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// P(x) summed over chirality and impurity spin, indexed by site.
    pub fn site_probabilities(&self) -> Vec<f64> {
        self.amplitudes
            .chunks_exact(4)
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }
}

/// Two-walker wavefunction Ψ(x₁, σ₁; x₂, σ₂; S₀).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector2W {
    pub lx: usize,
    pub amplitudes: Vec<c64>,
}

impl StateVector2W {
    pub fn zeros(lx: usize) -> Self {
        StateVector2W { lx, amplitudes: vec![c64::new(0.0, 0.0); 8 * lx * lx] }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn get(&self, x1: i64, sigma1: Chirality, x2: i64, sigma2: Chirality, s0: Spin) -> c64 {
        index_2w(self.lx, x1, sigma1, x2, sigma2, s0)
            .map(|i| self.amplitudes[i])
            .unwrap_or_default()
    }

    pub fn add(
        &mut self,
        x1: i64,
        sigma1: Chirality,
        x2: i64,
        sigma2: Chirality,
        s0: Spin,
        a: c64,
    ) -> Result<()> {
        let i = index_2w(self.lx, x1, sigma1, x2, sigma2, s0)?;
        self.amplitudes[i] += a;
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// Product state ψ₁(x₁,σ₁) ψ₂(x₂,σ₂) |S₀⟩ from per-walker amplitude
    /// arrays of length `2·lx` indexed `2·site + σ`.
    pub fn product(lx: usize, psi1: &[c64], psi2: &[c64], s0: Spin) -> Self {
        assert_eq!(psi1.len(), 2 * lx);
        assert_eq!(psi2.len(), 2 * lx);
        let mut out = Self::zeros(lx);
        for s1 in 0..lx {
            for s2 in 0..lx {
                for a in 0..2 {
                    for b in 0..2 {
                        let v = psi1[2 * s1 + a] * psi2[2 * s2 + b];
                        out.amplitudes[8 * (s1 * lx + s2) + 4 * s0 as usize + 2 * b + a] = v;
                    }
                }
            }
        }
        out
    }
}

/// Swap the walker labels, (x₁,σ₁) ↔ (x₂,σ₂), leaving S₀ in place.
pub fn exchange_2w(state: &StateVector2W) -> StateVector2W {
    let lx = state.lx;
    let mut out = StateVector2W::zeros(lx);
    for s1 in 0..lx {
        for s2 in 0..lx {
            let src = 8 * (s1 * lx + s2);
            let dst = 8 * (s2 * lx + s1);
            for c in 0..8 {
                let sigma1 = c & 1;
                let sigma2 = (c >> 1) & 1;
                let s0 = c >> 2;
                out.amplitudes[dst + 4 * s0 + 2 * sigma1 + sigma2] = state.amplitudes[src + c];
            }
        }
    }
    out
}
