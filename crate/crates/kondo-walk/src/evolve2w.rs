//! Matrix-free two-walker evolution and observables.
//!
//! A step is seven passes over the amplitude array, right to left:
//! √C₀, half coins on both walkers, both shifts, half coins, √C₀.
//! The impurity factor acts only on the axes x₁ = 0 or x₂ = 0.

use crate::c64;
use crate::error::{Error, Result};
use crate::hilbert::{
    self, Chirality, ModelParams, ParticleStatistics, Spin, StateVector1W, StateVector2W,
};
use crate::linalg::ZERO;
use crate::operators::{self, Family};

/// Cached local blocks for one set of parameters.
#[derive(Clone, Debug)]
pub struct Evolver2W {
    pub params: ModelParams,
    pub family: Family,
    pub coin: [[c64; 2]; 2],
    pub coin_sqrt: [[c64; 2]; 2],
    pub s_imp_1w: [[c64; 4]; 4],
    pub s_imp_1w_sqrt: [[c64; 4]; 4],
    pub s_imp_2w: [[c64; 8]; 8],
    pub s_imp_2w_sqrt: [[c64; 8]; 8],
}

fn apply_block<const N: usize>(m: &[[c64; N]; N], v: &mut [c64], idx: &[usize; N]) {
    let x: [c64; N] = std::array::from_fn(|k| v[idx[k]]);
    for (i, row) in m.iter().enumerate() {
        v[idx[i]] = row.iter().zip(&x).map(|(a, b)| a * b).sum();
    }
}

impl Evolver2W {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let family = Family::of(params)?;
        let (e, jx, jy, jz) = (params.epsilon, params.j_x, params.j_y, params.j_z);
        Ok(Evolver2W {
            params: params.clone(),
            family,
            coin: operators::coin(params.phi).to_array(),
            coin_sqrt: operators::coin_sqrt(params.phi).to_array(),
            s_imp_1w: operators::s_imp_1w(e, jx, jy, jz)?.to_array(),
            s_imp_1w_sqrt: operators::s_imp_1w_sqrt(e, jx, jy, jz)?.to_array(),
            s_imp_2w: operators::s_imp_2w(e, jx, jy, jz)?.to_array(),
            s_imp_2w_sqrt: operators::s_imp_2w_sqrt(e, jx, family)?.to_array(),
        })
    }

    fn lx(&self) -> usize {
        self.params.lx
    }

    fn origin(&self) -> usize {
        (self.lx() - 1) / 2
    }

    /// √C₀ on the axes and at the origin.
    fn impurity(&self, v: &mut [c64]) {
        let (lx, o) = (self.lx(), self.origin());
        for other in (0..lx).filter(|&s| s != o) {
            // walker 1 at the origin couples (σ₁, S₀)
            let b = 8 * (o * lx + other);
            for s2 in 0..2 {
                let idx = [b + 2 * s2, b + 2 * s2 + 1, b + 4 + 2 * s2, b + 5 + 2 * s2];
                apply_block(&self.s_imp_1w_sqrt, v, &idx);
            }
            // walker 2 at the origin couples (σ₂, S₀)
            let b = 8 * (other * lx + o);
            for s1 in 0..2 {
                let idx = [b + s1, b + 2 + s1, b + 4 + s1, b + 6 + s1];
                apply_block(&self.s_imp_1w_sqrt, v, &idx);
            }
        }
        let b = 8 * (o * lx + o);
        apply_block(&self.s_imp_2w_sqrt, v, &std::array::from_fn(|k| b + k));
    }

    /// Half-angle coin on both walkers at every cell.
    fn coins(&self, v: &mut [c64]) {
        let c = &self.coin_sqrt;
        for cell in v.chunks_exact_mut(8) {
            for s0 in 0..2 {
                let b = 4 * s0;
                apply_block(c, cell, &[b, b + 1]);
                apply_block(c, cell, &[b + 2, b + 3]);
                apply_block(c, cell, &[b, b + 2]);
                apply_block(c, cell, &[b + 1, b + 3]);
            }
        }
    }

    fn shift(&self, v: &[c64], out: &mut [c64]) {
        let lx = self.lx();
        for s1 in 0..lx {
            let t1 = [hilbert::wrap(lx, s1, -1), hilbert::wrap(lx, s1, 1)];
            for s2 in 0..lx {
                let t2 = [hilbert::wrap(lx, s2, -1), hilbert::wrap(lx, s2, 1)];
                let src = 8 * (s1 * lx + s2);
                for c in 0..8 {
                    let (sigma1, sigma2) = (c & 1, (c >> 1) & 1);
                    out[8 * (t1[sigma1] * lx + t2[sigma2]) + c] = v[src + c];
                }
            }
        }
    }

    /// One time step.
    pub fn step(&self, state: &mut StateVector2W) {
        assert_eq!(state.lx, self.lx());
        let mut out = vec![ZERO; state.amplitudes.len()];
        self.step_with(&mut state.amplitudes, &mut out);
    }

    fn step_with(&self, v: &mut Vec<c64>, scratch: &mut Vec<c64>) {
        self.impurity(v);
        self.coins(v);
        self.shift(v, scratch);
        std::mem::swap(v, scratch);
        self.coins(v);
        self.impurity(v);
    }

    /// Evolve `steps` steps, calling `visit(t, state)` for t = 0..=steps.
    pub fn run<F: FnMut(usize, &StateVector2W)>(&self, mut state: StateVector2W, steps: usize, mut visit: F) -> StateVector2W {
        assert_eq!(state.lx, self.lx());
        let mut scratch = vec![ZERO; state.amplitudes.len()];
        visit(0, &state);
        for t in 1..=steps {
            self.step_with(&mut state.amplitudes, &mut scratch);
            visit(t, &state);
        }
        state
    }

    pub fn evolve(&self, state: StateVector2W, steps: usize) -> StateVector2W {
        self.run(state, steps, |_, _| {})
    }
}

fn check_x0(lx: usize, x0: i64) -> Result<()> {
    hilbert::site_of(lx, x0)?;
    if x0 == 0 {
        return Err(Error::OutOfRange { x: x0, lx });
    }
    Ok(())
}

/// Delta-function walkers at the origin and at `x0`, impurity spin paired
/// with the chiralities so each sector is a spin-flip superposition.
pub fn initial_delta_delta(params: &ModelParams, stats: ParticleStatistics, x0: i64) -> Result<StateVector2W> {
    use Chirality::{L, R};
    let lx = params.lx;
    check_x0(lx, x0)?;
    let one = c64::new(1.0, 0.0);
    let mut a = StateVector2W::zeros(lx);
    a.add(0, L, x0, L, Spin::Down, one)?;
    a.add(0, R, x0, L, Spin::Up, -one)?;
    let mut b = StateVector2W::zeros(lx);
    b.add(x0, L, 0, L, Spin::Down, one)?;
    b.add(x0, L, 0, R, Spin::Up, -one)?;
    Ok(combine(a, b, stats))
}

fn combine(a: StateVector2W, b: StateVector2W, stats: ParticleStatistics) -> StateVector2W {
    let mut out = a;
    match stats {
        ParticleStatistics::Fermion => {
            for (x, y) in out.amplitudes.iter_mut().zip(&b.amplitudes) {
                *x -= y;
            }
        }
        ParticleStatistics::Boson => {
            for (x, y) in out.amplitudes.iter_mut().zip(&b.amplitudes) {
                *x += y;
            }
        }
        ParticleStatistics::Distinguishable => {}
    }
    out.normalize();
    out
}

/// One walker in `bound`, the other a left-moving delta at `x0`.
/// Distinguishable particles keep walker 1 bound and walker 2 mobile.
pub fn initial_bound_delta(
    params: &ModelParams,
    stats: ParticleStatistics,
    x0: i64,
    bound: &StateVector1W,
) -> Result<StateVector2W> {
    let lx = params.lx;
    check_x0(lx, x0)?;
    if bound.lx != lx {
        return Err(Error::InvalidParameter(format!("bound state has lx = {}, expected {lx}", bound.lx)));
    }
    if !bound.is_normalized() {
        return Err(Error::InvalidParameter(format!("bound state norm {} is not 1", bound.norm())));
    }
    let d = hilbert::site_of(lx, x0)?;
    let mut a = StateVector2W::zeros(lx);
    let mut b = StateVector2W::zeros(lx);
    for site in 0..lx {
        for c in 0..4 {
            // bound amplitudes are indexed 4·site + 2·S₀ + σ
            let (s0, sigma) = (c >> 1, c & 1);
            let amp = bound.amplitudes[4 * site + c];
            a.amplitudes[8 * (site * lx + d) + 4 * s0 + sigma] = amp;
            b.amplitudes[8 * (d * lx + site) + 4 * s0 + 2 * sigma] = amp;
        }
    }
    Ok(combine(a, b, stats))
}

/// Singlet and triplet weights of the walker-1 chirality and impurity spin
/// at the origin, summed over the other walker.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpinWeights {
    pub singlet: f64,
    /// Triplets in the order L↑, symmetric, R↓.
    pub triplet: [f64; 3],
}

#[derive(Clone, Debug)]
pub struct Observables2W {
    pub lx: usize,
    /// P(x₁, x₂) row-major by site, `p_joint[s1 * lx + s2]`.
    pub p_joint: Vec<f64>,
    pub p_marg1: Vec<f64>,
    pub p_marg2: Vec<f64>,
    /// Σ over S₀ of (±1)|Ψ|².
    pub sz: f64,
    pub spin: SpinWeights,
}

impl Observables2W {
    pub fn joint(&self, x1: i64, x2: i64) -> f64 {
        let s1 = hilbert::site_of(self.lx, x1).expect("x1 on lattice");
        let s2 = hilbert::site_of(self.lx, x2).expect("x2 on lattice");
        self.p_joint[s1 * self.lx + s2]
    }
}

pub fn observables(state: &StateVector2W) -> Observables2W {
    let lx = state.lx;
    let o = (lx - 1) / 2;
    let mut p_joint = vec![0.0; lx * lx];
    let mut sz = 0.0;
    for (k, cell) in state.amplitudes.chunks_exact(8).enumerate() {
        let up: f64 = cell[..4].iter().map(|a| a.norm_sqr()).sum();
        let down: f64 = cell[4..].iter().map(|a| a.norm_sqr()).sum();
        p_joint[k] = up + down;
        sz += up - down;
    }
    let mut p_marg1 = vec![0.0; lx];
    let mut p_marg2 = vec![0.0; lx];
    for s1 in 0..lx {
        for s2 in 0..lx {
            p_marg1[s1] += p_joint[s1 * lx + s2];
            p_marg2[s2] += p_joint[s1 * lx + s2];
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut spin = SpinWeights::default();
    for s2 in 0..lx {
        let cell = &state.amplitudes[8 * (o * lx + s2)..8 * (o * lx + s2) + 8];
        for sigma2 in 0..2 {
            let at = |s0: usize, sigma1: usize| cell[4 * s0 + 2 * sigma2 + sigma1];
            let (lu, ru, ld, rd) = (at(0, 0), at(0, 1), at(1, 0), at(1, 1));
            spin.singlet += (h * (ld - ru)).norm_sqr();
            spin.triplet[0] += lu.norm_sqr();
            spin.triplet[1] += (h * (ld + ru)).norm_sqr();
            spin.triplet[2] += rd.norm_sqr();
        }
    }
    Observables2W { lx, p_joint, p_marg1, p_marg2, sz, spin }
}

/// Side of the origin counted as transmitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OriginSide {
    Negative,
    Positive,
}

/// Walker-2 probability strictly beyond the origin on `side`.
pub fn transmission(state: &StateVector2W, side: OriginSide) -> f64 {
    let obs = observables(state);
    obs.p_marg2
        .iter()
        .enumerate()
        .filter(|(s, _)| {
            let x = hilbert::position_of(state.lx, *s);
            match side {
                OriginSide::Negative => x < 0,
                OriginSide::Positive => x > 0,
            }
        })
        .map(|(_, p)| p)
        .sum()
}
