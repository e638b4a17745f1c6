//! One-walker step operators and their spectra.
//!
//! The step operator is assembled column by column from a matrix-free
//! application of its factors, then diagonalized densely.

use std::f64::consts::TAU;

use faer::Mat;

use crate::c64;
use crate::error::{Error, Result};
use crate::hilbert::{self, ModelParams, StateVector1W};
use crate::linalg::{self, ZERO};
use crate::operators;

/// Ordering of the factors in one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    /// √C₀ √C S √C √C₀.
    Symmetric,
    /// S √C C₀ √C.
    Shifted,
}

/// Local blocks of the one-walker step.
#[derive(Clone, Debug)]
pub struct Blocks1W {
    pub lx: usize,
    pub coin_sqrt: [[c64; 2]; 2],
    pub s_imp: [[c64; 4]; 4],
    pub s_imp_sqrt: [[c64; 4]; 4],
}

impl Blocks1W {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let (e, jx, jy, jz) = (params.epsilon, params.j_x, params.j_y, params.j_z);
        Ok(Blocks1W {
            lx: params.lx,
            coin_sqrt: operators::coin_sqrt(params.phi).to_array(),
            s_imp: operators::s_imp_1w(e, jx, jy, jz)?.to_array(),
            s_imp_sqrt: operators::s_imp_1w_sqrt(e, jx, jy, jz)?.to_array(),
        })
    }

    fn origin(&self) -> usize {
        4 * ((self.lx - 1) / 2)
    }

    /// Apply a 2×2 chirality block at every site and spin.
    fn coin_all(&self, v: &mut [c64], c: &[[c64; 2]; 2]) {
        for pair in v.chunks_exact_mut(2) {
            let (l, r) = (pair[0], pair[1]);
            pair[0] = c[0][0] * l + c[0][1] * r;
            pair[1] = c[1][0] * l + c[1][1] * r;
        }
    }

    fn at_origin(&self, v: &mut [c64], m: &[[c64; 4]; 4]) {
        let o = self.origin();
        let x = [v[o], v[o + 1], v[o + 2], v[o + 3]];
        for (i, row) in m.iter().enumerate() {
            v[o + i] = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
        }
    }

    fn shift(&self, v: &mut Vec<c64>) {
        let lx = self.lx;
        let mut out = vec![ZERO; v.len()];
        for site in 0..lx {
            let left = hilbert::wrap(lx, site, -1);
            let right = hilbert::wrap(lx, site, 1);
            for s0 in 0..2 {
                out[4 * left + 2 * s0] = v[4 * site + 2 * s0];
                out[4 * right + 2 * s0 + 1] = v[4 * site + 2 * s0 + 1];
            }
        }
        *v = out;
    }

    /// One step in the chosen frame, factors applied right to left.
    pub fn step(&self, frame: Frame, v: &mut Vec<c64>) {
        assert_eq!(v.len(), 4 * self.lx);
        match frame {
            Frame::Symmetric => {
                self.at_origin(v, &self.s_imp_sqrt);
                self.coin_all(v, &self.coin_sqrt);
                self.shift(v);
                self.coin_all(v, &self.coin_sqrt);
                self.at_origin(v, &self.s_imp_sqrt);
            }
            Frame::Shifted => {
                self.coin_all(v, &self.coin_sqrt);
                self.at_origin(v, &self.s_imp);
                self.coin_all(v, &self.coin_sqrt);
                self.shift(v);
            }
        }
    }

    /// √C₀ √C, which carries Shifted-frame eigenvectors to Symmetric ones.
    pub fn frame_map(&self, v: &mut [c64]) {
        self.coin_all(v, &self.coin_sqrt);
        self.at_origin(v, &self.s_imp_sqrt);
    }
}

/// Evolve a one-walker state by `steps` steps.
pub fn evolve(params: &ModelParams, frame: Frame, state: &StateVector1W, steps: usize) -> Result<StateVector1W> {
    let blocks = Blocks1W::new(params)?;
    let mut v = state.amplitudes.clone();
    for _ in 0..steps {
        blocks.step(frame, &mut v);
    }
    StateVector1W::from_amplitudes(state.lx, v)
}

/// Map a Shifted-frame eigenvector to the corresponding Symmetric-frame one.
pub fn to_symmetric_frame(params: &ModelParams, state: &StateVector1W) -> Result<StateVector1W> {
    let blocks = Blocks1W::new(params)?;
    let mut v = state.amplitudes.clone();
    blocks.frame_map(&mut v);
    StateVector1W::from_amplitudes(state.lx, v)
}

/// Dense one-walker step operator.
#[derive(Clone, Debug)]
pub struct Unitary1W {
    pub frame: Frame,
    pub lx: usize,
    pub matrix: Mat<c64>,
}

impl Unitary1W {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        linalg::apply(&self.matrix, v)
    }
}

pub fn build_u1w(params: &ModelParams, frame: Frame) -> Result<Unitary1W> {
    let blocks = Blocks1W::new(params)?;
    let n = 4 * params.lx;
    let mut m = Mat::<c64>::zeros(n, n);
    let mut col = vec![ZERO; n];
    for k in 0..n {
        col.iter_mut().for_each(|c| *c = ZERO);
        col[k] = c64::new(1.0, 0.0);
        blocks.step(frame, &mut col);
        for (i, v) in col.iter().enumerate() {
            m[(i, k)] = *v;
        }
    }
    Ok(Unitary1W { frame, lx: params.lx, matrix: m })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateClass {
    Bulk,
    Bound,
}

/// Eigen-decomposition of a one-walker step operator.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub lx: usize,
    /// Eigenvalues sorted by phase in [0, 2π).
    pub eigenvalues: Vec<c64>,
    /// Phases λ in [0, 2π).
    pub lambdas: Vec<f64>,
    /// Normalized eigenvectors, largest component real positive.
    pub eigenvectors: Vec<StateVector1W>,
    pub class: Vec<StateClass>,
    /// Fitted localization length of each Bound state (None for Bulk or a rejected fit).
    pub loc_length: Vec<Option<f64>>,
    /// Largest ‖Uv − e^{iλ}v‖ over all pairs.
    pub max_residual: f64,
}

impl SpectrumResult {
    pub fn bound_indices(&self) -> Vec<usize> {
        (0..self.class.len()).filter(|&i| self.class[i] == StateClass::Bound).collect()
    }

    pub fn bound_count(&self) -> usize {
        self.class.iter().filter(|&&c| c == StateClass::Bound).count()
    }
}

/// Phase of a unit-circle value in [0, 2π).
pub fn phase(z: c64) -> f64 {
    let a = z.arg();
    if a < 0.0 { a + TAU } else { a }
}

/// Bound iff cos²λ exceeds cos²φ by more than the band margin.
pub fn classify(z: c64, params: &ModelParams) -> StateClass {
    let cos_l = z.re / z.norm();
    let cos_p = params.phi.cos();
    if cos_l * cos_l > cos_p * cos_p + params.band_margin {
        StateClass::Bound
    } else {
        StateClass::Bulk
    }
}

/// Rotate so the largest-magnitude component is real positive.
pub fn fix_gauge(v: &mut [c64]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, a) in v.iter().enumerate() {
        // strict tolerance keeps ties on the first index, independent of rounding
        if a.norm() > best_abs * (1.0 + 1e-12) {
            best = i;
            best_abs = a.norm();
        }
    }
    if best_abs > 0.0 {
        let ph = v[best].conj() / best_abs;
        v.iter_mut().for_each(|a| *a *= ph);
    }
}

/// Residual tolerance on every eigenpair.
pub const EIG_RESIDUAL_TOL: f64 = 1e-9;

pub fn spectrum(u: &Unitary1W, params: &ModelParams) -> Result<SpectrumResult> {
    let n = u.dim();
    if !linalg::max_norm(&u.matrix).is_finite() {
        return Err(Error::Eigensolver("step operator has non-finite entries".into()));
    }
    let (vals, vecs) = linalg::eig(&u.matrix)?;
    let mut pairs: Vec<(f64, c64, Vec<c64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<c64> = (0..n).map(|i| vecs[(i, k)]).collect();
            let nv = hilbert::norm(&v);
            v.iter_mut().for_each(|a| *a /= nv);
            fix_gauge(&mut v);
            (phase(vals[k]), vals[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut max_residual = 0.0f64;
    let mut out = SpectrumResult {
        lx: u.lx,
        eigenvalues: Vec::with_capacity(n),
        lambdas: Vec::with_capacity(n),
        eigenvectors: Vec::with_capacity(n),
        class: Vec::with_capacity(n),
        loc_length: Vec::with_capacity(n),
        max_residual: 0.0,
    };
    for (lambda, z, v) in pairs {
        let uv = u.apply(&v);
        let r = hilbert::norm(&uv.iter().zip(&v).map(|(a, b)| a - z * b).collect::<Vec<_>>());
        max_residual = max_residual.max(r);
        let class = classify(z, params);
        let state = StateVector1W { lx: u.lx, amplitudes: v };
        let loc = match class {
            StateClass::Bound => localization_fit(&state, params).ok(),
            StateClass::Bulk => None,
        };
        out.eigenvalues.push(z);
        out.lambdas.push(lambda);
        out.eigenvectors.push(state);
        out.class.push(class);
        out.loc_length.push(loc);
    }
    out.max_residual = max_residual;
    if max_residual > EIG_RESIDUAL_TOL {
        return Err(Error::Eigensolver(format!(
            "eigenpair residual {max_residual:.3e} exceeds {EIG_RESIDUAL_TOL:e} (dimension {n}, unitarity deviation {:.3e})",
            linalg::unitarity_deviation(&u.matrix)
        )));
    }
    Ok(out)
}

/// Number of Bound eigenvalues of the Symmetric-frame step operator.
pub fn isolated_count(params: &ModelParams) -> Result<usize> {
    let u = build_u1w(params, Frame::Symmetric)?;
    Ok(spectrum(&u, params)?.bound_count())
}

/// Probabilities below this fraction of the peak are treated as round-off.
pub const FIT_FLOOR: f64 = 1e-24;

/// Localization length from a straight-line fit of ln P(x) against |x| on
/// both tails, 2 ≤ |x| ≤ lx/4; the length is 2/|slope|.
pub fn localization_fit(state: &StateVector1W, params: &ModelParams) -> Result<f64> {
    let p = state.site_probabilities();
    let peak = p.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::FitQuality("zero vector".into()));
    }
    let hi = (params.lx / 4) as i64;
    let mut pts = Vec::new();
    for (site, &q) in p.iter().enumerate() {
        let x = hilbert::position_of(state.lx, site).abs();
        if (2..=hi).contains(&x) && q > FIT_FLOOR * peak {
            pts.push((x as f64, q.ln()));
        }
    }
    if pts.len() < 3 {
        return Err(Error::FitQuality(format!("only {} usable tail points", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FitQuality("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 0.0 } else { sxy * sxy / (sxx * syy) };
    if !(slope < 0.0) {
        return Err(Error::FitQuality(format!("tail does not decay (slope {slope:.3e})")));
    }
    if r2 < 0.99 {
        return Err(Error::FitQuality(format!("R^2 = {r2:.4} below 0.99")));
    }
    Ok(2.0 / slope.abs())
}

/// ⟨(s₁+s₀)²⟩ per unit norm, with s₁ acting on chirality and s₀ on the impurity.
pub fn j10_squared(state: &StateVector1W) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for c in state.amplitudes.chunks_exact(4) {
        // basis (L↑, R↑, L↓, R↓): aligned pairs give 2, the R↑/L↓ block is [[1,1],[1,1]]
        num += 2.0 * (c[0].norm_sqr() + c[3].norm_sqr())
            + c[1].norm_sqr()
            + c[2].norm_sqr()
            + 2.0 * (c[1].conj() * c[2]).re;
        den += c.iter().map(|a| a.norm_sqr()).sum::<f64>();
    }
    if den > 0.0 { num / den } else { 0.0 }
}

/// Overlaps ⟨singlet|ψ⟩ and ⟨triplet_m|ψ⟩ (m = L↑, symmetric, R↓) at the origin.
pub fn spin_overlaps(state: &StateVector1W) -> (c64, [c64; 3]) {
    let c = state.internal(0).expect("origin is always on the lattice");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = h * (c[2] - c[1]);
    (singlet, [c[0], h * (c[2] + c[1]), c[3]])
}

/// Inverse participation width 1/Σ P(x)², a scale-free sharpness measure.
pub fn participation_width(state: &StateVector1W) -> f64 {
    let p = state.site_probabilities();
    let tot: f64 = p.iter().sum();
    tot * tot / p.iter().map(|q| q * q).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Chirality, Spin};
    use crate::linalg::max_abs_diff;
    use std::f64::consts::PI;

    #[test]
    fn free_symmetric_frame_is_coin_shift_coin() {
        let p = ModelParams { lx: 5, ..Default::default() };
        let u = build_u1w(&p, Frame::Symmetric).unwrap();
        // √C S √C assembled independently
        let n = 20;
        let h = operators::coin_sqrt(p.phi).to_array::<2>();
        let mut c = Mat::<c64>::zeros(n, n);
        let mut s = Mat::<c64>::zeros(n, n);
        for site in 0..5 {
            for s0 in 0..2 {
                let b = 4 * site + 2 * s0;
                for i in 0..2 {
                    for j in 0..2 {
                        c[(b + i, b + j)] = h[i][j];
                    }
                }
                s[(4 * hilbert::wrap(5, site, -1) + 2 * s0, b)] = c64::new(1.0, 0.0);
                s[(4 * hilbert::wrap(5, site, 1) + 2 * s0 + 1, b + 1)] = c64::new(1.0, 0.0);
            }
        }
        let want = &c * &s * &c;
        assert!(max_abs_diff(&u.matrix, &want) < 1e-15);
    }

    #[test]
    fn step_operators_are_unitary() {
        for frame in [Frame::Symmetric, Frame::Shifted] {
            let u = build_u1w(&ModelParams::su2(PI / 10.0, 2.0, 11), frame).unwrap();
            assert!(linalg::unitarity_deviation(&u.matrix) < 1e-13);
        }
    }

    #[test]
    fn shift_moves_chiralities_apart() {
        let p = ModelParams { phi: 0.0, lx: 5, ..Default::default() };
        let s = StateVector1W::basis(5, 0, Chirality::L, Spin::Down).unwrap();
        let t = evolve(&p, Frame::Shifted, &s, 1).unwrap();
        assert_eq!(t.get(-1, Chirality::L, Spin::Down), c64::new(1.0, 0.0));
        let s = StateVector1W::basis(5, 2, Chirality::R, Spin::Up).unwrap();
        let t = evolve(&p, Frame::Shifted, &s, 1).unwrap();
        assert_eq!(t.get(-2, Chirality::R, Spin::Up), c64::new(1.0, 0.0));
    }

    #[test]
    fn j10_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = StateVector1W::zeros(5);
        s.amplitudes[8 + 2] = c64::new(h, 0.0);
        s.amplitudes[8 + 1] = c64::new(-h, 0.0);
        assert!(j10_squared(&s).abs() < 1e-15);
        let (singlet, triplet) = spin_overlaps(&s);
        assert!((singlet.norm() - 1.0).abs() < 1e-15 && triplet.iter().all(|t| t.norm() < 1e-15));
        let s = StateVector1W::basis(5, 0, Chirality::L, Spin::Up).unwrap();
        assert!((j10_squared(&s) - 2.0).abs() < 1e-15);
        let s = StateVector1W::basis(5, 0, Chirality::R, Spin::Down).unwrap();
        assert!((j10_squared(&s) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn fit_recovers_constructed_decay() {
        let lx = 101;
        let p = ModelParams { lx, ..Default::default() };
        let mut s = StateVector1W::zeros(lx);
        for site in 0..lx {
            let x = hilbert::position_of(lx, site).abs();
            s.amplitudes[4 * site] = c64::new(2f64.powi(-(x as i32)), 0.0);
        }
        let len = localization_fit(&s, &p).unwrap();
        assert!((len - 1.0 / 2f64.ln()).abs() < 0.01 / 2f64.ln());
    }

    #[test]
    fn fit_rejects_flat_profile() {
        let lx = 41;
        let p = ModelParams { lx, ..Default::default() };
        let s = StateVector1W { lx, amplitudes: vec![c64::new(1.0, 0.0); 4 * lx] };
        assert!(matches!(localization_fit(&s, &p), Err(Error::FitQuality(_))));
    }

    #[test]
    fn classification_margin() {
        let p = ModelParams::default();
        let edge = c64::from_polar(1.0, p.phi);
        assert_eq!(classify(edge, &p), StateClass::Bulk);
        assert_eq!(classify(c64::from_polar(1.0, 0.5 * p.phi), &p), StateClass::Bound);
        assert_eq!(classify(c64::from_polar(1.0, PI - 0.5 * p.phi), &p), StateClass::Bound);
        assert_eq!(classify(c64::from_polar(1.0, PI / 2.0), &p), StateClass::Bulk);
    }

    #[test]
    fn small_lattice_spectrum() {
        let p = ModelParams::xx(PI / 10.0, 1.0, 41);
        let u = build_u1w(&p, Frame::Symmetric).unwrap();
        let s = spectrum(&u, &p).unwrap();
        assert_eq!(s.bound_count(), 4);
        assert!(s.eigenvalues.iter().all(|z| (z.norm() - 1.0).abs() < 1e-9));
        assert!(s.lambdas.windows(2).all(|w| w[0] <= w[1]));
        for &z in &s.eigenvalues {
            let d = s.eigenvalues.iter().map(|w| (w - z.conj()).norm()).fold(f64::MAX, f64::min);
            assert!(d < 1e-9);
        }
    }
}
