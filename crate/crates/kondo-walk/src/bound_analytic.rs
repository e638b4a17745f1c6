//! Transfer-matrix solution of the XX bound states (`J_x = J_y = J`, `J_z = 0`).
//!
//! Eigenfunction components are grouped as
//! `Ψ̂(x) = (ψ_L↑(−x), ψ_R↑(1−x), ψ_L↓(−x), ψ_R↓(1−x))`, which obey
//! `Ψ̂(x+1) = T Ψ̂(x)` away from the origin and `Ψ̂(1) = T⁽⁰⁾ Ψ̂(0)` across it.
//! The transfer coordinate is mirrored because L components move toward −x
//! on the lattice. All results refer to the Shifted-frame step operator
//! S √C C₀ √C.
//!
//! Dot products between transfer eigenvectors are bilinear (no conjugation).

use faer::Mat;

use crate::c64;
use crate::error::{Error, Result};
use crate::evolve1w::{Blocks1W, Frame};
use crate::hilbert::{self, ModelParams, StateVector1W};
use crate::linalg::{self, I, ZERO, bilinear, re};

/// Which side of the unit circle a bound eigenvalue sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// cos λ > cos φ: positive transfer eigenvalues.
    CosPositive,
    /// cos λ < −cos φ: negative transfer eigenvalues, alternating sign.
    CosNegative,
}

fn check_cos_phi(phi: f64) -> Result<f64> {
    let c = phi.cos();
    if c.abs() < 1e-14 {
        Err(Error::SingularParameter(format!("cos(phi) = 0 at phi = {phi}")))
    } else {
        Ok(c)
    }
}

/// Bulk transfer matrix T.
pub fn transfer_bulk(lambda: f64, phi: f64) -> Result<Mat<c64>> {
    let cp = check_cos_phi(phi)?;
    let em = c64::from_polar(1.0 / cp, -lambda);
    let ep = c64::from_polar(1.0 / cp, lambda);
    let s = re(-phi.sin() / cp);
    Ok(linalg::from_rows([
        [em, s, ZERO, ZERO],
        [s, ep, ZERO, ZERO],
        [ZERO, ZERO, em, s],
        [ZERO, ZERO, s, ep],
    ]))
}

/// Transfer matrix T⁽⁰⁾ across the impurity for XX coupling `j`.
pub fn transfer_origin(lambda: f64, phi: f64, j: f64) -> Result<Mat<c64>> {
    let den = 1.0 - 2.0 * j * j + (2.0 * phi).cos();
    if den.abs() < 1e-14 {
        return Err(Error::SingularParameter(format!(
            "1 - 2J^2 + cos(2 phi) vanishes at J = {j}, phi = {phi}"
        )));
    }
    let (s, c) = phi.sin_cos();
    let em = c64::from_polar(1.0, -lambda);
    let ep = c64::from_polar(1.0, lambda);
    let s2 = re(-(2.0 * phi).sin());
    let js = 2.0 * j * s;
    let rows = [
        [2.0 * em * (c - j * j), s2, I * em * js, I * 2.0 * j * (c - 1.0)],
        [s2, 2.0 * ep * (j * j + c), -I * 2.0 * j * (1.0 + c), I * ep * js],
        [-I * em * js, I * 2.0 * j * (1.0 + c), 2.0 * em * (j * j + c), s2],
        [-I * 2.0 * j * (c - 1.0), -I * ep * js, s2, 2.0 * ep * (c - j * j)],
    ];
    Ok(Mat::from_fn(4, 4, |a, b| rows[a][b] / den))
}

/// Eigen-data of T in the real-ζ regime.
#[derive(Clone, Debug)]
pub struct TransferEigensystem {
    pub zeta_plus: f64,
    pub zeta_minus: f64,
    pub v1p: [c64; 4],
    pub v1m: [c64; 4],
    pub v2p: [c64; 4],
    pub v2m: [c64; 4],
}

impl TransferEigensystem {
    /// Eigenvalue with |ζ| > 1 and its vectors: the solution growing toward the origin from x < 0.
    pub fn growing(&self) -> (f64, [c64; 4], [c64; 4]) {
        if self.zeta_plus.abs() > 1.0 {
            (self.zeta_plus, self.v1p, self.v2p)
        } else {
            (self.zeta_minus, self.v1m, self.v2m)
        }
    }

    /// Eigenvalue with |ζ| < 1 and its vectors.
    pub fn decaying(&self) -> (f64, [c64; 4], [c64; 4]) {
        if self.zeta_plus.abs() > 1.0 {
            (self.zeta_minus, self.v1m, self.v2m)
        } else {
            (self.zeta_plus, self.v1p, self.v2p)
        }
    }
}

fn unit(v: [c64; 4]) -> [c64; 4] {
    let n = hilbert::norm(&v);
    v.map(|a| a / n)
}

/// ζ± = (cos λ ± √(cos²λ − cos²φ))/cos φ and the matching unit eigenvectors.
pub fn transfer_eigensystem(lambda: f64, phi: f64) -> Result<TransferEigensystem> {
    let cp = check_cos_phi(phi)?;
    let cl = lambda.cos();
    let disc = cl * cl - cp * cp;
    if !(disc > 0.0) {
        return Err(Error::BulkRegime { lambda });
    }
    let s = disc.sqrt();
    let sp = re(phi.sin());
    let tail = |sign: f64| c64::new(-sign * s, -lambda.sin());
    Ok(TransferEigensystem {
        zeta_plus: (cl + s) / cp,
        zeta_minus: (cl - s) / cp,
        v1p: unit([sp, tail(1.0), ZERO, ZERO]),
        v1m: unit([sp, tail(-1.0), ZERO, ZERO]),
        v2p: unit([ZERO, ZERO, sp, tail(1.0)]),
        v2m: unit([ZERO, ZERO, sp, tail(-1.0)]),
    })
}

/// Closed-form normalized vectors (v₁⁺, v₁⁻, v₂⁺, v₂⁻) built from √(J ± i).
pub fn closed_form_vectors(j: f64) -> [[c64; 4]; 4] {
    let n = re(1.0 / (std::f64::consts::SQRT_2 * (j * j + 1.0).powf(0.25)));
    let p = (re(j) + I).sqrt() * n;
    let m = (re(j) - I).sqrt() * n;
    [
        [p, -m, ZERO, ZERO],
        [m, p, ZERO, ZERO],
        [ZERO, ZERO, p, -m],
        [ZERO, ZERO, m, p],
    ]
}

/// The four XX bound eigenvalues: two with cos λ > 0 (positive then negative
/// imaginary part) followed by their images on the far side of the circle.
pub fn bound_eigenvalues_xx(phi: f64, j: f64) -> Result<[c64; 4]> {
    let cp = phi.cos();
    if !(cp > 0.0) {
        return Err(Error::InvalidParameter(format!("closed form needs cos(phi) > 0, got {cp}")));
    }
    let r = ((1.0 + 2.0 * j * j + (2.0 * phi).cos()) / 2.0).sqrt();
    let im = phi.sin().abs();
    let n = (1.0 + j * j).sqrt();
    let z = c64::new(r / n, im / n);
    Ok([z, z.conj(), -z.conj(), -z])
}

/// Branch of a bound eigenvalue.
pub fn branch_of(z: c64) -> Branch {
    if z.re > 0.0 { Branch::CosPositive } else { Branch::CosNegative }
}

/// The 2×2 pairing matrix `[gᵢ · T⁽⁰⁾ gⱼ]` with g the growing transfer vectors.
pub fn origin_pairing(lambda: f64, phi: f64, j: f64) -> Result<[[c64; 2]; 2]> {
    let es = transfer_eigensystem(lambda, phi)?;
    let t0 = transfer_origin(lambda, phi, j)?;
    let (_, g1, g2) = es.growing();
    let tg1 = linalg::apply(&t0, &g1);
    let tg2 = linalg::apply(&t0, &g2);
    Ok([
        [bilinear(&g1, &tg1), bilinear(&g1, &tg2)],
        [bilinear(&g2, &tg1), bilinear(&g2, &tg2)],
    ])
}

/// Determinant of [`origin_pairing`]; vanishes exactly at bound eigenvalues.
pub fn determinant_condition(lambda: f64, phi: f64, j: f64) -> Result<c64> {
    let m = origin_pairing(lambda, phi, j)?;
    Ok(m[0][0] * m[1][1] - m[0][1] * m[1][0])
}

/// 1/ln ζ with ζ = (|cos λ| + √(cos²λ − cos²φ))/|cos φ|.
pub fn localization_length_analytic(lambda: f64, phi: f64) -> Result<f64> {
    let cp = check_cos_phi(phi)?.abs();
    let cl = lambda.cos();
    let disc = cl * cl - cp * cp;
    if !(disc > 0.0) {
        return Err(Error::BulkRegime { lambda });
    }
    Ok(1.0 / ((cl.abs() + disc.sqrt()) / cp).ln())
}

/// A bound eigenstate assembled from transfer matrices.
#[derive(Clone, Debug)]
pub struct BoundStateSolution {
    pub eigenvalue: c64,
    pub lambda: f64,
    pub branch: Branch,
    /// Ψ̂(0) = a₀ g₁ + b₀ g₂ with g the growing transfer vectors.
    pub a0: c64,
    pub b0: c64,
    /// Ψ̂(1) = c₀ d₁ + d₀ d₂ with d the decaying transfer vectors.
    pub c0: c64,
    pub d0: c64,
    /// Growth factor per site toward the origin (|ζ| > 1, sign included).
    pub zeta: f64,
    pub localization_length: f64,
    /// Normalized Shifted-frame eigenvector on the lattice.
    pub wavefunction: StateVector1W,
    /// ‖Ũψ − e^{iλ}ψ‖ on the finite periodic lattice.
    pub residual: f64,
}

/// Null vector of a singular 2×2 matrix, taken from its better-conditioned row.
fn null_vector(m: [[c64; 2]; 2]) -> (c64, c64) {
    let r0 = m[0][0].norm() + m[0][1].norm();
    let r1 = m[1][0].norm() + m[1][1].norm();
    if r0 >= r1 { (-m[0][1], m[0][0]) } else { (m[1][1], -m[1][0]) }
}

/// ‖Ũψ − zψ‖ for the Shifted-frame step operator.
pub fn shifted_residual(params: &ModelParams, state: &StateVector1W, z: c64) -> Result<f64> {
    let blocks = Blocks1W::new(params)?;
    let mut v = state.amplitudes.clone();
    blocks.step(Frame::Shifted, &mut v);
    let d: Vec<c64> = v.iter().zip(&state.amplitudes).map(|(a, b)| a - z * b).collect();
    Ok(hilbert::norm(&d))
}

/// Bound eigenstate number `which` (1..=4, in the order of
/// [`bound_eigenvalues_xx`]) on a lattice of `lx` sites.
///
/// The tails are exact only when the lattice spans many localization
/// lengths; on shorter lattices the state is the truncated infinite-lattice
/// solution.
pub fn assemble_bound_state(phi: f64, j: f64, which: usize, lx: usize) -> Result<BoundStateSolution> {
    if !(1..=4).contains(&which) {
        return Err(Error::InvalidParameter(format!("bound index must be 1..=4, got {which}")));
    }
    let params = ModelParams::xx(phi, j, lx);
    params.validate()?;
    let z = bound_eigenvalues_xx(phi, j)?[which - 1];
    let lambda = crate::evolve1w::phase(z);
    let es = transfer_eigensystem(lambda, phi)?;
    let (zg, g1, g2) = es.growing();
    let (zd, d1, d2) = es.decaying();

    let (mut a, mut b) = null_vector(origin_pairing(lambda, phi, j)?);
    let big = if a.norm() >= b.norm() { a } else { b };
    let ph = big.conj() / big.norm();
    a *= ph;
    b *= ph;

    let psi0: Vec<c64> = (0..4).map(|k| a * g1[k] + b * g2[k]).collect();
    let psi1 = linalg::apply(&transfer_origin(lambda, phi, j)?, &psi0);
    // d₁ lives in the spin-up block, d₂ in the spin-down block
    let c = if d1[0].norm() > d1[1].norm() { psi1[0] / d1[0] } else { psi1[1] / d1[1] };
    let d = if d2[2].norm() > d2[3].norm() { psi1[2] / d2[2] } else { psi1[3] / d2[3] };

    let hat = |x: i64| -> [c64; 4] {
        if x <= 0 {
            let f = zg.powi(x as i32);
            [psi0[0] * f, psi0[1] * f, psi0[2] * f, psi0[3] * f]
        } else {
            let f = zd.powi((x - 1) as i32);
            [c * d1[0] * f, c * d1[1] * f, d * d2[2] * f, d * d2[3] * f]
        }
    };

    let mut state = StateVector1W::zeros(lx);
    for site in 0..lx {
        let x = hilbert::position_of(lx, site);
        let left = hat(-x);
        let right = hat(1 - x);
        state.amplitudes[4 * site] = left[0];
        state.amplitudes[4 * site + 1] = right[1];
        state.amplitudes[4 * site + 2] = left[2];
        state.amplitudes[4 * site + 3] = right[3];
    }
    let n = state.norm();
    state.normalize();
    let residual = shifted_residual(&params, &state, z)?;
    Ok(BoundStateSolution {
        eigenvalue: z,
        lambda,
        branch: branch_of(z),
        a0: a / n,
        b0: b / n,
        c0: c / n,
        d0: d / n,
        zeta: zg,
        localization_length: localization_length_analytic(lambda, phi)?,
        wavefunction: state,
        residual,
    })
}
