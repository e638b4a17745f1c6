//! Local unitary building blocks.
//!
//! Every matrix is returned as a [`ScatteringMatrix`] in the basis order of
//! [`crate::hilbert`]: (L, R) for coins, (L↑, R↑, L↓, R↓) for one walker and
//! (LL↑, RL↑, LR↑, RR↑, LL↓, RL↓, LR↓, RR↓) for two walkers.

use faer::Mat;

use crate::c64;
use crate::error::{Error, Result};
use crate::hilbert::ModelParams;
use crate::linalg::{self, I, ONE, ZERO, from_rows, re};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Coin,
    CoinSqrt,
    SImp1w,
    SImp1wSqrt,
    SImp2w,
    SImp2wSqrt,
    SDirac,
}

/// A small unitary block with its provenance.
#[derive(Clone, Debug)]
pub struct ScatteringMatrix {
    pub label: Label,
    pub entries: Mat<c64>,
}

impl ScatteringMatrix {
    fn new(label: Label, entries: Mat<c64>) -> Self {
        debug_assert!(matches!(entries.nrows(), 2 | 4 | 8));
        ScatteringMatrix { label, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.entries[(i, j)]
    }

    pub fn unitarity_deviation(&self) -> f64 {
        linalg::unitarity_deviation(&self.entries)
    }

    pub fn squared(&self) -> Mat<c64> {
        &self.entries * &self.entries
    }

    /// Row-major copy for hot loops.
    pub fn to_array<const N: usize>(&self) -> [[c64; N]; N] {
        assert_eq!(self.dim(), N);
        let mut out = [[ZERO; N]; N];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.entries[(i, j)];
            }
        }
        out
    }
}

/// Coupling families for which a closed-form two-walker square root exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `J_x = J_y = J`, `J_z = 0`.
    XX,
    /// `J_x = J_y = J_z = J` at `ε = 1`.
    SU2,
}

impl Family {
    /// Recognise the family of a parameter set.
    pub fn of(params: &ModelParams) -> Result<Family> {
        let (jx, jy, jz) = (params.j_x, params.j_y, params.j_z);
        if jx == jy && jz == 0.0 {
            Ok(Family::XX)
        } else if jx == jy && jy == jz {
            if params.epsilon == 1.0 {
                Ok(Family::SU2)
            } else {
                Err(Error::Unsupported(format!(
                    "isotropic coupling needs epsilon = 1, got {}",
                    params.epsilon
                )))
            }
        } else {
            Err(Error::Unsupported(format!(
                "two-walker square root requires XX or isotropic coupling, got ({jx}, {jy}, {jz})"
            )))
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")))
    }
}

fn nonzero(d: c64, what: &str) -> Result<c64> {
    if d.norm() > 1e-300 && d.is_finite() {
        Ok(d)
    } else {
        Err(Error::SingularParameter(format!("{what} denominator vanishes")))
    }
}

/// C_φ = exp(−iσʸφ).
pub fn coin(phi: f64) -> ScatteringMatrix {
    let (s, c) = phi.sin_cos();
    ScatteringMatrix::new(Label::Coin, from_rows([[re(c), re(-s)], [re(s), re(c)]]))
}

/// Half-angle coin, the principal square root of [`coin`].
pub fn coin_sqrt(phi: f64) -> ScatteringMatrix {
    ScatteringMatrix { label: Label::CoinSqrt, ..coin(phi / 2.0) }
}

/// Coin angle of a delta potential of strength `m` seen by a Dirac particle
/// of velocity `epsilon`.
pub fn phi_from_dirac(epsilon: f64, m: f64) -> f64 {
    let q = m * m / 4.0;
    let den = epsilon * epsilon + q;
    let cos = (epsilon * epsilon - q) / den;
    let sin = -epsilon * m / den;
    sin.atan2(cos)
}

/// Transfer-derived S matrix of a delta potential.
pub fn s_dirac(epsilon: f64, m: f64) -> Result<ScatteringMatrix> {
    check_epsilon(epsilon)?;
    let q = m * m / 4.0;
    let den = epsilon * epsilon + q;
    let a = (epsilon * epsilon - q) / den;
    let b = epsilon * m / den;
    Ok(ScatteringMatrix::new(Label::SDirac, from_rows([[re(a), re(b)], [re(-b), re(a)]])))
}

/// Entries (α, β, γ, δ) of the one-walker impurity S matrix.
pub fn s_imp_1w_entries(epsilon: f64, jx: f64, jy: f64, jz: f64) -> Result<[c64; 4]> {
    check_epsilon(epsilon)?;
    let ie2 = c64::new(0.0, 2.0 * epsilon);
    let jm = jx - jy;
    let jp = jx + jy;
    let d1 = nonzero((ie2 + jz) * (ie2 + jz) - jm * jm, "S_imp 1w")?;
    let d2 = nonzero((ie2 - jz) * (ie2 - jz) - jp * jp, "S_imp 1w")?;
    let e2 = 4.0 * epsilon * epsilon;
    let alpha = -re(e2 - jm * jm + jz * jz) / d1;
    let beta = -c64::new(0.0, 4.0 * epsilon * jm) / d1;
    let gamma = -re(e2 - jp * jp + jz * jz) / d2;
    let delta = -c64::new(0.0, 4.0 * epsilon * jp) / d2;
    Ok([alpha, beta, gamma, delta])
}

fn one_walker_pattern(a: c64, b: c64, g: c64, d: c64) -> Mat<c64> {
    from_rows([
        [a, ZERO, ZERO, b],
        [ZERO, g, d, ZERO],
        [ZERO, d, g, ZERO],
        [b, ZERO, ZERO, a],
    ])
}

/// One-walker impurity scattering matrix.
pub fn s_imp_1w(epsilon: f64, jx: f64, jy: f64, jz: f64) -> Result<ScatteringMatrix> {
    let [a, b, g, d] = s_imp_1w_entries(epsilon, jx, jy, jz)?;
    Ok(ScatteringMatrix::new(Label::SImp1w, one_walker_pattern(a, b, g, d)))
}

/// True when `z` sits on the branch cut of the principal square root.
fn on_branch_cut(z: c64) -> bool {
    z.re < 0.0 && z.im.abs() <= 1e-14 * z.norm()
}

/// Whether any of α±β, γ±δ lies on the negative real axis, where the
/// principal square root is discontinuous.
pub fn sqrt_branch_ambiguous_1w(epsilon: f64, jx: f64, jy: f64, jz: f64) -> Result<bool> {
    let [a, b, g, d] = s_imp_1w_entries(epsilon, jx, jy, jz)?;
    Ok([a + b, a - b, g + d, g - d].into_iter().any(on_branch_cut))
}

/// Principal square root of [`s_imp_1w`], built from the 2×2 blocks'
/// eigenvalues α±β and γ±δ.
pub fn s_imp_1w_sqrt(epsilon: f64, jx: f64, jy: f64, jz: f64) -> Result<ScatteringMatrix> {
    let [a, b, g, d] = s_imp_1w_entries(epsilon, jx, jy, jz)?;
    if [a + b, a - b, g + d, g - d].into_iter().any(on_branch_cut) {
        log::warn!(
            "square root of S_imp at (eps={epsilon}, J=({jx}, {jy}, {jz})) sits on the \
             principal branch cut; branch choice is ambiguous"
        );
    }
    let (ap, am) = ((a + b).sqrt(), (a - b).sqrt());
    let (gp, gm) = ((g + d).sqrt(), (g - d).sqrt());
    let h = re(0.5);
    Ok(ScatteringMatrix::new(
        Label::SImp1wSqrt,
        one_walker_pattern(h * (ap + am), h * (ap - am), h * (gp + gm), h * (gp - gm)),
    ))
}

/// Entries (α₊, α₋, β, γ, δ, ε₊, ε₋) of the two-walker impurity S matrix.
pub fn s_imp_2w_entries(epsilon: f64, jx: f64, jy: f64, jz: f64) -> Result<[c64; 7]> {
    check_epsilon(epsilon)?;
    let e = epsilon;
    let i_xyz = c64::new(0.0, 2.0 * jx * jy * jz);
    let d = nonzero(-i_xyz + re((jx * jx + jy * jy + jz * jz) * e + e * e * e), "S_imp 2w")?;
    let common = i_xyz + re(-jz * jz * e + e * e * e);
    let split = c64::new(2.0 * jx * jy * e, 2.0 * jz * e * e);
    let alpha_p = (common + split) / d;
    let alpha_m = (common - split) / d;
    let beta = re((-jx * jx + jy * jy) * e) / d;
    let gamma = re(jz * jz * e + e * e * e) / d;
    let delta = (i_xyz - re((jx * jx + jy * jy) * e)) / d;
    let eps_p = re(jx + jy) * c64::new(jz, e) * e / d;
    let eps_m = -re(jx - jy) * c64::new(jz, -e) * e / d;
    Ok([alpha_p, alpha_m, beta, gamma, delta, eps_p, eps_m])
}

/// Two-walker impurity scattering matrix, both walkers at the origin.
pub fn s_imp_2w(epsilon: f64, jx: f64, jy: f64, jz: f64) -> Result<ScatteringMatrix> {
    let [ap, am, b, g, d, ep, em] = s_imp_2w_entries(epsilon, jx, jy, jz)?;
    let z = ZERO;
    Ok(ScatteringMatrix::new(
        Label::SImp2w,
        from_rows([
            [ap, z, z, b, z, em, em, z],
            [z, g, d, z, ep, z, z, em],
            [z, d, g, z, ep, z, z, em],
            [b, z, z, am, z, ep, ep, z],
            [z, ep, ep, z, am, z, z, b],
            [em, z, z, ep, z, g, d, z],
            [em, z, z, ep, z, d, g, z],
            [z, em, em, z, b, z, z, ap],
        ]),
    ))
}

/// Closed-form square root of [`s_imp_2w`] for the XX family (any ε) or
/// the isotropic family (ε = 1 only).
pub fn s_imp_2w_sqrt(epsilon: f64, j: f64, family: Family) -> Result<ScatteringMatrix> {
    check_epsilon(epsilon)?;
    let (ap, am, g, d, e) = match family {
        Family::XX => {
            let r = (2.0 * j * j + epsilon * epsilon).sqrt();
            let q = epsilon / r;
            (ONE, re(q), re(0.5 * (1.0 + q)), re(0.5 * (-1.0 + q)), c64::new(0.0, j / r))
        }
        Family::SU2 => {
            if epsilon != 1.0 {
                return Err(Error::Unsupported(format!(
                    "isotropic two-walker square root is only available at epsilon = 1, got {epsilon}"
                )));
            }
            let a = ((I - j) / (I + j)).sqrt();
            let b = ((I + 2.0 * j) / (I - 2.0 * j)).sqrt();
            (
                a,
                (2.0 * b + a) / 3.0,
                (3.0 + b + 2.0 * a) / 6.0,
                (-3.0 + b + 2.0 * a) / 6.0,
                (a - b) / 3.0,
            )
        }
    };
    let z = ZERO;
    Ok(ScatteringMatrix::new(
        Label::SImp2wSqrt,
        from_rows([
            [ap, z, z, z, z, z, z, z],
            [z, g, d, z, e, z, z, z],
            [z, d, g, z, e, z, z, z],
            [z, z, z, am, z, e, e, z],
            [z, e, e, z, am, z, z, z],
            [z, z, z, e, z, g, d, z],
            [z, z, z, e, z, d, g, z],
            [z, z, z, z, z, z, z, ap],
        ]),
    ))
}

/// The two-walker S matrix that [`s_imp_2w_sqrt`] squares to.
pub fn s_imp_2w_for_family(epsilon: f64, j: f64, family: Family) -> Result<ScatteringMatrix> {
    match family {
        Family::XX => s_imp_2w(epsilon, j, j, 0.0),
        Family::SU2 => s_imp_2w(epsilon, j, j, j),
    }
}

/// One-walker S matrix from the midpoint jump condition
/// `(−iεσᶻ⊗s⁰ + H_m/2) ψ(0+) = (−iεσᶻ⊗s⁰ − H_m/2) ψ(0−)`, solved for the
/// outgoing amplitudes. Independent of the closed form.
pub fn cayley_oracle_1w(epsilon: f64, jx: f64, jy: f64, jz: f64) -> Result<ScatteringMatrix> {
    check_epsilon(epsilon)?;
    let jm = re(jx - jy);
    let jp = re(jx + jy);
    let z = ZERO;
    let hm = from_rows([
        [re(jz), z, z, jm],
        [z, re(-jz), jp, z],
        [z, jp, re(-jz), z],
        [jm, z, z, re(jz)],
    ]);
    let sigma = [1.0, -1.0, 1.0, -1.0];
    let p = Mat::from_fn(4, 4, |i, k| {
        let diag = if i == k { c64::new(0.0, -epsilon * sigma[i]) } else { ZERO };
        diag + 0.5 * hm[(i, k)]
    });
    let q = Mat::from_fn(4, 4, |i, k| {
        let diag = if i == k { c64::new(0.0, -epsilon * sigma[i]) } else { ZERO };
        diag - 0.5 * hm[(i, k)]
    });
    // L components are outgoing on the 0− side, R components on the 0+ side.
    // Collect outgoing amplitudes on the left of P ψ(0+) − Q ψ(0−) = 0.
    let a = Mat::from_fn(4, 4, |i, k| if k % 2 == 0 { -q[(i, k)] } else { p[(i, k)] });
    let b = Mat::from_fn(4, 4, |i, k| if k % 2 == 0 { p[(i, k)] } else { -q[(i, k)] });
    let s = linalg::solve(&a, &b)?;
    Ok(ScatteringMatrix::new(Label::SImp1w, Mat::from_fn(4, 4, |i, j| -s[(i, j)])))
}

/// Two-walker S matrix in Cayley form `(iεI + M̃/2)⁻¹ (iεI − M̃/2)`.
pub fn cayley_oracle_2w(epsilon: f64, jx: f64, jy: f64, jz: f64) -> Result<ScatteringMatrix> {
    check_epsilon(epsilon)?;
    let (jm, jp, z2, z) = (re(jx - jy), re(jx + jy), re(2.0 * jz), ZERO);
    let mt = from_rows([
        [z2, z, z, z, z, jm, jm, z],
        [z, z, z, z, jp, z, z, jm],
        [z, z, z, z, jp, z, z, jm],
        [z, z, z, -z2, z, jp, jp, z],
        [z, jp, jp, z, -z2, z, z, z],
        [jm, z, z, jp, z, z, z, z],
        [jm, z, z, jp, z, z, z, z],
        [z, jm, jm, z, z, z, z, z2],
    ]);
    let ie = c64::new(0.0, epsilon);
    let lhs = Mat::from_fn(8, 8, |i, j| if i == j { ie } else { ZERO } + 0.5 * mt[(i, j)]);
    let rhs = Mat::from_fn(8, 8, |i, j| if i == j { ie } else { ZERO } - 0.5 * mt[(i, j)]);
    Ok(ScatteringMatrix::new(Label::SImp2w, linalg::solve(&lhs, &rhs)?))
}

/// Largest deviation between each Cayley oracle and its closed form.
pub fn oracle_deviation(epsilon: f64, jx: f64, jy: f64, jz: f64) -> Result<(f64, f64)> {
    let d1 = linalg::max_abs_diff(
        &cayley_oracle_1w(epsilon, jx, jy, jz)?.entries,
        &s_imp_1w(epsilon, jx, jy, jz)?.entries,
    );
    let d2 = linalg::max_abs_diff(
        &cayley_oracle_2w(epsilon, jx, jy, jz)?.entries,
        &s_imp_2w(epsilon, jx, jy, jz)?.entries,
    );
    Ok((d1, d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    fn close(a: c64, b: c64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn coin_examples() {
        assert!(max_abs_diff(&coin(0.0).entries, &identity(2)) == 0.0);
        let q = coin(PI / 2.0);
        assert!(close(q.get(0, 1), re(-1.0), 1e-15) && close(q.get(1, 0), re(1.0), 1e-15));
        assert!(q.get(0, 0).norm() < 1e-15);
        let t = coin(PI / 10.0);
        assert!(close(t.get(0, 0), re(0.951056516295), 1e-12));
        assert!(close(t.get(0, 1), re(-0.309016994375), 1e-12));
        assert!(close(t.get(1, 0), re(0.309016994375), 1e-12));
    }

    #[test]
    fn coin_sqrt_examples() {
        assert!(max_abs_diff(&coin_sqrt(0.0).entries, &identity(2)) == 0.0);
        let h = coin_sqrt(PI);
        assert!(max_abs_diff(&h.entries, &coin(PI / 2.0).entries) < 1e-15);
        let s = coin_sqrt(PI / 10.0);
        assert!(max_abs_diff(&s.squared(), &coin(PI / 10.0).entries) < 1e-15);
    }

    #[test]
    fn phi_from_dirac_examples() {
        assert_eq!(phi_from_dirac(1.0, 0.0), 0.0);
        assert!((phi_from_dirac(1.0, 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((phi_from_dirac(2.0, 2.0) - (-0.8f64).atan2(0.6)).abs() < 1e-15);
        assert!((phi_from_dirac(2.0, 2.0) + 0.927295218).abs() < 1e-9);
    }

    #[test]
    fn s_dirac_examples() {
        assert!(max_abs_diff(&s_dirac(1.0, 0.0).unwrap().entries, &identity(2)) == 0.0);
        let s = s_dirac(1.0, 2.0).unwrap();
        assert!(max_abs_diff(&s.entries, &from_rows([[ZERO, ONE], [-ONE, ZERO]])) < 1e-15);
        let s = s_dirac(2.0, 2.0).unwrap();
        let want = from_rows([[re(0.6), re(0.8)], [re(-0.8), re(0.6)]]);
        assert!(max_abs_diff(&s.entries, &want) < 1e-15);
        assert!(s_dirac(0.0, 1.0).is_err());
    }

    #[test]
    fn s_imp_1w_examples() {
        let s = s_imp_1w(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(max_abs_diff(&s.entries, &identity(4)) == 0.0);
        let [a, b, g, d] = s_imp_1w_entries(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(close(a, ONE, 1e-15) && close(b, ZERO, 1e-15));
        assert!(close(g, ZERO, 1e-15) && close(d, I, 1e-15));
        let [a, b, g, d] = s_imp_1w_entries(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(close(a, c(0.6, 0.8), 1e-15) && close(b, ZERO, 1e-15));
        assert!(close(g, c(7.0, -4.0) / 65.0, 1e-15));
        assert!(close(d, c(32.0, 56.0) / 65.0, 1e-15));
    }

    #[test]
    fn s_imp_1w_sqrt_examples() {
        let s = s_imp_1w_sqrt(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(max_abs_diff(&s.entries, &identity(4)) < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = from_rows([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, re(h), c(0.0, h), ZERO],
            [ZERO, c(0.0, h), re(h), ZERO],
            [ZERO, ZERO, ZERO, ONE],
        ]);
        let s = s_imp_1w_sqrt(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(max_abs_diff(&s.entries, &want) < 1e-15);
        let s = s_imp_1w_sqrt(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(max_abs_diff(&s.squared(), &s_imp_1w(1.0, 1.0, 1.0, 1.0).unwrap().entries) < 1e-12);
    }

    #[test]
    fn branch_cut_detection() {
        assert!(on_branch_cut(c(-1.0, 0.0)));
        assert!(!on_branch_cut(c(-1.0, 1e-6)));
        assert!(!on_branch_cut(c(1.0, 0.0)));
        assert!(!sqrt_branch_ambiguous_1w(1.0, 0.3, 0.7, 0.1).unwrap());
        assert!(!sqrt_branch_ambiguous_1w(1.0, 1.0, 1.0, 0.0).unwrap());
    }

    #[test]
    fn s_imp_2w_examples() {
        let s = s_imp_2w(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(max_abs_diff(&s.entries, &identity(8)) < 1e-15);
        let [ap, am, b, g, d, ep, em] = s_imp_2w_entries(1.0, 1.0, 1.0, 0.0).unwrap();
        let t = 1e-15;
        assert!(close(ap, ONE, t) && close(am, re(-1.0 / 3.0), t) && close(b, ZERO, t));
        assert!(close(g, re(1.0 / 3.0), t) && close(d, re(-2.0 / 3.0), t));
        assert!(close(ep, c(0.0, 2.0 / 3.0), t) && close(em, ZERO, t));
        let [ap, am, b, g, d, ep, em] = s_imp_2w_entries(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(close(ap, I, t) && close(am, -c(2.0, 1.0) / 5.0, t) && close(b, ZERO, t));
        assert!(close(g, c(2.0, 1.0) / 5.0, t) && close(d, c(-3.0, 1.0) / 5.0, t));
        assert!(close(ep, c(1.0, 3.0) / 5.0, t) && close(em, ZERO, t));
        let s = s_imp_2w(1.0, 1.0, 1.0, 1.0).unwrap();
        for i in 0..8 {
            let row: f64 = (0..8).map(|j| s.get(i, j).norm_sqr()).sum();
            assert!((row - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn s_imp_2w_sqrt_examples() {
        let s = s_imp_2w_sqrt(1.0, 0.0, Family::XX).unwrap();
        assert!(max_abs_diff(&s.entries, &identity(8)) < 1e-15);
        let s = s_imp_2w_sqrt(1.0, 1.0, Family::XX).unwrap();
        let r3 = 3f64.sqrt();
        let t = 1e-15;
        assert!(close(s.get(0, 0), ONE, t) && close(s.get(3, 3), re(1.0 / r3), t));
        assert!(close(s.get(1, 1), re((1.0 + 1.0 / r3) / 2.0), t));
        assert!(close(s.get(1, 2), re((-1.0 + 1.0 / r3) / 2.0), t));
        assert!(close(s.get(1, 4), c(0.0, 1.0 / r3), t));
        let s = s_imp_2w_sqrt(1.0, 1.0, Family::SU2).unwrap();
        assert!(max_abs_diff(&s.squared(), &s_imp_2w(1.0, 1.0, 1.0, 1.0).unwrap().entries) < 1e-12);
        assert!(matches!(s_imp_2w_sqrt(2.0, 1.0, Family::SU2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn oracle_examples() {
        let o = cayley_oracle_1w(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(max_abs_diff(&o.entries, &identity(4)) < 1e-15);
        let o = cayley_oracle_2w(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(max_abs_diff(&o.entries, &identity(8)) < 1e-15);
        let (d1, d2) = oracle_deviation(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(d1 < 1e-14 && d2 < 1e-14);
    }

    #[test]
    fn xx_specialization_matches_chiral_form() {
        for &(e, jx, jy) in &[(1.0, 1.0, 1.0), (0.7, 2.0, -0.5), (2.0, 3.0, 1.5)] {
            let [a, b, g, d] = s_imp_1w_entries(e, jx, jy, 0.0).unwrap();
            let (jm, jp, e2) = (jx - jy, jx + jy, 4.0 * e * e);
            assert!(close(a, re((e2 - jm * jm) / (e2 + jm * jm)), 1e-14));
            assert!(close(b, c(0.0, 4.0 * e * jm / (e2 + jm * jm)), 1e-14));
            assert!(close(g, re((e2 - jp * jp) / (e2 + jp * jp)), 1e-14));
            assert!(close(d, c(0.0, 4.0 * e * jp / (e2 + jp * jp)), 1e-14));
        }
    }

    #[test]
    fn family_detection() {
        assert_eq!(Family::of(&ModelParams::xx(0.3, 2.0, 11)).unwrap(), Family::XX);
        assert_eq!(Family::of(&ModelParams::su2(0.3, 2.0, 11)).unwrap(), Family::SU2);
        let p = ModelParams { j_x: 1.0, j_y: 2.0, ..Default::default() };
        assert!(Family::of(&p).is_err());
        let p = ModelParams { epsilon: 2.0, ..ModelParams::su2(0.3, 1.0, 11) };
        assert!(Family::of(&p).is_err());
    }

    proptest! {
        #[test]
        fn all_blocks_unitary(e in 0.1f64..3.0, jx in -5.0f64..5.0, jy in -5.0f64..5.0, jz in -5.0f64..5.0, phi in -3.2f64..3.2) {
            prop_assert!(coin(phi).unitarity_deviation() < 1e-14);
            prop_assert!(s_imp_1w(e, jx, jy, jz).unwrap().unitarity_deviation() < 1e-12);
            prop_assert!(s_imp_1w_sqrt(e, jx, jy, jz).unwrap().unitarity_deviation() < 1e-12);
            prop_assert!(s_imp_2w(e, jx, jy, jz).unwrap().unitarity_deviation() < 1e-12);
        }

        #[test]
        fn square_roots_square(e in 0.1f64..3.0, jx in -5.0f64..5.0, jy in -5.0f64..5.0, jz in -5.0f64..5.0, j in -10.0f64..10.0) {
            let r = s_imp_1w_sqrt(e, jx, jy, jz).unwrap();
            prop_assert!(max_abs_diff(&r.squared(), &s_imp_1w(e, jx, jy, jz).unwrap().entries) < 1e-12);
            let r = s_imp_2w_sqrt(e, j, Family::XX).unwrap();
            prop_assert!(r.unitarity_deviation() < 1e-12);
            prop_assert!(max_abs_diff(&r.squared(), &s_imp_2w(e, j, j, 0.0).unwrap().entries) < 1e-12);
            let r = s_imp_2w_sqrt(1.0, j, Family::SU2).unwrap();
            prop_assert!(r.unitarity_deviation() < 1e-12);
            prop_assert!(max_abs_diff(&r.squared(), &s_imp_2w(1.0, j, j, j).unwrap().entries) < 1e-12);
        }

        #[test]
        fn cayley_oracles_agree(e in 0.1f64..3.0, jx in -5.0f64..5.0, jy in -5.0f64..5.0, jz in -5.0f64..5.0) {
            let (d1, d2) = oracle_deviation(e, jx, jy, jz).unwrap();
            prop_assert!(d1 < 1e-12 && d2 < 1e-12, "deviations {} {}", d1, d2);
        }

        #[test]
        fn dirac_matches_coin(e in 0.1f64..5.0, m in -10.0f64..10.0) {
            let d = max_abs_diff(&s_dirac(e, m).unwrap().entries, &coin(phi_from_dirac(e, m)).entries);
            prop_assert!(d < 1e-14);
        }
    }
}
