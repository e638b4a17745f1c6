//! The five subcommands.

use kondo_walk::bound_analytic::{self, Branch};
use kondo_walk::entanglement;
use kondo_walk::evolve1w::{self, Frame, StateClass};
use kondo_walk::evolve2w::{self, Evolver2W, OriginSide};
use kondo_walk::hilbert::{self, Chirality, Spin};
use kondo_walk::linalg;
use kondo_walk::operators::{self, Family, ScatteringMatrix};
use kondo_walk::{Error, ModelParams, ParticleStatistics, StateVector1W, StateVector2W};

use crate::config::{Init, RunConfig, stats_name};
use crate::output::{Cell, Csv, OutDir};
use crate::CliError;

fn matrix_csv(name: &str, m: &ScatteringMatrix) -> Csv {
    let mut csv = Csv::new(name, &["row", "col", "re", "im"]);
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let z = m.get(i, j);
            csv.row(&[Cell::U(i), Cell::U(j), Cell::F(z.re), Cell::F(z.im)]);
        }
    }
    csv
}

/// Scattering matrices, their square roots and the deviations from the
/// independent Cayley-form constructions.
pub fn matrices(cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let p = cfg.params()?;
    let (eps, jx, jy, jz) = (p.epsilon, p.j_x, p.j_y, p.j_z);
    let coin = operators::coin(p.phi);
    let coin_sqrt = operators::coin_sqrt(p.phi);
    let s1 = operators::s_imp_1w(eps, jx, jy, jz)?;
    let s1_sqrt = operators::s_imp_1w_sqrt(eps, jx, jy, jz)?;
    let s2 = operators::s_imp_2w(eps, jx, jy, jz)?;
    let s2_sqrt = match Family::of(&p) {
        Ok(f) => Some(operators::s_imp_2w_sqrt(eps, jx, f)?),
        Err(e) => {
            log::warn!("skipping s_imp_2w_sqrt: {e}");
            None
        }
    };
    let (dev1, dev2) = operators::oracle_deviation(eps, jx, jy, jz)?;

    let mut dev = Csv::new("oracle_dev.csv", &["check", "max_dev"]);
    let mut check = |name: &str, v: f64| dev.row(&[Cell::S(name), Cell::F(v)]);
    check("s_imp_1w_vs_cayley", dev1);
    check("s_imp_2w_vs_cayley", dev2);
    check("coin_sqrt_squared", linalg::max_abs_diff(&coin_sqrt.squared(), &coin.entries));
    check("s_imp_1w_sqrt_squared", linalg::max_abs_diff(&s1_sqrt.squared(), &s1.entries));
    if let Some(r) = &s2_sqrt {
        check("s_imp_2w_sqrt_squared", linalg::max_abs_diff(&r.squared(), &s2.entries));
    }
    let mut all = vec![("coin", &coin), ("coin_sqrt", &coin_sqrt), ("s_imp_1w", &s1), ("s_imp_1w_sqrt", &s1_sqrt), ("s_imp_2w", &s2)];
    if let Some(r) = &s2_sqrt {
        all.push(("s_imp_2w_sqrt", r));
    }
    for (name, m) in &all {
        check(&format!("{name}_unitarity"), m.unitarity_deviation());
    }
    for (name, m) in &all {
        out.write(matrix_csv(&format!("{name}.csv"), m))?;
    }
    out.write(dev)
}

/// Full one-walker spectrum with bound-state details.
pub fn spectrum(cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let p = cfg.params()?;
    let u = evolve1w::build_u1w(&p, cfg.frame)?;
    let spec = evolve1w::spectrum(&u, &p)?;
    log::info!("{} bound eigenvalues, max residual {:.3e}", spec.bound_count(), spec.max_residual);

    let mut all = Csv::new("spectrum.csv", &["index", "re", "im", "lambda", "class", "loc_length"]);
    for k in 0..spec.eigenvalues.len() {
        let z = spec.eigenvalues[k];
        let class = match spec.class[k] {
            StateClass::Bound => "bound",
            StateClass::Bulk => "bulk",
        };
        let loc = spec.loc_length[k].unwrap_or(f64::NAN);
        all.row(&[Cell::U(k), Cell::F(z.re), Cell::F(z.im), Cell::F(spec.lambdas[k]), Cell::S(class), Cell::F(loc)]);
    }

    let mut summary = Csv::new(
        "bound_states.csv",
        &[
            "index", "re", "im", "lambda", "loc_length", "participation_width", "j10_squared",
            "singlet_re", "singlet_im", "triplet_up_re", "triplet_up_im", "triplet_0_re", "triplet_0_im",
            "triplet_down_re", "triplet_down_im",
        ],
    );
    let mut vectors = Csv::new("bound_vectors.csv", &["index", "x", "s0", "sigma", "re", "im"]);
    for k in spec.bound_indices() {
        let z = spec.eigenvalues[k];
        let v = &spec.eigenvectors[k];
        let (s, t) = evolve1w::spin_overlaps(v);
        summary.row(&[
            Cell::U(k),
            Cell::F(z.re),
            Cell::F(z.im),
            Cell::F(spec.lambdas[k]),
            Cell::F(spec.loc_length[k].unwrap_or(f64::NAN)),
            Cell::F(evolve1w::participation_width(v)),
            Cell::F(evolve1w::j10_squared(v)),
            Cell::F(s.re),
            Cell::F(s.im),
            Cell::F(t[0].re),
            Cell::F(t[0].im),
            Cell::F(t[1].re),
            Cell::F(t[1].im),
            Cell::F(t[2].re),
            Cell::F(t[2].im),
        ]);
        for (i, a) in v.amplitudes.iter().enumerate() {
            let (x, sigma, s0) = hilbert::decompose_1w(p.lx, i);
            vectors.row(&[
                Cell::U(k),
                Cell::I(x),
                Cell::S(match s0 {
                    Spin::Up => "up",
                    Spin::Down => "down",
                }),
                Cell::S(match sigma {
                    Chirality::L => "L",
                    Chirality::R => "R",
                }),
                Cell::F(a.re),
                Cell::F(a.im),
            ]);
        }
    }
    out.write(all)?;
    out.write(summary)?;
    out.write(vectors)
}

/// Analytic XX bound states for every coupling in `j_list`.
pub fn bound(cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let p = cfg.params()?;
    if cfg.family == Some(Family::SU2) || p.j_x != p.j_y || p.j_z != 0.0 {
        return Err(CliError::config("config".into(), "bound tabulates XX couplings only".into()));
    }
    if p.epsilon != 1.0 {
        return Err(CliError::config("config".into(), "analytic bound states assume epsilon = 1".into()));
    }
    let js = cfg.j_list.clone().unwrap_or_else(|| vec![p.j_x]);
    let mut csv = Csv::new(
        "bound.csv",
        &["j", "which", "re", "im", "lambda", "branch", "zeta", "loc_length", "residual"],
    );
    for &j in &js {
        let eigs = bound_analytic::bound_eigenvalues_xx(p.phi, j)?;
        for (k, z) in eigs.iter().enumerate() {
            let lambda = evolve1w::phase(*z);
            let branch = match bound_analytic::branch_of(*z) {
                Branch::CosPositive => "cos_pos",
                Branch::CosNegative => "cos_neg",
            };
            // at J = 0 the eigenvalue sits on the band edge and nothing is bound
            let on_edge = evolve1w::classify(*z, &p) == StateClass::Bulk;
            let (zeta, loc, residual) = match bound_analytic::assemble_bound_state(p.phi, j, k + 1, p.lx) {
                Ok(s) if !on_edge => (s.zeta, s.localization_length, s.residual),
                Ok(_) | Err(Error::BulkRegime { .. }) => (f64::NAN, f64::INFINITY, f64::NAN),
                Err(e) => return Err(e.into()),
            };
            csv.row(&[
                Cell::F(j),
                Cell::U(k + 1),
                Cell::F(z.re),
                Cell::F(z.im),
                Cell::F(lambda),
                Cell::S(branch),
                Cell::F(zeta),
                Cell::F(loc),
                Cell::F(residual),
            ]);
        }
    }
    out.write(csv)
}

/// Symmetric-frame bound state selected by `bound_index`.
///
/// XX at ε = 1 uses the transfer-matrix solution mapped to the symmetric
/// frame. Otherwise the numerical bound states with Im z > 0 are ordered by
/// participation width, sharpest first.
pub fn bound_state(cfg: &RunConfig, p: &ModelParams) -> Result<StateVector1W, CliError> {
    if Family::of(p)? == Family::XX && p.epsilon == 1.0 {
        let sol = bound_analytic::assemble_bound_state(p.phi, p.j_x, cfg.bound_index, p.lx)?;
        let mut v = evolve1w::to_symmetric_frame(p, &sol.wavefunction)?;
        v.normalize();
        log::info!("bound state z = {:.12} (analytic)", sol.eigenvalue);
        return Ok(v);
    }
    let u = evolve1w::build_u1w(p, Frame::Symmetric)?;
    let spec = evolve1w::spectrum(&u, p)?;
    let mut upper: Vec<(f64, usize)> = spec
        .bound_indices()
        .into_iter()
        .filter(|&k| spec.eigenvalues[k].im > 0.0)
        .map(|k| (evolve1w::participation_width(&spec.eigenvectors[k]), k))
        .collect();
    upper.sort_by(|a, b| a.0.total_cmp(&b.0));
    let &(_, k) = upper.get(cfg.bound_index - 1).ok_or_else(|| {
        Error::Unsupported(format!(
            "bound_index {} requested but only {} bound states have Im z > 0",
            cfg.bound_index,
            upper.len()
        ))
    })?;
    log::info!("bound state z = {:.12} (numerical)", spec.eigenvalues[k]);
    Ok(spec.eigenvectors[k].clone())
}

/// Parameters, evolver and initial states for the two-walker commands.
struct TwoWalkerRun {
    params: ModelParams,
    evolver: Evolver2W,
    bound: Option<StateVector1W>,
}

impl TwoWalkerRun {
    fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        if cfg.frame != Frame::Symmetric {
            return Err(CliError::config("config".into(), "two-walker runs use frame = symmetric".into()));
        }
        let params = cfg.params()?;
        let evolver = Evolver2W::new(&params)?;
        let bound = match cfg.init {
            Init::BoundDelta => Some(bound_state(cfg, &params)?),
            Init::DeltaDelta => None,
        };
        Ok(TwoWalkerRun { params, evolver, bound })
    }

    fn initial(&self, cfg: &RunConfig, stats: ParticleStatistics) -> Result<StateVector2W, CliError> {
        Ok(match &self.bound {
            Some(b) => evolve2w::initial_bound_delta(&self.params, stats, cfg.x0, b)?,
            None => evolve2w::initial_delta_delta(&self.params, stats, cfg.x0)?,
        })
    }
}

/// Walker 2 starts at x0 moving left, so transmission is counted on the far side.
fn far_side(x0: i64) -> OriginSide {
    if x0 > 0 { OriginSide::Negative } else { OriginSide::Positive }
}

/// Snapshots of P(x₁, x₂) and the marginals, plus per-step series.
pub fn evolve(cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let run = TwoWalkerRun::new(cfg)?;
    let lx = run.params.lx;
    let side = far_side(cfg.x0);
    for stats in cfg.stats.list() {
        let name = stats_name(stats);
        let mut joint = Csv::new(&format!("joint_{name}.csv"), &["t", "x1", "x2", "p"]);
        let mut marg = Csv::new(&format!("marginals_{name}.csv"), &["t", "x", "p1", "p2"]);
        let mut series = Csv::new(
            &format!("series_{name}.csv"),
            &["t", "norm", "sz", "transmission", "singlet", "triplet_up", "triplet_0", "triplet_down"],
        );
        let snapshot = |t: usize| t == 0 || t == cfg.steps || (cfg.snapshot_every > 0 && t.is_multiple_of(cfg.snapshot_every));
        run.evolver.run(run.initial(cfg, stats)?, cfg.steps, |t, state| {
            let obs = evolve2w::observables(state);
            let trans: f64 = (0..lx)
                .filter(|&s| {
                    let x = hilbert::position_of(lx, s);
                    match side {
                        OriginSide::Negative => x < 0,
                        OriginSide::Positive => x > 0,
                    }
                })
                .map(|s| obs.p_marg2[s])
                .sum();
            series.row(&[
                Cell::U(t),
                Cell::F(state.norm()),
                Cell::F(obs.sz),
                Cell::F(trans),
                Cell::F(obs.spin.singlet),
                Cell::F(obs.spin.triplet[0]),
                Cell::F(obs.spin.triplet[1]),
                Cell::F(obs.spin.triplet[2]),
            ]);
            if snapshot(t) {
                for s1 in 0..lx {
                    let x1 = hilbert::position_of(lx, s1);
                    marg.row(&[Cell::U(t), Cell::I(x1), Cell::F(obs.p_marg1[s1]), Cell::F(obs.p_marg2[s1])]);
                    for s2 in 0..lx {
                        let x2 = hilbert::position_of(lx, s2);
                        joint.row(&[Cell::U(t), Cell::I(x1), Cell::I(x2), Cell::F(obs.p_joint[s1 * lx + s2])]);
                    }
                }
            }
        });
        out.write(joint)?;
        out.write(marg)?;
        out.write(series)?;
    }
    Ok(())
}

/// Negativity series sampled every `every` steps and at the last step.
pub fn negativity(cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let run = TwoWalkerRun::new(cfg)?;
    for stats in cfg.stats.list() {
        let name = stats_name(stats);
        let mut csv = Csv::new(&format!("negativity_{name}.csv"), &["t", "negativity", "min_eig", "dim", "solved_dim"]);
        let mut failure: Option<Error> = None;
        run.evolver.run(run.initial(cfg, stats)?, cfg.steps, |t, state| {
            if failure.is_some() || !(t.is_multiple_of(cfg.every) || t == cfg.steps) {
                return;
            }
            match entanglement::negativity_with_cap(state, run.params.support_eps, cfg.dim_cap) {
                Ok(r) => {
                    log::debug!("{name} t = {t}: N = {:.6} (dim {})", r.negativity, r.solved_dim);
                    csv.row(&[
                        Cell::U(t),
                        Cell::F(r.negativity),
                        Cell::F(r.min_eigenvalue),
                        Cell::U(r.spectrum_dim),
                        Cell::U(r.solved_dim),
                    ]);
                }
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e.into());
        }
        out.write(csv)?;
    }
    Ok(())
}
