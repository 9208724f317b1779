//! The experiment drivers. Grid points run in parallel; assembly happens
//! in grid order so repeated runs emit identical tables.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use symwave::analytic::{transparent_independent_intensity, transparent_symmetric_intensity};
use symwave::{
    asymptotic_barrier, barrier_matrices_asymptotic, calibrate_sigma,
    independent_mean_transmissivity, mean_intensity_independent, mean_intensity_symmetric,
    mean_transmissivity, monte_carlo_mean_intensity, sample_reflection_ensemble,
    system_transmission_matrix, transmission_moment, transmissivity, BarrierAsymptotic,
    BarrierModal, MediumModel, MediumSpec, Regime, SeriesControl,
};

use crate::config::{ExperimentConfig, ExperimentKind, FigureId};
use crate::criteria::run_all_criteria;
use crate::table::ResultTable;
use crate::{CliError, Result};

/// The double series behind the independent-half curves converges far
/// more slowly than the symmetric one; its tolerance is floored here to
/// keep dense grids affordable (the deep end of the default grid costs
/// seconds per point at this setting, minutes below it).
const INDEPENDENT_REL_TOL_FLOOR: f64 = 3e-4;

/// The symmetric series needs roughly 3e5 retained orders at the deep
/// end of the default grid before its tail bound clears 1e-6.
fn series_control(rel_tol: f64) -> SeriesControl {
    SeriesControl {
        rel_tol,
        max_terms: 1 << 19,
    }
}

fn at_depth<T>(ell: f64, r: symwave::Result<T>) -> Result<T> {
    r.map_err(|e| match CliError::from(e) {
        CliError::Numerical(s) => CliError::Numerical(format!("depth {ell}: {s}")),
        other => other,
    })
}

/// Reflection coefficient of the thin barrier with transmitted intensity
/// `t1_sq`, in the regime whose closed forms the layered series assume.
pub fn drop_reflection(t1_sq: f64) -> Result<Complex64> {
    let b = BarrierAsymptotic::from_intensity(t1_sq, Regime::ImpedanceDrop)?;
    Ok(asymptotic_barrier(&b).r)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::Moments => run_moments(cfg),
        ExperimentKind::LayeredSeries => run_series(cfg),
        ExperimentKind::LayeredMc => run_mc(cfg),
        ExperimentKind::Figure(id) => run_figure(id, cfg),
        ExperimentKind::WaveguideSuite => run_waveguide_suite(cfg),
        ExperimentKind::Validate => Ok(run_validation(cfg)?.0),
    }
}

/// Transmission moments E[|T|^2n] for n = 1..n_max over the depth grid.
pub fn run_moments(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let rows: Vec<Vec<f64>> = cfg
        .grid
        .par_iter()
        .map(|&ell| {
            (1..=cfg.n_max)
                .map(|n| at_depth(ell, transmission_moment(n, ell)))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut t = ResultTable::new();
    t.push_real("ell", cfg.grid.clone());
    for n in 1..=cfg.n_max {
        t.push_real(
            &format!("m{n}"),
            rows.iter().map(|r| r[n - 1]).collect(),
        );
    }
    Ok(t)
}

/// Mean transmitted intensity of the barrier-in-medium system over the
/// depth grid, for mirror-symmetric and independent halves.
pub fn run_series(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let r1 = drop_reflection(cfg.t1_sq)?;
    let ctl_sym = series_control(cfg.rel_tol);
    let ctl_ind = series_control(cfg.rel_tol.max(INDEPENDENT_REL_TOL_FLOOR));
    let rows: Vec<(f64, f64)> = cfg
        .grid
        .par_iter()
        .map(|&ell| {
            let sym = at_depth(ell, mean_intensity_symmetric(ell, r1, &ctl_sym))?;
            let ind = at_depth(ell, mean_intensity_independent(ell, r1, &ctl_ind))?;
            Ok((sym, ind))
        })
        .collect::<Result<_>>()?;
    let mut t = ResultTable::new();
    t.push_real("ell", cfg.grid.clone());
    t.push_real("symmetric", rows.iter().map(|r| r.0).collect());
    t.push_real("independent", rows.iter().map(|r| r.1).collect());
    Ok(t)
}

fn medium_for(cfg: &ExperimentConfig, ell: f64) -> Result<MediumSpec> {
    let mut spec = MediumSpec {
        half_length: 1.0,
        corr_length: cfg.corr_length,
        sigma: 0.1,
        model: MediumModel::Binary,
        c0: 1.0,
    };
    spec.sigma = at_depth(ell, calibrate_sigma(&spec, cfg.wavenumber, ell))?;
    Ok(spec)
}

/// Monte Carlo mean intensity over mirror-symmetric media against the
/// series prediction, one ensemble per grid depth.
pub fn run_mc(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let barrier = BarrierAsymptotic::from_intensity(cfg.t1_sq, Regime::ImpedanceDrop)?;
    let r1 = drop_reflection(cfg.t1_sq)?;
    let ctl = series_control(cfg.rel_tol);
    let mut mc_mean = Vec::new();
    let mut mc_se = Vec::new();
    let mut series = Vec::new();
    // The ensemble itself runs in parallel; keep the grid sequential.
    for &ell in &cfg.grid {
        let spec = medium_for(cfg, ell)?;
        let est = at_depth(
            ell,
            monte_carlo_mean_intensity(
                &spec,
                &barrier,
                cfg.wavenumber,
                cfg.n_samples,
                cfg.seed,
                true,
            ),
        )?;
        mc_mean.push(est.mean);
        mc_se.push(est.std_error);
        series.push(at_depth(ell, mean_intensity_symmetric(ell, r1, &ctl))?);
    }
    let mut t = ResultTable::new();
    t.push_real("ell", cfg.grid.clone());
    t.push_real("mc_mean", mc_mean);
    t.push_real("mc_std_error", mc_se);
    t.push_real("series_symmetric", series);
    Ok(t)
}

/// The three reference curve sets. `comp1` is the transparent-barrier
/// pair with their ratio; `comp2` and `comp3` fix the barrier intensity
/// at 0.4 and 0.1 and add the medium-only mean intensity.
pub fn run_figure(id: FigureId, cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new();
    t.push_real("ell", cfg.grid.clone());
    match id {
        FigureId::Comp1 => {
            let ctl = series_control(cfg.rel_tol);
            let rows: Vec<(f64, f64)> = cfg
                .grid
                .par_iter()
                .map(|&ell| {
                    let sym = at_depth(ell, transparent_symmetric_intensity(ell))?;
                    let ind = at_depth(ell, transparent_independent_intensity(ell, &ctl))?;
                    Ok((sym, ind))
                })
                .collect::<Result<_>>()?;
            t.push_real("symmetric", rows.iter().map(|r| r.0).collect());
            t.push_real("independent", rows.iter().map(|r| r.1).collect());
            t.push_real("ratio", rows.iter().map(|r| r.1 / r.0).collect());
        }
        FigureId::Comp2 | FigureId::Comp3 => {
            let t1_sq = if id == FigureId::Comp2 { 0.4 } else { 0.1 };
            let r1 = drop_reflection(t1_sq)?;
            let ctl_sym = series_control(cfg.rel_tol);
            let ctl_ind = series_control(cfg.rel_tol.max(INDEPENDENT_REL_TOL_FLOOR));
            let rows: Vec<(f64, f64, f64)> = cfg
                .grid
                .par_iter()
                .map(|&ell| {
                    let sym = at_depth(ell, mean_intensity_symmetric(ell, r1, &ctl_sym))?;
                    let ind = at_depth(ell, mean_intensity_independent(ell, r1, &ctl_ind))?;
                    let med = at_depth(ell, transmission_moment(1, ell))?;
                    Ok((sym, ind, med))
                })
                .collect::<Result<_>>()?;
            t.push_real("symmetric", rows.iter().map(|r| r.0).collect());
            t.push_real("independent", rows.iter().map(|r| r.1).collect());
            t.push_real("medium_mean_intensity", rows.iter().map(|r| r.2).collect());
            t.push_real("barrier_intensity", vec![t1_sq; cfg.grid.len()]);
        }
    }
    Ok(t)
}

/// One synthetic multimode ensemble: empirical mean transmissivity with
/// its standard error, the first order prediction built from the same
/// draws' reflection moments, and the independent-halves value.
pub struct WaveguideEnsemble {
    pub bare: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub first_order: f64,
    pub independent: f64,
}

pub fn waveguide_ensemble(
    modes: usize,
    eps: f64,
    q: f64,
    draws: usize,
    seed_base: u64,
) -> Result<WaveguideEnsemble> {
    if draws < 2 {
        return Err(CliError::Config(format!(
            "ensemble needs at least 2 draws, got {draws}"
        )));
    }
    let b = BarrierModal::new(vec![q; modes])?;
    let bar = barrier_matrices_asymptotic(&b);
    let bare: f64 = (0..modes).map(|j| bar.t[(j, j)].norm_sqr()).sum();
    let per: Vec<(f64, DMatrix<f64>)> = (0..draws)
        .into_par_iter()
        .map(|i| -> Result<(f64, DMatrix<f64>)> {
            let s = sample_reflection_ensemble(modes, eps, seed_base + i as u64)?;
            let sys = system_transmission_matrix(&s, &bar)?;
            let m = DMatrix::from_fn(modes, modes, |l, mm| s.r[(l, mm)].norm_sqr());
            Ok((transmissivity(&sys), m))
        })
        .collect::<Result<_>>()?;
    // Sequential reduction in draw order keeps the numbers reproducible.
    let n = draws as f64;
    let empirical = per.iter().map(|p| p.0).sum::<f64>() / n;
    let var = per.iter().map(|p| (p.0 - empirical).powi(2)).sum::<f64>() / (n - 1.0);
    let mut m_emp = DMatrix::<f64>::zeros(modes, modes);
    for (_, m) in &per {
        m_emp += m;
    }
    m_emp /= n;
    Ok(WaveguideEnsemble {
        bare,
        empirical,
        std_error: (var / n).sqrt(),
        first_order: mean_transmissivity(&m_emp, &bar)?,
        independent: independent_mean_transmissivity(&m_emp, &bar)?,
    })
}

/// Sweep of the barrier strength: each grid entry is one ensemble of
/// `n_samples` draws with its own seed block, so rows are independent.
pub fn run_waveguide_suite(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut bare = Vec::new();
    let mut empirical = Vec::new();
    let mut se = Vec::new();
    let mut first = Vec::new();
    let mut indep = Vec::new();
    for (i, &q) in cfg.grid.iter().enumerate() {
        let base = cfg.seed + 1 + (i as u64) * 1_000_000;
        let ens = waveguide_ensemble(cfg.modes, cfg.eps, q, cfg.n_samples, base)?;
        bare.push(ens.bare);
        empirical.push(ens.empirical);
        se.push(ens.std_error);
        first.push(ens.first_order);
        indep.push(ens.independent);
    }
    let mut t = ResultTable::new();
    t.push_real("q", cfg.grid.clone());
    t.push_real("bare", bare);
    t.push_real("empirical", empirical);
    t.push_real("std_error", se);
    t.push_real("first_order", first);
    t.push_real("independent", indep);
    Ok(t)
}

/// Runs the whole validation suite and renders one row per criterion,
/// preceded by the zero-fluctuation smoke row. The boolean reports
/// whether every row passed.
pub fn run_validation(_cfg: &ExperimentConfig) -> Result<(ResultTable, bool)> {
    let mut outcomes = vec![crate::criteria::smoke_row()?];
    outcomes.extend(run_all_criteria()?);
    let all_pass = outcomes.iter().all(|o| o.pass);
    let mut t = ResultTable::new();
    t.push_text(
        "criterion",
        outcomes
            .iter()
            .map(|o| format!("{:02} {}", o.index, o.name))
            .collect(),
    );
    t.push_real("measured", outcomes.iter().map(|o| o.measured).collect());
    t.push_real("target", outcomes.iter().map(|o| o.target).collect());
    t.push_real("tolerance", outcomes.iter().map(|o| o.tolerance).collect());
    t.push_text(
        "verdict",
        outcomes
            .iter()
            .map(|o| if o.pass { "pass" } else { "FAIL" }.to_string())
            .collect(),
    );
    t.push_text("detail", outcomes.iter().map(|o| o.detail.clone()).collect());
    Ok((t, all_pass))
}
