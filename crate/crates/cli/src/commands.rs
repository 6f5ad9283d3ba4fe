//! One function per command, each producing the rows for a single `p`.

use gkw_core::evolution::{evolve_cdf, montecarlo_cdf};
use gkw_core::spectral::{
    bounds, lambda_by_power_with, lambda_by_ratio_with, spectrum_collocation, verify_sandwich, xi,
    EigenResult, DEFAULT_MAX_ITER,
};
use gkw_core::{FuncRep, MapParam, OperatorKind, OperatorMatrix, TruncationPolicy};

use crate::config::RunConfig;
use crate::output::Row;
use crate::CliError;

/// Grid used by the sandwich checks.
pub const SANDWICH_GRID: usize = 1001;

/// Abscissae of the Monte Carlo table.
pub const MC_POINTS: usize = 21;

/// Per-`p` state shared by the row builders.
pub struct Job<'a> {
    pub cfg: &'a RunConfig,
    pub param: MapParam,
    pub policy: TruncationPolicy,
}

impl<'a> Job<'a> {
    pub fn new(cfg: &'a RunConfig, p: u32) -> Result<Self, CliError> {
        let param = MapParam::new(p)?;
        let policy = TruncationPolicy {
            cutoff: cfg.cutoff,
            tail_correction: cfg.tail_correction,
            target_tol: cfg.tol,
        };
        policy.validate(&param)?;
        Ok(Self { cfg, param, policy })
    }

    pub fn p(&self) -> u32 {
        self.param.p()
    }

    pub fn row(&self, quantity: impl Into<String>, value: f64, n_or_dim: Option<u64>) -> Row {
        Row {
            p: self.p(),
            quantity: quantity.into(),
            value,
            n_or_dim,
            degree: self.cfg.degree,
            cutoff: self.cfg.cutoff,
            tol: self.cfg.tol,
            seed: None,
            pass: None,
        }
    }

    pub fn matrix(&self, kind: OperatorKind) -> Result<OperatorMatrix, CliError> {
        Ok(OperatorMatrix::square(
            kind,
            &self.param,
            self.cfg.degree,
            &self.policy,
        )?)
    }

    /// Ratio estimator from `f0(x) = x`.
    pub fn ratio(&self, u: &OperatorMatrix) -> Result<EigenResult, CliError> {
        let f0 = FuncRep::fit(|x| x, self.cfg.degree)?;
        Ok(lambda_by_ratio_with(
            u,
            &f0,
            DEFAULT_MAX_ITER,
            self.cfg.tol,
        )?)
    }

    /// Power iteration from `xi`.
    pub fn power(&self, v: &OperatorMatrix) -> Result<EigenResult, CliError> {
        let start = FuncRep::fit(|x| xi(&self.param, x), self.cfg.degree)?;
        Ok(lambda_by_power_with(
            v,
            &start,
            DEFAULT_MAX_ITER,
            self.cfg.tol,
        )?)
    }
}

pub fn lambda(job: &Job) -> Result<Vec<Row>, CliError> {
    let ratio = job.ratio(&job.matrix(OperatorKind::U)?)?;
    let power = job.power(&job.matrix(OperatorKind::V)?)?;
    let (v, w) = bounds(&job.param);
    Ok(vec![
        job.row("lambda", ratio.lambda, Some(ratio.iterations as u64)),
        job.row("lambda_power", power.lambda, Some(power.iterations as u64)),
        job.row("residual", ratio.residual, Some(ratio.iterations as u64)),
        job.row(
            "residual_power",
            power.residual,
            Some(power.iterations as u64),
        ),
        job.row(
            "contraction_ratio",
            power.contraction_ratio,
            Some(power.iterations as u64),
        ),
        job.row("v_p", v, None),
        job.row("w_p", w, None),
    ])
}

pub fn bounds_rows(job: &Job) -> Result<Vec<Row>, CliError> {
    let (v, w) = bounds(&job.param);
    Ok(vec![job.row("v_p", v, None), job.row("w_p", w, None)])
}

pub fn sandwich(job: &Job) -> Result<Vec<Row>, CliError> {
    let r = verify_sandwich(&job.param, SANDWICH_GRID, job.cfg.degree, &job.policy)?;
    let n = Some(SANDWICH_GRID as u64);
    Ok(vec![
        job.row("min_ratio", r.min_ratio, n),
        job.row("max_ratio", r.max_ratio, n),
        job.row("v_p", r.v_p, None),
        job.row("w_p", r.w_p, None),
        job.row("sandwich_pass", if r.pass { 1.0 } else { 0.0 }, n),
    ])
}

pub fn evolve(job: &Job) -> Result<Vec<Row>, CliError> {
    let phi0 = FuncRep::fit(|x| x, job.cfg.degree)?;
    let t = evolve_cdf(
        &job.param,
        &phi0,
        job.cfg.steps,
        job.cfg.degree,
        &job.policy,
    )?;
    let sups = t.sup_deltas();
    let mut rows = Vec::with_capacity(3 * sups.len());
    for (k, s) in sups.iter().enumerate() {
        rows.push(job.row("sup_delta", *s, Some(k as u64)));
    }
    for (k, d) in t.delta.iter().enumerate() {
        rows.push(job.row("delta_half", d.at(0.5), Some(k as u64)));
    }
    for (k, m) in t.mass_defects.iter().enumerate() {
        rows.push(job.row("mass_defect", *m, Some(k as u64 + 1)));
    }
    Ok(rows)
}

pub fn spectrum(job: &Job) -> Result<Vec<Row>, CliError> {
    let s = spectrum_collocation(&job.param, job.cfg.degree, &job.policy)?;
    let mut rows = Vec::new();
    for (i, (&re, &ok)) in s.eigenvalues.iter().zip(&s.reliable).enumerate() {
        if ok {
            rows.push(job.row("eigenvalue", re, Some(i as u64 + 1)));
        }
    }
    for (i, r) in s.conjecture_ratios.iter().enumerate() {
        rows.push(job.row("conjecture_ratio_probe", *r, Some(i as u64 + 1)));
    }
    Ok(rows)
}

pub fn montecarlo(job: &Job) -> Result<Vec<Row>, CliError> {
    let seed = job
        .cfg
        .seed
        .ok_or_else(|| CliError::Usage("montecarlo requires --seed".into()))?;
    let xs: Vec<f64> = (0..MC_POINTS)
        .map(|i| i as f64 / (MC_POINTS - 1) as f64)
        .collect();
    let mc = montecarlo_cdf(&job.param, job.cfg.steps, job.cfg.samples, seed, &xs)?;
    let n = Some(job.cfg.steps as u64);
    let mut rows = Vec::with_capacity(2 * xs.len());
    for ((x, v), e) in xs.iter().zip(&mc.values).zip(&mc.std_errors) {
        rows.push(Row {
            seed: Some(seed),
            ..job.row(format!("mc_cdf@{x}"), *v, n)
        });
        rows.push(Row {
            seed: Some(seed),
            ..job.row(format!("mc_stderr@{x}"), *e, n)
        });
    }
    Ok(rows)
}
