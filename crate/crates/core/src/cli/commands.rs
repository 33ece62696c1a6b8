use std::path::{Path, PathBuf};

use serde::Serialize;

use consensus_kinetics::calibration::{calibrate, CalibrationConfig, CalibrationProblem, CalibrationResult};
use consensus_kinetics::distribution::{
    moments_of, neumann_solve, particle_simulate, write_ensemble_csv, write_grid_csv, GridDistribution, NeumannConfig,
    ParticleConfig, ParticleEnsemble, Sidecar,
};
use consensus_kinetics::econometrics::{
    adf_test, arch_lm, breusch_godfrey, default_max_lag, engle_granger, granger_block_test, half_life, jarque_bera,
    johansen, var_lag_select, vecm_fit, vecm_to_var, AdfResult, DeterministicSpec, EngleGrangerOptions, LagBlock,
    LagRule, Level, Variable,
};
use consensus_kinetics::evaluation::{baseline_cointegration_forecast, report};
use consensus_kinetics::kinetic::{
    sentiment_closed_form, uniform_grid, variance_solve, ForcingPath, KineticParams, ParamsDocument, VarianceMethod,
    VarianceVariant,
};
use consensus_kinetics::timeseries::{
    align, synth_cointegrated_pair, synth_gbm, synth_sentiment, SplitSpec, TimeSeries,
};
use consensus_kinetics::{Error, Result};

use super::args::*;
use super::output::{print_json, write_json, write_table, Outputs};

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn load(path: &Path) -> Result<TimeSeries> {
    TimeSeries::load_csv(path, "date", "value")
}

fn maybe_log(ts: TimeSeries, log: bool) -> Result<TimeSeries> {
    if log {
        ts.log_series()
    } else {
        Ok(ts)
    }
}

fn level(l: LevelArg) -> Level {
    match l {
        LevelArg::One => Level::OnePercent,
        LevelArg::Five => Level::FivePercent,
        LevelArg::Ten => Level::TenPercent,
    }
}

fn lag_rule(r: LagRuleArg) -> LagRule {
    match r {
        LagRuleArg::Aic => LagRule::Aic,
        LagRuleArg::Fixed => LagRule::Fixed,
    }
}

fn model_params(m: &ModelParamArgs) -> Result<(KineticParams, f64)> {
    match &m.params {
        Some(path) => {
            let doc = ParamsDocument::load(path)?;
            Ok((doc.params()?, doc.dt_per_observation))
        }
        None => {
            if !(m.dt > 0.0) {
                return Err(Error::InvalidTimeStep(format!("dt = {}", m.dt)));
            }
            Ok((KineticParams::new(m.q, m.beta, m.delta, m.alpha)?, m.dt))
        }
    }
}

/// Prints an econometric result and optionally stores it with a manifest.
fn emit<T: Serialize, A: Serialize>(name: &str, value: &T, out: &EconOut, args: &A) -> Result<()> {
    print_json(value)?;
    if let Some(dir) = &out.out {
        let mut outputs = Outputs::new(dir)?;
        write_json(&outputs.path(&format!("{name}.json")), value)?;
        outputs.finish(name, args)?;
    }
    Ok(())
}

fn pair(input: &PairInput) -> Result<(TimeSeries, TimeSeries)> {
    let y = maybe_log(load(&input.consensus)?, input.log)?;
    let z = maybe_log(load(&input.index)?, input.log)?;
    align(&y, &z)
}

/// Training part of the aligned data, or all of it without a boundary.
fn training(ts: &TimeSeries, train_end: Option<chrono::NaiveDate>) -> Result<TimeSeries> {
    match train_end {
        Some(d) => Ok(ts.split(SplitSpec { boundary_date: d })?.0),
        None => Ok(ts.clone()),
    }
}

fn testing(ts: &TimeSeries, train_end: Option<chrono::NaiveDate>) -> Result<TimeSeries> {
    match train_end {
        Some(d) => Ok(ts.split(SplitSpec { boundary_date: d })?.1),
        None => Ok(ts.clone()),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Synth(cmd) => synth(cmd),
        Command::Adf(a) => {
            let ts = maybe_log(load(&a.input)?, a.log)?;
            let spec = match a.spec {
                SpecArg::None => DeterministicSpec::None,
                SpecArg::Constant => DeterministicSpec::Constant,
                SpecArg::Trend => DeterministicSpec::Trend,
            };
            let max_lag = a.max_lag.unwrap_or_else(|| default_max_lag(ts.len()));
            let r: AdfResult = adf_test(ts.values(), spec, max_lag, lag_rule(a.lag_rule))?;
            #[derive(Serialize)]
            struct Out<'a> {
                #[serde(flatten)]
                result: &'a AdfResult,
                level: Level,
                reject: bool,
            }
            let lvl = level(a.level);
            emit("adf", &Out { result: &r, level: lvl, reject: r.reject_at.get(lvl) }, &a.out, a)
        }
        Command::Eg(a) => {
            let (y, z) = pair(&a.input)?;
            let options = EngleGrangerOptions {
                level: level(a.level),
                lag_rule: lag_rule(a.lag_rule),
                max_lag: a.max_lag,
            };
            let r = engle_granger(&y, &z, options)?;
            #[derive(Serialize)]
            struct Out<'a> {
                longrun_slope: f64,
                longrun_intercept: f64,
                slope_std_error: f64,
                intercept_std_error: f64,
                r_squared: f64,
                n_obs: usize,
                residual_adf: &'a AdfResult,
                level: Level,
                cointegrated: bool,
            }
            let out = Out {
                longrun_slope: r.longrun_slope,
                longrun_intercept: r.longrun_intercept,
                slope_std_error: r.regression.std_errors[0],
                intercept_std_error: r.regression.std_errors[1],
                r_squared: r.regression.r_squared,
                n_obs: r.regression.n_obs,
                residual_adf: &r.residual_adf,
                level: r.level,
                cointegrated: r.cointegrated,
            };
            emit("eg", &out, &a.out, a)
        }
        Command::Lags(a) => {
            let (y, z) = pair(&a.input)?;
            emit("lags", &var_lag_select(&y, &z, a.p_max)?, &a.out, a)
        }
        Command::Johansen(a) => {
            let (y, z) = pair(&a.input)?;
            emit("johansen", &johansen(&y, &z, a.lags, level(a.level))?, &a.out, a)
        }
        Command::Vecm(a) => {
            let (y, z) = pair(&a.input)?;
            let fit = vecm_fit(&y, &z, a.lags, a.rank)?;
            let granger = if a.lags > 0 {
                Some([
                    granger_block_test(&fit, Variable::Y, LagBlock::Other)?,
                    granger_block_test(&fit, Variable::Z, LagBlock::Other)?,
                ])
            } else {
                None
            };
            #[derive(Serialize)]
            struct Out<'a, G: Serialize, V: Serialize> {
                fit: &'a consensus_kinetics::econometrics::VecmFit,
                /// Index lags in the consensus equation, consensus lags in the index equation.
                granger: Option<G>,
                level_var: V,
            }
            emit("vecm", &Out { fit: &fit, granger, level_var: vecm_to_var(&fit) }, &a.out, a)
        }
        Command::Diagnose(a) => {
            let e = load(&a.input)?;
            let results = [
                breusch_godfrey(e.values(), &[], a.lags)?,
                jarque_bera(e.values())?,
                arch_lm(e.values(), a.lags)?,
            ];
            emit("diagnose", &results, &a.out, a)
        }
        Command::Halflife(a) => {
            let h = half_life(a.gamma)?;
            #[derive(Serialize)]
            struct Out {
                gamma: f64,
                half_life: f64,
                periods: f64,
            }
            emit("halflife", &Out { gamma: a.gamma, half_life: h, periods: h.ceil() }, &a.out, a)
        }
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Forecast(a) => cmd_forecast(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn synth(cmd: &SynthCommand) -> Result<()> {
    match cmd {
        SynthCommand::Gbm(a) => {
            let ts = synth_gbm(a.x0, a.mu, a.sigma, a.n, a.dt, a.common.seed)?.relabel("index");
            let mut out = Outputs::new(&a.common.out)?;
            ts.save_csv(out.path("gbm.csv"))?;
            out.finish("synth gbm", a)
        }
        SynthCommand::Pair(a) => {
            let (y, z) = synth_cointegrated_pair(a.slope, a.intercept, a.rho, a.sigma_u, a.sigma_z, a.n, a.common.seed)?;
            let mut out = Outputs::new(&a.common.out)?;
            y.save_csv(out.path("y.csv"))?;
            z.save_csv(out.path("z.csv"))?;
            out.finish("synth pair", a)
        }
        SynthCommand::Sentiment(a) => {
            let index = load(&a.index)?;
            let (params, dt) = model_params(&a.model)?;
            let s0 = a.s0.unwrap_or_else(|| params.target(index.values()[0]));
            let s = synth_sentiment(&params, &index, dt, s0, a.noise, a.common.seed)?;
            let mut out = Outputs::new(&a.common.out)?;
            s.save_csv(out.path("consensus.csv"))?;
            out.finish("synth sentiment", a)
        }
    }
}

fn cmd_calibrate(a: &CalibrateArgs) -> Result<()> {
    let index = load(&a.data.index)?;
    let consensus = load(&a.data.consensus)?;
    let (index, consensus) = align(&index, &consensus)?;
    let (index, consensus) = (training(&index, a.data.train_end)?, training(&consensus, a.data.train_end)?);
    let mut config = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str::<CalibrationConfig>(&text)?
        }
        None => CalibrationConfig::default(),
    };
    config.seed = a.common.seed;
    if let Some(b) = a.budget {
        config.budget = b;
    }
    if let Some(q) = a.q_fixed {
        config.q_fixed = q;
    }
    let s0 = a.s0.unwrap_or(consensus.values()[0]);
    let problem = CalibrationProblem::new(&index, &consensus, s0, a.dt)?;
    let result = calibrate(&problem, &config)?;

    let mut out = Outputs::new(&a.common.out)?;
    write_json(&out.path("calibration.json"), &result)?;
    write_json(&out.path("params.json"), &ParamsDocument::new(result.params, a.dt))?;
    problem.model_series(&result.params)?.save_csv(out.path("fitted.csv"))?;
    #[derive(Serialize)]
    struct Resolved<'a> {
        args: &'a CalibrateArgs,
        config: CalibrationConfig,
        s0: f64,
    }
    out.finish("calibrate", &Resolved { args: a, config, s0 })?;
    if !result.converged {
        return Err(Error::NotConverged {
            iterations: result.n_evaluations,
            last_norm: result.objective,
        });
    }
    Ok(())
}

fn cmd_forecast(a: &ForecastArgs) -> Result<()> {
    let params_path: PathBuf = match &a.params {
        Some(p) => p.clone(),
        None => {
            let p = a.common.out.join("params.json");
            if !p.exists() {
                return Err(usage("forecast needs --params or a calibration in the output directory"));
            }
            p
        }
    };
    let doc = ParamsDocument::load(&params_path)?;
    let params = doc.params()?;
    let index = load(&a.data.index)?;
    let consensus = load(&a.data.consensus)?;
    let (index, consensus) = align(&index, &consensus)?;
    let s0 = a.s0.unwrap_or(consensus.values()[0]);
    let forcing = ForcingPath::from_series(&index, doc.dt_per_observation)?;
    let path = sentiment_closed_form(&params, &forcing, s0, &forcing.knot_times())?;
    let full = TimeSeries::new(index.dates().to_vec(), path.s_values, "forecast")?;
    let forecast = testing(&full, a.data.train_end)?;
    let mut out = Outputs::new(&a.common.out)?;
    forecast.save_csv(out.path("forecast.csv"))?;
    #[derive(Serialize)]
    struct Resolved<'a> {
        args: &'a ForecastArgs,
        params: ParamsDocument,
        s0: f64,
    }
    out.finish("forecast", &Resolved { args: a, params: doc, s0 })
}

fn cmd_report(a: &ReportArgs) -> Result<()> {
    let dir = &a.common.out;
    let calib_path = a.calibration.clone().unwrap_or_else(|| dir.join("calibration.json"));
    if !calib_path.exists() {
        return Err(usage("report needs --calibration or a calibration in the output directory"));
    }
    let text = std::fs::read_to_string(&calib_path).map_err(|e| Error::io(&calib_path, e))?;
    let calib: CalibrationResult = serde_json::from_str(&text)?;
    let forecast_path = a.forecast.clone().or_else(|| {
        let p = dir.join("forecast.csv");
        p.exists().then_some(p)
    });
    let forecast = forecast_path.as_deref().map(load).transpose()?;

    let index = load(&a.data.index)?;
    let consensus = load(&a.data.consensus)?;
    let (index, consensus) = align(&index, &consensus)?;
    let (train_x, train_s) = (training(&index, a.data.train_end)?, training(&consensus, a.data.train_end)?);
    let eg = engle_granger(&train_s.log_series()?, &train_x.log_series()?, EngleGrangerOptions::default())?;
    let test_x = testing(&index, a.data.train_end)?;
    let measured = testing(&consensus, a.data.train_end)?;
    let baseline = baseline_cointegration_forecast(&eg, &test_x)?;

    let mut out = Outputs::new(dir)?;
    let mut doc = report(&calib, forecast.as_ref(), &measured, Some(&baseline), dir.join("plots"))?;
    for f in &mut doc.files {
        *f = format!("plots/{f}");
        out.record(f.clone());
    }
    write_json(&out.path("report.json"), &doc)?;
    out.finish("report", a)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let (params, dt) = model_params(&a.model)?;
    let forcing = match &a.index {
        Some(path) => ForcingPath::from_series(&load(path)?, dt)?,
        None => ForcingPath::constant(a.x0, a.horizon.unwrap_or(1.0))?,
    };
    let horizon = a.horizon.unwrap_or_else(|| if a.index.is_some() { forcing.t_end() } else { 1.0 });
    forcing.check_covers(horizon)?;
    if a.records == 0 {
        return Err(usage("--records must be positive"));
    }
    let s0 = a.s0.unwrap_or_else(|| forcing.value_at(0.0));
    let times = uniform_grid(horizon, a.records);
    let variant = match a.variant {
        VariantArg::Paper => VarianceVariant::Paper,
        VariantArg::Corrected => VarianceVariant::Corrected,
    };
    let mut out = Outputs::new(&a.common.out)?;
    let side = |time: f64| Sidecar {
        time,
        params,
        seed: Some(a.common.seed),
    };
    match a.engine {
        Engine::ClosedForm => {
            // fine grid so the variance source is resolved between records
            let per_record = ((horizon / a.records as f64) / a.step).ceil().max(1.0) as usize;
            let fine = uniform_grid(horizon, a.records * per_record);
            let s = sentiment_closed_form(&params, &forcing, s0, &fine)?;
            let v0 = (a.width * s0).powi(2);
            let v = variance_solve(&params, &s, &forcing, v0, variant, VarianceMethod::ClosedForm)?;
            let rows = (0..=a.records).map(|i| {
                let j = i * per_record;
                vec![fine[j], s.s_values[j], v.v_values[j]]
            });
            write_table(&out.path("moments.csv"), &["t", "mean", "variance"], rows)?;
        }
        Engine::Particle => {
            let ens = ParticleEnsemble::lognormal(a.particles, s0, a.width, a.common.seed)?;
            let mut config = ParticleConfig::new(times, a.common.seed);
            config.dt = a.step;
            let run = particle_simulate(&params, &forcing, &ens, &config)?;
            for w in &run.warnings {
                eprintln!("warning: {w}");
            }
            let rows = (0..run.times.len()).map(|i| {
                vec![run.times[i], run.mean[i], run.variance[i], run.mean_se[i], run.variance_se[i]]
            });
            write_table(&out.path("moments.csv"), &["t", "mean", "variance", "mean_se", "variance_se"], rows)?;
            write_ensemble_csv(&run.final_ensemble, out.path("ensemble.csv"), &side(horizon))?;
            out.record("ensemble.json".into());
        }
        Engine::Neumann => {
            let x_max = GridDistribution::default_x_max(forcing.max_value().max(s0), &params);
            let f_in = GridDistribution::lognormal(s0, a.width, x_max, a.grid)?;
            let config = NeumannConfig {
                horizon,
                tol: a.tol,
                n_max: 500,
                n_slices: a.slices,
            };
            let sol = neumann_solve(&params, &forcing, &f_in, &config)?;
            let moments = sol.slices.iter().map(moments_of).collect::<Result<Vec<_>>>()?;
            let rows = sol
                .slices
                .iter()
                .zip(&moments)
                .map(|(s, m)| vec![s.time(), m.mean, m.variance, m.m0]);
            write_table(&out.path("moments.csv"), &["t", "mean", "variance", "mass"], rows)?;
            write_grid_csv(sol.terminal(), out.path("density.csv"), &side(horizon))?;
            out.record("density.json".into());
            #[derive(Serialize)]
            struct Summary<'a> {
                term_norms: &'a [f64],
                residual: f64,
                initial_mass: f64,
                max_lost_mass: f64,
            }
            let max_lost = sol.lost_mass.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            write_json(
                &out.path("neumann.json"),
                &Summary {
                    term_norms: &sol.term_norms,
                    residual: sol.residual,
                    initial_mass: sol.initial_mass,
                    max_lost_mass: max_lost,
                },
            )?;
        }
    }
    out.finish("simulate", a)
}
