//! Seeded synthetic series used as stand-ins for proprietary market data.
//!
//! Every generator is a pure function of its arguments. Each call seeds a
//! ChaCha stream from `seed`; independent components draw from separate
//! stream ids so adding draws to one never shifts the other.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::TimeSeries;
use crate::error::{Error, Result};
use crate::kinetic::{sentiment_closed_form, ForcingPath, KineticParams};

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// `n` consecutive weekdays starting at the first weekday on or after `start`.
pub fn trading_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d += Duration::days(1);
    }
    out
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2009, 5, 26).expect("valid date")
}

/// Geometric Brownian motion sampled every `dt` years.
pub fn synth_gbm(x0: f64, mu: f64, sigma: f64, n: usize, dt: f64, seed: u64) -> Result<TimeSeries> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(Error::InvalidParameter(format!("x0 must be positive, got {x0}")));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) || !mu.is_finite() {
        return Err(Error::InvalidParameter("mu must be finite and sigma nonnegative".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let mut rng = stream(seed, 0);
    let drift = (mu - 0.5 * sigma * sigma) * dt;
    let vol = sigma * dt.sqrt();
    let mut values = Vec::with_capacity(n);
    let mut x = x0;
    values.push(x);
    for _ in 1..n {
        let z: f64 = StandardNormal.sample(&mut rng);
        x *= (drift + vol * z).exp();
        values.push(x);
    }
    TimeSeries::new(trading_days(default_start(), n), values, "gbm")
}

/// A cointegrated pair: `z` is a Gaussian random walk and
/// `y = slope * z + intercept + u` with `u` a stationary AR(1).
pub fn synth_cointegrated_pair(
    slope: f64,
    intercept: f64,
    rho: f64,
    sigma_u: f64,
    sigma_z: f64,
    n: usize,
    seed: u64,
) -> Result<(TimeSeries, TimeSeries)> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("rho must lie in (-1, 1), got {rho}")));
    }
    if !(sigma_u >= 0.0 && sigma_u.is_finite()) || !(sigma_z > 0.0 && sigma_z.is_finite()) {
        return Err(Error::InvalidParameter(
            "sigma_u must be nonnegative and sigma_z positive".into(),
        ));
    }
    if !slope.is_finite() || !intercept.is_finite() {
        return Err(Error::InvalidParameter("slope and intercept must be finite".into()));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    let mut rng_z = stream(seed, 0);
    let mut rng_u = stream(seed, 1);
    // start u from its stationary distribution
    let stationary_sd = sigma_u / (1.0 - rho * rho).sqrt();
    let mut z = 0.0;
    let u0: f64 = StandardNormal.sample(&mut rng_u);
    let mut u = stationary_sd * u0;
    let mut ys = Vec::with_capacity(n);
    let mut zs = Vec::with_capacity(n);
    for t in 0..n {
        if t > 0 {
            let ez: f64 = StandardNormal.sample(&mut rng_z);
            let eu: f64 = StandardNormal.sample(&mut rng_u);
            z += sigma_z * ez;
            u = rho * u + sigma_u * eu;
        }
        zs.push(z);
        ys.push(slope * z + intercept + u);
    }
    let dates = trading_days(default_start(), n);
    Ok((
        TimeSeries::new(dates.clone(), ys, "y")?,
        TimeSeries::new(dates, zs, "z")?,
    ))
}

/// Consensus-like series: the closed-form sentiment driven by `index`, plus
/// Gaussian noise with standard deviation `noise_sigma * level`.
///
/// `dt` is the model time between consecutive observations of `index`.
pub fn synth_sentiment(
    params: &KineticParams,
    index: &TimeSeries,
    dt: f64,
    s0: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<TimeSeries> {
    if !(s0 > 0.0 && s0.is_finite()) {
        return Err(Error::InvalidParameter(format!("s0 must be positive, got {s0}")));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidParameter("noise_sigma must be nonnegative".into()));
    }
    params.validate()?;
    let forcing = ForcingPath::from_series(index, dt)?;
    let path = sentiment_closed_form(params, &forcing, s0, &forcing.knot_times())?;
    let mut rng = stream(seed, 0);
    let values = path
        .s_values
        .iter()
        .map(|s| {
            if noise_sigma == 0.0 {
                *s
            } else {
                let z: f64 = StandardNormal.sample(&mut rng);
                s * (1.0 + noise_sigma * z)
            }
        })
        .collect();
    TimeSeries::new(index.dates().to_vec(), values, "sentiment")
}
