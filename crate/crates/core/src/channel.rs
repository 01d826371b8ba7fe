//! Unit conversions and the Monte-Carlo channel model.
//!
//! All solver math runs in linear units (watts, Hz, bit/s); decibel values
//! only appear at the configuration boundary. Channel gains come from a
//! classic urban macro model: users drop uniformly over a square cell with
//! the base station at the center, path loss `128.1 + 37.6 log10(d_km)` dB,
//! and log-normal shadowing added in the dB domain.
//!
//! Placement is reproducible: a seeded counter-mode generator is used, and
//! each Monte-Carlo trial reads from its own stream (stream id = trial
//! index), so trial `t` sees the same channel no matter how many trials run
//! before it or which scheme consumes it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Users closer to the base station than this are treated as being at this
/// distance, keeping the path-loss model out of its near-field singularity.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// Converts a power in dBm to watts: `10^((x - 30) / 10)`.
///
/// # Example
///
/// ```
/// use rsma_core::channel::dbm_to_watt;
/// assert_eq!(dbm_to_watt(30.0), 1.0);
/// assert!((dbm_to_watt(-104.0) - 3.9811e-14).abs() / 3.9811e-14 < 1e-4);
/// ```
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts a power in watts to dBm. Requires a positive power.
pub fn watt_to_dbm(watt: f64) -> Result<f64> {
    if !(watt > 0.0) {
        return Err(Error::Domain(format!(
            "watt_to_dbm needs a positive power, got {watt}"
        )));
    }
    Ok(10.0 * watt.log10() + 30.0)
}

/// Converts a dimensionless ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a positive linear ratio to dB.
pub fn linear_to_db(linear: f64) -> Result<f64> {
    if !(linear > 0.0) {
        return Err(Error::Domain(format!(
            "linear_to_db needs a positive ratio, got {linear}"
        )));
    }
    Ok(10.0 * linear.log10())
}

/// Geometry, propagation constants, and the base seed for user placement.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    /// Side length of the square cell in meters; the base station sits at the
    /// center of the square.
    pub cell_side_m: f64,
    /// Path-loss intercept in dB (at 1 km).
    pub pathloss_a_db: f64,
    /// Path-loss slope in dB per decade of distance.
    pub pathloss_b_db: f64,
    /// Standard deviation of log-normal shadowing, in dB.
    pub shadow_sigma_db: f64,
    /// Base seed; combined with a per-trial stream id in [`drop_users_stream`].
    ///
    /// [`drop_users_stream`]: ChannelParams::drop_users_stream
    pub seed: u64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            cell_side_m: 300.0,
            pathloss_a_db: 128.1,
            pathloss_b_db: 37.6,
            shadow_sigma_db: 4.0,
            seed: 0,
        }
    }
}

impl ChannelParams {
    fn validate(&self) -> Result<()> {
        if !(self.cell_side_m > 0.0) {
            return Err(Error::Domain(format!(
                "cell side must be positive, got {}",
                self.cell_side_m
            )));
        }
        if !(self.shadow_sigma_db >= 0.0) {
            return Err(Error::Domain(format!(
                "shadowing sigma must be nonnegative, got {}",
                self.shadow_sigma_db
            )));
        }
        Ok(())
    }

    /// Linear channel power gain at distance `d_km` (kilometers) with an
    /// already-drawn shadowing term `shadow_db`.
    ///
    /// The gain is `10^(-(a + b log10(d_km) + shadow_db) / 10)`.
    pub fn pathloss_gain(&self, d_km: f64, shadow_db: f64) -> Result<f64> {
        if !(d_km > 0.0) {
            return Err(Error::Domain(format!(
                "distance must be positive, got {d_km} km"
            )));
        }
        let pl_db = self.pathloss_a_db + self.pathloss_b_db * d_km.log10() + shadow_db;
        Ok(db_to_linear(-pl_db))
    }

    /// Drops `k` users on stream 0. See [`drop_users_stream`].
    ///
    /// [`drop_users_stream`]: ChannelParams::drop_users_stream
    pub fn drop_users(&self, k: usize) -> Result<Vec<f64>> {
        self.drop_users_stream(k, 0)
    }

    /// Drops `k` users uniformly over the cell and returns their channel
    /// gains sorted ascending (so index 0 is always the weakest user).
    ///
    /// Reproducibility contract: the generator is `ChaCha8Rng` seeded with
    /// `seed` and switched to stream `stream`; per user the draw order is
    /// x-coordinate, y-coordinate, shadowing. Distances are floored at
    /// [`MIN_DISTANCE_M`].
    pub fn drop_users_stream(&self, k: usize, stream: u64) -> Result<Vec<f64>> {
        self.validate()?;
        if k == 0 {
            return Err(Error::Domain("cannot drop zero users".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        let shadow = Normal::new(0.0, self.shadow_sigma_db)
            .map_err(|e| Error::Domain(format!("bad shadowing sigma: {e}")))?;
        let half = self.cell_side_m / 2.0;
        let mut gains = Vec::with_capacity(k);
        for _ in 0..k {
            let x: f64 = rng.gen_range(-half..half);
            let y: f64 = rng.gen_range(-half..half);
            let s = shadow.sample(&mut rng);
            let d_m = x.hypot(y).max(MIN_DISTANCE_M);
            gains.push(self.pathloss_gain(d_m / 1000.0, s)?);
        }
        gains.sort_by(|a, b| a.partial_cmp(b).expect("gains are finite"));
        Ok(gains)
    }
}
