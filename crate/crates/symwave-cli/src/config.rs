//! Experiment configuration: defaults per experiment kind, a `key = value`
//! file layer, and command-line overrides, merged in that order.

use std::path::{Path, PathBuf};

use crate::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Comp1,
    Comp2,
    Comp3,
}

impl FigureId {
    pub fn label(self) -> &'static str {
        match self {
            FigureId::Comp1 => "comp1",
            FigureId::Comp2 => "comp2",
            FigureId::Comp3 => "comp3",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Moments,
    LayeredSeries,
    LayeredMc,
    Figure(FigureId),
    WaveguideSuite,
    Validate,
}

impl ExperimentKind {
    pub fn label(self) -> String {
        match self {
            ExperimentKind::Moments => "moments".into(),
            ExperimentKind::LayeredSeries => "layered_series".into(),
            ExperimentKind::LayeredMc => "layered_mc".into(),
            ExperimentKind::Figure(id) => format!("figure:{}", id.label()),
            ExperimentKind::WaveguideSuite => "waveguide_suite".into(),
            ExperimentKind::Validate => "validate".into(),
        }
    }
}

/// Effective parameter set of one run. `grid` is the sweep variable:
/// medium depth in localization lengths for the layered experiments,
/// barrier strength for the waveguide suite. Every entry must sit in
/// (0, 10] except for the moment experiment, which accepts 0 (the
/// normalization point).
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub grid: Vec<f64>,
    /// Barrier transmitted intensity |T1|^2 for the layered experiments.
    pub t1_sq: f64,
    /// Highest transmission moment order in the moment experiment.
    pub n_max: usize,
    /// Monte Carlo realizations or ensemble draws.
    pub n_samples: usize,
    pub seed: u64,
    /// Relative tolerance of the series evaluations.
    pub rel_tol: f64,
    /// Correlation length of the fluctuations (medium depth is 1).
    pub corr_length: f64,
    /// Background wavenumber of the Monte Carlo runs.
    pub wavenumber: f64,
    /// Reflection scale of the synthetic waveguide ensemble.
    pub eps: f64,
    /// Propagating mode count of the waveguide suite.
    pub modes: usize,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for one experiment kind. The layered grids cover the
    /// figure range 0.1..6.0 in steps of 0.1; the Monte Carlo grid is
    /// shorter because each point costs an ensemble; the waveguide grid
    /// sweeps barrier strength across the sign change at 1.
    pub fn for_kind(kind: ExperimentKind) -> Self {
        let dense: Vec<f64> = (1..=60).map(|i| i as f64 * 0.1).collect();
        let grid = match kind {
            ExperimentKind::LayeredMc => vec![0.5, 1.0, 2.0],
            ExperimentKind::WaveguideSuite => vec![0.3, 1.0, 3.0],
            _ => dense,
        };
        Self {
            kind,
            grid,
            t1_sq: 0.4,
            n_max: 3,
            n_samples: 10_000,
            seed: 0,
            rel_tol: 1e-6,
            corr_length: 0.01,
            wavenumber: 60.0,
            eps: 0.04,
            modes: 4,
            out: None,
        }
    }

    /// Merges a `key = value` file over the defaults. Unknown keys are
    /// rejected so typos cannot silently fall back to defaults.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let parsed: toml::Table = text
            .parse()
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;

        let mut grid_range = [None::<f64>; 3];
        for (key, value) in &parsed {
            match key.as_str() {
                "grid" => self.grid = float_array(value, key)?,
                "grid_start" => grid_range[0] = Some(float_value(value, key)?),
                "grid_step" => grid_range[1] = Some(float_value(value, key)?),
                "grid_stop" => grid_range[2] = Some(float_value(value, key)?),
                "t1_sq" => self.t1_sq = float_value(value, key)?,
                "q" => {
                    let q = float_value(value, key)?;
                    if !(q.is_finite() && q >= 0.0) {
                        return Err(CliError::Config(format!("q = {q} must be nonnegative")));
                    }
                    self.t1_sq = 1.0 / (1.0 + q * q);
                }
                "n_max" => self.n_max = int_value(value, key)? as usize,
                "n_samples" | "samples" => self.n_samples = int_value(value, key)? as usize,
                "seed" => self.seed = int_value(value, key)?,
                "tol" | "rel_tol" => self.rel_tol = float_value(value, key)?,
                "corr_length" => self.corr_length = float_value(value, key)?,
                "wavenumber" => self.wavenumber = float_value(value, key)?,
                "eps" => self.eps = float_value(value, key)?,
                "modes" => self.modes = int_value(value, key)? as usize,
                "out" => {
                    let s = value.as_str().ok_or_else(|| {
                        CliError::Config(format!("key `{key}` expects a string"))
                    })?;
                    self.out = Some(PathBuf::from(s));
                }
                other => {
                    return Err(CliError::Config(format!(
                        "unknown configuration key `{other}`"
                    )))
                }
            }
        }

        match grid_range {
            [None, None, None] => {}
            [Some(start), Some(step), Some(stop)] => {
                if !(step > 0.0 && stop >= start) {
                    return Err(CliError::Config(format!(
                        "bad grid range {start}..{stop} step {step}"
                    )));
                }
                let count = ((stop - start) / step).round() as usize + 1;
                self.grid = (0..count).map(|i| start + i as f64 * step).collect();
            }
            _ => {
                return Err(CliError::Config(
                    "grid_start, grid_step and grid_stop must be given together".into(),
                ))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(CliError::Config("empty grid".into()));
        }
        let zero_ok = self.kind == ExperimentKind::Moments;
        for &x in &self.grid {
            let lower_ok = x > 0.0 || (zero_ok && x == 0.0);
            if !(x.is_finite() && lower_ok && x <= 10.0) {
                return Err(CliError::Config(format!(
                    "grid entry {x} outside the supported range (0, 10]"
                )));
            }
        }
        if !(self.t1_sq > 0.0 && self.t1_sq <= 1.0) {
            return Err(CliError::Config(format!(
                "t1_sq = {} outside (0, 1]",
                self.t1_sq
            )));
        }
        if self.n_max == 0 || self.n_max > 12 {
            return Err(CliError::Config(format!(
                "n_max = {} outside 1..=12",
                self.n_max
            )));
        }
        if self.n_samples == 0 {
            return Err(CliError::Config("n_samples must be positive".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 0.1) {
            return Err(CliError::Config(format!(
                "rel_tol = {} outside (0, 0.1)",
                self.rel_tol
            )));
        }
        if !(self.corr_length > 0.0 && self.corr_length < 1.0) {
            return Err(CliError::Config(format!(
                "corr_length = {} outside (0, 1)",
                self.corr_length
            )));
        }
        if !(self.wavenumber > 0.0 && self.wavenumber.is_finite()) {
            return Err(CliError::Config(format!(
                "wavenumber = {} must be positive",
                self.wavenumber
            )));
        }
        if !(0.0..0.3).contains(&self.eps) {
            return Err(CliError::Config(format!(
                "eps = {} outside [0, 0.3)",
                self.eps
            )));
        }
        if self.modes == 0 || self.modes > 64 {
            return Err(CliError::Config(format!(
                "modes = {} outside 1..=64",
                self.modes
            )));
        }
        Ok(())
    }

    /// Canonical text form of every value that influences the numbers.
    /// The output path is deliberately excluded; two runs writing to
    /// different files must hash alike.
    pub fn canonical_string(&self) -> String {
        let grid = self
            .grid
            .iter()
            .map(|x| format!("{x:?}"))
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "corr_length={:?}\neps={:?}\ngrid={}\nkind={}\nmodes={}\nn_max={}\nn_samples={}\nrel_tol={:?}\nseed={}\nt1_sq={:?}\nwavenumber={:?}\n",
            self.corr_length,
            self.eps,
            grid,
            self.kind.label(),
            self.modes,
            self.n_max,
            self.n_samples,
            self.rel_tol,
            self.seed,
            self.t1_sq,
            self.wavenumber,
        )
    }

    pub fn config_hash(&self) -> u64 {
        fnv1a64(self.canonical_string().as_bytes())
    }
}

/// 64-bit FNV-1a over the canonical configuration text; stable across
/// platforms and cheap enough to recompute on every run.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn float_value(v: &toml::Value, key: &str) -> Result<f64> {
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .ok_or_else(|| CliError::Config(format!("key `{key}` expects a number")))
}

fn int_value(v: &toml::Value, key: &str) -> Result<u64> {
    match v.as_integer() {
        Some(i) if i >= 0 => Ok(i as u64),
        _ => Err(CliError::Config(format!(
            "key `{key}` expects a nonnegative integer"
        ))),
    }
}

fn float_array(v: &toml::Value, key: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| CliError::Config(format!("key `{key}` expects an array")))?;
    arr.iter().map(|x| float_value(x, key)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_for_every_kind() {
        for kind in [
            ExperimentKind::Moments,
            ExperimentKind::LayeredSeries,
            ExperimentKind::LayeredMc,
            ExperimentKind::Figure(FigureId::Comp1),
            ExperimentKind::WaveguideSuite,
            ExperimentKind::Validate,
        ] {
            ExperimentConfig::for_kind(kind).validate().unwrap();
        }
    }

    #[test]
    fn hash_tracks_values_but_not_output_path() {
        let mut a = ExperimentConfig::for_kind(ExperimentKind::LayeredSeries);
        let mut b = a.clone();
        b.out = Some(PathBuf::from("/tmp/other.csv"));
        assert_eq!(a.config_hash(), b.config_hash());
        a.seed = 1;
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn range_keys_build_the_grid() {
        let mut cfg = ExperimentConfig::for_kind(ExperimentKind::LayeredSeries);
        let dir = std::env::temp_dir().join("symwave-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("range.toml");
        std::fs::write(&path, "grid_start = 0.5\ngrid_step = 0.5\ngrid_stop = 2.0\n").unwrap();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.grid.len(), 4);
        assert!((cfg.grid[3] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut cfg = ExperimentConfig::for_kind(ExperimentKind::Moments);
        let dir = std::env::temp_dir().join("symwave-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("unknown.toml");
        std::fs::write(&path, "gird = [1.0]\n").unwrap();
        assert!(cfg.apply_file(&path).is_err());
    }

    #[test]
    fn barrier_strength_key_sets_the_intensity() {
        let mut cfg = ExperimentConfig::for_kind(ExperimentKind::LayeredSeries);
        let dir = std::env::temp_dir().join("symwave-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("strength.toml");
        std::fs::write(&path, "q = 3.0\n").unwrap();
        cfg.apply_file(&path).unwrap();
        assert!((cfg.t1_sq - 0.1).abs() < 1e-12);
    }
}
