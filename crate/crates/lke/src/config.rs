//! Command-line flags, config files and the resolved [`RunConfig`].

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use lke_core::measurement::DEFAULT_SHELL_COUNT;
use lke_core::{Axis, KernelParams, Tolerance};

use crate::error::CliError;
use crate::parallel::resolve_threads;

#[derive(Debug, Parser)]
#[command(name = "lke", version, about = "Localised energy-momentum eigenstate kernels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Two-body kernel psi(x, y) on a grid.
    Fig1,
    /// Two-body position density d(x) after tracing out y.
    Fig2,
    /// Three-body position density d(xx1, xx2) after tracing out y.
    Fig3,
    /// Run every invariant check and print a pass/fail table.
    Verify,
    /// Print the exact spin-state expansions.
    Spin,
    /// Post-measurement broadening curve and density slices.
    Nonlocal,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Fig1 => "fig1",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Verify => "verify",
            Command::Spin => "spin",
            Command::Nonlocal => "nonlocal",
        }
    }
}

/// Every flag is optional so that config-file values can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Momentum cutoff.
    #[arg(long, global = true)]
    pub k0: Option<f64>,
    /// Total energy.
    #[arg(long = "E", global = true)]
    pub energy: Option<f64>,
    /// Lower end of the x (fig3: xx1, nonlocal: slice) axis.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub y_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub y_max: Option<f64>,
    /// fig3 only: xx2 axis.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub xx2_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub xx2_max: Option<f64>,
    /// Grid spacing; also the y spacing unless --y-spacing is given.
    #[arg(long, global = true)]
    pub spacing: Option<f64>,
    #[arg(long, global = true)]
    pub y_spacing: Option<f64>,
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    #[arg(long, global = true)]
    pub max_subdivisions: Option<usize>,
    /// Output CSV path (default: `<command>.csv`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; falls back to LKE_THREADS, then one per core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// fig3 only: step 2 on xx1/xx2 and 0.5 on y.
    #[arg(long, global = true)]
    pub reduced: bool,
    /// nonlocal only: comma-separated measured residual energies.
    #[arg(long = "E-m", global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub measured: Vec<f64>,
    /// nonlocal only: points sampled on the energy shell.
    #[arg(long, global = true)]
    pub shell_count: Option<usize>,
    /// key=value file supplying defaults for any of the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Flags {
    /// Fills unset flags from `key=value` lines; flags already given win.
    ///
    /// Keys are the long flag names without dashes. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn merge_config_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| CliError::Usage(format!("config line {}: {key}: {what}", n + 1));
            let num = || value.parse::<f64>().map_err(|_| bad("not a number"));
            let count = || value.parse::<usize>().map_err(|_| bad("not a count"));
            fn fill<T>(slot: &mut Option<T>, v: T) {
                slot.get_or_insert(v);
            }
            match key {
                "k0" => fill(&mut self.k0, num()?),
                "E" => fill(&mut self.energy, num()?),
                "x-min" => fill(&mut self.x_min, num()?),
                "x-max" => fill(&mut self.x_max, num()?),
                "y-min" => fill(&mut self.y_min, num()?),
                "y-max" => fill(&mut self.y_max, num()?),
                "xx2-min" => fill(&mut self.xx2_min, num()?),
                "xx2-max" => fill(&mut self.xx2_max, num()?),
                "spacing" => fill(&mut self.spacing, num()?),
                "y-spacing" => fill(&mut self.y_spacing, num()?),
                "tol-abs" => fill(&mut self.tol_abs, num()?),
                "tol-rel" => fill(&mut self.tol_rel, num()?),
                "max-subdivisions" => fill(&mut self.max_subdivisions, count()?),
                "out" => fill(&mut self.out, PathBuf::from(value)),
                "threads" => fill(&mut self.threads, count()?),
                "shell-count" => fill(&mut self.shell_count, count()?),
                "reduced" => {
                    let on: bool = value.parse().map_err(|_| bad("expected true or false"))?;
                    self.reduced |= on;
                }
                "E-m" => {
                    if self.measured.is_empty() {
                        self.measured = value
                            .split(',')
                            .map(|s| s.trim().parse::<f64>())
                            .collect::<Result<_, _>>()
                            .map_err(|_| bad("not a number list"))?;
                    }
                }
                _ => return Err(bad("unknown key")),
            }
        }
        Ok(())
    }

    pub fn merge_config_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.merge_config_text(&text)
    }
}

/// Inclusive, evenly spaced range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub spacing: f64,
}

impl AxisSpec {
    pub const fn new(min: f64, max: f64, spacing: f64) -> Self {
        AxisSpec { min, max, spacing }
    }

    pub fn axis(&self, name: &str) -> Result<Axis, CliError> {
        Axis::new(self.min, self.max, self.spacing)
            .map_err(|e| CliError::Usage(format!("{name} axis [{}, {}] step {}: {e}", self.min, self.max, self.spacing)))
    }
}

/// Fully resolved parameters for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub k0: f64,
    pub energy: f64,
    /// fig1/fig2: x; fig3: xx1; nonlocal: the xx1 slice.
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub xx2: AxisSpec,
    pub tol: Tolerance,
    pub out: PathBuf,
    pub threads: usize,
    pub measured: Vec<f64>,
    pub shell_count: usize,
}

impl RunConfig {
    /// Default grids for `command`.
    pub fn defaults(command: Command) -> RunConfig {
        let (k0, energy) = match command {
            Command::Fig3 | Command::Nonlocal => (1.0, 3.0),
            _ => (1.0, 1.0),
        };
        let (x, y) = match command {
            Command::Fig1 => (AxisSpec::new(-25.0, 25.0, 1.0), AxisSpec::new(-25.0, 25.0, 1.0)),
            Command::Fig3 => (AxisSpec::new(0.0, 40.0, 1.0), AxisSpec::new(-40.0, 40.0, 0.25)),
            _ => (AxisSpec::new(-40.0, 40.0, 0.25), AxisSpec::new(-40.0, 40.0, 0.25)),
        };
        RunConfig {
            command,
            k0,
            energy,
            x,
            y,
            xx2: AxisSpec::new(-20.0, 20.0, 1.0),
            tol: Tolerance::DEFAULT,
            out: PathBuf::from(format!("{}.csv", command.name())),
            threads: 0,
            measured: [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|f| f * energy).collect(),
            shell_count: DEFAULT_SHELL_COUNT,
        }
    }

    /// Applies `flags` over the defaults and validates the result.
    pub fn resolve(command: Command, flags: &Flags) -> Result<RunConfig, CliError> {
        let mut flags = flags.clone();
        if let Some(path) = flags.config.clone() {
            flags.merge_config_file(&path)?;
        }
        let mut c = RunConfig::defaults(command);

        if command == Command::Fig3 && flags.reduced {
            c.x.spacing = 2.0;
            c.xx2.spacing = 2.0;
            c.y.spacing = 0.5;
        }
        if let Some(k0) = flags.k0 {
            c.k0 = k0;
        }
        if let Some(e) = flags.energy {
            if command == Command::Nonlocal && flags.measured.is_empty() {
                c.measured = c.measured.iter().map(|m| m / c.energy * e).collect();
            }
            c.energy = e;
        }
        override_axis(&mut c.x, flags.x_min, flags.x_max);
        override_axis(&mut c.y, flags.y_min, flags.y_max);
        override_axis(&mut c.xx2, flags.xx2_min, flags.xx2_max);
        if let Some(h) = flags.spacing {
            c.x.spacing = h;
            c.xx2.spacing = h;
            if command != Command::Fig3 {
                c.y.spacing = h;
            }
        }
        if let Some(h) = flags.y_spacing {
            c.y.spacing = h;
        }
        let tol = Tolerance {
            abs_tol: flags.tol_abs.unwrap_or(c.tol.abs_tol),
            rel_tol: flags.tol_rel.unwrap_or(c.tol.rel_tol),
            max_subdivisions: flags.max_subdivisions.unwrap_or(c.tol.max_subdivisions),
        };
        c.tol = Tolerance::new(tol.abs_tol, tol.rel_tol, tol.max_subdivisions)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(out) = flags.out {
            c.out = out;
        }
        c.threads = resolve_threads(flags.threads).map_err(CliError::Usage)?;
        if !flags.measured.is_empty() {
            c.measured = flags.measured;
        }
        if let Some(n) = flags.shell_count {
            c.shell_count = n;
        }
        c.validate()?;
        Ok(c)
    }

    /// Parameter gates checked before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        match self.command {
            Command::Fig1 | Command::Fig2 => {
                self.kernel_params()?;
                self.x.axis("x")?;
                self.y.axis("y")?;
            }
            Command::Fig3 => {
                self.kernel_params()?;
                self.x.axis("xx1")?;
                self.xx2.axis("xx2")?;
                self.y.axis("y")?;
            }
            Command::Nonlocal => {
                self.kernel_params()?;
                self.x.axis("xx1")?;
                if let Some(&bad) = self.measured.iter().find(|&&m| !(m >= 0.0 && m < self.energy)) {
                    return Err(CliError::Usage(format!("E-m {bad} outside [0, E={})", self.energy)));
                }
                if self.shell_count < 8 {
                    return Err(CliError::Usage(format!("shell-count {} below 8", self.shell_count)));
                }
            }
            Command::Verify | Command::Spin => {}
        }
        Ok(())
    }

    /// Two-body parameters for fig1/fig2, three-body for fig3/nonlocal.
    pub fn kernel_params(&self) -> Result<KernelParams, CliError> {
        let p = match self.command {
            Command::Fig3 | Command::Nonlocal => KernelParams::three_body(self.k0, self.energy, 0.0, 0.0),
            _ => KernelParams::two_body(self.k0, self.energy, 0.0),
        };
        p.map_err(|e| CliError::Usage(format!("--k0 {} --E {}: {e}", self.k0, self.energy)))
    }
}

fn override_axis(axis: &mut AxisSpec, min: Option<f64>, max: Option<f64>) {
    if let Some(v) = min {
        axis.min = v;
    }
    if let Some(v) = max {
        axis.max = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_per_command() {
        let f1 = RunConfig::defaults(Command::Fig1);
        assert_eq!(f1.x.axis("x").unwrap().count(), 51);
        assert_eq!((f1.k0, f1.energy), (1.0, 1.0));
        let f3 = RunConfig::defaults(Command::Fig3);
        assert_eq!(f3.energy, 3.0);
        assert_eq!(f3.x.axis("xx1").unwrap().count(), 41);
        assert_eq!(f3.y.axis("y").unwrap().count(), 321);
        assert_eq!(RunConfig::defaults(Command::Nonlocal).measured.len(), 5);
        assert_eq!(RunConfig::defaults(Command::Fig2).out, PathBuf::from("fig2.csv"));
    }

    #[test]
    fn reduced_fig3_and_spacing_overrides() {
        let flags = Flags { reduced: true, ..Flags::default() };
        let c = RunConfig::resolve(Command::Fig3, &flags).unwrap();
        assert_eq!((c.x.spacing, c.xx2.spacing, c.y.spacing), (2.0, 2.0, 0.5));

        let flags = Flags { spacing: Some(0.5), ..Flags::default() };
        let c = RunConfig::resolve(Command::Fig2, &flags).unwrap();
        assert_eq!((c.x.spacing, c.y.spacing), (0.5, 0.5));
    }

    #[test]
    fn energy_rescales_default_measurements() {
        let flags = Flags { energy: Some(6.0), ..Flags::default() };
        let c = RunConfig::resolve(Command::Nonlocal, &flags).unwrap();
        assert!((c.measured[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn config_text_fills_only_unset_flags() {
        let mut flags = Flags { k0: Some(2.0), ..Flags::default() };
        flags
            .merge_config_text("# comment\n\nk0 = 5\nE = 9\nE-m = 1, 2\nreduced = true\n")
            .unwrap();
        assert_eq!(flags.k0, Some(2.0));
        assert_eq!(flags.energy, Some(9.0));
        assert_eq!(flags.measured, vec![1.0, 2.0]);
        assert!(flags.reduced);
    }

    #[test]
    fn config_text_errors_name_the_line() {
        for (text, line) in [("k0 = x", "line 1"), ("\nnope", "line 2"), ("# ok\ncolour = red", "line 2")] {
            let err = Flags::default().merge_config_text(text).unwrap_err();
            assert!(matches!(err, CliError::Usage(_)));
            assert!(err.to_string().contains(line), "{err}");
        }
    }

    #[test]
    fn gates_reject_bad_parameters() {
        let mut c = RunConfig::defaults(Command::Fig3);
        c.energy = 2.9;
        assert!(matches!(c.validate(), Err(CliError::Usage(_))));
        let mut c = RunConfig::defaults(Command::Nonlocal);
        c.measured = vec![3.0];
        assert!(c.validate().is_err());
        let mut c = RunConfig::defaults(Command::Fig1);
        c.x.spacing = 0.3;
        assert!(c.validate().is_err());
        assert!(RunConfig::defaults(Command::Spin).validate().is_ok());
    }
}
