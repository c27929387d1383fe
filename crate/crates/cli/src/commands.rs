use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cubedisc::fourier::{
    cell_surface, decay_probe, hat_chi_cell, logsum_probe, poisson_rhs, sandwich, truncation_for_tail,
    SpectralKernel,
};
use cubedisc::geometry::{clip_cube, cut_volume, ConvexCell, Direction};
use cubedisc::lattice::{count_cut, lattice_discrepancy, point_discrepancy, LatticeSpec};
use cubedisc::quadrature::{
    fit_samples, integrate_abs_discrepancy, sup_scan, DiscrepancyProfile, FitReport, Method, QuadratureSpec,
    SupSample,
};

use crate::plot;
use crate::table::{format_float, write_table, Cell, Format, RunManifest, Table};

/// Exact header of scan profiles.
pub const SCAN_HEADER: &str = "d,M,alpha,r,integral_abs_D,quad_error,method,nodes,seed,r_count";
/// Exact header of fit reports.
pub const FIT_HEADER: &str = "d,alpha,M,N,sup_value,sup_r,ratio_logpow,ratio_poly,slope_loglog";

/// Deviation from unit norm above which `--sigma` is reported before normalising.
const SIGMA_WARN: f64 = 1e-6;

/// Default number of frequencies per axis for the general spectral sum.
fn default_max_truncation(d: usize) -> u64 {
    if d == 2 {
        1000
    } else {
        40
    }
}

/// A comma-separated list parsed as one flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvList<T>(pub Vec<T>);

impl<T: FromStr> FromStr for CsvList<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|p| p.trim().parse::<T>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<std::result::Result<Vec<T>, String>>()
            .map(CsvList)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cubedisc",
    version,
    about = "Half-space discrepancy of dilated lattice point sets in the cube"
)]
pub struct Cli {
    /// `key = value` file of flag defaults; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume of the cube cut by a half-space.
    #[command(args_override_self = true)]
    Volume(VolumeArgs),
    /// Lattice points of the dilated cut cube.
    #[command(args_override_self = true)]
    Count(CountArgs),
    /// Lattice count minus its expected value.
    #[command(args_override_self = true)]
    Discrepancy(DiscrepancyArgs),
    /// Integral of |D| over directions at one radius.
    #[command(args_override_self = true)]
    Integrate(IntegrateArgs),
    /// Spherical integral of |D| over a radius grid, one profile per M.
    #[command(args_override_self = true)]
    Scan(ScanArgs),
    /// Log-log scaling fit of scan suprema across M.
    #[command(args_override_self = true)]
    Fit(FitArgs),
    /// Fourier transform of the cut cube and the smoothing kernel.
    #[command(args_override_self = true)]
    Fourier(FourierArgs),
    /// Both sides of the Poisson identity for the smoothed count.
    #[command(args_override_self = true)]
    Poisson(PoissonArgs),
    /// Spherical averages of the transform modulus at growing dilations.
    #[command(args_override_self = true)]
    ProbeDecay(DecayArgs),
    /// Lattice sums of |m|^-d inside the ball of radius M^(d-1).
    #[command(args_override_self = true)]
    ProbeLogsum(LogsumArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Directory for data files and manifests; stdout when absent.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long = "m", value_name = "INT")]
    pub m: Option<u32>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CutArgs {
    /// Cut direction, normalised on input.
    #[arg(long, allow_hyphen_values = true, value_name = "CSVFLOATS")]
    pub sigma: CsvList<f64>,
    #[arg(long)]
    pub r: f64,
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// angular-trapezoid (d = 2) or monte-carlo.
    #[arg(long)]
    pub method: Option<String>,
    /// Angles or samples; 4096 for the trapezoid, 20000 for Monte Carlo.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Integrate over the whole sphere instead of one fundamental domain.
    #[arg(long)]
    pub no_symmetry: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VolumeArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[command(flatten)]
    pub cut: CutArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    pub cut: CutArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DiscrepancyArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    pub cut: CutArgs,
    /// Use the normalised point set `{m/(M+alpha)}` with `N·|P|/2^d` as the expectation.
    #[arg(long)]
    pub point_set: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long)]
    pub r: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long = "m-list", value_name = "CSVINTS", conflicts_with = "m")]
    pub m_list: Option<CsvList<u32>>,
    #[arg(long, default_value_t = 512)]
    pub r_count: usize,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Also write an SVG of each profile.
    #[arg(long)]
    pub plot: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Scan CSV files; profiles are grouped by M.
    #[arg(long = "in", value_name = "FILE", num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    /// Also write an SVG of the fit.
    #[arg(long)]
    pub plot: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FourierArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Cut direction; the full cube when absent.
    #[arg(long, allow_hyphen_values = true, value_name = "CSVFLOATS", requires = "r")]
    pub sigma: Option<CsvList<f64>>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_name = "CSVFLOATS")]
    pub xi: CsvList<f64>,
    /// Also report the kernel transform at `xi` for this M.
    #[arg(long = "m", value_name = "INT")]
    pub m: Option<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PoissonArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    pub cut: CutArgs,
    /// Dilation; `M + alpha` when absent.
    #[arg(long)]
    pub dilation: Option<f64>,
    /// Truncation radius; chosen from the tail bound when absent.
    #[arg(long = "k")]
    pub truncation: Option<u64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tail_target: f64,
    /// Largest automatic truncation radius for non-axis directions.
    #[arg(long)]
    pub max_k: Option<u64>,
    /// Also report the smoothed sums at `M + alpha ∓ M^(1-d)` around the count.
    #[arg(long)]
    pub sandwich: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DecayArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, allow_hyphen_values = true, value_name = "CSVFLOATS", requires = "r")]
    pub sigma: Option<CsvList<f64>>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(
        long = "rho-list",
        value_name = "CSVFLOATS",
        default_value = "4,8,16,32,64,128,256"
    )]
    pub rho_list: CsvList<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LogsumArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long = "m-list", value_name = "CSVINTS")]
    pub m_list: Option<CsvList<u32>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `args` (program name first), merges any config file and runs the command.
pub fn run(args: Vec<String>) -> Result<()> {
    let command_line = args.iter().map(|a| shell_word(a)).collect::<Vec<_>>().join(" ");
    let (expanded, from_config) = crate::config::expand(args)?;
    let cli = match Cli::try_parse_from(&expanded) {
        Ok(cli) => cli,
        Err(e)
            if e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            let text = e.to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            let origin = if from_config {
                " (flags include the config file)"
            } else {
                ""
            };
            bail!("{first}{origin}; run with --help for usage");
        }
    };
    let ctx = Ctx { command_line };
    match cli.command {
        Command::Volume(a) => ctx.volume(a),
        Command::Count(a) => ctx.count(a),
        Command::Discrepancy(a) => ctx.discrepancy(a),
        Command::Integrate(a) => ctx.integrate(a),
        Command::Scan(a) => ctx.scan(a),
        Command::Fit(a) => ctx.fit(a),
        Command::Fourier(a) => ctx.fourier(a),
        Command::Poisson(a) => ctx.poisson(a),
        Command::ProbeDecay(a) => ctx.probe_decay(a),
        Command::ProbeLogsum(a) => ctx.probe_logsum(a),
    }
}

fn shell_word(a: &str) -> String {
    if !a.is_empty()
        && a.chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_=./,:+".contains(c))
    {
        a.to_string()
    } else {
        format!("'{}'", a.replace('\'', "'\\''"))
    }
}

struct Ctx {
    command_line: String,
}

fn direction(d: usize, v: &[f64]) -> Result<Direction<f64>> {
    if v.len() != d {
        bail!("--sigma has {} components but --dim is {d}", v.len());
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || norm <= 0.0 {
        bail!("--sigma must be a nonzero finite vector");
    }
    if (norm - 1.0).abs() > SIGMA_WARN {
        eprintln!("warning: --sigma has norm {norm}; normalising to unit length");
    }
    Ok(Direction::normalized(v.to_vec())?)
}

fn lattice(a: &LatticeArgs, m: u32) -> Result<LatticeSpec> {
    LatticeSpec::new(a.dim, m, a.alpha).map_err(|e| anyhow!("{e}"))
}

fn require_m(a: &LatticeArgs) -> Result<u32> {
    a.m.ok_or_else(|| anyhow!("--m is required"))
}

fn quadrature(d: usize, q: &QuadArgs) -> Result<QuadratureSpec> {
    let method = match &q.method {
        Some(s) => Method::from_str(s)?,
        None if d == 2 => Method::AngularTrapezoid,
        None => Method::MonteCarlo,
    };
    let nodes = q.nodes.unwrap_or(match method {
        Method::AngularTrapezoid => 4096,
        Method::MonteCarlo => 20000,
    });
    let spec = QuadratureSpec {
        method,
        nodes,
        seed: q.seed,
        use_symmetry: !q.no_symmetry,
    };
    spec.validate(d)?;
    Ok(spec)
}

fn cell(d: usize, sigma: &Option<CsvList<f64>>, r: Option<f64>) -> Result<ConvexCell<f64>> {
    Ok(match (sigma, r) {
        (Some(s), Some(r)) => clip_cube(&direction(d, &s.0)?, r)?,
        (None, None) => ConvexCell::cube(d)?,
        _ => bail!("--sigma and --r go together"),
    })
}

impl Ctx {
    fn emit(&self, table: &Table, out: &OutputArgs, stem: &str, manifest: RunManifest) -> Result<()> {
        match &out.out {
            Some(dir) => {
                let path = write_table(dir, stem, table, out.format, manifest)?;
                println!("{}", path.display());
            }
            None => print!("{}", table.render(out.format)),
        }
        Ok(())
    }

    fn manifest(&self, command: &str, d: usize) -> RunManifest {
        RunManifest::new(command, d, &self.command_line)
    }

    fn volume(&self, a: VolumeArgs) -> Result<()> {
        let s = direction(a.dim, &a.cut.sigma.0)?;
        let v = cut_volume(&s, a.cut.r)?;
        let mut t = Table::new(&["d", "r", "volume"]);
        t.push(vec![a.dim.into(), a.cut.r.into(), v.into()]);
        self.emit(
            &t,
            &a.output,
            &format!("volume_d{}", a.dim),
            self.manifest("volume", a.dim),
        )
    }

    fn count(&self, a: CountArgs) -> Result<()> {
        let m = require_m(&a.lattice)?;
        let spec = lattice(&a.lattice, m)?;
        let s = direction(spec.d(), &a.cut.sigma.0)?;
        let c = count_cut(&spec, &s, a.cut.r)?;
        let mut t = Table::new(&["d", "M", "alpha", "r", "count", "N"]);
        t.push(vec![
            spec.d().into(),
            m.into(),
            spec.alpha().into(),
            a.cut.r.into(),
            c.into(),
            spec.n_points().into(),
        ]);
        let mut man = self.manifest("count", spec.d());
        man.m = Some(m);
        man.alpha = Some(spec.alpha());
        self.emit(
            &t,
            &a.output,
            &format!("count_d{}_M{m}_a{}", spec.d(), spec.alpha()),
            man,
        )
    }

    fn discrepancy(&self, a: DiscrepancyArgs) -> Result<()> {
        let m = require_m(&a.lattice)?;
        let spec = lattice(&a.lattice, m)?;
        let s = direction(spec.d(), &a.cut.sigma.0)?;
        let res = if a.point_set {
            point_discrepancy(&spec, &s, a.cut.r)?
        } else {
            lattice_discrepancy(&spec, &s, a.cut.r)?
        };
        let mut t = Table::new(&["d", "M", "alpha", "r", "count", "expected", "discrepancy"]);
        t.push(vec![
            spec.d().into(),
            m.into(),
            spec.alpha().into(),
            a.cut.r.into(),
            res.count.into(),
            res.expected.into(),
            res.discrepancy.into(),
        ]);
        let mut man = self.manifest("discrepancy", spec.d());
        man.m = Some(m);
        man.alpha = Some(spec.alpha());
        self.emit(
            &t,
            &a.output,
            &format!("discrepancy_d{}_M{m}_a{}", spec.d(), spec.alpha()),
            man,
        )
    }

    fn integrate(&self, a: IntegrateArgs) -> Result<()> {
        let m = require_m(&a.lattice)?;
        let spec = lattice(&a.lattice, m)?;
        let q = quadrature(spec.d(), &a.quad)?;
        let (v, err) = integrate_abs_discrepancy(&spec, a.r, &q)?;
        let mut t = Table::new(&[
            "d",
            "M",
            "alpha",
            "r",
            "integral_abs_D",
            "quad_error",
            "method",
            "nodes",
            "seed",
        ]);
        t.push(vec![
            spec.d().into(),
            m.into(),
            spec.alpha().into(),
            a.r.into(),
            v.into(),
            err.into(),
            q.method.name().into(),
            q.nodes.into(),
            q.seed.into(),
        ]);
        let mut man = self.manifest("integrate", spec.d()).with_quadrature(&q);
        man.m = Some(m);
        man.alpha = Some(spec.alpha());
        self.emit(
            &t,
            &a.output,
            &format!("integrate_d{}_M{m}_a{}", spec.d(), spec.alpha()),
            man,
        )
    }

    fn scan(&self, a: ScanArgs) -> Result<()> {
        let ms: Vec<u32> = match (&a.lattice.m, &a.m_list) {
            (Some(m), None) => vec![*m],
            (None, Some(list)) if !list.0.is_empty() => list.0.clone(),
            _ => bail!("scan needs --m or --m-list"),
        };
        let d = a.lattice.dim;
        let q = quadrature(d, &a.quad)?;
        let mut combined = Table::new(&scan_columns());
        for &m in &ms {
            let spec = lattice(&a.lattice, m)?;
            let profile = sup_scan(&spec, a.r_count, &q)?;
            let table = scan_table(&profile);
            match &a.output.out {
                Some(dir) => {
                    let stem = format!("scan_d{d}_M{m}_a{}", spec.alpha());
                    let mut man = self.manifest("scan", d).with_quadrature(&q);
                    man.m = Some(m);
                    man.m_list = (ms.len() > 1).then(|| ms.clone());
                    man.alpha = Some(spec.alpha());
                    man.r_count = Some(a.r_count);
                    let path = write_table(dir, &stem, &table, a.output.format, man)?;
                    println!("{}", path.display());
                    if a.plot {
                        let vals: Vec<f64> = profile.values.iter().map(|v| v.0).collect();
                        let svg = plot::profile_svg(
                            &format!("d = {d}, M = {m}, alpha = {}", spec.alpha()),
                            &profile.r_grid,
                            &vals,
                        )?;
                        let p = dir.join(format!("{stem}.svg"));
                        std::fs::write(&p, svg).with_context(|| format!("cannot write {}", p.display()))?;
                    }
                }
                None => combined.rows.extend(table.rows),
            }
        }
        if a.output.out.is_none() {
            if a.plot {
                bail!("--plot needs --out");
            }
            print!("{}", combined.render(a.output.format));
        }
        Ok(())
    }

    fn fit(&self, a: FitArgs) -> Result<()> {
        let mut samples: BTreeMap<u32, SupSample> = BTreeMap::new();
        let mut meta: Option<(usize, f64)> = None;
        for path in &a.inputs {
            for s in read_scan_suprema(path)? {
                if let Some((d, alpha)) = meta {
                    if d != s.0 || alpha != s.1 {
                        bail!(
                            "{}: mixes (d, alpha) = ({}, {}) with ({d}, {alpha})",
                            path.display(),
                            s.0,
                            s.1
                        );
                    }
                }
                meta = Some((s.0, s.1));
                // keep the larger grid supremum if one M appears in several files
                let e = samples.entry(s.2).or_insert(s);
                if s.3 > e.3 {
                    *e = s;
                }
            }
        }
        let Some((d, alpha)) = meta else {
            bail!("no scan rows found in the --in files");
        };
        let report = fit_samples(&samples.into_values().collect::<Vec<_>>())?;
        let table = fit_table(&report);
        eprintln!(
            "slope {:.6} ± {:.6} (regression) ± {:.6} (quadrature)",
            report.slope, report.slope_stderr, report.slope_quad_error
        );
        let mut man = self.manifest("fit", d);
        man.m_list = Some(report.rows.iter().map(|r| r.m).collect());
        man.alpha = Some(alpha);
        man.summary = Some(serde_json::json!({
            "slope_loglog": report.slope,
            "slope_stderr": report.slope_stderr,
            "slope_quad_error": report.slope_quad_error,
            "inputs": a.inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        }));
        let stem = format!("fit_d{d}_a{alpha}");
        if a.plot {
            let Some(dir) = &a.output.out else {
                bail!("--plot needs --out");
            };
            let svg = plot::fit_svg(&report)?;
            crate::table::ensure_dir(dir)?;
            let p = dir.join(format!("{stem}.svg"));
            std::fs::write(&p, svg).with_context(|| format!("cannot write {}", p.display()))?;
        }
        self.emit(&table, &a.output, &stem, man)
    }

    fn fourier(&self, a: FourierArgs) -> Result<()> {
        let c = cell(a.dim, &a.sigma, a.r)?;
        if a.xi.0.len() != a.dim {
            bail!("--xi has {} components but --dim is {}", a.xi.0.len(), a.dim);
        }
        let z = hat_chi_cell(&c, &a.xi.0)?;
        let xi_text =
            a.xi.0
                .iter()
                .map(|&x| format_float(x))
                .collect::<Vec<_>>()
                .join(";");
        let mut cols = vec!["d", "xi", "re", "im", "abs", "volume"];
        let mut row: Vec<Cell> = vec![
            a.dim.into(),
            xi_text.into(),
            z.re.into(),
            z.im.into(),
            z.norm().into(),
            c.volume().into(),
        ];
        let mut man = self.manifest("fourier", a.dim);
        if let Some(m) = a.m {
            let k = SpectralKernel::<f64>::new(a.dim, m);
            cols.push("hat_Phi");
            row.push(k.hat_at(&a.xi.0).into());
            man.m = Some(m);
        }
        let mut t = Table::new(&cols);
        t.push(row);
        self.emit(&t, &a.output, &format!("fourier_d{}", a.dim), man)
    }

    fn poisson(&self, a: PoissonArgs) -> Result<()> {
        let m = require_m(&a.lattice)?;
        let spec = lattice(&a.lattice, m)?;
        let d = spec.d();
        let s = direction(d, &a.cut.sigma.0)?;
        let rho = a.dilation.unwrap_or(spec.dilation());
        let axis = s.components().iter().filter(|x| x.abs() >= 1e-12).count() == 1;
        let k = match a.truncation {
            Some(k) => k,
            None => {
                let surface = cell_surface(&s, a.cut.r)?;
                let cap = a.max_k.unwrap_or(default_max_truncation(d));
                match truncation_for_tail(d, m, rho, surface, a.tail_target) {
                    Ok(k) if axis || k <= cap => k,
                    _ if axis => bail!("no truncation radius reaches tail bound {:e}", a.tail_target),
                    _ => {
                        eprintln!(
                            "warning: tail target {:e} needs more than K = {cap} for this direction; using K = {cap} (raise with --max-k or --k)",
                            a.tail_target
                        );
                        cap
                    }
                }
            }
        };
        let out = poisson_rhs(&spec, &s, a.cut.r, rho, k)?;
        let mut cols = vec![
            "d",
            "M",
            "alpha",
            "r",
            "dilation",
            "K",
            "lhs",
            "rhs",
            "residual",
            "tail_bound",
        ];
        let mut row: Vec<Cell> = vec![
            d.into(),
            m.into(),
            spec.alpha().into(),
            a.cut.r.into(),
            out.dilation.into(),
            out.truncation_radius.into(),
            out.lhs_sum.into(),
            out.rhs_sum.into(),
            out.residual().into(),
            out.tail_bound.into(),
        ];
        if a.sandwich {
            let w = sandwich(&spec, &s, a.cut.r)?;
            cols.extend(["lower", "count", "upper"]);
            row.extend([w.lower.into(), w.count.into(), w.upper.into()]);
        }
        let mut t = Table::new(&cols);
        t.push(row);
        let mut man = self.manifest("poisson", d);
        man.m = Some(m);
        man.alpha = Some(spec.alpha());
        self.emit(
            &t,
            &a.output,
            &format!("poisson_d{d}_M{m}_a{}", spec.alpha()),
            man,
        )
    }

    fn probe_decay(&self, a: DecayArgs) -> Result<()> {
        let c = cell(a.dim, &a.sigma, a.r)?;
        let q = quadrature(a.dim, &a.quad)?;
        let rows = decay_probe(&a.rho_list.0, &q, &c)?;
        let mut t = Table::new(&["rho", "value", "ratio"]);
        for r in rows {
            t.push(vec![r.rho.into(), r.value.into(), r.ratio.into()]);
        }
        let man = self.manifest("probe-decay", a.dim).with_quadrature(&q);
        self.emit(&t, &a.output, &format!("decay_d{}", a.dim), man)
    }

    fn probe_logsum(&self, a: LogsumArgs) -> Result<()> {
        let ms = match &a.m_list {
            Some(l) => l.0.clone(),
            None if a.dim == 2 => vec![4, 16, 64, 256, 1024, 4096],
            None => vec![2, 4, 6, 8, 10],
        };
        let rows = logsum_probe(a.dim, &ms)?;
        let mut t = Table::new(&["d", "M", "sum", "ratio"]);
        for r in rows {
            t.push(vec![a.dim.into(), r.m.into(), r.sum.into(), r.ratio.into()]);
        }
        let mut man = self.manifest("probe-logsum", a.dim);
        man.m_list = Some(ms);
        self.emit(&t, &a.output, &format!("logsum_d{}", a.dim), man)
    }
}

fn scan_columns() -> Vec<&'static str> {
    SCAN_HEADER.split(',').collect()
}

/// One row per grid radius in the scan schema.
pub fn scan_table(p: &DiscrepancyProfile) -> Table {
    let mut t = Table::new(&scan_columns());
    for (&r, &(v, e)) in p.r_grid.iter().zip(&p.values) {
        t.push(vec![
            p.spec.d().into(),
            p.spec.m().into(),
            p.spec.alpha().into(),
            r.into(),
            v.into(),
            e.into(),
            p.qspec.method.name().into(),
            p.qspec.nodes.into(),
            p.qspec.seed.into(),
            p.r_grid.len().into(),
        ]);
    }
    t
}

pub fn fit_table(report: &FitReport) -> Table {
    let cols: Vec<&'static str> = FIT_HEADER.split(',').collect();
    let mut t = Table::new(&cols);
    for r in &report.rows {
        t.push(vec![
            r.d.into(),
            r.alpha.into(),
            r.m.into(),
            r.n.into(),
            r.sup_value.into(),
            r.sup_r.into(),
            r.ratio_logpow.into(),
            r.ratio_poly.into(),
            report.slope.into(),
        ]);
    }
    t
}

/// Grid supremum `(d, α, M, value, r, error)` of every M found in a scan CSV.
pub fn read_scan_suprema(path: &Path) -> Result<Vec<SupSample>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != SCAN_HEADER {
        bail!(
            "{}: not a scan CSV (expected header {SCAN_HEADER})",
            path.display()
        );
    }
    let mut by_m: BTreeMap<u32, SupSample> = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            bail!(
                "{}:{}: expected 10 fields, got {}",
                path.display(),
                i + 2,
                f.len()
            );
        }
        let bad = |what: &str| anyhow!("{}:{}: bad {what}", path.display(), i + 2);
        let d: usize = f[0].parse().map_err(|_| bad("d"))?;
        let m: u32 = f[1].parse().map_err(|_| bad("M"))?;
        let alpha: f64 = f[2].parse().map_err(|_| bad("alpha"))?;
        let r: f64 = f[3].parse().map_err(|_| bad("r"))?;
        let v: f64 = f[4].parse().map_err(|_| bad("integral_abs_D"))?;
        let e: f64 = f[5].parse().map_err(|_| bad("quad_error"))?;
        let entry = by_m.entry(m).or_insert((d, alpha, m, f64::NEG_INFINITY, r, e));
        if entry.0 != d || entry.1 != alpha {
            bail!("{}:{}: mixed (d, alpha) for M = {m}", path.display(), i + 2);
        }
        if v > entry.3 {
            *entry = (d, alpha, m, v, r, e);
        }
    }
    Ok(by_m.into_values().collect())
}
