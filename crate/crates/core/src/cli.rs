//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::compensation::{center_splitting_ratios, optimize_5050_shift};
use crate::config::{load_config, Numerics, RunConfig};
use crate::coupler::Polarization;
use crate::error::{Error, Result};
use crate::export::{table_csv, to_json_string, write_sweep, OutputFormat};
use crate::interference::{outcome_probabilities, tau_scan, OutcomeReport, TauSampling, TwoSourceState};
use crate::presets::{table1, tau_preset, SweepPreset};
use crate::sweeps::{
    linspace, max_achievable_schmidt, sweep_bandwidth_mlambda, sweep_dxi_mlambda, sweep_eta_pair,
    sweep_schmidt, PumpMode, SchmidtSeries, DEFAULT_REFERENCE_M,
};
use crate::spectra::GaussianSpec;
use crate::units::{fs, nm, to_fs, to_nm};

/// Exit status for configuration and usage errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pairsep", version, about = "Photon-pair separation through dispersive directional couplers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory for CSV/JSON files.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Spectral grid points per photon window (overrides the config).
    #[arg(long)]
    pub points: Option<usize>,

    /// Output format: csv, json or both.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print Δξ, M, T_λ and η(λdeg) for each configured polarization.
    Params(Common),
    /// Outcome probabilities and visibilities for the configured state.
    Run(Common),
    /// Two-parameter maps and Schmidt-number series.
    Sweep(SweepArgs),
    /// Separated-outcome probability versus inter-source delay.
    TauScan(TauArgs),
    /// Optimize the 50:50 wavelength translation of the configured coupler.
    Compensate(CompensateArgs),
    /// Reproduce the five-row silica coupler table.
    Table1(Common),
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,

    /// One of fig4, fig5, fig8, fig11, fig13.
    #[arg(long)]
    pub preset: String,

    /// Custom x axis as start:end:count.
    #[arg(long, value_parser = parse_axis)]
    pub x: Option<AxisValues>,

    /// Custom y axis as start:end:count.
    #[arg(long, value_parser = parse_axis)]
    pub y: Option<AxisValues>,

    /// Points per map axis.
    #[arg(long, default_value_t = 61)]
    pub resolution: usize,

    /// First-order dispersion M used to realize MΛ and MΔλ/λdeg products.
    #[arg(long, default_value_t = DEFAULT_REFERENCE_M)]
    pub m_ref: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TauArgs {
    #[command(flatten)]
    pub common: Common,

    #[arg(long, default_value_t = -1000.0, allow_negative_numbers = true)]
    pub from_fs: f64,

    #[arg(long, default_value_t = 1000.0, allow_negative_numbers = true)]
    pub to_fs: f64,

    #[arg(long, default_value_t = 4001)]
    pub samples: usize,

    /// Coarse sampling that only resolves the envelope.
    #[arg(long)]
    pub envelope_only: bool,

    /// Schmidt number of the built-in 1550 nm state (ignored with --config).
    #[arg(long, default_value_t = 1.0)]
    pub sn: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CompensateArgs {
    #[command(flatten)]
    pub common: Common,

    /// Search half-width in nm (default: half the splitting-ratio period).
    #[arg(long, allow_negative_numbers = true)]
    pub halfwidth_nm: Option<f64>,
}

fn parse_format(s: &str) -> std::result::Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Evenly spaced axis given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisValues(pub Vec<f64>);

/// Parses `start:end:count`.
pub fn parse_axis(s: &str) -> std::result::Result<AxisValues, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:end:count, got {s:?}"));
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}"));
    let (a, b) = (num(parts[0])?, num(parts[1])?);
    let n: usize = parts[2].trim().parse().map_err(|_| format!("bad count {:?}", parts[2]))?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(format!("empty or non-finite axis {s:?}"));
    }
    Ok(AxisValues(linspace(a, b, n)))
}

/// Maps an error to the process exit status.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_USAGE
    } else {
        EXIT_NUMERICAL
    }
}

struct Ctx {
    config: Option<RunConfig>,
    numerics: Numerics,
    out: Option<PathBuf>,
    format: OutputFormat,
}

impl Ctx {
    fn new(common: &Common) -> Result<Self> {
        let config = common.config.as_deref().map(load_config).transpose()?;
        let mut numerics = config.as_ref().map(|c| c.numerics).unwrap_or_default();
        if let Some(p) = common.points {
            if p < crate::spectra::MIN_POINTS_PER_AXIS {
                return Err(Error::invalid(format!(
                    "--points must be at least {}",
                    crate::spectra::MIN_POINTS_PER_AXIS
                )));
            }
            numerics.points_per_axis = p;
        }
        let out = common
            .out
            .clone()
            .or_else(|| config.as_ref().and_then(|c| c.output_dir.clone()));
        let format = common
            .format
            .or_else(|| config.as_ref().and_then(|c| c.output_format))
            .unwrap_or_default();
        Ok(Self {
            config,
            numerics,
            out,
            format,
        })
    }

    fn config(&self) -> Result<&RunConfig> {
        self.config
            .as_ref()
            .ok_or_else(|| Error::invalid("this command needs --config"))
    }

    fn write(&self, name: &str, contents: &str) -> Result<Option<PathBuf>> {
        match &self.out {
            None => Ok(None),
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(name);
                fs::write(&path, contents)?;
                Ok(Some(path))
            }
        }
    }
}

fn note_written(out: &mut dyn Write, paths: &[PathBuf]) -> Result<()> {
    for p in paths {
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok(())
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::invalid("--threads must be positive"));
        }
        // A second initialization in the same process is harmless to ignore.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Params(c) => cmd_params(&Ctx::new(&c)?, out),
        Command::Run(c) => cmd_run(&Ctx::new(&c)?, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::TauScan(a) => cmd_tau_scan(&a, out),
        Command::Compensate(a) => cmd_compensate(&a, out),
        Command::Table1(c) => cmd_table1(&Ctx::new(&c)?, out),
    }
}

fn cmd_params(ctx: &Ctx, out: &mut dyn Write) -> Result<()> {
    let cfg = ctx.config()?;
    let coupler = cfg.coupler()?;
    cfg.check_polarizations()?;
    let lambda_deg = cfg.lambda_deg.ok_or_else(|| {
        Error::Config("no degeneracy wavelength: set coupler.lambda_deg_nm or a state block".into())
    })?;
    let mut entries = serde_json::Map::new();
    writeln!(out, "lambda_deg = {:.4} nm", to_nm(lambda_deg))?;
    for pol in Polarization::ALL.into_iter().filter(|p| coupler.supports(*p)) {
        let p = coupler.dimensionless_params(pol, lambda_deg)?;
        let period = p
            .period_t_lambda
            .map_or_else(|| "inf".to_string(), |t| format!("{:.4} nm", to_nm(t)));
        writeln!(
            out,
            "{pol}: delta_xi = {:.4} rad, M = {:.4}, T_lambda = {period}, eta(lambda_deg) = {:.4}",
            p.delta_xi, p.big_m, p.eta_deg
        )?;
        if p.outside_quarter_window() {
            writeln!(out, "warning: {pol} delta_xi lies outside [-pi/4, pi/4]")?;
        }
        entries.insert(
            pol.to_string(),
            json!({
                "delta_xi": p.delta_xi,
                "M": p.big_m,
                "T_lambda_nm": p.period_t_lambda.map(to_nm),
                "eta_deg": p.eta_deg,
            }),
        );
    }
    let doc = json!({"lambda_deg_nm": to_nm(lambda_deg), "polarizations": entries});
    if let Some(p) = ctx.write("params.json", &to_json_string(&doc)?)? {
        note_written(out, &[p])?;
    }
    Ok(())
}

fn print_report(out: &mut dyn Write, r: &OutcomeReport) -> Result<()> {
    writeln!(out, "theta = {:.6} rad, tau = {:.4} fs{}", r.theta, to_fs(r.tau), if r.ideal { "" } else { " (non-ideal visibilities)" })?;
    writeln!(out, "outcome      R0            RI            R")?;
    for (name, a, b, c) in [
        ("AA", r.r0.aa, r.ri.aa, r.r.aa),
        ("AB", r.r0.ab, r.ri.ab, r.r.ab),
        ("BA", r.r0.ba, r.ri.ba, r.r.ba),
        ("BB", r.r0.bb, r.ri.bb, r.r.bb),
    ] {
        writeln!(out, "{name:<8} {a:>13.6} {b:>13.6} {c:>13.6}")?;
    }
    writeln!(out, "P_S = {:.6} (classical {:.6}, interference {:+.6})", r.ps_total, r.ps_classical, r.ps_interference)?;
    writeln!(out, "P_B = {:.6} (classical {:.6}, interference {:+.6})", r.pb_total, r.pb_classical, r.pb_interference)?;
    writeln!(out, "V_S = {}, V_B = {}", r.vis_s, r.vis_b)?;
    Ok(())
}

fn cmd_run(ctx: &Ctx, out: &mut dyn Write) -> Result<()> {
    let cfg = ctx.config()?;
    let coupler = cfg.coupler()?;
    cfg.check_polarizations()?;
    let built = cfg.state()?.build(&ctx.numerics)?;
    let state = TwoSourceState::identical(&built.jsa, cfg.theta, cfg.tau)?;
    let r = outcome_probabilities(&state, coupler)?;
    if let Some(sn) = built.schmidt_number {
        writeln!(out, "Schmidt number = {sn:.4}")?;
    }
    if built.jsa.flags().pump_mismatch {
        writeln!(out, "warning: pump center is far from the photon frequency sum; the state is nearly empty")?;
    }
    print_report(out, &r)?;
    let doc = json!({"schmidt_number": built.schmidt_number, "report": r});
    if ctx.format.json() {
        if let Some(p) = ctx.write("run.json", &to_json_string(&doc)?)? {
            note_written(out, &[p])?;
        }
    }
    Ok(())
}

fn schmidt_csv(series: &[SchmidtSeries]) -> Result<String> {
    let rows: Vec<Vec<Option<f64>>> = series
        .iter()
        .flat_map(|s| {
            s.points.iter().map(move |p| {
                vec![
                    Some(s.m_bandwidth),
                    Some(p.sn_target),
                    Some(p.sn),
                    Some(to_nm(p.pump_fwhm)),
                    Some(p.ps_total),
                    Some(p.ps_classical),
                    Some(p.ps_interference),
                ]
            })
        })
        .collect();
    table_csv(
        &["series=schmidt".into()],
        &["M_dlambda_over_lambda", "sn_target", "sn", "pump_fwhm_nm", "P_S", "P_S0", "P_SI"],
        &rows,
    )
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let preset: SweepPreset = args.preset.parse()?;
    if args.resolution < 2 {
        return Err(Error::invalid("--resolution must be at least 2"));
    }
    let ctx = Ctx::new(&args.common)?;
    let lambda_deg = ctx
        .config
        .as_ref()
        .and_then(|c| c.lambda_deg)
        .unwrap_or(nm(crate::presets::SILICA_LAMBDA_DEG_NM));
    let theta = ctx.config.as_ref().map_or(0.0, |c| c.theta);
    let (dx, dy) = preset.default_axes(args.resolution);
    let xs = args.x.clone().map_or(dx, |a| a.0);
    let ys = args.y.clone().map_or(dy, |a| a.0);
    let mut template = preset.template();
    if let Some(p) = args.common.points {
        template.points_per_window = p.max(crate::spectra::MIN_POINTS_PER_AXIS);
    }
    let stem = preset.name();
    let written = match preset {
        SweepPreset::Fig4 | SweepPreset::Fig5 => {
            let g = sweep_dxi_mlambda(&template, lambda_deg, theta, &xs, &ys, args.m_ref)?;
            ctx.out.as_ref().map(|d| write_sweep(&g, d, stem, ctx.format)).transpose()?
        }
        SweepPreset::Fig8 => {
            let g = sweep_bandwidth_mlambda(
                lambda_deg,
                theta,
                &xs,
                &ys,
                PumpMode::Flat,
                args.m_ref,
                template.points_per_window,
                template.sigma_span,
            )?;
            ctx.out.as_ref().map(|d| write_sweep(&g, d, stem, ctx.format)).transpose()?
        }
        SweepPreset::Fig13 => {
            let g = sweep_eta_pair(&xs, &ys, theta, lambda_deg, 0.05)?;
            ctx.out.as_ref().map(|d| write_sweep(&g, d, stem, ctx.format)).transpose()?
        }
        SweepPreset::Fig11 => {
            let points = ctx.numerics.points_per_axis;
            let span = ctx.numerics.sigma_span;
            let series = xs
                .iter()
                .map(|&level| {
                    let targets = match &args.y {
                        Some(t) => t.0.clone(),
                        None => {
                            let p = GaussianSpec::new(lambda_deg, level / args.m_ref * lambda_deg)?;
                            let max = max_achievable_schmidt(&p, &p, span, points)?;
                            linspace(1.0, 1.0 + 0.98 * (max - 1.0), args.resolution.min(25))
                        }
                    };
                    sweep_schmidt(lambda_deg, level, &targets, args.m_ref, points, span)
                })
                .collect::<Result<Vec<_>>>()?;
            for s in &series {
                writeln!(out, "M*dlambda/lambda_deg = {:.4}", s.m_bandwidth)?;
                for p in &s.points {
                    writeln!(out, "  SN = {:.4}  P_S = {:.6}", p.sn, p.ps_total)?;
                }
            }
            let mut files = Vec::new();
            if ctx.format.csv() {
                files.extend(ctx.write(&format!("{stem}.csv"), &schmidt_csv(&series)?)?);
            }
            if ctx.format.json() {
                files.extend(ctx.write(&format!("{stem}.json"), &to_json_string(&json!({"series": series}))?)?);
            }
            Some(files)
        }
    };
    match written {
        Some(files) => note_written(out, &files)?,
        None => writeln!(out, "no --out directory given; nothing written")?,
    }
    Ok(())
}

fn cmd_tau_scan(args: &TauArgs, out: &mut dyn Write) -> Result<()> {
    let ctx = Ctx::new(&args.common)?;
    if args.samples < 2 {
        return Err(Error::invalid("--samples must be at least 2"));
    }
    if args.to_fs.partial_cmp(&args.from_fs) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::invalid("--to-fs must exceed --from-fs"));
    }
    let (state, coupler, sn) = match &ctx.config {
        Some(cfg) => {
            cfg.check_polarizations()?;
            let built = cfg.state()?.build(&ctx.numerics)?;
            (
                TwoSourceState::identical(&built.jsa, cfg.theta, 0.0)?,
                cfg.coupler()?.clone(),
                built.schmidt_number,
            )
        }
        None => {
            let (jsa, coupler, sn) = tau_preset(args.sn, &ctx.numerics)?;
            (TwoSourceState::identical(&jsa, 0.0, 0.0)?, coupler, Some(sn))
        }
    };
    let taus: Vec<f64> = linspace(fs(args.from_fs), fs(args.to_fs), args.samples);
    let sampling = if args.envelope_only {
        TauSampling::EnvelopeOnly
    } else {
        TauSampling::Resolved
    };
    let scan = tau_scan(&state, &coupler, &taus, sampling)?;
    let fwhm = scan.envelope_fwhm.map(to_fs);
    let inversion = if args.envelope_only { None } else { scan.first_inversion().map(to_fs) };
    writeln!(
        out,
        "{} points, envelope FWHM = {}, first inversion = {}",
        scan.points.len(),
        fwhm.map_or("n/a".into(), |v| format!("{v:.4} fs")),
        inversion.map_or("n/a".into(), |v| format!("{v:.4} fs"))
    )?;
    let fmt_opt = |v: Option<f64>| v.map_or("NA".to_string(), crate::export::format_number);
    let mut comments = vec![
        format!("sampling={}", if args.envelope_only { "envelope-only" } else { "resolved" }),
        format!("envelope_fwhm_fs={}", fmt_opt(fwhm)),
        format!("first_inversion_fs={}", fmt_opt(inversion)),
    ];
    if let Some(sn) = sn {
        comments.push(format!("schmidt_number={}", crate::export::format_number(sn)));
    }
    let rows: Vec<Vec<Option<f64>>> = scan
        .points
        .iter()
        .map(|p| vec![Some(to_fs(p.tau)), Some(p.ps_total), Some(p.ps_interference), Some(p.envelope)])
        .collect();
    let mut files = Vec::new();
    if ctx.format.csv() {
        files.extend(ctx.write("tau_scan.csv", &table_csv(&comments, &["tau_fs", "P_S", "P_SI", "envelope"], &rows)?)?);
    }
    if ctx.format.json() {
        let doc = json!({
            "sampling": if args.envelope_only { "envelope-only" } else { "resolved" },
            "envelope_fwhm_fs": fwhm,
            "first_inversion_fs": inversion,
            "schmidt_number": sn,
            "tau_fs": scan.points.iter().map(|p| to_fs(p.tau)).collect::<Vec<_>>(),
            "P_S": scan.points.iter().map(|p| p.ps_total).collect::<Vec<_>>(),
            "P_SI": scan.points.iter().map(|p| p.ps_interference).collect::<Vec<_>>(),
            "envelope": scan.points.iter().map(|p| p.envelope).collect::<Vec<_>>(),
        });
        files.extend(ctx.write("tau_scan.json", &to_json_string(&doc)?)?);
    }
    note_written(out, &files)
}

fn cmd_compensate(args: &CompensateArgs, out: &mut dyn Write) -> Result<()> {
    let ctx = Ctx::new(&args.common)?;
    let cfg = ctx.config()?;
    let coupler = cfg.coupler()?;
    cfg.check_polarizations()?;
    let sc = cfg.state()?;
    let pol = sc.polarizations()[0];
    let halfwidth = match args.halfwidth_nm {
        Some(h) if h.is_finite() && h > 0.0 => nm(h),
        Some(h) => return Err(Error::invalid(format!("--halfwidth-nm must be positive, got {h}"))),
        None => {
            let ld = cfg.lambda_deg.unwrap_or(sc.degeneracy_wavelength());
            coupler
                .dimensionless_params(pol, ld)?
                .period_t_lambda
                .map(|t| t / 2.0)
                .ok_or_else(|| Error::invalid("coupler has no dispersion; pass --halfwidth-nm"))?
        }
    };
    let built = sc.build(&ctx.numerics)?;
    let state = TwoSourceState::identical(&built.jsa, cfg.theta, cfg.tau)?;
    let r = optimize_5050_shift(&state, coupler, halfwidth)?;
    let (l1, l2) = (sc.photon1.center_wavelength, sc.photon2.center_wavelength);
    let before = center_splitting_ratios(coupler, pol, l1, l2)?;
    let after = center_splitting_ratios(&coupler.shift_5050(r.delta_lambda_star), pol, l1, l2)?;
    writeln!(
        out,
        "delta_lambda* = {:.6} nm, P_S {:.6} -> {:.6} ({} evaluations)",
        to_nm(r.delta_lambda_star),
        r.ps_before,
        r.ps_after,
        r.evaluations
    )?;
    writeln!(
        out,
        "eta at photon centers: ({:.4}, {:.4}) -> ({:.4}, {:.4})",
        before.0, before.1, after.0, after.1
    )?;
    if r.delta_lambda_star == 0.0 {
        writeln!(out, "note: no shift improves P_S; coupler left unchanged")?;
    }
    let doc = json!({
        "delta_lambda_star_nm": to_nm(r.delta_lambda_star),
        "ps_before": r.ps_before,
        "ps_after": r.ps_after,
        "evaluations": r.evaluations,
        "eta_before": [before.0, before.1],
        "eta_after": [after.0, after.1],
    });
    if let Some(p) = ctx.write("compensate.json", &to_json_string(&doc)?)? {
        note_written(out, &[p])?;
    }
    Ok(())
}

fn cmd_table1(ctx: &Ctx, out: &mut dyn Write) -> Result<()> {
    let rows = table1(&ctx.numerics)?;
    writeln!(out, "|l2-l1| (nm)  dl (nm)  SN      P_S     V_S     (expected P_S, V_S)")?;
    for r in &rows {
        writeln!(
            out,
            "{:>12.0}  {:>7.0}  {:.3}  {:.4}  {}  ({:.3}, {:.3}){}",
            r.row.nondegeneracy_nm,
            r.row.bandwidth_nm,
            r.sn_achieved,
            r.ps_total,
            r.vis_s.map_or("  NA  ".into(), |v| format!("{v:.4}")),
            r.row.expected_ps,
            r.row.expected_vs,
            if r.row.surrogate_only { " *" } else { "" }
        )?;
    }
    writeln!(
        out,
        "* linear coupling-strength surrogate; the device's curvature at 200 nm is not modeled, so P_S is overestimated"
    )?;
    let rows_csv: Vec<Vec<Option<f64>>> = rows
        .iter()
        .map(|r| {
            vec![
                Some(r.row.nondegeneracy_nm),
                Some(r.row.bandwidth_nm),
                Some(r.sn_achieved),
                Some(r.pump_fwhm_nm),
                Some(r.ps_total),
                r.vis_s,
            ]
        })
        .collect();
    let mut files = Vec::new();
    if ctx.format.csv() {
        files.extend(ctx.write(
            "table1.csv",
            &table_csv(
                &["table=1 coupler=linear-surrogate".into()],
                &["nondegeneracy_nm", "bandwidth_nm", "sn", "pump_fwhm_nm", "P_S", "V_S"],
                &rows_csv,
            )?,
        )?);
    }
    if ctx.format.json() {
        files.extend(ctx.write("table1.json", &to_json_string(&json!({"rows": rows}))?)?);
    }
    note_written(out, &files)
}

/// Parses arguments, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
