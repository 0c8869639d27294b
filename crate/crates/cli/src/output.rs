//! CSV, LaTeX and plot-data emitters. Output is deterministic for a fixed
//! (config, seed) apart from the trailing wall-time metadata line.

use std::io::Write;
use std::path::{Path, PathBuf};

use dged_core::verify::ConvergenceReport;

use crate::config::ResolvedConfig;

/// Scientific notation with 6 significant digits and a two-digit exponent
/// (e.g. 5.33287e-05).
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    let s = format!("{:.5e}", x);
    // Normalize the exponent to at least two digits.
    match s.split_once('e') {
        Some((mant, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ("-", d),
                None => ("+", exp.strip_prefix('+').unwrap_or(exp)),
            };
            format!("{mant}e{sign}{:0>2}", digits)
        }
        None => s,
    }
}

pub fn eoc_fmt(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{:.3}", x)
    }
}

pub const CONVERGE_HEADER: &str =
    "N,err_u_LinfL2,eoc_u_L2,err_u_LinfdG,eoc_u_dG,err_v_LinfL2,eoc_v_L2,err_v_L2dG,eoc_v_dG";

/// A data file read back: metadata lines (without the leading `# `), the
/// header fields, and the numeric rows.
#[derive(Debug)]
pub struct CsvContents {
    pub metadata: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Read any file this tool emits: `#` metadata lines, one header line,
/// comma-separated numeric rows.
pub fn read_csv(path: &Path) -> std::io::Result<CsvContents> {
    let text = std::fs::read_to_string(path)?;
    let mut metadata = Vec::new();
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            metadata.push(rest.trim().to_string());
        } else if header.is_empty() {
            header = line.split(',').map(|s| s.trim().to_string()).collect();
        } else if !line.trim().is_empty() {
            let row: Result<Vec<f64>, _> =
                line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            match row {
                Ok(r) => rows.push(r),
                Err(e) => {
                    return Err(std::io::Error::new(
                        std::io::ErrorKind::InvalidData,
                        format!("unparseable row '{line}': {e}"),
                    ))
                }
            }
        }
    }
    Ok(CsvContents {
        metadata,
        header,
        rows,
    })
}

fn metadata_lines(cfg: &ResolvedConfig, command: &str, extra: &[String]) -> Vec<String> {
    let mut lines = vec![
        format!("# dged {command}"),
        format!("# gamma = {}", sci(cfg.gamma)),
        format!("# mu = {}", sci(cfg.mu)),
        format!(
            "# sigma = {}",
            sci(cfg
                .sigma
                .unwrap_or(4.0 * ((cfg.degree + 1) * (cfg.degree + 1)) as f64))
        ),
        format!("# degree = {}", cfg.degree),
        format!("# T = {}", sci(cfg.t_final)),
        format!("# dt_rule = {}", cfg.dt_rule_name()),
        format!("# boundary = {}", cfg.boundary_name()),
        format!("# seed = {}", cfg.seed),
    ];
    lines.extend_from_slice(extra);
    lines
}

/// Write the convergence table with its metadata block. Returns the lines
/// written (for tests).
pub fn write_converge_csv(
    path: &Path,
    report: &ConvergenceReport,
    cfg: &ResolvedConfig,
    wall_seconds: f64,
) -> std::io::Result<()> {
    let mut extra = vec![format!(
        "# n_list = {}",
        report
            .rows
            .iter()
            .map(|r| r.n_cells.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    )];
    for d in &report.diagnostics {
        extra.push(format!(
            "# level N={}: steps={} newton_max={} eta_R_T={} eta_M_T={} mu_weighted_err_v_L2dG={} energy_drift={}{}",
            d.n_cells,
            d.steps,
            d.max_newton_iters,
            sci(d.eta_r_final),
            sci(d.eta_m_final),
            sci(d.v_l2_dg_mu_weighted),
            sci(d.energy_final - d.energy_initial),
            match &d.error {
                Some(e) => format!(" FAILED: {e}"),
                None => String::new(),
            }
        ));
    }
    let mut f = std::fs::File::create(path)?;
    for line in metadata_lines(cfg, "converge", &extra) {
        writeln!(f, "{line}")?;
    }
    writeln!(f, "# wall_time_s = {:.3}", wall_seconds)?;
    writeln!(f, "{CONVERGE_HEADER}")?;
    for r in &report.rows {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{}",
            r.n_cells,
            sci(r.err_u_linf_l2),
            eoc_fmt(r.eoc_u_l2),
            sci(r.err_u_linf_dg),
            eoc_fmt(r.eoc_u_dg),
            sci(r.err_v_linf_l2),
            eoc_fmt(r.eoc_v_l2),
            sci(r.err_v_l2_dg),
            eoc_fmt(r.eoc_v_dg),
        )?;
    }
    Ok(())
}

/// Companion file of (log h, log err) pairs per norm.
pub fn write_plot_data(path: &Path, report: &ConvergenceReport) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(
        f,
        "log_h,log_err_u_LinfL2,log_err_u_LinfdG,log_err_v_LinfL2,log_err_v_L2dG"
    )?;
    for (r, d) in report.rows.iter().zip(&report.diagnostics) {
        writeln!(
            f,
            "{},{},{},{},{}",
            sci(d.h.ln()),
            sci(r.err_u_linf_l2.ln()),
            sci(r.err_u_linf_dg.ln()),
            sci(r.err_v_linf_l2.ln()),
            sci(r.err_v_l2_dg.ln()),
        )?;
    }
    Ok(())
}

/// Rows in the benchmark tables' column order.
pub fn write_latex(path: &Path, report: &ConvergenceReport) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "% N & e_u L\\infty(L2) & EOC & e_u L\\infty(dG) & EOC & e_v L\\infty(L2) & EOC & e_v L2(dG) & EOC")?;
    for r in &report.rows {
        writeln!(
            f,
            "{} & {} & {} & {} & {} & {} & {} & {} & {} \\\\",
            r.n_cells,
            sci(r.err_u_linf_l2),
            eoc_fmt(r.eoc_u_l2),
            sci(r.err_u_linf_dg),
            eoc_fmt(r.eoc_u_dg),
            sci(r.err_v_linf_l2),
            eoc_fmt(r.eoc_v_l2),
            sci(r.err_v_l2_dg),
            eoc_fmt(r.eoc_v_dg),
        )?;
    }
    Ok(())
}

pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    path.with_file_name(format!("{stem}{suffix}"))
}
