//! CSV emission and gnuplot scripts.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analytic::{normalized_by_peak, CrossPair, SweepParam};
use crate::mc::Experiment;
use crate::CorrelationRecord;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("no records to write")]
    Empty,

    #[error("analytic and Monte Carlo results cover different grids ({analytic} vs {montecarlo} points)")]
    GridMismatch { analytic: usize, montecarlo: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

pub const ANALYTIC_COLUMNS: [&str; 11] = [
    "phi",
    "psi",
    "xi",
    "theta",
    "i_A",
    "i_B",
    "i_C",
    "i_D",
    "R_AD",
    "R_BC",
    "R_AD_normalized",
];

pub const MONTECARLO_COLUMNS: [&str; 5] = ["R_hat_AD", "stderr_AD", "R_hat_BC", "stderr_BC", "n_pairs"];

/// 16 significant digits in scientific notation.
fn num(x: f64) -> String {
    format!("{x:.15e}")
}

/// Renders the CSV text. With `montecarlo`, its points must be on the same
/// grid as `records`.
pub fn render_csv(records: &[CorrelationRecord], montecarlo: Option<&Experiment>) -> Result<String, OutputError> {
    if records.is_empty() {
        return Err(OutputError::Empty);
    }
    if let Some(exp) = montecarlo {
        if exp.points.len() != records.len() {
            return Err(OutputError::GridMismatch {
                analytic: records.len(),
                montecarlo: exp.points.len(),
            });
        }
    }
    let normalized = normalized_by_peak(records);
    let mut out = String::new();
    let mut header: Vec<&str> = ANALYTIC_COLUMNS.to_vec();
    if montecarlo.is_some() {
        header.extend(MONTECARLO_COLUMNS);
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for (k, r) in records.iter().enumerate() {
        let s = &r.settings;
        let i = &r.intensities;
        let mut fields: Vec<String> = [s.phi, s.psi, s.xi, s.theta, i.a, i.b, i.c, i.d, r.r_ad, r.r_bc, normalized[k]]
            .into_iter()
            .map(num)
            .collect();
        if let Some(exp) = montecarlo {
            let p = &exp.points[k];
            let ad = p.estimate(CrossPair::AD);
            let bc = p.estimate(CrossPair::BC);
            fields.extend([num(ad.value), num(ad.std_error), num(bc.value), num(bc.std_error)]);
            fields.push(p.counts.post_selected_pairs.to_string());
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Writes the CSV to `path`. Nothing is created when `records` is empty.
pub fn emit_csv(
    records: &[CorrelationRecord],
    montecarlo: Option<&Experiment>,
    path: &Path,
) -> Result<(), OutputError> {
    let text = render_csv(records, montecarlo)?;
    write_file(path, &text)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), OutputError> {
    let io_err = |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(text.as_bytes()).map_err(io_err)?;
    f.flush().map_err(io_err)
}

fn column_of(param: SweepParam) -> usize {
    match param {
        SweepParam::Phi | SweepParam::Rho => 1,
        SweepParam::Psi => 2,
        SweepParam::Xi | SweepParam::Zeta => 3,
        SweepParam::Theta => 4,
    }
}

/// Plot script for the CSV at `csv`: line plots for one swept axis, a pm3d
/// map of `R_AD` for two or more (using the first two axes).
pub fn gnuplot_script(csv: &Path, axes: &[SweepParam], montecarlo: bool) -> String {
    let name = csv.display();
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    match axes {
        [x] => {
            let c = column_of(*x);
            s.push_str(&format!("set xlabel '{x}'\n"));
            s.push_str(&format!(
                "plot '{name}' using {c}:11 with lines title 'R_AD normalized', \\\n     '' using {c}:5 with lines title 'I_A', \\\n     '' using {c}:6 with lines title 'I_B'"
            ));
            if montecarlo {
                s.push_str(&format!(", \\\n     '' using {c}:($12/4):($13/4) with yerrorbars title 'R_hat_AD / 4'"));
            }
            s.push('\n');
        }
        _ => {
            let (cx, cy) = (column_of(axes[0]), column_of(axes[1]));
            s.push_str(&format!("set xlabel '{}'\nset ylabel '{}'\n", axes[0], axes[1]));
            s.push_str("set pm3d map\nset dgrid3d\n");
            s.push_str(&format!("splot '{name}' using {cx}:{cy}:9 title 'R_AD'\n"));
        }
    }
    s.push_str("pause -1\n");
    s
}
