use std::fmt;
use std::io::{self, Write};

use super::MmsError;

/// Which discretization parameter a study refines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudyAxis {
    Time,
    Space,
}

impl fmt::Display for StudyAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StudyAxis::Time => "time",
            StudyAxis::Space => "space",
        })
    }
}

/// One simulation of a study.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    /// `k` for a time study, `h` for a space study.
    pub resolution: f64,
    pub error_l2: f64,
    pub error_linf: f64,
    pub steps: usize,
    /// Largest `| |m|² - 1 |` over every level of the run.
    pub max_len_dev: f64,
    /// Largest inner iteration count over every step.
    pub max_fp_iters: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub axis: StudyAxis,
    /// Sorted by decreasing resolution.
    pub rows: Vec<ConvergenceRow>,
    pub order_l2: f64,
    pub order_linf: f64,
}

impl ConvergenceTable {
    pub fn new(axis: StudyAxis, mut rows: Vec<ConvergenceRow>) -> Result<Self, MmsError> {
        rows.sort_by(|a, b| b.resolution.total_cmp(&a.resolution));
        let pts: Vec<_> = rows
            .iter()
            .map(|r| (r.resolution, r.error_l2, r.error_linf))
            .collect();
        let (order_l2, order_linf) = fit_order(&pts)?;
        Ok(ConvergenceTable {
            axis,
            rows,
            order_l2,
            order_linf,
        })
    }

    pub fn max_len_dev(&self) -> f64 {
        self.rows.iter().map(|r| r.max_len_dev).fold(0.0, f64::max)
    }

    /// CSV with a `resolution,error_l2,error_linf` header and a final
    /// `order,<l2>,<linf>` row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "resolution,error_l2,error_linf")?;
        for r in &self.rows {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", r.resolution, r.error_l2, r.error_linf)?;
        }
        writeln!(w, "order,{:.16e},{:.16e}", self.order_l2, self.order_linf)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Least-squares slopes of `log(error)` against `log(size)` for the ℓ² and
/// ℓ∞ columns of `(size, error_l2, error_linf)` rows.
pub fn fit_order(rows: &[(f64, f64, f64)]) -> Result<(f64, f64), MmsError> {
    if rows.len() < 2 {
        return Err(MmsError::InvalidArgument(
            "fitting an order needs at least two rows".into(),
        ));
    }
    for &(s, e2, ei) in rows {
        if !(s > 0.0 && e2 > 0.0 && ei > 0.0) {
            return Err(MmsError::InvalidArgument(format!(
                "sizes and errors must be positive, got ({s:e}, {e2:e}, {ei:e})"
            )));
        }
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let slope = |ys: Vec<f64>| -> Result<f64, MmsError> {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx == 0.0 {
            return Err(MmsError::InvalidArgument(
                "all sizes are equal; no slope to fit".into(),
            ));
        }
        Ok(sxy / sxx)
    };
    Ok((
        slope(rows.iter().map(|r| r.1.ln()).collect())?,
        slope(rows.iter().map(|r| r.2.ln()).collect())?,
    ))
}
