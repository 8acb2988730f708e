use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::Result;

/// Overall verdict of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
    /// A row's eigensolve did not converge.
    SolverFailure,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
            Status::SolverFailure => "solver-failure",
        }
    }

    /// Worst of two verdicts.
    pub fn and(self, other: Status) -> Status {
        self.max(other)
    }

    pub fn from_ok(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Two-column series for external plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    pub fn new(name: impl Into<String>, x: &str, y: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            x_label: x.into(),
            y_label: y.into(),
            points,
        }
    }
}

/// Rows of one experiment plus summary lines and plot series.
#[derive(Debug, Clone)]
pub struct Report<R> {
    pub schema: &'static str,
    pub version: u32,
    pub rows: Vec<R>,
    /// Written as `# key=value` lines after the rows.
    pub summary: Vec<(String, String)>,
    pub plots: Vec<PlotSeries>,
    pub status: Status,
}

impl<R: Serialize> Report<R> {
    pub fn new(schema: &'static str, version: u32) -> Self {
        Self {
            schema,
            version,
            rows: Vec::new(),
            summary: Vec::new(),
            plots: Vec::new(),
            status: Status::Pass,
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    /// Write the CSV; everything except the `generated_unix` line depends
    /// only on the rows.
    pub fn write_csv<W: Write>(&self, mut w: W, label: Option<&str>) -> Result<()> {
        writeln!(w, "# schema={}/{}", self.schema, self.version)?;
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(w, "# generated_unix={stamp}")?;
        if let Some(l) = label {
            writeln!(w, "# name={}", l.replace('\n', " "))?;
        }
        {
            let mut wr = csv::Writer::from_writer(&mut w);
            for r in &self.rows {
                wr.serialize(r)?;
            }
            wr.flush()?;
        }
        for (k, v) in &self.summary {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "# status={}", self.status.as_str())?;
        Ok(())
    }

    /// Write `<schema>.csv` into `dir`, and with `plot_data` one
    /// `<schema>_<series>.csv` per plot series. Returns the files written.
    pub fn write_to(&self, dir: &Path, label: Option<&str>, plot_data: bool) -> Result<Vec<PathBuf>> {
        let mut files = Vec::new();
        let main = dir.join(format!("{}.csv", self.schema));
        let f = std::io::BufWriter::new(std::fs::File::create(&main)?);
        self.write_csv(f, label)?;
        files.push(main);
        if plot_data {
            for p in &self.plots {
                let path = dir.join(format!("{}_{}.csv", self.schema, p.name));
                let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
                writeln!(f, "{},{}", p.x_label, p.y_label)?;
                for (x, y) in &p.points {
                    writeln!(f, "{x},{y}")?;
                }
                f.flush()?;
                files.push(path);
            }
        }
        Ok(files)
    }
}

/// Least-squares slope and intercept of `log y` against `log x` over the
/// pairs with both coordinates positive.
pub fn loglog_fit(pairs: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
