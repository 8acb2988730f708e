use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convexgeom::{
    ball_sandwich, bonnesen_deficit, bump_counterexample, chebyshev_inball, hull_counterexample_with,
    min_enclosing_ball, random_convex_polygon, sandwich_constant_scan, Ball, ConvexPolygon,
};
use crate::eigsolve::normal_derivative_trace;
use crate::gridcore::{convexity_score, superlevel_set, volume, ShapeSpec};
use crate::harness::common::{
    ball_reference, equal_volume_ball, is_solver_failure, margin_verdict, shape_label, shape_measure, solve,
    BallReference,
};
use crate::harness::level::level_profile;
use crate::harness::report::{loglog_fit, PlotSeries, Report, Status};
use crate::harness::ExperimentConfig;
use crate::par;
use crate::rearrange::polya_szego_report;
use crate::{Error, Result};

fn domains_or_disk(cfg: &ExperimentConfig) -> Vec<ShapeSpec> {
    if cfg.domains.is_empty() {
        vec![ShapeSpec::Disk {
            center: [0.0; 2],
            radius: 1.0,
        }]
    } else {
        cfg.domains.clone()
    }
}

/// `(shape, h)` jobs in config order: spacing outer, domain inner.
fn jobs(cfg: &ExperimentConfig, domains: &[ShapeSpec]) -> Vec<(ShapeSpec, f64)> {
    cfg.spacings()
        .into_iter()
        .flat_map(|h| domains.iter().map(move |d| (d.clone(), h)))
        .collect()
}

/// Collect per-row results: solver failures become summary lines and mark the
/// report, anything else aborts.
fn collect<R: Serialize, T>(
    report: &mut Report<R>,
    labels: &[String],
    results: Vec<Result<T>>,
) -> Result<Vec<Option<T>>> {
    let mut out = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => out.push(Some(v)),
            Err(e) if is_solver_failure(&e) => {
                log::error!("row {i} ({}): {e}", labels[i]);
                report.note(&format!("failed[{i}]"), format!("{}: {e}", labels[i]));
                report.status = report.status.and(Status::SolverFailure);
                out.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn labels(jobs: &[(ShapeSpec, f64)]) -> Vec<String> {
    jobs.iter().map(|(s, h)| format!("{} h={h}", shape_label(s))).collect()
}

/// Ball references for every distinct `(dim, m, h)`, in first-seen order.
fn ball_references(cfg: &ExperimentConfig, keys: &[(usize, f64, f64)]) -> Result<Vec<BallReference>> {
    par::map_slice(keys, |&(dim, m, h)| ball_reference(cfg, dim, m, h))
        .into_iter()
        .collect()
}

fn dedup_keys(keys: &[(usize, f64, f64)]) -> (Vec<(usize, f64, f64)>, Vec<usize>) {
    let mut uniq: Vec<(usize, f64, f64)> = Vec::new();
    let idx = keys
        .iter()
        .map(|k| match uniq.iter().position(|u| u == k) {
            Some(i) => i,
            None => {
                uniq.push(*k);
                uniq.len() - 1
            }
        })
        .collect();
    (uniq, idx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigRow {
    pub domain: String,
    pub dim: usize,
    pub h: f64,
    pub s: f64,
    pub cells: usize,
    pub volume: f64,
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
    pub cg_iterations: usize,
    pub negative_cells: usize,
    /// `s ≥ 1/2`: kernel quadrature outside its accuracy range.
    pub extrapolation: bool,
}

pub fn run_eig(cfg: &ExperimentConfig) -> Result<Report<EigRow>> {
    let mut report = Report::new("eig", 1);
    let jobs = jobs(cfg, &domains_or_disk(cfg));
    let results = par::map_slice(&jobs, |(shape, h)| {
        solve(cfg, shape, *h).map(|sv| {
            let d = sv.op.domain();
            let row = EigRow {
                domain: shape_label(shape),
                dim: d.dim(),
                h: *h,
                s: cfg.s,
                cells: d.interior_count(),
                volume: volume(d),
                lambda: sv.pair.lambda,
                residual: sv.pair.residual,
                iterations: sv.pair.iterations,
                cg_iterations: sv.pair.cg_iterations,
                negative_cells: sv.pair.negative_cells,
                extrapolation: cfg.s >= 0.5,
            };
            (row, sv.pair.residual_history)
        })
    });
    let labels = labels(&jobs);
    for (i, r) in collect(&mut report, &labels, results)?.into_iter().enumerate() {
        if let Some((row, hist)) = r {
            let pts = hist.iter().enumerate().map(|(k, &v)| (k as f64, v)).collect();
            report.plots.push(PlotSeries::new(format!("residual_{i}"), "iteration", "residual", pts));
            report.rows.push(row);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FkRow {
    pub domain: String,
    pub h: f64,
    /// Raster volume of the domain.
    pub volume: f64,
    /// Measure of the comparison ball.
    pub measure: f64,
    pub lambda: f64,
    pub ball_lambda: f64,
    pub margin: f64,
    pub noise_floor: f64,
    pub verdict: String,
    pub rayleigh_src: Option<f64>,
    pub rayleigh_ast: Option<f64>,
    pub ps_local_ok: Option<bool>,
    pub ps_nonlocal_ok: Option<bool>,
    pub ps_equimeasurable: Option<bool>,
    pub extrapolation: bool,
}

/// Ellipses of the sweep's aspect ratios at its common area.
pub fn ellipse_family(aspects: &[f64], area: f64) -> Vec<ShapeSpec> {
    aspects
        .iter()
        .map(|&q| ShapeSpec::Ellipse {
            a: (area * q / PI).sqrt(),
            b: (area / (PI * q)).sqrt(),
            center: [0.0; 2],
        })
        .collect()
}

pub fn run_fk_sweep(cfg: &ExperimentConfig) -> Result<Report<FkRow>> {
    let mut report = Report::new("fk-sweep", 1);
    let mut domains = cfg.domains.clone();
    domains.extend(ellipse_family(&cfg.fk_sweep.aspects, cfg.fk_sweep.area));
    if domains.is_empty() {
        domains = domains_or_disk(cfg);
    }
    let jobs = jobs(cfg, &domains);
    let keys: Vec<(usize, f64, f64)> = jobs
        .iter()
        .map(|(s, h)| Ok((s.dim(), shape_measure(s, *h)?, *h)))
        .collect::<Result<_>>()?;
    let (uniq, idx) = dedup_keys(&keys);
    let refs = ball_references(cfg, &uniq)?;
    let with_ps = cfg.fk_sweep.polya_szego;
    let results = par::map_slice(&(0..jobs.len()).collect::<Vec<_>>(), |&i| {
        let (shape, h) = &jobs[i];
        let sv = solve(cfg, shape, *h)?;
        let b = refs[idx[i]];
        let margin = sv.pair.lambda - b.lambda;
        let ps = if with_ps {
            Some(polya_szego_report(&sv.op, &sv.pair.u0, cfg.slack)?)
        } else {
            None
        };
        Ok((
            FkRow {
                domain: shape_label(shape),
                h: *h,
                volume: volume(sv.op.domain()),
                measure: keys[i].1,
                lambda: sv.pair.lambda,
                ball_lambda: b.lambda,
                margin,
                noise_floor: b.noise,
                verdict: margin_verdict(margin, b.noise).to_string(),
                rayleigh_src: ps.as_ref().map(|p| p.rayleigh_src),
                rayleigh_ast: ps.as_ref().map(|p| p.rayleigh_ast),
                ps_local_ok: ps.as_ref().map(|p| p.local_ok),
                ps_nonlocal_ok: ps.as_ref().map(|p| p.nonlocal_ok),
                ps_equimeasurable: ps.as_ref().map(|p| p.equimeasurable),
                extrapolation: cfg.s >= 0.5,
            },
            ps.map_or(false, |p| p.degenerate),
        ))
    });
    let labels = labels(&jobs);
    for (row, degenerate) in collect(&mut report, &labels, results)?.into_iter().flatten() {
        let verdict = match row.verdict.as_str() {
            "pass" => Status::Pass,
            "inconclusive" => Status::Inconclusive,
            _ => Status::Fail,
        };
        let ps = if degenerate {
            Status::Inconclusive
        } else {
            Status::from_ok(
                row.ps_local_ok.unwrap_or(true)
                    && row.ps_nonlocal_ok.unwrap_or(true)
                    && row.ps_equimeasurable.unwrap_or(true),
            )
        };
        report.status = report.status.and(verdict).and(ps);
        report.rows.push(row);
    }
    let family: Vec<String> = ellipse_family(&cfg.fk_sweep.aspects, cfg.fk_sweep.area)
        .iter()
        .map(shape_label)
        .collect();
    if !family.is_empty() {
        for h in cfg.spacings() {
            let fam: Vec<(f64, &FkRow)> = cfg
                .fk_sweep
                .aspects
                .iter()
                .zip(&family)
                .filter_map(|(&q, l)| report.rows.iter().find(|r| r.h == h && &r.domain == l).map(|r| (q, r)))
                .collect();
            let increasing = fam.windows(2).all(|w| w[1].1.margin >= w[0].1.margin);
            let pts = fam.iter().map(|(q, r)| (*q, r.lambda)).collect();
            report.note(&format!("margins_increasing[h={h}]"), increasing);
            report.plots.push(PlotSeries::new(format!("lambda_vs_aspect_h{h}"), "aspect", "lambda", pts));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRow {
    pub h: f64,
    pub amplitude: f64,
    pub mode: u32,
    pub lambda: f64,
    pub ball_lambda: f64,
    /// `λ(Ω)/λ(B) - 1`.
    pub eps: f64,
    /// Relative noise floor of the ball eigenvalue.
    pub eps_noise: f64,
    pub conclusive: bool,
    /// `1 - |B⁽¹⁾|/|Ω|` with the Chebyshev inball of the polygonization.
    pub inner_defect: f64,
    /// `1 - |Ω|/|B⁽²⁾|` with the ball concentric to the inball.
    pub outer_defect: f64,
    /// Same with the minimal enclosing ball.
    pub enclosing_defect: f64,
    pub inball_radius: f64,
    pub outer_radius: f64,
}

pub fn run_stability(cfg: &ExperimentConfig) -> Result<Report<StabilityRow>> {
    let sc = &cfg.stability;
    let mut report = Report::new("stability", 1);
    let shapes: Vec<ShapeSpec> = sc
        .amplitudes
        .iter()
        .map(|&a| ShapeSpec::PerturbedDisk {
            radius: sc.radius,
            amplitude: a,
            mode: sc.mode,
            center: [0.0; 2],
        })
        .collect();
    let polys: Vec<ConvexPolygon> = shapes
        .iter()
        .map(|s| {
            ConvexPolygon::new(s.boundary_curve(sc.polygon_vertices))
                .map_err(|e| Error::Config(format!("{} is not convex: {e}", shape_label(s))))
        })
        .collect::<Result<_>>()?;
    let jobs = jobs(cfg, &shapes);
    let noise: Vec<BallReference> = cfg
        .spacings()
        .iter()
        .map(|&h| ball_reference(cfg, 2, PI * sc.radius * sc.radius, h))
        .collect::<Result<_>>()?;
    let per_h = shapes.len();
    let results = par::map_slice(&(0..jobs.len()).collect::<Vec<_>>(), |&i| {
        let (shape, h) = &jobs[i];
        let poly = &polys[i % per_h];
        let m = shape_measure(shape, *h)?;
        let lambda = solve(cfg, shape, *h)?.pair.lambda;
        let ball_lambda = solve(cfg, &equal_volume_ball(2, m), *h)?.pair.lambda;
        let inball = chebyshev_inball(poly);
        let cert = ball_sandwich(poly, &inball)?;
        let mec = min_enclosing_ball(poly);
        let eps = lambda / ball_lambda - 1.0;
        let eps_noise = noise[i / per_h].noise / noise[i / per_h].lambda;
        Ok(StabilityRow {
            h: *h,
            amplitude: sc.amplitudes[i % per_h],
            mode: sc.mode,
            lambda,
            ball_lambda,
            eps,
            eps_noise,
            conclusive: eps.abs() >= 2.0 * eps_noise,
            inner_defect: cert.eps_in,
            outer_defect: cert.outer_defect,
            enclosing_defect: 1.0 - poly.area() / mec.area(),
            inball_radius: inball.radius,
            outer_radius: cert.outer.radius,
        })
    });
    let labels = labels(&jobs);
    report.rows = collect(&mut report, &labels, results)?.into_iter().flatten().collect();
    for h in cfg.spacings() {
        let rows: Vec<StabilityRow> = report.rows.iter().filter(|r| r.h == h).cloned().collect();
        let fk_ok = rows.iter().all(|r| r.eps >= -2.0 * r.eps_noise);
        let mut ordered: Vec<&StabilityRow> = rows
            .iter()
            .filter(|r| r.conclusive || r.amplitude == 0.0)
            .collect();
        ordered.sort_by(|a, b| a.eps.total_cmp(&b.eps));
        let tol = 1e-12;
        let monotone = ordered.windows(2).all(|w| {
            w[1].inner_defect >= w[0].inner_defect - tol && w[1].outer_defect >= w[0].outer_defect - tol
        });
        let fit_pts = |f: fn(&StabilityRow) -> f64| -> Vec<(f64, f64)> {
            rows.iter().filter(|r| r.conclusive && r.eps > 0.0).map(|r| (r.eps, f(r))).collect()
        };
        let inner = fit_pts(|r| r.inner_defect);
        let outer = fit_pts(|r| r.outer_defect);
        let slope = |p: &[(f64, f64)]| loglog_fit(p).map_or("n/a".to_string(), |(k, _)| k.to_string());
        report.note(&format!("eps_nonnegative[h={h}]"), fk_ok);
        report.note(&format!("defects_monotone[h={h}]"), monotone);
        report.note(&format!("inner_slope[h={h}]"), slope(&inner));
        report.note(&format!("outer_slope[h={h}]"), slope(&outer));
        report.status = report.status.and(Status::from_ok(fk_ok && monotone));
        if rows.iter().any(|r| !r.conclusive && r.amplitude != 0.0) {
            report.status = report.status.and(Status::Inconclusive);
        }
        report.plots.push(PlotSeries::new(format!("inner_defect_h{h}"), "eps", "inner_defect", inner));
        report.plots.push(PlotSeries::new(format!("outer_defect_h{h}"), "eps", "outer_defect", outer));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperlevelRow {
    pub domain: String,
    pub h: f64,
    pub delta: f64,
    /// `|Ω_δ|`.
    pub volume: f64,
    pub domain_volume: f64,
    pub eps: f64,
    /// The measured ratio fell below the noise floor, which is used instead.
    pub eps_from_noise: bool,
    pub bound_factor: f64,
    pub bound: f64,
    pub holds: bool,
    pub convexity: f64,
    pub convexity_ok: Option<bool>,
    pub empty: bool,
}

/// The superlevel measure bound factor `1 - (2n/s) max{δ m^{1/2}, ε}`.
pub fn superlevel_bound_factor(dim: usize, s: f64, delta: f64, m: f64, eps: f64) -> f64 {
    1.0 - (2.0 * dim as f64 / s) * (delta * m.sqrt()).max(eps)
}

/// Levels for the superlevel scan, ascending.
pub fn superlevel_deltas(cfg: &ExperimentConfig, m: f64) -> Vec<f64> {
    let sc = &cfg.superlevel;
    let mut d = if !sc.deltas.is_empty() {
        sc.deltas.clone()
    } else {
        let top = sc.max_fraction * 0.5 / m.sqrt();
        let n = sc.levels.max(1);
        (0..n)
            .map(|k| {
                let f = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
                top * sc.min_ratio.powf(f)
            })
            .collect()
    };
    d.sort_by(f64::total_cmp);
    d
}

pub fn run_superlevel(cfg: &ExperimentConfig) -> Result<Report<SuperlevelRow>> {
    let mut report = Report::new("superlevel", 1);
    let jobs = jobs(cfg, &domains_or_disk(cfg));
    let results = par::map_slice(&jobs, |(shape, h)| {
        let sv = solve(cfg, shape, *h)?;
        let b = ball_reference(cfg, shape.dim(), shape_measure(shape, *h)?, *h)?;
        let d = sv.op.domain();
        let m = volume(d);
        let dim = d.dim();
        let measured = sv.pair.lambda / b.lambda - 1.0;
        let floor = b.noise / b.lambda;
        let (eps, from_noise) = if measured > floor {
            (measured, false)
        } else {
            (floor, true)
        };
        let deltas = superlevel_deltas(cfg, m);
        let n_check = cfg.superlevel.convexity_levels;
        let threshold = 1.0 - cfg.superlevel.convexity_factor * h;
        let mut rows = Vec::with_capacity(deltas.len());
        for (k, &delta) in deltas.iter().enumerate() {
            let sub = superlevel_set(&sv.pair.u0, delta)?;
            let (vol, convexity) = match &sub {
                Some(g) => (volume(g), if dim == 2 { convexity_score(g) } else { 1.0 }),
                None => (0.0, 0.0),
            };
            let factor = superlevel_bound_factor(dim, cfg.s, delta, m, eps);
            let bound = factor * m;
            rows.push(SuperlevelRow {
                domain: shape_label(shape),
                h: *h,
                delta,
                volume: vol,
                domain_volume: m,
                eps,
                eps_from_noise: from_noise,
                bound_factor: factor,
                bound,
                holds: vol >= bound,
                convexity,
                convexity_ok: (k < n_check).then_some(convexity >= threshold),
                empty: sub.is_none(),
            });
        }
        Ok(rows)
    });
    let labels = labels(&jobs);
    for (i, rows) in collect(&mut report, &labels, results)?.into_iter().enumerate() {
        let Some(rows) = rows else { continue };
        let ok = rows.iter().all(|r| r.holds && r.convexity_ok.unwrap_or(true));
        report.status = report.status.and(Status::from_ok(ok));
        let m = rows.first().map_or(1.0, |r| r.domain_volume);
        let frac = rows.iter().map(|r| (r.delta, r.volume / m)).collect();
        let bound = rows.iter().map(|r| (r.delta, r.bound_factor)).collect();
        report.plots.push(PlotSeries::new(format!("volume_fraction_{i}"), "delta", "volume_fraction", frac));
        report.plots.push(PlotSeries::new(format!("bound_factor_{i}"), "delta", "bound_factor", bound));
        report.rows.extend(rows);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelProfileRow {
    pub domain: String,
    pub h: f64,
    pub t: f64,
    pub volume: f64,
    pub perimeter: f64,
    pub contour: f64,
    pub psi: f64,
    pub gamma_star: f64,
    pub skipped: bool,
}

pub fn run_level_profile(cfg: &ExperimentConfig) -> Result<Report<LevelProfileRow>> {
    let mut report = Report::new("level-profile", 1);
    let jobs = jobs(cfg, &domains_or_disk(cfg));
    let results = par::map_slice(&jobs, |(shape, h)| {
        let sv = solve(cfg, shape, *h)?;
        let b = ball_reference(cfg, shape.dim(), shape_measure(shape, *h)?, *h)?;
        let prof = level_profile(&sv.pair.u0, cfg.level_profile.levels)?;
        let eps = sv.pair.lambda / b.lambda - 1.0;
        Ok((prof, b, eps))
    });
    let labels = labels(&jobs);
    for (i, r) in collect(&mut report, &labels, results)?.into_iter().enumerate() {
        let Some((prof, b, eps)) = r else { continue };
        let (shape, h) = &jobs[i];
        let step1 = prof.step1_value();
        report.note(&format!("step1[{i}]"), step1);
        report.note(&format!("eps[{i}]"), eps);
        report.note(&format!("ball_bound[{i}]"), b.lambda * eps.max(b.noise / b.lambda));
        report.note(&format!("skipped[{i}]"), prof.skipped());
        report.note(&format!("t_max[{i}]"), prof.t_max);
        report.status = report.status.and(Status::from_ok(prof.volume_monotone()));
        report
            .plots
            .push(PlotSeries::new(format!("volume_{i}"), "t", "volume", prof.rows.iter().map(|r| (r.t, r.volume)).collect()));
        report
            .plots
            .push(PlotSeries::new(format!("psi_{i}"), "t", "psi", prof.rows.iter().map(|r| (r.t, r.psi)).collect()));
        let label = shape_label(shape);
        report.rows.extend(prof.rows.into_iter().map(|r| LevelProfileRow {
            domain: label.clone(),
            h: *h,
            t: r.t,
            volume: r.volume,
            perimeter: r.perimeter,
            contour: r.contour,
            psi: r.psi,
            gamma_star: r.gamma_star,
            skipped: r.skipped,
        }));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub domain: String,
    pub h: f64,
    pub t: f64,
    pub lambda: f64,
    /// Eigenvalue of `tΩ` on the grid of spacing `t·h`.
    pub lambda_scaled: f64,
    /// `t^{-2s} λ(Ω)`.
    pub lower: f64,
    /// `t^{-2} λ(Ω)`.
    pub upper: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

pub fn run_scaling(cfg: &ExperimentConfig) -> Result<Report<ScalingRow>> {
    let mut report = Report::new("scaling", 1);
    let jobs = jobs(cfg, &domains_or_disk(cfg));
    let ts = cfg.scaling.ts.clone();
    let slack = cfg.slack;
    let results = par::map_slice(&jobs, |(shape, h)| {
        let lambda = solve(cfg, shape, *h)?.pair.lambda;
        ts.iter()
            .map(|&t| {
                let lt = if t == 1.0 {
                    lambda
                } else {
                    solve(cfg, &shape.scaled(t), t * h)?.pair.lambda
                };
                let lower = t.powf(-2.0 * cfg.s) * lambda;
                let upper = t.powi(-2) * lambda;
                Ok(ScalingRow {
                    domain: shape_label(shape),
                    h: *h,
                    t,
                    lambda,
                    lambda_scaled: lt,
                    lower,
                    upper,
                    lower_ok: lt >= lower * (1.0 - slack),
                    upper_ok: lt <= upper * (1.0 + slack),
                })
            })
            .collect::<Result<Vec<_>>>()
    });
    let labels = labels(&jobs);
    for rows in collect(&mut report, &labels, results)?.into_iter().flatten() {
        let ok = rows.iter().all(|r| r.lower_ok && r.upper_ok);
        report.status = report.status.and(Status::from_ok(ok));
        report.rows.extend(rows);
    }
    Ok(report)
}

/// Long-format row: one quantity of one family member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleRow {
    pub family: String,
    pub parameter: f64,
    pub quantity: String,
    pub value: f64,
    pub ok: Option<bool>,
}

fn crow(family: &str, parameter: f64, quantity: &str, value: f64, ok: Option<bool>) -> CounterexampleRow {
    CounterexampleRow {
        family: family.into(),
        parameter,
        quantity: quantity.into(),
        value,
        ok,
    }
}

/// Arc vertices keeping the circumscribed polygon's extra area, about
/// `span · step² / 24`, below 1% of the added hull area.
fn arc_vertices_for(delta: f64) -> usize {
    let alpha = (1.0 / (1.0 + delta)).acos();
    let added = (2.0 * delta + delta * delta).sqrt() - alpha;
    let span = 2.0 * PI - 2.0 * alpha;
    let step = (24.0 * 0.01 * added / span).sqrt();
    (span / step).ceil() as usize
}

pub fn run_counterexample(cfg: &ExperimentConfig) -> Result<Report<CounterexampleRow>> {
    let ce = &cfg.counterexample;
    let mut report = Report::new("counterexample", 1);
    let mut rows = Vec::new();
    let mut ok_all = true;
    let unit = Ball {
        center: [0.0; 2],
        radius: 1.0,
    };

    // Hull of the unit disk and a point at distance 1 + δ.
    let mut certs = Vec::new();
    let mut fit = Vec::new();
    let mut hulls = Vec::new();
    for &delta in &ce.hull_deltas {
        let hc = hull_counterexample_with(delta, ce.arc_vertices.max(arc_vertices_for(delta)))?;
        let cert = ball_sandwich(&hc.polygon, &unit)?;
        let area = PI + hc.added_area;
        let eps = hc.added_area / PI;
        let outer = 1.0 - area / (PI * (1.0 + delta).powi(2));
        fit.push((eps, outer));
        rows.push(crow("hull", delta, "tangent_length", hc.pt, None));
        rows.push(crow("hull", delta, "added_area", hc.added_area, None));
        rows.push(crow("hull", delta, "eps", eps, None));
        rows.push(crow("hull", delta, "outer_defect", outer, None));
        rows.push(crow("hull", delta, "ratio", outer / eps, None));
        rows.push(crow("hull", delta, "eps_polygon", cert.eps_in, None));
        rows.push(crow("hull", delta, "outer_defect_polygon", cert.outer_defect, None));
        rows.push(crow("hull", delta, "polygonization_error", hc.polygonization_error, None));
        rows.push(crow("hull", delta, "cone_bound", cert.cone_volume_bound, Some(cert.cone_ok)));
        ok_all &= cert.cone_ok;
        certs.push(cert);
        hulls.push(hc);
    }
    if let Some((slope, icpt)) = loglog_fit(&fit) {
        let ok = (slope - ce.slope_target).abs() <= ce.slope_tol;
        ok_all &= ok;
        rows.push(crow("hull-fit", 0.0, "slope", slope, Some(ok)));
        rows.push(crow("hull-fit", 0.0, "constant", icpt.exp(), None));
    }
    let mut by_eps = fit.clone();
    by_eps.sort_by(|a, b| b.0.total_cmp(&a.0));
    if by_eps.len() >= 2 {
        let diverging = by_eps.windows(2).all(|w| w[1].1 / w[1].0 > w[0].1 / w[0].0);
        ok_all &= diverging;
        let last = by_eps.last().expect("nonempty");
        rows.push(crow("hull-fit", 0.0, "ratio_at_smallest_eps", last.1 / last.0, Some(diverging)));
    }
    report.plots.push(PlotSeries::new("hull_outer_defect", "eps", "outer_defect", fit));

    // Radial bump bodies.
    for &delta in &ce.bump_deltas {
        let body = bump_counterexample(delta, ce.bump_samples)?;
        let sd = delta.sqrt();
        let n = ce.bump_samples.max(8);
        let thetas = (0..n)
            .map(|k| -PI + 2.0 * PI * k as f64 / n as f64)
            .chain((0..n).map(|k| -sd + 2.0 * sd * (k as f64 + 0.5) / n as f64));
        let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut curve = Vec::new();
        for t in thetas {
            let k = body.curvature(t);
            kmin = kmin.min(k);
            kmax = kmax.max(k);
            if t.abs() < sd {
                curve.push((t, k));
            }
        }
        curve.sort_by(|a, b| a.0.total_cmp(&b.0));
        let kappa_ok = kmin >= 0.25 && kmax <= 2.0;
        let excess = body.area_excess();
        let bound = 4.0 * delta.powf(1.5);
        let area_ok = excess <= bound;
        ok_all &= kappa_ok && area_ok;
        let area = PI + excess;
        rows.push(crow("bump", delta, "c", body.c, None));
        rows.push(crow("bump", delta, "kappa_min", kmin, Some(kappa_ok)));
        rows.push(crow("bump", delta, "kappa_max", kmax, Some(kappa_ok)));
        rows.push(crow("bump", delta, "area_excess", excess, Some(area_ok)));
        rows.push(crow("bump", delta, "area_bound", bound, None));
        rows.push(crow("bump", delta, "eps", excess / area, None));
        rows.push(crow(
            "bump",
            delta,
            "outer_defect",
            1.0 - area / (PI * (1.0 + body.c * delta).powi(2)),
            None,
        ));
        report.plots.push(PlotSeries::new(format!("bump_curvature_{delta}"), "theta", "kappa", curve));
        if let Some(eh) = ce.eigen_h {
            let shape = body.to_shape();
            let lambda = solve(cfg, &shape, eh)?.pair.lambda;
            let ball = solve(cfg, &equal_volume_ball(2, area), eh)?.pair.lambda;
            rows.push(crow("bump", delta, "eps_lambda", lambda / ball - 1.0, None));
        }
    }
    if let Some(eh) = ce.eigen_h {
        for hc in &hulls {
            let shape = ShapeSpec::Polygon {
                vertices: hc.polygon.vertices().to_vec(),
            };
            let lambda = solve(cfg, &shape, eh)?.pair.lambda;
            let ball = solve(cfg, &equal_volume_ball(2, PI + hc.added_area), eh)?.pair.lambda;
            rows.push(crow("hull", hc.delta, "eps_lambda", lambda / ball - 1.0, None));
        }
    }

    // Random convex polygons: Bonnesen and sandwich certificates.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst_gap = f64::INFINITY;
    for _ in 0..ce.random_polygons {
        let p = random_convex_polygon(&mut rng, ce.polygon_points, 0.5, 3.0);
        let inball = chebyshev_inball(&p);
        let (lhs, rhs) = bonnesen_deficit(&p, &inball);
        worst_gap = worst_gap.min(lhs - rhs);
        certs.push(ball_sandwich(&p, &inball)?);
    }
    if ce.random_polygons > 0 {
        let ok = worst_gap >= -ce.bonnesen_tol;
        ok_all &= ok;
        rows.push(crow("bonnesen-random", ce.random_polygons as f64, "min_gap", worst_gap, Some(ok)));
    }
    let mut gaps = Vec::new();
    for n in [8usize, 32, 128, 512, 2048] {
        let p = ConvexPolygon::regular(n, 1.0, [0.0; 2], 0.0)?;
        let (lhs, rhs) = bonnesen_deficit(&p, &chebyshev_inball(&p));
        gaps.push((n as f64, lhs - rhs));
    }
    let shrinking = gaps.windows(2).all(|w| w[1].1.abs() < w[0].1.abs());
    ok_all &= shrinking;
    for &(n, g) in &gaps {
        rows.push(crow("bonnesen-disk", n, "gap", g, Some(shrinking)));
    }
    for (eh, count, worst) in sandwich_constant_scan(&certs, &ce.eps_hats) {
        rows.push(crow("sandwich-scan", eh, "count", count as f64, None));
        rows.push(crow("sandwich-scan", eh, "worst_ratio", worst.unwrap_or(f64::NAN), None));
    }

    report.rows = rows;
    report.status = Status::from_ok(ok_all);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfRow {
    pub domain: String,
    pub h: f64,
    pub samples: usize,
    pub valid: usize,
    pub skipped: usize,
    pub negative_fraction: f64,
    /// Largest (least negative) valid derivative.
    pub max_derivative: f64,
    pub min_derivative: f64,
    pub pass: bool,
}

pub fn run_hopf(cfg: &ExperimentConfig) -> Result<Report<HopfRow>> {
    let mut report = Report::new("hopf", 1);
    let jobs = jobs(cfg, &domains_or_disk(cfg));
    let n = cfg.hopf.samples;
    let results = par::map_slice(&jobs, |(shape, h)| {
        let sv = solve(cfg, shape, *h)?;
        Ok(normal_derivative_trace(&sv.pair, shape, n))
    });
    let labels = labels(&jobs);
    for (i, tr) in collect(&mut report, &labels, results)?.into_iter().enumerate() {
        let Some(tr) = tr else { continue };
        let (shape, h) = &jobs[i];
        let vals: Vec<f64> = tr.valid().collect();
        let frac = tr.negative_fraction();
        let pass = !vals.is_empty() && frac == 1.0;
        report.status = report.status.and(if vals.is_empty() {
            Status::Inconclusive
        } else {
            Status::from_ok(pass)
        });
        report.plots.push(PlotSeries::new(
            format!("normal_derivative_{i}"),
            "sample",
            "derivative",
            vals.iter().enumerate().map(|(k, &v)| (k as f64, v)).collect(),
        ));
        report.rows.push(HopfRow {
            domain: shape_label(shape),
            h: *h,
            samples: tr.samples.len(),
            valid: vals.len(),
            skipped: tr.skipped(),
            negative_fraction: frac,
            max_derivative: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min_derivative: vals.iter().copied().fold(f64::INFINITY, f64::min),
            pass,
        });
    }
    Ok(report)
}
