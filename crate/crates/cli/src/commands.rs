use serde::Serialize;

use projdyn_core::eigen::DEFAULT_PROXIMAL_TOL;
use projdyn_core::limit_set::{
    aperiodicity_gap, box_dimension, forward_invariance_defect, limit_set_approx, orbit_vectors, shell_distance,
    shell_snapshot, spectrum, AperiodicityReport, BoxDimension,
};
use projdyn_core::semigroup::{check_h0, check_h1, check_h2, H0Options, DEFAULT_GROWTH_THRESHOLD};
use projdyn_core::stats::{ks_uniform, MeanEstimate};
use projdyn_core::torus::{orbit_float, orbit_rational, OrbitReport, RationalTorusPoint, TorusPoint};
use projdyn_core::walk::{
    contraction_stat, lyapunov_top, occupation_distance, random_pc_point, run_chain, walk_limitset_distance,
    PcPoint, WalkConfig,
};
use projdyn_core::{GeneratorSet, HypothesisVerdict, ProjectivePoint, Status};

use crate::args::{HypothesesArgs, LimitsetArgs, ShellArgs, SpectrumArgs, TorusArgs, WalkArgs};
use crate::output::{coord_header, num, parse_reals, write_json, CsvOut};
use crate::{CliError, CliResult, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_VIOLATED};

/// Start points of the walk are drawn from this salted seed, so they are
/// independent of the letter streams.
const START_SALT: u64 = 0x5851_f42d_4c95_7f2d;
/// Step counts reported by `walk.csv`.
const CONTRACTION_SCHEDULE: [usize; 9] = [0, 1, 2, 5, 10, 20, 30, 40, 50];
const LYAPUNOV_STEPS: usize = 500;
const LIMIT_DISTANCE_STEPS: usize = 50;
const LIMIT_DISTANCE_THRESHOLD: f64 = 1e-3;

#[derive(Serialize)]
struct HypothesesReport<'a> {
    h0: &'a HypothesisVerdict,
    h1: &'a HypothesisVerdict,
    h2: &'a HypothesisVerdict,
}

/// Exit code: 0 if all three hold, 2 if any is violated, otherwise 3 if
/// any is inconclusive.
pub fn cmd_hypotheses(a: &HypothesesArgs, gens: &GeneratorSet) -> CliResult<i32> {
    let opts = H0Options { trials: a.trials, horizon: a.steps, threshold: DEFAULT_GROWTH_THRESHOLD, seed: a.seed };
    let h0 = check_h0(gens, opts);
    let h1 = check_h1(gens, a.max_len)?;
    let h2 = check_h2(gens, a.max_len, a.tol)?;
    write_json(&a.common.out.join("hypotheses.json"), &HypothesesReport { h0: &h0, h1: &h1, h2: &h2 })?;
    for (name, v) in [("H0", &h0), ("H1", &h1), ("H2", &h2)] {
        println!("{name} {:?}", v.status);
    }
    let statuses = [h0.status, h1.status, h2.status];
    Ok(if statuses.contains(&Status::Violated) {
        EXIT_VIOLATED
    } else if statuses.contains(&Status::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    })
}

#[derive(Serialize)]
struct LimitsetSummary {
    points: usize,
    max_len: usize,
    dedup: f64,
    forward_invariance_defect: f64,
    box_dimension: Option<BoxDimension>,
}

/// Log-spaced scales from `1e−3` down to `10·dedup` (at most `1e−8`).
fn box_scales(dedup: f64) -> Vec<f64> {
    let (hi, lo) = (-3.0, (10.0 * dedup).log10().max(-8.0));
    if lo >= hi {
        return Vec::new();
    }
    (0..21).map(|i| 10f64.powf(hi + (lo - hi) * i as f64 / 20.0)).collect()
}

pub fn cmd_limitset(a: &LimitsetArgs, gens: &GeneratorSet) -> CliResult<i32> {
    let l = limit_set_approx(gens, a.max_len, a.tol, a.dedup)?;
    let d = gens.dim();
    let mut header = vec!["word".to_string(), "angle".to_string()];
    header.extend(coord_header("x", d));
    let mut csv = CsvOut::create(&a.common.out.join("limitset.csv"), &header)?;
    for p in l.points() {
        let angle = if d == 2 { num(p.point.angle()) } else { String::new() };
        let mut row = vec![p.label.clone(), angle];
        row.extend(p.point.rep().iter().map(|&x| num(x)));
        csv.row(&row)?;
    }
    csv.finish()?;
    let box_dim = if d == 2 && l.len() >= 10 { box_dimension(&l, &box_scales(a.dedup)).ok() } else { None };
    let summary = LimitsetSummary {
        points: l.len(),
        max_len: a.max_len,
        dedup: a.dedup,
        forward_invariance_defect: forward_invariance_defect(gens, &l, &l)?,
        box_dimension: box_dim,
    };
    write_json(&a.common.out.join("limitset.json"), &summary)?;
    println!("{} points", l.len());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SpectrumSummary {
    entries: usize,
    max_len: usize,
    /// Gap computed from the generators that are proximal.
    aperiodicity: Option<AperiodicityReport>,
}

pub fn cmd_spectrum(a: &SpectrumArgs, gens: &GeneratorSet) -> CliResult<i32> {
    let s = spectrum(gens, a.max_len, a.tol)?;
    let mut csv = CsvOut::create(&a.common.out.join("spectrum.csv"), &["word".into(), "log_modulus".into()])?;
    for e in &s.entries {
        csv.row(&[e.label.clone(), num(e.log_modulus)])?;
    }
    csv.finish()?;
    let letters: Vec<f64> = s.entries.iter().filter(|e| e.word.len() == 1).map(|e| e.log_modulus).collect();
    let summary = SpectrumSummary {
        entries: s.entries.len(),
        max_len: a.max_len,
        aperiodicity: aperiodicity_gap(&letters, a.coeff_bound).ok(),
    };
    write_json(&a.common.out.join("spectrum.json"), &summary)?;
    println!("{} proximal words", s.entries.len());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct LimitDistance {
    n: usize,
    max_len: usize,
    threshold: f64,
    fraction_below: f64,
    max: f64,
}

#[derive(Serialize)]
struct WalkSummary {
    config: WalkConfig,
    alpha: f64,
    samples: usize,
    /// Kolmogorov–Smirnov statistic of the circle coordinate against uniform.
    ks_z: f64,
    /// Distance between the occupation measures of two starts.
    start_distance: f64,
    lyapunov_steps: usize,
    lyapunov: MeanEstimate,
    limit_distance: Option<LimitDistance>,
}

pub fn cmd_walk(a: &WalkArgs, gens: &GeneratorSet) -> CliResult<i32> {
    let weights = match &a.weights {
        Some(w) => parse_reals(w, "weights")?,
        None => vec![1.0 / gens.len() as f64; gens.len()],
    };
    let cfg = WalkConfig { weights, seed: a.seed, n_steps: a.steps, burn_in: a.burn_in, c: a.c };
    let d = gens.dim();
    let out = &a.common.out;

    let first = run_chain(gens, &cfg, &PcPoint::new(ProjectivePoint::basis(d, 0), 0.0), 0)?;
    let mut header = vec!["z".to_string()];
    header.extend(coord_header("x", d));
    let mut csv = CsvOut::create(&out.join("occupation.csv"), &header)?;
    for p in &first.samples {
        let mut row = vec![num(p.z())];
        row.extend(p.base.rep().iter().map(|&x| num(x)));
        csv.row(&row)?;
    }
    csv.finish()?;
    let second = run_chain(gens, &cfg, &random_pc_point(d, a.seed ^ START_SALT, 0)?, 1)?;

    let x = random_pc_point(d, a.seed ^ START_SALT, 1)?.base;
    let y = random_pc_point(d, a.seed ^ START_SALT, 2)?.base;
    let mut csv = CsvOut::create(&out.join("walk.csv"), &["n".into(), "mean_delta".into(), "stderr".into()])?;
    for n in CONTRACTION_SCHEDULE {
        let est = contraction_stat(gens, &cfg, &x, &y, n, a.trials)?;
        csv.row(&[n.to_string(), num(est.mean), num(est.stderr)])?;
    }
    csv.finish()?;

    let limit_distance = match limit_set_approx(gens, a.max_len, DEFAULT_PROXIMAL_TOL, 1e-6) {
        Ok(l) => {
            let ds = (0..a.trials as u64)
                .map(|t| {
                    let start = random_pc_point(d, a.seed ^ START_SALT, 3 + t)?;
                    walk_limitset_distance(gens, &cfg, &start, &l, LIMIT_DISTANCE_STEPS, t)
                })
                .collect::<projdyn_core::Result<Vec<f64>>>()?;
            Some(LimitDistance {
                n: LIMIT_DISTANCE_STEPS,
                max_len: a.max_len,
                threshold: LIMIT_DISTANCE_THRESHOLD,
                fraction_below: ds.iter().filter(|&&v| v < LIMIT_DISTANCE_THRESHOLD).count() as f64
                    / ds.len().max(1) as f64,
                max: ds.iter().copied().fold(0.0, f64::max),
            })
        }
        Err(projdyn_core::Error::EmptyApprox) => None,
        Err(e) => return Err(e.into()),
    };

    let summary = WalkSummary {
        alpha: cfg.alpha(),
        samples: first.count(),
        ks_z: ks_uniform(&first.turns()),
        start_distance: occupation_distance(&first, &second, a.seed),
        lyapunov_steps: LYAPUNOV_STEPS,
        lyapunov: lyapunov_top(gens, &cfg, LYAPUNOV_STEPS, a.trials)?,
        limit_distance,
        config: cfg,
    };
    write_json(&out.join("walk.json"), &summary)?;
    println!("{} samples, KS {}", summary.samples, summary.ks_z);
    Ok(EXIT_OK)
}

/// `p/q` or an integer, with optional sign.
fn parse_fraction(s: &str) -> Option<(i64, u64)> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => Some((p.trim().parse().ok()?, q.trim().parse().ok().filter(|&q: &u64| q > 0)?)),
        None => Some((s.parse().ok()?, 1)),
    }
}

pub fn cmd_torus(a: &TorusArgs, gens: &GeneratorSet) -> CliResult<i32> {
    let coords: Vec<&str> = a.point.split(',').map(str::trim).collect();
    if coords.len() != gens.dim() {
        return Err(projdyn_core::Error::DimensionMismatch { expected: gens.dim(), found: coords.len() }.into());
    }
    let fractions: Option<Vec<(i64, u64)>> = coords.iter().map(|c| parse_fraction(c)).collect();
    let out = &a.common.out;
    let (report, points): (OrbitReport, Vec<Vec<f64>>) = match fractions {
        Some(f) if !a.float => {
            let x = RationalTorusPoint::from_fractions(&f)?;
            let orbit = orbit_rational(gens, &x, a.budget)?;
            let grid = orbit.coverage(a.grid)?;
            let mut report = orbit.report.clone();
            report.coverage_fraction = Some(grid.fraction());
            report.resolution = Some(a.grid);
            (report, orbit.points.iter().map(RationalTorusPoint::to_f64).collect())
        }
        _ => {
            let exact = TorusPoint::parse(&coords)?;
            let x = if a.float { TorusPoint::from_f64(&exact.to_f64())? } else { exact };
            let orbit = orbit_float(gens, &x, a.max_len, a.budget, a.grid)?;
            (orbit.report, orbit.points)
        }
    };
    let mut csv = CsvOut::create(&out.join("orbit.csv"), &coord_header("x", gens.dim()))?;
    for p in &points {
        csv.row(&p.iter().map(|&x| num(x)).collect::<Vec<_>>())?;
    }
    csv.finish()?;
    write_json(&out.join("torus.json"), &report)?;
    println!("finite: {}, coverage: {:?}", report.finite, report.coverage_fraction);
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ShellSummary {
    c: f64,
    t: i32,
    points: usize,
    limit_points: usize,
    /// One-sided Hausdorff distance to the limit set times `[1, c]`.
    distance: f64,
}

pub fn cmd_shell(a: &ShellArgs, gens: &GeneratorSet) -> CliResult<i32> {
    let d = gens.dim();
    let v = match &a.vector {
        Some(s) => parse_reals(s, "vector")?,
        None => ProjectivePoint::basis(d, 0).rep().to_vec(),
    };
    if v.len() != d {
        return Err(CliError::Core(projdyn_core::Error::DimensionMismatch { expected: d, found: v.len() }));
    }
    let orbit = orbit_vectors(gens, &v, a.max_len)?;
    let snapshot = shell_snapshot(&orbit, a.c, a.t)?;
    let l = limit_set_approx(gens, a.limit_len, a.tol, a.dedup)?;
    let mut header = coord_header("x", d);
    header.push("radial".into());
    let mut csv = CsvOut::create(&a.common.out.join("shell.csv"), &header)?;
    for p in &snapshot.points {
        let mut row: Vec<String> = p.direction.rep().iter().map(|&x| num(x)).collect();
        row.push(num(p.radial));
        csv.row(&row)?;
    }
    csv.finish()?;
    let summary = ShellSummary {
        c: a.c,
        t: a.t,
        points: snapshot.points.len(),
        limit_points: l.len(),
        distance: shell_distance(&snapshot, &l),
    };
    write_json(&a.common.out.join("shell.json"), &summary)?;
    println!("{} points, distance {}", summary.points, summary.distance);
    Ok(EXIT_OK)
}
