use std::time::Instant;

use serde::Serialize;

use super::{
    AuditArgs, AuditMode, BandArg, Cli, CliError, CompareArgs, CountArgs, CoverArgs, CoverCmd, EstimateArgs, FamilyArg,
    FrameCmd, Format, GlobalOpts, Group, LatticeCmd, ModelArgs, Outcome, Report, Resolved, Scheme, WaveletArgs,
    WaveletCmd, EXIT_NUMERICAL, EXIT_OK, SCHEMA_VERSION,
};
use crate::covering::{audit_cover, beta_area_matched, beta_for_delta};
use crate::framelab::{
    compare_schemes, dyadic_sample_set, estimate_bounds, golden_sample_set, guarded_region, write_comparison_csv, Band,
    EstimateOptions, FrameEstimate, FrameOperator, Provenance,
};
use crate::goldenring::GoldenNumber;
use crate::lattice::{audit_max_count, audit_min_count, enumerate_in_rect, AuditConfig, CountAudit, LatticeSpec, Rect};
use crate::wavelet::{admissibility_constant, cauchy_wavelet, decay_condition_report, gaussian_wavelet, Admissibility, DecayReport, FamilyTag, MotherWavelet, WaveletError};

const MAX_LISTED_POINTS: usize = 100;
const MAX_LISTED_CELLS: usize = 100;
/// Admissibility tolerance for calling a normalized wavelet tight.
const TIGHT_TOLERANCE: f64 = 1e-6;
/// Per-cell bounds a covering should satisfy.
const COVER_BOUNDS: (usize, usize) = (1, 12);

fn progress(global: &GlobalOpts, level: u8, msg: impl FnOnce() -> String) {
    if global.verbosity >= level {
        eprintln!("{}", msg());
    }
}

fn json<C: Serialize, R: Serialize>(global: &GlobalOpts, command: &str, args: &C, result: R) -> Result<String, CliError> {
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command,
        config: Resolved { global, command: args },
        result,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Usage(format!("serialize: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn json_only(global: &GlobalOpts, command: &str) -> Result<(), CliError> {
    if global.format == Format::Csv {
        return Err(CliError::Usage(format!("`{command}` produces a report, not a table; use --format json")));
    }
    Ok(())
}

fn ok(body: String) -> Outcome {
    Outcome { body, status: EXIT_OK, note: None }
}

pub(super) fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.group {
        Group::Lattice(LatticeCmd::Count(a)) => lattice_count(g, a),
        Group::Lattice(LatticeCmd::Audit(a)) => lattice_audit(g, a),
        Group::Cover(CoverCmd::Audit(a)) => cover_audit(g, a),
        Group::Wavelet(WaveletCmd::Check(a)) => wavelet_check(g, a),
        Group::Frame(FrameCmd::Estimate(a)) => frame_estimate(g, a),
        Group::Frame(FrameCmd::Compare(a)) => frame_compare(g, a),
    }
}

#[derive(Serialize)]
struct PointRow {
    n: i128,
    m: i128,
    x: f64,
    s: f64,
    /// Exact coordinates `a + bα` before scaling.
    x_exact: GoldenNumber,
    s_exact: GoldenNumber,
}

#[derive(Serialize)]
struct CountResult {
    count: usize,
    /// Present when the count is at most 100.
    points: Option<Vec<PointRow>>,
}

fn lattice_count(g: &GlobalOpts, a: &CountArgs) -> Result<Outcome, CliError> {
    let spec = LatticeSpec::new(a.beta)?;
    let found = enumerate_in_rect(&spec, &a.rect.rect())?;
    let rows: Vec<PointRow> = found
        .iter()
        .map(|p| {
            let (x, s) = p.coords(a.beta);
            PointRow { n: p.n, m: p.m, x, s, x_exact: p.x, s_exact: p.s }
        })
        .collect();
    match g.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(["n", "m", "x", "s"]).map_err(|e| CliError::Usage(e.to_string()))?;
            for r in &rows {
                w.write_record([r.n.to_string(), r.m.to_string(), r.x.to_string(), r.s.to_string()])
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(ok(String::from_utf8(bytes).expect("csv output is UTF-8")))
        }
        Format::Json => {
            let count = rows.len();
            let points = (count <= MAX_LISTED_POINTS).then_some(rows);
            Ok(ok(json(g, "lattice count", a, CountResult { count, points })?))
        }
    }
}

#[derive(Serialize)]
struct AuditResult {
    claim: String,
    pass: bool,
    audit: CountAudit,
}

fn lattice_audit(g: &GlobalOpts, a: &AuditArgs) -> Result<Outcome, CliError> {
    json_only(g, "lattice audit")?;
    let mut cfg = AuditConfig::new(a.area.value, a.trials, g.seed);
    cfg.aspect_range = (a.aspect.lo, a.aspect.hi);
    cfg.center_range = a.window;
    cfg.anchored_trials = a.anchored.unwrap_or(a.trials);
    let start = Instant::now();
    let (audit, claim, pass) = match a.mode {
        AuditMode::Min => {
            let r = audit_min_count(&cfg)?;
            let pass = r.min_count >= a.bound;
            (r, format!("min_count >= {}", a.bound), pass)
        }
        AuditMode::Max => {
            let r = audit_max_count(&cfg)?;
            let pass = r.max_count <= a.bound;
            (r, format!("max_count <= {}", a.bound), pass)
        }
    };
    progress(g, 1, || format!("audit finished in {:.2?}", start.elapsed()));
    let note = (!pass).then(|| format!("claim `{claim}` violated: min {} max {}", audit.min_count, audit.max_count));
    Ok(Outcome { body: json(g, "lattice audit", a, AuditResult { claim, pass, audit })?, status: EXIT_OK, note })
}

#[derive(Serialize)]
struct CoverResult {
    delta: f64,
    beta: f64,
    beta_rule: &'static str,
    k_range: (i64, i64),
    l_range: (i64, i64),
    cells: u64,
    min_count: usize,
    max_count: usize,
    bounds: (usize, usize),
    within_bounds: bool,
    empty_cell_count: usize,
    /// At most the first 100 empty cells, as `(k, l)`.
    empty_cells: Vec<(i64, i64)>,
}

fn cover_audit(g: &GlobalOpts, a: &CoverArgs) -> Result<Outcome, CliError> {
    json_only(g, "cover audit")?;
    let (beta, beta_rule) = match (a.beta, a.area_matched) {
        (Some(b), _) => (b, "explicit"),
        (None, true) => (beta_area_matched(a.delta)?, "area-matched"),
        (None, false) => (beta_for_delta(a.delta)?, "delta-squared"),
    };
    let start = Instant::now();
    let r = audit_cover(a.delta, beta, (a.k_range.lo, a.k_range.hi), (a.l_range.lo, a.l_range.hi))?;
    progress(g, 1, || format!("{} cells in {:.2?}", r.cells, start.elapsed()));
    let within_bounds = r.min_count >= COVER_BOUNDS.0 && r.max_count <= COVER_BOUNDS.1;
    let result = CoverResult {
        delta: r.delta,
        beta: r.beta,
        beta_rule,
        k_range: r.k_range,
        l_range: r.l_range,
        cells: r.cells,
        min_count: r.min_count,
        max_count: r.max_count,
        bounds: COVER_BOUNDS,
        within_bounds,
        empty_cell_count: r.empty_cells.len(),
        empty_cells: r.empty_cells.iter().take(MAX_LISTED_CELLS).copied().collect(),
    };
    Ok(ok(json(g, "cover audit", a, result)?))
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
enum WaveletResult {
    Checked {
        pass: bool,
        wavelet: FamilyTag,
        admissibility: Admissibility,
        tight: bool,
        decay: DecayReport,
    },
    HypothesisViolated {
        pass: bool,
        order: f64,
        reason: String,
    },
}

fn wavelet_check(g: &GlobalOpts, a: &WaveletArgs) -> Result<Outcome, CliError> {
    json_only(g, "wavelet check")?;
    let built = match a.family {
        FamilyArg::Cauchy => cauchy_wavelet(a.order),
        FamilyArg::Gaussian => gaussian_wavelet(a.center, a.width),
    };
    let w = match built {
        Ok(w) => w,
        Err(WaveletError::HypothesisViolated { order, reason }) => {
            let note = Some(format!("hypothesis violated: {reason}"));
            let result = WaveletResult::HypothesisViolated { pass: false, order, reason };
            return Ok(Outcome { body: json(g, "wavelet check", a, result)?, status: EXIT_OK, note });
        }
        Err(e) => return Err(e.into()),
    };
    let admissibility = admissibility_constant(&w, &a.grid)?;
    let decay = decay_condition_report(&w, &a.grid, a.threshold)?;
    let tight = (admissibility.value - 1.0).abs() <= TIGHT_TOLERANCE;
    let pass = tight && decay.pass;
    let result = WaveletResult::Checked { pass, wavelet: w.tag(), admissibility, tight, decay };
    Ok(ok(json(g, "wavelet check", a, result)?))
}

fn resolve_band(m: &ModelArgs) -> Result<Band, CliError> {
    let BandArg { first, last } = m.band.unwrap_or(BandArg { first: (m.n / 64).max(1), last: (m.n / 16).max(1) });
    Ok(Band::new(first, last, m.n)?)
}

fn resolve_region(m: &ModelArgs, w: &MotherWavelet, band: Band) -> Result<Rect, CliError> {
    match m.region {
        Some(r) => Ok(r.rect()),
        None => Ok(guarded_region(w, m.n, band, m.guard)?),
    }
}

fn options(g: &GlobalOpts, m: &ModelArgs) -> EstimateOptions {
    EstimateOptions { method: m.method.into(), max_iters: m.iters, seed: g.seed, tol: m.tol }
}

fn check_model(m: &ModelArgs) -> Result<(), CliError> {
    if !(m.n >= 8 && m.n.is_power_of_two()) {
        return Err(CliError::Usage(format!("--n must be a power of two >= 8, got {}", m.n)));
    }
    Ok(())
}

#[derive(Serialize)]
struct EstimateResult {
    region: Rect,
    band: Band,
    provenance: Provenance,
    points: usize,
    wavelet: FamilyTag,
    estimate: FrameEstimate,
}

fn frame_estimate(g: &GlobalOpts, a: &EstimateArgs) -> Result<Outcome, CliError> {
    json_only(g, "frame estimate")?;
    check_model(&a.model)?;
    let w = cauchy_wavelet(a.model.order)?;
    let band = resolve_band(&a.model)?;
    let region = resolve_region(&a.model, &w, band)?;
    let set = match a.scheme {
        Scheme::Golden => {
            if a.delta.is_none() && a.beta.is_none() {
                return Err(CliError::Usage("golden scheme needs --delta or --beta".into()));
            }
            golden_sample_set(a.delta, a.beta, &region)?
        }
        Scheme::Dyadic => match (a.a, a.b) {
            (Some(da), Some(db)) => dyadic_sample_set(da, db, &region)?,
            _ => return Err(CliError::Usage("dyadic scheme needs --a and --b".into())),
        },
    };
    progress(g, 1, || format!("{} sample points in {region:?}", set.len()));
    let start = Instant::now();
    let op = FrameOperator::new(&set, &w, a.model.n, band)?;
    let estimate = estimate_bounds(&op, &options(g, &a.model))?;
    progress(g, 1, || format!("estimate finished in {:.2?}", start.elapsed()));
    let converged = estimate.converged;
    let iterations = estimate.iterations;
    let result = EstimateResult {
        region,
        band,
        provenance: set.provenance.clone(),
        points: set.len(),
        wavelet: w.tag(),
        estimate,
    };
    let body = json(g, "frame estimate", a, result)?;
    if converged {
        Ok(ok(body))
    } else {
        let note = Some(format!("eigenvalue iteration did not converge after {iterations} steps"));
        Ok(Outcome { body, status: EXIT_NUMERICAL, note })
    }
}

fn frame_compare(g: &GlobalOpts, a: &CompareArgs) -> Result<Outcome, CliError> {
    check_model(&a.model)?;
    if a.deltas.is_empty() {
        return Err(CliError::Usage("--deltas needs at least one value".into()));
    }
    let w = cauchy_wavelet(a.model.order)?;
    let band = resolve_band(&a.model)?;
    let region = resolve_region(&a.model, &w, band)?;
    let start = Instant::now();
    let report = compare_schemes(&a.deltas, &w, a.model.n, &region, band, &options(g, &a.model))?;
    progress(g, 1, || format!("{} rows in {:.2?}", report.rows.len(), start.elapsed()));
    let stalled = report.rows.iter().filter(|r| r.estimate.as_ref().is_some_and(|e| !e.converged)).count();
    let body = match g.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_comparison_csv(&report, &mut buf)?;
            String::from_utf8(buf).expect("csv output is UTF-8")
        }
        Format::Json => json(g, "frame compare", a, &report)?,
    };
    if stalled == 0 {
        Ok(ok(body))
    } else {
        let note = Some(format!("{stalled} row(s) did not converge"));
        Ok(Outcome { body, status: EXIT_NUMERICAL, note })
    }
}
