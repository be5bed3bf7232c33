use std::fmt::Write as _;

use rayon::prelude::*;

use qsl_core::jc::critical_gamma0;
use qsl_core::nonmarkov::{blp_from_deformation, blp_jc_analytic, blp_jc_equatorial, boundary_crossings, pc_blp_criterion, BlpMethod, Boundary};
use qsl_core::optimality::ScanSettings;
use qsl_core::propagation::{extract_affine_map, uniform_grid};
use qsl_core::qsl::{qsl_from_map, qsl_ratio_jc_closed};
use qsl_core::taxonomy::classify_affine_map;
use qsl_core::{
    blp_measure, optimal_state_scan, qsl_time, taxonomy_ratio, BlochVector, Branch, Error, GeneratorSpec,
    PairSearch, PureState,
};

use crate::config::Resolved;

/// Ratio excess above one tolerated before a result counts as unphysical.
pub const RATIO_SLACK: f64 = 1e-9;
/// Largest allowed gap between a closed form and the quadrature pipeline.
pub const CROSS_CHECK_GAP: f64 = 1e-6;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Physics(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Physics(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical check failed: {m}"),
            Failure::Physics(m) => write!(f, "physics violation: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::RatePole { .. }
            | Error::StepSizeTooLarge { .. }
            | Error::StateDrift { .. }
            | Error::NonFiniteRate { .. } => Failure::Numerical(e.to_string()),
            Error::NonPhysicalState(_) => Failure::Physics(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

/// CSV body plus extra header comment lines.
#[derive(Debug, Default)]
pub struct Table {
    pub notes: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { notes: Vec::new(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn render(&self, header: &str) -> String {
        let mut out = String::from(header);
        for n in &self.notes {
            let _ = writeln!(out, "# {n}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn num(x: f64) -> String {
    // no negative zero in the output
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn check_ratio(ratio: f64, context: &str) -> Result<(), Failure> {
    if !ratio.is_finite() {
        return Err(Failure::Numerical(format!("{context}: ratio is not finite")));
    }
    if ratio > 1.0 + RATIO_SLACK {
        return Err(Failure::Physics(format!("{context}: ratio {ratio} exceeds 1")));
    }
    Ok(())
}

fn initial_state(cfg: &Resolved) -> Result<PureState, Failure> {
    Ok(PureState::new(cfg.initial_state.a, cfg.initial_state.theta)?)
}

fn method_name(m: BlpMethod) -> &'static str {
    match m {
        BlpMethod::Analytic => "analytic",
        BlpMethod::NumericFixedPair => "numeric-fixed-pair",
        BlpMethod::NumericPairSearch => "numeric-pair-search",
    }
}

/// Ratio, closed form and BLP value of the Jaynes-Cummings model across a
/// grid of couplings `γ₀`, with the critical coupling `λ/2` inserted.
pub fn sweep_gamma0(cfg: &Resolved, spec: &GeneratorSpec) -> Result<Table, Failure> {
    let GeneratorSpec::JaynesCummings { lambda, .. } = *spec else {
        return Err(Failure::Config("sweep-gamma0 needs model.family = \"jaynes-cummings\"".into()));
    };
    let critical = critical_gamma0(lambda);
    let mut grid = cfg.gamma0_grid.values();
    let g = cfg.gamma0_grid;
    if (g.start..=g.stop).contains(&critical) {
        match grid.iter_mut().find(|x| (**x - critical).abs() <= 1e-9 * critical) {
            Some(x) => *x = critical,
            None => grid.push(critical),
        }
    }
    grid.sort_by(f64::total_cmp);

    let cells: Vec<(f64, f64)> = grid.iter().flat_map(|&g0| cfg.tau.iter().map(move |&t| (g0, t))).collect();
    let rows: Vec<Result<Vec<String>, Failure>> = cells
        .par_iter()
        .map(|&(g0, tau)| {
            let spec = GeneratorSpec::jaynes_cummings(g0, lambda)?;
            let quad = qsl_time(&spec, &PureState::excited(), tau, cfg.steps_for(tau))?.ratio;
            let closed = qsl_ratio_jc_closed(tau, g0, lambda)?;
            let blp_z = blp_jc_analytic(tau, g0, lambda)?;
            let blp_max = blp_jc_equatorial(tau, g0, lambda)?;
            let context = format!("gamma0={g0} tau={tau}");
            check_ratio(quad, &context)?;
            if (quad - closed).abs() > CROSS_CHECK_GAP {
                return Err(Failure::Numerical(format!(
                    "{context}: closed form {closed} and quadrature {quad} differ by more than {CROSS_CHECK_GAP:e}"
                )));
            }
            let note = if g0 == critical { "critical" } else { "" };
            Ok(vec![num(g0), num(tau), num(quad), num(closed), num(blp_z), num(blp_max), note.to_string()])
        })
        .collect();

    let mut table =
        Table::new(&["gamma0", "tau", "ratio_quadrature", "ratio_closed_form", "blp_z_pair", "blp", "note"]);
    table.notes.push(format!("critical gamma0 = lambda/2 = {}", num(critical)));
    for r in rows {
        table.rows.push(r?);
    }
    Ok(table)
}

/// Smallest speed-limit ratio over evolution times for each pure initial
/// state `ψ(a, θ)` of the grid.
pub fn state_scan(cfg: &Resolved, spec: &GeneratorSpec) -> Result<Table, Failure> {
    let mut table = Table::new(&["tau", "a", "theta", "min_ratio", "optimal_flag", "polished_a"]);
    for &tau in &cfg.tau {
        for k in 0..cfg.theta_grid {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / cfg.theta_grid as f64;
            let settings =
                ScanSettings { a_points: cfg.a_grid, tau_points: cfg.tau_points, theta, steps: cfg.steps_for(tau) };
            for row in optimal_state_scan(spec, tau, &settings)? {
                check_ratio(row.min_ratio, &format!("tau={tau} a={} theta={theta}", row.a))?;
                table.rows.push(vec![
                    num(tau),
                    num(row.a),
                    num(theta),
                    num(row.min_ratio),
                    u8::from(row.optimal).to_string(),
                    row.polished_a.map(num).unwrap_or_default(),
                ]);
            }
        }
    }
    Ok(table)
}

/// Phase-covariant rates and the three boundary values along `[0, τ]`, with
/// the located crossings in the header. Uses the largest configured `τ`.
pub fn region_trajectory(cfg: &Resolved, spec: &GeneratorSpec) -> Result<Table, Failure> {
    let rates = spec
        .phase_covariant_rates()
        .ok_or_else(|| Failure::Config("region-trajectory needs a phase-covariant model".into()))?;
    let tau = cfg.tau.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut table = Table::new(&["t", "gamma_prime", "gamma3", "blp_boundary", "secondary_boundary", "semigroup_boundary"]);
    // boundaries vanishing at the same instant share one note
    let mut groups: Vec<(f64, Vec<String>)> = Vec::new();
    for c in boundary_crossings(&rates, tau, cfg.crossing_samples)? {
        let kind = if c.touch { "touch" } else { "crossing" };
        let entry = format!("{}:{kind}", c.boundary.name());
        match groups.last_mut() {
            Some((t, names)) if (c.t - *t).abs() <= 1e-6 => names.push(entry),
            _ => groups.push((c.t, vec![entry])),
        }
    }
    for (t, names) in groups {
        table.notes.push(format!("zero at t = {} ({})", num(t), names.join(" ")));
    }
    for t in uniform_grid(tau, cfg.output_points) {
        let [g1, g2, g3, _] = rates.eval(t)?;
        let f = pc_blp_criterion(&rates, t)?;
        let mut row = vec![num(t), num(g1 + g2), num(g3)];
        row.extend(Boundary::ALL.iter().map(|&b| num(f.value(b))));
        table.rows.push(row);
    }
    Ok(table)
}

/// Class of the map on `[0, τ]` and, along the trajectory, the class formula
/// against the quadrature ratio.
pub fn classify(cfg: &Resolved, spec: &GeneratorSpec) -> Result<(Table, Vec<String>), Failure> {
    let axis = BlochVector::from_array(cfg.axis);
    let mut table = Table::new(&["tau", "t", "g", "h", "predicted_ratio", "pipeline_ratio", "abs_gap"]);
    let mut summary = Vec::new();
    for &tau in &cfg.tau {
        let map = extract_affine_map(spec, tau, cfg.steps_for(tau))?;
        let label = classify_affine_map(&map, axis).label;
        let formula = label.formula.map(|f| f.name()).unwrap_or("none");
        let branch = match label.branch {
            Branch::Upper => "upper",
            Branch::Lower => "lower",
        };
        let mut line = format!("tau = {tau}: class {} branch {branch} formula {formula}", label.class.name());
        if let Some(t) = label.violation_time {
            let _ = write!(line, " coherence at t = {t}");
        }
        summary.push(line);

        let psi = PureState::from_bloch(axis.scale(label.branch.sign()))?;
        let last = map.len() - 1;
        let stride = (last / cfg.output_points).max(1);
        let stride = stride + stride % 2;
        let mut idx: Vec<usize> = (0..=last).step_by(stride).collect();
        if *idx.last().unwrap() != last {
            idx.push(last);
        }
        let rows: Vec<Result<Vec<String>, Failure>> = idx
            .par_iter()
            .map(|&k| {
                let prefix = map.prefix(k);
                let c = classify_affine_map(&prefix, axis);
                let pipeline = if k == 0 { 1.0 } else { qsl_from_map(spec, &prefix, &psi).ratio };
                let t = prefix.times[k];
                check_ratio(pipeline, &format!("tau={tau} t={t}"))?;
                let predicted = taxonomy_ratio(&c.label, &c.g, &c.h, blp_from_deformation(&c.g)).ok();
                let (p, gap) = match predicted {
                    Some(p) if k > 0 => (num(p), num((p - pipeline).abs())),
                    _ => (String::new(), String::new()),
                };
                Ok(vec![num(tau), num(t), num(c.g.last_value()), num(c.h.last_value()), p, num(pipeline), gap])
            })
            .collect();
        for r in rows {
            table.rows.push(r?);
        }
    }
    table.notes.extend(summary.iter().cloned());
    Ok((table, summary))
}

/// BLP measure maximised over pairs, with the analytic value where one exists.
pub fn blp(cfg: &Resolved, spec: &GeneratorSpec) -> Result<Table, Failure> {
    let mut table = Table::new(&[
        "tau", "blp", "blp_analytic", "r1_x", "r1_y", "r1_z", "r2_x", "r2_y", "r2_z", "method",
    ]);
    for &tau in &cfg.tau {
        let search = PairSearch {
            resolution: cfg.pair_search_resolution,
            refinement_levels: cfg.refinement_levels,
            polish: true,
            full_pairs: cfg.full_pairs,
            steps: Some(cfg.steps_for(tau)),
        };
        let res = blp_measure(spec, tau, &search)?;
        let analytic = match *spec {
            GeneratorSpec::JaynesCummings { gamma0, lambda } => Some(blp_jc_equatorial(tau, gamma0, lambda)?),
            _ => None,
        };
        if let Some(a) = analytic {
            if (a - res.value).abs() > CROSS_CHECK_GAP {
                return Err(Failure::Numerical(format!(
                    "tau={tau}: pair search {} and analytic {a} differ by more than {CROSS_CHECK_GAP:e}",
                    res.value
                )));
            }
        }
        let (r1, r2) = res.pair;
        table.rows.push(vec![
            num(tau),
            num(res.value),
            analytic.map(num).unwrap_or_default(),
            num(r1.x),
            num(r1.y),
            num(r1.z),
            num(r2.x),
            num(r2.y),
            num(r2.z),
            method_name(res.method).to_string(),
        ]);
    }
    Ok(table)
}

/// Speed-limit time and ratio of the configured initial state.
pub fn qsl(cfg: &Resolved, spec: &GeneratorSpec) -> Result<Table, Failure> {
    let psi = initial_state(cfg)?;
    let mut table = Table::new(&[
        "tau", "ratio", "tau_qsl", "tau_qsl_tr", "tau_qsl_hs", "lambda_op", "lambda_tr", "lambda_hs", "bures",
        "fidelity", "revivals",
    ]);
    let results: Vec<Result<_, Error>> =
        cfg.tau.par_iter().map(|&tau| qsl_time(spec, &psi, tau, cfg.steps_for(tau))).collect();
    for r in results {
        let r = r?;
        check_ratio(r.ratio, &format!("tau={}", r.tau))?;
        table.rows.push(vec![
            num(r.tau),
            num(r.ratio),
            num(r.tau_qsl),
            num(r.tau_qsl_tr()),
            num(r.tau_qsl_hs()),
            num(r.lambda_op),
            num(r.lambda_tr),
            num(r.lambda_hs),
            num(r.bures),
            num(r.fidelity),
            num(r.revivals),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_exit_codes() {
        assert_eq!(Failure::from(Error::RatePole { t: 1.0, sign: '+' }).exit_code(), 3);
        assert_eq!(Failure::from(Error::StateDrift { t: 1.0, norm: 1.1 }).exit_code(), 3);
        assert_eq!(Failure::from(Error::NonPhysicalState("x".into())).exit_code(), 4);
        assert_eq!(Failure::from(Error::InvalidArgument("x".into())).exit_code(), 2);
        assert_eq!(check_ratio(1.0 + 1e-8, "t").unwrap_err().exit_code(), 4);
        assert_eq!(check_ratio(f64::NAN, "t").unwrap_err().exit_code(), 3);
        assert!(check_ratio(1.0 + 1e-10, "t").is_ok());
    }

    #[test]
    fn numbers_have_fixed_width_and_no_negative_zero() {
        assert_eq!(num(-0.0), "0.0000000000000000e0");
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }
}
