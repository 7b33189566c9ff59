//! The analysis commands. Each returns a [`Report`]; rendering and exit
//! codes are handled by the caller.

use rayon::prelude::*;

use polinflux::affective::{affective_dq_dsigma, alpha_sweep, within_party_influence};
use polinflux::equilibrium::InteriorityReport;
use polinflux::oracle::MonteCarloEstimate;
use polinflux::{
    analyze_network_change, check_interiority, compute_influence, dq_dsigma, modified_influence,
    monte_carlo_frequencies, solve_affective_equilibrium, solve_equilibrium, validate_params,
    EquilibriumResult, Legislature, Mode, ModelParams, Party, Scenario, SigmaThreshold,
    SimulationConfig,
};

use crate::output::{Cell, Report, Table};
use crate::CliError;

/// Standard errors allowed between simulated and analytic probabilities.
pub const SIMULATION_Z_LIMIT: f64 = 3.0;

pub fn legislator_labels(legislature: &Legislature) -> Vec<String> {
    (0..legislature.n())
        .map(|i| match legislature.party_of(i) {
            Party::F => format!("F{}", i + 1),
            Party::A => format!("A{}", i + 1 - legislature.n_f()),
        })
        .collect()
}

/// Rejects scenarios whose linear systems are not invertible in `mode`;
/// returns the non-fatal warnings.
pub fn validate(scenario: &Scenario, mode: Mode) -> Result<Vec<String>, CliError> {
    check_solvable(&scenario.legislature, &scenario.params, mode)
}

fn check_solvable(
    legislature: &Legislature,
    params: &ModelParams,
    mode: Mode,
) -> Result<Vec<String>, CliError> {
    let report = validate_params(legislature, params, mode);
    if !report.is_solvable() {
        return Err(CliError::Invalid(report.warnings().join("; ")));
    }
    Ok(report.warnings())
}

fn add_warnings(report: &mut Report, warnings: Vec<String>) {
    for w in warnings {
        report.meta("warning", Cell::Text(w));
    }
}

fn equilibrium_for(scenario: &Scenario, mode: Mode) -> Result<EquilibriumResult, CliError> {
    Ok(match mode {
        Mode::Baseline => {
            solve_equilibrium(&scenario.legislature, &scenario.params, &scenario.utility)?
        }
        Mode::Affective => {
            solve_affective_equilibrium(&scenario.legislature, &scenario.params, &scenario.utility)?
        }
    })
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Baseline => "baseline",
        Mode::Affective => "affective",
    }
}

pub fn cmd_influence(scenario: &Scenario, mode: Mode) -> Result<Report, CliError> {
    let warnings = validate(scenario, mode)?;
    let leg = &scenario.legislature;
    let params = &scenario.params;
    let labels = legislator_labels(leg);
    let influence = compute_influence(leg, params.beta())?;
    let diagnostics = validate_params(leg, params, mode);

    let mut columns = vec!["legislator", "party", "influence"];
    let affective = match mode {
        Mode::Baseline => None,
        Mode::Affective => {
            columns.extend(["within_party", "modified"]);
            Some(modified_influence(leg, params)?)
        }
    };
    let mut table = Table::new("influence", &columns);
    for i in 0..leg.n() {
        let mut row = vec![
            Cell::text(&labels[i]),
            Cell::text(leg.party_of(i).label()),
            Cell::Num(influence[i]),
        ];
        if let Some(a) = &affective {
            row.extend([Cell::Num(a.unmodified[i]), Cell::Num(a.modified[i])]);
        }
        table.push(row);
    }
    let mut report = Report::new(table);
    report.meta("mode", Cell::text(mode_name(mode)));
    report.meta("I_F", Cell::Num(influence.party_f_sum()));
    report.meta("I_A", Cell::Num(influence.party_a_sum()));
    report.meta("beta", Cell::Num(params.beta()));
    report.meta("beta_n", Cell::Num(diagnostics.beta_n));
    report.meta("beta_rho", Cell::Num(diagnostics.beta_rho));
    report.meta(
        "spectral_converged",
        Cell::flag(diagnostics.spectral.converged),
    );
    if let Some(a) = &affective {
        report.meta("I0_F", Cell::Num(a.unmodified.party_f_sum()));
        report.meta("I0_A", Cell::Num(a.unmodified.party_a_sum()));
        report.meta("omega_F", Cell::Num(a.omega_f));
        report.meta("omega_A", Cell::Num(a.omega_a));
        report.meta("alpha_hat", Cell::Num(a.alpha_hat));
    }
    add_warnings(&mut report, warnings);
    Ok(report)
}

fn interiority_table(report: &InteriorityReport) -> Table {
    let mut table = Table::new("interiority bounds", &["party", "upper", "lower"]);
    for b in [&report.f, &report.a] {
        table.push(vec![
            Cell::text(b.party.label()),
            Cell::Num(b.upper),
            Cell::Num(b.lower),
        ]);
    }
    table
}

pub fn cmd_equilibrium(scenario: &Scenario, mode: Mode) -> Result<Report, CliError> {
    let warnings = validate(scenario, mode)?;
    let leg = &scenario.legislature;
    let eq = equilibrium_for(scenario, mode)?;
    let labels = legislator_labels(leg);
    let mut table = Table::new(
        "equilibrium",
        &["legislator", "party", "influence", "m_star", "q_star"],
    );
    for (i, label) in labels.iter().enumerate() {
        table.push(vec![
            Cell::text(label),
            Cell::text(leg.party_of(i).label()),
            Cell::Num(eq.influence[i]),
            Cell::Num(eq.investments[i]),
            Cell::Num(eq.probabilities[i]),
        ]);
    }
    let interiority = check_interiority(leg, &scenario.params, &scenario.utility, mode);
    let mut report = Report::new(table);
    report.meta("mode", Cell::text(mode_name(mode)));
    report.meta("Q_star", Cell::Num(eq.vote_share));
    report.meta("lambda_star", Cell::Num(eq.shadow_price));
    report.meta("interior", Cell::flag(eq.interior));
    report.meta("interiority_bounds_pass", Cell::flag(interiority.pass));
    if interiority.affective_extension {
        report.meta("interiority_affective_extension", Cell::flag(true));
    }
    report.summary.push(interiority_table(&interiority));
    add_warnings(&mut report, warnings);
    Ok(report)
}

pub fn cmd_compare(scenario: &Scenario, mode: Mode, sigmas: &[f64]) -> Result<Report, CliError> {
    if mode != Mode::Baseline {
        return Err(CliError::Invalid(
            "compare supports baseline mode only".into(),
        ));
    }
    let warnings = validate(scenario, mode)?;
    let new = scenario.comparison_network()?.ok_or_else(|| {
        CliError::Invalid("scenario has no added_edges to compare against".into())
    })?;
    let leg = &scenario.legislature;
    let change = analyze_network_change(leg, &new, &scenario.params, &scenario.utility)?;

    let mut columns = vec!["row".to_string(), "sigma".to_string()];
    columns.extend(legislator_labels(leg));
    columns.push("total".to_string());
    let mut table = Table::with_columns("network change", columns);
    let row = |name: &str, sigma: Option<f64>, values: &[f64]| {
        let mut r = vec![Cell::text(name), sigma.map_or(Cell::Empty, Cell::Num)];
        r.extend(values.iter().map(|v| Cell::Num(*v)));
        r.push(Cell::Num(values.iter().sum()));
        r
    };
    table.push(row("delta_I", None, change.delta_influence.entries()));
    table.push(row("delta_m", None, &change.delta_investments));
    for &sigma in sigmas {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(CliError::Invalid(format!(
                "sigma grid value {sigma} must be non-negative"
            )));
        }
        table.push(row(
            "delta_q",
            Some(sigma),
            &change.delta_probabilities_at(sigma),
        ));
    }
    let mut hat = vec![Cell::text("sigma_hat"), Cell::Empty];
    hat.extend((0..leg.n()).map(|_| Cell::Empty));
    hat.push(match change.sigma_hat {
        SigmaThreshold::Below(s) => Cell::Num(s),
        SigmaThreshold::AlwaysBeneficial => Cell::text("always_beneficial"),
    });
    table.push(hat);

    let mut report = Report::new(table);
    report.meta("investment_effect", Cell::Num(change.investment_effect));
    if let Some(dev) = change.incremental_check {
        report.meta("incremental_max_deviation", Cell::Num(dev));
    }
    add_warnings(&mut report, warnings);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Sigma,
    Alpha,
}

pub fn cmd_sweep(
    scenario: &Scenario,
    mode: Mode,
    variable: SweepVariable,
    grid: &[f64],
) -> Result<Report, CliError> {
    if grid.is_empty() {
        return Err(CliError::Invalid("sweep grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(CliError::Invalid(format!(
            "sweep value {bad} must be finite and non-negative"
        )));
    }
    let leg = &scenario.legislature;
    let utility = &scenario.utility;
    match variable {
        SweepVariable::Sigma => {
            let warnings = validate(scenario, mode)?;
            let rows: Result<Vec<(f64, f64, f64)>, polinflux::Error> = grid
                .par_iter()
                .map(|&sigma| {
                    let p = scenario.params.with_sigma(sigma);
                    let (q, slope) = match mode {
                        Mode::Baseline => (
                            solve_equilibrium(leg, &p, utility)?.vote_share,
                            dq_dsigma(leg, &p)?,
                        ),
                        Mode::Affective => (
                            solve_affective_equilibrium(leg, &p, utility)?.vote_share,
                            affective_dq_dsigma(leg, &p)?,
                        ),
                    };
                    Ok((sigma, q, slope))
                })
                .collect();
            let mut table = Table::new("sigma sweep", &["sigma", "Q_star", "dQ_dsigma"]);
            for (s, q, d) in rows? {
                table.push(vec![Cell::Num(s), Cell::Num(q), Cell::Num(d)]);
            }
            let mut report = Report::new(table);
            report.meta("mode", Cell::text(mode_name(mode)));
            add_warnings(&mut report, warnings);
            Ok(report)
        }
        SweepVariable::Alpha => {
            // the grid replaces the scenario's own alpha
            let warnings = check_solvable(leg, &scenario.params.with_alpha(0.0), Mode::Affective)?;
            let rows = alpha_sweep(leg, &scenario.params, utility, grid)?;
            let mut table = Table::new(
                "alpha sweep",
                &[
                    "alpha",
                    "omega_F",
                    "omega_A",
                    "I_alpha_F",
                    "I_alpha_A",
                    "Q_star",
                    "dQ_dalpha",
                ],
            );
            for r in &rows {
                table.push(
                    [
                        r.alpha,
                        r.omega_f,
                        r.omega_a,
                        r.i_alpha_f,
                        r.i_alpha_a,
                        r.q_star,
                        r.dq_dalpha,
                    ]
                    .into_iter()
                    .map(Cell::Num)
                    .collect(),
                );
            }
            let mut report = Report::new(table);
            report.meta("mode", Cell::text("affective"));
            report.meta("alpha_hat", Cell::Num(scenario_alpha_hat(scenario)?));
            add_warnings(&mut report, warnings);
            Ok(report)
        }
    }
}

/// `alpha_hat` for the scenario, used to resolve `hat` in alpha ranges.
pub fn scenario_alpha_hat(scenario: &Scenario) -> Result<f64, CliError> {
    let i0 = within_party_influence(&scenario.legislature, scenario.params.beta())?;
    Ok(polinflux::affective::alpha_hat(
        scenario.params.theta,
        i0.party_f_sum(),
        i0.party_a_sum(),
    ))
}

pub fn simulation_table(leg: &Legislature, est: &MonteCarloEstimate) -> (Table, bool) {
    let labels = legislator_labels(leg);
    let mut table = Table::new(
        "simulation",
        &[
            "legislator",
            "party",
            "analytic_q",
            "empirical_q",
            "std_error",
            "z_score",
            "pass",
        ],
    );
    let z = est.z_scores();
    let mut all = true;
    for i in 0..leg.n() {
        let pass = z[i] <= SIMULATION_Z_LIMIT;
        all &= pass;
        table.push(vec![
            Cell::text(&labels[i]),
            Cell::text(leg.party_of(i).label()),
            Cell::Num(est.analytic[i]),
            Cell::Num(est.frequencies[i]),
            Cell::Num(est.standard_errors[i]),
            Cell::Num(z[i]),
            Cell::flag(pass),
        ]);
    }
    (table, all)
}

pub fn cmd_simulate(
    scenario: &Scenario,
    mode: Mode,
    trials: u64,
    seed: u64,
) -> Result<Report, CliError> {
    let config = SimulationConfig::new(trials, seed, mode)?;
    let warnings = validate(scenario, mode)?;
    let eq = equilibrium_for(scenario, mode)?;
    let est = monte_carlo_frequencies(
        &scenario.legislature,
        &scenario.params,
        &scenario.utility,
        &eq.investments,
        &config,
    )?;
    let (table, all) = simulation_table(&scenario.legislature, &est);
    let mut report = Report::new(table);
    report.meta("mode", Cell::text(mode_name(mode)));
    report.meta("seed", Cell::Int(est.seed));
    report.meta("trials", Cell::Int(est.trials));
    report.meta("generator", Cell::text(est.generator));
    if !all {
        report.failure = Some(format!(
            "a simulated frequency is more than {SIMULATION_Z_LIMIT} standard errors from q*"
        ));
    }
    add_warnings(&mut report, warnings);
    Ok(report)
}
