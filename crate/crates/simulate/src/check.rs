use crate::pde::{solve_pde, FieldHistory, Grid1D, PdeConfig, PdeModel};
use crate::SimulateError;
use exprcore::Expr;
use kcontact::{dissipation_law_residual, ResidualReport};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DissipationCheck {
    pub coarse_max: f64,
    pub fine_max: f64,
    /// `coarse_max / fine_max`.
    pub ratio: f64,
}

/// Dissipation-law residual of `f` on a computed history.
pub fn history_dissipation_residual(history: &FieldHistory, f: &[Expr]) -> Result<ResidualReport, SimulateError> {
    let sec = history.to_section()?;
    Ok(dissipation_law_residual(&history.model.hamiltonian_system(), f, &sec)?)
}

/// Solves on `grid` and on the refined grid with `dt` halved, and compares
/// the max interior dissipation-law residuals.
pub fn discrete_dissipation_check(
    model: &PdeModel,
    grid: &Grid1D,
    dt: f64,
    t_end: f64,
    init: impl Fn(f64) -> Vec<f64>,
    f: &[Expr],
) -> Result<DissipationCheck, SimulateError> {
    let run = |g: &Grid1D, dt: f64| -> Result<f64, SimulateError> {
        let h = solve_pde(model, g, &PdeConfig::sampled(dt, t_end, g, &init))?;
        Ok(history_dissipation_residual(&h, f)?.max_abs)
    };
    let coarse_max = run(grid, dt)?;
    let fine_max = run(&grid.refined(), dt / 2.0)?;
    Ok(DissipationCheck {
        coarse_max,
        fine_max,
        ratio: coarse_max / fine_max,
    })
}
