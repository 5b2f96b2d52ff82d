use crate::ode::axpy;
use crate::SimulateError;
use exprcore::{expr, SampleDomain};
use kcontact::{Axis, DiscreteSection, KContactHamiltonian};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    /// Zero displacement at ghost nodes just outside the grid.
    Dirichlet,
}

impl FromStr for Boundary {
    type Err = SimulateError;

    fn from_str(s: &str) -> Result<Boundary, SimulateError> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "dirichlet" => Ok(Boundary::Dirichlet),
            _ => Err(SimulateError::InvalidConfig(format!("unknown boundary `{s}`"))),
        }
    }
}

/// `nx` nodes on `[x0, x0 + length]`: periodic grids drop the right end,
/// Dirichlet grids hold interior nodes only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    pub nx: usize,
    pub length: f64,
    pub boundary: Boundary,
    pub x0: f64,
}

impl Grid1D {
    pub fn new(nx: usize, length: f64, boundary: Boundary) -> Result<Grid1D, SimulateError> {
        if nx < 8 {
            return Err(SimulateError::GridTooSmall(nx));
        }
        if !(length > 0.0) {
            return Err(SimulateError::InvalidConfig(format!("length must be positive, got {length}")));
        }
        Ok(Grid1D {
            nx,
            length,
            boundary,
            x0: 0.0,
        })
    }

    pub fn refined(&self) -> Grid1D {
        let nx = match self.boundary {
            Boundary::Periodic => 2 * self.nx,
            Boundary::Dirichlet => 2 * self.nx + 1,
        };
        Grid1D { nx, ..*self }
    }

    pub fn dx(&self) -> f64 {
        match self.boundary {
            Boundary::Periodic => self.length / self.nx as f64,
            Boundary::Dirichlet => self.length / (self.nx + 1) as f64,
        }
    }

    pub fn x(&self, j: usize) -> f64 {
        match self.boundary {
            Boundary::Periodic => self.x0 + j as f64 * self.dx(),
            Boundary::Dirichlet => self.x0 + (j + 1) as f64 * self.dx(),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.nx).map(|j| self.x(j)).collect()
    }

    fn at(&self, u: &[f64], j: isize) -> f64 {
        let n = self.nx as isize;
        match self.boundary {
            Boundary::Periodic => u[j.rem_euclid(n) as usize],
            Boundary::Dirichlet if j < 0 || j >= n => 0.0,
            Boundary::Dirichlet => u[j as usize],
        }
    }

    fn laplacian(&self, u: &[f64], out: &mut [f64]) {
        let h2 = self.dx() * self.dx();
        for (j, o) in out.iter_mut().enumerate() {
            let j = j as isize;
            *o = (self.at(u, j - 1) - 2.0 * u[j as usize] + self.at(u, j + 1)) / h2;
        }
    }

    /// Centered first derivative.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let h = self.dx();
        (0..self.nx as isize).map(|j| (self.at(u, j + 1) - self.at(u, j - 1)) / (2.0 * h)).collect()
    }

    /// Forward differences over every cell, boundary cells included.
    fn forward_differences(&self, u: &[f64]) -> Vec<f64> {
        let h = self.dx();
        let (lo, hi) = match self.boundary {
            Boundary::Periodic => (0, self.nx as isize),
            Boundary::Dirichlet => (-1, self.nx as isize),
        };
        (lo..hi).map(|j| (self.at(u, j + 1) - self.at(u, j)) / h).collect()
    }

    pub fn l2(&self, e: &[f64]) -> f64 {
        (e.iter().map(|v| v * v).sum::<f64>() * self.dx()).sqrt()
    }
}

/// 1+1-dimensional models with the spatial momenta eliminated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PdeModel {
    /// Fields `u, pᵗ`; `pˣ = −τ∂ₓu`.
    DampedString { rho: f64, tau: f64, gamma: f64 },
    /// Fields `u, u_t` for `u_tt − c²u_xx + γu_t + m²u = 0`.
    Telegrapher { c: f64, gamma: f64, m: f64 },
    /// Fields `q¹, q², p₁ᵗ, p₂ᵗ` with coupling `C(z) = ½κz² + ¼βz⁴`.
    CoupledStrings { kappa: f64, beta: f64, gamma: f64 },
}

impl PdeModel {
    pub fn name(&self) -> &'static str {
        match self {
            PdeModel::DampedString { .. } => "damped_string",
            PdeModel::Telegrapher { .. } => "telegrapher",
            PdeModel::CoupledStrings { .. } => "coupled_strings",
        }
    }

    pub fn fields(&self) -> &'static [&'static str] {
        match self {
            PdeModel::DampedString { .. } => &["u", "pt"],
            PdeModel::Telegrapher { .. } => &["u", "ut"],
            PdeModel::CoupledStrings { .. } => &["q1", "q2", "p1t", "p2t"],
        }
    }

    pub fn wave_speed(&self) -> f64 {
        match *self {
            PdeModel::DampedString { rho, tau, .. } => (tau / rho).sqrt(),
            PdeModel::Telegrapher { c, .. } => c.abs(),
            PdeModel::CoupledStrings { .. } => 1.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            PdeModel::DampedString { gamma, .. }
            | PdeModel::Telegrapher { gamma, .. }
            | PdeModel::CoupledStrings { gamma, .. } => gamma,
        }
    }

    /// Decay rate and angular frequency of the standing mode with wave
    /// number `k`, from `λ² + γλ + ω₀² = 0`; `None` when overdamped or
    /// nonlinear.
    pub fn standing_mode(&self, k: f64) -> Option<(f64, f64)> {
        let w0sq = match *self {
            PdeModel::DampedString { rho, tau, .. } => tau / rho * k * k,
            PdeModel::Telegrapher { c, m, .. } => c * c * k * k + m * m,
            PdeModel::CoupledStrings { kappa, beta, .. } if beta == 0.0 => k * k + kappa,
            PdeModel::CoupledStrings { .. } => return None,
        };
        let g = self.gamma();
        let disc = w0sq - g * g / 4.0;
        (disc > 0.0).then(|| (g / 2.0, disc.sqrt()))
    }

    fn rhs(&self, grid: &Grid1D, y: &[f64], out: &mut [f64], lap: &mut [f64]) {
        let n = grid.nx;
        match *self {
            PdeModel::DampedString { rho, tau, gamma } => {
                let (u, p) = y.split_at(n);
                grid.laplacian(u, lap);
                let (du, dp) = out.split_at_mut(n);
                for j in 0..n {
                    du[j] = p[j] / rho;
                    dp[j] = tau * lap[j] - gamma * p[j];
                }
            }
            PdeModel::Telegrapher { c, gamma, m } => {
                let (u, w) = y.split_at(n);
                grid.laplacian(u, lap);
                let (du, dw) = out.split_at_mut(n);
                for j in 0..n {
                    du[j] = w[j];
                    dw[j] = c * c * lap[j] - gamma * w[j] - m * m * u[j];
                }
            }
            PdeModel::CoupledStrings { kappa, beta, gamma } => {
                let (q, p) = y.split_at(2 * n);
                let (dq, dp) = out.split_at_mut(2 * n);
                dq.copy_from_slice(p);
                for i in 0..2 {
                    grid.laplacian(&q[i * n..(i + 1) * n], lap);
                    for j in 0..n {
                        let z2 = q[j] * q[j] + q[n + j] * q[n + j];
                        dp[i * n + j] = lap[j] - (kappa + beta * z2) * q[i * n + j] - gamma * p[i * n + j];
                    }
                }
            }
        }
    }

    /// Lagrangian density at each node, driving `∂_t sᵗ` with `sˣ ≡ 0`.
    fn lagrangian_density(&self, grid: &Grid1D, y: &[f64], st: &[f64]) -> Vec<f64> {
        let n = grid.nx;
        let fields: Vec<&[f64]> = y.chunks(n).collect();
        match *self {
            PdeModel::DampedString { rho, tau, gamma } => {
                let ux = grid.gradient(fields[0]);
                (0..n)
                    .map(|j| {
                        let ut = fields[1][j] / rho;
                        0.5 * rho * ut * ut - 0.5 * tau * ux[j] * ux[j] - gamma * st[j]
                    })
                    .collect()
            }
            PdeModel::Telegrapher { c, gamma, m } => {
                let ux = grid.gradient(fields[0]);
                (0..n)
                    .map(|j| {
                        let (u, ut) = (fields[0][j], fields[1][j]);
                        0.5 * ut * ut - 0.5 * c * c * ux[j] * ux[j] - 0.5 * m * m * u * u - gamma * st[j]
                    })
                    .collect()
            }
            PdeModel::CoupledStrings { kappa, beta, gamma } => {
                let (q1x, q2x) = (grid.gradient(fields[0]), grid.gradient(fields[1]));
                (0..n)
                    .map(|j| {
                        let z2 = fields[0][j].powi(2) + fields[1][j].powi(2);
                        let kin = 0.5 * (fields[2][j].powi(2) + fields[3][j].powi(2));
                        let grad = 0.5 * (q1x[j].powi(2) + q2x[j].powi(2));
                        kin - grad - 0.5 * kappa * z2 - 0.25 * beta * z2 * z2 - gamma * st[j]
                    })
                    .collect()
            }
        }
    }

    /// Discrete energy with forward-difference gradients; conserved by the
    /// semi-discrete system when `γ = 0`.
    pub fn energy(&self, grid: &Grid1D, fields: &[Vec<f64>]) -> f64 {
        let dx = grid.dx();
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        match *self {
            PdeModel::DampedString { rho, tau, .. } => {
                (0.5 / rho * sq(&fields[1]) + 0.5 * tau * sq(&grid.forward_differences(&fields[0]))) * dx
            }
            PdeModel::Telegrapher { c, m, .. } => {
                (0.5 * sq(&fields[1]) + 0.5 * c * c * sq(&grid.forward_differences(&fields[0]))
                    + 0.5 * m * m * sq(&fields[0]))
                    * dx
            }
            PdeModel::CoupledStrings { kappa, beta, .. } => {
                let potential: f64 = (0..grid.nx)
                    .map(|j| {
                        let z2 = fields[0][j].powi(2) + fields[1][j].powi(2);
                        0.5 * kappa * z2 + 0.25 * beta * z2 * z2
                    })
                    .sum();
                let grad = sq(&grid.forward_differences(&fields[0])) + sq(&grid.forward_differences(&fields[1]));
                (0.5 * (sq(&fields[2]) + sq(&fields[3])) + 0.5 * grad + potential) * dx
            }
        }
    }

    /// The k-contact Hamiltonian system of the model in Darboux coordinates
    /// `(t, x)`, with the hyperbolic sign on the spatial momenta.
    pub fn hamiltonian_system(&self) -> KContactHamiltonian {
        let (positions, momenta, params, h): (&[&str], Vec<&[&str]>, &[&str], &str) = match self {
            PdeModel::DampedString { .. } => (
                &["u"],
                vec![&["pt", "px"]],
                &["rho", "tau", "gamma"],
                "pt^2/(2*rho) - px^2/(2*tau) + gamma*st",
            ),
            PdeModel::Telegrapher { .. } => (
                &["u"],
                vec![&["pt", "px"]],
                &["c", "gamma", "m"],
                "0.5*pt^2 - px^2/(2*c^2) + 0.5*m^2*u^2 + gamma*st",
            ),
            PdeModel::CoupledStrings { .. } => (
                &["q1", "q2"],
                vec![&["p1t", "p1x"], &["p2t", "p2x"]],
                &["kappa", "beta", "gamma"],
                "0.5*(p1t^2 + p2t^2 - p1x^2 - p2x^2) + 0.5*kappa*(q1^2 + q2^2) + 0.25*beta*(q1^2 + q2^2)^2 + gamma*st",
            ),
        };
        let domain = params
            .iter()
            .filter(|p| **p != "gamma" && **p != "beta" && **p != "kappa")
            .fold(SampleDomain::default(), |d, p| d.with_interval(p, 0.5, 2.0).expect("valid interval"));
        KContactHamiltonian::darboux(positions, &momenta, &["st", "sx"], params, expr(h), domain)
            .expect("built-in models are well formed")
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            PdeModel::DampedString { rho, tau, gamma } => vec![("rho", rho), ("tau", tau), ("gamma", gamma)],
            PdeModel::Telegrapher { c, gamma, m } => vec![("c", c), ("gamma", gamma), ("m", m)],
            PdeModel::CoupledStrings { kappa, beta, gamma } => vec![("kappa", kappa), ("beta", beta), ("gamma", gamma)],
        }
    }

    /// Spatial momenta recovered from the positions.
    fn spatial_momenta(&self, grid: &Grid1D, fields: &[Vec<f64>]) -> Vec<(&'static str, Vec<f64>)> {
        let scaled = |u: &[f64], k: f64| grid.gradient(u).into_iter().map(|g| -k * g).collect::<Vec<_>>();
        match *self {
            PdeModel::DampedString { tau, .. } => vec![("px", scaled(&fields[0], tau))],
            PdeModel::Telegrapher { c, .. } => vec![("px", scaled(&fields[0], c * c))],
            PdeModel::CoupledStrings { .. } => {
                vec![("p1x", scaled(&fields[0], 1.0)), ("p2x", scaled(&fields[1], 1.0))]
            }
        }
    }

    fn hamiltonian_names(&self) -> &'static [&'static str] {
        match self {
            PdeModel::DampedString { .. } | PdeModel::Telegrapher { .. } => &["u", "pt"],
            PdeModel::CoupledStrings { .. } => &["q1", "q2", "p1t", "p2t"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeConfig {
    pub dt: f64,
    pub t_end: f64,
    /// One array per model field, sampled on the grid.
    pub initial: Vec<Vec<f64>>,
    /// Keep every n-th time level.
    pub save_every: usize,
    /// Co-evolve `sᵗ` (with `sˣ ≡ 0`).
    pub actions: bool,
}

impl PdeConfig {
    /// Samples `init(x)` (one value per field) on the grid.
    pub fn sampled(dt: f64, t_end: f64, grid: &Grid1D, init: impl Fn(f64) -> Vec<f64>) -> PdeConfig {
        let rows: Vec<Vec<f64>> = grid.points().into_iter().map(init).collect();
        let width = rows.first().map_or(0, Vec::len);
        let initial = (0..width).map(|f| rows.iter().map(|r| r[f]).collect()).collect();
        PdeConfig {
            dt,
            t_end,
            initial,
            save_every: 1,
            actions: false,
        }
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldHistory {
    pub model: PdeModel,
    pub grid: Grid1D,
    pub fields: Vec<String>,
    pub times: Vec<f64>,
    /// `data[time][field][node]`.
    pub data: Vec<Vec<Vec<f64>>>,
}

impl FieldHistory {
    pub fn field(&self, name: &str, time: usize) -> Option<&[f64]> {
        let f = self.fields.iter().position(|n| n == name)?;
        Some(&self.data[time][f])
    }

    pub fn last(&self) -> &[Vec<f64>] {
        self.data.last().expect("history holds the initial state")
    }

    pub fn energy(&self, time: usize) -> f64 {
        self.model.energy(&self.grid, &self.data[time])
    }

    /// Header `t,x_0,…,x_{nx-1}`, one row per saved time.
    pub fn write_csv<W: Write>(&self, field: &str, w: W) -> Result<(), SimulateError> {
        let f = self
            .fields
            .iter()
            .position(|n| n == field)
            .ok_or_else(|| SimulateError::InvalidConfig(format!("no field `{field}`")))?;
        let mut out = csv::Writer::from_writer(w);
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((0..self.grid.nx).map(|j| format!("x_{j}")))
            .collect();
        out.write_record(&header)?;
        for (t, level) in self.times.iter().zip(&self.data) {
            let row: Vec<String> = std::iter::once(*t).chain(level[f].iter().copied()).map(|x| format!("{x:e}")).collect();
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Sampled section over `(t, x)` carrying every Hamiltonian coordinate
    /// except the actions; saved levels must be evenly spaced.
    pub fn to_section(&self) -> Result<DiscreteSection, SimulateError> {
        if self.times.len() < 3 {
            return Err(SimulateError::InvalidConfig("need three or more saved time levels".into()));
        }
        let nt = self.times.len();
        let nx = self.grid.nx;
        let dt = self.times[1] - self.times[0];
        let axes = vec![Axis::new("t", self.times[0], dt, nt), Axis::new("x", self.grid.x(0), self.grid.dx(), nx)];
        let mut columns: Vec<(String, Vec<f64>)> = self
            .model
            .hamiltonian_names()
            .iter()
            .map(|name| (name.to_string(), Vec::with_capacity(nt * nx)))
            .collect();
        let mut spatial: Vec<(String, Vec<f64>)> = Vec::new();
        for level in &self.data {
            for (f, (_, col)) in columns.iter_mut().enumerate() {
                col.extend_from_slice(&level[f]);
            }
            for (k, (name, v)) in self.model.spatial_momenta(&self.grid, level).into_iter().enumerate() {
                if spatial.len() <= k {
                    spatial.push((name.to_string(), Vec::with_capacity(nt * nx)));
                }
                spatial[k].1.extend(v);
            }
        }
        columns.extend(spatial);
        let sec = DiscreteSection::new(axes, columns.into_iter().collect())?;
        Ok(sec.with_params(&self.model.params()))
    }
}

/// Method of lines: second-order centered Laplacian, RK4 in time.
pub fn solve_pde(model: &PdeModel, grid: &Grid1D, cfg: &PdeConfig) -> Result<FieldHistory, SimulateError> {
    if !(cfg.dt > 0.0) || !(cfg.t_end >= cfg.dt) {
        return Err(SimulateError::InvalidConfig(format!("need 0 < dt <= t_end, got dt = {}, t_end = {}", cfg.dt, cfg.t_end)));
    }
    let max_dt = 0.5 * grid.dx() / model.wave_speed();
    if cfg.dt > max_dt * (1.0 + 1e-12) {
        return Err(SimulateError::Cfl { dt: cfg.dt, max_dt });
    }
    let nf = model.fields().len();
    if cfg.initial.len() != nf || cfg.initial.iter().any(|f| f.len() != grid.nx) {
        return Err(SimulateError::InvalidConfig(format!(
            "initial data needs {nf} arrays ({}) of {} values",
            model.fields().join(", "),
            grid.nx
        )));
    }
    let n = grid.nx;
    let every = cfg.save_every.max(1);
    let with_s = cfg.actions;
    let dim = nf * n + if with_s { n } else { 0 };
    let mut y: Vec<f64> = cfg.initial.concat();
    if with_s {
        y.extend(std::iter::repeat(0.0).take(n));
    }
    let mut lap = vec![0.0; n];
    let mut f = |y: &[f64], out: &mut [f64]| {
        model.rhs(grid, &y[..nf * n], &mut out[..nf * n], &mut lap);
        if with_s {
            let l = model.lagrangian_density(grid, &y[..nf * n], &y[nf * n..]);
            out[nf * n..].copy_from_slice(&l);
        }
    };
    let mut names: Vec<String> = model.fields().iter().map(|s| s.to_string()).collect();
    if with_s {
        names.push("st".into());
    }
    let split = |y: &[f64]| y.chunks(n).map(<[f64]>::to_vec).collect::<Vec<_>>();
    let mut times = vec![0.0];
    let mut data = vec![split(&y)];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let h = cfg.dt;
    for step in 1..=cfg.steps() {
        f(&y, &mut k1);
        axpy(&mut tmp, &y, 0.5 * h, &k1);
        f(&tmp, &mut k2);
        axpy(&mut tmp, &y, 0.5 * h, &k2);
        f(&tmp, &mut k3);
        axpy(&mut tmp, &y, h, &k3);
        f(&tmp, &mut k4);
        for i in 0..dim {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(SimulateError::NonFinite { step });
        }
        if step % every == 0 {
            times.push(step as f64 * h);
            data.push(split(&y));
        }
    }
    Ok(FieldHistory {
        model: *model,
        grid: *grid,
        fields: names,
        times,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_and_boundaries() {
        let g = Grid1D::new(8, 1.0, Boundary::Dirichlet).unwrap();
        assert!((g.dx() - 1.0 / 9.0).abs() < 1e-15);
        assert!((g.x(0) - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(g.refined().nx, 17);
        assert!((g.refined().dx() - g.dx() / 2.0).abs() < 1e-15);
        assert!(matches!(Grid1D::new(4, 1.0, Boundary::Periodic), Err(SimulateError::GridTooSmall(4))));
        let p = Grid1D::new(16, 2.0, Boundary::Periodic).unwrap();
        let u: Vec<f64> = p.points().iter().map(|x| x * x).collect();
        let mut lap = vec![0.0; 16];
        p.laplacian(&u, &mut lap);
        assert!((lap[5] - 2.0).abs() < 1e-9);
        assert_eq!("dirichlet".parse::<Boundary>().unwrap(), Boundary::Dirichlet);
    }

    #[test]
    fn cfl_is_enforced() {
        let model = PdeModel::DampedString { rho: 1.0, tau: 4.0, gamma: 0.0 };
        let g = Grid1D::new(16, 1.0, Boundary::Periodic).unwrap();
        let cfg = PdeConfig::sampled(0.02, 0.1, &g, |_| vec![0.0, 0.0]);
        match solve_pde(&model, &g, &cfg) {
            Err(SimulateError::Cfl { max_dt, .. }) => assert!((max_dt - 0.5 / 16.0 / 2.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn history_layout_and_section() {
        let model = PdeModel::CoupledStrings { kappa: 1.0, beta: 0.5, gamma: 0.1 };
        let g = Grid1D::new(16, 1.0, Boundary::Periodic).unwrap();
        let mut cfg = PdeConfig::sampled(0.01, 0.1, &g, |x| vec![x.sin(), x.cos(), 0.0, 0.0]);
        cfg.save_every = 2;
        cfg.actions = true;
        let h = solve_pde(&model, &g, &cfg).unwrap();
        assert_eq!(h.times.len(), 6);
        assert_eq!(h.fields, ["q1", "q2", "p1t", "p2t", "st"]);
        let sec = h.to_section().unwrap();
        assert_eq!(sec.coordinates().collect::<Vec<_>>(), ["q1", "q2", "p1t", "p2t", "p1x", "p2x"]);
        assert_eq!(sec.size(), 6 * 16);
        let mut buf = Vec::new();
        h.write_csv("q2", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,x_0,x_1"));
        assert_eq!(text.lines().count(), 7);
    }
}
