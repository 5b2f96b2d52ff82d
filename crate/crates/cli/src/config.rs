use crate::registry::{find, ModelSpec};
use crate::{CliError, Result};
use exprcore::SampleDomain;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use simulate::Boundary;
use std::collections::BTreeMap;
use std::path::Path;

/// One source of settings: the config file or the command line. Unset
/// fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Layer {
    pub model: Option<String>,
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub ode: OdeLayer,
    pub pde: PdeLayer,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OdeLayer {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub init: BTreeMap<String, f64>,
    pub monitor: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeLayer {
    pub nx: Option<usize>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub bc: Option<Boundary>,
    pub length: Option<f64>,
    pub mode: Option<usize>,
}

impl Layer {
    pub fn from_json(text: &str) -> Result<Layer> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Layer> {
        Layer::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeSettings {
    pub dt: f64,
    pub t_end: f64,
    pub init: BTreeMap<String, f64>,
    pub monitors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdeSettings {
    pub nx: usize,
    pub t_end: f64,
    /// `None` picks `dx / (4 c)`.
    pub dt: Option<f64>,
    pub bc: Boundary,
    pub length: f64,
    pub mode: usize,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub params: IndexMap<String, f64>,
    pub seed: u64,
    pub ode: OdeSettings,
    pub pde: PdeSettings,
}

impl RunConfig {
    /// Model defaults only.
    pub fn defaults(model: &str) -> Result<RunConfig> {
        resolve(Some(model), &Layer::default(), &Layer::default())
    }

    pub fn domain(&self) -> SampleDomain {
        self.model.domain(self.seed)
    }

    pub fn params_map(&self) -> BTreeMap<String, f64> {
        self.params.iter().map(|(k, v)| (k.clone(), *v)).collect()
    }
}

pub const ODE_DT: f64 = 1e-3;
pub const ODE_T_END: f64 = 10.0;
pub const PDE_NX: usize = 256;
pub const PDE_T_END: f64 = 2.0;

/// Flags override the file, which overrides model defaults.
pub fn resolve(model: Option<&str>, file: &Layer, flags: &Layer) -> Result<RunConfig> {
    let name = model
        .or(flags.model.as_deref())
        .or(file.model.as_deref())
        .ok_or_else(|| CliError::Usage("no model given".into()))?;
    let spec = find(name)?;
    let mut params = spec.params.clone();
    for layer in [file, flags] {
        for (k, v) in &layer.params {
            match params.get_mut(k) {
                Some(slot) => *slot = *v,
                None => {
                    return Err(CliError::UnknownParam {
                        model: spec.name.to_string(),
                        name: k.clone(),
                        declared: spec.params.keys().cloned().collect(),
                    })
                }
            }
        }
    }
    let mut init = file.ode.init.clone();
    init.extend(flags.ode.init.clone());
    let monitors = if flags.ode.monitor.is_empty() { file.ode.monitor.clone() } else { flags.ode.monitor.clone() };
    let ode = OdeSettings {
        dt: flags.ode.dt.or(file.ode.dt).unwrap_or(ODE_DT),
        t_end: flags.ode.t_end.or(file.ode.t_end).unwrap_or(ODE_T_END),
        init,
        monitors,
    };
    let pde = PdeSettings {
        nx: flags.pde.nx.or(file.pde.nx).unwrap_or(PDE_NX),
        t_end: flags.pde.t_end.or(file.pde.t_end).unwrap_or(PDE_T_END),
        dt: flags.pde.dt.or(file.pde.dt),
        bc: flags.pde.bc.or(file.pde.bc).unwrap_or(Boundary::Periodic),
        length: flags.pde.length.or(file.pde.length).unwrap_or(1.0),
        mode: flags.pde.mode.or(file.pde.mode).unwrap_or(1),
    };
    if !(ode.dt > 0.0 && ode.t_end > 0.0) {
        return Err(CliError::Usage("dt and t_end must be positive".into()));
    }
    Ok(RunConfig {
        model: spec,
        params,
        seed: flags.seed.or(file.seed).unwrap_or_else(|| SampleDomain::default().seed()),
        ode,
        pde,
    })
}

/// `k=v,k2=v2` into a map.
pub fn parse_assignments(text: &str) -> Result<BTreeMap<String, f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected name=value, got `{pair}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("`{}` is not a number", v.trim())))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}
