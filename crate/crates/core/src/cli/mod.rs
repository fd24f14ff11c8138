//! Run configuration and the drivers behind the `cutfrac` binary.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::domain::json::load_domain;
use crate::domain::{coercivity_indicator, verify_partial_integration, Analytic, FracturedDomain};
use crate::fem::{assemble, Discretization, FormParams, SolutionField};
use crate::mesh::{write_cut_csv, BackgroundMesh, QuadratureOrder};
use crate::post::{
    coercivity_terms, convergence_rates, energy_error, export_csv, export_solution_csv, export_vtk, point_balance, point_traces,
    ErrorReport,
};
use crate::presets::Preset;
use crate::{vec2, Error, Result};

/// Where the domain comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSource {
    Preset(Preset),
    File(PathBuf),
}

impl DomainSource {
    pub fn parse(s: &str) -> Result<Self> {
        if let Ok(p) = s.parse::<Preset>() {
            return Ok(DomainSource::Preset(p));
        }
        if s.ends_with(".json") {
            return Ok(DomainSource::File(PathBuf::from(s)));
        }
        Err(s.parse::<Preset>().unwrap_err())
    }

    pub fn load(&self) -> Result<FracturedDomain> {
        match self {
            DomainSource::Preset(p) => Ok(p.domain()),
            DomainSource::File(path) => load_domain(path),
        }
    }

    pub fn exact(&self) -> Option<Analytic> {
        match self {
            DomainSource::Preset(p) => p.exact(),
            DomainSource::File(_) => None,
        }
    }
}

impl fmt::Display for DomainSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSource::Preset(p) => write!(f, "{p}"),
            DomainSource::File(path) => write!(f, "{}", path.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: DomainSource,
    /// Cells per side; several values for a convergence study.
    pub nx: Vec<usize>,
    pub params: FormParams,
    pub out: PathBuf,
    pub vtk: bool,
    pub csv: bool,
    pub check_identities: bool,
    pub deterministic: bool,
}

/// Keys accepted in a JSON configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    domain: Option<String>,
    nx: Option<NxList>,
    tau1: Option<f64>,
    tau2: Option<f64>,
    out: Option<PathBuf>,
    vtk: Option<bool>,
    csv: Option<bool>,
    check_identities: Option<bool>,
    deterministic: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum NxList {
    One(usize),
    Many(Vec<usize>),
}

/// Command-line values; `Some` / `true` override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub domain: Option<String>,
    pub nx: Option<Vec<usize>>,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
    pub out: Option<PathBuf>,
    pub vtk: bool,
    pub csv: bool,
    pub check_identities: bool,
    pub deterministic: bool,
}

/// Merge an optional JSON file with command-line overrides and validate.
pub fn parse_config(file: Option<&Path>, o: Overrides) -> Result<RunConfig> {
    let f: ConfigFile = match file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            if text.trim().is_empty() {
                ConfigFile::default()
            } else {
                serde_json::from_str(&text)?
            }
        }
        None => ConfigFile::default(),
    };
    let defaults = FormParams::default();
    let domain = o
        .domain
        .or(f.domain)
        .ok_or_else(|| Error::Config("no domain given (preset name or JSON file)".into()))?;
    let nx = o
        .nx
        .or(f.nx.map(|n| match n {
            NxList::One(n) => vec![n],
            NxList::Many(v) => v,
        }))
        .unwrap_or_else(|| vec![10]);
    let cfg = RunConfig {
        source: DomainSource::parse(&domain)?,
        nx,
        params: FormParams {
            tau1: o.tau1.or(f.tau1).unwrap_or(defaults.tau1),
            tau2: o.tau2.or(f.tau2).unwrap_or(defaults.tau2),
        },
        out: o.out.or(f.out).unwrap_or_else(|| PathBuf::from("out")),
        vtk: o.vtk || f.vtk.unwrap_or(false),
        csv: o.csv || f.csv.unwrap_or(false),
        check_identities: o.check_identities || f.check_identities.unwrap_or(false),
        deterministic: o.deterministic || f.deterministic.unwrap_or(false),
    };
    cfg.params.validate()?;
    if cfg.nx.is_empty() {
        return Err(Error::Parameter("nx list is empty".into()));
    }
    if let Some(&n) = cfg.nx.iter().find(|&&n| n < 2) {
        return Err(Error::Parameter(format!("nx must be at least 2, got {n}")));
    }
    Ok(cfg)
}

fn discretize(domain: FracturedDomain, nx: usize, deterministic: bool) -> Result<Discretization> {
    let mesh = BackgroundMesh::structured(domain.bbox, nx)?;
    Discretization::with_mesh(domain, mesh, QuadratureOrder::default(), !deterministic)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Point value and `(crack, ν·β, trace)` of every incident crack end.
pub type Junction = (f64, Vec<(usize, f64, f64)>);

/// Outcome of a single solve.
#[derive(Debug, Clone)]
pub struct SolveSummary {
    pub source: String,
    pub nx: usize,
    pub h: f64,
    pub dofs: usize,
    pub pinned: usize,
    pub residual: f64,
    pub coercivity_indicator: f64,
    /// Point-equation residual at each bifurcation point.
    pub balances: Vec<f64>,
    pub junctions: Vec<Junction>,
    pub errors: Option<ErrorReport>,
    pub identity: Option<(f64, f64)>,
    pub files: Vec<PathBuf>,
}

impl fmt::Display for SolveSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain               {}", self.source)?;
        writeln!(f, "nx, h                {}, {}", self.nx, self.h)?;
        writeln!(f, "dofs                 {} ({} pinned)", self.dofs, self.pinned)?;
        writeln!(f, "solve residual       {:.3e}", self.residual)?;
        writeln!(f, "min 2α + Div β       {}", self.coercivity_indicator)?;
        for (i, (b, (u0, traces))) in self.balances.iter().zip(&self.junctions).enumerate() {
            writeln!(f, "point#{i} balance      {b:.3e}")?;
            writeln!(f, "point#{i} value        {u0:.10}")?;
            for (c, flux, u) in traces {
                writeln!(f, "  crack#{c:<3} ν·β {flux:+.3}  trace {u:.10}")?;
            }
        }
        if let Some(r) = &self.errors {
            for c in &r.components {
                writeln!(f, "L2 error {:<12}{:.6e}", c.comp.to_string(), c.l2)?;
            }
            writeln!(f, "L2 error total       {:.6e}", r.l2)?;
            writeln!(f, "energy error         {:.6e}", r.energy)?;
            writeln!(f, "max error on Ω       {:.6e}", r.linf)?;
            writeln!(f, "max nodal error      {:.6e}", r.max_nodal)?;
        }
        if let Some((lhs, rhs)) = self.identity {
            writeln!(f, "coercivity identity  a_h(u,u) = {lhs:.12e}, terms = {rhs:.12e}")?;
        }
        for p in &self.files {
            writeln!(f, "wrote                {}", p.display())?;
        }
        Ok(())
    }
}

/// Build, assemble, solve and export for the first `nx` of the configuration.
pub fn run_solve(cfg: &RunConfig) -> Result<SolveSummary> {
    let domain = cfg.source.load()?;
    let indicator = coercivity_indicator(&domain, 4);
    let nx = cfg.nx[0];
    let disc = discretize(domain, nx, cfg.deterministic)?;
    let sol = disc.solve(cfg.params, cfg.deterministic)?;
    let balances = (0..disc.domain.points.len())
        .map(|p| point_balance(&sol.field, p))
        .collect::<Result<Vec<_>>>()?;
    let junctions = (0..disc.domain.points.len())
        .map(|p| {
            let t = point_traces(&sol.field, p)?;
            Ok((sol.field.point_value(p), t.into_iter().map(|(c, _, f, u)| (c, f, u)).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    let errors = match cfg.source.exact() {
        Some(u) => Some(energy_error(&sol.field, &u, cfg.params)?),
        None => None,
    };
    let identity = if cfg.check_identities {
        let lhs = sol.system.a.quadratic_form(&sol.field.coeffs)?;
        Some((lhs, coercivity_terms(&sol.field, cfg.params)?.total()))
    } else {
        None
    };
    let mut files = Vec::new();
    if cfg.vtk || cfg.csv {
        ensure_dir(&cfg.out)?;
    }
    let stem = match &cfg.source {
        DomainSource::Preset(p) => p.name().to_string(),
        DomainSource::File(p) => p.file_stem().map_or("domain".into(), |s| s.to_string_lossy().into_owned()),
    };
    if cfg.vtk {
        let p = cfg.out.join(format!("{stem}_nx{nx}.vtk"));
        export_vtk(&sol.field, &p)?;
        files.push(p);
    }
    if cfg.csv {
        let p = cfg.out.join(format!("{stem}_nx{nx}_solution.csv"));
        export_solution_csv(&sol.field, &p)?;
        files.push(p);
        let p = cfg.out.join(format!("{stem}_nx{nx}_cut.csv"));
        write_cut_csv(&p, &disc.active)?;
        files.push(p);
        if let Some(r) = &errors {
            let p = cfg.out.join(format!("{stem}_nx{nx}_errors.csv"));
            let rows: Vec<Vec<f64>> = r
                .components
                .iter()
                .map(|c| {
                    vec![
                        c.comp.dim as f64,
                        c.comp.index as f64,
                        c.l2,
                        c.mass,
                        c.residual,
                        c.stabilization,
                        c.interface,
                        c.boundary,
                    ]
                })
                .collect();
            export_csv(
                &p,
                &["dim", "index", "l2", "mass", "residual", "stabilization", "interface", "boundary"],
                &rows,
            )?;
            files.push(p);
        }
    }
    Ok(SolveSummary {
        source: cfg.source.to_string(),
        nx,
        h: disc.h(),
        dofs: disc.dofs.n,
        pinned: sol.system.pinned.len(),
        residual: sol.residual,
        coercivity_indicator: indicator,
        balances,
        junctions,
        errors,
        identity,
        files,
    })
}

/// One level of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub nx: usize,
    pub h: f64,
    pub dofs: usize,
    pub l2: f64,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceSummary {
    pub levels: Vec<Level>,
    pub l2: crate::post::Rates,
    pub energy: crate::post::Rates,
    pub table: Option<PathBuf>,
}

impl fmt::Display for ConvergenceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>5} {:>10} {:>7} {:>14} {:>8} {:>14} {:>8}", "nx", "h", "dofs", "L2", "rate", "energy", "rate")?;
        let rate = |r: Option<f64>| r.map_or("-".to_string(), |v| format!("{v:.3}"));
        for (i, l) in self.levels.iter().enumerate() {
            let (a, b) = if i == 0 {
                (None, None)
            } else {
                (self.l2.pairwise[i - 1], self.energy.pairwise[i - 1])
            };
            writeln!(
                f,
                "{:>5} {:>10.5} {:>7} {:>14.6e} {:>8} {:>14.6e} {:>8}",
                l.nx,
                l.h,
                l.dofs,
                l.l2,
                rate(a),
                l.energy,
                rate(b)
            )?;
        }
        writeln!(f, "least-squares slope: L2 {}, energy {}", rate(self.l2.slope), rate(self.energy.slope))?;
        if let Some(p) = &self.table {
            writeln!(f, "wrote {}", p.display())?;
        }
        Ok(())
    }
}

/// Solve on every `nx` of the configuration and fit rates. With `enforce`,
/// an energy slope below 1.4 is an error.
pub fn run_convergence(cfg: &RunConfig, enforce: bool) -> Result<ConvergenceSummary> {
    if cfg.nx.len() < 3 {
        return Err(Error::Parameter(format!(
            "a convergence study needs at least 3 levels, got {}",
            cfg.nx.len()
        )));
    }
    let exact = cfg
        .source
        .exact()
        .ok_or_else(|| Error::Config(format!("{} has no known exact solution", cfg.source)))?;
    let domain = cfg.source.load()?;
    let mut levels = Vec::with_capacity(cfg.nx.len());
    for &nx in &cfg.nx {
        let disc = discretize(domain.clone(), nx, cfg.deterministic)?;
        let sol = disc.solve(cfg.params, cfg.deterministic)?;
        let r = energy_error(&sol.field, &exact, cfg.params)?;
        levels.push(Level {
            nx,
            h: disc.h(),
            dofs: disc.dofs.n,
            l2: r.l2,
            energy: r.energy,
        });
    }
    let l2 = convergence_rates(&levels.iter().map(|l| (l.h, l.l2)).collect::<Vec<_>>())?;
    let energy = convergence_rates(&levels.iter().map(|l| (l.h, l.energy)).collect::<Vec<_>>())?;
    let table = if cfg.csv || enforce || cfg.vtk {
        ensure_dir(&cfg.out)?;
        let p = cfg.out.join(format!("{}_convergence.csv", cfg.source));
        let rows: Vec<Vec<f64>> = levels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let pr = |r: &crate::post::Rates| if i == 0 { f64::NAN } else { r.pairwise[i - 1].unwrap_or(f64::NAN) };
                vec![l.h, l.l2, l.energy, pr(&l2), pr(&energy)]
            })
            .collect();
        export_csv(&p, &["h", "l2", "energy", "l2_rate", "energy_rate"], &rows)?;
        Some(p)
    } else {
        None
    };
    let summary = ConvergenceSummary {
        levels,
        l2,
        energy,
        table,
    };
    if enforce {
        match summary.energy.slope {
            Some(s) if s >= 1.4 => {}
            s => return Err(Error::Check(format!("energy-norm slope {s:?} is below 1.4\n{summary}"))),
        }
    }
    Ok(summary)
}

/// One named diagnostic of `cutfrac check`.
#[derive(Debug, Clone)]
pub struct CheckItem {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckItem {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

/// Identity and diagnostic suite on one domain.
pub fn run_check(cfg: &RunConfig) -> Result<Vec<CheckItem>> {
    let domain = cfg.source.load()?;
    let mut items = Vec::new();
    items.push(CheckItem {
        name: "stratification (0 = ok)",
        value: if domain.is_stratified() { 0.0 } else { 1.0 },
        tolerance: 0.0,
    });
    let v = Analytic::uniform(|x| x.x + x.y, |_| vec2(1.0, 1.0));
    let w = Analytic::uniform(|x| x.x * x.y, |x| vec2(x.y, x.x));
    items.push(CheckItem {
        name: "partial integration residual",
        value: verify_partial_integration(&domain, &v, &w, 5)?,
        tolerance: 1e-10,
    });
    let disc = discretize(domain, cfg.nx[0], cfg.deterministic)?;
    let measure_err = disc
        .active
        .iter()
        .filter(|am| am.comp.dim > 0)
        .map(|am| {
            let exact = match am.comp.dim {
                2 => disc.domain.bulks[am.comp.index].area(),
                _ => disc.domain.cracks[am.comp.index].length(),
            };
            (am.measure() - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    items.push(CheckItem {
        name: "cut measure partition (relative)",
        value: measure_err,
        tolerance: 1e-12,
    });
    let sys = assemble(&disc, cfg.params, cfg.deterministic)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let c: Vec<f64> = (0..disc.dofs.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lhs = sys.a.quadratic_form(&c)?;
        let field = SolutionField::new(&disc, c);
        let t = coercivity_terms(&field, cfg.params)?;
        worst = worst.max((lhs - t.total()).abs() / t.scale());
    }
    if sys.pinned.is_empty() {
        items.push(CheckItem {
            name: "coercivity identity (relative)",
            value: worst,
            tolerance: 1e-8,
        });
    }
    let sol = disc.solve(cfg.params, cfg.deterministic)?;
    items.push(CheckItem {
        name: "solve residual",
        value: sol.residual,
        tolerance: 1e-8,
    });
    let umax = crate::linalg::norm_inf(&sol.field.coeffs).max(1.0);
    for p in 0..disc.domain.points.len() {
        items.push(CheckItem {
            name: "point balance / max|u|",
            value: point_balance(&sol.field, p)? / umax,
            tolerance: 1e-6,
        });
    }
    Ok(items)
}
