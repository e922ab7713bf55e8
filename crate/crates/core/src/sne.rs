//! Self-consistent ground state of a particle bound by the Newtonian
//! potential of its own probability density, with an optional
//! gamma-corrected kinetic operator.
//!
//! Internally everything runs in the solver system hbar = G = m = 1, where
//! the non-relativistic problem has no free parameter at all: lengths come
//! out in units of l_D = hbar^2/(G m^3) and energies in units of
//! G^2 m^5/hbar^2. The mass enters only through the ratio mu = m/m_P, which
//! sets m c^2 = mu^-4 in solver units and thereby the strength of the gamma
//! correction. Results are converted back to the caller's unit system.

use crate::error::{ensure_positive, Error, Result};
use crate::gamma::{gamma_fixed_point, gamma_from_kinetic, oscillates, FixedPointConfig};
use crate::radial::{
    hartree_potential, kinetic_expectation, lowest_eigenpair_seeded, potential_expectation,
    radius_diagnostics, RadialGrid, RadialPotential, RadialWavefunction,
};
use crate::units::{diosi_length, solver_energy_unit, PhysicalConstants, UnitSystem};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub const DEFAULT_N_POINTS: usize = 4000;
/// Default box edge in units of l_D. 10 l_D clips the exponential tail hard
/// enough to shift the eigenvalue by several percent; 20 l_D brings the
/// truncation error well below the grid error.
pub const DEFAULT_R_MAX_IN_DIOSI: f64 = 20.0;

#[derive(Debug, Clone)]
pub struct SneConfig {
    pub n_points: usize,
    /// Box edge in the caller's length unit; `None` picks 20 l_D(m).
    pub r_max: Option<f64>,
    /// Width of the starting Gaussian; `None` picks l_D(m).
    pub initial_width: Option<f64>,
    /// Linear mixing weight of the freshly computed potential, in (0, 1].
    pub mixing: f64,
    /// Relative eigenvalue change that ends the SCF loop.
    pub tol_energy: f64,
    /// Absolute tolerance on the gamma update.
    pub tol_gamma: f64,
    pub max_scf_iter: usize,
    pub max_gamma_iter: usize,
    /// Damping of the gamma update; 1.0 is the plain fixed point.
    pub gamma_damping: f64,
}

impl Default for SneConfig {
    fn default() -> Self {
        Self {
            n_points: DEFAULT_N_POINTS,
            r_max: None,
            initial_width: None,
            mixing: 0.5,
            tol_energy: 1e-10,
            tol_gamma: 1e-10,
            max_scf_iter: 500,
            max_gamma_iter: 50,
            gamma_damping: 1.0,
        }
    }
}

impl SneConfig {
    fn validate(&self) -> Result<()> {
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "mixing must lie in (0, 1], got {}",
                self.mixing
            )));
        }
        ensure_positive("tol_energy", self.tol_energy)?;
        ensure_positive("tol_gamma", self.tol_gamma)?;
        if !(self.gamma_damping > 0.0 && self.gamma_damping <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "gamma_damping must lie in (0, 1], got {}",
                self.gamma_damping
            )));
        }
        if self.max_scf_iter == 0 || self.max_gamma_iter == 0 {
            return Err(Error::InvalidInput("iteration caps must be at least 1".into()));
        }
        if let Some(r) = self.r_max {
            ensure_positive("r_max", r)?;
        }
        if let Some(w) = self.initial_width {
            ensure_positive("initial_width", w)?;
        }
        Ok(())
    }
}

/// Converged (or best-effort) ground state. All dimensional fields are in
/// the unit system of the constants the solve was called with.
#[derive(Debug, Clone)]
pub struct SneSolution {
    pub mass: f64,
    pub relativistic: bool,
    /// Eigenvalue E of the stationary equation.
    pub eigenvalue: f64,
    /// T + W/2; the Hartree term is double-counted in E.
    pub total_energy: f64,
    /// Kinetic expectation of the solved operator, E - W.
    pub kinetic: f64,
    /// Expectation of the self-potential.
    pub potential: f64,
    /// Plain Schroedinger kinetic expectation (hbar^2/2m), the quantity that
    /// feeds gamma.
    pub kinetic_schrodinger: f64,
    pub gamma: f64,
    /// |last gamma update| of the outer loop; 0 for a non-relativistic run.
    pub gamma_residual: f64,
    pub wavefunction: RadialWavefunction,
    pub r_mean: f64,
    pub r_peak: f64,
    pub r_rms: f64,
    /// Total inner iterations, summed over gamma stages and restarts.
    pub scf_iterations: usize,
    pub gamma_iterations: usize,
    pub converged: bool,
    /// Eigenvalue after every SCF step, in order across gamma stages.
    pub scf_history: Vec<f64>,
    /// L2 change of u at the last SCF step (secondary convergence metric).
    pub wavefunction_delta: f64,
    pub warnings: Vec<String>,
}

/// What one fixed-gamma SCF run produces, all in solver units.
struct ScfOutcome {
    eigenvalue: f64,
    u: RadialWavefunction,
    v_clean: RadialPotential,
    history: Vec<f64>,
    iterations: usize,
    converged: bool,
    wavefunction_delta: f64,
}

/// Inner loop: alternate the lowest eigenpair with a linear update of the
/// Hartree potential until the eigenvalue settles. `collapse_floor` is the
/// smallest density-peak radius still considered resolved on this grid.
fn scf_fixed_gamma(
    kinetic_coeff: f64,
    start_u: &RadialWavefunction,
    start_v: Option<&RadialPotential>,
    cfg: &SneConfig,
    collapse_floor: Option<f64>,
) -> Result<ScfOutcome> {
    let grid = *start_u.grid();
    let h = grid.spacing();
    let mut v = match start_v {
        Some(p) => p.clone(),
        None => hartree_potential(start_u, 1.0)?,
    };
    let mut u_prev = start_u.clone();
    let mut e_prev = f64::NAN;
    let mut history = Vec::new();
    let mut converged = false;
    let mut delta = f64::NAN;
    let mut iterations = 0;

    for it in 1..=cfg.max_scf_iter {
        iterations = it;
        let (e, u) = lowest_eigenpair_seeded(&v, kinetic_coeff, Some(&u_prev))?;
        history.push(e);
        if let Some(floor) = collapse_floor {
            let peak = radius_diagnostics(&u).r_peak;
            if peak < floor {
                return Err(Error::ScaleCollapse {
                    detail: format!(
                        "density peak at r = {peak:.3e} fell below 10 grid spacings \
                         ({floor:.3e}); the state is collapsing toward the grid scale"
                    ),
                });
            }
        }
        let fresh = hartree_potential(&u, 1.0)?;
        for (vi, fi) in v.values.iter_mut().zip(&fresh.values) {
            *vi = (1.0 - cfg.mixing) * *vi + cfg.mixing * fi;
        }
        delta = (h
            * u.values()
                .iter()
                .zip(u_prev.values())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>())
        .sqrt();
        let done = e_prev.is_finite()
            && (e - e_prev).abs() <= cfg.tol_energy * e.abs().max(f64::MIN_POSITIVE);
        u_prev = u;
        e_prev = e;
        if done {
            converged = true;
            break;
        }
    }

    let v_clean = hartree_potential(&u_prev, 1.0)?;
    Ok(ScfOutcome {
        eigenvalue: e_prev,
        u: u_prev,
        v_clean,
        history,
        iterations,
        converged,
        wavefunction_delta: delta,
    })
}

fn starting_state(
    mass: f64,
    consts: &PhysicalConstants,
    cfg: &SneConfig,
) -> Result<(RadialWavefunction, f64)> {
    let l_unit = diosi_length(mass, consts)?;
    let r_max = cfg.r_max.map_or(DEFAULT_R_MAX_IN_DIOSI, |r| r / l_unit);
    let width = cfg.initial_width.map_or(1.0, |w| w / l_unit);
    ensure_positive("r_max in solver units", r_max)?;
    ensure_positive("initial width in solver units", width)?;
    let grid = RadialGrid::new(r_max, cfg.n_points)?;
    let u0 = RadialWavefunction::from_profile(grid, |r| {
        r * (-r * r / (2.0 * width * width)).exp()
    })?
    .normalized()?;
    Ok((u0, l_unit))
}

/// Everything assemble() needs beyond the final SCF outcome.
struct SolveMeta {
    relativistic: bool,
    gamma: f64,
    gamma_residual: f64,
    gamma_iterations: usize,
    scf_iterations: usize,
    scf_history: Vec<f64>,
    converged: bool,
    warnings: Vec<String>,
}

fn assemble(
    mass: f64,
    consts: &PhysicalConstants,
    out: ScfOutcome,
    meta: SolveMeta,
) -> Result<SneSolution> {
    let l_unit = diosi_length(mass, consts)?;
    let e_unit = solver_energy_unit(mass, consts)?;
    let n = out.u.grid().n_points();

    let w = potential_expectation(&out.u, &out.v_clean)?;
    let e = out.eigenvalue;
    let t = e - w;
    let ks = kinetic_expectation(&out.u, 0.5);
    let d = radius_diagnostics(&out.u);

    let mut warnings = meta.warnings;
    let tail = (out.v_clean.values[n - 1] * out.u.values()[n - 1] * out.u.values()[n - 1]).abs();
    if tail > 1e-9 * e.abs() {
        warnings.push(format!(
            "boundary term |V u^2|(r_max) = {tail:.3e} is not negligible against |E| = {:.3e}; \
             the box is clipping the state, increase r_max",
            e.abs()
        ));
    }

    let grid_user = RadialGrid::new(out.u.grid().r_max() * l_unit, n)?;
    let scale = 1.0 / l_unit.sqrt();
    let wavefunction = RadialWavefunction::from_values(
        grid_user,
        out.u.values().iter().map(|v| v * scale).collect(),
    )?;

    Ok(SneSolution {
        mass,
        relativistic: meta.relativistic,
        eigenvalue: e * e_unit,
        total_energy: (t + 0.5 * w) * e_unit,
        kinetic: t * e_unit,
        potential: w * e_unit,
        kinetic_schrodinger: ks * e_unit,
        gamma: meta.gamma,
        gamma_residual: meta.gamma_residual,
        wavefunction,
        r_mean: d.r_mean * l_unit,
        r_peak: d.r_peak * l_unit,
        r_rms: d.r_rms * l_unit,
        scf_iterations: meta.scf_iterations,
        gamma_iterations: meta.gamma_iterations,
        converged: meta.converged,
        scf_history: meta.scf_history.iter().map(|x| x * e_unit).collect(),
        wavefunction_delta: out.wavefunction_delta,
        warnings,
    })
}

/// Ground state with the plain Schroedinger kinetic term (gamma frozen at 1).
///
/// In solver units this problem is universal, so the returned quantities
/// scale exactly as l_D and G^2 m^5/hbar^2 with mass.
pub fn solve_nr(mass: f64, consts: &PhysicalConstants, config: &SneConfig) -> Result<SneSolution> {
    ensure_positive("mass", mass)?;
    config.validate()?;
    if consts.system == UnitSystem::Solver && mass != 1.0 {
        return Err(Error::InvalidInput(
            "solver units define the mass itself as the unit; pass mass = 1".into(),
        ));
    }
    let (u0, _) = starting_state(mass, consts, config)?;
    let out = scf_fixed_gamma(0.5, &u0, None, config, None)?;
    let meta = SolveMeta {
        relativistic: false,
        gamma: 1.0,
        gamma_residual: 0.0,
        gamma_iterations: 0,
        scf_iterations: out.iterations,
        scf_history: out.history.clone(),
        converged: out.converged,
        warnings: Vec::new(),
    };
    assemble(mass, consts, out, meta)
}

/// Mutable state threaded through the gamma outer loop: the converged state
/// of the previous stage warm-starts the next one.
struct GpStages<'a> {
    u0: &'a RadialWavefunction,
    config: &'a SneConfig,
    collapse_floor: f64,
    cached: Option<ScfOutcome>,
    scf_total: usize,
    history: Vec<f64>,
    all_converged: bool,
}

impl GpStages<'_> {
    fn evaluate(&mut self, gamma: f64) -> Result<f64> {
        let kinetic_coeff = 1.0 / (1.0 + gamma);
        let out = match &self.cached {
            Some(prev) => scf_fixed_gamma(
                kinetic_coeff,
                &prev.u,
                Some(&prev.v_clean),
                self.config,
                Some(self.collapse_floor),
            )?,
            None => scf_fixed_gamma(
                kinetic_coeff,
                self.u0,
                None,
                self.config,
                Some(self.collapse_floor),
            )?,
        };
        self.scf_total += out.iterations;
        self.history.extend_from_slice(&out.history);
        self.all_converged &= out.converged;
        let ks = kinetic_expectation(&out.u, 0.5);
        self.cached = Some(out);
        Ok(ks)
    }

    fn restart(&mut self) {
        self.cached = None;
        self.all_converged = true;
    }
}

/// Ground state with the gamma-corrected kinetic prefactor
/// hbar^2/((1+gamma) m), gamma determined by the fixed point
/// gamma = sqrt(1 + 2 <K_S>/(m c^2)) over full SCF solves.
///
/// Refuses masses at or above the Planck mass: there the corrected
/// localization length is zero or undefined and the self-consistent state
/// has no resolvable width, so a collapse diagnostic is returned instead of
/// a number. Below but near m_P the same diagnostic fires at run time if the
/// density peak falls under 10 grid spacings.
pub fn solve_gp(mass: f64, consts: &PhysicalConstants, config: &SneConfig) -> Result<SneSolution> {
    ensure_positive("mass", mass)?;
    config.validate()?;
    if consts.system == UnitSystem::Solver {
        return Err(Error::InvalidInput(
            "solver units leave c undetermined until m/m_P is known; use si, planck, or \
             natural units for the corrected solve"
                .into(),
        ));
    }
    let mu = mass / consts.planck_mass();
    if mu >= 1.0 {
        return Err(Error::ScaleCollapse {
            detail: format!(
                "m/m_P = {mu:.6} >= 1: the corrected localization length vanishes at the \
                 Planck mass, so no resolvable self-consistent width exists"
            ),
        });
    }
    let c_solver = 1.0 / (mu * mu);

    let (u0, _) = starting_state(mass, consts, config)?;
    let mut stages = GpStages {
        u0: &u0,
        config,
        collapse_floor: 10.0 * u0.grid().spacing(),
        cached: None,
        scf_total: 0,
        history: Vec::new(),
        all_converged: true,
    };

    let mut fp_cfg = FixedPointConfig {
        tol: config.tol_gamma,
        max_iter: config.max_gamma_iter,
        damping: config.gamma_damping,
    };
    let mut report = gamma_fixed_point(|g| stages.evaluate(g), 1.0, c_solver, &fp_cfg)?;
    let mut gamma_iterations = report.iterations;
    let mut warnings = Vec::new();

    if !report.converged && oscillates(&report.history) && fp_cfg.damping > 0.5 {
        warnings.push(format!(
            "gamma iteration oscillated at damping {}; restarted with damping 0.5",
            fp_cfg.damping
        ));
        stages.restart();
        fp_cfg.damping = 0.5;
        report = gamma_fixed_point(|g| stages.evaluate(g), 1.0, c_solver, &fp_cfg)?;
        gamma_iterations += report.iterations;
    }

    let out = stages
        .cached
        .take()
        .ok_or_else(|| Error::Unconverged("gamma loop made no evaluation".into()))?;

    // close the loop exactly: gamma as implied by the final state
    let ks = kinetic_expectation(&out.u, 0.5);
    let gamma = gamma_from_kinetic(ks, 1.0, c_solver)?;

    let meta = SolveMeta {
        relativistic: true,
        gamma,
        gamma_residual: report.residual,
        gamma_iterations,
        scf_iterations: stages.scf_total,
        scf_history: stages.history,
        converged: report.converged && stages.all_converged,
        warnings,
    };
    assemble(mass, consts, out, meta)
}

#[derive(Debug, Clone, Copy)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
    pub eigenvalue: f64,
    /// T + W/2, the physical energy of the state.
    pub total: f64,
}

/// Splits a converged solution into T, W, E, and T + W/2. The eigenvalue
/// counts the self-interaction twice, which is why E = T + W while the
/// energy of the configuration is T + W/2.
pub fn energy_breakdown(solution: &SneSolution) -> Result<EnergyBreakdown> {
    if !solution.converged {
        return Err(Error::Unconverged(
            "energy breakdown is only meaningful for a converged solution".into(),
        ));
    }
    Ok(EnergyBreakdown {
        kinetic: solution.kinetic,
        potential: solution.potential,
        eigenvalue: solution.eigenvalue,
        total: solution.total_energy,
    })
}

/// One solve per mass, sequential. Failures are per-row so a scan over a
/// range that crosses the Planck mass keeps its valid rows.
pub fn solve_many(
    masses: &[f64],
    consts: &PhysicalConstants,
    config: &SneConfig,
    relativistic: bool,
) -> Vec<Result<SneSolution>> {
    masses
        .iter()
        .map(|&m| {
            if relativistic {
                solve_gp(m, consts, config)
            } else {
                solve_nr(m, consts, config)
            }
        })
        .collect()
}

/// Rayon twin of [`solve_many`]; row order matches the input order.
#[cfg(feature = "parallel")]
pub fn par_solve_many(
    masses: &[f64],
    consts: &PhysicalConstants,
    config: &SneConfig,
    relativistic: bool,
) -> Vec<Result<SneSolution>> {
    masses
        .par_iter()
        .map(|&m| {
            if relativistic {
                solve_gp(m, consts, config)
            } else {
                solve_nr(m, consts, config)
            }
        })
        .collect()
}
