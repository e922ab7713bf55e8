//! Unit systems and the characteristic length scales of a gravitating quantum
//! particle.
//!
//! Four length scales matter here. For a particle of mass m:
//!
//! * Planck length  l_P = sqrt(hbar G / c^3)
//! * reduced Compton wavelength  lambda_C = hbar / (m c)
//! * gravitational localization length  l_D = hbar^2 / (G m^3)
//! * its relativistic correction  l_D^(r) = l_D sqrt(1 - (m/m_P)^4)
//!
//! l_D^(r) shrinks to zero at the Planck mass m_P = sqrt(hbar c / G) and is
//! undefined above it; that undefinedness is carried as `Option<f64>` rather
//! than an error so scans can cross m_P without stopping.

use crate::error::{ensure_positive, Result};

/// Reduced Planck constant, J s (CODATA 2018).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Newtonian constant of gravitation, m^3 kg^-1 s^-2 (CODATA 2018).
pub const G_SI: f64 = 6.674_30e-11;
/// Speed of light in vacuum, m s^-1 (exact).
pub const C_SI: f64 = 2.997_924_58e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSystem {
    /// SI with CODATA 2018 constants.
    Si,
    /// hbar = G = c = 1.
    Planck,
    /// hbar = c = 1 (G set to 1; it never enters box physics).
    Natural,
    /// hbar = G = m = 1, the mass-relative system the SNE solver works in.
    Solver,
}

impl UnitSystem {
    pub fn label(self) -> &'static str {
        match self {
            UnitSystem::Si => "si",
            UnitSystem::Planck => "planck",
            UnitSystem::Natural => "natural",
            UnitSystem::Solver => "solver",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub grav: f64,
    pub c: f64,
    pub system: UnitSystem,
}

impl PhysicalConstants {
    pub fn si() -> Self {
        Self { hbar: HBAR_SI, grav: G_SI, c: C_SI, system: UnitSystem::Si }
    }

    pub fn planck() -> Self {
        Self { hbar: 1.0, grav: 1.0, c: 1.0, system: UnitSystem::Planck }
    }

    pub fn natural() -> Self {
        Self { hbar: 1.0, grav: 1.0, c: 1.0, system: UnitSystem::Natural }
    }

    /// The solver's own system. c is a placeholder: with hbar = G = m = 1 the
    /// value of c is fixed only once the mass ratio m/m_P is known, which is
    /// why relativistic runs cannot be requested in these units.
    pub fn solver() -> Self {
        Self { hbar: 1.0, grav: 1.0, c: 1.0, system: UnitSystem::Solver }
    }

    pub fn new(hbar: f64, grav: f64, c: f64, system: UnitSystem) -> Result<Self> {
        ensure_positive("hbar", hbar)?;
        ensure_positive("G", grav)?;
        ensure_positive("c", c)?;
        Ok(Self { hbar, grav, c, system })
    }

    /// m_P = sqrt(hbar c / G).
    pub fn planck_mass(&self) -> f64 {
        (self.hbar * self.c / self.grav).sqrt()
    }

    /// l_P = sqrt(hbar G / c^3).
    pub fn planck_length(&self) -> f64 {
        (self.hbar * self.grav / (self.c * self.c * self.c)).sqrt()
    }
}

/// Reduced Compton wavelength hbar / (m c).
pub fn compton_reduced(mass: f64, k: &PhysicalConstants) -> Result<f64> {
    ensure_positive("mass", mass)?;
    Ok(k.hbar / (mass * k.c))
}

/// Gravitational localization length hbar^2 / (G m^3).
pub fn diosi_length(mass: f64, k: &PhysicalConstants) -> Result<f64> {
    ensure_positive("mass", mass)?;
    Ok(k.hbar * k.hbar / (k.grav * mass * mass * mass))
}

/// Relativistic localization length l_D sqrt(1 - (m/m_P)^4).
///
/// Zero exactly at the Planck mass, `None` above it. The radicand is
/// evaluated as (1 - x)(1 + x) with x = (m/m_P)^2 = G m^2/(hbar c), which
/// stays accurate when m approaches m_P.
pub fn diosi_length_rel(mass: f64, k: &PhysicalConstants) -> Result<Option<f64>> {
    ensure_positive("mass", mass)?;
    let x = k.grav * mass * mass / (k.hbar * k.c);
    if x > 1.0 {
        return Ok(None);
    }
    let ld = diosi_length(mass, k)?;
    Ok(Some(ld * ((1.0 - x) * (1.0 + x)).sqrt()))
}

/// The full scale bundle for one mass.
#[derive(Debug, Clone, Copy)]
pub struct LengthScales {
    pub mass: f64,
    pub mass_over_planck: f64,
    pub planck_mass: f64,
    pub planck_length: f64,
    pub compton_reduced: f64,
    pub diosi: f64,
    /// `None` above the Planck mass.
    pub diosi_rel: Option<f64>,
}

pub fn scales_for_mass(mass: f64, k: &PhysicalConstants) -> Result<LengthScales> {
    ensure_positive("mass", mass)?;
    let planck_mass = k.planck_mass();
    Ok(LengthScales {
        mass,
        mass_over_planck: mass / planck_mass,
        planck_mass,
        planck_length: k.planck_length(),
        compton_reduced: compton_reduced(mass, k)?,
        diosi: diosi_length(mass, k)?,
        diosi_rel: diosi_length_rel(mass, k)?,
    })
}

/// Energy carried by one unit of the solver system (hbar = G = m = 1),
/// expressed in the active system: G^2 m^5 / hbar^2.
pub fn solver_energy_unit(mass: f64, k: &PhysicalConstants) -> Result<f64> {
    ensure_positive("mass", mass)?;
    let m5 = mass * mass * mass * mass * mass;
    Ok(k.grav * k.grav * m5 / (k.hbar * k.hbar))
}
