//! Particle in a box with the gamma-corrected kinetic operator.
//!
//! For an infinite well of width L the Schroedinger levels are
//! E_n = hbar^2 n^2 pi^2 / (2 m L^2). Replacing the kinetic prefactor by
//! hbar^2/((1+gamma_n) m) with gamma_n = sqrt(1 + hbar^2 n^2 pi^2/(m^2 c^2 L^2))
//! gives
//!
//!   E_n^(gp) = hbar^2 n^2 pi^2 / ((1 + gamma_n) m L^2),
//!
//! which is algebraically the exact relativistic dispersion
//! sqrt(m^2 c^4 + p_n^2 c^2) - m c^2 at p_n = hbar n pi / L. The leading
//! correction, E_n - p_n^4/(8 m^3 c^2), is kept as a separate closed form.

use std::f64::consts::PI;

use crate::error::{ensure_positive, Error, Result};
use crate::gamma::gamma_from_kinetic;
use crate::units::PhysicalConstants;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

fn validate(mass: f64, width: f64, level: u32) -> Result<()> {
    ensure_positive("mass", mass)?;
    ensure_positive("width", width)?;
    if level == 0 {
        return Err(Error::InvalidInput("box level starts at 1".into()));
    }
    Ok(())
}

fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidInput(format!("{name} overflowed; inputs too extreme")))
    }
}

/// Schroedinger level hbar^2 n^2 pi^2 / (2 m L^2).
pub fn energy_nr(mass: f64, width: f64, level: u32, k: &PhysicalConstants) -> Result<f64> {
    validate(mass, width, level)?;
    let q = k.hbar * f64::from(level) * PI / width;
    finite("energy_nr", q * q / (2.0 * mass))
}

/// gamma of level n, the generic kinetic formula evaluated on the
/// Schroedinger eigenvalue.
pub fn gamma_box(mass: f64, width: f64, level: u32, k: &PhysicalConstants) -> Result<f64> {
    let e_nr = energy_nr(mass, width, level, k)?;
    gamma_from_kinetic(e_nr, mass, k.c)
}

/// Corrected level hbar^2 n^2 pi^2 / ((1 + gamma_n) m L^2).
pub fn energy_gp(mass: f64, width: f64, level: u32, k: &PhysicalConstants) -> Result<f64> {
    let e_nr = energy_nr(mass, width, level, k)?;
    let g = gamma_from_kinetic(e_nr, mass, k.c)?;
    finite("energy_gp", 2.0 * e_nr / (1.0 + g))
}

/// First-order expansion E_nr - hbar^4 n^4 pi^4 / (8 m^3 c^2 L^4).
/// Only meaningful while n pi lambda_C / L is small; it goes negative far
/// outside that regime.
pub fn energy_expansion(mass: f64, width: f64, level: u32, k: &PhysicalConstants) -> Result<f64> {
    let e_nr = energy_nr(mass, width, level, k)?;
    let p_over_mc = k.hbar * f64::from(level) * PI / (width * mass * k.c);
    finite("energy_expansion", e_nr * (1.0 - 0.25 * p_over_mc * p_over_mc))
}

#[derive(Debug, Clone, Copy)]
pub struct BoxLevel {
    pub level: u32,
    pub energy_nr: f64,
    pub energy_gp: f64,
    pub energy_expansion: f64,
    pub gamma: f64,
}

pub fn level_energies(mass: f64, width: f64, level: u32, k: &PhysicalConstants) -> Result<BoxLevel> {
    Ok(BoxLevel {
        level,
        energy_nr: energy_nr(mass, width, level, k)?,
        energy_gp: energy_gp(mass, width, level, k)?,
        energy_expansion: energy_expansion(mass, width, level, k)?,
        gamma: gamma_box(mass, width, level, k)?,
    })
}

/// Levels 1..=n_max at one width.
pub fn spectrum(mass: f64, width: f64, n_max: u32, k: &PhysicalConstants) -> Result<Vec<BoxLevel>> {
    validate(mass, width, n_max)?;
    (1..=n_max).map(|n| level_energies(mass, width, n, k)).collect()
}

/// Rayon twin of [`spectrum`]; output order matches the sequential one.
#[cfg(feature = "parallel")]
pub fn par_spectrum(mass: f64, width: f64, n_max: u32, k: &PhysicalConstants) -> Result<Vec<BoxLevel>> {
    validate(mass, width, n_max)?;
    (1..=n_max)
        .into_par_iter()
        .map(|n| level_energies(mass, width, n, k))
        .collect()
}

#[derive(Debug, Clone)]
pub struct WidthSpectrum {
    pub width: f64,
    pub levels: Vec<BoxLevel>,
}

pub fn spectra_for_widths(
    mass: f64,
    widths: &[f64],
    n_max: u32,
    k: &PhysicalConstants,
) -> Result<Vec<WidthSpectrum>> {
    widths
        .iter()
        .map(|&w| Ok(WidthSpectrum { width: w, levels: spectrum(mass, w, n_max, k)? }))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRow {
    pub width: f64,
    pub level: u32,
    pub energy_ref: f64,
    pub source: String,
}

#[derive(Debug, Clone, Default)]
pub struct ReferenceTable {
    rows: Vec<ReferenceRow>,
}

/// Two widths are the same table key when they agree to 1e-9 relative.
fn same_width(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

impl ReferenceTable {
    pub fn new(rows: Vec<ReferenceRow>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            ensure_positive("reference width", r.width)?;
            if r.level == 0 {
                return Err(Error::InvalidInput(format!("reference row {} has level 0", i + 1)));
            }
            if !r.energy_ref.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "reference row {} has non-finite energy",
                    i + 1
                )));
            }
            for earlier in &rows[..i] {
                if earlier.level == r.level && same_width(earlier.width, r.width) {
                    return Err(Error::InvalidInput(format!(
                        "duplicate reference entry for width {} level {}",
                        r.width, r.level
                    )));
                }
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[ReferenceRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn lookup(&self, width: f64, level: u32) -> Option<&ReferenceRow> {
        self.rows.iter().find(|r| r.level == level && same_width(r.width, width))
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub width: f64,
    pub level: u32,
    pub energy_gp: f64,
    pub energy_ref: Option<f64>,
    pub abs_dev: Option<f64>,
    pub rel_dev: Option<f64>,
    /// Set when the computed level sits above 2 m c^2, where a two-component
    /// single-particle picture stops being trustworthy.
    pub above_two_mc2: bool,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    /// Reference rows that matched none of the computed levels.
    pub unmatched_reference: Vec<ReferenceRow>,
    pub warnings: Vec<String>,
}

/// Lines up computed spectra with a reference table by (width, level).
/// Computed levels without a reference are kept with empty deviation cells;
/// reference rows without a computed partner are flagged, not dropped.
pub fn compare_reference(
    computed: &[WidthSpectrum],
    table: &ReferenceTable,
    mass: f64,
    k: &PhysicalConstants,
) -> Result<ComparisonReport> {
    ensure_positive("mass", mass)?;
    let two_mc2 = 2.0 * mass * k.c * k.c;
    let mut warnings = Vec::new();
    if table.is_empty() {
        warnings.push("reference table has no rows; nothing to compare against".to_string());
    }

    let mut rows = Vec::new();
    for ws in computed {
        for lv in &ws.levels {
            let reference = table.lookup(ws.width, lv.level);
            let (energy_ref, abs_dev, rel_dev) = match reference {
                Some(r) => {
                    let dev = lv.energy_gp - r.energy_ref;
                    (Some(r.energy_ref), Some(dev.abs()), Some(dev.abs() / r.energy_ref.abs()))
                }
                None => (None, None, None),
            };
            rows.push(ComparisonRow {
                width: ws.width,
                level: lv.level,
                energy_gp: lv.energy_gp,
                energy_ref,
                abs_dev,
                rel_dev,
                above_two_mc2: lv.energy_gp > two_mc2,
            });
        }
    }

    let unmatched: Vec<ReferenceRow> = table
        .rows()
        .iter()
        .filter(|r| {
            !computed.iter().any(|ws| {
                same_width(ws.width, r.width) && ws.levels.iter().any(|lv| lv.level == r.level)
            })
        })
        .cloned()
        .collect();
    for r in &unmatched {
        warnings.push(format!(
            "reference row (width {}, level {}, source {}) matches no computed level",
            r.width, r.level, r.source
        ));
    }

    Ok(ComparisonReport { rows, unmatched_reference: unmatched, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::UnitSystem;

    fn natural() -> PhysicalConstants {
        PhysicalConstants::natural()
    }

    #[test]
    fn ground_level_at_width_pi_natural_units() {
        // hbar = c = m = 1, L = pi: gamma_1 = sqrt(2), E = 1/(1 + sqrt(2))
        let k = natural();
        let e = energy_gp(1.0, PI, 1, &k).unwrap();
        let expected = 1.0 / (1.0 + 2.0_f64.sqrt());
        assert!(
            (e - expected).abs() / expected < 1e-15,
            "E_gp = {e}, closed form = {expected}"
        );
    }

    #[test]
    fn first_three_levels_at_width_pi() {
        // direct evaluation of the closed form: E_n = n^2/(1 + sqrt(1 + n^2))
        let k = natural();
        let got: Vec<f64> =
            spectrum(1.0, PI, 3, &k).unwrap().iter().map(|l| l.energy_gp).collect();
        let expected = [
            0.414_213_562_373_095_1,
            1.236_067_977_499_789_6,
            2.162_277_660_168_379_5,
        ];
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-14, "level energy {g} vs {e}");
        }
    }

    #[test]
    fn gamma_of_third_level_at_width_pi() {
        let k = natural();
        let g = gamma_box(1.0, PI, 3, &k).unwrap();
        assert!((g - 10.0_f64.sqrt()).abs() < 1e-14, "gamma_3 = {g}");
    }

    #[test]
    fn gamma_box_is_the_generic_kinetic_gamma() {
        let k = natural();
        for n in 1..=5 {
            let via_box = gamma_box(1.0, 2.5, n, &k).unwrap();
            let via_kinetic =
                gamma_from_kinetic(energy_nr(1.0, 2.5, n, &k).unwrap(), 1.0, k.c).unwrap();
            assert_eq!(via_box, via_kinetic);
        }
    }

    #[test]
    fn wide_box_correction_is_quartic_small() {
        // L = 100 pi lambda_C: relative shift approx (p/mc)^2/4 = 2.5e-5
        let k = natural();
        let l = 100.0 * PI;
        let e_nr = energy_nr(1.0, l, 1, &k).unwrap();
        let e_gp = energy_gp(1.0, l, 1, &k).unwrap();
        let dev = (e_nr - e_gp) / e_nr;
        assert!(
            (dev - 2.5e-5).abs() < 1e-8,
            "relative correction at L = 100 pi lambda_C is {dev}"
        );
    }

    #[test]
    fn narrow_box_approaches_massless_dispersion() {
        // L = 1e-6 lambda_C: E -> n pi hbar c / L from below
        let k = natural();
        let l = 1e-6;
        for n in 1..=3u32 {
            let e = energy_gp(1.0, l, n, &k).unwrap();
            let ratio = e * l / (f64::from(n) * PI * k.hbar * k.c);
            assert!(
                ratio > 1.0 - 1e-5 && ratio <= 1.0,
                "E L/(n pi hbar c) = {ratio} at n = {n}"
            );
        }
        // monotone approach as the box narrows
        let r = |l: f64| energy_gp(1.0, l, 1, &k).unwrap() * l / (PI * k.hbar * k.c);
        assert!(r(1e-6) > r(1e-5));
    }

    #[test]
    fn corrected_level_sits_below_schroedinger_level() {
        let k = natural();
        for n in 1..=20 {
            let lv = level_energies(1.0, 1.7, n, &k).unwrap();
            assert!(lv.energy_gp < lv.energy_nr);
            assert!(lv.energy_gp > 0.0);
            assert!(lv.gamma > 1.0);
        }
    }

    #[test]
    fn expansion_tracks_the_closed_form_when_soft() {
        // |E_gp - E_expansion| / E_nr <= s^4 for s = n pi lambda_C / L <= 0.1
        let k = natural();
        for &s in &[0.1, 0.05, 0.025, 0.01] {
            let l = PI / s;
            let lv = level_energies(1.0, l, 1, &k).unwrap();
            let resid = (lv.energy_gp - lv.energy_expansion).abs() / lv.energy_nr;
            assert!(resid <= s.powi(4), "residual {resid} at s = {s}");
        }
    }

    #[test]
    fn expansion_residual_shrinks_sixteen_fold_per_halving() {
        let k = natural();
        let resid = |s: f64| {
            let lv = level_energies(1.0, PI / s, 1, &k).unwrap();
            (lv.energy_gp - lv.energy_expansion).abs() / lv.energy_nr
        };
        let r1 = resid(0.1) / resid(0.05);
        let r2 = resid(0.05) / resid(0.025);
        assert!((12.0..=20.0).contains(&r1), "first halving ratio {r1}");
        assert!((12.0..=20.0).contains(&r2), "second halving ratio {r2}");
    }

    #[test]
    fn expansion_is_positive_in_its_domain() {
        let k = natural();
        for &s in &[0.9, 0.5, 0.1, 0.01] {
            let e = energy_expansion(1.0, PI / s, 1, &k).unwrap();
            assert!(e > 0.0, "expansion energy {e} at s = {s}");
        }
    }

    #[test]
    fn si_numbers_stay_finite_and_ordered() {
        let k = PhysicalConstants::si();
        let m_e = 9.109_383_7015e-31;
        let lv = level_energies(m_e, 1e-9, 1, &k).unwrap();
        assert!(lv.energy_nr > 0.0 && lv.energy_gp > 0.0);
        assert!(lv.energy_gp < lv.energy_nr);
    }

    #[test]
    fn rejects_bad_inputs() {
        let k = natural();
        assert!(energy_nr(1.0, 0.0, 1, &k).is_err());
        assert!(energy_nr(-1.0, 1.0, 1, &k).is_err());
        assert!(energy_nr(1.0, 1.0, 0, &k).is_err());
        assert!(spectrum(1.0, 1.0, 0, &k).is_err());
    }

    #[test]
    fn spectrum_is_strictly_increasing() {
        let k = natural();
        let s = spectrum(1.0, 0.8, 30, &k).unwrap();
        for w in s.windows(2) {
            assert!(w[1].energy_gp > w[0].energy_gp);
            assert!(w[1].energy_nr > w[0].energy_nr);
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_spectrum_matches_sequential() {
        let k = natural();
        let a = spectrum(1.0, 2.0, 64, &k).unwrap();
        let b = par_spectrum(1.0, 2.0, 64, &k).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.energy_gp.to_bits(), y.energy_gp.to_bits());
            assert_eq!(x.gamma.to_bits(), y.gamma.to_bits());
        }
    }

    #[test]
    fn reference_comparison_matches_and_flags() {
        let k = natural();
        let spectra = spectra_for_widths(1.0, &[PI, 2.0 * PI], 2, &k).unwrap();
        let e11 = spectra[0].levels[0].energy_gp;
        let table = ReferenceTable::new(vec![
            ReferenceRow { width: PI, level: 1, energy_ref: e11 * 1.01, source: "t".into() },
            ReferenceRow { width: PI, level: 7, energy_ref: 1.0, source: "orphan".into() },
        ])
        .unwrap();
        let report = compare_reference(&spectra, &table, 1.0, &k).unwrap();
        assert_eq!(report.rows.len(), 4);
        let matched = &report.rows[0];
        assert!(matched.energy_ref.is_some());
        let rel = matched.rel_dev.unwrap();
        assert!((rel - 0.01 / 1.01).abs() < 1e-12, "rel_dev = {rel}");
        assert!(report.rows[1].energy_ref.is_none());
        assert_eq!(report.unmatched_reference.len(), 1);
        assert_eq!(report.unmatched_reference[0].level, 7);
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn two_mc2_flag_follows_the_threshold() {
        let k = natural();
        // L = 2 lambda_C: level 1 sits at 0.86 m c^2, level 3 at 3.8 m c^2
        let spectra = spectra_for_widths(1.0, &[2.0], 3, &k).unwrap();
        let report =
            compare_reference(&spectra, &ReferenceTable::default(), 1.0, &k).unwrap();
        assert!(!report.rows[0].above_two_mc2);
        assert!(report.rows[2].above_two_mc2);
    }

    #[test]
    fn duplicate_reference_rows_are_rejected() {
        let r = ReferenceTable::new(vec![
            ReferenceRow { width: 1.0, level: 1, energy_ref: 0.4, source: "a".into() },
            ReferenceRow { width: 1.0, level: 1, energy_ref: 0.5, source: "b".into() },
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn natural_and_planck_box_energies_coincide() {
        // both systems set hbar = c = 1; the box never sees G
        let lv_n = level_energies(1.0, PI, 2, &PhysicalConstants::natural()).unwrap();
        let lv_p = level_energies(1.0, PI, 2, &PhysicalConstants::planck()).unwrap();
        assert_eq!(lv_n.energy_gp.to_bits(), lv_p.energy_gp.to_bits());
        assert_eq!(UnitSystem::Planck.label(), "planck");
    }
}
