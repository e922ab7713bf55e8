//! Closed-form estimates of the self-gravitating ground-state energy as a
//! function of an assumed localization width l, and the width that
//! minimizes them.
//!
//! The non-relativistic estimate hbar^2/(2 m l^2) - G m^2/l has its minimum
//! exactly at l_D = hbar^2/(G m^3). Replacing the kinetic term by the full
//! dispersion m c^2 (sqrt(1 + (lambda_C/l)^2) - 1) moves the minimum to
//! l_D sqrt(1 - (m/m_P)^4); at the Planck mass the two terms degenerate
//! into pure 1/l and the minimum disappears.

use crate::error::{ensure_positive, Error, Result};
use crate::units::{compton_reduced, diosi_length, PhysicalConstants};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateModel {
    NonRelativistic,
    Relativistic,
}

/// Kinetic estimate m c^2 (sqrt(1 + x^2) - 1) at x = lambda_C/l, written in
/// three branches so it stays accurate from x ~ 1e-150 to x ~ 1e150:
/// a series for small x, the rationalized form x^2/(1 + sqrt(1 + x^2)) in
/// the wide middle, and the ultra-relativistic expansion once x^2 would
/// overflow. The middle form is algebraically identical to the naive
/// difference but never cancels.
fn rel_kinetic(mc2: f64, x: f64) -> f64 {
    if x < 1e-4 {
        let x2 = x * x;
        mc2 * x2 * (0.5 - x2 / 8.0 + x2 * x2 / 16.0)
    } else if x <= 1e8 {
        let x2 = x * x;
        mc2 * x2 / (1.0 + (1.0 + x2).sqrt())
    } else {
        mc2 * (x - 1.0 + 0.5 / x)
    }
}

fn validate_inputs(mass: f64, width: f64) -> Result<()> {
    ensure_positive("mass", mass)?;
    ensure_positive("width", width)
}

/// hbar^2/(2 m l^2) - G m^2/l.
pub fn energy_estimate_nr(mass: f64, width: f64, consts: &PhysicalConstants) -> Result<f64> {
    validate_inputs(mass, width)?;
    let kin = consts.hbar * consts.hbar / (2.0 * mass * width * width);
    Ok(kin - consts.grav * mass * mass / width)
}

/// m c^2 (sqrt(1 + (lambda_C/l)^2) - 1) - G m^2/l.
pub fn energy_estimate_rel(mass: f64, width: f64, consts: &PhysicalConstants) -> Result<f64> {
    validate_inputs(mass, width)?;
    let mc2 = mass * consts.c * consts.c;
    let x = compton_reduced(mass, consts)? / width;
    Ok(rel_kinetic(mc2, x) - consts.grav * mass * mass / width)
}

#[derive(Debug, Clone)]
pub struct EstimateCurve {
    pub model: EstimateModel,
    pub mass: f64,
    /// (width, energy) pairs in the unit system the curve was sampled in.
    pub points: Vec<(f64, f64)>,
}

/// Samples an estimate on a log-spaced width grid, endpoints included.
pub fn curve_sample(
    model: EstimateModel,
    mass: f64,
    lo: f64,
    hi: f64,
    n: usize,
    consts: &PhysicalConstants,
) -> Result<EstimateCurve> {
    ensure_positive("lo", lo)?;
    if hi <= lo {
        return Err(Error::InvalidInput(format!(
            "width range needs hi > lo, got [{lo}, {hi}]"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 sample points".into()));
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let l = if i == n - 1 { hi } else { lo * (step * i as f64).exp() };
        let e = match model {
            EstimateModel::NonRelativistic => energy_estimate_nr(mass, l, consts)?,
            EstimateModel::Relativistic => energy_estimate_rel(mass, l, consts)?,
        };
        points.push((l, e));
    }
    Ok(EstimateCurve { model, mass, points })
}

/// Minimizer in t = 1/l where both estimates are smooth: golden section
/// localizes the minimum to ~0.1% and a ladder of symmetric three-point
/// parabola fits with shrinking spacing refines it. Near the minimum the
/// energy is flat to rounding within a relative half-width of sqrt(eps), so
/// a pure interval method cannot reach 1e-10; the parabola fits take their
/// curvature signal from points outside that dead zone and land at ~1e-12
/// for the quadratic curve and ~1e-10 for the dispersion one. Returns the
/// minimizing width.
///
/// `Ok(None)` marks the one physically meaningful boundary case: the
/// relativistic estimate at or above the Planck mass decreases all the way
/// to l = 0, so there is no minimum to report. Any other boundary hit is an
/// error asking for a wider bracket.
pub fn minimize_estimate(
    model: EstimateModel,
    mass: f64,
    consts: &PhysicalConstants,
    bracket: Option<(f64, f64)>,
    tol_rel: f64,
) -> Result<Option<f64>> {
    ensure_positive("mass", mass)?;
    ensure_positive("tol_rel", tol_rel)?;
    let l_d = diosi_length(mass, consts)?;
    let (l_lo, l_hi) = bracket.unwrap_or((1e-3 * l_d, 1e3 * l_d));
    ensure_positive("bracket lower edge", l_lo)?;
    if l_hi <= l_lo {
        return Err(Error::InvalidInput(format!(
            "bracket needs hi > lo, got [{l_lo}, {l_hi}]"
        )));
    }

    let f = |t: f64| -> Result<f64> {
        match model {
            EstimateModel::NonRelativistic => energy_estimate_nr(mass, 1.0 / t, consts),
            EstimateModel::Relativistic => energy_estimate_rel(mass, 1.0 / t, consts),
        }
    };

    // widths map to t = 1/l with the order reversed
    let mut a = 1.0 / l_hi;
    let mut b = 1.0 / l_lo;
    let (a0, b0) = (a, b);
    let fa0 = f(a)?;
    let fb0 = f(b)?;

    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let stop = tol_rel.max(1e-3);
    for _ in 0..500 {
        if b - a <= stop * 0.5 * (a + b) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }

    let (mut t_star, f_star) = if fc <= fd { (c, fc) } else { (d, fd) };

    // a minimum indistinguishable from an endpoint of the original bracket
    // was never interior
    if f_star >= fa0 || f_star >= fb0 {
        let at_planck_or_above = mass >= consts.planck_mass();
        if model == EstimateModel::Relativistic && at_planck_or_above {
            return Ok(None);
        }
        return Err(Error::BracketWithoutMinimum { lo: l_lo, hi: l_hi });
    }

    // symmetric fits f(t +- delta); wide spacing first for a clean
    // curvature signal, narrow last to shed the cubic-term bias
    for delta_rel in [1e-1, 1e-2, 1e-3, 1e-4, 3e-5] {
        let delta = delta_rel * t_star;
        let fm = f(t_star - delta)?;
        let f0 = f(t_star)?;
        let fp = f(t_star + delta)?;
        let den = fp - 2.0 * f0 + fm;
        if den <= 0.0 {
            continue;
        }
        let mut v = t_star + 0.5 * delta * (fm - fp) / den;
        if (v - t_star).abs() > delta {
            v = if v > t_star { t_star + delta } else { t_star - delta };
        }
        t_star = v.clamp(a0, b0);
    }

    Ok(Some(1.0 / t_star))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanSpacing {
    Linear,
    Log,
}

/// One mass in a scan of characteristic lengths.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub mass: f64,
    pub l_diosi: f64,
    pub lambda_compton: f64,
    pub l_planck: f64,
    /// `None` above the Planck mass, where the closed form is imaginary.
    pub l_diosi_rel: Option<f64>,
    /// Numerically minimized relativistic width; `None` when no minimum
    /// exists (at and above the Planck mass).
    pub l_star_numeric: Option<f64>,
}

fn scan_masses(lo: f64, hi: f64, n: usize, spacing: ScanSpacing) -> Result<Vec<f64>> {
    ensure_positive("lo", lo)?;
    if hi <= lo {
        return Err(Error::InvalidInput(format!(
            "mass range needs hi > lo, got [{lo}, {hi}]"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 scan points".into()));
    }
    let mut masses = Vec::with_capacity(n);
    for i in 0..n {
        let m = if i == n - 1 {
            hi
        } else {
            match spacing {
                ScanSpacing::Linear => lo + (hi - lo) * i as f64 / (n - 1) as f64,
                ScanSpacing::Log => lo * ((hi / lo).ln() * i as f64 / (n - 1) as f64).exp(),
            }
        };
        masses.push(m);
    }
    Ok(masses)
}

fn scan_row(mass: f64, consts: &PhysicalConstants) -> Result<ScanRow> {
    let scales = crate::units::scales_for_mass(mass, consts)?;
    let l_star_numeric =
        minimize_estimate(EstimateModel::Relativistic, mass, consts, None, 1e-10)?;
    Ok(ScanRow {
        mass,
        l_diosi: scales.diosi,
        lambda_compton: scales.compton_reduced,
        l_planck: scales.planck_length,
        l_diosi_rel: scales.diosi_rel,
        l_star_numeric,
    })
}

/// Characteristic lengths over a mass range, each row carrying both the
/// closed-form corrected length and its numeric confirmation.
pub fn mass_scan(
    lo: f64,
    hi: f64,
    n: usize,
    spacing: ScanSpacing,
    consts: &PhysicalConstants,
) -> Result<Vec<ScanRow>> {
    scan_masses(lo, hi, n, spacing)?
        .into_iter()
        .map(|m| scan_row(m, consts))
        .collect()
}

/// Rayon twin of [`mass_scan`]; row order matches the mass order.
#[cfg(feature = "parallel")]
pub fn par_mass_scan(
    lo: f64,
    hi: f64,
    n: usize,
    spacing: ScanSpacing,
    consts: &PhysicalConstants,
) -> Result<Vec<ScanRow>> {
    scan_masses(lo, hi, n, spacing)?
        .into_par_iter()
        .map(|m| scan_row(m, consts))
        .collect()
}
