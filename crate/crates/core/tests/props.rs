//! Property checks of the closed-form layer: identities that must hold for
//! any mass, width, or amplitude, not just the pinned spot values.

use proptest::prelude::*;

use gpsne_core::box_model::spectrum;
use gpsne_core::gamma::{gamma_from_kinetic, gp_kinetic_scale};
use gpsne_core::radial::{RadialGrid, RadialWavefunction};
use gpsne_core::units::{
    compton_reduced, diosi_length, diosi_length_rel, scales_for_mass, PhysicalConstants,
};

/// log-uniform positive number in [10^lo, 10^hi]
fn log_range(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #[test]
    fn corrected_diosi_forms_agree(mu in 0.01f64..0.999) {
        // the G m^2/(hbar c) suppression of l_D and the Compton-anchored
        // form are the same number
        let k = PhysicalConstants::planck();
        let a = diosi_length_rel(mu, &k).unwrap().unwrap();
        let x = k.grav * mu * mu / (k.hbar * k.c);
        let b = compton_reduced(mu, &k).unwrap() * (1.0 - x * x).sqrt() / x;
        prop_assert!(((a - b) / a).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn gamma_grows_with_kinetic_energy(k1 in log_range(-12.0, 2.0), f in 1.0001f64..100.0) {
        let c = 1.0;
        let g1 = gamma_from_kinetic(k1, 1.0, c).unwrap();
        let g2 = gamma_from_kinetic(k1 * f, 1.0, c).unwrap();
        prop_assert!(g2 > g1);
        prop_assert!(g1 >= 1.0);
    }

    #[test]
    fn kinetic_scale_lies_in_unit_interval(ks in log_range(-12.0, 4.0)) {
        let g = gamma_from_kinetic(ks, 1.0, 1.0).unwrap();
        let s = gp_kinetic_scale(g).unwrap();
        prop_assert!(s > 0.0 && s <= 1.0, "scale {s} at gamma {g}");
    }

    #[test]
    fn box_levels_are_ordered_and_corrected_down(
        width in log_range(-2.0, 2.0),
        n_max in 2u32..40,
    ) {
        let k = PhysicalConstants::natural();
        let levels = spectrum(1.0, width, n_max, &k).unwrap();
        for pair in levels.windows(2) {
            prop_assert!(pair[1].energy_nr > pair[0].energy_nr);
            prop_assert!(pair[1].energy_gp > pair[0].energy_gp);
        }
        for l in &levels {
            prop_assert!(l.energy_gp < l.energy_nr);
            prop_assert!(l.gamma > 1.0);
        }
    }

    #[test]
    fn normalization_is_scale_free(amp in log_range(-6.0, 6.0), w in 0.3f64..3.0) {
        let grid = RadialGrid::new(30.0, 400).unwrap();
        let base = RadialWavefunction::from_profile(grid, |r| {
            r * (-r * r / (2.0 * w * w)).exp()
        })
        .unwrap()
        .normalized()
        .unwrap();
        let scaled = RadialWavefunction::from_profile(grid, |r| {
            amp * r * (-r * r / (2.0 * w * w)).exp()
        })
        .unwrap()
        .normalized()
        .unwrap();
        prop_assert!((scaled.norm_integral() - 1.0).abs() < 1e-12);
        for (a, b) in base.values().iter().zip(scaled.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn characteristic_lengths_are_unit_coherent(mu in log_range(-12.0, -0.01)) {
        // the same mass expressed in SI and in Planck numbers gives the
        // same dimensionless ratios
        let si = PhysicalConstants::si();
        let pl = PhysicalConstants::planck();
        let m_si = mu * si.planck_mass();
        let s_si = scales_for_mass(m_si, &si).unwrap();
        let s_pl = scales_for_mass(mu, &pl).unwrap();
        let r_si = s_si.diosi / s_si.compton_reduced;
        let r_pl = s_pl.diosi / s_pl.compton_reduced;
        prop_assert!(((r_si - r_pl) / r_pl).abs() < 1e-9, "{r_si} vs {r_pl}");
        let d_si = s_si.diosi / s_si.planck_length;
        let d_pl = s_pl.diosi / s_pl.planck_length;
        prop_assert!(((d_si - d_pl) / d_pl).abs() < 1e-9, "{d_si} vs {d_pl}");
    }

    #[test]
    fn corrected_length_shrinks_and_disappears(mu in log_range(-3.0, 1.0)) {
        let k = PhysicalConstants::planck();
        let plain = diosi_length(mu, &k).unwrap();
        match diosi_length_rel(mu, &k).unwrap() {
            Some(rel) => {
                prop_assert!(mu <= 1.0);
                prop_assert!(rel <= plain);
            }
            None => prop_assert!(mu > 1.0),
        }
    }
}
