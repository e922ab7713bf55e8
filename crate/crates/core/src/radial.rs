//! Radial grid, Hartree self-potential, and a tridiagonal ground-state
//! eigensolver for the reduced wavefunction u(r) = sqrt(4 pi) r psi(r).
//!
//! The grid is uniform on (0, r_max) with Dirichlet ends held implicitly at
//! zero; all quadrature is trapezoidal so every estimate carries the same
//! O(h^2) truncation order as the three-point Laplacian.

use crate::error::{ensure_positive, Error, Result};

/// Uniform grid of N interior nodes r_i = (i+1) h, h = r_max/(N+1).
/// The end points r = 0 and r = r_max are not stored; functions on the grid
/// are taken to vanish there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_max: f64,
    n_points: usize,
    spacing: f64,
}

pub const MIN_GRID_POINTS: usize = 16;

impl RadialGrid {
    pub fn new(r_max: f64, n_points: usize) -> Result<Self> {
        ensure_positive("r_max", r_max)?;
        if n_points < MIN_GRID_POINTS {
            return Err(Error::TooFewGridPoints { min: MIN_GRID_POINTS, actual: n_points });
        }
        let spacing = r_max / (n_points as f64 + 1.0);
        Ok(Self { r_max, n_points, spacing })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// r at interior node i (0-based storage, so node(0) = h).
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 1.0) * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }
}

/// Trapezoid of node values that vanish at both ends: the half-weight end
/// terms are zero, so the rule collapses to h times the plain sum.
pub(crate) fn trapezoid_zero_ends(values: impl Iterator<Item = f64>, h: f64) -> f64 {
    h * values.sum::<f64>()
}

/// u(r) sampled on a grid; u = sqrt(4 pi) r psi, so unit trapezoidal
/// integral of u^2 over (0, r_max) is unit 3D probability.
#[derive(Debug, Clone)]
pub struct RadialWavefunction {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialWavefunction {
    pub fn from_values(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidInput(format!(
                "wavefunction has {} samples but the grid holds {} nodes",
                values.len(),
                grid.n_points()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("wavefunction samples must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_profile(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.n_points()).map(|i| f(grid.node(i))).collect();
        Self::from_values(grid, values)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trapezoidal integral of u^2 (the squared L2 norm).
    pub fn norm_integral(&self) -> f64 {
        trapezoid_zero_ends(self.values.iter().map(|v| v * v), self.grid.spacing())
    }

    /// Rescaled copy with unit norm integral; direction is preserved.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_integral();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / n2.sqrt();
        let values = self.values.iter().map(|v| v * scale).collect();
        Ok(Self { grid: self.grid, values })
    }

    fn require_normalized(&self) -> Result<()> {
        let deviation = (self.norm_integral() - 1.0).abs();
        if deviation > 1e-6 {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(())
    }
}

/// Potential energy V(r_i) on the grid nodes.
#[derive(Debug, Clone)]
pub struct RadialPotential {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
}

impl RadialPotential {
    pub fn from_values(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidInput(format!(
                "potential has {} samples but the grid holds {} nodes",
                values.len(),
                grid.n_points()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("potential samples must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_profile(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.n_points()).map(|i| f(grid.node(i))).collect();
        Self::from_values(grid, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

fn check_same_grid(a: &RadialGrid, b: &RadialGrid) -> Result<()> {
    if a != b {
        return Err(Error::InvalidInput("grids of the operands do not match".into()));
    }
    Ok(())
}

/// Newton-kernel self-potential of the density u^2 by the shell theorem:
///
///   V(r) = -G m^2 [ Q(r)/r + int_r^{r_max} u(s)^2/s ds ],  Q(r) = int_0^r u^2 ds,
///
/// built from one forward and one backward cumulative trapezoid pass.
pub fn hartree_potential(u: &RadialWavefunction, g_times_m2: f64) -> Result<RadialPotential> {
    ensure_positive("G m^2 coupling", g_times_m2)?;
    u.require_normalized()?;

    let grid = u.grid;
    let h = grid.spacing();
    let n = grid.n_points();
    let u2: Vec<f64> = u.values.iter().map(|v| v * v).collect();

    // interior charge; the segment from r = 0 carries the implicit zero end
    let mut q = vec![0.0; n];
    q[0] = 0.5 * h * u2[0];
    for i in 1..n {
        q[i] = q[i - 1] + 0.5 * h * (u2[i - 1] + u2[i]);
    }

    // exterior 1/s-weighted tail, accumulated right to left; the outer
    // boundary contributes half a segment against the implicit zero
    let mut tail = vec![0.0; n];
    tail[n - 1] = 0.5 * h * u2[n - 1] / grid.node(n - 1);
    for i in (0..n - 1).rev() {
        tail[i] = tail[i + 1] + 0.5 * h * (u2[i] / grid.node(i) + u2[i + 1] / grid.node(i + 1));
    }

    let values = (0..n).map(|i| -g_times_m2 * (q[i] / grid.node(i) + tail[i])).collect();
    RadialPotential::from_values(grid, values)
}

/// Eigenvalue count below `shift` via the Sturm sequence of the shifted
/// LDL^T pivots; tiny pivots are clamped to -pivmin so the recurrence never
/// divides by zero.
fn negative_pivots(diag: &[f64], off2: f64, shift: f64, pivmin: f64) -> usize {
    let mut count = 0usize;
    let mut q = diag[0] - shift;
    if q.abs() <= pivmin {
        q = -pivmin;
    }
    if q <= 0.0 {
        count += 1;
    }
    for &d in &diag[1..] {
        q = d - shift - off2 / q;
        if q.abs() <= pivmin {
            q = -pivmin;
        }
        if q <= 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of the symmetric tridiagonal (diag, off, off, ...)
/// by bisection on the Sturm count, to absolute width `tol_abs` (with a
/// rounding floor of a few ulps of the midpoint).
fn bisect_smallest(diag: &[f64], off: f64, tol_abs: f64) -> Result<f64> {
    let off2 = off * off;
    let pivmin = (off2 * f64::EPSILON * f64::EPSILON).max(f64::MIN_POSITIVE);
    let mut dmin = f64::INFINITY;
    let mut dmax = f64::NEG_INFINITY;
    for &d in diag {
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    let mut lo = dmin - 2.0 * off.abs();
    let mut hi = dmax + 2.0 * off.abs();
    if negative_pivots(diag, off2, lo, pivmin) != 0 {
        return Err(Error::InvalidInput(format!(
            "eigenvalue bracket [{lo}, {hi}] failed its Gershgorin sanity check"
        )));
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol_abs.max(4.0 * f64::EPSILON * mid.abs()) {
            break;
        }
        if negative_pivots(diag, off2, mid, pivmin) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// LU factors of a shifted tridiagonal with partial pivoting; the row swaps
/// create a second superdiagonal.
struct TridiagLu {
    low: Vec<f64>,
    dia: Vec<f64>,
    up1: Vec<f64>,
    up2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(mut dia: Vec<f64>, off: f64, pivmin: f64) -> Self {
        let n = dia.len();
        let mut low = vec![off; n.saturating_sub(1)];
        let mut up1 = vec![off; n.saturating_sub(1)];
        let mut up2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if dia[i].abs() >= low[i].abs() {
                if dia[i].abs() <= pivmin {
                    dia[i] = if dia[i] < 0.0 { -pivmin } else { pivmin };
                }
                let fact = low[i] / dia[i];
                low[i] = fact;
                dia[i + 1] -= fact * up1[i];
            } else {
                let fact = dia[i] / low[i];
                dia[i] = low[i];
                low[i] = fact;
                let t = up1[i];
                up1[i] = dia[i + 1];
                dia[i + 1] = t - fact * dia[i + 1];
                if i + 1 < n - 1 {
                    up2[i] = up1[i + 1];
                    up1[i + 1] = -fact * up1[i + 1];
                }
                swapped[i] = true;
            }
        }
        if let Some(last) = dia.last_mut() {
            if last.abs() <= pivmin {
                *last = if *last < 0.0 { -pivmin } else { pivmin };
            }
        }
        Self { low, dia, up1, up2, swapped }
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.low[i] * b[i];
        }
        b[n - 1] /= self.dia[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.up1[n - 2] * b[n - 1]) / self.dia[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.up1[i] * b[i + 1] - self.up2[i] * b[i + 2]) / self.dia[i];
        }
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// || T x - lambda x ||_2 for unit-norm x.
fn tridiag_residual(diag: &[f64], off: f64, lambda: f64, x: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        let mut r = (diag[i] - lambda) * x[i];
        if i > 0 {
            r += off * x[i - 1];
        }
        if i + 1 < n {
            r += off * x[i + 1];
        }
        s += r * r;
    }
    s.sqrt()
}

/// Interior sign changes, ignoring entries below 1e-12 of the peak so the
/// rounding noise in an exponentially small tail is not mistaken for a node.
fn sign_changes(x: &[f64]) -> usize {
    let peak = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let thresh = 1e-12 * peak;
    let mut last = 0i8;
    let mut changes = 0usize;
    for &v in x {
        if v.abs() <= thresh {
            continue;
        }
        let s = if v > 0.0 { 1 } else { -1 };
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// Ground state of  [-kinetic_coeff d^2/dr^2 + V] u = E u  with Dirichlet
/// ends: Sturm bisection for the smallest eigenvalue of the three-point
/// discretization, then inverse iteration (at most 5 sweeps) for the
/// eigenvector. The returned u has unit trapezoidal norm and positive peak.
pub fn lowest_eigenpair(
    potential: &RadialPotential,
    kinetic_coeff: f64,
) -> Result<(f64, RadialWavefunction)> {
    lowest_eigenpair_seeded(potential, kinetic_coeff, None)
}

/// Same as [`lowest_eigenpair`] with a warm-start vector for the inverse
/// iteration (an SCF loop converges its eigenvector slowly, so the previous
/// one is an excellent seed).
pub fn lowest_eigenpair_seeded(
    potential: &RadialPotential,
    kinetic_coeff: f64,
    seed: Option<&RadialWavefunction>,
) -> Result<(f64, RadialWavefunction)> {
    ensure_positive("kinetic coefficient", kinetic_coeff)?;
    let grid = potential.grid;
    let n = grid.n_points();
    let h = grid.spacing();
    let off = -kinetic_coeff / (h * h);
    let diag: Vec<f64> =
        potential.values.iter().map(|v| 2.0 * kinetic_coeff / (h * h) + v).collect();
    let vmax = potential.max_abs();

    let lambda = bisect_smallest(&diag, off, 1e-12 * vmax)?;

    // floating-point floor: evaluating the residual itself costs eps*||H||,
    // so the bound cannot meaningfully sit below that
    let hnorm = diag.iter().fold(0.0_f64, |m, d| m.max(d.abs())) + 2.0 * off.abs();
    let bound = (1e-9 * (lambda.abs() + vmax)).max(8.0 * f64::EPSILON * hnorm);

    let pivmin = (off * off * f64::EPSILON * f64::EPSILON).max(f64::MIN_POSITIVE);
    let shifted: Vec<f64> = diag.iter().map(|d| d - lambda).collect();
    let lu = TridiagLu::factor(shifted, off, pivmin);

    let mut x: Vec<f64> = match seed {
        Some(u) => {
            check_same_grid(&grid, u.grid())?;
            u.values().to_vec()
        }
        None => vec![1.0; n],
    };
    let nrm = l2_norm(&x);
    if nrm == 0.0 || !nrm.is_finite() {
        x = vec![1.0; n];
    }
    let nrm = l2_norm(&x);
    for v in x.iter_mut() {
        *v /= nrm;
    }

    // the residual can meet the bound while an excited-state component of
    // size residual/gap still lingers; in a deep tail that component is the
    // largest thing there and trips the node check, so once the bound is
    // met one more sweep is taken to push the contamination to rounding
    let mut residual = f64::INFINITY;
    for sweep in 0..5 {
        lu.solve_in_place(&mut x);
        let nrm = l2_norm(&x);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::EigenResidual { residual, bound });
        }
        for v in x.iter_mut() {
            *v /= nrm;
        }
        residual = tridiag_residual(&diag, off, lambda, &x);
        if residual <= bound && sweep >= 1 {
            break;
        }
    }
    if residual > bound {
        return Err(Error::EigenResidual { residual, bound });
    }

    // fix the overall sign by the peak component
    let mut imax = 0;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[imax].abs() {
            imax = i;
        }
    }
    if x[imax] < 0.0 {
        for v in x.iter_mut() {
            *v = -*v;
        }
    }

    let changes = sign_changes(&x);
    if changes > 0 {
        return Err(Error::GridTooCoarse { sign_changes: changes });
    }

    // unit l2 vector -> unit trapezoidal integral
    let scale = 1.0 / h.sqrt();
    let values = x.iter().map(|v| v * scale).collect();
    Ok((lambda, RadialWavefunction::from_values(grid, values)?))
}

/// Schroedinger kinetic expectation  kinetic_coeff * int (du/dr)^2 dr,
/// central differences on the zero-padded samples with one-sided ends.
/// Expects u normalized.
pub fn kinetic_expectation(u: &RadialWavefunction, kinetic_coeff: f64) -> f64 {
    let h = u.grid.spacing();
    let n = u.grid.n_points();
    let v = &u.values;
    // derivative at the N+2 points of the zero-padded grid
    let mut dsq = Vec::with_capacity(n + 2);
    dsq.push((v[0] / h).powi(2));
    for j in 0..n {
        let left = if j == 0 { 0.0 } else { v[j - 1] };
        let right = if j + 1 == n { 0.0 } else { v[j + 1] };
        dsq.push(((right - left) / (2.0 * h)).powi(2));
    }
    dsq.push((-v[n - 1] / h).powi(2));
    let mut integral = 0.5 * (dsq[0] + dsq[n + 1]);
    integral += dsq[1..=n].iter().sum::<f64>();
    kinetic_coeff * h * integral
}

/// Trapezoidal  int u^2 V dr. Expects u normalized and grids matching.
pub fn potential_expectation(u: &RadialWavefunction, potential: &RadialPotential) -> Result<f64> {
    check_same_grid(u.grid(), &potential.grid)?;
    Ok(trapezoid_zero_ends(
        u.values.iter().zip(&potential.values).map(|(a, v)| a * a * v),
        u.grid.spacing(),
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct RadiusDiagnostics {
    pub r_mean: f64,
    pub r_peak: f64,
    pub r_rms: f64,
}

/// First and second radial moments of u^2 plus the density peak, the peak
/// sharpened by a parabola through the three nodes around the maximum.
pub fn radius_diagnostics(u: &RadialWavefunction) -> RadiusDiagnostics {
    let h = u.grid.spacing();
    let n = u.grid.n_points();
    let u2: Vec<f64> = u.values.iter().map(|v| v * v).collect();
    let r_mean = trapezoid_zero_ends((0..n).map(|i| u.grid.node(i) * u2[i]), h);
    let r_rms = trapezoid_zero_ends((0..n).map(|i| u.grid.node(i).powi(2) * u2[i]), h).sqrt();

    let mut imax = 0;
    for (i, v) in u2.iter().enumerate() {
        if *v > u2[imax] {
            imax = i;
        }
    }
    let mut r_peak = u.grid.node(imax);
    if imax > 0 && imax + 1 < n {
        let (ym, y0, yp) = (u2[imax - 1], u2[imax], u2[imax + 1]);
        let denom = ym - 2.0 * y0 + yp;
        if denom < 0.0 {
            r_peak += 0.5 * h * (ym - yp) / denom;
        }
    }
    RadiusDiagnostics { r_mean, r_peak, r_rms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(r_max: f64, n: usize) -> RadialGrid {
        RadialGrid::new(r_max, n).unwrap()
    }

    fn gaussian_u(g: RadialGrid, width: f64) -> RadialWavefunction {
        RadialWavefunction::from_profile(g, |r| r * (-r * r / (2.0 * width * width)).exp())
            .unwrap()
            .normalized()
            .unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = grid(10.0, 99);
        assert!((g.spacing() - 0.1).abs() < 1e-15);
        assert!((g.node(0) - 0.1).abs() < 1e-15);
        assert!((g.node(98) - 9.9).abs() < 1e-12);
        assert_eq!(g.nodes().len(), 99);
        assert!(RadialGrid::new(10.0, 15).is_err());
        assert!(RadialGrid::new(0.0, 100).is_err());
    }

    #[test]
    fn normalize_gaussian_hits_unit_norm() {
        let u = gaussian_u(grid(20.0, 4000), 1.0);
        assert!((u.norm_integral() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn normalize_is_idempotent_and_projective() {
        let g = grid(20.0, 500);
        let u = gaussian_u(g, 1.3);
        let again = u.normalized().unwrap();
        for (a, b) in u.values().iter().zip(again.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let scaled = RadialWavefunction::from_values(
            g,
            u.values().iter().map(|v| 7.0 * v).collect(),
        )
        .unwrap()
        .normalized()
        .unwrap();
        for (a, b) in u.values().iter().zip(scaled.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_rejects_zero_input() {
        let g = grid(5.0, 64);
        let z = RadialWavefunction::from_values(g, vec![0.0; 64]).unwrap();
        assert!(matches!(z.normalized(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn hartree_requires_normalized_input() {
        let g = grid(20.0, 512);
        let u = RadialWavefunction::from_profile(g, |r| r * (-r).exp()).unwrap();
        assert!(matches!(
            hartree_potential(&u, 1.0),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn hartree_point_source_exterior_tail() {
        // density packed near the origin: outside it, V = -G m^2 / r
        let g = grid(20.0, 4000);
        let u = gaussian_u(g, 0.05);
        let v = hartree_potential(&u, 1.0).unwrap();
        for i in [1000usize, 2000, 3500] {
            let r = g.node(i);
            let expect = -1.0 / r;
            assert!(
                (v.values[i] - expect).abs() < 1e-9,
                "V({r}) = {} vs {expect}",
                v.values[i]
            );
        }
    }

    #[test]
    fn hartree_shell_interior_is_flat() {
        // thin shell at r0: inside, V = -G m^2 / r0, constant
        let g = grid(20.0, 4000);
        let r0 = 10.0;
        let u = RadialWavefunction::from_profile(g, |r| (-(r - r0).powi(2) / 0.02).exp())
            .unwrap()
            .normalized()
            .unwrap();
        let v = hartree_potential(&u, 1.0).unwrap();
        let expect = -1.0 / r0;
        for i in [200usize, 600, 1000] {
            assert!(
                (v.values[i] - expect).abs() < 2e-4,
                "V({}) = {} vs {expect}",
                g.node(i),
                v.values[i]
            );
        }
        let spread = (v.values[200] - v.values[1000]).abs();
        assert!(spread < 1e-6, "interior potential varies by {spread}");
    }

    #[test]
    fn hartree_gaussian_center_value() {
        // psi^2 ~ exp(-r^2/a^2): V(0) = -2 G m^2 / (sqrt(pi) a); extrapolate
        // V to r -> 0 from the first two nodes
        let a = 1.0_f64;
        let g = grid(24.0, 8000);
        // u = sqrt(4 pi) r psi with psi = exp(-r^2/(2 a^2)) / (pi^{3/4} a^{3/2})
        let u = RadialWavefunction::from_profile(g, |r| r * (-r * r / (2.0 * a * a)).exp())
            .unwrap()
            .normalized()
            .unwrap();
        let v = hartree_potential(&u, 1.0).unwrap();
        // V(r) = V(0) + c r^2 near the origin, so eliminate the r^2 term
        // from the first two nodes (r = h, 2h)
        let v0 = (4.0 * v.values[0] - v.values[1]) / 3.0;
        let expect = -2.0 / (PI.sqrt() * a);
        assert!((v0 - expect).abs() < 1e-5, "V(0) = {v0} vs {expect}");
    }

    #[test]
    fn hartree_matches_discrete_poisson() {
        // (r V)'' = G m^2 u^2 / r at truncation order h^2
        let g = grid(20.0, 2000);
        let h = g.spacing();
        let u = gaussian_u(g, 1.0);
        let v = hartree_potential(&u, 1.0).unwrap();
        let rv: Vec<f64> = (0..2000).map(|i| g.node(i) * v.values[i]).collect();
        let mut worst = 0.0_f64;
        for i in 1..1999 {
            let lap = (rv[i - 1] - 2.0 * rv[i] + rv[i + 1]) / (h * h);
            let rhs = u.values()[i] * u.values()[i] / g.node(i);
            worst = worst.max((lap - rhs).abs());
        }
        assert!(worst < 5.0 * h * h, "Poisson defect {worst} at h = {h}");
    }

    #[test]
    fn box_spectrum_limit() {
        // V = 0: ground energy -> kinetic_coeff pi^2 / r_max^2
        let g = grid(10.0, 2000);
        let v = RadialPotential::from_values(g, vec![0.0; 2000]).unwrap();
        let k = 0.5;
        let (e, u) = lowest_eigenpair(&v, k).unwrap();
        let expect = k * PI * PI / (10.0 * 10.0);
        assert!((e - expect).abs() / expect < 1e-5, "E = {e} vs {expect}");
        // eigenvector is the half-sine; kinetic expectation matches E
        let t = kinetic_expectation(&u, k);
        assert!((t - e).abs() / e < 1e-5, "T = {t} vs E = {e}");
    }

    #[test]
    fn coulomb_ground_state() {
        // V = -1/r with kinetic_coeff 1/2: E = -1/2, u ~ r e^{-r}
        let g = grid(50.0, 4000);
        let v = RadialPotential::from_profile(g, |r| -1.0 / r).unwrap();
        let (e, u) = lowest_eigenpair(&v, 0.5).unwrap();
        assert!((e + 0.5).abs() < 1e-4 * 0.5, "E = {e}");
        let d = radius_diagnostics(&u);
        assert!((d.r_mean - 1.5).abs() < 1.5e-4, "r_mean = {}", d.r_mean);
        assert!((d.r_peak - 1.0).abs() < 2e-4, "r_peak = {}", d.r_peak);
        let w = potential_expectation(&u, &v).unwrap();
        assert!((w + 1.0).abs() < 1e-3, "virial <V> = {w}");
    }

    #[test]
    fn coulomb_richardson_halving_is_second_order() {
        let exact = -0.5;
        let err = |n: usize| {
            let g = grid(50.0, n);
            let v = RadialPotential::from_profile(g, |r| -1.0 / r).unwrap();
            (lowest_eigenpair(&v, 0.5).unwrap().0 - exact).abs()
        };
        let (e1, e2, e3) = (err(1000), err(2000), err(4000));
        let r1 = e1 / e2;
        let r2 = e2 / e3;
        assert!((3.5..=4.5).contains(&r1), "halving ratio {r1}");
        assert!((3.5..=4.5).contains(&r2), "halving ratio {r2}");
    }

    #[test]
    fn harmonic_ground_state() {
        // V = r^2/2, kinetic 1/2: 3D oscillator ground energy 3/2
        let g = grid(12.0, 2000);
        let v = RadialPotential::from_profile(g, |r| 0.5 * r * r).unwrap();
        let (e, _) = lowest_eigenpair(&v, 0.5).unwrap();
        assert!((e - 1.5).abs() / 1.5 < 1e-5, "E = {e}");
    }

    #[test]
    fn eigenpair_rejects_bad_kinetic_coefficient() {
        let g = grid(10.0, 64);
        let v = RadialPotential::from_values(g, vec![0.0; 64]).unwrap();
        assert!(lowest_eigenpair(&v, 0.0).is_err());
        assert!(lowest_eigenpair(&v, -1.0).is_err());
    }

    #[test]
    fn warm_start_reproduces_cold_start() {
        let g = grid(50.0, 1500);
        let v = RadialPotential::from_profile(g, |r| -1.0 / r).unwrap();
        let (e_cold, u_cold) = lowest_eigenpair(&v, 0.5).unwrap();
        let (e_warm, u_warm) = lowest_eigenpair_seeded(&v, 0.5, Some(&u_cold)).unwrap();
        assert!((e_cold - e_warm).abs() < 1e-13);
        for (a, b) in u_cold.values().iter().zip(u_warm.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn ground_state_is_positive_and_nodeless() {
        let g = grid(50.0, 2000);
        let v = RadialPotential::from_profile(g, |r| -1.0 / r).unwrap();
        let (_, u) = lowest_eigenpair(&v, 0.5).unwrap();
        let peak = u.values().iter().cloned().fold(0.0_f64, f64::max);
        for &x in u.values() {
            assert!(x > -1e-12 * peak, "negative interior amplitude {x}");
        }
    }

    #[test]
    fn kinetic_expectation_scaling_law() {
        // u(r) -> sqrt(s) u(s r) multiplies the integral by s^2
        let s = 2.0;
        let w = 1.0;
        let u1 = gaussian_u(grid(24.0, 3000), w);
        let u2 = gaussian_u(grid(24.0 / s, 3000), w / s);
        let t1 = kinetic_expectation(&u1, 0.5);
        let t2 = kinetic_expectation(&u2, 0.5);
        assert!(
            (t2 / t1 - s * s).abs() < 1e-4,
            "kinetic scaling ratio {} vs {}",
            t2 / t1,
            s * s
        );
    }

    #[test]
    fn kinetic_expectation_of_gaussian_oracle() {
        // u ~ r e^{-r^2/(2w^2)}: (1/2) int u'^2 = 3/(4 w^2)
        let w = 1.0;
        let u = gaussian_u(grid(24.0, 4000), w);
        let t = kinetic_expectation(&u, 0.5);
        let expect = 0.75 / (w * w);
        // central differences leave an O(h^2) defect, ~3e-5 at this h
        assert!((t - expect).abs() / expect < 1e-4, "T = {t} vs {expect}");
    }

    #[test]
    fn potential_expectation_constant_is_identity() {
        let g = grid(20.0, 1000);
        let u = gaussian_u(g, 1.0);
        let v = RadialPotential::from_values(g, vec![-3.25; 1000]).unwrap();
        let w = potential_expectation(&u, &v).unwrap();
        assert!((w + 3.25).abs() < 1e-9, "constant potential gives {w}");
    }

    #[test]
    fn radius_diagnostics_of_hydrogenic_profile() {
        let g = grid(60.0, 4000);
        let u = RadialWavefunction::from_profile(g, |r| r * (-r).exp())
            .unwrap()
            .normalized()
            .unwrap();
        let d = radius_diagnostics(&u);
        assert!((d.r_mean - 1.5).abs() < 1e-4);
        assert!((d.r_rms - 3.0_f64.sqrt()).abs() < 1e-4);
        assert!((d.r_peak - 1.0).abs() < 1e-4);
    }

    #[test]
    fn radius_diagnostics_scale_linearly() {
        let s = 3.0;
        let u1 = gaussian_u(grid(24.0, 3000), 1.0);
        let u2 = gaussian_u(grid(24.0 * s, 3000), s);
        let d1 = radius_diagnostics(&u1);
        let d2 = radius_diagnostics(&u2);
        assert!((d2.r_mean / d1.r_mean - s).abs() < 1e-6);
        assert!((d2.r_rms / d1.r_rms - s).abs() < 1e-6);
        assert!((d2.r_peak / d1.r_peak - s).abs() < 1e-3);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let u = gaussian_u(grid(20.0, 128), 1.0);
        let v = RadialPotential::from_values(grid(20.0, 256), vec![0.0; 256]).unwrap();
        assert!(potential_expectation(&u, &v).is_err());
    }
}
