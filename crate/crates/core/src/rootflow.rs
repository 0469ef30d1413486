//! Root densities of repeated derivatives as a transport equation on [-1, 1].
//!
//! The density `u(t, x)` of the roots of `p_n^{(tn)}` is evolved under
//! `u_t + (1/π) ∂_x arctan(Hu / u) = 0` by a conservative first-order finite-volume scheme.
//! Cells are centred at `x_i = -1 + (i + 1/2) h`, `h = 2/M`, so no unknown sits on the
//! endpoints where the arcsine density is infinite. `Hu` is computed spectrally: `u sqrt(1-x^2)`
//! is interpolated onto a Chebyshev grid of size `2M`, expanded in `T_k`, and mapped through
//! [`fht_coeff_map`].
//!
//! Outside the detected support (`u <= 10 eps`) the flux saturates to `sign(Hu) / 2`, and the
//! boundary faces carry `∓1/2`, which makes the total mass decay at unit rate.

use std::f64::consts::PI;

use crate::cheb::{analyze_t, cheb_nodes, synth, tail_diagnostic, GridFunction};
use crate::error::{Error, Result};
use crate::fht::fht_coeff_map;
use crate::rootlab::{
    hermite_roots, iterate_derivatives, roots_via_jacobi, EmpiricalDist, Family, RootSet,
};

pub const DEFAULT_CELLS: usize = 512;
pub const DEFAULT_DT: f64 = 1e-3;

/// `eps = REGULARIZATION * max(u)`.
pub const REGULARIZATION: f64 = 1e-8;

/// Cells with `u > SUPPORT_FACTOR * eps` form the support.
pub const SUPPORT_FACTOR: f64 = 10.0;

/// Loose resolution limit for the resampled density; kinks at support edges decay slowly.
pub const RESAMPLE_TAIL_LIMIT: f64 = 1e-2;

/// A step fails when it loses more than this multiple of `dt` in mass.
pub const MASS_LOSS_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialProfile {
    /// `1 / (π sqrt(1-x^2))`
    Arcsine,
    /// `(2/π) sqrt(1-x^2)`
    Semicircle,
}

impl InitialProfile {
    pub fn density(self, x: f64) -> f64 {
        match self {
            Self::Arcsine => 1.0 / (PI * (1.0 - x * x).sqrt()),
            Self::Semicircle => 2.0 / PI * (1.0 - x * x).sqrt(),
        }
    }

    pub fn cdf(self, x: f64) -> f64 {
        let x = x.clamp(-1.0, 1.0);
        match self {
            Self::Arcsine => 0.5 + x.asin() / PI,
            Self::Semicircle => 0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / PI,
        }
    }

    /// Profile whose flow matches the roots of `family`.
    pub fn for_family(family: &Family) -> Self {
        match family {
            Family::Hermite => Self::Semicircle,
            _ => Self::Arcsine,
        }
    }
}

/// Cell centres of the `m`-cell grid.
pub fn cell_centers(m: usize) -> Vec<f64> {
    let h = 2.0 / m as f64;
    (0..m).map(|i| (i as f64 + 0.5) * h - 1.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    grid: Vec<f64>,
    u: Vec<f64>,
    t: f64,
}

impl DensityProfile {
    pub fn new(u: Vec<f64>, t: f64) -> Result<Self> {
        if u.len() < 2 {
            return Err(Error::InvalidArgument("need at least 2 cells".into()));
        }
        if !(0.0..1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "flow time {t} outside [0, 1)"
            )));
        }
        if let Some(v) = u.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidInput(format!(
                "density value {v} is not a finite nonnegative number"
            )));
        }
        Ok(Self {
            grid: cell_centers(u.len()),
            u,
            t,
        })
    }

    /// Point samples of the profile at the cell centres.
    pub fn sampled(profile: InitialProfile, m: usize) -> Result<Self> {
        Self::new(
            cell_centers(m)
                .into_iter()
                .map(|x| profile.density(x))
                .collect(),
            0.0,
        )
    }

    /// Exact cell averages of the profile (unit mass).
    pub fn initial(profile: InitialProfile, m: usize) -> Result<Self> {
        let h = 2.0 / m as f64;
        let faces: Vec<f64> = (0..=m).map(|i| profile.cdf(i as f64 * h - 1.0)).collect();
        let u: Vec<f64> = faces.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        Self::new(u, 0.0)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn cells(&self) -> usize {
        self.u.len()
    }

    pub fn spacing(&self) -> f64 {
        2.0 / self.u.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.u.iter().copied().fold(0.0, f64::max)
    }

    /// `h Σ u_i`
    pub fn mass(&self) -> f64 {
        self.u.iter().sum::<f64>() * self.spacing()
    }

    /// Default regularization for this profile.
    pub fn eps(&self) -> f64 {
        REGULARIZATION * self.max()
    }

    pub fn in_support(&self, eps: f64) -> Vec<bool> {
        self.u.iter().map(|&v| v > SUPPORT_FACTOR * eps).collect()
    }

    /// `(first, last)` support cells, if any.
    pub fn support_range(&self, eps: f64) -> Option<(usize, usize)> {
        let s = self.in_support(eps);
        let lo = s.iter().position(|&b| b)?;
        let hi = s.iter().rposition(|&b| b)?;
        Some((lo, hi))
    }

    /// Mass-normalized CDF, piecewise linear between cell faces.
    pub fn cdf(&self, x: f64) -> f64 {
        let h = self.spacing();
        let total: f64 = self.u.iter().sum();
        if total <= 0.0 {
            return f64::NAN;
        }
        let pos = ((x + 1.0) / h).clamp(0.0, self.u.len() as f64);
        let i = (pos.floor() as usize).min(self.u.len() - 1);
        let below: f64 = self.u[..i].iter().sum();
        ((below + (pos - i as f64) * self.u[i]) / total).clamp(0.0, 1.0)
    }
}

/// Linear interpolation through `(xs, ys)` with `xs` increasing; constant outside.
fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let j = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let w = (x - x0) / (x1 - x0);
    ys[j - 1] + w * (ys[j] - ys[j - 1])
}

/// `Hu` at the cell centres.
pub fn hilbert_of_density(d: &DensityProfile) -> Result<Vec<f64>> {
    let g: Vec<f64> = d
        .grid
        .iter()
        .zip(&d.u)
        .map(|(x, u)| u * (1.0 - x * x).sqrt())
        .collect();
    let nc = 2 * d.cells();
    let samples: Vec<f64> = cheb_nodes(nc)?
        .into_iter()
        .map(|x| interp(&d.grid, &g, x))
        .collect();
    let series = analyze_t(&GridFunction::from_values(samples)?);
    tail_diagnostic(&series).check(RESAMPLE_TAIL_LIMIT)?;
    let hu = fht_coeff_map(&series)?;
    d.grid.iter().map(|&x| synth(&hu, x)).collect()
}

fn node_flux(u: f64, hu: f64, eps: f64, inside: bool) -> f64 {
    if inside {
        (hu / u.max(eps)).atan() / PI
    } else if hu == 0.0 {
        0.0
    } else {
        0.5 * hu.signum()
    }
}

/// `(1/π) arctan(Hu / max(u, eps))` on the support, `sign(Hu)/2` off it.
pub fn flux(d: &DensityProfile, eps: f64) -> Result<Vec<f64>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "regularization {eps} must be positive"
        )));
    }
    let hu = hilbert_of_density(d)?;
    Ok(flux_from(d, &hu, eps))
}

fn flux_from(d: &DensityProfile, hu: &[f64], eps: f64) -> Vec<f64> {
    let inside = d.in_support(eps);
    d.u.iter()
        .zip(hu)
        .zip(&inside)
        .map(|((&u, &h), &s)| node_flux(u, h, eps, s))
        .collect()
}

/// Per-step bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct StepDiagnostics {
    /// Cells clipped from negative values to zero.
    pub clipped: usize,
    pub mass_loss: f64,
}

/// One explicit step of the conservative update.
///
/// Interior faces average the two adjacent cell fluxes; a face between a support cell and an
/// empty cell takes the empty (saturated) side.
pub fn step(d: &DensityProfile, dt: f64, eps: f64) -> Result<(DensityProfile, StepDiagnostics)> {
    let h = d.spacing();
    if !(dt > 0.0 && dt <= h) {
        return Err(Error::InvalidArgument(format!(
            "time step {dt} outside (0, {h}]"
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "regularization {eps} must be positive"
        )));
    }
    let hu = hilbert_of_density(d)?;
    let fl = flux_from(d, &hu, eps);
    let inside = d.in_support(eps);
    let m = d.cells();
    let mut faces = vec![0.0; m + 1];
    faces[0] = -0.5;
    faces[m] = 0.5;
    for i in 1..m {
        faces[i] = match (inside[i - 1], inside[i]) {
            (true, false) => fl[i],
            (false, true) => fl[i - 1],
            _ => 0.5 * (fl[i - 1] + fl[i]),
        };
    }
    let r = dt / h;
    let mut clipped = 0;
    let u: Vec<f64> = (0..m)
        .map(|i| {
            let v = d.u[i] - r * (faces[i + 1] - faces[i]);
            if v < 0.0 {
                clipped += 1;
                0.0
            } else {
                v
            }
        })
        .collect();
    let t = d.t + dt;
    let next = DensityProfile {
        grid: d.grid.clone(),
        u,
        t,
    };
    let mass_loss = d.mass() - next.mass();
    let limit = MASS_LOSS_FACTOR * dt;
    if mass_loss > limit {
        return Err(Error::Instability {
            t,
            loss: mass_loss,
            limit,
        });
    }
    if !(t < 1.0) || next.max() <= 0.0 {
        return Err(Error::NumericalFailure(format!(
            "profile exhausted at t = {t}"
        )));
    }
    Ok((next, StepDiagnostics { clipped, mass_loss }))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FlowConfig {
    pub cells: usize,
    pub dt: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            cells: DEFAULT_CELLS,
            dt: DEFAULT_DT,
        }
    }
}

/// Time integrator holding the current profile and cumulative diagnostics.
#[derive(Debug, Clone)]
pub struct FlowSolver {
    profile: DensityProfile,
    dt: f64,
    steps: usize,
    clipped: usize,
}

impl FlowSolver {
    pub fn new(profile: DensityProfile, dt: f64) -> Self {
        Self {
            profile,
            dt,
            steps: 0,
            clipped: 0,
        }
    }

    pub fn from_initial(initial: InitialProfile, config: FlowConfig) -> Result<Self> {
        Ok(Self::new(
            DensityProfile::initial(initial, config.cells)?,
            config.dt,
        ))
    }

    pub fn profile(&self) -> &DensityProfile {
        &self.profile
    }

    pub fn into_profile(self) -> DensityProfile {
        self.profile
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn clipped(&self) -> usize {
        self.clipped
    }

    pub fn advance(&mut self) -> Result<StepDiagnostics> {
        let eps = self.profile.eps();
        let (next, diag) = step(&self.profile, self.dt, eps)?;
        self.profile = next;
        self.steps += 1;
        self.clipped += diag.clipped;
        Ok(diag)
    }

    /// Step until the step count reaches `round(t / dt)`.
    pub fn run_to(&mut self, t: f64) -> Result<()> {
        let target = (t / self.dt).round() as usize;
        while self.steps < target {
            self.advance()?;
        }
        Ok(())
    }

    /// Profiles at each requested time (sorted ascending).
    pub fn snapshots(&mut self, times: &[f64]) -> Result<Vec<DensityProfile>> {
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            self.run_to(t)?;
            out.push(self.profile.clone());
        }
        Ok(out)
    }
}

/// Exact arcsine flow: `sqrt(1 - t^2 - x^2) / (π (1 - x^2))` on `|x| < sqrt(1 - t^2)`.
pub fn arcsine_flow_exact(t: f64, x: f64) -> f64 {
    let r2 = 1.0 - t * t;
    if x * x >= r2 {
        0.0
    } else {
        (r2 - x * x).sqrt() / (PI * (1.0 - x * x))
    }
}

/// Outcome of [`compare_to_empirical`].
#[derive(Debug, Clone)]
pub struct FlowComparison {
    pub ks: f64,
    pub derivatives: usize,
    pub roots: RootSet,
    pub profile: DensityProfile,
    pub clipped: usize,
}

impl FlowComparison {
    pub fn mass(&self) -> f64 {
        self.profile.mass()
    }
}

/// Number of derivatives taken at flow time `t` for degree `n`.
pub fn derivative_count(t: f64, n: usize) -> usize {
    (t * n as f64 + 1e-9).floor() as usize
}

/// Roots of `p_n` for the family, scaled into [-1, 1] for Hermite.
pub fn family_roots(family: &Family, n: usize) -> Result<RootSet> {
    match family {
        Family::Hermite => hermite_roots(n),
        other => roots_via_jacobi(&other.recurrence(n)?, n),
    }
}

/// KS distance between the PDE profile at time `t` and the roots of `p_n^{(⌊tn⌋)}`.
pub fn compare_to_empirical(family: &Family, t: f64, n: usize) -> Result<FlowComparison> {
    compare_to_empirical_with(family, t, n, FlowConfig::default())
}

pub fn compare_to_empirical_with(
    family: &Family,
    t: f64,
    n: usize,
    config: FlowConfig,
) -> Result<FlowComparison> {
    flow_experiment(family, t, n, config, &[]).map(|(c, _)| c)
}

/// [`compare_to_empirical_with`], also returning profiles at the requested times `<= t`.
pub fn flow_experiment(
    family: &Family,
    t: f64,
    n: usize,
    config: FlowConfig,
    snapshot_times: &[f64],
) -> Result<(FlowComparison, Vec<DensityProfile>)> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "flow time {t} outside [0, 1)"
        )));
    }
    if snapshot_times.iter().any(|s| !(0.0..=t).contains(s))
        || snapshot_times.windows(2).any(|w| w[0] > w[1])
    {
        return Err(Error::InvalidArgument(
            "snapshot times must be sorted within [0, t]".into(),
        ));
    }
    let k = derivative_count(t, n);
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "t = {t} leaves no roots at degree {n}"
        )));
    }
    let roots = iterate_derivatives(&family_roots(family, n)?, k)?;
    let mut solver = FlowSolver::from_initial(InitialProfile::for_family(family), config)?;
    let snapshots = solver.snapshots(snapshot_times)?;
    solver.run_to(t)?;
    let clipped = solver.clipped();
    let profile = solver.into_profile();
    let ks = EmpiricalDist::new(roots.roots().to_vec())?.ks_against(|x| profile.cdf(x));
    let comparison = FlowComparison {
        ks,
        derivatives: k,
        roots,
        profile,
        clipped,
    };
    Ok((comparison, snapshots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fht::fht_quadrature_oracle;

    #[test]
    fn arcsine_has_zero_transform() {
        let d = DensityProfile::sampled(InitialProfile::Arcsine, 256).unwrap();
        let hu = hilbert_of_density(&d).unwrap();
        assert!(hu.iter().all(|v| v.abs() < 1e-12));
        let fl = flux(&d, d.eps()).unwrap();
        assert!(fl.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn semicircle_transform_and_flux() {
        // quadrature oracle for the exact semicircle
        for x in [-0.7, 0.2, 0.55] {
            let o =
                fht_quadrature_oracle(&|y: f64| 2.0 / PI * (1.0 - y * y).sqrt(), x, 400).unwrap();
            assert!((o - 2.0 * x / PI).abs() < 1e-10);
        }
        let d = DensityProfile::sampled(InitialProfile::Semicircle, 512).unwrap();
        let hu = hilbert_of_density(&d).unwrap();
        let fl = flux(&d, d.eps()).unwrap();
        for ((x, h), f) in d.grid().iter().zip(&hu).zip(&fl) {
            if x.abs() <= 0.9 {
                assert!((h - 2.0 * x / PI).abs() < 1e-3, "Hu({x}) = {h}");
                assert!((f - x.asin() / PI).abs() < 1e-3, "flux({x}) = {f}");
            }
        }
    }

    #[test]
    fn even_profile_has_odd_transform() {
        let u: Vec<f64> = cell_centers(128)
            .iter()
            .map(|x| (1.0 - x * x).powi(2) + 0.3 * x * x)
            .collect();
        let d = DensityProfile::new(u, 0.0).unwrap();
        let hu = hilbert_of_density(&d).unwrap();
        for i in 0..64 {
            assert!((hu[i] + hu[127 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn flux_saturates_off_support() {
        let u: Vec<f64> = cell_centers(64)
            .iter()
            .map(|x| (0.25 - x * x).max(0.0))
            .collect();
        let d = DensityProfile::new(u, 0.0).unwrap();
        let fl = flux(&d, d.eps()).unwrap();
        assert!(fl.iter().all(|f| f.abs() <= 0.5));
        assert_eq!(fl[0], -0.5);
        assert_eq!(fl[63], 0.5);
        assert!(flux(&d, 0.0).is_err());
    }

    #[test]
    fn mass_decays_at_unit_rate() {
        for init in [InitialProfile::Arcsine, InitialProfile::Semicircle] {
            let mut s = FlowSolver::from_initial(init, FlowConfig::default()).unwrap();
            for t in [0.1, 0.3, 0.5] {
                s.run_to(t).unwrap();
                let m = s.profile().mass();
                assert!((m - (1.0 - t)).abs() <= 0.02, "{init:?} t = {t}: mass {m}");
            }
        }
    }

    #[test]
    fn step_rejects_large_dt() {
        let d = DensityProfile::initial(InitialProfile::Arcsine, 64).unwrap();
        assert!(step(&d, 0.1, d.eps()).is_err());
        assert!(step(&d, 1e-3, -1.0).is_err());
    }

    #[test]
    fn exact_arcsine_flow_loses_mass_linearly() {
        // midpoint rule on a fine grid
        let t = 0.3;
        let n = 200_000;
        let r = (1.0f64 - t * t).sqrt();
        let h = 2.0 * r / n as f64;
        let m: f64 = (0..n)
            .map(|i| arcsine_flow_exact(t, -r + (i as f64 + 0.5) * h))
            .sum::<f64>()
            * h;
        assert!((m - (1.0 - t)).abs() < 1e-4);
        assert!((arcsine_flow_exact(0.0, 0.0) - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn cdf_is_monotone_and_normalized() {
        let d = DensityProfile::initial(InitialProfile::Semicircle, 64).unwrap();
        assert_eq!(d.cdf(-1.0), 0.0);
        assert_eq!(d.cdf(1.0), 1.0);
        assert!((d.cdf(0.0) - 0.5).abs() < 1e-12);
        let mut prev = 0.0;
        for i in 0..=100 {
            let c = d.cdf(-1.0 + 0.02 * i as f64);
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn zero_time_comparison_is_discretization_error() {
        let c = compare_to_empirical(&Family::Chebyshev, 0.0, 50).unwrap();
        assert_eq!(c.derivatives, 0);
        assert_eq!(c.profile.t(), 0.0);
        // exact KS of T_50 roots is 1/100; within-cell interpolation of the CDF adds at most
        // the mass of one cell
        let edge = InitialProfile::Arcsine.cdf(-1.0 + 2.0 / DEFAULT_CELLS as f64);
        assert!((c.ks - 0.01).abs() <= edge, "ks = {}", c.ks);
    }

    fn error_vs_exact(cells: usize, dt: f64, t: f64) -> f64 {
        let mut s =
            FlowSolver::from_initial(InitialProfile::Arcsine, FlowConfig { cells, dt }).unwrap();
        s.run_to(t).unwrap();
        let p = s.profile();
        p.grid()
            .iter()
            .zip(p.u())
            .filter(|(x, _)| x.abs() <= 0.9)
            .map(|(x, u)| (u - arcsine_flow_exact(t, *x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn arcsine_flow_tracks_exact_solution() {
        // 100 steps of dt = 1e-3, relative to the initial sup on |x| <= 0.9
        let scale = arcsine_flow_exact(0.0, 0.9);
        let e512 = error_vs_exact(512, 1e-3, 0.1);
        assert!(e512 / scale <= 0.01, "relative error {}", e512 / scale);
        let e256 = error_vs_exact(256, 2e-3, 0.1);
        assert!(e256 / e512 >= 1.5, "refinement ratio {}", e256 / e512);
    }
}
