//! Scalar rational-filter mathematics.
//!
//! Filters are stored as `R(z) = Σ w_i / (p_i − z)`. For the trapezoidal rule
//! on the circle `|z − c| = r` this sum equals the compact form
//! `R_{c,r,k}(z) = 1 / (1 + ((z − c)/r)^k)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pencil::{Annulus, DiskRegion};

const NEAR_POLE: f64 = 1e-14;
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    Trapezoid,
    GaussSemicircle,
}

/// Poles and weights of a quadrature-based filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolesWeights {
    pub rule: QuadratureRule,
    pub center: Complex64,
    pub radius: f64,
    pub k: usize,
    pub poles: Vec<Complex64>,
    pub weights: Vec<Complex64>,
}

impl PolesWeights {
    pub fn region(&self) -> DiskRegion {
        DiskRegion::new(self.center, self.radius).expect("rule built from a valid region")
    }

    /// `Σ w_i / (p_i − z)`.
    pub fn eval_sum(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = ZERO;
        for (&p, &w) in self.poles.iter().zip(&self.weights) {
            let d = p - z;
            if d.norm() <= NEAR_POLE * self.radius {
                return Err(Error::NearPole { z, distance: d.norm() });
            }
            acc += w / d;
        }
        Ok(acc)
    }
}

/// Trapezoidal rule on `|z − c| = r` with angles `θ_i = 2(i − ½)π / k`.
pub fn trapezoid_rule(region: &DiskRegion, k: usize) -> Result<PolesWeights> {
    if k == 0 {
        return Err(Error::InvalidArgument("trapezoid rule needs k >= 1".into()));
    }
    let (c, r) = (region.center(), region.radius());
    let mut poles = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for i in 1..=k {
        let theta = 2.0 * (i as f64 - 0.5) * PI / k as f64;
        let e = Complex64::from_polar(1.0, theta);
        poles.push(c + r * e);
        weights.push(e * (r / k as f64));
    }
    Ok(PolesWeights {
        rule: QuadratureRule::Trapezoid,
        center: c,
        radius: r,
        k,
        poles,
        weights,
    })
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_m.
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=m {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[m - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre quadrature with `k/2` nodes on each semicircle of the contour.
pub fn gauss_rule(region: &DiskRegion, k: usize) -> Result<PolesWeights> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("Gauss rule needs an even k >= 2, got {k}")));
    }
    let (c, r) = (region.center(), region.radius());
    let (x, omega) = gauss_legendre(k / 2);
    let mut poles = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for offset in [0.0, PI] {
        for (&xj, &wj) in x.iter().zip(&omega) {
            let theta = offset + PI / 2.0 * (xj + 1.0);
            let e = Complex64::from_polar(1.0, theta);
            poles.push(c + r * e);
            // (π/2)·ω_j from the interval map times r e^{iθ}/(2π) from dζ/(2πi).
            weights.push(e * (r * wj / 4.0));
        }
    }
    Ok(PolesWeights {
        rule: QuadratureRule::GaussSemicircle,
        center: c,
        radius: r,
        k,
        poles,
        weights,
    })
}

fn check_pole(z: Complex64, denominator: Complex64) -> Result<()> {
    if denominator.norm() <= NEAR_POLE {
        return Err(Error::NearPole {
            z,
            distance: denominator.norm(),
        });
    }
    Ok(())
}

/// `1 / (1 + ((z − c)/r)^k)`.
pub fn eval_compact(region: &DiskRegion, k: usize, z: Complex64) -> Result<Complex64> {
    let w = region.normalize(z);
    if w.norm() > 1.0 {
        // w^{-k} / (1 + w^{-k}) stays finite when w^k overflows.
        let t = w.inv().powu(k as u32);
        check_pole(z, ONE + t)?;
        Ok(t / (ONE + t))
    } else {
        let wk = w.powu(k as u32);
        check_pole(z, ONE + wk)?;
        Ok((ONE + wk).inv())
    }
}

/// `T(z) = (1 − z)/z`, which sends `R_k(z)` to `z^k`.
pub fn mobius_t(z: Complex64) -> Result<Complex64> {
    if z == ZERO {
        return Err(Error::NearPole { z, distance: 0.0 });
    }
    Ok((ONE - z) / z)
}

/// Shifts and weights of the outer composite rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeCoeffs {
    pub k2: usize,
    pub shifts: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    pub direct_term: Complex64,
}

/// Roots `σ_i = e^{i(2i−1)π/k2}` of `x^{k2} = −1`, in index order.
pub fn composite_roots(k2: usize) -> Vec<Complex64> {
    (1..=k2)
        .map(|i| Complex64::from_polar(1.0, (2 * i - 1) as f64 * PI / k2 as f64))
        .collect()
}

/// `s_i = 1/(1 + σ_i)`, `c_i = −(1/k2)·σ_i/(1 + σ_i)`. For odd `k2` the root
/// `σ = −1` has no shift; it contributes `R_{k1}/k2` through `direct_term`.
pub fn composite_coeffs(k2: usize) -> Result<CompositeCoeffs> {
    if k2 == 0 {
        return Err(Error::InvalidArgument("composite rule needs k2 >= 1".into()));
    }
    let inv = 1.0 / k2 as f64;
    let mut shifts = Vec::with_capacity(k2);
    let mut weights = Vec::with_capacity(k2);
    for (i, sigma) in composite_roots(k2).into_iter().enumerate() {
        if k2 % 2 == 1 && 2 * i + 1 == k2 {
            continue;
        }
        let s = (ONE + sigma).inv();
        shifts.push(s);
        weights.push(-sigma * s * inv);
    }
    let direct_term = if k2 % 2 == 1 { Complex64::new(inv, 0.0) } else { ZERO };
    Ok(CompositeCoeffs {
        k2,
        shifts,
        weights,
        direct_term,
    })
}

impl CompositeCoeffs {
    /// Outer filter applied to an inner filter value `g = R_{k1}(z)`:
    /// `Σ c_i g/(s_i − g) + direct·g`.
    ///
    /// This is the scalar image of `−Σ c_i (G − s_i)^{-1} G b + direct·G b`.
    pub fn apply_scalar(&self, g: Complex64) -> Result<Complex64> {
        let u = g.inv();
        self.apply_reciprocal(u, g)
    }

    // `u = 1/g`; the sum is written in `u` so a pole of the inner filter
    // (g = ∞, u = 0) is handled without overflow.
    fn apply_reciprocal(&self, u: Complex64, z: Complex64) -> Result<Complex64> {
        let mut acc = ZERO;
        for (&s, &c) in self.shifts.iter().zip(&self.weights) {
            let d = s * u - ONE;
            check_pole(z, d)?;
            acc += c / d;
        }
        if self.direct_term != ZERO {
            check_pole(z, u)?;
            acc += self.direct_term / u;
        }
        Ok(acc)
    }
}

/// `R_{k2}(T(R_{c,r,k1}(z)))` evaluated through the composite coefficients.
pub fn eval_composite(region: &DiskRegion, k1: usize, k2: usize, z: Complex64) -> Result<Complex64> {
    if k1 == 0 {
        return Err(Error::InvalidArgument("composite rule needs k1 >= 1".into()));
    }
    let coeffs = composite_coeffs(k2)?;
    let u = ONE + region.normalize(z).powu(k1 as u32);
    coeffs.apply_reciprocal(u, z)
}

/// Where a pole of `R_{k1·k2}` lands under `R_{k1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleImage {
    /// `R_{k1}(p)`, or `None` when `p` is also a pole of `R_{k1}`.
    pub value: Option<Complex64>,
    /// Index into `composite_coeffs(k2).shifts` of the nearest shift, or
    /// `None` for the excluded shift at infinity.
    pub nearest_shift: Option<usize>,
    pub distance: f64,
}

pub fn pole_mapping_check(region: &DiskRegion, k1: usize, k2: usize, pole_index: usize) -> Result<PoleImage> {
    let rule = trapezoid_rule(region, k1 * k2)?;
    let p = *rule.poles.get(pole_index).ok_or_else(|| {
        Error::InvalidArgument(format!("pole index {pole_index} out of range for k = {}", k1 * k2))
    })?;
    let coeffs = composite_coeffs(k2)?;
    let u = ONE + region.normalize(p).powu(k1 as u32);
    if u.norm() < 1e-10 {
        let distance = if coeffs.direct_term != ZERO { 0.0 } else { f64::INFINITY };
        return Ok(PoleImage {
            value: None,
            nearest_shift: None,
            distance,
        });
    }
    let value = u.inv();
    let (nearest, distance) = coeffs
        .shifts
        .iter()
        .map(|s| (s - value).norm())
        .enumerate()
        .fold((None, f64::INFINITY), |best, (i, d)| if d < best.1 { (Some(i), d) } else { best });
    Ok(PoleImage {
        value: Some(value),
        nearest_shift: nearest,
        distance,
    })
}

/// `2 / ((b/a)^k − 1)`.
pub fn separation_ratio_closed(annulus: &Annulus, k: usize) -> f64 {
    let q = (annulus.outer_radius() / annulus.inner_radius()).powi(k as i32);
    2.0 / (q - 1.0)
}

/// `(a/b)^k`, attained by `z^{-k}`.
pub fn optimal_ratio(annulus: &Annulus, k: usize) -> f64 {
    (annulus.inner_radius() / annulus.outer_radius()).powi(k as i32)
}

/// Half-width of the square evaluation grid, `1.5` for `b = 1.1`.
pub fn grid_half_width(annulus: &Annulus) -> f64 {
    1.5 / 1.1 * annulus.outer_radius()
}

/// Points `(x, y, |R(c + r(x + iy))|)` on a `grid_n × grid_n` grid over
/// `[−h, h]²`. Points on a pole are skipped.
pub fn filter_map_grid(pw: &PolesWeights, half_width: f64, grid_n: usize) -> Vec<(f64, f64, f64)> {
    let coords = linspace(-half_width, half_width, grid_n);
    let mut out = Vec::with_capacity(grid_n * grid_n);
    for &y in &coords {
        for &x in &coords {
            let z = pw.center + pw.radius * Complex64::new(x, y);
            if let Ok(v) = pw.eval_sum(z) {
                out.push((x, y, v.norm()));
            }
        }
    }
    out
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Grid estimate of `sup_{|ζ|≥b} |R| / inf_{|ζ|≤a} |R|` in normalized coordinates.
pub fn separation_ratio_grid(pw: &PolesWeights, annulus: &Annulus, grid_n: usize) -> Result<f64> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument("ratio grid needs at least 2 points per side".into()));
    }
    let (a, b) = (annulus.inner_radius(), annulus.outer_radius());
    let mut sup_out: f64 = 0.0;
    let mut inf_in = f64::INFINITY;
    for (x, y, v) in filter_map_grid(pw, grid_half_width(annulus), grid_n) {
        let rho = x.hypot(y);
        if rho >= b {
            sup_out = sup_out.max(v);
        } else if rho <= a {
            inf_in = inf_in.min(v);
        }
    }
    if !inf_in.is_finite() {
        return Err(Error::InvalidArgument("grid has no points inside the inner disk".into()));
    }
    Ok(sup_out / inf_in)
}

/// Parameters of the Möbius map `T_ab(z) = γ (z − α)/(z − β)` that sends
/// `|z| ≥ b` to `S` and `|z| ≤ a` to `−S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZolotarevParams {
    pub a: f64,
    pub b: f64,
    pub ell: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub fn zolotarev_params(annulus: &Annulus) -> ZolotarevParams {
    let (a, b) = (annulus.inner_radius(), annulus.outer_radius());
    let gamma = (b.sqrt() - a.sqrt()) / (b.sqrt() + a.sqrt());
    let alpha = (a * b).sqrt();
    ZolotarevParams {
        a,
        b,
        ell: gamma * gamma,
        gamma,
        alpha,
        beta: -alpha,
    }
}

impl ZolotarevParams {
    /// `S = {z : |z − (1+ℓ)/2| ≤ (1−ℓ)/2}`, as (center, radius).
    pub fn disk_s(&self) -> (f64, f64) {
        ((1.0 + self.ell) / 2.0, (1.0 - self.ell) / 2.0)
    }

    pub fn map(&self, z: Complex64) -> Result<Complex64> {
        let d = z - self.beta;
        check_pole(z, d)?;
        Ok(self.gamma * (z - self.alpha) / d)
    }

    /// `((1 + √ℓ)/(1 − √ℓ))^{−2k}`, which equals `(a/b)^k`.
    pub fn infimum(&self, k: usize) -> f64 {
        let s = self.ell.sqrt();
        ((1.0 + s) / (1.0 - s)).powi(-2 * k as i32)
    }
}

/// `r_k(z) = ((z − √ℓ)/(z + √ℓ))^k`.
pub fn zolotarev_function(params: &ZolotarevParams, k: usize, z: Complex64) -> Result<Complex64> {
    let s = params.ell.sqrt();
    let d = z + s;
    check_pole(z, d)?;
    Ok(((z - s) / d).powu(k as u32))
}

/// `r_k(T_ab(z))`, which equals `(−√(ab)/z)^k`.
pub fn zolotarev_eval(params: &ZolotarevParams, k: usize, z: Complex64) -> Result<Complex64> {
    zolotarev_function(params, k, params.map(z)?)
}

/// `r_k(T_ab(z)) / (−√(ab))^k = z^{−k}`.
pub fn zolotarev_composed(params: &ZolotarevParams, k: usize, z: Complex64) -> Result<Complex64> {
    let factor = Complex64::new(-params.alpha, 0.0).powu(k as u32);
    Ok(zolotarev_eval(params, k, z)? / factor)
}

/// Contraction estimate `|R(λ_{n_col+1})| / |R(λ_s)|` from filter magnitudes
/// sorted in decreasing order. Ties keep the input order.
pub fn estimated_contraction(filter_magnitudes: &[f64], s: usize, n_col: usize) -> Option<f64> {
    if s == 0 || s > n_col || n_col >= filter_magnitudes.len() {
        return None;
    }
    let mut sorted = filter_magnitudes.to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    Some(sorted[n_col] / sorted[s - 1])
}
