use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed disk `{z : |z - center| <= radius}` in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskRegion {
    center: Complex64,
    radius: f64,
}

impl DiskRegion {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("disk radius must be positive, got {radius}")));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::InvalidArgument("disk center must be finite".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn unit() -> Self {
        Self {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re.is_finite() && z.im.is_finite() && (z - self.center).norm() <= self.radius
    }

    /// `|c| + r`, the scale used to normalize residuals.
    pub fn scale(&self) -> f64 {
        self.center.norm() + self.radius
    }

    /// Maps `z` to the unit-disk coordinate `(z - c) / r`.
    pub fn normalize(&self, z: Complex64) -> Complex64 {
        (z - self.center) / self.radius
    }
}

/// Annulus `a <= |z| <= b` separating the wanted and unwanted spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    inner_radius: f64,
    outer_radius: f64,
}

impl Annulus {
    pub fn new(inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if !(inner_radius > 0.0 && inner_radius < outer_radius && outer_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "annulus needs 0 < a < b, got a = {inner_radius}, b = {outer_radius}"
            )));
        }
        Ok(Self {
            inner_radius,
            outer_radius,
        })
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }
}
