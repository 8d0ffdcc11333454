//! Circular-trajectory geometry used to score final orientations.
//!
//! Every endpoint `(x, y)` (robot frame at start: +x forward, +y left)
//! defines a circle through the origin whose center lies on the lateral
//! axis. The desired final heading is the tangent of that circle at the
//! endpoint; the region of interest is the pair of 60-degree lobes in front
//! of and behind the robot, cut at 0.6 m of arc length.

use std::f64::consts::{FRAC_PI_3, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Endpoint {
    pub x: f64,
    pub y: f64,
}

impl Endpoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Endpoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(&self, other: &Endpoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_origin(&self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    /// Angle of the endpoint seen from the start position.
    pub fn bearing(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Desired final heading at `e`: the tangent of the lateral-axis circle.
pub fn beta(e: Endpoint) -> Result<f64, Error> {
    if e.is_origin() {
        return Err(Error::UndefinedAtOrigin);
    }
    Ok(wrap(2.0 * e.y.atan2(e.x)))
}

/// Orientation error `theta = wrap(alpha - beta(e))`.
pub fn orientation_error(e: Endpoint, alpha: f64) -> Result<f64, Error> {
    Ok(wrap(alpha - beta(e)?))
}

/// Quality score `-|theta|` (rad, at most 0).
pub fn quality(e: Endpoint, alpha: f64) -> Result<f64, Error> {
    Ok(-orientation_error(e, alpha)?.abs())
}

/// Arc length from the origin to `e` along its lateral-axis circle.
pub fn curvilinear_abscissa(e: Endpoint) -> Result<f64, Error> {
    if e.is_origin() {
        return Err(Error::UndefinedAtOrigin);
    }
    if e.y == 0.0 {
        return Ok(e.x.abs());
    }
    let radius = (e.x * e.x + e.y * e.y) / (2.0 * e.y.abs());
    let subtended = 2.0 * e.y.abs().atan2(e.x.abs());
    Ok(radius * subtended)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionOfInterest {
    /// Half-angle of each lobe around the +x and -x axes (rad).
    pub half_angle: f64,
    /// Largest admitted curvilinear abscissa (m).
    pub s_max: f64,
}

impl Default for RegionOfInterest {
    fn default() -> Self {
        Self { half_angle: FRAC_PI_3, s_max: 0.6 }
    }
}

/// Spacing of the metric grid (m).
pub const GRID_STEP: f64 = 0.01;

impl RegionOfInterest {
    pub fn new(half_angle: f64, s_max: f64) -> Result<Self, Error> {
        if !(half_angle > 0.0 && half_angle <= PI / 2.0) {
            return Err(Error::Config(format!("ROI half-angle {half_angle} outside (0, pi/2]")));
        }
        if !(s_max > 0.0 && s_max.is_finite()) {
            return Err(Error::Config(format!("ROI s_max {s_max} must be positive")));
        }
        Ok(Self { half_angle, s_max })
    }

    /// True when the bearing of `e` lies in the front or the rear lobe.
    pub fn in_lobes(&self, e: Endpoint) -> bool {
        let b = e.bearing().abs();
        b <= self.half_angle || b >= PI - self.half_angle
    }

    pub fn contains(&self, e: Endpoint) -> bool {
        if e.is_origin() {
            return false;
        }
        match curvilinear_abscissa(e) {
            Ok(s) => s <= self.s_max && self.in_lobes(e),
            Err(_) => false,
        }
    }

    /// Origin-anchored 1 cm lattice over the bounding box, filtered by
    /// [`RegionOfInterest::contains`]. Points are ordered by x then y.
    pub fn grid(&self) -> Vec<Endpoint> {
        // arc length bounds the chord, so |e| <= s_max
        let n = (self.s_max / GRID_STEP).ceil() as i64;
        let mut points = Vec::new();
        for ix in -n..=n {
            for iy in -n..=n {
                let e = Endpoint::new(ix as f64 / 100.0, iy as f64 / 100.0);
                if self.contains(e) {
                    points.push(e);
                }
            }
        }
        points
    }
}

pub fn roi_contains(roi: &RegionOfInterest, e: Endpoint) -> bool {
    roi.contains(e)
}
