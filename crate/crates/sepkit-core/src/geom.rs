//! Plane geometry helpers shared by the scan operations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rectangle {
    /// A non-degenerate rectangle; panics if any side collapses.
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        assert!(
            x_min < x_max && y_min < y_max,
            "degenerate rectangle [{x_min},{x_max}]x[{y_min},{y_max}]"
        );
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.x_min <= z.re && z.re <= self.x_max && self.y_min <= z.im && z.im <= self.y_max
    }

    /// Strictly inside, at least `margin` away from every edge.
    pub fn contains_with_margin(&self, z: Complex64, margin: f64) -> bool {
        self.x_min + margin < z.re
            && z.re < self.x_max - margin
            && self.y_min + margin < z.im
            && z.im < self.y_max - margin
    }

    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.x_min, self.y_min),
            Complex64::new(self.x_max, self.y_min),
            Complex64::new(self.x_max, self.y_max),
            Complex64::new(self.x_min, self.y_max),
        ]
    }

    pub fn farthest_corner_distance(&self, z: Complex64) -> f64 {
        self.corners()
            .iter()
            .map(|c| (c - z).norm())
            .fold(0.0, f64::max)
    }

    /// Node (i, j) of an inclusive n-per-axis grid over the rectangle.
    pub fn grid_node(&self, i: usize, j: usize, n: usize) -> Complex64 {
        assert!(n >= 2 && i < n && j < n);
        let fx = i as f64 / (n - 1) as f64;
        let fy = j as f64 / (n - 1) as f64;
        Complex64::new(
            self.x_min + fx * self.width(),
            self.y_min + fy * self.height(),
        )
    }
}
