//! Classical fixed-step fourth-order Runge-Kutta.
//!
//! All integrators in this crate (algebra geodesics, group reconstruction,
//! spectral vorticity, Clebsch advection) share this stepper, so cross-module
//! equivalence tests compare formulas rather than time-stepping schemes.

use nalgebra::DVector;

/// State that can be advanced by the RK4 stepper.
pub trait OdeState: Clone {
    /// Returns `self + c * other`.
    fn add_scaled(&self, c: f64, other: &Self) -> Self;
}

impl OdeState for DVector<f64> {
    fn add_scaled(&self, c: f64, other: &Self) -> Self {
        self + other * c
    }
}

impl OdeState for Vec<f64> {
    fn add_scaled(&self, c: f64, other: &Self) -> Self {
        self.iter()
            .zip(other)
            .map(|(a, b)| a + c * b)
            .collect()
    }
}

/// One classical RK4 step of size `dt` for dy/dt = f(y).
pub fn rk4_step<S: OdeState>(y: &S, dt: f64, f: &mut impl FnMut(&S) -> S) -> S {
    let k1 = f(y);
    let k2 = f(&y.add_scaled(dt / 2.0, &k1));
    let k3 = f(&y.add_scaled(dt / 2.0, &k2));
    let k4 = f(&y.add_scaled(dt, &k3));
    y.add_scaled(dt / 6.0, &k1)
        .add_scaled(dt / 3.0, &k2)
        .add_scaled(dt / 3.0, &k3)
        .add_scaled(dt / 6.0, &k4)
}

/// Number of RK4 steps covering `[0, t_final]` with step `dt`.
pub fn step_count(dt: f64, t_final: f64) -> usize {
    (t_final / dt).round().max(1.0) as usize
}
