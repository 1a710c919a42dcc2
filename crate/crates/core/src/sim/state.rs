use std::ops::{Add, Mul};

/// Rigid-body state: body rates (rad/s), body velocities (m/s), Euler angles
/// (rad), altitude (m), and horizontal position (m, diagnostic only).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AircraftState {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub h: f64,
    pub x_e: f64,
    pub y_e: f64,
}

impl AircraftState {
    pub const LEN: usize = 12;

    /// Level, wings-level, zero-rate state flying along body x at speed `v`.
    pub fn level(altitude: f64, speed: f64) -> Self {
        Self { u: speed, h: altitude, ..Self::default() }
    }

    pub fn airspeed(&self) -> f64 {
        (self.u * self.u + self.v * self.v + self.w * self.w).sqrt()
    }

    pub fn alpha(&self) -> f64 {
        self.w.atan2(self.u)
    }

    pub fn beta(&self) -> f64 {
        let v = self.airspeed();
        if v > 0.0 {
            (self.v / v).clamp(-1.0, 1.0).asin()
        } else {
            0.0
        }
    }

    pub fn to_array(&self) -> [f64; 12] {
        [
            self.p, self.q, self.r, self.u, self.v, self.w, self.phi, self.theta, self.psi, self.h, self.x_e,
            self.y_e,
        ]
    }

    pub fn from_array(a: [f64; 12]) -> Self {
        Self {
            p: a[0],
            q: a[1],
            r: a[2],
            u: a[3],
            v: a[4],
            w: a[5],
            phi: a[6],
            theta: a[7],
            psi: a[8],
            h: a[9],
            x_e: a[10],
            y_e: a[11],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// `x = [p, q, r, V, α, β, θ, φ, ψ, h]`.
    pub fn output_vector(&self) -> [f64; 10] {
        [
            self.p,
            self.q,
            self.r,
            self.airspeed(),
            self.alpha(),
            self.beta(),
            self.theta,
            self.phi,
            self.psi,
            self.h,
        ]
    }

    /// Specific kinetic plus potential energy, J/kg.
    pub fn specific_energy(&self) -> f64 {
        0.5 * self.airspeed().powi(2) + super::GRAVITY * self.h
    }
}

impl Add for AircraftState {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl Mul<f64> for AircraftState {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::from_array(self.to_array().map(|v| v * k))
    }
}

/// Surface deflections (rad) and thrust (N).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInput {
    pub elevator: f64,
    pub aileron: f64,
    pub rudder: f64,
    pub thrust: f64,
}

impl ControlInput {
    pub fn surfaces(elevator: f64, aileron: f64, rudder: f64) -> Self {
        Self { elevator, aileron, rudder, thrust: 0.0 }
    }

    pub fn surface_array(&self) -> [f64; 3] {
        [self.elevator, self.aileron, self.rudder]
    }

    pub fn with_surfaces(self, s: [f64; 3]) -> Self {
        Self { elevator: s[0], aileron: s[1], rudder: s[2], ..self }
    }
}
