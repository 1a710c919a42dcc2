//! Rigid-body equations of motion, ISA density, and the aerodynamic buildup.

use std::f64::consts::FRAC_PI_2;

use super::model::AeroModel;
use super::state::{AircraftState, ControlInput};
use super::GRAVITY;

/// ISA troposphere density, kg/m³ (held at the tropopause value above 11 km).
pub fn air_density(h: f64) -> f64 {
    let h = h.clamp(-1000.0, 11_000.0);
    1.225 * (1.0 - 2.25577e-5 * h).powf(4.2559)
}

/// Aerodynamic coefficients at one flight condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroCoefficients {
    pub lift: f64,
    pub drag: f64,
    pub side: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

/// Coefficient buildup. `alpha` already includes any gust offset.
pub fn aero_coefficients(
    model: &AeroModel,
    alpha: f64,
    beta: f64,
    airspeed: f64,
    rates: [f64; 3],
    surfaces: [f64; 3],
) -> AeroCoefficients {
    let [p, q, r] = rates;
    let [de, da, dr] = surfaces;
    let p_hat = p * model.span / (2.0 * airspeed);
    let q_hat = q * model.chord / (2.0 * airspeed);
    let r_hat = r * model.span / (2.0 * airspeed);

    let lift = (model.cl0 + model.cl_alpha * alpha + model.cl_q * q_hat + model.cl_de * de)
        .clamp(-model.cl_max, model.cl_max);
    let drag = model.cd0 + model.k_induced * lift * lift + model.cd_de * de.abs();
    let side = model.cy_beta * beta + model.cy_dr * dr;
    let roll = model.cl_beta * beta + model.cl_p * p_hat + model.cl_r * r_hat + model.cl_da * da + model.cl_dr * dr;
    // a c.g. behind the reference point (negative offset) adds nose-up moment
    // proportional to lift
    let pitch = model.cm0 + model.cm_alpha * alpha + model.cm_q * q_hat + model.cm_de * de
        - model.cg_offset / model.chord * lift;
    let yaw = model.cn_beta * beta + model.cn_p * p_hat + model.cn_r * r_hat + model.cn_dr * dr + model.cn_da * da;
    AeroCoefficients { lift, drag, side, roll, pitch, yaw }
}

/// Why the state left the valid envelope.
pub fn envelope_violation(s: &AircraftState) -> Option<&'static str> {
    if !s.is_finite() {
        return Some("non-finite state");
    }
    if s.theta.abs() >= FRAC_PI_2 {
        return Some("pitch attitude reached ±90°");
    }
    let v = s.airspeed();
    if v <= 0.0 {
        return Some("airspeed not positive");
    }
    if s.alpha().abs() >= FRAC_PI_2 {
        return Some("angle of attack reached ±90°");
    }
    if s.beta().abs() >= FRAC_PI_2 {
        return Some("sideslip reached ±90°");
    }
    None
}

/// Time derivative of the 12-state rigid body. Surfaces are the effective
/// deflections; `gust_alpha` is added to the kinematic angle of attack in the
/// aerodynamic buildup only.
pub fn derivatives(
    s: &AircraftState,
    input: &ControlInput,
    model: &AeroModel,
    gust_alpha: f64,
) -> Result<AircraftState, &'static str> {
    if let Some(reason) = envelope_violation(s) {
        return Err(reason);
    }
    let v = s.airspeed();
    let alpha = s.alpha() + gust_alpha;
    let beta = s.beta();
    let qbar = 0.5 * air_density(s.h) * v * v;
    let c = aero_coefficients(model, alpha, beta, v, [s.p, s.q, s.r], input.surface_array());

    let qs = qbar * model.wing_area;
    let (lift, drag) = (qs * c.lift, qs * c.drag);
    let (sa, ca) = alpha.sin_cos();
    let fx = -drag * ca + lift * sa + input.thrust;
    let fy = qs * c.side;
    let fz = -drag * sa - lift * ca;
    let l = qs * model.span * c.roll;
    let m = qs * model.chord * c.pitch;
    let n = qs * model.span * c.yaw;

    let (sphi, cphi) = s.phi.sin_cos();
    let (sth, cth) = s.theta.sin_cos();
    let (spsi, cpsi) = s.psi.sin_cos();
    let mass = model.mass;
    let (p, q, r) = (s.p, s.q, s.r);
    let (u, vb, w) = (s.u, s.v, s.w);

    let du = r * vb - q * w + fx / mass - GRAVITY * sth;
    let dv = p * w - r * u + fy / mass + GRAVITY * cth * sphi;
    let dw = q * u - p * vb + fz / mass + GRAVITY * cth * cphi;

    let (ixx, iyy, izz, ixz) = (model.ixx, model.iyy, model.izz, model.ixz);
    let gamma = ixx * izz - ixz * ixz;
    let c1 = ((iyy - izz) * izz - ixz * ixz) / gamma;
    let c2 = (ixx - iyy + izz) * ixz / gamma;
    let c3 = izz / gamma;
    let c4 = ixz / gamma;
    let c5 = (izz - ixx) / iyy;
    let c6 = ixz / iyy;
    let c7 = 1.0 / iyy;
    let c8 = (ixx * (ixx - iyy) + ixz * ixz) / gamma;
    let c9 = ixx / gamma;
    let dp = (c1 * r + c2 * p) * q + c3 * l + c4 * n;
    let dq = c5 * p * r - c6 * (p * p - r * r) + c7 * m;
    let dr = (c8 * p - c2 * r) * q + c4 * l + c9 * n;

    let dphi = p + sth / cth * (q * sphi + r * cphi);
    let dtheta = q * cphi - r * sphi;
    let dpsi = (q * sphi + r * cphi) / cth;

    let dh = u * sth - vb * sphi * cth - w * cphi * cth;
    let dx = u * cth * cpsi + vb * (sphi * sth * cpsi - cphi * spsi) + w * (cphi * sth * cpsi + sphi * spsi);
    let dy = u * cth * spsi + vb * (sphi * sth * spsi + cphi * cpsi) + w * (cphi * sth * spsi - sphi * cpsi);

    Ok(AircraftState {
        p: dp,
        q: dq,
        r: dr,
        u: du,
        v: dv,
        w: dw,
        phi: dphi,
        theta: dtheta,
        psi: dpsi,
        h: dh,
        x_e: dx,
        y_e: dy,
    })
}

/// One classical fourth-order Runge–Kutta step with inputs held constant.
pub fn rk4_step(
    s: &AircraftState,
    input: &ControlInput,
    model: &AeroModel,
    gust_alpha: f64,
    dt: f64,
) -> Result<AircraftState, &'static str> {
    let k1 = derivatives(s, input, model, gust_alpha)?;
    let k2 = derivatives(&(*s + k1 * (0.5 * dt)), input, model, gust_alpha)?;
    let k3 = derivatives(&(*s + k2 * (0.5 * dt)), input, model, gust_alpha)?;
    let k4 = derivatives(&(*s + k3 * dt), input, model, gust_alpha)?;
    Ok(*s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}
