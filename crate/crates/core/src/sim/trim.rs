//! Wings-level, constant-altitude trim by Newton iteration on
//! `(α, δe, T)`.

use super::dynamics::derivatives;
use super::model::AeroModel;
use super::state::{AircraftState, ControlInput};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimPoint {
    pub alpha: f64,
    pub elevator: f64,
    pub thrust: f64,
    pub state: AircraftState,
    /// Max |u̇|, |ẇ|, |q̇| at the solution.
    pub residual: f64,
}

fn trim_state(altitude: f64, speed: f64, alpha: f64) -> AircraftState {
    AircraftState {
        u: speed * alpha.cos(),
        w: speed * alpha.sin(),
        theta: alpha,
        h: altitude,
        ..AircraftState::default()
    }
}

fn residual(model: &AeroModel, altitude: f64, speed: f64, x: [f64; 3]) -> Result<[f64; 3]> {
    let s = trim_state(altitude, speed, x[0]);
    let input = ControlInput { elevator: x[1], aileron: 0.0, rudder: 0.0, thrust: x[2] };
    let d = derivatives(&s, &input, model, 0.0).map_err(|r| Error::numeric(format!("trim evaluation failed: {r}")))?;
    Ok([d.u, d.w, d.q])
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut x = [0.0; 3];
    for (col, xi) in x.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *xi = det(m) / d;
    }
    Some(x)
}

/// Finds the trim point for level flight at `altitude` (m) and `speed` (m/s).
pub fn trim(model: &AeroModel, altitude: f64, speed: f64) -> Result<TrimPoint> {
    let mut x = [0.05, 0.0, 3000.0];
    let scale = [1e-6, 1e-6, 1e-2];
    for _ in 0..50 {
        let f = residual(model, altitude, speed, x)?;
        let norm = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm < 1e-12 {
            break;
        }
        let mut jac = [[0.0; 3]; 3];
        for j in 0..3 {
            let (mut xp, mut xm) = (x, x);
            xp[j] += scale[j];
            xm[j] -= scale[j];
            let (fp, fm) = (residual(model, altitude, speed, xp)?, residual(model, altitude, speed, xm)?);
            for i in 0..3 {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * scale[j]);
            }
        }
        let step = solve3(jac, f).ok_or_else(|| Error::numeric("singular trim Jacobian"))?;
        for j in 0..3 {
            x[j] -= step[j];
        }
    }
    let f = residual(model, altitude, speed, x)?;
    let res = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(res < 1e-6) || x[0].abs() > 0.5 {
        return Err(Error::numeric(format!("trim did not converge (residual {res:.3e})")));
    }
    Ok(TrimPoint { alpha: x[0], elevator: x[1], thrust: x[2], state: trim_state(altitude, speed, x[0]), residual: res })
}
