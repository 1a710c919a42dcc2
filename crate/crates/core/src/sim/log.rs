use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::state::{AircraftState, ControlInput};
use crate::error::Result;

/// One trajectory sample; angles in degrees and rates in deg/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub p_dps: f64,
    pub q_dps: f64,
    pub r_dps: f64,
    pub airspeed: f64,
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub phi_deg: f64,
    pub theta_deg: f64,
    pub psi_deg: f64,
    pub h: f64,
    pub elevator_deg: f64,
    pub aileron_deg: f64,
    pub rudder_deg: f64,
    pub thrust: f64,
}

impl TrajectoryRow {
    pub fn new(t: f64, s: &AircraftState, input: &ControlInput) -> Self {
        Self {
            t,
            p_dps: s.p.to_degrees(),
            q_dps: s.q.to_degrees(),
            r_dps: s.r.to_degrees(),
            airspeed: s.airspeed(),
            alpha_deg: s.alpha().to_degrees(),
            beta_deg: s.beta().to_degrees(),
            phi_deg: s.phi.to_degrees(),
            theta_deg: s.theta.to_degrees(),
            psi_deg: s.psi.to_degrees(),
            h: s.h,
            elevator_deg: input.elevator.to_degrees(),
            aileron_deg: input.aileron.to_degrees(),
            rudder_deg: input.rudder.to_degrees(),
            thrust: input.thrust,
        }
    }
}

/// Writes any serializable rows as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), rows)
}
