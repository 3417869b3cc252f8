//! Probabilistic-LoS air-to-ground channel, received power, rate and the
//! SINR of an interfered BS.

use thiserror::Error;

use crate::beam::{direction_between, BeamError, NormalizedBeam};
use crate::point::Point3;
use crate::scenario::RadioParams;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("VAA reference point (z = {vaa_z}) must be above the BS (z = {bs_z})")]
    NotAbove { vaa_z: f64, bs_z: f64 },
    #[error(transparent)]
    Beam(#[from] BeamError),
}

/// Geometry of the link from the VAA reference point to one BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub d3_m: f64,
    pub d2_m: f64,
    pub h_m: f64,
    pub elevation_deg: f64,
}

/// Link geometry with elevation `(180/pi) asin(h / d2)`, the ratio clamped
/// to [0, 1] (so `d2 = 0` or `h > d2` both give 90 degrees).
pub fn link_geometry(vaa_ref_point: &Point3, bs: &Point3) -> Result<LinkGeometry, ChannelError> {
    if !(vaa_ref_point.z > bs.z) {
        return Err(ChannelError::NotAbove {
            vaa_z: vaa_ref_point.z,
            bs_z: bs.z,
        });
    }
    let d2 = vaa_ref_point.horizontal_distance(bs);
    let h = vaa_ref_point.z - bs.z;
    let ratio = if d2 > 0.0 { (h / d2).clamp(0.0, 1.0) } else { 1.0 };
    Ok(LinkGeometry {
        d3_m: d2.hypot(h),
        d2_m: d2,
        h_m: h,
        elevation_deg: ratio.asin().to_degrees(),
    })
}

/// `[1 + k1 exp(-k2 (theta_e - k1))]^-1`, elevation in degrees.
pub fn los_probability(elevation_deg: f64, k1: f64, k2: f64) -> f64 {
    1.0 / (1.0 + k1 * (-k2 * (elevation_deg - k1)).exp())
}

/// `[k0 d^alpha (xi1 p + xi2 (1 - p))]^-1` for a given LoS probability.
pub fn pathloss_gain(d_m: f64, p_los: f64, radio: &RadioParams) -> f64 {
    let xi = radio.xi_los * p_los + radio.xi_nlos * (1.0 - p_los);
    1.0 / (radio.pathloss_const * d_m.powf(radio.pathloss_exp) * xi)
}

/// Linear channel power gain of a link.
pub fn channel_gain(link: &LinkGeometry, radio: &RadioParams) -> f64 {
    let p_los = los_probability(link.elevation_deg, radio.k1, radio.k2);
    pathloss_gain(link.d3_m, p_los, radio)
}

/// `P_t * G * g`.
pub fn received_power_from_gain(antenna_gain: f64, channel_gain: f64, radio: &RadioParams) -> f64 {
    radio.tx_power_w * antenna_gain * channel_gain
}

/// Received power at a BS in direction `(theta, phi)` over `link`.
pub fn received_power(
    beam: &NormalizedBeam,
    bs_direction: (f64, f64),
    link: &LinkGeometry,
    radio: &RadioParams,
) -> f64 {
    let gain = beam.gain(bs_direction.0, bs_direction.1);
    received_power_from_gain(gain, channel_gain(link, radio), radio)
}

/// Received power at `bs`, with the VAA represented by the centroid of the
/// snapshot positions.
pub fn received_power_at(
    beam: &NormalizedBeam,
    bs: &Point3,
    radio: &RadioParams,
) -> Result<f64, ChannelError> {
    let centroid = Point3::centroid(beam.snapshot().positions());
    let link = link_geometry(&centroid, bs)?;
    Ok(received_power(beam, direction_between(&centroid, bs), &link, radio))
}

/// Shannon rate `B log2(1 + p / sigma^2)` in bit/s.
pub fn rate(p_rx_w: f64, radio: &RadioParams) -> f64 {
    radio.bandwidth_hz * (1.0 + p_rx_w / radio.noise_power_w).log2()
}

/// `P_GU / (sigma^2 + p_interference)`, linear.
pub fn interfered_sinr(p_interference_w: f64, radio: &RadioParams) -> f64 {
    radio.gu_rx_power_w / (radio.noise_power_w + p_interference_w)
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
