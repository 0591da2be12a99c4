//! Conversions between engineering units and the SI values used internally.

use std::f64::consts::PI;

const CC_PER_M3: f64 = 1e6;
const PA_PER_BAR: f64 = 1e5;
const LPM_PER_M3S: f64 = 60_000.0;

/// cc/rev to m³/rad.
pub fn cc_per_rev_to_m3_per_rad(cc: f64) -> f64 {
    cc / (2.0 * PI * CC_PER_M3)
}

pub fn m3_per_rad_to_cc_per_rev(d: f64) -> f64 {
    d * 2.0 * PI * CC_PER_M3
}

pub fn rpm_to_rad_s(rpm: f64) -> f64 {
    rpm * 2.0 * PI / 60.0
}

pub fn rad_s_to_rpm(w: f64) -> f64 {
    w * 60.0 / (2.0 * PI)
}

pub fn bar_to_pa(bar: f64) -> f64 {
    bar * PA_PER_BAR
}

pub fn pa_to_bar(pa: f64) -> f64 {
    pa / PA_PER_BAR
}

pub fn lpm_to_m3s(lpm: f64) -> f64 {
    lpm / LPM_PER_M3S
}

pub fn m3s_to_lpm(q: f64) -> f64 {
    q * LPM_PER_M3S
}

pub fn mm_to_m(mm: f64) -> f64 {
    mm / 1000.0
}
