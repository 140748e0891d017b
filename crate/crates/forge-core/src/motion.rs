//! Jerk-limited point-to-point motion timing.
//!
//! A move is executed as a symmetric S-curve with bounded jerk J,
//! acceleration A and velocity V. The profile is described by three segment
//! times: `tj` (jerk ramp), `ta` (constant acceleration) and `tv` (constant
//! velocity cruise); total duration is `4·tj + 2·ta + tv`.
//!
//! Regimes:
//! * pure jerk — neither bound reached, `T = 4·(d/2J)^(1/3)`;
//! * jerk+acceleration — acceleration saturates, no cruise;
//! * jerk+velocity — velocity saturates before the acceleration bound is
//!   reachable, no constant-acceleration segment;
//! * full — a cruise at V exists and the velocity ramp takes `V/A + A/J`,
//!   giving the classical `T = d/V + V/A + A/J`.
//!
//! The cruise regime keeps the `V/A + A/J` ramp even when `A² > V·J` (the
//! ramp then tops out below A); that is the conventional decoupled-bounds
//! formula and the shape settings files are written against.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionProfile {
    /// Max velocity, m/s.
    pub velocity: f64,
    /// Max acceleration, m/s².
    pub acceleration: f64,
    /// Max jerk, m/s³.
    pub jerk: f64,
}

impl MotionProfile {
    pub fn new(velocity: f64, acceleration: f64, jerk: f64) -> Result<Self, MotionError> {
        let p = MotionProfile { velocity, acceleration, jerk };
        if [velocity, acceleration, jerk].iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(MotionError::InvalidProfile(p));
        }
        Ok(p)
    }
}

#[derive(Debug, Error)]
pub enum MotionError {
    #[error("motion profile bounds must be finite and strictly positive: {0:?}")]
    InvalidProfile(MotionProfile),
    #[error("non-finite move distance")]
    NonFiniteDistance,
    #[error("sample step must be finite and positive, got {0}")]
    BadSampleStep(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    PureJerk,
    JerkAccel,
    JerkVel,
    Full,
}

/// Segment times of the symmetric profile for a nonnegative distance.
#[derive(Debug, Clone, Copy)]
pub struct SegmentTimes {
    pub regime: Regime,
    pub tj: f64,
    pub ta: f64,
    pub tv: f64,
}

impl SegmentTimes {
    pub fn total(&self) -> f64 {
        4.0 * self.tj + 2.0 * self.ta + self.tv
    }
}

pub fn classify(distance: f64, p: &MotionProfile) -> Result<SegmentTimes, MotionError> {
    if !distance.is_finite() {
        return Err(MotionError::NonFiniteDistance);
    }
    let d = distance.abs();
    let (v, a, j) = (p.velocity, p.acceleration, p.jerk);
    if d == 0.0 {
        return Ok(SegmentTimes { regime: Regime::PureJerk, tj: 0.0, ta: 0.0, tv: 0.0 });
    }
    // distance at which a cruise at V appears
    let d_cruise = v * (v / a + a / j);
    if d >= d_cruise {
        let tj = (v / a).min(a / j);
        let ta = (v / a - a / j).abs();
        let tv = d / v - (v / a + a / j);
        return Ok(SegmentTimes { regime: Regime::Full, tj, ta, tv });
    }
    if a * a <= v * j {
        // acceleration saturates first
        let d_jerk = 2.0 * a.powi(3) / (j * j);
        if d <= d_jerk {
            let tj = (d / (2.0 * j)).cbrt();
            Ok(SegmentTimes { regime: Regime::PureJerk, tj, ta: 0.0, tv: 0.0 })
        } else {
            let tj = a / j;
            let ta = (-3.0 * tj + (tj * tj + 4.0 * d / a).sqrt()) / 2.0;
            Ok(SegmentTimes { regime: Regime::JerkAccel, tj, ta, tv: 0.0 })
        }
    } else {
        // velocity saturates while acceleration stays triangular
        let tj_vel = (v / j).sqrt();
        let d_jerk = 2.0 * v * tj_vel;
        if d <= d_jerk {
            let tj = (d / (2.0 * j)).cbrt();
            Ok(SegmentTimes { regime: Regime::PureJerk, tj, ta: 0.0, tv: 0.0 })
        } else {
            let tv = d / v - 2.0 * tj_vel;
            Ok(SegmentTimes { regime: Regime::JerkVel, tj: tj_vel, ta: 0.0, tv })
        }
    }
}

/// Duration of a point-to-point move over `distance` meters (sign ignored).
pub fn move_duration(distance: f64, p: &MotionProfile) -> Result<f64, MotionError> {
    Ok(classify(distance, p)?.total())
}

/// The seven (jerk, duration) segments of the profile, in execution order.
pub fn segments(st: &SegmentTimes, jerk: f64) -> [(f64, f64); 7] {
    [
        (jerk, st.tj),
        (0.0, st.ta),
        (-jerk, st.tj),
        (0.0, st.tv),
        (-jerk, st.tj),
        (0.0, st.ta),
        (jerk, st.tj),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub position: f64,
    pub velocity: f64,
    pub acceleration: f64,
}

/// Sample the analytic trajectory every `dt` seconds, closing with an exact
/// sample at the final time. The move is mirrored for negative distances.
pub fn sample_trajectory(
    distance: f64,
    p: &MotionProfile,
    dt: f64,
) -> Result<Vec<TrajectorySample>, MotionError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(MotionError::BadSampleStep(dt));
    }
    let st = classify(distance, p)?;
    let total = st.total();
    let sign = if distance < 0.0 { -1.0 } else { 1.0 };
    if total == 0.0 {
        return Ok(vec![TrajectorySample { t: 0.0, position: 0.0, velocity: 0.0, acceleration: 0.0 }]);
    }
    let segs = segments(&st, p.jerk);
    // segment boundary states
    let mut bounds = Vec::with_capacity(8);
    let (mut pos, mut vel, mut acc, mut t0) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    bounds.push((t0, pos, vel, acc));
    for (j, len) in segs {
        pos += vel * len + acc * len * len / 2.0 + j * len.powi(3) / 6.0;
        vel += acc * len + j * len * len / 2.0;
        acc += j * len;
        t0 += len;
        bounds.push((t0, pos, vel, acc));
    }

    let eval = |t: f64| -> (f64, f64, f64) {
        let mut seg_start = 0.0;
        for (k, (j, len)) in segs.iter().enumerate() {
            if t <= seg_start + len + 1e-15 {
                let (_, p0, v0, a0) = bounds[k];
                let dt = (t - seg_start).max(0.0);
                return (
                    p0 + v0 * dt + a0 * dt * dt / 2.0 + j * dt.powi(3) / 6.0,
                    v0 + a0 * dt + j * dt * dt / 2.0,
                    a0 + j * dt,
                );
            }
            seg_start += len;
        }
        let (_, p0, v0, a0) = bounds[7];
        (p0, v0, a0)
    };

    let mut samples = Vec::new();
    let mut t = 0.0;
    while t < total {
        let (pos, vel, acc) = eval(t);
        samples.push(TrajectorySample {
            t,
            position: sign * pos,
            velocity: sign * vel,
            acceleration: sign * acc,
        });
        t += dt;
    }
    let (pos, vel, acc) = eval(total);
    samples.push(TrajectorySample {
        t: total,
        position: sign * pos,
        velocity: sign * vel,
        acceleration: sign * acc,
    });
    Ok(samples)
}

/// CSV export `t,pos,vel,acc`, one row per sample.
pub fn trajectory_csv(samples: &[TrajectorySample]) -> String {
    let mut out = String::from("t,pos,vel,acc\n");
    for s in samples {
        out.push_str(&format!("{},{},{},{}\n", s.t, s.position, s.velocity, s.acceleration));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile() -> MotionProfile {
        MotionProfile::new(5.0, 10.0, 10.0).unwrap()
    }

    /// Independent oracle: forward integration of the segment jerk profile.
    fn integrate(distance: f64, p: &MotionProfile, dt: f64) -> (f64, f64) {
        let st = classify(distance, p).unwrap();
        let segs = segments(&st, p.jerk);
        let (mut pos, mut vel, mut acc, mut t) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for (j, len) in segs {
            let steps = (len / dt).ceil() as u64;
            let h = if steps == 0 { 0.0 } else { len / steps as f64 };
            for _ in 0..steps {
                // exact update within a constant-jerk slice
                pos += vel * h + acc * h * h / 2.0 + j * h.powi(3) / 6.0;
                vel += acc * h + j * h * h / 2.0;
                acc += j * h;
                t += h;
            }
        }
        (t, pos)
    }

    #[test]
    fn zero_distance_is_zero_time() {
        assert_eq!(move_duration(0.0, &profile()).unwrap(), 0.0);
        let s = sample_trajectory(0.0, &profile(), 1e-3).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].t, 0.0);
    }

    #[test]
    fn pure_jerk_closed_form() {
        // 0.12 m with the normal profile stays in the pure-jerk regime
        let d = 0.12;
        let expected = 4.0 * (d / 20.0).cbrt();
        let got = move_duration(d, &profile()).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        assert_eq!(classify(d, &profile()).unwrap().regime, Regime::PureJerk);
    }

    #[test]
    fn full_regime_closed_form() {
        // 10 m: cruise exists, T = d/V + V/A + A/J
        let got = move_duration(10.0, &profile()).unwrap();
        assert!((got - 3.5).abs() < 1e-12, "{got}");
        assert_eq!(classify(10.0, &profile()).unwrap().regime, Regime::Full);
    }

    #[test]
    fn integration_oracle_agrees() {
        for d in [0.005, 0.12, 0.9, 2.0, 7.4, 10.0, 25.0] {
            let (t_end, pos_end) = integrate(d, &profile(), 1e-5);
            let t = move_duration(d, &profile()).unwrap();
            assert!((t - t_end).abs() < 2e-5, "d={d}: {t} vs {t_end}");
            assert!((pos_end - d).abs() < 1e-6, "d={d}: reached {pos_end}");
        }
    }

    #[test]
    fn direction_sign_is_irrelevant() {
        for d in [0.01, 0.12, 3.3, 42.0] {
            let a = move_duration(d, &profile()).unwrap();
            let b = move_duration(-d, &profile()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mirrored_trajectory() {
        let pos = sample_trajectory(0.12, &profile(), 1e-3).unwrap();
        let neg = sample_trajectory(-0.12, &profile(), 1e-3).unwrap();
        assert_eq!(pos.len(), neg.len());
        for (a, b) in pos.iter().zip(&neg) {
            assert_eq!(a.position, -b.position);
            assert_eq!(a.velocity, -b.velocity);
        }
    }

    #[test]
    fn samples_respect_bounds_and_hit_target() {
        let p = profile();
        for d in [0.04, 0.12, 1.0, 8.0, 12.0] {
            let samples = sample_trajectory(d, &p, 1e-4).unwrap();
            let eps = 1e-9;
            for s in &samples {
                assert!(s.velocity.abs() <= p.velocity + eps);
                assert!(s.acceleration.abs() <= p.acceleration + eps);
            }
            let last = samples.last().unwrap();
            assert!((last.position - d).abs() < 1e-6, "d={d} got {}", last.position);
            let t = move_duration(d, &p).unwrap();
            assert!((last.t - t).abs() < 1e-12);
            for w in samples.windows(2) {
                assert!(w[1].t > w[0].t);
            }
        }
    }

    #[test]
    fn regime_partition_is_exhaustive_and_velocity_continuous() {
        let mut rng_state = 0x243F6A8885A308D3u64;
        let mut next = move || {
            // xorshift, good enough to scatter test points
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let p = MotionProfile::new(
                0.1 + 20.0 * next(),
                0.1 + 30.0 * next(),
                0.1 + 50.0 * next(),
            )
            .unwrap();
            let d = 1e-4 + 40.0 * next();
            let st = classify(d, &p).unwrap();
            // boundary velocities must chain continuously
            let segs = segments(&st, p.jerk);
            let (mut vel, mut acc) = (0.0f64, 0.0f64);
            let mut vmax = 0.0f64;
            for (j, len) in segs {
                vel += acc * len + j * len * len / 2.0;
                acc += j * len;
                vmax = vmax.max(vel.abs());
            }
            assert!(vel.abs() < 1e-6, "terminal velocity {vel}");
            assert!(acc.abs() < 1e-6, "terminal acceleration {acc}");
            assert!(vmax <= p.velocity + 1e-6);
        }
    }

    #[test]
    fn duration_monotone_in_bounds() {
        let ds = [0.02, 0.4, 3.0, 19.0];
        for &d in &ds {
            // V and J: higher bound never slower
            let mut prev = f64::INFINITY;
            for v in [0.5, 1.0, 2.0, 4.0, 8.0] {
                let t = move_duration(d, &MotionProfile::new(v, 10.0, 10.0).unwrap()).unwrap();
                assert!(t <= prev + 1e-12);
                prev = t;
            }
            let mut prev = f64::INFINITY;
            for j in [1.0, 2.0, 5.0, 10.0, 40.0] {
                let t = move_duration(d, &MotionProfile::new(5.0, 10.0, j).unwrap()).unwrap();
                assert!(t <= prev + 1e-12);
                prev = t;
            }
            // A: monotone within its binding range A² <= V·J
            let (v, j) = (5.0, 10.0);
            let mut prev = f64::INFINITY;
            for a in [1.0, 2.0, 4.0, 6.0, (v * j).sqrt()] {
                let t = move_duration(d, &MotionProfile::new(v, a, j).unwrap()).unwrap();
                assert!(t <= prev + 1e-12, "d={d} A={a}");
                prev = t;
            }
        }
    }
}
