use super::{Epoch, KeplerElements, StateVector};
use crate::error::{Error, Result};
use crate::math::{lit, to_f64, Mat3, Real, Vec3};

pub const MAX_KEPLER_ITERATIONS: usize = 50;

/// Solves `E - e sin E = M` for the eccentric anomaly by Newton iteration.
///
/// `mean_anomaly` may be any real; the returned `E` corresponds to `M`
/// reduced to [0, 2π).
pub fn solve_kepler<T: Real>(mean_anomaly: T, eccentricity: T) -> Result<T> {
    let two_pi = lit::<T>(2.0) * T::PI();
    let mut m = mean_anomaly % two_pi;
    if m < T::zero() {
        m += two_pi;
    }
    let e = eccentricity;
    let tol = lit::<T>(1e-12).max(T::epsilon() * lit::<T>(8.0) * (T::one() + m));
    let mut ecc_anom = if e < lit(0.8) { m + e * m.sin() } else { T::PI() };
    for _ in 0..MAX_KEPLER_ITERATIONS {
        let (s, c) = ecc_anom.sin_cos();
        let residual = ecc_anom - e * s - m;
        if residual.abs() < tol {
            return Ok(ecc_anom);
        }
        ecc_anom -= residual / (T::one() - e * c);
    }
    let residual = ecc_anom - e * ecc_anom.sin() - m;
    if residual.abs() < tol {
        return Ok(ecc_anom);
    }
    Err(Error::KeplerDivergence {
        iterations: MAX_KEPLER_ITERATIONS,
        eccentricity: to_f64(e),
        mean_anomaly: to_f64(m),
    })
}

/// Two-body state at `epoch` for elements defined at the scenario start,
/// expressed in the central body's inertial frame.
pub fn propagate_kepler<T: Real>(elements: &KeplerElements<T>, epoch: &Epoch<T>) -> Result<StateVector<T>> {
    elements.validate()?;
    let e = elements.eccentricity;
    let a = elements.semi_major_axis;
    let mu = elements.central_body.mu::<T>();
    let root = (T::one() - e * e).sqrt();

    let nu0 = elements.true_anomaly_deg.to_radians();
    let ecc0 = (root * nu0.sin()).atan2(e + nu0.cos());
    let mean0 = ecc0 - e * ecc0.sin();
    let mean = mean0 + elements.mean_motion() * epoch.seconds_since_start;

    let ecc = solve_kepler(mean, e)?;
    let (se, ce) = ecc.sin_cos();
    let nu = (root * se).atan2(ce - e);
    let r = a * (T::one() - e * ce);
    let p = a * root * root;
    let (sn, cn) = nu.sin_cos();

    let pos_pf = Vec3::new(r * cn, r * sn, T::zero());
    let vel_pf = Vec3::new(-sn, e + cn, T::zero()) * (mu / p).sqrt();

    let rot = perifocal_to_inertial(elements);
    Ok(StateVector::unchecked(
        rot * pos_pf,
        rot * vel_pf,
        elements.central_body.inertial_frame(),
        *epoch,
    ))
}

fn perifocal_to_inertial<T: Real>(el: &KeplerElements<T>) -> Mat3<T> {
    Mat3::rot_z(el.raan_deg.to_radians())
        * Mat3::rot_x(el.inclination_deg.to_radians())
        * Mat3::rot_z(el.arg_periapsis_deg.to_radians())
}

/// Specific orbital energy `v²/2 - μ/r`.
pub fn specific_energy<T: Real>(state: &StateVector<T>, mu: T) -> T {
    state.velocity.norm_squared() / lit(2.0) - mu / state.position.norm()
}

/// Specific angular momentum vector `r × v`.
pub fn angular_momentum<T: Real>(state: &StateVector<T>) -> Vec3<T> {
    state.position.cross(&state.velocity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CentralBody, Frame, EARTH_MU_KM3_S2, MOON_MU_KM3_S2};
    use proptest::prelude::*;

    #[test]
    fn circular_geo_on_x_axis() {
        let el = KeplerElements::<f64>::circular(42_164.17, 0.0, 0.0, 0.0, CentralBody::Earth).unwrap();
        let s = propagate_kepler(&el, &Epoch::at(0.0)).unwrap();
        assert_eq!(s.frame, Frame::EarthCenteredInertial);
        assert!((s.position - Vec3::new(42_164.17, 0.0, 0.0)).norm() < 1e-9);
        // sqrt(mu / a) evaluated independently: 3.074660085810545 km/s
        assert!((s.speed() - 3.074_660_085_810_545).abs() < 1e-12);
        assert!((s.speed() - 3.0747).abs() < 1e-4);
    }

    #[test]
    fn llo_period_hand_value() {
        let el = KeplerElements::circular(1837.4, 84.0, 0.0, 0.0, CentralBody::Moon).unwrap();
        let hand = 2.0 * std::f64::consts::PI * (1837.4_f64.powi(3) / MOON_MU_KM3_S2).sqrt();
        assert!((el.period() - hand).abs() < 1e-9);
        assert!((el.period() - 7067.46).abs() < 0.01);
    }

    #[test]
    fn full_period_returns_to_start() {
        let el = KeplerElements::new(9000.0, 0.3, 51.6, 120.0, 45.0, 10.0, CentralBody::Earth).unwrap();
        let s0 = propagate_kepler(&el, &Epoch::at(0.0)).unwrap();
        let s1 = propagate_kepler(&el, &Epoch::at(el.period())).unwrap();
        assert!((s0.position - s1.position).norm() < 1e-6);
        assert!((s0.velocity - s1.velocity).norm() < 1e-9);
    }

    #[test]
    fn true_anomaly_respected_at_epoch() {
        let el = KeplerElements::<f64>::new(10000.0, 0.2, 0.0, 0.0, 0.0, 90.0, CentralBody::Earth).unwrap();
        let s = propagate_kepler(&el, &Epoch::at(0.0)).unwrap();
        // at nu = 90 deg the radius equals the semi-latus rectum
        let p = 10000.0 * (1.0 - 0.04);
        assert!((s.position.norm() - p).abs() < 1e-8);
        assert!(s.position.x.abs() < 1e-8 && s.position.y > 0.0);
    }

    #[test]
    fn conservation_over_a_day() {
        let el = KeplerElements::new(26_600.0, 0.74, 63.4, 30.0, 270.0, 0.0, CentralBody::Earth).unwrap();
        let s0 = propagate_kepler(&el, &Epoch::at(0.0)).unwrap();
        let e0 = specific_energy(&s0, EARTH_MU_KM3_S2);
        let h0 = angular_momentum(&s0);
        for k in 1..=1440 {
            let s = propagate_kepler(&el, &Epoch::at(60.0 * k as f64)).unwrap();
            let e = specific_energy(&s, EARTH_MU_KM3_S2);
            assert!(((e - e0) / e0).abs() < 1e-9);
            assert!((angular_momentum(&s) - h0).norm() / h0.norm() < 1e-9);
        }
    }

    #[test]
    fn single_precision_propagation() {
        let el = KeplerElements::<f32>::circular(42_164.17, 0.0, 0.0, 90.0, CentralBody::Earth).unwrap();
        let s = propagate_kepler(&el, &Epoch::at(0.0f32)).unwrap();
        assert!((s.position.y - 42_164.17).abs() < 0.05);
    }

    proptest! {
        #[test]
        fn kepler_residual_small(e in 0.0f64..=0.9, m in 0.0f64..(2.0 * std::f64::consts::PI)) {
            let ecc = solve_kepler(m, e).unwrap();
            prop_assert!((ecc - e * ecc.sin() - m).abs() < 1e-12);
        }
    }
}
