use std::f64::consts::TAU;

use nalgebra::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{bail, Result};
use crate::scalar::{self, Real};

pub const DEFAULT_RHO_SCHEDULE: [f64; 3] = [0.9, 0.99, 0.999];

/// Upper limit on torus grid points used for the total Hardy mass.
pub const TORUS_BUDGET: usize = 1 << 16;

const TORUS_CHUNK: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoReport<T> {
    pub rho: T,
    /// Holomorphic coefficient mass `sum_k>=1 |C_{k e_j}|^2 rho^{2k}` per axis disc.
    pub per_disc_mass: Vec<T>,
    /// Mass at negative frequencies per disc; zero for holomorphic input up to rounding.
    pub negative_mass: Vec<T>,
    pub total_mass: T,
    pub slack: T,
    /// `p R^2 - sum_j per_disc_mass_j`.
    pub deficiency: T,
    pub chain_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum CertificateStatus {
    Certified,
    Failed { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardyCertificate<T> {
    pub p: usize,
    #[serde(rename = "R")]
    pub r: T,
    pub per_disc_mass: Vec<T>,
    pub total_mass: T,
    pub samples: usize,
    /// Points per axis of the torus grid behind `total_mass`.
    pub torus_points: usize,
    pub rho_schedule: Vec<T>,
    /// `1/sqrt(p)`, an upper bound for the squeezing function once certified.
    pub conclusion: T,
    pub slack: T,
    /// `|F(phi(0))|`; the argument assumes 0.
    pub origin_offset: T,
    pub status: CertificateStatus,
    pub reports: Vec<RhoReport<T>>,
    /// Hypotheses taken on trust from the caller.
    pub assumed: Vec<String>,
}

impl<T> HardyCertificate<T> {
    pub fn is_certified(&self) -> bool {
        self.status == CertificateStatus::Certified
    }
}

fn unit_root<T: Real>(k: usize, n: usize, rho: T) -> Complex<T> {
    let a = TAU * k as f64 / n as f64;
    Complex::new(rho * T::lit(a.cos()), rho * T::lit(a.sin()))
}

/// Numerical certificate for `s_D(z) <= 1/sqrt(p)` from an embedding `f`
/// into the unit ball and a polydisc map `phi` with `phi(0) = z`.
///
/// Axis masses come from an FFT of `f(phi(rho w e_j))` on `samples`
/// equispaced circle points; the total mass is the mean of `|f(phi)|^2`
/// over a torus grid. The chain
/// `p R^2 (1 - slack) <= sum_j mass_j <= total + slack <= 1 + slack`,
/// together with `mass_j >= R^2 (1 - slack)`, is checked at the largest
/// radius, with `slack = (1 - rho^2) + 10 / samples`.
pub fn hardy_certificate<T, F, P>(
    f: F,
    phi: P,
    p: usize,
    r: T,
    samples: usize,
    rho_schedule: &[T],
) -> Result<HardyCertificate<T>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Vec<Complex<T>> + Sync,
    P: Fn(&[Complex<T>]) -> Vec<Complex<T>> + Sync,
{
    if p == 0 {
        bail!(Argument, "need at least one disc");
    }
    if samples < 2 || !samples.is_power_of_two() {
        bail!(Argument, "sample count must be a power of two >= 2, got {samples}");
    }
    if !(r.is_finite() && r > T::zero()) {
        bail!(Argument, "inner radius must be positive, got {r}");
    }
    if rho_schedule.is_empty() || rho_schedule.iter().any(|x| !(*x > T::zero() && *x < T::one())) {
        bail!(Argument, "radius schedule must be nonempty with values in (0, 1)");
    }
    let mut schedule = rho_schedule.to_vec();
    schedule.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    let mut torus = 1usize;
    while torus * 2 <= samples && (torus * 2).checked_pow(p as u32).map_or(false, |v| v <= TORUS_BUDGET) {
        torus *= 2;
    }
    if torus < 2 {
        bail!(Unsupported, "torus quadrature over {p} discs exceeds {TORUS_BUDGET} points");
    }

    let g = |zeta: &[Complex<T>]| f(&phi(zeta));
    let origin = g(&vec![scalar::czero(); p]);
    let origin_offset = scalar::euclid(&origin);
    let n_out = origin.len();
    let fft = FftPlanner::<T>::new().plan_fft_forward(samples);
    let inv_n = T::one() / T::from_usize(samples).expect("fits");

    let mut reports = Vec::with_capacity(schedule.len());
    for &rho in &schedule {
        let discs: Vec<(T, T)> = (0..p)
            .into_par_iter()
            .map(|j| {
                let values: Vec<Vec<Complex<T>>> = (0..samples)
                    .map(|m| {
                        let mut zeta = vec![scalar::czero(); p];
                        zeta[j] = unit_root(m, samples, rho);
                        g(&zeta)
                    })
                    .collect();
                let (mut pos, mut neg) = (T::zero(), T::zero());
                let mut buf = vec![scalar::czero(); samples];
                for i in 0..n_out {
                    for (b, v) in buf.iter_mut().zip(&values) {
                        *b = v.get(i).copied().unwrap_or_else(scalar::czero);
                    }
                    fft.process(&mut buf);
                    for (k, x) in buf.iter().enumerate() {
                        let m = scalar::abs2(*x * inv_n);
                        if k == 0 {
                            continue;
                        } else if k < samples / 2 {
                            pos += m;
                        } else {
                            neg += m;
                        }
                    }
                }
                (pos, neg)
            })
            .collect();
        let total_points = torus.pow(p as u32);
        let partial: Vec<T> = (0..total_points.div_ceil(TORUS_CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut acc = T::zero();
                let mut zeta = vec![scalar::czero(); p];
                for idx in c * TORUS_CHUNK..((c + 1) * TORUS_CHUNK).min(total_points) {
                    let mut rest = idx;
                    for z in zeta.iter_mut() {
                        *z = unit_root(rest % torus, torus, rho);
                        rest /= torus;
                    }
                    acc += scalar::norm2(&g(&zeta));
                }
                acc
            })
            .collect();
        let total_mass = partial.into_iter().fold(T::zero(), |a, b| a + b) / T::from_usize(total_points).expect("fits");

        let slack = (T::one() - rho * rho) + T::lit(10.0) / T::from_usize(samples).expect("fits");
        let per_disc_mass: Vec<T> = discs.iter().map(|d| d.0).collect();
        let negative_mass: Vec<T> = discs.iter().map(|d| d.1).collect();
        let sum = per_disc_mass.iter().fold(T::zero(), |a, b| a + *b);
        let pr2 = T::from_usize(p).expect("fits") * r * r;
        let chain_holds = pr2 * (T::one() - slack) <= sum
            && sum <= total_mass + slack
            && total_mass <= T::one() + slack
            && per_disc_mass.iter().all(|m| *m >= r * r * (T::one() - slack));
        reports.push(RhoReport { rho, per_disc_mass, negative_mass, total_mass, slack, deficiency: pr2 - sum, chain_holds });
    }

    let last = reports.last().expect("schedule is nonempty").clone();
    let status = if last.chain_holds {
        CertificateStatus::Certified
    } else {
        let sum = last.per_disc_mass.iter().fold(T::zero(), |a, b| a + *b);
        CertificateStatus::Failed {
            reason: format!(
                "chain violated at rho = {}: pR^2 = {}, axis mass = {sum}, total = {}, slack = {}",
                last.rho,
                T::from_usize(p).expect("fits") * r * r,
                last.total_mass,
                last.slack
            ),
        }
    };
    Ok(HardyCertificate {
        p,
        r,
        per_disc_mass: last.per_disc_mass,
        total_mass: last.total_mass,
        samples,
        torus_points: torus,
        rho_schedule: schedule,
        conclusion: T::one() / T::from_usize(p).expect("fits").sqrt(),
        slack: last.slack,
        origin_offset,
        status,
        reports,
        assumed: vec![
            "F is injective holomorphic into the unit ball with F(phi(0)) = 0".into(),
            "the ball of radius R is contained in F(D)".into(),
            "axis discs cluster only on the boundary of D".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn polydisc_reference(samples: usize) -> HardyCertificate<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        hardy_certificate(
            |x: &[C]| x.iter().map(|v| v * h).collect(),
            |z: &[C]| z.to_vec(),
            2,
            h,
            samples,
            &DEFAULT_RHO_SCHEDULE,
        )
        .unwrap()
    }

    #[test]
    fn polydisc_masses() {
        let c = polydisc_reference(1024);
        assert!(c.is_certified());
        for m in &c.per_disc_mass {
            assert!((m - 0.999f64.powi(2) / 2.0).abs() < 1e-13);
        }
        assert!((c.total_mass - 0.999f64.powi(2)).abs() < 1e-13);
        assert!((c.conclusion - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(c.torus_points, 256);
        for w in c.reports.windows(2) {
            assert!(w[1].slack < w[0].slack);
        }
    }

    #[test]
    fn ball_single_disc() {
        let c = hardy_certificate(
            |x: &[C]| x.to_vec(),
            |z: &[C]| vec![z[0], C::new(0.0, 0.0)],
            1,
            1.0,
            256,
            &DEFAULT_RHO_SCHEDULE,
        )
        .unwrap();
        assert!(c.is_certified());
        assert!((c.per_disc_mass[0] - 0.998001).abs() < 1e-12);
    }

    #[test]
    fn oversized_radius_fails() {
        let c = hardy_certificate(|x: &[C]| x.to_vec(), |z: &[C]| z.to_vec(), 2, 0.9, 1024, &[0.999]).unwrap();
        assert!(!c.is_certified());
    }

    #[test]
    fn rejects_bad_samples() {
        let r = hardy_certificate(|x: &[C]| x.to_vec(), |z: &[C]| z.to_vec(), 1, 1.0, 1000, &[0.9]);
        assert!(matches!(r, Err(crate::Error::Argument(_))));
    }

    #[test]
    fn nonholomorphic_mass_is_reported() {
        let c = hardy_certificate(
            |x: &[C]| x.iter().map(|v| v.conj() * 0.5).collect(),
            |z: &[C]| z.to_vec(),
            1,
            0.5,
            64,
            &[0.9],
        )
        .unwrap();
        assert!(c.per_disc_mass[0] < 1e-20);
        assert!((c.reports[0].negative_mass[0] - 0.25 * 0.81).abs() < 1e-12);
        assert!(!c.is_certified());
    }
}
