//! Natural cubic-spline remeshing of the `(x, s)` profile.
//!
//! Knots sit at the cumulative meridian positions `x_{i+1} = x_i + a_i`.
//! Resampling places `n′` sections uniformly over `[x_1, x_n]`, keeping the
//! end sections and the total meridian length.

use crate::error::{Error, Result};
use crate::lattice::{validate, NeckpinchLattice};

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineFit {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots; zero at both ends.
    m: Vec<f64>,
}

pub fn fit_spline(x: &[f64], y: &[f64]) -> Result<SplineFit> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return Err(Error::InvalidInput(format!(
            "spline needs at least 3 matching knots, got {} x and {} y",
            n,
            y.len()
        )));
    }
    for i in 1..n {
        if !(x[i] > x[i - 1]) {
            return Err(Error::NonMonotoneKnots { index: i + 1 });
        }
    }
    // tridiagonal system for the interior second derivatives (Thomas algorithm)
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let k = n - 2;
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for j in 0..k {
        let i = j + 1;
        diag[j] = 2.0 * (h[i - 1] + h[i]);
        upper[j] = h[i];
        rhs[j] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    for j in 1..k {
        let w = h[j] / diag[j - 1];
        diag[j] -= w * upper[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    let mut m = vec![0.0; n];
    for j in (0..k).rev() {
        let next = if j + 1 < k { m[j + 2] } else { 0.0 };
        m[j + 1] = (rhs[j] - upper[j] * next) / diag[j];
    }
    Ok(SplineFit {
        x: x.to_vec(),
        y: y.to_vec(),
        m,
    })
}

impl SplineFit {
    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn second_derivatives(&self) -> &[f64] {
        &self.m
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xk| xk <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    /// Value at `t`, extrapolating cubically outside `[x_1, x_n]`.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let b = (t - self.x[i]) / h;
        let a = 1.0 - b;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let b = (t - self.x[i]) / h;
        let a = 1.0 - b;
        (self.y[i + 1] - self.y[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let b = (t - self.x[i]) / h;
        (1.0 - b) * self.m[i] + b * self.m[i + 1]
    }
}

/// Spline of the lattice profile `s(x)` over its meridian knots.
pub fn profile_spline(lattice: &NeckpinchLattice) -> Result<SplineFit> {
    fit_spline(&lattice.knots(), lattice.s())
}

/// Refits the profile onto `n_new` uniformly spaced sections.
pub fn resample(lattice: &NeckpinchLattice, n_new: usize) -> Result<NeckpinchLattice> {
    if n_new < 3 {
        return Err(Error::InvalidInput(format!("resample needs n' >= 3, got {n_new}")));
    }
    let spline = profile_spline(lattice)?;
    let x = lattice.knots();
    let length = x[x.len() - 1];
    let step = length / (n_new as f64 - 1.0);
    let s: Vec<f64> = (0..n_new)
        .map(|k| match k {
            0 => lattice.s()[0],
            k if k == n_new - 1 => lattice.s()[lattice.n() - 1],
            k => spline.eval(k as f64 * step),
        })
        .collect();
    let out = NeckpinchLattice::with_ends(s, vec![step; n_new - 1], lattice.ends(), lattice.label())?;
    let report = validate(&out);
    if !report.all_realizable() {
        let gap = report.unrealizable_gaps()[0];
        return Err(Error::Realizability {
            gap,
            a_sq: step * step,
            bound: f64::NAN,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::EndTreatment;
    use approx::assert_relative_eq;

    #[test]
    fn reproduces_lines() {
        let x = [0.0, 0.7, 1.5, 2.0, 3.1];
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 0.5 * v).collect();
        let sp = fit_spline(&x, &y).unwrap();
        for &m in sp.second_derivatives() {
            assert!(m.abs() < 1e-14);
        }
        for t in [0.1, 1.0, 2.9] {
            assert_relative_eq!(sp.eval(t), 2.0 + 0.5 * t, epsilon = 1e-14);
        }
    }

    #[test]
    fn three_points() {
        let sp = fit_spline(&[0.0, 1.0, 2.0], &[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(sp.eval(1.0), 2.0);
        assert_eq!(sp.second_derivative(0.0), 0.0);
        assert_eq!(sp.second_derivative(2.0), 0.0);
        // m_1 = 6·(−1 − 1)/(2·2) = −3
        assert_relative_eq!(sp.second_derivatives()[1], -3.0, epsilon = 1e-15);
    }

    #[test]
    fn c2_continuity() {
        let x = [0.0, 1.0, 2.5, 3.0, 4.2, 5.0];
        let y = [1.0, 3.0, 2.0, 2.5, 0.5, 1.0];
        let sp = fit_spline(&x, &y).unwrap();
        for &k in &x[1..5] {
            let d = 1e-7;
            assert_relative_eq!(sp.derivative(k - d), sp.derivative(k + d), epsilon = 1e-5);
            assert_relative_eq!(
                sp.second_derivative(k - 1e-12),
                sp.second_derivative(k + 1e-12),
                epsilon = 1e-8
            );
        }
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(sp.eval(*xi), *yi);
        }
    }

    #[test]
    fn rejects_bad_knots() {
        assert_eq!(
            fit_spline(&[0.0, 1.0, 1.0], &[0.0, 0.0, 0.0]).unwrap_err(),
            Error::NonMonotoneKnots { index: 3 }
        );
    }

    #[test]
    fn uniform_cylinder_is_a_fixed_point() {
        let l = NeckpinchLattice::new(vec![10.0; 9], vec![1.0; 8], EndTreatment::Cap, "").unwrap();
        let r = resample(&l, 9).unwrap();
        for (p, q) in l.s().iter().zip(r.s()) {
            assert!((p - q).abs() < 1e-12);
        }
        for (p, q) in l.a().iter().zip(r.a()) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn refinement_keeps_shared_knots() {
        let s: Vec<f64> = (0..11).map(|i| 5.0 + (i as f64 * 0.3).sin()).collect();
        let l = NeckpinchLattice::new(s.clone(), vec![1.0; 10], EndTreatment::Cap, "").unwrap();
        let r = resample(&l, 21).unwrap();
        for i in 0..11 {
            assert_relative_eq!(r.s()[2 * i], s[i], epsilon = 1e-12);
        }
        assert_relative_eq!(r.meridian_length(), 10.0, max_relative = 1e-12);
    }
}
