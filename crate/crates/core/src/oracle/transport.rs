//! Parallel transport `ψ′ = −A(z) z^{−k} ψ` along polylines, by the
//! Dormand–Prince 5(4) pair with adaptive steps.

use num_complex::Complex64;
use serde::Serialize;

use super::cmat::{self, CMat};
use crate::connection::MeromorphicSystem;
use crate::error::OracleError;

pub const MIN_TOL: f64 = 1e-13;

/// A polyline in `ℂ` that keeps at least `min_distance` away from the pole
/// at `z = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    waypoints: Vec<Complex64>,
    min_distance: f64,
}

impl PathSpec {
    pub fn new(waypoints: Vec<Complex64>, min_distance: f64) -> Result<Self, OracleError> {
        if waypoints.is_empty() {
            return Err(OracleError::OutOfRange("path without waypoints".into()));
        }
        if !(min_distance > 0.0) {
            return Err(OracleError::OutOfRange(format!("min_distance {min_distance}")));
        }
        for w in waypoints.windows(2) {
            let d = segment_distance(w[0], w[1]);
            if d < min_distance {
                return Err(OracleError::PathTooClose { distance: d, min: min_distance });
            }
        }
        if waypoints.len() == 1 && waypoints[0].norm() < min_distance {
            return Err(OracleError::PathTooClose { distance: waypoints[0].norm(), min: min_distance });
        }
        Ok(PathSpec { waypoints, min_distance })
    }

    /// Straight segment with `min_distance` 1e-3.
    pub fn segment(a: Complex64, b: Complex64) -> Result<Self, OracleError> {
        Self::new(vec![a, b], 1e-3)
    }

    /// `"1,0;2,0"`: waypoints as `re,im` pairs separated by `;`.
    pub fn parse(text: &str, min_distance: f64) -> Result<Self, OracleError> {
        let mut pts = Vec::new();
        for p in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let xy: Vec<&str> = p.split(',').map(str::trim).collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| OracleError::OutOfRange(format!("waypoint {p:?}")));
            let z = match xy.as_slice() {
                [x] => Complex64::new(num(x)?, 0.0),
                [x, y] => Complex64::new(num(x)?, num(y)?),
                _ => return Err(OracleError::OutOfRange(format!("waypoint {p:?}"))),
            };
            pts.push(z);
        }
        Self::new(pts, min_distance)
    }

    pub fn waypoints(&self) -> &[Complex64] {
        &self.waypoints
    }

    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    /// This path followed by `next`, which must start where this one ends.
    pub fn then(&self, next: &PathSpec) -> Result<Self, OracleError> {
        let end = *self.waypoints.last().expect("nonempty");
        if (next.waypoints[0] - end).norm() > 1e-14 * end.norm().max(1.0) {
            return Err(OracleError::OutOfRange("paths are not composable".into()));
        }
        let mut w = self.waypoints.clone();
        w.extend_from_slice(&next.waypoints[1..]);
        Self::new(w, self.min_distance.min(next.min_distance))
    }
}

/// Distance from 0 to the segment `[a, b]`.
fn segment_distance(a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return a.norm();
    }
    let t = (-(a.conj() * d).re / l2).clamp(0.0, 1.0);
    (a + d * t).norm()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportResult {
    #[serde(serialize_with = "ser_cmat")]
    pub matrix: CMat,
    pub error_estimate: f64,
    pub steps: usize,
}

fn ser_cmat<S: serde::Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        let r: Vec<[f64; 2]> = row.iter().map(|c| [c.re, c.im]).collect();
        seq.serialize_element(&r)?;
    }
    seq.end()
}

/// `z ↦ −A(z) z^{−k}` evaluated from the system's series (principal branch
/// of `z^{1/r}` for ramified systems).
struct Field<'a> {
    sys: &'a MeromorphicSystem,
    k: i32,
    r: u32,
}

impl Field<'_> {
    fn at(&self, z: Complex64) -> CMat {
        let w = if self.r == 1 { z } else { z.powf(1.0 / self.r as f64) };
        let a = self.sys.matrix().eval_numeric(&[w]);
        let f = -z.powi(-self.k);
        a.into_iter().map(|row| row.into_iter().map(|x| x * f).collect()).collect()
    }
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn axpy(y: &CMat, terms: &[(f64, &CMat)], h: Complex64) -> CMat {
    let mut out = y.clone();
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for (orow, krow) in out.iter_mut().zip(k.iter()) {
            for (o, x) in orow.iter_mut().zip(krow) {
                *o += h * *c * x;
            }
        }
    }
    out
}

/// One segment `a → b`, starting from the identity.
fn segment(f: &Field, a: Complex64, b: Complex64, tol: f64) -> Result<(CMat, f64, usize), OracleError> {
    let n = f.sys.rank();
    let mut y = cmat::identity(n);
    let d = b - a;
    if d.norm() == 0.0 {
        return Ok((y, 0.0, 0));
    }
    // τ ∈ [0, 1], dy/dτ = d·F(a + τd)·y
    let rhs = |tau: f64, y: &CMat| -> CMat {
        let m = f.at(a + d * tau);
        let p = cmat::mul(&m, y);
        p.into_iter().map(|row| row.into_iter().map(|x| x * d).collect()).collect()
    };
    let mut tau = 0.0f64;
    let mut h = 0.01f64;
    let mut err_total = 0.0f64;
    let mut steps = 0usize;
    while tau < 1.0 {
        if tau + h > 1.0 {
            h = 1.0 - tau;
        }
        let hc = Complex64::new(h, 0.0);
        let mut k: Vec<CMat> = Vec::with_capacity(7);
        for s in 0..7 {
            let terms: Vec<(f64, &CMat)> = (0..s).map(|j| (A[s][j], &k[j])).collect();
            let ys = axpy(&y, &terms, hc);
            k.push(rhs(tau + C[s] * h, &ys));
        }
        let y5 = axpy(&y, &B5.iter().zip(&k).map(|(c, x)| (*c, x)).collect::<Vec<_>>(), hc);
        let y4 = axpy(&y, &B4.iter().zip(&k).map(|(c, x)| (*c, x)).collect::<Vec<_>>(), hc);
        let scale = 1.0 + cmat::max_abs(&y5);
        let err = cmat::max_abs_diff(&y5, &y4) / scale;
        if err <= tol {
            tau += h;
            y = y5;
            err_total += err * scale;
            steps += 1;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if h < 1e-14 {
            return Err(OracleError::StepUnderflow(format!("{}", a + d * tau)));
        }
    }
    Ok((y, err_total, steps))
}

/// Fundamental matrix from the path's start to its end, with the local
/// error of every accepted step at most `tol`.
pub fn transport(sys: &MeromorphicSystem, path: &PathSpec, tol: f64) -> Result<TransportResult, OracleError> {
    if !(tol >= MIN_TOL) {
        return Err(OracleError::ToleranceUnachievable(tol));
    }
    let f = Field { sys, k: sys.pole_order() as i32, r: sys.ramification() };
    let mut m = cmat::identity(sys.rank());
    let mut err = 0.0;
    let mut steps = 0;
    for w in path.waypoints.windows(2) {
        let (seg, e, s) = segment(&f, w[0], w[1], tol)?;
        m = cmat::mul(&seg, &m);
        err += e;
        steps += s;
    }
    Ok(TransportResult { matrix: m, error_estimate: err, steps })
}
