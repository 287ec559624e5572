//! Small dense complex matrices as `Vec<Vec<Complex64>>`.

use num_complex::Complex64;

pub type CMat = Vec<Vec<Complex64>>;

pub fn identity(n: usize) -> CMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).collect())
        .collect()
}

pub fn mul(a: &CMat, b: &CMat) -> CMat {
    let (n, m, p) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    let mut c = vec![vec![Complex64::new(0.0, 0.0); p]; n];
    for i in 0..n {
        for k in 0..m {
            let x = a[i][k];
            for j in 0..p {
                c[i][j] += x * b[k][j];
            }
        }
    }
    c
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
pub fn inverse(a: &CMat) -> Option<CMat> {
    let n = a.len();
    let mut m: CMat = a.clone();
    let mut inv = identity(n);
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].norm().total_cmp(&m[j][c].norm()))?;
        if m[p][c].norm() == 0.0 {
            return None;
        }
        m.swap(c, p);
        inv.swap(c, p);
        let d = m[c][c].inv();
        for j in 0..n {
            m[c][j] *= d;
            inv[c][j] *= d;
        }
        for i in 0..n {
            if i != c {
                let f = m[i][c];
                if f.norm() != 0.0 {
                    for j in 0..n {
                        let (mc, ic) = (m[c][j], inv[c][j]);
                        m[i][j] -= f * mc;
                        inv[i][j] -= f * ic;
                    }
                }
            }
        }
    }
    Some(inv)
}

pub fn det(a: &CMat) -> Complex64 {
    let n = a.len();
    let mut m = a.clone();
    let mut d = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let Some(p) = (c..n).max_by(|&i, &j| m[i][c].norm().total_cmp(&m[j][c].norm())) else {
            return Complex64::new(0.0, 0.0);
        };
        if m[p][c].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != c {
            m.swap(c, p);
            d = -d;
        }
        d *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                let x = m[c][j];
                m[i][j] -= f * x;
            }
        }
    }
    d
}

/// Largest entrywise distance.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `max |a - b| / max(1, max |b|)`.
pub fn rel_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs_diff(a, b) / max_abs(b).max(1.0)
}
