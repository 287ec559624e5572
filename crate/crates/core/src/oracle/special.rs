//! Airy functions and the exponential integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::OracleError;

/// `Ai(0)`.
pub const AI0: f64 = 0.355_028_053_887_817_2;
/// `-Ai′(0)`.
pub const AI1: f64 = 0.258_819_403_792_806_8;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const AIRY_MAX: f64 = 8.0;
const AIRY_TERMS: usize = 240;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryValues {
    pub ai: Complex64,
    pub ai_prime: Complex64,
    pub bi: Complex64,
    pub bi_prime: Complex64,
}

// Ai(0), -Ai′(0) and √3 to 64 digits
const AI0_DIGITS: &str = "3550280538878172392600631860041831763979791741991772405833265103";
const AI1_DIGITS: &str = "2588194037928067984051835601892039634790911383549345822100018139";
const SQRT3_DIGITS: &str = "17320508075688772935274463415058723669428052538103806280558069795";

/// Fixed-point scale: values are integers times `2^-FRAC`. Working far above
/// f64 precision keeps `Ai` accurate where it is exponentially small and
/// `f`, `g` cancel.
const FRAC: u32 = 320;

type Fixed = (BigInt, BigInt);

fn fx_mul(a: &Fixed, b: &Fixed) -> Fixed {
    let re = (&a.0 * &b.0 - &a.1 * &b.1) >> FRAC;
    let im = (&a.0 * &b.1 + &a.1 * &b.0) >> FRAC;
    (re, im)
}

fn fx_add(a: &Fixed, b: &Fixed) -> Fixed {
    (&a.0 + &b.0, &a.1 + &b.1)
}

fn fx_sub(a: &Fixed, b: &Fixed) -> Fixed {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn fx_real(r: &BigRational) -> Fixed {
    let scaled = r * BigRational::from_integer(BigInt::one() << FRAC);
    (scaled.round().to_integer(), BigInt::zero())
}

fn fx_from_f64(x: f64) -> BigInt {
    let r = BigRational::from_float(x).expect("finite");
    fx_real(&r).0
}

fn fx_digits(d: &str, int_digits: u32) -> Fixed {
    let n: BigInt = d.parse().expect("digits");
    let den = num_traits::pow(BigInt::from(10), (d.len() as u32 - int_digits) as usize);
    fx_real(&BigRational::new(n, den))
}

fn fx_to_c64(a: &Fixed) -> Complex64 {
    let den = BigRational::from_integer(BigInt::one() << FRAC);
    let f = |v: &BigInt| (BigRational::from_integer(v.clone()) / &den).to_f64().unwrap_or(f64::NAN);
    Complex64::new(f(&a.0), f(&a.1))
}

struct AiryTable {
    f: Vec<Fixed>,
    g: Vec<Fixed>,
    ai0: Fixed,
    ai1: Fixed,
    sqrt3: Fixed,
}

/// Maclaurin coefficients of the solutions `f = 1 + x³/6 + …` and
/// `g = x + x⁴/12 + …` of `y″ = x y`, from `(n+2)(n+1) a_{n+2} = a_{n-1}`,
/// stored as `a_n·8ⁿ` so that tiny coefficients keep their digits.
fn airy_table() -> &'static AiryTable {
    static T: std::sync::OnceLock<AiryTable> = std::sync::OnceLock::new();
    T.get_or_init(|| {
        let series = |a0: i64, a1: i64| {
            let mut a = vec![BigRational::zero(); AIRY_TERMS];
            a[0] = BigRational::from_integer(a0.into());
            a[1] = BigRational::from_integer(a1.into());
            for n in 1..AIRY_TERMS - 2 {
                let d = BigRational::from_integer((((n + 2) * (n + 1)) as i64).into());
                a[n + 2] = &a[n - 1] / d;
            }
            let scale = BigRational::from_integer(BigInt::from(AIRY_MAX as i64));
            let mut p = BigRational::one();
            a.iter()
                .map(|c| {
                    let v = fx_real(&(c * &p));
                    p = &p * &scale;
                    v
                })
                .collect::<Vec<Fixed>>()
        };
        AiryTable {
            f: series(1, 0),
            g: series(0, 1),
            ai0: fx_digits(AI0_DIGITS, 0),
            ai1: fx_digits(AI1_DIGITS, 0),
            sqrt3: fx_digits(SQRT3_DIGITS, 1),
        }
    })
}

/// `(Ai, Ai′, Bi, Bi′)` at `x` for `|x| <= 8`.
pub fn airy_values(x: Complex64) -> Result<AiryValues, OracleError> {
    if !(x.norm() <= AIRY_MAX) {
        return Err(OracleError::OutOfRange(format!("|x| = {} > {AIRY_MAX}", x.norm())));
    }
    let t = airy_table();
    let y = x / AIRY_MAX;
    let xf: Fixed = (fx_from_f64(y.re), fx_from_f64(y.im));
    let zero: Fixed = (BigInt::zero(), BigInt::zero());
    let eval = |c: &[Fixed]| {
        let mut v = zero.clone();
        let mut d = zero.clone();
        for cn in c.iter().rev() {
            d = fx_add(&fx_mul(&d, &xf), &v);
            v = fx_add(&fx_mul(&v, &xf), cn);
        }
        (v, d)
    };
    let (f, fp) = eval(&t.f);
    let (g, gp) = eval(&t.g);
    let ai = |f: &Fixed, g: &Fixed| fx_sub(&fx_mul(f, &t.ai0), &fx_mul(g, &t.ai1));
    let bi = |f: &Fixed, g: &Fixed| fx_mul(&fx_add(&fx_mul(f, &t.ai0), &fx_mul(g, &t.ai1)), &t.sqrt3);
    Ok(AiryValues {
        ai: fx_to_c64(&ai(&f, &g)),
        ai_prime: fx_to_c64(&ai(&fp, &gp)) / AIRY_MAX,
        bi: fx_to_c64(&bi(&f, &g)),
        bi_prime: fx_to_c64(&bi(&fp, &gp)) / AIRY_MAX,
    })
}

/// `Ai Bi′ − Bi Ai′`, equal to `1/π`.
pub fn airy_wronskian(x: Complex64) -> Result<Complex64, OracleError> {
    let v = airy_values(x)?;
    Ok(v.ai * v.bi_prime - v.bi * v.ai_prime)
}

/// Exponential integral `Ei(x) = γ + log x + Σ xⁿ/(n·n!)` on the sheet
/// `log x + 2πi·sheet`, with `log` the principal branch.
pub fn expint_ei(x: Complex64, sheet: i32) -> Result<Complex64, OracleError> {
    if x.norm() == 0.0 {
        return Err(OracleError::ZeroArgument);
    }
    let shift = Complex64::new(0.0, 2.0 * PI * sheet as f64);
    let r = x.norm();
    let near_positive = x.arg().abs() <= PI / 6.0;
    let principal = if r <= 4.0 || (near_positive && r <= 40.0) {
        ei_series(x)
    } else if near_positive {
        ei_asymptotic(x)
    } else {
        // Ei(x) = -E1(-x) ± iπ off the real axis
        let s = if x.im > 0.0 {
            PI
        } else if x.im < 0.0 {
            -PI
        } else {
            0.0
        };
        -e1_cf(-x)? + Complex64::new(0.0, s)
    };
    Ok(principal + shift)
}

fn ei_series(x: Complex64) -> Complex64 {
    let mut sum = Complex64::zero();
    let mut term = Complex64::one();
    for n in 1..500 {
        term = term * x / n as f64;
        let t = term / n as f64;
        sum += t;
        if t.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum + EULER_GAMMA + x.ln()
}

fn ei_asymptotic(x: Complex64) -> Complex64 {
    let mut sum = Complex64::one();
    let mut term = Complex64::one();
    for k in 1..200 {
        let next = term * k as f64 / x;
        if next.norm() >= term.norm() {
            break;
        }
        term = next;
        sum += term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    let s = if x.im > 0.0 {
        PI
    } else if x.im < 0.0 {
        -PI
    } else {
        0.0
    };
    // Ei(x) ~ eˣ/x · Σ k!/xᵏ; the ±iπ jump is exponentially small against eˣ
    x.exp() / x * sum + Complex64::new(0.0, s)
}

/// `E1(w)` by the modified Lentz continued fraction, `|arg w| < π`.
fn e1_cf(w: Complex64) -> Result<Complex64, OracleError> {
    let tiny = 1e-300;
    let mut b = w + 1.0;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..100_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = (d * an + b).inv();
        c = b + c.inv() * an;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            return Ok(h * (-w).exp());
        }
    }
    Err(OracleError::Evaluator(format!("E1 continued fraction did not converge at {w}")))
}

/// `ρ(z, μ) = e^{(zμ−1)/z} (Ei((1−zμ)/z) − Ei(1/z))`, the off-diagonal entry
/// of the Euler groupoid representation in `(z, μ)`.
pub fn euler_rho(z: Complex64, mu: Complex64) -> Result<Complex64, OracleError> {
    if z.norm() == 0.0 {
        return Err(OracleError::ZeroArgument);
    }
    let a = (Complex64::one() - z * mu) / z;
    let b = z.inv();
    // same sheet at μ = 0, tracked along the segment μ ∈ [0, μ]
    let sheet = crossings(b, a);
    Ok((-a).exp() * (expint_ei(a, sheet)? - expint_ei(b, 0)?))
}

/// Net number of times the straight segment from `a` to `b` crosses the
/// negative real axis downward (counts a branch-cut crossing of `log`).
fn crossings(a: Complex64, b: Complex64) -> i32 {
    if a.im.signum() == b.im.signum() || a.im == 0.0 && b.im == 0.0 {
        return 0;
    }
    let t = a.im / (a.im - b.im);
    let re = a.re + t * (b.re - a.re);
    if re >= 0.0 {
        return 0;
    }
    // crossing from the upper to the lower half plane continues log past π
    if a.im > 0.0 {
        1
    } else {
        -1
    }
}
