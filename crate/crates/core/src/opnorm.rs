//! Induced operator norms on weighted p-norm spaces.
//!
//! Exact values come from the column/row formulas (`p = 1`, `p = ∞`), from
//! the product `‖u‖ ‖ψ‖_*` for rank one, and from the blockwise formula for
//! operators with a weighted conditional expectation form. For `p = 2` the
//! remaining cases use the largest eigenvalue of `W⁻¹ Tᵀ W T`, bracketed by
//! counting roots of its real-rooted characteristic polynomial with
//! Descartes' rule. Other exponents get a certified enclosure.

use std::cmp::Ordering;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Result;
use crate::lattice::{AtomicSpace, Exponent, Vector};
use crate::linalg;
use crate::norm::{norm_value, ExactOrBounded, Side};
use crate::operator::Operator;
use crate::rational::{int, pow_enclosure, root_enclosure, Enclosure, Rational};
use crate::wce::{decompose_wce, wce_operator_norm, Decomposition};

/// Norm of `t` viewed on `space` (which must have the operator's dimension).
pub fn operator_norm(space: &AtomicSpace, t: &Operator) -> Result<ExactOrBounded> {
    let t = t.with_space(space.clone())?;
    let n = t.dim();
    let w = space.weights();
    if t.is_zero() {
        return Ok(ExactOrBounded::Exact(Rational::zero()));
    }
    match space.exponent() {
        Exponent::One => {
            let best = (0..n)
                .map(|j| {
                    let col: Rational = (0..n).map(|i| &w[i] * t.entry(i, j).abs()).sum();
                    col / &w[j]
                })
                .max()
                .expect("n >= 1");
            return Ok(ExactOrBounded::Exact(best));
        }
        Exponent::Infinity => {
            let best = (0..n)
                .map(|i| {
                    let row: Rational = (0..n).map(|j| t.entry(i, j).abs() / &w[j]).sum();
                    &w[i] * row
                })
                .max()
                .expect("n >= 1");
            return Ok(ExactOrBounded::Exact(best));
        }
        _ => {}
    }
    if let Some((u, psi)) = t.rank_one_factors() {
        let value = norm_value(space, &u, Side::Primal)?.mul(&norm_value(space, &psi, Side::Dual)?);
        return Ok(value.simplify());
    }
    if let Decomposition::Form(form) = decompose_wce(&t)? {
        return wce_operator_norm(&form);
    }
    match space.exponent() {
        Exponent::Two => Ok(spectral_norm(&t)),
        Exponent::General(p) => general_bounds(space, &t, p),
        _ => unreachable!(),
    }
}

/// Number of roots strictly greater than `x` of a polynomial with only real
/// roots (ascending coefficients): sign changes of `c(λ + x)`.
fn roots_above(coeffs: &[Rational], x: &Rational) -> usize {
    // Taylor shift by repeated synthetic division.
    let mut c = coeffs.to_vec();
    let d = c.len();
    for i in 0..d {
        for j in (i..d - 1).rev() {
            let add = &c[j + 1] * x;
            c[j] += add;
        }
    }
    let signs: Vec<bool> = c.iter().filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn eval(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// The rational with the smallest denominator in `[lo, hi]` (`0 <= lo <= hi`).
fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    if fl == *lo || fl.clone() + int(1) <= *hi {
        return if fl == *lo { fl } else { fl + int(1) };
    }
    // lo and hi share the integer part; recurse on reciprocals of the
    // fractional parts.
    let a = fl.clone();
    let (l, h) = (lo - &a, hi - &a);
    a + simplest_between(&h.recip(), &l.recip()).recip()
}

fn spectral_norm(t: &Operator) -> ExactOrBounded {
    let n = t.dim();
    let w = t.space().weights();
    // W⁻¹ Tᵀ W T, similar to a symmetric PSD matrix.
    let mut wt = t.entries().clone();
    for (i, row) in wt.iter_mut().enumerate() {
        for x in row.iter_mut() {
            *x *= &w[i];
        }
    }
    let mut a = linalg::matmul(&linalg::transpose(t.entries(), n), &wt);
    for (i, row) in a.iter_mut().enumerate() {
        for x in row.iter_mut() {
            *x /= &w[i];
        }
    }
    let coeffs = linalg::charpoly(&a);
    let trace: Rational = (0..n).map(|i| a[i][i].clone()).sum();
    let mut lo = Rational::zero();
    let mut hi = trace;
    let target = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(40));
    let mut step = 0;
    while &hi - &lo > target {
        if step % 8 == 0 {
            let r = simplest_between(&lo, &hi);
            if r > lo && eval(&coeffs, &r).is_zero() && roots_above(&coeffs, &r) == 0 {
                return ExactOrBounded::Square(r).simplify();
            }
        }
        let mid = (&lo + &hi) / int(2);
        if roots_above(&coeffs, &mid) == 0 {
            hi = mid;
        } else {
            lo = mid;
        }
        step += 1;
    }
    ExactOrBounded::Bounded(Enclosure {
        lo: root_enclosure(&lo, 2, 140).lo,
        hi: root_enclosure(&hi, 2, 140).hi,
    })
}

fn ratio_lower_bound(space: &AtomicSpace, t: &Operator, x: &Vector) -> Result<Option<Rational>> {
    if x.is_zero() {
        return Ok(None);
    }
    let num = norm_value(space, &t.apply(x)?, Side::Primal)?.enclosure(128);
    let den = norm_value(space, x, Side::Primal)?.enclosure(128);
    Ok(Some(num.lo / den.hi))
}

/// Lower bound from candidate maximizers refined by a few steps of the
/// p-norm power iteration (run in floating point, evaluated exactly);
/// upper bound from Riesz-Thorin between the weighted 1-norm and the
/// unweighted sup norm of the underlying measure space.
fn general_bounds(space: &AtomicSpace, t: &Operator, p: &Rational) -> Result<ExactOrBounded> {
    let n = t.dim();
    let mut candidates: Vec<Vector> = (0..n).map(|i| Vector::basis(n, i)).collect();
    if n <= 10 {
        for mask in 0..(1u32 << (n - 1)) {
            candidates.push(Vector(
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { int(-1) } else { int(1) })
                    .collect(),
            ));
        }
    }
    let mut best = Rational::zero();
    let mut best_x = candidates[0].clone();
    for x in &candidates {
        if let Some(r) = ratio_lower_bound(space, t, x)? {
            if r > best {
                best = r;
                best_x = x.clone();
            }
        }
    }
    let pf = p.to_f64().unwrap_or(2.0);
    let qf = pf / (pf - 1.0);
    let wf: Vec<f64> = space.weights().iter().map(|w| w.to_f64().unwrap_or(1.0)).collect();
    let tf: Vec<Vec<f64>> = t
        .entries()
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect())
        .collect();
    let mut x: Vec<f64> = best_x.iter().map(|v| v.to_f64().unwrap_or(0.0)).collect();
    for _ in 0..30 {
        // y = T x; z = W |y|^(p-1) sign(y); x = |Tᵀ z / W|^(q-1) sign
        let y: Vec<f64> = tf.iter().map(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        let z: Vec<f64> = y
            .iter()
            .zip(&wf)
            .map(|(v, w)| w * v.abs().powf(pf - 1.0) * v.signum())
            .collect();
        let s: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| tf[i][j] * z[i]).sum::<f64>() / wf[j])
            .collect();
        let next: Vec<f64> = s.iter().map(|v| v.abs().powf(qf - 1.0) * v.signum()).collect();
        let scale = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(scale.is_finite() && scale > 0.0) {
            break;
        }
        x = next.iter().map(|v| v / scale).collect();
    }
    let approx = Vector(
        x.iter()
            .map(|v| Rational::new(((v * 1e6).round() as i64).into(), 1_000_000.into()))
            .collect(),
    );
    if let Some(r) = ratio_lower_bound(space, t, &approx)? {
        if r > best {
            best = r;
        }
    }

    let w = space.weights();
    let l1: Rational = (0..n)
        .map(|j| (0..n).map(|i| &w[i] * t.entry(i, j).abs()).sum::<Rational>() / &w[j])
        .max()
        .expect("n >= 1");
    let linf: Rational = (0..n)
        .map(|i| (0..n).map(|j| t.entry(i, j).abs()).sum::<Rational>())
        .max()
        .expect("n >= 1");
    let a = p.numer().to_u32().expect("small exponent");
    let b = p.denom().to_u32().expect("small exponent");
    // ‖T‖ <= ‖T‖_1^(1/p) ‖T‖_∞^(1 - 1/p)
    let upper = pow_enclosure(&Enclosure::point(l1), b, a, 128)
        .mul_nonneg(&pow_enclosure(&Enclosure::point(linf), a - b, a, 128))
        .hi;
    let hi = if upper < best { best.clone() } else { upper };
    Ok(match best.cmp(&hi) {
        Ordering::Equal => ExactOrBounded::Exact(best),
        _ => ExactOrBounded::Bounded(Enclosure { lo: best, hi }),
    })
}
