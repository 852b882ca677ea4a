#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use zariski::{rat, validate_configuration, CurveConfiguration, Divisor, Matrix, Rational};

/// Coefficients `[c_0, …, c_n]` of `det(λI − A)` by Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &Matrix) -> Vec<Rational> {
    let n = a.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.mul(&m).unwrap();
        for i in 0..n {
            let v = next.get(i, i) + &coeffs[n - k + 1];
            next.set(i, i, v);
        }
        let am = a.mul(&next).unwrap();
        let trace: Rational = (0..n).map(|i| am.get(i, i).clone()).sum();
        coeffs[n - k] = -trace / rat(k as i64);
        m = next;
    }
    coeffs
}

fn sign_changes(coeffs: impl Iterator<Item = Rational>) -> usize {
    let signs: Vec<bool> = coeffs
        .filter(|c| !c.is_zero())
        .map(|c| c.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `(n₊, n₀, n₋)` from the characteristic polynomial. All roots of a real
/// symmetric matrix's polynomial are real, so Descartes' counts are exact.
pub fn descartes_inertia(a: &Matrix) -> (usize, usize, usize) {
    let p = characteristic_polynomial(a);
    let zeros = p.iter().take_while(|c| c.is_zero()).count();
    let positive = sign_changes(p.iter().cloned());
    let negative =
        sign_changes(
            p.iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() }),
        );
    (positive, zeros, negative)
}

pub fn config_from(m: Matrix) -> CurveConfiguration {
    let names = (1..=m.rows()).map(|i| format!("C{i}")).collect();
    validate_configuration(names, m).expect("valid configuration")
}

pub fn small_rational<R: Rng>(
    rng: &mut R,
    num: std::ops::RangeInclusive<i64>,
    max_den: i64,
) -> Rational {
    Rational::new(rng.gen_range(num).into(), rng.gen_range(1..=max_den).into())
}

/// Symmetric, arbitrary-sign rational matrix.
pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = if rng.gen_bool(0.2) {
                Rational::zero()
            } else {
                small_rational(rng, -5..=5, 3)
            };
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    // Rank-deficient cases: duplicate a row/column now and then.
    if n >= 2 && rng.gen_bool(0.2) {
        let (a, b) = (0, n - 1);
        for k in 0..n {
            let v = m.get(a, k).clone();
            m.set(b, k, v.clone());
            m.set(k, b, v);
        }
        let v = m.get(a, a).clone();
        m.set(b, b, v);
    }
    m
}

/// Scales `S` to `Λ S Λ` for a positive diagonal `Λ` and permutes it.
pub fn disguise<R: Rng>(rng: &mut R, s: &Matrix) -> Matrix {
    let n = s.rows();
    let scale: Vec<Rational> = (0..n).map(|_| small_rational(rng, 1..=3, 2)).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut out = Matrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let (i, j) = (perm[a], perm[b]);
            out.set(a, b, s.get(i, j) * &scale[i] * &scale[j]);
        }
    }
    out
}

/// Negated weighted Laplacian of a random connected graph: negative
/// semidefinite with a one-dimensional kernel.
pub fn negative_laplacian<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let mut w = Matrix::zeros(n, n);
    for j in 1..n {
        let i = rng.gen_range(0..j);
        let v = rat(rng.gen_range(1..=3));
        w.set(i, j, v.clone());
        w.set(j, i, v);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if w.get(i, j).is_zero() && rng.gen_bool(0.3) {
                let v = rat(rng.gen_range(1..=2));
                w.set(i, j, v.clone());
                w.set(j, i, v);
            }
        }
    }
    let mut s = w.clone();
    for i in 0..n {
        let degree: Rational = (0..n).map(|j| w.get(i, j).clone()).sum();
        s.set(i, i, -degree);
    }
    s
}

/// Connected configuration with nonnegative off-diagonal entries. Mixes
/// definite, semidefinite-singular and indefinite matrices.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let s = match rng.gen_range(0..4) {
        0 => negative_laplacian(rng, n),
        1 => {
            // Negative Laplacian pushed slightly definite or indefinite.
            let mut s = negative_laplacian(rng, n);
            let i = rng.gen_range(0..n);
            let shift =
                if rng.gen_bool(0.5) { rat(1) } else { rat(-1) } * small_rational(rng, 1..=1, 4);
            let v = s.get(i, i) + shift;
            s.set(i, i, v);
            s
        }
        _ => {
            let mut s = Matrix::zeros(n, n);
            for j in 1..n {
                let i = rng.gen_range(0..j);
                let v = small_rational(rng, 1..=2, 2);
                s.set(i, j, v.clone());
                s.set(j, i, v);
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    if s.get(i, j).is_zero() && rng.gen_bool(0.2) {
                        let v = rat(1);
                        s.set(i, j, v.clone());
                        s.set(j, i, v);
                    }
                }
                s.set(i, i, small_rational(rng, -6..=1, 2));
            }
            s
        }
    };
    disguise(rng, &s)
}

pub fn is_strict_subdivisor(q: &Divisor, p: &Divisor) -> bool {
    zariski::leq_divisor(q, p).unwrap() && q != p
}
