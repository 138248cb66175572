//! Exact arithmetic in the quadratic extension Q(r) with r = sqrt(q(1-q))
//! for rational q. The centered-edge factors (X_e - q)/r live here, so
//! basis inner products and truncation coefficients can be checked as exact
//! identities instead of float comparisons.

use num::rational::BigRational;
use num::{One, Signed, Zero};

/// a + b r with r^2 = rr; rr is carried by the arithmetic context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExt {
    pub a: BigRational,
    pub b: BigRational,
}

/// Arithmetic context: the rational q and rr = q(1-q).
#[derive(Clone, Debug)]
pub struct QCtx {
    q: BigRational,
    rr: BigRational,
}

impl QCtx {
    pub fn new(q: BigRational) -> QCtx {
        assert!(
            q.is_positive() && q < BigRational::one(),
            "q must lie in (0,1)"
        );
        let rr = &q * (BigRational::one() - &q);
        QCtx { q, rr }
    }

    pub fn from_ratio(num: i64, den: i64) -> QCtx {
        QCtx::new(BigRational::new(num.into(), den.into()))
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    /// r^2 = q(1-q).
    pub fn rr(&self) -> &BigRational {
        &self.rr
    }

    pub fn mul(&self, x: &QExt, y: &QExt) -> QExt {
        QExt {
            a: &x.a * &y.a + &x.b * &y.b * &self.rr,
            b: &x.a * &y.b + &x.b * &y.a,
        }
    }

    /// The centered-edge factor (x - q)/r for x in {0,1}:
    /// present: (1-q)/r = r/q; absent: -q/r = -r/(1-q).
    pub fn edge_factor(&self, present: bool) -> QExt {
        let b = if present {
            self.q.recip()
        } else {
            -(BigRational::one() - &self.q).recip()
        };
        QExt {
            a: BigRational::zero(),
            b,
        }
    }

    /// sqrt(q/(1-q)) = r/(1-q).
    pub fn sqrt_q_over_1mq(&self) -> QExt {
        QExt {
            a: BigRational::zero(),
            b: (BigRational::one() - &self.q).recip(),
        }
    }

    pub fn pow(&self, x: &QExt, mut k: u32) -> QExt {
        let mut acc = QExt::one();
        let mut base = x.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn to_f64(&self, x: &QExt) -> f64 {
        let r = rational_to_f64(&self.rr).sqrt();
        rational_to_f64(&x.a) + rational_to_f64(&x.b) * r
    }
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num::ToPrimitive;
    x.to_f64().expect("rational out of f64 range")
}

impl QExt {
    pub fn zero() -> QExt {
        QExt {
            a: BigRational::zero(),
            b: BigRational::zero(),
        }
    }

    pub fn one() -> QExt {
        QExt {
            a: BigRational::one(),
            b: BigRational::zero(),
        }
    }

    pub fn from_rational(a: BigRational) -> QExt {
        QExt {
            a,
            b: BigRational::zero(),
        }
    }

    pub fn add(&self, other: &QExt) -> QExt {
        QExt {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
        }
    }

    pub fn sub(&self, other: &QExt) -> QExt {
        QExt {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
        }
    }

    pub fn neg(&self) -> QExt {
        QExt {
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> QExt {
        QExt {
            a: &self.a * c,
            b: &self.b * c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_identities() {
        let ctx = QCtx::from_ratio(3, 10);
        // r * r = q(1-q) = 21/100
        let r = QExt {
            a: BigRational::zero(),
            b: BigRational::one(),
        };
        let r2 = ctx.mul(&r, &r);
        assert_eq!(r2.a, BigRational::new(21.into(), 100.into()));
        assert!(r2.b.is_zero());
        // edge factors multiply to -1: ((1-q)/r)(-q/r) = -q(1-q)/rr = -1
        let prod = ctx.mul(&ctx.edge_factor(true), &ctx.edge_factor(false));
        assert_eq!(prod, QExt::from_rational(-BigRational::one()));
        // float embedding agrees
        let x = ctx.edge_factor(true);
        let expect = (1.0 - 0.3) / (0.3f64 * 0.7).sqrt();
        assert!((ctx.to_f64(&x) - expect).abs() < 1e-14);
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let ctx = QCtx::from_ratio(1, 4);
        let x = ctx.edge_factor(false);
        let mut acc = QExt::one();
        for k in 0..6 {
            assert_eq!(ctx.pow(&x, k), acc);
            acc = ctx.mul(&acc, &x);
        }
    }
}
