//! Degree-4 truncated Taylor series ("jets") in one variable.
//!
//! Used to turn the support-function parameterization of a boundary curve
//! into the local graph over the tangent line at a point: compose the
//! height series with the inverse of the abscissa series and read off the
//! graph derivatives. Everything is exact arithmetic on the first five
//! Taylor coefficients, so no finite differencing enters the boundary
//! regularity gauges.

pub const JET_LEN: usize = 5;

/// Taylor coefficients c[i] = f^(i)(0) / i! for i = 0..4.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub c: [f64; JET_LEN],
}

impl Jet {
    pub fn new(c: [f64; JET_LEN]) -> Self {
        Jet { c }
    }

    /// Jet from raw derivative values f(0), f'(0), ..., f''''(0).
    pub fn from_derivatives(d: [f64; JET_LEN]) -> Self {
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        let mut c = [0.0; JET_LEN];
        for i in 0..JET_LEN {
            c[i] = d[i] / fact[i];
        }
        Jet { c }
    }

    /// Derivative values f^(i)(0) back from the coefficients.
    pub fn derivatives(&self) -> [f64; JET_LEN] {
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        let mut d = [0.0; JET_LEN];
        for i in 0..JET_LEN {
            d[i] = self.c[i] * fact[i];
        }
        d
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for i in 0..JET_LEN {
            for j in 0..JET_LEN - i {
                c[i + j] += self.c[i] * other.c[j];
            }
        }
        Jet { c }
    }

    /// Composition self(other(s)); requires other(0) = 0.
    pub fn compose(&self, inner: &Jet) -> Jet {
        assert!(
            inner.c[0] == 0.0,
            "jet composition requires a zero constant term"
        );
        // Horner on truncated series: p = c4; p = p*inner + c3; ...
        let mut p = Jet::new([self.c[4], 0.0, 0.0, 0.0, 0.0]);
        for k in (0..4).rev() {
            p = p.mul(inner);
            p.c[0] += self.c[k];
        }
        p
    }

    /// Compositional inverse of a series with u(0) = 0, u'(0) != 0:
    /// returns s with u(s(x)) = x + O(x^5).
    pub fn invert(&self) -> Jet {
        assert!(self.c[0] == 0.0, "series reversion requires u(0) = 0");
        assert!(
            self.c[1] != 0.0,
            "series reversion requires a nonzero linear term"
        );
        let mut s = Jet::new([0.0, 1.0 / self.c[1], 0.0, 0.0, 0.0]);
        // Fix coefficients order by order: the k-th coefficient of u(s)
        // depends linearly on s_k with factor u'(0).
        for k in 2..JET_LEN {
            let comp = self.compose(&s);
            s.c[k] -= comp.c[k] / self.c[1];
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn multiplication_truncates_correctly() {
        // (1 + x)^2 = 1 + 2x + x^2
        let a = Jet::new([1.0, 1.0, 0.0, 0.0, 0.0]);
        let b = a.mul(&a);
        assert_eq!(b.c, [1.0, 2.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn circle_graph_derivatives() {
        // Circle of radius R: abscissa R sin s, height R (1 - cos s).
        // Graph over the tangent: phi(x) = x^2/(2R) + x^4/(8R^3) + ...
        let r = 2.5;
        let xi = Jet::from_derivatives([0.0, r, 0.0, -r, 0.0]);
        let eta = Jet::from_derivatives([0.0, 0.0, r, 0.0, -r]);
        let phi = eta.compose(&xi.invert());
        let d = phi.derivatives();
        assert_relative_eq!(d[2], 1.0 / r, max_relative = 1e-14);
        assert!(d[3].abs() < 1e-14);
        assert_relative_eq!(d[4], 3.0 / (r * r * r), max_relative = 1e-13);
    }

    proptest! {
        #[test]
        fn reversion_roundtrip(c1 in 0.2f64..5.0, c2 in -1.0f64..1.0,
                               c3 in -1.0f64..1.0, c4 in -1.0f64..1.0) {
            let u = Jet::new([0.0, c1, c2, c3, c4]);
            let s = u.invert();
            let id = u.compose(&s);
            prop_assert!((id.c[0]).abs() < 1e-12);
            prop_assert!((id.c[1] - 1.0).abs() < 1e-10);
            for k in 2..JET_LEN {
                prop_assert!(id.c[k].abs() < 1e-9, "coefficient {} = {}", k, id.c[k]);
            }
        }
    }
}
