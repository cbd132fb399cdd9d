//! Short Weierstrass elliptic curves over finite fields: chord-and-tangent
//! group law, exhaustive point counting, twist classification, and the model
//! curve `y^2 = x^3 + k/4` with its degree-3 endomorphism `psi`.
//!
//! `psi` squares to multiplication by -3 and has kernel `{O, +-T}` for the
//! 3-torsion point `T = (0, sqrt(k)/2)`. Its x-coordinate action descends to
//! the projective map `Psi_k`, which after cubing realizes the Hessian map on
//! j-invariants.

use std::collections::HashSet;

use thiserror::Error;

use crate::field::{factor_u128, FiniteField, Fp2, PrimeField, QuadExtField};
use crate::projmaps::ProjPoint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("singular curve: the discriminant vanishes")]
    SingularCurve,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("parameter must be nonzero")]
    ZeroParameter,
    #[error("field of size {0} exceeds the exhaustive-counting bound 10^8")]
    FieldTooLarge(u128),
    #[error("curve has odd order, no rational two-torsion point")]
    OddOrder,
}

/// A point of a short Weierstrass curve: affine pair or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint<E> {
    Affine(E, E),
    Infinity,
}

impl<E: Copy> CurvePoint<E> {
    pub fn x(&self) -> Option<E> {
        match self {
            CurvePoint::Affine(x, _) => Some(*x),
            CurvePoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }
}

/// The curve `y^2 = x^3 + A x + B` with nonzero discriminant
/// `-16 (4A^3 + 27B^2)`.
#[derive(Debug, Clone)]
pub struct WeierstrassCurve<F: FiniteField> {
    field: F,
    a: F::Elem,
    b: F::Elem,
}

impl<F: FiniteField> WeierstrassCurve<F> {
    pub fn new(field: F, a: F::Elem, b: F::Elem) -> Result<Self, CurveError> {
        let c = WeierstrassCurve { field, a, b };
        if c.field.is_zero(c.discriminant()) {
            return Err(CurveError::SingularCurve);
        }
        Ok(c)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn a(&self) -> F::Elem {
        self.a
    }

    pub fn b(&self) -> F::Elem {
        self.b
    }

    pub fn discriminant(&self) -> F::Elem {
        let f = &self.field;
        let four_a3 = f.mul(f.from_i64(4), f.cube(self.a));
        let t27_b2 = f.mul(f.from_i64(27), f.square(self.b));
        f.mul(f.from_i64(-16), f.add(four_a3, t27_b2))
    }

    /// `j = -1728 (4A)^3 / Delta`.
    pub fn j_invariant(&self) -> F::Elem {
        let f = &self.field;
        let num = f.mul(f.from_i64(-1728), f.cube(f.mul(f.from_i64(4), self.a)));
        f.div(num, self.discriminant()).expect("nonsingular curve")
    }

    pub fn contains(&self, p: CurvePoint<F::Elem>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => {
                let f = &self.field;
                f.square(y) == f.add(f.cube(x), f.add(f.mul(self.a, x), self.b))
            }
        }
    }

    pub fn negate(&self, p: CurvePoint<F::Elem>) -> CurvePoint<F::Elem> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x, self.field.neg(y)),
        }
    }

    /// Group law with the usual slope formulas. Rejects points off the curve.
    pub fn add(
        &self,
        p: CurvePoint<F::Elem>,
        q: CurvePoint<F::Elem>,
    ) -> Result<CurvePoint<F::Elem>, CurveError> {
        if !self.contains(p) || !self.contains(q) {
            return Err(CurveError::PointNotOnCurve);
        }
        Ok(self.add_raw(p, q))
    }

    pub(crate) fn add_raw(
        &self,
        p: CurvePoint<F::Elem>,
        q: CurvePoint<F::Elem>,
    ) -> CurvePoint<F::Elem> {
        let f = &self.field;
        let (x1, y1) = match p {
            CurvePoint::Infinity => return q,
            CurvePoint::Affine(x, y) => (x, y),
        };
        let (x2, y2) = match q {
            CurvePoint::Infinity => return p,
            CurvePoint::Affine(x, y) => (x, y),
        };
        let slope = if x1 == x2 {
            if y1 != y2 || f.is_zero(y1) {
                return CurvePoint::Infinity;
            }
            // tangent: (3x^2 + A) / 2y
            let num = f.add(f.mul(f.from_i64(3), f.square(x1)), self.a);
            f.div(num, f.mul(f.from_i64(2), y1)).expect("y1 nonzero")
        } else {
            f.div(f.sub(y2, y1), f.sub(x2, x1)).expect("x2 != x1")
        };
        let x3 = f.sub(f.sub(f.square(slope), x1), x2);
        let y3 = f.sub(f.mul(slope, f.sub(x1, x3)), y1);
        CurvePoint::Affine(x3, y3)
    }

    /// `[m] P` by double-and-add; negative m through the inverse point.
    pub fn scalar_mul(
        &self,
        m: i128,
        p: CurvePoint<F::Elem>,
    ) -> Result<CurvePoint<F::Elem>, CurveError> {
        if !self.contains(p) {
            return Err(CurveError::PointNotOnCurve);
        }
        Ok(self.scalar_mul_raw(m, p))
    }

    pub(crate) fn scalar_mul_raw(
        &self,
        m: i128,
        p: CurvePoint<F::Elem>,
    ) -> CurvePoint<F::Elem> {
        let (mut n, mut base) = if m < 0 {
            (m.unsigned_abs(), self.negate(p))
        } else {
            (m as u128, p)
        };
        let mut acc = CurvePoint::Infinity;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add_raw(acc, base);
            }
            base = self.add_raw(base, base);
            n >>= 1;
        }
        acc
    }

    /// `|E(F_q)|` by summing quadratic characters of `x^3 + Ax + B`.
    pub fn count_points(&self) -> Result<u128, CurveError> {
        let f = &self.field;
        let q = f.order();
        if q > 100_000_000 {
            return Err(CurveError::FieldTooLarge(q));
        }
        // mark squares once, then one lookup per x
        let mut is_sq = vec![false; q as usize];
        for z in f.elements() {
            is_sq[f.index(f.square(z))] = true;
        }
        let mut count: u128 = 1; // the point at infinity
        for x in f.elements() {
            let rhs = f.add(f.cube(x), f.add(f.mul(self.a, x), self.b));
            if f.is_zero(rhs) {
                count += 1;
            } else if is_sq[f.index(rhs)] {
                count += 2;
            }
        }
        Ok(count)
    }

    /// Frobenius trace `q + 1 - |E(F_q)|`.
    pub fn trace(&self) -> Result<i128, CurveError> {
        Ok(self.field.order() as i128 + 1 - self.count_points()? as i128)
    }

    /// Trace divisible by the characteristic.
    pub fn is_supersingular(&self) -> Result<bool, CurveError> {
        Ok(self.trace()?.rem_euclid(self.field.characteristic() as i128) == 0)
    }

    /// All affine points plus infinity, in canonical (x, y) order.
    pub fn points(&self) -> Result<Vec<CurvePoint<F::Elem>>, CurveError> {
        let f = &self.field;
        let q = f.order();
        if q > 100_000_000 {
            return Err(CurveError::FieldTooLarge(q));
        }
        let mut pts = Vec::new();
        for x in f.elements() {
            let rhs = f.add(f.cube(x), f.add(f.mul(self.a, x), self.b));
            if let Some(y) = f.sqrt(rhs) {
                pts.push(CurvePoint::Affine(x, y));
                if !f.is_zero(y) {
                    pts.push(CurvePoint::Affine(x, f.neg(y)));
                }
            }
        }
        pts.sort_unstable();
        pts.push(CurvePoint::Infinity);
        Ok(pts)
    }

    /// Order of a point, via the exhaustive group order.
    pub fn order_of(&self, p: CurvePoint<F::Elem>) -> Result<u128, CurveError> {
        if !self.contains(p) {
            return Err(CurveError::PointNotOnCurve);
        }
        let n = self.count_points()?;
        Ok(self.order_with(p, n, &factor_u128(n)))
    }

    /// Order of a point given the group order and its factorization.
    pub fn order_with(
        &self,
        p: CurvePoint<F::Elem>,
        group_order: u128,
        factors: &[(u128, u32)],
    ) -> u128 {
        debug_assert!(self.scalar_mul_raw(group_order as i128, p).is_infinity());
        let mut ord = group_order;
        for &(prime, mult) in factors {
            for _ in 0..mult {
                if ord.is_multiple_of(prime)
                    && self.scalar_mul_raw((ord / prime) as i128, p).is_infinity()
                {
                    ord /= prime;
                } else {
                    break;
                }
            }
        }
        ord
    }

    /// The twist by D, per the case split on the j-invariant:
    /// `(D^2 A, D^3 B)` generically, `(D A, 0)` at j = 1728, `(0, D B)` at j = 0.
    pub fn twist(&self, d: F::Elem) -> Result<WeierstrassCurve<F>, CurveError> {
        let f = &self.field;
        if f.is_zero(d) {
            return Err(CurveError::ZeroParameter);
        }
        let (a, b) = if f.is_zero(self.a) {
            (self.a, f.mul(d, self.b))
        } else if f.is_zero(self.b) {
            (f.mul(d, self.a), self.b)
        } else {
            (f.mul(f.square(d), self.a), f.mul(f.cube(d), self.b))
        };
        WeierstrassCurve::new(self.field.clone(), a, b)
    }

    /// F_q-isomorphism test between curves of equal j-invariant: a coset
    /// membership check in F_q*/(F_q*)^n with n = 2, 4, 6 by the j-case.
    pub fn is_isomorphic_to(&self, other: &WeierstrassCurve<F>) -> bool {
        let f = &self.field;
        if self.j_invariant() != other.j_invariant() {
            return false;
        }
        if f.is_zero(self.a) {
            // j = 0: B2/B1 must be a sixth power
            let r = f.div(other.b, self.b).expect("nonzero B at j = 0");
            f.is_nth_power(r, 6)
        } else if f.is_zero(self.b) {
            // j = 1728: A2/A1 must be a fourth power
            let r = f.div(other.a, self.a).expect("nonzero A at j = 1728");
            f.is_nth_power(r, 4)
        } else {
            // generic: the twist parameter relating them must be a square
            let d = f
                .div(f.mul(self.a, other.b), f.mul(other.a, self.b))
                .expect("nonzero coefficients");
            debug_assert_eq!(f.mul(f.square(d), self.a), other.a);
            f.is_nth_power(d, 2)
        }
    }
}

/// A representative curve with the given j-invariant.
pub fn curve_from_j<F: FiniteField>(field: &F, j: F::Elem) -> WeierstrassCurve<F> {
    let f = field;
    let curve = if f.is_zero(j) {
        WeierstrassCurve::new(f.clone(), f.zero(), f.one())
    } else if j == f.from_i64(1728) {
        WeierstrassCurve::new(f.clone(), f.one(), f.zero())
    } else {
        // y^2 = x^3 + 3cx + 2c with c = j/(1728 - j)
        let c = f.div(j, f.sub(f.from_i64(1728), j)).expect("j != 1728");
        WeierstrassCurve::new(f.clone(), f.mul(f.from_i64(3), c), f.mul(f.from_i64(2), c))
    };
    curve.expect("the standard model for a given j is nonsingular")
}

/// One twist class: the j-invariant, the exponent n of the classifying
/// quotient F_q*/(F_q*)^n, and the canonical coset representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistClass<E> {
    pub j: E,
    pub n: u8,
    pub rep: E,
}

/// n = 2 away from j in {0, 1728}, n = 4 at 1728, n = 6 at 0.
pub fn twist_exponent<F: FiniteField>(field: &F, j: F::Elem) -> u8 {
    if field.is_zero(j) {
        6
    } else if j == field.from_i64(1728) {
        4
    } else {
        2
    }
}

/// Canonical coset representatives of F_q*/(F_q*)^n for the twist exponent
/// of j: the smallest element of each coset, in increasing order.
pub fn twist_classes<F: FiniteField>(field: &F, j: F::Elem) -> Vec<TwistClass<F::Elem>> {
    let f = field;
    let n = twist_exponent(f, j);
    let mut reps = Vec::new();
    let mut covered: HashSet<F::Elem> = HashSet::new();
    let powers: Vec<F::Elem> = f
        .elements()
        .filter(|&z| !f.is_zero(z))
        .map(|z| f.pow(z, n as u128))
        .collect();
    for d in f.elements() {
        if f.is_zero(d) || covered.contains(&d) {
            continue;
        }
        reps.push(TwistClass { j, n, rep: d });
        for &s in &powers {
            covered.insert(f.mul(d, s));
        }
    }
    reps
}

/// One representative curve per twist class of j.
pub fn twist_class_curves<F: FiniteField>(
    field: &F,
    j: F::Elem,
) -> Vec<(TwistClass<F::Elem>, WeierstrassCurve<F>)> {
    let base = curve_from_j(field, j);
    twist_classes(field, j)
        .into_iter()
        .map(|cl| {
            let c = base.twist(cl.rep).expect("nonzero representative");
            (cl, c)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// the model curve
// ---------------------------------------------------------------------------

/// The model curve `E_k : y^2 = x^3 + k/4` over F_p, with its points taken in
/// the quadratic extension so that every x in F_p lifts. Caches the 3-torsion
/// point `T = (0, sqrt(k)/2)`, the canonical `sqrt(-3)`, and the group order
/// of `E_k(F_{p^2})` with its factorization.
#[derive(Debug, Clone)]
pub struct ModelCurve {
    base: PrimeField,
    ext: QuadExtField,
    k: u64,
    curve: WeierstrassCurve<QuadExtField>,
    torsion: CurvePoint<Fp2>,
    sqrt_minus_three: Fp2,
    ext_order: u128,
    ext_order_factors: Vec<(u128, u32)>,
}

impl ModelCurve {
    pub fn new(base: PrimeField, k: i64) -> Result<Self, CurveError> {
        let k = base.from_i64(k);
        Self::with_k(base, k)
    }

    pub fn with_k(base: PrimeField, k: u64) -> Result<Self, CurveError> {
        if k == 0 {
            return Err(CurveError::ZeroParameter);
        }
        let ext = QuadExtField::new(base);
        let quarter_k = ext.embed(base.div(k, 4).expect("4 is a unit"));
        let curve = WeierstrassCurve::new(ext, ext.zero(), quarter_k)?;
        let half_sqrt_k = ext
            .sqrt(ext.embed(k))
            .map(|r| ext.div(r, ext.from_i64(2)).expect("2 is a unit"))
            .expect("base elements are squares in the extension");
        let torsion = CurvePoint::Affine(ext.zero(), half_sqrt_k);
        let sqrt_minus_three = ext
            .sqrt(ext.from_i64(-3))
            .expect("base elements are squares in the extension");
        // |E(F_{p^2})| = (p + 1)^2 - t^2 for the base-field trace t
        let base_curve = WeierstrassCurve::new(base, 0, base.div(k, 4).unwrap())?;
        let t = base_curve.trace()?;
        let p1 = base.p() as i128 + 1;
        let ext_order = (p1 * p1 - t * t) as u128;
        let ext_order_factors = factor_u128(ext_order);
        Ok(ModelCurve {
            base,
            ext,
            k,
            curve,
            torsion,
            sqrt_minus_three,
            ext_order,
            ext_order_factors,
        })
    }

    /// The Hessian model: k = -6912, i.e. `y^2 = x^3 - 1728`.
    pub fn standard(base: PrimeField) -> Self {
        ModelCurve::new(base, -6912).expect("-6912 is a unit away from characteristic 2 and 3")
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    pub fn ext(&self) -> QuadExtField {
        self.ext
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn curve(&self) -> &WeierstrassCurve<QuadExtField> {
        &self.curve
    }

    /// The kernel generator `T = (0, sqrt(k)/2)` (canonical root).
    pub fn torsion_point(&self) -> CurvePoint<Fp2> {
        self.torsion
    }

    pub fn sqrt_minus_three(&self) -> Fp2 {
        self.sqrt_minus_three
    }

    /// `|E_k(F_{p^2})|`.
    pub fn ext_order(&self) -> u128 {
        self.ext_order
    }

    /// Whether both coordinates are rational, i.e. the point lies in E(F_p).
    pub fn in_base_curve(&self, p: CurvePoint<Fp2>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => x.is_rational() && y.is_rational(),
        }
    }

    /// The degree-3 endomorphism: `O` on the kernel `{O, +-T}`, otherwise
    /// `(-(x^3+k)/(3x^2), -y(x^3-2k)/(3 sqrt(-3) x^3))`.
    pub fn psi(&self, p: CurvePoint<Fp2>) -> Result<CurvePoint<Fp2>, CurveError> {
        if !self.curve.contains(p) {
            return Err(CurveError::PointNotOnCurve);
        }
        Ok(self.psi_raw(p))
    }

    pub(crate) fn psi_raw(&self, p: CurvePoint<Fp2>) -> CurvePoint<Fp2> {
        let f = &self.ext;
        let (x, y) = match p {
            CurvePoint::Infinity => return CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => (x, y),
        };
        if f.is_zero(x) {
            // exactly the points +-T
            return CurvePoint::Infinity;
        }
        let k = f.embed(self.k);
        let x3 = f.cube(x);
        let xr = f
            .div(f.neg(f.add(x3, k)), f.mul(f.from_i64(3), f.square(x)))
            .expect("x is nonzero");
        let num = f.mul(f.neg(y), f.sub(x3, f.mul(f.from_i64(2), k)));
        let den = f.mul(f.from_i64(3), f.mul(self.sqrt_minus_three, x3));
        let yr = f.div(num, den).expect("x is nonzero");
        CurvePoint::Affine(xr, yr)
    }

    /// The dual endomorphism, which equals `-psi`: the scaling
    /// `(x, y) -> (-3x, -3 sqrt(-3) y)` onto the curve with parameter -27k,
    /// followed by `(X, Y) -> ((X^3 - 27k)/(9X^2), Y(X^3 + 54k)/(27 X^3))`.
    pub fn psi_dual(&self, p: CurvePoint<Fp2>) -> Result<CurvePoint<Fp2>, CurveError> {
        if !self.curve.contains(p) {
            return Err(CurveError::PointNotOnCurve);
        }
        let f = &self.ext;
        let (x0, y0) = match p {
            CurvePoint::Infinity => return Ok(CurvePoint::Infinity),
            CurvePoint::Affine(x, y) => (x, y),
        };
        if f.is_zero(x0) {
            return Ok(CurvePoint::Infinity);
        }
        let x = f.mul(f.from_i64(-3), x0);
        let y = f.mul(f.mul(f.from_i64(-3), self.sqrt_minus_three), y0);
        let k27 = f.mul(f.from_i64(27), f.embed(self.k));
        let x3 = f.cube(x);
        let xr = f
            .div(f.sub(x3, k27), f.mul(f.from_i64(9), f.square(x)))
            .expect("x is nonzero");
        let num = f.mul(y, f.add(x3, f.mul(f.from_i64(2), k27)));
        let den = f.mul(f.from_i64(27), x3);
        let yr = f.div(num, den).expect("x is nonzero");
        Ok(CurvePoint::Affine(xr, yr))
    }

    /// Section of the x-projection: `[X:1]` lifts to `(X, sqrt(X^3 + k/4))`
    /// with the canonical root, `[1:0]` to `O`.
    pub fn iota(&self, pt: ProjPoint<u64>) -> CurvePoint<Fp2> {
        let f = &self.ext;
        match pt {
            ProjPoint::Infinity => CurvePoint::Infinity,
            ProjPoint::Finite(x) => {
                let xe = f.embed(x);
                let rhs = f.add(f.cube(xe), self.curve.b());
                let y = f.sqrt(rhs).expect("base elements are squares in the extension");
                CurvePoint::Affine(xe, y)
            }
        }
    }

    /// First-coordinate projection back to P^1(F_p). The x-coordinate must be
    /// rational, which holds on all of `iota(P^1)` and its psi-orbit.
    pub fn pi(&self, p: CurvePoint<Fp2>) -> ProjPoint<u64> {
        match p {
            CurvePoint::Infinity => ProjPoint::Infinity,
            CurvePoint::Affine(x, _) => {
                assert!(x.is_rational(), "pi applied to an irrational x-coordinate");
                ProjPoint::Finite(x.a)
            }
        }
    }

    /// The set of points with rational x-coordinate, closed under negation
    /// and under psi; sorted canonically with `O` last.
    pub fn s_set(&self) -> Vec<CurvePoint<Fp2>> {
        let f = &self.ext;
        let mut pts = Vec::with_capacity(2 * self.base.p() as usize);
        for x in 0..self.base.p() {
            let xe = f.embed(x);
            let rhs = f.add(f.cube(xe), self.curve.b());
            let y = f.sqrt(rhs).expect("base elements are squares in the extension");
            pts.push(CurvePoint::Affine(xe, y));
            if !f.is_zero(y) {
                pts.push(CurvePoint::Affine(xe, f.neg(y)));
            }
        }
        pts.sort_unstable();
        pts.push(CurvePoint::Infinity);
        pts
    }

    /// Number of psi-preimages of `p` inside the rational-x set, always
    /// 0, 1 or 3; 1 exactly on one side of the E(F_p) membership split.
    pub fn indegree_in_s(&self, p: CurvePoint<Fp2>) -> usize {
        self.s_set()
            .into_iter()
            .filter(|&q| self.psi_raw(q) == p)
            .count()
    }

    /// The scaling isomorphism `(x, y) -> (u^2 x, u^3 y)` onto the model
    /// curve with parameter `u^6 k`; commutes with psi.
    pub fn phi_u(
        &self,
        u: u64,
        p: CurvePoint<Fp2>,
    ) -> Result<(ModelCurve, CurvePoint<Fp2>), CurveError> {
        if u == 0 {
            return Err(CurveError::ZeroParameter);
        }
        if !self.curve.contains(p) {
            return Err(CurveError::PointNotOnCurve);
        }
        let f = &self.base;
        let u6k = f.mul(f.pow(u, 6), self.k);
        let target = ModelCurve::with_k(self.base, u6k)?;
        let e = &self.ext;
        let ue = e.embed(u);
        let q = match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => {
                CurvePoint::Affine(e.mul(e.square(ue), x), e.mul(e.cube(ue), y))
            }
        };
        debug_assert!(target.curve.contains(q));
        Ok((target, q))
    }

    /// Order of a point of `E_k(F_{p^2})`, using the cached group order.
    pub fn point_order(&self, p: CurvePoint<Fp2>) -> Result<u128, CurveError> {
        if !self.curve.contains(p) {
            return Err(CurveError::PointNotOnCurve);
        }
        Ok(self
            .curve
            .order_with(p, self.ext_order, &self.ext_order_factors))
    }

    /// A point is periodic under psi iff its order is coprime to 3.
    pub fn is_periodic(&self, p: CurvePoint<Fp2>) -> Result<bool, CurveError> {
        Ok(self.point_order(p)? % 3 != 0)
    }

    /// Number of psi-steps to reach a periodic point.
    pub fn depth(&self, p: CurvePoint<Fp2>) -> Result<usize, CurveError> {
        let mut cur = p;
        let mut d = 0usize;
        while !self.is_periodic(cur)? {
            cur = self.psi_raw(cur);
            d += 1;
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rejects_singular_curves() {
        let f = fp(5);
        assert!(matches!(
            WeierstrassCurve::new(f, 0, 0),
            Err(CurveError::SingularCurve)
        ));
        // 4a^3 + 27b^2 = 0 mod 5 for a = 3, b = 1: 108 + 27 = 135 = 0
        assert!(WeierstrassCurve::new(f, 3, 1).is_err());
    }

    #[test]
    fn group_law_axioms_exhaustive_small() {
        for (p, a, b) in [(5u64, 2u64, 1u64), (7, 1, 1), (11, 3, 4)] {
            let f = fp(p);
            let c = WeierstrassCurve::new(f, a, b).unwrap();
            let pts = c.points().unwrap();
            assert_eq!(pts.len() as u128, c.count_points().unwrap());
            for &p1 in &pts {
                assert_eq!(c.add(p1, CurvePoint::Infinity).unwrap(), p1);
                assert!(c.add(p1, c.negate(p1)).unwrap().is_infinity());
                for &p2 in &pts {
                    let s = c.add(p1, p2).unwrap();
                    assert!(c.contains(s));
                    assert_eq!(s, c.add(p2, p1).unwrap());
                }
            }
            // associativity on a sample, full triple loop is cubic
            for &p1 in pts.iter().take(6) {
                for &p2 in pts.iter().take(6) {
                    for &p3 in pts.iter().take(6) {
                        let lhs = c.add(c.add(p1, p2).unwrap(), p3).unwrap();
                        let rhs = c.add(p1, c.add(p2, p3).unwrap()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn two_torsion_doubles_to_infinity() {
        // y^2 = x^3 + 2 over F_5 (i.e. x^3 - 1728): (2, 0) is 2-torsion
        let f = fp(5);
        let c = WeierstrassCurve::new(f, 0, 2).unwrap();
        let t = CurvePoint::Affine(2, 0);
        assert!(c.contains(t));
        assert!(c.add(t, t).unwrap().is_infinity());
    }

    #[test]
    fn counting_and_traces() {
        let f = fp(5);
        // y^2 = x^3 - 1728 = x^3 + 2 mod 5: 6 points, trace 0
        let c = WeierstrassCurve::new(f, 0, f.from_i64(-1728)).unwrap();
        assert_eq!(c.count_points().unwrap(), 6);
        assert_eq!(c.trace().unwrap(), 0);
        assert!(c.is_supersingular().unwrap());
        // y^2 = x^3 + x over F_5: 4 points, trace 2
        let c = WeierstrassCurve::new(f, 1, 0).unwrap();
        assert_eq!(c.count_points().unwrap(), 4);
        assert_eq!(c.trace().unwrap(), 2);
    }

    #[test]
    fn supersingular_group_structure_when_p_is_2_mod_3() {
        // |E(F_p)| = p + 1 and over the extension the trace is -2p
        for p in [5u64, 11, 17, 23, 29] {
            let f = fp(p);
            let c = WeierstrassCurve::new(f, 0, f.from_i64(-1728)).unwrap();
            assert_eq!(c.count_points().unwrap(), (p + 1) as u128);
            let ext = QuadExtField::new(f);
            let ce =
                WeierstrassCurve::new(ext, ext.zero(), ext.from_i64(-1728)).unwrap();
            let t2 = ce.trace().unwrap();
            assert_eq!(t2, -2 * p as i128);
            assert_eq!(ce.count_points().unwrap(), ((p + 1) * (p + 1)) as u128);
            // [q+1] kills every rational point
            for pt in c.points().unwrap() {
                assert!(c.scalar_mul((p + 1) as i128, pt).unwrap().is_infinity());
            }
        }
    }

    #[test]
    fn two_independent_points_of_full_order() {
        // E(F_{p^2}) = Z/(p+1) x Z/(p+1) for p = 2 mod 3: exhibit generators
        for p in [5u64, 11, 17] {
            let m = ModelCurve::standard(fp(p));
            let c = m.curve();
            let n = (p + 1) as u128;
            let pts = c.points().unwrap();
            let p1 = *pts
                .iter()
                .find(|&&pt| m.point_order(pt).unwrap() == n)
                .expect("a point of full order exists");
            let mut sub = HashSet::new();
            let mut cur = CurvePoint::Infinity;
            loop {
                sub.insert(cur);
                cur = c.add_raw(cur, p1);
                if cur.is_infinity() {
                    break;
                }
            }
            assert_eq!(sub.len() as u128, n);
            let p2 = pts
                .iter()
                .find(|&&pt| {
                    m.point_order(pt).map(|o| o == n).unwrap_or(false) && {
                        // independence: <p1> meets <p2> only at O
                        let mut q = pt;
                        let mut ok = true;
                        while !q.is_infinity() {
                            if sub.contains(&q) {
                                ok = false;
                                break;
                            }
                            q = c.add_raw(q, pt);
                        }
                        ok
                    }
                })
                .copied();
            assert!(p2.is_some(), "independent generator exists for p = {p}");
        }
    }

    #[test]
    fn j_invariant_cases() {
        let f = fp(7);
        assert_eq!(WeierstrassCurve::new(f, 0, 3).unwrap().j_invariant(), 0);
        assert_eq!(
            WeierstrassCurve::new(f, 2, 0).unwrap().j_invariant(),
            f.from_i64(1728)
        );
        // A = 1, B = 1 over F_7: j = -1728 * 64 / (-16 * 31), computed directly
        let c = WeierstrassCurve::new(f, 1, 1).unwrap();
        let delta = f.from_i64(-16 * 31);
        let expect = f.div(f.from_i64(-1728 * 64), delta).unwrap();
        assert_eq!(c.j_invariant(), expect);
        assert_eq!(c.discriminant(), delta);
    }

    #[test]
    fn curve_from_j_round_trips() {
        for p in [5u64, 7, 13, 31, 101] {
            let f = fp(p);
            for j in 0..p {
                assert_eq!(curve_from_j(&f, j).j_invariant(), j, "p={p}, j={j}");
            }
        }
    }

    #[test]
    fn twist_class_counts() {
        let f7 = fp(7);
        assert_eq!(twist_classes(&f7, 5).len(), 2);
        assert_eq!(twist_classes(&f7, 0).len(), 6); // 7 = 1 mod 3, 1 mod 2
        assert_eq!(twist_classes(&f7, f7.from_i64(1728)).len(), 2); // 7 = 3 mod 4
        let f13 = fp(13);
        assert_eq!(twist_classes(&f13, f13.from_i64(1728)).len(), 4); // 13 = 1 mod 4
        assert_eq!(twist_classes(&f13, 0).len(), 6);
        let f5 = fp(5);
        assert_eq!(twist_classes(&f5, 0).len(), 2); // 5 = 2 mod 3
    }

    #[test]
    fn twists_are_proper_and_detected() {
        for p in [5u64, 7, 13, 31] {
            let f = fp(p);
            for j in 0..p {
                let curves = twist_class_curves(&f, j);
                for (i, (_, ci)) in curves.iter().enumerate() {
                    assert_eq!(ci.j_invariant(), j);
                    assert!(ci.twist(f.one()).unwrap().is_isomorphic_to(ci));
                    for (k, (_, ck)) in curves.iter().enumerate() {
                        assert_eq!(ci.is_isomorphic_to(ck), i == k, "p={p}, j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn model_curve_torsion_point() {
        for p in [5u64, 7, 11, 13, 31] {
            let m = ModelCurve::standard(fp(p));
            let t = m.torsion_point();
            assert!(m.curve().contains(t));
            assert_eq!(m.point_order(t).unwrap(), 3);
            assert!(m.psi(t).unwrap().is_infinity());
            assert!(m.psi(m.curve().negate(t)).unwrap().is_infinity());
        }
    }

    #[test]
    fn psi_is_an_endomorphism_exhaustive_f25() {
        let m = ModelCurve::standard(fp(5));
        let pts = m.curve().points().unwrap();
        assert_eq!(pts.len() as u128, m.ext_order());
        for &p1 in &pts {
            let image = m.psi(p1).unwrap();
            assert!(m.curve().contains(image));
            for &p2 in &pts {
                let lhs = m.psi(m.curve().add_raw(p1, p2)).unwrap();
                let rhs = m.curve().add_raw(m.psi(p1).unwrap(), m.psi(p2).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn psi_squares_to_minus_three() {
        for p in [5u64, 7, 11, 13] {
            let m = ModelCurve::standard(fp(p));
            for pt in m.curve().points().unwrap() {
                let twice = m.psi_raw(m.psi_raw(pt));
                assert_eq!(twice, m.curve().scalar_mul_raw(-3, pt), "p={p}");
            }
        }
    }

    #[test]
    fn psi_dual_is_minus_psi() {
        for p in [5u64, 7, 11] {
            let m = ModelCurve::standard(fp(p));
            for pt in m.curve().points().unwrap() {
                let dual = m.psi_dual(pt).unwrap();
                assert_eq!(dual, m.curve().negate(m.psi_raw(pt)), "p={p}");
            }
        }
    }

    #[test]
    fn psi_kernel_is_exactly_o_and_torsion() {
        for p in [5u64, 7, 11] {
            let m = ModelCurve::standard(fp(p));
            let t = m.torsion_point();
            let kernel: Vec<_> = m
                .curve()
                .points()
                .unwrap()
                .into_iter()
                .filter(|&pt| m.psi_raw(pt).is_infinity())
                .collect();
            assert_eq!(kernel.len(), 3);
            assert!(kernel.contains(&CurvePoint::Infinity));
            assert!(kernel.contains(&t));
            assert!(kernel.contains(&m.curve().negate(t)));
        }
    }

    #[test]
    fn psi_fixes_exactly_the_two_torsion() {
        for p in [5u64, 7, 13] {
            let m = ModelCurve::standard(fp(p));
            let f = m.ext();
            let fixed: HashSet<_> = m
                .curve()
                .points()
                .unwrap()
                .into_iter()
                .filter(|&pt| m.psi_raw(pt) == pt)
                .collect();
            let s = f.sqrt(f.from_i64(-3)).unwrap();
            let six = f.from_i64(6);
            let mut expect = HashSet::from([
                CurvePoint::Infinity,
                CurvePoint::Affine(f.from_i64(12), f.zero()),
            ]);
            expect.insert(CurvePoint::Affine(f.add(f.from_i64(-6), f.mul(six, s)), f.zero()));
            expect.insert(CurvePoint::Affine(f.sub(f.from_i64(-6), f.mul(six, s)), f.zero()));
            assert_eq!(fixed, expect, "p={p}");
        }
    }

    #[test]
    fn iota_pi_section_property() {
        for p in [5u64, 7, 13, 29] {
            let m = ModelCurve::standard(fp(p));
            assert!(m.iota(ProjPoint::Infinity).is_infinity());
            for x in 0..p {
                let pt = m.iota(ProjPoint::Finite(x));
                assert!(m.curve().contains(pt));
                assert_eq!(m.pi(pt), ProjPoint::Finite(x));
            }
            // x = 0 lifts to +-T
            let lift = m.iota(ProjPoint::Finite(0));
            assert!(lift == m.torsion_point() || lift == m.curve().negate(m.torsion_point()));
        }
    }

    #[test]
    fn s_set_size_and_membership() {
        for p in [5u64, 11, 17, 23, 29] {
            // p = 2 mod 3: |S| = 2p, and S contains all of E(F_p)
            let m = ModelCurve::standard(fp(p));
            let s = m.s_set();
            assert_eq!(s.len(), 2 * p as usize);
            let rational: Vec<_> = s.iter().filter(|&&pt| m.in_base_curve(pt)).collect();
            assert_eq!(rational.len(), (p + 1) as usize);
            // closure under negation and psi
            let set: HashSet<_> = s.iter().copied().collect();
            for &pt in &s {
                assert!(set.contains(&m.curve().negate(pt)));
                assert!(set.contains(&m.psi_raw(pt)));
            }
        }
    }

    #[test]
    fn s_set_is_curve_union_psi_image_when_p_is_2_mod_3() {
        for p in [5u64, 11, 17, 29] {
            let m = ModelCurve::standard(fp(p));
            let f = m.ext();
            let s: HashSet<_> = m.s_set().into_iter().collect();
            let rational: HashSet<_> = s
                .iter()
                .copied()
                .filter(|&pt| m.in_base_curve(pt))
                .collect();
            let image: HashSet<_> = rational.iter().map(|&pt| m.psi_raw(pt)).collect();
            let union: HashSet<_> = rational.union(&image).copied().collect();
            assert_eq!(union, s, "p={p}");
            let both: HashSet<_> = rational.intersection(&image).copied().collect();
            let expect = HashSet::from([
                CurvePoint::Infinity,
                CurvePoint::Affine(f.from_i64(12), f.zero()),
            ]);
            assert_eq!(both, expect, "p={p}");
        }
    }

    #[test]
    fn indegrees_in_s_follow_the_membership_split() {
        // -3k = 144^2 is a square, so indegree 1 occurs exactly off E(F_p)
        for p in [5u64, 7, 11, 13] {
            let m = ModelCurve::standard(fp(p));
            assert_eq!(m.indegree_in_s(CurvePoint::Infinity), 3);
            for pt in m.s_set() {
                let deg = m.indegree_in_s(pt);
                assert!(deg == 0 || deg == 1 || deg == 3, "p={p}");
                if deg == 1 {
                    assert!(!m.in_base_curve(pt), "p={p}");
                }
                if !m.in_base_curve(pt) {
                    assert_eq!(deg, 1, "p={p}");
                }
            }
        }
    }

    #[test]
    fn scaling_isomorphism_commutes_with_psi() {
        for p in [7u64, 11, 13] {
            let m = ModelCurve::standard(fp(p));
            for u in 1..p.min(8) {
                for pt in m.curve().points().unwrap().into_iter().take(12) {
                    let (target, moved) = m.phi_u(u, pt).unwrap();
                    let lhs = target.psi_raw(moved);
                    let (_, rhs) = m.phi_u(u, m.psi_raw(pt)).unwrap();
                    assert_eq!(lhs, rhs, "p={p}, u={u}");
                }
            }
            // u = 1 is the identity
            for pt in m.curve().points().unwrap().into_iter().take(5) {
                let (target, moved) = m.phi_u(1, pt).unwrap();
                assert_eq!(target.k(), m.k());
                assert_eq!(moved, pt);
            }
            assert!(m.phi_u(0, CurvePoint::Infinity).is_err());
        }
    }

    #[test]
    fn periodicity_and_depth() {
        let m = ModelCurve::standard(fp(5));
        assert!(m.is_periodic(CurvePoint::Infinity).unwrap());
        assert_eq!(m.depth(CurvePoint::Infinity).unwrap(), 0);
        let t = m.torsion_point();
        assert!(!m.is_periodic(t).unwrap());
        assert_eq!(m.depth(t).unwrap(), 1);
    }

    #[test]
    fn depth_order_law_exhaustive() {
        // ord(P) = 3^ceil(d/2) * ord(psi^d(P)) with the final order coprime to 3
        for p in [5u64, 7, 11, 13, 17] {
            let m = ModelCurve::standard(fp(p));
            for pt in m.curve().points().unwrap() {
                let d = m.depth(pt).unwrap();
                let mut cur = pt;
                for _ in 0..d {
                    cur = m.psi_raw(cur);
                }
                let tail = m.point_order(cur).unwrap();
                assert!(!tail.is_multiple_of(3));
                let expect = 3u128.pow(d.div_ceil(2) as u32) * tail;
                assert_eq!(m.point_order(pt).unwrap(), expect, "p={p}, pt={pt:?}");
            }
        }
    }

    #[test]
    fn order_nine_points_have_depth_three_or_four() {
        // depth 2 would force order 3N with N coprime to 3
        let m = ModelCurve::standard(fp(17)); // E(F_289) = (Z/18)^2 has 9-torsion
        let mut seen = 0;
        for pt in m.curve().points().unwrap() {
            if m.point_order(pt).unwrap() == 9 {
                seen += 1;
                let d = m.depth(pt).unwrap();
                assert!(d == 3 || d == 4, "depth {d}");
            }
        }
        assert!(seen > 0, "order-9 points exist on E(F_289)");
    }

    #[test]
    fn membership_split_is_psi_invariant_when_p_is_1_mod_3() {
        for p in [7u64, 13, 19, 31] {
            let m = ModelCurve::standard(fp(p));
            for pt in m.s_set() {
                assert_eq!(
                    m.in_base_curve(pt),
                    m.in_base_curve(m.psi_raw(pt)),
                    "p={p}"
                );
            }
        }
    }

    #[test]
    fn add_rejects_foreign_points() {
        let f = fp(7);
        let c = WeierstrassCurve::new(f, 1, 1).unwrap();
        let bogus = CurvePoint::Affine(1, 1); // 1 != 1 + 1 + 1 = 3 mod 7
        assert!(matches!(
            c.add(bogus, CurvePoint::Infinity),
            Err(CurveError::PointNotOnCurve)
        ));
    }
}
