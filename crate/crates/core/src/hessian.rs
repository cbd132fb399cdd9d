//! The Hessian transformation on cubic forms and Weierstrass curves.
//!
//! For `F = X^3 + AXZ^2 + BZ^3 - Y^2 Z` the determinant of the matrix of
//! second partials is `-8(3XY^2 + 3AX^2 Z + 9BXZ^2 - A^2 Z^3)`; when A is
//! nonzero this reduces to the short Weierstrass curve with
//! `A' = -(A^3/3 + 3B^2)/A^4`, `B' = -(A^3 B/3 + 2B^3)/A^6`, and when A = 0
//! it splits into three independent lines. The module also covers the
//! multiplicity pattern of Hessian fibers, the action on twist classes, the
//! even-order preimage construction, and the trace congruence mod 3 along
//! Hessian edges.

use thiserror::Error;

use crate::curves::{CurveError, WeierstrassCurve};
use crate::field::FiniteField;
use crate::projmaps::{hess_j, ProjPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HessianError {
    #[error("cubic form is identically zero")]
    ZeroForm,
    #[error("the j-invariant must be nonzero here")]
    ZeroJInvariant,
    #[error("target j is not the Hessian image of the source j")]
    InconsistentPair,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Monomial order of cubic-form coefficients:
/// `X^3, X^2Y, X^2Z, XY^2, XYZ, XZ^2, Y^3, Y^2Z, YZ^2, Z^3`.
pub const MONOMIALS: [(u8, u8, u8); 10] = [
    (3, 0, 0),
    (2, 1, 0),
    (2, 0, 1),
    (1, 2, 0),
    (1, 1, 1),
    (1, 0, 2),
    (0, 3, 0),
    (0, 2, 1),
    (0, 1, 2),
    (0, 0, 3),
];

/// A homogeneous cubic in X, Y, Z, stored as its ten coefficients in the
/// [`MONOMIALS`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicForm<F: FiniteField> {
    field: F,
    c: [F::Elem; 10],
}

type Lin<E> = [E; 3]; // coefficients of X, Y, Z
type Quad<E> = [E; 6]; // X^2, XY, XZ, Y^2, YZ, Z^2

impl<F: FiniteField> CubicForm<F> {
    pub fn new(field: F, c: [F::Elem; 10]) -> Result<Self, HessianError> {
        let form = CubicForm { field, c };
        if form.is_zero() {
            return Err(HessianError::ZeroForm);
        }
        Ok(form)
    }

    pub(crate) fn from_raw(field: F, c: [F::Elem; 10]) -> Self {
        CubicForm { field, c }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coefficients(&self) -> &[F::Elem; 10] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| self.field.is_zero(x))
    }

    pub fn scale(&self, s: F::Elem) -> CubicForm<F> {
        let f = &self.field;
        CubicForm {
            field: self.field.clone(),
            c: self.c.map(|x| f.mul(x, s)),
        }
    }

    /// Equality of the defined projective curves: proportional coefficients.
    pub fn proportional_to(&self, other: &CubicForm<F>) -> bool {
        let f = &self.field;
        let pivot = match (0..10).find(|&i| !f.is_zero(self.c[i])) {
            Some(i) => i,
            None => return other.is_zero(),
        };
        if f.is_zero(other.c[pivot]) {
            return false;
        }
        let s = f.div(other.c[pivot], self.c[pivot]).expect("nonzero pivot");
        self.scale(s).c == other.c
    }

    pub fn eval(&self, x: F::Elem, y: F::Elem, z: F::Elem) -> F::Elem {
        let f = &self.field;
        let mut acc = f.zero();
        for (i, &(a, b, c)) in MONOMIALS.iter().enumerate() {
            let mut term = self.c[i];
            for _ in 0..a {
                term = f.mul(term, x);
            }
            for _ in 0..b {
                term = f.mul(term, y);
            }
            for _ in 0..c {
                term = f.mul(term, z);
            }
            acc = f.add(acc, term);
        }
        acc
    }

    /// Substitute the linear change of variables `(X, Y, Z) <- M (X, Y, Z)^t`,
    /// i.e. replace X by the linear form `m[0]`, and so on.
    pub fn compose_linear(&self, m: &[[F::Elem; 3]; 3]) -> CubicForm<F> {
        let f = &self.field;
        let mut out = [f.zero(); 10];
        for (i, &(a, b, c)) in MONOMIALS.iter().enumerate() {
            if f.is_zero(self.c[i]) {
                continue;
            }
            let mut factors = Vec::with_capacity(3);
            for _ in 0..a {
                factors.push(m[0]);
            }
            for _ in 0..b {
                factors.push(m[1]);
            }
            for _ in 0..c {
                factors.push(m[2]);
            }
            let quad = lin_mul_lin(f, factors[0], factors[1]);
            let cubic = quad_mul_lin(f, quad, factors[2]);
            for (slot, v) in out.iter_mut().zip(cubic) {
                *slot = f.add(*slot, f.mul(self.c[i], v));
            }
        }
        CubicForm {
            field: self.field.clone(),
            c: out,
        }
    }

    /// The determinant of the matrix of second partial derivatives,
    /// expanded as a cubic form. Zero exactly when the input is degenerate
    /// enough (for instance a repeated line).
    pub fn hessian_form(&self) -> CubicForm<F> {
        let f = &self.field;
        let k = |i: usize, n: i64| f.mul(self.c[i], f.from_i64(n));
        // rows of the Hessian matrix as linear forms
        let fxx: Lin<F::Elem> = [k(0, 6), k(1, 2), k(2, 2)];
        let fxy: Lin<F::Elem> = [k(1, 2), k(3, 2), k(4, 1)];
        let fxz: Lin<F::Elem> = [k(2, 2), k(4, 1), k(5, 2)];
        let fyy: Lin<F::Elem> = [k(3, 2), k(6, 6), k(7, 2)];
        let fyz: Lin<F::Elem> = [k(4, 1), k(7, 2), k(8, 2)];
        let fzz: Lin<F::Elem> = [k(5, 2), k(8, 2), k(9, 6)];

        let minor = |a: Lin<F::Elem>, b: Lin<F::Elem>, c: Lin<F::Elem>, d: Lin<F::Elem>| {
            quad_sub(f, lin_mul_lin(f, a, b), lin_mul_lin(f, c, d))
        };
        let m1 = minor(fyy, fzz, fyz, fyz);
        let m2 = minor(fxy, fzz, fyz, fxz);
        let m3 = minor(fxy, fyz, fyy, fxz);

        let mut out = [f.zero(); 10];
        for (slot, v) in out.iter_mut().zip(quad_mul_lin(f, m1, fxx)) {
            *slot = f.add(*slot, v);
        }
        for (slot, v) in out.iter_mut().zip(quad_mul_lin(f, m2, fxy)) {
            *slot = f.sub(*slot, v);
        }
        for (slot, v) in out.iter_mut().zip(quad_mul_lin(f, m3, fxz)) {
            *slot = f.add(*slot, v);
        }
        CubicForm {
            field: self.field.clone(),
            c: out,
        }
    }
}

fn lin_mul_lin<F: FiniteField>(f: &F, u: Lin<F::Elem>, v: Lin<F::Elem>) -> Quad<F::Elem> {
    [
        f.mul(u[0], v[0]),
        f.add(f.mul(u[0], v[1]), f.mul(u[1], v[0])),
        f.add(f.mul(u[0], v[2]), f.mul(u[2], v[0])),
        f.mul(u[1], v[1]),
        f.add(f.mul(u[1], v[2]), f.mul(u[2], v[1])),
        f.mul(u[2], v[2]),
    ]
}

fn quad_sub<F: FiniteField>(f: &F, a: Quad<F::Elem>, b: Quad<F::Elem>) -> Quad<F::Elem> {
    std::array::from_fn(|i| f.sub(a[i], b[i]))
}

fn quad_mul_lin<F: FiniteField>(f: &F, q: Quad<F::Elem>, u: Lin<F::Elem>) -> [F::Elem; 10] {
    let mut out = [f.zero(); 10];
    // (X^2, XY, XZ, Y^2, YZ, Z^2) times X, Y, Z respectively
    const BY_X: [usize; 6] = [0, 1, 2, 3, 4, 5];
    const BY_Y: [usize; 6] = [1, 3, 4, 6, 7, 8];
    const BY_Z: [usize; 6] = [2, 4, 5, 7, 8, 9];
    for (var, table) in [(u[0], BY_X), (u[1], BY_Y), (u[2], BY_Z)] {
        for (i, &target) in table.iter().enumerate() {
            out[target] = f.add(out[target], f.mul(q[i], var));
        }
    }
    out
}

/// The Weierstrass cubic `X^3 + AXZ^2 + BZ^3 - Y^2 Z`.
pub fn weierstrass_cubic<F: FiniteField>(f: &F, a: F::Elem, b: F::Elem) -> CubicForm<F> {
    let mut c = [f.zero(); 10];
    c[0] = f.one();
    c[5] = a;
    c[9] = b;
    c[7] = f.from_i64(-1);
    CubicForm::from_raw(f.clone(), c)
}

/// The Hesse pencil member `X^3 + Y^3 + Z^3 + lambda XYZ`.
pub fn hesse_pencil_cubic<F: FiniteField>(f: &F, lambda: F::Elem) -> CubicForm<F> {
    let mut c = [f.zero(); 10];
    c[0] = f.one();
    c[6] = f.one();
    c[9] = f.one();
    c[4] = lambda;
    CubicForm::from_raw(f.clone(), c)
}

/// The product of the three lines whose coefficients are the rows of `m`.
pub fn three_lines<F: FiniteField>(f: &F, m: &[[F::Elem; 3]; 3]) -> CubicForm<F> {
    let quad = lin_mul_lin(f, m[0], m[1]);
    CubicForm::from_raw(f.clone(), quad_mul_lin(f, quad, m[2]))
}

pub fn det3<F: FiniteField>(f: &F, m: &[[F::Elem; 3]; 3]) -> F::Elem {
    let minor = |a, b, c, d| f.sub(f.mul(m[1][a], m[2][b]), f.mul(m[1][c], m[2][d]));
    let t1 = f.mul(m[0][0], minor(1, 2, 2, 1));
    let t2 = f.mul(m[0][1], minor(0, 2, 2, 0));
    let t3 = f.mul(m[0][2], minor(0, 1, 1, 0));
    f.add(f.sub(t1, t2), t3)
}

/// Factorization data for a three-lines Hessian `-24 X (Y^2 + 3BZ^2)`:
/// the quadratic factor splits as `(Y - aZ)(Y + aZ)` when `-3B` is a square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineFactors<E> {
    Split { alpha: E },
    OverExtension,
}

/// The Hessian of a smooth Weierstrass cubic, classified.
#[derive(Debug, Clone)]
pub enum HessianResult<F: FiniteField> {
    /// A != 0: the short Weierstrass form of the Hessian curve.
    Elliptic(WeierstrassCurve<F>),
    /// A = 0: the union of three independent lines.
    ThreeLines {
        form: CubicForm<F>,
        factors: LineFactors<F::Elem>,
    },
    /// Degenerate input (zero discriminant or unrecognized shape): the raw
    /// Hessian form, kept only as a flag by [`classify_form_hessian`].
    Singular(CubicForm<F>),
}

impl<F: FiniteField> HessianResult<F> {
    pub fn elliptic(&self) -> Option<&WeierstrassCurve<F>> {
        match self {
            HessianResult::Elliptic(c) => Some(c),
            _ => None,
        }
    }
}

/// Hessian of a (nonsingular) short Weierstrass curve.
pub fn weierstrass_hessian<F: FiniteField>(curve: &WeierstrassCurve<F>) -> HessianResult<F> {
    let f = curve.field().clone();
    let (a, b) = (curve.a(), curve.b());
    if f.is_zero(a) {
        // -24 X (Y^2 + 3B Z^2)
        let mut c = [f.zero(); 10];
        c[3] = f.from_i64(-24);
        c[5] = f.mul(f.from_i64(-72), b);
        let m3b = f.mul(f.from_i64(-3), b);
        let factors = match f.sqrt(m3b) {
            Some(alpha) => LineFactors::Split { alpha },
            None => LineFactors::OverExtension,
        };
        return HessianResult::ThreeLines {
            form: CubicForm::from_raw(f, c),
            factors,
        };
    }
    let third = f.inv(f.from_i64(3)).expect("3 is a unit");
    let a3 = f.cube(a);
    let ap_num = f.add(f.mul(a3, third), f.mul(f.from_i64(3), f.square(b)));
    let ap = f.neg(f.div(ap_num, f.pow(a, 4)).expect("a nonzero"));
    let bp_num = f.add(f.mul(f.mul(a3, b), third), f.mul(f.from_i64(2), f.cube(b)));
    let bp = f.neg(f.div(bp_num, f.pow(a, 6)).expect("a nonzero"));
    let c = WeierstrassCurve::new(f, ap, bp)
        .expect("the Hessian discriminant -Delta/(27 A^6) is nonzero");
    HessianResult::Elliptic(c)
}

/// Classify the Hessian of a raw cubic form, accepting only the Weierstrass
/// shape `X^3 + AXZ^2 + BZ^3 - Y^2Z`; anything else (including singular
/// coefficient pairs) is reported as `Singular` with the raw Hessian form.
pub fn classify_form_hessian<F: FiniteField>(form: &CubicForm<F>) -> HessianResult<F> {
    let f = form.field().clone();
    let c = form.coefficients();
    let shape_ok = c[0] == f.one()
        && c[7] == f.from_i64(-1)
        && [1, 2, 3, 4, 6, 8].iter().all(|&i| f.is_zero(c[i]));
    if shape_ok {
        if let Ok(curve) = WeierstrassCurve::new(f.clone(), c[5], c[9]) {
            return weierstrass_hessian(&curve);
        }
    }
    HessianResult::Singular(form.hessian_form())
}

/// Root multiplicity pattern of `H_{j'}(j) = j^2 (Hess(j) - j')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootPattern<E> {
    /// j' outside {0, 1728}: only simple roots, if any.
    AllSimple,
    /// j' = 1728: `-(j - 1728)(j + 8*1728)^2 / 27`.
    DoubleAndSimple { double_root: E, simple_root: E },
    /// j' = 0: `-(j - 4*1728)^3 / 27`.
    Triple { root: E },
}

pub fn hessian_multiplicity_pattern<F: FiniteField>(
    f: &F,
    j_target: F::Elem,
) -> RootPattern<F::Elem> {
    if f.is_zero(j_target) {
        RootPattern::Triple {
            root: f.from_i64(4 * 1728),
        }
    } else if j_target == f.from_i64(1728) {
        RootPattern::DoubleAndSimple {
            double_root: f.from_i64(-8 * 1728),
            simple_root: f.from_i64(1728),
        }
    } else {
        RootPattern::AllSimple
    }
}

/// Evaluate `H_{j'}(j) = ((6912 - j)^3 - 27 j' j^2) / 27` pointwise.
pub fn h_poly_eval<F: FiniteField>(f: &F, j_target: F::Elem, j: F::Elem) -> F::Elem {
    let lhs = f.cube(f.sub(f.from_i64(6912), j));
    let rhs = f.mul(f.from_i64(27), f.mul(j_target, f.square(j)));
    f.div(f.sub(lhs, rhs), f.from_i64(27)).expect("27 is a unit")
}

/// Exponent e with `Hess(E_D) = E'_{D^{-e}}` on twist classes: 1 generically
/// and when both j's are 1728, 2 when only the target is 1728, 3 when the
/// target is 0. The pair must be a Hessian edge with nonzero source.
pub fn hessian_twist_exponent<F: FiniteField>(
    f: &F,
    j_src: F::Elem,
    j_dst: F::Elem,
) -> Result<u8, HessianError> {
    if f.is_zero(j_src) {
        return Err(HessianError::ZeroJInvariant);
    }
    if hess_j(f, ProjPoint::Finite(j_src)) != ProjPoint::Finite(j_dst) {
        return Err(HessianError::InconsistentPair);
    }
    let j1728 = f.from_i64(1728);
    Ok(if f.is_zero(j_dst) {
        3
    } else if j_dst == j1728 && j_src != j1728 {
        2
    } else {
        1
    })
}

/// A curve whose Hessian is F_q-isomorphic to the given even-order curve:
/// translate a rational two-torsion point to the origin, putting the curve
/// in the form `y^2 = x^3 + A'x^2 + B'x`, then take
/// `A = -1/(3B')`, `B = -A'/(27 B'^2)`.
pub fn even_trace_preimage<F: FiniteField>(
    curve: &WeierstrassCurve<F>,
) -> Result<WeierstrassCurve<F>, HessianError> {
    let f = curve.field().clone();
    let root = f
        .elements()
        .find(|&x| f.add(f.cube(x), f.add(f.mul(curve.a(), x), curve.b())) == f.zero())
        .ok_or(HessianError::Curve(CurveError::OddOrder))?;
    // after x -> x + root: y^2 = x^3 + (3 root) x^2 + (3 root^2 + A) x
    let ap = f.mul(f.from_i64(3), root);
    let bp = f.add(f.mul(f.from_i64(3), f.square(root)), curve.a());
    debug_assert!(!f.is_zero(bp), "smooth curves have simple roots");
    let a = f.neg(f.inv(f.mul(f.from_i64(3), bp)).expect("B' nonzero"));
    let b = f.neg(
        f.div(ap, f.mul(f.from_i64(27), f.square(bp)))
            .expect("B' nonzero"),
    );
    let preimage = WeierstrassCurve::new(f, a, b)?;
    match weierstrass_hessian(&preimage) {
        HessianResult::Elliptic(h) => {
            assert!(
                h.is_isomorphic_to(curve),
                "Hessian of the constructed preimage must match the input"
            );
        }
        _ => unreachable!("the preimage has nonzero A"),
    }
    Ok(preimage)
}

/// Traces agree mod 3 along a Hessian edge with nonzero source j.
pub fn trace_mod3_edge_check<F: FiniteField>(
    curve: &WeierstrassCurve<F>,
) -> Result<bool, HessianError> {
    if curve.field().is_zero(curve.a()) {
        return Err(HessianError::ZeroJInvariant);
    }
    let hess = match weierstrass_hessian(curve) {
        HessianResult::Elliptic(c) => c,
        _ => unreachable!("A != 0 gives an elliptic Hessian"),
    };
    Ok(curve.trace()?.rem_euclid(3) == hess.trace()?.rem_euclid(3))
}

/// The nine base points of the Hesse pencil (the common inflection points of
/// all smooth members), as projective coordinate triples. Requires a
/// primitive cube root of unity in the field.
pub fn hesse_inflection_points<F: FiniteField>(f: &F) -> Option<[[F::Elem; 3]; 9]> {
    let eps = f.primitive_cube_root()?;
    let eps2 = f.square(eps);
    let one = f.one();
    let zero = f.zero();
    let m = |x: F::Elem| f.neg(x);
    Some([
        [zero, one, m(one)],
        [zero, one, m(eps)],
        [zero, one, m(eps2)],
        [one, zero, m(one)],
        [one, zero, m(eps2)],
        [one, zero, m(eps)],
        [one, m(one), zero],
        [one, m(eps), zero],
        [one, m(eps2), zero],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::curve_from_j;
    use crate::field::{FiniteField, PrimeField, QuadExtField};
    use crate::projmaps::{lambda_hess, ProjPoint};

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn hessian_of_weierstrass_cubic_matches_closed_form() {
        // Hess(X^3 + AXZ^2 + BZ^3 - Y^2Z) = -8(3XY^2 + 3AX^2Z + 9BXZ^2 - A^2Z^3)
        for p in [5u64, 7, 13, 101] {
            let f = fp(p);
            for a in 0..p.min(10) {
                for b in 0..p.min(10) {
                    let form = weierstrass_cubic(&f, a, b);
                    let hess = form.hessian_form();
                    let mut expect = [f.zero(); 10];
                    expect[3] = f.from_i64(-24);
                    expect[2] = f.mul(f.from_i64(-24), a);
                    expect[5] = f.mul(f.from_i64(-72), b);
                    expect[9] = f.mul(f.from_i64(8), f.square(a));
                    assert_eq!(hess.coefficients(), &expect, "p={p}, a={a}, b={b}");
                }
            }
        }
    }

    #[test]
    fn hessian_of_triple_line_vanishes() {
        let f = fp(7);
        let mut c = [f.zero(); 10];
        c[0] = f.one(); // X^3
        let form = CubicForm::new(f, c).unwrap();
        assert!(form.hessian_form().is_zero());
        assert!(matches!(
            classify_form_hessian(&form),
            HessianResult::Singular(h) if h.is_zero()
        ));
    }

    #[test]
    fn hessian_of_three_lines_is_the_same_lines() {
        // Hess(L1 L2 L3) = 2 det(M)^2 L1 L2 L3
        for p in [5u64, 7, 13] {
            let f = fp(p);
            let mut tested = 0;
            for seed in 0..200u64 {
                let e = |i: u64| {
                    (seed
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(i * 1442695040888963407)
                        >> 33)
                        % p
                };
                let m = [[e(1), e(2), e(3)], [e(4), e(5), e(6)], [e(7), e(8), e(9)]];
                let det = det3(&f, &m);
                if f.is_zero(det) {
                    continue;
                }
                let lines = three_lines(&f, &m);
                let hess = lines.hessian_form();
                let scale = f.mul(f.from_i64(2), f.square(det));
                assert_eq!(hess, lines.scale(scale), "p={p}, seed={seed}");
                tested += 1;
                if tested >= 25 {
                    break;
                }
            }
            assert!(tested >= 25);
        }
    }

    #[test]
    fn hessian_is_covariant_under_coordinate_changes() {
        // Hess(F o M) and Hess(F) o M define the same projective cubic
        let f = fp(13);
        let form = weierstrass_cubic(&f, 3, 5);
        let mut tested = 0;
        for seed in 0..100u64 {
            let e = |i: u64| {
                (seed
                    .wrapping_mul(2862933555777941757)
                    .wrapping_add(i * 3037000493)
                    >> 31)
                    % 13
            };
            let m = [[e(1), e(2), e(3)], [e(4), e(5), e(6)], [e(7), e(8), e(9)]];
            if f.is_zero(det3(&f, &m)) {
                continue;
            }
            let lhs = form.compose_linear(&m).hessian_form();
            let rhs = form.hessian_form().compose_linear(&m);
            assert!(lhs.proportional_to(&rhs), "seed={seed}");
            tested += 1;
        }
        assert!(tested >= 20);
    }

    #[test]
    fn weierstrass_hessian_coefficients() {
        // A = 1, B = 0 maps to A' = -1/3, B' = 0
        for p in [7u64, 13, 31] {
            let f = fp(p);
            let c = WeierstrassCurve::new(f, 1, 0).unwrap();
            match weierstrass_hessian(&c) {
                HessianResult::Elliptic(h) => {
                    assert_eq!(h.a(), f.neg(f.inv(3).unwrap()));
                    assert_eq!(h.b(), 0);
                }
                _ => panic!("expected an elliptic Hessian"),
            }
        }
    }

    #[test]
    fn weierstrass_hessian_of_a_zero_is_three_lines() {
        let f = fp(7);
        let c = WeierstrassCurve::new(f, 0, 1).unwrap();
        match weierstrass_hessian(&c) {
            HessianResult::ThreeLines { form, factors } => {
                // -24 X Y^2 - 72 B X Z^2
                let mut expect = [f.zero(); 10];
                expect[3] = f.from_i64(-24);
                expect[5] = f.from_i64(-72);
                assert_eq!(form.coefficients(), &expect);
                // -3B = -3 = 4 = 2^2 mod 7
                assert_eq!(factors, LineFactors::Split { alpha: 2 });
            }
            _ => panic!("expected three lines"),
        }
        // B = 3 gives -9 = 5 mod 7, a non-square
        let c = WeierstrassCurve::new(f, 0, 3).unwrap();
        match weierstrass_hessian(&c) {
            HessianResult::ThreeLines { factors, .. } => {
                assert_eq!(factors, LineFactors::OverExtension)
            }
            _ => panic!(),
        }
    }

    #[test]
    fn hessian_of_hessian_for_a_zero() {
        // Hess(Hess(E)) = -24^3 B * Hess(E) when A = 0
        for p in [5u64, 7, 13] {
            let f = fp(p);
            for b in 1..p.min(8) {
                let form = weierstrass_cubic(&f, 0, b);
                let h = form.hessian_form();
                let hh = h.hessian_form();
                let scale = f.mul(f.from_i64(-24 * 24 * 24), b);
                assert_eq!(hh, h.scale(scale), "p={p}, b={b}");
            }
        }
    }

    #[test]
    fn discriminant_law() {
        // Delta(Hess(E)) = -Delta(E) / (27 A^6)
        for p in [5u64, 7, 13, 31] {
            let f = fp(p);
            for a in 1..p {
                for b in 0..p {
                    let c = match WeierstrassCurve::new(f, a, b) {
                        Ok(c) => c,
                        Err(_) => continue,
                    };
                    if let HessianResult::Elliptic(h) = weierstrass_hessian(&c) {
                        let expect = f
                            .div(f.neg(c.discriminant()), f.mul(f.from_i64(27), f.pow(a, 6)))
                            .unwrap();
                        assert_eq!(h.discriminant(), expect, "p={p}, a={a}, b={b}");
                    } else {
                        panic!("A != 0 must give an elliptic Hessian");
                    }
                }
            }
        }
    }

    #[test]
    fn j_level_commutation_exhaustive() {
        // j(Hess(E)) agrees with the projective Hessian map at j(E)
        for p in [5u64, 7, 11, 13] {
            let f = fp(p);
            for a in 1..p {
                for b in 0..p {
                    let c = match WeierstrassCurve::new(f, a, b) {
                        Ok(c) => c,
                        Err(_) => continue,
                    };
                    let h = match weierstrass_hessian(&c) {
                        HessianResult::Elliptic(h) => h,
                        _ => unreachable!(),
                    };
                    assert_eq!(
                        hess_j(&f, ProjPoint::Finite(c.j_invariant())),
                        ProjPoint::Finite(h.j_invariant()),
                        "p={p}, a={a}, b={b}"
                    );
                }
            }
        }
    }

    #[test]
    fn reduction_to_short_weierstrass_matches() {
        // substitute (X, Y, Z) -> (Z, Y/(3A), 3(X + B/A^2)) into the Hessian
        // form: the result is proportional to the curve from weierstrass_hessian
        let f = fp(13);
        for a in 1..13u64 {
            for b in 0..13u64 {
                let c = match WeierstrassCurve::new(f, a, b) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                let h = weierstrass_cubic(&f, a, b).hessian_form();
                let shift = f.mul(3, f.div(b, f.square(a)).unwrap());
                let m = [
                    [f.zero(), f.zero(), f.one()],
                    [f.zero(), f.mul(3, a), f.zero()],
                    [f.from_i64(3), f.zero(), shift],
                ];
                let reduced = h.compose_linear(&m);
                let hc = match weierstrass_hessian(&c) {
                    HessianResult::Elliptic(hc) => hc,
                    _ => unreachable!(),
                };
                let target = weierstrass_cubic(&f, hc.a(), hc.b());
                assert!(reduced.proportional_to(&target), "a={a}, b={b}");
            }
        }
    }

    #[test]
    fn multiplicity_patterns() {
        let f = fp(13);
        assert_eq!(
            hessian_multiplicity_pattern(&f, 0),
            RootPattern::Triple {
                root: f.from_i64(6912)
            }
        );
        assert_eq!(
            hessian_multiplicity_pattern(&f, f.from_i64(1728)),
            RootPattern::DoubleAndSimple {
                double_root: f.from_i64(-13824),
                simple_root: f.from_i64(1728),
            }
        );
        assert_eq!(hessian_multiplicity_pattern(&f, 5), RootPattern::AllSimple);
    }

    #[test]
    fn h_poly_factorizations_pointwise() {
        for p in [5u64, 7, 13, 97] {
            let f = fp(p);
            for j in 0..p {
                // H_1728 = -(1/27)(j - 1728)(j + 8*1728)^2
                let lhs = h_poly_eval(&f, f.from_i64(1728), j);
                let rhs = f.mul(
                    f.neg(f.inv(27).unwrap()),
                    f.mul(
                        f.sub(j, f.from_i64(1728)),
                        f.square(f.add(j, f.from_i64(8 * 1728))),
                    ),
                );
                assert_eq!(lhs, rhs, "p={p}, j={j}");
                // H_0 = -(1/27)(j - 4*1728)^3
                let lhs = h_poly_eval(&f, 0, j);
                let rhs = f.mul(
                    f.neg(f.inv(27).unwrap()),
                    f.cube(f.sub(j, f.from_i64(4 * 1728))),
                );
                assert_eq!(lhs, rhs, "p={p}, j={j}");
            }
        }
    }

    #[test]
    fn simple_roots_away_from_special_j() {
        // oracle: multiplicity via the closed-form derivative
        // H' = -(1/9)(j^2 + 18 j j' - 13824 j + 47775744)
        let f = fp(13);
        let target = 5u64;
        let mut roots = 0;
        for j in 0..13 {
            if f.is_zero(h_poly_eval(&f, target, j)) {
                roots += 1;
                let der = f.mul(
                    f.neg(f.inv(9).unwrap()),
                    f.add(
                        f.square(j),
                        f.add(
                            f.mul(f.mul(18, target), j),
                            f.add(f.mul(f.from_i64(-13824), j), f.from_i64(47775744)),
                        ),
                    ),
                );
                assert!(!f.is_zero(der), "root {j} of H_5 must be simple");
            }
        }
        assert!(roots > 0, "H_5 has roots over F_13");
    }

    #[test]
    fn twist_exponents() {
        let f = fp(13);
        assert_eq!(
            hessian_twist_exponent(&f, f.from_i64(-13824), f.from_i64(1728)).unwrap(),
            2
        );
        assert_eq!(hessian_twist_exponent(&f, f.from_i64(6912), 0).unwrap(), 3);
        assert_eq!(
            hessian_twist_exponent(&f, f.from_i64(1728), f.from_i64(1728)).unwrap(),
            1
        );
        assert!(matches!(
            hessian_twist_exponent(&f, 0, 0),
            Err(HessianError::ZeroJInvariant)
        ));
        // generic consistent pair has exponent 1
        for src in 1..13u64 {
            if let ProjPoint::Finite(dst) = hess_j(&f, ProjPoint::Finite(src)) {
                if !f.is_zero(dst) && dst != f.from_i64(1728) {
                    assert_eq!(hessian_twist_exponent(&f, src, dst).unwrap(), 1);
                }
            }
        }
    }

    #[test]
    fn twist_exponent_law_on_concrete_curves() {
        // Hess(E_D) is F_q-isomorphic to E'_{D^{-e}}
        for p in [7u64, 13, 31] {
            let f = fp(p);
            for j in 1..p {
                let base = curve_from_j(&f, j);
                let hess_base = match weierstrass_hessian(&base) {
                    HessianResult::Elliptic(h) => h,
                    _ => unreachable!(),
                };
                let e = hessian_twist_exponent(&f, j, hess_base.j_invariant()).unwrap();
                for d in 1..p {
                    let twisted = base.twist(d).unwrap();
                    let hess_twisted = match weierstrass_hessian(&twisted) {
                        HessianResult::Elliptic(h) => h,
                        _ => unreachable!(),
                    };
                    let d_inv_e = f.inv(f.pow(d, e as u128)).unwrap();
                    let expect = hess_base.twist(d_inv_e).unwrap();
                    assert!(
                        hess_twisted.is_isomorphic_to(&expect),
                        "p={p}, j={j}, d={d}, e={e}"
                    );
                }
            }
        }
    }

    #[test]
    fn even_trace_preimage_round_trip() {
        for p in [5u64, 7, 13, 17] {
            let f = fp(p);
            for j in 0..p {
                let c = curve_from_j(&f, j);
                let even = c.trace().unwrap() % 2 == 0;
                match even_trace_preimage(&c) {
                    Ok(pre) => {
                        assert!(even, "preimage exists only for even order, p={p} j={j}");
                        assert!(!f.is_zero(pre.a()));
                    }
                    Err(HessianError::Curve(CurveError::OddOrder)) => {
                        assert!(!even, "odd-order curves have no preimage, p={p} j={j}")
                    }
                    Err(e) => panic!("unexpected error {e}"),
                }
            }
        }
    }

    #[test]
    fn even_trace_preimage_for_known_even_curve() {
        // y^2 = x^3 + x over F_5 has trace 2
        let f = fp(5);
        let c = WeierstrassCurve::new(f, 1, 0).unwrap();
        let pre = even_trace_preimage(&c).unwrap();
        match weierstrass_hessian(&pre) {
            HessianResult::Elliptic(h) => assert!(h.is_isomorphic_to(&c)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn preimage_of_zero_j_curves() {
        // y^2 = x^3 + beta^3 is the Hessian of
        // y^2 = x^3 - x/(9 beta^2) + 1/(81 beta^3), which has j = 4*1728
        for p in [5u64, 7, 13] {
            let f = fp(p);
            for beta in 1..p {
                let b = f.cube(beta);
                let target = WeierstrassCurve::new(f, 0, b).unwrap();
                let a_pre = f.neg(f.inv(f.mul(9, f.square(beta))).unwrap());
                let b_pre = f.inv(f.mul(81, f.cube(beta))).unwrap();
                let pre = WeierstrassCurve::new(f, a_pre, b_pre).unwrap();
                assert_eq!(pre.j_invariant(), f.from_i64(4 * 1728));
                match weierstrass_hessian(&pre) {
                    HessianResult::Elliptic(h) => {
                        assert!(h.is_isomorphic_to(&target), "p={p}, beta={beta}")
                    }
                    _ => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn traces_match_mod_three() {
        for p in [5u64, 7, 13, 19] {
            let f = fp(p);
            for a in 1..p {
                for b in 0..p.min(6) {
                    if let Ok(c) = WeierstrassCurve::new(f, a, b) {
                        assert!(trace_mod3_edge_check(&c).unwrap(), "p={p}, a={a}, b={b}");
                    }
                }
            }
            let zero_j = WeierstrassCurve::new(f, 0, 1).unwrap();
            assert!(trace_mod3_edge_check(&zero_j).is_err());
        }
    }

    #[test]
    fn pencil_base_points_lie_on_all_members_and_their_hessians() {
        // fields with a cube root of unity: F_p with p = 1 mod 3, else F_{p^2}
        let f13 = fp(13);
        check_inflection_points(&f13);
        let f25 = QuadExtField::new(fp(5));
        check_inflection_points(&f25);
        assert!(hesse_inflection_points(&fp(5)).is_none());
    }

    fn check_inflection_points<F: FiniteField>(f: &F) {
        let pts = hesse_inflection_points(f).expect("cube root of unity exists");
        for lam_idx in 0..f.order().min(40) {
            let lam = f.element(lam_idx as usize);
            let member = hesse_pencil_cubic(f, lam);
            let hess = member.hessian_form();
            for (i, p) in pts.iter().enumerate() {
                assert!(
                    f.is_zero(member.eval(p[0], p[1], p[2])),
                    "base point {i} lies on every member"
                );
                assert!(
                    f.is_zero(hess.eval(p[0], p[1], p[2])),
                    "base point {i} lies on the Hessian of every member"
                );
            }
        }
    }

    #[test]
    fn pencil_hessian_tracks_the_lambda_step() {
        // Hess(E_lambda) is proportional to E_{lambda'}, or to XYZ at the
        // parameters mapping to the triangle member
        for p in [5u64, 7, 11, 13, 31] {
            let f = fp(p);
            for lam in 0..p {
                let h = hesse_pencil_cubic(&f, lam).hessian_form();
                match lambda_hess(&f, ProjPoint::Finite(lam)) {
                    ProjPoint::Finite(next) => {
                        assert!(
                            h.proportional_to(&hesse_pencil_cubic(&f, next)),
                            "p={p}, lambda={lam}"
                        );
                    }
                    ProjPoint::Infinity => {
                        let mut xyz = [f.zero(); 10];
                        xyz[4] = f.one();
                        assert!(
                            h.proportional_to(&CubicForm::from_raw(f, xyz)),
                            "p={p}, lambda={lam}"
                        );
                    }
                }
            }
        }
    }
}
