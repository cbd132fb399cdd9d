//! Exact arithmetic in prime fields F_p (p odd, p not 3) and their quadratic
//! extensions F_{p^2}, with square roots, cube roots and residuosity tests.
//!
//! Elements of F_p are plain `u64` residues in `[0, p)`; elements of F_{p^2}
//! are [`Fp2`] pairs `a + b*sqrt(d)` for a fixed non-square `d`. All arithmetic
//! goes through 128-bit intermediates, so any prime below 2^63 is safe.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} is not allowed (must differ from 2 and 3)")]
    BadCharacteristic(u64),
    #[error("prime {0} exceeds the supported bound 2^63")]
    TooLarge(u64),
}

// ---------------------------------------------------------------------------
// integer helpers
// ---------------------------------------------------------------------------

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut base: u64, mut exp: u128, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all u64 inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d as u128, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Trial-division factorization; fine at the sizes this crate handles.
pub fn factor_u128(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Inverse of `a` modulo `m` (gcd(a, m) = 1), via extended Euclid.
pub(crate) fn modinv_u128(a: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "modinv of non-unit");
    old_s.rem_euclid(m as i128) as u128
}

// ---------------------------------------------------------------------------
// the field trait
// ---------------------------------------------------------------------------

/// Common surface of F_p and F_{p^2}. Elements are small `Copy` values; the
/// field context carries the modulus, so contexts are cheap to clone and
/// shareable across threads.
pub trait FiniteField: Clone {
    type Elem: Copy + Eq + Ord + std::hash::Hash + fmt::Debug;

    fn order(&self) -> u128;
    fn characteristic(&self) -> u64;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Reduce a signed integer constant into the field (the modulus lives
    /// on the context, so this takes `&self`).
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Option<Self::Elem>;
    fn is_square(&self, a: Self::Elem) -> bool;
    /// Canonical square root: among `{r, -r}` the smaller one in the
    /// field's element order. `None` for non-squares.
    fn sqrt(&self, a: Self::Elem) -> Option<Self::Elem>;
    /// Position of an element in the canonical enumeration `0..order`.
    fn index(&self, a: Self::Elem) -> usize;
    fn element(&self, idx: usize) -> Self::Elem;
    fn display(&self, a: Self::Elem) -> String;

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    fn div(&self, a: Self::Elem, b: Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    fn square(&self, a: Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn cube(&self, a: Self::Elem) -> Self::Elem {
        self.mul(self.mul(a, a), a)
    }

    fn pow(&self, a: Self::Elem, mut e: u128) -> Self::Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// All elements, in canonical enumeration order.
    fn elements(&self) -> Box<dyn Iterator<Item = Self::Elem> + '_> {
        Box::new((0..self.order() as usize).map(move |i| self.element(i)))
    }

    /// Whether the field contains a primitive cube root of unity.
    fn has_primitive_cube_root(&self) -> bool {
        self.order() % 3 == 1
    }

    /// The canonical primitive cube root of unity, when it exists
    /// (iff the field order is 1 mod 3).
    fn primitive_cube_root(&self) -> Option<Self::Elem> {
        if !self.has_primitive_cube_root() {
            return None;
        }
        // roots of x^2 + x + 1 are (-1 +- sqrt(-3)) / 2
        let s = self
            .sqrt(self.from_i64(-3))
            .expect("-3 is a square when the order is 1 mod 3");
        let half = self.inv(self.from_i64(2)).expect("2 is invertible");
        let r1 = self.mul(self.add(self.from_i64(-1), s), half);
        let r2 = self.mul(self.sub(self.from_i64(-1), s), half);
        Some(r1.min(r2))
    }

    /// All cube roots of `a`, canonically sorted. One root when cubing is a
    /// bijection (order = 2 mod 3), zero or three roots otherwise; `[0]` for 0.
    fn cube_roots(&self, a: Self::Elem) -> Vec<Self::Elem>
    where
        Self: Sized,
    {
        cube_roots_generic(self, a)
    }

    /// Whether `a` is an n-th power in the multiplicative group (true for 0).
    fn is_nth_power(&self, a: Self::Elem, n: u128) -> bool {
        if self.is_zero(a) {
            return true;
        }
        let q1 = self.order() - 1;
        let g = gcd_u128(n, q1);
        self.pow(a, q1 / g) == self.one()
    }
}

pub(crate) fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd_u128(b, a % b)
    }
}

/// Cube roots via the Adleman-Manders-Miller descent in the 3-Sylow subgroup.
fn cube_roots_generic<F: FiniteField>(f: &F, a: F::Elem) -> Vec<F::Elem> {
    if f.is_zero(a) {
        return vec![f.zero()];
    }
    let q1 = f.order() - 1;
    if !q1.is_multiple_of(3) {
        // cubing is a bijection: the root is a^(3^-1 mod q-1)
        return vec![f.pow(a, modinv_u128(3, q1))];
    }
    if f.pow(a, q1 / 3) != f.one() {
        return Vec::new();
    }
    let mut t = q1;
    let mut s = 0u32;
    while t.is_multiple_of(3) {
        t /= 3;
        s += 1;
    }
    // deterministic cubic non-residue
    let rho = f
        .elements()
        .find(|&z| !f.is_zero(z) && f.pow(z, q1 / 3) != f.one())
        .expect("a cubic non-residue exists when 3 | q-1");
    let b = f.pow(rho, t); // generator of the 3-Sylow subgroup, order 3^s
    let pow3 = |e: u32| -> u128 { 3u128.pow(e) };

    // y0^3 = a * z with z = a^(3u-1) in <b>, where 3u = 1 mod t
    let u = modinv_u128(3, t);
    let y0 = f.pow(a, u);
    let z = f.pow(a, 3 * u - 1);

    // digit-by-digit discrete log of z in <b>
    let omega = f.pow(b, pow3(s - 1));
    let b_inv = f.inv(b).expect("b is a unit");
    let mut j = 0u128;
    let mut acc = z;
    for i in 0..s {
        let e = f.pow(acc, pow3(s - 1 - i));
        let digit = if e == f.one() {
            0
        } else if e == omega {
            1
        } else {
            debug_assert_eq!(e, f.mul(omega, omega));
            2
        };
        if digit > 0 {
            j += digit as u128 * pow3(i);
            acc = f.mul(acc, f.pow(b_inv, digit as u128 * pow3(i)));
        }
    }
    debug_assert_eq!(j % 3, 0, "cubic residue has 3-divisible discrete log");
    let y = f.mul(y0, f.pow(b_inv, j / 3));
    debug_assert_eq!(f.cube(y), a);

    let w = f
        .primitive_cube_root()
        .expect("cube roots of unity exist when 3 | q-1");
    let mut roots = vec![y, f.mul(y, w), f.mul(y, f.mul(w, w))];
    roots.sort_unstable();
    roots
}

// ---------------------------------------------------------------------------
// F_p
// ---------------------------------------------------------------------------

/// The prime field F_p for an odd prime p, p != 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= 1 << 63 {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p == 2 || p == 3 {
            return Err(FieldError::BadCharacteristic(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Euler criterion: 0 for 0, 1 for nonzero squares, -1 otherwise.
    pub fn legendre(&self, x: u64) -> i32 {
        debug_assert!(x < self.p);
        if x == 0 {
            return 0;
        }
        let e = powmod(x, ((self.p - 1) / 2) as u128, self.p);
        if e == 1 {
            1
        } else {
            debug_assert_eq!(e, self.p - 1);
            -1
        }
    }

    /// Tonelli-Shanks square root, any sign.
    fn sqrt_any(&self, x: u64) -> Option<u64> {
        let p = self.p;
        if x == 0 {
            return Some(0);
        }
        if self.legendre(x) == -1 {
            return None;
        }
        if p % 4 == 3 {
            return Some(powmod(x, ((p + 1) / 4) as u128, p));
        }
        let mut q = p - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let z = (2..p).find(|&z| self.legendre(z) == -1).expect("non-residue");
        let mut m = s;
        let mut c = powmod(z, q as u128, p);
        let mut t = powmod(x, q as u128, p);
        let mut r = powmod(x, q.div_ceil(2) as u128, p);
        while t != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mulmod(t2, t2, p);
                i += 1;
            }
            let mut b = c;
            for _ in 0..m - i - 1 {
                b = mulmod(b, b, p);
            }
            m = i;
            c = mulmod(b, b, p);
            t = mulmod(t, c, p);
            r = mulmod(r, b, p);
        }
        Some(r)
    }
}

impl FiniteField for PrimeField {
    type Elem = u64;

    fn order(&self) -> u128 {
        self.p as u128
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.p as u128) as u64
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        mulmod(a, b, self.p)
    }

    fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(powmod(a, (self.p - 2) as u128, self.p))
        }
    }

    fn is_square(&self, a: u64) -> bool {
        self.legendre(a) >= 0
    }

    fn sqrt(&self, a: u64) -> Option<u64> {
        self.sqrt_any(a).map(|r| r.min(self.neg(r)))
    }

    fn index(&self, a: u64) -> usize {
        a as usize
    }

    fn element(&self, idx: usize) -> u64 {
        debug_assert!((idx as u128) < self.order());
        idx as u64
    }

    fn display(&self, a: u64) -> String {
        a.to_string()
    }
}

// ---------------------------------------------------------------------------
// F_{p^2}
// ---------------------------------------------------------------------------

/// An element `a + b*sqrt(d)` of a quadratic extension. The canonical order
/// compares `b` first, then `a`, matching the enumeration index `b*p + a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp2 {
    pub a: u64,
    pub b: u64,
}

impl Fp2 {
    pub const fn new(a: u64, b: u64) -> Self {
        Fp2 { a, b }
    }

    /// Whether the element lies in the base field.
    pub fn is_rational(&self) -> bool {
        self.b == 0
    }
}

impl Ord for Fp2 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.b, self.a).cmp(&(other.b, other.a))
    }
}

impl PartialOrd for Fp2 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The quadratic extension F_{p^2} = F_p(sqrt(d)).
///
/// The modulus is fixed deterministically: d = -3 when -3 is a non-square
/// (p = 2 mod 3), otherwise the smallest positive non-square. The first
/// choice makes sqrt(-3) literally the extension generator, so rationality
/// tests on second coordinates reduce to a `b == 0` check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadExtField {
    base: PrimeField,
    d: u64,
}

impl QuadExtField {
    pub fn new(base: PrimeField) -> Self {
        let d = if base.p % 3 == 2 {
            base.from_i64(-3)
        } else {
            (2..base.p)
                .find(|&z| base.legendre(z) == -1)
                .expect("a non-square exists in any odd prime field")
        };
        debug_assert_eq!(base.legendre(d), -1);
        QuadExtField { base, d }
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn embed(&self, a: u64) -> Fp2 {
        Fp2::new(a, 0)
    }

    pub fn to_base(&self, x: Fp2) -> Option<u64> {
        x.is_rational().then_some(x.a)
    }

    /// Galois conjugate a - b*sqrt(d) (the Frobenius x -> x^p).
    pub fn conj(&self, x: Fp2) -> Fp2 {
        Fp2::new(x.a, self.base.neg(x.b))
    }

    /// Norm to the base field: a^2 - d b^2.
    pub fn norm(&self, x: Fp2) -> u64 {
        let f = &self.base;
        f.sub(f.mul(x.a, x.a), f.mul(self.d, f.mul(x.b, x.b)))
    }
}

impl FiniteField for QuadExtField {
    type Elem = Fp2;

    fn order(&self) -> u128 {
        (self.base.p as u128) * (self.base.p as u128)
    }

    fn characteristic(&self) -> u64 {
        self.base.p
    }

    fn zero(&self) -> Fp2 {
        Fp2::new(0, 0)
    }

    fn one(&self) -> Fp2 {
        Fp2::new(1, 0)
    }

    fn from_i64(&self, n: i64) -> Fp2 {
        self.embed(self.base.from_i64(n))
    }

    fn add(&self, x: Fp2, y: Fp2) -> Fp2 {
        Fp2::new(self.base.add(x.a, y.a), self.base.add(x.b, y.b))
    }

    fn sub(&self, x: Fp2, y: Fp2) -> Fp2 {
        Fp2::new(self.base.sub(x.a, y.a), self.base.sub(x.b, y.b))
    }

    fn neg(&self, x: Fp2) -> Fp2 {
        Fp2::new(self.base.neg(x.a), self.base.neg(x.b))
    }

    fn mul(&self, x: Fp2, y: Fp2) -> Fp2 {
        let f = &self.base;
        let a = f.add(f.mul(x.a, y.a), f.mul(self.d, f.mul(x.b, y.b)));
        let b = f.add(f.mul(x.a, y.b), f.mul(x.b, y.a));
        Fp2::new(a, b)
    }

    fn inv(&self, x: Fp2) -> Option<Fp2> {
        if self.is_zero(x) {
            return None;
        }
        let n_inv = self.base.inv(self.norm(x)).expect("nonzero norm");
        let c = self.conj(x);
        Some(Fp2::new(
            self.base.mul(c.a, n_inv),
            self.base.mul(c.b, n_inv),
        ))
    }

    fn is_square(&self, x: Fp2) -> bool {
        // x^(q+1) = norm(x), and x is a square iff its norm is one in F_p
        self.is_zero(x) || self.base.legendre(self.norm(x)) == 1
    }

    fn sqrt(&self, x: Fp2) -> Option<Fp2> {
        let f = &self.base;
        let r = if self.is_zero(x) {
            self.zero()
        } else if x.b == 0 {
            match f.sqrt_any(x.a) {
                Some(r) => self.embed(r),
                // a = d * (a/d) with a/d a square
                None => {
                    let c = f.sqrt_any(f.mul(x.a, f.inv(self.d)?))?;
                    Fp2::new(0, c)
                }
            }
        } else {
            // (u + v sqrt(d))^2 = x: u^2 and d v^2 are the roots of
            // t^2 - a t + d b^2 / 4.
            let n = self.norm(x);
            let s = f.sqrt_any(n)?;
            let half = f.inv(2).expect("odd characteristic");
            let t1 = f.mul(f.add(x.a, s), half);
            let u2 = if f.legendre(t1) == 1 {
                t1
            } else {
                f.mul(f.sub(x.a, s), half)
            };
            let u = f.sqrt_any(u2)?;
            let v = f.mul(x.b, f.inv(f.mul(2, u))?);
            Fp2::new(u, v)
        };
        Some(r.min(self.neg(r)))
    }

    fn index(&self, x: Fp2) -> usize {
        (x.b as usize) * (self.base.p as usize) + x.a as usize
    }

    fn element(&self, idx: usize) -> Fp2 {
        debug_assert!((idx as u128) < self.order());
        let p = self.base.p as usize;
        Fp2::new((idx % p) as u64, (idx / p) as u64)
    }

    fn display(&self, x: Fp2) -> String {
        if x.b == 0 {
            x.a.to_string()
        } else if x.a == 0 {
            format!("{}w", x.b)
        } else {
            format!("{}+{}w", x.a, x.b)
        }
    }
}
