//! Points of P^1 and the rational self-maps driving the Hessian dynamics:
//! the family `F_{k,l} : [u:v] -> [(u+kv)^3 : l u^2 v]`, the coordinate
//! change `Phi_{k,k'}`, the x-level endomorphism `Psi_k`, the cubing map,
//! the Hesse-pencil lambda step, and the pencil symmetry group action.
//!
//! All maps are total on P^1: with k and l invertible, numerator and
//! denominator never vanish simultaneously.

use thiserror::Error;

use crate::field::FiniteField;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjError {
    #[error("map parameter must be nonzero")]
    ZeroParameter,
    #[error("the field has no primitive cube root of unity")]
    NoCubeRootOfUnity,
}

/// A point of P^1, normalized to the affine chart `[x:1]` or to `[1:0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint<E> {
    Finite(E),
    Infinity,
}

impl<E: Copy> ProjPoint<E> {
    pub fn finite(self) -> Option<E> {
        match self {
            ProjPoint::Finite(x) => Some(x),
            ProjPoint::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }
}

/// Vertex id of a point in the canonical P^1 enumeration:
/// `[0:1], [1:1], ..., [q-1:1], [1:0]`.
pub fn proj_index<F: FiniteField>(f: &F, pt: ProjPoint<F::Elem>) -> usize {
    match pt {
        ProjPoint::Finite(x) => f.index(x),
        ProjPoint::Infinity => f.order() as usize,
    }
}

pub fn proj_element<F: FiniteField>(f: &F, idx: usize) -> ProjPoint<F::Elem> {
    if idx == f.order() as usize {
        ProjPoint::Infinity
    } else {
        ProjPoint::Finite(f.element(idx))
    }
}

pub fn proj_display<F: FiniteField>(f: &F, pt: ProjPoint<F::Elem>) -> String {
    match pt {
        ProjPoint::Finite(x) => f.display(x),
        ProjPoint::Infinity => "inf".to_string(),
    }
}

/// The projective map `[u:v] -> [(u+kv)^3 : l u^2 v]` for nonzero k, l.
#[derive(Debug, Clone)]
pub struct FklMap<F: FiniteField> {
    field: F,
    k: F::Elem,
    l: F::Elem,
}

impl<F: FiniteField> FklMap<F> {
    pub fn new(field: F, k: F::Elem, l: F::Elem) -> Result<Self, ProjError> {
        if field.is_zero(k) || field.is_zero(l) {
            return Err(ProjError::ZeroParameter);
        }
        Ok(FklMap { field, k, l })
    }

    pub fn k(&self) -> F::Elem {
        self.k
    }

    pub fn l(&self) -> F::Elem {
        self.l
    }

    pub fn eval(&self, pt: ProjPoint<F::Elem>) -> ProjPoint<F::Elem> {
        let f = &self.field;
        match pt {
            ProjPoint::Infinity => ProjPoint::Infinity,
            // [0:1] -> [k^3 : 0] = [1:0]
            ProjPoint::Finite(x) if f.is_zero(x) => ProjPoint::Infinity,
            ProjPoint::Finite(x) => {
                let num = f.cube(f.add(x, self.k));
                let den = f.mul(self.l, f.square(x));
                ProjPoint::Finite(f.div(num, den).expect("x and l are nonzero"))
            }
        }
    }
}

/// The Hessian map on j-invariants, `j -> (6912 - j)^3 / (27 j^2)`,
/// as the total projective map with k = -6912, l = -27.
pub fn hess_map<F: FiniteField>(field: &F) -> FklMap<F> {
    FklMap::new(field.clone(), field.from_i64(-6912), field.from_i64(-27))
        .expect("-6912 and -27 are units away from characteristic 2 and 3")
}

/// One Hessian step on P^1. `j = 0` and `j = inf` both map to `inf`.
pub fn hess_j<F: FiniteField>(field: &F, pt: ProjPoint<F::Elem>) -> ProjPoint<F::Elem> {
    hess_map(field).eval(pt)
}

/// The coordinate change `Phi_{k,k'} : [u:v] -> [ku : k'v]`;
/// inverse to `Phi_{k',k}`.
pub fn phi<F: FiniteField>(
    f: &F,
    k: F::Elem,
    kp: F::Elem,
    pt: ProjPoint<F::Elem>,
) -> Result<ProjPoint<F::Elem>, ProjError> {
    if f.is_zero(k) || f.is_zero(kp) {
        return Err(ProjError::ZeroParameter);
    }
    Ok(match pt {
        ProjPoint::Infinity => ProjPoint::Infinity,
        ProjPoint::Finite(x) => {
            ProjPoint::Finite(f.div(f.mul(k, x), kp).expect("k' is nonzero"))
        }
    })
}

/// The x-level endomorphism `Psi_k : [u:v] -> [u^3 + kv^3 : -3u^2 v]`.
#[derive(Debug, Clone)]
pub struct PsiMap<F: FiniteField> {
    field: F,
    k: F::Elem,
}

impl<F: FiniteField> PsiMap<F> {
    pub fn new(field: F, k: F::Elem) -> Result<Self, ProjError> {
        if field.is_zero(k) {
            return Err(ProjError::ZeroParameter);
        }
        Ok(PsiMap { field, k })
    }

    pub fn k(&self) -> F::Elem {
        self.k
    }

    pub fn eval(&self, pt: ProjPoint<F::Elem>) -> ProjPoint<F::Elem> {
        let f = &self.field;
        match pt {
            ProjPoint::Infinity => ProjPoint::Infinity,
            // [0:1] -> [k:0] = [1:0]
            ProjPoint::Finite(x) if f.is_zero(x) => ProjPoint::Infinity,
            ProjPoint::Finite(x) => {
                let num = f.add(f.cube(x), self.k);
                let den = f.mul(f.from_i64(-3), f.square(x));
                ProjPoint::Finite(f.div(num, den).expect("x is nonzero"))
            }
        }
    }
}

/// Convenience wrapper for a single `Psi_k` evaluation.
pub fn psi_proj<F: FiniteField>(
    field: &F,
    k: F::Elem,
    pt: ProjPoint<F::Elem>,
) -> Result<ProjPoint<F::Elem>, ProjError> {
    Ok(PsiMap::new(field.clone(), k)?.eval(pt))
}

/// The cubing map `nu : [u:v] -> [u^3 : v^3]`, a bijection iff q = 2 mod 3.
pub fn nu<F: FiniteField>(f: &F, pt: ProjPoint<F::Elem>) -> ProjPoint<F::Elem> {
    match pt {
        ProjPoint::Infinity => ProjPoint::Infinity,
        ProjPoint::Finite(x) => ProjPoint::Finite(f.cube(x)),
    }
}

/// The Hesse-pencil parameter step `lambda -> -(108 + lambda^3)/(3 lambda^2)`,
/// realized as `Psi_108`. Sends 0 (and inf) to inf: the Hessian of the Fermat
/// member is the triangle member.
pub fn lambda_hess<F: FiniteField>(f: &F, pt: ProjPoint<F::Elem>) -> ProjPoint<F::Elem> {
    PsiMap::new(f.clone(), f.from_i64(108))
        .expect("108 is a unit away from characteristic 2 and 3")
        .eval(pt)
}

/// j-invariant of the Hesse-pencil member with parameter lambda:
/// `j = lambda^3 (216 - lambda^3)^3 / (lambda^3 + 27)^3`.
/// `None` for the singular members (lambda^3 = -27) and for the triangle
/// member lambda = inf.
pub fn j_from_lambda<F: FiniteField>(f: &F, lam: ProjPoint<F::Elem>) -> Option<F::Elem> {
    let x = lam.finite()?;
    let x3 = f.cube(x);
    let den = f.add(x3, f.from_i64(27));
    if f.is_zero(den) {
        return None;
    }
    let num = f.mul(x3, f.cube(f.sub(f.from_i64(216), x3)));
    Some(f.div(num, f.cube(den)).expect("denominator is nonzero"))
}

/// Generators of the pencil symmetry action on P^1 that move lambda.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PencilGen {
    /// `[lambda:1] -> [3(6 - lambda) : lambda + 3]`, an involution.
    G3,
    /// `[lambda:1] -> [eps^2 lambda : 1]`; needs a cube root of unity.
    G4,
}

/// Apply one pencil symmetry generator.
pub fn pencil_action<F: FiniteField>(
    f: &F,
    gen: PencilGen,
    pt: ProjPoint<F::Elem>,
) -> Result<ProjPoint<F::Elem>, ProjError> {
    match gen {
        PencilGen::G3 => Ok(match pt {
            ProjPoint::Infinity => ProjPoint::Finite(f.from_i64(-3)),
            ProjPoint::Finite(x) => {
                let num = f.mul(f.from_i64(3), f.sub(f.from_i64(6), x));
                let den = f.add(x, f.from_i64(3));
                match f.div(num, den) {
                    Some(v) => ProjPoint::Finite(v),
                    None => ProjPoint::Infinity,
                }
            }
        }),
        PencilGen::G4 => {
            let eps = f.primitive_cube_root().ok_or(ProjError::NoCubeRootOfUnity)?;
            Ok(match pt {
                ProjPoint::Infinity => ProjPoint::Infinity,
                ProjPoint::Finite(x) => ProjPoint::Finite(f.mul(f.square(eps), x)),
            })
        }
    }
}

/// Apply a word in the pencil generators, leftmost factor applied last.
pub fn pencil_word<F: FiniteField>(
    f: &F,
    word: &[PencilGen],
    pt: ProjPoint<F::Elem>,
) -> Result<ProjPoint<F::Elem>, ProjError> {
    let mut cur = pt;
    for gen in word.iter().rev() {
        cur = pencil_action(f, *gen, cur)?;
    }
    Ok(cur)
}

/// Orbit of a point under the group generated by the pencil symmetries
/// (size at most 12), in canonical order.
pub fn pencil_orbit<F: FiniteField>(
    f: &F,
    pt: ProjPoint<F::Elem>,
) -> Result<Vec<ProjPoint<F::Elem>>, ProjError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut stack = vec![pt];
    seen.insert(pt);
    while let Some(cur) = stack.pop() {
        for gen in [PencilGen::G3, PencilGen::G4] {
            let next = pencil_action(f, gen, cur)?;
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// All nonsingular pencil parameters lambda with `j(E_lambda) = j`,
/// by exhaustive enumeration, in canonical order.
pub fn j_fiber<F: FiniteField>(f: &F, j: ProjPoint<F::Elem>) -> Vec<F::Elem> {
    let target = match j {
        ProjPoint::Finite(x) => x,
        ProjPoint::Infinity => return Vec::new(),
    };
    f.elements()
        .filter(|&lam| j_from_lambda(f, ProjPoint::Finite(lam)) == Some(target))
        .collect()
}
