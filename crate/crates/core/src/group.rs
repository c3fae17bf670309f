//! Elements of GL2(F_q), the standard generators, and group closure.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use serde::Serialize;

use crate::gf::{Elt, FieldSpec};

/// The matrix `(a, b; c, d)` with entries in F_q (as element indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupElement {
    pub a: Elt,
    pub b: Elt,
    pub c: Elt,
    pub d: Elt,
}

impl GroupElement {
    pub fn new(a: Elt, b: Elt, c: Elt, d: Elt) -> GroupElement {
        GroupElement { a, b, c, d }
    }

    pub fn identity() -> GroupElement {
        GroupElement::new(1, 0, 0, 1)
    }

    pub fn det(&self, field: &FieldSpec) -> Elt {
        let k = field.fq();
        k.sub(k.mul(self.a, self.d), k.mul(self.b, self.c))
    }

    pub fn is_invertible(&self, field: &FieldSpec) -> bool {
        self.det(field) != 0
    }

    pub fn mul(&self, other: &GroupElement, field: &FieldSpec) -> GroupElement {
        let k = field.fq();
        let dot = |x: Elt, y: Elt, z: Elt, w: Elt| k.add(k.mul(x, y), k.mul(z, w));
        GroupElement {
            a: dot(self.a, other.a, self.b, other.c),
            b: dot(self.a, other.b, self.b, other.d),
            c: dot(self.c, other.a, self.d, other.c),
            d: dot(self.c, other.b, self.d, other.d),
        }
    }

    pub fn inverse(&self, field: &FieldSpec) -> Option<GroupElement> {
        let k = field.fq();
        let di = k.inv(self.det(field)).ok()?;
        Some(GroupElement {
            a: k.mul(self.d, di),
            b: k.neg(k.mul(self.b, di)),
            c: k.neg(k.mul(self.c, di)),
            d: k.mul(self.a, di),
        })
    }

    pub fn pow(&self, mut e: u64, field: &FieldSpec) -> GroupElement {
        let mut base = *self;
        let mut acc = GroupElement::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            base = base.mul(&base, field);
            e >>= 1;
        }
        acc
    }

    pub fn order(&self, field: &FieldSpec) -> u64 {
        let id = GroupElement::identity();
        let mut x = *self;
        let mut n = 1;
        while x != id {
            x = x.mul(self, field);
            n += 1;
        }
        n
    }

    pub fn random<R: Rng>(field: &FieldSpec, rng: &mut R) -> GroupElement {
        let q = field.q();
        loop {
            let mut e = || rng.gen_range(0..q) as Elt;
            let g = GroupElement::new(e(), e(), e(), e());
            if g.is_invertible(field) {
                return g;
            }
        }
    }
}

/// `diag(g, 1)`, `(1, 1; 0, 1)` and `(0, 1; 1, 0)` with `g` primitive in F_q.
pub fn generators(field: &FieldSpec) -> [GroupElement; 3] {
    [
        GroupElement::new(field.q_primitive(), 0, 0, 1),
        GroupElement::new(1, 1, 0, 1),
        GroupElement::new(0, 1, 1, 0),
    ]
}

/// Breadth-first closure of the generated group.
pub fn closure(field: &FieldSpec, gens: &[GroupElement]) -> HashSet<GroupElement> {
    let mut seen = HashSet::from([GroupElement::identity()]);
    let mut queue = VecDeque::from([GroupElement::identity()]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.mul(&x, field);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Every element of GL2(F_q).
pub fn all_elements(field: &FieldSpec) -> Vec<GroupElement> {
    let q = field.q() as Elt;
    let mut out = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let g = GroupElement::new(a, b, c, d);
                    if g.is_invertible(field) {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}
