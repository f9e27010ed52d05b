//! Dense univariate polynomials over a [`FieldSpec`].

use std::fmt;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{Embedding, Extension, FieldElement, FieldSpec};

/// Coefficients low to high, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPoly {
    field: FieldSpec,
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display("x"))
    }
}

/// Exhaustive root scans are used below this field size.
const SCAN_LIMIT: u64 = 1 << 12;

impl UPoly {
    pub fn from_coeffs(field: &FieldSpec, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        UPoly { field: field.clone(), coeffs }
    }

    /// Polynomial with small integer coefficients, low to high.
    pub fn from_ints(field: &FieldSpec, coeffs: &[i64]) -> Self {
        Self::from_coeffs(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: &FieldSpec) -> Self {
        UPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn constant(field: &FieldSpec, c: FieldElement) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::constant(field, field.one())
    }

    pub fn x(field: &FieldSpec) -> Self {
        Self::monomial(field, field.one(), 1)
    }

    pub fn monomial(field: &FieldSpec, c: FieldElement, n: usize) -> Self {
        let mut coeffs = vec![field.zero(); n];
        coeffs.push(c);
        Self::from_coeffs(field, coeffs)
    }

    /// `x - a`
    pub fn linear(field: &FieldSpec, a: &FieldElement) -> Self {
        Self::from_coeffs(field, vec![field.neg(a), field.one()])
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.field.is_one(&self.coeffs[0])
    }

    pub fn lc(&self) -> FieldElement {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| self.field.is_one(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => f.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::from_coeffs(f, coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.field.neg(c)).collect();
        UPoly { field: self.field.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        Self::from_coeffs(&self.field, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        if f.is_prime_field() {
            let p = f.characteristic();
            let mut acc = vec![0u64; n];
            for (i, a) in self.coeffs.iter().enumerate() {
                let a = a.coords()[0] as u64;
                if a == 0 {
                    continue;
                }
                for (j, b) in other.coeffs.iter().enumerate() {
                    acc[i + j] = (acc[i + j] + a * b.coords()[0] as u64) % p;
                }
            }
            return Self::from_coeffs(f, acc.into_iter().map(|v| f.from_u64(v)).collect());
        }
        let mut out = vec![f.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = f.mul(a, b);
                f.add_assign(&mut out[i + j], &t);
            }
        }
        Self::from_coeffs(f, out)
    }

    pub fn pow(&self, n: u64) -> Self {
        let mut result = Self::one(&self.field);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, divisor: &Self) -> (Self, Self) {
        let f = &self.field;
        let d = divisor.degree().expect("polynomial division by zero");
        if self.coeffs.len() <= d {
            return (Self::zero(f), self.clone());
        }
        let lead_inv = f.inv(&divisor.lc()).unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![f.zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let c = f.mul(&rem[k + d], &lead_inv);
            if f.is_zero(&c) {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                f.sub_mul_assign(&mut rem[k + j], &c, b);
            }
            quot[k] = c;
        }
        rem.truncate(d);
        (Self::from_coeffs(f, quot), Self::from_coeffs(f, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.divrem(divisor).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(&self.lc()).unwrap();
        self.scale(&inv)
    }

    /// Monic gcd; the gcd of two zero polynomials is zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| f.scale_prime(c, i as u64)).collect();
        Self::from_coeffs(f, coeffs)
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let f = &self.field;
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.mul(&acc, x);
            f.add_assign(&mut acc, c);
        }
        acc
    }

    /// Image of the coefficients under a field embedding.
    pub fn map(&self, emb: &Embedding) -> Self {
        assert_eq!(&self.field, emb.source());
        let coeffs = self.coeffs.iter().map(|c| emb.apply(c)).collect();
        Self::from_coeffs(emb.target(), coeffs)
    }

    /// `self^n mod m`
    pub fn powmod(&self, n: &BigUint, m: &Self) -> Self {
        let base = self.rem(m);
        let mut result = Self::one(&self.field).rem(m);
        for i in (0..n.bits()).rev() {
            result = result.mul(&result).rem(m);
            if n.bit(i) {
                result = result.mul(&base).rem(m);
            }
        }
        result
    }

    pub fn is_separable(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// Product of the distinct linear factors over the coefficient field.
    fn linear_part(&self) -> Self {
        let x = Self::x(&self.field);
        let xq = x.powmod(self.field.order(), self);
        xq.sub(&x).gcd(self)
    }

    /// Distinct roots in the coefficient field, in canonical element order.
    pub fn roots(&self) -> Vec<FieldElement> {
        if self.is_zero() {
            panic!("roots of the zero polynomial");
        }
        let f = &self.field;
        let mut out = if self.degree() == Some(0) {
            Vec::new()
        } else if f.order_u64().is_some_and(|q| q <= SCAN_LIMIT) {
            f.elements().filter(|a| f.is_zero(&self.eval(a))).collect()
        } else {
            let g = self.linear_part();
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let mut out = Vec::new();
            split_linear(&g, &mut rng, &mut out);
            out
        };
        out.sort_by_cached_key(|a| f.index(a));
        out
    }

    /// Roots by the randomized splitting route regardless of field size.
    pub fn roots_by_splitting(&self) -> Vec<FieldElement> {
        let f = &self.field;
        let g = self.linear_part();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut out = Vec::new();
        split_linear(&g, &mut rng, &mut out);
        out.sort_by_cached_key(|a| f.index(a));
        out
    }

    /// Roots in the degree-d extension of the coefficient field.
    pub fn roots_in_extension(&self, d: usize) -> (Extension, Vec<FieldElement>) {
        let ext = self.field.extend(d);
        let roots = self.map(&ext.embedding).roots();
        (ext, roots)
    }

    /// Distinct-degree factorization of a squarefree polynomial: pairs
    /// (k, product of all monic irreducible factors of degree k).
    pub fn distinct_degree_factorization(&self) -> Vec<(usize, UPoly)> {
        let mut out = Vec::new();
        let mut rest = self.monic();
        let x = Self::x(&self.field);
        let q = self.field.order().clone();
        let mut xk = x.clone();
        let mut k = 0;
        while let Some(d) = rest.degree() {
            if d == 0 {
                break;
            }
            k += 1;
            if 2 * k > d {
                out.push((d, rest.clone()));
                break;
            }
            xk = xk.powmod(&q, &rest);
            let g = xk.sub(&x).gcd(&rest);
            if g.degree().unwrap_or(0) > 0 {
                rest = rest.divrem(&g).0;
                xk = xk.rem(&rest);
                out.push((k, g));
            }
        }
        out
    }

    /// Degrees of the irreducible factors of a squarefree polynomial, ascending.
    pub fn factor_degrees(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, g) in self.distinct_degree_factorization() {
            for _ in 0..g.degree().unwrap() / k {
                out.push(k);
            }
        }
        out
    }

    /// Homogenized substitution `sum c_i num^i den^(n-i)` with `n = degree`;
    /// equals `den^n * self(num/den)`.
    pub fn homogeneous_compose(&self, num: &Self, den: &Self, n: usize) -> Self {
        let f = &self.field;
        let mut acc = Self::zero(f);
        let mut num_pow = Self::one(f);
        let den_pows: Vec<UPoly> = {
            let mut v = vec![Self::one(f)];
            for _ in 0..n {
                let next = v.last().unwrap().mul(den);
                v.push(next);
            }
            v
        };
        for i in 0..=n {
            let c = self.coeff(i);
            if !f.is_zero(&c) {
                acc = acc.add(&num_pow.mul(&den_pows[n - i]).scale(&c));
            }
            num_pow = num_pow.mul(num);
        }
        acc
    }

    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if f.is_zero(c) {
                continue;
            }
            let cs = f.format(c);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            parts.push(match (f.is_one(c), i) {
                (_, 0) => cs,
                (true, _) => mono,
                (false, _) => format!("{cs}*{mono}"),
            });
        }
        parts.join(" + ")
    }
}

fn split_linear(g: &UPoly, rng: &mut ChaCha8Rng, out: &mut Vec<FieldElement>) {
    let f = g.field();
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            let g = g.monic();
            out.push(f.neg(&g.coeff(0)));
        }
        Some(d) => {
            let e = (f.order() - 1u32) >> 1;
            loop {
                let delta = f.random(rng);
                let h = UPoly::from_coeffs(f, vec![delta, f.one()]);
                let t = h.powmod(&e, g).sub(&UPoly::one(f));
                let s = t.gcd(g);
                let k = s.degree().unwrap_or(0);
                if k > 0 && k < d {
                    split_linear(&s, rng, out);
                    split_linear(&g.divrem(&s).0, rng, out);
                    return;
                }
            }
        }
    }
}
