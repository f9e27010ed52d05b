//! Finite fields GF(p^e) for odd primes p.
//!
//! Every field is stored flat over its prime field: an element is the vector of
//! its `e` coordinates in the power basis of a fixed monic irreducible modulus.
//! Extensions built by [`FieldSpec::extend`] come with an explicit
//! [`Embedding`] so that elements can be carried along a chain of fields.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use smallvec::SmallVec;
use thiserror::Error;

use crate::upoly::UPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("characteristic {0} is too large (must be below 2^31)")]
    CharacteristicTooLarge(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus is not a monic irreducible polynomial of degree {0}")]
    BadModulus(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("{0} has no root of unity of order divisible by the characteristic")]
    OrderDivisibleByP(u64),
}

/// Coordinates of an element in the power basis of the field modulus.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(pub(crate) SmallVec<[u32; 4]>);

impl FieldElement {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

struct Inner {
    p: u32,
    degree: usize,
    /// Monic modulus over GF(p), low to high, length `degree + 1`.
    modulus: Vec<u32>,
    order: BigUint,
    id: u64,
}

/// A finite field GF(p^e). Cloning is cheap.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}
impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.modulus.hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.degree)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.degree == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.degree)
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factors of `n` without multiplicity, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

static NEXT_ID: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(1);

/// Builds GF(p^e) with the lexicographically smallest monic irreducible modulus.
pub fn make_field(p: u64, e: usize) -> Result<FieldSpec, FieldError> {
    check_char(p)?;
    if e == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let prime = FieldSpec::raw(p as u32, vec![0, 1]);
    if e == 1 {
        return Ok(prime);
    }
    let modulus = smallest_irreducible(&prime, e);
    Ok(FieldSpec::raw(p as u32, modulus))
}

/// Builds GF(p^e) from an explicit modulus, given low to high over GF(p).
pub fn make_field_with_modulus(p: u64, modulus: &[u64]) -> Result<FieldSpec, FieldError> {
    check_char(p)?;
    if modulus.len() < 2 {
        return Err(FieldError::ZeroDegree);
    }
    let e = modulus.len() - 1;
    let m: Vec<u32> = modulus.iter().map(|&c| (c % p) as u32).collect();
    if *m.last().unwrap() != 1 {
        return Err(FieldError::BadModulus(e));
    }
    let prime = FieldSpec::raw(p as u32, vec![0, 1]);
    if e == 1 {
        return Ok(prime);
    }
    let poly = UPoly::from_coeffs(&prime, m.iter().map(|&c| prime.from_u64(c as u64)).collect());
    if !is_irreducible(&poly) {
        return Err(FieldError::BadModulus(e));
    }
    Ok(FieldSpec::raw(p as u32, m))
}

fn check_char(p: u64) -> Result<(), FieldError> {
    if p == 2 {
        return Err(FieldError::CharacteristicTwo);
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if p >= 1 << 31 {
        return Err(FieldError::CharacteristicTooLarge(p));
    }
    Ok(())
}

/// Rabin's test over a prime field.
fn is_irreducible(f: &UPoly) -> bool {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    if n == 1 {
        return true;
    }
    let x = UPoly::x(f.field());
    let p = BigUint::from(f.field().characteristic());
    let frob = |g: &UPoly| g.powmod(&p, f);
    let mut powers = vec![x.clone()];
    for _ in 0..n {
        let next = frob(powers.last().unwrap());
        powers.push(next);
    }
    if powers[n] != x.rem(f) {
        return false;
    }
    for l in prime_factors(n as u64) {
        let k = n / l as usize;
        let g = powers[k].sub(&x).gcd(f);
        if g.degree() != Some(0) {
            return false;
        }
    }
    true
}

fn smallest_irreducible(prime: &FieldSpec, e: usize) -> Vec<u32> {
    let p = prime.characteristic();
    let mut digits = vec![0u64; e];
    loop {
        // Odometer with the constant term as least significant digit.
        let mut i = 0;
        loop {
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
            assert!(i < e, "no irreducible polynomial found");
        }
        if digits[0] == 0 {
            continue;
        }
        let mut coeffs: Vec<FieldElement> = digits.iter().map(|&c| prime.from_u64(c)).collect();
        coeffs.push(prime.one());
        let poly = UPoly::from_coeffs(prime, coeffs);
        if is_irreducible(&poly) {
            let mut m: Vec<u32> = digits.iter().map(|&c| c as u32).collect();
            m.push(1);
            return m;
        }
    }
}

#[inline]
fn mulmod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
fn addmod(a: u32, b: u32, p: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
fn submod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(p as i64) as u32
}

impl FieldSpec {
    fn raw(p: u32, modulus: Vec<u32>) -> Self {
        let degree = modulus.len() - 1;
        let order = BigUint::from(p).pow(degree as u32);
        let id = NEXT_ID.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        FieldSpec(Arc::new(Inner { p, degree, modulus, order, id }))
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p as u64
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    /// Number of elements.
    pub fn order(&self) -> &BigUint {
        &self.0.order
    }

    /// Number of elements if it fits in a `u64`.
    pub fn order_u64(&self) -> Option<u64> {
        self.0.order.to_u64()
    }

    /// Modulus over GF(p), low to high.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.degree == 1
    }

    /// Stable identity of this particular `FieldSpec` allocation.
    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn prime_field(&self) -> FieldSpec {
        if self.is_prime_field() {
            self.clone()
        } else {
            FieldSpec::raw(self.0.p, vec![0, 1])
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(SmallVec::from_elem(0, self.0.degree))
    }

    pub fn one(&self) -> FieldElement {
        self.from_u64(1)
    }

    pub fn from_u64(&self, v: u64) -> FieldElement {
        let mut c = SmallVec::from_elem(0, self.0.degree);
        c[0] = (v % self.0.p as u64) as u32;
        FieldElement(c)
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        self.from_u64(v.rem_euclid(self.0.p as i64) as u64)
    }

    /// Element with the given coordinates; entries are reduced mod p.
    pub fn from_coords(&self, coords: &[u64]) -> FieldElement {
        let mut c = SmallVec::from_elem(0, self.0.degree);
        for (i, &v) in coords.iter().enumerate().take(self.0.degree) {
            c[i] = (v % self.0.p as u64) as u32;
        }
        FieldElement(c)
    }

    /// The class of the indeterminate modulo the field modulus.
    pub fn generator(&self) -> FieldElement {
        if self.0.degree == 1 {
            let m0 = self.0.modulus[0];
            return FieldElement(SmallVec::from_elem(submod(0, m0, self.0.p), 1));
        }
        let mut c = SmallVec::from_elem(0, self.0.degree);
        c[1] = 1;
        FieldElement(c)
    }

    /// True if `a` is a valid element of this field.
    pub fn contains(&self, a: &FieldElement) -> bool {
        a.0.len() == self.0.degree && a.0.iter().all(|&c| c < self.0.p)
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self, a: &FieldElement) -> bool {
        a.0[0] == 1 && a.0[1..].iter().all(|&c| c == 0)
    }

    /// Value of a prime field element as an integer, if `a` lies in GF(p).
    pub fn as_prime(&self, a: &FieldElement) -> Option<u64> {
        if a.0[1..].iter().all(|&c| c == 0) {
            Some(a.0[0] as u64)
        } else {
            None
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.0.p;
        FieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| addmod(x, y, p)).collect())
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.0.p;
        FieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| submod(x, y, p)).collect())
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let p = self.0.p;
        FieldElement(a.0.iter().map(|&x| if x == 0 { 0 } else { p - x }).collect())
    }

    pub fn add_assign(&self, a: &mut FieldElement, b: &FieldElement) {
        let p = self.0.p;
        for (x, &y) in a.0.iter_mut().zip(&b.0) {
            *x = addmod(*x, y, p);
        }
    }

    /// `a -= b * c`
    pub fn sub_mul_assign(&self, a: &mut FieldElement, b: &FieldElement, c: &FieldElement) {
        if self.0.degree == 1 {
            let p = self.0.p;
            a.0[0] = submod(a.0[0], mulmod(b.0[0], c.0[0], p), p);
        } else {
            let t = self.mul(b, c);
            let p = self.0.p;
            for (x, &y) in a.0.iter_mut().zip(&t.0) {
                *x = submod(*x, y, p);
            }
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.0.p;
        let e = self.0.degree;
        if e == 1 {
            return FieldElement(SmallVec::from_elem(mulmod(a.0[0], b.0[0], p), 1));
        }
        let pp = p as u64;
        let mut acc = [0u64; 64];
        let mut heap;
        let prod: &mut [u64] = if 2 * e - 1 <= 64 {
            &mut acc[..2 * e - 1]
        } else {
            heap = vec![0u64; 2 * e - 1];
            &mut heap
        };
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % pp;
            }
        }
        let m = &self.0.modulus;
        for i in (e..2 * e - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..e {
                let k = i - e + j;
                prod[k] = (prod[k] + (pp - c) * m[j] as u64) % pp;
            }
        }
        FieldElement(prod[..e].iter().map(|&v| v as u32).collect())
    }

    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn scale_prime(&self, a: &FieldElement, k: u64) -> FieldElement {
        let p = self.0.p;
        let k = (k % p as u64) as u32;
        FieldElement(a.0.iter().map(|&x| mulmod(x, k, p)).collect())
    }

    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if self.is_zero(a) {
            return None;
        }
        let p = self.0.p;
        if self.0.degree == 1 {
            return Some(FieldElement(SmallVec::from_elem(inv_mod(a.0[0], p), 1)));
        }
        let e = self.order() - 2u32;
        Some(self.pow_big(a, &e))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn pow(&self, a: &FieldElement, n: u64) -> FieldElement {
        let mut result = self.one();
        let mut base = a.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul(&result, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.square(&base);
            }
        }
        result
    }

    pub fn pow_big(&self, a: &FieldElement, n: &BigUint) -> FieldElement {
        let mut result = self.one();
        for i in (0..n.bits()).rev() {
            result = self.square(&result);
            if n.bit(i) {
                result = self.mul(&result, a);
            }
        }
        result
    }

    /// Signed power; `None` for a negative power of zero.
    pub fn pow_i64(&self, a: &FieldElement, n: i64) -> Option<FieldElement> {
        if n >= 0 {
            Some(self.pow(a, n as u64))
        } else {
            self.inv(a).map(|ai| self.pow(&ai, n.unsigned_abs()))
        }
    }

    /// The p-th power map.
    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        self.pow(a, self.0.p as u64)
    }

    /// Smallest k such that `a` lies in the subfield of degree k over GF(p).
    pub fn element_degree(&self, a: &FieldElement) -> usize {
        let mut b = a.clone();
        for k in 1..=self.0.degree {
            b = self.frobenius(&b);
            if &b == a {
                return k;
            }
        }
        self.0.degree
    }

    /// Euler's criterion.
    pub fn is_square(&self, a: &FieldElement) -> bool {
        if self.is_zero(a) {
            return true;
        }
        let e = (self.order() - 1u32) >> 1;
        self.is_one(&self.pow_big(a, &e))
    }

    /// A square root by Tonelli-Shanks; the returned root is the one with the
    /// smaller index.
    pub fn sqrt(&self, a: &FieldElement) -> Option<FieldElement> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if !self.is_square(a) {
            return None;
        }
        let qm1 = self.order() - 1u32;
        let mut s = 0u64;
        let mut odd = qm1.clone();
        while !odd.bit(0) {
            odd >>= 1;
            s += 1;
        }
        let z = self.elements().find(|z| !self.is_zero(z) && !self.is_square(z)).unwrap();
        let mut m = s;
        let mut c = self.pow_big(&z, &odd);
        let mut t = self.pow_big(a, &odd);
        let mut r = self.pow_big(a, &((&odd + 1u32) >> 1));
        while !self.is_one(&t) {
            let mut i = 0;
            let mut tt = t.clone();
            while !self.is_one(&tt) {
                tt = self.square(&tt);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = self.square(&b);
            }
            m = i;
            c = self.square(&b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        let other = self.neg(&r);
        Some(if self.index(&other) < self.index(&r) { other } else { r })
    }

    /// Position of `a` in the canonical enumeration (base-p digits, constant
    /// coordinate least significant).
    pub fn index(&self, a: &FieldElement) -> BigUint {
        let mut n = BigUint::zero();
        for &c in a.0.iter().rev() {
            n = n * self.0.p + c;
        }
        n
    }

    pub fn from_index(&self, n: &BigUint) -> FieldElement {
        let mut n = n.clone();
        let mut c = SmallVec::from_elem(0, self.0.degree);
        for slot in c.iter_mut() {
            *slot = (&n % self.0.p).to_u32().unwrap();
            n /= self.0.p;
        }
        FieldElement(c)
    }

    /// All elements in canonical order. Only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let p = self.0.p;
        let e = self.0.degree;
        let mut cur: Option<SmallVec<[u32; 4]>> = Some(SmallVec::from_elem(0, e));
        std::iter::from_fn(move || {
            let out = cur.clone()?;
            let mut next = out.clone();
            let mut i = 0;
            loop {
                if i == e {
                    cur = None;
                    break;
                }
                next[i] += 1;
                if next[i] < p {
                    cur = Some(next);
                    break;
                }
                next[i] = 0;
                i += 1;
            }
            Some(FieldElement(out))
        })
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let p = self.0.p;
        FieldElement((0..self.0.degree).map(|_| rng.gen_range(0..p)).collect())
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: &FieldElement) -> Option<BigUint> {
        if self.is_zero(a) {
            return None;
        }
        let mut n = self.order() - 1u32;
        for l in big_prime_factors(&n) {
            while (&n % &l).is_zero() {
                let m = &n / &l;
                if self.is_one(&self.pow_big(a, &m)) {
                    n = m;
                } else {
                    break;
                }
            }
        }
        Some(n)
    }

    /// The degree `e*d` extension over GF(p), with the embedding of `self`.
    pub fn extend(&self, d: usize) -> Extension {
        assert!(d >= 1);
        if d == 1 {
            return Extension { field: self.clone(), embedding: Embedding::identity(self) };
        }
        let big = make_field(self.characteristic(), self.degree() * d).expect("valid field");
        let embedding = Embedding::canonical(self, &big);
        Extension { field: big, embedding }
    }

    /// Element representing `s` for rendering: integers for GF(p), else the
    /// coordinate polynomial in `z`.
    pub fn format(&self, a: &FieldElement) -> String {
        if let Some(v) = self.as_prime(a) {
            return v.to_string();
        }
        let mut parts = Vec::new();
        for (i, &c) in a.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        parts.join("+")
    }
}

fn big_prime_factors(n: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut n = n.clone();
    let mut d = BigUint::from(2u32);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 1u32;
        if d > BigUint::from(1u64 << 22) {
            // Remaining cofactor is treated as prime; only used to order
            // elements, where a composite cofactor just yields a multiple.
            break;
        }
    }
    if n > BigUint::one() {
        out.push(n);
    }
    out
}

/// Field homomorphism `from -> to`, determined by the image of the generator.
#[derive(Clone, Debug)]
pub struct Embedding {
    from: FieldSpec,
    to: FieldSpec,
    /// Powers of the generator image, `degree(from)` of them.
    basis: Vec<FieldElement>,
}

/// A field together with the embedding of the field it was built from.
#[derive(Clone, Debug)]
pub struct Extension {
    pub field: FieldSpec,
    pub embedding: Embedding,
}

impl Embedding {
    pub fn identity(f: &FieldSpec) -> Self {
        Self::with_image(f, f, f.generator())
    }

    fn with_image(from: &FieldSpec, to: &FieldSpec, image: FieldElement) -> Self {
        let mut basis = Vec::with_capacity(from.degree());
        let mut cur = to.one();
        for _ in 0..from.degree() {
            basis.push(cur.clone());
            cur = to.mul(&cur, &image);
        }
        Embedding { from: from.clone(), to: to.clone(), basis }
    }

    /// Sends the generator of `from` to the smallest root of its modulus in `to`.
    pub fn canonical(from: &FieldSpec, to: &FieldSpec) -> Self {
        assert_eq!(from.characteristic(), to.characteristic());
        assert_eq!(to.degree() % from.degree(), 0, "{from} does not embed in {to}");
        if from.is_prime_field() {
            return Embedding { from: from.clone(), to: to.clone(), basis: vec![to.one()] };
        }
        let m = UPoly::from_coeffs(to, from.modulus().iter().map(|&c| to.from_u64(c as u64)).collect());
        let roots = m.roots();
        Self::with_image(from, to, roots[0].clone())
    }

    pub fn source(&self) -> &FieldSpec {
        &self.from
    }

    pub fn target(&self) -> &FieldSpec {
        &self.to
    }

    pub fn apply(&self, a: &FieldElement) -> FieldElement {
        if self.from.is_prime_field() {
            return self.to.from_u64(a.0[0] as u64);
        }
        let mut out = self.to.zero();
        for (&c, b) in a.0.iter().zip(&self.basis) {
            if c != 0 {
                let t = self.to.scale_prime(b, c as u64);
                self.to.add_assign(&mut out, &t);
            }
        }
        out
    }

    /// `other ∘ self`
    pub fn then(&self, other: &Embedding) -> Embedding {
        assert_eq!(self.to, other.from);
        Embedding {
            from: self.from.clone(),
            to: other.to.clone(),
            basis: self.basis.iter().map(|b| other.apply(b)).collect(),
        }
    }
}

/// A primitive root of unity of order `n` and the extension containing it.
#[derive(Clone, Debug)]
pub struct RootOfUnity {
    /// Smallest d with n | q^d - 1.
    pub degree: usize,
    pub extension: Extension,
    pub root: FieldElement,
}

/// Smallest extension GF(q^d) of `field` containing a primitive n-th root of
/// unity, and the first such root in canonical element order.
pub fn root_of_unity(field: &FieldSpec, n: u64) -> Result<RootOfUnity, FieldError> {
    let p = field.characteristic();
    if n == 0 || n % p == 0 {
        return Err(FieldError::OrderDivisibleByP(n));
    }
    let q_mod = (field.order() % n).to_u64().unwrap();
    let mut d = 1usize;
    let mut acc = q_mod % n;
    while acc != 1 % n {
        acc = acc * q_mod % n;
        d += 1;
    }
    let extension = field.extend(d);
    let big = &extension.field;
    let exp = (big.order() - 1u32) / n;
    let primes = prime_factors(n);
    let root = big
        .elements()
        .skip(1)
        .map(|z| big.pow_big(&z, &exp))
        .find(|eta| primes.iter().all(|&l| !big.is_one(&big.pow(eta, n / l))))
        .expect("cyclic group has a generator");
    Ok(RootOfUnity { degree: d, extension, root })
}

/// An element tagged with its field, with checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf {
    field: FieldSpec,
    value: FieldElement,
}

impl Gf {
    pub fn new(field: &FieldSpec, value: FieldElement) -> Result<Self, FieldError> {
        if !field.contains(&value) {
            return Err(FieldError::FieldMismatch);
        }
        Ok(Gf { field: field.clone(), value })
    }

    pub fn from_i64(field: &FieldSpec, v: i64) -> Self {
        Gf { field: field.clone(), value: field.from_i64(v) }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn value(&self) -> &FieldElement {
        &self.value
    }

    fn same(&self, other: &Gf) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn try_add(&self, other: &Gf) -> Result<Gf, FieldError> {
        self.same(other)?;
        Ok(Gf { field: self.field.clone(), value: self.field.add(&self.value, &other.value) })
    }

    pub fn try_sub(&self, other: &Gf) -> Result<Gf, FieldError> {
        self.same(other)?;
        Ok(Gf { field: self.field.clone(), value: self.field.sub(&self.value, &other.value) })
    }

    pub fn try_mul(&self, other: &Gf) -> Result<Gf, FieldError> {
        self.same(other)?;
        Ok(Gf { field: self.field.clone(), value: self.field.mul(&self.value, &other.value) })
    }

    pub fn try_div(&self, other: &Gf) -> Result<Gf, FieldError> {
        self.same(other)?;
        let value = self.field.div(&self.value, &other.value).ok_or(FieldError::DivisionByZero)?;
        Ok(Gf { field: self.field.clone(), value })
    }

    pub fn try_inv(&self) -> Result<Gf, FieldError> {
        let value = self.field.inv(&self.value).ok_or(FieldError::DivisionByZero)?;
        Ok(Gf { field: self.field.clone(), value })
    }

    pub fn neg(&self) -> Gf {
        Gf { field: self.field.clone(), value: self.field.neg(&self.value) }
    }

    pub fn pow(&self, n: &BigUint) -> Gf {
        Gf { field: self.field.clone(), value: self.field.pow_big(&self.value, n) }
    }
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format(&self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_field_inverse() {
        let f = make_field(11, 1).unwrap();
        assert_eq!(f.inv(&f.from_u64(3)).unwrap(), f.from_u64(4));
        assert!(f.inv(&f.zero()).is_none());
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert_eq!(make_field(2, 1).unwrap_err(), FieldError::CharacteristicTwo);
        assert_eq!(make_field(9, 1).unwrap_err(), FieldError::NotPrime(9));
        assert_eq!(make_field(1, 1).unwrap_err(), FieldError::NotPrime(1));
    }

    #[test]
    fn gf49_modulus_is_x2_plus_1() {
        let f = make_field(7, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        // no root in GF(7)
        for a in 0..7u64 {
            assert_ne!((a * a + 1) % 7, 0);
        }
    }

    #[test]
    fn gf81_modulus_irreducible_by_ddf() {
        let f = make_field(3, 4).unwrap();
        let prime = f.prime_field();
        let m = UPoly::from_coeffs(&prime, f.modulus().iter().map(|&c| prime.from_u64(c as u64)).collect());
        let x = UPoly::x(&prime);
        let mut xp = x.clone();
        for _ in 1..4 {
            xp = xp.powmod(&BigUint::from(3u32), &m);
            assert_eq!(xp.sub(&x).gcd(&m).degree(), Some(0));
        }
    }

    #[test]
    fn explicit_modulus_checked() {
        assert!(make_field_with_modulus(7, &[1, 0, 1]).is_ok());
        assert_eq!(make_field_with_modulus(7, &[6, 0, 1]).unwrap_err(), FieldError::BadModulus(2));
        assert_eq!(make_field_with_modulus(7, &[1, 0, 2]).unwrap_err(), FieldError::BadModulus(2));
    }

    #[test]
    fn roots_of_unity() {
        let f = make_field(7, 1).unwrap();
        let r = root_of_unity(&f, 6).unwrap();
        assert_eq!(r.degree, 1);
        assert_eq!(r.root, f.from_u64(3));
        let r = root_of_unity(&f, 12).unwrap();
        assert_eq!(r.degree, 2);
        let big = &r.extension.field;
        assert_eq!(big.multiplicative_order(&r.root).unwrap(), BigUint::from(12u32));
        assert!(root_of_unity(&f, 14).is_err());
    }

    #[test]
    fn gf9_has_fourth_roots() {
        let f = make_field(3, 2).unwrap();
        let r = root_of_unity(&f, 4).unwrap();
        assert_eq!(r.degree, 1);
        let i2 = f.square(&r.root);
        assert_eq!(i2, f.from_i64(-1));
    }

    #[test]
    fn tagged_mismatch() {
        let a = Gf::from_i64(&make_field(7, 1).unwrap(), 3);
        let b = Gf::from_i64(&make_field(11, 1).unwrap(), 3);
        assert_eq!(a.try_add(&b).unwrap_err(), FieldError::FieldMismatch);
        let z = Gf::from_i64(a.field(), 0);
        assert_eq!(a.try_div(&z).unwrap_err(), FieldError::DivisionByZero);
        assert_eq!(a.try_div(&a).unwrap().to_string(), "1");
    }

    #[test]
    fn embedding_is_homomorphism() {
        let small = make_field(3, 2).unwrap();
        let ext = small.extend(2);
        let emb = &ext.embedding;
        let big = &ext.field;
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(emb.apply(&small.mul(&a, &b)), big.mul(&emb.apply(&a), &emb.apply(&b)));
                assert_eq!(emb.apply(&small.add(&a, &b)), big.add(&emb.apply(&a), &emb.apply(&b)));
            }
        }
    }

    #[test]
    fn sqrt_in_extension() {
        let f = make_field(5, 2).unwrap();
        for a in f.elements() {
            if let Some(r) = f.sqrt(&a) {
                assert_eq!(f.square(&r), a);
            } else {
                assert!(!f.is_square(&a));
            }
        }
    }

    #[test]
    fn element_degree_matches_subfields() {
        let f = make_field(3, 6).unwrap();
        let mut counts = [0usize; 7];
        for a in f.elements() {
            counts[f.element_degree(&a)] += 1;
        }
        // 3 in GF(3), 9-3 in GF(9) only, 27-3 in GF(27) only, the rest degree 6.
        assert_eq!(counts[1], 3);
        assert_eq!(counts[2], 6);
        assert_eq!(counts[3], 24);
        assert_eq!(counts[6], 729 - 33);
    }

    fn field_strategy() -> impl Strategy<Value = FieldSpec> {
        prop_oneof![
            Just(make_field(3, 1).unwrap()),
            Just(make_field(7, 1).unwrap()),
            Just(make_field(3, 3).unwrap()),
            Just(make_field(5, 2).unwrap()),
            Just(make_field(11, 2).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn field_axioms(f in field_strategy(), seeds in proptest::collection::vec(any::<u64>(), 3)) {
            let el = |s: u64| f.from_index(&(BigUint::from(s) % f.order()));
            let (a, b, c) = (el(seeds[0]), el(seeds[1]), el(seeds[2]));
            prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            prop_assert_eq!(f.sub(&f.add(&a, &b), &b), a.clone());
            if !f.is_zero(&a) {
                prop_assert!(f.is_one(&f.mul(&a, &f.inv(&a).unwrap())));
                let qm1 = f.order() - 1u32;
                prop_assert!(f.is_one(&f.pow_big(&a, &qm1)));
            }
            // Frobenius is additive
            prop_assert_eq!(f.frobenius(&f.add(&a, &b)), f.add(&f.frobenius(&a), &f.frobenius(&b)));
        }
    }
}
