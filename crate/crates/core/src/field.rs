//! Exact arithmetic and enumeration for `F_{p^r}`.
//!
//! The field is realized as `F_p[s]` modulo the monic irreducible polynomial
//! of degree `r` with the smallest canonical code, so two runs (on any
//! platform) construct bit-identical fields. Elements are addressed by their
//! canonical code `sum coeffs[i] * p^i` in `[0, q)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A concrete realization of `F_{p^r}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldParams {
    p: u64,
    r: u32,
    q: u64,
    /// Monic modulus, length `r + 1`, coefficients in `[0, p)`.
    modulus: Vec<u64>,
}

/// An element of a specific field, addressed by canonical code.
///
/// Carries the `(p, r)` identity of its field so cross-field arithmetic is
/// rejected instead of silently misinterpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FieldElement {
    p: u64,
    r: u32,
    code: u64,
}

impl FieldElement {
    pub fn code(&self) -> u64 {
        self.code
    }
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // this witness set decides primality for every n < 3.3 * 10^24
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

impl FieldParams {
    /// Construct `F_{p^r}` with the canonically-least irreducible modulus.
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 {
            return Err(Error::BadRange("extension degree r must be >= 1"));
        }
        let q = checked_pow(p, r).ok_or(Error::CapacityExceeded { p, r })?;
        let modulus = least_irreducible(p, r);
        Ok(FieldParams { p, r, q, modulus })
    }

    /// Construct with an explicit monic modulus (validated irreducible).
    /// Useful for checking that dynamical statistics do not depend on the
    /// field model.
    pub fn with_modulus(p: u64, r: u32, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = checked_pow(p, r).ok_or(Error::CapacityExceeded { p, r })?;
        if modulus.len() != r as usize + 1
            || modulus[r as usize] != 1
            || modulus.iter().any(|&c| c >= p)
            || !is_irreducible(p, &modulus)
        {
            return Err(Error::BadRange("modulus must be monic irreducible of degree r"));
        }
        Ok(FieldParams { p, r, q, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Canonical integer code of the modulus (base-`p` digits, degree-`r`
    /// term included). Only defined when `p^(r+1)` still fits; used by the
    /// serialized field description.
    pub fn modulus_code(&self) -> Option<u64> {
        let mut acc: u64 = 0;
        let mut scale: u64 = 1;
        for (i, &c) in self.modulus.iter().enumerate() {
            acc = acc.checked_add(c.checked_mul(scale)?)?;
            if i < self.modulus.len() - 1 {
                scale = scale.checked_mul(self.p)?;
            }
        }
        Some(acc)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { p: self.p, r: self.r, code: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { p: self.p, r: self.r, code: 1 }
    }

    /// Decode a canonical code into an element.
    pub fn decode(&self, code: u64) -> Result<FieldElement> {
        if code >= self.q {
            return Err(Error::CodeOutOfRange { code, q: self.q });
        }
        Ok(FieldElement { p: self.p, r: self.r, code })
    }

    /// Base-`p` digits of an element, least significant first, length `r`.
    pub fn coeffs(&self, a: FieldElement) -> Result<Vec<u64>> {
        self.check(a)?;
        Ok(self.digits(a.code))
    }

    /// Inverse of [`FieldParams::coeffs`].
    pub fn encode(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() != self.r as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::BadRange("coefficient vector must have length r with entries < p"));
        }
        let mut code = 0u64;
        for &c in coeffs.iter().rev() {
            code = code * self.p + c;
        }
        Ok(FieldElement { p: self.p, r: self.r, code })
    }

    fn digits(&self, mut code: u64) -> Vec<u64> {
        let mut out = vec![0u64; self.r as usize];
        for slot in out.iter_mut() {
            *slot = code % self.p;
            code /= self.p;
        }
        out
    }

    fn from_digits(&self, digits: &[u64]) -> u64 {
        let mut code = 0u64;
        for &c in digits.iter().rev() {
            code = code * self.p + c;
        }
        code
    }

    fn check(&self, a: FieldElement) -> Result<()> {
        if a.p != self.p || a.r != self.r {
            return Err(Error::FieldMismatch);
        }
        debug_assert!(a.code < self.q);
        Ok(())
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.el(self.add_codes(a.code, b.code)))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.el(self.sub_codes(a.code, b.code)))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.el(self.mul_codes(a.code, b.code)))
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        Ok(self.el(self.sub_codes(0, a.code)))
    }

    /// `a^e` by square-and-multiply; `a^0 = 1` including for `a = 0`.
    pub fn pow(&self, a: FieldElement, e: u64) -> Result<FieldElement> {
        self.check(a)?;
        Ok(self.el(self.pow_code(a.code, e)))
    }

    /// Multiplicative inverse.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        if a.code == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.el(self.pow_code(a.code, self.q - 2)))
    }

    fn el(&self, code: u64) -> FieldElement {
        FieldElement { p: self.p, r: self.r, code }
    }

    pub(crate) fn add_codes(&self, a: u64, b: u64) -> u64 {
        if self.r == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let da = self.digits(a);
        let db = self.digits(b);
        let sum: Vec<u64> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| {
                let s = x + y;
                if s >= self.p {
                    s - self.p
                } else {
                    s
                }
            })
            .collect();
        self.from_digits(&sum)
    }

    pub(crate) fn sub_codes(&self, a: u64, b: u64) -> u64 {
        if self.r == 1 {
            return if a >= b { a - b } else { self.p - (b - a) };
        }
        let da = self.digits(a);
        let db = self.digits(b);
        let diff: Vec<u64> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| if x >= y { x - y } else { self.p - (y - x) })
            .collect();
        self.from_digits(&diff)
    }

    pub(crate) fn mul_codes(&self, a: u64, b: u64) -> u64 {
        if self.r == 1 {
            return mul_mod(a, b, self.p);
        }
        let da = self.digits(a);
        let db = self.digits(b);
        let prod = poly_mul_mod(self.p, &da, &db, &self.modulus);
        self.from_digits(&prod)
    }

    pub(crate) fn pow_code(&self, a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.q;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_codes(acc, base);
            }
            base = self.mul_codes(base, base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius `x -> x^p`.
    pub fn frobenius(&self, a: FieldElement) -> Result<FieldElement> {
        self.pow(a, self.p)
    }

    /// Degree of the minimal polynomial of `a` over `F_p`: the smallest
    /// `e >= 1` (necessarily dividing `r`) with `a^(p^e) = a`.
    pub fn degree_over_prime(&self, a: FieldElement) -> Result<u32> {
        self.check(a)?;
        let mut b = a.code;
        for e in 1..=self.r {
            b = self.pow_code(b, self.p);
            if b == a.code {
                debug_assert_eq!(self.r % e, 0);
                return Ok(e);
            }
        }
        unreachable!("Frobenius orbit length must divide r")
    }

    /// An element generates the full extension iff its degree equals `r`.
    pub fn is_primitive(&self, a: FieldElement) -> Result<bool> {
        Ok(self.degree_over_prime(a)? == self.r)
    }

    /// Count of elements of each exact degree `e | r`, computed by Moebius
    /// inversion over the subfield lattice.
    ///
    /// The counts sum to `q`, and for `r > 1` the number of non-primitive
    /// elements is strictly below `2 p^{r/2}`; both facts are asserted.
    pub fn count_by_degree(&self) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for e in divisors(self.r) {
            let mut count: i128 = 0;
            for c in divisors(e) {
                let mu = moebius(e / c);
                if mu != 0 {
                    count += mu as i128 * checked_pow(self.p, c).expect("p^c <= q") as i128;
                }
            }
            debug_assert!(count > 0);
            out.insert(e, count as u64);
        }
        let total: u64 = out.values().sum();
        assert_eq!(total, self.q, "degree counts must sum to q");
        if self.r > 1 {
            let non_primitive = self.q - out[&self.r];
            // non_primitive < 2 p^{r/2}  <=>  non_primitive^2 < 4 p^r
            assert!(
                (non_primitive as u128) * (non_primitive as u128) < 4 * self.q as u128,
                "subfield count bound violated"
            );
        }
        out
    }

    /// Serialized field description: `p,r,modulus-code`.
    pub fn descriptor(&self) -> alloc::string::String {
        use alloc::format;
        match self.modulus_code() {
            Some(code) => format!("{},{},{}", self.p, self.r, code),
            None => format!("{},{},-", self.p, self.r),
        }
    }
}

fn checked_pow(p: u64, r: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..r {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

fn divisors(n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    for d in 1..=n {
        if n % d == 0 {
            out.push(d);
        }
    }
    out
}

fn moebius(mut n: u32) -> i32 {
    let mut mu = 1;
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            n /= f;
            if n % f == 0 {
                return 0;
            }
            mu = -mu;
        }
        f += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Schoolbook product of two coefficient vectors reduced by a monic modulus.
fn poly_mul_mod(p: u64, a: &[u64], b: &[u64], modulus: &[u64]) -> Vec<u64> {
    let r = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y == 0 {
                continue;
            }
            prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    // reduce: s^r = -(modulus lower part)
    for i in (r..prod.len()).rev() {
        let lead = prod[i];
        if lead != 0 {
            prod[i] = 0;
            for (k, &m) in modulus.iter().enumerate().take(r) {
                if m != 0 {
                    let sub = mul_mod(lead, m, p);
                    let idx = i - r + k;
                    prod[idx] = (prod[idx] + p - sub) % p;
                }
            }
        }
    }
    prod.truncate(r);
    prod.resize(r, 0);
    prod
}

fn poly_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Remainder of `a` modulo monic-after-normalization `g` over `F_p`.
fn poly_rem(p: u64, a: &[u64], g: &[u64]) -> Vec<u64> {
    let mut rem: Vec<u64> = a.to_vec();
    let dg = g.len() - 1;
    let lead_inv = pow_mod(g[dg], p - 2, p);
    while rem.len() > dg {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let factor = mul_mod(lead, lead_inv, p);
            let shift = rem.len() - 1 - dg;
            for (k, &gc) in g.iter().enumerate() {
                let sub = mul_mod(factor, gc, p);
                rem[shift + k] = (rem[shift + k] + p - sub) % p;
            }
        }
        rem.pop();
    }
    rem
}

fn poly_gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x: Vec<u64> = a.to_vec();
    let mut y: Vec<u64> = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !poly_is_zero(&y) {
        let mut r = poly_rem(p, &x, &y);
        trim(&mut r);
        x = y;
        y = r;
    }
    x
}

fn trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

/// Rabin irreducibility test for a monic polynomial of degree `r` over `F_p`:
/// `x^(p^r) = x (mod f)` and `gcd(x^(p^(r/l)) - x, f) = 1` for each prime
/// `l | r`.
fn is_irreducible(p: u64, f: &[u64]) -> bool {
    let r = (f.len() - 1) as u32;
    if r == 1 {
        return true;
    }
    // x^(p^e) mod f via repeated Frobenius of x
    let xp = |e: u32| -> Vec<u64> {
        let mut cur = vec![0u64, 1]; // x
        cur.resize(r as usize, 0);
        for _ in 0..e {
            // cur := cur^p mod f
            let mut acc = vec![0u64; r as usize];
            acc[0] = 1;
            let mut base = cur.clone();
            let mut exp = p;
            while exp > 0 {
                if exp & 1 == 1 {
                    acc = poly_mul_mod(p, &acc, &base, f);
                }
                base = poly_mul_mod(p, &base, &base, f);
                exp >>= 1;
            }
            cur = acc;
        }
        cur
    };
    // x^(p^r) - x must vanish mod f
    let mut top = xp(r);
    top[1] = (top[1] + p - 1) % p;
    if !poly_is_zero(&top) {
        return false;
    }
    for l in prime_divisors(r) {
        let mut g = xp(r / l);
        g[1] = (g[1] + p - 1) % p;
        trim(&mut g);
        if poly_is_zero(&g) {
            return false;
        }
        let gcd = poly_gcd(p, &g, f);
        if gcd.len() > 1 {
            return false;
        }
    }
    true
}

fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The monic irreducible of degree `r` over `F_p` with the least canonical
/// code. For `r = 1` this is the polynomial `s`.
fn least_irreducible(p: u64, r: u32) -> Vec<u64> {
    if r == 1 {
        return vec![0, 1];
    }
    let mut low = vec![0u64; r as usize];
    loop {
        let mut f = low.clone();
        f.push(1);
        if is_irreducible(p, &f) {
            return f;
        }
        // next candidate in code order
        for slot in low.iter_mut() {
            *slot += 1;
            if *slot < p {
                break;
            }
            *slot = 0;
        }
        debug_assert!(!poly_is_zero(&low), "no irreducible of degree r found");
    }
}
