//! Exact rational polynomials, interval bounds and univariate Sturm tools.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("bad rational literal {0:?}")]
    BadRational(String),
    #[error("exponent tuple {exps:?} has length {got}, map has {n} variables")]
    ExponentArity { exps: Vec<u32>, got: usize, n: usize },
    #[error("map declares p = {declared} but lists {found} polynomials")]
    ComponentCount { declared: usize, found: usize },
    #[error("expected a map {want}, got n = {n}, p = {p}")]
    Shape { want: &'static str, n: usize, p: usize },
}

/// Parses `"3"`, `"-1/2"` or a decimal such as `"0.25"`.
pub fn parse_rat(s: &str) -> Result<Rat, PolyError> {
    let bad = || PolyError::BadRational(s.to_string());
    let t = s.trim();
    if let Some((num, den)) = t.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(num, den));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let digits = format!("{int}{frac}");
        let num = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Rat::new(num, den));
    }
    Ok(Rat::from_integer(BigInt::from_str(t).map_err(|_| bad())?))
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Sign with zero reported as `0`.
pub fn sign_of(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Closed interval with outward rounding after every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo: lo.next_down(), hi: hi.next_up() }
    }

    pub fn point(v: f64) -> Self {
        Interval::new(v, v)
    }

    /// Encloses a rational; the conversion may be off by an ulp.
    pub fn of_rat(r: &Rat) -> Self {
        let v = to_f64(r);
        Interval::new(v.next_down(), v.next_up())
    }

    pub fn hull(a: &Rat, b: &Rat) -> Self {
        let (a, b) = (Interval::of_rat(a), Interval::of_rat(b));
        Interval { lo: a.lo.min(b.lo), hi: a.hi.max(b.hi) }
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    /// `Some(±1)` when the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo > 0.0 {
            Some(1)
        } else if self.hi < 0.0 {
            Some(-1)
        } else {
            None
        }
    }

    pub fn add(self, o: Self) -> Self {
        Interval::new(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn mul(self, o: Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }

    pub fn powi(self, e: u32) -> Self {
        if e == 0 {
            return Interval { lo: 1.0, hi: 1.0 };
        }
        if e % 2 == 0 && self.contains_zero() {
            let m = self.lo.abs().max(self.hi.abs());
            let mut hi = Interval::point(m);
            for _ in 1..e {
                hi = hi.mul(Interval::point(m));
            }
            return Interval { lo: 0.0, hi: hi.hi };
        }
        let mut out = self;
        for _ in 1..e {
            out = out.mul(self);
        }
        out
    }
}

/// Multivariate polynomial with rational coefficients, stored sparsely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::from_terms(nvars, [(e, Rat::one())]).expect("arity")
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rat)>) -> Result<Self, PolyError> {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(PolyError::ExponentArity { got: e.len(), exps: e, n: nvars });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Integer-coefficient shorthand.
    pub fn from_int_terms(nvars: usize, terms: &[(&[u32], i64)]) -> Result<Self, PolyError> {
        Poly::from_terms(nvars, terms.iter().map(|(e, c)| (e.to_vec(), int(*c))))
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rat) {
        let slot = self.terms.entry(e).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        let mut out = Poly::zero(self.nvars);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect();
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::constant(self.nvars, Rat::one());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * int(i64::from(e[i])));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut sum = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            sum += t;
        }
        sum
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| to_f64(c) * x.iter().zip(e).map(|(xi, &k)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn eval_interval(&self, x: &[Interval]) -> Interval {
        let mut sum = Interval { lo: 0.0, hi: 0.0 };
        for (e, c) in &self.terms {
            let mut t = Interval::of_rat(c);
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t = t.mul(xi.powi(k));
                }
            }
            sum = sum.add(t);
        }
        sum
    }

    /// Exact sign at a rational point, filtered through interval arithmetic.
    pub fn sign_at(&self, x: &[Rat]) -> i8 {
        let iv: Vec<Interval> = x.iter().map(Interval::of_rat).collect();
        match self.eval_interval(&iv).sign() {
            Some(s) => s,
            None => sign_of(&self.eval(x)),
        }
    }

    /// `s ↦ self(origin + s·dir)` as a univariate polynomial.
    pub fn restrict(&self, origin: &[Rat], dir: &[Rat]) -> UPoly {
        let mut out = UPoly::zero();
        for (e, c) in &self.terms {
            let mut t = UPoly::constant(c.clone());
            for i in 0..self.nvars {
                if e[i] == 0 {
                    continue;
                }
                let lin = UPoly::new(vec![origin[i].clone(), dir[i].clone()]);
                t = t.mul(&lin.pow(e[i]));
            }
            out = out.add(&t);
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = ["x", "y", "z", "w"];
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            match (i, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    let name = names.get(v).map(|s| s.to_string()).unwrap_or_else(|| format!("x{v}"));
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if mono.is_empty() || !mag.is_one() {
                write!(f, "{}", rat_string(&mag))?;
                if !mono.is_empty() {
                    write!(f, "*")?;
                }
            }
            write!(f, "{}", mono.join("*"))?;
        }
        Ok(())
    }
}

/// Polynomial map `ℝⁿ → ℝᵖ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    pub n: usize,
    pub p: usize,
    pub components: Vec<Poly>,
}

impl PolyMap {
    pub fn new(components: Vec<Poly>) -> Result<Self, PolyError> {
        let n = components.first().map(|c| c.nvars).unwrap_or(0);
        if let Some(bad) = components.iter().find(|c| c.nvars != n) {
            return Err(PolyError::ExponentArity { exps: vec![], got: bad.nvars, n });
        }
        Ok(PolyMap { n, p: components.len(), components })
    }

    pub fn expect_shape(&self, n: usize, p: usize, want: &'static str) -> Result<(), PolyError> {
        if self.n != n || self.p != p {
            return Err(PolyError::Shape { want, n: self.n, p: self.p });
        }
        Ok(())
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval_f64(x)).collect()
    }

    pub fn eval(&self, x: &[Rat]) -> Vec<Rat> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.components.iter().map(|c| c.gradient()).collect()
    }

    pub fn jacobian_f64(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jacobian().iter().map(|row| row.iter().map(|d| d.eval_f64(x)).collect()).collect()
    }

    /// The gradient of a scalar function as a map `ℝⁿ → ℝⁿ`.
    pub fn gradient_map(g: &Poly) -> PolyMap {
        PolyMap { n: g.nvars, p: g.nvars, components: g.gradient() }
    }
}

#[derive(Serialize, Deserialize)]
struct PolyMapFile {
    n: usize,
    p: usize,
    polys: Vec<Vec<(Vec<u32>, String)>>,
}

impl Serialize for PolyMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyMapFile {
            n: self.n,
            p: self.p,
            polys: self
                .components
                .iter()
                .map(|c| c.terms.iter().map(|(e, v)| (e.clone(), rat_string(v))).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let file = PolyMapFile::deserialize(d)?;
        if file.polys.len() != file.p {
            return Err(D::Error::custom(PolyError::ComponentCount { declared: file.p, found: file.polys.len() }));
        }
        let mut components = Vec::new();
        for terms in file.polys {
            let mut parsed = Vec::new();
            for (e, c) in terms {
                parsed.push((e, parse_rat(&c).map_err(D::Error::custom)?));
            }
            components.push(Poly::from_terms(file.n, parsed).map_err(D::Error::custom)?);
        }
        Ok(PolyMap { n: file.n, p: file.p, components })
    }
}

/// Dense univariate polynomial, coefficients from the constant term up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly {
    coeffs: Vec<Rat>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        UPoly::new(vec![c])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UPoly::new(c.iter().map(|&v| int(v)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rat) -> i8 {
        sign_of(&self.eval(x))
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = Rat::zero();
        UPoly::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z)).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Rat) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|v| v * c).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    pub fn pow(&self, k: u32) -> UPoly {
        let mut out = UPoly::constant(Rat::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
    }

    /// Quotient and remainder. Panics on a zero divisor.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.lead().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let q = rem.last().unwrap() / &lead;
            for (i, c) in d.coeffs.iter().enumerate() {
                rem[shift + i] -= &q * c;
            }
            quot[shift] = q;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (UPoly::new(quot), UPoly::new(rem))
    }

    pub fn monic(&self) -> UPoly {
        match self.lead() {
            Some(l) => self.scale(&(Rat::one() / l)),
            None => UPoly::zero(),
        }
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Same roots, each simple.
    pub fn squarefree(&self) -> UPoly {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.monic()
        } else {
            self.div_rem(&g).0.monic()
        }
    }

    pub fn sturm_sequence(&self) -> Vec<UPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1.scale(&int(-1));
            seq.push(r);
        }
        seq.pop();
        seq
    }
}

/// Sign variations of a Sturm sequence at `x`.
pub fn sturm_variations(seq: &[UPoly], x: &Rat) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for p in seq {
        let s = p.sign_at(x);
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

/// Isolating intervals for the distinct roots of `p` in the open interval `(a, b)`.
///
/// Bisection points never coincide with roots: a midpoint that hits one is nudged.
/// Each returned interval `(lo, hi)` has `a ≤ lo < hi ≤ b`, exactly one root
/// inside, and endpoints that are not roots unless they equal `a` or `b`.
pub fn isolate_roots(p: &UPoly, a: &Rat, b: &Rat) -> Vec<(Rat, Rat)> {
    let mut h = p.squarefree();
    if h.degree().unwrap_or(0) == 0 {
        return vec![];
    }
    // Deflate roots sitting on the endpoints so Sturm counts are clean.
    for e in [a, b] {
        if h.eval(e).is_zero() {
            h = h.div_rem(&UPoly::new(vec![-e.clone(), Rat::one()])).0;
        }
    }
    if h.degree().unwrap_or(0) == 0 {
        return vec![];
    }
    let seq = h.sturm_sequence();
    let count = |lo: &Rat, hi: &Rat| sturm_variations(&seq, lo) - sturm_variations(&seq, hi);
    let mut out = Vec::new();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((lo, hi)) = stack.pop() {
        let k = count(&lo, &hi);
        if k == 0 {
            continue;
        }
        if k == 1 {
            out.push((lo, hi));
            continue;
        }
        let mid = split_point(&h, &lo, &hi);
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// A point strictly inside `(lo, hi)` that is not a root of `h`.
pub fn split_point(h: &UPoly, lo: &Rat, hi: &Rat) -> Rat {
    let width = hi - lo;
    let mut k = 2i64;
    loop {
        // 1/2, then 1/2 ± small offsets.
        let frac = if k == 2 { rat(1, 2) } else { rat(1, 2) + rat(1, k) };
        let mid = lo + &width * frac;
        if !h.eval(&mid).is_zero() {
            return mid;
        }
        k = if k == 2 { 7 } else { k * 3 };
    }
}

/// Shrinks an isolating interval of a simple root of `h` below `tol`.
pub fn refine_root(h: &UPoly, lo: &Rat, hi: &Rat, tol: &Rat) -> (Rat, Rat) {
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let mut s_lo = h.sign_at(&lo);
    let mut guard = 0;
    while &(&hi - &lo) > tol && guard < 200 {
        guard += 1;
        let mid = split_point(h, &lo, &hi);
        let s_mid = h.sign_at(&mid);
        if s_lo == 0 {
            // Root-free interior near an endpoint root is impossible here; fall back to halving.
            hi = mid;
            s_lo = h.sign_at(&lo);
            continue;
        }
        if s_mid == s_lo {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}
