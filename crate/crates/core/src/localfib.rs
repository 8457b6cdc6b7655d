//! Euler characteristics of local generic fibers of quadratic suspensions
//! `(x, z) ↦ g(x) + z₁² + … + z_a² − z_{a+1}² − … − z_{a+b}²`, the `s_σ`
//! constants they define, and the fiber tables for `A_k` and `D_k` types.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalFibError {
    #[error("sphere dimension must satisfy p >= 1, got p = {0}")]
    SphereDimension(i64),
    #[error("inconsistent suspension data: {0}")]
    InvariantViolation(String),
    #[error("B must be an open ball (chi_B = (-1)^m = {expected}), got chi_B = {found}")]
    NotABall { expected: i64, found: i64 },
    #[error("odd parity requires the attainable set of {0}")]
    MissingAttainable(&'static str),
    #[error("no {variant} smoothing family for k = {k}")]
    InvalidRange { k: u32, variant: DkVariant },
    #[error("no fiber constants for type {0}")]
    UnknownType(String),
    #[error("cannot parse singularity label `{0}`")]
    BadLabel(String),
    #[error("fiber table entry {0} disagrees with its closed form")]
    TableMismatch(String),
}

/// Which side of a sign split a stratum lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// Suspension sign convention: an even number of negative squares is "+".
pub const PLUS_WHEN_B_EVEN: bool = true;

pub fn sign_for_b(b: u32) -> Sign {
    if (b % 2 == 0) == PLUS_WHEN_B_EVEN {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Singularity-type labels used by ledgers: `A0+`, `A1-`, `A2`, `D4-`, `D5`,
/// `sigma2+`, `I22-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StratumType {
    A { k: u32, sign: Option<Sign> },
    D { k: u32, sign: Option<Sign> },
    Sigma { r: u32, sign: Option<Sign> },
    I22 { sign: Sign },
}

impl StratumType {
    pub fn a(k: u32, sign: Option<Sign>) -> Self {
        StratumType::A { k, sign }
    }

    pub fn sign(self) -> Option<Sign> {
        match self {
            StratumType::A { sign, .. } | StratumType::D { sign, .. } | StratumType::Sigma { sign, .. } => sign,
            StratumType::I22 { sign } => Some(sign),
        }
    }

    /// `A_k` level, if this is an `A` label.
    pub fn a_level(self) -> Option<u32> {
        match self {
            StratumType::A { k, .. } => Some(k),
            _ => None,
        }
    }

    /// The same type with its sign removed (`I22` keeps its sign).
    pub fn unsigned(self) -> Self {
        match self {
            StratumType::A { k, .. } => StratumType::A { k, sign: None },
            StratumType::D { k, .. } => StratumType::D { k, sign: None },
            StratumType::Sigma { r, .. } => StratumType::Sigma { r, sign: None },
            t @ StratumType::I22 { .. } => t,
        }
    }
}

impl fmt::Display for StratumType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sfx = |s: Option<Sign>| s.map_or("", Sign::suffix);
        match *self {
            StratumType::A { k, sign } => write!(f, "A{k}{}", sfx(sign)),
            StratumType::D { k, sign } => write!(f, "D{k}{}", sfx(sign)),
            StratumType::Sigma { r, sign } => write!(f, "sigma{r}{}", sfx(sign)),
            StratumType::I22 { sign } => write!(f, "I22{}", sign.suffix()),
        }
    }
}

impl FromStr for StratumType {
    type Err = LocalFibError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LocalFibError::BadLabel(s.to_string());
        let t = s.trim();
        let (body, sign) = match t.chars().last() {
            Some('+') => (&t[..t.len() - 1], Some(Sign::Plus)),
            Some('-') => (&t[..t.len() - 1], Some(Sign::Minus)),
            _ => (t, None),
        };
        if body == "I22" {
            return sign.map(|sign| StratumType::I22 { sign }).ok_or_else(bad);
        }
        let (family, digits) = if let Some(d) = body.strip_prefix("sigma") {
            ("sigma", d)
        } else if let Some(d) = body.strip_prefix('A') {
            ("A", d)
        } else if let Some(d) = body.strip_prefix('D') {
            ("D", d)
        } else {
            return Err(bad());
        };
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: u32 = digits.parse().map_err(|_| bad())?;
        match family {
            "A" => Ok(StratumType::A { k: n, sign }),
            "D" if n >= 4 => Ok(StratumType::D { k: n, sign }),
            "sigma" => Ok(StratumType::Sigma { r: n, sign }),
            _ => Err(bad()),
        }
    }
}

impl Serialize for StratumType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StratumType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn neg1_pow(e: u64) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `χ_c` of an `S^{p−1}`-bundle over `Y`.
pub fn sphere_bundle_chi(p: i64, chi_y: i64) -> Result<i64, LocalFibError> {
    if p < 1 {
        return Err(LocalFibError::SphereDimension(p));
    }
    Ok((1 - neg1_pow(p as u64)) * chi_y)
}

/// `χ_c{z ∈ ℝ^{p+q} : |z₊|² − |z₋|² = 1}` with `p` positive squares: `(−1)^q − (−1)^{p+q}`.
pub fn ex1_chi(p: u32, q: u32) -> i64 {
    neg1_pow(q.into()) - neg1_pow(u64::from(p) + u64::from(q))
}

/// `χ_c` of the quadric cone `{|z₊|² = |z₋|²}` in `ℝ^{p+q}`: `(−1)^p + (−1)^q − (−1)^{p+q}`.
pub fn ex2_chi(p: u32, q: u32) -> i64 {
    neg1_pow(p.into()) + neg1_pow(q.into()) - neg1_pow(u64::from(p) + u64::from(q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Plus,
    Minus,
    Zero,
}

/// Point-fiber values, rows `(a mod 2, b mod 2)` in the order ee, eo, oe, oo;
/// columns `B₊, B₋, B₀`.
const POINT_FIBER: [[i64; 3]; 4] = [[0, 0, 1], [2, 0, 1], [0, 2, 1], [-2, -2, -3]];

/// `χ_c` of the suspension fiber over a point of `B₊`, `B₋` or `B₀`.
pub fn point_fiber_chi(a: u32, b: u32, region: Region) -> i64 {
    let row = 2 * (a % 2) as usize + (b % 2) as usize;
    let col = match region {
        Region::Plus => 0,
        Region::Minus => 1,
        Region::Zero => 2,
    };
    POINT_FIBER[row][col]
}

/// Closed forms behind `POINT_FIBER`: over `B₋` the fiber is `{Q = c > 0}`,
/// over `B₊` it is `{Q = −c}`, over `B₀` the cone.
fn point_fiber_closed_form(a: u32, b: u32, region: Region) -> i64 {
    let (ea, eb, eab) = (neg1_pow(a.into()), neg1_pow(b.into()), neg1_pow(u64::from(a) + u64::from(b)));
    match region {
        Region::Minus => eb - eab,
        Region::Plus => ea - eab,
        Region::Zero => ea + eb - eab,
    }
}

/// Data of a suspension over a base `B` split by the sign of `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuspensionData {
    pub a: u32,
    pub b: u32,
    pub m: u32,
    pub chi_b: i64,
    pub chi_bplus: i64,
    pub chi_bminus: i64,
    pub chi_b0: i64,
}

impl SuspensionData {
    pub fn new(a: u32, b: u32, m: u32, chi_bplus: i64, chi_bminus: i64, chi_b0: i64, chi_b: i64) -> Result<Self, LocalFibError> {
        let d = Self { a, b, m, chi_b, chi_bplus, chi_bminus, chi_b0 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), LocalFibError> {
        if self.chi_bplus + self.chi_bminus + self.chi_b0 != self.chi_b {
            return Err(LocalFibError::InvariantViolation(format!(
                "chi_B+ + chi_B- + chi_B0 = {} but chi_B = {}",
                self.chi_bplus + self.chi_bminus + self.chi_b0,
                self.chi_b
            )));
        }
        Ok(())
    }

    /// `(m + a + b) mod 2`.
    pub fn parity(&self) -> u32 {
        (self.m + self.a + self.b) % 2
    }

    pub fn sign(&self) -> Sign {
        sign_for_b(self.b)
    }
}

/// `χ_c(F)` for the generic fiber `F` of the suspension, by parity of `(a, b)`.
pub fn suspension_fiber_chi(d: &SuspensionData) -> Result<i64, LocalFibError> {
    d.validate()?;
    Ok(match (d.a % 2, d.b % 2) {
        (0, 0) => d.chi_b0,
        (0, _) => d.chi_b + d.chi_bplus - d.chi_bminus,
        (_, 0) => d.chi_b - d.chi_bplus + d.chi_bminus,
        _ => -2 * d.chi_b - d.chi_b0,
    })
}

/// `χ_c(F)` by integrating the point-fiber table over `B₊ ⊔ B₋ ⊔ B₀`.
pub fn point_fiber_contraction(d: &SuspensionData) -> i64 {
    d.chi_bplus * point_fiber_chi(d.a, d.b, Region::Plus)
        + d.chi_bminus * point_fiber_chi(d.a, d.b, Region::Minus)
        + d.chi_b0 * point_fiber_chi(d.a, d.b, Region::Zero)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaLedgerEntry {
    pub name: String,
    pub parity: u32,
    pub sign: Sign,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_max: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_min: Option<i64>,
}

/// `s_σ` (even parity) or `s_σ^max`, `s_σ^min` (odd parity) of a suspension
/// over an open `m`-ball.
///
/// For odd parity `attainable` lists the values over all smoothings of
/// `χ_c(B₀)` (when `m` is odd) or of `χ_c(B₊) − χ_c(B₋)` (when `m` is even).
pub fn s_sigma(name: &str, d: &SuspensionData, attainable: Option<&[i64]>) -> Result<SigmaLedgerEntry, LocalFibError> {
    d.validate()?;
    let ball = neg1_pow(d.m.into());
    if d.chi_b != ball {
        return Err(LocalFibError::NotABall { expected: ball, found: d.chi_b });
    }
    let mut entry =
        SigmaLedgerEntry { name: name.to_string(), parity: d.parity(), sign: d.sign(), s: None, s_max: None, s_min: None };
    if d.parity() == 0 {
        entry.s = Some(if d.m % 2 == 1 { -d.chi_bplus + d.chi_bminus } else { 1 + d.chi_b0 });
        return Ok(entry);
    }
    let odd_m = d.m % 2 == 1;
    let what = if odd_m { "chi_c(B0)" } else { "chi_c(B+) - chi_c(B-)" };
    let values = attainable.filter(|v| !v.is_empty()).ok_or(LocalFibError::MissingAttainable(what))?;
    let (lo, hi) = (*values.iter().min().expect("nonempty"), *values.iter().max().expect("nonempty"));
    if odd_m {
        entry.s_max = Some(-(hi - 1));
        entry.s_min = Some(-(lo - 1));
    } else {
        entry.s_max = Some(lo);
        entry.s_min = Some(hi);
    }
    Ok(entry)
}

/// Base data of the `A_k` unfolding `x^{k+1} + …` on an interval with
/// `root_count` solutions of `g_c = ε`.
pub fn ak_suspension_data(k: u32, a: u32, b: u32, root_count: u32) -> Result<SuspensionData, LocalFibError> {
    if k == 0 || (root_count + k) % 2 == 0 || root_count > k + 1 {
        return Err(LocalFibError::InvariantViolation(format!(
            "{root_count} roots are not attainable for an A{k} unfolding"
        )));
    }
    // r points split the interval into r + 1 open arcs; the outer two carry
    // the sign of x^{k+1} at ±∞.
    let r = i64::from(root_count);
    let arcs = r + 1;
    let diff = if k % 2 == 0 { 0 } else { -1 };
    let plus = (-arcs + diff) / 2;
    let minus = -arcs - plus;
    SuspensionData::new(a, b, 1, plus, minus, r, -1)
}

/// `1 − (−1)^{a+b} χ_c(F)` for an `A_k` suspension with `root_count` level points.
pub fn ak_fiber_bracket(k: u32, a: u32, b: u32, root_count: u32) -> i64 {
    let r = i64::from(root_count);
    match (a % 2, b % 2) {
        (0, 0) => 1 - r,
        (1, 1) => r - 1,
        (0, 1) => {
            if k % 2 == 0 {
                0
            } else {
                -1
            }
        }
        _ => {
            if k % 2 == 0 {
                0
            } else {
                1
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DkVariant {
    Minus3branch,
    Plus1branch,
    Odd,
}

impl fmt::Display for DkVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DkVariant::Minus3branch => "minus_3branch",
            DkVariant::Plus1branch => "plus_1branch",
            DkVariant::Odd => "odd",
        })
    }
}

/// Attainable `χ_c(B₊) − χ_c(B₋)` over the smoothings of a `D_k` curve.
pub fn dk_range(k: u32, variant: DkVariant) -> Result<Vec<i64>, LocalFibError> {
    let k_even = k % 2 == 0;
    let ok = match variant {
        DkVariant::Minus3branch | DkVariant::Plus1branch => k >= 4 && k_even,
        DkVariant::Odd => k >= 5 && !k_even,
    };
    if !ok {
        return Err(LocalFibError::InvalidRange { k, variant });
    }
    let k = i64::from(k);
    let (lo, hi) = match variant {
        DkVariant::Minus3branch => (-k, k),
        _ => (2 - k, k - 2),
    };
    Ok((lo..=hi).step_by(2).collect())
}

/// The `D_k` smoothing family a label refers to.
pub fn dk_variant(t: StratumType) -> Option<(u32, DkVariant)> {
    match t {
        StratumType::D { k, sign: Some(Sign::Minus) } if k % 2 == 0 => Some((k, DkVariant::Minus3branch)),
        StratumType::D { k, sign: Some(Sign::Plus) } if k % 2 == 0 => Some((k, DkVariant::Plus1branch)),
        StratumType::D { k, sign: None } if k % 2 == 1 => Some((k, DkVariant::Odd)),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuFiberConstants {
    #[serde(rename = "type")]
    pub ty: StratumType,
    pub one_minus_c_max: i64,
    pub one_minus_c_min: i64,
}

impl NuFiberConstants {
    pub fn c_max(&self) -> i64 {
        1 - self.one_minus_c_max
    }

    pub fn c_min(&self) -> i64 {
        1 - self.one_minus_c_min
    }
}

#[derive(Clone, Copy)]
enum Family {
    A,
    D,
}

#[derive(Clone, Copy)]
enum KParity {
    Odd,
    Even,
}

/// One row of the max/min fiber table: values are `coef·k + constant`.
struct NuRow {
    family: Family,
    sign: Option<Sign>,
    parity: KParity,
    max: (i64, i64),
    min: (i64, i64),
}

const NU_TABLE: [NuRow; 7] = [
    NuRow { family: Family::A, sign: Some(Sign::Plus), parity: KParity::Odd, max: (-1, 0), min: (0, 1) },
    NuRow { family: Family::A, sign: Some(Sign::Plus), parity: KParity::Even, max: (-1, 0), min: (0, 0) },
    NuRow { family: Family::A, sign: Some(Sign::Minus), parity: KParity::Odd, max: (0, -1), min: (1, 0) },
    NuRow { family: Family::A, sign: Some(Sign::Minus), parity: KParity::Even, max: (0, 0), min: (1, 0) },
    NuRow { family: Family::D, sign: Some(Sign::Minus), parity: KParity::Even, max: (1, 0), min: (-1, 0) },
    NuRow { family: Family::D, sign: Some(Sign::Plus), parity: KParity::Even, max: (1, -2), min: (-1, 2) },
    NuRow { family: Family::D, sign: None, parity: KParity::Odd, max: (1, -2), min: (-1, 2) },
];

/// `(1 − c^max, 1 − c^min)` for `A_k^±`, `D_k^±` (`k` even) and `D_k` (`k` odd).
pub fn nu_constants(t: StratumType) -> Result<NuFiberConstants, LocalFibError> {
    let (family, k, sign) = match t {
        StratumType::A { k, sign } if k >= 1 => (Family::A, k, sign),
        StratumType::D { k, sign } if k >= 4 => (Family::D, k, sign),
        _ => return Err(LocalFibError::UnknownType(t.to_string())),
    };
    let row = NU_TABLE
        .iter()
        .find(|r| {
            matches!((r.family, family), (Family::A, Family::A) | (Family::D, Family::D))
                && r.sign == sign
                && match r.parity {
                    KParity::Odd => k % 2 == 1,
                    KParity::Even => k % 2 == 0,
                }
        })
        .ok_or_else(|| LocalFibError::UnknownType(t.to_string()))?;
    let k = i64::from(k);
    Ok(NuFiberConstants {
        ty: t,
        one_minus_c_max: row.max.0 * k + row.max.1,
        one_minus_c_min: row.min.0 * k + row.min.1,
    })
}

/// `s` for the `A_k` genotype, from the canonical one-variable unfolding.
pub fn a_k_s(k: u32) -> Result<i64, LocalFibError> {
    // b = 0, a = 1 keeps m + a + b even; any attainable root count gives the same s.
    let d = ak_suspension_data(k, 1, 0, if k % 2 == 0 { 1 } else { 0 })?;
    s_sigma(&format!("A{k}"), &d, None)?.s.ok_or(LocalFibError::MissingAttainable("s"))
}

/// `s` for a plane genotype whose zero curve has `r` branches.
pub fn sigma_r_s(r: u32) -> Result<i64, LocalFibError> {
    // m = 2, a = b = 0: B₀ is the curve germ minus the origin's link, χ_c(B₀) = −r.
    let r = i64::from(r);
    let b0 = -r;
    let plus = (1 - b0) / 2;
    let minus = 1 - b0 - plus;
    let d = SuspensionData::new(0, 0, 2, plus, minus, b0, 1)?;
    s_sigma(&format!("sigma{r}"), &d, None)?.s.ok_or(LocalFibError::MissingAttainable("s"))
}

/// Serialized form of a type's local data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    #[serde(rename = "type")]
    pub ty: StratumType,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<Vec<i64>>,
}

pub fn ledger_entry(t: StratumType) -> Result<LedgerEntry, LocalFibError> {
    match t {
        StratumType::A { k, .. } if k >= 1 => Ok(LedgerEntry { ty: t, s: Some(a_k_s(k)?), range: None }),
        StratumType::Sigma { r, .. } => Ok(LedgerEntry { ty: t, s: Some(sigma_r_s(r)?), range: None }),
        StratumType::D { .. } => {
            let (k, v) = dk_variant(t).ok_or_else(|| LocalFibError::UnknownType(t.to_string()))?;
            Ok(LedgerEntry { ty: t, s: None, range: Some(dk_range(k, v)?) })
        }
        _ => Err(LocalFibError::UnknownType(t.to_string())),
    }
}

/// Re-derive the stored tables from their closed forms.
pub fn self_check() -> Result<(), LocalFibError> {
    for a in 0..4 {
        for b in 0..4 {
            for region in [Region::Plus, Region::Minus, Region::Zero] {
                if point_fiber_chi(a, b, region) != point_fiber_closed_form(a, b, region) {
                    return Err(LocalFibError::TableMismatch(format!("point fiber ({a}, {b}, {region:?})")));
                }
            }
        }
    }
    for k in 1..=8u32 {
        // A rows against the root-count bracket: r ranges over attainable counts.
        let counts: Vec<i64> = (0..=k + 1).filter(|r| (r + k) % 2 == 1).map(i64::from).collect();
        let s_max = 1 - counts.iter().max().expect("nonempty");
        let s_min = 1 - counts.iter().min().expect("nonempty");
        let plus = nu_constants(StratumType::a(k, Some(Sign::Plus)))?;
        let minus = nu_constants(StratumType::a(k, Some(Sign::Minus)))?;
        if (plus.one_minus_c_max, plus.one_minus_c_min) != (s_max, s_min)
            || (minus.one_minus_c_max, minus.one_minus_c_min) != (-s_min, -s_max)
        {
            return Err(LocalFibError::TableMismatch(format!("A{k} max/min row")));
        }
    }
    Ok(())
}
