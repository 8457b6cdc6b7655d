//! Ledgers of singular strata and exact checkers for the Euler-characteristic
//! identities of stable and Morin maps.
//!
//! Checkers are plain arithmetic over a ledger: they never assume the ledger
//! is truthful, and every report carries its residual.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::localfib::{a_k_s, nu_constants, sigma_r_s, LocalFibError, Sign, StratumType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("no fiber constant for stratum {0} in {1}")]
    MissingConstant(String, &'static str),
    #[error("ledger lacks `{0}`")]
    MissingField(&'static str),
    #[error("{formula} needs {need}, ledger has m = {m}, n = {n}")]
    DimensionMismatch { formula: &'static str, need: &'static str, m: u32, n: u32 },
    #[error("stratum {0} needs a sign split")]
    UnsignedStratum(String),
    #[error("label {0} is not allowed in {1}")]
    LabelNotAllowed(String, &'static str),
    #[error("both signed and unsigned entries for {0}")]
    AmbiguousStratum(String),
    #[error("broken closure chain: A{0} is missing below a higher stratum")]
    BrokenChain(u32),
    #[error("insufficient local data for {0}")]
    InsufficientLocalData(&'static str),
    #[error("{0} requires a complex-dimension ledger")]
    NotComplex(&'static str),
    #[error("unknown formula `{0}`")]
    UnknownFormula(String),
    #[error("integer overflow")]
    Overflow,
    #[error(transparent)]
    LocalFib(#[from] LocalFibError),
}

fn i64_of(v: i128) -> Result<i64, FormulaError> {
    i64::try_from(v).map_err(|_| FormulaError::Overflow)
}

/// Global data of a stable map `f: M → N` with the `χ_c` of its singular strata.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SingularLedger {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub m: u32,
    pub n: u32,
    #[serde(rename = "chiM")]
    pub chi_m: i64,
    #[serde(rename = "chiN")]
    pub chi_n: i64,
    #[serde(rename = "chif", default, skip_serializing_if = "Option::is_none")]
    pub chi_f: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deg: Option<i64>,
    #[serde(default)]
    pub stable: bool,
    /// Dimensions are complex dimensions.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub complex: bool,
    #[serde(default)]
    pub strata: BTreeMap<StratumType, i64>,
    #[serde(default)]
    pub counts: BTreeMap<StratumType, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmax: Option<BTreeMap<i64, i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmin: Option<BTreeMap<i64, i64>>,
}

impl SingularLedger {
    pub fn labels(&self) -> BTreeSet<StratumType> {
        self.strata.keys().chain(self.counts.keys()).copied().collect()
    }

    /// `χ_c` of a stratum; finite strata may be given by their point count.
    pub fn chi_of(&self, t: StratumType) -> i64 {
        self.strata.get(&t).copied().or_else(|| self.counts.get(&t).map(|&c| c as i64)).unwrap_or(0)
    }

    /// Number of points of a finite stratum.
    pub fn count_of(&self, t: StratumType) -> i64 {
        self.counts.get(&t).map(|&c| c as i64).or_else(|| self.strata.get(&t).copied()).unwrap_or(0)
    }

    fn a_labels(&self, k: u32) -> impl Iterator<Item = StratumType> {
        self.labels().into_iter().filter(move |t| t.a_level() == Some(k))
    }

    /// `χ_c(A_k)` summed over both signs.
    pub fn a_total(&self, k: u32) -> i64 {
        self.a_labels(k).map(|t| self.chi_of(t)).sum()
    }

    pub fn a_count_total(&self, k: u32) -> i64 {
        self.a_labels(k).map(|t| self.count_of(t)).sum()
    }

    /// `χ_c(A_k^±)`, refusing an unsigned entry.
    pub fn a_signed(&self, k: u32, sign: Sign) -> Result<i64, FormulaError> {
        let unsigned = StratumType::a(k, None);
        if self.labels().contains(&unsigned) && self.chi_of(unsigned) != 0 {
            return Err(FormulaError::UnsignedStratum(unsigned.to_string()));
        }
        Ok(self.chi_of(StratumType::a(k, Some(sign))))
    }

    pub fn a_count_signed(&self, k: u32, sign: Sign) -> Result<i64, FormulaError> {
        let unsigned = StratumType::a(k, None);
        if self.labels().contains(&unsigned) && self.count_of(unsigned) != 0 {
            return Err(FormulaError::UnsignedStratum(unsigned.to_string()));
        }
        Ok(self.count_of(StratumType::a(k, Some(sign))))
    }

    /// `χ_c` of the points carrying no listed singularity type.
    pub fn regular_chi(&self) -> i128 {
        i128::from(self.chi_m) - self.labels().into_iter().map(|t| i128::from(self.chi_of(t))).sum::<i128>()
    }

    pub fn max_a_level(&self) -> Option<u32> {
        self.labels().into_iter().filter_map(StratumType::a_level).max()
    }

    /// Rejects a type listed both with and without a sign.
    pub fn validate(&self) -> Result<(), FormulaError> {
        let labels = self.labels();
        for t in &labels {
            if t.sign().is_none() {
                for s in [Sign::Plus, Sign::Minus] {
                    let signed = match *t {
                        StratumType::A { k, .. } => StratumType::A { k, sign: Some(s) },
                        StratumType::D { k, .. } => StratumType::D { k, sign: Some(s) },
                        StratumType::Sigma { r, .. } => StratumType::Sigma { r, sign: Some(s) },
                        StratumType::I22 { .. } => continue,
                    };
                    if labels.contains(&signed) && !matches!(t, StratumType::D { .. }) {
                        return Err(FormulaError::AmbiguousStratum(t.to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    fn require_chi_f(&self) -> Result<i64, FormulaError> {
        self.chi_f.ok_or(FormulaError::MissingField("chif"))
    }

    fn require_deg(&self) -> Result<i64, FormulaError> {
        self.deg.ok_or(FormulaError::MissingField("deg"))
    }

    fn require_parity(&self, formula: &'static str, odd: bool) -> Result<(), FormulaError> {
        let diff = i64::from(self.m) - i64::from(self.n);
        let ok = diff >= 0 && (diff % 2 == 1) == odd;
        if ok {
            Ok(())
        } else {
            Err(FormulaError::DimensionMismatch {
                formula,
                need: if odd { "m - n odd" } else { "m - n even and nonnegative" },
                m: self.m,
                n: self.n,
            })
        }
    }

    fn require_equal_dims(&self, formula: &'static str) -> Result<(), FormulaError> {
        if self.m == self.n {
            Ok(())
        } else {
            Err(FormulaError::DimensionMismatch { formula, need: "m = n", m: self.m, n: self.n })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Ge,
    Le,
    Mod2,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Mod2 => "≡ (mod 2)",
        })
    }
}

/// Outcome of one identity. `residual = lhs − rhs`, reduced mod 2 for parity
/// checks; inequalities hold when the residual has the required sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub formula_id: String,
    pub relation: Relation,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
    pub residual: i64,
}

impl CheckReport {
    pub fn new(formula_id: impl Into<String>, relation: Relation, lhs: i64, rhs: i64) -> Result<Self, FormulaError> {
        let diff = lhs.checked_sub(rhs).ok_or(FormulaError::Overflow)?;
        let (residual, holds) = match relation {
            Relation::Eq => (diff, diff == 0),
            Relation::Ge => (diff, diff >= 0),
            Relation::Le => (diff, diff <= 0),
            Relation::Mod2 => (diff.rem_euclid(2), diff.rem_euclid(2) == 0),
        };
        Ok(Self { formula_id: formula_id.into(), relation, lhs, rhs, holds, residual })
    }

    fn from_wide(id: &str, relation: Relation, lhs: i128, rhs: i128) -> Result<Self, FormulaError> {
        Self::new(id, relation, i64_of(lhs)?, i64_of(rhs)?)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<22} {} {} {}  residual {}  {}",
            self.formula_id,
            self.lhs,
            self.relation,
            self.rhs,
            self.residual,
            if self.holds { "ok" } else { "FAIL" }
        )
    }
}

/// Local fiber constant `c_ν` for `m − n` odd, via `1 − c_{σ±} = ±s_σ`.
pub fn odd_codim_c(t: StratumType) -> Result<i64, FormulaError> {
    let s = match t {
        StratumType::A { k, .. } if k >= 1 => a_k_s(k)?,
        StratumType::Sigma { r, .. } => sigma_r_s(r)?,
        _ => return Err(FormulaError::MissingConstant(t.to_string(), "F1")),
    };
    match t.sign() {
        Some(Sign::Plus) => Ok(1 - s),
        Some(Sign::Minus) => Ok(1 + s),
        None if s == 0 => Ok(1),
        None => Err(FormulaError::MissingConstant(t.to_string(), "F1")),
    }
}

/// `Σ_ν c_ν χ_c(ν(f)) = χ_f χ_c(N)`, the regular part counted with `c = 1`.
pub fn check_f1(l: &SingularLedger) -> Result<CheckReport, FormulaError> {
    l.require_parity("F1", true)?;
    l.validate()?;
    let chi_f = l.require_chi_f()?;
    let mut lhs = l.regular_chi();
    for t in l.labels() {
        lhs += i128::from(odd_codim_c(t)?) * i128::from(l.chi_of(t));
    }
    CheckReport::from_wide("F1", Relation::Eq, lhs, i128::from(chi_f) * i128::from(l.chi_n))
}

#[derive(Clone, Copy)]
enum GenotypeFilter {
    Any,
    OnlyA,
    OnlySigma,
}

fn signed_genotype_sum(l: &SingularLedger, filter: GenotypeFilter, id: &'static str) -> Result<i128, FormulaError> {
    let mut sum = 0i128;
    for t in l.labels() {
        let s = match (t, filter) {
            (StratumType::A { k, .. }, GenotypeFilter::Any | GenotypeFilter::OnlyA) if k >= 1 => a_k_s(k)?,
            (StratumType::Sigma { r, .. }, GenotypeFilter::Any | GenotypeFilter::OnlySigma) => sigma_r_s(r)?,
            (_, GenotypeFilter::Any) => return Err(FormulaError::MissingConstant(t.to_string(), id)),
            _ => return Err(FormulaError::LabelNotAllowed(t.to_string(), id)),
        };
        let chi = i128::from(l.chi_of(t));
        match t.sign() {
            Some(sign) => sum += i128::from(s) * i128::from(sign.as_i64()) * chi,
            None if s == 0 || chi == 0 => {}
            None => return Err(FormulaError::UnsignedStratum(t.to_string())),
        }
    }
    Ok(sum)
}

fn signed_sum_check(l: &SingularLedger, filter: GenotypeFilter, id: &'static str) -> Result<CheckReport, FormulaError> {
    l.require_parity(id, true)?;
    l.validate()?;
    let chi_f = l.require_chi_f()?;
    let lhs = i128::from(l.chi_m) - i128::from(chi_f) * i128::from(l.chi_n);
    let rhs = signed_genotype_sum(l, filter, id)?;
    CheckReport::from_wide(id, Relation::Eq, lhs, rhs)
}

/// `χ_c(M) − χ_f χ_c(N) = Σ_σ s_σ [χ_c(σ⁺) − χ_c(σ⁻)]`.
pub fn check_f2(l: &SingularLedger) -> Result<CheckReport, FormulaError> {
    signed_sum_check(l, GenotypeFilter::Any, "F2")
}

/// The `A_k`-only form: weights 1 for odd `k`, 0 for even `k`.
pub fn check_rmorin1(l: &SingularLedger) -> Result<CheckReport, FormulaError> {
    signed_sum_check(l, GenotypeFilter::OnlyA, "RMorin1")
}

/// The plane-genotype form with weights `1 − r`.
pub fn check_rmorin11(l: &SingularLedger) -> Result<CheckReport, FormulaError> {
    signed_sum_check(l, GenotypeFilter::OnlySigma, "RMorin11")
}

/// Parity of `c_ν` when `m − n` is even.
pub fn even_codim_c_mod2(t: StratumType) -> Result<i64, FormulaError> {
    match t {
        StratumType::A { k, .. } | StratumType::D { k, .. } => Ok(i64::from((1 + k) % 2)),
        StratumType::Sigma { r, .. } => Ok(i64::from(r % 2)),
        StratumType::I22 { .. } => Ok(0),
    }
}

/// `Σ_ν c_ν χ_c(ν(f)) ≡ χ_f χ_c(N) (mod 2)`; for ledgers with only `A` strata
/// also `χ(M) + Σ_{k≥1} χ(Ā_k) ≡ χ_f χ_c(N)`.
pub fn check_mod2(l: &SingularLedger) -> Result<Vec<CheckReport>, FormulaError> {
    l.require_parity("F111", false)?;
    let chi_f = l.require_chi_f()?;
    let mut lhs = l.regular_chi();
    for t in l.labels() {
        lhs += i128::from(even_codim_c_mod2(t)?) * i128::from(l.chi_of(t));
    }
    let rhs = i128::from(chi_f) * i128::from(l.chi_n);
    let mut out = vec![CheckReport::from_wide("F111", Relation::Mod2, lhs, rhs)?];
    if l.labels().iter().all(|t| t.a_level().is_some()) {
        let closed = closure_convert(l)?;
        let tf: i128 = i128::from(l.chi_m)
            + closed.closed_totals.iter().filter(|(&k, _)| k >= 1).map(|(_, &v)| i128::from(v)).sum::<i128>();
        out.push(CheckReport::from_wide("ThomFukuda", Relation::Mod2, tf, rhs)?);
    }
    Ok(out)
}

fn nmap_sum(m: &BTreeMap<i64, i64>) -> i128 {
    m.iter().map(|(&j, &chi)| i128::from(j) * i128::from(chi)).sum()
}

fn rthm1c_constants(t: StratumType) -> Result<(i64, i64), FormulaError> {
    match t {
        StratumType::A { k: 0, .. } => Ok((1, 1)),
        StratumType::A { .. } | StratumType::D { .. } => {
            let c = nu_constants(t).map_err(|_| FormulaError::MissingConstant(t.to_string(), "RThm1C"))?;
            Ok((c.c_max(), c.c_min()))
        }
        _ => Err(FormulaError::MissingConstant(t.to_string(), "RThm1C")),
    }
}

/// `Σ c^max χ_c(ν) ≥ Σ_j j χ_c(N_j^max)` and `Σ c^min χ_c(ν) ≤ Σ_j j χ_c(N_j^min)`,
/// as equalities when the ledger is flagged stable.
pub fn check_rthm1c(l: &SingularLedger) -> Result<[CheckReport; 2], FormulaError> {
    let nmax = l.nmax.as_ref().ok_or(FormulaError::MissingField("nmax"))?;
    let nmin = l.nmin.as_ref().ok_or(FormulaError::MissingField("nmin"))?;
    let reg = l.regular_chi();
    let (mut lmax, mut lmin) = (reg, reg);
    for t in l.labels() {
        let (cmax, cmin) = rthm1c_constants(t)?;
        let chi = i128::from(l.chi_of(t));
        lmax += i128::from(cmax) * chi;
        lmin += i128::from(cmin) * chi;
    }
    let (rmax, rmin) = if l.stable { (Relation::Eq, Relation::Eq) } else { (Relation::Ge, Relation::Le) };
    Ok([
        CheckReport::from_wide("RThm1C.max", rmax, lmax, nmap_sum(nmax))?,
        CheckReport::from_wide("RThm1C.min", rmin, lmin, nmap_sum(nmin))?,
    ])
}

/// The explicit `A_k`/`D_k` display for `χ_c(M) − Σ_j j χ_c(N_j^{max/min})`.
pub fn check_rmorin2(l: &SingularLedger) -> Result<[CheckReport; 2], FormulaError> {
    l.require_parity("RMorin2", false)?;
    l.validate()?;
    let nmax = l.nmax.as_ref().ok_or(FormulaError::MissingField("nmax"))?;
    let nmin = l.nmin.as_ref().ok_or(FormulaError::MissingField("nmin"))?;
    let (mut rmax, mut rmin) = (0i128, 0i128);
    for t in l.labels() {
        let chi = i128::from(l.chi_of(t));
        match t {
            StratumType::A { k, sign } if k >= 1 => {
                let k = i128::from(k);
                let odd = k % 2 == 1;
                match sign {
                    Some(Sign::Plus) => {
                        rmax -= k * chi;
                        if odd {
                            rmin += chi;
                        }
                    }
                    Some(Sign::Minus) => {
                        rmin += k * chi;
                        if odd {
                            rmax -= chi;
                        }
                    }
                    None => return Err(FormulaError::UnsignedStratum(t.to_string())),
                }
            }
            StratumType::D { k, sign } => {
                let k = i128::from(k);
                rmax += (k - 2) * chi;
                rmin += (2 - k) * chi;
                if sign == Some(Sign::Minus) && k % 2 == 0 {
                    rmax += 2 * chi;
                    rmin -= 2 * chi;
                }
            }
            _ => return Err(FormulaError::LabelNotAllowed(t.to_string(), "RMorin2")),
        }
    }
    let (rel_max, rel_min) = if l.stable { (Relation::Eq, Relation::Eq) } else { (Relation::Ge, Relation::Le) };
    let chi_m = i128::from(l.chi_m);
    Ok([
        CheckReport::from_wide("RMorin2.max", rel_max, chi_m - nmap_sum(nmax), rmax)?,
        CheckReport::from_wide("RMorin2.min", rel_min, chi_m - nmap_sum(nmin), rmin)?,
    ])
}

/// Morin-map identities for `Σ_j j χ_c(N_j^{max/min})` with `dim N ∈ {1, 2, 3}`.
/// The two averaged forms are reported doubled to stay integral.
pub fn check_rmorin3(l: &SingularLedger) -> Result<Vec<CheckReport>, FormulaError> {
    l.require_parity("RMorin3", false)?;
    l.validate()?;
    if !(1..=3).contains(&l.n) {
        return Err(FormulaError::DimensionMismatch { formula: "RMorin3", need: "n in {1, 2, 3}", m: l.m, n: l.n });
    }
    for t in l.labels() {
        match t.a_level() {
            Some(k) if (1..=l.n).contains(&k) => {}
            _ => return Err(FormulaError::LabelNotAllowed(t.to_string(), "RMorin3")),
        }
    }
    let nmax = l.nmax.as_ref().ok_or(FormulaError::MissingField("nmax"))?;
    let nmin = l.nmin.as_ref().ok_or(FormulaError::MissingField("nmin"))?;
    let chi_m = i128::from(l.chi_m);
    let a1 = i128::from(l.a_total(1));
    let (pmax, pmin, avg_sum, avg_diff) = match l.n {
        1 => (chi_m + a1, chi_m - a1, 2 * chi_m, 2 * a1),
        2 => {
            let p2 = i128::from(l.a_count_signed(2, Sign::Plus)?);
            let m2 = i128::from(l.a_count_signed(2, Sign::Minus)?);
            (chi_m + a1 + 2 * p2, chi_m - a1 - 2 * m2, 2 * (chi_m + p2 - m2), 2 * (a1 + p2 + m2))
        }
        _ => {
            let p2 = i128::from(l.a_signed(2, Sign::Plus)?);
            let m2 = i128::from(l.a_signed(2, Sign::Minus)?);
            let p3 = i128::from(l.a_count_signed(3, Sign::Plus)?);
            let m3 = i128::from(l.a_count_signed(3, Sign::Minus)?);
            let a3 = p3 + m3;
            (
                chi_m + a1 + 2 * p2 + a3 + 2 * p3,
                chi_m - a1 - 2 * m2 - a3 - 2 * m3,
                2 * (chi_m + p2 - m2 + p3 - m3),
                2 * (a1 + p2 + m2 + 2 * a3),
            )
        }
    };
    let (smax, smin) = (nmap_sum(nmax), nmap_sum(nmin));
    let mut out = Vec::with_capacity(4);
    if l.stable {
        out.push(CheckReport::from_wide("RMorin3.max", Relation::Eq, smax, pmax)?);
        out.push(CheckReport::from_wide("RMorin3.min", Relation::Eq, smin, pmin)?);
        out.push(CheckReport::from_wide("RMorin3.avg_sum_x2", Relation::Eq, smax + smin, avg_sum)?);
        out.push(CheckReport::from_wide("RMorin3.avg_diff_x2", Relation::Eq, smax - smin, avg_diff)?);
    } else {
        out.push(CheckReport::from_wide("RMorin3.max", Relation::Le, smax, pmax)?);
        out.push(CheckReport::from_wide("RMorin3.min", Relation::Ge, smin, pmin)?);
    }
    Ok(out)
}

/// Local degree `d_ν` of an equidimensional stratum; `None` when only its
/// parity is known.
pub fn local_degree(t: StratumType) -> Result<Option<i64>, FormulaError> {
    match t {
        StratumType::A { k, sign } if k % 2 == 0 => Ok(sign.map(Sign::as_i64)),
        StratumType::A { .. } => Ok(Some(0)),
        StratumType::I22 { sign: Sign::Minus } => Ok(Some(2)),
        StratumType::I22 { sign: Sign::Plus } => Ok(Some(0)),
        _ => Err(FormulaError::MissingConstant(t.to_string(), "RThm1D")),
    }
}

/// `Σ_ν d_ν χ_c(ν(f)) = deg f · χ_c(N)`; falls back to the mod-2 form when an
/// even `A_k` stratum carries no sign.
pub fn check_degree(l: &SingularLedger) -> Result<CheckReport, FormulaError> {
    l.require_equal_dims("RThm1D")?;
    l.validate()?;
    let deg = l.require_deg()?;
    let labels = l.labels();
    let mut exact = true;
    let mut lhs = 0i128;
    for &t in &labels {
        let chi = i128::from(l.chi_of(t));
        match local_degree(t)? {
            Some(d) => lhs += i128::from(d) * chi,
            None => {
                exact = false;
                lhs += chi;
            }
        }
    }
    let rhs = i128::from(deg) * i128::from(l.chi_n);
    if !exact {
        return CheckReport::from_wide("RThm1D.mod2", Relation::Mod2, lhs, rhs);
    }
    let id = if labels.iter().any(|t| matches!(t, StratumType::I22 { .. })) {
        "RMorin5"
    } else if labels.iter().all(|t| t.a_level().is_some()) {
        "RMorin4"
    } else {
        "RThm1D"
    };
    CheckReport::from_wide(id, Relation::Eq, lhs, rhs)
}

/// Closed-stratum Euler characteristics `χ(Ā_k^±) = χ_c(A_k^±) + χ_c(Ā_{k+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClosedStrata {
    /// Keyed like the ledger's `A` labels.
    pub closed: BTreeMap<StratumType, i64>,
    /// `χ_c(Ā_k) = Σ_{i≥k} χ_c(A_i)` for every level of the chain.
    pub closed_totals: BTreeMap<u32, i64>,
}

fn a_levels(labels: impl IntoIterator<Item = StratumType>) -> Result<Vec<u32>, FormulaError> {
    let levels: BTreeSet<u32> = labels.into_iter().filter_map(StratumType::a_level).collect();
    if let (Some(&lo), Some(&hi)) = (levels.first(), levels.last()) {
        if let Some(gap) = (lo..=hi).find(|k| !levels.contains(k)) {
            return Err(FormulaError::BrokenChain(gap));
        }
    }
    Ok(levels.into_iter().collect())
}

pub fn closure_convert(l: &SingularLedger) -> Result<ClosedStrata, FormulaError> {
    l.validate()?;
    let levels = a_levels(l.labels())?;
    let mut out = ClosedStrata::default();
    let mut above = 0i128;
    for &k in levels.iter().rev() {
        for t in l.labels().into_iter().filter(|t| t.a_level() == Some(k)) {
            let v = i128::from(l.chi_of(t)) + above;
            out.closed.insert(t, i64_of(v)?);
        }
        above += i128::from(l.a_total(k));
        out.closed_totals.insert(k, i64_of(above)?);
    }
    Ok(out)
}

/// Inverse of [`closure_convert`]: open-stratum `χ_c` from closed values.
/// A missing sign at a signed level means that open stratum is empty.
pub fn open_from_closed(closed: &BTreeMap<StratumType, i64>) -> Result<BTreeMap<StratumType, i64>, FormulaError> {
    let levels = a_levels(closed.keys().copied())?;
    let mut out = BTreeMap::new();
    let mut above = 0i128; // χ_c(Ā_{k+1})
    for &k in levels.iter().rev() {
        let unsigned = StratumType::a(k, None);
        let plus = StratumType::a(k, Some(Sign::Plus));
        let minus = StratumType::a(k, Some(Sign::Minus));
        let this_level = if let Some(&v) = closed.get(&unsigned) {
            if closed.contains_key(&plus) || closed.contains_key(&minus) {
                return Err(FormulaError::AmbiguousStratum(unsigned.to_string()));
            }
            out.insert(unsigned, i64_of(i128::from(v) - above)?);
            i128::from(v)
        } else {
            let p = closed.get(&plus).map(|&v| i128::from(v));
            let m = closed.get(&minus).map(|&v| i128::from(v));
            if let Some(p) = p {
                out.insert(plus, i64_of(p - above)?);
            }
            if let Some(m) = m {
                out.insert(minus, i64_of(m - above)?);
            }
            // Ā_k = Ā_k⁺ ∪ Ā_k⁻ glued along Ā_{k+1}.
            p.unwrap_or(above) + m.unwrap_or(above) - above
        };
        above = this_level;
    }
    Ok(out)
}

fn odd_even_closed_sum(closed: &ClosedStrata, odd: bool) -> Result<i128, FormulaError> {
    let mut sum = 0i128;
    for (&t, &v) in &closed.closed {
        let Some(k) = t.a_level() else { continue };
        if (k % 2 == 1) != odd {
            continue;
        }
        match t.sign() {
            Some(s) => sum += i128::from(s.as_i64()) * i128::from(v),
            None if v == 0 => {}
            None => return Err(FormulaError::UnsignedStratum(t.to_string())),
        }
    }
    Ok(sum)
}

/// `χ(M) = Σ_{k odd} [χ(Ā_k⁺) − χ(Ā_k⁻)]` for compact `M`, `m − n` odd.
pub fn check_rthm6a(l: &SingularLedger) -> Result<CheckReport, FormulaError> {
    l.require_parity("RThm6A", true)?;
    if let Some(t) = l.labels().into_iter().find(|t| t.a_level().is_none()) {
        return Err(FormulaError::LabelNotAllowed(t.to_string(), "RThm6A"));
    }
    let closed = closure_convert(l)?;
    CheckReport::from_wide("RThm6A", Relation::Eq, i128::from(l.chi_m), odd_even_closed_sum(&closed, true)?)
}

/// `Σ_{k even} [χ(Ā_k⁺) − χ(Ā_k⁻)] = deg f · χ(N)` for compact `M`, `m = n`.
pub fn check_quine(l: &SingularLedger) -> Result<CheckReport, FormulaError> {
    l.require_equal_dims("Quine")?;
    if let Some(t) = l.labels().into_iter().find(|t| t.a_level().is_none()) {
        return Err(FormulaError::LabelNotAllowed(t.to_string(), "Quine"));
    }
    let deg = l.require_deg()?;
    let closed = closure_convert(l)?;
    CheckReport::from_wide(
        "Quine",
        Relation::Eq,
        odd_even_closed_sum(&closed, false)?,
        i128::from(deg) * i128::from(l.chi_n),
    )
}

/// `χ_c(M) + (−1)^{m−n} Σ_{k=1}^n χ_c(Ā_k) = χ_f χ_c(N)` for holomorphic Morin maps.
pub fn check_cmorin(l: &SingularLedger) -> Result<CheckReport, FormulaError> {
    if !l.complex {
        return Err(FormulaError::NotComplex("CMorin"));
    }
    if let Some(t) = l.labels().into_iter().find(|t| !matches!(t.a_level(), Some(k) if k >= 1)) {
        return Err(FormulaError::LabelNotAllowed(t.to_string(), "CMorin"));
    }
    let chi_f = l.require_chi_f()?;
    let closed = closure_convert(l)?;
    let sum: i128 =
        closed.closed_totals.iter().filter(|(&k, _)| (1..=l.n).contains(&k)).map(|(_, &v)| i128::from(v)).sum();
    let sign = if (i64::from(l.m) - i64::from(l.n)).rem_euclid(2) == 0 { 1 } else { -1 };
    CheckReport::from_wide("CMorin", Relation::Eq, i128::from(l.chi_m) + sign * sum, i128::from(chi_f) * i128::from(l.chi_n))
}

/// Invariants of a finite holomorphic plane germ and its stable perturbation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GermData {
    pub name: String,
    pub deg0: i64,
    /// Milnor number of the critical curve.
    pub mu: i64,
    pub a2: i64,
}

/// `1 + (1 − μ) + #A₂ = deg₀` for one germ.
pub fn check_gaffney_mond(g: &GermData) -> Result<CheckReport, FormulaError> {
    CheckReport::from_wide(
        "GaffneyMond",
        Relation::Eq,
        1 + (1 - i128::from(g.mu)) + i128::from(g.a2),
        i128::from(g.deg0),
    )
}

/// Equal `deg₀` and `μ` force equal cusp counts. `None` when the premise fails.
pub fn compare_gaffney_mond(f: &GermData, g: &GermData) -> Result<Option<CheckReport>, FormulaError> {
    if f.deg0 != g.deg0 || f.mu != g.mu {
        return Ok(None);
    }
    Ok(Some(CheckReport::new("GaffneyMond.compare", Relation::Eq, f.a2, g.a2)?))
}

/// Data around an isolated singular point of a germ `(ℝⁿ, 0) → (ℝᵖ, 0)`.
///
/// `interior` holds `χ` of closed strata of a Morin perturbation inside the
/// local ball, `boundary` the `χ` of closed strata of the boundary map,
/// `boundary_psi` the semicharacteristics of closed boundary strata, and
/// `counts` the point counts of zero-dimensional perturbation strata.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LocalLedger {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: u32,
    pub p: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_link: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_link: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deg0: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grad_deg: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_branches: Option<i64>,
    #[serde(default)]
    pub interior: BTreeMap<StratumType, i64>,
    #[serde(default)]
    pub boundary: BTreeMap<StratumType, i64>,
    #[serde(default)]
    pub boundary_psi: BTreeMap<StratumType, i64>,
    #[serde(default)]
    pub counts: BTreeMap<StratumType, u64>,
}

impl LocalLedger {
    fn count_level(&self, k: u32) -> i64 {
        self.counts.iter().filter(|(t, _)| t.a_level() == Some(k)).map(|(_, &c)| c as i64).sum()
    }

    fn boundary_psi_level(&self, k: u32) -> Option<i64> {
        self.boundary_psi.iter().find(|(t, _)| t.a_level() == Some(k)).map(|(_, &v)| v)
    }
}

fn signed_parity_sum(map: &BTreeMap<StratumType, i64>, odd: bool, counts: &BTreeMap<StratumType, u64>) -> Result<i128, FormulaError> {
    let mut sum = 0i128;
    let keys: BTreeSet<StratumType> = map.keys().chain(counts.keys()).copied().collect();
    for t in keys {
        let Some(k) = t.a_level() else { continue };
        if (k % 2 == 1) != odd {
            continue;
        }
        let v = map.get(&t).copied().or_else(|| counts.get(&t).map(|&c| c as i64)).unwrap_or(0);
        match t.sign() {
            Some(s) => sum += i128::from(s.as_i64()) * i128::from(v),
            None if v == 0 => {}
            None => return Err(FormulaError::UnsignedStratum(t.to_string())),
        }
    }
    Ok(sum)
}

/// Every local identity the ledger has data for.
pub fn check_local(l: &LocalLedger) -> Result<Vec<CheckReport>, FormulaError> {
    let mut out = Vec::new();
    let empty = BTreeMap::new();
    let (n, p) = (l.n, l.p);

    if let Some(psi) = l.psi_link {
        if n > p && p >= 1 {
            let mut rhs = Some(1 + l.count_level(p));
            for k in 1..p {
                let term = l.boundary_psi_level(k).or_else(|| {
                    (p == 2 && k == 1).then_some(()).and(l.half_branches).map(|b| b / 2)
                });
                rhs = rhs.zip(term).map(|(a, b)| a + b);
            }
            let has_perturbation = p > 1 || l.counts.keys().any(|t| t.a_level() == Some(1));
            if let (Some(rhs), true) = (rhs, has_perturbation) {
                out.push(CheckReport::new("RThm6C", Relation::Mod2, psi, rhs)?);
            }
            if p == 1 {
                if let Some(g) = l.grad_deg {
                    out.push(CheckReport::new("RThm6C.p1", Relation::Mod2, psi, 1 + g)?);
                }
            }
        }
    }

    if let Some(chi) = l.chi_link {
        if n > p && (n - p) % 2 == 1 {
            let has_interior = l.interior.keys().chain(l.counts.keys()).any(|t| matches!(t.a_level(), Some(k) if k % 2 == 1));
            if has_interior {
                let s = signed_parity_sum(&l.interior, true, &l.counts)?;
                out.push(CheckReport::from_wide("RThm6D", Relation::Eq, i128::from(chi), 2 - 2 * s)?);
            }
            if n % 2 == 1 && p % 2 == 0 && l.boundary.keys().any(|t| matches!(t.a_level(), Some(k) if k % 2 == 1)) {
                let s = signed_parity_sum(&l.boundary, true, &empty)?;
                out.push(CheckReport::from_wide("RThm6D.boundary", Relation::Eq, i128::from(chi), 2 - s)?);
            }
        }
    }

    if let Some(deg0) = l.deg0 {
        if n == p {
            if l.interior.keys().any(|t| t.a_level() == Some(0)) {
                let s = signed_parity_sum(&l.interior, false, &l.counts)?;
                out.push(CheckReport::from_wide("RThm6E", Relation::Eq, i128::from(deg0), s)?);
            }
            if n % 2 == 1 && l.boundary.keys().any(|t| matches!(t.a_level(), Some(k) if k % 2 == 0)) {
                let s = signed_parity_sum(&l.boundary, false, &empty)?;
                out.push(CheckReport::from_wide("RThm6E.odd", Relation::Eq, 2 * i128::from(deg0), s)?);
            }
            let psi_terms: Option<i64> = (1..n).map(|k| l.boundary_psi_level(k)).sum();
            if let Some(psi_sum) = psi_terms {
                if l.counts.keys().any(|t| t.a_level() == Some(n)) {
                    out.push(CheckReport::new("RThm6E.mod2", Relation::Mod2, deg0, 1 + psi_sum + l.count_level(n))?);
                }
            }
            if n == 2 {
                if let Some(b) = l.half_branches {
                    out.push(CheckReport::new("FukudaIshikawa", Relation::Mod2, deg0, 1 + b / 2 + l.count_level(2))?);
                }
            }
        }
    }

    if out.is_empty() {
        return Err(FormulaError::InsufficientLocalData("check_local"));
    }
    Ok(out)
}

/// Checker names accepted by [`check_named`].
pub const FORMULA_NAMES: &[&str] = &[
    "f1", "f2", "rmorin1", "rmorin11", "mod2", "rthm1c", "rmorin2", "rmorin3", "degree", "rthm6a", "quine", "cmorin",
];

/// Runs one checker by its contract name.
pub fn check_named(name: &str, l: &SingularLedger) -> Result<Vec<CheckReport>, FormulaError> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "f1" | "check_f1" => vec![check_f1(l)?],
        "f2" | "check_f2" => vec![check_f2(l)?],
        "rmorin1" => vec![check_rmorin1(l)?],
        "rmorin11" => vec![check_rmorin11(l)?],
        "mod2" | "f111" => check_mod2(l)?,
        "rthm1c" => check_rthm1c(l)?.to_vec(),
        "rmorin2" => check_rmorin2(l)?.to_vec(),
        "rmorin3" => check_rmorin3(l)?,
        "degree" | "rthm1d" | "rmorin4" | "rmorin5" => vec![check_degree(l)?],
        "rthm6a" => vec![check_rthm6a(l)?],
        "quine" => vec![check_quine(l)?],
        "cmorin" => vec![check_cmorin(l)?],
        _ => return Err(FormulaError::UnknownFormula(name.to_string())),
    })
}

/// Every checker whose dimension, parity and data requirements the ledger meets.
pub fn applicable_formulas(l: &SingularLedger) -> Vec<&'static str> {
    let diff = i64::from(l.m) - i64::from(l.n);
    let only_a = l.labels().iter().all(|t| t.a_level().is_some());
    let only_sigma = l.labels().iter().all(|t| matches!(t, StratumType::Sigma { .. }));
    let has_n = l.nmax.is_some() && l.nmin.is_some();
    let mut out = Vec::new();
    if l.complex {
        if l.chi_f.is_some() {
            out.push("cmorin");
        }
        return out;
    }
    if diff >= 0 && diff % 2 == 1 {
        if l.chi_f.is_some() {
            out.extend(["f1", "f2"]);
            if only_a {
                out.push("rmorin1");
            }
            if only_sigma && !l.labels().is_empty() {
                out.push("rmorin11");
            }
        }
        if only_a {
            out.push("rthm6a");
        }
    }
    if diff >= 0 && diff % 2 == 0 && l.chi_f.is_some() {
        out.push("mod2");
    }
    if has_n {
        out.push("rthm1c");
        if diff > 0 && diff % 2 == 0 {
            out.push("rmorin2");
            if only_a && (1..=3).contains(&l.n) {
                out.push("rmorin3");
            }
        }
    }
    if diff == 0 && l.deg.is_some() {
        out.push("degree");
        if only_a {
            out.push("quine");
        }
    }
    out
}
