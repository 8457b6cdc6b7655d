//! Branch points of rational maps `ℂP¹ → ℂP¹`.

use std::collections::BTreeMap;

use eulerint_core::{SingularLedger, StratumType};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::poly::{to_f64, UPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BranchError {
    #[error("degree must be at least 1")]
    Degree,
    #[error("numerator and denominator share a factor")]
    CommonFactor,
    #[error("the map is not Morin: {0}")]
    NotMorin(String),
    #[error("root finder did not converge")]
    NoConvergence,
    #[error("numeric root count {numeric} disagrees with the algebraic count {exact}")]
    CountMismatch { numeric: usize, exact: usize },
    #[error("no generic map found in {0} draws")]
    NoGenericDraw(usize),
}

/// `P/Q` with integer coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    pub num: UPoly,
    pub den: UPoly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchData {
    pub degree: usize,
    pub critical_points: Vec<[f64; 2]>,
}

impl RationalMap {
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// `P′Q − PQ′`; its roots are the finite critical points.
    pub fn wronskian(&self) -> UPoly {
        self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()))
    }

    /// Critical points of a map whose critical points are all simple and finite.
    ///
    /// The Wronskian must have degree `2d − 2` (so `∞` is not critical) and be
    /// squarefree (so every critical point is a fold). Its roots are then
    /// located numerically and counted independently.
    pub fn branch_data(&self) -> Result<BranchData, BranchError> {
        let d = self.degree();
        if d == 0 {
            return Err(BranchError::Degree);
        }
        if self.num.gcd(&self.den).degree() != Some(0) {
            return Err(BranchError::CommonFactor);
        }
        if self.num.degree() != Some(d) || self.den.degree() != Some(d) {
            return Err(BranchError::NotMorin("∞ must map to a finite regular value".into()));
        }
        let w = self.wronskian();
        let exact = 2 * d - 2;
        if w.degree().unwrap_or(0) != exact {
            return Err(BranchError::NotMorin("∞ is a critical point".into()));
        }
        if w.gcd(&w.derivative()).degree() != Some(0) {
            return Err(BranchError::NotMorin("degenerate critical point".into()));
        }
        let roots = durand_kerner(&w)?;
        let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut distinct: Vec<Complex64> = Vec::new();
        for z in roots {
            if distinct.iter().all(|q| (q - z).norm() > 1e-6 * scale) {
                distinct.push(z);
            }
        }
        if distinct.len() != exact {
            return Err(BranchError::CountMismatch { numeric: distinct.len(), exact });
        }
        let mut critical_points: Vec<[f64; 2]> = distinct.iter().map(|z| [z.re, z.im]).collect();
        critical_points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(BranchData { degree: d, critical_points })
    }

    /// Ledger of the map as a holomorphic Morin map of curves.
    pub fn ledger(&self) -> Result<SingularLedger, BranchError> {
        let b = self.branch_data()?;
        let mut counts = BTreeMap::new();
        counts.insert(StratumType::a(1, None), b.critical_points.len() as u64);
        Ok(SingularLedger {
            name: Some(format!("rational map of degree {}", b.degree)),
            m: 1,
            n: 1,
            chi_m: 2,
            chi_n: 2,
            chi_f: Some(b.degree as i64),
            stable: true,
            complex: true,
            counts,
            ..Default::default()
        })
    }
}

/// Draws `P/Q` of degree `d` with coefficients in `[−5, 5]` until the map is generic.
pub fn random_rational_map(d: usize, seed: u64) -> Result<RationalMap, BranchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const DRAWS: usize = 200;
    for _ in 0..DRAWS {
        let mut draw = || {
            let mut c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-5..=5)).collect();
            if c[d] == 0 {
                c[d] = 1;
            }
            UPoly::from_ints(&c)
        };
        let map = RationalMap { num: draw(), den: draw() };
        if map.branch_data().is_ok() {
            return Ok(map);
        }
    }
    Err(BranchError::NoGenericDraw(DRAWS))
}

/// All complex roots of `p` by simultaneous Weierstrass iteration.
pub fn durand_kerner(p: &UPoly) -> Result<Vec<Complex64>, BranchError> {
    let n = p.degree().unwrap_or(0);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = to_f64(p.lead().expect("nonzero"));
    let c: Vec<f64> = p.coeffs().iter().map(|x| to_f64(x) / lead).collect();
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let bound = 1.0 + c[..n].iter().map(|a| a.abs()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound / 2.0).collect();
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let denom = (0..n).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = eval(z[i]) / denom;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 * bound {
            return Ok(z);
        }
    }
    Err(BranchError::NoConvergence)
}
