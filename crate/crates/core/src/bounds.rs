//! Closed-form upper bounds for `D(G)`, cited reference constants, and
//! per-group comparison tables.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{davenport, CertificateStatus, SearchConfig};
use crate::error::{Error, Result};
use crate::group::AbelianGroup;

/// `exp + |G|/exp - 1` when `exp^2 >= |G|`, else `floor(2 sqrt|G|) - 1`.
pub fn theorem1_bound(g: &AbelianGroup) -> u64 {
    let n = g.order() as u64;
    let e = g.exponent();
    if e * e >= n {
        assert_eq!(n % e, 0, "exponent divides the order");
        e + n / e - 1
    } else {
        (4 * n).isqrt() - 1
    }
}

/// `2 floor(sqrt|G|) - 1`, the sequence length used by the inductive step
/// when `exp^2 < |G|`; `None` otherwise. Not an upper bound for `D` in
/// general: `D(Z_2^3) = 4 > 3`.
pub fn theorem1_floor_form(g: &AbelianGroup) -> Option<u64> {
    let n = g.order() as u64;
    let e = g.exponent();
    (e * e < n).then(|| 2 * n.isqrt() - 1)
}

/// Real-valued bound `exp (1 + ln(|G|/exp))` with an error radius and a safe ceiling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EbkBound {
    pub value: f64,
    pub radius: f64,
    pub ceiling: u64,
}

pub fn ebk_bound(g: &AbelianGroup) -> Result<EbkBound> {
    let n = g.order() as u64;
    if n < 2 {
        return Err(Error::InvalidArgument("bound needs |G| >= 2".into()));
    }
    let e = g.exponent();
    let q = n / e;
    if q == 1 {
        return Ok(EbkBound { value: e as f64, radius: 0.0, ceiling: e });
    }
    let value = e as f64 * (1.0 + (q as f64).ln());
    // ln of an integer > 1 is irrational, so the value is never an integer
    let radius = value * 4.0 * f64::EPSILON;
    let ceiling = (value + radius).ceil() as u64;
    Ok(EbkBound { value, radius, ceiling })
}

/// `ceil(|G|/k) + k - 1` for `1 <= k <= min(|G|/exp, 7)`.
pub fn bab_bound(g: &AbelianGroup, k: u64) -> Result<u64> {
    let n = g.order() as u64;
    let kmax = bab_max_k(g);
    if k == 0 || k > kmax {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={kmax} for {g}")));
    }
    Ok(n.div_ceil(k) + k - 1)
}

pub fn bab_max_k(g: &AbelianGroup) -> u64 {
    (g.order() as u64 / g.exponent()).min(7)
}

/// Smallest admissible bound and the `k` attaining it (smallest such `k`).
pub fn best_bab(g: &AbelianGroup) -> (u64, u64) {
    (1..=bab_max_k(g))
        .map(|k| (bab_bound(g, k).expect("k in range"), k))
        .min()
        .expect("k = 1 is always admissible")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefConstant {
    D,
    Eta,
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefKind {
    Exact,
    Upper,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefEntry {
    pub constant: RefConstant,
    pub group: String,
    #[serde(with = "crate::exact::bigint_str")]
    pub value: BigInt,
    pub kind: RefKind,
}

const TABLE: &[(RefConstant, u64, u32, u64, RefKind)] = &[
    (RefConstant::S, 3, 3, 19, RefKind::Exact),
    (RefConstant::S, 3, 4, 41, RefKind::Exact),
    (RefConstant::S, 3, 5, 91, RefKind::Exact),
    (RefConstant::S, 3, 6, 225, RefKind::Exact),
    (RefConstant::S, 5, 3, 37, RefKind::Exact),
    (RefConstant::S, 5, 4, 157, RefKind::Upper),
    (RefConstant::S, 5, 5, 690, RefKind::Upper),
    (RefConstant::S, 5, 6, 3091, RefKind::Upper),
    (RefConstant::Eta, 3, 3, 17, RefKind::Exact),
    (RefConstant::Eta, 5, 3, 33, RefKind::Exact),
];

fn entry(constant: RefConstant, group: String, value: BigInt, kind: RefKind) -> RefEntry {
    RefEntry { constant, group, value, kind }
}

/// The tabulated values for elementary groups `Z_p^d`.
pub fn reference_constants() -> Vec<RefEntry> {
    TABLE
        .iter()
        .map(|&(c, p, d, v, kind)| entry(c, format!("{p}^{d}"), BigInt::from(v), kind))
        .collect()
}

/// Reference value for `Z_p^d`: the table, `eta(Z_p^2) = 3p - 2` and `D(Z_p^d) = d(p-1) + 1`.
pub fn reference_value(c: RefConstant, p: u64, d: u32) -> Option<RefEntry> {
    let group = format!("{p}^{d}");
    if let Some(&(_, _, _, v, kind)) = TABLE.iter().find(|t| t.0 == c && t.1 == p && t.2 == d) {
        return Some(entry(c, group, BigInt::from(v), kind));
    }
    match c {
        RefConstant::Eta if d == 2 => Some(entry(c, group, BigInt::from(3 * p - 2), RefKind::Exact)),
        RefConstant::D => Some(entry(c, group, BigInt::from(d as u64 * (p - 1) + 1), RefKind::Exact)),
        _ => None,
    }
}

/// Reference value for an arbitrary group: rank `<= 2` and elementary `D`, and the elementary table.
pub fn reference_for_group(c: RefConstant, g: &AbelianGroup) -> Option<RefEntry> {
    if c == RefConstant::D && g.rank() <= 2 {
        return Some(entry(c, g.to_string(), BigInt::from(g.m_invariant()), RefKind::Exact));
    }
    let (p, d) = g.as_elementary()?;
    reference_value(c, p, d as u32).map(|mut e| {
        e.group = g.to_string();
        e
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub group: String,
    pub order: u64,
    pub exponent: u64,
    pub m: u64,
    pub d_exact: Option<u64>,
    pub d_cert: Option<CertificateStatus>,
    pub thm1: u64,
    pub ebk: Option<EbkBound>,
    pub bab_best: u64,
    pub bab_k: u64,
    pub eta_ref: Option<RefEntry>,
    pub s_ref: Option<RefEntry>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
}

/// Exact `D` is computed for groups up to this order.
pub const REPORT_EXACT_MAX_ORDER: usize = 36;

fn row(g: &AbelianGroup, cfg: &SearchConfig) -> Result<BoundRow> {
    let mut notes = Vec::new();
    let (d_exact, d_cert) = if g.order() <= REPORT_EXACT_MAX_ORDER {
        let r = davenport(g, cfg)?;
        if r.certificate.bound_kind == crate::engine::BoundKind::Exact {
            (Some(r.value), Some(r.certificate.status))
        } else {
            notes.push(format!("search budget exhausted at D >= {}", r.value));
            (None, Some(r.certificate.status))
        }
    } else {
        notes.push("beyond exact tier".to_string());
        (None, None)
    };
    let thm1 = theorem1_bound(g);
    let ebk = ebk_bound(g).ok();
    let (bab_best, bab_k) = best_bab(g);
    let m = g.m_invariant();
    if let Some(f) = theorem1_floor_form(g) {
        if f != thm1 {
            notes.push(format!("2*floor(sqrt|G|)-1 = {f}"));
        }
    }
    if let Some(dv) = d_exact {
        let mut uppers = vec![("thm1", thm1), ("bab", bab_best)];
        if let Some(e) = ebk {
            uppers.push(("ebk", e.ceiling));
        }
        if dv < m {
            return Err(Error::Validation(format!("{g}: D = {dv} below M(G) = {m}")));
        }
        for (name, u) in uppers {
            if dv > u {
                return Err(Error::Validation(format!("{g}: D = {dv} exceeds the {name} bound {u}")));
            }
        }
    }
    Ok(BoundRow {
        group: g.to_string(),
        order: g.order() as u64,
        exponent: g.exponent(),
        m,
        d_exact,
        d_cert,
        thm1,
        ebk,
        bab_best,
        bab_k,
        eta_ref: reference_for_group(RefConstant::Eta, g),
        s_ref: reference_for_group(RefConstant::S, g),
        notes,
    })
}

/// One row per group; any exact `D` outside `[M(G), every upper bound]` is an error.
pub fn compare_report(groups: &[AbelianGroup], cfg: &SearchConfig) -> Result<BoundReport> {
    let rows = groups.par_iter().map(|g| row(g, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(BoundReport { rows })
}

pub const CSV_HEADER: &str = "group,order,exponent,M,D_exact,D_cert,thm1,ebk_ceil,bab_best,notes";

impl BoundReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cert = r.d_cert.map(|c| serde_json::to_value(c).expect("enum").as_str().unwrap_or("").to_string());
            let line = [
                r.group.clone(),
                r.order.to_string(),
                r.exponent.to_string(),
                r.m.to_string(),
                r.d_exact.map(|v| v.to_string()).unwrap_or_default(),
                cert.unwrap_or_default(),
                r.thm1.to_string(),
                r.ebk.map(|e| e.ceiling.to_string()).unwrap_or_default(),
                r.bab_best.to_string(),
                r.notes.join("; "),
            ];
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}
