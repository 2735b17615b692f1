//! Lower bounds on `w` and feasibility predicates for nestings.
//!
//! The general bounds are exact ceilings of rational expressions; a small
//! refinement table keyed on `(k, λ, v mod m)` tightens them where a sharper
//! residue-specific bound is known.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::design::DesignParams;
use crate::error::Result;
use crate::verify::{Certificate, Mode};

/// A minimal nesting needs `k ≥ 2λ + 1`.
pub fn minimal_nesting_feasible(k: usize, lambda: usize) -> bool {
    k > 2 * lambda
}

/// A perfect nesting needs `v ≡ 1 (mod 2k)`.
pub fn perfect_nesting_necessary(v: usize, k: usize) -> bool {
    k > 0 && v % (2 * k) == 1
}

fn ceil_div(num: usize, den: usize) -> usize {
    num.div_ceil(den)
}

/// A lower bound together with where it comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub value: usize,
    pub basis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// The bound attached to a certificate, and whether the certificate meets it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub mode: Mode,
    pub value: usize,
    pub basis: String,
    pub met: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Residue-specific bound for `(v, k, λ)` with `v ≡ residue (mod modulus)`.
struct Refinement {
    k: usize,
    lambda: usize,
    mode: Mode,
    modulus: usize,
    residue: usize,
    bound: fn(usize) -> usize,
    basis: &'static str,
    note: Option<&'static str>,
}

const REFINEMENTS: &[Refinement] = &[
    Refinement {
        k: 2,
        lambda: 1,
        mode: Mode::Strong,
        modulus: 1,
        residue: 0,
        bound: |v| ceil_div(3 * v, 2),
        basis: "new-point degree bound for (v,2,1): ⌈3v/2⌉",
        note: None,
    },
    Refinement {
        k: 3,
        lambda: 2,
        mode: Mode::Strong,
        modulus: 6,
        residue: 3,
        bound: |v| (3 * v).div_ceil(2),
        basis: "(3v+1)/2 for v ≡ 3 (mod 6)",
        note: None,
    },
    Refinement {
        k: 3,
        lambda: 2,
        mode: Mode::Strong,
        modulus: 6,
        residue: 1,
        bound: |v| (3 * v).div_ceil(2),
        basis: "(3v+1)/2 for v ≡ 1 (mod 6)",
        note: None,
    },
    Refinement {
        k: 3,
        lambda: 2,
        mode: Mode::Strong,
        modulus: 6,
        residue: 4,
        bound: |v| 3 * v / 2 + 1,
        basis: "3v/2 + 1 for v ≡ 4 (mod 6)",
        note: None,
    },
    Refinement {
        k: 3,
        lambda: 2,
        mode: Mode::Strong,
        modulus: 12,
        residue: 6,
        bound: |v| 3 * v / 2,
        basis: "r + (v+1)/2 rounded up",
        note: Some("known constructions give 3v/2 + 2 for v ≡ 6 (mod 12); whether 3v/2 is attainable is open"),
    },
];

fn refinement(params: DesignParams, mode: Mode) -> Option<&'static Refinement> {
    REFINEMENTS.iter().find(|r| {
        r.k == params.k
            && r.lambda == params.lambda
            && r.mode == mode
            && params.v % r.modulus == r.residue
    })
}

fn general_weak(params: DesignParams, r: usize) -> Bound {
    let DesignParams { v, k, lambda } = params;
    if minimal_nesting_feasible(k, lambda) {
        return Bound {
            value: v,
            basis: "k ≥ 2λ+1: no bound beyond w ≥ v".into(),
            note: None,
        };
    }
    // r/(λ+1) + (v + 2λv + 1)/(2(λ+1)) over a common denominator
    let value = ceil_div(2 * r + v + 2 * lambda * v + 1, 2 * (lambda + 1)).max(v);
    let basis = match (k, lambda) {
        (2, 1) => "⌈(5v−1)/4⌉".to_string(),
        (3, 2) => "⌈(7v−1)/6⌉".to_string(),
        _ => "⌈r/(λ+1) + (v+2λv+1)/(2(λ+1))⌉".to_string(),
    };
    Bound {
        value,
        basis,
        note: None,
    }
}

/// Lower bound on `w` for a weak nesting of a `(v,k,λ)`-BIBD.
pub fn weak_lower_bound(v: usize, k: usize, lambda: usize) -> Result<usize> {
    Ok(weak_bound(DesignParams::new(v, k, lambda))?.value)
}

pub fn weak_bound(params: DesignParams) -> Result<Bound> {
    params.require_admissible()?;
    let r = params.replication().expect("admissible");
    Ok(general_weak(params, r))
}

/// Lower bound on `w` for a strong nesting of a `(v,k,λ)`-BIBD.
pub fn strong_lower_bound(v: usize, k: usize, lambda: usize) -> Result<usize> {
    Ok(strong_bound(DesignParams::new(v, k, lambda))?.value)
}

pub fn strong_bound(params: DesignParams) -> Result<Bound> {
    params.require_admissible()?;
    let r = params.replication().expect("admissible");
    let v = params.v;
    if (params.v, params.k, params.lambda) == (6, 3, 2) {
        if let Some(value) = certified_632() {
            return Ok(Bound {
                value,
                basis: "exhaustive search over the unique (6,3,2)-BIBD".into(),
                note: None,
            });
        }
    }
    // r + (v+1)/2, and never below the weak bound
    let mut bound = Bound {
        value: ceil_div(2 * r + v + 1, 2).max(general_weak(params, r).value),
        basis: "⌈r + (v+1)/2⌉".into(),
        note: None,
    };
    if let Some(refined) = refinement(params, Mode::Strong) {
        let value = (refined.bound)(v);
        if value >= bound.value {
            bound = Bound {
                value,
                basis: refined.basis.into(),
                note: refined.note.map(str::to_string),
            };
        }
    }
    Ok(bound)
}

/// Lower bound in any mode; a minimal nesting has `w = v` by definition.
pub fn lower_bound(params: DesignParams, mode: Mode) -> Result<Bound> {
    match mode {
        Mode::Weak => weak_bound(params),
        Mode::Strong => strong_bound(params),
        Mode::Minimal => {
            params.require_admissible()?;
            Ok(Bound {
                value: params.v,
                basis: "w = v".into(),
                note: (!minimal_nesting_feasible(params.k, params.lambda))
                    .then(|| "k ≤ 2λ: no minimal nesting exists".to_string()),
            })
        }
    }
}

static CERTIFIED_632: OnceLock<Option<usize>> = OnceLock::new();

/// Strong bound for `(6,3,2)` from the exhaustive search certificate, computed once.
fn certified_632() -> Option<usize> {
    *CERTIFIED_632.get_or_init(|| crate::search::certify_632_strong_bound().ok())
}

/// Attach the mode's lower bound to a certificate and record whether `w` meets it.
pub fn check_optimal(mut cert: Certificate, mode: Mode) -> Certificate {
    let Some(w) = cert.w else {
        return cert;
    };
    if let Ok(bound) = lower_bound(cert.params, mode) {
        cert.bound = Some(BoundReport {
            mode,
            value: bound.value,
            basis: bound.basis,
            met: w == bound.value,
            note: bound.note,
        });
    }
    cert
}
