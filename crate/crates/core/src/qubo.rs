//! Integer QUBO cost functions `f(x) = Σ Q_ii x_i + Σ_{i<j} Q_ij x_i x_j`.
//!
//! Variables are 0-based in the Rust API and 1-based (`x1 … xN`) in JSON and
//! in every human-readable message.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest `n` accepted by [`QuboInstance::brute_force_minima`] by default.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuboError {
    #[error("QUBO instance has no variables")]
    Empty,
    #[error("variable x{index} is out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("quadratic term (x{i}, x{j}) must satisfy i < j")]
    BadPair { i: usize, j: usize },
    #[error("coefficient for {0} given more than once")]
    Duplicate(String),
    #[error("assignment has {got} bits but the instance has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("integer overflow while {0}")]
    Overflow(&'static str),
    #[error("{n} variables exceeds the brute-force cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("malformed QUBO JSON: {0}")]
    Json(String),
}

/// A binary assignment `x ∈ {0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(Vec<u8>);

impl Assignment {
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(
            bits.iter().all(|&b| b <= 1),
            "assignment bits must be 0 or 1"
        );
        Assignment(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Assignment(vec![0; n])
    }

    /// Bit `k` of `mask` becomes variable `k`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Assignment((0..n).map(|k| ((mask >> k) & 1) as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, var: usize) -> u8 {
        self.0[var]
    }
}

impl From<&[u8]> for Assignment {
    fn from(bits: &[u8]) -> Self {
        Assignment::new(bits.to_vec())
    }
}

impl<const N: usize> From<[u8; N]> for Assignment {
    fn from(bits: [u8; N]) -> Self {
        Assignment::new(bits.to_vec())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, b) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// Minimum value and the full argmin set, in canonical (lexicographic) order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Minima {
    pub value: i64,
    pub argmin: BTreeSet<Assignment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "QuboFile", into = "QuboFile")]
pub struct QuboInstance {
    n: usize,
    linear: Vec<i64>,
    quadratic: BTreeMap<(usize, usize), i64>,
    scale: Option<i64>,
}

impl QuboInstance {
    /// Builds an instance from 0-based coefficients.
    ///
    /// Quadratic keys may be given in either order; `(i, i)` is rejected.
    /// Zero quadratic coefficients are dropped.
    pub fn new(
        n: usize,
        linear: impl IntoIterator<Item = (usize, i64)>,
        quadratic: impl IntoIterator<Item = ((usize, usize), i64)>,
    ) -> Result<Self, QuboError> {
        if n == 0 {
            return Err(QuboError::Empty);
        }
        let mut lin = vec![0i64; n];
        let mut seen = vec![false; n];
        for (i, w) in linear {
            if i >= n {
                return Err(QuboError::IndexOutOfRange { index: i + 1, n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(QuboError::Duplicate(format!("x{}", i + 1)));
            }
            lin[i] = w;
        }
        let mut quad = BTreeMap::new();
        for ((a, b), w) in quadratic {
            let (i, j) = (a.min(b), a.max(b));
            if j >= n {
                return Err(QuboError::IndexOutOfRange { index: j + 1, n });
            }
            if i == j {
                return Err(QuboError::BadPair { i: i + 1, j: j + 1 });
            }
            if quad.contains_key(&(i, j)) {
                return Err(QuboError::Duplicate(format!("x{}x{}", i + 1, j + 1)));
            }
            quad.insert((i, j), w);
        }
        quad.retain(|_, w| *w != 0);
        Ok(QuboInstance {
            n,
            linear: lin,
            quadratic: quad,
            scale: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `Q_ii` for 0-based `i`.
    pub fn linear(&self, i: usize) -> i64 {
        self.linear[i]
    }

    /// `Q_ij` for 0-based `i != j`, in either order.
    pub fn quadratic(&self, i: usize, j: usize) -> i64 {
        let key = (i.min(j), i.max(j));
        self.quadratic.get(&key).copied().unwrap_or(0)
    }

    /// Nonzero quadratic terms with `i < j`, in key order.
    pub fn quadratic_terms(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        self.quadratic.iter().map(|(&k, &w)| (k, w))
    }

    /// Factor applied by [`normalize_to_integers`], if any.
    pub fn scale(&self) -> Option<i64> {
        self.scale
    }

    /// Multiplies every coefficient by a positive integer.
    pub fn scaled(&self, factor: i64) -> Result<Self, QuboError> {
        assert!(factor > 0, "scale factor must be positive");
        let mul = |w: i64| w.checked_mul(factor).ok_or(QuboError::Overflow("scaling"));
        Ok(QuboInstance {
            n: self.n,
            linear: self
                .linear
                .iter()
                .map(|&w| mul(w))
                .collect::<Result<_, _>>()?,
            quadratic: self
                .quadratic
                .iter()
                .map(|(&k, &w)| Ok((k, mul(w)?)))
                .collect::<Result<_, QuboError>>()?,
            scale: self.scale,
        })
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<i64, QuboError> {
        if a.len() != self.n {
            return Err(QuboError::LengthMismatch {
                expected: self.n,
                got: a.len(),
            });
        }
        let x = a.bits();
        let mut total: i64 = 0;
        for (i, &w) in self.linear.iter().enumerate() {
            if x[i] == 1 {
                total = total
                    .checked_add(w)
                    .ok_or(QuboError::Overflow("evaluating"))?;
            }
        }
        for (&(i, j), &w) in &self.quadratic {
            if x[i] == 1 && x[j] == 1 {
                total = total
                    .checked_add(w)
                    .ok_or(QuboError::Overflow("evaluating"))?;
            }
        }
        Ok(total)
    }

    /// Exhaustive minimum over all `2^n` assignments (`n ≤ cap`).
    pub fn brute_force_minima(&self, cap: usize) -> Result<Minima, QuboError> {
        let cap = cap.min(63);
        if self.n > cap {
            return Err(QuboError::TooLarge { n: self.n, cap });
        }
        let terms: Vec<(u64, i128)> = self
            .quadratic
            .iter()
            .map(|(&(i, j), &w)| ((1u64 << i) | (1u64 << j), w as i128))
            .collect();
        let value_of = |mask: u64| -> i128 {
            let mut v = 0i128;
            for (k, &w) in self.linear.iter().enumerate() {
                if (mask >> k) & 1 == 1 {
                    v += w as i128;
                }
            }
            for &(pair, w) in &terms {
                if mask & pair == pair {
                    v += w;
                }
            }
            v
        };

        const CHUNK: u64 = 1 << 12;
        let total = 1u64 << self.n;
        let chunks = total.div_ceil(CHUNK);
        // Each chunk reports its own (min, masks); merged in chunk order.
        let partial: Vec<(i128, Vec<u64>)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut best = i128::MAX;
                let mut masks = Vec::new();
                for mask in c * CHUNK..((c + 1) * CHUNK).min(total) {
                    let v = value_of(mask);
                    if v < best {
                        best = v;
                        masks.clear();
                    }
                    if v == best {
                        masks.push(mask);
                    }
                }
                (best, masks)
            })
            .collect();
        let best = partial
            .iter()
            .map(|p| p.0)
            .min()
            .expect("at least one chunk");
        let argmin = partial
            .into_iter()
            .filter(|p| p.0 == best)
            .flat_map(|p| p.1)
            .map(|m| Assignment::from_mask(m, self.n))
            .collect();
        let value = i64::try_from(best).map_err(|_| QuboError::Overflow("enumerating"))?;
        Ok(Minima { value, argmin })
    }

    pub fn from_json(text: &str) -> Result<Self, QuboError> {
        serde_json::from_str(text).map_err(|e| QuboError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("QUBO serialization cannot fail")
    }
}

impl fmt::Display for QuboInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut term = |f: &mut fmt::Formatter<'_>, w: i64, name: String| -> fmt::Result {
            if w == 0 {
                return Ok(());
            }
            let mag = w.unsigned_abs();
            if first {
                if w < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if w < 0 { '-' } else { '+' })?;
            }
            first = false;
            if mag == 1 {
                write!(f, "{name}")
            } else {
                write!(f, "{mag}{name}")
            }
        };
        for (i, &w) in self.linear.iter().enumerate() {
            term(f, w, format!("x{}", i + 1))?;
        }
        for (&(i, j), &w) in &self.quadratic {
            term(f, w, format!("x{}x{}", i + 1, j + 1))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Scales rational coefficients by the LCM of their denominators.
///
/// Keys are 0-based. The returned instance records the factor in
/// [`QuboInstance::scale`]; its argmin set equals that of the rational input.
pub fn normalize_to_integers(
    n: usize,
    linear: &BTreeMap<usize, Ratio<i64>>,
    quadratic: &BTreeMap<(usize, usize), Ratio<i64>>,
) -> Result<QuboInstance, QuboError> {
    if n == 0 {
        return Err(QuboError::Empty);
    }
    let mut lcm: i64 = 1;
    for r in linear.values().chain(quadratic.values()) {
        let d = *r.denom();
        let g = lcm.gcd(&d);
        lcm = (lcm / g)
            .checked_mul(d)
            .ok_or(QuboError::Overflow("computing the LCM of denominators"))?;
    }
    let to_int = |r: &Ratio<i64>| -> Result<i64, QuboError> {
        r.numer()
            .checked_mul(lcm / r.denom())
            .ok_or(QuboError::Overflow("scaling rational coefficients"))
    };
    let lin = linear
        .iter()
        .map(|(&i, r)| Ok((i, to_int(r)?)))
        .collect::<Result<Vec<_>, QuboError>>()?;
    let quad = quadratic
        .iter()
        .map(|(&k, r)| Ok((k, to_int(r)?)))
        .collect::<Result<Vec<_>, QuboError>>()?;
    let mut q = QuboInstance::new(n, lin, quad)?;
    q.scale = Some(lcm);
    Ok(q)
}

#[derive(Serialize, Deserialize)]
struct QuadTerm {
    i: usize,
    j: usize,
    w: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuboFile {
    n: usize,
    #[serde(default)]
    linear: BTreeMap<String, i64>,
    #[serde(default)]
    quadratic: Vec<QuadTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<i64>,
}

impl TryFrom<QuboFile> for QuboInstance {
    type Error = QuboError;

    fn try_from(file: QuboFile) -> Result<Self, QuboError> {
        let n = file.n;
        let index = |k: usize| -> Result<usize, QuboError> {
            if k == 0 || k > n {
                Err(QuboError::IndexOutOfRange { index: k, n })
            } else {
                Ok(k - 1)
            }
        };
        let mut linear = Vec::with_capacity(file.linear.len());
        for (key, w) in &file.linear {
            let k: usize = key
                .trim()
                .parse()
                .map_err(|_| QuboError::Json(format!("linear key {key:?} is not an index")))?;
            linear.push((index(k)?, *w));
        }
        let mut quadratic = Vec::with_capacity(file.quadratic.len());
        for t in &file.quadratic {
            if t.i >= t.j {
                return Err(QuboError::BadPair { i: t.i, j: t.j });
            }
            quadratic.push(((index(t.i)?, index(t.j)?), t.w));
        }
        let mut q = QuboInstance::new(n, linear, quadratic)?;
        if let Some(s) = file.scale {
            if s <= 0 {
                return Err(QuboError::Json(format!("scale must be positive, got {s}")));
            }
            q.scale = Some(s);
        }
        Ok(q)
    }
}

impl From<QuboInstance> for QuboFile {
    fn from(q: QuboInstance) -> Self {
        QuboFile {
            n: q.n,
            linear: q
                .linear
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0)
                .map(|(i, &w)| ((i + 1).to_string(), w))
                .collect(),
            quadratic: q
                .quadratic
                .iter()
                .map(|(&(i, j), &w)| QuadTerm {
                    i: i + 1,
                    j: j + 1,
                    w,
                })
                .collect(),
            scale: q.scale,
        }
    }
}
