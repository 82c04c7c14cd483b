//! Exact arithmetic over F = Q(s, w), the fraction field of integer
//! Laurent polynomials in s = q^(1/2) and w = t^(1/2).
//!
//! Working with the half-power variables keeps every quantity that shows
//! up downstream integral: q = s^2, t = w^2, qq = 1/(sw), dd = s/w.
//! A [`Scalar`] is a reduced fraction of two Laurent polynomials; the
//! canonical form is pinned down so that equal scalars are structurally
//! equal (shared factors removed, joint integer content 1, and the
//! denominator's leading term has positive sign).
//!
//! [`UniRat`] is a thin univariate rational-function layer over `Scalar`
//! used by the sequential-substitution machinery in the shuffle module.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Errors from the exact-arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalarError {
    /// Division by the zero scalar, or a zero denominator on input.
    DivisionByZero,
    /// A specialization point annihilates the denominator.
    DegenerateSpecialization,
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::DivisionByZero => write!(f, "division by zero"),
            ScalarError::DegenerateSpecialization => {
                write!(f, "degenerate specialization; choose another point")
            }
        }
    }
}

impl std::error::Error for ScalarError {}

// ---------------------------------------------------------------------------
// Laurent polynomials in (s, w)
// ---------------------------------------------------------------------------

/// Sparse integer Laurent polynomial in s and w.
///
/// Keys are exponent pairs (a, b) for s^a w^b; stored values are nonzero.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LPoly {
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl LPoly {
    pub fn zero() -> Self {
        LPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        LPoly::monomial(0, 0, BigInt::one())
    }

    pub fn monomial(a: i64, b: i64, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        LPoly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        LPoly::monomial(0, 0, BigInt::from(n))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&(0, 0))
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &BigInt)> {
        self.terms.iter()
    }

    fn insert_add(&mut self, key: (i64, i64), c: BigInt) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &LPoly) -> LPoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert_add(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LPoly) -> LPoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert_add(*k, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> LPoly {
        LPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &LPoly) -> LPoly {
        let mut out = LPoly::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                out.insert_add((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, a: i64, b: i64, c: &BigInt) -> LPoly {
        if c.is_zero() {
            return LPoly::zero();
        }
        LPoly {
            terms: self
                .terms
                .iter()
                .map(|((x, y), co)| ((x + a, y + b), co * c))
                .collect(),
        }
    }

    /// Leading term in the canonical order: s first, then w, highest
    /// exponent first.
    pub fn leading(&self) -> Option<(&(i64, i64), &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Gcd of all integer coefficients (positive), 0 for the zero poly.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide every coefficient by d (must be exact).
    pub fn div_content_pub(&self, d: &BigInt) -> LPoly {
        self.div_content(d)
    }

    /// Divide every coefficient by d (must be exact).
    fn div_content(&self, d: &BigInt) -> LPoly {
        LPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, c / d)).collect(),
        }
    }

    /// Minimal exponents over all terms, used to strip monomial content.
    fn min_exponents(&self) -> (i64, i64) {
        let mut amin = i64::MAX;
        let mut bmin = i64::MAX;
        for (a, b) in self.terms.keys() {
            amin = amin.min(*a);
            bmin = bmin.min(*b);
        }
        (amin, bmin)
    }

    /// Exact evaluation at rational s0, w0 (both nonzero for Laurent terms).
    pub fn eval(&self, s0: &BigRational, w0: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for ((a, b), c) in &self.terms {
            let term = rat_pow(s0, *a) * rat_pow(w0, *b) * BigRational::from(c.clone());
            acc += term;
        }
        acc
    }

    /// Render with terms sorted by the canonical order (s then w, highest
    /// exponent first), each as `c*s^a*w^b`.
    pub fn to_display_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, ((a, b), c)) in self.terms.iter().rev().enumerate() {
            if idx == 0 {
                out.push_str(&format!("{}*s^{}*w^{}", c, a, b));
            } else if c.is_negative() {
                out.push_str(&format!(" - {}*s^{}*w^{}", c.magnitude(), a, b));
            } else {
                out.push_str(&format!(" + {}*s^{}*w^{}", c, a, b));
            }
        }
        out
    }

    /// JSON form: array of [a, b, coefficient-as-decimal-string].
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .rev()
                .map(|((a, b), c)| serde_json::json!([a, b, c.to_string()]))
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Option<LPoly> {
        let arr = v.as_array()?;
        let mut p = LPoly::zero();
        for t in arr {
            let t = t.as_array()?;
            if t.len() != 3 {
                return None;
            }
            let a = t[0].as_i64()?;
            let b = t[1].as_i64()?;
            let c: BigInt = t[2].as_str()?.parse().ok()?;
            p.insert_add((a, b), c);
        }
        Some(p)
    }
}

impl fmt::Debug for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_display_string())
    }
}

fn rat_pow(x: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let p = x.pow(e.unsigned_abs().min(i32::MAX as u64) as i32);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

// ---------------------------------------------------------------------------
// Bivariate polynomial gcd (primitive PRS on a recursive representation)
// ---------------------------------------------------------------------------

/// Dense polynomial in w over BigInt, ascending degree.
type WPoly = Vec<BigInt>;

fn wp_trim(p: &mut WPoly) {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn wp_is_zero(p: &WPoly) -> bool {
    p.is_empty()
}

fn wp_mul(a: &WPoly, b: &WPoly) -> WPoly {
    if wp_is_zero(a) || wp_is_zero(b) {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    wp_trim(&mut out);
    out
}

fn wp_content(p: &WPoly) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn wp_div_exact_int(p: &WPoly, d: &BigInt) -> WPoly {
    p.iter().map(|c| c / d).collect()
}

/// Remainder sequence step: an associate of prem(f, g), with the integer
/// content stripped after every reduction to keep coefficients small.
/// Only valid inside gcd computations, where associates suffice.
fn wp_prem(f: &WPoly, g: &WPoly) -> WPoly {
    let mut r = f.clone();
    let dg = g.len() - 1;
    let lg = g.last().unwrap().clone();
    while !wp_is_zero(&r) && r.len() - 1 >= dg {
        let dr = r.len() - 1;
        let lr = r.last().unwrap().clone();
        let mut nr = vec![BigInt::zero(); dr + 1];
        for (i, c) in r.iter().enumerate() {
            nr[i] = c * &lg;
        }
        for (j, c) in g.iter().enumerate() {
            nr[dr - dg + j] -= c * &lr;
        }
        wp_trim(&mut nr);
        debug_assert!(nr.len() <= dr);
        let content = wp_content(&nr);
        r = if content.is_zero() || content.is_one() {
            nr
        } else {
            wp_div_exact_int(&nr, &content)
        };
    }
    r
}

fn wp_gcd(a: &WPoly, b: &WPoly) -> WPoly {
    if wp_is_zero(a) {
        let mut out = b.clone();
        if out.last().map(|c| c.is_negative()).unwrap_or(false) {
            for c in out.iter_mut() {
                *c = -c.clone();
            }
        }
        return out;
    }
    if wp_is_zero(b) {
        return wp_gcd(b, a);
    }
    let ca = wp_content(a);
    let cb = wp_content(b);
    let cg = ca.gcd(&cb);
    let mut f = wp_div_exact_int(a, &ca);
    let mut g = wp_div_exact_int(b, &cb);
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        if wp_is_zero(&g) {
            let cf = wp_content(&f);
            let mut out = wp_div_exact_int(&f, &cf);
            if out.last().map(|c| c.is_negative()).unwrap_or(false) {
                for c in out.iter_mut() {
                    *c = -c.clone();
                }
            }
            return wp_mul(&out, &vec![cg]);
        }
        let r = wp_prem(&f, &g);
        f = g;
        let cr = wp_content(&r);
        g = if cr.is_zero() {
            Vec::new()
        } else {
            wp_div_exact_int(&r, &cr)
        };
    }
}

/// Exact division in Z[w]; panics if not exact.
fn wp_div_exact(f: &WPoly, g: &WPoly) -> WPoly {
    if wp_is_zero(f) {
        return Vec::new();
    }
    let mut r = f.clone();
    let dg = g.len() - 1;
    let lg = g.last().unwrap();
    let mut q = vec![BigInt::zero(); f.len() - dg];
    while !wp_is_zero(&r) && r.len() - 1 >= dg {
        let dr = r.len() - 1;
        let lr = r.last().unwrap();
        let (qc, rem) = lr.div_rem(lg);
        assert!(rem.is_zero(), "non-exact division in Z[w]");
        q[dr - dg] = qc.clone();
        for (j, c) in g.iter().enumerate() {
            let sub = c * &qc;
            r[dr - dg + j] -= sub;
        }
        wp_trim(&mut r);
    }
    assert!(wp_is_zero(&r), "non-exact division in Z[w] (remainder)");
    q
}

/// Polynomial in s with WPoly coefficients, ascending degree.
type SWPoly = Vec<WPoly>;

fn sw_trim(p: &mut SWPoly) {
    while p.last().map(wp_is_zero).unwrap_or(false) {
        p.pop();
    }
}

fn sw_is_zero(p: &SWPoly) -> bool {
    p.is_empty()
}

fn sw_from_lpoly(p: &LPoly) -> SWPoly {
    let mut ds = 0usize;
    let mut dw = 0usize;
    for (a, b) in p.terms.keys() {
        assert!(*a >= 0 && *b >= 0, "needs nonnegative exponents");
        ds = ds.max(*a as usize);
        dw = dw.max(*b as usize);
    }
    let mut out = vec![vec![BigInt::zero(); dw + 1]; ds + 1];
    for ((a, b), c) in &p.terms {
        out[*a as usize][*b as usize] = c.clone();
    }
    for wc in out.iter_mut() {
        wp_trim(wc);
    }
    let mut out: SWPoly = out;
    sw_trim(&mut out);
    out
}

fn sw_to_lpoly(p: &SWPoly) -> LPoly {
    let mut out = LPoly::zero();
    for (a, wc) in p.iter().enumerate() {
        for (b, c) in wc.iter().enumerate() {
            if !c.is_zero() {
                out.insert_add((a as i64, b as i64), c.clone());
            }
        }
    }
    out
}

fn sw_mul_wpoly(p: &SWPoly, m: &WPoly) -> SWPoly {
    let mut out: SWPoly = p.iter().map(|c| wp_mul(c, m)).collect();
    sw_trim(&mut out);
    out
}

/// Content of p as a polynomial in s: the WPoly gcd of its coefficients.
fn sw_content(p: &SWPoly) -> WPoly {
    let mut g: WPoly = Vec::new();
    for c in p {
        if wp_is_zero(c) {
            continue;
        }
        g = wp_gcd(&g, c);
        if g.len() == 1 && g[0].is_one() {
            break;
        }
    }
    g
}

fn sw_div_exact_wpoly(p: &SWPoly, d: &WPoly) -> SWPoly {
    p.iter()
        .map(|c| {
            if wp_is_zero(c) {
                Vec::new()
            } else {
                wp_div_exact(c, d)
            }
        })
        .collect()
}

fn wp_sub_assign(a: &mut WPoly, b: &WPoly) {
    for (i, x) in b.iter().enumerate() {
        if i < a.len() {
            a[i] -= x;
        } else {
            a.push(-x.clone());
        }
    }
    wp_trim(a);
}

/// Remainder sequence step in (Z[w])[s]: an associate of prem(f, g) with
/// the WPoly content stripped after every reduction. Only valid inside
/// gcd computations.
fn sw_prem(f: &SWPoly, g: &SWPoly) -> SWPoly {
    let mut r = f.clone();
    let dg = g.len() - 1;
    let lg = g.last().unwrap().clone();
    while !sw_is_zero(&r) && r.len() - 1 >= dg {
        let dr = r.len() - 1;
        let lr = r.last().unwrap().clone();
        let mut nr: SWPoly = r.iter().map(|c| wp_mul(c, &lg)).collect();
        for (j, c) in g.iter().enumerate() {
            let sub = wp_mul(c, &lr);
            wp_sub_assign(&mut nr[dr - dg + j], &sub);
        }
        sw_trim(&mut nr);
        debug_assert!(nr.len() <= dr);
        if sw_is_zero(&nr) {
            return nr;
        }
        let content = sw_content(&nr);
        r = if content.len() == 1 && content[0].is_one() {
            nr
        } else {
            sw_div_exact_wpoly(&nr, &content)
        };
    }
    r
}

/// Gcd in Z[s, w] by evaluation and interpolation (Brown's method): the
/// w variable is evaluated at small integers, univariate gcds are taken
/// in Z[s], and the w-dependence is recovered by Newton interpolation of
/// the gcds normalized to the leading coefficient gcd. A candidate is
/// accepted only after exact trial division of both inputs, so unlucky
/// evaluation points cost retries, never correctness.
fn sw_gcd(a: &SWPoly, b: &SWPoly) -> SWPoly {
    if sw_is_zero(a) {
        return b.clone();
    }
    if sw_is_zero(b) {
        return a.clone();
    }
    let ca = sw_content(a);
    let cb = sw_content(b);
    let cg = wp_gcd(&ca, &cb);
    let fa = sw_div_exact_wpoly(a, &ca);
    let fb = sw_div_exact_wpoly(b, &cb);
    if fa.len() == 1 || fb.len() == 1 {
        // one input is constant in s and primitive: the gcd is cg
        return vec![cg];
    }
    let gamma = wp_gcd(fa.last().unwrap(), fb.last().unwrap());
    let dw_bound = {
        let dw = |p: &SWPoly| p.iter().map(|c| c.len()).max().unwrap_or(1) - 1;
        dw(&fa).min(dw(&fb)) + gamma.len()
    };

    let mut samples: Vec<(BigInt, Vec<BigRational>)> = Vec::new();
    let mut min_deg = usize::MAX;
    let mut last_candidate: Option<Vec<Vec<BigRational>>> = None;
    let mut point = 0i64;
    let mut tries = 0usize;
    loop {
        tries += 1;
        if std::env::var_os("WMAC_GCD_TRACE").is_some() && tries % 8 == 0 {
            eprintln!(
                "sw_gcd: tries {} samples {} min_deg {} dw_bound {} fa {}x{} fb {}x{}",
                tries,
                samples.len(),
                if min_deg == usize::MAX { 9999 } else { min_deg },
                dw_bound,
                fa.len(),
                fa.iter().map(|c| c.len()).max().unwrap_or(0),
                fb.len(),
                fb.iter().map(|c| c.len()).max().unwrap_or(0),
            );
        }
        assert!(
            tries < 200 + 4 * dw_bound,
            "bivariate gcd interpolation failed to stabilize"
        );
        point = if point > 0 { -point } else { -point + 1 };
        let w0 = BigInt::from(point);
        let eval = |p: &SWPoly| -> WPoly {
            let mut out: WPoly = p
                .iter()
                .map(|wc| {
                    let mut acc = BigInt::zero();
                    for c in wc.iter().rev() {
                        acc = acc * &w0 + c;
                    }
                    acc
                })
                .collect();
            wp_trim(&mut out);
            out
        };
        let ea = eval(&fa);
        let eb = eval(&fb);
        // the point must preserve both leading coefficients
        if ea.len() != fa.len() || eb.len() != fb.len() {
            continue;
        }
        let g0 = wp_gcd(&ea, &eb);
        let d = g0.len() - 1;
        if d == 0 {
            return vec![cg];
        }
        if d > min_deg {
            continue; // unlucky point
        }
        if d < min_deg {
            min_deg = d;
            samples.clear();
            last_candidate = None;
        }
        // normalize to leading coefficient gamma(w0)
        let gamma_at = {
            let mut acc = BigInt::zero();
            for c in gamma.iter().rev() {
                acc = acc * &w0 + c;
            }
            acc
        };
        let lead = g0.last().unwrap().clone();
        let scale = BigRational::new(gamma_at, lead);
        let normalized: Vec<BigRational> = g0
            .iter()
            .map(|c| BigRational::from(c.clone()) * &scale)
            .collect();
        samples.push((BigInt::from(point), normalized));

        // interpolate each s-coefficient of the candidate in w
        let candidate = interpolate_columns(&samples, min_deg);
        let stabilized = last_candidate.as_ref() == Some(&candidate);
        last_candidate = Some(candidate.clone());
        if !stabilized && samples.len() <= dw_bound {
            continue;
        }
        // clear denominators and take the primitive part
        if let Some(prim) = rational_candidate_to_primitive(&candidate) {
            if sw_divides(&prim, &fa) && sw_divides(&prim, &fb) {
                return sw_mul_wpoly(&prim, &cg);
            }
        }
    }
}

/// Lagrange/Newton interpolation of each s-coefficient column through the
/// sample points; returns per-s-degree rational polynomials in w.
fn interpolate_columns(
    samples: &[(BigInt, Vec<BigRational>)],
    deg_s: usize,
) -> Vec<Vec<BigRational>> {
    let k = samples.len();
    let mut out = Vec::with_capacity(deg_s + 1);
    for j in 0..=deg_s {
        // Newton divided differences over the w-points
        let xs: Vec<BigRational> = samples
            .iter()
            .map(|(x, _)| BigRational::from(x.clone()))
            .collect();
        let mut diffs: Vec<BigRational> = samples
            .iter()
            .map(|(_, col)| col.get(j).cloned().unwrap_or_else(BigRational::zero))
            .collect();
        let mut coeffs = vec![diffs[0].clone()];
        for level in 1..k {
            for i in 0..k - level {
                let num = &diffs[i + 1] - &diffs[i];
                let den = &xs[i + level] - &xs[i];
                diffs[i] = num / den;
            }
            coeffs.push(diffs[0].clone());
        }
        // expand the Newton form into monomial coefficients
        let mut poly = vec![BigRational::zero(); k];
        let mut basis = vec![BigRational::zero(); k];
        basis[0] = BigRational::one();
        for (level, c) in coeffs.iter().enumerate() {
            for (i, b) in basis.iter().enumerate() {
                poly[i] += c * b;
            }
            if level + 1 < k {
                // basis *= (x - xs[level])
                let mut next = vec![BigRational::zero(); k];
                for i in 0..k - 1 {
                    if !basis[i].is_zero() {
                        next[i + 1] += &basis[i];
                        next[i] -= &basis[i] * &xs[level];
                    }
                }
                basis = next;
            }
        }
        while poly.last().map(|c| c.is_zero()).unwrap_or(false) {
            poly.pop();
        }
        out.push(poly);
    }
    out
}

/// Clear denominators across the whole candidate and return its
/// primitive part over Z; None when the candidate is zero.
fn rational_candidate_to_primitive(candidate: &[Vec<BigRational>]) -> Option<SWPoly> {
    let mut denom_lcm = BigInt::one();
    for col in candidate {
        for c in col {
            let d = c.denom();
            let g = denom_lcm.gcd(d);
            denom_lcm = &denom_lcm / &g * d;
        }
    }
    let mut p: SWPoly = candidate
        .iter()
        .map(|col| {
            let mut wc: WPoly = col
                .iter()
                .map(|c| {
                    let scaled = c * BigRational::from(denom_lcm.clone());
                    debug_assert!(scaled.is_integer());
                    scaled.to_integer()
                })
                .collect();
            wp_trim(&mut wc);
            wc
        })
        .collect();
    sw_trim(&mut p);
    if sw_is_zero(&p) {
        return None;
    }
    let content = sw_content(&p);
    let mut prim = sw_div_exact_wpoly(&p, &content);
    // sign normalization: positive leading coefficient
    if prim
        .last()
        .and_then(|wc| wc.last())
        .map(|c| c.is_negative())
        .unwrap_or(false)
    {
        for wc in prim.iter_mut() {
            for c in wc.iter_mut() {
                *c = -c.clone();
            }
        }
    }
    Some(prim)
}

/// Exact divisibility over Q(w)[s] for a primitive candidate, via the
/// content-stripped remainder sequence: the remainder vanishes exactly
/// when g divides f.
fn sw_divides(g: &SWPoly, f: &SWPoly) -> bool {
    if g.len() > f.len() {
        return false;
    }
    sw_is_zero(&sw_prem(f, g))
}

/// Exact division in (Z[w])[s]; panics if not exact.
fn sw_div_exact_sw(f: &SWPoly, g: &SWPoly) -> SWPoly {
    if sw_is_zero(f) {
        return Vec::new();
    }
    let mut r = f.clone();
    let dg = g.len() - 1;
    let lg = g.last().unwrap();
    let mut q: SWPoly = vec![Vec::new(); f.len() - dg];
    while !sw_is_zero(&r) && r.len() - 1 >= dg {
        let dr = r.len() - 1;
        let lr = r.last().unwrap();
        let qc = wp_div_exact(lr, lg);
        q[dr - dg] = qc.clone();
        for (j, c) in g.iter().enumerate() {
            let sub = wp_mul(c, &qc);
            wp_sub_assign(&mut r[dr - dg + j], &sub);
        }
        sw_trim(&mut r);
    }
    assert!(sw_is_zero(&r), "non-exact bivariate division");
    q
}

pub mod stats {
    use std::sync::atomic::{AtomicU64, Ordering};
    pub static GCD_CALLS: AtomicU64 = AtomicU64::new(0);
    pub static GCD_NANOS: AtomicU64 = AtomicU64::new(0);
    pub static GCD_TERMS: AtomicU64 = AtomicU64::new(0);
    pub fn snapshot() -> (u64, u64, u64) {
        (
            GCD_CALLS.load(Ordering::Relaxed),
            GCD_NANOS.load(Ordering::Relaxed),
            GCD_TERMS.load(Ordering::Relaxed),
        )
    }
}

/// Exact sparse division attempt: a / b when b divides a, else None.
/// Works on the monomial-shifted polynomial parts with lexicographic
/// leading-term elimination.
pub fn lpoly_try_div_exact(a: &LPoly, b: &LPoly) -> Option<LPoly> {
    if a.is_zero() {
        return Some(LPoly::zero());
    }
    if b.is_zero() {
        return None;
    }
    let (a0, a1) = a.min_exponents();
    let (b0, b1) = b.min_exponents();
    let mut rem = a.mul_monomial(-a0, -a1, &BigInt::one());
    let bn = b.mul_monomial(-b0, -b1, &BigInt::one());
    let ((bl0, bl1), blc) = bn.leading().map(|(k, c)| (*k, c.clone())).unwrap();
    let mut quot = LPoly::zero();
    while !rem.is_zero() {
        let ((rl0, rl1), rlc) = rem.leading().map(|(k, c)| (*k, c.clone())).unwrap();
        if rl0 < bl0 || rl1 < bl1 {
            return None;
        }
        let (qc, r) = rlc.div_rem(&blc);
        if !r.is_zero() {
            return None;
        }
        let qmono = (rl0 - bl0, rl1 - bl1);
        quot = quot.add(&LPoly::monomial(qmono.0, qmono.1, qc.clone()));
        rem = rem.sub(&bn.mul_monomial(qmono.0, qmono.1, &qc));
    }
    Some(quot.mul_monomial(a0 - b0, a1 - b1, &BigInt::one()))
}

/// Gcd of two Laurent polynomials on their monomial-stripped parts.
fn lpoly_gcd(a: &LPoly, b: &LPoly) -> LPoly {
    use std::sync::atomic::Ordering;
    stats::GCD_CALLS.fetch_add(1, Ordering::Relaxed);
    stats::GCD_TERMS.fetch_add((a.num_terms() + b.num_terms()) as u64, Ordering::Relaxed);
    let t0 = std::time::Instant::now();
    // the same reductions recur constantly across evaluation sums, so
    // nontrivial gcds are memoized per worker thread
    thread_local! {
        static MEMO: std::cell::RefCell<std::collections::HashMap<(LPoly, LPoly), LPoly>> =
            std::cell::RefCell::new(std::collections::HashMap::new());
    }
    let small = a.num_terms() + b.num_terms() <= 512;
    let out = if small {
        let key = if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        if let Some(hit) = MEMO.with(|m| m.borrow().get(&key).cloned()) {
            hit
        } else {
            let g = lpoly_gcd_inner(a, b);
            MEMO.with(|m| m.borrow_mut().insert(key, g.clone()));
            g
        }
    } else {
        lpoly_gcd_inner(a, b)
    };
    let el = t0.elapsed();
    stats::GCD_NANOS.fetch_add(el.as_nanos() as u64, Ordering::Relaxed);
    out
}

fn lpoly_gcd_inner(a: &LPoly, b: &LPoly) -> LPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let (a0, a1) = a.min_exponents();
    let (b0, b1) = b.min_exponents();
    let an_sw = sw_from_lpoly(&a.mul_monomial(-a0, -a1, &BigInt::one()));
    let bn_sw = sw_from_lpoly(&b.mul_monomial(-b0, -b1, &BigInt::one()));
    let g = sw_gcd(&an_sw, &bn_sw);
    sw_to_lpoly(&g)
}

/// Exact division of Laurent polynomials (panics if not exact).
fn lpoly_div_exact(a: &LPoly, b: &LPoly) -> LPoly {
    assert!(!b.is_zero(), "division by zero polynomial");
    if a.is_zero() {
        return LPoly::zero();
    }
    if b.num_terms() == 1 {
        let ((ba, bb), bc) = b.leading().unwrap();
        let (ba, bb, bc) = (*ba, *bb, bc.clone());
        let mut out = LPoly::zero();
        for ((a1, b1), c1) in &a.terms {
            let (q, r) = c1.div_rem(&bc);
            assert!(r.is_zero(), "non-exact monomial division");
            out.insert_add((a1 - ba, b1 - bb), q);
        }
        return out;
    }
    let (a0, a1) = a.min_exponents();
    let (b0, b1) = b.min_exponents();
    let an = sw_from_lpoly(&a.mul_monomial(-a0, -a1, &BigInt::one()));
    let bn = sw_from_lpoly(&b.mul_monomial(-b0, -b1, &BigInt::one()));
    let q = sw_div_exact_sw(&an, &bn);
    sw_to_lpoly(&q).mul_monomial(a0 - b0, a1 - b1, &BigInt::one())
}

// ---------------------------------------------------------------------------
// Scalar: canonical fraction of Laurent polynomials
// ---------------------------------------------------------------------------

/// An element of F = Q(s, w) in canonical form. The derived ordering
/// and hash are structural; they are well-defined on values because the
/// canonical form is unique.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar {
    num: LPoly,
    den: LPoly,
}

impl Scalar {
    /// Build and canonicalize num/den. Panics on a zero denominator; use
    /// [`Scalar::try_new`] where the input is not trusted.
    pub fn new(num: LPoly, den: LPoly) -> Scalar {
        Scalar::try_new(num, den).expect("zero denominator")
    }

    pub fn try_new(num: LPoly, den: LPoly) -> Result<Scalar, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar { num, den }.canonicalize())
    }

    /// Reduce to canonical form: strip the polynomial gcd, move monomial
    /// content into the numerator, make the joint integer content 1, and
    /// give the denominator's leading term a positive coefficient.
    /// Idempotent.
    pub fn canonicalize(&self) -> Scalar {
        assert!(!self.den.is_zero(), "zero denominator");
        if self.num.is_zero() {
            return Scalar {
                num: LPoly::zero(),
                den: LPoly::one(),
            };
        }
        // polynomial over 1 is already canonical
        if self.den.is_one() {
            return self.clone();
        }
        // monomial denominators only shift exponents and integer content
        if self.den.num_terms() == 1 {
            let ((da, db), dc) = self.den.leading().unwrap();
            let (da, db, dc) = (*da, *db, dc.clone());
            let mut num = self.num.mul_monomial(-da, -db, &BigInt::one());
            let c = num.content().gcd(&dc);
            let mut dc = &dc / &c;
            if !c.is_one() {
                num = num.div_content(&c);
            }
            if dc.is_negative() {
                num = num.neg();
                dc = -dc;
            }
            return Scalar {
                num,
                den: LPoly::monomial(0, 0, dc),
            };
        }
        let g = lpoly_gcd(&self.num, &self.den);
        let mut num = lpoly_div_exact(&self.num, &g);
        let mut den = lpoly_div_exact(&self.den, &g);
        let (d0, d1) = den.min_exponents();
        den = den.mul_monomial(-d0, -d1, &BigInt::one());
        num = num.mul_monomial(-d0, -d1, &BigInt::one());
        let cn = num.content();
        let cd = den.content();
        let c = cn.gcd(&cd);
        if !c.is_one() && !c.is_zero() {
            num = num.div_content(&c);
            den = den.div_content(&c);
        }
        if den.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            num = num.neg();
            den = den.neg();
        }
        Scalar { num, den }
    }

    /// Finish a product of two already-reduced fractions: the numerator
    /// and denominator are coprime up to integer content, monomials, and
    /// sign, so no polynomial gcd is needed.
    fn normalized_sign_content(self) -> Scalar {
        if self.num.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() {
            return self;
        }
        let mut num = self.num;
        let mut den = self.den;
        let (d0, d1) = den.min_exponents();
        if (d0, d1) != (0, 0) {
            den = den.mul_monomial(-d0, -d1, &BigInt::one());
            num = num.mul_monomial(-d0, -d1, &BigInt::one());
        }
        let c = num.content().gcd(&den.content());
        if !c.is_one() && !c.is_zero() {
            num = num.div_content(&c);
            den = den.div_content(&c);
        }
        if den.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            num = num.neg();
            den = den.neg();
        }
        Scalar { num, den }
    }

    pub fn zero() -> Scalar {
        Scalar {
            num: LPoly::zero(),
            den: LPoly::one(),
        }
    }

    pub fn one() -> Scalar {
        Scalar {
            num: LPoly::one(),
            den: LPoly::one(),
        }
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar {
            num: LPoly::from_int(n),
            den: LPoly::one(),
        }
    }

    pub fn from_poly(p: LPoly) -> Scalar {
        Scalar {
            num: p,
            den: LPoly::one(),
        }
    }

    /// Monomial s^a w^b.
    pub fn sw(a: i64, b: i64) -> Scalar {
        Scalar {
            num: LPoly::monomial(a, b, BigInt::one()),
            den: LPoly::one(),
        }
    }

    /// q^k = s^(2k).
    pub fn q_pow(k: i64) -> Scalar {
        Scalar::sw(2 * k, 0)
    }

    /// t^k = w^(2k).
    pub fn t_pow(k: i64) -> Scalar {
        Scalar::sw(0, 2 * k)
    }

    /// qq^k where qq = q^(-1/2) t^(-1/2) = 1/(sw).
    pub fn qq_pow(k: i64) -> Scalar {
        Scalar::sw(-k, -k)
    }

    /// dd^k where dd = q^(1/2) t^(-1/2) = s/w.
    pub fn dd_pow(k: i64) -> Scalar {
        Scalar::sw(k, -k)
    }

    pub fn q() -> Scalar {
        Scalar::q_pow(1)
    }

    pub fn t() -> Scalar {
        Scalar::t_pow(1)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn numerator(&self) -> &LPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LPoly {
        &self.den
    }

    /// Combined term count, the sparsity measure used for pivoting.
    pub fn num_terms(&self) -> usize {
        self.num.num_terms() + self.den.num_terms()
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar {
            num: self.den.clone(),
            den: self.num.clone(),
        }
        .canonicalize())
    }

    pub fn pow(&self, e: i64) -> Scalar {
        if e == 0 {
            return Scalar::one();
        }
        let base = if e < 0 {
            self.inv().expect("zero to negative power")
        } else {
            self.clone()
        };
        let mut acc = Scalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Exact rational value at s = s0, w = w0.
    pub fn specialize(
        &self,
        s0: &BigRational,
        w0: &BigRational,
    ) -> Result<BigRational, ScalarError> {
        let d = self.den.eval(s0, w0);
        if d.is_zero() {
            return Err(ScalarError::DegenerateSpecialization);
        }
        Ok(self.num.eval(s0, w0) / d)
    }

    /// String form "num/den" with canonically sorted terms.
    pub fn to_display_string(&self) -> String {
        if self.den.is_one() {
            self.num.to_display_string()
        } else {
            format!(
                "({})/({})",
                self.num.to_display_string(),
                self.den.to_display_string()
            )
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "num": self.num.to_json(),
            "den": self.den.to_json(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Option<Scalar> {
        let num = LPoly::from_json(v.get("num")?)?;
        let den = LPoly::from_json(v.get("den")?)?;
        Scalar::try_new(num, den).ok()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_display_string())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_display_string())
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar {
                num: self.num.add(&rhs.num),
                den: LPoly::one(),
            };
        }
        Scalar {
            num: self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            den: self.den.mul(&rhs.den),
        }
        .canonicalize()
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar {
                num: self.num.sub(&rhs.num),
                den: LPoly::one(),
            };
        }
        Scalar {
            num: self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den)),
            den: self.den.mul(&rhs.den),
        }
        .canonicalize()
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.num.is_zero() || rhs.num.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar {
                num: self.num.mul(&rhs.num),
                den: LPoly::one(),
            };
        }
        // reduce across the diagonal first so the final gcd is trivial
        let a = Scalar {
            num: self.num.clone(),
            den: rhs.den.clone(),
        }
        .canonicalize();
        let b = Scalar {
            num: rhs.num.clone(),
            den: self.den.clone(),
        }
        .canonicalize();
        Scalar {
            num: a.num.mul(&b.num),
            den: a.den.mul(&b.den),
        }
        .normalized_sign_content()
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "scalar division by zero");
        if self.num.is_zero() {
            return Scalar::zero();
        }
        let a = Scalar {
            num: self.num.clone(),
            den: rhs.num.clone(),
        }
        .canonicalize();
        let b = Scalar {
            num: rhs.den.clone(),
            den: self.den.clone(),
        }
        .canonicalize();
        Scalar {
            num: a.num.mul(&b.num),
            den: a.den.mul(&b.den),
        }
        .normalized_sign_content()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// UniRat: univariate rational functions over Scalar
// ---------------------------------------------------------------------------

/// Dense univariate polynomial over Scalar, ascending degree, trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    pub coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = UniPoly { coeffs: vec![c] };
        p.trim();
        p
    }

    pub fn from_coeffs(coeffs: Vec<Scalar>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    /// x - c as a polynomial.
    pub fn x_minus(c: &Scalar) -> Self {
        UniPoly::from_coeffs(vec![-c, Scalar::one()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero);
            let b = o.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero);
            out.push(&a + &b);
        }
        UniPoly::from_coeffs(out)
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UniPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &Scalar) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Euclidean division; returns (quotient, remainder).
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree();
        let lead = d.coeffs.last().unwrap().clone();
        let mut r = self.clone();
        let mut q = vec![Scalar::zero(); self.coeffs.len().saturating_sub(dd)];
        while !r.is_zero() && r.degree() >= dd {
            let shift = r.degree() - dd;
            let c = &r.coeffs[r.degree()] / &lead;
            q[shift] = c.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                let prod = dc * &c;
                r.coeffs[shift + j] = &r.coeffs[shift + j] - &prod;
            }
            r.trim();
        }
        (UniPoly::from_coeffs(q), r)
    }

    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.coeffs.last().unwrap().clone();
        a.scale(&lead.inv().expect("nonzero lead"))
    }
}

/// Univariate rational function over Scalar in one distinguished variable.
#[derive(Clone, Debug, PartialEq)]
pub struct UniRat {
    pub var: String,
    pub num: UniPoly,
    pub den: UniPoly,
}

impl UniRat {
    pub fn new(var: impl Into<String>, num: UniPoly, den: UniPoly) -> UniRat {
        assert!(!den.is_zero(), "zero denominator");
        UniRat {
            var: var.into(),
            num,
            den,
        }
        .reduced()
    }

    pub fn constant(var: impl Into<String>, c: Scalar) -> UniRat {
        UniRat {
            var: var.into(),
            num: UniPoly::constant(c),
            den: UniPoly::constant(Scalar::one()),
        }
    }

    pub fn reduced(&self) -> UniRat {
        if self.num.is_zero() {
            return UniRat {
                var: self.var.clone(),
                num: UniPoly::zero(),
                den: UniPoly::constant(Scalar::one()),
            };
        }
        let g = self.num.gcd(&self.den);
        let (num, rn) = self.num.div_rem(&g);
        let (den, rd) = self.den.div_rem(&g);
        debug_assert!(rn.is_zero() && rd.is_zero());
        let lead = den.coeffs.last().unwrap().clone();
        let li = lead.inv().expect("nonzero lead");
        UniRat {
            var: self.var.clone(),
            num: num.scale(&li),
            den: den.scale(&li),
        }
    }

    pub fn add(&self, o: &UniRat) -> UniRat {
        UniRat::new(
            self.var.clone(),
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn mul(&self, o: &UniRat) -> UniRat {
        UniRat::new(self.var.clone(), self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Remove every factor (x - c) from numerator and denominator and
    /// report the net vanishing order (numerator multiplicity minus
    /// denominator multiplicity) at x = c.
    pub fn divide_out_linear(&self, c: &Scalar) -> (UniRat, i64) {
        let lin = UniPoly::x_minus(c);
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        let mut order = 0i64;
        while !num.is_zero() {
            let (q, r) = num.div_rem(&lin);
            if r.is_zero() {
                num = q;
                order += 1;
            } else {
                break;
            }
        }
        while !den.is_zero() {
            let (q, r) = den.div_rem(&lin);
            if r.is_zero() {
                den = q;
                order -= 1;
            } else {
                break;
            }
        }
        (
            UniRat {
                var: self.var.clone(),
                num,
                den,
            },
            order,
        )
    }

    /// Evaluate at x = c; errors if the reduced denominator vanishes there.
    pub fn eval(&self, c: &Scalar) -> Result<Scalar, ScalarError> {
        let r = self.reduced();
        let d = r.den.eval(c);
        if d.is_zero() {
            return Err(ScalarError::DegenerateSpecialization);
        }
        Ok(&r.num.eval(c) / &d)
    }

    /// Limit as the variable goes to 0; None if it diverges.
    pub fn limit_at_zero(&self) -> Option<Scalar> {
        let r = self.reduced();
        if r.num.is_zero() {
            return Some(Scalar::zero());
        }
        let ord = |p: &UniPoly| p.coeffs.iter().take_while(|c| c.is_zero()).count();
        let on = ord(&r.num);
        let od = ord(&r.den);
        match on.cmp(&od) {
            Ordering::Less => None,
            Ordering::Greater => Some(Scalar::zero()),
            Ordering::Equal => Some(&r.num.coeffs[on] / &r.den.coeffs[od]),
        }
    }
}

// ---------------------------------------------------------------------------
// Deterministic RNG for randomized exact tests (seedable, dependency-free)
// ---------------------------------------------------------------------------

/// xorshift64* generator; deterministic across platforms.
#[derive(Clone, Debug)]
pub struct XorShift {
    state: u64,
}

impl XorShift {
    pub fn new(seed: u64) -> Self {
        XorShift {
            state: seed.max(1).wrapping_mul(0x9E3779B97F4A7C15) | 1,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform in 0..n.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }

    /// Random small scalar with bounded exponents and coefficients.
    pub fn scalar(&mut self, max_terms: usize) -> Scalar {
        let num = self.lpoly(max_terms);
        let mut den = self.lpoly(max_terms);
        if den.is_zero() {
            den = LPoly::one();
        }
        Scalar::new(num, den)
    }

    pub fn lpoly(&mut self, max_terms: usize) -> LPoly {
        let k = self.below(max_terms as u64 + 1);
        let mut p = LPoly::zero();
        for _ in 0..k {
            let a = self.below(7) as i64 - 3;
            let b = self.below(7) as i64 - 3;
            let c = self.below(9) as i64 - 4;
            p.insert_add((a, b), BigInt::from(c));
        }
        p
    }

    /// Random rational in a small range, bounded away from 0 and 1.
    pub fn rational(&mut self) -> BigRational {
        let n = self.below(40) as i64 + 2;
        let d = self.below(11) as i64 + 1;
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(a: i64, b: i64) -> Scalar {
        Scalar::sw(a, b)
    }

    #[test]
    fn monomial_products() {
        assert_eq!(&Scalar::q() * &Scalar::t(), sc(2, 2));
        assert_eq!(
            &Scalar::qq_pow(1) * &Scalar::qq_pow(1),
            (&Scalar::q() * &Scalar::t()).inv().unwrap()
        );
        assert_eq!(Scalar::dd_pow(2), &Scalar::q() / &Scalar::t());
    }

    #[test]
    fn self_division_is_one() {
        let one_minus_q = &Scalar::one() - &Scalar::q();
        assert!((&one_minus_q / &one_minus_q).is_one());
    }

    #[test]
    fn canonicalize_common_factor() {
        // (2s^2 - 2)/(2s - 2) -> s + 1
        let num = LPoly::monomial(2, 0, BigInt::from(2)).add(&LPoly::from_int(-2));
        let den = LPoly::monomial(1, 0, BigInt::from(2)).add(&LPoly::from_int(-2));
        let v = Scalar::new(num, den);
        let expected = &sc(1, 0) + &Scalar::one();
        assert_eq!(v, expected);
    }

    #[test]
    fn canonicalize_zero_and_sign() {
        let zero = Scalar::new(LPoly::zero(), LPoly::monomial(1, 1, BigInt::one()));
        assert_eq!(zero, Scalar::zero());
        assert!(zero.denominator().is_one());
        // (-s)/(-w) -> s/w
        let v = Scalar::new(
            LPoly::monomial(1, 0, BigInt::from(-1)),
            LPoly::monomial(0, 1, BigInt::from(-1)),
        );
        assert_eq!(v, &sc(1, 0) / &sc(0, 1));
        assert_eq!(v.canonicalize(), v);
    }

    #[test]
    fn specialize_examples() {
        let two = BigRational::from(BigInt::from(2));
        let three = BigRational::from(BigInt::from(3));
        assert_eq!(
            Scalar::q().specialize(&two, &three).unwrap(),
            BigRational::from(BigInt::from(4))
        );
        assert_eq!(
            Scalar::qq_pow(1).specialize(&two, &three).unwrap(),
            BigRational::new(BigInt::from(1), BigInt::from(6))
        );
        let v = &(&Scalar::one() - &Scalar::q()) / &(&Scalar::one() - &Scalar::t());
        assert_eq!(
            v.specialize(&BigRational::one(), &two).unwrap(),
            BigRational::zero()
        );
        assert!(v.specialize(&two, &BigRational::one()).is_err());
    }

    #[test]
    fn field_axioms_randomized() {
        let mut rng = XorShift::new(7);
        for _ in 0..40 {
            let a = rng.scalar(3);
            let b = rng.scalar(3);
            let c = rng.scalar(3);
            assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            assert_eq!(&(&a + &b) - &b, a);
            if !a.is_zero() {
                assert!((&a * &a.inv().unwrap()).is_one());
            }
        }
    }

    #[test]
    fn specialize_is_ring_hom() {
        let mut rng = XorShift::new(11);
        let s0 = BigRational::new(BigInt::from(5), BigInt::from(3));
        let w0 = BigRational::new(BigInt::from(7), BigInt::from(2));
        for _ in 0..25 {
            let a = rng.scalar(3);
            let b = rng.scalar(3);
            let (sa, sb) = match (a.specialize(&s0, &w0), b.specialize(&s0, &w0)) {
                (Ok(x), Ok(y)) => (x, y),
                _ => continue,
            };
            // The product's canonical denominator divides the input
            // denominators, so the point stays regular.
            let p = (&a * &b).specialize(&s0, &w0).unwrap();
            assert_eq!(p, sa * sb);
        }
    }

    #[test]
    fn equality_by_cross_multiplication() {
        let mut rng = XorShift::new(23);
        for _ in 0..30 {
            let a = rng.scalar(3);
            let b = rng.scalar(3);
            let eq_canonical = a == b;
            let cross = a
                .numerator()
                .mul(b.denominator())
                .sub(&b.numerator().mul(a.denominator()))
                .is_zero();
            assert_eq!(eq_canonical, cross);
        }
    }

    #[test]
    fn unirat_divide_out_linear() {
        let c = Scalar::q();
        let lin = UniPoly::x_minus(&c);
        let f = UniRat {
            var: "x".into(),
            num: lin.clone(),
            den: lin.clone(),
        };
        let (g, ord) = f.divide_out_linear(&c);
        assert_eq!(ord, 0);
        assert_eq!(g.num.degree(), 0);
        assert_eq!(g.den.degree(), 0);

        // (x-c)^2 (x+1) / (x-c): net order 1
        let xp1 = UniPoly::from_coeffs(vec![Scalar::one(), Scalar::one()]);
        let f2 = UniRat {
            var: "x".into(),
            num: lin.mul(&lin).mul(&xp1),
            den: lin.clone(),
        };
        let (g2, ord2) = f2.divide_out_linear(&c);
        assert_eq!(ord2, 1);
        assert!(!g2.num.eval(&c).is_zero());

        // 1/(x-c): simple pole
        let f3 = UniRat {
            var: "x".into(),
            num: UniPoly::constant(Scalar::one()),
            den: lin,
        };
        let (_, ord3) = f3.divide_out_linear(&c);
        assert_eq!(ord3, -1);
    }

    #[test]
    fn unirat_limit_at_zero() {
        let x = UniPoly::from_coeffs(vec![Scalar::zero(), Scalar::one()]);
        let x2 = x.mul(&x);
        let a = UniRat::new("x", x.clone(), x.clone());
        assert_eq!(a.limit_at_zero().unwrap(), Scalar::one());
        let b = UniRat::new("x", x2.clone(), x.clone());
        assert_eq!(b.limit_at_zero().unwrap(), Scalar::zero());
        let c = UniRat::new("x", x, x2);
        assert!(c.limit_at_zero().is_none());
    }

    #[test]
    fn bivariate_gcd_reduction() {
        // (1 - q^2)/(1 - q) -> 1 + q
        let one = Scalar::one();
        let q = Scalar::q();
        let num = &one - &q.pow(2);
        let den = &one - &q;
        let v = &num / &den;
        assert_eq!(v, &one + &q);
        // mixed-variable factor: (1 - qt)(1 - q) / (1 - qt) -> 1 - q
        let qt = &q * &Scalar::t();
        let f = &(&one - &qt) * &(&one - &q);
        assert_eq!(&f / &(&one - &qt), &one - &q);
    }
}
