//! The colored symmetric-function ring: ell tensor factors of the
//! classical ring, one per color, with an optional root-lattice label
//! recording the core sector.
//!
//! The internal computational basis is p (products of colored power sums);
//! every conversion and all four plethystic maps route through it.
//! Per-color conversions use the classical generating-function recursions
//! and the Jacobi-Trudi determinant; p -> s uses character orthogonality
//! applied to the computed s -> p table.
//!
//! Convention: an e-basis key lambda denotes the product of e_k over the
//! parts k of the *transpose* of lambda, matching the classical basis
//! e_lambda = e_{tlambda_1} e_{tlambda_2} ... . The h- and p-basis keys
//! use the parts directly.

use crate::partitions::{multipartitions_of, partitions_of, MultiPartition, Partition};
use crate::scalars::Scalar;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Default cap on total degree for conversions, guarding against
/// accidental blowup.
pub const DEFAULT_DEGREE_CAP: u64 = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymFuncError {
    MixedEll,
    DegreeCapExceeded { degree: u64, cap: u64 },
    NotHomogeneous,
}

impl fmt::Display for SymFuncError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymFuncError::MixedEll => write!(f, "mismatched number of colors"),
            SymFuncError::DegreeCapExceeded { degree, cap } => {
                write!(f, "degree {} exceeds configured cap {}", degree, cap)
            }
            SymFuncError::NotHomogeneous => write!(f, "non-homogeneous input"),
        }
    }
}

impl std::error::Error for SymFuncError {}

/// Basis tag for a [`SymFunc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Products of colored power sums p_r(i).
    P,
    /// Products of colored complete symmetric functions h_r(i).
    H,
    /// Colored elementary basis; the key records lambda with the product
    /// taken over the transpose parts.
    E,
    /// Colored multi-Schur basis.
    S,
    /// Twisted complete basis: key mu denotes PhiQ^{-1}(h_mu).
    HHat,
    /// Twisted elementary basis: key mu denotes PhiTinv^{-1}(e_mu).
    EHat,
}

impl Basis {
    pub fn name(&self) -> &'static str {
        match self {
            Basis::P => "p",
            Basis::H => "h",
            Basis::E => "e",
            Basis::S => "s",
            Basis::HHat => "hhat",
            Basis::EHat => "ehat",
        }
    }

    pub fn parse(s: &str) -> Option<Basis> {
        Some(match s {
            "p" => Basis::P,
            "h" => Basis::H,
            "e" => Basis::E,
            "s" => Basis::S,
            "hhat" => Basis::HHat,
            "ehat" => Basis::EHat,
            _ => return None,
        })
    }
}

/// One of the four plethystic maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlethMap {
    /// p_n(i) -> p_n(i) - q^n p_n(i-1)
    PhiQ,
    /// inverse of PhiQ
    PhiQInv,
    /// p_n(i) -> p_n(i) - t^(-n) p_n(i-1)
    PhiTinv,
    /// inverse of PhiTinv
    PhiTinvInv,
}

/// Element of the colored ring, finitely supported over multipartitions.
#[derive(Clone, PartialEq)]
pub struct SymFunc {
    pub ell: u64,
    pub basis: Basis,
    pub terms: BTreeMap<MultiPartition, Scalar>,
    /// Charge vector tagging the group-algebra factor e^{core}; inert.
    pub core_label: Option<Vec<i64>>,
}

impl fmt::Debug for SymFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymFunc[{}]{{", self.basis.name())?;
        for (k, v) in &self.terms {
            write!(f, " {}: {};", k.to_display_string(), v)?;
        }
        write!(f, "}}")
    }
}

impl SymFunc {
    pub fn zero(ell: u64, basis: Basis) -> SymFunc {
        SymFunc {
            ell,
            basis,
            terms: BTreeMap::new(),
            core_label: None,
        }
    }

    pub fn constant(ell: u64, c: Scalar, basis: Basis) -> SymFunc {
        let mut f = SymFunc::zero(ell, basis);
        if !c.is_zero() {
            f.terms.insert(MultiPartition::empty(ell), c);
        }
        f
    }

    pub fn one(ell: u64, basis: Basis) -> SymFunc {
        SymFunc::constant(ell, Scalar::one(), basis)
    }

    /// Single basis element with coefficient 1.
    pub fn basis_element(ell: u64, basis: Basis, key: MultiPartition) -> SymFunc {
        assert_eq!(key.ell(), ell);
        let mut f = SymFunc::zero(ell, basis);
        f.terms.insert(key, Scalar::one());
        f
    }

    /// The generator b_n(color) for b among p, h, e (degree n >= 1).
    ///
    /// For the e-basis the returned key is the one-column shape of height
    /// n, whose transpose is the single part (n).
    pub fn generator(ell: u64, basis: Basis, n: u64, color: u64) -> SymFunc {
        assert!(n >= 1 && color < ell);
        let shape = match basis {
            Basis::E => Partition::new(vec![1; n as usize]),
            _ => Partition::new(vec![n]),
        };
        let mut comps = vec![Partition::empty(); ell as usize];
        comps[color as usize] = shape;
        SymFunc::basis_element(ell, basis, MultiPartition::new(comps))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert_add(&mut self, key: MultiPartition, c: Scalar) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &SymFunc) -> SymFunc {
        assert_eq!(self.basis, other.basis, "add requires a common basis");
        assert_eq!(self.ell, other.ell);
        let mut out = self.clone();
        out.core_label = merge_labels(&self.core_label, &other.core_label);
        for (k, v) in &other.terms {
            out.insert_add(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &SymFunc) -> SymFunc {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> SymFunc {
        let mut out = SymFunc::zero(self.ell, self.basis);
        out.core_label = self.core_label.clone();
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.terms.insert(k.clone(), v * c);
        }
        out
    }

    /// Total degree when homogeneous.
    pub fn degree(&self) -> Result<u64, SymFuncError> {
        let mut deg = None;
        for k in self.terms.keys() {
            let d = k.size();
            match deg {
                None => deg = Some(d),
                Some(x) if x == d => {}
                _ => return Err(SymFuncError::NotHomogeneous),
            }
        }
        Ok(deg.unwrap_or(0))
    }

    fn max_degree(&self) -> u64 {
        self.terms.keys().map(|k| k.size()).max().unwrap_or(0)
    }

    /// Change of basis; all pairs route through p.
    pub fn convert(&self, target: Basis) -> Result<SymFunc, SymFuncError> {
        self.convert_with_cap(target, DEFAULT_DEGREE_CAP)
    }

    pub fn convert_with_cap(&self, target: Basis, cap: u64) -> Result<SymFunc, SymFuncError> {
        let deg = self.max_degree();
        if deg > cap {
            return Err(SymFuncError::DegreeCapExceeded { degree: deg, cap });
        }
        if self.basis == target {
            return Ok(self.clone());
        }
        Ok(self.to_p().p_to(target))
    }

    /// Expand into the p-basis.
    pub fn to_p(&self) -> SymFunc {
        match self.basis {
            Basis::P => self.clone(),
            Basis::H => self.expand_per_color(classical::h_key_in_p),
            Basis::E => self.expand_per_color(classical::e_key_in_p),
            Basis::S => self.expand_per_color(classical::s_in_p),
            Basis::HHat => {
                let plain = SymFunc {
                    basis: Basis::H,
                    ..self.clone()
                };
                plain.to_p().pleth(PlethMap::PhiQInv)
            }
            Basis::EHat => {
                let plain = SymFunc {
                    basis: Basis::E,
                    ..self.clone()
                };
                plain.to_p().pleth(PlethMap::PhiTinvInv)
            }
        }
    }

    /// Convert from the p-basis to the target basis.
    fn p_to(&self, target: Basis) -> SymFunc {
        debug_assert_eq!(self.basis, Basis::P);
        match target {
            Basis::P => self.clone(),
            Basis::H | Basis::E | Basis::S => {
                let mut out = self.expand_per_color(match target {
                    Basis::H => classical::p_key_to_h,
                    Basis::E => classical::p_key_to_e,
                    _ => classical::p_key_to_s,
                });
                out.basis = target;
                out
            }
            Basis::HHat => {
                let mut out = self.pleth(PlethMap::PhiQ).p_to(Basis::H);
                out.basis = Basis::HHat;
                out
            }
            Basis::EHat => {
                let mut out = self.pleth(PlethMap::PhiTinv).p_to(Basis::E);
                out.basis = Basis::EHat;
                out
            }
        }
    }

    /// Apply a per-color expansion to every term; the closure maps a
    /// single-color key to its expansion in the other indexing.
    fn expand_per_color<F>(&self, expand: F) -> SymFunc
    where
        F: Fn(&Partition) -> BTreeMap<Partition, Scalar>,
    {
        let mut out = SymFunc::zero(self.ell, Basis::P);
        out.core_label = self.core_label.clone();
        for (key, coeff) in &self.terms {
            let mut acc: Vec<(Vec<Partition>, Scalar)> =
                vec![(vec![Partition::empty(); self.ell as usize], coeff.clone())];
            for (i, comp) in key.components.iter().enumerate() {
                if comp.is_empty() {
                    continue;
                }
                let table = expand(comp);
                let mut next = Vec::new();
                for (comps, c) in &acc {
                    for (k2, c2) in &table {
                        let mut comps2 = comps.clone();
                        comps2[i] = k2.clone();
                        next.push((comps2, c * c2));
                    }
                }
                acc = next;
            }
            for (comps, c) in acc {
                out.insert_add(MultiPartition::new(comps), c);
            }
        }
        out
    }

    /// Product, computed in the p-basis (where monomials multiply by
    /// multiset union of colored parts). Result stays in p.
    pub fn multiply(&self, other: &SymFunc) -> Result<SymFunc, SymFuncError> {
        if self.ell != other.ell {
            return Err(SymFuncError::MixedEll);
        }
        let a = self.to_p();
        let b = other.to_p();
        let mut out = SymFunc::zero(self.ell, Basis::P);
        out.core_label = merge_labels(&self.core_label, &other.core_label);
        for (k1, c1) in &a.terms {
            for (k2, c2) in &b.terms {
                let comps: Vec<Partition> = k1
                    .components
                    .iter()
                    .zip(&k2.components)
                    .map(|(x, y)| {
                        let mut parts = x.parts().to_vec();
                        parts.extend_from_slice(y.parts());
                        Partition::new(parts)
                    })
                    .collect();
                out.insert_add(MultiPartition::new(comps), c1 * c2);
            }
        }
        Ok(out)
    }

    /// Apply a plethystic algebra map generator-wise in the p-basis.
    pub fn pleth(&self, map: PlethMap) -> SymFunc {
        let f = self.to_p();
        let ell = self.ell as i64;
        let mut out = SymFunc::zero(self.ell, Basis::P);
        out.core_label = self.core_label.clone();
        for (key, coeff) in &f.terms {
            let mut acc: Vec<(Vec<Vec<u64>>, Scalar)> =
                vec![(vec![Vec::new(); self.ell as usize], coeff.clone())];
            for (i, comp) in key.components.iter().enumerate() {
                for &n in comp.parts() {
                    let image = pleth_generator(map, n, i as i64, ell);
                    let mut next = Vec::new();
                    for (comps, c) in &acc {
                        for (color2, c2) in &image {
                            let mut comps2 = comps.clone();
                            comps2[*color2 as usize].push(n);
                            next.push((comps2, c * c2));
                        }
                    }
                    acc = next;
                }
            }
            for (comps, c) in acc {
                let mp = MultiPartition::new(comps.into_iter().map(Partition::new).collect());
                out.insert_add(mp, c);
            }
        }
        out
    }

    /// Coefficient of the trivial class: the multi-Schur element with a
    /// single row (n) in color 0. Input must be homogeneous of degree n.
    pub fn trivial_coefficient(&self, n: u64) -> Result<Scalar, SymFuncError> {
        let deg = self.degree()?;
        if deg != n {
            return Err(SymFuncError::NotHomogeneous);
        }
        if n == 0 {
            return Ok(self
                .terms
                .get(&MultiPartition::empty(self.ell))
                .cloned()
                .unwrap_or_else(Scalar::zero));
        }
        let s = self.convert(Basis::S)?;
        let mut comps = vec![Partition::empty(); self.ell as usize];
        comps[0] = Partition::new(vec![n]);
        Ok(s.terms
            .get(&MultiPartition::new(comps))
            .cloned()
            .unwrap_or_else(Scalar::zero))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ell": self.ell,
            "basis": self.basis.name(),
            "core": self.core_label,
            "terms": self.terms.iter().map(|(k, v)| {
                serde_json::json!([
                    k.components.iter().map(|p| p.parts().to_vec()).collect::<Vec<_>>(),
                    v.to_display_string(),
                ])
            }).collect::<Vec<_>>(),
        })
    }

    /// Same schema as [`SymFunc::to_json`] but with scalars in exact
    /// positional form, suitable for reloading.
    pub fn to_json_exact(&self) -> serde_json::Value {
        serde_json::json!({
            "ell": self.ell,
            "basis": self.basis.name(),
            "core": self.core_label,
            "terms": self.terms.iter().map(|(k, v)| {
                serde_json::json!([
                    k.components.iter().map(|p| p.parts().to_vec()).collect::<Vec<_>>(),
                    v.to_json(),
                ])
            }).collect::<Vec<_>>(),
        })
    }

    pub fn from_json_exact(v: &serde_json::Value) -> Option<SymFunc> {
        let ell = v.get("ell")?.as_u64()?;
        let basis = Basis::parse(v.get("basis")?.as_str()?)?;
        let core_label = match v.get("core") {
            Some(serde_json::Value::Null) | None => None,
            Some(arr) => Some(
                arr.as_array()?
                    .iter()
                    .map(|x| x.as_i64())
                    .collect::<Option<Vec<i64>>>()?,
            ),
        };
        let mut f = SymFunc::zero(ell, basis);
        f.core_label = core_label;
        for t in v.get("terms")?.as_array()? {
            let t = t.as_array()?;
            if t.len() != 2 {
                return None;
            }
            let comps = t[0]
                .as_array()?
                .iter()
                .map(|p| {
                    p.as_array().map(|parts| {
                        Partition::new(parts.iter().filter_map(|x| x.as_u64()).collect())
                    })
                })
                .collect::<Option<Vec<_>>>()?;
            let c = Scalar::from_json(&t[1])?;
            f.insert_add(MultiPartition::new(comps), c);
        }
        Some(f)
    }

    /// Human-readable LaTeX rendering of the term list.
    pub fn to_latex(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let sym = match self.basis {
            Basis::P => "p",
            Basis::H => "h",
            Basis::E => "e",
            Basis::S => "s",
            Basis::HHat => "\\hat{h}",
            Basis::EHat => "\\hat{e}",
        };
        let mut pieces = Vec::new();
        for (k, v) in &self.terms {
            let label = k
                .components
                .iter()
                .map(|p| {
                    if p.is_empty() {
                        "\\varnothing".to_string()
                    } else {
                        format!(
                            "({})",
                            p.parts()
                                .iter()
                                .map(|x| x.to_string())
                                .collect::<Vec<_>>()
                                .join(",")
                        )
                    }
                })
                .collect::<Vec<_>>()
                .join(",");
            pieces.push(format!(
                "\\left({}\\right) {}_{{{}}}",
                v.to_display_string(),
                sym,
                label
            ));
        }
        let core = match &self.core_label {
            Some(c) => format!(
                " \\otimes e^{{({})}}",
                c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
            None => String::new(),
        };
        format!("{}{}", pieces.join(" + "), core)
    }
}

fn merge_labels(a: &Option<Vec<i64>>, b: &Option<Vec<i64>>) -> Option<Vec<i64>> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.iter().zip(y).map(|(u, v)| u + v).collect()),
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    }
}

/// Image of p_n(color) under a plethystic map, as (color, coefficient)
/// pairs.
fn pleth_generator(map: PlethMap, n: u64, color: i64, ell: i64) -> Vec<(u64, Scalar)> {
    let n = n as i64;
    let wrap = |c: i64| c.rem_euclid(ell) as u64;
    match map {
        PlethMap::PhiQ => vec![
            (wrap(color), Scalar::one()),
            (wrap(color - 1), -&Scalar::q_pow(n)),
        ],
        PlethMap::PhiTinv => vec![
            (wrap(color), Scalar::one()),
            (wrap(color - 1), -&Scalar::t_pow(-n)),
        ],
        PlethMap::PhiQInv => {
            let den = &Scalar::one() - &Scalar::q_pow(n * ell);
            (0..ell)
                .map(|k| (wrap(color - k), &Scalar::q_pow(k * n) / &den))
                .collect()
        }
        PlethMap::PhiTinvInv => {
            let den = &Scalar::one() - &Scalar::t_pow(-n * ell);
            (0..ell)
                .map(|k| (wrap(color - k), &Scalar::t_pow(-k * n) / &den))
                .collect()
        }
    }
}

/// hhat generator: PhiQ^{-1}(h_n(color)) in the p-basis.
pub fn hhat_gen(n: u64, color: u64, ell: u64) -> SymFunc {
    SymFunc::generator(ell, Basis::H, n, color)
        .to_p()
        .pleth(PlethMap::PhiQInv)
}

/// ehat generator: PhiTinv^{-1}(e_n(color)) in the p-basis.
pub fn ehat_gen(n: u64, color: u64, ell: u64) -> SymFunc {
    SymFunc::generator(ell, Basis::E, n, color)
        .to_p()
        .pleth(PlethMap::PhiTinvInv)
}

/// hhat_lambda = PhiQ^{-1}(h_{quot(lambda)}) tagged with core(lambda).
pub fn hhat(lam: &Partition, ell: u64) -> SymFunc {
    let (_, charges, quot) = crate::partitions::core_quotient(lam, ell);
    let mut f = SymFunc::basis_element(ell, Basis::H, MultiPartition::new(quot))
        .to_p()
        .pleth(PlethMap::PhiQInv);
    f.core_label = Some(charges);
    f
}

/// ehat_lambda = PhiTinv^{-1}(e_{quot(lambda)}) tagged with core(lambda).
pub fn ehat(lam: &Partition, ell: u64) -> SymFunc {
    let (_, charges, quot) = crate::partitions::core_quotient(lam, ell);
    let mut f = SymFunc::basis_element(ell, Basis::E, MultiPartition::new(quot))
        .to_p()
        .pleth(PlethMap::PhiTinvInv);
    f.core_label = Some(charges);
    f
}

/// Coordinates of a homogeneous p-basis element over the p-monomials of
/// its degree, in the order produced by [`multipartitions_of`].
pub fn p_coordinates(f: &SymFunc, degree: u64) -> Vec<Scalar> {
    debug_assert_eq!(f.basis, Basis::P);
    multipartitions_of(degree, f.ell)
        .iter()
        .map(|k| f.terms.get(k).cloned().unwrap_or_else(Scalar::zero))
        .collect()
}

// ---------------------------------------------------------------------------
// Classical single-color conversion tables
// ---------------------------------------------------------------------------

mod classical {
    use super::*;

    type CPoly = BTreeMap<Partition, Scalar>;

    fn cpoly_scale_add(dst: &mut CPoly, src: &CPoly, c: &Scalar) {
        for (k, v) in src {
            let add = v * c;
            if add.is_zero() {
                continue;
            }
            let entry = dst.entry(k.clone()).or_insert_with(Scalar::zero);
            *entry = &*entry + &add;
            if entry.is_zero() {
                dst.remove(k);
            }
        }
    }

    /// Multiply by the single generator with index n: key gains a part.
    fn cpoly_mul_gen(p: &CPoly, n: u64) -> CPoly {
        p.iter()
            .map(|(k, v)| {
                let mut parts = k.parts().to_vec();
                parts.push(n);
                (Partition::new(parts), v.clone())
            })
            .collect()
    }

    fn cpoly_mul(a: &CPoly, b: &CPoly) -> CPoly {
        let mut out = CPoly::new();
        for (k1, c1) in a {
            for (k2, c2) in b {
                let mut parts = k1.parts().to_vec();
                parts.extend_from_slice(k2.parts());
                let key = Partition::new(parts);
                let add = c1 * c2;
                let entry = out.entry(key.clone()).or_insert_with(Scalar::zero);
                *entry = &*entry + &add;
                if entry.is_zero() {
                    out.remove(&key);
                }
            }
        }
        out
    }

    pub fn z_lambda(lam: &Partition) -> i64 {
        let mut mult: BTreeMap<u64, i64> = BTreeMap::new();
        for &p in lam.parts() {
            *mult.entry(p).or_insert(0) += 1;
        }
        let mut z = 1i64;
        for (&i, &m) in &mult {
            for _ in 0..m {
                z *= i as i64;
            }
            for k in 1..=m {
                z *= k;
            }
        }
        z
    }

    thread_local! {
        static PN_IN_H: RefCell<HashMap<u64, CPoly>> = RefCell::new(HashMap::new());
        static PN_IN_E: RefCell<HashMap<u64, CPoly>> = RefCell::new(HashMap::new());
        static S_IN_P: RefCell<HashMap<Partition, CPoly>> = RefCell::new(HashMap::new());
        static P_TO_S: RefCell<HashMap<Partition, CPoly>> = RefCell::new(HashMap::new());
    }

    /// h_n = sum over kappa of p_kappa / z_kappa.
    fn hn_in_p(n: u64) -> CPoly {
        let mut out = CPoly::new();
        for kappa in partitions_of(n) {
            let z = Scalar::from_int(z_lambda(&kappa));
            out.insert(kappa, z.inv().expect("z_lambda nonzero"));
        }
        out
    }

    /// e_n = sum over kappa of (-1)^(n - len) p_kappa / z_kappa.
    fn en_in_p(n: u64) -> CPoly {
        let mut out = CPoly::new();
        for kappa in partitions_of(n) {
            let sign = if (n as usize - kappa.len()) % 2 == 0 {
                1
            } else {
                -1
            };
            let z = Scalar::from_int(sign * z_lambda(&kappa));
            out.insert(kappa, z.inv().expect("z_lambda nonzero"));
        }
        out
    }

    /// h-basis key (product over parts) in the p-basis.
    pub fn h_key_in_p(lam: &Partition) -> CPoly {
        let mut acc: CPoly = [(Partition::empty(), Scalar::one())].into_iter().collect();
        for &n in lam.parts() {
            acc = cpoly_mul(&acc, &hn_in_p(n));
        }
        acc
    }

    /// e-basis key lambda: the product of e_k over the parts of the
    /// transpose, expanded in p.
    pub fn e_key_in_p(lam: &Partition) -> CPoly {
        let mut acc: CPoly = [(Partition::empty(), Scalar::one())].into_iter().collect();
        for &n in lam.transpose().parts() {
            acc = cpoly_mul(&acc, &en_in_p(n));
        }
        acc
    }

    /// p_n in the h-basis via the Newton recursion
    /// p_n = n h_n - sum_{r<n} p_r h_{n-r}.
    fn pn_in_h(n: u64) -> CPoly {
        PN_IN_H.with(|cache| {
            if let Some(v) = cache.borrow().get(&n) {
                return v.clone();
            }
            let mut out = CPoly::new();
            out.insert(Partition::new(vec![n]), Scalar::from_int(n as i64));
            for r in 1..n {
                let pr = pn_in_h(r);
                let shifted = cpoly_mul_gen(&pr, n - r);
                cpoly_scale_add(&mut out, &shifted, &Scalar::from_int(-1));
            }
            cache.borrow_mut().insert(n, out.clone());
            out
        })
    }

    /// p_n as a polynomial in the e_m generators; keys record the
    /// multiset of e-indices (converted to the transpose labeling by the
    /// caller). From n e_n = sum (-1)^(r-1) p_r e_{n-r}.
    fn pn_in_e(n: u64) -> CPoly {
        PN_IN_E.with(|cache| {
            if let Some(v) = cache.borrow().get(&n) {
                return v.clone();
            }
            let mut inner = CPoly::new();
            inner.insert(Partition::new(vec![n]), Scalar::from_int(n as i64));
            for r in 1..n {
                let pr = pn_in_e(r);
                let shifted = cpoly_mul_gen(&pr, n - r);
                let sign = if (r - 1) % 2 == 0 { -1 } else { 1 };
                cpoly_scale_add(&mut inner, &shifted, &Scalar::from_int(sign));
            }
            let sign = if (n - 1) % 2 == 0 { 1 } else { -1 };
            let out: CPoly = inner
                .into_iter()
                .map(|(k, v)| (k, &v * &Scalar::from_int(sign)))
                .collect();
            cache.borrow_mut().insert(n, out.clone());
            out
        })
    }

    pub fn p_key_to_h(lam: &Partition) -> CPoly {
        let mut acc: CPoly = [(Partition::empty(), Scalar::one())].into_iter().collect();
        for &n in lam.parts() {
            acc = cpoly_mul(&acc, &pn_in_h(n));
        }
        acc
    }

    pub fn p_key_to_e(lam: &Partition) -> CPoly {
        let mut acc: CPoly = [(Partition::empty(), Scalar::one())].into_iter().collect();
        for &n in lam.parts() {
            acc = cpoly_mul(&acc, &pn_in_e(n));
        }
        // keys currently record e-index multisets; e-basis labels are the
        // transposes
        acc.into_iter().map(|(k, v)| (k.transpose(), v)).collect()
    }

    /// Jacobi-Trudi: s_lambda = det(h_{lambda_i - i + j}), expanded by
    /// Laplace expansion with column-subset memoization.
    fn s_in_h(lam: &Partition) -> CPoly {
        let rows = lam.len();
        if rows == 0 {
            return [(Partition::empty(), Scalar::one())].into_iter().collect();
        }
        let entry = |i: usize, j: usize| -> Option<u64> {
            let v = lam.parts()[i] as i64 - (i as i64 + 1) + (j as i64 + 1);
            if v < 0 {
                None
            } else {
                Some(v as u64)
            }
        };
        fn det(
            i: usize,
            mask: u64,
            rows: usize,
            entry: &dyn Fn(usize, usize) -> Option<u64>,
            memo: &mut HashMap<(usize, u64), CPoly>,
        ) -> CPoly {
            if i == rows {
                return [(Partition::empty(), Scalar::one())].into_iter().collect();
            }
            if let Some(v) = memo.get(&(i, mask)) {
                return v.clone();
            }
            let mut out = CPoly::new();
            let mut sign = 1i64;
            for j in 0..rows {
                if mask & (1 << j) != 0 {
                    continue;
                }
                if let Some(h) = entry(i, j) {
                    let sub = det(i + 1, mask | (1 << j), rows, entry, memo);
                    let factor = Scalar::from_int(sign);
                    if h == 0 {
                        cpoly_scale_add(&mut out, &sub, &factor);
                    } else {
                        let shifted = cpoly_mul_gen(&sub, h);
                        cpoly_scale_add(&mut out, &shifted, &factor);
                    }
                }
                sign = -sign;
            }
            memo.insert((i, mask), out.clone());
            out
        }
        let mut memo = HashMap::new();
        det(0, 0, rows, &entry, &mut memo)
    }

    /// s_lambda in the p-basis.
    pub fn s_in_p(lam: &Partition) -> CPoly {
        S_IN_P.with(|cache| {
            if let Some(v) = cache.borrow().get(lam) {
                return v.clone();
            }
            let in_h = s_in_h(lam);
            let mut out = CPoly::new();
            for (hkey, c) in &in_h {
                let expanded = h_key_in_p(hkey);
                cpoly_scale_add(&mut out, &expanded, c);
            }
            cache.borrow_mut().insert(lam.clone(), out.clone());
            out
        })
    }

    /// p_mu in the s-basis via character orthogonality:
    /// p_mu = sum_lambda chi^lambda_mu s_lambda with
    /// chi^lambda_mu = z_mu * [coefficient of p_mu in s_lambda].
    pub fn p_key_to_s(mu: &Partition) -> CPoly {
        P_TO_S.with(|cache| {
            if let Some(v) = cache.borrow().get(mu) {
                return v.clone();
            }
            let n = mu.size();
            let z = Scalar::from_int(z_lambda(mu));
            let mut out = CPoly::new();
            for lam in partitions_of(n) {
                let table = s_in_p(&lam);
                if let Some(c) = table.get(mu) {
                    let chi = &z * c;
                    if !chi.is_zero() {
                        out.insert(lam, chi);
                    }
                }
            }
            cache.borrow_mut().insert(mu.clone(), out.clone());
            out
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::XorShift;

    fn p(parts: &[u64]) -> Partition {
        Partition::new(parts.to_vec())
    }

    fn mp1(ell: u64, color: usize, parts: &[u64]) -> MultiPartition {
        let mut comps = vec![Partition::empty(); ell as usize];
        comps[color] = p(parts);
        MultiPartition::new(comps)
    }

    #[test]
    fn h1_is_p1() {
        let h1 = SymFunc::generator(2, Basis::H, 1, 0);
        let in_p = h1.convert(Basis::P).unwrap();
        assert_eq!(in_p.terms.len(), 1);
        assert_eq!(in_p.terms.get(&mp1(2, 0, &[1])).unwrap(), &Scalar::one());
    }

    #[test]
    fn h2_in_p() {
        // Oracle: expanding exp(p1 z + p2 z^2/2) to order 2 gives
        // h_2 = p1^2/2 + p2/2.
        let h2 = SymFunc::generator(3, Basis::H, 2, 1)
            .convert(Basis::P)
            .unwrap();
        let half = &Scalar::one() / &Scalar::from_int(2);
        assert_eq!(h2.terms.get(&mp1(3, 1, &[1, 1])).unwrap(), &half);
        assert_eq!(h2.terms.get(&mp1(3, 1, &[2])).unwrap(), &half);
        assert_eq!(h2.terms.len(), 2);
    }

    #[test]
    fn s11_is_e2() {
        // single-color s_(1,1) equals e_2; in the transpose labeling the
        // e-basis key for the generator e_2 is the column (1,1)
        let s = SymFunc::basis_element(2, Basis::S, mp1(2, 0, &[1, 1]));
        let e = s.convert(Basis::E).unwrap();
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.terms.get(&mp1(2, 0, &[1, 1])).unwrap(), &Scalar::one());
        let gen = SymFunc::generator(2, Basis::E, 2, 0)
            .convert(Basis::P)
            .unwrap();
        let half = &Scalar::one() / &Scalar::from_int(2);
        assert_eq!(gen.terms.get(&mp1(2, 0, &[1, 1])).unwrap(), &half);
        assert_eq!(gen.terms.get(&mp1(2, 0, &[2])).unwrap(), &(-&half));
    }

    #[test]
    fn conversions_round_trip() {
        let mut rng = XorShift::new(5);
        let ell = 3u64;
        for basis in [Basis::H, Basis::E, Basis::S, Basis::HHat, Basis::EHat] {
            for _ in 0..4 {
                let mut f = SymFunc::zero(ell, Basis::P);
                for _ in 0..3 {
                    let keys = multipartitions_of(rng.below(4) + 1, ell);
                    let k = keys[rng.below(keys.len() as u64) as usize].clone();
                    f.insert_add(k, rng.scalar(2));
                }
                let there = f.convert(basis).unwrap();
                let back = there.convert(Basis::P).unwrap();
                assert_eq!(back.terms, f.terms, "round trip through {:?}", basis);
            }
        }
    }

    #[test]
    fn degree_cap_enforced() {
        let f = SymFunc::basis_element(1, Basis::H, mp1(1, 0, &[13]));
        assert!(matches!(
            f.convert(Basis::P),
            Err(SymFuncError::DegreeCapExceeded { .. })
        ));
    }

    #[test]
    fn multiply_examples() {
        let ell = 3;
        let p1 = SymFunc::generator(ell, Basis::P, 1, 0);
        let sq = p1.multiply(&p1).unwrap();
        assert_eq!(sq.terms.len(), 1);
        assert_eq!(sq.terms.get(&mp1(ell, 0, &[1, 1])).unwrap(), &Scalar::one());

        let f = SymFunc::generator(ell, Basis::H, 2, 1).convert(Basis::P).unwrap();
        let one = SymFunc::one(ell, Basis::P);
        assert_eq!(f.multiply(&one).unwrap().terms, f.terms);

        // h_1(0) h_1(1) in the s-basis: the multi-Schur with two one-box
        // components
        let a = SymFunc::generator(ell, Basis::H, 1, 0);
        let b = SymFunc::generator(ell, Basis::H, 1, 1);
        let prod = a
            .convert(Basis::P)
            .unwrap()
            .multiply(&b.convert(Basis::P).unwrap())
            .unwrap()
            .convert(Basis::S)
            .unwrap();
        let mut comps = vec![Partition::empty(); 3];
        comps[0] = p(&[1]);
        comps[1] = p(&[1]);
        assert_eq!(prod.terms.len(), 1);
        assert_eq!(
            prod.terms.get(&MultiPartition::new(comps)).unwrap(),
            &Scalar::one()
        );
    }

    #[test]
    fn pleth_generator_images() {
        // PhiQ(p_1(i)) = p_1(i) - q p_1(i-1)
        let ell = 3;
        let f = SymFunc::generator(ell, Basis::P, 1, 1).pleth(PlethMap::PhiQ);
        assert_eq!(f.terms.get(&mp1(ell, 1, &[1])).unwrap(), &Scalar::one());
        assert_eq!(f.terms.get(&mp1(ell, 0, &[1])).unwrap(), &(-&Scalar::q()));

        let g = SymFunc::generator(ell, Basis::P, 2, 0);
        let round = g.pleth(PlethMap::PhiQ).pleth(PlethMap::PhiQInv);
        assert_eq!(round.terms, g.terms);
        let round2 = g.pleth(PlethMap::PhiQInv).pleth(PlethMap::PhiQ);
        assert_eq!(round2.terms, g.terms);

        // ell = 1: PhiQInv(p_n) = p_n / (1 - q^n)
        let h = SymFunc::generator(1, Basis::P, 3, 0).pleth(PlethMap::PhiQInv);
        let expected = &Scalar::one() / &(&Scalar::one() - &Scalar::q_pow(3));
        assert_eq!(h.terms.get(&mp1(1, 0, &[3])).unwrap(), &expected);
    }

    #[test]
    fn pleth_maps_are_algebra_homs() {
        let mut rng = XorShift::new(41);
        let ell = 3;
        for map in [
            PlethMap::PhiQ,
            PlethMap::PhiQInv,
            PlethMap::PhiTinv,
            PlethMap::PhiTinvInv,
        ] {
            for _ in 0..3 {
                let mut f = SymFunc::zero(ell, Basis::P);
                let mut g = SymFunc::zero(ell, Basis::P);
                for _ in 0..2 {
                    let keys = multipartitions_of(rng.below(3) + 1, ell);
                    f.insert_add(
                        keys[rng.below(keys.len() as u64) as usize].clone(),
                        rng.scalar(2),
                    );
                    g.insert_add(
                        keys[rng.below(keys.len() as u64) as usize].clone(),
                        rng.scalar(2),
                    );
                }
                let lhs = f.multiply(&g).unwrap().pleth(map);
                let rhs = f.pleth(map).multiply(&g.pleth(map)).unwrap();
                assert_eq!(lhs.terms, rhs.terms, "{:?} is multiplicative", map);
            }
        }
    }

    #[test]
    fn pleth_inverse_laws() {
        // exhaustive at small ell and degree; spot checks higher up
        for ell in 1..=3u64 {
            for deg in 1..=4u64 {
                for key in multipartitions_of(deg, ell) {
                    let f = SymFunc::basis_element(ell, Basis::P, key.clone());
                    let a = f.pleth(PlethMap::PhiQ).pleth(PlethMap::PhiQInv);
                    assert_eq!(a.terms, f.terms);
                    let b = f.pleth(PlethMap::PhiTinvInv).pleth(PlethMap::PhiTinv);
                    assert_eq!(b.terms, f.terms);
                }
            }
        }
        for (ell, parts0, parts1) in [(4u64, vec![5, 1], vec![]), (4, vec![3], vec![2, 1])] {
            let mut comps = vec![Partition::empty(); ell as usize];
            comps[0] = Partition::new(parts0);
            comps[1] = Partition::new(parts1);
            let f = SymFunc::basis_element(ell, Basis::P, MultiPartition::new(comps));
            let a = f.pleth(PlethMap::PhiQ).pleth(PlethMap::PhiQInv);
            assert_eq!(a.terms, f.terms);
            let b = f.pleth(PlethMap::PhiTinvInv).pleth(PlethMap::PhiTinv);
            assert_eq!(b.terms, f.terms);
        }
    }

    #[test]
    fn hhat_examples() {
        // an ell-core has empty quotient: hhat is the constant 1 with the
        // core label attached
        let f = hhat(&p(&[3, 1]), 3);
        assert_eq!(f.terms.len(), 1);
        assert_eq!(
            f.terms.get(&MultiPartition::empty(3)).unwrap(),
            &Scalar::one()
        );
        assert_eq!(f.core_label, Some(vec![1, -1, 0]));

        // ell = 1, lambda = (1): p_1 / (1 - q)
        let g = hhat(&p(&[1]), 1);
        let expected = &Scalar::one() / &(&Scalar::one() - &Scalar::q());
        assert_eq!(g.terms.get(&mp1(1, 0, &[1])).unwrap(), &expected);
        assert_eq!(g.core_label, Some(vec![0]));

        // ell = 3, lambda = (3): quot has one box in some color; hhat
        // is PhiQInv(h_1) for that color
        let lam = p(&[3]);
        let (_, charges, quot) = crate::partitions::core_quotient(&lam, 3);
        let color = quot.iter().position(|q| !q.is_empty()).unwrap();
        let h = hhat(&lam, 3);
        let oracle = hhat_gen(1, color as u64, 3);
        assert_eq!(h.terms, oracle.terms);
        assert_eq!(h.core_label, Some(charges));
    }

    #[test]
    fn trivial_coefficient_examples() {
        let ell = 3;
        let f = SymFunc::basis_element(ell, Basis::S, mp1(ell, 0, &[2]));
        assert_eq!(f.trivial_coefficient(2).unwrap(), Scalar::one());
        let g = SymFunc::basis_element(ell, Basis::S, mp1(ell, 1, &[2]));
        assert_eq!(g.trivial_coefficient(2).unwrap(), Scalar::zero());
        for n in 1..=4 {
            let h = SymFunc::generator(ell, Basis::H, n, 0);
            assert_eq!(h.trivial_coefficient(n).unwrap(), Scalar::one());
        }
        assert!(f.trivial_coefficient(3).is_err());
    }

    /// Kostka data at degree 3 as an independent check of the h -> s
    /// conversion: h_21 = s_3 + s_21, h_111 = s_3 + 2 s_21 + s_111.
    #[test]
    fn kostka_oracle_degree3() {
        let ell = 1u64;
        let h21 = SymFunc::basis_element(ell, Basis::H, mp1(ell, 0, &[2, 1]))
            .convert(Basis::S)
            .unwrap();
        assert_eq!(h21.terms.len(), 2);
        assert_eq!(h21.terms.get(&mp1(ell, 0, &[3])).unwrap(), &Scalar::one());
        assert_eq!(h21.terms.get(&mp1(ell, 0, &[2, 1])).unwrap(), &Scalar::one());
        let h111 = SymFunc::basis_element(ell, Basis::H, mp1(ell, 0, &[1, 1, 1]))
            .convert(Basis::S)
            .unwrap();
        assert_eq!(h111.terms.get(&mp1(ell, 0, &[3])).unwrap(), &Scalar::one());
        assert_eq!(
            h111.terms.get(&mp1(ell, 0, &[2, 1])).unwrap(),
            &Scalar::from_int(2)
        );
        assert_eq!(
            h111.terms.get(&mp1(ell, 0, &[1, 1, 1])).unwrap(),
            &Scalar::one()
        );
    }

    #[test]
    fn newton_oracle_p3() {
        // p_3 = s_3 - s_21 + s_111 (character values of a 3-cycle)
        let p3 = SymFunc::generator(1, Basis::P, 3, 0)
            .convert(Basis::S)
            .unwrap();
        assert_eq!(p3.terms.get(&mp1(1, 0, &[3])).unwrap(), &Scalar::one());
        assert_eq!(
            p3.terms.get(&mp1(1, 0, &[2, 1])).unwrap(),
            &Scalar::from_int(-1)
        );
        assert_eq!(p3.terms.get(&mp1(1, 0, &[1, 1, 1])).unwrap(), &Scalar::one());
    }
}
