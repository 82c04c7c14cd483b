//! The negative shuffle algebra at small degree vectors: mixing terms,
//! the star product, wheel/pole validators, limit profiles, the explicit
//! elements F_{p,n} / E_{p,n} / H_{p,n}, Gordon evaluation maps and
//! functionals, and the long-evaluation pairing formulas.
//!
//! Symmetrization is stored lazily: an element is a term list together
//! with a flag saying whether the list is already the full color
//! symmetrization. Full expansion happens only inside evaluations, where
//! specialization collapses most terms.

pub mod engine;

use crate::scalars::Scalar;
use engine::{EngineError, Mono, RatSum, RatTerm, Var};
use std::fmt;

/// Default guard on the total number of variables in products and
/// evaluations.
pub const DEFAULT_VARIABLE_GUARD: u64 = 8;

/// Auxiliary variable blocks used by the evaluation maps.
const Y_BASE: Var = 1 << 16;
const SCALED_BASE: Var = 1 << 17;
const XI_VAR: Var = 1 << 20;
const EPS_VAR: Var = 1 << 20 + 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShuffleError {
    GuardExceeded { vars: u64, guard: u64 },
    DegreeMismatch,
    NotEven,
    EllTooSmall,
    Engine(EngineError),
}

impl fmt::Display for ShuffleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShuffleError::GuardExceeded { vars, guard } => {
                write!(f, "degree guard exceeded: {} variables > {}", vars, guard)
            }
            ShuffleError::DegreeMismatch => write!(f, "degree vector mismatch"),
            ShuffleError::NotEven => write!(f, "interval partition is not even"),
            ShuffleError::EllTooSmall => write!(f, "shuffle formulas require ell >= 3"),
            ShuffleError::Engine(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for ShuffleError {}

impl From<EngineError> for ShuffleError {
    fn from(e: EngineError) -> Self {
        ShuffleError::Engine(e)
    }
}

// ---------------------------------------------------------------------------
// Degree vectors and variable layout
// ---------------------------------------------------------------------------

/// Number of variables of each color.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DegreeVector(pub Vec<u64>);

impl DegreeVector {
    pub fn zero(ell: u64) -> DegreeVector {
        DegreeVector(vec![0; ell as usize])
    }

    pub fn diagonal(k: u64, ell: u64) -> DegreeVector {
        DegreeVector(vec![k; ell as usize])
    }

    pub fn ell(&self) -> u64 {
        self.0.len() as u64
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn add(&self, o: &DegreeVector) -> DegreeVector {
        DegreeVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn leq(&self, o: &DegreeVector) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn is_diagonal(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// Flat variable id for (color, index r >= 1).
    pub fn var(&self, color: u64, r: u64) -> Var {
        debug_assert!(r >= 1 && r <= self.0[color as usize]);
        let offset: u64 = self.0[..color as usize].iter().sum();
        (offset + r - 1) as Var
    }

    /// Factorial of the degree vector.
    pub fn factorial(&self) -> u64 {
        self.0
            .iter()
            .map(|&k| (1..=k).product::<u64>())
            .product()
    }
}

/// The degree vector of the integer interval (a; b].
pub fn interval_vector(a: i64, b: i64, ell: u64) -> DegreeVector {
    let mut v = vec![0u64; ell as usize];
    for c in a + 1..=b {
        v[c.rem_euclid(ell as i64) as usize] += 1;
    }
    DegreeVector(v)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..n {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Mixing terms
// ---------------------------------------------------------------------------

/// The mixing term omega_{i,j}(x/y) as numerator/denominator binomials in
/// the variables x and y; None when the colors are distinct and
/// non-adjacent (omega = 1). Requires ell >= 3.
type Binomial = (Scalar, Mono, Scalar, Mono);

pub fn omega_factors(i: u64, j: u64, x: Var, y: Var, ell: u64) -> Option<(Binomial, Binomial)> {
    assert!(ell >= 3, "mixing-term cases are disjoint only for ell >= 3");
    let den = (
        Scalar::one(),
        Mono::var(x),
        Scalar::one(),
        Mono::var(y),
    );
    if i == j {
        // (x - qq^{-2} y)/(x - y)
        Some((
            (Scalar::one(), Mono::var(x), Scalar::qq_pow(-2), Mono::var(y)),
            den,
        ))
    } else if (i + 1) % ell == j {
        // (dd^{-1} x - qq y)/(x - y)
        Some((
            (Scalar::dd_pow(-1), Mono::var(x), Scalar::qq_pow(1), Mono::var(y)),
            den,
        ))
    } else if (j + 1) % ell == i {
        // (x - qq dd^{-1} y)/(x - y)
        Some((
            (
                Scalar::one(),
                Mono::var(x),
                &Scalar::qq_pow(1) * &Scalar::dd_pow(-1),
                Mono::var(y),
            ),
            den,
        ))
    } else {
        None
    }
}

/// omega_{i,j} evaluated at a scalar argument.
pub fn omega_scalar(i: u64, j: u64, z: &Scalar, ell: u64) -> Scalar {
    assert!(ell >= 3);
    let one = Scalar::one();
    if i == j {
        &(z - &Scalar::qq_pow(-2)) / &(z - &one)
    } else if (i + 1) % ell == j {
        &(&(&Scalar::dd_pow(-1) * z) - &Scalar::qq_pow(1)) / &(z - &one)
    } else if (j + 1) % ell == i {
        &(z - &(&Scalar::qq_pow(1) * &Scalar::dd_pow(-1))) / &(z - &one)
    } else {
        one
    }
}

// ---------------------------------------------------------------------------
// Shuffle elements
// ---------------------------------------------------------------------------

/// A color-symmetric rational function stored as a list of factored
/// summands. When `pre_symmetrized` is set, the term list itself is the
/// function; otherwise the function is the sum over all color-preserving
/// permutations applied to the list.
#[derive(Clone, Debug)]
pub struct ShuffleElement {
    pub ell: u64,
    pub degree: DegreeVector,
    pub terms: Vec<RatTerm>,
    pub pre_symmetrized: bool,
}

impl ShuffleElement {
    pub fn constant(ell: u64, c: Scalar) -> ShuffleElement {
        ShuffleElement {
            ell,
            degree: DegreeVector::zero(ell),
            terms: vec![RatTerm::constant(c)],
            pre_symmetrized: true,
        }
    }

    /// The monomial x_{color,1}^k (single variable of one color).
    pub fn monomial(ell: u64, color: u64, k: i64) -> ShuffleElement {
        let mut degree = DegreeVector::zero(ell);
        degree.0[color as usize] = 1;
        let mut t = RatTerm::one();
        t.mono = Mono::var_pow(degree.var(color, 1), k);
        ShuffleElement {
            ell,
            degree,
            terms: vec![t],
            pre_symmetrized: true,
        }
    }

    pub fn scale(&self, c: &Scalar) -> ShuffleElement {
        let mut out = self.clone();
        for t in out.terms.iter_mut() {
            t.coeff.mul_scalar(c);
        }
        out
    }

    pub fn add(&self, other: &ShuffleElement) -> Result<ShuffleElement, ShuffleError> {
        if self.degree != other.degree || self.ell != other.ell {
            return Err(ShuffleError::DegreeMismatch);
        }
        let mut terms = self.lazy_terms();
        terms.extend(other.lazy_terms());
        Ok(ShuffleElement {
            ell: self.ell,
            degree: self.degree.clone(),
            terms,
            pre_symmetrized: false,
        })
    }

    /// Terms normalized to the lazy convention (function = symmetrization
    /// of the list): a pre-symmetrized list is rescaled by 1/k!.
    pub fn lazy_terms(&self) -> Vec<RatTerm> {
        if !self.pre_symmetrized {
            return self.terms.clone();
        }
        let inv = Scalar::from_int(self.degree.factorial() as i64)
            .inv()
            .expect("factorial nonzero");
        self.terms
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.coeff.mul_scalar(&inv);
                t
            })
            .collect()
    }

    /// The full symmetrization as an explicit term sum.
    pub fn full_expansion(&self) -> RatSum {
        if self.pre_symmetrized {
            return RatSum::from_terms(self.terms.clone());
        }
        let mut out = Vec::new();
        let perms_per_color: Vec<Vec<Vec<usize>>> = self
            .degree
            .0
            .iter()
            .map(|&k| permutations(k as usize))
            .collect();
        let mut choice = vec![0usize; self.ell as usize];
        loop {
            // renaming determined by the chosen permutation per color
            let degree = self.degree.clone();
            let perms: Vec<&Vec<usize>> = choice
                .iter()
                .enumerate()
                .map(|(i, &c)| &perms_per_color[i][c])
                .collect();
            let map = |v: Var| -> Var {
                // locate (color, r) of v
                let mut color = 0usize;
                let mut off = 0u64;
                while (v as u64) >= off + degree.0[color] {
                    off += degree.0[color];
                    color += 1;
                }
                let r = v as u64 - off;
                degree.var(color as u64, perms[color][r as usize] as u64 + 1)
            };
            for t in &self.terms {
                out.push(t.rename(&map));
            }
            // advance the mixed-radix counter
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return RatSum::from_terms(out);
                }
                choice[i] += 1;
                if choice[i] < perms_per_color[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    /// Exact equality as rational functions.
    pub fn equal_as_functions(&self, other: &ShuffleElement) -> Result<bool, ShuffleError> {
        if self.degree != other.degree {
            return Ok(false);
        }
        let diff = self
            .full_expansion()
            .add(&other.full_expansion().scale(&Scalar::from_int(-1)));
        Ok(diff.is_zero_function())
    }
}

// ---------------------------------------------------------------------------
// The star product
// ---------------------------------------------------------------------------

pub fn shuffle_product(f: &ShuffleElement, g: &ShuffleElement) -> Result<ShuffleElement, ShuffleError> {
    shuffle_product_with_guard(f, g, DEFAULT_VARIABLE_GUARD)
}

pub fn shuffle_product_with_guard(
    f: &ShuffleElement,
    g: &ShuffleElement,
    guard: u64,
) -> Result<ShuffleElement, ShuffleError> {
    assert_eq!(f.ell, g.ell);
    let ell = f.ell;
    let degree = f.degree.add(&g.degree);
    if degree.total() > guard {
        return Err(ShuffleError::GuardExceeded {
            vars: degree.total(),
            guard,
        });
    }
    // remappings into the block layout of the product: f keeps slots
    // (i, 1..=n_i), g takes (i, n_i+1..)
    let remap_f = |v: Var| -> Var {
        let (color, r) = locate(&f.degree, v);
        degree.var(color, r)
    };
    let remap_g = |v: Var| -> Var {
        let (color, r) = locate(&g.degree, v);
        degree.var(color, f.degree.0[color as usize] + r)
    };
    let mut terms = Vec::new();
    for tf in f.lazy_terms() {
        for tg in g.lazy_terms() {
            let a = tf.rename(&remap_f);
            let b = tg.rename(&remap_g);
            let mut t = RatTerm {
                coeff: {
                    let mut c = a.coeff.clone();
                    c.mul_coeff(&b.coeff);
                    c
                },
                mono: a.mono.mul(&b.mono),
                num: a.num.iter().chain(b.num.iter()).cloned().collect(),
                den: a.den.iter().chain(b.den.iter()).cloned().collect(),
                poly: match (&a.poly, &b.poly) {
                    (None, None) => None,
                    (Some(p), None) | (None, Some(p)) => Some(p.clone()),
                    (Some(p), Some(q)) => Some(engine::mul_xpoly(p, q)),
                },
            };
            // mixing terms between the f-block and the g-block
            for i in 0..ell {
                for r in 1..=f.degree.0[i as usize] {
                    for j in 0..ell {
                        for s in 1..=g.degree.0[j as usize] {
                            let x = degree.var(i, r);
                            let y = degree.var(j, f.degree.0[j as usize] + s);
                            if let Some((num, den)) = omega_factors(i, j, x, y, ell) {
                                t.push_num(num.0, num.1, num.2, num.3);
                                t.push_den(den.0, den.1, den.2, den.3);
                            }
                        }
                    }
                }
            }
            terms.push(t);
        }
    }
    Ok(ShuffleElement {
        ell,
        degree,
        terms,
        pre_symmetrized: false,
    })
}

fn locate(degree: &DegreeVector, v: Var) -> (u64, u64) {
    let mut color = 0usize;
    let mut off = 0u64;
    while (v as u64) >= off + degree.0[color] {
        off += degree.0[color];
        color += 1;
    }
    (color as u64, v as u64 - off + 1)
}

// ---------------------------------------------------------------------------
// The explicit elements F, E, H
// ---------------------------------------------------------------------------

/// F_{p,n}: the diagonal-degree generator family. Already symmetric, so
/// stored pre-symmetrized as a single term.
pub fn f_pn(p: u64, n: u64, ell: u64) -> ShuffleElement {
    assert!(ell >= 3);
    assert!(p < ell);
    if n == 0 {
        return ShuffleElement::constant(ell, Scalar::one());
    }
    let degree = DegreeVector::diagonal(n, ell);
    let n_i = n as i64;
    let ell_i = ell as i64;
    // (-1)^n qq^(l n^2 - n) (qq - qq^{-1})^(l n) / dd^(l n (n+1)/2)
    let mut coeff = Scalar::qq_pow(ell_i * n_i * n_i - n_i);
    if n % 2 == 1 {
        coeff = -&coeff;
    }
    let bracket = &Scalar::qq_pow(1) - &Scalar::qq_pow(-1);
    coeff = &coeff * &bracket.pow(ell_i * n_i);
    coeff = &coeff * &Scalar::dd_pow(-ell_i * n_i * (n_i + 1) / 2);

    let mut t = RatTerm::constant(coeff);
    // prod_r x_{0,r}/x_{p,r} and prod_{i,r} x_{i,r}
    for r in 1..=n {
        t.mono = t.mono.mul(&Mono::var(degree.var(0, r)));
        t.mono = t.mono.mul(&Mono::var(degree.var(p, r)).inv());
        for i in 0..ell {
            t.mono = t.mono.mul(&Mono::var(degree.var(i, r)));
        }
    }
    for i in 0..ell {
        // numerator: (x_{i,r} - qq^{-2} x_{i,r'}) over ordered pairs r != r'
        for r in 1..=n {
            for rp in 1..=n {
                if r == rp {
                    continue;
                }
                t.push_num(
                    Scalar::one(),
                    Mono::var(degree.var(i, r)),
                    Scalar::qq_pow(-2),
                    Mono::var(degree.var(i, rp)),
                );
            }
        }
        // denominator: (x_{i,r} - x_{i+1,s}) over all pairs
        let ip = (i + 1) % ell;
        for r in 1..=n {
            for s in 1..=n {
                t.push_den(
                    Scalar::one(),
                    Mono::var(degree.var(i, r)),
                    Scalar::one(),
                    Mono::var(degree.var(ip, s)),
                );
            }
        }
    }
    ShuffleElement {
        ell,
        degree,
        terms: vec![t],
        pre_symmetrized: true,
    }
}

/// Common part of the E/H bottom elements: the all-pairs mixing product
/// over r < s and the chain monomial factors.
fn bottom_element(p: u64, n: u64, ell: u64, elementary: bool) -> ShuffleElement {
    assert!(ell >= 3);
    assert!(p < ell);
    if n == 0 {
        return ShuffleElement::constant(ell, Scalar::one());
    }
    let degree = DegreeVector::diagonal(n, ell);
    let bracket = &Scalar::qq_pow(1) - &Scalar::qq_pow(-1);
    let mut t = RatTerm::constant(bracket.pow((n * (ell - 1)) as i64));
    let pp = (p + 1) % ell;

    // prod_{i,j} prod_{r<s} omega_{i,j}(x_{i,s}/x_{j,r})
    for i in 0..ell {
        for j in 0..ell {
            for r in 1..=n {
                for s in r + 1..=n {
                    if let Some((num, den)) =
                        omega_factors(i, j, degree.var(i, s), degree.var(j, r), ell)
                    {
                        t.push_num(num.0, num.1, num.2, num.3);
                        t.push_den(den.0, den.1, den.2, den.3);
                    }
                }
            }
        }
    }
    if elementary {
        // * prod_{r<=s} omega_{p+1,p}(x_{p+1,r}/x_{p,s})
        for r in 1..=n {
            for s in r..=n {
                let (num, den) =
                    omega_factors(pp, p, degree.var(pp, r), degree.var(p, s), ell).unwrap();
                t.push_num(num.0, num.1, num.2, num.3);
                t.push_den(den.0, den.1, den.2, den.3);
            }
        }
        // / prod_{r<s} omega_{p,p+1}(x_{p,s}/x_{p+1,r}) omega_{p+1,p+1}(x_{p+1,s}/x_{p+1,r})
        for r in 1..=n {
            for s in r + 1..=n {
                let (num, den) =
                    omega_factors(p, pp, degree.var(p, s), degree.var(pp, r), ell).unwrap();
                t.push_num(den.0, den.1, den.2, den.3);
                t.push_den(num.0, num.1, num.2, num.3);
                let (num2, den2) =
                    omega_factors(pp, pp, degree.var(pp, s), degree.var(pp, r), ell).unwrap();
                t.push_num(den2.0, den2.1, den2.2, den2.3);
                t.push_den(num2.0, num2.1, num2.2, num2.3);
            }
        }
    } else {
        // * prod_{r<=s} omega_{p,p+1}(x_{p,r}/x_{p+1,s})
        for r in 1..=n {
            for s in r..=n {
                let (num, den) =
                    omega_factors(p, pp, degree.var(p, r), degree.var(pp, s), ell).unwrap();
                t.push_num(num.0, num.1, num.2, num.3);
                t.push_den(den.0, den.1, den.2, den.3);
            }
        }
        // / prod_{r<s} omega_{p+1,p}(x_{p+1,s}/x_{p,r}) omega_{p,p}(x_{p,s}/x_{p,r})
        for r in 1..=n {
            for s in r + 1..=n {
                let (num, den) =
                    omega_factors(pp, p, degree.var(pp, s), degree.var(p, r), ell).unwrap();
                t.push_num(den.0, den.1, den.2, den.3);
                t.push_den(num.0, num.1, num.2, num.3);
                let (num2, den2) =
                    omega_factors(p, p, degree.var(p, s), degree.var(p, r), ell).unwrap();
                t.push_num(den2.0, den2.1, den2.2, den2.3);
                t.push_den(num2.0, num2.1, num2.2, num2.3);
            }
        }
    }
    // * prod_r x_{0,r}/x_{p+1,r} * prod_{i != p} prod_r 1/(1 - x_{i+1,r}/x_{i,r})
    for r in 1..=n {
        t.mono = t.mono.mul(&Mono::var(degree.var(0, r)));
        t.mono = t.mono.mul(&Mono::var(degree.var(pp, r)).inv());
        for i in 0..ell {
            if i == p {
                continue;
            }
            let ip = (i + 1) % ell;
            // 1/(1 - x_{i+1,r}/x_{i,r}) = x_{i,r}/(x_{i,r} - x_{i+1,r})
            t.mono = t.mono.mul(&Mono::var(degree.var(i, r)));
            t.push_den(
                Scalar::one(),
                Mono::var(degree.var(i, r)),
                Scalar::one(),
                Mono::var(degree.var(ip, r)),
            );
        }
    }
    ShuffleElement {
        ell,
        degree,
        terms: vec![t],
        pre_symmetrized: false,
    }
}

/// E_{p,n}: spans the bottom piece of the Gordon filtration.
pub fn e_pn(p: u64, n: u64, ell: u64) -> ShuffleElement {
    bottom_element(p, n, ell, true)
}

/// H_{p,n}: spans the bottom piece of the dual Gordon filtration.
pub fn h_pn(p: u64, n: u64, ell: u64) -> ShuffleElement {
    bottom_element(p, n, ell, false)
}

/// The constants relating the bottom elements to the twisted bosonic
/// generators: e~_n(p) = c_pn Psi_-(E_{p,n}), h~_n(p) = c*_pn Psi_-(H_{p,n}).
pub fn constants(p: u64, n: u64, ell: u64) -> (Scalar, Scalar) {
    let _ = p;
    let n_i = n as i64;
    let ell_i = ell as i64;
    let base = &Scalar::qq_pow(-n_i * (n_i - 1) / 2)
        * &(&Scalar::q_pow(-n_i * (ell_i - 1)) * &Scalar::t_pow(n_i));
    let c_star = &base * &Scalar::qq_pow(n_i);
    (base, c_star)
}

// ---------------------------------------------------------------------------
// Wheel and pole validators
// ---------------------------------------------------------------------------

/// Failure witness naming the substitution that did not vanish or the
/// denominator factor that is not of the allowed shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckWitness(pub String);

/// Wheel conditions: for every color i and eps = +-1, substituting
/// x_{i,r1} = qq dd^eps X and x_{i,r2} = qq^{-1} dd^eps X with
/// X = x_{i+eps,s} must annihilate the function. Color symmetry reduces
/// the check to the representative indices r1 = 1, r2 = 2, s = 1.
pub fn wheel_check(f: &ShuffleElement) -> Result<(), CheckWitness> {
    let ell = f.ell;
    for i in 0..ell {
        for eps in [1i64, -1i64] {
            let k_i = f.degree.0[i as usize];
            let target = ((i as i64 + eps).rem_euclid(ell as i64)) as u64;
            if k_i < 2 || f.degree.0[target as usize] < 1 {
                continue;
            }
            let x_ref = f.degree.var(target, 1);
            let v1 = f.degree.var(i, 1);
            let v2 = f.degree.var(i, 2);
            let c1 = &Scalar::qq_pow(1) * &Scalar::dd_pow(eps);
            let c2 = &Scalar::qq_pow(-1) * &Scalar::dd_pow(eps);
            let sum = f.full_expansion();
            let step = sum
                .substitute(v1, &c1, &Mono::var(x_ref))
                .and_then(|s| s.substitute(v2, &c2, &Mono::var(x_ref)));
            match step {
                Err(_) => {
                    return Err(CheckWitness(format!(
                        "wheel substitution (i={}, eps={}) leaves a pole",
                        i, eps
                    )))
                }
                Ok(s) => {
                    if !s.is_zero_function() {
                        return Err(CheckWitness(format!(
                            "wheel substitution (i={}, eps={}) does not vanish",
                            i, eps
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Pole conditions: the symmetrized function times the product of all
/// (x_{i,r} - x_{i+1,s}) is a Laurent polynomial. Factors of any other
/// shape, or excess multiplicity, must divide the expanded numerator.
pub fn pole_check(f: &ShuffleElement) -> Result<(), CheckWitness> {
    let ell = f.ell;
    let (mut numer, den) = f.full_expansion().expand();
    use std::collections::BTreeMap;
    let mut counts: BTreeMap<engine::Factor, usize> = BTreeMap::new();
    for fac in den {
        *counts.entry(fac).or_insert(0) += 1;
    }
    for (fac, count) in counts {
        let allowed = allowed_pole_factor(&fac, &f.degree, ell);
        let excess = if allowed { count.saturating_sub(1) } else { count };
        for _ in 0..excess {
            // divide numer by the factor: linear in the m_hi variable
            let v = fac.m_hi.vars().next().expect("variable factor");
            match numer.divide_by_linear(v, &fac.c_lo, &fac.m_lo) {
                Some(q) => numer = q,
                None => {
                    return Err(CheckWitness(format!(
                        "denominator factor {:?} (multiplicity {}) survives",
                        fac, count
                    )))
                }
            }
        }
    }
    Ok(())
}

fn allowed_pole_factor(fac: &engine::Factor, degree: &DegreeVector, ell: u64) -> bool {
    // allowed: proportional to x_a - x_b with adjacent colors
    if !fac.c_lo.is_one() {
        // also accept coefficient exactly -1? normalization keeps the hi
        // side at 1, so a plain difference has c_lo == 1
        return false;
    }
    let hi: Vec<Var> = fac.m_hi.vars().collect();
    let lo: Vec<Var> = fac.m_lo.vars().collect();
    if hi.len() != 1 || lo.len() != 1 {
        return false;
    }
    if fac.m_hi.exp(hi[0]) != 1 || fac.m_lo.exp(lo[0]) != 1 {
        return false;
    }
    let (ci, _) = locate(degree, hi[0]);
    let (cj, _) = locate(degree, lo[0]);
    (ci + 1) % ell == cj || (cj + 1) % ell == ci
}

// ---------------------------------------------------------------------------
// Limit profiles
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum LimitProfile {
    Zero,
    Finite(RatSum),
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitSide {
    AtZero,
    AtInfinity,
}

/// The limit of F with the first m_i variables of each color scaled by
/// xi, as xi goes to the requested side.
pub fn limit_profile(
    f: &ShuffleElement,
    scaled: &DegreeVector,
    side: LimitSide,
) -> Result<LimitProfile, ShuffleError> {
    assert!(scaled.leq(&f.degree), "interval must fit in the degree");
    if f.degree.total() > DEFAULT_VARIABLE_GUARD {
        return Err(ShuffleError::GuardExceeded {
            vars: f.degree.total(),
            guard: DEFAULT_VARIABLE_GUARD,
        });
    }
    let mut sum = f.full_expansion();
    let xi_exp = match side {
        LimitSide::AtZero => 1,
        LimitSide::AtInfinity => -1,
    };
    for i in 0..f.ell {
        for r in 1..=f.degree.0[i as usize] {
            let v = f.degree.var(i, r);
            let fresh = SCALED_BASE + v;
            let value_mono = if r <= scaled.0[i as usize] {
                Mono::var(fresh).mul(&Mono::var_pow(XI_VAR, xi_exp))
            } else {
                Mono::var(fresh)
            };
            sum = sum.substitute(v, &Scalar::one(), &value_mono)?;
        }
    }
    match sum.substitute(XI_VAR, &Scalar::zero(), &Mono::one()) {
        Err(EngineError::PoleSurvived) => Ok(LimitProfile::Divergent),
        Err(e) => Err(e.into()),
        Ok(s) => {
            if s.is_zero_function() {
                Ok(LimitProfile::Zero)
            } else {
                Ok(LimitProfile::Finite(s))
            }
        }
    }
}

pub fn limits_equal(a: &LimitProfile, b: &LimitProfile) -> bool {
    match (a, b) {
        (LimitProfile::Zero, LimitProfile::Zero) => true,
        (LimitProfile::Divergent, LimitProfile::Divergent) => true,
        (LimitProfile::Finite(x), LimitProfile::Finite(y)) => x
            .add(&y.scale(&Scalar::from_int(-1)))
            .is_zero_function(),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Interval partitions and Gordon evaluations
// ---------------------------------------------------------------------------

/// A partition of a degree vector into integer intervals (a_u; b_u],
/// sorted with lengths weakly decreasing and starts weakly decreasing on
/// ties.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntervalPartition {
    pub parts: Vec<(i64, i64)>,
}

impl IntervalPartition {
    pub fn new(mut parts: Vec<(i64, i64)>) -> IntervalPartition {
        parts.sort_by(|x, y| (y.1 - y.0, y.0).cmp(&(x.1 - x.0, x.0)));
        IntervalPartition { parts }
    }

    /// The short partition: n parts (p; p+ell].
    pub fn short(p: u64, n: u64, ell: u64) -> IntervalPartition {
        IntervalPartition::new(vec![(p as i64, p as i64 + ell as i64); n as usize])
    }

    /// The long partition: one part (p; p + n*ell].
    pub fn long(p: u64, n: u64, ell: u64) -> IntervalPartition {
        IntervalPartition::new(vec![(p as i64, p as i64 + (n * ell) as i64)])
    }

    pub fn degree_vector(&self, ell: u64) -> DegreeVector {
        self.parts
            .iter()
            .fold(DegreeVector::zero(ell), |acc, &(a, b)| {
                acc.add(&interval_vector(a, b, ell))
            })
    }

    pub fn is_even(&self, ell: u64) -> bool {
        self.parts.iter().all(|&(a, b)| (b - a) % ell as i64 == 0)
    }

    /// Strict dominance by part lengths alone: true when the length
    /// sequences first differ with self longer. Partitions with equal
    /// length sequences but different starts are treated as incomparable.
    pub fn dominates_strictly(&self, other: &IntervalPartition) -> bool {
        let la: Vec<i64> = self.parts.iter().map(|&(a, b)| b - a).collect();
        let lb: Vec<i64> = other.parts.iter().map(|&(a, b)| b - a).collect();
        for i in 0..la.len().max(lb.len()) {
            let x = la.get(i).cloned().unwrap_or(0);
            let y = lb.get(i).cloned().unwrap_or(0);
            if x != y {
                return x > y;
            }
        }
        false
    }
}

/// All interval partitions of the given degree vector.
pub fn interval_partitions_of(target: &DegreeVector, ell: u64) -> Vec<IntervalPartition> {
    // candidate intervals: starts 0..ell, lengths 1..total
    let total = target.total() as i64;
    let mut candidates = Vec::new();
    for a in 0..ell as i64 {
        for len in 1..=total {
            let v = interval_vector(a, a + len, ell);
            if v.leq(target) {
                candidates.push((a, a + len));
            }
        }
    }
    // sort matching the canonical part order so the recursion has a
    // canonical non-increasing choice sequence
    candidates.sort_by(|x, y| (y.1 - y.0, y.0).cmp(&(x.1 - x.0, x.0)));
    let mut out = Vec::new();
    fn rec(
        candidates: &[(i64, i64)],
        from: usize,
        remaining: &DegreeVector,
        ell: u64,
        cur: &mut Vec<(i64, i64)>,
        out: &mut Vec<IntervalPartition>,
    ) {
        if remaining.total() == 0 {
            out.push(IntervalPartition::new(cur.clone()));
            return;
        }
        for idx in from..candidates.len() {
            let (a, b) = candidates[idx];
            let v = interval_vector(a, b, ell);
            if !v.leq(remaining) {
                continue;
            }
            let rest = DegreeVector(
                remaining
                    .0
                    .iter()
                    .zip(&v.0)
                    .map(|(x, y)| x - y)
                    .collect(),
            );
            cur.push((a, b));
            rec(candidates, idx, &rest, ell, cur, out);
            cur.pop();
        }
    }
    rec(&candidates, 0, target, ell, &mut Vec::new(), &mut out);
    out
}

/// Assign the variables of f to the slots of L: part u covers the
/// integers (a_u; b_u], and the slot for integer c takes the next unused
/// variable of color c mod ell. Returns per-variable (part index, c).
fn slot_assignment(f: &ShuffleElement, l: &IntervalPartition) -> Vec<(Var, usize, i64)> {
    let ell = f.ell;
    let mut next_r = vec![1u64; ell as usize];
    let mut out = Vec::new();
    for (u, &(a, b)) in l.parts.iter().enumerate() {
        for c in a + 1..=b {
            let color = c.rem_euclid(ell as i64) as u64;
            let r = next_r[color as usize];
            next_r[color as usize] += 1;
            out.push((f.degree.var(color, r), u, c));
        }
    }
    out
}

/// The Gordon evaluation map phi_L: specialize the part-u variables to
/// q^{-c} y_u for c in (a_u; b_u]. Returns a rational expression in the
/// y_u (engine variables Y_BASE + u).
pub fn phi_l(f: &ShuffleElement, l: &IntervalPartition) -> Result<RatSum, ShuffleError> {
    assert_eq!(l.degree_vector(f.ell), f.degree, "L must partition the degree");
    let mut sum = f.full_expansion();
    for (v, u, c) in slot_assignment(f, l) {
        sum = sum.substitute(v, &Scalar::q_pow(-c), &Mono::var(Y_BASE + u as Var))?;
    }
    Ok(sum)
}

/// The dual evaluation map: part-u variables go to t^{c} y_u.
pub fn phi_l_star(f: &ShuffleElement, l: &IntervalPartition) -> Result<RatSum, ShuffleError> {
    assert_eq!(l.degree_vector(f.ell), f.degree, "L must partition the degree");
    let mut sum = f.full_expansion();
    for (v, u, c) in slot_assignment(f, l) {
        sum = sum.substitute(v, &Scalar::t_pow(c), &Mono::var(Y_BASE + u as Var))?;
    }
    Ok(sum)
}

/// The snake specialization of phi_L: y_k = q^{n_k ell} and
/// y_u = q^{n_u ell} t^{-1} y_{u+1}, solved explicitly.
pub fn rho_l(f: &ShuffleElement, l: &IntervalPartition) -> Result<Scalar, ShuffleError> {
    if !l.is_even(f.ell) {
        return Err(ShuffleError::NotEven);
    }
    let mut sum = phi_l(f, l)?;
    let k = l.parts.len();
    let lens: Vec<i64> = l.parts.iter().map(|&(a, b)| b - a).collect();
    for u in 0..k {
        // y_u = q^{sum_{v>=u} n_v ell} t^{-(k-1-u)}
        let qexp: i64 = lens[u..].iter().sum();
        let texp = -((k - 1 - u) as i64);
        let value = &Scalar::q_pow(0) * &(&Scalar::sw(2 * qexp, 0) * &Scalar::t_pow(texp));
        sum = sum.substitute(Y_BASE + u as Var, &value, &Mono::one())?;
    }
    Ok(sum.to_scalar().map_err(ShuffleError::Engine)?)
}

/// The dual snake: y_k = 1 and y_u = q^{-1} t^{n_{u+1} ell} y_{u+1}.
pub fn rho_l_star(f: &ShuffleElement, l: &IntervalPartition) -> Result<Scalar, ShuffleError> {
    if !l.is_even(f.ell) {
        return Err(ShuffleError::NotEven);
    }
    let mut sum = phi_l_star(f, l)?;
    let k = l.parts.len();
    let lens: Vec<i64> = l.parts.iter().map(|&(a, b)| b - a).collect();
    for u in 0..k {
        // y_u = q^{-(k-1-u)} t^{sum_{v>u} n_v ell}
        let texp: i64 = lens[u + 1..].iter().sum();
        let qexp = -((k - 1 - u) as i64);
        let value = &Scalar::q_pow(qexp) * &Scalar::sw(0, 2 * texp);
        sum = sum.substitute(Y_BASE + u as Var, &value, &Mono::one())?;
    }
    Ok(sum.to_scalar().map_err(ShuffleError::Engine)?)
}

// ---------------------------------------------------------------------------
// Long-evaluation pairings
// ---------------------------------------------------------------------------

/// <R_{p,n}, F> for F of degree n*delta: evaluate x_a -> q^{-a} over
/// p < a <= p + n*ell and divide by the displayed mixing product.
pub fn pairing_r(f: &ShuffleElement, p: u64, n: u64) -> Result<Scalar, ShuffleError> {
    let ell = f.ell;
    if f.degree != DegreeVector::diagonal(n, ell) {
        return Err(ShuffleError::DegreeMismatch);
    }
    let l = IntervalPartition::long(p, n, ell);
    let mut sum = f.full_expansion();
    for (v, _, c) in slot_assignment(f, &l) {
        sum = sum.substitute(v, &Scalar::q_pow(-c), &Mono::one())?;
    }
    let value = sum.to_scalar().map_err(ShuffleError::Engine)?;
    let lo = p as i64;
    let hi = p as i64 + (n * ell) as i64;
    let mut denom = Scalar::one();
    for a in lo + 1..=hi {
        for b in a + 1..=hi {
            let (ci, cj) = (
                a.rem_euclid(ell as i64) as u64,
                b.rem_euclid(ell as i64) as u64,
            );
            denom = &denom * &omega_scalar(ci, cj, &Scalar::q_pow(b - a), ell);
        }
    }
    let sign = if (n * ell) % 2 == 0 { 1 } else { -1 };
    Ok(&(&Scalar::from_int(sign) * &value) / &denom)
}

/// <R*_{p,n}, F>: evaluate x_a -> t^{a} and divide by the reversed
/// mixing product, with the qq^{-n ell} prefactor.
pub fn pairing_r_star(f: &ShuffleElement, p: u64, n: u64) -> Result<Scalar, ShuffleError> {
    let ell = f.ell;
    if f.degree != DegreeVector::diagonal(n, ell) {
        return Err(ShuffleError::DegreeMismatch);
    }
    let l = IntervalPartition::long(p, n, ell);
    let mut sum = f.full_expansion();
    for (v, _, c) in slot_assignment(f, &l) {
        sum = sum.substitute(v, &Scalar::t_pow(c), &Mono::one())?;
    }
    let value = sum.to_scalar().map_err(ShuffleError::Engine)?;
    let lo = p as i64;
    let hi = p as i64 + (n * ell) as i64;
    let mut denom = Scalar::one();
    for a in lo + 1..=hi {
        for b in a + 1..=hi {
            let (ci, cj) = (
                a.rem_euclid(ell as i64) as u64,
                b.rem_euclid(ell as i64) as u64,
            );
            denom = &denom * &omega_scalar(cj, ci, &Scalar::t_pow(b - a), ell);
        }
    }
    Ok(&(&Scalar::qq_pow(-((n * ell) as i64)) * &value) / &denom)
}

/// Pairing against a star product of long duals,
/// <R_{p_k,n_k} * ... * R_{p_1,n_1}, F>, by the iterated-limit formula:
/// apply phi_L to F divided by the within-part mixing products, then read
/// the ladder limit y_u -> 0 with |y_u| << |y_{u+1}| via y_u = eps^{k-u+1}.
pub fn dual_product_pairing(
    f: &ShuffleElement,
    parts: &[(u64, u64)],
    dual: bool,
) -> Result<Scalar, ShuffleError> {
    let ell = f.ell;
    let l = IntervalPartition::new(
        parts
            .iter()
            .map(|&(p, n)| (p as i64, p as i64 + (n * ell) as i64))
            .collect(),
    );
    if l.degree_vector(ell) != f.degree {
        return Err(ShuffleError::DegreeMismatch);
    }
    let n_total: u64 = parts.iter().map(|&(_, n)| n).sum();
    let k = l.parts.len();
    let assignment = slot_assignment(f, &l);
    // divide by the within-part mixing products
    let mut terms = f.full_expansion().terms;
    for t in terms.iter_mut() {
        for (u, _) in l.parts.iter().enumerate() {
            let slots: Vec<(Var, i64)> = assignment
                .iter()
                .filter(|(_, uu, _)| *uu == u)
                .map(|(v, _, c)| (*v, *c))
                .collect();
            for a in 0..slots.len() {
                for b in a + 1..slots.len() {
                    // slots are listed in increasing c order
                    let (va, ca) = slots[a];
                    let (vb, cb) = slots[b];
                    debug_assert!(ca < cb);
                    let (ci, cj) = (
                        ca.rem_euclid(ell as i64) as u64,
                        cb.rem_euclid(ell as i64) as u64,
                    );
                    let pair = if dual {
                        omega_factors(cj, ci, vb, va, ell)
                    } else {
                        omega_factors(ci, cj, va, vb, ell)
                    };
                    if let Some((num, den)) = pair {
                        t.push_num(den.0, den.1, den.2, den.3);
                        t.push_den(num.0, num.1, num.2, num.3);
                    }
                }
            }
        }
    }
    let mut sum = RatSum::from_terms(terms);
    for (v, u, c) in &assignment {
        let value = if dual {
            Scalar::t_pow(*c)
        } else {
            Scalar::q_pow(-c)
        };
        sum = sum.substitute(*v, &value, &Mono::var(Y_BASE + *u as Var))?;
    }
    // ladder: straight wants |y_u| << |y_{u+1}|, dual the reverse
    for u in 0..k {
        let exp = if dual { u as i64 + 1 } else { (k - u) as i64 };
        sum = sum.substitute(Y_BASE + u as Var, &Scalar::one(), &Mono::var_pow(EPS_VAR, exp))?;
    }
    let sum = sum.substitute(EPS_VAR, &Scalar::zero(), &Mono::one())?;
    let value = sum.to_scalar().map_err(ShuffleError::Engine)?;
    let pair_weight: u64 = {
        let mut acc = 0u64;
        for u in 0..parts.len() {
            for v in 0..u {
                acc += parts[u].1 * parts[v].1;
            }
        }
        acc
    };
    let dd = Scalar::dd_pow((ell * pair_weight) as i64);
    let front = if dual {
        &Scalar::qq_pow(-((n_total * ell) as i64)) * &dd
    } else {
        let sign = if (n_total * ell) % 2 == 0 { 1 } else { -1 };
        &Scalar::from_int(sign) * &dd
    };
    Ok(&front * &value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_displayed_cases() {
        // same color: (z - qq^{-2})/(z - 1)
        let z = Scalar::q();
        let got = omega_scalar(1, 1, &z, 5);
        let expect = &(&z - &Scalar::qq_pow(-2)) / &(&z - &Scalar::one());
        assert_eq!(got, expect);
        // i+1 = j: (dd^{-1} z - qq)/(z - 1)
        let got = omega_scalar(1, 2, &z, 5);
        let expect =
            &(&(&Scalar::dd_pow(-1) * &z) - &Scalar::qq_pow(1)) / &(&z - &Scalar::one());
        assert_eq!(got, expect);
        // non-adjacent: 1
        assert!(omega_scalar(0, 2, &z, 5).is_one());
        assert!(omega_factors(0, 2, 0, 1, 5).is_none());
    }

    #[test]
    fn shuffle_product_nonadjacent_ones() {
        // constants in single variables of distinct non-adjacent colors
        // multiply to 1 (all omegas are 1, symmetrization trivial)
        let ell = 5;
        let a = ShuffleElement::monomial(ell, 0, 0);
        let b = ShuffleElement::monomial(ell, 2, 0);
        let prod = shuffle_product(&a, &b).unwrap();
        let one = {
            let mut d = DegreeVector::zero(ell);
            d.0[0] = 1;
            d.0[2] = 1;
            ShuffleElement {
                ell,
                degree: d,
                terms: vec![RatTerm::one()],
                pre_symmetrized: true,
            }
        };
        assert!(prod.equal_as_functions(&one).unwrap());
    }

    #[test]
    fn shuffle_product_same_color_ones() {
        // 1 * 1 in one color-i variable each: the two-term hand
        // symmetrization of omega_{i,i} sums to 1 + qq^{-2}
        let ell = 3;
        let a = ShuffleElement::monomial(ell, 0, 0);
        let prod = shuffle_product(&a, &a).unwrap();
        let expect = {
            let mut d = DegreeVector::zero(ell);
            d.0[0] = 2;
            ShuffleElement {
                ell,
                degree: d,
                terms: vec![RatTerm::constant(
                    &Scalar::one() + &Scalar::qq_pow(-2),
                )],
                pre_symmetrized: true,
            }
        };
        assert!(prod.equal_as_functions(&expect).unwrap());
    }

    #[test]
    fn degree_bookkeeping_in_products() {
        let ell = 3;
        let a = ShuffleElement::monomial(ell, 1, 0);
        let b = ShuffleElement::monomial(ell, 1, 1);
        let ab = shuffle_product(&a, &b).unwrap();
        let ba = shuffle_product(&b, &a).unwrap();
        assert_eq!(ab.degree.0, vec![0, 2, 0]);
        assert_eq!(ba.degree.0, vec![0, 2, 0]);
        let guard_hit = shuffle_product_with_guard(&f_pn(0, 1, 3), &f_pn(0, 2, 3), 8);
        assert!(matches!(guard_hit, Err(ShuffleError::GuardExceeded { .. })));
    }

    #[test]
    fn f_pn_basics() {
        let f0 = f_pn(0, 0, 3);
        assert_eq!(f0.degree.total(), 0);
        let f1 = f_pn(1, 1, 3);
        assert_eq!(f1.degree.0, vec![1, 1, 1]);
        // front constant at n=1: -qq^{l-1} (qq - qq^{-1})^l / dd^l
        let bracket = &Scalar::qq_pow(1) - &Scalar::qq_pow(-1);
        let expect = &(&(-&Scalar::qq_pow(2)) * &bracket.pow(3)) * &Scalar::dd_pow(-3);
        assert_eq!(f1.terms[0].coeff.to_scalar(), expect);
    }

    #[test]
    fn wheel_and_pole_for_f_p1() {
        for p in 0..3 {
            let f = f_pn(p, 1, 3);
            wheel_check(&f).unwrap();
            pole_check(&f).unwrap();
        }
    }

    #[test]
    fn e_h_reduce_to_f_combinations_at_n1() {
        // E_{p,1} = qq^{1-l} dd^l (qq-qq^{-1})^{-1} (F_{p,1} - q^{-1} F_{p+1,1})
        // H_{p,1} = qq^{1-l} dd^l (qq-qq^{-1})^{-1} (qq F_{p,1} - dd^{-1} F_{p+1,1})
        let ell = 3u64;
        let bracket = &Scalar::qq_pow(1) - &Scalar::qq_pow(-1);
        let front = &(&Scalar::qq_pow(1 - ell as i64) * &Scalar::dd_pow(ell as i64))
            / &bracket;
        for p in 0..ell {
            let pp = (p + 1) % ell;
            let e = e_pn(p, 1, ell);
            let combo = f_pn(p, 1, ell)
                .scale(&front)
                .add(&f_pn(pp, 1, ell).scale(&(-&(&front * &Scalar::q_pow(-1)))))
                .unwrap();
            assert!(e.equal_as_functions(&combo).unwrap(), "E identity at p={}", p);

            let h = h_pn(p, 1, ell);
            let combo_h = f_pn(p, 1, ell)
                .scale(&(&front * &Scalar::qq_pow(1)))
                .add(&f_pn(pp, 1, ell).scale(&(-&(&front * &Scalar::dd_pow(-1)))))
                .unwrap();
            assert!(h.equal_as_functions(&combo_h).unwrap(), "H identity at p={}", p);
        }
    }

    #[test]
    fn interval_partitions_enumeration() {
        // partitions of 1*delta at ell=3: three single intervals of
        // length 3 (even) plus ones δbuilt from shorter intervals
        let target = DegreeVector::diagonal(1, 3);
        let parts = interval_partitions_of(&target, 3);
        assert!(parts.iter().any(|l| l.parts == vec![(0, 3)]));
        assert!(parts.iter().any(|l| l.parts == vec![(1, 4)]));
        assert!(parts.iter().any(|l| l.parts == vec![(2, 5)]));
        let evens: Vec<_> = parts.iter().filter(|l| l.is_even(3)).collect();
        assert_eq!(evens.len(), 3);
        // dominance: the long partition of 2delta dominates the short
        let long = IntervalPartition::long(0, 2, 3);
        let short = IntervalPartition::short(0, 2, 3);
        assert!(long.dominates_strictly(&short));
        assert!(!short.dominates_strictly(&long));
        // equal lengths, different starts: incomparable
        let a = IntervalPartition::short(0, 2, 3);
        let b = IntervalPartition::new(vec![(0, 3), (1, 4)]);
        assert!(!a.dominates_strictly(&b) && !b.dominates_strictly(&a));
    }

    #[test]
    fn constants_at_n1() {
        let (c, cs) = constants(0, 1, 3);
        assert_eq!(c, &Scalar::q_pow(-2) * &Scalar::t());
        assert_eq!(cs, &Scalar::qq_pow(1) * &(&Scalar::q_pow(-2) * &Scalar::t()));
        let (c0, cs0) = constants(1, 0, 3);
        assert!(c0.is_one() && cs0.is_one());
    }
}
