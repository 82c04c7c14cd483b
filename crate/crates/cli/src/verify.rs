//! Verification suites: per-module property checks and the desk-scale
//! cross-check of the diagonalization statement, comparing bosonic
//! multiplication matrices in the Macdonald basis against fermionic
//! shuffle-operator matrices in the dual Fock basis up to a global
//! diagonal rescaling.

use std::collections::BTreeMap;
use std::time::Instant;
use wmac_core::fock::{self, FockVector};
use wmac_core::macdonald::{self, BosonicKind, MacdonaldTable};
use wmac_core::partitions::{
    self, column_order, combine, core_quotient, dominance_leq, from_maya, partitions_of,
    replay_column_order, row_order, to_maya, Partition,
};
use wmac_core::scalars::{Scalar, XorShift};
use wmac_core::shuffle::{
    constants, dual_product_pairing, e_pn, f_pn, h_pn, interval_partitions_of, limit_profile,
    limits_equal, pairing_r, pairing_r_star, pole_check, rho_l, rho_l_star,
    shuffle_product_with_guard, wheel_check, DegreeVector, IntervalPartition, LimitProfile,
    LimitSide, ShuffleElement,
};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub id: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub suite: String,
    pub ell: u64,
    pub size_bound: u64,
    pub checks: Vec<CheckResult>,
    pub wall_ms: u128,
}

impl VerifyReport {
    fn new(suite: &str, ell: u64, size_bound: u64) -> VerifyReport {
        VerifyReport {
            suite: suite.to_string(),
            ell,
            size_bound,
            checks: Vec::new(),
            wall_ms: 0,
        }
    }

    fn push(&mut self, id: &str, witness: Option<String>) {
        self.checks.push(CheckResult {
            id: id.to_string(),
            passed: witness.is_none(),
            witness,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn merge(&mut self, other: VerifyReport) {
        self.checks.extend(other.checks);
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "suite": self.suite,
            "ell": self.ell,
            "size_bound": self.size_bound,
            "wall_ms": self.wall_ms,
            "passed": self.all_passed(),
            "checks": self.checks.iter().map(|c| serde_json::json!({
                "id": c.id,
                "status": if c.passed { "pass" } else { "fail" },
                "witness": c.witness,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn print_lines(&self) {
        for c in &self.checks {
            if c.passed {
                eprintln!("PASS {}", c.id);
            } else {
                eprintln!(
                    "FAIL {}: {}",
                    c.id,
                    c.witness.as_deref().unwrap_or("unknown")
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Combinatorics suite
// ---------------------------------------------------------------------------

pub fn suite_combinatorics(ell: u64, max_size: u64) -> VerifyReport {
    let start = Instant::now();
    let mut report = VerifyReport::new("combinatorics", ell, max_size);
    report.push("maya-round-trips", maya_round_trips(max_size));
    report.push(
        "core-quotient-round-trips",
        core_quotient_round_trips(max_size),
    );
    report.push("figure-anchors", figure_anchors());
    report.push(
        "strip-order-replays",
        strip_order_replays(ell, max_size.min(9)),
    );
    report.push(
        "triangularity-lemma-columns",
        triangle_columns(ell, max_size.min(9)),
    );
    report.push(
        "triangularity-lemma-rows",
        triangle_rows(ell, max_size.min(9)),
    );
    report.wall_ms = start.elapsed().as_millis();
    report
}

pub fn maya_round_trips(max_size: u64) -> Option<String> {
    for n in 0..=max_size {
        for lam in partitions_of(n) {
            match from_maya(&to_maya(&lam)) {
                Ok(back) if back == lam => {}
                other => return Some(format!("{:?} -> {:?}", lam, other)),
            }
        }
    }
    None
}

pub fn core_quotient_round_trips(max_size: u64) -> Option<String> {
    for ell in 1..=5u64 {
        for n in 0..=max_size {
            for lam in partitions_of(n) {
                let (core, _, quot) = core_quotient(&lam, ell);
                if !core.is_core(ell) {
                    return Some(format!("core of {:?} at ell={} contains a strip", lam, ell));
                }
                let qsize: u64 = quot.iter().map(|q| q.size()).sum();
                if lam.size() != core.size() + ell * qsize {
                    return Some(format!("size law fails for {:?} at ell={}", lam, ell));
                }
                match combine(&core, &quot, ell) {
                    Ok(back) if back == lam => {}
                    other => return Some(format!("{:?} at ell={} -> {:?}", lam, ell, other)),
                }
            }
        }
    }
    None
}

pub fn figure_anchors() -> Option<String> {
    let lam = Partition::new(vec![4, 4, 2]);
    let (core, _, quot) = core_quotient(&lam, 3);
    if core != Partition::new(vec![3, 1]) {
        return Some(format!("core of (4,4,2) = {:?}", core));
    }
    if quot.iter().map(|q| q.size()).sum::<u64>() != 2 {
        return Some("quotient of (4,4,2) has wrong size".into());
    }
    let lam2 = Partition::new(vec![4, 4, 2, 2, 2, 2]);
    let (core2, _, quot2) = core_quotient(&lam2, 3);
    if core2 != Partition::new(vec![3, 1]) {
        return Some(format!("core of (4,4,2,2,2,2) = {:?}", core2));
    }
    let expect = vec![
        Partition::empty(),
        Partition::new(vec![1]),
        Partition::new(vec![2, 1]),
    ];
    if quot2 != expect {
        return Some(format!("quotient of (4,4,2,2,2,2) = {:?}", quot2));
    }
    None
}

fn strip_order_replays(ell: u64, max_size: u64) -> Option<String> {
    for n in 0..=max_size {
        for lam in partitions_of(n) {
            let steps = match column_order(&lam, ell) {
                Ok(s) => s,
                Err(e) => return Some(format!("column order of {:?}: {}", lam, e)),
            };
            match replay_column_order(&lam, ell, &steps) {
                Ok(partials) => {
                    let last = partials
                        .last()
                        .cloned()
                        .unwrap_or_else(|| core_quotient(&lam, ell).0);
                    if last != lam {
                        return Some(format!("column replay of {:?} missed", lam));
                    }
                }
                Err(e) => return Some(format!("column replay of {:?}: {}", lam, e)),
            }
            if let Err(e) = row_order(&lam, ell) {
                return Some(format!("row order of {:?}: {}", lam, e));
            }
        }
    }
    None
}

fn added_nodes(lam: &Partition, mu: &Partition) -> Vec<partitions::Node> {
    mu.nodes()
        .into_iter()
        .filter(|n| n.a > lam.part(n.b as usize) as i64)
        .collect()
}

fn has_horizontal_adjacency(cells: &[partitions::Node], p: u64, ell: u64) -> bool {
    // an added (p+1)-node with an added p-node immediately to its right
    cells.iter().any(|x| {
        x.color(ell) == (p + 1) % ell
            && cells
                .iter()
                .any(|y| y.b == x.b && y.a == x.a + 1 && y.color(ell) == p)
    })
}

fn has_vertical_adjacency(cells: &[partitions::Node], p: u64, ell: u64) -> bool {
    // an added p-node with an added (p+1)-node immediately above it
    cells.iter().any(|x| {
        x.color(ell) == p
            && cells
                .iter()
                .any(|y| y.a == x.a && y.b == x.b + 1 && y.color(ell) == (p + 1) % ell)
    })
}

/// Members of the cell of lam comparable to lam on the requested side.
fn cell_neighbors(lam: &Partition, ell: u64, below: bool) -> Vec<Partition> {
    let (_, charges, quot) = core_quotient(lam, ell);
    let n: u64 = quot.iter().map(|q| q.size()).sum();
    let cell = macdonald::enumerate_cell(&charges, n, ell).expect("charges sum to zero");
    cell.members
        .into_iter()
        .filter(|mu| {
            if below {
                dominance_leq(mu, lam)
            } else {
                dominance_leq(lam, mu)
            }
        })
        .collect()
}

/// Column triangularity: let lam be obtained from lam' by the final
/// column addition in the left-to-right order (an n*ell strip whose
/// initial node has color p). For every mu' <= lam' in the cell and
/// every way of adding n nodes of each color to mu' with no added
/// horizontally adjacent p/(p+1) pair, the result is not strictly above
/// lam.
pub fn triangle_columns(ell: u64, max_size: u64) -> Option<String> {
    for size in 1..=max_size {
        for lam in partitions_of(size) {
            let steps = match column_order(&lam, ell) {
                Ok(s) if !s.is_empty() => s,
                _ => continue,
            };
            let partials = replay_column_order(&lam, ell, &steps).expect("replay");
            let lam_prev = if steps.len() >= 2 {
                partials[steps.len() - 2].clone()
            } else {
                core_quotient(&lam, ell).0
            };
            let last = steps.last().unwrap();
            let (p, n) = (last.component, last.length);
            let counts = vec![n; ell as usize];
            for mu_prev in cell_neighbors(&lam_prev, ell, true) {
                for mu in fock::additions(&mu_prev, &counts, ell) {
                    let cells = added_nodes(&mu_prev, &mu);
                    if has_horizontal_adjacency(&cells, p, ell) {
                        continue;
                    }
                    if mu != lam && dominance_leq(&lam, &mu) {
                        return Some(format!(
                            "lam={:?} lam'={:?} mu'={:?} mu={:?} (p={}, n={})",
                            lam, lam_prev, mu_prev, mu, p, n
                        ));
                    }
                }
            }
        }
    }
    None
}

/// Row triangularity, the mirror statement: lam from lam'' by the final
/// row addition in the right-to-left order; additions to mu'' >= lam''
/// avoiding vertical p/(p+1) adjacency cannot land strictly below lam.
pub fn triangle_rows(ell: u64, max_size: u64) -> Option<String> {
    for size in 1..=max_size {
        for lam in partitions_of(size) {
            let steps = match row_order(&lam, ell) {
                Ok(s) if !s.is_empty() => s,
                _ => continue,
            };
            let last = *steps.last().unwrap();
            let (p, m) = (last.component, last.length);
            // lam'' = lam with one row of that length removed from the
            // quotient component
            let (core, _, mut quot) = core_quotient(&lam, ell);
            let comp = &mut quot[p as usize];
            let mut parts = comp.parts().to_vec();
            let pos = parts.iter().position(|&x| x == m).expect("row exists");
            parts.remove(pos);
            *comp = Partition::new(parts);
            let lam_prev = combine(&core, &quot, ell).expect("core stays a core");
            let counts = vec![m; ell as usize];
            for mu_prev in cell_neighbors(&lam_prev, ell, false) {
                for mu in fock::additions(&mu_prev, &counts, ell) {
                    let cells = added_nodes(&mu_prev, &mu);
                    if has_vertical_adjacency(&cells, p, ell) {
                        continue;
                    }
                    if mu != lam && dominance_leq(&mu, &lam) {
                        return Some(format!(
                            "lam={:?} lam''={:?} mu''={:?} mu={:?} (p*={}, m={})",
                            lam, lam_prev, mu_prev, mu, p, m
                        ));
                    }
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Macdonald suite
// ---------------------------------------------------------------------------

/// Charge vectors of squared norm at most the bound, summing to zero.
pub fn charge_vectors(ell: u64, max_norm_sq: i64) -> Vec<Vec<i64>> {
    fn rec(ell: usize, max_norm_sq: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == ell {
            if cur.iter().sum::<i64>() == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let used: i64 = cur.iter().map(|c| c * c).sum();
        let mut bound = 0i64;
        while (bound + 1) * (bound + 1) + used <= max_norm_sq {
            bound += 1;
        }
        for c in -bound..=bound {
            cur.push(c);
            rec(ell, max_norm_sq, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(ell as usize, max_norm_sq, &mut Vec::new(), &mut out);
    out.sort();
    out
}

pub fn suite_macdonald(ell: u64, max_norm_sq: i64, max_n: u64, seed: Option<u64>) -> VerifyReport {
    let start = Instant::now();
    let mut report = VerifyReport::new("macdonald", ell, max_n);
    for charges in charge_vectors(ell, max_norm_sq) {
        for n in 0..=max_n {
            let id = format!("cell-core{:?}-n{}", charges, n);
            report.push(&id, check_cell(ell, &charges, n, seed));
        }
    }
    report.wall_ms = start.elapsed().as_millis();
    report
}

/// Existence/uniqueness plus the normalization and triangularity
/// rechecks for one cell.
pub fn check_cell(ell: u64, charges: &[i64], n: u64, seed: Option<u64>) -> Option<String> {
    let cell = match macdonald::enumerate_cell(charges, n, ell) {
        Ok(c) => c,
        Err(e) => return Some(e.to_string()),
    };
    let table = match macdonald::solve_cell(
        &cell,
        macdonald::SolveOptions {
            precheck_seed: seed.or(Some(1)),
        },
    ) {
        Ok(t) => t,
        Err(e) => return Some(e.to_string()),
    };
    for lam in &cell.members {
        let h = &table.polynomials[lam];
        match h.trivial_coefficient(n) {
            Ok(c) if c.is_one() => {}
            other => return Some(format!("trivial coefficient of {:?}: {:?}", lam, other)),
        }
        // triangularity recheck in both twisted bases
        let up = match h.convert(wmac_core::symfunc::Basis::HHat) {
            Ok(u) => u,
            Err(e) => return Some(e.to_string()),
        };
        for key in up.terms.keys() {
            let mu = combine(&cell.core, &key.components, ell).expect("core");
            if !dominance_leq(lam, &mu) {
                return Some(format!("hhat support of {:?} leaks below: {:?}", lam, mu));
            }
        }
        let down = match h.convert(wmac_core::symfunc::Basis::EHat) {
            Ok(d) => d,
            Err(e) => return Some(e.to_string()),
        };
        for key in down.terms.keys() {
            let mu = combine(&cell.core, &key.components, ell).expect("core");
            if !dominance_leq(&mu, lam) {
                return Some(format!("ehat support of {:?} leaks above: {:?}", lam, mu));
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Shuffle suite
// ---------------------------------------------------------------------------

fn fp_closed_form(p: u64, p_prime: u64, n: u64, ell: u64) -> Scalar {
    // prod_{r=1}^n (1 - qq^{-2} q^{(r-1) ell}) / (1 - q^{r ell}) * q^{n f_p(p')}
    let mut acc = Scalar::one();
    for r in 1..=n as i64 {
        let num = &Scalar::one() - &(&Scalar::qq_pow(-2) * &Scalar::q_pow((r - 1) * ell as i64));
        let den = &Scalar::one() - &Scalar::q_pow(r * ell as i64);
        acc = &acc * &(&num / &den);
    }
    let f = if p_prime <= p {
        p_prime as i64
    } else {
        p_prime as i64 - ell as i64
    };
    &acc * &Scalar::q_pow(n as i64 * f)
}

fn fp_closed_form_dual(p: u64, p_prime: u64, n: u64, ell: u64) -> Scalar {
    // prod_{r=1}^n (qq^{-2} - t^{-(r-1) ell}) / (1 - t^{-r ell}) * t^{-n f_p(p')}
    let mut acc = Scalar::one();
    for r in 1..=n as i64 {
        let num = &Scalar::qq_pow(-2) - &Scalar::t_pow(-(r - 1) * ell as i64);
        let den = &Scalar::one() - &Scalar::t_pow(-r * ell as i64);
        acc = &acc * &(&num / &den);
    }
    let f = if p_prime <= p {
        p_prime as i64
    } else {
        p_prime as i64 - ell as i64
    };
    &acc * &Scalar::t_pow(-(n as i64) * f)
}

pub fn suite_shuffle(ell: u64, max_n: u64, seed: u64) -> VerifyReport {
    let mut report = suite_shuffle_identities(ell, max_n, seed);
    report.merge(suite_pairings(ell, max_n));
    report
}

/// Wheel/pole validity, limit profiles, the bottom-element identities,
/// and star-product associativity.
pub fn suite_shuffle_identities(ell: u64, max_n: u64, seed: u64) -> VerifyReport {
    let start = Instant::now();
    let mut report = VerifyReport::new("shuffle", ell, max_n);
    report.push("wheel-pole", wheel_pole_checks(ell, max_n));
    report.push("wheel-negative-control", wheel_negative_control(ell));
    report.push("limit-profiles", limit_profile_checks(ell, max_n));
    report.push("bottom-identities-n1", bottom_identities_n1(ell));
    report.push("associativity", associativity_checks(ell, seed));
    report.wall_ms = start.elapsed().as_millis();
    report
}

/// Long-dual pairing closed forms, group-likeness, filtration
/// vanishing, and the snake/pairing cross oracle.
pub fn suite_pairings(ell: u64, max_n: u64) -> VerifyReport {
    let start = Instant::now();
    let mut report = VerifyReport::new("pairings", ell, max_n);
    report.push("pairing-closed-form", pairing_closed_form(ell, max_n));
    report.push("group-like-pairing", group_like_pairing(ell));
    report.push("bottom-filtration", bottom_filtration(ell, max_n));
    report.push("dual-product-pairings", dual_product_checks(ell, max_n));
    report.push("rho-pairing-cross-oracle", rho_pairing_cross_oracle(ell));
    report.wall_ms = start.elapsed().as_millis();
    report
}

fn wheel_pole_checks(ell: u64, max_n: u64) -> Option<String> {
    for p in 0..ell {
        for n in 1..=max_n {
            for (name, f) in [
                ("F", f_pn(p, n, ell)),
                ("E", e_pn(p, n, ell)),
                ("H", h_pn(p, n, ell)),
            ] {
                if let Err(w) = wheel_check(&f) {
                    return Some(format!("wheel {}_{{{},{}}}: {}", name, p, n, w.0));
                }
                if let Err(w) = pole_check(&f) {
                    return Some(format!("pole {}_{{{},{}}}: {}", name, p, n, w.0));
                }
            }
        }
    }
    None
}

fn wheel_negative_control(ell: u64) -> Option<String> {
    // perturb one exponent in F_{0,2}: the wheel check must fail
    let f = f_pn(0, 2, ell);
    let mut bad = f.clone();
    let mut t = bad.terms[0].clone();
    // multiply the monomial by an extra power of one variable
    t.mono = t.mono.mul(&wmac_core::shuffle::engine::Mono::var(0));
    bad.terms = vec![t];
    match wheel_check(&bad) {
        Err(_) => None,
        Ok(()) => Some("corrupted F_{0,2} passes the wheel check".into()),
    }
}

fn all_intervals_leq(target: &DegreeVector, ell: u64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for a in 0..ell as i64 {
        for len in 1..=target.total() as i64 {
            let v = wmac_core::shuffle::interval_vector(a, a + len, ell);
            if v.leq(target) {
                out.push((a, a + len));
            }
        }
    }
    out
}

fn limit_profile_checks(ell: u64, max_n: u64) -> Option<String> {
    for p in 0..ell {
        for n in 1..=max_n {
            let elems = [
                ("F", f_pn(p, n, ell), true),
                ("E", e_pn(p, n, ell), false),
                ("H", h_pn(p, n, ell), false),
            ];
            for (name, f, both_sides_vanish) in elems {
                for (a, b) in all_intervals_leq(&f.degree, ell) {
                    let v = wmac_core::shuffle::interval_vector(a, b, ell);
                    let at0 = match limit_profile(&f, &v, LimitSide::AtZero) {
                        Ok(x) => x,
                        Err(e) => return Some(format!("{}_{{{},{}}} limit: {}", name, p, n, e)),
                    };
                    if v.is_diagonal() {
                        let at_inf = match limit_profile(&f, &v, LimitSide::AtInfinity) {
                            Ok(x) => x,
                            Err(e) => {
                                return Some(format!("{}_{{{},{}}} limit: {}", name, p, n, e))
                            }
                        };
                        if matches!(at0, LimitProfile::Divergent)
                            || matches!(at_inf, LimitProfile::Divergent)
                            || !limits_equal(&at0, &at_inf)
                        {
                            return Some(format!(
                                "{}_{{{},{}}} diagonal interval ({};{}] limits differ",
                                name, p, n, a, b
                            ));
                        }
                    } else {
                        if !matches!(at0, LimitProfile::Zero) {
                            return Some(format!(
                                "{}_{{{},{}}} off-diagonal interval ({};{}] limit at 0 not zero",
                                name, p, n, a, b
                            ));
                        }
                        if both_sides_vanish {
                            match limit_profile(&f, &v, LimitSide::AtInfinity) {
                                Ok(LimitProfile::Zero) => {}
                                other => {
                                    return Some(format!(
                                        "{}_{{{},{}}} off-diagonal interval ({};{}] limit at infinity: {:?}",
                                        name, p, n, a, b, other.map(|x| format!("{:?}", x)).unwrap_or_else(|e| e.to_string())
                                    ))
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

fn bottom_identities_n1(ell: u64) -> Option<String> {
    let bracket = &Scalar::qq_pow(1) - &Scalar::qq_pow(-1);
    let front = &(&Scalar::qq_pow(1 - ell as i64) * &Scalar::dd_pow(ell as i64)) / &bracket;
    for p in 0..ell {
        let pp = (p + 1) % ell;
        let e = e_pn(p, 1, ell);
        let combo = f_pn(p, 1, ell)
            .scale(&front)
            .add(&f_pn(pp, 1, ell).scale(&(-&(&front * &Scalar::q_pow(-1)))))
            .expect("same degree");
        match e.equal_as_functions(&combo) {
            Ok(true) => {}
            other => return Some(format!("E identity at p={}: {:?}", p, other)),
        }
        let h = h_pn(p, 1, ell);
        let combo_h = f_pn(p, 1, ell)
            .scale(&(&front * &Scalar::qq_pow(1)))
            .add(&f_pn(pp, 1, ell).scale(&(-&(&front * &Scalar::dd_pow(-1)))))
            .expect("same degree");
        match h.equal_as_functions(&combo_h) {
            Ok(true) => {}
            other => return Some(format!("H identity at p={}: {:?}", p, other)),
        }
    }
    None
}

fn associativity_checks(ell: u64, seed: u64) -> Option<String> {
    let mut rng = XorShift::new(seed);
    let pick = |rng: &mut XorShift| -> ShuffleElement {
        match rng.below(5) {
            0 | 1 | 2 => {
                let color = rng.below(ell);
                let k = rng.below(3) as i64 - 1;
                ShuffleElement::monomial(ell, color, k)
            }
            3 => ShuffleElement::constant(ell, rng.scalar(2)),
            _ => f_pn(rng.below(ell), 1, ell),
        }
    };
    for trial in 0..20 {
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let total = a.degree.total() + b.degree.total() + c.degree.total();
        if total > 8 {
            continue;
        }
        let left = shuffle_product_with_guard(&a, &b, 8)
            .and_then(|ab| shuffle_product_with_guard(&ab, &c, 8));
        let right = shuffle_product_with_guard(&b, &c, 8)
            .and_then(|bc| shuffle_product_with_guard(&a, &bc, 8));
        match (left, right) {
            (Ok(l), Ok(r)) => match l.equal_as_functions(&r) {
                Ok(true) => {}
                other => return Some(format!("trial {}: {:?}", trial, other)),
            },
            other => return Some(format!("trial {}: {:?}", trial, other)),
        }
    }
    None
}

fn pairing_closed_form(ell: u64, max_n: u64) -> Option<String> {
    for p in 0..ell {
        for p_prime in 0..ell {
            for n in 1..=max_n {
                let f = f_pn(p_prime, n, ell);
                let got = match pairing_r(&f, p, n) {
                    Ok(v) => v,
                    Err(e) => return Some(format!("pairing_r p={} p'={} n={}: {}", p, p_prime, n, e)),
                };
                let expect = fp_closed_form(p, p_prime, n, ell);
                if got != expect {
                    return Some(format!(
                        "pairing_r(F_{{{},{}}}, {}, {}) = {} expected {}",
                        p_prime,
                        n,
                        p,
                        n,
                        got.to_display_string(),
                        expect.to_display_string()
                    ));
                }
                let got_star = match pairing_r_star(&f, p, n) {
                    Ok(v) => v,
                    Err(e) => return Some(format!("pairing_r_star: {}", e)),
                };
                let expect_star = fp_closed_form_dual(p, p_prime, n, ell);
                if got_star != expect_star {
                    return Some(format!(
                        "pairing_r_star(F_{{{},{}}}, {}, {}) = {} expected {}",
                        p_prime,
                        n,
                        p,
                        n,
                        got_star.to_display_string(),
                        expect_star.to_display_string()
                    ));
                }
            }
        }
    }
    None
}

fn group_like_pairing(ell: u64) -> Option<String> {
    for p in 0..ell {
        for p1 in 0..ell {
            for p2 in 0..ell {
                let f1 = f_pn(p1, 1, ell);
                let f2 = f_pn(p2, 1, ell);
                let prod = match shuffle_product_with_guard(&f1, &f2, 8) {
                    Ok(v) => v,
                    Err(e) => return Some(e.to_string()),
                };
                let lhs = match pairing_r(&prod, p, 2) {
                    Ok(v) => v,
                    Err(e) => return Some(format!("pairing of product: {}", e)),
                };
                let (r1, r2) = match (pairing_r(&f1, p, 1), pairing_r(&f2, p, 1)) {
                    (Ok(x), Ok(y)) => (x, y),
                    other => return Some(format!("factor pairing failed: {:?}", other)),
                };
                let rhs = &r1 * &r2;
                if lhs != rhs {
                    return Some(format!(
                        "group-like failure at p={} (p1={}, p2={})",
                        p, p1, p2
                    ));
                }
            }
        }
    }
    None
}

fn bottom_filtration(ell: u64, max_n: u64) -> Option<String> {
    // rho_{L'}(E_{p,n}) = 0 for every even L' strictly above the short
    // partition; mirror for H with the dual functional
    for p in 0..ell {
        for n in 1..=max_n {
            let e = e_pn(p, n, ell);
            let h = h_pn(p, n, ell);
            let short = IntervalPartition::short(p, n, ell);
            for l in interval_partitions_of(&DegreeVector::diagonal(n, ell), ell) {
                if !l.is_even(ell) || !l.dominates_strictly(&short) {
                    continue;
                }
                match rho_l(&e, &l) {
                    Ok(v) if v.is_zero() => {}
                    other => {
                        return Some(format!(
                            "rho_{:?}(E_{{{},{}}}) = {:?}",
                            l.parts, p, n, other
                        ))
                    }
                }
                match rho_l_star(&h, &l) {
                    Ok(v) if v.is_zero() => {}
                    other => {
                        return Some(format!(
                            "rho*_{:?}(H_{{{},{}}}) = {:?}",
                            l.parts, p, n, other
                        ))
                    }
                }
            }
            // the n = 1 mismatched-start vanishing, via the long duals
            if n == 1 {
                for p_prime in 0..ell {
                    if p_prime == p {
                        continue;
                    }
                    match pairing_r(&e, p_prime, 1) {
                        Ok(v) if v.is_zero() => {}
                        other => {
                            return Some(format!(
                                "<R_{{{},1}}, E_{{{},1}}> = {:?}",
                                p_prime, p, other
                            ))
                        }
                    }
                    match pairing_r_star(&h, p_prime, 1) {
                        Ok(v) if v.is_zero() => {}
                        other => {
                            return Some(format!(
                                "<R*_{{{},1}}, H_{{{},1}}> = {:?}",
                                p_prime, p, other
                            ))
                        }
                    }
                }
            }
        }
    }
    None
}

fn dual_product_checks(ell: u64, max_n: u64) -> Option<String> {
    for p in 0..ell {
        for n in 1..=max_n {
            let parts: Vec<(u64, u64)> = vec![(p, 1); n as usize];
            let e = e_pn(p, n, ell);
            let got = match dual_product_pairing(&e, &parts, false) {
                Ok(v) => v,
                Err(err) => return Some(format!("<R^n, E_{{{},{}}}>: {}", p, n, err)),
            };
            // (-1)^n qq^{n(n-1)/2} q^{np}
            let mut expect = &Scalar::qq_pow((n * (n - 1) / 2) as i64)
                * &Scalar::q_pow((n * p) as i64);
            if n % 2 == 1 {
                expect = -&expect;
            }
            if got != expect {
                return Some(format!(
                    "<R_{{{},1}}^{}, E_{{{},{}}}> = {} expected {}",
                    p,
                    n,
                    p,
                    n,
                    got.to_display_string(),
                    expect.to_display_string()
                ));
            }
            let h = h_pn(p, n, ell);
            let got_star = match dual_product_pairing(&h, &parts, true) {
                Ok(v) => v,
                Err(err) => return Some(format!("<R*^n, H_{{{},{}}}>: {}", p, n, err)),
            };
            // qq^{n(n-1)/2 - n} q^{n(l-1)} t^{n(l-p-1)}
            let expect_star = &(&Scalar::qq_pow((n * (n - 1) / 2) as i64 - n as i64)
                * &Scalar::q_pow((n * (ell - 1)) as i64))
                * &Scalar::t_pow((n * (ell - p - 1)) as i64);
            if got_star != expect_star {
                return Some(format!(
                    "<(R*_{{{},1}})^{}, H_{{{},{}}}> = {} expected {}",
                    p,
                    n,
                    p,
                    n,
                    got_star.to_display_string(),
                    expect_star.to_display_string()
                ));
            }
        }
    }
    None
}

fn rho_pairing_cross_oracle(ell: u64) -> Option<String> {
    // the long dual represents rho up to one overall constant: the ratio
    // rho / <R, -> must not depend on the argument
    for p in 0..ell {
        let l = IntervalPartition::long(p, 1, ell);
        let mut ratio: Option<Scalar> = None;
        for p_prime in 0..ell {
            let f = f_pn(p_prime, 1, ell);
            let rho = match rho_l(&f, &l) {
                Ok(v) => v,
                Err(e) => return Some(format!("rho long on F_{{{},1}}: {}", p_prime, e)),
            };
            let pair = match pairing_r(&f, p, 1) {
                Ok(v) => v,
                Err(e) => return Some(format!("pairing on F_{{{},1}}: {}", p_prime, e)),
            };
            if pair.is_zero() {
                if !rho.is_zero() {
                    return Some(format!("rho/{:?} vanishing mismatch", l.parts));
                }
                continue;
            }
            let r = &rho / &pair;
            match &ratio {
                None => ratio = Some(r),
                Some(existing) => {
                    if *existing != r {
                        return Some(format!(
                            "rho vs pairing ratio depends on p'={} at p={}",
                            p_prime, p
                        ));
                    }
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Fock suite
// ---------------------------------------------------------------------------

pub fn suite_fock(ell: u64, max_size: u64) -> VerifyReport {
    let start = Instant::now();
    let mut report = VerifyReport::new("fock", ell, max_size);
    report.push("psi-weight-corematch", psi_weight_corematch(ell));
    report.push("adjacency-vanishing", adjacency_vanishing(ell, max_size));
    report.push("heisenberg-commutativity", heisenberg_commutativity(ell, max_size));
    report.wall_ms = start.elapsed().as_millis();
    report
}

/// The psi weight: the z -> 0 constant of the eigenvalue equals
/// qq^{-(alpha_i, core)} computed from the charge vector, with the extra
/// central qq at i = 0.
pub fn psi_weight_corematch(ell: u64) -> Option<String> {
    for size in 0..=6u64 {
        for lam in partitions_of(size) {
            let (_, charges, _) = core_quotient(&lam, ell);
            for i in 0..ell {
                let psi = fock::psi_eigenvalue(&lam, i, ell, 0).expect("ell >= 3");
                let prev = charges[((i as i64 - 1).rem_euclid(ell as i64)) as usize];
                let expected_exp = charges[i as usize] - prev + if i == 0 { 1 } else { 0 };
                if psi.constant_at_zero() != Scalar::qq_pow(expected_exp) {
                    return Some(format!(
                        "psi weight at lam={:?}, i={}: {} expected qq^{}",
                        lam,
                        i,
                        psi.constant_at_zero().to_display_string(),
                        expected_exp
                    ));
                }
            }
        }
    }
    None
}

pub fn adjacency_vanishing(ell: u64, max_size: u64) -> Option<String> {
    for p in 0..ell {
        for n in 1..=2u64 {
            let truncation = if n == 1 { max_size } else { max_size.min(9) };
            let e_op = match fock::operator_matrix(&e_pn(p, n, ell), truncation, ell) {
                Ok(m) => m,
                Err(err) => return Some(format!("operator E_{{{},{}}}: {}", p, n, err)),
            };
            for ((mu, lam), c) in &e_op.entries {
                let cells = added_nodes(lam, mu);
                if has_horizontal_adjacency(&cells, p, ell) && !c.is_zero() {
                    return Some(format!(
                        "E_{{{},{}}} has entry at {:?} -> {:?} despite horizontal adjacency",
                        p, n, lam, mu
                    ));
                }
            }
            let h_op = match fock::operator_matrix(&h_pn(p, n, ell), truncation, ell) {
                Ok(m) => m,
                Err(err) => return Some(format!("operator H_{{{},{}}}: {}", p, n, err)),
            };
            for ((mu, lam), c) in &h_op.entries {
                let cells = added_nodes(lam, mu);
                if has_vertical_adjacency(&cells, p, ell) && !c.is_zero() {
                    return Some(format!(
                        "H_{{{},{}}} has entry at {:?} -> {:?} despite vertical adjacency",
                        p, n, lam, mu
                    ));
                }
            }
        }
    }
    None
}

pub fn heisenberg_commutativity(ell: u64, max_size: u64) -> Option<String> {
    let mut ops = Vec::new();
    for p in 0..ell {
        match fock::operator_matrix(&f_pn(p, 1, ell), max_size, ell) {
            Ok(m) => ops.push((format!("F_{{{},1}}", p), m)),
            Err(e) => return Some(format!("operator F_{{{},1}}: {}", p, e)),
        }
    }
    for p in 0..ell {
        match fock::operator_matrix(&f_pn(p, 2, ell), max_size, ell) {
            Ok(m) => ops.push((format!("F_{{{},2}}", p), m)),
            Err(e) => return Some(format!("operator F_{{{},2}}: {}", p, e)),
        }
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            if !ops[i].1.commutes_with(&ops[j].1, max_size) {
                return Some(format!("[{} , {}] != 0", ops[i].0, ops[j].0));
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Main-theorem verification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default)]
pub struct MainTheoremOptions {
    /// Multiply the stated constant by this factor for the matching
    /// (kind, p, n); the negative control of the suite.
    pub corrupt: Option<(BosonicKind, u64, u64, Scalar)>,
    pub no_cache: bool,
    pub seed: Option<u64>,
}

/// Cross-check the bosonic and fermionic pictures over all cells with
/// the given core up to quotient size max_n: identical support patterns
/// and one globally consistent diagonal rescaling anchored at the core.
pub fn verify_main_theorem(
    ell: u64,
    charges: &[i64],
    max_n: u64,
    opts: &MainTheoremOptions,
) -> VerifyReport {
    let start = Instant::now();
    let mut report = VerifyReport::new("main", ell, max_n);
    if ell < 3 {
        report.push("preconditions", Some("ell must be at least 3".into()));
        return report;
    }
    let mut tables: Vec<MacdonaldTable> = Vec::new();
    for n in 0..=max_n {
        match crate::cache::load_or_solve(ell, charges, n, opts.no_cache, opts.seed) {
            Ok(t) => tables.push(t),
            Err(e) => {
                report.push(&format!("solve-cell-n{}", n), Some(e));
                return report;
            }
        }
    }

    let mut constraints: Vec<Constraint> = Vec::new();
    for kind in [BosonicKind::EHat, BosonicKind::HHat] {
        for n in 1..=max_n {
            for src_n in 0..=(max_n - n) {
                for p in 0..ell {
                    let id = format!(
                        "support-{}-p{}-n{}-from{}",
                        match kind {
                            BosonicKind::EHat => "ehat",
                            BosonicKind::HHat => "hhat",
                        },
                        p,
                        n,
                        src_n
                    );
                    match operator_pair(
                        ell,
                        kind,
                        p,
                        n,
                        &tables[src_n as usize],
                        &tables[(src_n + n) as usize],
                        opts,
                    ) {
                        Ok((support_witness, mut cs)) => {
                            report.push(&id, support_witness);
                            constraints.append(&mut cs);
                        }
                        Err(e) => report.push(&id, Some(e)),
                    }
                }
            }
        }
    }

    // cocycle: solve for r with r_core = 1
    let core = tables[0].cell.core.clone();
    let mut r: BTreeMap<Partition, Scalar> = BTreeMap::new();
    r.insert(core, Scalar::one());
    let mut changed = true;
    let mut conflict: Option<String> = None;
    while changed && conflict.is_none() {
        changed = false;
        for (mu, lam, a, b, id) in &constraints {
            let Some(rl) = r.get(lam).cloned() else {
                continue;
            };
            let candidate = &(&rl * b) / a;
            match r.get(mu) {
                None => {
                    r.insert(mu.clone(), candidate);
                    changed = true;
                }
                Some(existing) => {
                    if *existing != candidate {
                        conflict = Some(format!(
                            "cocycle conflict at {:?} via {} from {:?}",
                            mu, id, lam
                        ));
                        break;
                    }
                }
            }
        }
    }
    report.push("cocycle-consistency", conflict);
    let mut unreached = Vec::new();
    for t in &tables {
        for m in &t.cell.members {
            if !r.contains_key(m) {
                unreached.push(format!("{:?}", m));
            }
        }
    }
    report.push(
        "cocycle-completeness",
        if unreached.is_empty() {
            None
        } else {
            Some(format!("unreached members: {}", unreached.join(", ")))
        },
    );
    report.wall_ms = start.elapsed().as_millis();
    report
}

type Constraint = (Partition, Partition, Scalar, Scalar, String);

/// Build the bosonic and fermionic matrices for one operator, check the
/// support patterns coincide, and return the rescaling constraints
/// a * r_mu = b * r_lam for the nonzero entries.
fn operator_pair(
    ell: u64,
    kind: BosonicKind,
    p: u64,
    n: u64,
    source: &MacdonaldTable,
    target: &MacdonaldTable,
    opts: &MainTheoremOptions,
) -> Result<(Option<String>, Vec<Constraint>), String> {
    let a = macdonald::bosonic_multiplication_matrix(kind, n, p, source, target)
        .map_err(|e| e.to_string())?;
    let (c_e, c_h) = constants(p, n, ell);
    let mut constant = match kind {
        BosonicKind::EHat => c_e,
        BosonicKind::HHat => c_h,
    };
    if let Some((ck, cp, cn, factor)) = &opts.corrupt {
        if *ck == kind && *cp == p && *cn == n {
            constant = &constant * factor;
        }
    }
    let element = match kind {
        BosonicKind::EHat => e_pn(p, n, ell),
        BosonicKind::HHat => h_pn(p, n, ell),
    }
    .scale(&constant);
    let mut b = vec![vec![Scalar::zero(); source.cell.members.len()]; target.cell.members.len()];
    for (j, lam) in source.cell.members.iter().enumerate() {
        let out = fock::shuffle_action(&element, &FockVector::basis_state(ell, lam.clone()))
            .map_err(|e| e.to_string())?;
        for (mu, c) in out.terms {
            let i = target
                .cell
                .members
                .iter()
                .position(|m| *m == mu)
                .ok_or_else(|| format!("fermionic image {:?} outside the target cell", mu))?;
            b[i][j] = c;
        }
    }
    let id = format!("{:?}-p{}-n{}", kind, p, n);
    let mut witness = None;
    let mut constraints = Vec::new();
    for (i, mu) in target.cell.members.iter().enumerate() {
        for (j, lam) in source.cell.members.iter().enumerate() {
            let az = a[i][j].is_zero();
            let bz = b[i][j].is_zero();
            if az != bz {
                witness = Some(format!(
                    "support mismatch at ({:?}, {:?}): bosonic {}, fermionic {}",
                    mu,
                    lam,
                    a[i][j].to_display_string(),
                    b[i][j].to_display_string()
                ));
            } else if !az {
                constraints.push((
                    mu.clone(),
                    lam.clone(),
                    a[i][j].clone(),
                    b[i][j].clone(),
                    id.clone(),
                ));
            }
        }
    }
    Ok((witness, constraints))
}
