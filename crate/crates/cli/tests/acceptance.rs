//! Acceptance suite: one test per criterion, each printing a single
//! PASS line with its runtime. Run with
//! `cargo test -p wmac-cli --test acceptance -- --test-threads=1 --nocapture`.

use std::time::{Duration, Instant};
use wmac_cli::verify;
use wmac_core::macdonald::BosonicKind;
use wmac_core::partitions::{partitions_of, Partition};
use wmac_core::scalars::Scalar;

fn report(id: &str, start: Instant, limit: Duration) {
    let elapsed = start.elapsed();
    println!("ACCEPTANCE {} PASS ({:.2?})", id, elapsed);
    assert!(
        elapsed < limit,
        "{} exceeded its runtime budget: {:.2?} > {:.2?}",
        id,
        elapsed,
        limit
    );
}

#[test]
fn criterion_1_combinatorial_bijections() {
    let start = Instant::now();
    assert_eq!(verify::maya_round_trips(20), None);
    assert_eq!(verify::core_quotient_round_trips(20), None);
    assert_eq!(verify::figure_anchors(), None);
    report("1 (bijections, |lam| <= 20, ell <= 5)", start, Duration::from_secs(10));
}

#[test]
fn criterion_2_ell1_regression() {
    let start = Instant::now();
    for n in 0..=4u64 {
        for lam in partitions_of(n) {
            let main = wmac_core::macdonald::wreath_macdonald(&lam, 1).expect("solvable");
            let oracle = ell1_oracle::transformed_macdonald(&lam);
            let main_p = main.to_p();
            // compare exact p-basis coordinates
            let mut main_terms: Vec<(Partition, Scalar)> = main_p
                .terms
                .iter()
                .map(|(k, v)| (k.components[0].clone(), v.clone()))
                .collect();
            main_terms.sort_by(|a, b| a.0.cmp(&b.0));
            let mut oracle_terms: Vec<(Partition, Scalar)> = oracle.into_iter().collect();
            oracle_terms.sort_by(|a, b| a.0.cmp(&b.0));
            assert_eq!(main_terms, oracle_terms, "H for {:?}", lam);
        }
    }
    report("2 (ell=1 classical regression, |lam| <= 4)", start, Duration::from_secs(60));
}

#[test]
fn criterion_3_existence_uniqueness() {
    let start = Instant::now();
    let r = verify::suite_macdonald(3, 2, 2, Some(1));
    r.print_lines();
    assert!(r.all_passed(), "existence/uniqueness suite failed");
    report(
        "3 (existence/uniqueness, ell=3, |charges|^2 <= 2, n <= 2)",
        start,
        Duration::from_secs(600),
    );
}

#[test]
fn criterion_4_triangularity_lemmas() {
    let start = Instant::now();
    assert_eq!(verify::triangle_columns(3, 9), None);
    assert_eq!(verify::triangle_rows(3, 9), None);
    report("4 (triangularity lemmas, ell=3, |lam| <= 9)", start, Duration::from_secs(600));
}

#[test]
fn criterion_5_shuffle_identities() {
    let start = Instant::now();
    let r = verify::suite_shuffle_identities(3, 2, 1);
    r.print_lines();
    assert!(r.all_passed(), "shuffle identity suite failed");
    report("5 (wheel/pole/limits/associativity)", start, Duration::from_secs(900));
}

#[test]
fn criterion_6_pairing_oracle() {
    let start = Instant::now();
    let r = verify::suite_pairings(3, 2);
    r.print_lines();
    assert!(r.all_passed(), "pairing suite failed");
    report("6 (long-dual pairing closed forms)", start, Duration::from_secs(900));
}

#[test]
fn criterion_7_fock_properties() {
    let start = Instant::now();
    // order independence is asserted inside every shuffle_action call
    assert_eq!(verify::psi_weight_corematch(3), None);
    assert_eq!(verify::adjacency_vanishing(3, 9), None);
    assert_eq!(verify::heisenberg_commutativity(3, 9), None);
    report("7 (Fock action properties)", start, Duration::from_secs(900));
}

#[test]
fn criterion_8_main_theorem() {
    let start = Instant::now();
    let opts = verify::MainTheoremOptions {
        corrupt: None,
        no_cache: true,
        seed: Some(1),
    };
    for charges in [vec![0i64, 0, 0], vec![1, -1, 0]] {
        let r = verify::verify_main_theorem(3, &charges, 2, &opts);
        r.print_lines();
        assert!(r.all_passed(), "main theorem check failed for {:?}", charges);
    }
    // negative control: a corrupted constant must be caught
    let bad = verify::MainTheoremOptions {
        corrupt: Some((BosonicKind::EHat, 0, 1, Scalar::q())),
        no_cache: true,
        seed: Some(1),
    };
    let r = verify::verify_main_theorem(3, &[0, 0, 0], 2, &bad);
    assert!(
        !r.all_passed(),
        "corrupted constant c_{{0,1}} slipped through the suite"
    );
    report("8 (main theorem at desk scale + negative control)", start, Duration::from_secs(1800));
}

/// Independent single-color oracle for the classical transformed
/// Macdonald polynomials: its own power-sum representation, generating
/// recursions, plethysms, dominance solve, and normalization. Shares
/// only the exact-arithmetic kernel with the main implementation.
mod ell1_oracle {
    use std::collections::BTreeMap;
    use wmac_core::partitions::{partitions_of, Partition};
    use wmac_core::scalars::Scalar;

    type PExp = BTreeMap<Partition, Scalar>;

    fn z_of(lam: &Partition) -> i64 {
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

    fn add_into(dst: &mut PExp, key: Partition, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = dst.entry(key.clone()).or_insert_with(Scalar::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            dst.remove(&key);
        }
    }

    fn mul_pexp(a: &PExp, b: &PExp) -> PExp {
        let mut out = PExp::new();
        for (k1, c1) in a {
            for (k2, c2) in b {
                let mut parts = k1.parts().to_vec();
                parts.extend_from_slice(k2.parts());
                add_into(&mut out, Partition::new(parts), c1 * c2);
            }
        }
        out
    }

    /// h_n = sum over kappa of p_kappa / z_kappa.
    fn h_in_p(n: u64) -> PExp {
        let mut out = PExp::new();
        for kappa in partitions_of(n) {
            add_into(
                &mut out,
                kappa.clone(),
                Scalar::from_int(z_of(&kappa)).inv().unwrap(),
            );
        }
        out
    }

    /// e_n with the alternating sign.
    fn e_in_p(n: u64) -> PExp {
        let mut out = PExp::new();
        for kappa in partitions_of(n) {
            let sign = if (n as usize - kappa.len()) % 2 == 0 { 1 } else { -1 };
            add_into(
                &mut out,
                kappa.clone(),
                Scalar::from_int(sign * z_of(&kappa)).inv().unwrap(),
            );
        }
        out
    }

    /// At one color the plethysms are diagonal on power sums:
    /// p_k -> p_k / (1 - q^k) and p_k -> p_k / (1 - t^{-k}).
    fn phi_q_inv(f: &PExp) -> PExp {
        f.iter()
            .map(|(k, c)| {
                let mut c = c.clone();
                for &part in k.parts() {
                    c = &c / &(&Scalar::one() - &Scalar::q_pow(part as i64));
                }
                (k.clone(), c)
            })
            .collect()
    }

    fn phi_tinv_inv(f: &PExp) -> PExp {
        f.iter()
            .map(|(k, c)| {
                let mut c = c.clone();
                for &part in k.parts() {
                    c = &c / &(&Scalar::one() - &Scalar::t_pow(-(part as i64)));
                }
                (k.clone(), c)
            })
            .collect()
    }

    fn hhat(mu: &Partition) -> PExp {
        let mut acc: PExp = [(Partition::empty(), Scalar::one())].into_iter().collect();
        for &part in mu.parts() {
            acc = mul_pexp(&acc, &h_in_p(part));
        }
        phi_q_inv(&acc)
    }

    fn ehat(mu: &Partition) -> PExp {
        // the elementary basis is indexed through the transpose
        let mut acc: PExp = [(Partition::empty(), Scalar::one())].into_iter().collect();
        for &part in mu.transpose().parts() {
            acc = mul_pexp(&acc, &e_in_p(part));
        }
        phi_tinv_inv(&acc)
    }

    fn dominance_leq(mu: &Partition, lam: &Partition) -> bool {
        if mu.size() != lam.size() {
            return false;
        }
        let mut sm = 0u64;
        let mut sl = 0u64;
        for i in 0..mu.len().max(lam.len()) {
            sm += mu.part(i + 1);
            sl += lam.part(i + 1);
            if sm > sl {
                return false;
            }
        }
        true
    }

    /// Coefficient of the one-row Schur function: the Hall pairing with
    /// h_n collapses to the plain sum of power-sum coordinates.
    fn trivial_coefficient(f: &PExp) -> Scalar {
        let mut acc = Scalar::zero();
        for c in f.values() {
            acc = &acc + c;
        }
        acc
    }

    /// Direct triangularity solve for the transformed Macdonald
    /// polynomial against the dominance order.
    pub fn transformed_macdonald(lam: &Partition) -> BTreeMap<Partition, Scalar> {
        let n = lam.size();
        let members = partitions_of(n);
        let up: Vec<&Partition> = members.iter().filter(|mu| dominance_leq(lam, mu)).collect();
        let down: Vec<&Partition> = members.iter().filter(|mu| dominance_leq(mu, lam)).collect();
        let coords: Vec<Partition> = members.clone();
        let coord_of = |f: &PExp| -> Vec<Scalar> {
            coords
                .iter()
                .map(|k| f.get(k).cloned().unwrap_or_else(Scalar::zero))
                .collect()
        };
        // dense solve of [up | -down] x = 0 over the scalar field
        let mut cols: Vec<Vec<Scalar>> = Vec::new();
        let mut col_exps: Vec<PExp> = Vec::new();
        for mu in &up {
            let f = hhat(mu);
            cols.push(coord_of(&f));
            col_exps.push(f);
        }
        for mu in &down {
            let f = ehat(mu);
            let mut v = coord_of(&f);
            for x in v.iter_mut() {
                *x = -&*x;
            }
            cols.push(v);
        }
        let rows = coords.len();
        let total = cols.len();
        let mut m: Vec<Vec<Scalar>> = (0..rows)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        // Gauss-Jordan; collect the one-dimensional kernel
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; total];
        let mut r = 0usize;
        for c in 0..total {
            let piv = (r..rows).find(|&i| !m[i][c].is_zero());
            let Some(piv) = piv else { continue };
            m.swap(r, piv);
            let inv = m[r][c].inv().unwrap();
            for j in 0..total {
                m[r][j] = &m[r][j] * &inv;
            }
            for i in 0..rows {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in 0..total {
                        let sub = &m[r][j] * &f;
                        m[i][j] = &m[i][j] - &sub;
                    }
                }
            }
            pivot_of_col[c] = Some(r);
            r += 1;
        }
        let free: Vec<usize> = (0..total).filter(|&c| pivot_of_col[c].is_none()).collect();
        assert_eq!(free.len(), 1, "oracle intersection must be a line");
        let fc = free[0];
        let mut x = vec![Scalar::zero(); total];
        x[fc] = Scalar::one();
        for c in 0..total {
            if let Some(pr) = pivot_of_col[c] {
                x[c] = -&m[pr][fc];
            }
        }
        // assemble from the hhat side and normalize the trivial coefficient
        let mut h = PExp::new();
        for (k, f) in col_exps.iter().enumerate() {
            for (key, c) in f {
                add_into(&mut h, key.clone(), c * &x[k]);
            }
        }
        let t = trivial_coefficient(&h);
        assert!(!t.is_zero(), "oracle trivial coefficient vanished");
        let tinv = t.inv().unwrap();
        h.into_iter().map(|(k, c)| (k, &c * &tinv)).collect()
    }
}
