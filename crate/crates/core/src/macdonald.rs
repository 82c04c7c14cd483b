//! Wreath Macdonald polynomials by the triangularity characterization:
//! H_lambda spans the intersection of the span of { hhat_mu : mu >= lambda }
//! and the span of { ehat_mu : mu <= lambda } within a cell (fixed core
//! and quotient size), normalized so the trivial coefficient is 1.
//!
//! The intersection is computed as the nullspace of the stacked system
//! [basis1 | -basis2] in p-monomial coordinates, using fraction-free
//! Gaussian elimination on denominator-cleared rows. Pivots prefer sparse
//! entries: coefficient growth, not numerical stability, is the threat.

use crate::partitions::{
    core_from_charges, core_quotient, dominance_leq, multipartitions_of, Partition,
};
use crate::scalars::{LPoly, Scalar, XorShift};
use crate::symfunc::{ehat, ehat_gen, hhat, hhat_gen, p_coordinates, Basis, SymFunc};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

pub const CACHE_SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MacError {
    /// The intersection space does not have dimension one.
    IntersectionDimension { found: usize },
    /// The normalization coefficient vanished; must never happen.
    TrivialCoefficientZero,
    /// expand_in_H target does not lie in the span of the table.
    NotInSpan,
    /// Charge vector does not sum to zero.
    BadCharges,
    /// A triangularity recheck failed after the solve.
    TriangularityViolated,
}

impl fmt::Display for MacError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MacError::IntersectionDimension { found } => {
                write!(f, "intersection dimension {} != 1", found)
            }
            MacError::TrivialCoefficientZero => write!(f, "trivial coefficient is zero"),
            MacError::NotInSpan => write!(f, "not in span"),
            MacError::BadCharges => write!(f, "charges must sum to zero"),
            MacError::TriangularityViolated => write!(f, "triangularity recheck failed"),
        }
    }
}

impl std::error::Error for MacError {}

// ---------------------------------------------------------------------------
// Exact linear algebra
// ---------------------------------------------------------------------------

/// Nullspace basis of the matrix (rows x cols) over the scalar field,
/// via fraction-free elimination on denominator-cleared rows.
pub fn nullspace(matrix: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let rows = matrix.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = matrix[0].len();
    // Clear denominators row-wise (row scaling preserves the nullspace).
    let mut a: Vec<Vec<LPoly>> = matrix
        .iter()
        .map(|row| {
            let mut denom = LPoly::one();
            for x in row {
                denom = denom.mul(x.denominator());
            }
            // divide each by own denominator: x * denom has polynomial value
            row.iter()
                .map(|x| {
                    let cleared = &Scalar::from_poly(denom.clone()) * x;
                    debug_assert!(cleared.denominator().is_one());
                    cleared.numerator().clone()
                })
                .collect()
        })
        .collect();

    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut pivot_rows: Vec<usize> = Vec::new();
    let mut prev_pivot = LPoly::one();
    let mut r = 0usize;
    for c in 0..cols {
        // sparsest nonzero pivot in column c among rows r..
        let mut best: Option<(usize, usize)> = None;
        for i in r..rows {
            if !a[i][c].is_zero() {
                let weight = a[i][c].num_terms();
                if best.map(|(_, w)| weight < w).unwrap_or(true) {
                    best = Some((i, weight));
                }
            }
        }
        let Some((pi, _)) = best else { continue };
        a.swap(r, pi);
        // fraction-free update of the remaining rows
        for i in r + 1..rows {
            for j in 0..cols {
                if j == c {
                    continue;
                }
                let v = a[r][c].mul(&a[i][j]).sub(&a[i][c].mul(&a[r][j]));
                a[i][j] = exact_div(&v, &prev_pivot);
            }
            a[i][c] = LPoly::zero();
        }
        prev_pivot = a[r][c].clone();
        pivot_cols.push(c);
        pivot_rows.push(r);
        r += 1;
        if r == rows {
            break;
        }
    }

    // Back-substitute over the field for each free column.
    let is_pivot: Vec<Option<usize>> = {
        let mut v = vec![None; cols];
        for (k, &c) in pivot_cols.iter().enumerate() {
            v[c] = Some(k);
        }
        v
    };
    let mut basis = Vec::new();
    for f in 0..cols {
        if is_pivot[f].is_some() {
            continue;
        }
        let mut x = vec![Scalar::zero(); cols];
        x[f] = Scalar::one();
        for k in (0..pivot_cols.len()).rev() {
            let (pr, pc) = (pivot_rows[k], pivot_cols[k]);
            let mut acc = Scalar::zero();
            for j in pc + 1..cols {
                if a[pr][j].is_zero() || x[j].is_zero() {
                    continue;
                }
                acc = &acc + &(&Scalar::from_poly(a[pr][j].clone()) * &x[j]);
            }
            x[pc] = &(-&acc) / &Scalar::from_poly(a[pr][pc].clone());
        }
        basis.push(x);
    }
    basis
}

fn exact_div(a: &LPoly, b: &LPoly) -> LPoly {
    if a.is_zero() {
        return LPoly::zero();
    }
    let v = Scalar::new(a.clone(), b.clone());
    assert!(
        v.denominator().is_one(),
        "fraction-free division must be exact"
    );
    v.numerator().clone()
}

/// Solve target = sum x_i basis_i over the scalar field; None when the
/// target is outside the span.
pub fn solve_in_span(basis: &[Vec<Scalar>], target: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = basis.len();
    let dim = target.len();
    // augmented matrix [basis columns | target]
    let mut m: Vec<Vec<Scalar>> = (0..dim)
        .map(|d| {
            let mut row: Vec<Scalar> = basis.iter().map(|b| b[d].clone()).collect();
            row.push(target[d].clone());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for c in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for i in r..dim {
            if !m[i][c].is_zero() {
                let w = m[i][c].num_terms();
                if best.map(|(_, bw)| w < bw).unwrap_or(true) {
                    best = Some((i, w));
                }
            }
        }
        let Some((pi, _)) = best else { continue };
        m.swap(r, pi);
        let inv = m[r][c].inv().expect("pivot nonzero");
        for j in c..=n {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..dim {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=n {
                    let sub = &m[r][j] * &f;
                    m[i][j] = &m[i][j] - &sub;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == dim {
            break;
        }
    }
    // inconsistent if any zero row has nonzero rhs
    for i in r..dim {
        if !m[i][n].is_zero() {
            return None;
        }
    }
    let mut x = vec![Scalar::zero(); n];
    for &(pr, pc) in &pivots {
        x[pc] = m[pr][n].clone();
    }
    Some(x)
}

/// Rank of a matrix after specializing entries at rational (s0, w0);
/// None when a denominator vanishes at the point.
fn rank_at_point(
    matrix: &[Vec<Scalar>],
    s0: &BigRational,
    w0: &BigRational,
) -> Option<usize> {
    let rows = matrix.len();
    if rows == 0 {
        return Some(0);
    }
    let cols = matrix[0].len();
    let mut m: Vec<Vec<BigRational>> = Vec::with_capacity(rows);
    for row in matrix {
        let mut out = Vec::with_capacity(cols);
        for x in row {
            out.push(x.specialize(s0, w0).ok()?);
        }
        m.push(out);
    }
    let mut rank = 0usize;
    for c in 0..cols {
        let piv = (rank..rows).find(|&i| !m[i][c].is_zero());
        let Some(piv) = piv else { continue };
        m.swap(rank, piv);
        let inv = m[rank][c].clone();
        for i in rank + 1..rows {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &inv;
                for j in c..cols {
                    let sub = &m[rank][j] * &f;
                    m[i][j] = &m[i][j] - &sub;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Some(rank)
}

// ---------------------------------------------------------------------------
// Cells and tables
// ---------------------------------------------------------------------------

/// All partitions with a fixed core and quotient size, sorted by a
/// dominance-compatible total order (most dominant first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub ell: u64,
    pub charges: Vec<i64>,
    pub core: Partition,
    pub n: u64,
    pub members: Vec<Partition>,
}

/// Lexicographic comparison of partial-sum sequences; extends dominance.
fn partial_sum_key(p: &Partition) -> Vec<u64> {
    let mut acc = 0;
    p.parts()
        .iter()
        .map(|&x| {
            acc += x;
            acc
        })
        .collect()
}

pub fn enumerate_cell(charges: &[i64], n: u64, ell: u64) -> Result<Cell, MacError> {
    if charges.len() != ell as usize || charges.iter().sum::<i64>() != 0 {
        return Err(MacError::BadCharges);
    }
    let core = core_from_charges(charges, ell);
    let mut members: Vec<Partition> = multipartitions_of(n, ell)
        .into_iter()
        .map(|mp| {
            crate::partitions::combine(&core, &mp.components, ell)
                .expect("core_from_charges returns a core")
        })
        .collect();
    members.sort_by(|a, b| partial_sum_key(b).cmp(&partial_sum_key(a)));
    members.dedup();
    assert_eq!(
        members.len(),
        multipartitions_of(n, ell).len(),
        "fiber enumeration must be duplicate-free"
    );
    Ok(Cell {
        ell,
        charges: charges.to_vec(),
        core,
        n,
        members,
    })
}

/// The solved polynomials of one cell, each in the p-basis with the core
/// label attached.
#[derive(Debug, Clone)]
pub struct MacdonaldTable {
    pub cell: Cell,
    pub polynomials: BTreeMap<Partition, SymFunc>,
}

/// Options for the cell solver.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Run a randomized rational specialization to pre-check that the
    /// intersection is one-dimensional before the symbolic solve.
    pub precheck_seed: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            precheck_seed: Some(1),
        }
    }
}

/// Solve a whole cell.
pub fn solve_cell(cell: &Cell, opts: SolveOptions) -> Result<MacdonaldTable, MacError> {
    let ell = cell.ell;
    // the colored ring grades by quotient boxes: the cell spans degree n
    let n = cell.n;
    let index_size = multipartitions_of(n, ell).len();
    // coordinates of hhat/ehat for every member
    let mut hhat_coords: BTreeMap<Partition, Vec<Scalar>> = BTreeMap::new();
    let mut ehat_coords: BTreeMap<Partition, Vec<Scalar>> = BTreeMap::new();
    let mut hhat_funcs: BTreeMap<Partition, SymFunc> = BTreeMap::new();
    for mu in &cell.members {
        let h = hhat(mu, ell);
        let e = ehat(mu, ell);
        hhat_coords.insert(mu.clone(), p_coordinates(&h, n));
        ehat_coords.insert(mu.clone(), p_coordinates(&e, n));
        hhat_funcs.insert(mu.clone(), h);
    }

    let mut polynomials = BTreeMap::new();
    for lam in &cell.members {
        let up: Vec<&Partition> = cell
            .members
            .iter()
            .filter(|mu| dominance_leq(lam, mu))
            .collect();
        let down: Vec<&Partition> = cell
            .members
            .iter()
            .filter(|mu| dominance_leq(mu, lam))
            .collect();
        // stacked system [up-basis | -down-basis] in p-coordinates
        let mut matrix: Vec<Vec<Scalar>> = Vec::with_capacity(index_size);
        for d in 0..index_size {
            let mut row = Vec::with_capacity(up.len() + down.len());
            for mu in &up {
                row.push(hhat_coords[*mu][d].clone());
            }
            for mu in &down {
                row.push(-&ehat_coords[*mu][d]);
            }
            matrix.push(row);
        }

        if let Some(seed) = opts.precheck_seed {
            precheck_dimension(&matrix, up.len() + down.len(), seed)?;
        }

        let null = nullspace(&matrix);
        if null.len() != 1 {
            return Err(MacError::IntersectionDimension { found: null.len() });
        }
        let coeffs = &null[0];
        // diagonal coefficients on both sides must be nonzero
        let lam_up = up.iter().position(|mu| *mu == lam).expect("lam in up set");
        let lam_down = down.iter().position(|mu| *mu == lam).expect("lam in down set");
        if coeffs[lam_up].is_zero() || coeffs[up.len() + lam_down].is_zero() {
            return Err(MacError::TriangularityViolated);
        }
        let mut h = SymFunc::zero(ell, Basis::P);
        for (k, mu) in up.iter().enumerate() {
            h = h.add(&hhat_funcs[*mu].scale(&coeffs[k]));
        }
        let trivial = h
            .trivial_coefficient(n)
            .expect("solution is homogeneous");
        if trivial.is_zero() {
            return Err(MacError::TrivialCoefficientZero);
        }
        let mut normalized = h.scale(&trivial.inv().expect("nonzero"));
        normalized.core_label = Some(cell.charges.clone());
        polynomials.insert(lam.clone(), normalized);
    }
    Ok(MacdonaldTable {
        cell: cell.clone(),
        polynomials,
    })
}

fn precheck_dimension(
    matrix: &[Vec<Scalar>],
    cols: usize,
    seed: u64,
) -> Result<(), MacError> {
    let mut rng = XorShift::new(seed);
    for _ in 0..8 {
        let s0 = rng.rational();
        let w0 = rng.rational();
        if let Some(rank) = rank_at_point(matrix, &s0, &w0) {
            let nullity = cols - rank;
            if nullity == 1 {
                // specialization can only drop rank, so symbolic nullity
                // is at most (and by existence exactly) one
                return Ok(());
            }
            // degenerate point: redraw
        }
    }
    // inconclusive; fall through to the symbolic solve
    Ok(())
}

/// The wreath Macdonald polynomial of a single partition.
pub fn wreath_macdonald(lam: &Partition, ell: u64) -> Result<SymFunc, MacError> {
    let (_, charges, quot) = core_quotient(lam, ell);
    let n: u64 = quot.iter().map(|q| q.size()).sum();
    let cell = enumerate_cell(&charges, n, ell)?;
    let table = solve_cell(&cell, SolveOptions::default())?;
    Ok(table.polynomials[lam].clone())
}

/// Exact coordinates of f over the table's polynomials.
pub fn expand_in_h(f: &SymFunc, table: &MacdonaldTable) -> Result<BTreeMap<Partition, Scalar>, MacError> {
    let degree = table.cell.n;
    let basis: Vec<Vec<Scalar>> = table
        .cell
        .members
        .iter()
        .map(|mu| p_coordinates(&table.polynomials[mu], degree))
        .collect();
    let target = p_coordinates(&f.to_p(), degree);
    let coords = solve_in_span(&basis, &target).ok_or(MacError::NotInSpan)?;
    Ok(table
        .cell
        .members
        .iter()
        .cloned()
        .zip(coords)
        .filter(|(_, c)| !c.is_zero())
        .collect())
}

/// Which twisted generator multiplies on the bosonic side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BosonicKind {
    EHat,
    HHat,
}

/// Matrix of multiplication by ehat_n(p) or hhat_n(p) from the source
/// cell's Macdonald basis to the target cell's, entries indexed
/// (target member, source member).
pub fn bosonic_multiplication_matrix(
    kind: BosonicKind,
    n: u64,
    p: u64,
    source: &MacdonaldTable,
    target: &MacdonaldTable,
) -> Result<Vec<Vec<Scalar>>, MacError> {
    assert_eq!(source.cell.ell, target.cell.ell);
    assert_eq!(source.cell.charges, target.cell.charges, "same core");
    assert_eq!(source.cell.n + n, target.cell.n, "degree bookkeeping");
    let ell = source.cell.ell;
    if n == 0 {
        let k = source.cell.members.len();
        return Ok((0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                    .collect()
            })
            .collect());
    }
    let gen = match kind {
        BosonicKind::EHat => ehat_gen(n, p, ell),
        BosonicKind::HHat => hhat_gen(n, p, ell),
    };
    let rows = target.cell.members.len();
    let cols = source.cell.members.len();
    let mut matrix = vec![vec![Scalar::zero(); cols]; rows];
    for (j, lam_src) in source.cell.members.iter().enumerate() {
        let prod = gen
            .multiply(&source.polynomials[lam_src])
            .expect("same ell");
        let coords = expand_in_h(&prod, target)?;
        for (mu, c) in coords {
            let i = target
                .cell
                .members
                .iter()
                .position(|m| *m == mu)
                .expect("member");
            matrix[i][j] = c;
        }
    }
    Ok(matrix)
}

// ---------------------------------------------------------------------------
// Table (de)serialization for the on-disk cache
// ---------------------------------------------------------------------------

impl MacdonaldTable {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema_version": CACHE_SCHEMA_VERSION,
            "ell": self.cell.ell,
            "charges": self.cell.charges,
            "n": self.cell.n,
            "members": self.cell.members.iter().map(|m| m.parts().to_vec()).collect::<Vec<_>>(),
            "polynomials": self.cell.members.iter().map(|m| {
                serde_json::json!([m.parts().to_vec(), self.polynomials[m].to_json_exact()])
            }).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Option<MacdonaldTable> {
        if v.get("schema_version")?.as_u64()? != CACHE_SCHEMA_VERSION {
            return None;
        }
        let ell = v.get("ell")?.as_u64()?;
        let charges: Vec<i64> = v
            .get("charges")?
            .as_array()?
            .iter()
            .map(|x| x.as_i64())
            .collect::<Option<_>>()?;
        let n = v.get("n")?.as_u64()?;
        let cell = enumerate_cell(&charges, n, ell).ok()?;
        let mut polynomials = BTreeMap::new();
        for entry in v.get("polynomials")?.as_array()? {
            let entry = entry.as_array()?;
            let parts: Vec<u64> = entry[0]
                .as_array()?
                .iter()
                .map(|x| x.as_u64())
                .collect::<Option<_>>()?;
            let lam = Partition::new(parts);
            let f = SymFunc::from_json_exact(&entry[1])?;
            polynomials.insert(lam, f);
        }
        if polynomials.len() != cell.members.len() {
            return None;
        }
        Some(MacdonaldTable { cell, polynomials })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{partitions_of, MultiPartition};

    fn p(parts: &[u64]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn nullspace_small() {
        // x + y = 0 has nullspace dimension 1
        let m = vec![vec![Scalar::one(), Scalar::one()]];
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert_eq!(&v[0] + &v[1], Scalar::zero());
        // identity has trivial nullspace
        let id = vec![
            vec![Scalar::one(), Scalar::zero()],
            vec![Scalar::zero(), Scalar::one()],
        ];
        assert!(nullspace(&id).is_empty());
    }

    #[test]
    fn nullspace_with_denominators() {
        // q/(1-q) x = t y  and  x = x: nullspace dim 1, checked exactly
        let a = &Scalar::q() / &(&Scalar::one() - &Scalar::q());
        let m = vec![vec![a.clone(), -&Scalar::t()]];
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert_eq!(&(&a * &v[0]) - &(&Scalar::t() * &v[1]), Scalar::zero());
    }

    #[test]
    fn solve_in_span_roundtrip() {
        let b1 = vec![Scalar::one(), Scalar::q()];
        let b2 = vec![Scalar::zero(), Scalar::t()];
        let target = vec![Scalar::from_int(2), &(&Scalar::q() * &Scalar::from_int(2)) + &Scalar::t()];
        let x = solve_in_span(&[b1, b2], &target).unwrap();
        assert_eq!(x[0], Scalar::from_int(2));
        assert_eq!(x[1], Scalar::one());
        // outside span
        let bad = vec![Scalar::zero(), Scalar::one()];
        assert!(solve_in_span(&[vec![Scalar::one(), Scalar::zero()]], &bad).is_none());
    }

    #[test]
    fn enumerate_cell_examples() {
        let c = enumerate_cell(&[0, 0, 0], 0, 3).unwrap();
        assert_eq!(c.members, vec![Partition::empty()]);

        let c1 = enumerate_cell(&[0, 0, 0], 1, 3).unwrap();
        assert_eq!(c1.members.len(), 3);
        // all partitions of 3 with empty 3-core
        let expected: Vec<Partition> = partitions_of(3)
            .into_iter()
            .filter(|lam| core_quotient(lam, 3).0.is_empty())
            .collect();
        for m in &c1.members {
            assert!(expected.contains(m));
        }
        // most dominant first
        assert_eq!(c1.members[0], p(&[3]));
        assert_eq!(c1.members[2], p(&[1, 1, 1]));

        let c2 = enumerate_cell(&[0], 2, 1).unwrap();
        assert_eq!(c2.members, vec![p(&[2]), p(&[1, 1])]);
    }

    #[test]
    fn core_cell_is_constant_one() {
        let cell = enumerate_cell(&[1, -1, 0], 0, 3).unwrap();
        assert_eq!(cell.core, p(&[3, 1]));
        let table = solve_cell(&cell, SolveOptions::default()).unwrap();
        let h = &table.polynomials[&p(&[3, 1])];
        assert_eq!(h.terms.len(), 1);
        assert_eq!(
            h.terms
                .get(&MultiPartition::empty(3))
                .unwrap(),
            &Scalar::one()
        );
        assert_eq!(h.core_label, Some(vec![1, -1, 0]));
    }

    #[test]
    fn ell3_core_empty_n1_solves() {
        let cell = enumerate_cell(&[0, 0, 0], 1, 3).unwrap();
        let table = solve_cell(&cell, SolveOptions::default()).unwrap();
        for lam in &cell.members {
            let h = &table.polynomials[lam];
            assert_eq!(h.trivial_coefficient(1).unwrap(), Scalar::one());
            // re-verify the defining conditions by brute force: the
            // hhat expansion is supported on mu >= lam, the ehat
            // expansion on mu <= lam
            let up = h.convert(Basis::HHat).unwrap();
            for key in up.terms.keys() {
                let mu = crate::partitions::combine(&cell.core, &key.components, 3).unwrap();
                assert!(dominance_leq(lam, &mu), "hhat support above lam");
            }
            let down = h.convert(Basis::EHat).unwrap();
            for key in down.terms.keys() {
                let mu = crate::partitions::combine(&cell.core, &key.components, 3).unwrap();
                assert!(dominance_leq(&mu, lam), "ehat support below lam");
            }
        }
    }

    #[test]
    fn expand_in_h_unit_and_triangular() {
        let cell = enumerate_cell(&[0, 0, 0], 1, 3).unwrap();
        let table = solve_cell(&cell, SolveOptions::default()).unwrap();
        // H_lam has unit coordinate at lam
        for lam in &cell.members {
            let coords = expand_in_h(&table.polynomials[lam], &table).unwrap();
            assert_eq!(coords.len(), 1);
            assert_eq!(coords.get(lam).unwrap(), &Scalar::one());
        }
        // hhat_lam has coordinates supported on mu >= lam
        for lam in &cell.members {
            let coords = expand_in_h(&hhat(lam, 3), &table).unwrap();
            for (mu, _) in coords {
                assert!(dominance_leq(lam, &mu));
            }
        }
        // zero expands to the empty mapping
        let zero = SymFunc::zero(3, Basis::P);
        // zero is not homogeneous of the right degree as stored, so embed
        // it as an empty combination: solve directly
        let coords = expand_in_h(&zero, &table).unwrap();
        assert!(coords.is_empty());
    }

    #[test]
    fn table_json_roundtrip() {
        let cell = enumerate_cell(&[0, 0, 0], 1, 3).unwrap();
        let table = solve_cell(&cell, SolveOptions::default()).unwrap();
        let j = table.to_json();
        let back = MacdonaldTable::from_json(&j).unwrap();
        for lam in &cell.members {
            assert_eq!(back.polynomials[lam].terms, table.polynomials[lam].terms);
        }
    }

    #[test]
    fn multiplication_matrix_degree0_identity() {
        let cell = enumerate_cell(&[0, 0, 0], 1, 3).unwrap();
        let table = solve_cell(&cell, SolveOptions::default()).unwrap();
        let m = bosonic_multiplication_matrix(BosonicKind::EHat, 0, 0, &table, &table).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[i][j].is_one(), i == j);
            }
        }
    }

    #[test]
    fn ell1_multiplication_matrix_2x1() {
        let src = solve_cell(&enumerate_cell(&[0], 1, 1).unwrap(), SolveOptions::default()).unwrap();
        let dst = solve_cell(&enumerate_cell(&[0], 2, 1).unwrap(), SolveOptions::default()).unwrap();
        let m = bosonic_multiplication_matrix(BosonicKind::EHat, 1, 0, &src, &dst).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].len(), 1);
        // direct expansion oracle
        let prod = ehat_gen(1, 0, 1)
            .multiply(&src.polynomials[&p(&[1])])
            .unwrap();
        let coords = expand_in_h(&prod, &dst).unwrap();
        for (i, mu) in dst.cell.members.iter().enumerate() {
            assert_eq!(
                coords.get(mu).cloned().unwrap_or_else(Scalar::zero),
                m[i][0]
            );
        }
    }
}
