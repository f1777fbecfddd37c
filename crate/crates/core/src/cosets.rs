//! Double cosets `P_lambda \ GL_n(E) / H'` and their representatives.
//!
//! The index set `S(lambda)` consists of symmetric `r x r` matrices of
//! non-negative integers with even diagonal and row sums `lambda`. Each
//! `S` determines a permutation `w_S` of `{1, ..., n}` built from four
//! families of positions, the shape of the fixed Levi
//! `prod H'_{t_i} x prod_{i<j} GL_{s_ij}`, and a relation between modulus
//! characters that is checked here on integer exponent vectors.
//!
//! Indices `i, j` are 0-based throughout the API; permutation values are the
//! positions `1..=n`.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosetError {
    #[error("total degree {0} is odd; H' only exists in even rank")]
    OddTotalDegree(u64),
    #[error("partition parts must be positive")]
    EmptyPart,
    #[error("matrix has {got} entries, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("diagonal entry {i} is odd")]
    OddDiagonal { i: usize },
    #[error("row {i} sums to {got}, expected {expected}")]
    RowSum { i: usize, expected: u32, got: u32 },
    #[error("position {position} is matched by {matches} of the four families")]
    CaseCoverageFailure { position: usize, matches: usize },
    #[error("w_S sends two positions to {target}")]
    NotBijective { target: usize },
}

/// An element of `S(lambda)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SMatrix {
    lambda: Vec<u32>,
    entries: Vec<u32>,
}

impl SMatrix {
    /// `entries` in row-major order.
    pub fn new(lambda: Vec<u32>, entries: Vec<u32>) -> Result<Self, CosetError> {
        let r = lambda.len();
        if entries.len() != r * r {
            return Err(CosetError::Shape {
                expected: r * r,
                got: entries.len(),
            });
        }
        let s = SMatrix { lambda, entries };
        for i in 0..r {
            for j in 0..i {
                if s.get(i, j) != s.get(j, i) {
                    return Err(CosetError::NotSymmetric { i, j });
                }
            }
            if s.get(i, i) % 2 != 0 {
                return Err(CosetError::OddDiagonal { i });
            }
            let got: u32 = s.row(i).iter().sum();
            if got != s.lambda[i] {
                return Err(CosetError::RowSum {
                    i,
                    expected: s.lambda[i],
                    got,
                });
            }
        }
        Ok(s)
    }

    pub fn r(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[u32] {
        &self.lambda
    }

    pub fn n(&self) -> u32 {
        self.lambda.iter().sum()
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.r() + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let r = self.r();
        &self.entries[i * r..(i + 1) * r]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        (0..self.r()).map(|i| self.row(i).to_vec()).collect()
    }

    /// `t_i = s_ii / 2`.
    pub fn t(&self, i: usize) -> u32 {
        self.get(i, i) / 2
    }

    /// `d_i = sum_{j >= i} s_ij - t_i`.
    pub fn d(&self, i: usize) -> u32 {
        self.row(i)[i..].iter().sum::<u32>() - self.t(i)
    }
}

fn check_lambda(lambda: &[u32]) -> Result<(), CosetError> {
    if lambda.contains(&0) {
        return Err(CosetError::EmptyPart);
    }
    let n: u64 = lambda.iter().map(|&p| p as u64).sum();
    if n % 2 != 0 {
        return Err(CosetError::OddTotalDegree(n));
    }
    Ok(())
}

/// All of `S(lambda)`, in row-major lexicographic order of entries.
pub fn enumerate_s(lambda: &[u32]) -> Result<Vec<SMatrix>, CosetError> {
    check_lambda(lambda)?;
    let r = lambda.len();
    let mut out = Vec::new();
    let mut entries = vec![0u32; r * r];
    // remaining[j] = lambda_j minus the entries of column j fixed so far
    let mut remaining = lambda.to_vec();
    fill(lambda, 0, 0, &mut entries, &mut remaining, &mut out);
    Ok(out)
}

// Visits upper-triangular cells (i, j >= i) in row-major order; lower cells
// are determined by symmetry and come earlier in row-major order, so an
// ascending depth-first search emits matrices in lexicographic order.
fn fill(
    lambda: &[u32],
    i: usize,
    j: usize,
    entries: &mut [u32],
    remaining: &mut [u32],
    out: &mut Vec<SMatrix>,
) {
    let r = lambda.len();
    if i == r {
        out.push(SMatrix {
            lambda: lambda.to_vec(),
            entries: entries.to_vec(),
        });
        return;
    }
    if j == r {
        if remaining[i] == 0 {
            fill(lambda, i + 1, i + 1, entries, remaining, out);
        }
        return;
    }
    let cap = if i == j {
        remaining[i]
    } else {
        remaining[i].min(remaining[j])
    };
    let step = if i == j { 2 } else { 1 };
    for v in (0..=cap).step_by(step) {
        place(lambda, i, j, v, entries, remaining, out);
    }
}

fn place(
    lambda: &[u32],
    i: usize,
    j: usize,
    v: u32,
    entries: &mut [u32],
    remaining: &mut [u32],
    out: &mut Vec<SMatrix>,
) {
    let r = lambda.len();
    entries[i * r + j] = v;
    entries[j * r + i] = v;
    remaining[i] -= v;
    if i != j {
        remaining[j] -= v;
    }
    fill(lambda, i, j + 1, entries, remaining, out);
    remaining[i] += v;
    if i != j {
        remaining[j] += v;
    }
    entries[i * r + j] = 0;
    entries[j * r + i] = 0;
}

/// Which of the four position families defines `w_S(l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WCase {
    /// First half, `H'_{t_i}` block, upper copy.
    W1,
    /// First half, `GL_{s_ij}` block with `i < j`.
    W2,
    /// Second half, `H'_{t_i}` block, lower copy.
    W3,
    /// Second half, `GL_{s_ij}` block with `j < i`.
    W4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GlFactor {
    pub i: usize,
    pub j: usize,
    pub size: u32,
}

/// Shape of `M_S^{sigma'_S}`: `prod_i H'_{t_i} x prod_{i<j} GL_{s_ij}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeviShape {
    /// `t_i` for every `i`, including zeros.
    pub h_factors: Vec<u32>,
    /// Nonzero `s_ij`, `i < j`.
    pub gl_factors: Vec<GlFactor>,
}

impl LeviShape {
    /// Rank of the ambient `GL_n` filled by the factors: each `H'_t` sits in
    /// `GL_{2t}` and each `GL_s` occupies the two blocks `(i, j)`, `(j, i)`.
    pub fn ambient_rank(&self) -> u32 {
        2 * self.h_factors.iter().sum::<u32>() + 2 * self.gl_factors.iter().map(|g| g.size).sum::<u32>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetDatum {
    pub s: SMatrix,
    pub t: Vec<u32>,
    pub d: Vec<u32>,
    /// One-line notation: `w[l - 1] = w_S(l)`.
    pub w: Vec<u32>,
    pub cases: Vec<WCase>,
    pub levi_shape: LeviShape,
}

impl CosetDatum {
    pub fn case_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for c in &self.cases {
            counts[*c as usize] += 1;
        }
        counts
    }
}

fn prefix(xs: &[u32]) -> Vec<u32> {
    let mut acc = 0;
    let mut out = Vec::with_capacity(xs.len() + 1);
    out.push(0);
    for &x in xs {
        acc += x;
        out.push(acc);
    }
    out
}

/// Builds `w_S` from the four position families.
///
/// Every family is generated independently; a position hit zero or several
/// times is reported as [`CosetError::CaseCoverageFailure`] rather than
/// silently resolved.
pub fn build_w(s: &SMatrix) -> Result<CosetDatum, CosetError> {
    let r = s.r();
    let n = s.n() as usize;
    if n % 2 != 0 {
        return Err(CosetError::OddTotalDegree(n as u64));
    }
    let m = (n / 2) as u32;
    let t: Vec<u32> = (0..r).map(|i| s.t(i)).collect();
    let d: Vec<u32> = (0..r).map(|i| s.d(i)).collect();
    let lambda_offset = prefix(s.lambda());
    let d_offset = prefix(&d);
    let d_total = d_offset[r];
    // sum of d_k over k > i
    let d_after = |i: usize| d_total - d_offset[i + 1];
    // s_{i,0} + ... + s_{i,j-1}
    let row_before = |i: usize, j: usize| s.row(i)[..j].iter().sum::<u32>();
    // s_{r-1,j} + ... + s_{i+1,j}
    let col_below = |i: usize, j: usize| ((i + 1)..r).map(|k| s.get(k, j)).sum::<u32>();

    let mut assignments: Vec<(u32, u32, WCase)> = Vec::with_capacity(n);
    for i in 0..r {
        for k in 1..=t[i] {
            let l = d_offset[i] + k;
            let target = lambda_offset[i] + row_before(i, i) + k;
            assignments.push((l, target, WCase::W1));
        }
        for j in (i + 1)..r {
            for k in 1..=s.get(i, j) {
                let l = d_offset[i] + t[i] + s.row(i)[(i + 1)..j].iter().sum::<u32>() + k;
                let target = lambda_offset[i] + row_before(i, j) + k;
                assignments.push((l, target, WCase::W2));
            }
        }
        for k in 1..=t[i] {
            let l = m + d_after(i) + col_below(i, i) + k;
            let target = lambda_offset[i] + row_before(i, i) + t[i] + k;
            assignments.push((l, target, WCase::W3));
        }
        for j in 0..i {
            for k in 1..=s.get(i, j) {
                let l = m + d_after(j) + col_below(i, j) + k;
                let target = lambda_offset[i] + row_before(i, j) + k;
                assignments.push((l, target, WCase::W4));
            }
        }
    }

    let mut hits = vec![0usize; n + 1];
    let mut w = vec![0u32; n];
    let mut cases = vec![WCase::W1; n];
    for &(l, target, case) in &assignments {
        let l = l as usize;
        if l == 0 || l > n {
            return Err(CosetError::CaseCoverageFailure {
                position: l,
                matches: 1,
            });
        }
        hits[l] += 1;
        w[l - 1] = target;
        cases[l - 1] = case;
    }
    if let Some(position) = (1..=n).find(|&l| hits[l] != 1) {
        return Err(CosetError::CaseCoverageFailure {
            position,
            matches: hits[position],
        });
    }
    let mut seen = vec![false; n + 1];
    for &target in &w {
        let target = target as usize;
        if target == 0 || target > n || seen[target] {
            return Err(CosetError::NotBijective { target });
        }
        seen[target] = true;
    }

    let gl_factors = (0..r)
        .flat_map(|i| ((i + 1)..r).map(move |j| (i, j)))
        .filter(|&(i, j)| s.get(i, j) > 0)
        .map(|(i, j)| GlFactor {
            i,
            j,
            size: s.get(i, j),
        })
        .collect();

    Ok(CosetDatum {
        s: s.clone(),
        levi_shape: LeviShape {
            h_factors: t.clone(),
            gl_factors,
        },
        t,
        d,
        w,
        cases,
    })
}

/// Integer exponents of a modulus character on the diagonal blocks of a
/// standard Levi: `delta(diag(g_b)) = prod |det g_b|^{exponents[b]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentVector {
    /// Block `(i, j)` of `M_S`, in the order the blocks appear on the diagonal.
    pub blocks: Vec<(usize, usize)>,
    pub exponents: Vec<i64>,
}

/// Modulus of the standard parabolic with diagonal blocks `sizes`: block `b`
/// gets `sum_{c > b} size_c - sum_{c < b} size_c`.
pub fn standard_modulus_exponents(sizes: &[u32]) -> Vec<i64> {
    let total: i64 = sizes.iter().map(|&x| x as i64).sum();
    let mut before = 0i64;
    sizes
        .iter()
        .map(|&size| {
            let after = total - before - size as i64;
            let e = after - before;
            before += size as i64;
            e
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedExponent {
    pub i: usize,
    pub j: usize,
    /// Exponent of the restricted `delta_{P_S}` on this factor.
    pub restricted: i64,
    /// Half of it: the exponent of the modulus of the fixed parabolic.
    pub square_root: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulusCheck {
    pub ok: bool,
    pub delta_p_s: ExponentVector,
    pub delta_p_prime_s: ExponentVector,
    pub delta_p: ExponentVector,
    pub fixed: Vec<FixedExponent>,
    /// First failing block, if any.
    pub failure: Option<(usize, usize)>,
}

/// Checks `delta_{P'_S} delta_P = delta_{P_S}` blockwise on `M_S`, and that
/// `delta_{P_S}` restricted to the fixed Levi has even exponents, so that it
/// has an integral square root.
pub fn check_modulus_identity(s: &SMatrix) -> ModulusCheck {
    let r = s.r();
    let blocks: Vec<(usize, usize)> = (0..r)
        .flat_map(|i| (0..r).map(move |j| (i, j)))
        .filter(|&(i, j)| s.get(i, j) > 0)
        .collect();
    let sizes: Vec<u32> = blocks.iter().map(|&(i, j)| s.get(i, j)).collect();

    let delta_p_s = standard_modulus_exponents(&sizes);

    let mut delta_p_prime_s = Vec::with_capacity(blocks.len());
    for i in 0..r {
        let row_sizes: Vec<u32> = s.row(i).iter().copied().filter(|&x| x > 0).collect();
        delta_p_prime_s.extend(standard_modulus_exponents(&row_sizes));
    }

    let outer = standard_modulus_exponents(s.lambda());
    let delta_p: Vec<i64> = blocks.iter().map(|&(i, _)| outer[i]).collect();

    let mut failure = None;
    for (b, &block) in blocks.iter().enumerate() {
        if delta_p_prime_s[b] + delta_p[b] != delta_p_s[b] {
            failure = Some(block);
            break;
        }
    }

    let position = |i: usize, j: usize| blocks.iter().position(|&b| b == (i, j));
    let mut fixed = Vec::new();
    for i in 0..r {
        for j in i..r {
            if s.get(i, j) == 0 {
                continue;
            }
            let restricted = if i == j {
                delta_p_s[position(i, i).expect("nonzero block")]
            } else {
                delta_p_s[position(i, j).expect("nonzero block")]
                    + delta_p_s[position(j, i).expect("nonzero block")]
            };
            let square_root = (restricted % 2 == 0).then_some(restricted / 2);
            if square_root.is_none() && failure.is_none() {
                failure = Some((i, j));
            }
            fixed.push(FixedExponent {
                i,
                j,
                restricted,
                square_root,
            });
        }
    }

    ModulusCheck {
        ok: failure.is_none(),
        delta_p_s: ExponentVector {
            blocks: blocks.clone(),
            exponents: delta_p_s,
        },
        delta_p_prime_s: ExponentVector {
            blocks: blocks.clone(),
            exponents: delta_p_prime_s,
        },
        delta_p: ExponentVector {
            blocks,
            exponents: delta_p,
        },
        fixed,
        failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrices(lambda: &[u32]) -> Vec<Vec<u32>> {
        enumerate_s(lambda)
            .unwrap()
            .into_iter()
            .map(|s| s.entries().to_vec())
            .collect()
    }

    #[test]
    fn one_part_has_one_matrix() {
        assert_eq!(matrices(&[6]), vec![vec![6]]);
    }

    #[test]
    fn small_partitions() {
        assert_eq!(matrices(&[1, 1]), vec![vec![0, 1, 1, 0]]);
        assert_eq!(matrices(&[2, 2]), vec![vec![0, 2, 2, 0], vec![2, 0, 0, 2]]);
        assert_eq!(matrices(&[1, 1, 1, 1]).len(), 3);
    }

    #[test]
    fn order_is_lexicographic() {
        let all = matrices(&[2, 2, 2]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn odd_degree_is_rejected() {
        assert_eq!(enumerate_s(&[1, 2]), Err(CosetError::OddTotalDegree(3)));
        assert_eq!(enumerate_s(&[2, 0]), Err(CosetError::EmptyPart));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            SMatrix::new(vec![1, 1], vec![0, 1, 0, 1]),
            Err(CosetError::NotSymmetric { .. })
        ));
        assert_eq!(
            SMatrix::new(vec![1], vec![1]),
            Err(CosetError::OddDiagonal { i: 0 })
        );
        assert!(matches!(
            SMatrix::new(vec![2, 2], vec![0, 1, 1, 0]),
            Err(CosetError::RowSum { i: 0, .. })
        ));
    }

    #[test]
    fn antidiagonal_rank_two_gives_identity() {
        let s = SMatrix::new(vec![1, 1], vec![0, 1, 1, 0]).unwrap();
        let datum = build_w(&s).unwrap();
        assert_eq!(datum.w, vec![1, 2]);
        assert_eq!(datum.cases, vec![WCase::W2, WCase::W4]);
        assert_eq!(datum.d, vec![1, 0]);
    }

    #[test]
    fn single_block_gives_identity() {
        let s = SMatrix::new(vec![6], vec![6]).unwrap();
        let datum = build_w(&s).unwrap();
        assert_eq!(datum.w, (1..=6).collect::<Vec<_>>());
        assert_eq!(datum.case_counts(), [3, 0, 3, 0]);
        assert_eq!(datum.levi_shape.h_factors, vec![3]);
    }

    #[test]
    fn diagonal_two_two() {
        // t = (1, 1), d = (1, 1), m = 2
        let s = SMatrix::new(vec![2, 2], vec![2, 0, 0, 2]).unwrap();
        let datum = build_w(&s).unwrap();
        assert_eq!(datum.w, vec![1, 3, 4, 2]);
        assert_eq!(datum.cases, vec![WCase::W1, WCase::W1, WCase::W3, WCase::W3]);
    }

    #[test]
    fn modulus_exponents() {
        assert_eq!(standard_modulus_exponents(&[1, 1]), vec![1, -1]);
        assert_eq!(standard_modulus_exponents(&[2, 2]), vec![2, -2]);
        assert_eq!(standard_modulus_exponents(&[1, 2, 1]), vec![3, 0, -3]);
    }

    #[test]
    fn modulus_identity_rank_two() {
        let s = SMatrix::new(vec![1, 1], vec![0, 1, 1, 0]).unwrap();
        let check = check_modulus_identity(&s);
        assert!(check.ok);
        assert_eq!(check.fixed.len(), 1);
        assert_eq!(check.fixed[0].restricted, 0);

        let one = SMatrix::new(vec![4], vec![4]).unwrap();
        let check = check_modulus_identity(&one);
        assert!(check.ok);
        assert!(check.delta_p_s.exponents.iter().all(|&e| e == 0));
    }
}
