//! Wedge-basis combinatorics.
//!
//! Bases of exterior powers are indexed by strictly increasing index lists,
//! ordered lexicographically. Signs follow the shuffle convention: the sign
//! attached to a pair of disjoint lists `(I, J)` is the parity of the number
//! of inversions in the concatenated word `I ++ J`, i.e. the sign of the
//! permutation sorting it.

/// Binomial coefficient; panics on overflow, which cannot happen at the
/// problem sizes this engine accepts.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflow")
}

/// All `k`-element subsets of `{0, .., n-1}` as increasing lists, in
/// lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(n, k) as usize);
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // Advance to the lexicographic successor.
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// Lexicographic rank of an increasing subset among `subsets(n, set.len())`.
pub fn subset_rank(n: usize, set: &[usize]) -> usize {
    let k = set.len();
    let mut rank = 0u64;
    let mut prev = 0;
    for (i, &c) in set.iter().enumerate() {
        for v in prev..c {
            rank += binomial(n - 1 - v, k - 1 - i);
        }
        prev = c + 1;
    }
    rank as usize
}

/// Complement of an increasing subset inside `{0, .., n-1}`.
pub fn complement(n: usize, set: &[usize]) -> Vec<usize> {
    (0..n).filter(|v| !set.contains(v)).collect()
}

/// Sign of the shuffle merging two disjoint increasing lists, `None` when the
/// lists overlap (in which case the wedge is zero and no sign exists).
pub fn shuffle_sign(left: &[usize], right: &[usize]) -> Option<i32> {
    debug_assert!(left.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(right.windows(2).all(|w| w[0] < w[1]));
    let mut inversions = 0usize;
    for &x in left {
        for &y in right {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// Matrix of the comultiplication splitting a wedge of degree `a` into
/// degrees `(b, a - b)` over `K^ell`. Rows are indexed by ordered basis pairs
/// (outer factor lexicographic, then inner), columns by the degree-`a` basis;
/// the entry at `((J, J'), I)` is the shuffle sign when `I = J ⊔ J'` and zero
/// otherwise.
pub struct SplitMatrix {
    pub row_pairs: Vec<(Vec<usize>, Vec<usize>)>,
    pub col_sets: Vec<Vec<usize>>,
    pub entries: Vec<Vec<i64>>,
}

pub fn comultiply(a: usize, b: usize, ell: usize) -> SplitMatrix {
    assert!(b <= a, "split degree exceeds total degree");
    let firsts = subsets(ell, b);
    let seconds = subsets(ell, a - b);
    let cols = subsets(ell, a);
    let mut row_pairs = Vec::with_capacity(firsts.len() * seconds.len());
    for j in &firsts {
        for jp in &seconds {
            row_pairs.push((j.clone(), jp.clone()));
        }
    }
    let entries = row_pairs
        .iter()
        .map(|(j, jp)| {
            cols.iter()
                .map(|i| match shuffle_sign(j, jp) {
                    Some(s) if is_union(j, jp, i) => s as i64,
                    _ => 0,
                })
                .collect()
        })
        .collect();
    SplitMatrix {
        row_pairs,
        col_sets: cols,
        entries,
    }
}

fn is_union(a: &[usize], b: &[usize], whole: &[usize]) -> bool {
    let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
    merged.sort_unstable();
    merged == whole
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(20, 10), 184_756);
    }

    #[test]
    fn subsets_are_lexicographic_and_ranked_consistently() {
        assert_eq!(
            subsets(3, 2),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        assert_eq!(subsets(2, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(1, 2).is_empty());
        for n in 0..6 {
            for k in 0..=n {
                for (r, s) in subsets(n, k).iter().enumerate() {
                    assert_eq!(subset_rank(n, s), r);
                }
            }
        }
    }

    #[test]
    fn shuffle_sign_examples() {
        assert_eq!(shuffle_sign(&[0], &[1]), Some(1));
        assert_eq!(shuffle_sign(&[1], &[0]), Some(-1));
        assert_eq!(shuffle_sign(&[0, 2], &[1]), Some(-1));
        assert_eq!(shuffle_sign(&[], &[0, 1, 2]), Some(1));
        assert_eq!(shuffle_sign(&[0, 1], &[1]), None);
    }

    #[test]
    fn shuffle_sign_antisymmetry() {
        for n in 1..6 {
            for a in 0..=n {
                for i in subsets(n, a) {
                    let rest = complement(n, &i);
                    for b in 0..=rest.len() {
                        for j_pick in subsets(rest.len(), b) {
                            let j: Vec<usize> =
                                j_pick.iter().map(|&p| rest[p]).collect();
                            let s1 = shuffle_sign(&i, &j).unwrap();
                            let s2 = shuffle_sign(&j, &i).unwrap();
                            let expect = if (a * b) % 2 == 0 { 1 } else { -1 };
                            assert_eq!(s1 * s2, expect);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn comultiply_splits_a_two_wedge() {
        // Splitting e0 ∧ e1 into (1,1): e0 ⊗ e1 - e1 ⊗ e0.
        let m = comultiply(2, 1, 2);
        assert_eq!(m.col_sets, vec![vec![0, 1]]);
        let mut seen = BTreeMap::new();
        for (row, (j, jp)) in m.row_pairs.iter().enumerate() {
            seen.insert((j.clone(), jp.clone()), m.entries[row][0]);
        }
        assert_eq!(seen[&(vec![0], vec![1])], 1);
        assert_eq!(seen[&(vec![1], vec![0])], -1);
        assert_eq!(seen[&(vec![0], vec![0])], 0);
        assert_eq!(seen[&(vec![1], vec![1])], 0);
    }

    #[test]
    fn comultiply_identity_split() {
        let m = comultiply(2, 2, 3);
        // Splitting off everything tensors with the empty wedge; the matrix
        // is a permutation-free identity.
        for (row, (j, jp)) in m.row_pairs.iter().enumerate() {
            assert!(jp.is_empty());
            for (col, i) in m.col_sets.iter().enumerate() {
                let expect = if j == i { 1 } else { 0 };
                assert_eq!(m.entries[row][col], expect);
            }
        }
    }

    #[test]
    fn comultiply_empty_when_degree_exceeds_dimension() {
        let m = comultiply(3, 1, 2);
        assert!(m.col_sets.is_empty());
    }

    /// Splitting a → (b, a-b) and then the first factor b → (c, b-c) agrees
    /// with splitting a → (c, a-c) and then the second factor; both compute
    /// the full three-way shuffle sum. Checked exhaustively for ell <= 4.
    #[test]
    fn comultiply_is_coassociative() {
        for ell in 1..=4usize {
            for a in 0..=ell {
                for b in 0..=a {
                    for c in 0..=b {
                        let mut lhs: BTreeMap<(Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>), i64> =
                            BTreeMap::new();
                        let mut rhs = lhs.clone();
                        let outer1 = comultiply(a, b, ell);
                        for (col, i) in outer1.col_sets.iter().enumerate() {
                            for (row, (j, rest1)) in outer1.row_pairs.iter().enumerate() {
                                let s1 = outer1.entries[row][col];
                                if s1 == 0 {
                                    continue;
                                }
                                let inner = comultiply(b, c, ell);
                                let jcol = inner
                                    .col_sets
                                    .iter()
                                    .position(|s| s == j)
                                    .expect("subset present");
                                for (irow, (k, rest2)) in inner.row_pairs.iter().enumerate() {
                                    let s2 = inner.entries[irow][jcol];
                                    if s2 == 0 {
                                        continue;
                                    }
                                    *lhs.entry((
                                        i.clone(),
                                        k.clone(),
                                        rest2.clone(),
                                        rest1.clone(),
                                    ))
                                    .or_insert(0) += s1 * s2;
                                }
                            }
                        }
                        let outer2 = comultiply(a, c, ell);
                        for (col, i) in outer2.col_sets.iter().enumerate() {
                            for (row, (k, rest)) in outer2.row_pairs.iter().enumerate() {
                                let s1 = outer2.entries[row][col];
                                if s1 == 0 {
                                    continue;
                                }
                                let inner = comultiply(a - c, b - c, ell);
                                let rcol = inner
                                    .col_sets
                                    .iter()
                                    .position(|s| s == rest)
                                    .expect("subset present");
                                for (irow, (mid, last)) in inner.row_pairs.iter().enumerate() {
                                    let s2 = inner.entries[irow][rcol];
                                    if s2 == 0 {
                                        continue;
                                    }
                                    *rhs.entry((
                                        i.clone(),
                                        k.clone(),
                                        mid.clone(),
                                        last.clone(),
                                    ))
                                    .or_insert(0) += s1 * s2;
                                }
                            }
                        }
                        lhs.retain(|_, v| *v != 0);
                        rhs.retain(|_, v| *v != 0);
                        assert_eq!(lhs, rhs, "coassociativity at ell={ell} a={a} b={b} c={c}");
                    }
                }
            }
        }
    }
}
