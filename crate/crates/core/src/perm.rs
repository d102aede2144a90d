//! Permutation tables for exhaustive constructions.
//!
//! Permutations are arrays `perm[position] = item`, positions 0-based here
//! (only user-facing list positions are 1-based). Ranks follow lexicographic
//! order, so rank 0 is the identity.

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Number of inverted pairs, i.e. swap distance from the identity.
pub fn inversions(perm: &[u8]) -> u64 {
    let mut count = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                count += 1;
            }
        }
    }
    count
}

/// Swap distance between two orderings of the same items.
pub fn kendall(a: &[u8], b: &[u8]) -> u64 {
    debug_assert_eq!(a.len(), b.len());
    let mut pos_b = vec![0u8; b.len()];
    for (p, &it) in b.iter().enumerate() {
        pos_b[it as usize] = p as u8;
    }
    let mapped: Vec<u8> = a.iter().map(|&it| pos_b[it as usize]).collect();
    inversions(&mapped)
}

/// `out[i] = outer[inner[i]]`.
pub fn compose(outer: &[u8], inner: &[u8]) -> Vec<u8> {
    inner.iter().map(|&i| outer[i as usize]).collect()
}

/// Enumeration of all permutations of `0..n` with adjacency under single
/// adjacent transpositions. Built once per `n` and shared.
pub struct PermTable {
    pub n: usize,
    /// All permutations in lexicographic order.
    pub perms: Vec<Vec<u8>>,
    /// `item_pos[rank][item]` = 0-based position of `item` in `perms[rank]`.
    pub item_pos: Vec<Vec<u8>>,
    /// Ranks reachable by swapping one adjacent pair.
    pub neighbors: Vec<Vec<u32>>,
}

impl PermTable {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1 && n <= 10, "permutation table sized for small n");
        let count = factorial(n);
        let mut perms = Vec::with_capacity(count);
        let mut current: Vec<u8> = (0..n as u8).collect();
        loop {
            perms.push(current.clone());
            if !next_permutation(&mut current) {
                break;
            }
        }
        debug_assert_eq!(perms.len(), count);
        let item_pos: Vec<Vec<u8>> = perms
            .iter()
            .map(|p| {
                let mut pos = vec![0u8; n];
                for (i, &it) in p.iter().enumerate() {
                    pos[it as usize] = i as u8;
                }
                pos
            })
            .collect();
        let table = PermTable { n, perms, item_pos, neighbors: Vec::new() };
        let neighbors = (0..count)
            .map(|r| {
                let mut out = Vec::with_capacity(n.saturating_sub(1));
                let mut p = table.perms[r].clone();
                for i in 0..n.saturating_sub(1) {
                    p.swap(i, i + 1);
                    out.push(table.rank_of(&p) as u32);
                    p.swap(i, i + 1);
                }
                out
            })
            .collect();
        PermTable { neighbors, ..table }
    }

    /// Lexicographic rank via the Lehmer code.
    pub fn rank_of(&self, perm: &[u8]) -> usize {
        debug_assert_eq!(perm.len(), self.n);
        let mut rank = 0;
        let mut fact = factorial(self.n);
        for i in 0..self.n {
            fact /= self.n - i;
            let smaller_right =
                perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
            rank += smaller_right * fact;
        }
        rank
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    /// 0-based position of `item` in the permutation with `rank`.
    pub fn position(&self, rank: usize, item: u8) -> usize {
        self.item_pos[rank][item as usize] as usize
    }
}

/// In-place lexicographic successor; false once the last permutation is hit.
fn next_permutation(p: &mut [u8]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_lexicographic_and_ranked() {
        let t = PermTable::new(3);
        assert_eq!(t.len(), 6);
        assert_eq!(t.perms[0], vec![0, 1, 2]);
        assert_eq!(t.perms[5], vec![2, 1, 0]);
        for (r, p) in t.perms.iter().enumerate() {
            assert_eq!(t.rank_of(p), r);
        }
    }

    #[test]
    fn neighbors_are_at_distance_one() {
        let t = PermTable::new(4);
        for r in 0..t.len() {
            assert_eq!(t.neighbors[r].len(), 3);
            for &nb in &t.neighbors[r] {
                assert_eq!(kendall(&t.perms[r], &t.perms[nb as usize]), 1);
            }
        }
    }

    #[test]
    fn kendall_matches_inversions_against_identity() {
        let t = PermTable::new(4);
        let id: Vec<u8> = (0..4).collect();
        for p in &t.perms {
            assert_eq!(kendall(&id, p), inversions(p));
            assert_eq!(kendall(p, &id), inversions(p));
        }
    }

    #[test]
    fn compose_relabels() {
        // outer = [2,0,1] applied to inner = [1,2,0] gives [0,1,2].
        assert_eq!(compose(&[2, 0, 1], &[1, 2, 0]), vec![0, 1, 2]);
    }

    #[test]
    fn positions_are_consistent() {
        let t = PermTable::new(5);
        for r in (0..t.len()).step_by(7) {
            for item in 0..5u8 {
                assert_eq!(t.perms[r][t.position(r, item)], item);
            }
        }
    }
}
