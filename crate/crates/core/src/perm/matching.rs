//! Maximum bipartite matching by augmenting paths; the independent
//! zero-permanent oracle (permanent = 0 iff no perfect matching).

use super::SquareBitMatrix;

/// Size of a maximum matching between rows and columns.
pub fn max_matching_size(m: &SquareBitMatrix) -> usize {
    let n = m.n();
    // match_col[j] = row matched to column j
    let mut match_col: Vec<Option<usize>> = vec![None; n];

    fn augment(
        m: &SquareBitMatrix,
        row: usize,
        visited: &mut u64,
        match_col: &mut [Option<usize>],
    ) -> bool {
        let mut cols = m.rows()[row] & !*visited;
        while cols != 0 {
            let j = cols.trailing_zeros() as usize;
            cols &= cols - 1;
            *visited |= 1 << j;
            match match_col[j] {
                None => {
                    match_col[j] = Some(row);
                    return true;
                }
                Some(other) => {
                    if augment(m, other, visited, match_col) {
                        match_col[j] = Some(row);
                        return true;
                    }
                }
            }
        }
        false
    }

    let mut size = 0;
    for row in 0..n {
        let mut visited = 0u64;
        if augment(m, row, &mut visited, &mut match_col) {
            size += 1;
        }
    }
    size
}

pub fn has_perfect_matching(m: &SquareBitMatrix) -> bool {
    max_matching_size(m) == m.n()
}
