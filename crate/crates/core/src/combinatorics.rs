//! Exhaustive enumeration helpers backing the brute-force oracles.

/// Advances `perm` to the next permutation in lexicographic order.
/// Returns `false` (leaving `perm` sorted ascending) after the last one.
pub fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        perm.reverse();
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Calls `visit` once for every permutation of `0..n`, in lexicographic order.
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        visit(&perm);
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

/// Calls `visit` once for every simple directed cycle of length `>= 2` on `0..n`.
///
/// Each cycle is reported exactly once, rotated so that its smallest vertex
/// comes first.
pub fn for_each_simple_cycle(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut path = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for start in 0..n {
        path.clear();
        path.push(start);
        used[start] = true;
        extend_cycle(start, n, &mut path, &mut used, &mut visit);
        used[start] = false;
    }
}

fn extend_cycle(
    start: usize,
    n: usize,
    path: &mut Vec<usize>,
    used: &mut [bool],
    visit: &mut impl FnMut(&[usize]),
) {
    for next in start + 1..n {
        if used[next] {
            continue;
        }
        path.push(next);
        used[next] = true;
        visit(path);
        extend_cycle(start, n, path, used, visit);
        used[next] = false;
        path.pop();
    }
}

/// Splits a permutation into its non-trivial cycles (length `>= 2`), each
/// starting at its smallest element, ordered by that element.
pub fn permutation_cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut cycles = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(i);
            i = perm[i];
        }
        if cycle.len() > 1 {
            cycles.push(cycle);
        }
    }
    cycles
}

/// Rotates a cycle so its smallest vertex comes first.
pub fn canonical_rotation(cycle: &[usize]) -> Vec<usize> {
    let Some(pos) = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| v)
        .map(|(p, _)| p)
    else {
        return Vec::new();
    };
    cycle[pos..].iter().chain(&cycle[..pos]).copied().collect()
}
