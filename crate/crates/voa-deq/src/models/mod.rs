//! Concrete algebra/module families: the rank-one Heisenberg algebra with its
//! Fock modules, and Virasoro vacuum algebras with Verma modules and their
//! simple quotients.

pub mod heisenberg;
pub mod virasoro;

/// All partitions of `0..=depth` with parts `>= min_part`, ordered by total,
/// then lexicographically descending within each total.
pub fn partitions_up_to(depth: i64, min_part: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for n in 0..=depth {
        let mut level = Vec::new();
        gen_parts(n, n, min_part, &mut Vec::new(), &mut level);
        level.sort();
        level.reverse();
        out.extend(level);
    }
    out
}

fn gen_parts(n: i64, max: i64, min_part: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if n == 0 {
        out.push(cur.clone());
        return;
    }
    let mut p = max.min(n);
    while p >= min_part {
        cur.push(p);
        gen_parts(n - p, p, min_part, cur, out);
        cur.pop();
        p -= 1;
    }
}

/// Run-length multiplicities of a descending partition: (part, count).
pub fn multiplicities(parts: &[i64]) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = Vec::new();
    for &p in parts {
        match out.last_mut() {
            Some((q, c)) if *q == p => *c += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        // p(0..7) = 1,1,2,3,5,7,11
        let all = partitions_up_to(6, 1);
        assert_eq!(all.len(), 1 + 1 + 2 + 3 + 5 + 7 + 11);
        // parts >= 2: 1,0,1,1,2,2,4 for n=0..6
        let v = partitions_up_to(6, 2);
        assert_eq!(v.len(), 1 + 0 + 1 + 1 + 2 + 2 + 4);
        assert_eq!(multiplicities(&[3, 2, 2, 1]), vec![(3, 1), (2, 2), (1, 1)]);
    }
}
