use rayon::prelude::*;
use rgs_core::treecode::{p_x, p_z, BranchVector, LossEnumeration, MAX_ENUMERATED_QUBITS};

/// Every branch vector whose tree has at most `limit` physical qubits.
fn all_trees(limit: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, width: usize, used: usize, limit: usize, out: &mut Vec<Vec<usize>>) {
        for b in 1.. {
            let next = width * b;
            if used + next > limit {
                break;
            }
            prefix.push(b);
            out.push(prefix.clone());
            extend(prefix, next, used + next, limit, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, 0, limit, &mut out);
    out
}

#[test]
fn recursion_equals_enumeration_for_every_small_tree() {
    let trees = all_trees(MAX_ENUMERATED_QUBITS);
    assert!(trees.contains(&vec![2, 3, 2]));
    assert!(trees.contains(&vec![20]));
    let worst = trees
        .par_iter()
        .map(|v| {
            let b = BranchVector::new(v.clone()).unwrap();
            let oracle = LossEnumeration::new(&b).unwrap();
            let mut worst = 0.0f64;
            for eps in [0.05, 0.1, 0.3, 0.5] {
                let (px, pz) = oracle.at(eps);
                let dx = (p_x(&b, eps) - px).abs();
                let dz = (p_z(&b, eps) - pz).abs();
                assert!(dx < 1e-12 && dz < 1e-12, "{b} at {eps}: dx={dx:e} dz={dz:e}");
                worst = worst.max(dx).max(dz);
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    assert!(worst < 1e-12);
}

#[test]
fn enumeration_size_guard() {
    assert!(LossEnumeration::new(&BranchVector::new(vec![21]).unwrap()).is_err());
}
