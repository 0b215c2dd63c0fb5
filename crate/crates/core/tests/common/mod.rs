//! Oracles shared by the integration test targets.

use std::sync::Arc;

use curvlab::chart::multi_index::multi_indices;
use curvlab::chart::{ChartGrid, FormField};
use curvlab::geometry::FrameBundle;
use rand::{Rng, SeedableRng};

pub fn random_form(g: &Arc<ChartGrid>, degree: usize, rng: &mut impl Rng) -> FormField {
    let nc = multi_indices(g.dim(), degree).len();
    let w: Vec<(f64, f64)> = (0..nc).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.5..2.0))).collect();
    FormField::from_fn(g, degree, |x| {
        w.iter().map(|(a, f)| a * (f * x.iter().sum::<f64>() + a).sin() + 0.3 * a * x[0] * x[3]).collect()
    })
    .unwrap()
}

/// All permutations of `items` by Heap's algorithm.
pub fn heap_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    fn go(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k - 1 {
            go(k - 1, a, out);
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
        go(k - 1, a, out);
    }
    let mut a = items.to_vec();
    let mut out = Vec::new();
    go(a.len(), &mut a, &mut out);
    out
}

/// Sign from the cycle decomposition of `perm` viewed as a map of its
/// sorted entries.
pub fn cycle_sign(perm: &[usize]) -> f64 {
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    let pos: Vec<usize> = perm.iter().map(|v| sorted.iter().position(|s| s == v).unwrap()).collect();
    let mut seen = vec![false; pos.len()];
    let mut cycles = 0;
    for s in 0..pos.len() {
        if !seen[s] {
            cycles += 1;
            let mut j = s;
            while !seen[j] {
                seen[j] = true;
                j = pos[j];
            }
        }
    }
    if (pos.len() - cycles) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Value of a form (given by its coefficients) on coordinate vectors
/// e_{slots[0]}, …
pub fn eval_on_basis(n: usize, degree: usize, coeffs: &[f64], slots: &[usize]) -> f64 {
    let basis = multi_indices(n, degree);
    let mut sorted = slots.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return 0.0;
    }
    let r = basis.iter().position(|b| *b == sorted).unwrap();
    cycle_sign(slots) * coeffs[r]
}

/// Coefficient of a wedge of factors on e_J by the alternation formula.
pub fn wedge_on_basis(n: usize, factors: &[(usize, Vec<f64>)], j: &[usize]) -> f64 {
    let mut norm = 1.0;
    for (d, _) in factors {
        norm *= (1..=*d).product::<usize>() as f64;
    }
    let mut total = 0.0;
    for sigma in heap_permutations(&(0..j.len()).collect::<Vec<_>>()) {
        let s = cycle_sign(&sigma);
        let mut at = 0;
        let mut prod = 1.0;
        for (d, c) in factors {
            let slots: Vec<usize> = sigma[at..at + d].iter().map(|&t| j[t]).collect();
            prod *= eval_on_basis(n, *d, c, &slots);
            at += d;
        }
        total += s * prod;
    }
    total / norm
}

pub fn brute_force_phi(fb: &FrameBundle, i: usize, node: usize) -> Vec<f64> {
    let n = fb.dim();
    let n_omega = n - 2 * i - 1;
    let targets = multi_indices(n, n - 1);
    let mut out = vec![0.0; targets.len()];
    for rest in heap_permutations(&(1..n).collect::<Vec<_>>()) {
        let mut zeta = vec![0];
        zeta.extend(rest);
        let s = cycle_sign(&zeta);
        let mut factors: Vec<(usize, Vec<f64>)> = Vec::new();
        for &j in &zeta[1..=n_omega] {
            factors.push((1, fb.omega(0, j).unwrap().at(node).to_vec()));
        }
        for p in zeta[n_omega + 1..].chunks(2) {
            factors.push((2, fb.curvature(p[0], p[1]).unwrap().at(node).to_vec()));
        }
        for (t, j) in targets.iter().enumerate() {
            out[t] += s * wedge_on_basis(n, &factors, j);
        }
    }
    out
}

pub fn synthetic_bundle(seed: u64) -> FrameBundle {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g = ChartGrid::uniform(vec![0.1, 0.2, 0.3, 0.4], 0.15, vec![5, 5, 5, 5]).unwrap();
    let coframe: Vec<FormField> = (0..4)
        .map(|i| {
            let mut f = random_form(&g, 1, &mut rng).scale(0.1);
            for node in 0..g.node_count() {
                f.coeffs_mut()[node * 4 + i] += 1.0;
            }
            f
        })
        .collect();
    let conn = (0..6).map(|_| random_form(&g, 1, &mut rng)).collect();
    let curv = (0..6).map(|_| random_form(&g, 2, &mut rng)).collect();
    FrameBundle::from_parts(&g, coframe, conn, curv).unwrap()
}
