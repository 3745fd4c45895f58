use std::collections::BTreeSet;

use proptest::prelude::*;
use randwalls::complex::skeleton_distance;
use randwalls::oracles::{oracle_distance, oracle_sublemma, random_subcomplex, tree_path, SublemmaOutcome};
use randwalls::pipeline::{sample_runs, Run};
use randwalls::seed::stream;
use randwalls::tiles::{balance, is_potile, shared_edges};
use randwalls::tracer::check_embedded;
use randwalls::walls::antipodal_walls;
use randwalls::{CellId, Q};

fn runs(ell: usize, seed: u64) -> Vec<(String, Run)> {
    sample_runs(ell, Q::new(3, 14), Q::new(1, 100), 6, seed).unwrap()
}

fn potiles(r: &Run) -> Vec<BTreeSet<CellId>> {
    let n = r.patch.n_cells() as u32;
    (1u32..1 << n)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(CellId).collect::<BTreeSet<_>>())
        .filter(|s| is_potile(&r.patch, s).unwrap_or(false))
        .collect()
}

fn tree_edges() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec(any::<prop::sample::Index>(), 1..=40)
        .prop_map(|ix| ix.iter().enumerate().map(|(i, x)| (x.index(i + 1), i + 1)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unbending_restores_antipodal_walls(seed in any::<u64>(), ell in prop::sample::select(vec![8usize, 20, 40])) {
        for (_, r) in runs(ell, seed) {
            let mut w = r.walls.clone();
            w.unbend(&r.patch, &r.walls.bends);
            prop_assert!(w.matchings().iter().all(|m| *m == antipodal_walls(ell)));
        }
    }

    #[test]
    fn gluing_a_potile_costs_at_most_a_quarter(seed in any::<u64>(), ell in prop::sample::select(vec![8usize, 20, 40])) {
        for (name, r) in runs(ell, seed) {
            let p = potiles(&r);
            for t in &p {
                for t2 in p.iter().filter(|t2| t2.is_disjoint(t)) {
                    let shared = shared_edges(&r.patch, t, t2).len() as i64;
                    if shared == 0 {
                        continue;
                    }
                    let union: BTreeSet<CellId> = t.union(t2).copied().collect();
                    let lhs = balance(&r.patch, &union);
                    let rhs = balance(&r.patch, t) - shared + ell as i64 / 4;
                    prop_assert!(lhs <= rhs, "{name}: {t:?} ∪ {t2:?}: {lhs} > {rhs}");
                }
            }
        }
    }

    #[test]
    fn admissible_walls_are_embedded(seed in any::<u64>(), ell in prop::sample::select(vec![8usize, 20, 40])) {
        for (name, r) in runs(ell, seed) {
            prop_assert!(r.traces.iter().all(|t| check_embedded(t).is_embedded()), "{name}");
            prop_assert!(r.returning.hits.is_empty(), "{name}");
        }
    }

    #[test]
    fn oracle_distance_matches_bfs(seed in any::<u64>()) {
        let mut rng = stream(seed, "prop-distance");
        for (_, r) in runs(20, seed) {
            let (sub, x, y) = random_subcomplex(&r.patch, &mut rng);
            prop_assert_eq!(oracle_distance(&r.patch, &sub, x, y).unwrap(), skeleton_distance(&r.patch, x, y, &sub).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sublemma_bound_holds(edges in tree_edges(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>(), extra in 0u32..4) {
        let n = edges.len() + 1;
        let alpha = tree_path(n, &edges, a.index(n), b.index(n)).unwrap();
        // The whole tree lies within 2·|edges| half units of any path.
        let mut q = 0;
        let outcome = loop {
            match oracle_sublemma(n, &edges, &alpha, q + extra) {
                SublemmaOutcome::Skipped(_) => q += 1,
                checked => break checked,
            }
        };
        let SublemmaOutcome::Checked { max, bound } = outcome else { unreachable!() };
        prop_assert!(max <= bound);
    }
}
