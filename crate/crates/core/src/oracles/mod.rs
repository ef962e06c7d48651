//! Exact `ω(G)` and `χ(G)`.

mod brute;
mod clique;
mod coloring;

pub use brute::{brute_force_chromatic, brute_force_clique, TooLarge, BRUTE_CHROMATIC_MAX_ORDER, BRUTE_CLIQUE_MAX_ORDER};
pub use clique::{degeneracy_order, max_clique, CliqueResult};
pub use coloring::{chromatic_number, chromatic_number_seeded, ColoringResult, SolverError, DEFAULT_NODE_BUDGET};

use crate::graph::Graph;

/// Exact labels of one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Labels {
    pub chromatic: usize,
    pub clique: usize,
}

/// `(χ(G), ω(G))`. The clique is computed first and seeds the coloring search.
pub fn label_graph(g: &Graph) -> Labels {
    label_graph_with_budget(g, u64::MAX).expect("unlimited budget")
}

pub fn label_graph_with_budget(g: &Graph, budget: u64) -> Result<Labels, SolverError> {
    let clique = max_clique(g);
    let coloring = chromatic_number_seeded(g, &clique, budget)?;
    Ok(Labels {
        chromatic: coloring.chromatic,
        clique: clique.size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_embedded, random_permutation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Graph on `n` vertices whose upper-triangle bits are `pattern`.
    fn from_pattern(n: usize, pattern: u32) -> Graph {
        let mut edges = Vec::new();
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if pattern & (1 << k) != 0 {
                    edges.push((i, j));
                }
                k += 1;
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    fn check_witnesses(g: &Graph) -> Labels {
        let c = max_clique(g);
        assert_eq!(c.witness.len(), c.size);
        assert!(g.is_clique(&c.witness), "{g:?}: {c:?}");
        let col = chromatic_number(g);
        assert!(col.is_valid_for(g), "{g:?}: {col:?}");
        assert!(col.chromatic >= c.size);
        Labels {
            chromatic: col.chromatic,
            clique: c.size,
        }
    }

    #[test]
    fn named_graph_examples() {
        let k4 = Graph::complete(4).unwrap();
        let c5 = Graph::cycle(5).unwrap();
        let petersen = Graph::petersen();
        assert_eq!(max_clique(&k4).size, 4);
        assert_eq!(max_clique(&c5).size, 2);
        assert_eq!(max_clique(&petersen).size, 2);

        assert_eq!(chromatic_number(&Graph::empty(1).unwrap()).chromatic, 1);
        assert_eq!(chromatic_number(&Graph::empty(7).unwrap()).chromatic, 1);
        assert_eq!(chromatic_number(&c5).chromatic, 3);
        assert_eq!(chromatic_number(&petersen).chromatic, 3);

        assert_eq!(brute_force_clique(&Graph::complete(3).unwrap()), Ok(3));
        assert_eq!(brute_force_clique(&Graph::from_edges(4, &[(1, 3)]).unwrap()), Ok(2));
        assert_eq!(brute_force_clique(&c5), Ok(2));
        assert_eq!(brute_force_chromatic(&k4), Ok(4));
        assert_eq!(brute_force_chromatic(&Graph::star(5).unwrap()), Ok(2));
        assert_eq!(brute_force_chromatic(&c5), Ok(3));

        // Petersen cross-checked by enumeration.
        assert_eq!(brute_force_clique(&petersen), Ok(2));
        assert_eq!(brute_force_chromatic(&petersen), Ok(3));
    }

    #[test]
    fn brute_force_guards() {
        assert!(brute_force_clique(&Graph::empty(17).unwrap()).is_err());
        assert!(brute_force_chromatic(&Graph::empty(11).unwrap()).is_err());
        assert_eq!(brute_force_clique(&Graph::empty(16).unwrap()), Ok(1));
    }

    #[test]
    fn label_examples() {
        let k5 = Graph::complete(5).unwrap().pad_to_order(50).unwrap();
        assert_eq!(label_graph(&k5), Labels { chromatic: 5, clique: 5 });
        assert_eq!(label_graph(&Graph::empty(50).unwrap()), Labels { chromatic: 1, clique: 1 });
        let c5 = Graph::cycle(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let p = random_permutation(5, &mut rng);
            assert_eq!(label_graph(&c5.permute(&p).unwrap()), Labels { chromatic: 3, clique: 2 });
        }
    }

    #[test]
    fn exhaustive_small_orders_match_brute_force() {
        for n in 1..=5usize {
            for pattern in 0..(1u32 << (n * (n - 1) / 2)) {
                let g = from_pattern(n, pattern);
                let l = check_witnesses(&g);
                assert_eq!(l.clique, brute_force_clique(&g).unwrap());
                assert_eq!(l.chromatic, brute_force_chromatic(&g).unwrap());
            }
        }
    }

    #[test]
    fn random_order_nine_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..600 {
            let pattern: u64 = rng.gen::<u64>() & ((1 << 36) - 1);
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..9 {
                for j in i + 1..9 {
                    if pattern & (1 << k) != 0 {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            let g = Graph::from_edges(9, &edges).unwrap();
            let l = check_witnesses(&g);
            assert_eq!(l.clique, brute_force_clique(&g).unwrap());
            assert_eq!(l.chromatic, brute_force_chromatic(&g).unwrap());
        }
    }

    #[test]
    fn sandwich_and_invariance_on_embedded_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..300 {
            let n = rng.gen_range(2..=30);
            let g = generate_embedded(n, 30, &mut rng).unwrap();
            let l = check_witnesses(&g);
            assert!(l.chromatic <= g.max_degree() + 1);
            let p = random_permutation(30, &mut rng);
            assert_eq!(label_graph(&g.permute(&p).unwrap()), l);
            assert_eq!(label_graph(&g.pad_to_order(40).unwrap()), l);
        }
    }

    #[test]
    fn budget_is_enforced() {
        // Mycielski-style graphs have ω = 2 and χ = 4, so the search cannot
        // stop at the clique bound.
        let grotzsch = mycielski(&Graph::cycle(5).unwrap());
        let clique = max_clique(&grotzsch);
        assert_eq!(clique.size, 2);
        assert_eq!(
            chromatic_number_seeded(&grotzsch, &clique, 1),
            Err(SolverError::BudgetExceeded { budget: 1 })
        );
        assert_eq!(chromatic_number(&grotzsch).chromatic, 4);
        assert_eq!(brute_force_chromatic(&Graph::complete(1).unwrap()), Ok(1));
    }

    fn mycielski(g: &Graph) -> Graph {
        let n = g.order();
        let mut edges: Vec<(usize, usize)> = g.edges().collect();
        for (u, v) in g.edges() {
            edges.push((u, n + v));
            edges.push((v, n + u));
        }
        for i in 0..n {
            edges.push((n + i, 2 * n));
        }
        Graph::from_edges(2 * n + 1, &edges).unwrap()
    }
}
