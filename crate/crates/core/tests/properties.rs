//! Randomized invariants. Structures are drawn from a seeded generator so
//! that every case is reproducible from the reported seed.

mod common;

use std::sync::Arc;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use uroe::coarse::{induced_conjugation, MoritaIndex, PointMap};
use uroe::format;
use uroe::metric_order::{check_membership, precedes, restriction_metric};
use uroe::operators::{
    band_sparsity, block_embedding, certify_membership, decompose_banded, propagation, BlockAction,
    BlockRep, FiniteGroup, SparseOp,
};
use uroe::schur::{gram_kernel, schur_apply, uniform_hr_family};
use uroe::space::{greedy_clusters, greedy_net, validate_metric, ExtMetric, PointSet, INF};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn triangle_inequality_with_absorbing_infinity(seed in any::<u64>(), n in 1usize..25) {
        let d = random_metric(&mut rng(seed), n, 5);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    prop_assert!(d.get(x, z) <= d.get(x, y) + d.get(y, z));
                }
            }
        }
    }

    #[test]
    fn growth_profile_matches_ball_scans(seed in any::<u64>(), n in 1usize..25) {
        let d = random_metric(&mut rng(seed), n, 4);
        let profile = d.growth_profile();
        for (&r, &count) in profile.breakpoints.iter().zip(&profile.counts) {
            let brute = (0..n).map(|x| (0..n).filter(|&y| d.get(x, y) <= r).count()).max().unwrap();
            prop_assert_eq!(count, brute);
        }
    }

    #[test]
    fn greedy_net_covers_and_separates(seed in any::<u64>(), n in 1usize..30, l in 1u32..5) {
        let d = random_metric(&mut rng(seed), n, 3);
        let l = l as f64;
        let net = greedy_net(&d, l).unwrap();
        for x in 0..n {
            prop_assert!(net.contains(net.assignment[x]));
            prop_assert!(d.get(x, net.assignment[x]) <= l);
        }
        for (i, &u) in net.net.iter().enumerate() {
            for &v in &net.net[i + 1..] {
                prop_assert!(d.get(u, v) > l);
            }
        }
    }

    #[test]
    fn cluster_chains_are_disjoint_growing_balls(seed in any::<u64>(), n in 1usize..30, r in 1u32..3) {
        let d = random_metric(&mut rng(seed), n, 3);
        let r = r as f64;
        let chain = greedy_clusters(&d, r).unwrap();
        let sizes = chain.sizes();
        prop_assert!(sizes.windows(2).all(|w| w[0] < w[1]));
        for (i, &c) in chain.centers.iter().enumerate() {
            prop_assert_eq!(&chain.clusters[i], &d.ball(c, r));
            prop_assert!(d.diameter_of(&chain.clusters[i]) <= 2.0 * r);
            for &c2 in &chain.centers[i + 1..] {
                prop_assert!(d.get(c, c2) > 2.0 * r);
            }
        }
    }

    #[test]
    fn precedes_is_a_partial_order(seed in any::<u64>(), n in 1usize..12) {
        let mut g = rng(seed);
        let ms: Vec<ExtMetric> = (0..3).map(|_| random_metric(&mut g, n, 3)).collect();
        for a in &ms {
            prop_assert!(precedes(a, a).unwrap());
            for b in &ms {
                if precedes(a, b).unwrap() && precedes(b, a).unwrap() {
                    prop_assert_eq!(a, b);
                }
                for c in &ms {
                    if precedes(a, b).unwrap() && precedes(b, c).unwrap() {
                        prop_assert!(precedes(a, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn restrictions_are_members(seed in any::<u64>(), n in 1usize..20) {
        let mut g = rng(seed);
        let d = random_metric(&mut g, n, 3);
        let subset: Vec<usize> = (0..n).filter(|_| g.gen_bool(0.5)).collect();
        let r = restriction_metric(&d, &subset).unwrap();
        let cert = check_membership(&d, &r).unwrap();
        prop_assert!(cert.c() <= 1.0);
    }

    #[test]
    fn certified_metric_makes_propagation_one(seed in any::<u64>(), n in 1usize..30, k in 1usize..4) {
        let mut g = rng(seed);
        let d0 = random_metric(&mut g, n, 3);
        let t = random_banded(&mut g, &d0, k, 2.0);
        let cert = certify_membership(&t, &d0).unwrap();
        prop_assert!(propagation(&t, &cert.metric).unwrap() <= 1.0);
        let member = check_membership(&d0, &cert.metric).unwrap();
        prop_assert!(cert.s == 0.0 || member.c() <= cert.s);
    }

    #[test]
    fn decomposition_is_exact(seed in any::<u64>(), n in 1usize..30, k in 1usize..5) {
        let mut g = rng(seed);
        let d = random_metric(&mut g, n, 3);
        let t = random_banded(&mut g, &d, k, 3.0);
        let dec = decompose_banded(&t);
        prop_assert_eq!(dec.reconstruct(), t.clone());
        prop_assert_eq!(dec.terms.len(), band_sparsity(&t));
    }

    #[test]
    fn schur_products_keep_propagation(seed in any::<u64>(), n in 1usize..25) {
        let mut g = rng(seed);
        let d = random_metric(&mut g, n, 3);
        let t = random_banded(&mut g, &d, 3, 2.0);
        let k = gram_kernel(&uniform_hr_family(&d)).unwrap();
        let m = schur_apply(&k, &t).unwrap();
        prop_assert!(propagation(&m, &d).unwrap() <= propagation(&t, &d).unwrap());
        prop_assert!(k.min_eigenvalue() >= -1e-9);
    }

    #[test]
    fn morita_round_trip(seed in any::<u64>(), n in 1usize..20, window in 1usize..7) {
        let mut g = rng(seed);
        let targets = g.gen_range(1..=n);
        let images: Vec<usize> = (0..n).map(|_| g.gen_range(0..targets)).collect();
        let f = PointMap::new(Arc::new(PointSet::range(n)), Arc::new(PointSet::range(targets)), images).unwrap();
        let subset: Vec<usize> = (0..n).filter(|_| g.gen_bool(0.7)).collect();
        let idx = MoritaIndex::new(f, &subset).unwrap();
        for &x in idx.subset() {
            for j in 0..window {
                let (y, m) = idx.forward(x, j).unwrap();
                prop_assert!(m < window * idx.n(y));
                prop_assert_eq!(idx.inverse(y, m).unwrap(), (x, j));
            }
        }
        // the identity on the window goes to the identity on the image slots
        let src = idx.source_points(window);
        let image = induced_conjugation(&idx, &SparseOp::identity(Arc::clone(&src)), window, None).unwrap();
        prop_assert_eq!(image.nnz(), src.len());
        prop_assert!(image.entries().all(|(a, b, v)| a == b && v.re == 1.0 && v.im == 0.0));
    }

    #[test]
    fn cyclic_block_embeddings_are_representations(seed in any::<u64>(), order in 1usize..7) {
        let mut g = rng(seed);
        let group = FiniteGroup::cyclic(order);
        let copies = g.gen_range(1..=3);
        let points = Arc::new(PointSet::range(copies * order));
        let blocks = (0..copies)
            .map(|c| BlockAction::regular(&group, (c * order..(c + 1) * order).collect()).unwrap())
            .collect();
        let rep = BlockRep::new(Arc::clone(&points), group.clone(), blocks).unwrap();
        let phi: Vec<SparseOp> = (0..order).map(|h| block_embedding(&rep, h).unwrap()).collect();
        for a in 0..order {
            for b in 0..order {
                prop_assert_eq!(&phi[group.mul(a, b)], &phi[a].mul(&phi[b]).unwrap());
            }
            prop_assert_eq!(phi[a].adjoint().mul(&phi[a]).unwrap(), SparseOp::identity(Arc::clone(&points)));
        }
    }

    #[test]
    fn metric_files_round_trip(seed in any::<u64>(), n in 1usize..15) {
        let d = random_metric(&mut rng(seed), n, 9);
        let text = format::write_emx(&d);
        let back = validate_metric(&format::parse_emx(&text).unwrap()).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(format::write_emx(&back), text);
        let table = format::write_emx_table(&d.to_table());
        prop_assert_eq!(format::write_emx_table(&format::parse_emx(&table).unwrap()), table);
    }

    #[test]
    fn operator_files_round_trip(seed in any::<u64>(), n in 1usize..15) {
        let mut g = rng(seed);
        let d = random_metric(&mut g, n, 3);
        let t = random_banded(&mut g, &d, 3, INF);
        let text = format::write_smx(&t);
        let back = format::parse_smx(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(format::write_smx(&back), text);
    }

    #[test]
    fn family_files_round_trip(seed in any::<u64>(), n in 1usize..15) {
        let d = random_metric(&mut rng(seed), n, 3);
        let xi = uniform_hr_family(&d);
        let text = format::write_hrf(&xi);
        let back = format::parse_hrf(&text).unwrap();
        prop_assert_eq!(back.vectors(), xi.vectors());
        prop_assert_eq!(format::write_hrf(&back), text);
    }
}
