use proptest::prelude::*;

use nestkit::bounds::lower_bound;
use nestkit::direct::{fixture, strong_nest_pairs_1mod4, weak_nest_pairs, CATALOG};
use nestkit::levi::{
    colouring_to_nesting, nesting_to_colouring, verify_harmonious, HarmoniousColouring,
};
use nestkit::verify::{verify_bibd, verify_nesting};
use nestkit::{pair_counts, DesignParams, Mode};

const STRONG: &[&str] = &[
    "E4strong",
    "E9strong",
    "E7strong",
    "strongE6",
    "E12strong",
    "E10strong",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_pairs_meet_the_bound(v in 4usize..160) {
        let (d, n) = weak_nest_pairs(v).unwrap();
        prop_assert!(verify_bibd(&d).passed());
        prop_assert!(verify_nesting(&d, &n, Mode::Weak).passed());
        let bound = lower_bound(DesignParams::new(v, 2, 1), Mode::Weak).unwrap().value;
        prop_assert_eq!(n.w(), bound);
    }

    #[test]
    fn strong_pairs_meet_the_bound(t in 1usize..30) {
        let v = 4 * t + 1;
        let (d, n) = strong_nest_pairs_1mod4(v).unwrap();
        prop_assert!(verify_nesting(&d, &n, Mode::Strong).passed());
        let bound = lower_bound(DesignParams::new(v, 2, 1), Mode::Strong).unwrap().value;
        prop_assert_eq!(n.w(), bound);
    }

    #[test]
    fn weak_bound_never_exceeds_strong(v in 4usize..1000) {
        for (k, lambda) in [(2, 1), (3, 2)] {
            let p = DesignParams::new(v, k, lambda);
            if let (Ok(w), Ok(s)) = (lower_bound(p, Mode::Weak), lower_bound(p, Mode::Strong)) {
                prop_assert!(w.value <= s.value, "{:?}: weak {} > strong {}", p, w.value, s.value);
                prop_assert!(w.value > v);
            }
        }
    }

    #[test]
    fn nest_point_inside_its_block_is_caught(fx in 0..CATALOG.len(), pick in any::<prop::sample::Index>(), slot in 0usize..3) {
        let info = &CATALOG[fx];
        let (d, mut n) = info.load().unwrap();
        let b = pick.index(d.blocks.len());
        let points = d.blocks[b].points();
        n.assignment[b] = points[slot % points.len()];
        prop_assert!(!verify_nesting(&d, &n, Mode::Weak).passed());
    }

    #[test]
    fn augmented_pair_total(fx in 0..CATALOG.len()) {
        let (d, n) = CATALOG[fx].load().unwrap();
        let k = d.params.k as u64;
        let plain = pair_counts(&d.blocks, d.v());
        prop_assert_eq!(plain.total(), d.blocks.len() as u64 * k * (k - 1) / 2);
        let augmented: Vec<_> = d.blocks.iter().zip(&n.assignment).map(|(b, &p)| b.with_point(p).unwrap()).collect();
        let full = pair_counts(&augmented, n.w());
        prop_assert_eq!(full.total(), d.blocks.len() as u64 * (k + 1) * k / 2);
    }

    #[test]
    fn recoloured_nesting_stays_strong(fx in 0..STRONG.len(), seed in any::<u64>()) {
        let (d, n) = fixture(STRONG[fx]).unwrap();
        let c = nesting_to_colouring(&d, &n).unwrap();
        let mut perm: Vec<usize> = (0..c.palette).collect();
        // deterministic shuffle from the seed
        let mut s = seed | 1;
        for i in (1..perm.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            perm.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let recoloured = HarmoniousColouring {
            points: c.points.iter().map(|&x| perm[x]).collect(),
            blocks: c.blocks.iter().map(|&x| perm[x]).collect(),
            palette: c.palette,
            labels: None,
        };
        prop_assert!(verify_harmonious(&d, &recoloured).passed);
        let back = colouring_to_nesting(&d, &recoloured).unwrap();
        prop_assert_eq!(back.w(), n.w());
        prop_assert!(verify_nesting(&d, &back, Mode::Strong).passed());
    }
}
