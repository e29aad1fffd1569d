mod common;

use common::*;
use proptest::prelude::*;
use symflow::{parry_measure, top_entropy_sft};

proptest! {
    #[test]
    fn parry_has_maximal_entropy(s in arb_irreducible(8)) {
        let h = parry_measure(&s).unwrap().entropy();
        prop_assert!((h - top_entropy_sft(&s).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn cylinders_add_up(s in arb_irreducible(3), seed in any::<u64>()) {
        let mc = random_chain(&mut rng(seed), &s);
        for n in 1..=8 {
            let total: f64 = s.admissible_words(n).iter().map(|w| mc.word_measure(w)).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
        for n in 1..=5 {
            for w in s.admissible_words(n) {
                let mut ext = w.to_vec();
                ext.push(0);
                let split: f64 = s.successors(w[n - 1]).iter().map(|&j| {
                    ext[n] = j;
                    mc.word_measure(&ext)
                }).sum();
                prop_assert!((split - mc.word_measure(&w)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn block_entropy_identity(s in arb_irreducible(3), seed in any::<u64>()) {
        let mc = random_chain(&mut rng(seed), &s);
        let h1 = block_shannon(&s, &mc, 1);
        let h12 = block_shannon(&s, &mc, 12);
        prop_assert!((h12 - (h1 + 11.0 * mc.entropy())).abs() < 1e-9);
        prop_assert!(mc.entropy() <= (s.k() as f64).ln() + 1e-12);
    }

    #[test]
    fn random_chains_are_valid(s in arb_irreducible(6), seed in any::<u64>()) {
        let mc = random_chain(&mut rng(seed), &s);
        prop_assert!(mc.is_ergodic());
        prop_assert!(mc.stationarity_residual() < 1e-14);
        prop_assert!(mc.check_support(&s).is_ok());
    }
}

#[test]
fn parry_suite_of_twenty() {
    let mut r = rng(2024);
    for i in 0..40 {
        let s = random_irreducible(&mut r, 1 + i % 8);
        let mc = parry_measure(&s).unwrap();
        assert!(mc.is_ergodic());
        assert!((mc.entropy() - top_entropy_sft(&s).unwrap()).abs() <= 1e-9);
    }
}
