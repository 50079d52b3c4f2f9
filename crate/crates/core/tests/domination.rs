mod common;

use mmi_core::diameters::{partial_diameter, underline_diam};
use mmi_core::obsdiam::{obsdiam_exact, underline_obsdiam};
use mmi_core::order::{dominates, DominationWitness};
use rand::Rng;

const TOL: f64 = 1e-9;

#[test]
fn invariants_are_monotone_along_the_order() {
    for seed in 0..40u64 {
        let y = common::space(seed, 6);
        let mut r = common::rng(seed);
        let m = r.random_range(1..=y.len());
        let class: Vec<usize> = (0..y.len()).map(|a| if a < m { a } else { r.random_range(0..m) }).collect();
        let x = common::quotient(&y, &class);
        // the projection itself is a witness, and the search must find one
        let proj = DominationWitness::new(&y, &x, class.iter().map(|&c| Some(c)).collect());
        assert!(proj.checked, "seed {seed}");
        let w = dominates(&y, &x).unwrap();
        assert!(w.witness().is_some_and(|w| w.checked), "seed {seed}");

        let a = common::alphas(&mut r, 2);
        for alpha in [0.3, 0.6, 0.9] {
            assert!(partial_diameter(&x, alpha).unwrap() <= partial_diameter(&y, alpha).unwrap() + TOL);
            assert!(obsdiam_exact(&x, alpha).unwrap().value <= obsdiam_exact(&y, alpha).unwrap().value + TOL);
        }
        assert!(underline_diam(&x, &a).unwrap().value.to_f64() <= underline_diam(&y, &a).unwrap().value.to_f64() + TOL);
        assert!(underline_obsdiam(&x, &a).unwrap().value <= underline_obsdiam(&y, &a).unwrap().value + TOL);
    }
}
