mod common;

use mmi_core::diameters::{partial_diameter, underline_diam};
use mmi_core::obsdiam::{obsdiam_exact, underline_obsdiam};

const TOL: f64 = 1e-9;

#[test]
fn multivariable_values_lie_between_single_parameter_values() {
    for seed in 0..60u64 {
        let s = common::space(seed, 6);
        let mut r = common::rng(seed);
        let k = 1 + (seed as usize % 3);
        let a = common::alphas(&mut r, k);
        let (lo, hi) = (a.linf(), a.l1());
        let ud = underline_diam(&s, &a).unwrap().value.to_f64();
        assert!(partial_diameter(&s, lo).unwrap() <= ud + TOL, "seed {seed}");
        assert!(ud <= partial_diameter(&s, hi).unwrap() + TOL, "seed {seed}");
        let uo = underline_obsdiam(&s, &a).unwrap().value;
        assert!(obsdiam_exact(&s, lo).unwrap().value <= uo + TOL, "seed {seed}");
        assert!(uo <= obsdiam_exact(&s, hi).unwrap().value + TOL, "seed {seed}");
    }
}

#[test]
fn observable_diameter_is_below_partial_diameter() {
    for seed in 0..60u64 {
        let s = common::space(seed, 7);
        for alpha in [0.1, 0.35, 0.5, 0.8, 1.0] {
            let o = obsdiam_exact(&s, alpha).unwrap();
            let d = partial_diameter(&s, alpha).unwrap();
            assert!(o.value <= d + TOL, "seed {seed} alpha {alpha}");
            assert!(o.value <= o.upper_bound + TOL);
        }
    }
}
