mod common;

use mmi_core::obsdiam::{obsdiam_exact, obsdiam_lower, ObsMode, DEFAULT_BUDGET};

#[test]
fn heuristic_never_exceeds_exact() {
    for seed in 0..100u64 {
        let s = common::space(seed, 8);
        for alpha in [0.3, 0.5, 0.85] {
            let lo = obsdiam_lower(&s, alpha, DEFAULT_BUDGET, seed).unwrap();
            let ex = obsdiam_exact(&s, alpha).unwrap();
            assert_eq!(lo.mode, ObsMode::LowerBound);
            assert!(lo.value <= ex.value + 1e-9, "seed {seed} alpha {alpha}: {} > {}", lo.value, ex.value);
            assert!(ex.value <= ex.upper_bound + 1e-9);
        }
    }
}
