use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zakmub_core::linalg::norm;
use zakmub_core::mub::build_bases;
use zakmub_core::sic::{support_size, transmit, SicReceiver};
use zakmub_core::{c64, Coding, Mat, SuperposedFrame, TcmConfig};

fn bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random::<bool>() as u8).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noiseless_sic_recovers_both_frames(
        seed in any::<u64>(),
        mn in 4usize..48,
        // frame-2 leakage stays well inside the frame-1 decision margin here
        alpha in 0.9f64..0.99,
        delta in 0.0f64..=0.25,
        tcm in any::<bool>(),
        turbo in 0usize..3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coding = if tcm { Coding::Tcm } else { Coding::Uncoded };
        let code = TcmConfig::default();
        let k2 = support_size(delta, mn);
        let b1 = bits(&mut rng, 2 * mn);
        let b2 = bits(&mut rng, 2 * k2);
        let bases = build_bases(mn).unwrap();
        let frame = SuperposedFrame::from_bits(&b1, &b2, alpha, delta, coding, &code).unwrap();
        let x = transmit(&frame, Mat::<c64>::identity(mn, mn).as_ref(), &bases).unwrap();
        let rx = SicReceiver { bases: &bases, alpha, support: k2, coding, tcm: code, turbo_iters: turbo };
        let out = rx.receive_combined(&x).unwrap();
        prop_assert_eq!(out.passes.len(), turbo + 1);
        prop_assert_eq!(out.bits1(), &b1[..]);
        prop_assert_eq!(out.bits2(), &b2[..]);
    }

    #[test]
    fn energy_split(seed in any::<u64>(), alpha in 0.05f64..=1.0) {
        // with delta = 1 both frames are full and mutually orthogonal in expectation
        let mn = 64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = TcmConfig::default();
        let trials = 40;
        let mut e = 0.0;
        for _ in 0..trials {
            let b1 = bits(&mut rng, 2 * mn);
            let b2 = bits(&mut rng, 2 * mn);
            let frame = SuperposedFrame::from_bits(&b1, &b2, alpha, 1.0, Coding::Uncoded, &code).unwrap();
            let x = transmit(&frame, Mat::<c64>::identity(mn, mn).as_ref(), &build_bases(mn).unwrap()).unwrap();
            e += norm(&x).powi(2) / mn as f64;
        }
        prop_assert!((e / trials as f64 - 1.0).abs() < 0.05);
    }
}
