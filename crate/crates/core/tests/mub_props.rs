use proptest::prelude::*;
use zakmub_core::c64;
use zakmub_core::linalg::{adjoint_mat_vec, mat_vec, norm};
use zakmub_core::mub::{build_bases, verify_mub};

fn vec_of(n: usize) -> impl Strategy<Value = Vec<c64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(|v| v.into_iter().map(|(a, b)| c64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_is_unbiased(mn in 2usize..40) {
        let r = verify_mub(&build_bases(mn).unwrap(), 1e-12).unwrap();
        prop_assert!(r.passed(), "{:?}", r);
    }

    #[test]
    fn matched_filter_keeps_noise_power(noise in vec_of(23)) {
        let pair = build_bases(23).unwrap();
        for i in 0..2 {
            let z = adjoint_mat_vec(pair.get(i).as_ref(), &noise).unwrap();
            prop_assert!((norm(&z) - norm(&noise)).abs() <= 1e-12 * norm(&noise).max(1.0));
        }
    }

    #[test]
    fn cross_interference_is_flat(x in vec_of(17), hot in 0usize..17) {
        let pair = build_bases(17).unwrap();
        let cross = |v: &[c64]| adjoint_mat_vec(pair.s1.as_ref(), &mat_vec(pair.s2.as_ref(), v).unwrap()).unwrap();
        let l1: f64 = x.iter().map(|z| z.norm()).sum();
        for z in cross(&x) {
            prop_assert!(z.norm() <= l1 / 17f64.sqrt() + 1e-12);
        }
        let mut e = vec![c64::new(0.0, 0.0); 17];
        e[hot] = c64::new(1.0, 0.0);
        for z in cross(&e) {
            prop_assert!((z.norm() - 1.0 / 17f64.sqrt()).abs() <= 1e-12);
        }
    }
}
