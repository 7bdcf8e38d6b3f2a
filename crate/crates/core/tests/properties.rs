use nalgebra::DVector;
use proptest::prelude::*;

use tfloc::covers::{
    cover_from_json, cover_to_json, gen_random_irregular, gen_regular_boxes, spreadness,
    sum_symbols, validate_cover,
};
use tfloc::io::{operator_from_bytes, operator_to_bytes, signal_from_csv, signal_to_csv};
use tfloc::linalg::{eigvalsh_desc, max_entry_deviation, CMatrix};
use tfloc::stft::{istft, stft};
use tfloc::{
    assemble_locop, gauss_window, tf_shift, threshold, Complex64, GridPoint, Signal, Symbol,
};

const L: usize = 8;

fn signal(len: usize) -> impl Strategy<Value = Signal> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len).prop_map(|v| {
        Signal::new(
            v.into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .unwrap()
    })
}

fn point(len: usize) -> impl Strategy<Value = GridPoint> {
    (0..len, 0..len).prop_map(|(x, xi)| GridPoint::new(x, xi))
}

/// Dense nonnegative symbol with roughly half the cells switched on.
fn dense_values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..2.0f64], len * len)
        .prop_filter("empty support", |v| v.iter().any(|&x| x > 0.0))
}

fn symbol(values: &[f64]) -> Symbol {
    Symbol::from_dense(L, GridPoint::ORIGIN, values).unwrap()
}

fn min_eig(m: &CMatrix) -> f64 {
    *eigvalsh_desc(m).unwrap().last().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stft_is_isometric_up_to_l(f in signal(L)) {
        let phi = gauss_window(L).unwrap();
        let v = stft(&f, &phi).unwrap();
        prop_assert!((v.energy() - L as f64 * f.norm_squared()).abs() <= 1e-9 * L as f64);
    }

    #[test]
    fn istft_inverts_stft(f in signal(L)) {
        let phi = gauss_window(L).unwrap();
        let back = istft(&stft(&f, &phi).unwrap(), &phi).unwrap();
        let err = (back.samples() - f.samples()).norm();
        prop_assert!(err <= 1e-10 * f.norm().max(1e-300) || err <= 1e-14);
    }

    #[test]
    fn stft_shift_covariance(f in signal(L), z in point(L), w in point(L)) {
        let phi = gauss_window(L).unwrap();
        let shifted = stft(&tf_shift(L, z, &f).unwrap(), &phi).unwrap();
        let base = stft(&f, &phi).unwrap();
        let back = GridPoint::new((w.x + L - z.x) % L, (w.xi + L - z.xi) % L);
        prop_assert!((shifted.get(w).norm() - base.get(back).norm()).abs() <= 1e-10);
    }

    #[test]
    fn tf_shift_is_unitary(f in signal(L), z in point(L)) {
        let g = tf_shift(L, z, &f).unwrap();
        prop_assert!((g.norm() - f.norm()).abs() <= 1e-12 * f.norm().max(1.0));
    }

    #[test]
    fn assembly_is_linear(a in dense_values(L), b in dense_values(L)) {
        let phi = gauss_window(L).unwrap();
        let (sa, sb) = (symbol(&a), symbol(&b));
        let sum = assemble_locop(&sa.add(&sb).unwrap(), &phi).unwrap();
        let parts = assemble_locop(&sa, &phi).unwrap().matrix() + assemble_locop(&sb, &phi).unwrap().matrix();
        prop_assert!(max_entry_deviation(sum.matrix(), &parts) <= 1e-12);
    }

    #[test]
    fn trace_and_norm_bound(a in dense_values(L)) {
        let phi = gauss_window(L).unwrap();
        let eta = symbol(&a);
        let h = assemble_locop(&eta, &phi).unwrap();
        let expected = eta.mass() / L as f64;
        prop_assert!((h.trace() - expected).abs() <= 1e-10 * expected);
        let s = h.spectrum().unwrap();
        prop_assert!(s.top() <= eta.sup_norm() + 1e-9);
        prop_assert!(s.bottom() >= -1e-9);
    }

    #[test]
    fn monotone_in_symbol(a in dense_values(L), extra in dense_values(L)) {
        let phi = gauss_window(L).unwrap();
        let lo = symbol(&a);
        let hi = lo.add(&symbol(&extra)).unwrap();
        let diff = assemble_locop(&hi, &phi).unwrap().matrix() - assemble_locop(&lo, &phi).unwrap().matrix();
        prop_assert!(min_eig(&diff) >= -1e-9);
    }

    #[test]
    fn thresholding_sandwich(a in dense_values(L), eps in 0.0..1.0f64, f in signal(L)) {
        let phi = gauss_window(L).unwrap();
        let h = assemble_locop(&symbol(&a), &phi).unwrap();
        let t = threshold(&h, eps).unwrap();
        let full = h.apply(f.samples()).norm();
        let cut = t.apply(f.samples()).norm();
        prop_assert!(cut <= full + 1e-9);
        prop_assert!(full <= cut + eps * f.norm() + 1e-9);
    }

    #[test]
    fn courant_bound(a in dense_values(L), n in 1usize..4, seed in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), L * 3)) {
        let phi = gauss_window(L).unwrap();
        let h = assemble_locop(&symbol(&a), &phi).unwrap();
        let cols: Vec<DVector<Complex64>> = seed
            .chunks(L)
            .take(n)
            .map(|c| DVector::from_iterator(L, c.iter().map(|&(re, im)| Complex64::new(re, im))))
            .collect();
        let q = CMatrix::from_columns(&cols).qr().q();
        let form: f64 = (0..n).map(|j| h.quadratic_form(&q.column(j).into_owned())).sum();
        let s = h.spectrum().unwrap();
        let best: f64 = s.eigenvalues[..n].iter().sum();
        prop_assert!(form <= best + 1e-8);
        let attained: f64 = (0..n).map(|k| h.quadratic_form(&s.vector(k))).sum();
        prop_assert!((attained - best).abs() <= 1e-9);
    }

    #[test]
    fn signal_csv_roundtrip(f in signal(L)) {
        let back = signal_from_csv(&signal_to_csv(&f)).unwrap();
        prop_assert_eq!(back.samples(), f.samples());
    }

    #[test]
    fn operator_binary_roundtrip(a in dense_values(L)) {
        let phi = gauss_window(L).unwrap();
        let h = assemble_locop(&symbol(&a), &phi).unwrap();
        let back = operator_from_bytes(&operator_to_bytes(h.matrix())).unwrap();
        prop_assert_eq!(&back, h.matrix());
    }

    #[test]
    fn irregular_cover_json_roundtrip(seed in any::<u64>(), t in 2usize..6, overlap in prop_oneof![Just(0.0), 0.0..0.5f64]) {
        let cover = gen_random_irregular(12, seed, t, overlap).unwrap();
        let back = cover_from_json(&cover_to_json(&cover)).unwrap();
        prop_assert_eq!(back.regions(), cover.regions());
        let sum = sum_symbols(&cover);
        prop_assert!(sum.min >= 1.0);
        let rep = validate_cover(&cover, 12, None, 1);
        prop_assert_eq!(rep.sum_min >= 1.0, rep.covers_grid);
        if overlap == 0.0 {
            prop_assert_eq!(sum.max, 1.0);
        }
    }

    #[test]
    fn regular_partitions_sum_to_one(bx in 1usize..5, by in 1usize..5) {
        let (bx, by) = ([1, 2, 3, 4, 6][bx], [1, 2, 3, 4, 6][by]);
        let cover = gen_regular_boxes(12, bx, by).unwrap();
        let sum = sum_symbols(&cover);
        prop_assert_eq!((sum.min, sum.max), (1.0, 1.0));
        prop_assert_eq!(spreadness(12, &cover.centers(), bx.min(by)), 1);
        let mass: f64 = cover.regions().iter().map(Symbol::mass).sum();
        prop_assert_eq!(mass, 144.0);
    }
}
