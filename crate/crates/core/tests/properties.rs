use proptest::prelude::*;
use rearrange_core::envelopes::{involution_quasiconcave, standard_nodes};
use rearrange_core::{CellSet, GridFunction, MFunction, Profile, SpaceSpec};

fn grid(max_cells: usize) -> impl Strategy<Value = GridFunction> {
    prop::collection::vec(-100.0f64..100.0, 1..=max_cells)
        .prop_filter("nonzero", |v| v.iter().any(|&x| x != 0.0))
        .prop_map(|v| GridFunction::new(v).unwrap())
}

fn spaces(n_cells: usize) -> Vec<SpaceSpec> {
    let nodes = standard_nodes(0, n_cells);
    vec![
        SpaceSpec::l1(),
        SpaceSpec::lp(1.5).unwrap(),
        SpaceSpec::lp(3.0).unwrap(),
        SpaceSpec::linf(),
        SpaceSpec::lorentz(MFunction::power(&nodes, 0.5).unwrap()).unwrap(),
        SpaceSpec::marcinkiewicz(MFunction::power(&nodes, 0.5).unwrap(), false),
        SpaceSpec::orlicz_exp_square(false),
    ]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn rearrangement_is_sorted_and_equimeasurable(x in grid(64)) {
        let r = x.rearrangement();
        prop_assert!(r.values().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(r.values().iter().all(|&v| v >= 0.0));
        prop_assert!(x.equimeasurable(&r, 0.0).unwrap());
        prop_assert!(close(r.l1_norm(), x.l1_norm()));
    }

    #[test]
    fn head_integral_is_concave_and_bounded(x in grid(48), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (ka, kb) = (x.head_integral(a).unwrap(), x.head_integral(b).unwrap());
        let mid = x.head_integral(0.5 * (a + b)).unwrap();
        prop_assert!(mid + 1e-9 >= 0.5 * (ka + kb));
        prop_assert!(ka <= x.l1_norm() + 1e-9);
        prop_assert!(ka <= a * x.linf_norm() + 1e-9);
    }

    #[test]
    fn head_and_tail_split_the_l1_norm(x in grid(48), t in 0.0f64..=1.0) {
        let p = Profile::of(&x);
        let l1 = SpaceSpec::l1();
        let tail = l1.norm_profile(&p.remove_head(t)).unwrap();
        prop_assert!(close(p.head_integral(t) + tail, x.l1_norm()));
        prop_assert!(close(l1.norm_profile(&p.truncate(t)).unwrap(), p.head_integral(t)));
    }

    #[test]
    fn norms_are_symmetric_homogeneous_and_subadditive(
        x in grid(32),
        c in -10.0f64..10.0,
        seed in any::<u64>(),
    ) {
        let n = x.n_cells();
        let mut perm: Vec<f64> = x.values().to_vec();
        perm.rotate_left((seed % n as u64) as usize);
        perm.reverse();
        let perm = GridFunction::new(perm).unwrap();
        let y = GridFunction::from_fn(n, |j| ((j as u64).wrapping_mul(seed | 1) % 17) as f64 - 8.0).unwrap();
        for s in spaces(n) {
            let nx = s.norm(&x).unwrap();
            prop_assert!(close(nx, s.norm(&perm).unwrap()), "{}", s.label());
            prop_assert!(close(s.norm(&x.scale(c).unwrap()).unwrap(), c.abs() * nx), "{}", s.label());
            let sum = s.norm(&x.add(&y).unwrap()).unwrap();
            prop_assert!(sum <= nx + s.norm(&y).unwrap() + 1e-9 * (1.0 + sum), "{}", s.label());
        }
    }

    #[test]
    fn normalized_norms_sit_between_l1_and_linf(x in grid(32)) {
        for s in spaces(x.n_cells()) {
            let v = s.normalized_norm(&x).unwrap();
            prop_assert!(x.l1_norm() <= v * (1.0 + 1e-10) + 1e-12, "{}", s.label());
            prop_assert!(v <= x.linf_norm() * (1.0 + 1e-10) + 1e-12, "{}", s.label());
        }
    }

    #[test]
    fn involution_of_powers_is_an_involution(a in 0.0f64..=1.0) {
        let nodes = standard_nodes(6, 16);
        let psi = MFunction::power(&nodes, a).unwrap();
        let star = involution_quasiconcave(&psi).unwrap();
        let back = involution_quasiconcave(&star).unwrap();
        for (u, v) in psi.values().iter().zip(back.values()) {
            prop_assert!((u - v).abs() < 1e-12);
        }
        for (&t, &s) in nodes.iter().zip(star.values()).skip(1) {
            prop_assert!((s - t.powf(1.0 - a)).abs() < 1e-12);
        }
    }

    #[test]
    fn cell_set_algebra(mask_a in prop::collection::vec(any::<bool>(), 16), mask_b in prop::collection::vec(any::<bool>(), 16)) {
        let a = CellSet::new(mask_a).unwrap();
        let b = CellSet::new(mask_b).unwrap();
        let u = a.union(&b).unwrap();
        let i = a.intersection(&b).unwrap();
        prop_assert_eq!(u.count() + i.count(), a.count() + b.count());
        let d = a.difference(&b).unwrap();
        prop_assert!(d.is_disjoint(&b));
        prop_assert_eq!(d.union(&i).unwrap(), a);
    }

    #[test]
    fn json_roundtrip(x in grid(32)) {
        prop_assert_eq!(GridFunction::from_json(&x.to_json()).unwrap(), x.clone());
        prop_assert_eq!(GridFunction::from_csv(&x.to_csv()).unwrap(), x);
    }
}
