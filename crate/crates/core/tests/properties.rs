use proptest::prelude::*;

use semiband::generate::{gen_random_operator, gen_random_wce, perturb_off_block};
use semiband::io::parse_operator_json;
use semiband::oracle::symbolic_oracle;
use semiband::predicates::{is_sbp, is_scp};
use semiband::rational::int;
use semiband::report::{analyze_operator, AnalysisReport};
use semiband::wce::{decompose_wce, make_wce, Decomposition};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wce_round_trip(seed in any::<u64>(), n in 1usize..=9) {
        let form = gen_random_wce(seed, n);
        let t = form.to_operator();
        match decompose_wce(&t).unwrap() {
            Decomposition::Form(g) => prop_assert_eq!(g, form),
            Decomposition::NotSbp(w) => prop_assert!(false, "unexpected witness {:?}", w),
        }
    }

    #[test]
    fn projection_iff_pairings_are_one(seed in any::<u64>(), n in 1usize..=7, normalize in any::<bool>()) {
        let mut form = gen_random_wce(seed, n);
        if normalize {
            // rescale each psi_j so that <psi_j, u_j> = 1 where possible
            let psi = form
                .u()
                .iter()
                .zip(form.psi())
                .map(|(u, p)| {
                    let d: semiband::Rational = u.iter().zip(p.iter()).map(|(a, b)| a * b).sum();
                    if d == int(0) { p.clone() } else { p.scale(&(int(1) / d)) }
                })
                .collect();
            form = make_wce(form.space().clone(), form.blocks().to_vec(), form.u().to_vec(), psi).unwrap();
        }
        prop_assert_eq!(form.to_operator().is_projection(), form.pairings_are_one());
    }

    #[test]
    fn sbp_implies_scp(seed in any::<u64>(), n in 1usize..=6, density in 0.05f64..0.6) {
        let t = gen_random_operator(seed, n, density);
        if is_sbp(&t).unwrap().holds {
            prop_assert!(is_scp(&t).unwrap().holds);
        }
    }

    #[test]
    fn verdicts_match_oracle(seed in any::<u64>(), n in 1usize..=4, density in 0.1f64..0.7) {
        let t = gen_random_operator(seed, n, density);
        let o = symbolic_oracle(&t).unwrap();
        prop_assert_eq!(o.sbp, is_sbp(&t).unwrap().holds);
        prop_assert_eq!(o.scp, is_scp(&t).unwrap().holds);
    }

    #[test]
    fn witnesses_replay(seed in any::<u64>(), n in 2usize..=8) {
        let form = gen_random_wce(seed, n);
        if let Some(t) = perturb_off_block(&form, seed.wrapping_add(1)) {
            for v in [is_sbp(&t).unwrap(), is_scp(&t).unwrap()] {
                if let Some(w) = v.witness {
                    prop_assert!(!v.holds);
                    prop_assert!(w.replays(&t).unwrap());
                }
            }
            if let Decomposition::NotSbp(w) = decompose_wce(&t).unwrap() {
                prop_assert!(w.replays(&t).unwrap());
            }
        }
    }

    #[test]
    fn reports_round_trip(seed in any::<u64>(), n in 1usize..=5) {
        let t = gen_random_operator(seed, n, 0.4);
        let r = analyze_operator(&t, 16).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &r);
        let echoed = parse_operator_json(&serde_json::to_string(&back.input).unwrap()).unwrap();
        prop_assert_eq!(echoed, t);
    }
}
