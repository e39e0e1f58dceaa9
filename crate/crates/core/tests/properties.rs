//! Property tests for the invariants of each module.

use fanobound::attack_sim::{run_game, Adversary, MechanismInstance};
use fanobound::fano::{
    best_generalized_fano, default_alpha_grid, fano_advantage_bound, generalized_fano_bound,
};
use fanobound::info_theory::{
    arimoto_information, entropy, mutual_information, renyi_entropy, ChannelMatrix, Prior,
};
use fanobound::mi_bounds::{
    gaussian_mi_bound_thm2, gaussian_mi_monte_carlo, rr_channel, rr_epsilon_dp, rr_exact_mi,
    Encodings, GaussianSpec, MiBound, MiKind, RdpCurve, RrSpec,
};
use proptest::prelude::*;

fn weight() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 6 => 1e-3..1.0f64]
}

fn prior_of(m: usize) -> impl Strategy<Value = Prior> {
    prop::collection::vec(1e-3..1.0f64, m).prop_map(|w| Prior::normalized(w).unwrap())
}

fn prior() -> impl Strategy<Value = Prior> {
    (2usize..8).prop_flat_map(prior_of)
}

fn channel(rows: usize, cols: usize) -> impl Strategy<Value = ChannelMatrix> {
    prop::collection::vec(prop::collection::vec(weight(), cols), rows).prop_map(|mut rows| {
        for r in &mut rows {
            if r.iter().sum::<f64>() == 0.0 {
                r[0] = 1.0;
            }
            let s: f64 = r.iter().sum();
            r.iter_mut().for_each(|w| *w /= s);
        }
        ChannelMatrix::from_rows(rows).unwrap()
    })
}

/// A prior together with a channel over the same candidates.
fn instance() -> impl Strategy<Value = (Prior, ChannelMatrix)> {
    (2usize..7, 2usize..7).prop_flat_map(|(m, k)| (prior_of(m), channel(m, k)))
}

fn mi(v: f64) -> MiBound {
    MiBound::supplied(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn information_is_nonnegative((p, ch) in instance(), alpha in 1.0..64.0f64) {
        prop_assert!(mutual_information(&p, &ch).unwrap() >= -1e-12);
        prop_assert!(arimoto_information(&p, &ch, alpha).unwrap() >= -1e-12);
    }

    #[test]
    fn data_processing((p, ch) in instance(), seed in any::<u64>()) {
        let n_out = 1 + (seed % ch.cols() as u64) as usize;
        let map: Vec<usize> = (0..ch.cols())
            .map(|y| ((seed >> (y % 32)) as usize + y) % n_out)
            .collect();
        let merged = ch.merge_columns(&map, n_out).unwrap();
        prop_assert!(
            mutual_information(&p, &merged).unwrap() <= mutual_information(&p, &ch).unwrap() + 1e-12
        );
    }

    #[test]
    fn continuity_at_order_one((p, ch) in instance()) {
        let i1 = mutual_information(&p, &ch).unwrap();
        let ia = arimoto_information(&p, &ch, 1.0 + 1e-4).unwrap();
        prop_assert!((ia - i1).abs() <= 1e-3, "I_(1+d) = {ia}, I = {i1}");
    }

    #[test]
    fn information_below_entropy((p, ch) in instance()) {
        prop_assert!(mutual_information(&p, &ch).unwrap() <= entropy(&p) + 1e-12);
    }

    #[test]
    fn candidate_permutation_invariance(
        (p, ch, perm) in instance().prop_flat_map(|(p, ch)| {
            let m = p.m();
            (Just(p), Just(ch), Just((0..m).collect::<Vec<_>>()).prop_shuffle())
        }),
        alpha in 1.0..16.0f64,
    ) {
        let pp = p.permuted(&perm).unwrap();
        let cp = ch.permute_rows(&perm).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
        prop_assert!(close(entropy(&p), entropy(&pp)));
        prop_assert!(close(renyi_entropy(&p, alpha).unwrap(), renyi_entropy(&pp, alpha).unwrap()));
        prop_assert!(close(mutual_information(&p, &ch).unwrap(), mutual_information(&pp, &cp).unwrap()));
        prop_assert!(close(
            arimoto_information(&p, &ch, alpha).unwrap(),
            arimoto_information(&pp, &cp, alpha).unwrap()
        ));
    }

    #[test]
    fn closed_form_gaussian_bound_dominance(p in prior(), delta in 0.0..5.0f64, sigma in 0.05..10.0f64) {
        let v = gaussian_mi_bound_thm2(&p, delta, sigma).unwrap().value();
        let thm1 = delta * delta / (2.0 * sigma * sigma);
        prop_assert!(v <= entropy(&p).min(thm1) + 1e-12, "thm2 {v} thm1 {thm1}");
    }

    #[test]
    fn closed_form_gaussian_bound_nonincreasing_in_sigma(p in prior(), delta in 0.0..5.0f64, s in 0.05..5.0f64, k in 1.0..4.0f64) {
        let a = gaussian_mi_bound_thm2(&p, delta, s).unwrap().value();
        let b = gaussian_mi_bound_thm2(&p, delta, s * k).unwrap().value();
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn rr_exact_mi_sandwich(m in 2usize..12, q in 0.0..=1.0f64, seed in any::<u64>()) {
        let w: Vec<f64> = (0..m).map(|i| 1.0 + ((seed >> (i % 48)) & 0xff) as f64).collect();
        let p = Prior::normalized(w).unwrap();
        let spec = RrSpec::new(q, m).unwrap();
        let v = rr_exact_mi(&spec, &p).unwrap().value();
        prop_assert!(v <= entropy(&p).min(rr_epsilon_dp(&spec)) + 1e-12);
    }

    #[test]
    fn rr_arimoto_below_pure_dp(p in prior(), q in 1e-3..=1.0f64, alpha in 1.0..=64.0f64) {
        let spec = RrSpec::new(q, p.m()).unwrap();
        let ia = arimoto_information(&p, &rr_channel(&spec), alpha).unwrap();
        prop_assert!(ia <= rr_epsilon_dp(&spec) + 1e-12, "I_a {ia} eps {}", rr_epsilon_dp(&spec));
    }

    #[test]
    fn fano_nondecreasing_in_budget(p in prior(), e1 in 0.0..3.0f64, de in 0.0..1.0f64) {
        let a = fano_advantage_bound(&mi(e1), &p).unwrap();
        let b = fano_advantage_bound(&mi(e1 + de), &p).unwrap();
        prop_assert!(b.advantage >= a.advantage, "{a:?} {b:?}");
    }

    #[test]
    fn generalized_reduces_at_order_one(p in prior(), eps in 0.0..3.0f64) {
        let a = fano_advantage_bound(&mi(eps), &p).unwrap();
        let g = generalized_fano_bound(&MiBound::new(eps, 1.0, MiKind::AnalyticBound, None, "").unwrap(), &p).unwrap();
        prop_assert!((a.advantage - g.advantage).abs() <= 1e-9);
        prop_assert!((a.t_star - g.t_star).abs() <= 1e-9);
    }

    #[test]
    fn outputs_are_clamped(p in prior(), eps in 0.0..5.0f64, alpha in 1.0..32.0f64) {
        let hi = 1.0 - 1.0 / p.m() as f64;
        let a = fano_advantage_bound(&mi(eps), &p).unwrap();
        let g = generalized_fano_bound(&MiBound::new(eps, alpha, MiKind::AnalyticBound, None, "").unwrap(), &p).unwrap();
        for b in [a, g] {
            prop_assert!((0.0..=1.0).contains(&b.advantage), "{b:?}");
            prop_assert!(b.t_star >= 0.0 && b.t_star <= hi, "{b:?}");
        }
    }

    #[test]
    fn best_order_never_worse_than_order_one(m in 2usize..200, slope in 1e-3..3.0f64) {
        let u = Prior::uniform(m).unwrap();
        let curve = RdpCurve::linear(slope).unwrap();
        let best = best_generalized_fano(&curve, &u, &default_alpha_grid()).unwrap();
        let one = fano_advantage_bound(&mi(slope), &u).unwrap();
        prop_assert!(best.advantage <= one.advantage + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulations_are_deterministic(q in 0.0..=1.0f64, m in 2usize..20, seed in any::<u64>()) {
        let p = Prior::uniform(m).unwrap();
        let mech = MechanismInstance::RandomizedResponse(RrSpec::new(q, m).unwrap());
        let a = run_game(&mech, Adversary::Map, &p, 2000, seed).unwrap();
        let b = run_game(&mech, Adversary::Map, &p, 2000, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn rr_fano_identity_on_grid() {
    for m in [2usize, 3, 10, 100] {
        let u = Prior::uniform(m).unwrap();
        for i in 0..=20 {
            let q = i as f64 * 0.05;
            let e = q - q / m as f64;
            let lhs = entropy(&u)
                - rr_exact_mi(&RrSpec::new(q, m).unwrap(), &u)
                    .unwrap()
                    .value();
            let hb = if e > 0.0 {
                -e * e.ln() - (1.0 - e) * (1.0 - e).ln()
            } else {
                0.0
            };
            let rhs = hb + e * ((m - 1) as f64).ln();
            assert!((lhs - rhs).abs() <= 1e-9, "m={m} q={q}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn monte_carlo_nonincreasing_in_sigma() {
    let enc = Encodings::one_hot(5).unwrap();
    let u = Prior::uniform(5).unwrap();
    let mut prev: Option<(f64, f64)> = None;
    for sigma in [0.5, 0.75, 1.0, 1.5, 2.0, 3.0] {
        let spec = GaussianSpec::new(enc.clone(), sigma, u.clone()).unwrap();
        let est = gaussian_mi_monte_carlo(&spec, 20_000, 11).unwrap();
        let se = est.stderr().unwrap();
        if let Some((v, s)) = prev {
            let combined = (s * s + se * se).sqrt();
            assert!(
                est.value() <= v + 3.0 * combined,
                "sigma={sigma}: {} after {v}",
                est.value()
            );
        }
        prev = Some((est.value(), se));
    }
}

#[test]
fn empirical_below_rr_bounds() {
    use fanobound::fano::rero_baseline_bound;
    use fanobound::mi_bounds::{mi_from_rdp, rr_rdp_curve};

    let m = 10;
    let u = Prior::uniform(m).unwrap();
    for i in 1..=9 {
        let spec = RrSpec::new(i as f64 / 10.0, m).unwrap();
        let curve = rr_rdp_curve(&spec);
        let bounds = [
            fano_advantage_bound(&rr_exact_mi(&spec, &u).unwrap(), &u)
                .unwrap()
                .advantage,
            fano_advantage_bound(&mi_from_rdp(&curve, 1.0).unwrap(), &u)
                .unwrap()
                .advantage,
            best_generalized_fano(&curve, &u, &default_alpha_grid())
                .unwrap()
                .advantage,
            rero_baseline_bound(&curve, &u).unwrap().advantage,
        ];
        let r = run_game(
            &MechanismInstance::RandomizedResponse(spec),
            Adversary::Map,
            &u,
            20_000,
            5,
        )
        .unwrap();
        let half = (r.ci_high - r.ci_low) / 2.0;
        for b in bounds {
            assert!(
                r.empirical_advantage <= b + 3.0 * half,
                "q={}: {} > {b}",
                spec.q(),
                r.empirical_advantage
            );
        }
    }
}
