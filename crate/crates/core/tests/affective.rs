mod common;

use common::{max_abs_diff, random_legislature, transpose_system_influence};
use polinflux::affective::{
    affective_dq_dsigma, affective_vote_share_closed_form, alpha_hat, omega, stronger_party,
    within_party_influence, ALPHA_HAT_MARGIN,
};
use polinflux::{
    alpha_star, build_legislature, dq_dalpha, modified_influence, polarization_thresholds,
    solve_affective_equilibrium, Legislature, ModelParams, Party, UtilitySpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Config {
    leg: Legislature,
    params: ModelParams,
}

fn random_config(rng: &mut ChaCha8Rng) -> Config {
    loop {
        let n_f = rng.gen_range(1..6);
        let n_a = rng.gen_range(1..6);
        let density = rng.gen_range(0.0..0.9);
        let weighted = rng.gen_bool(0.3);
        let leg = random_legislature(rng, n_f, n_a, density, weighted, false);
        let theta = rng.gen_range(0.005..0.05);
        let delta = rng.gen_range(0.05..0.95) / (2.0 * theta * leg.n() as f64);
        let params = ModelParams::new(
            theta,
            delta,
            rng.gen_range(0.0..5.0),
            0.0,
            rng.gen_range(10.0..200.0),
        )
        .unwrap();
        let i0 = within_party_influence(&leg, params.beta()).unwrap();
        if stronger_party(&i0).is_some() {
            return Config { leg, params };
        }
    }
}

fn hat_dense(leg: &Legislature, delta: f64, alpha: f64) -> Vec<Vec<f64>> {
    let n = leg.n();
    let n_f = leg.n_f();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if (i < n_f) == (j < n_f) {
                        delta * leg.weight(i, j)
                    } else {
                        -alpha
                    }
                })
                .collect()
        })
        .collect()
}

fn grid(hat: f64) -> Vec<f64> {
    (0..100).map(|k| hat * k as f64 / 100.0).collect()
}

#[test]
fn omega_form_matches_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let c = random_config(&mut rng);
        let i0 = within_party_influence(&c.leg, c.params.beta()).unwrap();
        let hat = alpha_hat(c.params.theta, i0.party_f_sum(), i0.party_a_sum());
        let alpha = rng.gen::<f64>() * hat * 0.999;
        let params = c.params.with_alpha(alpha);
        let inf = modified_influence(&c.leg, &params).unwrap();
        let oracle =
            transpose_system_influence(&hat_dense(&c.leg, params.delta, alpha), 2.0 * params.theta);
        assert!(max_abs_diff(inf.modified.entries(), &oracle) <= 1e-9);
        assert!(inf.omega_f > 0.0 && inf.omega_f <= 1.0);
        assert!(inf.omega_a > 0.0 && inf.omega_a <= 1.0);
    }
}

#[test]
fn omega_shapes_on_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let c = random_config(&mut rng);
        let i0 = within_party_influence(&c.leg, c.params.beta()).unwrap();
        let (f, a) = (i0.party_f_sum(), i0.party_a_sum());
        let strong = stronger_party(&i0).unwrap();
        let (own, other) = if strong == Party::F { (f, a) } else { (a, f) };
        let hat = alpha_hat(c.params.theta, f, a);
        let star = alpha_star(own, other, c.params.theta).unwrap();
        assert!(star > 0.0 && star < hat);
        let alphas = grid(hat);
        let infos: Vec<_> = alphas
            .iter()
            .map(|&x| modified_influence(&c.leg, &c.params.with_alpha(x)).unwrap())
            .collect();
        let weak_omega: Vec<f64> = infos.iter().map(|i| i.omega(strong.other())).collect();
        let strong_omega: Vec<f64> = infos.iter().map(|i| i.omega(strong)).collect();
        assert!(weak_omega.windows(2).all(|w| w[1] < w[0]));
        for (k, &x) in alphas.iter().enumerate().skip(1) {
            if x < star {
                assert!(strong_omega[k] < strong_omega[k - 1]);
            } else if alphas[k - 1] > star {
                assert!(strong_omega[k] > strong_omega[k - 1]);
            }
        }
        let argmin = (0..100)
            .min_by(|&x, &y| strong_omega[x].total_cmp(&strong_omega[y]))
            .unwrap();
        assert!((alphas[argmin] - star).abs() <= hat / 100.0);
        let gaps: Vec<f64> = infos.iter().map(|i| i.gap).collect();
        assert!(gaps.windows(2).all(|w| w[1] > w[0]));
        assert!((gaps[0] - (f - a).abs()).abs() < 1e-12);

        // one step short of the ceiling both omegas sit within about margin / (1 - weak / strong) of their limits
        let near = modified_influence(&c.leg, &c.params.with_alpha((1.0 - ALPHA_HAT_MARGIN) * hat))
            .unwrap();
        let scale = 2.0 * ALPHA_HAT_MARGIN / (1.0 - other / own);
        assert!(near.omega(strong.other()) > 0.0 && near.omega(strong.other()) < scale);
        assert!((near.omega(strong) - 1.0).abs() < scale);
        assert!((omega(0.0, own, other) - 1.0).abs() == 0.0);
    }
}

#[test]
fn sigma_slope_sign_and_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = UtilitySpec::sqrt();
    for _ in 0..50 {
        let c = random_config(&mut rng);
        let i0 = within_party_influence(&c.leg, c.params.beta()).unwrap();
        let sign = (i0.party_f_sum() - i0.party_a_sum()).signum();
        let hat = alpha_hat(c.params.theta, i0.party_f_sum(), i0.party_a_sum());
        let mut slopes = Vec::new();
        for alpha in grid(hat).into_iter().step_by(5) {
            let p = c.params.with_alpha(alpha);
            let slope = affective_dq_dsigma(&c.leg, &p).unwrap();
            assert_eq!(slope.signum(), sign);
            // vote share is affine in sigma
            let q0 = solve_affective_equilibrium(&c.leg, &p.with_sigma(0.0), &u)
                .unwrap()
                .vote_share;
            let q1 = solve_affective_equilibrium(&c.leg, &p.with_sigma(1.0), &u)
                .unwrap()
                .vote_share;
            assert!((q1 - q0 - slope).abs() < 1e-10);
            slopes.push(slope);
        }
        if sign > 0.0 {
            assert!(slopes.windows(2).all(|w| w[1] > w[0]));
        } else {
            assert!(slopes.windows(2).all(|w| w[1] < w[0]));
        }
    }
}

#[test]
fn investments_ignore_sigma_and_vote_share_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let u = UtilitySpec::power(0.4).unwrap();
    for _ in 0..50 {
        let c = random_config(&mut rng);
        let i0 = within_party_influence(&c.leg, c.params.beta()).unwrap();
        let alpha = 0.5 * alpha_hat(c.params.theta, i0.party_f_sum(), i0.party_a_sum());
        let p = c.params.with_alpha(alpha);
        let a = solve_affective_equilibrium(&c.leg, &p.with_sigma(0.0), &u).unwrap();
        let b = solve_affective_equilibrium(&c.leg, &p.with_sigma(7.0), &u).unwrap();
        assert_eq!(a.investments, b.investments);
        let inf = modified_influence(&c.leg, &p.with_sigma(7.0)).unwrap();
        let closed = affective_vote_share_closed_form(&inf, &b.investments, &p.with_sigma(7.0), &u);
        assert!((closed - b.vote_share).abs() < 1e-9);
    }
}

#[test]
fn small_polarization_hurts() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let u = UtilitySpec::sqrt();
    for _ in 0..50 {
        let c = random_config(&mut rng);
        let theta = c.params.theta;
        let i0 = within_party_influence(&c.leg, c.params.beta()).unwrap();
        let (f, a) = (i0.party_f_sum(), i0.party_a_sum());
        let eq = solve_affective_equilibrium(&c.leg, &c.params, &u).unwrap();
        let wu = |range: std::ops::Range<usize>| -> f64 {
            range.map(|i| i0[i] * u.value(eq.investments[i])).sum()
        };
        let w_f = wu(0..c.leg.n_f());
        let w_a = wu(c.leg.n_f()..c.leg.n());
        // at alpha = 0 the omega slopes are -2 theta I0_{P'} and the sigma term vanishes
        let limit = -2.0 * theta * theta * (a * w_f + f * w_a);
        let d = dq_dalpha(&c.leg, &c.params, &u).unwrap();
        assert!(d < 0.0);
        assert!((d - limit).abs() <= 1e-12 * limit.abs());
    }
}

#[test]
fn symmetric_parties_lose_vote_share() {
    let leg =
        build_legislature(2, 2, &[(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)]).unwrap();
    let params = ModelParams::new(0.03, 0.3, 0.0, 0.0, 100.0).unwrap();
    let u = UtilitySpec::sqrt();
    let q0 = solve_affective_equilibrium(&leg, &params, &u)
        .unwrap()
        .vote_share;
    let i0 = within_party_influence(&leg, params.beta()).unwrap();
    let hat = alpha_hat(params.theta, i0.party_f_sum(), i0.party_a_sum());
    for alpha in grid(hat).into_iter().skip(1) {
        let p = params.with_alpha(alpha);
        assert!(
            solve_affective_equilibrium(&leg, &p, &u)
                .unwrap()
                .vote_share
                < q0
        );
        assert!(dq_dalpha(&leg, &p, &u).unwrap() < 0.0);
        assert_eq!(affective_dq_dsigma(&leg, &p).unwrap(), 0.0);
    }
    let t = polarization_thresholds(&leg, &params, &u).unwrap();
    assert_eq!((t.sigma_1, t.sigma_2, t.sigma_3), (None, None, None));
}

fn vote_share(leg: &Legislature, params: &ModelParams, u: &UtilitySpec) -> f64 {
    solve_affective_equilibrium(leg, params, u)
        .unwrap()
        .vote_share
}

#[test]
fn thresholds_separate_outcomes() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let u = UtilitySpec::sqrt();
    let mut checked = [0usize; 2];
    for _ in 0..60 {
        let c = random_config(&mut rng);
        let t = polarization_thresholds(&c.leg, &c.params, &u).unwrap();
        let near = t.alpha_near_hat;
        let gain = |sigma: f64| {
            let p = c.params.with_sigma(sigma);
            vote_share(&c.leg, &p.with_alpha(near), &u) - vote_share(&c.leg, &p.with_alpha(0.0), &u)
        };
        let slope_near = |sigma: f64| {
            dq_dalpha(&c.leg, &c.params.with_sigma(sigma).with_alpha(near), &u).unwrap()
        };
        match t.stronger.unwrap() {
            Party::F => {
                let s2 = t.sigma_2.unwrap();
                assert!(t.sigma_1.is_none() && t.sigma_3.is_none());
                // the gain is affine in sigma with slope theta I0_A
                for offset in [0.05, 1.0] {
                    if s2 + offset >= 0.0 {
                        assert!(gain(s2 + offset) > 0.0);
                    }
                    if s2 - offset >= 0.0 {
                        assert!(gain(s2 - offset) < 0.0);
                    }
                }
                assert!(slope_near(c.params.sigma) > 0.0);
                checked[1] += 1;
            }
            Party::A => {
                let (s1, s3) = (t.sigma_1.unwrap(), t.sigma_3.unwrap());
                assert!(t.sigma_2.is_none());
                for offset in [0.05, 1.0] {
                    if s1 - offset >= 0.0 {
                        assert!(slope_near(s1 - offset) > 0.0);
                    }
                    assert!(slope_near(s1 + offset) < 0.0);
                }
                // the A-only optimum never beats the joint one, so the threshold is never positive
                assert!(s3 <= 1e-9, "{s3}");
                for sigma in [0.0, c.params.sigma, s3.abs()] {
                    assert!(gain(sigma) < 0.0);
                }
                checked[0] += 1;
            }
        }
    }
    assert!(checked.iter().all(|c| *c > 0), "{checked:?}");
}

#[test]
fn witness_above_sigma_2() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let u = UtilitySpec::sqrt();
    let mut found = 0;
    while found < 10 {
        let c = random_config(&mut rng);
        let t = polarization_thresholds(&c.leg, &c.params, &u).unwrap();
        let Some(s2) = t.sigma_2 else { continue };
        // sigma_2 is never negative: dropping A from the allocation cannot raise the joint optimum
        assert!(s2 >= -1e-9);
        let p = c.params.with_sigma(s2 + 0.5);
        let base = vote_share(&c.leg, &p.with_alpha(0.0), &u);
        let hat = t.alpha_near_hat / (1.0 - ALPHA_HAT_MARGIN);
        let mut alphas = grid(hat);
        alphas.push(t.alpha_near_hat);
        assert!(alphas
            .into_iter()
            .any(|alpha| vote_share(&c.leg, &p.with_alpha(alpha), &u) > base));
        found += 1;
    }
}
