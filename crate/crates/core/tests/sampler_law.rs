use pbp_core::dynamics::{Region, SiteState};
use pbp_core::lattice::{Cuboid, Vertex};
use pbp_core::sampler::{
    plus_shape, realize, sample, sample_big_obstacles, sample_iid, sample_two_stage, BigObstacleField, IidField,
    SampleMode, SampleParams, SiteField,
};
use proptest::prelude::*;

fn big_box() -> Region {
    Region::Box(Cuboid::new(Vertex::ORIGIN, Vertex::splat(99)))
}

fn within_4_sigma(count: usize, n: usize, p: f64) -> bool {
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    (count as f64 - n as f64 * p).abs() <= 4.0 * sd
}

#[test]
fn iid_frequencies() {
    let c = sample_iid(&SampleParams::new(0.3, 0.1, SampleMode::Iid, 11).unwrap(), big_box()).unwrap();
    let n = 1_000_000;
    assert!(within_4_sigma(c.count(SiteState::Occupied), n, 0.3));
    assert!(within_4_sigma(c.count(SiteState::Closed), n, 0.1));
}

#[test]
fn two_stage_marginals_match_iid() {
    let s = sample_two_stage(&SampleParams::new(0.3, 0.1, SampleMode::TwoStage, 12).unwrap(), big_box()).unwrap();
    let n = 1_000_000;
    let occ = s.config.count(SiteState::Occupied);
    let closed = s.config.count(SiteState::Closed);
    assert!(within_4_sigma(occ, n, 0.3));
    assert!(within_4_sigma(closed, n, 0.1));
    assert!(within_4_sigma(s.active.len(), n, 0.3 / 0.9));

    // Chi-square against the iid law, 2 degrees of freedom; 13.8 is the 0.999 quantile.
    let obs = [occ as f64, closed as f64, (n - occ - closed) as f64];
    let exp = [0.3 * n as f64, 0.1 * n as f64, 0.6 * n as f64];
    let chi2: f64 = obs.iter().zip(exp).map(|(o, e)| (o - e).powi(2) / e).sum();
    assert!(chi2 < 13.8, "chi2 = {chi2}");

    for (v, st) in s.config.non_empty() {
        if st == SiteState::Occupied {
            assert!(s.active.contains(&v));
        }
    }
}

#[test]
fn two_stage_without_closed_is_iid_rate() {
    let s = sample_two_stage(&SampleParams::new(0.2, 0.0, SampleMode::TwoStage, 13).unwrap(), big_box()).unwrap();
    assert_eq!(s.config.count(SiteState::Closed), 0);
    assert!(within_4_sigma(s.config.count(SiteState::Occupied), 1_000_000, 0.2));
}

#[test]
fn obstacle_closed_set_is_union_of_plus_shapes() {
    let f = BigObstacleField { p: 0.1, q: 0.02, seed: 4 };
    let r = Cuboid::centered(Vertex::ORIGIN, 12);
    let c = realize(&f, Region::Box(r), SiteState::Empty);
    let mut centers = 0;
    for v in r.expand(1).iter() {
        if f.is_center(v) {
            centers += 1;
            for w in plus_shape(v) {
                if r.contains(w) {
                    assert_eq!(c.get(w), SiteState::Closed);
                }
            }
        }
    }
    assert!(centers > 0);
    for v in c.closed() {
        assert!(plus_shape(v).iter().any(|&w| f.is_center(w)), "{v} has no center within distance 1");
    }
    let s = sample_big_obstacles(&SampleParams::new(0.0, 0.0, SampleMode::BigObstacles, 1).unwrap(), Region::Box(r));
    assert_eq!(s.unwrap().non_empty().len(), 0);
}

#[test]
fn plus_shape_has_seven_vertices() {
    let mut s = plus_shape(Vertex::ORIGIN).to_vec();
    s.sort();
    s.dedup();
    assert_eq!(s.len(), 7);
    assert!(s.iter().all(|v| v.l1() <= 1));
}

#[test]
fn iid_coupling_is_monotone() {
    let r = Cuboid::centered(Vertex::ORIGIN, 10);
    let lo = IidField { p: 0.2, q: 0.05, seed: 8 };
    let hi_q = IidField { p: 0.2, q: 0.3, seed: 8 };
    let hi_p = IidField { p: 0.4, q: 0.05, seed: 8 };
    for v in r.iter() {
        if lo.state(v) == SiteState::Closed {
            assert_eq!(hi_q.state(v), SiteState::Closed);
        }
        assert_eq!(lo.state(v) == SiteState::Occupied, hi_q.state(v) == SiteState::Occupied);
        if lo.state(v) == SiteState::Occupied {
            assert_eq!(hi_p.state(v), SiteState::Occupied);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// States depend only on (seed, mode, vertex), not on the region.
    #[test]
    fn overlapping_regions_agree(seed in any::<u64>(), p in 0.0f64..0.5, q in 0.0f64..0.5,
                                 mode in prop_oneof![Just(SampleMode::Iid), Just(SampleMode::TwoStage), Just(SampleMode::BigObstacles)],
                                 shift in prop::array::uniform3(-4i64..4)) {
        let params = SampleParams::new(p, q, mode, seed).unwrap();
        let a = Cuboid::centered(Vertex::ORIGIN, 4);
        let b = Cuboid::centered(Vertex(shift), 3);
        let ca = sample(&params, Region::Box(a), SiteState::Empty).unwrap();
        let cb = sample(&params, Region::from_vertices(b.iter()), SiteState::Empty).unwrap();
        for v in a.intersection(&b).unwrap().iter() {
            prop_assert_eq!(ca.get(v), cb.get(v));
        }
        let again = sample(&params, Region::Box(a), SiteState::Empty).unwrap();
        prop_assert_eq!(ca.non_empty(), again.non_empty());
    }
}
