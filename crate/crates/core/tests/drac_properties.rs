//! Property tests for the clustering algorithm, checked through its trace.

mod common;

use drac::dataset::Dataset;
use drac::drac::{drac_cluster, drac_trace, replay, DracParams, TraceEvent};
use drac::{ClusteringGame, Label};
use proptest::prelude::*;

fn datasets() -> impl Strategy<Value = Dataset> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 2..=60).prop_map(|xy| Dataset::from_xy(&xy).unwrap())
}

fn params() -> impl Strategy<Value = DracParams> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(d, g)| DracParams::new(d, g).unwrap())
}

/// Events of one cluster episode in a trace.
#[derive(Debug, Default)]
struct Episode {
    center: usize,
    l_max: f64,
    beta: Option<f64>,
    joined: Vec<(usize, usize, f64)>,
    enqueued: Vec<usize>,
    dequeued: Vec<usize>,
    noise: bool,
}

fn episodes(events: &[TraceEvent]) -> Vec<Episode> {
    let mut out: Vec<Episode> = Vec::new();
    for e in events {
        match *e {
            TraceEvent::CenterSelected { point, l_max } => out.push(Episode {
                center: point,
                l_max,
                ..Default::default()
            }),
            TraceEvent::Threshold { beta } => out.last_mut().unwrap().beta = Some(beta),
            TraceEvent::Joined {
                point,
                head,
                similarity,
            } => out.last_mut().unwrap().joined.push((point, head, similarity)),
            TraceEvent::Enqueued { point } => out.last_mut().unwrap().enqueued.push(point),
            TraceEvent::Dequeued { point } => out.last_mut().unwrap().dequeued.push(point),
            TraceEvent::Noise { .. } => out.last_mut().unwrap().noise = true,
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn labels_form_a_partition(ds in datasets(), p in params()) {
        let state = drac_cluster(&ds, &p).unwrap();
        let c = state.to_clustering();
        prop_assert_eq!(c.labels.len(), ds.len());
        for (id, &center) in c.centers.iter().enumerate() {
            prop_assert_eq!(c.labels[center], Label::Cluster(id));
        }
        for size in c.sizes() {
            prop_assert!(size >= 2);
        }
        let covered: usize = c.sizes().iter().sum::<usize>() + c.noise_count();
        prop_assert_eq!(covered, ds.len());
        for l in &c.labels {
            if let Label::Cluster(id) = l {
                prop_assert!(*id < c.num_clusters());
            }
        }
    }

    #[test]
    fn thresholds_start_at_delta_and_never_increase(ds in datasets(), p in params()) {
        let (state, events) = drac_trace(&ds, &p).unwrap();
        prop_assume!(state.g_max > 0.0);
        let betas: Vec<f64> = episodes(&events).iter().map(|e| e.beta.unwrap()).collect();
        prop_assert_eq!(betas[0], p.delta);
        for w in betas.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        for (c, cl) in state.clusters.iter().enumerate() {
            prop_assert_eq!(cl.beta, p.delta * (cl.l_max / state.g_max).sqrt());
            if c > 0 {
                prop_assert!(cl.beta <= state.clusters[c - 1].beta);
            }
        }
    }

    #[test]
    fn runs_are_deterministic(ds in datasets(), p in params()) {
        let a = drac_trace(&ds, &p).unwrap();
        let b = drac_trace(&ds, &p).unwrap();
        prop_assert_eq!(a.0, b.0);
        prop_assert_eq!(a.1, b.1);
    }

    #[test]
    fn every_join_is_justified_by_a_queued_point(ds in datasets(), p in params()) {
        let (state, events) = drac_trace(&ds, &p).unwrap();
        prop_assume!(state.g_max > 0.0);
        let sim = ds.similarity().unwrap();
        let mut joins = 0;
        for ep in episodes(&events) {
            let beta = ep.beta.unwrap();
            prop_assert_eq!(ep.enqueued[0], ep.center);
            for &(q, head, s) in &ep.joined {
                prop_assert!(ep.enqueued.contains(&head));
                prop_assert_eq!(s, sim.get(q, head));
                prop_assert!(s >= beta);
            }
            let mut seen = ep.enqueued.clone();
            seen.sort_unstable();
            seen.dedup();
            prop_assert_eq!(seen.len(), ep.enqueued.len());
            prop_assert_eq!(&ep.dequeued, &ep.enqueued);
            prop_assert_eq!(ep.noise, ep.joined.is_empty());
            joins += ep.joined.len();
        }
        let c = state.to_clustering();
        prop_assert_eq!(joins, ds.len() - c.num_clusters() - c.noise_count());
        prop_assert_eq!(replay(ds.len(), &events).unwrap(), c);
    }

    #[test]
    fn centers_are_densest_remaining_points(ds in datasets(), p in params()) {
        let (state, events) = drac_trace(&ds, &p).unwrap();
        let mut taken = vec![false; ds.len()];
        for ep in episodes(&events) {
            for (j, &t) in taken.iter().enumerate() {
                if !t {
                    prop_assert!(state.shapley[j] <= ep.l_max * (1.0 + 1e-12) + 1e-300);
                }
            }
            taken[ep.center] = true;
            for &(q, _, _) in &ep.joined {
                taken[q] = true;
            }
        }
    }

    #[test]
    fn gamma_zero_queues_every_member(ds in datasets(), delta in 0.0..=1.0f64) {
        let (state, events) = drac_trace(&ds, &DracParams::new(delta, 0.0).unwrap()).unwrap();
        prop_assume!(state.g_max > 0.0);
        for ep in episodes(&events) {
            prop_assert_eq!(ep.enqueued.len(), ep.joined.len() + 1);
        }
    }

    #[test]
    fn gamma_one_queues_only_peers_of_the_center(ds in datasets(), delta in 0.0..=1.0f64) {
        let (state, events) = drac_trace(&ds, &DracParams::new(delta, 1.0).unwrap()).unwrap();
        prop_assume!(state.g_max > 0.0);
        for ep in episodes(&events) {
            for &q in &ep.enqueued[1..] {
                prop_assert!(state.shapley[q] >= ep.l_max);
            }
            for &(q, _, _) in &ep.joined {
                prop_assert_eq!(ep.enqueued.contains(&q), state.shapley[q] >= ep.l_max);
            }
        }
    }
}

#[test]
fn shapley_in_state_matches_game() {
    let ds = common::far_pairs();
    let state = drac_cluster(&ds, &DracParams::new(0.5, 0.5).unwrap()).unwrap();
    assert_eq!(state.shapley, ClusteringGame::from_dataset(&ds).unwrap().shapley().phi);
}

#[test]
fn far_pairs_trace_shape() {
    let (_, events) = drac_trace(&common::far_pairs(), &DracParams::new(0.5, 0.5).unwrap()).unwrap();
    let centers: Vec<usize> = events
        .iter()
        .filter_map(|e| match e {
            TraceEvent::CenterSelected { point, .. } => Some(*point),
            _ => None,
        })
        .collect();
    assert_eq!(centers, vec![1, 2]);
}

#[test]
fn zero_density_is_all_noise() {
    let ds = Dataset::from_xy(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
    let state = drac_cluster(&ds, &DracParams::new(0.5, 0.5).unwrap()).unwrap();
    assert_eq!(state.labels, vec![Label::Noise; 2]);
    assert!(state.clusters.is_empty());
}
