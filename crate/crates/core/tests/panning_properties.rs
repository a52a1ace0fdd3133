use dscpan_core::panner::{
    apply_dsc, combined_gains, frc_gains, loudness_correct, mode_gains, normalize, pan_pairwise,
    RenderMode,
};
use dscpan_core::predictor::{predict_for_theta, predict_reference};
use dscpan_core::{CalibrationProfile, GainStage, Layout, Loudspeaker, SpeakerLevels};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Case {
    layout: Layout,
    profile: CalibrationProfile,
    theta: f64,
    p: f64,
}

fn case() -> impl Strategy<Value = Case> {
    (2usize..=5)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(10.0f64..60.0, n - 1),
                prop::collection::vec(0.5f64..6.0, n),
                prop::collection::vec(-40.0f64..-10.0, n),
                prop::collection::vec(-50.0f64..-10.0, n),
                0.0f64..1.0,
                prop::sample::select(vec![1.0, 1.5, 2.0]),
                any::<bool>(),
            )
        })
        .prop_map(|(steps, dist, lvl, dlvl, frac, p, descending)| {
            let mut az = vec![-90.0];
            for s in &steps {
                az.push(az.last().unwrap() + s);
            }
            if descending {
                az.reverse();
            }
            let speakers: Vec<Loudspeaker> = az
                .iter()
                .zip(&dist)
                .enumerate()
                .map(|(i, (&a, &d))| Loudspeaker::new(format!("s{i}"), a, d))
                .collect();
            let d_ref = dist.iter().copied().fold(0.0, f64::max);
            let entries = speakers
                .iter()
                .zip(lvl.iter().zip(&dlvl))
                .map(|(s, (&l, &ld))| SpeakerLevels {
                    id: s.id.clone(),
                    level_db: l,
                    direct_level_db: ld,
                    delay_s: (d_ref - s.distance_m) / 343.0,
                })
                .collect();
            let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
            let profile = CalibrationProfile::new(entries, min(&lvl), min(&dlvl), d_ref).unwrap();
            let lo = min(&az);
            let hi = az.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Case {
                layout: Layout::new(speakers).unwrap(),
                profile,
                theta: lo + frac * (hi - lo),
                p,
            }
        })
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn combined_matches_staged(c in case()) {
        let raw = pan_pairwise(c.theta, &c.layout).unwrap();
        let staged = frc_gains(&loudness_correct(&apply_dsc(&raw, &c.profile).unwrap(), c.p).unwrap(), &c.profile).unwrap();
        let combined = combined_gains(&raw, &c.profile, c.p).unwrap();
        prop_assert_eq!(combined.stage, GainStage::Combined);
        prop_assert!(rel_close(&staged.gains, &combined.gains, 1e-9), "{:?} vs {:?}", staged.gains, combined.gains);
    }

    #[test]
    fn loudness_corrected_has_unit_norm(c in case()) {
        let raw = pan_pairwise(c.theta, &c.layout).unwrap();
        let g = mode_gains(&raw, &c.profile, RenderMode::Dsc, c.p).unwrap();
        prop_assert!((g.p_norm_value(c.p) - 1.0).abs() < 1e-12);
        let f = mode_gains(&raw, &c.profile, RenderMode::Frc, c.p).unwrap();
        prop_assert!((f.p_norm_value(c.p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn references_do_not_change_loudness_corrected(c in case(), a in -20.0f64..20.0, b in -20.0f64..20.0) {
        let raw = pan_pairwise(c.theta, &c.layout).unwrap();
        let shifted = c.profile.with_references(c.profile.l_ref_db + a, c.profile.l_ref_ds_db + b).unwrap();
        let g = mode_gains(&raw, &c.profile, RenderMode::Dsc, c.p).unwrap();
        let h = mode_gains(&raw, &shifted, RenderMode::Dsc, c.p).unwrap();
        prop_assert!(rel_close(&g.gains, &h.gains, 1e-9));
    }

    #[test]
    fn at_most_two_adjacent_speakers_active(c in case()) {
        let raw = pan_pairwise(c.theta, &c.layout).unwrap();
        let active = raw.gains.iter().filter(|&&x| x > 0.0).count();
        prop_assert!((1..=2).contains(&active));
        prop_assert!((raw.p_norm_value(2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hard_pans_are_untouched(c in case(), pick in any::<prop::sample::Index>()) {
        let j = pick.index(c.layout.len());
        let theta = c.layout.speakers[j].azimuth_deg;
        let raw = pan_pairwise(theta, &c.layout).unwrap();
        let g = mode_gains(&raw, &c.profile, RenderMode::Dsc, c.p).unwrap();
        let mut basis = vec![0.0; c.layout.len()];
        basis[j] = 1.0;
        prop_assert_eq!(&raw.gains, &basis);
        prop_assert_eq!(&g.gains, &basis);
        for mode in [RenderMode::Frc, RenderMode::Dsc] {
            prop_assert_eq!(predict_for_theta(theta, &c.layout, &c.profile, mode, c.p).unwrap(), theta);
        }
    }

    #[test]
    fn dsc_prediction_matches_equidistant(c in case()) {
        let dsc = predict_for_theta(c.theta, &c.layout, &c.profile, RenderMode::Dsc, c.p).unwrap();
        let reference = predict_reference(c.theta, &c.layout).unwrap();
        prop_assert!((dsc - reference).abs() < 0.01);
    }

    #[test]
    fn uniform_offset_makes_dsc_equal_frc(c in case(), offset in -10.0f64..10.0) {
        // every speaker gets the same ΔL^DS - ΔL
        let entries: Vec<SpeakerLevels> = c.profile.speakers.iter().map(|s| SpeakerLevels {
            id: s.id.clone(),
            level_db: s.level_db,
            direct_level_db: s.level_db + offset,
            delay_s: s.delay_s,
        }).collect();
        let l_ref = c.profile.l_ref_db;
        let profile = CalibrationProfile::new(entries, l_ref, l_ref + offset, c.profile.d_ref_m).unwrap();
        let raw = pan_pairwise(c.theta, &c.layout).unwrap();
        let dsc = mode_gains(&raw, &profile, RenderMode::Dsc, c.p).unwrap();
        let frc = normalize(&raw, c.p).unwrap();
        prop_assert!(rel_close(&dsc.gains, &frc.gains, 1e-12));
    }

    #[test]
    fn profile_json_round_trip(c in case()) {
        let text = serde_json::to_string(&c.profile).unwrap();
        let back: CalibrationProfile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, c.profile);
    }
}

#[test]
fn dsc_attenuates_the_near_speaker_at_center() {
    let layout = Layout::new(vec![
        Loudspeaker::new("L", 30.0, 1.5),
        Loudspeaker::new("R", -30.0, 3.0),
    ])
    .unwrap();
    let room = dscpan_core::RoomModel::new(2.114).unwrap();
    let profile = dscpan_core::calibration::build_profile(
        &layout,
        &room,
        dscpan_core::calibration::LevelSource::Model,
        &Default::default(),
    )
    .unwrap();
    let raw = pan_pairwise(0.0, &layout).unwrap();
    let g = mode_gains(&raw, &profile, RenderMode::Dsc, 2.0).unwrap();
    assert!(g.gains[0] < raw.gains[0]);
    assert!(g.gains[1] > raw.gains[1]);
    for k in -29..=29 {
        let theta = k as f64;
        let frc = predict_for_theta(theta, &layout, &profile, RenderMode::Frc, 2.0).unwrap();
        let reference = predict_reference(theta, &layout).unwrap();
        assert!(frc > reference, "{theta}: frc {frc} reference {reference}");
    }
}
