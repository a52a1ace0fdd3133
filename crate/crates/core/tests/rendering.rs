use dscpan_core::calibration::{build_profile, CalibrationOptions, LevelSource};
use dscpan_core::panner::{apply_dsc, pan_pairwise, RenderMode};
use dscpan_core::renderer::{render, RenderConfig, StreamRenderer};
use dscpan_core::{
    AzimuthSegment, CalibrationProfile, Layout, Loudspeaker, RoomModel, Scene, SourceObject,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FS: u32 = 48_000;

fn setup() -> (Layout, CalibrationProfile) {
    let layout = Layout::new(vec![
        Loudspeaker::new("L", 30.0, 1.5),
        Loudspeaker::new("R", -30.0, 3.0),
    ])
    .unwrap();
    let room = RoomModel::new(2.114).unwrap();
    let profile = build_profile(
        &layout,
        &room,
        LevelSource::Model,
        &CalibrationOptions::default(),
    )
    .unwrap();
    (layout, profile)
}

fn noise(len: usize, seed: u64) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(-0.5..0.5)).collect()
}

fn scene(objects: Vec<SourceObject>) -> Scene {
    Scene::new(objects, FS).unwrap()
}

fn assert_close(a: &[f32], b: &[f32], tol: f32) {
    assert_eq!(a.len(), b.len());
    let scale = a
        .iter()
        .chain(b)
        .fold(0.0f32, |m, x| m.max(x.abs()))
        .max(1e-30);
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol * scale, "{x} vs {y}");
    }
}

#[test]
fn rendering_is_linear() {
    let (layout, profile) = setup();
    let config = RenderConfig::new(RenderMode::Dsc);
    let a = scene(vec![SourceObject::fixed("a", noise(2000, 1), FS, 12.0)]);
    let b = scene(vec![SourceObject::fixed("b", noise(2000, 2), FS, -7.0)]);
    let both = scene(vec![a.objects[0].clone(), b.objects[0].clone()]);

    let ra = render(&a, &layout, &profile, config).unwrap().audio;
    let rb = render(&b, &layout, &profile, config).unwrap().audio;
    let rab = render(&both, &layout, &profile, config).unwrap().audio;
    for ch in 0..2 {
        let sum: Vec<f32> = ra.channels[ch]
            .iter()
            .zip(&rb.channels[ch])
            .map(|(x, y)| x + y)
            .collect();
        assert_close(&rab.channels[ch], &sum, 1e-6);
    }

    let scaled = render(&a.scaled(0.3), &layout, &profile, config)
        .unwrap()
        .audio;
    for ch in 0..2 {
        let expected: Vec<f32> = ra.channels[ch].iter().map(|x| x * 0.3).collect();
        assert_close(&scaled.channels[ch], &expected, 1e-6);
    }
}

#[test]
fn cross_correlation_peaks_at_alignment_delay() {
    let (layout, profile) = setup();
    let mut impulse = vec![0.0f32; 64];
    impulse[0] = 1.0;
    let s = scene(vec![SourceObject::fixed("i", impulse, FS, 0.0)]);
    let out = render(&s, &layout, &profile, RenderConfig::new(RenderMode::Frc))
        .unwrap()
        .audio;
    let (near, far) = (&out.channels[0], &out.channels[1]);
    let lag = (0..near.len())
        .max_by(|&a, &b| {
            let xc = |k: usize| far.iter().zip(&near[k..]).map(|(x, y)| x * y).sum::<f32>();
            xc(a).total_cmp(&xc(b))
        })
        .unwrap();
    assert_eq!(lag, (1.5 / 343.0 * FS as f64).round() as usize);
    assert_eq!(lag, 210);
}

#[test]
fn dsc_and_uncorrected_differ_by_one_scalar() {
    let (layout, profile) = setup();
    for theta in [-20.0, 0.0, 17.0] {
        let s = scene(vec![SourceObject::fixed("o", noise(1500, 3), FS, theta)]);
        let dsc = render(&s, &layout, &profile, RenderConfig::new(RenderMode::Dsc))
            .unwrap()
            .audio;
        let nolc = render(
            &s,
            &layout,
            &profile,
            RenderConfig::new(RenderMode::DscNoLc),
        )
        .unwrap()
        .audio;
        let modified = apply_dsc(&pan_pairwise(theta, &layout).unwrap(), &profile).unwrap();
        let norm = modified.p_norm_value(2.0) as f32;
        for ch in 0..2 {
            let expected: Vec<f32> = dsc.channels[ch].iter().map(|x| x * norm).collect();
            assert_close(&nolc.channels[ch], &expected, 1e-6);
        }
    }
}

#[test]
fn block_streaming_matches_offline() {
    let (layout, profile) = setup();
    let seg = |t, a| AzimuthSegment {
        start_s: t,
        azimuth_deg: a,
    };
    let objects = vec![
        SourceObject::with_trajectory(
            "m",
            noise(5000, 4),
            FS,
            vec![seg(0.0, 30.0), seg(0.02, -10.0), seg(0.07, 5.0)],
        )
        .unwrap(),
        SourceObject::fixed("f", noise(4000, 5), FS, -25.0),
    ];
    let s = scene(objects);
    let config = RenderConfig::new(RenderMode::Dsc);
    let offline = render(&s, &layout, &profile, config).unwrap().audio;

    for block in [256usize, 1, 100] {
        let cfg = RenderConfig {
            block_size: block,
            ..config
        };
        let trajectories: Vec<&[AzimuthSegment]> =
            s.objects.iter().map(|o| o.trajectory()).collect();
        let mut stream = StreamRenderer::new(&trajectories, &layout, &profile, cfg, FS).unwrap();
        let total = s.len_samples() + stream.latency_samples();
        let mut channels = vec![Vec::new(); 2];
        let mut start = 0;
        while start < total {
            let n = block.min(total - start);
            let inputs: Vec<Vec<f32>> = s
                .objects
                .iter()
                .map(|o| {
                    (start..start + n)
                        .map(|i| o.samples.get(i).copied().unwrap_or(0.0))
                        .collect()
                })
                .collect();
            let input_refs: Vec<&[f32]> = inputs.iter().map(Vec::as_slice).collect();
            let mut outs = vec![vec![0.0f32; n]; 2];
            let mut out_refs: Vec<&mut [f32]> = outs.iter_mut().map(Vec::as_mut_slice).collect();
            stream.process_block(&input_refs, &mut out_refs).unwrap();
            for (c, o) in channels.iter_mut().zip(outs) {
                c.extend(o);
            }
            start += n;
        }
        assert_eq!(channels, offline.channels, "block {block}");
    }
}
