use std::io::Write;
use std::path::{Path, PathBuf};

use dscpan_core::analysis::FdtParams;
use dscpan_core::calibration::{build_profile, CalibrationOptions, LevelSource};
use dscpan_core::panner::{gain_table, GainTable, RenderMode};
use dscpan_core::predictor::prediction_grid;
use dscpan_core::renderer::{
    canonical_azimuths, channel_bed_to_scene, render, MultichannelAudio, RenderConfig,
};
use dscpan_core::roomsim::{simulate_listening, synth_layout_irs};
use dscpan_core::schema::{load_scene, CalibrationDoc, LayoutDoc, LevelOrigin, SCHEMA_VERSION};
use dscpan_core::{wav, CalibrationProfile, ImpulseResponse, Layout, RoomModel};
use serde::Serialize;

use crate::args::*;
use crate::Failure;

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Calibrate(a) => calibrate(a),
        Command::Render(a) => render_cmd(a),
        Command::Gains(a) => gains(a),
        Command::SimulateRoom(a) => simulate_room(a),
        Command::Listen(a) => listen(a),
        Command::Predict(a) => predict(a),
    }
}

fn resolve_room(doc: &LayoutDoc, args: &RoomArgs) -> Result<RoomModel, Failure> {
    let base = match (doc.room, args.critical_distance) {
        (_, Some(dc)) => RoomModel {
            critical_distance_m: dc,
            ..doc.room.unwrap_or(RoomModel::new(dc)?)
        },
        (Some(room), None) => room,
        (None, None) => {
            return Err(Failure::Usage(
                "no room model: pass --critical-distance or add a \"room\" block to the layout"
                    .into(),
            ))
        }
    };
    let room = RoomModel {
        speed_of_sound: args.speed_of_sound.unwrap_or(base.speed_of_sound),
        rt60_s: args.rt60.unwrap_or(base.rt60_s),
        ..base
    };
    room.validate()?;
    Ok(room)
}

fn ir_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.wav"))
}

fn read_irs(dir: &Path, layout: &Layout) -> Result<Vec<ImpulseResponse>, Failure> {
    layout
        .speakers
        .iter()
        .map(|s| {
            let path = ir_path(dir, &s.id);
            if !path.is_file() {
                return Err(dscpan_core::Error::MissingImpulseResponse(s.id.clone()).into());
            }
            Ok(wav::read_impulse_response(path)?)
        })
        .collect()
}

fn load_profile(path: &Path, layout: &Layout) -> Result<CalibrationProfile, Failure> {
    let profile = CalibrationDoc::load(path)?.profile;
    profile.check_layout(layout)?;
    Ok(profile)
}

fn calibrate(a: CalibrateArgs) -> Result<(), Failure> {
    let doc = LayoutDoc::load(&a.layout)?;
    let layout = doc.layout();
    let mut options = CalibrationOptions {
        weighting: a.weighting.into(),
        l_ref_db: a.l_ref,
        l_ref_ds_db: a.l_ref_ds,
        d_ref_m: a.d_ref,
        ..CalibrationOptions::default()
    };
    if let Some(ms) = a.tau_ms {
        options.fdt = FdtParams {
            tau_s: ms / 1000.0,
            ..FdtParams::default()
        };
    }

    let (profile, origin) = match &a.ir_dir {
        Some(dir) => {
            // measured mode only needs c for the alignment delays
            let room = resolve_room(&doc, &a.room).or_else(|_| -> Result<RoomModel, Failure> {
                Ok(RoomModel {
                    speed_of_sound: a
                        .room
                        .speed_of_sound
                        .unwrap_or(RoomModel::DEFAULT_SPEED_OF_SOUND),
                    ..RoomModel::new(1.0)?
                })
            })?;
            let irs = read_irs(dir, &layout)?;
            (
                build_profile(&layout, &room, LevelSource::Measured(&irs), &options)?,
                LevelOrigin::Measured,
            )
        }
        None => {
            let room = resolve_room(&doc, &a.room)?;
            (
                build_profile(&layout, &room, LevelSource::Model, &options)?,
                LevelOrigin::Model,
            )
        }
    };

    CalibrationDoc::new(profile.clone(), origin).save(&a.output)?;

    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "{:<12} {:>10} {:>10} {:>8} {:>8} {:>9}",
        "speaker", "L [dB]", "L_DS [dB]", "dL", "dL_DS", "dt [ms]"
    )?;
    for s in &profile.speakers {
        writeln!(
            out,
            "{:<12} {:>10.2} {:>10.2} {:>8.2} {:>8.2} {:>9.3}",
            s.id,
            s.level_db,
            s.direct_level_db,
            s.loudness_comp_db,
            s.dsc_comp_db,
            s.delay_s * 1e3
        )?;
    }
    Ok(())
}

fn render_cmd(a: RenderArgs) -> Result<(), Failure> {
    let layout = LayoutDoc::load(&a.layout)?.layout();
    let profile = load_profile(&a.calibration, &layout)?;
    let scene = match (&a.scene, &a.bed) {
        (Some(path), _) => load_scene(path)?,
        (None, Some(path)) => {
            let bed = wav::read_multichannel(path)?;
            let azimuths = canonical_azimuths(bed.channels.len()).ok_or_else(|| {
                Failure::Data(format!(
                    "no canonical layout for a {}-channel bed (mono or stereo only)",
                    bed.channels.len()
                ))
            })?;
            channel_bed_to_scene(&bed, azimuths)?
        }
        (None, None) => return Err(Failure::Usage("pass --scene or --bed".into())),
    };
    let config = RenderConfig {
        mode: a.mode.into(),
        p: a.p,
        block_size: a.block_size,
        crossfade_samples: a.crossfade.unwrap_or(a.block_size),
    };
    let out = render(&scene, &layout, &profile, config)?;
    if out.clipped_samples > 0 {
        eprintln!(
            "warning: {} output samples exceed full scale",
            out.clipped_samples
        );
    }
    wav::write_multichannel(&a.output, &out.audio)?;
    Ok(())
}

#[derive(Serialize)]
struct GainsDoc {
    schema_version: u32,
    tables: Vec<GainTable>,
}

#[derive(Serialize)]
struct GainRow<'a> {
    theta_deg: f64,
    mode: RenderMode,
    speaker: &'a str,
    raw: f64,
    dsc_modified: f64,
    loudness_corrected: f64,
    feed: f64,
}

fn gains(a: GainsArgs) -> Result<(), Failure> {
    let layout = LayoutDoc::load(&a.layout)?.layout();
    let profile = load_profile(&a.calibration, &layout)?;
    let tables = a
        .theta
        .iter()
        .map(|&t| gain_table(t, &layout, &profile, a.mode.into(), a.p))
        .collect::<Result<Vec<_>, _>>()?;
    let stdout = std::io::stdout().lock();
    match a.format {
        Format::Json => {
            let mut out = stdout;
            serde_json::to_writer_pretty(
                &mut out,
                &GainsDoc {
                    schema_version: SCHEMA_VERSION,
                    tables,
                },
            )?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(stdout);
            for t in &tables {
                for (i, spk) in layout.speakers.iter().enumerate() {
                    w.serialize(GainRow {
                        theta_deg: t.theta_deg,
                        mode: t.mode,
                        speaker: &spk.id,
                        raw: t.raw.gains[i],
                        dsc_modified: t.dsc_modified.gains[i],
                        loudness_corrected: t.loudness_corrected.gains[i],
                        feed: t.feed.gains[i],
                    })?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn simulate_room(a: SimulateArgs) -> Result<(), Failure> {
    let doc = LayoutDoc::load(&a.layout)?;
    let layout = doc.layout();
    let room = resolve_room(&doc, &a.room)?;
    let irs = synth_layout_irs(&layout, &room, a.sample_rate, a.seed)?;
    std::fs::create_dir_all(&a.output)?;
    for (spk, ir) in layout.speakers.iter().zip(&irs) {
        wav::write_impulse_response(ir_path(&a.output, &spk.id), ir)?;
    }
    println!(
        "wrote {} responses to {} (seed {})",
        irs.len(),
        a.output.display(),
        a.seed
    );
    Ok(())
}

fn listen(a: ListenArgs) -> Result<(), Failure> {
    let layout = LayoutDoc::load(&a.layout)?.layout();
    let feeds = wav::read_multichannel(&a.feeds)?;
    let irs = read_irs(&a.ir_dir, &layout)?;
    let y = simulate_listening(&feeds, &irs)?;
    wav::write_multichannel(
        &a.output,
        &MultichannelAudio {
            channels: vec![y.iter().map(|&x| x as f32).collect()],
            sample_rate_hz: feeds.sample_rate_hz,
        },
    )?;
    Ok(())
}

fn predict(a: PredictArgs) -> Result<(), Failure> {
    let layout = LayoutDoc::load(&a.layout)?.layout();
    let profile = load_profile(&a.calibration, &layout)?;
    let rows = prediction_grid(&layout, &profile, a.step, a.p)?;
    let sink: Box<dyn Write> = match &a.output {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
