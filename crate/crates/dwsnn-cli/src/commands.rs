//! Command implementations.

use anyhow::{bail, Context, Result};
use std::path::Path;

use dwsnn::calibration::MobilityCalibration;
use dwsnn::io::checkpoint::Checkpoint;
use dwsnn::io::pgm;
use dwsnn::learning::ProgrammingEvent;
use dwsnn::micromag::{
    calibrate_mobility, velocity_curve, MaterialParams, StripGeometry, SweepOptions,
};
use dwsnn::network::{RunMode, StepTrace};
use dwsnn::{RunConfig, SpikingNetwork};

use crate::common::{load_dataset, subset, Global, OutFile};
use crate::{EvalArgs, SweepArgs, TrainArgs};

fn sweep_material(args: &SweepArgs) -> MaterialParams<f64> {
    let mut m = MaterialParams::default();
    if let Some(v) = args.ms {
        m.ms = v;
    }
    if let Some(v) = args.a_ex {
        m.a_ex = v;
    }
    if let Some(v) = args.ku {
        m.ku = v;
    }
    if let Some(v) = args.d_dmi {
        m.d_dmi = v;
    }
    if let Some(v) = args.alpha {
        m.alpha = v;
    }
    if let Some(v) = args.theta_sh {
        m.theta_sh = v;
    }
    m
}

fn sweep_geometry(args: &SweepArgs) -> StripGeometry<f64> {
    StripGeometry {
        length: args.length,
        width: args.width,
        cell_x: args.cell_x,
        cell_y: args.cell_y,
    }
}

fn parse_j_values(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad current density {s:?}"))
        })
        .collect()
}

fn run_sweep(
    args: &SweepArgs,
) -> Result<(
    Vec<dwsnn::micromag::VelocityPoint<f64>>,
    Vec<dwsnn::micromag::WallTrajectory<f64>>,
    MaterialParams<f64>,
    StripGeometry<f64>,
)> {
    let material = sweep_material(args);
    let geometry = sweep_geometry(args);
    let j_values = parse_j_values(&args.j_values)?;
    let opts = SweepOptions {
        dt: args.dt,
        t_max: args.t_max,
        ..SweepOptions::default()
    };
    let (points, trajectories) = velocity_curve(&material, &geometry, &j_values, &opts)
        .context("velocity sweep failed")?;
    Ok((points, trajectories, material, geometry))
}

pub fn micromag_sweep(global: &Global, args: &SweepArgs) -> Result<()> {
    let (points, trajectories, _, _) = run_sweep(args)?;

    let mut sweep = OutFile::new(&global.out_dir, "sweep.csv");
    sweep.line("index,j_a_per_m2,velocity_m_per_s,truncated");
    for (i, p) in points.iter().enumerate() {
        sweep.line(format!(
            "{i},{:e},{:e},{}",
            p.j_density, p.velocity, p.truncated
        ));
    }
    let mut traj_files = Vec::new();
    for (i, traj) in trajectories.iter().enumerate() {
        let mut f = OutFile::new(&global.out_dir, &format!("traj_{i:03}.csv"));
        f.line("t_s,wall_position_m");
        for (t, x) in &traj.samples {
            f.line(format!("{t:e},{x:e}"));
        }
        traj_files.push(f);
    }
    sweep.commit()?;
    for f in traj_files {
        f.commit()?;
    }
    println!("sweep complete: {} current densities", points.len());
    Ok(())
}

pub fn calibrate(global: &Global, args: &SweepArgs) -> Result<()> {
    let (points, _, material, geometry) = run_sweep(args)?;
    let record = calibrate_mobility(&points, &material, &geometry)
        .context("mobility calibration failed")?;
    let mut f = OutFile::new(&global.out_dir, "calibration.txt");
    f.buf = record.to_text();
    f.commit()?;
    println!(
        "calibration: mu_dw = {:e} (m/s)/(A/m2), v_sat = {:.1} m/s, cross-section = {:e} m2",
        record.mu_dw, record.v_sat, record.cross_section
    );
    Ok(())
}

fn load_calibration(path: &Path) -> Result<MobilityCalibration<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading calibration {}", path.display()))?;
    MobilityCalibration::from_text(&text).context("parsing calibration record")
}

/// Images traced to trace.csv under --trace.
const TRACED_IMAGES: u64 = 5;

pub fn train(global: &Global, args: &TrainArgs) -> Result<()> {
    let mut cfg = global.load_config()?;
    if let Some(path) = &args.calibration {
        cfg.sim.device.calibration = load_calibration(path)?;
    }
    let dataset = load_dataset(&args.data_dir)?;
    let (images, _) = subset(&dataset.train_images, &dataset.train_labels, cfg.train_count);
    if images.is_empty() {
        bail!("no training images");
    }

    let mut net = SpikingNetwork::new(cfg.sim).context("building network")?;

    let mut events_file = global.log_events.then(|| {
        let mut f = OutFile::new(&global.out_dir, "events.csv");
        f.line("step,line,neuron,delta_t,delta_w,i_prog_a,duration_s,e_joule,e_supply,clamped");
        f
    });
    let mut trace_file = global.trace.then(|| {
        let mut f = OutFile::new(&global.out_dir, "trace.csv");
        f.line("step,neuron,v,a,spiked");
        f
    });

    let mut epoch_rows = Vec::new();
    let trace_until = TRACED_IMAGES * u64::from(cfg.sim.steps_per_image);
    for epoch in 0..cfg.sim.epochs {
        let w_start = net.weights();
        let mut spikes = 0u64;
        let mut events = 0u64;
        for &img in &images {
            let mut on_event = |ev: &ProgrammingEvent<f64>| {
                if let Some(f) = &mut events_file {
                    f.line(format!(
                        "{},{},{},{},{:e},{:e},{:e},{:e},{:e},{}",
                        ev.step,
                        ev.line,
                        ev.neuron,
                        ev.delta_t,
                        ev.delta_w,
                        ev.i_prog,
                        ev.duration,
                        ev.e_joule,
                        ev.e_supply,
                        ev.clamped
                    ));
                }
            };
            let mut on_step = |tr: StepTrace<'_, f64>| {
                if tr.step < trace_until {
                    if let Some(f) = &mut trace_file {
                        for (j, st) in tr.exc.iter().enumerate() {
                            let spiked = tr.exc_spikes.contains(&j);
                            f.line(format!(
                                "{},{},{:e},{:e},{}",
                                tr.step, j, st.v, st.a, spiked
                            ));
                        }
                    }
                }
            };
            let outcome = net.present_image(
                img,
                RunMode::Train,
                Some(&mut on_event),
                if global.trace { Some(&mut on_step) } else { None },
            )?;
            spikes += outcome.total_exc_spikes;
            events += outcome.programming_events;
        }
        let w_end = net.weights();
        let drift = w_start
            .iter()
            .zip(&w_end)
            .map(|(a, b)| (b - a).abs())
            .sum::<f64>()
            / w_start.len() as f64;
        epoch_rows.push((epoch, images.len(), spikes, events, drift));
    }

    let config_hash = cfg.config_hash();
    let checkpoint = Checkpoint {
        config_hash,
        epoch: cfg.sim.epochs,
        images_seen: net.images_seen(),
        seed: cfg.sim.seed,
        n_exc: cfg.sim.n_exc,
        positions: net.positions(),
        adaptations: net.adaptations(),
    };

    let energy = net.energy();
    let mut summary_csv = OutFile::new(&global.out_dir, "summary.csv");
    summary_csv.line("key,value");
    summary_csv.line(format!("config_hash,{config_hash:016x}"));
    summary_csv.line(format!("seed,{}", cfg.sim.seed));
    summary_csv.line(format!("epochs,{}", cfg.sim.epochs));
    summary_csv.line(format!("images_per_epoch,{}", images.len()));
    summary_csv.line(format!("images_seen,{}", net.images_seen()));
    summary_csv.line(format!(
        "exc_spikes,{}",
        epoch_rows.iter().map(|r| r.2).sum::<u64>()
    ));
    summary_csv.line(format!("programming_events,{}", energy.event_count));
    summary_csv.line(format!("e_joule_total,{:e}", energy.joule_total));
    summary_csv.line(format!("e_supply_total,{:e}", energy.supply_total));

    let mut summary_txt = OutFile::new(&global.out_dir, "summary.txt");
    summary_txt.line("dwsnn training summary");
    summary_txt.line(format!("  config hash      : {config_hash:016x}"));
    summary_txt.line(format!("  seed             : {}", cfg.sim.seed));
    summary_txt.line(format!(
        "  images           : {} x {} epochs",
        images.len(),
        cfg.sim.epochs
    ));
    for (epoch, n, spikes, events, drift) in &epoch_rows {
        summary_txt.line(format!(
            "  epoch {epoch}: {n} images, {spikes} exc spikes, {events} programming events, mean |dw| = {drift:.4}"
        ));
    }
    summary_txt.line(format!(
        "  programming events: {} ({} fJ Joule, {} fJ supply)",
        energy.event_count,
        energy.joule_total * 1e15,
        energy.supply_total * 1e15
    ));

    std::fs::create_dir_all(&global.out_dir)?;
    checkpoint
        .save(&global.out_dir.join("checkpoint.ckpt"))
        .context("writing checkpoint")?;
    summary_csv.commit()?;
    summary_txt.commit()?;
    if let Some(f) = events_file {
        f.commit()?;
    }
    if let Some(f) = trace_file {
        f.commit()?;
    }
    println!(
        "trained {} images x {} epochs: {} programming events",
        images.len(),
        cfg.sim.epochs,
        energy.event_count
    );
    Ok(())
}

fn restore_network(global: &Global, args: &EvalArgs) -> Result<(RunConfig, SpikingNetwork)> {
    let Some(ckpt_path) = &args.checkpoint else {
        bail!("missing required input: --checkpoint (produce one with `dwsnn train`)");
    };
    let mut cfg = global.load_config()?;
    let checkpoint = Checkpoint::load(ckpt_path, cfg.config_hash())
        .with_context(|| format!("loading checkpoint {}", ckpt_path.display()))?;
    cfg.sim.seed = checkpoint.seed;
    let mut net = SpikingNetwork::new(cfg.sim).context("building network")?;
    net.restore(
        &checkpoint.positions,
        &checkpoint.adaptations,
        checkpoint.images_seen,
    )?;
    Ok((cfg, net))
}

pub fn eval(global: &Global, args: &EvalArgs) -> Result<()> {
    let (cfg, mut net) = restore_network(global, args)?;
    let dataset = load_dataset(&args.data_dir)?;
    let (train_images, train_labels) =
        subset(&dataset.train_images, &dataset.train_labels, cfg.train_count);
    let (test_images, test_labels) =
        subset(&dataset.test_images, &dataset.test_labels, cfg.test_count);

    let assignment = net
        .assign_classes(&train_images, train_labels)
        .context("class assignment")?;
    let report = net
        .evaluate(&assignment, &test_images, test_labels)
        .context("evaluation")?;

    let mut eval_txt = OutFile::new(&global.out_dir, "eval.txt");
    eval_txt.line("dwsnn evaluation");
    eval_txt.line(format!(
        "  assigned neurons : {}/{}",
        assignment.assigned_count(),
        cfg.sim.n_exc
    ));
    eval_txt.line(format!(
        "  accuracy         : {:.4} ({}/{})",
        report.accuracy, report.correct, report.total
    ));
    if report.degenerate {
        eval_txt.line("  note             : no votes cast (silent network), chance level");
    }

    let mut confusion = OutFile::new(&global.out_dir, "confusion.csv");
    confusion.line("true\\pred,0,1,2,3,4,5,6,7,8,9");
    for (t, row) in report.confusion.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        confusion.line(format!("{t},{}", cells.join(",")));
    }

    let mut assign_csv = OutFile::new(&global.out_dir, "assignment.csv");
    assign_csv.line("neuron,label");
    for (j, label) in assignment.labels.iter().enumerate() {
        match label {
            Some(l) => assign_csv.line(format!("{j},{l}")),
            None => assign_csv.line(format!("{j},none")),
        }
    }

    eval_txt.commit()?;
    confusion.commit()?;
    assign_csv.commit()?;
    println!(
        "accuracy {:.4} ({}/{})",
        report.accuracy, report.correct, report.total
    );
    Ok(())
}

pub fn report(global: &Global) -> Result<()> {
    let summary_path = global.out_dir.join("summary.csv");
    let summary = std::fs::read_to_string(&summary_path)
        .with_context(|| format!("reading {} (run `dwsnn train` first)", summary_path.display()))?;
    let mut totals: Option<(u64, f64, f64)> = None;
    let mut count = None;
    let mut joule = None;
    let mut supply = None;
    for line in summary.lines().skip(1) {
        let Some((key, value)) = line.split_once(',') else {
            continue;
        };
        match key {
            "programming_events" => count = Some(value.parse::<u64>()?),
            "e_joule_total" => joule = Some(value.parse::<f64>()?),
            "e_supply_total" => supply = Some(value.parse::<f64>()?),
            _ => {}
        }
    }
    if let (Some(c), Some(j), Some(s)) = (count, joule, supply) {
        totals = Some((c, j, s));
    }
    let Some((count, joule, supply)) = totals else {
        bail!("summary.csv lacks energy totals");
    };

    println!("energy report");
    println!("  programming events : {count}");
    println!("  HM Joule total     : {joule:e} J ({} fJ)", joule * 1e15);
    println!("  supply total       : {supply:e} J ({} fJ)", supply * 1e15);

    let events_path = global.out_dir.join("events.csv");
    if !events_path.exists() {
        println!("  event log          : absent (rerun train with --log-events to reconcile)");
        return Ok(());
    }
    let text = std::fs::read_to_string(&events_path)?;
    let mut n = 0u64;
    let mut sum_joule = 0.0f64;
    let mut sum_supply = 0.0f64;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 10 {
            bail!("malformed events.csv row: {line:?}");
        }
        n += 1;
        sum_joule += cols[7].parse::<f64>()?;
        sum_supply += cols[8].parse::<f64>()?;
    }
    println!("  event log          : {n} events, {sum_joule:e} J Joule, {sum_supply:e} J supply");
    if n != count || sum_joule != joule || sum_supply != supply {
        bail!(
            "energy totals do not reconcile with the event log: \
             count {count} vs {n}, joule {joule:e} vs {sum_joule:e}, supply {supply:e} vs {sum_supply:e}"
        );
    }
    println!("  reconciliation     : exact");
    Ok(())
}

pub fn emit_maps(global: &Global, args: &EvalArgs) -> Result<()> {
    let (_, net) = restore_network(global, args)?;
    let weights = net.weights();
    let dir = global.out_dir.join("maps");
    pgm::emit_weight_maps(&weights, net.config().n_exc, &dir).context("writing PGM maps")?;
    println!(
        "wrote {} neuron maps and montage.pgm to {}",
        net.config().n_exc,
        dir.display()
    );
    Ok(())
}
