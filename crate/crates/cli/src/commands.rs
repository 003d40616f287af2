use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use railcross::array::{array_length, array_pattern, compliance_report, estimate_element_count};
use railcross::config::ScenarioConfig;
use railcross::coverage::verify_coverage;
use railcross::envelope::{synthesize_envelope, DEFAULT_RESOLUTION};
use railcross::pattern::DbRounding;
use railcross::safety::{default_scenario, notification_distance};
use railcross::sizing::{dimensions_for, main_lobe_3db_beamwidth};
use railcross::{
    AzimuthPattern, CoverageGrid, GainDbi, Scenario, StoppingTable, Surface, UniformLinearArraySpec,
};

use crate::{Cli, Command, CommonArgs, FloatList, Format};

const DEFAULT_LEADS_S: [f64; 4] = [15.0, 20.0, 25.0, 30.0];
const DEFAULT_EXPONENTS: [f64; 3] = [2.0, 3.0, 4.0];

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let c = &cli.common;
    match &cli.command {
        Command::Requirements { vehicle_speeds } => requirements(c, vehicle_speeds.as_ref()),
        Command::Synthesize => synthesize(c),
        Command::Size => size(c),
        Command::Verify {
            train_samples,
            vehicle_samples,
        } => verify(c, CoverageGrid::new(*train_samples, *vehicle_samples)),
        Command::Array {
            elements,
            spacing_m,
            element_dbi,
            target_dbi,
        } => array(c, *elements, *spacing_m, *element_dbi, *target_dbi),
    }
}

/// Rounds to `places` decimals, without negative zero.
fn round(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (x * scale).round() / scale + 0.0
}

fn fixed(x: f64, places: usize) -> String {
    format!("{:.*}", places, round(x, places as i32))
}

/// Scenario from --config plus --delta-deg and single-valued --n / --lead-s.
fn base_scenario(c: &CommonArgs) -> Result<Scenario> {
    let mut s = match &c.config {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            ScenarioConfig::parse(BufReader::new(file))
                .and_then(|cfg| cfg.to_scenario())
                .with_context(|| format!("config {}", path.display()))?
        }
        None => default_scenario(),
    };
    if let Some(delta) = c.delta_deg {
        s = s.with_delta(delta.to_radians())?;
    }
    Ok(s)
}

fn single(list: Option<&FloatList>, flag: &str) -> Result<Option<f64>> {
    match list.map(|l| l.0.as_slice()) {
        None | Some([]) => Ok(None),
        Some([v]) => Ok(Some(*v)),
        Some(_) => bail!("{flag} takes a single value for this command"),
    }
}

fn scenario(c: &CommonArgs) -> Result<Scenario> {
    let mut s = base_scenario(c)?;
    if let Some(lead) = single(c.lead_s.as_ref(), "--lead-s")? {
        s = s.with_lead_time(lead)?;
    }
    if let Some(n) = single(c.n.as_ref(), "--n")? {
        s = s.with_exponent(n)?;
    }
    Ok(s)
}

fn resolution(c: &CommonArgs) -> f64 {
    c.resolution_deg.map_or(DEFAULT_RESOLUTION, f64::to_radians)
}

fn out_dir(c: &CommonArgs) -> Result<PathBuf> {
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn write_pattern(path: &Path, pattern: &AzimuthPattern, rounding: DbRounding) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    pattern.write_csv(&mut w, rounding)?;
    w.flush()?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn read_pattern(path: &Path) -> Result<AzimuthPattern> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    AzimuthPattern::read_csv(BufReader::new(file))
        .with_context(|| format!("pattern {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Prints a table to stdout and, with --out, saves it as `<stem>.<ext>`.
fn emit(c: &CommonArgs, stem: &str, text: &str) -> Result<()> {
    print!("{text}");
    if c.out.is_some() {
        let path = out_dir(c)?.join(format!("{stem}.{}", c.format.extension()));
        write_file(&path, text)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct StoppingRow {
    vehicle_speed_mph: f64,
    surface: Surface,
    stopping_distance_m: f64,
}

#[derive(Serialize)]
struct NotificationRow {
    train_speed_mph: f64,
    lead_time_s: f64,
    notification_distance_m: f64,
}

#[derive(Serialize)]
struct Requirements {
    stopping: Vec<StoppingRow>,
    notification: Vec<NotificationRow>,
}

fn requirements(c: &CommonArgs, speeds: Option<&FloatList>) -> Result<ExitCode> {
    let s = base_scenario(c)?;
    let table = StoppingTable::default();
    let speeds = match speeds {
        Some(l) => l.0.clone(),
        None => table.rows().iter().map(|&(v, _)| v).collect(),
    };
    let leads = c
        .lead_s
        .as_ref()
        .map_or(DEFAULT_LEADS_S.to_vec(), |l| l.0.clone());

    let mut stopping = Vec::new();
    for &v in &speeds {
        for surface in [Surface::Dry, Surface::Wet] {
            stopping.push(StoppingRow {
                vehicle_speed_mph: round(v, 4),
                surface,
                stopping_distance_m: round(table.stopping_distance(v, surface)?, 3),
            });
        }
    }
    let train = s.safety.train_speed_mph;
    let mut notification = Vec::new();
    for &lead in &leads {
        notification.push(NotificationRow {
            train_speed_mph: round(train, 4),
            lead_time_s: round(lead, 4),
            notification_distance_m: round(notification_distance(train, lead)?, 3),
        });
    }

    let text = match c.format {
        Format::Json => to_json(&Requirements {
            stopping,
            notification,
        })?,
        Format::Csv => {
            let mut t = String::from("table,speed_mph,surface,lead_time_s,distance_m\n");
            for r in &stopping {
                t += &format!(
                    "stopping,{},{},,{}\n",
                    fixed(r.vehicle_speed_mph, 4),
                    r.surface,
                    fixed(r.stopping_distance_m, 3)
                );
            }
            for r in &notification {
                t += &format!(
                    "notification,{},,{},{}\n",
                    fixed(r.train_speed_mph, 4),
                    fixed(r.lead_time_s, 4),
                    fixed(r.notification_distance_m, 3)
                );
            }
            t
        }
    };
    emit(c, "requirements", &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Metrics {
    delta_deg: f64,
    n: f64,
    lead_time_s: f64,
    notification_distance_m: f64,
    road_safe_distance_m: f64,
    bins: usize,
    resolution_deg: f64,
    peak_gain_dbi: f64,
    boundary_angle_deg: f64,
    phi_max_deg: f64,
    horizontal_3db_beamwidth_deg: f64,
    length_m: f64,
    width_m: f64,
}

fn synthesize(c: &CommonArgs) -> Result<ExitCode> {
    let s = scenario(c)?;
    let envelope = synthesize_envelope(&s.geometry, &s.link, resolution(c))?;
    let dims = dimensions_for(&envelope, s.link.wavelength)?;
    let metrics = Metrics {
        delta_deg: round(s.geometry.delta.to_degrees(), 4),
        n: s.link.n,
        lead_time_s: round(s.safety.lead_time_s, 4),
        notification_distance_m: round(s.geometry.d_s, 3),
        road_safe_distance_m: round(s.geometry.r_s, 3),
        bins: envelope.len(),
        resolution_deg: round(envelope.resolution().to_degrees(), 6),
        peak_gain_dbi: round(dims.max_gain_dbi, 4),
        boundary_angle_deg: round(s.geometry.boundary_angle().to_degrees(), 4),
        phi_max_deg: round(dims.phi_max_deg, 4),
        horizontal_3db_beamwidth_deg: round(dims.horizontal_3db_beamwidth_deg, 4),
        length_m: round(dims.length_m, 3),
        width_m: round(dims.width_m, 3),
    };
    let dir = out_dir(c)?;
    write_pattern(&dir.join("envelope.csv"), &envelope, DbRounding::Up)?;
    let json = to_json(&metrics)?;
    write_file(&dir.join("metrics.json"), &json)?;
    print!("{json}");
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SizeRow {
    lead_time_s: f64,
    n: f64,
    max_gain_dbi: f64,
    phi_max_deg: f64,
    horizontal_3db_beamwidth_deg: f64,
    length_m: f64,
    width_m: f64,
}

fn size(c: &CommonArgs) -> Result<ExitCode> {
    let base = base_scenario(c)?;
    let leads = c
        .lead_s
        .as_ref()
        .map_or(DEFAULT_LEADS_S.to_vec(), |l| l.0.clone());
    let exponents =
        c.n.as_ref()
            .map_or(DEFAULT_EXPONENTS.to_vec(), |l| l.0.clone());
    let res = resolution(c);

    let mut rows = Vec::new();
    for &n in &exponents {
        for &lead in &leads {
            let s = base.with_lead_time(lead)?.with_exponent(n)?;
            let envelope = synthesize_envelope(&s.geometry, &s.link, res)?;
            let d = dimensions_for(&envelope, s.link.wavelength)?;
            rows.push(SizeRow {
                lead_time_s: round(lead, 4),
                n: round(n, 4),
                max_gain_dbi: round(d.max_gain_dbi, 4),
                phi_max_deg: round(d.phi_max_deg, 4),
                horizontal_3db_beamwidth_deg: round(d.horizontal_3db_beamwidth_deg, 4),
                length_m: round(d.length_m, 3),
                width_m: round(d.width_m, 3),
            });
        }
    }

    let text = match c.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut t = String::from(
                "lead_time_s,n,max_gain_dbi,phi_max_deg,horizontal_3db_beamwidth_deg,length_m,width_m\n",
            );
            for r in &rows {
                t += &format!(
                    "{},{},{},{},{},{},{}\n",
                    fixed(r.lead_time_s, 4),
                    fixed(r.n, 4),
                    fixed(r.max_gain_dbi, 4),
                    fixed(r.phi_max_deg, 4),
                    fixed(r.horizontal_3db_beamwidth_deg, 4),
                    fixed(r.length_m, 3),
                    fixed(r.width_m, 3)
                );
            }
            t
        }
    };
    emit(c, "sizes", &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Coverage {
    pass: bool,
    min_margin_db: f64,
    worst_train_pos_m: f64,
    worst_vehicle_pos_m: f64,
    train_samples: usize,
    vehicle_samples: usize,
    skipped_pairs: usize,
}

fn verify(c: &CommonArgs, grid: CoverageGrid) -> Result<ExitCode> {
    let Some(path) = &c.pattern else {
        bail!("verify needs --pattern");
    };
    let pattern = read_pattern(path)?;
    let s = scenario(c)?;
    let r = verify_coverage(&pattern, &s.geometry, &s.link, grid)?;
    let report = Coverage {
        pass: r.pass,
        min_margin_db: round(r.min_margin_db, 4),
        worst_train_pos_m: round(r.worst_train_pos_m, 3),
        worst_vehicle_pos_m: round(r.worst_vehicle_pos_m, 3),
        train_samples: r.train_samples,
        vehicle_samples: r.vehicle_samples,
        skipped_pairs: r.skipped_pairs,
    };
    let json = to_json(&report)?;
    print!("{json}");
    if c.out.is_some() {
        write_file(&out_dir(c)?.join("coverage.json"), &json)?;
    }
    Ok(if r.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct ViolationOut {
    start_deg: f64,
    end_deg: f64,
    worst_shortfall_db: f64,
}

#[derive(Serialize)]
struct ArrayOut {
    elements: usize,
    estimated_elements: bool,
    spacing_m: f64,
    array_length_m: f64,
    element_dbi: f64,
    target_dbi: f64,
    peak_gain_dbi: f64,
    main_lobe_3db_beamwidth_deg: f64,
    pass: bool,
    margin_db: f64,
    violations: Vec<ViolationOut>,
}

fn array(
    c: &CommonArgs,
    elements: Option<usize>,
    spacing_m: Option<f64>,
    element_dbi: f64,
    target_dbi: Option<f64>,
) -> Result<ExitCode> {
    let s = scenario(c)?;
    let required = match &c.pattern {
        Some(path) => read_pattern(path)?,
        None => synthesize_envelope(&s.geometry, &s.link, resolution(c))?,
    };
    let wavelength = s.link.wavelength;
    let spacing = spacing_m.unwrap_or(wavelength / 2.0);
    let target = target_dbi.unwrap_or_else(|| required.peak_dbi());
    let n =
        elements.unwrap_or_else(|| estimate_element_count(GainDbi(target), GainDbi(element_dbi)));

    let spec = UniformLinearArraySpec::new(n, spacing, GainDbi(element_dbi))?;
    let pattern = array_pattern(&spec, wavelength, required.resolution())?;
    let report = compliance_report(&pattern, &required)?;

    let out = ArrayOut {
        elements: n,
        estimated_elements: elements.is_none(),
        spacing_m: round(spacing, 4),
        array_length_m: round(array_length(n, spacing), 3),
        element_dbi: round(element_dbi, 4),
        target_dbi: round(target, 4),
        peak_gain_dbi: round(pattern.peak_dbi(), 4),
        main_lobe_3db_beamwidth_deg: round(main_lobe_3db_beamwidth(&pattern), 4),
        pass: report.pass,
        margin_db: round(report.margin_db, 4),
        violations: report
            .violations
            .iter()
            .map(|v| ViolationOut {
                start_deg: round(v.start_deg, 4),
                end_deg: round(v.end_deg, 4),
                worst_shortfall_db: round(v.worst_shortfall_db, 4),
            })
            .collect(),
    };
    let dir = out_dir(c)?;
    write_pattern(
        &dir.join("array_pattern.csv"),
        &pattern,
        DbRounding::Nearest,
    )?;
    let json = to_json(&out)?;
    write_file(&dir.join("compliance.json"), &json)?;
    print!("{json}");
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
