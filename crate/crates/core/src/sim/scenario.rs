//! Scenario files: a flat, line-oriented `section.key = value` format that
//! declares the stations, the beacon-interval layout, the traffic, and the
//! knobs of one simulation run.
//!
//! Parsing is strict — an unknown key is an error, not a warning, because a
//! silently ignored typo in an experiment configuration is worse than a
//! failed load. Validation is separate from parsing and returns the full
//! list of problems at once, never failing mid-simulation.

use super::SimError;
use crate::link::LinkParams;
use crate::mac::edca::{default_ac_params, validate_params, AcParams};
use crate::mac::frames::AccessCategory;
use crate::mac::schedule::{Allocation, AllocationKind, Schedule};
use crate::phy::mcs::mcs;
use crate::station::power::WakeupSchedule;
use crate::tput::ampdu_psdu_octets;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Pcp,
    Sta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobility {
    /// Distance the station closes to, meters.
    pub to_m: f64,
    pub speed_mps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationDecl {
    pub role: Role,
    /// Distance to the coordinator, meters.
    pub distance_m: f64,
    pub sectors: u8,
    /// Starts with a trained sector pair (skips the contention training).
    pub trained: bool,
    pub mobility: Option<Mobility>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocKind {
    Sp,
    Cbap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocDecl {
    pub kind: AllocKind,
    pub source: usize,
    pub destination: usize,
    /// Offset from the start of the data transfer interval, ns.
    pub start_ns: u64,
    pub duration_ns: u64,
    pub spatial_share: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowDecl {
    pub src: usize,
    pub dst: usize,
    pub ac: AccessCategory,
    pub mcs: u8,
    pub msdu_octets: u32,
    /// 0 = one frame per exchange with a normal acknowledgment; n >= 1 =
    /// aggregates of n subframes answered by block acknowledgments.
    pub ampdu_subframes: u32,
    /// Independent per-frame loss probability injected on top of the link.
    pub loss_p: f64,
    /// Allocation the flow's traffic lives in.
    pub alloc: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FstDecl {
    pub station: usize,
    pub transparent: bool,
    pub llt_bis: u32,
    /// Injected consecutive losses of the new-band confirmation handshake.
    pub ack_losses: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerDecl {
    pub station: usize,
    pub schedule: WakeupSchedule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub seed: u64,
    pub duration_ns: u64,
    pub bi_ns: u64,
    pub slot_ns: u64,
    pub sifs_ns: u64,
    pub link: LinkParams,
    /// Reception threshold per rate index; a frame decodes iff link SNR
    /// meets the entry for its rate.
    pub thresholds_db: Vec<f64>,
    /// Contention parameters per access category, lowest priority first.
    pub edca: [AcParams; 4],
    pub pcp_sectors: u8,
    pub beacons_per_bti: usize,
    pub abft_slots: u8,
    pub abft_retry_limit: u32,
    pub ati_ns: u64,
    pub stations: Vec<StationDecl>,
    pub allocations: Vec<AllocDecl>,
    pub flows: Vec<FlowDecl>,
    pub fst: Option<FstDecl>,
    pub power: Vec<PowerDecl>,
    /// Optional sector gain table (path, resolved at validation).
    pub channel_file: Option<String>,
}

/// Shipped reception thresholds: strictly rising with the rate index so
/// faster rates always demand more signal.
pub fn default_snr_threshold_db(index: u8) -> f64 {
    -3.0 + 1.5 * f64::from(index)
}

fn default_link() -> LinkParams {
    LinkParams {
        tx_power_dbm: 10.0,
        tx_gain_dbi: 15.0,
        rx_gain_dbi: 15.0,
        frequency_hz: 60.48e9,
        distance_m: 10.0,
        bandwidth_hz: 2.16e9,
        noise_figure_db: 10.0,
        loss_margin_db: 6.0,
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            seed: 1,
            duration_ns: 50_000_000,
            bi_ns: 10_000_000,
            slot_ns: 5_000,
            sifs_ns: 3_000,
            link: default_link(),
            thresholds_db: (0..32).map(default_snr_threshold_db).collect(),
            edca: default_ac_params(),
            pcp_sectors: 4,
            beacons_per_bti: usize::MAX,
            abft_slots: 0,
            abft_retry_limit: 2,
            ati_ns: 0,
            stations: Vec::new(),
            allocations: Vec::new(),
            flows: Vec::new(),
            fst: None,
            power: Vec::new(),
            channel_file: None,
        }
    }
}

struct Cursor<'a> {
    line_no: usize,
    key: &'a str,
}

impl Cursor<'_> {
    fn err(&self, what: impl std::fmt::Display) -> SimError {
        SimError::Parse(format!("line {}: {}: {what}", self.line_no, self.key))
    }

    fn num<T: std::str::FromStr>(&self, value: &str) -> Result<T, SimError>
    where
        T::Err: std::fmt::Display,
    {
        value.parse().map_err(|e| self.err(e))
    }

    fn boolean(&self, value: &str) -> Result<bool, SimError> {
        match value {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(self.err(format!("expected a boolean, got {other:?}"))),
        }
    }
}

#[derive(Default)]
struct StationDraft {
    role: Option<Role>,
    distance_m: Option<f64>,
    sectors: Option<u8>,
    trained: Option<bool>,
    mobility_to_m: Option<f64>,
    mobility_speed: Option<f64>,
}

#[derive(Default)]
struct AllocDraft {
    kind: Option<AllocKind>,
    source: Option<usize>,
    destination: Option<usize>,
    start_ns: Option<u64>,
    duration_ns: Option<u64>,
    spatial_share: bool,
}

#[derive(Default)]
struct FlowDraft {
    src: Option<usize>,
    dst: Option<usize>,
    ac: Option<AccessCategory>,
    mcs: Option<u8>,
    msdu_octets: Option<u32>,
    ampdu_subframes: u32,
    loss_p: f64,
    alloc: Option<usize>,
}

#[derive(Default)]
struct PowerDraft {
    period_bis: Option<u32>,
    offset_bi: u32,
    awake_window_ns: Option<u64>,
}

/// Parses the text form. Unknown keys and malformed values are errors.
pub fn parse_scenario(text: &str) -> Result<Scenario, SimError> {
    let mut sc = Scenario::default();
    let mut stations: BTreeMap<usize, StationDraft> = BTreeMap::new();
    let mut allocs: BTreeMap<usize, AllocDraft> = BTreeMap::new();
    let mut flows: BTreeMap<usize, FlowDraft> = BTreeMap::new();
    let mut powers: BTreeMap<usize, PowerDraft> = BTreeMap::new();
    let mut fst_station: Option<usize> = None;
    let mut fst_transparent = true;
    let mut fst_llt = 0u32;
    let mut fst_ack_losses = 0u32;

    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| SimError::Parse(format!("line {}: expected key = value", i + 1)))?;
        let key = key.trim();
        let value = value.trim();
        let c = Cursor {
            line_no: i + 1,
            key,
        };
        let parts: Vec<&str> = key.split('.').collect();
        match parts.as_slice() {
            ["general", "seed"] => sc.seed = c.num(value)?,
            ["general", "duration_ns"] => sc.duration_ns = c.num(value)?,
            ["general", "bi_ns"] => sc.bi_ns = c.num(value)?,
            ["general", "slot_ns"] => sc.slot_ns = c.num(value)?,
            ["general", "sifs_ns"] => sc.sifs_ns = c.num(value)?,
            ["link", "tx_power_dbm"] => sc.link.tx_power_dbm = c.num(value)?,
            ["link", "tx_gain_dbi"] => sc.link.tx_gain_dbi = c.num(value)?,
            ["link", "rx_gain_dbi"] => sc.link.rx_gain_dbi = c.num(value)?,
            ["link", "frequency_hz"] => sc.link.frequency_hz = c.num(value)?,
            ["link", "bandwidth_hz"] => sc.link.bandwidth_hz = c.num(value)?,
            ["link", "noise_figure_db"] => sc.link.noise_figure_db = c.num(value)?,
            ["link", "loss_margin_db"] => sc.link.loss_margin_db = c.num(value)?,
            ["phy", "threshold", idx] => {
                let k: usize = c.num(idx)?;
                if k >= sc.thresholds_db.len() {
                    return Err(c.err("rate index out of range"));
                }
                sc.thresholds_db[k] = c.num(value)?;
            }
            ["edca", label, field] => {
                let k = match *label {
                    "bk" => 0,
                    "be" => 1,
                    "vi" => 2,
                    "vo" => 3,
                    other => return Err(c.err(format!("unknown access category {other:?}"))),
                };
                match *field {
                    "cw_min" => sc.edca[k].cw_min = c.num(value)?,
                    "cw_max" => sc.edca[k].cw_max = c.num(value)?,
                    "aifs_slots" => sc.edca[k].aifs_slots = c.num(value)?,
                    "txop_limit_us" => sc.edca[k].txop_limit_us = c.num(value)?,
                    _ => return Err(c.err("unknown contention field")),
                }
            }
            ["pcp", "sectors"] => sc.pcp_sectors = c.num(value)?,
            ["pcp", "beacons_per_bti"] => sc.beacons_per_bti = c.num(value)?,
            ["abft", "slots"] => sc.abft_slots = c.num(value)?,
            ["abft", "retry_limit"] => sc.abft_retry_limit = c.num(value)?,
            ["ati", "duration_ns"] => sc.ati_ns = c.num(value)?,
            ["channel", "file"] => sc.channel_file = Some(value.to_string()),
            ["station", idx, field] => {
                let k: usize = c.num(idx)?;
                let d = stations.entry(k).or_default();
                match *field {
                    "role" => {
                        d.role = Some(match value {
                            "pcp" => Role::Pcp,
                            "sta" => Role::Sta,
                            other => return Err(c.err(format!("unknown role {other:?}"))),
                        })
                    }
                    "distance_m" => d.distance_m = Some(c.num(value)?),
                    "sectors" => d.sectors = Some(c.num(value)?),
                    "trained" => d.trained = Some(c.boolean(value)?),
                    _ => return Err(c.err("unknown station field")),
                }
            }
            ["mobility", idx, field] => {
                let k: usize = c.num(idx)?;
                let d = stations.entry(k).or_default();
                match *field {
                    "to_m" => d.mobility_to_m = Some(c.num(value)?),
                    "speed_mps" => d.mobility_speed = Some(c.num(value)?),
                    _ => return Err(c.err("unknown mobility field")),
                }
            }
            ["alloc", idx, field] => {
                let k: usize = c.num(idx)?;
                let d = allocs.entry(k).or_default();
                match *field {
                    "kind" => {
                        d.kind = Some(match value {
                            "sp" => AllocKind::Sp,
                            "cbap" => AllocKind::Cbap,
                            other => return Err(c.err(format!("unknown allocation kind {other:?}"))),
                        })
                    }
                    "src" => d.source = Some(c.num(value)?),
                    "dst" => d.destination = Some(c.num(value)?),
                    "start_ns" => d.start_ns = Some(c.num(value)?),
                    "duration_ns" => d.duration_ns = Some(c.num(value)?),
                    "spatial_share" => d.spatial_share = c.boolean(value)?,
                    _ => return Err(c.err("unknown allocation field")),
                }
            }
            ["flow", idx, field] => {
                let k: usize = c.num(idx)?;
                let d = flows.entry(k).or_default();
                match *field {
                    "src" => d.src = Some(c.num(value)?),
                    "dst" => d.dst = Some(c.num(value)?),
                    "ac" => {
                        d.ac = Some(match value {
                            "bk" => AccessCategory::Background,
                            "be" => AccessCategory::BestEffort,
                            "vi" => AccessCategory::Video,
                            "vo" => AccessCategory::Voice,
                            other => return Err(c.err(format!("unknown access category {other:?}"))),
                        })
                    }
                    "mcs" => d.mcs = Some(c.num(value)?),
                    "msdu_octets" => d.msdu_octets = Some(c.num(value)?),
                    "ampdu" => d.ampdu_subframes = c.num(value)?,
                    "loss_p" => d.loss_p = c.num(value)?,
                    "alloc" => d.alloc = Some(c.num(value)?),
                    _ => return Err(c.err("unknown flow field")),
                }
            }
            ["fst", "station"] => fst_station = Some(c.num(value)?),
            ["fst", "transparent"] => fst_transparent = c.boolean(value)?,
            ["fst", "llt_bis"] => fst_llt = c.num(value)?,
            ["fst", "ack_losses"] => fst_ack_losses = c.num(value)?,
            ["power", idx, field] => {
                let k: usize = c.num(idx)?;
                let d = powers.entry(k).or_default();
                match *field {
                    "period_bis" => d.period_bis = Some(c.num(value)?),
                    "offset_bi" => d.offset_bi = c.num(value)?,
                    "awake_window_ns" => d.awake_window_ns = Some(c.num(value)?),
                    _ => return Err(c.err("unknown power field")),
                }
            }
            _ => return Err(c.err("unknown key")),
        }
    }

    for (idx, d) in stations {
        if idx != sc.stations.len() {
            return Err(SimError::Parse(format!(
                "station indices must be contiguous from 0; missing {}",
                sc.stations.len()
            )));
        }
        let mobility = match (d.mobility_to_m, d.mobility_speed) {
            (Some(to_m), Some(speed_mps)) => Some(Mobility { to_m, speed_mps }),
            (None, None) => None,
            _ => {
                return Err(SimError::Parse(format!(
                    "station {idx}: mobility needs both to_m and speed_mps"
                )))
            }
        };
        sc.stations.push(StationDecl {
            role: d.role.unwrap_or(Role::Sta),
            distance_m: d.distance_m.unwrap_or(10.0),
            sectors: d.sectors.unwrap_or(4),
            trained: d.trained.unwrap_or(true),
            mobility,
        });
    }
    for (idx, d) in allocs {
        if idx != sc.allocations.len() {
            return Err(SimError::Parse(format!(
                "allocation indices must be contiguous from 0; missing {}",
                sc.allocations.len()
            )));
        }
        sc.allocations.push(AllocDecl {
            kind: d.kind.ok_or_else(|| {
                SimError::Parse(format!("allocation {idx}: missing kind"))
            })?,
            source: d.source.unwrap_or(0),
            destination: d.destination.unwrap_or(0),
            start_ns: d.start_ns.unwrap_or(0),
            duration_ns: d
                .duration_ns
                .ok_or_else(|| SimError::Parse(format!("allocation {idx}: missing duration_ns")))?,
            spatial_share: d.spatial_share,
        });
    }
    for (idx, d) in flows {
        if idx != sc.flows.len() {
            return Err(SimError::Parse(format!(
                "flow indices must be contiguous from 0; missing {}",
                sc.flows.len()
            )));
        }
        sc.flows.push(FlowDecl {
            src: d.src.ok_or_else(|| SimError::Parse(format!("flow {idx}: missing src")))?,
            dst: d.dst.ok_or_else(|| SimError::Parse(format!("flow {idx}: missing dst")))?,
            ac: d.ac.unwrap_or(AccessCategory::BestEffort),
            mcs: d.mcs.unwrap_or(1),
            msdu_octets: d
                .msdu_octets
                .ok_or_else(|| SimError::Parse(format!("flow {idx}: missing msdu_octets")))?,
            ampdu_subframes: d.ampdu_subframes,
            loss_p: d.loss_p,
            alloc: d.alloc.unwrap_or(0),
        });
    }
    if let Some(station) = fst_station {
        sc.fst = Some(FstDecl {
            station,
            transparent: fst_transparent,
            llt_bis: fst_llt,
            ack_losses: fst_ack_losses,
        });
    }
    for (idx, d) in powers {
        sc.power.push(PowerDecl {
            station: idx,
            schedule: WakeupSchedule {
                period_bis: d
                    .period_bis
                    .ok_or_else(|| SimError::Parse(format!("power {idx}: missing period_bis")))?,
                offset_bi: d.offset_bi,
                awake_window_ns: d
                    .awake_window_ns
                    .ok_or_else(|| SimError::Parse(format!("power {idx}: missing awake_window_ns")))?,
            },
        });
    }
    Ok(sc)
}

/// Checks every declared invariant; returns all violations, empty = valid.
/// Never touches simulation state.
pub fn validate(sc: &Scenario) -> Vec<String> {
    let mut errors = Vec::new();

    if sc.stations.is_empty() {
        errors.push("no stations declared".to_string());
    }
    let pcps: Vec<usize> = sc
        .stations
        .iter()
        .enumerate()
        .filter(|(_, s)| s.role == Role::Pcp)
        .map(|(i, _)| i)
        .collect();
    match pcps.len() {
        0 if !sc.stations.is_empty() => errors.push("no coordinator: exactly one station must have role pcp".into()),
        0 | 1 => {}
        _ => errors.push(format!("multiple PCP/AP declared: stations {pcps:?}")),
    }

    if sc.bi_ns == 0 || sc.duration_ns == 0 || sc.slot_ns == 0 {
        errors.push("durations (bi_ns, duration_ns, slot_ns) must be positive".into());
    }
    if sc.pcp_sectors == 0 {
        errors.push("the coordinator needs at least one sector".into());
    }
    if let Err(e) = sc.link.validate() {
        errors.push(format!("link: {e}"));
    }
    if let Err(e) = validate_params(&sc.edca) {
        errors.push(format!("edca: {e}"));
    }
    for pair in sc.thresholds_db.windows(2) {
        if pair[1] <= pair[0] {
            errors.push(format!(
                "reception thresholds must rise strictly with the rate index ({} then {})",
                pair[0], pair[1]
            ));
            break;
        }
    }

    for (i, st) in sc.stations.iter().enumerate() {
        if st.role == Role::Pcp && st.distance_m != 0.0 {
            errors.push(format!("station {i}: the coordinator's distance must be 0"));
        }
        if st.role == Role::Sta && !(st.distance_m > 0.0) {
            errors.push(format!("station {i}: distance must be positive"));
        }
        if st.sectors == 0 {
            errors.push(format!("station {i}: needs at least one sector"));
        }
        if let Some(m) = &st.mobility {
            if !(m.speed_mps > 0.0) {
                errors.push(format!("station {i}: mobility speed must be positive"));
            }
            if !(m.to_m > 0.0) {
                errors.push(format!("station {i}: mobility target must be positive"));
            }
        }
    }

    for (i, a) in sc.allocations.iter().enumerate() {
        if a.duration_ns == 0 {
            errors.push(format!("allocation {i}: zero duration"));
        }
        for side in [a.source, a.destination] {
            if side >= sc.stations.len() {
                errors.push(format!("allocation {i}: station {side} does not exist"));
            }
        }
    }
    // the schedule machinery owns the overlap rules
    let mut schedule = Schedule::new(sc.bi_ns);
    for a in &sc.allocations {
        let kind = match a.kind {
            AllocKind::Sp => AllocationKind::ServicePeriod {
                pseudo_static: false,
                spatial_share: a.spatial_share,
            },
            AllocKind::Cbap => AllocationKind::Cbap,
        };
        if let Err(e) = schedule.add(Allocation {
            kind,
            source: a.source as u16,
            destination: a.destination as u16,
            start_ns: a.start_ns,
            duration_ns: a.duration_ns,
        }) {
            errors.push(format!("schedule: {e}"));
        }
    }
    for e in schedule.validate() {
        errors.push(format!("schedule: {e}"));
    }

    for (i, f) in sc.flows.iter().enumerate() {
        for side in [f.src, f.dst] {
            if side >= sc.stations.len() {
                errors.push(format!("flow {i}: station {side} does not exist"));
            }
        }
        if f.src == f.dst {
            errors.push(format!("flow {i}: src and dst must differ"));
        }
        if f.alloc >= sc.allocations.len() {
            errors.push(format!("flow {i}: allocation {} does not exist", f.alloc));
        }
        if f.msdu_octets == 0 {
            errors.push(format!("flow {i}: empty payload"));
        }
        if !(0.0..1.0).contains(&f.loss_p) {
            errors.push(format!("flow {i}: loss_p must be in [0, 1)"));
        }
        match mcs(f.mcs) {
            Err(e) => errors.push(format!("flow {i}: {e}")),
            Ok(profile) => {
                if crate::phy::data::plan_data_encoding(16, profile).is_err() {
                    errors.push(format!(
                        "flow {i}: rate index {} cannot carry data frames",
                        f.mcs
                    ));
                }
            }
        }
        if f.ampdu_subframes > 0 {
            if let Err(e) = ampdu_psdu_octets(f.msdu_octets, f.ampdu_subframes) {
                errors.push(format!("flow {i}: {e}"));
            }
        } else {
            let air = 26 + f.msdu_octets + 4;
            if air as usize >= (1 << 18) {
                errors.push(format!("flow {i}: frame exceeds the length field"));
            }
        }
    }

    if let Some(fst) = &sc.fst {
        if fst.station >= sc.stations.len() {
            errors.push(format!("fst: station {} does not exist", fst.station));
        } else if !sc
            .flows
            .iter()
            .any(|f| f.src == fst.station || f.dst == fst.station)
        {
            errors.push(format!(
                "fst: station {} carries no flow to transfer",
                fst.station
            ));
        }
    }

    for p in &sc.power {
        if p.station >= sc.stations.len() {
            errors.push(format!("power: station {} does not exist", p.station));
        } else if sc.stations[p.station].role == Role::Pcp {
            errors.push("power: the coordinator cannot power-save".into());
        }
        if let Err(e) = p.schedule.validate() {
            errors.push(format!("power: station {}: {e}", p.station));
        }
        if p.schedule.awake_window_ns > sc.bi_ns {
            errors.push(format!(
                "power: station {}: awake window exceeds the beacon interval",
                p.station
            ));
        }
    }

    if let Some(path) = &sc.channel_file {
        match std::fs::read_to_string(path) {
            Err(e) => errors.push(format!("channel file {path}: {e}")),
            Ok(text) => {
                if let Err(e) = crate::bf::channel::SectorChannel::parse_csv(&text) {
                    errors.push(format!("channel file {path}: {e}"));
                }
            }
        }
    }

    errors
}
