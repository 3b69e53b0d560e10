//! The deterministic event loop.
//!
//! Each beacon interval is laid out as a sector-sweep window, an optional
//! contention training window, an announcement window, and the data transfer
//! interval carrying the declared allocations. Service periods run
//! contention-free exchange chains whose cycle arithmetic matches the
//! analytic throughput model to the nanosecond; contention periods run
//! prioritized slotted access on top of the per-station queue engines.
//! Mobility updates re-evaluate the link budget, the band-transfer state
//! machine rides on top of it, and power-save schedules gate reception.
//!
//! Determinism: one ordered event queue (ties resolved by kind rank, then
//! insertion order), one deterministic generator per station and per flow,
//! derived from the scenario seed by a fixed integer mix. Equal scenarios
//! and seeds produce byte-identical trace and counter files. Slot
//! boundaries advance contention silently; the trace records interval
//! boundaries, mobility, and frames.
//!
//! Two simplifications are deliberate: the sweep/training overhead is
//! budgeted at its worst case every interval so allocation windows recur at
//! fixed offsets, and a stream under band transfer keeps its pacing
//! windows while its frames ride the active band's rates.

use super::event::{Event, EventKind, EventQueue};
use super::metrics::{MetricsCollector, TraceRow, AC_LABELS, NO_STATION};
use super::scenario::{self, AllocKind, Role, Scenario};
use super::SimError;
use crate::bf::beacon::{plan_beacon_sweep, BeaconFrame, BeaconSweepConfig};
use crate::bf::channel::SectorId;
use crate::link::{snr_db, LinkParams};
use crate::mac::edca::EdcaEngine;
use crate::phy::mcs::{mcs, McsProfile};
use crate::phy::timing::{ppdu_duration_ns, PhyTiming};
use crate::station::band::{band_select, reference_bands, BandProfile};
use crate::station::fst::{FstEvent, FstSession, FstState};
use crate::station::power::WakeupSchedule;
use crate::tput::ampdu_psdu_octets;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::collections::{BTreeMap, VecDeque};

const MOBILITY_STEP_NS: u64 = 1_000_000;
const BEACON_OCTETS: usize = 64;
const SSW_OCTETS: usize = 26;
const SSW_FEEDBACK_OCTETS: usize = 28;
const FST_FRAME_OCTETS: usize = 28;
const ACK_OCTETS: usize = 14;
const BLOCK_ACK_OCTETS: usize = 32;
const MAC_OVERHEAD_OCTETS: u32 = 26 + 4;

/// Fixed integer mix (splitmix-style) deriving independent sub-seeds from
/// the scenario seed; part of the determinism contract.
fn sub_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const SALT_STATION: u64 = 0x0100_0000;
const SALT_FLOW: u64 = 0x0200_0000;
const SALT_BEACON: u64 = 0x0300_0000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BandLabel {
    Sixty,
    Legacy,
}

impl BandLabel {
    fn as_str(self) -> &'static str {
        match self {
            BandLabel::Sixty => "60ghz",
            BandLabel::Legacy => "2.4ghz",
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Origin {
    Sp { alloc: usize },
    Cbap,
}

#[derive(Debug, Clone)]
enum Purpose {
    Beacon { cdown: u32 },
    Ssw { collided: bool },
    SswFeedback { station: usize, rescue: bool },
    Data {
        flow: usize,
        seqs: Vec<u64>,
        cycle_start: u64,
        cycle_ns: u64,
        origin: Origin,
    },
    Ack {
        flow: usize,
        results: Vec<(u64, bool)>,
        cycle_ns: u64,
        origin: Origin,
    },
    CollisionBurst,
    FstSetupRequest,
    FstSetupResponse,
    FstAck,
}

#[derive(Debug, Clone)]
struct FrameRecord {
    src: u16,
    dst: u16,
    ac: usize, // 4 = not applicable
    band: BandLabel,
    mcs: u8,
    octets: u32,
    rate_bps: u64,
    air_ns: u64,
    purpose: Purpose,
}

#[derive(Debug, Clone, Copy)]
enum TimerAction {
    SpStart { alloc: usize },
    SpNext { alloc: usize },
    CycleTimeout { frame: usize },
    FstResend,
}

struct StationState {
    role: Role,
    distance_m: f64,
    sectors: u8,
    trained: bool,
    abft_attempts: u32,
    mobility: Option<scenario::Mobility>,
    rng: ChaCha20Rng,
    edca: EdcaEngine,
    ready_ns: [VecDeque<u64>; 4],
    ps: Option<WakeupSchedule>,
    awake: bool,
}

/// Per-flow cycle accounting; `busy_ns` sums completed exchange cycles so
/// delivered bits over busy time reproduces the analytic model exactly in
/// the loss-free contention-free case.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlowStats {
    pub cycles: u64,
    pub delivered_frames: u64,
    pub delivered_octets: u64,
    pub lost_frames: u64,
    pub busy_ns: u64,
}

struct FlowState {
    decl: scenario::FlowDecl,
    profile: &'static McsProfile,
    rng: ChaCha20Rng,
    next_seq: u64,
    retry: VecDeque<u64>,
    offered_at: BTreeMap<u64, u64>,
    stats: FlowStats,
}

struct FstRuntime {
    station: usize,
    peer: usize,
    session: FstSession,
    remaining_ack_losses: u32,
    bands: Vec<BandProfile>,
}

/// Everything a finished run hands back.
pub struct RunResult {
    pub trace: Vec<TraceRow>,
    pub metrics: MetricsCollector,
    pub flow_stats: Vec<FlowStats>,
    pub duration_ns: u64,
    pub events_processed: u64,
}

/// One cycle's link parameters, resolved at cycle start so a band transfer
/// takes effect on the next exchange boundary.
struct CycleLink {
    band: BandLabel,
    mcs: u8,
    rate_bps: u64,
    psdu_octets: u32,
    data_air_ns: u64,
    ack_air_ns: u64,
    cycle_ns: u64,
    ack_octets: u32,
}

fn legacy_air_ns(octets: u32, rate_bps: u64) -> u64 {
    (u128::from(octets) * 8 * 1_000_000_000 / u128::from(rate_bps)) as u64
}

/// Scenario-level checks that need the engine's timing arithmetic: the
/// fixed per-interval overhead and the fit of every allocation inside the
/// data transfer interval.
pub fn preflight(sc: &Scenario) -> Vec<String> {
    let mut errors = scenario::validate(sc);
    let phy = PhyTiming::default();
    let control = match mcs(0) {
        Ok(p) => p,
        Err(e) => {
            errors.push(format!("rate table: {e}"));
            return errors;
        }
    };
    let air = |octets: usize| ppdu_duration_ns(control, octets, 0, &phy).unwrap_or(0);
    let beacon_slot = air(BEACON_OCTETS) + sc.sifs_ns;
    let beacons = sc.beacons_per_bti.min(sc.pcp_sectors as usize) as u64;
    let bti_ns = beacons * beacon_slot;
    let max_sectors = sc
        .stations
        .iter()
        .filter(|s| s.role == Role::Sta)
        .map(|s| u64::from(s.sectors))
        .max()
        .unwrap_or(0);
    let abft_slot_ns = max_sectors * air(SSW_OCTETS) + air(SSW_FEEDBACK_OCTETS) + 2 * sc.sifs_ns;
    let abft_ns = u64::from(sc.abft_slots) * abft_slot_ns;
    let overhead = bti_ns + abft_ns + sc.ati_ns;
    if overhead >= sc.bi_ns {
        errors.push(format!(
            "interval overhead {overhead} ns leaves no data transfer interval in {} ns",
            sc.bi_ns
        ));
        return errors;
    }
    let dti_ns = sc.bi_ns - overhead;
    for (i, a) in sc.allocations.iter().enumerate() {
        if a.start_ns + a.duration_ns > dti_ns {
            errors.push(format!(
                "allocation {i} ends at {} ns but the data transfer interval is {dti_ns} ns",
                a.start_ns + a.duration_ns
            ));
        }
    }
    // a contention grant can only be honored if one full exchange fits
    for (i, f) in sc.flows.iter().enumerate() {
        let Some(a) = sc.allocations.get(f.alloc) else {
            continue;
        };
        if a.kind != AllocKind::Cbap {
            continue;
        }
        let Ok(profile) = mcs(f.mcs) else { continue };
        let psdu = if f.ampdu_subframes > 0 {
            match ampdu_psdu_octets(f.msdu_octets, f.ampdu_subframes) {
                Ok(p) => p,
                Err(_) => continue,
            }
        } else {
            MAC_OVERHEAD_OCTETS + f.msdu_octets
        };
        let Ok(data_air) = ppdu_duration_ns(profile, psdu as usize, 0, &phy) else {
            continue;
        };
        let ack_air = if f.ampdu_subframes > 0 {
            air(BLOCK_ACK_OCTETS)
        } else {
            air(ACK_OCTETS)
        };
        let cycle = data_air + ack_air + 2 * sc.sifs_ns;
        if cycle > a.duration_ns {
            errors.push(format!(
                "flow {i}: one exchange ({cycle} ns) exceeds its contention window ({} ns)",
                a.duration_ns
            ));
        }
    }
    errors
}

/// Validates, then runs the scenario to its horizon. Validation problems
/// come back as one list before any event fires.
pub fn run(sc: &Scenario) -> Result<RunResult, SimError> {
    let errors = preflight(sc);
    if !errors.is_empty() {
        return Err(SimError::Invalid(errors));
    }
    Engine::new(sc)?.run()
}

struct Engine<'a> {
    sc: &'a Scenario,
    phy: PhyTiming,
    now: u64,
    queue: EventQueue,
    trace: Vec<TraceRow>,
    metrics: MetricsCollector,
    frames: Vec<FrameRecord>,
    timers: Vec<TimerAction>,
    stations: Vec<StationState>,
    flows: Vec<FlowState>,
    pcp: usize,
    beacon_plan: BTreeMap<u32, Vec<BeaconFrame>>,
    overhead_ns: u64,
    abft_slot_ns: u64,
    sp_flows: Vec<Vec<usize>>,
    sp_windows: Vec<Option<(u64, u64)>>,
    sp_cursor: Vec<usize>,
    cbap_windows: Vec<Option<(u64, u64)>>,
    cbap_stations: Vec<Vec<usize>>,
    cbap_flow_of: BTreeMap<(usize, usize, usize), usize>,
    busy_until: u64,
    fst: Option<FstRuntime>,
    events_processed: u64,
    beacon_air_ns: u64,
    ssw_air_ns: u64,
    ssw_fb_air_ns: u64,
    control_rate_bps: u64,
}

impl<'a> Engine<'a> {
    fn new(sc: &'a Scenario) -> Result<Engine<'a>, SimError> {
        let phy = PhyTiming::default();
        let control = mcs(0).expect("control row exists");
        let air = |octets: usize| -> Result<u64, SimError> {
            ppdu_duration_ns(control, octets, 0, &phy)
                .map_err(|e| SimError::Runtime(e.to_string()))
        };
        let beacon_air_ns = air(BEACON_OCTETS)?;
        let ssw_air_ns = air(SSW_OCTETS)?;
        let ssw_fb_air_ns = air(SSW_FEEDBACK_OCTETS)?;

        let pcp = sc
            .stations
            .iter()
            .position(|s| s.role == Role::Pcp)
            .expect("validated: exactly one coordinator");

        let stations: Vec<StationState> = sc
            .stations
            .iter()
            .enumerate()
            .map(|(i, d)| StationState {
                role: d.role,
                distance_m: d.distance_m,
                sectors: d.sectors,
                trained: d.trained || d.role == Role::Pcp,
                abft_attempts: 0,
                mobility: d.mobility,
                rng: ChaCha20Rng::seed_from_u64(sub_seed(sc.seed, SALT_STATION + i as u64)),
                edca: EdcaEngine::new(sc.edca).expect("validated before any event runs"),
                ready_ns: Default::default(),
                ps: sc
                    .power
                    .iter()
                    .find(|p| p.station == i)
                    .map(|p| p.schedule),
                awake: true,
            })
            .collect();

        let flows: Vec<FlowState> = sc
            .flows
            .iter()
            .enumerate()
            .map(|(j, d)| FlowState {
                decl: d.clone(),
                profile: mcs(d.mcs).expect("validated"),
                rng: ChaCha20Rng::seed_from_u64(sub_seed(sc.seed, SALT_FLOW + j as u64)),
                next_seq: 0,
                retry: VecDeque::new(),
                offered_at: BTreeMap::new(),
                stats: FlowStats::default(),
            })
            .collect();

        // One continuous sector sweep after another, for the whole horizon.
        let mut beacon_plan: BTreeMap<u32, Vec<BeaconFrame>> = BTreeMap::new();
        let sectors: Vec<SectorId> = (0..sc.pcp_sectors).map(|s| SectorId::new(0, s)).collect();
        let config = BeaconSweepConfig {
            beacons_per_bti: sc.beacons_per_bti,
            shuffle_within_bti: false,
            random_start_delay: false,
        };
        let n_bis = sc.duration_ns.div_ceil(sc.bi_ns) as u32;
        let mut beacon_rng = ChaCha20Rng::seed_from_u64(sub_seed(sc.seed, SALT_BEACON));
        let mut base_bi = 0u32;
        while base_bi < n_bis {
            let sweep = plan_beacon_sweep(&sectors, config, &mut beacon_rng)
                .map_err(|e| SimError::Runtime(e.to_string()))?;
            let sweep_bis = sweep.iter().map(|b| b.bi).max().unwrap_or(0) + 1;
            for mut b in sweep {
                b.bi += base_bi;
                beacon_plan.entry(b.bi).or_default().push(b);
            }
            base_bi += sweep_bis;
        }

        let beacons_per_bti = sc.beacons_per_bti.min(sc.pcp_sectors as usize) as u64;
        let bti_ns = beacons_per_bti * (beacon_air_ns + sc.sifs_ns);
        let max_sectors = sc
            .stations
            .iter()
            .filter(|s| s.role == Role::Sta)
            .map(|s| u64::from(s.sectors))
            .max()
            .unwrap_or(0);
        let abft_slot_ns = max_sectors * ssw_air_ns + ssw_fb_air_ns + 2 * sc.sifs_ns;
        let overhead_ns = bti_ns + u64::from(sc.abft_slots) * abft_slot_ns + sc.ati_ns;

        let mut sp_flows = vec![Vec::new(); sc.allocations.len()];
        let mut cbap_stations = vec![Vec::new(); sc.allocations.len()];
        let mut cbap_flow_of = BTreeMap::new();
        for (j, f) in sc.flows.iter().enumerate() {
            match sc.allocations[f.alloc].kind {
                AllocKind::Sp => sp_flows[f.alloc].push(j),
                AllocKind::Cbap => {
                    if !cbap_stations[f.alloc].contains(&f.src) {
                        cbap_stations[f.alloc].push(f.src);
                    }
                    cbap_flow_of
                        .entry((f.alloc, f.src, f.ac.index()))
                        .or_insert(j);
                }
            }
        }
        for list in &mut cbap_stations {
            list.sort_unstable();
        }

        let fst = sc.fst.as_ref().map(|d| {
            let peer = sc
                .flows
                .iter()
                .find_map(|f| {
                    if f.src == d.station {
                        Some(f.dst)
                    } else if f.dst == d.station {
                        Some(f.src)
                    } else {
                        None
                    }
                })
                .expect("validated: the station carries a flow");
            FstRuntime {
                station: d.station,
                peer,
                session: FstSession::new(d.transparent, d.llt_bis),
                remaining_ack_losses: d.ack_losses,
                bands: reference_bands(),
            }
        });

        let mut metrics = MetricsCollector::new();
        for i in 0..sc.stations.len() {
            metrics.register_station(i as u16);
        }

        let mut queue = EventQueue::new();
        queue.push(Event {
            time_ns: 0,
            kind: EventKind::BiBoundary,
            payload: 0,
        });
        if sc.stations.iter().any(|s| s.mobility.is_some()) {
            let mut t = MOBILITY_STEP_NS;
            while t < sc.duration_ns {
                queue.push(Event {
                    time_ns: t,
                    kind: EventKind::MobilityUpdate,
                    payload: 0,
                });
                t += MOBILITY_STEP_NS;
            }
        }

        Ok(Engine {
            sc,
            phy,
            now: 0,
            queue,
            trace: Vec::new(),
            metrics,
            frames: Vec::new(),
            timers: Vec::new(),
            stations,
            flows,
            pcp,
            beacon_plan,
            overhead_ns,
            abft_slot_ns,
            sp_windows: vec![None; sc.allocations.len()],
            sp_cursor: vec![0; sc.allocations.len()],
            sp_flows,
            cbap_windows: vec![None; sc.allocations.len()],
            cbap_stations,
            cbap_flow_of,
            busy_until: 0,
            fst,
            events_processed: 0,
            beacon_air_ns,
            ssw_air_ns,
            ssw_fb_air_ns,
            control_rate_bps: control.data_rate_bps as u64,
        })
    }

    fn run(mut self) -> Result<RunResult, SimError> {
        while let Some(ev) = self.queue.pop() {
            if ev.time_ns >= self.sc.duration_ns {
                break;
            }
            debug_assert!(ev.time_ns >= self.now, "time must not run backwards");
            self.now = ev.time_ns;
            self.events_processed += 1;
            match ev.kind {
                EventKind::BiBoundary => self.on_bi_boundary(ev.payload as u32),
                EventKind::MobilityUpdate => self.on_mobility(),
                EventKind::SlotBoundary => self.on_slot(ev.payload as usize),
                EventKind::FrameTxStart => self.on_tx_start(ev.payload as usize),
                EventKind::FrameRxEnd => self.on_rx_end(ev.payload as usize),
                EventKind::TimerExpiry => self.on_timer(ev.payload as usize),
            }
        }
        if !self.metrics.conservation_holds() {
            return Err(SimError::Runtime(
                "counter conservation violated (offered < delivered + dropped)".into(),
            ));
        }
        Ok(RunResult {
            trace: self.trace,
            metrics: self.metrics,
            flow_stats: self.flows.iter().map(|f| f.stats).collect(),
            duration_ns: self.sc.duration_ns,
            events_processed: self.events_processed,
        })
    }

    // ---- trace helpers ----

    fn trace_marker(&mut self, kind: &str, info: String) {
        self.trace.push(TraceRow {
            time_ns: self.now,
            kind: kind.to_string(),
            src: NO_STATION,
            dst: NO_STATION,
            ac: "-".into(),
            band: "-".into(),
            mcs: 0,
            octets: 0,
            rate_bps: 0,
            info,
        });
    }

    fn trace_frame(&mut self, kind: &str, frame: usize, info: String) {
        let r = &self.frames[frame];
        self.trace.push(TraceRow {
            time_ns: self.now,
            kind: kind.to_string(),
            src: r.src,
            dst: r.dst,
            ac: if r.ac < 4 { AC_LABELS[r.ac].into() } else { "-".into() },
            band: r.band.as_str().into(),
            mcs: r.mcs,
            octets: r.octets,
            rate_bps: r.rate_bps,
            info,
        });
    }

    // ---- frame plumbing ----

    fn push_frame(&mut self, at_ns: u64, record: FrameRecord) -> usize {
        let idx = self.frames.len();
        self.frames.push(record);
        self.queue.push(Event {
            time_ns: at_ns,
            kind: EventKind::FrameTxStart,
            payload: idx as u64,
        });
        idx
    }

    fn push_timer(&mut self, at_ns: u64, action: TimerAction) {
        let idx = self.timers.len();
        self.timers.push(action);
        self.queue.push(Event {
            time_ns: at_ns,
            kind: EventKind::TimerExpiry,
            payload: idx as u64,
        });
    }

    fn on_tx_start(&mut self, frame: usize) {
        if let Purpose::Beacon { .. } = self.frames[frame].purpose {
            self.metrics.bf_frames(self.frames[frame].src, 1);
        }
        if let Purpose::Ssw { .. } = self.frames[frame].purpose {
            self.metrics.bf_frames(self.frames[frame].src, 1);
        }
        let air = self.frames[frame].air_ns;
        self.trace_frame("frame_tx_start", frame, "air".into());
        self.queue.push(Event {
            time_ns: self.now + air,
            kind: EventKind::FrameRxEnd,
            payload: frame as u64,
        });
    }

    /// Distance between two stations: radial coordinates around the
    /// coordinator, so a link to the coordinator uses the station's own
    /// distance and a side link uses the radial separation.
    fn pair_distance_m(&self, a: u16, b: u16) -> f64 {
        let (a, b) = (a as usize, b as usize);
        let d = if a == self.pcp {
            self.stations[b].distance_m
        } else if b == self.pcp {
            self.stations[a].distance_m
        } else {
            (self.stations[a].distance_m - self.stations[b].distance_m).abs()
        };
        d.max(0.1)
    }

    fn link_snr_db(&self, src: u16, dst: u16) -> f64 {
        let params = LinkParams {
            distance_m: self.pair_distance_m(src, dst),
            ..self.sc.link
        };
        snr_db(&params).unwrap_or(f64::NEG_INFINITY)
    }

    /// Reception verdict for one transmission on the 60 GHz band.
    fn decodes(&self, src: u16, dst: u16, mcs_index: u8) -> bool {
        self.link_snr_db(src, dst) >= self.sc.thresholds_db[mcs_index as usize]
    }

    fn dst_awake(&self, dst: u16) -> bool {
        self.stations
            .get(dst as usize)
            .map_or(true, |s| s.awake)
    }

    // ---- beacon interval layout ----

    fn on_bi_boundary(&mut self, bi: u32) {
        let bi_start = self.now;
        let bi_end = (bi_start + self.sc.bi_ns).min(self.sc.duration_ns);
        let bi_len = bi_end - bi_start;
        self.trace_marker("bi_boundary", format!("bi={bi}"));

        // power-save bookkeeping: who listens this interval
        for i in 0..self.stations.len() {
            let (awake, awake_ns) = match &self.stations[i].ps {
                Some(ws) => {
                    if ws.awake_at(bi, 0) {
                        (true, ws.awake_window_ns.min(bi_len))
                    } else {
                        (false, 0)
                    }
                }
                None => (true, bi_len),
            };
            self.stations[i].awake = awake;
            self.metrics.awake(i as u16, awake_ns);
        }

        // band-transfer countdown rides on interval boundaries
        self.fst_tick_bi();

        // sweep window
        if let Some(frames) = self.beacon_plan.get(&bi).cloned() {
            let mut t = bi_start;
            for b in &frames {
                t += u64::from(b.start_delay_slots) * self.sc.slot_ns;
                let record = FrameRecord {
                    src: self.pcp as u16,
                    dst: NO_STATION,
                    ac: 4,
                    band: BandLabel::Sixty,
                    mcs: 0,
                    octets: BEACON_OCTETS as u32,
                    rate_bps: self.control_rate_bps,
                    air_ns: self.beacon_air_ns,
                    purpose: Purpose::Beacon { cdown: b.cdown },
                };
                self.push_frame(t, record);
                t += self.beacon_air_ns + self.sc.sifs_ns;
            }
        }

        // contention training window
        if self.sc.abft_slots > 0 {
            self.run_abft(bi_start);
        }

        // data transfer interval
        let dti_start = bi_start + self.overhead_ns;
        for (k, a) in self.sc.allocations.iter().enumerate() {
            let start = dti_start + a.start_ns;
            let end = (start + a.duration_ns).min(self.sc.duration_ns);
            if start >= end {
                self.sp_windows[k] = None;
                continue;
            }
            match a.kind {
                AllocKind::Sp => {
                    self.sp_windows[k] = Some((start, end));
                    self.cbap_windows[k] = None;
                    self.push_timer(start, TimerAction::SpStart { alloc: k });
                }
                AllocKind::Cbap => {
                    self.sp_windows[k] = None;
                    self.cbap_windows[k] = Some((start, end));
                    self.seed_cbap(k);
                    let mut t = start;
                    while t + self.sc.slot_ns <= end {
                        self.queue.push(Event {
                            time_ns: t,
                            kind: EventKind::SlotBoundary,
                            payload: k as u64,
                        });
                        t += self.sc.slot_ns;
                    }
                }
            }
        }

        let next = bi_start + self.sc.bi_ns;
        if next < self.sc.duration_ns {
            self.queue.push(Event {
                time_ns: next,
                kind: EventKind::BiBoundary,
                payload: u64::from(bi) + 1,
            });
        }
    }

    /// One contention-training round: every untrained station draws a slot;
    /// sole occupants train, colliding ones retry next interval, and a
    /// station out of retries is rescued with scheduled training.
    fn run_abft(&mut self, bi_start: u64) {
        let untrained: Vec<usize> = (0..self.stations.len())
            .filter(|&i| !self.stations[i].trained && self.stations[i].role == Role::Sta)
            .collect();
        if untrained.is_empty() {
            return;
        }
        let slots = self.sc.abft_slots;
        let window_start = bi_start
            + self.sc.beacons_per_bti.min(self.sc.pcp_sectors as usize) as u64
                * (self.beacon_air_ns + self.sc.sifs_ns);
        let mut choices = Vec::with_capacity(untrained.len());
        for &i in &untrained {
            let slot = self.stations[i].rng.gen_range(0..slots);
            choices.push(slot);
        }
        let mut occupancy = vec![0u32; slots as usize];
        for &c in &choices {
            occupancy[c as usize] += 1;
        }
        for (&i, &slot) in untrained.iter().zip(&choices) {
            let collided = occupancy[slot as usize] > 1;
            let slot_base = window_start + u64::from(slot) * self.abft_slot_ns;
            let mut t = slot_base;
            for _ in 0..self.stations[i].sectors {
                let record = FrameRecord {
                    src: i as u16,
                    dst: self.pcp as u16,
                    ac: 4,
                    band: BandLabel::Sixty,
                    mcs: 0,
                    octets: SSW_OCTETS as u32,
                    rate_bps: self.control_rate_bps,
                    air_ns: self.ssw_air_ns,
                    purpose: Purpose::Ssw { collided },
                };
                self.push_frame(t, record);
                t += self.ssw_air_ns;
            }
            self.stations[i].abft_attempts += 1;
            if !collided {
                let record = FrameRecord {
                    src: self.pcp as u16,
                    dst: i as u16,
                    ac: 4,
                    band: BandLabel::Sixty,
                    mcs: 0,
                    octets: SSW_FEEDBACK_OCTETS as u32,
                    rate_bps: self.control_rate_bps,
                    air_ns: self.ssw_fb_air_ns,
                    purpose: Purpose::SswFeedback {
                        station: i,
                        rescue: false,
                    },
                };
                self.push_frame(t + self.sc.sifs_ns, record);
            } else if self.stations[i].abft_attempts > self.sc.abft_retry_limit {
                // out of contention retries: the coordinator schedules the
                // training directly instead of waiting for a lucky slot
                let record = FrameRecord {
                    src: self.pcp as u16,
                    dst: i as u16,
                    ac: 4,
                    band: BandLabel::Sixty,
                    mcs: 0,
                    octets: SSW_FEEDBACK_OCTETS as u32,
                    rate_bps: self.control_rate_bps,
                    air_ns: self.ssw_fb_air_ns,
                    purpose: Purpose::SswFeedback {
                        station: i,
                        rescue: true,
                    },
                };
                self.push_frame(t + self.sc.sifs_ns, record);
            }
        }
    }

    // ---- contention-free chains ----

    /// Link parameters of one exchange cycle, honoring the band the flow is
    /// on right now.
    fn cycle_link(&self, flow: usize) -> CycleLink {
        let f = &self.flows[flow];
        let on_legacy = self
            .fst
            .as_ref()
            .map(|r| {
                (f.decl.src == r.station || f.decl.dst == r.station)
                    && r.session.state() != FstState::Confirmed
            })
            .unwrap_or(false);
        if on_legacy {
            let r = self.fst.as_ref().expect("checked");
            let d = self.pair_distance_m(f.decl.src as u16, f.decl.dst as u16);
            let rate = r.bands[0].rate_at(d).unwrap_or(0.0) as u64;
            let psdu = MAC_OVERHEAD_OCTETS + f.decl.msdu_octets;
            let (data_air, ack_air) = if rate == 0 {
                (0, 0)
            } else {
                (
                    legacy_air_ns(psdu, rate),
                    legacy_air_ns(ACK_OCTETS as u32, rate),
                )
            };
            CycleLink {
                band: BandLabel::Legacy,
                mcs: 0,
                rate_bps: rate,
                psdu_octets: psdu,
                data_air_ns: data_air,
                ack_air_ns: ack_air,
                cycle_ns: data_air + ack_air + 2 * self.sc.sifs_ns,
                ack_octets: ACK_OCTETS as u32,
            }
        } else {
            let (psdu, ack_octets) = if f.decl.ampdu_subframes > 0 {
                (
                    ampdu_psdu_octets(f.decl.msdu_octets, f.decl.ampdu_subframes)
                        .expect("validated"),
                    BLOCK_ACK_OCTETS as u32,
                )
            } else {
                (MAC_OVERHEAD_OCTETS + f.decl.msdu_octets, ACK_OCTETS as u32)
            };
            let data_air =
                ppdu_duration_ns(f.profile, psdu as usize, 0, &self.phy).expect("validated");
            let control = mcs(0).expect("control row exists");
            let ack_air =
                ppdu_duration_ns(control, ack_octets as usize, 0, &self.phy).expect("fits");
            CycleLink {
                band: BandLabel::Sixty,
                mcs: f.decl.mcs,
                rate_bps: f.profile.data_rate_bps as u64,
                psdu_octets: psdu,
                data_air_ns: data_air,
                ack_air_ns: ack_air,
                cycle_ns: data_air + ack_air + 2 * self.sc.sifs_ns,
                ack_octets,
            }
        }
    }

    /// Takes the next payload sequence numbers for one cycle: retransmits
    /// first, fresh ones after, each fresh one counted as offered. Fresh
    /// payloads are stamped `ready_at` (the head-of-line enqueue time for
    /// contention traffic) so the delivery delay covers the access wait,
    /// not just the exchange itself.
    fn take_seqs(&mut self, flow: usize, n: u32, ready_at: Option<u64>) -> Vec<u64> {
        let src = self.flows[flow].decl.src as u16;
        let ac = self.flows[flow].decl.ac.index();
        let stamp = ready_at.unwrap_or(self.now);
        let mut seqs = Vec::with_capacity(n as usize);
        let mut fresh = 0u64;
        let f = &mut self.flows[flow];
        for _ in 0..n {
            if let Some(s) = f.retry.pop_front() {
                seqs.push(s);
            } else {
                let s = f.next_seq;
                f.next_seq += 1;
                f.offered_at.insert(s, stamp);
                seqs.push(s);
                fresh += 1;
            }
        }
        if fresh > 0 {
            self.metrics.offer(src, ac, fresh);
        }
        seqs
    }

    fn on_timer(&mut self, idx: usize) {
        match self.timers[idx] {
            TimerAction::SpStart { alloc } => {
                self.start_sp_cycle(alloc);
            }
            TimerAction::SpNext { alloc } => {
                self.start_sp_cycle(alloc);
            }
            TimerAction::CycleTimeout { frame } => self.on_cycle_timeout(frame),
            TimerAction::FstResend => self.fst_send_ack(),
        }
    }

    /// Starts the next exchange in a service period, rotating among its
    /// flows; gives up when nothing fits before the window closes.
    fn start_sp_cycle(&mut self, alloc: usize) {
        let Some((start, end)) = self.sp_windows[alloc] else {
            return;
        };
        if self.now < start {
            return; // stale continuation from the previous interval
        }
        let flows = self.sp_flows[alloc].clone();
        if flows.is_empty() {
            return;
        }
        for _ in 0..flows.len() {
            let pick = flows[self.sp_cursor[alloc] % flows.len()];
            self.sp_cursor[alloc] += 1;
            let link = self.cycle_link(pick);
            if link.rate_bps == 0 {
                self.trace_marker("timer_expiry", format!("sp-out-of-reach flow={pick}"));
                continue;
            }
            if !self.dst_awake(self.flows[pick].decl.dst as u16) {
                self.trace_marker("timer_expiry", format!("sp-dst-asleep flow={pick}"));
                continue;
            }
            if self.now + link.cycle_ns > end {
                return; // window exhausted for anything at this rate
            }
            let n = self.flows[pick].decl.ampdu_subframes.max(1);
            let seqs = self.take_seqs(pick, n, None);
            let record = FrameRecord {
                src: self.flows[pick].decl.src as u16,
                dst: self.flows[pick].decl.dst as u16,
                ac: self.flows[pick].decl.ac.index(),
                band: link.band,
                mcs: link.mcs,
                octets: link.psdu_octets,
                rate_bps: link.rate_bps,
                air_ns: link.data_air_ns,
                purpose: Purpose::Data {
                    flow: pick,
                    seqs,
                    cycle_start: self.now,
                    cycle_ns: link.cycle_ns,
                    origin: Origin::Sp { alloc },
                },
            };
            self.push_frame(self.now, record);
            return;
        }
    }

    // ---- contention periods ----

    /// Seeds one queued frame per declared flow so the contention queues
    /// start loaded; the saturated source refills after every delivery.
    fn seed_cbap(&mut self, alloc: usize) {
        for &si in &self.cbap_stations[alloc].clone() {
            for f in 0..self.flows.len() {
                let d = &self.flows[f].decl;
                if d.alloc != alloc || d.src != si {
                    continue;
                }
                let ac = d.ac;
                if self.stations[si].edca.pending(ac) == 0 {
                    let now = self.now;
                    let st = &mut self.stations[si];
                    st.edca.enqueue(ac, 1, &mut st.rng);
                    st.ready_ns[ac.index()].push_back(now);
                }
            }
        }
    }

    fn on_slot(&mut self, alloc: usize) {
        let Some((_, window_end)) = self.cbap_windows[alloc] else {
            return;
        };
        let busy = self.now < self.busy_until;
        let mut grants = Vec::new();
        for &si in &self.cbap_stations[alloc].clone() {
            let st = &mut self.stations[si];
            if let Some(g) = st.edca.observe_slot(busy, &mut st.rng) {
                grants.push((si, g));
            }
        }
        match grants.len() {
            0 => {}
            1 => {
                let (si, g) = grants[0];
                let Some(&flow) = self.cbap_flow_of.get(&(alloc, si, g.ac.index())) else {
                    return;
                };
                let link = self.cycle_link(flow);
                if self.now + link.cycle_ns > window_end {
                    return; // the exchange cannot finish: hold the grant
                }
                let n = self.flows[flow].decl.ampdu_subframes.max(1);
                let ready_at = self.stations[si].ready_ns[g.ac.index()].front().copied();
                let seqs = self.take_seqs(flow, n, ready_at);
                self.busy_until = self.now + link.cycle_ns;
                let record = FrameRecord {
                    src: si as u16,
                    dst: self.flows[flow].decl.dst as u16,
                    ac: g.ac.index(),
                    band: link.band,
                    mcs: link.mcs,
                    octets: link.psdu_octets,
                    rate_bps: link.rate_bps,
                    air_ns: link.data_air_ns,
                    purpose: Purpose::Data {
                        flow,
                        seqs,
                        cycle_start: self.now,
                        cycle_ns: link.cycle_ns,
                        origin: Origin::Cbap,
                    },
                };
                self.push_frame(self.now, record);
            }
            _ => {
                // on-air collision between stations: everyone doubles and
                // redraws; the medium is wasted for the longest burst
                let mut longest = 0;
                for &(si, g) in &grants {
                    if let Some(&flow) = self.cbap_flow_of.get(&(alloc, si, g.ac.index())) {
                        let link = self.cycle_link(flow);
                        longest = longest.max(link.data_air_ns);
                        let record = FrameRecord {
                            src: si as u16,
                            dst: self.flows[flow].decl.dst as u16,
                            ac: g.ac.index(),
                            band: link.band,
                            mcs: link.mcs,
                            octets: link.psdu_octets,
                            rate_bps: link.rate_bps,
                            air_ns: link.data_air_ns,
                            purpose: Purpose::CollisionBurst,
                        };
                        self.push_frame(self.now, record);
                    }
                    let st = &mut self.stations[si];
                    st.edca.on_tx_failure(g.ac, &mut st.rng);
                }
                self.busy_until = self.now + longest + self.sc.sifs_ns;
            }
        }
    }

    // ---- reception ----

    fn on_rx_end(&mut self, frame: usize) {
        match self.frames[frame].purpose.clone() {
            Purpose::Beacon { cdown } => {
                self.trace_frame("frame_rx_end", frame, format!("cdown={cdown}"));
            }
            Purpose::Ssw { collided } => {
                let info = if collided { "collision" } else { "ok" };
                self.trace_frame("frame_rx_end", frame, info.into());
            }
            Purpose::SswFeedback { station, rescue } => {
                self.stations[station].trained = true;
                let info = if rescue { "rescue" } else { "trained" };
                self.trace_frame("frame_rx_end", frame, info.into());
            }
            Purpose::CollisionBurst => {
                self.trace_frame("frame_rx_end", frame, "collision".into());
            }
            Purpose::Data {
                flow,
                seqs,
                cycle_start,
                cycle_ns,
                origin,
            } => self.on_data_rx(frame, flow, seqs, cycle_start, cycle_ns, origin),
            Purpose::Ack {
                flow,
                results,
                cycle_ns,
                origin,
            } => self.on_ack_rx(frame, flow, results, cycle_ns, origin),
            Purpose::FstSetupRequest => self.on_fst_setup_request(frame),
            Purpose::FstSetupResponse => self.on_fst_setup_response(frame),
            Purpose::FstAck => self.on_fst_ack(frame),
        }
    }

    fn on_data_rx(
        &mut self,
        frame: usize,
        flow: usize,
        seqs: Vec<u64>,
        cycle_start: u64,
        cycle_ns: u64,
        origin: Origin,
    ) {
        let (src, dst, band, mcs_index) = {
            let r = &self.frames[frame];
            (r.src, r.dst, r.band, r.mcs)
        };
        let ppdu_ok = match band {
            BandLabel::Legacy => {
                self.fst.as_ref().map_or(false, |r| {
                    r.bands[0]
                        .rate_at(self.pair_distance_m(src, dst))
                        .is_some()
                })
            }
            _ => self.decodes(src, dst, mcs_index),
        };
        if !self.dst_awake(dst) {
            self.fail_cycle(frame, flow, seqs, cycle_start, cycle_ns, "asleep");
            return;
        }
        if !ppdu_ok {
            self.fail_cycle(frame, flow, seqs, cycle_start, cycle_ns, "below-threshold");
            return;
        }
        // the burst decoded; individual payloads may still be clipped
        let loss_p = self.flows[flow].decl.loss_p;
        let mut results = Vec::with_capacity(seqs.len());
        let mut hits = 0;
        for &s in &seqs {
            let hit = loss_p == 0.0 || self.flows[flow].rng.gen::<f64>() >= loss_p;
            if hit {
                hits += 1;
            }
            results.push((s, hit));
        }
        let aggregated = self.flows[flow].decl.ampdu_subframes > 0;
        if !aggregated && hits == 0 {
            self.fail_cycle(frame, flow, seqs, cycle_start, cycle_ns, "lost");
            return;
        }
        self.trace_frame(
            "frame_rx_end",
            frame,
            format!("ok hits={hits}/{}", seqs.len()),
        );
        // answer after one gap: plain ack, or the bitmap for a burst
        let (ack_octets, ack_air, band_now, rate) = {
            let link = self.cycle_link(flow);
            (link.ack_octets, link.ack_air_ns, link.band, link.rate_bps)
        };
        let record = FrameRecord {
            src: dst,
            dst: src,
            ac: self.frames[frame].ac,
            band: band_now,
            mcs: 0,
            octets: ack_octets,
            rate_bps: if band_now == BandLabel::Legacy {
                rate
            } else {
                self.control_rate_bps
            },
            air_ns: ack_air,
            purpose: Purpose::Ack {
                flow,
                results,
                cycle_ns,
                origin,
            },
        };
        self.push_frame(self.now + self.sc.sifs_ns, record);
    }

    /// A cycle that produced no acknowledgment: requeue every payload,
    /// account the full cycle, and let the owner continue.
    fn fail_cycle(
        &mut self,
        frame: usize,
        flow: usize,
        seqs: Vec<u64>,
        cycle_start: u64,
        cycle_ns: u64,
        info: &str,
    ) {
        self.trace_frame("frame_rx_end", frame, info.into());
        let f = &mut self.flows[flow];
        f.stats.lost_frames += seqs.len() as u64;
        for s in seqs {
            f.retry.push_back(s);
        }
        self.push_timer(cycle_start + cycle_ns, TimerAction::CycleTimeout { frame });
    }

    fn on_cycle_timeout(&mut self, frame: usize) {
        let Purpose::Data {
            flow,
            cycle_ns,
            origin,
            ..
        } = self.frames[frame].purpose.clone()
        else {
            return;
        };
        let f = &mut self.flows[flow];
        f.stats.cycles += 1;
        f.stats.busy_ns += cycle_ns;
        match origin {
            Origin::Sp { alloc } => self.start_sp_cycle(alloc),
            Origin::Cbap => {
                let si = self.flows[flow].decl.src;
                let ac = self.flows[flow].decl.ac;
                let st = &mut self.stations[si];
                st.edca.on_tx_failure(ac, &mut st.rng);
            }
        }
    }

    fn on_ack_rx(
        &mut self,
        frame: usize,
        flow: usize,
        results: Vec<(u64, bool)>,
        cycle_ns: u64,
        origin: Origin,
    ) {
        self.trace_frame("frame_rx_end", frame, "ok".into());
        let src = self.flows[flow].decl.src as u16;
        let ac = self.flows[flow].decl.ac.index();
        let msdu = u64::from(self.flows[flow].decl.msdu_octets);
        let mut delivered_any = false;
        for (s, hit) in results {
            if hit {
                let offered_at = self.flows[flow].offered_at.remove(&s);
                let delay = offered_at.map_or(0, |t| self.now.saturating_sub(t));
                self.metrics.deliver(src, ac, msdu, delay);
                let f = &mut self.flows[flow];
                f.stats.delivered_frames += 1;
                f.stats.delivered_octets += msdu;
                delivered_any = true;
            } else {
                let f = &mut self.flows[flow];
                f.stats.lost_frames += 1;
                f.retry.push_back(s);
            }
        }
        let f = &mut self.flows[flow];
        f.stats.cycles += 1;
        f.stats.busy_ns += cycle_ns;
        match origin {
            Origin::Sp { alloc } => {
                let next = self.now + self.sc.sifs_ns;
                self.push_timer(next, TimerAction::SpNext { alloc });
            }
            Origin::Cbap => {
                let si = self.flows[flow].decl.src;
                let ac_cat = self.flows[flow].decl.ac;
                let now = self.now;
                if delivered_any {
                    let st = &mut self.stations[si];
                    st.ready_ns[ac_cat.index()].pop_front();
                    st.edca.on_tx_success(ac_cat, &mut st.rng);
                    // saturated source: immediately refill
                    st.edca.enqueue(ac_cat, 1, &mut st.rng);
                    st.ready_ns[ac_cat.index()].push_back(now);
                } else {
                    let st = &mut self.stations[si];
                    st.edca.on_tx_failure(ac_cat, &mut st.rng);
                }
            }
        }
    }

    // ---- mobility and band transfer ----

    fn on_mobility(&mut self) {
        for i in 0..self.stations.len() {
            let Some(m) = self.stations[i].mobility else {
                continue;
            };
            let st = &mut self.stations[i];
            let step = m.speed_mps * (MOBILITY_STEP_NS as f64 / 1e9);
            let d = st.distance_m;
            let next = if d > m.to_m {
                (d - step).max(m.to_m)
            } else {
                (d + step).min(m.to_m)
            };
            if next != d {
                st.distance_m = next;
                let mm = (next * 1000.0).round() as u64;
                self.trace.push(TraceRow {
                    time_ns: self.now,
                    kind: "mobility_update".into(),
                    src: i as u16,
                    dst: NO_STATION,
                    ac: "-".into(),
                    band: "-".into(),
                    mcs: 0,
                    octets: 0,
                    rate_bps: 0,
                    info: format!("d_mm={mm}"),
                });
            }
        }
        self.fst_consider();
    }

    /// Initiates a transfer when the walker comes into reach of the faster
    /// band (and re-initiates after a rollback).
    fn fst_consider(&mut self) {
        let Some(r) = &self.fst else { return };
        if r.session.state() != FstState::Idle {
            return;
        }
        let d = self.stations[r.station].distance_m;
        let Some((band_idx, _)) = band_select(&r.bands, d) else {
            return;
        };
        if band_idx != 1 {
            return;
        }
        let (station, peer) = (r.station, r.peer);
        let legacy_rate = r.bands[0]
            .rate_at(self.pair_distance_m(station as u16, peer as u16))
            .unwrap_or(0.0) as u64;
        if legacy_rate == 0 {
            return;
        }
        self.fst
            .as_mut()
            .expect("checked")
            .session
            .send_setup_request()
            .expect("idle");
        let record = FrameRecord {
            src: station as u16,
            dst: peer as u16,
            ac: 4,
            band: BandLabel::Legacy,
            mcs: 0,
            octets: FST_FRAME_OCTETS as u32,
            rate_bps: legacy_rate,
            air_ns: legacy_air_ns(FST_FRAME_OCTETS as u32, legacy_rate),
            purpose: Purpose::FstSetupRequest,
        };
        self.push_frame(self.now, record);
    }

    fn on_fst_setup_request(&mut self, frame: usize) {
        self.trace_frame("frame_rx_end", frame, "setup".into());
        let (src, dst, rate, air) = {
            let r = &self.frames[frame];
            (r.src, r.dst, r.rate_bps, r.air_ns)
        };
        let record = FrameRecord {
            src: dst,
            dst: src,
            ac: 4,
            band: BandLabel::Legacy,
            mcs: 0,
            octets: FST_FRAME_OCTETS as u32,
            rate_bps: rate,
            air_ns: air,
            purpose: Purpose::FstSetupResponse,
        };
        self.push_frame(self.now + self.sc.sifs_ns, record);
    }

    fn on_fst_setup_response(&mut self, frame: usize) {
        self.trace_frame("frame_rx_end", frame, "accept".into());
        if let Some(r) = &mut self.fst {
            r.session.setup_response(true).expect("pending");
        }
    }

    fn fst_tick_bi(&mut self) {
        let Some(r) = &mut self.fst else { return };
        if r.session.state() != FstState::SwitchPending {
            return;
        }
        let state = r.session.tick_bi(false).expect("pending switch");
        if state == FstState::Transitioned {
            self.fst_send_ack();
        }
    }

    /// The confirmation handshake on the new band.
    fn fst_send_ack(&mut self) {
        let Some(r) = &self.fst else { return };
        let (station, peer) = (r.station, r.peer);
        let control = mcs(0).expect("control row exists");
        let air = ppdu_duration_ns(control, FST_FRAME_OCTETS, 0, &self.phy).expect("fits");
        let record = FrameRecord {
            src: station as u16,
            dst: peer as u16,
            ac: 4,
            band: BandLabel::Sixty,
            mcs: 0,
            octets: FST_FRAME_OCTETS as u32,
            rate_bps: self.control_rate_bps,
            air_ns: air,
            purpose: Purpose::FstAck,
        };
        self.push_frame(self.now + self.sc.sifs_ns, record);
    }

    fn on_fst_ack(&mut self, frame: usize) {
        let station;
        let outcome;
        {
            let Some(r) = &mut self.fst else { return };
            station = r.station;
            let received = if r.remaining_ack_losses > 0 {
                r.remaining_ack_losses -= 1;
                false
            } else {
                true
            };
            outcome = r.session.ack_attempt(received).expect("transitioned");
        }
        match outcome {
            FstEvent::Confirmed => {
                self.trace_frame("frame_rx_end", frame, "confirmed".into());
                self.metrics.fst_transition(station as u16);
            }
            FstEvent::Retry => {
                self.trace_frame("frame_rx_end", frame, "ack-lost".into());
                let at = self.now + self.sc.slot_ns;
                self.push_timer(at, TimerAction::FstResend);
            }
            FstEvent::RolledBack => {
                self.trace_frame("frame_rx_end", frame, "rolled-back".into());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::metrics::trace_to_csv;
    use crate::sim::scenario::parse_scenario;
    use crate::tput::{throughput_normal_ack, ExchangeTiming};

    const SP_LINK: &str = "\
general.seed = 11
general.duration_ns = 30000000
general.bi_ns = 10000000
station.0.role = pcp
station.0.distance_m = 0
station.1.role = sta
station.1.distance_m = 2.5
alloc.0.kind = sp
alloc.0.src = 0
alloc.0.dst = 1
alloc.0.start_ns = 0
alloc.0.duration_ns = 8000000
flow.0.src = 0
flow.0.dst = 1
flow.0.mcs = 12
flow.0.msdu_octets = 4096
flow.0.alloc = 0
";

    #[test]
    fn beacons_only_sweep_covers_every_sector_each_interval() {
        let text = "\
general.seed = 1
general.duration_ns = 20000000
general.bi_ns = 10000000
pcp.sectors = 4
station.0.role = pcp
station.0.distance_m = 0
";
        let sc = parse_scenario(text).unwrap();
        let out = run(&sc).unwrap();
        let beacons: Vec<_> = out
            .trace
            .iter()
            .filter(|r| r.kind == "frame_tx_start" && r.octets == BEACON_OCTETS as u32)
            .collect();
        assert_eq!(beacons.len(), 8, "4 sectors in each of 2 intervals");
        let first_bi: Vec<_> = beacons
            .iter()
            .filter(|r| r.time_ns < 10_000_000)
            .collect();
        assert_eq!(first_bi.len(), 4);
    }

    #[test]
    fn equal_seeds_produce_byte_identical_traces() {
        let sc = parse_scenario(SP_LINK).unwrap();
        let a = run(&sc).unwrap();
        let b = run(&sc).unwrap();
        assert_eq!(trace_to_csv(&a.trace), trace_to_csv(&b.trace));
        let mut sc2 = sc.clone();
        sc2.seed = 12;
        let c = run(&sc2).unwrap();
        // different seed still runs; the contention-free chain is identical
        assert_eq!(a.flow_stats, c.flow_stats);
    }

    #[test]
    fn trace_times_never_decrease() {
        let sc = parse_scenario(SP_LINK).unwrap();
        let out = run(&sc).unwrap();
        for w in out.trace.windows(2) {
            assert!(w[0].time_ns <= w[1].time_ns);
        }
    }

    #[test]
    fn contention_free_chain_matches_the_analytic_model() {
        let sc = parse_scenario(SP_LINK).unwrap();
        let out = run(&sc).unwrap();
        let s = out.flow_stats[0];
        assert!(s.cycles > 100, "chain ran: {s:?}");
        assert_eq!(s.delivered_frames, s.cycles, "loss-free");
        assert_eq!(s.lost_frames, 0);
        let sim_bps = s.delivered_octets as f64 * 8.0 * 1e9 / s.busy_ns as f64;
        let analytic = throughput_normal_ack(mcs(12).unwrap(), 4096, &ExchangeTiming::default())
            .unwrap();
        let rel = (sim_bps - analytic).abs() / analytic;
        assert!(rel < 1e-9, "sim {sim_bps} vs analytic {analytic}");
        assert!(out.metrics.conservation_holds());
    }

    #[test]
    fn dropped_frames_are_retransmitted_not_lost() {
        let text = SP_LINK.replace(
            "flow.0.alloc = 0",
            "flow.0.alloc = 0\nflow.0.loss_p = 0.3",
        );
        let sc = parse_scenario(&text).unwrap();
        let out = run(&sc).unwrap();
        let s = out.flow_stats[0];
        assert!(s.lost_frames > 0, "losses were injected");
        assert!(s.delivered_frames > 0);
        // transmit-side accounting: everything offered is eventually
        // delivered or still queued, nothing is dropped
        let rows = out.metrics.rows(sc.duration_ns);
        let be = rows.iter().find(|r| r.station == 0 && r.ac == "be").unwrap();
        assert_eq!(be.dropped, 0);
        assert_eq!(be.offered, be.delivered + be.in_flight);
    }

    #[test]
    fn contention_period_produces_ordered_grants() {
        let text = "\
general.seed = 5
general.duration_ns = 40000000
general.bi_ns = 10000000
station.0.role = pcp
station.0.distance_m = 0
station.1.role = sta
station.1.distance_m = 2
alloc.0.kind = cbap
alloc.0.src = 1
alloc.0.dst = 0
alloc.0.start_ns = 0
alloc.0.duration_ns = 8000000
flow.0.src = 1
flow.0.dst = 0
flow.0.ac = vo
flow.0.mcs = 12
flow.0.msdu_octets = 512
flow.0.alloc = 0
flow.1.src = 1
flow.1.dst = 0
flow.1.ac = be
flow.1.mcs = 12
flow.1.msdu_octets = 512
flow.1.alloc = 0
edca.be.cw_min = 7
edca.be.cw_max = 15
edca.be.aifs_slots = 1
edca.vi.aifs_slots = 1
";
        // Stock gaps starve a lower queue outright here: with voice refilling
        // instantly, best effort's only countdown slots coincide with the
        // slots voice fires in, so it can never reach zero uncontested. The
        // overrides narrow the gap difference; priority then comes from the
        // window sizes alone and both queues make progress.
        let sc = parse_scenario(text).unwrap();
        let out = run(&sc).unwrap();
        let vo = out.metrics.delivered(1, 3);
        let be = out.metrics.delivered(1, 1);
        assert!(vo > 0 && be > 0, "both queues delivered: vo={vo} be={be}");
        assert!(vo > be, "priority favors voice: vo={vo} be={be}");
        assert!(out.metrics.conservation_holds());
    }

    #[test]
    fn contention_rejects_inverted_gap_ordering() {
        let text = "\
general.seed = 1
station.0.role = pcp
station.0.distance_m = 0
station.1.role = sta
station.1.distance_m = 2
alloc.0.kind = cbap
alloc.0.src = 1
alloc.0.dst = 0
alloc.0.start_ns = 0
alloc.0.duration_ns = 1000000
flow.0.src = 1
flow.0.dst = 0
flow.0.ac = vo
flow.0.mcs = 12
flow.0.msdu_octets = 512
flow.0.alloc = 0
edca.vo.aifs_slots = 9
";
        let sc = parse_scenario(text).unwrap();
        let errors = super::super::scenario::validate(&sc);
        assert!(
            errors.iter().any(|e| e.starts_with("edca:")),
            "gap inversion should be rejected: {errors:?}"
        );
    }

    #[test]
    fn power_save_station_only_receives_in_awake_intervals() {
        let text = "\
general.seed = 9
general.duration_ns = 40000000
general.bi_ns = 10000000
station.0.role = pcp
station.0.distance_m = 0
station.1.role = sta
station.1.distance_m = 2
alloc.0.kind = sp
alloc.0.src = 0
alloc.0.dst = 1
alloc.0.start_ns = 0
alloc.0.duration_ns = 5000000
flow.0.src = 0
flow.0.dst = 1
flow.0.mcs = 12
flow.0.msdu_octets = 4096
flow.0.alloc = 0
power.1.period_bis = 2
power.1.offset_bi = 0
power.1.awake_window_ns = 10000000
";
        let sc = parse_scenario(text).unwrap();
        let out = run(&sc).unwrap();
        let rows = out.metrics.rows(sc.duration_ns);
        let all1 = rows.iter().find(|r| r.station == 1 && r.ac == "all").unwrap();
        assert_eq!(all1.awake_ppm, 500_000, "awake every other interval");
        // deliveries only happen in awake intervals
        for r in &out.trace {
            if r.kind == "frame_rx_end" && r.dst == 1 && r.info.starts_with("ok") {
                let bi = r.time_ns / 10_000_000;
                assert_eq!(bi % 2, 0, "delivery at {} in dozing interval", r.time_ns);
            }
        }
        let delivered = out.metrics.delivered(0, 1);
        assert!(delivered > 0);
    }

    #[test]
    fn band_transfer_switches_rates_without_stream_loss() {
        let text = "\
general.seed = 3
general.duration_ns = 1000000000
general.bi_ns = 10000000
station.0.role = pcp
station.0.distance_m = 0
station.1.role = sta
station.1.distance_m = 40
mobility.1.to_m = 2.5
mobility.1.speed_mps = 50
alloc.0.kind = sp
alloc.0.src = 0
alloc.0.dst = 1
alloc.0.start_ns = 0
alloc.0.duration_ns = 8000000
flow.0.src = 0
flow.0.dst = 1
flow.0.mcs = 12
flow.0.msdu_octets = 4096
flow.0.alloc = 0
fst.station = 1
fst.llt_bis = 0
fst.ack_losses = 1
";
        let sc = parse_scenario(text).unwrap();
        let out = run(&sc).unwrap();
        let legacy_data: Vec<_> = out
            .trace
            .iter()
            .filter(|r| r.kind == "frame_tx_start" && r.band == "2.4ghz" && r.octets > 1000)
            .collect();
        let fast_data: Vec<_> = out
            .trace
            .iter()
            .filter(|r| r.kind == "frame_tx_start" && r.band == "60ghz" && r.octets > 1000)
            .collect();
        assert!(!legacy_data.is_empty(), "stream started on the legacy band");
        assert!(!fast_data.is_empty(), "stream finished on the fast band");
        assert_eq!(legacy_data[0].rate_bps, 144_400_000);
        assert_eq!(fast_data[0].rate_bps, 4_620_000_000);
        assert!(
            legacy_data.last().unwrap().time_ns < fast_data[0].time_ns,
            "switch happens once, forward"
        );
        assert!(out.trace.iter().any(|r| r.info == "ack-lost"));
        assert!(out.trace.iter().any(|r| r.info == "confirmed"));
        let rows = out.metrics.rows(sc.duration_ns);
        let all0 = rows.iter().find(|r| r.station == 0 && r.ac == "all").unwrap();
        assert_eq!(all0.dropped, 0, "no stream loss across the transfer");
        let all1 = rows.iter().find(|r| r.station == 1 && r.ac == "all").unwrap();
        assert_eq!(all1.fst_transitions, 1);
        assert!(out.flow_stats[0].lost_frames == 0);
    }

    #[test]
    fn preflight_catches_oversized_allocations() {
        let text = SP_LINK.replace(
            "alloc.0.duration_ns = 8000000",
            "alloc.0.duration_ns = 9999999",
        );
        let sc = parse_scenario(&text).unwrap();
        let errors = preflight(&sc);
        assert!(
            errors.iter().any(|e| e.contains("data transfer interval")),
            "{errors:?}"
        );
        assert!(matches!(run(&sc), Err(SimError::Invalid(_))));
    }

    #[test]
    fn sub_seed_is_a_stable_mix() {
        assert_ne!(sub_seed(1, 1), sub_seed(1, 2));
        assert_ne!(sub_seed(1, 1), sub_seed(2, 1));
        assert_eq!(sub_seed(42, 7), sub_seed(42, 7));
    }
}
