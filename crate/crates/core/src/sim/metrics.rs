//! Run products: the event trace and the per-station counters.
//!
//! Both files are plain CSV with a fixed column set and integer-only values,
//! so two runs with equal seeds serialize to byte-identical files and every
//! file re-parses to exactly the rows that were written. Free-text `info`
//! fields never contain commas.

use super::SimError;
use std::collections::BTreeMap;

pub const TRACE_HEADER: &str = "time_ns,kind,src,dst,ac,band,mcs,octets,rate_bps,info";
pub const METRICS_HEADER: &str = "station,ac,offered,delivered,dropped,in_flight,\
delivered_octets,throughput_bps,delay_p50_ns,delay_p95_ns,bf_frames,awake_ppm,fst_transitions";

/// Station column value meaning "nobody" (broadcast, or not applicable).
pub const NO_STATION: u16 = u16::MAX;

/// One trace line. `ac` and `band` use fixed lowercase labels, `-` when the
/// column does not apply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub time_ns: u64,
    pub kind: String,
    pub src: u16,
    pub dst: u16,
    pub ac: String,
    pub band: String,
    pub mcs: u8,
    pub octets: u32,
    pub rate_bps: u64,
    pub info: String,
}

impl TraceRow {
    fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.time_ns,
            self.kind,
            self.src,
            self.dst,
            self.ac,
            self.band,
            self.mcs,
            self.octets,
            self.rate_bps,
            self.info
        )
    }

    fn parse(line: &str, line_no: usize) -> Result<TraceRow, SimError> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(SimError::Parse(format!(
                "trace line {line_no}: expected 10 fields, got {}",
                fields.len()
            )));
        }
        let num = |s: &str, what: &str| -> Result<u64, SimError> {
            s.parse()
                .map_err(|e| SimError::Parse(format!("trace line {line_no}: {what}: {e}")))
        };
        Ok(TraceRow {
            time_ns: num(fields[0], "time_ns")?,
            kind: fields[1].to_string(),
            src: num(fields[2], "src")? as u16,
            dst: num(fields[3], "dst")? as u16,
            ac: fields[4].to_string(),
            band: fields[5].to_string(),
            mcs: num(fields[6], "mcs")? as u8,
            octets: num(fields[7], "octets")? as u32,
            rate_bps: num(fields[8], "rate_bps")?,
            info: fields[9].to_string(),
        })
    }
}

pub fn trace_to_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 48 + TRACE_HEADER.len() + 1);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>, SimError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRACE_HEADER => {}
        other => {
            return Err(SimError::Parse(format!(
                "trace header mismatch: {other:?}"
            )))
        }
    }
    lines
        .enumerate()
        .map(|(i, l)| TraceRow::parse(l, i + 2))
        .collect()
}

/// One counters line. Station-wide values (beamforming frames, awake share,
/// band transfers) appear on the `all` row; the four per-category rows carry
/// only traffic counters so column sums stay meaningful.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsRow {
    pub station: u16,
    pub ac: String,
    pub offered: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub in_flight: u64,
    pub delivered_octets: u64,
    pub throughput_bps: u64,
    pub delay_p50_ns: u64,
    pub delay_p95_ns: u64,
    pub bf_frames: u64,
    pub awake_ppm: u64,
    pub fst_transitions: u64,
}

impl MetricsRow {
    fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.station,
            self.ac,
            self.offered,
            self.delivered,
            self.dropped,
            self.in_flight,
            self.delivered_octets,
            self.throughput_bps,
            self.delay_p50_ns,
            self.delay_p95_ns,
            self.bf_frames,
            self.awake_ppm,
            self.fst_transitions
        )
    }

    fn parse(line: &str, line_no: usize) -> Result<MetricsRow, SimError> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(SimError::Parse(format!(
                "metrics line {line_no}: expected 13 fields, got {}",
                fields.len()
            )));
        }
        let num = |s: &str, what: &str| -> Result<u64, SimError> {
            s.parse()
                .map_err(|e| SimError::Parse(format!("metrics line {line_no}: {what}: {e}")))
        };
        Ok(MetricsRow {
            station: num(fields[0], "station")? as u16,
            ac: fields[1].to_string(),
            offered: num(fields[2], "offered")?,
            delivered: num(fields[3], "delivered")?,
            dropped: num(fields[4], "dropped")?,
            in_flight: num(fields[5], "in_flight")?,
            delivered_octets: num(fields[6], "delivered_octets")?,
            throughput_bps: num(fields[7], "throughput_bps")?,
            delay_p50_ns: num(fields[8], "delay_p50_ns")?,
            delay_p95_ns: num(fields[9], "delay_p95_ns")?,
            bf_frames: num(fields[10], "bf_frames")?,
            awake_ppm: num(fields[11], "awake_ppm")?,
            fst_transitions: num(fields[12], "fst_transitions")?,
        })
    }
}

pub fn metrics_to_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 40 + METRICS_HEADER.len() + 1);
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricsRow>, SimError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == METRICS_HEADER => {}
        other => {
            return Err(SimError::Parse(format!(
                "metrics header mismatch: {other:?}"
            )))
        }
    }
    lines
        .enumerate()
        .map(|(i, l)| MetricsRow::parse(l, i + 2))
        .collect()
}

pub const AC_LABELS: [&str; 4] = ["bk", "be", "vi", "vo"];

#[derive(Debug, Default, Clone)]
struct AcCounters {
    offered: u64,
    delivered: u64,
    dropped: u64,
    delivered_octets: u64,
    delays_ns: Vec<u64>,
}

#[derive(Debug, Default, Clone)]
struct StationCounters {
    acs: [AcCounters; 4],
    bf_frames: u64,
    awake_ns: u64,
    fst_transitions: u64,
}

/// Accumulates counters during a run; `rows` freezes them into the CSV form.
#[derive(Debug, Default, Clone)]
pub struct MetricsCollector {
    stations: BTreeMap<u16, StationCounters>,
}

/// Nearest-rank percentile of an already sorted slice; 0 when empty.
fn percentile_ns(sorted: &[u64], p: u64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let n = sorted.len() as u64;
    let rank = ((n * p).div_ceil(100)).max(1);
    sorted[(rank - 1) as usize]
}

impl MetricsCollector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Makes a station appear in the output even if it never moves traffic.
    pub fn register_station(&mut self, station: u16) {
        self.stations.entry(station).or_default();
    }

    pub fn offer(&mut self, station: u16, ac: usize, frames: u64) {
        self.stations.entry(station).or_default().acs[ac].offered += frames;
    }

    pub fn deliver(&mut self, station: u16, ac: usize, octets: u64, delay_ns: u64) {
        let c = &mut self.stations.entry(station).or_default().acs[ac];
        c.delivered += 1;
        c.delivered_octets += octets;
        c.delays_ns.push(delay_ns);
    }

    pub fn drop_frame(&mut self, station: u16, ac: usize) {
        self.stations.entry(station).or_default().acs[ac].dropped += 1;
    }

    pub fn bf_frames(&mut self, station: u16, count: u64) {
        self.stations.entry(station).or_default().bf_frames += count;
    }

    pub fn awake(&mut self, station: u16, ns: u64) {
        self.stations.entry(station).or_default().awake_ns += ns;
    }

    pub fn fst_transition(&mut self, station: u16) {
        self.stations.entry(station).or_default().fst_transitions += 1;
    }

    pub fn delivered(&self, station: u16, ac: usize) -> u64 {
        self.stations
            .get(&station)
            .map_or(0, |s| s.acs[ac].delivered)
    }

    /// Recorded delivery delays of one queue, sorted. Empty when idle.
    pub fn delays_ns(&self, station: u16, ac: usize) -> Vec<u64> {
        let mut d = self
            .stations
            .get(&station)
            .map_or_else(Vec::new, |s| s.acs[ac].delays_ns.clone());
        d.sort_unstable();
        d
    }

    /// Every queue satisfies offered >= delivered + dropped.
    pub fn conservation_holds(&self) -> bool {
        self.stations.values().all(|s| {
            s.acs
                .iter()
                .all(|c| c.offered >= c.delivered + c.dropped)
        })
    }

    /// Freezes the counters: four per-category rows plus an `all` row per
    /// station, stations in ascending order.
    pub fn rows(&self, duration_ns: u64) -> Vec<MetricsRow> {
        let tput = |octets: u64| -> u64 {
            if duration_ns == 0 {
                0
            } else {
                (octets as u128 * 8 * 1_000_000_000 / duration_ns as u128) as u64
            }
        };
        let mut rows = Vec::new();
        for (&station, c) in &self.stations {
            let mut all = AcCounters::default();
            for (i, ac) in c.acs.iter().enumerate() {
                let mut delays = ac.delays_ns.clone();
                delays.sort_unstable();
                rows.push(MetricsRow {
                    station,
                    ac: AC_LABELS[i].to_string(),
                    offered: ac.offered,
                    delivered: ac.delivered,
                    dropped: ac.dropped,
                    in_flight: ac.offered - ac.delivered - ac.dropped,
                    delivered_octets: ac.delivered_octets,
                    throughput_bps: tput(ac.delivered_octets),
                    delay_p50_ns: percentile_ns(&delays, 50),
                    delay_p95_ns: percentile_ns(&delays, 95),
                    bf_frames: 0,
                    awake_ppm: 0,
                    fst_transitions: 0,
                });
                all.offered += ac.offered;
                all.delivered += ac.delivered;
                all.dropped += ac.dropped;
                all.delivered_octets += ac.delivered_octets;
                all.delays_ns.extend_from_slice(&ac.delays_ns);
            }
            all.delays_ns.sort_unstable();
            let awake_ppm = if duration_ns == 0 {
                0
            } else {
                (c.awake_ns as u128 * 1_000_000 / duration_ns as u128) as u64
            };
            rows.push(MetricsRow {
                station,
                ac: "all".to_string(),
                offered: all.offered,
                delivered: all.delivered,
                dropped: all.dropped,
                in_flight: all.offered - all.delivered - all.dropped,
                delivered_octets: all.delivered_octets,
                throughput_bps: tput(all.delivered_octets),
                delay_p50_ns: percentile_ns(&all.delays_ns, 50),
                delay_p95_ns: percentile_ns(&all.delays_ns, 95),
                bf_frames: c.bf_frames,
                awake_ppm,
                fst_transitions: c.fst_transitions,
            });
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_trace() -> Vec<TraceRow> {
        vec![
            TraceRow {
                time_ns: 0,
                kind: "bi_boundary".into(),
                src: NO_STATION,
                dst: NO_STATION,
                ac: "-".into(),
                band: "-".into(),
                mcs: 0,
                octets: 0,
                rate_bps: 0,
                info: "bi=0".into(),
            },
            TraceRow {
                time_ns: 4218,
                kind: "frame_rx_end".into(),
                src: 0,
                dst: 1,
                ac: "be".into(),
                band: "60ghz".into(),
                mcs: 12,
                octets: 4126,
                rate_bps: 4_620_000_000,
                info: "ok".into(),
            },
        ]
    }

    #[test]
    fn trace_round_trips_exactly() {
        let rows = sample_trace();
        let text = trace_to_csv(&rows);
        assert_eq!(parse_trace_csv(&text).unwrap(), rows);
        assert_eq!(trace_to_csv(&parse_trace_csv(&text).unwrap()), text);
    }

    #[test]
    fn trace_rejects_malformed_input() {
        assert!(parse_trace_csv("wrong,header\n").is_err());
        let bad = format!("{TRACE_HEADER}\n1,frame_tx_start,0\n");
        assert!(parse_trace_csv(&bad).is_err());
    }

    #[test]
    fn metrics_round_trip_and_conservation() {
        let mut m = MetricsCollector::new();
        m.register_station(0);
        m.offer(1, 3, 10);
        for i in 0..7 {
            m.deliver(1, 3, 1500, 1000 * (i + 1));
        }
        m.drop_frame(1, 3);
        m.bf_frames(1, 4);
        m.awake(1, 500_000);
        assert!(m.conservation_holds());

        let rows = m.rows(1_000_000);
        let text = metrics_to_csv(&rows);
        assert_eq!(parse_metrics_csv(&text).unwrap(), rows);

        let vo = rows
            .iter()
            .find(|r| r.station == 1 && r.ac == "vo")
            .unwrap();
        assert_eq!(vo.offered, 10);
        assert_eq!(vo.delivered, 7);
        assert_eq!(vo.dropped, 1);
        assert_eq!(vo.in_flight, 2);
        assert_eq!(vo.delivered_octets, 7 * 1500);
        assert_eq!(vo.throughput_bps, 7 * 1500 * 8 * 1000); // over 1 ms
        assert_eq!(vo.delay_p50_ns, 4000);
        assert_eq!(vo.delay_p95_ns, 7000);

        let all = rows
            .iter()
            .find(|r| r.station == 1 && r.ac == "all")
            .unwrap();
        assert_eq!(all.bf_frames, 4);
        assert_eq!(all.awake_ppm, 500_000);

        // the idle registered station still appears
        assert!(rows.iter().any(|r| r.station == 0 && r.ac == "all"));
    }

    #[test]
    fn percentiles_use_nearest_rank() {
        assert_eq!(percentile_ns(&[], 50), 0);
        assert_eq!(percentile_ns(&[5], 50), 5);
        assert_eq!(percentile_ns(&[1, 2, 3, 4], 50), 2);
        assert_eq!(percentile_ns(&[1, 2, 3, 4], 95), 4);
        assert_eq!(percentile_ns(&[1, 2, 3], 50), 2);
    }
}
