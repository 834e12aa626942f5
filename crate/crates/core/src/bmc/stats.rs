use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::TimeMetric;

/// Solver effort spent on one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameStat {
    pub frame: u32,
    pub conflicts: u64,
    /// Propagations.
    pub work: u64,
    pub solve_time: f64,
    /// Seconds since the start of the run at the end of this frame.
    pub cumulative_time: f64,
    /// Propagations since the start of the run at the end of this frame.
    pub cumulative_work: u64,
}

impl FrameStat {
    pub fn new(frame: u32) -> FrameStat {
        FrameStat {
            frame,
            conflicts: 0,
            work: 0,
            solve_time: 0.0,
            cumulative_time: 0.0,
            cumulative_work: 0,
        }
    }

    pub(super) fn absorb(&mut self, call: &FrameStat) {
        self.conflicts += call.conflicts;
        self.work += call.work;
        self.solve_time += call.solve_time;
        self.cumulative_time = self.cumulative_time.max(call.cumulative_time);
        self.cumulative_work = self.cumulative_work.max(call.cumulative_work);
    }

    pub fn solve_cost(&self, metric: TimeMetric) -> f64 {
        match metric {
            TimeMetric::Wall => self.solve_time,
            TimeMetric::Work => self.work as f64,
        }
    }

    pub fn cumulative_cost(&self, metric: TimeMetric) -> f64 {
        match metric {
            TimeMetric::Wall => self.cumulative_time,
            TimeMetric::Work => self.cumulative_work as f64,
        }
    }
}

/// What a per-frame CSV plots on its y axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameMetric {
    Conflicts,
    SolveTime(TimeMetric),
    CumulativeTime(TimeMetric),
}

impl FrameMetric {
    pub fn file_stem(self) -> &'static str {
        match self {
            FrameMetric::Conflicts => "conflicts",
            FrameMetric::SolveTime(_) => "solve_time",
            FrameMetric::CumulativeTime(_) => "cumulative_time",
        }
    }
}

fn fmt_value(v: f64) -> String {
    format!("{v}")
}

/// Renders `x,y` rows (frame, value).
pub fn frame_csv(stats: &[FrameStat], metric: FrameMetric) -> String {
    let mut out = String::from("x,y\n");
    for s in stats {
        let y = match metric {
            FrameMetric::Conflicts => s.conflicts.to_string(),
            FrameMetric::SolveTime(m) => fmt_value(s.solve_cost(m)),
            FrameMetric::CumulativeTime(m) => fmt_value(s.cumulative_cost(m)),
        };
        let _ = writeln!(out, "{},{}", s.frame, y);
    }
    out
}

/// Sums statistics of several runs frame by frame. Cumulative fields become
/// the running total of the summed per-frame costs.
pub fn merge_frames<'a>(runs: impl IntoIterator<Item = &'a [FrameStat]>) -> Vec<FrameStat> {
    let mut merged: Vec<FrameStat> = Vec::new();
    for run in runs {
        for s in run {
            let k = s.frame as usize;
            while merged.len() <= k {
                merged.push(FrameStat::new(merged.len() as u32));
            }
            merged[k].conflicts += s.conflicts;
            merged[k].work += s.work;
            merged[k].solve_time += s.solve_time;
        }
    }
    let mut time = 0.0;
    let mut work = 0;
    for s in &mut merged {
        time += s.solve_time;
        work += s.work;
        s.cumulative_time = time;
        s.cumulative_work = work;
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut a = FrameStat::new(0);
        a.conflicts = 3;
        a.work = 10;
        a.cumulative_work = 10;
        let mut b = FrameStat::new(1);
        b.conflicts = 5;
        b.work = 7;
        b.cumulative_work = 17;
        let stats = [a, b];
        assert_eq!(frame_csv(&stats, FrameMetric::Conflicts), "x,y\n0,3\n1,5\n");
        assert_eq!(
            frame_csv(&stats, FrameMetric::CumulativeTime(TimeMetric::Work)),
            "x,y\n0,10\n1,17\n"
        );
    }

    #[test]
    fn merge_sums_per_frame() {
        let mut a = FrameStat::new(0);
        a.conflicts = 1;
        a.work = 2;
        let mut b = FrameStat::new(1);
        b.conflicts = 4;
        b.work = 3;
        let merged = merge_frames([&[a][..], &[a, b][..]]);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].conflicts, 2);
        assert_eq!(merged[1].cumulative_work, 7);
    }
}
