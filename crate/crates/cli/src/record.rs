use serde::{Deserialize, Serialize};

/// One `bench` measurement. Field order is the canonical output order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub n: u64,
    pub m: u64,
    pub params: String,
    pub levels: usize,
    pub complemented: bool,
    pub base_kind: Option<String>,
    pub bits_total: u64,
    #[serde(rename = "bits_B")]
    pub bits_b: u64,
    pub redundancy: i64,
    pub breakdown: Breakdown,
    pub build_seconds: f64,
    pub query_ns: Percentiles,
    pub batch_ns: BatchTimes,
    pub max_probes: Probes,
    pub descent_cache: Option<CacheStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub high: u64,
    pub low: u64,
    pub trees: u64,
    pub multirank: u64,
    pub base: u64,
    pub dual: u64,
}

impl Breakdown {
    pub fn sum(&self) -> u64 {
        self.high + self.low + self.trees + self.multirank + self.base + self.dual
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Percentiles {
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    pub max: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchTimes {
    pub seq: u64,
    pub par: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probes {
    pub rank: u64,
    pub select1: u64,
    pub select0: u64,
    pub pred: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheStats {
    pub budget_bytes: usize,
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
}

pub const CSV_HEADER: [&str; 27] = [
    "dataset",
    "n",
    "m",
    "params",
    "levels",
    "complemented",
    "base_kind",
    "bits_total",
    "bits_B",
    "redundancy",
    "high",
    "low",
    "trees",
    "multirank",
    "base",
    "dual",
    "build_seconds",
    "p50_ns",
    "p90_ns",
    "p99_ns",
    "max_ns",
    "batch_seq_ns",
    "batch_par_ns",
    "probes_rank",
    "probes_select1",
    "probes_select0",
    "probes_pred",
];

impl BenchRecord {
    pub fn csv_fields(&self) -> [String; 27] {
        let b = &self.breakdown;
        let q = &self.query_ns;
        let p = &self.max_probes;
        [
            self.dataset.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.params.clone(),
            self.levels.to_string(),
            self.complemented.to_string(),
            self.base_kind.clone().unwrap_or_default(),
            self.bits_total.to_string(),
            self.bits_b.to_string(),
            self.redundancy.to_string(),
            b.high.to_string(),
            b.low.to_string(),
            b.trees.to_string(),
            b.multirank.to_string(),
            b.base.to_string(),
            b.dual.to_string(),
            format!("{:.6}", self.build_seconds),
            q.p50.to_string(),
            q.p90.to_string(),
            q.p99.to_string(),
            q.max.to_string(),
            self.batch_ns.seq.to_string(),
            self.batch_ns.par.map_or(String::new(), |x| x.to_string()),
            p.rank.to_string(),
            p.select1.to_string(),
            p.select0.to_string(),
            p.pred.to_string(),
        ]
    }
}
