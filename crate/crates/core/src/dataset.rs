//! Synthetic sorted sets and their file formats.
//!
//! Text: a header line `m n`, then one decimal value per line.
//! Raw: magic `FIDD`, then version, `m`, `n` and the values, all as
//! little-endian 64-bit words.

use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eliasfano::check_sorted;
use crate::error::{Error, Result};

pub const RAW_MAGIC: [u8; 4] = *b"FIDD";
pub const RAW_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub m: u64,
    pub values: Vec<u64>,
}

impl Dataset {
    pub fn new(m: u64, values: Vec<u64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("universe must be at least 1".into()));
        }
        check_sorted(&values, m, true)?;
        Ok(Dataset { m, values })
    }

    pub fn n(&self) -> u64 {
        self.values.len() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Uniform,
    /// Values packed into this many narrow intervals.
    Clustered(usize),
    /// `0, step, 2·step, …` with `step = ⌊m/n⌋`.
    Arithmetic,
    /// Runs of consecutive values separated by random gaps.
    DenseRuns,
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Kind::Uniform),
            "clustered" => Ok(Kind::Clustered(5)),
            "arithmetic" => Ok(Kind::Arithmetic),
            "dense-runs" => Ok(Kind::DenseRuns),
            _ => match s.strip_prefix("clustered:").map(str::parse) {
                Some(Ok(c)) if c > 0 => Ok(Kind::Clustered(c)),
                _ => Err(Error::InvalidInput(format!("unknown dataset kind `{s}`"))),
            },
        }
    }
}

const CLUSTER_SPREAD: u64 = 8;
const RUN_LENGTH: u64 = 32;

fn sample_distinct(rng: &mut ChaCha8Rng, lo: u64, len: u64, count: u64) -> Vec<u64> {
    let mut out: Vec<u64> = if count * 2 > len {
        // dense: pick which ones to drop
        let drop: std::collections::HashSet<usize> =
            index::sample(rng, len as usize, (len - count) as usize)
                .into_iter()
                .collect();
        (0..len)
            .filter(|i| !drop.contains(&(*i as usize)))
            .map(|i| lo + i)
            .collect()
    } else {
        index::sample(rng, len as usize, count as usize)
            .into_iter()
            .map(|i| lo + i as u64)
            .collect()
    };
    out.sort_unstable();
    out
}

/// Generates `n` distinct values in `[0, m)`; deterministic in `seed`.
pub fn generate(kind: Kind, n: u64, m: u64, seed: u64) -> Result<Dataset> {
    if m == 0 || n > m {
        return Err(Error::InvalidInput(format!(
            "cannot draw {n} values from [0, {m})"
        )));
    }
    if m > usize::MAX as u64 {
        return Err(Error::InvalidInput(
            "universe exceeds the address width".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = match kind {
        Kind::Uniform => sample_distinct(&mut rng, 0, m, n),
        Kind::Arithmetic => {
            let step = m.checked_div(n).unwrap_or(1);
            (0..n).map(|i| i * step).collect()
        }
        Kind::Clustered(c) => {
            let c = c as u64;
            let slot = m / c;
            let width = (slot / CLUSTER_SPREAD).max(1);
            let per = n.div_ceil(c);
            if slot == 0 || per > width {
                return Err(Error::InvalidInput(format!(
                    "{c} clusters of width {width} cannot hold {n} values"
                )));
            }
            let mut out = Vec::with_capacity(n as usize);
            let mut left = n;
            for k in 0..c {
                let take = per.min(left);
                left -= take;
                let start = k * slot + rng.gen_range(0..=slot - width);
                out.extend(sample_distinct(&mut rng, start, width, take));
            }
            out
        }
        Kind::DenseRuns => {
            let runs = n.div_ceil(RUN_LENGTH).max(1);
            let spare = m - n;
            let mut cuts: Vec<u64> = (0..runs).map(|_| rng.gen_range(0..=spare)).collect();
            cuts.sort_unstable();
            let mut out = Vec::with_capacity(n as usize);
            let mut left = n;
            let mut shift = 0;
            for (r, &gap_end) in cuts.iter().enumerate() {
                let len = left.div_ceil(runs - r as u64);
                let start = gap_end + shift;
                out.extend(start..start + len);
                shift += len;
                left -= len;
            }
            out
        }
    };
    Dataset::new(m, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Raw,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "raw" => Ok(Format::Raw),
            _ => Err(Error::InvalidInput(format!("unknown format `{s}`"))),
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn write<W: Write>(data: &Dataset, format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Text => {
            writeln!(out, "{} {}", data.m, data.n()).map_err(io_err)?;
            for v in &data.values {
                writeln!(out, "{v}").map_err(io_err)?;
            }
        }
        Format::Raw => {
            out.write_all(&RAW_MAGIC).map_err(io_err)?;
            for w in [RAW_VERSION, data.m, data.n()]
                .into_iter()
                .chain(data.values.iter().copied())
            {
                out.write_all(&w.to_le_bytes()).map_err(io_err)?;
            }
        }
    }
    out.flush().map_err(io_err)
}

/// Reads either format, telling them apart by the raw magic.
pub fn read<R: Read>(input: R) -> Result<Dataset> {
    let mut input = BufReader::new(input);
    let head = input.fill_buf().map_err(io_err)?;
    if head.starts_with(&RAW_MAGIC) {
        read_raw(input)
    } else {
        read_text(input)
    }
}

fn read_raw<R: BufRead>(mut input: R) -> Result<Dataset> {
    let mut word = [0u8; 8];
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(io_err)?;
    let mut next = |what: &str| -> Result<u64> {
        input
            .read_exact(&mut word)
            .map_err(|_| Error::Format(format!("raw dataset truncated at {what}")))?;
        Ok(u64::from_le_bytes(word))
    };
    let version = next("version")?;
    if version != RAW_VERSION {
        return Err(Error::Format(format!(
            "unsupported dataset version {version}"
        )));
    }
    let m = next("m")?;
    let n = next("n")?;
    if n > m {
        return Err(Error::Format(format!("n = {n} exceeds m = {m}")));
    }
    let values = (0..n).map(|_| next("values")).collect::<Result<Vec<_>>>()?;
    let mut rest = [0u8; 1];
    if input.read(&mut rest).map_err(io_err)? != 0 {
        return Err(Error::Format("trailing data after values".into()));
    }
    Dataset::new(m, values).map_err(|e| Error::Format(e.to_string()))
}

fn read_text<R: BufRead>(input: R) -> Result<Dataset> {
    let mut lines = input
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
    let parse = |line: usize, s: &str| -> Result<u64> {
        s.trim().parse().map_err(|_| {
            Error::Format(format!(
                "line {}: expected an integer, got `{}`",
                line + 1,
                s.trim()
            ))
        })
    };
    let (ln, header) = lines
        .next()
        .ok_or_else(|| Error::Format("empty dataset file".into()))?;
    let header = header.map_err(io_err)?;
    let mut fields = header.split_whitespace();
    let (Some(m), Some(n), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(Error::Format("header must be `m n`".into()));
    };
    let m = parse(ln, m)?;
    let n = parse(ln, n)?;
    let mut values = Vec::with_capacity(n.min(1 << 24) as usize);
    for (ln, line) in lines {
        values.push(parse(ln, &line.map_err(io_err)?)?);
    }
    if values.len() as u64 != n {
        return Err(Error::Format(format!(
            "header says {n} values, found {}",
            values.len()
        )));
    }
    Dataset::new(m, values).map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_contracts() {
        let d = generate(Kind::Uniform, 4, 16, 1).unwrap();
        assert_eq!(d.values.len(), 4);
        assert!(d.values.windows(2).all(|w| w[0] < w[1]) && d.values[3] < 16);
        assert_eq!(generate(Kind::Uniform, 4, 16, 1).unwrap(), d);
        assert_eq!(
            generate(Kind::Arithmetic, 4, 16, 0).unwrap().values,
            vec![0, 4, 8, 12]
        );
        let d = generate(Kind::Clustered(5), 100, 1_000_000, 3).unwrap();
        assert_eq!(d.values.len(), 100);
        let width = 1_000_000 / 5 / CLUSTER_SPREAD;
        let mut clusters = 1;
        for w in d.values.windows(2) {
            if w[1] - w[0] >= width {
                clusters += 1;
            }
        }
        assert!(clusters <= 5);
        assert!(generate(Kind::Clustered(5), 100, 200, 3).is_err());
        let d = generate(Kind::DenseRuns, 200, 10_000, 9).unwrap();
        assert_eq!(d.values.len(), 200);
        let breaks = d.values.windows(2).filter(|w| w[1] != w[0] + 1).count();
        assert!(breaks < 7);
        for n in [0, 1, 15, 16] {
            for kind in [Kind::Uniform, Kind::Arithmetic, Kind::DenseRuns] {
                assert_eq!(generate(kind, n, 16, 5).unwrap().n(), n);
            }
        }
        assert!(generate(Kind::Uniform, 17, 16, 0).is_err());
    }

    #[test]
    fn formats_roundtrip() {
        let d = generate(Kind::Uniform, 50, 1 << 20, 4).unwrap();
        for f in [Format::Text, Format::Raw] {
            let mut buf = Vec::new();
            write(&d, f, &mut buf).unwrap();
            assert_eq!(read(buf.as_slice()).unwrap(), d);
        }
        let mut buf = Vec::new();
        write(
            &Dataset::new(16, vec![3, 5, 9, 14]).unwrap(),
            Format::Text,
            &mut buf,
        )
        .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "16 4\n3\n5\n9\n14\n");
    }

    #[test]
    fn malformed_inputs() {
        for text in [
            "",
            "16\n",
            "16 2\n3\n",
            "16 2\n5\n3\n",
            "16 1\n16\n",
            "16 1\nx\n",
        ] {
            assert!(read(text.as_bytes()).is_err(), "{text:?}");
        }
        let mut buf = Vec::new();
        write(
            &Dataset::new(16, vec![1, 2]).unwrap(),
            Format::Raw,
            &mut buf,
        )
        .unwrap();
        assert!(read(&buf[..buf.len() - 1]).is_err());
        buf.push(0);
        assert!(read(buf.as_slice()).is_err());
    }
}
