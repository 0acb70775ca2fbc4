//! Publication-stream analysis.
//!
//! Works on generic timestamped author lists: fills missing months, finds
//! the main author of every publication (first author who has published
//! in an earlier month), splits the remaining co-authors into prior
//! co-authors / existing strangers / first-timers, and fits a Poisson law
//! to the co-author counts.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, TemporalGraph};
use crate::rng::RngState;
use crate::stats::{poisson_chi_square, poisson_pmf, ChiSquareFit};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub year: i32,
    pub month: Option<u8>,
    pub authors: Vec<String>,
}

impl PublicationRecord {
    pub fn new(year: i32, month: Option<u8>, authors: &[&str]) -> Self {
        Self {
            year,
            month,
            authors: authors.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.authors.is_empty() {
            return Err("publication has no authors".into());
        }
        if let Some(m) = self.month {
            if !(1..=12).contains(&m) {
                return Err(format!("month {m} outside 1..=12"));
            }
        }
        let mut seen = FxHashSet::default();
        for a in &self.authors {
            if a.is_empty() {
                return Err("empty author name".into());
            }
            if !seen.insert(a.as_str()) {
                return Err(format!("author {a:?} listed twice"));
            }
        }
        Ok(())
    }
}

/// Reads `year,month,authors` CSV; authors are `|`-separated, an empty
/// month means unknown.
pub fn read_publications<R: Read>(input: R) -> Result<Vec<PublicationRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers != ["year", "month", "authors"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header year,month,authors, found {headers:?}"),
        });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Parse { line, message };
        if row.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", row.len())));
        }
        let year = row[0].parse::<i32>().map_err(|e| bad(format!("year: {e}")))?;
        let month = match &row[1] {
            "" => None,
            m => Some(m.parse::<u8>().map_err(|e| bad(format!("month: {e}")))?),
        };
        let authors = row[2]
            .split('|')
            .map(|a| a.trim().to_string())
            .filter(|a| !a.is_empty())
            .collect();
        let rec = PublicationRecord { year, month, authors };
        rec.validate().map_err(bad)?;
        out.push(rec);
    }
    Ok(out)
}

/// Fills absent months uniformly from 1..=12; present months are kept.
pub fn assign_months(records: &[PublicationRecord], seed: u64) -> Result<Vec<PublicationRecord>> {
    let mut rng = RngState::new(seed);
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.validate()
                .map_err(|m| Error::invalid(format!("record {i}: {m}")))?;
            let mut r = r.clone();
            if r.month.is_none() {
                r.month = Some(rng.below(12) as u8 + 1);
            }
            Ok(r)
        })
        .collect()
}

/// Stable sort by `(year, month)`; records without a month sort first
/// within their year.
pub fn sort_by_time(records: &mut [PublicationRecord]) {
    records.sort_by_key(|r| (r.year, r.month));
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedPublication {
    /// Position of the record in the input stream.
    pub index: usize,
    pub year: i32,
    pub month: u8,
    pub main_author: String,
    /// Existing authors who already co-published with the main author.
    pub prior_coauthors: Vec<String>,
    /// Existing authors who never co-published with the main author.
    pub existing_non_coauthors: Vec<String>,
    /// Authors without any earlier publication.
    pub new_authors: Vec<String>,
}

impl ClassifiedPublication {
    pub fn coauthor_count(&self) -> usize {
        self.prior_coauthors.len() + self.existing_non_coauthors.len() + self.new_authors.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub publications: Vec<ClassifiedPublication>,
    pub dropped: usize,
}

/// Classifies a time-sorted stream. An author exists in month `T` if they
/// appear on any publication from a strictly earlier month, including
/// publications that were themselves dropped. Publications in the same
/// month never make each other's authors existing.
pub fn classify_stream(records: &[PublicationRecord]) -> Result<Classification> {
    let mut ids: FxHashMap<&str, u32> = FxHashMap::default();
    let mut existing: Vec<bool> = Vec::new();
    let mut coauthors: Vec<FxHashSet<u32>> = Vec::new();
    let mut out = Classification::default();

    let mut start = 0;
    while start < records.len() {
        let key = time_key(records, start)?;
        let mut end = start + 1;
        while end < records.len() {
            let k = time_key(records, end)?;
            if k < key {
                return Err(Error::Unsorted { index: end });
            }
            if k != key {
                break;
            }
            end += 1;
        }

        let group = &records[start..end];
        let mut group_ids: Vec<Vec<u32>> = Vec::with_capacity(group.len());
        for r in group {
            r.validate()
                .map_err(|m| Error::invalid(format!("record {}: {m}", start + group_ids.len())))?;
            let v = r
                .authors
                .iter()
                .map(|a| {
                    let next = ids.len() as u32;
                    *ids.entry(a.as_str()).or_insert_with(|| {
                        existing.push(false);
                        coauthors.push(FxHashSet::default());
                        next
                    })
                })
                .collect();
            group_ids.push(v);
        }

        for (offset, (r, authors)) in group.iter().zip(&group_ids).enumerate() {
            let Some(main_pos) = authors.iter().position(|&a| existing[a as usize]) else {
                out.dropped += 1;
                continue;
            };
            let main = authors[main_pos];
            let mut c = ClassifiedPublication {
                index: start + offset,
                year: r.year,
                month: key.1,
                main_author: r.authors[main_pos].clone(),
                prior_coauthors: Vec::new(),
                existing_non_coauthors: Vec::new(),
                new_authors: Vec::new(),
            };
            for (pos, &a) in authors.iter().enumerate() {
                if pos == main_pos {
                    continue;
                }
                let name = r.authors[pos].clone();
                if !existing[a as usize] {
                    c.new_authors.push(name);
                } else if coauthors[main as usize].contains(&a) {
                    c.prior_coauthors.push(name);
                } else {
                    c.existing_non_coauthors.push(name);
                }
            }
            out.publications.push(c);
        }

        for authors in &group_ids {
            for &a in authors {
                existing[a as usize] = true;
                for &b in authors {
                    if a != b {
                        coauthors[a as usize].insert(b);
                    }
                }
            }
        }
        start = end;
    }
    Ok(out)
}

fn time_key(records: &[PublicationRecord], i: usize) -> Result<(i32, u8)> {
    let r = &records[i];
    let m = r
        .month
        .ok_or_else(|| Error::invalid(format!("record {i} has no month; assign months first")))?;
    Ok((r.year, m))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoauthorHistogram {
    /// co-author count -> publications
    pub counts: BTreeMap<usize, u64>,
    pub publications: u64,
    pub lambda_hat: f64,
}

impl CoauthorHistogram {
    /// Dense observed counts for `k = 0..=max`.
    pub fn dense(&self) -> Vec<u64> {
        let max = self.counts.keys().next_back().copied().unwrap_or(0);
        (0..=max).map(|k| self.counts.get(&k).copied().unwrap_or(0)).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "coauthors,publications")?;
        for (k, c) in &self.counts {
            writeln!(out, "{k},{c}")?;
        }
        Ok(())
    }
}

fn histogram_of<'a>(pubs: impl IntoIterator<Item = &'a ClassifiedPublication>) -> Result<CoauthorHistogram> {
    let mut counts = BTreeMap::new();
    let (mut total, mut sum) = (0u64, 0u64);
    for p in pubs {
        let k = p.coauthor_count();
        *counts.entry(k).or_insert(0) += 1;
        total += 1;
        sum += k as u64;
    }
    if total == 0 {
        return Err(Error::Empty("no retained publications".into()));
    }
    Ok(CoauthorHistogram {
        counts,
        publications: total,
        lambda_hat: sum as f64 / total as f64,
    })
}

/// Histogram of co-author counts (authors - 1) over retained publications.
pub fn coauthor_histogram(classified: &[ClassifiedPublication]) -> Result<CoauthorHistogram> {
    histogram_of(classified)
}

/// Per-main-author histograms for the `k` most frequent main authors
/// (ties broken by name).
pub fn top_main_authors(classified: &[ClassifiedPublication], k: usize) -> Vec<(String, CoauthorHistogram)> {
    let mut by_author: BTreeMap<&str, Vec<&ClassifiedPublication>> = BTreeMap::new();
    for p in classified {
        by_author.entry(p.main_author.as_str()).or_default().push(p);
    }
    let mut ranked: Vec<(&str, Vec<&ClassifiedPublication>)> = by_author.into_iter().collect();
    ranked.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(b.0)));
    ranked
        .into_iter()
        .take(k)
        .map(|(name, pubs)| (name.to_string(), histogram_of(pubs).expect("non-empty group")))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub k: usize,
    pub observed: u64,
    pub empirical: f64,
    pub poisson: f64,
    pub empirical_cdf: f64,
    pub poisson_cdf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub lambda: f64,
    pub rows: Vec<FitRow>,
    pub chi_square: ChiSquareFit,
}

impl FitReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,observed,empirical,poisson,empirical_cdf,poisson_cdf")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.k, r.observed, r.empirical, r.poisson, r.empirical_cdf, r.poisson_cdf
            )?;
        }
        Ok(())
    }
}

/// Compares the histogram with Poisson(`lambda`) for every `k` up to the
/// largest observed value. `lambda` is treated as fitted from the data, so
/// the chi-square loses one degree of freedom.
pub fn poisson_fit_report(hist: &CoauthorHistogram, lambda: f64) -> FitReport {
    let observed = hist.dense();
    let pmf = poisson_pmf(lambda, observed.len() - 1);
    let total = hist.publications as f64;
    let (mut ecdf, mut pcdf) = (0.0, 0.0);
    let rows = observed
        .iter()
        .zip(&pmf)
        .enumerate()
        .map(|(k, (&o, &p))| {
            let emp = o as f64 / total;
            ecdf += emp;
            pcdf += p;
            FitRow {
                k,
                observed: o,
                empirical: emp,
                poisson: p,
                empirical_cdf: ecdf,
                poisson_cdf: pcdf,
            }
        })
        .collect();
    FitReport {
        lambda,
        rows,
        chi_square: poisson_chi_square(&observed, lambda, 1),
    }
}

/// Co-authorship network: one clique per publication, edge weight = number
/// of shared publications. Ids follow first appearance; returns the names
/// indexed by id.
pub fn build_coauthorship_network(records: &[PublicationRecord]) -> (TemporalGraph, Vec<String>) {
    let mut g = TemporalGraph::new();
    let mut ids: FxHashMap<&str, NodeId> = FxHashMap::default();
    let mut names = Vec::new();
    let mut members = Vec::new();
    for (t, r) in records.iter().enumerate() {
        members.clear();
        for a in &r.authors {
            let id = *ids.entry(a.as_str()).or_insert_with(|| {
                names.push(a.clone());
                g.add_node(t as u64)
            });
            if !members.contains(&id) {
                members.push(id);
            }
        }
        g.add_clique(&members);
    }
    (g, names)
}

pub fn write_classified<W: Write>(c: &Classification, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "index",
        "year",
        "month",
        "main_author",
        "prior_coauthors",
        "existing_non_coauthors",
        "new_authors",
    ])?;
    for p in &c.publications {
        w.write_record([
            p.index.to_string(),
            p.year.to_string(),
            p.month.to_string(),
            p.main_author.clone(),
            p.prior_coauthors.join("|"),
            p.existing_non_coauthors.join("|"),
            p.new_authors.join("|"),
        ])?;
    }
    w.flush()?;
    Ok(())
}
