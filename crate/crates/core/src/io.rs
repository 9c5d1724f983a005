//! TSV persistence for embeddings and household protocols.
//!
//! Formats:
//! - `embeddings.tsv`: header line `#dim=<d>`, then one row per utterance:
//!   `utt_id <TAB> speaker_id <TAB> x_1 ... x_d`. The speaker field uses `?`
//!   for unlabeled rows. Floats are serialized at full precision (shortest
//!   round-tripping decimal), so read(write(E)) == E bit-exactly.
//! - `enroll.tsv`: `model_id <TAB> utt_id`.
//! - `adapt.tsv`: `household_id <TAB> utt_id`, one row per stream item in
//!   stream order.
//! - `trials.tsv`: `household_id <TAB> model_id <TAB> test_utt_id <TAB> label`.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::types::{
    Embedding, EmbeddingSet, Household, HouseholdProtocol, Trial, TrialLabel, UNLABELED,
};

pub const EMBEDDINGS_FILE: &str = "embeddings.tsv";
pub const ENROLL_FILE: &str = "enroll.tsv";
pub const ADAPT_FILE: &str = "adapt.tsv";
pub const TRIALS_FILE: &str = "trials.tsv";

fn open_reader(path: &Path) -> Result<BufReader<std::fs::File>> {
    Ok(BufReader::new(
        std::fs::File::open(path).map_err(|e| Error::io(path, e))?,
    ))
}

fn create_writer(path: &Path) -> Result<BufWriter<std::fs::File>> {
    Ok(BufWriter::new(
        std::fs::File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

/// Read an embedding TSV file.
pub fn read_embeddings<F: Real>(path: impl AsRef<Path>) -> Result<Vec<Embedding<F>>> {
    let path = path.as_ref();
    let reader = open_reader(path)?;
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(path, 1, "empty file, expected #dim=<d> header"))?;
    let header = header.map_err(|e| Error::io(path, e))?;
    let dim: usize = header
        .strip_prefix("#dim=")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| Error::format(path, 1, format!("expected #dim=<d> header, got {header:?}")))?;

    let mut out = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != dim + 2 {
            return Err(Error::format(
                path,
                lineno,
                format!(
                    "expected utt_id, speaker_id and {dim} components ({} columns), got {}",
                    dim + 2,
                    fields.len()
                ),
            ));
        }
        let speaker_id = match fields[1] {
            UNLABELED => None,
            s => Some(s.to_string()),
        };
        let vector = fields[2..]
            .iter()
            .map(|f| {
                F::parse(f).ok_or_else(|| {
                    Error::parse(path, lineno, format!("non-numeric component {f:?}"))
                })
            })
            .collect::<Result<Vec<F>>>()?;
        out.push(Embedding::new(fields[0], speaker_id, vector));
    }
    Ok(out)
}

/// Write an embedding TSV file. Requires a non-empty list with a uniform
/// dimension and finite components.
pub fn write_embeddings<F: Real>(embeddings: &[Embedding<F>], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let dim = match embeddings.first() {
        Some(e) => e.dim(),
        None => return Err(Error::Domain("refusing to write an empty embedding file".into())),
    };
    for e in embeddings {
        if e.dim() != dim {
            return Err(Error::Domain(format!(
                "embedding {} has dimension {}, expected {dim}",
                e.utt_id,
                e.dim()
            )));
        }
        if !e.is_finite() {
            return Err(Error::Domain(format!(
                "embedding {} contains a non-finite component",
                e.utt_id
            )));
        }
    }
    let mut w = create_writer(path)?;
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "#dim={dim}")?;
        for e in embeddings {
            write!(w, "{}\t{}", e.utt_id, e.speaker_id.as_deref().unwrap_or(UNLABELED))?;
            for v in &e.vector {
                write!(w, "\t{v}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    };
    emit().map_err(|e| Error::io(path, e))
}

fn read_rows(path: &Path, columns: usize) -> Result<Vec<Vec<String>>> {
    let reader = open_reader(path)?;
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(str::to_string).collect();
        if fields.len() != columns {
            return Err(Error::format(
                path,
                lineno,
                format!("expected {columns} columns, got {}", fields.len()),
            ));
        }
        rows.push(fields);
    }
    Ok(rows)
}

/// Read a protocol directory (embeddings plus the three list files) and
/// reassemble per-household protocols, fully validated.
pub fn load_protocol_dir<F: Real>(
    dir: impl AsRef<Path>,
) -> Result<(EmbeddingSet<F>, Vec<HouseholdProtocol>)> {
    let dir = dir.as_ref();
    let embeddings = EmbeddingSet::new(read_embeddings(dir.join(EMBEDDINGS_FILE))?)?;

    let enroll_rows = read_rows(&dir.join(ENROLL_FILE), 2)?;
    let mut enroll: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for row in enroll_rows {
        enroll.entry(row[0].clone()).or_default().push(row[1].clone());
    }

    let adapt_rows = read_rows(&dir.join(ADAPT_FILE), 2)?;
    let mut streams: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for row in adapt_rows {
        streams.entry(row[0].clone()).or_default().push(row[1].clone());
    }

    let trials_path = dir.join(TRIALS_FILE);
    let trial_rows = read_rows(&trials_path, 4)?;
    let mut trials: BTreeMap<String, Vec<Trial>> = BTreeMap::new();
    let mut model_household: BTreeMap<String, String> = BTreeMap::new();
    for row in trial_rows {
        let label = TrialLabel::from_str(&row[3]).ok_or_else(|| {
            Error::Integrity(format!("unknown trial label {:?} in {TRIALS_FILE}", row[3]))
        })?;
        if let Some(prev) = model_household.insert(row[1].clone(), row[0].clone()) {
            if prev != row[0] {
                return Err(Error::Integrity(format!(
                    "model {} appears in households {prev} and {}",
                    row[1], row[0]
                )));
            }
        }
        trials.entry(row[0].clone()).or_default().push(Trial {
            model_id: row[1].clone(),
            test_utt_id: row[2].clone(),
            label,
        });
    }

    let mut household_ids: Vec<String> = trials.keys().cloned().collect();
    for id in streams.keys() {
        if !household_ids.contains(id) {
            household_ids.push(id.clone());
        }
    }
    household_ids.sort();

    let mut protocols = Vec::with_capacity(household_ids.len());
    for hh in household_ids {
        let hh_trials = trials.remove(&hh).unwrap_or_default();
        let stream = streams.remove(&hh).unwrap_or_default();

        let mut member_ids: Vec<String> = hh_trials.iter().map(|t| t.model_id.clone()).collect();
        member_ids.sort();
        member_ids.dedup();
        if member_ids.is_empty() {
            return Err(Error::Integrity(format!(
                "household {hh} has adaptation data but no trials to identify its members"
            )));
        }
        for m in &member_ids {
            if !enroll.contains_key(m) {
                return Err(Error::Integrity(format!(
                    "trials name model {m} which is absent from {ENROLL_FILE}"
                )));
            }
        }

        // Guests are the labeled non-member speakers reachable from this
        // household's trials and adaptation stream.
        let mut guest_ids: Vec<String> = Vec::new();
        let mut note_guest = |speaker: Option<&str>, guest_ids: &mut Vec<String>| {
            if let Some(s) = speaker {
                if !member_ids.iter().any(|m| m == s) && !guest_ids.iter().any(|g| g == s) {
                    guest_ids.push(s.to_string());
                }
            }
        };
        for t in &hh_trials {
            if t.label == TrialLabel::UnknownNontarget {
                note_guest(
                    embeddings.require(&t.test_utt_id)?.speaker_id.as_deref(),
                    &mut guest_ids,
                );
            }
        }
        for utt in &stream {
            note_guest(embeddings.require(utt)?.speaker_id.as_deref(), &mut guest_ids);
        }
        guest_ids.sort();

        let household = Household::new(&hh, member_ids.clone(), guest_ids)?;
        let hh_enroll: BTreeMap<String, Vec<String>> = member_ids
            .iter()
            .map(|m| (m.clone(), enroll[m].clone()))
            .collect();

        let protocol = HouseholdProtocol {
            household,
            enroll: hh_enroll,
            adaptation_stream: stream,
            trials: hh_trials,
        };
        protocol.validate(&embeddings)?;
        protocols.push(protocol);
    }
    Ok((embeddings, protocols))
}

/// Write a protocol directory: embeddings plus the three list files.
pub fn write_protocol_dir<F: Real>(
    embeddings: &EmbeddingSet<F>,
    protocols: &[HouseholdProtocol],
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let all: Vec<Embedding<F>> = embeddings.iter().cloned().collect();
    write_embeddings(&all, dir.join(EMBEDDINGS_FILE))?;

    let mut sorted: Vec<&HouseholdProtocol> = protocols.iter().collect();
    sorted.sort_by(|a, b| a.household.household_id.cmp(&b.household.household_id));

    let enroll_path = dir.join(ENROLL_FILE);
    let mut enroll_w = create_writer(&enroll_path)?;
    let adapt_path = dir.join(ADAPT_FILE);
    let mut adapt_w = create_writer(&adapt_path)?;
    let trials_path = dir.join(TRIALS_FILE);
    let mut trials_w = create_writer(&trials_path)?;

    for p in &sorted {
        let hh = &p.household.household_id;
        for (model, utts) in &p.enroll {
            for utt in utts {
                writeln!(enroll_w, "{model}\t{utt}").map_err(|e| Error::io(&enroll_path, e))?;
            }
        }
        for utt in &p.adaptation_stream {
            writeln!(adapt_w, "{hh}\t{utt}").map_err(|e| Error::io(&adapt_path, e))?;
        }
        for t in &p.trials {
            writeln!(trials_w, "{hh}\t{}\t{}\t{}", t.model_id, t.test_utt_id, t.label)
                .map_err(|e| Error::io(&trials_path, e))?;
        }
    }
    enroll_w.flush().map_err(|e| Error::io(&enroll_path, e))?;
    adapt_w.flush().map_err(|e| Error::io(&adapt_path, e))?;
    trials_w.flush().map_err(|e| Error::io(&trials_path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.tsv");
        let mut rng_state = 0x12345u64;
        let mut next = || {
            // xorshift, just to get varied mantissas
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        let embeddings: Vec<Embedding<f64>> = (0..100)
            .map(|i| {
                Embedding::new(
                    format!("u{i}"),
                    if i % 3 == 0 { None } else { Some(format!("s{}", i % 7)) },
                    (0..5).map(|_| next()).collect(),
                )
            })
            .collect();
        write_embeddings(&embeddings, &path).unwrap();
        let back: Vec<Embedding<f64>> = read_embeddings(&path).unwrap();
        assert_eq!(embeddings, back);
    }

    #[test]
    fn header_and_sentinel() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.tsv");
        std::fs::write(&path, "#dim=2\nu1\tspkA\t0\t1\nu2\t?\t1\t0\n").unwrap();
        let got: Vec<Embedding<f64>> = read_embeddings(&path).unwrap();
        assert_eq!(got[0].speaker_id.as_deref(), Some("spkA"));
        assert_eq!(got[0].vector, vec![0.0, 1.0]);
        assert_eq!(got[1].speaker_id, None);
    }

    #[test]
    fn dimension_mismatch_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.tsv");
        std::fs::write(&path, "#dim=2\nu1\ts\t0\t1\nu2\ts\t0\t1\t2\n").unwrap();
        let err = read_embeddings::<f64>(&path).unwrap_err();
        match err {
            Error::Format { line, .. } => assert_eq!(line, 3),
            other => panic!("expected format error, got {other}"),
        }
    }

    #[test]
    fn non_numeric_is_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.tsv");
        std::fs::write(&path, "#dim=2\nu1\ts\t0\txyz\n").unwrap();
        assert!(matches!(
            read_embeddings::<f64>(&path).unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
    }

    #[test]
    fn write_rejects_empty_and_mixed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.tsv");
        assert!(write_embeddings::<f64>(&[], &path).is_err());
        let mixed = vec![
            Embedding::new("a", None, vec![0.0f64]),
            Embedding::new("b", None, vec![0.0f64, 1.0]),
        ];
        assert!(write_embeddings(&mixed, &path).is_err());
    }
}
