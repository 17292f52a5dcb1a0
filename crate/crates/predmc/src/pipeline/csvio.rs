//! Dataset persistence: CSV records with a JSON sidecar for the geometry.
//!
//! The CSV is `k,f,r,check_time_s` with the formula always quoted, UTF-8,
//! LF line endings. The sidecar `<path>.meta.json` carries geometry and
//! seeds; when it is missing, geometry is inferred from the records (three
//! propositions assumed, the smallest state count that decodes every
//! structure, pad length from the longest formula).

use super::{Dataset, DatasetMeta, PipelineError, Record};
use crate::kripke::decode_kripke;
use crate::ltl::parse_ltl;
use std::fs;
use std::path::Path;

pub fn dataset_to_csv(d: &Dataset) -> String {
    let mut out = String::from("k,f,r,check_time_s\n");
    for record in &d.records {
        out.push_str(&record.k_text);
        out.push(',');
        out.push('"');
        out.push_str(&record.f_text.replace('"', "\"\""));
        out.push('"');
        out.push(',');
        out.push(if record.r { '1' } else { '0' });
        out.push(',');
        out.push_str(&format!("{}", record.check_time));
        out.push('\n');
    }
    out
}

pub fn records_from_csv(text: &str) -> Result<Vec<Record>, PipelineError> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .ok_or(PipelineError::Csv {
            line: 1,
            message: "missing header".to_string(),
        })?
        .1
        .trim_end_matches('\r');
    if header != "k,f,r,check_time_s" {
        return Err(PipelineError::Csv {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut records = Vec::new();
    for (i, raw) in lines {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fail = |message: String| PipelineError::Csv {
            line: i + 1,
            message,
        };
        let (k_text, rest) = line
            .split_once(',')
            .ok_or_else(|| fail("missing fields".to_string()))?;
        let (f_text, rest) = take_field(rest).map_err(&fail)?;
        let (r_text, time_text) = rest
            .split_once(',')
            .ok_or_else(|| fail("missing verdict or time".to_string()))?;
        let r = match r_text {
            "1" => true,
            "0" => false,
            other => return Err(fail(format!("verdict must be 0 or 1, got {other:?}"))),
        };
        let check_time: f64 = time_text
            .parse()
            .map_err(|e| fail(format!("bad check time {time_text:?}: {e}")))?;
        records.push(Record {
            k_text: k_text.to_string(),
            f_text,
            r,
            check_time,
        });
    }
    Ok(records)
}

/// Read one possibly quoted field followed by a comma.
fn take_field(rest: &str) -> Result<(String, &str), String> {
    if let Some(stripped) = rest.strip_prefix('"') {
        let mut value = String::new();
        let mut chars = stripped.char_indices();
        while let Some((at, c)) = chars.next() {
            if c != '"' {
                value.push(c);
                continue;
            }
            match chars.next() {
                Some((_, '"')) => value.push('"'),
                Some((_, ',')) => return Ok((value, &stripped[at + 2..])),
                None => return Err("field ends at closing quote".to_string()),
                Some((_, other)) => return Err(format!("unexpected {other:?} after quote")),
            }
        }
        Err("unterminated quoted field".to_string())
    } else {
        match rest.split_once(',') {
            Some((value, tail)) => Ok((value.to_string(), tail)),
            None => Err("missing fields after formula".to_string()),
        }
    }
}

fn meta_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

/// Write the CSV and its metadata sidecar.
pub fn save_dataset(d: &Dataset, path: &Path) -> Result<(), PipelineError> {
    let io_err = |p: &Path, source| PipelineError::Io {
        path: p.display().to_string(),
        source,
    };
    fs::write(path, dataset_to_csv(d)).map_err(|e| io_err(path, e))?;
    let meta = serde_json::to_string_pretty(&d.meta).expect("meta serializes");
    let mp = meta_path(path);
    fs::write(&mp, meta).map_err(|e| io_err(&mp, e))?;
    Ok(())
}

/// Read a dataset; uses the sidecar when present, otherwise infers the
/// geometry from the records.
pub fn load_dataset(path: &Path) -> Result<Dataset, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let records = records_from_csv(&text)?;
    let mp = meta_path(path);
    let meta = if mp.exists() {
        let raw = fs::read_to_string(&mp).map_err(|e| PipelineError::Io {
            path: mp.display().to_string(),
            source: e,
        })?;
        serde_json::from_str(&raw).map_err(|e| PipelineError::MetaInference(e.to_string()))?
    } else {
        infer_meta(&records)?
    };
    Ok(Dataset { meta, records })
}

fn infer_meta(records: &[Record]) -> Result<DatasetMeta, PipelineError> {
    let first = records
        .first()
        .ok_or_else(|| PipelineError::MetaInference("no records".to_string()))?;
    let n_props = 3u8;
    let n_states = (1..=10u16)
        .find(|&n| {
            records
                .iter()
                .all(|r| decode_kripke(&r.k_text, n, n_props).is_ok())
        })
        .ok_or_else(|| {
            PipelineError::MetaInference(
                "no state count in 1..=10 decodes every structure".to_string(),
            )
        })?;
    let n_transitions = decode_kripke(&first.k_text, n_states, n_props)?
        .transitions()
        .len();
    let mut formula_len = 0;
    for r in records {
        formula_len = formula_len.max(parse_ltl(&r.f_text)?.token_length());
    }
    Ok(DatasetMeta {
        n_states,
        n_props,
        n_transitions,
        formula_len,
        kripke_seed: 0,
        formula_seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dataset {
        Dataset {
            meta: DatasetMeta {
                n_states: 1,
                n_props: 3,
                n_transitions: 1,
                formula_len: 3,
                kripke_seed: 1,
                formula_seed: 2,
            },
            records: vec![
                Record {
                    k_text: "10000".to_string(),
                    f_text: "(p|q)".to_string(),
                    r: true,
                    check_time: 0.000125,
                },
                Record {
                    k_text: "01000".to_string(),
                    f_text: "!Xp".to_string(),
                    r: false,
                    check_time: 0.25,
                },
            ],
        }
    }

    #[test]
    fn csv_round_trip() {
        let d = sample();
        let text = dataset_to_csv(&d);
        assert!(text.starts_with("k,f,r,check_time_s\n"));
        assert!(text.contains("10000,\"(p|q)\",1,0.000125\n"));
        assert!(!text.contains('\r'));
        let back = records_from_csv(&text).unwrap();
        assert_eq!(back, d.records);
    }

    #[test]
    fn csv_rejects_bad_verdict() {
        let text = "k,f,r,check_time_s\n10000,\"p\",2,0.1\n";
        assert!(matches!(
            records_from_csv(text),
            Err(PipelineError::Csv { line: 2, .. })
        ));
    }

    #[test]
    fn csv_rejects_bad_header() {
        assert!(matches!(
            records_from_csv("a,b\n"),
            Err(PipelineError::Csv { line: 1, .. })
        ));
    }

    #[test]
    fn meta_inference_recovers_geometry() {
        let d = sample();
        let meta = infer_meta(&d.records).unwrap();
        assert_eq!(meta.n_states, 1);
        assert_eq!(meta.n_props, 3);
        assert_eq!(meta.n_transitions, 1);
        assert_eq!(meta.formula_len, 3);
    }

    #[test]
    fn save_and_load_with_sidecar() {
        let dir = std::env::temp_dir().join("predmc-csvio-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("data.csv");
        let d = sample();
        save_dataset(&d, &path).unwrap();
        let back = load_dataset(&path).unwrap();
        assert_eq!(back, d);
        // without the sidecar, inference still recovers the geometry
        fs::remove_file(meta_path(&path)).unwrap();
        let inferred = load_dataset(&path).unwrap();
        assert_eq!(inferred.records, d.records);
        assert_eq!(inferred.meta.n_states, 1);
        fs::remove_file(&path).unwrap();
    }
}
