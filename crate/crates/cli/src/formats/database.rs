use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anosov_zeta_core::group::{format_word, parse_word, Word};
use anosov_zeta_core::orbit::{Cutoff, OrbitDatabase, PrimitiveClassRecord, RecordRef, WeightMode};
use anosov_zeta_core::{Complex64, Error};
use serde::{Deserialize, Serialize};

use super::{create, Meta};
use crate::error::{CliError, Result};

pub const DATABASE_FORMAT: &str = "anosov-zeta-orbits";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffField {
    Length(usize),
    Weight(f64),
}

impl From<Cutoff> for CutoffField {
    fn from(c: Cutoff) -> Self {
        match c {
            Cutoff::Length(n) => CutoffField::Length(n),
            Cutoff::Weight(t) => CutoffField::Weight(t),
        }
    }
}

impl From<CutoffField> for Cutoff {
    fn from(c: CutoffField) -> Self {
        match c {
            CutoffField::Length(n) => Cutoff::Length(n),
            CutoffField::Weight(t) => Cutoff::Weight(t),
        }
    }
}

/// First line of a database file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatabaseHeader {
    pub format: String,
    pub meta: Meta,
    pub cutoff: CutoffField,
    pub rep_digest: String,
    pub weight_mode: String,
    pub genus: usize,
    pub d: usize,
}

impl DatabaseHeader {
    pub fn new(meta: Meta, cutoff: Cutoff, rep_digest: &str, weight_mode: WeightMode, genus: usize, d: usize) -> Self {
        DatabaseHeader {
            format: DATABASE_FORMAT.into(),
            meta,
            cutoff: cutoff.into(),
            rep_digest: rep_digest.into(),
            weight_mode: weight_mode.name().into(),
            genus,
            d,
        }
    }

    pub fn for_database(meta: Meta, db: &OrbitDatabase) -> Self {
        Self::new(meta, db.cutoff(), db.rep_digest(), db.weight_mode(), db.genus(), db.dim())
    }
}

/// One class per line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordLine {
    pub word: String,
    pub p: usize,
    pub d_top: f64,
    pub d_spread: f64,
    pub mu: Vec<[f64; 2]>,
    pub ab: Vec<i32>,
    pub fp: String,
}

impl RecordLine {
    pub fn from_record(r: RecordRef<'_>) -> Self {
        RecordLine {
            word: format_word(&Word::new(r.word.to_vec())),
            p: r.p(),
            d_top: r.d_top,
            d_spread: r.d_spread,
            mu: r.mu.iter().map(|z| [z.re, z.im]).collect(),
            ab: r.ab.to_vec(),
            fp: format!("{:016x}", r.fp),
        }
    }

    pub fn to_record(&self) -> std::result::Result<PrimitiveClassRecord, String> {
        let word = parse_word(&self.word).map_err(|e| e.to_string())?.into_letters();
        if word.len() != self.p {
            return Err(format!("p = {} but the word has length {}", self.p, word.len()));
        }
        let fp = u64::from_str_radix(&self.fp, 16).map_err(|_| format!("bad fingerprint {:?}", self.fp))?;
        Ok(PrimitiveClassRecord {
            word,
            d_top: self.d_top,
            d_spread: self.d_spread,
            mu: self.mu.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
            ab: self.ab.clone(),
            fp,
        })
    }
}

/// Streams a database to JSON lines: the header, then one record per line.
pub struct DatabaseWriter<W: Write> {
    w: W,
    records: u64,
}

impl<W: Write> DatabaseWriter<W> {
    pub fn new(mut w: W, header: &DatabaseHeader) -> std::io::Result<Self> {
        serde_json::to_writer(&mut w, header)?;
        w.write_all(b"\n")?;
        Ok(DatabaseWriter { w, records: 0 })
    }

    pub fn write(&mut self, r: RecordRef<'_>) -> std::io::Result<()> {
        serde_json::to_writer(&mut self.w, &RecordLine::from_record(r))?;
        self.w.write_all(b"\n")?;
        self.records += 1;
        Ok(())
    }

    pub fn records(&self) -> u64 {
        self.records
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.w.flush()?;
        Ok(self.w)
    }
}

pub fn save_database(path: &Path, meta: Meta, db: &OrbitDatabase) -> Result<()> {
    let io = |e| CliError::io(path, e);
    let mut w = DatabaseWriter::new(create(path)?, &DatabaseHeader::for_database(meta, db)).map_err(io)?;
    for r in db.iter() {
        w.write(r).map_err(io)?;
    }
    w.finish().map_err(io)?;
    Ok(())
}

/// Parses a database from any reader. When `expected_digest` is given the
/// header must carry it; every record is re-verified.
pub fn read_database(
    reader: impl BufRead,
    path: &Path,
    expected_digest: Option<&str>,
) -> Result<(DatabaseHeader, OrbitDatabase)> {
    let fmt = |line: usize, msg: String| CliError::Format { path: path.into(), line, msg };
    let mut lines = reader.lines();
    let first = lines.next().ok_or_else(|| fmt(1, "empty file".into()))?.map_err(|e| CliError::io(path, e))?;
    let header: DatabaseHeader = serde_json::from_str(&first).map_err(|e| fmt(1, e.to_string()))?;
    if header.format != DATABASE_FORMAT {
        return Err(fmt(1, format!("unknown format {:?}", header.format)));
    }
    if let Some(want) = expected_digest {
        if header.rep_digest != want {
            return Err(Error::Stale(format!(
                "database built for representation {} but {} was supplied",
                header.rep_digest, want
            ))
            .into());
        }
    }
    let mode = WeightMode::parse(&header.weight_mode).map_err(|e| fmt(1, e.to_string()))?;
    let mut db = OrbitDatabase::new(header.genus, header.d, header.cutoff.into(), mode, header.rep_digest.clone());
    for (k, line) in lines.enumerate() {
        let n = k + 2;
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RecordLine = serde_json::from_str(&line).map_err(|e| fmt(n, e.to_string()))?;
        let r = rec.to_record().map_err(|m| fmt(n, m))?;
        db.push(&r).map_err(|e| Error::Corrupt(format!("line {n}: {e}")))?;
    }
    db.verify()?;
    db.infer_complete_weight();
    Ok((header, db))
}

pub fn load_database(path: &Path, expected_digest: Option<&str>) -> Result<(DatabaseHeader, OrbitDatabase)> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_database(BufReader::new(f), path, expected_digest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use anosov_zeta_core::group::{CodingAutomaton, GroupPresentation};
    use anosov_zeta_core::orbit::{enumerate_primitive_classes, EnumerationOptions};
    use anosov_zeta_core::rep::Representation;

    fn small_db() -> OrbitDatabase {
        let p = GroupPresentation::surface(2).unwrap();
        let a = CodingAutomaton::build(&p, 4).unwrap();
        let r = Representation::fuchsian_octagon(2).unwrap();
        let opts = EnumerationOptions { rep_digest: "abc".into(), ..Default::default() };
        enumerate_primitive_classes(&a, &r, Cutoff::Length(3), &opts).unwrap()
    }

    fn to_bytes(db: &OrbitDatabase) -> Vec<u8> {
        let mut w = DatabaseWriter::new(Vec::new(), &DatabaseHeader::for_database(Meta::new("x"), db)).unwrap();
        for r in db.iter() {
            w.write(r).unwrap();
        }
        w.finish().unwrap()
    }

    #[test]
    fn save_then_load_is_identical() {
        let db = small_db();
        let bytes = to_bytes(&db);
        let (h, back) = read_database(&bytes[..], Path::new("mem"), Some("abc")).unwrap();
        assert_eq!(h.d, 2);
        assert_eq!(back, db);
    }

    #[test]
    fn tampered_weight_is_corruption() {
        let db = small_db();
        let text = String::from_utf8(to_bytes(&db)).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut rec: RecordLine = serde_json::from_str(&lines[3]).unwrap();
        rec.d_top *= 1.001;
        lines[3] = serde_json::to_string(&rec).unwrap();
        let tampered = lines.join("\n");
        let err = read_database(tampered.as_bytes(), Path::new("mem"), None).unwrap_err();
        assert!(matches!(err, CliError::Engine(Error::Corrupt(_))), "{err}");
    }

    #[test]
    fn other_representation_is_stale() {
        let bytes = to_bytes(&small_db());
        let err = read_database(&bytes[..], Path::new("mem"), Some("def")).unwrap_err();
        assert!(matches!(err, CliError::Engine(Error::Stale(_))));
    }

    #[test]
    fn garbage_line_reports_position() {
        let mut bytes = to_bytes(&small_db());
        bytes.extend_from_slice(b"{not json}\n");
        match read_database(&bytes[..], Path::new("mem"), None) {
            Err(CliError::Format { line, .. }) => assert_eq!(line, 8 + 24 + 112 + 2),
            other => panic!("{other:?}"),
        }
    }
}
