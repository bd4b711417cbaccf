//! On-disk operation log.
//!
//! Line-based, versioned format. The first line is a header naming the
//! format and version; every following line is one record:
//!
//! ```text
//! mq-oplog v1
//! <timestamp> <thread> <kind> <key> <elem_id>
//! ```
//!
//! with `kind` one of `i` (insert), `d` (successful delete) or `f`
//! (failed delete).

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use multiqueue::{LogRecord, OpKind};
use thiserror::Error;

pub const LOG_HEADER: &str = "mq-oplog v1";

#[derive(Debug, Error)]
pub enum LogFileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad log header {0:?}, expected {LOG_HEADER:?}")]
    BadHeader(String),
    #[error("log line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub fn write_log<W: Write>(mut w: W, records: &[LogRecord]) -> io::Result<()> {
    writeln!(w, "{LOG_HEADER}")?;
    for r in records {
        let kind = match r.kind {
            OpKind::Insert => 'i',
            OpKind::DeleteSuccess => 'd',
            OpKind::DeleteFail => 'f',
        };
        writeln!(w, "{} {} {} {} {}", r.timestamp, r.thread, kind, r.key, r.elem_id)?;
    }
    Ok(())
}

pub fn read_log<R: BufRead>(r: R) -> Result<Vec<LogRecord>, LogFileError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| LogFileError::BadHeader(String::new()))?;
    if header.trim() != LOG_HEADER {
        return Err(LogFileError::BadHeader(header));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_ascii_whitespace();
        let mut next = |what: &str| {
            fields.next().ok_or_else(|| LogFileError::Parse {
                line: lineno,
                message: format!("missing {what}"),
            })
        };
        let parse_err = |what: &str| LogFileError::Parse {
            line: lineno,
            message: format!("malformed {what}"),
        };
        let timestamp: u64 = next("timestamp")?.parse().map_err(|_| parse_err("timestamp"))?;
        let thread: u32 = next("thread")?.parse().map_err(|_| parse_err("thread"))?;
        let kind = match next("kind")? {
            "i" => OpKind::Insert,
            "d" => OpKind::DeleteSuccess,
            "f" => OpKind::DeleteFail,
            other => {
                return Err(LogFileError::Parse {
                    line: lineno,
                    message: format!("unknown op kind {other:?}"),
                })
            }
        };
        let key: u32 = next("key")?.parse().map_err(|_| parse_err("key"))?;
        let elem_id: u64 = next("elem id")?.parse().map_err(|_| parse_err("elem id"))?;
        records.push(LogRecord {
            timestamp,
            thread,
            kind,
            key,
            elem_id,
        });
    }
    Ok(records)
}

pub fn write_log_file<P: AsRef<Path>>(path: P, records: &[LogRecord]) -> io::Result<()> {
    write_log(BufWriter::new(File::create(path)?), records)
}

pub fn read_log_file<P: AsRef<Path>>(path: P) -> Result<Vec<LogRecord>, LogFileError> {
    read_log(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let records = vec![
            LogRecord {
                timestamp: 10,
                thread: 0,
                kind: OpKind::Insert,
                key: 42,
                elem_id: 7,
            },
            LogRecord {
                timestamp: 11,
                thread: 1,
                kind: OpKind::DeleteSuccess,
                key: 42,
                elem_id: 7,
            },
            LogRecord {
                timestamp: 12,
                thread: 1,
                kind: OpKind::DeleteFail,
                key: 0,
                elem_id: 0,
            },
        ];
        let mut buf = Vec::new();
        write_log(&mut buf, &records).unwrap();
        assert_eq!(read_log(&buf[..]).unwrap(), records);
    }

    #[test]
    fn rejects_wrong_header() {
        let res = read_log("mq-oplog v9\n1 0 i 1 1\n".as_bytes());
        assert!(matches!(res, Err(LogFileError::BadHeader(_))));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let res = read_log(format!("{LOG_HEADER}\n1 0 x 1 1\n").as_bytes());
        match res {
            Err(LogFileError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
