//! Line-delimited annotation and detection records: one JSON object per
//! line, streamable and diff-able.
//!
//! Ground truth: `{"image_id", "width", "height", "segments": [[x1,y1,x2,y2], ...]}`
//! Detections:   `{"image_id", "x1", "y1", "x2", "y2", "score"}`
//!
//! Parsers reject NaN/infinite numbers (not representable in JSON), scores
//! outside `[0, 1]`, zero-length segments, and out-of-bounds endpoints.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use lseval_core::geom::{LineSegment, Point2};
use lseval_core::gtmaps::Annotation;
use lseval_core::metrics::Detection;

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize, Deserialize)]
struct AnnotationRecord {
    image_id: String,
    width: u32,
    height: u32,
    segments: Vec<[f64; 4]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DetectionRecord {
    image_id: String,
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
    score: f64,
}

fn read_lines(path: &Path) -> CliResult<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| CliError::parse(path, e.to_string()))?;
    let reader = BufReader::new(file);
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::parse(path, format!("line {}: {e}", i + 1)))?;
        if !line.trim().is_empty() {
            lines.push((i + 1, line));
        }
    }
    Ok(lines)
}

pub fn read_annotations(path: &Path) -> CliResult<Vec<Annotation>> {
    let mut annotations = Vec::new();
    for (lineno, line) in read_lines(path)? {
        let record: AnnotationRecord = serde_json::from_str(&line)
            .map_err(|e| CliError::parse(path, format!("line {lineno}: {e}")))?;
        let mut segments = Vec::with_capacity(record.segments.len());
        for (si, [x1, y1, x2, y2]) in record.segments.iter().copied().enumerate() {
            let seg = LineSegment::new(Point2::new(x1, y1), Point2::new(x2, y2), 1.0).map_err(
                |e| CliError::parse(path, format!("line {lineno}: segment {si}: {e}")),
            )?;
            segments.push(seg);
        }
        let ann = Annotation::new(record.image_id, record.width, record.height, segments)
            .map_err(|e| CliError::parse(path, format!("line {lineno}: {e}")))?;
        annotations.push(ann);
    }
    Ok(annotations)
}

pub fn write_annotations(path: &Path, annotations: &[Annotation]) -> CliResult<()> {
    let file = File::create(path).map_err(|source| CliError::OutputIo {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    for ann in annotations {
        let record = AnnotationRecord {
            image_id: ann.image_id.clone(),
            width: ann.width,
            height: ann.height,
            segments: ann
                .segments
                .iter()
                .map(|s| [s.start().x, s.start().y, s.end().x, s.end().y])
                .collect(),
        };
        let line = serde_json::to_string(&record).expect("record serializes");
        writeln!(w, "{line}").map_err(|source| CliError::OutputIo {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(())
}

pub fn read_detections(path: &Path) -> CliResult<Vec<Detection>> {
    let mut detections = Vec::new();
    for (lineno, line) in read_lines(path)? {
        let record: DetectionRecord = serde_json::from_str(&line)
            .map_err(|e| CliError::parse(path, format!("line {lineno}: {e}")))?;
        let segment = LineSegment::new(
            Point2::new(record.x1, record.y1),
            Point2::new(record.x2, record.y2),
            record.score,
        )
        .map_err(|e| CliError::parse(path, format!("line {lineno}: {e}")))?;
        detections.push(Detection {
            image_id: record.image_id,
            segment,
        });
    }
    Ok(detections)
}

pub fn write_detections(path: &Path, detections: &[Detection]) -> CliResult<()> {
    let file = File::create(path).map_err(|source| CliError::OutputIo {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    for det in detections {
        let record = DetectionRecord {
            image_id: det.image_id.clone(),
            x1: det.segment.start().x,
            y1: det.segment.start().y,
            x2: det.segment.end().x,
            y2: det.segment.end().y,
            score: det.segment.confidence(),
        };
        let line = serde_json::to_string(&record).expect("record serializes");
        writeln!(w, "{line}").map_err(|source| CliError::OutputIo {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_file(name: &str, content: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("lseval-records-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        let mut f = File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn annotation_roundtrip() {
        let ann = Annotation::new(
            "img-1".into(),
            320,
            240,
            vec![
                LineSegment::new(Point2::new(1.0, 2.0), Point2::new(31.5, 4.25), 1.0).unwrap(),
            ],
        )
        .unwrap();
        let dir = std::env::temp_dir().join(format!("lseval-records-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("gt.jsonl");
        write_annotations(&path, std::slice::from_ref(&ann)).unwrap();
        let back = read_annotations(&path).unwrap();
        assert_eq!(back, vec![ann]);
    }

    #[test]
    fn detection_score_out_of_range_rejected() {
        let path = tmp_file(
            "bad-score.jsonl",
            r#"{"image_id":"a","x1":0,"y1":0,"x2":5,"y2":5,"score":1.5}"#,
        );
        let err = read_detections(&path).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn nan_rejected_by_json() {
        let path = tmp_file(
            "nan.jsonl",
            r#"{"image_id":"a","x1":NaN,"y1":0,"x2":5,"y2":5,"score":0.5}"#,
        );
        assert!(read_detections(&path).is_err());
    }

    #[test]
    fn degenerate_segment_rejected_with_line_number() {
        let path = tmp_file(
            "degenerate.jsonl",
            "{\"image_id\":\"a\",\"x1\":0,\"y1\":0,\"x2\":5,\"y2\":5,\"score\":0.5}\n{\"image_id\":\"a\",\"x1\":3,\"y1\":3,\"x2\":3,\"y2\":3,\"score\":0.5}",
        );
        let err = read_detections(&path).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn out_of_bounds_annotation_rejected() {
        let path = tmp_file(
            "oob.jsonl",
            r#"{"image_id":"a","width":10,"height":10,"segments":[[0,0,11,5]]}"#,
        );
        assert!(read_annotations(&path).is_err());
    }

    #[test]
    fn blank_lines_are_skipped() {
        let path = tmp_file(
            "blank.jsonl",
            "\n{\"image_id\":\"a\",\"width\":10,\"height\":10,\"segments\":[]}\n\n",
        );
        assert_eq!(read_annotations(&path).unwrap().len(), 1);
    }
}
