use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::selector::BoundingBox;

pub const ANNOTATION_HEADER: &str = "image_id,class_label,x0,y0,x1,y1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtObject {
    pub class_label: String,
    pub bbox: BoundingBox,
}

/// Ground-truth objects of one image. An empty object list is allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub image_id: String,
    pub objects: Vec<GtObject>,
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<Vec<GroundTruth>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(&text)
}

/// Parses `image_id,class_label,x0,y0,x1,y1` lines with inclusive corners.
///
/// Objects are grouped per image id in order of first appearance; boxes keep file order.
/// Blank lines and an optional header line are ignored.
pub fn parse_annotations(text: &str) -> Result<Vec<GroundTruth>> {
    let mut out: Vec<GroundTruth> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || (line_no == 1 && line == ANNOTATION_HEADER) {
            continue;
        }
        let err = |msg: String| Error::Annotation { line: line_no, msg };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(err(format!("expected 6 fields, found {}", fields.len())));
        }
        if fields[0].is_empty() {
            return Err(err("empty image_id".into()));
        }
        let mut coords = [0u32; 4];
        for (slot, text) in coords.iter_mut().zip(&fields[2..]) {
            *slot = text
                .parse()
                .map_err(|_| err(format!("non-integer coordinate {text:?}")))?;
        }
        let [x0, y0, x1, y1] = coords;
        if x1 <= x0 {
            return Err(err(format!("x1 ({x1}) must exceed x0 ({x0})")));
        }
        if y1 <= y0 {
            return Err(err(format!("y1 ({y1}) must exceed y0 ({y0})")));
        }
        let object = GtObject {
            class_label: fields[1].to_string(),
            bbox: BoundingBox::new(x0, y0, x1, y1),
        };
        let slot = *index.entry(fields[0].to_string()).or_insert_with(|| {
            out.push(GroundTruth {
                image_id: fields[0].to_string(),
                objects: Vec::new(),
            });
            out.len() - 1
        });
        out[slot].objects.push(object);
    }
    Ok(out)
}
