use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monoid::BBox;
use crate::oracle::{BBoxResult, Element, OpenKind};

/// One signed decimal per line.
pub fn write_matches(mut out: impl Write, matches: &[i64]) -> Result<()> {
    for m in matches {
        writeln!(out, "{m}")?;
    }
    Ok(())
}

pub fn read_matches(text: &str) -> Result<Vec<i64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("bad match index `{}`", l.trim()),
            })
        })
        .collect()
}

/// A row of the bounding-box CSV.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBoxRow {
    pub index: usize,
    /// `clip`, `blend`, `leaf` or `end` for clipped boxes; `union` for the
    /// union recorded at an open.
    pub kind: String,
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
    pub empty: bool,
}

impl BBoxRow {
    fn new(index: usize, kind: &str, b: BBox) -> Self {
        let b = b.canonical();
        BBoxRow {
            index,
            kind: kind.to_string(),
            x0: b.x0,
            y0: b.y0,
            x1: b.x1,
            y1: b.y1,
            empty: b.is_empty(),
        }
    }
}

/// Rows for every element's clipped box, each open followed by its union.
pub fn bbox_rows(elems: &[Element], result: &BBoxResult) -> Vec<BBoxRow> {
    let mut rows = Vec::with_capacity(elems.len() * 3 / 2);
    for (i, e) in elems.iter().enumerate() {
        let kind = match e {
            Element::Open(OpenKind::Clip(_)) => "clip",
            Element::Open(OpenKind::Blend) => "blend",
            Element::Leaf(_) => "leaf",
            Element::Close => "end",
        };
        rows.push(BBoxRow::new(i, kind, result.clipped[i]));
        if let Some(u) = result.union_at_open[i] {
            rows.push(BBoxRow::new(i, "union", u));
        }
    }
    rows
}

/// CSV with header `index,kind,x0,y0,x1,y1,empty`. Empty boxes are written
/// as the canonical empty box.
pub fn write_bbox_csv(out: impl Write, elems: &[Element], result: &BBoxResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in bbox_rows(elems, result) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::seq_bbox;

    #[test]
    fn matches_round_trip() {
        let mut buf = Vec::new();
        write_matches(&mut buf, &[-1, 0, 1, 0]).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "-1\n0\n1\n0\n");
        assert_eq!(read_matches(std::str::from_utf8(&buf).unwrap()).unwrap(), [-1, 0, 1, 0]);
        assert!(matches!(read_matches("1\nx"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn bbox_csv() {
        let elems = [Element::blend(), Element::Leaf(BBox::new(1, 2, 3, 4)), Element::Close];
        let result = seq_bbox(&elems).unwrap();
        let mut buf = Vec::new();
        write_bbox_csv(&mut buf, &elems, &result).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,kind,x0,y0,x1,y1,empty");
        assert_eq!(lines[1], "0,blend,-2147483648,-2147483648,2147483647,2147483647,false");
        assert_eq!(lines[2], "0,union,1,2,3,4,false");
        assert_eq!(lines[3], "1,leaf,1,2,3,4,false");
        assert_eq!(lines.len(), 5);
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<BBoxRow> = r.deserialize().collect::<std::result::Result<_, _>>().unwrap();
        assert_eq!(rows, bbox_rows(&elems, &result));
    }
}
