use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::executor::{Executor, PartitionConfig};
use crate::monoid::BBox;
use crate::oracle::{Element, OpenKind, ParenSeq};

use super::compact_structure;

/// Largest coordinate magnitude a scene file may use.
pub const COORD_LIMIT: i32 = 1 << 30;

/// One record of a scene file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SceneRecord {
    Clip(BBox),
    Blend,
    End,
    Leaf(BBox),
    /// A drawing command with no structural meaning, kept verbatim.
    Draw(String),
}

impl SceneRecord {
    /// The element for a structural record.
    pub fn element(&self) -> Option<Element> {
        match self {
            SceneRecord::Clip(b) => Some(Element::clip(*b)),
            SceneRecord::Blend => Some(Element::blend()),
            SceneRecord::End => Some(Element::Close),
            SceneRecord::Leaf(b) => Some(Element::Leaf(*b)),
            SceneRecord::Draw(_) => None,
        }
    }

    pub fn from_element(e: &Element) -> Self {
        match e {
            Element::Open(OpenKind::Clip(b)) => SceneRecord::Clip(*b),
            Element::Open(OpenKind::Blend) => SceneRecord::Blend,
            Element::Close => SceneRecord::End,
            Element::Leaf(b) => SceneRecord::Leaf(*b),
        }
    }
}

/// Records of a scene file with the line each came from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scene {
    pub records: Vec<SceneRecord>,
    /// 1-based source line of every record.
    pub lines: Vec<usize>,
}

impl Scene {
    pub fn from_elements(elems: &[Element]) -> Self {
        Scene {
            records: elems.iter().map(SceneRecord::from_element).collect(),
            lines: Vec::new(),
        }
    }
}

/// A parsed scene: the structural elements and, for each, its source line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedScene {
    pub seq: ParenSeq,
    pub lines: Vec<usize>,
}

fn parse_box(fields: &[&str], line: usize) -> Result<BBox> {
    if fields.len() != 4 {
        return Err(Error::Parse {
            line,
            message: format!("expected 4 coordinates, got {}", fields.len()),
        });
    }
    let mut c = [0i32; 4];
    for (slot, f) in c.iter_mut().zip(fields) {
        let v: i32 = f.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad coordinate `{f}`"),
        })?;
        if !(-COORD_LIMIT..=COORD_LIMIT).contains(&v) {
            return Err(Error::Parse {
                line,
                message: format!("coordinate {v} outside ±2^30"),
            });
        }
        *slot = v;
    }
    Ok(BBox::new(c[0], c[1], c[2], c[3]))
}

/// Reads the records of a scene file.
///
/// One record per line: `clip x0 y0 x1 y1`, `blend`, `end`,
/// `leaf x0 y0 x1 y1` or `draw ...`. A line made only of `(` and `)` is a run
/// of blends and ends. `#` starts a comment.
pub fn parse_records(text: &str) -> Result<Scene> {
    let mut scene = Scene::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut push = |r| {
            scene.records.push(r);
            scene.lines.push(line);
        };
        if body.starts_with(['(', ')']) {
            for c in body.chars().filter(|c| !c.is_whitespace()) {
                match c {
                    '(' => push(SceneRecord::Blend),
                    ')' => push(SceneRecord::End),
                    other => {
                        return Err(Error::Parse {
                            line,
                            message: format!("unexpected `{other}` in paren run"),
                        })
                    }
                }
            }
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let record = match fields[0] {
            "clip" => SceneRecord::Clip(parse_box(&fields[1..], line)?),
            "leaf" => SceneRecord::Leaf(parse_box(&fields[1..], line)?),
            "blend" | "end" if fields.len() > 1 => {
                return Err(Error::Parse {
                    line,
                    message: format!("`{}` takes no arguments", fields[0]),
                })
            }
            "blend" => SceneRecord::Blend,
            "end" => SceneRecord::End,
            "draw" => SceneRecord::Draw(body["draw".len()..].trim().to_string()),
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown record `{other}`"),
                })
            }
        };
        push(record);
    }
    Ok(scene)
}

/// Parses a scene file and extracts its structural elements by parallel
/// stream compaction.
pub fn parse_scene(text: &str) -> Result<ParsedScene> {
    let scene = parse_records(text)?;
    let exec = Executor::default();
    let cfg = PartitionConfig::new(256, 4)?;
    let (elems, map) = compact_structure(&exec, &scene.records, cfg)?;
    let lines: Vec<usize> = map.iter().map(|&r| scene.lines[r as usize]).collect();
    let seq = ParenSeq::new(elems).map_err(|e| match e {
        Error::Underflow { position } => Error::SceneUnderflow { line: lines[position] },
        other => other,
    })?;
    Ok(ParsedScene { seq, lines })
}

/// Writes records one per line. Consecutive blends and ends are written as
/// paren runs of up to 64 characters.
pub fn serialize_records(records: &[SceneRecord]) -> String {
    let mut out = String::new();
    let mut run = String::new();
    let flush = |run: &mut String, out: &mut String| {
        if !run.is_empty() {
            out.push_str(run);
            out.push('\n');
            run.clear();
        }
    };
    for r in records {
        match r {
            SceneRecord::Blend | SceneRecord::End => {
                run.push(if *r == SceneRecord::Blend { '(' } else { ')' });
                if run.len() == 64 {
                    flush(&mut run, &mut out);
                }
                continue;
            }
            _ => flush(&mut run, &mut out),
        }
        match r {
            SceneRecord::Clip(b) => writeln!(out, "clip {} {} {} {}", b.x0, b.y0, b.x1, b.y1),
            SceneRecord::Leaf(b) => writeln!(out, "leaf {} {} {} {}", b.x0, b.y0, b.x1, b.y1),
            SceneRecord::Draw(s) if s.is_empty() => writeln!(out, "draw"),
            SceneRecord::Draw(s) => writeln!(out, "draw {s}"),
            SceneRecord::Blend | SceneRecord::End => unreachable!(),
        }
        .expect("writing to a String");
    }
    flush(&mut run, &mut out);
    out
}

/// Scene file text for an element sequence.
pub fn serialize_scene(elems: &[Element]) -> String {
    serialize_records(&Scene::from_elements(elems).records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let s = parse_scene("clip 0 0 10 10\nleaf 1 1 2 2\nend\n").unwrap();
        assert_eq!(
            s.seq.elements(),
            &[Element::clip(BBox::new(0, 0, 10, 10)), Element::Leaf(BBox::new(1, 1, 2, 2)), Element::Close]
        );
        assert_eq!(s.lines, [1, 2, 3]);
        assert!(matches!(parse_scene("end"), Err(Error::SceneUnderflow { line: 1 })));
        assert!(matches!(parse_scene("# x\nblend\n\nend\nend"), Err(Error::SceneUnderflow { line: 5 })));
    }

    #[test]
    fn draw_records_are_dropped() {
        let with = parse_scene("clip 0 0 4 4\ndraw a\ndraw b c\ndraw\nleaf 1 1 2 2 # note\nend").unwrap();
        let without = parse_scene("clip 0 0 4 4\nleaf 1 1 2 2\nend").unwrap();
        assert_eq!(with.seq, without.seq);
        assert_eq!(with.lines, [1, 5, 6]);
    }

    #[test]
    fn paren_runs() {
        let s = parse_scene("(()\n)").unwrap();
        assert_eq!(s.seq.to_parens(), "(())");
        assert_eq!(s.lines, [1, 1, 1, 2]);
    }

    #[test]
    fn parse_errors() {
        for (text, line) in [
            ("clip 0 0 1", 1),
            ("blend\nleaf 0 0 x 1", 2),
            ("frob", 1),
            ("end 3", 1),
            ("leaf 0 0 0 2000000000", 1),
            ("(.)", 1),
        ] {
            match parse_scene(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip() {
        let records = vec![
            SceneRecord::Blend,
            SceneRecord::Clip(BBox::new(-3, 4, 5, 6)),
            SceneRecord::Draw("circle 1 2".into()),
            SceneRecord::Leaf(BBox::new(0, 0, 0, 0)),
            SceneRecord::End,
            SceneRecord::Draw(String::new()),
            SceneRecord::End,
        ];
        let text = serialize_records(&records);
        assert_eq!(parse_records(&text).unwrap().records, records);
        let long: Vec<SceneRecord> = (0..150).map(|i| if i < 75 { SceneRecord::Blend } else { SceneRecord::End }).collect();
        assert_eq!(parse_records(&serialize_records(&long)).unwrap().records, long);
    }
}
