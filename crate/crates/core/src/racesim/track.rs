use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const FORZA_ANALOG: &str = include_str!("../../tracks/forza-analog.track");
const OVAL_500: &str = include_str!("../../tracks/oval-500.track");

/// Names accepted by [`Track::bundled`].
pub const BUNDLED: [&str; 2] = ["forza-analog", "oval-500"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub length: f64,
    /// Signed curvature in 1/m; 0 is straight.
    pub curvature: f64,
}

/// A closed track as an ordered list of constant-curvature segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    segments: Vec<Segment>,
    /// Cumulative start position of each segment.
    starts: Vec<f64>,
    total_length: f64,
    width: Option<f64>,
}

impl Track {
    pub fn new(segments: Vec<Segment>, width: Option<f64>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Validation("track has no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.length > 0.0 && s.length.is_finite()) {
                return Err(Error::Validation(format!(
                    "segment {} has nonpositive length {}",
                    i + 1,
                    s.length
                )));
            }
            if !s.curvature.is_finite() {
                return Err(Error::Validation(format!("segment {} has non-finite curvature", i + 1)));
            }
        }
        if let Some(w) = width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Validation(format!("track width must be positive, got {w}")));
            }
        }
        let mut starts = Vec::with_capacity(segments.len());
        let mut total = 0.0;
        for s in &segments {
            starts.push(total);
            total += s.length;
        }
        Ok(Self {
            segments,
            starts,
            total_length: total,
            width,
        })
    }

    /// Parses `length curvature` lines. `#` starts a comment, and a
    /// `# width: <m>` comment sets the width.
    pub fn parse(text: &str) -> Result<Self> {
        let mut segments = Vec::new();
        let mut width = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let (body, comment) = match raw.find('#') {
                Some(p) => (&raw[..p], Some(&raw[p + 1..])),
                None => (raw, None),
            };
            if let Some(c) = comment {
                if let Some(v) = c.trim().strip_prefix("width:") {
                    let w = v.trim().parse::<f64>().map_err(|e| Error::Parse {
                        line: line_no,
                        message: format!("bad width: {e}"),
                    })?;
                    width = Some(w);
                }
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `length curvature`, found {} fields", fields.len()),
                });
            }
            let num = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("`{s}`: {e}"),
                })
            };
            let length = num(fields[0])?;
            let curvature = num(fields[1])?;
            if !(length > 0.0) {
                return Err(Error::Validation(format!(
                    "line {line_no}: segment length must be positive, got {length}"
                )));
            }
            segments.push(Segment { length, curvature });
        }
        Self::new(segments, width)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(w) = self.width {
            let _ = writeln!(out, "# width: {w}");
        }
        for s in &self.segments {
            let _ = writeln!(out, "{} {}", s.length, s.curvature);
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    /// One of the tracks shipped with the crate (see [`BUNDLED`]).
    pub fn bundled(name: &str) -> Result<Self> {
        match name {
            "forza-analog" => Self::parse(FORZA_ANALOG),
            "oval-500" => Self::parse(OVAL_500),
            other => Err(Error::invalid(format!(
                "unknown bundled track `{other}` (available: {})",
                BUNDLED.join(", ")
            ))),
        }
    }

    /// A bundled track name or a path to a track file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if BUNDLED.contains(&name_or_path) {
            Self::bundled(name_or_path)
        } else {
            Self::load(Path::new(name_or_path))
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn width(&self) -> Option<f64> {
        self.width
    }

    /// Index of the segment containing arc position `s`, clamped to the
    /// first and last segment.
    pub fn segment_index(&self, s: f64) -> usize {
        self.starts.partition_point(|&start| start <= s).saturating_sub(1)
    }

    pub fn curvature_at(&self, s: f64) -> f64 {
        self.segments[self.segment_index(s)].curvature
    }

    pub(crate) fn segment_end(&self, index: usize) -> f64 {
        self.starts[index] + self.segments[index].length
    }
}
