use std::collections::BTreeMap;
use std::io::BufRead;

use crate::ec::{Background, Interpretation};
use crate::error::{Error, Result};
use crate::logic::{parse_atom, Literal};

/// All atoms stamped with one time point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Frame {
    pub time: i64,
    pub atoms: Vec<Literal>,
}

struct Split {
    time: i64,
    narrative: Vec<Literal>,
    annotation: Vec<Literal>,
    derived: Vec<Literal>,
}

/// Pairs consecutive frames into interpretations. Derived atoms are
/// computed once per frame and shared by the two windows it belongs to.
pub struct Windower {
    bg: Background,
    prev: Option<Split>,
    next_id: u64,
}

impl Windower {
    pub fn new(bg: Background) -> Windower {
        Windower { bg, prev: None, next_id: 0 }
    }

    pub fn background(&self) -> &Background {
        &self.bg
    }

    /// Frames must arrive in strictly increasing time order.
    pub fn push(&mut self, frame: Frame) -> Result<Option<Interpretation>> {
        let (annotation, narrative): (Vec<_>, Vec<_>) = frame.atoms.into_iter().partition(|l| self.bg.is_annotation(l));
        let derived = self.bg.derive(&narrative, frame.time);
        let cur = Split { time: frame.time, narrative, annotation, derived };
        let out = match self.prev.take() {
            Some(p) if p.time + 1 == cur.time => {
                let join = |a: &[Literal], b: &[Literal]| a.iter().chain(b).cloned().collect::<Vec<_>>();
                let id = self.next_id;
                self.next_id += 1;
                Some(Interpretation::from_parts(
                    id,
                    p.time,
                    join(&p.narrative, &cur.narrative),
                    join(&p.derived, &cur.derived),
                    join(&p.annotation, &cur.annotation),
                    &self.bg,
                )?)
            }
            Some(p) if p.time >= cur.time => {
                return Err(Error::Config(format!("frame {} arrived after frame {}", cur.time, p.time)));
            }
            _ => None,
        };
        self.prev = Some(cur);
        Ok(out)
    }
}

/// Interpretations from frames already in time order.
pub fn window_frames(
    frames: impl IntoIterator<Item = Frame>,
    bg: Background,
) -> impl Iterator<Item = Result<Interpretation>> {
    let mut w = Windower::new(bg);
    frames.into_iter().filter_map(move |f| w.push(f).transpose())
}

/// Streaming reader over a fact file: one ground atom per line, `%`
/// comments, the time point of a fact being its last argument. Facts may
/// arrive out of order by at most `skew` time points.
pub struct StreamReader<R> {
    source_name: String,
    lines: std::io::Lines<R>,
    line_no: usize,
    skew: i64,
    pending: BTreeMap<i64, Vec<Literal>>,
    latest: Option<i64>,
    flushed: Option<i64>,
    ready: std::collections::VecDeque<Frame>,
    windower: Windower,
    done: bool,
}

pub const DEFAULT_SKEW: i64 = 2;

impl<R: BufRead> StreamReader<R> {
    pub fn new(source_name: &str, reader: R, bg: Background) -> StreamReader<R> {
        StreamReader {
            source_name: source_name.to_string(),
            lines: reader.lines(),
            line_no: 0,
            skew: DEFAULT_SKEW,
            pending: BTreeMap::new(),
            latest: None,
            flushed: None,
            ready: Default::default(),
            windower: Windower::new(bg),
            done: false,
        }
    }

    pub fn with_skew(mut self, skew: i64) -> Self {
        self.skew = skew.max(0);
        self
    }

    fn input_error(&self, message: String) -> Error {
        Error::Input { source_name: self.source_name.clone(), line: self.line_no, message }
    }

    fn accept(&mut self, text: &str) -> Result<()> {
        let body = text.split('%').next().unwrap_or("").trim();
        if body.is_empty() {
            return Ok(());
        }
        let lit = parse_atom(body).map_err(|e| self.input_error(e.to_string()))?;
        if !lit.is_ground() {
            return Err(self.input_error(format!("fact {lit} is not ground")));
        }
        let Some(time) = lit.time() else {
            return Err(self.input_error(format!("fact {lit} has no integer time argument")));
        };
        let latest = self.latest.map_or(time, |l| l.max(time));
        if time < latest - self.skew || self.flushed.is_some_and(|f| time <= f) {
            return Err(Error::StreamOrder { line: self.line_no, time, latest, skew: self.skew });
        }
        self.latest = Some(latest);
        self.pending.entry(time).or_default().push(lit);
        while let Some((&t, _)) = self.pending.first_key_value() {
            if t >= latest - self.skew {
                break;
            }
            let (t, atoms) = self.pending.pop_first().unwrap();
            self.flushed = Some(t);
            self.ready.push_back(Frame { time: t, atoms });
        }
        Ok(())
    }
}

impl<R: BufRead> Iterator for StreamReader<R> {
    type Item = Result<Interpretation>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(frame) = self.ready.pop_front() {
                match self.windower.push(frame) {
                    Ok(Some(i)) => return Some(Ok(i)),
                    Ok(None) => continue,
                    Err(e) => return Some(Err(e)),
                }
            }
            if self.done {
                return None;
            }
            match self.lines.next() {
                Some(Ok(line)) => {
                    self.line_no += 1;
                    if let Err(e) = self.accept(&line) {
                        self.done = true;
                        self.pending.clear();
                        return Some(Err(e));
                    }
                }
                Some(Err(e)) => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
                None => {
                    self.done = true;
                    while let Some((t, atoms)) = self.pending.pop_first() {
                        self.ready.push_back(Frame { time: t, atoms });
                    }
                }
            }
        }
    }
}

pub fn read_stream<R: BufRead>(source_name: &str, reader: R, bg: Background) -> StreamReader<R> {
    StreamReader::new(source_name, reader, bg)
}

pub fn write_frames<'a>(w: &mut impl std::io::Write, frames: impl IntoIterator<Item = &'a Frame>) -> Result<()> {
    for f in frames {
        for a in &f.atoms {
            writeln!(w, "{a}.")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_mode_bias;

    const TABLE_TWO: &str = "\
% Narrative for time 1
happensAt(walking(id1),1).
happensAt(walking(id2),1).
holdsAt(coords(id1,201,454),1).
holdsAt(coords(id2,230,440),1).
holdsAt(direction(id1,270),1).
holdsAt(direction(id2,270),1).

% Narrative for time 2
happensAt(walking(id1),2).
happensAt(walking(id2),2).
holdsAt(coords(id1,201,454),2).
holdsAt(coords(id2,227,440),2).
holdsAt(direction(id1,275),2).
holdsAt(direction(id2,278),2).
holdsAt(moving(id1,id2),2).
";

    fn bg() -> Background {
        let bias = parse_mode_bias(
            "modeh(initiatedAt(moving(+person,+person),+time))\n\
             modeb(happensAt(walking(+person),+time))\n\
             modeb(distanceLessThan(+person,+person,#dist,+time))\n\
             constants(dist,[25,34]).",
        )
        .unwrap();
        Background::from_bias(&bias, "moving")
    }

    fn read(text: &str) -> Result<Vec<Interpretation>> {
        read_stream("test", text.as_bytes(), bg()).collect()
    }

    #[test]
    fn table_two_is_one_interpretation() {
        let is = read(TABLE_TWO).unwrap();
        assert_eq!(is.len(), 1);
        assert_eq!(is[0].time, 1);
        assert_eq!(is[0].narrative.len(), 12);
        let ann: Vec<String> = is[0].annotation().iter().map(|l| l.to_string()).collect();
        assert_eq!(ann, vec!["holdsAt(moving(id1,id2),2)"]);
        // distance 32.2 at time 1, 29.2 at time 2: only the 34 threshold, both orders, both times
        assert_eq!(is[0].derived.len(), 4);
    }

    #[test]
    fn windowing() {
        assert!(read("happensAt(walking(a),1).").unwrap().is_empty());
        let is = read("happensAt(walking(a),1).\nhappensAt(walking(a),2).\nhappensAt(walking(a),3).").unwrap();
        assert_eq!(is.iter().map(|i| i.time).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(is.iter().map(|i| i.id).collect::<Vec<_>>(), vec![0, 1]);
        let gap = read("happensAt(walking(a),1).\nhappensAt(walking(a),2).\nhappensAt(walking(a),5).\nhappensAt(walking(a),6).").unwrap();
        assert_eq!(gap.iter().map(|i| i.time).collect::<Vec<_>>(), vec![1, 5]);
    }

    #[test]
    fn skew_tolerated_and_regression_rejected() {
        let ok = read("p(a,3).\np(a,1).\np(a,2).\np(a,4).").unwrap();
        assert_eq!(ok.len(), 3);
        let err = read("p(a,5).\np(a,6).\np(a,7).\np(a,8).\np(a,2).").unwrap_err();
        assert!(matches!(err, Error::StreamOrder { line: 5, time: 2, latest: 8, .. }), "{err}");
    }

    #[test]
    fn bad_lines_report_line_number() {
        let err = read("p(a,1).\n\n% fine\np(a,,2).").unwrap_err();
        assert!(matches!(err, Error::Input { line: 4, .. }), "{err}");
        let err = read("p(a,b).").unwrap_err();
        assert!(err.to_string().contains("no integer time"));
        let err = read("p(X,1).").unwrap_err();
        assert!(err.to_string().contains("not ground"));
    }

    #[test]
    fn windows_reproduce_input_facts() {
        let is = read(TABLE_TWO).unwrap();
        let mut all: Vec<String> = is
            .iter()
            .flat_map(|i| i.narrative.iter().cloned().chain(i.annotation()))
            .map(|l| l.to_string())
            .collect();
        all.sort();
        all.dedup();
        let mut input: Vec<String> = TABLE_TWO
            .lines()
            .filter(|l| !l.starts_with('%') && !l.trim().is_empty())
            .map(|l| l.trim_end_matches('.').to_string())
            .collect();
        input.sort();
        assert_eq!(all, input);
    }

    #[test]
    fn frames_round_trip_through_text() {
        let frames = vec![
            Frame { time: 1, atoms: vec![parse_atom("p(a,1)").unwrap()] },
            Frame { time: 2, atoms: vec![parse_atom("p(a,2)").unwrap(), parse_atom("holdsAt(moving(a,b),2)").unwrap()] },
        ];
        let mut buf = Vec::new();
        write_frames(&mut buf, &frames).unwrap();
        let from_text = read(std::str::from_utf8(&buf).unwrap()).unwrap();
        let direct: Vec<Interpretation> = window_frames(frames, bg()).collect::<Result<_>>().unwrap();
        assert_eq!(from_text.len(), 1);
        assert_eq!(from_text[0].narrative, direct[0].narrative);
        assert_eq!(from_text[0].holds_next, direct[0].holds_next);
    }
}
