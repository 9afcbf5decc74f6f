//! Plain-text formats: edge lists, blow-up vertex labels, F_p^n density
//! functions, tricolor triples, and deletion traces. Everything round-trips
//! losslessly; floats are written in shortest form that parses back to the
//! same bits.

use std::fmt::Write as _;

use crate::arith::space::{DensityFunction, FpnSpace};
use crate::construct::Blowup;
use crate::graph::Graph;
use crate::removal::DeletionStep;
use crate::sumfree::TricolorTriple;
use crate::{Error, Result};

/// Non-empty lines with their 1-based numbers, comments (`#` to end of
/// line) stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            None
        } else {
            Some((i + 1, s))
        }
    })
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected {what}, got `{tok}`")))
}

// ---------------------------------------------------------------------------
// Edge lists: `n m` header, then m lines `u v`.
// ---------------------------------------------------------------------------

pub fn write_graph(g: &Graph) -> String {
    let edges = g.edges();
    let mut out = format!("{} {}\n", g.n(), edges.len());
    for (u, v) in edges {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `n m` header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(parse_err(
            hline,
            format!("header needs `n m`, got {} fields", toks.len()),
        ));
    }
    let n: usize = parse_num(toks[0], hline, "vertex count")?;
    let m: usize = parse_num(toks[1], hline, "edge count")?;
    let mut g = Graph::new(n);
    let mut last_line = hline;
    for (ln, s) in lines {
        last_line = ln;
        let t: Vec<&str> = s.split_whitespace().collect();
        if t.len() != 2 {
            return Err(parse_err(
                ln,
                format!("edge line needs `u v`, got {} fields", t.len()),
            ));
        }
        let u: usize = parse_num(t[0], ln, "vertex index")?;
        let v: usize = parse_num(t[1], ln, "vertex index")?;
        if u >= n || v >= n {
            return Err(parse_err(ln, format!("vertex out of range (n = {n})")));
        }
        if g.has_edge(u, v) {
            return Err(parse_err(ln, format!("duplicate edge {u} {v}")));
        }
        g.add_edge(u, v)
            .map_err(|e| parse_err(ln, e.to_string()))?;
    }
    if g.edge_count() != m {
        return Err(parse_err(
            last_line,
            format!("header promises {m} edges, file has {}", g.edge_count()),
        ));
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// Blow-up labels: the usual edge list plus `# label id base:bitstring`
// comment lines. The bitstring is least-significant-bit first: character j
// is the copy-j coordinate.
// ---------------------------------------------------------------------------

pub fn bitstring(bits: usize, m: usize) -> String {
    (0..m)
        .map(|j| if bits >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn write_blowup(bu: &Blowup) -> String {
    let g = bu.graph();
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for id in 0..g.n() {
        let (base, bits) = bu.label(id);
        writeln!(out, "# label {id} {base}:{}", bitstring(bits, bu.m())).unwrap();
    }
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// (vertex id, base vertex, bit pattern) for every `# label` line.
pub fn read_blowup_labels(text: &str) -> Result<Vec<(usize, usize, usize)>> {
    let mut labels = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let Some(rest) = raw.trim().strip_prefix("# label ") else {
            continue;
        };
        let toks: Vec<&str> = rest.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(ln, "label line needs `id base:bits`"));
        }
        let id: usize = parse_num(toks[0], ln, "vertex id")?;
        let (base_s, bits_s) = toks[1]
            .split_once(':')
            .ok_or_else(|| parse_err(ln, "label needs `base:bits`"))?;
        let base: usize = parse_num(base_s, ln, "base vertex")?;
        let mut bits = 0usize;
        for (j, c) in bits_s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << j,
                _ => return Err(parse_err(ln, format!("bad bit `{c}`"))),
            }
        }
        labels.push((id, base, bits));
    }
    Ok(labels)
}

// ---------------------------------------------------------------------------
// F_p^n points as base-p digit strings, most significant digit first.
// ---------------------------------------------------------------------------

pub fn format_point(space: &FpnSpace, x: usize) -> String {
    space
        .digits(x)
        .into_iter()
        .map(|d| char::from_digit(d as u32, 10).unwrap())
        .collect()
}

pub fn parse_point(space: &FpnSpace, tok: &str, line: usize) -> Result<usize> {
    let mut digits = Vec::with_capacity(space.n());
    for c in tok.chars() {
        let d = c
            .to_digit(10)
            .ok_or_else(|| parse_err(line, format!("bad digit `{c}` in `{tok}`")))?;
        digits.push(d as u8);
    }
    if digits.len() != space.n() {
        return Err(parse_err(
            line,
            format!("point `{tok}` needs {} digits", space.n()),
        ));
    }
    space
        .from_digits(&digits)
        .map_err(|e| parse_err(line, e.to_string()))
}

// ---------------------------------------------------------------------------
// Density functions: `p n` header, then either one `elements:` line
// (indicator) or one `point value` line per point of the space.
// ---------------------------------------------------------------------------

pub fn write_density(f: &DensityFunction) -> String {
    if f.is_indicator() {
        let space = f.space();
        let mut out = format!("{} {}\n", space.p(), space.n());
        let pts: Vec<String> = f
            .support()
            .into_iter()
            .map(|x| format_point(space, x))
            .collect();
        writeln!(out, "elements: {}", pts.join(" ")).unwrap();
        out
    } else {
        write_density_table(f)
    }
}

/// Table form regardless of shape; one line per point of the space.
pub fn write_density_table(f: &DensityFunction) -> String {
    let space = f.space();
    let mut out = format!("{} {}\n", space.p(), space.n());
    for x in space.points() {
        writeln!(out, "{} {}", format_point(space, x), f.value(x)).unwrap();
    }
    out
}

pub fn read_density(text: &str) -> Result<DensityFunction> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `p n` header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(parse_err(
            hline,
            format!("header needs `p n`, got {} fields", toks.len()),
        ));
    }
    let p: usize = parse_num(toks[0], hline, "prime")?;
    let n: usize = parse_num(toks[1], hline, "dimension")?;
    let space = FpnSpace::new(p, n).map_err(|e| parse_err(hline, e.to_string()))?;

    let mut rest = lines.peekable();
    if let Some(&(ln, s)) = rest.peek() {
        if let Some(list) = s.strip_prefix("elements:") {
            rest.next();
            if let Some((extra, _)) = rest.next() {
                return Err(parse_err(extra, "content after `elements:` line"));
            }
            let mut els = Vec::new();
            for tok in list.split_whitespace() {
                els.push(parse_point(&space, tok, ln)?);
            }
            return DensityFunction::indicator(&space, &els)
                .map_err(|e| parse_err(ln, e.to_string()));
        }
    }

    let mut values = vec![0.0f64; space.size()];
    let mut seen = vec![false; space.size()];
    let mut last_line = hline;
    for (ln, s) in rest {
        last_line = ln;
        let t: Vec<&str> = s.split_whitespace().collect();
        if t.len() != 2 {
            return Err(parse_err(
                ln,
                format!("value line needs `point value`, got {} fields", t.len()),
            ));
        }
        let x = parse_point(&space, t[0], ln)?;
        let v: f64 = parse_num(t[1], ln, "value")?;
        if !(0.0..=1.0).contains(&v) {
            return Err(parse_err(ln, format!("value {v} outside [0, 1]")));
        }
        if seen[x] {
            return Err(parse_err(ln, format!("point `{}` repeated", t[0])));
        }
        seen[x] = true;
        values[x] = v;
    }
    if let Some(x) = seen.iter().position(|&s| !s) {
        return Err(parse_err(
            last_line,
            format!("no value for point `{}`", format_point(&space, x)),
        ));
    }
    DensityFunction::new(&space, values).map_err(|e| parse_err(last_line, e.to_string()))
}

// ---------------------------------------------------------------------------
// Tricolor triples: `p n l` header, then three blocks of l points.
// ---------------------------------------------------------------------------

pub fn write_tricolor(t: &TricolorTriple) -> String {
    let s = t.space();
    let mut out = format!("{} {} {}\n", s.p(), s.n(), t.len());
    for (name, block) in [("x", t.x()), ("y", t.y()), ("z", t.z())] {
        writeln!(out, "# {name}").unwrap();
        for &pt in block {
            writeln!(out, "{}", format_point(s, pt)).unwrap();
        }
    }
    out
}

pub fn read_tricolor(text: &str) -> Result<TricolorTriple> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `p n l` header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(parse_err(
            hline,
            format!("header needs `p n l`, got {} fields", toks.len()),
        ));
    }
    let p: usize = parse_num(toks[0], hline, "prime")?;
    let n: usize = parse_num(toks[1], hline, "dimension")?;
    let l: usize = parse_num(toks[2], hline, "sequence length")?;
    let space = FpnSpace::new(p, n).map_err(|e| parse_err(hline, e.to_string()))?;

    let mut points = Vec::with_capacity(3 * l);
    let mut last_line = hline;
    for (ln, s) in lines {
        last_line = ln;
        if points.len() == 3 * l {
            return Err(parse_err(ln, format!("more than 3·l = {} points", 3 * l)));
        }
        points.push(parse_point(&space, s, ln)?);
    }
    if points.len() != 3 * l {
        return Err(parse_err(
            last_line,
            format!("expected 3·l = {} points, found {}", 3 * l, points.len()),
        ));
    }
    let z = points.split_off(2 * l);
    let y = points.split_off(l);
    TricolorTriple::new(&space, points, y, z).map_err(|e| parse_err(last_line, e.to_string()))
}

// ---------------------------------------------------------------------------
// Deletion traces: one `step u v beta threshold` record per deleted edge.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub edge: (usize, usize),
    pub beta: f64,
    pub threshold: f64,
}

impl From<&DeletionStep> for TraceRecord {
    fn from(s: &DeletionStep) -> Self {
        TraceRecord {
            step: s.step,
            edge: s.edge,
            beta: s.beta,
            threshold: s.threshold,
        }
    }
}

pub fn write_trace(steps: &[DeletionStep]) -> String {
    let mut out = String::new();
    for s in steps {
        writeln!(
            out,
            "{} {} {} {} {}",
            s.step, s.edge.0, s.edge.1, s.beta, s.threshold
        )
        .unwrap();
    }
    out
}

pub fn read_trace(text: &str) -> Result<Vec<TraceRecord>> {
    let mut records = Vec::new();
    for (ln, s) in content_lines(text) {
        let t: Vec<&str> = s.split_whitespace().collect();
        if t.len() != 5 {
            return Err(parse_err(
                ln,
                format!("record needs `step u v beta threshold`, got {} fields", t.len()),
            ));
        }
        records.push(TraceRecord {
            step: parse_num(t[0], ln, "step")?,
            edge: (
                parse_num(t[1], ln, "vertex index")?,
                parse_num(t[2], ln, "vertex index")?,
            ),
            beta: parse_num(t[3], ln, "beta")?,
            threshold: parse_num(t[4], ln, "threshold")?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::partial_binary_blowup;
    use crate::graph::Pattern;
    use crate::removal::greedy_bounded_codegree;
    use crate::sumfree::{tricolor_search, TricolorSearchMode};

    #[test]
    fn graph_round_trip_and_comment_stripping() {
        for g in [Graph::bowtie(), Graph::complete(5), Graph::new(3)] {
            let text = write_graph(&g);
            assert_eq!(read_graph(&text).unwrap(), g);
            // re-writing is byte-identical
            assert_eq!(write_graph(&read_graph(&text).unwrap()), text);
        }
        let decorated = "# a triangle\n3 3 # header\n\n0 1\n1 2 # last two\n0 2\n";
        assert_eq!(read_graph(decorated).unwrap(), Graph::complete(3));
    }

    #[test]
    fn graph_parse_errors_carry_line_numbers() {
        let cases: &[(&str, usize)] = &[
            ("", 1),
            ("3", 1),
            ("3 1\n0\n", 2),
            ("3 1\n0 x\n", 2),
            ("3 1\n0 5\n", 2),
            ("3 1\n1 1\n", 2),
            ("3 2\n0 1\n# pad\n0 1\n", 4),
            ("3 2\n0 1\n", 2),
        ];
        for (text, want) in cases {
            match read_graph(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, *want, "input {text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn blowup_labels_round_trip() {
        let pattern = Pattern::new(Graph::complete(3)).unwrap();
        let bu = partial_binary_blowup(&Graph::bowtie(), &pattern, None).unwrap();
        let text = write_blowup(&bu);
        let g = read_graph(&text).unwrap();
        assert_eq!(&g, bu.graph());
        let labels = read_blowup_labels(&text).unwrap();
        assert_eq!(labels.len(), bu.graph().n());
        for (id, base, bits) in labels {
            assert_eq!(bu.label(id), (base, bits));
            assert_eq!(bu.vertex_id(base, bits), id);
        }
    }

    #[test]
    fn bitstring_is_lsb_first() {
        assert_eq!(bitstring(2, 2), "01");
        assert_eq!(bitstring(1, 2), "10");
        assert_eq!(bitstring(5, 4), "1010");
    }

    #[test]
    fn density_round_trips() {
        let space = FpnSpace::new(3, 2).unwrap();
        let ind = DensityFunction::indicator(&space, &[0, 4, 8]).unwrap();
        let compact = write_density(&ind);
        assert!(compact.contains("elements: 00 11 22"));
        assert_eq!(read_density(&compact).unwrap(), ind);

        // compact -> table -> compact is lossless and returns to compact form
        let table = write_density_table(&ind);
        let back = read_density(&table).unwrap();
        assert_eq!(back, ind);
        assert_eq!(write_density(&back), compact);

        // a non-indicator keeps exact bits through the text form
        let vals = vec![0.0, 0.1 + 0.2, 0.25, 1.0, 0.5, 1.0 / 3.0, 0.0, 0.7, 0.9];
        let f = DensityFunction::new(&space, vals).unwrap();
        let text = write_density(&f);
        assert_eq!(read_density(&text).unwrap(), f);
    }

    #[test]
    fn density_parse_errors() {
        let cases: &[(&str, usize)] = &[
            ("", 1),
            ("4 2\nelements:\n", 1),
            ("3 2\nelements: 012\n", 2),
            ("3 2\nelements: 03\n", 2),
            ("3 2\nelements: 00\n00 1\n", 3),
            ("2 1\n0 0.5\n1 1.5\n", 3),
            ("2 1\n0 0.5\n0 0.5\n", 3),
            ("2 1\n0 0.5\n", 2),
        ];
        for (text, want) in cases {
            match read_density(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, *want, "input {text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn tricolor_round_trip() {
        let space = FpnSpace::new(3, 1).unwrap();
        let t = tricolor_search(&space, TricolorSearchMode::Exhaustive)
            .unwrap()
            .triple;
        let text = write_tricolor(&t);
        assert_eq!(read_tricolor(&text).unwrap(), t);
        assert_eq!(write_tricolor(&read_tricolor(&text).unwrap()), text);

        match read_tricolor("3 1 2\n0\n1\n2\n0\n1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected parse error, got {other:?}"),
        }
        match read_tricolor("3 1 1\n0\n1\n2\n0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn trace_round_trip_is_exact() {
        let run = greedy_bounded_codegree(&Graph::complete(12), 500.0, None).unwrap();
        assert!(!run.trace.is_empty());
        let text = write_trace(&run.trace);
        let records = read_trace(&text).unwrap();
        let expect: Vec<TraceRecord> = run.trace.iter().map(TraceRecord::from).collect();
        assert_eq!(records, expect);
        // floats survive bit-for-bit
        for (rec, step) in records.iter().zip(&run.trace) {
            assert_eq!(rec.beta.to_bits(), step.beta.to_bits());
            assert_eq!(rec.threshold.to_bits(), step.threshold.to_bits());
        }
    }
}
