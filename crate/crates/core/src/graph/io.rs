//! Edge-list and labeling text formats.
//!
//! Edge lists start with a `n m` header followed by one `u v` pair per line
//! (0-based ids). Labelings are one `v label` pair per line.

use std::io::{self, BufRead, Write};

use super::{Graph, GraphError, Labeling, VertexId};

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    writeln!(out, "{} {}", g.n(), g.m())?;
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

fn parse_pair<T: std::str::FromStr>(line: &str, lineno: usize) -> Result<(T, T), GraphError> {
    let mut it = line.split_whitespace();
    let err = || GraphError::Parse(format!("line {lineno}: expected two integers"));
    let a = it.next().ok_or_else(err)?.parse().map_err(|_| err())?;
    let b = it.next().ok_or_else(err)?.parse().map_err(|_| err())?;
    if it.next().is_some() {
        return Err(err());
    }
    Ok((a, b))
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph, GraphError> {
    let mut lines = input
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
    let (_, header) = lines
        .next()
        .ok_or_else(|| GraphError::Parse("missing `n m` header".into()))?;
    let header = header.map_err(|e| GraphError::Parse(e.to_string()))?;
    let (n, m): (usize, usize) = parse_pair(&header, 1)?;
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines {
        let line = line.map_err(|e| GraphError::Parse(e.to_string()))?;
        edges.push(parse_pair::<VertexId>(&line, i + 1)?);
    }
    if edges.len() != m {
        return Err(GraphError::Parse(format!(
            "header announces {m} edges, found {}",
            edges.len()
        )));
    }
    Graph::new(n, edges)
}

pub fn write_labeling<W: Write>(labels: &Labeling, mut out: W) -> io::Result<()> {
    for (v, l) in labels.as_slice().iter().enumerate() {
        writeln!(out, "{v} {l}")?;
    }
    Ok(())
}

/// Reads `v label` lines; every vertex `0..n` must appear exactly once.
pub fn read_labeling<R: BufRead>(input: R) -> Result<Labeling, GraphError> {
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| GraphError::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        pairs.push(parse_pair(&line, i + 1)?);
    }
    let mut labels = vec![None; pairs.len()];
    for (v, l) in pairs {
        let slot = labels
            .get_mut(v as usize)
            .ok_or(GraphError::VertexOutOfRange { vertex: v, n: 0 })?;
        if slot.replace(l).is_some() {
            return Err(GraphError::Parse(format!("vertex {v} labeled twice")));
        }
    }
    Ok(Labeling::new(labels.into_iter().map(Option::unwrap).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_format() {
        let g = Graph::new(3, [(2, 1), (0, 1)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "3 2\n0 1\n1 2\n");
        assert_eq!(read_edge_list(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn edge_list_errors() {
        assert!(read_edge_list("".as_bytes()).is_err());
        assert!(read_edge_list("3 2\n0 1\n".as_bytes()).is_err());
        assert!(read_edge_list("3 1\n0 x\n".as_bytes()).is_err());
        assert!(read_edge_list("3 1\n0 3\n".as_bytes()).is_err());
    }

    #[test]
    fn labeling_format() {
        let l = Labeling::new(vec![4, 4, 9]);
        let mut buf = Vec::new();
        write_labeling(&l, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "0 4\n1 4\n2 9\n");
        assert_eq!(read_labeling(buf.as_slice()).unwrap(), l);
        assert!(read_labeling("0 1\n0 2\n".as_bytes()).is_err());
        assert!(read_labeling("0 1\n5 2\n".as_bytes()).is_err());
    }
}
