//! Plain-text edge lists: a `# nodes=<N>` header, then one `i j` pair per
//! line with `i < j`, 0-based.

use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# nodes={}", g.node_count())?;
    for (i, j) in g.edges() {
        writeln!(out, "{i} {j}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads an edge list. Later `#` lines and blank lines are ignored; pairs may
/// appear in either orientation.
pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines().enumerate();
    let node_count = loop {
        let Some((idx, line)) = lines.next() else {
            return Err(Error::EdgeList {
                line: 1,
                message: "missing `# nodes=<N>` header".into(),
            });
        };
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let count = trimmed
            .strip_prefix('#')
            .map(str::trim)
            .and_then(|h| h.strip_prefix("nodes="))
            .and_then(|v| v.trim().parse::<usize>().ok());
        match count {
            Some(c) => break c,
            None => {
                return Err(Error::EdgeList {
                    line: idx + 1,
                    message: format!("expected `# nodes=<N>` header, found `{trimmed}`"),
                })
            }
        }
    };

    let mut edges = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::EdgeList {
            line: idx + 1,
            message,
        };
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad(format!("expected two node indices, found `{trimmed}`")));
        };
        let a: usize = a.parse().map_err(|_| bad(format!("bad node index `{a}`")))?;
        let b: usize = b.parse().map_err(|_| bad(format!("bad node index `{b}`")))?;
        edges.push((a, b));
    }
    Graph::from_edges(node_count, edges)
}
