use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{Ontology, OntologyBuilder};
use crate::error::{Error, Result};

/// Loads a `child<TAB>parent` edge list. Blank lines and lines starting with
/// `#` are ignored; duplicate edges collapse.
pub fn load_taxonomy(path: &Path) -> Result<Ontology> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut b = OntologyBuilder::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        let [child, parent] = fields.as_slice() else {
            return Err(Error::malformed(path, i + 1, "expected `child<TAB>parent`"));
        };
        let (child, parent) = (child.trim(), parent.trim());
        if child.is_empty() || parent.is_empty() {
            return Err(Error::malformed(path, i + 1, "empty node name"));
        }
        if child == parent {
            return Err(Error::malformed(path, i + 1, format!("self-loop on `{child}`")));
        }
        b.add_edge(child, parent)?;
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn two_lines_three_nodes() {
        let f = file("dog.n.01\tcanine.n.02\ncanine.n.02\tcarnivore.n.01\n");
        let o = load_taxonomy(f.path()).unwrap();
        assert_eq!((o.len(), o.edge_count()), (3, 2));
        assert_eq!(o.senses("dog").len(), 1);
    }

    #[test]
    fn self_loop_is_an_error() {
        let f = file("a\tb\nx\tx\n");
        assert!(matches!(load_taxonomy(f.path()), Err(Error::Malformed { line: 2, .. })));
    }

    #[test]
    fn malformed_and_cyclic_lines() {
        let f = file("just-one-field\n");
        assert!(matches!(load_taxonomy(f.path()), Err(Error::Malformed { line: 1, .. })));
        let f = file("a\tb\nb\ta\n");
        assert!(matches!(load_taxonomy(f.path()), Err(Error::Cycle { .. })));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let f = file("a\tb\na\tb\n\n# comment\n");
        assert_eq!(load_taxonomy(f.path()).unwrap().edge_count(), 1);
    }
}
