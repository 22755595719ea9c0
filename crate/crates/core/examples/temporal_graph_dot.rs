//! Temporal relations of the nested-dialogue fixture, as statements and as
//! Graphviz DOT (pipe into `dot -Tsvg`).

use cineparse::clustering::cluster_document;
use cineparse::synth::{presets, synthesize};
use cineparse::temporal::{build_tcg, to_dag};

fn main() -> cineparse::Result<()> {
    let (doc, _) = synthesize(&presets::nested_dialogue())?;
    let tcg = build_tcg(&cluster_document(&doc, 0.1)?, &doc);
    for edge in &tcg.edges {
        eprintln!("{:<18} {}", edge.statement(), edge.relation.label());
    }
    let dag = to_dag(&tcg, doc.end_frame())?;
    print!("{}", dag.to_dot());
    Ok(())
}
