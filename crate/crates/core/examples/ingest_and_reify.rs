//! Reads n-ary facts, reifies them into hub triples and projects the
//! informed and uninformed entity graphs.

use kgbench::kg::{project_graph, GraphMode, KnowledgeGraph, Reifier, Split};

const FACTS: &str = "\
% toy prescriptions
drug(d1, p1, q1).
drug(d2, p1, q2).
drug(d1, p2, q1).
patient(p1, f).
patient(p2, m).
smoker(p2).
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut kg = KnowledgeGraph::new();
    let mut reifier = Reifier::with_unary_value("true");
    let stats = kg.ingest_hyperfacts(FACTS.as_bytes(), Split::Train, &mut reifier)?;
    println!("{} triples from {} facts", stats.added, FACTS.lines().filter(|l| l.ends_with('.')).count());
    for t in kg.triples(Split::Train) {
        println!("  {}", kg.display(t));
    }
    for name in kg.load_attribute_schema("patient\nsmoker\n".as_bytes())? {
        println!("unused attribute relation {name}");
    }
    for mode in [GraphMode::Informed, GraphMode::Uninformed] {
        let g = project_graph(&kg, mode);
        println!("{mode:?}: {} nodes, {} edges", g.num_nodes(), g.num_edges());
    }
    Ok(())
}
