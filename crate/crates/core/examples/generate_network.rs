//! Random network generation, edge-list round trip and cluster unions.
//!
//! ```bash
//! cargo run --example generate_network
//! ```

use netdesign::netgraph::{compose_clusters, generate_random, load_edge_list, ClusterSet};

fn main() -> netdesign::Result<()> {
    let net = generate_random(50, 0.1, 7)?;
    println!(
        "n={} edges={} density={:.3} sum m={} sum m^2={}",
        net.n(),
        net.edge_count(),
        net.density(),
        net.degree_sum(),
        net.degree_square_sum()
    );

    let text = net.to_edge_list();
    let back = load_edge_list(&text)?;
    assert_eq!(back.edge_count(), net.edge_count());

    // Labels are kept in first-appearance order; comment lines are skipped.
    let ego = load_edge_list("# ego network\nalice bob\nbob carol\nalice carol\ncarol dave\n")?;
    println!("ego network degrees: {:?}", ego.degrees());

    let union = compose_clusters(&ClusterSet::new(vec![ego.clone(), ego])?)?;
    println!(
        "two copies: n={} labels={:?}",
        union.n(),
        union.labels().unwrap_or_default()
    );
    Ok(())
}
