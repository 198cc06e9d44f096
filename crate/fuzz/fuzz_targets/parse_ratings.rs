#![no_main]

use cosra::{build_graph, parse_ratings, FormatSpec};
use libfuzzer_sys::fuzz_target;

// First byte picks the layout and threshold, the rest is the file body.
fuzz_target!(|data: &[u8]| {
    let Some((&selector, body)) = data.split_first() else { return };
    let format = match selector % 3 {
        0 => FormatSpec::movielens(),
        1 => FormatSpec::movielens_1m(),
        _ => "delimited(sep=whitespace;cols=uor;min=1;max=10;header=1)".parse().unwrap(),
    };
    let threshold = format.scale.min + f64::from(selector / 3 % 4);
    let Ok(records) = parse_ratings(body, &format) else { return };
    for r in &records {
        assert!(format.scale.contains(r.rating));
    }
    let Ok(graph) = build_graph(&records, threshold) else { return };
    assert_eq!(graph.user_degrees().iter().sum::<usize>(), graph.num_links());
    assert_eq!(graph.object_degrees().iter().sum::<usize>(), graph.num_links());
    assert!(graph.num_links() <= records.len());
});
