use monadcoh::verify::{run, Options};

#[test]
fn quick_run_passes_and_is_reproducible() {
    let o = Options { seed: 3, quick: true };
    let a = run(&o);
    let text = a.to_text();
    assert!(a.passed(), "{text}");
    assert_eq!(a.criteria.len(), 10);
    assert_eq!(run(&o).to_text(), text);
}

#[test]
fn seed_changes_only_sampled_details() {
    let a = run(&Options { seed: 0, quick: true });
    let b = run(&Options { seed: 1, quick: true });
    assert!(a.passed(), "{}", a.to_text());
    assert!(b.passed(), "{}", b.to_text());
    assert_eq!(a.criteria[2], b.criteria[2]);
}
