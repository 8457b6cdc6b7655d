use eulerint_cli::{run_with, SEED_ENV};

fn zoo_json(seed: &str) -> String {
    let argv = ["eulerint", "--json", "zoo", "--only", "complex", "--seed", seed].map(String::from).to_vec();
    let mut out = Vec::new();
    assert_eq!(run_with(argv, &mut out, &mut Vec::new()), 0);
    String::from_utf8(out).unwrap()
}

// Sole test in this binary: it mutates the process environment.
#[test]
fn environment_seed_overrides_flag() {
    std::env::set_var(SEED_ENV, "11");
    let from_env = zoo_json("1");
    assert!(from_env.contains("\"seed\": 11"));
    assert_eq!(from_env, zoo_json("2"));
    std::env::remove_var(SEED_ENV);
    assert!(zoo_json("1").contains("\"seed\": 1"));
}
