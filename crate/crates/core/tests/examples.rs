macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/examples/",
                stringify!($name),
                ".rs"
            ));
        }
    };
}

example!(ball);
example!(random_body);
example!(width_floor);
example!(normal_flow);
example!(export_mesh);
example!(verify_identities);

#[test]
fn ball_example_runs() {
    ball::run_example().expect("ball example should run");
}

#[test]
fn random_body_example_runs() {
    random_body::run_example().expect("random body example should run");
}

#[test]
fn width_floor_example_runs() {
    width_floor::run_example().expect("width floor example should run");
}

#[test]
fn normal_flow_example_runs() {
    normal_flow::run_example().expect("normal flow example should run");
}

#[test]
fn export_mesh_example_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("body.obj");
    export_mesh::export(&out).expect("export example should run");
    assert!(std::fs::metadata(&out).unwrap().len() > 0);
}

#[test]
fn verify_identities_example_runs() {
    verify_identities::run_example().expect("verify example should run");
}
