//! The JSON documents under `fixtures/` must match the generators.
//! Set `SYSTOLE_BLESS=1` to rewrite them.

use std::path::PathBuf;

use systole_core::fixtures::{metric_fixtures, MetricFixture};
use systole_core::hermitian::HermitianMetric;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[test]
fn shipped_fixtures_match_generators() {
    let bless = std::env::var_os("SYSTOLE_BLESS").is_some();
    let mut count = 0;
    for n in [2, 3] {
        for fx in metric_fixtures(n) {
            let path = dir().join(format!("{}.json", fx.name));
            let text = fx.to_json_string();
            if bless {
                std::fs::write(&path, &text).unwrap();
            }
            let shipped = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
            assert_eq!(shipped, text, "{}", fx.name);
            let back = MetricFixture::from_json_str(&shipped).unwrap();
            assert_eq!(back.omega, fx.omega);
            assert_eq!(back.kind, fx.kind);
            HermitianMetric::new(back.omega).unwrap();
            count += 1;
        }
    }
    let on_disk = std::fs::read_dir(dir()).unwrap().count();
    assert_eq!(on_disk, count);
}

#[test]
fn version_is_checked() {
    let fx = &metric_fixtures(2)[0];
    let text = fx.to_json_string().replacen("\"version\": 1", "\"version\": 99", 1);
    assert!(MetricFixture::from_json_str(&text).is_err());
}
