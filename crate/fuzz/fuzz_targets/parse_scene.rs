#![no_main]

use libfuzzer_sys::fuzz_target;
use radflux_cli::scene::Scene;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(scene) = Scene::from_json(text) {
        let again = Scene::from_json(&scene.to_json()).expect("serialized scene parses");
        assert_eq!(scene, again);
    }
});
