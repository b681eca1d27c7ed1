#![no_main]

use libfuzzer_sys::fuzz_target;
use radflux::region::Region;
use radflux::soup::{parse_triangle_soup, write_triangle_soup};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(triangles) = parse_triangle_soup(text) else { return };
    let again = parse_triangle_soup(&write_triangle_soup(&triangles)).expect("written soup parses");
    assert_eq!(triangles, again);
    // Validation may reject the mesh but must not panic; accepted meshes
    // have positive volume.
    if let Ok(region) = Region::mesh(triangles) {
        assert!(region.volume() > 0.0);
    }
});
