#![no_main]

use cfgain::bounds::Grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(grid) = text.parse::<Grid>() else {
        return;
    };
    if grid.steps <= 100_000 {
        let points = grid.points();
        assert_eq!(points.len(), grid.steps);
        assert_eq!(points[0], grid.start);
        assert_eq!(*points.last().unwrap(), grid.stop);
    }
});
