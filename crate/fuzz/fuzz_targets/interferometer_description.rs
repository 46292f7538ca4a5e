#![no_main]

use cfgain::network::InterferometerDescription;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(desc) = InterferometerDescription::parse_bytes(data) else {
        return;
    };
    let Ok(net) = desc.build() else {
        return;
    };
    if let Ok(out) = net.output_state() {
        let norm: f64 = out.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-8, "propagation lost norm: {norm}");
    }
    for tag in net.spec.tagged_paths() {
        let _ = net.spec.backpropagate_path(tag);
    }
});
