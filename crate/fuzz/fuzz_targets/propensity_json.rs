//! Fuzzes propensity-function deserialization: parsed functions must honor
//! their kind invariants and round-trip through JSON.

#![no_main]

use libfuzzer_sys::fuzz_target;
use nalgebra::DVector;

use acekit::propensity::PropensityFunction;

fuzz_target!(|data: &[u8]| {
    let Ok(f) = serde_json::from_slice::<PropensityFunction>(data) else {
        return;
    };
    let p = f.dim();
    if p > 64 {
        return;
    }
    let x = DVector::from_fn(p, |j, _| (j as f64 - 2.0) * 0.5);
    let value = f.evaluate(&x);
    if f.is_probability() && value.is_finite() {
        assert!((0.0..=1.0).contains(&value), "probability out of range: {value}");
    }
    let json = serde_json::to_string(&f).expect("validated function serializes");
    let back: PropensityFunction = serde_json::from_str(&json).expect("round trip parses");
    assert_eq!(back, f);
});
