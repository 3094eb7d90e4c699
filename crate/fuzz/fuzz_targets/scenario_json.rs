//! Fuzzes scenario-file deserialization. Anything that validates must
//! round-trip through JSON unchanged and survive a tiny generation run.

#![no_main]

use libfuzzer_sys::fuzz_target;

use acekit::numkit::SeededRng;
use acekit::simgen::{Regime, ScenarioBundle};

fuzz_target!(|data: &[u8]| {
    let Ok(bundle) = serde_json::from_slice::<ScenarioBundle>(data) else {
        return;
    };
    let json = serde_json::to_string(&bundle).expect("validated bundle serializes");
    let back: ScenarioBundle = serde_json::from_str(&json).expect("round trip parses");
    assert_eq!(back, bundle);

    if bundle.model.p() <= 4 {
        let mut rng = SeededRng::new(1, 0);
        let _ = bundle.model.generate(8, Regime::Observational, &mut rng);
        let _ = bundle.model.generate(4, Regime::InterventionTreatment, &mut rng);
    }
});
