//! Fuzzes the CSV ingestion path: arbitrary bytes through the parser, then
//! the imputation and dataset-conversion steps on anything that parses.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let covariates = ["x1".to_string(), "x2".to_string()];
    let Ok(table) = acekit::table::ingest_csv_reader(data, "t", Some("y"), &covariates) else {
        return;
    };
    let _ = table.missing_cells();
    let mut rng = acekit::numkit::SeededRng::new(0, 0);
    let Ok(imputed) = acekit::table::hot_deck_impute(&table, &mut rng) else {
        return;
    };
    assert!(!imputed.has_missing());
    if let Ok(dataset) = imputed.to_dataset() {
        let _ = acekit::estimators::face(&dataset);
    }
});
