//! Writes the synthetic demo corpus under `data/demo/`.
//!
//! The series are fabricated: each regime of the bundled table gets its own
//! isoelastic curve and unemployment follows a noisy cycle with recession
//! spikes. They exercise the pipeline end to end and carry no empirical content.
//!
//! ```text
//! cargo run -p beveridge-gap --example demo_data -- data/demo
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use beveridge_gap::regimes::assign_regime;
use beveridge_gap::{QuarterKey, RegimeTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SEED: u64 = 20_190_401;
const FIRST_YEAR: i32 = 1950;
const LAST_YEAR: i32 = 2019;
/// Months on which the two vacancy sources overlap around the cutover.
const OVERLAP: std::ops::RangeInclusive<i32> = 1999..=2002;

const RECESSIONS: [(i32, u8, i32, u8); 10] = [
    (1953, 2, 1954, 2),
    (1957, 3, 1958, 2),
    (1960, 2, 1961, 1),
    (1969, 4, 1970, 4),
    (1973, 4, 1975, 1),
    (1980, 1, 1980, 3),
    (1981, 3, 1982, 4),
    (1990, 3, 1991, 1),
    (2001, 1, 2001, 4),
    (2007, 4, 2009, 2),
];

/// (epsilon, ln v0) per regime of the bundled table, then for inter-regime
/// months the previous regime's values.
const CURVES: [(f64, f64); 7] = [
    (1.02, -6.35),
    (1.15, -6.75),
    (0.98, -6.20),
    (1.22, -6.70),
    (1.05, -6.55),
    (0.92, -6.15),
    (0.84, -5.95),
];

fn in_recession(q: QuarterKey) -> bool {
    RECESSIONS
        .iter()
        .any(|&(y0, q0, y1, q1)| QuarterKey::new(y0, q0) <= q && q <= QuarterKey::new(y1, q1))
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data/demo".into()));
    fs::create_dir_all(&dir).expect("create output directory");
    let table = RegimeTable::default_us();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let shock = Normal::new(0.0, 0.035).unwrap();
    let noise = Normal::new(0.0, 0.03).unwrap();

    let header = "date,value\n";
    let (mut u_csv, mut pre_csv, mut post_csv) = (header.to_string(), header.to_string(), header.to_string());
    let mut log_gap: f64 = 0.0;
    let mut curve = CURVES[0];
    for year in FIRST_YEAR..=LAST_YEAR {
        for month in 1..=12u8 {
            let q = QuarterKey::of_month(year, month);
            if let Some(r) = assign_regime(q, &table) {
                let i = table.regimes().iter().position(|x| x.label == r.label).unwrap();
                curve = CURVES[i];
            }
            let pull = if in_recession(q) { 0.045 } else { -0.012 };
            log_gap = 0.97 * log_gap + pull + shock.sample(&mut rng);
            let trend = 0.055 + 0.008 * ((year - FIRST_YEAR) as f64 / 9.0).sin();
            let u = (trend * log_gap.exp()).clamp(0.025, 0.12);
            let (eps, ln_v0) = curve;
            let v = (ln_v0 - eps * u.ln() + noise.sample(&mut rng)).exp();
            let date = format!("{year:04}-{month:02}-01");
            let _ = writeln!(u_csv, "{date},{:.1}", 100.0 * u);
            if year <= *OVERLAP.end() {
                let _ = writeln!(pre_csv, "{date},{:.3}", 100.0 * v);
            }
            if year >= *OVERLAP.start() {
                // the newer source reads slightly lower
                let _ = writeln!(post_csv, "{date},{:.3}", 100.0 * v * 0.97);
            }
        }
    }
    fs::write(dir.join("unemployment.csv"), u_csv).unwrap();
    fs::write(dir.join("vacancy_pre.csv"), pre_csv).unwrap();
    fs::write(dir.join("vacancy_post.csv"), post_csv).unwrap();
    println!("wrote demo series to {}", dir.display());
}
