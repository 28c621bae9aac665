//! Regenerates the bundled synthetic price fixtures in `data/synthetic/`.
//!
//! Each series is an anchor-interpolated log-price trajectory plus seeded
//! AR(1) noise whose scale grows over time and bursts ahead of the main
//! warning window. The noise scale is bisected so that the detrended residual
//! standard deviation lands on the asset's target.
//!
//!     cargo run -p slowdown-cli --example make_fixtures

use std::fmt::Write as _;
use std::path::PathBuf;

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use slowdown_core::preprocess::{detrend, gaussian_smooth, SmootherConfig};
use slowdown_core::PriceSeries;

/// Smoothing applied to the anchor interpolation, in days.
const TREND_BANDWIDTH: f64 = 30.0;

struct Asset {
    id: &'static str,
    seed: u64,
    target_std: f64,
    /// Noise persistence.
    ar: f64,
    anchors: &'static [(&'static str, f64)],
    /// (start, end, multiplier) noise bursts.
    bursts: &'static [(&'static str, &'static str, f64)],
}

const ASSETS: &[Asset] = &[
    Asset {
        id: "BTC",
        seed: 101,
        target_std: 7.623e-2,
        ar: 0.9,
        anchors: &[
            ("2016-01-01", 430.0), ("2016-06-15", 690.0), ("2016-12-31", 960.0),
            ("2017-03-01", 1200.0), ("2017-06-10", 2900.0), ("2017-09-01", 4700.0),
            ("2017-11-01", 6700.0), ("2017-12-17", 19000.0), ("2018-01-01", 13500.0),
            ("2018-02-06", 7000.0), ("2018-03-05", 11500.0), ("2018-03-31", 6900.0),
        ],
        bursts: &[("2017-11-28", "2018-01-20", 3.0)],
    },
    Asset {
        id: "XRP",
        seed: 202,
        target_std: 5.723e-2,
        ar: 0.9,
        anchors: &[
            ("2016-01-01", 0.006), ("2016-12-31", 0.0065), ("2017-03-01", 0.0065),
            ("2017-04-01", 0.009), ("2017-05-17", 0.38), ("2017-08-01", 0.17),
            ("2017-11-01", 0.20), ("2017-12-20", 1.0), ("2018-01-04", 3.4),
            ("2018-02-06", 0.7), ("2018-03-31", 0.5),
        ],
        bursts: &[("2017-11-28", "2018-02-10", 3.0)],
    },
    Asset {
        id: "LTC",
        seed: 303,
        target_std: 1.115e-1,
        ar: 0.8,
        anchors: &[
            ("2016-01-01", 3.5), ("2016-12-31", 4.3), ("2017-03-25", 4.0),
            ("2017-05-25", 30.0), ("2017-09-01", 85.0), ("2017-11-01", 55.0),
            ("2017-12-19", 360.0), ("2018-01-01", 230.0), ("2018-02-06", 120.0),
            ("2018-03-31", 117.0),
        ],
        bursts: &[("2017-11-28", "2018-02-20", 5.0)],
    },
    Asset {
        id: "XLM",
        seed: 404,
        target_std: 2.229e-2,
        ar: 0.9,
        anchors: &[
            ("2016-01-01", 0.0018), ("2016-12-31", 0.002), ("2017-03-01", 0.0022),
            ("2017-05-20", 0.03), ("2017-08-01", 0.02), ("2017-11-01", 0.03),
            ("2017-12-20", 0.25), ("2018-01-04", 0.9), ("2018-02-06", 0.3),
            ("2018-03-31", 0.2),
        ],
        bursts: &[("2017-11-28", "2018-02-10", 3.0)],
    },
    Asset {
        id: "XEM",
        seed: 505,
        target_std: 3.415e-2,
        ar: 0.7,
        anchors: &[
            ("2016-01-01", 0.0002), ("2016-04-01", 0.002), ("2016-12-31", 0.004),
            ("2017-03-15", 0.01), ("2017-05-20", 0.2), ("2017-08-01", 0.2),
            ("2017-11-01", 0.2), ("2017-12-20", 0.9), ("2018-01-04", 1.3),
            ("2018-02-06", 0.4), ("2018-03-31", 0.2),
        ],
        bursts: &[("2017-12-18", "2018-02-10", 3.0)],
    },
    Asset {
        id: "DASH",
        seed: 606,
        target_std: 1.074e-1,
        ar: 0.9,
        anchors: &[
            ("2016-01-01", 3.0), ("2016-06-01", 8.5), ("2016-12-31", 11.0),
            ("2017-02-25", 20.0), ("2017-03-18", 100.0), ("2017-04-11", 70.0),
            ("2017-06-15", 200.0), ("2017-09-01", 380.0), ("2017-11-01", 290.0),
            ("2017-12-20", 1550.0), ("2018-01-01", 1100.0), ("2018-02-06", 450.0),
            ("2018-03-31", 300.0),
        ],
        bursts: &[("2017-03-01", "2017-04-15", 5.0)],
    },
];

fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").expect("fixture date")
}

fn log_trend(asset: &Asset, dates: &[NaiveDate]) -> Vec<f64> {
    let raw = anchor_path(asset, dates);
    gaussian_smooth(&raw, &SmootherConfig::new(TREND_BANDWIDTH, 3.0).unwrap()).unwrap()
}

fn anchor_path(asset: &Asset, dates: &[NaiveDate]) -> Vec<f64> {
    let pts: Vec<(NaiveDate, f64)> = asset.anchors.iter().map(|(d, p)| (date(d), p.ln())).collect();
    dates
        .iter()
        .map(|d| {
            let k = pts.iter().rposition(|(a, _)| a <= d).unwrap().min(pts.len() - 2);
            let ((d0, v0), (d1, v1)) = (pts[k], pts[k + 1]);
            let w = (*d - d0).num_days() as f64 / (d1 - d0).num_days() as f64;
            v0 + w * (v1 - v0)
        })
        .collect()
}

fn noise_profile(asset: &Asset, dates: &[NaiveDate]) -> Vec<f64> {
    let n = dates.len() as f64;
    dates
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let growth = 1.0 + 1.5 * i as f64 / n;
            let burst = asset
                .bursts
                .iter()
                .filter(|(s, e, _)| *d >= date(s) && *d <= date(e))
                .map(|(_, _, k)| *k)
                .fold(1.0, f64::max);
            growth * burst
        })
        .collect()
}

fn build(asset: &Asset, dates: &[NaiveDate], scale: f64) -> Vec<f64> {
    let trend = log_trend(asset, dates);
    let profile = noise_profile(asset, dates);
    let mut rng = ChaCha8Rng::seed_from_u64(asset.seed);
    let mut y = 0.0;
    trend
        .iter()
        .zip(&profile)
        .map(|(t, s)| {
            let e: f64 = StandardNormal.sample(&mut rng);
            y = asset.ar * y + scale * s * e;
            (t + y).exp()
        })
        .collect()
}

fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let p = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * p).round() / p
}

fn residual_std(asset: &Asset, dates: &[NaiveDate], scale: f64) -> f64 {
    let prices: Vec<f64> = build(asset, dates, scale).into_iter().map(|p| round_sig(p, 8)).collect();
    let series = PriceSeries::new(asset.id, dates.to_vec(), prices).unwrap();
    detrend(&series, &SmootherConfig::default()).unwrap().std()
}

fn main() {
    let out = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic");
    std::fs::create_dir_all(&out).unwrap();
    let dates: Vec<NaiveDate> =
        date("2016-01-01").iter_days().take_while(|d| *d <= date("2018-03-31")).collect();
    for asset in ASSETS {
        let floor = residual_std(asset, &dates, 0.0);
        let (mut lo, mut hi) = (1e-6_f64, 1.0_f64);
        for _ in 0..60 {
            let mid = (lo * hi).sqrt();
            if residual_std(asset, &dates, mid) < asset.target_std {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let scale = (lo * hi).sqrt();
        let prices = build(asset, &dates, scale);
        let mut csv = String::from("date,close\n");
        for (d, p) in dates.iter().zip(&prices) {
            writeln!(csv, "{},{}", d.format("%Y-%m-%d"), round_sig(*p, 8)).unwrap();
        }
        std::fs::write(out.join(format!("{}.csv", asset.id)), csv).unwrap();
        println!(
            "{}: trend-only std {floor:.5}, noise scale {scale:.5}, residual std {:.5} (target {})",
            asset.id,
            residual_std(asset, &dates, scale),
            asset.target_std
        );
    }
}
