use fockport::sweep::{csv_string, preset, run_sweep, SweepConfig};

fn small_config(samples: usize, seed: u64) -> SweepConfig {
    SweepConfig::parse(
        &format!(
            "resource = su2:xi=0.5,theta=0|pi\nresource = bh:gamma=-2|-0.5\nresource = maxent\n\
             N = 1,3\nnu = 4,9\nsamples = {samples}\nseed = {seed}\n"
        ),
        0,
    )
    .unwrap()
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn csv_is_byte_identical_across_thread_counts() {
    let cfg = small_config(300, 9);
    let one = with_threads(1, || csv_string(&run_sweep(&cfg).unwrap()).unwrap());
    let four = with_threads(4, || csv_string(&run_sweep(&cfg).unwrap()).unwrap());
    assert_eq!(one, four);
    assert_eq!(one, csv_string(&run_sweep(&cfg).unwrap()).unwrap());
}

#[test]
fn seed_changes_only_monte_carlo_columns() {
    let a = run_sweep(&small_config(300, 1)).unwrap();
    let b = run_sweep(&small_config(300, 2)).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.f_closed.to_bits(), y.f_closed.to_bits());
        assert_eq!(x.e_closed, y.e_closed);
        let (fx, fy) = (x.f_mc.unwrap(), y.f_mc.unwrap());
        assert_ne!(fx.mean, fy.mean);
        let spread = 3.0 * (fx.std_error.powi(2) + fy.std_error.powi(2)).sqrt();
        assert!((fx.mean - fy.mean).abs() <= spread.max(1e-12), "{}", x.resource);
    }
}

#[test]
fn zero_samples_leaves_monte_carlo_empty() {
    let rows = run_sweep(&small_config(0, 1)).unwrap();
    assert!(rows.iter().all(|r| r.f_mc.is_none() && r.e_mc.is_none()));
    let text = csv_string(&rows).unwrap();
    let line = text.lines().nth(1).unwrap();
    assert!(line.contains(",,,"), "{line}");
}

#[test]
fn fig1_rows_beat_separable() {
    let rows = run_sweep(&preset("fig1", 0).unwrap()).unwrap();
    for r in rows.iter().filter(|r| r.resource.starts_with("su2")) {
        assert!(r.f_closed > 2.0 / (r.n as f64 + 2.0), "{} N={} nu={}", r.resource, r.n, r.nu);
    }
}

#[test]
fn fig6_labels_the_critical_continuation() {
    let rows = run_sweep(&preset("fig6", 0).unwrap()).unwrap();
    let critical: Vec<_> = rows
        .iter()
        .filter(|r| r.regime.map(|g| g.to_string()) == Some("critical".into()))
        .collect();
    assert!(critical.iter().any(|r| r.resource.starts_with("gauss1")));
    assert!(critical.iter().any(|r| r.resource.starts_with("gauss2")));
    assert!(rows.iter().all(|r| r.f_closed > 0.0 && r.f_closed < 1.0));
}

#[test]
fn fig8_is_monotone_in_m() {
    let rows = run_sweep(&preset("fig8", 0).unwrap()).unwrap();
    for nu in [10, 100, 1000] {
        let f: Vec<f64> = rows.iter().filter(|r| r.nu == nu).map(|r| r.f_closed).collect();
        assert_eq!(f.len(), 8);
        assert!(f.windows(2).all(|w| w[1] > w[0]), "nu={nu}");
    }
}
