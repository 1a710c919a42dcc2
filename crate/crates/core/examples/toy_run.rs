fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let t = std::time::Instant::now();
    let r = sacflight::harness::toy_benchmark(seed, 50_000).unwrap();
    let n = r.episode_returns.len();
    for (i, c) in r.episode_returns.chunks(25).enumerate() {
        println!("ep {:4} mean {:.2}", i * 25, c.iter().sum::<f64>() / c.len() as f64);
    }
    println!("seed {seed} episodes {n} eval {:.3} oracle {:.3} thr {:.3} pass {} ({:.0}s)", r.eval_return, r.oracle_return, r.threshold, r.pass, t.elapsed().as_secs_f64());
}
