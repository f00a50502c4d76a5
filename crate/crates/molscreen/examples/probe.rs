fn main() {
    use molscreen::kg::*;
    let kg = build_numeric_kg(0.0, 9.0, 1.0).unwrap();
    for metric in [Norm::L1, Norm::L2] {
        for lr in [0.01, 0.02, 0.05] {
            for seed in [0u64, 1, 2, 7, 42, 123] {
                let cfg = MarginConfig { gamma: 1.0, metric, dim: 8, learning_rate: lr, epochs: 500, seed };
                let (emb, trace) = train_kg(&kg, &cfg);
                let dir = directionality(&kg, &emb, metric);
                let proj = relation_projections(&emb);
                let sp = molscreen::linalg::spearman(&kg.values, &proj);
                println!("{metric:?} lr={lr} seed={seed}: spearman={sp:.4} dir={dir:.2} final_loss={:.4}", trace.last().unwrap());
            }
        }
    }
}
