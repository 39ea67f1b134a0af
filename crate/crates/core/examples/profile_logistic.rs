use message_core::*;
use std::time::Instant;

fn main() {
    let cfg = SyntheticConfig { n: 4000, p: 100, s: 3, rho: 0.0, case: SyntheticCase::Case3, seed: 99 };
    let (d, _t) = generate_synthetic(&cfg).unwrap();
    let plan = random_partition(d.n(), 10, 7).unwrap();
    let sub = d.select_rows(&plan.subset_indices(0));

    let lasso = LassoConfig::default();
    let t0 = Instant::now();
    let path = solvers::logistic_lasso_path(&sub, &lasso).unwrap();
    println!("subset path: {:?} ({} fits, last support {})", t0.elapsed(), path.len(), path.last().unwrap().gamma.count());

    let mut candidates = vec![InclusionVector::empty(sub.p())];
    let mut seen = std::collections::HashSet::new();
    seen.insert(candidates[0].clone());
    for f in &path { if seen.insert(f.gamma.clone()) { candidates.push(f.gamma.clone()); } }
    println!("candidates: {} sizes {:?}", candidates.len(), candidates.iter().map(|c| c.count()).collect::<Vec<_>>());
    let t0 = Instant::now();
    let sel = solvers::gic_select_logistic(&sub, &candidates, &GicConfig::default()).unwrap();
    println!("subset gic_select: {:?} chose {:?}", t0.elapsed(), sel.support());

    let t0 = Instant::now();
    let full_path = solvers::logistic_lasso_path(&d, &lasso).unwrap();
    println!("full path: {:?} ({} fits, last support {})", t0.elapsed(), full_path.len(), full_path.last().unwrap().gamma.count());
    let mut fc = vec![InclusionVector::empty(d.p())];
    let mut seen = std::collections::HashSet::new();
    for f in &full_path { if seen.insert(f.gamma.clone()) { fc.push(f.gamma.clone()); } }
    let t0 = Instant::now();
    let sel = solvers::gic_select_logistic(&d, &fc, &GicConfig::default()).unwrap();
    println!("full gic_select: {:?} chose {:?}", t0.elapsed(), sel.support());
}
