//! A short run of the local minimality experiment with a δ ladder.

use hannerlab::hanner::parse_expr;
use hannerlab::linalg::{fmt_rat, rat};
use hannerlab::witness::{default_ladder, run_ladder, HannerContext};

fn main() {
    let h = parse_expr("((I1 +1 I2) +inf I3)").expect("valid tree");
    let ctx = HannerContext::new(&h);
    println!("P(H) = {}", fmt_rat(&ctx.volume_product()));
    let ladder = run_ladder(&ctx, &default_ladder(&rat(1, 100)), 4, 7);
    print!("{}", ladder.table());
    for r in &ladder.reports {
        println!(
            "delta {}: santalo {}, pairings {}",
            fmt_rat(&r.delta),
            r.all_santalo(),
            r.all_pairings()
        );
    }
}
