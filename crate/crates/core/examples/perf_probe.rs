use liexp::matrix::Matrix;
use liexp::rational::inverse_factorial;
use liexp::rng::stream_rng;
use liexp::series::TruncSeries;
use liexp::triexp::tri_exp;

fn main() {
    let start = std::time::Instant::now();
    let results = liexp::parallel::map_indexed(300, |trial| {
        let mut rng = stream_rng(42, trial as u64);
        let n = 2 + trial % 4; // 2..=5
        let m = 1 + trial % 3;
        let a = Matrix::from_fn(n, n, |r, c| {
            if r <= c {
                TruncSeries::random_polynomial(&mut rng, m, 8, 4, 5, true)
            } else {
                TruncSeries::zero(m, 8)
            }
        });
        let e = tri_exp(&a).unwrap();
        let mut sum = Matrix::identity(n, a.witness());
        let mut power = Matrix::identity(n, a.witness());
        for k in 1..=8u64 {
            power = power.checked_mul(&a).unwrap();
            sum = sum.checked_add(&power.scaled(&inverse_factorial(k))).unwrap();
        }
        e == sum
    });
    assert!(results.iter().all(|&b| b));
    println!("300 instances with oracle: {:?}", start.elapsed());
}
