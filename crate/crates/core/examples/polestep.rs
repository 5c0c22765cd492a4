//! Steps RoundSphere(30, 80) at dt = 0.05 without remeshing and prints the
//! near-pole length ratios and `Rc·r0²` for the first three and the 40th
//! classes. Pass `circ` to use circumcentric duals.

use drf_core::flow::{rhs, step_rk4};
use drf_core::geometry::DualScheme;
use drf_core::profiles::{build_lattice, ProfileSpec};

fn main() -> drf_core::Result<()> {
    let scheme = if std::env::args().any(|a| a == "circ") {
        DualScheme::Circumcentric
    } else {
        DualScheme::Barycentric
    };
    let r0 = 30.0;
    let dt = 0.05;
    let mut l = build_lattice(&ProfileSpec::round_sphere(r0, 80))?;
    for k in 0..=1200 {
        if k % 100 == 0 {
            let field = rhs(&l, scheme)?.field;
            let rc = |i: usize| field.edges[i].ricci * r0 * r0;
            let (s, a, n) = (l.s(), l.a(), l.n());
            println!(
                "t={:6.1} s1/s2={:.4} s2/s3={:.4} a1/a2={:.4} a2/a3={:.4} | \
                 s1 {:.3} s2 {:.3} s3 {:.3} s40 {:.3} a1 {:.3} a2 {:.3} a3 {:.3} a40 {:.3}",
                k as f64 * dt,
                s[0] / s[1],
                s[1] / s[2],
                a[0] / a[1],
                a[1] / a[2],
                rc(0),
                rc(1),
                rc(2),
                rc(39),
                rc(n),
                rc(n + 1),
                rc(n + 2),
                rc(n + 39),
            );
        }
        l = step_rk4(&l, dt, scheme)?;
    }
    Ok(())
}
