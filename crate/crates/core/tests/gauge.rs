use num_complex::Complex64;
use zml_core::potential::alpha_gauge;
use zml_core::profiles::{FieldProfile, Shape};
use zml_core::Grid1D;

// (p + A_x) e^{-iα} φ = e^{-iα} p φ when α' = A_x, p = -i d/dx.
#[test]
fn dressing_restores_the_x_component() {
    let ax = FieldProfile::line(Shape::Bump {
        amplitude: 0.8,
        half_width: 1.5,
        center: 0.3,
    })
    .unwrap();
    let residual = |n: usize| {
        let g = Grid1D::new(-5.0, 5.0, n).unwrap();
        let h = g.h();
        let phi: Vec<f64> = g.points().map(|x| (-(x - 0.5) * (x - 0.5)).exp()).collect();
        let psi = alpha_gauge(&ax, &g).unwrap().dress(&phi);
        let alpha = alpha_gauge(&ax, &g).unwrap().alpha_values;
        let mut worst: f64 = 0.0;
        for i in 1..g.len() - 1 {
            let i_unit = Complex64::new(0.0, 1.0);
            let lhs = -i_unit * (psi[i + 1] - psi[i - 1]) / (2.0 * h) + ax.eval(g.x(i)) * psi[i];
            let rhs = Complex64::from_polar(1.0, -alpha[i])
                * (-i_unit * (phi[i + 1] - phi[i - 1]) / (2.0 * h));
            worst = worst.max((lhs - rhs).norm());
        }
        worst
    };
    let r1 = residual(401);
    let r2 = residual(801);
    assert!(r2 < 1e-3, "{r2}");
    assert!((3.0..=5.0).contains(&(r1 / r2)), "{}", r1 / r2);
}

#[test]
fn dressing_is_unitary() {
    let ax = FieldProfile::box_profile(1.0, 1.0).unwrap();
    let g = Grid1D::new(-3.0, 3.0, 61).unwrap();
    let phi: Vec<f64> = g.points().map(|x| x.cos()).collect();
    let psi = alpha_gauge(&ax, &g).unwrap().dress(&phi);
    for (a, b) in phi.iter().zip(&psi) {
        assert!((a.abs() - b.norm()).abs() < 1e-15);
    }
}
