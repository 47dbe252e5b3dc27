//! Kernel values frozen from an independent 40-digit evaluation through
//! Jacobi theta functions (mpmath `jtheta`), on a square and a skew lattice.

use cmpairs::{Complex64, Lattice};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(got: Complex64, want: Complex64, tol: f64) {
    let err = (got - want).norm() / want.norm().max(1.0);
    assert!(err <= tol, "got {got}, want {want}, rel err {err:e}");
}

struct Frozen {
    lat: Lattice,
    eta1: Complex64,
    /// `(x, ℘(x), ζ(x), σ(x))`.
    points: [(Complex64, Complex64, Complex64, Complex64); 2],
    /// `Φ(0.3 + 0.1i, 0.5 − 0.2i)`.
    phi: Complex64,
}

fn square() -> Frozen {
    Frozen {
        lat: Lattice::lemniscatic(),
        eta1: c(0.78539816339744831, 0.0),
        points: [
            (
                c(0.37, 0.21),
                c(2.8867789897185118, -4.6515978601096086),
                c(2.0439009720545058, -1.175364330943603),
                c(0.37058131055314859, 0.20963560273771747),
            ),
            (
                c(-0.8, 0.45),
                c(0.80738596744221306, 0.58816854306168357),
                c(-0.95236886605467843, -0.68220454778108859),
                c(-0.8268802405456926, 0.4328280410196803),
            ),
        ],
        phi: c(2.6974155916206653, -1.2880278874037712),
    }
}

fn skew() -> Frozen {
    Frozen {
        lat: Lattice::new(c(1.0, 0.0), c(0.3, 1.2)).unwrap(),
        eta1: c(0.82572252606763208, -0.0099679151369223884),
        points: [
            (
                c(0.37, 0.21),
                c(2.8593299131207364, -4.6728091981169144),
                c(2.0456001200724238, -1.1705859084666451),
                c(0.37042810676017897, 0.2098114904665407),
            ),
            (
                c(-0.8, 0.45),
                c(0.70807232248458009, 0.66023256055164223),
                c(-0.95899305116950537, -0.64020722977945448),
                c(-0.81883260333327615, 0.4383736687553112),
            ),
        ],
        phi: c(2.7051622180659794, -1.2918517333821874),
    }
}

fn check(f: Frozen) {
    close(f.lat.eta1(), f.eta1, 1e-13);
    for (x, wp, zeta, sigma) in f.points {
        close(f.lat.wp(x, 0).unwrap(), wp, 1e-12);
        close(f.lat.zeta(x).unwrap(), zeta, 1e-12);
        close(f.lat.sigma(x), sigma, 1e-12);
    }
    close(f.lat.phi(c(0.3, 0.1), c(0.5, -0.2), 0).unwrap(), f.phi, 1e-12);
}

#[test]
fn square_lattice_values() {
    check(square());
}

#[test]
fn skew_lattice_values() {
    check(skew());
}

#[test]
fn square_lattice_eta1_is_quarter_pi() {
    close(Lattice::lemniscatic().eta1(), c(std::f64::consts::FRAC_PI_4, 0.0), 1e-14);
}

#[test]
fn extrapolated_lattice_sum_hits_frozen_values() {
    let f = skew();
    let (x, wp, zeta, _) = f.points[0];
    close(cmpairs::elliptic::lattice_sum::wp_extrapolated(&f.lat, x, 120), wp, 1e-9);
    close(cmpairs::elliptic::lattice_sum::zeta_extrapolated(&f.lat, x, 120), zeta, 1e-9);
}
