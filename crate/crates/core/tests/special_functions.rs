//! Special-function accuracy against an arbitrary-precision reference table.

use num_complex::Complex64;
use sqrtop::special::*;
use std::f64::consts::PI;

// Reference values from a 30-digit arbitrary-precision library.
const REAL: &[(f64, f64, f64, f64, f64)] = &[
    (1e-06, 13.9314420736264195, 999999.999992784324, 1999999999999.50018, 7.99999999999900109e+18),
    (0.001, 7.02368880056238132, 999.996238156085553, 1999999.50000097163, 7999999000.0001245),
    (0.1, 2.42706902470201656, 9.85384478087060557, 199.503964642114117, 7990.01243046543485),
    (0.7, 0.660519859915101595, 1.05028353531291805, 3.66132996080915335, 21.9721690256509385),
    (1.0, 0.421024438240708333, 0.601907230197234575, 1.62483889863517748, 7.10126282473794451),
    (1.9, 0.128845979276047494, 0.159660153032667629, 0.296909298257802901, 0.784732359891200082),
    (2.0, 0.113893872749533436, 0.139865881816522427, 0.253759754566055863, 0.647385390948634153),
    (2.1, 0.100783740889966935, 0.122746411533507896, 0.217685085207593498, 0.537384669071781209),
    (5.0, 0.00369109833404259427, 0.00404461344545216421, 0.00530894371222345996, 0.00829176841523093217),
    (13.0, 7.78454386142049632e-7, 8.07858841220234733e-7, 9.02740361714393437e-7, 1.08562510636312502e-6),
    (30.0, 2.13247749646305637e-14, 2.16773200189154942e-14, 2.27699296325582633e-14, 2.47133106365899294e-14),
    (100.0, 4.65662822917590202e-45, 4.67985373563690929e-45, 4.7502253038886402e-45, 4.86986274779245489e-45),
    (400.0, 1.199780043200976e-175, 1.20127883326103257e-175, 1.20578643736728116e-175, 1.21333669763470538e-175),
    (699.0, 1.27028418803274176e-305, 1.27119250742801242e-305, 1.27392136258904509e-305, 1.27848247230691969e-305),
];

const COMPLEX: &[(f64, f64, u32, f64, f64)] = &[
    (0.5, 0.5, 0, 0.552972310925574714, -0.599641947856594627),
    (0.5, 0.5, 1, 0.578453363822099196, -1.0828582158182142),
    (0.5, 0.5, 2, -0.455837393066655298, -3.92226510713722142),
    (0.5, 0.5, 3, -16.9339566369934077, -14.9485690721004787),
    (1.0, 1.5, 0, -0.121405321721516107, -0.30678318656681928),
    (1.0, 1.5, 1, -0.202666775485711381, -0.330463383074080664),
    (1.0, 1.5, 2, -0.551166460242643723, -0.323068244933289184),
    (1.0, 1.5, 3, -1.47745917873811446, 0.289452242071367215),
    (0.0, 1.0, 0, -0.138633715204054, -1.2019697153172065),
    (0.0, 1.0, 1, -0.691229843692084263, -1.22712623014357149),
    (0.0, 1.0, 2, -2.59288617549119698, 0.180489972066962027),
    (0.0, 1.0, 3, 0.0307300445757638436, 9.14441847182121642),
    (0.0, 3.0, 0, -0.591954611480711144, 0.408488655535789154),
    (0.0, 3.0, 1, -0.532592566619444185, 0.509997393867205324),
    (0.0, 3.0, 2, -0.251956348902574261, 0.763550366615418611),
    (0.0, 3.0, 3, 0.485474588867780629, 0.845939192403971006),
    (2.5, 2.5, 0, -0.0514632787894350717, -0.0142329861477813539),
    (2.5, 2.5, 1, -0.0578559558655193784, -0.0109163690349338926),
    (2.5, 2.5, 2, -0.0789722087496163801, 0.00454284858445284042),
    (2.5, 2.5, 3, -0.11739944399765021, 0.0558956768323214838),
    (0.3, -4.0, 0, 0.00269526603661888195, -0.460947013302146028),
    (0.3, -4.0, 1, 0.0588251906702663707, -0.468037728161340781),
    (0.3, -4.0, 2, 0.237598742711130135, -0.449152178717601186),
    (0.3, -4.0, 3, 0.52318524975882915, -0.265265989881852852),
    (0.0, 25.0, 0, 0.199882940793320032, -0.151215509562235394),
    (0.0, 25.0, 1, 0.196899711603542914, -0.155241745658778315),
    (0.0, 25.0, 2, 0.187463601140617767, -0.166967486490518827),
    (0.0, 25.0, 3, 0.170184913765059902, -0.185235921841277158),
    (10.0, 3.0, 0, -0.000017416912585968742, 1.69574630396079312e-8),
    (10.0, 3.0, 1, -0.0000182000766686977464, 2.4765803715375516e-7),
    (10.0, 3.0, 2, -0.0000207427436424002319, 1.06423838739980593e-6),
    (10.0, 3.0, 3, -0.0000256949288250941832, 2.92180903903260856e-6),
    (0.0, 0.2, 0, 1.69819626926053095, -1.55512758982914609),
    (0.0, 0.2, 1, -0.156295542422745669, -5.22105208223518018),
    (0.0, 0.2, 2, -50.512324553091268, 0.00782783439831051592),
    (0.0, 0.2, 3, 0.000261145543464640672, 1005.02543897959012),
];

const BESSEL_JY: &[(f64, u32, f64, f64)] = &[
    (0.001, 0, 0.999999750000015625, -4.47141661137592326),
    (0.001, 1, 0.000499999937500002615, -636.622167231139415),
    (0.001, 2, 1.24999989583333664e-7, -1273239.86304566743),
    (0.001, 3, 2.08333320312500339e-11, -5092958815.56050237),
    (0.01, 0, 0.999975000156249566, -3.00545563708364594),
    (0.01, 1, 0.00499993750026041623, -63.678596282060655),
    (0.01, 2, 0.0000124998958336588541, -12732.7138007750471),
    (0.01, 3, 2.08332031253255217e-8, -5093021.84171373667),
    (0.5, 0, 0.938469807240812904, -0.444518733506706557),
    (0.5, 1, 0.242268457674873886, -1.47147239267024307),
    (0.5, 2, 0.0306040234586826413, -5.44137083717426572),
    (0.5, 3, 0.00256372999458724408, -42.0594943047238827),
    (1.0, 0, 0.765197686557966551, 0.088256964215676958),
    (1.0, 1, 0.440050585744933516, -0.781212821300288717),
    (1.0, 2, 0.11490348493190048, -1.65068260681625439),
    (1.0, 3, 0.0195633539826684059, -5.82151760596472885),
    (2.0, 0, 0.223890779141235668, 0.51037567264974512),
    (2.0, 1, 0.576724807756873387, -0.107032431540937547),
    (2.0, 2, 0.352834028615637719, -0.617408104190682666),
    (2.0, 3, 0.128943249474402051, -1.12778377684042779),
    (7.5, 0, 0.266339657880378397, 0.117313286148208631),
    (7.5, 1, 0.135248427579705505, -0.259128510486116252),
    (7.5, 2, -0.230273410525790262, -0.186414222277839631),
    (7.5, 3, -0.258060913193460312, 0.159707591937935115),
    (30.0, 0, -0.0863679835810402113, -0.117295731686664025),
    (30.0, 1, -0.118751062616622937, 0.0844255706617472349),
    (30.0, 2, 0.0784512460732653489, 0.122924103064113841),
    (30.0, 3, 0.129211228759724983, -0.0680356902531987228),
    (100.0, 0, 0.0199858503042231224, -0.0772443133650831523),
    (100.0, 1, -0.077145352014112158, -0.0203723120027597933),
    (100.0, 2, -0.0215287573445053656, 0.0768368671250279564),
    (100.0, 3, 0.0762842017203319434, 0.0234457866877609116),
    (1000.0, 0, 0.0247866861524201746, 0.0047159179776228134),
    (1000.0, 1, 0.00472831190708952392, -0.0247843312923517789),
    (1000.0, 2, -0.0247772295286059955, -0.00476548664020751696),
    (1000.0, 3, -0.0048274208252039479, 0.0247652693457909488),
];

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn real_k_matches_reference() {
    for &(u, k0, k1, k2, k3) in REAL {
        let k = bessel_k_all(u).unwrap();
        for (n, want) in [k0, k1, k2, k3].into_iter().enumerate() {
            assert!(rel(k[n], want) < 1e-10, "K{n}({u}) = {} vs {want}", k[n]);
            assert!(rel(bessel_k(n as u32, u).unwrap(), want) < 1e-10);
        }
    }
}

#[test]
fn complex_k_matches_reference() {
    for &(re, im, n, kr, ki) in COMPLEX {
        let z = Complex64::new(re, im);
        let want = Complex64::new(kr, ki);
        let got = bessel_k_complex(n, z).unwrap();
        assert!((got - want).norm() < 1e-10 * want.norm(), "K{n}({z}) = {got} vs {want}");
    }
}

#[test]
fn hankel_matches_reference() {
    for &(x, n, j, y) in BESSEL_JY {
        let h2 = hankel(n, 2, x).unwrap();
        let want = Complex64::new(j, -y);
        assert!((h2 - want).norm() < 1e-9 * want.norm(), "H{n}(2)({x}) = {h2} vs {want}");
        assert!((hankel(n, 1, x).unwrap() - want.conj()).norm() < 1e-9 * want.norm());
    }
}

#[test]
fn printed_examples() {
    assert!(rel(bessel_k(0, 1.0).unwrap(), 0.4210244382) < 1e-9);
    assert!(rel(bessel_k(2, 1.0).unwrap(), 1.6248388986) < 1e-9);
    assert!(rel(bessel_k(3, 1.0).unwrap(), 7.1012628) < 1e-7);
    // Four-term asymptotic series oracle; the value is 0.2785449 (0.27845 is a transposition).
    let u = 20.0f64;
    let x = 8.0 * u;
    let asym = (PI / (2.0 * u)).sqrt() * (1.0 - 1.0 / x + 9.0 / (2.0 * x * x) - 225.0 / (6.0 * x.powi(3)));
    assert!(rel(bessel_k_scaled(0, u).unwrap(), asym) < 2e-6);
    assert!((bessel_k_scaled(0, u).unwrap() - 0.2785449).abs() < 1e-7);
    let s = bessel_k_scaled(1, 1e-3).unwrap();
    assert!(rel(s, 1e-3f64.exp() * 1000.0) < 1e-3);
    let h = hankel(2, 2, 1.0).unwrap();
    assert!((h.re - 0.1149035).abs() < 1e-7 && (h.im - 1.6506826).abs() < 1e-7);
}

#[test]
fn scaled_form_far_out() {
    // Asymptotic series with five terms as the oracle at u where plain K underflows.
    for &u in &[800.0, 2e3, 1e4] {
        for n in 0..4u32 {
            let m = 4.0 * (n * n) as f64;
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..6 {
                let kf = k as f64;
                term *= (m - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * u);
                sum += term;
            }
            let want = (PI / (2.0 * u)).sqrt() * sum;
            assert!(rel(bessel_k_scaled(n, u).unwrap(), want) < 1e-12);
        }
    }
}

#[test]
fn imaginary_axis_order_zero() {
    for &u in &[0.3, 1.0, 4.0, 12.0] {
        let k0 = bessel_k_complex(0, Complex64::new(0.0, u)).unwrap();
        let h0 = hankel(0, 2, u).unwrap();
        let rhs = -Complex64::i() * (PI / 2.0) * h0;
        assert!((k0 - rhs).norm() < 1e-8 * k0.norm());
    }
}

#[test]
fn schwarz_reflection() {
    for &(re, im) in &[(0.4, 0.9), (3.0, -2.0), (0.0, 5.0)] {
        let z = Complex64::new(re, im);
        for n in 0..4 {
            let a = bessel_k_complex(n, z.conj()).unwrap();
            let b = bessel_k_complex(n, z).unwrap().conj();
            assert!((a - b).norm() <= 1e-14 * b.norm());
        }
    }
}

#[test]
fn real_axis_agreement() {
    for &u in &[0.01, 0.5, 1.0, 2.0, 3.5, 50.0] {
        for n in 0..4 {
            let c = bessel_k_complex(n, Complex64::new(u, 0.0)).unwrap();
            assert!(c.im == 0.0);
            assert!(rel(c.re, bessel_k(n, u).unwrap()) < 1e-10);
        }
    }
}

#[test]
fn half_order_elementary() {
    let u = 0.37;
    assert!(rel(bessel_k_half(u).unwrap() * u.sqrt(), (PI / 2.0).sqrt() * (-u).exp() / u.sqrt() * u.sqrt()) < 1e-15);
}
