//! Reference values computed once with 40-digit arithmetic (mpmath) and frozen
//! here; the library never sees the generator.

use ccrisk::gaussian::GaussianVec;
use ccrisk::linalg::SymMatrix;
use ccrisk::risk::risk_dth_order;
use ccrisk::special::{
    chi2_cdf, psi, psi_inv, sector_fraction, std_normal_cdf, std_normal_quantile,
};

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

/// (r, d, Ψ_d(r), 1 − Ψ_d(r))
const PSI: &[(f64, u32, f64, f64)] = &[
    (0.1, 1, 9.20344325445942024e-01, 7.96556745540579619e-02),
    (0.5, 1, 6.17075077451973764e-01, 3.82924922548026181e-01),
    (1.0, 1, 3.17310507862914093e-01, 6.82689492137085852e-01),
    (2.0, 1, 4.55002638963584172e-02, 9.54499736103641583e-01),
    (3.0, 1, 2.69979606326018915e-03, 9.97300203936739793e-01),
    (5.0, 1, 5.73303143758387824e-07, 9.99999426696856264e-01),
    (8.0, 1, 1.24419211485435677e-15, 9.99999999999998779e-01),
    (0.1, 2, 9.95012479192682320e-01, 4.98752080731768715e-03),
    (0.5, 2, 8.82496902584595455e-01, 1.17503097415404600e-01),
    (1.0, 2, 6.06530659712633424e-01, 3.93469340287366576e-01),
    (2.0, 2, 1.35335283236612702e-01, 8.64664716763387298e-01),
    (3.0, 2, 1.11089965382423061e-02, 9.88891003461757734e-01),
    (5.0, 2, 3.72665317207867094e-06, 9.99996273346827946e-01),
    (8.0, 2, 1.26641655490941755e-14, 9.99999999999987343e-01),
    (0.1, 3, 9.99734834941344408e-01, 2.65165058655609869e-04),
    (0.5, 3, 9.69140404216273232e-01, 3.08595957837267294e-02),
    (1.0, 3, 8.01251956901200768e-01, 1.98748043098799204e-01),
    (2.0, 3, 2.61464129949110613e-01, 7.38535870050889387e-01),
    (3.0, 3, 2.92908865348882330e-02, 9.70709113465111795e-01),
    (5.0, 3, 1.54404982911013649e-05, 9.99984559501708947e-01),
    (8.0, 3, 8.20805294514446377e-14, 9.99999999999917955e-01),
    (0.1, 5, 9.99999469972995714e-01, 5.30027004268651878e-07),
    (0.5, 5, 9.98479181446631614e-01, 1.52081855336843978e-03),
    (1.0, 5, 9.62565773247296419e-01, 3.74342267527036296e-02),
    (2.0, 5, 5.49415951352780207e-01, 4.50584048647219793e-01),
    (3.0, 5, 1.09064157949772367e-01, 8.90935842050227689e-01),
    (5.0, 5, 1.39333791185626186e-04, 9.99860666208814419e-01),
    (8.0, 5, 1.80658905929870394e-12, 9.99999999998193445e-01),
    (0.1, 6, 9.99999979244635684e-01, 2.07553643665517640e-08),
    (0.5, 6, 9.99703522459111982e-01, 2.96477540888020205e-04),
    (1.0, 6, 9.85612322033029287e-01, 1.43876779669706873e-02),
    (2.0, 6, 6.76676416183063512e-01, 3.23323583816936544e-01),
    (3.0, 6, 1.73578070910036047e-01, 8.26421929089963925e-01),
    (5.0, 6, 3.41454596891708248e-04, 9.99658545403108278e-01),
    (8.0, 6, 6.90197022425632591e-12, 9.99999999993098077e-01),
    (0.1, 10, 9.99999999999974021e-01, 2.59333918983954076e-14),
    (0.5, 10, 9.99999770808978616e-01, 2.29191021365241190e-07),
    (1.0, 10, 9.99827884370044107e-01, 1.72115629955840775e-04),
    (2.0, 10, 9.47346982656288805e-01, 5.26530173437111601e-02),
    (3.0, 10, 5.32103576374715503e-01, 4.67896423625284497e-01),
    (5.0, 10, 5.34550548713406438e-03, 9.94654494512865917e-01),
    (8.0, 10, 6.29371035293333267e-10, 9.99999999370629000e-01),
    (0.1, 12, 1.00000000000000000e+00, 2.16085860859593824e-17),
    (0.5, 12, 9.99999995239546746e-01, 4.76045328444199646e-09),
    (1.0, 12, 9.99985835062677686e-01, 1.41649373223424912e-05),
    (2.0, 12, 9.83436391519385555e-01, 1.65636084806144376e-02),
    (3.0, 12, 7.02930434860827402e-01, 2.97069565139172542e-01),
    (5.0, 12, 1.48228745974415561e-02, 9.85177125402558418e-01),
    (8.0, 12, 4.17052838324186009e-09, 9.99999995829471633e-01),
    (0.1, 25, 1.00000000000000000e+00, 1.00457114112243109e-38),
    (0.5, 25, 1.00000000000000000e+00, 2.67911873208708614e-21),
    (1.0, 25, 9.99999999999936384e-01, 6.35609831662873751e-14),
    (2.0, 25, 9.99999463062159033e-01, 5.36937840942501543e-07),
    (3.0, 25, 9.98596197756504877e-01, 1.40380224349513291e-03),
    (5.0, 25, 4.62373662926613693e-01, 5.37626337073386362e-01),
    (8.0, 25, 2.87508897470817036e-05, 9.99971249110252924e-01),
    (0.1, 50, 1.00000000000000000e+00, 1.91212589406906578e-83),
    (0.5, 50, 1.00000000000000000e+00, 1.51324919134959206e-48),
    (1.0, 50, 1.00000000000000000e+00, 1.18818533935484467e-33),
    (2.0, 50, 1.00000000000000000e+00, 3.17078667580250535e-19),
    (3.0, 50, 9.99999999981499021e-01, 1.85009832387282308e-11),
    (5.0, 50, 9.98807551151768336e-01, 1.19244884823170127e-03),
    (8.0, 50, 8.81006894834960447e-02, 9.11899310516503969e-01),
];

/// (β, d, Ψ_d⁻¹(β))
const PSI_INV: &[(f64, u32, f64)] = &[
    (0.5, 1, 6.74489750196081705e-01),
    (0.1, 1, 1.64485362695147264e+00),
    (1e-3, 1, 3.29052673149189490e+00),
    (1e-6, 1, 4.89163847569859023e+00),
    (1e-10, 1, 6.46695108724051604e+00),
    (0.5, 2, 1.17741002251547466e+00),
    (0.1, 2, 2.14596602628934718e+00),
    (1e-3, 2, 3.71692218884983827e+00),
    (1e-6, 2, 5.25652176975693219e+00),
    (1e-10, 2, 6.78614042441511156e+00),
    (0.5, 3, 1.53817225445505223e+00),
    (0.1, 3, 2.50027771080940608e+00),
    (1e-3, 3, 4.03314222365615738e+00),
    (1e-6, 3, 5.53758518726471571e+00),
    (1e-10, 3, 7.03861889347076897e+00),
    (0.5, 6, 2.31260040375485554e+00),
    (0.1, 6, 3.26261255371648762e+00),
    (1e-3, 6, 4.73896027466208292e+00),
    (1e-6, 6, 6.18533235786159530e+00),
    (1e-10, 6, 7.63490687288712344e+00),
    (0.5, 12, 3.36753951386233030e+00),
    (0.1, 12, 4.30689537680023538e+00),
    (1e-3, 12, 5.73667938858014015e+00),
    (1e-6, 12, 7.12918313265092429e+00),
    (1e-10, 12, 8.52610075319556415e+00),
    (0.5, 25, 4.93321261429955982e+00),
    (0.1, 25, 5.86358141561562629e+00),
    (1e-3, 25, 7.25394070668990487e+00),
    (1e-6, 25, 8.59619326346657431e+00),
    (1e-10, 25, 9.93961702065737285e+00),
];

const NORMAL_CDF: &[(f64, f64)] = &[
    (-37.0, 5.72557122252457710e-300),
    (-10.0, 7.61985302416052545e-24),
    (-5.0, 2.86651571879193912e-07),
    (-1.0, 1.58655253931457046e-01),
    (0.3, 6.17911422188952675e-01),
    (2.0, 9.77249868051820791e-01),
    (8.0, 9.99999999999999334e-01),
];

const NORMAL_QUANTILE: &[(f64, f64)] = &[
    (1e-300, -3.70470962993612005e+01),
    (1e-20, -9.26234008979840695e+00),
    (1e-5, -4.26489079392282466e+00),
    (0.3, -5.24400512708040778e-01),
    (0.975, 1.95996398454005427e+00),
];

/// (c, d, I_{1−c²}((d−1)/2, ½))
const SECTOR: &[(f64, u32, f64)] = &[
    (0.0, 2, 1.00000000000000000e+00),
    (0.1, 2, 9.36231439141480104e-01),
    (0.5, 2, 6.66666666666666630e-01),
    (0.9, 2, 2.87132586257412503e-01),
    (0.999, 2, 2.84728748124793221e-02),
    (0.0, 3, 1.00000000000000000e+00),
    (0.1, 3, 9.00000000000000022e-01),
    (0.5, 3, 5.00000000000000000e-01),
    (0.9, 3, 9.99999999999999778e-02),
    (0.999, 3, 1.00000000000000089e-03),
    (0.0, 6, 1.00000000000000000e+00),
    (0.1, 6, 8.31082278972056443e-01),
    (0.5, 6, 2.53169995100322620e-01),
    (0.9, 6, 5.75151518190288209e-03),
    (0.999, 6, 6.07045358189335497e-08),
    (0.0, 12, 1.00000000000000000e+00),
    (0.1, 12, 7.45149907990547922e-01),
    (0.5, 12, 8.18642311656943844e-02),
    (0.9, 12, 2.77160770361742065e-05),
    (0.999, 12, 3.35911474926759639e-16),
    (0.0, 25, 1.00000000000000000e+00),
    (0.1, 25, 6.26934706062042157e-01),
    (0.5, 25, 9.29369743039387686e-03),
    (0.9, 25, 3.92891190364119893e-10),
    (0.999, 25, 6.56850350056947492e-34),
];

#[test]
fn psi_matches_reference_in_both_tails() {
    for &(r, d, value, complement) in PSI {
        let p = psi(r, d).unwrap();
        assert!(rel_err(p.value(), value) < 1e-12, "Ψ_{d}({r}) = {} vs {value}", p.value());
        assert!(
            rel_err(p.complement(), complement) < 1e-12,
            "1 − Ψ_{d}({r}) = {} vs {complement}",
            p.complement()
        );
        let cdf = chi2_cdf(r * r, d).unwrap();
        assert!(rel_err(cdf.value(), complement) < 1e-12);
    }
}

#[test]
fn psi_inverse_matches_reference() {
    for &(beta, d, r) in PSI_INV {
        let got = psi_inv(beta, d).unwrap();
        assert!(rel_err(got, r) < 1e-11, "Ψ_{d}⁻¹({beta}) = {got} vs {r}");
    }
}

#[test]
fn normal_cdf_matches_reference() {
    for &(x, want) in NORMAL_CDF {
        let got = std_normal_cdf(x).unwrap();
        assert!(rel_err(got.value(), want) < 1e-12, "Φ({x}) = {} vs {want}", got.value());
    }
}

#[test]
fn normal_quantile_matches_reference() {
    for &(p, want) in NORMAL_QUANTILE {
        let got = std_normal_quantile(p).unwrap();
        assert!(rel_err(got, want) < 1e-11, "Φ⁻¹({p}) = {got} vs {want}");
    }
}

#[test]
fn sector_fraction_matches_reference() {
    for &(c, d, want) in SECTOR {
        let got = sector_fraction(c, d).unwrap();
        assert!(rel_err(got, want) < 1e-11, "𝓘({c}; {d}) = {got} vs {want}");
    }
}

#[test]
fn three_dimensional_cone_is_linear_in_cosine() {
    // Archimedes: the cap above height c on the unit sphere has area ∝ 1 − c
    for i in 0..=20 {
        let c = i as f64 / 20.0;
        assert!((sector_fraction(c, 3).unwrap() - (1.0 - c)).abs() < 1e-13);
    }
}

#[test]
fn dth_order_matches_high_precision_evaluation() {
    let cases = [
        (
            vec![-2.0, -1.0],
            SymMatrix::from_rows(&[vec![1.1, -0.8], vec![-0.8, 1.0]]).unwrap(),
            3.06372604274268101e-01,
        ),
        (
            vec![-1.5, -2.5, -3.0],
            SymMatrix::from_rows(&[
                vec![1.0, 0.2, 0.1],
                vec![0.2, 2.0, 0.3],
                vec![0.1, 0.3, 1.5],
            ])
            .unwrap(),
            2.09878478328454549e-01,
        ),
        (
            vec![-3.0, -3.2, -3.5, -4.0, -4.1, -5.0],
            SymMatrix::from_fn(6, |i, j| if i == j { 1.0 } else { 0.1 }),
            5.09735140207756739e-03,
        ),
    ];
    for (mean, cov, want) in cases {
        let g = GaussianVec::new(mean, cov).unwrap();
        let got = risk_dth_order(&g).unwrap().risk().unwrap();
        assert!(rel_err(got, want) < 1e-11, "β_T,d = {got} vs {want}");
    }
}
