//! Individual checks. Each one samples the plan, evaluates a pointwise
//! residual `|lhs − rhs|` together with the magnitude of the reference side,
//! and aggregates into a [`ResidualReport`].

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{collect, sample_points, ResidualReport, SamplingPlan, VerifyError};
use crate::fields::{
    fueter_laplacian, fueter_map, ComplexSeed, QuaternionField, RadialQuotient,
    RandomQuaternionField, ScalarField, StructuredField, TrigPolynomial, IotaTimes,
};
use crate::operators::{
    angular_derivative, angular_second, fueter_conj_left, fueter_conj_right, fueter_left,
    fueter_left_spherical, fueter_right, laplacian, second_partial, spherical_gradient, Backend,
    DbarLaplacianField, DerivativeEngine, Operator, OperatorField,
};
use crate::quat::{frame_at, Coord, Quaternion, SphericalPoint};

type Q = Quaternion<f64>;
type P = SphericalPoint<f64>;
type Engine = DerivativeEngine<f64>;

/// First-derivative checks, by backend.
pub fn first_derivative_tol(backend: Backend) -> f64 {
    match backend {
        Backend::Analytic => 1e-9,
        Backend::Fd4 => 1e-6,
        Backend::Fd2 => 1e-4,
    }
}

/// Checks involving second derivatives keep `nominal` when they difference
/// analytic partials and fall back to `1e-4` under pure stencils.
pub fn second_derivative_tol(nominal: f64, backend: Backend) -> f64 {
    match backend {
        Backend::Analytic => nominal,
        Backend::Fd2 | Backend::Fd4 => nominal.max(TOL_PURE_FD_SECOND),
    }
}

pub const TOL_PURE_FD_SECOND: f64 = 1e-4;
pub const TOL_HARMONIC: f64 = 1e-6;
pub const TOL_THEOREM_DBAR: f64 = 1e-6;
pub const TOL_THEOREM_DIRECT: f64 = 1e-4;
pub const TOL_CROSS_ROUTE: f64 = 1e-6;
pub const TOL_SECOND_ANGULAR: f64 = 1e-8;
pub const TOL_ANGULAR_LAPLACE: f64 = 1e-7;
pub const TOL_COMMUTATION: f64 = 1e-6;
pub const TOL_ANGULAR_V_HOLOMORPHY: f64 = 1e-6;
pub const TOL_FRAME: f64 = 1e-12;
pub const TOL_IOTA_PRODUCT: f64 = 1e-8;
pub const TOL_POWER: f64 = 1e-12;

/// Engine that differences a quantity already produced by `engine`.
///
/// Always the outer engine: the inner backend only changes how noisy the
/// differenced quantity is, and the outer step is sized for the worst case.
pub fn differencing_engine(_engine: &Engine) -> Engine {
    Engine::outer()
}

fn points_for(f: &StructuredField<f64>, plan: &SamplingPlan) -> Result<Vec<P>, VerifyError> {
    sample_points(plan, &f.seed_poles())
}

fn norm(q: Q) -> f64 {
    q.norm()
}

/// `D_l f = −2v/r`; for axial fields also `D_r f = −2v/r`.
pub fn check_condition(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    condition_report("condition", f.name(), f, plan, engine)
}

fn condition_report(
    id: &str,
    name: &str,
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = points_for(f, plan)?;
    let axial = f.is_axial();
    let acc = collect(&pts, |p| {
        let target = Q::from_real(-2.0 * f.v().eval(p)? / p.r);
        let mut res = norm(fueter_left(f, p, engine)? - target);
        if axial {
            res = res.max(norm(fueter_right(f, p, engine)? - target));
        }
        Ok((res, norm(target)))
    })?;
    acc.finalize(id, name, engine, first_derivative_tol(engine.backend))
}

/// `(∂_t + ι ∂_r) f = 0`.
pub fn check_holomorphy_tr(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = points_for(f, plan)?;
    let acc = collect(&pts, |p| {
        let g = spherical_gradient(f, p, engine)?;
        Ok((norm(g[0] + p.iota() * g[1]), 0.0))
    })?;
    acc.finalize("holomorphy_tr", f.name(), engine, first_derivative_tol(engine.backend))
}

/// The angular condition in its three equivalent forms:
/// `∂f/∂_lι = 2v`, `∂u/∂_lι = ι ∂v/∂_lι` and `∂(ιf)/∂_lι = 2u`.
pub fn check_angular_condition(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = points_for(f, plan)?;
    let iota_f = IotaTimes::new(f);
    let acc = collect(&pts, |p| {
        let (u, v) = (f.u().eval(p)?, f.v().eval(p)?);
        let two_v = Q::from_real(2.0 * v);
        let two_u = Q::from_real(2.0 * u);
        let r14 = norm(angular_derivative(f, p, engine)? - two_v);
        let iota_dv = p.iota() * angular_derivative(f.v(), p, engine)?;
        let r21 = norm(angular_derivative(f.u(), p, engine)? - iota_dv);
        let r23 = norm(angular_derivative(&iota_f, p, engine)? - two_u);
        let scale = norm(two_v).max(norm(iota_dv)).max(norm(two_u));
        Ok((r14.max(r21).max(r23), scale))
    })?;
    acc.finalize("angular_condition", f.name(), engine, first_derivative_tol(engine.backend))
}

/// `u_α / sin β = v_β` and `v_α / sin β = −u_β`.
pub fn check_cr_system(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    cr_report(f.name(), f.u(), f.v(), &f.seed_poles(), plan, engine)
}

/// CR residual of an arbitrary pair `(u, v)`, e.g. an angular pair.
pub fn check_cr_pair(
    name: &str,
    u: &Arc<dyn ScalarField<f64>>,
    v: &Arc<dyn ScalarField<f64>>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    cr_report(name, u, v, &[], plan, engine)
}

fn cr_report(
    name: &str,
    u: &Arc<dyn ScalarField<f64>>,
    v: &Arc<dyn ScalarField<f64>>,
    poles: &[num_complex::Complex<f64>],
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = sample_points(plan, poles)?;
    let acc = collect(&pts, |p| {
        let du = spherical_gradient(u, p, engine)?;
        let dv = spherical_gradient(v, p, engine)?;
        let s = p.beta.sin();
        let (a, b) = (Coord::Alpha as usize, Coord::Beta as usize);
        let r15 = (du[a].w / s - dv[b].w).abs();
        let r16 = (dv[a].w / s + du[b].w).abs();
        Ok((r15.max(r16), dv[b].w.abs().max(du[b].w.abs())))
    })?;
    acc.finalize("cr_system", name, engine, first_derivative_tol(engine.backend))
}

/// `∂f/∂t` satisfies the condition again.
pub fn check_t_derivative_closure(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let g = f.t_derivative()?;
    condition_report("t_derivative_closure", f.name(), &g, plan, engine)
}

/// `Δ(v/r) = 0`.
pub fn check_harmonic_v_over_r(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = points_for(f, plan)?;
    let q = RadialQuotient::new(f.v().clone(), 1.0);
    let acc = collect(&pts, |p| Ok((norm(laplacian(&q, p, engine)?), 0.0)))?;
    acc.finalize(
        "harmonic_v_over_r",
        f.name(),
        engine,
        second_derivative_tol(TOL_HARMONIC, engine.backend),
    )
}

/// How `Δf` is obtained before `D_l` and `D_r` are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremRoute {
    /// First-derivative formula valid under the defect condition.
    Dbar,
    /// Numerical four-variable Laplacian.
    Direct,
    /// Both of the above; the report keeps the larger residual.
    Both,
}

impl TheoremRoute {
    pub fn check_id(self) -> &'static str {
        match self {
            TheoremRoute::Dbar => "theorem_dbar",
            TheoremRoute::Direct => "theorem_direct",
            TheoremRoute::Both => "theorem",
        }
    }

    fn tol(self, backend: Backend) -> f64 {
        match self {
            TheoremRoute::Dbar => second_derivative_tol(TOL_THEOREM_DBAR, backend),
            TheoremRoute::Direct | TheoremRoute::Both => TOL_THEOREM_DIRECT,
        }
    }
}

/// `D_l Δf = D_r Δf = 0`. Both routes for condition fields, the direct
/// route only for the others (the first-derivative formula does not apply).
pub fn check_theorem(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let route = if f.satisfies_condition() {
        TheoremRoute::Both
    } else {
        TheoremRoute::Direct
    };
    let mut report = check_theorem_route(f, plan, engine, route)?;
    report.check = "theorem".into();
    Ok(report)
}

pub fn check_theorem_route(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
    route: TheoremRoute,
) -> Result<ResidualReport, VerifyError> {
    let pts = points_for(f, plan)?;
    let dbar = match route {
        TheoremRoute::Dbar | TheoremRoute::Both => Some(DbarLaplacianField::new(f, *engine)?),
        TheoremRoute::Direct => None,
    };
    let direct = match route {
        TheoremRoute::Direct | TheoremRoute::Both => {
            Some(OperatorField::new(Operator::Laplacian, f, *engine))
        }
        TheoremRoute::Dbar => None,
    };
    let dbar_outer = differencing_engine(engine);
    let direct_outer = differencing_engine(engine);
    let acc = collect(&pts, |p| {
        let mut res = 0.0f64;
        if let Some(lap) = &dbar {
            res = res.max(norm(fueter_left(lap, p, &dbar_outer)?));
            res = res.max(norm(fueter_right(lap, p, &dbar_outer)?));
        }
        if let Some(lap) = &direct {
            res = res.max(norm(fueter_left(lap, p, &direct_outer)?));
            res = res.max(norm(fueter_right(lap, p, &direct_outer)?));
        }
        Ok((res, 0.0))
    })?;
    acc.finalize(route.check_id(), f.name(), engine, route.tol(engine.backend))
}

/// The first-derivative Laplacian formula agrees with the numerical
/// Laplacian (condition fields only).
pub fn check_laplacian_cross_route(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = points_for(f, plan)?;
    let dbar = DbarLaplacianField::new(f, *engine)?;
    let acc = collect(&pts, |p| {
        let a = dbar.value(p)?;
        let b = laplacian(f, p, engine)?;
        Ok((norm(a - b), norm(b)))
    })?;
    acc.finalize(
        "laplacian_cross_route",
        f.name(),
        engine,
        second_derivative_tol(TOL_CROSS_ROUTE, engine.backend),
    )
}

/// Closed-form frame derivatives:
///
/// ```text
/// ι_α⁻¹(ι_α⁻¹)_α + ι_β⁻¹(ι_α⁻¹)_β = −ι ι_α⁻¹     ι_β⁻¹(ι_β⁻¹)_β = −ι ι_β⁻¹
/// (ι_β⁻¹)² = −1     (ι_α⁻¹)² = −1/sin²β     ι_α⁻¹(ι_β⁻¹)_α = −cot β
/// ```
///
/// Only `α, β` of the sample points are used.
pub fn check_frame_identities(plan: &SamplingPlan) -> Result<ResidualReport, VerifyError> {
    let pts = sample_points(plan, &[])?;
    let acc = collect(&pts, |p| {
        let fr = frame_at(p.alpha, p.beta)?;
        let d = fr.inverse_derivatives();
        let (ia, ib, iota) = (fr.inv_iota_alpha, fr.inv_iota_beta, fr.iota);
        let s = p.beta.sin();
        let res = [
            norm(ia * d.inv_alpha_d_alpha + ib * d.inv_alpha_d_beta + iota * ia),
            norm(ib * d.inv_beta_d_beta + iota * ib),
            norm(ib * ib + Q::one()),
            norm(ia * ia + Q::from_real(1.0 / (s * s))),
            norm(ia * d.inv_beta_d_alpha + Q::from_real(p.beta.cos() / s)),
        ];
        Ok((res.into_iter().fold(0.0, f64::max), 0.0))
    })?;
    acc.finalize("frame_identities", "frame", &Engine::analytic().with_h(0.0), TOL_FRAME)
}

/// `(∂/∂_lι)² v = −ι ∂v/∂_lι − v_αα/sin²β − v_ββ − cot β v_β` for a scalar
/// `v`; holds for every `C²` function.
pub fn check_second_angular_identity<S>(
    name: &str,
    v: &S,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError>
where
    S: ScalarField<f64> + QuaternionField<f64>,
{
    let pts = sample_points(plan, &[])?;
    let acc = second_angular_acc(v, &pts, engine, 0)?;
    acc.finalize(
        "second_angular_identity",
        name,
        engine,
        second_derivative_tol(TOL_SECOND_ANGULAR, engine.backend),
    )
}

fn second_angular_acc<S>(
    v: &S,
    pts: &[P],
    engine: &Engine,
    offset: usize,
) -> Result<super::Accumulator, VerifyError>
where
    S: ScalarField<f64> + QuaternionField<f64>,
{
    let mut acc = super::Accumulator::new();
    let part = collect(pts, |p| {
        let lhs = angular_second(v, p, engine)?;
        let s = p.beta.sin();
        let vb = spherical_gradient(v, p, engine)?[3];
        let vaa = second_partial(v, p, Coord::Alpha, Coord::Alpha, engine)?;
        let vbb = second_partial(v, p, Coord::Beta, Coord::Beta, engine)?;
        let rhs = -(p.iota() * angular_derivative(v, p, engine)?)
            - vaa.scale(1.0 / (s * s))
            - vbb
            - vb.scale(p.beta.cos() / s);
        Ok((norm(lhs - rhs), norm(rhs)))
    })?;
    for (i, res, scale, p) in part.entries {
        acc.push(offset + i, res, scale, p);
    }
    Ok(acc)
}

/// The identity above on `count` random trigonometric polynomials in
/// `(α, β)`, drawn from `seed`, aggregated into one report.
pub fn check_second_angular_random(
    count: usize,
    seed: u64,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = sample_points(plan, &[])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = super::Accumulator::new();
    for k in 0..count {
        let v = TrigPolynomial::<f64>::random(&mut rng, 4, 3, true);
        acc = acc.merge(second_angular_acc(&v, &pts, engine, k * pts.len())?);
    }
    acc.finalize(
        "second_angular_identity",
        "random-trig-polynomials",
        engine,
        second_derivative_tol(TOL_SECOND_ANGULAR, engine.backend),
    )
}

/// `v_αα / sin²β + v_ββ = −cot β v_β` for the `v` of a field.
pub fn check_angular_laplace_relation(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    angular_laplace_report(f.name(), f.v(), &f.seed_poles(), plan, engine)
}

/// The same relation for a bare scalar, e.g. a fixture without a partner.
pub fn check_angular_laplace_scalar(
    name: &str,
    v: &Arc<dyn ScalarField<f64>>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    angular_laplace_report(name, v, &[], plan, engine)
}

fn angular_laplace_report(
    name: &str,
    v: &Arc<dyn ScalarField<f64>>,
    poles: &[num_complex::Complex<f64>],
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = sample_points(plan, poles)?;
    let acc = collect(&pts, |p| {
        let s = p.beta.sin();
        let vb = spherical_gradient(v, p, engine)?[3].w;
        let vaa = second_partial(v, p, Coord::Alpha, Coord::Alpha, engine)?.w;
        let vbb = second_partial(v, p, Coord::Beta, Coord::Beta, engine)?.w;
        let rhs = -p.beta.cos() / s * vb;
        Ok(((vaa / (s * s) + vbb - rhs).abs(), rhs.abs()))
    })?;
    acc.finalize(
        "angular_laplace_relation",
        name,
        engine,
        second_derivative_tol(TOL_ANGULAR_LAPLACE, engine.backend),
    )
}

/// For a scalar `g`: `D_l g = D_r g` and
/// `D_l D̄_l g = D̄_l D_l g = D_r D̄_r g = Δg`.
pub fn check_operator_commutation<S>(
    name: &str,
    g: &S,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError>
where
    S: ScalarField<f64> + QuaternionField<f64>,
{
    let pts = sample_points(plan, &[])?;
    let acc = collect(&pts, |p| commutation_residual(g, p, engine, false))?;
    acc.finalize(
        "operator_commutation",
        name,
        engine,
        second_derivative_tol(TOL_COMMUTATION, engine.backend),
    )
}

/// The commutation chain on `g = −2v/r = D_l f`, where additionally
/// `D̄_l D_l g = 0`.
pub fn check_operator_commutation_field(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = points_for(f, plan)?;
    let g = RadialQuotient::new(f.v().clone(), -2.0);
    let acc = collect(&pts, |p| commutation_residual(&g, p, engine, true))?;
    acc.finalize(
        "operator_commutation",
        f.name(),
        engine,
        second_derivative_tol(TOL_COMMUTATION, engine.backend),
    )
}

fn commutation_residual<S>(
    g: &S,
    p: &P,
    engine: &Engine,
    harmonic: bool,
) -> Result<(f64, f64), VerifyError>
where
    S: ScalarField<f64> + QuaternionField<f64>,
{
    let outer = differencing_engine(engine);
    let dl = OperatorField::new(Operator::FueterLeft, g, *engine);
    let dr = OperatorField::new(Operator::FueterRight, g, *engine);
    let dbl = OperatorField::new(Operator::FueterConjLeft, g, *engine);
    let dbr = OperatorField::new(Operator::FueterConjRight, g, *engine);
    let lap = laplacian(g, p, engine)?;
    let dbl_dl = fueter_conj_left(&dl, p, &outer)?;
    let dl_dbl = fueter_left(&dbl, p, &outer)?;
    let dr_dbr = fueter_right(&dbr, p, &outer)?;
    let dbr_dr = fueter_conj_right(&dr, p, &outer)?;
    let mut res = [
        norm(dl.value(p)? - dr.value(p)?),
        norm(dbl_dl - dl_dbl),
        norm(dbl_dl - lap),
        norm(dr_dbr - lap),
        norm(dbr_dr - lap),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if harmonic {
        res = res.max(norm(dbl_dl));
    }
    Ok((res, norm(lap)))
}

/// `(∂_t + ι ∂_r) f̃ = 2ṽ/r` and `D_l f̃ = 0` for `f̃ = Δ fueter(seed)`,
/// which is axial and left-regular.
pub fn check_axial_regularity(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let seed = f.fueter_seed().ok_or_else(|| VerifyError::NotApplicable {
        check: "axial_regularity".into(),
        field: f.name().into(),
    })?;
    let g = fueter_laplacian(*seed);
    let pts = points_for(f, plan)?;
    let acc = collect(&pts, |p| {
        let d = spherical_gradient(&g, p, engine)?;
        let target = Q::from_real(2.0 * g.v().eval(p)? / p.r);
        let r5 = norm(d[0] + p.iota() * d[1] - target);
        let regular = norm(fueter_left(&g, p, engine)?);
        Ok((r5.max(regular), norm(target)))
    })?;
    acc.finalize("axial_regularity", f.name(), engine, first_derivative_tol(engine.backend))
}

/// `(∂_t + ι ∂_r)(∂v/∂_lι) = 0`.
pub fn check_angular_v_holomorphy(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = points_for(f, plan)?;
    let w = OperatorField::new(Operator::Angular, f.v(), *engine);
    let outer = differencing_engine(engine);
    let acc = collect(&pts, |p| {
        let d = spherical_gradient(&w, p, &outer)?;
        Ok((norm(d[0] + p.iota() * d[1]), 0.0))
    })?;
    acc.finalize(
        "angular_v_holomorphy",
        f.name(),
        engine,
        second_derivative_tol(TOL_ANGULAR_V_HOLOMORPHY, engine.backend),
    )
}

/// Cartesian `D_l` against its spherical form.
pub fn check_spherical_cartesian_consistency(
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = points_for(f, plan)?;
    let acc = collect(&pts, |p| {
        let a = fueter_left(f, p, engine)?;
        let b = fueter_left_spherical(f, p, engine)?;
        Ok((norm(a - b), norm(a)))
    })?;
    acc.finalize(
        "spherical_cartesian_consistency",
        f.name(),
        engine,
        first_derivative_tol(engine.backend),
    )
}

/// `∂(ιf)/∂_lι = 2f − ι ∂f/∂_lι` on `count` random quaternion fields.
pub fn check_iota_product_rule(
    count: usize,
    seed: u64,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    let pts = sample_points(plan, &[])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = super::Accumulator::new();
    for k in 0..count {
        let f = RandomQuaternionField::<f64>::random(&mut rng, 3, 3);
        let iota_f = IotaTimes::new(&f);
        let part = collect(&pts, |p| {
            let lhs = angular_derivative(&iota_f, p, engine)?;
            let rhs = f.value(p)?.scale(2.0) - p.iota() * angular_derivative(&f, p, engine)?;
            Ok((norm(lhs - rhs), norm(rhs)))
        })?;
        for (i, res, scale, p) in part.entries {
            acc.push(k * pts.len() + i, res, scale, p);
        }
    }
    let tol = match engine.backend {
        Backend::Analytic => TOL_IOTA_PRODUCT,
        b => first_derivative_tol(b),
    };
    acc.finalize("iota_product_rule", "random-quaternion-fields", engine, tol)
}

/// `fueter(zⁿ)(p) = pⁿ` by repeated Hamilton products, `n = 2..=max_n`.
/// The pointwise residual is already relative: `|a − b| / |b|`.
pub fn check_quaternion_power(plan: &SamplingPlan, max_n: u32) -> Result<ResidualReport, VerifyError> {
    let pts = sample_points(plan, &[])?;
    let fields: Vec<_> = (2..=max_n).map(|n| fueter_map(ComplexSeed::power(n))).collect();
    let acc = collect(&pts, |p| {
        let q = p.to_quaternion();
        let mut res = 0.0f64;
        for (k, f) in fields.iter().enumerate() {
            let expect = q.powu(k as u32 + 2);
            res = res.max(norm(f.eval(p)? - expect) / norm(expect));
        }
        Ok((res, 0.0))
    })?;
    acc.finalize(
        "quaternion_power",
        &format!("fueter:z^2..z^{max_n}"),
        &Engine::analytic().with_h(0.0),
        TOL_POWER,
    )
}
