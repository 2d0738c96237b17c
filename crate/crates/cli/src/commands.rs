use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use pivotfun::bimodule::{
    morita_decide_fhilb, verify_bimodule, verify_morita_witness, DaggerBimodule, DEFAULT_ATTEMPTS,
};
use pivotfun::cdagcat::{standard_duality, CatObject};
use pivotfun::fixtures::{self, CORPUS_SEED};
use pivotfun::frobenius::{center_basis, matrix_algebra, pants as pants_of, verify_frobenius, FrobeniusMonoid};
use pivotfun::repg::functor::{verify_fibre_functor, FibreFunctor};
use pivotfun::repg::group::{verify_group, FiniteGroup};
use pivotfun::repg::rep::UnitaryRep;
use pivotfun::report::Check;
use pivotfun::upt::{
    classify_upts, frobenius_from_upt, graded_upt, modification_space, upt_dagger, upt_dual, verify_modification,
    verify_upt, verify_upt_duality, Modification, Upt,
};
use pivotfun::{json, CMatrix, Error, Report, Status, Tolerance, C64};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::Kind;

pub struct Ctx {
    echo: String,
    tol: Tolerance,
    seed: u64,
    out: Option<PathBuf>,
}

impl Ctx {
    pub fn new(echo: String, tol: f64, seed: u64, out: Option<PathBuf>) -> pivotfun::Result<Self> {
        Ok(Ctx {
            echo,
            tol: Tolerance::new(tol)?,
            seed,
            out,
        })
    }
}

pub struct Outcome(pub ExitCode);

type Res = pivotfun::Result<Outcome>;

#[derive(Serialize)]
struct Output<'a, T: Serialize> {
    command: &'a str,
    tol: f64,
    seed: u64,
    status: Status,
    checks: &'a [Check],
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<T>,
}

fn exit_for(status: Status) -> ExitCode {
    match status {
        Status::Pass | Status::Skipped => ExitCode::SUCCESS,
        Status::Fail => ExitCode::from(1),
        Status::Inconclusive => ExitCode::from(3),
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Certification { .. } | Error::NotUnitary(_) | Error::NotACocycle { .. } | Error::NotAnIdempotent(_) => 1,
        Error::UnsupportedInstance(_) => 3,
        _ => 2,
    }
}

fn kind_of(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::Certification { .. } => "certification",
        Error::UnsupportedInstance(_) => "unsupported",
        Error::NotUnitary(_) => "not_unitary",
        _ => "structural",
    }
}

pub fn emit_error(e: &Error) -> ExitCode {
    let mut body = serde_json::Map::new();
    body.insert("error".into(), kind_of(e).into());
    body.insert("message".into(), e.to_string().into());
    if let Error::Certification { stage, .. } = e {
        body.insert("stage".into(), stage.clone().into());
    }
    print_out(&serde_json::Value::Object(body).to_string());
    eprintln!("pivotfun: {e}");
    ExitCode::from(error_code(e))
}

/// Writes to stdout, tolerating a closed pipe.
fn print_out(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn read<T: DeserializeOwned>(path: &Path) -> pivotfun::Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    json::from_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn write<T: Serialize + ?Sized>(path: &Path, value: &T) -> pivotfun::Result<()> {
    let text = json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| Error::Structural(format!("cannot write {}: {e}", path.display())))
}

fn emit<T: Serialize>(ctx: &Ctx, report: &Report, result: Option<T>) -> Res {
    let status = report.status();
    let out = Output {
        command: &ctx.echo,
        tol: ctx.tol.eps(),
        seed: ctx.seed,
        status,
        checks: &report.checks,
        result,
    };
    print_out(&json::to_string_pretty(&out)?);
    Ok(Outcome(exit_for(status)))
}

fn prefixed(command: &str, tol: Tolerance, parts: Vec<(&str, Report)>) -> Report {
    let mut r = Report::new(command, tol);
    for (p, x) in parts {
        r.absorb(p, x);
    }
    r
}

pub fn check(ctx: &Ctx, path: &Path, kind: Kind) -> Res {
    let tol = ctx.tol;
    let report = match kind {
        Kind::Group => {
            let v: serde_json::Value = read(path)?;
            let table: Vec<Vec<usize>> = serde_json::from_value(v.get("table").cloned().unwrap_or_default())
                .map_err(|e| Error::Parse(format!("{}: table: {e}", path.display())))?;
            verify_group(&table)?
        }
        Kind::Rep => read::<UnitaryRep>(path)?.verify(tol),
        Kind::Functor => verify_fibre_functor(&read::<FibreFunctor>(path)?, tol)?,
        Kind::Frobenius => verify_frobenius(&read::<FrobeniusMonoid>(path)?, tol)?,
        Kind::Bimodule => verify_bimodule(&read::<DaggerBimodule>(path)?, tol)?,
        Kind::Upt => verify_upt(&read::<Upt>(path)?, tol)?,
        Kind::Modification => verify_modification(&read::<Modification>(path)?, tol)?,
    };
    emit::<()>(ctx, &report, None)
}

/// Runs `verify_upt` on the input; a failing input is reported and nothing
/// is constructed.
fn with_verified_upt<T: Serialize>(
    ctx: &Ctx,
    path: &Path,
    build: impl FnOnce(&Upt) -> pivotfun::Result<(T, Report)>,
) -> Res {
    let a: Upt = read(path)?;
    let input = verify_upt(&a, ctx.tol)?;
    if !input.passed() {
        return emit::<()>(ctx, &prefixed(&ctx.echo, ctx.tol, vec![("input", input)]), None);
    }
    let (artifact, certificate) = build(&a)?;
    let report = prefixed(&ctx.echo, ctx.tol, vec![("input", input), ("certificate", certificate)]);
    match (&ctx.out, report.passed()) {
        (Some(out), true) => {
            write(out, &artifact)?;
            emit::<()>(ctx, &report, None)
        }
        (None, true) => emit(ctx, &report, Some(&artifact)),
        (_, false) => emit::<()>(ctx, &report, None),
    }
}

pub fn pants(ctx: &Ctx, path: &Path) -> Res {
    with_verified_upt(ctx, path, |a| frobenius_from_upt(a, ctx.tol))
}

pub fn dual(ctx: &Ctx, path: &Path) -> Res {
    with_verified_upt(ctx, path, |a| Ok((upt_dual(a)?, verify_upt_duality(a, ctx.tol)?)))
}

pub fn dagger(ctx: &Ctx, path: &Path) -> Res {
    with_verified_upt(ctx, path, |a| {
        let d = upt_dagger(a)?;
        let r = verify_upt(&d, ctx.tol)?;
        Ok((d, r))
    })
}

pub fn morita(ctx: &Ctx, a: &Path, b: &Path, witness: Option<&[PathBuf]>) -> Res {
    let (ma, mb): (FrobeniusMonoid, FrobeniusMonoid) = (read(a)?, read(b)?);
    let tol = ctx.tol;
    let mut r = prefixed(
        &ctx.echo,
        tol,
        vec![("a", verify_frobenius(&ma, tol)?), ("b", verify_frobenius(&mb, tol)?)],
    );
    if let Some([m, n]) = witness {
        let (m, n): (DaggerBimodule, DaggerBimodule) = (read(m)?, read(n)?);
        r.absorb(
            "witness",
            verify_morita_witness(&ma, &mb, &m, &n, tol, ctx.seed, DEFAULT_ATTEMPTS)?,
        );
    } else if ma.carrier().instance() == "fhilb" && mb.carrier().instance() == "fhilb" {
        let (za, zb) = (center_basis(&ma)?.len(), center_basis(&mb)?.len());
        let same = morita_decide_fhilb(&ma, &mb)?;
        r.push(
            "center_dimension",
            if same { Status::Pass } else { Status::Fail },
            (za as f64 - zb as f64).abs(),
            Some(format!("{za} vs {zb}")),
        );
    } else {
        r.push(
            "morita",
            Status::Inconclusive,
            f64::NAN,
            Some("no decision procedure for this instance without witnesses".into()),
        );
    }
    emit::<()>(ctx, &r, None)
}

#[derive(Serialize)]
struct RoundTripResult {
    deviation: f64,
    f: CMatrix,
    e: Upt,
    tau: CMatrix,
}

pub fn roundtrip(ctx: &Ctx, a1: &Path, a2: &Path, e: &Path, tau: &Path) -> Res {
    let (a1, a2, e): (Upt, Upt, Upt) = (read(a1)?, read(a2)?, read(e)?);
    let tau: CMatrix = read(tau)?;
    let rt = pivotfun::upt::roundtrip(&a1, &a2, &e, &tau, ctx.tol)?;
    let mut r = prefixed(
        &ctx.echo,
        ctx.tol,
        vec![
            ("forward", rt.forward.certificate.clone()),
            ("backward", rt.back.certificate.clone()),
            ("rederived", rt.rederived.certificate.clone()),
        ],
    );
    let scale = rt.forward.f.frobenius_norm().max(1.0);
    r.residual("deviation", None, rt.deviation, scale);
    let result = RoundTripResult {
        deviation: rt.deviation,
        f: rt.forward.f,
        e: rt.back.e,
        tau: rt.back.tau,
    };
    emit(ctx, &r, Some(result))
}

pub fn classify(ctx: &Ctx, group: &Path, max_dim: usize) -> Res {
    let g: FiniteGroup = read(group)?;
    let c = classify_upts(Arc::new(g), max_dim, ctx.tol, ctx.seed, DEFAULT_ATTEMPTS)?;
    let mut r = Report::new(&ctx.echo, ctx.tol);
    for (k, class) in c.classes.iter().enumerate() {
        r.absorb(&format!("class {k}"), class.certificate.clone());
    }
    if let Some(out) = &ctx.out {
        write(out, &c)?;
        return emit::<()>(ctx, &r, None);
    }
    emit(ctx, &r, Some(&c))
}

/// Example artifacts, written under stable names.
pub fn fixtures(ctx: &Ctx, dir: &Path) -> Res {
    let tol = ctx.tol;
    fs::create_dir_all(dir).map_err(|e| Error::Structural(format!("cannot create {}: {e}", dir.display())))?;
    let put = |name: &str, v: &dyn erased::Json| -> pivotfun::Result<()> {
        let text = v.to_json()?;
        fs::write(dir.join(name), text + "\n").map_err(|e| Error::Structural(format!("cannot write {name}: {e}")))
    };
    let z2 = fixtures::objects(FiniteGroup::cyclic(2));
    let klein = fixtures::objects(FiniteGroup::klein());
    put("group-trivial.json", &FiniteGroup::trivial())?;
    put("group-z2.json", &FiniteGroup::cyclic(2))?;
    put("group-klein.json", &FiniteGroup::klein())?;
    put(
        "rep-klein-regular.json",
        &UnitaryRep::regular(Arc::new(FiniteGroup::klein())),
    )?;
    put("monoid-trivial.json", &FrobeniusMonoid::trivial())?;
    put("monoid-matrix2.json", &matrix_algebra(2))?;
    put("monoid-pointwise2.json", &FrobeniusMonoid::pointwise(2))?;
    let graded = CatObject::ghilb(Arc::new(FiniteGroup::cyclic(2)), &[1, 1])?;
    put("monoid-graded.json", &pants_of(&standard_duality(&graded), tol)?)?;
    put("bimodule-columns2.json", &DaggerBimodule::columns(2, tol)?)?;
    put("bimodule-rows2.json", &DaggerBimodule::rows(2, tol)?)?;
    put("functor-klein-twisted.json", &fixtures::twisted_klein_functor(tol)?)?;
    put(
        "functor-klein-corrupted.json",
        &fixtures::corrupted_klein_functor(1, 2, tol)?,
    )?;
    let id = Upt::identity(Arc::new(FibreFunctor::canonical(z2.clone())));
    put("upt-identity-z2.json", &id)?;
    put("upt-graded-z2.json", &graded_upt(&z2, &[1, 1])?)?;
    put("upt-graded-klein.json", &graded_upt(&klein, &[1, 1, 0, 0])?)?;
    let p = Upt::pauli(tol)?;
    put("upt-pauli.json", &p)?;
    put("upt-pauli-sign-flipped.json", &fixtures::sign_flipped_pauli(tol)?)?;
    put("tau-identity.json", &CMatrix::identity(1))?;
    let mut f = CMatrix::zeros(2, 2);
    let basis = modification_space(&p, &p)?;
    for (k, b) in basis.iter().enumerate() {
        f = f.add(&b.scale(C64::new(1.0 + k as f64, 0.5)));
    }
    put("modification-pauli.json", &Modification::new(p.clone(), p.clone(), f)?)?;
    let cases = fixtures::equivalence_cases(CORPUS_SEED, tol)?;
    for (tag, name) in [
        ("z2", "z2 relabeling (2,1) to (1,2)"),
        ("pauli", "pauli twisted by a character evaluation"),
    ] {
        let case = cases
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::Structural("missing equivalence case".into()))?;
        put(&format!("rt-{tag}-a1.json"), &case.a1)?;
        put(&format!("rt-{tag}-a2.json"), &case.a2)?;
        put(&format!("rt-{tag}-e.json"), &case.e)?;
        put(&format!("rt-{tag}-tau.json"), &case.tau)?;
        let mut bad = case.tau.clone();
        bad.set(0, 0, bad.get(0, 0) + C64::new(1e-3, 0.0));
        put(&format!("rt-{tag}-tau-corrupted.json"), &bad)?;
    }
    let mut r = Report::new(&ctx.echo, tol);
    r.flag("written", Some(dir.display().to_string()), true);
    emit::<()>(ctx, &r, None)
}

mod erased {
    pub trait Json {
        fn to_json(&self) -> pivotfun::Result<String>;
    }

    impl<T: serde::Serialize> Json for T {
        fn to_json(&self) -> pivotfun::Result<String> {
            pivotfun::json::to_string_pretty(self)
        }
    }
}
