//! Command implementations: parse documents, run the library operations,
//! and render deterministic key=value reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use formkit::decomp::{
    self, decompose_by_contraction, lebesgue_decomposition, parallel_sum_forms,
    parallel_sum_forms_via_contraction, SumDecomposition,
};
use formkit::form::HermitianForm;
use formkit::monotone::{self, FormSequence, Sense};
use formkit::represent::{represent_form, verify_first_representation};
use formkit::{ErrorKind, Tolerance};

use crate::doc::{
    emit_document, fmt_f64, parse_document, ContractionDoc, DocError, Document, FormDoc,
    RelationDoc,
};

/// Exit taxonomy: 0 ok, 2 parse, 3 invariant, 4 precondition.
#[derive(Debug)]
pub struct CmdError {
    pub code: u8,
    pub message: String,
}

impl CmdError {
    fn parse(message: String) -> Self {
        CmdError { code: 2, message }
    }
}

impl From<DocError> for CmdError {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Parse(m) => CmdError::parse(m),
            DocError::Invalid(err) => err.into(),
        }
    }
}

impl From<formkit::Error> for CmdError {
    fn from(e: formkit::Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Invariant => 3,
            ErrorKind::Precondition => 4,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

pub type CmdResult = Result<String, CmdError>;

fn read_document(path: &Path) -> Result<Document, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::parse(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_document(&text)?)
}

fn expect_form(doc: Document, tol: &Tolerance, what: &str) -> Result<HermitianForm, CmdError> {
    match doc {
        Document::Form(f) => Ok(f.to_form(tol)?),
        other => Err(CmdError::parse(format!(
            "{what}: expected a form document, found kind {:?}",
            kind_name(&other)
        ))),
    }
}

fn kind_name(doc: &Document) -> &'static str {
    match doc {
        Document::Form(_) => "form",
        Document::Relation(_) => "relation",
        Document::Contraction(_) => "contraction",
        Document::Sequence(_) => "sequence",
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CmdError> {
    std::fs::write(path, contents)
        .map_err(|e| CmdError::parse(format!("cannot write {}: {e}", path.display())))
}

fn push_kv(out: &mut String, key: &str, value: impl AsRef<str>) {
    let _ = writeln!(out, "{key}={}", value.as_ref());
}

pub fn cmd_inspect(path: &Path, tol: &Tolerance) -> CmdResult {
    let doc = read_document(path)?;
    let mut out = String::new();
    match doc {
        Document::Form(f) => {
            let form = f.to_form(tol)?;
            let classification = form.classify(tol);
            push_kv(&mut out, "kind", "form");
            push_kv(&mut out, "ambient_dim", form.ambient().to_string());
            push_kv(&mut out, "dom_dim", form.dom_dim().to_string());
            push_kv(&mut out, "m(t)", fmt_f64(form.lower_bound()));
            push_kv(&mut out, "closable", classification.closable.to_string());
            push_kv(&mut out, "closed", classification.closed.to_string());
            push_kv(&mut out, "singular", classification.singular.to_string());
            push_kv(&mut out, "certificate", &classification.certificate);
        }
        Document::Relation(r) => {
            let rel = r.to_relation(tol)?;
            let parts = rel.parts(tol);
            push_kv(&mut out, "kind", "relation");
            push_kv(&mut out, "dim_h", rel.dim_h().to_string());
            push_kv(&mut out, "dim_k", rel.dim_k().to_string());
            push_kv(&mut out, "graph_dim", rel.graph_dim().to_string());
            push_kv(&mut out, "dom_dim", parts.dom.dim().to_string());
            push_kv(&mut out, "ran_dim", parts.ran.dim().to_string());
            push_kv(&mut out, "ker_dim", parts.ker.dim().to_string());
            push_kv(&mut out, "mul_dim", parts.mul.dim().to_string());
        }
        Document::Contraction(c) => {
            let k = c.to_contraction(tol)?;
            push_kv(&mut out, "kind", "contraction");
            push_kv(&mut out, "dim", k.dim().to_string());
            push_kv(
                &mut out,
                "projection_defect",
                fmt_f64(k.projection_defect()),
            );
            push_kv(&mut out, "is_projection", k.is_projection(tol).to_string());
            push_kv(
                &mut out,
                "overlap_dim",
                decomp::overlap_space(&k, tol).dim().to_string(),
            );
        }
        Document::Sequence(s) => {
            let seq = s.to_sequence(tol)?;
            push_kv(&mut out, "kind", "sequence");
            push_kv(
                &mut out,
                "encoding",
                match &seq {
                    FormSequence::Affine { .. } => "affine",
                    FormSequence::Chain { .. } => "chain",
                },
            );
            push_kv(&mut out, "sense", seq.sense().as_str());
            push_kv(&mut out, "ambient_dim", seq.ambient().to_string());
            if let Some(len) = seq.chain_len() {
                push_kv(&mut out, "chain_len", len.to_string());
            }
        }
    }
    Ok(out)
}

fn decomposition_report(d: &SumDecomposition, c: f64, tol: &Tolerance, dir: &Path) -> CmdResult {
    let parallel = parallel_sum_forms(&d.t1.shift(-c), &d.t2, tol)?;
    let mut out = String::new();
    push_kv(&mut out, "kind", "sum_decomposition");
    push_kv(&mut out, "c", fmt_f64(c));
    push_kv(&mut out, "codomain_dim", d.k.dim().to_string());
    push_kv(
        &mut out,
        "mutually_singular",
        d.flags.mutually_singular.to_string(),
    );
    push_kv(
        &mut out,
        "minimal_column",
        d.flags.minimal_column.to_string(),
    );
    push_kv(
        &mut out,
        "is_lebesgue_type",
        d.flags.is_lebesgue_type.to_string(),
    );
    push_kv(
        &mut out,
        "parallel_sum_norm",
        fmt_f64(parallel.matrix().norm()),
    );
    if let Some(cert) = &d.certificate {
        push_kv(&mut out, "certificate", cert);
    }
    write_file(
        &dir.join("t1.json"),
        &emit_document(&Document::Form(FormDoc::from_form(&d.t1))),
    )?;
    write_file(
        &dir.join("t2.json"),
        &emit_document(&Document::Form(FormDoc::from_form(&d.t2))),
    )?;
    write_file(
        &dir.join("k.json"),
        &emit_document(&Document::Contraction(ContractionDoc::from_contraction(
            &d.k,
        ))),
    )?;
    push_kv(&mut out, "wrote", "t1.json,t2.json,k.json");
    Ok(out)
}

pub fn cmd_decompose(
    form_path: &Path,
    c: f64,
    contraction_path: Option<&PathBuf>,
    lebesgue: bool,
    tol: &Tolerance,
) -> CmdResult {
    let form = expect_form(read_document(form_path)?, tol, "decompose input")?;
    let out_dir = form_path.parent().unwrap_or(Path::new("."));
    let decomposition = match (contraction_path, lebesgue) {
        (Some(kp), false) => {
            let k = match read_document(kp)? {
                Document::Contraction(c) => c.to_contraction(tol)?,
                other => {
                    return Err(CmdError::parse(format!(
                        "decompose: expected a contraction document, found kind {:?}",
                        kind_name(&other)
                    )))
                }
            };
            decompose_by_contraction(&form, c, &k, tol)?
        }
        (None, true) => lebesgue_decomposition(&form, c, tol)?,
        _ => {
            return Err(CmdError::parse(
                "decompose requires exactly one of --contraction <path> or --lebesgue".into(),
            ))
        }
    };
    decomposition_report(&decomposition, c, tol, out_dir)
}

pub fn cmd_represent(form_path: &Path, c: f64, tol: &Tolerance) -> CmdResult {
    let form = expect_form(read_document(form_path)?, tol, "represent input")?;
    let a = represent_form(&form, c, tol)?;
    let verified = verify_first_representation(&form, &a, tol)?;
    let parts = a.relation().parts(tol);
    let mut out = String::new();
    push_kv(&mut out, "kind", "selfadjoint_relation");
    push_kv(&mut out, "ambient_dim", a.ambient().to_string());
    push_kv(&mut out, "graph_dim", a.relation().graph_dim().to_string());
    push_kv(&mut out, "dom_dim", parts.dom.dim().to_string());
    push_kv(&mut out, "mul_dim", parts.mul.dim().to_string());
    push_kv(&mut out, "lower_bound", fmt_f64(a.lower_bound()));
    push_kv(&mut out, "first_representation", verified.to_string());
    let dir = form_path.parent().unwrap_or(Path::new("."));
    write_file(
        &dir.join("relation.json"),
        &emit_document(&Document::Relation(RelationDoc::from_relation(
            a.relation(),
        ))),
    )?;
    push_kv(&mut out, "wrote", "relation.json");
    Ok(out)
}

pub fn cmd_parallel(h1_path: &Path, h2_path: &Path, tol: &Tolerance) -> CmdResult {
    let h1 = expect_form(read_document(h1_path)?, tol, "parallel input 1")?;
    let h2 = expect_form(read_document(h2_path)?, tol, "parallel input 2")?;
    let variational = parallel_sum_forms(&h1, &h2, tol)?;
    let via_contraction = parallel_sum_forms_via_contraction(&h1, &h2, tol)?;
    let residual =
        (variational.matrix() - via_contraction.matrix_in(variational.domain().basis())).norm();
    let mut out = String::new();
    push_kv(&mut out, "kind", "parallel_sum");
    push_kv(&mut out, "ambient_dim", variational.ambient().to_string());
    push_kv(&mut out, "dom_dim", variational.dom_dim().to_string());
    push_kv(&mut out, "norm", fmt_f64(variational.matrix().norm()));
    push_kv(&mut out, "dual_path_residual", fmt_f64(residual));
    let dir = h1_path.parent().unwrap_or(Path::new("."));
    write_file(
        &dir.join("parallel.json"),
        &emit_document(&Document::Form(FormDoc::from_form(&variational))),
    )?;
    push_kv(&mut out, "wrote", "parallel.json");
    Ok(out)
}

pub fn cmd_limit(seq_path: &Path, lambda: f64, n_max: usize, tol: &Tolerance) -> CmdResult {
    let seq = match read_document(seq_path)? {
        Document::Sequence(s) => s.to_sequence(tol)?,
        other => {
            return Err(CmdError::parse(format!(
                "limit: expected a sequence document, found kind {:?}",
                kind_name(&other)
            )))
        }
    };
    let limit = monotone::limit(&seq, tol)?;
    let report = monotone::resolvent_convergence(&seq, lambda, n_max, None, tol)?;
    let mut out = String::new();
    push_kv(&mut out, "kind", "monotone_limit");
    push_kv(&mut out, "sense", seq.sense().as_str());
    push_kv(&mut out, "limit_dom_dim", limit.dom_dim().to_string());
    push_kv(&mut out, "limit_lower_bound", fmt_f64(limit.lower_bound()));
    push_kv(&mut out, "lambda", fmt_f64(lambda));
    push_kv(&mut out, "n_max", n_max.to_string());
    for (i, err) in report.errors.iter().enumerate() {
        push_kv(&mut out, &format!("err[{}]", i + 1), fmt_f64(*err));
    }
    push_kv(&mut out, "final_error", fmt_f64(report.final_error));
    push_kv(
        &mut out,
        "errors_nonincreasing",
        report.monotone_nonincreasing.to_string(),
    );
    match report.fitted_exponent {
        Some(p) => push_kv(&mut out, "fitted_exponent", fmt_f64(p)),
        None => push_kv(&mut out, "fitted_exponent", "none"),
    }
    let dir = seq_path.parent().unwrap_or(Path::new("."));
    write_file(
        &dir.join("limit.json"),
        &emit_document(&Document::Form(FormDoc::from_form(&limit))),
    )?;
    let mut wrote = vec!["limit.json"];
    if seq.sense() == Sense::Nonincreasing {
        let connection = monotone::limit_relation_connection(&seq, tol)?;
        push_kv(
            &mut out,
            "t_inf_dom_dim",
            connection.t_inf.dom_dim().to_string(),
        );
        push_kv(
            &mut out,
            "reg_closure_matches",
            connection.reg_closure_matches.to_string(),
        );
        push_kv(
            &mut out,
            "t_inf_equals_limit",
            connection.closed_equal.to_string(),
        );
        push_kv(
            &mut out,
            "singular_iff",
            connection.singular_iff.to_string(),
        );
        write_file(
            &dir.join("t_inf.json"),
            &emit_document(&Document::Form(FormDoc::from_form(&connection.t_inf))),
        )?;
        wrote.push("t_inf.json");
    }
    push_kv(&mut out, "wrote", wrote.join(","));
    Ok(out)
}
