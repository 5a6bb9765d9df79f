"""Command-line verification harness.

    gkn-extend <command> --config <path> [--out <path>] [--seed <int>] [--csv <path>]

Commands: check-symplectic, derive-bc, verify-gkn, spectrum, legendre, all.
Reports are JSON; exit code 0 when every check passes, 1 on a check
failure, 2 on a config/schema error.  Runs are deterministic for a fixed
seed (timings are reported but carry no information).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction

import numpy as np
from jsonschema import ValidationError, validate

from . import catalog
from .collocation import make_grid
from .extension import (
    ModelError,
    bc_to_json,
    boundary_conditions_from_rows,
    check_gkn_extended,
    extended_deficiency_vectors,
    model_from_json,
    verify_self_adjoint_domain,
)
from .legendre import (
    boundary_identity_check,
    eigen_check,
    extended_eigen_check,
    extended_orthogonality_check,
    gram_schmidt,
    lt_eigenvalue,
)
from .spectral import assemble, shooting_oracle, spectrum, symmetry_defect
from .symplectic import SymplecticError, form_eval, quotient_by, radical

COMMANDS = ("check-symplectic", "derive-bc", "verify-gkn", "spectrum", "legendre", "all")

DEFAULT_TOLERANCES = {
    "structural": 1e-12,
    "canonical": 1e-12,
    "defect": 1e-9,
    "sabotage_floor": 1e-4,
    "max_imag": 1e-8,
    "oracle_rel": 1e-6,
    "residual": 1e-8,
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["example"],
    "additionalProperties": False,
    "properties": {
        "example": {"enum": list(catalog.EXAMPLE_NAMES) + ["custom"]},
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                k: {"type": "number"} for k in catalog.DEFAULT_PARAMS
            },
        },
        "grid_N": {"type": "integer", "minimum": 16},
        "n_max": {"type": "integer", "minimum": 0, "maximum": 24},
        "seed": {"type": "integer"},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                k: {"type": "number", "exclusiveMinimum": 0} for k in DEFAULT_TOLERANCES
            },
        },
        "model": {"type": "object"},
        "candidates": {"type": "array"},
    },
}


class ConfigError(ValueError):
    pass


def load_config(path: str) -> dict:
    try:
        with open(path) as f:
            cfg = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}")
    try:
        validate(cfg, CONFIG_SCHEMA)
    except ValidationError as e:
        raise ConfigError(f"config schema violation: {e.message}")
    if cfg["example"] == "custom" and "model" not in cfg:
        raise ConfigError("custom example needs a 'model' section")
    return cfg


class Checks:
    """Accumulates named pass/fail checks for the report."""

    def __init__(self):
        self.items = []

    def add(self, name, expected, got, tolerance, ok):
        self.items.append(
            {
                "name": name,
                "expected": expected,
                "got": got,
                "tolerance": tolerance,
                "pass": bool(ok),
            }
        )

    def le(self, name, got, tol):
        self.add(name, f"<= {tol:g}", float(got), tol, got <= tol)

    def ge(self, name, got, floor):
        self.add(name, f">= {floor:g}", float(got), floor, got >= floor)

    def eq(self, name, expected, got):
        self.add(name, expected, got, None, expected == got)

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.items)


def _entry_from_config(cfg: dict):
    if cfg["example"] == "custom":
        model = model_from_json(cfg["model"])
        cands = []
        for item in cfg.get("candidates", []):
            tr = item["trace"]
            w = item.get("w", [])
            trace = tuple(complex(tr[2 * i], tr[2 * i + 1]) for i in range(len(tr) // 2))
            wv = np.array([complex(w[2 * i], w[2 * i + 1]) for i in range(len(w) // 2)])
            from .expressions import TraceVector

            cands.append((TraceVector(trace), wv))
        return catalog.CatalogEntry(
            "custom",
            model,
            tuple(cands),
            np.zeros((0, model.ambient_dim)),
            (),
            model.Omega.copy(),
        )
    return catalog.build_example(cfg["example"], cfg.get("params"))


def _tolerances(cfg: dict) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(cfg.get("tolerances", {}))
    return tol


def run_check_symplectic(entry, cfg, checks: Checks, seed: int):
    tol = _tolerances(cfg)["structural"]
    model = entry.model
    S = model.boundary.form.matrix
    checks.le("boundary_form_skew_residual", float(np.abs(S + S.conj().T).max()), tol)
    rng = np.random.default_rng(seed)
    worst_omega_t = 0.0
    worst_coupling = 0.0
    Tm = model.gkn_partial.matrix()
    if model.k:
        worst_omega_t = float(np.abs(model.Omega @ Tm).max())
    for _ in range(100):
        x = rng.standard_normal(model.trace_dim) + 1j * rng.standard_normal(model.trace_dim)
        om = model.Omega @ x
        for j in range(model.k):
            lhs = model.W.inner(om, model.W.Xi[:, j])
            rhs = form_eval(model.boundary.form, x, Tm[:, j])
            worst_coupling = max(worst_coupling, abs(lhs - rhs))
    checks.le("omega_annihilates_gkn_set", worst_omega_t, tol)
    checks.le("omega_coupling_identity", worst_coupling, tol)
    rad = radical(model.F_ext)
    from .symplectic import subspace_contains

    checks.eq("minimal_pairs_inside_radical", True, subspace_contains(rad, model.M_min))
    Fq, _ = quotient_by(model.F_ext, model.M_min)
    checks.eq("quotient_dimension", 2 * model.deficiency, Fq.dim)
    checks.eq("quotient_nondegenerate", True, Fq.nondegenerate)


def run_derive_bc(entry, cfg, checks: Checks, report: dict):
    tol = _tolerances(cfg)["canonical"]
    bc = entry.boundary_conditions()
    report["boundary_conditions_rendered"] = list(bc.human_readable)
    report["boundary_conditions"] = bc_to_json(bc)
    if entry.expected_canonical.size:
        delta = float(np.abs(bc.canonical - entry.expected_canonical).max())
        checks.le("canonical_matrix_matches_published", delta, tol)
        checks.eq("rendered_conditions", list(entry.expected_strings), list(bc.human_readable))
    sa = verify_self_adjoint_domain(entry.model, bc)
    expected_sa = entry.name != "fourier_3_2b"
    checks.eq("constrained_domain_self_adjoint", expected_sa, sa)
    return bc


def run_verify_gkn(entry, cfg, checks: Checks):
    if entry.candidates:
        rep = check_gkn_extended(entry.model, entry.candidates)
        checks.eq("gkn_independent_mod_minimal", True, rep.independent_mod_min)
        checks.eq("gkn_symmetric", True, rep.symmetric)
        checks.eq("gkn_count", True, rep.count_ok)
    for ctrl, cands in entry.controls.items():
        rep = check_gkn_extended(entry.model, cands)
        flag = {
            "symmetry": not rep.symmetric,
            "independence": not rep.independent_mod_min,
            "cardinality": not rep.count_ok,
        }[ctrl]
        checks.eq(f"control_{ctrl}_detected", True, flag)
        rows = np.vstack(
            [entry.model.stack(t, w).conj() @ entry.model.F_ext.matrix for t, w in cands]
        )
        bad = boundary_conditions_from_rows(entry.model, rows)
        checks.eq(
            f"control_{ctrl}_not_self_adjoint",
            False,
            verify_self_adjoint_domain(entry.model, bad),
        )


def run_spectrum(entry, cfg, checks: Checks, report: dict, seed: int):
    tols = _tolerances(cfg)
    model = entry.model
    a, b = (float(v) for v in model.expr.interval)
    grid = make_grid(cfg.get("grid_N", 64), a, b)
    bc = entry.boundary_conditions()
    op = assemble(model, bc, grid)

    if entry.name == "legendre_type":
        # singular coefficients: defect is checked on polynomial subspaces,
        # eigenvalue claims live in the exact module
        defect = symmetry_defect(op, trials=50, seed=seed, poly_degree=16)
        checks.le("symmetry_defect_polynomial_subspace", defect, tols["defect"])
    else:
        defect = symmetry_defect(op, trials=50, seed=seed)
        checks.le("symmetry_defect", defect, tols["defect"])
        rep = spectrum(op, 8, seed=seed)
        report["eigenvalues"] = rep.to_json()
        checks.le("max_imag_part", rep.max_imag, tols["max_imag"])
        roots = shooting_oracle(model, bc, entry.spectral_window)
        oracle5 = sorted(roots, key=abs)[:5]
        report["oracle_eigenvalues"] = [float(r) for r in oracle5]
        checks.eq("oracle_found_five", True, len(oracle5) == 5)
        disc = sorted(rep.eigenvalues.real, key=abs)
        worst = 0.0
        for r in oracle5:
            err = min(abs(d - r) for d in disc) / max(1.0, abs(r))
            worst = max(worst, err)
        checks.le("oracle_agreement_rel", worst, tols["oracle_rel"])
        if model.k and entry.name.startswith(("first_order", "fourier")):
            worst_res = 0.0
            for sign in (+1, -1):
                vecs = extended_deficiency_vectors(model, sign)
                checks.eq(
                    f"deficiency_count_sign_{'+' if sign > 0 else '-'}",
                    model.deficiency,
                    len(vecs),
                )
                from .spectral import eigenrelation_residual

                for v in vecs:
                    worst_res = max(
                        worst_res,
                        eigenrelation_residual(model, grid, v.solution, v.a, sign * 1j),
                    )
            checks.le("deficiency_eigenrelation_residual", worst_res, tols["residual"])

    sab = boundary_conditions_from_rows(
        model, catalog.sabotage_rows(bc, model.trace_dim)
    )
    op_bad = assemble(model, sab, grid)
    if entry.name == "legendre_type":
        defect_bad = symmetry_defect(op_bad, trials=50, seed=seed, poly_degree=16)
    else:
        defect_bad = symmetry_defect(op_bad, trials=50, seed=seed)
    checks.ge("sabotaged_defect_floor", defect_bad, tols["sabotage_floor"])
    report["sabotaged_defect"] = float(defect_bad)


def run_legendre(entry, cfg, checks: Checks, report: dict):
    params = dict(catalog.DEFAULT_PARAMS)
    params.update(cfg.get("params", {}))
    A = Fraction(params["A"]).limit_denominator(10**9)
    n_max = cfg.get("n_max", 10)
    basis = gram_schmidt(A, n_max)
    eig_ok = True
    bnd_ok = True
    ext_ok = True
    orth_ok = True
    neg_ok = True
    eigs = []
    for n in range(n_max + 1):
        lam = eigen_check(basis, n)
        eigs.append(str(lam))
        eig_ok &= lam == lt_eigenvalue(n, A)
        bnd_ok &= boundary_identity_check(basis, n)
        ext_ok &= extended_eigen_check(basis, n)
    I2 = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    for n in range(1, n_max + 1):
        neg_ok &= not extended_eigen_check(basis, n, I2)
    for m in range(n_max + 1):
        for n in range(m + 1, n_max + 1):
            orth_ok &= extended_orthogonality_check(basis, m, n) == 0
    checks.eq("eigenvalue_formula_exact", True, eig_ok)
    checks.eq("boundary_identity_exact", True, bnd_ok)
    checks.eq("extended_eigen_relation_exact", True, ext_ok)
    checks.eq("extended_orthogonality_exact", True, orth_ok)
    checks.eq("nonzero_B_breaks_eigenvectors", True, neg_ok)
    report["legendre_eigenvalues"] = eigs


def applicable_commands(example: str) -> tuple[str, ...]:
    cmds = ["check-symplectic", "derive-bc", "verify-gkn"]
    if example == "legendre_type":
        cmds += ["spectrum", "legendre"]
    elif example in ("first_order", "fourier_3_1", "fourier_3_2a", "fourier_3_3",
                     "fourier_3_4", "fourier_3_5"):
        cmds += ["spectrum"]
    return tuple(cmds)


def run(cfg: dict, command: str) -> dict:
    """Execute one command (or `all`) and return the report dict."""
    seed = cfg.get("seed", 0)
    entry = _entry_from_config(cfg)
    if command != "all" and command not in applicable_commands(entry.name) and entry.name != "custom":
        raise ConfigError(f"command {command!r} is not applicable to {entry.name!r}")
    commands = applicable_commands(entry.name) if command == "all" else (command,)
    if entry.name == "custom":
        commands = tuple(
            c for c in (commands if command == "all" else (command,))
            if c in ("check-symplectic", "derive-bc", "verify-gkn")
        )
        if not commands:
            raise ConfigError(f"command {command!r} is not applicable to custom models")

    checks = Checks()
    report = {
        "example": entry.name,
        "command": command,
        "seed": seed,
        "status": "fail",
        "checks": checks.items,
    }
    timings = {}
    for cmd in commands:
        t0 = time.perf_counter()
        if cmd == "check-symplectic":
            run_check_symplectic(entry, cfg, checks, seed)
        elif cmd == "derive-bc":
            run_derive_bc(entry, cfg, checks, report)
        elif cmd == "verify-gkn":
            run_verify_gkn(entry, cfg, checks)
        elif cmd == "spectrum":
            run_spectrum(entry, cfg, checks, report, seed)
        elif cmd == "legendre":
            run_legendre(entry, cfg, checks, report)
        timings[cmd] = round(time.perf_counter() - t0, 6)
    report["status"] = "pass" if checks.ok else "fail"
    report["timings"] = timings
    return report


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_csv(report: dict, path: str):
    rows = report.get("eigenvalues", {})
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["index", "re", "im", "residual"])
        if rows:
            for i, ((re, im), res) in enumerate(
                zip(rows["eigenvalues"], rows["residuals"])
            ):
                w.writerow([i, re, im, res])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gkn-extend",
        description="Verify extended-space self-adjoint operator constructions.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--csv", help="write the eigenvalue table as CSV")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        report = run(cfg, args.command)
    except (ConfigError, ModelError, SymplecticError, KeyError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2, default=_json_default)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)
    if args.csv:
        write_csv(report, args.csv)
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
