"""Command-line interface: analyze, decompose, indices, simulate, verify-ph, example.

Exit codes: 0 success, 1 a verification failed (structural check or
admissibility), 2 input error.  Errors are emitted as JSON objects on
standard error.  Option precedence: command-line flags > config file
(JSON object keyed by option name) > built-in defaults.  Every report
embeds the seed and the effective configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .core import MatrixPencil, probe_regularity
from .errors import InconsistentInitialState, InvalidParams, PencilError
from .indices import (
    estimate_resolvent_index_complex,
    estimate_resolvent_index_real,
    index_relations_check,
    verify_radiality,
)
from .models import L2ExampleParams, NanorodParams, build_l2_example, build_nanorod
from .phdae import PhPencil, _default_omega, dissipation_trace, verify_ph_structure
from .serialize import (
    decomposition_to_dict,
    load_pencil,
    ph_report_to_dict,
    save_json,
    save_pencil,
    save_trajectory_csv,
)
from .solver import (
    QuadratureConfig,
    SolveConfig,
    admissible_initial_state,
    contour_solve,
    mild_solution_residual,
    weierstrass_solve,
)
from .weierstrass import build_zero_dynamics, decompose, reconstruct

__all__ = ["main"]

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INPUT_ERROR = 2


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _load_input(path: str):
    if path is None:
        raise ValueError("this command requires an input pencil file")
    return load_pencil(path)


def _dynamics_pencil(obj) -> MatrixPencil:
    return obj.pencil if isinstance(obj, PhPencil) else obj


def _estimator_config(args, pencil: MatrixPencil) -> dict:
    omega = args.omega if args.omega is not None else _default_omega(pencil)
    return {
        "omega": omega,
        "lambda_max": omega * args.lambda_span,
        "num_points": args.num_points,
        "num_lines": args.num_lines,
    }


def _index_report(args, pencil: MatrixPencil) -> dict:
    cfg = _estimator_config(args, pencil)
    decomp = decompose(pencil)
    real = estimate_resolvent_index_real(pencil, cfg["omega"], cfg["lambda_max"], cfg["num_points"])
    cplx = estimate_resolvent_index_complex(
        pencil, cfg["omega"], cfg["lambda_max"], cfg["num_lines"], cfg["num_points"]
    )
    p_rad = args.radiality_p if args.radiality_p is not None else max(0, decomp.nilpotency_index - 1)
    rad = verify_radiality(
        pencil,
        p_rad,
        cfg["omega"],
        args.box_radius,
        n_max=args.n_max,
        num_samples=args.num_samples,
        seed=args.seed,
    )
    return {
        "nilpotency": decomp.nilpotency_index,
        "real": real.as_dict(),
        "complex": cplx.as_dict(),
        "radiality": rad.as_dict(),
        "relations": index_relations_check(decomp, real, rad),
        "seed": args.seed,
        "config": cfg,
    }


def _cmd_decompose(args) -> int:
    obj = _load_input(args.input)
    pencil = _dynamics_pencil(obj)
    if not probe_regularity(pencil, seed=args.seed):
        _emit_error("IrregularPencil", "no sampled shift was invertible")
        return EXIT_VERIFICATION_FAILED
    decomp = decompose(pencil)
    rec = reconstruct(decomp)
    residual = float(
        np.linalg.norm(rec.E - pencil.E, 2) + np.linalg.norm(rec.A - pencil.A, 2)
    )
    report = decomposition_to_dict(decomp, residual)
    report["seed"] = args.seed
    save_json(os.path.join(args.output_dir, "decompose.json"), report)
    return EXIT_OK


def _cmd_indices(args) -> int:
    obj = _load_input(args.input)
    pencil = _dynamics_pencil(obj)
    save_json(os.path.join(args.output_dir, "indices.json"), _index_report(args, pencil))
    return EXIT_OK


def _cmd_verify_ph(args) -> int:
    obj = _load_input(args.input)
    if not isinstance(obj, PhPencil):
        raise ValueError("verify-ph requires a pencil file with a Q matrix")
    report = verify_ph_structure(obj, omega=args.omega)
    out = ph_report_to_dict(report)
    out["seed"] = args.seed
    save_json(os.path.join(args.output_dir, "ph_report.json"), out)
    return EXIT_OK if report.structure_ok else EXIT_VERIFICATION_FAILED


def _cmd_analyze(args) -> int:
    obj = _load_input(args.input)
    pencil = _dynamics_pencil(obj)
    report: dict = {"seed": args.seed, "regular": probe_regularity(pencil, seed=args.seed)}
    status = EXIT_OK
    if not report["regular"]:
        save_json(os.path.join(args.output_dir, "analyze.json"), report)
        _emit_error("IrregularPencil", "no sampled shift was invertible")
        return EXIT_VERIFICATION_FAILED
    decomp = decompose(pencil)
    rec = reconstruct(decomp)
    residual = float(np.linalg.norm(rec.E - pencil.E, 2) + np.linalg.norm(rec.A - pencil.A, 2))
    report["decomposition"] = decomposition_to_dict(decomp, residual)
    report["indices"] = _index_report(args, pencil)
    if isinstance(obj, PhPencil):
        ph_report = verify_ph_structure(obj, omega=args.omega)
        report["ph"] = ph_report_to_dict(ph_report)
        if not ph_report.structure_ok:
            status = EXIT_VERIFICATION_FAILED
            _emit_error("PhStructureFailed", "; ".join(ph_report.failures) or "structural check failed")
    save_json(os.path.join(args.output_dir, "analyze.json"), report)
    return status


def _parse_x0(args, n: int) -> np.ndarray:
    if args.x0 is not None:
        vals = [complex(tok.strip().replace("i", "j")) for tok in args.x0.split(",")]
    elif args.x0_file is not None:
        with open(args.x0_file) as fh:
            data = json.load(fh)
        vals = [complex(re, im) for re, im in data]
    else:
        raise ValueError("simulate requires --x0 or --x0-file")
    if len(vals) != n:
        raise ValueError(f"x0 has length {len(vals)}, expected {n}")
    return np.array(vals, dtype=complex)


def _cmd_simulate(args) -> int:
    obj = _load_input(args.input)
    pencil = _dynamics_pencil(obj)
    x0 = _parse_x0(args, pencil.n)
    decomp = decompose(pencil)
    omega = args.omega if args.omega is not None else _default_omega(pencil)
    # p >= 2 keeps the contour integrand decaying like |lambda|^-3 so the
    # truncated Bromwich line converges; p >= nilpotency covers the DAE part
    p = args.p if args.p is not None else max(2, decomp.nilpotency_index)
    mu = args.mu if args.mu is not None else omega + 1.0
    quad = QuadratureConfig(tolerance=args.quad_tol)
    config = SolveConfig(mu=mu, omega=omega, p=p, quad=quad)
    times = np.linspace(0.0, args.t_final, args.num_steps + 1)

    member, z0, adm_residual = admissible_initial_state(pencil, mu, p, x0)
    report = {
        "seed": args.seed,
        "config": {
            "mu": mu,
            "omega": omega,
            "p": p,
            "quad_tol": args.quad_tol,
            "t_final": args.t_final,
            "num_steps": args.num_steps,
        },
        "admissible": member,
        "admissibility_residual": adm_residual,
    }
    if not member:
        report["failure"] = "InconsistentInitialState"
        save_json(os.path.join(args.output_dir, "simulate.json"), report)
        _emit_error(
            "InconsistentInitialState",
            f"x0 is not in the admissible range (residual {adm_residual:.3e})",
        )
        return EXIT_VERIFICATION_FAILED

    traj = contour_solve(pencil, z0, config, times)
    traj = traj.with_mild_residual(mild_solution_residual(pencil, traj))
    report["mild_residual"] = traj.mild_residual
    try:
        traj_w = weierstrass_solve(decomp, x0, times)
        scale = max(float(np.max(np.abs(traj_w.states))), 1e-300)
        report["solver_agreement"] = float(np.max(np.abs(traj.states - traj_w.states)) / scale)
    except InconsistentInitialState as exc:
        report["solver_agreement"] = None
        report["weierstrass_note"] = str(exc)
    if isinstance(obj, PhPencil):
        trace = dissipation_trace(obj, traj)
        traj = traj.with_hamiltonian(trace.H)
        report["hamiltonian_max_increase"] = trace.max_increase
    save_trajectory_csv(os.path.join(args.output_dir, "trajectory.csv"), traj)
    save_json(os.path.join(args.output_dir, "simulate.json"), report)
    return EXIT_OK


def _cmd_example(args) -> int:
    if args.model == "nanorod":
        params = NanorodParams(
            l=args.l, n_grid=args.n_grid, rho=args.rho, D=args.D, C_mod=args.C_mod,
            mu_nl=args.mu_nl, tau_d=args.tau_d, a2=args.a2, b2=args.b2,
        )
        obj = build_nanorod(params)
        provenance = {"model": "nanorod", **{k: getattr(params, k) for k in params.__dataclass_fields__}}
        name = "nanorod.json"
    elif args.model == "l2":
        params = L2ExampleParams(K=args.K)
        obj = build_l2_example(params)
        provenance = {"model": "l2", "K": params.K}
        name = "l2.json"
    elif args.model == "zero-dyn":
        m = args.m
        if m < 2:
            raise ValueError("m must be at least 2")
        model = build_zero_dynamics(np.diag(-np.arange(1.0, m + 1.0)), np.eye(m)[:, 0], np.eye(m)[:, 0])
        obj = model.pencil
        provenance = {"model": "zero-dyn", "m": m}
        name = "zero_dyn.json"
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown model {args.model}")
    provenance["seed"] = args.seed
    save_pencil(os.path.join(args.output_dir, name), obj, provenance)
    return EXIT_OK


def _add_common(sub, config):
    sub.add_argument("--output-dir", default=config.get("output_dir", "."))
    sub.add_argument("--seed", type=int, default=config.get("seed", 0))


def _add_estimator_opts(sub, config):
    sub.add_argument("--omega", type=float, default=config.get("omega"))
    sub.add_argument("--lambda-span", type=float, default=config.get("lambda_span", 1e3))
    sub.add_argument("--num-points", type=int, default=config.get("num_points", 64))
    sub.add_argument("--num-lines", type=int, default=config.get("num_lines", 4))
    sub.add_argument("--radiality-p", type=int, default=config.get("radiality_p"))
    sub.add_argument("--box-radius", type=float, default=config.get("box_radius", 1e3))
    sub.add_argument("--n-max", type=int, default=config.get("n_max", 3))
    sub.add_argument("--num-samples", type=int, default=config.get("num_samples", 200))


def build_parser(config: dict) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="daepencil",
        description="Analyze and solve linear DAE pencils d/dt Ex = Ax (optionally d/dt Ex = AQx).",
    )
    parser.add_argument("--config", help="JSON file with default option values")
    subs = parser.add_subparsers(dest="command", required=True)

    for name, func, needs_est in (
        ("analyze", _cmd_analyze, True),
        ("decompose", _cmd_decompose, False),
        ("indices", _cmd_indices, True),
        ("verify-ph", _cmd_verify_ph, False),
    ):
        sub = subs.add_parser(name)
        sub.add_argument("input")
        _add_common(sub, config)
        if needs_est:
            _add_estimator_opts(sub, config)
        else:
            sub.add_argument("--omega", type=float, default=config.get("omega"))
        sub.set_defaults(func=func)

    sim = subs.add_parser("simulate")
    sim.add_argument("input")
    _add_common(sim, config)
    sim.add_argument("--x0", help="comma-separated complex entries, e.g. '1, 0.5+2j'")
    sim.add_argument("--x0-file", help="JSON file with a list of [re, im] pairs")
    sim.add_argument("--mu", type=float, default=config.get("mu"))
    sim.add_argument("--omega", type=float, default=config.get("omega"))
    sim.add_argument("--p", type=int, default=config.get("p"))
    sim.add_argument("--quad-tol", type=float, default=config.get("quad_tol", 1e-8))
    sim.add_argument("--t-final", type=float, default=config.get("t_final", 1.0))
    sim.add_argument("--num-steps", type=int, default=config.get("num_steps", 100))
    sim.set_defaults(func=_cmd_simulate)

    ex = subs.add_parser("example")
    ex.add_argument("model", choices=["nanorod", "l2", "zero-dyn"])
    _add_common(ex, config)
    ex.add_argument("--n-grid", type=int, default=config.get("n_grid", 50))
    ex.add_argument("--l", type=float, default=config.get("l", 1.0))
    ex.add_argument("--rho", type=float, default=config.get("rho", 1.0))
    ex.add_argument("--D", type=float, default=config.get("D", 1.0))
    ex.add_argument("--C-mod", type=float, default=config.get("C_mod", 1.0))
    ex.add_argument("--mu-nl", type=float, default=config.get("mu_nl", 1.0))
    ex.add_argument("--tau-d", type=float, default=config.get("tau_d", 1.0))
    ex.add_argument("--a2", type=float, default=config.get("a2", 1.0))
    ex.add_argument("--b2", type=float, default=config.get("b2", 1.0))
    ex.add_argument("--K", type=int, default=config.get("K", 40))
    ex.add_argument("--m", type=int, default=config.get("m", 4))
    ex.set_defaults(func=_cmd_example)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    config: dict = {}
    if known.config is not None:
        try:
            with open(known.config) as fh:
                config = json.load(fh)
            if not isinstance(config, dict):
                raise ValueError("config file must contain a JSON object")
        except (OSError, ValueError) as exc:
            _emit_error("ConfigError", str(exc))
            return EXIT_INPUT_ERROR

    parser = build_parser(config)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT_ERROR if exc.code not in (0, None) else 0

    try:
        os.makedirs(args.output_dir, exist_ok=True)
        return args.func(args)
    except InvalidParams as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_INPUT_ERROR
    except PencilError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_VERIFICATION_FAILED
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_INPUT_ERROR


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
