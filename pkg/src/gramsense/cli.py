"""Command-line entry point: ``gramsense <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io as gio
from .config import ExperimentConfig, frequency_grid_hz, target_omega
from .errors import GramsenseError
from .experiments import (
    CONFIGURATIONS,
    add_noise,
    frequency_sweep,
    full_normalized_frf,
    reconstruct_from_file,
    reconstruction_maps,
    sensor_configurations,
    task_rng,
)
from .frf import frf_direct, normalize_columns
from .gram import gram, gram_norms
from .lasso import LassoProblem, solve
from .modal_model import build_chain, build_irregular, solve_modes
from .placement import greedy_select

log = logging.getLogger("gramsense")


def _emit(path, text):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")


def _system_payload(system):
    modal = solve_modes(system)
    return {"system": system.to_dict(), "modal": modal.to_dict()}


def cmd_simulate_chain(args):
    system = build_chain(args.n, args.mass, args.stiffness, args.alpha, args.beta)
    _emit(args.out, gio.dumps_json(_system_payload(system)))
    return 0


def cmd_simulate_irregular(args):
    system = build_irregular(args.n, args.seed, args.lambda_min, args.lambda_max,
                             args.zeta_min, args.zeta_max, args.max_retries)
    _emit(args.out, gio.dumps_json(_system_payload(system)))
    return 0


def _load_config(args):
    cfg = ExperimentConfig.load(args.config)
    return cfg, cfg.build_system(Path(args.config).parent)


def cmd_place(args):
    cfg, system = _load_config(args)
    if args.budget is not None:
        cfg.budget = args.budget
    modal = solve_modes(system)
    omega = target_omega(cfg.target, modal)
    nh = full_normalized_frf(system, omega)
    sel = greedy_select(nh, cfg.budget)
    out = sel.to_dict()
    out["frequency_hz"] = omega / (2 * np.pi)
    _emit(args.out, gio.dumps_json(out))
    if args.gram_csv:
        gio.write_matrix_csv(args.gram_csv, np.abs(gram(nh).values))
    if args.activation_csv:
        grid = frequency_grid_hz(cfg.grid, modal)
        rows = []
        for f in grid:
            s = greedy_select(full_normalized_frf(system, 2 * np.pi * f), cfg.budget)
            act = np.zeros(system.n_dof, dtype=int)
            act[list(s.selected)] = 1
            rows.append([repr(float(f))] + [str(v) for v in act])
        header = ["frequency_hz"] + [str(i) for i in range(system.n_dof)]
        _emit(args.activation_csv, "\n".join(",".join(r) for r in [header] + rows) + "\n")
    return 0


def cmd_reconstruct(args):
    cfg, system = _load_config(args)
    modal = solve_modes(system)
    omega = target_omega(cfg.target, modal)
    configs = sensor_configurations(system, omega, cfg.budget, modal, cfg.spatial)
    report = {"omega": omega, "frequency_hz": omega / (2 * np.pi), "budget": cfg.budget,
              "snr_db": cfg.snr_db, "mu_fraction": cfg.mu_fraction, "configurations": {}}
    ok = True
    if args.csv_dir:
        Path(args.csv_dir).mkdir(parents=True, exist_ok=True)
    for name in cfg.configurations:
        if name not in CONFIGURATIONS:
            raise GramsenseError(f"unknown configuration {name!r}")
        sensors = configs[name]
        maps = reconstruction_maps(system, sensors, omega, cfg.seeds, cfg.snr_db, cfg.mu_fraction,
                                   modal=modal, tol=cfg.tol, max_iter=cfg.max_iter)
        ok &= all(m.converged for m in maps)
        entry = {
            "sensors": list(sensors),
            "od_mae": [m.od_mae for m in maps],
            "od_mae_median": float(np.median([m.od_mae for m in maps])),
            "converged": all(m.converged for m in maps),
            "max_kkt": max(m.max_kkt for m in maps),
        }
        if cfg.force_node is not None:
            h = frf_direct(system, sensors, None, omega)
            y = add_noise(h.values[:, cfg.force_node], cfg.snr_db, task_rng(cfg.seeds[0], cfg.force_node))
            sol = solve(LassoProblem.from_measurements(h, y, cfg.mu_fraction), cfg.tol, cfg.max_iter)
            entry["force_node"] = cfg.force_node
            entry["solution"] = sol.to_dict()
        report["configurations"][name] = entry
        if args.csv_dir:
            gio.write_matrix_csv(Path(args.csv_dir) / f"map_{name}.csv", np.abs(maps[0].values),
                                 row_label="force_node")
    _emit(args.out, gio.dumps_json(report))
    return _exit_code(ok, args)


def cmd_sweep(args):
    cfg, system = _load_config(args)
    modal = solve_modes(system)
    grid = frequency_grid_hz(cfg.grid, modal)
    rep = frequency_sweep(system, grid, cfg.budget, cfg.snr_db, cfg.mu_fraction, cfg.seeds,
                          cfg.spatial, reconstruct=not args.no_reconstruct, tol=cfg.tol,
                          max_iter=cfg.max_iter)
    _emit(args.out, gio.dumps_json(rep.to_dict()))
    if args.csv:
        _emit(args.csv, rep.to_csv())
    ok = all(min(s["converged"]) == 1.0 for s in rep.series.values())
    return _exit_code(ok, args)


def cmd_reconstruct_from_file(args):
    sensors = None
    if args.sensors:
        sensors = [int(s) for s in args.sensors.split(",") if s.strip()]
    sol = reconstruct_from_file(args.h, args.y, sensors, args.mu_fraction, args.tol, args.max_iter)
    cols = gio.load_frf(args.h).cols
    out = sol.to_dict()
    out["force_nodes"] = list(cols)
    out["peak_node"] = int(cols[int(np.argmax(np.abs(sol.x_hat)))])
    _emit(args.out, gio.dumps_json(out))
    return _exit_code(sol.converged, args)


def cmd_gram(args):
    """Gram magnitude grid and norms for a measured or synthesized FRF file."""
    h = gio.load_frf(args.h)
    g = gram(normalize_columns(h))
    gio.write_matrix_csv(args.csv, np.abs(g.values))
    _emit(args.out, gio.dumps_json(gram_norms(g).to_dict()))
    return 0


def _exit_code(ok, args):
    if ok:
        return 0
    log.error("at least one LASSO solve did not converge")
    return 0 if args.allow_nonconverged else 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gramsense", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate-chain", help="fixed-fixed chain system + modes as JSON")
    s.add_argument("--n", type=int, default=50)
    s.add_argument("--mass", type=float, default=2.0)
    s.add_argument("--stiffness", type=float, default=2e6)
    s.add_argument("--alpha", type=float, default=1e-4)
    s.add_argument("--beta", type=float, default=1e-3)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_simulate_chain)

    s = sub.add_parser("simulate-irregular", help="randomized irregular system + modes as JSON")
    s.add_argument("--n", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lambda-min", type=float, default=1e5)
    s.add_argument("--lambda-max", type=float, default=1e6)
    s.add_argument("--zeta-min", type=float, default=0.01)
    s.add_argument("--zeta-max", type=float, default=0.1)
    s.add_argument("--max-retries", type=int, default=20)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_simulate_irregular)

    def with_config(sp):
        sp.add_argument("--config", required=True, help="experiment JSON")
        sp.add_argument("--out", default="-")
        sp.add_argument("--allow-nonconverged", action="store_true")

    s = sub.add_parser("place", help="greedy sensor placement at the target frequency")
    with_config(s)
    s.add_argument("--budget", type=int)
    s.add_argument("--gram-csv", help="write |G_full| grid")
    s.add_argument("--activation-csv", help="write the placement activation map over the grid")
    s.set_defaults(func=cmd_place)

    s = sub.add_parser("reconstruct", help="reconstruction maps for full/optimal/anti-nodal layouts")
    with_config(s)
    s.add_argument("--csv-dir", help="directory for |x_hat| map grids")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("sweep", help="frequency sweep of Gram norms and OD-MAE")
    with_config(s)
    s.add_argument("--csv", help="long-format series CSV")
    s.add_argument("--no-reconstruct", action="store_true", help="Gram diagnostics only")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("reconstruct-from-file", help="solve for forces from measured H and y files")
    s.add_argument("--h", required=True, help="FRF matrix (.csv or .json)")
    s.add_argument("--y", required=True, help="measurement vector (.csv or .json)")
    s.add_argument("--sensors", help="comma-separated sensor labels to keep")
    s.add_argument("--mu-fraction", type=float, default=0.1)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=50_000)
    s.add_argument("--out", default="-")
    s.add_argument("--allow-nonconverged", action="store_true")
    s.set_defaults(func=cmd_reconstruct_from_file)

    s = sub.add_parser("gram", help="Gram magnitude grid of an FRF file")
    s.add_argument("--h", required=True)
    s.add_argument("--csv", required=True)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_gram)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except GramsenseError as exc:
        log.error("%s", exc)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
