"""``pooltile`` command-line front end.

Subcommands: harvest, solve, sweep, certify, exact.  Exit status is 0 on
success, 1 for usage or configuration errors and 2 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

from . import config as cfgmod
from .adapt import AdaptConfig, RunRecord, adapt_run, adapt_trials, trace_to_csv, trial_seed
from .closure import ResourceCapError, certify_tiled_completeness
from .config import ConfigError
from .lattice import EigensolverError, LatticeSpec, build_xxz, exact_ground_energy
from .pauli import PauliString, SymmetrySector, YParity, all_z
from .pools import OperatorPool, TileSet, full_pauli_pool, harvest_tiles, tile_pool_1d, tile_pool_2d
from .statevector import NeelSpec, prepare_neel

log = logging.getLogger("pooltile")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
EXACT_MAX_QUBITS = 16

SWEEP_HEADER = ("geometry", "j_z", "n_qubits", "pool_size", "steps", "converged", "final_energy",
                "exact_energy", "relative_error", "log10_inv_abs_error", "seed", "wall_time", "error")


class NumericalFailure(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _geometry_label(shape: Sequence[int]) -> str:
    return "x".join(str(s) for s in shape)


def _load_tiles(section: dict, base: Path | None) -> TileSet:
    if section.get("labels"):
        return TileSet.from_labels(section["labels"], section.get("shape"))
    if section.get("path"):
        path = Path(section["path"])
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            return TileSet.from_text(path.read_text())
        except OSError as err:
            raise ConfigError(f"cannot read tile file {path}: {err}") from err
    raise ConfigError("tiles need either 'labels' or 'path'")


def _harvest(spec: LatticeSpec, neel: NeelSpec, cfg: AdaptConfig, trials: int) -> tuple[TileSet, list[RunRecord]]:
    h = build_xxz(spec)
    records = adapt_trials(h, full_pauli_pool(spec.n_sites), prepare_neel(neel), cfg, trials,
                           geometry=list(spec.shape))
    failed = [r.error for r in records if r.error]
    if failed:
        raise NumericalFailure(f"{len(failed)} harvest trial(s) failed: {failed[0]}")
    tiles = harvest_tiles(records)
    return TileSet(spec.shape, tiles.operators), records


def _tiled(tiles: TileSet, spec: LatticeSpec) -> OperatorPool:
    if len(tiles.tile_shape) == 1:
        if spec.ly != 1:
            raise ConfigError("chain tiles cannot tile a grid")
        return tile_pool_1d(tiles, spec.n_sites)
    if spec.kind.value != "grid":
        raise ConfigError("block tiles need a grid lattice")
    return tile_pool_2d(tiles, spec.lx, spec.ly)


_harvest_cache: dict = {}


def _build_pool(section: dict, spec: LatticeSpec, conf: dict, seed: int, base: Path | None) -> OperatorPool:
    source = section["source"]
    if source == "full_pauli":
        return full_pauli_pool(spec.n_sites)
    if source == "explicit":
        ops = section.get("operators") or []
        if not ops:
            raise ConfigError("explicit pool needs a non-empty 'operators' list")
        pool = OperatorPool.explicit(ops)
        if pool.n_qubits != spec.n_sites:
            raise ConfigError(f"explicit operators act on {pool.n_qubits} qubits, lattice has {spec.n_sites}")
        return pool
    if source == "tiles":
        return _tiled(_load_tiles(section, base), spec)
    if source == "harvest":
        shape = section.get("shape") or ([3] if spec.ly == 1 else [2, 2])
        tile_spec = cfgmod.lattice_from({"kind": "chain" if len(shape) == 1 else "grid", "shape": shape,
                                         "j_z": spec.j_z, "j_xy": spec.j_xy})
        tile_seed = int(section["seed"]) if section.get("seed") is not None else seed
        key = (tile_spec, tile_seed, int(section["trials"]), json.dumps(conf["adapt"], sort_keys=True))
        if key not in _harvest_cache:
            neel = cfgmod.reference_from(conf["reference"], tile_spec)
            acfg = cfgmod.adapt_from(conf["adapt"], tile_seed)
            _harvest_cache[key] = _harvest(tile_spec, neel, acfg, int(section["trials"]))[0]
        return _tiled(_harvest_cache[key], spec)
    raise ConfigError(f"unknown pool source {source!r}")


def _exact(h, n: int) -> float | None:
    if n > EXACT_MAX_QUBITS:
        return None
    return exact_ground_energy(h)


# -- subcommands -------------------------------------------------------------

def cmd_harvest(conf: dict, out: Path, base: Path | None) -> int:
    spec = cfgmod.lattice_from(conf["lattice"])
    neel = cfgmod.reference_from(conf["reference"], spec)
    acfg = cfgmod.adapt_from(conf["adapt"], conf["seed"])
    trials = int(conf["trials"])
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    tiles, records = _harvest(spec, neel, acfg, trials)
    rec_dir = out / "records"
    rec_dir.mkdir(parents=True, exist_ok=True)
    for k, r in enumerate(records):
        _write_json(rec_dir / f"trial_{k:03d}.json", {"resolved_config": conf, "record": r.to_dict()})
    (out / "tiles.txt").write_text(tiles.to_text())
    steps = sorted({r.n_steps for r in records})
    _write_json(out / "harvest.json", {
        "resolved_config": conf,
        "tile_shape": list(tiles.tile_shape),
        "operators": tiles.labels,
        "n_operators": len(tiles.operators),
        "steps_per_trial": [r.n_steps for r in records],
        "all_converged": all(r.converged for r in records),
    })
    print(f"harvested {len(tiles.operators)} operators from {trials} trials "
          f"(steps per trial: {', '.join(map(str, steps))})")
    print(" ".join(tiles.labels))
    return EXIT_OK


def cmd_solve(conf: dict, out: Path, base: Path | None) -> int:
    spec = cfgmod.lattice_from(conf["lattice"])
    neel = cfgmod.reference_from(conf["reference"], spec)
    seed = int(conf["seed"])
    pool = _build_pool(conf["pool"], spec, conf, seed, base)
    h = build_xxz(spec)
    exact = _exact(h, spec.n_sites) if conf["exact"] else None
    trials = int(conf["trials"])
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    acfg = cfgmod.adapt_from(conf["adapt"], seed)
    ref = prepare_neel(neel)
    if trials == 1:
        records = [adapt_run(h, pool, ref, acfg, list(spec.shape), exact)]
    else:
        records = adapt_trials(h, pool, ref, acfg, trials, list(spec.shape), exact)
    out.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    for k, r in enumerate(records):
        stem = "record" if trials == 1 else f"record_{k:03d}"
        _write_json(out / f"{stem}.json", {"resolved_config": conf, "record": r.to_dict()})
        (out / f"{stem.replace('record', 'trace')}.csv").write_text(trace_to_csv(r))
        line = f"{_geometry_label(spec.shape)} J_z={spec.j_z:g}: {r.n_steps} steps, E={r.final_energy:.10f}"
        if r.relative_error is not None:
            line += f", rel. error {r.relative_error:.3e}"
        print(line + ("" if r.converged else " (not converged)"))
        if r.error:
            print(f"run failed: {r.error}", file=sys.stderr)
            status = EXIT_NUMERIC
    return status


def _sweep_geometries(conf: dict) -> list[tuple[int, ...]]:
    out = []
    for g in conf["geometries"]:
        g = [g] if isinstance(g, int) else list(g)
        if len(g) not in (1, 2) or not all(isinstance(v, int) for v in g):
            raise ConfigError(f"bad geometry {g!r}; use L or [Lx, Ly]")
        out.append(tuple(g))
    return out


def cmd_sweep(conf: dict, out: Path, base: Path | None) -> int:
    geoms = _sweep_geometries(conf)
    jzs = conf["j_z"] if isinstance(conf["j_z"], list) else [conf["j_z"]]
    seed = int(conf["seed"])
    rows = []
    failures = 0
    rec_dir = out / "records"
    rec_dir.mkdir(parents=True, exist_ok=True)
    cell = 0
    for jz in jzs:
        for g in geoms:
            kind = "chain" if len(g) == 1 else "grid"
            lat = {"kind": kind, "shape": list(g), "j_z": float(jz), "j_xy": conf["j_xy"]}
            cell_seed = trial_seed(seed, cell)
            cell += 1
            row = {k: "" for k in SWEEP_HEADER}
            row.update(geometry=_geometry_label(g), j_z=repr(float(jz)), seed=cell_seed)
            try:
                spec = cfgmod.lattice_from(lat)
                row["n_qubits"] = spec.n_sites
                pool = _build_pool(conf["pool"], spec, conf, seed, base)
                row["pool_size"] = len(pool)
                h = build_xxz(spec)
                exact = _exact(h, spec.n_sites) if conf["exact"] else None
                acfg = cfgmod.adapt_from(conf["adapt"], cell_seed)
                r = adapt_run(h, pool, prepare_neel(cfgmod.reference_from(conf["reference"], spec)),
                              acfg, list(g), exact)
            except ConfigError:
                raise
            except (NumericalFailure, EigensolverError, ArithmeticError, ValueError) as err:
                failures += 1
                row["error"] = f"{type(err).__name__}: {err}"
                rows.append(row)
                log.error("cell %s J_z=%s failed: %s", row["geometry"], jz, err)
                continue
            _write_json(rec_dir / f"{row['geometry']}_jz{float(jz):g}.json",
                        {"resolved_config": conf, "record": r.to_dict()})
            row.update(steps=r.n_steps, converged=r.converged, final_energy=repr(r.final_energy),
                       wall_time=f"{r.wall_time:.3f}", error=r.error or "")
            if r.exact_energy is not None:
                abs_err = abs(r.final_energy - r.exact_energy)
                row.update(exact_energy=repr(r.exact_energy), relative_error=repr(r.relative_error),
                           log10_inv_abs_error=repr(-math.log10(abs_err)) if abs_err > 0 else "inf")
            if r.error:
                failures += 1
            rows.append(row)
            print(f"{row['geometry']} J_z={float(jz):g}: steps={r.n_steps} rel_err={row['relative_error'] or 'n/a'}")
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_HEADER, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    _write_json(out / "sweep.json", {"resolved_config": conf, "n_cells": len(rows), "failures": failures})
    return EXIT_NUMERIC if failures else EXIT_OK


def _sector_from(section: dict, n: int) -> SymmetrySector:
    stab = section["stabilizer"]
    try:
        stabilizer = all_z(n) if stab == "all_z" else PauliString.from_label(stab)
        return SymmetrySector(stabilizer, bool(section["require_commute"]), YParity(section["y_parity"]))
    except ValueError as err:
        raise ConfigError(f"bad sector: {err}") from err


def cmd_certify(conf: dict, out: Path, base: Path | None) -> int:
    tiles = _load_tiles(conf["tiles"], base)
    sector = _sector_from(conf["sector"], tiles.tile_n_qubits)
    reports = []
    for t in conf["targets"]:
        target = int(t) if isinstance(t, int) else tuple(int(v) for v in t)
        try:
            rep = certify_tiled_completeness(tiles, target, sector)
        except ResourceCapError as err:
            raise ConfigError(str(err)) from err
        except ValueError as err:
            raise ConfigError(f"target {t!r}: {err}") from err
        reports.append(rep.to_dict())
        print(f"L2={t}: pool {rep.pool_size}, closure {rep.closure_size}, sector {rep.sector_size}, "
              f"{'complete' if rep.complete else 'INCOMPLETE'}")
    _write_json(out / "certify.json", {"resolved_config": conf, "reports": reports})
    return EXIT_OK


def cmd_exact(conf: dict, out: Path, base: Path | None) -> int:
    spec = cfgmod.lattice_from(conf["lattice"])
    h = build_xxz(spec)
    if spec.n_sites > EXACT_MAX_QUBITS:
        raise ConfigError(f"exact energies are limited to {EXACT_MAX_QUBITS} sites")
    if conf["method"] not in ("auto", "dense", "lanczos"):
        raise ConfigError(f"unknown method {conf['method']!r}")
    e0 = exact_ground_energy(h, float(conf["tolerance"]), conf["method"])
    _write_json(out / "exact.json", {"resolved_config": conf, "geometry": list(spec.shape),
                                     "n_qubits": spec.n_sites, "exact_energy": e0})
    print(f"{_geometry_label(spec.shape)} J_z={spec.j_z:g}: E0={e0:.12f}")
    return EXIT_OK


COMMANDS = {"harvest": cmd_harvest, "solve": cmd_solve, "sweep": cmd_sweep,
            "certify": cmd_certify, "exact": cmd_exact}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pooltile", description="Tiled operator pools for ADAPT-VQE on XXZ lattices.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "harvest": "run full-pool ADAPT trials on a small tile and collect the chosen operators",
        "solve": "run ADAPT on one lattice with a chosen pool",
        "sweep": "run ADAPT over a grid of geometries and couplings",
        "certify": "check Lie-algebraic completeness of tiled pools",
        "exact": "exact ground-state energy only",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", metavar="PATH", help="YAML config file (defaults used when omitted)")
        p.add_argument("--out", metavar="DIR", default=".", help="output directory")
        p.add_argument("--seed", type=int, metavar="N", help="override the config seed")
        p.add_argument("--trials", type=int, metavar="N", help="override the number of trials")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        conf = cfgmod.load(args.command, args.config)
        if args.seed is not None:
            if "seed" not in conf:
                raise ConfigError(f"{args.command} does not take a seed")
            conf["seed"] = args.seed
        if args.trials is not None:
            if "trials" in conf:
                conf["trials"] = args.trials
            elif "pool" in conf:
                conf["pool"]["trials"] = args.trials
            else:
                raise ConfigError(f"{args.command} does not take a trial count")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        base = Path(args.config).resolve().parent if args.config else None
        _write_json(out / "config.resolved.json", {"command": args.command, **conf})
        return COMMANDS[args.command](conf, out, base)
    except ConfigError as err:
        print(f"pooltile {args.command}: config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, EigensolverError, ArithmeticError, FloatingPointError) as err:
        print(f"pooltile {args.command}: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as err:
        # invalid operators, shapes or sizes coming from the config
        print(f"pooltile {args.command}: invalid input: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
