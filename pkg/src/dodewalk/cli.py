"""Command-line front end.

Subcommands
    weights    memory-weight profile for one step index
    kernel     jump-rate table and step-size bounds for a mixture
    walk       one recorded trajectory
    ensemble   many walkers, summary statistics and final positions
    fd         finite-difference density on a window
    compare    ensemble vs density, total variation verdict
    barrier    ensemble inside a compartment grid

Configuration merges, in increasing precedence: built-in preset
(--preset), JSON file (--config), individual flags.  A manifest JSON
written by any run can be fed back through --config; its "config"
block is the canonical resolved configuration.

Exit codes: 0 success, 2 configuration error (including an infeasible
stay-probability target), 3 step-size stability failure, 4 compare
mismatch above tolerance.

Diffusion coefficients are given in m^2/s and converted to the nm/s
lattice units by a uniform factor of 1e18, one factor for every term
of the mixture regardless of its order.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .fdsolve import fd_run
from .spacefrac import (
    LatticeGeometry,
    SpectralMixture,
    StabilityError,
    q_zero,
    tail_report,
    tau_for_p0,
    tau_max,
)
from .stats import kernel_expected_jump, position_histogram, summarize, tv_distance
from .timefrac import VARIANTS, WeightLadder
from .transition import build_kernel
from .walk import KIND_NAMES, BarrierSpec, run_ensemble, run_walk

__all__ = ["ConfigError", "PRESETS", "entry", "main", "parse_config"]

M2S_TO_NM2S = 1.0e18


class ConfigError(ValueError):
    """Configuration that cannot be resolved into a runnable setup."""


_T_VIDEO = 1.0 / 30.0  # video-frame observation horizon, seconds


def _preset(alphas, beta, **extra):
    a_total = 9.0e-12
    base = {
        "alphas": list(alphas),
        "a_m2s": [a_total / len(alphas)] * len(alphas),
        "beta": beta,
        "variant": "caputo",
        "h_nm": 6.0,
        "K": 26,
        "N": 2,
        "p0": 0.0,
        "T_s": _T_VIDEO,
        "n_walkers": 1000,
        "J": 128,
    }
    base.update(extra)
    return base


PRESETS = {
    "kusumi": _preset(
        (2.0,), 1.0, barrier={"period_sites": 11, "p_escape": 0.01}
    ),
    "plot1-left": _preset((2.0,), 1.0),
    "plot1-middle": _preset((1.5,), 1.0),
    "plot1-right": _preset((1.5, 2.0), 1.0),
    "plot2-left": _preset((2.0,), 0.999),
    "plot2-middle": _preset((1.5,), 0.999),
    "plot2-right": _preset((1.5, 2.0), 0.999),
    "plot3-left": _preset((0.8, 1.3, 1.8), 0.999),
    "plot3-middle": _preset((0.8, 1.3, 1.8), 0.99),
    "plot3-right": _preset((0.8, 1.3, 1.8), 0.9),
}

_ALLOWED_KEYS = {
    "alphas", "a_m2s", "a_nm2s", "beta", "variant", "h_nm", "K", "N",
    "p0", "tau_s", "T_s", "n_steps", "n_walkers", "seed", "threads",
    "J", "loss_tol", "tv_tol", "barrier", "walker",
}

_DEFAULTS = {
    "beta": 1.0,
    "variant": "caputo",
    "h_nm": 6.0,
    "K": 26,
    "N": 2,
    "n_walkers": 1000,
    "seed": 0,
    "threads": 1,
    "J": 128,
    "loss_tol": 1e-3,
    "tv_tol": 0.05,
    "walker": 0,
}


@dataclass
class Resolved:
    """Fully validated run setup plus its manifest-ready config block."""

    mixture: SpectralMixture
    geometry: LatticeGeometry
    variant: str
    tau: float
    tau_max: float
    q0: float
    w_top: float
    n_steps: int | None
    n_walkers: int
    seed: int
    threads: int
    J: int
    loss_tol: float
    tv_tol: float
    barrier: BarrierSpec | None
    walker: int
    config: dict

    def derived(self) -> dict:
        out = {
            "q0_per_s": self.q0,
            "tau_s": self.tau,
            "tau_max_s": self.tau_max,
            "w_top": self.w_top,
            "nonmarkov_mass": 1.0 - self.w_top,
        }
        if self.n_steps is not None:
            out["n_steps"] = self.n_steps
            out["horizon_s"] = self.n_steps * self.tau
        return out


def _as_float(raw: dict, key: str, lo=None, hi=None, lo_open=False) -> float:
    try:
        val = float(raw[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {raw[key]!r}") from None
    if not math.isfinite(val):
        raise ConfigError(f"{key} must be finite, got {val}")
    if lo is not None and (val <= lo if lo_open else val < lo):
        raise ConfigError(f"{key} must be {'>' if lo_open else '>='} {lo}, got {val}")
    if hi is not None and val > hi:
        raise ConfigError(f"{key} must be <= {hi}, got {val}")
    return val


def _as_int(raw: dict, key: str, lo=None) -> int:
    val = raw[key]
    if isinstance(val, bool) or (
        not isinstance(val, int) and not float(val).is_integer()
    ):
        raise ConfigError(f"{key} must be an integer, got {val!r}")
    val = int(val)
    if lo is not None and val < lo:
        raise ConfigError(f"{key} must be >= {lo}, got {val}")
    return val


def _float_list(raw: dict, key: str, length: int | None = None) -> list[float]:
    val = raw[key]
    if isinstance(val, (int, float)) and not isinstance(val, bool):
        val = [float(val)] if length is None else [float(val)] * length
    if not isinstance(val, (list, tuple)) or not val:
        raise ConfigError(f"{key} must be a non-empty list of numbers")
    try:
        out = [float(v) for v in val]
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must contain only numbers") from None
    if length is not None and len(out) != length:
        raise ConfigError(f"{key} must have {length} entries, got {len(out)}")
    return out


def parse_config(raw: dict, *, need_steps: bool = True) -> Resolved:
    """Validate a merged configuration dict and build the run objects."""
    unknown = set(raw) - _ALLOWED_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    merged = dict(_DEFAULTS)
    merged.update({k: v for k, v in raw.items() if v is not None})

    if "alphas" not in merged:
        raise ConfigError("alphas is required (orders of the spatial terms)")
    alphas = _float_list(merged, "alphas")
    if "a_m2s" in merged and "a_nm2s" in merged:
        raise ConfigError("give a_m2s or a_nm2s, not both")
    if "a_m2s" in merged:
        a_given = _float_list(merged, "a_m2s", len(alphas))
        a_key = "a_m2s"
        a_nm = [a * M2S_TO_NM2S for a in a_given]
    elif "a_nm2s" in merged:
        a_given = _float_list(merged, "a_nm2s", len(alphas))
        a_key = "a_nm2s"
        a_nm = list(a_given)
    else:
        raise ConfigError("a_m2s (or a_nm2s) is required")

    beta = _as_float(merged, "beta", lo=0.0, hi=1.0, lo_open=True)
    variant = merged["variant"]
    if variant not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}, got {variant!r}")
    h = _as_float(merged, "h_nm", lo=0.0, lo_open=True)
    K = _as_int(merged, "K", lo=1)
    N = _as_int(merged, "N", lo=1)
    J = _as_int(merged, "J", lo=1)
    n_walkers = _as_int(merged, "n_walkers", lo=1)
    seed = _as_int(merged, "seed", lo=0)
    threads = _as_int(merged, "threads", lo=1)
    walker = _as_int(merged, "walker", lo=0)
    loss_tol = _as_float(merged, "loss_tol", lo=0.0, lo_open=True)
    tv_tol = _as_float(merged, "tv_tol", lo=0.0, lo_open=True)

    barrier = None
    bar_cfg = merged.get("barrier")
    if bar_cfg is not None:
        if not isinstance(bar_cfg, dict):
            raise ConfigError("barrier must be an object")
        extra = set(bar_cfg) - {"period_sites", "p_escape"}
        if extra:
            raise ConfigError(f"unknown barrier keys: {sorted(extra)}")
        if "period_sites" not in bar_cfg or "p_escape" not in bar_cfg:
            raise ConfigError("barrier needs period_sites and p_escape")
        barrier = BarrierSpec(
            period_sites=_as_int(bar_cfg, "period_sites", lo=1),
            p_escape=_as_float(bar_cfg, "p_escape", lo=0.0, hi=1.0),
        )

    try:
        mixture = SpectralMixture(
            alphas=tuple(alphas), coefs=tuple(a_nm), beta=beta
        )
        geometry = LatticeGeometry(N=N, h=h, K=K)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    q0 = q_zero(mixture, geometry)
    t_max = tau_max(mixture, geometry, variant=variant)
    ladder = WeightLadder(beta, variant)
    w_top = ladder.markov_mass(1)

    if "tau_s" in merged and "p0" in merged:
        raise ConfigError("give tau_s or p0, not both")
    if "tau_s" in merged:
        tau = _as_float(merged, "tau_s", lo=0.0, lo_open=True)
        timing = {"tau_s": tau}
    else:
        p0 = _as_float(merged, "p0", lo=0.0) if "p0" in merged else 0.0
        if p0 >= w_top:
            raise ConfigError(
                f"stay-probability target p0={p0} is not reachable: it must "
                f"be below the top weight w_n={w_top}"
            )
        tau = tau_for_p0(mixture, geometry, p0, variant=variant)
        timing = {"p0": p0}

    if "T_s" in merged and "n_steps" in merged:
        raise ConfigError("give T_s or n_steps, not both")
    n_steps = None
    steps_cfg = {}
    if "n_steps" in merged:
        n_steps = _as_int(merged, "n_steps", lo=1)
        steps_cfg = {"n_steps": n_steps}
    elif "T_s" in merged:
        T = _as_float(merged, "T_s", lo=0.0, lo_open=True)
        n_steps = max(int(T / tau), 1)
        steps_cfg = {"T_s": T}
    elif need_steps:
        raise ConfigError("either T_s (horizon) or n_steps is required")

    # threads is an execution detail: identical configs must produce
    # identical manifests whatever the worker count was
    config = {
        "alphas": alphas,
        a_key: list(a_given),
        "beta": beta,
        "variant": variant,
        "h_nm": h,
        "K": K,
        "N": N,
        "n_walkers": n_walkers,
        "seed": seed,
        "J": J,
        "loss_tol": loss_tol,
        "tv_tol": tv_tol,
        "walker": walker,
        "barrier": dict(bar_cfg) if bar_cfg is not None else None,
    }
    config.update(timing)
    config.update(steps_cfg)

    return Resolved(
        mixture=mixture,
        geometry=geometry,
        variant=variant,
        tau=tau,
        tau_max=t_max,
        q0=q0,
        w_top=w_top,
        n_steps=n_steps,
        n_walkers=n_walkers,
        seed=seed,
        threads=threads,
        J=J,
        loss_tol=loss_tol,
        tv_tol=tv_tol,
        barrier=barrier,
        walker=walker,
        config=config,
    )


# ---------------------------------------------------------------- output


def _fmt(value) -> str:
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    return str(value)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_manifest(path: Path, command: str, config: dict, derived: dict,
                    outputs: list[str], results: dict) -> None:
    doc = {
        "command": command,
        "tool": "dode-walk",
        "tool_version": __version__,
        "config": config,
        "derived": derived,
        "outputs": outputs,
        "results": results,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _density_rows(u: np.ndarray, J: int):
    side = 2 * J + 1
    axes = np.arange(-J, J + 1)
    if u.ndim == 1:
        for j1 in range(side):
            yield (axes[j1], u[j1])
        return
    for j1 in range(side):
        for j2 in range(side):
            yield (axes[j1], axes[j2], u[j1, j2])


def _density_header(N: int) -> list[str]:
    return [f"j{d + 1}" for d in range(N)] + ["u"]


# ---------------------------------------------------------------- commands


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_weights(args, merged: dict) -> int:
    if "beta" in merged:
        beta = _as_float(merged, "beta", lo=0.0, hi=1.0, lo_open=True)
    else:
        beta = 1.0
    variant = merged.get("variant", "caputo")
    if variant not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}, got {variant!r}")
    n = args.n
    if n < 0:
        raise ConfigError(f"step index n must be >= 0, got {n}")
    table = WeightLadder(beta, variant).table(n)
    out = _outdir(args)
    _write_csv(out / "weights.csv", ["m", "w"], enumerate(table.w))
    print(f"variant={variant} beta={_fmt(beta)} n={n}")
    print(f"sum(w) = {_fmt(math.fsum(table.w))}")
    print(f"w_n (markov mass) = {_fmt(table.markov_mass)}")
    print(f"1 - w_n (memory mass) = {_fmt(table.nonmarkov_mass)}")
    _write_manifest(
        out / "weights_manifest.json",
        "weights",
        {"beta": beta, "variant": variant, "n": n},
        {
            "w_top": table.markov_mass,
            "nonmarkov_mass": table.nonmarkov_mass,
            "nu": table.nu,
        },
        ["weights.csv"],
        {"sum_w": math.fsum(table.w)},
    )
    return 0


def cmd_kernel(args, merged: dict) -> int:
    res = parse_config(merged, need_steps=False)
    ladder = WeightLadder(res.mixture.beta, res.variant)
    kernel = build_kernel(res.mixture, res.geometry, res.tau, ladder.table(1))
    out = _outdir(args)
    factor = kernel.nu_tau_beta
    header = [f"k{d + 1}" for d in range(res.geometry.N)] + ["q_k"]
    rows = (
        tuple(off) + (p / factor,)
        for off, p in zip(kernel.offsets, kernel.probs)
    )
    _write_csv(out / "kernel.csv", header, rows)
    mean_jump, sd_jump = kernel_expected_jump(kernel)
    sidecar = {
        "q0_per_s": res.q0,
        "tau_s": res.tau,
        "tau_max_s": res.tau_max,
        "p0": kernel.p0,
        "w_top": kernel.markov_mass,
        "n_entries": kernel.n_entries,
        "expected_jump_nm": mean_jump,
        "jump_sd_nm": sd_jump,
        "tail_remainder": kernel.tail_remainder,
        "tails": tail_report(res.mixture, res.geometry),
    }
    with open(out / "kernel.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"q0 = {_fmt(res.q0)} 1/s")
    print(f"tau = {_fmt(res.tau)} s (tau_max = {_fmt(res.tau_max)} s)")
    print(f"p0 = {_fmt(kernel.p0)}, {kernel.n_entries} jump offsets")
    print(f"expected jump = {_fmt(mean_jump)} nm")
    _write_manifest(
        out / "kernel_manifest.json", "kernel", res.config, res.derived(),
        ["kernel.csv", "kernel.json"],
        {"p0": kernel.p0, "n_entries": kernel.n_entries,
         "expected_jump_nm": mean_jump},
    )
    return 0


def _trajectory_rows(traj):
    N = traj.geometry.N
    h = traj.geometry.h
    pos = traj.positions
    yield (0, 0.0) + tuple(pos[0] * h) + ("init",) + (0,) * N + (-1, 0.0)
    for n in range(traj.n_steps):
        yield (
            (n + 1, (n + 1) * traj.tau)
            + tuple(pos[n + 1] * h)
            + (KIND_NAMES[traj.kinds[n]],)
            + tuple(traj.offsets[n])
            + (int(traj.revisit_m[n]), float(traj.disp_nm[n]))
        )


def cmd_walk(args, merged: dict) -> int:
    res = parse_config(merged)
    traj = run_walk(
        res.mixture, res.geometry, res.tau, res.n_steps, res.seed,
        res.walker, variant=res.variant, barrier=res.barrier,
    )
    out = _outdir(args)
    N = res.geometry.N
    pos_cols = ["x_nm", "y_nm", "z_nm"][:N]
    off_cols = [f"k{d + 1}" for d in range(N)]
    header = ["step", "t_s"] + pos_cols + ["type"] + off_cols + ["revisit_m", "jump_nm"]
    _write_csv(out / "trajectory.csv", header, _trajectory_rows(traj))
    counts = traj.kind_counts()
    print(f"walker {res.walker}: {res.n_steps} steps, tau = {_fmt(res.tau)} s")
    print(" ".join(f"{k}={v}" for k, v in counts.items()))
    _write_manifest(
        out / "walk_manifest.json", "walk", res.config, res.derived(),
        ["trajectory.csv"],
        {"kind_counts": counts,
         "final_site": [int(v) for v in traj.positions[-1]]},
    )
    return 0


def _positions_rows(final: np.ndarray, h: float):
    for w, row in enumerate(final):
        yield (w,) + tuple(row * h)


def _msd_rows(msd: np.ndarray, tau: float):
    for n, val in enumerate(msd):
        yield (n, n * tau, val)


def _run_ensemble(res: Resolved):
    return run_ensemble(
        res.mixture, res.geometry, res.tau, res.n_steps, res.n_walkers,
        res.seed, variant=res.variant, threads=res.threads,
        barrier=res.barrier,
    )


def _ensemble_outputs(args, res: Resolved, command: str) -> int:
    result = _run_ensemble(res)
    summary = summarize(result)
    out = _outdir(args)
    N = res.geometry.N
    pos_cols = ["x_nm", "y_nm", "z_nm"][:N]
    _write_csv(
        out / "positions.csv", ["walker"] + pos_cols,
        _positions_rows(result.final, res.geometry.h),
    )
    _write_csv(
        out / "msd.csv", ["step", "t_s", "msd_nm2"],
        _msd_rows(result.msd_nm2, res.tau),
    )
    print(
        f"{res.n_walkers} walkers x {res.n_steps} steps: "
        f"avg move = {_fmt(summary.avg_move_nm)} nm "
        f"(se {_fmt(summary.avg_move_se_nm)}), "
        f"memory fraction = {_fmt(summary.nonmarkov_fraction)}"
    )
    print(f"final msd = {_fmt(summary.msd_final_nm2)} nm^2")
    _write_manifest(
        out / f"{command}_manifest.json", command, res.config, res.derived(),
        ["positions.csv", "msd.csv"], summary.to_dict(),
    )
    return 0


def cmd_ensemble(args, merged: dict) -> int:
    return _ensemble_outputs(args, parse_config(merged), "ensemble")


def cmd_barrier(args, merged: dict) -> int:
    if merged.get("barrier") is None:
        merged["barrier"] = {"period_sites": 11, "p_escape": 0.01}
    res = parse_config(merged)
    return _ensemble_outputs(args, res, "barrier")


def cmd_fd(args, merged: dict) -> int:
    res = parse_config(merged)
    sol = fd_run(
        res.mixture, res.geometry, res.tau, res.n_steps, res.J,
        variant=res.variant, loss_tol=res.loss_tol,
    )
    out = _outdir(args)
    _write_csv(
        out / "density.csv", _density_header(res.geometry.N),
        _density_rows(sol.u, res.J),
    )
    print(
        f"{res.n_steps} steps on [-{res.J}, {res.J}]^{res.geometry.N}: "
        f"mass = {_fmt(sol.mass)}, boundary loss = {_fmt(sol.loss_total)}"
    )
    _write_manifest(
        out / "fd_manifest.json", "fd", res.config, res.derived(),
        ["density.csv"],
        {"mass": sol.mass, "loss_total": sol.loss_total,
         "ledger_defect_max": sol.ledger_defect_max},
    )
    return 0


def cmd_compare(args, merged: dict) -> int:
    res = parse_config(merged)
    result = _run_ensemble(res)
    summary = summarize(result)
    mc_density, mc_outside = position_histogram(result.final, res.J)
    sol = fd_run(
        res.mixture, res.geometry, res.tau, res.n_steps, res.J,
        variant=res.variant, loss_tol=res.loss_tol,
    )
    tv = tv_distance(mc_density, sol.u)
    out = _outdir(args)
    header = _density_header(res.geometry.N)
    _write_csv(out / "mc_density.csv", header, _density_rows(mc_density, res.J))
    _write_csv(out / "fd_density.csv", header, _density_rows(sol.u, res.J))
    verdict = "PASS" if tv <= res.tv_tol else "FAIL"
    print(
        f"total variation = {_fmt(tv)} (tolerance {_fmt(res.tv_tol)}): {verdict}"
    )
    print(
        f"mc outside window = {_fmt(mc_outside)}, "
        f"fd boundary loss = {_fmt(sol.loss_total)}"
    )
    _write_manifest(
        out / "compare_manifest.json", "compare", res.config, res.derived(),
        ["mc_density.csv", "fd_density.csv"],
        {
            "tv": tv,
            "tv_tol": res.tv_tol,
            "verdict": verdict,
            "mc_outside_fraction": mc_outside,
            "fd_mass": sol.mass,
            "fd_loss_total": sol.loss_total,
            "fd_ledger_defect_max": sol.ledger_defect_max,
            "ensemble": summary.to_dict(),
        },
    )
    return 0 if tv <= res.tv_tol else 4


# ---------------------------------------------------------------- plumbing

_FLAG_KEYS = (
    ("alphas", "alphas"),
    ("a", "a_m2s"),
    ("beta", "beta"),
    ("variant", "variant"),
    ("h", "h_nm"),
    ("K", "K"),
    ("N", "N"),
    ("p0", "p0"),
    ("tau", "tau_s"),
    ("T", "T_s"),
    ("steps", "n_steps"),
    ("walkers", "n_walkers"),
    ("seed", "seed"),
    ("threads", "threads"),
    ("J", "J"),
    ("loss_tol", "loss_tol"),
    ("tv_tol", "tv_tol"),
    ("walker", "walker"),
)

# flags override their config-file alternates
_EXCLUSIVE = {"tau_s": "p0", "p0": "tau_s", "n_steps": "T_s", "T_s": "n_steps"}


def _merge_config(args) -> dict:
    merged: dict = {}
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r}; choose from "
                f"{sorted(PRESETS)}"
            )
        merged.update(PRESETS[args.preset])
    if args.config is not None:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        if "config" in data and "command" in data:
            data = data["config"]  # manifest round-trip
            if not isinstance(data, dict):
                raise ConfigError("manifest config block must be an object")
        data = {k: v for k, v in data.items() if v is not None}
        for key in data:
            drop = _EXCLUSIVE.get(key)
            if drop is not None:
                merged.pop(drop, None)
        merged.update(data)
    for flag, key in _FLAG_KEYS:
        val = getattr(args, flag, None)
        if val is not None:
            merged.pop(_EXCLUSIVE.get(key, ""), None)
            merged[key] = val
    if getattr(args, "period_sites", None) is not None or getattr(
        args, "p_escape", None
    ) is not None:
        bar = dict(merged.get("barrier") or {})
        if args.period_sites is not None:
            bar["period_sites"] = args.period_sites
        if args.p_escape is not None:
            bar["p_escape"] = args.p_escape
        merged["barrier"] = bar
    return merged


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="JSON configuration")
    common.add_argument("--preset", metavar="NAME",
                        help=f"one of {', '.join(sorted(PRESETS))}")
    common.add_argument("--out", default=".", metavar="DIR",
                        help="output directory (default: current)")
    common.add_argument("--alphas", type=float, nargs="+", metavar="A")
    common.add_argument("--a", type=float, nargs="+", metavar="D",
                        help="diffusion coefficients, m^2/s, one per order")
    common.add_argument("--beta", type=float)
    common.add_argument("--variant", choices=list(VARIANTS))
    common.add_argument("--h", type=float, help="lattice spacing, nm")
    common.add_argument("--K", type=int, help="jump truncation radius, sites")
    common.add_argument("--N", type=int, help="lattice dimension")
    common.add_argument("--p0", type=float, help="stay-probability target")
    common.add_argument("--tau", type=float, help="explicit step size, s")
    common.add_argument("--T", type=float, help="horizon, s")
    common.add_argument("--steps", type=int, help="explicit step count")
    common.add_argument("--walkers", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--J", type=int, help="window half-width, sites")
    common.add_argument("--loss-tol", dest="loss_tol", type=float)

    parser = argparse.ArgumentParser(
        prog="dode-walk",
        description=(
            "Random walks and finite-difference densities for multi-term "
            "distributed-order fractional diffusion on a lattice."
        ),
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", parents=[common],
                       help="memory-weight profile for one step index")
    p.add_argument("--n", type=int, default=100, help="step index")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("kernel", parents=[common],
                       help="jump-rate table and step-size bounds")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("walk", parents=[common],
                       help="one recorded trajectory")
    p.add_argument("--walker", type=int, help="walker index to replay")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("ensemble", parents=[common],
                       help="many walkers, summary statistics")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("fd", parents=[common],
                       help="finite-difference density on a window")
    p.set_defaults(func=cmd_fd)

    p = sub.add_parser("compare", parents=[common],
                       help="ensemble vs density, total variation verdict")
    p.add_argument("--tv-tol", dest="tv_tol", type=float)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("barrier", parents=[common],
                       help="ensemble inside a compartment grid")
    p.add_argument("--period-sites", dest="period_sites", type=int,
                   help="compartment edge, sites")
    p.add_argument("--p-escape", dest="p_escape", type=float,
                   help="crossing success probability")
    p.set_defaults(func=cmd_barrier)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        merged = _merge_config(args)
        return args.func(args, merged)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StabilityError as exc:
        print(f"stability error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main(sys.argv[1:]))
