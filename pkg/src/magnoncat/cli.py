"""Command-line front end: couplings | protocol | wigner | design.

Configuration is a flat ``key = value`` text file (see the key table in the
README); ``--set key=value`` overrides file values, and ``--preset``
supplies the dimension/time defaults.  All outputs are deterministic: both
measurement branches are always enumerated, never sampled.

Exit codes: 0 ok, 2 config error, 3 dynamics invariant violation,
4 bad input file.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis, device, protocol
from .device import DegenerateSquidError, DeviceParams
from .hilbert import DensityMatrix, InvariantViolationError, SpaceDims

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DYNAMICS = 3
EXIT_BAD_INPUT = 4


class ConfigError(ValueError):
    pass


class StateFileError(ValueError):
    pass


PRESETS = {
    "paper": {"protocol.dim_m": 140.0, "protocol.t_final_us": 3.0},
    "ci": {"protocol.dim_m": 60.0, "protocol.t_final_us": 1.2},
}

# key -> (type tag, default); None default means "derived at use time"
CONFIG_KEYS: dict[str, tuple[str, object]] = {
    "device.EJ_max_GHz": ("float", 50.0),
    "device.EC_GHz": ("float", 0.2),
    "device.aJ": ("float", 0.6),
    "device.phi_b_over_pi": ("float", 0.5),
    "device.cap_asym": ("float", 0.0),
    "device.R_yig_m": ("float", 3e-6),
    "device.d_m": ("float", 3e-6),
    "device.Ns": ("float", 2.4e12),
    "device.Ix": ("float", -1.0),
    "device.Iy": ("float", 0.0),
    "device.Iz": ("float", -1.0),
    "device.f_m_GHz": ("float", 0.5),
    "device.alphaG": ("float", 1e-5),
    "device.B_ani_T": ("float", -2.5e-3),
    "device.R_squid_m": ("float", None),
    "protocol.phi_ac": ("float", math.pi / 10),
    "protocol.delta_MHz": ("float", 0.0),
    "protocol.t_final_us": ("float", None),  # preset
    "protocol.dt_us": ("float", 1e-3),
    "protocol.dim_q": ("int", 3),
    "protocol.dim_m": ("int", None),  # preset
    "protocol.T_K": ("float", 0.005),
    "protocol.T1_us": ("float", 20.0),
    "protocol.T2_us": ("float", 20.0),
    "protocol.record_every": ("int", 100),
    "protocol.outcome": ("str", "both"),
    "protocol.magnon_drive_MHz": ("float", 0.0),
    "protocol.dephasing_from_ramsey": ("bool", False),
    "sweep.phi_b_over_pi_min": ("float", 0.0),
    "sweep.phi_b_over_pi_max": ("float", 1.0),
    "sweep.phi_b_points": ("int", 101),
    "sweep.aJ_list": ("floats", (0.01, 0.3, 0.6, 0.9)),
    "wigner.re_min": ("float", None),  # auto from the state
    "wigner.re_max": ("float", None),
    "wigner.im_min": ("float", None),
    "wigner.im_max": ("float", None),
    "wigner.n_points": ("int", 201),
    "design.Bc_min_T": ("float", 0.05),
    "design.Bc_max_T": ("float", 1.0),
    "design.Bc_points": ("int", 40),
    "design.Ms_A_per_m": ("float", 2e5),
    "design.d_w_m": ("float", 100e-9),
    "design.T_min_mK": ("float", 1.0),
    "design.T_max_mK": ("float", 50.0),
    "design.T_points": ("int", 50),
}


def _parse_value(key: str, raw: str):
    kind = CONFIG_KEYS[key][0]
    raw = raw.strip()
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def parse_config_file(path: str | Path) -> dict:
    values: dict[str, object] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _parse_value(key, raw)
    return values


def resolve_config(args) -> dict:
    """defaults <- preset <- config file <- --set overrides."""
    cfg = {k: default for k, (_, default) in CONFIG_KEYS.items()}
    preset = PRESETS[args.preset]
    cfg.update(preset)
    cfg["protocol.dim_m"] = int(cfg["protocol.dim_m"])
    if args.config:
        cfg.update(parse_config_file(args.config))
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}")
        cfg[key] = _parse_value(key, raw)
    return cfg


def build_device(cfg: dict) -> DeviceParams:
    try:
        return DeviceParams(
            EJ_max=cfg["device.EJ_max_GHz"],
            EC=cfg["device.EC_GHz"],
            aJ=cfg["device.aJ"],
            phi_b=math.pi * cfg["device.phi_b_over_pi"],
            cap_asym=cfg["device.cap_asym"],
            R_yig=cfg["device.R_yig_m"],
            d=cfg["device.d_m"],
            Ns=cfg["device.Ns"],
            geometry=(cfg["device.Ix"], cfg["device.Iy"], cfg["device.Iz"]),
            f_m=cfg["device.f_m_GHz"],
            alphaG=cfg["device.alphaG"],
            B_ani=cfg["device.B_ani_T"],
            R_squid=cfg["device.R_squid_m"],
        )
    except ValueError as exc:
        raise ConfigError(f"invalid device parameters: {exc}") from exc


def build_protocol_config(cfg: dict) -> protocol.ProtocolConfig:
    try:
        return protocol.ProtocolConfig(
            device=build_device(cfg),
            phi_ac=cfg["protocol.phi_ac"],
            delta=cfg["protocol.delta_MHz"],
            t_final=cfg["protocol.t_final_us"],
            dt=cfg["protocol.dt_us"],
            dims=SpaceDims(cfg["protocol.dim_q"], cfg["protocol.dim_m"]),
            T=cfg["protocol.T_K"],
            T1=cfg["protocol.T1_us"],
            T2=cfg["protocol.T2_us"],
            record_every=cfg["protocol.record_every"],
            outcome=cfg["protocol.outcome"],
            magnon_drive=cfg["protocol.magnon_drive_MHz"],
            dephasing_from_ramsey=cfg["protocol.dephasing_from_ramsey"],
        )
    except ValueError as exc:
        raise ConfigError(f"invalid protocol parameters: {exc}") from exc


def thread_count() -> int:
    raw = os.environ.get("MAGNONCAT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"MAGNONCAT_THREADS must be an integer, got {raw!r}")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# ---------------------------------------------------------------- writers


def write_state_csv(path: Path, rho: DensityMatrix) -> None:
    """dims header line, then row-major entries as re,im pairs per matrix row."""
    lines = ["dims," + ",".join(str(d) for d in rho.dims)]
    for row in rho.data:
        lines.append(",".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    path.write_text("\n".join(lines) + "\n")


def read_state_csv(path: str | Path) -> DensityMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise StateFileError(f"cannot read state file {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("dims,"):
        raise StateFileError(f"{path}: missing 'dims,...' header line")
    try:
        dims = tuple(int(tok) for tok in lines[0].split(",")[1:])
        n = int(np.prod(dims))
        rows = []
        for ln in lines[1:]:
            vals = [float(tok) for tok in ln.split(",")]
            if len(vals) != 2 * n:
                raise ValueError(f"expected {2 * n} numbers per row, got {len(vals)}")
            arr = np.asarray(vals).reshape(n, 2)
            rows.append(arr[:, 0] + 1j * arr[:, 1])
        if len(rows) != n:
            raise ValueError(f"expected {n} matrix rows, got {len(rows)}")
        rho = DensityMatrix(np.asarray(rows), dims)
        rho.validate(check_positivity=False)
        return rho
    except (ValueError, InvariantViolationError) as exc:
        raise StateFileError(f"{path}: malformed state file: {exc}") from exc


def write_pgm(path: Path, grid: analysis.WignerGrid) -> None:
    """8-bit binary PGM; [min W, max W] maps linearly onto [0, 255].

    Image rows run along decreasing Im(alpha) so the picture has the usual
    phase-space orientation; columns along increasing Re(alpha).
    """
    v = grid.values
    lo, hi = float(v.min()), float(v.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    img = np.round((v - lo) * scale).astype(np.uint8)
    img = img.T[::-1]  # rows: im descending; cols: re ascending
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    path.write_bytes(header + img.tobytes())


# ------------------------------------------------------------- subcommands


def cmd_couplings(cfg: dict, out_dir: Path) -> int:
    lo = cfg["sweep.phi_b_over_pi_min"]
    hi = cfg["sweep.phi_b_over_pi_max"]
    n = cfg["sweep.phi_b_points"]
    aj_list = cfg["sweep.aJ_list"]
    if n < 2 or hi <= lo or not aj_list:
        raise ConfigError("sweep needs phi_b_points >= 2, max > min and a nonempty aJ list")
    base = build_device(cfg)
    phis = np.linspace(lo, hi, n)
    lines = [
        "phi_b_over_pi,aJ,J_MHz,J_corrected_MHz,grp_MHz,grp_corrected_MHz,"
        "omega_q_GHz,transmon_regime_ok"
    ]
    import dataclasses
    import warnings as _warnings

    for aj in aj_list:
        for x in phis:
            p = dataclasses.replace(base, aJ=aj, phi_b=math.pi * x)
            try:
                with _warnings.catch_warnings():
                    _warnings.simplefilter("ignore", device.ValidityWarning)
                    cs = device.couplings(p)
            except DegenerateSquidError as exc:
                raise ConfigError(
                    f"sweep hits a degenerate SQUID point at phi_b/pi = {x:g}, aJ = {aj:g}: {exc}"
                ) from exc
            lines.append(
                ",".join(
                    [
                        _fmt(x),
                        _fmt(aj),
                        _fmt(cs.J),
                        _fmt(cs.J + cs.J_prime),
                        _fmt(cs.g_rp),
                        _fmt(cs.g_rp + cs.g_rp_prime),
                        _fmt(cs.omega_q),
                        "1" if cs.transmon_regime_ok else "0",
                    ]
                )
            )
    (out_dir / "couplings.csv").write_text("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_protocol(cfg: dict, out_dir: Path) -> int:
    pc = build_protocol_config(cfg)
    result = protocol.run_protocol(pc)
    traj = result.trajectory
    cols = ["E_N", "S", "F_even", "purity", "n_magnon", "n_qubit", "leak2", "trunc_flag"]
    lines = ["t_us," + ",".join(cols)]
    for i, t in enumerate(traj.times):
        lines.append(_fmt(t) + "," + ",".join(_fmt(traj.records[c][i]) for c in cols))
    (out_dir / "trajectory.csv").write_text("\n".join(lines) + "\n")

    for outcome, state in result.states.items():
        if state is not None:
            write_state_csv(out_dir / f"conditional_magnon_outcome{outcome}.csv", state)

    summary = [
        f"g_tilde_MHz = {_fmt(result.g_tilde)}",
        f"n_th = {_fmt(result.n_th)}",
        f"analytic_beta_final = {_fmt(result.final_cat.beta.real)}{result.final_cat.beta.imag:+.12g}j",
        f"analytic_theta_final = {_fmt(result.final_cat.theta)}",
        f"even_cat_outcome = {protocol.EVEN_OUTCOME}",
    ]
    for k in sorted(result.probabilities):
        summary.append(f"p_outcome{k} = {_fmt(result.probabilities[k])}")
    for outcome, state in sorted(result.states.items()):
        if state is None:
            summary.append(f"outcome{outcome}: null branch (probability < 1e-12), no file")
    (out_dir / "protocol_summary.txt").write_text("\n".join(summary) + "\n")
    return EXIT_OK


def cmd_wigner(cfg: dict, out_dir: Path, state_path: str, pgm: bool) -> int:
    rho = read_state_csv(state_path)
    if rho.is_composite:
        raise StateFileError(f"{state_path}: wigner needs a single-mode magnon state")
    n_pop = float(np.real(np.diag(rho.data)) @ np.arange(rho.dims[0]))
    beta_est = math.sqrt(max(2.0 * n_pop, 0.0))
    half = analysis.default_grid_half_width(beta_est)
    re_min = cfg["wigner.re_min"] if cfg["wigner.re_min"] is not None else -half
    re_max = cfg["wigner.re_max"] if cfg["wigner.re_max"] is not None else half
    im_min = cfg["wigner.im_min"] if cfg["wigner.im_min"] is not None else -half
    im_max = cfg["wigner.im_max"] if cfg["wigner.im_max"] is not None else half
    if re_max <= re_min or im_max <= im_min:
        raise ConfigError("wigner grid ranges must have max > min")
    grid = analysis.wigner(
        rho,
        (re_min, re_max),
        (im_min, im_max),
        n_points=cfg["wigner.n_points"],
        threads=thread_count(),
    )
    lines = ["re,im,W"]
    for i, x in enumerate(grid.re_axis):
        for j, y in enumerate(grid.im_axis):
            lines.append(f"{_fmt(x)},{_fmt(y)},{_fmt(grid.values[i, j])}")
    (out_dir / "wigner.csv").write_text("\n".join(lines) + "\n")
    if pgm:
        write_pgm(out_dir / "wigner.pgm", grid)
    return EXIT_OK


def cmd_design(cfg: dict, out_dir: Path) -> int:
    p = build_device(cfg)
    bc_lo, bc_hi, bc_n = cfg["design.Bc_min_T"], cfg["design.Bc_max_T"], cfg["design.Bc_points"]
    t_lo, t_hi, t_n = cfg["design.T_min_mK"], cfg["design.T_max_mK"], cfg["design.T_points"]
    if bc_lo <= 0 or bc_hi <= bc_lo or bc_n < 2 or t_lo <= 0 or t_hi <= t_lo or t_n < 2:
        raise ConfigError("design tables need positive, increasing ranges with >= 2 points")

    lines = ["Bc_T,d_c_m"]
    for bc in np.linspace(bc_lo, bc_hi, bc_n):
        dc = device.critical_distance(
            float(bc), cfg["design.Ms_A_per_m"], p.R_yig, cfg["design.d_w_m"]
        )
        lines.append(f"{_fmt(bc)},{_fmt(dc)}")
    (out_dir / "design_dc.csv").write_text("\n".join(lines) + "\n")

    lines = ["T_mK,n_th"]
    for t_mk in np.linspace(t_lo, t_hi, t_n):
        nth = device.thermal_occupation(p.f_m, float(t_mk) * 1e-3)
        lines.append(f"{_fmt(t_mk)},{_fmt(nth)}")
    (out_dir / "design_nth.csv").write_text("\n".join(lines) + "\n")

    from .constants import CONSTANTS

    bz = 2.0 * math.pi * p.f_m * 1e9 / CONSTANTS.gamma0 - p.B_ani
    ff = device.far_field_ok(p)
    report = [
        "design report",
        f"f_m_GHz = {_fmt(p.f_m)}",
        f"required_Bz_T = {_fmt(bz)}",
        f"n_th(5 mK) = {_fmt(device.thermal_occupation(p.f_m, 0.005))}",
        f"n_th(10 mK) = {_fmt(device.thermal_occupation(p.f_m, 0.010))}",
        f"n_th(20 mK) = {_fmt(device.thermal_occupation(p.f_m, 0.020))}",
        f"d_c(Bc = 0.12 T) = {_fmt(device.critical_distance(0.12, cfg['design.Ms_A_per_m'], p.R_yig, cfg['design.d_w_m']))}",
        f"far_field_ok = {'unknown (set device.R_squid_m)' if ff is None else ff}",
        f"transmon_regime_ok = {device.transmon_regime_ok(p)}",
    ]
    (out_dir / "design_report.txt").write_text("\n".join(report) + "\n")
    return EXIT_OK


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magnoncat",
        description="transmon-magnon coupling rates, cat-state protocol and diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("couplings", "sweep J and g_rp over flux bias and SQUID asymmetry"),
        ("protocol", "run the analog cat-state preparation protocol"),
        ("wigner", "Wigner function of a serialized magnon state"),
        ("design", "critical-distance and thermal-occupation tables"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--preset", choices=("paper", "ci"), default="ci")
        p.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="override one config key (repeatable)",
        )
        if name == "wigner":
            p.add_argument("state_file", help="state CSV produced by the protocol command")
            p.add_argument("--pgm", action="store_true", help="also write an 8-bit PGM image")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "couplings":
            return cmd_couplings(cfg, out_dir)
        if args.command == "protocol":
            return cmd_protocol(cfg, out_dir)
        if args.command == "wigner":
            return cmd_wigner(cfg, out_dir, args.state_file, args.pgm)
        if args.command == "design":
            return cmd_design(cfg, out_dir)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StateFileError as exc:
        print(f"bad input file: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except InvariantViolationError as exc:
        print(f"dynamics invariant violation: {exc}", file=sys.stderr)
        return EXIT_DYNAMICS


if __name__ == "__main__":
    sys.exit(main())
