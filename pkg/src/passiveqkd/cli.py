"""Scenario-driven command line: validate and run analyses, emit curve tables.

A scenario is one YAML file naming an analysis mode plus the physical
parameters it needs.  ``run`` executes it (distance sweep or single point)
and writes a '#'-commented delimited table; ``validate`` checks schema and
physics without computing; ``list-scenarios`` shows the bundled files that
reproduce the reference figures.

Exit codes: 0 ok, 2 validation error, 3 numerical degeneracy, 4 I/O error.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import math
import sys
from dataclasses import dataclass, field

import yaml
from scipy import stats

from . import __version__
from .keyrate import (
    ChannelParams,
    DecoySettings,
    channel_gain_qber,
    decoy_rate_trusted,
    decoy_rate_untagged,
    gllp_rate,
    pna_rate_bb84,
    trusted_delta_bar,
)
from .montecarlo import PoissonianSource, RunConfig, run_pipeline
from .noise_bounds import GaussianNoise, PoissonNoise, ThresholdWindow
from .photon_stats import PassiveSchemeParams
from .worstcase import InfeasibleError, maximize_ratio

MODES = (
    "apn-bb84",
    "pna-bb84",
    "trusted-bb84",
    "pna-decoy",
    "trusted-decoy",
    "mc-pipeline",
)

_TOP_KEYS = {
    "mode",
    "description",
    "scheme",
    "channel",
    "decoy",
    "noise",
    "window",
    "sweep",
    "alpha",
    "M",
    "seed",
    "f_ec",
    "delta_source",
    "output",
}
_SECTION_KEYS = {
    "scheme": {"t_B", "t_D", "lam", "mu"},
    "channel": {"eta_B", "alpha_prime", "Y0", "e_det", "e0"},
    "decoy": {"nu_s", "nu_d", "lambda_s", "lambda_d", "f_ec"},
    "noise": {"type", "gamma", "sigma2"},
    "sweep": {"L_start", "L_end", "L_step"},
}
_MODE_REQUIRES = {
    "apn-bb84": {"scheme", "channel", "sweep"},
    "pna-bb84": {"scheme", "channel", "sweep", "window"},
    "trusted-bb84": {"scheme", "channel", "sweep"},
    "pna-decoy": {"scheme", "channel", "decoy", "sweep"},
    "trusted-decoy": {"channel", "decoy", "sweep"},
    "mc-pipeline": {"scheme", "alpha", "M", "seed"},
}

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3
EXIT_IO = 4


class ScenarioError(Exception):
    pass


@dataclass
class ValidationReport:
    errors: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def add(self, fieldname: str, message: str) -> None:
        self.errors.append({"field": fieldname, "message": message})

    def to_json(self) -> str:
        return json.dumps({"ok": self.ok, "errors": self.errors}, indent=2)


def bundled_scenarios() -> dict[str, str]:
    """Names and paths of the scenario files shipped with the package."""
    root = importlib.resources.files("passiveqkd") / "scenarios"
    return {
        p.name.removesuffix(".yaml"): str(p)
        for p in sorted(root.iterdir())
        if p.name.endswith(".yaml")
    }


def _resolve_path(name_or_path: str) -> str:
    bundled = bundled_scenarios()
    if name_or_path in bundled:
        return bundled[name_or_path]
    return name_or_path


def load_scenario(name_or_path: str) -> dict:
    path = _resolve_path(name_or_path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ScenarioError(f"malformed YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a mapping")
    return data


def _check_number(report, data, section, key, lo=None, hi=None, strict_lo=False):
    if key not in data:
        return None
    value = data[key]
    name = f"{section}.{key}" if section else key
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        report.add(name, "must be a number")
        return None
    if lo is not None and (value <= lo if strict_lo else value < lo):
        report.add(name, f"must be {'>' if strict_lo else '>='} {lo}")
        return None
    if hi is not None and value > hi:
        report.add(name, f"must be <= {hi}")
        return None
    return float(value)


def validate_scenario_dict(data: dict) -> ValidationReport:
    """Schema and physics checks; performs no computation."""
    report = ValidationReport()
    for key in data:
        if key not in _TOP_KEYS:
            report.add(key, "unknown key")
    mode = data.get("mode")
    if mode not in MODES:
        report.add("mode", f"must be one of {', '.join(MODES)}")
        return report
    for section in _MODE_REQUIRES[mode]:
        if section not in data:
            report.add(section, f"required for mode {mode}")
    for section, allowed in _SECTION_KEYS.items():
        block = data.get(section)
        if block is None:
            continue
        if not isinstance(block, dict):
            report.add(section, "must be a mapping")
            continue
        for key in block:
            if key not in allowed:
                report.add(f"{section}.{key}", "unknown key")

    scheme = data.get("scheme")
    t_B = t_D = None
    if isinstance(scheme, dict):
        t_B = _check_number(report, scheme, "scheme", "t_B", 0.0, 1.0, strict_lo=True)
        if t_B == 1.0:
            report.add("scheme.t_B", "must be < 1")
            t_B = None
        t_D = _check_number(report, scheme, "scheme", "t_D", 0.0, 1.0, strict_lo=True)
        _check_number(report, scheme, "scheme", "mu", 0.0, strict_lo=True)
        lam = scheme.get("lam")
        if lam is not None and lam != "optimized":
            lam_val = _check_number(report, scheme, "scheme", "lam", 0.0, 1.0, strict_lo=True)
            if None not in (lam_val, t_B, t_D):
                lam_a = (1.0 - t_B) * lam_val / (t_B * t_D)
                if lam_a > 1.0 + 1e-12:
                    report.add(
                        "scheme.lam",
                        f"lambda_A = {lam_a:.6g} > 1; requires lam <= t_B*t_D/(1-t_B)",
                    )

    channel = data.get("channel")
    if isinstance(channel, dict):
        _check_number(report, channel, "channel", "eta_B", 0.0, 1.0, strict_lo=True)
        _check_number(report, channel, "channel", "alpha_prime", 0.0)
        _check_number(report, channel, "channel", "Y0", 0.0)
        _check_number(report, channel, "channel", "e_det", 0.0, 0.5)
        _check_number(report, channel, "channel", "e0", 0.0, 1.0)

    decoy = data.get("decoy")
    if isinstance(decoy, dict):
        nu_s = _check_number(report, decoy, "decoy", "nu_s", 0.0, strict_lo=True)
        nu_d = _check_number(report, decoy, "decoy", "nu_d", 0.0, strict_lo=True)
        lam_s = _check_number(report, decoy, "decoy", "lambda_s", 0.0, 1.0, strict_lo=True)
        lam_d = _check_number(report, decoy, "decoy", "lambda_d", 0.0, 1.0, strict_lo=True)
        _check_number(report, decoy, "decoy", "f_ec", 1.0)
        if None not in (nu_s, nu_d) and nu_d >= nu_s:
            report.add("decoy.nu_d", "must be below nu_s")
        if None not in (lam_s, lam_d) and lam_d >= lam_s:
            report.add("decoy.lambda_d", "must be below lambda_s")
        if None not in (lam_s, t_B, t_D):
            cap = t_B * t_D / (1.0 - t_B)
            if lam_s > cap + 1e-15:
                report.add(
                    "decoy.lambda_s",
                    f"must satisfy lambda_s <= t_B*t_D/(1-t_B) = {cap:.6g}",
                )

    noise = data.get("noise")
    if isinstance(noise, dict):
        ntype = noise.get("type")
        if ntype not in ("poisson", "gaussian", "none"):
            report.add("noise.type", "must be poisson, gaussian, or none")
        elif ntype == "poisson":
            if _check_number(report, noise, "noise", "gamma", 0.0, strict_lo=True) is None:
                report.add("noise.gamma", "required for poisson noise")
        elif ntype == "gaussian":
            if _check_number(report, noise, "noise", "sigma2", 0.0, strict_lo=True) is None:
                report.add("noise.sigma2", "required for gaussian noise")

    window = data.get("window")
    if window is not None and window != "auto-minmax":
        if not isinstance(window, dict) or set(window) != {"m1", "m2"}:
            report.add("window", "must be 'auto-minmax' or a {m1, m2} mapping")
        else:
            m1 = _check_number(report, window, "window", "m1", 0.0)
            m2 = _check_number(report, window, "window", "m2")
            if None not in (m1, m2) and m1 >= m2:
                report.add("window.m2", "must exceed m1")
    sweep = data.get("sweep")
    if isinstance(sweep, dict):
        l0 = _check_number(report, sweep, "sweep", "L_start", 0.0)
        l1 = _check_number(report, sweep, "sweep", "L_end", 0.0)
        step = _check_number(report, sweep, "sweep", "L_step", 0.0, strict_lo=True)
        for key in ("L_start", "L_end", "L_step"):
            if key not in sweep:
                report.add(f"sweep.{key}", "required")
        if None not in (l0, l1) and l1 < l0:
            report.add("sweep.L_end", "must be >= L_start")

    _check_number(report, data, "", "alpha", 0.0, 1.0, strict_lo=True)
    if data.get("alpha") == 1.0:
        report.add("alpha", "must be < 1")
    if "M" in data and (not isinstance(data["M"], int) or data["M"] < 1):
        report.add("M", "must be a positive integer")
    if "seed" in data and (not isinstance(data["seed"], int) or data["seed"] < 0):
        report.add("seed", "must be a non-negative integer")
    _check_number(report, data, "", "f_ec", 1.0)
    if data.get("delta_source") not in (None, "exact", "pipeline"):
        report.add("delta_source", "must be 'exact' or 'pipeline'")
    elif mode in ("pna-bb84", "pna-decoy"):
        if data.get("delta_source", "exact") == "exact":
            if not isinstance(window, dict):
                report.add("window", "delta_source 'exact' needs a fixed {m1, m2} window")
        else:
            for key in ("M", "seed", "alpha"):
                if key not in data:
                    report.add(key, "required when delta_source is 'pipeline'")
    elif mode == "mc-pipeline":
        if window is None:
            report.add("window", "required (fixed {m1, m2} or 'auto-minmax')")
    if data.get("output") is not None and not isinstance(data["output"], str):
        report.add("output", "must be a path string")
    return report


def validate_scenario(name_or_path: str) -> ValidationReport:
    """Load and validate; unreadable files raise ScenarioError (I/O, not schema)."""
    return validate_scenario_dict(load_scenario(name_or_path))


def _sweep_points(sweep: dict) -> list[float]:
    l0, l1, step = sweep["L_start"], sweep["L_end"], sweep["L_step"]
    n = int(math.floor((l1 - l0) / step + 1e-9)) + 1
    return [l0 + i * step for i in range(n)]


def _scheme_at(data: dict, ch: ChannelParams) -> PassiveSchemeParams:
    s = data["scheme"]
    lam = s["lam"]
    if lam == "optimized":
        # choose the attenuator so the source-to-encoder transmittance
        # equals eta_B * eta_f / mu at this distance
        lam = ch.eta_B * ch.eta_f / (s["mu"] * (1.0 - s["t_B"]))
    return PassiveSchemeParams(t_B=s["t_B"], t_D=s["t_D"], lam=lam, mu=s["mu"])


def _channel(data: dict) -> ChannelParams:
    c = data["channel"]
    return ChannelParams(
        eta_B=c["eta_B"],
        alpha_prime=c["alpha_prime"],
        Y0=c.get("Y0", 0.0),
        e_det=c.get("e_det", 0.0),
        e0=c.get("e0", 0.5),
    )


def _noise_model(data: dict):
    noise = data.get("noise")
    if noise is None or noise.get("type") == "none":
        return None
    if noise["type"] == "poisson":
        return PoissonNoise(noise["gamma"])
    return GaussianNoise(noise["sigma2"])


def _window_or_pipeline(data: dict, threads: int):
    """Resolve (window, one_minus_delta, pipeline_degenerate_flag).

    'exact' uses the analytic Poissonian windowed mass; 'pipeline' runs the
    Monte Carlo monitoring experiment and its confidence/noise bound chain.
    The monitor branch sees xi = t_B * t_D independent of the attenuator, so
    one value covers both decoy intensities.
    """
    scheme = PassiveSchemeParams(
        t_B=data["scheme"]["t_B"],
        t_D=data["scheme"]["t_D"],
        lam=data["scheme"]["lam"] if data["scheme"]["lam"] != "optimized" else 1e-9,
        mu=data["scheme"]["mu"],
    )
    window_spec = data.get("window")
    fixed = (
        ThresholdWindow(window_spec["m1"], window_spec["m2"])
        if isinstance(window_spec, dict)
        else None
    )
    if data.get("delta_source", "exact") == "exact":
        if fixed is None:
            raise ScenarioError("delta_source 'exact' needs a fixed {m1, m2} window")
        mean_m = scheme.mu * scheme.xi
        omd = float(
            stats.poisson.cdf(math.floor(fixed.m2), mean_m)
            - stats.poisson.cdf(math.ceil(fixed.m1) - 1, mean_m)
        )
        return fixed, omd, False
    config = RunConfig(
        M=data["M"],
        seed=data["seed"],
        source=PoissonianSource(scheme.mu),
        scheme=scheme,
        noise=_noise_model(data),
        window=fixed,
    )
    result = run_pipeline(config, data["alpha"], threads=threads)
    return result.effective_window, result.untagged_lower, result.degenerate


def _format_row(L, rate, Q, E, delta_bar, untagged) -> str:
    def fmt(x):
        return "" if x is None else f"{x:.10g}"

    return "\t".join(fmt(v) for v in (L, rate, Q, E, delta_bar, untagged))


def run_scenario(
    name_or_path: str,
    seed: int | None = None,
    threads: int = 1,
    output: str | None = None,
    alpha: float | None = None,
    stream=None,
) -> int:
    """Execute a scenario and write its table; returns the process exit code."""
    stream = stream if stream is not None else sys.stdout
    try:
        data = load_scenario(name_or_path)
    except ScenarioError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    report = validate_scenario_dict(data)
    if not report.ok:
        print(report.to_json(), file=sys.stderr)
        return EXIT_VALIDATION
    if seed is not None:
        data["seed"] = seed
    if alpha is not None:
        data["alpha"] = alpha
    if output is not None:
        data["output"] = output
    mode = data["mode"]
    degenerate = False

    try:
        rows: list[str] = []
        summary: dict[str, float | str] = {}
        if mode == "mc-pipeline":
            data["delta_source"] = "pipeline"
            window, untagged, degenerate = _window_or_pipeline(data, threads)
            rows.append(_format_row(None, None, None, None, None, untagged))
            summary["untagged_lower"] = untagged
            summary["window"] = f"[{window.m1:g}, {window.m2:g}]"
        else:
            rows, summary, degenerate = _run_sweep(data, threads)
    except (InfeasibleError, ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE

    noise = _noise_model(data)
    if "scheme" in data and noise is not None:
        scheme = data["scheme"]
        mean_m = scheme["mu"] * scheme["t_B"] * scheme["t_D"]
        if isinstance(noise, PoissonNoise):
            summary["R_SN_p"] = mean_m / noise.gamma
        else:
            summary["R_SN_g"] = mean_m / noise.sigma2

    lines = [
        f"# passiveqkd {__version__}",
        f"# scenario: {json.dumps(data, sort_keys=True)}",
        "# columns: L_km\trate\tQ\tE\tdelta_bar\tuntagged_lower",
    ]
    if degenerate:
        lines.append("# note: untagged bound degenerate (noise saturates the window)")
    lines.extend(rows)
    text = "\n".join(lines) + "\n"

    out_path = data.get("output")
    try:
        if out_path:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stream.write(text)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    for key, value in summary.items():
        print(f"# {key}: {value}", file=stream if not out_path else sys.stdout)
    return EXIT_OK


def _run_sweep(data: dict, threads: int):
    mode = data["mode"]
    ch0 = _channel(data)
    f_ec = data.get("f_ec", 1.0)
    degenerate = False

    window = None
    omd = None
    if mode in ("pna-bb84", "pna-decoy"):
        window, omd, degenerate = _window_or_pipeline(data, threads)

    # cache the adversarial bound across distances when eta is fixed
    apn_bound_cache: dict[float, float] = {}

    rows = []
    max_secure = None
    for L in _sweep_points(data["sweep"]):
        ch = ch0.at_distance(L)
        untagged = None
        if mode == "trusted-decoy":
            point = decoy_rate_trusted(
                ch, data["decoy"]["nu_s"], data["decoy"]["nu_d"], data["decoy"].get("f_ec", 1.0)
            )
        elif mode == "pna-decoy":
            scheme = _scheme_at(data, ch)
            settings = DecoySettings(
                nu_s=data["decoy"]["nu_s"],
                nu_d=data["decoy"]["nu_d"],
                lambda_s=data["decoy"]["lambda_s"],
                lambda_d=data["decoy"]["lambda_d"],
                f_ec=data["decoy"].get("f_ec", 1.0),
            )
            point = decoy_rate_untagged(scheme, ch, settings, window, omd, omd)
            untagged = omd
        elif mode == "pna-bb84":
            scheme = _scheme_at(data, ch)
            point = pna_rate_bb84(scheme, ch, window, omd, f_ec)
            untagged = omd
        elif mode == "trusted-bb84":
            scheme = _scheme_at(data, ch)
            mu_p2 = scheme.mu * scheme.eta
            delta_bar = trusted_delta_bar(mu_p2, ch)
            Q, E = channel_gain_qber(mu_p2, ch)
            rate = gllp_rate(Q, E, min(1.0, delta_bar), f_ec)
            point = _Point(L, rate, delta_bar, Q, E)
        else:  # apn-bb84
            scheme = _scheme_at(data, ch)
            if scheme.eta not in apn_bound_cache:
                apn_bound_cache[scheme.eta] = maximize_ratio(
                    scheme.eta, scheme.mu
                ).p_multi_upper
            Q, E = channel_gain_qber(scheme.mu * scheme.eta, ch)
            delta_bar = apn_bound_cache[scheme.eta] / Q
            rate = gllp_rate(Q, E, min(1.0, delta_bar), f_ec)
            point = _Point(L, rate, delta_bar, Q, E)
        rows.append(_format_row(L, point.rate, point.Q, point.E, point.delta_bar, untagged))
        if point.rate > 0.0:
            max_secure = L

    summary = {"max_secure_distance_km": max_secure if max_secure is not None else "none"}
    return rows, summary, degenerate


@dataclass(frozen=True)
class _Point:
    L: float
    rate: float
    delta_bar: float
    Q: float
    E: float


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="passiveqkd",
        description="Untrusted-source QKD security analysis scenarios",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario")
    p_run.add_argument("scenario", help="bundled scenario name or YAML path")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--output", default=None)
    p_run.add_argument("--alpha", type=float, default=None)

    p_val = sub.add_parser("validate", help="check a scenario without running it")
    p_val.add_argument("scenario")

    sub.add_parser("list-scenarios", help="show bundled scenarios")

    args = parser.parse_args(argv)
    if args.command == "list-scenarios":
        for name in bundled_scenarios():
            print(name)
        return EXIT_OK
    if args.command == "validate":
        try:
            report = validate_scenario(args.scenario)
        except ScenarioError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(report.to_json())
        return EXIT_OK if report.ok else EXIT_VALIDATION
    return run_scenario(
        args.scenario,
        seed=args.seed,
        threads=args.threads,
        output=args.output,
        alpha=args.alpha,
    )


if __name__ == "__main__":
    sys.exit(main())
