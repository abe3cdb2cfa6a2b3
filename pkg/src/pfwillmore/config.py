"""Run configuration: line-oriented key = value files with bracketed sections.

Example (the Fig-2 style circle experiment):

    [grid]
    dims = 2
    modes = 64

    [scene]
    name = circle
    radius = 0.15

    [model]
    eps = 2/P          # fractions of the mode count are understood
    dt = auto_fig2     # eps^2 / (2 P^2); auto_fig3 = P^-4; auto_fig13 = eps^2/(8 P^2)
    flow = classical

    [run]
    duration = 4e-4
    snapshot_every = 500
    out_dir = out

Unknown keys, bad values and unknown scenes are reported with their line
number.  Defaults: alpha = 1, sigma = 1e-3, fixed-point tolerance 1e-8.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .flows import FLOW_KINDS, ModelParams
from .geometry import SCENE_NAMES

__all__ = ["RunConfig", "ConfigError", "parse_config", "DT_PRESETS"]

MAX_STEPS = 10**8

DT_PRESETS = {
    "auto_fig2": lambda eps, P: eps**2 / (2.0 * P**2),
    "auto_fig11": lambda eps, P: eps**2 / (2.0 * P**2),
    "auto_fig13": lambda eps, P: eps**2 / (8.0 * P**2),
    "auto_fig3": lambda eps, P: float(P) ** -4,
}


class ConfigError(ValueError):
    """Configuration problem; message carries the offending line number."""


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs for one flow run."""

    dims: int
    modes: int
    scene: str
    scene_params: dict
    model: ModelParams
    duration: float
    snapshot_every: int
    out_dir: str = "out"
    seed: int = 0
    energies: tuple[str, ...] = ("perimeter", "classical")
    track_contours: bool = True
    track_energy: bool = False

    @property
    def steps(self) -> int:
        return round(self.duration / self.model.dt)


_SCENE_PARAM_KEYS = {
    "radius",
    "gap",
    "offset",
    "major_radius",
    "minor_radius",
    "half_extent",
}

_KNOWN = {
    "grid": {"dims", "modes"},
    "scene": {"name"} | _SCENE_PARAM_KEYS,
    "model": {"eps", "dt", "alpha", "sigma", "eta_grad", "fp_tol", "fp_max_iter", "flow"},
    "run": {"duration", "snapshot_every", "out_dir", "seed", "energies", "track_contours", "track_energy"},
}


def _parse_lines(text: str):
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _KNOWN:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside of any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key not in _KNOWN[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in section [{section}]")
        yield lineno, section, key, value


def _as_float(value: str, lineno: int, key: str, modes: int | None = None) -> float:
    # fractions of the mode count ("2/P", "1.5/P") are a common idiom here
    if modes is not None and value.upper().endswith("/P"):
        try:
            return float(value[:-2]) / modes
        except ValueError:
            raise ConfigError(f"line {lineno}: invalid value {value!r} for {key}") from None
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: invalid value {value!r} for {key}") from None


def _as_int(value: str, lineno: int, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: invalid value {value!r} for {key}") from None


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a config document."""
    entries = list(_parse_lines(text))
    raw: dict[str, dict[str, tuple[int, str]]] = {}
    for lineno, section, key, value in entries:
        raw.setdefault(section, {})[key] = (lineno, value)

    def need(section: str, key: str) -> tuple[int, str]:
        if section not in raw or key not in raw[section]:
            raise ConfigError(f"missing required key {key!r} in section [{section}]")
        return raw[section][key]

    def get(section: str, key: str, default=None):
        return raw.get(section, {}).get(key, (0, default))

    lineno, value = need("grid", "dims")
    dims = _as_int(value, lineno, "dims")
    lineno, value = need("grid", "modes")
    modes = _as_int(value, lineno, "modes")

    lineno, value = need("scene", "name")
    scene = value
    if scene not in SCENE_NAMES:
        raise ConfigError(f"line {lineno}: unknown scene {scene!r}; known: {', '.join(SCENE_NAMES)}")
    scene_params = {}
    for key in _SCENE_PARAM_KEYS:
        lineno, value = get("scene", key)
        if value is not None:
            scene_params[key] = _as_float(value, lineno, key, modes)

    lineno, value = need("model", "eps")
    eps = _as_float(value, lineno, "eps", modes)

    lineno, value = need("model", "dt")
    if value in DT_PRESETS:
        dt = DT_PRESETS[value](eps, modes)
    else:
        dt = _as_float(value, lineno, "dt")
    if dt <= 0:
        raise ConfigError(f"line {lineno}: dt must be positive, got {dt:g}")

    lineno, value = get("model", "flow", "classical")
    if value not in FLOW_KINDS:
        raise ConfigError(f"line {lineno}: unknown flow {value!r}; known: {', '.join(FLOW_KINDS)}")
    flow = value

    def model_float(key: str, default: float) -> float:
        lineno, value = get("model", key)
        return default if value is None else _as_float(value, lineno, key)

    try:
        model = ModelParams(
            eps=eps,
            dt=dt,
            alpha=model_float("alpha", 1.0),
            sigma=model_float("sigma", 1e-3),
            eta_grad=model_float("eta_grad", 1e-6),
            fp_tol=model_float("fp_tol", 1e-8),
            fp_max_iter=_as_int(get("model", "fp_max_iter", "100")[1], 0, "fp_max_iter"),
            flow=flow,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc

    lineno, value = need("run", "duration")
    duration = _as_float(value, lineno, "duration")
    if duration <= 0:
        raise ConfigError(f"line {lineno}: duration must be positive")
    if duration / dt > MAX_STEPS:
        raise ConfigError(
            f"line {lineno}: duration/dt = {duration / dt:.3g} exceeds the {MAX_STEPS:.0e} step guard"
        )

    lineno, value = get("run", "snapshot_every", "100")
    snapshot_every = _as_int(value, lineno, "snapshot_every")
    if snapshot_every < 1:
        raise ConfigError(f"line {lineno}: snapshot_every must be >= 1")

    lineno, value = get("run", "energies", "perimeter,classical")
    energies = tuple(name.strip() for name in value.split(",") if name.strip())
    from .energies import ALL_ENERGIES

    for name in energies:
        if name not in ALL_ENERGIES:
            raise ConfigError(f"line {lineno}: unknown energy {name!r}; known: {', '.join(ALL_ENERGIES)}")

    def get_bool(key: str, default: str) -> bool:
        lineno, value = get("run", key, default)
        if value.lower() not in ("true", "false", "0", "1"):
            raise ConfigError(f"line {lineno}: {key} must be a boolean")
        return value.lower() in ("true", "1")

    track_contours = get_bool("track_contours", "true")
    track_energy = get_bool("track_energy", "false")

    try:
        cfg = RunConfig(
            dims=dims,
            modes=modes,
            scene=scene,
            scene_params=scene_params,
            model=model,
            duration=duration,
            snapshot_every=snapshot_every,
            out_dir=get("run", "out_dir", "out")[1],
            seed=_as_int(get("run", "seed", "0")[1], 0, "seed"),
            energies=energies,
            track_contours=track_contours,
            track_energy=track_energy,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    # construct the grid eagerly so dims/modes problems surface at parse time
    from .grid import make_grid

    grid = make_grid(cfg.dims, cfg.modes)
    if cfg.model.eps < 2.0 * grid.spacing:
        raise ConfigError(
            f"eps = {cfg.model.eps:g} is below 2*dx = {2.0 * grid.spacing:g}: interface unresolvable"
        )
    return cfg
