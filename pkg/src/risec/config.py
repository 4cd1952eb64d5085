"""Experiment configuration: a flat ``key = value`` text format with dotted
keys, parsed and validated once at the boundary (dB/dBm converted to linear
watts here and nowhere else)."""

from dataclasses import dataclass, field

import numpy as np

from risec.channel import ScenarioGeometry
from risec.system import SystemParams

SWEEP_VARIABLES = ("P_T_dBm", "n", "eta2_dB")
METHODS = ("active", "passive", "no_ris")


class ConfigError(ValueError):
    pass


def dbm_to_watts(x):
    return 10.0 ** (x / 10.0) * 1e-3


def db_to_linear(x):
    return 10.0 ** (x / 10.0)


@dataclass
class RawParams:
    """System parameters in the external dB/dBm units."""

    m: int
    n: int
    pt_dbm: float
    pi_dbm: float
    eta2_db: float
    noise_dbm: float


@dataclass
class SweepSpec:
    variable: str
    values: list


@dataclass
class ExperimentConfig:
    geometry: ScenarioGeometry
    raw: RawParams
    sweep: SweepSpec
    realizations: int
    base_seed: int
    methods: list
    traces: bool = False
    out_dir: str = None
    params: SystemParams = field(init=False)

    def __post_init__(self):
        self.params = self.params_for(None)

    def params_for(self, sweep_value):
        """SystemParams (linear watts) for one sweep point; None = base."""
        r = self.raw
        m, n = r.m, r.n
        pt_dbm, eta2_db = r.pt_dbm, r.eta2_db
        if sweep_value is not None:
            if self.sweep.variable == "P_T_dBm":
                pt_dbm = float(sweep_value)
            elif self.sweep.variable == "n":
                n = int(sweep_value)
            elif self.sweep.variable == "eta2_dB":
                eta2_db = float(sweep_value)
        sigma2 = dbm_to_watts(r.noise_dbm)
        eta = np.full(n, np.sqrt(db_to_linear(eta2_db)))
        return SystemParams(
            m=m,
            n=n,
            p_t=dbm_to_watts(pt_dbm),
            p_i=dbm_to_watts(r.pi_dbm),
            eta=eta,
            sigma2_B=sigma2,
            sigma2_E=sigma2,
            sigma2_I=sigma2,
        )


def _parse_pair(value, key):
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected 'x,y', got {value!r}")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def _parse_bool(value, key):
    v = value.strip().lower()
    if v in ("true", "1", "yes", "on"):
        return True
    if v in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


_GEOMETRY_OPTIONAL = {
    "d0": float,
    "beta_db": float,
    "alpha_ab": float,
    "alpha_ae": float,
    "alpha_ai": float,
    "alpha_ib": float,
    "alpha_ie": float,
    "kappa": float,
    "dt_over_lambda": float,
    "dr_over_lambda": float,
}
_GEOMETRY_FIELD = {
    "alpha_ab": "alpha_AB",
    "alpha_ae": "alpha_AE",
    "alpha_ai": "alpha_AI",
    "alpha_ib": "alpha_IB",
    "alpha_ie": "alpha_IE",
}

_KNOWN_KEYS = (
    {"geometry.alice_pos", "geometry.bob_pos", "geometry.eve_pos", "geometry.ris_pos"}
    | {f"geometry.{k}" for k in _GEOMETRY_OPTIONAL}
    | {
        "params.m",
        "params.n",
        "params.pt_dbm",
        "params.pi_dbm",
        "params.eta2_db",
        "params.noise_dbm",
        "sweep.variable",
        "sweep.values",
        "realizations",
        "base_seed",
        "methods",
        "traces",
        "out_dir",
    }
)

_REQUIRED = [
    "geometry.alice_pos",
    "geometry.bob_pos",
    "geometry.eve_pos",
    "geometry.ris_pos",
    "params.m",
    "params.n",
    "params.pt_dbm",
    "params.pi_dbm",
    "params.eta2_db",
    "params.noise_dbm",
    "sweep.variable",
    "sweep.values",
    "realizations",
    "base_seed",
    "methods",
]


def parse_text(text):
    """Parse config text into a key->string dict; rejects unknown keys."""
    entries = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def from_entries(entries):
    for key in _REQUIRED:
        if key not in entries:
            field_name = key.rsplit(".", 1)[-1]
            raise ConfigError(f"missing required key `{field_name}` ({key})")

    geo_kwargs = {
        "alice_pos": _parse_pair(entries["geometry.alice_pos"], "geometry.alice_pos"),
        "bob_pos": _parse_pair(entries["geometry.bob_pos"], "geometry.bob_pos"),
        "eve_pos": _parse_pair(entries["geometry.eve_pos"], "geometry.eve_pos"),
        "ris_pos": _parse_pair(entries["geometry.ris_pos"], "geometry.ris_pos"),
    }
    for k, conv in _GEOMETRY_OPTIONAL.items():
        key = f"geometry.{k}"
        if key in entries:
            try:
                geo_kwargs[_GEOMETRY_FIELD.get(k, k)] = conv(entries[key])
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from exc
    try:
        geometry = ScenarioGeometry(**geo_kwargs)
    except ValueError as exc:
        raise ConfigError(f"geometry: {exc}") from exc

    def num(key, conv, check=None, what=""):
        try:
            v = conv(entries[key])
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from exc
        if check is not None and not check(v):
            raise ConfigError(f"{key}: {what}")
        return v

    raw = RawParams(
        m=num("params.m", int, lambda v: v >= 1, "must be >= 1"),
        n=num("params.n", int, lambda v: v >= 1, "must be >= 1"),
        pt_dbm=num("params.pt_dbm", float),
        pi_dbm=num("params.pi_dbm", float),
        eta2_db=num("params.eta2_db", float),
        noise_dbm=num("params.noise_dbm", float),
    )

    variable = entries["sweep.variable"]
    if variable not in SWEEP_VARIABLES:
        raise ConfigError(
            f"sweep.variable: expected one of {SWEEP_VARIABLES}, got {variable!r}"
        )
    try:
        values = [float(v) for v in entries["sweep.values"].split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"sweep.values: {exc}") from exc
    if not values or any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("sweep.values: must be a non-empty strictly increasing list")
    if variable == "n":
        values = [int(v) for v in values]

    methods = [m.strip() for m in entries["methods"].split(",") if m.strip()]
    for mth in methods:
        if mth not in METHODS:
            raise ConfigError(f"methods: unknown method {mth!r}")
    if not methods:
        raise ConfigError("methods: at least one method required")

    return ExperimentConfig(
        geometry=geometry,
        raw=raw,
        sweep=SweepSpec(variable=variable, values=values),
        realizations=num("realizations", int, lambda v: v >= 1, "must be >= 1"),
        base_seed=num("base_seed", int),
        methods=methods,
        traces=_parse_bool(entries.get("traces", "false"), "traces"),
        out_dir=entries.get("out_dir"),
    )


def load_config(path):
    """Load and validate an experiment config file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return from_entries(parse_text(text))
