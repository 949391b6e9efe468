"""Configuration files, CSV tables, JSON reports and P6 pixmaps."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .core import DEFAULT_ALPHA


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    r: float = 0.2
    a: float = 0.8
    alpha: float = DEFAULT_ALPHA
    curve_n: int = 1024
    quad_n: int = 4096
    basin_g: int = 2048
    eps_conv: float = 1e-6
    window: int = 50
    budget: int = 100_000
    tol_norm: float = 1e-12
    seed: int = 0
    workers: int = 1
    output_dir: str = "out"
    image_theta: float = 0.0
    image_px: int = 128
    image_extent: float = 2.0
    image_budget: int = 2000

    @property
    def cover_n(self):
        """Samples of the 2-curve over ``[0, 2)``."""
        return 2 * self.curve_n

    def validate(self):
        if not 0.0 < self.r < 0.25:
            raise ConfigError(f"r must satisfy 0 < r < 1/4 (limb bound), got {self.r}")
        if not 0.0 <= self.a < 1.0:
            raise ConfigError(f"a must satisfy 0 <= a < 1, got {self.a}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must satisfy 0 < alpha < 1, got {self.alpha}")
        minima = {"curve_n": 8, "quad_n": 2, "basin_g": 8, "window": 1,
                  "workers": 1, "image_px": 1, "image_budget": 1}
        for key, lo in minima.items():
            if getattr(self, key) < lo:
                raise ConfigError(f"{key} must be >= {lo}")
        if self.budget < self.window:
            raise ConfigError("budget must be >= window")
        for key in ("eps_conv", "tol_norm", "image_extent"):
            if getattr(self, key) <= 0:
                raise ConfigError(f"{key} must be positive")
        return self

    def as_dict(self):
        return asdict(self)


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"float": float, "int": int, "str": str}


def _set(cfg, key, raw):
    if key not in _TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    cast = _CASTS[_TYPES[key]]
    try:
        value = cast(float(raw)) if cast is int and "e" in raw.lower() else cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    setattr(cfg, key, value)


def parse_config(text, cfg=None):
    """Parse ``key = value`` lines; ``#`` starts a comment; unknown keys are errors."""
    cfg = RunConfig() if cfg is None else cfg
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        _set(cfg, key, raw)
    return cfg


def load_config(path=None, overrides=()):
    cfg = RunConfig()
    if path is not None:
        cfg = parse_config(Path(path).read_text(encoding="utf-8"), cfg)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, raw = item.split("=", 1)
        _set(cfg, key.strip(), raw.strip())
    return cfg.validate()


def dump_config(cfg):
    return "".join(f"{k} = {v!r}\n" if isinstance(v, float) else f"{k} = {v}\n"
                   for k, v in cfg.as_dict().items())


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

CURVE_HEADER = ("t", "theta", "re_z", "im_z")


def _g(x):
    return f"{x:.17g}"


def write_curve_csv(path, t, z, period=1.0):
    """Curve table with header ``t,theta,re_z,im_z`` (17 significant digits)."""
    t = np.asarray(t, dtype=float)
    z = np.asarray(z, dtype=complex)
    theta = np.mod(t, 1.0)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for ti, th, zi in zip(t, theta, z):
            w.writerow((_g(ti), _g(th), _g(zi.real), _g(zi.imag)))


def read_curve_csv(path):
    """Return ``(t, z)`` arrays from a curve table."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != CURVE_HEADER:
        raise ValueError(f"unexpected curve header {rows[0]}")
    data = np.array([[float(x) for x in row] for row in rows[1:]])
    return data[:, 0], data[:, 2] + 1j * data[:, 3]


def write_complex_table(path, theta, columns):
    """Table ``theta, re_<name>, im_<name>, ...`` for a dict of complex columns."""
    names = list(columns)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta"] + [f"{p}_{n}" for n in names for p in ("re", "im")])
        cols = [np.asarray(columns[n], dtype=complex) for n in names]
        for i, th in enumerate(theta):
            row = [_g(th)]
            for c in cols:
                row += [_g(c[i].real), _g(c[i].imag)]
            w.writerow(row)


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n",
                          encoding="utf-8")


def _jsonable(x):
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x)}")


# ---------------------------------------------------------------------------
# pixmaps
# ---------------------------------------------------------------------------

PALETTE = {
    "g1": (220, 70, 50),
    "g2": (50, 110, 220),
    "esc": (16, 16, 16),
    "und": (245, 245, 245),
}

LEGEND = """\
# basin fiber-slice legend (binary P6 pixmap, 8-bit RGB)
# label  R   G   B    meaning
# g1     220 70  50   orbit attracted to the first invariant curve
# g2     50  110 220  orbit attracted to the second invariant curve
# esc    16  16  16   orbit escaped beyond the escape radius
# und    245 245 245  undecided within the iteration budget
"""


def codes_to_rgb(codes):
    """Map classification codes (curve index, -1 escaped, -2 undecided) to RGB."""
    codes = np.asarray(codes)
    rgb = np.empty(codes.shape + (3,), dtype=np.uint8)
    lut = {0: PALETTE["g1"], 1: PALETTE["g2"], -1: PALETTE["esc"], -2: PALETTE["und"]}
    for code, color in lut.items():
        rgb[codes == code] = color
    return rgb


def write_ppm(path, rgb):
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def read_ppm(path):
    data = Path(path).read_bytes()
    parts = []
    pos = 0
    while len(parts) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        parts.append(data[pos:end])
        pos = end
    if parts[0] != b"P6":
        raise ValueError("not a P6 pixmap")
    w, h = int(parts[1]), int(parts[2])
    pos += 1
    return np.frombuffer(data[pos:pos + 3 * w * h], dtype=np.uint8).reshape(h, w, 3)
