"""Scenario files (TOML) and the CSV/TOML artifact writers.

A scenario bundles a distribution, supplies, and per-command parameters.
Output files are deterministic: CSV numbers use %.9g, TOML numbers use
repr (shortest round-trip), so identical inputs give identical bytes.
"""

import math
import os

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .boundary import Boundary
from .dist import DensityModel, load_grid_csv
from .errors import ScenarioError
from .mechanism import Mechanism


def load_toml(path):
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ScenarioError("file not found: %s" % path, field="scenario")
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError("invalid TOML: %s" % exc, field="scenario")


class Scenario:
    """Parsed scenario file with field-checked access."""

    def __init__(self, data, base_dir="."):
        if not isinstance(data, dict):
            raise ScenarioError("top level must be a table", field="scenario")
        self.data = data
        self.base_dir = base_dir

    @classmethod
    def load(cls, path):
        return cls(load_toml(path), base_dir=os.path.dirname(os.path.abspath(path)))

    def section(self, name, required=False):
        sec = self.data.get(name)
        if sec is None:
            if required:
                raise ScenarioError("missing section", field=name)
            return {}
        if not isinstance(sec, dict):
            raise ScenarioError("must be a table", field=name)
        return sec

    def value(self, section, key, default=None, required=False, kind=None):
        sec = self.section(section, required=required and default is None)
        if key not in sec:
            if required:
                raise ScenarioError("missing key", field="%s.%s" % (section, key))
            return default
        v = sec[key]
        if kind is float:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ScenarioError("must be a number", field="%s.%s" % (section, key))
            return float(v)
        if kind is int:
            if isinstance(v, bool) or not isinstance(v, int):
                raise ScenarioError("must be an integer", field="%s.%s" % (section, key))
            return int(v)
        if kind is str and not isinstance(v, str):
            raise ScenarioError("must be a string", field="%s.%s" % (section, key))
        if kind is list and not isinstance(v, list):
            raise ScenarioError("must be an array", field="%s.%s" % (section, key))
        return v

    def model(self):
        kind = self.value("distribution", "kind", required=True, kind=str)
        if kind == "uniform":
            return DensityModel.uniform()
        if kind == "grid":
            path = self.value("distribution", "path", required=True, kind=str)
            if not os.path.isabs(path):
                path = os.path.join(self.base_dir, path)
            return load_grid_csv(path)
        if kind == "example1":
            return DensityModel.example1(
                self.value("distribution", "epsilon", required=True, kind=float),
                self.value("distribution", "k", required=True, kind=float),
            )
        if kind == "affine":
            return DensityModel.affine(
                self.value("distribution", "c0", required=True, kind=float),
                self.value("distribution", "ca", required=True, kind=float),
                self.value("distribution", "cb", required=True, kind=float),
            )
        raise ScenarioError(
            "unknown kind %r (expected uniform/grid/example1/affine)" % kind,
            field="distribution.kind",
        )

    def supplies(self):
        return (
            self.value("supplies", "mu_a", required=True, kind=float),
            self.value("supplies", "mu_b", required=True, kind=float),
        )


# -- writers ---------------------------------------------------------------


def format_number(x):
    """CSV cell formatting: 9 significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.9g" % float(x)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _toml_scalar(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, str):
        return '"%s"' % v.replace("\\", "\\\\").replace('"', '\\"')
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[%s]" % ", ".join(_toml_scalar(x) for x in v)
    raise TypeError("cannot serialize %r" % type(v))


def dump_toml(mapping):
    """Serialize {key: scalar-or-list} and {section: {key: ...}} tables."""
    out = []
    sections = []
    for key, v in mapping.items():
        if isinstance(v, dict):
            sections.append((key, v))
        else:
            out.append("%s = %s" % (key, _toml_scalar(v)))
    for name, table in sections:
        out.append("")
        out.append("[%s]" % name)
        for key, v in table.items():
            out.append("%s = %s" % (key, _toml_scalar(v)))
    return "\n".join(out).lstrip("\n") + "\n"


def write_toml(path, mapping):
    with open(path, "w") as fh:
        fh.write(dump_toml(mapping))


# -- mechanism and boundary files ------------------------------------------


def mechanism_to_dict(mech):
    return {
        "menu_a": [[o.quality, o.ordeal] for o in mech.menu_a],
        "menu_b": [[o.quality, o.ordeal] for o in mech.menu_b],
    }


def _parse_pairs(data, key):
    raw = data.get(key)
    if not isinstance(raw, list) or not raw:
        raise ScenarioError("must be a non-empty array of pairs", field=key)
    pairs = []
    for item in raw:
        if (
            not isinstance(item, list)
            or len(item) != 2
            or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in item)
        ):
            raise ScenarioError("entries must be [number, number]", field=key)
        pairs.append((float(item[0]), float(item[1])))
    return pairs


def mechanism_from_dict(data):
    return Mechanism(_parse_pairs(data, "menu_a"), _parse_pairs(data, "menu_b"))


def save_mechanism(path, mech):
    write_toml(path, mechanism_to_dict(mech))


def load_mechanism(path):
    return mechanism_from_dict(load_toml(path))


def boundary_to_dict(z):
    return {"knots": [[a, b] for a, b in zip(z.ax, z.bx)]}


def boundary_from_dict(data):
    return Boundary(np.array(_parse_pairs(data, "knots")))


def save_boundary(path, z):
    write_toml(path, boundary_to_dict(z))


def load_boundary(path):
    return boundary_from_dict(load_toml(path))
