"""JSON system descriptions: parsing, emitting and config handling."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

from .biderivation import AlgebraPresentation, BracketTable
from .exactpoly import ParseError
from .extend import AlgebraMorphism, NoetherData
from .ideals import IdealHandle

VERSION = "biderive-system/1"
REPORT_VERSION = "biderive-report/1"

DEFAULTS = {"darboux_degree": 3, "constants_degree": 5, "core_cap": 6, "noether_retries": 8}


class SystemError_(ValueError):
    """Malformed or inconsistent system description."""


@dataclass
class System:
    name: str
    table: BracketTable
    morphisms: dict = field(default_factory=dict)
    noether: NoetherData | None = None
    witnesses: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)

    @property
    def algebra(self):
        return self.table.algebra


def _strings(data, key):
    val = data.get(key, [])
    if not isinstance(val, list) or not all(isinstance(s, str) for s in val):
        raise SystemError_(f"{key!r} must be a list of strings")
    return val


def parse_variables(spec):
    names, base = [], []
    if not isinstance(spec, list) or not spec:
        raise SystemError_("'variables' must be a nonempty list")
    for v in spec:
        if isinstance(v, str):
            names.append(v)
        elif isinstance(v, dict) and isinstance(v.get("name"), str):
            names.append(v["name"])
            if v.get("base"):
                base.append(v["name"])
        else:
            raise SystemError_(f"bad variable entry {v!r}")
    if len(set(names)) != len(names):
        raise SystemError_("duplicate variable names")
    return names, base


def system_from_dict(data, validate=True):
    if not isinstance(data, dict):
        raise SystemError_("system description must be a JSON object")
    version = data.get("version", VERSION)
    if version != VERSION:
        raise SystemError_(f"unsupported version {version!r}")
    names, base = parse_variables(data.get("variables"))
    assertions = data.get("assertions", {}) or {}
    try:
        alg = AlgebraPresentation(names, base, _strings(data, "relations"), _strings(data, "inverted"),
                                  asserted_domain=assertions.get("domain", True),
                                  transcendental=data.get("transcendental"))
        table_spec = data.get("bracket_table", {}) or {}
        if not isinstance(table_spec, dict):
            raise SystemError_("'bracket_table' must be an object")
        for key in table_spec:
            if len(key.split(",")) != 2:
                raise SystemError_(f"bad bracket key {key!r}")
        table = BracketTable.from_strings(alg, table_spec, validate=validate)
        witnesses = [IdealHandle(alg.ring, [alg.poly(g) for g in gens])
                     for gens in assertions.get("prime_witnesses", [])]
    except KeyError as exc:
        raise SystemError_(f"unknown variable {exc}") from None
    except ParseError as exc:
        raise SystemError_(str(exc)) from None
    morphisms = {}
    for mname, images in (data.get("morphisms") or {}).items():
        if not isinstance(images, dict):
            raise SystemError_(f"morphism {mname!r} must map names to strings")
        morphisms[mname] = dict(images)
    noether = None
    if data.get("noether"):
        n = data["noether"]
        noether = NoetherData(n.get("y_list", []), n.get("b_list", []), n.get("minpolys", []))
    return System(data.get("name", "system"), table, morphisms, noether, witnesses, data)


def load_system(path, validate=True):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SystemError_(f"{path}: invalid JSON: {exc}") from None
    except OSError as exc:
        raise SystemError_(f"{path}: {exc.strerror}") from None
    return system_from_dict(data, validate)


def system_to_dict(table, name="system", noether=None, morphisms=None):
    alg = table.algebra
    out = {
        "version": VERSION,
        "name": name,
        "variables": [{"name": v, "base": True} if v in alg.base_vars else v for v in alg.vars],
        "relations": [str(p) for p in alg.relations],
        "inverted": [str(p) for p in alg.inverted],
        "bracket_table": table.to_strings(),
    }
    if alg._transcendental is not None:
        out["transcendental"] = list(alg._transcendental)
    if noether is not None:
        out["noether"] = {"y_list": list(noether.y_list), "b_list": list(noether.b_list),
                          "minpolys": [str(p) for p in noether.minpolys]}
    if morphisms:
        out["morphisms"] = morphisms
    return out


def parse_map(text):
    """``"u=x, v=y^2"`` -> ``{"u": "x", "v": "y^2"}``."""
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise SystemError_(f"expected name=value in {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def morphism(source, target, images):
    """Comorphism from ``source`` algebra to ``target`` algebra."""
    missing = [v for v in source.vars if v not in images and v not in source.base_vars]
    if missing:
        raise SystemError_(f"no image given for {missing}")
    try:
        return AlgebraMorphism(source, target, images)
    except (KeyError, ParseError) as exc:
        raise SystemError_(f"bad morphism image: {exc}") from None


def load_config(path=None):
    cfg = dict(DEFAULTS)
    path = path or os.environ.get("BIDERIVE_CONFIG")
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                extra = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SystemError_(f"config {path}: {exc}") from None
        unknown = set(extra) - set(DEFAULTS)
        if unknown:
            raise SystemError_(f"unknown config keys {sorted(unknown)}")
        for k, v in extra.items():
            least = 1 if k in ("core_cap", "noether_retries") else 0
            if not isinstance(v, int) or isinstance(v, bool) or v < least:
                raise SystemError_(f"config {k} must be an integer >= {least}")
        cfg.update(extra)
    return cfg


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def digest(obj):
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()
