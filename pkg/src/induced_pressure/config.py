"""Run configuration: structured text in, normalized form out.

A run is described by a TOML document with ``[shift]``, ``[phi]``,
``[psi]``, ``[run]``, ``[group]`` and ``[output]`` tables; command-line
flags override individual fields.  Parsing normalizes the document once;
serializing the normalized form and parsing it again is a fixed point,
and the configuration hash is taken over the normalized form, so
identical runs are recognizably identical.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import DomainError
from .potentials import (
    Potential,
    alpha_farey_geometric,
    constant,
    first_symbol_negated,
    from_table,
    zero,
)
from .shifts import (
    ShiftSpec,
    WordCollection,
    all_words,
    from_matrix,
    full_shift,
    periodic_at,
    periodic_words,
    renewal_shift,
    starting_in,
)

DEFAULTS = {
    "shift": {"family": "full", "n": 2},
    "phi": {"builtin": "zero"},
    "psi": {"builtin": "constant", "c": 1.0},
    "run": {
        "method": "auto",
        "collection": "all",
        "trunc": 64,
        "eta": 1.0,
        "tmax": 20.0,
        "length_cap": 100,
        "loop_cap": 100000,
        "at": 1,
        "tol": 1e-10,
        "tail": "auto",
    },
    "group": {"kind": "z^1", "variant": "plain", "nmax": 1000},
    "output": {"format": "json", "allow_infinite": False},
}


class ValidationError(DomainError):
    """Configuration failed validation; the message carries field paths."""


@dataclass
class RunConfig:
    data: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ValidationError(f"config: invalid TOML: {e}") from None
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        data = {}
        for section, defaults in DEFAULTS.items():
            body = dict(defaults)
            extra = raw.get(section, {})
            if not isinstance(extra, dict):
                raise ValidationError(f"{section}: expected a table")
            body.update(extra)
            data[section] = body
        for section in raw:
            if section not in DEFAULTS:
                raise ValidationError(f"{section}: unknown section")
        cfg = cls(data)
        cfg.validate()
        return cfg

    def override(self, section: str, key: str, value) -> None:
        if value is not None:
            self.data[section][key] = value

    # -- validation -----------------------------------------------------

    def validate(self) -> None:
        sh = self.data["shift"]
        fam = sh.get("family")
        if fam not in ("full", "renewal", "matrix"):
            raise ValidationError(f"shift.family: unknown family {fam!r}")
        if fam == "full" and int(sh.get("n", 0)) < 1:
            raise ValidationError("shift.n: full shifts need n >= 1")
        if fam == "matrix" and not sh.get("rows"):
            raise ValidationError("shift.rows: matrix shifts need explicit rows")
        for pot in ("phi", "psi"):
            b = self.data[pot].get("builtin")
            if b not in ("zero", "constant", "alpha_farey_geometric",
                         "first_symbol_negated", "table"):
                raise ValidationError(f"{pot}.builtin: unknown potential {b!r}")
            if b == "table" and not self.data[pot].get("entries"):
                raise ValidationError(f"{pot}.entries: table potentials need entries")
        run = self.data["run"]
        if run["method"] not in ("window", "pseudo", "exhaust", "auto", "loop"):
            raise ValidationError(f"run.method: unknown method {run['method']!r}")
        if float(run["eta"]) <= 0:
            raise ValidationError("run.eta: window width must be positive")
        if int(run["trunc"]) < 1:
            raise ValidationError("run.trunc: need at least one retained symbol")
        self.parse_collection(run["collection"])
        out = self.data["output"]
        if out["format"] not in ("json", "csv", "text"):
            raise ValidationError(f"output.format: unknown format {out['format']!r}")
        g = self.data["group"]
        if g["variant"] not in ("plain", "nobacktrack"):
            raise ValidationError(f"group.variant: unknown variant {g['variant']!r}")

    # -- builders ---------------------------------------------------------

    def build_shift(self) -> ShiftSpec:
        sh = self.data["shift"]
        if sh["family"] == "full":
            return full_shift(int(sh["n"]))
        if sh["family"] == "renewal":
            return renewal_shift()
        return from_matrix(sh["rows"], sh.get("symbols"))

    def build_potential(self, which: str) -> Potential:
        body = self.data[which]
        b = body["builtin"]
        if b == "zero":
            return zero()
        if b == "constant":
            return constant(float(body.get("c", 1.0)))
        if b == "alpha_farey_geometric":
            return alpha_farey_geometric()
        if b == "first_symbol_negated":
            return first_symbol_negated()
        entries = body["entries"]
        depth = int(body.get("depth", 1))
        table = {}
        for row in entries:
            if len(row) != depth + 1:
                raise ValidationError(
                    f"{which}.entries: each row needs {depth} coordinates + value"
                )
            table[tuple(row[:-1])] = float(row[-1])
        flags = {}
        if body.get("strictly_positive"):
            flags["strictly_positive"] = True
        if body.get("nonnegative"):
            flags["nonnegative"] = True
        return from_table(depth, table, name=f"{which}-table", **flags)

    @staticmethod
    def parse_collection(text) -> WordCollection:
        text = str(text)
        if text == "all":
            return all_words()
        if text == "periodic":
            return periodic_words()
        if text.startswith("periodic@"):
            return periodic_at(int(text.split("@", 1)[1]))
        if text.startswith("starting:"):
            syms = [int(x) for x in text.split(":", 1)[1].split(",") if x]
            if not syms:
                raise ValidationError("run.collection: empty starting set")
            return starting_in(syms)
        raise ValidationError(f"run.collection: cannot parse {text!r}")

    # -- normal form ------------------------------------------------------

    def normalized(self) -> dict:
        out = {}
        for section in sorted(self.data):
            body = self.data[section]
            out[section] = {k: body[k] for k in sorted(body)}
        return out

    def to_toml(self) -> str:
        """Canonical TOML for the normalized configuration."""
        lines = []
        for section, body in self.normalized().items():
            lines.append(f"[{section}]")
            for k, v in body.items():
                lines.append(f"{k} = {_toml_value(v)}")
            lines.append("")
        return "\n".join(lines)

    def config_hash(self) -> str:
        blob = json.dumps(self.normalized(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise ValidationError(f"cannot serialize {type(v).__name__} into config text")
