"""One-contract YAML files: flat keys, lists for schedules, fixings and legs.

Example::

    kind: geo_asian_fixed
    r: 0.05
    q: 0.0
    sigma: 0.2
    strike: 100
    schedule: [0.0, 0.3333333333333333, 0.6666666666666666, 1.0]
    fixings: [100]
    x: 100
    t: 0.0
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .binaries import GeneralBinaryCondition, PowerBinarySpec, reduce_general_condition
from .contracts import ContractSpec, NormDistContract, PowerStandardSpec, expiry_of
from .core import FixedObservations, MarketParams, MonitoringSchedule, Sign
from .normdist import NormDistPayoffSpec
from .products.asian import ContAsianFixedSpec, ContAsianFloatingSpec, GeoAsianFixedSpec, GeoAsianFloatingSpec
from .products.savings import SavingsPlanSpec


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads ``1e-8`` style floats (no dot), as YAML 1.2 does."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?(?:[0-9][0-9_]*)(?:\.[0-9_]*)?[eE][-+]?[0-9]+$"),
    list("-+0123456789"),
)


class ContractFileError(ValueError):
    """Parse or validation failure, with the 1-based line of the offending key."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = f"line {line}: " if line is not None else ""
        what = f"{key}: " if key is not None else ""
        super().__init__(f"{where}{what}{message}")
        self.line = line
        self.key = key


MARKET = ("r", "q", "sigma")
SPOT = ("x", "t")
FIELDS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    # kind: (required, optional) beyond "kind"
    "power_standard": (MARKET + ("x", "alpha", "T"), ("t",)),
    "power_binary": (MARKET + ("x", "alpha", "threshold", "sign", "expiry"), ("t", "beta")),
    "nth_binary": (MARKET + ("x", "alpha", "thresholds", "signs", "expiries"), ("t",)),
    "normdist": (MARKET + ("x", "beta", "i", "K", "alpha", "tau1", "tau1p", "T"), ("t",)),
    "savings_plan": (("r_d", "r_f", "x0", "T", "sigma", "x"), ("t",)),
    "geo_asian_fixed": (MARKET + ("x", "strike", "schedule"), ("t", "fixings")),
    "geo_asian_floating": (MARKET + ("x", "schedule"), ("t", "fixings")),
    "cont_asian_fixed": (MARKET + ("x", "strike", "T"), ("t", "J")),
    "cont_asian_floating": (MARKET + ("x", "T"), ("t", "J")),
}
KIND_NAMES = tuple(FIELDS)


@dataclass(frozen=True)
class ParsedContract:
    kind: str
    contract: ContractSpec
    x: float
    t: float
    params: MarketParams | None
    J: float | None = None
    lines: dict[str, int] = field(default_factory=dict)


class _Fields:
    def __init__(self, data: dict, lines: dict[str, int]):
        self.data = data
        self.lines = lines

    def fail(self, key: str, message: str):
        raise ContractFileError(message, self.lines.get(key), key)

    def real(self, key: str, *, positive: bool = False, nonneg: bool = False, default=None) -> float:
        if key not in self.data:
            if default is not None:
                return default
            self.fail(key, "missing required field")
        v = self.data[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(key, f"expected a number, got {v!r}")
        v = float(v)
        if not math.isfinite(v):
            self.fail(key, f"must be finite, got {v!r}")
        if positive and v <= 0.0:
            self.fail(key, f"must be > 0, got {v!r}")
        if nonneg and v < 0.0:
            self.fail(key, f"must be >= 0, got {v!r}")
        return v

    def reals(self, key: str, *, positive: bool = False, default=None) -> tuple[float, ...]:
        if key not in self.data:
            if default is not None:
                return default
            self.fail(key, "missing required field")
        v = self.data[key]
        if not isinstance(v, list):
            self.fail(key, f"expected a list, got {v!r}")
        out = []
        for item in v:
            if isinstance(item, bool) or not isinstance(item, (int, float)) or not math.isfinite(item):
                self.fail(key, f"expected finite numbers, got {item!r}")
            if positive and item <= 0.0:
                self.fail(key, f"entries must be > 0, got {item!r}")
            out.append(float(item))
        return tuple(out)

    def sign(self, key: str, value=None) -> Sign:
        try:
            return Sign.parse(self.data[key] if value is None else value)
        except ValueError as exc:
            self.fail(key, str(exc))

    def build(self, key: str, factory, *args):
        """Call a constructor and pin its complaint on ``key``."""
        try:
            return factory(*args)
        except ValueError as exc:
            self.fail(key, str(exc))


def _key_lines(text: str) -> dict[str, int]:
    node = yaml.compose(text, Loader=_Loader)
    if not isinstance(node, yaml.MappingNode):
        raise ContractFileError("top level must be a mapping of keys to values", 1)
    lines: dict[str, int] = {}
    for k, _ in node.value:
        if k.value in lines:
            raise ContractFileError("duplicate key", k.start_mark.line + 1, k.value)
        lines[k.value] = k.start_mark.line + 1
    return lines


def parse_contract_text(text: str) -> ParsedContract:
    try:
        lines = _key_lines(text)
        data = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ContractFileError(f"malformed YAML: {getattr(exc, 'problem', exc)}", mark.line + 1 if mark else None) from None
    if data is None:
        raise ContractFileError("empty contract file", 1)
    f = _Fields(data, lines)
    if "X" in data:
        if "x" in data:
            f.fail("X", "give the spot as x or X, not both")
        data["x"] = data.pop("X")
        lines["x"] = lines.pop("X")
    kind = data.get("kind")
    if kind is None:
        raise ContractFileError("missing required field", None, "kind")
    if kind not in FIELDS:
        f.fail("kind", f"unknown kind {kind!r}; expected one of {', '.join(KIND_NAMES)}")
    required, optional = FIELDS[kind]
    allowed = set(required) | set(optional) | {"kind"}
    for key in data:
        if key not in allowed:
            f.fail(key, f"unknown key for kind {kind}")
    for key in required:
        if key not in data:
            raise ContractFileError("missing required field", None, key)

    x = f.real("x", positive=True)
    t = f.real("t", nonneg=True, default=0.0)
    params = None
    if kind != "savings_plan":
        r, q = f.real("r"), f.real("q")
        sigma = f.real("sigma", positive=True)
        params = MarketParams(r, q, sigma)

    J = None
    if kind == "power_standard":
        contract = PowerStandardSpec(f.real("alpha"), f.real("T", nonneg=True))
    elif kind == "power_binary":
        alpha, xi, T = f.real("alpha"), f.real("threshold", positive=True), f.real("expiry", nonneg=True)
        s = f.sign("sign")
        if "beta" in data:
            beta = f.real("beta")
            if beta == 0.0:
                f.fail("beta", "constant condition: beta must be non-zero")
            contract = reduce_general_condition(alpha, GeneralBinaryCondition(beta, xi, s), T)
        else:
            contract = PowerBinarySpec.first_order(alpha, xi, s, T)
    elif kind == "nth_binary":
        thresholds = f.reals("thresholds", positive=True)
        if not isinstance(data["signs"], list):
            f.fail("signs", "expected a list")
        signs = tuple(f.sign("signs", v) for v in data["signs"])
        expiries = f.reals("expiries")
        contract = f.build("thresholds", PowerBinarySpec, f.real("alpha"), thresholds, signs, expiries)
        if contract.order > 16:
            f.fail("thresholds", f"order too large: {contract.order} > 16")
    elif kind == "normdist":
        payoff = f.build(
            "K",
            NormDistPayoffSpec,
            f.real("beta"),
            f.real("i"),
            f.real("K", positive=True),
            f.real("alpha"),
            f.real("tau1"),
            f.real("tau1p", nonneg=True),
        )
        contract = NormDistContract(payoff, f.real("T", nonneg=True))
    elif kind == "savings_plan":
        contract = SavingsPlanSpec(
            f.real("r_d"), f.real("r_f"), f.real("x0", positive=True), f.real("T", nonneg=True), f.real("sigma", positive=True)
        )
    elif kind in ("geo_asian_fixed", "geo_asian_floating"):
        schedule = f.build("schedule", MonitoringSchedule, f.reals("schedule"))
        fixings = FixedObservations(f.reals("fixings", positive=True, default=()))
        if kind == "geo_asian_fixed":
            contract = f.build("schedule", GeoAsianFixedSpec, schedule, f.real("strike", positive=True), fixings)
        else:
            contract = f.build("schedule", GeoAsianFloatingSpec, schedule, fixings)
        m = sum(1 for s in schedule.times if s <= t)
        if len(fixings) != m:
            f.fail("fixings" if "fixings" in data else "t", f"{m} monitoring dates are at or before t={t!r} but {len(fixings)} fixings are given")
    else:
        T = f.real("T", positive=True)
        if kind == "cont_asian_fixed":
            contract = ContAsianFixedSpec(f.real("strike", positive=True), T)
        else:
            contract = ContAsianFloatingSpec(T)
        if "J" in data:
            J = f.real("J", positive=True)
        elif t > 0.0:
            raise ContractFileError("required when t > 0", None, "J")

    if t > expiry_of(contract):
        f.fail("t", f"valuation time {t!r} is after expiry {expiry_of(contract)!r}")
    return ParsedContract(kind, contract, x, t, params, J, dict(lines))


def load_contract(path: str | Path) -> ParsedContract:
    """Read and validate a contract file; ``OSError`` propagates."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_contract_text(text)
