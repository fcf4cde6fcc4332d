"""MATPOWER case files (version 2 subset).

Accepted grammar::

    function mpc = <name>            (optional)
    mpc.version = '2';               (optional, ignored)
    mpc.baseMVA = <number>;
    mpc.bus = [ <row>; <row>; ... ];
    mpc.gen = [ ... ];
    mpc.branch = [ ... ];

Rows are separated by ``;`` and/or newlines, values by whitespace or commas,
and ``%`` starts a comment.  Other ``mpc.*`` assignments (``gencost``,
``areas``, ...) are skipped.  Column layouts are the standard ones::

    bus    bus_i type Pd Qd Gs Bs area Vm Va baseKV zone Vmax Vmin
    gen    bus Pg Qg Qmax Qmin Vg mBase status Pmax Pmin + 11 capability/ramp columns
    branch fbus tbus r x b rateA rateB rateC ratio angle status angmin angmax

Powers are in MW/MVAr, angles in degrees, impedances already per unit.
Columns past the standard width are dropped with a warning; a row shorter
than the columns the power flow needs is an error.
"""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

PQ, PV, REF, ISOLATED = 1, 2, 3, 4
BUS_TYPE_NAMES = {PQ: "PQ", PV: "PV", REF: "slack", ISOLATED: "isolated"}

# column indices
BUS_I, BUS_TYPE, PD, QD, GS, BS, BUS_AREA, VM, VA, BASE_KV, ZONE, VMAX, VMIN = range(13)
GEN_BUS, PG, QG, QMAX, QMIN, VG, MBASE, GEN_STATUS, PMAX, PMIN = range(10)
F_BUS, T_BUS, BR_R, BR_X, BR_B, RATE_A, RATE_B, RATE_C, TAP, SHIFT, BR_STATUS, ANGMIN, ANGMAX = range(13)

N_COLS = {"bus": 13, "gen": 21, "branch": 13}
MIN_COLS = {"bus": VA + 1, "gen": GEN_STATUS + 1, "branch": BR_STATUS + 1}
_HEADERS = {
    "bus": "bus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin",
    "gen": "bus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin\tPc1\tPc2\tQc1min"
           "\tQc1max\tQc2min\tQc2max\tramp_agc\tramp_10\tramp_30\tramp_q\tapf",
    "branch": "fbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax",
}
BUNDLED = ("case14", "case30")


class CaseParseError(ValueError):
    pass


@dataclass(eq=False)
class PowerFlowCase:
    """Network data in MATPOWER column layout; per-unit views are properties."""

    name: str
    base_mva: float
    bus: np.ndarray
    gen: np.ndarray
    branch: np.ndarray

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.base_mva > 0:
            raise CaseParseError(f"baseMVA must be positive, got {self.base_mva}")
        ids = self.bus[:, BUS_I].astype(int)
        uniq, counts = np.unique(ids, return_counts=True)
        if np.any(counts > 1):
            raise CaseParseError(f"duplicate bus ids: {uniq[counts > 1].tolist()}")
        n_ref = int(np.sum(self.bus[:, BUS_TYPE] == REF))
        if n_ref != 1:
            raise CaseParseError(f"expected exactly one slack bus, found {n_ref}")
        known = set(ids.tolist())
        for col, what in ((F_BUS, "from"), (T_BUS, "to")):
            bad = sorted(set(self.branch[:, col].astype(int).tolist()) - known)
            if bad:
                raise CaseParseError(f"branch {what}-bus references unknown bus ids {bad}")
        bad = sorted(set(self.gen[:, GEN_BUS].astype(int).tolist()) - known)
        if bad:
            raise CaseParseError(f"generator references unknown bus ids {bad}")

    # sizes and indices
    @property
    def n_bus(self) -> int:
        return self.bus.shape[0]

    @property
    def n_branch(self) -> int:
        return self.branch.shape[0]

    @property
    def bus_ids(self) -> np.ndarray:
        return self.bus[:, BUS_I].astype(int)

    def bus_index(self, ids) -> np.ndarray:
        """Row positions of external bus ids."""
        lookup = {b: i for i, b in enumerate(self.bus_ids.tolist())}
        return np.array([lookup[int(b)] for b in np.atleast_1d(ids)], dtype=int)

    @property
    def bus_types(self) -> np.ndarray:
        return self.bus[:, BUS_TYPE].astype(int)

    @property
    def ref(self) -> int:
        return int(np.flatnonzero(self.bus_types == REF)[0])

    @property
    def pv(self) -> np.ndarray:
        return np.flatnonzero(self.bus_types == PV)

    @property
    def pq(self) -> np.ndarray:
        return np.flatnonzero(self.bus_types == PQ)

    @property
    def pvpq(self) -> np.ndarray:
        return np.flatnonzero((self.bus_types == PV) | (self.bus_types == PQ))

    # per-unit views
    @property
    def online_gen(self) -> np.ndarray:
        return self.gen[self.gen[:, GEN_STATUS] > 0]

    @property
    def online_branch(self) -> np.ndarray:
        return self.branch[self.branch[:, BR_STATUS] > 0]

    def sbus(self) -> np.ndarray:
        """Scheduled complex injection per bus (generation minus load), per unit."""
        s = -(self.bus[:, PD] + 1j * self.bus[:, QD])
        g = self.online_gen
        np.add.at(s, self.bus_index(g[:, GEN_BUS]), g[:, PG] + 1j * g[:, QG])
        return s / self.base_mva

    def voltage_setpoints(self) -> np.ndarray:
        """Initial |V|: 1 everywhere, generator setpoints on PV and slack buses."""
        vm = np.ones(self.n_bus)
        g = self.online_gen
        idx = self.bus_index(g[:, GEN_BUS])
        regulated = np.isin(self.bus_types[idx], (PV, REF))
        vm[idx[regulated]] = g[regulated, VG]
        return vm

    def copy(self) -> "PowerFlowCase":
        return PowerFlowCase(self.name, self.base_mva, self.bus.copy(), self.gen.copy(),
                             self.branch.copy())

    def equals(self, other: "PowerFlowCase") -> bool:
        return (self.base_mva == other.base_mva
                and all(np.array_equal(getattr(self, k), getattr(other, k))
                        for k in ("bus", "gen", "branch")))


_ASSIGN = re.compile(r"mpc\.(\w+)\s*=\s*", re.M)


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("%", 1)[0] for line in text.splitlines())


def _parse_matrix(body: str, block: str) -> np.ndarray:
    rows = []
    for lineno, raw in enumerate(re.split(r"[;\n]", body)):
        toks = raw.replace(",", " ").split()
        if not toks:
            continue
        try:
            rows.append([float(t) for t in toks])
        except ValueError as exc:
            raise CaseParseError(f"mpc.{block}: malformed row {raw.strip()!r}") from exc
    if not rows:
        raise CaseParseError(f"mpc.{block} is empty")
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise CaseParseError(f"mpc.{block}: rows have differing lengths {sorted(width)}")
    a = np.array(rows)
    ncol = a.shape[1]
    if ncol < MIN_COLS[block]:
        raise CaseParseError(
            f"mpc.{block}: need at least {MIN_COLS[block]} columns, got {ncol}")
    full = N_COLS[block]
    if ncol > full:
        warnings.warn(f"mpc.{block}: ignoring {ncol - full} unknown trailing column(s)",
                      stacklevel=3)
        a = a[:, :full]
    elif ncol < full:
        a = np.hstack([a, np.zeros((a.shape[0], full - ncol))])
    return a


def parse_case(text: str, name: str = "case") -> PowerFlowCase:
    clean = _strip_comments(text)
    m = re.search(r"function\s+mpc\s*=\s*(\w+)", clean)
    if m:
        name = m.group(1)
    blocks: dict[str, np.ndarray] = {}
    base = None
    for am in _ASSIGN.finditer(clean):
        key, start = am.group(1), am.end()
        if key == "baseMVA":
            val = clean[start:].split(";", 1)[0].strip()
            try:
                base = float(val)
            except ValueError as exc:
                raise CaseParseError(f"mpc.baseMVA: not a number: {val!r}") from exc
        elif key in N_COLS:
            if not clean[start:].startswith("["):
                raise CaseParseError(f"mpc.{key}: expected '['")
            end = clean.find("]", start)
            if end < 0:
                raise CaseParseError(f"mpc.{key}: missing closing ']'")
            blocks[key] = _parse_matrix(clean[start + 1:end], key)
    if base is None:
        raise CaseParseError("missing block mpc.baseMVA")
    for key in ("bus", "gen", "branch"):
        if key not in blocks:
            raise CaseParseError(f"missing block mpc.{key}")
    return PowerFlowCase(name, base, blocks["bus"], blocks["gen"], blocks["branch"])


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() and abs(v) < 1e15 else repr(float(v))


def serialize_case(case: PowerFlowCase) -> str:
    out = [f"function mpc = {case.name}", "", "mpc.version = '2';",
           f"mpc.baseMVA = {_fmt(case.base_mva)};", ""]
    for key in ("bus", "gen", "branch"):
        out.append(f"%\t{_HEADERS[key]}")
        out.append(f"mpc.{key} = [")
        for row in getattr(case, key):
            out.append("\t" + "\t".join(_fmt(v) for v in row) + ";")
        out.append("];")
        out.append("")
    return "\n".join(out)


def load_case(path) -> PowerFlowCase:
    p = Path(path)
    if not p.exists():
        raise CaseParseError(f"no such case file: {p}")
    return parse_case(p.read_text(), name=p.stem)


def save_case(case: PowerFlowCase, path) -> None:
    Path(path).write_text(serialize_case(case))


def load_bundled(name: str) -> PowerFlowCase:
    if name not in BUNDLED:
        raise CaseParseError(f"unknown bundled case {name!r}; available: {', '.join(BUNDLED)}")
    text = resources.files(__package__).joinpath("data", f"{name}.m").read_text()
    return parse_case(text, name=name)


def resolve_case(spec: str) -> PowerFlowCase:
    """A bundled case name or a path to a case file."""
    return load_bundled(spec) if spec in BUNDLED else load_case(spec)
