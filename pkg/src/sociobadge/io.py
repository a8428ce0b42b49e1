"""Delimited-text formats: edgelists, nominations, scenarios, run configs and outputs."""

from __future__ import annotations

import csv
import hashlib
import math
import os
import re
from dataclasses import dataclass, field, fields
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .aggregate import NominationNetwork
from .core import EventLog, InteractionEvent, ObservationWindow, normalize
from .simgen import Group, Scenario

MAX_NOMINATIONS = 20
EDGELIST_HEADER = ("start", "id_a", "id_b", "end")

_INT_RE = re.compile(r"^[+-]?\d+(\.\d*)?$")
_CLOCK_RE = re.compile(r"^(\d{1,2}):(\d{2}):(\d{2})(\.\d+)?$")


class FormatError(ValueError):
    """Malformed input file; the message carries the path and line number."""


def parse_timestamp(text: str, reference_date: Optional[date] = None) -> int:
    """Parse a timestamp to integer seconds, flooring fractions.

    Accepts epoch seconds, ISO-8601 (naive values are UTC) and clock times
    ``HH:MM:SS``. Clock times count from midnight of ``reference_date``
    when one is given, otherwise from midnight of an unspecified day.

    >>> parse_timestamp("18:19:46")
    65986
    >>> parse_timestamp("1970-01-01T00:01:40")
    100
    """
    s = text.strip()
    if _INT_RE.match(s):
        return math.floor(float(s))
    m = _CLOCK_RE.match(s)
    if m:
        h, mi, sec = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if h > 23 or mi > 59 or sec > 59:
            raise ValueError(f"invalid clock time {text!r}")
        offset = h * 3600 + mi * 60 + sec
        if reference_date is not None:
            midnight = datetime(reference_date.year, reference_date.month, reference_date.day, tzinfo=timezone.utc)
            offset += int(midnight.timestamp())
        return offset
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(s)
    except ValueError:
        raise ValueError(f"unrecognized timestamp {text!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return math.floor(dt.timestamp())


@dataclass
class ParseReport:
    """Row-level outcome of reading one input file."""

    path: str
    rows: int = 0
    accepted: int = 0
    rejected: list = field(default_factory=list)
    clipped: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def reject(self, line: int, reason: str) -> None:
        self.rejected.append((line, reason))

    def entries(self) -> list[tuple[str, int, str, str]]:
        out = [(self.path, ln, "rejected", why) for ln, why in self.rejected]
        out += [(self.path, ln, "clipped", why) for ln, why in self.clipped]
        out += [(self.path, ln, "warning", why) for ln, why in self.warnings]
        return sorted(out, key=lambda r: (r[1], r[2]))


def _sniff_delimiter(header: str) -> str:
    return "\t" if "\t" in header else ","


def _read_rows(path: Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    lines = text.splitlines()
    first = next((k for k, ln in enumerate(lines) if ln.strip()), None)
    if first is None:
        raise FormatError(f"{path}: empty file, header row required")
    delim = _sniff_delimiter(lines[first])
    reader = csv.reader(lines[first:], delimiter=delim)
    header = [h.strip() for h in next(reader)]
    rows = []
    for offset, row in enumerate(reader, start=first + 2):
        if row and any(c.strip() for c in row):
            rows.append((offset, [c.strip() for c in row]))
    return header, rows


def _parse_id(text: str, path, line: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise FormatError(f"{path}:{line}: badge id {text!r} is not an integer") from None
    if value < 0:
        raise FormatError(f"{path}:{line}: badge id {value} is negative")
    return value


def parse_edgelist(
    path: Union[str, Path],
    window: Optional[ObservationWindow] = None,
    *,
    roster: Optional[Iterable[int]] = None,
    reference_date: Optional[date] = None,
) -> tuple[EventLog, ParseReport]:
    """Read a ``Start, ID A, ID B, End`` edgelist into a normalized log.

    The delimiter (comma or tab) is taken from the header row. Without a
    ``window`` the span of the data is used; without a ``roster`` the badge
    ids seen in the file are used. Rows with ``end < start``, self-loops,
    or no overlap with the window are rejected and listed in the report;
    rows sticking out of the window are clipped and listed as well.

    Raises
    ------
    FormatError
        On a missing header, a malformed timestamp or id, or (when a roster
        is given) an id not on it.
    """
    path = Path(path)
    header, rows = _read_rows(path)
    if len(header) < 4:
        raise FormatError(f"{path}:1: header needs 4 columns (start, id a, id b, end), got {header}")
    try:
        parse_timestamp(header[0])
    except ValueError:
        pass
    else:
        raise FormatError(f"{path}:1: header row required, found data {header}")

    known = None if roster is None else set(int(i) for i in roster)
    report = ParseReport(str(path))
    parsed = []
    for line, row in rows:
        report.rows += 1
        if len(row) < 4:
            raise FormatError(f"{path}:{line}: expected 4 columns, got {len(row)}")
        try:
            start = parse_timestamp(row[0], reference_date)
            end = parse_timestamp(row[3], reference_date)
        except ValueError as exc:
            raise FormatError(f"{path}:{line}: {exc}") from None
        a, b = _parse_id(row[1], path, line), _parse_id(row[2], path, line)
        if known is not None:
            for badge in (a, b):
                if badge not in known:
                    raise FormatError(f"{path}:{line}: badge {badge} not in roster")
        if a == b:
            report.reject(line, f"self-loop on badge {a}")
            continue
        if end < start:
            report.reject(line, f"end {row[3]} before start {row[0]}")
            continue
        parsed.append((line, a, b, start, end))

    if window is None:
        if parsed:
            lo = min(p[3] for p in parsed)
            hi = max(p[4] for p in parsed)
            window = ObservationWindow(lo, hi if hi > lo else lo + 1)
        else:
            window = ObservationWindow(0, 1)
    events = []
    for line, a, b, start, end in parsed:
        if start >= window.t_end or end <= window.t0:
            if not (start == end and window.t0 <= start <= window.t_end):
                report.reject(line, "outside observation window")
                continue
        if start < window.t0 or end > window.t_end:
            report.clipped.append((line, "clipped to observation window"))
        events.append(InteractionEvent.make(a, b, max(start, window.t0), min(max(end, window.t0), window.t_end)))
        report.accepted += 1
    ids = known if known is not None else {i for _, a, b, _, _ in parsed for i in (a, b)}
    return normalize(events, ids, window), report


def write_edgelist(log: EventLog, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EDGELIST_HEADER)
        for ev in log.events:
            writer.writerow((ev.start, ev.dyad.a, ev.dyad.b, ev.end))


def parse_nominations(
    path: Union[str, Path],
    roster: Iterable[int],
    respondents: Optional[Iterable[int]] = None,
) -> tuple[NominationNetwork, ParseReport]:
    """Read ``ego, alter`` rows into a nomination network.

    A row with an empty alter records a respondent who named nobody. When
    ``respondents`` is omitted, every ego in the file counts as one. Self
    nominations and ids outside the roster are rejected rows. Egos naming
    more than 20 alters get a warning.
    """
    path = Path(path)
    roster = tuple(sorted(int(i) for i in roster))
    members = set(roster)
    header, rows = _read_rows(path)
    if _INT_RE.match(header[0]):
        raise FormatError(f"{path}:1: header row required, found data {header}")
    report = ParseReport(str(path))
    egos: set[int] = set()
    pairs: set[tuple[int, int]] = set()
    for line, row in rows:
        report.rows += 1
        ego = _parse_id(row[0], path, line)
        if ego not in members:
            report.reject(line, f"ego {ego} not in roster")
            continue
        egos.add(ego)
        if len(row) < 2 or not row[1]:
            report.accepted += 1
            continue
        alter = _parse_id(row[1], path, line)
        if alter == ego:
            report.reject(line, f"self-nomination by {ego}")
            continue
        if alter not in members:
            report.reject(line, f"alter {alter} not in roster")
            continue
        pairs.add((ego, alter))
        report.accepted += 1
    resp = set(egos) if respondents is None else set(int(r) for r in respondents)
    for r in sorted(resp - members):
        raise FormatError(f"{path}: respondent {r} not in roster")
    for ego, alter in sorted(pairs):
        if ego not in resp:
            report.warnings.append((0, f"nominations by non-respondent {ego} ignored"))
    pairs = {p for p in pairs if p[0] in resp}
    net = NominationNetwork.from_pairs(roster, sorted(pairs), resp)
    for ego, count in sorted(net.out_degree().items()):
        if count > MAX_NOMINATIONS:
            report.warnings.append((0, f"ego {ego} named {count} alters (> {MAX_NOMINATIONS})"))
    return net, report


def write_nominations(net: NominationNetwork, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("ego", "alter"))
        for k, ego in enumerate(net.roster):
            if ego not in net.respondents:
                continue
            alters = [net.roster[j] for j in range(len(net.roster)) if net.ties[k, j]]
            if not alters:
                writer.writerow((ego, ""))
            for alter in alters:
                writer.writerow((ego, alter))


def parse_scenario(path: Union[str, Path], n: int, window: ObservationWindow) -> Scenario:
    """Read ``start, end, members`` rows; members are space-separated ids."""
    path = Path(path)
    _, rows = _read_rows(path)
    groups = []
    for line, row in rows:
        if len(row) < 3:
            raise FormatError(f"{path}:{line}: expected start, end, members")
        try:
            start, end = parse_timestamp(row[0]), parse_timestamp(row[1])
            members = frozenset(int(m) for m in row[2].split())
            groups.append(Group(members, start, end))
        except ValueError as exc:
            raise FormatError(f"{path}:{line}: {exc}") from None
    scenario = Scenario(n, window, tuple(groups))
    try:
        scenario.validate()
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return scenario


def write_scenario(scenario: Scenario, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("start", "end", "members"))
        for g in scenario.groups:
            writer.writerow((g.start, g.end, " ".join(str(m) for m in sorted(g.members))))


# ---------------------------------------------------------------- run config

def read_config(path: Union[str, Path]) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise FormatError(f"{path}:{lineno}: expected key = value")
            out[key.strip()] = value.strip()
    return out


def parse_grid(text: str) -> list[int]:
    """``"5:120:5"`` (inclusive start:stop:step) or a comma list ``"1,2,4"``."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError(f"grid {text!r} must be start:stop:step with step > 0")
        start, stop, step = parts
        return list(range(start, stop + 1, step))
    return [int(p) for p in text.split(",") if p.strip()]


@dataclass
class RunConfig:
    rfid: str = ""
    truth: str = ""
    nominations: str = ""
    respondents: str = ""
    roster: str = ""
    scenario: str = ""
    rater_a: str = ""
    rater_b: str = ""
    ratings: str = ""
    window_start: str = ""
    window_end: str = ""
    date: str = ""
    pipeline: str = ""
    base_pipeline: str = ""
    sweep_kinds: str = "min_duration,interpolate,triadic_closure"
    sweep_min_duration: str = "5:120:5"
    sweep_interpolate: str = "5:340:5"
    sweep_triadic_closure: str = "1:4:1"
    datasets: str = "none;min_duration:20;interpolate:75;triadic_closure:1"
    reference_dataset: str = "interpolate:75"
    symmetrization: str = "none"
    seed: int = 0
    n: int = 11
    duration: int = 4602
    min_dyad_gap: int = 400
    gap_mean: float = 20.0
    gap_max: int = 75
    dropout_rate: float = 1.0
    quantum: int = 10
    nomination_intercept: float = -2.2
    nomination_slope: float = 0.02
    respond_prob: float = 1.0
    permissive: bool = False
    out_dir: str = "out"

    @classmethod
    def from_mapping(cls, values: Mapping[str, str], base_dir: Union[str, Path, None] = None) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            typ = known[key].type
            try:
                if typ == "int":
                    kwargs[key] = int(raw)
                elif typ == "float":
                    kwargs[key] = float(raw)
                elif typ == "bool":
                    kwargs[key] = str(raw).strip().lower() in ("1", "true", "yes", "on")
                else:
                    kwargs[key] = str(raw)
            except ValueError:
                raise ValueError(f"config key {key!r}: cannot parse {raw!r} as {typ}") from None
        cfg = cls(**kwargs)
        cfg._base_dir = Path(base_dir) if base_dir is not None else Path(".")
        return cfg

    def path(self, key: str) -> Optional[Path]:
        """Config path resolved against the config file's directory."""
        value = getattr(self, key)
        if not value:
            return None
        p = Path(value)
        base = getattr(self, "_base_dir", Path("."))
        return p if p.is_absolute() else base / p

    def roster_ids(self) -> Optional[list[int]]:
        return parse_grid(self.roster) if self.roster else None

    def reference_date(self) -> Optional[date]:
        return date.fromisoformat(self.date) if self.date else None

    def window(self) -> Optional[ObservationWindow]:
        if not self.window_start and not self.window_end:
            return None
        if not (self.window_start and self.window_end):
            raise ValueError("window_start and window_end must be given together")
        ref = self.reference_date()
        return ObservationWindow(parse_timestamp(self.window_start, ref), parse_timestamp(self.window_end, ref))

    def to_text(self) -> str:
        """Resolved settings, one ``key = value`` per line.

        ``out_dir`` is left out so the same inputs give the same bytes
        wherever the run is written.
        """
        lines = []
        for f in fields(self):
            if f.name == "out_dir":
                continue
            value = getattr(self, f.name)
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- outputs

@dataclass
class Table:
    columns: Sequence[str]
    rows: Sequence[Sequence[object]]
    float_format: str = "{:.4f}"


def format_value(value: object, float_format: str = "{:.4f}") -> str:
    if value is None:
        return "NA"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "NA"
        if math.isinf(value):
            return "Inf" if value > 0 else "-Inf"
        return float_format.format(value)
    return str(value)


def render_table(table: Table) -> str:
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(format_value(v, table.float_format) for v in row))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Manifest:
    entries: tuple[tuple[str, str, int], ...]

    def render(self) -> str:
        lines = ["file,sha256,bytes"] + [f"{n},{h},{b}" for n, h, b in self.entries]
        return "\n".join(lines) + "\n"

    @property
    def files(self) -> list[str]:
        return [e[0] for e in self.entries]


def ensure_writable(out_dir: Union[str, Path]) -> Path:
    """Create ``out_dir`` if needed and check it accepts files."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc
    return out


def emit_outputs(results: Mapping[str, Union[Table, str]], out_dir: Union[str, Path]) -> Manifest:
    """Write each artifact and a ``manifest.csv`` of content hashes.

    Values are :class:`Table` objects (written as CSV) or ready text.
    Artifacts are listed in name order so reruns give identical manifests.
    """
    out = ensure_writable(out_dir)
    entries = []
    for name in sorted(results):
        item = results[name]
        text = render_table(item) if isinstance(item, Table) else item
        data = text.encode("utf-8")
        (out / name).write_bytes(data)
        entries.append((name, hashlib.sha256(data).hexdigest(), len(data)))
    manifest = Manifest(tuple(entries))
    (out / "manifest.csv").write_text(manifest.render(), encoding="utf-8")
    return manifest


def out_dir_override(default: str) -> str:
    return os.environ.get("SOCIOBADGE_OUT_DIR", default)
