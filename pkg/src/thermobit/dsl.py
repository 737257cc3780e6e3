"""Parser and canonical formatter for the `.tbit` protocol format.

The format is line-oriented. `#` starts a comment that runs to the end of
the line; blank lines are ignored. A block begins with an unindented
header line and contains indented `key value...` lines:

    system <name>
        states <label>+
        temperature <x>
        boltzmann <x>          # optional, default 1
        energy <label> <x>     # one per state, default 0

    dist <name>
        over <system>
        probs <x>+

    channel <name>
        over <system>
        from <label>: <label> <x> [<label> <x>]...   # unlisted targets are 0

    protocol <name>
        apply <channel>
        evolve <steps>
        check-correspondence
        audit <steps>
        bitop <name>
        report table|json|csv

Numbers are decimal with an optional exponent. Names must be unique
within their kind, every reference must resolve, and dimensions must be
consistent; probability vectors and channel rows obey the core modules'
1e-9 normalization tolerance. The parser recovers at block granularity
and reports every diagnostic in one pass; it never raises on malformed
input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError
from .info import SUM_TOLERANCE, Distribution
from .markov import Channel
from .thermo import EnergyLandscape

_BLOCK_KEYWORDS = ("system", "dist", "channel", "protocol")
_NUMBER_RE = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")
_COUNT_RE = re.compile(r"^\d+$")
_TOKEN_RE = re.compile(r"\S+")

BITOP_NAMES = ("erase", "copy-szilard", "copy-landauer", "not", "switch", "randomize")
REPORT_FORMATS = ("table", "json", "csv")
SUGGESTED_EXTENSION = ".tbit"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    line: int  # 1-based
    column: int  # 1-based
    message: str
    excerpt: str

    def render(self) -> str:
        return f"{self.severity}: line {self.line}, col {self.column}: {self.message}"


@dataclass(frozen=True)
class SystemDecl:
    name: str
    states: tuple[str, ...]
    temperature: float
    boltzmann: float
    energies: tuple[float, ...]

    def to_landscape(self) -> EnergyLandscape:
        return EnergyLandscape(
            np.array(self.energies),
            temperature=self.temperature,
            boltzmann=self.boltzmann,
            labels=self.states,
        )


@dataclass(frozen=True)
class DistDecl:
    name: str
    system: str
    dist: Distribution


@dataclass(frozen=True)
class ChannelDecl:
    name: str
    system: str
    channel: Channel


@dataclass(frozen=True)
class Directive:
    op: str
    arg: str | int | None = None


@dataclass(frozen=True)
class ProtocolDecl:
    name: str
    directives: tuple[Directive, ...]


@dataclass(frozen=True)
class ProtocolSpec:
    """A validated document: systems, distributions, channels, protocols."""

    systems: dict[str, SystemDecl] = field(default_factory=dict)
    dists: dict[str, DistDecl] = field(default_factory=dict)
    channels: dict[str, ChannelDecl] = field(default_factory=dict)
    protocols: dict[str, ProtocolDecl] = field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        return not (self.systems or self.dists or self.channels or self.protocols)


@dataclass(frozen=True)
class ParseResult:
    document: ProtocolSpec | None
    diagnostics: tuple[ParseDiagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.document is not None

    def errors(self) -> list[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]


class _Token:
    __slots__ = ("text", "line", "column")

    def __init__(self, text: str, line: int, column: int):
        self.text = text
        self.line = line
        self.column = column


@dataclass
class _RawBlock:
    kind: str
    name: str
    line: int
    column: int
    items: list[list[_Token]] = field(default_factory=list)


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.diagnostics: list[ParseDiagnostic] = []

    def error(self, token: _Token | None, message: str, line: int = 0, column: int = 1):
        if token is not None:
            line, column, excerpt = token.line, token.column, token.text
        else:
            excerpt = ""
        self.diagnostics.append(
            ParseDiagnostic("error", max(line, 1), max(column, 1), message, excerpt)
        )

    def warning(self, token: _Token, message: str):
        self.diagnostics.append(
            ParseDiagnostic("warning", token.line, token.column, message, token.text)
        )

    # -- stage 1: group lines into raw blocks ------------------------------

    def collect_blocks(self) -> list[_RawBlock]:
        blocks: list[_RawBlock] = []
        current: _RawBlock | None = None
        skipping = False  # after a bad header, ignore lines until the next header
        for line_no, raw in enumerate(self.source.splitlines(), start=1):
            code = raw.split("#", 1)[0]
            tokens = [
                _Token(m.group(0), line_no, m.start() + 1)
                for m in _TOKEN_RE.finditer(code)
            ]
            if not tokens:
                continue
            indented = tokens[0].column > 1
            if not indented:
                head = tokens[0]
                if head.text not in _BLOCK_KEYWORDS:
                    self.error(
                        head,
                        f"unknown block keyword {head.text!r}; expected one of "
                        + ", ".join(_BLOCK_KEYWORDS),
                    )
                    current = None
                    skipping = True
                    continue
                if len(tokens) < 2:
                    self.error(head, f"{head.text!r} block needs a name")
                    current = None
                    skipping = True
                    continue
                name = tokens[1]
                if ":" in name.text:
                    self.error(name, f"invalid block name {name.text!r}")
                    current = None
                    skipping = True
                    continue
                if len(tokens) > 2:
                    self.error(tokens[2], "unexpected text after block name")
                current = _RawBlock(head.text, name.text, head.line, head.column)
                blocks.append(current)
                skipping = False
            else:
                if current is None:
                    if not skipping:
                        self.error(tokens[0], "indented line outside any block")
                    continue
                current.items.append(tokens)
        return blocks

    # -- token helpers ------------------------------------------------------

    def parse_number(self, token: _Token, what: str) -> float | None:
        if not _NUMBER_RE.match(token.text):
            self.error(token, f"{what} must be a number, got {token.text!r}")
            return None
        return float(token.text)

    def parse_count(self, token: _Token, what: str) -> int | None:
        if not _COUNT_RE.match(token.text):
            self.error(token, f"{what} must be a non-negative integer, got {token.text!r}")
            return None
        return int(token.text)

    def check_label(self, token: _Token) -> bool:
        if ":" in token.text:
            self.error(token, f"invalid label {token.text!r}")
            return False
        return True

    # -- stage 2: per-block builders ----------------------------------------

    def build_system(self, block: _RawBlock) -> SystemDecl | None:
        states: list[str] | None = None
        temperature: float | None = None
        boltzmann: float | None = None
        energy_items: list[tuple[_Token, _Token]] = []
        ok = True
        for tokens in block.items:
            key = tokens[0]
            args = tokens[1:]
            if key.text == "states":
                if states is not None:
                    self.error(key, "duplicate 'states' line")
                    ok = False
                    continue
                if not args:
                    self.error(key, "'states' needs at least one label")
                    ok = False
                    continue
                labels = []
                for tok in args:
                    if not self.check_label(tok):
                        ok = False
                    elif tok.text in labels:
                        self.error(tok, f"duplicate state label {tok.text!r}")
                        ok = False
                    else:
                        labels.append(tok.text)
                states = labels
            elif key.text in ("temperature", "boltzmann"):
                if len(args) != 1:
                    self.error(key, f"'{key.text}' takes exactly one number")
                    ok = False
                    continue
                value = self.parse_number(args[0], key.text)
                if value is None:
                    ok = False
                    continue
                if value <= 0.0:
                    self.error(args[0], f"{key.text} must be positive")
                    ok = False
                    continue
                if key.text == "temperature":
                    if temperature is not None:
                        self.error(key, "duplicate 'temperature' line")
                        ok = False
                    temperature = value
                else:
                    if boltzmann is not None:
                        self.error(key, "duplicate 'boltzmann' line")
                        ok = False
                    boltzmann = value
            elif key.text == "energy":
                if len(args) != 2:
                    self.error(key, "'energy' takes a state label and a value")
                    ok = False
                    continue
                if self.parse_number(args[1], "energy value") is None:
                    ok = False
                    continue
                energy_items.append((args[0], args[1]))
            else:
                self.error(key, f"unknown system key {key.text!r}")
                ok = False
        if states is None:
            self.error(None, f"system {block.name!r} is missing a 'states' line",
                       block.line, block.column)
            ok = False
        if temperature is None:
            self.error(None, f"system {block.name!r} is missing a 'temperature' line",
                       block.line, block.column)
            ok = False
        if not ok:
            return None
        energies = {label: 0.0 for label in states}
        seen: set[str] = set()
        for label_tok, value_tok in energy_items:
            if label_tok.text not in energies:
                self.error(label_tok, f"energy for unknown state {label_tok.text!r}")
                ok = False
            elif label_tok.text in seen:
                self.error(label_tok, f"duplicate energy for state {label_tok.text!r}")
                ok = False
            else:
                seen.add(label_tok.text)
                energies[label_tok.text] = float(value_tok.text)
        if not ok:
            return None
        return SystemDecl(
            name=block.name,
            states=tuple(states),
            temperature=temperature,
            boltzmann=1.0 if boltzmann is None else boltzmann,
            energies=tuple(energies[label] for label in states),
        )

    def build_dist(
        self, block: _RawBlock, systems: dict[str, SystemDecl]
    ) -> DistDecl | None:
        over: _Token | None = None
        probs_key: _Token | None = None
        probs: list[float] | None = None
        ok = True
        for tokens in block.items:
            key = tokens[0]
            args = tokens[1:]
            if key.text == "over":
                if over is not None:
                    self.error(key, "duplicate 'over' line")
                    ok = False
                    continue
                if len(args) != 1:
                    self.error(key, "'over' takes exactly one system name")
                    ok = False
                    continue
                over = args[0]
            elif key.text == "probs":
                if probs is not None:
                    self.error(key, "duplicate 'probs' line")
                    ok = False
                    continue
                if not args:
                    self.error(key, "'probs' needs at least one value")
                    ok = False
                    continue
                values = [self.parse_number(tok, "probability") for tok in args]
                if any(v is None for v in values):
                    ok = False
                    continue
                probs_key = key
                probs = values
            else:
                self.error(key, f"unknown dist key {key.text!r}")
                ok = False
        if over is None:
            self.error(None, f"dist {block.name!r} is missing an 'over' line",
                       block.line, block.column)
            ok = False
        if probs is None:
            self.error(None, f"dist {block.name!r} is missing a 'probs' line",
                       block.line, block.column)
            ok = False
        if not ok:
            return None
        if any(v < 0.0 for v in probs):
            self.error(probs_key, "probabilities must be non-negative")
            ok = False
        else:
            total = float(np.sum(probs))
            if abs(total - 1.0) > SUM_TOLERANCE:
                self.error(probs_key, f"probabilities sum to {total:g}")
                ok = False
        system = systems.get(over.text)
        if system is None:
            self.error(over, f"dist {block.name!r} refers to unknown system {over.text!r}")
            return None
        if len(probs) != len(system.states):
            self.error(
                probs_key,
                f"dist {block.name!r} has {len(probs)} probabilities but system "
                f"{system.name!r} has {len(system.states)} states",
            )
            return None
        if not ok:
            return None
        try:
            dist = Distribution(np.array(probs), labels=system.states)
        except (DomainError, ShapeError) as exc:
            self.error(probs_key, str(exc))
            return None
        return DistDecl(name=block.name, system=system.name, dist=dist)

    def build_channel(
        self, block: _RawBlock, systems: dict[str, SystemDecl]
    ) -> ChannelDecl | None:
        over: _Token | None = None
        rows: list[tuple[_Token, list[tuple[_Token, float]]]] = []
        ok = True
        for tokens in block.items:
            key = tokens[0]
            args = tokens[1:]
            if key.text == "over":
                if over is not None:
                    self.error(key, "duplicate 'over' line")
                    ok = False
                    continue
                if len(args) != 1:
                    self.error(key, "'over' takes exactly one system name")
                    ok = False
                    continue
                over = args[0]
            elif key.text == "from":
                if not args or not args[0].text.endswith(":"):
                    self.error(key, "'from' needs a source label followed by ':'")
                    ok = False
                    continue
                source = _Token(args[0].text[:-1], args[0].line, args[0].column)
                if not source.text:
                    self.error(args[0], "'from' needs a source label before ':'")
                    ok = False
                    continue
                pairs = args[1:]
                if not pairs or len(pairs) % 2 != 0:
                    self.error(key, "'from' row needs (target, value) pairs")
                    ok = False
                    continue
                row: list[tuple[_Token, float]] = []
                row_ok = True
                for target, value_tok in zip(pairs[0::2], pairs[1::2]):
                    value = self.parse_number(value_tok, "transition probability")
                    if value is None or not self.check_label(target):
                        row_ok = False
                        continue
                    if value < 0.0:
                        self.error(value_tok, "transition probability must be non-negative")
                        row_ok = False
                        continue
                    row.append((target, value))
                if not row_ok:
                    ok = False
                    continue
                rows.append((source, row))
            else:
                self.error(key, f"unknown channel key {key.text!r}")
                ok = False
        if over is None:
            self.error(None, f"channel {block.name!r} is missing an 'over' line",
                       block.line, block.column)
            ok = False
        if not ok:
            return None
        system = systems.get(over.text)
        if system is None:
            self.error(over, f"channel {block.name!r} refers to unknown system {over.text!r}")
            return None
        index = {label: i for i, label in enumerate(system.states)}
        n = len(system.states)
        matrix = np.zeros((n, n))
        seen_rows: set[str] = set()
        for source, row in rows:
            if source.text not in index:
                self.error(source, f"'from' row for unknown state {source.text!r}")
                ok = False
                continue
            if source.text in seen_rows:
                self.error(source, f"duplicate 'from' row for state {source.text!r}")
                ok = False
                continue
            seen_rows.add(source.text)
            seen_targets: set[str] = set()
            for target, value in row:
                if target.text not in index:
                    self.error(target, f"transition to unknown state {target.text!r}")
                    ok = False
                    continue
                if target.text in seen_targets:
                    self.error(target, f"duplicate target {target.text!r} in row")
                    ok = False
                    continue
                seen_targets.add(target.text)
                matrix[index[source.text], index[target.text]] = value
            row_sum = float(matrix[index[source.text]].sum())
            if abs(row_sum - 1.0) > SUM_TOLERANCE:
                self.error(source, f"row for state {source.text!r} sums to {row_sum:g}")
                ok = False
        for label in system.states:
            if label not in seen_rows:
                self.error(
                    None,
                    f"channel {block.name!r} is missing a 'from' row for state {label!r}",
                    block.line, block.column,
                )
                ok = False
        if not ok:
            return None
        try:
            channel = Channel(matrix, labels=system.states)
        except (DomainError, ShapeError) as exc:
            self.error(None, str(exc), block.line, block.column)
            return None
        return ChannelDecl(name=block.name, system=system.name, channel=channel)

    def build_protocol(
        self, block: _RawBlock, channels: dict[str, ChannelDecl]
    ) -> ProtocolDecl | None:
        directives: list[Directive] = []
        ok = True
        for tokens in block.items:
            key = tokens[0]
            args = tokens[1:]
            if key.text == "apply":
                if len(args) != 1:
                    self.error(key, "'apply' takes exactly one channel name")
                    ok = False
                    continue
                if args[0].text not in channels:
                    self.error(args[0], f"'apply' refers to unknown channel {args[0].text!r}")
                    ok = False
                    continue
                directives.append(Directive("apply", args[0].text))
            elif key.text in ("evolve", "audit"):
                if len(args) != 1:
                    self.error(key, f"'{key.text}' takes exactly one step count")
                    ok = False
                    continue
                count = self.parse_count(args[0], f"'{key.text}' step count")
                if count is None:
                    ok = False
                    continue
                if key.text == "audit" and count < 1:
                    self.error(args[0], "'audit' needs at least one step")
                    ok = False
                    continue
                directives.append(Directive(key.text, count))
            elif key.text == "check-correspondence":
                if args:
                    self.error(args[0], "'check-correspondence' takes no arguments")
                    ok = False
                    continue
                directives.append(Directive("check-correspondence"))
            elif key.text == "bitop":
                if len(args) != 1 or args[0].text not in BITOP_NAMES:
                    self.error(
                        args[0] if args else key,
                        "'bitop' takes one of: " + ", ".join(BITOP_NAMES),
                    )
                    ok = False
                    continue
                directives.append(Directive("bitop", args[0].text))
            elif key.text == "report":
                if len(args) != 1 or args[0].text not in REPORT_FORMATS:
                    self.error(
                        args[0] if args else key,
                        "'report' takes one of: " + ", ".join(REPORT_FORMATS),
                    )
                    ok = False
                    continue
                directives.append(Directive("report", args[0].text))
            else:
                self.error(key, f"unknown protocol directive {key.text!r}")
                ok = False
        if not ok:
            return None
        return ProtocolDecl(name=block.name, directives=tuple(directives))

    # -- stage 3: document assembly ------------------------------------------

    def build_document(self, blocks: list[_RawBlock]) -> ProtocolSpec | None:
        seen: dict[tuple[str, str], _RawBlock] = {}
        deduped: list[_RawBlock] = []
        for block in blocks:
            key = (block.kind, block.name)
            if key in seen:
                self.error(
                    None,
                    f"duplicate {block.kind} name {block.name!r} "
                    f"(first declared on line {seen[key].line})",
                    block.line, block.column,
                )
                continue
            seen[key] = block
            deduped.append(block)

        systems: dict[str, SystemDecl] = {}
        for block in deduped:
            if block.kind == "system":
                decl = self.build_system(block)
                if decl is not None:
                    systems[decl.name] = decl
        dists: dict[str, DistDecl] = {}
        channels: dict[str, ChannelDecl] = {}
        for block in deduped:
            if block.kind == "dist":
                decl = self.build_dist(block, systems)
                if decl is not None:
                    dists[decl.name] = decl
            elif block.kind == "channel":
                decl = self.build_channel(block, systems)
                if decl is not None:
                    channels[decl.name] = decl
        protocols: dict[str, ProtocolDecl] = {}
        for block in deduped:
            if block.kind == "protocol":
                decl = self.build_protocol(block, channels)
                if decl is not None:
                    protocols[decl.name] = decl

        if any(d.severity == "error" for d in self.diagnostics):
            return None
        return ProtocolSpec(systems=systems, dists=dists, channels=channels,
                            protocols=protocols)


def parse(source: str) -> ParseResult:
    """Parse DSL text into a validated document.

    Never raises on bad input: all problems come back as diagnostics with
    1-based line/column positions, and the document is None whenever any
    error-severity diagnostic was produced.
    """
    parser = _Parser(source)
    blocks = parser.collect_blocks()
    document = parser.build_document(blocks)
    return ParseResult(document=document, diagnostics=tuple(parser.diagnostics))


def _fmt(value: float) -> str:
    return repr(float(value))


def format_document(doc: ProtocolSpec) -> str:
    """Canonical pretty-print; parse(format_document(doc)) reproduces doc."""
    chunks: list[str] = []
    for system in doc.systems.values():
        lines = [f"system {system.name}"]
        lines.append("  states " + " ".join(system.states))
        lines.append(f"  temperature {_fmt(system.temperature)}")
        lines.append(f"  boltzmann {_fmt(system.boltzmann)}")
        for label, energy in zip(system.states, system.energies):
            lines.append(f"  energy {label} {_fmt(energy)}")
        chunks.append("\n".join(lines))
    for dist in doc.dists.values():
        lines = [f"dist {dist.name}"]
        lines.append(f"  over {dist.system}")
        lines.append("  probs " + " ".join(_fmt(x) for x in dist.dist.probs))
        chunks.append("\n".join(lines))
    for decl in doc.channels.values():
        lines = [f"channel {decl.name}"]
        lines.append(f"  over {decl.system}")
        labels = decl.channel.labels
        for i, source in enumerate(labels):
            row = decl.channel.matrix[i]
            cells = " ".join(
                f"{labels[j]} {_fmt(row[j])}" for j in range(len(labels)) if row[j] != 0.0
            )
            lines.append(f"  from {source}: {cells}")
        chunks.append("\n".join(lines))
    for protocol in doc.protocols.values():
        lines = [f"protocol {protocol.name}"]
        for directive in protocol.directives:
            if directive.arg is None:
                lines.append(f"  {directive.op}")
            else:
                lines.append(f"  {directive.op} {directive.arg}")
        chunks.append("\n".join(lines))
    if not chunks:
        return ""
    return "\n\n".join(chunks) + "\n"
