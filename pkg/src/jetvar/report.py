"""Structured verification reports with text and flat key-value renderings."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Entry:
    location: str
    assertion: str
    residual: str
    verdict: str  # PASS, FAIL or INFO


@dataclass
class Report:
    title: str
    entries: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def check(self, location: str, assertion: str, residual, ok: bool) -> bool:
        self.entries.append(Entry(location, assertion, _text(residual), "PASS" if ok else "FAIL"))
        return ok

    def note(self, location: str, assertion: str, value) -> None:
        self.entries.append(Entry(location, assertion, _text(value), "INFO"))

    def set(self, key: str, value) -> None:
        self.info[key] = _text(value)

    def extend(self, other: "Report", prefix: str = "") -> None:
        for e in other.entries:
            self.entries.append(Entry(prefix + e.location, e.assertion, e.residual, e.verdict))
        for k, v in other.info.items():
            self.info[prefix + k] = v

    @property
    def passed(self) -> bool:
        return all(e.verdict != "FAIL" for e in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if e.verdict == "FAIL"]

    def find(self, location: str, assertion: str) -> Entry:
        for e in self.entries:
            if e.location == location and e.assertion == assertion:
                return e
        raise KeyError((location, assertion))

    def to_text(self) -> str:
        lines = [f"== {self.title} =="]
        for k, v in self.info.items():
            lines.append(f"{k}: {v}")
        for e in self.entries:
            lines.append(f"[{e.verdict}] {e.location} :: {e.assertion} :: {e.residual}")
        lines.append(f"verdict: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_kv(self) -> str:
        lines = [f"title = {self.title}"]
        for k, v in self.info.items():
            lines.append(f"info.{k} = {v}")
        for i, e in enumerate(self.entries):
            stem = f"entry.{i:03d}"
            lines.append(f"{stem}.location = {e.location}")
            lines.append(f"{stem}.assertion = {e.assertion}")
            lines.append(f"{stem}.residual = {e.residual}")
            lines.append(f"{stem}.verdict = {e.verdict}")
        lines.append(f"verdict = {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _text(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return repr(value)
    return " ".join(str(value).split())
