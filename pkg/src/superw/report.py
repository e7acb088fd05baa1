"""Verification reports: ordered pass/fail check lists with JSON output."""

from __future__ import annotations

import json
import time

VERSION = "0.1.0"


class Check:
    __slots__ = ("id", "status", "detail", "pole_tables")

    def __init__(self, id, status, detail="", pole_tables=None):
        self.id = id
        self.status = status  # pass / fail / skipped
        self.detail = detail
        self.pole_tables = pole_tables

    def as_dict(self):
        d = {"id": self.id, "status": self.status}
        if self.detail:
            d["detail"] = self.detail
        if self.pole_tables is not None:
            d["pole_tables"] = self.pole_tables
        return d


class Report:
    def __init__(self, suite, context=""):
        self.suite = suite
        self.context = context
        self.checks = []
        self._t0 = time.monotonic()

    def add(self, id, ok, detail="", pole_tables=None):
        self.checks.append(Check(id, "pass" if ok else "fail", detail, pole_tables))
        return ok

    def skip(self, id, detail=""):
        self.checks.append(Check(id, "skipped", detail))

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def failures(self):
        return [c for c in self.checks if c.status == "fail"]

    def as_dict(self):
        return {
            "suite": self.suite,
            "context": self.context,
            "checks": [c.as_dict() for c in self.checks],
            "wall_time": round(time.monotonic() - self._t0, 3),
            "version": VERSION,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def __str__(self):
        lines = [f"suite {self.suite} ({self.context})" if self.context else f"suite {self.suite}"]
        for c in self.checks:
            line = f"  [{c.status:>4}] {c.id}"
            if c.detail and c.status == "fail":
                line += f": {c.detail}"
            lines.append(line)
        n_fail = len(self.failures())
        lines.append(f"  {len(self.checks)} checks, {n_fail} failed")
        return "\n".join(lines)


def poles_str(poles: dict) -> str:
    if not poles:
        return "regular"
    return "; ".join(f"({p}) {poles[p]}" for p in sorted(poles, reverse=True))
