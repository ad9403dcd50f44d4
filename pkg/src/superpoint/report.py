"""Verification reports: aligned text and JSON with a fixed key order."""

import json
from dataclasses import dataclass, field
from importlib import resources


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self):
        return {"name": self.name, "pass": bool(self.passed), "detail": self.detail}


@dataclass
class Report:
    name: str
    n: int
    omega: object = None
    seed: int = None
    samples: int = None
    layers: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def add(self, check):
        self.checks.append(check)
        return check

    def extend(self, other):
        self.checks.extend(other.checks)
        for k, v in other.extra.items():
            self.extra.setdefault(k, v)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_json(self):
        out = {
            "report": self.name,
            "n": self.n,
            "omega": _omega_json(self.omega),
            "seed": self.seed,
            "samples": self.samples,
            "layers": sorted(self.layers, key=lambda r: r["k"]),
            "checks": [c.to_json() for c in self.checks],
            "pass": self.passed,
        }
        if self.extra:
            out["extra"] = self.extra
        return out

    def to_text(self):
        lines = [f"report {self.name}  n={self.n}  omega={_omega_label(self.omega)}"]
        if self.seed is not None:
            lines.append(f"seed {self.seed}")
        if self.samples is not None:
            lines.append(f"samples {self.samples}")
        if self.layers:
            lines.append(format_table(self.layers))
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name.ljust(width)}  {c.detail}")
        lines.append(f"result {'PASS' if self.passed else 'FAIL'} ({len(self.checks) - len(self.failures())}/{len(self.checks)})")
        return "\n".join(lines)


def _omega_json(omega):
    if omega is None:
        return None
    return omega.to_json()


def _omega_label(omega):
    if omega is None:
        return "-"
    return omega.label()


def format_table(rows):
    """Aligned table of dimension rows with a totals line."""
    header = ["k", "dimW"] + [h for h in ("dimH", "dimDH") if all(h in r for r in rows)]
    body = [[str(r[h]) for h in header] for r in sorted(rows, key=lambda r: r["k"])]
    body.append(["total"] + [str(sum(r[h] for r in rows)) for h in header[1:]])
    widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(b, widths)) for b in body]
    return "\n".join(lines)


def dumps(data):
    return json.dumps(data, indent=2, ensure_ascii=False)


def report_schema():
    text = resources.files("superpoint").joinpath("report_schema.json").read_text(encoding="utf-8")
    return json.loads(text)
