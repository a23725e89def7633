"""Collects one verdict per acceptance criterion for the terminal summary."""

from collections import defaultdict

TITLES = {
    1: "golden examples",
    2: "attack demo",
    3: "NP gadget",
    4: "1-in-3 equivalence",
    5: "soundness",
    6: "completeness",
    7: "step bound and BC0 growth",
    8: "cancellation properties",
    9: "finitariness",
}

_parts: dict[int, list[tuple[str, bool, str]]] = defaultdict(list)


def record(criterion: int, part: str, ok: bool, detail: str = "") -> bool:
    _parts[criterion].append((part, ok, detail))
    line = f"criterion {criterion} [{part}]: {'PASS' if ok else 'FAIL'} {detail}".rstrip()
    print(line)
    return ok


def summary_lines() -> list[str]:
    lines = []
    for n, title in TITLES.items():
        parts = _parts.get(n)
        if not parts:
            continue
        ok = all(p[1] for p in parts)
        details = "; ".join(f"{name}: {'ok' if good else 'FAIL'}{' ' + d if d else ''}" for name, good, d in parts)
        lines.append(f"{'PASS' if ok else 'FAIL'}  criterion {n} ({title}) - {details}")
    return lines
