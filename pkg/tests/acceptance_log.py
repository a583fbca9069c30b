"""Collects one pass/fail line per acceptance criterion for the terminal summary."""

_LINES: list[str] = []


def record(name: str, ok: bool | None, detail: str) -> None:
    status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    line = f"[{status}] {name}: {detail}"
    _LINES.append(line)
    print(line)


def lines() -> list[str]:
    return list(_LINES)
