"""Plain-text `key = value` configuration files.

One pair per line, `#` starts a comment, values percent-encoded when they
contain spaces (same encoding rules as the event log).  Used for the
service config and for simulator scenario/profile descriptions.
"""

from __future__ import annotations

import urllib.parse


def parse_kv_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = urllib.parse.unquote(value.strip())
    return out


def load_kv_file(path) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_kv_text(fh.read())
