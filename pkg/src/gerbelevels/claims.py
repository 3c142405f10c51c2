"""Loader for the bundled reference table of level classifications.

The table is transcribed once as data (data/reference_claims.json) and
read here, so transcription questions stay separable from computation
bugs.  Claims are rank-generic: one entry per (series, source form,
target form).
"""

from __future__ import annotations

import json
from importlib import resources


def load_claims() -> list[dict]:
    text = resources.files("gerbelevels.data").joinpath(
        "reference_claims.json"
    ).read_text()
    return json.loads(text)["entries"]


def find_claim(series: str, source_form: str, target_form: str,
               entries: list[dict] | None = None) -> dict | None:
    if entries is None:
        entries = load_claims()
    for e in entries:
        if (
            e["series"] == series
            and e["source_form"] == source_form
            and e["target_form"] == target_form
        ):
            return {"kind": e["kind"], **(
                {"multiple": e["multiple"]} if "multiple" in e else {}
            )}
    return None
