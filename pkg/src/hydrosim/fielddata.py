"""Bundled reference dataset from the final field campaign.

Eight motor groups (three syringes each) with per-group fill times and
per-syringe volumes and in-situ water quality readings.  The dataset drives
fault-model calibration and serves as the fixture for aggregation and
ground-station tests.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

QUALITY_FIELDS = ("temperature_c", "ph", "tds_mg_l", "ec_us_cm")


@lru_cache(maxsize=1)
def load_field_samples() -> dict:
    with resources.files("hydrosim.data").joinpath("field_samples.json").open() as fh:
        return json.load(fh)


def group_fill_times() -> list[float]:
    return [g["fill_time_s"] for g in load_field_samples()["groups"]]


def flat_records() -> list[dict]:
    """One record per syringe, with group fill time and location attached."""
    doc = load_field_samples()
    out = []
    for g in doc["groups"]:
        for s in g["syringes"]:
            rec = dict(s)
            rec["group"] = g["label"]
            rec["module"] = g["module"]
            rec["motor"] = g["motor"]
            rec["fill_time_s"] = g["fill_time_s"]
            rec["time_error_pct"] = g["time_error_pct"]
            rec["lat"] = g["lat"]
            rec["lon"] = g["lon"]
            rec["mission"] = doc["mission"]
            out.append(rec)
    return out
