import csv
import io
import json

import pytest

from capradii.bench import (ALGORITHMS, COLUMNS, SCHEMA_VERSION, BenchConfig, bench_run,
                            load_config, rows_to_csv)

CONFIG = {
    "generators": [
        {"kind": "planted-euclidean", "n": 6, "k": 2, "U": 3, "seed": 1},
        {"kind": "planted-general", "n": 6, "k": 2, "cap_range": [1, 4], "seed": 2},
    ],
    "algorithms": ["nonuniform", "uniform", "euclid-ptas", "bicriteria-euclid"],
    "epsilons": [0.5],
    "seeds": [0],
}


def strip_time(text):
    rows = list(csv.reader(io.StringIO(text)))
    t = rows[0].index("wall_time")
    return [r[:t] + r[t + 1:] for r in rows]


def test_empty_config_gives_header_only(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("{}")
    assert rows_to_csv(bench_run(load_config(path))) == ",".join(COLUMNS) + "\n"
    assert rows_to_csv(bench_run([])) == ",".join(COLUMNS) + "\n"


def test_columns_fixed():
    assert COLUMNS == ("schema_version", "instance_id", "generator", "n", "k", "algorithm",
                       "epsilon", "seed", "cost", "oracle_cost", "ratio", "wall_time", "trials",
                       "status")
    assert SCHEMA_VERSION == 1


@pytest.fixture(scope="module")
def serial_csv():
    return rows_to_csv(bench_run(CONFIG))


def test_rows_ordered_and_ratios_sane(serial_csv):
    rows = list(csv.DictReader(io.StringIO(serial_csv)))
    assert [(r["instance_id"].split("-n")[0], r["algorithm"]) for r in rows] == \
        [(g["kind"], a) for g in CONFIG["generators"] for a in CONFIG["algorithms"]]
    statuses = {(r["generator"], r["algorithm"]): r["status"] for r in rows}
    assert statuses[("planted-general", "uniform")] == "not-applicable"
    assert statuses[("planted-general", "euclid-ptas")] == "not-applicable"
    for r in rows:
        if r["ratio"]:
            assert float(r["ratio"]) >= 1 - 1e-9
            assert float(r["ratio"]) == pytest.approx(float(r["cost"]) / float(r["oracle_cost"]))
        if r["status"] not in ("not-applicable",):
            assert r["status"] == "ok"


def test_csv_stable_and_parallel_matches_serial(serial_csv):
    again = rows_to_csv(bench_run(CONFIG))
    assert strip_time(again) == strip_time(serial_csv)
    parallel = rows_to_csv(bench_run(CONFIG, threads=2))
    assert strip_time(parallel) == strip_time(serial_csv)


def test_oracle_skipped_beyond_budget():
    cfg = dict(CONFIG, algorithms=["euclid-ptas"], oracle={"max_n": 3})
    rows = bench_run(cfg)
    assert all(r.oracle_cost is None and r.ratio is None and r.status in ("ok", "not-applicable")
               for r in rows)


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig.from_json({"algorithms": ["nope"]})
    assert set(ALGORITHMS) == {"nonuniform", "uniform", "bicriteria-general", "euclid2",
                               "euclid-ptas", "bicriteria-euclid"}
    cfg = BenchConfig.from_json(json.loads(json.dumps(CONFIG)))
    assert len(cfg.generators) == 2 and cfg.epsilons == [0.5]
