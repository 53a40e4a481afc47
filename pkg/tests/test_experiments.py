import json

import pytest

from psrl.evalkit import random_pa
from psrl.experiments import (
    CSV_HEADER,
    ExperimentRecord,
    builtin,
    cells,
    custom,
    derive_seed,
    metadata,
    parse_csv,
    records_to_csv,
    run,
    write_meta,
)


def small(name="exp-pa-fig3", **kw):
    return builtin(name, 0, **{"sizes": (100, 300), "trials": 2, **kw})


class TestSpecs:
    def test_fig3_grid_cardinality(self):
        spec = builtin("exp-pa-fig3")
        assert spec.targets[0].sizes == (100, 500, 1000, 2000, 5000, 10000)
        assert spec.trials == 10 and spec.algos == ("dees", "alergia", "mdi")
        assert len(cells(spec, 0)) * len(spec.algos) == 180
        assert spec.d1_mode == "truncated" and spec.max_len == 15

    def test_fig2_uses_support_and_pr(self):
        spec = builtin("exp-nonrational-fig2")
        assert spec.d1_mode == "support" and spec.target_pr

    def test_random_pa_family(self):
        spec = builtin("exp-random-pa")
        assert [t.name for t in spec.targets] == [f"random{k}" for k in range(2, 26)]
        assert all(t.sizes == (300 * t.automaton.n_states,) for t in spec.targets)
        assert spec.trials == 5
        assert all(len(t.automaton.alphabet) == 3 for t in spec.targets)

    def test_unknown(self):
        with pytest.raises(ValueError):
            builtin("exp-other")

    def test_custom_mode(self, fig2):
        assert custom(fig2).target_pr
        assert not custom(random_pa(3, 2, 0.3, seed=1)).target_pr
        assert custom(random_pa(3, 3, 0.3, seed=1)).d1_mode == "support"

    def test_seeds_independent(self):
        seeds = {derive_seed(0, 0, 0, n, t) for n in (100, 200) for t in range(5)}
        assert len(seeds) == 10
        assert derive_seed(1, 0) != derive_seed(0, 0)
        assert derive_seed(3, 1, 2) == derive_seed(3, 1, 2)


class TestCsv:
    def test_round_trip(self):
        records = run(small(algos=("alergia", "mdi")), 4)
        again = parse_csv(records_to_csv(records))
        assert again == records

    def test_header(self):
        assert records_to_csv([]).splitlines() == [",".join(CSV_HEADER)]

    def test_awkward_values(self):
        r = ExperimentRecord("e", "t,with comma", "dees", 1e-4, 10, 0, 2, 0.1 + 0.2, 1 / 3)
        assert parse_csv(records_to_csv([r])) == [r]

    def test_bad_header(self):
        with pytest.raises(ValueError):
            parse_csv("a,b\n")


class TestRun:
    def test_byte_identical(self):
        spec = small(algos=("dees", "alergia"))
        a = records_to_csv(run(spec, 11, timing=False))
        b = records_to_csv(run(spec, 11, timing=False))
        assert a == b
        assert a != records_to_csv(run(spec, 12, timing=False))

    def test_parallel_matches_serial(self):
        spec = small("exp-nonrational-fig2", algos=("alergia",))
        serial = run(spec, 2, jobs=1, timing=False)
        parallel = run(spec, 2, jobs=2, timing=False)
        assert serial == parallel

    def test_rows_in_grid_order(self):
        records = run(small(algos=("alergia",)), 0, timing=False)
        assert [(r.n, r.trial) for r in records] == [(100, 0), (100, 1), (300, 0), (300, 1)]
        assert all(r.d1 >= 0 and r.states >= 1 for r in records)

    def test_random_pa_small(self):
        spec = builtin("exp-random-pa", 0, trials=1, max_states=3)
        records = run(spec, 0, timing=False)
        assert len(records) == 2 * 3
        empirical = [r for r in records if r.algo == "empirical"]
        assert all(r.states > 0 for r in empirical)

    def test_metadata(self, tmp_path):
        spec = small()
        meta = metadata(spec, 5, False)
        path = tmp_path / "m.json"
        write_meta(path, meta)
        loaded = json.loads(path.read_text())
        assert loaded["root_seed"] == 5 and "PCG64" in loaded["generator"]
        assert loaded["params"]["alergia"] == 0.05
