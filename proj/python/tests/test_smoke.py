# Copyright 2026 The bballoc Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import pytest

import bballoc


def small(seed=1):
    return bballoc.generate(billboards=3, users=40, products=2, horizon=4 * 3600, extent=300.0,
                            alpha=0.6, seed=seed)


def test_generate():
    p = small()
    assert p.num_slots == 12
    assert p.num_products == 2
    assert p.theta == 0.05
    assert sum(p.budgets.values()) == 7
    assert p.num_entries > 0


def test_sample_size():
    assert bballoc.sample_size(100, 0.1) == 24


@pytest.mark.parametrize("algo", ["lp-rr", "greedy", "random", "topk"])
def test_solvers_are_feasible(algo):
    p = small()
    out = bballoc.solve(p, algo, seed=3)
    report = bballoc.check(p, out["assignments"])
    assert report["budget_ok"] and report["disjoint_ok"]
    assert report["balance_ok"] == out["balance_satisfied"]
    assert out["total_influence"] == pytest.approx(sum(out["influence"].values()), abs=1e-9)
    assert report["fairness_gap"] == pytest.approx(out["fairness_gap"], abs=1e-12)
    assert (out["lp_objective"] is not None) == (algo == "lp-rr")


def test_exact_and_guard():
    tiny = bballoc.generate(billboards=2, users=20, products=2, horizon=3 * 3600, extent=300.0,
                            alpha=0.5, seed=3)
    out = bballoc.solve(tiny, "exact")
    assert out["optimum"] == pytest.approx(out["total_influence"])
    with pytest.raises(bballoc.SizeGuardError):
        bballoc.solve(bballoc.generate(billboards=10, users=20, seed=1), "exact")


def test_errors():
    p = small()
    with pytest.raises(bballoc.DataError):
        bballoc.solve(p, "magic")
    with pytest.raises(bballoc.DataError):
        bballoc.check(p, {"p1": ["nowhere"]})
    with pytest.raises(ValueError):
        bballoc.generate(alpha=2.0)


def test_save_and_load(tmp_path):
    p = small(5)
    manifest = p.save(tmp_path)
    q = bballoc.load(manifest)
    assert q.num_slots == p.num_slots
    assert q.budgets == p.budgets
    a = bballoc.solve(p, "greedy", seed=2)
    b = bballoc.solve(q, "greedy", seed=2)
    assert a["assignments"] == b["assignments"]
