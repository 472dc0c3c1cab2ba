"""Smoke test for the xtcs_py extension. Install it first, e.g. `pip install --no-build-isolation ./crates/xtcs-py`."""

from pathlib import Path

import xtcs_py

ROOT = Path(__file__).resolve().parent.parent

cat = xtcs_py.Catalog.shipped()
assert len(cat) == 66 and "3.22_3" in cat
assert cat.mismatches() == 0
assert cat.block("3.21")["id"] == "3.21"

found = xtcs_py.rank1_search(cat, "1/4pi")
assert len(found) == 25
assert all(r.nu_bar == -39 for r in found)
r = next(r for r in found if r.to_dict()["plus"] == "3.21" and r.to_dict()["minus"] == "3.8_1_18")
assert (r.b2, r.b3, r.d_free) == (0, 64, 24)

cfg = xtcs_py.Configuration.from_toml((ROOT / "crates/xtcs/configs/3.22_1_3.9_10.toml").read_text(), cat)
violations, _ = cfg.validate()
assert not violations
rep = cfg.report()
assert (rep.b3, rep.d_free, rep.nu_bar) == (91, 4, -36)

pure = xtcs_py.cross_search(cat, "3.28", "3.28", "1/6pi", 3, pure=True)
assert sorted({p.d_free for p in pure}) == [2, 8]

cmp = xtcs_py.compare(found[0], found[0])
assert cmp["nu_equal"]

print("ok:", r, rep)
