"""Smoke test for the Python bindings.

Build first:  cargo build -p confuse-py --features extension-module
Then run:     python3 python/smoke_test.py [path/to/libconfuse.so]
"""

import importlib.util
import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    if len(sys.argv) > 1:
        lib = Path(sys.argv[1])
    else:
        candidates = [ROOT / "target" / p / "libconfuse.so" for p in ("release", "debug")]
        found = [c for c in candidates if c.exists()]
        if not found:
            sys.exit("libconfuse.so not found; build confuse-py first")
        lib = max(found, key=lambda c: c.stat().st_mtime)
    tmp = Path(tempfile.mkdtemp())
    target = tmp / "confuse.so"
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("confuse", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    confuse = load_module()

    fields = confuse.catalog("field", 20)
    rings = confuse.catalog("ring", 20)
    assert sum(not s.trivial for s in fields if s.size < 20) == 20, len(fields)
    assert sum(not s.trivial for s in rings if s.size < 20) == 35, len(rings)
    for s in fields[:5]:
        for x in range(s.size):
            orbit = sorted(s.mul(g, x) for g in s.randomizer)
            assert set(orbit) == set(next(c for c in s.sets if x in c))

    eq3 = confuse.Table.bundled("equal3")
    assert eq3(1, 1) == 0 and eq3(0, 1) == 1
    exp = confuse.search(eq3)[0]
    exp.validate(eq3)
    scheme = confuse.linear_scheme(exp)
    assert scheme.rates == ("log2 3", "log2 3"), scheme.rates
    report = confuse.verify(scheme, eq3)
    assert report["correct"]["pass"] and report["secure"]["pass"]
    assert report["leakage"]["exact_zero"]

    z4 = confuse.Table.bundled("z4_example")
    ring = next(s for s in rings if s.size == 4 and s.randomizer == [1, 3])
    worked = [e for e in confuse.all_expansions(z4, ring) if e.map1 == [1, 0] and e.map2 == [0, 2]]
    assert len(worked) == 1
    optimized = confuse.linear_scheme(worked[0], optimize_for=z4)
    assert optimized.rates == ("2", "1"), optimized.rates

    masking = confuse.Scheme.bundled("table_masking_2x3")
    threshold = confuse.Table.bundled("threshold_2x3")
    assert confuse.verify(masking, threshold)["correct"]["pass"]
    assert confuse.table_masking(threshold).rates == ("2", "2")

    broken = confuse.Scheme.from_json(scheme.to_json())
    x1, x2 = broken.encode1(0, 0), broken.encode2(0, 0)
    broken.set_decoder_entry(x1, x2, 1 - broken.decode(x1, x2))
    bad = confuse.verify(broken, eq3)
    assert not bad["correct"]["pass"] and bad["correct"]["witness"] is not None

    and_table = confuse.Table.bundled("and")
    field_exp = confuse.search(and_table, kind="field")[0]
    h = confuse.entropy(field_exp)
    assert abs(h["h_bits"] - 1.5612781244591327) < 1e-9, h

    round_trip = confuse.Table.from_json(eq3.to_json())
    assert round_trip.outputs == eq3.outputs
    assert json.loads(exp.to_json())["map1"] == exp.map1

    try:
        confuse.Table([[0, 1], [1]])
    except ValueError:
        pass
    else:
        raise AssertionError("ragged table accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
