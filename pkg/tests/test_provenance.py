from hypothesis import given, settings
from hypothesis import strategies as st

from twointerval.provenance import (canonical_json, config_hash, module_versions,
                                    provenance, read_table, render_table)

scalars = st.one_of(st.integers(-10**6, 10**6), st.text(max_size=8), st.booleans(), st.none())
configs = st.dictionaries(st.text(min_size=1, max_size=6), scalars, max_size=6)


def test_versions_name_the_numeric_stack():
    versions = module_versions()
    assert set(versions) == {"artifact", "numpy", "scipy", "numba"}
    assert all(isinstance(v, str) and v for v in versions.values())


@settings(max_examples=50, deadline=None)
@given(configs)
def test_hash_ignores_key_order(cfg):
    reordered = dict(reversed(list(cfg.items())))
    assert config_hash(reordered) == config_hash(cfg)
    assert canonical_json(reordered) == canonical_json(cfg)


def test_hash_distinguishes_configs():
    assert config_hash({"k": 1}) != config_hash({"k": 2})
    assert len(config_hash({})) == 64


def test_round_trip_and_line_endings():
    prov = provenance({"out": "x", "geometries": [[4, 4, 9]]}, {"r11_phase": "printed"})
    rows = [("0", "1.5", ""), ("log_negativity", "0.25", "a,b")]
    text = render_table(("index", "value", "note"), rows, prov)
    assert "\r" not in text and text.endswith("\n")
    assert text.startswith("# provenance: {")
    back, header, body = read_table(text)
    assert back == prov
    assert header == ["index", "value", "note"]
    assert body == [list(r) for r in rows]


def test_table_without_provenance():
    text = render_table(("a",), [("1",)])
    assert read_table(text) == (None, ["a"], [["1"]])


def test_rendering_is_deterministic():
    prov = provenance({"b": 1, "a": [1.0, 2.0]})
    assert render_table(("x",), [("1",)], prov) == render_table(("x",), [("1",)], dict(prov))
