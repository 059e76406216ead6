import json

import numpy as np
import pytest

from conftest import TABLE3
from jointpol.errors import FormatError
from jointpol.io import (
    HEADERS,
    bundled_path,
    format_counts_csv,
    parse_counts_csv,
    read_correlations,
    read_counts_csv,
    read_design,
    write_counts_csv,
)
from jointpol.simulator import CountTable

GOLDEN_HEADER = 'outcome1\\outcome2,"(+1,+1)","(+1,-1)","(-1,+1)","(-1,-1)"'


def test_bundled_table3(bundled_counts):
    assert np.array_equal(bundled_counts.counts, TABLE3)
    assert bundled_counts.metadata["duration_per_setting"] == 10


def test_header_order():
    assert HEADERS == ("(+1,+1)", "(+1,-1)", "(-1,+1)", "(-1,-1)")
    text = format_counts_csv(CountTable(TABLE3))
    assert text.splitlines()[0] == GOLDEN_HEADER
    assert text.splitlines()[1] == '"(+1,+1)",967,8723,16658,17558'


def test_roundtrip(tmp_path):
    t = CountTable(TABLE3, {"seed": 12, "duration_per_setting": 10.0, "provenance": "x: y"})
    path = tmp_path / "c.csv"
    write_counts_csv(t, path)
    back = read_counts_csv(path)
    assert np.array_equal(back.counts, TABLE3)
    assert back.metadata == {"seed": 12, "duration_per_setting": 10.0, "provenance": "x: y"}


def test_bundled_file_is_canonical():
    text = bundled_path("counts").read_text()
    assert format_counts_csv(parse_counts_csv(text)) == text


@pytest.mark.parametrize("mutate", [
    lambda s: s.replace('"(+1,-1)","(-1,+1)"', '"(-1,+1)","(+1,-1)"', 1),
    lambda s: s.replace("967", "9.5"),
    lambda s: s.replace("967", "-967"),
    lambda s: "\n".join(s.splitlines()[:-1]),
    lambda s: s.replace(",996", ""),
    lambda s: "",
])
def test_malformed(mutate):
    text = bundled_path("counts").read_text()
    with pytest.raises(FormatError):
        parse_counts_csv(mutate(text))


def test_missing_file(tmp_path):
    with pytest.raises(FormatError):
        read_counts_csv(tmp_path / "nope.csv")


def test_correlations(tmp_path):
    c = read_correlations(bundled_path("correlations"))
    assert (c.c_xx, c.c_yy, c.c_zz) == (-0.9551, -0.8555, -0.8556)
    assert (c.se_xx, c.se_yy, c.se_zz) == (0.0012, 0.0022, 0.0022)
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"c_xx": -1, "c_yy": -1}))
    c2 = read_correlations(p)
    assert c2.c_zz is None and c2.se_xx == 0
    p.write_text(json.dumps({"c_xx": -1}))
    with pytest.raises(FormatError):
        read_correlations(p)
    p.write_text("{not json")
    with pytest.raises(FormatError):
        read_correlations(p)


def test_design_files():
    d, info = read_design(bundled_path("design"))
    assert info["source"] == "bloch"
    d.validate()
    w, winfo = read_design(bundled_path("waveplates"))
    assert winfo["source"] == "waveplates" and winfo["convention"] == "rot+ret-"
    w.validate(winfo["tol"])
    assert np.allclose(w.vectors, d.vectors, atol=5e-3)


@pytest.mark.parametrize("payload", [
    "",
    "[]",
    json.dumps({"outcomes": [{"label": "a", "theta_B": 45, "phi_B": 45}]}),
    json.dumps({"outcomes": [{"label": l, "theta_B": 45} for l in "abcd"]}),
    json.dumps({"outcomes": [{"label": l, "theta_B": 45, "phi_B": 0} for l in "aabc"]}),
    json.dumps({"outcomes": [{"label": l, "theta_B": "x", "phi_B": 0} for l in "abcd"]}),
])
def test_design_malformed(tmp_path, payload):
    p = tmp_path / "d.json"
    p.write_text(payload)
    with pytest.raises(FormatError):
        read_design(p)
