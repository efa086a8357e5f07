import io
import math
import subprocess
import sys

import pytest

from optocqnc.cli import EXIT_CONFIG, EXIT_INTERNAL, EXIT_OK, EXIT_SINGULAR, QUANTITIES, run
from optocqnc.spectra import noise_spectrum_free
from optocqnc.tables import read_csv, read_json


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_spectrum_matches_library(canonical):
    code, out, _ = call("spectrum", "--preset", "canonical", "--control", "off", "--min", "0.9", "--max", "1.1", "--points", "5")
    assert code == EXIT_OK
    t = read_csv(out)
    assert t.columns[:2] == ["omega", "S_total"] and "S_c_total" not in t.columns
    for w, s in zip(t.column("omega"), t.column("S_total")):
        assert s == float(noise_spectrum_free(w, canonical).total)


def test_spectrum_with_control_below_free():
    code, out, _ = call("spectrum", "--preset", "canonical", "--control", "balanced", "--min", "0.99", "--max", "1.01", "--points", "5")
    assert code == EXIT_OK
    t = read_csv(out)
    assert all(c < s for c, s in zip(t.column("S_c_total"), t.column("S_total")))


def test_balanced_guard(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[system]\ngamma_m=1.2e-3\nkappa_b=0.01\ndelta_b=-1\nG=0.2\n[ancilla]\nmode=explicit\ng1=0.2\ng2=0.1\ndelta_c=-1\nkappa_c=6e-4\n")
    code, _, err = call("spectrum", "--config", str(cfg), "--control", "balanced")
    assert code == EXIT_CONFIG and "balanced control requires g1 == g2" in err


def test_unknown_quantity_lists_vocabulary():
    code, _, err = call("sweep", "--preset", "fig4b", "--outputs", "S,bogus")
    assert code == EXIT_CONFIG
    for q in QUANTITIES:
        assert q in err


def test_missing_si_block():
    code, _, err = call("rescale", "--preset", "canonical")
    assert code == EXIT_CONFIG and "[si]" in err


def test_singular_exit_code():
    code, _, err = call("stability", "--preset", "canonical", "--control", "off", "--find-gmax")
    assert code == EXIT_SINGULAR and err


def test_bad_arguments_exit_code():
    assert call("spectrum", "--format", "xml")[0] == EXIT_CONFIG
    assert call("preset", "show", "nope")[0] == EXIT_CONFIG


def test_exit_codes_distinct():
    assert len({EXIT_OK, EXIT_CONFIG, EXIT_SINGULAR, EXIT_INTERNAL}) == 4


def test_fig5_sweep_structure():
    code, out, _ = call("sweep", "--preset", "fig5", "--points", "5")
    t = read_csv(out)
    R = t.column("R")
    assert R[2] == max(R)
    assert t.column("stable")[:2] == [0.0, 0.0] and t.column("stable")[2:] == [1.0, 1.0, 1.0]


def test_stability_report_and_binding(tmp_path):
    cfg = tmp_path / "r.ini"
    cfg.write_text("[system]\ngamma_m=1.2e-3\nkappa_b=0.01\ndelta_b=1\nG=0.8\n")
    code, out, err = call("stability", "--config", str(cfg))
    assert code == EXIT_OK
    t = read_csv(out)
    assert t.metadata["binding_constraint"] == "a_4"
    assert t.column("hurwitz_stable") == [0.0]
    assert "binding constraint: a_4" in err


def test_table1_has_ten_rows_with_convention():
    code, out, _ = call("stability", "--preset", "table1", "--table1")
    t = read_csv(out)
    assert len(t.rows) == 10
    assert sorted(set(t.column("g2_over_sqrt2G"))) == [0.5, 1.0]


def test_nms_columns():
    code, out, _ = call("nms", "--preset", "fig2", "--min", "0.02", "--max", "0.04", "--points", "2")
    t = read_csv(out)
    assert t.column("im_chi_peaks") == [2.0, 2.0]


def test_json_output(tmp_path):
    path = tmp_path / "o.json"
    code, _, _ = call("sql", "--preset", "canonical", "--points", "3", "--format", "json", "--output", str(path))
    t = read_json(path.read_text())
    assert t.columns == ["omega", "G_L", "S_L", "S_L_c", "pole"]


def test_pole_rows_flagged(tmp_path):
    cfg = tmp_path / "p.ini"
    cfg.write_text("[system]\ngamma_m=1e-30\nkappa_b=0.01\ndelta_b=-1\nG=1e-20\n")
    code, out, _ = call("spectrum", "--config", str(cfg), "--min", "0.5", "--max", "1.5", "--points", "3")
    t = read_csv(out)
    assert t.column("pole") == [0.0, 1.0, 0.0]
    assert math.isnan(t.rows[1][1])


def test_preset_list_and_show():
    code, out, _ = call("preset", "list")
    assert "canonical" in out.split()
    code, out, _ = call("preset", "show", "canonical")
    assert "[system]" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "optocqnc.cli", "preset", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "fig4a" in proc.stdout
