import json
import subprocess
import sys

import pytest

from cornerscatter.cli import main
from cornerscatter.vanishing import VanishingCertificate

WEAK = "kind = weak\nc1 = 1\nalpha1 = 2\nc2 = -1\nalpha2 = 2\n"
WEAK3 = "kind = weak\nc1 = 2\nalpha1 = 3\nc2 = 0\nalpha2 = 5\n"
STRONG = "kind = strong  # two straight arcs\nslopes = 0, 1\n"
ARC = "kind = arc\npoly = 0, 0, 1\n"
DISK = "kind = disk\nradius = 1\n"


@pytest.fixture
def geo(tmp_path):
    def write(text, name="geo.cfg"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def run(tmp_path, *args, out="out"):
    return main(["--out", str(tmp_path / out), *args])


def test_verify_weak_writes_a_certificate(tmp_path, geo):
    assert run(tmp_path, "verify-weak", "--geometry", geo(WEAK), "--q1", "1", "--q2", "2", "--order", "12") == 0
    cert = VanishingCertificate.loads((tmp_path / "out" / "weak_certificate.json").read_text())
    assert cert.conclusion.value == "AllVanish" and cert.order == 12


def test_verify_strong_with_audit_includes_matrices(tmp_path, geo):
    assert run(tmp_path, "--audit", "verify-strong", "--geometry", geo(STRONG), "--q1", "1", "--q2", "7/2",
               "--order", "8") == 0
    data = json.loads((tmp_path / "out" / "strong_certificate.json").read_text())
    assert data["audit"] is True
    assert all("matrix" in step for step in data["steps"])


@pytest.mark.parametrize("args", [
    ["verify-weak", "--q1", "1", "--q2", "1"],
    ["verify-weak", "--q1", "1.5", "--q2", "2"],
    ["verify-weak", "--q1", "1", "--q2", "2", "--order", "5"],
    ["verify-strong", "--q1", "1", "--q2", "2"],
])
def test_invalid_certification_inputs(tmp_path, geo, args):
    assert run(tmp_path, args[0], "--geometry", geo(WEAK), *args[1:]) == 2


def test_invalid_geometry_files(tmp_path, geo):
    assert run(tmp_path, "verify-weak", "--geometry", str(tmp_path / "missing.cfg"), "--q1", "1", "--q2", "2") == 2
    assert run(tmp_path, "verify-weak", "--geometry", geo("kind = blob\n"), "--q1", "1", "--q2", "2") == 2
    assert run(tmp_path, "verify-weak", "--geometry", geo("kind = weak\nc1 = 1\n"), "--q1", "1", "--q2", "2") == 2
    bad_profile = "kind = weak\nc1 = 1\nalpha1 = 1\nc2 = 0\nalpha2 = 2\n"
    assert run(tmp_path, "verify-weak", "--geometry", geo(bad_profile), "--q1", "1", "--q2", "2") == 2


def test_argparse_errors_exit_with_2(tmp_path):
    assert run(tmp_path, "no-such-command") == 2
    assert run(tmp_path, "ite") == 2
    assert main(["--help"]) == 0


def test_spans(tmp_path):
    assert run(tmp_path, "--seed", "3", "spans", "--mmin", "4", "--mmax", "6", "--random-pairs", "2") == 0
    lines = (tmp_path / "out" / "spans.csv").read_text().splitlines()
    assert lines[0] == "m,tau1,tau2,spans"
    assert len(lines) == 1 + 7 * 3
    assert all(line.endswith("true") for line in lines[1:])
    assert run(tmp_path, "spans", "--mmin", "3") == 2


def test_ite(tmp_path):
    assert run(tmp_path, "ite", "--q0", "4") == 0
    lines = (tmp_path / "out" / "ite.csv").read_text().splitlines()
    assert lines[0] == "n,k_star,residual" and len(lines) == 4
    assert run(tmp_path, "ite", "--q0", "4", "--kmin", "0.5", "--kmax", "0.6") == 1
    assert run(tmp_path, "ite", "--q0", "1") == 2
    assert run(tmp_path, "ite", "--q0", "4", "--kmin", "-1") == 2


def test_oracle_on_certificates(tmp_path, geo):
    assert run(tmp_path, "verify-weak", "--geometry", geo(WEAK), "--q1", "1", "--q2", "2", "--order", "10") == 0
    cert_path = tmp_path / "out" / "weak_certificate.json"
    assert run(tmp_path, "oracle", "--cert", str(cert_path)) == 0
    report = json.loads((tmp_path / "out" / "oracle_report.json").read_text())
    assert report["agree"] and report["replay_problems"] == []

    data = json.loads(cert_path.read_text())
    data["steps"][1]["forced"] = []
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(data))
    assert run(tmp_path, "oracle", "--cert", str(tampered)) == 1

    tampered.write_text("{not json")
    assert run(tmp_path, "oracle", "--cert", str(tampered)) == 2
    assert run(tmp_path, "oracle", "--cert", str(tmp_path / "nope.json")) == 2
    assert run(tmp_path, "oracle") == 2


def test_oracle_on_geometries(tmp_path, geo):
    assert run(tmp_path, "oracle", "--geometry", geo(ARC), "--order", "6") == 0
    cert = VanishingCertificate.loads((tmp_path / "out" / "oracle_certificate.json").read_text())
    assert cert.conclusion.value == "Counterexample" and cert.counterexample
    assert run(tmp_path, "oracle", "--geometry", geo(STRONG), "--order", "8") == 0
    assert run(tmp_path, "oracle", "--geometry", geo(WEAK3), "--order", "12") == 0
    # the weak schedule needs order >= 4 * beta = 12
    assert run(tmp_path, "oracle", "--geometry", geo(WEAK3), "--order", "8") == 2
    assert run(tmp_path, "oracle", "--geometry", geo(WEAK), "--q1", "2", "--q2", "2") == 2


def test_sweep_outputs_and_svg(tmp_path, geo):
    args = ["sweep", "--geometry", geo(DISK), "--q0", "4", "--k", "3.384,3.2", "--incident", "circular:0",
            "--nodes", "64", "--max-nodes", "256", "--svg"]
    assert run(tmp_path, *args) == 0
    out = tmp_path / "out"
    rows = out.joinpath("sweep.csv").read_text().splitlines()
    assert rows[0] == "k,farfield_l2,nodes,selfconv_err" and len(rows) == 3
    assert out.joinpath("farfield.csv").read_text().startswith("theta,re,im\n")
    assert out.joinpath("sweep.svg").read_text().lstrip().startswith("<?xml")
    assert out.joinpath("farfield.svg").exists()


def test_sweep_edge_cases(tmp_path, geo):
    assert run(tmp_path, "sweep", "--geometry", geo(DISK), "--q0", "2", "--count", "0") == 0
    assert (tmp_path / "out" / "sweep.csv").read_text() == "k,farfield_l2,nodes,selfconv_err\n"
    assert run(tmp_path, "sweep", "--geometry", geo(DISK), "--q0", "1", "--k", "1") == 2
    assert run(tmp_path, "sweep", "--geometry", geo(DISK), "--q0", "2", "--k", "-1") == 2
    assert run(tmp_path, "sweep", "--geometry", geo(DISK), "--q0", "2", "--k", "1", "--incident", "x:1") == 2
    assert run(tmp_path, "sweep", "--geometry", geo(ARC), "--q0", "2", "--k", "1") == 2
    # a tolerance no mesh can meet marks the row as failed
    assert run(tmp_path, "sweep", "--geometry", geo(WEAK), "--q0", "2", "--k", "2", "--nodes", "64",
               "--max-nodes", "128", "--tol", "1e-14") == 1


def test_outputs_are_byte_identical_across_runs(tmp_path, geo):
    g, d = geo(WEAK, "weak.cfg"), geo(DISK, "disk.cfg")
    for out in ("a", "b"):
        assert run(tmp_path, "--audit", "verify-weak", "--geometry", g, "--q1", "1", "--q2", "4", "--order", "10",
                   out=out) == 0
        assert run(tmp_path, "spans", "--random-pairs", "3", out=out) == 0
        assert run(tmp_path, "sweep", "--geometry", d, "--q0", "2", "--k", "1,2", "--nodes", "64",
                   "--max-nodes", "256", "--svg", out=out) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert {"weak_certificate.json", "spans.csv", "sweep.csv", "farfield.csv", "sweep.svg", "farfield.svg"} <= set(names)
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cornerscatter", "--out", str(tmp_path), "ite", "--q0", "4",
                           "--kmax", "4"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "1 roots" in proc.stdout
