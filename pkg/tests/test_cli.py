import math
import os
import subprocess
import sys

import numpy as np
import pytest

from pdcsim import ConfigError, parse_config
from pdcsim.cli import main

REF_CONFIG = """\
# reference design point
nu_a = 5.5 GHz
nu_b = 2.75 GHz
delta = 550 MHz
delta_r = 275 MHz
g_d = 20 MHz
g_gr = 10 MHz
g_er = 10 MHz
gamma_a = 11 MHz
gamma_b = 5.5 MHz
"""


class TestParseConfig:
    def test_frequency_suffixes(self):
        config = parse_config(REF_CONFIG)
        assert config.params.nu_a == 5.5e9
        assert config.params.gamma_a == 1.1e7
        assert config.params.delta_r == 2.75e8

    def test_bare_numbers_are_hz(self):
        config = parse_config(REF_CONFIG.replace("nu_a = 5.5 GHz", "nu_a = 5.5e9"))
        assert config.params.nu_a == 5.5e9

    def test_suffix_without_space(self):
        config = parse_config(REF_CONFIG.replace("nu_a = 5.5 GHz", "nu_a = 5.5GHz"))
        assert config.params.nu_a == 5.5e9

    def test_defaults(self):
        config = parse_config(REF_CONFIG)
        assert config.params.phi == -math.pi / 2
        assert config.factor == 10.0
        assert config.seed == 42
        assert config.params.epsilon == 0.0
        assert config.methods == ["linearized"]

    def test_missing_required_key_named(self):
        text = "\n".join(line for line in REF_CONFIG.splitlines() if "nu_a" not in line)
        with pytest.raises(ConfigError, match="nu_a"):
            parse_config(text)

    def test_unknown_key_with_line_number(self):
        with pytest.raises(ConfigError, match="line 11"):
            parse_config(REF_CONFIG + "bogus_key = 3\n")

    def test_malformed_number_with_line_number(self):
        bad = REF_CONFIG.replace("gamma_b = 5.5 MHz", "gamma_b = five MHz")
        with pytest.raises(ConfigError, match="line 10"):
            parse_config(bad)

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(REF_CONFIG + "nu_a = 1 GHz\n")

    def test_unknown_unit_rejected(self):
        with pytest.raises(ConfigError, match="unit"):
            parse_config(REF_CONFIG.replace("5.5 GHz", "5.5 THz"))

    def test_eps_values_list(self):
        config = parse_config(REF_CONFIG + "eps_values = 0, 10 MHz, 1.5 GHz\n")
        assert config.eps_values == [0.0, 1.0e7, 1.5e9]

    def test_unknown_method_rejected(self):
        with pytest.raises(ConfigError, match="method"):
            parse_config(REF_CONFIG + "methods = magic\n")

    def test_comments_and_blank_lines(self):
        decorated = "# header\n\n" + REF_CONFIG + "\n# trailing\n"
        assert parse_config(decorated).params.nu_a == 5.5e9


@pytest.fixture
def ref_config_file(tmp_path):
    path = tmp_path / "ref.cfg"
    path.write_text(REF_CONFIG)
    return str(path)


class TestCliScenarios:
    def test_params_prints_chi(self, ref_config_file, capsys):
        code = main(["params", "--config", ref_config_file])
        out = capsys.readouterr().out
        assert code == 0
        chi_line = [l for l in out.splitlines() if l.startswith("chi_Hz")][0]
        assert float(chi_line.split("=")[1]) == pytest.approx(2.645e4, rel=1e-3)
        assert "regime: ok" in out

    def test_dynamics_csv(self, ref_config_file, tmp_path, capsys):
        out_path = str(tmp_path / "dyn.csv")
        config_path = tmp_path / "dyn.cfg"
        config_path.write_text(REF_CONFIG + "cutoff_a = 1\ncutoff_b = 2\nn_samples = 201\n")
        code = main(["dynamics", "--config", str(config_path), "--out", out_path])
        assert code == 0
        lines = open(out_path).read().splitlines()
        assert lines[0] == "t_s,P_g,n_a_full,n_b_full,n_a_eff,n_b_eff,K"
        assert len(lines) == 202
        data = np.loadtxt(out_path, delimiter=",", skiprows=1)
        assert data[:, 1].min() >= 0.99  # P_g stays high

    def test_scan_csv_and_determinism(self, ref_config_file, tmp_path):
        config_path = tmp_path / "scan.cfg"
        config_path.write_text(REF_CONFIG + "eps_values = 0, 1 GHz, 2 GHz\n")
        out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        assert main(["scan", "--config", str(config_path), "--out", out1]) == 0
        assert main(["scan", "--config", str(config_path), "--out", out2]) == 0
        assert open(out1, "rb").read() == open(out2, "rb").read()
        header = open(out1).readline().strip()
        assert header == ("eps_Hz,eps_over_ec,method,var_x,var_y,n_b,g2,"
                          "anomalous_re,anomalous_im,stderr,flags")

    def test_scan_thread_count_invariance(self, tmp_path):
        config_path = tmp_path / "scan.cfg"
        config_path.write_text(REF_CONFIG + (
            "eps_values = 1.143828125 GHz\nmethods = sde\nn_traj = 400\n"
            "t_max = 2.0e-7\n"
        ))
        out1, out4 = str(tmp_path / "t1.csv"), str(tmp_path / "t4.csv")
        assert main(["scan", "--config", str(config_path), "--out", out1, "--threads", "1"]) == 0
        assert main(["scan", "--config", str(config_path), "--out", out4, "--threads", "4"]) == 0
        assert open(out1, "rb").read() == open(out4, "rb").read()

    def test_bad_key_exits_2_without_output(self, tmp_path):
        config_path = tmp_path / "bad.cfg"
        config_path.write_text(REF_CONFIG + "bogus = 1\n")
        out_path = str(tmp_path / "never.csv")
        code = main(["scan", "--config", str(config_path), "--out", out_path])
        assert code == 2
        assert not os.path.exists(out_path)

    def test_missing_config_file_exits_2(self, tmp_path):
        assert main(["params", "--config", str(tmp_path / "nope.cfg")]) == 2

    def test_scan_without_eps_values_exits_2(self, ref_config_file):
        assert main(["scan", "--config", ref_config_file]) == 2

    def test_seventeen_digit_roundtrip(self, tmp_path):
        config_path = tmp_path / "scan.cfg"
        config_path.write_text(REF_CONFIG + "eps_values = 1.0001 GHz\n")
        out_path = str(tmp_path / "roundtrip.csv")
        main(["scan", "--config", str(config_path), "--out", out_path])
        row = open(out_path).read().splitlines()[1].split(",")
        from pdcsim import linearized_variances, reference_params
        expected_var_x, _ = linearized_variances(reference_params(), 1.0001e9)
        assert float(row[3]) == expected_var_x  # exact round-trip

    def test_console_entry_point(self, ref_config_file):
        proc = subprocess.run(
            [sys.executable, "-m", "pdcsim.cli", "params", "--config", ref_config_file],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "chi_Hz" in proc.stdout


class TestValidateScenario:
    def test_validate_passes_on_reference_point(self, ref_config_file, capsys):
        code = main(["validate", "--config", ref_config_file])
        out = capsys.readouterr().out
        assert code == 0
        lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
        assert len(lines) >= 8
        assert all(l.startswith("PASS") for l in lines)
