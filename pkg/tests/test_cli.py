import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from powerbin import cli
from powerbin.contractfile import ContractFileError, load_contract, parse_contract_text
from powerbin.contracts import CLOSED_FORMS, closed_form_price
from powerbin.core import MarketParams, PriceResult
from powerbin.gaussian import norm_cdf
from powerbin.products import fixed_strike_coefficients

DATA = Path(__file__).parent / "data"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


# price


def test_price_bond_text():
    code, out, _ = run("price", DATA / "power_standard_bond.yaml")
    assert code == 0
    assert f"value: {math.exp(-0.05 * 0.75):.12g}" in out.splitlines()


@pytest.mark.parametrize("name", sorted(p.stem for p in DATA.glob("*.yaml") if p.stem != "bad_sigma"))
def test_price_json_is_bit_exact(name):
    code, out, _ = run("price", DATA / f"{name}.yaml", "--format", "json")
    assert code == 0
    report = json.loads(out)
    pc = load_contract(DATA / f"{name}.yaml")
    lib = closed_form_price(pc.contract, pc.x, pc.t, pc.params, pc.J)
    assert report["value"] == lib.value
    assert report["diagnostics"] == dict(lib.diagnostics)


def test_price_asian_text_has_coefficients():
    code, out, _ = run("price", DATA / "geo_asian_fixed.yaml")
    assert code == 0
    for key in ("Delta_k", "theta_k", "d1", "d2"):
        assert any(line.strip().startswith(f"{key}:") for line in out.splitlines())


def test_price_bad_sigma_exits_2_naming_field():
    code, _, err = run("price", DATA / "bad_sigma.yaml")
    assert code == 2
    assert "line 4: sigma: must be > 0" in err


def test_price_missing_file_exits_5(tmp_path):
    code, _, err = run("price", tmp_path / "nope.yaml")
    assert code == 5 and "cannot read" in err


def test_price_numeric_failure_exits_3(tmp_path):
    f = tmp_path / "huge.yaml"
    f.write_text("kind: power_standard\nr: 0.05\nq: 0.0\nsigma: 0.2\nalpha: 400\nT: 1.0\nx: 1e300\n")
    code, _, err = run("price", f)
    assert code == 3 and "numeric failure" in err


# validate


def test_validate_cash_binary_both_pass():
    code, out, _ = run("validate", DATA / "cash_binary.yaml")
    assert code == 0
    assert out.splitlines()[-1] == "result: PASS"


def test_validate_savings_plan_mc_pass():
    code, out, _ = run("validate", DATA / "savings_plan.yaml", "--oracle", "mc", "--format", "json")
    report = json.loads(out)
    assert code == 0 and report["mc"]["verdict"] == "PASS"
    assert report["mc"]["gap_over_se"] <= 3.0


def test_validate_corrupted_closed_form_fails(monkeypatch):
    def flipped(c, x, t, params, J):
        k = fixed_strike_coefficients(x, t, c, params)
        n = len(c.schedule)
        lead = math.exp(c.fixings.log_sum / n + (k.k / n) * math.log(x) - k.theta_k)
        disc = math.exp(-params.r * (c.schedule.expiry - t))
        return PriceResult(lead * norm_cdf(k.d1) - c.K * disc * norm_cdf(k.d2))

    monkeypatch.setitem(CLOSED_FORMS, "geo_asian_fixed", flipped)
    code, out, _ = run("validate", DATA / "geo_asian_fixed.yaml", "--format", "json")
    report = json.loads(out)
    assert code == 1
    assert report["result"] == "FAIL"
    assert report["mc"]["verdict"] == "FAIL" and report["quad"]["verdict"] == "FAIL"


def test_validate_unsupported_exits_4():
    code, _, err = run("validate", DATA / "cont_asian_fixed.yaml", "--oracle", "quad")
    assert code == 4


def test_validate_seed_flag_and_env(monkeypatch):
    args = ("validate", DATA / "asset_binary.yaml", "--oracle", "mc", "--paths", "20000", "--format", "json")
    default = json.loads(run(*args)[1])
    assert default["mc"]["seed"] == 0
    monkeypatch.setenv(cli.SEED_ENV, "11")
    from_env = json.loads(run(*args)[1])
    explicit = json.loads(run(*args, "--seed", "11")[1])
    assert from_env["mc"]["seed"] == 11
    assert from_env["mc"]["value"] == explicit["mc"]["value"] != default["mc"]["value"]


def test_validate_rejects_bad_flags():
    assert run("validate", DATA / "cash_binary.yaml", "--rel-tol", "0")[0] == 2
    assert run("validate", DATA / "cash_binary.yaml", "--paths", "1")[0] == 2


# converge


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_converge_csv_shape():
    code, out, _ = run("converge", "--ladder", "8,16,32")
    assert code == 0
    assert "\r" not in out and out.endswith("\n")
    rows = _rows(out)
    assert rows[0] == ["n", "V_n", "V_continuous", "abs_error", "rel_error", "error_ratio_vs_prev"]
    assert [r[0] for r in rows[1:]] == ["8", "16", "32"]
    errs = [float(r[3]) for r in rows[1:]]
    assert errs[0] > errs[1] > errs[2]


def test_converge_single_entry_has_empty_ratio():
    rows = _rows(run("converge", "--ladder", "4")[1])
    assert len(rows) == 2 and rows[1][5] == ""


def test_converge_products_differ():
    fixed = _rows(run("converge", "--ladder", "4", "--product", "fixed")[1])[1]
    floating = _rows(run("converge", "--ladder", "4", "--product", "floating")[1])[1]
    assert fixed[2] != floating[2]


def test_converge_writes_file(tmp_path):
    target = tmp_path / "c.csv"
    code, out, _ = run("converge", "--ladder", "8,16", "--out", target)
    assert code == 0 and out == ""
    assert target.read_bytes().decode("utf-8") == run("converge", "--ladder", "8,16")[1]


def test_converge_io_failure_exits_5(tmp_path):
    code, _, err = run("converge", "--ladder", "8", "--out", tmp_path / "missing" / "c.csv")
    assert code == 5 and "cannot write" in err


@pytest.mark.parametrize("ladder", ["1,4", "x", ""])
def test_converge_bad_ladder_exits_2(ladder):
    assert run("converge", "--ladder", ladder)[0] == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "powerbin", "price", str(DATA / "power_standard_bond.yaml")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "value:" in proc.stdout


# contract files


def test_parse_rejects_unknown_key():
    with pytest.raises(ContractFileError, match="line 8: strikee"):
        parse_contract_text("kind: power_standard\nr: 0.05\nq: 0\nsigma: 0.2\nalpha: 1\nT: 1\nx: 100\nstrikee: 3\n")


def test_parse_rejects_unknown_kind():
    with pytest.raises(ContractFileError, match="kind"):
        parse_contract_text("kind: barrier\n")


def test_parse_accepts_capital_x_and_general_condition():
    pc = parse_contract_text(
        "kind: power_binary\nr: 0.05\nq: 0\nsigma: 0.2\nalpha: 0\nthreshold: 2\nsign: up\nbeta: -1\nexpiry: 1\nX: 1.5\n"
    )
    assert pc.x == 1.5
    assert pc.contract.thresholds == (0.5,) and int(pc.contract.signs[0]) == -1


def test_parse_checks_fixings_against_time():
    text = (DATA / "geo_asian_fixed.yaml").read_text().replace("t: 0.0", "t: 0.5")
    with pytest.raises(ContractFileError, match="fixings"):
        parse_contract_text(text)


def test_parse_checks_time_against_expiry():
    text = (DATA / "power_standard_bond.yaml").read_text().replace("t: 0.25", "t: 2.0")
    with pytest.raises(ContractFileError, match="line 8: t"):
        parse_contract_text(text)


def test_parse_params_roundtrip():
    pc = load_contract(DATA / "cash_binary.yaml")
    assert pc.params == MarketParams(0.05, 0.02, 0.2)


def test_parse_reads_exponent_floats_without_dot():
    pc = parse_contract_text("kind: power_standard\nr: 5e-2\nq: 0\nsigma: 2E-1\nalpha: 1\nT: 1\nx: 1e2\n")
    assert pc.params == MarketParams(0.05, 0.0, 0.2) and pc.x == 100.0


def test_validate_constant_payoff_passes_despite_rounding_level_se():
    code, out, _ = run("validate", DATA / "power_standard_bond.yaml", "--oracle", "mc", "--paths", "20000", "--format", "json")
    report = json.loads(out)
    assert code == 0 and report["mc"]["verdict"] == "PASS"
    assert report["mc"]["abs_gap"] <= 1e-14
