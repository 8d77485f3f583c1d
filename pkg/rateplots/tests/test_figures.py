import os
import warnings

import pytest

from rateplots.cli import main
from rateplots.figures import plot_rates, plot_rho

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
RATES = os.path.join(FIXTURES, "synthetic_rates.csv")
RHO = os.path.join(FIXTURES, "synthetic_rho.csv")


def test_plot_rates_fitted_slope_and_exclusions(tmp_path):
    out = tmp_path / "rates.svg"
    fitted = plot_rates(RATES, out)
    # exact c n^-1/2 synthetic series; flagged rows would skew the fit badly
    assert fitted["dW"] == pytest.approx(-0.5, abs=1e-3)
    assert fitted["dK"] == pytest.approx(-0.5, abs=1e-3)
    text = out.read_text()
    assert "slope -0.500" in text          # annotation rendered as text
    assert "excluded" in text              # hollow series legend present


def test_plot_rates_panels_per_metric(tmp_path):
    out = tmp_path / "rates.svg"
    fitted = plot_rates(RATES, out)
    assert set(fitted) == {"dK", "dW"}
    assert out.exists() and out.stat().st_size > 0


def test_plot_rates_empty_metric_warns(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("experiment,n,metric,value,stderr,R,seed,flag\n"
                 "x,64,vhat_n,0.5,0,10,1,\n")
    out = tmp_path / "fig.svg"
    with warnings.catch_warnings(record=True) as got:
        warnings.simplefilter("always")
        fitted = plot_rates(p, out)
    assert fitted == {}
    assert any("no plottable" in str(w.message) for w in got)


def test_plot_rho_reference(tmp_path):
    out = tmp_path / "rho.svg"
    fitted = plot_rho(RHO, out, alpha_beta=2.25)
    assert fitted["rho"] == pytest.approx(-1.125, abs=1e-3)
    assert "reference slope -1.125" in out.read_text()


def test_figures_are_deterministic(tmp_path):
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    plot_rates(RATES, a)
    plot_rates(RATES, b)
    assert a.read_bytes() == b.read_bytes()


def test_cli_rates(tmp_path, capsys):
    out = tmp_path / "fig.svg"
    assert main(["rates", RATES, str(out)]) == 0
    assert "dW=-0.500" in capsys.readouterr().out


def test_cli_malformed_csv(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("nope\n")
    assert main(["rates", str(p), str(tmp_path / "f.svg")]) == 2
    assert "malformed" in capsys.readouterr().err


def test_cli_usage():
    assert main([]) == 1
