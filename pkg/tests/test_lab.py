import csv
import math

import pytest

from hyplattice.errors import DegenerateFit, EmptyGrid, ParseError, UnsupportedField, ValidationError
from hyplattice.field import FieldSpec
from hyplattice.lab import (CSV_HEADER, CountReport, ExperimentConfig, covolume,
                            covolume_from_lseries, covolume_modular_integral, fit_error_exponent,
                            format_config, kronecker, parse_config, parse_config_text,
                            predicted_exponent, run_count_experiment, write_config, write_csv)
from hyplattice.orbit import naive_oracle
from hyplattice.geometry import u_from_dist


def test_covolume_modular(Z):
    assert covolume(Z) == pytest.approx(math.pi / 3)
    assert covolume_modular_integral() == pytest.approx(math.pi / 3, rel=1e-8)


@pytest.mark.parametrize("m", [2, 3, 5, 13])
def test_covolume_quadratic_matches_lseries(m):
    vol = covolume(FieldSpec.quadratic(m))
    assert vol > 0
    assert vol == pytest.approx(covolume_from_lseries(m), rel=1e-10)


def test_covolume_m5_value():
    assert covolume(FieldSpec.quadratic(5)) == pytest.approx(4 * math.pi ** 2 / 15, rel=1e-14)


def test_kronecker_symbol():
    assert [kronecker(5, n) for n in range(1, 6)] == [1, -1, -1, 1, 0]
    assert [kronecker(8, n) for n in range(1, 9)] == [1, 0, -1, 0, -1, 0, 1, 0]
    assert [kronecker(12, n) for n in (1, 5, 7, 11)] == [1, -1, -1, 1]


def test_covolume_unsupported():
    with pytest.raises(UnsupportedField):
        covolume(FieldSpec.quadratic(94))


def test_hypercube_experiment_matches_oracle(Z):
    cfg = ExperimentConfig(kind="hypercube", grid=(1.0, 2.0, 1.0))
    reps = run_count_experiment(cfg)
    assert [r.T for r in reps] == [1.0, 2.0]
    for r in reps:
        oracle = naive_oracle((1j,), (u_from_dist(r.T),), 3, Z)
        assert r.count == len(oracle)
        assert r.excess == pytest.approx(r.count - r.main_term)
        assert r.ratio == pytest.approx(r.count / (3 * math.exp(r.T)))


def test_empty_grid():
    with pytest.raises(EmptyGrid):
        run_count_experiment(ExperimentConfig(grid=(3.0, 2.0, 0.5)))
    with pytest.raises(EmptyGrid):
        run_count_experiment(ExperimentConfig(grid=(1.0, 2.0, 0.0)))


def test_strip_annotation():
    cfg = ExperimentConfig(group_kind="hilbert", m=5, z=((0, 1), (0, 1)), kind="strip",
                           grid=(2.0, 3.0, 1.0), strip_E=(2,), strip_A=(0.0,), strip_B=(1.0,))
    pred = predicted_exponent(cfg, 2)
    assert (pred.e, pred.q) == (1, 1)
    assert pred.exponent == pytest.approx(3 / 4)
    reps = run_count_experiment(cfg)
    assert reps[-1].main_term == pytest.approx(7.5 * (math.cosh(1) - 1) * math.exp(3.0))


def test_predicted_exponents():
    cfg = ExperimentConfig(kind="hypercube")
    assert predicted_exponent(cfg, 1).exponent == pytest.approx(2 / 3)
    cfg = ExperimentConfig(kind="hypercube", tau_hat=0.4)
    assert predicted_exponent(cfg, 2).exponent == pytest.approx((4 + 2 * 0.4) / 3)
    assert predicted_exponent(cfg, 2).regime == "small-gap"


def test_q_hat_validation():
    cfg = ExperimentConfig(group_kind="hilbert", m=5, z=((0, 1), (0, 1)), q_hat=1.0)
    with pytest.raises(ValidationError):
        cfg.validate()


def test_box_modes():
    for mode in ("zero", "half"):
        cfg = ExperimentConfig(kind="box", box_mode=mode, grid=(4.0, 6.0, 1.0))
        reps = run_count_experiment(cfg)
        assert all(0.7 < r.ratio < 1.3 for r in reps)


def _synthetic(excess):
    return [CountReport(T=t, count=0, main_term=0.0, ratio=0.0, excess=e, n_of_z=1.0,
                        near_boundary=0, wall_s=0.0) for t, e in excess]


def test_fit_exact_exponential():
    f = fit_error_exponent(_synthetic([(t, math.exp(0.5 * t)) for t in range(2, 8)]))
    assert f.slope == pytest.approx(0.5, abs=1e-6)
    f = fit_error_exponent(_synthetic([(t, 7 * math.exp(0.5 * t)) for t in range(2, 8)]))
    assert f.slope == pytest.approx(0.5, abs=1e-6)
    assert f.intercept == pytest.approx(math.log(7), abs=1e-6)
    assert f.r2 == pytest.approx(1)
    assert not f.sign_changes


def test_fit_alternating_signs():
    f = fit_error_exponent(_synthetic([(t, (-1) ** t * math.exp(0.5 * t)) for t in range(2, 8)]))
    assert f.slope == pytest.approx(0.5, abs=1e-6)
    assert f.sign_changes


def test_fit_degenerate():
    with pytest.raises(DegenerateFit):
        fit_error_exponent(_synthetic([(t, 0.0) for t in range(6)]))
    with pytest.raises(DegenerateFit):
        fit_error_exponent(_synthetic([(1, 1.0), (2, 2.0)]))


def canonical_config():
    return ExperimentConfig(group_kind="hilbert", m=5, z=((0.25, 1.5), (-0.125, 0.75)),
                            kind="strip", grid=(2.0, 4.0, 0.5), box_mode="half",
                            strip_E=(2,), strip_A=(0.0,), strip_B=(1.0,), q_hat=1.0,
                            tau_hat=0.1, out_path="/tmp/out.csv", threads=2)


def test_config_round_trip(tmp_path):
    cfg = canonical_config()
    p = tmp_path / "exp.cfg"
    write_config(cfg, p)
    assert parse_config(p) == cfg
    assert parse_config_text(format_config(ExperimentConfig())) == ExperimentConfig()


def test_config_errors():
    with pytest.raises(ParseError, match="group.kind"):
        parse_config_text("z.0.x = 0\nz.0.y = 1\n")
    with pytest.raises(ParseError, match="line 2"):
        parse_config_text("group.kind = modular\nbogus.key = 1\n")
    with pytest.raises(ParseError, match="line 2"):
        parse_config_text("group.kind = modular\nthreads = many\n")
    with pytest.raises(ParseError, match="line 1"):
        parse_config_text("group.kind modular\n")
    with pytest.raises(ParseError, match="grid.step"):
        parse_config_text("group.kind = modular\ngrid.min = 1\ngrid.max = 2\n")
    with pytest.raises(ParseError, match="duplicate"):
        parse_config_text("group.kind = modular\ngroup.kind = hilbert\n")


def test_csv_output(tmp_path):
    cfg = ExperimentConfig(kind="hypercube", grid=(2.0, 4.0, 0.5))
    reps = run_count_experiment(cfg)
    p = tmp_path / "out.csv"
    write_csv(reps, p)
    text = p.read_text()
    assert text.splitlines()[0] == "T,count,main_term,ratio,excess,n_of_z,near_boundary,wall_s"
    rows = list(csv.reader(text.splitlines()))
    assert rows[0] == CSV_HEADER
    assert len(rows) - 1 == len(cfg.grid_values()) == 5


def _strip_wall(text):
    return [",".join(line.split(",")[:-1]) for line in text.splitlines()]


@pytest.mark.parametrize("kind", ["hypercube", "strip"])
def test_determinism_across_threads(tmp_path, kind):
    outs = []
    for threads in (1, 2, 8):
        if kind == "hypercube":
            cfg = ExperimentConfig(kind="hypercube", z=((0.1, 1.3),), grid=(3.0, 7.0, 1.0),
                                   threads=threads)
        else:
            cfg = ExperimentConfig(group_kind="hilbert", m=5, z=((0, 1), (0, 1)), kind="strip",
                                   grid=(3.0, 5.0, 1.0), strip_E=(2,), strip_A=(0.0,),
                                   strip_B=(1.0,), threads=threads)
        p = tmp_path / f"{kind}{threads}.csv"
        write_csv(run_count_experiment(cfg), p)
        outs.append(_strip_wall(p.read_text()))
    assert outs[0] == outs[1] == outs[2]
