"""Smoke tests for the python bindings: each main operation runs end to end
with a value checked against the C++ test suite."""

import math
import os

import pytest

import innerlab as il

TWO_PI = il.TWO_PI


def test_arcs_and_unions():
    arc = il.Arc(0.0, 0.1)
    assert arc.contains(0.1)
    assert not arc.contains(0.11)
    union = il.ArcUnion([il.Arc(0.5, 0.15), il.Arc(3.0, 0.25)])
    assert union.measure() == pytest.approx(0.8, abs=1e-12)
    assert union.unite(union.complement()).measure() == pytest.approx(TWO_PI, abs=1e-12)
    assert union.intersect(union.complement()).measure() == pytest.approx(0.0, abs=1e-12)


def test_harmonic_measure_matches_frozen_oracle():
    assert il.harmonic_measure(0j, il.Arc(1.0, 0.37)) == pytest.approx(
        0.74 / TWO_PI, abs=1e-13
    )
    assert il.harmonic_measure(0.5 + 0j, il.Arc(0.0, 0.2)) == pytest.approx(
        0.18613339654267726, abs=1e-12
    )
    with pytest.raises(ValueError):
        il.harmonic_measure(1.2 + 0j, il.Arc(0.0, 0.2))


def test_blaschke_maps_and_preimages():
    b = il.FiniteBlaschke.centered_degree2(0.5)
    assert b.eval(1 + 0j) == pytest.approx(1 + 0j)
    assert b.eval(-1 + 0j) == pytest.approx(1 + 0j)
    assert b.derivative(0j) == pytest.approx(0.5 + 0j)
    assert b.boundary_derivative(0.0) == pytest.approx(4.0 / 3.0, abs=1e-12)

    pre = b.arc_preimage(il.Arc(0.0, 0.05))
    assert len(pre) == 2
    assert pre.measure() == pytest.approx(0.1, abs=1e-9)
    assert pre.contains(0.0) and pre.contains(math.pi)

    f = il.FiniteBlaschke(1.0, [-1 / 3, -1 / 3])
    assert f.eval(0j).real == pytest.approx(1 / 9)
    fg = il.compose(f, b)
    assert fg.degree == 4
    z = 0.3 + 0.2j
    assert fg.eval(z) == pytest.approx(f.eval(b.eval(z)), abs=1e-10)


def test_composition_state_and_normalization():
    f = il.FiniteBlaschke(1.0, [-1 / 3, -1 / 3])
    seq = il.InnerMapSequence.autonomous(f)
    state = il.advance(il.CompositionState.initial(), seq, 2)
    assert state.orbit[1].real == pytest.approx(1 / 9)
    assert state.orbit[2].real == pytest.approx(9 / 49)
    assert state.lambdas[0] == pytest.approx(0.6, abs=1e-12)

    norm = il.normalize(seq, state)
    g1 = norm.normalized.at(1)
    assert abs(g1.eval(0j)) < 1e-12
    assert abs(g1.derivative(0j)) == pytest.approx(0.6, abs=1e-10)

    report = il.contraction_report(state)
    assert report.mu_sum > 0


def test_block_partition_values():
    part = il.block_partition([0.3] * 10, blocks=2)
    assert part.ns == [4, 7]
    part2 = il.block_partition([0.5] * 12, blocks=3)
    assert part2.ns == [2, 4, 6]


def test_example_systems_and_statistics():
    sys_b = il.fixed_target_system(
        il.FiniteBlaschke.centered_degree2(0.5), il.Arc(1.0, 0.25)
    )
    est1 = il.hit_measure(sys_b, 1, 30, 2000, seed=7, threads=1)
    est4 = il.hit_measure(sys_b, 1, 30, 2000, seed=7, threads=4)
    assert est1.fraction == est4.fraction  # counter-based rng, thread-independent
    assert est1.ci_low <= est1.fraction <= est1.ci_high

    exact = il.exact_hit_union(sys_b, 1, 8)
    est = il.hit_measure(sys_b, 1, 8, 100000, seed=3)
    p = exact.measure() / TWO_PI
    assert abs(est.fraction - p) <= 3 * math.sqrt(p * (1 - p) / 100000)

    rot = il.ex_rotations(50)
    stats = il.hit_count(rot, [1.0, 4.71238898038469], [50 * 51 // 2])
    assert stats.counts[0][0] >= 45  # theta = 1.0 hits once per stage
    assert stats.counts[1][0] == 0  # 3*pi/2 never hits

    nested = il.ex_nested_blaschke()
    assert nested.mu_at(1000) == pytest.approx(il.default_family_term(1000))
    assert il.default_family_epsilon(1000) == pytest.approx(0.29411912337442766, abs=1e-6)

    par = il.ex_parabolic()
    assert par.target is None
    orbit = il.boundary_orbit(par.maps, 1.0, 10)
    assert len(orbit) == 10


def test_mobius_for_arc_identity():
    for length in (0.3, 1.0, 2.5, math.pi):
        a = il.mobius_for_arc(length)
        assert math.sin(length / 2) * (1 + a * a) == pytest.approx(1 - a * a, abs=1e-12)
    with pytest.raises(ValueError):
        il.mobius_for_arc(0.0)


def test_run_config_and_presets(tmp_path):
    assert "ex-parabolic" in il.preset_names()
    assert "theorem-c" in il.list_presets()

    cfg = tmp_path / "small.cfg"
    cfg.write_text(
        "preset = theorem-c\n"
        "horizon = 1500\n"
        "samples = 20\n"
        "assert_ratio_min = 0.4\n"
        "assert_ratio_max = 1.6\n"
    )
    outcome = il.run_config(str(cfg), out_dir=str(tmp_path / "out"))
    assert outcome.exit_code == 0
    assert os.path.exists(outcome.manifest_path)
    assert any(c.name == "mean-count-ratio" and c.passed for c in outcome.criteria)

    bad = tmp_path / "bad.cfg"
    bad.write_text("preset = theorem-c\nsampels = 3\n")
    with pytest.raises(ValueError, match="sampels"):
        il.run_config(str(bad))
