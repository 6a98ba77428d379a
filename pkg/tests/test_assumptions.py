"""Certification checks: tail mass, boundary infimum, density bound, inclusions."""

from __future__ import annotations

import numpy as np
import pytest

from simplexwalk import assumptions as asm
from simplexwalk.chain import ConstantChoice, CustomChoice, LinearChoice, Piecewise1DChoice
from simplexwalk.distributions import BetaJump, PointMassJump, UniformJump
from simplexwalk.errors import DomainError, InvalidParameterError
from simplexwalk.rng import make_stream


class TestTail:
    def test_beta_closed_form(self):
        assert asm.check_tail(BetaJump(1.0, 2.0), 0.1) == pytest.approx(0.01, abs=1e-15)

    def test_uniform(self):
        assert asm.check_tail(UniformJump(), 0.1) == pytest.approx(0.1)

    def test_point_mass_fails(self):
        assert asm.check_tail(PointMassJump(0.5), 0.1) == 0.0

    def test_point_mass_near_one_passes(self):
        assert asm.check_tail(PointMassJump(0.95), 0.1) == 1.0

    def test_delta_validated(self):
        with pytest.raises(InvalidParameterError):
            asm.check_tail(UniformJump(), 1.5)


class TestChoiceInf:
    def test_constant_min_component(self):
        # smallest barycentric component is p_0 = 0.4 vs p_1 = p_2 = 0.3
        chk = asm.check_choice_inf(ConstantChoice((0.3, 0.3)), 0.05)
        assert chk.epsilon == pytest.approx(0.3, abs=1e-12)
        assert chk.exact and chk.certified and chk.modulus == 0.0

    def test_symmetric_linear_is_constant_half(self):
        chk = asm.check_choice_inf(LinearChoice((0.5, 0.5)), 0.1)
        assert chk.epsilon == pytest.approx(0.5, abs=1e-12)

    def test_linear_d2(self):
        chk = asm.check_choice_inf(LinearChoice((0.3, 0.3, 0.3)), 0.05)
        assert chk.epsilon > 0.0
        assert chk.certified
        # the slab anchors each p_k at its boundary value beta_k
        assert chk.epsilon == pytest.approx(0.3, abs=1e-12)

    def test_zero_probability_detected(self):
        chk = asm.check_choice_inf(ConstantChoice((0.0, 0.5)), 0.05)
        assert chk.epsilon == 0.0
        assert not chk.certified

    def test_piecewise_sampled_route(self):
        chk = asm.check_choice_inf(
            Piecewise1DChoice((0.5,), (0.2, 0.8)), 0.1, rng=make_stream(3)
        )
        # slabs sit at the two ends, where the pieces are flat: p_1 = 0.2 on
        # [0, 0.1] and p_0 = 0.2 on [0.9, 1]
        assert chk.epsilon == pytest.approx(0.2, abs=1e-12)
        assert not chk.exact
        assert chk.certified
        assert chk.note is not None

    def test_custom_reported_with_modulus(self):
        cc = CustomChoice(func=lambda z: 0.25 + 0.1 * np.sin(3.0 * z), d=2)
        chk = asm.check_choice_inf(cc, 0.05, rng=make_stream(9))
        assert chk.epsilon == pytest.approx(0.25, abs=5e-3)
        assert chk.modulus > 0.0
        assert chk.certified

    def test_subset_count_covers_all(self):
        chk = asm.check_choice_inf(ConstantChoice((0.2, 0.3, 0.4)), 0.01)
        # d=3: worst subset must be a singleton of the smallest probability,
        # which is p_0 = 0.1
        assert chk.worst.indices == (0,)
        assert chk.epsilon == pytest.approx(0.1, abs=1e-12)


class TestDensityLower:
    def test_uniform_unit_density(self):
        chk = asm.check_density_lower(UniformJump(), 2, 0.005, 0.3, 0.6)
        assert chk.c == pytest.approx(1.0 - 1e-6)
        assert chk.certified and not chk.vacuous

    def test_beta_monotone_minimum_at_right_end(self):
        chk = asm.check_density_lower(BetaJump(1.0, 2.0), 2, 0.005, 0.3, 0.6)
        x_max = max(0.6, 1.0 - 0.3)
        assert chk.c == pytest.approx(2.0 * (1.0 - x_max) * (1.0 - 1e-6), rel=1e-12)
        assert chk.argmin == pytest.approx(x_max)

    def test_degenerate_intervals_vacuous(self):
        chk = asm.check_density_lower(BetaJump(1.0, 2.0), 1, 0.05, 0.9, 0.2)
        assert chk.vacuous and chk.certified and chk.c is None
        assert chk.intervals == ()

    def test_point_mass_rejected(self):
        with pytest.raises(DomainError):
            asm.check_density_lower(PointMassJump(0.5), 1, 0.01, 0.3, 0.6)

    def test_zero_density_not_certified(self):
        # Beta(3,1) density 3x^2 vanishes only at 0; an interval reaching 0
        # (via a large delta) drives the certified bound to ~0
        chk = asm.check_density_lower(BetaJump(3.0, 1.0), 1, 0.29, 0.3, 0.6)
        assert chk.intervals[0][0] == pytest.approx(0.01)
        assert chk.c < 0.001


class TestInclusions:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_no_violations_at_reference_params(self, d):
        rep = asm.verify_inclusions(d, 0.005, 0.3, 0.6, 20_000, make_stream(11))
        assert rep.passed
        assert rep.worst_margin > 0.0
        assert [p.label for p in rep.parts] == ["a"] + [f"b:k={k}" for k in range(1, d + 1)]

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_shrunken_target_detected(self, d):
        rep = asm.verify_inclusions(
            d, 0.005, 0.3, 0.6, 20_000, make_stream(11), target_shrink=0.1
        )
        assert rep.violations > 0
        for part in rep.parts:
            assert part.violations > 0

    def test_inadmissible_rejected(self):
        with pytest.raises(InvalidParameterError):
            asm.verify_inclusions(2, 0.3, 0.3, 0.6, 100, make_stream(0))

    def test_report_dict_round(self):
        rep = asm.verify_inclusions(1, 0.005, 0.3, 0.6, 500, make_stream(2))
        d = rep.to_dict()
        assert d["passed"] is True
        assert len(d["parts"]) == 2


class TestCertify:
    def test_sethuraman_config_certifies(self):
        rep = asm.certify(BetaJump(1.0, 2.0), ConstantChoice((0.3, 0.3)), 0.01, 0.3, 0.6)
        assert rep.certified
        assert rep.eta == pytest.approx(1e-4, rel=1e-9)
        assert rep.epsilon == pytest.approx(0.3, abs=1e-12)
        assert rep.c is not None and rep.c > 0.0
        assert rep.witnesses == []

    def test_failure_produces_witness(self):
        rep = asm.certify(BetaJump(3.0, 1.0), ConstantChoice((0.0, 0.5)), 0.01, 0.3, 0.6)
        assert not rep.certified
        assert any(w["check"] == "choice_inf" for w in rep.witnesses)

    def test_point_mass_witnessed(self):
        rep = asm.certify(PointMassJump(0.5), ConstantChoice((0.5,)), 0.01, 0.3, 0.6)
        assert not rep.certified
        checks = {w["check"] for w in rep.witnesses}
        assert "tail" in checks and "density" in checks

    def test_inadmissible_params_witnessed(self):
        rep = asm.certify(UniformJump(), ConstantChoice((0.5,)), 0.3, 0.2, 0.6)
        assert not rep.admissible and not rep.certified

    def test_report_serializable(self):
        import json

        rep = asm.certify(BetaJump(1.0, 2.0), ConstantChoice((0.3, 0.3)), 0.01, 0.3, 0.6)
        text = json.dumps(rep.to_dict())
        assert '"eta"' in text

    def test_search_finds_params_for_sethuraman(self):
        rep = asm.search_admissible(BetaJump(1.0, 2.0), ConstantChoice((0.3, 0.3)))
        assert rep is not None and rep.certified
        p = rep.details["params"]
        from simplexwalk.geometry import admissible_params

        assert admissible_params(p["d"], p["delta"], p["s"], p["t"])
