import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from isomel.errors import DomainError, NumericError
from isomel.melnikov import PerturbationSpec, basis_for
from isomel.melnikov.basis import Ibar2, h
from isomel.zerolab import (
    bound_rows,
    bound_table,
    bounds_csv,
    cgp_realize,
    count_zeros,
    melnikov_zeros,
    realize_perturbation,
    witness_count,
    wronskian_chain,
)

Q = sp.sqrt(h * (4 + h))
LN = sp.log(1 + (h + Q) / 2)
T = sp.sqrt(-h)


class TestCountZeros:
    def test_simple_roots(self):
        rep = count_zeros(lambda x: (x - 0.2) * (x - 0.7), (0, 1))
        assert rep.count == 2
        assert rep.roots == pytest.approx([0.2, 0.7], abs=1e-13)

    def test_double_root_is_degenerate(self):
        rep = count_zeros(lambda x: (x - 0.3) ** 2, (0, 1), grid_size=101)
        assert rep.count == 0
        assert len(rep.degenerate) == 1 and rep.degenerate[0].root == pytest.approx(0.3)

    def test_triple_root_flagged(self):
        rep = count_zeros(lambda x: (x - 0.3) ** 3, (0, 1))
        assert rep.count == 0 and rep.degenerate

    def test_analytic_derivative(self):
        rep = count_zeros(math.sin, (1, 10), derivative=math.cos)
        assert rep.roots == pytest.approx([math.pi, 2 * math.pi, 3 * math.pi], abs=1e-13)

    def test_log_spacing(self):
        rep = count_zeros(lambda x: math.log(x) - 3, (1e-3, 1e3), spacing="log")
        assert rep.roots == pytest.approx([math.exp(3)], rel=1e-13)

    def test_errors(self):
        with pytest.raises(DomainError):
            count_zeros(math.sin, (1, 0))
        with pytest.raises(DomainError):
            count_zeros(math.sin, (0, 1), grid_size=10)
        with pytest.raises(NumericError):
            count_zeros(lambda x: math.nan if x > 0.5 else 1.0, (0, 1))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0.05, 0.95), min_size=1, max_size=4, unique=True))
    def test_counts_separated_roots(self, roots):
        roots = sorted(roots)
        if min(np.diff(roots), default=1) < 0.02:
            return
        rep = count_zeros(lambda x: np.prod([x - r for r in roots]), (0, 1), grid_size=512)
        assert rep.count == len(roots)


class TestMelnikovZeros:
    def test_s1_n0_zero(self):
        # M = (pi/4)(-a00 (alpha - beta) ...) reduces to a single zero at sqrt(5) - 2 for this choice
        pert, _ = realize_perturbation("S1", 0, [math.sqrt(5) - 2])
        rep = melnikov_zeros("S1", pert)
        assert rep.count == 1
        assert rep.roots[0] == pytest.approx(math.sqrt(5) - 2, abs=1e-9)
        assert rep.notes["tail_sign_constant"]

    def test_s2_n0_zero(self):
        pert, _ = realize_perturbation("S2", 0, [0.75])
        rep = melnikov_zeros("S2", pert)
        assert rep.count == 1 and rep.roots[0] == pytest.approx(0.75, abs=1e-9)

    def test_identically_zero(self):
        rep = melnikov_zeros("S3", PerturbationSpec.zero(1, "S3"))
        assert rep.count == 0 and rep.notes["identically_zero"]

    @pytest.mark.parametrize("center", ["S1", "S2", "S3", "S4"])
    def test_random_within_bound(self, center):
        rng = np.random.default_rng(7)
        for n in range(3):
            bound = bound_table(center, n).value
            for _ in range(5):
                rep = melnikov_zeros(center, PerturbationSpec.random(n, rng, center))
                assert rep.count <= bound


class TestBounds:
    @pytest.mark.parametrize(
        "center, n, piecewise, value, sharp",
        [
            ("S3", 2, True, 5, True),
            ("S4", 2, True, 7, True),
            ("S1", 0, True, 1, True),
            ("S1", 3, True, 6, True),
            ("S1", 5, True, 10, True),
            ("S2", 1, True, 2, True),
            ("S2", 4, True, 10, True),
            ("S3", 4, True, 10, True),
            ("S4", 4, True, 52, False),
            ("S4", 7, True, 130, False),
            ("S4", 6, True, 106, False),
            ("S1", 5, False, 3, True),
            ("S2", 1, False, 0, True),
            ("S3", 3, False, 3, True),
        ],
    )
    def test_values(self, center, n, piecewise, value, sharp):
        e = bound_table(center, n, piecewise)
        assert (e.value, e.sharp) == (value, sharp)

    def test_s4_smooth(self):
        assert bound_table("S4", 7, False).value == 15
        assert bound_table("S4", 0, False).value == 0
        assert bound_table("S4", 1, False).value == 1
        assert bound_table("S4", 3, False, smooth_s4_improved=False).value == 53

    def test_even_n_discrepancy_recorded(self):
        e = bound_table("S4", 8)
        assert e.value == 146 and e.notes["derived_value"] == 148
        assert "discrepancy" not in bound_table("S4", 7).notes

    def test_s3_sequence(self):
        assert [bound_table("S3", n).value for n in range(6)] == [1, 3, 5, 8, 10, 12]

    def test_errors(self):
        with pytest.raises(DomainError):
            bound_table("S1", -1)
        with pytest.raises(DomainError):
            bound_table("S9", 1)

    def test_csv(self):
        text = bounds_csv(bound_rows(ns=range(3)))
        lines = text.strip().splitlines()
        assert lines[0].startswith("center,n,")
        assert len(lines) == 13


@pytest.fixture(scope="module")
def s3_n3():
    fs = [h, h**2, h**3, h * (4 + h) * (2 + h) ** 2, Q, Q * (2 + h) ** 2, Q * (2 + h) ** 4, (2 + h) * LN]
    return wronskian_chain(fs, "S3")


class TestWronskian:
    def test_s3_n1(self):
        rep = wronskian_chain([h, h * (4 + h) * (2 + h), Q, Q * (2 + h) ** 2], "S3")
        assert rep.signs == [1, 1, 1, -1]
        assert all(e.certified for e in rep.entries)
        assert rep.classification == "ECT" and rep.zero_bound == 3
        assert rep.value(4, 1.0) == pytest.approx(-192 * 7 / 125, rel=1e-12)

    def test_s3_n1_printed_determinants(self):
        rep = wronskian_chain([h, h * (4 + h) * (2 + h), Q, Q * (2 + h) ** 2], "S3")
        for x in (0.3, 2.0, 11.0):
            q = math.sqrt(x * (4 + x))
            assert rep.value(2, x) == pytest.approx(2 * x**2 * (3 + x), rel=1e-12)
            assert rep.value(3, x) == pytest.approx(4 * (18 + 16 * x + 3 * x**2) * q / (4 + x) ** 2, rel=1e-12)
            assert rep.value(4, x) == pytest.approx(-192 * (6 + x) / (x * (4 + x) ** 3), rel=1e-12)

    def test_s3_n3_chain(self, s3_n3):
        verdicts = [e.verdict for e in s3_n3.entries]
        assert verdicts[:7] == ["positive"] * 5 + ["negative"] * 2
        assert verdicts[7] == "has 1 simple zero"
        assert s3_n3.classification == "last-one-zero" and s3_n3.zero_bound == 8
        log_factor = [f for f in s3_n3.entries[7].factors if f.kind == "log-linear"][0]
        assert log_factor.critical_points == pytest.approx([(3 * math.sqrt(2) - 4) / 2], abs=1e-8)

    def test_s3_n3_printed_w8(self, s3_n3):
        def y8(x):
            q = math.sqrt(x * (4 + x))
            alpha = (x + q) / 2
            num = 1057 + 30452 * x**2 + 47 * (20 * x - 7) ** 2 + 31164 * x**3 + 5334 * x**4 + 336 * x**5 + 88 * x**6 + 18 * x**7 + x**8
            den = q * ((1 - 2 * x) ** 2 + 11 * x**2 + 8 * x**3 + x**4)
            return 1680 * math.log(1 + alpha) - x * num / den

        for x in (0.5, 1.0, 3.0):
            q = math.sqrt(x * (4 + x))
            w8 = 4777574400 * (2 + x) ** 6 * ((1 - 2 * x) ** 2 + 11 * x**2 + 8 * x**3 + x**4) / (x**13 * (4 + x) ** 13 * q) * y8(x)
            assert s3_n3.value(8, x) == pytest.approx(w8, rel=1e-8)
        assert s3_n3.value(6, 1.0) == pytest.approx(-138240 * 3 * 141 / 5**7, rel=1e-12)
        assert s3_n3.value(5, 1.0) == pytest.approx(576 * 75 * math.sqrt(5) / 5**4, rel=1e-12)

    def test_y8_derivative_zero(self):
        # the sign-changing factor of the printed derivative vanishes at h*
        hs = (3 * math.sqrt(2) - 4) / 2
        assert -1 + 8 * hs + 2 * hs**2 == pytest.approx(0, abs=1e-14)

    @pytest.mark.slow
    def test_s3_n4_two_zeros(self):
        fs = [h, h**2, h**3, h * (4 + h) * (2 + h) ** 2, h * (4 + h) * (2 + h) ** 4]
        fs += [Q * (2 + h) ** (2 * i) for i in range(4)] + [(2 + h) * LN]
        rep = wronskian_chain(fs, "S3")
        assert all(e.zeros == 0 for e in rep.entries[:9])
        assert rep.entries[9].verdict == "has 2 simple zeros"
        crit = [f for f in rep.entries[9].factors if f.kind == "log-linear"][0].critical_points
        quartic = np.roots([5, 40, 65, -60, 3])
        positive = sorted(r.real for r in quartic if abs(r.imag) < 1e-12 and r.real > 0)
        assert crit == pytest.approx(positive, abs=1e-8)
        assert rep.value(5, 1.0) == pytest.approx(288 * 17, rel=1e-12)

    def test_s4_n0_pair(self):
        rep = wronskian_chain([sp.sqrt(1 + h), Ibar2(h)], "S4")
        assert rep.signs == [1, 1] and rep.classification == "ECT"
        assert any(f.kind == "ibar-linear" for f in rep.entries[1].factors)
        from isomel.specialfn import eval_barI

        for x in (-0.9, -0.5, -0.1):
            i0, i2 = eval_barI(x)
            assert rep.value(2, x) == pytest.approx(i0 * (3 * i2 / i0 - 1) / (4 * math.sqrt(1 + x)), rel=1e-10)

    def test_s4_n1_chain(self):
        fs = [sp.sqrt(1 + h), (2 + T) * sp.sqrt(1 - T), h * sp.sqrt(1 - T), 1 + h, Ibar2(h)]
        rep = wronskian_chain(fs, "S4")
        assert rep.signs == [1, -1, 1, 1, 1]
        assert rep.classification == "ECT" and rep.zero_bound == 4
        assert any(f.kind == "ibar-riccati" for f in rep.entries[4].factors)
        x = -0.3
        t = math.sqrt(-x)
        assert rep.value(2, x) == pytest.approx(-((1 - t) ** 1.5) / (4 * math.sqrt(1 + x)), rel=1e-12)
        w4 = 3 * (-7 + t) / (1024 * x * (1 + t) ** 2 * math.sqrt(-x * (1 + x)))
        assert rep.value(4, x) == pytest.approx(w4, rel=1e-12)

    @pytest.mark.parametrize("center, n, bound", [("S1", 1, 4), ("S1", 2, 5), ("S2", 1, 2), ("S3", 2, 5), ("S4", 0, 1)])
    def test_basis_chains(self, center, n, bound):
        rep = wronskian_chain(basis_for(center, n), center)
        assert rep.classification == "ECT" and rep.zero_bound == bound

    def test_subinterval_and_errors(self):
        rep = wronskian_chain([h, Q], "S1", iv=(0.5, 3.0))
        assert rep.classification == "ECT"
        with pytest.raises(DomainError):
            wronskian_chain([h], None)
        with pytest.raises(DomainError):
            wronskian_chain([sp.sqrt(h)], "S1")

    def test_identically_zero(self):
        rep = wronskian_chain([h, 2 * h], "S1")
        assert rep.entries[1].verdict == "identically zero"
        assert rep.classification == "inconclusive"


class TestRealize:
    def test_two_functions(self):
        real = cgp_realize([1 - h, sp.sqrt(1 - h)], (0, 1), [0.75])
        c = real.coefficients / real.coefficients[0]
        assert c == pytest.approx([1, -0.5], abs=1e-12)
        assert real.ok

    def test_single_function(self):
        real = cgp_realize([h * (4 + h)], (0, 10), [])
        assert real.coefficients.tolist() == [1.0]
        assert count_zeros(lambda x: x * (4 + x), (0.01, 10)).count == 0

    def test_s2_n2_six_changes(self):
        rng = np.random.default_rng(3)
        targets = sorted(rng.uniform(0.05, 0.95, 6))
        basis = basis_for("S2", 2)
        real = cgp_realize(basis, (0, 1), targets)
        assert real.ok and len(real.sign_changes) == 6
        f = sp.lambdify(h, sum(c * b.expr for c, b in zip(real.coefficients, basis)))
        assert count_zeros(f, (0.01, 0.99), grid_size=2000).count >= 6

    def test_rank_defect(self):
        with pytest.raises(NumericError) as err:
            cgp_realize([h, 2 * h, 3 * h], (0, 1), [0.3, 0.6])
        assert err.value.diagnostics["rank"] == 1

    def test_target_errors(self):
        with pytest.raises(DomainError):
            cgp_realize([h, h**2], (0, 1), [1.5])
        with pytest.raises(DomainError):
            cgp_realize([h, h**2], (0, 1), [0.5, 0.5])
        with pytest.raises(DomainError):
            cgp_realize([h, h**2, h**3], (0, 1), [0.5])

    @pytest.mark.parametrize(
        "center, n, sharp",
        [("S1", 0, 1), ("S2", 0, 1), ("S2", 1, 2), ("S2", 2, 6), ("S3", 0, 1), ("S3", 1, 3), ("S3", 2, 5), ("S4", 0, 1), ("S4", 1, 4)],
    )
    def test_perturbation_witness(self, center, n, sharp):
        assert sharp == bound_table(center, n).value
        count, pert = witness_count(center, n)
        assert count == sharp
        assert pert.n == n

    def test_smooth_witness(self):
        pert, real = realize_perturbation("S3", 1, [0.5], piecewise=False)
        assert pert.is_smooth()
        assert melnikov_zeros("S3", pert).count == 1
