import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from beamtrain.channel import (
    LOS_PROFILE,
    NLOS_PROFILE,
    ChannelKind,
    ChannelProfile,
    Mpc,
    MultipathChannel,
    profile_by_name,
    render_channel,
    sample_angles,
    sample_channel,
    steering_vector,
)


def single(lam, wt, wr, m, n):
    return MultipathChannel((Mpc(lam, wt, wr),), m, n)


class TestSteeringVector:
    def test_broadside(self):
        np.testing.assert_allclose(steering_vector(0.0, 4), [0.5] * 4)

    def test_endfire(self):
        np.testing.assert_allclose(steering_vector(1.0, 2), [1 / np.sqrt(2), -1 / np.sqrt(2)],
                                   atol=1e-15)

    def test_half(self):
        np.testing.assert_allclose(steering_vector(0.5, 4), [0.5, 0.5j, -0.5, -0.5j],
                                   atol=1e-15)

    def test_rejects_zero_length(self):
        with pytest.raises(ValueError):
            steering_vector(0.1, 0)

    @settings(max_examples=60, deadline=None)
    @given(omega=st.floats(-1, 1), n=st.integers(1, 128))
    def test_unit_norm_constant_envelope(self, omega, n):
        g = steering_vector(omega, n)
        assert abs(np.linalg.norm(g) - 1) <= 1e-12
        assert np.max(np.abs(np.abs(g) - 1 / np.sqrt(n))) <= 1e-12

    def test_grid_orthogonality(self):
        n = 16
        grid = [2 * k / n - 1 for k in range(n)]
        for i, w1 in enumerate(grid):
            for w2 in grid[i + 1:]:
                inner = np.vdot(steering_vector(w1, n), steering_vector(w2, n))
                assert abs(inner) <= 1e-10

    def test_resolved_angles_are_nearly_orthogonal(self):
        # circular distance on the period-2 cosine axis, at least one null width
        n = 16
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 2000:
            w1, w2 = rng.uniform(-1, 1, 2)
            d = abs(w1 - w2)
            if min(d, 2 - d) < 2 / n:
                continue
            inner = np.vdot(steering_vector(w1, n), steering_vector(w2, n))
            assert abs(inner) <= 0.3
            checked += 1


class TestRender:
    def test_single_mpc_all_ones(self):
        np.testing.assert_allclose(render_channel(single(1, 0, 0, 2, 2)), np.ones((2, 2)),
                                   atol=1e-15)

    def test_zero_gain(self):
        np.testing.assert_array_equal(render_channel(single(0, 0.3, -0.2, 3, 4)),
                                      np.zeros((4, 3)))

    def test_shape_is_rx_by_tx(self):
        assert render_channel(single(1, 0.1, 0.2, 5, 3)).shape == (3, 5)

    def test_sum_of_paths(self):
        a, b = Mpc(0.3 - 0.1j, 0.2, -0.7), Mpc(-0.5j, -0.9, 0.4)
        both = render_channel(MultipathChannel((a, b), 6, 5))
        parts = render_channel(MultipathChannel((a,), 6, 5)) + \
            render_channel(MultipathChannel((b,), 6, 5))
        np.testing.assert_allclose(both, parts, atol=1e-14)

    def test_linear_in_gain(self):
        base = render_channel(single(1, 0.25, -0.6, 4, 7))
        c = 0.4 - 2.2j
        np.testing.assert_allclose(render_channel(single(c, 0.25, -0.6, 4, 7)), c * base,
                                   atol=1e-13)

    @settings(max_examples=40, deadline=None)
    @given(re=st.floats(-3, 3), im=st.floats(-3, 3), wt=st.floats(-1, 1),
           wr=st.floats(-1, 1), m=st.integers(1, 20), n=st.integers(1, 20))
    def test_frobenius_norm(self, re, im, wt, wr, m, n):
        lam = complex(re, im)
        h = render_channel(single(lam, wt, wr, m, n))
        assert np.linalg.norm(h) ** 2 == pytest.approx(n * m * abs(lam) ** 2, abs=1e-10,
                                                       rel=1e-12)


class TestTypes:
    def test_mpc_angle_range(self):
        with pytest.raises(ValueError):
            Mpc(1, 1.5, 0)

    def test_channel_needs_paths(self):
        with pytest.raises(ValueError):
            MultipathChannel((), 4, 4)

    def test_profile_must_be_normalized(self):
        with pytest.raises(ValueError):
            ChannelProfile("LOS", (0.7692, 0.0769, 0.0769, 0.0769))

    def test_builtin_profiles(self):
        assert LOS_PROFILE.powers[0] == 0.7692
        assert abs(math.fsum(LOS_PROFILE.powers) - 1) <= 1e-12
        assert LOS_PROFILE.powers[1:] == pytest.approx([0.0769] * 3, abs=1e-4)
        assert NLOS_PROFILE.powers == (0.25,) * 4
        assert profile_by_name("nlos") is NLOS_PROFILE
        with pytest.raises(ValueError):
            profile_by_name("urban")

    def test_json_round_trip(self):
        ch = sample_channel(NLOS_PROFILE, 8, 6, np.random.default_rng(5))
        text = json.dumps(ch.to_dict())
        back = MultipathChannel.from_dict(json.loads(text))
        assert back == ch
        np.testing.assert_array_equal(render_channel(back), render_channel(ch))
        assert set(ch.to_dict()["mpcs"][0]) == {"re", "im", "omega_t", "omega_r"}


class _FixedRng:
    def __init__(self, values):
        self.values = values

    def uniform(self, lo, hi, size):
        return np.array(self.values)


class TestSampling:
    def test_angle_zero(self):
        assert sample_angles(_FixedRng([0.0, 0.0])) == (1.0, 1.0)

    def test_angle_quarter_turn(self):
        wt, wr = sample_angles(_FixedRng([np.pi / 2, np.pi / 2]))
        assert wt == pytest.approx(0, abs=1e-15) and wr == pytest.approx(0, abs=1e-15)

    def test_arcsine_law(self):
        rng = np.random.default_rng(123)
        draws = np.array([sample_angles(rng)[0] for _ in range(100_000)])
        ks = stats.kstest(draws, lambda x: 0.5 + np.arcsin(np.clip(x, -1, 1)) / np.pi)
        assert ks.statistic < 0.01

    def test_los_first_path_power_exact(self):
        rng = np.random.default_rng(9)
        for _ in range(500):
            ch = sample_channel(LOS_PROFILE, 4, 4, rng)
            assert abs(ch.mpcs[0].lam) ** 2 == pytest.approx(0.7692, abs=1e-15)
            assert len(ch.mpcs) == 4

    def test_nlos_mean_power(self):
        rng = np.random.default_rng(10)
        tot = [sum(abs(p.lam) ** 2 for p in sample_channel(NLOS_PROFILE, 2, 2, rng).mpcs)
               for _ in range(100_000)]
        assert np.mean(tot) == pytest.approx(1.0, abs=0.02)

    def test_los_weak_paths_mean_power(self):
        rng = np.random.default_rng(12)
        weak = [sum(abs(p.lam) ** 2 for p in sample_channel(LOS_PROFILE, 2, 2, rng).mpcs[1:])
                for _ in range(100_000)]
        assert np.mean(weak) == pytest.approx(0.2307, abs=0.01)

    def test_reproducible(self):
        a = sample_channel(LOS_PROFILE, 8, 8, np.random.default_rng(1))
        b = sample_channel(LOS_PROFILE, 8, 8, np.random.default_rng(1))
        assert a == b

    def test_kind_enum(self):
        assert LOS_PROFILE.kind is ChannelKind.LOS
