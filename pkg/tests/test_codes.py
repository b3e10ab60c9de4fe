import numpy as np
import pytest

from sttc_microsim.channel import sample_rayleigh_channel
from sttc_microsim.codes import (
    POWER_SCALE,
    GeneratorMatrix,
    bit_error_rate,
    brute_force_ml_decode,
    build_trellis,
    encode,
    expected_observations,
    qpsk_map,
    random_generator_matrix,
    viterbi_decode,
)

TAROKH = GeneratorMatrix.from_text("[0 0 2 1; 2 1 0 0]")
ZERO = GeneratorMatrix(((0, 0),) * 4)


def faded_signal(g, h, frame):
    x = encode(g, frame)
    return (h.h1 * x[0] + h.h2 * x[1]) * POWER_SCALE


def symbol_indices(stream):
    from sttc_microsim.codes import QPSK

    return [int(np.argmin(np.abs(QPSK - v))) for v in stream]


class TestGeneratorMatrix:
    def test_parse_transposed_text(self):
        assert TAROKH.entries == ((0, 2), (0, 1), (2, 0), (1, 0))

    def test_text_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            g = random_generator_matrix(rng)
            assert GeneratorMatrix.from_text(g.to_text()) == g

    def test_parse_accepts_commas(self):
        assert GeneratorMatrix.from_text("[0, 0, 2, 1; 2, 1, 0, 0]") == TAROKH

    @pytest.mark.parametrize(
        "text",
        ["[0 0 2 1]", "[0 0 2; 2 1 0]", "[0 0 2 x; 2 1 0 0]", "[0 0 2 4; 2 1 0 0]"],
    )
    def test_parse_rejects_malformed(self, text):
        with pytest.raises(ValueError):
            GeneratorMatrix.from_text(text)

    def test_flat_is_row_major(self):
        assert TAROKH.flat() == (0, 2, 0, 1, 2, 0, 1, 0)

    def test_entries_validated(self):
        with pytest.raises(ValueError):
            GeneratorMatrix(((0, 4), (0, 0), (0, 0), (0, 0)))
        with pytest.raises(ValueError):
            GeneratorMatrix(((0, 0), (0, 0), (0, 0)))


class TestTrellis:
    def test_hand_traced_branches(self):
        t = build_trellis(TAROKH)
        # state 0, input (0,1): next state 1, outputs (0, 1)
        assert t.next_state[0, 1] == 1
        assert tuple(t.output_symbols[0, 1]) == (0, 1)
        # state 3 (b1'=1, b2'=1), input (0,0): next state 0, outputs (3, 0)
        assert t.next_state[3, 0] == 0
        assert tuple(t.output_symbols[3, 0]) == (3, 0)

    def test_zero_matrix_outputs_zero(self):
        t = build_trellis(ZERO)
        assert np.all(t.output_symbols == 0)

    def test_branch_count_and_memory_one(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            t = build_trellis(random_generator_matrix(rng))
            assert t.next_state.shape == (4, 4)
            assert t.output_symbols.shape == (4, 4, 2)
            for state in range(4):
                for m in range(4):
                    assert t.next_state[state, m] == m

    def test_outputs_match_tap_formula(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            g = random_generator_matrix(rng)
            t = build_trellis(g)
            for state in range(4):
                for m in range(4):
                    bits = [m >> 1, m & 1, state >> 1, state & 1]
                    for ant in range(2):
                        want = sum(g.entries[k][ant] * bits[k] for k in range(4)) % 4
                        assert t.output_symbols[state, m, ant] == want


class TestQpskMap:
    @pytest.mark.parametrize("s,point", [(0, 1 + 0j), (1, 1j), (2, -1 + 0j), (3, -1j)])
    def test_constellation(self, s, point):
        assert qpsk_map(s) == point
        assert abs(qpsk_map(s)) == 1.0

    @pytest.mark.parametrize("s", [-1, 4, 7])
    def test_out_of_range(self, s):
        with pytest.raises(ValueError):
            qpsk_map(s)


class TestEncode:
    def test_elementary_frame_is_delay_diversity(self):
        x = encode(TAROKH, [0, 0, 0, 0, 0, 1, 1, 0, 1, 1, 0, 0])
        assert symbol_indices(x[0]) == [0, 0, 0, 1, 2, 3]
        assert symbol_indices(x[1]) == [0, 0, 1, 2, 3, 0]

    def test_all_zero_frame(self):
        rng = np.random.default_rng(3)
        g = random_generator_matrix(rng)
        x = encode(g, [0] * 10)
        assert np.allclose(x, qpsk_map(0))

    def test_single_pair_from_state_zero(self):
        x = encode(TAROKH, [1, 1])
        assert symbol_indices(x[1]) == [3]
        assert symbol_indices(x[0]) == [0]

    def test_length_preserving(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            g = random_generator_matrix(rng)
            n = int(rng.integers(1, 30)) * 2
            frame = rng.integers(0, 2, n)
            assert encode(g, frame).shape == (2, n // 2)

    @pytest.mark.parametrize("frame", [[], [1], [0, 1, 1], [0, 2]])
    def test_bad_frames(self, frame):
        with pytest.raises(ValueError):
            encode(TAROKH, frame)


class TestViterbi:
    def test_noiseless_round_trip_terminated_frames(self):
        # Frames carry the simulator's zero bit-pair termination; the
        # appended pair is not error-counted.
        rng = np.random.default_rng(9)
        for _ in range(100):
            g = random_generator_matrix(rng)
            h = sample_rayleigh_channel(rng)
            frame = rng.integers(0, 2, 40)
            y = faded_signal(g, h, np.concatenate([frame, [0, 0]]))
            decoded = viterbi_decode(build_trellis(g), y, h)[:40]
            assert bit_error_rate(frame, decoded) == 0.0

    def test_matches_brute_force_metric(self):
        from sttc_microsim.channel import SnrPoint, transmit

        rng = np.random.default_rng(10)
        for i in range(20):
            g = random_generator_matrix(rng)
            h = sample_rayleigh_channel(rng)
            t = build_trellis(g)
            frame = rng.integers(0, 2, 12)
            sp = SnrPoint.from_db([0.0, 10.0, 20.0][i % 3])
            y, _ = transmit(encode(g, frame), h, sp, rng)
            _, vm = viterbi_decode(t, y, h, return_metric=True)
            _, bm = brute_force_ml_decode(t, y, h, return_metric=True)
            assert vm == pytest.approx(bm, rel=1e-12)

    def test_single_symbol_period(self):
        from sttc_microsim.channel import ChannelMatrix

        # Antenna 1 must carry the current symbol for a one-period
        # observation through h = (1, 0) to be decodable.
        g = GeneratorMatrix.from_text("[2 1 0 0; 0 0 0 0]")
        h = ChannelMatrix(1 + 0j, 0j)
        for pair in ([0, 0], [0, 1], [1, 0], [1, 1]):
            y = faded_signal(g, h, pair)
            assert list(viterbi_decode(build_trellis(g), y, h)) == pair

    def test_degenerate_code_ties_at_metric_level(self):
        # Current and memory taps of this matrix annihilate the (+1, +1)
        # bit-pair difference mod 4, so distinct inputs share one output
        # stream; only metric-level optimality is decidable.
        g = GeneratorMatrix(((1, 2), (3, 2), (1, 2), (3, 2)))
        assert np.allclose(encode(g, [0, 0, 0, 0]), encode(g, [1, 1, 0, 0]))
        rng = np.random.default_rng(11)
        h = sample_rayleigh_channel(rng)
        t = build_trellis(g)
        y = faded_signal(g, h, [1, 1, 0, 0])
        decoded, metric = viterbi_decode(t, y, h, return_metric=True)
        assert metric == pytest.approx(0.0, abs=1e-18)
        assert np.allclose(faded_signal(g, h, decoded), y)

    def test_empty_input_rejected(self):
        t = build_trellis(TAROKH)
        with pytest.raises(ValueError):
            viterbi_decode(t, [], (1 + 0j, 0j))


class TestBruteForce:
    def test_noiseless_recovers_frame(self):
        rng = np.random.default_rng(12)
        g = random_generator_matrix(rng)
        h = sample_rayleigh_channel(rng)
        frame = rng.integers(0, 2, 12)
        y = faded_signal(g, h, frame)
        decoded, metric = brute_force_ml_decode(build_trellis(g), y, h, return_metric=True)
        assert metric == pytest.approx(0.0, abs=1e-18)
        np.testing.assert_array_equal(decoded, frame)

    def test_two_bit_frame_enumerates_four_candidates(self):
        from sttc_microsim.channel import ChannelMatrix

        h = ChannelMatrix(0.7 + 0.2j, -0.4 + 1.1j)
        t = build_trellis(TAROKH)
        rng = np.random.default_rng(13)
        y = rng.standard_normal(1) + 1j * rng.standard_normal(1)
        decoded, metric = brute_force_ml_decode(t, y, h, return_metric=True)
        best = min(
            np.abs(y[0] - faded_signal(TAROKH, h, [b1, b2])[0]) ** 2
            for b1 in (0, 1)
            for b2 in (0, 1)
        )
        assert metric == pytest.approx(float(best), rel=1e-12)

    def test_frame_length_capped(self):
        t = build_trellis(TAROKH)
        with pytest.raises(ValueError):
            brute_force_ml_decode(t, np.ones(9, dtype=complex), (1 + 0j, 0j))


class TestBitErrorRate:
    def test_examples(self):
        ones = np.ones(12, dtype=int)
        zeros = np.zeros(12, dtype=int)
        assert bit_error_rate(ones, ones) == 0.0
        assert bit_error_rate(ones, zeros) == 1.0
        three_off = ones.copy()
        three_off[:3] = 0
        assert bit_error_rate(ones, three_off) == pytest.approx(0.25)

    def test_symmetric_and_zero_iff_equal(self):
        rng = np.random.default_rng(14)
        for _ in range(50):
            a = rng.integers(0, 2, 16)
            b = rng.integers(0, 2, 16)
            assert bit_error_rate(a, b) == bit_error_rate(b, a)
            assert (bit_error_rate(a, b) == 0.0) == bool(np.array_equal(a, b))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            bit_error_rate([0, 1], [0, 1, 0])


class TestRandomGeneratorMatrix:
    def test_reproducible(self):
        a = random_generator_matrix(np.random.default_rng(5))
        b = random_generator_matrix(np.random.default_rng(5))
        assert a == b

    def test_distinct_seeds_distinct_matrices(self):
        a = random_generator_matrix(np.random.default_rng(6))
        b = random_generator_matrix(np.random.default_rng(7))
        assert a != b

    def test_entry_frequencies_uniform(self):
        rng = np.random.default_rng(8)
        counts = np.zeros(4)
        draws = 10_000
        for _ in range(draws):
            for e in random_generator_matrix(rng).flat():
                counts[e] += 1
        n = draws * 8
        sigma = np.sqrt(n * 0.25 * 0.75)
        assert np.all(np.abs(counts - 0.25 * n) < 3 * sigma)


def test_expected_observations_include_power_scale():
    from sttc_microsim.channel import ChannelMatrix

    h = ChannelMatrix(1 + 1j, 2 - 1j)
    t = build_trellis(TAROKH)
    e = expected_observations(t, h)
    s1, s2 = t.output_symbols[2, 3]
    want = (h.h1 * qpsk_map(int(s1)) + h.h2 * qpsk_map(int(s2))) * POWER_SCALE
    assert e[2, 3] == pytest.approx(want)
