import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import cocyclelab as cl
from cocyclelab.errors import (
    CapacityError,
    DomainError,
    InvalidProgramError,
    MarkerNotFoundError,
)

from conftest import naive_occurrences, word

A2 = cl.Alphabet(2)


# --- sources ----------------------------------------------------------------


def test_thue_morse_prefix():
    src = cl.SubstitutionSource({0: "01", 1: "10"}, 0, A2)
    assert src.prefix(8).to_text() == "01101001"


def test_periodic_prefix():
    src = cl.PeriodicSource("01", A2)
    assert src.prefix(5).to_text() == "01010"


def test_bernoulli_replay_determinism():
    a = cl.BernoulliSource([0.5, 0.5], seed=42)
    b = cl.BernoulliSource([0.5, 0.5], seed=42)
    assert a.prefix(10) == b.prefix(10)
    assert a.prefix(10) == a.prefix(10)


def test_prefix_consistency_across_lengths():
    # emitting 2n then truncating equals emitting n, for every source kind
    sources = [
        cl.SubstitutionSource({0: "01", 1: "10"}, 0, A2),
        cl.PeriodicSource("011", A2),
        cl.BernoulliSource([0.3, 0.7], seed=5),
        cl.MarkovSource([[0.9, 0.1], [0.4, 0.6]], [0.5, 0.5], seed=5),
        cl.SquarefreeSource(capacity=4096),
    ]
    for src in sources:
        long = src.prefix(2 * 600)
        fresh = type(src)(**_rebuild_kwargs(src))
        assert fresh.prefix(600) == long[:600]


def _rebuild_kwargs(src):
    d = src.describe()
    if d["kind"] == "substitution":
        return dict(rules={int(k): v for k, v in d["rules"].items()},
                    seed_letter=d["seed_letter"], alphabet=cl.Alphabet(d["alphabet"]))
    if d["kind"] == "periodic":
        return dict(cycle=d["cycle"], alphabet=cl.Alphabet(d["alphabet"]))
    if d["kind"] == "bernoulli":
        return dict(probabilities=d["probabilities"], seed=d["seed"])
    if d["kind"] == "markov":
        return dict(transition=d["transition"], initial=d["initial"], seed=d["seed"])
    if d["kind"] == "squarefree":
        return dict(capacity=d["capacity"])
    raise AssertionError(d["kind"])


def test_markov_rows_must_be_stochastic():
    with pytest.raises(DomainError):
        cl.MarkovSource([[0.5, 0.4], [0.5, 0.5]], [0.5, 0.5], seed=1)


def test_substitution_fixed_point_requirements():
    with pytest.raises(InvalidProgramError):
        cl.SubstitutionSource({0: "10", 1: "01"}, 0, A2)  # image doesn't start with seed
    with pytest.raises(InvalidProgramError):
        cl.SubstitutionSource({0: "01", 1: ""}, 0, A2)  # erasing


def _is_squarefree(n: int) -> bool:
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def test_squarefree_values_and_capacity():
    src = cl.SquarefreeSource(capacity=500)
    got = src.prefix(200).symbols
    expect = np.array([1 if _is_squarefree(k) else 0 for k in range(1, 201)], dtype=np.uint8)
    assert np.array_equal(got, expect)
    with pytest.raises(CapacityError) as err:
        src.prefix(501)
    assert err.value.required == 501


# --- block schedules --------------------------------------------------------


def _nolimit_program(schedule):
    base = cl.PeriodicSource("01", A2)
    return cl.words.prefix_doubling_program(base, schedule, head=(3,), type2_suffix=2,
                                            alphabet_size=4)


def test_prefix_doubling_block_matches_hand_expansion():
    program = _nolimit_program(cl.EpochSchedule(kind="tower"))
    # index 2 sits in the first (type-1) epoch; with base (01)^inf the block
    # is the doubled two-letter prefix.
    assert cl.EpochSchedule(kind="tower").block_type(2) == 1
    np.testing.assert_array_equal(program.block_fn(2), [0, 1, 0, 1])
    assert cl.block_schedule_prefix(program, 1).to_text() == "3"


def test_block_schedule_total_length_recurrence():
    schedule = cl.EpochSchedule(kind="geometric", base=4)
    program = _nolimit_program(schedule)
    total = 1  # head
    blocks = []
    for j in range(1, 25):
        length = 2 * (j + (1 if schedule.block_type(j) == 2 else 0))
        blocks.append(length)
        total += length
    prefix = cl.block_schedule_prefix(program, total)
    # the prefix ends exactly at a block boundary: rebuild independently
    rebuilt = [3]
    for j in range(1, 25):
        u = [0, 1] * ((j + 1) // 2)
        u = u[:j]
        if schedule.block_type(j) == 2:
            u = u + [2]
        rebuilt.extend(u + u)
    assert prefix.to_text() == "".join(str(s) for s in rebuilt)[:total]


def test_empty_block_is_invalid():
    program = cl.BlockProgram(cl.Alphabet(2), np.empty(0, np.uint8),
                              lambda j: np.empty(0, np.uint8))
    with pytest.raises(InvalidProgramError):
        cl.block_schedule_prefix(program, 5)


# --- occurrences ------------------------------------------------------------


def test_overlapping_occurrences():
    assert cl.occurrences(word("0000"), word("00", 1)).tolist() == [1, 2]


def test_occurrences_against_naive_on_thue_morse():
    src = cl.SubstitutionSource({0: "01", 1: "10"}, 0, A2)
    prefix = src.prefix(16)
    marker = word("010")
    got = cl.occurrences(prefix, marker).tolist()
    assert got == naive_occurrences(prefix, marker)
    for k in got:
        assert prefix[k : k + 3] == marker


def test_marker_longer_than_prefix():
    assert cl.occurrences(word("01"), word("0101")).size == 0


@settings(max_examples=60, deadline=None)
@given(
    text=st.lists(st.integers(0, 2), min_size=1, max_size=160),
    pat=st.lists(st.integers(0, 2), min_size=1, max_size=5),
    start=st.integers(0, 3),
)
def test_occurrence_soundness_and_completeness(text, pat, start):
    a3 = cl.Alphabet(3)
    prefix, marker = cl.FiniteWord(text, a3), cl.FiniteWord(pat, a3)
    assert cl.occurrences(prefix, marker, start=start).tolist() == naive_occurrences(
        prefix, marker, start=start
    )


def test_occurrences_against_naive_large():
    src = cl.BernoulliSource([0.5, 0.5], seed=9)
    prefix = src.prefix(10_000)
    for marker in ("0", "011", "0101"):
        got = cl.occurrences(prefix, word(marker, 2)).tolist()
        assert got == naive_occurrences(prefix, word(marker, 2))


# --- frequencies ------------------------------------------------------------


def test_empirical_frequency_alternating():
    prefix = cl.PeriodicSource("01", A2).prefix(2000)
    assert cl.empirical_frequency(prefix, word("0", 2)) == 0.5
    assert cl.empirical_frequency(prefix, word("00", 2)) == 0.0


def test_empirical_frequency_thue_morse_vs_naive_count():
    prefix = cl.SubstitutionSource({0: "01", 1: "10"}, 0, A2).prefix(2**16)
    target = word("11", 2)
    count = len(naive_occurrences(prefix, target, start=0))
    assert cl.empirical_frequency(prefix, target) == count / (2**16 - 1)


# --- return decompositions --------------------------------------------------


def test_periodic_decomposition_by_hand():
    prefix = word("0101010")
    decomp = cl.decompose_returns(prefix, word("01"))
    assert decomp.return_times.tolist() == [2, 4]
    assert decomp.prefix_word.to_text() == "01"
    assert [w.to_text() for w in decomp.return_words] == ["01"]
    assert decomp.remainder.to_text() == "010"
    rebuilt = decomp.prefix_word
    for w in decomp.return_words:
        rebuilt = rebuilt + w
    assert rebuilt == prefix[: int(decomp.return_times[-1])]


def test_single_occurrence_gives_no_return_words():
    decomp = cl.decompose_returns(word("000100"), word("1", 2))
    assert decomp.count == 0
    assert decomp.prefix_word.to_text() == "000"


def test_missing_marker_raises():
    with pytest.raises(MarkerNotFoundError) as err:
        cl.decompose_returns(word("0000"), word("1", 2))
    assert err.value.horizon == 4


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(40, 400))
def test_reconstruction_invariant_random(seed, n):
    prefix = cl.BernoulliSource([0.5, 0.5], seed=seed).prefix(n)
    try:
        decomp = cl.decompose_returns(prefix, word("01", 2))
    except MarkerNotFoundError:
        return
    cat = np.concatenate(
        [decomp.prefix_word.symbols] + [w.symbols for w in decomp.return_words]
    )
    assert np.array_equal(cat, prefix.symbols[: int(decomp.return_times[-1])])
    assert np.array_equal(decomp.lengths, np.diff(decomp.return_times))


def test_reconstruction_invariant_bernoulli_1e5():
    prefix = cl.BernoulliSource([0.5, 0.5], seed=3).prefix(100_000)
    decomp = cl.decompose_returns(prefix, word("01", 2))
    tau = decomp.return_times
    assert np.array_equal(decomp.lengths, np.diff(tau))
    # spot reconstruction on a sample of junctions
    for j in np.linspace(1, decomp.count, 25, dtype=int):
        w = decomp.word(int(j))
        a, b = int(tau[j - 1]), int(tau[j])
        assert np.array_equal(w.symbols, prefix.symbols[a:b])


def test_return_rate_periodic():
    prefix = cl.PeriodicSource("01", A2).prefix(4002)
    decomp = cl.decompose_returns(prefix, word("01", 2))
    rates = cl.return_rate_trace(decomp)
    tau = decomp.return_times
    assert np.array_equal(tau, 2 * np.arange(len(tau)) + 2)  # tau_i = 2i + 2
    assert rates[-1, 1] == pytest.approx(0.5, abs=1e-3)


def test_return_rate_full_period_marker():
    prefix = cl.PeriodicSource("012", cl.Alphabet(3)).prefix(3000)
    decomp = cl.decompose_returns(prefix, cl.FiniteWord("012", cl.Alphabet(3)))
    rates = cl.return_rate_trace(decomp)
    assert rates[-1, 1] == pytest.approx(1 / 3, abs=1e-3)


def test_long_word_mass():
    prefix = cl.PeriodicSource("01", A2).prefix(1000)
    decomp = cl.decompose_returns(prefix, word("01", 2))
    assert cl.long_word_mass(decomp, 2) == 0.0  # cutoff >= period
    tau = decomp.return_times
    expect = float((tau[-1] - tau[0]) / tau[-1])
    assert cl.long_word_mass(decomp, 0) == pytest.approx(expect, abs=1e-15)


def test_long_word_mass_monotone_in_cutoff():
    prefix = cl.BernoulliSource([0.5, 0.5], seed=17).prefix(50_000)
    decomp = cl.decompose_returns(prefix, word("0", 2))
    masses = [cl.long_word_mass(decomp, M) for M in range(0, 12)]
    assert all(a >= b for a, b in zip(masses, masses[1:]))


def test_long_word_mass_geometric_tail():
    prefix = cl.BernoulliSource([0.5, 0.5], seed=21).prefix(1_000_000)
    decomp = cl.decompose_returns(prefix, word("0", 2))
    assert cl.long_word_mass(decomp, 20) < 1e-4


# --- words ------------------------------------------------------------------


def test_word_bytes_export_and_slicing():
    w = word("0123", 4)
    assert w.to_bytes() == bytes([0, 1, 2, 3])
    assert w[1:3].to_text() == "12"
    assert (w[:2] + w[2:]) == w


def test_alphabet_validation():
    with pytest.raises(DomainError):
        cl.FiniteWord("012", A2)
    with pytest.raises(DomainError):
        cl.Alphabet(0)
