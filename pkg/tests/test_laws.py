import json
from fractions import Fraction as Q

import pytest

from opencospan import laws
from opencospan import openmarkov as om
from opencospan.exactlin import RationalMatrix
from opencospan.finset import is_pullback, pushforward_matrix


@pytest.mark.parametrize("suite", sorted(laws.SUITES))
def test_every_suite_passes(suite):
    report = laws.run_suite(suite, seed=3, size_bound=6, cases=25)
    assert report.ok, report.to_json()["failures"][:2]
    assert report.cases == 25


def test_linrel_strictness_long_run():
    assert laws.run_suite("linrel_strictness", seed=1, size_bound=6, cases=200).ok


def test_blackbox_functorial_seed_7():
    assert laws.run_suite("blackbox_functorial", seed=7, size_bound=6, cases=100).ok


def test_reports_replay_identically():
    a = laws.run_suite("interchange_net", seed=11, size_bound=5, cases=15)
    b = laws.run_suite("interchange_net", seed=11, size_bound=5, cases=15)
    assert a.to_json() == b.to_json()


def unnormalized_section(p, raw):
    # the mutation: raw weights used as-is, fibers not rescaled to sum to 1
    rows = [[raw[x] if p(x) == y else 0 for y in p.cod] for x in p.dom]
    return RationalMatrix(rows, shape=(len(p.dom), len(p.cod)))


def unchecked_lump(H, p, s):
    return pushforward_matrix(p) @ H.H @ s


def test_mutation_skipping_normalization_is_caught():
    report = laws.run_suite("lumpability_equiv", seed=0, size_bound=6, cases=40,
                            section_fn=unnormalized_section, lump_fn=unchecked_lump)
    assert not report.ok
    f = report.failures[0]
    assert "H" in f.counterexample and "p" in f.counterexample
    json.dumps(report.to_json())


def test_mutation_rejected_by_real_lump():
    report = laws.run_suite("lumpability_equiv", seed=0, size_bound=6, cases=10,
                            section_fn=unnormalized_section)
    assert len(report.failures) == 10
    assert "SectionMismatch" in report.failures[0].description


def test_unknown_names():
    with pytest.raises(laws.UnknownSuite):
        laws.run_suite("nope")
    with pytest.raises(laws.UnknownKind):
        laws.generate("nope")


def test_generators_are_sound():
    for seed in range(30):
        assert is_pullback(laws.generate("pullback_square", seed, 5))
        H, p = laws.generate("lumpable_pair", seed, 6)
        assert om.is_lumpable(H, p)
        g = laws.generate("valid_generator", seed, 4)
        om.validate_generator(g.states, g.H)
        assert len(g.states) <= 4
        assert om.check_morphism(laws.generate("markov_morphism", seed, 6))


def test_generate_is_deterministic():
    for kind in laws.GENERATORS:
        assert laws.generate(kind, 5, 4) == laws.generate(kind, 5, 4)


def test_rational_bounds():
    for seed in range(10):
        g = laws.generate("valid_generator", seed, 6)
        n = len(g.states)
        off = [g.H[i, j] for i in range(n) for j in range(n) if i != j]
        assert all(x.denominator <= 10 and abs(x.numerator) <= 20 for x in off)


def test_failure_serialization_is_replayable():
    # a suite that always breaks: lump through a wrong pushforward
    report = laws.run_suite("lumpability_equiv", seed=4, size_bound=4, cases=5,
                            lump_fn=lambda H, p, s: unchecked_lump(H, p, s) + RationalMatrix.identity(len(p.cod)))
    assert report.failures
    for f in report.failures:
        data = f.counterexample
        H = RationalMatrix(data["H"])
        assert H.shape[0] == H.shape[1]
        assert data["p"]["dom"]
    ordered = [f["case"] for f in report.to_json()["failures"]]
    assert ordered == sorted(ordered)


def test_split_preserves_total():
    import random
    rng = random.Random(0)
    for n in range(1, 5):
        assert sum(laws._split(rng, Q(7, 3), n)) == Q(7, 3)
