import os
from fractions import Fraction as Q

import pytest

from opencospan import openmarkov as om
from opencospan import opennet as on
from opencospan.finset import FinFunction, FinSet

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "demos", "data")


def open_markov(states, H, inputs, i, outputs, o):
    X, S, T = FinSet(states), FinSet(inputs), FinSet(outputs)
    return om.OpenMarkov(S, T, om.validate_generator(X, H), FinFunction(S, X, i), FinFunction(T, X, o))


def lumping_process():
    # a -> b1, b2 -> c with c absorbing; b1 and b2 are to be merged
    return open_markov(["a", "b1", "b2", "c"],
                       [[-15, 0, 0, 0], [8, -10, 0, 0], [7, 4, -6, 0], [0, 6, 6, 0]],
                       ["in"], {"in": "a"}, ["out"], {"out": "c"})


def lumping_map():
    X = FinSet(["a", "b1", "b2", "c"])
    return FinFunction(X, FinSet(["a", "b", "c"]), {"a": "a", "b1": "b", "b2": "b", "c": "c"})


def lumped_process():
    return open_markov(["a", "b", "c"], [[-15, 0, 0], [15, -6, 0], [0, 6, 0]],
                       ["in"], {"in": "a"}, ["out"], {"out": "c"})


def four_state_process():
    return open_markov(["a", "b", "c", "d"],
                       [[Q(-1, 2), 0, 0, 0], [0, -2, 1, 0], [Q(1, 2), 2, -5, 2], [0, 0, 4, -2]],
                       ["a", "b"], {"a": "a", "b": "b"}, ["t"], {"t": "d"})


def three_state_process():
    # x->y at 2, x->z at 12, y->x at 1, z->y at 1
    return open_markov(["x", "y", "z"], [[-14, 1, 0], [2, -1, 1], [12, 0, -1]],
                       ["t"], {"t": "x"}, ["z"], {"z": "z"})


def petri_net(species, name, src, tgt, L, i, R, o, rate=1):
    V, A, Lf, Rf = FinSet(species), FinSet([name]), FinSet(L), FinSet(R)
    dec = on.PetriRates(V, A, {name: src}, {name: tgt}, {name: rate})
    return on.OpenNet(Lf, Rf, dec, FinFunction(Lf, V, i), FinFunction(Rf, V, o))


def water_formation():
    return petri_net(["H", "O", "H2O"], "alpha", {"H": 2, "O": 1}, {"H2O": 1},
                     ["1", "2", "3"], {"1": "H", "2": "H", "3": "O"}, ["4"], {"4": "H2O"})


def water_ionization():
    return petri_net(["H2O", "OH-", "H3O+"], "beta", {"H2O": 2}, {"OH-": 1, "H3O+": 1},
                     ["4"], {"4": "H2O"}, ["5", "6"], {"5": "OH-", "6": "H3O+"})


def edge_net(v1, v2, e, kind="graph", rate=None):
    G = on.Graph.build([v1, v2], {e: (v1, v2, rate)}, rated=kind == "kgraph")
    L, R = FinSet(["x"]), FinSet(["y"])
    return on.OpenNet(L, R, G, FinFunction(L, G.nodes, {"x": v1}), FinFunction(R, G.nodes, {"y": v2}))


@pytest.fixture
def data_dir():
    return os.path.abspath(DATA)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
