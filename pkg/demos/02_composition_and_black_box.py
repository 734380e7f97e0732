# %% [markdown]
# # Gluing open Markov processes
#
# The first process has inputs at `a`, `b` and an output at `d`; the second
# takes its input at `x` and outputs at `z`. Composing identifies `d` with `x`.

# %%
from fractions import Fraction as Q

from opencospan import openmarkov as om
from opencospan.finset import FinFunction, FinSet
from opencospan.linrel import compose_relations


def process(states, H, inputs, outputs):
    X, S, T = FinSet(states), FinSet(inputs), FinSet(outputs)
    return om.OpenMarkov(S, T, om.validate_generator(X, H), FinFunction(S, X, inputs), FinFunction(T, X, outputs))


first = process(["a", "b", "c", "d"],
                [[Q(-1, 2), 0, 0, 0], [0, -2, 1, 0], [Q(1, 2), 2, -5, 2], [0, 0, 4, -2]],
                {"a": "a", "b": "b"}, {"t": "d"})
second = process(["x", "y", "z"], [[-14, 1, 0], [2, -1, 1], [12, 0, -1]], {"t": "x"}, {"z": "z"})

glued, j, k = om.compose_open_with_legs(first, second)
print(glued.states)
print(glued.H)

# %% [markdown]
# Two ways of writing the glued generator: push each piece forward separately
# and add, or push the block sum forward along the copairing. They agree.

# %%
print(om.odot(first.H, second.H, j, k) == om.odot_copair(first.H, second.H, j, k))

# %% [markdown]
# ## Black boxes
#
# A black box records which boundary populations and flows are compatible with
# a steady state. Black-boxing the composite gives the composite relation.

# %%
R = om.black_box(glued)
print(R)
print(R == compose_relations(om.black_box(first), om.black_box(second)))

# %%
# exp(tH) is stochastic for each of these generators
for t in (0.1, 1.0, 10.0):
    print(t, om.matrix_exp_stochastic_check(glued.gen, t))
