# %% [markdown]
# # Coarse-graining a Markov process
#
# Four states: `a` feeds `b1` and `b2`, both of which drain into the absorbing
# state `c`. The two middle states leave at different total rates (10 and 6),
# but they send probability to `c` at the *same* rate 6, so merging them is
# still consistent.

# %%
from fractions import Fraction as Q

from opencospan import openmarkov as om
from opencospan.exactlin import RationalMatrix
from opencospan.finset import FinFunction, FinSet, identity

X = FinSet(["a", "b1", "b2", "c"])
H = om.validate_generator(X, [[-15, 0, 0, 0],
                              [8, -10, 0, 0],
                              [7, 4, -6, 0],
                              [0, 6, 6, 0]])
p = FinFunction(X, FinSet(["a", "b", "c"]), {"a": "a", "b1": "b", "b2": "b", "c": "c"})

# %% [markdown]
# Summing rows over each fiber gives `p_* H`. Columns `b1` and `b2` agree, which
# is the whole lumpability condition.

# %%
print(om.pushforward_generator(H, p))
print("lumpable:", om.is_lumpable(H, p))

# %%
s = om.stochastic_section(p, {"b1": Q(1, 3), "b2": Q(2, 3)})
print(om.lump(H, p, s).H)
# any other split of the b-fiber gives the same answer
print(om.lump(H, p).H == om.lump(H, p, s).H)

# %% [markdown]
# Slow the `b1 -> c` transition to 5 and the condition fails: now the lumped
# generator depends on how probability is split between `b1` and `b2`.

# %%
rows = [list(r) for r in H.H.rows]
rows[3][1], rows[1][1] = Q(5), Q(-9)
H5 = om.Generator(X, RationalMatrix(rows))
print("lumpable:", om.is_lumpable(H5, p))
for w in (0, 1):
    sec = om.stochastic_section(p, {"b1": w, "b2": 1 - w})
    print(w, om.lump(H5, p, sec).H)

# %% [markdown]
# ## The same map as a morphism of open processes
#
# Expose `a` as an input and `c` as an output. Since the boundary states are
# untouched by `p`, the triple `(id, p, id)` is a morphism, and black-boxing
# turns it into an inclusion of steady-state relations.

# %%
S, T = FinSet(["in"]), FinSet(["out"])
M = om.OpenMarkov(S, T, H, FinFunction(S, X, ["a"]), FinFunction(T, X, ["c"]))
Hp = om.lump(H, p)
Mp = om.OpenMarkov(S, T, Hp, FinFunction(S, p.cod, ["a"]), FinFunction(T, p.cod, ["c"]))
m = om.MarkovMorphism(M, Mp, identity(S), p, identity(T))
print("morphism:", om.check_morphism(m))

from opencospan.linrel import is_rel_2morphism  # noqa: E402

print(om.black_box(M))
print("2-morphism:", is_rel_2morphism(om.black_box_morphism(m)))
