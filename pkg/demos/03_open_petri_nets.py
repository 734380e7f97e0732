# %% [markdown]
# # Open Petri nets: a small chemistry example
#
# One net forms water from hydrogen and oxygen, the other ionizes water. Both
# expose `H2O` on the shared boundary point `4`.

# %%
from opencospan import opennet as on
from opencospan.finset import FinFunction, FinSet


def reaction(species, name, consumed, produced, left, right):
    V, A = FinSet(species), FinSet([name])
    L, R = FinSet(left), FinSet(right)
    dec = on.PetriRates(V, A, {name: consumed}, {name: produced}, {name: 1})
    return on.OpenNet(L, R, dec, FinFunction(L, V, left), FinFunction(R, V, right))


formation = reaction(["H", "O", "H2O"], "alpha", {"H": 2, "O": 1}, {"H2O": 1},
                     {"1": "H", "2": "H", "3": "O"}, {"4": "H2O"})
ionization = reaction(["H2O", "OH-", "H3O+"], "beta", {"H2O": 2}, {"OH-": 1, "H3O+": 1},
                      {"4": "H2O"}, {"5": "OH-", "6": "H3O+"})

# %%
both = on.compose_open_net(formation, ionization)
print(len(both.vertices), "species,", len(both.arrows), "transitions")
print(both.decoration.species)

side_by_side = on.tensor_open_net(formation, ionization)
print(len(side_by_side.vertices), "species,", len(side_by_side.arrows), "transitions")

# %% [markdown]
# Gluing is only defined up to isomorphism, so associativity is checked by
# searching for an isomorphism that fixes the feet.

# %%
ident = on.identity_open_net(formation.left_foot, "petri")
sq = on.are_isomorphic(on.compose_open_net(ident, formation), formation)
print(sq.vertex_map.mapping)
