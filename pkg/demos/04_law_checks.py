# %% [markdown]
# # Randomized law checks
#
# Every suite draws seeded random instances and checks one family of laws.
# The same seed always replays the same cases.

# %%
from opencospan import laws

for name in laws.SUITES:
    print(laws.run_suite(name, seed=0, size_bound=6, cases=30).summary())

# %% [markdown]
# A deliberately broken lumping (sections left unnormalized) is caught, and the
# failing instance is kept as JSON so it can be replayed.

# %%
from opencospan.exactlin import RationalMatrix  # noqa: E402
from opencospan.finset import pushforward_matrix  # noqa: E402


def raw_section(p, raw):
    return RationalMatrix([[raw[x] if p(x) == y else 0 for y in p.cod] for x in p.dom],
                          shape=(len(p.dom), len(p.cod)))


report = laws.run_suite("lumpability_equiv", seed=0, cases=20, section_fn=raw_section,
                        lump_fn=lambda H, p, s: pushforward_matrix(p) @ H.H @ s)
print(report.summary())
print(report.failures[0].description)
print(sorted(report.failures[0].counterexample))
