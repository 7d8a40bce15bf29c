"""
Resolving ambiguous place names
===============================

Walk through a few short documents with the bundled fixture gazetteer and
see what each resolver picks.
"""

import toporesolve as tr
from toporesolve.cbh import CbhTrace
from toporesolve.corpus import make_document

g = tr.load_fixture_gazetteer()


def show(label, results):
    print(label)
    for r in results:
        e = r.interpretation.entry if r.interpretation else None
        where = f"{e.name}, {e.admin1_code}, {e.country_code} ({e.id})" if e else "-"
        print(f"  {r.group.surface:<10} -> {where:<36} {r.source.value:<11} {r.confidence:.3f}")


###############################################################################
# Three cities with nothing else around them.  By population alone each goes
# to its best known namesake; grouping candidates under shared parents finds
# the one province that holds all three.
doc = make_document("a", "Toronto London Kingston", ["Toronto", "London", "Kingston"])
show("preliminary", tr.preliminary_resolve(doc, g))
show("spatial hierarchy", tr.resolve_shs(doc, g))

###############################################################################
# Two names that are both countries and both small towns in Texas.  Both
# parent sets cover the two names, so population decides.
doc = make_document("b", "Georgia Turkey", ["Georgia", "Turkey"])
show("spatial hierarchy", tr.resolve_shs(doc, g))

###############################################################################
# A province in the text pins Edmonton down.
doc = make_document("c", "Edmonton , the capital of Alberta , grew", ["Edmonton"])
show("context-bound", tr.resolve_cbh(doc, g))

###############################################################################
# London and Heathrow keep pulling each other back and forth.  The trace
# shows the assignment flip every iteration; the iteration cap stops it.
doc = make_document("d", "London's Heathrow airport was busy", ["London", "Heathrow"])
trace = CbhTrace()
tr.resolve_cbh(doc, g, tr.CbhConfig(max_iterations=4), trace)
print("preliminary:", trace.preliminary)
for k, step in enumerate(trace.iterations, 1):
    print(f"iteration {k}:", step)

###############################################################################
# Montreal and Windsor share a Quebec parent, so set covering puts Windsor in
# Quebec.  The explicit "Ontario" gives the context model enough confidence to
# override that under fusion.
doc = make_document("e", "Flights between Montreal and Windsor , Ontario were delayed",
                    ["Montreal", "Windsor"])
show("spatial hierarchy", tr.resolve_shs(doc, g))
show("fusion (tau 0.55)", tr.resolve_chf(doc, g))
