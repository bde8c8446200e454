"""
Density and community sweeps
============================

Barabasi-Albert graphs get denser as ``m`` grows; LFR graphs lose their
community structure as the mixing parameter ``mu`` grows. Each repeat
draws a fresh graph from the repeat's seed.
"""

from dpprlink import BaParams, LfrParams, Protocol, sweep

protocol = Protocol(fraction=0.1, repeats=5)

###############################################################################
# Denser BA graphs give every method more signal.
ba = sweep("ba_m", [2, 4, 8], protocol, methods=["dppr", "cn"], ba=BaParams(n=300))
for row in ba.rows:
    print(f"m={row['value']}  {row['method']:4s} {row['mean_aupr']:.3f}")

###############################################################################
# Weak communities hurt local heuristics and global ones alike.
lfr = sweep("lfr_mu", [0.1, 0.4, 0.7], protocol, lfr=LfrParams(n=250))
for row in lfr.rows:
    print(f"mu={row['value']}  {row['method']:4s} {row['mean_aupr']:.3f}")
