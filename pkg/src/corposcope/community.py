"""Seeded greedy modularity maximization on weighted undirected graphs.

A from-scratch Louvain-style optimizer: node iteration order is fixed
by the caller (lexicographic by default) and the RNG is used only to
break ties between equally good moves, so runs are bit-identical for
equal seeds and inputs.
"""

import random

Adjacency = dict  # node -> {neighbor: weight}; symmetric, no self-loops on input

_TIE_EPS = 1e-12


def modularity(adjacency: Adjacency, membership: dict) -> float:
    """Newman modularity of a hard partition on a weighted graph.

    ``adjacency`` maps node -> {neighbor: weight} symmetrically; a
    self-loop entry counts twice toward the node degree, as usual.
    """
    m2 = 0.0
    for node, nbrs in adjacency.items():
        for other, w in nbrs.items():
            m2 += 2.0 * w if other == node else w
    if m2 <= 0:
        return 0.0

    internal = {}
    total = {}
    for node, nbrs in adjacency.items():
        com = membership[node]
        k = 0.0
        for other, w in nbrs.items():
            if other == node:
                k += 2.0 * w
                internal[com] = internal.get(com, 0.0) + 2.0 * w
            else:
                k += w
                if membership[other] == com:
                    internal[com] = internal.get(com, 0.0) + w
        total[com] = total.get(com, 0.0) + k

    q = 0.0
    for com, tot in total.items():
        q += internal.get(com, 0.0) / m2 - (tot / m2) ** 2
    return q


def _one_level(adjacency, order, rng):
    """Local-moving phase; returns (membership, moved_any).

    Each node is offered every neighboring community, a fresh singleton
    community, and its current one; it takes the placement with the
    highest modularity, so every executed move strictly improves Q.
    """
    node2com = {node: i for i, node in enumerate(order)}
    next_com = len(order)
    degree = {}
    m2 = 0.0
    for node, nbrs in adjacency.items():
        k = 0.0
        for other, w in nbrs.items():
            k += 2.0 * w if other == node else w
        degree[node] = k
        m2 += k
    com_tot = {node2com[node]: degree[node] for node in order}

    if m2 <= 0:
        return node2com, False

    moved_any = False
    improved = True
    while improved:
        improved = False
        for node in order:
            com = node2com[node]
            k = degree[node]
            # weight from node to each neighboring community, loops excluded
            links = {}
            for other, w in adjacency[node].items():
                if other == node:
                    continue
                links[node2com[other]] = links.get(node2com[other], 0.0) + w
            com_tot[com] -= k

            def placement_gain(cand):
                return (
                    2.0 * links.get(cand, 0.0) / m2
                    - 2.0 * k * com_tot.get(cand, 0.0) / (m2 * m2)
                )

            # current community is the baseline; a fresh singleton scores 0
            best_gain = placement_gain(com)
            best_coms = [com]
            if 0.0 > best_gain + _TIE_EPS:
                best_gain = 0.0
                best_coms = [None]
            for cand in links:
                if cand == com:
                    continue
                gain = placement_gain(cand)
                if gain > best_gain + _TIE_EPS:
                    best_gain = gain
                    best_coms = [cand]
                elif abs(gain - best_gain) <= _TIE_EPS:
                    best_coms.append(cand)

            if com in best_coms:
                target = com  # never move on a tie with the current placement
            elif len(best_coms) == 1:
                target = best_coms[0]
            else:
                target = rng.choice(sorted(best_coms, key=lambda c: (c is None, c)))
            if target is None:
                target = next_com
                next_com += 1
            com_tot[target] = com_tot.get(target, 0.0) + k
            if target != com:
                node2com[node] = target
                improved = True
                moved_any = True
    return node2com, moved_any


def _aggregate(adjacency, node2com):
    """Collapse communities into super-nodes; intra weight becomes a loop."""
    agg = {}
    for node, nbrs in adjacency.items():
        a = node2com[node]
        agg.setdefault(a, {})
        for other, w in nbrs.items():
            b = node2com[other]
            if other == node:
                agg[a][b] = agg[a].get(b, 0.0) + w
            elif a == b:
                # each intra edge visited from both endpoints; halve to store once
                agg[a][b] = agg[a].get(b, 0.0) + w / 2.0
            else:
                agg[a][b] = agg[a].get(b, 0.0) + w
    return agg


def _relabel(membership, order):
    mapping = {}
    out = {}
    for node in order:
        com = membership[node]
        if com not in mapping:
            mapping[com] = len(mapping)
        out[node] = mapping[com]
    return out


def louvain(adjacency: Adjacency, seed: int, order=None):
    """Detect communities; returns (membership, modularity).

    ``membership`` maps every node to a community id, contiguous from 0
    in order of first appearance along the fixed node order.
    """
    if not adjacency:
        raise ValueError("empty network")
    if order is None:
        order = sorted(adjacency)
    rng = random.Random(seed)

    membership = {node: node for node in order}
    current = {node: dict(nbrs) for node, nbrs in adjacency.items()}
    current_order = list(order)

    while True:
        level_membership, moved = _one_level(current, current_order, rng)
        if not moved:
            break
        membership = {node: level_membership[membership[node]] for node in membership}
        current = _aggregate(current, level_membership)
        # aggregated node ids are ints assigned in node order; keep that order
        seen = []
        seen_set = set()
        for node in current_order:
            com = level_membership[node]
            if com not in seen_set:
                seen.append(com)
                seen_set.add(com)
        current_order = seen

    membership = _relabel(membership, order)
    return membership, modularity(adjacency, membership)
