"""Finite parity games (max-parity: Exists wins a play iff the largest
priority seen infinitely often is even), Zielonka's recursive solver and a
brute-force positional oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

EXISTS, FORALL = 0, 1


@dataclass(frozen=True)
class ParityGame:
    owner: tuple[int, ...]
    priority: tuple[int, ...]
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.owner)
        if len(self.priority) != n or len(self.edges) != n:
            raise ValueError("owner, priority and edges must have equal length")
        for v, es in enumerate(self.edges):
            if not es:
                raise ValueError(f"vertex {v} has no successor")
            if any(not 0 <= w < n for w in es):
                raise ValueError(f"vertex {v} has an edge out of range")
        if any(p < 0 for p in self.priority):
            raise ValueError("priorities must be non-negative")

    @property
    def size(self) -> int:
        return len(self.owner)


@dataclass(frozen=True)
class Solution:
    winner: tuple[int, ...]
    strategy: dict[int, int]

    def wins(self, v: int) -> int:
        return self.winner[v]


def _attractor(game: ParityGame, sub: frozenset, target: set, player: int, preds, strategy: dict) -> set:
    attr = set(target)
    count = {v: sum(1 for w in game.edges[v] if w in sub) for v in sub}
    queue = list(attr)
    while queue:
        w = queue.pop()
        for v in preds[w]:
            if v not in sub or v in attr:
                continue
            if game.owner[v] == player:
                attr.add(v)
                strategy[v] = w
                queue.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr


def _zielonka(game: ParityGame, sub: frozenset, preds) -> tuple[set, set, dict]:
    if not sub:
        return set(), set(), {}
    d = max(game.priority[v] for v in sub)
    player = d % 2
    strategy: dict[int, int] = {}
    top = {v for v in sub if game.priority[v] == d}
    attr = _attractor(game, sub, top, player, preds, strategy)
    for v in top:
        if game.owner[v] == player:
            strategy[v] = next(w for w in game.edges[v] if w in sub)
    w0, w1, s = _zielonka(game, sub - attr, preds)
    wins = (w0, w1)
    if not wins[1 - player]:
        return (set(sub), set(), {**s, **strategy}) if player == EXISTS else (set(), set(sub), {**s, **strategy})
    opp_strategy: dict[int, int] = {}
    b = _attractor(game, sub, wins[1 - player], 1 - player, preds, opp_strategy)
    w0b, w1b, s2 = _zielonka(game, sub - b, preds)
    keep = {v: w for v, w in s.items() if v in wins[1 - player] and game.owner[v] == 1 - player}
    result = {**s2, **keep, **opp_strategy}
    if player == EXISTS:
        return w0b, w1b | b, result
    return w0b | b, w1b, result


def solve_parity(game: ParityGame) -> Solution:
    """Winner of every vertex with positional winning strategies for both players."""
    preds: list[list[int]] = [[] for _ in range(game.size)]
    for v, es in enumerate(game.edges):
        for w in set(es):
            preds[w].append(v)
    w0, w1, strategy = _zielonka(game, frozenset(range(game.size)), preds)
    winner = tuple(EXISTS if v in w0 else FORALL for v in range(game.size))
    strategy = {v: w for v, w in strategy.items() if game.owner[v] == winner[v]}
    return Solution(winner, strategy)


# ---------------------------------------------------------------------------
# brute force


def _opponent_wins_cycle(game: ParityGame, succ, start: int, player: int) -> bool:
    """In the one-player graph ``succ``, can the opponent of ``player`` reach a
    cycle whose maximal priority has the opponent's parity?"""
    reach = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in succ[v]:
            if w not in reach:
                reach.add(w)
                stack.append(w)
    for u in reach:
        p = game.priority[u]
        if p % 2 == player:
            continue
        # u lies on a cycle using only vertices of priority ≤ p
        allowed = {v for v in reach if game.priority[v] <= p}
        seen, stack = set(), [w for w in succ[u] if w in allowed]
        while stack:
            v = stack.pop()
            if v == u:
                return True
            if v in seen:
                continue
            seen.add(v)
            stack.extend(w for w in succ[v] if w in allowed)
    return False


def brute_force_winner(game: ParityGame) -> tuple[int, ...]:
    """Exists wins ``v`` iff some positional Exists strategy defeats every
    Forall play from ``v``; exponential, for small games only."""
    mine = [v for v in range(game.size) if game.owner[v] == EXISTS]
    result = [FORALL] * game.size
    for choice in itertools.product(*(game.edges[v] for v in mine)):
        pick = dict(zip(mine, choice))
        succ = [(pick[v],) if v in pick else game.edges[v] for v in range(game.size)]
        for v in range(game.size):
            if result[v] == FORALL and not _opponent_wins_cycle(game, succ, v, EXISTS):
                result[v] = EXISTS
    return tuple(result)


def check_strategy(game: ParityGame, solution: Solution) -> bool:
    """Replay: fixing each player's strategy on their winning region, the
    opponent cannot escape or win a cycle."""
    for player in (EXISTS, FORALL):
        region = {v for v in range(game.size) if solution.winner[v] == player}
        succ = []
        for v in range(game.size):
            if v in region and game.owner[v] == player:
                w = solution.strategy.get(v)
                if w is None or w not in game.edges[v]:
                    return False
                succ.append((w,))
            else:
                succ.append(game.edges[v])
        for v in region:
            if any(w not in region for w in succ[v]):
                return False
            if _opponent_wins_cycle(game, succ, v, player):
                return False
    return True
