"""Distributed forward auction between UL users (bidders) and the BS (auctioneer).

UL agents bid for DL users with the classic ``best - second best + eps``
rule against their local, possibly stale, price view. The BS accepts a bid
only if it beats the current price by at least ``eps``; otherwise it answers
with an M2 carrying the up-to-date price. Agents never share state: every
interaction goes through :class:`Network`, a reliable in-process transport
with per-recipient FIFO ordering and a pluggable delivery order.

Message meanings:

* ``M1`` bid accepted, the UL user now holds the DL user.
* ``M2`` bid too low or holder outbid; carries the BS price of that DL user.
* ``M3`` a full assignment exists, stop bidding.
* ``M4`` final pair and transmit powers, sent to UL and DL users.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import IO, Union

import numpy as np

from .assignment import Assignment, BenefitMatrix

BS = "bs"


class ProtocolError(RuntimeError):
    """A malformed message reached an agent."""


class InvariantViolation(RuntimeError):
    """The run broke a guarantee of the auction (a bug, or an injected fault)."""


@dataclass(frozen=True)
class Bid:
    ul: int
    dl: int
    bid: float


@dataclass(frozen=True)
class M1:
    ul: int


@dataclass(frozen=True)
class M2:
    ul: int
    dl: int
    price: float


@dataclass(frozen=True)
class M3:
    pass


@dataclass(frozen=True)
class M4:
    ul: int
    dl: int
    p_ul: float | None  # None when the auction ran on a bare benefit matrix
    p_dl: float | None


AuctionMessage = Union[Bid, M1, M2, M3, M4]


def ul_addr(i: int) -> str:
    return f"ul{i}"


def dl_addr(j: int) -> str:
    return f"dl{j}"


def _round_slack(*values) -> float:
    # absorbs float rounding in price/benefit differences, far below any sane eps
    return 16.0 * float(np.spacing(max(1.0, *(abs(v) for v in values))))


# ---------------------------------------------------------------- UL side

@dataclass(frozen=True, eq=False)
class UlAgentState:
    id: int
    benefits: np.ndarray
    local_prices: np.ndarray
    epsilon: float
    current_dl: int | None = None
    pending_dl: int | None = None  # DL user of the unanswered bid, if any
    done: bool = False
    final: M4 | None = None

    @classmethod
    def initial(cls, i: int, benefits, epsilon: float) -> "UlAgentState":
        benefits = np.array(benefits, dtype=float)
        return cls(id=i, benefits=benefits, local_prices=np.zeros_like(benefits), epsilon=epsilon)

    @property
    def wants_to_bid(self) -> bool:
        return not self.done and self.current_dl is None and self.pending_dl is None


def ul_bid_step(state: UlAgentState) -> tuple[Bid, UlAgentState]:
    """One bidding phase: pick the best DL user at local prices and bid on it."""
    if state.current_dl is not None:
        raise ProtocolError(f"UL {state.id} bids while holding DL {state.current_dl}")
    utility = state.benefits - state.local_prices
    j = int(np.argmax(utility))
    v = float(utility[j])
    if utility.shape[0] > 1:
        others = utility.copy()
        others[j] = -np.inf
        w = float(others.max())
    else:
        # single candidate: a second-best far enough below forces acceptance
        spread = float(state.benefits.max() - state.benefits.min())
        w = v - (spread + 1.0)
    bid = float(state.benefits[j] - w + state.epsilon)
    return Bid(state.id, j, bid), dataclasses.replace(state, pending_dl=j)


def ul_receive(state: UlAgentState, msg) -> UlAgentState:
    if isinstance(msg, M1):
        if state.pending_dl is None:
            raise ProtocolError(f"UL {state.id} got M1 without an outstanding bid")
        return dataclasses.replace(state, current_dl=state.pending_dl, pending_dl=None)
    if isinstance(msg, M2):
        prices = state.local_prices.copy()
        prices[msg.dl] = msg.price
        return dataclasses.replace(state, local_prices=prices, current_dl=None, pending_dl=None)
    if isinstance(msg, M3):
        return dataclasses.replace(state, done=True)
    if isinstance(msg, M4):
        return dataclasses.replace(state, final=msg)
    raise ProtocolError(f"UL {state.id} cannot handle {type(msg).__name__}")


# ---------------------------------------------------------------- BS side

@dataclass(frozen=True, eq=False)
class BsAgentState:
    prices: np.ndarray
    owners: np.ndarray  # owners[j] = UL user holding DL j, or -1
    epsilon: float
    p_ul: np.ndarray | None = None  # optional N x N power tables for M4
    p_dl: np.ndarray | None = None
    accepted: np.ndarray | None = None  # accepted bids per DL user
    skip_price_update: bool = False  # fault injection, see cmd_verify

    @classmethod
    def initial(cls, n: int, epsilon: float, p_ul=None, p_dl=None,
                skip_price_update: bool = False) -> "BsAgentState":
        return cls(prices=np.zeros(n), owners=np.full(n, -1, dtype=int), epsilon=epsilon,
                   p_ul=p_ul, p_dl=p_dl, accepted=np.zeros(n, dtype=int),
                   skip_price_update=skip_price_update)

    @property
    def n(self) -> int:
        return self.prices.shape[0]

    @property
    def x(self) -> np.ndarray:
        x = np.zeros((self.n, self.n), dtype=int)
        held = self.owners >= 0
        x[self.owners[held], np.flatnonzero(held)] = 1
        return x

    @property
    def complete(self) -> bool:
        return bool(np.all(self.owners >= 0))

    def pairs(self) -> np.ndarray:
        pairs = np.full(self.n, -1, dtype=int)
        held = self.owners >= 0
        pairs[self.owners[held]] = np.flatnonzero(held)
        return pairs


def bs_assign_step(state: BsAgentState, msg: Bid) -> tuple[BsAgentState, list[tuple[str, AuctionMessage]]]:
    """Handle one bid at the BS; returns the new state and ``(recipient, message)`` list."""
    n = state.n
    if not isinstance(msg, Bid):
        raise ProtocolError(f"BS expects Bid, got {type(msg).__name__}")
    if not (0 <= msg.ul < n and 0 <= msg.dl < n) or not math.isfinite(msg.bid):
        raise ProtocolError(f"malformed bid {msg}")
    j = msg.dl
    price = float(state.prices[j])
    if msg.bid - price < state.epsilon - _round_slack(msg.bid, price):
        return state, [(ul_addr(msg.ul), M2(msg.ul, j, price))]

    prices = state.prices.copy()
    owners = state.owners.copy()
    accepted = state.accepted.copy()
    if not state.skip_price_update:
        prices[j] = msg.bid
    accepted[j] += 1
    out: list[tuple[str, AuctionMessage]] = []
    previous = int(owners[j])
    if previous >= 0:
        # the outbid holder learns the new price even when the BS ledger is faulty
        out.append((ul_addr(previous), M2(previous, j, float(msg.bid))))
    if msg.ul in owners:
        raise InvariantViolation(f"UL {msg.ul} bid while already holding a DL user")
    owners[j] = msg.ul
    out.append((ul_addr(msg.ul), M1(msg.ul)))
    new = dataclasses.replace(state, prices=prices, owners=owners, accepted=accepted)
    if new.complete:
        for i in range(n):
            out.append((ul_addr(i), M3()))
        for jj in range(n):
            i = int(owners[jj])
            p_u = float(state.p_ul[i, jj]) if state.p_ul is not None else None
            p_d = float(state.p_dl[i, jj]) if state.p_dl is not None else None
            m4 = M4(i, jj, p_u, p_d)
            out.append((ul_addr(i), m4))
            out.append((dl_addr(jj), m4))
    return new, out


# ---------------------------------------------------------------- transport

@dataclass
class AuctionTrace:
    records: list[dict] = field(default_factory=list)
    bids: int = 0
    accepted_bids: int = 0
    price_history: list[np.ndarray] = field(default_factory=list)
    bid_bound: int = 0
    final_states: dict = field(default_factory=dict, repr=False)

    @property
    def prices(self) -> np.ndarray:
        return self.price_history[-1]

    def log(self, step: int, src: str, dst: str, msg) -> None:
        self.records.append({"step": step, "from": src, "to": dst,
                             "type": type(msg).__name__, "payload": dataclasses.asdict(msg)})

    def to_jsonl(self, fh: IO[str]) -> None:
        for rec in self.records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")

    @staticmethod
    def read_jsonl(fh: IO[str]) -> list[dict]:
        return [json.loads(line) for line in fh if line.strip()]


class Network:
    """Reliable message transport with per-recipient FIFO inboxes."""

    def __init__(self, trace: AuctionTrace | None):
        self.inboxes: dict[str, deque] = {}
        self.trace = trace
        self._seq = itertools.count()

    def send(self, src: str, dst: str, msg) -> None:
        seq = next(self._seq)
        self.inboxes.setdefault(dst, deque()).append((seq, msg))
        if self.trace is not None:
            self.trace.log(seq, src, dst, msg)

    def pending(self, addr: str) -> bool:
        return bool(self.inboxes.get(addr))

    def head_seq(self, addr: str) -> int:
        return self.inboxes[addr][0][0]

    def pop(self, addr: str):
        return self.inboxes[addr].popleft()[1]


class Scheduler:
    """Chooses which ready agent acts next. Subclasses define the policy."""

    def pick(self, ready: list[str], net: Network) -> str:
        raise NotImplementedError


class RoundRobin(Scheduler):
    def __init__(self, order: list[str]):
        self.order = order
        self._pos = {a: k for k, a in enumerate(order)}
        self._last = -1

    def pick(self, ready, net):
        ready_pos = sorted(self._pos[a] for a in ready)
        nxt = next((p for p in ready_pos if p > self._last), ready_pos[0])
        self._last = nxt
        return self.order[nxt]


class RandomOrder(Scheduler):
    def __init__(self, seed=None):
        self.rng = np.random.default_rng(seed)

    def pick(self, ready, net):
        return ready[int(self.rng.integers(len(ready)))]


class Fifo(Scheduler):
    """Deliver the globally oldest message first; idle bidders go after that."""

    def pick(self, ready, net):
        with_mail = [a for a in ready if net.pending(a)]
        if with_mail:
            return min(with_mail, key=net.head_seq)
        return ready[0]


class Starve(Scheduler):
    """Delay one agent as long as anyone else can act (still starvation-free)."""

    def __init__(self, victim: str, order: list[str]):
        self.victim = victim
        self.inner = RoundRobin(order)

    def pick(self, ready, net):
        others = [a for a in ready if a != self.victim]
        return self.inner.pick(others or ready, net)


def make_scheduler(name: str, n: int, seed=None) -> Scheduler:
    order = [ul_addr(i) for i in range(n)] + [BS]
    if name == "round_robin":
        return RoundRobin(order)
    if name == "random":
        return RandomOrder(seed)
    if name == "fifo":
        return Fifo()
    if name.startswith("starve"):
        victim = name.partition(":")[2] or ul_addr(0)
        return Starve(victim, order)
    raise ValueError(f"unknown scheduler {name!r}")


def iteration_bound(c: np.ndarray, epsilon: float) -> int:
    """Bid budget ``N * N^2 * ceil(delta / eps)`` (at least one price step)."""
    n = c.shape[0]
    delta = float(c.max() - c.min())
    return n * n * n * max(1, math.ceil(delta / epsilon))


def run_auction(c, epsilon: float = 0.1, scheduler: str | Scheduler = "round_robin", *,
                seed=None, record: bool = True, skip_price_update: bool = False):
    """Run the message-driven auction to completion.

    Returns ``(assignment, trace)``. ``trace.price_history`` holds the BS
    price vector after every accepted bid; ``trace.prices`` is the final one.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    benefit = c if isinstance(c, BenefitMatrix) else BenefitMatrix(c)
    cm = benefit.c
    n = benefit.n
    if isinstance(scheduler, str):
        scheduler = make_scheduler(scheduler, n, seed)

    p_ul = p_dl = None
    if benefit.batch is not None:
        p_ul = benefit.batch.p_ul.reshape(n, n)
        p_dl = benefit.batch.p_dl.reshape(n, n)

    trace = AuctionTrace(bid_bound=iteration_bound(cm, epsilon))
    net = Network(trace if record else None)
    uls = {ul_addr(i): UlAgentState.initial(i, cm[i], epsilon) for i in range(n)}
    bs = BsAgentState.initial(n, epsilon, p_ul, p_dl, skip_price_update)
    trace.price_history.append(bs.prices.copy())
    actors = list(uls) + [BS]
    accept_cap = math.ceil((cm.max() - cm.min()) / epsilon) + 1

    rank = {a: k for k, a in enumerate(actors)}
    ready = set(uls)

    def refresh(addr: str) -> None:
        if addr not in rank:
            return
        if net.pending(addr) or (addr != BS and uls[addr].wants_to_bid):
            ready.add(addr)
        else:
            ready.discard(addr)

    while ready:
        actor = scheduler.pick(sorted(ready, key=rank.__getitem__), net)
        touched = [actor]
        if actor == BS:
            before = bs.prices
            bs, out = bs_assign_step(bs, net.pop(BS))
            if np.any(bs.prices < before):
                raise InvariantViolation("BS price decreased")
            if any(isinstance(m, M1) for _, m in out):
                trace.accepted_bids += 1
                trace.price_history.append(bs.prices.copy())
                if n > 1 and not skip_price_update and bs.accepted.max() > accept_cap:
                    raise InvariantViolation("too many accepted bids on one DL user")
            for dst, msg in out:
                net.send(BS, dst, msg)
                touched.append(dst)
        elif net.pending(actor):
            uls[actor] = ul_receive(uls[actor], net.pop(actor))
        else:
            bid, uls[actor] = ul_bid_step(uls[actor])
            trace.bids += 1
            if trace.bids > trace.bid_bound:
                raise InvariantViolation(
                    f"{trace.bids} bids exceed the bound {trace.bid_bound}")
            net.send(actor, BS, bid)
            touched.append(BS)
        for addr in touched:
            refresh(addr)

    if not bs.complete:
        raise InvariantViolation("auction stopped without a full assignment")
    trace.final_states = {"bs": bs, **uls}
    return Assignment.from_pairs(benefit, bs.pairs()), trace


def verify_eps_cs(assignment, prices, c, epsilon: float) -> bool:
    """Check eps-complementary slackness of a complete assignment at ``prices``."""
    c = c.c if isinstance(c, BenefitMatrix) else np.asarray(c, dtype=float)
    pairs = assignment.pairs if isinstance(assignment, Assignment) else np.asarray(assignment)
    prices = np.asarray(prices, dtype=float)
    utility = c - prices[None, :]
    for i, j in enumerate(pairs):
        best = float(utility[i].max())
        if utility[i, j] < best - epsilon - _round_slack(c[i, j], prices[j], best):
            return False
    return True
