"""Online server algorithms as pure step functions, plus the offline optimum.

Every engine is a state machine: ``step(state, request)`` returns a new
state and the move it made, leaving the old state untouched.  States are
frozen dataclasses, so they hash and can be shared freely between
workers or used as dictionary keys when scans merge identical states.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Union

from .core import (
    CONFIGURATIONS,
    INITIAL,
    POINTS,
    Configuration,
    CostReport,
    Move,
    Point,
    ProblemParams,
    RationalLike,
    as_sequence,
    config_move_cost,
    format_rational,
    parse_rational,
)

ONLINE_KINDS = ("greedy", "dc", "adc", "bal", "dummy", "lazy")


@dataclass(frozen=True)
class AlgorithmSpec:
    """Which algorithm to run.

    ``kind`` is one of greedy, dc, adc, bal, dummy, lazy or opt.  ``a`` is
    the right server's relative speed and only matters for ``adc``.
    ``inner`` is the wrapped algorithm for ``lazy``.
    """

    kind: str
    a: Fraction = Fraction(1)
    inner: "AlgorithmSpec | None" = None

    def __post_init__(self):
        if self.kind not in ONLINE_KINDS + ("opt",):
            raise ValueError(f"unknown algorithm kind {self.kind!r}")
        object.__setattr__(self, "a", parse_rational(self.a))
        if self.a <= 0:
            raise ValueError("speed a must be positive")
        if self.kind == "lazy":
            if self.inner is None or self.inner.kind == "opt":
                raise ValueError("lazy wrapper needs an online inner algorithm")
        elif self.inner is not None:
            raise ValueError(f"{self.kind} takes no inner algorithm")

    @property
    def name(self) -> str:
        if self.kind == "lazy":
            inner = self.inner
            if inner.kind == "dc":
                return "ldc"
            if inner.kind == "adc":
                return "a-ldc"
            return f"lazy-{inner.name}"
        return {"adc": "a-dc"}.get(self.kind, self.kind)

    @property
    def speed(self) -> Fraction | None:
        """The speed parameter if the algorithm is an a-DC variant."""
        if self.kind == "adc":
            return self.a
        if self.kind == "lazy":
            return self.inner.speed
        return None

    def label(self) -> str:
        s = self.speed
        if s is not None and self.name in ("a-dc", "a-ldc"):
            return f"{self.name}[a={format_rational(s)}]"
        return self.name

    def validate(self, params: ProblemParams) -> None:
        s = self.speed
        if s is not None and not (0 < s <= params.d):
            raise ValueError(
                f"speed a={format_rational(s)} must satisfy 0 < a <= d={format_rational(params.d)}"
            )

    @property
    def compliant(self) -> bool:
        """Lazy and noncrossing, so real servers always sit on two distinct points."""
        return self.kind in ("greedy", "bal", "dummy", "lazy")


GREEDY = AlgorithmSpec("greedy")
DC = AlgorithmSpec("dc")
BAL = AlgorithmSpec("bal")
DUMMY = AlgorithmSpec("dummy")
OPT = AlgorithmSpec("opt")
LDC = AlgorithmSpec("lazy", inner=DC)


def a_dc(a: RationalLike) -> AlgorithmSpec:
    return AlgorithmSpec("adc", a=parse_rational(a))


def a_ldc(a: RationalLike) -> AlgorithmSpec:
    return AlgorithmSpec("lazy", inner=a_dc(a))


def lazy(spec: AlgorithmSpec) -> AlgorithmSpec:
    return AlgorithmSpec("lazy", inner=spec)


ALGORITHM_NAMES = ("greedy", "dc", "a-dc", "ldc", "a-ldc", "bal", "dummy", "opt")


def spec_from_name(name: str, a: RationalLike | None = None) -> AlgorithmSpec:
    """Build a spec from its command-line name; ``a`` is required for the
    speed variants and refused for everything else."""
    name = name.strip().lower()
    if name in ("a-dc", "a-ldc"):
        if a is None:
            raise ValueError(f"{name} needs a speed a")
        return a_dc(a) if name == "a-dc" else a_ldc(a)
    if a is not None:
        raise ValueError(f"--a only applies to a-dc and a-ldc, not {name}")
    table = {"greedy": GREEDY, "dc": DC, "ldc": LDC, "bal": BAL, "dummy": DUMMY, "opt": OPT}
    if name not in table:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHM_NAMES)}")
    return table[name]


# ---------------------------------------------------------------------------
# Engine states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineState:
    """Server coordinates for the non-lazy DC family; they may sit between points."""

    left: Fraction
    right: Fraction


@dataclass(frozen=True)
class BalanceState:
    d_left: Fraction
    d_right: Fraction
    real: Configuration


@dataclass(frozen=True)
class VirtualState:
    """Lazy wrapper state: the simulated inner algorithm plus real servers."""

    virtual: Hashable
    real: Configuration


InnerState = Union[Configuration, LineState, BalanceState, VirtualState]


@dataclass(frozen=True)
class AlgorithmState:
    spec: AlgorithmSpec
    params: ProblemParams
    inner: InnerState

    @property
    def positions(self) -> tuple[Fraction, Fraction]:
        return server_positions(self.inner, self.params)

    @property
    def virtual_positions(self) -> tuple[Fraction, Fraction]:
        if not isinstance(self.inner, VirtualState):
            raise AttributeError("only lazy wrappers have virtual servers")
        return server_positions(self.inner.virtual, self.params)

    @property
    def configuration(self) -> Configuration | None:
        return real_configuration(self.inner)


def real_configuration(inner: InnerState) -> Configuration | None:
    if isinstance(inner, Configuration):
        return inner
    if isinstance(inner, (BalanceState, VirtualState)):
        return inner.real
    return None


def server_positions(inner: InnerState, params: ProblemParams) -> tuple[Fraction, Fraction]:
    if isinstance(inner, LineState):
        return inner.left, inner.right
    config = real_configuration(inner)
    return params.position(config.left), params.position(config.right)


def _initial_inner(spec: AlgorithmSpec, params: ProblemParams) -> InnerState:
    if spec.kind in ("greedy", "dummy"):
        return INITIAL
    if spec.kind in ("dc", "adc"):
        return LineState(params.position(INITIAL.left), params.position(INITIAL.right))
    if spec.kind == "bal":
        return BalanceState(Fraction(0), Fraction(0), INITIAL)
    if spec.kind == "lazy":
        return VirtualState(_initial_inner(spec.inner, params), INITIAL)
    raise ValueError("the offline optimum has no online state; use opt_cost")


def initial_state(spec: AlgorithmSpec, params: ProblemParams) -> AlgorithmState:
    spec.validate(params)
    return AlgorithmState(spec, params, _initial_inner(spec, params))


# ---------------------------------------------------------------------------
# Step functions
# ---------------------------------------------------------------------------

def _replace(config: Configuration, side: str, p: Point) -> Configuration:
    if side == "left":
        return Configuration(p, config.right)
    return Configuration(config.left, p)


def _nearest_side(config: Configuration, p: Point, params: ProblemParams) -> str:
    x = params.position(p)
    dl = abs(params.position(config.left) - x)
    dr = abs(params.position(config.right) - x)
    assert dl != dr, "tie between real servers cannot occur on this line"
    return "left" if dl < dr else "right"


def _between(config: Configuration, p: Point) -> bool:
    return POINTS.index(config.left) < POINTS.index(p) < POINTS.index(config.right)


def _move(config: Configuration, side: str, p: Point, params: ProblemParams):
    src = config.left if side == "left" else config.right
    dist = abs(params.position(src) - params.position(p))
    return _replace(config, side, p), Move(p, side, dist)


def _step_greedy(config, p, params):
    if config.covers(p):
        return config, Move(p, None, Fraction(0))
    return _move(config, _nearest_side(config, p, params), p, params)


def _step_dummy(config, p, params):
    if config.covers(p):
        return config, Move(p, None, Fraction(0))
    side = _nearest_side(config, p, params)
    if _between(config, p):
        side = "right" if side == "left" else "left"
    return _move(config, side, p, params)


def _step_dc(state: LineState, p: Point, params: ProblemParams, a: Fraction):
    x = params.position(p)
    left, right = state.left, state.right
    if x == left or x == right:
        return state, Move(p, None, Fraction(0))
    if left < x < right:
        # both servers head for x, the right one at speed a; stop at first arrival
        t = min(x - left, (right - x) / a)
        return LineState(left + t, right - a * t), Move(p, "both", t + a * t)
    # outside the pair: the server on that side is the nearest, also when the
    # two coincide, which keeps left <= right
    if x < left:
        return LineState(x, right), Move(p, "left", left - x)
    return LineState(left, x), Move(p, "right", x - right)


def _step_bal(state: BalanceState, p: Point, params: ProblemParams):
    config = state.real
    if config.covers(p):
        return state, Move(p, None, Fraction(0))
    if _between(config, p):
        x = params.position(p)
        cost_l = x - params.position(config.left)
        cost_r = params.position(config.right) - x
        after_l = max(state.d_left + cost_l, state.d_right)
        after_r = max(state.d_left, state.d_right + cost_r)
        if after_l != after_r:
            side = "left" if after_l < after_r else "right"
        else:
            side = "left" if cost_l > cost_r else "right"
    else:
        side = _nearest_side(config, p, params)
    new_config, move = _move(config, side, p, params)
    if side == "left":
        return BalanceState(state.d_left + move.distance, state.d_right, new_config), move
    return BalanceState(state.d_left, state.d_right + move.distance, new_config), move


def _step_lazy(spec: AlgorithmSpec, state: VirtualState, p: Point, params: ProblemParams):
    real = state.real
    if real.covers(p):
        # covered requests are invisible to the virtual servers as well
        return state, Move(p, None, Fraction(0))
    virtual, _ = _step_inner(spec.inner, state.virtual, p, params)
    x = params.position(p)
    vl, vr = server_positions(virtual, params)
    assert vl <= vr, "virtual servers crossed"
    on_point = [side for side, v in (("left", vl), ("right", vr)) if v == x]
    if not on_point:
        raise AssertionError("inner algorithm left the request unserved")
    if len(on_point) == 2:
        side = _nearest_side(real, p, params)
    else:
        side = on_point[0]
    new_real, move = _move(real, side, p, params)
    return VirtualState(virtual, new_real), move


def _step_inner(spec: AlgorithmSpec, inner: InnerState, p: Point, params: ProblemParams):
    kind = spec.kind
    if kind == "greedy":
        return _step_greedy(inner, p, params)
    if kind == "dummy":
        return _step_dummy(inner, p, params)
    if kind in ("dc", "adc"):
        return _step_dc(inner, p, params, spec.a if kind == "adc" else Fraction(1))
    if kind == "bal":
        return _step_bal(inner, p, params)
    if kind == "lazy":
        return _step_lazy(spec, inner, p, params)
    raise ValueError(f"{kind} cannot be stepped online")


def step(state: AlgorithmState, request: Point) -> tuple[AlgorithmState, Move]:
    inner, move = _step_inner(state.spec, state.inner, Point(request), state.params)
    return AlgorithmState(state.spec, state.params, inner), move


def run(spec: AlgorithmSpec, params: ProblemParams, seq: Union[str, Iterable[Point]]) -> CostReport:
    """Total cost and move log of ``spec`` on a request sequence."""
    seq = as_sequence(seq)
    if spec.kind == "opt":
        return opt_cost(params, seq)
    state = initial_state(spec, params)
    trace = []
    for p in seq:
        state, move = step(state, p)
        trace.append(move)
    return CostReport.from_trace(trace)


def run_cost(spec: AlgorithmSpec, params: ProblemParams, seq: Union[str, Iterable[Point]]) -> Fraction:
    return run(spec, params, seq).total


# ---------------------------------------------------------------------------
# Offline optimum
# ---------------------------------------------------------------------------

def _transition_key(src: Configuration, dst: Configuration, params: ProblemParams):
    # smaller move first, then keep the right server where it is
    return (config_move_cost(src, dst, params), src.right != dst.right, CONFIGURATIONS.index(src))


def opt_cost(params: ProblemParams, seq: Union[str, Iterable[Point]]) -> CostReport:
    """Minimum offline cost by dynamic programming over the three
    noncrossing configurations, with one canonical optimal trace."""
    seq = as_sequence(seq)
    best: dict[Configuration, Fraction] = {INITIAL: Fraction(0)}
    back: list[dict[Configuration, Configuration]] = []
    for p in seq:
        nxt: dict[Configuration, Fraction] = {}
        choice: dict[Configuration, Configuration] = {}
        for dst in CONFIGURATIONS:
            if not dst.covers(p):
                continue
            src = min(
                best,
                key=lambda c: (best[c] + config_move_cost(c, dst, params),) + _transition_key(c, dst, params),
            )
            nxt[dst] = best[src] + config_move_cost(src, dst, params)
            choice[dst] = src
        best = nxt
        back.append(choice)
    if not seq:
        return CostReport(Fraction(0), ())
    end = min(best, key=lambda c: (best[c], CONFIGURATIONS.index(c)))
    path = [end]
    for choice in reversed(back):
        path.append(choice[path[-1]])
    path.reverse()
    trace = []
    for p, src, dst in zip(seq, path, path[1:]):
        moved = [s for s, a, b in (("left", src.left, dst.left), ("right", src.right, dst.right)) if a != b]
        server = None if not moved else (moved[0] if len(moved) == 1 else "both")
        trace.append(Move(p, server, config_move_cost(src, dst, params)))
    report = CostReport.from_trace(trace)
    assert report.total == best[end]
    return report


# ---------------------------------------------------------------------------
# Incremental kernels for exhaustive scans
# ---------------------------------------------------------------------------

Kernel = tuple[Hashable, Callable[[Hashable, Point], tuple[Hashable, Fraction]]]


def cost_kernel(spec: AlgorithmSpec, params: ProblemParams) -> Kernel:
    """``(start, advance)`` where ``advance(state, p)`` returns the next
    hashable state and the cost increment.

    For online algorithms the increment is the move distance.  For the
    offline optimum the state is the vector of optimal prefix costs per
    configuration, shifted so its minimum is zero, and the increment is
    the growth of that minimum; increments therefore sum to Opt(I).
    """
    if spec.kind != "opt":
        spec.validate(params)
        start = _initial_inner(spec, params)

        def advance(state, p):
            new, move = _step_inner(spec, state, p, params)
            return new, move.distance

        return start, advance

    moves = [[config_move_cost(c, e, params) for e in CONFIGURATIONS] for c in CONFIGURATIONS]
    start = tuple(moves[CONFIGURATIONS.index(INITIAL)])
    covering = {p: [i for i, c in enumerate(CONFIGURATIONS) if c.covers(p)] for p in POINTS}

    def advance_opt(state, p):
        served = {i: state[i] for i in covering[p]}
        # an idle configuration is reached by deferring the move, which the
        # triangle inequality makes free of extra cost
        vec = [min(v + moves[i][j] for i, v in served.items()) for j in range(3)]
        low = min(vec)
        return tuple(v - low for v in vec), low

    return start, advance_opt
