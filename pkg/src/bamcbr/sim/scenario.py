"""Seeded traffic generation, the windowed event loop, and scenario files."""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable

import yaml

from bamcbr.errors import ScenarioError, SimulationError
from bamcbr.sim.link import (
    MODELS,
    AdmitResult,
    LinkConfig,
    LinkState,
    LspRequest,
    admit,
    release,
    switch_model,
    validate_config,
)

TRACE_HEADER = "time,kind,lsp,class,demand,outcome,preempted,devolved,total_alloc"


@dataclass(frozen=True)
class TrafficClassProfile:
    cls: int
    arrival_rate: float
    mean_hold: float
    demand_min: float
    demand_max: float

    def __post_init__(self):
        if self.arrival_rate <= 0:
            raise ScenarioError(f"class {self.cls}: arrival_rate must be positive")
        if self.mean_hold <= 0:
            raise ScenarioError(f"class {self.cls}: mean_hold must be positive")
        if not 0 < self.demand_min <= self.demand_max:
            raise ScenarioError(f"class {self.cls}: demand range must satisfy 0 < min <= max")


@dataclass(frozen=True)
class Scenario:
    link: LinkConfig
    traffic: tuple[TrafficClassProfile, ...]
    duration: float
    window: float
    seed: int
    initial_model: str = "MAM"
    cbr: dict = field(default_factory=dict)


@dataclass
class Measurements:
    """Per-window link measurements consumed by the CBR engine."""

    window_start: float
    window_end: float
    utilization: float
    throughput: float
    blocking: float
    preemptions: int
    devolutions: int
    offered: float
    carried: float
    requests: int
    blocked: int
    loss: float | None = None


@dataclass(frozen=True)
class TraceEvent:
    time: float
    kind: str  # arrival | departure | switch
    lsp_id: str
    cls: int
    demand: float
    outcome: str
    preempted: tuple[str, ...]
    devolved: tuple[str, ...]
    total_alloc: float

    def line(self) -> str:
        return (f"{self.time:.6f},{self.kind},{self.lsp_id},{self.cls},"
                f"{self.demand:.6f},{self.outcome},{';'.join(self.preempted)},"
                f"{';'.join(self.devolved)},{self.total_alloc:.6f}")


def generate_requests(traffic: Iterable[TrafficClassProfile], seed: int,
                      duration: float) -> list[LspRequest]:
    """Poisson arrivals per class, exponential holding, uniform demand.

    Each class draws from its own seeded substream, so the schedule is stable
    under reordering of the profile list.
    """
    raw: list[tuple[float, int, float, float]] = []
    for profile in traffic:
        rng = random.Random(f"{seed}/{profile.cls}")
        t = 0.0
        while True:
            t += rng.expovariate(profile.arrival_rate)
            if t >= duration:
                break
            hold = rng.expovariate(1.0 / profile.mean_hold)
            if profile.demand_min == profile.demand_max:
                demand = profile.demand_min
            else:
                demand = rng.uniform(profile.demand_min, profile.demand_max)
            raw.append((t, profile.cls, hold, demand))
    raw.sort(key=lambda r: (r[0], r[1]))
    return [LspRequest(id=f"lsp-{i:06d}", cls=cls, demand=demand, arrival=t, holding=hold)
            for i, (t, cls, hold, demand) in enumerate(raw)]


class Simulation:
    """Windowed discrete-event run of one link under one model.

    Arrivals are processed before departures at equal timestamps, then in id
    order. Events at a window boundary belong to the following window.
    """

    def __init__(self, cfg: LinkConfig, model: str, requests: list[LspRequest],
                 duration: float, window: float,
                 on_event: Callable[[LinkState, TraceEvent], None] | None = None):
        errors = validate_config(cfg)
        if errors:
            raise ScenarioError("; ".join(errors))
        if window <= 0:
            raise ScenarioError("window must be positive")
        self.cfg = cfg
        self.state = LinkState(cfg, model)
        self.requests = sorted(requests, key=lambda r: (r.arrival, r.id))
        self.duration = duration
        self.window = window
        self.trace: list[TraceEvent] = []
        self.windows: list[Measurements] = []
        self._on_event = on_event
        self._arrival_idx = 0
        self._departures: list[tuple[float, str]] = []  # heap of (time, lsp id)
        self._window_end = window
        # window accumulators
        self._util_integral = 0.0
        self._offered = 0.0
        self._carried = 0.0
        self._requests = 0
        self._blocked = 0
        self._preempt_base = 0
        self._devolve_base = 0

    @property
    def clock(self) -> float:
        return self.state.clock

    @property
    def done(self) -> bool:
        return self._window_end > self.duration + 1e-9

    def _record(self, event: TraceEvent) -> None:
        self.trace.append(event)
        if self._on_event is not None:
            self._on_event(self.state, event)

    def _integrate_to(self, t: float) -> None:
        self._util_integral += self.state.total * (t - self.state.clock)
        self.state.clock = t

    def switch(self, new_model: str) -> list[str]:
        """Apply a model switch at the current clock; records a trace event."""
        old = self.state.model
        devolved = switch_model(self.state, new_model)
        if new_model != old:
            self._record(TraceEvent(self.state.clock, "switch", "", -1, 0.0,
                                    f"{old}->{new_model}", (), tuple(devolved),
                                    self.state.total))
        return devolved

    def _next_event(self) -> tuple[float, int] | None:
        """(time, kind) of the next event; kind 0 = arrival, 1 = departure."""
        arr = (self.requests[self._arrival_idx].arrival
               if self._arrival_idx < len(self.requests) else None)
        dep = self._departures[0][0] if self._departures else None
        if arr is None and dep is None:
            return None
        if dep is None or (arr is not None and arr <= dep):
            return (arr, 0)
        return (dep, 1)

    def _process_arrival(self) -> None:
        req = self.requests[self._arrival_idx]
        self._arrival_idx += 1
        self._requests += 1
        self._offered += req.demand
        result = admit(self.state, req)
        if result.admitted:
            self._carried += req.demand
            heapq.heappush(self._departures, (req.arrival + req.holding, req.id))
        else:
            self._blocked += 1
        self._record(TraceEvent(req.arrival, "arrival", req.id, req.cls, req.demand,
                                result.status, result.preempted, result.devolved,
                                self.state.total))

    def _process_departure(self) -> None:
        t, lsp_id = heapq.heappop(self._departures)
        if lsp_id not in self.state.lsps:
            return  # torn down earlier by preemption or devolution
        lsp = release(self.state, lsp_id)
        self._record(TraceEvent(t, "departure", lsp_id, lsp.cls, lsp.demand,
                                "released", (), (), self.state.total))

    def advance_window(self) -> Measurements | None:
        """Run the event loop to the next window boundary; None when finished."""
        if self.done:
            return None
        while True:
            nxt = self._next_event()
            if nxt is None or nxt[0] >= self._window_end:
                break
            self._integrate_to(nxt[0])
            if nxt[1] == 0:
                self._process_arrival()
            else:
                self._process_departure()
        self._integrate_to(self._window_end)
        m = Measurements(
            window_start=self._window_end - self.window,
            window_end=self._window_end,
            utilization=self._util_integral / (self.cfg.capacity * self.window),
            throughput=(self._carried / self._offered) if self._offered > 0 else 1.0,
            blocking=(self._blocked / self._requests) if self._requests > 0 else 0.0,
            preemptions=self.state.preemptions - self._preempt_base,
            devolutions=self.state.devolutions - self._devolve_base,
            offered=self._offered,
            carried=self._carried,
            requests=self._requests,
            blocked=self._blocked,
        )
        self.windows.append(m)
        self._util_integral = 0.0
        self._offered = self._carried = 0.0
        self._requests = self._blocked = 0
        self._preempt_base = self.state.preemptions
        self._devolve_base = self.state.devolutions
        self._window_end += self.window
        return m

    def run(self, on_window: Callable[["Simulation", Measurements], None] | None = None
            ) -> list[Measurements]:
        while (m := self.advance_window()) is not None:
            if on_window is not None:
                on_window(self, m)
        return self.windows


def run_scenario(scenario: Scenario, model: str | None = None) -> Simulation:
    """Run a scenario under a fixed model (no CBR control)."""
    requests = generate_requests(scenario.traffic, scenario.seed, scenario.duration)
    sim = Simulation(scenario.link, model or scenario.initial_model, requests,
                     scenario.duration, scenario.window)
    sim.run()
    return sim


def measure(events: Iterable[TraceEvent], window_start: float, window_end: float,
            capacity: float, alloc_at_start: float = 0.0) -> Measurements:
    """Recompute one window's measurements from a trace slice."""
    if window_end <= window_start:
        raise SimulationError("measurement window must be non-empty")
    util_integral = 0.0
    offered = carried = 0.0
    requests = blocked = 0
    preemptions = devolutions = 0
    clock = window_start
    alloc = alloc_at_start
    for ev in events:
        if not window_start <= ev.time < window_end:
            continue
        util_integral += alloc * (ev.time - clock)
        clock = ev.time
        alloc = ev.total_alloc
        preemptions += len(ev.preempted)
        devolutions += len(ev.devolved)
        if ev.kind == "arrival":
            requests += 1
            offered += ev.demand
            if ev.outcome == "blocked":
                blocked += 1
            else:
                carried += ev.demand
    util_integral += alloc * (window_end - clock)
    return Measurements(
        window_start=window_start,
        window_end=window_end,
        utilization=util_integral / (capacity * (window_end - window_start)),
        throughput=(carried / offered) if offered > 0 else 1.0,
        blocking=(blocked / requests) if requests > 0 else 0.0,
        preemptions=preemptions,
        devolutions=devolutions,
        offered=offered,
        carried=carried,
        requests=requests,
        blocked=blocked,
    )


def write_trace(path: str | Path, trace: Iterable[TraceEvent]) -> None:
    lines = [TRACE_HEADER]
    lines.extend(ev.line() for ev in trace)
    Path(path).write_text("\n".join(lines) + "\n")


# -- scenario files ----------------------------------------------------------

def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ScenarioError(f"missing key {key!r} in {context}")
    return mapping[key]


def scenario_from_dict(data: dict) -> Scenario:
    link_data = _require(data, "link", "scenario")
    classes = int(link_data.get("classes", 3))
    link = LinkConfig(
        capacity=float(_require(link_data, "capacity", "link")),
        bc_mam=tuple(float(x) for x in _require(link_data, "bc_mam", "link")),
        bc_rdm=tuple(float(x) for x in _require(link_data, "bc_rdm", "link")),
        num_classes=classes,
    )
    errors = validate_config(link)
    if errors:
        raise ScenarioError("invalid link config: " + "; ".join(errors))
    traffic = []
    for i, entry in enumerate(_require(data, "traffic", "scenario")):
        traffic.append(TrafficClassProfile(
            cls=int(_require(entry, "class", f"traffic[{i}]")),
            arrival_rate=float(_require(entry, "arrival_rate", f"traffic[{i}]")),
            mean_hold=float(_require(entry, "mean_hold", f"traffic[{i}]")),
            demand_min=float(_require(entry, "demand_min", f"traffic[{i}]")),
            demand_max=float(_require(entry, "demand_max", f"traffic[{i}]")),
        ))
        if not 0 <= traffic[-1].cls < classes:
            raise ScenarioError(f"traffic[{i}]: class index out of range")
    initial_model = str(data.get("initial_model", "MAM"))
    if initial_model not in MODELS:
        raise ScenarioError(f"unknown initial_model {initial_model!r}")
    duration = float(_require(data, "duration", "scenario"))
    window = float(_require(data, "window", "scenario"))
    if duration <= 0 or window <= 0:
        raise ScenarioError("duration and window must be positive")
    return Scenario(
        link=link,
        traffic=tuple(traffic),
        duration=duration,
        window=window,
        seed=int(_require(data, "seed", "scenario")),
        initial_model=initial_model,
        cbr=dict(data.get("cbr", {})),
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ScenarioError(f"cannot parse scenario file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"scenario file {path} must contain a mapping")
    return scenario_from_dict(data)
