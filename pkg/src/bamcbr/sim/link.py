"""Single MPLS/DS-TE link under a configurable bandwidth allocation model.

Class index p runs from 0 to N-1 with higher p meaning higher priority.
The Russian Dolls constraints are suffix sums: for every doll c, the total
bandwidth of classes >= c must stay within bc_rdm[c], with bc_rdm[0] equal
to the link capacity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from bamcbr.errors import SimulationError

MODELS = ("MAM", "RDM", "ATCS")
EPS = 1e-9


@dataclass(frozen=True)
class LinkConfig:
    capacity: float
    bc_mam: tuple[float, ...]
    bc_rdm: tuple[float, ...]
    num_classes: int = 3


def validate_config(cfg: LinkConfig) -> list[str]:
    """Return the list of violated configuration rules (empty when valid)."""
    errors = []
    n = cfg.num_classes
    if n < 1:
        errors.append("num_classes must be positive")
    if cfg.capacity <= 0:
        errors.append("capacity must be positive")
    if len(cfg.bc_mam) != n:
        errors.append(f"bc_mam must have {n} entries")
    if len(cfg.bc_rdm) != n:
        errors.append(f"bc_rdm must have {n} entries")
    for i, bc in enumerate(cfg.bc_mam):
        if bc > cfg.capacity + EPS:
            errors.append(f"bc_mam[{i}] must not exceed capacity")
    if cfg.bc_rdm:
        if abs(cfg.bc_rdm[0] - cfg.capacity) > EPS:
            errors.append("bc_rdm[0] must equal capacity")
        for i in range(1, len(cfg.bc_rdm)):
            if cfg.bc_rdm[i] > cfg.bc_rdm[i - 1] + EPS:
                errors.append(f"bc_rdm[{i}] must be non-increasing")
    return errors


@dataclass
class Lsp:
    id: str
    cls: int
    demand: float
    admitted_at: float
    borrowed: bool = False
    seq: int = 0  # admission order, used for recency tie-breaks


@dataclass(frozen=True)
class LspRequest:
    id: str
    cls: int
    demand: float
    arrival: float
    holding: float

    def __post_init__(self):
        if self.demand <= 0:
            raise SimulationError(f"request {self.id}: demand must be positive")
        if self.holding <= 0:
            raise SimulationError(f"request {self.id}: holding time must be positive")


@dataclass
class AdmitResult:
    status: str  # admitted | admitted_borrowed | blocked
    preempted: tuple[str, ...] = ()
    devolved: tuple[str, ...] = ()

    @property
    def admitted(self) -> bool:
        return self.status != "blocked"


class LinkState:
    """Mutable link state: active LSPs, per-class allocations and counters."""

    def __init__(self, cfg: LinkConfig, model: str = "MAM"):
        if model not in MODELS:
            raise SimulationError(f"unknown model {model!r}")
        self.cfg = cfg
        self.model = model
        self.lsps: dict[str, Lsp] = {}
        self.clock = 0.0
        self.preemptions = 0
        self.devolutions = 0
        self._native = [0.0] * cfg.num_classes
        self._borrowed = [0.0] * cfg.num_classes
        self._seq = 0

    @property
    def total(self) -> float:
        return sum(self._native) + sum(self._borrowed)

    def alloc(self, cls: int) -> float:
        return self._native[cls] + self._borrowed[cls]

    def alloc_vector(self) -> list[float]:
        return [self.alloc(c) for c in range(self.cfg.num_classes)]

    def _add(self, lsp: Lsp) -> None:
        self._seq += 1
        lsp.seq = self._seq
        self.lsps[lsp.id] = lsp
        pool = self._borrowed if lsp.borrowed else self._native
        pool[lsp.cls] += lsp.demand

    def _remove(self, lsp_id: str) -> Lsp:
        lsp = self.lsps.pop(lsp_id)
        pool = self._borrowed if lsp.borrowed else self._native
        pool[lsp.cls] -= lsp.demand
        if abs(pool[lsp.cls]) < EPS:
            pool[lsp.cls] = 0.0
        return lsp


def _rdm_ok(native: list[float], p: int, demand: float, bc_rdm: tuple[float, ...]) -> bool:
    for c in range(p + 1):
        if sum(native[c:]) + demand > bc_rdm[c] + EPS:
            return False
    return True


def _victim_order(lsp: Lsp) -> tuple:
    # lowest class first, largest demand first, most recent first
    return (lsp.cls, -lsp.demand, -lsp.seq)


def _select_preemptions(state: LinkState, p: int, demand: float) -> list[Lsp] | None:
    """Minimal greedy set of lower-priority native LSPs whose removal admits
    the request under the nested constraints, or None if no set suffices."""
    bc_rdm = state.cfg.bc_rdm
    native = list(state._native)
    candidates = sorted((l for l in state.lsps.values() if not l.borrowed and l.cls < p),
                        key=_victim_order)
    victims: list[Lsp] = []
    while True:
        failing = [c for c in range(p + 1) if sum(native[c:]) + demand > bc_rdm[c] + EPS]
        if not failing:
            return victims
        c_min = min(failing)
        pick = next((l for l in candidates if c_min <= l.cls), None)
        if pick is None:
            return None
        candidates.remove(pick)
        victims.append(pick)
        native[pick.cls] -= pick.demand


def _devolve_until(state: LinkState, demand: float) -> list[str]:
    """Devolve borrowed LSPs (lowest class first) until `demand` fits under
    the link capacity."""
    devolved = []
    borrowers = sorted((l for l in state.lsps.values() if l.borrowed), key=_victim_order)
    for borrower in borrowers:
        if state.total + demand <= state.cfg.capacity + EPS:
            break
        state._remove(borrower.id)
        devolved.append(borrower.id)
    state.devolutions += len(devolved)
    return devolved


def admit(state: LinkState, req: LspRequest) -> AdmitResult:
    """Apply the active model's admission rules; mutates state atomically."""
    cfg = state.cfg
    p = req.cls
    if not 0 <= p < cfg.num_classes:
        raise SimulationError(f"request {req.id}: unknown class index {p}")
    d = req.demand
    lsp = Lsp(id=req.id, cls=p, demand=d, admitted_at=state.clock)

    if state.model == "MAM":
        if state._native[p] + d <= cfg.bc_mam[p] + EPS and state.total + d <= cfg.capacity + EPS:
            state._add(lsp)
            return AdmitResult("admitted")
        return AdmitResult("blocked")

    if state.model == "RDM":
        if _rdm_ok(state._native, p, d, cfg.bc_rdm):
            state._add(lsp)
            return AdmitResult("admitted")
        victims = _select_preemptions(state, p, d)
        if victims is None:
            return AdmitResult("blocked")
        for victim in victims:
            state._remove(victim.id)
        state.preemptions += len(victims)
        state._add(lsp)
        return AdmitResult("admitted", preempted=tuple(v.id for v in victims))

    # ATCS: nested rules over native allocations; borrowed bandwidth is
    # reclaimed (devolved) before any native LSP is preempted.
    if _rdm_ok(state._native, p, d, cfg.bc_rdm):
        devolved = []
        if state.total + d > cfg.capacity + EPS:
            devolved = _devolve_until(state, d)
        state._add(lsp)
        return AdmitResult("admitted", devolved=tuple(devolved))
    victims = _select_preemptions(state, p, d)
    if victims is not None:
        for victim in victims:
            state._remove(victim.id)
        state.preemptions += len(victims)
        devolved = []
        if state.total + d > cfg.capacity + EPS:
            devolved = _devolve_until(state, d)
        state._add(lsp)
        return AdmitResult("admitted", preempted=tuple(v.id for v in victims),
                           devolved=tuple(devolved))
    if state.total + d <= cfg.capacity + EPS:
        lsp.borrowed = True
        state._add(lsp)
        return AdmitResult("admitted_borrowed")
    return AdmitResult("blocked")


def release(state: LinkState, lsp_id: str) -> Lsp:
    """Normal teardown of an active LSP; counters are untouched."""
    if lsp_id not in state.lsps:
        raise SimulationError(f"release of unknown LSP {lsp_id!r}")
    return state._remove(lsp_id)


def switch_model(state: LinkState, new_model: str) -> list[str]:
    """Reconfigure the active model; returns the ids of devolved borrowers.

    Existing LSPs are kept, except that leaving ATCS devolves every borrowed
    LSP immediately.
    """
    if new_model not in MODELS:
        raise SimulationError(f"unknown model {new_model!r}")
    if new_model == state.model:
        return []
    devolved = []
    if state.model == "ATCS" and new_model != "ATCS":
        for lsp in sorted((l for l in state.lsps.values() if l.borrowed), key=_victim_order):
            state._remove(lsp.id)
            devolved.append(lsp.id)
        state.devolutions += len(devolved)
    state.model = new_model
    return devolved
