"""Blow-up criterion evaluation and report."""

from dataclasses import asdict, dataclass

import numpy as np

from ..riccati import blowup_time_bound, envelopes

__all__ = ["BlowupReport", "detect_blowup"]


@dataclass
class BlowupReport:
    N: float
    Y: float
    Q: float
    inf_y0: float
    inf_q0: float
    eps: float
    criterion_y: bool
    criterion_q: bool
    predicted_T_bound: float | None
    detected_T: float | None
    detected_bracket: list | None
    trigger: str | None
    triggering_x: float | None
    fd_growth: float | None
    status: str

    @property
    def criterion(self):
        return self.criterion_y or self.criterion_q

    def to_dict(self):
        d = asdict(self)
        d["criterion"] = self.criterion
        return d


def detect_blowup(trajectory, N, eps, a2_bound):
    """Evaluate the blow-up criterion on the initial level and summarise the run.

    The criterion is ``inf y0 < -(1+eps) N`` (forward) or the same for q
    (backward). The time bound uses whichever triggered side gives the
    smaller bound.
    """
    y0 = trajectory.fields["y"][0]
    q0 = trajectory.fields["q"][0]
    Y, Q = envelopes(N, y0, q0)
    inf_y0, inf_q0 = float(np.min(y0)), float(np.min(q0))
    thr = -(1.0 + eps) * N
    cy, cq = inf_y0 < thr, inf_q0 < thr
    bounds = []
    for ok, v in ((cy, inf_y0), (cq, inf_q0)):
        if ok:
            bounds.append(blowup_time_bound(v, eps, a2_bound.k14, a2_bound.k15))
    b = trajectory.blowup
    return BlowupReport(
        N=float(N), Y=Y, Q=Q, inf_y0=inf_y0, inf_q0=inf_q0, eps=float(eps),
        criterion_y=bool(cy), criterion_q=bool(cq),
        predicted_T_bound=float(min(bounds)) if bounds else None,
        detected_T=None if b is None else float(b["time"]),
        detected_bracket=None if b is None else [float(v) for v in b["bracket"]],
        trigger=None if b is None else b["trigger"],
        triggering_x=None if b is None else float(b["x"]),
        fd_growth=None if b is None else float(b["fd_growth"]),
        status=trajectory.status,
    )
