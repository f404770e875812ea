"""Adam with L2 weight decay folded into the gradient (the pre-AdamW formulation)."""
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, SpecError, UsageError


@dataclass
class AdamState:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_decay: float = 0.0
    step_count: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise SpecError(f"learning rate must be positive, got {self.learning_rate}")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise SpecError("beta1 and beta2 must lie in (0, 1)")
        if self.epsilon <= 0 or self.weight_decay < 0:
            raise SpecError("epsilon must be positive and weight_decay non-negative")


def adam_step(params, grads, state, zero_grad=True):
    """One in-place Adam update of `params` (Tensors) given matching `grads` (arrays).

    Moment buffers are created lazily on the first call. With ``zero_grad`` the
    parameters' ``.grad`` accumulators are cleared afterwards.
    """
    params = list(params)
    grads = list(grads)
    if len(params) != len(grads):
        raise DimensionError(f"{len(params)} parameters but {len(grads)} gradients")
    if not state.m:
        state.m = [np.zeros_like(p.data) for p in params]
        state.v = [np.zeros_like(p.data) for p in params]
    if len(state.m) != len(params):
        raise DimensionError(f"optimizer holds {len(state.m)} moment buffers for {len(params)} parameters")

    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    step = state.learning_rate * np.sqrt(1.0 - b2 ** t) / (1.0 - b1 ** t)
    eps_hat = state.epsilon * np.sqrt(1.0 - b2 ** t)
    for i, (p, g) in enumerate(zip(params, grads)):
        if g is None:
            raise UsageError(f"parameter {i} has no gradient; call backward() before adam_step")
        m, v = state.m[i], state.v[i]
        if m.shape != p.data.shape or g.shape != p.data.shape:
            raise DimensionError(
                f"parameter {i}: shape {p.data.shape}, gradient {g.shape}, moment buffer {m.shape}"
            )
        g = g.astype(p.data.dtype, copy=False)
        if state.weight_decay:
            g = g + state.weight_decay * p.data
        m *= b1
        m += (1 - b1) * g
        v *= b2
        v += (1 - b2) * (g * g)
        # lr * m_hat / (sqrt(v_hat) + eps), rearranged to avoid two extra temporaries
        p.data -= (step * m / (np.sqrt(v) + eps_hat)).astype(p.data.dtype, copy=False)
        if zero_grad:
            p.grad = None
