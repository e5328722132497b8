"""Dense ReLU networks with manual backprop, a tanh-squashed Gaussian head
and an Adam optimizer. Everything is float64 numpy and deterministic given
the explicit noise arrays passed in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import TrainingError, UsageError

LOG_SCALE_MIN = -20.0
LOG_SCALE_MAX = 2.0
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class DenseNet:
    """Fully connected net: ReLU hidden layers, linear output.

    Parameters are stored as a flat list ``[W0, b0, W1, b1, ...]`` with
    ``W`` of shape ``(fan_in, fan_out)``; inputs are batch-first.
    """

    def __init__(self, layer_dims, rng=None, final_scale=1e-3, params=None):
        self.layer_dims = [int(d) for d in layer_dims]
        if len(self.layer_dims) < 2:
            raise ValueError("need at least input and output dims")
        if params is not None:
            self.params = [np.array(p, dtype=float) for p in params]
            for i, (a, b) in enumerate(zip(self.layer_dims[:-1], self.layer_dims[1:])):
                if self.params[2 * i].shape != (a, b) or self.params[2 * i + 1].shape != (b,):
                    raise ValueError("parameter shapes do not match layer_dims")
        else:
            rng = rng if rng is not None else np.random.default_rng(0)
            self.params = []
            n_layers = len(self.layer_dims) - 1
            for i, (a, b) in enumerate(zip(self.layer_dims[:-1], self.layer_dims[1:])):
                bound = 1.0 / math.sqrt(a)
                if i == n_layers - 1:
                    bound *= final_scale
                self.params.append(rng.uniform(-bound, bound, size=(a, b)))
                self.params.append(rng.uniform(-bound, bound, size=b))
        self._cache = None

    @property
    def n_layers(self) -> int:
        return len(self.layer_dims) - 1

    def forward(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        h = x[None, :] if single else x
        if h.shape[-1] != self.layer_dims[0]:
            raise UsageError(f"input width {h.shape[-1]} != {self.layer_dims[0]}")
        acts = [h]
        for i in range(self.n_layers):
            z = h @ self.params[2 * i] + self.params[2 * i + 1]
            h = np.maximum(z, 0.0) if i < self.n_layers - 1 else z
            acts.append(h)
        self._cache = (acts, single)
        return h[0] if single else h

    def backward(self, grad_out):
        """Gradients for the last ``forward`` call.

        Returns ``(param_grads, input_grad)`` with ``param_grads`` aligned
        with ``self.params``.
        """
        if self._cache is None:
            raise UsageError("backward called before forward")
        acts, single = self._cache
        g = np.asarray(grad_out, dtype=float)
        if single:
            g = g[None, :]
        grads = [None] * len(self.params)
        for i in reversed(range(self.n_layers)):
            if i < self.n_layers - 1:
                g = g * (acts[i + 1] > 0.0)
            grads[2 * i] = acts[i].T @ g
            grads[2 * i + 1] = g.sum(axis=0)
            g = g @ self.params[2 * i].T
        return grads, (g[0] if single else g)

    def copy(self) -> "DenseNet":
        return DenseNet(self.layer_dims, params=[p.copy() for p in self.params])

    def flat(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params])

    def set_flat(self, vec) -> None:
        vec = np.asarray(vec, dtype=float)
        i = 0
        for p in self.params:
            n = p.size
            p[...] = vec[i:i + n].reshape(p.shape)
            i += n

    def to_dict(self) -> dict:
        return {"layer_dims": self.layer_dims, "params": [p.ravel().tolist() for p in self.params]}

    @classmethod
    def from_dict(cls, d) -> "DenseNet":
        dims = d["layer_dims"]
        params = []
        for i, (a, b) in enumerate(zip(dims[:-1], dims[1:])):
            params.append(np.array(d["params"][2 * i], dtype=float).reshape(a, b))
            params.append(np.array(d["params"][2 * i + 1], dtype=float))
        return cls(dims, params=params)


def softplus(x):
    return np.logaddexp(0.0, x)


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _scale(raw):
    """Positive scale from the raw head output, clamped in log space."""
    s = softplus(raw)
    lo, hi = math.exp(LOG_SCALE_MIN), math.exp(LOG_SCALE_MAX)
    clipped = (s < lo) | (s > hi)
    return np.clip(s, lo, hi), clipped


def log1m_tanh_sq(u):
    """``log(1 - tanh(u)^2)`` without cancellation for large ``|u|``."""
    return 2.0 * (math.log(2.0) - u - softplus(-2.0 * u))


@dataclass
class PolicySample:
    action: np.ndarray
    log_prob: np.ndarray
    mean_action: np.ndarray
    pre_tanh: np.ndarray = None
    cache: tuple = field(default=None, repr=False)


def squash_sample(head, noise) -> PolicySample:
    """Reparameterized tanh-Gaussian sample from raw actor outputs.

    ``head`` has shape ``(..., 2 * n)``: locations then raw scales.
    """
    head = np.asarray(head, dtype=float)
    n = head.shape[-1] // 2
    loc, raw = head[..., :n], head[..., n:]
    sigma, clipped = _scale(raw)
    eps = np.asarray(noise, dtype=float)
    u = loc + sigma * eps
    a = np.tanh(u)
    logp = np.sum(-0.5 * eps * eps - np.log(sigma) - HALF_LOG_2PI - log1m_tanh_sq(u), axis=-1)
    return PolicySample(a, logp, np.tanh(loc), u, (raw, sigma, clipped, eps, a))


def squash_backward(sample: PolicySample, grad_action, grad_log_prob):
    """Gradient w.r.t. the raw head given upstream grads on action and log-prob."""
    raw, sigma, clipped, eps, a = sample.cache
    g_lp = np.asarray(grad_log_prob, dtype=float)[..., None]
    g_u = np.asarray(grad_action, dtype=float) * (1.0 - a * a) + g_lp * 2.0 * a
    g_sigma = g_u * eps - g_lp / sigma
    g_raw = np.where(clipped, 0.0, g_sigma * sigmoid(raw))
    return np.concatenate((g_u, g_raw), axis=-1)


def sample_policy(actor: DenseNet, state, noise) -> PolicySample:
    return squash_sample(actor.forward(state), noise)


def log_prob_of(head, pre_tanh):
    """Log-density of an already-taken action, given its pre-squash value.

    Returns ``(log_prob, grad_fn)``; ``grad_fn(g)`` maps an upstream
    gradient on the log-prob to a gradient on ``head``.
    """
    head = np.asarray(head, dtype=float)
    n = head.shape[-1] // 2
    loc, raw = head[..., :n], head[..., n:]
    sigma, clipped = _scale(raw)
    z = (pre_tanh - loc) / sigma
    logp = np.sum(-0.5 * z * z - np.log(sigma) - HALF_LOG_2PI - log1m_tanh_sq(pre_tanh), axis=-1)

    def grad_fn(g):
        g = np.asarray(g, dtype=float)[..., None]
        g_loc = g * z / sigma
        g_sigma = g * (z * z - 1.0) / sigma
        g_raw = np.where(clipped, 0.0, g_sigma * sigmoid(raw))
        return np.concatenate((g_loc, g_raw), axis=-1)

    return logp, grad_fn


@dataclass
class Adam:
    """Bias-corrected adaptive moment optimizer over a list of arrays."""

    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = None
    v: list = None

    def step(self, params, grads) -> None:
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        if len(grads) != len(params):
            raise UsageError("gradient list does not match parameters")
        for g in grads:
            if not np.all(np.isfinite(g)):
                raise TrainingError("non-finite gradient")
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            if p.shape != g.shape:
                raise UsageError(f"gradient shape {g.shape} != parameter shape {p.shape}")
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)

    def to_dict(self) -> dict:
        return {
            "lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps, "t": self.t,
            "m": None if self.m is None else [a.ravel().tolist() for a in self.m],
            "v": None if self.v is None else [a.ravel().tolist() for a in self.v],
        }

    @classmethod
    def from_dict(cls, d, shapes) -> "Adam":
        opt = cls(lr=d["lr"], beta1=d["beta1"], beta2=d["beta2"], eps=d["eps"], t=d["t"])
        if d["m"] is not None:
            opt.m = [np.array(a, dtype=float).reshape(s) for a, s in zip(d["m"], shapes)]
            opt.v = [np.array(a, dtype=float).reshape(s) for a, s in zip(d["v"], shapes)]
        return opt

