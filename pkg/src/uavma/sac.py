"""Soft actor-critic with twin critics and automatic temperature, plus a
one-step advantage actor-critic baseline.

Every stochastic choice draws from generators derived from a single agent
seed, so a ``(seed, config, scenario)`` triple reproduces a run bit for bit.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .env import CollectionEnv, EnvConfig
from .errors import ParameterError, TrainingError
from .neural import Adam, DenseNet, log_prob_of, sample_policy, squash_backward, squash_sample
from .world import Scenario, generate_scenario

LOG_COLUMNS = ("env_step", "episode", "return", "episode_len", "total_time_s", "energy_J",
               "alpha", "critic_loss", "actor_loss")


@dataclass
class SacConfig:
    gamma: float = 0.99
    tau: float = 0.005
    alpha_init: float = 0.2
    target_entropy: float | None = None
    batch_size: int = 256
    buffer_capacity: int = 1_000_000
    lr_actor: float = 3e-4
    lr_critic: float = 3e-4
    lr_alpha: float = 3e-4
    warmup_steps: int = 5000
    updates_per_step: int = 1
    total_steps: int = 200_000
    eval_interval: int = 10_000
    hidden: tuple = (256, 256)
    reward_scale: float = 1.0

    def __post_init__(self):
        self.hidden = tuple(int(h) for h in self.hidden)
        problems = {}
        if not 0 < self.gamma < 1:
            problems["gamma"] = "must lie in (0, 1)"
        if not 0 < self.tau <= 1:
            problems["tau"] = "must lie in (0, 1]"
        if not self.alpha_init > 0:
            problems["alpha_init"] = "must be positive"
        if self.batch_size < 1 or self.batch_size > self.buffer_capacity:
            problems["batch_size"] = "must lie in [1, buffer_capacity]"
        for k in ("lr_actor", "lr_critic", "lr_alpha", "reward_scale"):
            if not getattr(self, k) > 0:
                problems[k] = "must be positive"
        for k in ("warmup_steps", "total_steps"):
            if getattr(self, k) < 0:
                problems[k] = "must be non-negative"
        for k in ("updates_per_step", "eval_interval"):
            if getattr(self, k) < 1:
                problems[k] = "must be >= 1"
        if problems:
            raise ParameterError("; ".join(f"{k}: {v}" for k, v in problems.items()))


@dataclass
class AcConfig:
    gamma: float = 0.99
    lr_actor: float = 3e-4
    lr_critic: float = 1e-3
    total_steps: int = 200_000
    hidden: tuple = (256, 256)
    reward_scale: float = 1.0

    def __post_init__(self):
        self.hidden = tuple(int(h) for h in self.hidden)
        if not 0 < self.gamma < 1:
            raise ParameterError("gamma: must lie in (0, 1)")


class ReplayBuffer:
    """Fixed-capacity ring buffer of ``(s, a, r, s', done)`` transitions."""

    def __init__(self, capacity: int, state_dim: int, action_dim: int):
        self.capacity = int(capacity)
        self.s = np.zeros((capacity, state_dim))
        self.a = np.zeros((capacity, action_dim))
        self.r = np.zeros(capacity)
        self.s2 = np.zeros((capacity, state_dim))
        self.done = np.zeros(capacity)
        self.size = 0
        self._next = 0

    def __len__(self):
        return self.size

    def add(self, s, a, r, s2, done) -> None:
        i = self._next
        self.s[i], self.a[i], self.r[i], self.s2[i], self.done[i] = s, a, r, s2, float(done)
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def _ordered(self):
        if self.size < self.capacity:
            return np.arange(self.size)
        return (np.arange(self.capacity) + self._next) % self.capacity

    def contents(self) -> dict:
        """All stored transitions, oldest first."""
        idx = self._ordered()
        return {"s": self.s[idx], "a": self.a[idx], "r": self.r[idx], "s2": self.s2[idx], "done": self.done[idx]}

    def sample(self, batch_size: int, rng) -> dict:
        """Uniform draw without replacement."""
        idx = rng.choice(self.size, size=batch_size, replace=False)
        return {"s": self.s[idx], "a": self.a[idx], "r": self.r[idx], "s2": self.s2[idx], "done": self.done[idx]}


@dataclass
class Agent:
    actor: DenseNet
    critic1: DenseNet
    critic2: DenseNet
    target1: DenseNet
    target2: DenseNet
    log_alpha: np.ndarray
    opt_actor: Adam
    opt_critic1: Adam
    opt_critic2: Adam
    opt_alpha: Adam
    state_dim: int
    action_dim: int

    @property
    def alpha(self) -> float:
        return float(math.exp(self.log_alpha[0]))

    def act(self, obs, noise=None) -> np.ndarray:
        """Stochastic action for ``noise``; mean action when ``noise`` is None."""
        head = self.actor.forward(obs)
        if noise is None:
            return np.tanh(head[: self.action_dim])
        return squash_sample(head, noise).action


def make_agent(state_dim: int, action_dim: int, config: SacConfig, rng) -> Agent:
    hidden = list(config.hidden)
    actor = DenseNet([state_dim, *hidden, 2 * action_dim], rng)
    c1 = DenseNet([state_dim + action_dim, *hidden, 1], rng)
    c2 = DenseNet([state_dim + action_dim, *hidden, 1], rng)
    return Agent(
        actor=actor, critic1=c1, critic2=c2, target1=c1.copy(), target2=c2.copy(),
        log_alpha=np.array([math.log(config.alpha_init)]),
        opt_actor=Adam(config.lr_actor), opt_critic1=Adam(config.lr_critic),
        opt_critic2=Adam(config.lr_critic), opt_alpha=Adam(config.lr_alpha),
        state_dim=state_dim, action_dim=action_dim,
    )


def soft_target(r, done, q1_next, q2_next, logp_next, gamma: float, alpha: float):
    """``r + (1 - done) * gamma * (min(q1, q2) - alpha * logp)``."""
    return r + (1.0 - done) * gamma * (np.minimum(q1_next, q2_next) - alpha * logp_next)


def target_value(batch, agent: Agent, gamma: float, alpha: float, noise):
    """Bootstrapped critic targets; a fresh action is sampled at ``s'``.

    Nothing here is differentiated, so no gradient reaches the target nets.
    """
    nxt = sample_policy(agent.actor, batch["s2"], noise)
    x = np.concatenate((batch["s2"], nxt.action), axis=1)
    q1 = agent.target1.forward(x)[:, 0]
    q2 = agent.target2.forward(x)[:, 0]
    return soft_target(batch["r"], batch["done"], q1, q2, nxt.log_prob, gamma, alpha)


def critic_loss_and_grads(critic: DenseNet, s, a, y):
    q = critic.forward(np.concatenate((s, a), axis=1))[:, 0]
    err = q - y
    loss = float(np.mean(err * err))
    grads, _ = critic.backward((2.0 / len(y)) * err[:, None])
    return loss, grads


def critic_update(batch, agent: Agent, y):
    losses = []
    for net, opt in ((agent.critic1, agent.opt_critic1), (agent.critic2, agent.opt_critic2)):
        loss, grads = critic_loss_and_grads(net, batch["s"], batch["a"], y)
        if not math.isfinite(loss):
            raise TrainingError(f"non-finite critic loss {loss}")
        opt.step(net.params, grads)
        losses.append(loss)
    return tuple(losses)


def actor_loss_and_grads(agent: Agent, s, noise, alpha: float):
    """Mean of ``alpha * logp(a|s) - min(Q1, Q2)(s, a)`` with reparameterized ``a``.

    Returns ``(loss, actor_grads, logp)``.
    """
    n = len(s)
    smp = squash_sample(agent.actor.forward(s), noise)
    x = np.concatenate((s, smp.action), axis=1)
    q1 = agent.critic1.forward(x)[:, 0]
    q2 = agent.critic2.forward(x)[:, 0]
    use1 = q1 <= q2
    _, gx1 = agent.critic1.backward(np.where(use1, -1.0 / n, 0.0)[:, None])
    _, gx2 = agent.critic2.backward(np.where(use1, 0.0, -1.0 / n)[:, None])
    g_action = (gx1 + gx2)[:, agent.state_dim:]
    loss = float(np.mean(alpha * smp.log_prob - np.minimum(q1, q2)))
    g_head = squash_backward(smp, g_action, np.full(n, alpha / n))
    grads, _ = agent.actor.backward(g_head)
    return loss, grads, smp.log_prob


def actor_update(batch, agent: Agent, noise):
    loss, grads, logp = actor_loss_and_grads(agent, batch["s"], noise, agent.alpha)
    if not math.isfinite(loss):
        raise TrainingError(f"non-finite actor loss {loss}")
    agent.opt_actor.step(agent.actor.params, grads)
    return loss, logp


def alpha_loss_and_grad(log_alpha: float, logp, target_entropy: float):
    """``mean(-alpha * (logp + H_target))`` and its derivative in ``log_alpha``."""
    alpha = math.exp(log_alpha)
    m = float(np.mean(logp + target_entropy))
    return -alpha * m, -alpha * m


def alpha_update(logp, agent: Agent, target_entropy: float) -> float:
    _, g = alpha_loss_and_grad(float(agent.log_alpha[0]), logp, target_entropy)
    agent.opt_alpha.step([agent.log_alpha], [np.array([g])])
    return agent.alpha


def polyak_update(agent: Agent, tau: float) -> None:
    if not 0 < tau <= 1:
        raise ParameterError("tau must lie in (0, 1]")
    for src, dst in ((agent.critic1, agent.target1), (agent.critic2, agent.target2)):
        for p, tp in zip(src.params, dst.params):
            tp *= 1.0 - tau
            tp += tau * p


def update_cycle(agent: Agent, buffer: ReplayBuffer, config: SacConfig, batch_rng, noise_rng):
    """One critic/actor/temperature/target update on a sampled mini-batch."""
    batch = buffer.sample(config.batch_size, batch_rng)
    target_entropy = -agent.action_dim if config.target_entropy is None else config.target_entropy
    shape = (config.batch_size, agent.action_dim)
    y = target_value(batch, agent, config.gamma, agent.alpha, noise_rng.standard_normal(shape))
    c1, c2 = critic_update(batch, agent, y)
    a_loss, logp = actor_update(batch, agent, noise_rng.standard_normal(shape))
    alpha_update(logp, agent, target_entropy)
    polyak_update(agent, config.tau)
    return 0.5 * (c1 + c2), a_loss


def fixed_scenario_factory(scenario: Scenario, env_config: EnvConfig | None = None):
    """Every episode replays the same scenario."""
    env = CollectionEnv(scenario, env_config)
    return lambda episode: env


def random_scenario_factory(seed: int, K: int, L: float, env_config: EnvConfig | None = None, H=30.0,
                            volume_range=(1e5, 5e5)):
    """Episode ``i`` uses the scenario generated from ``seed + i``."""
    return lambda episode: CollectionEnv(generate_scenario(seed + episode, K, L, H, volume_range), env_config)


def _streams(seed: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(4)]


def train(env_factory: Callable, config: SacConfig, seed: int, log_path=None, checkpoint_dir=None,
          meta=None):
    """Run the SAC loop for ``config.total_steps`` environment steps.

    Actions are uniform in ``[-1, 1]^n`` for the first ``warmup_steps``
    steps. Updates start once the buffer holds a full batch. Step-cap
    truncations still bootstrap from ``s'``.

    Returns ``(agent, log)`` with one log row per finished episode.
    """
    init_rng, explore_rng, batch_rng, noise_rng = _streams(seed)
    episode = 0
    env = env_factory(episode)
    env.reset()
    obs = env.observation()
    agent = make_agent(env.state_dim, env.action_dim, config, init_rng)
    buffer = ReplayBuffer(min(config.buffer_capacity, max(config.total_steps, config.batch_size)),
                          env.state_dim, env.action_dim)
    log = []
    ep_return, ep_len, c_losses, a_losses = 0.0, 0, [], []
    if checkpoint_dir is not None:
        os.makedirs(checkpoint_dir, exist_ok=True)

    for step in range(1, config.total_steps + 1):
        if step <= config.warmup_steps:
            a = explore_rng.uniform(-1.0, 1.0, env.action_dim)
        else:
            a = agent.act(obs, explore_rng.standard_normal(env.action_dim))
        out = env.step(a)
        obs2 = env.observation(out.next_state)
        buffer.add(obs, a, config.reward_scale * out.reward, obs2, out.info["terminal"])
        ep_return += out.reward
        ep_len += 1
        obs = obs2

        if len(buffer) >= config.batch_size:
            for _ in range(config.updates_per_step):
                c, al = update_cycle(agent, buffer, config, batch_rng, noise_rng)
                c_losses.append(c)
                a_losses.append(al)

        if out.done:
            summ = env.summary()
            log.append({
                "env_step": step, "episode": episode, "return": ep_return, "episode_len": ep_len,
                "total_time_s": summ.total_time, "energy_J": summ.total_energy, "alpha": agent.alpha,
                "critic_loss": float(np.mean(c_losses)) if c_losses else float("nan"),
                "actor_loss": float(np.mean(a_losses)) if a_losses else float("nan"),
            })
            episode += 1
            env = env_factory(episode)
            env.reset()
            obs = env.observation()
            ep_return, ep_len, c_losses, a_losses = 0.0, 0, [], []

        if checkpoint_dir is not None and step % config.eval_interval == 0:
            save_checkpoint(agent, os.path.join(checkpoint_dir, f"step_{step:08d}.json"), meta)

    if log_path is not None:
        write_log(log, log_path)
    return agent, log


def write_log(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=LOG_COLUMNS, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})


def read_log(path) -> list:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [{k: (int(v) if k in ("env_step", "episode", "episode_len") else float(v)) for k, v in r.items()}
            for r in rows]


def run_episode(env: CollectionEnv, policy: Callable):
    """Roll out ``policy(obs) -> normalized action`` until the episode ends."""
    env.reset()
    ret = 0.0
    done = False
    while not done:
        out = env.step(policy(env.observation()))
        ret += out.reward
        done = out.done
    return env.summary(), ret


def evaluate(agent, env_factory: Callable, episodes: int, record=None):
    """Deterministic (mean-action) rollouts and aggregate metrics.

    ``record``, if given, is called with ``(episode, env)`` after each one.
    """
    summaries, returns = [], []
    for i in range(episodes):
        env = env_factory(i)
        summ, ret = run_episode(env, agent.act)
        summaries.append(summ)
        returns.append(ret)
        if record is not None:
            record(i, env)
    n = len(summaries)
    return {
        "episodes": summaries,
        "returns": returns,
        "mean_total_time": sum(s.total_time for s in summaries) / n,
        "mean_energy": sum(s.total_energy for s in summaries) / n,
        "mean_flight_distance": sum(s.flight_distance for s in summaries) / n,
        "mean_return": sum(returns) / n,
        "success_rate": sum(1 for s in summaries if s.success) / n,
    }


# ---------------------------------------------------------------- checkpoints

def save_checkpoint(agent, path, meta=None) -> None:
    """JSON container of nets, optimizer moments and temperature."""
    nets = {k: getattr(agent, k) for k in _net_names(agent)}
    opts = {k: getattr(agent, k) for k in _opt_names(agent)}
    blob = {
        "kind": type(agent).__name__,
        "state_dim": agent.state_dim,
        "action_dim": agent.action_dim,
        "nets": {k: n.to_dict() for k, n in nets.items()},
        "optimizers": {k: o.to_dict() for k, o in opts.items()},
        "log_alpha": agent.log_alpha.tolist() if hasattr(agent, "log_alpha") else None,
        "meta": meta or {},
    }
    with open(path, "w") as fh:
        json.dump(blob, fh, allow_nan=False)


def load_checkpoint(path):
    with open(path) as fh:
        blob = json.load(fh)
    nets = {k: DenseNet.from_dict(v) for k, v in blob["nets"].items()}
    opts = {k: Adam.from_dict(v, [p.shape for p in nets[_OPT_TO_NET[k]].params] if k != "opt_alpha" else [(1,)])
            for k, v in blob["optimizers"].items()}
    if blob["kind"] == "Agent":
        agent = Agent(**nets, **opts, log_alpha=np.array(blob["log_alpha"], dtype=float),
                      state_dim=blob["state_dim"], action_dim=blob["action_dim"])
    else:
        agent = AcAgent(**nets, **opts, state_dim=blob["state_dim"], action_dim=blob["action_dim"])
    return agent, blob["meta"]


_OPT_TO_NET = {"opt_actor": "actor", "opt_critic1": "critic1", "opt_critic2": "critic2",
               "opt_value": "value", "opt_alpha": None}


def _net_names(agent):
    if isinstance(agent, Agent):
        return ("actor", "critic1", "critic2", "target1", "target2")
    return ("actor", "value")


def _opt_names(agent):
    if isinstance(agent, Agent):
        return ("opt_actor", "opt_critic1", "opt_critic2", "opt_alpha")
    return ("opt_actor", "opt_value")


# ------------------------------------------------------------ actor-critic

@dataclass
class AcAgent:
    """Single state-value critic and a squashed-Gaussian actor."""

    actor: DenseNet
    value: DenseNet
    opt_actor: Adam
    opt_value: Adam
    state_dim: int
    action_dim: int

    def act(self, obs, noise=None) -> np.ndarray:
        head = self.actor.forward(obs)
        if noise is None:
            return np.tanh(head[: self.action_dim])
        return squash_sample(head, noise).action


def make_ac_agent(state_dim: int, action_dim: int, config: AcConfig, rng) -> AcAgent:
    hidden = list(config.hidden)
    return AcAgent(
        actor=DenseNet([state_dim, *hidden, 2 * action_dim], rng),
        value=DenseNet([state_dim, *hidden, 1], rng),
        opt_actor=Adam(config.lr_actor), opt_value=Adam(config.lr_critic),
        state_dim=state_dim, action_dim=action_dim,
    )


def td_value_update(value: DenseNet, opt: Adam, s, r: float, s2, terminal: bool, gamma: float) -> float:
    """Semi-gradient TD(0) step on ``(V(s) - (r + gamma * V(s')))^2``; returns the TD error."""
    v_next = 0.0 if terminal else float(value.forward(s2)[0])
    target = r + gamma * v_next
    v = float(value.forward(s)[0])
    delta = target - v
    grads, _ = value.backward(np.array([-2.0 * delta]))
    opt.step(value.params, grads)
    return delta


def ac_actor_update(agent: AcAgent, s, pre_tanh, advantage: float) -> float:
    """Ascend ``advantage * log pi(a|s)`` for the action actually taken."""
    head = agent.actor.forward(s)
    logp, grad_fn = log_prob_of(head, pre_tanh)
    grads, _ = agent.actor.backward(grad_fn(-advantage))
    agent.opt_actor.step(agent.actor.params, grads)
    return float(-advantage * logp)


def train_ac_baseline(env_factory: Callable, config: AcConfig, seed: int, log_path=None):
    """On-policy one-step advantage actor-critic (no twins, targets or temperature)."""
    init_rng, explore_rng, _, _ = _streams(seed)
    episode = 0
    env = env_factory(episode)
    env.reset()
    obs = env.observation()
    agent = make_ac_agent(env.state_dim, env.action_dim, config, init_rng)
    log = []
    ep_return, ep_len, c_losses, a_losses = 0.0, 0, [], []
    for step in range(1, config.total_steps + 1):
        smp = sample_policy(agent.actor, obs, explore_rng.standard_normal(env.action_dim))
        out = env.step(smp.action)
        obs2 = env.observation(out.next_state)
        r = config.reward_scale * out.reward
        delta = td_value_update(agent.value, agent.opt_value, obs, r, obs2, out.info["terminal"], config.gamma)
        if not math.isfinite(delta):
            raise TrainingError("non-finite TD error")
        a_losses.append(ac_actor_update(agent, obs, smp.pre_tanh, delta))
        c_losses.append(delta * delta)
        ep_return += out.reward
        ep_len += 1
        obs = obs2
        if out.done:
            summ = env.summary()
            log.append({
                "env_step": step, "episode": episode, "return": ep_return, "episode_len": ep_len,
                "total_time_s": summ.total_time, "energy_J": summ.total_energy, "alpha": 0.0,
                "critic_loss": float(np.mean(c_losses)), "actor_loss": float(np.mean(a_losses)),
            })
            episode += 1
            env = env_factory(episode)
            env.reset()
            obs = env.observation()
            ep_return, ep_len, c_losses, a_losses = 0.0, 0, [], []
    if log_path is not None:
        write_log(log, log_path)
    return agent, log


def config_dict(config) -> dict:
    d = asdict(config)
    d["hidden"] = list(d["hidden"])
    return d
