"""Fully connected tanh networks with exact input derivatives.

The forward pass is standard (affine + tanh hidden layers, affine output).
First and second derivatives with respect to each input coordinate are
propagated alongside the values as truncated Taylor jets: for coordinate k
and pre-activation A = H W^T + b,

    A1 = H1 W^T,  A2 = H2 W^T,
    T = tanh(A),  S1 = 1 - T^2,  S2 = -2 T S1,
    H1' = S1 * A1,  H2' = S2 * A1^2 + S1 * A2,

which is just the chain rule carried to second order.  The same recursion
exists twice: on plain arrays (fast evaluation) and on ``autodiff.Var``
(so losses built from u, u_x, u_xx stay differentiable in the weights).

Parameters are float64 throughout.  The flat vector layout is
layer-major: weights of layer 0 in row-major order, then its biases, then
layer 1, and so on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import Var


@dataclass(frozen=True)
class NetworkArch:
    """Layer widths from input to output, e.g. (1, 20, 20, 20, 1)."""

    layers: tuple[int, ...]

    def __post_init__(self):
        if len(self.layers) < 2:
            raise ValueError("need at least input and output layers")
        if any(int(n) != n or n < 1 for n in self.layers):
            raise ValueError(f"layer widths must be positive integers: {self.layers}")
        object.__setattr__(self, "layers", tuple(int(n) for n in self.layers))

    @property
    def n_inputs(self) -> int:
        return self.layers[0]

    @property
    def n_outputs(self) -> int:
        return self.layers[-1]

    @property
    def n_params(self) -> int:
        return sum(
            fan_out * fan_in + fan_out
            for fan_in, fan_out in zip(self.layers[:-1], self.layers[1:])
        )

    def describe(self) -> str:
        return "-".join(str(n) for n in self.layers)


@dataclass
class NetworkParams:
    arch: NetworkArch
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def to_flat(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b)
        return np.concatenate(parts)

    @classmethod
    def from_flat(cls, arch: NetworkArch, flat: np.ndarray) -> "NetworkParams":
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (arch.n_params,):
            raise ValueError(
                f"expected {arch.n_params} parameters for {arch.describe()}, "
                f"got {flat.shape}"
            )
        weights, biases, pos = [], [], 0
        for fan_in, fan_out in zip(arch.layers[:-1], arch.layers[1:]):
            weights.append(flat[pos : pos + fan_out * fan_in].reshape(fan_out, fan_in))
            pos += fan_out * fan_in
            biases.append(flat[pos : pos + fan_out].copy())
            pos += fan_out
        return cls(arch=arch, weights=weights, biases=biases)


def init_params(arch: NetworkArch, seed: int) -> NetworkParams:
    """Glorot-uniform weights, zero biases.

    Weights of layer l are drawn from U(-r, r) with r = sqrt(6/(fan_in +
    fan_out)), layer by layer from a PCG64 generator seeded with ``seed``,
    so the draw is reproducible across platforms.
    """
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(arch.layers[:-1], arch.layers[1:]):
        r = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-r, r, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return NetworkParams(arch=arch, weights=weights, biases=biases)


def _check_inputs(arch: NetworkArch, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[1] != arch.n_inputs:
        raise ValueError(
            f"inputs must have shape (n, {arch.n_inputs}), got {x.shape}"
        )
    return x


def forward(params: NetworkParams, x: np.ndarray) -> np.ndarray:
    """Evaluate the network at rows of ``x``; returns shape (n, n_outputs)."""
    h = _check_inputs(params.arch, x)
    last = len(params.weights) - 1
    for l, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w.T + b
        if l != last:
            h = np.tanh(h)
    return h


@dataclass(frozen=True)
class EvalWithDerivs:
    """Network values with per-coordinate first and pure second derivatives.

    ``first[:, k]`` is du/dx_k and ``second[:, k]`` is d2u/dx_k^2 at each
    input row (mixed partials are not propagated; the residuals here only
    need the Laplacian).
    """

    values: np.ndarray
    first: np.ndarray
    second: np.ndarray


def forward_with_input_derivs(params: NetworkParams, x: np.ndarray) -> EvalWithDerivs:
    """Forward pass carrying first/second input-derivative jets.

    Requires a scalar output; derivatives are exact (chain rule), not
    finite differences.
    """
    arch = params.arch
    if arch.n_outputs != 1:
        raise ValueError("input derivatives are defined for scalar outputs only")
    x = _check_inputs(arch, x)
    n, d = x.shape
    last = len(params.weights) - 1

    # Primal pass, keeping the activation factors for the jet passes.
    h = x
    s1s, s2s = [], []
    for l, (w, b) in enumerate(zip(params.weights, params.biases)):
        a = h @ w.T + b
        if l != last:
            t = np.tanh(a)
            s1 = 1.0 - t * t
            s1s.append(s1)
            s2s.append(-2.0 * t * s1)
            h = t
        else:
            values = a

    first = np.empty((n, d))
    second = np.empty((n, d))
    for k in range(d):
        h1 = np.zeros((n, d))
        h1[:, k] = 1.0
        h2 = np.zeros((n, d))
        for l, w in enumerate(params.weights):
            a1 = h1 @ w.T
            a2 = h2 @ w.T
            if l != last:
                h1 = s1s[l] * a1
                h2 = s2s[l] * a1 * a1 + s1s[l] * a2
            else:
                first[:, k] = a1[:, 0]
                second[:, k] = a2[:, 0]
    return EvalWithDerivs(values=values, first=first, second=second)


# -- taped variants (differentiable in the parameters) -----------------


def params_to_vars(params: NetworkParams) -> tuple[list[Var], list[Var]]:
    return [Var(w) for w in params.weights], [Var(b) for b in params.biases]


def vars_to_flat_grad(wvars: list[Var], bvars: list[Var]) -> np.ndarray:
    """Flatten accumulated gradients in the parameter layout order."""
    parts = []
    for w, b in zip(wvars, bvars):
        parts.append((w.grad if w.grad is not None else np.zeros(w.shape)).ravel())
        parts.append(b.grad if b.grad is not None else np.zeros(b.shape))
    return np.concatenate(parts)


def taped_forward(wvars: list[Var], bvars: list[Var], x: np.ndarray) -> Var:
    h = Var(x)
    last = len(wvars) - 1
    for l, (w, b) in enumerate(zip(wvars, bvars)):
        h = h @ w.T + b
        if l != last:
            h = h.tanh()
    return h


def taped_forward_with_jets(
    wvars: list[Var], bvars: list[Var], x: np.ndarray
) -> tuple[Var, list[Var], list[Var]]:
    """Taped analogue of :func:`forward_with_input_derivs`.

    Returns (values, [du/dx_k ...], [d2u/dx_k^2 ...]) as tape nodes, so a
    residual built from them backpropagates into the weight/bias Vars.
    """
    x = np.asarray(x, dtype=float)
    n, d = x.shape
    last = len(wvars) - 1

    h = Var(x)
    s1s, s2s = [], []
    for l, (w, b) in enumerate(zip(wvars, bvars)):
        a = h @ w.T + b
        if l != last:
            t = a.tanh()
            s1 = 1.0 - t * t
            s1s.append(s1)
            s2s.append(-2.0 * t * s1)
            h = t
        else:
            values = a

    firsts, seconds = [], []
    for k in range(d):
        e_k = np.zeros((n, d))
        e_k[:, k] = 1.0
        h1: Var = Var(e_k)
        h2: Var = Var(np.zeros((n, d)))
        for l, w in enumerate(wvars):
            a1 = h1 @ w.T
            a2 = h2 @ w.T
            if l != last:
                h1 = s1s[l] * a1
                # same association order as the plain path so the two
                # evaluations agree bit for bit
                h2 = s2s[l] * a1 * a1 + s1s[l] * a2
            else:
                firsts.append(a1)
                seconds.append(a2)
    return values, firsts, seconds


# -- checkpoints --------------------------------------------------------


def save_checkpoint(path, params: NetworkParams, seed: int) -> None:
    """Write parameters as text: header lines, then one value per line.

    ``repr`` of a float64 is its shortest exact decimal, so a saved and
    reloaded checkpoint reproduces the parameters bit for bit and the file
    itself is byte-stable across reruns.
    """
    lines = [
        "# layers: " + ",".join(str(n) for n in params.arch.layers),
        f"# seed: {seed}",
    ]
    lines.extend(repr(float(v)) for v in params.to_flat())
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_checkpoint(path) -> tuple[NetworkParams, int]:
    with open(path) as fh:
        raw = [line.strip() for line in fh if line.strip()]
    if len(raw) < 2 or not raw[0].startswith("# layers:") or not raw[1].startswith("# seed:"):
        raise ValueError(f"{path} is not a recognizable checkpoint")
    layers = tuple(int(s) for s in raw[0].split(":", 1)[1].split(","))
    seed = int(raw[1].split(":", 1)[1])
    flat = np.array([float(s) for s in raw[2:]])
    return NetworkParams.from_flat(NetworkArch(layers), flat), seed
