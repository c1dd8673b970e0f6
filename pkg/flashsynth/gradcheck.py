"""central difference gradient checking against the tape"""
from flashsynth import utils
from flashsynth.tensor import Tape, backward


def _coordinates(store, max_coords, seed):
    coordinates = [(name, index) for name in store.names()
                   for index in range(store.params[name].size)]
    if max_coords is None or len(coordinates) <= max_coords:
        return coordinates
    rng = utils.seeded_rng('gradcheck', seed)
    chosen = rng.choice(len(coordinates), size=max_coords, replace=False)
    return [coordinates[index] for index in sorted(chosen)]


def analytic_gradients(fn, store):
    store.zero_grad()
    loss = fn(store.bind(Tape()))
    backward(loss, store)
    return {name: grad.copy() for name, grad in store.grads.items()}


def grad_check(fn, store, eps=1e-5, max_coords=None, seed=0, abs_tol=1e-8):
    """max relative error between tape gradients and central differences

    fn maps bound parameters to a scalar loss tensor. Coordinates whose
    absolute difference is at most abs_tol count as agreeing.
    """
    analytic = analytic_gradients(fn, store)
    worst = 0.0
    for name, index in _coordinates(store, max_coords, seed):
        flat = store.params[name].reshape(-1)
        original = flat[index]
        flat[index] = original + eps
        loss_plus = fn(store.bind(None)).item()
        flat[index] = original - eps
        loss_minus = fn(store.bind(None)).item()
        flat[index] = original
        numeric = (loss_plus - loss_minus) / (2.0 * eps)
        exact = analytic[name].reshape(-1)[index]
        difference = abs(exact - numeric)
        if difference <= abs_tol:
            continue
        worst = max(worst, difference / max(1e-8, abs(exact) + abs(numeric)))
    return worst
