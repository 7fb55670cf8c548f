import numpy as np
import pytest

from subdiff.parallel import ENV_THREADS, block_rng, run_blocks, worker_count
from subdiff.pricing import ContractParams, subordinated_price_mc
from subdiff.subdiffusion import ModelParams, simulate_subordinated_paths
from subdiff.subordinator import SimConfig, simulate_inverse_subordinator


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv(ENV_THREADS, "3")
    assert worker_count() == 3
    for bad in ("0", "-2", "many"):
        monkeypatch.setenv(ENV_THREADS, bad)
        with pytest.raises(ValueError):
            worker_count()
    monkeypatch.delenv(ENV_THREADS)
    assert worker_count() >= 1


def test_block_streams_are_distinct_and_repeatable():
    a = block_rng(5, 0).random(4)
    assert np.array_equal(a, block_rng(5, 0).random(4))
    assert not np.array_equal(a, block_rng(5, 1).random(4))
    assert not np.array_equal(a, block_rng(6, 0).random(4))


def test_run_blocks_shapes():
    out = run_blocks(lambda rng, n: rng.random((n, 2)), 10, 0, 3)
    assert out.shape == (10, 2)
    with pytest.raises(ValueError):
        run_blocks(lambda rng, n: rng.random(n), 0, 0, 3)


@pytest.mark.parametrize("workers", [1, 2, 5])
def test_results_independent_of_workers(workers):
    fn = lambda rng, n: rng.standard_normal(n)  # noqa: E731
    ref = run_blocks(fn, 1000, 42, 64, workers=1)
    assert np.array_equal(run_blocks(fn, 1000, 42, 64, workers=workers), ref)


def test_drivers_independent_of_env(monkeypatch):
    cfg = SimConfig(seed=8, n_paths=5000, dtau=0.1, t_max=1.0, block_size=512)
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv(ENV_THREADS, threads)
        outs.append((
            simulate_inverse_subordinator(0.7, 1.0, cfg).tobytes(),
            simulate_subordinated_paths(ModelParams(0.6), [0.5, 1.0], cfg).tobytes(),
            subordinated_price_mc(0.8, 1.0, ContractParams(100, 100, 0.5), cfg),
        ))
    assert outs[0] == outs[1]
