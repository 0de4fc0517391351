import pytest

from topoclass.data import gen_annulus2d
from topoclass.network import build_paper_net
from topoclass.numerics import make_rng
from topoclass.training import TrainConfig, train


@pytest.fixture(scope="session")
def annulus500():
    return gen_annulus2d(500, 0)


@pytest.fixture(scope="session")
def trained_paper_net(annulus500):
    """Paper-architecture net trained to 100% on the session annulus."""
    net = build_paper_net(make_rng(0))
    cfg = TrainConfig(epochs=500, seed=0, target_accuracy=1.0)
    trained, history = train(net, annulus500, cfg)
    assert history.accuracies[-1] == 1.0, "fixture net failed to converge"
    return trained
