import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ltdps._validation import check_aps, check_paths, check_transitions, transitions_of
from ltdps.exceptions import DomainError, InvalidPathError, PredictionError
from ltdps.estimators import IgnorantPredictor, LTDPSPredictor, TransitionMatrixPredictor
from ltdps.grid import GridTopology
from ltdps.paths import MobilePath, gen_history

G = GridTopology()


@pytest.fixture(scope="module")
def history():
    return gen_history(2000, G, (3, 6), np.random.default_rng(8))


def test_params_and_clone():
    m = LTDPSPredictor(corruption_factor=0.25)
    assert m.get_params() == {"corruption_factor": 0.25, "ap_rows": 5, "ap_cols": 5}
    c = clone(m.set_params(ap_rows=4))
    assert c.get_params()["ap_rows"] == 4 and not hasattr(c, "db_")
    assert IgnorantPredictor(random_state=3).get_params()["random_state"] == 3
    assert TransitionMatrixPredictor(n_predictions=2).get_params()["n_predictions"] == 2


@pytest.mark.parametrize("model", [LTDPSPredictor(), TransitionMatrixPredictor(), IgnorantPredictor()])
def test_unfitted(model):
    with pytest.raises(NotFittedError):
        model.predict([[13, 9]])


def test_ltdps_predict_one_published():
    m = LTDPSPredictor().fit([])
    r = m.predict_one(19, 15)
    assert (r.predicted_ap, r.candidates, r.method, r.rank_of(13)) == (13, (13,), "tracking", 1)
    r = m.predict_one(13, 9)
    assert r.method == "mining" and r.candidates == (7, 8)
    assert r.rank_of(24) is None
    with pytest.raises(PredictionError):
        m.predict_one(0, 35)


def test_predict_matches_predict_one(history):
    m = LTDPSPredictor().fit(history)
    X = np.array([[13, 9], [15, 19], [22, 25], [19, 15]])
    assert m.predict(X).tolist() == [m.predict_one(a, g).predicted_ap for a, g in X]
    assert m.n_paths_ == 2000


def test_score_and_transitions(history):
    m = LTDPSPredictor().fit(history)
    X, y = transitions_of(history[0])
    assert X.shape == (len(history[0]) - 1, 2)
    assert 0.0 <= m.score(X, y) <= 1.0
    assert np.isnan(m.score(np.empty((0, 2), dtype=int), []))


def test_partial_fit_equals_fit(history):
    a = LTDPSPredictor().fit(history)
    b = LTDPSPredictor().partial_fit(history[:700]).partial_fit(history[700:])
    assert a.db_.direct_counts == b.db_.direct_counts
    assert a.db_.indirect_counts == b.db_.indirect_counts


def test_fit_accepts_strings_and_pairs():
    m = LTDPSPredictor().fit(["13(15),8(9)", [(13, 15), (8, 9)], MobilePath(((13, 15), (8, 9)))])
    assert m.db_.direct(13, 8) == 3


def test_tm_estimator(history):
    m = TransitionMatrixPredictor(n_predictions=2).fit(history)
    assert len(m.predict_one(12)) == 2
    assert m.predict([12, 0]).tolist() == [m.ranking(12)[0], m.ranking(0)[0]]
    assert m.predict([[12, 7]]).tolist() == [m.ranking(12)[0]]


def test_ip_estimator_seeded():
    a = IgnorantPredictor(random_state=5).fit().predict(np.full(50, 12))
    b = IgnorantPredictor(random_state=5).fit().predict(np.full(50, 12))
    assert a.tolist() == b.tolist()
    assert set(a) <= set(G.ap_neighbors(12))
    gen = np.random.default_rng(0)
    assert IgnorantPredictor(random_state=gen).fit().rng_ is gen


def test_validation_helpers():
    with pytest.raises(TypeError):
        check_paths("0(0),1(1)", G)
    with pytest.raises(InvalidPathError):
        check_paths(["0(0)"], G)
    with pytest.raises(DomainError):
        check_transitions([[1, 2, 3]], G)
    with pytest.raises(DomainError):
        check_transitions([[1.5, 2]], G)
    with pytest.raises(DomainError):
        check_transitions([[30, 2]], G)
    assert check_transitions([13, 9], G).tolist() == [[13, 9]]
    assert check_transitions([[13.0, 9.0]], G).dtype == np.int64
    assert check_aps(7, G).tolist() == [7]
    with pytest.raises(DomainError):
        check_aps([25], G)
