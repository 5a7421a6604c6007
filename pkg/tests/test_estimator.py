import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from qfriction.estimator import FrictionTransformer


def test_params_round_trip():
    t = FrictionTransformer(model="drude", output="moments", rel_tol=1e-8)
    params = t.get_params()
    assert params["model"] == "drude" and params["rel_tol"] == 1e-8
    c = clone(t)
    assert c.get_params() == params
    c.set_params(output="forces")
    assert c.output == "forces" and t.output == "moments"


def test_not_fitted():
    with pytest.raises(NotFittedError):
        FrictionTransformer().transform([[1e-8]])


@pytest.mark.parametrize("kwargs", [
    {"model": "jellium"},
    {"output": "spectrum"},
    {"damping": "intrinsic"},
    {"damping": "viscous"},
    {"v_x": 0.0},
    {"gamma_ev": -1.0},
])
def test_bad_parameters(kwargs):
    with pytest.raises(ValueError):
        FrictionTransformer(**kwargs).fit([[1e-8]])


@pytest.mark.parametrize("X", [[[1e-8, 2e-8]], [[-1e-8]], [[np.nan]], np.empty((0, 1))])
def test_bad_input(X):
    with pytest.raises(ValueError):
        FrictionTransformer(model="drude").fit(X)


def test_fitted_attributes(metal):
    t = FrictionTransformer().fit([[1e-8]])
    assert t.n_features_in_ == 1
    assert t.lambda_tf_ == pytest.approx(metal.lambda_tf, rel=1e-12)
    assert t.ell_ == pytest.approx(metal.ell, rel=1e-12)


def test_outputs(metal):
    z = np.array([[1e-8], [3e-8]])
    moments = FrictionTransformer(model="drude", output="moments").fit_transform(z)
    assert moments.shape == (2, 3) and np.all(moments > 0)
    forces = FrictionTransformer(model="drude", output="forces").fit_transform(z)
    assert forces.shape == (2, 4) and np.all(forces < 0)
    assert list(FrictionTransformer(output="forces").fit(z).get_feature_names_out()) == [
        "F_lte", "F_j", "F_total", "F_local_ref"]


def test_intrinsic_ratios_have_nan_j():
    out = FrictionTransformer(damping="intrinsic", gamma_int_ev=1e-3).fit_transform([[3e-9]])
    assert out[0, 0] > 0 and np.isnan(out[0, 1])


def test_pipeline_in_units_of_lambda(metal):
    lam = metal.lambda_tf
    pipe = make_pipeline(FunctionTransformer(lambda x: x * lam), FrictionTransformer())
    out = pipe.fit_transform(np.array([[10.0]]))
    assert 10**2.5 < out[0, 0] < 10**3.5
