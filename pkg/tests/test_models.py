import json
import math

import numpy as np
import pytest

import convexuq as cq
from convexuq import ModelVariant as V
from convexuq.errors import (
    DimensionMismatch,
    IllConditioned,
    IndexOutOfRange,
    NotEllipsoid,
    NotPositiveDefinite,
    ParseError,
)

ALL_VARIANTS = tuple(V)
MP_VARIANTS = tuple(v for v in V if v is not V.ME)


def plain_r(entries, method="scc"):
    return cq.CorrelationMatrix(entries=np.asarray(entries, float), method=method)


@pytest.fixture(scope="module")
def spec2():
    return cq.make_marginal_spec([("u1", -2.0, 4.0), ("u2", 10.0, 20.0)])


@pytest.fixture(scope="module")
def r2():
    return plain_r([[1.0, 0.6], [0.6, 1.0]])


def test_me_covariance_from_radii(spec2, r2):
    model = cq.build_model(V.ME, spec2, r2)
    # radii are 3 and 5
    expected = np.array([[9.0, 0.6 * 15.0], [0.6 * 15.0, 25.0]])
    np.testing.assert_array_equal(model.covariance, expected)
    np.testing.assert_allclose(
        model.characteristic @ model.covariance, np.eye(2), atol=1e-12
    )
    np.testing.assert_allclose(
        model.cholesky @ model.cholesky.T, r2.entries, atol=1e-14
    )


def test_mp_dx_shape_and_characteristic(spec2, r2):
    model = cq.build_model(V.MP2, spec2, r2)
    np.testing.assert_array_equal(
        model.dx_shape, spec2.radii[:, None] * model.shape.entries
    )
    np.testing.assert_allclose(
        model.characteristic @ model.dx_shape, np.eye(2), atol=1e-12
    )
    assert model.covariance is None and model.cholesky is None


def test_build_rejects_dimension_mismatch(spec2):
    r3 = plain_r(np.eye(3))
    with pytest.raises(DimensionMismatch):
        cq.build_model(V.ME, spec2, r3)


def test_build_rejects_non_pd():
    spec = cq.make_marginal_spec([(f"u{k}", -1.0, 1.0) for k in range(1, 4)])
    indefinite = plain_r([[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]])
    with pytest.raises(NotPositiveDefinite):
        cq.build_model(V.ME, spec, indefinite)


def test_ill_conditioned_warning():
    spec = cq.make_marginal_spec([("a", -1.0, 1.0), ("b", -1e9, 1e9)])
    with pytest.warns(IllConditioned):
        cq.build_model(V.ME, spec, plain_r(np.eye(2)))


def test_membership_ellipse_boundary():
    spec = cq.make_marginal_spec([("a", -1.0, 1.0), ("b", -1.0, 1.0)])
    model = cq.build_model(V.ME, spec, plain_r(np.eye(2)))
    assert cq.contains(model, [1.0, 0.0]).inside
    assert cq.contains(model, [math.sqrt(1.0 + 5e-10), 0.0]).inside
    outside = cq.contains(model, [math.sqrt(1.0 + 5e-9), 0.0])
    assert not outside.inside
    assert outside.value == pytest.approx(1.0 + 5e-9)


def test_membership_box_coordinates(spec2):
    model = cq.build_model(V.MP2, spec2, plain_r(np.eye(2)))
    # identity correlation: the domain is the marginal box itself
    values = cq.membership_values(
        model, np.array([[1.0, 15.0], [4.0, 15.0], [1.0, 21.0]])
    )
    np.testing.assert_allclose(values, [0.0, 1.0, 1.2], atol=1e-12)


def test_membership_rejects_wrong_width(spec2, r2):
    model = cq.build_model(V.ME, spec2, r2)
    with pytest.raises(DimensionMismatch):
        cq.membership_values(model, np.zeros((4, 3)))


def test_volume_ellipse_closed_form(spec2):
    for r in (0.0, 0.3, -0.8):
        model = cq.build_model(V.ME, spec2, plain_r([[1.0, r], [r, 1.0]]))
        nu, nu_bar = cq.volume_ratio(model)
        assert nu == pytest.approx(math.pi * math.sqrt(1.0 - r * r) / 4.0)
        assert nu_bar == pytest.approx(math.sqrt(nu))


def test_volume_ball_3d():
    spec = cq.make_marginal_spec([(f"u{k}", -1.0, 1.0) for k in range(1, 4)])
    model = cq.build_model(V.ME, spec, plain_r(np.eye(3)))
    nu, _ = cq.volume_ratio(model)
    assert nu == pytest.approx(4.0 * math.pi / 3.0 / 8.0)


def test_volume_parallelepiped_is_shape_det(spec2, r2):
    for variant in MP_VARIANTS:
        model = cq.build_model(variant, spec2, r2)
        nu, nu_bar = cq.volume_ratio(model)
        assert nu == pytest.approx(abs(np.linalg.det(model.shape.entries)))
        assert nu_bar == pytest.approx(math.sqrt(nu))


def test_fitness_counts_and_excluded(spec2):
    model = cq.build_model(V.ME, spec2, plain_r(np.eye(2)))
    samples = cq.SampleSet(
        names=("u1", "u2"),
        rows=np.array([[1.0, 15.0], [2.5, 17.5], [10.0, 15.0], [1.0, 25.0]]),
    )
    report = cq.fitness(model, samples)
    assert report.total == 4
    assert report.enclosed == 2
    assert report.kappa == pytest.approx(0.5)
    assert report.excluded == (2, 3)
    assert report.nu == pytest.approx(math.pi / 4.0)
    round_trip = json.loads(json.dumps(report.to_dict()))
    assert round_trip["excluded"] == [2, 3]


def test_fitness_aligns_columns(spec2):
    model = cq.build_model(V.ME, spec2, plain_r(np.eye(2)))
    swapped = cq.SampleSet(names=("u2", "u1"), rows=np.array([[15.0, 1.0], [15.0, 10.0]]))
    report = cq.fitness(model, swapped)
    assert report.excluded == (1,)


def test_fitness_scale_equivariant(standard_spec, standard_samples):
    """Rescaling every variable by its own affine map changes nothing in
    the regularized picture: same kappa, same excluded rows, same nu."""
    scale = np.array([2.0, 0.5, 10.0])
    offset = np.array([5.0, -3.0, 100.0])
    spec_t = cq.make_marginal_spec(
        (name, scale[k] * iv.lower + offset[k], scale[k] * iv.upper + offset[k])
        for k, (name, iv) in enumerate(zip(standard_spec.names, standard_spec.intervals))
    )
    samples_t = cq.SampleSet(
        names=standard_samples.names, rows=standard_samples.rows * scale + offset
    )
    r = cq.fit_correlation_matrix("scc", None, cq.regularize(standard_spec, standard_samples).rows)
    for variant in ALL_VARIANTS:
        a = cq.fitness(cq.build_model(variant, standard_spec, r), standard_samples)
        b = cq.fitness(cq.build_model(variant, spec_t, r), samples_t)
        assert a.excluded == b.excluded
        assert a.nu == pytest.approx(b.nu, rel=1e-12)


def test_project_2d_values_and_errors(spec2, r2):
    model = cq.build_model(V.ME, spec2, r2)
    np.testing.assert_array_equal(
        cq.project_2d(model, 0, 1), np.array([[1.0, 0.6], [0.6, 1.0]])
    )
    with pytest.raises(IndexOutOfRange):
        cq.project_2d(model, 0, 2)
    with pytest.raises(IndexOutOfRange):
        cq.project_2d(model, 1, 1)
    box = cq.build_model(V.MP2, spec2, r2)
    with pytest.raises(NotEllipsoid):
        cq.project_2d(box, 0, 1)


@pytest.mark.parametrize("variant", ALL_VARIANTS, ids=lambda v: v.value)
def test_serialize_round_trip(spec2, r2, variant):
    model = cq.build_model(variant, spec2, r2)
    text = cq.serialize(model)
    loaded = cq.deserialize(text)
    assert loaded.variant is variant
    assert loaded.spec.names == model.spec.names
    np.testing.assert_array_equal(loaded.R.entries, model.R.entries)
    np.testing.assert_array_equal(loaded.midpoints, model.midpoints)
    np.testing.assert_array_equal(loaded.radii, model.radii)
    if variant is V.ME:
        np.testing.assert_array_equal(loaded.covariance, model.covariance)
    else:
        np.testing.assert_array_equal(loaded.shape.entries, model.shape.entries)
    # the defining inequality must agree point by point
    probe = np.array([[0.0, 14.0], [3.0, 19.0], [-1.5, 11.0]])
    np.testing.assert_array_equal(
        cq.membership_values(loaded, probe), cq.membership_values(model, probe)
    )


def test_save_load_round_trip(tmp_path, spec2, r2):
    model = cq.build_model(V.LTRI, spec2, r2)
    path = tmp_path / "model.json"
    cq.save_model(path, model)
    loaded = cq.load_model(path)
    np.testing.assert_array_equal(loaded.dx_shape, model.dx_shape)


def valid_doc(variant="me"):
    doc = {
        "format_version": 1,
        "variant": variant,
        "method": "scc",
        "names": ["a", "b"],
        "lower": [-1.0, -2.0],
        "upper": [1.0, 2.0],
        "correlation": [1.0, 0.5, 0.5, 1.0],
    }
    if variant == "me":
        doc["covariance"] = [1.0, 1.0, 1.0, 4.0]
    else:
        doc["shape"] = [0.75, 0.25, 0.25, 0.75]
    return doc


def test_deserialize_reports_json_line():
    with pytest.raises(ParseError) as exc:
        cq.deserialize('{\n"format_version": 1,\n"variant" "me"\n}')
    assert exc.value.line == 3


def test_deserialize_requires_object():
    with pytest.raises(ParseError):
        cq.deserialize("[1, 2, 3]")


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d.pop("method"), "method"),
        (lambda d: d.update(format_version=2), "format_version"),
        (lambda d: d.update(variant="blob"), "variant"),
        (lambda d: d.update(method="pearson"), "method"),
        (lambda d: d.update(names=["a"]), "names"),
        (lambda d: d.update(correlation=[1.0, 0.5, 0.5]), "correlation"),
        (lambda d: d.update(correlation=[1.0, 0.5, -0.5, 1.0]), "correlation"),
        (lambda d: d.update(correlation=[2.0, 0.5, 0.5, 1.0]), "correlation"),
        (lambda d: d.update(covariance=[1.0, 1.0, 1.0, 5.0]), "covariance"),
        (lambda d: d.update(lower=["x", -2.0]), "lower"),
    ],
)
def test_deserialize_rejects_bad_me_docs(mutate, field):
    doc = valid_doc("me")
    mutate(doc)
    with pytest.raises(ParseError) as exc:
        cq.deserialize(json.dumps(doc))
    assert exc.value.field == field


def test_deserialize_rejects_bad_shapes():
    doc = valid_doc("rect")
    doc["shape"] = [0.9, 0.4, 0.25, 0.75]  # first row sums to 1.3
    with pytest.raises(ParseError) as exc:
        cq.deserialize(json.dumps(doc))
    assert exc.value.field == "shape"
    doc["shape"] = [0.5, 0.5, 0.5, 0.5]
    with pytest.raises(ParseError) as exc:
        cq.deserialize(json.dumps(doc))
    assert exc.value.field == "shape"


def test_deserialize_accepts_print_rounded_shape():
    """Rows that sum to 0.9999 (four printed decimals) still load; the
    stored row sums become the normalization weights."""
    doc = valid_doc("mp2")
    doc["shape"] = [0.7499, 0.25, 0.25, 0.7499]
    model = cq.deserialize(json.dumps(doc))
    assert model.shape.weights[0] == pytest.approx(1.0 / 0.9999)


def test_deserialize_rejects_indefinite_me_correlation():
    doc = valid_doc("me")
    doc["correlation"] = [1.0, 1.0, 1.0, 1.0]
    doc["covariance"] = [1.0, 2.0, 2.0, 4.0]
    with pytest.raises(ParseError) as exc:
        cq.deserialize(json.dumps(doc))
    assert exc.value.field == "correlation"


def test_glasses_fixture_loads(data_dir):
    model = cq.load_model(data_dir / "glasses_mp2_model.json")
    assert model.variant is V.MP2
    assert model.spec.names == ("Ta", "Va", "PA", "PB")
    assert model.R.method == "ccc"
    assert cq.contains(model, model.midpoints).inside
    lam = np.linalg.eigvalsh(model.R.entries)[0]
    assert lam > 0.1
