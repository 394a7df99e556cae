import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import random_framework
from rigiscope.errors import (AbsoluteError, DomainError, EquatorError, FrameworkError,
                              ParseError, UnsupportedModelError)
from rigiscope.framework import (Framework, edge_lengths, framework_to_dict, load, parse,
                                 require_valid, save, serialize, validate)
from rigiscope.geometry import GeometrySpec
from rigiscope.transfer import transfer_framework

TRIANGLE = {
    "version": 1, "dimension": 2, "model": "euclidean",
    "vertices": [[0, 0], [1, 0], [0, 1]], "edges": [[0, 1], [1, 2], [0, 2]],
}


def _doc(**changes):
    doc = dict(TRIANGLE)
    doc.update(changes)
    return json.dumps(doc)


def test_parse_defaults_to_model_coordinates():
    fw = parse(_doc())
    assert fw.coordinates == "model"
    assert fw.member_kinds == ("bar",) * 3
    assert fw.points.flags.writeable is False


@pytest.mark.parametrize("missing", ["version", "dimension", "model", "vertices", "edges"])
def test_missing_field_is_named(missing):
    doc = dict(TRIANGLE)
    del doc[missing]
    with pytest.raises(ParseError, match=missing):
        parse(json.dumps(doc))


def test_unknown_model():
    with pytest.raises(UnsupportedModelError, match="model"):
        parse(_doc(model="lobachevsky"))


def test_wrong_width_names_vertex():
    with pytest.raises(ParseError, match=r"vertices\[1\]"):
        parse(_doc(vertices=[[0, 0], [1, 0, 0], [0, 1]]))


def test_bad_edge_entry():
    with pytest.raises(ParseError, match=r"edges\[2\]"):
        parse(_doc(edges=[[0, 1], [1, 2], [0, "x"]]))


def test_invalid_json_reports_line():
    with pytest.raises(ParseError, match="line 2"):
        parse('{\n  "version": ,\n}')


def test_ambient_only_model_rejects_model_coordinates():
    with pytest.raises(ParseError, match="coordinates"):
        parse(_doc(model="sphere_ambient", coordinates="model"))


def test_member_kinds_roundtrip():
    fw = parse(_doc(member_kinds=["bar", "cable", "strut"]))
    again = parse(serialize(fw))
    assert again.member_kinds == ("bar", "cable", "strut")
    with pytest.raises(ParseError, match=r"member_kinds\[0\]"):
        parse(_doc(member_kinds=["rope", "bar", "bar"]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["euclidean", "proj_sphere", "sphere_ambient",
                                                       "proj_hyperbolic"]))
def test_serialize_roundtrip_is_byte_stable(seed, model):
    fw = random_framework(np.random.default_rng(seed))
    fw = transfer_framework(fw, GeometrySpec.for_model(model, fw.dimension))
    text = serialize(fw)
    again = parse(text)
    assert serialize(again) == text
    assert np.array_equal(again.points, fw.points)
    assert again.edges == fw.edges


def test_ambient_form_roundtrip(tmp_path):
    geo = GeometrySpec.signature(2, 1, -1.0)
    fw = Framework.create([[0.0, 0.0, 1.0], [0.6, 0.0, 1.25]], [(0, 1)], geo, "ambient")
    path = tmp_path / "fw.json"
    save(fw, path)
    back = load(path)
    assert back.geometry.form.tolist() == [1.0, 1.0, -1.0]
    assert back.geometry.level == -1.0
    assert framework_to_dict(back)["form_coefficients"] == [1.0, 1.0, -1.0]


def _kinds(fw, **kw):
    return validate(fw, **kw).kinds()


def test_structural_violations():
    geo = GeometrySpec.euclidean(2)
    pts = [[0, 0], [1, 0], [0, 1]]
    assert _kinds(Framework.create(pts, [(0, 1), (1, 0)], geo)) == {"duplicate"}
    assert _kinds(Framework.create(pts, [(1, 1)], geo)) == {"loop"}
    assert _kinds(Framework.create(pts, [(0, 5)], geo)) == {"index"}
    assert _kinds(Framework.create([[0, 0], [np.nan, 0], [0, 1]], [], geo)) == {"nonfinite"}
    with pytest.raises(FrameworkError, match="duplicates"):
        require_valid(Framework.create(pts, [(0, 1), (1, 0)], geo))


def test_membership_violations():
    ph = GeometrySpec.proj_hyperbolic(2)
    assert _kinds(Framework.create([[1.0, 0.0], [0.1, 0.0]], [(0, 1)], ph)) == {"absolute"}
    outside = Framework.create([[1.5, 0.0], [0.1, 0.0]], [(0, 1)], ph)
    assert _kinds(outside) == {"region"}
    assert validate(outside, formal=True).ok
    with pytest.raises(AbsoluteError) as info:
        require_valid(Framework.create([[0.1, 0.0], [0.0, 1.0]], [(0, 1)], ph))
    assert info.value.vertex == 1

    sph = GeometrySpec.sphere(2)
    below = Framework.create([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], [(0, 1)], sph, "ambient")
    with pytest.raises(EquatorError):
        require_valid(below)
    off = Framework.create([[0.0, 0.0, 2.0], [0.0, 0.0, 1.0]], [(0, 1)], sph, "ambient")
    assert _kinds(off) == {"surface"}
    assert validate(off, formal=True).ok


def test_edge_lengths():
    fw = parse(_doc())
    lengths = edge_lengths(fw)
    assert lengths.values.tolist() == pytest.approx([1.0, np.sqrt(2.0), 1.0])


def test_edge_lengths_exterior_needs_invariant():
    pd = GeometrySpec.proj_exterior_hyperbolic(2)
    fw = Framework.create([[2.0, 0.0], [0.0, 2.0]], [(0, 1)], pd)
    with pytest.raises(DomainError):
        edge_lengths(fw)
    # normalized poles (2,0,1)/sqrt(3) and (0,2,1)/sqrt(3): invariant -1/3
    assert edge_lengths(fw, invariant=True).values[0] == pytest.approx(-1.0 / 3.0)


def test_with_points_keeps_graph():
    fw = parse(_doc())
    moved = fw.with_points(fw.points + 1.0)
    assert moved.graph == fw.graph
    assert moved.points[0].tolist() == [1.0, 1.0]
