import pytest

from curlspec import SpectralLine, TruncationError, ValidationError, counting, sphere_spectrum, symmetry_defect, validate_spectrum
from curlspec.spectrum import (
    ManifoldDescriptor,
    spectrum_from_json,
    spectrum_to_csv,
    spectrum_to_json,
)
from curlspec.sphere import sphere_descriptor
from curlspec.torus import identity_basis, torus_spectrum

S3 = sphere_descriptor(3)


def test_validate_examples():
    assert validate_spectrum([], S3, 1).lines == ()
    spec = validate_spectrum([(2, 3), (-2, 3)], S3, 5)
    assert spec.as_pairs() == [(-2, 3), (2, 3)]
    assert validate_spectrum([(2, 1), (2, 2)], S3, 5).as_pairs() == [(2, 3)]


@pytest.mark.parametrize("bad", [[(0, 1)], [(2, 0)], [(2, -1)], [(6, 1)]])
def test_validate_rejects(bad):
    with pytest.raises(ValidationError):
        validate_spectrum(bad, S3, 5)


def test_descriptor_validation():
    with pytest.raises(ValidationError):
        ManifoldDescriptor("sphere", 4, 1.0, (1, 0))
    with pytest.raises(ValidationError):
        ManifoldDescriptor("sphere", 3, -1.0, (1, 0))
    with pytest.raises(ValidationError):
        ManifoldDescriptor("sphere", 3, 1.0, (1,))
    with pytest.raises(ValidationError):
        ManifoldDescriptor("klein", 3, 1.0, (1, 0))


def test_counting_examples():
    s3 = sphere_spectrum(3, 5)
    assert counting(s3, "+", 2) == 3
    assert counting(s3, "+", 1.9) == 0
    assert counting(s3, "+", 3) == 11
    assert counting(s3, -1, 3) == 11
    with pytest.raises(TruncationError):
        counting(s3, "+", 100)
    with pytest.raises(ValidationError):
        counting(s3, "x", 2)


def test_symmetry_defect_detects_asymmetry():
    spec = validate_spectrum([(2, 1), (-2, 3), (3, 4)], S3, 3)
    assert symmetry_defect(spec) == [(2.0, -2), (3.0, 4)]


def test_json_roundtrip_keeps_exact_values():
    spec = torus_spectrum(identity_basis(3), 12)
    back = spectrum_from_json(spectrum_to_json(spec))
    assert back.as_pairs() == spec.as_pairs()
    assert [l.exact for l in back.lines] == [l.exact for l in spec.lines]
    assert [l.shell for l in back.lines] == [l.shell for l in spec.lines]
    assert back.descriptor == spec.descriptor


def test_csv():
    text = spectrum_to_csv(sphere_spectrum(3, 0))
    assert text.splitlines()[0] == "lambda,multiplicity"
    assert len(text.splitlines()) == 3


def test_line_equality_prefers_exact():
    a = SpectralLine(2.0, 1)
    b = SpectralLine(2.0 + 1e-12, 1)
    assert a.same_eigenvalue(b)
