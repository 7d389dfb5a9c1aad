import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qvmss.imaging import (
    BinaryImage,
    PbmParseError,
    PbmVariant,
    ShapeMismatchError,
    make_fixture,
    read_pbm,
    require_same_shape,
    write_pbm,
)


def image_strategy(max_side=24):
    return st.builds(
        lambda w, h, seed: make_fixture("random", w, h, seed=seed),
        st.integers(1, max_side),
        st.integers(1, max_side),
        st.integers(0, 2**32),
    )


# ------------------------------------------------------------- BinaryImage

def test_binary_image_basic_accessors():
    img = BinaryImage(2, 2, [0, 1, 1, 0])
    assert img.ones_fraction() == 0.5
    assert np.array_equal(img.as_grid(), [[0, 1], [1, 0]])
    assert img == BinaryImage.from_rows([[0, 1], [1, 0]])


def test_binary_image_rejects_wrong_length():
    with pytest.raises(ValueError):
        BinaryImage(2, 2, [0, 1, 1])


def test_binary_image_rejects_non_bits():
    with pytest.raises(ValueError):
        BinaryImage(2, 1, [0, 2])


def test_binary_image_rejects_empty_dimensions():
    with pytest.raises(ValueError):
        BinaryImage(0, 4, [])


def test_binary_image_is_immutable():
    img = BinaryImage(2, 1, [0, 1])
    with pytest.raises(ValueError):
        img.bits[0] = 1


def test_binary_image_does_not_freeze_caller_array():
    source = np.array([0, 1, 1, 0], dtype=np.uint8)
    BinaryImage(2, 2, source)
    source[0] = 1  # caller's buffer stays writable


def test_xor_and_complement():
    a = BinaryImage(2, 2, [0, 1, 1, 0])
    b = BinaryImage(2, 2, [1, 1, 0, 0])
    assert (a ^ b) == BinaryImage(2, 2, [1, 0, 1, 0])
    assert a.complement() == BinaryImage(2, 2, [1, 0, 0, 1])
    assert (a ^ a) == BinaryImage(2, 2, [0, 0, 0, 0])


def test_xor_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        BinaryImage(2, 1, [0, 1]) ^ BinaryImage(1, 2, [0, 1])
    with pytest.raises(ShapeMismatchError):
        require_same_shape(BinaryImage(2, 1, [0, 1]), BinaryImage(3, 1, [0, 1, 0]))


# -------------------------------------------------------------- PBM reading

def test_read_p1_example():
    img = read_pbm(b"P1\n2 2\n0 1\n1 0\n")
    assert img == BinaryImage(2, 2, [0, 1, 1, 0])


def test_read_p1_tolerates_comments_and_packing():
    data = b"P1 # plain variant\n# full-line comment\n 2   2 \n0110\n"
    assert read_pbm(data) == BinaryImage(2, 2, [0, 1, 1, 0])


def test_read_p4_hand_packed_row():
    img = read_pbm(b"P4\n9 1\n" + bytes([0xFF, 0x80]))
    assert img == BinaryImage(9, 1, [1] * 9)


def test_read_p4_padding_bits_are_ignored():
    img = read_pbm(b"P4\n9 1\n" + bytes([0xFF, 0xFF]))
    assert img == BinaryImage(9, 1, [1] * 9)


def test_read_rejects_grayscale_magic():
    with pytest.raises(PbmParseError) as excinfo:
        read_pbm(b"P5\n2 2\n255\n\x00\x00\x00\x00")
    assert excinfo.value.offset == 0


def test_read_rejects_empty_and_garbage():
    with pytest.raises(PbmParseError):
        read_pbm(b"")
    with pytest.raises(PbmParseError):
        read_pbm(b"hello world")


def test_read_rejects_missing_dimensions():
    with pytest.raises(PbmParseError):
        read_pbm(b"P1\n")
    with pytest.raises(PbmParseError):
        read_pbm(b"P1\n2\n")
    with pytest.raises(PbmParseError):
        read_pbm(b"P1\n2 x\n0 1\n")


def test_read_rejects_zero_dimension():
    with pytest.raises(PbmParseError):
        read_pbm(b"P1\n0 2\n")


def test_read_rejects_oversized_dimensions():
    with pytest.raises(PbmParseError):
        read_pbm(b"P4\n99999999 99999999\n")


def test_read_truncated_p1_reports_offset():
    data = b"P1\n2 2\n0 1\n1\n"
    with pytest.raises(PbmParseError) as excinfo:
        read_pbm(data)
    assert excinfo.value.offset == len(data)


def test_read_truncated_p4_reports_offset():
    data = b"P4\n9 2\n" + bytes([0xFF])
    with pytest.raises(PbmParseError) as excinfo:
        read_pbm(data)
    assert excinfo.value.offset == len(data)


def test_read_p1_rejects_stray_raster_bytes():
    with pytest.raises(PbmParseError):
        read_pbm(b"P1\n2 2\n0 1\n1 7\n")


# -------------------------------------------------------------- PBM writing

def test_write_p1_minimal_file():
    assert write_pbm(BinaryImage(1, 1, [1]), PbmVariant.P1_ASCII) == b"P1\n1 1\n1\n"


def test_write_p4_packs_rows_with_zero_padding():
    data = write_pbm(BinaryImage(9, 1, [1] * 9), PbmVariant.P4_PACKED)
    assert data == b"P4\n9 1\n" + bytes([0xFF, 0x80])


def test_write_p4_length_formula():
    for width, height in [(1, 1), (7, 3), (8, 2), (9, 5), (64, 64), (130, 3)]:
        img = make_fixture("random", width, height, seed=width * height)
        data = write_pbm(img, PbmVariant.P4_PACKED)
        header = f"P4\n{width} {height}\n".encode()
        assert len(data) == len(header) + height * ((width + 7) // 8)


def test_writer_output_is_reproducible():
    img = make_fixture("random", 33, 9, seed=4)
    assert write_pbm(img) == write_pbm(img)
    assert write_pbm(img, PbmVariant.P1_ASCII) == write_pbm(img, PbmVariant.P1_ASCII)


@settings(max_examples=60)
@given(img=image_strategy())
def test_round_trip_both_variants(img):
    for variant in PbmVariant:
        assert read_pbm(write_pbm(img, variant)) == img


def test_round_trip_512():
    img = make_fixture("random", 512, 512, seed=11)
    assert read_pbm(write_pbm(img, PbmVariant.P4_PACKED)) == img
    assert read_pbm(write_pbm(img, PbmVariant.P1_ASCII)) == img


# ----------------------------------------------------------------- fixtures

def test_checkerboard_fixture():
    assert make_fixture("checkerboard", 2, 2) == BinaryImage(2, 2, [0, 1, 1, 0])


def test_constant_fixtures():
    assert make_fixture("all_zero", 3, 3) == BinaryImage(3, 3, [0] * 9)
    assert make_fixture("all_one", 2, 3) == BinaryImage(2, 3, [1] * 6)


def test_random_fixture_is_deterministic():
    a = make_fixture("random", 8, 8, seed=7)
    b = make_fixture("random", 8, 8, seed=7)
    assert a == b
    assert a != make_fixture("random", 8, 8, seed=8)


def test_random_fixture_is_balanced():
    img = make_fixture("random", 256, 256, seed=3)
    assert abs(img.ones_fraction() - 0.5) < 0.01


def test_text_glyphs_fixture_structured_and_deterministic():
    a = make_fixture("text_glyphs", 64, 64)
    assert a == make_fixture("text_glyphs", 64, 64)
    assert 0.05 < a.ones_fraction() < 0.95


def test_unknown_fixture_kind():
    with pytest.raises(ValueError):
        make_fixture("plasma", 4, 4)
