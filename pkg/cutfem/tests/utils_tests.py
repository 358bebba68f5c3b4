import os
import pytest
import numpy as np
import scipy.sparse as sp
from cutfem.utils import *
from cutfem.errors import CutFEMError, ConfigurationError, NonConvergenceError, fail

def test_print_error_msg():
    """
    Verifies the print_error_msg function.
    The function should print the passed
    message to the function to console in
    red color.
    Please pass -s argument to validate
    the printing while running tests.
    """
    message = "This is a test error message. This should be printed in red."
    print_error_msg(message)

def test_print_info_msg():
    """
    Verifies the print_info_msg function.
    The function should print the passed
    message to the function to console in
    blue color when the logging level is
    below 3.
    """
    set_logging_level(2)
    message = "This is a test information message. This should be printed in blue."
    print_info_msg(message)
    set_logging_level(3)

def test_print_success_msg():
    """
    Verifies the print_success_msg function.
    The function should print the passed
    message to the function to console in
    green color at logging level 1.
    """
    set_logging_level(1)
    message = "This is a test success message. This should be printed in green."
    print_success_msg(message)
    set_logging_level(3)

def test_print_warn_msg():
    """
    Verifies the print_warn_msg function.
    The function should print the passed
    message to the function to console in
    yellow color.
    """
    message = "This is a test warning message. This should be printed in yellow."
    print_warn_msg(message)

def test_logging_level_filters_messages(capsys):
    """
    Verifies that level 4 silences info, success
    and warning messages but never errors.
    """
    set_logging_level(4)
    print_info_msg("hidden info")
    print_warn_msg("hidden warning")
    print_success_msg("hidden success")
    print_error_msg("visible error")
    set_logging_level(3)
    out = capsys.readouterr().out
    assert "hidden" not in out
    assert "visible error" in out

def test_set_logging_level_rejects_invalid():
    """
    Verifies that logging levels outside 1-4
    raise a ValueError and leave the level unchanged.
    """
    with pytest.raises(ValueError):
        set_logging_level(0)
    with pytest.raises(ValueError):
        set_logging_level(5)
    assert get_logging_level() == 3

def test_format_float_is_fixed():
    """
    Verifies the textual form of floats written to CSV files.
    """
    assert format_float(0.1) == "1.0000000000000001e-01"
    assert format_float(2) == "2.0000000000000000e+00"

def test_write_csv(tmp_path):
    """
    Verifies that write_csv writes the header
    and formats every column with its format.
    """
    path = os.path.join(str(tmp_path), "table.csv")
    write_csv(path, ["id", "value", "label"], [(0, 0.5, "a"), (1, 1.0, "")], ["%d", FLOAT_FORMAT, "%s"])
    with open(path) as f:
        lines = f.read().splitlines()
    assert lines[0] == "id,value,label"
    assert lines[1] == "0,5.0000000000000000e-01,a"
    assert lines[2] == "1,1.0000000000000000e+00,"
    assert lines[1].split(",")[1] == format_float(0.5)

def test_write_csv_without_rows(tmp_path):
    """
    Verifies that an empty table is written as its header only.
    """
    path = os.path.join(str(tmp_path), "empty.csv")
    write_csv(path, ["element_id", "violation_kind", "path_length"], [], ["%d", "%s", "%d"])
    with open(path) as f:
        assert f.read() == "element_id,violation_kind,path_length\n"

def test_write_triplets_sorted(tmp_path):
    """
    Verifies that sparse matrices are dumped as
    row,col,value triplets sorted by row then column.
    """
    matrix = sp.coo_matrix((np.array([3.0, 1.0, 2.0]), (np.array([1, 0, 0]), np.array([0, 1, 0]))), shape=(2, 2))
    path = os.path.join(str(tmp_path), "matrix.txt")
    write_triplets(path, matrix)
    with open(path) as f:
        lines = f.read().splitlines()
    assert lines[0] == "row,col,value"
    assert [line.split(",")[:2] for line in lines[1:]] == [["0", "0"], ["0", "1"], ["1", "0"]]

def test_ensure_directory(tmp_path):
    """
    Verifies that nested output directories are created once
    and that existing ones are accepted.
    """
    path = os.path.join(str(tmp_path), "a", "b")
    assert ensure_directory(path) == path
    assert os.path.isdir(path)
    ensure_directory(path)

def test_fail_raises_typed_error():
    """
    Verifies that fail raises the requested class,
    which derives from CutFEMError and, for
    configuration errors, from ValueError.
    """
    with pytest.raises(ConfigurationError) as info:
        fail(ConfigurationError, "bad value")
    assert isinstance(info.value, CutFEMError)
    assert isinstance(info.value, ValueError)

def test_non_convergence_error_carries_report():
    """
    Verifies that NonConvergenceError keeps the report it was raised with.
    """
    with pytest.raises(NonConvergenceError) as info:
        fail(NonConvergenceError, "no convergence", "report")
    assert info.value.report == "report"
