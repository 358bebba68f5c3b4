import os
import numpy as np
from colorama import init
from colorama import Fore, Style

# Intializes the colorama library.
init()

# 1 - Enable all (success, info and warning messages).
# 2 - Enable warning and info messages only.
# 3 - Enable warnings only.
# 4 - Disable all messages (errors are always printed).
_LOGGING_LEVEL = 3

def set_logging_level(level):
    """
    Sets the process wide console logging level.

    Parameters
    ----------
    * level                         : (int) 1 - Enable all (success, info and warning messages.)
                                            2 - Enable warning and info messages only,
                                            3 - Enable warnings only.
                                            4 - Disable all messages.
    Raises
    ------
    * ValueError
                                    * If level is not an integer in [1, 4].
    """
    global _LOGGING_LEVEL
    if int(level) != level or level < 1 or level > 4:
        print_error_msg("Invalid logging level %s."%(level))
        raise ValueError("Invalid logging level %s."%(level))
    _LOGGING_LEVEL = int(level)

def get_logging_level():
    return _LOGGING_LEVEL

def print_error_msg(msg):
    """
    The function can be used to print
    error messages to the console. The
    message is printed in red color.

    Parameters
    ----------
        msg: The message to print on the console.
    """
    print(Style.BRIGHT + Fore.RED + "[x]: ", msg, Style.RESET_ALL)

def print_info_msg(msg):
    """
    The function can be used to print
    information to the console. The
    message is printed in blue color.

    Parameters
    ----------
        msg: The message to print on the console.
    """
    if _LOGGING_LEVEL < 3:
        print(Style.BRIGHT + Fore.BLUE + "[i]: ", msg, Style.RESET_ALL)

def print_success_msg(msg):
    """
    The function can be used to print
    success messages to the console. The
    message is printed in green color.

    Parameters
    ----------
        msg: The message to print on the console.
    """
    if _LOGGING_LEVEL == 1:
        print(Style.BRIGHT + Fore.GREEN + "[*]: ", msg, Style.RESET_ALL)

def print_warn_msg(msg):
    """
    The function can be used to print
    warning messages to the console. The
    message is printed in yellow color.

    Parameters
    ----------
        msg: The message to print on the console.
    """
    if _LOGGING_LEVEL < 4:
        print(Style.BRIGHT + Fore.YELLOW + "[~]: ", msg, Style.RESET_ALL)

def print_check_msg(name, passed, detail=""):
    """
    Prints one pass/fail line of a diagnostic report. Check lines are
    part of the report itself and are printed at every logging level.
    """
    if passed:
        print(Style.BRIGHT + Fore.GREEN + "[PASS] " + Style.RESET_ALL + name, detail)
    else:
        print(Style.BRIGHT + Fore.RED + "[FAIL] " + Style.RESET_ALL + name, detail)

FLOAT_FORMAT = "%.16e"

def format_float(value):
    """
    Returns the fixed textual form used for every
    floating point number written to a CSV file.
    """
    return FLOAT_FORMAT%(float(value))

def write_csv(path, header, rows, fmt):
    """
    Writes a CSV table with a header row through numpy.savetxt.

    Parameters
    ----------
    * path                          : (str) Output file path.
    * header                        : (list) Column names.
    * rows                          : (list) Rows as tuples, or a 2D array.
    * fmt                           : (list) One format per column: "%d", FLOAT_FORMAT or "%s".
    """
    table = np.array(rows, dtype=object).reshape(-1, len(header))
    np.savetxt(path, table, fmt=fmt, delimiter=",", header=",".join(header), comments="", encoding="utf-8")
    print_success_msg("Wrote %s."%(path))

def write_triplets(path, matrix):
    """
    Writes a sparse matrix as row,col,value triplets sorted by row then column.
    """
    coo = matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    table = np.column_stack((coo.row[order], coo.col[order], coo.data[order]))
    write_csv(path, ["row", "col", "value"], table, ["%d", "%d", FLOAT_FORMAT])

def ensure_directory(path):
    if not os.path.isdir(path):
        os.makedirs(path)
    return path
