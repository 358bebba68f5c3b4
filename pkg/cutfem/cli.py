"""
Command line front end:

    cutfem <solve|convergence|tau-sweep|condition|verify>
           [--config FILE] [--out DIR] [--dump-matrices] [--seed N]
           [-l LEVEL] [--verbose]

Exit codes: 0 success, 1 failed verify check, 2 configuration error,
3 numerical failure.
"""
import argparse
import signal
import sys
from cutfem.config import COMMANDS, load_config
from cutfem.errors import ConfigurationError, CutFEMError
from cutfem.experiments import cmd_condition, cmd_convergence, cmd_solve, cmd_tau_sweep
from cutfem.utils import print_error_msg, print_info_msg, set_logging_level
from cutfem.verify import cmd_verify

EXIT_SUCCESS = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIGURATION = 2
EXIT_NUMERICAL = 3

OUTPUTS = """\
outputs (written to --out, every CSV has a header row):
  solve        solution.csv   dof_id,x,y,value
               summary.csv    h,dofs,l2_error,h1_error,iterations,residual
               solution.gp    gnuplot elevation plot of solution.csv
  convergence  convergence.csv  tau,n,h,dofs,l2_error,h1_error,l2_rate,h1_rate,iterations
               convergence.gp   log-log errors with O(h) and O(h^2) lines
  tau-sweep    tau_sweep.csv  tau,delta,extension_gap,relative_gap,iterations,residual
               tau_slope.csv  n,slope
  condition    condition.csv  tau,n,h,dofs,lambda_max,lambda_min,kappa
               condition_slopes.csv  tau,slope
               condition.gp   log-log kappa with the O(h^-2) line
  verify       verify.csv     check,passed,detail
  all          config_used.ini  effective configuration
  --dump-matrices (solve): system.txt, nitsche.txt, stabilization.txt as row,col,value
"""

HANDLERS = {
    "solve": cmd_solve,
    "convergence": cmd_convergence,
    "tau-sweep": cmd_tau_sweep,
    "condition": cmd_condition,
    "verify": cmd_verify,
}

def build_parser():
    parser = argparse.ArgumentParser(prog="cutfem",
                                     description="Cut finite element Poisson solver with face, extension and nodal ghost penalties.",
                                     epilog=OUTPUTS,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("command", choices=COMMANDS, help="Subcommand to run.")
    parser.add_argument("-c", "--config", default=None, help="INI configuration file. Default: built-in circle case.")
    parser.add_argument("-o", "--out", default=".", help="Output directory. Default: current directory.")
    parser.add_argument("--dump-matrices", action="store_true", help="Write the assembled matrices as row,col,value triplets.")
    parser.add_argument("--seed", type=int, default=None, help="Seed of every random draw. Default: 42.")
    parser.add_argument("-l", "--logging-level", default=3, type=int, help="Logging level, (1-4). Default: 3")
    parser.add_argument("--verbose", action="store_true", help="Same as -l 1.")
    return parser

def signal_handler(signum, frame):
    """
    Used to handle SIGINT.
    """
    print_info_msg("Caught Ctrl-C. Exiting.")
    sys.exit(130)

def main(argv=None):
    """
    Runs one subcommand and returns its exit code.
    """
    args = build_parser().parse_args(argv)
    signal.signal(signal.SIGINT, signal_handler)
    try:
        set_logging_level(1 if args.verbose else args.logging_level)
    except ValueError:
        return EXIT_CONFIGURATION

    overrides = {} if args.seed is None else {"seed": args.seed}
    try:
        config = load_config(args.config, args.command, overrides, args.out, args.dump_matrices, args.verbose)
        result = HANDLERS[args.command](config)
    except ConfigurationError:
        return EXIT_CONFIGURATION
    except CutFEMError:
        return EXIT_NUMERICAL
    except OSError as error:
        print_error_msg("Cannot write outputs: %s"%(error))
        return EXIT_CONFIGURATION

    if args.command == "verify":
        _results, passed = result
        return EXIT_SUCCESS if passed else EXIT_CHECK_FAILED
    return EXIT_SUCCESS

if __name__ == "__main__":
    sys.exit(main())
