import os
import signal
import argparse
from cutfem.config import load_config
from cutfem.experiments import cmd_condition, cmd_convergence, cmd_tau_sweep
from cutfem.stabilization import FAMILIES
from cutfem.utils import print_info_msg, set_logging_level

parser = argparse.ArgumentParser(description="Runs the convergence, condition number and tau limit experiments for several stabilizations.")
parser.add_argument("-c", "--config", default=None, help="INI configuration file. Default: built-in circle case.")
parser.add_argument("-o", "--out", default="experiments", help="Output root directory, one subdirectory per family. Default: experiments.")
parser.add_argument("-f", "--families", default="face_gradient,extension_gradient,nodal", help="Comma separated stabilization families. Default: face_gradient,extension_gradient,nodal.")
parser.add_argument("-t", "--taus", default="0.1,1000", help="Comma separated tau values for the convergence runs. Default: 0.1,1000.")
parser.add_argument("-n", "--levels", default="8,16,32,64", help="Comma separated mesh levels. Default: 8,16,32,64.")
parser.add_argument("-sc", "--skip-condition", default=0, type=int, help="Skip the condition number runs. Default: 0.")
parser.add_argument("-l", "--logging-level", default=2, type=int, help="Logging level, (1-4). Default: 2")

args = parser.parse_args()

def signal_handler(signum, frame):
    """
    Used to handle SIGINT.
    """
    print_info_msg("Caught Ctrl-C. Exiting.")
    exit(0)

def run_family(family):
    """
    Convergence and condition runs of one family, written to
    <out>/<family>/convergence and <out>/<family>/condition.

    Parameters
    ----------
    * family                       : (str) Stabilization family.
    """
    root = os.path.join(args.out, family)
    convergence = load_config(args.config, "convergence", out_dir=os.path.join(root, "convergence"))
    convergence = convergence.with_values(family=family, tau=args.taus, levels=args.levels)
    cmd_convergence(convergence)

    if args.skip_condition == 0:
        condition = load_config(args.config, "condition", out_dir=os.path.join(root, "condition"))
        condition = condition.with_values(family=family, levels=args.levels)
        cmd_condition(condition)

if __name__ == "__main__":

    signal.signal(signal.SIGINT, signal_handler)
    set_logging_level(args.logging_level)

    families = [f.strip() for f in args.families.split(",") if f.strip()]
    for family in families:
        if family not in FAMILIES:
            parser.error("Unknown family %s. Expected one of %s."%(family, FAMILIES))

    for family in families:
        print_info_msg("Running the %s stabilization."%(family))
        run_family(family)

    if "nodal" in families:
        sweep = load_config(args.config, "tau-sweep", out_dir=os.path.join(args.out, "nodal", "tau-sweep"))
        cmd_tau_sweep(sweep)
