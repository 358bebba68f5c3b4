"""
Subcommands solve, convergence, tau-sweep and condition as library
functions. Each one runs the mesh levels of an ExperimentConfig in
order, writes CSV tables (and gnuplot scripts) to config.out_dir and
returns the rows it wrote.
"""
import os
from collections import namedtuple
from math import log
import numpy as np
from cutfem.assembly import assemble_nitsche, assemble_system, compute_errors, discrete_extension
from cutfem.classification import build_agglomeration_map, partition_dofs, partition_elements
from cutfem.cut import extract_active_mesh
from cutfem.errors import ConfigurationError, fail
from cutfem.fe_space import build_dof_map
from cutfem.linalg import condition_estimate, solve_spd
from cutfem.mesh import build_background_mesh
from cutfem.stabilization import assemble_stabilization, nodal_weights
from cutfem.utils import (FLOAT_FORMAT, ensure_directory, format_float, print_info_msg, print_success_msg,
                          print_warn_msg, write_csv, write_triplets)

Discretization = namedtuple("Discretization", ["n", "mesh", "active", "dofmap", "partition", "agglomeration", "dofpartition"])
Solution = namedtuple("Solution", ["u", "report", "system"])

def build_discretization(config, n):
    """
    Background mesh of level n, active mesh, dofs, element and dof
    partitions and the agglomeration map.
    """
    mesh = build_background_mesh(n, config.bbox)
    active = extract_active_mesh(mesh, config.level_set())
    dofmap = build_dof_map(active)
    partition = partition_elements(active, config.gamma)
    agglomeration = build_agglomeration_map(partition, config.l_max, config.target)
    dofpartition = partition_dofs(dofmap, partition)
    return Discretization(n, mesh, active, dofmap, partition, agglomeration, dofpartition)

def assemble_stabilized(config, disc, tau, data=None):
    """Assembles A_h = a_h + s_h at the given tau."""
    data = config.problem_data() if data is None else data
    nitsche = assemble_nitsche(disc.active, disc.dofmap, data, config.beta, config.order)
    stabilization = assemble_stabilization(config.stabilization(tau), disc.dofmap, disc.agglomeration,
                                           disc.dofpartition, config.extension_domain, disc.partition)
    return assemble_system(nitsche, stabilization)

# Relative residual attainable per unit of tau: the tau-scaled entries
# cancel in b - Ax, so the rounding floor of the true residual grows
# linearly in tau.
TAU_RESIDUAL_FLOOR = 1e-13
# Largest accepted slope of log delta against log tau.
TAU_SLOPE_LIMIT = -0.4

def solver_tolerance(config, tau):
    """Relative residual requested from CG at the given tau."""
    return max(config.solver_tol, TAU_RESIDUAL_FLOOR*tau)

def solve_level(config, disc, tau, data=None):
    system = assemble_stabilized(config, disc, tau, data)
    u, report = solve_spd(system.matrix, system.load, tol=solver_tolerance(config, tau))
    print_info_msg("n = %d, tau = %g: %d CG iterations, residual %.3e."%(disc.n, tau, report.iterations, report.residual))
    return Solution(u, report, system)

def compute_rates(h_list, err_list):
    """rate_k = log(e_{k-1}/e_k) / log(h_{k-1}/h_k); None for the first level."""
    rates = [None]
    for k in range(1, len(h_list)):
        if err_list[k - 1] > 0.0 and err_list[k] > 0.0:
            rates.append(log(err_list[k - 1]/err_list[k])/log(h_list[k - 1]/h_list[k]))
        else:
            rates.append(None)
    return rates

def loglog_slope(x, y):
    """Least squares slope of log y against log x."""
    return float(np.polyfit(np.log(np.asarray(x, dtype=np.float64)), np.log(np.asarray(y, dtype=np.float64)), 1)[0])

def _output(config, name):
    return os.path.join(ensure_directory(config.out_dir), name)

def _require_levels(config, count):
    if len(config.levels) < count:
        fail(ConfigurationError, "Subcommand %s needs at least %d mesh levels. Got: %s."%(config.command, count, config.levels))

def _rate_cell(rate):
    return "" if rate is None else format_float(rate)

def _format_rate(rate):
    return "---" if rate is None else "%.3f"%(rate)

def _write_text(path, text):
    with open(path, "w", newline="\n") as f:
        f.write(text)
    print_success_msg("Wrote %s."%(path))

SOLUTION_SCRIPT = """\
# Elevation plot of the discrete solution.
set datafile separator ','
set xlabel 'x'
set ylabel 'y'
set zlabel 'u_h'
set view 60, 30
splot '{csv}' every ::1 using 2:3:4 with points pointtype 7 pointsize 0.5 title 'u_h'
"""

CONVERGENCE_SCRIPT = """\
# Natural logarithm of the errors against log h, with first and second
# order reference lines.
set datafile separator ','
set xlabel 'log h'
set ylabel 'log error'
set key left top
tau = {tau}
plot '{csv}' every ::1 using (log($3)):($1 == tau ? log($5) : 1/0) with linespoints title 'L2', \\
     '{csv}' every ::1 using (log($3)):($1 == tau ? log($6) : 1/0) with linespoints title 'H1', \\
     '{csv}' every ::1 using (log($3)):($1 == tau ? 2*log($3) + {l2_shift} : 1/0) with lines dashtype 3 title 'O(h^2)', \\
     '{csv}' every ::1 using (log($3)):($1 == tau ? log($3) + {h1_shift} : 1/0) with lines dashtype 2 title 'O(h)'
"""

CONDITION_SCRIPT = """\
# Natural logarithm of the condition number against log h, with the
# O(h^-2) reference line.
set datafile separator ','
set xlabel 'log h'
set ylabel 'log kappa'
set key left bottom
plot {plots}
"""

def cmd_solve(config):
    """
    Solves on the finest configured level at the first tau and writes
    solution.csv (dof_id,x,y,value), summary.csv
    (h,dofs,l2_error,h1_error,iterations,residual) and solution.gp.
    """
    data = config.problem_data()
    disc = build_discretization(config, config.levels[-1])
    tau = config.taus[0]
    solution = solve_level(config, disc, tau, data)
    l2, h1 = compute_errors(solution.u, data, disc.dofmap, config.order)

    table = np.column_stack((np.arange(disc.dofmap.num_dofs), disc.dofmap.coordinates, solution.u))
    write_csv(_output(config, "solution.csv"), ["dof_id", "x", "y", "value"], table,
              ["%d", FLOAT_FORMAT, FLOAT_FORMAT, FLOAT_FORMAT])
    summary = [(float(disc.mesh.h), disc.dofmap.num_dofs, l2, h1, solution.report.iterations, float(solution.report.residual))]
    write_csv(_output(config, "summary.csv"), ["h", "dofs", "l2_error", "h1_error", "iterations", "residual"], summary,
              [FLOAT_FORMAT, "%d", FLOAT_FORMAT, FLOAT_FORMAT, "%d", FLOAT_FORMAT])
    _write_text(_output(config, "solution.gp"), SOLUTION_SCRIPT.format(csv="solution.csv"))
    if config.dump_matrices:
        write_triplets(_output(config, "system.txt"), solution.system.matrix)
        write_triplets(_output(config, "nitsche.txt"), solution.system.nitsche.matrix)
        write_triplets(_output(config, "stabilization.txt"), solution.system.stabilization.matrix)
    config.write(_output(config, "config_used.ini"))
    print_success_msg("solve: h = %.4e, L2 error = %.4e, H1 error = %.4e."%(disc.mesh.h, l2, h1))
    return summary

def cmd_convergence(config):
    """
    Errors per level and tau with observed rates between consecutive
    levels. Writes convergence.csv
    (tau,n,h,dofs,l2_error,h1_error,l2_rate,h1_rate,iterations) and
    convergence.gp.
    """
    _require_levels(config, 3)
    data = config.problem_data()
    discs = [build_discretization(config, n) for n in config.levels]
    rows = []
    for tau in config.taus:
        hs, l2s, h1s, results = [], [], [], []
        for disc in discs:
            solution = solve_level(config, disc, tau, data)
            l2, h1 = compute_errors(solution.u, data, disc.dofmap, config.order)
            hs.append(float(disc.mesh.h))
            l2s.append(l2)
            h1s.append(h1)
            results.append((disc, solution))
        l2_rates = compute_rates(hs, l2s)
        h1_rates = compute_rates(hs, h1s)
        for k, (disc, solution) in enumerate(results):
            rows.append((float(tau), disc.n, hs[k], disc.dofmap.num_dofs, l2s[k], h1s[k],
                         _rate_cell(l2_rates[k]), _rate_cell(h1_rates[k]), solution.report.iterations))
        print_success_msg("convergence (tau = %g): final L2 rate %s, H1 rate %s."%(tau, _format_rate(l2_rates[-1]), _format_rate(h1_rates[-1])))

    write_csv(_output(config, "convergence.csv"),
              ["tau", "n", "h", "dofs", "l2_error", "h1_error", "l2_rate", "h1_rate", "iterations"], rows,
              [FLOAT_FORMAT, "%d", FLOAT_FORMAT, "%d", FLOAT_FORMAT, FLOAT_FORMAT, "%s", "%s", "%d"])
    first = rows[0]
    _write_text(_output(config, "convergence.gp"),
                CONVERGENCE_SCRIPT.format(csv="convergence.csv", tau=repr(float(config.taus[0])),
                                          l2_shift=repr(log(first[4]) - 2*log(first[2])),
                                          h1_shift=repr(log(first[5]) - log(first[2]))))
    config.write(_output(config, "config_used.ini"))
    return rows

def cmd_tau_sweep(config):
    """
    Nodal family on the finest level for every tau: delta(tau) =
    max_{i in I^S} |omega_i . u_h| and the distance of u_h to its discrete
    extension. Writes tau_sweep.csv
    (tau,delta,extension_gap,relative_gap,iterations,residual) and
    tau_slope.csv (slope of log delta against log tau).
    """
    if config.family != "nodal":
        fail(ConfigurationError, "tau-sweep needs the nodal family. Got: %s."%(config.family))
    if len(config.taus) < 2:
        fail(ConfigurationError, "tau-sweep needs at least two tau values. Got: %s."%(config.taus))
    data = config.problem_data()
    disc = build_discretization(config, config.levels[-1])
    if len(disc.dofpartition.small_dofs) == 0:
        fail(ConfigurationError, "I^S is empty on level %d; the tau limit is trivial."%(disc.n))
    W = nodal_weights(disc.dofpartition, disc.agglomeration, disc.dofmap)
    rows, deltas = [], []
    for tau in config.taus:
        solution = solve_level(config, disc, tau, data)
        u = solution.u
        delta = float(np.max(np.abs(W @ u)))
        gap = float(np.max(np.abs(u - discrete_extension(u, disc.dofpartition, disc.agglomeration, disc.dofmap))))
        rows.append((float(tau), delta, gap, gap/float(np.max(np.abs(u))), solution.report.iterations, float(solution.report.residual)))
        deltas.append(delta)
    slope = loglog_slope(config.taus, deltas)
    write_csv(_output(config, "tau_sweep.csv"),
              ["tau", "delta", "extension_gap", "relative_gap", "iterations", "residual"], rows,
              [FLOAT_FORMAT, FLOAT_FORMAT, FLOAT_FORMAT, FLOAT_FORMAT, "%d", FLOAT_FORMAT])
    write_csv(_output(config, "tau_slope.csv"), ["n", "slope"], [(disc.n, slope)], ["%d", FLOAT_FORMAT])
    config.write(_output(config, "config_used.ini"))
    if slope <= TAU_SLOPE_LIMIT:
        print_success_msg("tau-sweep: slope of log delta against log tau = %.3f."%(slope))
    else:
        print_warn_msg("tau-sweep: slope of log delta against log tau = %.3f is above %.1f."%(slope, TAU_SLOPE_LIMIT))
    return rows, slope

def cmd_condition(config):
    """
    Condition number of A_h per level and tau. Writes condition.csv
    (tau,n,h,dofs,lambda_max,lambda_min,kappa), condition_slopes.csv
    (tau,slope) and condition.gp.
    """
    _require_levels(config, 3)
    discs = [build_discretization(config, n) for n in config.levels]
    data = config.problem_data()
    rows, slopes = [], []
    for tau in config.taus:
        hs, kappas = [], []
        for disc in discs:
            system = assemble_stabilized(config, disc, tau, data)
            estimate = condition_estimate(system.matrix, tol=config.condition_tol, seed=config.seed)
            hs.append(float(disc.mesh.h))
            kappas.append(estimate.kappa)
            rows.append((float(tau), disc.n, float(disc.mesh.h), disc.dofmap.num_dofs,
                         float(estimate.lambda_max), float(estimate.lambda_min), float(estimate.kappa)))
        slopes.append((float(tau), loglog_slope(hs, kappas)))
        print_success_msg("condition (tau = %g): slope of log kappa against log h = %.3f."%(tau, slopes[-1][1]))

    write_csv(_output(config, "condition.csv"), ["tau", "n", "h", "dofs", "lambda_max", "lambda_min", "kappa"], rows,
              [FLOAT_FORMAT, "%d", FLOAT_FORMAT, "%d", FLOAT_FORMAT, FLOAT_FORMAT, FLOAT_FORMAT])
    write_csv(_output(config, "condition_slopes.csv"), ["tau", "slope"], slopes, [FLOAT_FORMAT, FLOAT_FORMAT])
    plots = ["'condition.csv' every ::1 using (log($3)):($1 == %r ? log($7) : 1/0) with linespoints title 'tau = %g'"%(tau, tau)
             for tau in map(float, config.taus)]
    first = rows[0]
    plots.append("'condition.csv' every ::1 using (log($3)):(-2*log($3) + %r) with lines dashtype 2 title 'O(h^-2)'"%(log(first[6]) + 2*log(first[2])))
    _write_text(_output(config, "condition.gp"), CONDITION_SCRIPT.format(plots=", \\\n     ".join(plots)))
    config.write(_output(config, "config_used.ini"))
    return rows, slopes
