"""
Diagnostic suite behind the verify subcommand. Every check returns
CheckResult rows; a failing check never stops the suite. Details are
kept free of commas so that verify.csv needs no quoting.
"""
import os
from collections import namedtuple
import numpy as np
from cutfem.assembly import (assemble_boundary_flux, assemble_mass, assemble_nitsche, assemble_stiffness,
                             assemble_system, clement_interpolate, discrete_extension, strong_interpolant)
from cutfem.classification import verify_assumptions
from cutfem.cut import extract_active_mesh, gather_boundary_rules, gather_volume_rules
from cutfem.errors import CutFEMError
from cutfem.experiments import assemble_stabilized, build_discretization, loglog_slope
from cutfem.levelset import LevelSet
from cutfem.linalg import is_symmetric, solve_spd
from cutfem.problems import affine_problem
from cutfem.stabilization import FAMILIES, StabilizationSpec, assemble_stabilization, stab_seminorm
from cutfem.utils import ensure_directory, print_check_msg, print_warn_msg, write_csv

CheckResult = namedtuple("CheckResult", ["name", "passed", "detail"])

# Growth factor allowed between consecutive levels for the empirical constants.
GROWTH_LIMIT = 2.0
QUADRATURE_SLOPE = 1.9
WEAK_CONSISTENCY_SLOPE = 0.9
PATCH_TOLERANCE = 1e-10

def _skipped(name, reason):
    print_warn_msg("%s skipped: %s"%(name, reason))
    return CheckResult(name, True, "skipped: %s"%(reason))

def _max_abs(matrix):
    return float(abs(matrix).max()) if matrix.nnz else 0.0

def _numbers(values):
    return " ".join("%.3e"%(v) for v in values)

def _random_vectors(config, n):
    rng = np.random.default_rng(config.seed)
    return rng.standard_normal((config.samples, n))

def _family_spec(family, config, tau):
    m = 1 if family in ("extension_gradient", "face_h1") else config.m
    return StabilizationSpec(family, m, tau)

def _circle_inside_box(config):
    x0, y0, x1, y1 = config.bbox
    cx, cy = config.center
    r = config.radius
    return cx - r > x0 and cx + r < x1 and cy - r > y0 and cy + r < y1

def check_quadrature(config, discs):
    """
    Total cut volume and interface weights against pi r^2 and 2 pi r
    (circle inside the box), or the volume of Omega plus the volume of
    its complement against the box area (halfplane).
    """
    results = []
    if config.geometry == "circle" and _circle_inside_box(config):
        hs, area_errors, length_errors = [], [], []
        for disc in discs:
            volume, _ = gather_volume_rules(disc.active, 2)
            boundary, _ = gather_boundary_rules(disc.active)
            hs.append(disc.mesh.h)
            area_errors.append(abs(volume.weights.sum() - np.pi*config.radius**2))
            length_errors.append(abs(boundary.weights.sum() - 2.0*np.pi*config.radius))
        if len(discs) < 2:
            return [_skipped("quadrature_area", "needs two mesh levels")]
        for name, errors in (("quadrature_area", area_errors), ("quadrature_perimeter", length_errors)):
            if min(errors) == 0.0:
                results.append(CheckResult(name, True, "exact"))
                continue
            slope = loglog_slope(hs, errors)
            results.append(CheckResult(name, slope >= QUADRATURE_SLOPE, "slope %.3f errors %s"%(slope, _numbers(errors))))
        return results

    x0, y0, x1, y1 = config.bbox
    box_area = (x1 - x0)*(y1 - y0)
    for disc in discs:
        phi = disc.active.phi
        if phi.kind == "halfplane":
            complement = LevelSet.halfplane(-phi.normal, -phi.offset)
        else:
            return [_skipped("quadrature_area", "circle crosses the bounding box")]
        inside, _ = gather_volume_rules(disc.active, 2)
        try:
            outside, _ = gather_volume_rules(extract_active_mesh(disc.mesh, complement), 2)
            total = inside.weights.sum() + outside.weights.sum()
        except CutFEMError:
            total = inside.weights.sum()
        error = abs(total - box_area)
        results.append(CheckResult("quadrature_area[n=%d]"%(disc.n), error <= 1e-10*box_area, "error %.3e"%(error)))
    return results

def check_assumptions(config, discs):
    results = []
    for disc in discs:
        report = verify_assumptions(disc.agglomeration, disc.partition, disc.dofmap, disc.dofpartition, config.l_max)
        kinds = sorted(set(v.violation_kind for v in report))
        detail = "no violations" if not report else "%d violations (%s)"%(len(report), " ".join(kinds))
        results.append(CheckResult("assumptions[n=%d]"%(disc.n), not report, "l_max = %d: %s"%(config.l_max, detail)))
        write_csv(os.path.join(ensure_directory(config.out_dir), "assumptions_n%d.csv"%(disc.n)),
                  ["element_id", "violation_kind", "path_length"], report, ["%d", "%s", "%d"])
    return results

def check_families(config, disc, tau):
    """Symmetry, positive semidefiniteness and the affine kernel of every family."""
    results = []
    coordinates = disc.dofmap.coordinates
    affine = 0.3 + 0.7*coordinates[:, 0] - 1.1*coordinates[:, 1]
    for family in FAMILIES:
        spec = _family_spec(family, config, tau)
        S = assemble_stabilization(spec, disc.dofmap, disc.agglomeration, disc.dofpartition,
                                   config.extension_domain, disc.partition).matrix
        scale = _max_abs(S)
        results.append(CheckResult("symmetric[%s]"%(family), is_symmetric(S), "max |S| = %.3e"%(scale)))
        eigenvalues = np.linalg.eigvalsh(S.toarray())
        results.append(CheckResult("psd[%s]"%(family), eigenvalues[0] >= -1e-12*max(eigenvalues[-1], 0.0),
                                   "lambda_min = %.3e"%(eigenvalues[0])))
        residual = float(np.max(np.abs(S @ affine)))
        results.append(CheckResult("affine_kernel[%s]"%(family), residual <= 1e-10*max(scale, 1.0)*np.max(np.abs(affine)),
                                   "max |S v| = %.3e"%(residual)))
    nitsche = assemble_nitsche(disc.active, disc.dofmap, config.problem_data(), config.beta, config.order)
    results.append(CheckResult("symmetric[nitsche]", is_symmetric(nitsche.matrix), ""))
    return results

def check_discrete_extension(config, discs, tau):
    """Nodal kernel = image of the discrete extension, idempotence and strong consistency."""
    results = []
    data = config.problem_data()
    for disc in discs:
        if len(disc.dofpartition.small_dofs) == 0:
            results.append(_skipped("discrete_extension[n=%d]"%(disc.n), "I^S is empty"))
            continue
        S = assemble_stabilization(StabilizationSpec("nodal", config.m, tau), disc.dofmap,
                                   disc.agglomeration, disc.dofpartition).matrix
        scale = max(_max_abs(S), 1.0)
        kernel, idempotence = 0.0, 0.0
        for v in _random_vectors(config, disc.dofmap.num_dofs):
            w = discrete_extension(v, disc.dofpartition, disc.agglomeration, disc.dofmap)
            ww = discrete_extension(w, disc.dofpartition, disc.agglomeration, disc.dofmap)
            norm = np.max(np.abs(v))
            kernel = max(kernel, np.max(np.abs(S @ w))/(scale*norm))
            idempotence = max(idempotence, np.max(np.abs(ww - w))/norm)
        results.append(CheckResult("nodal_kernel[n=%d]"%(disc.n), kernel <= 1e-13, "max relative |S Ev| = %.3e"%(kernel)))
        results.append(CheckResult("extension_idempotent[n=%d]"%(disc.n), idempotence <= 1e-13, "max relative change = %.3e"%(idempotence)))

        u = strong_interpolant(data.u_exact, disc.active, disc.dofmap, disc.dofpartition, disc.agglomeration)
        residual = float(np.max(np.abs(S @ u)))/(scale*np.max(np.abs(u)))
        results.append(CheckResult("strong_consistency[n=%d]"%(disc.n), residual <= 1e-12,
                                   "seminorm %.3e; relative |S Pi u| = %.3e"%(stab_seminorm(S, u), residual)))
    return results

def check_weak_consistency(config, discs):
    """||pi_h u||_s at tau = 1 decreases at least linearly in h."""
    name = "weak_consistency[%s]"%(config.family)
    if len(discs) < 2:
        return [_skipped(name, "needs two mesh levels")]
    data = config.problem_data()
    hs, seminorms = [], []
    for disc in discs:
        spec = _family_spec(config.family, config, 1.0)
        S = assemble_stabilization(spec, disc.dofmap, disc.agglomeration, disc.dofpartition,
                                   config.extension_domain, disc.partition)
        hs.append(disc.mesh.h)
        seminorms.append(stab_seminorm(S, clement_interpolate(data.u_exact, disc.active, disc.dofmap)))
    if min(seminorms) == 0.0:
        return [_skipped(name, "zero seminorm on some level")]
    slope = loglog_slope(hs, seminorms)
    return [CheckResult(name, slope >= WEAK_CONSISTENCY_SLOPE, "slope %.3f"%(slope))]

def _max_ratio(vectors, numerator, denominator):
    ratios = [(v @ (numerator @ v))/(v @ (denominator @ v)) for v in vectors]
    return float(max(ratios))

def _min_ratio(vectors, numerator, denominator):
    ratios = [(v @ (numerator @ v))/(v @ (denominator @ v)) for v in vectors]
    return float(min(ratios))

def _growth_check(name, constants):
    if len(constants) < 2:
        return _skipped(name, "needs two mesh levels")
    growth = max(b/a for a, b in zip(constants, constants[1:]))
    return CheckResult(name, growth <= GROWTH_LIMIT, "constants %s"%(_numbers(constants)))

def check_stability(config, discs, tau):
    """
    Empirical constants of the stability estimate (nodal family, m = 0, 1),
    of the inverse inequality on dOmega (extension and nodal families) and
    coercivity of A_h over random vectors.
    """
    results = []
    for m in (0, 1):
        constants = []
        for disc in discs:
            assemble = assemble_stiffness if m == 1 else assemble_mass
            full = assemble(disc.active, disc.dofmap, "full")
            cut = assemble(disc.active, disc.dofmap, "cut")
            S = assemble_stabilization(StabilizationSpec("nodal", m, tau), disc.dofmap,
                                       disc.agglomeration, disc.dofpartition).matrix
            constants.append(_max_ratio(_random_vectors(config, disc.dofmap.num_dofs), full, cut + S))
        results.append(_growth_check("stability[nodal m=%d]"%(m), constants))

    for family in ("extension_gradient", "nodal"):
        constants = []
        for disc in discs:
            flux = assemble_boundary_flux(disc.active, disc.dofmap)
            stiffness = assemble_stiffness(disc.active, disc.dofmap, "cut")
            S = assemble_stabilization(StabilizationSpec(family, 1, tau), disc.dofmap, disc.agglomeration,
                                       disc.dofpartition, config.extension_domain, disc.partition).matrix
            constants.append(_max_ratio(_random_vectors(config, disc.dofmap.num_dofs), flux, stiffness + S))
        results.append(_growth_check("inverse_inequality[%s]"%(family), constants))

    for disc in discs:
        system = assemble_stabilized(config, disc, tau)
        mass = assemble_mass(disc.active, disc.dofmap, "full")
        smallest = _min_ratio(_random_vectors(config, disc.dofmap.num_dofs), system.matrix, mass)
        results.append(CheckResult("coercivity[n=%d]"%(disc.n), smallest > 0.0, "min v^T A v / v^T M v = %.3e"%(smallest)))
    return results

def check_patch_test(config, tau):
    """Affine solution on a halfplane domain is reproduced at the nodes."""
    x0, _, x1, _ = config.bbox
    offset = 0.5*(x0 + x1) + 0.125*(x1 - x0)
    patch = config.with_values(geometry="halfplane", normal=(1.0, 0.0), offset=offset)
    disc = build_discretization(patch, config.levels[0])
    data = affine_problem(0.0, 1.0, 0.0)
    nitsche = assemble_nitsche(disc.active, disc.dofmap, data, config.beta, config.order)
    S = assemble_stabilization(_family_spec(config.family, config, tau), disc.dofmap, disc.agglomeration,
                               disc.dofpartition, config.extension_domain, disc.partition)
    system = assemble_system(nitsche, S)
    u, _report = solve_spd(system.matrix, system.load, tol=1e-13)
    error = float(np.max(np.abs(u - disc.dofmap.interpolate(data.u_exact))))
    return [CheckResult("patch_test[%s]"%(config.family), error <= PATCH_TOLERANCE, "max nodal error %.3e"%(error))]

def run_checks(config):
    """
    Runs every check on the configured levels at the first tau.

    Returns
    -------
    * results                       : (list) CheckResult rows in execution order.
    """
    tau = config.taus[0]
    discs = [build_discretization(config, n) for n in config.levels]
    suites = [
        ("quadrature", lambda: check_quadrature(config, discs)),
        ("assumptions", lambda: check_assumptions(config, discs)),
        ("families", lambda: check_families(config, discs[0], tau)),
        ("discrete_extension", lambda: check_discrete_extension(config, discs, tau)),
        ("weak_consistency", lambda: check_weak_consistency(config, discs)),
        ("stability", lambda: check_stability(config, discs, tau)),
        ("patch_test", lambda: check_patch_test(config, tau)),
    ]
    results = []
    for name, suite in suites:
        try:
            rows = suite()
        except CutFEMError as error:
            rows = [CheckResult(name, False, "%s: %s"%(type(error).__name__, str(error).replace(",", ";")))]
        for row in rows:
            print_check_msg(row.name, row.passed, row.detail)
        results.extend(rows)
    return results

def cmd_verify(config):
    """
    Runs the suite, writes verify.csv (check,passed,detail) and returns
    (results, all_passed).
    """
    results = run_checks(config)
    path = os.path.join(ensure_directory(config.out_dir), "verify.csv")
    write_csv(path, ["check", "passed", "detail"], [(r.name, "yes" if r.passed else "no", r.detail) for r in results],
              ["%s", "%s", "%s"])
    config.write(os.path.join(config.out_dir, "config_used.ini"))
    passed = all(r.passed for r in results)
    if not passed:
        print_warn_msg("%d of %d checks failed."%(sum(not r.passed for r in results), len(results)))
    return results, passed
