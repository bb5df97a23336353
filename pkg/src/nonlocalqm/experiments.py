"""Config-driven experiments behind the command line runner.

Each runner takes a :class:`Config` and a seeded generator and returns a
:class:`Result` with scalar metrics, pass/fail checks (tolerance embedded)
and CSV tables.
"""
from __future__ import annotations

import contextlib
import warnings

import numpy as np
import scipy.linalg

from . import algebra, bandlimit, classical, evolution, smoothing, spectra
from .config import Block, Config
from .errors import InvalidArgument, NonlocalQMError
from .grid import ModelParams, gaussian, make_grid
from .hamiltonian import HERMITIAN_TAGS, TAGS, HamiltonianVariant, WeightPolicy, build_hamiltonian
from .potentials import KINDS, PotentialSpec
from .report import Result, Table, check


class NumericalFailure(Exception):
    """A library error raised while an experiment was running."""


@contextlib.contextmanager
def operation(name: str):
    try:
        yield
    except (NonlocalQMError, scipy.linalg.LinAlgError, FloatingPointError, np.linalg.LinAlgError) as exc:
        raise NumericalFailure(f"{name}: {type(exc).__name__}: {exc}") from exc


def _build(block: Block, fn, *args, **kw):
    """Run a constructor, turning its argument errors into config errors at ``block``."""
    try:
        return fn(*args, **kw)
    except InvalidArgument as exc:
        raise block.error(str(exc)) from None


# -- shared blocks ---------------------------------------------------------

def params_from(cfg: Config) -> ModelParams:
    b = cfg.block("params")
    return _build(b, ModelParams, hbar=b.get("hbar", float, 1.0), mass=b.get("mass", float, 1.0),
                  l_P=b.get("l_P", float), beta=b.get("beta", float, None))


def grid_from(cfg: Config, params: ModelParams):
    b = cfg.block("grid")
    return _build(b, make_grid, b.get("n_points", int), b.get("x_min", float), b.get("x_max", float), params.hbar)


def potential_from(b: Block) -> PotentialSpec:
    kind = b.get("kind", str, choices=KINDS)
    kw = {}
    if kind in ("square_well", "cutoff_well"):
        kw["half_width"] = b.get("half_width", float)
    if kind in ("square_well", "constant"):
        kw["V0"] = b.get("V0", float)
    if kind in ("harmonic", "cutoff_harmonic"):
        kw["omega"] = b.get("omega", float, 1.0)
    if kind == "tabulated":
        kw["values"] = tuple(b.get("values", "floats"))
    return _build(b, PotentialSpec, kind, **kw)


def variant_from(b: Block, params=None, psi=None) -> HamiltonianVariant:
    tag = b.get("tag", str, choices=TAGS)
    if tag != "weighted_hybrid":
        return HamiltonianVariant(tag)
    mode = b.get("mode", str, "fixed", choices=("fixed", "spread_rule"))
    if mode == "fixed":
        return _build(b, HamiltonianVariant, tag, b.get("w1", float))
    policy = _build(b, WeightPolicy, "spread_rule", alpha=b.get("alpha", float, 1.0))
    if psi is None:
        raise b.error("spread_rule needs an initial state to measure the spread")
    return policy.resolve(psi, params)


def initial_state(b: Block, grid):
    return gaussian(grid, b.get("x0", float, 0.0), b.get("sigma", float, 1.0), b.get("p0", float, 0.0))


# -- spectrum --------------------------------------------------------------

def run_spectrum(cfg: Config, rng) -> Result:
    params = params_from(cfg)
    grid = grid_from(cfg, params)
    spec = potential_from(cfg.block("potential"))
    sb = cfg.block("spectrum", required=False)
    n_levels = sb.get("n_levels", int, 4)
    band = sb.get("band_restricted", bool, False)
    kernel = sb.get("kernel", str, "continuum", choices=("continuum", "periodic"))
    vb = cfg.block("variant")
    init = cfg.block("initial", required=False)
    psi = initial_state(init, grid) if init.data else None
    variant = variant_from(vb, params, psi)
    res = Result()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        op = _build(vb, build_hamiltonian, variant, spec, grid, params, kernel=kernel, band_restricted=band)
        std = _build(vb, build_hamiltonian, "standard", spec, grid, params)
        hermitian = variant.tag in HERMITIAN_TAGS or band
        with operation("diagonalize"):
            mod = spectra.diagonalize(op, n_levels, non_hermitian_allowed=not hermitian)
            ref = spectra.diagonalize(std, n_levels)
    levels = Table(["level", "E_standard [energy]", "E_variant_real [energy]", "E_variant_imag [energy]",
                    "shift [energy]", "shift_formula [energy]", "residual [energy]"])
    formula = np.full(n_levels, np.nan)
    if variant.tag in ("gaussian_midpoint", "gaussian_simple"):
        with operation("perturbative_shifts"), warnings.catch_warnings():
            warnings.simplefilter("ignore")
            formula = spectra.perturbative_shifts(ref, spec, params, variant.tag)
    ev = np.asarray(mod.eigenvalues)
    for i in range(n_levels):
        levels.add(i, ref.eigenvalues[i], ev[i].real, ev[i].imag if np.iscomplexobj(ev) else 0.0,
                   ev[i].real - ref.eigenvalues[i], formula[i], mod.residuals[i])
    res.tables["levels"] = levels
    res.metrics.update(variant=variant.label, hermiticity_defect=op.hermiticity_defect,
                       ground_energy=float(ev[0].real), ground_shift=float(ev[0].real - ref.eigenvalues[0]),
                       operator_norm=mod.operator_norm)
    if hermitian:
        res.checks.append(check("hermiticity_defect", op.hermiticity_defect, 1e-12))
        res.checks.append(check("max_residual_over_norm", np.max(mod.residuals) / mod.operator_norm, 1e-8))
    if spec.kind in ("cutoff_well", "square_well") and band:
        ext = min(spectra.exterior_mass(v, spec.half_width) for v in mod.eigenvectors)
        res.metrics["min_exterior_mass"] = ext
        res.checks.append(check("min_exterior_mass", ext, 1e-12, ">"))
    l_values = sb.get("l_values", "floats", None)
    if l_values is not None:
        if variant.tag not in ("gaussian_midpoint", "gaussian_simple"):
            raise sb.error("an l_values sweep needs a gaussian_midpoint or gaussian_simple variant", "l_values")
        try:
            with operation("convergence_study"), warnings.catch_warnings():
                warnings.simplefilter("ignore")
                conv = spectra.convergence_study(variant, spec, params, l_values, grid, n_levels=1)
        except NumericalFailure as exc:
            if isinstance(exc.__cause__, InvalidArgument):
                raise sb.error(str(exc.__cause__), "l_values") from None
            raise
        table = Table(["l_P [length]", "shift_diagonalization [energy]", "shift_formula [energy]"])
        for l, d, f in zip(conv.l_values, conv.diag_shifts[:, 0], conv.formula_shifts[:, 0]):
            table.add(l, d, f)
        res.tables["convergence"] = table
        res.metrics["slope"] = conv.slope
        res.metrics["fit_residual"] = conv.fit_residual
        res.metrics["monotone"] = conv.monotone
        if conv.slope is not None:
            res.checks.append(check("slope_minus_two", abs(conv.slope - 2.0), 0.1))
    return res


# -- evolve ----------------------------------------------------------------

def run_evolve(cfg: Config, rng) -> Result:
    params = params_from(cfg)
    grid = grid_from(cfg, params)
    spec = potential_from(cfg.block("potential"))
    eb = cfg.block("evolve")
    psi0 = initial_state(cfg.block("initial", required=False), grid)
    variant = variant_from(cfg.block("variant"), params, psi0)
    pc = _build(eb, evolution.PropagationConfig, eb.get("dt", float), eb.get("n_steps", int),
                eb.get("method", str, "exact_eigenbasis"), eb.get("store_every", int, 1))
    res = Result()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        op = _build(cfg.block("variant"), build_hamiltonian, variant, spec, grid, params)
        with operation("propagate"):
            traj = evolution.propagate(psi0, op, pc)
    table = Table(["t [time]", "norm", "energy [energy]", "mean_x [length]", "delta_x [length]",
                   "mean_p [momentum]", "delta_p [momentum]"])
    for t, n, e, o in zip(traj.times, traj.norms, traj.energies, traj.observables):
        table.add(t, n, e, o.mean_x, o.delta_x, o.mean_p, o.delta_p)
    res.tables["trajectory"] = table
    tol = evolution.NORM_DRIFT_TOL[pc.method]
    res.metrics.update(variant=variant.label, norm_drift=traj.norm_drift, energy_drift=traj.energy_drift,
                       final_mean_x=traj.observables[-1].mean_x)
    res.checks.append(check("norm_drift", traj.norm_drift, tol))
    if eb.get("compare_crank_nicolson", bool, False) and pc.method == "exact_eigenbasis":
        with operation("propagate"):
            cn = evolution.propagate(psi0, op, evolution.PropagationConfig(pc.dt, pc.n_steps, "crank_nicolson",
                                                                           pc.store_every), with_observables=False)
        diff = float(np.max(np.abs(cn.amplitudes - traj.amplitudes)))
        res.metrics["crank_nicolson_max_difference"] = diff
        res.checks.append(check("crank_nicolson_agreement", diff, 1e-6))
    return res


# -- bandlimit-audit -------------------------------------------------------

def run_bandlimit_audit(cfg: Config, rng) -> Result:
    params = params_from(cfg)
    grid = grid_from(cfg, params)
    ab = cfg.block("bandlimit", required=False)
    n_states = ab.get("n_states", int, 1000)
    res = Result()
    ratios = Table(["state", "uncertainty_ratio", "idempotence_defect"])
    worst_idem, min_ratio = 0.0, np.inf
    with operation("project"):
        for i in range(n_states):
            psi = bandlimit.random_bandlimited(grid, params, rng)
            # a generic (not band-limited) state for the idempotence test
            raw = rng.standard_normal(grid.n_points) + 1j * rng.standard_normal(grid.n_points)
            once = bandlimit.project_array(raw, grid, params)
            twice = bandlimit.project_array(once, grid, params)
            idem = float(np.linalg.norm(twice - once) / np.linalg.norm(raw))
            u = bandlimit.uncertainty_bound_check(psi, params)
            worst_idem = max(worst_idem, idem)
            min_ratio = min(min_ratio, u.ratio)
            ratios.add(i, u.ratio, idem)
    res.tables["states"] = ratios
    with operation("sinc_kernel_matrix"):
        cont = bandlimit.sinc_kernel_matrix(grid, params)
        per = bandlimit.sinc_kernel_matrix(grid, params, periodic=True)
    with operation("projection_leakage"):
        g0, _ = bandlimit.project(gaussian(grid, 0.0, ab.get("sigma", float, 1.0)), params)
        leak = bandlimit.projection_leakage(g0, PotentialSpec.harmonic(1.0), params)
    res.metrics.update(max_idempotence_defect=worst_idem, min_uncertainty_ratio=min_ratio,
                       continuum_kernel_idempotence=cont.info["idempotence_defect"],
                       periodic_kernel_idempotence=per.info["idempotence_defect"],
                       harmonic_leakage=leak, n_states=n_states)
    res.checks += [check("max_idempotence_defect", worst_idem, 1e-10),
                   check("min_uncertainty_ratio", min_ratio, 1.0, ">="),
                   check("periodic_kernel_idempotence", per.info["idempotence_defect"], 1e-10),
                   check("harmonic_leakage", leak, 0.0, ">")]
    return res


# -- deconvolve ------------------------------------------------------------

def run_deconvolve(cfg: Config, rng) -> Result:
    params = params_from(cfg)
    grid = grid_from(cfg, params)
    db = cfg.block("deconvolve", required=False)
    orders = [int(v) for v in db.get("orders", "floats", [1, 2, 4, 8])]
    psi = initial_state(cfg.block("initial", required=False), grid)
    res = Result()
    table = Table(["n_max", "roundtrip_error"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with operation("gaussian_smooth"):
            smooth = smoothing.gaussian_smooth(psi, params)
        errs = []
        with operation("deconvolve"):
            for n in orders:
                back = smoothing.deconvolve(smooth, params, smoothing.DeconvolutionConfig("hermite_series", n_max=n))
                errs.append(float(np.max(np.abs(back.amplitudes - psi.amplitudes))))
                table.add(n, errs[-1])
            q = bandlimit.random_bandlimited(grid, params, rng)
            k_max = db.get("k_max", float, None)
            back = smoothing.deconvolve(smoothing.gaussian_smooth(q, params), params,
                                        smoothing.DeconvolutionConfig("spectral", k_max=k_max))
            spectral_err = float(np.max(np.abs(back.amplitudes - q.amplitudes)) / np.max(np.abs(q.amplitudes)))
    res.tables["series"] = table
    decreasing = bool(np.all(np.diff(errs) < 0))
    res.metrics.update(series_errors=errs, series_orders=orders, spectral_roundtrip_error=spectral_err,
                       strictly_decreasing=decreasing)
    res.checks.append(check("spectral_roundtrip_error", spectral_err, 1e-8))
    res.checks.append(check("series_error_strictly_decreasing", float(decreasing), 1.0, ">="))
    return res


# -- algebra-check ---------------------------------------------------------

def run_algebra_check(cfg: Config, rng) -> Result:
    params = params_from(cfg)
    ab = cfg.block("algebra", required=False)
    maps = ab.get("maps", list, ["tan", "tanh", "sin"])
    sizes = [int(v) for v in ab.get("n_points", "floats", [512, 1024, 2048])]
    convention = ab.get("convention", str, "stated", choices=algebra.CONVENTIONS)
    b = params.beta
    # bump placement per map, in units of beta: (center, half width)
    default_bumps = {"tan": (0.5, 1.0), "tanh": (0.3, 1.0), "sin": (0.05, 0.2), "identity": (0.0, 0.5)}
    if convention == "derived":
        default_bumps["sin"] = (0.1, 0.4)
    res = Result()
    table = Table(["map", "n_points", "spacing [momentum]", "residual"])
    for tag in maps:
        if tag not in algebra.MAP_TAGS:
            raise ab.error(f"unknown map {tag!r}", "maps")
        c, w = default_bumps[tag]
        with operation("commutator_residual"):
            dmap = algebra.make_map(tag, params, convention)
            conv = algebra.commutator_convergence(dmap, c * b, w * b, params.hbar, sizes)
        for n, h, r in zip(sizes, conv.spacings, conv.residuals):
            table.add(tag, n, h, r)
        res.metrics[f"{tag}_residual"] = float(conv.residuals[-1])
        res.metrics[f"{tag}_observed_order"] = float(conv.observed_orders[-1])
        res.checks.append(check(f"{tag}_residual", conv.residuals[-1], 1e-6))
        res.checks.append(check(f"{tag}_observed_order", conv.observed_orders[-1], 6.0, ">="))
    res.tables["commutators"] = table
    return res


# -- orbit -----------------------------------------------------------------

def _classical_potential(b: Block) -> classical.ClassicalPotential:
    kind = b.get("kind", str, choices=("kepler", "harmonic"))
    if kind == "kepler":
        return classical.ClassicalPotential.kepler(b.get("strength", float))
    return classical.ClassicalPotential.harmonic(b.get("omega", float), b.get("mass", float, 1.0))


def run_orbit(cfg: Config, rng) -> Result:
    ob = cfg.block("orbit")
    mode = ob.get("mode", str, choices=("modified", "theta_cutoff", "soccer_ball"))
    params = params_from(cfg)
    res = Result()
    if mode == "soccer_ball":
        mass, speed = ob.get("body_mass", float), ob.get("speed", float)
        with operation("suppression_factor"):
            rep = classical.suppression_factor(mass, speed, params)
        threshold = ob.get("order_threshold", float, 1e55)
        res.metrics.update(momentum=rep.momentum, exponent=rep.exponent, log10_factor=rep.log10_factor,
                           order_consistent=bool(rep.exponent >= threshold))
        res.checks.append(check("exponent_order", rep.exponent, threshold, ">="))
        comp = ob.sub("composite")
        if comp.data:
            l_eff = _build(comp, classical.effective_planck_length, params.l_P,
                           comp.get("n_constituents", float), comp.get("alpha", float))
            eff = params.replace(l_P=l_eff)
            rep2 = classical.suppression_factor(mass, speed, eff)
            res.metrics.update(effective_l_P=l_eff, effective_exponent=rep2.exponent)
            if comp.get("integrate", bool, False):
                state0 = classical.ClassicalState(comp.get("position", "floats"), comp.get("momentum", "floats"))
                pot = _classical_potential(comp.sub("potential", required=True))
                tol = comp.get("tol", float, 1e-10)
                with operation("integrate_orbit"):
                    orb = classical.integrate_orbit(state0, pot, eff, comp.get("t_end", float), tol)
                res.metrics.update(effective_max_deviation=orb.max_deviation, effective_energy_drift=orb.energy_drift)
                res.checks.append(check("effective_deviation", orb.max_deviation, 10 * tol))
        return res
    pot = _classical_potential(ob.sub("potential", required=True))
    state0 = _build(ob, classical.ClassicalState, ob.get("position", "floats"), ob.get("momentum", "floats"))
    t_end = ob.get("t_end", float)
    tol = ob.get("tol", float, 1e-10)
    n_frames = ob.get("n_frames", int, 2001)
    if mode == "modified":
        with operation("integrate_orbit"):
            orb = classical.integrate_orbit(state0, pot, params, t_end, tol, n_frames=n_frames)
        table = Table(["t [time]"] + [f"r{i} [length]" for i in range(state0.dim)]
                      + [f"p{i} [momentum]" for i in range(state0.dim)] + ["H [energy]"])
        for t, r, p, e in zip(orb.times, orb.positions, orb.momenta, orb.energies):
            table.add(t, *r, *p, e)
        res.tables["orbit"] = table
        peri = Table(["revolution", "t [time]", "angle [rad]", "reference_angle [rad]"])
        ref_angles = orb.reference.perihelion_angles
        for i, (t, a) in enumerate(zip(orb.perihelion_times, orb.perihelion_angles)):
            peri.add(i, t, a, ref_angles[i] if i < ref_angles.size else float("nan"))
        res.tables["perihelia"] = peri
        p0 = float(np.linalg.norm(state0.momentum))
        res.metrics.update(max_deviation=orb.max_deviation, energy_drift=orb.energy_drift,
                           deformation=params.l_P * p0 / params.hbar, n_perihelia=int(orb.perihelion_angles.size))
        res.checks.append(check("energy_drift", orb.energy_drift, tol))
        if ob.get("expect_newtonian", bool, False):
            res.checks.append(check("max_deviation", orb.max_deviation, 10 * tol))
        return res
    theta_mode = ob.get("theta_mode", str, "potential_only", choices=classical.THETA_MODES)
    with operation("integrate_theta_cutoff"):
        out = classical.integrate_theta_cutoff(state0, pot, params, t_end, theta_mode, tol, n_frames=n_frames)
    table = Table(["t [time]"] + [f"r{i} [length]" for i in range(state0.dim)]
                  + [f"p{i} [momentum]" for i in range(state0.dim)])
    for t, r, p in zip(out.times, out.positions, out.momenta):
        table.add(t, *r, *p)
    res.tables["orbit"] = table
    res.metrics.update(crossings=out.crossings, final_speed_over_beta=float(np.linalg.norm(out.momenta[-1]) / params.beta))
    return res


RUNNERS = {
    "spectrum": run_spectrum,
    "evolve": run_evolve,
    "bandlimit-audit": run_bandlimit_audit,
    "deconvolve": run_deconvolve,
    "algebra-check": run_algebra_check,
    "orbit": run_orbit,
}


# -- sweep -----------------------------------------------------------------

def run_sweep(cfg: Config, rng_factory) -> Result:
    sb = cfg.block("sweep")
    command = sb.get("command", str, choices=tuple(RUNNERS))
    parameter = sb.get("parameter", str)
    values = sb.get("values", list)
    output = sb.get("output", str)
    res = Result()
    table = Table([parameter, output])
    outputs = []
    for v in values:
        point = cfg.with_value(parameter, v)
        r = RUNNERS[command](point, rng_factory())
        if output not in r.metrics:
            raise sb.error(f"{command} produces no metric {output!r}; available: {sorted(r.metrics)}", "output")
        val = r.metrics[output]
        if not isinstance(val, (int, float, bool, np.floating, np.integer)) and val is not None:
            raise sb.error(f"metric {output!r} is not a scalar", "output")
        outputs.append(val)
        table.add(v, float("nan") if val is None else val)
    res.tables["sweep"] = table
    res.metrics.update(command=command, parameter=parameter, values=list(values), outputs=outputs)
    return res

