"""
Reproduction Service - Runs the CLI commands and emits their data files
"""
from dataclasses import dataclass, replace
import logging
from pathlib import Path
import time
from typing import Optional

import numpy as np

from config import settings
from decoherence import calibrate, rates, scale_to_material, sweep_temp, sweep_x
from errors import DomainError
from logging_config import LogLevelContext, get_logger, log_computation
from magnetostatics import field_map, find_x_optim, homogeneity_c, stray_bz, stray_bz_gradient_x
from register import (
    LineKind,
    RegisterDesign,
    addressable_count,
    free_window,
    ising_ratio,
    overlap_check,
    qubit_lines,
    reference_lines,
    spinwave_resonance_lines,
    full_spectrum,
)
from schemas import (
    CalibrationRecord,
    DesignReport,
    LineRecord,
    QubitReport,
    RunConfig,
    WindowReport,
)
from services.output_service import OutputService
from spinwave import (
    ModeSpectrum,
    PotentialProfile,
    assemble_lines,
    build_potential,
    fd_eigensolve,
    highest_gap,
    tm_eigensolve,
)
from units import (
    MaterialParams,
    StripeGeometry,
    gauss_to_tesla,
    joule_to_ueV,
    m_to_nm,
    nm_to_m,
    tesla_to_gauss,
    z_star,
)

logger = get_logger(__name__)

T_M_TO_G_NM = 1e13


@dataclass
class RunContext:
    """Inputs and spin-wave solution shared by the spectrum-based commands"""
    config: RunConfig
    geom: StripeGeometry
    mat: MaterialParams
    design: RegisterDesign
    potential: Optional[PotentialProfile] = None
    modes: Optional[ModeSpectrum] = None
    lines: Optional[list] = None


def _inclusive_range(start: float, stop: float, step: float) -> np.ndarray:
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)


class ReproductionService:
    """One static method per CLI command; each returns the files it wrote"""

    @staticmethod
    def output_dir(config: RunConfig) -> Path:
        return OutputService.ensure_dir(config.output_dir or settings.output_dir)

    @staticmethod
    def prepare(config: RunConfig, solve: bool = True, mat: MaterialParams = None) -> RunContext:
        """Validate physical inputs up front and optionally solve the spin-wave modes; mat replaces the configured material"""
        geom = config.to_geometry()
        design = config.to_design()
        if mat is None:
            mat = design.mat
        else:
            design = replace(design, mat=mat)
        context = RunContext(config=config, geom=geom, mat=mat, design=design)
        if solve:
            m = config.modes
            context.potential = build_potential(geom, mat, 0.0, m.n_grid, m.bc)
            context.modes = tm_eigensolve(context.potential, m.n_max)
            context.lines = assemble_lines(context.modes, geom, mat, config.nu, m.n_x_max)
            logger.info(f"Solved {len(context.modes)} modes, {len(context.lines)} spin-wave lines "
                        f"({mat.name}, bc={m.bc.value})")
        return context

    # ========================================================================
    # fieldmap
    # ========================================================================

    @staticmethod
    def cmd_fieldmap(config: RunConfig) -> list:
        start = time.perf_counter()
        ctx = ReproductionService.prepare(config, solve=False)
        out = ReproductionService.output_dir(config)
        fm = config.fieldmap
        geom, mat = ctx.geom, ctx.mat
        written = []

        xs_nm = np.linspace(fm.x_min_nm, fm.x_max_nm, fm.nx)
        zs_nm = np.linspace(fm.z_min_nm, fm.z_max_nm, fm.nz)
        bz, bx = field_map(geom, mat, nm_to_m(xs_nm), nm_to_m(zs_nm))
        rows = (
            (xs_nm[i], zs_nm[j], tesla_to_gauss(bz[j, i]), tesla_to_gauss(bx[j, i]))
            for j in range(fm.nz) for i in range(fm.nx)
        )
        written.append(OutputService.write_csv(out / "fieldmap.csv", ["x_nm", "z_nm", "Bz_G", "Bx_G"], rows))

        x_nm = _inclusive_range(fm.profile_x_min_nm, fm.profile_x_max_nm, fm.profile_step_nm)
        if x_nm[0] <= m_to_nm(geom.half_t):
            raise DomainError("profile_x_min_nm must lie outside the stripe")
        x_m = nm_to_m(x_nm)
        bz_x = stray_bz(geom, mat, x_m, 0.0)
        written.append(OutputService.write_csv(
            out / "profile_bz_x.csv", ["x_nm", "Bz_T", "Bz_G", "absBz_G"],
            ((x, b, tesla_to_gauss(b), abs(tesla_to_gauss(b))) for x, b in zip(x_nm, bz_x)),
        ))

        grad = stray_bz_gradient_x(geom, mat, x_m, 0.0)
        written.append(OutputService.write_csv(
            out / "gradient_x.csv", ["x_nm", "dBz_dx_T_per_m", "dBz_dx_G_per_nm"],
            ((x, g, tesla_to_gauss(g) * 1e-9) for x, g in zip(x_nm, grad)),
        ))

        z_half = nm_to_m(fm.z_half_nm)
        c_values = [homogeneity_c(geom, mat, float(x), z_half).c_value for x in x_m]
        written.append(OutputService.write_csv(
            out / "c_of_x.csv", ["x_nm", "C_T_m", "C_G_nm"],
            ((x, c, c * T_M_TO_G_NM) for x, c in zip(x_nm, c_values)),
        ))

        x_opt = find_x_optim(geom, mat, z_half)
        half_nm = m_to_nm(geom.half_w)
        z_nm = _inclusive_range(-half_nm + 0.5, half_nm - 0.5, 1.0)
        z_m = nm_to_m(z_nm)
        bz_center = stray_bz(geom, mat, 0.0, z_m)
        bz_opt = stray_bz(geom, mat, x_opt, z_m)
        written.append(OutputService.write_csv(
            out / "bz_of_z.csv", ["z_nm", "z_star_nm", "Bz_x0_G", "Bz_xoptim_G"],
            ((z, m_to_nm(z_star(zm)), tesla_to_gauss(b0), tesla_to_gauss(b1))
             for z, zm, b0, b1 in zip(z_nm, z_m, bz_center, bz_opt)),
        ))

        written.append(OutputService.write_json(out / "xoptim.json", {
            "material": mat.name,
            "x_optim_nm": m_to_nm(x_opt),
            "z_half_nm": fm.z_half_nm,
            "Bz_G": tesla_to_gauss(stray_bz(geom, mat, x_opt, 0.0)),
            "gradient_G_per_nm": tesla_to_gauss(stray_bz_gradient_x(geom, mat, x_opt, 0.0)) * 1e-9,
            "C_at_root_T_m": homogeneity_c(geom, mat, x_opt, z_half).c_value,
        }))
        log_computation(logger, "cmd_fieldmap", (time.perf_counter() - start) * 1000.0, files=len(written))
        return written

    # ========================================================================
    # modes
    # ========================================================================

    @staticmethod
    def cmd_modes(config: RunConfig) -> list:
        start = time.perf_counter()
        ctx = ReproductionService.prepare(config)
        out = ReproductionService.output_dir(config)
        pot, modes = ctx.potential, ctx.modes
        written = []

        z_nm = m_to_nm(pot.z_grid)
        zs_nm = m_to_nm(z_star(pot.z_grid))
        written.append(OutputService.write_csv(
            out / "potential.csv", ["z_nm", "z_star_nm", "v_T", "v_G"],
            ((z, zs, v, tesla_to_gauss(v)) for z, zs, v in zip(z_nm, zs_nm, pot.v)),
        ))

        fd_b = {}
        max_rel = None
        if config.modes.cross_check:
            with LogLevelContext(logging.WARNING, "spinwave"):
                fd = fd_eigensolve(pot, config.modes.n_max, extrapolate=True)
            fd_b = {m.n_z: m.b_n for m in fd}
            diffs = [abs(m.b_n - fd_b[m.n_z]) / abs(fd_b[m.n_z]) for m in modes if m.n_z in fd_b]
            max_rel = max(diffs) if diffs else None

        by_nz = {m.n_z: m for m in modes}
        rows = []
        for line in ctx.lines:
            mode = by_nz[line.n_z]
            fd_value = fd_b.get(line.n_z)
            rel = None if fd_value is None else abs(mode.b_n - fd_value) / abs(fd_value)
            rows.append((line.n_z, line.n_x, mode.parity, mode.b_n, line.b_total, line.b_res,
                         tesla_to_gauss(line.b_res), mode.edge_weight, mode.edge_weight > 0.5,
                         fd_value, rel))
        written.append(OutputService.write_csv(
            out / "modes.csv",
            ["n_z", "n_x", "parity", "b_n_T", "b_total_T", "b_res_T", "b_res_G", "edge_weight",
             "edge_mode", "b_n_fd_T", "rel_diff"],
            rows,
        ))

        header = ["z_nm", "z_star_nm"] + [f"psi_{m.n_z}" for m in modes]
        psi = np.array([m.psi for m in modes])
        written.append(OutputService.write_csv(
            out / "profiles.csv", header,
            ((z_nm[i], zs_nm[i], *psi[:, i]) for i in range(pot.n)),
        ))

        written.append(OutputService.write_json(out / "modes_summary.json", {
            "method": modes.method,
            "bc": pot.bc.value,
            "n_grid": pot.n,
            "requested": modes.requested,
            "found": len(modes),
            "complete": modes.complete,
            "max_rel_diff_tm_fd": max_rel,
            "d_ex_T_m2": pot.d_ex,
            "material": ctx.mat.name,
        }))
        log_computation(logger, "cmd_modes", (time.perf_counter() - start) * 1000.0, files=len(written))
        return written

    # ========================================================================
    # spectrum
    # ========================================================================

    @staticmethod
    def _line_records(ctx: RunContext, refs: list) -> list:
        by_nz = {m.n_z: m for m in ctx.modes}
        width_G = tesla_to_gauss(ctx.mat.fmr_width_T)
        records = [
            LineRecord(kind=LineKind.SPIN_WAVE.value, label=f"sw({l.n_z},{l.n_x})", b_res_T=l.b_res,
                       b_res_G=tesla_to_gauss(l.b_res), width_G=width_G, n_z=l.n_z, n_x=l.n_x,
                       edge_weight=by_nz[l.n_z].edge_weight)
            for l in ctx.lines
        ]
        for q in qubit_lines(ctx.design) + refs:
            records.append(LineRecord(kind=q.kind.value, label=q.label, b_res_T=q.b_res,
                                      b_res_G=tesla_to_gauss(q.b_res), width_G=q.width_G,
                                      x_nm=None if q.x is None else m_to_nm(q.x)))
        return records

    @staticmethod
    def cmd_spectrum(config: RunConfig) -> list:
        start = time.perf_counter()
        ctx = ReproductionService.prepare(config)
        out = ReproductionService.output_dir(config)
        sp = config.spectrum
        written = []

        refs = reference_lines(ctx.design, [nm_to_m(x) for x in sp.reference_positions_nm],
                               include_isolated=sp.include_isolated_reference)
        sw = spinwave_resonance_lines(ctx.lines, ctx.mat)
        b_grid = _inclusive_range(sp.b_min_T, sp.b_max_T, gauss_to_tesla(sp.step_G))
        samples = full_spectrum(ctx.design, sw, b_grid, extra_lines=refs)
        written.append(OutputService.write_csv(
            out / "spectrum.csv", ["B_T", "B_G", "absorption", "absorption_spin_wave", "absorption_qubit"],
            ((b, tesla_to_gauss(b), t, s, q)
             for b, t, s, q in zip(samples.b_grid, samples.total, samples.spin_wave, samples.qubit)),
        ))

        gap = highest_gap(ctx.lines, merge_tol=gauss_to_tesla(sp.merge_tol_G))
        q_fields = [q.b_res for q in qubit_lines(ctx.design)]
        written.append(OutputService.write_json(out / "lines.json", {
            "frequency_GHz": config.frequency_GHz,
            "material": ctx.mat.name,
            "a_exch_J_per_m": ctx.mat.a_exch,
            "lines": [r.model_dump() for r in ReproductionService._line_records(ctx, refs)],
            "spin_wave_free_window": {
                "upper_T": gap.upper, "lower_T": gap.lower, "width_G": tesla_to_gauss(gap.separation),
            },
            "qubit_cluster": {"min_T": min(q_fields), "max_T": max(q_fields)},
        }))
        log_computation(logger, "cmd_spectrum", (time.perf_counter() - start) * 1000.0, files=len(written))
        return written

    # ========================================================================
    # design-check
    # ========================================================================

    @staticmethod
    def build_design_report(ctx: RunContext) -> DesignReport:
        dc = ctx.config.design_check
        design = ctx.design
        q_lines = qubit_lines(design)
        sw = spinwave_resonance_lines(ctx.lines, ctx.mat)
        overlap = overlap_check(q_lines, sw, dc.margin_G)

        qubits = []
        for q, clearance in zip(q_lines, overlap.clearances):
            ratio = ising_ratio(design, q.x)
            scaled = ising_ratio(design, q.x, prefactor=dc.ising_prefactor)
            qubits.append(QubitReport(
                label=q.label, x_nm=m_to_nm(q.x), Bres_T=q.b_res, Bres_G=tesla_to_gauss(q.b_res),
                clearance_G=clearance.clearance_G, required_G=clearance.required_G,
                ising_ratio=ratio, ising_ratio_scaled=scaled,
                passed=clearance.passed and scaled >= dc.min_ising_ratio,
            ))
        ising_passed = all(q.ising_ratio_scaled >= dc.min_ising_ratio for q in qubits)

        gap = highest_gap(ctx.lines, merge_tol=gauss_to_tesla(ctx.config.spectrum.merge_tol_G))
        gap_G = tesla_to_gauss(gap.separation)
        linewidth = design.qubit.linewidth_G
        try:
            lower, upper, width_G = free_window(q_lines, sw)
            window = WindowReport(lower_T=lower, upper_T=upper, width_G=width_G)
            window_count = addressable_count(width_G, linewidth, dc.packing)
        except DomainError:
            window, window_count = None, None

        return DesignReport(
            passed=overlap.passed and ising_passed,
            overlap_passed=overlap.passed,
            ising_passed=ising_passed,
            margin_G=dc.margin_G,
            material=ctx.mat.name,
            a_exch_J_per_m=ctx.mat.a_exch,
            frequency_GHz=ctx.config.frequency_GHz,
            n_qubits=len(qubits),
            qubits=qubits,
            top_gap=WindowReport(lower_T=gap.lower, upper_T=gap.upper, width_G=gap_G),
            cluster_window=window,
            addressable_in_top_gap=addressable_count(gap_G, linewidth, dc.packing),
            addressable_in_cluster_window=window_count,
            packing=dc.packing,
            ising_prefactor=dc.ising_prefactor,
        )

    @staticmethod
    def cmd_design_check(config: RunConfig) -> tuple:
        """Returns (written files, passed)"""
        start = time.perf_counter()
        ctx = ReproductionService.prepare(config)
        out = ReproductionService.output_dir(config)
        report = ReproductionService.build_design_report(ctx)
        path = OutputService.write_json(out / "report.json", report.model_dump())
        if report.passed:
            logger.info(f"Design check PASSED for {report.n_qubits} qubits")
        else:
            failing = [q.label for q in report.qubits if not q.passed]
            logger.warning(f"Design check FAILED: {', '.join(failing) or 'global criteria'}")
        log_computation(logger, "cmd_design_check", (time.perf_counter() - start) * 1000.0,
                        passed=report.passed)
        return [path], report.passed

    # ========================================================================
    # decoherence
    # ========================================================================

    @staticmethod
    def cmd_decoherence(config: RunConfig) -> list:
        start = time.perf_counter()
        target = config.material_params()
        reference = config.reference_material_params()
        # Calibrated and swept on the reference mode structure; gamma0 carries the magnetization
        ctx = ReproductionService.prepare(config, mat=reference)
        out = ReproductionService.output_dir(config)
        dc = config.decoherence
        written = []

        anchor = (nm_to_m(dc.anchor_x_nm), dc.anchor_temp_K, dc.anchor_t1_s)
        reference_model = calibrate(ctx.design, ctx.lines, ctx.modes, anchor=anchor, alpha_phi=dc.alpha_phi)
        model = scale_to_material(reference_model, reference, target)

        x_nm = _inclusive_range(dc.x_min_nm, dc.x_max_nm, dc.x_step_nm)
        points = sweep_x(model, ctx.design, ctx.lines, ctx.modes, nm_to_m(x_nm), dc.temperatures_K)
        written.append(OutputService.write_csv(
            out / "t_vs_x.csv", ["x_nm", "T_K", "T1_s", "T2_s"],
            ((m_to_nm(p.x), p.temp, p.t1, p.t2) for p in points),
        ))

        x_fixed = nm_to_m(dc.t_sweep_x_nm)
        points = sweep_temp(model, ctx.design, ctx.lines, ctx.modes, dc.t_sweep_K, x=x_fixed)
        written.append(OutputService.write_csv(
            out / "t_vs_T.csv", ["x_nm", "T_K", "T1_s", "T2_s"],
            ((m_to_nm(p.x), p.temp, p.t1, p.t2) for p in points),
        ))

        at_anchor = rates(model, ctx.design, ctx.lines, ctx.modes, anchor[0], anchor[1])
        record = CalibrationRecord(
            material=target.name, a_exch_J_per_m=target.a_exch, reference_material=reference.name,
            rate_scale=model.gamma0 / reference_model.gamma0, gamma0_reference_per_s=reference_model.gamma0,
            gamma0_per_s=model.gamma0, alpha_phi=model.alpha_phi,
            g_ref=model.g_ref, de_fmr_ueV=joule_to_ueV(model.de_fmr),
            anchor_x_nm=dc.anchor_x_nm, anchor_temp_K=dc.anchor_temp_K, anchor_t1_s=dc.anchor_t1_s,
            t2_at_anchor_s=at_anchor.t2,
        )
        written.append(OutputService.write_json(out / "calibration.json", record.model_dump()))
        log_computation(logger, "cmd_decoherence", (time.perf_counter() - start) * 1000.0, files=len(written))
        return written
