import csv
import logging
import sys
from dataclasses import replace
from typing import Iterable, List, Optional, Sequence, TextIO

import click
import numpy as np

from config import RunConfig, format_config, load_config, parse_config
from device.gan import gan_reverse_vsd
from device.gate_loop import (
    damping_ratio, min_damping_resistor, poles, resonant_frequency
)
from device.mosfet import (
    alpha_at, loss_current_comparison, output_curve, tcp, transfer_curve
)
from errors import PyLossGenError, UnsettledError, ValidationError
from simulation import (
    ComplianceLimited, CurrentMode, Runaway, Stable, VoltageMode, classify,
    local_stability, simulate, steady_state_operating_point,
    sweep_calibration_points
)
from thermal.calibration import estimate_power, fit_dynamic, fit_static
from tracefile import (
    read_calibration_map, read_static_fit, read_trace,
    write_calibration_map, write_static_fit, write_trace
)
from utils import (
    celsius_to_kelvin, format_celsius, format_float, inclusive_grid,
    kelvin_to_celsius
)

PROG_NAME = "pylossgen"

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Gate voltages of the default output-curve family (V).
OUTPUT_FAMILY_VGS = inclusive_grid(3.5, 4.0, 0.05)

# Fractions of the configured current used by a default calibration sweep.
SWEEP_FRACTIONS = (0.2, 0.4, 0.6, 0.8, 1.0)


def configure_logging(verbose: int) -> None:
    """Send log records to standard error; -v gives INFO, -vv DEBUG."""
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr,
                        force=True)


def run_options(command):
    """Options shared by every subcommand."""
    command = click.option(
        "-v",
        "--verbose",
        count=True,
        help="Log progress to standard error. Repeat for more detail."
    )(command)
    command = click.option(
        "-o",
        "--out",
        type=click.File('w', encoding='utf-8'),
        default="-",
        show_default="standard output",
        help="File, in which the CSV output will be written."
    )(command)
    command = click.option(
        "-c",
        "--config",
        "config_file",
        type=click.Path(exists=True, dir_okay=False),
        help="YAML run configuration. "
             "If not provided, the reference setup is used."
    )(command)
    return command


def load_run(config_file: Optional[str], verbose: int) -> RunConfig:
    """Configure logging and load the run configuration."""
    configure_logging(verbose)

    if config_file is None:
        run = parse_config("")
    else:
        run = load_config(config_file)
        click.echo("Config loaded from {0}".format(config_file), err=True)

    if verbose:
        click.echo(format_config(run), err=True, nl=False)
    return run


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer, str)):
        return str(value)
    return format_float(value)


def write_rows(out: TextIO, header: Sequence[str],
               rows: Iterable[Sequence]) -> None:
    """Write a CSV table to the output."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
    out.flush()


def _drive_vgs(run: RunConfig, vgs: Optional[float]) -> float:
    return run.drive.v_gs if vgs is None else vgs


def _drive_vds(run: RunConfig) -> float:
    if isinstance(run.drive, VoltageMode):
        return run.drive.v_ds
    return run.drive.v_compliance


def _temperatures(temps_c: Sequence[float], run: RunConfig) -> List[float]:
    """Kelvin temperatures of the option values, ambient if none."""
    if not temps_c:
        return [run.thermal.t_ambient]
    return [celsius_to_kelvin(t) for t in temps_c]


def _with_overrides(run: RunConfig, vgs: Optional[float],
                    iset: Optional[float]):
    """Configured drive with the gate voltage or current replaced."""
    drive = run.drive
    if vgs is not None:
        drive = replace(drive, v_gs=vgs)
    if iset is not None:
        if not isinstance(drive, CurrentMode):
            raise ValidationError("iset", iset, "used with drive.mode current")
        drive = replace(drive, i_set=iset)
    return drive


def _current_drive(run: RunConfig, vgs: Optional[float],
                   iset: Optional[float]) -> CurrentMode:
    drive = _with_overrides(run, vgs, iset)
    if not isinstance(drive, CurrentMode):
        raise ValidationError("drive.mode", "voltage", "current")
    return drive


@click.group()
def cli() -> None:
    """Electro-thermal simulation and calibration of a transistor used as
    a low-current loss generator."""


@cli.command(short_help="Transfer curves")
@run_options
@click.option("--vds", type=float, help="Drain voltage. "
              "Defaults to the configured drain or compliance voltage.")
@click.option("--vgs-min", type=float, default=3.0, show_default=True)
@click.option("--vgs-max", type=float, default=6.5, show_default=True)
@click.option("--step", type=float, default=0.01, show_default=True)
@click.option("--temp-c", type=float, multiple=True,
              help="Junction temperature in Celsius. Repeatable.")
def transfer(config_file: str, out: TextIO, verbose: int,
             vds: Optional[float], vgs_min: float, vgs_max: float,
             step: float, temp_c: Sequence[float]) -> None:
    """Drain current over a V_GS sweep, one block per temperature.
    Defaults to 25 and 125 Celsius."""
    run = load_run(config_file, verbose)
    v_ds = _drive_vds(run) if vds is None else vds
    temps = _temperatures(temp_c or (25.0, 125.0), run)
    grid = inclusive_grid(vgs_min, vgs_max, step)

    rows = []
    for t in temps:
        v_gs, currents = transfer_curve(run.device, v_ds, t, grid)
        rows += [(format_celsius(t), v, i) for v, i in zip(v_gs, currents)]
    write_rows(out, ("t_C", "v_gs_V", "i_d_A"), rows)


@cli.command(name="output-curve", short_help="Output curves")
@run_options
@click.option("--vgs", type=float, multiple=True,
              help="Gate voltage. Repeatable. "
                   "Defaults to 3.50 V to 4.00 V in 50 mV steps.")
@click.option("--vds-max", type=float, default=10.0, show_default=True)
@click.option("--step", type=float, default=0.05, show_default=True)
@click.option("--soa", type=float, default=4.0, show_default=True,
              help="Power limit in W. 0 disables it.")
@click.option("--temp-c", type=float, help="Junction temperature in "
              "Celsius. Defaults to ambient.")
def output_curves(config_file: str, out: TextIO, verbose: int,
                  vgs: Sequence[float], vds_max: float, step: float,
                  soa: float, temp_c: Optional[float]) -> None:
    """Drain current over a V_DS sweep for a family of gate voltages,
    with points beyond the power limit flagged."""
    run = load_run(config_file, verbose)
    t = _temperatures([] if temp_c is None else [temp_c], run)[0]
    grid = inclusive_grid(0.0, vds_max, step)

    rows = []
    for v_gs in vgs or OUTPUT_FAMILY_VGS:
        curve = output_curve(run.device, float(v_gs), t, grid,
                             soa if soa > 0 else None)
        for k, v_ds in enumerate(curve.v_ds):
            soa_current = None if curve.soa_current is None \
                else curve.soa_current[k]
            rows.append((curve.v_gs, v_ds, curve.i_d[k], soa_current,
                         curve.clipped[k]))
    write_rows(out, ("v_gs_V", "v_ds_V", "i_d_A", "soa_A", "clipped"), rows)


@cli.command(name="tcp", short_help="Temperature compensation point")
@run_options
@click.option("--temp-c", type=float, multiple=True,
              help="Temperature in Celsius. Repeatable. "
                   "Defaults to ambient.")
def tcp_command(config_file: str, out: TextIO, verbose: int,
                temp_c: Sequence[float]) -> None:
    """Gate voltage and current at which the drain current does not
    depend on temperature."""
    run = load_run(config_file, verbose)
    rows = []
    for t in _temperatures(temp_c, run):
        v_tcp, i_tcp = tcp(run.device, t)
        rows.append((format_celsius(t), v_tcp, i_tcp))
    write_rows(out, ("t_C", "v_tcp_V", "i_tcp_A"), rows)


@cli.command(short_help="Temperature coefficient of the current")
@run_options
@click.option("--vgs", type=float, multiple=True,
              help="Gate voltage. Repeatable. Defaults to the drive.")
@click.option("--vds", type=float, help="Drain voltage. "
              "Defaults to the configured drain or compliance voltage.")
@click.option("--temp-c", type=float, multiple=True,
              help="Junction temperature in Celsius. Repeatable.")
@click.option("--node", help="Thermal node of the loop gain. "
              "Defaults to the junction node.")
def alpha(config_file: str, out: TextIO, verbose: int, vgs: Sequence[float],
          vds: Optional[float], temp_c: Sequence[float],
          node: Optional[str]) -> None:
    """Temperature coefficient of the drain current and the thermal loop
    gain under voltage drive (empty outside saturation)."""
    run = load_run(config_file, verbose)
    v_ds = _drive_vds(run) if vds is None else vds
    node = run.sim.junction_node if node is None else node
    run.thermal.index(node)

    rows = []
    for t in _temperatures(temp_c, run):
        for v_gs in vgs or (run.drive.v_gs,):
            try:
                gain = local_stability(run.device, run.thermal, v_gs, v_ds,
                                       t, node)
            except ValidationError:
                gain = None
            rows.append((v_gs, v_ds, format_celsius(t),
                          alpha_at(run.device, v_gs, v_ds, t), gain))
    write_rows(out, ("v_gs_V", "v_ds_V", "t_C", "alpha_A_per_K",
                     "loop_gain"), rows)


def _verdict(trace, run: RunConfig) -> str:
    """One-line stability verdict of a trace."""
    try:
        verdict = classify(trace, run.sim)
    except UnsettledError as e:
        return "unsettled ({0})".format(e)

    if isinstance(verdict, Runaway):
        return "runaway at t={0} s".format(verdict.t_cross)
    if isinstance(verdict, ComplianceLimited):
        return "compliance-limited since t={0} s".format(verdict.t_hit)
    assert isinstance(verdict, Stable)
    return ("stable from t={0} s: P={1:.6g} W, T_j={2:.6g} C, "
            "V_DS={3:.6g} V, I_DS={4:.6g} A").format(
        verdict.t_settle, verdict.p, kelvin_to_celsius(verdict.t_j),
        verdict.v_ds, verdict.i_ds)


@cli.command(name="simulate", short_help="Electro-thermal transient")
@run_options
@click.option("--vgs", type=float, help="Gate voltage. "
              "Overrides the drive.")
@click.option("--iset", type=float, help="Regulated current. "
              "Overrides the drive (current mode).")
def simulate_command(config_file: str, out: TextIO, verbose: int,
                     vgs: Optional[float], iset: Optional[float]) -> None:
    """Simulate the closed electro-thermal loop from ambient and write the
    trace. The stability verdict is printed to standard error."""
    run = load_run(config_file, verbose)
    drive = _with_overrides(run, vgs, iset)

    trace = simulate(run.device, run.thermal, drive, run.sim)
    write_trace(out, trace)
    out.flush()

    click.echo("Verdict: {0}".format(_verdict(trace, run)), err=True)


@cli.command(name="steady-state", short_help="Current-mode steady state")
@run_options
@click.option("--vgs", type=float, help="Gate voltage. "
              "Overrides the drive.")
@click.option("--iset", type=float, help="Regulated current. "
              "Overrides the drive.")
def steady_state(config_file: str, out: TextIO, verbose: int,
                 vgs: Optional[float], iset: Optional[float]) -> None:
    """Fixed point of the current-regulated loop."""
    run = load_run(config_file, verbose)
    drive = _current_drive(run, vgs, iset)
    thermal = run.thermal if run.sim.t_ambient is None \
        else replace(run.thermal, t_ambient=run.sim.t_ambient)

    state = steady_state_operating_point(run.device, thermal, drive,
                                         run.sim.junction_node)
    write_rows(out, ("v_gs_V", "i_set_A", "p_W", "t_j_C", "v_ds_V",
                     "iterations"),
               [(drive.v_gs, drive.i_set, state.p, format_celsius(state.t_j),
                 state.v_ds, state.iterations)])


@cli.command(name="calibrate-sweep", short_help="Calibration map")
@run_options
@click.option("--iset", type=float, multiple=True,
              help="Regulated current of a point. Repeatable. Defaults to "
                   "20 % to 100 % of the configured current.")
@click.option("--vgs", type=float, help="Gate voltage. "
              "Overrides the drive.")
@click.option("--noise", type=float, default=0.0, show_default=True,
              help="Standard deviation of the temperature noise in K.")
@click.option("--seed", type=int, help="Seed of the temperature noise.")
def calibrate_sweep(config_file: str, out: TextIO, verbose: int,
                    iset: Sequence[float], vgs: Optional[float],
                    noise: float, seed: Optional[int]) -> None:
    """Steady-state power and node temperatures for a list of regulated
    currents."""
    run = load_run(config_file, verbose)
    drive = _current_drive(run, vgs, None)
    currents = iset or [drive.i_set * f for f in SWEEP_FRACTIONS]

    calibration = sweep_calibration_points(
        run.device, run.thermal,
        [replace(drive, i_set=i) for i in currents], run.sim,
        noise_sigma=noise, seed=seed)
    write_calibration_map(out, calibration)
    out.flush()


@cli.command(name="fit-static", short_help="Static thermal model fit")
@run_options
@click.argument("map_file", type=click.File('r', encoding='utf-8'))
def fit_static_command(config_file: str, out: TextIO, verbose: int,
                       map_file: TextIO) -> None:
    """Fit a thermal resistance per node to the calibration map in
    MAP_FILE."""
    run = load_run(config_file, verbose)
    calibration = read_calibration_map(map_file, run.thermal.t_ambient)
    write_static_fit(out, fit_static(calibration))
    out.flush()


@cli.command(name="fit-dynamic", short_help="Foster network fit")
@run_options
@click.argument("trace_file", type=click.File('r', encoding='utf-8'))
@click.option("--node", help="Node to fit. Defaults to the junction node.")
@click.option("--stages", type=int, default=8, show_default=True,
              help="Number of time constants on the grid.")
@click.option("--power", type=float,
              help="Step power in W. Defaults to the final trace power.")
def fit_dynamic_command(config_file: str, out: TextIO, verbose: int,
                        trace_file: TextIO, node: Optional[str], stages: int,
                        power: Optional[float]) -> None:
    """Fit a Foster network to the step response of a node in the trace
    from TRACE_FILE."""
    run = load_run(config_file, verbose)
    trace = read_trace(trace_file)
    node = run.sim.junction_node if node is None else node
    ambient = run.thermal.t_ambient if run.sim.t_ambient is None \
        else run.sim.t_ambient
    p_step = float(trace.p[-1]) if power is None else power

    fit = fit_dynamic(trace.time, trace.node_temps(node) - ambient, p_step,
                      stages, node)
    click.echo("Residual RMS: {0:.6g} K".format(fit.residual_rms), err=True)
    write_rows(out, ("node", "r_K_per_W", "c_J_per_K", "tau_s"),
               [(node, s.r, s.c, s.tau) for s in fit.stages])


@cli.command(name="estimate-power", short_help="Power from temperatures")
@run_options
@click.argument("fit_file", type=click.File('r', encoding='utf-8'))
@click.option("--temp-c", type=float, multiple=True, required=True,
              help="Measured temperature in Celsius, one per node in the "
                   "order of FIT_FILE.")
def estimate_power_command(config_file: str, out: TextIO, verbose: int,
                           fit_file: TextIO,
                           temp_c: Sequence[float]) -> None:
    """Estimate the dissipated power from measured node temperatures with
    the static fit in FIT_FILE."""
    run = load_run(config_file, verbose)
    fit = read_static_fit(fit_file)
    ambient = run.thermal.t_ambient if run.sim.t_ambient is None \
        else run.sim.t_ambient

    estimate = estimate_power(fit, _temperatures(temp_c, run), ambient)
    write_rows(out, ("p_W",) + tuple("discrepancy_{0}_K".format(n)
                                     for n in fit.nodes),
               [(estimate.p,) + estimate.discrepancy])


@cli.command(name="gate-loop", short_help="Gate loop poles and damping")
@run_options
@click.option("--zeta", type=float, default=1.0, show_default=True,
              help="Target damping ratio of the external resistor.")
def gate_loop(config_file: str, out: TextIO, verbose: int,
              zeta: float) -> None:
    """Poles, ringing frequency and minimum external damping resistor of
    the configured gate loop."""
    run = load_run(config_file, verbose)
    circuit = run.gate_loop
    first, second = poles(circuit)

    write_rows(out, ("zeta", "omega0_rad_per_s", "f_res_Hz", "pole1_re",
                     "pole1_im", "pole2_re", "pole2_im",
                     "zeta_target", "r_ext_min_Ohm"),
               [(damping_ratio(circuit), circuit.omega0,
                 resonant_frequency(circuit), first.real, first.imag,
                 second.real, second.imag, zeta,
                 min_damping_resistor(circuit, zeta))])


@cli.command(name="gan-reverse", short_help="GaN reverse conduction")
@run_options
@click.option("--isd", type=float, multiple=True,
              help="Source-drain current. Repeatable. Defaults to 0.6 A.")
@click.option("--vgs-off", type=float, multiple=True,
              help="Off-state gate voltage. Repeatable. "
                   "Defaults to 0 V and -1 V.")
@click.option("--temp-c", type=float, multiple=True,
              help="Temperature in Celsius. Repeatable.")
def gan_reverse(config_file: str, out: TextIO, verbose: int,
                isd: Sequence[float], vgs_off: Sequence[float],
                temp_c: Sequence[float]) -> None:
    """Source-drain voltage of a turned-off GaN transistor conducting in
    reverse."""
    run = load_run(config_file, verbose)
    rows = []
    for t in _temperatures(temp_c, run):
        for i_sd in isd or (0.6,):
            for v_gs_off in vgs_off or (0.0, -1.0):
                rows.append((i_sd, v_gs_off, format_celsius(t),
                             gan_reverse_vsd(run.gan, i_sd, v_gs_off, t)))
    write_rows(out, ("i_sd_A", "v_gs_off_V", "t_C", "v_sd_V"), rows)


@cli.command(name="compare-current", short_help="Loss generation current")
@run_options
@click.option("--power", type=float, default=4.0, show_default=True,
              help="Loss to generate in W.")
@click.option("--vgs", type=float, help="Gate voltage. "
              "Defaults to the drive.")
@click.option("--rdson", type=float, default=5e-3, show_default=True,
              help="On-state resistance in Ohm.")
@click.option("--temp-c", type=float, help="Junction temperature in "
              "Celsius. Defaults to ambient.")
def compare_current(config_file: str, out: TextIO, verbose: int,
                    power: float, vgs: Optional[float], rdson: float,
                    temp_c: Optional[float]) -> None:
    """Current needed to generate a loss in a fully enhanced channel
    versus in saturation."""
    run = load_run(config_file, verbose)
    v_gs = _drive_vgs(run, vgs)
    t = _temperatures([] if temp_c is None else [temp_c], run)[0]

    i_ohmic, i_sat, v_ds = loss_current_comparison(run.device, power, v_gs,
                                                   t, rdson)
    write_rows(out, ("p_W", "r_ds_on_Ohm", "i_ohmic_A", "v_gs_V",
                     "i_saturation_A", "v_ds_V"),
               [(power, rdson, i_ohmic, v_gs, i_sat, v_ds)])


def _print_usage() -> None:
    ctx = click.Context(cli, info_name=PROG_NAME)
    click.echo(ctx.get_usage(), err=True)
    click.echo("Try '{0} --help' for help.".format(PROG_NAME), err=True)


def cli_dispatch(argv: Optional[List[str]] = None) -> int:
    """Run the command line and return its exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        _print_usage()
        return 2

    try:
        result = cli.main(args=argv, prog_name=PROG_NAME,
                          standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except PyLossGenError as e:
        click.echo("Error: {0}".format(e), err=True)
        return 1

    return result if isinstance(result, int) else 0


def main():
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
