"""Command-line interface.

Exit codes: 0 when every check passes, 1 for usage and input errors, 2 when
a check fails and 3 for anything unexpected.

Examples::

    qsim list
    qsim scenario cz-entangler --out-dir reports
    qsim scenario bell-phase-kick --phi 3.14159265
    qsim scenario picture-equivalence --qubits 4 --depth 20 --seeds 100
    qsim run circuit.txt --initial ++ --observables frame.txt
"""

import sys
from enum import IntEnum
from pathlib import Path

import click

from app.analysis.reports import CheckResult, Report
from app.config import get_scenario_config
from app.env_config import get_logging_config, get_port
from app.exceptions import SimulatorError
from app.logging_config import get_logger, setup_logging
from app.quantum import heisenberg_backend as heisenberg
from app.quantum import product_form_backend as product_form
from app.quantum.pauli_algebra import PauliString
from app.quantum.schrodinger_backend import (
    Circuit,
    StateVector,
    bell_state,
    expectation,
    product_state,
    run_circuit,
)
from app.scenarios import SCENARIOS, ScenarioOptions, run_scenario
from app.utils.version import get_application_version

logger = get_logger(__name__)

AGREEMENT_TOLERANCE = 1e-9
REPORT_FORMATS = ("json", "md")
# Stabilizer generator of each single-qubit label
_LABEL_GENERATORS = {"0": ("Z", 0), "1": ("Z", 2), "+": ("X", 0), "-": ("X", 2)}


class ExitCode(IntEnum):
    OK = 0
    USAGE = 1
    CHECK_FAILED = 2
    INTERNAL = 3


class QsimGroup(click.Group):
    """Click group that maps every outcome onto the exit-code contract."""

    def main(
        self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra
    ):
        try:
            result = super().main(
                args, prog_name, complete_var, standalone_mode=False, **extra
            )
            code = int(result) if result is not None else ExitCode.OK
        except click.ClickException as err:
            err.show()
            code = ExitCode.USAGE
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = ExitCode.USAGE
        except (SimulatorError, ValueError) as err:
            click.echo(f"Error: {err}", err=True)
            code = ExitCode.USAGE
        except Exception as err:
            logger.exception(f"Internal error: {err}")
            click.echo(f"Internal error: {err}", err=True)
            code = ExitCode.INTERNAL
        if standalone_mode:
            sys.exit(code)
        return code


def write_reports(
    report: Report, out_dir: Path, stem: str, formats: tuple[str, ...]
) -> list[Path]:
    """Write ``<stem>.json`` and/or ``<stem>.md`` under ``out_dir``."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in formats:
        path = out_dir / f"{stem}.{fmt}"
        text = report.to_json() if fmt == "json" else report.to_markdown()
        path.write_text(text, encoding="utf-8")
        written.append(path)
        logger.info(f"Wrote {path}")
    return written


def _echo_summary(report: Report) -> None:
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        click.echo(f"[{status}] {check.name}: {check.detail}")
    click.echo(f"{report.title}: {'PASS' if report.passed else 'FAIL'}")


def parse_initial(initial: str) -> tuple[StateVector, product_form.FactoredState]:
    """Initial state from ``bell`` or per-qubit labels such as ``0+-1``.

    Returns:
        tuple: The state vector and its product-form description.

    Raises:
        ParseError: For unknown labels.
    """
    if initial.strip().lower() == "bell":
        generators = [PauliString.from_string("XX"), PauliString.from_string("ZZ")]
        return bell_state(0.0), product_form.init_from_strings(generators)
    labels = initial.strip()
    state = product_state(labels)
    generators = []
    for qubit, label in enumerate(labels):
        letter, phase = _LABEL_GENERATORS[label]
        single = PauliString.single(len(labels), qubit, letter)
        generators.append(PauliString(single.letters, phase))
    return state, product_form.init_from_strings(generators)


@click.group(cls=QsimGroup)
@click.version_option(
    version=get_application_version(), prog_name="qsim", message="%(prog)s %(version)s"
)
@click.option(
    "--log-level",
    type=click.Choice(["debug", "info", "warning", "error", "critical"], case_sensitive=False),
    default=None,
    help="Override LOG_LEVEL for this run.",
)
@click.option(
    "--env",
    type=click.Choice(["development", "testing", "production"], case_sensitive=False),
    default=None,
    help="Configuration whose defaults apply (FLASK_ENV when omitted).",
)
@click.pass_context
def cli(ctx: click.Context, log_level: str | None, env: str | None) -> None:
    """Run locality scenarios on a small-register qubit simulator."""
    setup_logging(
        get_logging_config(log_level), stream="ext://sys.stderr", file_logging=False
    )
    ctx.obj = get_scenario_config(env)


@cli.command("list")
def list_scenarios() -> int:
    """List the available scenarios."""
    width = max(len(name) for name in SCENARIOS)
    for item in SCENARIOS.values():
        click.echo(f"{item.name:<{width}}  {item.description}")
    return ExitCode.OK


@cli.command("scenario")
@click.argument("name")
@click.option("--qubits", type=int, default=None, help="Register size for random sweeps.")
@click.option("--depth", type=int, default=None, help="Gates per random circuit.")
@click.option("--seeds", type=int, default=None, help="Random circuits per sweep.")
@click.option("--phi", type=float, default=None, help="Phase-kick angle in radians.")
@click.option("--samples", type=int, default=None, help="Classical ensemble size.")
@click.option("--seed", type=int, default=None, help="Master RNG seed.")
@click.option("--workers", type=int, default=None, help="Threads for parallel sweeps.")
@click.option(
    "--chsh-settings", type=int, default=None, help="Random CHSH setting quadruples."
)
@click.option(
    "--out-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory for <scenario>.json / <scenario>.md.",
)
@click.option(
    "--format",
    "formats",
    type=click.Choice(REPORT_FORMATS),
    multiple=True,
    help="Report format(s) to write; both when omitted.",
)
@click.pass_obj
def scenario_command(
    config_class, name: str, out_dir: Path | None, formats: tuple[str, ...], **options
) -> int:
    """Run scenario NAME, write its reports and exit 0 iff all checks pass."""
    if name not in SCENARIOS:
        raise click.UsageError(
            f"Unknown scenario {name!r}. Choose from: {', '.join(SCENARIOS)}"
        )
    scenario_options = ScenarioOptions.from_config(config_class, **options)
    report = run_scenario(name, scenario_options)
    report.data["version"] = get_application_version()
    out_dir = out_dir or Path(config_class.OUT_DIR)
    write_reports(report, out_dir, name, formats or REPORT_FORMATS)
    _echo_summary(report)
    return ExitCode.OK if report.passed else ExitCode.CHECK_FAILED


@cli.command("run")
@click.argument(
    "circuit_file", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@click.option(
    "--initial",
    "initial_spec",
    required=True,
    help="'bell' or labels from 0 1 + -, e.g. '0+'.",
)
@click.option(
    "--observables",
    "observables_file",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Frame file with one 'name = <Pauli sum>' per line.",
)
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--format", "formats", type=click.Choice(REPORT_FORMATS), multiple=True)
def run_command(
    circuit_file: Path,
    initial_spec: str,
    observables_file: Path,
    out_dir: Path | None,
    formats: tuple[str, ...],
) -> int:
    """Evolve CIRCUIT_FILE in all three pictures and compare expectations."""
    state, factored = parse_initial(initial_spec)
    circuit = Circuit.from_text(circuit_file.read_text(encoding="utf-8"), state.n)
    frame = heisenberg.ObservableFrame.from_text(
        observables_file.read_text(encoding="utf-8"), state
    )

    final_state = run_circuit(circuit, state)
    evolved_frame = heisenberg.evolve_frame(frame, circuit)
    final_factored = product_form.evolve_circuit(factored, circuit)

    report = Report(title=f"Run of {circuit_file.name} on {initial_spec}")
    rows = []
    for name in frame.names():
        values = {
            "schrodinger": expectation(final_state, frame[name]).real,
            "heisenberg": heisenberg.heisenberg_expectation(evolved_frame, name).real,
            "product_form": product_form.expectation(final_factored, frame[name]).real,
        }
        spread = max(values.values()) - min(values.values())
        agree = spread <= AGREEMENT_TOLERANCE
        rows.append((name, values, agree))
        report.add(
            CheckResult(
                name,
                agree,
                " ".join(f"{k}={v:+.12f}" for k, v in values.items()),
                witnesses=[] if agree else [f"spread {spread:.3e}"],
                metrics=values,
            )
        )
    report.data.update(
        circuit=circuit.to_text().splitlines(),
        initial=initial_spec,
        factored_state=final_factored.to_text().splitlines(),
    )

    width = max([len("observable")] + [len(name) for name in frame.names()])
    header = ("schrodinger", "heisenberg", "product_form")
    click.echo(f"{'observable':<{width}}  " + "  ".join(f"{h:>16}" for h in header))
    for name, values, agree in rows:
        flag = "" if agree else "  DISAGREE"
        click.echo(
            f"{name:<{width}}  {values['schrodinger']:>+16.12f}  "
            f"{values['heisenberg']:>+16.12f}  {values['product_form']:>+16.12f}{flag}"
        )
    if out_dir is not None:
        write_reports(report, out_dir, circuit_file.stem, formats or REPORT_FORMATS)
    return ExitCode.OK if report.passed else ExitCode.CHECK_FAILED


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None, help="Defaults to PORT or 5000.")
@click.pass_obj
def serve_command(config_class, host: str, port: int | None) -> int:
    """Serve the JSON scenario API with the Flask development server."""
    from app import create_app

    app = create_app(config_class)
    port = port or get_port()
    logger.info(f"Starting server on host: {host}, port: {port}")
    app.run(host=host, port=port, debug=config_class.DEBUG)
    return ExitCode.OK


def main() -> None:
    """Console-script entry point."""
    cli.main(prog_name="qsim")
