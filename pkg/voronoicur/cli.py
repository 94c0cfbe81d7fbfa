"""
Command line interface.

Four subcommands cover the experiment workflow::

    voronoicur gen-snn --m 200 --n 200 --l 20 --density 0.05 --seed 1 --out snn.txt
    voronoicur sweep --input snn.txt --ranks 20:100:20 --k 5 --out sweep.csv
    voronoicur trace --input snn.txt --algo adapt_cvod --rank 40 --k 5 --out trace.csv
    voronoicur cur --input snn.txt --rank 40 --k 5 --out-prefix run/snn_

Every subcommand also reads ``--config PATH``, a file of ``key=value`` lines.
Explicit flags override the file, which overrides the built-in defaults.
The process exits with 0 on success, 2 on usage errors, and 1 on I/O or
parse failures. ``VORONOI_CUR_THREADS`` caps the number of sweep workers.
"""

import argparse
import csv
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import matplotlib.pyplot as plt
from matplotlib.figure import Figure
from tqdm.auto import tqdm

from voronoicur.analysis.files import load_matrix, write_matrix
from voronoicur.analysis.generators import SketchOperator, SnnConfig, gen_snn, sketch_seed
from voronoicur.misc.errors import ParameterError
from voronoicur.partition import ALGORITHM_DEFAULTS, BASELINE_NAMES, PartitionConfig, Partitioner
from voronoicur.selection import cur_decompose, reconstruction_error, select_columns

DEFAULT_ALGOS = ("deim",) + tuple(ALGORITHM_DEFAULTS.keys())
VALID_ALGOS = tuple(BASELINE_NAMES) + tuple(ALGORITHM_DEFAULTS.keys())

CSV_HEADER = (
    "dataset", "algo", "rank", "k_init", "k_final", "eps", "seed",
    "sketched", "error", "energy", "iters", "seconds",
)

THREADS_ENV = "VORONOI_CUR_THREADS"


def _real(x):
    return format(float(x), ".17g")


class RunRecord(object):
    """
    One cell of a sweep: a single (dataset, algorithm, rank, seed) run.

    Attributes
    ----------
    dataset, algo : str
        Dataset label and algorithm name.
    rank, k_init, k_final, seed, iters : int
        Target rank, initial and final number of nonempty sets, partition
        seed, and Lloyd iterations.
    eps, error, energy, seconds : float
        Tolerance, normalized reconstruction error, final energy (zero for
        the baseline), and wall time of partitioning plus selection.
    sketched : bool
        Whether the run used a Gaussian sketch.
    n_max : int
        Largest final set size, the quantity selection cost scales with.
    """

    def __init__(
        self, dataset, algo, rank, k_init, k_final, eps, seed, sketched,
        error, energy, iters, seconds, n_max=0,
    ):
        self.dataset = dataset
        self.algo = algo
        self.rank = int(rank)
        self.k_init = int(k_init)
        self.k_final = int(k_final)
        self.eps = float(eps)
        self.seed = int(seed)
        self.sketched = bool(sketched)
        self.error = float(error)
        self.energy = float(energy)
        self.iters = int(iters)
        self.seconds = float(seconds)
        self.n_max = int(n_max)

    def __repr__(self):
        return f"RunRecord({self.algo!r}, rank={self.rank}, seed={self.seed}, error={self.error:.6g})"

    def row(self):
        """CSV fields in :data:`CSV_HEADER` order, locale independent."""
        return [
            self.dataset, self.algo, str(self.rank), str(self.k_init), str(self.k_final),
            _real(self.eps), str(self.seed), "1" if self.sketched else "0",
            _real(self.error), _real(self.energy), str(self.iters), _real(self.seconds),
        ]


def parse_ranks(text):
    """
    Parse ``start:stop:step`` (inclusive of ``stop``) or a single rank.

    Returns
    -------
    list of int
    """
    try:
        parts = [int(p) for p in str(text).split(":")]
    except ValueError:
        raise ParameterError(f"--ranks must be 'start:stop:step' or an integer; got {text!r}.")
    if len(parts) == 1:
        parts = parts * 2 + [1]
    if len(parts) != 3 or parts[0] < 1 or parts[2] < 1 or parts[1] < parts[0]:
        raise ParameterError(
            f"--ranks must be 'start:stop:step' with 1 <= start <= stop and step >= 1; got {text!r}."
        )
    return list(range(parts[0], parts[1] + 1, parts[2]))


def parse_algos(text):
    """Parse a comma-separated list of algorithm names."""
    algos = [a.strip() for a in str(text).split(",") if a.strip()]
    if not algos:
        raise ParameterError("--algos names no algorithm.")
    for algo in algos:
        if algo not in VALID_ALGOS:
            raise ParameterError(
                f"--algos: unknown algorithm '{algo}'. Valid names: {', '.join(VALID_ALGOS)}."
            )
    return algos


def parse_bool(text):
    """Parse a config-file boolean."""
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"Expected a boolean; got {text!r}.")


def read_threads(environ=None):
    """
    Worker cap from :data:`THREADS_ENV`, defaulting to :func:`os.cpu_count`.
    """
    environ = os.environ if environ is None else environ
    value = environ.get(THREADS_ENV)
    if value is None or value == "":
        return os.cpu_count() or 1
    try:
        threads = int(value)
    except ValueError:
        threads = 0
    if threads < 1:
        raise ParameterError(f"{THREADS_ENV} must be a positive integer; got {value!r}.")
    return threads


def read_config(file_path):
    """
    Read a ``key=value`` configuration file.

    ``#`` starts a comment; blank lines are skipped. Keys may carry leading
    dashes, and dashes and underscores are interchangeable.

    Returns
    -------
    dict
        Normalized keys to raw string values.
    """
    config = {}
    with open(file_path, "r") as file_:
        for number, line in enumerate(file_, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{file_path}:{number}: expected 'key=value'; got {line!r}.")
            key, value = line.split("=", 1)
            config[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return config


# Options per subcommand: (name, converter, default, help). A default of
# REQUIRED must come from the command line or the config file.
REQUIRED = object()

_DATA_OPTIONS = [
    ("input", str, REQUIRED, "Matrix file (text format, or IDX for .idx/-ubyte/.gz)."),
    ("k", int, 20, "Initial number of Voronoi sets."),
    ("eps", float, 0.1, "Stopping tolerance on the energy decrement."),
    ("seed", int, 0, "Seed of the initial partition and sketches."),
    ("max_iters", int, 100, "Cap on Lloyd iterations."),
    ("sketch", parse_bool, False, "Left-multiply by an r x m Gaussian sketch."),
    ("verbose", parse_bool, False, "Show progress bars."),
]

OPTIONS = {
    "gen-snn": [
        ("m", int, 1000, "Number of rows."),
        ("n", int, 1000, "Number of columns."),
        ("l", int, 100, "Number of terms with the doubled coefficient."),
        ("density", float, 0.0125, "Nonzero fraction of every factor."),
        ("seed", int, 0, "Root seed."),
        ("out", str, REQUIRED, "Output matrix file."),
    ],
    "sweep": _DATA_OPTIONS + [
        ("algos", parse_algos, ",".join(DEFAULT_ALGOS), "Comma-separated algorithms."),
        ("ranks", parse_ranks, REQUIRED, "Ranks as start:stop:step, inclusive."),
        ("sketch_shared", parse_bool, False, "Use one sketch seed for every rank."),
        ("repeats", int, 1, "Seeds seed, seed+1, ... per cell."),
        ("no_timing", parse_bool, False, "Write 0 seconds for bit-identical output."),
        ("dataset", str, None, "Dataset label; defaults to the input file name."),
        ("out", str, REQUIRED, "Output CSV."),
        ("svg", str, None, "Also write an error-versus-rank chart."),
    ],
    "trace": _DATA_OPTIONS + [
        ("algo", str, "cvod", "Partitioning algorithm."),
        ("rank", int, REQUIRED, "Target rank."),
        ("stopping", str, None, "Override the stopping rule (absolute or relative)."),
        ("out", str, REQUIRED, "Output CSV."),
        ("svg", str, None, "Also write energy and dimension charts."),
        ("h5", str, None, "Also archive the run to this h5 file."),
    ],
    "cur": _DATA_OPTIONS + [
        ("algo", str, "cvod", "Partitioning algorithm (or deim)."),
        ("rank", int, REQUIRED, "Number of columns and rows."),
        ("out_prefix", str, REQUIRED, "Prefix of the C, U, R and report files."),
    ],
}

_FLAGS = ("sketch", "sketch_shared", "no_timing", "verbose")


def build_parser():
    """The :mod:`argparse` parser of all subcommands."""
    parser = argparse.ArgumentParser(
        prog="voronoicur",
        description="Partition-based column subset selection and CUR experiments.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for command, options in OPTIONS.items():
        sub = commands.add_parser(command)
        sub.add_argument("--config", default=None, help="key=value file of defaults.")
        for name, _, _, help_ in options:
            flag = "--" + name.replace("_", "-")
            if name in _FLAGS:
                sub.add_argument(flag, dest=name, action="store_const", const=True, default=None, help=help_)
            else:
                sub.add_argument(flag, dest=name, default=None, help=help_)

    return parser


def resolve_options(args):
    """
    Merge flags, the config file, and defaults into a dict of converted values.
    """
    options = OPTIONS[args.command]
    known = {name for name, _, _, _ in options}
    from_file = read_config(args.config) if args.config else {}

    unknown = sorted(set(from_file) - known)
    if unknown:
        raise ParameterError(f"Unknown config keys for '{args.command}': {', '.join(unknown)}.")

    resolved = {}
    for name, convert, default, _ in options:
        value = getattr(args, name)
        if value is None:
            value = from_file.get(name, default)
        if value is REQUIRED:
            raise ParameterError(f"--{name.replace('_', '-')} is required.")
        if value is not None and not (name in _FLAGS and isinstance(value, bool)):
            try:
                value = convert(value)
            except ValueError as e:
                if isinstance(e, ParameterError):
                    raise
                raise ParameterError(f"--{name.replace('_', '-')}: cannot parse {value!r}.")
        resolved[name] = value

    return resolved


def _sketch_for(A, rank, seed, shared):
    return SketchOperator(rank, A.shape[0], seed=sketch_seed(seed, rank, shared))


def run_cell(A, dataset, algo, rank, k, eps, seed, max_iters=100, sketched=False,
             sketch_shared=False, timing=True):
    """
    Run one algorithm at one rank and summarize it.

    Returns
    -------
    RunRecord
    """
    config = PartitionConfig(algo, k, rank, epsilon=eps, max_iters=max_iters, seed=seed)
    operator = _sketch_for(A, rank, seed, sketch_shared) if sketched else None

    selection, trace, report, partition = select_columns(
        A, config, sketch=operator, return_partition=True
    )
    seconds = selection.seconds if timing else 0.0

    return RunRecord(
        dataset=dataset,
        algo=algo,
        rank=rank,
        k_init=1 if config.is_baseline else config.k,
        k_final=report.k_tilde,
        eps=eps,
        seed=seed,
        sketched=sketched,
        error=reconstruction_error(A, selection.C),
        energy=trace.energies[-1] if len(trace) else 0.0,
        iters=len(trace),
        seconds=seconds,
        n_max=int(np.max(partition.sizes)),
    )


def run_sweep(A, dataset, algos, ranks, k=20, eps=0.1, seed=0, max_iters=100,
              sketched=False, sketch_shared=False, repeats=1, timing=True,
              threads=None, verbose=False):
    """
    Run every (rank, algorithm, repeat) cell with a worker pool.

    All algorithms at one seed share the same initial partition. Records are
    returned ordered by rank, then algorithm (in ``algos`` order), then seed,
    whatever the completion order.

    Returns
    -------
    list of RunRecord
    """
    repeats = int(repeats)
    if repeats < 1:
        raise ParameterError(f"--repeats must be at least 1; got {repeats}.")
    cells = [
        (algo, rank, seed + j)
        for rank in ranks
        for algo in algos
        for j in range(repeats)
    ]

    def work(cell):
        algo, rank, cell_seed = cell
        return run_cell(
            A, dataset, algo, rank, k, eps, cell_seed, max_iters,
            sketched, sketch_shared, timing,
        )

    threads = read_threads() if threads is None else threads
    with ThreadPoolExecutor(max_workers=max(1, min(threads, len(cells)))) as pool:
        results = pool.map(work, cells)
        if verbose:
            results = tqdm(results, total=len(cells), desc="sweep")
        return list(results)


def write_sweep_csv(file_path, records):
    """Write records under :data:`CSV_HEADER`."""
    with open(file_path, "w", newline="") as file_:
        writer = csv.writer(file_, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(record.row())


def plot_sweep(records, file_path):
    """Static SVG of mean normalized error against rank, one line per algorithm."""
    figure = Figure(figsize=(6, 4))
    ax = figure.subplots()

    algos = list(dict.fromkeys(r.algo for r in records))
    for i, algo in enumerate(algos):
        ranks = sorted({r.rank for r in records if r.algo == algo})
        errors = [np.mean([r.error for r in records if r.algo == algo and r.rank == rank]) for rank in ranks]
        ax.semilogy(ranks, errors, "o-", c="C%d" % (i % 10), lw=1, label=algo)

    ax.set_xlabel("Rank")
    ax.set_ylabel("Normalized error")
    ax.grid()
    ax.legend(loc="upper right", fontsize="small")
    figure.tight_layout()
    figure.savefig(file_path, format="svg")


def cmd_gen_snn(options):
    """Generate an SNN matrix and write it in the text format."""
    cfg = SnnConfig(options["m"], options["n"], options["l"], options["density"], options["seed"])
    write_matrix(options["out"], gen_snn(cfg))
    print(f"wrote {options['out']} ({cfg.m} x {cfg.n})")


def cmd_sweep(options):
    """Run a rank sweep and write one CSV row per cell."""
    A = load_matrix(options["input"])
    dataset = options["dataset"] or os.path.basename(options["input"])

    records = run_sweep(
        A,
        dataset,
        options["algos"],
        options["ranks"],
        k=options["k"],
        eps=options["eps"],
        seed=options["seed"],
        max_iters=options["max_iters"],
        sketched=options["sketch"],
        sketch_shared=options["sketch_shared"],
        repeats=options["repeats"],
        timing=not options["no_timing"],
        verbose=options["verbose"],
    )

    write_sweep_csv(options["out"], records)
    print(f"wrote {options['out']} ({len(records)} rows)")
    if options["svg"]:
        plot_sweep(records, options["svg"])
        print(f"wrote {options['svg']}")


def cmd_trace(options):
    """Run one Lloyd iteration and write its per-iteration trace."""
    algo = options["algo"]
    if algo not in ALGORITHM_DEFAULTS:
        raise ParameterError(
            f"--algo must be one of {', '.join(ALGORITHM_DEFAULTS)}; got '{algo}'."
        )
    A = load_matrix(options["input"])
    config = PartitionConfig(
        algo, options["k"], options["rank"], epsilon=options["eps"],
        max_iters=options["max_iters"], seed=options["seed"], stopping=options["stopping"],
    )
    Y = _sketch_for(A, config.r, config.seed, False).apply(A) if options["sketch"] else A
    config.validate(Y)

    partitioner = Partitioner(Y, config.k, config.r, config.multi_index, config.seed)
    _, _, trace = partitioner.optimize(
        algo, config.max_iters, config.epsilon, verbose=options["verbose"],
        stopping=config.stopping,
    )

    with open(options["out"], "w", newline="") as file_:
        writer = csv.writer(file_, lineterminator="\n")
        writer.writerow(["iter", "energy", "k_active"] + [f"d_{i + 1}" for i in range(config.k)])
        for row in trace.rows(config.k):
            writer.writerow([str(row[0]), _real(row[1])] + [str(x) for x in row[2:]])
    print(f"wrote {options['out']} ({len(trace)} iterations)")

    if options["svg"]:
        ax_energy, _ = partitioner.plot_stats()
        figure = ax_energy.figure
        figure.savefig(options["svg"], format="svg")
        plt.close(figure)
        print(f"wrote {options['svg']}")
    if options["h5"]:
        partitioner.save(options["h5"])
        print(f"wrote {options['h5']}")


def cmd_cur(options):
    """Compute a CUR decomposition and write C, U, R and the bound report."""
    A = load_matrix(options["input"])
    config = PartitionConfig(
        options["algo"], options["k"], options["rank"], epsilon=options["eps"],
        max_iters=options["max_iters"], seed=options["seed"],
    )
    sketch, row_sketch = None, None
    if options["sketch"]:
        sketch = _sketch_for(A, config.r, config.seed, False)
        row_sketch = _sketch_for(A.T, config.r, config.seed, False)

    cur, report = cur_decompose(A, config, sketch=sketch, row_sketch=row_sketch,
                                verbose=options["verbose"])

    prefix = options["out_prefix"]
    write_matrix(prefix + "C.txt", cur.C)
    write_matrix(prefix + "U.txt", cur.U)
    write_matrix(prefix + "R.txt", cur.R)

    lines = [
        ("columns", " ".join(str(i) for i in cur.col_selection.global_indices)),
        ("rows", " ".join(str(i) for i in cur.row_selection.global_indices)),
        ("norm", _real(np.linalg.norm(A))),
    ] + report.rows()
    with open(prefix + "report.txt", "w") as file_:
        for key, value in lines:
            if isinstance(value, (float, np.floating)):
                value = _real(value)
            file_.write(f"{key}={value}\n")
    print(f"wrote {prefix}C.txt, {prefix}U.txt, {prefix}R.txt, {prefix}report.txt")


COMMANDS = {
    "gen-snn": cmd_gen_snn,
    "sweep": cmd_sweep,
    "trace": cmd_trace,
    "cur": cmd_cur,
}


def main(argv=None):
    """
    Entry point. Returns the process exit code.

    Parameters
    ----------
    argv : list of str OR None
        Arguments without the program name; defaults to :data:`sys.argv`.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        options = resolve_options(args)
        COMMANDS[args.command](options)
    except ParameterError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    return 0
