import sys
import argparse
from colorama import init, Fore, Style
from sympy import primerange

from src.config import RunConfig, TOL_PER_TERM, env_default
from src.errors import LabError
from src.hsums import SUITES, verify_identities
from src.expsums import scan_g_bound, scan_intermediate
from src.zseries import scan_factorizations, scan_zfin
from src.lfunc import (
    scan_functional_equation, scan_sixth_moment, scan_v_weights, weyl_ratio_scan, weyl_ratio_table,
)
from src.reporting import FORMATS, ReportWriter
from src.scanner import say

# Initialize Colorama
init(autoreset=True)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def print_header(quiet=False):
    say("=" * 60, Fore.CYAN + Style.BRIGHT, quiet)
    say("        CHARACTER SUM VERIFICATION LAB - WEYL BOUND        ", Fore.CYAN + Style.BRIGHT, quiet)
    say("=" * 60, Fore.CYAN + Style.BRIGHT, quiet)


def int_list(text):
    try:
        return tuple(int(x) for x in str(text).replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def float_list(text):
    try:
        return tuple(float(x) for x in str(text).replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def complex_list(text):
    try:
        return tuple(complex(x) for x in str(text).replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}")


def get_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=env_default("seed", "42"), help="Random seed (default: 42)")
    common.add_argument("--jobs", type=int, default=env_default("jobs", "1"), help="Worker processes (default: 1)")
    common.add_argument("--tol", type=float, default=env_default("tol", str(TOL_PER_TERM)),
                        help="Tolerance per summed term (default: 1e-10)")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default=env_default("format", "json"),
                        help="Report format (default: json)")
    common.add_argument("--out", default=env_default("out"), help="Write reports here instead of stdout")
    common.add_argument("--quiet", action="store_true",
                        default=str(env_default("quiet", "")).lower() in ("1", "true", "yes"),
                        help="No console output on stderr")

    parser = argparse.ArgumentParser(description="Character Sum Verification Lab")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", parents=[common], help="Run the identity suites")
    verify.add_argument("--q", type=int_list, default=env_default("q"), help="Moduli, e.g. 5,9,15")
    verify.add_argument("--samples", type=int, default=env_default("samples", "200"),
                        help="Random tuples per modulus and suite (default: 200)")
    verify.add_argument("--cap", type=int, default=env_default("cap"), help="q^infinity grid cap (default: q^2)")
    verify.add_argument("--suites", type=lambda s: tuple(x for x in s.split(",") if x),
                        default=env_default("suites", ",".join(SUITES)), help="Subset of the suites")

    scan = commands.add_parser("scan", help="Parameter scans")
    scans = scan.add_subparsers(dest="scan", required=True)

    gbound = scans.add_parser("gbound", parents=[common], help="|g(chi, psi)| over q = p or p^2")
    gbound.add_argument("--mode", choices=("prime", "prime-square"), default=env_default("mode", "prime-square"))
    conjecture = scans.add_parser("conjecture", parents=[common], help="Intermediate-conductor sums")
    conjecture.add_argument("--k", type=int, default=env_default("k", "2"))
    conjecture.add_argument("--j", type=int, default=env_default("j", "1"))
    conjecture.add_argument("--soft", dest="soft", action="store_true", default=None,
                            help="Report breaches as findings")
    conjecture.add_argument("--hard", dest="soft", action="store_false", help="Report breaches as failures")
    for sub in (gbound, conjecture):
        sub.add_argument("--pmin", type=int, default=env_default("pmin", "3"))
        sub.add_argument("--pmax", type=int, default=env_default("pmax", "13"))
        sub.add_argument("--threshold", type=float, default=env_default("threshold"))

    zfin = scans.add_parser("zfin", parents=[common], help="Z_fin bounds for q = p^k")
    zfin.add_argument("--q", type=int_list, default=env_default("q", "5,9,25,27"))
    zfin.add_argument("--sigma", type=float_list, default=env_default("sigma", "0.6,1.0,1.5,2.0"))
    zfin.add_argument("--threshold", type=float, default=env_default("threshold", "1.0"))

    weyl = scans.add_parser("weyl", parents=[common], help="|L(1/2 + it, chi)| / q^(1/6), cube-free q")
    weyl.add_argument("--qmax", type=int, default=env_default("qmax", "100"))
    weyl.add_argument("--t", type=float, default=env_default("t", "0"))
    weyl.add_argument("--threshold", type=float, default=env_default("threshold"))

    lfunc = commands.add_parser("lfunc", parents=[common], help="Functional equation checks")
    lfunc.add_argument("--q", type=int_list, default=env_default("q", "3,4,5,7,8"))
    lfunc.add_argument("--s", dest="s_values", type=complex_list,
                       default=env_default("s", "0.5,0.5+3j,2+1j,-0.5+1j"))
    lfunc.add_argument("--vweights", action="store_true", help="Also check the V_j weights on their grid")
    lfunc.add_argument("--moment", type=float, default=env_default("moment"),
                       help="Also record sixth moments over [-T, T] for T <= 10")

    zseries = commands.add_parser("zseries", parents=[common], help="Z and Eisenstein factorizations")
    zseries.add_argument("--q", type=int_list, default=env_default("q", "5,9,15"))
    zseries.add_argument("--s", dest="s_values", type=complex_list, default=env_default("s", "3"))
    zseries.add_argument("--caps", type=int, default=env_default("caps", "1000"))
    return parser


def get_config(argv=None):
    parser = get_parser()
    args = parser.parse_args(argv)
    values = vars(args)
    if args.command in ("verify", "lfunc", "zseries") or values.get("scan") == "zfin":
        if not values.get("q"):
            parser.error("--q needs at least one modulus")
        if any(q < 1 for q in values["q"]):
            parser.error("moduli must be positive")
    if args.command == "verify":
        unknown = set(args.suites) - set(SUITES)
        if unknown or not args.suites:
            parser.error(f"--suites must name some of {', '.join(SUITES)}")
    if values.get("s_values") == ():
        parser.error("--s needs at least one value")
    if values.get("scan") in ("gbound", "conjecture") and args.pmin > args.pmax:
        parser.error("--pmin exceeds --pmax")

    fields = {name: values[name] for name in RunConfig.__dataclass_fields__ if name in values}
    if "q" in values:
        fields["moduli"] = values["q"]
    if "sigma" in values:
        fields["sigmas"] = values["sigma"]
    return RunConfig(**fields)


def cmd_verify_identities(config):
    say(f"[*] Verifying identities for q in {list(config.moduli)} (seed {config.seed})", Fore.YELLOW, config.quiet)
    return verify_identities(config.moduli, seed=config.seed, samples=config.samples, cap=config.cap,
                             suites=config.suites, jobs=config.jobs, per_term=config.tol,
                             quiet=config.quiet)


def cmd_scan(config):
    primes = list(primerange(config.pmin, config.pmax + 1))
    if config.scan == "gbound":
        return scan_g_bound(primes, mode=config.mode, threshold=config.threshold, jobs=config.jobs,
                            per_term=config.tol, quiet=config.quiet)
    if config.scan == "conjecture":
        return scan_intermediate(primes, config.k, config.j, threshold=config.threshold, soft=config.soft,
                                 jobs=config.jobs, per_term=config.tol, quiet=config.quiet)
    if config.scan == "zfin":
        return scan_zfin(config.moduli, config.sigmas, threshold=config.threshold, jobs=config.jobs,
                         per_term=config.tol, quiet=config.quiet)
    scan = weyl_ratio_scan(config.qmax, t=config.t, threshold=config.threshold, jobs=config.jobs,
                           quiet=config.quiet)
    table = weyl_ratio_table(scan.reports)
    if not table.empty:
        say("[*] Largest Weyl ratios:", Fore.MAGENTA, config.quiet)
        top = table.sort_values('ratio', ascending=False).head(10)
        say(top.to_string(index=False), Fore.WHITE, config.quiet)
    return scan


def merge_scans(scans):
    merged = scans[0]
    for other in scans[1:]:
        merged.reports = sorted(merged.reports + other.reports, key=lambda r: r.sort_key())
    return merged


def cmd_lfunc(config):
    scans = [scan_functional_equation(config.moduli, config.s_values, jobs=config.jobs, quiet=config.quiet)]
    if config.vweights:
        scans.append(scan_v_weights(jobs=config.jobs, quiet=config.quiet))
    if config.moment is not None:
        scans.append(scan_sixth_moment(config.moduli, config.moment, jobs=config.jobs, quiet=config.quiet))
    return merge_scans(scans)


def cmd_zseries(config):
    scans = [scan_factorizations(config.moduli, s=s, caps=config.caps, jobs=config.jobs, quiet=config.quiet)
             for s in config.s_values]
    return merge_scans(scans)


COMMANDS = {
    "verify": cmd_verify_identities,
    "scan": cmd_scan,
    "lfunc": cmd_lfunc,
    "zseries": cmd_zseries,
}


def run(config):
    scan = COMMANDS[config.command](config)
    summary = scan.summarize(ratio_key="ratio")
    writer = ReportWriter(config.fmt, config.out, config.quiet)

    failures = [r for r in scan.reports if not r.soft and not r.passed]
    if failures:
        writer.print_failure(failures[0])
    writer.write(scan.reports, summary)

    if failures:
        say(f"[!] {len(failures)} check(s) failed.", Fore.RED, config.quiet)
        return EXIT_FAIL
    say("[*] All checks passed.", Fore.GREEN, config.quiet)
    return EXIT_PASS


def main(argv=None):
    try:
        config = get_config(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS

    print_header(config.quiet)
    try:
        return run(config)
    except LabError as e:
        say(f"[!] {type(e).__name__}: {e}", Fore.RED, config.quiet)
        return EXIT_FAIL
    except OSError as e:
        say(f"[!] Could not write reports: {e}", Fore.RED, config.quiet)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
