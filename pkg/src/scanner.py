import sys
from concurrent.futures import ProcessPoolExecutor
from colorama import Fore, Style


def say(message, color=Fore.WHITE, quiet=False):
    if not quiet:
        print(color + message + Style.RESET_ALL, file=sys.stderr)


class ParameterScan:
    """
    Runs one worker function over a grid of cells and collects SumReports.

    Cells are plain picklable tuples; every worker returns a list of reports.
    The merged list is sorted canonically, so the result does not depend on
    the number of jobs or on completion order.
    """

    def __init__(self, name, worker, cells, jobs=1, quiet=False):
        self.name = name
        self.worker = worker
        self.cells = list(cells)
        self.jobs = max(int(jobs or 1), 1)
        self.quiet = quiet
        self.reports = []

    def run(self):
        say(f"[*] Running {self.name} over {len(self.cells)} cells "
            f"({self.jobs} job{'s' if self.jobs > 1 else ''})...", Fore.YELLOW, self.quiet)

        if self.jobs == 1 or len(self.cells) <= 1:
            batches = [self.worker(*cell) for cell in self.cells]
        else:
            chunk = max(len(self.cells) // (4 * self.jobs), 1)
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                batches = list(pool.map(self.worker, *zip(*self.cells), chunksize=chunk))

        self.reports = sorted((r for batch in batches for r in batch), key=lambda r: r.sort_key())
        return self.reports

    def summarize(self, ratio_key=None):
        """Summary statistics over the collected reports (max ratio, argmax, failures)."""
        hard = [r for r in self.reports if not r.soft]
        failures = [r for r in hard if not r.passed]
        findings = [r for r in self.reports if r.soft and not r.passed]

        best = None
        if ratio_key is not None:
            scored = [r for r in self.reports if ratio_key in r.params]
            if scored:
                best = max(scored, key=lambda r: (r.params[ratio_key], r.sort_key()))

        summary = {
            'scan': self.name,
            'count': len(self.reports),
            'failures': len(failures),
            'findings': len(findings),
        }
        if best is not None:
            summary['max_ratio'] = best.params[ratio_key]
            summary['argmax'] = best.identity + " " + best.param_string()

        color = Fore.GREEN if not failures else Fore.RED
        say(f"• Checks run    : {summary['count']}", Fore.MAGENTA, self.quiet)
        say(f"• Hard failures : {summary['failures']}", color, self.quiet)
        if findings:
            say(f"• Soft findings : {summary['findings']}", Fore.YELLOW, self.quiet)
        if best is not None:
            say(f"• Max ratio     : {summary['max_ratio']:.6f} at {summary['argmax']}",
                Fore.MAGENTA, self.quiet)
        return summary
