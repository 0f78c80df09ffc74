#!/usr/bin/env python3
"""
Verification Runner for primtrace
Runs every verification suite and prints a per-suite summary
"""

import argparse
import sys
import time
from pathlib import Path

# Add the src directory to Python path
current_dir = Path(__file__).parent
project_root = current_dir.parent
src_dir = project_root / "src"
sys.path.insert(0, str(src_dir))

# Import our configuration
from primtrace.core.config import settings
from primtrace.core.models import VerifyScopeEnum
from primtrace.cli.main import cmd_verify_paper

def print_banner():
    """Print runner banner"""
    print("=" * 80)
    print(f"🔢 {settings.APP_NAME.upper()} VERIFICATION SUITES")
    print("=" * 80)
    print(f"Version: {settings.APP_VERSION}")
    print(f"Enumeration ceiling: {settings.ENUMERATION_CEILING}")
    print(f"Character sum ceiling: {settings.CHARSUM_CEILING}")
    print(f"Rho budget: {settings.RHO_BUDGET}")
    print("=" * 80)

def run_suite(scope, budget, full_sweep=False):
    """Run one suite and print its summary line"""
    print(f"⏳ Running {scope.value}...")
    started = time.time()
    report = cmd_verify_paper(scope.value, budget, full_sweep)
    summary = report.verdicts[0]
    elapsed = time.time() - started
    if summary["failures"]:
        print(f"❌ {scope.value}: {summary['failures']} of {summary['rows']} rows failed ({elapsed:.1f}s)")
        for line in report.lines:
            if "[FAIL]" in line:
                print(f"   {line}")
        return False
    print(f"✅ {scope.value}: {summary['rows']} rows passed ({elapsed:.1f}s)")
    return True

def main():
    """Main runner function"""
    parser = argparse.ArgumentParser(description="Run the primtrace verification suites")
    parser.add_argument("--skip", action="append", default=[], choices=[s.value for s in VerifyScopeEnum if s != VerifyScopeEnum.ALL])
    parser.add_argument("--budget", type=int, default=None)
    parser.add_argument("--full-sweep", action="store_true")
    args = parser.parse_args()

    print_banner()
    results = {}
    for scope in VerifyScopeEnum:
        if scope == VerifyScopeEnum.ALL or scope.value in args.skip:
            continue
        try:
            results[scope.value] = run_suite(scope, args.budget, args.full_sweep)
        except Exception as e:
            print(f"❌ {scope.value} crashed: {e}")
            results[scope.value] = False

    print("=" * 80)
    if all(results.values()):
        print("🎉 ALL SUITES PASSED")
        sys.exit(0)
    print("⚠️  Failing suites: " + ", ".join(name for name, ok in results.items() if not ok))
    sys.exit(1)

if __name__ == "__main__":
    main()
