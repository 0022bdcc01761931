#!/usr/bin/env python3
"""Verify that the importance engine is properly installed."""

import sys

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

console = Console()


def check_python_version():
    """Check if Python version is 3.9 or higher."""
    version = sys.version_info
    found = f"{version.major}.{version.minor}.{version.micro}"
    return (version.major, version.minor) >= (3, 9), found


def check_dependencies():
    """Check if all required dependencies are installed."""
    # distribution name -> import name
    dependencies = {
        "numpy": "numpy",
        "scikit-learn": "sklearn",
        "drawsvg": "drawsvg",
        "pyyaml": "yaml",
        "python-dotenv": "dotenv",
        "pydantic": "pydantic",
        "tenacity": "tenacity",
        "click": "click",
        "rich": "rich",
        "pytest": "pytest",
        "hypothesis": "hypothesis",
    }

    results = {}
    for dep, module in dependencies.items():
        try:
            __import__(module)
            results[dep] = (True, "✓")
        except ImportError:
            results[dep] = (False, "✗")

    return results


def check_modules():
    """Check if project modules can be imported."""
    modules = [
        "src.utils.config",
        "src.utils.logger",
        "src.utils.errors",
        "src.models",
        "src.geometry",
        "src.storage",
        "src.predictors",
        "src.counterfactual",
        "src.scoring",
        "src.evaluation",
        "src.synth",
        "src.renderer",
        "src.publisher",
        "src.orchestrator",
        "src.cli",
    ]

    results = {}
    for module in modules:
        try:
            __import__(module)
            results[module] = (True, "✓")
        except ImportError as e:
            results[module] = (False, f"✗ {str(e)}")

    return results


def check_configuration():
    """Check that configuration loads and a synthetic scene scores."""
    try:
        from src.scoring import score_scene
        from src.synth import SynthKind, SynthSpec, generate
        from src.utils.config import Config

        config = Config.from_env()
        report = score_scene(generate(SynthSpec(kind=SynthKind.LEAD_FOLLOW)))
        return {
            "Config loads": True,
            f"Scoring tau = {config.scoring.tau}": True,
            "Synthetic scene scores": len(report.objects) > 0,
        }
    except Exception as e:
        return {"Error": str(e)}


def run_tests():
    """Run pytest tests."""
    try:
        import pytest

        result = pytest.main(["-q", "--no-cov", "-m", "not functional", "tests/"])
        return result == 0
    except Exception:
        return False


def main():
    """Run all verification checks."""
    console.print(
        Panel.fit(
            "[bold cyan]Counterfactual Importance Installation Verification"
            "[/bold cyan]",
            border_style="cyan",
        )
    )

    console.print("\n[bold]1. Checking Python Version...[/bold]")
    py_ok, py_version = check_python_version()
    if py_ok:
        console.print(f"   [green]✓[/green] Python {py_version} (>= 3.9 required)")
    else:
        console.print(f"   [red]✗[/red] Python {py_version} (>= 3.9 required)")

    console.print("\n[bold]2. Checking Dependencies...[/bold]")
    deps = check_dependencies()
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Package", style="cyan")
    table.add_column("Status", style="green")

    all_deps_ok = True
    for dep, (ok, status) in deps.items():
        table.add_row(dep, f"[green]{status}[/green]" if ok else f"[red]{status}[/red]")
        all_deps_ok = all_deps_ok and ok

    console.print(table)
    if not all_deps_ok:
        console.print(
            "   [red]✗[/red] Some dependencies missing. "
            "Run: pip install -r requirements.txt"
        )

    console.print("\n[bold]3. Checking Project Modules...[/bold]")
    all_modules_ok = True
    for module, (ok, status) in check_modules().items():
        color = "green" if ok else "red"
        console.print(f"   [{color}]{status}[/{color}] {module}")
        all_modules_ok = all_modules_ok and ok

    console.print("\n[bold]4. Checking Configuration...[/bold]")
    for key, value in check_configuration().items():
        if value is True:
            console.print(f"   [green]✓[/green] {key}")
        else:
            console.print(f"   [red]✗[/red] {key}: {value}")

    console.print("\n[bold]5. Running Tests...[/bold]")
    if run_tests():
        console.print("   [green]✓[/green] All tests passed")
    else:
        console.print("   [red]✗[/red] Some tests failed")

    console.print("\n" + "=" * 60)
    if py_ok and all_deps_ok and all_modules_ok:
        console.print(
            "[bold green]✓ Installation verified successfully![/bold green]\n"
        )
        console.print("Next steps:")
        console.print("1. Run: importance gen lead_follow --out scenes/lead.json")
        console.print("2. Run: importance score scenes/lead.json --out report.json")
        console.print("3. Run: importance render scenes/lead.json report.json "
                      "--out lead.svg\n")
    else:
        console.print("[bold red]✗ Installation verification failed[/bold red]\n")
        console.print("Please address the issues above and try again.\n")
        sys.exit(1)


if __name__ == "__main__":
    main()
