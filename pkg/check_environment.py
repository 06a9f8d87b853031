#!/usr/bin/env python3
"""
Check that the Triangle Spectrum environment is set up
"""

import sys


def check_environment():
    """Check interpreter, packages, project files and config"""
    print("=" * 60)
    print("Triangle Spectrum environment check")
    print("=" * 60)

    errors = []
    warnings = []

    print("\n[1] Python version...")
    python_version = sys.version_info
    print(f"    Python {python_version.major}.{python_version.minor}.{python_version.micro}")
    if python_version < (3, 8):
        errors.append("Python >= 3.8 required")
    else:
        print("    [OK] Python version is supported")

    print("\n[2] Packages...")
    required_packages = {
        'numpy': 'numpy',
        'scipy': 'scipy',
        'tqdm': 'tqdm',
    }
    optional_packages = {
        'pytest': 'pytest (tests only)',
        'hypothesis': 'hypothesis (tests only)',
    }

    missing_packages = []
    for module_name, package_name in required_packages.items():
        try:
            __import__(module_name)
            print(f"    [OK] {package_name} installed")
        except ImportError:
            missing_packages.append(package_name)
            print(f"    [FAIL] {package_name} missing")

    for module_name, package_name in optional_packages.items():
        try:
            __import__(module_name)
            print(f"    [OK] {package_name} installed")
        except ImportError:
            print(f"    [WARN] {package_name} missing (optional)")

    if missing_packages:
        errors.append(f"Missing packages: {', '.join(missing_packages)}")
        print(f"\n    Install with: pip install {' '.join(missing_packages)}")

    print("\n[3] Project files...")
    from pathlib import Path

    required_files = [
        'hyperbolic_core.py',
        'words.py',
        'word_parser.py',
        'tiling.py',
        'constants_store.py',
        'spectrum.py',
        'oracle.py',
        'render.py',
        'cli.py',
        'config_manager.py',
        'requirements.txt'
    ]

    project_root = Path(__file__).parent
    missing_files = []
    for file_name in required_files:
        if (project_root / file_name).exists():
            print(f"    [OK] {file_name}")
        else:
            missing_files.append(file_name)
            print(f"    [FAIL] {file_name} missing")

    if missing_files:
        errors.append(f"Missing files: {', '.join(missing_files)}")

    print("\n[4] Config file...")
    config_file = project_root / 'spectrum_config.json'
    if config_file.exists():
        print("    [OK] spectrum_config.json found")
        try:
            import json
            with open(config_file, 'r') as f:
                config = json.load(f)
            if 'tolerances' in config:
                print(f"    [OK] {len(config['tolerances'])} tolerances configured")
            else:
                warnings.append("Config file has no 'tolerances' section; defaults are used")
        except Exception as e:
            warnings.append(f"Config file unreadable: {e}")
    else:
        warnings.append("spectrum_config.json missing; it is created with defaults on first use")
        print("    [WARN] spectrum_config.json missing (optional)")

    print("\n" + "=" * 60)
    print("Summary")
    print("=" * 60)

    if errors:
        print("\n[ERROR] Problems found:")
        for error in errors:
            print(f"  - {error}")
        print("\nFix the problems above and retry.")
        return False
    print("\n[OK] All required components present")

    if warnings:
        print("\n[WARN] Warnings:")
        for warning in warnings:
            print(f"  - {warning}")

    print("\nEnvironment check complete")
    return True


if __name__ == "__main__":
    success = check_environment()
    sys.exit(0 if success else 1)
