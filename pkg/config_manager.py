"""
Spectrum Configuration Manager
Reads tolerances, coder limits and runtime options from a JSON config file
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

TOOL_VERSION = "1.0.0"
CONSTANTS_ENV_VAR = "TRISPEC_CONSTANTS_DIR"


class SpectrumConfigManager:
    """Spectrum configuration manager"""

    def __init__(self, config_path: str = None):
        """
        Initialize configuration manager

        Args:
            config_path: Path to config file, if None then use default path
        """
        if config_path is None:
            default_config = Path(__file__).parent / "spectrum_config.json"
            config_path = str(default_config)

        self.config_path = config_path
        self.config = self._load_config()

    def _load_config(self) -> Dict:
        """Load configuration file"""
        config_path = Path(self.config_path)

        if not config_path.exists():
            # If config file doesn't exist, create default config
            default_config = self._get_default_config()
            self._save_config(default_config)
            return default_config

        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                config = json.load(f)
            return config
        except Exception as e:
            print(f"Error loading config file: {e}")
            return self._get_default_config()

    def _save_config(self, config: Dict):
        """Save configuration file"""
        try:
            with open(self.config_path, 'w', encoding='utf-8') as f:
                json.dump(config, f, ensure_ascii=False, indent=2)
        except Exception as e:
            print(f"Error saving config file: {e}")

    @staticmethod
    def _get_default_config() -> Dict:
        """Get default configuration"""
        return {
            "tolerances": {
                "angle": 1e-10,
                "period_match": 1e-8,
                "dedup": 1e-7,
                "length_group": 1e-9,
                "length_slack": 1e-9,
                "disjointness": 1e-12,
                "hyperbolic_margin": 1e-10
            },
            "coder": {
                "max_steps": 2000
            },
            "strip": {
                "midpoint_tol": 1e-12,
                "max_polygons": 200,
                "agreement_tol": 1e-10
            },
            "runtime": {
                "threads": 0,
                "show_progress": True
            },
            "constants_dir": "constants"
        }

    def get(self, section: str, key: str, default: Any = None) -> Any:
        """
        Get a value, falling back to the built-in default

        Args:
            section: Section name, e.g., "tolerances"
            key: Key inside the section
            default: Returned when neither the file nor the defaults have the key
        """
        value = self.config.get(section, {}).get(key)
        if value is None:
            value = self._get_default_config().get(section, {}).get(key, default)
        return value

    def get_tolerance(self, name: str) -> float:
        value = self.get("tolerances", name)
        if value is None:
            raise ValueError(f"Unknown tolerance '{name}'")
        return float(value)

    def tiling_options(self) -> Dict[str, float]:
        """Tiling keyword options from the tolerances and strip sections"""
        return {
            "angle_tol": self.get_tolerance("angle"),
            "period_tol": self.get_tolerance("period_match"),
            "midpoint_tol": float(self.get("strip", "midpoint_tol")),
            "max_polygons": int(self.get("strip", "max_polygons")),
            "agreement_tol": float(self.get("strip", "agreement_tol")),
        }

    def get_threads(self) -> int:
        """Worker threads; 0 means all cores"""
        threads = int(self.get("runtime", "threads", 0))
        if threads <= 0:
            threads = os.cpu_count() or 1
        return threads

    def show_progress(self) -> bool:
        return bool(self.get("runtime", "show_progress", True))

    def get_constants_dir(self) -> Path:
        """Constants directory; the environment variable wins over the config file"""
        env_dir = os.getenv(CONSTANTS_ENV_VAR)
        if env_dir:
            return Path(env_dir)
        configured = Path(self.config.get("constants_dir") or "constants")
        if not configured.is_absolute():
            configured = Path(__file__).parent / configured
        return configured

    def update(self, section: str, **kwargs):
        """
        Update configuration section

        Args:
            section: Section name
            **kwargs: Configuration items to update
        """
        if section not in self._get_default_config() or section == "constants_dir":
            raise ValueError(f"Config section '{section}' not found")
        self.config.setdefault(section, {}).update(kwargs)
        self._save_config(self.config)

    def set_constants_dir(self, path: str):
        self.config["constants_dir"] = path
        self._save_config(self.config)


_DEFAULT_MANAGER: Optional[SpectrumConfigManager] = None


def get_config(config_path: str = None) -> SpectrumConfigManager:
    """Shared manager for the default path, or a fresh one for an explicit path"""
    global _DEFAULT_MANAGER
    if config_path is not None:
        return SpectrumConfigManager(config_path)
    if _DEFAULT_MANAGER is None:
        _DEFAULT_MANAGER = SpectrumConfigManager()
    return _DEFAULT_MANAGER
